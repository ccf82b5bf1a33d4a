fn main() -> std::process::ExitCode {
    lapratio::cli::main()
}
