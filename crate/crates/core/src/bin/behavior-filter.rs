fn main() -> std::process::ExitCode {
    behavior_filter::cli::main_entry()
}
