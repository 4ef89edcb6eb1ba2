fn main() {
    if let Err(e) = qgsynth_cli::run(std::env::args_os()) {
        eprintln!("qgsynth: {}", e.to_string().trim_end());
        std::process::exit(e.exit_code());
    }
}
