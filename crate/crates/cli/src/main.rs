fn main() {
    let env: Vec<(String, String)> = std::env::vars().collect();
    let code = qspace_cli::run(std::env::args_os(), &env, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
