fn main() {
  let code =
    lefschetz_calculus::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
  std::process::exit(code);
}
