use clap::Parser;

fn main() {
    let cli = confusion_bounds_cli::Cli::parse();
    match confusion_bounds_cli::run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(err.exit_code());
        }
    }
}
