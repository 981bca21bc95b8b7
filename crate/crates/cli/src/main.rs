use clap::Parser;

fn main() {
    let cli = qmetro_cli::Cli::parse();
    if let Err(e) = qmetro_cli::run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
