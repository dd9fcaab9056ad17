use clap::Parser;

fn main() {
    let cli = nfst_cli::Cli::parse();
    let code = nfst_cli::run(cli, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
