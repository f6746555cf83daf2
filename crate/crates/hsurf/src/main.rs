use clap::Parser;

fn main() {
    let cli = hsurf::cli::Cli::parse();
    std::process::exit(hsurf::cli::run(cli));
}
