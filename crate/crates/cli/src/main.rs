use clap::Parser;

fn main() {
    std::process::exit(tmesh_cli::run(tmesh_cli::Cli::parse()));
}
