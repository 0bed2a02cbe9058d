use clap::Parser;
use rank3_floquet::cli::{run, Args};

fn main() {
    let args = Args::parse();
    std::process::exit(run(&args));
}
