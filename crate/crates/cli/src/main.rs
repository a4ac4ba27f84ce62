use clap::Parser;

use fracsusy_cli::{execute, Cli};

fn main() {
    let cli = Cli::parse();
    let out = execute(cli.command, &cli.opts);
    if out.exit_code == 2 {
        eprint!("{}", out.stdout);
    } else {
        print!("{}", out.stdout);
    }
    std::process::exit(out.exit_code);
}
