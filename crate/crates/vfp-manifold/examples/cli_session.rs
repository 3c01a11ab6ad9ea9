//! Drives the command-line interface in-process, writing artifacts under a temporary directory.

use clap::Parser;
use vfp_manifold::cli::{execute, Cli};

fn main() {
    let out = std::env::temp_dir().join("vfp-cli-session");
    let dir = out.to_str().expect("utf-8 path");
    let commands: [&[&str]; 5] = [
        &["jn", "--n", "3", "--y", "10", "--mu", "-5"],
        &["dispersion", "invert", "--gamma", "0.1", "--lambda", "0.05"],
        &["dispersion", "scan", "--c", "7", "--gamma", "0.2", "--lambda-grid", "lin:0:0.2:5"],
        &["regimes", "map", "--gamma-grid", "log:1e-8:1e-1:4", "--lambda-grid", "log:1e-4:1e-1:4"],
        &["mellin", "check", "--alpha", "0.5", "--lambda-grid", "log:1e-3:1e-1:3"],
    ];
    let mut stdout = std::io::stdout();
    for args in commands {
        println!("$ vfp --out {dir} {}", args.join(" "));
        let cli = Cli::parse_from(["vfp", "--out", dir].iter().chain(args.iter()));
        if let Err(e) = execute(&cli, &mut stdout) {
            println!("error: {e} (exit code {})", e.exit_code());
        }
    }
}
