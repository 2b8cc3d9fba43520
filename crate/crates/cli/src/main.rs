mod config;
mod run;

use anyhow::Context;
use clap::Parser;

/// Evaluate characterizing constants for supremal Hardy-type inequalities
/// and maximal-operator norms, verify them against brute-force search, and
/// sweep parameters. Reads a key-value config, writes CSV + JSONL reports.
#[derive(Parser, Debug)]
#[command(name = "lorentz-hardy", version)]
struct Args {
    /// Path to the run configuration
    config: std::path::PathBuf,

    /// Override the number of grid points
    #[arg(long)]
    grid_points: Option<usize>,

    /// Override the search seed
    #[arg(long)]
    seed: Option<u64>,

    /// Override the equivalence window
    #[arg(long)]
    window: Option<f64>,

    /// Override the output path stem
    #[arg(long)]
    out: Option<String>,

    /// Print the parsed config in canonical form and exit
    #[arg(long)]
    print_config: bool,
}

fn main() {
    let code = match real_main() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            run::EXIT_INTERNAL
        }
    };
    std::process::exit(code);
}

fn real_main() -> anyhow::Result<i32> {
    let args = Args::parse();
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let mut cfg = config::parse_config(&text)?;
    if let Some(n) = args.grid_points {
        cfg.grid_points = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(w) = args.window {
        cfg.window = w;
    }
    if let Some(out) = args.out {
        cfg.out = out;
    }
    if args.print_config {
        print!("{}", config::render_config(&cfg));
        return Ok(run::EXIT_OK);
    }
    run::run(&cfg)
}
