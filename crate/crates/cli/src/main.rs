use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use boundary_rep::output::{render, Format};
use boundary_rep::Error;
use boundary_rep_cli::{run, Experiment, ModelSpec, RunConfig, TList};
use clap::Parser;

const SET_HELP: &str = "\
Boundary sets:
  tree   comma-separated cylinder prefixes, e.g. 'a,bA' is C(a) ∪ C(bA);
         '*' or 'all' is the whole boundary, '-' or 'none' the empty set.
  plane  comma-separated arcs in turns, 'start:end', e.g. '0:0.25,0.5:0.6';
         '*' or 'all' is the whole circle, '-' or 'none' the empty set.
  A leading '!' takes the complement.

Words (--gamma): comma-separated. Tree letters are a, b, c, … with capitals
for inverses ('abA'). Plane words are space-separated generator labels
('a1 b1 A1' on genus2, 'x y' on triangle237).

Orbit caches for the plane models are kept in $BOUNDARY_REP_CACHE_DIR when
that variable is set.

Exit status: 0 when every in-experiment check passes, 1 when one fails (the
witness is printed to stderr), 2 on configuration errors.";

#[derive(Parser, Debug)]
#[command(name = "boundary-rep", version, about = "Boundary representation experiments", after_help = SET_HELP)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    command: Experiment,

    /// Model: free:rank=K,edge=P/Q | plane:genus2 | plane:triangle237.
    #[arg(long, default_value = "free:rank=2,edge=1")]
    model: String,

    /// Radii: numbers and inclusive ranges, e.g. 2..12 or 1,2,4..6.
    #[arg(long)]
    t: Option<String>,

    /// Upper limit for sweeps (word length, power, t).
    #[arg(long = "t-max")]
    t_max: Option<usize>,

    /// Depth budget (ball depth, truncation depth, sample count).
    #[arg(long)]
    depth: Option<usize>,

    #[arg(long, default_value_t = 20_240_601)]
    seed: u64,

    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long)]
    threads: Option<usize>,

    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,

    /// csv or json.
    #[arg(long, default_value = "csv")]
    format: String,

    #[arg(long = "U", allow_hyphen_values = true)]
    u: Option<String>,

    #[arg(long = "V", allow_hyphen_values = true)]
    v: Option<String>,

    #[arg(long = "W", allow_hyphen_values = true)]
    w: Option<String>,

    /// Group elements.
    #[arg(long)]
    gamma: Option<String>,

    /// Edge-length factors (rescale-check) or window half-width (margulis-fit, tailbound).
    #[arg(long)]
    scale: Option<String>,
}

fn config(cli: &Cli) -> boundary_rep::Result<RunConfig> {
    let cfg = RunConfig {
        model: cli.model.parse::<ModelSpec>()?,
        t: cli.t.as_deref().map(str::parse::<TList>).transpose()?,
        t_max: cli.t_max,
        depth: cli.depth,
        seed: cli.seed,
        threads: cli.threads,
        out: cli.out.clone(),
        format: cli.format.parse::<Format>()?,
        u: cli.u.clone(),
        v: cli.v.clone(),
        w: cli.w.clone(),
        gamma: cli.gamma.clone(),
        scale: cli.scale.clone(),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start {n} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let name = cli.command.name();
    let start = Instant::now();
    let outcome = match run(cli.command, &cfg) {
        Ok(o) => o,
        Err(Error::Assertion(w)) => {
            eprintln!("assertion failed: {w}");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = render(&outcome.tables, &cfg.header(name), cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    eprintln!("{name}: {:.3} s", start.elapsed().as_secs_f64());
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for w in &outcome.failures {
            eprintln!("assertion failed: {w}");
        }
        ExitCode::from(1)
    }
}
