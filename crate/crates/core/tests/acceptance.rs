//! Prints one pass/fail line per acceptance criterion and exits non-zero
//! if any fails. Timings go to stderr.

use boundary_rep::acceptance::{report, run_all, AcceptanceConfig};

fn main() {
    let cfg = AcceptanceConfig::default();
    let outcomes = run_all(&cfg);
    for o in &outcomes {
        eprintln!("criterion {:>2} took {:.1} s", o.id, o.wall.as_secs_f64());
    }
    print!("{}", report(&outcomes));
    if outcomes.iter().any(|o| !o.pass) {
        std::process::exit(1);
    }
}
