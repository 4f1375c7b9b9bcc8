//! One function per subcommand. Each returns the tables to emit and the
//! witnesses of any in-experiment assertion that failed.

use boundary_rep::acceptance::{run_all, AcceptanceConfig};
use boundary_rep::counting::{
    equidistribution_streaming, equidistribution_transfer, growth_exponent, tree_ball_count,
};
use boundary_rep::measure::{
    audit_sampling_set, build_sampling_set, certify_regularity, sampled_integral,
    tree_regularity_exact, tree_sampling_sweep,
};
use boundary_rep::oracle::{
    coefficient_brute, coefficient_one_brute, lambda_l1_brute, sup_norm_tt1_brute,
    truncation_rank_exact,
};
use boundary_rep::output::{Cell, Table};
use boundary_rep::plane::{
    margulis_fit, mc_boundary_integral, parse_arc_set, plane_equidistribution,
    plane_sup_norm_tt1, spherical_function, ArcSet, PlaneModel,
};
use boundary_rep::rep::lambda::{lambda_estimation_ratio, lambda_estimation_window};
use boundary_rep::rep::rank::{truncation_rank, DEFAULT_DIMENSION_BUDGET};
use boundary_rep::rep::tail::tail_bound_check;
use boundary_rep::rep::tt::DEFAULT_ANNULUS_BUDGET;
use boundary_rep::rep::{
    coefficient_one, convergence_experiment, lambda_exact, lambda_l1_exact, matrix_coefficient,
    sup_norm_tt1, SimpleFunction,
};
use boundary_rep::space::{ModelSampler, SpaceModel};
use boundary_rep::spectra::{
    plane_marked_lengths, rescaling_invariance_check, tree_marked_lengths,
    plane_translation_length,
};
use boundary_rep::tree::{
    parse_cylinder_set, words_of_length, BoundaryWord, CylinderSet, ReducedWord, TreeModel,
};
use boundary_rep::{Error, ExactScalar, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{parse_scales, Model, RunConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Experiment {
    Coeff,
    Norms,
    Bounded,
    TtConverge,
    Equidist,
    Regularity,
    Sampling,
    Tailbound,
    Rank,
    Mls,
    RescaleCheck,
    Growth,
    MargulisFit,
    Selftest,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Coeff => "coeff",
            Experiment::Norms => "norms",
            Experiment::Bounded => "bounded",
            Experiment::TtConverge => "tt-converge",
            Experiment::Equidist => "equidist",
            Experiment::Regularity => "regularity",
            Experiment::Sampling => "sampling",
            Experiment::Tailbound => "tailbound",
            Experiment::Rank => "rank",
            Experiment::Mls => "mls",
            Experiment::RescaleCheck => "rescale-check",
            Experiment::Growth => "growth",
            Experiment::MargulisFit => "margulis-fit",
            Experiment::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub failures: Vec<String>,
}

impl Outcome {
    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(witness());
        }
    }
}

pub fn run(exp: Experiment, cfg: &RunConfig) -> Result<Outcome> {
    if exp == Experiment::Selftest {
        return selftest(cfg);
    }
    let model = cfg.model.build()?;
    match (exp, &model) {
        (Experiment::Coeff, Model::Tree(m)) => tree_coeff(m, cfg),
        (Experiment::Coeff, Model::Plane(m)) => plane_coeff(m, cfg),
        (Experiment::Norms, Model::Tree(m)) => tree_norms(m, cfg),
        (Experiment::Norms, Model::Plane(m)) => plane_norms(m, cfg),
        (Experiment::Bounded, Model::Tree(m)) => tree_bounded(m, cfg),
        (Experiment::Bounded, Model::Plane(m)) => plane_bounded(m, cfg),
        (Experiment::TtConverge, Model::Tree(m)) => tt_converge(m, cfg),
        (Experiment::Equidist, Model::Tree(m)) => tree_equidist(m, cfg),
        (Experiment::Equidist, Model::Plane(m)) => plane_equidist(m, cfg),
        (Experiment::Regularity, Model::Tree(m)) => tree_regularity(m, cfg),
        (Experiment::Regularity, Model::Plane(m)) => plane_regularity(m, cfg),
        (Experiment::Sampling, Model::Tree(m)) => tree_sampling(m, cfg),
        (Experiment::Sampling, Model::Plane(m)) => plane_sampling(m, cfg),
        (Experiment::Tailbound, Model::Tree(m)) => tailbound(m, cfg),
        (Experiment::Rank, Model::Tree(m)) => rank(m, cfg),
        (Experiment::Mls, Model::Tree(m)) => tree_mls(m, cfg),
        (Experiment::Mls, Model::Plane(m)) => plane_mls(m, cfg),
        (Experiment::RescaleCheck, Model::Tree(m)) => rescale_check(m, cfg),
        (Experiment::Growth, _) => growth(&model, cfg),
        (Experiment::MargulisFit, Model::Plane(m)) => margulis(m, cfg),
        (e, _) => Err(Error::Domain(format!(
            "{} is not available for model {}",
            e.name(),
            cfg.model
        ))),
    }
}

// ------------------------------------------------------------ parsing helpers

fn cylinders(m: &TreeModel, s: Option<&str>, default: &str) -> Result<CylinderSet> {
    parse_cylinder_set(m.rank(), s.unwrap_or(default))
}

fn arcs(s: Option<&str>, default: &str) -> Result<ArcSet> {
    parse_arc_set(s.unwrap_or(default))
}

fn tree_words(m: &TreeModel, s: &str) -> Result<Vec<ReducedWord>> {
    let words: Vec<ReducedWord> = s
        .split(',')
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if words.is_empty() {
        return Err(Error::Parse("--gamma lists no words".into()));
    }
    for w in &words {
        m.check_word(w)?;
    }
    Ok(words)
}

fn plane_words(m: &PlaneModel, s: &str) -> Result<Vec<Vec<u8>>> {
    let words: Vec<Vec<u8>> = s
        .split(',')
        .map(|w| m.group().parse_word(w))
        .collect::<Result<_>>()?;
    if words.is_empty() {
        return Err(Error::Parse("--gamma lists no words".into()));
    }
    Ok(words)
}

fn require_gamma(cfg: &RunConfig) -> Result<&str> {
    cfg.gamma
        .as_deref()
        .ok_or_else(|| Error::Parse("--gamma is required".into()))
}

fn indicator(set: &ArcSet) -> impl Fn(f64) -> f64 + '_ {
    move |theta| if set.contains_angle(theta) { 1.0 } else { 0.0 }
}

fn exact(x: ExactScalar) -> Cell {
    Cell::Exact(x)
}

// ------------------------------------------------------------ coeff

fn tree_coeff(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let words = tree_words(m, require_gamma(cfg)?)?;
    let sets = cfg.u.is_some() || cfg.v.is_some();
    let (g, h) = (
        SimpleFunction::indicator(&cylinders(m, cfg.u.as_deref(), "*")?),
        SimpleFunction::indicator(&cylinders(m, cfg.v.as_deref(), "*")?),
    );
    let mut out = Outcome::default();
    let mut t = Table::new("coefficients", &["gamma", "length", "value", "oracle", "agree"]);
    for w in &words {
        let (value, oracle) = if sets {
            (
                matrix_coefficient(m, w, &g, &h)?,
                coefficient_brute(m, w, &g, &h)?,
            )
        } else {
            (coefficient_one(m, w)?, coefficient_one_brute(m, w)?)
        };
        let agree = value == oracle;
        out.check(agree, || {
            format!("coefficient of {w}: streaming {value} vs cell sum {oracle}")
        });
        let len = m.length(w);
        t.push(vec![
            w.to_string().into(),
            len.to_string().into(),
            exact(value),
            exact(oracle),
            agree.into(),
        ]);
    }
    out.tables.push(t);
    Ok(out)
}

fn plane_coeff(m: &PlaneModel, cfg: &RunConfig) -> Result<Outcome> {
    let words = plane_words(m, require_gamma(cfg)?)?;
    let (u, v) = (arcs(cfg.u.as_deref(), "*")?, arcs(cfg.v.as_deref(), "*")?);
    let whole = u.measure() == 1.0 && v.measure() == 1.0;
    let mut out = Outcome::default();
    let mut t = Table::new(
        "coefficients",
        &["gamma", "displacement", "value", "oracle", "agree"],
    );
    for w in &words {
        let g = m.group().evaluate(w);
        let d = g.displacement();
        let value = PlaneModel::matrix_coefficient(
            &g,
            &indicator(&u),
            &u.breakpoints(),
            &indicator(&v),
            &v.breakpoints(),
            1e-11,
        );
        // With U = V = the whole circle the coefficient is the spherical
        // function; otherwise the quadrature is compared with Monte Carlo.
        let (oracle, agree) = if whole {
            let o = spherical_function(d);
            (o, (value - o).abs() < 1e-8)
        } else {
            let inv = g.inverse();
            let f = |theta: f64| {
                let b = boundary_rep::plane::CirclePoint::new(theta);
                let x = PlaneModel::lambda_element(&g, &b);
                x * indicator(&u)(inv.apply_angle(theta)) * indicator(&v)(theta)
            };
            let e = mc_boundary_integral(&f, 1 << 18, cfg.seed)?;
            (e.value, (value - e.value).abs() <= 5.0 * e.std_error + 1e-12)
        };
        out.check(agree, || {
            format!("coefficient of {}: quadrature {value} vs {oracle}", m.group().format_word(w))
        });
        t.push(vec![
            m.group().format_word(w).into(),
            d.into(),
            value.into(),
            oracle.into(),
            agree.into(),
        ]);
    }
    out.tables.push(t);
    Ok(out)
}

// ------------------------------------------------------------ norms

fn tree_norms(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let ns: Vec<usize> = integer_list(&cfg.t_or(&(1..=20).map(f64::from).collect::<Vec<_>>()))?;
    let mut out = Outcome::default();
    let mut t = Table::new("lambda_norms", &["n", "l1", "ratio", "oracle", "agree"]);
    for &n in &ns {
        let l1 = lambda_l1_exact(m, n);
        let ratio = lambda_estimation_ratio(m, n);
        // The cell enumeration is exponential in n; it is run where cheap.
        let (oracle, agree) = if n <= 10 {
            let b = lambda_l1_brute(m, n)?;
            let ok = b == l1;
            (Cell::Exact(b), ok)
        } else {
            (Cell::Text(String::new()), true)
        };
        out.check(agree, || format!("‖λ^q‖₁ at |q| = {n} disagrees with the cell sum"));
        t.push(vec![n.into(), exact(l1), exact(ratio), oracle, agree.into()]);
    }
    let n_max = *ns.last().expect("nonempty");
    let w = lambda_estimation_window(m, n_max);
    let mut win = Table::new("window", &["n_max", "low", "low_at", "high", "high_at"]);
    win.push(vec![
        n_max.into(),
        exact(w.low),
        w.low_at.into(),
        exact(w.high),
        w.high_at.into(),
    ]);
    out.tables.push(t);
    out.tables.push(win);
    Ok(out)
}

fn plane_norms(m: &PlaneModel, cfg: &RunConfig) -> Result<Outcome> {
    let ts = cfg.t_or(&[3.0, 4.0, 5.0, 6.0, 7.0]);
    let mut out = Outcome::default();
    let mut t = Table::new(
        "lambda_norms",
        &["t", "gamma", "displacement", "l1", "ratio", "mc", "std_error", "agree"],
    );
    for &tt in &ts {
        let s = m.annulus(tt)?;
        // The element whose displacement is closest to t.
        let e = s
            .iter()
            .min_by(|x, y| (x.dist - tt).abs().total_cmp(&(y.dist - tt).abs()))
            .ok_or_else(|| Error::Domain(format!("S_t is empty at t = {tt}")))?;
        let d = e.dist;
        let l1 = spherical_function(d);
        let f = |theta: f64| {
            PlaneModel::lambda_element(&e.g, &boundary_rep::plane::CirclePoint::new(theta))
        };
        let mc = mc_boundary_integral(&f, 1 << 16, cfg.seed)?;
        let agree = (mc.value - l1).abs() <= 5.0 * mc.std_error;
        out.check(agree, || format!("‖λ‖₁ at d = {d}: Monte Carlo {} vs {l1}", mc.value));
        t.push(vec![
            tt.into(),
            m.group().format_word(&e.word).into(),
            d.into(),
            l1.into(),
            (l1 / (d * (-d / 2.0).exp())).into(),
            mc.value.into(),
            mc.std_error.into(),
            agree.into(),
        ]);
    }
    out.tables.push(t);
    Ok(out)
}

fn integer_list(ts: &[f64]) -> Result<Vec<usize>> {
    ts.iter()
        .map(|&t| {
            if t.fract() == 0.0 && t >= 1.0 {
                Ok(t as usize)
            } else {
                Err(Error::Parse(format!("expected positive integers, got {t}")))
            }
        })
        .collect()
}

// ------------------------------------------------------------ bounded

fn tree_bounded(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let ts = cfg.t_or(&(1..=12).map(f64::from).collect::<Vec<_>>());
    let mut out = Outcome::default();
    let mut t = Table::new("sup_norms", &["t", "s_t_size", "sup_norm", "oracle"]);
    for &tt in &ts {
        let s = sup_norm_tt1(m, tt, DEFAULT_ANNULUS_BUDGET)?;
        let size = m.annulus_size(tt)?;
        // The per-pair sum is quadratic in |S_t|; only small annuli get it.
        let oracle = if size <= 2_000 {
            let b = sup_norm_tt1_brute(m, tt)?;
            out.check(b == s, || format!("sup norm at t = {tt}: {s} vs per-pair sum {b}"));
            Cell::Exact(b)
        } else {
            Cell::Text(String::new())
        };
        out.check(s.to_f64() <= 1.0 + 1e-12, || {
            format!("sup norm at t = {tt} is {}", s.to_decimal_string(17))
        });
        t.push(vec![tt.into(), size.into(), exact(s), oracle]);
    }
    out.tables.push(t);
    Ok(out)
}

/// Integer radii `lo..=hi`, shifted down as a block when `hi + reach` would
/// leave the cached orbit (triangle237 caches only to radius 8).
fn plane_default_ts(m: &PlaneModel, lo: u32, hi: u32, reach: f64) -> Vec<f64> {
    let top = ((m.cache_radius() - reach).floor() as u32).min(hi);
    let shift = hi - top;
    (lo.saturating_sub(shift).max(1)..=top).map(f64::from).collect()
}

fn plane_bounded(m: &PlaneModel, cfg: &RunConfig) -> Result<Outcome> {
    let ts = cfg.t_or(&plane_default_ts(m, 6, 10, m.quotient_radius()));
    let offset: f64 = ChaCha8Rng::seed_from_u64(cfg.seed).gen();
    let samples = cfg.depth.unwrap_or(512);
    let mut out = Outcome::default();
    let mut t = Table::new(
        "sup_norms",
        &["t", "s_t_size", "sup_lower_bound", "min_value", "samples"],
    );
    let mut sups = Vec::new();
    for &tt in &ts {
        let s = plane_sup_norm_tt1(m, tt, samples, offset)?;
        sups.push(s.sup_lower_bound);
        t.push(vec![
            tt.into(),
            s.s_t_size.into(),
            s.sup_lower_bound.into(),
            s.min_value.into(),
            s.samples.into(),
        ]);
    }
    let hi = sups.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = sups.iter().copied().fold(f64::INFINITY, f64::min);
    out.check(hi / lo < 3.0, || format!("sup-norm spread {} ≥ 3", hi / lo));
    out.tables.push(t);
    Ok(out)
}

// ------------------------------------------------------------ tt-converge

fn tt_converge(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let u = cylinders(m, cfg.u.as_deref(), "a")?;
    let v = cylinders(m, cfg.v.as_deref(), "b")?;
    let w = cylinders(m, cfg.w.as_deref(), "a")?;
    let ts = cfg.t_or(&(2..=12).map(f64::from).collect::<Vec<_>>());
    let rows = convergence_experiment(m, &u, &v, &w, &ts, DEFAULT_ANNULUS_BUDGET)?;
    let mut out = Outcome::default();
    let mut t = Table::new(
        "convergence",
        &["t", "s_t_size", "value", "target", "abs_error", "wall_ms"],
    );
    let mut prev: Option<ExactScalar> = None;
    for r in rows {
        if r.t >= 6.0 {
            if let Some(p) = &prev {
                out.check(r.abs_error <= *p, || {
                    format!(
                        "error increases at t = {}: {} > {}",
                        r.t,
                        r.abs_error.to_decimal_string(17),
                        p.to_decimal_string(17)
                    )
                });
            }
            prev = Some(r.abs_error.clone());
        }
        t.push(vec![
            r.t.into(),
            r.s_t_size.into(),
            exact(r.value),
            exact(r.target),
            exact(r.abs_error),
            Cell::Int(r.wall_ms as i128),
        ]);
    }
    out.tables.push(t);
    Ok(out)
}

// ------------------------------------------------------------ equidist

fn tree_equidist(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let u = cylinders(m, cfg.u.as_deref(), "a")?;
    let up = cylinders(m, cfg.v.as_deref(), "b")?;
    let ts = cfg.t_or(&(1..=12).map(f64::from).collect::<Vec<_>>());
    let mut out = Outcome::default();
    let mut t = Table::new(
        "equidistribution",
        &["t", "s_t_size", "count", "freq", "target", "abs_error", "transfer_count"],
    );
    for &tt in &ts {
        let e = equidistribution_streaming(m, &u, &up, tt)?;
        let transfer = match equidistribution_transfer(m, &u, &up, tt) {
            Ok(x) => {
                out.check(x.count == e.count, || {
                    format!("count at t = {tt}: streaming {} vs transfer {}", e.count, x.count)
                });
                Cell::from(x.count)
            }
            // Words shorter than the set depth are outside the transfer count.
            Err(Error::Domain(_)) => Cell::Text(String::new()),
            Err(err) => return Err(err),
        };
        t.push(vec![
            tt.into(),
            e.s_t_size.into(),
            e.count.into(),
            exact(e.freq),
            exact(e.target),
            exact(e.abs_error),
            transfer,
        ]);
    }
    out.tables.push(t);
    Ok(out)
}

fn plane_equidist(m: &PlaneModel, cfg: &RunConfig) -> Result<Outcome> {
    let u = arcs(cfg.u.as_deref(), "0:0.5")?;
    let up = arcs(cfg.v.as_deref(), "0.25:0.75")?;
    let ts = cfg.t_or(&plane_default_ts(m, 6, 10, m.quotient_radius()));
    let mut out = Outcome::default();
    let mut t = Table::new(
        "equidistribution",
        &["t", "s_t_size", "count", "freq", "target", "abs_error"],
    );
    for &tt in &ts {
        let e = plane_equidistribution(m, &u, &up, tt)?;
        out.check(e.count <= e.s_t_size, || format!("count exceeds |S_t| at t = {tt}"));
        t.push(vec![
            tt.into(),
            e.s_t_size.into(),
            e.count.into(),
            e.freq.into(),
            e.target.into(),
            e.abs_error.into(),
        ]);
    }
    out.tables.push(t);
    Ok(out)
}

// ------------------------------------------------------------ regularity

fn radius_grid() -> Vec<f64> {
    (1..=40).map(|i| (-(i as f64) / 4.0).exp()).collect()
}

fn tree_regularity(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let depth = cfg.depth.unwrap_or(10);
    let r = tree_regularity_exact(m, depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let centers: Vec<BoundaryWord> = (0..200).map(|_| m.sample_boundary(&mut rng)).collect();
    let grid: Vec<f64> = radius_grid()
        .into_iter()
        .filter(|&x| x > (-(depth as f64) * m.edge_f64()).exp())
        .collect();
    let cert = certify_regularity(m, &grid, &centers)?;
    let mut out = Outcome::default();
    out.check(
        r.k.to_f64() <= cert.k + 1e-12 && cert.kprime <= r.kprime.to_f64(),
        || format!("sampled ratios [{}, {}] escape the exact constants", cert.k, cert.kprime),
    );
    let mut t = Table::new(
        "regularity",
        &["depth", "balls", "k", "kprime", "kprime_attained", "sampled_k", "sampled_kprime", "samples"],
    );
    t.push(vec![
        depth.into(),
        r.balls.into(),
        exact(r.k),
        exact(r.kprime),
        r.kprime_attained.into(),
        cert.k.into(),
        cert.kprime.into(),
        cert.samples.into(),
    ]);
    out.tables.push(t);
    Ok(out)
}

fn plane_regularity(m: &PlaneModel, cfg: &RunConfig) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.depth.unwrap_or(1000);
    let centers: Vec<_> = (0..n).map(|_| m.sample_boundary(&mut rng)).collect();
    let grid: Vec<f64> = (1..=20).map(|i| i as f64 / 20.0).collect();
    let cert = certify_regularity(m, &grid, &centers)?;
    let mut out = Outcome::default();
    out.check(cert.k > 0.0 && cert.kprime.is_finite(), || {
        format!("degenerate constants [{}, {}]", cert.k, cert.kprime)
    });
    let mut t = Table::new("regularity", &["eta", "k", "kprime", "samples"]);
    t.push(vec![
        cert.eta.into(),
        cert.k.into(),
        cert.kprime.into(),
        cert.samples.into(),
    ]);
    out.tables.push(t);
    Ok(out)
}

// ------------------------------------------------------------ sampling

const AUDIT_SAMPLES: usize = 500;

fn tree_sampling(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let t_max = cfg.t_max.unwrap_or(8);
    let ts = cfg.t_or(&(1..=t_max.min(6)).map(|x| x as f64).collect::<Vec<_>>());
    let q = tree_words(m, cfg.gamma.as_deref().unwrap_or("ab"))?;
    let eta = m.critical_exponent();
    let l = eta * (2.0 * m.quotient_radius() + 3.0 * m.delta());
    let k = 1.0 / (2.0 * m.rank() as f64);
    let kp = m.branching() as f64 * k;
    let mut out = Outcome::default();
    let mut sets = Table::new(
        "sampling_sets",
        &["t", "directions", "radius", "multiplicity", "min_hits", "max_hits"],
    );
    let mut ints = Table::new("sampled_integrals", &["t", "q", "estimate", "integral", "c_l", "holds"]);
    for &tt in &ts {
        let set = build_sampling_set(m, tt * m.edge_f64())?;
        let audit = audit_sampling_set(m, &set, AUDIT_SAMPLES, cfg.seed)?;
        sets.push(vec![
            tt.into(),
            set.directions.len().into(),
            set.radius.into(),
            set.multiplicity.into(),
            audit.min_hits.into(),
            audit.max_hits.into(),
        ]);
        for g in q.iter().filter(|g| g.len() as f64 <= tt) {
            let f = |b: &BoundaryWord| Ok(lambda_exact(m, g, b)?.to_f64());
            let integral = coefficient_one(m, g)?.to_f64();
            match sampled_integral(m, &f, &set, l, integral, k, kp, AUDIT_SAMPLES, cfg.seed) {
                Ok(r) => ints.push(vec![
                    tt.into(),
                    g.to_string().into(),
                    r.estimate.into(),
                    r.integral.into(),
                    r.c_l.into(),
                    true.into(),
                ]),
                Err(Error::Assertion(w)) => {
                    out.failures.push(w);
                    ints.push(vec![
                        tt.into(),
                        g.to_string().into(),
                        Cell::Text(String::new()),
                        integral.into(),
                        Cell::Text(String::new()),
                        false.into(),
                    ]);
                }
                Err(e) => return Err(e),
            }
        }
    }
    let sweep = tree_sampling_sweep(m, t_max)?;
    out.check(
        1.0 / sweep.c_l <= sweep.min_ratio && sweep.max_ratio <= sweep.c_l,
        || format!("sweep ratios [{}, {}] outside C_L = {}", sweep.min_ratio, sweep.max_ratio, sweep.c_l),
    );
    let mut sw = Table::new("sweep", &["t_max", "cases", "c_l", "min_ratio", "max_ratio"]);
    sw.push(vec![
        t_max.into(),
        sweep.cases.into(),
        sweep.c_l.into(),
        sweep.min_ratio.into(),
        sweep.max_ratio.into(),
    ]);
    out.tables.extend([sets, ints, sw]);
    Ok(out)
}

fn plane_sampling(m: &PlaneModel, cfg: &RunConfig) -> Result<Outcome> {
    let ts = cfg.t_or(&[4.0, 5.0, 6.0]);
    let mut out = Outcome::default();
    let mut sets = Table::new(
        "sampling_sets",
        &["t", "directions", "radius", "multiplicity", "min_hits", "max_hits"],
    );
    for &tt in &ts {
        let set = build_sampling_set(m, tt)?;
        match audit_sampling_set(m, &set, AUDIT_SAMPLES, cfg.seed) {
            Ok(a) => sets.push(vec![
                tt.into(),
                set.directions.len().into(),
                set.radius.into(),
                set.multiplicity.into(),
                a.min_hits.into(),
                a.max_hits.into(),
            ]),
            Err(Error::Assertion(w)) => out.failures.push(w),
            Err(e) => return Err(e),
        }
    }
    out.tables.push(sets);
    Ok(out)
}

// ------------------------------------------------------------ tailbound

fn tailbound(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let qs = tree_words(m, cfg.gamma.as_deref().unwrap_or("ab,aab,aaab,aaaab,abababab"))?;
    let v = cylinders(m, cfg.v.as_deref(), "b")?;
    let scales: Vec<f64> = match cfg.scale.as_deref() {
        Some(s) => parse_scales(s)?
            .into_iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect(),
        None => vec![1.0],
    };
    let mut out = Outcome::default();
    let mut t = Table::new("tail_bounds", &["q", "a", "lhs", "rhs", "c0", "short_branch"]);
    for &a in &scales {
        for q in &qs {
            match tail_bound_check(m, q, &v, a) {
                Ok(r) => t.push(vec![
                    q.to_string().into(),
                    a.into(),
                    exact(r.lhs),
                    r.rhs.into(),
                    r.c0.into(),
                    r.short_branch.into(),
                ]),
                Err(Error::Assertion(w)) => out.failures.push(w),
                Err(e) => return Err(e),
            }
        }
    }
    out.tables.push(t);
    Ok(out)
}

// ------------------------------------------------------------ rank

fn rank(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.depth.unwrap_or(1);
    let l = cfg.t_max.unwrap_or(6);
    let sweep = truncation_rank(m, n, l, DEFAULT_DIMENSION_BUDGET)?;
    let exact_ranks = truncation_rank_exact(m, n, sweep.steps.len().saturating_sub(1))?;
    let mut out = Outcome::default();
    let mut t = Table::new("ranks", &["max_word_length", "operators", "rank", "exact_rank"]);
    for (i, s) in sweep.steps.iter().enumerate() {
        let e = exact_ranks.get(i).copied().unwrap_or(0);
        out.check(s.rank == e, || {
            format!("rank at L = {}: SVD {} vs modular {e}", s.max_word_length, s.rank)
        });
        if i > 0 {
            let p = sweep.steps[i - 1].rank;
            out.check(s.rank >= p, || format!("rank drops at L = {}", s.max_word_length));
        }
        t.push(vec![
            s.max_word_length.into(),
            s.operators.into(),
            s.rank.into(),
            e.into(),
        ]);
    }
    let mut summary = Table::new("summary", &["depth", "dimension", "full_rank_at"]);
    summary.push(vec![
        sweep.depth.into(),
        sweep.dimension.into(),
        sweep
            .full_rank_at
            .map_or(Cell::Text(String::new()), Cell::from),
    ]);
    out.tables.extend([t, summary]);
    Ok(out)
}

// ------------------------------------------------------------ mls

fn marked_table(rows: Vec<boundary_rep::spectra::MarkedLengthRow>) -> Table {
    let mut t = Table::new("marked_lengths", &["word", "length", "exact", "limit_estimate"]);
    for r in rows {
        t.push(vec![
            r.word.into(),
            r.length.into(),
            r.exact.unwrap_or_default().into(),
            r.limit_estimate.into(),
        ]);
    }
    t
}

fn tree_mls(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let words = tree_words(m, cfg.gamma.as_deref().unwrap_or("ab,abA,aab,bAAB,abAB"))?;
    let power = cfg.t_max.unwrap_or(6) as u32;
    let mut out = Outcome::default();
    match tree_marked_lengths(m, &words, power) {
        Ok(table) => out.tables.push(marked_table(table.rows)),
        Err(Error::Assertion(w)) => out.failures.push(w),
        Err(e) => return Err(e),
    }
    Ok(out)
}

fn plane_mls(m: &PlaneModel, cfg: &RunConfig) -> Result<Outcome> {
    let words = match cfg.gamma.as_deref() {
        Some(s) => plane_words(m, s)?,
        // The first few hyperbolic elements of a small annulus.
        None => m
            .annulus(5.0)?
            .into_iter()
            .filter(|e| plane_translation_length(&e.g).is_ok())
            .take(5)
            .map(|e| e.word)
            .collect(),
    };
    let power = cfg.t_max.unwrap_or(6) as u32;
    let mut out = Outcome::default();
    match plane_marked_lengths(m.group(), &words, power) {
        Ok(table) => out.tables.push(marked_table(table.rows)),
        Err(Error::Assertion(w)) => out.failures.push(w),
        Err(e) => return Err(e),
    }
    Ok(out)
}

// ------------------------------------------------------------ rescale-check

fn rescale_check(m: &TreeModel, cfg: &RunConfig) -> Result<Outcome> {
    let scales = parse_scales(cfg.scale.as_deref().unwrap_or("2,3/2"))?;
    let words = match cfg.gamma.as_deref() {
        Some(s) => tree_words(m, s)?,
        None => (1..=3).flat_map(|n| words_of_length(m.rank(), n)).collect(),
    };
    let one = SimpleFunction::one(m.rank());
    let pairs = vec![
        (one.clone(), one),
        (
            SimpleFunction::indicator(&cylinders(m, cfg.u.as_deref(), "a")?),
            SimpleFunction::indicator(&cylinders(m, cfg.v.as_deref(), "b")?),
        ),
    ];
    let mut out = Outcome::default();
    let mut t = Table::new(
        "rescaling",
        &["scale", "lengths_checked", "coefficients_checked", "lengths_scaled", "coefficients_equal"],
    );
    for c in scales {
        let r = rescaling_invariance_check(m, c, &words, &pairs)?;
        out.check(r.lengths_scaled && r.coefficients_equal, || {
            format!("rescaling by {c} changes lengths or coefficients")
        });
        t.push(vec![
            r.scale.into(),
            r.lengths_checked.into(),
            r.coefficients_checked.into(),
            r.lengths_scaled.into(),
            r.coefficients_equal.into(),
        ]);
    }
    out.tables.push(t);
    Ok(out)
}

// ------------------------------------------------------------ growth

fn growth(model: &Model, cfg: &RunConfig) -> Result<Outcome> {
    let range = |a: u32, b: u32| (a..=b).map(f64::from).collect::<Vec<_>>();
    let (fit, eta) = match model {
        Model::Tree(m) => {
            let ts = cfg.t_or(&range(8, 14));
            (growth_exponent(&ts, |t| Ok(tree_ball_count(m, t)))?, m.critical_exponent())
        }
        Model::Plane(m) => {
            let ts = cfg.t_or(&plane_default_ts(m, 8, 12, 0.0));
            (growth_exponent(&ts, |t| m.ball_count(t))?, m.critical_exponent())
        }
    };
    let mut out = Outcome::default();
    out.check((fit.eta_hat / eta - 1.0).abs() <= 0.1, || {
        format!("fitted exponent {} vs η = {eta}", fit.eta_hat)
    });
    let mut pts = Table::new("ball_counts", &["t", "count"]);
    for &(t, c) in &fit.points {
        pts.push(vec![t.into(), c.into()]);
    }
    let mut f = Table::new("fit", &["eta_hat", "eta", "residual"]);
    f.push(vec![fit.eta_hat.into(), eta.into(), fit.residual.into()]);
    out.tables.extend([pts, f]);
    Ok(out)
}

// ------------------------------------------------------------ margulis-fit

fn margulis(m: &PlaneModel, cfg: &RunConfig) -> Result<Outcome> {
    let u = arcs(cfg.u.as_deref(), "0.1:0.6")?;
    let up = arcs(cfg.v.as_deref(), "0.3:0.55")?;
    let a = match cfg.scale.as_deref() {
        Some(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("--scale must be a number here, got '{s}'")))?,
        None => 1.0,
    };
    let ts = cfg.t_or(&plane_default_ts(m, 9, 11, a));
    let fit = margulis_fit(m, &u, &up, a, &ts)?;
    let mut out = Outcome::default();
    out.check(fit.relative_residual <= 0.15, || {
        format!("Ĉ(t) varies by {} relative to Ĉ = {}", fit.relative_residual, fit.c_hat)
    });
    let mut pts = Table::new("windows", &["t", "count", "c_t"]);
    for p in &fit.points {
        pts.push(vec![p.t.into(), p.count.into(), p.c_t.into()]);
    }
    let mut f = Table::new("fit", &["c_hat", "relative_trend", "relative_residual"]);
    f.push(vec![
        fit.c_hat.into(),
        fit.relative_trend.into(),
        fit.relative_residual.into(),
    ]);
    out.tables.extend([pts, f]);
    Ok(out)
}

// ------------------------------------------------------------ selftest

fn selftest(cfg: &RunConfig) -> Result<Outcome> {
    let acfg = AcceptanceConfig {
        seed: cfg.seed,
        ..AcceptanceConfig::default()
    };
    let outcomes = run_all(&acfg);
    for o in &outcomes {
        eprintln!("criterion {:>2} took {:.1} s", o.id, o.wall.as_secs_f64());
    }
    let mut out = Outcome::default();
    let mut t = Table::new("acceptance", &["criterion", "title", "pass", "summary"]);
    for o in &outcomes {
        out.check(o.pass, || o.line());
        t.push(vec![
            Cell::Int(o.id as i128),
            o.title.into(),
            o.pass.into(),
            o.summary.clone().into(),
        ]);
    }
    out.tables.push(t);
    Ok(out)
}
