//! Finite unions of half-open arcs `[start, end)` of the circle, measured in
//! turns (one turn is `2π`).

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArcSet {
    /// Disjoint, sorted, non-adjacent intervals inside `[0, 1]`.
    arcs: Vec<(f64, f64)>,
}

impl ArcSet {
    pub fn empty() -> Self {
        Self { arcs: Vec::new() }
    }

    pub fn whole() -> Self {
        Self {
            arcs: vec![(0.0, 1.0)],
        }
    }

    /// The arc from `start` to `end` turns, counter-clockwise; it wraps
    /// through `0` when `end < start`. Lengths of a full turn or more give
    /// the whole circle.
    pub fn arc(start: f64, end: f64) -> Result<Self> {
        if !start.is_finite() || !end.is_finite() {
            return Err(Error::Parse("arc endpoints must be finite".into()));
        }
        let len = if end >= start {
            end - start
        } else {
            end - start + 1.0
        };
        if len >= 1.0 {
            return Ok(Self::whole());
        }
        let s = start.rem_euclid(1.0);
        let e = s + len;
        let pieces = if e <= 1.0 {
            vec![(s, e)]
        } else {
            vec![(s, 1.0), (0.0, e - 1.0)]
        };
        Ok(Self::normalize(pieces))
    }

    fn normalize(mut v: Vec<(f64, f64)>) -> Self {
        v.retain(|&(s, e)| e > s);
        v.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (s, e) in v {
            match out.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(e),
                _ => out.push((s, e)),
            }
        }
        Self { arcs: out }
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    /// Normalized angle measure.
    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|(s, e)| e - s).sum()
    }

    pub fn contains_turns(&self, x: f64) -> bool {
        let x = x.rem_euclid(1.0);
        self.arcs.iter().any(|&(s, e)| s <= x && x < e)
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        self.contains_turns(theta / (2.0 * PI))
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::normalize(self.arcs.iter().chain(&other.arcs).copied().collect())
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cur = 0.0;
        for &(s, e) in &self.arcs {
            out.push((cur, s));
            cur = e;
        }
        out.push((cur, 1.0));
        Self::normalize(out)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.complement().union(&other.complement()).complement()
    }

    /// `{b : σ(b, U) < e^{−a}}`: every arc widened by the angle `2·arcsin(e^{−a})`
    /// on each side.
    pub fn thicken(&self, a: f64) -> Self {
        let r = (-a).exp();
        if r >= 1.0 {
            return if self.is_empty() {
                Self::empty()
            } else {
                Self::whole()
            };
        }
        let w = 2.0 * r.asin() / (2.0 * PI);
        self.arcs
            .iter()
            .map(|&(s, e)| Self::arc(s - w, e + w).expect("finite"))
            .fold(Self::empty(), |acc, x| acc.union(&x))
    }

    /// Angles (radians) of all arc endpoints, for quadrature breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.arcs
            .iter()
            .flat_map(|&(s, e)| [s * 2.0 * PI, e * 2.0 * PI])
            .collect()
    }

    /// The first half (by measure) of every arc.
    pub fn halve(&self) -> Self {
        Self::normalize(
            self.arcs
                .iter()
                .map(|&(s, e)| (s, s + 0.5 * (e - s)))
                .collect(),
        )
    }
}

impl fmt::Display for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arcs.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self
            .arcs
            .iter()
            .map(|(s, e)| format!("[{s},{e})"))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Parses `"0:0.25,0.5:0.6"` (arcs in turns, `start:end`), `"!…"` for the
/// complement, `"*"`/`"all"` for the whole circle and `"-"`/`"none"` for
/// the empty set.
pub fn parse_arc_set(s: &str) -> Result<ArcSet> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('!') {
        return Ok(parse_arc_set(rest)?.complement());
    }
    match s {
        "*" | "all" | "B" => return Ok(ArcSet::whole()),
        "" | "-" | "none" => return Ok(ArcSet::empty()),
        _ => {}
    }
    let mut out = ArcSet::empty();
    for part in s.split(',') {
        let (a, b) = part.split_once(':').ok_or_else(|| {
            Error::Parse(format!("arc '{part}' must look like start:end (turns)"))
        })?;
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number '{x}' in arc '{part}'")))
        };
        out = out.union(&ArcSet::arc(parse(a)?, parse(b)?)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arcs_and_algebra() {
        let u = parse_arc_set("0:0.25").unwrap();
        assert_eq!(u.measure(), 0.25);
        assert!(u.contains_turns(0.0) && !u.contains_turns(0.25));
        let wrap = parse_arc_set("0.9:0.1").unwrap();
        assert!((wrap.measure() - 0.2).abs() < 1e-15);
        assert!(
            wrap.contains_turns(0.95) && wrap.contains_turns(0.05) && !wrap.contains_turns(0.5)
        );
        let c = parse_arc_set("!0:0.25").unwrap();
        assert_eq!(c.measure(), 0.75);
        assert!(u.intersection(&c).is_empty());
        assert_eq!(u.union(&c), ArcSet::whole());
        assert!((u.intersection(&wrap).measure() - 0.1).abs() < 1e-15);
        assert_eq!(parse_arc_set("*").unwrap().measure(), 1.0);
        assert!(parse_arc_set("none").unwrap().is_empty());
        assert!(parse_arc_set("0.2").is_err());
        assert_eq!(u.halve().measure(), 0.125);
    }

    #[test]
    fn thicken_contains_and_shrinks() {
        let u = parse_arc_set("0.1:0.2").unwrap();
        let mut prev = ArcSet::whole();
        for a in [0.0, 0.5, 1.0, 2.0, 4.0] {
            let t = u.thicken(a);
            assert!(t.intersection(&u) == u);
            assert!(t.intersection(&prev) == t);
            prev = t;
        }
        let w = 2.0 * (-1.0f64).exp().asin() / (2.0 * PI);
        assert!((u.thicken(1.0).measure() - (0.1 + 2.0 * w)).abs() < 1e-14);
    }
}
