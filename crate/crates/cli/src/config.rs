//! Model spec strings, `t` lists and the run configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use boundary_rep::output::Format;
use boundary_rep::plane::{PlaneModel, Preset};
use boundary_rep::tree::{EdgeLength, TreeModel};
use boundary_rep::{Error, Result};
use num_rational::Ratio;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelSpec {
    Free { rank: u8, edge: EdgeLength },
    Plane(Preset),
}

pub enum Model {
    Tree(TreeModel),
    Plane(PlaneModel),
}

impl ModelSpec {
    pub fn build(&self) -> Result<Model> {
        match *self {
            ModelSpec::Free { rank, edge } => Ok(Model::Tree(TreeModel::new(rank, edge)?)),
            ModelSpec::Plane(p) => Ok(Model::Plane(PlaneModel::new(p))),
        }
    }
}

fn parse_ratio(s: &str) -> Result<EdgeLength> {
    let bad = || Error::Parse(format!("'{s}' is not a positive rational"));
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let (n, d): (i64, i64) = (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
            if d == 0 {
                return Err(bad());
            }
            Ratio::new(n, d)
        }
        None => Ratio::from_integer(s.trim().parse().map_err(|_| bad())?),
    };
    if r <= Ratio::from_integer(0) {
        return Err(bad());
    }
    Ok(r)
}

impl FromStr for ModelSpec {
    type Err = Error;

    /// `free[:rank=K][,edge=P/Q]`, `plane:genus2` or `plane:triangle237`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind.trim() {
            "free" => {
                let (mut rank, mut edge) = (2u8, Ratio::from_integer(1));
                for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| Error::Parse(format!("expected key=value, got '{kv}'")))?;
                    match k.trim() {
                        "rank" => {
                            rank = v.trim().parse().map_err(|_| {
                                Error::Parse(format!("rank must be an integer, got '{v}'"))
                            })?
                        }
                        "edge" => edge = parse_ratio(v)?,
                        other => {
                            return Err(Error::Parse(format!(
                                "unknown free-model key '{other}' (rank, edge)"
                            )))
                        }
                    }
                }
                // Validate now so that configuration errors surface early.
                TreeModel::new(rank, edge)?;
                Ok(ModelSpec::Free { rank, edge })
            }
            "plane" => Ok(ModelSpec::Plane(rest.trim().parse()?)),
            other => Err(Error::Parse(format!(
                "unknown model '{other}' (free:rank=2,edge=1 | plane:genus2 | plane:triangle237)"
            ))),
        }
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelSpec::Free { rank, edge } => write!(f, "free:rank={rank},edge={edge}"),
            ModelSpec::Plane(Preset::Genus2Octagon) => f.write_str("plane:genus2"),
            ModelSpec::Plane(Preset::Triangle237) => f.write_str("plane:triangle237"),
        }
    }
}

/// A list of radii: comma-separated numbers and inclusive integer-step
/// ranges, e.g. `2..12` or `1,2,4..6`.
#[derive(Clone, Debug, PartialEq)]
pub struct TList(pub Vec<f64>);

impl FromStr for TList {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let num = |x: &str| -> Result<f64> {
            let v: f64 = x
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("'{x}' is not a number")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parse(format!("t values must be positive, got {x}")));
            }
            Ok(v)
        };
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part.split_once("..") {
                Some((a, b)) => {
                    let b = b.strip_prefix('=').unwrap_or(b);
                    let (a, b) = (num(a)?, num(b)?);
                    if b < a {
                        return Err(Error::Parse(format!("empty range {part}")));
                    }
                    let mut x = a;
                    while x <= b + 1e-9 {
                        out.push(x);
                        x += 1.0;
                    }
                }
                None => out.push(num(part)?),
            }
        }
        if out.is_empty() {
            return Err(Error::Parse("empty t list".into()));
        }
        if out.windows(2).any(|p| p[1] <= p[0]) {
            return Err(Error::Parse(format!("t values must increase: {s}")));
        }
        Ok(TList(out))
    }
}

impl fmt::Display for TList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| boundary_rep::output::format_f64(*x)).collect();
        f.write_str(&parts.join(","))
    }
}

/// Everything an experiment needs. Fields left `None` fall back to
/// per-experiment defaults.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub t: Option<TList>,
    pub t_max: Option<usize>,
    pub depth: Option<usize>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub u: Option<String>,
    pub v: Option<String>,
    pub w: Option<String>,
    pub gamma: Option<String>,
    pub scale: Option<String>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("t-max", self.t_max), ("depth", self.depth), ("threads", self.threads)] {
            if v == Some(0) {
                return Err(Error::Parse(format!("--{name} must be positive")));
            }
        }
        Ok(())
    }

    /// The reproducibility header. The worker count is left out on purpose:
    /// output must not depend on it.
    pub fn header(&self, command: &str) -> Vec<(String, String)> {
        let mut h = vec![
            ("command".to_string(), command.to_string()),
            ("model".into(), self.model.to_string()),
        ];
        let opt = |k: &str, v: Option<String>, h: &mut Vec<(String, String)>| {
            if let Some(v) = v {
                h.push((k.to_string(), v));
            }
        };
        opt("t", self.t.as_ref().map(|t| t.to_string()), &mut h);
        opt("t_max", self.t_max.map(|x| x.to_string()), &mut h);
        opt("depth", self.depth.map(|x| x.to_string()), &mut h);
        opt("U", self.u.clone(), &mut h);
        opt("V", self.v.clone(), &mut h);
        opt("W", self.w.clone(), &mut h);
        opt("gamma", self.gamma.clone(), &mut h);
        opt("scale", self.scale.clone(), &mut h);
        h.push(("seed".into(), self.seed.to_string()));
        h.push(("version".into(), env!("CARGO_PKG_VERSION").into()));
        h
    }

    pub fn t_or(&self, default: &[f64]) -> Vec<f64> {
        self.t.as_ref().map_or_else(|| default.to_vec(), |t| t.0.clone())
    }
}

pub fn parse_scales(s: &str) -> Result<Vec<EdgeLength>> {
    s.split(',').map(str::trim).filter(|p| !p.is_empty()).map(parse_ratio).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_specs_round_trip() {
        for s in ["free:rank=2,edge=1", "free:rank=3,edge=3/2", "plane:genus2", "plane:triangle237"] {
            let m: ModelSpec = s.parse().unwrap();
            assert_eq!(m.to_string(), s);
            assert_eq!(m.to_string().parse::<ModelSpec>().unwrap(), m);
        }
        let short: ModelSpec = "free:rank=2".parse().unwrap();
        assert_eq!(short.to_string(), "free:rank=2,edge=1");
        assert_eq!("plane:genus2-octagon".parse::<ModelSpec>().unwrap().to_string(), "plane:genus2");
        for bad in ["free:rank=1", "free:edge=0", "free:edge=-1/2", "free:depth=3", "plane:torus", "cube"] {
            assert!(bad.parse::<ModelSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn t_lists() {
        assert_eq!("2..5".parse::<TList>().unwrap().0, vec![2.0, 3.0, 4.0, 5.0]);
        assert_eq!("1,2.5,4..=5".parse::<TList>().unwrap().0, vec![1.0, 2.5, 4.0, 5.0]);
        assert_eq!("1,2.5,4..5".parse::<TList>().unwrap().to_string(), "1,2.5,4,5");
        for bad in ["", "3,2", "0", "a", "5..2", "-1..3"] {
            assert!(bad.parse::<TList>().is_err(), "{bad}");
        }
    }
}
