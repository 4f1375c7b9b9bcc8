//! Cocompact Fuchsian groups given by explicit generators.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mobius::{disk_distance, MobiusIsometry};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    Genus2Octagon,
    Triangle237,
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "genus2" | "genus2-octagon" => Ok(Preset::Genus2Octagon),
            "triangle237" | "triangle-2-3-7" => Ok(Preset::Triangle237),
            _ => Err(Error::Parse(format!(
                "unknown group preset '{s}' (genus2, triangle237)"
            ))),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Preset::Genus2Octagon => "genus2-octagon",
            Preset::Triangle237 => "triangle-2-3-7",
        })
    }
}

/// A generating set closed under inverses, together with a fundamental
/// polygon around the origin whose side pairings are among the generators.
#[derive(Clone, Debug)]
pub struct FuchsianGroup {
    pub preset: Preset,
    pub generators: Vec<MobiusIsometry>,
    pub labels: Vec<String>,
    /// Largest distance from the origin to a vertex of the fundamental polygon.
    pub circumradius: f64,
}

impl FuchsianGroup {
    pub fn build(preset: Preset) -> Self {
        match preset {
            Preset::Genus2Octagon => genus2(),
            Preset::Triangle237 => triangle237(),
        }
    }

    /// Product of the generators indexed by `word` (identity for the empty word).
    pub fn evaluate(&self, word: &[u8]) -> MobiusIsometry {
        word.iter().fold(MobiusIsometry::IDENTITY, |acc, &g| {
            acc * self.generators[g as usize]
        })
    }

    pub fn format_word(&self, word: &[u8]) -> String {
        if word.is_empty() {
            return "e".into();
        }
        word.iter()
            .map(|&g| self.labels[g as usize].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_word(&self, s: &str) -> Result<Vec<u8>> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(Vec::new());
        }
        s.split(|c: char| c.is_whitespace() || c == '.' || c == '*')
            .filter(|t| !t.is_empty())
            .map(|tok| {
                self.labels
                    .iter()
                    .position(|l| l == tok)
                    .map(|i| i as u8)
                    .ok_or_else(|| {
                        Error::Parse(format!(
                            "unknown generator '{tok}' (have {})",
                            self.labels.join(", ")
                        ))
                    })
            })
            .collect()
    }

    /// Index of the inverse of generator `g`.
    pub fn inverse_index(&self, g: u8) -> u8 {
        let inv = self.generators[g as usize].inverse();
        (0..self.generators.len())
            .min_by(|&a, &b| {
                self.generators[a]
                    .distance_to(&inv)
                    .total_cmp(&self.generators[b].distance_to(&inv))
            })
            .unwrap() as u8
    }

    /// Genus 2: the smallest residual `‖[x₁,y₁][x₂,y₂] ∓ I‖` over all
    /// assignments of the four side pairings (and their inverses) to the
    /// commutator slots. Triangle group: the largest residual of the
    /// defining torsion relations.
    pub fn relation_residual(&self) -> f64 {
        match self.preset {
            Preset::Genus2Octagon => {
                let g = &self.generators[..4];
                let mut best = f64::INFINITY;
                for perm in permutations4() {
                    for signs in 0..16u32 {
                        let pick = |slot: usize| {
                            let m = g[perm[slot]];
                            if signs >> slot & 1 == 1 {
                                m.inverse()
                            } else {
                                m
                            }
                        };
                        let (x1, y1, x2, y2) = (pick(0), pick(1), pick(2), pick(3));
                        let prod = x1
                            * y1
                            * x1.inverse()
                            * y1.inverse()
                            * x2
                            * y2
                            * x2.inverse()
                            * y2.inverse();
                        best = best.min(prod.distance_to(&MobiusIsometry::IDENTITY));
                    }
                }
                best
            }
            Preset::Triangle237 => {
                let orders = [(0usize, 2u32), (1, 3), (2, 7)];
                let torsion = orders
                    .iter()
                    .map(|&(i, n)| {
                        self.generators[i]
                            .pow(n)
                            .distance_to(&MobiusIsometry::IDENTITY)
                    })
                    .fold(0.0, f64::max);
                // z·y·x = 1 ties the three rotations together.
                let product = (self.generators[0] * self.generators[1] * self.generators[2])
                    .distance_to(&MobiusIsometry::IDENTITY);
                torsion.max(product)
            }
        }
    }

    /// Largest `|det − 1|` over the generators.
    pub fn det_residual(&self) -> f64 {
        self.generators
            .iter()
            .map(|g| (g.det() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| p.contains(&i)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Regular octagon with interior angles `π/4` centred at the origin; side
/// `i` faces angle `iπ/4` and is paired with side `i+2` for `i ∈ {0,1,4,5}`.
fn genus2() -> FuchsianGroup {
    let inradius = (1.0 + 2f64.sqrt()).acosh();
    let circumradius = ((1.0 + 2f64.sqrt()).powi(2)).acosh();
    let side = |i: usize| i as f64 * PI / 4.0;
    let mut generators = Vec::new();
    for &i in &[0usize, 1, 4, 5] {
        let g = MobiusIsometry::rotation(side(i + 2))
            * MobiusIsometry::translation(2.0 * inradius)
            * MobiusIsometry::rotation(PI - side(i));
        generators.push(g);
    }
    let inverses: Vec<_> = generators.iter().map(|g| g.inverse()).collect();
    generators.extend(inverses);
    let labels = ["a1", "b1", "a2", "b2", "A1", "B1", "A2", "B2"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    FuchsianGroup {
        preset: Preset::Genus2Octagon,
        generators,
        labels,
        circumradius,
    }
}

fn poincare_to_klein(z: Complex64) -> Complex64 {
    z * (2.0 / (1.0 + z.norm_sqr()))
}

fn klein_to_poincare(k: Complex64) -> Complex64 {
    k / (1.0 + (1.0 - k.norm_sqr()).sqrt())
}

/// The orientation-preserving (2,3,7) triangle group. The triangle has its
/// `π/7` vertex `A` at the origin, its `π/3` vertex `B` on the positive
/// axis and its right angle at `C`; the fundamental domain is the kite
/// `A C B C′`. Everything is conjugated so that the Klein centroid of the
/// triangle, a point with trivial stabiliser, becomes the origin.
fn triangle237() -> FuchsianGroup {
    let (pa, pb) = (PI / 7.0, PI / 3.0);
    let hyp = (1.0 / (pa.tan() * pb.tan())).acosh();
    let leg = (pb.cos() / pa.sin()).acosh();
    let a = Complex64::new(0.0, 0.0);
    let b = Complex64::new((hyp / 2.0).tanh(), 0.0);
    let c = Complex64::from_polar((leg / 2.0).tanh(), pa);
    let c2 = c.conj();
    let x = MobiusIsometry::rotation(2.0 * pa);
    let rot_b = |theta: f64| MobiusIsometry::rotation_about(b, theta);
    // Choose the orientation of the order-3 rotation that makes x·y an involution.
    let y = [rot_b(2.0 * pb), rot_b(-2.0 * pb)]
        .into_iter()
        .min_by(|u, v| (x * *u).trace().abs().total_cmp(&(x * *v).trace().abs()))
        .unwrap();
    // z·y·x = 1.
    let z = (y * x).inverse();
    let centroid = klein_to_poincare(
        (poincare_to_klein(a) + poincare_to_klein(b) + poincare_to_klein(c)) / 3.0,
    );
    let to = MobiusIsometry::moving_to_origin(centroid);
    let conj = |g: MobiusIsometry| to * g * to.inverse();
    let circumradius = [a, b, c, c2]
        .iter()
        .map(|v| disk_distance(centroid, *v))
        .fold(0.0, f64::max);
    let base = [conj(z), conj(y), conj(x)];
    let mut generators = base.to_vec();
    generators.extend(base.iter().map(|g| g.inverse()));
    let labels = ["z", "y", "x", "Z", "Y", "X"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    FuchsianGroup {
        preset: Preset::Triangle237,
        generators,
        labels,
        circumradius,
    }
}
