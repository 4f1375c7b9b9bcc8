//! Orbit points `γ·0` of a Fuchsian group, enumerated by breadth-first
//! search over words and deduplicated by proximity.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::group::{FuchsianGroup, Preset};
use super::mobius::MobiusIsometry;
use crate::error::{domain, Error, Result};

const CACHE_VERSION: u32 = 1;

/// Environment variable naming the directory for persisted caches.
pub const CACHE_DIR_ENV: &str = "BOUNDARY_REP_CACHE_DIR";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitElement {
    pub word: Vec<u8>,
    pub g: MobiusIsometry,
    pub dist: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitCache {
    pub version: u32,
    pub preset: Preset,
    /// Every `γ` with `d(0, γ·0) ≤ radius` is present.
    pub radius: f64,
    /// Two words whose orbit points are closer than this are the same element.
    pub dedup_threshold: f64,
    /// Smallest nonzero `d(0, γ·0)` seen, a lower bound for all pairwise
    /// separations.
    pub min_separation: f64,
    /// Largest distance between two words merged as duplicates.
    pub max_merge_distance: f64,
    /// Deepest BFS level that produced a new point inside `radius`, and the
    /// number of levels searched.
    pub last_productive_depth: usize,
    pub depth_searched: usize,
    /// Sorted by distance.
    pub elements: Vec<OrbitElement>,
}

struct Node {
    g: MobiusIsometry,
    dist: f64,
    parent: u32,
    gen: u8,
}

fn cell(g: &MobiusIsometry) -> (i64, i64) {
    let (x, y) = g.hyperboloid_xy();
    (x.floor() as i64, y.floor() as i64)
}

impl OrbitCache {
    /// Breadth-first search over right multiplications by generators,
    /// pruned at `radius + circumradius`: the tiles met by the geodesic from
    /// `0` to `γ·0` give a generator path whose orbit points all stay within
    /// that distance.
    pub fn build(group: &FuchsianGroup, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= 16.0) {
            return domain(format!(
                "orbit cache radius must lie in (0, 16], got {radius}"
            ));
        }
        let prune = radius + group.circumradius;
        // Shortest displacement among short words: an estimate of the systole.
        let mut systole = f64::INFINITY;
        let n = group.generators.len() as u8;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for w in [vec![a], vec![a, b], vec![a, b, c]] {
                        let d = group.evaluate(&w).displacement();
                        if d > 1e-6 {
                            systole = systole.min(d);
                        }
                    }
                }
            }
        }
        let threshold = systole / 2.0;
        let mut nodes = vec![Node {
            g: MobiusIsometry::IDENTITY,
            dist: 0.0,
            parent: u32::MAX,
            gen: 0,
        }];
        let mut index: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        index
            .entry(cell(&MobiusIsometry::IDENTITY))
            .or_default()
            .push(0);
        let mut frontier: Vec<u32> = vec![0];
        let mut max_merge = 0.0f64;
        let mut depth = 0;
        let mut last_productive = 0;
        while !frontier.is_empty() {
            depth += 1;
            let candidates: Vec<(u32, u8, MobiusIsometry, f64)> = frontier
                .par_iter()
                .flat_map_iter(|&i| {
                    let base = nodes[i as usize].g;
                    group
                        .generators
                        .iter()
                        .enumerate()
                        .filter_map(move |(k, h)| {
                            let g = base * *h;
                            let d = g.displacement();
                            (d <= prune).then_some((i, k as u8, g, d))
                        })
                })
                .collect();
            let mut next = Vec::new();
            for (parent, gen, g, dist) in candidates {
                let (cx, cy) = cell(&g);
                let ginv = g.inverse();
                let mut duplicate = false;
                'search: for dx in -1..=1 {
                    for dy in -1..=1 {
                        if let Some(list) = index.get(&(cx + dx, cy + dy)) {
                            for &j in list {
                                let sep = (ginv * nodes[j as usize].g).displacement();
                                if sep < threshold {
                                    max_merge = max_merge.max(sep);
                                    duplicate = true;
                                    break 'search;
                                }
                            }
                        }
                    }
                }
                if duplicate {
                    continue;
                }
                let id = nodes.len() as u32;
                nodes.push(Node {
                    g,
                    dist,
                    parent,
                    gen,
                });
                index.entry((cx, cy)).or_default().push(id);
                next.push(id);
                if dist <= radius {
                    last_productive = depth;
                }
            }
            frontier = next;
        }
        let word_of = |mut i: u32| {
            let mut w = Vec::new();
            while nodes[i as usize].parent != u32::MAX {
                w.push(nodes[i as usize].gen);
                i = nodes[i as usize].parent;
            }
            w.reverse();
            w
        };
        let mut elements: Vec<OrbitElement> = (0..nodes.len() as u32)
            .filter(|&i| nodes[i as usize].dist <= radius)
            .map(|i| OrbitElement {
                word: word_of(i),
                g: nodes[i as usize].g,
                dist: nodes[i as usize].dist,
            })
            .collect();
        elements.sort_by(|a, b| a.dist.total_cmp(&b.dist).then_with(|| a.word.cmp(&b.word)));
        let min_separation = elements
            .iter()
            .map(|e| e.dist)
            .filter(|&d| d > threshold)
            .fold(f64::INFINITY, f64::min);
        if min_separation < 2.0 * threshold * (1.0 - 1e-9) {
            return Err(Error::Assertion(format!(
                "orbit separation {min_separation} is below twice the dedup threshold {threshold}"
            )));
        }
        Ok(Self {
            version: CACHE_VERSION,
            preset: group.preset,
            radius,
            dedup_threshold: threshold,
            min_separation,
            max_merge_distance: max_merge,
            last_productive_depth: last_productive,
            depth_searched: depth,
            elements,
        })
    }

    pub fn require(&self, r: f64) -> Result<()> {
        if r > self.radius {
            return Err(Error::CacheExhausted {
                covered: self.radius,
                required: r,
            });
        }
        Ok(())
    }

    /// Elements with `lo < d(0, γ·0) < hi`.
    pub fn window(&self, lo: f64, hi: f64) -> Result<&[OrbitElement]> {
        self.require(hi)?;
        let start = self.elements.partition_point(|e| e.dist <= lo);
        let end = self.elements.partition_point(|e| e.dist < hi);
        Ok(&self.elements[start..end.max(start)])
    }

    /// `#{γ : d(0, γ·0) ≤ r}`.
    pub fn ball_count(&self, r: f64) -> Result<usize> {
        self.require(r)?;
        Ok(self.elements.partition_point(|e| e.dist <= r))
    }

    /// `#{γ : d(0, γ·0) < r}`.
    pub fn open_ball_count(&self, r: f64) -> Result<usize> {
        self.require(r)?;
        Ok(self.elements.partition_point(|e| e.dist < r))
    }

    /// File name for the given parameters.
    pub fn cache_key(preset: Preset, radius: f64) -> String {
        let mut h = Sha256::new();
        h.update(format!("v{CACHE_VERSION}|{preset}|{radius:?}").as_bytes());
        let digest = h.finalize();
        let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
        format!("orbit-{preset}-{hex}.json")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_vec(self).map_err(|e| Error::Io(e.to_string()))?;
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, json)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Loads a persisted cache, accepting it only if its parameters match.
    pub fn load(path: &Path, preset: Preset, radius: f64) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let cache: Self = serde_json::from_slice(&bytes).map_err(|e| Error::Io(e.to_string()))?;
        if cache.version != CACHE_VERSION || cache.preset != preset || cache.radius != radius {
            return Err(Error::Io(format!(
                "cache file {} has mismatched parameters",
                path.display()
            )));
        }
        Ok(cache)
    }

    /// Loads from `dir` if a matching file exists, otherwise builds and
    /// writes it there.
    pub fn load_or_build(group: &FuchsianGroup, radius: f64, dir: Option<&Path>) -> Result<Self> {
        if let Some(dir) = dir {
            let path = dir.join(Self::cache_key(group.preset, radius));
            if path.exists() {
                if let Ok(c) = Self::load(&path, group.preset, radius) {
                    return Ok(c);
                }
            }
            let c = Self::build(group, radius)?;
            std::fs::create_dir_all(dir)?;
            c.save(&path)?;
            return Ok(c);
        }
        Self::build(group, radius)
    }
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from)
}

type Registry = Mutex<HashMap<(Preset, u64), Arc<OnceLock<Result<Arc<OrbitCache>>>>>>;

/// Process-wide shared caches, one per `(preset, radius)`, persisted under
/// `$BOUNDARY_REP_CACHE_DIR` when that is set.
pub fn shared_cache(group: &FuchsianGroup, radius: f64) -> Result<Arc<OrbitCache>> {
    static REGISTRY: OnceLock<Registry> = OnceLock::new();
    let slot = {
        let mut reg = REGISTRY.get_or_init(Default::default).lock().unwrap();
        reg.entry((group.preset, radius.to_bits()))
            .or_default()
            .clone()
    };
    slot.get_or_init(|| {
        OrbitCache::load_or_build(group, radius, cache_dir().as_deref()).map(Arc::new)
    })
    .clone()
}
