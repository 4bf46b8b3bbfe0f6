//! Seeded random graphs and natural frequencies.
//!
//! All draws use `ChaCha8Rng` (from `rand_chacha`) seeded with
//! `seed_from_u64`, so a `(spec, seed)` pair reproduces the same bits on
//! every platform. Independent streams for sweeps come from
//! [`derive_seed`].

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{NodeVector, WeightedGraph};

pub const MAX_DRAWS: usize = 10_000;

/// SplitMix64 finalizer applied to `master + stream * φ64`.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphModel {
    /// Erdős–Rényi, each edge present with probability `p`.
    Er,
    /// Random geometric graph in the unit square with radius `p`.
    Rgg,
    /// Watts–Strogatz ring with rewiring probability `p`.
    Ws,
}

impl std::str::FromStr for GraphModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(GraphModel::Er),
            "rgg" => Ok(GraphModel::Rgg),
            "ws" => Ok(GraphModel::Ws),
            _ => Err(Error::InvalidSpec(format!("unknown graph model '{s}'"))),
        }
    }
}

impl std::fmt::Display for GraphModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GraphModel::Er => "er",
            GraphModel::Rgg => "rgg",
            GraphModel::Ws => "ws",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightDist {
    Unit,
    /// Uniform on `(0, w_max]`.
    Uniform { w_max: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model: GraphModel,
    pub n: usize,
    pub p: f64,
    pub weight_dist: WeightDist,
    pub seed: u64,
    /// Ring neighbors on each side for Watts–Strogatz.
    pub ws_neighbors: usize,
}

impl ModelSpec {
    pub fn new(model: GraphModel, n: usize, p: f64, seed: u64) -> Self {
        ModelSpec { model, n, p, weight_dist: WeightDist::Unit, seed, ws_neighbors: 2 }
    }

    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSpec(format!("n = {} < 2", self.n)));
        }
        // p = 1 gives the complete graph for ER; RGG radii may exceed 1
        let p_ok = match self.model {
            GraphModel::Rgg => self.p > 0.0,
            _ => self.p >= 0.0 && self.p <= 1.0,
        };
        if !p_ok {
            return Err(Error::InvalidSpec(format!("p = {} out of range for {}", self.p, self.model)));
        }
        if self.model == GraphModel::Ws && (self.ws_neighbors == 0 || 2 * self.ws_neighbors >= self.n) {
            return Err(Error::InvalidSpec(format!(
                "ring with {} neighbors per side needs n > {}",
                self.ws_neighbors,
                2 * self.ws_neighbors
            )));
        }
        if let WeightDist::Uniform { w_max } = self.weight_dist {
            if !(w_max > 0.0) {
                return Err(Error::InvalidSpec(format!("w_max = {w_max}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrequencyDist {
    /// Uniform on the open interval `(-a, a)`.
    Uniform { a: f64 },
    /// `±1` with equal probability.
    Bipolar,
}

impl std::str::FromStr for FrequencyDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bipolar" => Ok(FrequencyDist::Bipolar),
            "uniform" => Ok(FrequencyDist::Uniform { a: 1.0 }),
            other => other
                .strip_prefix("uniform:")
                .and_then(|a| a.parse::<f64>().ok())
                .filter(|a| *a > 0.0)
                .map(|a| FrequencyDist::Uniform { a })
                .ok_or_else(|| Error::InvalidSpec(format!("unknown frequency distribution '{s}'"))),
        }
    }
}

impl std::fmt::Display for FrequencyDist {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FrequencyDist::Bipolar => f.write_str("bipolar"),
            FrequencyDist::Uniform { a } if *a == 1.0 => f.write_str("uniform"),
            FrequencyDist::Uniform { a } => write!(f, "uniform:{a}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencySpec {
    pub dist: FrequencyDist,
    pub n: usize,
    pub seed: u64,
}

fn unit_open<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

fn draw_edges<R: Rng>(spec: &ModelSpec, rng: &mut R) -> Vec<(usize, usize)> {
    let n = spec.n;
    match spec.model {
        GraphModel::Er => {
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    // p = 1 keeps every edge: draws lie in (0, 1)
                    if unit_open(rng) < spec.p {
                        edges.push((i, j));
                    }
                }
            }
            edges
        }
        GraphModel::Rgg => {
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (unit_open(rng), unit_open(rng))).collect();
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                    if (dx * dx + dy * dy).sqrt() <= spec.p {
                        edges.push((i, j));
                    }
                }
            }
            edges
        }
        GraphModel::Ws => {
            let k = spec.ws_neighbors;
            let mut adj = vec![vec![false; n]; n];
            let mut ring = Vec::new();
            for d in 1..=k {
                for i in 0..n {
                    let j = (i + d) % n;
                    adj[i][j] = true;
                    adj[j][i] = true;
                    ring.push((i, j));
                }
            }
            // rewire the far endpoint, lattice distance by distance
            for (i, j) in ring {
                if unit_open(rng) >= spec.p {
                    continue;
                }
                let free: Vec<usize> = (0..n).filter(|&t| t != i && !adj[i][t]).collect();
                if free.is_empty() {
                    continue;
                }
                let t = free[rng.gen_range(0..free.len())];
                adj[i][j] = false;
                adj[j][i] = false;
                adj[i][t] = true;
                adj[t][i] = true;
            }
            let mut edges = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if adj[i][j] {
                        edges.push((i, j));
                    }
                }
            }
            edges
        }
    }
}

/// Draws graphs until one is connected, up to [`MAX_DRAWS`] attempts.
pub fn gen_graph(spec: &ModelSpec) -> Result<WeightedGraph> {
    spec.validate()?;
    let mut rng = rng(spec.seed);
    for _ in 0..MAX_DRAWS {
        let edges = draw_edges(spec, &mut rng);
        if let Ok(g) = WeightedGraph::new(spec.n, edges.into_iter().map(|(i, j)| (i, j, 1.0))) {
            return match spec.weight_dist {
                WeightDist::Unit => Ok(g),
                dist => gen_weights(&g, dist, derive_seed(spec.seed, u64::MAX)),
            };
        }
    }
    Err(Error::RetriesExhausted { draws: MAX_DRAWS })
}

/// Replaces every weight with an independent draw from `dist`.
pub fn gen_weights(g: &WeightedGraph, dist: WeightDist, seed: u64) -> Result<WeightedGraph> {
    match dist {
        WeightDist::Unit => Ok(g.clone()),
        WeightDist::Uniform { w_max } => {
            if !(w_max > 0.0) {
                return Err(Error::InvalidSpec(format!("w_max = {w_max}")));
            }
            let mut rng = rng(seed);
            // 1 - U[0,1) lies in (0, 1]
            let w: Vec<f64> = (0..g.m()).map(|_| w_max * (1.0 - rng.gen::<f64>())).collect();
            g.with_weights(&w)
        }
    }
}

/// Raw draws `q` before centering.
pub fn draw_raw_frequencies(spec: &FrequencySpec) -> Vec<f64> {
    let mut rng = rng(spec.seed);
    (0..spec.n)
        .map(|_| match spec.dist {
            FrequencyDist::Uniform { a } => a * (2.0 * unit_open(&mut rng) - 1.0),
            FrequencyDist::Bipolar => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
        })
        .collect()
}

/// Centered natural frequencies `ω_i = q_i - mean(q)`.
pub fn gen_frequencies(spec: &FrequencySpec) -> NodeVector {
    crate::graph::center(&NodeVector::from_vec(draw_raw_frequencies(spec)))
}
