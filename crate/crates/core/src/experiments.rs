//! Experiment drivers: series error curves, approximate-test accuracy
//! sweeps over random graphs, and solver timing.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{inf_norm, GraphOperators, NodeVector};
use crate::random::{derive_seed, gen_frequencies, gen_graph, FrequencyDist, FrequencySpec, GraphModel, ModelSpec};
use crate::series::{evaluate_terms, SeriesExpansion};
use crate::solvers::{
    residual_unconstrained, solve_fixed_point, solve_newton, DEFAULT_TOL, FIXED_POINT_MAX_ITER, NEWTON_MAX_ITER,
};
use crate::sync_tests::{critical_ratios, CouplingConvention, ScanConfig, TestId};

/// Absolute error of each partial sum against a Newton reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorCurve {
    /// Polynomial orders 1, 3, ..., max_order.
    pub orders: Vec<usize>,
    /// `S_k = ‖sin(B^T x_ref) - partial sum through order k‖∞`.
    pub s_k: Vec<f64>,
    pub reference: &'static str,
    pub reference_residual: f64,
}

const REFERENCE_TOL: f64 = 1e-12;

fn reference_solve(ops: &GraphOperators, omega: &NodeVector) -> Result<crate::solvers::SolveOutcome> {
    solve_newton(ops, omega, None, REFERENCE_TOL, NEWTON_MAX_ITER)
        .or_else(|_| solve_newton(ops, omega, None, DEFAULT_TOL, NEWTON_MAX_ITER))
        .map_err(|e| Error::ReferenceSolveFailed(e.to_string()))
}

pub fn error_curve(ops: &GraphOperators, p_sd: &NodeVector, max_order: usize) -> Result<ErrorCurve> {
    let reference = reference_solve(ops, p_sd)?;
    let phi_ref = ops.graph().edge_differences(&reference.solution).map(f64::sin);
    let eta = ops.eta(p_sd)?;
    let se = evaluate_terms(&ops.projections, &eta, max_order)?;
    let orders: Vec<usize> = (1..=max_order).step_by(2).collect();
    let s_k = orders
        .iter()
        .map(|&k| Ok(inf_norm(&(&phi_ref - se.truncated_solution(k)?))))
        .collect::<Result<_>>()?;
    Ok(ErrorCurve { orders, s_k, reference: "newton", reference_residual: reference.residual_inf })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub models: Vec<GraphModel>,
    pub p_grid: Vec<f64>,
    pub dists: Vec<FrequencyDist>,
    pub trials: usize,
    pub n: usize,
    /// Target angle for the approximate tests.
    pub gamma: f64,
    /// Orders of the approximate tests.
    pub orders: Vec<usize>,
    /// Include T0, T1 and T2.
    pub sufficient: bool,
    pub convention: CouplingConvention,
    pub dk: f64,
    pub resolution: f64,
    pub master_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            models: vec![GraphModel::Er],
            p_grid: vec![0.2, 0.35, 0.5, 0.65, 0.8],
            dists: vec![FrequencyDist::Bipolar],
            trials: 30,
            n: 20,
            gamma: std::f64::consts::FRAC_PI_2,
            orders: vec![1, 3, 5, 7],
            sufficient: true,
            convention: CouplingConvention::UniformGain,
            dk: crate::sync_tests::DEFAULT_DK,
            resolution: crate::sync_tests::DEFAULT_RESOLUTION,
            master_seed: 42,
        }
    }
}

impl SweepConfig {
    /// The full-scale protocol: 80 nodes, 100 trials, 15 connectivity
    /// values, all three graph models and both frequency distributions.
    pub fn full() -> Self {
        SweepConfig {
            models: vec![GraphModel::Er, GraphModel::Rgg, GraphModel::Ws],
            p_grid: (1..=15).map(|i| i as f64 / 16.0).collect(),
            dists: vec![FrequencyDist::Uniform { a: 1.0 }, FrequencyDist::Bipolar],
            trials: 100,
            n: 80,
            ..SweepConfig::default()
        }
    }

    pub fn tests(&self) -> Vec<TestId> {
        let mut tests = if self.sufficient { vec![TestId::T0, TestId::T1, TestId::T2] } else { Vec::new() };
        tests.extend(self.orders.iter().map(|&k| TestId::At(k)));
        tests
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub model: GraphModel,
    pub p: f64,
    pub dist: FrequencyDist,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub k_c: f64,
    /// Threshold per test, `None` where the test produced an error.
    pub k_t: Vec<(TestId, Option<f64>)>,
    /// Why the record is incomplete, if it is.
    pub status: Option<String>,
}

impl SweepRecord {
    pub fn k_t(&self, test: TestId) -> Option<f64> {
        self.k_t.iter().find(|(t, _)| *t == test).and_then(|(_, k)| *k)
    }

    pub fn ratio_kc_kt(&self, test: TestId) -> Option<f64> {
        self.k_t(test).map(|kt| self.k_c / kt)
    }

    pub fn ratio_kt_kc(&self, test: TestId) -> Option<f64> {
        self.k_t(test).map(|kt| kt / self.k_c)
    }
}

struct Task {
    model: GraphModel,
    p: f64,
    dist: FrequencyDist,
    trial: usize,
    seed: u64,
}

fn run_trial(cfg: &SweepConfig, tests: &[TestId], task: &Task) -> SweepRecord {
    let mut record = SweepRecord {
        model: task.model,
        p: task.p,
        dist: task.dist,
        trial: task.trial,
        seed: task.seed,
        n: cfg.n,
        m: 0,
        k_c: f64::NAN,
        k_t: tests.iter().map(|&t| (t, None)).collect(),
        status: None,
    };
    let result = (|| -> Result<()> {
        let g = gen_graph(&ModelSpec::new(task.model, cfg.n, task.p, task.seed))?;
        record.m = g.m();
        let omega = gen_frequencies(&FrequencySpec { dist: task.dist, n: cfg.n, seed: derive_seed(task.seed, 1) });
        let ops = GraphOperators::new(&g)?;
        let scan_cfg = ScanConfig { convention: cfg.convention, dk: cfg.dk, resolution: cfg.resolution, ..ScanConfig::default() };
        let scan = critical_ratios(&ops, &omega, tests, cfg.gamma, &scan_cfg)?;
        record.k_c = scan.k_c;
        let mut failures = Vec::new();
        for (slot, th) in record.k_t.iter_mut().zip(&scan.thresholds) {
            match &th.k_t {
                Ok(k) => slot.1 = Some(*k),
                Err(e) => failures.push(format!("{}:{}", th.test, e.reason())),
            }
        }
        if !failures.is_empty() {
            record.status = Some(failures.join(";"));
        }
        Ok(())
    })();
    if let Err(e) = result {
        record.status = Some(e.reason().to_string());
    }
    record
}

/// Runs every `(model, p, dist, trial)` combination in parallel. Record
/// order and contents depend only on the configuration.
pub fn accuracy_sweep(cfg: &SweepConfig) -> Vec<SweepRecord> {
    let tests = cfg.tests();
    let mut tasks = Vec::new();
    for &model in &cfg.models {
        for &p in &cfg.p_grid {
            for &dist in &cfg.dists {
                for trial in 0..cfg.trials {
                    let seed = derive_seed(cfg.master_seed, tasks.len() as u64);
                    tasks.push(Task { model, p, dist, trial, seed });
                }
            }
        }
    }
    tasks.par_iter().map(|t| run_trial(cfg, &tests, t)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Series(usize),
    FixedPoint,
    Newton,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Series(k) => write!(f, "series{k}"),
            Method::FixedPoint => write!(f, "fixed_point"),
            Method::Newton => write!(f, "newton"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed_point" | "fixed-point" => Ok(Method::FixedPoint),
            "newton" => Ok(Method::Newton),
            _ => s
                .strip_prefix("series")
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|k| k % 2 == 1)
                .map(Method::Series)
                .ok_or_else(|| Error::InvalidSpec(format!("unknown method '{s}'"))),
        }
    }
}

/// A graph with its precomputed operators and a batch of frequency vectors.
pub struct BenchInstance {
    pub ops: GraphOperators,
    pub omegas: Vec<NodeVector>,
    pub precompute_seconds: f64,
}

impl BenchInstance {
    pub fn new(g: &crate::graph::WeightedGraph, omegas: Vec<NodeVector>) -> Result<Self> {
        let t = Instant::now();
        let ops = GraphOperators::new(g)?;
        Ok(BenchInstance { ops, omegas, precompute_seconds: t.elapsed().as_secs_f64() })
    }
}

/// An ER graph with `count` uniform frequency vectors, each rescaled so that
/// `‖eta‖∞ = load · h(‖P_cyc‖∞)`. Any `load < 1` makes every vector pass T0.
pub fn t0_scaled_instance(n: usize, p: f64, count: usize, load: f64, seed: u64) -> Result<BenchInstance> {
    let g = gen_graph(&ModelSpec::new(GraphModel::Er, n, p, seed))?;
    let mut inst = BenchInstance::new(&g, Vec::new())?;
    let target = load * crate::series::h(inst.ops.projections.p_cyc_norm)?;
    for idx in 0..count {
        let spec = FrequencySpec { dist: FrequencyDist::Uniform { a: 1.0 }, n, seed: derive_seed(seed, idx as u64 + 1) };
        let omega = gen_frequencies(&spec);
        let norm = inf_norm(&(&inst.ops.eta_map * &omega));
        inst.omegas.push(omega * (target / norm));
    }
    Ok(inst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingRow {
    pub instance: usize,
    pub method: String,
    pub median_seconds: f64,
    pub repeats: usize,
    /// Worst unconstrained-balance residual over the batch.
    pub residual: f64,
    pub failed: Option<String>,
}

/// Residual threshold above which a timed cell counts as failed.
pub const BENCH_RESIDUAL_LIMIT: f64 = 1e-6;

fn run_method(inst: &BenchInstance, method: Method) -> Result<Vec<crate::graph::EdgeVector>> {
    let ops = &inst.ops;
    inst.omegas
        .iter()
        .map(|omega| {
            let eta = &ops.eta_map * omega;
            Ok(match method {
                Method::Series(k) => {
                    let se: SeriesExpansion = evaluate_terms(&ops.projections, &eta, k)?;
                    se.truncated_solution(k)?.clone()
                }
                Method::FixedPoint => solve_fixed_point(&ops.projections, &eta, DEFAULT_TOL, FIXED_POINT_MAX_ITER)?.solution,
                Method::Newton => {
                    let out = solve_newton(ops, omega, None, DEFAULT_TOL, NEWTON_MAX_ITER)?;
                    ops.graph().edge_differences(&out.solution).map(f64::sin)
                }
            })
        })
        .collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Times each method on each instance, sequentially. Precomputation is
/// excluded from method times unless `include_precompute` is set; it is
/// always reported as its own `precompute` row.
pub fn timing_bench(instances: &[BenchInstance], methods: &[Method], repeats: usize, include_precompute: bool) -> Vec<TimingRow> {
    let repeats = repeats.max(1);
    let mut rows = Vec::new();
    for (idx, inst) in instances.iter().enumerate() {
        rows.push(TimingRow {
            instance: idx,
            method: "precompute".into(),
            median_seconds: inst.precompute_seconds,
            repeats: 1,
            residual: 0.0,
            failed: None,
        });
        for &method in methods {
            let mut times = Vec::with_capacity(repeats);
            let mut outcome = Ok(Vec::new());
            for _ in 0..repeats {
                let t = Instant::now();
                outcome = run_method(inst, method);
                times.push(t.elapsed().as_secs_f64());
                if outcome.is_err() {
                    break;
                }
            }
            let offset = if include_precompute { inst.precompute_seconds } else { 0.0 };
            let (residual, failed) = match outcome {
                Ok(phis) => {
                    let worst = inst
                        .omegas
                        .iter()
                        .zip(&phis)
                        .map(|(omega, phi)| {
                            let eta = &inst.ops.eta_map * omega;
                            residual_unconstrained(&inst.ops.projections, &eta, phi)
                                .map(|r| inf_norm(&r))
                                .unwrap_or(f64::INFINITY)
                        })
                        .fold(0.0, f64::max);
                    let failed = (!(worst < BENCH_RESIDUAL_LIMIT)).then(|| "ResidualTooLarge".to_string());
                    (worst, failed)
                }
                Err(e) => (f64::NAN, Some(e.reason().to_string())),
            };
            rows.push(TimingRow {
                instance: idx,
                method: method.to_string(),
                median_seconds: median(times) + offset,
                repeats,
                residual,
                failed,
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use nalgebra::DVector;

    #[test]
    fn acyclic_error_curve_is_flat() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.5)]).unwrap();
        let ops = GraphOperators::new(&g).unwrap();
        let omega = DVector::from_vec(vec![0.4, -0.1, 0.2, -0.5]);
        let c = error_curve(&ops, &omega, 7).unwrap();
        assert_eq!(c.orders, vec![1, 3, 5, 7]);
        assert!(c.s_k.iter().all(|&s| s < 1e-10), "{:?}", c.s_k);
        assert!(c.reference_residual < 1e-10);
    }

    #[test]
    fn heavier_load_has_larger_errors() {
        let g = WeightedGraph::new(3, [(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let ops = GraphOperators::new(&g).unwrap();
        let p = DVector::from_vec(vec![2.0, -1.0, -1.0]);
        let h0 = crate::series::h(ops.projections.p_cyc_norm).unwrap();
        // ‖eta‖∞ = s for this p
        let light = error_curve(&ops, &(&p * (0.25 * h0)), 9).unwrap();
        let heavy = error_curve(&ops, &(&p * (0.95 * h0)), 9).unwrap();
        for (a, b) in light.s_k.iter().zip(&heavy.s_k) {
            assert!(a < b);
        }
        assert!(light.s_k.windows(2).all(|w| w[1] < w[0] || w[0] < 1e-13));
    }

    #[test]
    fn empty_sweep() {
        let cfg = SweepConfig { trials: 0, ..SweepConfig::default() };
        assert!(accuracy_sweep(&cfg).is_empty());
    }

    #[test]
    fn small_sweep_is_sound_and_seeded() {
        let cfg = SweepConfig { p_grid: vec![0.5], trials: 3, n: 8, ..SweepConfig::default() };
        let records = accuracy_sweep(&cfg);
        assert_eq!(records.len(), 3);
        let mut seeds: Vec<u64> = records.iter().map(|r| r.seed).collect();
        seeds.dedup();
        assert_eq!(seeds.len(), 3);
        for r in &records {
            assert!(r.status.is_none(), "{:?}", r.status);
            for t in [TestId::T0, TestId::T1, TestId::T2] {
                // uniform gain: sufficient thresholds sit above K_C
                assert!(r.k_t(t).unwrap() >= r.k_c - cfg.resolution, "{t} {r:?}");
            }
        }
        assert_eq!(records, accuracy_sweep(&cfg));
    }

    #[test]
    fn bench_rows() {
        let inst = t0_scaled_instance(10, 0.6, 3, 0.1, 5).unwrap();
        assert!(inst.omegas.iter().all(|w| crate::series::test_t0(&inst.ops, w).unwrap().passes_t0));
        let methods = [Method::Series(5), Method::Series(7), Method::FixedPoint, Method::Newton];
        let rows = timing_bench(&[inst], &methods, 1, false);
        assert_eq!(rows.len(), 5);
        for r in &rows[1..] {
            assert!(r.failed.is_none(), "{r:?}");
            assert!(r.residual < BENCH_RESIDUAL_LIMIT);
            assert_eq!(r.repeats, 1);
        }
    }

    #[test]
    fn method_names() {
        for m in [Method::Series(7), Method::FixedPoint, Method::Newton] {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0]), 4.0);
    }
}
