//! Scaling benchmarks over operation counters, and small parameter
//! calculators.

use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::instances::{
    generate_bcp, generate_cnf, generate_lattice01, BcpGen, CnfGen, Label, LatticeGen,
};
use crate::metric::{GapSide, NormKind};
use crate::oracles::{oracle_closest_pair, oracle_lattice01_with, oracle_sat_with, OracleVerdict};
use crate::reductions::{embed_subsetquery_to_bcp, reduce_ksat_to_bisq_with, EmbeddingOrientation};
use crate::solvers::{bcp_solve, svp01_mitm_with, BcpStrategy, CostCounters};

/// γ = 1 + 2/(k − 1), the gap a k-party version of the gadget argument
/// leaves open.
pub fn implied_gap(k: u64) -> Result<BigRational> {
    if k < 2 {
        return Err(Error::Parameter(format!("k = {k} must be at least 2")));
    }
    Ok(BigRational::from_integer(1.into()) + BigRational::new(2.into(), BigInt::from(k - 1)))
}

pub const CSV_HEADER: [&str; 12] = [
    "problem",
    "solver",
    "N",
    "n",
    "d",
    "seed",
    "verdict",
    "distance_evals",
    "structure_builds",
    "structure_queries",
    "candidates_materialized",
    "wall_time_ns",
];

/// Which solver a benchmark runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BenchSolver {
    /// Exhaustive oracle; its enumeration count lands in `distance_evals`.
    Oracle,
    Brute,
    Pruned,
    /// Meet-in-the-middle with the given closest-pair backend.
    Mitm(BcpStrategy),
    /// Split-and-list, embedding, then brute-force closest pair.
    SplitList,
}

impl BenchSolver {
    pub fn name(self) -> &'static str {
        match self {
            BenchSolver::Oracle => "oracle",
            BenchSolver::Brute => "brute",
            BenchSolver::Pruned => "pruned",
            BenchSolver::Mitm(BcpStrategy::Brute) => "mitm",
            BenchSolver::Mitm(BcpStrategy::Pruned) => "mitm-pruned",
            BenchSolver::SplitList => "split-list",
        }
    }
}

impl FromStr for BenchSolver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "oracle" => BenchSolver::Oracle,
            "brute" => BenchSolver::Brute,
            "pruned" => BenchSolver::Pruned,
            "mitm" => BenchSolver::Mitm(BcpStrategy::Brute),
            "mitm-pruned" => BenchSolver::Mitm(BcpStrategy::Pruned),
            "split-list" => BenchSolver::SplitList,
            other => return Err(Error::Parameter(format!("unknown solver '{other}'"))),
        })
    }
}

/// A benchmark family; the size parameter is N for closest pair and n for
/// the lattice and SAT problems.
#[derive(Clone, Debug)]
pub enum BenchProblem {
    Bcp {
        dim: usize,
        p: NormKind,
        label: Label,
    },
    Lattice {
        p: NormKind,
        label: Label,
        cvp: bool,
    },
    Ksat {
        k: usize,
        /// Clauses per variable, as a ratio.
        density: (usize, usize),
    },
}

impl BenchProblem {
    pub fn name(&self) -> &'static str {
        match self {
            BenchProblem::Bcp { .. } => "bcp",
            BenchProblem::Lattice { cvp: false, .. } => "svp01",
            BenchProblem::Lattice { cvp: true, .. } => "cvp01",
            BenchProblem::Ksat { .. } => "ksat",
        }
    }

    /// Whether the exponent is fitted against log₂ of the size (closest
    /// pair) or against the size itself (exponential-time problems).
    pub fn log_size_axis(&self) -> bool {
        matches!(self, BenchProblem::Bcp { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BenchRow {
    pub problem: String,
    pub solver: String,
    #[serde(rename = "N")]
    pub big_n: Option<u64>,
    pub n: Option<u64>,
    pub d: Option<u64>,
    pub seed: u64,
    pub verdict: String,
    pub distance_evals: u64,
    pub structure_builds: u64,
    pub structure_queries: u64,
    pub candidates_materialized: u64,
    pub wall_time_ns: u64,
}

impl BenchRow {
    pub fn counters(&self) -> CostCounters {
        CostCounters {
            distance_evals: self.distance_evals,
            structure_builds: self.structure_builds,
            structure_queries: self.structure_queries,
            candidates_materialized: self.candidates_materialized,
        }
    }

    /// The row with its timing zeroed, for reproducibility comparisons.
    pub fn without_time(&self) -> Self {
        Self {
            wall_time_ns: 0,
            ..self.clone()
        }
    }
}

/// Least-squares fit of log₂(counter) against the size axis.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub counter: String,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log₂ units.
    pub residual: f64,
    pub samples: usize,
}

/// Denominator of [`ExponentFit::slope_rational`].
pub const SLOPE_PRECISION: i64 = 1_000_000;

impl ExponentFit {
    /// The slope rounded to the nearest multiple of 1/[`SLOPE_PRECISION`].
    pub fn slope_rational(&self) -> BigRational {
        let num = (self.slope * SLOPE_PRECISION as f64).round() as i64;
        BigRational::new(num.into(), SLOPE_PRECISION.into())
    }
}

/// Ordinary least squares of `y` on `x`.
pub fn fit_exponent(counter: &str, points: &[(f64, f64)]) -> Result<ExponentFit> {
    let n = points.len();
    let mean = |f: fn(&(f64, f64)) -> f64| points.iter().map(f).sum::<f64>() / n as f64;
    if n < 2 {
        return Err(Error::Parameter("need at least two samples to fit".into()));
    }
    let (mx, my) = (mean(|p| p.0), mean(|p| p.1));
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Parameter("all samples share one size".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    Ok(ExponentFit {
        counter: counter.to_string(),
        slope,
        intercept,
        residual: (sse / n as f64).sqrt(),
        samples: n,
    })
}

#[derive(Clone, Debug)]
pub struct BenchRun {
    pub rows: Vec<BenchRow>,
    pub fit: ExponentFit,
}

fn label_str(side: GapSide) -> &'static str {
    match side {
        GapSide::Yes => "YES",
        _ => "NO",
    }
}

fn oracle_counters(v: &OracleVerdict) -> CostCounters {
    CostCounters {
        distance_evals: v.enumerated,
        ..Default::default()
    }
}

fn run_cell(
    problem: &BenchProblem,
    solver: BenchSolver,
    size: usize,
    seed: u64,
    budget: &Budget,
) -> Result<BenchRow> {
    let unsupported = || {
        Error::Unsupported(format!(
            "solver '{}' does not apply to '{}'",
            solver.name(),
            problem.name()
        ))
    };
    let start = Instant::now();
    let (verdict, counters, big_n, n, d) = match problem {
        BenchProblem::Bcp { dim, p, label } => {
            let inst = generate_bcp(&BcpGen::new(size, *dim, *p, *label), seed)?;
            let (verdict, counters) = match solver {
                BenchSolver::Oracle => {
                    let v = oracle_closest_pair(&inst);
                    (label_str(v.label), oracle_counters(&v))
                }
                BenchSolver::Brute | BenchSolver::Pruned => {
                    let strategy = if solver == BenchSolver::Brute {
                        BcpStrategy::Brute
                    } else {
                        BcpStrategy::Pruned
                    };
                    let out = bcp_solve(&inst, strategy)?;
                    (out.label.as_str(), out.counters)
                }
                _ => return Err(unsupported()),
            };
            (verdict, counters, Some(size), None, Some(*dim))
        }
        BenchProblem::Lattice { p, label, cvp } => {
            let mut gen = LatticeGen::new(size, *p, *label);
            gen.cvp = *cvp;
            let inst = generate_lattice01(&gen, seed)?;
            let (verdict, counters) = match solver {
                BenchSolver::Oracle => {
                    let v = oracle_lattice01_with(&inst, budget)?;
                    (label_str(v.label), oracle_counters(&v))
                }
                BenchSolver::Mitm(backend) => {
                    let out = svp01_mitm_with(&inst, backend, budget)?;
                    (out.label.as_str(), out.counters)
                }
                _ => return Err(unsupported()),
            };
            (verdict, counters, None, Some(size), Some(inst.dim()))
        }
        BenchProblem::Ksat { k, density } => {
            let m = size * density.0 / density.1.max(1);
            let inst = generate_cnf(&CnfGen { n: size, m, k: *k }, seed)?;
            let (verdict, counters) = match solver {
                BenchSolver::Oracle => {
                    let v = oracle_sat_with(&inst, budget)?;
                    (label_str(v.label), oracle_counters(&v))
                }
                BenchSolver::SplitList => {
                    let family = reduce_ksat_to_bisq_with(&inst, budget)?;
                    let bcp = embed_subsetquery_to_bcp(&family.instances[0], EmbeddingOrientation::Corrected)?;
                    let mut out = bcp_solve(&bcp, BcpStrategy::Brute)?;
                    out.counters.candidates_materialized +=
                        (family.instances[0].supersets.len() + family.instances[0].subsets.len()) as u64;
                    (out.label.as_str(), out.counters)
                }
                _ => return Err(unsupported()),
            };
            (verdict, counters, None, Some(size), Some(m))
        }
    };
    let wall_time_ns = start.elapsed().as_nanos().min(u64::MAX as u128) as u64;
    Ok(BenchRow {
        problem: problem.name().to_string(),
        solver: solver.name().to_string(),
        big_n: big_n.map(|v| v as u64),
        n: n.map(|v| v as u64),
        d: d.map(|v| v as u64),
        seed,
        verdict: verdict.to_string(),
        distance_evals: counters.distance_evals,
        structure_builds: counters.structure_builds,
        structure_queries: counters.structure_queries,
        candidates_materialized: counters.candidates_materialized,
        wall_time_ns,
    })
}

/// Runs every (size, seed) cell and fits the growth exponent of `counter`.
/// Rows come sorted by size, then seed; everything except `wall_time_ns` is
/// a deterministic function of the arguments.
pub fn bench_scaling(
    problem: &BenchProblem,
    solver: BenchSolver,
    sizes: &[usize],
    seeds: &[u64],
    counter: &str,
) -> Result<BenchRun> {
    bench_scaling_with(problem, solver, sizes, seeds, counter, &Budget::from_env())
}

pub fn bench_scaling_with(
    problem: &BenchProblem,
    solver: BenchSolver,
    sizes: &[usize],
    seeds: &[u64],
    counter: &str,
    budget: &Budget,
) -> Result<BenchRun> {
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 4 {
        return Err(Error::Parameter("an exponent fit needs at least 4 sizes".into()));
    }
    if seeds.is_empty() {
        return Err(Error::Parameter("no seeds given".into()));
    }
    if CostCounters::default().get(counter).is_none() {
        return Err(Error::Parameter(format!("unknown counter '{counter}'")));
    }
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    let mut rows = Vec::with_capacity(distinct.len() * seeds.len());
    let mut samples = Vec::with_capacity(rows.capacity());
    for &size in &distinct {
        for &seed in &seeds {
            let row = run_cell(problem, solver, size, seed, budget)?;
            let count = row.counters().get(counter).expect("known counter");
            if count == 0 {
                return Err(Error::Parameter(format!(
                    "counter '{counter}' is zero at size {size}, seed {seed}; cannot fit a logarithm"
                )));
            }
            let x = if problem.log_size_axis() {
                (size as f64).log2()
            } else {
                size as f64
            };
            samples.push((x, (count as f64).log2()));
            rows.push(row);
        }
    }
    let fit = fit_exponent(counter, &samples)?;
    Ok(BenchRun { rows, fit })
}

/// Writes the rows as CSV with the fixed header.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}
