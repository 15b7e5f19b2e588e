mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use gapkit::barrier::{
    gadget_gap, search_best_gadget, verify_barrier, GadgetTables, GapReport, Restriction,
};
use gapkit::bench::{bench_scaling, implied_gap, write_csv, BenchProblem, BenchSolver};
use gapkit::budget::Budget;
use gapkit::instances::{
    generate, parse_instance, serialize_instance, BcpGen, CnfGen, GenSpec, Instance, InstanceKind,
    Label, LatticeGen, SubsetQueryGen,
};
use gapkit::metric::{Gamma, GapSide, NormKind};
use gapkit::oracles::{
    oracle_closest_pair, oracle_lattice01, oracle_sat, oracle_subset_query, OracleVerdict, Witness,
};
use gapkit::reductions::{
    bsq_to_ov, embed_subsetquery_to_bcp, ov_to_bsq, parse_rational, reduce_ksat_to_bisq,
    reduce_lattice01_to_bcp, select_batch_size, solve_bcp_via_ann, EmbeddingOrientation,
    Provenance, Recombination, Source,
};
use gapkit::solvers::{
    ann_build, bcp_solve, svp01_mitm, AnnStrategy, BcpStrategy, CostCounters, SolveOutcome,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] gapkit::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{0}")]
    Usage(String),
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "gapkit", version, about = "Exact fine-grained reductions, solvers and oracles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded instance with a certified label.
    Gen(GenArgs),
    /// Transform an instance, writing the produced instances and provenance.
    Reduce(ReduceArgs),
    /// Decide an instance and print a verdict record.
    Solve(SolveArgs),
    /// Check a claimed identity or equivalence over many seeds.
    Verify(verify::VerifyArgs),
    /// Run a scaling benchmark and emit CSV.
    Bench(BenchArgs),
    /// Analyse, verify or search disjointness gadgets.
    Gadget {
        #[command(subcommand)]
        action: GadgetAction,
    },
    /// Hardness-parameter calculators.
    Params(ParamsArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GenProblem {
    Svp01,
    Cvp01,
    Bcp,
    Subsetquery,
    Ov,
    Cnf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LabelArg {
    Yes,
    No,
}

impl From<LabelArg> for Label {
    fn from(l: LabelArg) -> Self {
        match l {
            LabelArg::Yes => Label::Yes,
            LabelArg::No => Label::No,
        }
    }
}

fn parse_norm(s: &str) -> Result<NormKind, String> {
    s.parse::<NormKind>().map_err(|e| e.to_string())
}

fn parse_gamma(s: &str) -> Result<Gamma, String> {
    s.parse::<Gamma>().map_err(|e| e.to_string())
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    problem: GenProblem,
    /// Rank (lattice), points per side (bcp), sets per side (subset query,
    /// OV) or variables (CNF).
    #[arg(long)]
    n: usize,
    /// Ambient dimension (lattice, bcp) or universe size (subset query, OV).
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_parser = parse_norm, default_value = "inf")]
    p: NormKind,
    #[arg(long, value_enum, default_value = "yes")]
    label: LabelArg,
    #[arg(long, default_value_t = 4)]
    r: u64,
    #[arg(long, value_parser = parse_gamma, default_value = "2")]
    gamma: Gamma,
    /// Clause count (CNF); defaults to ⌈4.26 n⌉.
    #[arg(long)]
    m: Option<usize>,
    /// Clause width (CNF).
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReduceKind {
    /// {0,1} lattice → closest pair (meet in the middle).
    LatticeBcp,
    /// k-SAT → bichromatic subset query (split and list).
    KsatBsq,
    /// Subset query → ℓ∞ closest pair.
    BsqBcp,
    OvBsq,
    BsqOv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OrientationArg {
    Corrected,
    Literal,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    kind: ReduceKind,
    #[arg(long = "in")]
    input: PathBuf,
    /// Directory for instance_<k>.json and provenance.json.
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value = "corrected")]
    orientation: OrientationArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProblemArg {
    Ann,
    Bcp,
    Svp01,
    Cvp01,
    Lattice01,
    Subsetquery,
    Ov,
    Ksat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Oracle,
    Brute,
    Pruned,
    Mitm,
    MitmPruned,
    Embed,
    SplitList,
    AnnLinear,
    AnnGrid,
    Linear,
    Grid,
}

#[derive(Args)]
struct SolveArgs {
    /// Expected problem; checked against the instance kind when given.
    #[arg(long, value_enum)]
    problem: Option<ProblemArg>,
    #[arg(long = "in")]
    input: PathBuf,
    /// Defaults: brute (bcp), mitm (lattice), embed (subset query, OV),
    /// split-list (CNF), linear (ANN).
    #[arg(long, value_enum)]
    strategy: Option<Strategy>,
    /// Batch size for the ann-* closest-pair strategies (default |A|).
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long, value_enum)]
    orientation: Option<OrientationArg>,
    /// Exit 1 unless the verdict matches.
    #[arg(long, value_enum)]
    expect: Option<LabelArg>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BenchProblemArg {
    Bcp,
    Svp01,
    Cvp01,
    Ksat,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    problem: BenchProblemArg,
    /// oracle, brute, pruned, mitm, mitm-pruned or split-list.
    #[arg(long)]
    solver: String,
    /// Comma-separated sizes (N for bcp, n otherwise); at least four.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(long, default_value = "distance_evals")]
    counter: String,
    #[arg(long, default_value_t = 8)]
    dim: usize,
    #[arg(long, value_parser = parse_norm, default_value = "inf")]
    p: NormKind,
    #[arg(long, value_enum, default_value = "no")]
    label: LabelArg,
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Clauses per variable for ksat, as a/b.
    #[arg(long, default_value = "4/1")]
    density: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GadgetAction {
    /// Exact gap report of a gadget file.
    Gap {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Certify gap ≤ 3 (rejects spaces violating the triangle inequality).
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Exhaustive search over ℓ∞ grid gadgets.
    Search {
        #[arg(long, default_value_t = 1)]
        d: usize,
        /// Comma-separated grid coordinates (numerators).
        #[arg(long, value_delimiter = ',', default_value = "0,1,2,3", allow_negative_numbers = true)]
        grid: Vec<i64>,
        #[arg(long, default_value_t = 3)]
        scale: u64,
        #[arg(long, default_value_t = 1)]
        ambient_dim: usize,
        /// Also write the best gadget to this file.
        #[arg(long)]
        gadget_out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ParamsArgs {
    /// Report γ = 1 + 2/(k−1).
    #[arg(long)]
    k: Option<u64>,
    /// Batch-size selection: number of points N.
    #[arg(long = "N")]
    big_n: Option<u64>,
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    delta_prime: Option<String>,
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_text(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("json values serialize") + "\n"
}

fn run_gen(args: GenArgs) -> CliResult<ExitCode> {
    let label = Label::from(args.label);
    let spec = match args.problem {
        GenProblem::Svp01 | GenProblem::Cvp01 => {
            let mut g = LatticeGen::new(args.n, args.p, label);
            g.dim = args.dim;
            g.r = args.r;
            g.gamma = args.gamma;
            g.cvp = matches!(args.problem, GenProblem::Cvp01);
            GenSpec::Lattice01(g)
        }
        GenProblem::Bcp => {
            let mut g = BcpGen::new(args.n, args.dim.unwrap_or(4), args.p, label);
            g.r = args.r;
            g.gamma = args.gamma;
            GenSpec::Bcp(g)
        }
        GenProblem::Subsetquery | GenProblem::Ov => {
            GenSpec::SubsetQuery(SubsetQueryGen::new(args.n, args.dim.unwrap_or(16), label))
        }
        GenProblem::Cnf => GenSpec::Cnf(CnfGen {
            n: args.n,
            m: args.m.unwrap_or((args.n * 426).div_ceil(100)),
            k: args.k,
        }),
    };
    let mut instance = generate(&spec, args.seed)?;
    if let (GenProblem::Ov, Instance::SubsetQuery(sq)) = (args.problem, &instance) {
        instance = bsq_to_ov(sq).into();
    }
    write_text(args.out.as_deref(), &serialize_instance(&instance))?;
    Ok(ExitCode::SUCCESS)
}

fn identity_provenance(n_a: usize, n_b: usize) -> Provenance {
    Provenance {
        a: (0..n_a).map(Source::SetIndex).collect(),
        b: (0..n_b).map(Source::SetIndex).collect(),
    }
}

fn orientation(arg: Option<OrientationArg>) -> EmbeddingOrientation {
    match arg {
        Some(OrientationArg::Literal) => EmbeddingOrientation::Literal,
        _ => EmbeddingOrientation::Corrected,
    }
}

fn run_reduce(args: ReduceArgs) -> CliResult<ExitCode> {
    let instance = parse_instance(&read(&args.input)?)?;
    let (instances, recombination, provenance): (Vec<Instance>, Recombination, Vec<Provenance>) =
        match (args.kind, &instance) {
            (ReduceKind::LatticeBcp, Instance::Lattice01(l)) => {
                let out = reduce_lattice01_to_bcp(l)?;
                let instances = out.instances.into_iter().map(Instance::from).collect();
                (instances, out.recombination, out.provenance)
            }
            (ReduceKind::KsatBsq, Instance::Cnf(c)) => {
                let out = reduce_ksat_to_bisq(c)?;
                let instances = out.instances.into_iter().map(Instance::from).collect();
                (instances, out.recombination, out.provenance)
            }
            (ReduceKind::BsqBcp, Instance::SubsetQuery(sq)) => {
                let bcp = embed_subsetquery_to_bcp(sq, orientation(Some(args.orientation)))?;
                let prov = identity_provenance(sq.supersets.len(), sq.subsets.len());
                (vec![bcp.into()], Recombination::Single, vec![prov])
            }
            (ReduceKind::OvBsq, Instance::Ov(ov)) => {
                let prov = identity_provenance(ov.a.len(), ov.b.len());
                (vec![ov_to_bsq(ov).into()], Recombination::Single, vec![prov])
            }
            (ReduceKind::BsqOv, Instance::SubsetQuery(sq)) => {
                let prov = identity_provenance(sq.supersets.len(), sq.subsets.len());
                (vec![bsq_to_ov(sq).into()], Recombination::Single, vec![prov])
            }
            (kind, other) => {
                return Err(CliError::Usage(format!(
                    "reduction {kind:?} does not accept a '{}' instance",
                    other.kind()
                )))
            }
        };
    fs::create_dir_all(&args.out_dir).map_err(|source| CliError::Io {
        path: args.out_dir.display().to_string(),
        source,
    })?;
    let mut files = Vec::new();
    for (k, inst) in instances.iter().enumerate() {
        let name = format!("instance_{k}.json");
        write_text(Some(&args.out_dir.join(&name)), &serialize_instance(inst))?;
        files.push(name);
    }
    let record = json!({
        "source": args.input.display().to_string(),
        "recombination": recombination,
        "instances": files,
        "provenance": provenance,
    });
    write_text(Some(&args.out_dir.join("provenance.json")), &pretty(&record))?;
    Ok(ExitCode::SUCCESS)
}

fn side_str(side: GapSide) -> &'static str {
    side.as_str()
}

struct Verdict {
    label: &'static str,
    witness: Option<Witness>,
    counters: CostCounters,
    extra: Option<(&'static str, Value)>,
}

impl Verdict {
    fn from_oracle(v: OracleVerdict) -> Self {
        let extra = v
            .exact_min
            .as_ref()
            .map(|m| ("exact_min", json!(m.to_rational().to_string())));
        Self {
            label: side_str(v.label),
            witness: v.witness,
            counters: CostCounters {
                distance_evals: v.enumerated,
                ..Default::default()
            },
            extra,
        }
    }

    fn from_outcome(o: SolveOutcome) -> Self {
        Self {
            label: o.label.as_str(),
            witness: o.witness,
            counters: o.counters,
            extra: None,
        }
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "label": self.label,
            "witness": self.witness,
            "counters": self.counters,
        });
        if let Some((k, x)) = &self.extra {
            v[*k] = x.clone();
        }
        v
    }
}

fn check_problem(problem: Option<ProblemArg>, instance: &Instance) -> CliResult<()> {
    let Some(problem) = problem else {
        return Ok(());
    };
    let ok = match (problem, instance) {
        (ProblemArg::Ann, Instance::Ann(_)) | (ProblemArg::Bcp, Instance::Bcp(_)) => true,
        (ProblemArg::Lattice01, Instance::Lattice01(_)) => true,
        (ProblemArg::Svp01, Instance::Lattice01(l)) => !l.is_cvp(),
        (ProblemArg::Cvp01, Instance::Lattice01(l)) => l.is_cvp(),
        (ProblemArg::Subsetquery, Instance::SubsetQuery(_)) => true,
        (ProblemArg::Ov, Instance::Ov(_)) | (ProblemArg::Ksat, Instance::Cnf(_)) => true,
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--problem {problem:?} does not match the '{}' instance",
            instance.kind()
        )))
    }
}

fn embed_and_solve(sq: &gapkit::instances::SetFamilyInstance, o: EmbeddingOrientation) -> CliResult<Verdict> {
    let bcp = embed_subsetquery_to_bcp(sq, o)?;
    let mut out = bcp_solve(&bcp, BcpStrategy::Brute)?;
    out.counters.candidates_materialized += (bcp.a.len() + bcp.b.len()) as u64;
    out.witness = match out.witness {
        Some(Witness::Pair { a, b }) => Some(Witness::Containment {
            subset: b,
            superset: a,
        }),
        w => w,
    };
    Ok(Verdict::from_outcome(out))
}

fn unsupported(strategy: Strategy, kind: InstanceKind) -> CliError {
    CliError::Usage(format!("strategy {strategy:?} does not apply to '{kind}' instances"))
}

fn solve(instance: &Instance, args: &SolveArgs) -> CliResult<Verdict> {
    let kind = instance.kind();
    Ok(match instance {
        Instance::Bcp(b) => match args.strategy.unwrap_or(Strategy::Brute) {
            Strategy::Oracle => Verdict::from_oracle(oracle_closest_pair(b)),
            Strategy::Brute => Verdict::from_outcome(bcp_solve(b, BcpStrategy::Brute)?),
            Strategy::Pruned => Verdict::from_outcome(bcp_solve(b, BcpStrategy::Pruned)?),
            s @ (Strategy::AnnLinear | Strategy::AnnGrid) => {
                let backend = if s == Strategy::AnnLinear {
                    AnnStrategy::Linear
                } else {
                    AnnStrategy::Grid
                };
                let out = solve_bcp_via_ann(b, &backend, args.ell.unwrap_or(b.a.len()))?;
                Verdict {
                    label: out.label.as_str(),
                    witness: None,
                    counters: out.counters,
                    extra: Some(("batches", json!(out.batches))),
                }
            }
            s => return Err(unsupported(s, kind)),
        },
        Instance::Lattice01(l) => match args.strategy.unwrap_or(Strategy::Mitm) {
            Strategy::Oracle => Verdict::from_oracle(oracle_lattice01(l)?),
            Strategy::Mitm => Verdict::from_outcome(svp01_mitm(l, BcpStrategy::Brute)?),
            Strategy::MitmPruned => Verdict::from_outcome(svp01_mitm(l, BcpStrategy::Pruned)?),
            s => return Err(unsupported(s, kind)),
        },
        Instance::SubsetQuery(sq) => match args.strategy.unwrap_or(Strategy::Embed) {
            Strategy::Oracle => Verdict::from_oracle(oracle_subset_query(sq)),
            Strategy::Embed => embed_and_solve(sq, orientation(args.orientation))?,
            s => return Err(unsupported(s, kind)),
        },
        Instance::Ov(ov) => {
            let sq = ov_to_bsq(ov);
            let mut v = match args.strategy.unwrap_or(Strategy::Embed) {
                Strategy::Oracle => Verdict::from_oracle(oracle_subset_query(&sq)),
                Strategy::Embed => embed_and_solve(&sq, EmbeddingOrientation::Corrected)?,
                s => return Err(unsupported(s, kind)),
            };
            v.witness = match v.witness {
                Some(Witness::Containment { subset, superset }) => Some(Witness::Pair {
                    a: superset,
                    b: subset,
                }),
                w => w,
            };
            v
        }
        Instance::Cnf(c) => match args.strategy.unwrap_or(Strategy::SplitList) {
            Strategy::Oracle => Verdict::from_oracle(oracle_sat(c)?),
            Strategy::SplitList => {
                let family = reduce_ksat_to_bisq(c)?;
                let sq = &family.instances[0];
                let mut v = embed_and_solve(sq, EmbeddingOrientation::Corrected)?;
                if let Some(Witness::Containment { subset, superset }) = v.witness {
                    v.witness = Some(Witness::Assignment(family.lift_assignment(0, superset, subset)?));
                }
                v
            }
            s => return Err(unsupported(s, kind)),
        },
        Instance::Ann(a) => {
            let strategy = match args.strategy.unwrap_or(Strategy::Linear) {
                Strategy::Linear => AnnStrategy::Linear,
                Strategy::Grid => AnnStrategy::Grid,
                s => return Err(unsupported(s, kind)),
            };
            let mut counters = CostCounters::default();
            let structure = ann_build(a.data.clone(), a.params.p, strategy, Some(&a.params.r), &mut counters)?;
            let answers = a
                .queries
                .iter()
                .map(|q| structure.query(q, &a.params.r, &a.params.gamma, &mut counters))
                .collect::<Result<Vec<_>, _>>()?;
            let any = answers.contains(&Label::Yes);
            Verdict {
                label: if any { "YES" } else { "NO" },
                witness: None,
                counters,
                extra: Some(("answers", json!(answers.iter().map(|l| l.as_str()).collect::<Vec<_>>()))),
            }
        }
    })
}

fn run_solve(args: SolveArgs) -> CliResult<ExitCode> {
    let instance = parse_instance(&read(&args.input)?)?;
    check_problem(args.problem, &instance)?;
    let verdict = solve(&instance, &args)?;
    write_text(args.out.as_deref(), &pretty(&verdict.to_json()))?;
    match args.expect {
        Some(e) if Label::from(e).as_str() != verdict.label => {
            eprintln!("expected {}, got {}", Label::from(e), verdict.label);
            Ok(ExitCode::from(1))
        }
        _ => Ok(ExitCode::SUCCESS),
    }
}

fn run_bench(args: BenchArgs) -> CliResult<ExitCode> {
    let solver: BenchSolver = args.solver.parse()?;
    let label = Label::from(args.label);
    let problem = match args.problem {
        BenchProblemArg::Bcp => BenchProblem::Bcp {
            dim: args.dim,
            p: args.p,
            label,
        },
        BenchProblemArg::Svp01 | BenchProblemArg::Cvp01 => BenchProblem::Lattice {
            p: args.p,
            label,
            cvp: matches!(args.problem, BenchProblemArg::Cvp01),
        },
        BenchProblemArg::Ksat => {
            let q = parse_rational(&args.density)?;
            let part = |x: &BigInt| {
                usize::try_from(x).map_err(|_| CliError::Usage(format!("bad density '{}'", args.density)))
            };
            BenchProblem::Ksat {
                k: args.k,
                density: (part(q.numer())?, part(q.denom())?),
            }
        }
    };
    let run = bench_scaling(&problem, solver, &args.sizes, &args.seeds, &args.counter)?;
    let mut buf = Vec::new();
    write_csv(&run.rows, &mut buf)?;
    write_text(args.out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))?;
    let fit = &run.fit;
    eprintln!(
        "fit: counter={} slope={:.6} slope_rational={} intercept={:.6} residual={:.6} samples={}",
        fit.counter,
        fit.slope,
        fit.slope_rational(),
        fit.intercept,
        fit.residual,
        fit.samples
    );
    Ok(ExitCode::SUCCESS)
}

fn report_json(r: &GapReport) -> Value {
    json!({
        "yes_max": r.yes_max.to_rational().to_string(),
        "yes_witness": r.yes_witness,
        "no_min": r.no_min.to_rational().to_string(),
        "no_witness": r.no_witness,
        "gap": r.gap.to_string(),
    })
}

fn restriction_json(r: &Restriction) -> Value {
    json!({
        "coordinate": r.coordinate,
        "points": { "f0": r.f0, "f1": r.f1, "g0": r.g0, "g1": r.g1 },
        "d_f1_g1": r.d_f1_g1.to_string(),
        "d_f1_g0": r.d_f1_g0.to_string(),
        "d_f0_g0": r.d_f0_g0.to_string(),
        "d_f0_g1": r.d_f0_g1.to_string(),
        "chain_holds": r.chain_holds(),
    })
}

fn load_gadget(path: &Path) -> CliResult<GadgetTables> {
    let text = String::from_utf8(read(path)?)
        .map_err(|_| CliError::Usage(format!("{}: not UTF-8", path.display())))?;
    Ok(GadgetTables::from_json(&text)?)
}

fn run_gadget(action: GadgetAction) -> CliResult<ExitCode> {
    match action {
        GadgetAction::Gap { input } => {
            let report = gadget_gap(&load_gadget(&input)?)?;
            write_text(None, &pretty(&report_json(&report)))?;
            Ok(ExitCode::SUCCESS)
        }
        GadgetAction::Verify { input } => {
            let cert = verify_barrier(&load_gadget(&input)?)?;
            let mut v = report_json(&cert.report);
            v["holds"] = json!(cert.holds);
            v["counterexample"] = cert.counterexample.as_ref().map(restriction_json).into();
            write_text(None, &pretty(&v))?;
            Ok(if cert.holds { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        GadgetAction::Search {
            d,
            grid,
            scale,
            ambient_dim,
            gadget_out,
        } => {
            let search = search_best_gadget(d, &grid, scale, ambient_dim, &Budget::from_env())?;
            let gadget_text = search.gadget.to_json()?;
            let mut v = report_json(&search.best);
            v["assignments"] = json!(search.assignments);
            v["exceeding_three"] = json!(search.exceeding_three);
            v["gadget"] = serde_json::from_str(&gadget_text).expect("gadget json round-trips");
            write_text(None, &pretty(&v))?;
            if let Some(path) = gadget_out {
                write_text(Some(&path), &gadget_text)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_params(args: ParamsArgs) -> CliResult<ExitCode> {
    let mut out = serde_json::Map::new();
    if let Some(k) = args.k {
        out.insert("k".into(), json!(k));
        out.insert("gamma".into(), json!(implied_gap(k)?.to_string()));
    }
    let batch = [&args.c, &args.delta, &args.delta_prime];
    if args.big_n.is_some() || batch.iter().any(|a| a.is_some()) {
        let (Some(n), Some(c), Some(delta), Some(delta_prime)) =
            (args.big_n, &args.c, &args.delta, &args.delta_prime)
        else {
            return Err(CliError::Usage("batch selection needs --N, --c, --delta and --delta-prime".into()));
        };
        let choice = select_batch_size(n, &parse_rational(c)?, &parse_rational(delta)?, &parse_rational(delta_prime)?)?;
        out.insert(
            "batch".into(),
            json!({
                "N": n,
                "ell": choice.ell,
                "lower_exponent": choice.lower_exponent.to_string(),
                "upper_exponent": choice.upper_exponent.to_string(),
                "preprocessing": choice.preprocessing.to_string(),
                "preprocessing_log2": choice.preprocessing.log2(),
                "query": choice.query.to_string(),
                "query_log2": choice.query.log2(),
            }),
        );
    }
    if out.is_empty() {
        return Err(CliError::Usage("params needs --k or the batch-size options".into()));
    }
    write_text(None, &pretty(&Value::Object(out)))?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Reduce(a) => run_reduce(a),
        Command::Solve(a) => run_solve(a),
        Command::Verify(a) => verify::run(a),
        Command::Bench(a) => run_bench(a),
        Command::Gadget { action } => run_gadget(action),
        Command::Params(a) => run_params(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
