use std::collections::BTreeSet;
use std::process::ExitCode;

use clap::{Args, ValueEnum};

use gapkit::barrier::{verify_barrier, GadgetTables, Space};
use gapkit::instances::{
    generate_bcp, generate_cnf, generate_lattice01, BcpGen, CnfGen, GapParams, Label,
    Lattice01Instance, LatticeGen, SetFamilyInstance,
};
use gapkit::metric::{distance_value, ExactPoint, Gamma, GapSide, NormKind};
use gapkit::oracles::{oracle_closest_pair, oracle_lattice01, oracle_sat};
use gapkit::reductions::{
    embed_subsetquery_to_bcp, reduce_ksat_to_bisq, reduce_lattice01_to_bcp, solve_bcp_via_ann,
    EmbeddingOrientation,
};
use gapkit::rng::SeededRng;
use gapkit::solvers::{bcp_solve, svp01_mitm, AnnStrategy, BcpStrategy};

use crate::CliResult;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Claim {
    /// Difference sets of the split cover every nonzero {0,1} combination.
    SetIdentity,
    /// Meet-in-the-middle agrees with the lattice oracle.
    Mitm,
    /// The subset-query embedding is two-valued with gap 3.
    Embedding,
    /// k-SAT through split-and-list and the embedding agrees with the SAT oracle.
    Pipeline,
    /// Batched ANN closest pair agrees with the oracle for every batch size.
    Batching,
    /// Random ℓ∞ gadgets never separate by more than 3.
    Barrier,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    claim: Claim,
    /// Size parameter: rank, variables, points per side, universe size or
    /// gadget dimension depending on the claim.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Number of seeded cases.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
}

type Check = Result<(), String>;

fn set_identity(n: usize, seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let inst = loop {
        let basis = (0..n)
            .map(|_| ExactPoint::from_i64(&(0..n).map(|_| rng.range_inclusive(-9, 9)).collect::<Vec<_>>()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let params = GapParams::new(NormKind::LInf, 1, 1, Gamma::integer(2).unwrap()).unwrap();
        if let Ok(inst) = Lattice01Instance::new(params, basis, None) {
            break inst;
        }
    };
    let out = reduce_lattice01_to_bcp(&inst).map_err(|e| e.to_string())?;
    let produced: BTreeSet<ExactPoint> = out
        .instances
        .iter()
        .flat_map(|b| b.a.iter().flat_map(move |x| b.b.iter().map(move |y| x.sub(y).unwrap())))
        .collect();
    let expected: BTreeSet<ExactPoint> = (1u64..1 << n)
        .map(|mask| {
            let alpha: Vec<u8> = (0..n).map(|i| (mask >> i & 1) as u8).collect();
            inst.combination(&alpha).unwrap()
        })
        .collect();
    if produced == expected {
        Ok(())
    } else {
        Err(format!("difference set differs ({} vs {} points)", produced.len(), expected.len()))
    }
}

fn mitm(n: usize, seed: u64) -> Check {
    let p = NormKind::ALL[seed as usize % 3];
    let label = if seed.is_multiple_of(2) { Label::Yes } else { Label::No };
    let mut g = LatticeGen::new(n, p, label);
    g.cvp = seed % 4 >= 2;
    let inst = generate_lattice01(&g, seed).map_err(|e| e.to_string())?;
    let oracle = oracle_lattice01(&inst).map_err(|e| e.to_string())?;
    let solved = svp01_mitm(&inst, BcpStrategy::Brute).map_err(|e| e.to_string())?;
    if (oracle.label == GapSide::Yes) == (solved.label == Label::Yes) {
        Ok(())
    } else {
        Err(format!("oracle {}, mitm {}", oracle.label.as_str(), solved.label))
    }
}

fn embedding(d: usize, seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let mask = |rng: &mut SeededRng| rng.below(1 << d);
    let supersets: Vec<u64> = (0..16).map(|_| mask(&mut rng)).collect();
    let subsets: Vec<u64> = (0..16).map(|_| mask(&mut rng) & mask(&mut rng)).collect();
    let to_bits = |m: &u64| {
        let mut s = fixedbitset::FixedBitSet::with_capacity(d);
        (0..d).filter(|i| m >> i & 1 == 1).for_each(|i| s.insert(i));
        s
    };
    let inst = SetFamilyInstance {
        d,
        supersets: supersets.iter().map(to_bits).collect(),
        subsets: subsets.iter().map(to_bits).collect(),
    };
    let bcp = embed_subsetquery_to_bcp(&inst, EmbeddingOrientation::Corrected).map_err(|e| e.to_string())?;
    for (j, s) in supersets.iter().enumerate() {
        for (i, t) in subsets.iter().enumerate() {
            let dist = distance_value(&bcp.a[j], &bcp.b[i], NormKind::LInf).map_err(|e| e.to_string())?;
            let expected = if t & !s == 0 { 1 } else { 3 };
            if dist != expected.into() {
                return Err(format!("S = {s:b}, T = {t:b}: distance {dist}/3"));
            }
        }
    }
    Ok(())
}

fn pipeline(n: usize, seed: u64) -> Check {
    let cnf = generate_cnf(&CnfGen { n, m: (n * 426).div_ceil(100), k: 3 }, seed).map_err(|e| e.to_string())?;
    let family = reduce_ksat_to_bisq(&cnf).map_err(|e| e.to_string())?;
    let bcp = embed_subsetquery_to_bcp(&family.instances[0], EmbeddingOrientation::Corrected)
        .map_err(|e| e.to_string())?;
    let solved = bcp_solve(&bcp, BcpStrategy::Brute).map_err(|e| e.to_string())?;
    let oracle = oracle_sat(&cnf).map_err(|e| e.to_string())?;
    if (oracle.label == GapSide::Yes) == (solved.label == Label::Yes) {
        Ok(())
    } else {
        Err(format!("oracle {}, pipeline {}", oracle.label.as_str(), solved.label))
    }
}

fn batching(n: usize, seed: u64) -> Check {
    let label = if seed.is_multiple_of(2) { Label::Yes } else { Label::No };
    let inst = generate_bcp(&BcpGen::new(n, 4, NormKind::LInf, label), seed).map_err(|e| e.to_string())?;
    let expected = if oracle_closest_pair(&inst).label == GapSide::Yes { Label::Yes } else { Label::No };
    for ell in 1..=n {
        for backend in [AnnStrategy::Linear, AnnStrategy::Grid] {
            let out = solve_bcp_via_ann(&inst, &backend, ell).map_err(|e| e.to_string())?;
            let batches = n.div_ceil(ell) as u64;
            if out.label != expected
                || out.counters.structure_builds != batches
                || out.counters.structure_queries != batches * n as u64
            {
                return Err(format!("ℓ = {ell}, {backend:?}: {} with {:?}", out.label, out.counters));
            }
        }
    }
    Ok(())
}

fn barrier(d: usize, seed: u64) -> Check {
    let mut rng = SeededRng::new(seed);
    let size = 1usize << d;
    let points = (0..2 * size)
        .map(|_| ExactPoint::from_i64(&[rng.range_inclusive(0, 9), rng.range_inclusive(0, 9)]))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let g = GadgetTables::new(d, (0..size).collect(), (size..2 * size).collect(), Space::LInf { scale: 1, points })
        .map_err(|e| e.to_string())?;
    let cert = verify_barrier(&g).map_err(|e| e.to_string())?;
    if cert.holds {
        Ok(())
    } else {
        Err(format!("gap {}", cert.report.gap))
    }
}

pub fn run(args: VerifyArgs) -> CliResult<ExitCode> {
    let check: fn(usize, u64) -> Check = match args.claim {
        Claim::SetIdentity => set_identity,
        Claim::Mitm => mitm,
        Claim::Embedding => embedding,
        Claim::Pipeline => pipeline,
        Claim::Batching => batching,
        Claim::Barrier => barrier,
    };
    let name = args.claim.to_possible_value().expect("no skipped variants");
    let mut failures = Vec::new();
    for seed in 0..args.seeds {
        if let Err(why) = check(args.n, seed) {
            failures.push(format!("seed {seed}: {why}"));
        }
    }
    if failures.is_empty() {
        println!("claim {}: PASS ({} cases, n = {})", name.get_name(), args.seeds, args.n);
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "claim {}: FAIL ({} of {} cases, n = {})",
            name.get_name(),
            failures.len(),
            args.seeds,
            args.n
        );
        for f in failures.iter().take(5) {
            println!("  {f}");
        }
        Ok(ExitCode::from(1))
    }
}
