//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lrc_core::construct::{
    construct_with, sample_core, ConstructOptions, ExtensionState, InvariantCheck, LrcCode, Registry,
};
use lrc_core::cores::{lambda_cores, omega0, CoreQuery};
use lrc_core::covers::{deficiency_witness, hub_frame, paired_frame, remainder_partition, uniform_partition, CoverStructure};
use lrc_core::gf::{Field, Prefer};
use lrc_core::linalg::{Echelon, Matrix};
use lrc_core::params::binomial_u128;
use lrc_core::table::Grid;
use lrc_core::verify::{
    certify_optimal, certify_optimal_of, check_locality, check_locality_of, min_distance, DistanceMethod,
    RankCriterion, WeightEnumeration, DEFAULT_BUDGET,
};
use lrc_core::{CodeParams, Error};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn params(n: usize, k: usize, r: usize, delta: usize) -> CodeParams {
    CodeParams::new(n, k, r, delta).expect("valid parameters")
}

fn build(p: &CodeParams, method: Option<&str>, q: u64, seed: u64) -> Result<LrcCode, String> {
    let field = Field::prime(q).map_err(|e| e.to_string())?;
    construct_with(&Registry::default(), p, method, Some(field), ConstructOptions::seeded(seed)).map_err(|e| e.to_string())
}

/// Certifies `code` and checks both the certificate and the exact distance.
fn certified(code: &LrcCode, d: usize, subsets: u128) -> Result<(), String> {
    let cert = certify_optimal(code, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(cert.optimal, format!("not optimal: locality {} witness {:?}", cert.locality_ok, cert.witness))?;
    ensure(cert.subsets_checked == subsets, format!("checked {} subsets, expected {subsets}", cert.subsets_checked))?;
    let dist = min_distance(&code.generator, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(dist.d == d && code.claimed_d == d, format!("d = {} (claimed {}), expected {d}", dist.d, code.claimed_d))
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    ensure(start.elapsed() < limit, format!("took {:?}, limit {limit:?}", start.elapsed()))
}

fn c1_example_matrix() -> Outcome {
    let start = Instant::now();
    let f = Field::new(2, 2, Some(0b111)).map_err(|e| e.to_string())?;
    // α = 2 and α² = α + 1 = 3 under x² + x + 1
    let g = Matrix::from_rows(f, &[vec![1, 0, 1, 0, 1, 1], vec![0, 1, 1, 0, 2, 2], vec![0, 0, 0, 1, 1, 2]])
        .map_err(|e| e.to_string())?;
    ensure(f.mul(2, 2) == 3, "alpha^2 != 1 + alpha")?;
    let groups = vec![vec![1, 2, 3], vec![4, 5, 6]];
    ensure(check_locality_of(&g, &groups, 2, 2).map_err(|e| e.to_string())?.overall, "locality fails")?;
    let d = min_distance(&g, DEFAULT_BUDGET).map_err(|e| e.to_string())?.d;
    let bound = params(6, 3, 2, 2).distance_bound().map_err(|e| e.to_string())?;
    ensure(d == 3 && bound == 3, format!("d = {d}, bound = {bound}"))?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("d = {d} = bound"))
}

fn c2_uniform_seeds() -> Outcome {
    let start = Instant::now();
    let p = params(6, 3, 2, 2);
    let mut ok = 0;
    for seed in 0..100 {
        let code = build(&p, None, 17, seed)?;
        ensure(code.method == "Algorithm1-uniform", format!("method {}", code.method))?;
        certified(&code, 3, 15).map_err(|e| format!("seed {seed}: {e}"))?;
        ok += 1;
    }
    within(Duration::from_secs(10), start)?;
    Ok(format!("{ok}/100 seeds optimal with d = 3"))
}

fn c3_uniform_fig1() -> Outcome {
    let start = Instant::now();
    let code = build(&params(12, 5, 2, 3), None, 499, 0)?;
    certified(&code, 4, 220)?;
    within(Duration::from_secs(10), start)?;
    Ok("d = 4, 220 subsets of size 9 have rank 5".into())
}

fn c4_remainder() -> Outcome {
    let start = Instant::now();
    let code = build(&params(11, 5, 2, 2), None, 331, 0)?;
    ensure(code.method == "Algorithm1-remainder", format!("method {}", code.method))?;
    certified(&code, 5, binomial_u128(11, 7))?;
    within(Duration::from_secs(10), start)?;
    Ok("d = 5 via remainder partition".into())
}

fn c5_hub() -> Outcome {
    let start = Instant::now();
    let code = build(&params(8, 3, 2, 2), Some("Algorithm2-hub"), 29, 0)?;
    ensure(code.structure.hubs == vec![1], "hub frame not used")?;
    certified(&code, 5, 70)?;
    within(Duration::from_secs(5), start)?;
    Ok("d = 5, 70 subsets of size 4 have rank 3".into())
}

fn c6_paired() -> Outcome {
    let start = Instant::now();
    let code = build(&params(10, 5, 2, 2), None, 211, 0)?;
    ensure(code.method == "Algorithm2-paired", format!("method {}", code.method))?;
    certified(&code, 4, 120)?;
    within(Duration::from_secs(10), start)?;
    Ok("d = 4, 120 subsets of size 7 have rank 5".into())
}

fn c7_table() -> Outcome {
    let start = Instant::now();
    let grid = Grid::classify(60, 5, 2..=11, 11..=20);
    let mut expected: Vec<(usize, usize, &str)> = Vec::new();
    for r in [2, 6, 8, 11] {
        expected.extend((11..=20).map(|k| (r, k, "E_M")));
    }
    expected.extend([
        (3, 11, "N11"),
        (3, 12, "N10"),
        (3, 13, "E27"),
        (4, 11, "E27"),
        (4, 12, "N10"),
        (5, 11, "E16"),
        (5, 15, "N10"),
        (7, 14, "N10"),
        (9, 11, "E16"),
        (9, 18, "N10"),
        (10, 20, "N10"),
    ]);
    expected.extend((11..=19).map(|k| (10, k, "~")));
    let wrong: Vec<String> = expected
        .iter()
        .filter(|&&(r, k, tag)| grid.tag(r, k) != Some(tag))
        .map(|&(r, k, tag)| format!("({r},{k}) expected {tag} got {:?}", grid.tag(r, k)))
        .collect();
    ensure(wrong.is_empty(), wrong.join("; "))?;
    within(Duration::from_secs(1), start)?;
    Ok(format!("{} cells match; {} other cells differ (see table footnote)", expected.len(), grid.discrepancies().len()))
}

fn c8_witness() -> Outcome {
    let start = Instant::now();
    let family = vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9], vec![10, 11, 12], vec![1, 5, 13], vec![5, 8, 13]];
    let j = deficiency_witness(&family, 13, 7, 2, 2).map_err(|e| e.to_string())?.ok_or("no witness")?;
    let union: std::collections::BTreeSet<usize> = j.iter().flat_map(|&i| family[i - 1].iter().copied()).collect();
    ensure(j.len() == 4 && union.len() == 10, format!("J = {j:?}, union {}", union.len()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut families = 0;
    while families < 200 {
        let t = rng.gen_range(5..=8);
        let fam: Vec<Vec<usize>> = (0..t)
            .map(|_| {
                let mut s = (1..=13).collect::<Vec<usize>>().choose_multiple(&mut rng, 3).copied().collect::<Vec<_>>();
                s.sort_unstable();
                s
            })
            .collect();
        let covered: std::collections::BTreeSet<usize> = fam.iter().flatten().copied().collect();
        if covered.len() < 13 {
            continue;
        }
        families += 1;
        let w = deficiency_witness(&fam, 13, 7, 2, 2).map_err(|e| e.to_string())?;
        ensure(w.is_some(), format!("no witness for {fam:?}"))?;
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("J = {j:?} with union 10 < 11; 200/200 random covers deficient"))
}

fn c9_oracles() -> Outcome {
    let f7 = Field::prime(7).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut compared, mut disagreements) = (0, 0);
    while compared < 200 {
        let k = rng.gen_range(1..=4);
        let n = rng.gen_range(k..=8);
        let rows: Vec<Vec<u64>> = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..7)).collect()).collect();
        let m = Matrix::from_rows(f7, &rows).map_err(|e| e.to_string())?;
        let (w, r) = match (WeightEnumeration.distance(&m, DEFAULT_BUDGET), RankCriterion.distance(&m, DEFAULT_BUDGET)) {
            (Err(Error::RankDeficient { .. }), Err(Error::RankDeficient { .. })) => continue,
            (w, r) => (w.map_err(|e| e.to_string())?, r.map_err(|e| e.to_string())?),
        };
        compared += 1;
        if w.d != r.d {
            disagreements += 1;
        }
    }
    ensure(disagreements == 0, format!("{disagreements} disagreements"))?;
    Ok(format!("{compared} codes, 0 disagreements"))
}

fn brute_lambda(q: &CoreQuery, ground: &[usize], lambda: usize, k: usize) -> Vec<Vec<usize>> {
    ground
        .iter()
        .copied()
        .combinations(k - 1)
        .filter(|s0| {
            let mut s = s0.clone();
            s.push(lambda);
            q.is_core(&s)
        })
        .collect()
}

fn c10_invariants() -> Outcome {
    let cases: Vec<(CodeParams, Option<&str>, u64)> = vec![
        (params(6, 3, 2, 2), None, 17),
        (params(12, 5, 2, 3), None, 499),
        (params(11, 5, 2, 2), None, 331),
        (params(8, 3, 2, 2), Some("Algorithm2-hub"), 29),
        (params(10, 5, 2, 2), None, 211),
        (params(12, 4, 2, 3), None, 223),
        (params(9, 4, 2, 2), None, 89),
    ];
    let mut steps = 0;
    for (p, method, q) in &cases {
        let strategy = match method {
            Some(m) => Registry::default().get(m).map_err(|e| e.to_string())?.structure(p),
            None => Registry::default().select(p).map_err(|e| e.to_string())?.structure(p),
        }
        .map_err(|e| e.to_string())?;
        let field = Field::prime(*q).map_err(|e| e.to_string())?;
        let opts = ConstructOptions { seed: 0, invariant: InvariantCheck::Full };
        let mut state = ExtensionState::new(&strategy, p, field, opts).map_err(|e| e.to_string())?;
        while state.step().map_err(|e| format!("{p}: {e}"))?.is_some() {
            steps += 1;
        }
    }

    let structures: Vec<(CoverStructure, usize, usize)> = vec![
        (uniform_partition(12, 2, 3).unwrap(), 3, 5),
        (remainder_partition(11, 2, 2, 5).unwrap(), 2, 5),
        (hub_frame(8, 2, 2).unwrap(), 2, 3),
        (paired_frame(10, 2, 2).unwrap(), 2, 5),
        (hub_frame(13, 3, 2).unwrap(), 2, 4),
    ];
    let mut lambdas = 0;
    for (s, delta, k) in &structures {
        let q = CoreQuery::new(s, *delta, *k);
        let mut ground = omega0(&q).indices;
        let rest: Vec<usize> = (1..=s.n).filter(|c| !ground.contains(c)).collect();
        for lambda in rest {
            if ground.len() > 14 {
                break;
            }
            let fast: Vec<Vec<usize>> = lambda_cores(&q, &ground, lambda).collect();
            ensure(fast == brute_lambda(&q, &ground, lambda, *k), format!("Lambda mismatch at {lambda} in {s:?}"))?;
            lambdas += 1;
            ground.push(lambda);
            ground.sort_unstable();
        }
    }
    Ok(format!("{steps} extension steps fully rechecked; {lambdas} Lambda sets match brute force"))
}

fn frame37() -> CoverStructure {
    let groups = vec![
        vec![1, 2, 3, 4, 5],
        vec![1, 6, 7, 8, 9],
        vec![1, 10, 11, 12, 13],
        vec![14, 15, 16, 17, 18],
        vec![14, 19, 20, 21, 22],
        (23..=27).collect(),
        (28..=32).collect(),
        (33..=37).collect(),
    ];
    CoverStructure::frame(37, groups, vec![vec![1, 2, 3], vec![4, 5]], vec![6, 7, 8], vec![1, 14])
}

fn c11_large_frame() -> Outcome {
    let start = Instant::now();
    let p = params(37, 7, 3, 3);
    let bound = binomial_u128(37, 6) as u64;
    let field = Field::at_least(bound, Prefer::Prime).map_err(|e| e.to_string())?;
    let frame = frame37();
    let opts = ConstructOptions { seed: 0, invariant: InvariantCheck::Off };
    let mut state = ExtensionState::new(&frame, &p, field, opts).map_err(|e| e.to_string())?;
    ensure(state.omega().len() == 21, format!("|Omega0| = {}", state.omega().len()))?;
    while state.step().map_err(|e| e.to_string())?.is_some() {}
    let (g, _) = state.finish();
    let built = start.elapsed();

    let q = CoreQuery::new(&frame, 3, 7);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut order: Vec<usize> = (1..=37).collect();
    let mut sampled = 0;
    while sampled < 10_000 {
        order.shuffle(&mut rng);
        let Some(core) = sample_core(&q, &order, 7) else { continue };
        let mut ech = Echelon::new(field, 7);
        ensure(core.iter().all(|&c| ech.insert(&g.coord_column(c))), format!("core {core:?} dependent"))?;
        sampled += 1;
    }
    ensure(check_locality_of(&g, &frame.groups, 3, 3).map_err(|e| e.to_string())?.overall, "locality fails")?;
    let full = certify_optimal_of(&g, &frame.groups, &p, DEFAULT_BUDGET);
    ensure(matches!(full, Err(Error::BudgetExceeded { .. })), "full certification unexpectedly in budget")?;
    let _ = check_locality;
    Ok(format!(
        "built over {} in {:.1?}; 10^4 random cores independent; locality ok; full certification out of budget (C(37,11) = {} subsets)",
        field,
        built,
        binomial_u128(37, 11)
    ))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("1 example GF(4) matrix: locality and d = 3", c1_example_matrix),
        ("2 uniform partition (6,3,2,2) over GF(17), 100 seeds", c2_uniform_seeds),
        ("3 uniform partition (12,5,2,3) over GF(499)", c3_uniform_fig1),
        ("4 remainder partition (11,5,2,2) over GF(331)", c4_remainder),
        ("5 hub frame (8,3,2,2) over GF(29)", c5_hub),
        ("6 paired frame (10,5,2,2) over GF(211)", c6_paired),
        ("7 n=60, delta=5 existence grid", c7_table),
        ("8 deficiency witnesses for (13,7,2,2)", c8_witness),
        ("9 weight enumeration vs rank criterion", c9_oracles),
        ("10 loop invariant and Lambda enumeration", c10_invariants),
        ("11 n=37 frame at desk scale", c11_large_frame),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  [{name}] {detail} ({secs:.2}s)"),
            Err(why) => {
                failed += 1;
                println!("FAIL  [{name}] {why} ({secs:.2}s)");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
