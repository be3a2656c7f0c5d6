use std::fs;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use itertools::Itertools;

use lrc_core::codefile::CodeFile;
use lrc_core::construct::{construct_with, ConstructOptions, Registry};
use lrc_core::linalg::{ColumnSet, Echelon};
use lrc_core::params::Verdict;
use lrc_core::table::Grid;
use lrc_core::verify::{self, DEFAULT_BUDGET};
use lrc_core::{CodeParams, Field};

#[derive(Parser)]
#[command(name = "lrc", version, about = "Optimal locally repairable codes: classify, construct, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether an optimal (r, delta) code of length n and dimension k exists.
    Classify { n: usize, k: usize, r: usize, delta: usize },
    /// Existence grid over ranges of r and k.
    Table {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: usize,
        /// Inclusive range, e.g. 2..11
        #[arg(long, value_parser = parse_range)]
        r: RangeInclusive<usize>,
        #[arg(long, value_parser = parse_range)]
        k: RangeInclusive<usize>,
    },
    /// Build an optimal code and write it as JSON.
    Construct {
        n: usize,
        k: usize,
        r: usize,
        delta: usize,
        /// P for a prime field, or P,E[,POLY] for GF(2^E)
        #[arg(long, value_parser = parse_field)]
        field: Option<Field>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent
        #[arg(long)]
        out: Option<PathBuf>,
        /// Force a registered construction instead of the classifier's choice
        #[arg(long)]
        method: Option<String>,
    },
    /// Check locality, minimum distance and optimality of a code file.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Walk through the n=12, k=5, r=2, delta=3 storage example.
    Demo,
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected A..B, got '{s}'"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().trim_start_matches('=').parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok(a..=b)
}

fn parse_field(s: &str) -> std::result::Result<Field, String> {
    let parts: Vec<u64> =
        s.split(',').map(|x| x.trim().parse::<u64>().map_err(|e| format!("'{x}': {e}"))).collect::<Result<_, _>>()?;
    let field = match parts.as_slice() {
        [p] => Field::prime(*p),
        [p, e] => Field::new(*p, *e as u32, None),
        [p, e, poly] => Field::new(*p, *e as u32, Some(*poly)),
        _ => return Err("expected P or P,E[,POLY]".into()),
    };
    field.map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Classify { n, k, r, delta } => classify(n, k, r, delta),
        Command::Table { n, delta, r, k } => {
            print!("{}", Grid::classify(n, delta, r, k).render());
            Ok(0)
        }
        Command::Construct { n, k, r, delta, field, seed, out, method } => {
            let params = CodeParams::new(n, k, r, delta)?;
            let opts = ConstructOptions::seeded(seed);
            let code = construct_with(&Registry::default(), &params, method.as_deref(), field, opts)?;
            eprintln!(
                "constructed {params} over {} via {}, d = {}",
                code.field, code.method, code.claimed_d
            );
            let json = CodeFile::new(code, seed).to_json()?;
            match out {
                Some(path) => fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?,
                None => println!("{json}"),
            }
            Ok(0)
        }
        Command::Verify { file, budget } => verify_file(&file, budget),
        Command::Demo => demo(),
    }
}

fn classify(n: usize, k: usize, r: usize, delta: usize) -> Result<u8> {
    let params = CodeParams::new(n, k, r, delta)?;
    let c = params.classify();
    println!("{c}");
    Ok(match c.verdict {
        Verdict::ExistsMds | Verdict::Exists { .. } => 0,
        Verdict::NotExists(_) => 2,
        Verdict::Unknown(_) => 3,
    })
}

fn fmt_set(s: &[usize]) -> String {
    format!("{{{}}}", s.iter().join(","))
}

fn verify_file(path: &PathBuf, budget: u128) -> Result<u8> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = CodeFile::from_json(&text)?;
    let code = &file.code;
    let p = code.params;
    println!("code {p} over {}, claimed d = {}", code.field, code.claimed_d);

    let loc = verify::check_locality(code)?;
    for g in &loc.per_group {
        let status = if g.subsets_ok && g.rank <= p.r { "ok" } else { "FAIL" };
        let detail = g.failing_subset.as_ref().map(|s| format!(", short subset {}", fmt_set(s))).unwrap_or_default();
        println!("  group {} {}: rank {}{detail} [{status}]", g.group, fmt_set(&code.structure.groups[g.group - 1]), g.rank);
    }
    println!("locality: {}", if loc.overall { "PASS" } else { "FAIL" });

    match verify::min_distance(&code.generator, budget) {
        Ok(rep) => println!("minimum distance: {} ({})", rep.d, rep.method),
        Err(e) => println!("minimum distance: not computed ({e})"),
    }
    let mut ok = loc.overall;
    match verify::certify_optimal(code, budget) {
        Ok(rep) => {
            println!(
                "optimal: {} (all {} subsets of size {} have rank {}: {})",
                if rep.optimal { "YES" } else { "NO" },
                rep.subsets_checked,
                rep.subset_size,
                p.k,
                rep.witness.as_ref().map(|w| format!("no, {} is short", fmt_set(w))).unwrap_or_else(|| "yes".into())
            );
            ok &= rep.optimal;
        }
        Err(e) => println!("optimal: not certified ({e})"),
    }
    if p.k % p.r == 0 && p.r < p.k {
        let rep = verify::check_structure_theorem(code)?;
        println!("structure theorem: {}", if rep.holds { "holds" } else { "violated" });
        for v in &rep.violations {
            println!("  {v}");
        }
    }
    Ok(if ok { 0 } else { 2 })
}

fn demo() -> Result<u8> {
    let params = CodeParams::new(12, 5, 2, 3)?;
    let code = construct_with(&Registry::default(), &params, None, None, ConstructOptions::seeded(0))?;
    let g = &code.generator;
    println!("A file is split into k = 5 packets and stored as n = 12 coded symbols over {}.", code.field);
    println!("Repair groups (r = 2, delta = 3):");
    for group in &code.structure.groups {
        println!("  {}", fmt_set(group));
    }
    let d = verify::min_distance(g, DEFAULT_BUDGET)?.d;
    println!("d = {d} (the bound n-k+1-(ceil(k/r)-1)(delta-1) = {})", params.distance_bound()?);

    let in_span = |target: usize, from: &[usize]| {
        let mut ech = Echelon::new(g.field(), g.rows());
        for &c in from {
            ech.insert(&g.coord_column(c));
        }
        ech.contains(&g.coord_column(target))
    };
    println!("Local repair: each symbol from any 2 other symbols of its group");
    for group in &code.structure.groups {
        let mut all = true;
        for &i in group {
            let others: Vec<usize> = group.iter().copied().filter(|&c| c != i).collect();
            all &= others.iter().copied().combinations(2).all(|pair| in_span(i, &pair));
        }
        println!("  group {}: {}", fmt_set(group), if all { "every symbol recoverable" } else { "FAILED" });
    }
    println!("  symbol 1 from {{2,3}}: {}", if in_span(1, &[2, 3]) { "recoverable" } else { "not recoverable" });

    let survivors = [1, 3, 7, 8, 10];
    let rank = g.rank(Some(&ColumnSet::new(survivors.to_vec())?))?;
    println!(
        "Whole file from {} (at most 2 symbols per group): rank {rank} of 5, {}",
        fmt_set(&survivors),
        if rank == 5 { "recoverable" } else { "not recoverable" }
    );
    if rank != 5 || d != 4 {
        bail!("demo code does not behave as expected");
    }
    Ok(0)
}
