//! Independent checks on a generator matrix: locality, exact minimum
//! distance, optimality against the distance bound, and the MDS property.
//!
//! Nothing here uses the construction's bookkeeping; every verdict is
//! recomputed from the matrix and the claimed repair groups. Coordinates in
//! reports are 1-based.

use serde::Serialize;

use crate::construct::LrcCode;
use crate::error::{Error, Result};
use crate::linalg::{Echelon, Matrix};
use crate::params::{binomial_u128, CodeParams};

/// Default ceiling on enumerated messages or column subsets.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupLocality {
    pub group: usize,
    pub rank: usize,
    /// Every (|S_i|−δ+1)-subset has the group's rank.
    pub subsets_ok: bool,
    pub failing_subset: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalityReport {
    pub per_group: Vec<GroupLocality>,
    pub overall: bool,
}

fn columns(m: &Matrix) -> Vec<Vec<u32>> {
    m.columns()
}

fn rank_of(m: &Matrix, cols: &[Vec<u32>], set: &[usize]) -> usize {
    let mut ech = Echelon::new(m.field(), m.rows());
    set.iter().filter(|&&c| ech.insert(&cols[c - 1])).count()
}

/// Locality check in rank form: each group has rank ≤ r and every subset of
/// |S_i|−δ+1 of its columns already spans the group.
pub fn check_locality_of(m: &Matrix, groups: &[Vec<usize>], r: usize, delta: usize) -> Result<LocalityReport> {
    let cols = columns(m);
    let mut per_group = Vec::with_capacity(groups.len());
    for (i, g) in groups.iter().enumerate() {
        if let Some(&bad) = g.iter().find(|&&c| c == 0 || c > m.cols()) {
            return Err(Error::StructureMismatch(format!("group {} names column {bad} of {}", i + 1, m.cols())));
        }
        let rank = rank_of(m, &cols, g);
        let size = (g.len() + 1).saturating_sub(delta);
        let mut failing_subset = None;
        let mut sorted = g.clone();
        sorted.sort_unstable();
        for subset in itertools::Itertools::combinations(sorted.iter().copied(), size) {
            if rank_of(m, &cols, &subset) != rank {
                failing_subset = Some(subset);
                break;
            }
        }
        per_group.push(GroupLocality { group: i + 1, rank, subsets_ok: failing_subset.is_none(), failing_subset });
    }
    let overall = per_group.iter().all(|g| g.subsets_ok && g.rank <= r);
    Ok(LocalityReport { per_group, overall })
}

pub fn check_locality(code: &LrcCode) -> Result<LocalityReport> {
    check_locality_of(&code.generator, &code.structure.groups, code.params.r, code.params.delta)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// A codeword of minimum weight.
    Codeword(Vec<u32>),
    /// A largest column set of rank below k; its size is n − d.
    Subset(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    pub d: usize,
    pub method: &'static str,
    pub witness: Witness,
}

/// A way of computing the exact minimum distance of a full-rank generator.
pub trait DistanceMethod {
    fn name(&self) -> &'static str;
    /// Work units the method needs for `m`, for comparison with a budget.
    fn cost(&self, m: &Matrix) -> u128;
    fn distance(&self, m: &Matrix, budget: u128) -> Result<DistanceReport>;
}

/// Minimum weight over all nonzero messages, one per projective point.
pub struct WeightEnumeration;

/// n minus the size of the largest column set of rank below k.
pub struct RankCriterion;

fn require_full_rank(m: &Matrix) -> Result<()> {
    let rank = m.rank(None)?;
    if rank < m.rows() {
        return Err(Error::RankDeficient { rank, k: m.rows() });
    }
    Ok(())
}

impl DistanceMethod for WeightEnumeration {
    fn name(&self) -> &'static str {
        "weight-enumeration"
    }

    fn cost(&self, m: &Matrix) -> u128 {
        (m.field().order() as u128).checked_pow(m.rows() as u32).unwrap_or(u128::MAX)
    }

    fn distance(&self, m: &Matrix, budget: u128) -> Result<DistanceReport> {
        require_full_rank(m)?;
        let needed = self.cost(m);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let f = m.field();
        let (k, n) = (m.rows(), m.cols());
        let q = f.order() as u32;
        let weight = |cw: &[u32]| cw.iter().filter(|&&x| x != 0).count();
        let mut best: Option<(usize, Vec<u32>)> = None;
        let add_scaled = |cw: &mut [u32], row: &[u32], c: u32| {
            for (x, &y) in cw.iter_mut().zip(row) {
                *x = f.add(*x, f.mul(c, y));
            }
        };
        // messages (0,…,0,1,*,…,*): leading coordinate at `lead`, free digits after it
        for lead in 0..k {
            let mut cw = m.row(lead).to_vec();
            let mut digits = vec![0u32; k - lead - 1];
            loop {
                let w = weight(&cw);
                if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                    best = Some((w, cw.clone()));
                }
                // odometer, last digit fastest; codeword tracks the message
                let mut i = digits.len();
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    let old = digits[i];
                    let new = if old + 1 == q { 0 } else { old + 1 };
                    digits[i] = new;
                    add_scaled(&mut cw, m.row(lead + 1 + i), f.sub(new, old));
                    if new != 0 {
                        done = false;
                        break;
                    }
                }
                if done {
                    break;
                }
            }
        }
        let (d, cw) = best.expect("k >= 1");
        debug_assert_eq!(cw.len(), n);
        Ok(DistanceReport { d, method: self.name(), witness: Witness::Codeword(cw) })
    }
}

/// Depth-first search for an s-subset of rank < k; prunes prefixes that reach rank k.
fn deficient_subset(
    cols: &[Vec<u32>],
    ech: &mut Echelon,
    s: usize,
    start: usize,
    prefix: &mut Vec<usize>,
) -> bool {
    if prefix.len() == s {
        return true;
    }
    let n = cols.len();
    for j in start..n {
        if n - j < s - prefix.len() {
            break;
        }
        let raised = ech.insert(&cols[j]);
        if ech.rank() < ech.dim() {
            prefix.push(j + 1);
            if deficient_subset(cols, ech, s, j + 1, prefix) {
                return true;
            }
            prefix.pop();
        }
        if raised {
            ech.truncate(ech.rank() - 1);
        }
    }
    false
}

impl DistanceMethod for RankCriterion {
    fn name(&self) -> &'static str {
        "rank-criterion"
    }

    /// Subsets of the largest size the search may have to scan.
    fn cost(&self, m: &Matrix) -> u128 {
        let (k, n) = (m.rows(), m.cols());
        (k.saturating_sub(1)..n).map(|s| binomial_u128(n, s)).max().unwrap_or(1)
    }

    fn distance(&self, m: &Matrix, budget: u128) -> Result<DistanceReport> {
        require_full_rank(m)?;
        let cols = columns(m);
        let (k, n) = (m.rows(), m.cols());
        for s in (k - 1..n).rev() {
            let needed = binomial_u128(n, s);
            if needed > budget {
                return Err(Error::BudgetExceeded { needed, budget });
            }
            let mut ech = Echelon::new(m.field(), k);
            let mut prefix = Vec::with_capacity(s);
            if deficient_subset(&cols, &mut ech, s, 0, &mut prefix) {
                return Ok(DistanceReport { d: n - s, method: self.name(), witness: Witness::Subset(prefix) });
            }
        }
        unreachable!("any k-1 columns have rank below k")
    }
}

/// Exact minimum distance: weight enumeration when q^k fits the budget,
/// otherwise the rank criterion.
pub fn min_distance(m: &Matrix, budget: u128) -> Result<DistanceReport> {
    if WeightEnumeration.cost(m) <= budget {
        WeightEnumeration.distance(m, budget)
    } else {
        RankCriterion.distance(m, budget)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OptimalityReport {
    pub optimal: bool,
    pub locality_ok: bool,
    pub bound_d: usize,
    /// n − d + 1 for d the bound; every subset of this size must have rank k.
    pub subset_size: usize,
    pub subsets_checked: u128,
    pub witness: Option<Vec<usize>>,
}

struct Certify<'c> {
    cols: &'c [Vec<u32>],
    size: usize,
    checked: u128,
}

impl Certify<'_> {
    // first (lexicographic) `size`-subset of rank < k extending `prefix`
    fn search(&mut self, ech: &mut Echelon, start: usize, prefix: &mut Vec<usize>) -> Option<Vec<usize>> {
        let n = self.cols.len();
        let left = self.size - prefix.len();
        if ech.rank() == ech.dim() {
            self.checked += binomial_u128(n - start, left);
            return None;
        }
        if ech.rank() + left < ech.dim() {
            let mut w = prefix.clone();
            w.extend(start + 1..=start + left);
            return Some(w);
        }
        for j in start..=n - left {
            let raised = ech.insert(&self.cols[j]);
            prefix.push(j + 1);
            let found = self.search(ech, j + 1, prefix);
            prefix.pop();
            if raised {
                ech.truncate(ech.rank() - 1);
            }
            if found.is_some() {
                return found;
            }
        }
        None
    }
}

/// Checks that every column subset of size k + (⌈k/r⌉−1)(δ−1) has rank k.
/// Together with locality this pins the minimum distance to the bound.
pub fn certify_optimal(code: &LrcCode, budget: u128) -> Result<OptimalityReport> {
    certify_optimal_of(&code.generator, &code.structure.groups, &code.params, budget)
}

pub fn certify_optimal_of(
    m: &Matrix,
    groups: &[Vec<usize>],
    params: &CodeParams,
    budget: u128,
) -> Result<OptimalityReport> {
    let (n, k) = (m.cols(), m.rows());
    if n != params.n || k != params.k {
        return Err(Error::StructureMismatch(format!("matrix is {k}x{n}, parameters {params}")));
    }
    let bound_d = params.distance_bound()?;
    let size = params.certification_size();
    let needed = binomial_u128(n, size);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let locality_ok = check_locality_of(m, groups, params.r, params.delta)?.overall;
    let cols = columns(m);
    let mut certify = Certify { cols: &cols, size, checked: 0 };
    let mut ech = Echelon::new(m.field(), k);
    let witness = certify.search(&mut ech, 0, &mut Vec::with_capacity(size));
    Ok(OptimalityReport {
        optimal: locality_ok && witness.is_none(),
        locality_ok,
        bound_d,
        subset_size: size,
        subsets_checked: certify.checked,
        witness,
    })
}

/// True iff every `rows`-subset of columns is independent.
pub fn check_mds(m: &Matrix) -> bool {
    let k = m.rows();
    if k > m.cols() {
        return false;
    }
    let cols = columns(m);
    let mut certify = Certify { cols: &cols, size: k, checked: 0 };
    let mut ech = Echelon::new(m.field(), k);
    certify.search(&mut ech, 0, &mut Vec::with_capacity(k)).is_none()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub holds: bool,
    pub violations: Vec<String>,
}

/// For r | k and r < k an optimal code has disjoint repair groups of size
/// r+δ−1, each punctured code an [r+δ−1, r, δ] MDS code.
pub fn check_structure_theorem(code: &LrcCode) -> Result<StructureReport> {
    let CodeParams { k, r, delta, .. } = code.params;
    if k % r != 0 || r == k {
        return Err(Error::PreconditionViolated(format!("structure theorem needs r | k and r < k (k={k}, r={r})")));
    }
    let m = &code.generator;
    let cols = columns(m);
    let groups = &code.structure.groups;
    let mut violations = Vec::new();
    let mut owner = vec![0usize; m.cols() + 1];
    for (i, g) in groups.iter().enumerate() {
        for &c in g {
            if c == 0 || c > m.cols() {
                return Err(Error::StructureMismatch(format!("group {} names column {c}", i + 1)));
            }
            if owner[c] != 0 {
                violations.push(format!("groups {} and {} share coordinate {c}", owner[c], i + 1));
            }
            owner[c] = i + 1;
        }
        if g.len() != r + delta - 1 {
            violations.push(format!("group {} has size {} != {}", i + 1, g.len(), r + delta - 1));
        }
        let rank = rank_of(m, &cols, g);
        if rank != r {
            violations.push(format!("group {} has rank {rank} != {r}", i + 1));
        }
        let mut sorted = g.clone();
        sorted.sort_unstable();
        if let Some(bad) =
            itertools::Itertools::combinations(sorted.iter().copied(), r).find(|s| rank_of(m, &cols, s) < r)
        {
            violations.push(format!("group {}: columns {bad:?} are dependent", i + 1));
        }
    }
    Ok(StructureReport { holds: violations.is_empty(), violations })
}
