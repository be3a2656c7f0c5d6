//! Repair-group structures: plain partitions of the coordinates and
//! frames, where the groups of a hub block all meet in one shared hub
//! coordinate and are otherwise disjoint.
//!
//! Coordinates and group numbers are 1-based.

use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A family of repair groups over `[1..n]`, optionally organised as a frame.
///
/// A plain partition has empty `hub_blocks`, `tail_block` and `hubs`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverStructure {
    pub n: usize,
    pub groups: Vec<Vec<usize>>,
    #[serde(default)]
    pub hub_blocks: Vec<Vec<usize>>,
    #[serde(default)]
    pub tail_block: Vec<usize>,
    #[serde(default)]
    pub hubs: Vec<usize>,
}

impl CoverStructure {
    pub fn partition(n: usize, groups: Vec<Vec<usize>>) -> Self {
        CoverStructure { n, groups, hub_blocks: vec![], tail_block: vec![], hubs: vec![] }
    }

    pub fn frame(
        n: usize,
        groups: Vec<Vec<usize>>,
        hub_blocks: Vec<Vec<usize>>,
        tail_block: Vec<usize>,
        hubs: Vec<usize>,
    ) -> Self {
        CoverStructure { n, groups, hub_blocks, tail_block, hubs }
    }

    pub fn is_frame(&self) -> bool {
        !self.hub_blocks.is_empty() || !self.tail_block.is_empty()
    }

    pub fn t(&self) -> usize {
        self.groups.len()
    }

    pub fn group(&self, i: usize) -> &[usize] {
        &self.groups[i - 1]
    }

    /// 1-based numbers of the groups containing coordinate `c`.
    pub fn groups_of(&self, c: usize) -> Vec<usize> {
        (1..=self.t()).filter(|&i| self.group(i).contains(&c)).collect()
    }

    /// Checks indices are in range; does not check the structural conditions.
    pub fn check_ranges(&self) -> Result<()> {
        for g in &self.groups {
            if let Some(&bad) = g.iter().find(|&&c| c == 0 || c > self.n) {
                return Err(Error::StructureMismatch(format!("coordinate {bad} outside [1..{}]", self.n)));
            }
        }
        let t = self.t();
        for &b in self.hub_blocks.iter().flatten().chain(&self.tail_block) {
            if b == 0 || b > t {
                return Err(Error::StructureMismatch(format!("group number {b} outside [1..{t}]")));
            }
        }
        if let Some(&bad) = self.hubs.iter().find(|&&c| c == 0 || c > self.n) {
            return Err(Error::StructureMismatch(format!("hub {bad} outside [1..{}]", self.n)));
        }
        Ok(())
    }
}

fn consecutive_blocks(start: usize, end: usize, size: usize) -> Vec<Vec<usize>> {
    (start..=end).collect::<Vec<_>>().chunks(size).map(<[usize]>::to_vec).collect()
}

/// n/(r+δ−1) consecutive blocks of size r+δ−1.
pub fn uniform_partition(n: usize, r: usize, delta: usize) -> Result<CoverStructure> {
    let s = r + delta - 1;
    if n == 0 || n % s != 0 {
        return Err(Error::NotDivisible(n, s));
    }
    Ok(CoverStructure::partition(n, consecutive_blocks(1, n, s)))
}

/// w full blocks followed by one trailing block of size m = n mod (r+δ−1).
/// Requires v + δ − 1 ≤ m where v = k mod r.
pub fn remainder_partition(n: usize, r: usize, delta: usize, k: usize) -> Result<CoverStructure> {
    let s = r + delta - 1;
    let m = n % s;
    let v = k % r;
    if m == 0 || m < v + delta - 1 {
        return Err(Error::PreconditionViolated(format!(
            "remainder partition needs 0 < m and m >= v+delta-1 (m={m}, v={v}, delta={delta})"
        )));
    }
    let mut groups = consecutive_blocks(1, n - m, s);
    groups.push((n - m + 1..=n).collect());
    Ok(CoverStructure::partition(n, groups))
}

/// Single-hub frame: coordinate 1 is shared by ℓ+1 groups, ℓ = r+δ−1−m.
pub fn hub_frame(n: usize, r: usize, delta: usize) -> Result<CoverStructure> {
    let s = r + delta - 1;
    let (w, m) = (n / s, n % s);
    let ell = s - m;
    if m == 0 || w < ell {
        return Err(Error::PreconditionViolated(format!(
            "hub frame needs m > 0 and w >= r+delta-1-m (w={w}, m={m})"
        )));
    }
    let big_l = (ell + 1) * (s - 1) + 1;
    let mut groups: Vec<Vec<usize>> = consecutive_blocks(2, big_l, s - 1)
        .into_iter()
        .map(|tail| std::iter::once(1).chain(tail).collect())
        .collect();
    groups.extend(consecutive_blocks(big_l + 1, n, s));
    let t = groups.len();
    debug_assert_eq!(t, w + 1);
    Ok(CoverStructure::frame(n, groups, vec![(1..=ell + 1).collect()], (ell + 2..=t).collect(), vec![1]))
}

/// Paired frame: ℓ blocks of 2(r+δ−1)−1 coordinates, each split into two
/// groups overlapping in the block's middle coordinate.
pub fn paired_frame(n: usize, r: usize, delta: usize) -> Result<CoverStructure> {
    let s = r + delta - 1;
    let (w, m) = (n / s, n % s);
    let ell = s - m;
    if m == 0 || w + 1 < 2 * ell {
        return Err(Error::PreconditionViolated(format!(
            "paired frame needs m > 0 and w+1 >= 2(r+delta-1-m) (w={w}, m={m})"
        )));
    }
    let width = 2 * s - 1;
    let mut groups = Vec::new();
    let mut hubs = Vec::new();
    let mut hub_blocks = Vec::new();
    for i in 0..ell {
        let first = i * width + 1;
        let hub = first + s - 1;
        groups.push((first..=hub).collect());
        groups.push((hub..first + width).collect());
        hubs.push(hub);
        hub_blocks.push(vec![2 * i + 1, 2 * i + 2]);
    }
    groups.extend(consecutive_blocks(ell * width + 1, n, s));
    let t = groups.len();
    debug_assert_eq!(t, w + 1);
    Ok(CoverStructure::frame(n, groups, hub_blocks, (2 * ell + 1..=t).collect(), hubs))
}

/// Consecutive windows of size k+δ−1 covering [1..n], the last one aligned to
/// the end (so it may overlap its predecessor). Used for MDS codes where any
/// k+δ−1 coordinates form a valid repair group.
pub fn window_cover(n: usize, k: usize, delta: usize) -> Result<CoverStructure> {
    let s = k + delta - 1;
    if n < s {
        return Err(Error::PreconditionViolated(format!("n={n} < k+delta-1={s}")));
    }
    let mut groups = Vec::new();
    let mut start = 1;
    while start + s - 1 < n {
        groups.push((start..start + s).collect());
        start += s;
    }
    groups.push((n + 1 - s..=n).collect());
    Ok(CoverStructure::partition(n, groups))
}

/// Outcome of [`validate`]; `violations` names each failed clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Validation {
    pub ok: bool,
    pub violations: Vec<String>,
}

pub fn validate(structure: &CoverStructure, r: usize, delta: usize) -> Validation {
    let mut v = Vec::new();
    if let Err(e) = structure.check_ranges() {
        v.push(e.to_string());
        return Validation { ok: false, violations: v };
    }
    let s = r + delta - 1;
    let n = structure.n;
    let t = structure.t();
    for (i, g) in structure.groups.iter().enumerate() {
        if g.iter().collect::<BTreeSet<_>>().len() != g.len() {
            v.push(format!("group {} has repeated coordinates", i + 1));
        }
    }

    if !structure.is_frame() {
        for (i, g) in structure.groups.iter().enumerate() {
            if g.len() < delta || g.len() > s {
                v.push(format!("group {} has size {} outside [{delta}, {s}]", i + 1, g.len()));
            }
        }
        v.extend(partition_violations(n, structure.groups.iter().map(|g| g.iter().copied().collect())));
        return Validation { ok: v.is_empty(), violations: v };
    }

    for (i, g) in structure.groups.iter().enumerate() {
        if g.len() != s {
            v.push(format!("group {} has size {} != r+delta-1={s}", i + 1, g.len()));
        }
    }
    // {A_1..A_α, B} partitions [t]
    let blocks = structure.hub_blocks.iter().chain(std::iter::once(&structure.tail_block));
    let mut seen = vec![0usize; t + 1];
    for &b in blocks.flatten() {
        seen[b] += 1;
    }
    for (b, &count) in seen.iter().enumerate().skip(1) {
        if count != 1 {
            v.push(format!("group {b} appears in {count} blocks of the frame partition"));
        }
    }
    if structure.hubs.len() != structure.hub_blocks.len() {
        v.push(format!(
            "{} hub blocks but {} hubs",
            structure.hub_blocks.len(),
            structure.hubs.len()
        ));
        return Validation { ok: false, violations: v };
    }
    // condition (1)
    for (j, (block, &hub)) in structure.hub_blocks.iter().zip(&structure.hubs).enumerate() {
        if block.is_empty() {
            v.push(format!("hub block {} is empty", j + 1));
            continue;
        }
        let mut common: BTreeSet<usize> = structure.group(block[0]).iter().copied().collect();
        for &b in &block[1..] {
            let g: BTreeSet<usize> = structure.group(b).iter().copied().collect();
            common = common.intersection(&g).copied().collect();
        }
        if common.len() != 1 {
            v.push(format!("hub block {}: hub intersection not a singleton ({} common)", j + 1, common.len()));
        } else if !common.contains(&hub) {
            v.push(format!("hub block {}: common coordinate is not the declared hub {hub}", j + 1));
        }
        let mut owner = std::collections::HashMap::new();
        for &b in block {
            for &c in structure.group(b) {
                if c == hub {
                    continue;
                }
                if let Some(prev) = owner.insert(c, b) {
                    v.push(format!(
                        "hub block {}: groups {prev} and {b} share non-hub coordinate {c}",
                        j + 1
                    ));
                }
            }
        }
    }
    // condition (2)
    let pieces = structure
        .hub_blocks
        .iter()
        .map(|block| block.iter().flat_map(|&b| structure.group(b).iter().copied()).collect::<BTreeSet<_>>())
        .chain(structure.tail_block.iter().map(|&b| structure.group(b).iter().copied().collect()));
    v.extend(partition_violations(n, pieces));
    Validation { ok: v.is_empty(), violations: v }
}

fn partition_violations(n: usize, pieces: impl Iterator<Item = BTreeSet<usize>>) -> Vec<String> {
    let mut v = Vec::new();
    let mut count = vec![0usize; n + 1];
    for piece in pieces {
        for c in piece {
            count[c] += 1;
        }
    }
    let missing: Vec<usize> = (1..=n).filter(|&c| count[c] == 0).collect();
    let doubled: Vec<usize> = (1..=n).filter(|&c| count[c] > 1).collect();
    if !missing.is_empty() {
        v.push(format!("coordinates not covered: {missing:?}"));
    }
    if !doubled.is_empty() {
        v.push(format!("coordinates in more than one part: {doubled:?}"));
    }
    v
}

/// Size of the union of the selected groups (1-based numbers).
fn union_size(groups: &[Vec<usize>], selection: &[usize], stamp: &mut Vec<usize>, round: usize) -> usize {
    let mut size = 0;
    for &i in selection {
        for &c in &groups[i - 1] {
            if c >= stamp.len() {
                stamp.resize(c + 1, 0);
            }
            if stamp[c] != round {
                stamp[c] = round;
                size += 1;
            }
        }
    }
    size
}

fn first_deficient(groups: &[Vec<usize>], k: usize, r: usize, delta: usize) -> Result<Option<Vec<usize>>> {
    let j = k.div_ceil(r);
    let t = groups.len();
    if t < j {
        return Err(Error::TooFewGroups { t, needed: j });
    }
    let need = k + j * (delta - 1);
    let mut stamp = Vec::new();
    for (round, sel) in (1..=t).combinations(j).enumerate() {
        if union_size(groups, &sel, &mut stamp, round + 1) < need {
            return Ok(Some(sel));
        }
    }
    Ok(None)
}

/// True iff every ⌈k/r⌉ groups together cover at least k + ⌈k/r⌉(δ−1) coordinates.
pub fn coverage_check(groups: &[Vec<usize>], k: usize, r: usize, delta: usize) -> Result<bool> {
    Ok(first_deficient(groups, k, r, delta)?.is_none())
}

/// The lexicographically first ⌈k/r⌉-subset J of group numbers whose union has
/// fewer than k + ⌈k/r⌉(δ−1) coordinates, if any.
pub fn deficiency_witness(
    groups: &[Vec<usize>],
    n: usize,
    k: usize,
    r: usize,
    delta: usize,
) -> Result<Option<Vec<usize>>> {
    let s = r + delta - 1;
    if let Some((i, g)) = groups.iter().enumerate().find(|(_, g)| g.len() > s) {
        return Err(Error::PreconditionViolated(format!("group {} has size {} > {s}", i + 1, g.len())));
    }
    let mut covered = vec![false; n + 1];
    for &c in groups.iter().flatten() {
        if c == 0 || c > n {
            return Err(Error::StructureMismatch(format!("coordinate {c} outside [1..{n}]")));
        }
        covered[c] = true;
    }
    if let Some(missing) = (1..=n).find(|&c| !covered[c]) {
        return Err(Error::CoverIncomplete { n, missing });
    }
    first_deficient(groups, k, r, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn frame37() -> CoverStructure {
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

    fn thirteen_point_family() -> Vec<Vec<usize>> {
        vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9], vec![10, 11, 12], vec![1, 5, 13], vec![5, 8, 13]]
    }

    #[test]
    fn uniform() {
        assert_eq!(
            uniform_partition(12, 2, 3).unwrap().groups,
            vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8], vec![9, 10, 11, 12]]
        );
        assert_eq!(uniform_partition(6, 2, 2).unwrap().groups, vec![vec![1, 2, 3], vec![4, 5, 6]]);
        assert_eq!(uniform_partition(4, 1, 2).unwrap().groups, vec![vec![1, 2], vec![3, 4]]);
        assert_eq!(uniform_partition(13, 2, 3), Err(Error::NotDivisible(13, 4)));
    }

    #[test]
    fn remainder() {
        assert_eq!(
            remainder_partition(11, 2, 2, 5).unwrap().groups,
            vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9], vec![10, 11]]
        );
        assert!(matches!(remainder_partition(13, 2, 3, 3), Err(Error::PreconditionViolated(_))));
        let s = remainder_partition(60, 9, 5, 11).unwrap();
        let sizes: Vec<usize> = s.groups.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![13, 13, 13, 13, 8]);
        assert!(validate(&s, 9, 5).ok);
    }

    #[test]
    fn hub() {
        let f = hub_frame(8, 2, 2).unwrap();
        assert_eq!(f.groups, vec![vec![1, 2, 3], vec![1, 4, 5], vec![6, 7, 8]]);
        assert_eq!(f.hubs, vec![1]);
        assert_eq!(f.hub_blocks, vec![vec![1, 2]]);
        assert_eq!(f.tail_block, vec![3]);
        assert!(validate(&f, 2, 2).ok);

        let g = hub_frame(37, 3, 3).unwrap();
        assert_eq!(g.t(), 8);
        assert_eq!(g.hub_blocks, vec![vec![1, 2, 3, 4]]);
        assert_eq!(g.groups[3], vec![1, 14, 15, 16, 17]);
        assert_eq!(g.groups[4], vec![18, 19, 20, 21, 22]);
        assert!(validate(&g, 3, 3).ok);
        assert!(matches!(hub_frame(12, 2, 3), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn paired() {
        let f = paired_frame(10, 2, 2).unwrap();
        assert_eq!(f.groups, vec![vec![1, 2, 3], vec![3, 4, 5], vec![6, 7, 8], vec![8, 9, 10]]);
        assert_eq!(f.hubs, vec![3, 8]);
        assert!(f.tail_block.is_empty());
        assert!(validate(&f, 2, 2).ok);

        let g = paired_frame(60, 4, 5).unwrap();
        assert_eq!(g.t(), 8);
        assert_eq!(g.hub_blocks.len(), 4);
        assert!(g.tail_block.is_empty());
        assert!(validate(&g, 4, 5).ok);
        assert!(matches!(paired_frame(9, 2, 2), Err(Error::PreconditionViolated(_))));
        // m > 0 but w+1 < 2ℓ: 13 = 4·3+1, ℓ = 2, w+1 = 5 >= 4 is fine; 7 = 2·3+1, w+1 = 3 < 4
        assert!(matches!(paired_frame(7, 2, 2), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn validation() {
        assert!(validate(&frame37(), 3, 3).ok);
        assert!(validate(&uniform_partition(12, 2, 3).unwrap(), 2, 3).ok);

        let bad = CoverStructure::frame(
            5,
            vec![vec![1, 2, 3], vec![1, 2, 4], vec![5, 3, 4]],
            vec![vec![1, 2]],
            vec![3],
            vec![1],
        );
        let v = validate(&bad, 2, 2);
        assert!(!v.ok);
        assert!(v.violations.iter().any(|m| m.contains("hub intersection not a singleton")), "{v:?}");

        let overlap = CoverStructure::partition(4, vec![vec![1, 2, 3], vec![3, 4]]);
        assert!(!validate(&overlap, 2, 2).ok);
        let small = CoverStructure::partition(3, vec![vec![1, 2], vec![3]]);
        assert!(!validate(&small, 1, 2).ok);
        let out = CoverStructure::partition(3, vec![vec![1, 2, 4]]);
        assert!(!validate(&out, 2, 2).ok);
    }

    #[test]
    fn coverage() {
        let u = uniform_partition(12, 2, 3).unwrap();
        assert!(coverage_check(&u.groups, 5, 2, 3).unwrap());
        let h = hub_frame(8, 2, 2).unwrap();
        assert!(coverage_check(&h.groups, 3, 2, 2).unwrap());
        assert!(!coverage_check(&thirteen_point_family(), 7, 2, 2).unwrap());
        assert_eq!(
            coverage_check(&[vec![1, 2, 3]], 7, 2, 2),
            Err(Error::TooFewGroups { t: 1, needed: 4 })
        );
    }

    #[test]
    fn witness() {
        assert_eq!(deficiency_witness(&thirteen_point_family(), 13, 7, 2, 2).unwrap(), Some(vec![1, 2, 3, 5]));
        let u = uniform_partition(12, 2, 3).unwrap();
        assert_eq!(deficiency_witness(&u.groups, 12, 5, 2, 3).unwrap(), None);
        assert!(matches!(
            deficiency_witness(&[vec![1, 2, 3]], 3, 7, 2, 2),
            Err(Error::TooFewGroups { .. })
        ));
        assert_eq!(
            deficiency_witness(&[vec![1, 2, 3]], 4, 2, 2, 2),
            Err(Error::CoverIncomplete { n: 4, missing: 4 })
        );
        assert!(deficiency_witness(&[vec![1, 2, 3, 4]], 4, 2, 2, 2).is_err());
    }

    #[test]
    fn windows() {
        let w = window_cover(7, 3, 2).unwrap();
        assert_eq!(w.groups, vec![vec![1, 2, 3, 4], vec![4, 5, 6, 7]]);
        assert_eq!(window_cover(8, 3, 2).unwrap().groups.len(), 2);
        assert!(window_cover(3, 3, 2).is_err());
    }

    #[test]
    fn serialization_shape() {
        let u = uniform_partition(6, 2, 2).unwrap();
        assert_eq!(
            serde_json::to_string(&u).unwrap(),
            r#"{"n":6,"groups":[[1,2,3],[4,5,6]],"hub_blocks":[],"tail_block":[],"hubs":[]}"#
        );
        let f = frame37();
        let back: CoverStructure = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
    }
}
