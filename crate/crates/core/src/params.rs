//! Code parameters, the locality-aware distance bound, and the existence
//! classifier for optimal (r, δ) all-symbol locality codes.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(n, k, r, δ)`: length, dimension, locality and local distance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ParamsRepr", into = "ParamsRepr")]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub r: usize,
    pub delta: usize,
}

#[derive(Serialize, Deserialize)]
struct ParamsRepr {
    n: usize,
    k: usize,
    r: usize,
    delta: usize,
}

impl TryFrom<ParamsRepr> for CodeParams {
    type Error = Error;
    fn try_from(p: ParamsRepr) -> Result<Self> {
        CodeParams::new(p.n, p.k, p.r, p.delta)
    }
}

impl From<CodeParams> for ParamsRepr {
    fn from(p: CodeParams) -> Self {
        ParamsRepr { n: p.n, k: p.k, r: p.r, delta: p.delta }
    }
}

impl fmt::Display for CodeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, k={}, r={}, delta={})", self.n, self.k, self.r, self.delta)
    }
}

impl CodeParams {
    pub fn new(n: usize, k: usize, r: usize, delta: usize) -> Result<Self> {
        if r < 1 || r > k || k > n {
            return Err(Error::InvalidParams(format!("need 1 <= r <= k <= n, got n={n} k={k} r={r}")));
        }
        if delta < 2 {
            return Err(Error::InvalidParams(format!("need delta >= 2, got {delta}")));
        }
        Ok(CodeParams { n, k, r, delta })
    }

    /// Size of a full repair group, r + δ − 1.
    pub fn group_size(&self) -> usize {
        self.r + self.delta - 1
    }

    /// ⌈k/r⌉.
    pub fn local_groups_needed(&self) -> usize {
        self.k.div_ceil(self.r)
    }

    pub fn decompose(&self) -> ParamDecomposition {
        let s = self.group_size();
        ParamDecomposition { w: self.n / s, m: self.n % s, u: self.k / self.r, v: self.k % self.r }
    }

    /// n − k + 1 − (⌈k/r⌉ − 1)(δ − 1).
    pub fn distance_bound(&self) -> Result<usize> {
        let d = self.n as i64 - self.k as i64 + 1
            - (self.local_groups_needed() as i64 - 1) * (self.delta as i64 - 1);
        if d < 1 {
            return Err(Error::BoundNonPositive(d));
        }
        Ok(d as usize)
    }

    /// Size of the column subsets that must all have rank k in an optimal code:
    /// k + (⌈k/r⌉ − 1)(δ − 1) = n − d + 1.
    pub fn certification_size(&self) -> usize {
        self.k + (self.local_groups_needed() - 1) * (self.delta - 1)
    }

    /// n·r ≥ k·(r + δ − 1).
    pub fn necessary_check(&self) -> bool {
        self.n * self.r >= self.k * self.group_size()
    }

    /// C(n, k − 1).
    pub fn field_bound(&self) -> BigUint {
        binomial(self.n, self.k - 1)
    }

    pub fn classify(&self) -> Classification {
        Classification {
            verdict: self.verdict(),
            bound_d: self.distance_bound().ok(),
            field_bound: self.field_bound(),
        }
    }

    fn verdict(&self) -> Verdict {
        let ParamDecomposition { w, m, u, v } = self.decompose();
        let (r, delta, s) = (self.r, self.delta, self.group_size());
        if !self.necessary_check() {
            return Verdict::NotExists(Theorem::LowBound);
        }
        if m == 0 {
            return Verdict::Exists { method: Method::Algorithm1Uniform, theorem: Theorem::OptExt1 };
        }
        if r == self.k {
            return Verdict::ExistsMds;
        }
        if v == 0 {
            return Verdict::NotExists(Theorem::NonExst);
        }
        if m >= v + delta - 1 {
            return Verdict::Exists { method: Method::Algorithm1Remainder, theorem: Theorem::OptExt2 };
        }
        if u >= 2 * (r - v) + 1 {
            return Verdict::NotExists(Theorem::NonExst1);
        }
        // From here m > 0, v > 0 and the necessary condition gives
        // w + 1 = ⌈n/s⌉ ≥ ⌈k/r⌉ = u + 1.
        assert!(w >= u, "necessary condition should imply w >= u for {self}");
        let ell = s - m;
        if w >= ell && (r - v).min(w) >= u {
            return Verdict::Exists { method: Method::Algorithm2Hub, theorem: Theorem::OptExt3 };
        }
        if w + 1 >= 2 * ell && (2 * (r - v)).min(w) >= u {
            return Verdict::Exists { method: Method::Algorithm2Paired, theorem: Theorem::OptExt4 };
        }
        if w < ell {
            Verdict::Unknown(UnknownCase::Condition8)
        } else {
            Verdict::Unknown(UnknownCase::Condition9)
        }
    }
}

/// Euclidean division n = w(r+δ−1) + m, k = ur + v.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamDecomposition {
    pub w: usize,
    pub m: usize,
    pub u: usize,
    pub v: usize,
}

/// Construction route for an existing optimal code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "Algorithm1-uniform")]
    Algorithm1Uniform,
    #[serde(rename = "Algorithm1-remainder")]
    Algorithm1Remainder,
    #[serde(rename = "Algorithm2-hub")]
    Algorithm2Hub,
    #[serde(rename = "Algorithm2-paired")]
    Algorithm2Paired,
}

impl Method {
    pub const ALL: [Method; 4] =
        [Method::Algorithm1Uniform, Method::Algorithm1Remainder, Method::Algorithm2Hub, Method::Algorithm2Paired];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Algorithm1Uniform => "Algorithm1-uniform",
            Method::Algorithm1Remainder => "Algorithm1-remainder",
            Method::Algorithm2Hub => "Algorithm2-hub",
            Method::Algorithm2Paired => "Algorithm2-paired",
        }
    }

    pub fn theorem(&self) -> Theorem {
        match self {
            Method::Algorithm1Uniform => Theorem::OptExt1,
            Method::Algorithm1Remainder => Theorem::OptExt2,
            Method::Algorithm2Hub => Theorem::OptExt3,
            Method::Algorithm2Paired => Theorem::OptExt4,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The result that decides a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Theorem {
    /// n/(r+δ−1) ≥ k/r is necessary.
    LowBound,
    /// (r+δ−1) ∤ n and r | k.
    NonExst,
    /// m < v+δ−1 and u ≥ 2(r−v)+1.
    NonExst1,
    OptExt1,
    OptExt2,
    OptExt3,
    OptExt4,
}

impl Theorem {
    pub fn tag(&self) -> &'static str {
        match self {
            Theorem::LowBound => "lemma-low-bound",
            Theorem::NonExst => "thm-non-exst",
            Theorem::NonExst1 => "thm-non-exst-1",
            Theorem::OptExt1 => "thm-opt-ext-1",
            Theorem::OptExt2 => "thm-opt-ext-2",
            Theorem::OptExt3 => "thm-opt-ext-3",
            Theorem::OptExt4 => "thm-opt-ext-4",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnknownCase {
    /// w < r+δ−1−m
    Condition8,
    /// r+δ−1−m ≤ w < 2(r+δ−1−m)−1 and r−v < u
    Condition9,
}

impl UnknownCase {
    pub fn tag(&self) -> &'static str {
        match self {
            UnknownCase::Condition8 => "condition-8",
            UnknownCase::Condition9 => "condition-9",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    ExistsMds,
    Exists { method: Method, theorem: Theorem },
    NotExists(Theorem),
    Unknown(UnknownCase),
}

impl Verdict {
    /// Grid tag used by the existence table.
    pub fn table_tag(&self) -> &'static str {
        match self {
            Verdict::ExistsMds => "MDS",
            Verdict::Exists { method, .. } => match method {
                Method::Algorithm1Uniform => "E_M",
                Method::Algorithm1Remainder => "E16",
                Method::Algorithm2Hub => "E26",
                Method::Algorithm2Paired => "E27",
            },
            Verdict::NotExists(Theorem::NonExst) => "N10",
            Verdict::NotExists(Theorem::NonExst1) => "N11",
            Verdict::NotExists(_) => "N_LB",
            Verdict::Unknown(_) => "~",
        }
    }

    pub fn exists(&self) -> bool {
        matches!(self, Verdict::ExistsMds | Verdict::Exists { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ExistsMds => write!(f, "EXISTS (MDS)"),
            Verdict::Exists { method, .. } => write!(f, "EXISTS via {method}"),
            Verdict::NotExists(t) => write!(f, "NOT-EXISTS ({t})"),
            Verdict::Unknown(c) => write!(f, "UNKNOWN ({})", c.tag()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    /// The distance bound, absent when it is not positive.
    pub bound_d: Option<usize>,
    /// C(n, k−1).
    pub field_bound: BigUint,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.verdict)?;
        if !self.verdict.exists() {
            return Ok(());
        }
        match self.bound_d {
            Some(d) => write!(f, ", d*={d}")?,
            None => write!(f, ", d*=n/a")?,
        }
        write!(f, ", q\u{2265}{}", self.field_bound)
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient saturating at `u128::MAX`.
pub fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n-i) / (i+1) stays integral at every step
        match acc.checked_mul((n - i) as u128) {
            Some(x) => acc = x / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}
