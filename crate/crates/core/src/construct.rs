//! Construction of optimal codes: an MDS base code on Ω₀ extended one
//! coordinate at a time, each new column drawn from its group's span while
//! avoiding the span of every (k−1)-set that completes a core with it.
//!
//! The same engine serves partitions (Algorithm 1) and frames (Algorithm 2);
//! only the core predicate differs, and [`CoreQuery`] hides that difference.
//! Strategies for each existence theorem sit behind [`ConstructionStrategy`]
//! and are looked up by name in a [`Registry`].

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cores::{count_lambda_cores, omega0, visit_cores, visit_lambda_cores, CoreQuery, CoreVisitor};
use crate::covers::{self, coverage_check, validate, CoverStructure};
use crate::error::{Error, Result};
use crate::gf::{Field, Prefer};
use crate::linalg::{Echelon, Matrix, SpanIter, DEFAULT_SPAN_BUDGET};
use crate::params::{CodeParams, Method, Theorem, Verdict};

/// Random candidates drawn per pass over Λ.
const BATCH: usize = 8;
/// Random candidates tried before the exhaustive scan.
const RANDOM_ATTEMPTS: usize = 64;
/// Candidates checked per pass during the exhaustive scan.
const SCAN_BATCH: usize = 64;

/// A constructed code together with the structure certifying its locality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LrcCode {
    pub field: Field,
    pub generator: Matrix,
    pub structure: CoverStructure,
    pub params: CodeParams,
    pub claimed_d: usize,
    pub method: String,
    /// Extension steps in order: (λ, column G_λ).
    #[serde(default)]
    pub trace: Vec<(usize, Vec<u32>)>,
}

/// k×L Vandermonde matrix over the nodes 0, 1, …, L−1 (canonical order).
/// Any k of its columns are independent.
pub fn mds_generator(len: usize, k: usize, field: Field) -> Result<Matrix> {
    if k == 0 || len < k {
        return Err(Error::PreconditionViolated(format!("need 1 <= k <= L, got k={k}, L={len}")));
    }
    if field.order() < len as u64 {
        return Err(Error::FieldTooSmall { q: field.order(), needed: len as u64 });
    }
    let columns: Vec<Vec<u32>> = (0..len as u32)
        .map(|x| {
            let mut col = Vec::with_capacity(k);
            let mut p = 1u32;
            for _ in 0..k {
                col.push(p);
                p = field.mul(p, x);
            }
            col
        })
        .collect();
    Matrix::from_columns(field, k, &columns)
}

/// How much of the loop invariant to re-verify after each extension step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantCheck {
    Off,
    /// Every k-core within Ω.
    Full,
    /// This many random k-cores within Ω.
    Sample(usize),
    /// `Full` in debug builds for n ≤ 16, otherwise `Off`.
    Auto,
}

#[derive(Clone, Copy, Debug)]
pub struct ConstructOptions {
    pub seed: u64,
    pub invariant: InvariantCheck,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions { seed: 0, invariant: InvariantCheck::Auto }
    }
}

impl ConstructOptions {
    pub fn seeded(seed: u64) -> Self {
        ConstructOptions { seed, ..Default::default() }
    }
}

/// State of the extension loop between steps.
pub struct ExtensionState<'a> {
    query: CoreQuery<'a>,
    field: Field,
    k: usize,
    matrix: Matrix,
    omega: Vec<usize>,
    in_omega: Vec<bool>,
    rng: ChaCha8Rng,
    trace: Vec<(usize, Vec<u32>)>,
    invariant: InvariantCheck,
}

impl<'a> ExtensionState<'a> {
    /// Places an MDS code on Ω₀.
    pub fn new(
        structure: &'a CoverStructure,
        params: &CodeParams,
        field: Field,
        opts: ConstructOptions,
    ) -> Result<Self> {
        let CodeParams { n, k, r, delta } = *params;
        if structure.n != n {
            return Err(Error::StructureMismatch(format!("structure has n={}, params n={n}", structure.n)));
        }
        let checked = validate(structure, r, delta);
        if !checked.ok {
            return Err(Error::PreconditionViolated(checked.violations.join("; ")));
        }
        if !coverage_check(&structure.groups, k, r, delta)? {
            return Err(Error::PreconditionViolated(
                "some ceil(k/r) groups cover fewer than k + ceil(k/r)(delta-1) coordinates".into(),
            ));
        }
        let query = CoreQuery::new(structure, delta, k);
        let omega = omega0(&query).indices;
        if omega.len() < k {
            return Err(Error::PreconditionViolated(format!("|Omega0|={} < k={k}", omega.len())));
        }
        let base = mds_generator(omega.len(), k, field)?;
        let mut matrix = Matrix::zeros(field, k, n);
        for (j, &c) in omega.iter().enumerate() {
            matrix.set_column(c - 1, &base.column(j))?;
        }
        let mut in_omega = vec![false; n + 1];
        for &c in &omega {
            in_omega[c] = true;
        }
        let invariant = match opts.invariant {
            InvariantCheck::Auto if cfg!(debug_assertions) && n <= 16 => InvariantCheck::Full,
            InvariantCheck::Auto => InvariantCheck::Off,
            other => other,
        };
        Ok(ExtensionState {
            query,
            field,
            k,
            matrix,
            omega,
            in_omega,
            rng: ChaCha8Rng::seed_from_u64(opts.seed),
            trace: Vec::new(),
            invariant,
        })
    }

    pub fn omega(&self) -> &[usize] {
        &self.omega
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn trace(&self) -> &[(usize, Vec<u32>)] {
        &self.trace
    }

    /// Next coordinate to assign: first group with a missing coordinate, smallest such coordinate.
    pub fn next_target(&self) -> Option<(usize, usize)> {
        let s = self.query.structure();
        (1..=s.t()).find_map(|i| {
            s.group(i).iter().copied().filter(|&c| !self.in_omega[c]).min().map(|lambda| (lambda, i))
        })
    }

    /// Performs one extension step; returns the assigned coordinate, or None when done.
    pub fn step(&mut self) -> Result<Option<usize>> {
        let Some((lambda, group)) = self.next_target() else {
            return Ok(None);
        };
        let column = self.pick_extension_vector(lambda, group)?;
        self.matrix.set_column(lambda - 1, &column)?;
        let pos = self.omega.partition_point(|&c| c < lambda);
        self.omega.insert(pos, lambda);
        self.in_omega[lambda] = true;
        self.trace.push((lambda, column));
        self.check_invariant()?;
        Ok(Some(lambda))
    }

    fn group_basis(&self, group: usize) -> Vec<Vec<u32>> {
        let mut ech = Echelon::new(self.field, self.k);
        for &c in self.query.structure().group(group) {
            if self.in_omega[c] {
                ech.insert(&self.matrix.coord_column(c));
            }
        }
        ech.reduced_basis()
    }

    fn combine(&self, basis: &[Vec<u32>], coeffs: &[u32]) -> Vec<u32> {
        let f = self.field;
        let mut v = vec![0u32; self.k];
        for (c, b) in coeffs.iter().zip(basis) {
            if *c != 0 {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = f.add(*x, f.mul(*c, y));
                }
            }
        }
        v
    }

    /// A vector in span{G_ℓ : ℓ ∈ S_group ∩ Ω} outside span{G_ℓ : ℓ ∈ S₀} for
    /// every S₀ ∈ Λ(λ). Random draws first, then an exhaustive scan of the span.
    pub fn pick_extension_vector(&mut self, lambda: usize, group: usize) -> Result<Vec<u32>> {
        let basis = self.group_basis(group);
        let q = self.field.order();
        let mut drawn = 0;
        while drawn < RANDOM_ATTEMPTS {
            let mut batch = Vec::with_capacity(BATCH);
            while batch.len() < BATCH && drawn < RANDOM_ATTEMPTS {
                let coeffs: Vec<u32> = (0..basis.len()).map(|_| self.rng.gen_range(0..q as u32)).collect();
                let v = self.combine(&basis, &coeffs);
                drawn += 1;
                if v.iter().any(|&x| x != 0) {
                    batch.push(v);
                }
            }
            if let Some(v) = self.first_avoiding(lambda, batch) {
                return Ok(v);
            }
        }
        // exhaustive fallback
        let too_many = |_| Error::NoValidVector {
            lambda,
            lambda_count: count_lambda_cores(&self.query, &self.omega, lambda),
            q,
        };
        let mut scan = SpanIter::new(self.field, self.k, basis, DEFAULT_SPAN_BUDGET).map_err(too_many)?;
        scan.next(); // zero vector
        loop {
            let batch: Vec<Vec<u32>> = scan.by_ref().take(SCAN_BATCH).collect();
            if batch.is_empty() {
                break;
            }
            if let Some(v) = self.first_avoiding(lambda, batch) {
                return Ok(v);
            }
        }
        Err(Error::NoValidVector { lambda, lambda_count: count_lambda_cores(&self.query, &self.omega, lambda), q })
    }

    fn first_avoiding(&self, lambda: usize, candidates: Vec<Vec<u32>>) -> Option<Vec<u32>> {
        if candidates.is_empty() {
            return None;
        }
        let visitor = Avoid::new(self.field, &self.matrix, candidates);
        let (visitor, _) = visit_lambda_cores(&self.query, &self.omega, lambda, visitor);
        visitor.winner()
    }

    fn check_invariant(&mut self) -> Result<()> {
        match self.invariant {
            InvariantCheck::Off | InvariantCheck::Auto => Ok(()),
            InvariantCheck::Full => {
                let visitor = Independence::new(self.field, &self.matrix);
                let (visitor, _) = visit_cores(&self.query, &self.omega, &[], self.k, visitor);
                match visitor.broken {
                    Some(core) => Err(Error::InvariantBroken(core)),
                    None => Ok(()),
                }
            }
            InvariantCheck::Sample(count) => {
                let mut order = self.omega.clone();
                for _ in 0..count {
                    order.shuffle(&mut self.rng);
                    if let Some(core) = sample_core(&self.query, &order, self.k) {
                        let mut ech = Echelon::new(self.field, self.k);
                        if !core.iter().all(|&c| ech.insert(&self.matrix.coord_column(c))) {
                            return Err(Error::InvariantBroken(core));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    pub fn finish(self) -> (Matrix, Vec<(usize, Vec<u32>)>) {
        (self.matrix, self.trace)
    }
}

/// Greedy core of size `k` from a shuffled ground set, if the greedy pass reaches k.
pub fn sample_core(q: &CoreQuery, shuffled: &[usize], k: usize) -> Option<Vec<usize>> {
    let mut core = Vec::with_capacity(k);
    for &c in shuffled {
        core.push(c);
        if !q.is_core(&core) {
            core.pop();
        }
        if core.len() == k {
            core.sort_unstable();
            return Some(core);
        }
    }
    None
}

/// Prunes candidates that fall into the span of some S₀ ∈ Λ. Reduced copies of
/// every live candidate are kept per depth so each DFS edge costs one row reduction.
struct Avoid<'m> {
    matrix: &'m Matrix,
    ech: Echelon,
    candidates: Vec<Vec<u32>>,
    alive: Vec<bool>,
    live: usize,
    // reduced[d][i]: candidate i reduced by the first d prefix columns
    reduced: Vec<Vec<Vec<u32>>>,
}

impl<'m> Avoid<'m> {
    fn new(field: Field, matrix: &'m Matrix, candidates: Vec<Vec<u32>>) -> Self {
        let k = matrix.rows();
        let live = candidates.len();
        Avoid {
            matrix,
            ech: Echelon::new(field, k),
            alive: vec![true; live],
            live,
            reduced: vec![candidates.clone()],
            candidates,
        }
    }

    fn winner(self) -> Option<Vec<u32>> {
        self.candidates.into_iter().zip(self.alive).find_map(|(c, a)| a.then_some(c))
    }
}

impl CoreVisitor for Avoid<'_> {
    fn enter(&mut self, c: usize) -> bool {
        // prefixes of cores inside Ω are independent by the loop invariant
        if !self.ech.insert(&self.matrix.coord_column(c)) {
            debug_assert!(false, "dependent core prefix at coordinate {c}");
            return false;
        }
        let mut next = self.reduced.last().expect("depth 0").clone();
        for (v, &a) in next.iter_mut().zip(&self.alive) {
            if a {
                self.ech.reduce_by_last(v);
            }
        }
        self.reduced.push(next);
        true
    }

    fn exit(&mut self, _c: usize) {
        self.reduced.pop();
        self.ech.truncate(self.reduced.len() - 1);
    }

    fn leaf(&mut self, _s0: &[usize]) -> bool {
        let top = self.reduced.last().expect("depth");
        for (i, v) in top.iter().enumerate() {
            if self.alive[i] && v.iter().all(|&x| x == 0) {
                self.alive[i] = false;
                self.live -= 1;
            }
        }
        self.live > 0
    }
}

/// Finds the first k-core whose columns are dependent.
struct Independence<'m> {
    matrix: &'m Matrix,
    ech: Echelon,
    // whether each prefix column raised the rank
    raised: Vec<bool>,
    broken: Option<Vec<usize>>,
}

impl<'m> Independence<'m> {
    fn new(field: Field, matrix: &'m Matrix) -> Self {
        Independence { matrix, ech: Echelon::new(field, matrix.rows()), raised: Vec::new(), broken: None }
    }
}

impl CoreVisitor for Independence<'_> {
    fn enter(&mut self, c: usize) -> bool {
        self.raised.push(self.ech.insert(&self.matrix.coord_column(c)));
        true
    }

    fn exit(&mut self, _c: usize) {
        if self.raised.pop() == Some(true) {
            self.ech.truncate(self.ech.rank() - 1);
        }
    }

    fn leaf(&mut self, s: &[usize]) -> bool {
        if self.ech.rank() < s.len() {
            self.broken = Some(s.to_vec());
            return false;
        }
        true
    }
}

fn claimed_distance(params: &CodeParams) -> Result<usize> {
    params.distance_bound()
}

fn run_extension(
    structure: CoverStructure,
    params: &CodeParams,
    field: Field,
    opts: ConstructOptions,
    method: &str,
) -> Result<LrcCode> {
    let mut state = ExtensionState::new(&structure, params, field, opts)?;
    while state.step()?.is_some() {}
    let (generator, trace) = state.finish();
    Ok(LrcCode {
        field,
        generator,
        claimed_d: claimed_distance(params)?,
        structure,
        params: *params,
        method: method.to_string(),
        trace,
    })
}

/// Extension over a partition of the coordinates.
pub fn run_algorithm1(structure: CoverStructure, params: &CodeParams, field: Field, seed: u64) -> Result<LrcCode> {
    if structure.is_frame() {
        return Err(Error::PreconditionViolated("expected a partition, got a frame".into()));
    }
    run_extension(structure, params, field, ConstructOptions::seeded(seed), "Algorithm1")
}

/// Extension over a frame.
pub fn run_algorithm2(structure: CoverStructure, params: &CodeParams, field: Field, seed: u64) -> Result<LrcCode> {
    if !structure.is_frame() {
        return Err(Error::PreconditionViolated("expected a frame, got a partition".into()));
    }
    run_extension(structure, params, field, ConstructOptions::seeded(seed), "Algorithm2")
}

/// One construction route, selectable by name.
pub trait ConstructionStrategy: Send + Sync {
    fn name(&self) -> &'static str;
    /// Existence theorem this route realises; None for plain MDS codes.
    fn theorem(&self) -> Option<Theorem>;
    /// Whether the route's structure can be built for these parameters.
    fn applies(&self, params: &CodeParams) -> bool {
        self.structure(params)
            .and_then(|s| coverage_check(&s.groups, params.k, params.r, params.delta))
            .unwrap_or(false)
    }
    fn structure(&self, params: &CodeParams) -> Result<CoverStructure>;
    fn run(&self, params: &CodeParams, field: Field, opts: ConstructOptions) -> Result<LrcCode> {
        run_extension(self.structure(params)?, params, field, opts, self.name())
    }
}

impl fmt::Debug for dyn ConstructionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

struct Extension {
    method: Method,
    build: fn(&CodeParams) -> Result<CoverStructure>,
}

impl ConstructionStrategy for Extension {
    fn name(&self) -> &'static str {
        self.method.name()
    }

    fn theorem(&self) -> Option<Theorem> {
        Some(self.method.theorem())
    }

    fn structure(&self, params: &CodeParams) -> Result<CoverStructure> {
        (self.build)(params)
    }
}

/// Plain MDS code; every window of k+δ−1 coordinates is a repair group.
struct Mds;

impl ConstructionStrategy for Mds {
    fn name(&self) -> &'static str {
        "MDS"
    }

    fn theorem(&self) -> Option<Theorem> {
        None
    }

    fn applies(&self, params: &CodeParams) -> bool {
        params.r == params.k && params.n >= params.k + params.delta - 1
    }

    fn structure(&self, params: &CodeParams) -> Result<CoverStructure> {
        covers::window_cover(params.n, params.k, params.delta)
    }

    fn run(&self, params: &CodeParams, field: Field, _opts: ConstructOptions) -> Result<LrcCode> {
        if params.r != params.k {
            return Err(Error::PreconditionViolated(format!("MDS route needs r = k, got r={}", params.r)));
        }
        Ok(LrcCode {
            field,
            generator: mds_generator(params.n, params.k, field)?,
            structure: self.structure(params)?,
            params: *params,
            claimed_d: claimed_distance(params)?,
            method: self.name().to_string(),
            trace: Vec::new(),
        })
    }
}

/// Named construction strategies.
pub struct Registry {
    strategies: Vec<Box<dyn ConstructionStrategy>>,
}

impl Default for Registry {
    fn default() -> Self {
        let mut reg = Registry { strategies: Vec::new() };
        reg.register(Box::new(Extension {
            method: Method::Algorithm1Uniform,
            build: |p| covers::uniform_partition(p.n, p.r, p.delta),
        }));
        reg.register(Box::new(Extension {
            method: Method::Algorithm1Remainder,
            build: |p| covers::remainder_partition(p.n, p.r, p.delta, p.k),
        }));
        reg.register(Box::new(Extension {
            method: Method::Algorithm2Hub,
            build: |p| covers::hub_frame(p.n, p.r, p.delta),
        }));
        reg.register(Box::new(Extension {
            method: Method::Algorithm2Paired,
            build: |p| covers::paired_frame(p.n, p.r, p.delta),
        }));
        reg.register(Box::new(Mds));
        reg
    }
}

impl Registry {
    /// Adds a strategy, replacing any existing one with the same name.
    pub fn register(&mut self, strategy: Box<dyn ConstructionStrategy>) {
        self.strategies.retain(|s| s.name() != strategy.name());
        self.strategies.push(strategy);
    }

    pub fn get(&self, name: &str) -> Result<&dyn ConstructionStrategy> {
        self.strategies
            .iter()
            .find(|s| s.name().eq_ignore_ascii_case(name))
            .map(Box::as_ref)
            .ok_or_else(|| Error::UnknownMethod(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.strategies.iter().map(|s| s.name())
    }

    /// Strategy the classifier selects for `params`.
    pub fn select(&self, params: &CodeParams) -> Result<&dyn ConstructionStrategy> {
        match params.classify().verdict {
            Verdict::ExistsMds => self.get("MDS"),
            Verdict::Exists { method, .. } => self.get(method.name()),
            Verdict::NotExists(t) => Err(Error::NotConstructible(t.tag().to_string())),
            Verdict::Unknown(c) => Err(Error::UnknownCase(c.tag().to_string())),
        }
    }
}

/// Smallest prime field of order at least max(C(n, k−1), n).
pub fn default_field(params: &CodeParams) -> Result<Field> {
    let bound = params.field_bound().max(params.n.into());
    let bound_u64 = u64::try_from(&bound)
        .map_err(|_| Error::BoundTooLarge { bound: bound.to_string(), ceiling: crate::gf::DEFAULT_CEILING })?;
    Field::at_least(bound_u64, Prefer::Prime)
}

/// Classifies `params` and runs the matching strategy.
pub fn construct(params: &CodeParams, field: Option<Field>, seed: u64) -> Result<LrcCode> {
    construct_with(&Registry::default(), params, None, field, ConstructOptions::seeded(seed))
}

/// Runs `method` if given (it must apply to `params`), else the classifier's choice.
pub fn construct_with(
    registry: &Registry,
    params: &CodeParams,
    method: Option<&str>,
    field: Option<Field>,
    opts: ConstructOptions,
) -> Result<LrcCode> {
    let strategy = match method {
        Some(name) => {
            let s = registry.get(name)?;
            if !s.applies(params) {
                return Err(Error::PreconditionViolated(format!("{} does not apply to {params}", s.name())));
            }
            s
        }
        None => registry.select(params)?,
    };
    let field = match field {
        Some(f) => f,
        None => default_field(params)?,
    };
    strategy.run(params, field, opts)
}
