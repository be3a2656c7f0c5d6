//! Dense exact linear algebra over a [`Field`].
//!
//! Column *coordinates* are 1-based throughout the crate (coordinate `j`
//! is matrix column `j - 1`), matching how codes index their symbols.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement};

/// Default cap on the number of vectors [`span_enumerate`] may yield.
pub const DEFAULT_SPAN_BUDGET: u64 = 1 << 24;

/// A strictly increasing set of 1-based column coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ColumnSet(Vec<usize>);

impl ColumnSet {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.first() == Some(&0) {
            return Err(Error::IndexOutOfRange { index: 0, cols: usize::MAX });
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed("column set must be strictly increasing".into()));
        }
        Ok(ColumnSet(indices))
    }

    /// Sorts and deduplicates.
    pub fn from_unsorted(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        ColumnSet::new(indices)
    }

    pub fn all(cols: usize) -> Self {
        ColumnSet((1..=cols).collect())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn check(&self, cols: usize) -> Result<()> {
        match self.0.last() {
            Some(&last) if last > cols => Err(Error::IndexOutOfRange { index: last, cols }),
            _ => Ok(()),
        }
    }
}

/// Dense row-major matrix over a field.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Vec<u64>>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = Error;

    fn try_from(r: MatrixRepr) -> Result<Self> {
        let m = Matrix::from_rows(r.field, &r.data)?;
        if m.rows != r.rows || (r.rows > 0 && m.cols != r.cols) {
            return Err(Error::Malformed(format!(
                "declared {}x{} but data is {}x{}",
                r.rows, r.cols, m.rows, m.cols
            )));
        }
        Ok(Matrix { cols: r.cols, ..m })
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(m: Matrix) -> Self {
        let data = (0..m.rows)
            .map(|i| m.row(i).iter().map(|&x| x as u64).collect())
            .collect();
        MatrixRepr { field: m.field, rows: m.rows, cols: m.cols, data }
    }
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<u64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, got: row.len() });
            }
            for &x in row {
                data.push(field.element(x)?.raw());
            }
        }
        Ok(Matrix { field, rows: rows.len(), cols, data })
    }

    /// Builds a matrix whose columns are the given raw vectors.
    pub fn from_columns(field: Field, rows: usize, columns: &[Vec<u32>]) -> Result<Self> {
        let mut m = Matrix::zeros(field, rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            m.set_column(j, c)?;
        }
        Ok(m)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.field.element(self.data[i * self.cols + j] as u64).expect("canonical")
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Column `j` (0-based) as a raw vector.
    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    /// Column at 1-based coordinate `c`.
    pub fn coord_column(&self, c: usize) -> Vec<u32> {
        self.column(c - 1)
    }

    pub fn columns(&self) -> Vec<Vec<u32>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[u32]) -> Result<()> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: v.len() });
        }
        if let Some(&bad) = v.iter().find(|&&x| x as u64 >= self.field.order()) {
            return Err(Error::NotCanonical { value: bad as u64, q: self.field.order() });
        }
        for (i, &x) in v.iter().enumerate() {
            self.data[i * self.cols + j] = x;
        }
        Ok(())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// Rank of the selected columns (all columns when `cols` is `None`).
    pub fn rank(&self, cols: Option<&ColumnSet>) -> Result<usize> {
        let mut ech = Echelon::new(self.field, self.rows);
        match cols {
            Some(set) => {
                set.check(self.cols)?;
                for &c in set.indices() {
                    ech.insert(&self.coord_column(c));
                }
            }
            None => {
                for j in 0..self.cols {
                    ech.insert(&self.column(j));
                }
            }
        }
        Ok(ech.rank())
    }

    /// Codeword `message * self`.
    pub fn encode(&self, message: &[u32]) -> Result<Vec<u32>> {
        if message.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, got: message.len() });
        }
        let f = self.field;
        let mut out = vec![0u32; self.cols];
        for (i, &mi) in message.iter().enumerate() {
            if mi == 0 {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(self.row(i)) {
                *o = f.add(*o, f.mul(mi, g));
            }
        }
        Ok(out)
    }
}

/// Incrementally built row-echelon basis of a subspace of `F^dim`.
///
/// Each stored vector has a unit pivot and is zero at the pivots of all
/// earlier vectors, so reducing against the stored vectors in insertion
/// order is exact and [`Echelon::truncate`] undoes later insertions. Walks over
/// overlapping column subsets keep one of these per prefix.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    dim: usize,
    basis: Vec<(usize, Vec<u32>)>,
}

impl Echelon {
    pub fn new(field: Field, dim: usize) -> Self {
        Echelon { field, dim, basis: Vec::with_capacity(dim) }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v` in place against the basis; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &mut [u32]) {
        let f = self.field;
        for (pivot, row) in &self.basis {
            let c = v[*pivot];
            if c != 0 {
                for (x, &y) in v.iter_mut().zip(row) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
    }

    /// Reduces `v` against only the newest basis vector.
    pub fn reduce_by_last(&self, v: &mut [u32]) {
        if let Some((pivot, row)) = self.basis.last() {
            let c = v[*pivot];
            if c != 0 {
                let f = self.field;
                for (x, &y) in v.iter_mut().zip(row) {
                    if y != 0 {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent of the basis; returns whether it was added.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.dim);
        let mut w = v.to_vec();
        self.reduce(&mut w);
        self.push_reduced(w)
    }

    /// Adds an already-reduced vector if it is nonzero.
    pub fn push_reduced(&mut self, mut w: Vec<u32>) -> bool {
        let Some(pivot) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let f = self.field;
        let inv = f.inv(w[pivot]).expect("nonzero pivot");
        for x in w.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.basis.push((pivot, w));
        true
    }

    pub fn truncate(&mut self, rank: usize) {
        self.basis.truncate(rank);
    }

    /// Basis in reduced row-echelon form, sorted by pivot.
    pub fn reduced_basis(&self) -> Vec<Vec<u32>> {
        let f = self.field;
        let mut rows: Vec<(usize, Vec<u32>)> = self.basis.clone();
        rows.sort_by_key(|(p, _)| *p);
        for i in 0..rows.len() {
            let (pi, ri) = rows[i].clone();
            for (j, (_, rj)) in rows.iter_mut().enumerate() {
                if j == i {
                    continue;
                }
                let c = rj[pi];
                if c != 0 {
                    for (x, &y) in rj.iter_mut().zip(&ri) {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
        }
        rows.into_iter().map(|(_, r)| r).collect()
    }
}

/// True iff appending `v` does not increase the rank of the selected columns.
pub fn in_span(v: &[FieldElement], basis_cols: &ColumnSet, m: &Matrix) -> Result<bool> {
    if v.len() != m.rows() {
        return Err(Error::DimensionMismatch { expected: m.rows(), got: v.len() });
    }
    if v.iter().any(|x| x.field() != m.field()) {
        return Err(Error::FieldMismatch);
    }
    basis_cols.check(m.cols())?;
    let mut ech = Echelon::new(m.field(), m.rows());
    for &c in basis_cols.indices() {
        ech.insert(&m.coord_column(c));
    }
    let raw: Vec<u32> = v.iter().map(|x| x.raw()).collect();
    Ok(ech.contains(&raw))
}

/// Every vector of the span of the selected columns, exactly once.
///
/// Vectors are produced in lexicographic order of their coefficient tuples
/// over the reduced row-echelon basis of the span (first basis vector most
/// significant).
pub fn span_enumerate(basis_cols: &ColumnSet, m: &Matrix, budget: u64) -> Result<SpanIter> {
    basis_cols.check(m.cols())?;
    let mut ech = Echelon::new(m.field(), m.rows());
    for &c in basis_cols.indices() {
        ech.insert(&m.coord_column(c));
    }
    SpanIter::new(m.field(), m.rows(), ech.reduced_basis(), budget)
}

/// Iterator over all linear combinations of a fixed basis.
#[derive(Clone, Debug)]
pub struct SpanIter {
    field: Field,
    dim: usize,
    basis: Vec<Vec<u32>>,
    coeffs: Vec<u32>,
    done: bool,
}

impl SpanIter {
    pub fn new(field: Field, dim: usize, basis: Vec<Vec<u32>>, budget: u64) -> Result<Self> {
        let count = (field.order() as u128).checked_pow(basis.len() as u32).unwrap_or(u128::MAX);
        if count > budget as u128 {
            return Err(Error::BudgetExceeded { needed: count, budget: budget as u128 });
        }
        let coeffs = vec![0; basis.len()];
        Ok(SpanIter { field, dim, basis, coeffs, done: false })
    }

    pub fn len_hint(&self) -> u128 {
        (self.field.order() as u128).pow(self.basis.len() as u32)
    }
}

impl Iterator for SpanIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let f = self.field;
        let mut v = vec![0u32; self.dim];
        for (c, b) in self.coeffs.iter().zip(&self.basis) {
            if *c != 0 {
                for (x, &y) in v.iter_mut().zip(b) {
                    *x = f.add(*x, f.mul(*c, y));
                }
            }
        }
        // odometer increment, last coefficient fastest
        let q = f.order() as u32;
        let mut i = self.coeffs.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.coeffs[i] += 1;
            if self.coeffs[i] < q {
                break;
            }
            self.coeffs[i] = 0;
        }
        Some(v)
    }
}
