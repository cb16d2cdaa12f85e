//! Exact linear algebra over ℚ.
//!
//! Elimination is fraction-free (Bareiss) on integer-scaled rows, followed by
//! a back-substitution pass over ℚ that brings the result into reduced row
//! echelon form. Pivots are always the first nonzero entry in column order,
//! so every [`Subspace`] basis is canonical.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rat::{self, Rat};

pub type Vector = Vec<Rat>;

/// Sparse row used when assembling large coefficient-comparison systems.
pub type SparseRow = BTreeMap<usize, Rat>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rat>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            entries: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, Rat::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vector>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            entries.extend(r);
        }
        Ok(QMatrix {
            rows: n,
            cols,
            entries,
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| rat::int(x)).collect())
            .collect();
        Self::from_rows(rows, cols).expect("ragged matrix literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: Rat) {
        self.entries[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Rat]) -> Result<Vector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: x.len(),
            });
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn rank(&self) -> usize {
        rref(self.row_vectors(), self.cols).1.len()
    }

    fn row_vectors(&self) -> Vec<Vector> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }
}

/// A linear subspace of ℚⁿ held as its reduced row echelon basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
    pivots: Vec<usize>,
}

/// Outcome of a membership test, with a certificate either way.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Coordinates with respect to [`Subspace::basis`].
    Inside { coords: Vector },
    /// A functional vanishing on the subspace but not on the vector.
    Outside { functional: Vector },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::Inside { .. })
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, (0..ambient).map(|k| unit(ambient, k)).collect())
            .expect("unit vectors have the right length")
    }

    pub fn span(ambient: usize, vectors: Vec<Vector>) -> Result<Self> {
        if let Some(bad) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                found: bad.len(),
            });
        }
        let (basis, pivots) = rref(vectors, ambient);
        Ok(Subspace {
            ambient,
            basis,
            pivots,
        })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn contains(&self, v: &[Rat]) -> Result<bool> {
        Ok(in_span(v, self)?.is_inside())
    }

    pub fn contains_subspace(&self, other: &Subspace) -> Result<bool> {
        for b in &other.basis {
            if !self.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The sum `self + other`.
    pub fn join(&self, other: &Subspace) -> Result<Subspace> {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, vs)
    }

    pub fn with_vectors(&self, extra: &[Vector]) -> Result<Subspace> {
        let mut vs = self.basis.clone();
        vs.extend(extra.iter().cloned());
        Subspace::span(self.ambient, vs)
    }

    /// Intersection with the coordinate subspace `{x : x_c = 0 for c ∈ coords}`.
    pub fn restrict_zero(&self, coords: &[usize]) -> Subspace {
        if self.basis.is_empty() || coords.is_empty() {
            return self.clone();
        }
        let k = self.basis.len();
        let rows: Vec<Vector> = coords
            .iter()
            .map(|&c| self.basis.iter().map(|b| b[c].clone()).collect())
            .collect();
        let m = QMatrix::from_rows(rows, k).expect("rectangular by construction");
        let combos = kernel(&m);
        let vectors = combos
            .basis
            .iter()
            .map(|y| combine(&self.basis, y, self.ambient))
            .collect();
        Subspace::span(self.ambient, vectors).expect("ambient preserved")
    }

    /// Reduces `v` against the basis, returning the remainder.
    pub fn reduce(&self, v: &[Rat]) -> Vector {
        let mut r = v.to_vec();
        for (b, &pc) in self.basis.iter().zip(&self.pivots) {
            if r[pc].is_zero() {
                continue;
            }
            let f = r[pc].clone();
            for (x, y) in r.iter_mut().zip(b) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        r
    }
}

pub fn unit(n: usize, k: usize) -> Vector {
    let mut v = vec![Rat::zero(); n];
    v[k] = Rat::one();
    v
}

pub fn is_zero_vector(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn combine(basis: &[Vector], coeffs: &[Rat], n: usize) -> Vector {
    let mut out = vec![Rat::zero(); n];
    for (b, y) in basis.iter().zip(coeffs) {
        if y.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            if !x.is_zero() {
                *o += y * x;
            }
        }
    }
    out
}

/// Fraction-free forward elimination on integer rows. Returns the echelon
/// rows (zero rows dropped) and their pivot columns.
fn bareiss(mut a: Vec<Vec<BigInt>>, ncols: usize) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let nrows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    let mut pivots = Vec::new();
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        let piv = &pivot_row[col];
        for row in tail.iter_mut() {
            let lead = std::mem::take(&mut row[col]);
            for j in col + 1..ncols {
                let num = piv * &row[j] - &lead * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
        }
        prev = a[r][col].clone();
        pivots.push(col);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Reduced row echelon form of the given rows over ℚ.
pub fn rref(rows: Vec<Vector>, ncols: usize) -> (Vec<Vector>, Vec<usize>) {
    let ints: Vec<Vec<BigInt>> = rows
        .into_iter()
        .filter(|r| !is_zero_vector(r))
        .map(|r| {
            let l = rat::denominator_lcm(r.iter());
            r.iter()
                .map(|x| (x * Rat::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    let (echelon, pivots) = bareiss(ints, ncols);
    let mut out: Vec<Vector> = echelon
        .into_iter()
        .zip(&pivots)
        .map(|(row, &pc)| {
            let piv = Rat::from_integer(row[pc].clone());
            row.into_iter()
                .map(|x| Rat::from_integer(x) / &piv)
                .collect()
        })
        .collect();
    for k in (0..out.len()).rev() {
        let pc = pivots[k];
        let (above, rest) = out.split_at_mut(k);
        let pivot_row = &rest[0];
        for row in above.iter_mut() {
            if row[pc].is_zero() {
                continue;
            }
            let f = row[pc].clone();
            for (x, y) in row.iter_mut().zip(pivot_row).skip(pc) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
    }
    (out, pivots)
}

/// Exact null space of `m`.
pub fn kernel(m: &QMatrix) -> Subspace {
    kernel_of_rows(m.row_vectors(), m.cols)
}

fn kernel_of_rows(rows: Vec<Vector>, ncols: usize) -> Subspace {
    let (reduced, pivots) = rref(rows, ncols);
    let pivot_set: BTreeSet<usize> = pivots.iter().copied().collect();
    let vectors = (0..ncols)
        .filter(|c| !pivot_set.contains(c))
        .map(|free| {
            let mut v = unit(ncols, free);
            for (row, &pc) in reduced.iter().zip(&pivots) {
                v[pc] = -row[free].clone();
            }
            v
        })
        .collect();
    Subspace::span(ncols, vectors).expect("kernel vectors have ambient length")
}

/// Null space of a sparse system. Columns that never share a row are
/// solved independently, which keeps each dense elimination small.
pub fn kernel_sparse(rows: &[SparseRow], ncols: usize) -> Subspace {
    let mut parent: Vec<usize> = (0..ncols).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for row in rows {
        let mut cols = row.keys();
        if let Some(&first) = cols.next() {
            for &c in cols {
                let (a, b) = (find(&mut parent, first), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: BTreeMap<usize, (Vec<usize>, BTreeSet<SparseRowKey>)> = BTreeMap::new();
    for c in 0..ncols {
        let root = find(&mut parent, c);
        blocks.entry(root).or_default().0.push(c);
    }
    for row in rows {
        if let Some(&first) = row.keys().next() {
            let root = find(&mut parent, first);
            blocks
                .get_mut(&root)
                .expect("every column has a block")
                .1
                .insert(SparseRowKey::normalized(row));
        }
    }
    let mut vectors = Vec::new();
    for (cols, block_rows) in blocks.into_values() {
        let local: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let dense: Vec<Vector> = block_rows
            .into_iter()
            .map(|r| {
                let mut v = vec![Rat::zero(); cols.len()];
                for (c, x) in r.0 {
                    v[local[&c]] = x;
                }
                v
            })
            .collect();
        let ker = kernel_of_rows(dense, cols.len());
        for b in ker.basis {
            let mut v = vec![Rat::zero(); ncols];
            for (k, x) in b.into_iter().enumerate() {
                v[cols[k]] = x;
            }
            vectors.push(v);
        }
    }
    Subspace::span(ncols, vectors).expect("embedded kernel vectors have ambient length")
}

/// A sparse row scaled so its first entry is one; used to drop duplicates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct SparseRowKey(Vec<(usize, Rat)>);

impl SparseRowKey {
    fn normalized(row: &SparseRow) -> Self {
        let lead = row.values().next().cloned().unwrap_or_else(Rat::one);
        SparseRowKey(
            row.iter()
                .filter(|(_, x)| !x.is_zero())
                .map(|(&c, x)| (c, x / &lead))
                .collect(),
        )
    }
}

/// Decides whether `v` lies in `space`.
pub fn in_span(v: &[Rat], space: &Subspace) -> Result<Membership> {
    if v.len() != space.ambient {
        return Err(Error::DimensionMismatch {
            expected: space.ambient,
            found: v.len(),
        });
    }
    let r = space.reduce(v);
    match r.iter().position(|x| !x.is_zero()) {
        None => Ok(Membership::Inside {
            coords: space.pivots.iter().map(|&pc| v[pc].clone()).collect(),
        }),
        Some(c) => {
            // f = e_c* − Σ_k b_k[c] e_{pivot_k}*  kills every basis row
            let mut functional = unit(space.ambient, c);
            for (b, &pc) in space.basis.iter().zip(&space.pivots) {
                functional[pc] = -b[c].clone();
            }
            Ok(Membership::Outside { functional })
        }
    }
}

/// Some `y` with `Σ y_k vectors[k] = target`, if one exists.
pub fn solve_combination(vectors: &[Vector], target: &[Rat]) -> Option<Vector> {
    let n = target.len();
    let k = vectors.len();
    // columns: the k coefficients and then the right-hand side
    let rows: Vec<SparseRow> = (0..n)
        .map(|r| {
            let mut row: SparseRow = vectors
                .iter()
                .enumerate()
                .filter(|(_, vec)| !vec[r].is_zero())
                .map(|(col, vec)| (col, vec[r].clone()))
                .collect();
            if !target[r].is_zero() {
                row.insert(k, -target[r].clone());
            }
            row
        })
        .filter(|row| !row.is_empty())
        .collect();
    let ker = kernel_sparse(&rows, k + 1);
    let sol = ker.basis().iter().find(|b| !b[k].is_zero())?;
    let norm = sol[k].clone();
    Some(sol[..k].iter().map(|q| q / &norm).collect())
}

/// `dim(space) − dim(sub)` after checking `sub ⊆ space`.
pub fn quotient_dim(space: &Subspace, sub: &Subspace) -> Result<usize> {
    if space.ambient != sub.ambient {
        return Err(Error::DimensionMismatch {
            expected: space.ambient,
            found: sub.ambient,
        });
    }
    for (index, b) in sub.basis.iter().enumerate() {
        if !in_span(b, space)?.is_inside() {
            return Err(Error::NotASubspace { index });
        }
    }
    Ok(space.dim() - sub.dim())
}
