//! Exact linear algebra over the rationals.
//!
//! Two independent eliminations live here. [`exact_kernel_and_rank`] runs a
//! dense Bareiss elimination on an integer-scaled copy of the matrix and reads
//! the kernel off the echelon form. [`RankAccumulator`] is an incremental
//! sparse echelon basis with primitive integer rows; the cohomology engine uses
//! it for large, very sparse blocks. Tests check that the two agree.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::poly::Rational;

/// Dense row-major rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<Rational>>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![vec![Rational::zero(); cols]; rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i][i] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    /// Builds an `rows × columns.len()` matrix from sparse columns.
    pub fn from_sparse_columns(rows: usize, columns: &[SparseVec]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            for (&i, c) in col {
                m.data[i][j] = c.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i][j] = v;
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        self.data
            .iter()
            .map(|row| row.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.data[i][k].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self.data[i][k] * &other.data[k][j];
                    out.data[i][j] += t;
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().flatten().all(Zero::is_zero)
    }
}

/// Sparse vector: index to nonzero entry.
pub type SparseVec = BTreeMap<usize, Rational>;

/// Multiplies a row by the lcm of its denominators, giving an integer row with
/// the same span.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let l = row
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    row.iter()
        .map(|c| (c * Rational::from_integer(l.clone())).to_integer())
        .collect()
}

/// Rank and a rational kernel basis of `mat`, by fraction-free Bareiss
/// elimination. An empty matrix has rank 0 and the full coordinate space as
/// kernel.
pub fn exact_kernel_and_rank(mat: &Matrix) -> (usize, Vec<Vec<Rational>>) {
    let (rows, cols) = (mat.rows, mat.cols);
    let mut a: Vec<Vec<BigInt>> = mat.data.iter().map(|r| integer_row(r)).collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for k in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][k].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in k + 1..cols {
                let num = &a[r][k] * &a[i][j] - &a[i][k] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[r][k].clone();
        pivots.push(k);
        r += 1;
    }
    let rank = pivots.len();

    let mut is_pivot = vec![false; cols];
    for &k in &pivots {
        is_pivot[k] = true;
    }
    let mut kernel = Vec::new();
    for free in (0..cols).filter(|&j| !is_pivot[j]) {
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        for (row, &pc) in pivots.iter().enumerate().rev() {
            let mut s = Rational::zero();
            for j in pc + 1..cols {
                if !a[row][j].is_zero() && !x[j].is_zero() {
                    s += Rational::from_integer(a[row][j].clone()) * &x[j];
                }
            }
            x[pc] = -s / Rational::from_integer(a[row][pc].clone());
        }
        kernel.push(x);
    }
    (rank, kernel)
}

/// Incremental echelon basis of a growing set of sparse vectors. Each stored
/// row is a primitive integer vector whose leading index is unique.
#[derive(Clone, Debug, Default)]
pub struct RankAccumulator {
    pivots: BTreeMap<usize, Vec<(usize, BigInt)>>,
}

fn primitive(mut v: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
    let g = v.iter().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c));
    if !g.is_zero() && !g.is_one() {
        for (_, c) in v.iter_mut() {
            *c /= &g;
        }
    }
    if v.first().is_some_and(|(_, c)| c.is_negative()) {
        for (_, c) in v.iter_mut() {
            *c = -&*c;
        }
    }
    v
}

fn to_integer_sparse(v: &SparseVec) -> Vec<(usize, BigInt)> {
    let l = v.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let scale = BigRational::from_integer(l);
    primitive(
        v.iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(&i, c)| (i, (c * &scale).to_integer()))
            .collect(),
    )
}

/// `a·u − b·w` on sorted sparse integer vectors.
fn combine(
    a: &BigInt,
    u: &[(usize, BigInt)],
    b: &BigInt,
    w: &[(usize, BigInt)],
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(u.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < u.len() || j < w.len() {
        let take_u = j == w.len() || (i < u.len() && u[i].0 < w[j].0);
        let take_w = i == u.len() || (j < w.len() && w[j].0 < u[i].0);
        if take_u {
            out.push((u[i].0, a * &u[i].1));
            i += 1;
        } else if take_w {
            out.push((w[j].0, -(b * &w[j].1)));
            j += 1;
        } else {
            let c = a * &u[i].1 - b * &w[j].1;
            if !c.is_zero() {
                out.push((u[i].0, c));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

impl RankAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `v` against the basis; returns the (primitive) remainder.
    fn reduce(&self, mut v: Vec<(usize, BigInt)>) -> Vec<(usize, BigInt)> {
        loop {
            let Some((lead, lc)) = v.first().cloned() else {
                return v;
            };
            let Some(p) = self.pivots.get(&lead) else {
                return v;
            };
            let pc = &p[0].1;
            let g = lc.gcd(pc);
            v = primitive(combine(&(pc / &g), &v, &(&lc / &g), p));
        }
    }

    /// Adds `v`; returns whether it enlarged the span.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(to_integer_sparse(v));
        match r.first() {
            None => false,
            Some(&(lead, _)) => {
                self.pivots.insert(lead, r);
                true
            }
        }
    }

    /// Whether `v` lies in the current span.
    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(to_integer_sparse(v)).is_empty()
    }
}

/// Rank of a family of sparse vectors.
pub fn sparse_rank<'a, I: IntoIterator<Item = &'a SparseVec>>(vectors: I) -> usize {
    let mut acc = RankAccumulator::new();
    for v in vectors {
        acc.insert(v);
    }
    acc.rank()
}
