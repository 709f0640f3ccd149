use std::fmt;
use std::ops::{Add, Neg, Sub};

use super::form::{Vector, DIM};
use crate::scalar::Scalar;

/// A covariant 2-tensor `Σ A_ij e^i ⊗ e^j` stored as a dense 7×7 matrix.
#[derive(Clone, PartialEq)]
pub struct Tensor2<S> {
    rows: Vec<Vec<S>>,
}

/// Symmetric 2-tensors share the representation; see [`Tensor2::is_symmetric`].
pub type Sym2<S> = Tensor2<S>;

impl<S: Scalar> Tensor2<S> {
    pub fn zero() -> Self {
        Tensor2 {
            rows: vec![vec![S::zero(); DIM]; DIM],
        }
    }

    pub fn identity() -> Self {
        Self::diagonal(&vec![S::one(); DIM])
    }

    pub fn diagonal(d: &[S]) -> Self {
        assert_eq!(d.len(), DIM);
        let mut t = Self::zero();
        for (i, v) in d.iter().enumerate() {
            t.rows[i][i] = v.clone();
        }
        t
    }

    pub fn from_fn(mut f: impl FnMut(usize, usize) -> S) -> Self {
        Tensor2 {
            rows: (0..DIM)
                .map(|i| (0..DIM).map(|j| f(i, j)).collect())
                .collect(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        assert!(rows.len() == DIM && rows.iter().all(|r| r.len() == DIM));
        Tensor2 { rows }
    }

    /// `u ⊙ v = ½(u ⊗ v + v ⊗ u)` for 1-form components `u`, `v`.
    pub fn sym_product(u: &[S], v: &[S]) -> Self {
        let half = S::from_ratio(1, 2);
        Self::from_fn(|i, j| {
            half.clone() * (u[i].clone() * v[j].clone() + u[j].clone() * v[i].clone())
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.rows[i][j] = v;
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.rows[j][i].clone())
    }

    pub fn is_symmetric(&self) -> bool {
        (0..DIM).all(|i| (i + 1..DIM).all(|j| self.rows[i][j] == self.rows[j][i]))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..DIM).all(|i| (0..DIM).all(|j| i == j || self.rows[i][j].is_zero()))
    }

    pub fn symmetrize(&self) -> Self {
        let half = S::from_ratio(1, 2);
        Self::from_fn(|i, j| half.clone() * (self.rows[i][j].clone() + self.rows[j][i].clone()))
    }

    pub fn skew(&self) -> Self {
        let half = S::from_ratio(1, 2);
        Self::from_fn(|i, j| half.clone() * (self.rows[i][j].clone() - self.rows[j][i].clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|c| c.is_zero())
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn scale(&self, s: &S) -> Self {
        Self::from_fn(|i, j| self.rows[i][j].clone() * s.clone())
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Tensor2<T> {
        Tensor2::from_fn(|i, j| f(&self.rows[i][j]))
    }

    /// Plain matrix product `Σ_a A_ia B_aj` (no metric).
    pub fn matmul(&self, other: &Self) -> Self {
        Self::from_fn(|i, j| {
            let mut acc = S::zero();
            for a in 0..DIM {
                if self.rows[i][a].is_zero() || other.rows[a][j].is_zero() {
                    continue;
                }
                acc = acc + self.rows[i][a].clone() * other.rows[a][j].clone();
            }
            acc
        })
    }

    /// `Σ_j A_ij v_j`.
    pub fn apply(&self, v: &[S]) -> Vec<S> {
        (0..DIM)
            .map(|i| {
                let mut acc = S::zero();
                for j in 0..DIM {
                    if self.rows[i][j].is_zero() || v[j].is_zero() {
                        continue;
                    }
                    acc = acc + self.rows[i][j].clone() * v[j].clone();
                }
                acc
            })
            .collect()
    }

    pub fn apply_vector(&self, v: &Vector<S>) -> Vector<S> {
        Vector(self.apply(&v.0))
    }

    /// Plain trace `Σ A_ii`.
    pub fn trace(&self) -> S {
        (0..DIM).fold(S::zero(), |acc, i| acc + self.rows[i][i].clone())
    }

    /// `Σ_ij A_ij B_ij`.
    pub fn frobenius(&self, other: &Self) -> S {
        let mut acc = S::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                if self.rows[i][j].is_zero() || other.rows[i][j].is_zero() {
                    continue;
                }
                acc = acc + self.rows[i][j].clone() * other.rows[i][j].clone();
            }
        }
        acc
    }
}

impl<S: Scalar> Add for Tensor2<S> {
    type Output = Tensor2<S>;
    fn add(self, rhs: Self) -> Self {
        Tensor2::from_fn(|i, j| self.rows[i][j].clone() + rhs.rows[i][j].clone())
    }
}

impl<S: Scalar> Sub for Tensor2<S> {
    type Output = Tensor2<S>;
    fn sub(self, rhs: Self) -> Self {
        Tensor2::from_fn(|i, j| self.rows[i][j].clone() - rhs.rows[i][j].clone())
    }
}

impl<S: Scalar> Neg for Tensor2<S> {
    type Output = Tensor2<S>;
    fn neg(self) -> Self {
        Tensor2::from_fn(|i, j| -self.rows[i][j].clone())
    }
}

impl<S: Scalar> fmt::Debug for Tensor2<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Tensor2[")?;
        for row in &self.rows {
            let parts: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            writeln!(f, "  [{}]", parts.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Dense rank-`r` array with 7 values per slot, row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct Array<S> {
    rank: usize,
    data: Vec<S>,
}

impl<S: Scalar> Array<S> {
    pub fn zero(rank: usize) -> Self {
        Array {
            rank,
            data: vec![S::zero(); DIM.pow(rank as u32)],
        }
    }

    pub fn from_vec(rank: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), DIM.pow(rank as u32));
        Array { rank, data }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn flat_index(idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * DIM + i)
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        debug_assert_eq!(idx.len(), self.rank);
        &self.data[Self::flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        let k = Self::flat_index(idx);
        self.data[k] = v;
    }

    pub fn add_at(&mut self, idx: &[usize], v: S) {
        if v.is_zero() {
            return;
        }
        let k = Self::flat_index(idx);
        let old = std::mem::replace(&mut self.data[k], S::zero());
        self.data[k] = old + v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    /// Contract every slot with `m` (`m` applied as `Σ_b m[a][b] x_{..b..}`).
    pub fn transform_all(&self, m: &Tensor2<S>) -> Self {
        if m.is_diagonal() {
            let diag: Vec<S> = (0..DIM).map(|i| m.get(i, i).clone()).collect();
            let mut out = self.clone();
            for (flat, v) in out.data.iter_mut().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let mut rem = flat;
                let mut factor = S::one();
                for _ in 0..self.rank {
                    factor = factor * diag[rem % DIM].clone();
                    rem /= DIM;
                }
                *v = v.clone() * factor;
            }
            return out;
        }
        let mut cur = self.clone();
        for slot in 0..self.rank {
            let stride = DIM.pow((self.rank - 1 - slot) as u32);
            let mut next = Array::zero(self.rank);
            for (flat, v) in cur.data.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let b = (flat / stride) % DIM;
                let base = flat - b * stride;
                for a in 0..DIM {
                    let mab = m.get(a, b);
                    if mab.is_zero() {
                        continue;
                    }
                    let k = base + a * stride;
                    let old = std::mem::replace(&mut next.data[k], S::zero());
                    next.data[k] = old + mab.clone() * v.clone();
                }
            }
            cur = next;
        }
        cur
    }

    /// `Σ a_I b_I` over all index tuples.
    pub fn dot(&self, other: &Self) -> S {
        self.data
            .iter()
            .zip(&other.data)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
    }
}
