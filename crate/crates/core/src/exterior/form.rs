use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DIM: usize = 7;

/// A strictly increasing multi-index stored as a bit mask; bit `i` is the
/// coframe element with label `i + 1`.
pub type Blade = u8;

pub fn blade_degree(b: Blade) -> usize {
    b.count_ones() as usize
}

/// 0-based indices of a blade in increasing order.
pub fn blade_indices(b: Blade) -> impl Iterator<Item = usize> {
    (0..DIM).filter(move |i| b & (1 << i) != 0)
}

/// All blades of degree `k`, in increasing numeric order.
pub fn blades_of_degree(k: usize) -> Vec<Blade> {
    (0u8..128).filter(|b| blade_degree(*b) == k).collect()
}

/// Sign of `e^a ∧ e^b` relative to `e^(a|b)`, or `None` when they share an index.
pub fn merge_sign(a: Blade, b: Blade) -> Option<i32> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0;
    for j in blade_indices(b) {
        swaps += (a >> (j + 1)).count_ones();
    }
    Some(if swaps % 2 == 0 { 1 } else { -1 })
}

/// Sign of `e_p ⌟ e^b` (0-based `p` in `b`).
fn interior_sign(p: usize, b: Blade) -> i32 {
    if (b & ((1u8 << p) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Canonicalize an arbitrary 0-based index list to (sign, blade).
pub fn canonical(indices: &[usize]) -> Option<(i32, Blade)> {
    let mut b: Blade = 0;
    let mut sign = 1;
    for &i in indices {
        assert!(i < DIM, "coframe index {i} out of range");
        let bit = 1u8 << i;
        if b & bit != 0 {
            return None;
        }
        // moving e^i to its sorted position past the larger indices already present
        if (b >> (i + 1)).count_ones() % 2 == 1 {
            sign = -sign;
        }
        b |= bit;
    }
    Some((sign, b))
}

fn apply_sign<S: Scalar>(sign: i32, v: S) -> S {
    if sign < 0 {
        -v
    } else {
        v
    }
}

/// Alternating form on the fixed 7-dimensional coframe.
#[derive(Clone, PartialEq)]
pub struct KForm<S> {
    degree: usize,
    coeffs: BTreeMap<Blade, S>,
}

impl<S: Scalar> KForm<S> {
    pub fn zero(degree: usize) -> Self {
        KForm {
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(s: S) -> Self {
        let mut f = Self::zero(0);
        f.add_term(0, s);
        f
    }

    /// `e^{l1} ∧ … ∧ e^{lk}` with 1-based labels in any order.
    pub fn basis(labels: &[usize]) -> Self {
        Self::term(S::one(), labels)
    }

    /// `c · e^{l1 … lk}` with 1-based labels.
    pub fn term(c: S, labels: &[usize]) -> Self {
        let idx: Vec<usize> = labels
            .iter()
            .map(|&l| {
                assert!((1..=DIM).contains(&l), "coframe label {l} out of range");
                l - 1
            })
            .collect();
        let mut f = Self::zero(idx.len());
        if let Some((sign, b)) = canonical(&idx) {
            f.add_term(b, apply_sign(sign, c));
        }
        f
    }

    /// Build from `(blade, coefficient)` pairs, accumulating duplicates.
    pub fn from_blades(degree: usize, terms: impl IntoIterator<Item = (Blade, S)>) -> Self {
        let mut f = Self::zero(degree);
        for (b, c) in terms {
            assert_eq!(blade_degree(b), degree, "blade degree mismatch");
            f.add_term(b, c);
        }
        f
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn approx_zero(&self, tol: f64) -> bool {
        self.coeffs.values().all(|c| c.approx_zero(tol))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.degree == other.degree && (self.clone() - other.clone()).approx_zero(tol)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Blade, &S)> {
        self.coeffs.iter().map(|(b, c)| (*b, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, b: Blade) -> S {
        self.coeffs.get(&b).cloned().unwrap_or_else(S::zero)
    }

    /// Component `a_{l1…lk}` for 1-based labels in any order.
    pub fn component(&self, labels: &[usize]) -> S {
        let idx: Vec<usize> = labels.iter().map(|l| l - 1).collect();
        match canonical(&idx) {
            Some((sign, b)) => apply_sign(sign, self.coeff(b)),
            None => S::zero(),
        }
    }

    /// Coefficient of a degree-0 form.
    pub fn as_scalar(&self) -> S {
        debug_assert_eq!(self.degree, 0);
        self.coeff(0)
    }

    /// Coefficient of `e^{1…7}` of a top-degree form.
    pub fn top_coefficient(&self) -> S {
        debug_assert_eq!(self.degree, DIM);
        self.coeff(0x7f)
    }

    pub(crate) fn add_term(&mut self, b: Blade, c: S) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.remove(&b) {
            Some(old) => {
                let v = old + c;
                if !v.is_zero() {
                    self.coeffs.insert(b, v);
                }
            }
            None => {
                self.coeffs.insert(b, c);
            }
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(self.degree);
        }
        let mut out = Self::zero(self.degree);
        for (b, c) in &self.coeffs {
            out.add_term(*b, c.clone() * s.clone());
        }
        out
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> KForm<T> {
        let mut out = KForm::zero(self.degree);
        for (b, c) in &self.coeffs {
            out.add_term(*b, f(c));
        }
        out
    }

    /// Exterior product. Forms whose degrees sum past 7 give the zero form of
    /// the summed degree.
    pub fn wedge(&self, other: &Self) -> Self {
        let degree = self.degree + other.degree;
        let mut out = Self::zero(degree);
        if degree > DIM {
            return out;
        }
        for (ba, ca) in &self.coeffs {
            for (bb, cb) in &other.coeffs {
                if let Some(sign) = merge_sign(*ba, *bb) {
                    out.add_term(ba | bb, apply_sign(sign, ca.clone() * cb.clone()));
                }
            }
        }
        out
    }

    /// Contraction with the `p`-th frame vector (0-based).
    pub fn interior_basis(&self, p: usize) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::ContractScalar);
        }
        let bit = 1u8 << p;
        let mut out = Self::zero(self.degree - 1);
        for (b, c) in &self.coeffs {
            if b & bit != 0 {
                out.add_term(b & !bit, apply_sign(interior_sign(p, *b), c.clone()));
            }
        }
        Ok(out)
    }

    /// Interior product `X ⌟ a`.
    pub fn interior(&self, x: &Vector<S>) -> Result<Self> {
        if self.degree == 0 {
            return Err(Error::ContractScalar);
        }
        let mut out = Self::zero(self.degree - 1);
        for p in 0..DIM {
            if x[p].is_zero() {
                continue;
            }
            out = out + self.interior_basis(p)?.scale(&x[p]);
        }
        Ok(out)
    }

    /// Pullback under the linear map with matrix `p`, sending `e^i` to
    /// `Σ_a p[i][a] e^a`.
    pub fn pullback(&self, p: &[Vec<S>]) -> Self {
        let images: Vec<KForm<S>> = (0..DIM)
            .map(|i| KForm::from_blades(1, (0..DIM).map(|a| (1u8 << a, p[i][a].clone()))))
            .collect();
        let mut out = Self::zero(self.degree);
        for (b, c) in &self.coeffs {
            let mut acc = KForm::scalar(c.clone());
            for i in blade_indices(*b) {
                acc = acc.wedge(&images[i]);
            }
            out = out + acc;
        }
        out
    }

    /// Fully antisymmetric component array of length `7^k` (row-major).
    pub fn to_dense(&self) -> Vec<S> {
        let k = self.degree;
        let mut out = vec![S::zero(); DIM.pow(k as u32)];
        for (b, c) in &self.coeffs {
            let idx: Vec<usize> = blade_indices(*b).collect();
            for_each_permutation(&idx, |perm, sign| {
                let flat = perm.iter().fold(0, |acc, &i| acc * DIM + i);
                out[flat] = apply_sign(sign, c.clone());
            });
        }
        out
    }

    /// Inverse of [`KForm::to_dense`], reading the strictly increasing entries.
    pub fn from_dense(degree: usize, dense: &[S]) -> Self {
        let mut out = Self::zero(degree);
        for b in blades_of_degree(degree) {
            let flat = blade_indices(b).fold(0, |acc, i| acc * DIM + i);
            out.add_term(b, dense[flat].clone());
        }
        out
    }
}

/// Calls `f(permutation, sign)` for every permutation of `items`.
pub(crate) fn for_each_permutation(items: &[usize], mut f: impl FnMut(&[usize], i32)) {
    let mut v = items.to_vec();
    let n = v.len();
    fn rec(v: &mut Vec<usize>, k: usize, sign: i32, f: &mut dyn FnMut(&[usize], i32)) {
        let n = v.len();
        if k + 1 >= n {
            f(v, sign);
            return;
        }
        for i in k..n {
            v.swap(k, i);
            rec(v, k + 1, if i == k { sign } else { -sign }, f);
            v.swap(k, i);
        }
    }
    if n == 0 {
        f(&v, 1);
    } else {
        rec(&mut v, 0, 1, &mut f);
    }
}

impl<S: Scalar> Add for KForm<S> {
    type Output = KForm<S>;
    fn add(mut self, rhs: KForm<S>) -> KForm<S> {
        assert_eq!(self.degree, rhs.degree, "adding forms of different degree");
        for (b, c) in rhs.coeffs {
            self.add_term(b, c);
        }
        self
    }
}

impl<S: Scalar> Sub for KForm<S> {
    type Output = KForm<S>;
    fn sub(mut self, rhs: KForm<S>) -> KForm<S> {
        assert_eq!(
            self.degree, rhs.degree,
            "subtracting forms of different degree"
        );
        for (b, c) in rhs.coeffs {
            self.add_term(b, -c);
        }
        self
    }
}

impl<S: Scalar> Neg for KForm<S> {
    type Output = KForm<S>;
    fn neg(self) -> KForm<S> {
        let degree = self.degree;
        KForm {
            degree,
            coeffs: self.coeffs.into_iter().map(|(b, c)| (b, -c)).collect(),
        }
    }
}

impl<S: Scalar> fmt::Debug for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KForm<{}>({})", self.degree, self)
    }
}

impl<S: Scalar> fmt::Display for KForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(b, c)| {
                let label: String = blade_indices(*b).map(|i| (i + 1).to_string()).collect();
                if self.degree == 0 {
                    format!("({c})")
                } else {
                    format!("({c}) e{label}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Components in the frame `e_1 … e_7` dual to the coframe.
#[derive(Clone, PartialEq)]
pub struct Vector<S>(pub Vec<S>);

impl<S: Scalar> Vector<S> {
    pub fn zero() -> Self {
        Vector(vec![S::zero(); DIM])
    }

    /// Frame vector `e_label` (1-based).
    pub fn basis(label: usize) -> Self {
        let mut v = Self::zero();
        v.0[label - 1] = S::one();
        v
    }

    pub fn from_fn(f: impl FnMut(usize) -> S) -> Self {
        Vector((0..DIM).map(f).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn approx_zero(&self, tol: f64) -> bool {
        self.0.iter().all(|c| c.approx_zero(tol))
    }

    pub fn scale(&self, s: &S) -> Self {
        Vector(self.0.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Vector(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        )
    }

    /// Reinterpret the components as a 1-form (no metric involved).
    pub fn as_one_form(&self) -> KForm<S> {
        KForm::from_blades(1, (0..DIM).map(|i| (1u8 << i, self.0[i].clone())))
    }

    pub fn from_one_form(a: &KForm<S>) -> Result<Self> {
        if a.degree() != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                got: a.degree(),
            });
        }
        Ok(Vector::from_fn(|i| a.coeff(1 << i)))
    }
}

impl<S> std::ops::Index<usize> for Vector<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

impl<S: Scalar> fmt::Debug for Vector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "Vector[{}]", parts.join(", "))
    }
}
