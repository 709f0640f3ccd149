use std::fmt;
use std::sync::OnceLock;

use super::form::{blade_indices, blades_of_degree, merge_sign, KForm, Vector, DIM};
use super::tensor::Tensor2;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::Scalar;

const FULL: u8 = 0x7f;

/// A positive definite inner product on the frame together with its inverse
/// and volume factor `sqrt(det g)`.
#[derive(Clone)]
pub struct Metric<S: Scalar> {
    g: Tensor2<S>,
    g_inv: Tensor2<S>,
    vol_factor: S,
    diagonal: bool,
    // all minors of g_inv, indexed [row blade * 128 + column blade]
    compound: OnceLock<Vec<S>>,
}

impl<S: Scalar> PartialEq for Metric<S> {
    fn eq(&self, other: &Self) -> bool {
        self.g == other.g && self.vol_factor == other.vol_factor
    }
}

impl<S: Scalar> fmt::Debug for Metric<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Metric")
            .field("g", &self.g)
            .field("vol_factor", &self.vol_factor)
            .finish()
    }
}

fn leading_minors_positive<S: Scalar>(g: &Tensor2<S>) -> bool {
    (1..=DIM).all(|k| {
        let m: Vec<Vec<S>> = (0..k).map(|i| g.rows()[i][..k].to_vec()).collect();
        linalg::determinant(m).is_positive()
    })
}

impl<S: Scalar> Metric<S> {
    /// Validates `g` (symmetric, all leading principal minors positive) and
    /// computes `sqrt(det g)` in the backend.
    pub fn new(g: Tensor2<S>) -> Result<Self> {
        if !g.is_symmetric() || !leading_minors_positive(&g) {
            return Err(Error::NotPositiveDefinite);
        }
        let det = linalg::determinant(g.rows().to_vec());
        let vol_factor = det.root(2).ok_or(Error::IrrationalVolume)?;
        Self::assemble(g, vol_factor)
    }

    /// Like [`Metric::new`] when `sqrt(det g)` is already known.
    pub fn with_volume_factor(g: Tensor2<S>, vol_factor: S) -> Result<Self> {
        if !g.is_symmetric() || !leading_minors_positive(&g) || !vol_factor.is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        Self::assemble(g, vol_factor)
    }

    fn assemble(g: Tensor2<S>, vol_factor: S) -> Result<Self> {
        let diagonal = g.is_diagonal();
        let g_inv = if diagonal {
            Tensor2::diagonal(
                &(0..DIM)
                    .map(|i| S::one() / g.get(i, i).clone())
                    .collect::<Vec<_>>(),
            )
        } else {
            Tensor2::from_rows(linalg::inverse(g.rows()).ok_or(Error::NotPositiveDefinite)?)
        };
        Ok(Metric {
            g,
            g_inv,
            vol_factor,
            diagonal,
            compound: OnceLock::new(),
        })
    }

    pub fn identity() -> Self {
        Metric {
            g: Tensor2::identity(),
            g_inv: Tensor2::identity(),
            vol_factor: S::one(),
            diagonal: true,
            compound: OnceLock::new(),
        }
    }

    pub fn g(&self) -> &Tensor2<S> {
        &self.g
    }

    pub fn g_inv(&self) -> &Tensor2<S> {
        &self.g_inv
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// `sqrt(det g)`, the coefficient of `vol` on `e^{1…7}`.
    pub fn vol_factor(&self) -> &S {
        &self.vol_factor
    }

    pub fn vol(&self) -> KForm<S> {
        KForm::from_blades(DIM, [(FULL, self.vol_factor.clone())])
    }

    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> Metric<T> {
        Metric {
            g: self.g.map(&mut f),
            g_inv: self.g_inv.map(&mut f),
            vol_factor: f(&self.vol_factor),
            diagonal: self.diagonal,
            compound: OnceLock::new(),
        }
    }

    /// `det(g^{-1}[I, J])`, the induced inverse metric on blades.
    fn inverse_minor(&self, a: u8, b: u8) -> S {
        if self.diagonal {
            if a != b {
                return S::zero();
            }
            return blade_indices(a).fold(S::one(), |acc, i| acc * self.g_inv.get(i, i).clone());
        }
        self.compound.get_or_init(|| self.build_compound())[a as usize * 128 + b as usize].clone()
    }

    /// Laplace expansion along the lowest row index, degree by degree.
    fn build_compound(&self) -> Vec<S> {
        let mut table = vec![S::zero(); 128 * 128];
        table[0] = S::one();
        for k in 1..=DIM {
            for a in blades_of_degree(k) {
                let i1 = a.trailing_zeros() as usize;
                let rest = a & !(1u8 << i1);
                for b in blades_of_degree(k) {
                    let mut acc = S::zero();
                    for (s, j) in blade_indices(b).enumerate() {
                        let entry = self.g_inv.get(i1, j);
                        let sub = &table[rest as usize * 128 + (b & !(1u8 << j)) as usize];
                        if entry.is_zero() || sub.is_zero() {
                            continue;
                        }
                        let term = entry.clone() * sub.clone();
                        acc = if s % 2 == 0 { acc + term } else { acc - term };
                    }
                    table[a as usize * 128 + b as usize] = acc;
                }
            }
        }
        table
    }

    /// Components of `a` with every index raised, stored on the same blades.
    pub fn raise_form(&self, a: &KForm<S>) -> KForm<S> {
        if self.diagonal {
            return KForm::from_blades(
                a.degree(),
                a.terms()
                    .map(|(b, c)| (b, c.clone() * self.inverse_minor(b, b))),
            );
        }
        let mut out = KForm::zero(a.degree());
        for target in blades_of_degree(a.degree()) {
            let mut acc = S::zero();
            for (b, c) in a.terms() {
                let m = self.inverse_minor(target, b);
                if !m.is_zero() {
                    acc = acc + m * c.clone();
                }
            }
            out.add_term(target, acc);
        }
        out
    }

    /// Induced inner product on k-forms, summing over increasing multi-indices.
    pub fn inner(&self, a: &KForm<S>, b: &KForm<S>) -> Result<S> {
        if a.degree() != b.degree() {
            return Err(Error::DegreeMismatch {
                expected: a.degree(),
                got: b.degree(),
            });
        }
        let raised = self.raise_form(b);
        Ok(a.terms()
            .fold(S::zero(), |acc, (bl, c)| acc + c.clone() * raised.coeff(bl)))
    }

    pub fn norm2(&self, a: &KForm<S>) -> S {
        self.inner(a, a).expect("same degree")
    }

    /// Hodge star with `a ∧ *b = ⟨a, b⟩ vol`.
    pub fn hodge(&self, a: &KForm<S>) -> KForm<S> {
        let raised = self.raise_form(a);
        let mut out = KForm::zero(DIM - a.degree());
        for (b, c) in raised.terms() {
            let comp = FULL & !b;
            let sign = merge_sign(b, comp).expect("disjoint");
            let v = c.clone() * self.vol_factor.clone();
            out.add_term(comp, if sign < 0 { -v } else { v });
        }
        out
    }

    /// Metric dual of a 1-form.
    pub fn sharp(&self, a: &KForm<S>) -> Result<Vector<S>> {
        let v = Vector::from_one_form(a)?;
        Ok(self.g_inv.apply_vector(&v))
    }

    /// Metric dual of a vector.
    pub fn flat(&self, x: &Vector<S>) -> KForm<S> {
        self.g.apply_vector(x).as_one_form()
    }

    /// `g^{ij} A_ij`.
    pub fn trace(&self, a: &Tensor2<S>) -> S {
        self.g_inv.frobenius(a)
    }

    /// `(A ∘ B)_ij = A_ia g^{ab} B_bj`.
    pub fn compose(&self, a: &Tensor2<S>, b: &Tensor2<S>) -> Tensor2<S> {
        a.matmul(&self.g_inv).matmul(b)
    }

    /// `⟨A, B⟩ = A_ij B_kl g^{ik} g^{jl}`.
    pub fn inner2(&self, a: &Tensor2<S>, b: &Tensor2<S>) -> S {
        let raised = self.g_inv.matmul(a).matmul(&self.g_inv);
        raised.frobenius(b)
    }

    pub fn norm2_tensor(&self, a: &Tensor2<S>) -> S {
        self.inner2(a, a)
    }

    /// `A_i^p = A_iq g^{qp}`.
    pub fn raise_second(&self, a: &Tensor2<S>) -> Tensor2<S> {
        a.matmul(&self.g_inv)
    }

    /// `A ⋄ γ = Σ_{i,p} A_i^p e^i ∧ (e_p ⌟ γ)`.
    pub fn diamond(&self, a: &Tensor2<S>, gamma: &KForm<S>) -> Result<KForm<S>> {
        let mixed = self.raise_second(a);
        let contractions: Vec<KForm<S>> = (0..DIM)
            .map(|p| gamma.interior_basis(p))
            .collect::<Result<_>>()?;
        let mut out = KForm::zero(gamma.degree());
        for i in 0..DIM {
            let mut inner = KForm::zero(gamma.degree() - 1);
            for (p, c) in contractions.iter().enumerate() {
                let coeff = mixed.get(i, p);
                if coeff.is_zero() || c.is_zero() {
                    continue;
                }
                inner = inner + c.scale(coeff);
            }
            if inner.is_zero() {
                continue;
            }
            out = out + KForm::from_blades(1, [(1u8 << i, S::one())]).wedge(&inner);
        }
        Ok(out)
    }
}
