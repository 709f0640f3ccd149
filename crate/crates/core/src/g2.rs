//! G2-structures: metric from the 3-form, intrinsic torsion, full torsion,
//! Bryant's j-map, Q-pairing and Ricci formula.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exterior::{
    for_each_permutation, Array, FrameAlgebra, KForm, Metric, Tensor2, Vector, DIM,
};
use crate::leviciv::{self, Connection};
use crate::linalg;
use crate::scalar::Scalar;

/// `φ0 = e^{127} + e^{347} + e^{567} + e^{135} − e^{146} − e^{236} − e^{245}`.
pub fn standard_phi<S: Scalar>() -> KForm<S> {
    KForm::basis(&[1, 2, 7])
        + KForm::basis(&[3, 4, 7])
        + KForm::basis(&[5, 6, 7])
        + KForm::basis(&[1, 3, 5])
        - KForm::basis(&[1, 4, 6])
        - KForm::basis(&[2, 3, 6])
        - KForm::basis(&[2, 4, 5])
}

/// `ψ0 = *φ0` for the identity metric.
pub fn standard_psi<S: Scalar>() -> KForm<S> {
    KForm::basis(&[1, 2, 3, 4])
        + KForm::basis(&[3, 4, 5, 6])
        + KForm::basis(&[1, 2, 5, 6])
        + KForm::basis(&[1, 3, 6, 7])
        + KForm::basis(&[1, 4, 5, 7])
        + KForm::basis(&[2, 3, 5, 7])
        - KForm::basis(&[2, 4, 6, 7])
}

fn contractions<S: Scalar>(phi: &KForm<S>) -> Result<Vec<KForm<S>>> {
    (0..DIM).map(|i| phi.interior_basis(i)).collect()
}

/// Metric and orientation determined by a 3-form through
/// `(X⌟φ) ∧ (Y⌟φ) ∧ φ = 6 g(X, Y) vol`.
pub fn metric_from_phi<S: Scalar>(phi: &KForm<S>) -> Result<Metric<S>> {
    if phi.degree() != 3 {
        return Err(Error::DegreeMismatch {
            expected: 3,
            got: phi.degree(),
        });
    }
    let iota = contractions(phi)?;
    let sixth = S::from_ratio(1, 6);
    let mut b = Tensor2::zero();
    for i in 0..DIM {
        for j in i..DIM {
            let v = iota[i].wedge(&iota[j]).wedge(phi).top_coefficient() * sixth.clone();
            b.set(i, j, v.clone());
            b.set(j, i, v);
        }
    }
    // b = vf·g and det g = vf², so det b = vf⁹
    let det = linalg::determinant(b.rows().to_vec());
    if !det.is_positive() {
        return Err(Error::NotG2);
    }
    let vf = det.root(9).ok_or(Error::IrrationalVolume)?;
    let g = b.scale(&(S::one() / vf.clone()));
    Metric::with_volume_factor(g, vf).map_err(|_| Error::NotG2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionForms<S: Scalar> {
    pub tau0: S,
    /// A 1-form.
    pub tau1: KForm<S>,
    pub tau2: KForm<S>,
    pub tau3: KForm<S>,
}

impl<S: Scalar> TorsionForms<S> {
    pub fn is_coclosed(&self) -> bool {
        self.tau1.is_zero() && self.tau2.is_zero()
    }
}

/// A G2-structure on a frame with all derived data.
#[derive(Clone, Debug)]
pub struct G2Data<S: Scalar> {
    frame: Arc<FrameAlgebra>,
    phi: KForm<S>,
    psi: KForm<S>,
    metric: Metric<S>,
    dphi: KForm<S>,
    dpsi: KForm<S>,
    iota_phi: Vec<KForm<S>>,
    torsion_forms: TorsionForms<S>,
    torsion: Tensor2<S>,
}

impl<S: Scalar> G2Data<S> {
    pub fn new(frame: impl Into<Arc<FrameAlgebra>>, phi: KForm<S>) -> Result<Self> {
        let frame = frame.into();
        let metric = metric_from_phi(&phi)?;
        let psi = metric.hodge(&phi);
        let dphi = frame.ext_d(&phi);
        let dpsi = frame.ext_d(&psi);
        let iota_phi = contractions(&phi)?;
        let mut data = G2Data {
            frame,
            phi,
            psi,
            metric,
            dphi,
            dpsi,
            iota_phi,
            torsion_forms: TorsionForms {
                tau0: S::zero(),
                tau1: KForm::zero(1),
                tau2: KForm::zero(2),
                tau3: KForm::zero(3),
            },
            torsion: Tensor2::zero(),
        };
        data.torsion_forms = data.compute_torsion_forms()?;
        data.torsion = data.compute_full_torsion();
        Ok(data)
    }

    pub fn frame(&self) -> &FrameAlgebra {
        &self.frame
    }

    pub fn frame_arc(&self) -> Arc<FrameAlgebra> {
        self.frame.clone()
    }

    pub fn phi(&self) -> &KForm<S> {
        &self.phi
    }

    pub fn psi(&self) -> &KForm<S> {
        &self.psi
    }

    pub fn metric(&self) -> &Metric<S> {
        &self.metric
    }

    pub fn dphi(&self) -> &KForm<S> {
        &self.dphi
    }

    pub fn dpsi(&self) -> &KForm<S> {
        &self.dpsi
    }

    pub fn torsion_forms(&self) -> &TorsionForms<S> {
        &self.torsion_forms
    }

    /// Full torsion `T` with `∇_m φ_{ijk} = T_m^p ψ_{pijk}`.
    pub fn full_torsion(&self) -> &Tensor2<S> {
        &self.torsion
    }

    pub fn hodge(&self, a: &KForm<S>) -> KForm<S> {
        self.metric.hodge(a)
    }

    fn compute_torsion_forms(&self) -> Result<TorsionForms<S>> {
        let m = &self.metric;
        let seventh = S::from_ratio(1, 7);
        let tau0 = m.hodge(&self.dphi.wedge(&self.phi)).as_scalar() * seventh;

        // τ1 from the Λ⁵_7 part of dψ: ⟨dψ, e^i∧ψ⟩ = Σ_j 4τ1_j ⟨e^j∧ψ, e^i∧ψ⟩
        let e_psi: Vec<KForm<S>> = (0..DIM)
            .map(|i| KForm::from_blades(1, [(1u8 << i, S::one())]).wedge(&self.psi))
            .collect();
        let tau1 = if self.dpsi.is_zero() {
            KForm::zero(1)
        } else {
            let gram: Vec<Vec<S>> = (0..DIM)
                .map(|i| {
                    (0..DIM)
                        .map(|j| m.inner(&e_psi[j], &e_psi[i]).expect("same degree"))
                        .collect()
                })
                .collect();
            let rhs: Vec<S> = (0..DIM)
                .map(|i| m.inner(&self.dpsi, &e_psi[i]).expect("same degree"))
                .collect();
            let x = linalg::solve(&gram, &rhs).ok_or(Error::ProjectionInconsistent(
                "tau1 normal equations singular",
            ))?;
            let quarter = S::from_ratio(1, 4);
            KForm::from_blades(
                1,
                (0..DIM).map(|i| (1u8 << i, x[i].clone() * quarter.clone())),
            )
        };

        let four = S::from_i64(4);
        let three = S::from_i64(3);
        let rem2 = self.dpsi.clone() - tau1.wedge(&self.psi).scale(&four);
        let tau2 = -m.hodge(&rem2);
        // exact for the rational backends; f64 needs slack scaled to the data
        let scale = self
            .dphi
            .terms()
            .chain(self.dpsi.terms())
            .fold(1.0f64, |acc, (_, c)| acc.max(c.to_f64().abs()));
        let tol = S::DEFAULT_TOL * scale;
        if !tau2.wedge(&self.phi).approx_eq(&rem2, tol) || !tau2.wedge(&self.psi).approx_zero(tol) {
            return Err(Error::ProjectionInconsistent("tau2"));
        }
        let rem3 = self.dphi.clone() - self.psi.scale(&tau0) - tau1.wedge(&self.phi).scale(&three);
        let tau3 = m.hodge(&rem3);
        if !tau3.wedge(&self.phi).approx_zero(tol) || !tau3.wedge(&self.psi).approx_zero(tol) {
            return Err(Error::ProjectionInconsistent("tau3"));
        }
        Ok(TorsionForms {
            tau0,
            tau1,
            tau2,
            tau3,
        })
    }

    /// `T = (τ0/4) g − ¼ j(τ3) − (τ1⌟φ) − ½ τ2`, with the 2-form pieces read
    /// as tensors `A_{ij} = A(e_i, e_j)`.
    fn compute_full_torsion(&self) -> Tensor2<S> {
        let tf = &self.torsion_forms;
        let quarter = S::from_ratio(1, 4);
        let half = S::from_ratio(1, 2);
        let mut t = self.metric.g().scale(&(tf.tau0.clone() * quarter.clone()));
        if !tf.tau3.is_zero() {
            t = t - self.jmap(&tf.tau3).scale(&quarter);
        }
        if !tf.tau1.is_zero() {
            let x = self.metric.sharp(&tf.tau1).expect("1-form");
            let two_form = self.phi.interior(&x).expect("3-form");
            t = t - two_form_tensor(&two_form);
        }
        if !tf.tau2.is_zero() {
            t = t - two_form_tensor(&tf.tau2).scale(&half);
        }
        t
    }

    /// `T_{mq} = (1/24) (∇_m φ)_{ijk} ψ_q^{ijk}` from an explicit connection.
    pub fn torsion_from_nabla(&self, conn: &Connection<S>) -> Tensor2<S> {
        let phi = Array::from_vec(3, self.phi.to_dense());
        let nabla_phi = conn.covariant_derivative(&phi);
        let psi_up = raise_trailing(&Array::from_vec(4, self.psi.to_dense()), &self.metric, 3);
        let scale = S::from_ratio(1, 24);
        let n3 = DIM * DIM * DIM;
        Tensor2::from_fn(|m, q| {
            let a = &nabla_phi.data()[m * n3..(m + 1) * n3];
            let b = &psi_up.data()[q * n3..(q + 1) * n3];
            let mut acc = S::zero();
            for (x, y) in a.iter().zip(b) {
                if !x.is_zero() && !y.is_zero() {
                    acc = acc + x.clone() * y.clone();
                }
            }
            acc * scale.clone()
        })
    }

    /// Compares [`G2Data::full_torsion`] against the connection-derived value.
    pub fn check_torsion(&self) -> Result<()> {
        let conn = leviciv::koszul(&self.frame, &self.metric);
        let tol = S::DEFAULT_TOL.max(1e-9);
        if self.torsion_from_nabla(&conn).approx_eq(&self.torsion, tol) {
            Ok(())
        } else {
            Err(Error::TorsionCrossCheck)
        }
    }

    /// `j(σ)(e_i, e_j) = *((e_i⌟φ) ∧ (e_j⌟φ) ∧ σ)`.
    pub fn jmap(&self, sigma: &KForm<S>) -> Tensor2<S> {
        let inv_vf = S::one() / self.metric.vol_factor().clone();
        let mut out = Tensor2::zero();
        let sig_wedge: Vec<KForm<S>> = self.iota_phi.iter().map(|a| a.wedge(sigma)).collect();
        for i in 0..DIM {
            for j in i..DIM {
                let v = self.iota_phi[i].wedge(&sig_wedge[j]).top_coefficient() * inv_vf.clone();
                out.set(i, j, v.clone());
                out.set(j, i, v);
            }
        }
        out
    }

    /// `Q(α, β) = *(ψ^{ijkl} (e_j⌟e_i⌟*α) ∧ (e_l⌟e_k⌟*β))`, summed over all
    /// ordered index tuples.
    pub fn qpair(&self, alpha: &KForm<S>, beta: &KForm<S>) -> KForm<S> {
        if alpha.is_zero() || beta.is_zero() {
            return KForm::zero(3);
        }
        let pair = |a: &KForm<S>| -> Vec<Vec<KForm<S>>> {
            let star = self.metric.hodge(a);
            (0..DIM)
                .map(|i| {
                    let si = star.interior_basis(i).expect("4-form");
                    (0..DIM)
                        .map(|j| si.interior_basis(j).expect("3-form"))
                        .collect()
                })
                .collect()
        };
        let a = pair(alpha);
        let b = if alpha == beta { a.clone() } else { pair(beta) };
        let psi_up = self.metric.raise_form(&self.psi);
        let mut acc = KForm::zero(4);
        for (blade, c) in psi_up.terms() {
            let idx: Vec<usize> = crate::exterior::blade_indices(blade).collect();
            for_each_permutation(&idx, |p, sign| {
                let w = a[p[0]][p[1]].wedge(&b[p[2]][p[3]]);
                if w.is_zero() {
                    return;
                }
                let coeff = if sign < 0 { -c.clone() } else { c.clone() };
                acc = std::mem::replace(&mut acc, KForm::zero(4)) + w.scale(&coeff);
            });
        }
        self.metric.hodge(&acc)
    }

    /// Bryant's Ricci formula in terms of the intrinsic torsion forms.
    pub fn ricci_bryant(&self) -> Tensor2<S> {
        let tf = &self.torsion_forms;
        let m = &self.metric;
        let f = |n: i64, d: i64| S::from_ratio(n, d);
        let d = |a: &KForm<S>| self.frame.ext_d(a);

        let mut scalar = f(-3, 8) * tf.tau0.clone() * tf.tau0.clone() + f(1, 2) * m.norm2(&tf.tau3);
        let mut sigma = m.hodge(&d(&tf.tau3)).scale(&f(1, 4))
            - tf.tau3.scale(&(f(1, 8) * tf.tau0.clone()))
            + self.qpair(&tf.tau3, &tf.tau3).scale(&f(1, 64));

        if !tf.tau1.is_zero() {
            // d*τ1 = −*d*τ1 on 1-forms in dimension 7
            let codiff = -m.hodge(&d(&m.hodge(&tf.tau1))).as_scalar();
            scalar = scalar + f(3, 2) * codiff + f(15, 1) * m.norm2(&tf.tau1);
            let t1_psi = m.hodge(&tf.tau1.wedge(&self.psi));
            sigma = sigma - d(&t1_psi).scale(&f(5, 4))
                + tf.tau1.wedge(&t1_psi).scale(&f(5, 2))
                + tf.tau1.wedge(&tf.tau2).scale(&f(1, 4))
                + m.hodge(&tf.tau1.wedge(&tf.tau3)).scale(&f(3, 4));
        }
        if !tf.tau2.is_zero() {
            scalar = scalar - f(1, 4) * m.norm2(&tf.tau2);
            sigma = sigma - d(&tf.tau2).scale(&f(1, 4))
                + m.hodge(&tf.tau2.wedge(&tf.tau2)).scale(&f(1, 8));
        }
        self.jmap(&sigma) - m.g().scale(&scalar)
    }

    pub fn torsion_invariants(&self) -> TorsionInvariants<S> {
        let m = &self.metric;
        let t = &self.torsion;
        let ttt = m.compose(&t.transpose(), t);
        let norm_t2 = m.norm2_tensor(t);
        let tr_t = m.trace(t);
        let t_up = m.g_inv().matmul(t).matmul(m.g_inv());
        let vt = Vector::from_fn(|k| {
            let mut acc = S::zero();
            for i in 0..DIM {
                for j in 0..DIM {
                    let c = self.phi.component(&[i + 1, j + 1, k + 1]);
                    if c.is_zero() || t_up.get(i, j).is_zero() {
                        continue;
                    }
                    acc = acc + t_up.get(i, j).clone() * c;
                }
            }
            acc
        });
        let pt = Tensor2::from_fn(|i, j| {
            let mut acc = S::zero();
            for a in 0..DIM {
                for b in 0..DIM {
                    if t_up.get(a, b).is_zero() {
                        continue;
                    }
                    let c = self.psi.component(&[a + 1, b + 1, i + 1, j + 1]);
                    if !c.is_zero() {
                        acc = acc + t_up.get(a, b).clone() * c;
                    }
                }
            }
            acc
        });
        let curv = leviciv::curvature(&self.frame, m, t);
        TorsionInvariants {
            ttt,
            norm_t2,
            tr_t,
            vt,
            pt,
            div_t: curv.div_t,
        }
    }
}

/// Scalars derived from the full torsion.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionInvariants<S: Scalar> {
    /// `(TᵗT)_{ij} = T_{ai} g^{ab} T_{bj}`.
    pub ttt: Tensor2<S>,
    pub norm_t2: S,
    pub tr_t: S,
    /// `(VT)_k = T^{ij} φ_{ijk}` (lower index).
    pub vt: Vector<S>,
    /// `(PT)_{ij} = T^{ab} ψ_{abij}`.
    pub pt: Tensor2<S>,
    /// `(Div T)_k = ∇^j T_{jk}` (lower index).
    pub div_t: Vector<S>,
}

/// Components `A_{ij} = A(e_i, e_j)` of a 2-form.
pub fn two_form_tensor<S: Scalar>(a: &KForm<S>) -> Tensor2<S> {
    Tensor2::from_fn(|i, j| a.component(&[i + 1, j + 1]))
}

/// Raise the last `n` slots of a covariant array.
fn raise_trailing<S: Scalar>(a: &Array<S>, metric: &Metric<S>, n: usize) -> Array<S> {
    let rank = a.rank();
    let g_inv = metric.g_inv();
    let mut cur = a.clone();
    for slot in rank - n..rank {
        let stride = DIM.pow((rank - 1 - slot) as u32);
        let mut next = Array::zero(rank);
        for (flat, v) in cur.data().iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let b = (flat / stride) % DIM;
            let base = flat - b * stride;
            for p in 0..DIM {
                let gab = g_inv.get(p, b);
                if gab.is_zero() {
                    continue;
                }
                let mut idx = Vec::with_capacity(rank);
                let mut rem = base + p * stride;
                for _ in 0..rank {
                    idx.push(rem % DIM);
                    rem /= DIM;
                }
                idx.reverse();
                next.add_at(&idx, gab.clone() * v.clone());
            }
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    type F = KForm<Rational>;

    #[test]
    fn standard_structure_metric_is_identity() {
        let m = metric_from_phi(&standard_phi::<Rational>()).unwrap();
        assert_eq!(m.g(), &Tensor2::identity());
        assert_eq!(m.vol(), F::basis(&[1, 2, 3, 4, 5, 6, 7]));
        assert_eq!(m.hodge(&standard_phi()), standard_psi());
    }

    #[test]
    fn scaling_law() {
        let lam = q(2, 3);
        let phi = standard_phi::<Rational>().scale(&(lam.clone() * lam.clone() * lam.clone()));
        let m = metric_from_phi(&phi).unwrap();
        assert_eq!(m.g(), &Tensor2::identity().scale(&(lam.clone() * lam)));
    }

    #[test]
    fn degenerate_rejected() {
        let phi = F::basis(&[1, 2, 3]);
        assert_eq!(metric_from_phi(&phi).unwrap_err(), Error::NotG2);
        let neg = -standard_phi::<Rational>();
        assert_eq!(metric_from_phi(&neg).unwrap_err(), Error::NotG2);
    }

    #[test]
    fn abelian_is_torsion_free() {
        let g = G2Data::new(FrameAlgebra::abelian7(), standard_phi::<Rational>()).unwrap();
        let tf = g.torsion_forms();
        assert!(tf.tau0 == q(0, 1) && tf.tau1.is_zero() && tf.tau2.is_zero() && tf.tau3.is_zero());
        assert!(g.full_torsion().is_zero());
        assert!(g.ricci_bryant().is_zero());
    }

    #[test]
    fn heisenberg_standard_torsion() {
        let g = G2Data::new(FrameAlgebra::heisenberg7(), standard_phi::<Rational>()).unwrap();
        let mut d = vec![q(1, 2); 7];
        d[6] = q(-3, 2);
        assert_eq!(g.full_torsion(), &Tensor2::diagonal(&d));
        g.check_torsion().unwrap();
    }

    #[test]
    fn jmap_of_phi_is_six_g() {
        let g = G2Data::new(FrameAlgebra::heisenberg7(), standard_phi::<Rational>()).unwrap();
        assert_eq!(g.jmap(g.phi()), g.metric().g().scale(&q(6, 1)));
    }
}
