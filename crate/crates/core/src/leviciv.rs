//! Levi-Civita connection and curvature of left-invariant metrics on a frame.

use crate::error::{Error, Result};
use crate::exterior::{Array, FrameAlgebra, Metric, Tensor2, Vector, DIM};
use crate::scalar::Scalar;

/// Christoffel symbols in the invariant frame: `∇_{e_i} e_j = Γ^k_{ij} e_k`,
/// stored as `gamma[[k, i, j]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Connection<S: Scalar> {
    gamma: Array<S>,
    // bracket coefficients c^k_{ij}, same layout
    bracket: Array<S>,
}

impl<S: Scalar> Connection<S> {
    /// `Γ^k_{ij}`.
    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &S {
        self.gamma.get(&[k, i, j])
    }

    /// `c^k_{ij}` with `[e_i, e_j] = c^k_{ij} e_k`.
    pub fn bracket(&self, k: usize, i: usize, j: usize) -> &S {
        self.bracket.get(&[k, i, j])
    }

    /// `∇_{e_i} e_j` as a vector.
    pub fn nabla_basis(&self, i: usize, j: usize) -> Vector<S> {
        Vector::from_fn(|k| self.gamma(k, i, j).clone())
    }

    pub fn is_flat_connection(&self) -> bool {
        self.gamma.is_zero()
    }

    /// Covariant derivative of a covariant tensor with constant frame
    /// components: result index order is `[i, slots…]` for `∇_{e_i}`.
    pub fn covariant_derivative(&self, a: &Array<S>) -> Array<S> {
        let r = a.rank();
        let mut out = Array::zero(r + 1);
        let mut idx = vec![0usize; r + 1];
        let total = DIM.pow(r as u32 + 1);
        for flat in 0..total {
            let mut rem = flat;
            for slot in (0..=r).rev() {
                idx[slot] = rem % DIM;
                rem /= DIM;
            }
            let i = idx[0];
            let mut acc = S::zero();
            let mut src = idx[1..].to_vec();
            for s in 0..r {
                let orig = src[s];
                for p in 0..DIM {
                    let g = self.gamma(p, i, orig);
                    if g.is_zero() {
                        continue;
                    }
                    src[s] = p;
                    let v = a.get(&src);
                    if !v.is_zero() {
                        acc = acc - g.clone() * v.clone();
                    }
                }
                src[s] = orig;
            }
            out.set(&idx, acc);
        }
        out
    }
}

/// Levi-Civita connection from the Koszul formula for left-invariant fields,
/// `2⟨∇_X Y, Z⟩ = ⟨[X,Y],Z⟩ − ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩`.
pub fn koszul<S: Scalar>(frame: &FrameAlgebra, metric: &Metric<S>) -> Connection<S> {
    let raw = frame.bracket_coeffs();
    let mut bracket = Array::zero(3);
    for (k, ck) in raw.iter().enumerate() {
        for i in 0..DIM {
            for j in 0..DIM {
                bracket.set(&[k, i, j], S::from_rational(&ck[i][j]));
            }
        }
    }
    let g = metric.g();
    // c_{ij,l} = ⟨[e_i, e_j], e_l⟩
    let mut lowered = Array::zero(3);
    for i in 0..DIM {
        for j in 0..DIM {
            for l in 0..DIM {
                let mut acc = S::zero();
                for k in 0..DIM {
                    let c = bracket.get(&[k, i, j]);
                    if c.is_zero() || g.get(k, l).is_zero() {
                        continue;
                    }
                    acc = acc + c.clone() * g.get(k, l).clone();
                }
                lowered.set(&[i, j, l], acc);
            }
        }
    }
    let half = S::from_ratio(1, 2);
    let mut gamma_low = Array::zero(3);
    for i in 0..DIM {
        for j in 0..DIM {
            for l in 0..DIM {
                let v = lowered.get(&[i, j, l]).clone() - lowered.get(&[j, l, i]).clone()
                    + lowered.get(&[l, i, j]).clone();
                if !v.is_zero() {
                    gamma_low.set(&[i, j, l], half.clone() * v);
                }
            }
        }
    }
    let g_inv = metric.g_inv();
    let mut gamma = Array::zero(3);
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = S::zero();
                for l in 0..DIM {
                    let a = gamma_low.get(&[i, j, l]);
                    if a.is_zero() || g_inv.get(k, l).is_zero() {
                        continue;
                    }
                    acc = acc + g_inv.get(k, l).clone() * a.clone();
                }
                gamma.set(&[k, i, j], acc);
            }
        }
    }
    Connection { gamma, bracket }
}

/// `R^q_{ijk}` with `R(e_i, e_j) e_k = R^q_{ijk} e_q`, stored `[[q, i, j, k]]`.
pub fn riemann_endomorphism<S: Scalar>(conn: &Connection<S>) -> Array<S> {
    let mut r = Array::zero(4);
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut acc = vec![S::zero(); DIM];
                for p in 0..DIM {
                    let g_jk = conn.gamma(p, j, k);
                    let g_ik = conn.gamma(p, i, k);
                    let c_ij = conn.bracket(p, i, j);
                    for (q, slot) in acc.iter_mut().enumerate() {
                        let mut v = S::zero();
                        if !g_jk.is_zero() && !conn.gamma(q, i, p).is_zero() {
                            v = v + g_jk.clone() * conn.gamma(q, i, p).clone();
                        }
                        if !g_ik.is_zero() && !conn.gamma(q, j, p).is_zero() {
                            v = v - g_ik.clone() * conn.gamma(q, j, p).clone();
                        }
                        if !c_ij.is_zero() && !conn.gamma(q, p, k).is_zero() {
                            v = v - c_ij.clone() * conn.gamma(q, p, k).clone();
                        }
                        if !v.is_zero() {
                            *slot = std::mem::replace(slot, S::zero()) + v;
                        }
                    }
                }
                for (q, v) in acc.into_iter().enumerate() {
                    r.set(&[q, i, j, k], v);
                }
            }
        }
    }
    r
}

/// `Ric_{jk} = R^i_{ijk}`.
pub fn ricci_from_endomorphism<S: Scalar>(r: &Array<S>) -> Tensor2<S> {
    Tensor2::from_fn(|j, k| (0..DIM).fold(S::zero(), |acc, i| acc + r.get(&[i, i, j, k]).clone()))
}

/// Ricci tensor via the Koszul connection.
pub fn koszul_ricci<S: Scalar>(frame: &FrameAlgebra, metric: &Metric<S>) -> Tensor2<S> {
    ricci_from_endomorphism(&riemann_endomorphism(&koszul(frame, metric)))
}

fn tensor2_to_array<S: Scalar>(t: &Tensor2<S>) -> Array<S> {
    let mut a = Array::zero(2);
    for i in 0..DIM {
        for j in 0..DIM {
            a.set(&[i, j], t.get(i, j).clone());
        }
    }
    a
}

/// Full contraction `A_{I} A^{I}` of a covariant array.
pub fn norm2_array<S: Scalar>(metric: &Metric<S>, a: &Array<S>) -> S {
    a.dot(&a.transform_all(metric.g_inv()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureData<S: Scalar> {
    /// `Rm_{ijkl} = ⟨R(e_i, e_j) e_k, e_l⟩`.
    pub rm: Array<S>,
    pub ric: Tensor2<S>,
    pub norm_rm2: S,
    /// `(∇_i T)_{jk}` stored `[[i, j, k]]`.
    pub nabla_t: Array<S>,
    pub norm_nabla_t2: S,
    /// `(Div T)_k = g^{ij} (∇_i T)_{jk}`.
    pub div_t: Vector<S>,
}

pub fn curvature<S: Scalar>(
    frame: &FrameAlgebra,
    metric: &Metric<S>,
    torsion: &Tensor2<S>,
) -> CurvatureData<S> {
    let conn = koszul(frame, metric);
    curvature_with(&conn, metric, torsion)
}

pub fn curvature_with<S: Scalar>(
    conn: &Connection<S>,
    metric: &Metric<S>,
    torsion: &Tensor2<S>,
) -> CurvatureData<S> {
    let endo = riemann_endomorphism(conn);
    let ric = ricci_from_endomorphism(&endo);
    let g = metric.g();
    let mut rm = Array::zero(4);
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                for l in 0..DIM {
                    let mut acc = S::zero();
                    for q in 0..DIM {
                        let r = endo.get(&[q, i, j, k]);
                        if r.is_zero() || g.get(q, l).is_zero() {
                            continue;
                        }
                        acc = acc + r.clone() * g.get(q, l).clone();
                    }
                    rm.set(&[i, j, k, l], acc);
                }
            }
        }
    }
    let norm_rm2 = norm2_array(metric, &rm);
    let nabla_t = conn.covariant_derivative(&tensor2_to_array(torsion));
    let norm_nabla_t2 = norm2_array(metric, &nabla_t);
    let g_inv = metric.g_inv();
    let div_t = Vector::from_fn(|k| {
        let mut acc = S::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                let a = g_inv.get(i, j);
                let b = nabla_t.get(&[i, j, k]);
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc + a.clone() * b.clone();
            }
        }
        acc
    });
    CurvatureData {
        rm,
        ric,
        norm_rm2,
        nabla_t,
        norm_nabla_t2,
        div_t,
    }
}

/// `Λ² = |Rm|² + |∇T|² + |T|⁴`.
pub fn lambda_squared<S: Scalar>(data: &CurvatureData<S>, norm_t2: &S) -> S {
    data.norm_rm2.clone() + data.norm_nabla_t2.clone() + norm_t2.clone() * norm_t2.clone()
}

/// `Λ = (|Rm|² + |∇T|² + |T|⁴)^{1/2}`; errors when the root is not exact.
pub fn lambda_value<S: Scalar>(data: &CurvatureData<S>, norm_t2: &S) -> Result<S> {
    lambda_squared(data, norm_t2)
        .root(2)
        .ok_or(Error::NoExactRoot)
}
