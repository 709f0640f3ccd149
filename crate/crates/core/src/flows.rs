//! The four flows of G2-structures, the two ansatz families, and the
//! reduction of each flow to an ODE system on the ansatz parameters.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{Array, FrameAlgebra, KForm, Tensor2, Vector, DIM};
use crate::g2::{two_form_tensor, G2Data};
use crate::leviciv;
use crate::scalar::Scalar;
use crate::symbolic::{CompiledLaurent, Laurent, Param, NPARAM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlowKind {
    /// Ricci-harmonic flow.
    Rhf,
    /// Variation of the G2 Einstein-Hilbert functional.
    Rl1,
    /// Perturbed variant of `Rl1`.
    Rl2,
    /// Negative gradient flow of the torsion energy.
    Ngf,
}

impl FlowKind {
    pub const ALL: [FlowKind; 4] = [FlowKind::Rhf, FlowKind::Rl1, FlowKind::Rl2, FlowKind::Ngf];

    pub fn name(self) -> &'static str {
        match self {
            FlowKind::Rhf => "rhf",
            FlowKind::Rl1 => "rl1",
            FlowKind::Rl2 => "rl2",
            FlowKind::Ngf => "ngf",
        }
    }
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlowKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        FlowKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown flow '{s}' (expected rhf, rl1, rl2 or ngf)"))
    }
}

/// Which ansatz family. Both live on the frame with `de⁷ = e¹²+e³⁴+e⁵⁶`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzKind {
    /// `φ = f h² η∧ω + h³ ReΥ` on the formal contact Calabi-Yau frame.
    Ccy,
    /// `φ = f(a²e¹²⁷ + b²e³⁴⁷ + c²e⁵⁶⁷) + abc ReΥ` on the Heisenberg frame.
    Heisenberg,
}

impl AnsatzKind {
    pub fn name(self) -> &'static str {
        match self {
            AnsatzKind::Ccy => "ccy",
            AnsatzKind::Heisenberg => "heisenberg",
        }
    }

    pub fn params(self) -> &'static [Param] {
        match self {
            AnsatzKind::Ccy => &[Param::F, Param::H],
            AnsatzKind::Heisenberg => &[Param::F, Param::A, Param::B, Param::C],
        }
    }

    pub fn dim(self) -> usize {
        self.params().len()
    }

    pub fn frame(self) -> FrameAlgebra {
        match self {
            AnsatzKind::Ccy => FrameAlgebra::formal_ccy(),
            AnsatzKind::Heisenberg => FrameAlgebra::heisenberg7(),
        }
    }

    /// Basis 3-forms spanning the family; pairwise disjoint supports.
    pub fn basis<S: Scalar>(self) -> Vec<KForm<S>> {
        match self {
            AnsatzKind::Ccy => vec![eta_omega(), re_upsilon()],
            AnsatzKind::Heisenberg => vec![
                KForm::basis(&[1, 2, 7]),
                KForm::basis(&[3, 4, 7]),
                KForm::basis(&[5, 6, 7]),
                re_upsilon(),
            ],
        }
    }

    /// Coefficients of φ in [`AnsatzKind::basis`] as functions of the parameters.
    pub fn coefficients<S: Scalar>(self, p: &[S]) -> Vec<S> {
        match self {
            AnsatzKind::Ccy => {
                let (f, h) = (&p[0], &p[1]);
                vec![f.clone() * h.clone() * h.clone(), h.powi(3)]
            }
            AnsatzKind::Heisenberg => {
                let (f, a, b, c) = (&p[0], &p[1], &p[2], &p[3]);
                vec![
                    f.clone() * a.clone() * a.clone(),
                    f.clone() * b.clone() * b.clone(),
                    f.clone() * c.clone() * c.clone(),
                    a.clone() * b.clone() * c.clone(),
                ]
            }
        }
    }

    /// Human-readable names of the coefficient functions.
    pub fn coefficient_labels(self) -> &'static [&'static str] {
        match self {
            AnsatzKind::Ccy => &["f h^2", "h^3"],
            AnsatzKind::Heisenberg => &["f a^2", "f b^2", "f c^2", "a b c"],
        }
    }

    /// Invert the chain rule: given `d/dt` of the coefficient functions,
    /// return `d/dt` of the raw parameters. All divisions are by monomials.
    pub fn solve_chain_rule<S: Scalar>(self, p: &[S], dc: &[S]) -> Vec<S> {
        let two = S::from_i64(2);
        let three = S::from_i64(3);
        match self {
            AnsatzKind::Ccy => {
                let (f, h) = (&p[0], &p[1]);
                // d(h³) = 3h² h',  d(fh²) = h² f' + 2fh h'
                let dh = dc[1].clone() / (three * h.clone() * h.clone());
                let df = (dc[0].clone() - two * f.clone() * h.clone() * dh.clone())
                    / (h.clone() * h.clone());
                vec![df, dh]
            }
            AnsatzKind::Heisenberg => {
                let (f, a, b, c) = (&p[0], &p[1], &p[2], &p[3]);
                // d(fx²) = x² f' + 2fx x' for x = a, b, c and
                // d(abc) = bc a' + ac b' + ab c' eliminate to
                // f' = (c1/a² + c2/b² + c3/c²)/3 − 2f c4/(3abc)
                let abc = a.clone() * b.clone() * c.clone();
                let df = (dc[0].clone() / (a.clone() * a.clone())
                    + dc[1].clone() / (b.clone() * b.clone())
                    + dc[2].clone() / (c.clone() * c.clone()))
                    / three.clone()
                    - two.clone() * f.clone() * dc[3].clone() / (three * abc);
                let dx = |x: &S, ci: &S| {
                    (ci.clone() - x.clone() * x.clone() * df.clone())
                        / (two.clone() * f.clone() * x.clone())
                };
                let da = dx(a, &dc[0]);
                let db = dx(b, &dc[1]);
                let dcc = dx(c, &dc[2]);
                vec![df, da, db, dcc]
            }
        }
    }
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ccy" => Ok(AnsatzKind::Ccy),
            "heisenberg" => Ok(AnsatzKind::Heisenberg),
            _ => Err(format!("unknown family '{s}' (expected ccy or heisenberg)")),
        }
    }
}

/// `η0 ∧ ω0 = e¹²⁷ + e³⁴⁷ + e⁵⁶⁷`.
pub fn eta_omega<S: Scalar>() -> KForm<S> {
    KForm::basis(&[1, 2, 7]) + KForm::basis(&[3, 4, 7]) + KForm::basis(&[5, 6, 7])
}

/// `ReΥ0 = e¹³⁵ − e¹⁴⁶ − e²³⁶ − e²⁴⁵`.
pub fn re_upsilon<S: Scalar>() -> KForm<S> {
    KForm::basis(&[1, 3, 5])
        - KForm::basis(&[1, 4, 6])
        - KForm::basis(&[2, 3, 6])
        - KForm::basis(&[2, 4, 5])
}

/// `ImΥ0 = e¹³⁶ + e¹⁴⁵ + e²³⁵ − e²⁴⁶`.
pub fn im_upsilon<S: Scalar>() -> KForm<S> {
    KForm::basis(&[1, 3, 6]) + KForm::basis(&[1, 4, 5]) + KForm::basis(&[2, 3, 5])
        - KForm::basis(&[2, 4, 6])
}

/// `ω0 = e¹² + e³⁴ + e⁵⁶`.
pub fn omega<S: Scalar>() -> KForm<S> {
    KForm::basis(&[1, 2]) + KForm::basis(&[3, 4]) + KForm::basis(&[5, 6])
}

/// The 3-form of the family at the given parameters.
pub fn ansatz_phi<S: Scalar>(kind: AnsatzKind, params: &[S]) -> Result<KForm<S>> {
    if params.len() != kind.dim() {
        return Err(Error::ParameterCount {
            expected: kind.dim(),
            got: params.len(),
        });
    }
    if !params.iter().all(|p| p.is_positive()) {
        return Err(Error::DegenerateAnsatz);
    }
    let coeffs = kind.coefficients(params);
    Ok(kind
        .basis::<S>()
        .iter()
        .zip(&coeffs)
        .fold(KForm::zero(3), |acc, (b, c)| acc + b.scale(c)))
}

/// G2Data for the family at the given parameters.
pub fn build_ansatz<S: Scalar>(kind: AnsatzKind, params: &[S]) -> Result<G2Data<S>> {
    let phi = ansatz_phi(kind, params)?;
    G2Data::new(kind.frame(), phi)
}

/// Symbolic G2Data with the parameters left as Laurent variables.
pub fn symbolic_ansatz(kind: AnsatzKind) -> Result<G2Data<Laurent>> {
    let vars: Vec<Laurent> = kind.params().iter().map(|&p| Laurent::var(p)).collect();
    build_ansatz(kind, &vars)
}

/// Symmetric 2-tensor `h` and vector `X` with `∂φ/∂t = h ⋄ φ + X ⌟ ψ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowTensor<S: Scalar> {
    pub h: Tensor2<S>,
    /// Lower-index components of the vector part.
    pub x: Vector<S>,
}

/// `(L_V g)_ij = ∇_i V_j + ∇_j V_i` for a constant 1-form `V`.
fn lie_derivative_metric<S: Scalar>(g: &G2Data<S>, v: &Vector<S>) -> Tensor2<S> {
    let conn = leviciv::koszul(g.frame(), g.metric());
    let nv = conn.covariant_derivative(&Array::from_vec(1, v.0.clone()));
    Tensor2::from_fn(|i, j| nv.get(&[i, j]).clone() + nv.get(&[j, i]).clone())
}

/// Assemble the flow's `(h, X)` pair for a G2-structure.
pub fn flow_tensor<S: Scalar>(kind: FlowKind, g: &G2Data<S>) -> FlowTensor<S> {
    let inv = g.torsion_invariants();
    let m = g.metric();
    let t = g.full_torsion();
    let ric = g.ricci_bryant();
    let r = |n: i64, d: i64| S::from_ratio(n, d);
    let metric = m.g();
    let vt_up = m.g_inv().apply_vector(&inv.vt);

    match kind {
        FlowKind::Rhf => FlowTensor {
            h: -ric + inv.ttt.scale(&r(3, 1)) - metric.scale(&inv.norm_t2),
            x: inv.div_t,
        },
        FlowKind::Rl1 | FlowKind::Rl2 => {
            let vt_phi = g.phi().interior(&vt_up).expect("3-form contraction");
            let t_vt = m.compose(t, &two_form_tensor(&vt_phi)).symmetrize();
            let mut h = -ric - t_vt.scale(&r(2, 3)) + t.symmetrize().scale(&inv.tr_t);
            if kind == FlowKind::Rl2 {
                let vt2 = dot(&inv.vt, &vt_up);
                h = h + metric.scale(&(r(1, 3) * (inv.norm_t2.clone() - r(1, 3) * vt2)));
            }
            // (Tᵗ V)_j = T_ij V^i
            let tt_v = t.transpose().apply_vector(&vt_up);
            let x = inv
                .div_t
                .add(&inv.vt.scale(&(r(1, 3) * inv.tr_t.clone())))
                .sub(&tt_v.scale(&r(1, 3)));
            FlowTensor { h, x }
        }
        FlowKind::Ngf => {
            let lie = if inv.vt.is_zero() {
                Tensor2::zero()
            } else {
                lie_derivative_metric(g, &inv.vt)
            };
            let h = -ric - lie.scale(&r(1, 2)) - metric.scale(&(r(1, 2) * inv.norm_t2.clone()))
                + t.symmetrize().scale(&inv.tr_t)
                - m.compose(t, t).symmetrize()
                + m.compose(t, &t.transpose())
                - m.compose(t, &inv.pt).symmetrize();
            FlowTensor { h, x: inv.div_t }
        }
    }
}

fn dot<S: Scalar>(a: &Vector<S>, b: &Vector<S>) -> S {
    (0..DIM).fold(S::zero(), |acc, i| acc + a.0[i].clone() * b.0[i].clone())
}

/// `∂φ/∂t = h ⋄ φ + X♯ ⌟ ψ`.
pub fn velocity<S: Scalar>(kind: FlowKind, g: &G2Data<S>) -> KForm<S> {
    let ft = flow_tensor(kind, g);
    velocity_from(g, &ft)
}

pub fn velocity_from<S: Scalar>(g: &G2Data<S>, ft: &FlowTensor<S>) -> KForm<S> {
    let m = g.metric();
    let mut v = m.diamond(&ft.h, g.phi()).expect("3-form diamond");
    if !ft.x.is_zero() {
        let x_up = m.g_inv().apply_vector(&ft.x);
        v = v + g.psi().interior(&x_up).expect("4-form contraction");
    }
    v
}

/// Coordinates of `v` in the family basis; errors if `v` is outside the span.
pub fn project<S: Scalar>(kind: AnsatzKind, v: &KForm<S>) -> Result<Vec<S>> {
    let basis = kind.basis::<S>();
    let mut coords = Vec::with_capacity(basis.len());
    let mut residual = v.clone();
    for b in &basis {
        let (blade, unit) = b.terms().next().expect("nonempty basis form");
        let c = v.coeff(blade) / unit.clone();
        residual = residual - b.scale(&c);
        coords.push(c);
    }
    if residual.is_zero() {
        Ok(coords)
    } else {
        Err(Error::LeavesAnsatz)
    }
}

/// The reduced ODE system of a flow on a family, derived symbolically.
#[derive(Clone, Debug)]
pub struct ODESystem {
    pub flow: FlowKind,
    pub family: AnsatzKind,
    /// `d/dt` of each coefficient function, in [`AnsatzKind::coefficient_labels`] order.
    pub coefficient_rhs: Vec<Laurent>,
    /// `d/dt` of each raw parameter, in [`AnsatzKind::params`] order.
    pub param_rhs: Vec<Laurent>,
    compiled: Vec<CompiledLaurent>,
}

impl ODESystem {
    pub fn dim(&self) -> usize {
        self.param_rhs.len()
    }

    pub fn labels(&self) -> Vec<&'static str> {
        self.family.params().iter().map(|p| p.name()).collect()
    }

    pub fn params(&self) -> &'static [Param] {
        self.family.params()
    }

    /// Evaluate `dy/dt` at `y` (raw parameters in family order).
    pub fn rhs(&self, y: &[f64], dy: &mut [f64]) {
        let vals = embed(self.family, y);
        for (d, c) in dy.iter_mut().zip(&self.compiled) {
            *d = c.eval(&vals);
        }
    }

    pub fn rhs_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut dy = vec![0.0; self.dim()];
        self.rhs(y, &mut dy);
        dy
    }

    /// The coefficient-function derivatives evaluated at `y`.
    pub fn coefficient_rhs_at(&self, y: &[f64]) -> Vec<f64> {
        let vals = embed(self.family, y);
        self.coefficient_rhs
            .iter()
            .map(|e| e.eval_f64(&vals))
            .collect()
    }

    /// `(label, expression)` pairs for the raw-parameter system.
    pub fn display_pairs(&self) -> Vec<(String, String)> {
        self.labels()
            .iter()
            .zip(&self.param_rhs)
            .map(|(l, e)| (format!("d({l})"), e.to_string()))
            .collect()
    }
}

/// Place a family-ordered parameter vector into the full parameter slots.
pub fn embed(kind: AnsatzKind, y: &[f64]) -> [f64; NPARAM] {
    let mut vals = [1.0; NPARAM];
    for (p, v) in kind.params().iter().zip(y) {
        vals[p.index()] = *v;
    }
    vals
}

impl ODESystem {
    /// Build a system from given coefficient-function derivatives, e.g. a
    /// printed reduction, by the same chain-rule inversion.
    pub fn from_coefficients(
        flow: FlowKind,
        family: AnsatzKind,
        coefficient_rhs: Vec<Laurent>,
    ) -> Result<Self> {
        if coefficient_rhs.len() != family.dim() {
            return Err(Error::ParameterCount {
                expected: family.dim(),
                got: coefficient_rhs.len(),
            });
        }
        let vars: Vec<Laurent> = family.params().iter().map(|&p| Laurent::var(p)).collect();
        let param_rhs = family.solve_chain_rule(&vars, &coefficient_rhs);
        let compiled = param_rhs.iter().map(|e| e.compile()).collect();
        Ok(ODESystem {
            flow,
            family,
            coefficient_rhs,
            param_rhs,
            compiled,
        })
    }
}

/// Project the symbolic velocity of `flow` onto the family and invert the
/// chain rule to get the raw-parameter ODEs.
pub fn reduce_to_ode(flow: FlowKind, family: AnsatzKind) -> Result<ODESystem> {
    let g = symbolic_ansatz(family)?;
    reduce_with(flow, family, &g)
}

/// As [`reduce_to_ode`], reusing an already-built symbolic ansatz.
pub fn reduce_with(flow: FlowKind, family: AnsatzKind, g: &G2Data<Laurent>) -> Result<ODESystem> {
    let v = velocity(flow, g);
    ODESystem::from_coefficients(flow, family, project(family, &v)?)
}

/// All four flows on a family from one symbolic ansatz build.
pub fn reduce_all(family: AnsatzKind) -> Result<Vec<ODESystem>> {
    let g = symbolic_ansatz(family)?;
    FlowKind::ALL
        .iter()
        .map(|&k| reduce_with(k, family, &g))
        .collect()
}

/// Pointwise densities per unit base volume.
#[derive(Clone, Debug, PartialEq)]
pub struct Functionals<S> {
    /// `(−½|T|² + (1/6)|VT|²)·vf`.
    pub eh: S,
    /// `½|T|²·vf`.
    pub energy: S,
    /// Volume factor `sqrt(det g)`.
    pub volume: S,
}

pub fn functionals<S: Scalar>(g: &G2Data<S>) -> Functionals<S> {
    let inv = g.torsion_invariants();
    let m = g.metric();
    let vf = m.vol_factor().clone();
    let vt_up = m.g_inv().apply_vector(&inv.vt);
    let vt2 = dot(&inv.vt, &vt_up);
    let half = S::from_ratio(1, 2);
    Functionals {
        eh: (S::from_ratio(1, 6) * vt2 - half.clone() * inv.norm_t2.clone()) * vf.clone(),
        energy: half * inv.norm_t2 * vf.clone(),
        volume: vf,
    }
}

/// Symbolic per-sample diagnostics of a family, compiled for fast evaluation.
#[derive(Clone, Debug)]
pub struct Diagnostics {
    pub family: AnsatzKind,
    pub volume: Laurent,
    pub norm_t2: Laurent,
    pub tr_t: Laurent,
    pub eh: Laurent,
    pub norm_rm2: Laurent,
    pub norm_nabla_t2: Laurent,
    /// `|Rm|² + |∇T|² + |T|⁴`.
    pub lambda2: Laurent,
    compiled: [CompiledLaurent; 5],
}

/// One evaluated diagnostics row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSample {
    pub volfactor: f64,
    pub norm_t2: f64,
    pub tr_t: f64,
    pub lambda: f64,
    pub eh_density: f64,
}

impl Diagnostics {
    pub fn new(family: AnsatzKind) -> Result<Self> {
        let g = symbolic_ansatz(family)?;
        Ok(Self::from_data(family, &g))
    }

    pub fn from_data(family: AnsatzKind, g: &G2Data<Laurent>) -> Self {
        let fl = functionals(g);
        let inv = g.torsion_invariants();
        let curv = leviciv::curvature(g.frame(), g.metric(), g.full_torsion());
        let lambda2 = leviciv::lambda_squared(&curv, &inv.norm_t2);
        let compiled = [
            fl.volume.compile(),
            inv.norm_t2.compile(),
            inv.tr_t.compile(),
            fl.eh.compile(),
            lambda2.compile(),
        ];
        Diagnostics {
            family,
            volume: fl.volume,
            norm_t2: inv.norm_t2,
            tr_t: inv.tr_t,
            eh: fl.eh,
            norm_rm2: curv.norm_rm2,
            norm_nabla_t2: curv.norm_nabla_t2,
            lambda2,
            compiled,
        }
    }

    /// Evaluate at `y`. `k` is the transversal curvature bound: for the
    /// contact Calabi-Yau family `K²/h⁴` is added to `Λ²`; it is ignored for
    /// the Heisenberg family, whose transversal geometry is flat.
    pub fn eval(&self, y: &[f64], k: f64) -> DiagnosticSample {
        let vals = embed(self.family, y);
        let [vol, nt2, trt, eh, l2] = &self.compiled;
        let mut lambda2 = l2.eval(&vals);
        if self.family == AnsatzKind::Ccy && k != 0.0 {
            lambda2 += k * k / vals[Param::H.index()].powi(4);
        }
        DiagnosticSample {
            volfactor: vol.eval(&vals),
            norm_t2: nt2.eval(&vals),
            tr_t: trt.eval(&vals),
            lambda: lambda2.max(0.0).sqrt(),
            eh_density: eh.eval(&vals),
        }
    }
}
