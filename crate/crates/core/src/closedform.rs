//! Closed-form solutions on the contact Calabi-Yau family, Λ profiles,
//! singularity classification and metric-continuity checks.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{AnsatzKind, Diagnostics, FlowKind, ODESystem};
use crate::scalar::{q, Scalar};
use crate::symbolic::{CompiledLaurent, Param};

/// Solutions of the form `f = a s^p`, `h = s^q` with `s = 1 + κ t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedSolution {
    pub kind: FlowKind,
    pub a: f64,
    /// `κ` in `s = 1 + κ t`.
    pub rate: f64,
    pub f_exp: f64,
    pub h_exp: f64,
    pub t_min: f64,
    pub t_max: f64,
}

impl ClosedSolution {
    fn from_rate(kind: FlowKind, a: f64, rate: f64, f_exp: f64, h_exp: f64) -> Self {
        let (t_min, t_max) = if rate < 0.0 {
            (f64::NEG_INFINITY, -1.0 / rate)
        } else if rate > 0.0 {
            (-1.0 / rate, f64::INFINITY)
        } else {
            (f64::NEG_INFINITY, f64::INFINITY)
        };
        ClosedSolution {
            kind,
            a,
            rate,
            f_exp,
            h_exp,
            t_min,
            t_max,
        }
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.t_min && t < self.t_max
    }

    /// The finite end of the lifespan.
    pub fn singular_time(&self) -> f64 {
        if self.rate < 0.0 {
            self.t_max
        } else {
            self.t_min
        }
    }

    /// `s = 1 + κ t`.
    pub fn s(&self, t: f64) -> f64 {
        1.0 + self.rate * t
    }

    fn check(&self, t: f64) -> Result<f64> {
        if !self.contains(t) {
            return Err(Error::OutsideLifespan {
                t,
                t_min: self.t_min,
                t_max: self.t_max,
            });
        }
        Ok(self.s(t))
    }

    /// `(f_t, h_t)`.
    pub fn eval(&self, t: f64) -> Result<[f64; 2]> {
        let s = self.check(t)?;
        Ok([self.a * s.powf(self.f_exp), s.powf(self.h_exp)])
    }

    /// Volume factor `f h⁶`.
    pub fn volume(&self, t: f64) -> Result<f64> {
        let [f, h] = self.eval(t)?;
        Ok(f * h.powi(6))
    }

    /// Exponent of `s` in the volume factor.
    pub fn volume_exponent(&self) -> f64 {
        self.f_exp + 6.0 * self.h_exp
    }
}

/// The closed solutions as printed, one per flow.
pub fn closed_solution(kind: FlowKind, a: f64) -> Result<ClosedSolution> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::NonPositiveScale);
    }
    let a2 = a * a;
    Ok(match kind {
        FlowKind::Rhf => ClosedSolution::from_rate(kind, a, -13.0 * a2, -3.0 / 26.0, 5.0 / 26.0),
        FlowKind::Rl1 => ClosedSolution::from_rate(kind, a, 12.5 * a2, -0.3, 0.1),
        FlowKind::Rl2 => ClosedSolution::from_rate(kind, a, 15.0 * a2, -1.0 / 6.0, 1.0 / 6.0),
        FlowKind::Ngf => ClosedSolution::from_rate(kind, a, -2.25 * a2, 0.5, 0.5),
    })
}

/// Solve `f' = α f³ h⁻⁴`, `h' = β f² h⁻³` from `(a, 1)`.
///
/// Along solutions `f = a h^r` with `r = α/β`, and `h^m` with `m = 4 − 2r`
/// is linear in `t` with slope `m β a²`.
pub fn power_law_solution(kind: FlowKind, alpha: f64, beta: f64, a: f64) -> Result<ClosedSolution> {
    if !(a > 0.0) {
        return Err(Error::NonPositiveScale);
    }
    if beta == 0.0 {
        return Err(Error::ProjectionInconsistent("h' vanishes identically"));
    }
    let r = alpha / beta;
    let m = 4.0 - 2.0 * r;
    if m == 0.0 {
        return Err(Error::ProjectionInconsistent("degenerate power law"));
    }
    Ok(ClosedSolution::from_rate(
        kind,
        a,
        m * beta * a * a,
        r / m,
        1.0 / m,
    ))
}

/// Read `α, β` off a reduced contact Calabi-Yau system, if it has the
/// power-law shape `f' = α f³h⁻⁴`, `h' = β f²h⁻³`.
pub fn power_law_coefficients(sys: &ODESystem) -> Option<(f64, f64)> {
    if sys.family != AnsatzKind::Ccy {
        return None;
    }
    let read = |idx: usize, fe: i32, he: i32| -> Option<f64> {
        let e = &sys.param_rhs[idx];
        if e.is_zero() {
            return Some(0.0);
        }
        if !e.is_monomial() {
            return None;
        }
        let (exps, c) = e.terms().next()?;
        let want = {
            let mut w = [0; crate::symbolic::NPARAM];
            w[Param::F.index()] = fe;
            w[Param::H.index()] = he;
            w
        };
        (exps == &want).then(|| c.to_f64())
    };
    Some((read(0, 3, -4)?, read(1, 2, -3)?))
}

/// Closed solution of the engine-derived contact Calabi-Yau system.
pub fn derived_solution(sys: &ODESystem, a: f64) -> Result<ClosedSolution> {
    let (alpha, beta) = power_law_coefficients(sys).ok_or(Error::ProjectionInconsistent(
        "system is not of power-law shape",
    ))?;
    power_law_solution(sys.flow, alpha, beta, a)
}

/// Exact `Λ²` coefficients at unit parameters on the symmetric ansatz.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaConstants {
    /// `|Rm|²·h⁸/f⁴`.
    pub c0: crate::Rational,
    /// `|∇T|²·h⁸/f⁴`.
    pub c0_prime: crate::Rational,
    /// `|T|⁴·h⁸/f⁴`.
    pub torsion4: crate::Rational,
}

impl LambdaConstants {
    /// The full coefficient of `f⁴/h⁸` in `Λ²`.
    pub fn total(&self) -> crate::Rational {
        &self.c0 + &self.c0_prime + &self.torsion4
    }
}

/// Compute `c0`, `c0'` from the curvature of the Heisenberg metric at
/// `f = a = b = c = 1`.
pub fn lambda_constants() -> Result<LambdaConstants> {
    let one = q(1, 1);
    let g = crate::flows::build_ansatz(
        AnsatzKind::Heisenberg,
        &[one.clone(), one.clone(), one.clone(), one],
    )?;
    let inv = g.torsion_invariants();
    let curv = crate::leviciv::curvature(g.frame(), g.metric(), g.full_torsion());
    Ok(LambdaConstants {
        c0: curv.norm_rm2,
        c0_prime: curv.norm_nabla_t2,
        torsion4: &inv.norm_t2 * &inv.norm_t2,
    })
}

/// `Λ(t)` along the closed solution as printed:
/// `(K² s^κK + c0 a⁴ s⁻²)^{1/2}` with `κK` = −10/13 (RHF), −2/5 (RL1, NGF)
/// and −2/3 for RL2, where no profile is printed and `K²/h⁴` is used.
pub fn lambda_profile(kind: FlowKind, a: f64, k: f64, c0: f64, t: f64) -> Result<f64> {
    let sol = closed_solution(kind, a)?;
    let s = sol.check(t)?;
    let k_exp = match kind {
        FlowKind::Rhf => -10.0 / 13.0,
        FlowKind::Rl1 | FlowKind::Ngf => -0.4,
        FlowKind::Rl2 => -4.0 * sol.h_exp,
    };
    Ok((k * k * s.powf(k_exp) + c0 * a.powi(4) * s.powi(-2)).sqrt())
}

/// `Λ(t) = (K²/h⁴ + c0 f⁴/h⁸)^{1/2}` evaluated on any closed solution.
pub fn lambda_structural(sol: &ClosedSolution, k: f64, c0: f64, t: f64) -> Result<f64> {
    let [f, h] = sol.eval(t)?;
    Ok((k * k / h.powi(4) + c0 * f.powi(4) / h.powi(8)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingularityType {
    I,
    IIa,
    IIb,
    III,
}

impl SingularityType {
    pub fn as_str(self) -> &'static str {
        match self {
            SingularityType::I => "I",
            SingularityType::IIa => "IIa",
            SingularityType::IIb => "IIb",
            SingularityType::III => "III",
        }
    }
}

/// Where the solution stops: at a finite time or at ±∞.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Horizon {
    Finite(f64),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub horizon: Horizon,
    pub kind: SingularityType,
    /// `max |τ − t| Λ` (finite) or `max |t| Λ` (infinite) over the samples.
    pub sup_estimate: f64,
    /// Fitted exponent of `Λ` against `|τ − t|` (finite) or `|t|` (infinite).
    pub exponent: f64,
    pub samples_in_fit: usize,
}

pub const FIT_TOLERANCE: f64 = 0.05;
pub const MIN_FIT_SAMPLES: usize = 16;

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in lx.iter().zip(&ly) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Classify from `(t, Λ)` samples.
///
/// Finite horizon: fit `Λ ~ |τ−t|^e` over the decade of samples closest to τ;
/// `e ≥ −1` within tolerance means `(τ−t)Λ` stays bounded (Type I), else IIa.
/// Infinite horizon: fit `Λ ~ |t|^e` over the last decade of `|t|`;
/// `e ≤ −1` within tolerance means `tΛ` stays bounded (Type III), else IIb.
pub fn classify(samples: &[(f64, f64)], horizon: Horizon) -> Result<SingularityReport> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = match horizon {
        Horizon::Finite(tau) => samples
            .iter()
            .map(|&(t, l)| ((tau - t).abs(), l))
            .filter(|&(d, l)| d > 0.0 && l > 0.0 && l.is_finite())
            .unzip(),
        Horizon::Infinite => samples
            .iter()
            .map(|&(t, l)| (t.abs(), l))
            .filter(|&(x, l)| x > 0.0 && l > 0.0 && l.is_finite())
            .unzip(),
    };
    let sup_estimate = xs.iter().zip(&ys).map(|(x, y)| x * y).fold(0.0, f64::max);
    let in_decade: Vec<usize> = match horizon {
        Horizon::Finite(_) => {
            let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
            (0..xs.len()).filter(|&i| xs[i] <= 10.0 * lo).collect()
        }
        Horizon::Infinite => {
            let hi = xs.iter().copied().fold(0.0, f64::max);
            (0..xs.len()).filter(|&i| xs[i] >= hi / 10.0).collect()
        }
    };
    if in_decade.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientResolution {
            got: in_decade.len(),
            need: MIN_FIT_SAMPLES,
        });
    }
    let fx: Vec<f64> = in_decade.iter().map(|&i| xs[i]).collect();
    let fy: Vec<f64> = in_decade.iter().map(|&i| ys[i]).collect();
    let exponent = loglog_slope(&fx, &fy);
    let kind = match horizon {
        Horizon::Finite(_) if exponent >= -1.0 - FIT_TOLERANCE => SingularityType::I,
        Horizon::Finite(_) => SingularityType::IIa,
        Horizon::Infinite if exponent <= -1.0 + FIT_TOLERANCE => SingularityType::III,
        Horizon::Infinite => SingularityType::IIb,
    };
    Ok(SingularityReport {
        horizon,
        kind,
        sup_estimate,
        exponent,
        samples_in_fit: in_decade.len(),
    })
}

/// Times approaching the end of a closed solution's lifespan in the given
/// direction, log-spaced in distance: `decades` decades down from `span`.
pub fn approach_grid(
    sol: &ClosedSolution,
    forward: bool,
    decades: u32,
    per_decade: usize,
) -> Vec<f64> {
    let n = decades as usize * per_decade;
    let end = if forward { sol.t_max } else { sol.t_min };
    if end.is_finite() {
        let span = end.abs().max(1e-300);
        (0..=n)
            .map(|i| {
                let d = span * 10f64.powf(-(i as f64) / per_decade as f64);
                end - d * end.signum()
            })
            .filter(|t| sol.contains(*t))
            .collect()
    } else {
        let sign = if forward { 1.0 } else { -1.0 };
        (0..=n)
            .map(|i| sign * 10f64.powf(i as f64 / per_decade as f64))
            .filter(|t| sol.contains(*t))
            .collect()
    }
}

/// Classify the printed Λ profile of a flow toward its singular end.
pub fn classify_profile(kind: FlowKind, a: f64, k: f64, c0: f64) -> Result<SingularityReport> {
    let sol = closed_solution(kind, a)?;
    // ancient flows are classified at their finite τ, immortal ones at +∞
    let (grid, horizon) = if sol.t_max.is_finite() {
        (approach_grid(&sol, true, 8, 24), Horizon::Finite(sol.t_max))
    } else {
        (approach_grid(&sol, true, 10, 24), Horizon::Infinite)
    };
    let samples: Vec<(f64, f64)> = grid
        .into_iter()
        .map(|t| Ok((t, lambda_profile(kind, a, k, c0, t)?)))
        .collect::<Result<_>>()?;
    classify(&samples, horizon)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuityReport {
    /// `sup |d/dt f²| ∨ sup |d/dt h²|` over the interval.
    pub sup_dgdt: f64,
    pub uniformly_continuous: bool,
    /// The interval's closure touches the singular time.
    pub reaches_singular_time: bool,
}

/// Bounded-derivative check for the metric coefficients `f²`, `h²`.
pub fn continuity_report(kind: FlowKind, a: f64, interval: (f64, f64)) -> Result<ContinuityReport> {
    Ok(continuity_of(&closed_solution(kind, a)?, interval))
}

/// [`continuity_report`] for any power-law solution.
pub fn continuity_of(sol: &ClosedSolution, interval: (f64, f64)) -> ContinuityReport {
    let a = sol.a;
    let (t0, t1) = interval;
    let tau = sol.singular_time();
    let reaches = t0 == tau || t1 == tau;
    // d/dt (c s^e) = c e κ s^(e−1) is monotone in s, so its sup sits at an end
    let coeffs = [(a * a, 2.0 * sol.f_exp), (1.0, 2.0 * sol.h_exp)];
    let mut sup = 0.0f64;
    for &t in &[t0, t1] {
        let s = if t.is_infinite() {
            f64::INFINITY
        } else {
            sol.s(t)
        };
        for &(c, e) in &coeffs {
            let d = if e == 0.0 {
                0.0
            } else if s == 0.0 || s.abs() < 1e-300 {
                if e - 1.0 < 0.0 {
                    f64::INFINITY
                } else if e - 1.0 == 0.0 {
                    (c * e * sol.rate).abs()
                } else {
                    0.0
                }
            } else if s.is_infinite() {
                if e - 1.0 > 0.0 {
                    f64::INFINITY
                } else if e - 1.0 == 0.0 {
                    (c * e * sol.rate).abs()
                } else {
                    0.0
                }
            } else {
                (c * e * sol.rate * s.powf(e - 1.0)).abs()
            };
            sup = sup.max(d);
        }
    }
    ContinuityReport {
        sup_dgdt: sup,
        uniformly_continuous: sup.is_finite(),
        reaches_singular_time: reaches,
    }
}

fn eh_density() -> &'static CompiledLaurent {
    static CELL: OnceLock<CompiledLaurent> = OnceLock::new();
    CELL.get_or_init(|| {
        Diagnostics::new(AnsatzKind::Ccy)
            .expect("symbolic contact Calabi-Yau ansatz")
            .eh
            .compile()
    })
}

/// `F(φ_t)/F(φ_0)` along the printed RL1 solution, from the engine's
/// Einstein-Hilbert density `(−½|T|² + ⅙|VT|²)·vol`.
pub fn eh_evolution(a: f64, t: f64) -> Result<f64> {
    let sol = closed_solution(FlowKind::Rl1, a)?;
    let dens = |t: f64| -> Result<f64> {
        let [f, h] = sol.eval(t)?;
        Ok(eh_density().eval(&crate::flows::embed(AnsatzKind::Ccy, &[f, h])))
    };
    Ok(dens(t)? / dens(0.0)?)
}

/// The printed line `−½ (1 + 25t/a²)^{−11/10}` as a multiple of `F(φ0)`.
pub fn eh_evolution_printed(a: f64, t: f64) -> f64 {
    -0.5 * (1.0 + 25.0 / (a * a) * t).powf(-1.1)
}
