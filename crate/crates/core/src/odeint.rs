//! Adaptive Dormand-Prince 5(4) integration of the reduced systems with
//! blow-up detection and per-sample diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flows::{DiagnosticSample, Diagnostics, ODESystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Output {
    /// One sample per accepted step, plus the initial point.
    Steps,
    /// Samples at the given times via the method's continuous extension.
    Times(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step magnitude; chosen automatically when `None`.
    pub h0: Option<f64>,
    pub max_steps: usize,
    /// Stop when any state component or Λ exceeds this.
    pub blowup_cap: f64,
    /// Stop when the step falls below this multiple of `|t|`.
    pub step_floor: f64,
    /// Transversal curvature bound fed to the Λ diagnostic.
    pub k: f64,
    pub output: Output,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            rtol: 1e-10,
            atol: 1e-12,
            h0: None,
            max_steps: 1_000_000,
            blowup_cap: 1e8,
            step_floor: 1e-14,
            k: 0.0,
            output: Output::Steps,
        }
    }
}

impl Settings {
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Settings {
            rtol,
            atol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.rtol.is_finite()) {
            return Err(Error::InvalidSettings("rtol must be positive"));
        }
        if !(self.atol > 0.0 && self.atol.is_finite()) {
            return Err(Error::InvalidSettings("atol must be positive"));
        }
        if !(self.blowup_cap > 0.0) || !(self.step_floor > 0.0) {
            return Err(Error::InvalidSettings("thresholds must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Termination {
    ReachedEnd,
    /// A state or Λ crossed the cap, or the step collapsed relative to `|t|`.
    /// `t_est` is the last accepted time.
    BlowUp {
        t_est: f64,
    },
    /// The step fell below the smallest representable increment near `t = 0`.
    StepUnderflow {
        t: f64,
    },
    /// The step budget ran out before reaching the end.
    MaxSteps {
        t: f64,
    },
}

impl Termination {
    pub fn blow_up_time(&self) -> Option<f64> {
        match self {
            Termination::BlowUp { t_est } => Some(*t_est),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub labels: Vec<String>,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Empty unless the run was given a [`Diagnostics`].
    pub diagnostics: Vec<DiagnosticSample>,
    pub termination: Termination,
    pub accepted: usize,
    pub rejected: usize,
}

impl Trajectory {
    pub fn last_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory has at least the initial point")
    }

    pub fn last_state(&self) -> &[f64] {
        self.states
            .last()
            .expect("trajectory has at least the initial point")
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

fn scaled_norm(v: &[f64], y: &[f64], y2: &[f64], s: &Settings) -> f64 {
    let n = v.len() as f64;
    let sum: f64 = v
        .iter()
        .zip(y.iter().zip(y2))
        .map(|(e, (a, b))| {
            let sc = s.atol + s.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

fn initial_step<F>(f: &F, t0: f64, y0: &[f64], f0: &[f64], dir: f64, s: &Settings) -> f64
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let d0 = scaled_norm(y0, y0, y0, s);
    let d1 = scaled_norm(f0, y0, y0, s);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, k)| y + dir * h0 * k).collect();
    let mut f1 = vec![0.0; y0.len()];
    f(t0 + dir * h0, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = scaled_norm(&diff, y0, y0, s) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}

// Dense-output weights of the Dormand-Prince continuous extension.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// Fourth-order continuous extension on `[t, t + h]` from the stage
/// derivatives of the accepted step; `theta` is the fraction of the step.
fn dense(theta: f64, h: f64, y0: &[f64], y1: &[f64], k: &[Vec<f64>]) -> Vec<f64> {
    let theta1 = 1.0 - theta;
    (0..y0.len())
        .map(|i| {
            let ydiff = y1[i] - y0[i];
            let bspl = h * k[0][i] - ydiff;
            let r4 = ydiff - h * k[6][i] - bspl;
            let r5 = h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>();
            y0[i] + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)))
        })
        .collect()
}

/// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction).
///
/// `sample` maps a state to its diagnostics; `None` skips them.
pub fn integrate_fn<F, G>(
    f: F,
    sample: Option<G>,
    labels: Vec<String>,
    y0: &[f64],
    t0: f64,
    t1: f64,
    s: &Settings,
) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
    G: Fn(&[f64]) -> DiagnosticSample,
{
    s.validate()?;
    let n = y0.len();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    f(t0, y0, &mut k[0]);
    if !y0.iter().all(|v| v.is_finite() && *v > 0.0) || !k[0].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidInitialState);
    }

    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut traj = Trajectory {
        labels,
        times: Vec::new(),
        states: Vec::new(),
        diagnostics: Vec::new(),
        termination: Termination::ReachedEnd,
        accepted: 0,
        rejected: 0,
    };
    let record = |traj: &mut Trajectory, t: f64, y: Vec<f64>| {
        if let Some(g) = &sample {
            traj.diagnostics.push(g(&y));
        }
        traj.times.push(t);
        traj.states.push(y);
    };

    let grid: Option<Vec<f64>> = match &s.output {
        Output::Steps => None,
        Output::Times(ts) => {
            let mut v: Vec<f64> = ts
                .iter()
                .copied()
                .filter(|t| (t - t0) * dir >= 0.0 && (t1 - t) * dir >= 0.0)
                .collect();
            v.sort_by(|a, b| (dir * a).partial_cmp(&(dir * b)).unwrap());
            v.dedup();
            Some(v)
        }
    };
    let mut next_out = 0usize;
    match &grid {
        None => record(&mut traj, t0, y0.to_vec()),
        Some(g) => {
            while next_out < g.len() && g[next_out] == t0 {
                record(&mut traj, t0, y0.to_vec());
                next_out += 1;
            }
        }
    }
    if t1 == t0 {
        return Ok(traj);
    }

    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h =
        s.h0.unwrap_or_else(|| initial_step(&f, t0, y0, &k[0], dir, s))
            .min((t1 - t0).abs());
    let mut err_old = 1e-4f64;
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut errv = vec![0.0; n];
    let expo1 = 0.2 - BETA * 0.75;

    loop {
        if traj.accepted + traj.rejected >= s.max_steps {
            traj.termination = Termination::MaxSteps { t };
            break;
        }
        if h < s.step_floor * t.abs() {
            traj.termination = Termination::BlowUp { t_est: t };
            break;
        }
        if h < f64::MIN_POSITIVE * 1e10 || t + dir * h == t {
            traj.termination = Termination::StepUnderflow { t };
            break;
        }
        let last = (t + dir * h - t1) * dir >= 0.0;
        if last {
            h = (t1 - t).abs();
        }
        let hs = dir * h;

        for stage in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..stage {
                    acc += hs * A[stage][j] * k[j][i];
                }
                ytmp[i] = acc;
            }
            f(t + C[stage] * hs, &ytmp, &mut k[stage]);
            if stage == 6 {
                ynew.copy_from_slice(&ytmp);
            }
        }
        for i in 0..n {
            errv[i] = hs * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
        }
        let finite = ynew.iter().all(|v| v.is_finite()) && k[6].iter().all(|v| v.is_finite());
        let positive = ynew.iter().all(|v| *v > 0.0);
        let err = if finite {
            scaled_norm(&errv, &y, &ynew, s)
        } else {
            f64::INFINITY
        };

        if err <= 1.0 && positive {
            // accept
            let t_new = if last { t1 } else { t + hs };
            if let Some(g) = &grid {
                while next_out < g.len() && (g[next_out] - t_new) * dir <= 0.0 {
                    let theta = (g[next_out] - t) / hs;
                    let yi = dense(theta, hs, &y, &ynew, &k);
                    record(&mut traj, g[next_out], yi);
                    next_out += 1;
                }
            }
            let k6 = k[6].clone();
            k[0].copy_from_slice(&k6);
            t = t_new;
            y.copy_from_slice(&ynew);
            traj.accepted += 1;
            if grid.is_none() {
                record(&mut traj, t, y.clone());
            }

            let state_cap = y.iter().any(|v| v.abs() > s.blowup_cap);
            let lambda_cap = traj
                .diagnostics
                .last()
                .is_some_and(|d| !(d.lambda <= s.blowup_cap));
            let lambda_cap = lambda_cap
                || (grid.is_some()
                    && sample
                        .as_ref()
                        .is_some_and(|g| !(g(&y).lambda <= s.blowup_cap)));
            if state_cap || lambda_cap {
                traj.termination = Termination::BlowUp { t_est: t };
                break;
            }
            if last {
                traj.termination = Termination::ReachedEnd;
                break;
            }
            let fac11 = err.max(1e-16).powf(expo1);
            let fac = (fac11 / err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            h /= fac;
            err_old = err.max(1e-4);
        } else {
            traj.rejected += 1;
            if !finite || !positive {
                h *= 0.25;
            } else {
                let fac11 = err.powf(expo1);
                h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
            }
        }
    }
    Ok(traj)
}

/// Integrate a reduced system. Diagnostics are recorded when `diag` is given.
pub fn integrate(
    sys: &ODESystem,
    diag: Option<&Diagnostics>,
    y0: &[f64],
    t0: f64,
    t1: f64,
    s: &Settings,
) -> Result<Trajectory> {
    if y0.len() != sys.dim() {
        return Err(Error::ParameterCount {
            expected: sys.dim(),
            got: y0.len(),
        });
    }
    let labels = sys.labels().iter().map(|l| l.to_string()).collect();
    let k = s.k;
    integrate_fn(
        |_t, y, dy| sys.rhs(y, dy),
        diag.map(|d| move |y: &[f64]| d.eval(y, k)),
        labels,
        y0,
        t0,
        t1,
        s,
    )
}

/// Independent integrations over a grid of initial states, in grid order.
/// Per-item failures are returned in place rather than aborting the sweep.
pub fn sweep(
    sys: &ODESystem,
    diag: Option<&Diagnostics>,
    y0_grid: &[Vec<f64>],
    t0: f64,
    t1: f64,
    s: &Settings,
) -> Result<Vec<Result<Trajectory>>> {
    if y0_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    Ok(y0_grid
        .par_iter()
        .map(|y0| integrate(sys, diag, y0, t0, t1, s))
        .collect())
}
