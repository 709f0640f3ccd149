use std::fs;
use std::path::{Path, PathBuf};

use g2flow::closedform::{
    closed_solution, continuity_of, derived_solution, loglog_slope, ClosedSolution, FIT_TOLERANCE,
};
use g2flow::{
    classify, integrate, reduce_to_ode, Diagnostics, Horizon, ODESystem, Output, Settings,
    Termination, Trajectory,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::{ExperimentConfig, Family};
use crate::{CliError, CliResult};

/// Samples per decade for the classification pass.
const PER_DECADE: usize = 24;
/// Decades of `|τ − t|` sampled before a finite-time singularity. Deeper
/// grids run into the gap between the detected and the true blow-up time.
const FINITE_DECADES: usize = 4;

/// Engine output compared against a power-law solution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// `printed` for the published closed form, `engine` for the power law
    /// solving the engine's own system.
    pub source: String,
    pub rate: f64,
    pub f_exp: f64,
    pub h_exp: f64,
    /// `None` when the solution exists for all time in both directions.
    pub singular_time: Option<f64>,
    /// Max relative error in `f`, `h` over samples inside 90% of the span
    /// toward the singular end. `None` if no sample was comparable.
    pub max_rel_error: Option<f64>,
    pub samples_compared: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Singularity {
    /// Singular time, or `None` for an infinite-time classification.
    pub horizon: Option<f64>,
    pub exponent: f64,
    pub sup_estimate: f64,
    pub samples_in_fit: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Continuity {
    /// `power_law` (exact, from the engine's power-law solution) or
    /// `trajectory` (fitted from samples).
    pub source: String,
    /// `sup |d/dt g_ii|`; `None` when unbounded.
    pub sup_dgdt: Option<f64>,
    pub uniformly_continuous: Option<bool>,
    pub reaches_singular_time: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config: ExperimentConfig,
    pub termination: Termination,
    pub tau_est: Option<f64>,
    pub final_time: f64,
    pub final_state: Vec<f64>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub samples: usize,
    pub closed_form: Option<Comparison>,
    pub power_law: Option<Comparison>,
    pub singularity_type: Option<String>,
    pub singularity: Option<Singularity>,
    /// Why no classification was made, when `singularity_type` is null.
    pub singularity_note: Option<String>,
    pub continuity: Continuity,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Symbolic right-hand sides of the raw-parameter system, in parameter order.
pub fn reduce_json(cfg: &ExperimentConfig) -> CliResult<Value> {
    let sys = reduce_to_ode(cfg.flow, cfg.family.kind())?;
    let map: Map<String, Value> = sys
        .display_pairs()
        .into_iter()
        .map(|(k, v)| (k, Value::String(v)))
        .collect();
    Ok(Value::Object(map))
}

fn settings(cfg: &ExperimentConfig, output: Output) -> Settings {
    let mut s = Settings::with_tolerances(cfg.rtol, cfg.atol);
    s.k = cfg.k;
    s.output = output;
    s
}

fn compare(sol: &ClosedSolution, source: &str, t0: f64, tr: &Trajectory) -> Comparison {
    let tau = sol.singular_time();
    let dir = (tr.last_time() - t0).signum();
    // only the part of the run heading toward a singular end is trimmed
    let limit = if tau.is_finite() && tau.signum() == dir {
        0.9 * tau.abs()
    } else {
        f64::INFINITY
    };
    let mut err: Option<f64> = None;
    let mut n = 0;
    for (t, y) in tr.times.iter().zip(&tr.states) {
        let s = t - t0;
        if s.abs() > limit || !sol.contains(s) {
            continue;
        }
        if let Ok([f, h]) = sol.eval(s) {
            let e = ((y[0] - f) / f).abs().max(((y[1] - h) / h).abs());
            err = Some(err.map_or(e, |m: f64| m.max(e)));
            n += 1;
        }
    }
    Comparison {
        source: source.into(),
        rate: sol.rate,
        f_exp: sol.f_exp,
        h_exp: sol.h_exp,
        singular_time: finite(tau),
        max_rel_error: err.and_then(finite),
        samples_compared: n,
    }
}

/// Dense samples approaching the end of the run, for classification.
/// Returns the horizon, the trajectory, and the time offset of the samples.
fn approach_pass(
    sys: &ODESystem,
    diag: &Diagnostics,
    cfg: &ExperimentConfig,
    tr: &Trajectory,
) -> Result<(Horizon, Trajectory), String> {
    let (t0, t1) = cfg.t_span;
    let y0 = cfg.family.initial_state();
    match tr.termination {
        Termination::BlowUp { t_est } => {
            let span = t_est - t0;
            let grid: Vec<f64> = (1..=FINITE_DECADES * PER_DECADE)
                .map(|i| t_est - span * 10f64.powf(-(i as f64) / PER_DECADE as f64))
                .collect();
            let dense = integrate(
                sys,
                Some(diag),
                &y0,
                t0,
                t_est,
                &settings(cfg, Output::Times(grid)),
            )
            .map_err(|e| e.to_string())?;
            Ok((Horizon::Finite(t_est), dense))
        }
        Termination::ReachedEnd => {
            let span = (t1 - t0).abs();
            let decades = span.log10().floor();
            if decades < 1.0 {
                return Err(format!(
                    "span {span} is too short to classify an immortal run"
                ));
            }
            let dir = (t1 - t0).signum();
            let n = decades as usize * PER_DECADE;
            let grid: Vec<f64> = (0..=n)
                .map(|i| t0 + dir * 10f64.powf(i as f64 / PER_DECADE as f64))
                .collect();
            let dense = integrate(
                sys,
                Some(diag),
                &y0,
                t0,
                t1,
                &settings(cfg, Output::Times(grid)),
            )
            .map_err(|e| e.to_string())?;
            Ok((Horizon::Infinite, dense))
        }
        other => Err(format!(
            "run stopped without reaching a conclusion: {other:?}"
        )),
    }
}

/// Distance to the end of the run used for fitting.
fn distance(h: Horizon, t0: f64, t: f64) -> f64 {
    match h {
        Horizon::Finite(tau) => (tau - t).abs(),
        Horizon::Infinite => (t - t0).abs(),
    }
}

fn trajectory_continuity(
    sys: &ODESystem,
    t0: f64,
    h: Horizon,
    dense: &Trajectory,
    full: &Trajectory,
) -> Continuity {
    let speed = |y: &[f64]| -> f64 {
        let dy = sys.rhs_vec(y);
        y.iter()
            .zip(&dy)
            .map(|(a, b)| (2.0 * a * b).abs())
            .fold(0.0, f64::max)
    };
    let sup = full
        .states
        .iter()
        .chain(&dense.states)
        .map(|y| speed(y))
        .fold(0.0, f64::max);
    // slope of the speed against the distance to the end over the last decade
    let pts: Vec<(f64, f64)> = dense
        .times
        .iter()
        .zip(&dense.states)
        .map(|(t, y)| (distance(h, t0, *t), speed(y)))
        .filter(|(d, s)| *d > 0.0 && *s > 0.0)
        .collect();
    let bounded = if pts.len() >= 2 * PER_DECADE {
        let tail = &pts[pts.len() - PER_DECADE..];
        let (xs, ys): (Vec<f64>, Vec<f64>) = tail.iter().copied().unzip();
        let e = loglog_slope(&xs, &ys);
        Some(match h {
            Horizon::Finite(_) => e >= -FIT_TOLERANCE,
            Horizon::Infinite => e <= FIT_TOLERANCE,
        })
    } else {
        None
    };
    Continuity {
        source: "trajectory".into(),
        sup_dgdt: if bounded == Some(false) {
            None
        } else {
            finite(sup)
        },
        uniformly_continuous: bounded,
        reaches_singular_time: matches!(h, Horizon::Finite(_)),
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// Floats in shortest round-trip form, with exponents only at the extremes.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn write_csv(path: &Path, tr: &Trajectory) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut header = vec!["t".to_string()];
    header.extend(tr.labels.iter().cloned());
    header.extend(["volfactor", "normT2", "trT", "lambda", "eh_density"].map(String::from));
    w.write_record(&header).map_err(|e| csv_error(path, e))?;
    for ((t, y), d) in tr.times.iter().zip(&tr.states).zip(&tr.diagnostics) {
        let mut row = vec![num(*t)];
        row.extend(y.iter().map(|v| num(*v)));
        row.extend([d.volfactor, d.norm_t2, d.tr_t, d.lambda, d.eh_density].map(num));
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

/// Integrate one experiment and write `trajectory.csv` and `summary.json`
/// into its output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<Summary> {
    cfg.validate()?;
    let family = cfg.family.kind();
    let sys = reduce_to_ode(cfg.flow, family)?;
    let diag = Diagnostics::new(family)?;
    let (t0, t1) = cfg.t_span;
    let y0 = cfg.family.initial_state();
    let tr = integrate(
        &sys,
        Some(&diag),
        &y0,
        t0,
        t1,
        &settings(cfg, Output::Steps),
    )?;

    let (closed_form, power_law, power_sol) = match cfg.family {
        Family::Ccy { a } => {
            let printed = closed_solution(cfg.flow, a)
                .ok()
                .map(|s| compare(&s, "printed", t0, &tr));
            let derived = derived_solution(&sys, a).ok();
            let engine = derived.as_ref().map(|s| compare(s, "engine", t0, &tr));
            (printed, engine, derived)
        }
        Family::Heisenberg { .. } => (None, None, None),
    };

    let (mut singularity_type, mut singularity, mut singularity_note) = (None, None, None);
    let approach = approach_pass(&sys, &diag, cfg, &tr);
    match &approach {
        Ok((h, dense)) => {
            let samples: Vec<(f64, f64)> = dense
                .times
                .iter()
                .zip(&dense.diagnostics)
                .map(|(t, d)| match h {
                    Horizon::Finite(_) => (*t, d.lambda),
                    Horizon::Infinite => (t - t0, d.lambda),
                })
                .collect();
            match classify(&samples, *h) {
                Ok(r) => {
                    singularity_type = Some(r.kind.as_str().to_string());
                    singularity = Some(Singularity {
                        horizon: match r.horizon {
                            Horizon::Finite(t) => Some(t),
                            Horizon::Infinite => None,
                        },
                        exponent: r.exponent,
                        sup_estimate: r.sup_estimate,
                        samples_in_fit: r.samples_in_fit,
                    });
                }
                Err(e) => singularity_note = Some(e.to_string()),
            }
        }
        Err(e) => singularity_note = Some(e.clone()),
    }

    let continuity = match (&power_sol, &approach) {
        (Some(sol), _) => {
            let end = if sol.singular_time().is_finite()
                && sol.singular_time().signum() == (t1 - t0).signum()
            {
                sol.singular_time()
            } else {
                t1 - t0
            };
            let r = continuity_of(sol, (0.0, end));
            Continuity {
                source: "power_law".into(),
                sup_dgdt: finite(r.sup_dgdt),
                uniformly_continuous: Some(r.uniformly_continuous),
                reaches_singular_time: r.reaches_singular_time,
            }
        }
        (None, Ok((h, dense))) => trajectory_continuity(&sys, t0, *h, dense, &tr),
        (None, Err(_)) => Continuity {
            source: "trajectory".into(),
            sup_dgdt: None,
            uniformly_continuous: None,
            reaches_singular_time: false,
        },
    };

    let summary = Summary {
        config: cfg.clone(),
        termination: tr.termination,
        tau_est: tr.termination.blow_up_time(),
        final_time: tr.last_time(),
        final_state: tr.last_state().to_vec(),
        accepted_steps: tr.accepted,
        rejected_steps: tr.rejected,
        samples: tr.len(),
        closed_form,
        power_law,
        singularity_type,
        singularity,
        singularity_note,
        continuity,
    };

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_csv(&dir.join("trajectory.csv"), &tr)?;
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    let path = dir.join("summary.json");
    fs::write(&path, json + "\n").map_err(|e| CliError::io(path, e))?;
    Ok(summary)
}

/// One sweep point's outcome.
pub struct SweepItem {
    pub index: usize,
    pub point: Vec<f64>,
    pub dir: PathBuf,
    pub result: CliResult<Summary>,
}

/// Run one experiment per initial point, concurrently, each into
/// `output_dir/point_NNN`, and write an index `sweep.csv`.
pub fn sweep_experiments(cfg: &ExperimentConfig, points: &[Vec<f64>]) -> CliResult<Vec<SweepItem>> {
    if points.is_empty() {
        return Err(CliError::Config("sweep needs at least one point".into()));
    }
    let configs: Vec<(usize, ExperimentConfig)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut c = cfg.clone();
            c.family = cfg.family.with_state(p)?;
            c.output_dir = cfg.output_dir.join(format!("point_{i:03}"));
            c.validate()?;
            Ok((i, c))
        })
        .collect::<CliResult<_>>()?;
    let items: Vec<SweepItem> = configs
        .into_par_iter()
        .map(|(i, c)| SweepItem {
            index: i,
            point: points[i].clone(),
            dir: c.output_dir.clone(),
            result: run_experiment(&c),
        })
        .collect();

    fs::create_dir_all(&cfg.output_dir).map_err(|e| CliError::io(&cfg.output_dir, e))?;
    let path = cfg.output_dir.join("sweep.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
    w.write_record([
        "index",
        "point",
        "dir",
        "status",
        "tau_est",
        "singularity_type",
        "error",
    ])
    .map_err(|e| csv_error(&path, e))?;
    for it in &items {
        let point = it
            .point
            .iter()
            .map(|v| num(*v))
            .collect::<Vec<_>>()
            .join(";");
        let dir = it.dir.display().to_string();
        let row = match &it.result {
            Ok(s) => [
                it.index.to_string(),
                point,
                dir,
                termination_name(&s.termination).into(),
                s.tau_est.map(num).unwrap_or_default(),
                s.singularity_type.clone().unwrap_or_default(),
                String::new(),
            ],
            Err(e) => [
                it.index.to_string(),
                point,
                dir,
                "error".into(),
                String::new(),
                String::new(),
                e.to_string(),
            ],
        };
        w.write_record(&row).map_err(|e| csv_error(&path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&path, e))?;
    Ok(items)
}

pub fn termination_name(t: &Termination) -> &'static str {
    match t {
        Termination::ReachedEnd => "reached_end",
        Termination::BlowUp { .. } => "blow_up",
        Termination::StepUnderflow { .. } => "step_underflow",
        Termination::MaxSteps { .. } => "max_steps",
    }
}
