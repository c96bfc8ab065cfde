use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cylinder_metrics, BenchmarkCase, CaseSetup, CylinderCase, CylinderRun};
use crate::error::{Error, Result};
use crate::ns::SchemeKind;
use crate::stability::{self, Region, ScaledGains, C_MAX_2D};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GainAxis {
    /// `-alpha dt^2`
    Alpha,
    /// `-beta dt`
    Beta,
    /// `-gamma`
    Gamma,
    DsOverH,
}

impl std::str::FromStr for GainAxis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "alpha" => Ok(GainAxis::Alpha),
            "beta" => Ok(GainAxis::Beta),
            "gamma" => Ok(GainAxis::Gamma),
            "ds_over_h" => Ok(GainAxis::DsOverH),
            _ => Err(format!("unknown sweep axis '{s}', expected alpha, beta, gamma or ds_over_h")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub mean_drag: f64,
    pub lift_amplitude: f64,
    pub strouhal: f64,
    pub terminal_slip: f64,
    /// Outside the analytic stability region of the model problem.
    pub outside_analytic_region: bool,
    pub diverged: Option<String>,
}

fn cylinder_of(case: &BenchmarkCase) -> Result<&CylinderCase> {
    match &case.setup {
        CaseSetup::Cylinder(c) => Ok(c),
        CaseSetup::Fsi(_) => Err(Error::Config(vec![format!("{} is not a cylinder case", case.id.name())])),
    }
}

fn inside_analytic_region(c: &CylinderCase) -> bool {
    let [x, y, neg_gamma] = c.scaled_gains();
    match stability::analytic_region(c.scheme, -neg_gamma, C_MAX_2D) {
        Region::Polygon { constraints, .. } => constraints.iter().all(|hp| hp.contains([x, y], 1e-12)),
        Region::Origin => x == 0.0 && y == 0.0,
        Region::Unstable => false,
    }
}

/// Runs `case` once per value of `axis`, in parallel over the current rayon
/// pool. Diverged runs become rows with NaN metrics.
pub fn gain_sensitivity_sweep(case: &BenchmarkCase, axis: GainAxis, values: &[f64]) -> Result<Vec<SweepRow>> {
    let base = cylinder_of(case)?.clone();
    let rows = values
        .par_iter()
        .map(|&value| {
            let mut c = base.clone();
            let [a, b, g] = c.scaled_gains();
            match axis {
                GainAxis::Alpha => c.set_scaled_gains(value, b, g),
                GainAxis::Beta => c.set_scaled_gains(a, value, g),
                GainAxis::Gamma => c.set_scaled_gains(a, b, value),
                GainAxis::DsOverH => c.ds_over_h = value,
            }
            let outside = !inside_analytic_region(&c);
            if outside {
                log::warn!("sweep value {value} on {axis:?} lies outside the analytic stability region");
            }
            let (samples, diverged) = simulate(&c, c.steps());
            let m = cylinder_metrics(&c, &samples, case.trim);
            let get = |k: &str| m.get(k).copied().unwrap_or(f64::NAN);
            SweepRow {
                value,
                mean_drag: get("mean_drag"),
                lift_amplitude: get("lift_amplitude"),
                strouhal: get("strouhal"),
                terminal_slip: get("terminal_slip"),
                outside_analytic_region: outside,
                diverged,
            }
        })
        .collect();
    Ok(rows)
}

fn simulate(c: &CylinderCase, steps: usize) -> (Vec<super::Sample>, Option<String>) {
    let mut run = match CylinderRun::new(c.clone()) {
        Ok(r) => r,
        Err(e) => return (Vec::new(), Some(e.to_string())),
    };
    let mut samples = Vec::with_capacity(steps);
    for _ in 0..steps {
        match run.advance() {
            Ok(s) => samples.push(s),
            Err(e) => return (samples, Some(e.to_string())),
        }
    }
    (samples, None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapPoint {
    /// `-alpha dt^2`
    pub x: f64,
    /// `-beta dt`
    pub y: f64,
    pub stable: bool,
    pub analytic: stability::Verdict,
}

/// Blow-up classification of short flow runs over a set of scaled gains,
/// next to the analytic region of the model problem.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityMap {
    pub scheme: SchemeKind,
    pub neg_gamma: f64,
    pub steps: usize,
    pub points: Vec<MapPoint>,
    pub analytic: Region,
}

impl StabilityMap {
    /// Whether every analytically stable point was also stable in the flow.
    pub fn contains_analytic_region(&self) -> bool {
        self.points.iter().filter(|p| p.analytic == stability::Verdict::Stable).all(|p| p.stable)
    }
}

fn with_gains(base: &CylinderCase, scheme: SchemeKind, x: f64, y: f64, neg_gamma: f64) -> CylinderCase {
    let mut c = base.clone();
    c.scheme = scheme;
    c.set_scaled_gains(x, y, neg_gamma);
    c
}

fn survives(base: &CylinderCase, scheme: SchemeKind, x: f64, y: f64, neg_gamma: f64, steps: usize) -> bool {
    simulate(&with_gains(base, scheme, x, y, neg_gamma), steps).1.is_none()
}

/// Classifies each `(x, y) = (-alpha dt^2, -beta dt)` by running `steps`
/// steps of `case`.
pub fn stability_map_experiment(
    case: &BenchmarkCase,
    scheme: SchemeKind,
    neg_gamma: f64,
    points: &[(f64, f64)],
    steps: usize,
) -> Result<StabilityMap> {
    let base = cylinder_of(case)?.clone();
    let points = points
        .par_iter()
        .map(|&(x, y)| {
            let g = ScaledGains::from_plane(x, y, -neg_gamma, C_MAX_2D);
            let analytic = stability::verdict(scheme, g);
            MapPoint { x, y, stable: survives(&base, scheme, x, y, neg_gamma, steps), analytic }
        })
        .collect();
    Ok(StabilityMap {
        scheme,
        neg_gamma,
        steps,
        points,
        analytic: stability::analytic_region(scheme, -neg_gamma, C_MAX_2D),
    })
}

/// Largest stable `-alpha dt^2` at `beta = 0` by bisection between a
/// stable `lo` and an unstable `hi`, to within `tol`.
pub fn marginal_alpha_intercept(
    case: &BenchmarkCase,
    scheme: SchemeKind,
    neg_gamma: f64,
    mut lo: f64,
    mut hi: f64,
    steps: usize,
    tol: f64,
) -> Result<f64> {
    let base = cylinder_of(case)?.clone();
    if !survives(&base, scheme, lo, 0.0, neg_gamma, steps) {
        return Err(Error::Config(vec![format!("lower bracket -alpha dt^2 = {lo} is already unstable")]));
    }
    if survives(&base, scheme, hi, 0.0, neg_gamma, steps) {
        return Err(Error::Config(vec![format!("upper bracket -alpha dt^2 = {hi} is still stable")]));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if survives(&base, scheme, mid, 0.0, neg_gamma, steps) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
