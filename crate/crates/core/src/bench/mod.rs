//! Benchmark cases with expected metrics, sweeps and the numeric stability map.

mod cylinder;
mod experiments;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::beam::{dominant_frequencies, FsiConfig, FsiDriver, FsiRecord};
use crate::error::{Error, Result};
use crate::ibm::{ForcingGains, Motion};
use crate::mesh::{CartesianGrid, Rect};
use crate::ns::{FlowState, FluidProperties, SchemeKind};
use crate::spectral::{dominant_frequency, spectral_peaks};

pub use cylinder::{CylinderCase, CylinderRun, FarField, Sample};
pub use experiments::{
    gain_sensitivity_sweep, marginal_alpha_intercept, stability_map_experiment, GainAxis, MapPoint, StabilityMap,
    SweepRow,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseId {
    StationaryCylinder,
    OscillatoryChannel,
    TransverseOscillation,
    InlineOscillation,
    BeamFsi,
}

impl CaseId {
    pub const ALL: [CaseId; 5] = [
        CaseId::StationaryCylinder,
        CaseId::OscillatoryChannel,
        CaseId::TransverseOscillation,
        CaseId::InlineOscillation,
        CaseId::BeamFsi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::StationaryCylinder => "stationary-cylinder",
            CaseId::OscillatoryChannel => "oscillatory-channel",
            CaseId::TransverseOscillation => "transverse-oscillation",
            CaseId::InlineOscillation => "inline-oscillation",
            CaseId::BeamFsi => "beam-fsi",
        }
    }
}

impl std::str::FromStr for CaseId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        CaseId::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = CaseId::ALL.iter().map(|c| c.name()).collect();
            format!("unknown case '{s}', expected one of {}", names.join(", "))
        })
    }
}

/// Accepted interval of one metric and the published data set it encodes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub metric: String,
    pub min: f64,
    pub max: f64,
    pub reference: String,
}

impl Expectation {
    pub fn around(metric: &str, target: f64, tol: f64, reference: &str) -> Self {
        Expectation { metric: metric.into(), min: target - tol, max: target + tol, reference: reference.into() }
    }

    pub fn at_least(metric: &str, min: f64, reference: &str) -> Self {
        Expectation { metric: metric.into(), min, max: f64::INFINITY, reference: reference.into() }
    }

    pub fn at_most(metric: &str, max: f64, reference: &str) -> Self {
        Expectation { metric: metric.into(), min: f64::NEG_INFINITY, max, reference: reference.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CaseSetup {
    Cylinder(CylinderCase),
    Fsi(FsiConfig),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkCase {
    pub id: CaseId,
    pub setup: CaseSetup,
    /// Leading fraction of the record discarded before statistics.
    pub trim: f64,
    pub expected: Vec<Expectation>,
}

fn free_stream_cylinder(h: f64, max_cells: usize, mu: f64, dt: f64, t_end: f64) -> CylinderCase {
    CylinderCase {
        domain: Rect::square(-20.0, 20.0),
        refined: Rect::new(-1.0, 3.0, -1.0, 1.0),
        h,
        max_cells,
        center: [0.0, 0.0],
        radius: 0.5,
        fluid: FluidProperties { rho: 1.0, mu },
        scheme: SchemeKind::Bdf1,
        dt,
        t_end,
        gains: ForcingGains { alpha: 0.0, beta: 0.0, gamma: 0.0 },
        ds_over_h: 1.0,
        motion: Motion::Stationary,
        far_field: FarField::FreeStream { speed: 1.0 },
        u_ref: 1.0,
        seed_vortex: 0.0,
    }
}

impl BenchmarkCase {
    /// Re = 100 behind a fixed cylinder on the desk-scale stretched mesh.
    pub fn stationary_cylinder() -> Self {
        let mut c = free_stream_cylinder(1.0 / 48.0, 80_000, 0.01, 1.2e-2, 100.0);
        c.domain = Rect::square(-30.0, 30.0);
        c.gains = ForcingGains { alpha: -4.8e4, beta: 0.0, gamma: 0.0 };
        c.seed_vortex = 0.3;
        let r = "fixed cylinder Re=100, 117k mesh, BDF1, dt=1.2e-2";
        BenchmarkCase {
            id: CaseId::StationaryCylinder,
            setup: CaseSetup::Cylinder(c),
            trim: 0.5,
            expected: vec![
                Expectation::around("mean_drag", 1.34, 0.07, r),
                Expectation::around("lift_amplitude", 0.33, 0.04, r),
                Expectation::around("strouhal", 0.160, 0.008, r),
            ],
        }
    }

    /// Channel flow reversing with the pulsed inflow, 0 <= Re <= 100.
    pub fn oscillatory_channel() -> Self {
        let h = 0.41 / 82.0;
        let mut c = CylinderCase {
            domain: Rect::new(0.0, 2.2, 0.0, 0.41),
            refined: Rect::new(0.0, 2.2, 0.0, 0.41),
            h,
            max_cells: 1_000_000,
            center: [0.2, 0.2],
            radius: 0.05,
            fluid: FluidProperties { rho: 1.0, mu: 1e-3 },
            scheme: SchemeKind::Bdf1,
            dt: 2e-3,
            t_end: 8.0,
            gains: ForcingGains { alpha: 0.0, beta: 0.0, gamma: 0.0 },
            ds_over_h: 1.0,
            motion: Motion::Stationary,
            far_field: FarField::PulsedChannel { coefficient: 6.0 / (0.41 * 0.41), omega: PI / 8.0 },
            u_ref: 1.0,
            seed_vortex: 0.0,
        };
        c.set_scaled_gains(1.0, 0.0, 0.0);
        BenchmarkCase {
            id: CaseId::OscillatoryChannel,
            setup: CaseSetup::Cylinder(c),
            trim: 0.0,
            expected: vec![
                Expectation::at_most("peak_reynolds", 100.0 + 1e-9, "pulsed channel, 0 <= Re <= 100"),
                Expectation::around("drag_peak_offset", 0.0, 0.5, "pulsed channel, drag symmetric about peak inflow"),
            ],
        }
    }

    /// Cylinder oscillating across a Re = 185 stream at `ratio` times the
    /// natural shedding frequency, on a coarse mesh. Above lock-in the lift
    /// is expected to beat.
    pub fn transverse_oscillation(ratio: f64) -> Self {
        let f_e = ratio * 0.19;
        let dt = 1.0 / (720.0 * f_e);
        let mut c = free_stream_cylinder(1.0 / 16.0, 15_000, 5.4e-3, dt, 120.0);
        c.domain = Rect::square(-15.0, 15.0);
        c.refined = Rect::new(-1.0, 3.0, -1.25, 1.25);
        c.motion = Motion::Transverse { amplitude: 0.2, frequency: f_e };
        c.set_scaled_gains(3.9, 1.9, 0.0);
        let expected = if ratio > 1.0 {
            let r = "transverse oscillation Re=185, f_e/f_0 > 1, beating lift";
            vec![
                Expectation::at_least("beat_partner_ratio", 0.1, r),
                Expectation::at_least("envelope_modulation", 0.1, r),
            ]
        } else {
            Vec::new()
        };
        BenchmarkCase { id: CaseId::TransverseOscillation, setup: CaseSetup::Cylinder(c), trim: 0.25, expected }
    }

    /// Cylinder oscillating in still fluid at Re = 100, KC = 5.
    pub fn inline_oscillation() -> Self {
        let f_e = 0.2;
        let mut c = free_stream_cylinder(1.0 / 48.0, 80_000, 1e-2, 1.0 / (720.0 * f_e), 5.0 / f_e);
        c.refined = Rect::new(-1.5, 1.5, -1.0, 1.0);
        c.motion = Motion::Inline { amplitude: 0.796, frequency: f_e };
        c.far_field = FarField::Quiescent;
        c.u_ref = 2.0 * PI * f_e * 0.796;
        c.set_scaled_gains(3.9, 1.9, 0.0);
        let r = "inline oscillation Re=100, KC=5, 117k mesh";
        BenchmarkCase {
            id: CaseId::InlineOscillation,
            setup: CaseSetup::Cylinder(c),
            trim: 0.4,
            expected: vec![Expectation::around("drag_amplitude", 3.5, 0.2, r)],
        }
    }

    /// Cantilever in water with derivative gain `-gamma = neg_gamma`.
    pub fn beam_fsi(water: bool, neg_gamma: f64) -> Self {
        let cfg = if water { FsiConfig::water(-neg_gamma) } else { FsiConfig::air(-neg_gamma) };
        let expected = match (water, neg_gamma > 0.0) {
            (false, _) => {
                let r = "cantilever in air";
                vec![Expectation::around("f1", 175.0, 4.0, r), Expectation::around("f2", 1080.0, 30.0, r)]
            }
            (true, false) => vec![Expectation::around("f1", 175.0, 0.05 * 175.0, "cantilever in water, gamma = 0")],
            (true, true) => {
                let r = "cantilever in water, -gamma = 1.8";
                vec![Expectation::around("f1", 140.0, 7.0, r), Expectation::around("f2", 865.0, 45.0, r)]
            }
        };
        BenchmarkCase { id: CaseId::BeamFsi, setup: CaseSetup::Fsi(cfg), trim: 0.0, expected }
    }

    pub fn preset(id: CaseId) -> Self {
        match id {
            CaseId::StationaryCylinder => Self::stationary_cylinder(),
            CaseId::OscillatoryChannel => Self::oscillatory_channel(),
            CaseId::TransverseOscillation => Self::transverse_oscillation(1.1),
            CaseId::InlineOscillation => Self::inline_oscillation(),
            CaseId::BeamFsi => Self::beam_fsi(true, 1.8),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if !(0.0..1.0).contains(&self.trim) {
            errs.push(format!("trim must lie in [0, 1), got {}", self.trim));
        }
        for e in &self.expected {
            if e.reference.trim().is_empty() {
                errs.push(format!("expectation on '{}' has no reference data set", e.metric));
            }
            if !(e.min <= e.max) {
                errs.push(format!("expectation on '{}' has an empty interval", e.metric));
            }
        }
        if let CaseSetup::Cylinder(c) = &self.setup {
            if let Err(Error::Config(mut more)) = c.validate() {
                errs.append(&mut more);
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// Time series of one run, one entry per step.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Series { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub metric: String,
    pub value: Option<f64>,
    pub min: f64,
    pub max: f64,
    pub reference: String,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    SolverError,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::SolverError => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub id: CaseId,
    pub metrics: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    /// Stage and message of a solver failure; the series stops there.
    pub failure: Option<String>,
    #[serde(skip)]
    pub series: Series,
}

impl CaseReport {
    pub fn verdict(&self) -> Verdict {
        if self.failure.is_some() {
            Verdict::SolverError
        } else if self.checks.iter().all(|c| c.pass) {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

/// Mean half peak-to-peak over whole periods of the dominant frequency,
/// or over the whole signal when there is no spectral peak.
pub fn oscillation_amplitude(signal: &[f64], dt: f64) -> f64 {
    let half_range = |v: &[f64]| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        0.5 * (hi - lo)
    };
    let period = dominant_frequency(signal, dt).map(|f| (1.0 / (f * dt)).round() as usize).unwrap_or(0);
    if period < 2 || period > signal.len() {
        return half_range(signal);
    }
    let windows: Vec<f64> = signal.chunks_exact(period).map(half_range).collect();
    mean(&windows)
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn trimmed<T>(v: &[T], trim: f64) -> &[T] {
    &v[((v.len() as f64 * trim) as usize).min(v.len())..]
}

/// Summary metrics of a cylinder record.
pub fn cylinder_metrics(case: &CylinderCase, samples: &[Sample], trim: f64) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    let kept = trimmed(samples, trim);
    if kept.len() < 4 {
        return m;
    }
    let drag: Vec<f64> = kept.iter().map(|s| s.drag).collect();
    let lift: Vec<f64> = kept.iter().map(|s| s.lift).collect();
    let slip: Vec<f64> = kept.iter().map(|s| s.slip).collect();
    m.insert("mean_drag".into(), mean(&drag));
    m.insert("drag_amplitude".into(), oscillation_amplitude(&drag, case.dt));
    m.insert("lift_amplitude".into(), oscillation_amplitude(&lift, case.dt));
    m.insert("mean_slip".into(), mean(&slip));
    let tail = &slip[slip.len() - (slip.len() / 10).max(1)..];
    m.insert("terminal_slip".into(), mean(tail));
    m.insert("max_cfl".into(), samples.iter().map(|s| s.cfl).fold(0.0, f64::max));
    if let Ok(f) = dominant_frequency(&lift, case.dt) {
        m.insert("lift_frequency".into(), f);
        m.insert("strouhal".into(), f * case.diameter() / case.u_ref);
    }
    let peaks: Vec<f64> = spectral_peaks(&lift, case.dt).iter().take(2).map(|p| p.frequency).collect();
    if peaks.len() == 2 {
        m.insert("lift_peak_1".into(), peaks[0]);
        m.insert("lift_peak_2".into(), peaks[1]);
    }
    if let Motion::Transverse { frequency, .. } = case.motion {
        let (partner, modulation) = beat_measures(&lift, case.dt, frequency);
        m.insert("beat_partner_ratio".into(), partner);
        m.insert("envelope_modulation".into(), modulation);
    }
    if let FarField::PulsedChannel { coefficient, omega } = case.far_field {
        let height = case.domain.height();
        let t_max = samples.last().map_or(0.0, |s| s.t);
        let peak_sin = if omega * t_max >= PI / 2.0 { 1.0 } else { (omega * t_max).sin() };
        let mean_speed = coefficient * height * height / 6.0 * peak_sin;
        m.insert("peak_reynolds".into(), mean_speed * case.diameter() / case.fluid.nu());
        let peak = samples.iter().max_by(|a, b| a.drag.total_cmp(&b.drag)).map_or(f64::NAN, |s| s.t);
        m.insert("drag_peak_offset".into(), peak - PI / (2.0 * omega));
    }
    m
}

/// Beat indicators of a signal driven at `forcing`: the strongest spectral
/// peak within half an octave of the drive (excluding the drive itself)
/// relative to the drive peak, and `(max - min) / (max + min)` of the
/// per-period half ranges.
pub fn beat_measures(signal: &[f64], dt: f64, forcing: f64) -> (f64, f64) {
    let peaks = spectral_peaks(signal, dt);
    let near = |p: &&crate::spectral::Peak| (p.frequency - forcing).abs() <= 0.05 * forcing;
    let drive = peaks.iter().find(near).map_or(0.0, |p| p.magnitude);
    let partner = peaks
        .iter()
        .filter(|p| !near(p) && p.frequency >= 0.5 * forcing && p.frequency <= 1.5 * forcing)
        .map(|p| p.magnitude)
        .fold(0.0, f64::max);
    let ratio = if drive > 0.0 { partner / drive } else { f64::NAN };
    let period = (1.0 / (forcing * dt)).round() as usize;
    let ranges: Vec<f64> = signal
        .chunks_exact(period.max(2))
        .map(|w| {
            let (lo, hi) = w.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
            0.5 * (hi - lo)
        })
        .collect();
    let (lo, hi) = ranges.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let modulation = if ranges.len() >= 2 && hi + lo > 0.0 { (hi - lo) / (hi + lo) } else { 0.0 };
    (ratio, modulation)
}

fn check(expected: &[Expectation], metrics: &BTreeMap<String, f64>) -> Vec<Check> {
    expected
        .iter()
        .map(|e| {
            let value = metrics.get(&e.metric).copied();
            Check {
                metric: e.metric.clone(),
                value,
                min: e.min,
                max: e.max,
                reference: e.reference.clone(),
                pass: value.is_some_and(|v| v >= e.min && v <= e.max),
            }
        })
        .collect()
}

/// Flow after one step of a running case.
pub struct StepView<'a> {
    pub step: usize,
    pub steps: usize,
    pub grid: &'a CartesianGrid,
    pub flow: &'a FlowState,
}

/// Runs a case to completion. Solver failures end the record and are
/// reported rather than returned as errors.
pub fn run_case(case: &BenchmarkCase, mut progress: impl FnMut(usize, usize)) -> Result<CaseReport> {
    run_case_observed(case, |v| progress(v.step, v.steps))
}

/// [`run_case`] with access to the flow field after every step.
pub fn run_case_observed(case: &BenchmarkCase, mut observe: impl FnMut(StepView<'_>)) -> Result<CaseReport> {
    case.validate()?;
    let (metrics, series, failure) = match &case.setup {
        CaseSetup::Cylinder(c) => {
            let mut run = CylinderRun::new(c.clone())?;
            let steps = c.steps();
            let mut samples = Vec::with_capacity(steps);
            let mut failure = None;
            for k in 0..steps {
                match run.advance() {
                    Ok(s) => samples.push(s),
                    Err(e) => {
                        failure = Some(e.to_string());
                        break;
                    }
                }
                observe(StepView { step: k + 1, steps, grid: run.grid(), flow: run.state() });
            }
            let mut series = Series::new(&["t", "C_d", "C_l", "E_x", "CFL"]);
            series.rows = samples.iter().map(|s| vec![s.t, s.drag, s.lift, s.slip, s.cfl]).collect();
            (cylinder_metrics(c, &samples, case.trim), series, failure)
        }
        CaseSetup::Fsi(cfg) => {
            let mut driver = FsiDriver::new(cfg.clone())?;
            let steps = cfg.steps();
            let mut records = Vec::with_capacity(steps);
            let mut failure = None;
            for k in 0..steps {
                match driver.step() {
                    Ok(r) => records.push(r),
                    Err(e) => {
                        failure = Some(e.to_string());
                        break;
                    }
                }
                observe(StepView { step: k + 1, steps, grid: driver.grid(), flow: driver.flow_state() });
            }
            let mut series = Series::new(&["t", "tip_displacement", "mean_displacement"]);
            series.rows = records.iter().map(|r| vec![r.t, r.tip_displacement, r.mean_displacement]).collect();
            (fsi_metrics(cfg, &records), series, failure)
        }
    };
    let checks = check(&case.expected, &metrics);
    Ok(CaseReport { id: case.id, metrics, checks, failure, series })
}

/// Modal frequencies from the mean beam deflection after the excitation pulse.
pub fn fsi_metrics(cfg: &FsiConfig, records: &[FsiRecord]) -> BTreeMap<String, f64> {
    let mut metrics = BTreeMap::new();
    let after_pulse = (crate::beam::EXCITATION_PERIOD / cfg.dt).ceil() as usize;
    if records.len() > after_pulse + 16 {
        let mean: Vec<f64> = records[after_pulse..].iter().map(|r| r.mean_displacement).collect();
        let report = dominant_frequencies(&mean, cfg.dt, 2);
        for (k, f) in report.frequencies.iter().enumerate() {
            metrics.insert(format!("f{}", k + 1), *f);
        }
        let tip = records.iter().map(|r| r.tip_displacement.abs()).fold(0.0, f64::max);
        metrics.insert("max_tip_displacement".into(), tip);
    }
    metrics
}
