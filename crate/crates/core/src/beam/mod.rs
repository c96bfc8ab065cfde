//! Clamped-free Euler-Bernoulli beam, its analytic modal frequencies and
//! the partitioned coupling with the flow solver.

mod fsi;

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::BeamError;
use crate::spectral::spectral_peaks;

pub use fsi::{FsiConfig, FsiDriver, FsiRecord};

/// Material and section of a rectangular cantilever.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamProperties {
    pub density: f64,
    pub length: f64,
    pub width: f64,
    pub thickness: f64,
    pub youngs_modulus: f64,
}

impl BeamProperties {
    /// Aluminium plate of the fluid-structure benchmark.
    pub fn aluminium_plate() -> Self {
        BeamProperties { density: 2670.0, length: 0.15, width: 0.01, thickness: 0.005, youngs_modulus: 6.5e10 }
    }

    pub fn validate(&self) -> Result<(), BeamError> {
        for (name, value) in [
            ("density", self.density),
            ("length", self.length),
            ("width", self.width),
            ("thickness", self.thickness),
            ("youngs_modulus", self.youngs_modulus),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(BeamError::InvalidProperty { name, value });
            }
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.width * self.thickness
    }

    pub fn second_moment(&self) -> f64 {
        self.width * self.thickness.powi(3) / 12.0
    }

    pub fn bending_stiffness(&self) -> f64 {
        self.youngs_modulus * self.second_moment()
    }

    pub fn mass_per_length(&self) -> f64 {
        self.density * self.area()
    }
}

/// First `n_modes` roots of `1 + cos(z) cosh(z) = 0`.
pub fn kn_roots(n_modes: usize) -> Vec<f64> {
    // cos z + 1/cosh z has the same roots and stays bounded
    let f = |z: f64| z.cos() + 1.0 / z.cosh();
    (1..=n_modes)
        .map(|k| {
            let (mut lo, mut hi) = ((k - 1) as f64 * PI, k as f64 * PI);
            let flo = f(lo);
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if (f(mid) > 0.0) == (flo > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Natural frequency in Hz for the dimensionless root `kl = K L`.
pub fn vacuum_frequency(props: &BeamProperties, kl: f64) -> f64 {
    let k = kl / props.length;
    k * k * (props.bending_stiffness() / props.mass_per_length()).sqrt() / (2.0 * PI)
}

/// Wet-to-dry frequency ratio from the added mass of a plate in fluid of density `rho`.
pub fn fluid_frequency_ratio(rho: f64, props: &BeamProperties) -> f64 {
    (1.0 + PI * rho * props.width / (4.0 * props.density * props.thickness)).powf(-0.5)
}

/// Duration of the tip excitation pulse.
pub const EXCITATION_PERIOD: f64 = 2e-4;

/// One sine period of tip force sampled at mid-step, zero afterwards.
pub fn tip_excitation(t: f64, dt: f64, amplitude: f64) -> f64 {
    let mid = t + 0.5 * dt;
    if mid < EXCITATION_PERIOD {
        amplitude * (2.0 * PI * mid / EXCITATION_PERIOD).sin()
    } else {
        0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrequencyReport {
    /// Ascending peak frequencies in Hz.
    pub frequencies: Vec<f64>,
    /// Fewer than the requested number of peaks rose above the noise floor.
    pub partial: bool,
}

/// The `n` strongest well-separated spectral peaks of `series`, ascending.
pub fn dominant_frequencies(series: &[f64], dt: f64, n: usize) -> FrequencyReport {
    let separation = 4.0 / (series.len() as f64 * dt);
    let mut picked: Vec<f64> = Vec::with_capacity(n);
    for p in spectral_peaks(series, dt) {
        if picked.len() == n {
            break;
        }
        if picked.iter().all(|f| (f - p.frequency).abs() > separation) {
            picked.push(p.frequency);
        }
    }
    picked.sort_by(f64::total_cmp);
    FrequencyReport { partial: picked.len() < n, frequencies: picked }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BeamScheme {
    /// Trapezoidal stiffness average; unconditionally stable and energy conserving.
    AverageAcceleration,
    /// Explicit central difference, limited by `dt < 2 / omega_max`.
    CentralDifference,
}

/// Nodal displacements at two time levels; node 0 is the clamped root.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamState {
    pub t: f64,
    pub displacement: Vec<f64>,
    pub previous: Vec<f64>,
}

impl BeamState {
    pub fn at_rest(n_cells: usize) -> Self {
        BeamState { t: 0.0, displacement: vec![0.0; n_cells + 1], previous: vec![0.0; n_cells + 1] }
    }

    pub fn tip(&self) -> f64 {
        *self.displacement.last().unwrap()
    }

    /// Trapezoidal mean of the displacement along the span.
    pub fn mean_displacement(&self) -> f64 {
        let w = &self.displacement;
        let n = w.len() - 1;
        (0.5 * (w[0] + w[n]) + w[1..n].iter().sum::<f64>()) / n as f64
    }
}

/// Finite-difference cantilever with lumped mass.
///
/// Curvatures use central second differences with a mirrored ghost node at
/// the root; the tip carries no moment. Stiffness is the Hessian of the
/// trapezoidal bending energy, which yields the shear-free tip naturally.
#[derive(Clone, Debug)]
pub struct BeamSolver {
    props: BeamProperties,
    n_cells: usize,
    dx: f64,
    dt: f64,
    scheme: BeamScheme,
    mass: DVector<f64>,
    stiffness: DMatrix<f64>,
    implicit: Option<Cholesky<f64, Dyn>>,
}

impl BeamSolver {
    pub fn new(props: BeamProperties, n_cells: usize, dt: f64, scheme: BeamScheme) -> Result<Self, BeamError> {
        props.validate()?;
        if n_cells < 2 {
            return Err(BeamError::TooFewCells(n_cells));
        }
        let n = n_cells;
        let dx = props.length / n as f64;
        let mut mass = DVector::from_element(n, props.mass_per_length() * dx);
        mass[n - 1] *= 0.5;

        // rows: curvature at nodes 0..n-1, columns: free nodes 1..n
        let mut curv = DMatrix::<f64>::zeros(n, n);
        let inv = 1.0 / (dx * dx);
        curv[(0, 0)] = 2.0 * inv;
        for i in 1..n {
            curv[(i, i - 1)] += -2.0 * inv;
            curv[(i, i)] += inv;
            if i >= 2 {
                curv[(i, i - 2)] += inv;
            }
        }
        let mut weights = DVector::from_element(n, props.bending_stiffness() * dx);
        weights[0] *= 0.5;
        let stiffness = curv.transpose() * DMatrix::from_diagonal(&weights) * &curv;

        let mut solver = BeamSolver { props, n_cells, dx, dt, scheme, mass, stiffness, implicit: None };
        match scheme {
            BeamScheme::AverageAcceleration => {
                let lhs = DMatrix::from_diagonal(&solver.mass.map(|m| m / (dt * dt))) + &solver.stiffness * 0.25;
                solver.implicit = Some(lhs.cholesky().expect("mass plus stiffness is positive definite"));
            }
            BeamScheme::CentralDifference => {
                let bound = solver.explicit_bound();
                if dt >= bound {
                    return Err(BeamError::ExplicitUnstable { dt, bound });
                }
            }
        }
        Ok(solver)
    }

    pub fn props(&self) -> &BeamProperties {
        &self.props
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Axial coordinates of the nodes measured from the root.
    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_cells).map(|i| i as f64 * self.dx).collect()
    }

    /// Discrete natural angular frequencies, ascending.
    pub fn natural_frequencies(&self) -> Vec<f64> {
        let s = self.mass.map(|m| 1.0 / m.sqrt());
        let scaled = DMatrix::from_diagonal(&s) * &self.stiffness * DMatrix::from_diagonal(&s);
        let mut w: Vec<f64> = SymmetricEigen::new(scaled).eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
        w.sort_by(f64::total_cmp);
        w
    }

    /// Largest stable step of the central-difference scheme.
    pub fn explicit_bound(&self) -> f64 {
        2.0 / self.natural_frequencies().last().copied().unwrap_or(f64::INFINITY)
    }

    /// Nodal forces from a distributed load `q` (N/m at each node) and a tip force.
    fn nodal_forces(&self, q: &[f64], tip_force: f64) -> Result<DVector<f64>, BeamError> {
        let n = self.n_cells;
        if q.len() != n + 1 {
            return Err(BeamError::LoadLength { expected: n + 1, got: q.len() });
        }
        let mut f = DVector::from_fn(n, |i, _| q[i + 1] * self.dx);
        f[n - 1] = 0.5 * q[n] * self.dx + tip_force;
        Ok(f)
    }

    /// Advances one step under distributed load `q` and a transverse tip force.
    pub fn step(&self, state: &BeamState, q: &[f64], tip_force: f64) -> Result<BeamState, BeamError> {
        let f = self.nodal_forces(q, tip_force)?;
        let n = self.n_cells;
        let w = DVector::from_column_slice(&state.displacement[1..]);
        let w_old = DVector::from_column_slice(&state.previous[1..]);
        let dt2 = self.dt * self.dt;
        let inertia = (2.0 * &w - &w_old).component_mul(&self.mass) / dt2;
        let w_new = match (&self.implicit, self.scheme) {
            (Some(chol), BeamScheme::AverageAcceleration) => {
                let rhs = f + inertia - &self.stiffness * (2.0 * &w + &w_old) * 0.25;
                chol.solve(&rhs)
            }
            _ => (f - &self.stiffness * &w).component_div(&self.mass) * dt2 + 2.0 * &w - &w_old,
        };
        let t = state.t + self.dt;
        let max = w_new.amax();
        let limit = 1e3 * self.props.length;
        if !(max <= limit) {
            return Err(BeamError::BlowUp { t, max, limit });
        }
        let mut displacement = vec![0.0; n + 1];
        displacement[1..].copy_from_slice(w_new.as_slice());
        Ok(BeamState { t, displacement, previous: state.displacement.clone() })
    }

    /// Static deflection under a tip force.
    pub fn static_tip_deflection(&self, tip_force: f64) -> f64 {
        let mut f = DVector::zeros(self.n_cells);
        f[self.n_cells - 1] = tip_force;
        let w = self.stiffness.clone().cholesky().expect("clamped stiffness is positive definite").solve(&f);
        w[self.n_cells - 1]
    }

    /// Kinetic plus bending energy between the two stored levels; conserved
    /// exactly by the average-acceleration scheme without load.
    pub fn energy(&self, state: &BeamState) -> f64 {
        let w = DVector::from_column_slice(&state.displacement[1..]);
        let w_old = DVector::from_column_slice(&state.previous[1..]);
        let v = (&w - &w_old) / self.dt;
        let kinetic = 0.5 * v.component_mul(&v).dot(&self.mass);
        let potential = match self.scheme {
            BeamScheme::AverageAcceleration => {
                let s = &w + &w_old;
                0.125 * s.dot(&(&self.stiffness * &s))
            }
            BeamScheme::CentralDifference => 0.5 * w.dot(&(&self.stiffness * &w_old)),
        };
        kinetic + potential
    }
}
