use serde::{Deserialize, Serialize};

use super::boundary::{marker_kinematics, LagrangianBoundary};
use super::kernel::Stencil;
use crate::error::{IbmError, SolverError};
use crate::field::Field;
use crate::mesh::CartesianGrid;

/// Feedback gains on the slip integral, slip and slip rate. All non-positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingGains {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub gamma: f64,
}

impl ForcingGains {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, SolverError> {
        let g = ForcingGains { alpha, beta, gamma };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !(v <= 0.0) || !v.is_finite() {
                return Err(SolverError::Config(format!("gain {name} must be finite and <= 0, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn transfer_stencils(grid: &CartesianGrid, positions: &[[f64; 2]]) -> Result<Vec<Stencil>, IbmError> {
    positions.iter().enumerate().map(|(k, &r)| Stencil::new(grid, k, r)).collect()
}

/// Kernel-weighted velocity at each marker.
pub fn interpolate_to_markers(
    grid: &CartesianGrid,
    u: &Field,
    positions: &[[f64; 2]],
) -> Result<Vec<[f64; 2]>, IbmError> {
    let stencils = transfer_stencils(grid, positions)?;
    Ok(gather(&stencils, u))
}

fn gather(stencils: &[Stencil], u: &Field) -> Vec<[f64; 2]> {
    let (ux, uy) = (u.component(0), u.component(1));
    stencils.iter().map(|s| [s.gather(ux), s.gather(uy)]).collect()
}

fn scatter(grid: &CartesianGrid, stencils: &[Stencil], forces: &[[f64; 2]], ds: f64) -> Field {
    let mut f = Field::vector(grid);
    let (fx, fy) = f.split_mut();
    for (s, force) in stencils.iter().zip(forces) {
        // delta * dV = (w / h^2) * h * ds
        let scale = ds / s.h;
        for (&c, &w) in s.cells.iter().zip(&s.weights) {
            fx[c] += force[0] * w * scale;
            fy[c] += force[1] * w * scale;
        }
    }
    f
}

/// Eulerian field `sum_k F_k delta(x - r_k) h ds` from marker forces.
pub fn spread_to_grid(
    grid: &CartesianGrid,
    positions: &[[f64; 2]],
    forces: &[[f64; 2]],
    ds: f64,
) -> Result<Field, IbmError> {
    if forces.len() != positions.len() {
        return Err(IbmError::LengthMismatch { expected: positions.len(), got: forces.len() });
    }
    let stencils = transfer_stencils(grid, positions)?;
    Ok(scatter(grid, &stencils, forces, ds))
}

/// Feedback force per marker. `integral` accumulates the slip and is updated first.
pub fn compute_forcing(
    integral: &mut [[f64; 2]],
    u_ib: &[[f64; 2]],
    u_b: &[[f64; 2]],
    du_ib: &[[f64; 2]],
    du_b: &[[f64; 2]],
    gains: &ForcingGains,
    dt: f64,
) -> Vec<[f64; 2]> {
    (0..integral.len())
        .map(|k| {
            let mut f = [0.0; 2];
            for c in 0..2 {
                let slip = u_ib[k][c] - u_b[k][c];
                integral[k][c] += slip * dt;
                f[c] = gains.alpha * integral[k][c] + gains.beta * slip + gains.gamma * (du_ib[k][c] - du_b[k][c]);
            }
            f
        })
        .collect()
}

/// Result of one forcing evaluation.
#[derive(Clone, Debug)]
pub struct ForcingOutput {
    /// Eulerian acceleration to add to the momentum equation.
    pub field: Field,
    pub positions: Vec<[f64; 2]>,
    pub forces: Vec<[f64; 2]>,
    pub u_ib: Vec<[f64; 2]>,
    pub u_b: Vec<[f64; 2]>,
    /// `sum_k F_k h ds`, equal to the volume integral of `field`.
    pub total: [f64; 2],
}

/// A Lagrangian boundary with its feedback controller state.
#[derive(Clone, Debug)]
pub struct VirtualBoundary {
    boundary: LagrangianBoundary,
    gains: ForcingGains,
    integral: Vec<[f64; 2]>,
    prev_u_ib: Option<Vec<[f64; 2]>>,
    cached: Option<Vec<Stencil>>,
}

impl VirtualBoundary {
    pub fn new(boundary: LagrangianBoundary, gains: ForcingGains, grid: &CartesianGrid) -> crate::Result<Self> {
        gains.validate()?;
        let n = boundary.len();
        // validates the initial placement
        let stencils = transfer_stencils(grid, &boundary.positions(0.0))?;
        let cached = matches!(boundary.motion(), super::Motion::Stationary).then_some(stencils);
        Ok(VirtualBoundary { boundary, gains, integral: vec![[0.0; 2]; n], prev_u_ib: None, cached })
    }

    pub fn boundary(&self) -> &LagrangianBoundary {
        &self.boundary
    }

    pub fn boundary_mut(&mut self) -> &mut LagrangianBoundary {
        &mut self.boundary
    }

    pub fn gains(&self) -> &ForcingGains {
        &self.gains
    }

    pub fn integral(&self) -> &[[f64; 2]] {
        &self.integral
    }

    /// Evaluates the forcing from the velocity at time `t`.
    pub fn forcing(&mut self, grid: &CartesianGrid, u: &Field, t: f64, dt: f64) -> Result<ForcingOutput, IbmError> {
        let positions = self.boundary.positions(t);
        let stencils = match &self.cached {
            Some(s) => s.clone(),
            None => transfer_stencils(grid, &positions)?,
        };
        let u_ib = gather(&stencils, u);
        let (u_b, du_b) = marker_kinematics(&self.boundary, t, dt);
        let du_ib: Vec<[f64; 2]> = match &self.prev_u_ib {
            Some(prev) => u_ib.iter().zip(prev).map(|(a, b)| [(a[0] - b[0]) / dt, (a[1] - b[1]) / dt]).collect(),
            None => vec![[0.0; 2]; u_ib.len()],
        };
        let forces = compute_forcing(&mut self.integral, &u_ib, &u_b, &du_ib, &du_b, &self.gains, dt);
        let ds = self.boundary.spacing();
        let field = scatter(grid, &stencils, &forces, ds);
        let total = stencils.iter().zip(&forces).fold([0.0; 2], |acc, (s, f)| {
            let dv = s.h * ds;
            [acc[0] + f[0] * dv, acc[1] + f[1] * dv]
        });
        self.prev_u_ib = Some(u_ib.clone());
        Ok(ForcingOutput { field, positions, forces, u_ib, u_b, total })
    }
}
