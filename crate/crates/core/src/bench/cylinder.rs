use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, SolverError};
use crate::field::Field;
use crate::ibm::{slip_error, ForcingGains, LagrangianBoundary, Motion, VirtualBoundary};
use crate::mesh::{ratio_for_cell_count, CartesianGrid, Rect};
use crate::ns::{
    BoundaryConditions, EdgeBc, FlowSolver, FlowState, FluidProperties, PressureBc, SchemeKind, SolverSettings,
    StepReport, TimeScheme, VelocityBc,
};

/// Far-field flow around the cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FarField {
    /// Uniform stream entering west, south and north; advective outflow east.
    FreeStream { speed: f64 },
    /// Channel with no-slip walls and the pulsed parabolic profile at both ends.
    PulsedChannel { coefficient: f64, omega: f64 },
    /// Fluid at rest with do-nothing conditions on every edge.
    Quiescent,
}

impl FarField {
    pub fn conditions(&self, domain: &Rect) -> BoundaryConditions {
        match *self {
            FarField::FreeStream { speed } => BoundaryConditions::free_stream(speed),
            FarField::PulsedChannel { coefficient, omega } => {
                let end = EdgeBc {
                    velocity: VelocityBc::PulsedParabolic { coefficient, height: domain.height(), omega },
                    pressure: PressureBc::ZeroGradient,
                };
                BoundaryConditions { west: end, east: end, south: EdgeBc::wall(), north: EdgeBc::wall() }
            }
            FarField::Quiescent => BoundaryConditions::do_nothing(),
        }
    }
}

/// A rigid circular cylinder in a two-dimensional flow.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderCase {
    pub domain: Rect,
    /// Uniformly refined box around the body (and its motion).
    pub refined: Rect,
    /// Cell size inside the refined box.
    pub h: f64,
    /// Cell budget; the outer stretching ratio is the largest that meets it.
    pub max_cells: usize,
    pub center: [f64; 2],
    pub radius: f64,
    pub fluid: FluidProperties,
    pub scheme: SchemeKind,
    pub dt: f64,
    pub t_end: f64,
    pub gains: ForcingGains,
    /// Marker spacing relative to `h`.
    pub ds_over_h: f64,
    pub motion: Motion,
    pub far_field: FarField,
    /// Reference velocity of the force coefficients and the blow-up detector.
    pub u_ref: f64,
    /// Peak transverse velocity of a vortex seeded behind the body at start.
    #[serde(default)]
    pub seed_vortex: f64,
}

impl CylinderCase {
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    /// Gains given as `(-alpha dt^2, -beta dt, -gamma)`.
    pub fn set_scaled_gains(&mut self, alpha_dt2: f64, beta_dt: f64, neg_gamma: f64) {
        self.gains =
            ForcingGains { alpha: -alpha_dt2 / (self.dt * self.dt), beta: -beta_dt / self.dt, gamma: -neg_gamma };
    }

    /// `(-alpha dt^2, -beta dt, -gamma)`.
    pub fn scaled_gains(&self) -> [f64; 3] {
        [-self.gains.alpha * self.dt * self.dt, -self.gains.beta * self.dt, -self.gains.gamma]
    }

    pub fn grid(&self) -> Result<CartesianGrid> {
        if self.refined == self.domain {
            return Ok(CartesianGrid::uniform(self.domain, self.h)?);
        }
        let ratio = ratio_for_cell_count(self.domain, self.refined, self.h, self.max_cells)?;
        Ok(CartesianGrid::stretched(self.domain, self.refined, self.h, ratio)?)
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        let mut positive = |name: &str, v: f64| {
            if !(v > 0.0) || !v.is_finite() {
                errs.push(format!("{name} must be positive and finite, got {v}"));
            }
        };
        positive("h", self.h);
        positive("radius", self.radius);
        positive("dt", self.dt);
        positive("t_end", self.t_end);
        positive("ds_over_h", self.ds_over_h);
        positive("u_ref", self.u_ref);
        if let Err(e) = self.gains.validate() {
            errs.push(e.to_string());
        }
        if let Err(e) = self.fluid.validate() {
            errs.push(e.to_string());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }
}

/// One recorded time level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub drag: f64,
    pub lift: f64,
    pub slip: f64,
    pub cfl: f64,
}

/// Time integration of a cylinder case with force and slip diagnostics.
pub struct CylinderRun {
    case: CylinderCase,
    flow: FlowSolver,
    state: FlowState,
    body: VirtualBoundary,
    last_report: Option<StepReport>,
}

impl CylinderRun {
    pub fn new(case: CylinderCase) -> Result<Self> {
        case.validate()?;
        let grid = case.grid()?;
        let bc = case.far_field.conditions(&case.domain);
        let scheme = TimeScheme { kind: case.scheme, dt: case.dt };
        let settings = SolverSettings { velocity_scale: case.u_ref, ..SolverSettings::default() };
        let flow = FlowSolver::new(grid.clone(), case.fluid, scheme, bc, settings)?;
        let mut state = flow.rest_state();
        if case.seed_vortex != 0.0 {
            let [xc, yc] = [case.center[0] + 3.0 * case.radius, case.center[1]];
            let r2 = case.radius * case.radius;
            state.u = Field::vector_from_fn(&grid, |x, y| {
                let d2 = (x - xc).powi(2) + (y - yc).powi(2);
                [0.0, case.seed_vortex * (-d2 / r2).exp()]
            });
        }
        let ds = case.ds_over_h * case.h;
        let boundary = LagrangianBoundary::circle_with_spacing(case.center, case.radius, ds, case.motion)?;
        let body = VirtualBoundary::new(boundary, case.gains, &grid)?;
        Ok(CylinderRun { case, flow, state, body, last_report: None })
    }

    pub fn case(&self) -> &CylinderCase {
        &self.case
    }

    pub fn grid(&self) -> &CartesianGrid {
        self.flow.grid()
    }

    pub fn state(&self) -> &FlowState {
        &self.state
    }

    pub fn last_report(&self) -> Option<&StepReport> {
        self.last_report.as_ref()
    }

    /// Advances one step. Forces are evaluated from the forcing applied in
    /// this step; the body's own fluid inertia is removed for moving bodies.
    pub fn advance(&mut self) -> Result<Sample> {
        let c = &self.case;
        let (dt, t) = (c.dt, self.state.t);
        let forcing =
            self.body.forcing(self.flow.grid(), &self.state.u, t, dt).map_err(|e| Error::at_stage("forcing", e))?;
        let report = self.flow.step(&mut self.state, Some(&forcing.field)).map_err(|e| Error::at_stage("fluid", e))?;
        let limit = 50.0 * c.u_ref;
        if !(report.max_velocity <= limit) {
            return Err(Error::at_stage(
                "fluid",
                SolverError::BlowUp { t: report.t, max_velocity: report.max_velocity, limit },
            ));
        }
        let rho = c.fluid.rho;
        let inner = rho * PI * c.radius * c.radius;
        let accel = c.motion.acceleration(t);
        let body_force = [-rho * forcing.total[0] + inner * accel[0], -rho * forcing.total[1] + inner * accel[1]];
        let q = 2.0 / (rho * c.diameter() * c.u_ref * c.u_ref);
        let sample = Sample {
            t: report.t,
            drag: q * body_force[0],
            lift: q * body_force[1],
            slip: slip_error(&forcing.u_ib, &forcing.u_b),
            cfl: report.cfl,
        };
        self.last_report = Some(report);
        Ok(sample)
    }
}
