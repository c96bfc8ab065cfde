//! Collocated finite-volume incompressible Navier-Stokes solver.
//!
//! Spatial terms are Gauss-integrated over the cells of a tensor-product
//! grid; time is advanced with BDF1 or BDF2 and a PISO-type pressure
//! correction with momentum-interpolated face fluxes.

pub mod operators;
pub mod outflow;
pub mod poisson;
mod solver;

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::field::Field;
use crate::mesh::CartesianGrid;

pub use operators::{convective_term, diffusion_term, divergence, interpolate_face_flux, pressure_gradient};
pub use outflow::apply_advective_outflow;
pub use poisson::{solve_pressure_poisson, PoissonSolver};
pub use solver::{compute_cfl, FlowSolver, SolverSettings, StepReport};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluidProperties {
    /// Density in kg/m^3.
    pub rho: f64,
    /// Dynamic viscosity in Pa s.
    pub mu: f64,
}

impl FluidProperties {
    pub fn new(rho: f64, mu: f64) -> Result<Self, SolverError> {
        let p = FluidProperties { rho, mu };
        p.validate()?;
        Ok(p)
    }

    pub fn nu(&self) -> f64 {
        self.mu / self.rho
    }

    pub fn reynolds(&self, velocity: f64, length: f64) -> f64 {
        velocity * length / self.nu()
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.rho > 0.0) || !(self.mu >= 0.0) || !self.rho.is_finite() || !self.mu.is_finite() {
            return Err(SolverError::Config(format!("invalid fluid properties rho={} mu={}", self.rho, self.mu)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Bdf1,
    Bdf2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeScheme {
    pub kind: SchemeKind,
    pub dt: f64,
}

impl TimeScheme {
    pub fn bdf1(dt: f64) -> Self {
        TimeScheme { kind: SchemeKind::Bdf1, dt }
    }

    pub fn bdf2(dt: f64) -> Self {
        TimeScheme { kind: SchemeKind::Bdf2, dt }
    }

    /// `(c0, c1, c2)` with `du/dt ~ (c0 u^{n+1} - c1 u^n + c2 u^{n-1}) / dt`.
    /// BDF2 falls back to BDF1 until a second level exists.
    pub fn coefficients(&self, have_previous: bool) -> (f64, f64, f64) {
        match (self.kind, have_previous) {
            (SchemeKind::Bdf2, true) => (1.5, 2.0, 0.5),
            _ => (1.0, 1.0, 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    West,
    East,
    South,
    North,
}

impl Edge {
    pub const ALL: [Edge; 4] = [Edge::West, Edge::East, Edge::South, Edge::North];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Outward unit normal.
    pub fn normal(self) -> [f64; 2] {
        match self {
            Edge::West => [-1.0, 0.0],
            Edge::East => [1.0, 0.0],
            Edge::South => [0.0, -1.0],
            Edge::North => [0.0, 1.0],
        }
    }

    /// Index of the velocity component normal to this edge.
    pub fn normal_component(self) -> usize {
        match self {
            Edge::West | Edge::East => 0,
            Edge::South | Edge::North => 1,
        }
    }

    /// Number of boundary faces on this edge.
    pub fn len(self, grid: &CartesianGrid) -> usize {
        match self {
            Edge::West | Edge::East => grid.ny(),
            Edge::South | Edge::North => grid.nx(),
        }
    }

    /// Flat index of the cell adjacent to face `k` of this edge.
    pub fn cell(self, grid: &CartesianGrid, k: usize) -> usize {
        match self {
            Edge::West => grid.idx(0, k),
            Edge::East => grid.idx(grid.nx() - 1, k),
            Edge::South => grid.idx(k, 0),
            Edge::North => grid.idx(k, grid.ny() - 1),
        }
    }

    /// Centre of boundary face `k`.
    pub fn face_center(self, grid: &CartesianGrid, k: usize) -> [f64; 2] {
        match self {
            Edge::West => [grid.x().lo(), grid.y().centers()[k]],
            Edge::East => [grid.x().hi(), grid.y().centers()[k]],
            Edge::South => [grid.x().centers()[k], grid.y().lo()],
            Edge::North => [grid.x().centers()[k], grid.y().hi()],
        }
    }

    pub fn face_area(self, grid: &CartesianGrid, k: usize) -> f64 {
        match self {
            Edge::West | Edge::East => grid.y().widths()[k],
            Edge::South | Edge::North => grid.x().widths()[k],
        }
    }

    /// Distance from the adjacent cell centre to face `k`.
    pub fn face_distance(self, grid: &CartesianGrid, _k: usize) -> f64 {
        match self {
            Edge::West => grid.x().face_distance(0),
            Edge::East => grid.x().face_distance(grid.nx()),
            Edge::South => grid.y().face_distance(0),
            Edge::North => grid.y().face_distance(grid.ny()),
        }
    }

    /// Arc-length coordinate of face `k` measured from the edge start.
    pub fn along(self, grid: &CartesianGrid, k: usize) -> f64 {
        match self {
            Edge::West | Edge::East => grid.y().centers()[k] - grid.y().lo(),
            Edge::South | Edge::North => grid.x().centers()[k] - grid.x().lo(),
        }
    }
}

/// Velocity condition on one domain edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum VelocityBc {
    Dirichlet {
        value: [f64; 2],
    },
    NoSlipWall,
    /// Streamwise profile `coefficient * sin(omega t) * s (height - s)` with
    /// `s` the distance along the edge.
    PulsedParabolic {
        coefficient: f64,
        height: f64,
        omega: f64,
    },
    /// Face values written by the caller into `FlowState::boundary` for the
    /// new time level before each step.
    Prescribed,
    AdvectiveOutflow,
    ZeroGradient,
    /// Zero-gradient velocity; must be paired with a fixed pressure.
    DoNothing,
}

impl VelocityBc {
    /// True when the face velocity is imposed rather than extrapolated.
    pub fn is_value(&self) -> bool {
        !matches!(self, VelocityBc::ZeroGradient | VelocityBc::DoNothing)
    }

    pub fn prescribed(&self, s: f64, t: f64) -> Option<[f64; 2]> {
        match *self {
            VelocityBc::Dirichlet { value } => Some(value),
            VelocityBc::NoSlipWall => Some([0.0, 0.0]),
            VelocityBc::PulsedParabolic { coefficient, height, omega } => {
                Some([coefficient * (omega * t).sin() * s * (height - s), 0.0])
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PressureBc {
    FixedValue { value: f64 },
    ZeroGradient,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeBc {
    pub velocity: VelocityBc,
    pub pressure: PressureBc,
}

impl EdgeBc {
    pub fn inflow(value: [f64; 2]) -> Self {
        EdgeBc { velocity: VelocityBc::Dirichlet { value }, pressure: PressureBc::ZeroGradient }
    }

    pub fn wall() -> Self {
        EdgeBc { velocity: VelocityBc::NoSlipWall, pressure: PressureBc::ZeroGradient }
    }

    pub fn advective_outflow() -> Self {
        EdgeBc { velocity: VelocityBc::AdvectiveOutflow, pressure: PressureBc::FixedValue { value: 0.0 } }
    }

    pub fn do_nothing() -> Self {
        EdgeBc { velocity: VelocityBc::DoNothing, pressure: PressureBc::FixedValue { value: 0.0 } }
    }

    pub fn fixes_pressure(&self) -> bool {
        matches!(self.pressure, PressureBc::FixedValue { .. })
    }
}

/// One velocity and one pressure condition per domain edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConditions {
    pub west: EdgeBc,
    pub east: EdgeBc,
    pub south: EdgeBc,
    pub north: EdgeBc,
}

impl BoundaryConditions {
    /// Free stream `(u_inf, 0)` entering from the west, advective outflow east.
    pub fn free_stream(u_inf: f64) -> Self {
        let fs = EdgeBc::inflow([u_inf, 0.0]);
        BoundaryConditions { west: fs, east: EdgeBc::advective_outflow(), south: fs, north: fs }
    }

    pub fn do_nothing() -> Self {
        let d = EdgeBc::do_nothing();
        BoundaryConditions { west: d, east: d, south: d, north: d }
    }

    /// The same imposed velocity on every edge.
    pub fn all_dirichlet(value: [f64; 2]) -> Self {
        let d = EdgeBc::inflow(value);
        BoundaryConditions { west: d, east: d, south: d, north: d }
    }

    /// Caller-supplied velocity on every edge with zero-gradient pressure.
    pub fn all_prescribed() -> Self {
        let d = EdgeBc { velocity: VelocityBc::Prescribed, pressure: PressureBc::ZeroGradient };
        BoundaryConditions { west: d, east: d, south: d, north: d }
    }

    pub fn edge(&self, e: Edge) -> &EdgeBc {
        match e {
            Edge::West => &self.west,
            Edge::East => &self.east,
            Edge::South => &self.south,
            Edge::North => &self.north,
        }
    }

    pub fn fixed_pressure_edges(&self) -> [bool; 4] {
        Edge::ALL.map(|e| self.edge(e).fixes_pressure())
    }

    pub fn pressure_is_pinned(&self) -> bool {
        self.fixed_pressure_edges().iter().any(|&b| b)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        for e in Edge::ALL {
            let bc = self.edge(e);
            match (bc.velocity, bc.pressure) {
                (VelocityBc::ZeroGradient | VelocityBc::DoNothing, PressureBc::ZeroGradient) => {
                    return Err(SolverError::Config(format!(
                        "{e:?} edge: extrapolated velocity needs a fixed pressure"
                    )));
                }
                (
                    VelocityBc::Dirichlet { .. }
                    | VelocityBc::NoSlipWall
                    | VelocityBc::PulsedParabolic { .. }
                    | VelocityBc::Prescribed,
                    PressureBc::FixedValue { .. },
                ) => {
                    return Err(SolverError::Config(format!(
                        "{e:?} edge: imposed velocity cannot be combined with a fixed pressure"
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Volumetric face fluxes (m^2/s per unit depth), positive along +x / +y.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceFlux {
    /// x-faces, index `i + (nx + 1) * j`.
    pub x: Vec<f64>,
    /// y-faces, index `i + nx * j`.
    pub y: Vec<f64>,
}

impl FaceFlux {
    pub fn zeros(grid: &CartesianGrid) -> Self {
        FaceFlux { x: vec![0.0; (grid.nx() + 1) * grid.ny()], y: vec![0.0; grid.nx() * (grid.ny() + 1)] }
    }

    /// Outward flux through boundary face `k` of edge `e`.
    pub fn boundary_outflow(&self, grid: &CartesianGrid, e: Edge, k: usize) -> f64 {
        let (nx, ny) = (grid.nx(), grid.ny());
        match e {
            Edge::West => -self.x[(nx + 1) * k],
            Edge::East => self.x[nx + (nx + 1) * k],
            Edge::South => -self.y[k],
            Edge::North => self.y[k + nx * ny],
        }
    }

    /// `2 self - other`, the linear extrapolation used by BDF2.
    pub fn extrapolate(&self, other: &FaceFlux) -> FaceFlux {
        FaceFlux {
            x: self.x.iter().zip(&other.x).map(|(a, b)| 2.0 * a - b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| 2.0 * a - b).collect(),
        }
    }
}

/// Face values on the four domain edges.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryValues {
    /// Velocity `[edge][component][face]`.
    pub velocity: [[Vec<f64>; 2]; 4],
    /// Pressure `[edge][face]`.
    pub pressure: [Vec<f64>; 4],
}

impl BoundaryValues {
    pub fn zeros(grid: &CartesianGrid) -> Self {
        let v = |e: Edge| [vec![0.0; e.len(grid)], vec![0.0; e.len(grid)]];
        let p = |e: Edge| vec![0.0; e.len(grid)];
        BoundaryValues { velocity: Edge::ALL.map(v), pressure: Edge::ALL.map(p) }
    }

    /// Dirichlet data sampled from analytic velocity and pressure at the face centres.
    pub fn from_fn(grid: &CartesianGrid, vel: impl Fn(f64, f64) -> [f64; 2], pres: impl Fn(f64, f64) -> f64) -> Self {
        let mut bv = Self::zeros(grid);
        for e in Edge::ALL {
            for k in 0..e.len(grid) {
                let [x, y] = e.face_center(grid, k);
                let v = vel(x, y);
                bv.velocity[e.index()][0][k] = v[0];
                bv.velocity[e.index()][1][k] = v[1];
                bv.pressure[e.index()][k] = pres(x, y);
            }
        }
        bv
    }

    /// Zero-gradient data: every face copies its adjacent cell.
    pub fn extrapolated(grid: &CartesianGrid, u: &Field, p: &Field) -> Self {
        let mut bv = Self::zeros(grid);
        for e in Edge::ALL {
            for k in 0..e.len(grid) {
                let c = e.cell(grid, k);
                for comp in 0..u.components().min(2) {
                    bv.velocity[e.index()][comp][k] = u.component(comp)[c];
                }
                bv.pressure[e.index()][k] = p.component(0)[c];
            }
        }
        bv
    }

    pub fn vel(&self, e: Edge, comp: usize) -> &[f64] {
        &self.velocity[e.index()][comp]
    }

    pub fn pres(&self, e: Edge) -> &[f64] {
        &self.pressure[e.index()]
    }

    /// Overwrites the velocity on every face of `e` from `vel(x, y)`.
    pub fn set_velocity(&mut self, grid: &CartesianGrid, e: Edge, vel: impl Fn(f64, f64) -> [f64; 2]) {
        for k in 0..e.len(grid) {
            let [x, y] = e.face_center(grid, k);
            let v = vel(x, y);
            self.velocity[e.index()][0][k] = v[0];
            self.velocity[e.index()][1][k] = v[1];
        }
    }
}

/// Velocity, pressure and the stored time levels of one flow snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub step: usize,
    pub u: Field,
    pub p: Field,
    /// Velocity one level back, available once a step has been taken.
    pub u_old: Option<Field>,
    pub flux: FaceFlux,
    pub flux_old: Option<FaceFlux>,
    pub boundary: BoundaryValues,
}

impl FlowState {
    /// Fluid at rest with boundary data evaluated at `t0`.
    pub fn at_rest(grid: &CartesianGrid, bc: &BoundaryConditions, t0: f64) -> Self {
        Self::from_velocity(grid, Field::vector(grid), bc, t0)
    }

    /// State with the given initial velocity; face fluxes are interpolated.
    pub fn from_velocity(grid: &CartesianGrid, u: Field, bc: &BoundaryConditions, t0: f64) -> Self {
        let p = Field::scalar(grid);
        let mut boundary = BoundaryValues::extrapolated(grid, &u, &p);
        for e in Edge::ALL {
            let ebc = bc.edge(e);
            for k in 0..e.len(grid) {
                if let Some(v) = ebc.velocity.prescribed(e.along(grid, k), t0) {
                    boundary.velocity[e.index()][0][k] = v[0];
                    boundary.velocity[e.index()][1][k] = v[1];
                }
                if let PressureBc::FixedValue { value } = ebc.pressure {
                    boundary.pressure[e.index()][k] = value;
                }
            }
        }
        let flux = interpolate_face_flux(grid, &u, &boundary);
        FlowState { t: t0, step: 0, u, p, u_old: None, flux, flux_old: None, boundary }
    }
}
