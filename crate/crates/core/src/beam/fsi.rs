use serde::{Deserialize, Serialize};

use super::{tip_excitation, BeamProperties, BeamScheme, BeamSolver, BeamState};
use crate::error::{Error, Result};
use crate::ibm::{ForcingGains, LagrangianBoundary, Motion, VirtualBoundary};
use crate::mesh::{ratio_for_cell_count, CartesianGrid, Rect};
use crate::ns::{BoundaryConditions, FlowSolver, FlowState, FluidProperties, SolverSettings, TimeScheme};

/// Cantilever immersed in a closed fluid box, excited at its tip.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FsiConfig {
    pub beam: BeamProperties,
    pub beam_cells: usize,
    pub fluid: FluidProperties,
    pub gains: ForcingGains,
    pub dt: f64,
    pub t_end: f64,
    /// Clamped end of the beam; the beam extends in +x.
    pub root: [f64; 2],
    pub domain: Rect,
    /// Uniform fluid cells along the beam length.
    pub cells_along_beam: usize,
    /// Upper bound on the fluid cell count, met by stretching away from the beam.
    pub target_cells: usize,
    /// Peak tip force of the excitation pulse in N.
    pub excitation_amplitude: f64,
}

impl FsiConfig {
    fn base(fluid: FluidProperties, gamma: f64) -> Self {
        FsiConfig {
            beam: BeamProperties::aluminium_plate(),
            beam_cells: 10,
            fluid,
            gains: ForcingGains { alpha: -2e3, beta: -7e2, gamma },
            dt: 2e-5,
            t_end: 0.2,
            root: [0.425, 0.5],
            domain: Rect::square(0.0, 1.0),
            cells_along_beam: 20,
            target_cells: 10_000,
            excitation_amplitude: 1.0,
        }
    }

    pub fn water(gamma: f64) -> Self {
        Self::base(FluidProperties { rho: 1000.0, mu: 1e-3 }, gamma)
    }

    pub fn air(gamma: f64) -> Self {
        Self::base(FluidProperties { rho: 1.204, mu: 1.8e-5 }, gamma)
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn grid(&self) -> Result<CartesianGrid> {
        let h = self.beam.length / self.cells_along_beam as f64;
        let pad = 4.0 * h;
        let refined = Rect::new(
            self.root[0] - pad,
            self.root[0] + self.beam.length + pad,
            self.root[1] - pad,
            self.root[1] + pad,
        );
        let ratio = ratio_for_cell_count(self.domain, refined, h, self.target_cells)?;
        Ok(CartesianGrid::stretched(self.domain, refined, h, ratio)?)
    }
}

/// Per-step beam output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FsiRecord {
    pub t: f64,
    pub tip_displacement: f64,
    pub mean_displacement: f64,
}

/// Partitioned coupling: forcing from the current flow and beam, then the
/// flow step, then the beam step under the reaction load.
pub struct FsiDriver {
    config: FsiConfig,
    flow: FlowSolver,
    state: FlowState,
    body: VirtualBoundary,
    beam: BeamSolver,
    beam_state: BeamState,
    marker_axial: Vec<f64>,
    node_axial: Vec<f64>,
}

impl FsiDriver {
    pub fn new(config: FsiConfig) -> Result<Self> {
        let grid = config.grid()?;
        let flow = FlowSolver::new(
            grid.clone(),
            config.fluid,
            TimeScheme::bdf2(config.dt),
            BoundaryConditions::all_dirichlet([0.0, 0.0]),
            SolverSettings::default(),
        )?;
        let state = flow.rest_state();
        let beam = BeamSolver::new(config.beam, config.beam_cells, config.dt, BeamScheme::AverageAcceleration)?;
        let n_markers = config.cells_along_beam + 1;
        let [x0, y0] = config.root;
        let end = [x0 + config.beam.length, y0];
        let boundary = LagrangianBoundary::segment(config.root, end, n_markers, Motion::Deforming)?;
        let marker_axial = boundary.reference().iter().map(|r| r[0] - x0).collect();
        let body = VirtualBoundary::new(boundary, config.gains, &grid)?;
        Ok(FsiDriver {
            node_axial: beam.nodes(),
            beam_state: BeamState::at_rest(config.beam_cells),
            config,
            flow,
            state,
            body,
            beam,
            marker_axial,
        })
    }

    pub fn config(&self) -> &FsiConfig {
        &self.config
    }

    pub fn flow_state(&self) -> &FlowState {
        &self.state
    }

    pub fn beam_state(&self) -> &BeamState {
        &self.beam_state
    }

    pub fn grid(&self) -> &CartesianGrid {
        self.flow.grid()
    }

    /// One synchronized step of fluid and structure.
    pub fn step(&mut self) -> Result<FsiRecord> {
        let dt = self.config.dt;
        let t = self.state.t;
        let forcing =
            self.body.forcing(self.flow.grid(), &self.state.u, t, dt).map_err(|e| Error::at_stage("forcing", e))?;
        self.flow.step(&mut self.state, Some(&forcing.field)).map_err(|e| Error::at_stage("fluid", e))?;

        let marker_fy: Vec<f64> = forcing.forces.iter().map(|f| f[1]).collect();
        let scale = -self.config.beam.area() * self.config.fluid.rho;
        let q: Vec<f64> =
            self.node_axial.iter().map(|&s| scale * interpolate(&self.marker_axial, &marker_fy, s)).collect();
        let tip = tip_excitation(t, dt, self.config.excitation_amplitude);
        self.beam_state = self.beam.step(&self.beam_state, &q, tip).map_err(|e| Error::at_stage("structure", e))?;

        let [x0, y0] = self.config.root;
        let w = &self.beam_state.displacement;
        let positions = self.marker_axial.iter().map(|&s| [x0 + s, y0 + interpolate(&self.node_axial, w, s)]).collect();
        self.body.boundary_mut().set_positions(positions).map_err(|e| Error::at_stage("markers", e))?;

        Ok(FsiRecord {
            t: self.beam_state.t,
            tip_displacement: self.beam_state.tip(),
            mean_displacement: self.beam_state.mean_displacement(),
        })
    }

    /// Runs to the configured end time, calling `observe` after every step.
    pub fn run(&mut self, mut observe: impl FnMut(&FsiRecord)) -> Result<Vec<FsiRecord>> {
        let steps = self.config.steps();
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            let r = self.step()?;
            observe(&r);
            out.push(r);
        }
        Ok(out)
    }
}

/// Piecewise-linear interpolation on ascending abscissae, clamped at the ends.
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let k = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[k - 1], xs[k]);
    let s = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
    ys[k - 1] + s * (ys[k] - ys[k - 1])
}
