use super::operators::{gauss_gradient, net_outflow, upwind2_face_values};
use super::outflow::{apply_advective_outflow, balance_outflow, edge_outflow};
use super::poisson::PoissonSolver;
use super::{
    BoundaryConditions, BoundaryValues, Edge, FaceFlux, FlowState, FluidProperties, PressureBc, TimeScheme, VelocityBc,
};
use crate::error::SolverError;
use crate::field::Field;
use crate::mesh::CartesianGrid;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    /// Relative residual target of the momentum predictor.
    pub momentum_tol: f64,
    pub max_sweeps: usize,
    /// Relative residual target of each pressure solve.
    pub pressure_tol: f64,
    /// Number of pressure corrections per step.
    pub correctors: usize,
    /// Allowed face-flux imbalance per cell relative to `velocity_scale * h`.
    pub divergence_tol: f64,
    pub velocity_scale: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            momentum_tol: 1e-7,
            max_sweeps: 2000,
            pressure_tol: 1e-9,
            correctors: 2,
            divergence_tol: 1e-6,
            velocity_scale: 1.0,
        }
    }
}

/// Diagnostics of one time step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport {
    pub t: f64,
    pub momentum_sweeps: usize,
    pub momentum_residual: f64,
    /// Final relative residual of each pressure solve.
    pub pressure_residuals: Vec<f64>,
    pub divergence: f64,
    pub cfl: f64,
    pub max_velocity: f64,
}

/// Courant number `max (|u|/dx + |v|/dy) dt`.
pub fn compute_cfl(grid: &CartesianGrid, u: &Field, dt: f64) -> f64 {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (ux, uy) = (u.component(0), u.component(1));
    let mut cfl: f64 = 0.0;
    for j in 0..ny {
        let dy = grid.y().widths()[j];
        for i in 0..nx {
            let k = i + nx * j;
            cfl = cfl.max(ux[k].abs() / grid.x().widths()[i] + uy[k].abs() / dy);
        }
    }
    cfl * dt
}

/// Five-point momentum matrix shared by both velocity components.
#[derive(Clone, Debug, Default)]
struct Stencil {
    ap: Vec<f64>,
    aw: Vec<f64>,
    ae: Vec<f64>,
    a_s: Vec<f64>,
    an: Vec<f64>,
}

impl Stencil {
    fn zeros(n: usize) -> Self {
        Stencil { ap: vec![0.0; n], aw: vec![0.0; n], ae: vec![0.0; n], a_s: vec![0.0; n], an: vec![0.0; n] }
    }

    #[inline]
    fn neighbours(&self, x: &[f64], k: usize, nx: usize) -> f64 {
        let mut s = 0.0;
        if self.aw[k] != 0.0 {
            s += self.aw[k] * x[k - 1];
        }
        if self.ae[k] != 0.0 {
            s += self.ae[k] * x[k + 1];
        }
        if self.a_s[k] != 0.0 {
            s += self.a_s[k] * x[k - nx];
        }
        if self.an[k] != 0.0 {
            s += self.an[k] * x[k + nx];
        }
        s
    }

    fn residual_norm(&self, b: &[f64], x: &[f64], nx: usize) -> f64 {
        (0..x.len()).map(|k| (b[k] + self.neighbours(x, k, nx) - self.ap[k] * x[k]).powi(2)).sum::<f64>().sqrt()
    }

    /// Symmetric Gauss-Seidel until `|r| <= tol |b|`.
    fn solve(
        &self,
        b: &[f64],
        x: &mut [f64],
        nx: usize,
        tol: f64,
        max_sweeps: usize,
    ) -> Result<(usize, f64), SolverError> {
        let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_b == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok((0, 0.0));
        }
        let n = x.len();
        let mut rel = self.residual_norm(b, x, nx) / norm_b;
        let mut sweeps = 0;
        while rel > tol {
            if sweeps >= max_sweeps || !rel.is_finite() {
                return Err(SolverError::MomentumNotConverged { tol, sweeps, residual: rel });
            }
            for k in 0..n {
                x[k] = (b[k] + self.neighbours(x, k, nx)) / self.ap[k];
            }
            for k in (0..n).rev() {
                x[k] = (b[k] + self.neighbours(x, k, nx)) / self.ap[k];
            }
            sweeps += 1;
            rel = self.residual_norm(b, x, nx) / norm_b;
        }
        Ok((sweeps, rel))
    }
}

/// Time integrator for one grid, fluid and set of boundary conditions.
#[derive(Clone, Debug)]
pub struct FlowSolver {
    grid: CartesianGrid,
    props: FluidProperties,
    scheme: TimeScheme,
    bc: BoundaryConditions,
    settings: SolverSettings,
    poisson: PoissonSolver,
    volumes: Vec<f64>,
}

impl FlowSolver {
    pub fn new(
        grid: CartesianGrid,
        props: FluidProperties,
        scheme: TimeScheme,
        bc: BoundaryConditions,
        settings: SolverSettings,
    ) -> Result<Self, SolverError> {
        props.validate()?;
        bc.validate()?;
        if !(scheme.dt > 0.0) || !scheme.dt.is_finite() {
            return Err(SolverError::Config(format!("time step must be positive, got {}", scheme.dt)));
        }
        if settings.correctors == 0 {
            return Err(SolverError::Config("at least one pressure correction is required".into()));
        }
        let poisson = PoissonSolver::from_conditions(&grid, &bc);
        let volumes = grid.volumes();
        Ok(FlowSolver { grid, props, scheme, bc, settings, poisson, volumes })
    }

    pub fn grid(&self) -> &CartesianGrid {
        &self.grid
    }

    pub fn props(&self) -> &FluidProperties {
        &self.props
    }

    pub fn scheme(&self) -> &TimeScheme {
        &self.scheme
    }

    pub fn boundary_conditions(&self) -> &BoundaryConditions {
        &self.bc
    }

    pub fn settings(&self) -> &SolverSettings {
        &self.settings
    }

    pub fn rest_state(&self) -> FlowState {
        FlowState::at_rest(&self.grid, &self.bc, 0.0)
    }

    /// Boundary velocities at `t_new`: imposed values, then advective outlets.
    fn advance_boundary(&self, state: &FlowState, t_new: f64) -> BoundaryValues {
        let g = &self.grid;
        let mut bv = state.boundary.clone();
        for e in Edge::ALL {
            let vbc = self.bc.edge(e).velocity;
            for k in 0..e.len(g) {
                if let Some(v) = vbc.prescribed(e.along(g, k), t_new) {
                    bv.velocity[e.index()][0][k] = v[0];
                    bv.velocity[e.index()][1][k] = v[1];
                }
            }
        }
        let outlets: Vec<Edge> =
            Edge::ALL.into_iter().filter(|&e| self.bc.edge(e).velocity == VelocityBc::AdvectiveOutflow).collect();
        if outlets.is_empty() {
            return bv;
        }
        let inflow: f64 = Edge::ALL
            .into_iter()
            .filter(|e| !outlets.contains(e))
            .filter(|&e| self.bc.edge(e).velocity.is_value())
            .map(|e| -edge_outflow(g, e, bv.vel(e, e.normal_component())))
            .sum();
        let area: f64 = outlets.iter().map(|&e| (0..e.len(g)).map(|k| e.face_area(g, k)).sum::<f64>()).sum();
        let speed = inflow.max(0.0) / area;
        for &e in &outlets {
            bv.velocity[e.index()] = apply_advective_outflow(g, e, &state.u, &state.boundary, speed, self.scheme.dt);
        }
        let other_fixed_pressure =
            Edge::ALL.into_iter().any(|e| !outlets.contains(&e) && self.bc.edge(e).fixes_pressure());
        if !other_fixed_pressure {
            balance_outflow(g, &mut bv, &outlets, inflow);
        }
        bv
    }

    /// Pressure on the edges: fixed values or the adjacent cell.
    fn pressure_edges(&self, p: &[f64], homogeneous: bool) -> [Vec<f64>; 4] {
        let g = &self.grid;
        Edge::ALL.map(|e| {
            (0..e.len(g))
                .map(|k| match self.bc.edge(e).pressure {
                    PressureBc::FixedValue { value } => {
                        if homogeneous {
                            0.0
                        } else {
                            value
                        }
                    }
                    PressureBc::ZeroGradient => p[e.cell(g, k)],
                })
                .collect()
        })
    }

    fn gradient(&self, p: &[f64], edges: &[Vec<f64>; 4]) -> [Vec<f64>; 2] {
        let n = self.grid.n_cells();
        let (mut gx, mut gy) = (vec![0.0; n], vec![0.0; n]);
        let e = [&edges[0][..], &edges[1][..], &edges[2][..], &edges[3][..]];
        gauss_gradient(&self.grid, p, e, &mut gx, &mut gy);
        [gx, gy]
    }

    /// Advances `state` by one step. `source` is a body acceleration.
    pub fn step(&self, state: &mut FlowState, source: Option<&Field>) -> Result<StepReport, SolverError> {
        let g = &self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        let n = g.n_cells();
        let (xa, ya) = (g.x(), g.y());
        let dt = self.scheme.dt;
        let rho = self.props.rho;
        let mu = self.props.mu;
        let have_old = state.u_old.is_some() && state.flux_old.is_some();
        let (c0, c1, c2) = self.scheme.coefficients(have_old);
        let t_new = state.t + dt;

        let bv = self.advance_boundary(state, t_new);

        let (conv, u_ext) = match (c2 != 0.0, &state.u_old, &state.flux_old) {
            (true, Some(u_old), Some(f_old)) => {
                let mut ue = state.u.clone();
                ue.scale(2.0);
                ue.axpy(-1.0, u_old);
                (state.flux.extrapolate(f_old), ue)
            }
            _ => (state.flux.clone(), state.u.clone()),
        };

        // Momentum matrix and the pressure-free right-hand side.
        let mut st = Stencil::zeros(n);
        let mut rhs_nop = [vec![0.0; n], vec![0.0; n]];
        for j in 0..ny {
            for i in 0..nx {
                let k = i + nx * j;
                let vol = self.volumes[k];
                st.ap[k] = rho * vol * c0 / dt;
                for c in 0..2 {
                    let mut b = state.u.component(c)[k] * c1;
                    if c2 != 0.0 {
                        b -= c2 * state.u_old.as_ref().map_or(0.0, |u| u.component(c)[k]);
                    }
                    let mut v = rho * vol * b / dt;
                    if let Some(f) = source {
                        v += rho * vol * f.component(c)[k];
                    }
                    rhs_nop[c][k] = v;
                }
            }
        }
        // interior x-faces
        for j in 0..ny {
            let dy = ya.widths()[j];
            for f in 1..nx {
                let (l, r) = (f - 1 + nx * j, f + nx * j);
                let dc = mu * dy / xa.face_distance(f);
                let fl = rho * conv.x[f + (nx + 1) * j];
                st.ae[l] = dc + (-fl).max(0.0);
                st.ap[l] += dc + fl.max(0.0);
                st.aw[r] = dc + fl.max(0.0);
                st.ap[r] += dc + (-fl).max(0.0);
            }
        }
        // interior y-faces
        for f in 1..ny {
            let dist = ya.face_distance(f);
            for i in 0..nx {
                let (l, r) = (i + nx * (f - 1), i + nx * f);
                let dc = mu * xa.widths()[i] / dist;
                let fl = rho * conv.y[i + nx * f];
                st.an[l] = dc + (-fl).max(0.0);
                st.ap[l] += dc + fl.max(0.0);
                st.a_s[r] = dc + fl.max(0.0);
                st.ap[r] += dc + (-fl).max(0.0);
            }
        }
        // boundary faces
        for e in Edge::ALL {
            let value_type = self.bc.edge(e).velocity.is_value();
            let nc = e.normal_component();
            let sign = e.normal()[nc];
            for k in 0..e.len(g) {
                let cell = e.cell(g, k);
                let area = e.face_area(g, k);
                if value_type {
                    let out = rho * sign * bv.vel(e, nc)[k] * area;
                    let dc = mu * area / e.face_distance(g, k);
                    st.ap[cell] += dc;
                    for c in 0..2 {
                        let ub = bv.vel(e, c)[k];
                        rhs_nop[c][cell] += (dc - out) * ub;
                    }
                } else {
                    let out = rho * conv.boundary_outflow(g, e, k);
                    if out > 0.0 {
                        st.ap[cell] += out;
                    } else {
                        for c in 0..2 {
                            rhs_nop[c][cell] -= out * state.u.component(c)[cell];
                        }
                    }
                }
            }
        }
        // deferred second-order upwind correction on the extrapolated velocity
        for c in 0..2 {
            let ue = u_ext.component(c);
            let edges = Edge::ALL.map(|e| bv.vel(e, c));
            let (fx, fy) = upwind2_face_values(g, ue, edges, &conv);
            let b = &mut rhs_nop[c];
            for j in 0..ny {
                for f in 1..nx {
                    let (l, r) = (f - 1 + nx * j, f + nx * j);
                    let face = f + (nx + 1) * j;
                    let fl = rho * conv.x[face];
                    let ud = if fl >= 0.0 { ue[l] } else { ue[r] };
                    let corr = fl * (fx[face] - ud);
                    b[l] -= corr;
                    b[r] += corr;
                }
            }
            for f in 1..ny {
                for i in 0..nx {
                    let (l, r) = (i + nx * (f - 1), i + nx * f);
                    let face = i + nx * f;
                    let fl = rho * conv.y[face];
                    let ud = if fl >= 0.0 { ue[l] } else { ue[r] };
                    let corr = fl * (fy[face] - ud);
                    b[l] -= corr;
                    b[r] += corr;
                }
            }
        }

        // Predictor with the old pressure gradient.
        let mut p = state.p.component(0).to_vec();
        let mut p_edges = self.pressure_edges(&p, false);
        let mut grad = self.gradient(&p, &p_edges);
        let mut u = [state.u.component(0).to_vec(), state.u.component(1).to_vec()];
        let mut sweeps = 0;
        let mut mom_res: f64 = 0.0;
        for c in 0..2 {
            let b: Vec<f64> = (0..n).map(|k| rhs_nop[c][k] - self.volumes[k] * grad[c][k]).collect();
            let (s, r) = st.solve(&b, &mut u[c], nx, self.settings.momentum_tol, self.settings.max_sweeps)?;
            sweeps = sweeps.max(s);
            mom_res = mom_res.max(r);
        }

        // Pressure corrections.
        let d = dt / (rho * c0);
        let mut flux = FaceFlux::zeros(g);
        let mut pressure_residuals = Vec::with_capacity(self.settings.correctors);
        let fixed = self.bc.fixed_pressure_edges();
        for corrector in 0..self.settings.correctors {
            if corrector > 0 {
                let mut next = [vec![0.0; n], vec![0.0; n]];
                for c in 0..2 {
                    for k in 0..n {
                        let b = rhs_nop[c][k] - self.volumes[k] * grad[c][k];
                        next[c][k] = (b + st.neighbours(&u[c], k, nx)) / st.ap[k];
                    }
                }
                u = next;
            }
            self.momentum_interpolated_flux(&u, &p, &p_edges, &grad, &bv, d, &mut flux);
            let b: Vec<f64> = net_outflow(g, &flux).into_iter().map(|v| v / d).collect();
            let (pc, hist) = self.poisson.solve(&b, self.settings.pressure_tol)?;
            pressure_residuals.push(*hist.last().unwrap_or(&0.0));

            // flux correction
            for j in 0..ny {
                let dy = ya.widths()[j];
                for f in 1..nx {
                    let (l, r) = (f - 1 + nx * j, f + nx * j);
                    flux.x[f + (nx + 1) * j] -= d * (pc[r] - pc[l]) / xa.face_distance(f) * dy;
                }
            }
            for f in 1..ny {
                let dist = ya.face_distance(f);
                for i in 0..nx {
                    let (l, r) = (i + nx * (f - 1), i + nx * f);
                    flux.y[i + nx * f] -= d * (pc[r] - pc[l]) / dist * xa.widths()[i];
                }
            }
            for e in Edge::ALL {
                if !fixed[e.index()] {
                    continue;
                }
                for k in 0..e.len(g) {
                    let cell = e.cell(g, k);
                    // outward gradient (0 - p'_P) / d_b
                    let dout = d * (0.0 - pc[cell]) / e.face_distance(g, k) * e.face_area(g, k);
                    match e {
                        Edge::West => flux.x[(nx + 1) * k] += dout,
                        Edge::East => flux.x[nx + (nx + 1) * k] -= dout,
                        Edge::South => flux.y[k] += dout,
                        Edge::North => flux.y[k + nx * ny] -= dout,
                    }
                }
            }
            let pc_edges = self.pressure_edges(&pc, true);
            let gpc = self.gradient(&pc, &pc_edges);
            for c in 0..2 {
                u[c].iter_mut().zip(&gpc[c]).for_each(|(v, gp)| *v -= d * gp);
            }
            p.iter_mut().zip(&pc).for_each(|(a, b)| *a += b);
            p_edges = self.pressure_edges(&p, false);
            grad = self.gradient(&p, &p_edges);
        }

        // Commit the new level.
        let u_new = Field::from_components(g, &[&u[0], &u[1]]);
        let p_new = Field::from_components(g, &[&p]);
        let mut boundary = bv;
        for e in Edge::ALL {
            let ebc = self.bc.edge(e);
            let nc = e.normal_component();
            let sign = e.normal()[nc];
            for k in 0..e.len(g) {
                let cell = e.cell(g, k);
                boundary.pressure[e.index()][k] = p_edges[e.index()][k];
                if !ebc.velocity.is_value() {
                    for c in 0..2 {
                        boundary.velocity[e.index()][c][k] = u[c][cell];
                    }
                }
                if ebc.fixes_pressure() {
                    boundary.velocity[e.index()][nc][k] = sign * flux.boundary_outflow(g, e, k) / e.face_area(g, k);
                }
            }
        }

        let max_velocity = u_new.max_magnitude();
        let cfl = compute_cfl(g, &u_new, dt);
        if !u_new.is_finite() || !p_new.is_finite() {
            return Err(SolverError::NonFinite { t: t_new, max_velocity, cfl });
        }
        let divergence = self.relative_divergence(&flux);
        if divergence > self.settings.divergence_tol {
            return Err(SolverError::Divergence { divergence, tol: self.settings.divergence_tol });
        }

        let u_prev = std::mem::replace(&mut state.u, u_new);
        state.u_old = Some(u_prev);
        let f_prev = std::mem::replace(&mut state.flux, flux);
        state.flux_old = Some(f_prev);
        state.p = p_new;
        state.boundary = boundary;
        state.t = t_new;
        state.step += 1;

        Ok(StepReport {
            t: t_new,
            momentum_sweeps: sweeps,
            momentum_residual: mom_res,
            pressure_residuals,
            divergence,
            cfl,
            max_velocity,
        })
    }

    /// Largest cell flux imbalance relative to `velocity_scale * min(dx, dy)`.
    pub fn relative_divergence(&self, flux: &FaceFlux) -> f64 {
        let g = &self.grid;
        let nx = g.nx();
        net_outflow(g, flux)
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                let h = g.x().widths()[k % nx].min(g.y().widths()[k / nx]);
                v.abs() / (self.settings.velocity_scale * h)
            })
            .fold(0.0, f64::max)
    }

    /// Face fluxes from cell velocities with the pressure-gradient
    /// interpolation that couples odd and even cells.
    #[allow(clippy::too_many_arguments)]
    fn momentum_interpolated_flux(
        &self,
        u: &[Vec<f64>; 2],
        p: &[f64],
        p_edges: &[Vec<f64>; 4],
        grad: &[Vec<f64>; 2],
        bv: &BoundaryValues,
        d: f64,
        flux: &mut FaceFlux,
    ) {
        let g = &self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        let (xa, ya) = (g.x(), g.y());
        let (ux, uy) = (&u[0], &u[1]);
        let (gx, gy) = (&grad[0], &grad[1]);
        for j in 0..ny {
            let dy = ya.widths()[j];
            for f in 1..nx {
                let (l, r) = (f - 1 + nx * j, f + nx * j);
                let w = xa.face_weight(f);
                let interp = (1.0 - w) * (ux[l] + d * gx[l]) + w * (ux[r] + d * gx[r]);
                flux.x[f + (nx + 1) * j] = (interp - d * (p[r] - p[l]) / xa.face_distance(f)) * dy;
            }
        }
        for f in 1..ny {
            let w = ya.face_weight(f);
            let dist = ya.face_distance(f);
            for i in 0..nx {
                let (l, r) = (i + nx * (f - 1), i + nx * f);
                let interp = (1.0 - w) * (uy[l] + d * gy[l]) + w * (uy[r] + d * gy[r]);
                flux.y[i + nx * f] = (interp - d * (p[r] - p[l]) / dist) * xa.widths()[i];
            }
        }
        for e in Edge::ALL {
            let ebc = self.bc.edge(e);
            let nc = e.normal_component();
            let sign = e.normal()[nc];
            for k in 0..e.len(g) {
                let cell = e.cell(g, k);
                let area = e.face_area(g, k);
                let normal_velocity = if ebc.fixes_pressure() {
                    let ub = if ebc.velocity.is_value() { bv.vel(e, nc)[k] } else { u[nc][cell] };
                    // outward derivative of p at the face
                    let dpdn = (p_edges[e.index()][k] - p[cell]) / e.face_distance(g, k);
                    ub + d * grad[nc][cell] - d * sign * dpdn
                } else {
                    bv.vel(e, nc)[k]
                };
                let phi = normal_velocity * area;
                match e {
                    Edge::West => flux.x[(nx + 1) * k] = phi,
                    Edge::East => flux.x[nx + (nx + 1) * k] = phi,
                    Edge::South => flux.y[k] = phi,
                    Edge::North => flux.y[k + nx * ny] = phi,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;
    use crate::ns::EdgeBc;

    fn channel(n: usize) -> (CartesianGrid, BoundaryConditions) {
        let g = CartesianGrid::uniform(Rect::new(0.0, 2.0, 0.0, 1.0), 1.0 / n as f64).unwrap();
        let bc = BoundaryConditions {
            west: EdgeBc::inflow([1.0, 0.0]),
            east: EdgeBc::advective_outflow(),
            south: EdgeBc::wall(),
            north: EdgeBc::wall(),
        };
        (g, bc)
    }

    #[test]
    fn rest_state_is_a_fixed_point() {
        let g = CartesianGrid::uniform(Rect::square(0.0, 1.0), 0.1).unwrap();
        for bc in [BoundaryConditions::all_dirichlet([0.0, 0.0]), BoundaryConditions::do_nothing()] {
            let s = FlowSolver::new(
                g.clone(),
                FluidProperties::new(1.0, 0.01).unwrap(),
                TimeScheme::bdf2(0.01),
                bc,
                SolverSettings::default(),
            )
            .unwrap();
            let mut state = s.rest_state();
            for _ in 0..3 {
                s.step(&mut state, None).unwrap();
            }
            assert_eq!(state.u.max_magnitude(), 0.0);
            assert_eq!(state.p.max_magnitude(), 0.0);
        }
    }

    #[test]
    fn channel_flow_conserves_mass() {
        let (g, bc) = channel(16);
        let s = FlowSolver::new(
            g.clone(),
            FluidProperties::new(1.0, 0.05).unwrap(),
            TimeScheme::bdf2(0.02),
            bc,
            SolverSettings::default(),
        )
        .unwrap();
        let mut state = s.rest_state();
        for _ in 0..50 {
            let rep = s.step(&mut state, None).unwrap();
            assert!(rep.divergence < 1e-8);
        }
        let out: f64 = (0..g.ny()).map(|k| state.flux.boundary_outflow(&g, Edge::East, k)).sum();
        assert!((out - 1.0).abs() < 1e-9, "outflow {out}");
    }

    #[test]
    fn rejects_inconsistent_conditions() {
        let g = CartesianGrid::uniform(Rect::square(0.0, 1.0), 0.25).unwrap();
        let mut bc = BoundaryConditions::do_nothing();
        bc.west.pressure = PressureBc::ZeroGradient;
        let r = FlowSolver::new(
            g,
            FluidProperties::new(1.0, 0.1).unwrap(),
            TimeScheme::bdf1(0.1),
            bc,
            SolverSettings::default(),
        );
        assert!(matches!(r, Err(SolverError::Config(_))));
    }
}
