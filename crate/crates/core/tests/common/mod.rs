//! Analytic oracles shared by the integration test targets.
#![allow(dead_code)]

use std::f64::consts::PI;

use vbm_core::field::Field;
use vbm_core::mesh::{CartesianGrid, Rect};
use vbm_core::ns::{
    BoundaryConditions, BoundaryValues, Edge, FlowSolver, FlowState, FluidProperties, PoissonSolver, SolverSettings,
    TimeScheme,
};

/// Decaying Taylor-Green vortex on [0, 2 pi]^2: velocity and pressure.
pub fn taylor_green(nu: f64, t: f64) -> (impl Fn(f64, f64) -> [f64; 2], impl Fn(f64, f64) -> f64) {
    let a = (-2.0 * nu * t).exp();
    let vel = move |x: f64, y: f64| [-x.cos() * y.sin() * a, x.sin() * y.cos() * a];
    let pres = move |x: f64, y: f64| -0.25 * ((2.0 * x).cos() + (2.0 * y).cos()) * a * a;
    (vel, pres)
}

pub fn kinetic_energy(grid: &CartesianGrid, u: &Field) -> f64 {
    let vol = grid.volumes();
    let (ux, uy) = (u.component(0), u.component(1));
    (0..grid.n_cells()).map(|k| 0.5 * (ux[k] * ux[k] + uy[k] * uy[k]) * vol[k]).sum()
}

fn set_edges(grid: &CartesianGrid, state: &mut FlowState, nu: f64, t: f64) {
    let (vel, _) = taylor_green(nu, t);
    for e in Edge::ALL {
        state.boundary.set_velocity(grid, e, &vel);
    }
}

/// Runs the vortex with analytic edge velocities; returns the final state.
pub fn run_taylor_green(
    n: usize,
    nu: f64,
    dt: f64,
    steps: usize,
    scheme: fn(f64) -> TimeScheme,
) -> (CartesianGrid, FlowState) {
    let grid = CartesianGrid::uniform(Rect::square(0.0, 2.0 * PI), 2.0 * PI / n as f64).unwrap();
    let bc = BoundaryConditions::all_prescribed();
    let settings = SolverSettings { momentum_tol: 1e-10, pressure_tol: 1e-11, ..SolverSettings::default() };
    let solver =
        FlowSolver::new(grid.clone(), FluidProperties::new(1.0, nu).unwrap(), scheme(dt), bc, settings).unwrap();
    let (vel0, p0) = taylor_green(nu, 0.0);
    let mut state = FlowState::from_velocity(&grid, Field::vector_from_fn(&grid, &vel0), &bc, 0.0);
    state.p = Field::scalar_from_fn(&grid, &p0);
    state.boundary = BoundaryValues::from_fn(&grid, &vel0, &p0);
    state.flux = vbm_core::ns::interpolate_face_flux(&grid, &state.u, &state.boundary);
    for _ in 0..steps {
        let t_new = state.t + dt;
        set_edges(&grid, &mut state, nu, t_new);
        solver.step(&mut state, None).unwrap();
    }
    (grid, state)
}

/// Relative error of the kinetic-energy decay rate against `4 nu`.
pub fn taylor_green_rate_error(n: usize, nu: f64, dt: f64, t_end: f64) -> f64 {
    let steps = (t_end / dt).round() as usize;
    let (grid, state) = run_taylor_green(n, nu, dt, steps, TimeScheme::bdf2);
    let (vel0, _) = taylor_green(nu, 0.0);
    let e0 = kinetic_energy(&grid, &Field::vector_from_fn(&grid, vel0));
    let e1 = kinetic_energy(&grid, &state.u);
    let rate = -(e1 / e0).ln() / state.t;
    (rate - 4.0 * nu).abs() / (4.0 * nu)
}

/// Observed order of the Neumann Poisson solve for `cos(pi x) cos(pi y)`.
pub fn poisson_order(levels: &[usize]) -> Vec<f64> {
    let errs: Vec<f64> = levels
        .iter()
        .map(|&n| {
            let grid = CartesianGrid::uniform(Rect::square(0.0, 1.0), 1.0 / n as f64).unwrap();
            let exact = |x: f64, y: f64| (PI * x).cos() * (PI * y).cos();
            let vol = grid.volumes();
            let rhs: Vec<f64> = Field::scalar_from_fn(&grid, |x, y| -2.0 * PI * PI * exact(x, y))
                .component(0)
                .iter()
                .zip(&vol)
                .map(|(r, v)| r * v)
                .collect();
            let solver = PoissonSolver::new(&grid, [false; 4]);
            let (p, _) = solver.solve(&rhs, 1e-12).unwrap();
            let reference = Field::scalar_from_fn(&grid, exact);
            let total: f64 = vol.iter().sum();
            let mean: f64 = reference.component(0).iter().zip(&vol).map(|(a, w)| a * w).sum::<f64>() / total;
            let l2: f64 = p
                .iter()
                .zip(reference.component(0))
                .zip(&vol)
                .map(|((a, b), w)| (a - (b - mean)).powi(2) * w)
                .sum::<f64>();
            (l2 / total).sqrt()
        })
        .collect();
    errs.windows(2).zip(levels.windows(2)).map(|(e, n)| (e[0] / e[1]).ln() / (n[1] as f64 / n[0] as f64).ln()).collect()
}

/// Fluid at rest in a closed unit box driven by a smooth body force
/// `4 sin(3t) g(x, y)`, sampled at the new time level.
pub fn forced_box(n: usize, nu: f64, dt: f64, t_end: f64, scheme: fn(f64) -> TimeScheme) -> Field {
    let steps = (t_end / dt).round() as usize;
    let grid = CartesianGrid::uniform(Rect::square(0.0, 1.0), 1.0 / n as f64).unwrap();
    let bc = BoundaryConditions::all_dirichlet([0.0, 0.0]);
    let settings = SolverSettings { momentum_tol: 1e-11, pressure_tol: 1e-12, ..SolverSettings::default() };
    let solver =
        FlowSolver::new(grid.clone(), FluidProperties::new(1.0, nu).unwrap(), scheme(dt), bc, settings).unwrap();
    let mut state = solver.rest_state();
    let shape = Field::vector_from_fn(&grid, |x, y| {
        [(2.0 * PI * y).sin() * (PI * x).sin().powi(2) + x, -(2.0 * PI * x).sin() * (PI * y).sin().powi(2)]
    });
    for _ in 0..steps {
        let mut f = shape.clone();
        f.scale(4.0 * (3.0 * (state.t + dt)).sin());
        solver.step(&mut state, Some(&f)).unwrap();
    }
    state.u
}

/// Richardson ratio `|u(dt) - u(dt/2)| / |u(dt/2) - u(dt/4)|` for BDF2.
pub fn bdf2_richardson_ratio(n: usize, nu: f64, dt: f64, t_end: f64) -> f64 {
    let u: Vec<Field> = (0..3).map(|k| forced_box(n, nu, dt / f64::from(1u32 << k), t_end, TimeScheme::bdf2)).collect();
    let diff =
        |a: &Field, b: &Field| a.values().iter().zip(b.values()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    diff(&u[0], &u[1]) / diff(&u[1], &u[2])
}

/// Largest root modulus of an ascending-coefficient polynomial, from the
/// eigenvalues of its companion matrix.
pub fn max_root_modulus(coeffs: &[f64]) -> f64 {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        m[(k, k - 1)] = 1.0;
    }
    for k in 0..n {
        m[(k, n - 1)] = -coeffs[k] / lead;
    }
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}
