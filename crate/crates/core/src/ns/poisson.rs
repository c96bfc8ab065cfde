//! Direct pressure Poisson solver by fast diagonalization.
//!
//! The two-point Laplacian on a tensor-product grid separates into
//! `dy_j T_x + dx_i T_y`. One axis is diagonalized through a generalized
//! symmetric eigenproblem; each eigenmode is then a tridiagonal system
//! along the other axis. Iterative refinement guards the round-off.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{BoundaryConditions, Edge, PressureBc};
use crate::error::SolverError;
use crate::field::Field;
use crate::mesh::{Axis, CartesianGrid};

const MAX_REFINEMENTS: usize = 5;

/// Symmetric tridiagonal 1D operator `(phi_{i+1} - phi_i) / d` summed over faces.
#[derive(Clone, Debug)]
struct Tridiag {
    diag: Vec<f64>,
    /// Coupling between `i` and `i + 1`.
    off: Vec<f64>,
}

impl Tridiag {
    fn new(axis: &Axis, fixed_lo: bool, fixed_hi: bool) -> Self {
        let n = axis.len();
        let off: Vec<f64> = (1..n).map(|f| 1.0 / axis.face_distance(f)).collect();
        let mut diag = vec![0.0; n];
        for i in 0..n {
            if i > 0 {
                diag[i] -= off[i - 1];
            }
            if i + 1 < n {
                diag[i] -= off[i];
            }
        }
        if fixed_lo {
            diag[0] -= 1.0 / axis.face_distance(0);
        }
        if fixed_hi {
            diag[n - 1] -= 1.0 / axis.face_distance(n);
        }
        Tridiag { diag, off }
    }

    fn dense(&self) -> DMatrix<f64> {
        let n = self.diag.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }
}

/// Factorized Laplacian for one grid and one set of boundary types.
#[derive(Clone, Debug)]
pub struct PoissonSolver {
    nx: usize,
    ny: usize,
    dx: Vec<f64>,
    dy: Vec<f64>,
    tx: Tridiag,
    ty: Tridiag,
    /// True when the x operator is diagonalized and modes run along y.
    modes_along_x: bool,
    /// Generalized eigenvectors, normalized so `S^T D S = I`.
    modes: DMatrix<f64>,
    /// Thomas factors per mode: `[mode + n_modes * t]`.
    upper: Vec<f64>,
    inv_pivot: Vec<f64>,
    singular: bool,
    /// Mode whose first unknown is pinned to zero when singular.
    null_mode: Option<usize>,
    volumes: Vec<f64>,
}

impl PoissonSolver {
    /// `fixed` flags the edges `[W, E, S, N]` with a fixed pressure value.
    pub fn new(grid: &CartesianGrid, fixed: [bool; 4]) -> Self {
        let (nx, ny) = (grid.nx(), grid.ny());
        let tx = Tridiag::new(grid.x(), fixed[Edge::West.index()], fixed[Edge::East.index()]);
        let ty = Tridiag::new(grid.y(), fixed[Edge::South.index()], fixed[Edge::North.index()]);
        let dx = grid.x().widths().to_vec();
        let dy = grid.y().widths().to_vec();
        let modes_along_x = nx <= ny;
        let (t_diag, w_diag, t_line, w_line) = if modes_along_x { (&tx, &dx, &ty, &dy) } else { (&ty, &dy, &tx, &dx) };

        let n = w_diag.len();
        let inv_sqrt: Vec<f64> = w_diag.iter().map(|w| 1.0 / w.sqrt()).collect();
        let mut b = t_diag.dense();
        for r in 0..n {
            for c in 0..n {
                b[(r, c)] *= inv_sqrt[r] * inv_sqrt[c];
            }
        }
        let eig = SymmetricEigen::new(b);
        let mut modes = eig.eigenvectors;
        for r in 0..n {
            for c in 0..n {
                modes[(r, c)] *= inv_sqrt[r];
            }
        }
        let mut lambda: Vec<f64> = eig.eigenvalues.iter().copied().collect();

        let singular = !fixed.iter().any(|&f| f);
        let null_mode =
            if singular {
                let (m, _) = lambda.iter().enumerate().fold((0, f64::INFINITY), |acc, (k, &l)| {
                    if l.abs() < acc.1 {
                        (k, l.abs())
                    } else {
                        acc
                    }
                });
                lambda[m] = 0.0;
                Some(m)
            } else {
                None
            };

        // Thomas factorization of (T_line + lambda_m W_line) for every mode m.
        let nt = w_line.len();
        let mut upper = vec![0.0; n * nt];
        let mut inv_pivot = vec![0.0; n * nt];
        for m in 0..n {
            let pinned = null_mode == Some(m);
            let mut prev_upper = 0.0;
            for t in 0..nt {
                let (diag, lower, up) = if pinned && t == 0 {
                    (1.0, 0.0, 0.0)
                } else {
                    let lower = if t > 0 { t_line.off[t - 1] } else { 0.0 };
                    let up = if t + 1 < nt { t_line.off[t] } else { 0.0 };
                    (t_line.diag[t] + lambda[m] * w_line[t], lower, up)
                };
                let pivot = diag - lower * prev_upper;
                let inv = 1.0 / pivot;
                inv_pivot[m + n * t] = inv;
                upper[m + n * t] = up * inv;
                prev_upper = up * inv;
            }
        }

        PoissonSolver {
            nx,
            ny,
            dx,
            dy,
            tx,
            ty,
            modes_along_x,
            modes,
            upper,
            inv_pivot,
            singular,
            null_mode,
            volumes: grid.volumes(),
        }
    }

    pub fn from_conditions(grid: &CartesianGrid, bc: &BoundaryConditions) -> Self {
        Self::new(grid, bc.fixed_pressure_edges())
    }

    /// True when every edge is zero-gradient and the level is set by the mean.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Applies the homogeneous operator: `out = L phi` (volume-integrated).
    pub fn apply(&self, phi: &[f64], out: &mut [f64]) {
        let (nx, ny) = (self.nx, self.ny);
        for j in 0..ny {
            for i in 0..nx {
                let k = i + nx * j;
                let mut lx = self.tx.diag[i] * phi[k];
                if i > 0 {
                    lx += self.tx.off[i - 1] * phi[k - 1];
                }
                if i + 1 < nx {
                    lx += self.tx.off[i] * phi[k + 1];
                }
                let mut ly = self.ty.diag[j] * phi[k];
                if j > 0 {
                    ly += self.ty.off[j - 1] * phi[k - nx];
                }
                if j + 1 < ny {
                    ly += self.ty.off[j] * phi[k + nx];
                }
                out[k] = self.dy[j] * lx + self.dx[i] * ly;
            }
        }
    }

    fn direct(&self, b: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let bm = DMatrix::from_column_slice(nx, ny, b);
        let n = self.modes.ncols();
        if self.modes_along_x {
            // rows of `q` are modes, columns run along y
            let mut q = self.modes.transpose() * bm;
            let s = q.as_mut_slice();
            if let Some(m) = self.null_mode {
                s[m] = 0.0;
            }
            for t in 0..ny {
                let lower = if t > 0 { self.ty.off[t - 1] } else { 0.0 };
                for m in 0..n {
                    let prev = if t > 0 { s[m + n * (t - 1)] } else { 0.0 };
                    s[m + n * t] = (s[m + n * t] - lower * prev) * self.inv_pivot[m + n * t];
                }
            }
            self.back_substitute(s, n, ny, |m, t| m + n * t);
            (&self.modes * q).as_slice().to_vec()
        } else {
            // columns of `q` are modes, rows run along x
            let mut q = bm * &self.modes;
            let s = q.as_mut_slice();
            if let Some(m) = self.null_mode {
                s[nx * m] = 0.0;
            }
            for m in 0..n {
                for t in 0..nx {
                    let prev = if t > 0 { s[(t - 1) + nx * m] } else { 0.0 };
                    let l = if t > 0 { self.tx.off[t - 1] } else { 0.0 };
                    s[t + nx * m] = (s[t + nx * m] - l * prev) * self.inv_pivot[m + n * t];
                }
            }
            self.back_substitute(s, n, nx, |m, t| t + nx * m);
            (q * self.modes.transpose()).as_slice().to_vec()
        }
    }

    fn back_substitute(&self, s: &mut [f64], n: usize, nt: usize, at: impl Fn(usize, usize) -> usize) {
        for t in (0..nt.saturating_sub(1)).rev() {
            for m in 0..n {
                let next = s[at(m, t + 1)];
                s[at(m, t)] -= self.upper[m + n * t] * next;
            }
        }
    }

    fn remove_mean(&self, v: &mut [f64]) {
        let total: f64 = self.volumes.iter().sum();
        let mean = v.iter().zip(&self.volumes).map(|(a, w)| a * w).sum::<f64>() / total;
        v.iter_mut().for_each(|a| *a -= mean);
    }

    /// Solves `L phi = b` with `b` volume-integrated. Returns the solution and
    /// the relative residual after each pass.
    pub fn solve(&self, b: &[f64], tol: f64) -> Result<(Vec<f64>, Vec<f64>), SolverError> {
        let n = self.nx * self.ny;
        assert_eq!(b.len(), n);
        let mut rhs = b.to_vec();
        if self.singular {
            // project out the incompatible part
            let total: f64 = self.volumes.iter().sum();
            let s: f64 = rhs.iter().sum();
            rhs.iter_mut().zip(&self.volumes).for_each(|(r, v)| *r -= s * v / total);
        }
        let norm_b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_b == 0.0 {
            return Ok((vec![0.0; n], vec![0.0]));
        }
        let mut phi = self.direct(&rhs);
        let mut residual = vec![0.0; n];
        let mut history = Vec::new();
        for pass in 0..=MAX_REFINEMENTS {
            self.apply(&phi, &mut residual);
            residual.iter_mut().zip(&rhs).for_each(|(r, b)| *r = b - *r);
            let rel = residual.iter().map(|v| v * v).sum::<f64>().sqrt() / norm_b;
            history.push(rel);
            if rel <= tol {
                if self.singular {
                    self.remove_mean(&mut phi);
                }
                return Ok((phi, history));
            }
            if !rel.is_finite() || pass == MAX_REFINEMENTS {
                break;
            }
            let correction = self.direct(&residual);
            phi.iter_mut().zip(&correction).for_each(|(p, c)| *p += c);
        }
        Err(SolverError::PressureNotConverged { tol, residuals: history })
    }
}

/// Solves `laplacian(p) = rhs` with the pressure conditions in `bc`.
/// Without any fixed edge the solution has zero volume-weighted mean.
pub fn solve_pressure_poisson(
    grid: &CartesianGrid,
    rhs: &Field,
    bc: &BoundaryConditions,
    tol: f64,
) -> Result<Field, SolverError> {
    let solver = PoissonSolver::from_conditions(grid, bc);
    let vol = grid.volumes();
    let mut b: Vec<f64> = rhs.component(0).iter().zip(&vol).map(|(r, v)| r * v).collect();
    for e in Edge::ALL {
        if let PressureBc::FixedValue { value } = bc.edge(e).pressure {
            for k in 0..e.len(grid) {
                b[e.cell(grid, k)] -= value * e.face_area(grid, k) / e.face_distance(grid, k);
            }
        }
    }
    let (p, _) = solver.solve(&b, tol)?;
    Ok(Field::from_components(grid, &[&p]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    fn residual(s: &PoissonSolver, phi: &[f64], b: &[f64]) -> f64 {
        let mut out = vec![0.0; b.len()];
        s.apply(phi, &mut out);
        let r: f64 = out.iter().zip(b).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        r / b.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn pseudo_random(n: usize) -> Vec<f64> {
        (0..n).map(|k| ((k as f64 * 12.9898).sin() * 43758.5453).fract()).collect()
    }

    #[test]
    fn solves_both_orientations_and_stretching() {
        let grids = [
            CartesianGrid::uniform(Rect::new(0.0, 2.0, 0.0, 1.0), 0.05).unwrap(),
            CartesianGrid::uniform(Rect::new(0.0, 1.0, 0.0, 2.0), 0.05).unwrap(),
            CartesianGrid::stretched(Rect::square(-4.0, 4.0), Rect::new(-1.0, 2.0, -1.0, 1.0), 0.05, 1.1).unwrap(),
        ];
        for g in &grids {
            for fixed in [[false, true, false, false], [true, true, true, true], [false, false, true, false]] {
                let s = PoissonSolver::new(g, fixed);
                let b = pseudo_random(g.n_cells());
                let (phi, hist) = s.solve(&b, 1e-10).unwrap();
                assert!(residual(&s, &phi, &b) <= 1e-10, "{hist:?}");
            }
        }
    }

    #[test]
    fn neumann_problem_has_zero_mean() {
        let g = CartesianGrid::stretched(Rect::square(0.0, 3.0), Rect::square(1.0, 2.0), 0.1, 1.2).unwrap();
        let s = PoissonSolver::new(&g, [false; 4]);
        assert!(s.is_singular());
        let mut b = pseudo_random(g.n_cells());
        let total: f64 = g.volumes().iter().sum();
        let sum: f64 = b.iter().sum();
        b.iter_mut().zip(g.volumes()).for_each(|(r, v)| *r -= sum * v / total);
        let (phi, _) = s.solve(&b, 1e-10).unwrap();
        assert!(residual(&s, &phi, &b) <= 1e-10);
        let mean: f64 = phi.iter().zip(g.volumes()).map(|(p, v)| p * v).sum::<f64>() / total;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn zero_rhs_gives_exact_zero() {
        let g = CartesianGrid::uniform(Rect::square(0.0, 1.0), 0.1).unwrap();
        let s = PoissonSolver::new(&g, [false; 4]);
        let (phi, _) = s.solve(&vec![0.0; g.n_cells()], 1e-12).unwrap();
        assert!(phi.iter().all(|&v| v == 0.0));
    }
}
