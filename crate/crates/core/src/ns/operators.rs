//! Explicit finite-volume operators. All results are per unit cell volume.

use super::{BoundaryValues, Edge, FaceFlux};
use crate::field::Field;
use crate::mesh::CartesianGrid;

fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Limited linear reconstruction at `x_face` from the upwind cell `c`,
/// its upstream neighbour `u` and downstream neighbour `d`.
#[inline]
fn upwind2(u: (f64, f64), c: (f64, f64), d: (f64, f64), x_face: f64) -> f64 {
    let one_sided = (c.1 - u.1) / (c.0 - u.0);
    let central = (d.1 - u.1) / (d.0 - u.0);
    c.1 + minmod(one_sided, central) * (x_face - c.0)
}

/// Values of `phi` on every face with second-order upwinding by the sign of
/// `flux`; boundary faces take the supplied edge values `[W, E, S, N]`.
pub fn upwind2_face_values(
    grid: &CartesianGrid,
    phi: &[f64],
    edges: [&[f64]; 4],
    flux: &FaceFlux,
) -> (Vec<f64>, Vec<f64>) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (xa, ya) = (grid.x(), grid.y());
    let (xc, xf) = (xa.centers(), xa.faces());
    let (yc, yf) = (ya.centers(), ya.faces());
    let [west, east, south, north] = edges;

    let mut fx = vec![0.0; (nx + 1) * ny];
    for j in 0..ny {
        let row = &phi[nx * j..nx * (j + 1)];
        let at = |i: isize| -> (f64, f64) {
            if i < 0 {
                (xf[0], west[j])
            } else if i as usize >= nx {
                (xf[nx], east[j])
            } else {
                (xc[i as usize], row[i as usize])
            }
        };
        let base = (nx + 1) * j;
        fx[base] = west[j];
        fx[base + nx] = east[j];
        for f in 1..nx {
            let fi = f as isize;
            fx[base + f] = if flux.x[base + f] >= 0.0 {
                upwind2(at(fi - 2), at(fi - 1), at(fi), xf[f])
            } else {
                upwind2(at(fi + 1), at(fi), at(fi - 1), xf[f])
            };
        }
    }

    let mut fy = vec![0.0; nx * (ny + 1)];
    for i in 0..nx {
        let at = |j: isize| -> (f64, f64) {
            if j < 0 {
                (yf[0], south[i])
            } else if j as usize >= ny {
                (yf[ny], north[i])
            } else {
                (yc[j as usize], phi[i + nx * j as usize])
            }
        };
        fy[i] = south[i];
        fy[i + nx * ny] = north[i];
        for f in 1..ny {
            let fj = f as isize;
            fy[i + nx * f] = if flux.y[i + nx * f] >= 0.0 {
                upwind2(at(fj - 2), at(fj - 1), at(fj), yf[f])
            } else {
                upwind2(at(fj + 1), at(fj), at(fj - 1), yf[f])
            };
        }
    }
    (fx, fy)
}

/// Linearly interpolated face fluxes `u . n A` with boundary faces from `bv`.
pub fn interpolate_face_flux(grid: &CartesianGrid, u: &Field, bv: &BoundaryValues) -> FaceFlux {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (xa, ya) = (grid.x(), grid.y());
    let (ux, uy) = (u.component(0), u.component(1));
    let mut flux = FaceFlux::zeros(grid);
    for j in 0..ny {
        let dy = ya.widths()[j];
        let base = (nx + 1) * j;
        flux.x[base] = bv.vel(Edge::West, 0)[j] * dy;
        flux.x[base + nx] = bv.vel(Edge::East, 0)[j] * dy;
        for f in 1..nx {
            let w = xa.face_weight(f);
            let c = nx * j + f;
            flux.x[base + f] = ((1.0 - w) * ux[c - 1] + w * ux[c]) * dy;
        }
    }
    for f in 0..=ny {
        for i in 0..nx {
            let dx = xa.widths()[i];
            flux.y[i + nx * f] = if f == 0 {
                bv.vel(Edge::South, 1)[i] * dx
            } else if f == ny {
                bv.vel(Edge::North, 1)[i] * dx
            } else {
                let w = ya.face_weight(f);
                ((1.0 - w) * uy[i + nx * (f - 1)] + w * uy[i + nx * f]) * dx
            };
        }
    }
    flux
}

/// Net outward flux of every cell (not divided by volume).
pub fn net_outflow(grid: &CartesianGrid, flux: &FaceFlux) -> Vec<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let xw = i + (nx + 1) * j;
            let ys = i + nx * j;
            out[i + nx * j] = flux.x[xw + 1] - flux.x[xw] + flux.y[ys + nx] - flux.y[ys];
        }
    }
    out
}

/// Discrete divergence of the face fluxes per unit volume.
pub fn divergence(grid: &CartesianGrid, flux: &FaceFlux) -> Vec<f64> {
    let vol = grid.volumes();
    net_outflow(grid, flux).into_iter().zip(vol).map(|(d, v)| d / v).collect()
}

/// `div(phi u)` for each component of `u`, transported by `flux` with
/// second-order upwind face values.
pub fn convective_term(grid: &CartesianGrid, flux: &FaceFlux, u: &Field, bv: &BoundaryValues) -> Field {
    let (nx, ny) = (grid.nx(), grid.ny());
    let vol = grid.volumes();
    let mut out = Field::zeros(grid, u.components());
    for c in 0..u.components() {
        let edges = Edge::ALL.map(|e| bv.vel(e, c));
        let (fx, fy) = upwind2_face_values(grid, u.component(c), edges, flux);
        let dst = out.component_mut(c);
        for j in 0..ny {
            for i in 0..nx {
                let xw = i + (nx + 1) * j;
                let ys = i + nx * j;
                let net = flux.x[xw + 1] * fx[xw + 1] - flux.x[xw] * fx[xw] + flux.y[ys + nx] * fy[ys + nx]
                    - flux.y[ys] * fy[ys];
                dst[ys] = net / vol[ys];
            }
        }
    }
    out
}

/// Two-point Laplacian of a cell scalar with Dirichlet edge data, summed
/// over faces (not divided by volume).
pub(crate) fn laplacian_sum(grid: &CartesianGrid, phi: &[f64], edges: [&[f64]; 4], out: &mut [f64]) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (xa, ya) = (grid.x(), grid.y());
    let [west, east, south, north] = edges;
    for j in 0..ny {
        let dy = ya.widths()[j];
        let ds = ya.face_distance(j);
        let dn = ya.face_distance(j + 1);
        for i in 0..nx {
            let dx = xa.widths()[i];
            let k = i + nx * j;
            let p = phi[k];
            let w = if i == 0 { west[j] } else { phi[k - 1] };
            let e = if i == nx - 1 { east[j] } else { phi[k + 1] };
            let s = if j == 0 { south[i] } else { phi[k - nx] };
            let n = if j == ny - 1 { north[i] } else { phi[k + nx] };
            out[k] = dy * ((w - p) / xa.face_distance(i) + (e - p) / xa.face_distance(i + 1))
                + dx * ((s - p) / ds + (n - p) / dn);
        }
    }
}

/// `mu * laplacian(u)` for each component.
pub fn diffusion_term(grid: &CartesianGrid, u: &Field, bv: &BoundaryValues, mu: f64) -> Field {
    let vol = grid.volumes();
    let mut out = Field::zeros(grid, u.components());
    for c in 0..u.components() {
        let edges = Edge::ALL.map(|e| bv.vel(e, c));
        let dst = out.component_mut(c);
        laplacian_sum(grid, u.component(c), edges, dst);
        dst.iter_mut().zip(&vol).for_each(|(d, v)| *d *= mu / v);
    }
    out
}

/// Gauss gradient of a cell scalar with linearly interpolated face values.
pub(crate) fn gauss_gradient(grid: &CartesianGrid, p: &[f64], edges: [&[f64]; 4], gx: &mut [f64], gy: &mut [f64]) {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (xa, ya) = (grid.x(), grid.y());
    let [west, east, south, north] = edges;
    for j in 0..ny {
        let dy = ya.widths()[j];
        for i in 0..nx {
            let dx = xa.widths()[i];
            let k = i + nx * j;
            let pw = if i == 0 {
                west[j]
            } else {
                let w = xa.face_weight(i);
                (1.0 - w) * p[k - 1] + w * p[k]
            };
            let pe = if i == nx - 1 {
                east[j]
            } else {
                let w = xa.face_weight(i + 1);
                (1.0 - w) * p[k] + w * p[k + 1]
            };
            let ps = if j == 0 {
                south[i]
            } else {
                let w = ya.face_weight(j);
                (1.0 - w) * p[k - nx] + w * p[k]
            };
            let pn = if j == ny - 1 {
                north[i]
            } else {
                let w = ya.face_weight(j + 1);
                (1.0 - w) * p[k] + w * p[k + nx]
            };
            gx[k] = (pe - pw) / dx;
            gy[k] = (pn - ps) / dy;
        }
    }
}

/// Cell-centred pressure gradient.
pub fn pressure_gradient(grid: &CartesianGrid, p: &Field, bv: &BoundaryValues) -> Field {
    let mut out = Field::vector(grid);
    let edges = Edge::ALL.map(|e| bv.pres(e));
    let (gx, gy) = out.split_mut();
    gauss_gradient(grid, p.component(0), edges, gx, gy);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;
    use std::f64::consts::PI;

    fn grid(n: usize) -> CartesianGrid {
        CartesianGrid::uniform(Rect::square(0.0, 1.0), 1.0 / n as f64).unwrap()
    }

    fn stretched() -> CartesianGrid {
        CartesianGrid::stretched(Rect::square(0.0, 1.0), Rect::square(0.3, 0.6), 1.0 / 64.0, 1.1).unwrap()
    }

    fn max_err(a: &Field, b: &Field, c: usize) -> f64 {
        a.component(c).iter().zip(b.component(c)).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn linear_fields_are_exact() {
        for g in [grid(8), stretched()] {
            let u = |x: f64, y: f64| [1.0 + 2.0 * x - y, 0.5 * x + 3.0 * y];
            let pf = |x: f64, y: f64| 3.0 * x - 2.0 * y;
            let uf = Field::vector_from_fn(&g, u);
            let pfield = Field::scalar_from_fn(&g, pf);
            let bv = BoundaryValues::from_fn(&g, u, pf);
            let grad = pressure_gradient(&g, &pfield, &bv);
            assert!(grad.component(0).iter().all(|v| (v - 3.0).abs() < 1e-10));
            assert!(grad.component(1).iter().all(|v| (v + 2.0).abs() < 1e-10));
            let lap = diffusion_term(&g, &uf, &bv, 1.0);
            assert!(lap.max_magnitude() < 1e-9);
            let flux = interpolate_face_flux(&g, &uf, &bv);
            for d in divergence(&g, &flux) {
                assert!((d - 5.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pressure_gradient_converges_on_smooth_field() {
        let errs: Vec<f64> = [16, 32]
            .iter()
            .map(|&n| {
                let g = grid(n);
                let pf = |x: f64, y: f64| (PI * x).sin() * (PI * y).cos();
                let p = Field::scalar_from_fn(&g, pf);
                let bv = BoundaryValues::from_fn(&g, |_, _| [0.0; 2], pf);
                let exact = Field::vector_from_fn(&g, |x, y| {
                    [PI * (PI * x).cos() * (PI * y).cos(), -PI * (PI * x).sin() * (PI * y).sin()]
                });
                max_err(&pressure_gradient(&g, &p, &bv), &exact, 0)
            })
            .collect();
        assert!(errs[1] < errs[0] / 1.8, "{errs:?}");
    }

    #[test]
    fn convection_of_uniform_flow_is_zero() {
        let g = stretched();
        let u = |_: f64, _: f64| [1.0, -0.5];
        let uf = Field::vector_from_fn(&g, u);
        let bv = BoundaryValues::from_fn(&g, u, |_, _| 0.0);
        let flux = interpolate_face_flux(&g, &uf, &bv);
        assert!(convective_term(&g, &flux, &uf, &bv).max_magnitude() < 1e-12);
    }

    #[test]
    fn convection_is_conservative() {
        let g = grid(16);
        let u = |x: f64, y: f64| [(PI * x).sin() * (PI * y).cos(), -(PI * x).cos() * (PI * y).sin()];
        let uf = Field::vector_from_fn(&g, u);
        let bv = BoundaryValues::from_fn(&g, u, |_, _| 0.0);
        let flux = interpolate_face_flux(&g, &uf, &bv);
        let conv = convective_term(&g, &flux, &uf, &bv);
        // Interior face contributions cancel; the total equals the boundary flux of momentum.
        let total = conv.integrate(&g);
        let mut boundary = [0.0; 2];
        for e in Edge::ALL {
            for k in 0..e.len(&g) {
                let out = flux.boundary_outflow(&g, e, k);
                for c in 0..2 {
                    boundary[c] += out * bv.vel(e, c)[k];
                }
            }
        }
        for c in 0..2 {
            assert!((total[c] - boundary[c]).abs() < 1e-12);
        }
    }

    #[test]
    fn upwind2_limits_at_extrema() {
        assert_eq!(upwind2((0.0, 0.0), (1.0, 1.0), (2.0, 0.0), 1.5), 1.0);
        assert!((upwind2((0.0, 0.0), (1.0, 1.0), (2.0, 2.0), 1.5) - 1.5).abs() < 1e-15);
    }
}
