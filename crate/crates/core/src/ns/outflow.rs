//! Convective outflow boundary: `du/dt + a du/dn = 0` on the outlet edge.

use super::{BoundaryValues, Edge};
use crate::field::Field;
use crate::mesh::CartesianGrid;

/// One implicit upwind step of the outlet face values on edge `e`,
/// transported with speed `speed` from the adjacent cell centres.
pub fn apply_advective_outflow(
    grid: &CartesianGrid,
    e: Edge,
    u: &Field,
    current: &BoundaryValues,
    speed: f64,
    dt: f64,
) -> [Vec<f64>; 2] {
    let n = e.len(grid);
    let mut out = [vec![0.0; n], vec![0.0; n]];
    for k in 0..n {
        let c = speed.max(0.0) * dt / e.face_distance(grid, k);
        let cell = e.cell(grid, k);
        for comp in 0..2 {
            let old = current.vel(e, comp)[k];
            out[comp][k] = (old + c * u.component(comp)[cell]) / (1.0 + c);
        }
    }
    out
}

/// Outward volume flux through edge `e` implied by its normal face velocities.
pub fn edge_outflow(grid: &CartesianGrid, e: Edge, normal_velocity: &[f64]) -> f64 {
    let sign = e.normal()[e.normal_component()];
    (0..e.len(grid)).map(|k| sign * normal_velocity[k] * e.face_area(grid, k)).sum()
}

/// Scales the normal velocity on the outlet edges so their total outward
/// flux equals `target`. A zero outlet profile is replaced by a uniform one.
pub fn balance_outflow(grid: &CartesianGrid, bv: &mut BoundaryValues, outlets: &[Edge], target: f64) {
    let current: f64 = outlets.iter().map(|&e| edge_outflow(grid, e, bv.vel(e, e.normal_component()))).sum();
    let area: f64 = outlets.iter().map(|&e| (0..e.len(grid)).map(|k| e.face_area(grid, k)).sum::<f64>()).sum();
    if area == 0.0 {
        return;
    }
    let uniform = current.abs() <= f64::EPSILON * area;
    for &e in outlets {
        let comp = e.normal_component();
        let sign = e.normal()[comp];
        let vals = &mut bv.velocity[e.index()][comp];
        if uniform {
            vals.iter_mut().for_each(|v| *v = sign * target / area);
        } else {
            let s = target / current;
            vals.iter_mut().for_each(|v| *v *= s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    #[test]
    fn relaxes_towards_interior_and_balances() {
        let g = CartesianGrid::uniform(Rect::new(0.0, 4.0, 0.0, 1.0), 0.25).unwrap();
        let u = Field::vector_from_fn(&g, |_, y| [1.0 + y, 0.1]);
        let bv = BoundaryValues::zeros(&g);
        let new = apply_advective_outflow(&g, Edge::East, &u, &bv, 1.0, 0.125);
        // c = 1 * 0.125 / 0.125 = 1: halfway between old and interior
        for k in 0..g.ny() {
            let y = g.y().centers()[k];
            assert!((new[0][k] - 0.5 * (1.0 + y)).abs() < 1e-14);
        }
        let mut bv = bv;
        bv.velocity[Edge::East.index()] = new;
        balance_outflow(&g, &mut bv, &[Edge::East], 2.0);
        assert!((edge_outflow(&g, Edge::East, bv.vel(Edge::East, 0)) - 2.0).abs() < 1e-14);

        let mut zero = BoundaryValues::zeros(&g);
        balance_outflow(&g, &mut zero, &[Edge::East], 3.0);
        assert!(zero.vel(Edge::East, 0).iter().all(|v| (v - 3.0).abs() < 1e-14));
    }
}
