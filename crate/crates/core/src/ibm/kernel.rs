//! Four-point regularized delta function and the marker transfer stencils.

use crate::error::IbmError;
use crate::mesh::CartesianGrid;

/// Four-point kernel weight at a dimensionless offset `r`.
pub fn phi4(r: f64) -> f64 {
    let a = r.abs();
    if a <= 1.0 {
        (3.0 - 2.0 * a + (1.0 + 4.0 * a - 4.0 * a * a).sqrt()) / 8.0
    } else if a < 2.0 {
        (5.0 - 2.0 * a - (-7.0 + 12.0 * a - 4.0 * a * a).sqrt()) / 8.0
    } else {
        0.0
    }
}

/// Regularized delta `phi(dx/h) phi(dy/h) / h^2` in 1/m^2.
pub fn delta_tilde(offset: [f64; 2], h: f64) -> f64 {
    phi4(offset[0] / h) * phi4(offset[1] / h) / (h * h)
}

/// Cells inside the kernel support of one marker with weights `delta * h^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    pub cells: Vec<usize>,
    pub weights: Vec<f64>,
    pub h: f64,
}

impl Stencil {
    /// Builds the stencil of marker `index` at `r`. The support must lie in a
    /// uniform part of the grid and at least two cells from every edge.
    pub fn new(grid: &CartesianGrid, index: usize, r: [f64; 2]) -> Result<Self, IbmError> {
        let near_boundary = IbmError::MarkerNearBoundary { marker: index, x: r[0], y: r[1] };
        let (i, j) = grid.locate(r).ok_or(near_boundary.clone())?;
        let h = grid.x().widths()[i];
        let d = grid.domain();
        if r[0] - d.x0 < 2.0 * h || d.x1 - r[0] < 2.0 * h || r[1] - d.y0 < 2.0 * h || d.y1 - r[1] < 2.0 * h {
            return Err(near_boundary);
        }
        let uniform = grid.uniform_spacing_near(r, 3.0 * h);
        if uniform.is_none() {
            return Err(IbmError::NonUniformSupport { marker: index, x: r[0], y: r[1] });
        }
        let (nx, ny) = (grid.nx(), grid.ny());
        let (xc, yc) = (grid.x().centers(), grid.y().centers());
        let mut cells = Vec::with_capacity(16);
        let mut weights = Vec::with_capacity(16);
        for jj in j.saturating_sub(2)..(j + 3).min(ny) {
            let wy = phi4((yc[jj] - r[1]) / h);
            if wy == 0.0 {
                continue;
            }
            for ii in i.saturating_sub(2)..(i + 3).min(nx) {
                let wx = phi4((xc[ii] - r[0]) / h);
                if wx == 0.0 {
                    continue;
                }
                cells.push(grid.idx(ii, jj));
                weights.push(wx * wy);
            }
        }
        Ok(Stencil { cells, weights, h })
    }

    /// Kernel-weighted sample of a cell field.
    pub fn gather(&self, values: &[f64]) -> f64 {
        self.cells.iter().zip(&self.weights).map(|(&c, w)| w * values[c]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_values() {
        assert_eq!(phi4(0.0), 0.5);
        assert_eq!(phi4(2.5), 0.0);
        assert_eq!(phi4(2.0), 0.0);
        let inner = (3.0 - 2.0 + (1.0f64 + 4.0 - 4.0).sqrt()) / 8.0;
        let outer = (5.0 - 2.0 - (-7.0f64 + 12.0 - 4.0).sqrt()) / 8.0;
        assert_eq!(inner, 0.25);
        assert_eq!(outer, 0.25);
        assert_eq!(phi4(1.0), 0.25);
        assert_eq!(phi4(-0.7), phi4(0.7));
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta_tilde([0.0, 0.0], 1.0), 0.25);
        let h = 0.1;
        assert!((delta_tilde([h, 0.0], h) - 0.125 / (h * h)).abs() < 1e-12);
        assert_eq!(delta_tilde([2.0 * h, 0.37], h), 0.0);
    }
}
