use crate::mesh::CartesianGrid;

/// Cell-centred values, stored component-major (`data[c * n + cell]`).
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    nx: usize,
    ny: usize,
    components: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &CartesianGrid, components: usize) -> Self {
        assert!(components == 1 || components == 2, "fields are scalar or 2D vector");
        Field { nx: grid.nx(), ny: grid.ny(), components, data: vec![0.0; grid.n_cells() * components] }
    }

    pub fn scalar(grid: &CartesianGrid) -> Self {
        Self::zeros(grid, 1)
    }

    pub fn vector(grid: &CartesianGrid) -> Self {
        Self::zeros(grid, 2)
    }

    pub fn scalar_from_fn(grid: &CartesianGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::scalar(grid);
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let [x, y] = grid.center(i, j);
                out.data[grid.idx(i, j)] = f(x, y);
            }
        }
        out
    }

    pub fn vector_from_fn(grid: &CartesianGrid, f: impl Fn(f64, f64) -> [f64; 2]) -> Self {
        let mut out = Self::vector(grid);
        let n = grid.n_cells();
        for j in 0..grid.ny() {
            for i in 0..grid.nx() {
                let [x, y] = grid.center(i, j);
                let v = f(x, y);
                let k = grid.idx(i, j);
                out.data[k] = v[0];
                out.data[n + k] = v[1];
            }
        }
        out
    }

    pub fn from_components(grid: &CartesianGrid, comps: &[&[f64]]) -> Self {
        let n = grid.n_cells();
        assert!(comps.iter().all(|c| c.len() == n));
        let mut data = Vec::with_capacity(n * comps.len());
        for c in comps {
            data.extend_from_slice(c);
        }
        Field { nx: grid.nx(), ny: grid.ny(), components: comps.len(), data }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn matches(&self, grid: &CartesianGrid) -> bool {
        self.nx == grid.nx() && self.ny == grid.ny()
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.n_cells();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.n_cells();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Both components of a vector field as mutable slices.
    pub fn split_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        assert_eq!(self.components, 2);
        let n = self.n_cells();
        self.data.split_at_mut(n)
    }

    pub fn at(&self, c: usize, i: usize, j: usize) -> f64 {
        self.data[c * self.n_cells() + i + self.nx * j]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    /// Largest pointwise vector magnitude (absolute value for scalars).
    pub fn max_magnitude(&self) -> f64 {
        let n = self.n_cells();
        (0..n)
            .map(|k| (0..self.components).map(|c| self.data[c * n + k].powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: f64, other: &Field) {
        assert_eq!(self.data.len(), other.data.len());
        self.data.iter_mut().zip(&other.data).for_each(|(x, y)| *x += a * y);
    }

    /// Volume integral of each component.
    pub fn integrate(&self, grid: &CartesianGrid) -> Vec<f64> {
        let vol = grid.volumes();
        (0..self.components).map(|c| self.component(c).iter().zip(&vol).map(|(v, w)| v * w).sum()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Rect;

    #[test]
    fn layout() {
        let g = CartesianGrid::uniform(Rect::new(0.0, 3.0, 0.0, 2.0), 1.0).unwrap();
        let f = Field::vector_from_fn(&g, |x, y| [x, 10.0 * y]);
        assert_eq!(f.values().len(), g.n_cells() * 2);
        assert_eq!(f.at(0, 2, 1), 2.5);
        assert_eq!(f.at(1, 2, 1), 15.0);
        assert_eq!(f.integrate(&g), vec![9.0, 60.0]);
        assert!(f.is_finite());
    }
}
