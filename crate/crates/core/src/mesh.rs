//! Tensor-product Cartesian grids.
//!
//! Cells are indexed `(i, j)` with `i` running along x; the flat index is
//! `i + nx * j`. All geometry is 2D with unit depth, so a cell volume is the
//! product of its two widths and a face area is the width of the orthogonal
//! axis.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::MeshError;
use crate::field::Field;

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]` in metres.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn square(lo: f64, hi: f64) -> Self {
        Rect::new(lo, hi, lo, hi)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    fn validate(&self) -> Result<(), MeshError> {
        let ok = [self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.is_finite())
            && self.x1 > self.x0
            && self.y1 > self.y0;
        if ok {
            Ok(())
        } else {
            Err(MeshError::DegenerateDomain { x0: self.x0, x1: self.x1, y0: self.y0, y1: self.y1 })
        }
    }
}

/// One coordinate direction of a tensor-product grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    faces: Vec<f64>,
    centers: Vec<f64>,
    widths: Vec<f64>,
}

impl Axis {
    fn from_faces(faces: Vec<f64>, name: char) -> Result<Self, MeshError> {
        if faces.len() < 2 {
            return Err(MeshError::Empty);
        }
        for (index, w) in faces.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[0].is_finite() || !w[1].is_finite() {
                return Err(MeshError::NonMonotone { axis: name, index });
            }
        }
        let centers = faces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let widths = faces.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Axis { faces, centers, widths })
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    pub fn lo(&self) -> f64 {
        self.faces[0]
    }

    pub fn hi(&self) -> f64 {
        self.faces[self.faces.len() - 1]
    }

    /// Index of the cell containing `x`, or `None` outside the axis.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(x >= self.lo() && x <= self.hi()) {
            return None;
        }
        let k = self.faces.partition_point(|&f| f <= x);
        Some(k.saturating_sub(1).min(self.len() - 1))
    }

    /// Distance between the centres on either side of face `f`; boundary
    /// faces use the half-width of the adjacent cell.
    pub fn face_distance(&self, f: usize) -> f64 {
        let n = self.len();
        if f == 0 {
            self.centers[0] - self.faces[0]
        } else if f == n {
            self.faces[n] - self.centers[n - 1]
        } else {
            self.centers[f] - self.centers[f - 1]
        }
    }

    /// Linear-interpolation weight of the upper cell at interior face `f`.
    pub fn face_weight(&self, f: usize) -> f64 {
        (self.faces[f] - self.centers[f - 1]) / (self.centers[f] - self.centers[f - 1])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CartesianGrid {
    x: Axis,
    y: Axis,
}

impl CartesianGrid {
    pub fn from_faces(x_faces: Vec<f64>, y_faces: Vec<f64>) -> Result<Self, MeshError> {
        Ok(CartesianGrid { x: Axis::from_faces(x_faces, 'x')?, y: Axis::from_faces(y_faces, 'y')? })
    }

    /// Uniform grid with spacing as close to `h` as the extents allow.
    pub fn uniform(domain: Rect, h: f64) -> Result<Self, MeshError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(MeshError::NonPositiveSize(h));
        }
        domain.validate()?;
        let xf = uniform_faces(domain.x0, domain.x1, h);
        let yf = uniform_faces(domain.y0, domain.y1, h);
        Self::from_faces(xf, yf)
    }

    /// Grid that is uniform with spacing `h_fine` inside `refined` and grows
    /// geometrically (ratio at most `ratio`) towards the domain edges.
    pub fn stretched(domain: Rect, refined: Rect, h_fine: f64, ratio: f64) -> Result<Self, MeshError> {
        if !(h_fine > 0.0) || !h_fine.is_finite() {
            return Err(MeshError::NonPositiveSize(h_fine));
        }
        domain.validate()?;
        refined.validate()?;
        if !domain.contains_rect(&refined) {
            return Err(MeshError::BoxOutsideDomain);
        }
        if refined == domain {
            return Self::uniform(domain, h_fine);
        }
        if !(ratio > 1.0 && ratio <= 1.3) {
            return Err(MeshError::BadRatio(ratio));
        }
        let xf = stretched_faces(domain.x0, domain.x1, refined.x0, refined.x1, h_fine, ratio);
        let yf = stretched_faces(domain.y0, domain.y1, refined.y0, refined.y1, h_fine, ratio);
        Self::from_faces(xf, yf)
    }

    pub fn x(&self) -> &Axis {
        &self.x
    }

    pub fn y(&self) -> &Axis {
        &self.y
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn n_cells(&self) -> usize {
        self.nx() * self.ny()
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i + self.nx() * j
    }

    pub fn domain(&self) -> Rect {
        Rect::new(self.x.lo(), self.x.hi(), self.y.lo(), self.y.hi())
    }

    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        [self.x.centers[i], self.y.centers[j]]
    }

    pub fn cell_volume(&self, i: usize, j: usize) -> f64 {
        self.x.widths[i] * self.y.widths[j]
    }

    pub fn volumes(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n_cells());
        for &dy in &self.y.widths {
            v.extend(self.x.widths.iter().map(|dx| dx * dy));
        }
        v
    }

    pub fn total_volume(&self) -> f64 {
        self.volumes().iter().sum()
    }

    /// Outward area vectors of the west, east, south and north faces.
    pub fn face_area_vectors(&self, i: usize, j: usize) -> [[f64; 2]; 4] {
        let dx = self.x.widths[i];
        let dy = self.y.widths[j];
        [[-dy, 0.0], [dy, 0.0], [0.0, -dx], [0.0, dx]]
    }

    pub fn h_min(&self) -> f64 {
        self.x.widths.iter().chain(&self.y.widths).copied().fold(f64::INFINITY, f64::min)
    }

    pub fn h_max(&self) -> f64 {
        self.x.widths.iter().chain(&self.y.widths).copied().fold(0.0, f64::max)
    }

    pub fn locate(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        Some((self.x.locate(p[0])?, self.y.locate(p[1])?))
    }

    /// Returns `h` when every cell whose centre lies within `radius` of `p`
    /// (per axis) has width `h` on both axes, to relative 1e-9.
    pub fn uniform_spacing_near(&self, p: [f64; 2], radius: f64) -> Option<f64> {
        let (ic, jc) = self.locate(p)?;
        let h = self.x.widths[ic];
        let same = |w: f64| ((w - h) / h).abs() <= 1e-9;
        let xs = self.x.centers.iter().zip(&self.x.widths).filter(|(c, _)| (**c - p[0]).abs() <= radius);
        let ys = self.y.centers.iter().zip(&self.y.widths).filter(|(c, _)| (**c - p[1]).abs() <= radius);
        let ok = xs.map(|(_, w)| *w).chain(ys.map(|(_, w)| *w)).all(same) && same(self.y.widths[jc]);
        ok.then_some(h)
    }

    /// Writes the grid and any cell fields as a legacy-text VTK rectilinear grid.
    pub fn write_vtk<W: Write>(&self, mut w: W, fields: &[(&str, &Field)]) -> std::io::Result<()> {
        writeln!(w, "# vtk DataFile Version 3.0")?;
        writeln!(w, "vbm rectilinear grid")?;
        writeln!(w, "ASCII")?;
        writeln!(w, "DATASET RECTILINEAR_GRID")?;
        writeln!(w, "DIMENSIONS {} {} 1", self.nx() + 1, self.ny() + 1)?;
        for (name, axis) in [("X", &self.x), ("Y", &self.y)] {
            writeln!(w, "{}_COORDINATES {} double", name, axis.faces.len())?;
            let line: Vec<String> = axis.faces.iter().map(|v| v.to_string()).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        writeln!(w, "Z_COORDINATES 1 double")?;
        writeln!(w, "0")?;
        if fields.is_empty() {
            return Ok(());
        }
        writeln!(w, "CELL_DATA {}", self.n_cells())?;
        for (name, field) in fields {
            match field.components() {
                1 => {
                    writeln!(w, "SCALARS {name} double 1")?;
                    writeln!(w, "LOOKUP_TABLE default")?;
                    for v in field.component(0) {
                        writeln!(w, "{v}")?;
                    }
                }
                _ => {
                    writeln!(w, "VECTORS {name} double")?;
                    let (u, v) = (field.component(0), field.component(1));
                    for k in 0..self.n_cells() {
                        writeln!(w, "{} {} 0", u[k], v[k])?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn uniform_faces(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).round().max(1.0) as usize;
    let step = (hi - lo) / n as f64;
    let mut f: Vec<f64> = (0..=n).map(|k| lo + k as f64 * step).collect();
    f[n] = hi;
    f
}

/// Widths of a geometric progression `h r, h r^2, ...` that exactly fill `span`.
fn geometric_widths(span: f64, h: f64, ratio: f64) -> Vec<f64> {
    if span <= 1e-12 * h {
        return Vec::new();
    }
    if span <= h {
        return vec![span];
    }
    let sum = |r: f64, n: usize| -> f64 { (1..=n).map(|k| h * r.powi(k as i32)).sum() };
    let mut n = 1;
    while sum(ratio, n) < span {
        n += 1;
    }
    if n as f64 * h > span {
        n -= 1;
    }
    // bisection on the ratio so the n widths sum to span exactly
    let (mut lo, mut hi) = (1.0, ratio.max(1.0));
    while sum(hi, n) < span {
        hi *= 1.05;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum(mid, n) < span {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r = 0.5 * (lo + hi);
    (1..=n).map(|k| h * r.powi(k as i32)).collect()
}

fn stretched_faces(lo: f64, hi: f64, box_lo: f64, box_hi: f64, h: f64, ratio: f64) -> Vec<f64> {
    let inner = uniform_faces(box_lo, box_hi, h);
    let h_box = inner[1] - inner[0];
    let left = geometric_widths(box_lo - lo, h_box, ratio);
    let right = geometric_widths(hi - box_hi, h_box, ratio);
    let mut faces = Vec::with_capacity(inner.len() + left.len() + right.len());
    let mut x = box_lo;
    let mut lead = vec![box_lo];
    for w in &left {
        x -= w;
        lead.push(x);
    }
    lead.reverse();
    if let Some(first) = lead.first_mut() {
        *first = lo;
    }
    faces.extend_from_slice(&lead[..lead.len() - 1]);
    faces.extend_from_slice(&inner);
    let mut x = box_hi;
    for w in &right {
        x += w;
        faces.push(x);
    }
    if !right.is_empty() {
        *faces.last_mut().unwrap() = hi;
    }
    faces
}

/// Largest stretching ratio in (1, 1.3] whose grid has at most `target` cells.
pub fn ratio_for_cell_count(domain: Rect, refined: Rect, h_fine: f64, target: usize) -> Result<f64, MeshError> {
    let count = |r: f64| CartesianGrid::stretched(domain, refined, h_fine, r).map(|g| g.n_cells());
    let (mut lo, mut hi) = (1.0 + 1e-6, 1.3);
    if count(hi)? > target {
        return Ok(hi);
    }
    if count(lo)? <= target {
        return Ok(lo);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if count(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_counts() {
        let g = CartesianGrid::uniform(Rect::square(0.0, 8.0), 8.0 / 512.0).unwrap();
        assert_eq!(g.n_cells(), 262_144);
        assert!((g.h_min() - g.h_max()).abs() < 1e-15);
        let g = CartesianGrid::uniform(Rect::square(0.0, 1.0), 1.0).unwrap();
        assert_eq!(g.n_cells(), 1);
        assert_eq!(g.cell_volume(0, 0), 1.0);
        let g = CartesianGrid::uniform(Rect::square(0.0, 16.0), 1.5625e-2).unwrap();
        assert_eq!(g.n_cells(), 1_048_576);
    }

    #[test]
    fn uniform_rounds_h() {
        let g = CartesianGrid::uniform(Rect::new(0.0, 1.0, 0.0, 2.0), 0.3).unwrap();
        assert_eq!(g.nx(), 3);
        assert_eq!(g.ny(), 7);
        assert!((g.x().widths()[0] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(CartesianGrid::uniform(Rect::square(0.0, 1.0), 0.0), Err(MeshError::NonPositiveSize(0.0)));
        assert!(matches!(
            CartesianGrid::uniform(Rect::new(0.0, 0.0, 0.0, 1.0), 0.1),
            Err(MeshError::DegenerateDomain { .. })
        ));
        assert_eq!(
            CartesianGrid::stretched(Rect::square(0.0, 1.0), Rect::square(0.5, 1.5), 0.1, 1.1),
            Err(MeshError::BoxOutsideDomain)
        );
        assert_eq!(
            CartesianGrid::stretched(Rect::square(0.0, 10.0), Rect::square(4.0, 6.0), 0.1, 1.5),
            Err(MeshError::BadRatio(1.5))
        );
    }

    #[test]
    fn stretched_is_monotone_away_from_box() {
        let g = CartesianGrid::stretched(Rect::square(0.0, 10.0), Rect::square(4.0, 6.0), 0.1, 1.1).unwrap();
        for axis in [g.x(), g.y()] {
            let w = axis.widths();
            let first = axis.locate(4.0 + 1e-9).unwrap();
            let last = axis.locate(6.0 - 1e-9).unwrap();
            for k in first..=last {
                assert!((w[k] - 0.1).abs() < 1e-12);
            }
            for k in 0..first {
                assert!(w[k] >= w[k + 1] - 1e-12, "left side not monotone at {k}");
                assert!(w[k] / w[k + 1] <= 1.1 + 1e-9);
            }
            for k in last..w.len() - 1 {
                assert!(w[k + 1] >= w[k] - 1e-12, "right side not monotone at {k}");
            }
            assert_eq!(axis.lo(), 0.0);
            assert_eq!(axis.hi(), 10.0);
        }
    }

    #[test]
    fn stretched_degenerates_to_uniform() {
        let d = Rect::square(0.0, 2.0);
        let g = CartesianGrid::stretched(d, d, 0.25, 5.0).unwrap();
        assert_eq!(g, CartesianGrid::uniform(d, 0.25).unwrap());
    }

    #[test]
    fn mesh_117k_like() {
        let domain = Rect::square(-50.0, 50.0);
        let refined = Rect::square(-2.0, 2.0);
        let r = ratio_for_cell_count(domain, refined, 1.63e-2, 117_312).unwrap();
        let g = CartesianGrid::stretched(domain, refined, 1.63e-2, r).unwrap();
        let n = g.n_cells() as f64;
        assert!((n - 117_312.0).abs() / 117_312.0 < 0.02, "{n}");
        assert!((g.h_min() - 1.63e-2).abs() < 2e-4);
        assert!(g.h_max() <= 9.76, "{}", g.h_max());
    }

    #[test]
    fn volumes_and_closure() {
        let g = CartesianGrid::stretched(Rect::new(-3.0, 7.0, -2.0, 2.0), Rect::new(-1.0, 1.5, -0.5, 0.5), 0.05, 1.12)
            .unwrap();
        let total = g.total_volume();
        assert!((total - 40.0).abs() / 40.0 < 1e-10);
        for j in (0..g.ny()).step_by(7) {
            for i in (0..g.nx()).step_by(5) {
                let a = g.face_area_vectors(i, j);
                let s = a.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
                assert_eq!(s, [0.0, 0.0]);
                assert_eq!(g.cell_volume(i, j), g.x().widths()[i] * g.y().widths()[j]);
            }
        }
    }

    #[test]
    fn locate_cells() {
        let g = CartesianGrid::uniform(Rect::square(0.0, 1.0), 0.25).unwrap();
        assert_eq!(g.locate([0.0, 0.0]), Some((0, 0)));
        assert_eq!(g.locate([1.0, 1.0]), Some((3, 3)));
        assert_eq!(g.locate([0.3, 0.76]), Some((1, 3)));
        assert_eq!(g.locate([1.1, 0.5]), None);
    }

    #[test]
    fn vtk_header() {
        let g = CartesianGrid::uniform(Rect::square(0.0, 1.0), 0.5).unwrap();
        let f = Field::scalar_from_fn(&g, |x, _| x);
        let mut buf = Vec::new();
        g.write_vtk(&mut buf, &[("p", &f)]).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("DIMENSIONS 3 3 1"));
        assert!(s.contains("CELL_DATA 4"));
        assert!(s.contains("X_COORDINATES 3 double\n0 0.5 1"));
    }
}
