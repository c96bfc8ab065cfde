use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::IbmError;

/// Rigid-body trajectory of a Lagrangian boundary, or externally supplied positions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Motion {
    Stationary,
    /// `y_c(t) = amplitude cos(2 pi frequency t)`.
    Transverse {
        amplitude: f64,
        frequency: f64,
    },
    /// `x_c(t) = -amplitude sin(2 pi frequency t)`.
    Inline {
        amplitude: f64,
        frequency: f64,
    },
    /// Positions are set each step by the caller.
    Deforming,
}

impl Motion {
    /// Rigid displacement of the reference configuration at time `t`.
    pub fn displacement(&self, t: f64) -> [f64; 2] {
        match *self {
            Motion::Transverse { amplitude, frequency } => [0.0, amplitude * (2.0 * PI * frequency * t).cos()],
            Motion::Inline { amplitude, frequency } => [-amplitude * (2.0 * PI * frequency * t).sin(), 0.0],
            Motion::Stationary | Motion::Deforming => [0.0, 0.0],
        }
    }

    /// Exact rigid velocity.
    pub fn velocity(&self, t: f64) -> [f64; 2] {
        match *self {
            Motion::Transverse { amplitude, frequency } => {
                let w = 2.0 * PI * frequency;
                [0.0, -w * amplitude * (w * t).sin()]
            }
            Motion::Inline { amplitude, frequency } => {
                let w = 2.0 * PI * frequency;
                [-w * amplitude * (w * t).cos(), 0.0]
            }
            Motion::Stationary | Motion::Deforming => [0.0, 0.0],
        }
    }

    /// Exact rigid acceleration.
    pub fn acceleration(&self, t: f64) -> [f64; 2] {
        match *self {
            Motion::Transverse { amplitude, frequency } => {
                let w = 2.0 * PI * frequency;
                [0.0, -w * w * amplitude * (w * t).cos()]
            }
            Motion::Inline { amplitude, frequency } => {
                let w = 2.0 * PI * frequency;
                [w * w * amplitude * (w * t).sin(), 0.0]
            }
            Motion::Stationary | Motion::Deforming => [0.0, 0.0],
        }
    }
}

/// Markers describing an immersed curve.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianBoundary {
    reference: Vec<[f64; 2]>,
    spacing: f64,
    motion: Motion,
    closed: bool,
    /// Positions of deforming bodies at the current and two previous levels.
    history: [Vec<[f64; 2]>; 3],
}

impl LagrangianBoundary {
    /// Closed circle with `n` equally spaced markers; spacing is the chord length.
    pub fn circle(center: [f64; 2], radius: f64, n: usize, motion: Motion) -> Result<Self, IbmError> {
        if n < 4 {
            return Err(IbmError::TooFewMarkers(n));
        }
        let markers: Vec<[f64; 2]> = (0..n)
            .map(|k| {
                let a = 2.0 * PI * k as f64 / n as f64;
                [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
            })
            .collect();
        Self::from_markers(markers, true, motion)
    }

    /// Circle whose marker spacing is as close as possible to `ds`.
    pub fn circle_with_spacing(center: [f64; 2], radius: f64, ds: f64, motion: Motion) -> Result<Self, IbmError> {
        let n = (2.0 * PI * radius / ds).round().max(4.0) as usize;
        Self::circle(center, radius, n, motion)
    }

    /// Open straight segment with `n` markers including both end points.
    pub fn segment(start: [f64; 2], end: [f64; 2], n: usize, motion: Motion) -> Result<Self, IbmError> {
        if n < 4 {
            return Err(IbmError::TooFewMarkers(n));
        }
        let markers = (0..n)
            .map(|k| {
                let s = k as f64 / (n - 1) as f64;
                [start[0] + s * (end[0] - start[0]), start[1] + s * (end[1] - start[1])]
            })
            .collect();
        Self::from_markers(markers, false, motion)
    }

    /// Arbitrary markers; spacing must be uniform to 1e-6.
    pub fn from_markers(markers: Vec<[f64; 2]>, closed: bool, motion: Motion) -> Result<Self, IbmError> {
        let n = markers.len();
        if n < 4 {
            return Err(IbmError::TooFewMarkers(n));
        }
        let gaps: Vec<f64> = (0..if closed { n } else { n - 1 })
            .map(|k| {
                let (a, b) = (markers[k], markers[(k + 1) % n]);
                ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
            })
            .collect();
        let spacing = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let deviation = gaps.iter().map(|g| (g - spacing).abs()).fold(0.0, f64::max) / spacing;
        if deviation > 1e-6 {
            return Err(IbmError::NonUniformSpacing(deviation));
        }
        let history = [markers.clone(), markers.clone(), markers.clone()];
        Ok(LagrangianBoundary { reference: markers, spacing, motion, closed, history })
    }

    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn motion(&self) -> &Motion {
        &self.motion
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn reference(&self) -> &[[f64; 2]] {
        &self.reference
    }

    /// Marker positions at time `t`. Deforming bodies return the latest
    /// positions set through [`LagrangianBoundary::set_positions`].
    pub fn positions(&self, t: f64) -> Vec<[f64; 2]> {
        match self.motion {
            Motion::Deforming => self.history[0].clone(),
            m => {
                let d = m.displacement(t);
                self.reference.iter().map(|r| [r[0] + d[0], r[1] + d[1]]).collect()
            }
        }
    }

    /// Pushes new positions of a deforming body; older levels shift back.
    pub fn set_positions(&mut self, positions: Vec<[f64; 2]>) -> Result<(), IbmError> {
        if positions.len() != self.len() {
            return Err(IbmError::LengthMismatch { expected: self.len(), got: positions.len() });
        }
        self.history.rotate_right(1);
        self.history[0] = positions;
        Ok(())
    }

    fn level(&self, t: f64, back: usize, dt: f64) -> Vec<[f64; 2]> {
        match self.motion {
            Motion::Deforming => self.history[back].clone(),
            _ => self.positions(t - back as f64 * dt),
        }
    }
}

/// Backward-difference marker velocity and acceleration at `t`:
/// `u_b = (r(t) - r(t - dt)) / dt` and `du_b = (u_b(t) - u_b(t - dt)) / dt`.
pub fn marker_kinematics(boundary: &LagrangianBoundary, t: f64, dt: f64) -> (Vec<[f64; 2]>, Vec<[f64; 2]>) {
    let r0 = boundary.level(t, 0, dt);
    let r1 = boundary.level(t, 1, dt);
    let r2 = boundary.level(t, 2, dt);
    let mut vel = Vec::with_capacity(r0.len());
    let mut acc = Vec::with_capacity(r0.len());
    for k in 0..r0.len() {
        let v = [(r0[k][0] - r1[k][0]) / dt, (r0[k][1] - r1[k][1]) / dt];
        let v_prev = [(r1[k][0] - r2[k][0]) / dt, (r1[k][1] - r2[k][1]) / dt];
        vel.push(v);
        acc.push([(v[0] - v_prev[0]) / dt, (v[1] - v_prev[1]) / dt]);
    }
    (vel, acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_spacing_is_uniform() {
        let c = LagrangianBoundary::circle([1.0, 2.0], 0.5, 100, Motion::Stationary).unwrap();
        assert!((c.spacing() - 2.0 * 0.5 * (PI / 100.0).sin()).abs() < 1e-12);
        assert!(matches!(
            LagrangianBoundary::circle([0.0; 2], 1.0, 3, Motion::Stationary),
            Err(IbmError::TooFewMarkers(3))
        ));
        let bad = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [4.0, 0.0]];
        assert!(matches!(
            LagrangianBoundary::from_markers(bad, false, Motion::Stationary),
            Err(IbmError::NonUniformSpacing(_))
        ));
    }

    #[test]
    fn stationary_kinematics_vanish() {
        let c = LagrangianBoundary::circle([0.0; 2], 0.5, 16, Motion::Stationary).unwrap();
        let (v, a) = marker_kinematics(&c, 3.0, 0.01);
        assert!(v.iter().chain(&a).all(|x| x[0] == 0.0 && x[1] == 0.0));
    }

    #[test]
    fn transverse_velocity_converges_to_derivative() {
        let m = Motion::Transverse { amplitude: 0.2, frequency: 0.19 };
        let c = LagrangianBoundary::circle([0.0; 2], 0.5, 16, m).unwrap();
        let t = 1.3;
        let exact = m.velocity(t)[1];
        let err = |dt: f64| (marker_kinematics(&c, t, dt).0[0][1] - exact).abs();
        assert!(err(1e-3) < 1e-3 * 0.1);
        assert!((err(1e-3) / err(5e-4) - 2.0).abs() < 0.05);
    }

    #[test]
    fn inline_motion_matches_trajectory() {
        let m = Motion::Inline { amplitude: 0.796, frequency: 0.2 };
        assert!((m.displacement(1.25)[0] + 0.796).abs() < 1e-12);
        let c = LagrangianBoundary::circle([0.0; 2], 0.5, 16, m).unwrap();
        let (v, a) = marker_kinematics(&c, 0.7, 1e-4);
        assert!((v[3][0] - m.velocity(0.7)[0]).abs() < 1e-3);
        assert!((a[3][0] - m.acceleration(0.7)[0]).abs() < 1e-2);
    }

    #[test]
    fn deforming_positions_shift_levels() {
        let mut b = LagrangianBoundary::segment([0.0, 0.0], [3.0, 0.0], 4, Motion::Deforming).unwrap();
        let moved: Vec<[f64; 2]> = b.reference().iter().map(|r| [r[0], r[1] + 0.1]).collect();
        b.set_positions(moved).unwrap();
        let (v, a) = marker_kinematics(&b, 0.0, 0.1);
        assert!((v[2][1] - 1.0).abs() < 1e-12);
        assert!((a[2][1] - 10.0).abs() < 1e-9);
        assert!(b.set_positions(vec![[0.0; 2]; 3]).is_err());
    }
}
