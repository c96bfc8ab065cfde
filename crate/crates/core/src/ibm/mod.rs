//! Virtual boundary: Lagrangian markers, kernel transfer and feedback forcing.

mod boundary;
mod diagnostics;
mod forcing;
mod kernel;

pub use boundary::{marker_kinematics, LagrangianBoundary, Motion};
pub use diagnostics::{aero_coefficients, force_coefficients, slip_error, strouhal};
pub use forcing::{
    compute_forcing, interpolate_to_markers, spread_to_grid, transfer_stencils, ForcingGains, ForcingOutput,
    VirtualBoundary,
};
pub use kernel::{delta_tilde, phi4, Stencil};
