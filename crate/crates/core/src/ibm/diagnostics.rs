use crate::error::Error;
use crate::field::Field;
use crate::mesh::CartesianGrid;
use crate::spectral::dominant_frequency;

/// `(C_d, C_l) = -2 F / (rho L U^2)` from the total force `F` the fluid
/// exerts on the virtual boundary's forcing (sign convention of the forcing).
pub fn force_coefficients(total: [f64; 2], rho: f64, u_ref: f64, l_ref: f64) -> (f64, f64) {
    let q = -2.0 / (rho * l_ref * u_ref * u_ref);
    (q * total[0], q * total[1])
}

/// Drag and lift coefficients of a force-density field (N/m^3).
pub fn aero_coefficients(f: &Field, grid: &CartesianGrid, rho: f64, u_ref: f64, l_ref: f64) -> (f64, f64) {
    let total = f.integrate(grid);
    force_coefficients([total[0], total[1]], rho, u_ref, l_ref)
}

/// Root-mean-square streamwise slip over the markers.
pub fn slip_error(u_ib: &[[f64; 2]], u_b: &[[f64; 2]]) -> f64 {
    if u_ib.is_empty() {
        return 0.0;
    }
    let s: f64 = u_ib.iter().zip(u_b).map(|(a, b)| (a[0] - b[0]).powi(2)).sum();
    (s / u_ib.len() as f64).sqrt()
}

/// Strouhal number of the dominant lift frequency.
pub fn strouhal(lift: &[f64], dt: f64, u_ref: f64, l_ref: f64) -> Result<f64, Error> {
    Ok(dominant_frequency(lift, dt)? * l_ref / u_ref)
}
