//! Radial self-force field recovered from the enclosed-mass integral:
//! `Phi_r(r) = alpha(N) * delta / r^(N-1) * int_0^r rho(s) s^(N-1) ds`.

use crate::error::{Error, Result};
use crate::model::{ModelParams, RadialGrid};

/// Field samples at cell centers together with the running mass integral.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    /// `Phi_r` at each cell center.
    pub phi_r: Vec<f64>,
    /// Inclusive partial sums `m_i = sum_{j<=i} rho_j r_j^(N-1) dr`,
    /// i.e. the midpoint integral up to the outer face of cell `i`.
    pub enclosed: Vec<f64>,
}

/// Running midpoint integral of `rho r^(N-1)`; entry `i` covers `[0, (i+1) dr]`.
pub fn enclosed_integral(grid: &RadialGrid, rho: &[f64], dimension: u32) -> Result<Vec<f64>> {
    if dimension < 1 {
        return Err(Error::InvalidDimension(dimension));
    }
    if rho.len() != grid.cells() {
        return Err(Error::InvalidState(format!(
            "density has {} cells, grid has {}",
            rho.len(),
            grid.cells()
        )));
    }
    let dr = grid.spacing();
    let mut sum = 0.0;
    let mut out = Vec::with_capacity(rho.len());
    for (i, &value) in rho.iter().enumerate() {
        if value < 0.0 {
            return Err(Error::NegativeDensity {
                value,
                cell: Some(i),
            });
        }
        sum += value * grid.center(i).powi(dimension as i32 - 1) * dr;
        out.push(sum);
    }
    Ok(out)
}

/// Mass enclosed up to each cell *center*: the inclusive face sums minus half
/// of the own cell's contribution. This re-centering keeps the quadrature
/// second order where it is actually evaluated.
pub fn enclosed_at_centers(grid: &RadialGrid, rho: &[f64], dimension: u32) -> Result<Vec<f64>> {
    let faces = enclosed_integral(grid, rho, dimension)?;
    let dr = grid.spacing();
    let exponent = dimension as i32 - 1;
    Ok(faces
        .iter()
        .enumerate()
        .map(|(i, &m_face)| m_face - 0.5 * rho[i] * grid.center(i).powi(exponent) * dr)
        .collect())
}

/// Evaluate the field at cell centers.
pub fn radial_field(grid: &RadialGrid, rho: &[f64], params: &ModelParams) -> Result<RadialField> {
    let enclosed = enclosed_integral(grid, rho, params.dimension)?;
    let centered = enclosed_at_centers(grid, rho, params.dimension)?;
    let coupling = params.field_coupling()?;
    let exponent = params.dimension as i32 - 1;
    let phi_r = centered
        .iter()
        .enumerate()
        .map(|(i, &m)| coupling * m / grid.center(i).powi(exponent))
        .collect();
    Ok(RadialField { phi_r, enclosed })
}
