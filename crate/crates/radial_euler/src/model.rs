//! Physical parameters, grid geometry, initial data, and hypothesis checks
//! for radially symmetric gamma-law flow with an optional self-force.
//!
//! The continuum model is
//!
//! ```text
//! rho_t + V rho_r + rho V_r + (N-1) rho V / r = 0
//! rho (V_t + V V_r) + P_r = rho Phi_r,      P = K rho^gamma
//! ```
//!
//! on `0 <= r <= R` with no-slip compact support: `rho = V = 0` for `r >= R`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Relative tolerance for the compact-support check at `r = R`.
///
/// Built-in families vanish at their support radius analytically, but the
/// evaluation goes through `sin` and friends, so exact zero is not available.
const SUPPORT_TOL: f64 = 1e-9;

/// Gamma function at integer or half-integer argument `m / 2`, `m >= 1`.
fn gamma_of_half(m: u32) -> f64 {
    debug_assert!(m >= 1);
    let target = f64::from(m) / 2.0;
    let (mut x, mut g) = if m % 2 == 0 {
        (1.0, 1.0)
    } else {
        (0.5, PI.sqrt())
    };
    while x + 0.5 < target + 0.25 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Coupling constant of the radial Poisson field.
///
/// Normalized so that the field of a point source is `alpha(N) / r^(N-1)`:
/// `alpha(1) = 2`, `alpha(2) = 2 pi`, and
/// `alpha(N) = (N-2) * 2 pi^(N/2) / Gamma(N/2)` for `N >= 3`.
pub fn alpha(dimension: u32) -> Result<f64> {
    match dimension {
        0 => Err(Error::InvalidDimension(dimension)),
        1 => Ok(2.0),
        2 => Ok(2.0 * PI),
        n => {
            let half = f64::from(n) / 2.0;
            Ok(f64::from(n - 2) * 2.0 * PI.powf(half) / gamma_of_half(n))
        }
    }
}

/// Gamma-law pressure `P = K rho^gamma`.
pub fn pressure(rho: f64, k: f64, gamma: f64) -> Result<f64> {
    if rho < 0.0 {
        return Err(Error::NegativeDensity {
            value: rho,
            cell: None,
        });
    }
    if k == 0.0 {
        return Ok(0.0);
    }
    Ok(k * rho.powf(gamma))
}

/// Bulk parameters of one run: dimension, force sign, equation of state,
/// weight exponent, and domain radius.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    /// Spatial dimension `N >= 1`.
    pub dimension: u32,
    /// Force sign `delta`: +1 repulsive, 0 none, -1 attractive.
    pub delta: i32,
    /// Pressure constant `K >= 0`; `K = 0` is pressureless flow.
    pub pressure_constant: f64,
    /// Adiabatic exponent `gamma >= 1`.
    pub adiabatic_exponent: f64,
    /// Primary weight exponent `n > 0` of the moment `H = int r^n V dr`.
    pub weight_exponent: f64,
    /// Support radius `R > 0`.
    pub domain_radius: f64,
}

impl ModelParams {
    pub fn new(
        dimension: u32,
        delta: i32,
        pressure_constant: f64,
        adiabatic_exponent: f64,
        weight_exponent: f64,
        domain_radius: f64,
    ) -> Result<Self> {
        let params = ModelParams {
            dimension,
            delta,
            pressure_constant,
            adiabatic_exponent,
            weight_exponent,
            domain_radius,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 1 {
            return Err(Error::InvalidDimension(self.dimension));
        }
        if !matches!(self.delta, -1 | 0 | 1) {
            return Err(Error::InvalidForceSign(self.delta));
        }
        if !(self.pressure_constant >= 0.0) {
            return Err(Error::config(
                "pressure_constant",
                format!("K = {} must be nonnegative", self.pressure_constant),
            ));
        }
        if !(self.adiabatic_exponent >= 1.0) {
            return Err(Error::config(
                "adiabatic_exponent",
                format!("gamma = {} must be >= 1", self.adiabatic_exponent),
            ));
        }
        if !(self.weight_exponent > 0.0) {
            return Err(Error::InvalidExponent(self.weight_exponent));
        }
        if !(self.domain_radius > 0.0) {
            return Err(Error::config(
                "domain_radius",
                format!("R = {} must be positive", self.domain_radius),
            ));
        }
        Ok(())
    }

    /// Whether the blowup bound applies to this parameter set:
    /// nonnegative force sign and either pressureless flow or `gamma > 1`.
    pub fn theorem_applicable(&self) -> bool {
        self.delta >= 0 && (self.pressure_constant == 0.0 || self.adiabatic_exponent > 1.0)
    }

    /// `alpha(N) * delta`, the signed field coupling.
    pub fn field_coupling(&self) -> Result<f64> {
        Ok(alpha(self.dimension)? * f64::from(self.delta))
    }
}

/// Uniform cell-centered grid on `[0, R]`.
///
/// Cell `i` has center `r_i = (i + 1/2) dr`; no sample sits at `r = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    cells: usize,
    spacing: f64,
    radius: f64,
    ghost_depth: usize,
}

impl RadialGrid {
    pub fn new(cells: usize, radius: f64, ghost_depth: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::config(
                "cells",
                format!("need at least 2 cells, got {cells}"),
            ));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::config(
                "domain_radius",
                format!("R = {radius} must be positive and finite"),
            ));
        }
        if ghost_depth == 0 || ghost_depth > cells {
            return Err(Error::config(
                "ghost_depth",
                format!("ghost depth {ghost_depth} must be in 1..={cells}"),
            ));
        }
        Ok(RadialGrid {
            cells,
            spacing: radius / cells as f64,
            radius,
            ghost_depth,
        })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn ghost_depth(&self) -> usize {
        self.ghost_depth
    }

    /// Center of interior cell `i`.
    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.spacing
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.cells).map(|i| self.center(i))
    }
}

/// Cell-centered fluid state at one instant.
///
/// Only interior cells are stored; the discretization extends the state by
/// reflection below `r = 0` (`rho` even, `V` odd) and by the no-slip closure
/// `rho = V = 0` at and beyond `r = R`.
#[derive(Debug, Clone, PartialEq)]
pub struct FluidState {
    pub time: f64,
    pub rho: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl FluidState {
    pub fn new(time: f64, rho: Vec<f64>, velocity: Vec<f64>) -> Result<Self> {
        if rho.len() != velocity.len() {
            return Err(Error::InvalidState(format!(
                "rho has {} cells but velocity has {}",
                rho.len(),
                velocity.len()
            )));
        }
        for (i, &value) in rho.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::InvalidState(format!(
                    "non-finite density {value} at cell {i}"
                )));
            }
            if value < 0.0 {
                return Err(Error::NegativeDensity {
                    value,
                    cell: Some(i),
                });
            }
        }
        if let Some((i, &value)) = velocity
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(Error::InvalidState(format!(
                "non-finite velocity {value} at cell {i}"
            )));
        }
        Ok(FluidState {
            time,
            rho,
            velocity,
        })
    }

    pub fn cells(&self) -> usize {
        self.rho.len()
    }

    /// State values at `r >= R` under the no-slip closure.
    ///
    /// The scheme imposes `rho = V = 0` outside the domain, so this is the
    /// boundary trace every audit of the compact-support hypothesis sees.
    pub fn noslip_trace(&self) -> (f64, f64) {
        (0.0, 0.0)
    }
}

/// Smooth plateau: 1 up to `edge - taper`, C1 ramp down to 0 at `edge`.
fn plateau(r: f64, edge: f64, taper: f64) -> f64 {
    if r >= edge {
        0.0
    } else if r <= edge - taper {
        1.0
    } else {
        let x = (r - (edge - taper)) / taper;
        1.0 - x * x * (3.0 - 2.0 * x)
    }
}

/// Initial data families. All built-ins produce C1 profiles that vanish at
/// their support radius.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// `rho = A (1 - (r/s)^2)^2` on `[0, s]`, `V = 0`.
    PolyBumpDensity { amplitude: f64, support_radius: f64 },
    /// `V = A (r/s) (1 - (r/s)^2)^2` with a matching density bump.
    PolyBumpVelocity {
        amplitude: f64,
        support_radius: f64,
        density_amplitude: f64,
    },
    /// `V = A_v sin(pi r / R)` with a near-uniform plateau density: constant
    /// `A_rho` out to `R - density_taper`, then a C1 ramp reaching zero at
    /// the wall itself. Density stays positive at every interior point, so
    /// the sine velocity is everywhere attached to actual fluid.
    SineVelocity {
        velocity_amplitude: f64,
        density_amplitude: f64,
        density_taper: f64,
    },
    /// Tabulated `(r, rho, V)` samples, linearly interpolated.
    Custom { samples: Vec<[f64; 3]> },
}

impl InitialProfile {
    pub fn validate(&self, radius: f64) -> Result<()> {
        match self {
            InitialProfile::PolyBumpDensity {
                amplitude,
                support_radius,
            } => {
                if !amplitude.is_finite() || *amplitude < 0.0 {
                    return Err(Error::config("amplitude", "density amplitude must be >= 0"));
                }
                check_support_radius(*support_radius, radius)?;
            }
            InitialProfile::PolyBumpVelocity {
                amplitude,
                support_radius,
                density_amplitude,
            } => {
                if !amplitude.is_finite() {
                    return Err(Error::config("amplitude", "must be finite"));
                }
                if !density_amplitude.is_finite() || *density_amplitude < 0.0 {
                    return Err(Error::config(
                        "density_amplitude",
                        "density amplitude must be >= 0",
                    ));
                }
                check_support_radius(*support_radius, radius)?;
            }
            InitialProfile::SineVelocity {
                velocity_amplitude,
                density_amplitude,
                density_taper,
            } => {
                if !velocity_amplitude.is_finite() {
                    return Err(Error::config("velocity_amplitude", "must be finite"));
                }
                if !density_amplitude.is_finite() || *density_amplitude < 0.0 {
                    return Err(Error::config(
                        "density_amplitude",
                        "density amplitude must be >= 0",
                    ));
                }
                if !(*density_taper > 0.0) || *density_taper > radius {
                    return Err(Error::config(
                        "density_taper",
                        format!("taper width {density_taper} must lie in (0, {radius}]"),
                    ));
                }
            }
            InitialProfile::Custom { samples } => {
                if samples.len() < 2 {
                    return Err(Error::config("samples", "need at least two samples"));
                }
                for window in samples.windows(2) {
                    if !(window[1][0] > window[0][0]) {
                        return Err(Error::config(
                            "samples",
                            "sample radii must be strictly increasing",
                        ));
                    }
                }
                for sample in samples {
                    if sample.iter().any(|v| !v.is_finite()) {
                        return Err(Error::config("samples", "samples must be finite"));
                    }
                    if sample[1] < 0.0 {
                        return Err(Error::NegativeDensity {
                            value: sample[1],
                            cell: None,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Initial density at radius `r`.
    pub fn density_at(&self, r: f64, radius: f64) -> f64 {
        if r > radius {
            return 0.0;
        }
        let value = match self {
            InitialProfile::PolyBumpDensity {
                amplitude,
                support_radius,
            } => poly_bump(r, *amplitude, *support_radius),
            InitialProfile::PolyBumpVelocity {
                support_radius,
                density_amplitude,
                ..
            } => poly_bump(r, *density_amplitude, *support_radius),
            InitialProfile::SineVelocity {
                density_amplitude,
                density_taper,
                ..
            } => density_amplitude * plateau(r, radius, *density_taper),
            InitialProfile::Custom { samples } => interpolate(samples, r, 1),
        };
        value.max(0.0)
    }

    /// Initial velocity at radius `r`.
    pub fn velocity_at(&self, r: f64, radius: f64) -> f64 {
        if r > radius {
            return 0.0;
        }
        match self {
            InitialProfile::PolyBumpDensity { .. } => 0.0,
            InitialProfile::PolyBumpVelocity {
                amplitude,
                support_radius,
                ..
            } => {
                let u = r / support_radius;
                if u >= 1.0 {
                    0.0
                } else {
                    amplitude * u * (1.0 - u * u) * (1.0 - u * u)
                }
            }
            InitialProfile::SineVelocity {
                velocity_amplitude, ..
            } => velocity_amplitude * (PI * r / radius).sin(),
            InitialProfile::Custom { samples } => interpolate(samples, r, 2),
        }
    }

    /// Scale used by the compact-support tolerance.
    fn amplitude_scale(&self) -> f64 {
        let a = match self {
            InitialProfile::PolyBumpDensity { amplitude, .. } => amplitude.abs(),
            InitialProfile::PolyBumpVelocity {
                amplitude,
                density_amplitude,
                ..
            } => amplitude.abs().max(density_amplitude.abs()),
            InitialProfile::SineVelocity {
                velocity_amplitude,
                density_amplitude,
                ..
            } => velocity_amplitude.abs().max(density_amplitude.abs()),
            InitialProfile::Custom { samples } => samples
                .iter()
                .map(|s| s[1].abs().max(s[2].abs()))
                .fold(0.0, f64::max),
        };
        a.max(1.0)
    }
}

fn check_support_radius(support: f64, radius: f64) -> Result<()> {
    if !(support > 0.0) || support > radius {
        return Err(Error::config(
            "support_radius",
            format!("support radius {support} must lie in (0, {radius}]"),
        ));
    }
    Ok(())
}

fn poly_bump(r: f64, amplitude: f64, support: f64) -> f64 {
    let u = r / support;
    if u >= 1.0 {
        0.0
    } else {
        let w = 1.0 - u * u;
        amplitude * w * w
    }
}

/// Piecewise-linear interpolation of column `col` (1 = rho, 2 = V).
/// Holds the first value below the table and is zero beyond the last radius.
fn interpolate(samples: &[[f64; 3]], r: f64, col: usize) -> f64 {
    let first = &samples[0];
    let last = &samples[samples.len() - 1];
    if r <= first[0] {
        return first[col];
    }
    if r >= last[0] {
        return if r > last[0] { 0.0 } else { last[col] };
    }
    let k = samples.partition_point(|s| s[0] < r);
    let (lo, hi) = (&samples[k - 1], &samples[k]);
    let w = (r - lo[0]) / (hi[0] - lo[0]);
    lo[col] + w * (hi[col] - lo[col])
}

/// Sample a profile onto the grid after checking compact support at `r = R`.
pub fn make_initial_state(profile: &InitialProfile, grid: &RadialGrid) -> Result<FluidState> {
    profile.validate(grid.radius())?;
    let scale = profile.amplitude_scale();
    let rho_at_r = profile.density_at(grid.radius(), grid.radius());
    if rho_at_r.abs() > SUPPORT_TOL * scale {
        return Err(Error::SupportViolation {
            field: "rho",
            value: rho_at_r,
        });
    }
    let v_at_r = profile.velocity_at(grid.radius(), grid.radius());
    if v_at_r.abs() > SUPPORT_TOL * scale {
        return Err(Error::SupportViolation {
            field: "V",
            value: v_at_r,
        });
    }
    let rho = grid
        .centers()
        .map(|r| profile.density_at(r, grid.radius()))
        .collect();
    let velocity = grid
        .centers()
        .map(|r| profile.velocity_at(r, grid.radius()))
        .collect();
    FluidState::new(0.0, rho, velocity)
}

/// Outcome of checking the blowup-theorem hypotheses on initial data.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HypothesisReport {
    /// `H0 = int_0^R r^n V0 dr` by midpoint quadrature.
    #[serde(rename = "H0")]
    pub h0: f64,
    /// True iff `H0 > 0`, `delta >= 0`, and (`K = 0` or `gamma > 1`).
    pub applicable: bool,
    /// One entry per failed hypothesis; empty when applicable.
    pub reasons: Vec<String>,
}

/// Check the sign condition on the initial moment and the parameter
/// restrictions of the bound. Reports reasons instead of failing.
pub fn validate_hypotheses(
    params: &ModelParams,
    state: &FluidState,
    grid: &RadialGrid,
) -> HypothesisReport {
    let h0 = crate::diagnostics::weighted_moment(state, grid, params.weight_exponent)
        .expect("params.weight_exponent is validated positive");
    let mut reasons = Vec::new();
    if !(h0 > 0.0) {
        reasons.push(format!("initial moment H0 = {h0} is not positive"));
    }
    if params.delta < 0 {
        reasons.push("delta = -1: bound requires delta >= 0".to_string());
    }
    if params.pressure_constant > 0.0 && params.adiabatic_exponent <= 1.0 {
        reasons.push(format!(
            "K = {} with gamma = {}: bound requires K = 0 or gamma > 1",
            params.pressure_constant, params.adiabatic_exponent
        ));
    }
    HypothesisReport {
        h0,
        applicable: reasons.is_empty(),
        reasons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn alpha_matches_known_dimensions() {
        assert_relative_eq!(alpha(1).unwrap(), 2.0);
        assert_relative_eq!(alpha(2).unwrap(), 2.0 * PI);
        assert_relative_eq!(alpha(3).unwrap(), 4.0 * PI, max_relative = 1e-14);
        // alpha(3) = 12.5664 to the displayed precision.
        assert!((alpha(3).unwrap() - 12.5664).abs() < 5e-5);
        assert!(alpha(0).is_err());
    }

    #[test]
    fn alpha_ratio_is_exact() {
        let ratio = alpha(3).unwrap() / alpha(1).unwrap();
        assert_relative_eq!(ratio, 2.0 * PI, max_relative = 1e-15);
    }

    #[test]
    fn alpha_higher_dimensions_match_surface_measure() {
        // (N-2) times the area of the unit (N-1)-sphere: 4 pi^2 for N = 4,
        // 8 pi^2 for N = 5.
        assert_relative_eq!(alpha(4).unwrap(), 4.0 * PI * PI, max_relative = 1e-14);
        assert_relative_eq!(alpha(5).unwrap(), 8.0 * PI * PI, max_relative = 1e-14);
    }

    #[test]
    fn pressure_basics() {
        assert_relative_eq!(pressure(2.0, 1.0, 2.0).unwrap(), 4.0);
        assert_eq!(pressure(3.0, 0.0, 1.4).unwrap(), 0.0);
        assert_eq!(pressure(0.0, 5.0, 1.4).unwrap(), 0.0);
        assert!(pressure(-1.0, 1.0, 1.4).is_err());
    }

    #[test]
    fn grid_geometry() {
        let grid = RadialGrid::new(8, 2.0, 1).unwrap();
        assert_relative_eq!(grid.spacing() * grid.cells() as f64, 2.0);
        let centers: Vec<f64> = grid.centers().collect();
        assert_relative_eq!(centers[0], 0.125);
        assert!(centers.windows(2).all(|w| w[1] > w[0]));
        assert!(centers.iter().all(|&r| r > 0.0 && r < 2.0));
        assert!(RadialGrid::new(1, 1.0, 1).is_err());
        assert!(RadialGrid::new(8, 0.0, 1).is_err());
    }

    #[test]
    fn state_rejects_bad_data() {
        assert!(FluidState::new(0.0, vec![1.0, 1.0], vec![0.0]).is_err());
        assert!(FluidState::new(0.0, vec![1.0, -0.5], vec![0.0, 0.0]).is_err());
        assert!(FluidState::new(0.0, vec![1.0, 1.0], vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn poly_bump_density_peak_and_support() {
        let grid = RadialGrid::new(64, 1.0, 1).unwrap();
        let profile = InitialProfile::PolyBumpDensity {
            amplitude: 2.5,
            support_radius: 1.0,
        };
        assert_relative_eq!(profile.density_at(0.0, 1.0), 2.5);
        let state = make_initial_state(&profile, &grid).unwrap();
        assert!(state.velocity.iter().all(|&v| v == 0.0));
        assert!(state.rho.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn sine_velocity_profile_samples() {
        let profile = InitialProfile::SineVelocity {
            velocity_amplitude: 1.0,
            density_amplitude: 1.0,
            density_taper: 0.1,
        };
        // V(0.5) = sin(pi/2) = 1 for R = 1.
        assert_relative_eq!(profile.velocity_at(0.5, 1.0), 1.0);
        // Plateau region keeps the density uniform; the taper is the C1
        // smoothstep, halfway down at the midpoint of its width.
        assert_relative_eq!(profile.density_at(0.3, 1.0), 1.0);
        assert_relative_eq!(profile.density_at(0.95, 1.0), 0.5, max_relative = 1e-12);
        assert_eq!(profile.density_at(1.0, 1.0), 0.0);
        assert!(profile.density_at(0.999, 1.0) > 0.0);
        let grid = RadialGrid::new(128, 1.0, 1).unwrap();
        assert!(make_initial_state(&profile, &grid).is_ok());
    }

    #[test]
    fn zero_amplitudes_give_vacuum() {
        let grid = RadialGrid::new(16, 1.0, 1).unwrap();
        let profile = InitialProfile::PolyBumpVelocity {
            amplitude: 0.0,
            support_radius: 1.0,
            density_amplitude: 0.0,
        };
        let state = make_initial_state(&profile, &grid).unwrap();
        assert!(state.rho.iter().all(|&x| x == 0.0));
        assert!(state.velocity.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn support_violation_is_rejected() {
        let grid = RadialGrid::new(16, 1.0, 1).unwrap();
        let profile = InitialProfile::Custom {
            samples: vec![[0.0, 1.0, 0.0], [1.0, 1.0, 0.5]],
        };
        match make_initial_state(&profile, &grid) {
            Err(Error::SupportViolation { .. }) => {}
            other => panic!("expected support violation, got {other:?}"),
        }
    }

    #[test]
    fn custom_profile_interpolates() {
        let samples = vec![[0.0, 1.0, 0.0], [0.5, 0.5, -0.25], [1.0, 0.0, 0.0]];
        let profile = InitialProfile::Custom { samples };
        assert_relative_eq!(profile.density_at(0.25, 1.0), 0.75);
        assert_relative_eq!(profile.velocity_at(0.75, 1.0), -0.125);
        let grid = RadialGrid::new(32, 1.0, 1).unwrap();
        let state = make_initial_state(&profile, &grid).unwrap();
        assert!(state.rho.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn hypotheses_on_sine_profile() {
        let grid = RadialGrid::new(512, 1.0, 1).unwrap();
        let params = ModelParams::new(3, 1, 0.0, 1.4, 1.0, 1.0).unwrap();
        let profile = InitialProfile::SineVelocity {
            velocity_amplitude: 1.0,
            density_amplitude: 1e-3,
            density_taper: 0.1,
        };
        let state = make_initial_state(&profile, &grid).unwrap();
        let report = validate_hypotheses(&params, &state, &grid);
        assert!(report.applicable);
        assert!(report.reasons.is_empty());
        // H0 = int_0^1 r sin(pi r) dr = 1/pi, midpoint quadrature is
        // second order.
        assert_relative_eq!(report.h0, 1.0 / PI, max_relative = 1e-4);
    }

    #[test]
    fn hypotheses_report_attractive_force() {
        let grid = RadialGrid::new(64, 1.0, 1).unwrap();
        let params = ModelParams::new(3, -1, 0.0, 1.4, 1.0, 1.0).unwrap();
        let profile = InitialProfile::SineVelocity {
            velocity_amplitude: 1.0,
            density_amplitude: 1.0,
            density_taper: 0.1,
        };
        let state = make_initial_state(&profile, &grid).unwrap();
        let report = validate_hypotheses(&params, &state, &grid);
        assert!(!report.applicable);
        assert!(report.reasons.iter().any(|r| r.contains("delta")));
    }

    #[test]
    fn hypotheses_never_fail_on_zero_moment() {
        let grid = RadialGrid::new(64, 1.0, 1).unwrap();
        let params = ModelParams::new(3, 0, 0.0, 1.4, 1.0, 1.0).unwrap();
        let profile = InitialProfile::PolyBumpDensity {
            amplitude: 1.0,
            support_radius: 1.0,
        };
        let state = make_initial_state(&profile, &grid).unwrap();
        let report = validate_hypotheses(&params, &state, &grid);
        assert_eq!(report.h0, 0.0);
        assert!(!report.applicable);
    }

    #[test]
    fn theorem_applicability_matrix() {
        let make = |delta, k, gamma| ModelParams::new(3, delta, k, gamma, 1.0, 1.0).unwrap();
        assert!(make(1, 0.0, 1.0).theorem_applicable());
        assert!(make(0, 0.0, 1.4).theorem_applicable());
        assert!(make(1, 0.5, 1.4).theorem_applicable());
        assert!(!make(-1, 0.0, 1.4).theorem_applicable());
        assert!(!make(1, 0.5, 1.0).theorem_applicable());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0, 1, 0.0, 1.4, 1.0, 1.0).is_err());
        assert!(ModelParams::new(3, 2, 0.0, 1.4, 1.0, 1.0).is_err());
        assert!(ModelParams::new(3, 1, -0.1, 1.4, 1.0, 1.0).is_err());
        assert!(ModelParams::new(3, 1, 0.0, 0.9, 1.0, 1.0).is_err());
        assert!(ModelParams::new(3, 1, 0.0, 1.4, 0.0, 1.0).is_err());
        assert!(ModelParams::new(3, 1, 0.0, 1.4, 1.0, 0.0).is_err());
    }
}
