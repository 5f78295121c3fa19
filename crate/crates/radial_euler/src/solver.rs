//! First-order finite-volume integrator for the radial system.
//!
//! Continuity is advanced in geometric conservative form,
//! `(r^(N-1) rho)_t + (r^(N-1) rho V)_r = 0` divided by `r^(N-1)`, with
//! Rusanov (local Lax-Friedrichs) interface fluxes, so the total geometric
//! mass telescopes to the boundary fluxes exactly. Momentum keeps the
//! pressure gradient as a central difference and treats the geometric term
//! and the self-force as explicit cell-center sources. Time stepping is
//! forward Euler under a CFL bound.

use crate::error::{Error, Result};
use crate::field::radial_field;
use crate::model::{FluidState, ModelParams, RadialGrid};

/// Fraction of the initial maximum density a wall cell must *gain over its
/// starting value* before the boundary-contact flag fires. Measuring growth
/// rather than an absolute level keeps a thin initial tail near the wall from
/// tripping the flag at t = 0; only genuine accumulation counts.
const SUPPORT_TRACK_REL: f64 = 1e-3;

/// Number of outermost cells watched by the boundary-contact flag.
const SUPPORT_BAND: usize = 2;

/// Tunables of the explicit scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    /// CFL number in (0, 1].
    pub cfl: f64,
    /// Density floor as a fraction of the initial maximum density.
    pub density_floor: f64,
    /// Upper bound for dt, also used when the signal speed vanishes.
    pub max_dt: f64,
    /// Unclamped dt below this value signals a dt-underflow blowup proxy.
    pub min_dt: f64,
    /// Gradient proxy threshold as a multiple of the initial max |dV/dr|.
    pub gradient_threshold_factor: f64,
    /// Absolute gradient threshold; overrides the factor when set.
    pub gradient_threshold: Option<f64>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            cfl: 0.5,
            density_floor: 1e-12,
            max_dt: 1e-2,
            min_dt: 1e-12,
            gradient_threshold_factor: 1e3,
            gradient_threshold: None,
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::config("cfl", format!("{} not in (0, 1]", self.cfl)));
        }
        if !(self.density_floor >= 0.0) {
            return Err(Error::config("density_floor", "must be nonnegative"));
        }
        if !(self.min_dt > 0.0 && self.max_dt > self.min_dt) {
            return Err(Error::config(
                "min_dt/max_dt",
                format!("need 0 < min_dt < max_dt, got {} / {}", self.min_dt, self.max_dt),
            ));
        }
        if !(self.gradient_threshold_factor > 0.0) {
            return Err(Error::config("gradient_threshold_factor", "must be positive"));
        }
        if let Some(g) = self.gradient_threshold {
            if !(g > 0.0) {
                return Err(Error::config("gradient_threshold", "must be positive"));
            }
        }
        Ok(())
    }

    /// Absolute gradient threshold for a run whose initial max |dV/dr| is
    /// `initial_gradient`. Zero initial gradient with no absolute override
    /// disables the proxy.
    pub fn resolve_gradient_threshold(&self, initial_gradient: f64) -> f64 {
        match self.gradient_threshold {
            Some(g) => g,
            None if initial_gradient > 0.0 => self.gradient_threshold_factor * initial_gradient,
            None => f64::INFINITY,
        }
    }
}

/// Adiabatic sound speed `sqrt(K gamma rho^(gamma-1))`; zero for K = 0.
pub fn sound_speed(rho: f64, k: f64, gamma: f64) -> f64 {
    debug_assert!(rho >= 0.0);
    if k == 0.0 {
        0.0
    } else {
        (k * gamma * rho.powf(gamma - 1.0)).sqrt()
    }
}

/// Result of the CFL time-step computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtOutcome {
    Dt(f64),
    /// The unclamped dt fell below `min_dt`: the blowup proxy, not an error.
    Underflow { unclamped: f64 },
}

/// `dt = cfl * dr / max_i(|V_i| + c_i)`, clamped to `max_dt`;
/// `max_dt` directly when no signal propagates.
pub fn cfl_dt(
    state: &FluidState,
    grid: &RadialGrid,
    params: &ModelParams,
    scheme: &SchemeConfig,
) -> DtOutcome {
    let k = params.pressure_constant;
    let gamma = params.adiabatic_exponent;
    let mut signal = 0.0f64;
    for (&rho, &v) in state.rho.iter().zip(&state.velocity) {
        signal = signal.max(v.abs() + sound_speed(rho, k, gamma));
    }
    if signal == 0.0 {
        return DtOutcome::Dt(scheme.max_dt);
    }
    let dt = scheme.cfl * grid.spacing() / signal;
    if dt < scheme.min_dt {
        DtOutcome::Underflow { unclamped: dt }
    } else {
        DtOutcome::Dt(dt.min(scheme.max_dt))
    }
}

/// Floor bookkeeping for one step or one run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FloorStats {
    /// Cells whose state the floor changed (negative clip or momentum zeroed).
    pub activations: u64,
    /// Geometric mass added by clipping negative densities to zero.
    pub mass_injected: f64,
}

impl FloorStats {
    fn absorb(&mut self, other: FloorStats) {
        self.activations += other.activations;
        self.mass_injected += other.mass_injected;
    }
}

/// Absolute density floor for a run starting from `state`.
pub fn floor_for(scheme: &SchemeConfig, state: &FluidState) -> f64 {
    scheme.density_floor * state.rho.iter().cloned().fold(0.0, f64::max)
}

/// One forward-Euler step of size `dt`.
///
/// Both ends of the domain are impermeable. Ghost cells mirror the interior
/// state (`rho` even, `V` odd) below the origin and beyond the rigid no-slip
/// wall at `R`: the mirrored Riemann problem has zero mass flux through each
/// end face, and at the wall its momentum flux is the normal force that
/// brings arriving fluid to rest. Cells ending below the absolute floor
/// `floor_abs` keep their density but lose their momentum; negative densities
/// are clipped to zero and the injected mass recorded.
pub fn step(
    state: &FluidState,
    grid: &RadialGrid,
    params: &ModelParams,
    floor_abs: f64,
    dt: f64,
) -> Result<(FluidState, FloorStats)> {
    let m = grid.cells();
    debug_assert_eq!(state.cells(), m);
    let dr = grid.spacing();
    let exp = params.dimension as i32 - 1;
    let k = params.pressure_constant;
    let gamma = params.adiabatic_exponent;

    // Padded copies with one ghost cell per side; all stencils are width 3.
    let mut rho_p = Vec::with_capacity(m + 2);
    let mut v_p = Vec::with_capacity(m + 2);
    rho_p.push(state.rho[0]);
    v_p.push(-state.velocity[0]);
    rho_p.extend_from_slice(&state.rho);
    v_p.extend_from_slice(&state.velocity);
    rho_p.push(state.rho[m - 1]);
    v_p.push(-state.velocity[m - 1]);
    let mom_p: Vec<f64> = rho_p.iter().zip(&v_p).map(|(r, v)| r * v).collect();
    let pre_p: Vec<f64> = rho_p
        .iter()
        .map(|&r| if k == 0.0 { 0.0 } else { k * r.powf(gamma) })
        .collect();

    let phi = radial_field(grid, &state.rho, params)?.phi_r;

    // Rusanov fluxes at the m + 1 faces; continuity carries the geometric
    // face factor, momentum stays flat and gets a center source instead.
    let mut flux_rho = Vec::with_capacity(m + 1);
    let mut flux_mom = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let (l, r) = (j, j + 1);
        let a = (v_p[l].abs() + sound_speed(rho_p[l], k, gamma))
            .max(v_p[r].abs() + sound_speed(rho_p[r], k, gamma));
        let f_rho = 0.5 * (rho_p[l] * v_p[l] + rho_p[r] * v_p[r]) - 0.5 * a * (rho_p[r] - rho_p[l]);
        let f_mom = 0.5 * (mom_p[l] * v_p[l] + mom_p[r] * v_p[r]) - 0.5 * a * (mom_p[r] - mom_p[l]);
        let face_geom = (j as f64 * dr).powi(exp);
        flux_rho.push(face_geom * f_rho);
        flux_mom.push(f_mom);
    }

    let mut rho_new = Vec::with_capacity(m);
    let mut v_new = Vec::with_capacity(m);
    let mut stats = FloorStats::default();
    let geo_coeff = f64::from(params.dimension - 1);
    for i in 0..m {
        let r = grid.center(i);
        let r_geom = r.powi(exp);
        let p = i + 1;
        let mut rho = state.rho[i] - dt * (flux_rho[i + 1] - flux_rho[i]) / (r_geom * dr);
        let pressure_grad = (pre_p[p + 1] - pre_p[p - 1]) / (2.0 * dr);
        let geometric = geo_coeff * state.rho[i] * state.velocity[i] * state.velocity[i] / r;
        let mom = mom_p[p]
            - dt * ((flux_mom[i + 1] - flux_mom[i]) / dr + geometric + pressure_grad
                - state.rho[i] * phi[i]);
        if !rho.is_finite() {
            return Err(Error::NumericalOverflow {
                time: state.time,
                cell: i,
                quantity: "density",
            });
        }
        if !mom.is_finite() {
            return Err(Error::NumericalOverflow {
                time: state.time,
                cell: i,
                quantity: "momentum",
            });
        }
        if rho < 0.0 {
            stats.activations += 1;
            stats.mass_injected += -rho * r_geom * dr;
            rho = 0.0;
        }
        let v = if rho > 0.0 && rho >= floor_abs {
            mom / rho
        } else {
            if mom != 0.0 {
                stats.activations += 1;
            }
            0.0
        };
        if !v.is_finite() {
            return Err(Error::NumericalOverflow {
                time: state.time,
                cell: i,
                quantity: "velocity",
            });
        }
        rho_new.push(rho);
        v_new.push(v);
    }

    Ok((
        FluidState {
            time: state.time + dt,
            rho: rho_new,
            velocity: v_new,
        },
        stats,
    ))
}

/// Max |dV/dr| over adjacent interior cells.
pub fn max_gradient(velocity: &[f64], dr: f64) -> f64 {
    velocity
        .windows(2)
        .map(|w| (w[1] - w[0]).abs() / dr)
        .fold(0.0, f64::max)
}

/// Why a run stopped.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    ReachedTMax,
    BlowupDetected { time: f64, mechanism: Mechanism },
    DtUnderflow { time: f64 },
    NumericalOverflow { time: f64, cell: usize },
}

impl Termination {
    pub fn reason(&self) -> &'static str {
        match self {
            Termination::ReachedTMax => "reached_t_max",
            Termination::BlowupDetected { .. } => "blowup_detected",
            Termination::DtUnderflow { .. } => "dt_underflow",
            Termination::NumericalOverflow { .. } => "invariant_violation",
        }
    }
}

/// Blowup-proxy mechanisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    Gradient,
    DtUnderflow,
    NonFinite,
}

impl Mechanism {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mechanism::Gradient => "gradient",
            Mechanism::DtUnderflow => "dt_underflow",
            Mechanism::NonFinite => "non_finite",
        }
    }
}

/// A completed run: snapshots plus termination metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<FluidState>,
    pub termination: Termination,
    /// First time the outermost cells gained appreciable density over their
    /// initial values, if ever (bulk mass arriving at the rigid wall).
    pub support_reached_boundary: Option<f64>,
    pub steps: u64,
    pub floor: FloorStats,
    /// Max |dV/dr| of the initial data.
    pub initial_max_gradient: f64,
    /// Absolute gradient threshold the run used.
    pub gradient_threshold: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    pub fn final_state(&self) -> &FluidState {
        self.snapshots.last().expect("run records at least t = 0")
    }
}

/// Integrate from `state0` until `t_max`, a blowup proxy, or breakdown.
///
/// Snapshots are recorded at `t = 0`, then every `snapshot_cadence` time
/// units (every step when the cadence is zero), and always at the final
/// state. Identical inputs produce bit-identical trajectories.
pub fn run(
    state0: &FluidState,
    grid: &RadialGrid,
    params: &ModelParams,
    scheme: &SchemeConfig,
    t_max: f64,
    snapshot_cadence: f64,
) -> Result<Trajectory> {
    params.validate()?;
    scheme.validate()?;
    if state0.cells() != grid.cells() {
        return Err(Error::InvalidState(format!(
            "state has {} cells, grid has {}",
            state0.cells(),
            grid.cells()
        )));
    }
    if !(t_max >= 0.0) || !(snapshot_cadence >= 0.0) {
        return Err(Error::config(
            "t_max/snapshot_cadence",
            "must be nonnegative",
        ));
    }

    let floor_abs = floor_for(scheme, state0);
    let support_thresh = SUPPORT_TRACK_REL * state0.rho.iter().cloned().fold(0.0, f64::max);
    let band_start = grid.cells().saturating_sub(SUPPORT_BAND);
    let band_baseline: Vec<f64> = state0.rho[band_start..].to_vec();
    let support_hit = |s: &FluidState| {
        s.rho[band_start..]
            .iter()
            .zip(&band_baseline)
            .any(|(&x, &base)| x - base > support_thresh)
    };

    let initial_max_gradient = max_gradient(&state0.velocity, grid.spacing());
    let threshold = scheme.resolve_gradient_threshold(initial_max_gradient);

    let mut state = state0.clone();
    state.time = 0.0;
    let mut snapshots = vec![state.clone()];
    let mut support_reached = None;
    let mut floor = FloorStats::default();
    let mut steps = 0u64;
    let mut next_snapshot = snapshot_cadence;
    let mut termination = None;

    while state.time < t_max {
        let dt = match cfl_dt(&state, grid, params, scheme) {
            DtOutcome::Dt(dt) => dt.min(t_max - state.time),
            DtOutcome::Underflow { .. } => {
                termination = Some(Termination::DtUnderflow { time: state.time });
                break;
            }
        };
        if dt <= 0.0 {
            break;
        }
        match step(&state, grid, params, floor_abs, dt) {
            Ok((next, step_stats)) => {
                floor.absorb(step_stats);
                state = next;
            }
            Err(Error::NumericalOverflow { time, cell, .. }) => {
                termination = Some(Termination::NumericalOverflow { time, cell });
                break;
            }
            Err(other) => return Err(other),
        }
        steps += 1;

        if support_reached.is_none() && support_hit(&state) {
            support_reached = Some(state.time);
        }

        if max_gradient(&state.velocity, grid.spacing()) > threshold {
            snapshots.push(state.clone());
            termination = Some(Termination::BlowupDetected {
                time: state.time,
                mechanism: Mechanism::Gradient,
            });
            break;
        }

        if snapshot_cadence == 0.0 {
            snapshots.push(state.clone());
        } else if state.time >= next_snapshot {
            snapshots.push(state.clone());
            while next_snapshot <= state.time {
                next_snapshot += snapshot_cadence;
            }
        }
    }

    let termination = termination.unwrap_or(Termination::ReachedTMax);
    if snapshots
        .last()
        .map(|s| s.time < state.time)
        .unwrap_or(true)
    {
        snapshots.push(state.clone());
    }

    Ok(Trajectory {
        snapshots,
        termination,
        support_reached_boundary: support_reached,
        steps,
        floor,
        initial_max_gradient,
        gradient_threshold: threshold,
    })
}
