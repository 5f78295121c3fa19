//! Independent shell-characteristics oracle for pressureless flow.
//!
//! With K = 0 each fluid shell obeys an ODE in which the only coupling is
//! the (conserved) mass enclosed beneath it:
//!
//! ```text
//! dr_j/dt = V_j,      dV_j/dt = alpha(N) * delta * m_j / r_j^(N-1),
//! ```
//!
//! valid until two shells cross. The first crossing time is an independent
//! prediction of the blowup time that the finite-volume solver can be
//! checked against. Only `delta in {0, +1}` is supported: the attractive
//! case can funnel shells through the origin, where the frozen-mass picture
//! stops making sense.

use crate::error::{Error, Result};
use crate::field::enclosed_at_centers;
use crate::model::{FluidState, ModelParams, RadialGrid};

/// Steps per free-streaming crossing estimate used for the default dt.
const DEFAULT_RESOLUTION: f64 = 1e4;

/// Bisection iterations when localizing an event inside one step.
const BISECTION_ITERS: u32 = 80;

/// What the fan ran into first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FanOutcome {
    /// Two adjacent shells met at this time.
    Crossing(f64),
    /// A shell reached the origin at this time.
    OriginCollapse(f64),
    /// Nothing happened before `t_max`.
    NoEvent,
}

impl FanOutcome {
    pub fn event_time(&self) -> Option<f64> {
        match *self {
            FanOutcome::Crossing(t) | FanOutcome::OriginCollapse(t) => Some(t),
            FanOutcome::NoEvent => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            FanOutcome::Crossing(_) => "crossing",
            FanOutcome::OriginCollapse(_) => "origin_collapse",
            FanOutcome::NoEvent => "no_event",
        }
    }
}

/// Final record of an evolved shell fan.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicFan {
    pub outcome: FanOutcome,
    /// Shell radii at t = 0 (cell centers).
    pub initial_radii: Vec<f64>,
    /// Frozen enclosed mass under each shell.
    pub enclosed: Vec<f64>,
    /// Shell radii when the evolution stopped.
    pub positions: Vec<f64>,
    /// Shell velocities when the evolution stopped.
    pub velocities: Vec<f64>,
    /// Time at which the evolution stopped.
    pub elapsed: f64,
    pub steps: u64,
}

/// Free-streaming crossing estimate: the minimum of `-dr / dV` over adjacent
/// shell pairs that approach each other (`dV < 0`). `None` when every pair
/// separates. This is exact for `delta = 0`.
pub fn crossing_time_free(radii: &[f64], velocities: &[f64]) -> Result<Option<f64>> {
    if radii.len() < 2 {
        return Err(Error::InsufficientShells(radii.len()));
    }
    if radii.len() != velocities.len() {
        return Err(Error::InvalidState(format!(
            "{} radii vs {} velocities",
            radii.len(),
            velocities.len()
        )));
    }
    let mut best: Option<f64> = None;
    for j in 0..radii.len() - 1 {
        let dv = velocities[j + 1] - velocities[j];
        if dv < 0.0 {
            let t = -(radii[j + 1] - radii[j]) / dv;
            best = Some(best.map_or(t, |b| b.min(t)));
        }
    }
    Ok(best)
}

/// One RK4 step of the shell system, in place on `(r, v)`.
///
/// Force evaluation guards `r <= 0`: a stage that momentarily probes beyond
/// the origin contributes no force there, and the event detection at step
/// boundaries reports the collapse before the guard can matter dynamically.
fn rk4_step(r: &mut [f64], v: &mut [f64], mass: &[f64], coupling: f64, exponent: i32, dt: f64) {
    let n = r.len();
    let accel = |r: &[f64], out: &mut Vec<f64>| {
        out.clear();
        for j in 0..n {
            let a = if coupling == 0.0 || mass[j] == 0.0 || r[j] <= 0.0 {
                0.0
            } else {
                coupling * mass[j] / r[j].powi(exponent)
            };
            out.push(a);
        }
    };
    let mut a1 = Vec::with_capacity(n);
    let mut a2 = Vec::with_capacity(n);
    let mut a3 = Vec::with_capacity(n);
    let mut a4 = Vec::with_capacity(n);
    let mut rs = vec![0.0; n];
    let mut vs = vec![0.0; n];

    // k1
    accel(r, &mut a1);
    // k2 at midpoint
    for j in 0..n {
        rs[j] = r[j] + 0.5 * dt * v[j];
        vs[j] = v[j] + 0.5 * dt * a1[j];
    }
    accel(&rs, &mut a2);
    let v2 = vs.clone();
    // k3 at midpoint
    for j in 0..n {
        rs[j] = r[j] + 0.5 * dt * v2[j];
        vs[j] = v[j] + 0.5 * dt * a2[j];
    }
    accel(&rs, &mut a3);
    let v3 = vs.clone();
    // k4 at endpoint
    for j in 0..n {
        rs[j] = r[j] + dt * v3[j];
        vs[j] = v[j] + dt * a3[j];
    }
    accel(&rs, &mut a4);
    let v4 = vs;

    for j in 0..n {
        r[j] += dt / 6.0 * (v[j] + 2.0 * v2[j] + 2.0 * v3[j] + v4[j]);
        v[j] += dt / 6.0 * (a1[j] + 2.0 * a2[j] + 2.0 * a3[j] + a4[j]);
    }
}

fn min_radius(r: &[f64]) -> f64 {
    r.iter().cloned().fold(f64::INFINITY, f64::min)
}

fn min_gap(r: &[f64]) -> f64 {
    r.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Bisect the first time in `(0, dt]` at which `event` becomes nonpositive,
/// stepping with RK4 from `(r0, v0)`.
fn locate_event<F: Fn(&[f64]) -> f64>(
    r0: &[f64],
    v0: &[f64],
    mass: &[f64],
    coupling: f64,
    exponent: i32,
    dt: f64,
    event: F,
) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = dt;
    let mut r = r0.to_vec();
    let mut v = v0.to_vec();
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        r.copy_from_slice(r0);
        v.copy_from_slice(v0);
        rk4_step(&mut r, &mut v, mass, coupling, exponent, mid);
        if event(&r) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Evolve the shell fan until a crossing, an origin collapse, or `t_max`.
///
/// `dt` defaults to the free-streaming crossing estimate (or `t_max` when
/// every pair separates) divided by 10^4. Requires `K = 0` and
/// `delta in {0, +1}`; anything else returns `OracleNotApplicable`.
pub fn evolve_fan(
    state: &FluidState,
    grid: &RadialGrid,
    params: &ModelParams,
    dt: Option<f64>,
    t_max: f64,
) -> Result<CharacteristicFan> {
    if params.pressure_constant != 0.0 {
        return Err(Error::OracleNotApplicable(format!(
            "pressure constant K = {} (shell characteristics require K = 0)",
            params.pressure_constant
        )));
    }
    if params.delta < 0 {
        return Err(Error::OracleNotApplicable(
            "delta = -1: attractive force can pull shells through the origin".into(),
        ));
    }
    if state.cells() != grid.cells() {
        return Err(Error::InvalidState(format!(
            "state has {} cells, grid has {}",
            state.cells(),
            grid.cells()
        )));
    }
    if !(t_max > 0.0) {
        return Err(Error::config("t_max", "must be positive"));
    }
    if let Some(d) = dt {
        if !(d > 0.0) {
            return Err(Error::config("oracle dt", "must be positive"));
        }
    }

    let initial_radii: Vec<f64> = grid.centers().collect();
    let mass = enclosed_at_centers(grid, &state.rho, params.dimension)?;
    let coupling = params.field_coupling()?;
    let exponent = params.dimension as i32 - 1;

    let free = crossing_time_free(&initial_radii, &state.velocity)?;
    let dt = dt
        .unwrap_or_else(|| free.unwrap_or(t_max).min(t_max) / DEFAULT_RESOLUTION)
        .min(t_max);

    let mut r = initial_radii.clone();
    let mut v = state.velocity.clone();
    let mut t = 0.0f64;
    let mut steps = 0u64;
    let outcome = loop {
        if t >= t_max {
            break FanOutcome::NoEvent;
        }
        let h = dt.min(t_max - t);
        let r_prev = r.clone();
        let v_prev = v.clone();
        rk4_step(&mut r, &mut v, &mass, coupling, exponent, h);
        steps += 1;

        let collapsed = min_radius(&r) <= 0.0;
        let crossed = min_gap(&r) <= 0.0;
        if collapsed || crossed {
            let tau_collapse = collapsed
                .then(|| locate_event(&r_prev, &v_prev, &mass, coupling, exponent, h, min_radius));
            let tau_cross = crossed
                .then(|| locate_event(&r_prev, &v_prev, &mass, coupling, exponent, h, min_gap));
            let (tau, outcome) = match (tau_collapse, tau_cross) {
                (Some(tc), Some(tx)) if tc <= tx => (tc, FanOutcome::OriginCollapse(t + tc)),
                (Some(tc), None) => (tc, FanOutcome::OriginCollapse(t + tc)),
                (_, Some(tx)) => (tx, FanOutcome::Crossing(t + tx)),
                (None, None) => unreachable!(),
            };
            // Leave the fan at the event time itself, not the overshoot.
            r.copy_from_slice(&r_prev);
            v.copy_from_slice(&v_prev);
            rk4_step(&mut r, &mut v, &mass, coupling, exponent, tau);
            break outcome;
        }
        t += h;
    };

    let elapsed = outcome.event_time().unwrap_or(t);
    Ok(CharacteristicFan {
        outcome,
        initial_radii,
        enclosed: mass,
        positions: r,
        velocities: v,
        elapsed,
        steps,
    })
}
