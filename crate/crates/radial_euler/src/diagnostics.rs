//! Weighted-moment functional, blowup-time bound, Riccati floor, and the
//! numerical audits of every inequality the blowup argument rests on.
//!
//! The central object is the moment `H(t) = int_0^R r^n V(t, r) dr` with a
//! fixed exponent `n > 0`. For the repulsive or force-free system with
//! vanishing or super-isothermal pressure, a smooth flow obeys
//!
//! ```text
//! dH/dt >= n (n+1) H^2 / (2 R^(n+2)),
//! ```
//!
//! so a positive `H(0)` forces `H` to diverge no later than
//! `T = 2 R^(n+2) / (n (n+1) H(0))`, with the running lower envelope
//! `H(t) >= H(0) / (1 - t/T)`. The audits in this module check, on actual
//! solver output, each ingredient of that chain: the Cauchy-Schwarz step,
//! the boundary terms discarded by integration by parts, and the
//! differential inequality itself.

use crate::error::{Error, Result};
use crate::model::{validate_hypotheses, FluidState, HypothesisReport, ModelParams, RadialGrid};
use crate::solver::{max_gradient, Mechanism, Termination, Trajectory};

/// Relative slack allowed when checking `H(t) >= floor(t)`.
pub const FLOOR_TOLERANCE: f64 = 0.02;

/// Relative slack allowed when checking `detected <= T`.
pub const BOUND_TOLERANCE: f64 = 0.05;

/// Cauchy-Schwarz slack must stay above `-CS_SLACK_GATE * scale`.
pub const CS_SLACK_GATE: f64 = 1e-12;

/// Both boundary terms must stay at or below this.
pub const BOUNDARY_GATE: f64 = 1e-10;

/// Weighted moment `H = sum_i r_i^n V_i dr` (midpoint quadrature).
pub fn weighted_moment(state: &FluidState, grid: &RadialGrid, n: f64) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidExponent(n));
    }
    if state.cells() != grid.cells() {
        return Err(Error::InvalidState(format!(
            "state has {} cells, grid has {}",
            state.cells(),
            grid.cells()
        )));
    }
    let dr = grid.spacing();
    Ok(state
        .velocity
        .iter()
        .enumerate()
        .map(|(i, &v)| grid.center(i).powf(n) * v * dr)
        .sum())
}

/// Latest possible blowup time `T = 2 R^(n+2) / (n (n+1) H0)`.
pub fn blowup_bound(radius: f64, n: f64, h0: f64) -> Result<f64> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidExponent(n));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::config("radius", format!("{radius} must be positive")));
    }
    if !(h0 > 0.0) {
        return Err(Error::HypothesisViolated { h0 });
    }
    Ok(2.0 * radius.powf(n + 2.0) / (n * (n + 1.0) * h0))
}

/// Running lower envelope `H0 / (1 - t/T)`, valid on `0 <= t < T`.
///
/// Strictly increasing in `t`, equal to `H0` at `t = 0` (exactly: the
/// denominator is the literal `1.0`), and divergent as `t -> T`.
pub fn riccati_floor(t: f64, radius: f64, n: f64, h0: f64) -> Result<f64> {
    let bound = blowup_bound(radius, n, h0)?;
    if !(t >= 0.0) || t >= bound {
        return Err(Error::FloorDomain { t, limit: bound });
    }
    let q = n * (n + 1.0) * h0 * t / (2.0 * radius.powf(n + 2.0));
    Ok(h0 / (1.0 - q))
}

/// Outcome of the discrete Cauchy-Schwarz check at one snapshot.
///
/// With weights `w_i = (n+1) r_i^n dr` the inequality
/// `(sum w_i V_i)^2 <= (sum w_i)(sum w_i V_i^2)` holds for *any* vector, so
/// `slack` is nonnegative up to floating-point roundoff no matter what the
/// solver produced. The continuum argument then replaces `sum w_i` by
/// `R^(n+1)`; `weight_defect` reports how far the quadrature is from that
/// replacement (it vanishes under refinement but has either sign at finite
/// resolution, so it is kept out of the machine-precision gate).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySchwarzAudit {
    /// `(sum w)(sum w V^2) - (sum w V)^2`.
    pub slack: f64,
    /// `sum w_i`.
    pub weight_total: f64,
    /// `R^(n+1)`, the continuum value of `weight_total`.
    pub weight_bound: f64,
    /// `R^(n+1) - weight_total`.
    pub weight_defect: f64,
    /// `slack >= -CS_SLACK_GATE * scale`.
    pub pass: bool,
}

impl CauchySchwarzAudit {
    /// Magnitude both sides of the inequality live at.
    pub fn scale(&self) -> f64 {
        1.0f64.max(self.slack.abs())
    }
}

/// Evaluate the discrete Cauchy-Schwarz identity at one snapshot.
pub fn cauchy_schwarz_audit(
    state: &FluidState,
    grid: &RadialGrid,
    n: f64,
) -> Result<CauchySchwarzAudit> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidExponent(n));
    }
    if state.cells() != grid.cells() {
        return Err(Error::InvalidState(format!(
            "state has {} cells, grid has {}",
            state.cells(),
            grid.cells()
        )));
    }
    let dr = grid.spacing();
    let mut weight_total = 0.0;
    let mut linear = 0.0;
    let mut quadratic = 0.0;
    for (i, &v) in state.velocity.iter().enumerate() {
        let w = (n + 1.0) * grid.center(i).powf(n) * dr;
        weight_total += w;
        linear += w * v;
        quadratic += w * v * v;
    }
    let lhs = weight_total * quadratic;
    let rhs = linear * linear;
    let slack = lhs - rhs;
    let scale = 1.0f64.max(lhs.abs()).max(rhs.abs());
    let weight_bound = grid.radius().powf(n + 1.0);
    Ok(CauchySchwarzAudit {
        slack,
        weight_total,
        weight_bound,
        weight_defect: weight_bound - weight_total,
        pass: slack >= -CS_SLACK_GATE * scale,
    })
}

/// The two boundary terms discarded when the moment identity is integrated
/// by parts: the kinetic trace `R^n V(R)^2` and the enthalpy trace
/// `(K gamma / (gamma - 1)) R^n rho(R)^(gamma-1)`.
///
/// For `K = 0` the enthalpy trace is identically zero whatever `gamma` is;
/// for `K > 0` the formula needs `gamma > 1` (the isothermal enthalpy has no
/// power-law form, and the blowup argument excludes that case anyway).
pub fn boundary_terms(
    v_edge: f64,
    rho_edge: f64,
    params: &ModelParams,
    n: f64,
) -> Result<(f64, f64)> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidExponent(n));
    }
    if rho_edge < 0.0 {
        return Err(Error::NegativeDensity {
            value: rho_edge,
            cell: None,
        });
    }
    let k = params.pressure_constant;
    let gamma = params.adiabatic_exponent;
    let geometry = params.domain_radius.powf(n);
    let kinetic = geometry * v_edge * v_edge;
    let internal = if k == 0.0 {
        0.0
    } else if gamma > 1.0 {
        k * gamma / (gamma - 1.0) * geometry * rho_edge.powf(gamma - 1.0)
    } else {
        return Err(Error::Consistency(format!(
            "boundary enthalpy trace undefined for K = {k} with gamma = {gamma}"
        )));
    };
    Ok((kinetic, internal))
}

/// Boundary-term audit of one snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryAudit {
    pub kinetic: f64,
    pub internal: f64,
    pub pass: bool,
}

/// Audit the no-slip closure the moment identity relies on.
///
/// The solver never stores values at `r = R` itself; what the update sees
/// beyond the wall is the enforced ghost closure, exposed by
/// [`FluidState::noslip_trace`]. Auditing that trace checks the condition
/// the scheme actually imposes, independent of interior steepening.
pub fn boundary_term_audit(
    state: &FluidState,
    params: &ModelParams,
    n: f64,
) -> Result<BoundaryAudit> {
    let (v_edge, rho_edge) = state.noslip_trace();
    let (kinetic, internal) = boundary_terms(v_edge, rho_edge, params, n)?;
    Ok(BoundaryAudit {
        kinetic,
        internal,
        pass: kinetic <= BOUNDARY_GATE && internal <= BOUNDARY_GATE,
    })
}

/// One interior sample of the moment-inequality audit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentResidual {
    pub time: f64,
    pub moment: f64,
    pub dh_dt: f64,
    /// `dH/dt - n (n+1) H^2 / (2 R^(n+2))`; the inequality wants this `>= 0`.
    pub residual: f64,
    /// Discretization allowance `audit_tolerance * max(1, H^2)`.
    pub tolerance: f64,
}

/// Result of auditing `dH/dt >= n (n+1) H^2 / (2 R^(n+2))` along a run.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentAudit {
    Checked {
        /// Interior samples audited.
        samples: usize,
        /// Most negative residual seen.
        worst_residual: f64,
        /// Time of the most negative residual.
        worst_time: f64,
        /// `min_k (residual_k + tolerance_k)`; pass means this is `>= 0`.
        min_margin: f64,
        pass: bool,
    },
    Skipped {
        reason: String,
    },
}

impl MomentAudit {
    pub fn passed_or_skipped(&self) -> bool {
        match self {
            MomentAudit::Checked { pass, .. } => *pass,
            MomentAudit::Skipped { .. } => true,
        }
    }
}

/// Audit the moment differential inequality on a sampled `H(t)`.
///
/// `dH/dt` comes from a three-point centered difference that allows uneven
/// snapshot spacing; each interior sample must satisfy
/// `residual >= -audit_tolerance * max(1, H^2)`. Runs outside the theorem's
/// scope (attraction, isothermal pressure) and runs with fewer than three
/// snapshots produce a [`MomentAudit::Skipped`] marker, never a failure.
pub fn moment_inequality_audit(
    times: &[f64],
    moments: &[f64],
    radius: f64,
    n: f64,
    params: &ModelParams,
    audit_tolerance: f64,
) -> Result<MomentAudit> {
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::InvalidExponent(n));
    }
    if times.len() != moments.len() {
        return Err(Error::Consistency(format!(
            "{} times vs {} moment samples",
            times.len(),
            moments.len()
        )));
    }
    if !(audit_tolerance >= 0.0) {
        return Err(Error::config("audit_tolerance", "must be nonnegative"));
    }
    if !params.theorem_applicable() {
        return Ok(MomentAudit::Skipped {
            reason: format!(
                "hypotheses not applicable: delta = {}, K = {}, gamma = {}",
                params.delta, params.pressure_constant, params.adiabatic_exponent
            ),
        });
    }
    if times.len() < 3 {
        return Ok(MomentAudit::Skipped {
            reason: format!("{} snapshots; the audit needs at least 3", times.len()),
        });
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Consistency(
            "snapshot times must be strictly increasing".into(),
        ));
    }

    let coeff = n * (n + 1.0) / (2.0 * radius.powf(n + 2.0));
    let mut worst_residual = f64::INFINITY;
    let mut worst_time = times[0];
    let mut min_margin = f64::INFINITY;
    let mut samples = 0usize;
    for k in 1..times.len() - 1 {
        let h1 = times[k] - times[k - 1];
        let h2 = times[k + 1] - times[k];
        let dh_dt = (h1 * h1 * moments[k + 1] - h2 * h2 * moments[k - 1]
            + (h2 * h2 - h1 * h1) * moments[k])
            / (h1 * h2 * (h1 + h2));
        let h = moments[k];
        let residual = dh_dt - coeff * h * h;
        let tolerance = audit_tolerance * 1.0f64.max(h * h);
        if residual < worst_residual {
            worst_residual = residual;
            worst_time = times[k];
        }
        min_margin = min_margin.min(residual + tolerance);
        samples += 1;
    }
    Ok(MomentAudit::Checked {
        samples,
        worst_residual,
        worst_time,
        min_margin,
        pass: min_margin >= 0.0,
    })
}

/// A fired blowup proxy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub time: f64,
    pub mechanism: Mechanism,
}

/// Earliest blowup proxy along a trajectory: the first snapshot whose
/// velocity gradient exceeds `threshold`, or the terminal dt-underflow /
/// non-finite event, whichever comes first.
pub fn detect_blowup(trajectory: &Trajectory, threshold: f64, dr: f64) -> Option<Detection> {
    let mut found: Option<Detection> = None;
    for snap in &trajectory.snapshots {
        if max_gradient(&snap.velocity, dr) > threshold {
            found = Some(Detection {
                time: snap.time,
                mechanism: Mechanism::Gradient,
            });
            break;
        }
    }
    let terminal = match trajectory.termination {
        Termination::BlowupDetected { time, mechanism } => Some(Detection { time, mechanism }),
        Termination::DtUnderflow { time } => Some(Detection {
            time,
            mechanism: Mechanism::DtUnderflow,
        }),
        Termination::NumericalOverflow { time, .. } => Some(Detection {
            time,
            mechanism: Mechanism::NonFinite,
        }),
        Termination::ReachedTMax => None,
    };
    match (found, terminal) {
        (Some(a), Some(b)) => Some(if a.time <= b.time { a } else { b }),
        (a, b) => a.or(b),
    }
}

/// Total geometric mass `sum_i rho_i r_i^(N-1) dr`.
pub fn geometric_mass(state: &FluidState, grid: &RadialGrid, dimension: u32) -> f64 {
    let dr = grid.spacing();
    let exponent = dimension as i32 - 1;
    state
        .rho
        .iter()
        .enumerate()
        .map(|(i, &rho)| rho * grid.center(i).powi(exponent) * dr)
        .sum()
}

/// Per-snapshot scalar diagnostics, one row of the emitted time series.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub time: f64,
    /// `H_n` per configured exponent, in `n_list` order.
    pub moments: Vec<f64>,
    pub mass: f64,
    pub max_abs_velocity: f64,
    pub max_gradient: f64,
    pub max_density: f64,
    /// Riccati floor per exponent; `None` where the floor is undefined
    /// (hypotheses unmet for that exponent, or `t` at/after its bound).
    pub floors: Vec<Option<f64>>,
    /// Cauchy-Schwarz slack per exponent.
    pub cs_slack: Vec<f64>,
}

/// Evaluate the scalar diagnostics at every snapshot of a trajectory.
pub fn diagnostics_series(
    trajectory: &Trajectory,
    grid: &RadialGrid,
    params: &ModelParams,
    n_list: &[f64],
) -> Result<Vec<DiagnosticsRecord>> {
    if n_list.is_empty() {
        return Err(Error::config("n_list", "must not be empty"));
    }
    let initial = trajectory
        .snapshots
        .first()
        .ok_or_else(|| Error::Consistency("trajectory has no snapshots".into()))?;
    let radius = grid.radius();
    let applicable = params.theorem_applicable();

    // Per-exponent floor parameters, fixed by the initial snapshot.
    let mut floor_params = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let h0 = weighted_moment(initial, grid, n)?;
        let bound = if applicable && h0 > 0.0 {
            Some(blowup_bound(radius, n, h0)?)
        } else {
            None
        };
        floor_params.push((n, h0, bound));
    }

    let dr = grid.spacing();
    let mut records = Vec::with_capacity(trajectory.snapshots.len());
    for snap in &trajectory.snapshots {
        let mut moments = Vec::with_capacity(n_list.len());
        let mut floors = Vec::with_capacity(n_list.len());
        let mut cs_slack = Vec::with_capacity(n_list.len());
        for &(n, h0, bound) in &floor_params {
            moments.push(weighted_moment(snap, grid, n)?);
            let floor = match bound {
                Some(limit) if snap.time < limit => {
                    Some(riccati_floor(snap.time, radius, n, h0)?)
                }
                _ => None,
            };
            floors.push(floor);
            cs_slack.push(cauchy_schwarz_audit(snap, grid, n)?.slack);
        }
        records.push(DiagnosticsRecord {
            time: snap.time,
            moments,
            mass: geometric_mass(snap, grid, params.dimension),
            max_abs_velocity: snap.velocity.iter().fold(0.0, |a, &v| a.max(v.abs())),
            max_gradient: max_gradient(&snap.velocity, dr),
            max_density: snap.rho.iter().fold(0.0, |a, &x| a.max(x)),
            floors,
            cs_slack,
        });
    }
    Ok(records)
}

/// Moment functional summary for one exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub n: f64,
    pub h0: f64,
    /// `T_n`, present only when the hypotheses hold for this exponent.
    pub bound: Option<f64>,
}

/// Assembled verdicts for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowupReport {
    /// Hypothesis check for the primary exponent `n_list[0]`.
    pub hypotheses: HypothesisReport,
    /// Per-exponent `H0` and bound, in `n_list` order.
    pub moments: Vec<MomentSummary>,
    pub detected: Option<Detection>,
    pub oracle_time: Option<f64>,
    /// `detected <= min_n T_n * 1.05`? `None` when it cannot be decided
    /// (no bound defined, or no detection and the run too short to refute).
    pub detected_le_bound: Option<bool>,
    /// `H_n(t) >= floor_n(t) * 0.98` at every snapshot in each floor's
    /// domain? `None` when no exponent admits a floor.
    pub h_ge_floor: Option<bool>,
    /// Final trajectory time.
    pub end_time: f64,
}

/// Build the verdict report for one completed run.
///
/// `oracle_time` is an independent prediction of the breakdown time (for
/// example the characteristics crossing) and is passed through unjudged.
pub fn build_report(
    trajectory: &Trajectory,
    grid: &RadialGrid,
    params: &ModelParams,
    n_list: &[f64],
    oracle_time: Option<f64>,
) -> Result<BlowupReport> {
    if n_list.is_empty() {
        return Err(Error::config("n_list", "must not be empty"));
    }
    let initial = trajectory
        .snapshots
        .first()
        .ok_or_else(|| Error::Consistency("trajectory has no snapshots".into()))?;
    if initial.cells() != grid.cells() {
        return Err(Error::Consistency(format!(
            "trajectory carries {} cells but the grid has {}",
            initial.cells(),
            grid.cells()
        )));
    }

    let mut primary = params.clone();
    primary.weight_exponent = n_list[0];
    let hypotheses = validate_hypotheses(&primary, initial, grid);

    let radius = grid.radius();
    let applicable = params.theorem_applicable();
    let mut moments = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let h0 = weighted_moment(initial, grid, n)?;
        let bound = if applicable && h0 > 0.0 {
            Some(blowup_bound(radius, n, h0)?)
        } else {
            None
        };
        moments.push(MomentSummary { n, h0, bound });
    }

    let detected = detect_blowup(trajectory, trajectory.gradient_threshold, grid.spacing());
    let end_time = trajectory.final_state().time;

    let min_bound = moments
        .iter()
        .filter_map(|m| m.bound)
        .fold(f64::INFINITY, f64::min);
    let detected_le_bound = if !min_bound.is_finite() {
        None
    } else {
        let limit = min_bound * (1.0 + BOUND_TOLERANCE);
        match detected {
            Some(d) => Some(d.time <= limit),
            // No detection: only a run that outlived the bound refutes it.
            None if end_time >= limit => Some(false),
            None => None,
        }
    };

    let mut any_floor = false;
    let mut floor_ok = true;
    for summary in &moments {
        let Some(limit) = summary.bound else { continue };
        any_floor = true;
        for snap in &trajectory.snapshots {
            if snap.time >= limit {
                continue;
            }
            let h = weighted_moment(snap, grid, summary.n)?;
            let floor = riccati_floor(snap.time, radius, summary.n, summary.h0)?;
            if h < floor * (1.0 - FLOOR_TOLERANCE) {
                floor_ok = false;
            }
        }
    }
    let h_ge_floor = any_floor.then_some(floor_ok);

    Ok(BlowupReport {
        hypotheses,
        moments,
        detected,
        oracle_time,
        detected_le_bound,
        h_ge_floor,
        end_time,
    })
}
