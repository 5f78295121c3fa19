//! Configuration-driven experiment runner.
//!
//! Three subcommands share one JSON config format:
//!
//! * `run` — integrate one configuration, audit it, and write `series.csv`,
//!   `summary.json`, and gnuplot-ready data files.
//! * `sweep` — run the cross product of `profile_grid` × `n_list`, one
//!   sub-directory per case, plus `sweep_summary.json`.
//! * `oracle` — evolve the pressureless characteristic fan only and print
//!   its outcome as JSON on stdout.
//!
//! Exit codes: `0` all verdicts and audits pass (or are not applicable),
//! `1` configuration/runtime error, `2` a verdict or audit failed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::characteristics::{evolve_fan, CharacteristicFan};
use crate::diagnostics::{
    boundary_term_audit, cauchy_schwarz_audit, diagnostics_series, moment_inequality_audit,
    build_report, BlowupReport, DiagnosticsRecord, MomentAudit,
};
use crate::model::{make_initial_state, InitialProfile, ModelParams, RadialGrid};
use crate::solver::{run, SchemeConfig, Termination, Trajectory};
use crate::{Error, Result};

/// Default relative density amplitude for the sine family: small enough that
/// self-force corrections stay negligible next to the velocity dynamics.
const DEFAULT_SINE_DENSITY: f64 = 1e-3;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Bulk model parameters as they appear in the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub dimension: u32,
    pub delta: i32,
    pub pressure_constant: f64,
    pub adiabatic_exponent: f64,
    pub domain_radius: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        ModelSection {
            dimension: 3,
            delta: 1,
            pressure_constant: 0.0,
            adiabatic_exponent: 1.4,
            domain_radius: 1.0,
        }
    }
}

/// Grid resolution section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub cells: usize,
    pub ghost_depth: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            cells: 1024,
            ghost_depth: 1,
        }
    }
}

/// Scheme tunables; mirrors [`SchemeConfig`] field by field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchemeSection {
    pub cfl: f64,
    pub density_floor: f64,
    pub max_dt: f64,
    pub min_dt: f64,
    pub gradient_threshold_factor: f64,
    pub gradient_threshold: Option<f64>,
}

impl Default for SchemeSection {
    fn default() -> Self {
        let s = SchemeConfig::default();
        SchemeSection {
            cfl: s.cfl,
            density_floor: s.density_floor,
            max_dt: s.max_dt,
            min_dt: s.min_dt,
            gradient_threshold_factor: s.gradient_threshold_factor,
            gradient_threshold: s.gradient_threshold,
        }
    }
}

impl SchemeSection {
    fn build(&self) -> SchemeConfig {
        SchemeConfig {
            cfl: self.cfl,
            density_floor: self.density_floor,
            max_dt: self.max_dt,
            min_dt: self.min_dt,
            gradient_threshold_factor: self.gradient_threshold_factor,
            gradient_threshold: self.gradient_threshold,
        }
    }
}

/// Initial-profile section: one `family` plus that family's parameters.
/// Parameters belonging to a different family are rejected by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileSection {
    /// `sine_velocity`, `poly_bump_density`, `poly_bump_velocity`, `custom`.
    pub family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub velocity_amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_amplitude: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density_taper: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<[f64; 3]>>,
}

impl Default for ProfileSection {
    fn default() -> Self {
        ProfileSection {
            family: "sine_velocity".to_string(),
            amplitude: None,
            support_radius: None,
            velocity_amplitude: None,
            density_amplitude: None,
            density_taper: None,
            samples: None,
        }
    }
}

impl ProfileSection {
    /// Resolve the section into a concrete profile for a domain of radius
    /// `radius`, rejecting parameters that don't belong to the family.
    pub fn build(&self, radius: f64) -> Result<InitialProfile> {
        let reject = |allowed: &[&str]| -> Result<()> {
            let present: &[(&str, bool)] = &[
                ("amplitude", self.amplitude.is_some()),
                ("support_radius", self.support_radius.is_some()),
                ("velocity_amplitude", self.velocity_amplitude.is_some()),
                ("density_amplitude", self.density_amplitude.is_some()),
                ("density_taper", self.density_taper.is_some()),
                ("samples", self.samples.is_some()),
            ];
            for &(name, set) in present {
                if set && !allowed.contains(&name) {
                    return Err(Error::Config {
                        field: format!("profile.{name}"),
                        message: format!("not a parameter of family `{}`", self.family),
                    });
                }
            }
            Ok(())
        };

        let profile = match self.family.as_str() {
            "sine_velocity" => {
                reject(&["velocity_amplitude", "density_amplitude", "density_taper"])?;
                InitialProfile::SineVelocity {
                    velocity_amplitude: self.velocity_amplitude.unwrap_or(1.0),
                    density_amplitude: self.density_amplitude.unwrap_or(DEFAULT_SINE_DENSITY),
                    density_taper: self.density_taper.unwrap_or(0.1 * radius),
                }
            }
            "poly_bump_density" => {
                reject(&["amplitude", "support_radius"])?;
                InitialProfile::PolyBumpDensity {
                    amplitude: self.amplitude.unwrap_or(1.0),
                    support_radius: self.support_radius.unwrap_or(0.7 * radius),
                }
            }
            "poly_bump_velocity" => {
                reject(&["amplitude", "support_radius", "density_amplitude"])?;
                InitialProfile::PolyBumpVelocity {
                    amplitude: self.amplitude.unwrap_or(1.0),
                    support_radius: self.support_radius.unwrap_or(0.7 * radius),
                    density_amplitude: self.density_amplitude.unwrap_or(1.0),
                }
            }
            "custom" => {
                reject(&["samples"])?;
                let samples = self.samples.clone().ok_or_else(|| {
                    Error::config("profile.samples", "family `custom` requires samples")
                })?;
                InitialProfile::Custom { samples }
            }
            other => {
                return Err(Error::Config {
                    field: "profile.family".to_string(),
                    message: format!(
                        "unknown family `{other}`; expected sine_velocity, \
                         poly_bump_density, poly_bump_velocity, or custom"
                    ),
                })
            }
        };
        profile.validate(radius)?;
        Ok(profile)
    }
}

/// One experiment configuration. Every field has a documented default, so
/// `{}` is a valid config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    /// Weight exponents of the moments to track; first entry is primary.
    pub n_list: Vec<f64>,
    pub profile: ProfileSection,
    /// Alternative profiles for `sweep`; `null` means sweep only `n_list`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_grid: Option<Vec<ProfileSection>>,
    pub grid: GridSection,
    pub scheme: SchemeSection,
    pub t_max: f64,
    /// Snapshot spacing in time units; `0` records every step.
    pub snapshot_cadence: f64,
    /// Allowance of the moment-inequality audit, scaled by `max(1, H^2)`.
    pub audit_tolerance: f64,
    /// Characteristic-fan step; `null` picks the built-in resolution.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_dt: Option<f64>,
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelSection::default(),
            n_list: vec![1.0],
            profile: ProfileSection::default(),
            profile_grid: None,
            grid: GridSection::default(),
            scheme: SchemeSection::default(),
            t_max: 1.0,
            snapshot_cadence: 2.5e-3,
            audit_tolerance: 0.05,
            oracle_dt: None,
            output_dir: "out".to_string(),
        }
    }
}

/// Parse and validate a JSON config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig =
        serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.params_for(self.primary_n()?)?;
        self.profile.build(self.model.domain_radius)?;
        if let Some(grid) = &self.profile_grid {
            if grid.is_empty() {
                return Err(Error::config("profile_grid", "must not be empty"));
            }
            for section in grid {
                section.build(self.model.domain_radius)?;
            }
        }
        if self.grid.cells == 0 {
            return Err(Error::config("grid.cells", "must be positive"));
        }
        self.scheme.build().validate()?;
        if !(self.t_max >= 0.0) {
            return Err(Error::config("t_max", "must be nonnegative"));
        }
        if !(self.snapshot_cadence >= 0.0) {
            return Err(Error::config("snapshot_cadence", "must be nonnegative"));
        }
        if !(self.audit_tolerance > 0.0) {
            return Err(Error::config("audit_tolerance", "must be positive"));
        }
        if let Some(dt) = self.oracle_dt {
            if !(dt > 0.0) {
                return Err(Error::config("oracle_dt", "must be positive"));
            }
        }
        Ok(())
    }

    fn primary_n(&self) -> Result<f64> {
        self.n_list
            .first()
            .copied()
            .ok_or_else(|| Error::config("n_list", "must not be empty"))
    }

    /// Model parameters with `n` as the weight exponent. Surfaces the
    /// constraint violations as named-field errors.
    fn params_for(&self, n: f64) -> Result<ModelParams> {
        for (i, &value) in self.n_list.iter().enumerate() {
            if !(value > 0.0) {
                return Err(Error::Config {
                    field: format!("n_list[{i}]"),
                    message: format!("weight exponent {value} must be positive"),
                });
            }
        }
        ModelParams::new(
            self.model.dimension,
            self.model.delta,
            self.model.pressure_constant,
            self.model.adiabatic_exponent,
            n,
            self.model.domain_radius,
        )
        .map_err(|e| match e {
            Error::InvalidForceSign(v) => Error::Config {
                field: "model.delta".to_string(),
                message: format!("{v} is not one of -1, 0, +1"),
            },
            Error::InvalidDimension(v) => Error::Config {
                field: "model.dimension".to_string(),
                message: format!("{v} must be >= 1"),
            },
            other => other,
        })
    }
}

// ---------------------------------------------------------------------------
// Single run
// ---------------------------------------------------------------------------

/// Everything produced by one executed configuration.
pub struct RunArtifacts {
    pub report: BlowupReport,
    pub records: Vec<DiagnosticsRecord>,
    pub trajectory: Trajectory,
    pub audits_passed: bool,
    pub audit_log: Vec<String>,
    pub summary: Value,
}

impl RunArtifacts {
    /// `0` when every verdict and audit passed or was not applicable, else `2`.
    pub fn exit_code(&self) -> i32 {
        let verdict_failed = self.report.detected_le_bound == Some(false)
            || self.report.h_ge_floor == Some(false);
        if verdict_failed || !self.audits_passed {
            2
        } else {
            0
        }
    }
}

/// Integrate, audit, and summarize one configuration without touching the
/// file system.
pub fn execute_run(config: &RunConfig) -> Result<RunArtifacts> {
    config.validate()?;
    let params = config.params_for(config.primary_n()?)?;
    let grid = RadialGrid::new(
        config.grid.cells,
        config.model.domain_radius,
        config.grid.ghost_depth,
    )?;
    let profile = config.profile.build(config.model.domain_radius)?;
    let state0 = make_initial_state(&profile, &grid)?;
    let scheme = config.scheme.build();

    let trajectory = run(
        &state0,
        &grid,
        &params,
        &scheme,
        config.t_max,
        config.snapshot_cadence,
    )?;
    let records = diagnostics_series(&trajectory, &grid, &params, &config.n_list)?;

    // Independent breakdown prediction; only defined for pressureless,
    // non-attractive flows.
    let oracle_time = if params.pressure_constant == 0.0 && params.delta >= 0 {
        evolve_fan(&state0, &grid, &params, config.oracle_dt, config.t_max)?
            .outcome
            .event_time()
    } else {
        None
    };

    let report = build_report(&trajectory, &grid, &params, &config.n_list, oracle_time)?;
    let (audits_passed, audit_log) = run_audits(config, &params, &grid, &trajectory, &report)?;
    let summary = build_summary(config, &trajectory, &report);

    Ok(RunArtifacts {
        report,
        records,
        trajectory,
        audits_passed,
        audit_log,
        summary,
    })
}

/// Evaluate the three proof-chain audits per applicable exponent.
///
/// Exponents whose hypotheses fail (no bound defined) are logged as skipped,
/// never as failures. Returns the overall pass flag and the log lines.
fn run_audits(
    config: &RunConfig,
    params: &ModelParams,
    grid: &RadialGrid,
    trajectory: &Trajectory,
    report: &BlowupReport,
) -> Result<(bool, Vec<String>)> {
    let mut passed = true;
    let mut log = Vec::new();
    let times = trajectory.times();

    for summary in &report.moments {
        let n = summary.n;
        if summary.bound.is_none() {
            log.push(format!("audit[n={n}]: skipped (hypotheses not applicable)"));
            continue;
        }

        // Cauchy-Schwarz slack at every snapshot.
        let mut worst_slack = f64::INFINITY;
        let mut cs_ok = true;
        for snap in &trajectory.snapshots {
            let audit = cauchy_schwarz_audit(snap, grid, n)?;
            worst_slack = worst_slack.min(audit.slack);
            cs_ok &= audit.pass;
        }
        passed &= cs_ok;
        log.push(format!(
            "audit cauchy_schwarz[n={n}]: {} (worst slack {worst_slack:.3e})",
            pass_str(cs_ok)
        ));

        // Boundary trace before any support-reached-boundary event.
        let cutoff = trajectory.support_reached_boundary.unwrap_or(f64::INFINITY);
        let mut samples = 0usize;
        let mut worst_term = 0.0f64;
        let mut boundary_ok = true;
        for snap in &trajectory.snapshots {
            if snap.time >= cutoff {
                break;
            }
            let audit = boundary_term_audit(snap, params, n)?;
            worst_term = worst_term.max(audit.kinetic.max(audit.internal));
            boundary_ok &= audit.pass;
            samples += 1;
        }
        passed &= boundary_ok;
        log.push(format!(
            "audit boundary[n={n}]: {} ({samples} snapshots before wall contact, \
             worst term {worst_term:.3e})",
            pass_str(boundary_ok)
        ));

        // Moment differential inequality on the sampled H_n(t).
        let moments: Vec<f64> = report_moment_series(trajectory, grid, n)?;
        debug_assert_eq!(moments.len(), times.len());
        let audit = moment_inequality_audit(
            &times,
            &moments,
            grid.radius(),
            n,
            params,
            config.audit_tolerance,
        )?;
        match &audit {
            MomentAudit::Checked {
                samples,
                worst_residual,
                pass,
                ..
            } => {
                passed &= *pass;
                log.push(format!(
                    "audit moment[n={n}]: {} ({samples} interior snapshots, \
                     worst residual {worst_residual:.3e})",
                    pass_str(*pass)
                ));
            }
            MomentAudit::Skipped { reason } => {
                log.push(format!("audit moment[n={n}]: skipped ({reason})"));
            }
        }
    }
    Ok((passed, log))
}

fn report_moment_series(trajectory: &Trajectory, grid: &RadialGrid, n: f64) -> Result<Vec<f64>> {
    trajectory
        .snapshots
        .iter()
        .map(|s| crate::diagnostics::weighted_moment(s, grid, n))
        .collect()
}

fn pass_str(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// Shortest round-trip decimal form (Rust's float `Display`); `NaN` for
/// undefined entries.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn termination_json(trajectory: &Trajectory) -> Value {
    let time = match trajectory.termination {
        Termination::ReachedTMax => trajectory.final_state().time,
        Termination::BlowupDetected { time, .. }
        | Termination::DtUnderflow { time }
        | Termination::NumericalOverflow { time, .. } => time,
    };
    json!({ "reason": trajectory.termination.reason(), "time": time })
}

fn build_summary(config: &RunConfig, trajectory: &Trajectory, report: &BlowupReport) -> Value {
    let mut bound_map = serde_json::Map::new();
    for summary in &report.moments {
        bound_map.insert(fmt_f64(summary.n), json!(summary.bound));
    }
    let detected = match &report.detected {
        Some(d) => json!({ "time": d.time, "mechanism": d.mechanism.as_str() }),
        None => Value::Null,
    };
    json!({
        "config_echo": config,
        "hypotheses": report.hypotheses,
        "bound_T": Value::Object(bound_map),
        "detected": detected,
        "oracle_time": report.oracle_time,
        "verdicts": {
            "detected_le_bound": report.detected_le_bound,
            "H_ge_floor": report.h_ge_floor,
        },
        "termination": termination_json(trajectory),
        "floor_mass_injected": trajectory.floor.mass_injected,
    })
}

// ---------------------------------------------------------------------------
// File emission
// ---------------------------------------------------------------------------

/// `series.csv` header for a given exponent list.
pub fn series_header(n_list: &[f64]) -> String {
    let mut header = String::from("t");
    for &n in n_list {
        let _ = write!(header, ",H_{}", fmt_f64(n));
    }
    header.push_str(",mass,max_abs_V,max_grad_V,max_rho");
    for &n in n_list {
        let _ = write!(header, ",riccati_floor_{}", fmt_f64(n));
    }
    for &n in n_list {
        let _ = write!(header, ",cs_slack_{}", fmt_f64(n));
    }
    header
}

fn series_csv(n_list: &[f64], records: &[DiagnosticsRecord]) -> String {
    let mut out = series_header(n_list);
    out.push('\n');
    for rec in records {
        let mut row = fmt_f64(rec.time);
        for h in &rec.moments {
            let _ = write!(row, ",{}", fmt_f64(*h));
        }
        let _ = write!(
            row,
            ",{},{},{},{}",
            fmt_f64(rec.mass),
            fmt_f64(rec.max_abs_velocity),
            fmt_f64(rec.max_gradient),
            fmt_f64(rec.max_density)
        );
        for floor in &rec.floors {
            let _ = write!(row, ",{}", fmt_f64(floor.unwrap_or(f64::NAN)));
        }
        for slack in &rec.cs_slack {
            let _ = write!(row, ",{}", fmt_f64(*slack));
        }
        out.push_str(&row);
        out.push('\n');
    }
    out
}

fn profiles_dat(grid: &RadialGrid, trajectory: &Trajectory) -> String {
    let first = &trajectory.snapshots[0];
    let last = trajectory.final_state();
    let mut out = String::from("# r rho_initial V_initial rho_final V_final\n");
    for i in 0..grid.cells() {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            fmt_f64(grid.center(i)),
            fmt_f64(first.rho[i]),
            fmt_f64(first.velocity[i]),
            fmt_f64(last.rho[i]),
            fmt_f64(last.velocity[i]),
        );
    }
    out
}

fn moment_dat(records: &[DiagnosticsRecord]) -> String {
    let mut out = String::from("# t H_primary riccati_floor_primary\n");
    for rec in records {
        let _ = writeln!(
            out,
            "{} {} {}",
            fmt_f64(rec.time),
            fmt_f64(rec.moments[0]),
            fmt_f64(rec.floors[0].unwrap_or(f64::NAN)),
        );
    }
    out
}

fn plot_script(n_list: &[f64]) -> String {
    // Column of max_grad_V in series.csv: t, k moments, mass, max_abs_V, ...
    let grad_col = 1 + n_list.len() + 3;
    format!(
        "set terminal pngcairo size 1200,900\n\
         set output 'overview.png'\n\
         set multiplot layout 2,2\n\
         set key left top\n\
         set title 'weighted moment vs blowup floor'\n\
         plot 'moment.dat' using 1:2 with lines title 'H(t)', \\\n\
         \x20    'moment.dat' using 1:3 with lines title 'floor'\n\
         set title 'density profiles'\n\
         plot 'profiles.dat' using 1:2 with lines title 'initial', \\\n\
         \x20    'profiles.dat' using 1:4 with lines title 'final'\n\
         set title 'velocity profiles'\n\
         plot 'profiles.dat' using 1:3 with lines title 'initial', \\\n\
         \x20    'profiles.dat' using 1:5 with lines title 'final'\n\
         set title 'max |dV/dr|'\n\
         set datafile separator comma\n\
         plot 'series.csv' using 1:{grad_col} with lines title 'max gradient'\n\
         unset multiplot\n"
    )
}

/// Execute one configuration and write its artifacts under
/// `config.output_dir`. Returns the artifacts (exit code included).
pub fn run_to_directory(config: &RunConfig, quiet: bool) -> Result<RunArtifacts> {
    let artifacts = execute_run(config)?;
    let dir = PathBuf::from(&config.output_dir);
    std::fs::create_dir_all(&dir)?;

    let grid = RadialGrid::new(
        config.grid.cells,
        config.model.domain_radius,
        config.grid.ghost_depth,
    )?;
    std::fs::write(
        dir.join("series.csv"),
        series_csv(&config.n_list, &artifacts.records),
    )?;
    let mut summary_text = serde_json::to_string_pretty(&artifacts.summary)
        .map_err(|e| Error::Consistency(format!("summary serialization: {e}")))?;
    summary_text.push('\n');
    std::fs::write(dir.join("summary.json"), summary_text)?;
    std::fs::write(
        dir.join("profiles.dat"),
        profiles_dat(&grid, &artifacts.trajectory),
    )?;
    std::fs::write(dir.join("moment.dat"), moment_dat(&artifacts.records))?;
    std::fs::write(dir.join("plot.gp"), plot_script(&config.n_list))?;

    if !quiet {
        log_run(config, &artifacts);
    }
    Ok(artifacts)
}

fn log_run(config: &RunConfig, artifacts: &RunArtifacts) {
    let report = &artifacts.report;
    eprintln!(
        "run: N={} delta={} K={} gamma={} R={} M={} family={}",
        config.model.dimension,
        config.model.delta,
        config.model.pressure_constant,
        config.model.adiabatic_exponent,
        config.model.domain_radius,
        config.grid.cells,
        config.profile.family,
    );
    if report.hypotheses.applicable {
        eprintln!("hypotheses: applicable (H0 = {:.6})", report.hypotheses.h0);
    } else {
        eprintln!("hypotheses: not applicable ({})", report.hypotheses.reasons.join("; "));
    }
    for m in &report.moments {
        match m.bound {
            Some(t) => eprintln!("bound: T_{} = {:.6}", fmt_f64(m.n), t),
            None => eprintln!("bound: T_{} undefined", fmt_f64(m.n)),
        }
    }
    match &report.detected {
        Some(d) => eprintln!("detected: t = {:.6} ({})", d.time, d.mechanism.as_str()),
        None => eprintln!("detected: none"),
    }
    match report.oracle_time {
        Some(t) => eprintln!("oracle: t = {t:.6}"),
        None => eprintln!("oracle: not applicable"),
    }
    if let Some(t) = artifacts.trajectory.support_reached_boundary {
        eprintln!("support reached boundary at t = {t:.6}");
    }
    for line in &artifacts.audit_log {
        eprintln!("{line}");
    }
    eprintln!(
        "verdicts: detected_le_bound={} H_ge_floor={} -> exit {}",
        verdict_str(report.detected_le_bound),
        verdict_str(report.h_ge_floor),
        artifacts.exit_code(),
    );
    eprintln!(
        "termination: {} at t = {:.6}; wrote {}/",
        artifacts.trajectory.termination.reason(),
        artifacts.trajectory.final_state().time,
        config.output_dir,
    );
}

fn verdict_str(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "n/a",
    }
}

// ---------------------------------------------------------------------------
// Sweep
// ---------------------------------------------------------------------------

struct SweepCase {
    name: String,
    profile_index: Option<usize>,
    n: f64,
    config: RunConfig,
}

struct CaseOutcome {
    name: String,
    profile_index: Option<usize>,
    n: f64,
    row: Value,
    exit: i32,
}

fn sweep_cases(config: &RunConfig, root: &Path) -> Result<Vec<SweepCase>> {
    let profiles: Vec<(Option<usize>, ProfileSection)> = match &config.profile_grid {
        None => vec![(None, config.profile.clone())],
        Some(list) if list.is_empty() => {
            return Err(Error::config("profile_grid", "must not be empty"))
        }
        Some(list) => list
            .iter()
            .cloned()
            .enumerate()
            .map(|(j, p)| (Some(j), p))
            .collect(),
    };
    let mut cases = Vec::new();
    for (index, profile) in &profiles {
        for &n in &config.n_list {
            let name = match index {
                Some(j) => format!("p{j}_n{}", fmt_f64(n)),
                None => format!("n{}", fmt_f64(n)),
            };
            let case_dir = root.join(&name);
            let case_config = RunConfig {
                n_list: vec![n],
                profile: profile.clone(),
                profile_grid: None,
                output_dir: case_dir.to_string_lossy().into_owned(),
                ..config.clone()
            };
            cases.push(SweepCase {
                name,
                profile_index: *index,
                n,
                config: case_config,
            });
        }
    }
    Ok(cases)
}

fn run_case(case: &SweepCase) -> CaseOutcome {
    match run_to_directory(&case.config, true) {
        Ok(artifacts) => {
            let report = &artifacts.report;
            let detected = match &report.detected {
                Some(d) => json!({ "time": d.time, "mechanism": d.mechanism.as_str() }),
                None => Value::Null,
            };
            let exit = artifacts.exit_code();
            CaseOutcome {
                name: case.name.clone(),
                profile_index: case.profile_index,
                n: case.n,
                row: json!({
                    "case": case.name,
                    "n": case.n,
                    "profile_index": case.profile_index,
                    "H0": report.moments[0].h0,
                    "bound_T": report.moments[0].bound,
                    "detected": detected,
                    "verdicts": {
                        "detected_le_bound": report.detected_le_bound,
                        "H_ge_floor": report.h_ge_floor,
                    },
                    "status": if exit == 0 { "ok" } else { "audit_failure" },
                }),
                exit,
            }
        }
        Err(e) => CaseOutcome {
            name: case.name.clone(),
            profile_index: case.profile_index,
            n: case.n,
            row: json!({
                "case": case.name,
                "n": case.n,
                "profile_index": case.profile_index,
                "status": "error",
                "error": e.to_string(),
            }),
            exit: 1,
        },
    }
}

/// Run the sweep; cases may execute on `jobs` worker threads. Outputs are
/// per-case directories plus `sweep_summary.json` in the sweep root.
pub fn run_sweep(config: &RunConfig, jobs: usize) -> Result<i32> {
    let root = PathBuf::from(&config.output_dir);
    let cases = sweep_cases(config, &root)?;
    std::fs::create_dir_all(&root)?;

    let total = cases.len();
    let outcomes: Mutex<Vec<Option<CaseOutcome>>> = Mutex::new((0..total).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    let workers = jobs.max(1).min(total);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= total {
                    break;
                }
                let outcome = run_case(&cases[index]);
                outcomes.lock().expect("sweep worker poisoned")[index] = Some(outcome);
            });
        }
    });

    let outcomes: Vec<CaseOutcome> = outcomes
        .into_inner()
        .expect("sweep worker poisoned")
        .into_iter()
        .map(|slot| slot.expect("every case indexed"))
        .collect();

    let mut exit = 0;
    for outcome in &outcomes {
        eprintln!(
            "case {}: n={} profile={} -> {}",
            outcome.name,
            fmt_f64(outcome.n),
            outcome
                .profile_index
                .map(|j| j.to_string())
                .unwrap_or_else(|| "-".to_string()),
            outcome.row["status"].as_str().unwrap_or("?"),
        );
        exit = match (exit, outcome.exit) {
            (1, _) | (_, 1) => 1,
            (2, _) | (_, 2) => 2,
            _ => 0,
        };
    }

    let rows: Vec<Value> = outcomes.into_iter().map(|o| o.row).collect();
    let mut text = serde_json::to_string_pretty(&json!({ "cases": rows }))
        .map_err(|e| Error::Consistency(format!("sweep summary serialization: {e}")))?;
    text.push('\n');
    std::fs::write(root.join("sweep_summary.json"), text)?;
    Ok(exit)
}

// ---------------------------------------------------------------------------
// Oracle
// ---------------------------------------------------------------------------

fn oracle_json(fan: &CharacteristicFan, free_estimate: Option<f64>) -> Value {
    json!({
        "outcome": fan.outcome.label(),
        "event_time": fan.outcome.event_time(),
        "elapsed": fan.elapsed,
        "steps": fan.steps,
        "shells": fan.positions.len(),
        "free_crossing_estimate": free_estimate,
    })
}

/// Evolve the characteristic fan for a config and print the outcome as JSON.
pub fn run_oracle(config: &RunConfig) -> Result<()> {
    let params = config.params_for(config.primary_n()?)?;
    let grid = RadialGrid::new(
        config.grid.cells,
        config.model.domain_radius,
        config.grid.ghost_depth,
    )?;
    let profile = config.profile.build(config.model.domain_radius)?;
    let state0 = make_initial_state(&profile, &grid)?;
    let free = crate::characteristics::crossing_time_free(
        &grid.centers().collect::<Vec<_>>(),
        &state0.velocity,
    )?;
    let fan = evolve_fan(&state0, &grid, &params, config.oracle_dt, config.t_max)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&oracle_json(&fan, free))
            .map_err(|e| Error::Consistency(format!("oracle serialization: {e}")))?
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "radial-euler",
    version,
    about = "Finite-volume blowup laboratory for radial Euler/Euler-Poisson flows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one configuration and write series/summary/plot files.
    Run {
        /// Path to the JSON config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the config's cell count.
        #[arg(long)]
        cells: Option<usize>,
        /// Suppress progress logging on stderr.
        #[arg(long)]
        quiet: bool,
    },
    /// Run every (profile, n) case of the config into sub-directories.
    Sweep {
        /// Path to the JSON config.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory (sweep root).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Worker threads for independent cases.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Evolve the characteristics oracle only; JSON on stdout.
    Oracle {
        /// Path to the JSON config.
        #[arg(long)]
        config: PathBuf,
    },
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Run {
            config,
            out_dir,
            cells,
            quiet,
        } => {
            let mut config = load_config(&config)?;
            if let Some(dir) = out_dir {
                config.output_dir = dir.to_string_lossy().into_owned();
            }
            if let Some(cells) = cells {
                config.grid.cells = cells;
                config.validate()?;
            }
            let artifacts = run_to_directory(&config, quiet)?;
            Ok(artifacts.exit_code())
        }
        Command::Sweep {
            config,
            out_dir,
            jobs,
        } => {
            let mut config = load_config(&config)?;
            if let Some(dir) = out_dir {
                config.output_dir = dir.to_string_lossy().into_owned();
            }
            run_sweep(&config, jobs)
        }
        Command::Oracle { config } => {
            let config = load_config(&config)?;
            run_oracle(&config)?;
            Ok(0)
        }
    }
}

/// Top-level CLI entry; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
