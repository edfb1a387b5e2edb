//! Self-checks run by `ewald1d validate`.
//!
//! Each check reports a measured quantity and the bound it is held to. The
//! fast tier covers the closed forms against their independent series and
//! screened-sum routes plus short engine runs; the full tier adds
//! trajectory comparisons against the fixed-step reference integrator.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::DomainConfig;
use crate::dynamics::{build_propagator, Engine};
use crate::error::{Error, Result};
use crate::experiment::{make_waterbag, BoundaryMode, Placement, WaterbagSpec};
use crate::field::{primitive_cell_field, single_particle_field, single_particle_potential, total_field_of};
use crate::oracle::{ReferenceState, Rk4};
use crate::spectral::{
    screened_potential_closed, screened_potential_direct, screened_potential_limit, series_field, series_potential,
    FourierTruncation, ScreeningParameter,
};
use crate::state::wrap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValidationTier {
    Fast,
    Full,
}

impl fmt::Display for ValidationTier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValidationTier::Fast => "fast",
            ValidationTier::Full => "full",
        })
    }
}

impl FromStr for ValidationTier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(ValidationTier::Fast),
            "full" => Ok(ValidationTier::Full),
            _ => Err(Error::InvalidArgument(format!("unknown tier {s:?}, expected fast or full"))),
        }
    }
}

/// Which side of the tolerance a measurement must fall on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn at_most(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            measured,
            tolerance,
            bound: Bound::AtMost,
            passed: measured <= tolerance,
            detail: detail.into(),
        }
    }

    pub fn at_least(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            measured,
            tolerance,
            bound: Bound::AtLeast,
            passed: measured >= tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tier: ValidationTier,
    pub library_version: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn new(tier: ValidationTier, checks: Vec<CheckResult>) -> Self {
        Self {
            tier,
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Parses a report and rejects one whose summary flag disagrees with
    /// its checks.
    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text)?;
        if report.passed != report.checks.iter().all(|c| c.passed) {
            return Err(Error::InvalidArgument("report summary disagrees with its checks".into()));
        }
        Ok(report)
    }
}

pub fn run_validation(tier: ValidationTier) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    checks.extend(series_field_checks()?);
    checks.push(series_potential_check()?);
    checks.push(screened_direct_vs_closed()?);
    checks.push(screened_limit_convergence()?);
    checks.extend(torus_checks()?);
    checks.push(propagator_roots()?);
    checks.extend(engine_conservation()?);
    checks.push(center_of_mass_decay()?);
    if tier == ValidationTier::Full {
        for n_pairs in [1, 2, 4] {
            checks.push(reference_trajectory(n_pairs)?);
        }
    }
    Ok(ValidationReport::new(tier, checks))
}

fn unit_cell() -> Result<DomainConfig> {
    DomainConfig::new(1.0, 1, 1.0, 0.0)
}

/// Grid of `count` cell-centred points, skipping the Gibbs zone around a
/// source at the origin.
fn grid_away_from_source(count: usize, radius: f64, cfg: &DomainConfig) -> Vec<f64> {
    let l = cfg.half_length();
    (0..count)
        .map(|k| -l + 2.0 * l * (k as f64 + 0.5) / count as f64)
        .filter(|x| x.abs() > radius)
        .collect()
}

/// Largest series-field error on the grid, and the largest ratio of the
/// error to the tail envelope `(g/π) / ((n_max+1) |sin(θ/2)|)`, `θ = πΔ/L`.
fn series_field_error(n_max: usize, grid: &[f64], cfg: &DomainConfig) -> Result<(f64, f64)> {
    let trunc = FourierTruncation::new(n_max)?;
    let l = cfg.half_length();
    let g = cfg.coupling();
    let mut worst = 0.0f64;
    let mut worst_ratio = 0.0f64;
    for &x in grid {
        let err = (series_field(x, &[0.0], trunc, cfg) - single_particle_field(x, 0.0, cfg)).abs();
        let envelope = g / PI / ((n_max as f64 + 1.0) * (0.5 * PI * x / l).sin().abs()) + 1e-12 * g;
        worst = worst.max(err);
        worst_ratio = worst_ratio.max(err / envelope);
    }
    Ok((worst, worst_ratio))
}

fn series_field_checks() -> Result<Vec<CheckResult>> {
    let cfg = unit_cell()?;
    let n_max = 10_000;
    let radius = FourierTruncation::new(n_max)?.gibbs_radius(&cfg);
    let grid = grid_away_from_source(1000, radius, &cfg);
    let (err, ratio) = series_field_error(n_max, &grid, &cfg)?;
    let (err2, _) = series_field_error(2 * n_max, &grid, &cfg)?;
    let halving = err / err2;
    Ok(vec![
        CheckResult::at_most(
            "series_field_within_tail_envelope",
            ratio,
            1.0,
            format!("n_max = {n_max}, max error {err:e} g; ratio to the tail envelope"),
        ),
        CheckResult::at_most(
            "series_field_error_halves",
            (halving - 2.0).abs() / 2.0,
            0.2,
            format!("error ratio {halving} between n_max = {n_max} and {}", 2 * n_max),
        ),
    ])
}

fn series_potential_check() -> Result<CheckResult> {
    let cfg = unit_cell()?;
    let n_max = 10_000;
    let trunc = FourierTruncation::new(n_max)?;
    let (l, g) = (cfg.half_length(), cfg.coupling());
    let worst = (0..1000)
        .map(|k| -l + 2.0 * l * k as f64 / 1000.0)
        .map(|x| {
            let closed = single_particle_potential(x, 0.0, &cfg) - g * l / 6.0;
            (series_potential(x, &[0.0], trunc, &cfg) - closed).abs()
        })
        .fold(0.0, f64::max);
    // Σ_{n>N} 1/n² < 1/N.
    let bound = g * l / (PI * PI * n_max as f64) * (1.0 + 1e-9);
    Ok(CheckResult::at_most(
        "series_potential_matches_closed_form",
        worst,
        bound,
        format!("n_max = {n_max}, bound gL/(π² n_max)"),
    ))
}

fn screened_direct_vs_closed() -> Result<CheckResult> {
    let cfg = unit_cell()?;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst = 0.0f64;
    for kappa in [1e-2, 0.3, 1.0, 5.0] {
        let scr = ScreeningParameter::sized_for(kappa, &cfg, 1e-15)?;
        for _ in 0..25 {
            let x = rng.gen_range(-1.0..1.0);
            let x1 = rng.gen_range(-1.0..1.0);
            let d = screened_potential_direct(x, x1, scr, &cfg);
            let c = screened_potential_closed(x, x1, kappa, &cfg)?;
            worst = worst.max((d.raw - c.raw).abs() / c.raw.abs());
        }
    }
    Ok(CheckResult::at_most(
        "screened_direct_sum_matches_geometric_form",
        worst,
        1e-10,
        "relative difference of the unsubtracted sums, κL in {1e-2, 0.3, 1, 5}",
    ))
}

/// Largest ratio of successive limit errors as κ drops tenfold. Linear
/// convergence gives 0.1; anything at or below that is at least first order.
fn screened_limit_convergence() -> Result<CheckResult> {
    let cfg = unit_cell()?;
    let l = cfg.half_length();
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for x in [0.0, 0.25, 0.6, -0.9] {
        let err = |k: f64| -> Result<f64> {
            Ok((screened_potential_closed(x, 0.0, k / l, &cfg)?.potential() - screened_potential_limit(x, 0.0, &cfg))
                .abs())
        };
        let e: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&k| err(k)).collect::<Result<_>>()?;
        worst = worst.max(e[1] / e[0]).max(e[2] / e[1]);
        errors.push(e[0]);
    }
    Ok(CheckResult::at_most(
        "screened_limit_converges",
        worst,
        0.11,
        format!("worst error ratio per tenfold κ decrease; errors at κL = 1e-2: {errors:?}"),
    ))
}

fn torus_checks() -> Result<Vec<CheckResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst_shift = 0.0f64;
    let mut smallest_jump = f64::INFINITY;
    for _ in 0..200 {
        let n_pairs = rng.gen_range(1..=32);
        let cfg = DomainConfig::new(rng.gen_range(0.5..4.0), n_pairs, rng.gen_range(0.1..2.0), 0.0)?;
        let l = cfg.half_length();
        let xs: Vec<f64> = (0..2 * n_pairs).map(|_| rng.gen_range(-l..l)).collect();
        let k = rng.gen_range(0..xs.len());
        let shift = if rng.gen_bool(0.5) { cfg.period() } else { -cfg.period() };
        let mut moved = xs.clone();
        moved[k] += shift;
        for (i, &xi) in xs.iter().enumerate() {
            let probe = if i == k { moved[k] } else { xi };
            let before = total_field_of(xi, &xs, &cfg);
            let after = total_field_of(probe, &moved, &cfg);
            worst_shift = worst_shift.max((after - before).abs() / cfg.coupling());
        }
        // The primitive-cell field of the moved sheet jumps by g on the
        // side of the cell it was pushed past.
        let probe = 0.5 * (xs[k] + shift.signum() * l);
        let e1p = |sources: &[f64]| sources.iter().map(|&s| primitive_cell_field(probe, s, &cfg)).sum::<f64>();
        let jump = (e1p(&moved) - e1p(&xs)).abs();
        smallest_jump = smallest_jump.min(jump / cfg.coupling());
    }
    Ok(vec![
        CheckResult::at_most(
            "torus_field_invariant_under_cell_shift",
            worst_shift,
            1e-12,
            "largest field change in units of g over 200 random states",
        ),
        CheckResult::at_least(
            "primitive_cell_control_jumps",
            smallest_jump,
            0.5,
            "smallest jump of the primitive-cell field in units of g",
        ),
    ])
}

fn propagator_roots() -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut worst = 0.0f64;
    for gamma in [0.0, 0.3, FRAC_1_SQRT_2, 2.5] {
        let cfg = DomainConfig::natural_units(8, gamma)?;
        for _ in 0..200 {
            let z0 = rng.gen_range(0.0..3.0);
            let w0 = rng.gen_range(-3.0..3.0);
            let p = build_propagator(z0, w0, 0.0, &cfg)?;
            if let Some(t) = p.next_crossing_time(0.0, 1e-13)? {
                let (z, w) = p.eval(t);
                worst = worst.max(z.abs() / (1.0 + w.abs()));
                // No earlier sign change on a dense scan.
                for k in 1..64 {
                    let (zk, _) = p.eval(t * k as f64 / 64.0);
                    if zk < -1e-12 {
                        worst = f64::INFINITY;
                    }
                }
            }
        }
    }
    Ok(CheckResult::at_most(
        "propagator_roots_are_first_zeros",
        worst,
        1e-12,
        "|z| / (1 + |w|) at the reported crossing, 800 random gaps",
    ))
}

fn engine_conservation() -> Result<Vec<CheckResult>> {
    let cfg = DomainConfig::natural_units(16, 0.0)?;
    let spec = WaterbagSpec {
        placement: Placement::UniformRandom,
        ..WaterbagSpec::for_config(&cfg, 7)
    };
    let state = make_waterbag(&spec, BoundaryMode::Periodic, &cfg)?;
    let mut engine = Engine::new(&state, &cfg, 1e-12)?;
    let e0 = engine.energy()?;
    let mut drift = 0.0f64;
    let mut closure = 0.0f64;
    for k in 1..=40 {
        engine.advance_to(0.5 * k as f64)?;
        drift = drift.max(((engine.energy()? - e0) / e0).abs());
        let (dz, dw) = engine.gaps().closure_error(&cfg);
        closure = closure.max(dz.abs() / cfg.half_length()).max(dw.abs() / spec.velocity_half_width);
    }
    let events = engine.event_count();
    Ok(vec![
        CheckResult::at_most(
            "engine_energy_conserved",
            drift,
            1e-8,
            format!("2N = 32, t = 20, {events} events"),
        ),
        CheckResult::at_most(
            "engine_gap_closure",
            closure,
            1e-10,
            "max of |Σz - 2L|/L and |Σw|/v0",
        ),
    ])
}

fn center_of_mass_decay() -> Result<CheckResult> {
    let cfg = DomainConfig::natural_units(8, FRAC_1_SQRT_2)?;
    let spec = WaterbagSpec {
        zero_mean_velocity: false,
        placement: Placement::UniformRandom,
        ..WaterbagSpec::for_config(&cfg, 3)
    };
    let state = make_waterbag(&spec, BoundaryMode::Periodic, &cfg)?;
    let vc0 = state.center_of_mass().1;
    let mut engine = Engine::new(&state, &cfg, 1e-12)?;
    let mut worst = 0.0f64;
    while let Some(e) = engine.step(10.0)? {
        let (_, vc) = engine.state()?.center_of_mass();
        worst = worst.max((vc - vc0 * (-cfg.gamma() * e.time).exp()).abs());
    }
    Ok(CheckResult::at_most(
        "center_of_mass_velocity_decays",
        worst,
        1e-12,
        format!("v_c(0) = {vc0:e}, γ = 1/√2, every event to t = 10"),
    ))
}

/// Engine and reference integrator from the same start.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleComparison {
    /// Largest per-sheet position difference on the torus.
    pub position_deviation: f64,
    pub velocity_deviation: f64,
    pub events: u64,
}

/// Evolves `spec` to `t_end` with the engine and with crossing-resolved
/// RK4 at step `dt`, and compares every labeled sheet.
pub fn compare_with_reference(
    spec: &WaterbagSpec,
    cfg: &DomainConfig,
    t_end: f64,
    rk4: Rk4,
) -> Result<OracleComparison> {
    let state = make_waterbag(spec, BoundaryMode::Periodic, cfg)?;
    let mut engine = Engine::new(&state, cfg, 1e-13)?;
    engine.advance_to(t_end)?;
    let end = engine.state()?;

    let start = ReferenceState {
        time: 0.0,
        positions: state.positions.clone(),
        velocities: state.velocities.clone(),
    };
    let reference = rk4.integrate(&start, t_end, cfg)?;

    let l = cfg.half_length();
    let mut dx = 0.0f64;
    let mut dv = 0.0f64;
    for (slot, &label) in end.labels.iter().enumerate() {
        dx = dx.max(wrap(end.positions[slot] - reference.positions[label], l).abs());
        dv = dv.max((end.velocities[slot] - reference.velocities[label]).abs());
    }
    Ok(OracleComparison {
        position_deviation: dx,
        velocity_deviation: dv,
        events: engine.event_count(),
    })
}

fn reference_trajectory(n_pairs: usize) -> Result<CheckResult> {
    let cfg = DomainConfig::natural_units(n_pairs, 0.0)?;
    let spec = WaterbagSpec::for_config(&cfg, 1);
    let cmp = compare_with_reference(&spec, &cfg, 2.0, Rk4::new(1e-5)?.resolving_crossings())?;
    Ok(CheckResult::at_most(
        &format!("reference_trajectory_2n_{}", 2 * n_pairs),
        cmp.position_deviation / cfg.half_length(),
        1e-6,
        format!(
            "{} events to t = 2; position deviation / L, velocity deviation {:e}",
            cmp.events, cmp.velocity_deviation
        ),
    ))
}
