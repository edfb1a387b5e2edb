//! Fixed-step reference integrator used to cross-check the event engine.
//!
//! Integrates `x'' + γ x' = E(x)` for every sheet with classical RK4, the
//! field taken from [`total_field_of`] on the current configuration. No gap
//! algebra or event logic is shared with the engine.

use crate::config::DomainConfig;
use crate::error::{Error, Result};
use crate::field::total_field_of;

/// Labeled particles, in label order, on the covering line.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceState {
    pub time: f64,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

/// Classical RK4 with a fixed step.
///
/// The right-hand side jumps whenever two sheets pass, which costs plain
/// RK4 an `O(dt)` velocity error per crossing. With `resolve_crossings` a
/// step that changes the cyclic order is cut at the crossing, located by
/// bisection on the sub-step length, and resumed from just past it.
#[derive(Clone, Copy, Debug)]
pub struct Rk4 {
    pub dt: f64,
    pub resolve_crossings: bool,
}

impl Rk4 {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("step must be positive, got {dt}")));
        }
        Ok(Self {
            dt,
            resolve_crossings: false,
        })
    }

    pub fn resolving_crossings(mut self) -> Self {
        self.resolve_crossings = true;
        self
    }

    /// Advances `state` to `t_end`.
    pub fn integrate(&self, state: &ReferenceState, t_end: f64, cfg: &DomainConfig) -> Result<ReferenceState> {
        if t_end < state.time {
            return Err(Error::InvalidArgument(format!(
                "cannot integrate backwards from {} to {t_end}",
                state.time
            )));
        }
        let steps = ((t_end - state.time) / self.dt).ceil().max(0.0) as u64;
        let h = if steps > 0 {
            (t_end - state.time) / steps as f64
        } else {
            0.0
        };
        Ok(self.take_steps(state, h, steps, cfg))
    }

    /// Exactly `steps` steps of length `h`.
    pub fn take_steps(&self, state: &ReferenceState, h: f64, steps: u64, cfg: &DomainConfig) -> ReferenceState {
        let mut x = state.positions.clone();
        let mut v = state.velocities.clone();
        for _ in 0..steps {
            if self.resolve_crossings {
                resolved_step(&mut x, &mut v, h, cfg);
            } else {
                let (nx, nv) = rk4_step(&x, &v, h, cfg);
                x = nx;
                v = nv;
            }
        }
        ReferenceState {
            time: state.time + h * steps as f64,
            positions: x,
            velocities: v,
        }
    }
}

fn acceleration(x: &[f64], v: &[f64], cfg: &DomainConfig) -> Vec<f64> {
    let gamma = cfg.gamma();
    x.iter()
        .zip(v)
        .map(|(&xi, &vi)| total_field_of(xi, x, cfg) - gamma * vi)
        .collect()
}

fn rk4_step(x: &[f64], v: &[f64], h: f64, cfg: &DomainConfig) -> (Vec<f64>, Vec<f64>) {
    let (nx, nv, _) = rk4_step_with_stages(x, v, h, cfg);
    (nx, nv)
}

/// One RK4 step, also returning the three intermediate stage positions.
fn rk4_step_with_stages(x: &[f64], v: &[f64], h: f64, cfg: &DomainConfig) -> (Vec<f64>, Vec<f64>, [Vec<f64>; 3]) {
    let n = x.len();
    let shift = |base: &[f64], d: &[f64], s: f64| -> Vec<f64> { (0..n).map(|i| base[i] + s * d[i]).collect() };

    let a1 = acceleration(x, v, cfg);
    let (x2, v2) = (shift(x, v, 0.5 * h), shift(v, &a1, 0.5 * h));
    let a2 = acceleration(&x2, &v2, cfg);
    let (x3, v3) = (shift(x, &v2, 0.5 * h), shift(v, &a2, 0.5 * h));
    let a3 = acceleration(&x3, &v3, cfg);
    let (x4, v4) = (shift(x, &v3, h), shift(v, &a3, h));
    let a4 = acceleration(&x4, &v4, cfg);

    let nx = (0..n)
        .map(|i| x[i] + h / 6.0 * (v[i] + 2.0 * v2[i] + 2.0 * v3[i] + v4[i]))
        .collect();
    let nv = (0..n)
        .map(|i| v[i] + h / 6.0 * (a1[i] + 2.0 * a2[i] + 2.0 * a3[i] + a4[i]))
        .collect();
    (nx, nv, [x2, x3, x4])
}

/// Twice the image index of every pair separation, plus one for pairs that
/// coincide exactly. The first part changes whenever a pair passes through
/// each other on the torus; the second flags configurations where the
/// field sees a half-weighted contact.
fn pair_sheets(x: &[f64], period: f64) -> Vec<i64> {
    let n = x.len();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let u = (x[j] - x[i]) / period;
            let k = u.floor();
            out.push(2 * k as i64 + i64::from(u == k));
        }
    }
    out
}

fn has_contact(sheets: &[i64]) -> bool {
    sheets.iter().any(|k| k & 1 == 1)
}

/// A step whose stages and endpoint all keep the starting order samples a
/// smooth right-hand side and keeps full RK4 accuracy.
fn clean_step(
    x: &[f64],
    v: &[f64],
    h: f64,
    before: &[i64],
    cfg: &DomainConfig,
) -> Option<(Vec<f64>, Vec<f64>)> {
    let period = cfg.period();
    let (nx, nv, stages) = rk4_step_with_stages(x, v, h, cfg);
    let clean = stages.iter().chain(std::iter::once(&nx)).all(|p| pair_sheets(p, period) == before);
    clean.then_some((nx, nv))
}

fn resolved_step(x: &mut Vec<f64>, v: &mut Vec<f64>, h: f64, cfg: &DomainConfig) {
    let period = cfg.period();
    let mut remaining = h;
    // Each pass clears at least one crossing; the cap only guards against
    // pathological coincidences.
    for _ in 0..64 {
        let before = pair_sheets(x, period);
        if let Some((nx, nv)) = clean_step(x, v, remaining, &before, cfg) {
            *x = nx;
            *v = nv;
            return;
        }
        // Longest clean sub-step.
        let (mut lo, mut hi) = (0.0, remaining);
        while hi - lo > 1e-15 * (1.0 + remaining) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if clean_step(x, v, mid, &before, cfg).is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (cx, cv) = clean_step(x, v, lo, &before, cfg).unwrap_or_else(|| (x.clone(), v.clone()));
        // Hop over the crossing with a step short enough that the stages
        // sampling the far side cost nothing measurable.
        let rest = remaining - lo;
        let mut hop = (2.0 * (hi - lo)).max(1e-13).min(rest);
        let (mut hx, mut hv) = rk4_step(&cx, &cv, hop, cfg);
        while hop < rest && {
            let after = pair_sheets(&hx, period);
            after == before || has_contact(&after)
        } {
            hop = (2.0 * hop).min(rest);
            (hx, hv) = rk4_step(&cx, &cv, hop, cfg);
        }
        *x = hx;
        *v = hv;
        remaining = rest - hop;
        if remaining <= 0.0 {
            return;
        }
    }
    let (nx, nv) = rk4_step(x, v, remaining, cfg);
    *x = nx;
    *v = nv;
}
