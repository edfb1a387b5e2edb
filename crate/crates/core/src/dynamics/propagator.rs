use serde::{Deserialize, Serialize};

use crate::config::DomainConfig;
use crate::error::{Error, Result};

/// Closed-form solution of one gap's equation of motion,
/// `w' + γw = A (z - z*)`, between two crossing events:
///
/// ```text
/// z(t) = z* + α e^{λ+ τ} + β e^{λ- τ},   τ = t - t_ref
/// ```
///
/// with `λ±` the roots of `λ² + γλ - A = 0`, so `λ+ > 0 > λ-`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapPropagator {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub z_star: f64,
    pub alpha: f64,
    pub beta: f64,
    pub t_ref: f64,
    /// Gap and rate at `t_ref`, kept verbatim so the start of the segment is
    /// exact rather than reconstructed from the modes.
    pub z0: f64,
    pub w0: f64,
}

/// Characteristic rates `(λ+, λ-)` for stiffness `a` and friction `gamma`.
pub fn characteristic_rates(a: f64, gamma: f64) -> (f64, f64) {
    let root = (gamma * gamma + 4.0 * a).sqrt();
    // λ+ = (-γ + root)/2 written without cancellation.
    let lambda_plus = 2.0 * a / (gamma + root);
    let lambda_minus = -0.5 * (gamma + root);
    (lambda_plus, lambda_minus)
}

/// Fits the propagator through `(z0, w0)` at `t_ref`.
pub fn build_propagator(z0: f64, w0: f64, t_ref: f64, cfg: &DomainConfig) -> Result<GapPropagator> {
    let a = cfg.stiffness();
    if a.is_nan() || a <= 0.0 {
        return Err(Error::InvalidConfig(format!("gap stiffness must be positive, got {a}")));
    }
    let (lp, lm) = characteristic_rates(a, cfg.gamma());
    Ok(GapPropagator::from_rates(z0, w0, t_ref, cfg.equilibrium_gap(), lp, lm))
}

impl GapPropagator {
    pub(crate) fn from_rates(z0: f64, w0: f64, t_ref: f64, z_star: f64, lp: f64, lm: f64) -> Self {
        let dz = z0 - z_star;
        let split = lp - lm;
        Self {
            lambda_plus: lp,
            lambda_minus: lm,
            z_star,
            alpha: (w0 - lm * dz) / split,
            beta: (dz * lp - w0) / split,
            t_ref,
            z0,
            w0,
        }
    }

    /// Gap and gap velocity at absolute time `t`.
    #[inline]
    pub fn eval(&self, t: f64) -> (f64, f64) {
        self.eval_local(t - self.t_ref)
    }

    #[inline]
    fn eval_local(&self, tau: f64) -> (f64, f64) {
        if tau == 0.0 {
            return (self.z0, self.w0);
        }
        let ep = self.alpha * (self.lambda_plus * tau).exp();
        let em = self.beta * (self.lambda_minus * tau).exp();
        (
            self.z_star + ep + em,
            self.lambda_plus * ep + self.lambda_minus * em,
        )
    }

    /// Local time of the unique stationary point of `z`, if it has one.
    pub fn extremum(&self) -> Option<f64> {
        if self.alpha == 0.0 || self.beta == 0.0 {
            return None;
        }
        let arg = -self.beta * self.lambda_minus / (self.alpha * self.lambda_plus);
        (arg > 0.0 && arg.is_finite()).then(|| arg.ln() / (self.lambda_plus - self.lambda_minus))
    }

    /// Earliest time after `t_now` at which the gap closes, located to
    /// within `tol`; `None` if it never closes.
    ///
    /// `z` has at most one stationary point, so the future splits into at
    /// most two monotone pieces. The first piece that changes sign is
    /// bracketed and refined by safeguarded Newton–bisection. A gap that is
    /// exactly closed and opening (a crossing just processed) is not
    /// reported again; one that is closed or closing now is reported at
    /// `t_now`.
    pub fn next_crossing_time(&self, t_now: f64, tol: f64) -> Result<Option<f64>> {
        let tau0 = t_now - self.t_ref;
        let (z0, w0) = self.eval_local(tau0);
        if z0 < 0.0 || (z0 == 0.0 && w0 < 0.0) {
            return Ok(Some(t_now));
        }
        if z0 == 0.0 && w0 == 0.0 {
            // Tangential contact: measure zero, treat as a touch.
            return Ok(None);
        }

        let mut start = tau0;
        if let Some(te) = self.extremum().filter(|&te| te > tau0) {
            let (z_ext, _) = self.eval_local(te);
            if z_ext < 0.0 {
                // Closes before reaching its minimum.
                let tau = self.refine(tau0, te, tol)?;
                return Ok(Some(self.t_ref + tau));
            }
            start = te;
        }

        // Monotone from `start` on; only a negative growing mode drives it
        // through zero.
        if self.alpha >= 0.0 {
            return Ok(None);
        }
        let mut step = 1.0 / self.lambda_plus;
        let mut hi = start + step;
        let mut tries = 0;
        while self.eval_local(hi).0 >= 0.0 {
            step *= 2.0;
            hi = start + step;
            tries += 1;
            if tries > 200 || !hi.is_finite() {
                return Err(self.failure("could not bracket the crossing"));
            }
        }
        let tau = self.refine(start, hi, tol)?;
        Ok(Some(self.t_ref + tau))
    }

    /// Root of `z` in `(lo, hi)` with `z(lo) ≥ 0 > z(hi)`.
    fn refine(&self, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
        let mut x = 0.5 * (lo + hi);
        for _ in 0..300 {
            let (z, w) = self.eval_local(x);
            if z == 0.0 {
                return Ok(x);
            }
            if z > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let newton = x - z / w;
            let next = if w != 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            let dx = (next - x).abs();
            x = next;
            if dx <= tol || hi - lo <= tol * 1e-3 {
                return Ok(x);
            }
        }
        Err(self.failure("Newton-bisection did not converge"))
    }

    fn failure(&self, reason: &'static str) -> Error {
        Error::RootSolver {
            gap: usize::MAX,
            reason,
            propagator: *self,
        }
    }
}
