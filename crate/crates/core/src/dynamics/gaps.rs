use crate::config::DomainConfig;
use crate::error::{Error, Result};
use crate::state::SystemState;

/// Cyclic nearest-neighbour gaps `z[r] = x[r+1] - x[r]` and their rates.
///
/// The last entry closes the ring through the periodic image,
/// `z[2N-1] = 2L + x[0] - x[2N-1]`, so `Σz = 2L` and `Σw = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct GapView {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
}

impl GapView {
    pub fn from_state(state: &SystemState, cfg: &DomainConfig) -> Result<Self> {
        state.validate(cfg)?;
        let n = state.len();
        let x = &state.positions;
        let v = &state.velocities;
        let mut z = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        for r in 0..n - 1 {
            z.push(x[r + 1] - x[r]);
            w.push(v[r + 1] - v[r]);
        }
        z.push(cfg.period() + x[0] - x[n - 1]);
        w.push(v[0] - v[n - 1]);
        Ok(Self { z, w })
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    /// `(Σz - 2L, Σw)`.
    pub fn closure_error(&self, cfg: &DomainConfig) -> (f64, f64) {
        (
            self.z.iter().sum::<f64>() - cfg.period(),
            self.w.iter().sum::<f64>(),
        )
    }

    /// Processes the closing of gap `j`: the two sheets swap slots, which
    /// flips `w[j]` and adds its old value to both neighbouring gaps. The
    /// gap is pinned to exactly zero and its residual handed to the next
    /// gap so that `Σz` is untouched.
    pub fn apply_crossing(&mut self, j: usize, z_tolerance: f64) -> Result<()> {
        let n = self.len();
        if j >= n {
            return Err(Error::InvalidArgument(format!("gap {j} out of range for {n} gaps")));
        }
        if self.z[j].abs() > z_tolerance {
            return Err(Error::CrossingNotDue {
                gap: j,
                z: self.z[j],
                tolerance: z_tolerance,
            });
        }
        let (prev, next) = neighbours(j, n);
        let residual = self.z[j];
        self.z[j] = 0.0;
        self.z[next] += residual;
        let old = self.w[j];
        self.w[j] = -old;
        self.w[prev] += old;
        self.w[next] += old;
        Ok(())
    }
}

#[inline]
pub(crate) fn neighbours(j: usize, n: usize) -> (usize, usize) {
    ((j + n - 1) % n, (j + 1) % n)
}

fn closure_tolerance(values: &[f64]) -> f64 {
    1e-9 * values.iter().map(|v| v.abs()).sum::<f64>().max(f64::MIN_POSITIVE)
}

/// Recovers slot values from cyclic differences and their mean.
///
/// With `d[r] = u[r+1] - u[r]` for `r < n-1`, the mean fixes the first
/// slot: `u[0] = mean - (1/n) Σ_{k<n-1} (n-1-k) d[k]`.
fn integrate_differences(diffs: &[f64], mean: f64) -> Vec<f64> {
    let n = diffs.len();
    let nf = n as f64;
    let weighted: f64 = diffs[..n - 1]
        .iter()
        .enumerate()
        .map(|(k, d)| (nf - 1.0 - k as f64) * d)
        .sum();
    let mut out = Vec::with_capacity(n);
    let mut u = mean - weighted / nf;
    out.push(u);
    for d in &diffs[..n - 1] {
        u += d;
        out.push(u);
    }
    out
}

/// Slot velocities from gap rates and the center-of-mass velocity.
pub fn velocities_from_gaps(w: &[f64], v_c: f64, cfg: &DomainConfig) -> Result<Vec<f64>> {
    check_len(w.len(), cfg)?;
    let sum: f64 = w.iter().sum();
    let tolerance = closure_tolerance(w);
    if sum.abs() > tolerance {
        return Err(Error::ClosureMismatch { sum, tolerance });
    }
    Ok(integrate_differences(w, v_c))
}

/// Slot positions on the covering line from gaps and the center of mass.
pub fn positions_from_gaps(z: &[f64], x_c: f64, cfg: &DomainConfig) -> Result<Vec<f64>> {
    check_len(z.len(), cfg)?;
    let sum: f64 = z.iter().sum::<f64>() - cfg.period();
    let tolerance = 1e-9 * cfg.period();
    if sum.abs() > tolerance {
        return Err(Error::ClosureMismatch { sum, tolerance });
    }
    Ok(integrate_differences(z, x_c))
}

fn check_len(len: usize, cfg: &DomainConfig) -> Result<()> {
    if len != cfg.particle_count() {
        return Err(Error::InvalidArgument(format!(
            "expected {} gaps, got {len}",
            cfg.particle_count()
        )));
    }
    Ok(())
}
