use serde::{Deserialize, Serialize};

use crate::config::DomainConfig;
use crate::error::{Error, Result};
use crate::state::wrap;

/// Bin counts of wrapped positions over `[-L, L)`.
pub fn histogram(positions: &[f64], bins: usize, cfg: &DomainConfig) -> Vec<u64> {
    let mut counts = vec![0u64; bins.max(1)];
    let l = cfg.half_length();
    let nb = counts.len();
    for &x in positions {
        let u = (wrap(x, l) + l) / (2.0 * l);
        let b = ((u * nb as f64) as usize).min(nb - 1);
        counts[b] += 1;
    }
    counts
}

/// Population variance of histogram counts.
pub fn count_variance(counts: &[u64]) -> f64 {
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<u64>() as f64 / n;
    counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / n
}

/// Pearson correlation of two equally long samples; `NaN` if either is
/// constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "pearson needs samples of equal length");
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    sab / (saa * sbb).sqrt()
}

/// Number of maximal cyclic runs of neighbours closer than `threshold`.
/// A lone sheet counts as a run of one.
pub fn cluster_count(positions: &[f64], threshold: f64, cfg: &DomainConfig) -> Result<usize> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidArgument(format!("cluster threshold must be positive, got {threshold}")));
    }
    if positions.is_empty() {
        return Ok(0);
    }
    let l = cfg.half_length();
    let mut x: Vec<f64> = positions.iter().map(|&p| wrap(p, l)).collect();
    x.sort_by(f64::total_cmp);
    let n = x.len();
    let mut breaks = x.windows(2).filter(|w| w[1] - w[0] >= threshold).count();
    if 2.0 * l + x[0] - x[n - 1] >= threshold {
        breaks += 1;
    }
    Ok(breaks.max(1))
}

/// A discontinuity of the wrapped center of mass between two frames.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterOfMassJump {
    /// Index of the frame after the jump.
    pub frame: usize,
    pub time: f64,
    /// Change of the wrapped value not explained by the smooth cover motion.
    pub size: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CenterOfMassTrace {
    pub times: Vec<f64>,
    pub wrapped: Vec<f64>,
    pub jumps: Vec<CenterOfMassJump>,
}

/// Wrapped center-of-mass series with its jumps annotated.
///
/// The cover-line center of mass is smooth, so any change of the wrapped
/// value beyond it is a boundary traversal. Increments smaller than
/// `1e-6 L/N` are treated as rounding.
pub fn center_of_mass_trace(frames: &[super::DiagnosticsFrame], cfg: &DomainConfig) -> Result<CenterOfMassTrace> {
    if frames.is_empty() {
        return Err(Error::InvalidArgument("center-of-mass trace needs at least one frame".into()));
    }
    let unit = cfg.equilibrium_gap();
    let mut trace = CenterOfMassTrace {
        times: frames.iter().map(|f| f.time).collect(),
        wrapped: frames.iter().map(|f| f.xc_wrapped).collect(),
        jumps: Vec::new(),
    };
    for (k, pair) in frames.windows(2).enumerate() {
        let size = (pair[1].xc_wrapped - pair[0].xc_wrapped) - (pair[1].xc_cover - pair[0].xc_cover);
        if size.abs() > 1e-6 * unit {
            trace.jumps.push(CenterOfMassJump {
                frame: k + 1,
                time: pair[1].time,
                size,
            });
        }
    }
    Ok(trace)
}
