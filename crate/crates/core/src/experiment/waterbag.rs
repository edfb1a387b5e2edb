use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::DomainConfig;
use crate::error::{Error, Result};
use crate::state::{wrap, SystemState};

/// Name of the generator behind every random draw, recorded in manifests.
pub const RNG_NAME: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64)";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Placement {
    /// Equally spaced at the mean gap, offset by half a gap from the edge.
    #[default]
    Lattice,
    /// Independent uniform draws, then sorted.
    UniformRandom,
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Placement::Lattice => "lattice",
            Placement::UniformRandom => "uniform-random",
        })
    }
}

impl FromStr for Placement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(Placement::Lattice),
            "uniform-random" | "uniform" => Ok(Placement::UniformRandom),
            other => Err(Error::InvalidConfig(format!(
                "placement must be \"lattice\" or \"uniform-random\", got {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryMode {
    #[default]
    Periodic,
    /// Every sheet at `(x, v)` has a ghost at `(-x, -v)`; equivalent to half
    /// the sheets between reflecting walls at `0` and `L`.
    Symmetric,
}

impl fmt::Display for BoundaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryMode::Periodic => "periodic",
            BoundaryMode::Symmetric => "symmetric",
        })
    }
}

impl FromStr for BoundaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(BoundaryMode::Periodic),
            "symmetric" => Ok(BoundaryMode::Symmetric),
            other => Err(Error::InvalidConfig(format!(
                "mode must be \"periodic\" or \"symmetric\", got {other:?}"
            ))),
        }
    }
}

/// Uniform rectangle in position-velocity space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaterbagSpec {
    /// Total number of sheets, ghosts included.
    pub count: usize,
    pub velocity_half_width: f64,
    pub placement: Placement,
    pub seed: u64,
    pub zero_mean_velocity: bool,
    /// Shift positions so their mean sits at the middle of the drawing
    /// interval. A mirrored run only tracks its periodic twin from such a
    /// start: any offset of the half-system's center of mass is driven
    /// away from the middle exponentially.
    pub zero_mean_position: bool,
}

impl WaterbagSpec {
    /// Lattice with `v0 = 1/2`, mean velocity removed.
    pub fn for_config(cfg: &DomainConfig, seed: u64) -> Self {
        Self {
            count: cfg.particle_count(),
            velocity_half_width: 0.5,
            placement: Placement::Lattice,
            seed,
            zero_mean_velocity: true,
            zero_mean_position: false,
        }
    }
}

/// Draws an ordered initial state.
///
/// Positions are drawn first and velocities second from one generator, and
/// velocities are assigned in position order. In symmetric mode only the
/// `N` sheets in `[0, L)` are drawn and the rest are their mirror images;
/// those `N` draws coincide with a periodic draw of `N` sheets on a cell of
/// the same length shifted by half a period.
///
/// Raw velocity draws lie in `[-v0, v0)`. The zero-mean correction shifts
/// them by the sample mean and then sets the last one to minus the sum of
/// the others, so `Σv = 0` holds exactly.
///
/// Centering positions only moves sheets outside the drawing interval for
/// tiny samples with a large offset. In symmetric mode such a sheet and its
/// mirror image trade places, and sheets past `±L` wrap around; the
/// mirrored set is unchanged.
pub fn make_waterbag(spec: &WaterbagSpec, mode: BoundaryMode, cfg: &DomainConfig) -> Result<SystemState> {
    let n = cfg.particle_count();
    if spec.count != n {
        return Err(Error::InvalidArgument(format!(
            "waterbag count {} does not match the configured {n} sheets",
            spec.count
        )));
    }
    let v0 = spec.velocity_half_width;
    if !(v0 >= 0.0 && v0.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "velocity half-width must be nonnegative, got {v0}"
        )));
    }
    let l = cfg.half_length();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (drawn, lo) = match mode {
        BoundaryMode::Periodic => (n, -l),
        BoundaryMode::Symmetric => (n / 2, 0.0),
    };
    let width = match mode {
        BoundaryMode::Periodic => 2.0 * l,
        BoundaryMode::Symmetric => l,
    };

    let mut x: Vec<f64> = match spec.placement {
        Placement::Lattice => {
            let dz = width / drawn as f64;
            (0..drawn).map(|r| lo + (r as f64 + 0.5) * dz).collect()
        }
        Placement::UniformRandom => (0..drawn).map(|_| lo + width * rng.gen::<f64>()).collect(),
    };
    x.sort_by(f64::total_cmp);
    if spec.zero_mean_position && drawn > 0 {
        center_positions(&mut x, lo, width);
    }
    let mut v: Vec<f64> = (0..drawn).map(|_| v0 * (2.0 * rng.gen::<f64>() - 1.0)).collect();
    if spec.zero_mean_velocity {
        remove_mean(&mut v);
    }

    let (positions, velocities) = match mode {
        BoundaryMode::Periodic => (x, v),
        BoundaryMode::Symmetric => {
            let mut sheets: Vec<(f64, f64)> = x
                .iter()
                .zip(&v)
                .flat_map(|(&p, &u)| [(p, u), (-p, -u)])
                .map(|(p, u)| (wrap(p, l), u))
                .collect();
            sheets.sort_by(|a, b| a.0.total_cmp(&b.0));
            sheets.into_iter().unzip()
        }
    };
    SystemState::new(0.0, positions, velocities, cfg)
}

/// Moves the mean of sorted `x` to the middle of `[lo, lo + width)`.
///
/// The correction `K (1 - u²)`, `u` the offset from the middle in units of
/// the half-width, vanishes at both ends, so no sheet leaves the interval
/// and the order is kept whenever `4|K| < width`. Otherwise every sheet is
/// shifted by the same amount.
fn center_positions(x: &mut [f64], lo: f64, width: f64) {
    let n = x.len() as f64;
    let mid = lo + 0.5 * width;
    let half = 0.5 * width;
    let offset = x.iter().sum::<f64>() / n - mid;
    let weight = |p: f64| {
        let u = (p - mid) / half;
        1.0 - u * u
    };
    let total: f64 = x.iter().map(|&p| weight(p)).sum();
    let k = n * offset / total;
    if total > 0.0 && 4.0 * k.abs() < width {
        x.iter_mut().for_each(|p| *p -= k * weight(*p));
    } else {
        x.iter_mut().for_each(|p| *p -= offset);
    }
}

fn remove_mean(v: &mut [f64]) {
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    v.iter_mut().for_each(|u| *u -= mean);
    let rest: f64 = v[..n - 1].iter().sum();
    v[n - 1] = -rest;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n_pairs: usize) -> DomainConfig {
        DomainConfig::natural_units(n_pairs, 0.0).unwrap()
    }

    #[test]
    fn cold_lattice_is_the_equilibrium() {
        let c = cfg(4);
        let spec = WaterbagSpec {
            velocity_half_width: 0.0,
            ..WaterbagSpec::for_config(&c, 1)
        };
        let s = make_waterbag(&spec, BoundaryMode::Periodic, &c).unwrap();
        assert_eq!(s.positions, vec![-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5]);
        assert!(s.velocities.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn zero_mean_is_exact_and_draws_are_bounded() {
        let c = cfg(64);
        for placement in [Placement::Lattice, Placement::UniformRandom] {
            let spec = WaterbagSpec {
                placement,
                ..WaterbagSpec::for_config(&c, 9)
            };
            let s = make_waterbag(&spec, BoundaryMode::Periodic, &c).unwrap();
            assert_eq!(s.velocities.iter().sum::<f64>(), 0.0);
            assert!(s.velocities.iter().all(|v| v.abs() <= 1.0));
            assert!(s.positions.iter().all(|x| (-64.0..64.0).contains(x)));
            let raw = WaterbagSpec {
                zero_mean_velocity: false,
                ..spec
            };
            let r = make_waterbag(&raw, BoundaryMode::Periodic, &c).unwrap();
            assert!(r.velocities.iter().all(|v| (-0.5..0.5).contains(v)));
        }
    }

    #[test]
    fn symmetric_mode_is_mirrored_with_vanishing_center_of_mass() {
        let c = cfg(16);
        for placement in [Placement::Lattice, Placement::UniformRandom] {
            let spec = WaterbagSpec {
                placement,
                ..WaterbagSpec::for_config(&c, 3)
            };
            let s = make_waterbag(&spec, BoundaryMode::Symmetric, &c).unwrap();
            for r in 0..32 {
                assert_eq!(s.positions[r], -s.positions[31 - r]);
                assert_eq!(s.velocities[r], -s.velocities[31 - r]);
            }
            let (xc, vc) = s.center_of_mass();
            assert!(xc.abs() <= 1e-15 && vc.abs() <= 1e-15);
        }
    }

    #[test]
    fn symmetric_half_matches_a_shifted_periodic_draw() {
        let small = cfg(8);
        let big = cfg(16);
        for placement in [Placement::Lattice, Placement::UniformRandom] {
            let mut spec = WaterbagSpec {
                placement,
                ..WaterbagSpec::for_config(&small, 21)
            };
            let p = make_waterbag(&spec, BoundaryMode::Periodic, &small).unwrap();
            spec.count = 32;
            let s = make_waterbag(&spec, BoundaryMode::Symmetric, &big).unwrap();
            for k in 0..16 {
                assert!((s.positions[16 + k] - (p.positions[k] + 8.0)).abs() <= 1e-13);
                assert_eq!(s.velocities[16 + k], p.velocities[k]);
            }
        }
    }

    #[test]
    fn centered_draws_have_the_middle_as_mean() {
        let small = cfg(64);
        let big = cfg(128);
        for seed in 0..20 {
            let mut spec = WaterbagSpec {
                placement: Placement::UniformRandom,
                zero_mean_position: true,
                ..WaterbagSpec::for_config(&small, seed)
            };
            let p = make_waterbag(&spec, BoundaryMode::Periodic, &small).unwrap();
            assert!(p.center_of_mass().0.abs() <= 1e-12);
            assert!(p.positions.iter().all(|x| (-64.0..64.0).contains(x)));
            spec.count = 256;
            let s = make_waterbag(&spec, BoundaryMode::Symmetric, &big).unwrap();
            for k in 0..128 {
                assert!((s.positions[128 + k] - (p.positions[k] + 64.0)).abs() <= 1e-12);
                assert_eq!(s.velocities[128 + k], p.velocities[k]);
            }
        }
    }

    #[test]
    fn centering_falls_back_to_a_shift_for_tiny_samples() {
        let mut x = vec![0.9];
        center_positions(&mut x, 0.0, 1.0);
        assert!((x[0] - 0.5).abs() < 1e-15);
        let mut y = vec![0.1, 0.2, 0.9];
        center_positions(&mut y, 0.0, 1.0);
        assert!((y.iter().sum::<f64>() / 3.0 - 0.5).abs() < 1e-15);
        assert!(y.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn deterministic_and_validated() {
        let c = cfg(8);
        let spec = WaterbagSpec {
            placement: Placement::UniformRandom,
            ..WaterbagSpec::for_config(&c, 5)
        };
        let a = make_waterbag(&spec, BoundaryMode::Periodic, &c).unwrap();
        let b = make_waterbag(&spec, BoundaryMode::Periodic, &c).unwrap();
        assert_eq!(a, b);
        let bad = WaterbagSpec {
            velocity_half_width: -1.0,
            ..spec
        };
        assert!(make_waterbag(&bad, BoundaryMode::Periodic, &c).is_err());
        let wrong = WaterbagSpec { count: 4, ..spec };
        assert!(make_waterbag(&wrong, BoundaryMode::Periodic, &c).is_err());
    }

    #[test]
    fn names_round_trip() {
        for m in [BoundaryMode::Periodic, BoundaryMode::Symmetric] {
            assert_eq!(m.to_string().parse::<BoundaryMode>().unwrap(), m);
        }
        for p in [Placement::Lattice, Placement::UniformRandom] {
            assert_eq!(p.to_string().parse::<Placement>().unwrap(), p);
        }
        assert!("reflecting".parse::<BoundaryMode>().is_err());
    }
}
