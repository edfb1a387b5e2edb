//! Closed-form periodic potential and field of equal-mass sheets.
//!
//! A sheet at `x1` on the ring of circumference `2L` carries its own uniform
//! neutralizing background. With `Δ = x - x1` wrapped into `[-L, L)`:
//!
//! ```text
//! φ1(Δ) = (g/2) (|Δ| - Δ²/(2L))
//! E1(Δ) = (g/2) (Δ/L + Θ(-Δ) - Θ(Δ)),   Θ(0) = 1/2
//! ```
//!
//! `E1` vanishes at the source and at its antipode, so a sheet exerts no
//! force on itself.

use crate::config::DomainConfig;
use crate::state::{wrap, SystemState};

/// Step function with `Θ(0) = 1/2`.
#[inline]
pub fn heaviside(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}

pub fn single_particle_potential(x: f64, x1: f64, cfg: &DomainConfig) -> f64 {
    let l = cfg.half_length();
    let d = wrap(x - x1, l);
    0.5 * cfg.coupling() * (d.abs() - d * d / (2.0 * l))
}

pub fn single_particle_field(x: f64, x1: f64, cfg: &DomainConfig) -> f64 {
    let l = cfg.half_length();
    let d = wrap(x - x1, l);
    0.5 * cfg.coupling() * (d / l + heaviside(-d) - heaviside(d))
}

/// Total field at `x` of the sheets in `state`.
///
/// Uses the center-of-mass form `g [ (n/2L)(x - x_c) + (N_R - N_L)/2 ]`
/// evaluated on the primitive cell, where `n` is the number of sheets and
/// coincident sheets count half left, half right.
pub fn total_field(x: f64, state: &SystemState, cfg: &DomainConfig) -> f64 {
    total_field_of(x, &state.positions, cfg)
}

/// [`total_field`] for a bare list of source positions (any count, any
/// order, covering-line or cell coordinates).
pub fn total_field_of(x: f64, sources: &[f64], cfg: &DomainConfig) -> f64 {
    if sources.is_empty() {
        return 0.0;
    }
    let l = cfg.half_length();
    let xw = wrap(x, l);
    let mut sum = 0.0;
    let mut balance = 0.0;
    for &s in sources {
        let sw = wrap(s, l);
        sum += sw;
        balance += heaviside(sw - xw) - heaviside(xw - sw);
    }
    let n = sources.len() as f64;
    let xc = sum / n;
    cfg.coupling() * (n / (2.0 * l) * (xw - xc) + 0.5 * balance)
}

/// Field of a sheet computed from the primitive cell alone,
/// `(g/2) (x/L + Θ(x1 - x) - Θ(x - x1))`.
///
/// This is *not* a torus field: it depends on where the cell boundary is,
/// jumps when a source is re-expressed across `±L`, and does not vanish at
/// the source itself. It is kept as a negative control.
pub fn primitive_cell_field(x: f64, x1: f64, cfg: &DomainConfig) -> f64 {
    let l = cfg.half_length();
    0.5 * cfg.coupling() * (x / l + heaviside(x1 - x) - heaviside(x - x1))
}

/// Per-unit-mass interaction energy `Σ_{i<j} φ1(x_j - x_i)` of an ordered
/// configuration spanning at most one period. Runs in `O(n)`.
///
/// Within one window every pair separation `d = x_j - x_i` lies in `[0, 2L]`,
/// where `φ1` reduces to `(g/2) d (1 - d/2L)` without wrapping, so the sum
/// only needs `Σ d` and `Σ d²` over pairs.
pub fn interaction_energy(ordered: &[f64], cfg: &DomainConfig) -> f64 {
    let n = ordered.len();
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let shift = ordered.iter().sum::<f64>() / nf;
    let mut sum_d = 0.0;
    let mut sum_x = 0.0;
    let mut sum_x2 = 0.0;
    for (j, &x) in ordered.iter().enumerate() {
        let u = x - shift;
        sum_d += u * (2.0 * j as f64 - (nf - 1.0));
        sum_x += u;
        sum_x2 += u * u;
    }
    let sum_d2 = nf * sum_x2 - sum_x * sum_x;
    let l = cfg.half_length();
    0.5 * cfg.coupling() * (sum_d - sum_d2 / (2.0 * l))
}

/// Kinetic plus interaction energy per unit mass.
pub fn total_energy(state: &SystemState, cfg: &DomainConfig) -> f64 {
    let kinetic: f64 = state.velocities.iter().map(|v| 0.5 * v * v).sum();
    kinetic + interaction_energy(&state.positions, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg(l: f64, n: usize, g: f64) -> DomainConfig {
        DomainConfig::new(l, n, g, 0.0).unwrap()
    }

    /// The replica-sum limit written with the bracketing images
    /// `Y< = y - 2 r< L`, `Y> = Y< - 2L`: `-(g/8L)(Y>² + Y<²)`.
    fn bracketed_potential(y: f64, l: f64, g: f64) -> f64 {
        let r_lo = (y / (2.0 * l)).floor();
        let y_lo = y - 2.0 * r_lo * l;
        let y_hi = y_lo - 2.0 * l;
        -(g / (8.0 * l)) * (y_hi * y_hi + y_lo * y_lo)
    }

    #[test]
    fn potential_examples() {
        let c = cfg(1.0, 1, 1.0);
        assert_eq!(single_particle_potential(0.3, 0.3, &c), 0.0);
        assert_abs_diff_eq!(single_particle_potential(1.0, 0.0, &c), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(single_particle_potential(-1.0, 0.0, &c), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn potential_matches_bracketed_image_form_up_to_constant() {
        let (l, g) = (1.7, 0.8);
        let c = cfg(l, 3, g);
        for i in 0..=400 {
            let y = -3.0 * l + 6.0 * l * i as f64 / 400.0;
            let lhs = single_particle_potential(y, 0.0, &c);
            let rhs = bracketed_potential(y, l, g) + g * l / 2.0;
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn field_examples() {
        let c = cfg(1.0, 5, 1.0);
        assert_eq!(single_particle_field(0.2, 0.2, &c), 0.0);
        assert_eq!(single_particle_field(1.0, 0.0, &c), 0.0);
        assert_eq!(single_particle_field(-1.0, 0.0, &c), 0.0);
        assert_abs_diff_eq!(single_particle_field(0.5, 0.0, &c), -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(single_particle_field(-0.5, 0.0, &c), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn field_is_minus_gradient_of_potential() {
        let c = cfg(2.0, 4, 1.3);
        let h = 1e-6;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let x1 = rng.gen_range(-2.0..2.0);
            let x = rng.gen_range(-6.0..6.0);
            let d = wrap(x - x1, 2.0);
            if d.abs() < 1e-3 || (d.abs() - 2.0).abs() < 1e-3 {
                continue;
            }
            let fd = -(single_particle_potential(x + h, x1, &c)
                - single_particle_potential(x - h, x1, &c))
                / (2.0 * h);
            let e = single_particle_field(x, x1, &c);
            assert!((fd - e).abs() <= 1e-6 * e.abs().max(1e-3), "{fd} vs {e}");
        }
    }

    proptest! {
        #[test]
        fn single_sheet_laws_are_periodic(x in -10.0f64..10.0, x1 in -1.0f64..1.0) {
            let c = cfg(1.0, 2, 1.0);
            let p0 = single_particle_potential(x, x1, &c);
            let p1 = single_particle_potential(x + 2.0, x1, &c);
            prop_assert!((p0 - p1).abs() <= 1e-12);
            let e0 = single_particle_field(x, x1, &c);
            let e1 = single_particle_field(x + 2.0, x1, &c);
            prop_assert!((e0 - e1).abs() <= 1e-12 || (e0.abs() - 0.5).abs() < 1e-9);
        }

        #[test]
        fn potential_is_translation_invariant(x in -1.0f64..1.0, x1 in -1.0f64..1.0, shift in -5.0f64..5.0) {
            let c = cfg(1.0, 2, 1.0);
            let a = single_particle_potential(x, x1, &c);
            let b = single_particle_potential(x + shift, x1 + shift, &c);
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn field_is_odd_in_displacement(d in -0.999f64..0.999) {
            let c = cfg(1.0, 2, 1.0);
            let a = single_particle_field(d, 0.0, &c);
            let b = single_particle_field(-d, 0.0, &c);
            prop_assert!((a + b).abs() <= 1e-14);
        }
    }

    #[test]
    fn two_symmetric_sheets_cancel_at_origin() {
        let c = cfg(1.0, 1, 1.0);
        let state = SystemState::new(0.0, vec![-0.4, 0.4], vec![0.3, -0.1], &c).unwrap();
        assert_abs_diff_eq!(total_field(0.0, &state, &c), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn total_field_matches_pairwise_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..200 {
            let n_pairs = 1 + trial % 32;
            let l = rng.gen_range(0.5..5.0);
            let c = cfg(l, n_pairs, rng.gen_range(0.1..3.0));
            let sources: Vec<f64> = (0..2 * n_pairs).map(|_| rng.gen_range(-l..l)).collect();
            for _ in 0..10 {
                let x = rng.gen_range(-3.0 * l..3.0 * l);
                let oracle: f64 = sources.iter().map(|&s| single_particle_field(x, s, &c)).sum();
                let eq = total_field_of(x, &sources, &c);
                assert!((eq - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()), "{eq} vs {oracle}");
            }
            // Evaluated on a sheet the self term drops out.
            for &s in &sources {
                let oracle: f64 = sources.iter().map(|&t| single_particle_field(s, t, &c)).sum();
                assert!((total_field_of(s, &sources, &c) - oracle).abs() <= 1e-12 * (1.0 + oracle.abs()));
            }
        }
    }

    #[test]
    fn single_source_total_field_is_the_single_sheet_field() {
        let c = DomainConfig::new(1.0, 1, 1.0, 0.0).unwrap();
        for i in 0..100 {
            let x = -1.0 + 0.02 * i as f64;
            assert_abs_diff_eq!(
                total_field_of(x, &[0.3], &c),
                single_particle_field(x, 0.3, &c),
                epsilon = 1e-14
            );
        }
        assert_eq!(total_field_of(0.2, &[], &c), 0.0);
    }

    #[test]
    fn total_field_ignores_replica_shifts() {
        let c = cfg(3.0, 4, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut xs: Vec<f64> = (0..8).map(|_| rng.gen_range(-3.0..3.0)).collect();
        xs.sort_by(f64::total_cmp);
        let before: Vec<f64> = xs.iter().map(|&x| total_field_of(x, &xs, &c)).collect();
        let mut moved = xs.clone();
        moved[2] += 6.0;
        moved[5] -= 6.0;
        // Each sheet is probed at its own (possibly rewritten) coordinate.
        for (i, &x) in moved.iter().enumerate() {
            assert!((total_field_of(x, &moved, &c) - before[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn primitive_cell_field_examples() {
        let c = cfg(1.0, 1, 1.0);
        assert_eq!(primitive_cell_field(0.0, 0.0, &c), 0.0);
        assert_abs_diff_eq!(primitive_cell_field(0.6, 0.6, &c), 0.3, epsilon = 1e-15);
        // The torus field differs by the constant -g x1 / 2L.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let x1 = rng.gen_range(-1.0..1.0);
            let x = rng.gen_range(-1.0..1.0);
            let diff = single_particle_field(x, x1, &c) - primitive_cell_field(x, x1, &c);
            assert_abs_diff_eq!(diff, -0.5 * x1, epsilon = 1e-14);
        }
    }

    #[test]
    fn primitive_cell_field_jumps_across_boundary() {
        let c = cfg(1.0, 1, 1.0);
        let jump = primitive_cell_field(0.2, 1.0, &c) - primitive_cell_field(0.2, -1.0, &c);
        assert_abs_diff_eq!(jump, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            single_particle_field(0.2, 1.0, &c),
            single_particle_field(0.2, -1.0, &c),
            epsilon = 1e-15
        );
    }

    #[test]
    fn interaction_energy_matches_pair_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n_pairs in [1usize, 2, 5, 32] {
            let l = n_pairs as f64;
            let c = cfg(l, n_pairs, 1.0);
            let base = rng.gen_range(-50.0..50.0);
            let mut xs: Vec<f64> = (0..2 * n_pairs).map(|_| base + rng.gen_range(0.0..2.0 * l)).collect();
            xs.sort_by(f64::total_cmp);
            let mut oracle = 0.0;
            for i in 0..xs.len() {
                for j in i + 1..xs.len() {
                    oracle += single_particle_potential(xs[j], xs[i], &c);
                }
            }
            let fast = interaction_energy(&xs, &c);
            assert!((fast - oracle).abs() <= 1e-10 * oracle.abs().max(1.0), "{fast} vs {oracle}");
        }
    }
}
