//! Independent routes to the periodic potential and field.
//!
//! Three constructions that must agree with the closed forms in
//! [`crate::field`]:
//!
//! * truncated Fourier series over harmonics `n = 1..=n_max`,
//! * exponentially screened sums over periodic images, both as an explicit
//!   truncated replica sum and as its geometric-series closed form,
//! * the series for the field of the primitive cell alone.
//!
//! All potentials here use the zero-mean gauge: for one source the
//! screened and Fourier potentials converge to `φ1 - gL/6`, where `φ1` is
//! [`crate::field::single_particle_potential`] (gauged to vanish at the
//! source).
//!
//! Fourier coefficients are reported pre-multiplied by `4πG`, so that a
//! sheet contributes `g/2L` instead of `m/2L`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::config::DomainConfig;
use crate::error::{Error, Result};
use crate::state::wrap;
use crate::summation::Neumaier;

/// Highest harmonic kept in a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FourierTruncation {
    n_max: usize,
}

impl FourierTruncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Radius around each source inside which the truncated series is not
    /// expected to resolve the field jump: two wavelengths of the highest
    /// harmonic, `4L/n_max`.
    pub fn gibbs_radius(&self, cfg: &DomainConfig) -> f64 {
        4.0 * cfg.half_length() / self.n_max as f64
    }
}

/// Screening wavenumber and image truncation for the direct replica sum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScreeningParameter {
    kappa: f64,
    r_max: usize,
    tolerance: f64,
}

impl ScreeningParameter {
    pub fn new(kappa: f64, r_max: usize) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
        }
        if r_max == 0 {
            return Err(Error::InvalidArgument("r_max must be at least 1".into()));
        }
        Ok(Self {
            kappa,
            r_max,
            tolerance: 1e-12,
        })
    }

    /// Smallest image count whose geometric tail ratio `exp(-2κL r_max)`
    /// is below `tolerance`.
    pub fn sized_for(kappa: f64, cfg: &DomainConfig, tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must lie in (0, 1), got {tolerance}"
            )));
        }
        let per_image = 2.0 * kappa * cfg.half_length();
        let r_max = (-tolerance.ln() / per_image).ceil().max(1.0) as usize;
        Ok(Self::new(kappa, r_max)?.with_tolerance(tolerance))
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Ratio `exp(-2κL r_max)` between the first dropped image shell and
    /// the leading one.
    pub fn geometric_tail_ratio(&self, cfg: &DomainConfig) -> f64 {
        (-2.0 * self.kappa * cfg.half_length() * self.r_max as f64).exp()
    }
}

/// A screened potential split into the image sum and the uniform
/// background it contains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScreenedValue {
    /// `(g/2) Σ_r |y - 2rL| exp(-κ|y - 2rL|)`.
    pub raw: f64,
    /// Background contribution `g / (2L κ²)` of one sheet's share of the
    /// mean density.
    pub background: f64,
    /// `raw - background`, evaluated without the cancellation where the
    /// closed form allows it.
    pub fluctuation: f64,
    /// Upper bound on the dropped images (zero for the closed form).
    pub tail_bound: f64,
}

impl ScreenedValue {
    /// Potential of the density fluctuation.
    pub fn potential(&self) -> f64 {
        self.fluctuation
    }
}

/// `4πG c_n` for sheets at `positions`: `(g/2L) Σ_j exp(-iπn x_j / L)`.
pub fn fourier_coefficient(positions: &[f64], n: i64, cfg: &DomainConfig) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "the n = 0 harmonic is absent from a mass-neutral fluctuation".into(),
        ));
    }
    let l = cfg.half_length();
    let (mut re, mut im) = (Neumaier::new(), Neumaier::new());
    for &x in positions {
        // Reduce the phase before multiplying by n; exp is 2L-periodic.
        let phase = -PI * (n as f64) * wrap(x, l) / l;
        let (s, c) = phase.sin_cos();
        re.add(c);
        im.add(s);
    }
    Ok(Complex64::new(re.total(), im.total()) * (cfg.coupling() / (2.0 * l)))
}

/// Truncated Fourier potential `-(gL/π²) Σ_j Σ_{n≤n_max} cos(πn(x-x_j)/L) / n²`.
pub fn series_potential(x: f64, positions: &[f64], trunc: FourierTruncation, cfg: &DomainConfig) -> f64 {
    let l = cfg.half_length();
    let mut acc = Neumaier::new();
    for &xj in positions {
        let theta = PI * wrap(x - xj, l) / l;
        for n in 1..=trunc.n_max {
            let nf = n as f64;
            acc.add((nf * theta).cos() / (nf * nf));
        }
    }
    -cfg.coupling() * l / (PI * PI) * acc.total()
}

/// Truncated Fourier field `-(g/π) Σ_j Σ_{n≤n_max} sin(πn(x-x_j)/L) / n`.
///
/// Vanishes exactly on a source, matching the `Θ(0) = 1/2` convention.
pub fn series_field(x: f64, positions: &[f64], trunc: FourierTruncation, cfg: &DomainConfig) -> f64 {
    let l = cfg.half_length();
    let mut acc = Neumaier::new();
    for &xj in positions {
        let theta = PI * wrap(x - xj, l) / l;
        for n in 1..=trunc.n_max {
            let nf = n as f64;
            acc.add((nf * theta).sin() / nf);
        }
    }
    -cfg.coupling() / PI * acc.total()
}

/// Series for the field of the primitive cell alone,
/// `i Σ'_{|n|≤n_max} (4πG c_n) (L/πn) [exp(iπnx/L) - (-1)^n]`.
///
/// Forced to zero at `x = ±L` for every source set.
pub fn primitive_cell_series_field(
    x: f64,
    positions: &[f64],
    trunc: FourierTruncation,
    cfg: &DomainConfig,
) -> f64 {
    primitive_cell_series_field_complex(x, positions, trunc, cfg).re
}

pub(crate) fn primitive_cell_series_field_complex(
    x: f64,
    positions: &[f64],
    trunc: FourierTruncation,
    cfg: &DomainConfig,
) -> Complex64 {
    let l = cfg.half_length();
    let (mut re, mut im) = (Neumaier::new(), Neumaier::new());
    for n in 1..=trunc.n_max as i64 {
        for sign in [1i64, -1] {
            let k = sign * n;
            let c = fourier_coefficient(positions, k, cfg).expect("k is nonzero");
            let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
            let phase = Complex64::from_polar(1.0, PI * (k as f64) * x / l);
            let term = Complex64::i() * c * (l / (PI * k as f64)) * (phase - parity);
            re.add(term.re);
            im.add(term.im);
        }
    }
    Complex64::new(re.total(), im.total())
}

/// Cosine transform of the screened kernel,
/// `∫ |u| exp(-κ|u|) cos(πnu/L) du = 2 (κ² - k²) / (κ² + k²)²`, `k = πn/L`.
pub fn screening_kernel(kappa: f64, n: i64, cfg: &DomainConfig) -> f64 {
    let k = PI * n as f64 / cfg.half_length();
    let (k2, q2) = (kappa * kappa, k * k);
    2.0 * (k2 - q2) / ((k2 + q2) * (k2 + q2))
}

/// Screened potential of a sheet at `x1` by explicit summation over the
/// images `|r| ≤ r_max`, background removed.
pub fn screened_potential_direct(
    x: f64,
    x1: f64,
    scr: ScreeningParameter,
    cfg: &DomainConfig,
) -> ScreenedValue {
    let l = cfg.half_length();
    let g = cfg.coupling();
    let kappa = scr.kappa;
    let ratio = scr.geometric_tail_ratio(cfg);
    if ratio > scr.tolerance {
        log::warn!(
            "replica sum truncated at r_max = {} leaves tail ratio {ratio:e} above tolerance {:e}",
            scr.r_max,
            scr.tolerance
        );
    }

    let y = wrap(x - x1, l);
    let mut acc = Neumaier::new();
    let image = |r: i64| {
        let d = (y - 2.0 * r as f64 * l).abs();
        d * (-kappa * d).exp()
    };
    acc.add(image(0));
    for r in 1..=scr.r_max as i64 {
        acc.add(image(r));
        acc.add(image(-r));
    }

    let raw = 0.5 * g * acc.total();
    let background = background_term(kappa, cfg);
    ScreenedValue {
        raw,
        background,
        fluctuation: raw - background,
        tail_bound: image_tail_bound(kappa, scr.r_max, cfg),
    }
}

/// Geometric-series closed form of the screened potential, with the image
/// bracket `r< = floor(y / 2L)`.
pub fn screened_potential_closed(x: f64, x1: f64, kappa: f64, cfg: &DomainConfig) -> Result<ScreenedValue> {
    let y = x - x1;
    let r_lo = (y / cfg.period()).floor() as i64;
    screened_potential_closed_bracketed(y, r_lo, kappa, cfg)
}

/// Closed form with an explicit lower image index `r<`, which must satisfy
/// `r< ≤ y/2L ≤ r< + 1`. When `y` is an exact multiple of `2L` both
/// admissible choices give the same value.
pub fn screened_potential_closed_bracketed(
    y: f64,
    r_lo: i64,
    kappa: f64,
    cfg: &DomainConfig,
) -> Result<ScreenedValue> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    let l = cfg.half_length();
    let g = cfg.coupling();
    let y_lo = y - 2.0 * r_lo as f64 * l;
    let slack = 1e-12 * (1.0 + y.abs());
    if y_lo < -slack || y_lo > 2.0 * l + slack {
        return Err(Error::InvalidArgument(format!(
            "r< = {r_lo} does not bracket y/2L = {}",
            y / (2.0 * l)
        )));
    }
    // Offset from the midpoint between the bracketing images, |c| ≤ L.
    let c = (l - y_lo).clamp(-l, l);
    let x_scaled = kappa * l;
    let background = background_term(kappa, cfg);

    let (raw, fluctuation) = if x_scaled < SERIES_SWITCH {
        let f = 0.5 * g * small_screening_series(x_scaled, c / l, l);
        (f + background, f)
    } else {
        let q = (-2.0 * x_scaled).exp();
        let a = (kappa * (c - l)).exp();
        let b = (-kappa * (c + l)).exp();
        let num = l * (a + b) * (1.0 + q) - c * (a - b) * (1.0 - q);
        let den = -(-2.0 * x_scaled).exp_m1();
        let raw = 0.5 * g * num / (den * den);
        (raw, raw - background)
    };
    Ok(ScreenedValue {
        raw,
        background,
        fluctuation,
        tail_bound: 0.0,
    })
}

/// The `κ → 0` limit of the screened closed form,
/// `-(g/8L)(Y>² + Y<²) + gL/3`, equal to `φ1 - gL/6`.
pub fn screened_potential_limit(x: f64, x1: f64, cfg: &DomainConfig) -> f64 {
    let l = cfg.half_length();
    let y = x - x1;
    let r_lo = (y / (2.0 * l)).floor();
    let y_lo = y - 2.0 * r_lo * l;
    let y_hi = y_lo - 2.0 * l;
    -(cfg.coupling() / (8.0 * l)) * (y_hi * y_hi + y_lo * y_lo) + cfg.coupling() * l / 3.0
}

const SERIES_SWITCH: f64 = 0.5;
const SERIES_TERMS: usize = 14;

fn background_term(kappa: f64, cfg: &DomainConfig) -> f64 {
    cfg.coupling() / (2.0 * cfg.half_length() * kappa * kappa)
}

/// Bound on `(g/2) Σ_{|r|>R} |y-2rL| e^{-κ|y-2rL|}` for `|y| ≤ L`, using
/// `(2|r|-1)L ≤ |y-2rL| ≤ (2|r|+1)L`.
fn image_tail_bound(kappa: f64, r_max: usize, cfg: &DomainConfig) -> f64 {
    let l = cfg.half_length();
    let r = r_max as f64;
    let q = (-2.0 * kappa * l).exp();
    let one_minus_q = -(-2.0 * kappa * l).exp_m1();
    let lead = (-kappa * l * (2.0 * r + 1.0)).exp();
    let weighted = 2.0 * ((r + 1.0) - r * q) / (one_minus_q * one_minus_q) + 1.0 / one_minus_q;
    cfg.coupling() * l * lead * weighted
}

/// `-(d/dκ)[cosh(κc) csch(κL) - 1/(κL)]` expanded in `s = κL` with
/// `ρ = c/L`: `-L Σ_{m≥1} (2m-1) C_m s^{2m-2}`, where
/// `C_m = Σ_{j=0..m} q_{m-j} ρ^{2j} / (2j)!` and `q_n` are the Taylor
/// coefficients of `s csch(s)`.
fn small_screening_series(s: f64, rho: f64, l: f64) -> f64 {
    let q = csch_coefficients();
    let rho2 = rho * rho;
    let s2 = s * s;
    // cosh coefficients ρ^{2j}/(2j)!
    let mut cosh_c = [0.0; SERIES_TERMS + 1];
    cosh_c[0] = 1.0;
    for j in 1..=SERIES_TERMS {
        cosh_c[j] = cosh_c[j - 1] * rho2 / ((2 * j - 1) * (2 * j)) as f64;
    }
    let mut acc = Neumaier::new();
    let mut s_pow = 1.0;
    for m in 1..=SERIES_TERMS {
        let c_m: f64 = (0..=m).map(|j| q[m - j] * cosh_c[j]).sum();
        acc.add((2 * m - 1) as f64 * c_m * s_pow);
        s_pow *= s2;
    }
    -l * acc.total()
}

/// Taylor coefficients of `s csch(s) = Σ q_n s^{2n}` from
/// `(s csch s)(sinh(s)/s) = 1`.
fn csch_coefficients() -> [f64; SERIES_TERMS + 1] {
    let mut q = [0.0; SERIES_TERMS + 1];
    q[0] = 1.0;
    for n in 1..=SERIES_TERMS {
        let mut fact = 1.0; // (2k+1)!
        let mut acc = 0.0;
        for k in 1..=n {
            fact *= ((2 * k) * (2 * k + 1)) as f64;
            acc += q[n - k] / fact;
        }
        q[n] = -acc;
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{single_particle_field, single_particle_potential};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit(l: f64, g: f64) -> DomainConfig {
        DomainConfig::new(l, 1, g, 0.0).unwrap()
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(FourierTruncation::new(0).is_err());
        assert!(ScreeningParameter::new(0.0, 3).is_err());
        assert!(ScreeningParameter::new(1.0, 0).is_err());
        let c = unit(1.0, 1.0);
        assert!(fourier_coefficient(&[0.1], 0, &c).is_err());
        assert!(screened_potential_closed(0.1, 0.0, 0.0, &c).is_err());
        assert!(screened_potential_closed(0.1, 0.0, -1.0, &c).is_err());
    }

    #[test]
    fn csch_coefficients_match_known_values() {
        let q = csch_coefficients();
        assert_abs_diff_eq!(q[1], -1.0 / 6.0, epsilon = 1e-16);
        assert_abs_diff_eq!(q[2], 7.0 / 360.0, epsilon = 1e-16);
        assert_abs_diff_eq!(q[3], -31.0 / 15120.0, epsilon = 1e-16);
        assert_abs_diff_eq!(q[4], 127.0 / 604800.0, epsilon = 1e-17);
    }

    #[test]
    fn coefficient_of_a_sheet_at_origin() {
        let c = unit(2.0, 3.0);
        for n in [-7, -1, 1, 2, 50] {
            let cn = fourier_coefficient(&[0.0], n, &c).unwrap();
            assert_abs_diff_eq!(cn.re, 3.0 / 4.0, epsilon = 1e-15);
            assert_abs_diff_eq!(cn.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn lattice_coefficients_vanish_off_multiples() {
        let c = DomainConfig::new(1.0, 4, 1.0, 0.0).unwrap();
        let lattice: Vec<f64> = (0..8).map(|j| -1.0 + 0.25 * j as f64 + 0.1).collect();
        for n in 1..=20i64 {
            let cn = fourier_coefficient(&lattice, n, &c).unwrap();
            if n % 8 == 0 {
                assert_abs_diff_eq!(cn.norm(), 8.0 / 2.0, epsilon = 1e-12);
            } else {
                assert!(cn.norm() < 1e-13, "n = {n}: {cn}");
            }
        }
    }

    #[test]
    fn coefficients_are_hermitian_and_bounded() {
        let c = DomainConfig::new(1.5, 3, 0.7, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let bound = 6.0 * 0.7 / 3.0;
        for n in 1..30 {
            let a = fourier_coefficient(&xs, n, &c).unwrap();
            let b = fourier_coefficient(&xs, -n, &c).unwrap();
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-14);
            assert_abs_diff_eq!(a.im, -b.im, epsilon = 1e-14);
            assert!(a.norm() <= bound + 1e-14);
        }
    }

    #[test]
    fn coefficients_match_quadrature_of_delta_sources() {
        // A narrow normalized Gaussian stands in for each delta; its
        // transform is damped by exp(-(πnσ/L)²/2).
        let c = DomainConfig::new(1.0, 2, 1.0, 0.0).unwrap();
        let xs = [-0.63, -0.1, 0.27, 0.8];
        let sigma: f64 = 2e-3;
        let m = 400_000;
        let h = 2.0 / m as f64;
        for n in [1i64, 3, 7] {
            let (mut re, mut im) = (Neumaier::new(), Neumaier::new());
            for i in 0..m {
                let x = -1.0 + (i as f64 + 0.5) * h;
                let mut rho = 0.0;
                for &xj in &xs {
                    for shift in [-2.0, 0.0, 2.0] {
                        let u = (x - xj - shift) / sigma;
                        rho += (-0.5 * u * u).exp() / (sigma * (2.0 * PI).sqrt());
                    }
                }
                let phase = -PI * n as f64 * x;
                re.add(rho * phase.cos() * h);
                im.add(rho * phase.sin() * h);
            }
            let damp = (-0.5 * (PI * n as f64 * sigma).powi(2)).exp();
            let quad = Complex64::new(re.total(), im.total()) / (2.0 * damp);
            let cn = fourier_coefficient(&xs, n, &c).unwrap();
            assert!((quad - cn).norm() < 1e-9, "n = {n}: {quad} vs {cn}");
        }
    }

    #[test]
    fn series_potential_converges_to_zero_mean_closed_form() {
        let (l, g) = (1.0, 1.0);
        let c = unit(l, g);
        let trunc = FourierTruncation::new(100_000).unwrap();
        let grid: Vec<f64> = (0..1000).map(|i| -l + 2.0 * l * i as f64 / 1000.0).collect();
        let diffs: Vec<f64> = grid
            .iter()
            .map(|&x| series_potential(x, &[0.0], trunc, &c) - single_particle_potential(x, 0.0, &c))
            .collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let worst = diffs.iter().map(|d| (d - mean).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-4 * g * l, "deviation {worst}");
        assert_abs_diff_eq!(mean, -g * l / 6.0, epsilon = 1e-5);
    }

    #[test]
    fn series_potential_on_source_approaches_basel_limit() {
        let c = unit(1.0, 1.0);
        let mut last_gap = f64::INFINITY;
        for n_max in [10, 100, 1000, 10_000] {
            let trunc = FourierTruncation::new(n_max).unwrap();
            let v = series_potential(0.4, &[0.4], trunc, &c);
            let basel: f64 = (1..=n_max).map(|n| 1.0 / (n * n) as f64).sum();
            assert_abs_diff_eq!(v, -basel / (PI * PI), epsilon = 1e-14);
            let gap = (v + 1.0 / 6.0).abs();
            assert!(gap < last_gap);
            last_gap = gap;
        }
        assert!(last_gap < 2e-5);
    }

    #[test]
    fn series_symmetries() {
        let c = unit(1.0, 1.0);
        let trunc = FourierTruncation::new(500).unwrap();
        for d in [0.1, 0.37, 0.9] {
            assert_abs_diff_eq!(
                series_potential(d, &[0.0], trunc, &c),
                series_potential(-d, &[0.0], trunc, &c),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                series_field(d, &[0.0], trunc, &c),
                -series_field(-d, &[0.0], trunc, &c),
                epsilon = 1e-12
            );
        }
        for n_max in [1, 10, 1000] {
            let t = FourierTruncation::new(n_max).unwrap();
            assert_eq!(series_field(0.3, &[0.3], t, &c), 0.0);
        }
    }

    #[test]
    fn series_field_at_quarter_period() {
        let c = unit(1.0, 1.0);
        let trunc = FourierTruncation::new(10_000).unwrap();
        let v = series_field(0.5, &[0.0], trunc, &c);
        assert!((v - single_particle_field(0.5, 0.0, &c)).abs() < 1e-3);
    }

    #[test]
    fn series_are_translation_covariant() {
        let c = DomainConfig::new(1.0, 2, 1.0, 0.0).unwrap();
        let trunc = FourierTruncation::new(300).unwrap();
        let xs = [-0.7, -0.2, 0.1, 0.55];
        for delta in [0.013, 0.5, -0.81] {
            let moved: Vec<f64> = xs.iter().map(|x| x + delta).collect();
            for x in [-0.9, -0.31, 0.0, 0.42] {
                assert_abs_diff_eq!(
                    series_field(x, &xs, trunc, &c),
                    series_field(x + delta, &moved, trunc, &c),
                    epsilon = 1e-12
                );
                assert_abs_diff_eq!(
                    series_potential(x, &xs, trunc, &c),
                    series_potential(x + delta, &moved, trunc, &c),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn primitive_cell_series_vanishes_at_boundary_and_is_real() {
        let c = DomainConfig::new(1.0, 2, 1.0, 0.0).unwrap();
        let trunc = FourierTruncation::new(200).unwrap();
        let xs = [-0.3, 0.05, 0.6, 0.9];
        assert_abs_diff_eq!(primitive_cell_series_field(1.0, &xs, trunc, &c), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(primitive_cell_series_field(-1.0, &xs, trunc, &c), 0.0, epsilon = 1e-12);
        for x in [-0.8, 0.0, 0.33] {
            let z = primitive_cell_series_field_complex(x, &xs, trunc, &c);
            assert!(z.im.abs() <= 1e-12);
        }
    }

    #[test]
    fn primitive_cell_series_matches_closed_negative_control() {
        use crate::field::primitive_cell_field;
        let c = unit(1.0, 1.0);
        let trunc = FourierTruncation::new(4000).unwrap();
        let x1 = 0.35;
        for i in 0..41 {
            let x = -0.95 + 0.0475 * i as f64;
            if (x - x1).abs() < 0.05 {
                continue;
            }
            let s = primitive_cell_series_field(x, &[x1], trunc, &c);
            assert!((s - primitive_cell_field(x, x1, &c)).abs() < 2e-3, "x = {x}");
        }
    }

    #[test]
    fn primitive_cell_series_is_odd_for_mirrored_pair() {
        let c = unit(1.0, 1.0);
        let trunc = FourierTruncation::new(500).unwrap();
        for x in [0.1, 0.45, 0.8] {
            assert_abs_diff_eq!(
                primitive_cell_series_field(x, &[-0.4, 0.4], trunc, &c),
                -primitive_cell_series_field(-x, &[-0.4, 0.4], trunc, &c),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn kernel_matches_quadrature() {
        let c = unit(1.3, 1.0);
        for (kappa, n) in [(0.7, 1i64), (2.5, 3), (0.2, 2)] {
            // ∫_{-∞}^{∞} = 2 ∫_0^U, Simpson on [0, U] with U = 60/κ.
            let upper = 60.0 / kappa;
            let m = 400_000;
            let h = upper / m as f64;
            let k = PI * n as f64 / 1.3;
            let f = |u: f64| u * (-kappa * u).exp() * (k * u).cos();
            let mut acc = Neumaier::new();
            for i in 0..=m {
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc.add(w * f(i as f64 * h));
            }
            let quad = 2.0 * acc.total() * h / 3.0;
            let exact = screening_kernel(kappa, n, &c);
            assert!((quad - exact).abs() < 1e-9 * exact.abs().max(1.0), "{quad} vs {exact}");
        }
    }

    #[test]
    fn tail_bound_examples() {
        let c = unit(1.0, 1.0);
        let scr = ScreeningParameter::new(5.0, 10).unwrap();
        assert!(scr.geometric_tail_ratio(&c) < 1e-21);
        let v = screened_potential_direct(0.2, 0.0, scr, &c);
        assert!(v.tail_bound < 1e-21 * v.raw);
        let sized = ScreeningParameter::sized_for(1e-2, &c, 1e-12).unwrap();
        assert!(sized.geometric_tail_ratio(&c) <= 1e-12);
    }

    #[test]
    fn direct_and_closed_agree() {
        let c = unit(1.0, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for kappa in [1e-2, 0.3, 0.49, 0.51, 2.0, 20.0] {
            let scr = ScreeningParameter::sized_for(kappa, &c, 1e-14).unwrap();
            for _ in 0..20 {
                let x = rng.gen_range(-3.0..3.0);
                let x1 = rng.gen_range(-1.0..1.0);
                let d = screened_potential_direct(x, x1, scr, &c);
                let k = screened_potential_closed(x, x1, kappa, &c).unwrap();
                assert!((d.raw - k.raw).abs() <= 1e-11 * k.raw.abs(), "κ = {kappa}: {} vs {}", d.raw, k.raw);
                assert_eq!(d.background, k.background);
            }
        }
    }

    #[test]
    fn closed_form_is_continuous_across_series_switch() {
        let c = unit(1.0, 1.0);
        for y in [0.0, 0.3, 1.0, 1.7] {
            let lo = screened_potential_closed(y, 0.0, SERIES_SWITCH * (1.0 - 1e-9), &c).unwrap();
            let hi = screened_potential_closed(y, 0.0, SERIES_SWITCH * (1.0 + 1e-9), &c).unwrap();
            assert_abs_diff_eq!(lo.potential(), hi.potential(), epsilon = 1e-9);
        }
    }

    #[test]
    fn bracketing_choice_is_irrelevant_at_image_boundaries() {
        let c = unit(1.0, 1.0);
        for r in [-2i64, 0, 1, 3] {
            let y = 2.0 * r as f64;
            for kappa in [1e-3, 0.2, 1.5] {
                let a = screened_potential_closed_bracketed(y, r, kappa, &c).unwrap();
                let b = screened_potential_closed_bracketed(y, r - 1, kappa, &c).unwrap();
                assert_abs_diff_eq!(a.potential(), b.potential(), epsilon = 1e-12);
            }
        }
        assert!(screened_potential_closed_bracketed(0.5, 1, 0.1, &c).is_err());
    }

    #[test]
    fn closed_form_limit_and_gauge() {
        let (l, g) = (1.5, 0.8);
        let c = unit(l, g);
        // At the source: the limit is -(g/8L)(4L²) + gL/3 = -gL/6.
        assert_abs_diff_eq!(screened_potential_limit(0.2, 0.2, &c), -g * l / 6.0, epsilon = 1e-14);
        for i in 0..50 {
            let x = -l + 2.0 * l * i as f64 / 50.0;
            assert_abs_diff_eq!(
                screened_potential_limit(x, 0.1, &c),
                single_particle_potential(x, 0.1, &c) - g * l / 6.0,
                epsilon = 1e-13
            );
            let near = screened_potential_closed(x, 0.1, 1e-6 / l, &c).unwrap();
            assert_abs_diff_eq!(near.potential(), screened_potential_limit(x, 0.1, &c), epsilon = 1e-10);
        }
    }

    #[test]
    fn small_kappa_direct_sum_matches_limit() {
        let c = unit(1.0, 1.0);
        let kappa = 1e-3;
        let scr = ScreeningParameter::sized_for(kappa, &c, 1e-15).unwrap();
        let d = screened_potential_direct(0.37, 0.0, scr, &c);
        let lim = screened_potential_limit(0.37, 0.0, &c);
        // Cancellation against the 5e5-sized background costs ~1e-10.
        assert!((d.potential() - lim).abs() < 1e-3, "{} vs {lim}", d.potential());
    }
}
