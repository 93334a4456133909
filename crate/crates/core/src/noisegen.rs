//! `f^-k` colored noise and its spectral-slope check.
//!
//! Generation filters uniform white noise in the frequency domain:
//!
//! 1. draw `M` samples uniformly from `[-0.5, 0.5)`;
//! 2. forward FFT, scale bin `j` by `f^{-k/2}` with `f = min(j, M-j)` and zero the DC bin;
//! 3. rebuild the upper half as the complex conjugate of the lower half (the
//!    Nyquist bin of an even length is made real), inverse FFT and keep the real part.
//!
//! The random stream is ChaCha8 (`rand_chacha`) seeded with
//! `SeedableRng::seed_from_u64(seed)`. Each uniform is
//! `(next_u64() >> 11) · 2^-53 - 0.5`, so a given seed reproduces the same
//! series bit for bit across platforms.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rustfft::num_complex::Complex;
use rustfft::{FftNum, FftPlanner};
use thiserror::Error;

use crate::ordinal::{ordinal_distribution, OrdinalError, TimeSeries};
use crate::quantifiers::{plane_point, PlanePoint, QuantifierError};
use crate::Real;

pub const MIN_LENGTH: usize = 1024;
pub const MAX_EXPONENT: f64 = 4.0;

/// Exponents of the reference ladder plotted against vehicle data.
pub const STANDARD_LADDER: [f64; 7] = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("series length {0} below minimum {MIN_LENGTH}")]
    TooShort(usize),
    #[error("spectral exponent {0} outside [0, {MAX_EXPONENT}]")]
    ExponentOutOfRange(f64),
    #[error("zero variance")]
    ZeroVariance,
    #[error("only {0} usable periodogram bins in the fit band")]
    DegenerateSpectrum(usize),
    #[error("invalid fit band: {0}")]
    InvalidBand(String),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
    #[error(transparent)]
    Quantifier(#[from] QuantifierError),
}

pub type Result<T> = std::result::Result<T, NoiseError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Spectral exponent `k` of the `f^-k` power law.
    pub exponent: f64,
    pub length: usize,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(exponent: f64, length: usize, seed: u64) -> Self {
        Self {
            exponent,
            length,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=MAX_EXPONENT).contains(&self.exponent) {
            return Err(NoiseError::ExponentOutOfRange(self.exponent));
        }
        if self.length < MIN_LENGTH {
            return Err(NoiseError::TooShort(self.length));
        }
        Ok(())
    }
}

/// Uniform samples on `[-0.5, 0.5)` from the documented stream.
pub fn uniform_samples(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (0..len)
        .map(|_| (rng.next_u64() >> 11) as f64 * SCALE - 0.5)
        .collect()
}

pub fn generate_fk_noise<T: Real + FftNum>(spec: &NoiseSpec) -> Result<TimeSeries<T>> {
    spec.validate()?;
    let m = spec.length;
    let mut buf: Vec<Complex<T>> = uniform_samples(spec.seed, m)
        .into_iter()
        .map(|u| Complex::new(T::lit(u), T::zero()))
        .collect();

    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(m).process(&mut buf);

    let half_exponent = T::lit(-spec.exponent / 2.0);
    buf[0] = Complex::new(T::zero(), T::zero());
    for (j, bin) in buf.iter_mut().enumerate().take(m / 2 + 1).skip(1) {
        *bin = *bin * T::from_usize_lossy(j).powf(half_exponent);
    }
    if m.is_multiple_of(2) {
        buf[m / 2].im = T::zero();
    }
    for j in 1..m.div_ceil(2) {
        buf[m - j] = buf[j].conj();
    }

    planner.plan_fft_inverse(m).process(&mut buf);
    let scale = T::from_usize_lossy(m);
    Ok(TimeSeries::new(
        buf.into_iter().map(|c| c.re / scale).collect(),
    ))
}

/// One-sided periodogram over bins `1..=M/2`, frequency in bin units.
#[derive(Debug, Clone, PartialEq)]
pub struct Periodogram<T> {
    pub frequencies: Vec<T>,
    pub power: Vec<T>,
}

pub fn periodogram<T: Real + FftNum>(series: &TimeSeries<T>) -> Periodogram<T> {
    let x = series.values();
    let m = x.len();
    let mean = x.iter().fold(T::zero(), |a, &v| a + v) / T::from_usize_lossy(m.max(1));
    let mut buf: Vec<Complex<T>> = x
        .iter()
        .map(|&v| Complex::new(v - mean, T::zero()))
        .collect();
    FftPlanner::<T>::new().plan_fft_forward(m).process(&mut buf);
    let scale = T::from_usize_lossy(m);
    let (frequencies, power) = (1..=m / 2)
        .map(|j| (T::from_usize_lossy(j), buf[j].norm_sqr() / scale))
        .unzip();
    Periodogram { frequencies, power }
}

/// Band of periodogram bins used by the log-log fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeBand {
    /// Width of the band in decades, centred (in log frequency) on the usable bins.
    pub decades: f64,
    /// Fraction of the highest bins left out of the fit.
    pub top_exclude: f64,
}

impl Default for SlopeBand {
    fn default() -> Self {
        Self {
            decades: 2.0,
            top_exclude: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit {
    /// Fitted log-log slope, i.e. `-k̂`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub bins: usize,
}

/// Least-squares fit of `ln power` against `ln f` inside `band`.
pub fn fit_spectral_slope<T: Real + FftNum>(
    series: &TimeSeries<T>,
    band: SlopeBand,
) -> Result<SlopeFit> {
    if series.len() < MIN_LENGTH {
        return Err(NoiseError::TooShort(series.len()));
    }
    if !(band.decades.is_finite() && band.decades > 0.0) || !(0.0..1.0).contains(&band.top_exclude)
    {
        return Err(NoiseError::InvalidBand(format!("{band:?}")));
    }
    let x = series.values();
    if x.iter().all(|&v| v == x[0]) {
        return Err(NoiseError::ZeroVariance);
    }

    let pg = periodogram(series);
    let top = ((pg.power.len() as f64) * (1.0 - band.top_exclude))
        .floor()
        .max(1.0);
    let centre = 0.5 * top.ln();
    let half_width = 0.5 * band.decades * std::f64::consts::LN_10;
    let lo = (centre - half_width).exp().max(1.0);
    let hi = (centre + half_width).exp().min(top);

    let peak = pg
        .power
        .iter()
        .fold(0.0f64, |a, p| a.max(p.to_f64().unwrap_or(0.0)));
    let floor = peak * f64::EPSILON * f64::EPSILON;
    let points: Vec<(f64, f64)> = pg
        .frequencies
        .iter()
        .zip(&pg.power)
        .filter_map(|(f, p)| {
            let (f, p) = (f.to_f64()?, p.to_f64()?);
            (f >= lo && f <= hi && p > floor && p.is_finite()).then(|| (f.ln(), p.ln()))
        })
        .collect();
    if points.len() < 8 {
        return Err(NoiseError::DegenerateSpectrum(points.len()));
    }
    Ok(least_squares(&points))
}

/// Fitted spectral slope with the default band.
pub fn spectral_slope<T: Real + FftNum>(series: &TimeSeries<T>) -> Result<f64> {
    fit_spectral_slope(series, SlopeBand::default()).map(|f| f.slope)
}

fn least_squares(points: &[(f64, f64)]) -> SlopeFit {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 {
        sxy * sxy / (sxx * syy)
    } else {
        1.0
    };
    SlopeFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        bins: points.len(),
    }
}

/// Plane locations of `f^-k` noises, one per exponent.
///
/// Every exponent filters the same white-noise draw (same `seed`), so the
/// points differ only through the spectral exponent.
pub fn reference_ladder<T: Real + FftNum>(
    exponents: &[f64],
    length: usize,
    seed: u64,
    dimension: usize,
    delay: usize,
) -> Result<Vec<PlanePoint<T>>> {
    exponents
        .iter()
        .map(|&k| {
            let series = generate_fk_noise::<T>(&NoiseSpec::new(k, length, seed))?;
            let dist = ordinal_distribution(&series, dimension, delay)?;
            Ok(plane_point(&dist, ladder_label(k))?)
        })
        .collect()
}

pub fn ladder_label(k: f64) -> String {
    format!("k={k}")
}
