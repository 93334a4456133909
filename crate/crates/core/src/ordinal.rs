//! Bandt-Pompe symbolization: ordinal patterns and their distribution.
//!
//! A pattern is stored as the chronological rank vector of its window, so the
//! strictly increasing window `[5, 10, 15, 20]` is pattern `0123`. Equal values
//! are ranked by order of occurrence: the earlier sample receives the lower rank.

use std::fmt;

use thiserror::Error;

use crate::quantifiers::ProbabilityDistribution;
use crate::Real;

pub const MIN_DIMENSION: usize = 2;
pub const MAX_DIMENSION: usize = 9;

/// Factor by which the series length should exceed `D!` for the pattern
/// statistics to be considered reliable.
pub const RELIABILITY_FACTOR: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrdinalError {
    #[error("non-finite sample")]
    NonFiniteSample,
    #[error("window length mismatch: expected {expected}, got {got}")]
    WindowLengthMismatch { expected: usize, got: usize },
    #[error("embedding dimension {0} outside [{MIN_DIMENSION}, {MAX_DIMENSION}]")]
    DimensionOutOfRange(usize),
    #[error("embedding delay must be at least 1")]
    DelayOutOfRange,
    #[error("series of length {len} is too short, need at least {required} samples")]
    SeriesTooShort { len: usize, required: usize },
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("pattern index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },
}

pub type Result<T> = std::result::Result<T, OrdinalError>;

/// A real-valued series of any unit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries<T> {
    values: Vec<T>,
}

impl<T: Real> TimeSeries<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Keeps every `factor`-th sample, starting with the first.
    pub fn decimate(&self, factor: usize) -> Self {
        assert!(factor >= 1, "decimation factor must be positive");
        Self::new(self.values.iter().copied().step_by(factor).collect())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }
}

impl<T: Real> From<Vec<T>> for TimeSeries<T> {
    fn from(values: Vec<T>) -> Self {
        Self::new(values)
    }
}

/// `n!` for the supported dimensions.
pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Number of windows of a series of length `len`, or `None` if none fit.
pub fn window_count(len: usize, dimension: usize, delay: usize) -> Option<usize> {
    let span = (dimension - 1) * delay;
    len.checked_sub(span).filter(|&n| n > 0)
}

fn check_embedding(dimension: usize, delay: usize) -> Result<()> {
    if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&dimension) {
        return Err(OrdinalError::DimensionOutOfRange(dimension));
    }
    if delay == 0 {
        return Err(OrdinalError::DelayOutOfRange);
    }
    Ok(())
}

/// Rank vector of a window together with its Lehmer code.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrdinalPattern {
    ranks: Vec<u8>,
    index: usize,
}

impl OrdinalPattern {
    pub fn from_ranks(ranks: Vec<u8>) -> Result<Self> {
        let d = ranks.len();
        let mut seen = [false; MAX_DIMENSION];
        if !(1..=MAX_DIMENSION).contains(&d) {
            return Err(OrdinalError::NotAPermutation(d));
        }
        for &r in &ranks {
            let r = r as usize;
            if r >= d || seen[r] {
                return Err(OrdinalError::NotAPermutation(d));
            }
            seen[r] = true;
        }
        let index = lehmer_encode(&ranks);
        Ok(Self { ranks, index })
    }

    /// Decodes a canonical index back into its rank vector.
    pub fn from_index(dimension: usize, index: usize) -> Result<Self> {
        if !(1..=MAX_DIMENSION).contains(&dimension) {
            return Err(OrdinalError::DimensionOutOfRange(dimension));
        }
        if index >= factorial(dimension) {
            return Err(OrdinalError::IndexOutOfRange { index, dimension });
        }
        Ok(Self {
            ranks: lehmer_decode(dimension, index),
            index,
        })
    }

    pub fn ranks(&self) -> &[u8] {
        &self.ranks
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn dimension(&self) -> usize {
        self.ranks.len()
    }
}

impl fmt::Display for OrdinalPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.ranks {
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

fn lehmer_encode(ranks: &[u8]) -> usize {
    let d = ranks.len();
    let mut index = 0;
    for i in 0..d {
        let smaller_after = ranks[i + 1..].iter().filter(|&&r| r < ranks[i]).count();
        index = index * (d - i) + smaller_after;
    }
    index
}

fn lehmer_decode(dimension: usize, mut index: usize) -> Vec<u8> {
    let mut digits = vec![0usize; dimension];
    for i in (0..dimension).rev() {
        let radix = dimension - i;
        digits[i] = index % radix;
        index /= radix;
    }
    let mut pool: Vec<u8> = (0..dimension as u8).collect();
    digits.into_iter().map(|d| pool.remove(d)).collect()
}

/// Fills `ranks[..d]` with the ranks of the `d` samples yielded by `window`.
fn rank_window<T: Real>(
    window: impl Iterator<Item = T>,
    d: usize,
    ranks: &mut [u8; MAX_DIMENSION],
) -> Result<()> {
    let mut vals = [T::zero(); MAX_DIMENSION];
    let mut n = 0;
    for v in window {
        if n == d {
            return Err(OrdinalError::WindowLengthMismatch {
                expected: d,
                got: n + 1,
            });
        }
        if !v.is_finite() {
            return Err(OrdinalError::NonFiniteSample);
        }
        vals[n] = v;
        n += 1;
    }
    if n != d {
        return Err(OrdinalError::WindowLengthMismatch {
            expected: d,
            got: n,
        });
    }
    // insertion sort of positions is stable, so earlier ties stay lower
    let mut order = [0u8; MAX_DIMENSION];
    for i in 0..d {
        let mut j = i;
        while j > 0 && vals[order[j - 1] as usize] > vals[i] {
            order[j] = order[j - 1];
            j -= 1;
        }
        order[j] = i as u8;
    }
    for (rank, &pos) in order[..d].iter().enumerate() {
        ranks[pos as usize] = rank as u8;
    }
    Ok(())
}

/// Ordinal pattern of a window of `dimension` finite samples in chronological order.
pub fn pattern_of_window<T: Real>(window: &[T], dimension: usize) -> Result<OrdinalPattern> {
    if !(MIN_DIMENSION..=MAX_DIMENSION).contains(&dimension) {
        return Err(OrdinalError::DimensionOutOfRange(dimension));
    }
    if window.len() != dimension {
        return Err(OrdinalError::WindowLengthMismatch {
            expected: dimension,
            got: window.len(),
        });
    }
    let mut ranks = [0u8; MAX_DIMENSION];
    rank_window(window.iter().copied(), dimension, &mut ranks)?;
    OrdinalPattern::from_ranks(ranks[..dimension].to_vec())
}

/// Pattern histogram over all sliding windows of a series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalDistribution {
    dimension: usize,
    delay: usize,
    counts: Vec<u64>,
    total_windows: u64,
}

impl OrdinalDistribution {
    /// Builds a distribution from raw counts, e.g. when re-reading an export.
    pub fn from_counts(dimension: usize, delay: usize, counts: Vec<u64>) -> Result<Self> {
        check_embedding(dimension, delay)?;
        if counts.len() != factorial(dimension) {
            return Err(OrdinalError::WindowLengthMismatch {
                expected: factorial(dimension),
                got: counts.len(),
            });
        }
        let total_windows = counts.iter().sum();
        Ok(Self {
            dimension,
            delay,
            counts,
            total_windows,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total_windows(&self) -> u64 {
        self.total_windows
    }

    pub fn count(&self, pattern: &OrdinalPattern) -> u64 {
        if pattern.dimension() != self.dimension {
            return 0;
        }
        self.counts[pattern.index()]
    }

    pub fn probability<T: Real>(&self, pattern: &OrdinalPattern) -> T {
        if self.total_windows == 0 {
            return T::zero();
        }
        T::from_u64(self.count(pattern)).unwrap() / T::from_u64(self.total_windows).unwrap()
    }

    pub fn probabilities<T: Real>(&self) -> Vec<T> {
        let total = T::from_u64(self.total_windows.max(1)).unwrap();
        self.counts
            .iter()
            .map(|&c| T::from_u64(c).unwrap() / total)
            .collect()
    }

    pub fn to_probability_distribution<T: Real>(&self) -> ProbabilityDistribution<T> {
        ProbabilityDistribution::new(self.probabilities())
            .expect("normalized pattern counts form a valid distribution")
    }

    /// `(pattern, count)` pairs in canonical index order.
    pub fn patterns(&self) -> impl Iterator<Item = (OrdinalPattern, u64)> + '_ {
        self.counts.iter().enumerate().map(move |(i, &c)| {
            (
                OrdinalPattern::from_index(self.dimension, i).expect("index below D!"),
                c,
            )
        })
    }

    /// True when the window count falls short of `100·D!`.
    pub fn is_undersampled(&self) -> bool {
        self.total_windows < (RELIABILITY_FACTOR * factorial(self.dimension)) as u64
    }
}

/// Counts the ordinal patterns of every window `(x_s, x_{s+τ}, ..., x_{s+(D-1)τ})`.
pub fn ordinal_distribution<T: Real>(
    series: &TimeSeries<T>,
    dimension: usize,
    delay: usize,
) -> Result<OrdinalDistribution> {
    ordinal_distribution_excluding(series, dimension, delay, &[])
}

/// Like [`ordinal_distribution`], but skips windows that straddle any of
/// `breaks`. A break at index `j` separates sample `j - 1` from sample `j`.
pub fn ordinal_distribution_excluding<T: Real>(
    series: &TimeSeries<T>,
    dimension: usize,
    delay: usize,
    breaks: &[usize],
) -> Result<OrdinalDistribution> {
    check_embedding(dimension, delay)?;
    let x = series.values();
    let span = (dimension - 1) * delay;
    let windows = window_count(x.len(), dimension, delay).ok_or(OrdinalError::SeriesTooShort {
        len: x.len(),
        required: span + 1,
    })?;

    let mut sorted_breaks = breaks.to_vec();
    sorted_breaks.sort_unstable();
    let straddles = |s: usize| {
        let first = sorted_breaks.partition_point(|&b| b <= s);
        sorted_breaks.get(first).is_some_and(|&b| b <= s + span)
    };

    let mut counts = vec![0u64; factorial(dimension)];
    let mut ranks = [0u8; MAX_DIMENSION];
    for s in 0..windows {
        if !sorted_breaks.is_empty() && straddles(s) {
            continue;
        }
        let window = (0..dimension).map(|i| x[s + i * delay]);
        rank_window(window, dimension, &mut ranks)?;
        counts[lehmer_encode(&ranks[..dimension])] += 1;
    }

    let dist = OrdinalDistribution::from_counts(dimension, delay, counts)?;
    if dist.is_undersampled() {
        log::warn!(
            "{} windows for D={dimension}: fewer than {}·D! = {}, pattern statistics may be unreliable",
            dist.total_windows,
            RELIABILITY_FACTOR,
            RELIABILITY_FACTOR * factorial(dimension)
        );
    }
    Ok(dist)
}
