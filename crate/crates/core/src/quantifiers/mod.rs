//! Information-theory quantifiers of a discrete probability distribution.
//!
//! All logarithms are natural. Zero-probability cells contribute nothing to
//! entropy sums (`0·ln 0 = 0`).

mod boundary;

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use thiserror::Error;

use crate::ordinal::OrdinalDistribution;
use crate::Real;

pub use boundary::{
    boundary_curves, complexity_bounds, within_bounds, BoundaryCurve, BoundaryKind,
    DEFAULT_RESOLUTION, MIN_RESOLUTION,
};

/// Absolute slack allowed on `sum(p) == 1` in double precision.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantifierError {
    #[error("distribution has no cells")]
    Empty,
    #[error("negative probability {value} in cell {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("non-finite probability in cell {0}")]
    NonFinite(usize),
    #[error("probabilities sum to {0}, not 1")]
    NotNormalized(f64),
    #[error("need at least 2 cells, got {0}")]
    TooFewCells(usize),
    #[error("boundary resolution {0} below minimum {MIN_RESOLUTION}")]
    ResolutionTooLow(usize),
}

pub type Result<T> = std::result::Result<T, QuantifierError>;

/// Non-negative weights over `N` cells summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution<T> {
    p: Vec<T>,
}

impl<T: Real> ProbabilityDistribution<T> {
    pub fn new(p: Vec<T>) -> Result<Self> {
        if p.is_empty() {
            return Err(QuantifierError::Empty);
        }
        let mut sum = T::zero();
        for (index, &v) in p.iter().enumerate() {
            if !v.is_finite() {
                return Err(QuantifierError::NonFinite(index));
            }
            if v < T::zero() {
                return Err(QuantifierError::NegativeProbability {
                    index,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
            sum = sum + v;
        }
        let n = T::from_usize_lossy(p.len());
        let tol = T::lit(NORMALIZATION_TOLERANCE).max(T::epsilon() * n * T::lit(4.0));
        if (sum - T::one()).abs() > tol {
            return Err(QuantifierError::NotNormalized(
                sum.to_f64().unwrap_or(f64::NAN),
            ));
        }
        Ok(Self { p })
    }

    /// The equilibrium distribution `P_e`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(QuantifierError::Empty);
        }
        let w = T::one() / T::from_usize_lossy(n);
        Ok(Self { p: vec![w; n] })
    }

    /// All mass on `cell`.
    pub fn one_hot(n: usize, cell: usize) -> Result<Self> {
        if n == 0 {
            return Err(QuantifierError::Empty);
        }
        assert!(cell < n, "cell {cell} out of range for {n} cells");
        let mut p = vec![T::zero(); n];
        p[cell] = T::one();
        Ok(Self { p })
    }

    pub fn probabilities(&self) -> &[T] {
        &self.p
    }

    pub fn cells(&self) -> usize {
        self.p.len()
    }
}

fn entropy_of<T: Real>(p: impl IntoIterator<Item = T>) -> T {
    p.into_iter()
        .filter(|&v| v > T::zero())
        .fold(T::zero(), |acc, v| acc - v * v.ln())
}

fn require_cells(n: usize) -> Result<()> {
    if n < 2 {
        Err(QuantifierError::TooFewCells(n))
    } else {
        Ok(())
    }
}

fn unit_clamp<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// Shannon entropy `S = -Σ p ln p` in nats.
pub fn shannon_entropy<T: Real>(dist: &ProbabilityDistribution<T>) -> T {
    entropy_of(dist.p.iter().copied())
}

/// `S[P] / ln N`, in `[0, 1]`.
pub fn normalized_entropy<T: Real>(dist: &ProbabilityDistribution<T>) -> Result<T> {
    require_cells(dist.cells())?;
    let max = T::from_usize_lossy(dist.cells()).ln();
    Ok(unit_clamp(shannon_entropy(dist) / max))
}

/// Unnormalized Jensen-Shannon divergence between `P` and the uniform distribution.
fn js_divergence_to_uniform<T: Real>(p: &[T]) -> T {
    let n = T::from_usize_lossy(p.len());
    let pe = T::one() / n;
    let half = T::lit(0.5);
    let mixture = entropy_of(p.iter().map(|&v| (v + pe) * half));
    let s_p = entropy_of(p.iter().copied());
    mixture - half * s_p - half * n.ln()
}

/// Normalization constant `Q₀ = 1 / J_S[δ, P_e]`, evaluated numerically from
/// a one-hot distribution and cached per cell count.
pub fn disequilibrium_normalization(n: usize) -> Result<f64> {
    require_cells(n)?;
    static CACHE: OnceLock<RwLock<HashMap<usize, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(&q0) = cache.read().expect("q0 cache poisoned").get(&n) {
        return Ok(q0);
    }
    let delta = ProbabilityDistribution::<f64>::one_hot(n, 0)?;
    let q0 = 1.0 / js_divergence_to_uniform(&delta.p);
    cache.write().expect("q0 cache poisoned").insert(n, q0);
    Ok(q0)
}

/// Normalized Jensen-Shannon distance to equilibrium, `Q_JS ∈ [0, 1]`.
pub fn jensen_shannon_disequilibrium<T: Real>(dist: &ProbabilityDistribution<T>) -> Result<T> {
    let q0 = T::lit(disequilibrium_normalization(dist.cells())?);
    Ok(unit_clamp(q0 * js_divergence_to_uniform(&dist.p)))
}

/// Statistical complexity `C_JS = H_S · Q_JS`.
pub fn statistical_complexity<T: Real>(dist: &ProbabilityDistribution<T>) -> Result<T> {
    Ok(normalized_entropy(dist)? * jensen_shannon_disequilibrium(dist)?)
}

/// A location on the complexity-entropy causality plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanePoint<T> {
    pub entropy: T,
    pub complexity: T,
    pub label: String,
    pub dimension: usize,
    pub delay: usize,
    /// Number of windows the pattern distribution was built from.
    pub windows: u64,
}

impl<T: Real> PlanePoint<T> {
    /// Checks the point against the plane's boundary curves for `D!` cells.
    pub fn within_bounds(&self, tolerance: T) -> bool {
        let n = crate::ordinal::factorial(self.dimension);
        within_bounds(n, self.entropy, self.complexity, tolerance)
    }
}

/// Permutation entropy and permutation statistical complexity of a pattern distribution.
pub fn plane_point<T: Real>(
    dist: &OrdinalDistribution,
    label: impl Into<String>,
) -> Result<PlanePoint<T>> {
    let p = dist.to_probability_distribution::<T>();
    let entropy = normalized_entropy(&p)?;
    let complexity = entropy * jensen_shannon_disequilibrium(&p)?;
    Ok(PlanePoint {
        entropy,
        complexity,
        label: label.into(),
        dimension: dist.dimension(),
        delay: dist.delay(),
        windows: dist.total_windows(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn half_half() -> ProbabilityDistribution<f64> {
        ProbabilityDistribution::new(vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn rejects_invalid_distributions() {
        assert_eq!(
            ProbabilityDistribution::<f64>::new(vec![]),
            Err(QuantifierError::Empty)
        );
        assert!(matches!(
            ProbabilityDistribution::new(vec![1.2, -0.2]),
            Err(QuantifierError::NegativeProbability { index: 1, .. })
        ));
        assert!(matches!(
            ProbabilityDistribution::new(vec![0.5, 0.4]),
            Err(QuantifierError::NotNormalized(_))
        ));
        assert_eq!(
            ProbabilityDistribution::new(vec![f64::NAN, 1.0]),
            Err(QuantifierError::NonFinite(0))
        );
    }

    #[test]
    fn entropy_values() {
        let u = ProbabilityDistribution::<f64>::uniform(24).unwrap();
        assert_abs_diff_eq!(shannon_entropy(&u), 24f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(shannon_entropy(&u), 3.178, epsilon = 5e-4);
        let d = ProbabilityDistribution::<f64>::one_hot(24, 3).unwrap();
        assert_eq!(shannon_entropy(&d), 0.0);
        assert_abs_diff_eq!(
            shannon_entropy(&half_half()),
            std::f64::consts::LN_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn normalized_entropy_values() {
        for n in [2, 6, 24, 120] {
            let u = ProbabilityDistribution::<f64>::uniform(n).unwrap();
            assert_abs_diff_eq!(normalized_entropy(&u).unwrap(), 1.0, epsilon = 1e-12);
            let d = ProbabilityDistribution::<f64>::one_hot(n, n - 1).unwrap();
            assert_eq!(normalized_entropy(&d).unwrap(), 0.0);
        }
        assert_abs_diff_eq!(
            normalized_entropy(&half_half()).unwrap(),
            2f64.ln() / 6f64.ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            normalized_entropy(&half_half()).unwrap(),
            0.3869,
            epsilon = 1e-4
        );
        let single = ProbabilityDistribution::<f64>::new(vec![1.0]).unwrap();
        assert_eq!(
            normalized_entropy(&single),
            Err(QuantifierError::TooFewCells(1))
        );
    }

    #[test]
    fn disequilibrium_extremes() {
        for n in [2, 6, 24, 120, 720] {
            let u = ProbabilityDistribution::<f64>::uniform(n).unwrap();
            assert_abs_diff_eq!(
                jensen_shannon_disequilibrium(&u).unwrap(),
                0.0,
                epsilon = 1e-12
            );
            let d = ProbabilityDistribution::<f64>::one_hot(n, n / 2).unwrap();
            assert_abs_diff_eq!(
                jensen_shannon_disequilibrium(&d).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    // Q₀ written out in closed form for a one-hot P over N cells:
    // J = -((1+1/N)/2) ln((1+1/N)/2) - (N-1)/(2N) ln(1/(2N)) - ln(N)/2
    fn closed_form_q0(n: f64) -> f64 {
        let a = (1.0 + 1.0 / n) / 2.0;
        let b = 1.0 / (2.0 * n);
        1.0 / (-a * a.ln() - (n - 1.0) * b * b.ln() - 0.5 * n.ln())
    }

    #[test]
    fn normalization_matches_closed_form() {
        for n in [2usize, 6, 24, 120, 720] {
            let q0 = disequilibrium_normalization(n).unwrap();
            assert_abs_diff_eq!(q0, closed_form_q0(n as f64), epsilon = 1e-10 * q0);
        }
    }

    #[test]
    fn half_half_term_by_term() {
        // S[(P+Pe)/2]: two cells of (1/2+1/6)/2 = 1/3, four cells of 1/12
        let mix =
            -2.0 * (1.0f64 / 3.0) * (1.0f64 / 3.0).ln() - 4.0 * (1.0 / 12.0) * (1.0f64 / 12.0).ln();
        let js = mix - 0.5 * 2f64.ln() - 0.5 * 6f64.ln();
        let q = closed_form_q0(6.0) * js;
        let h = 2f64.ln() / 6f64.ln();
        let p = half_half();
        assert_abs_diff_eq!(
            jensen_shannon_disequilibrium(&p).unwrap(),
            q,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(statistical_complexity(&p).unwrap(), h * q, epsilon = 1e-12);
    }

    #[test]
    fn complexity_null_at_extremes() {
        let u = ProbabilityDistribution::<f64>::uniform(24).unwrap();
        let d = ProbabilityDistribution::<f64>::one_hot(24, 0).unwrap();
        assert_abs_diff_eq!(statistical_complexity(&u).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(statistical_complexity(&d).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_precision_agrees() {
        let p64 = half_half();
        let p32 = ProbabilityDistribution::<f32>::new(vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let c64 = statistical_complexity(&p64).unwrap();
        let c32 = statistical_complexity(&p32).unwrap();
        assert_abs_diff_eq!(c32 as f64, c64, epsilon = 1e-6);
    }
}
