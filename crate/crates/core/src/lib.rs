//! Ordinal-pattern analysis of vehicle velocity series.
//!
//! The pipeline runs from raw GPS logs to points on the complexity-entropy
//! causality plane:
//!
//! * [`ingest`] parses the supported dataset layouts, derives velocities and
//!   applies the outlier-cleaning policies.
//! * [`resample`] turns cleaned trips into equally sampled series with a
//!   shape-preserving cubic Hermite interpolant.
//! * [`ordinal`] builds the Bandt-Pompe pattern distribution of a series.
//! * [`quantifiers`] computes normalized Shannon entropy, Jensen-Shannon
//!   disequilibrium, statistical complexity and the plane's boundary curves.
//! * [`noisegen`] synthesizes `f^-k` reference noises and checks their slope.
//!
//! The numeric core is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix the scalar to one of the two.
//!
//! ```
//! use ceplane::{ordinal_distribution, plane_point, PlanePointF64, TimeSeriesF64};
//!
//! let series = TimeSeriesF64::new((0..500).map(|i| (i as f64 * 0.7).sin()).collect());
//! let dist = ordinal_distribution(&series, 4, 1).unwrap();
//! let point: PlanePointF64 = plane_point(&dist, "sine").unwrap();
//! assert!(point.entropy < 1.0 && point.within_bounds(1e-9));
//! ```

pub mod ingest;
pub mod noisegen;
pub mod ordinal;
pub mod quantifiers;
pub mod resample;

mod real;

pub use real::Real;

pub use ordinal::{ordinal_distribution, pattern_of_window, OrdinalDistribution, OrdinalPattern};
pub use quantifiers::{
    boundary_curves, jensen_shannon_disequilibrium, normalized_entropy, plane_point,
    shannon_entropy, statistical_complexity, BoundaryCurve, BoundaryKind, PlanePoint,
    ProbabilityDistribution,
};

pub type TimeSeries<T> = ordinal::TimeSeries<T>;

pub type TimeSeriesF64 = ordinal::TimeSeries<f64>;
pub type TimeSeriesF32 = ordinal::TimeSeries<f32>;
pub type ProbabilityDistributionF64 = quantifiers::ProbabilityDistribution<f64>;
pub type ProbabilityDistributionF32 = quantifiers::ProbabilityDistribution<f32>;
pub type PlanePointF64 = quantifiers::PlanePoint<f64>;
pub type PlanePointF32 = quantifiers::PlanePoint<f32>;
pub type BoundaryCurveF64 = quantifiers::BoundaryCurve<f64>;
pub type BoundaryCurveF32 = quantifiers::BoundaryCurve<f32>;
pub type VelocitySeriesF64 = resample::VelocitySeries<f64>;
