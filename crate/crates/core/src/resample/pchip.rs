//! Shape-preserving piecewise cubic Hermite interpolation (Fritsch-Carlson).

use super::{ResampleError, Result};
use crate::Real;

/// Knot derivatives. Interior slopes are zero at local extrema and otherwise
/// the weighted harmonic mean of the adjacent secants; end slopes use the
/// one-sided three-point formula, limited to keep the shape.
fn slopes<T: Real>(t: &[T], v: &[T]) -> Vec<T> {
    let n = t.len();
    let h: Vec<T> = t.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<T> = (0..n - 1).map(|i| (v[i + 1] - v[i]) / h[i]).collect();
    let mut d = vec![T::zero(); n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }

    let two = T::lit(2.0);
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a == T::zero() || b == T::zero() || (a > T::zero()) != (b > T::zero()) {
            continue;
        }
        let w1 = two * h[k] + h[k - 1];
        let w2 = h[k] + two * h[k - 1];
        d[k] = (w1 + w2) / (w1 / a + w2 / b);
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope<T: Real>(h0: T, h1: T, del0: T, del1: T) -> T {
    let three = T::lit(3.0);
    let d = ((T::lit(2.0) * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    let sign = |x: T| {
        if x > T::zero() {
            1
        } else if x < T::zero() {
            -1
        } else {
            0
        }
    };
    if sign(d) != sign(del0) {
        T::zero()
    } else if sign(del0) != sign(del1) && d.abs() > three * del0.abs() {
        three * del0
    } else {
        d
    }
}

fn check_knots<T: Real>(knots: &[(T, T)]) -> Result<()> {
    if knots.len() < 2 {
        return Err(ResampleError::TooFewKnots(knots.len()));
    }
    for (i, &(t, v)) in knots.iter().enumerate() {
        if !t.is_finite() || !v.is_finite() {
            return Err(ResampleError::NonFinite(i));
        }
    }
    if let Some(i) = knots.windows(2).position(|w| w[1].0 <= w[0].0) {
        return Err(ResampleError::NonIncreasingKnots(i + 1));
    }
    Ok(())
}

/// Prepared interpolant over a fixed set of knots.
#[derive(Debug, Clone)]
pub struct Pchip<T> {
    t: Vec<T>,
    v: Vec<T>,
    d: Vec<T>,
}

impl<T: Real> Pchip<T> {
    pub fn new(knots: &[(T, T)]) -> Result<Self> {
        check_knots(knots)?;
        let (t, v): (Vec<T>, Vec<T>) = knots.iter().copied().unzip();
        let d = slopes(&t, &v);
        Ok(Self { t, v, d })
    }

    pub fn span(&self) -> (T, T) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    pub fn eval(&self, x: T) -> Result<T> {
        let (lo, hi) = self.span();
        if !(x >= lo && x <= hi) {
            return Err(ResampleError::Extrapolation(x.to_f64().unwrap_or(f64::NAN)));
        }
        let k = self
            .t
            .partition_point(|&t| t <= x)
            .clamp(1, self.t.len() - 1)
            - 1;
        if x == self.t[k] {
            return Ok(self.v[k]);
        }
        let h = self.t[k + 1] - self.t[k];
        let s = (x - self.t[k]) / h;
        let one = T::one();
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = two * s3 - three * s2 + one;
        let h10 = s3 - two * s2 + s;
        let h01 = three * s2 - two * s3;
        let h11 = s3 - s2;
        Ok(h00 * self.v[k] + h10 * h * self.d[k] + h01 * self.v[k + 1] + h11 * h * self.d[k + 1])
    }
}

/// Evaluates the shape-preserving interpolant of `knots` at every query time.
pub fn pchip_interpolate<T: Real>(knots: &[(T, T)], queries: &[T]) -> Result<Vec<T>> {
    let p = Pchip::new(knots)?;
    queries.iter().map(|&x| p.eval(x)).collect()
}
