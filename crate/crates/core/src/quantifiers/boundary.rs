//! Minimum and maximum statistical complexity at a given normalized entropy.
//!
//! Both curves come from one-parameter distribution families:
//!
//! * minimum: `{p, q, ..., q}` with `q = (1-p)/(N-1)` and `p ∈ [1/N, 1]`;
//! * maximum: for `m` zero cells, `{0, ..., 0, p, q, ..., q}` with
//!   `q = (1-p)/(N-m-1)` and `p ∈ [0, 1/(N-m)]`. Consecutive `m` join end to
//!   end, so walking `m = N-2, ..., 0` traces the whole upper curve.
//!
//! A family member is described by a few `(value, multiplicity)` runs, which
//! keeps every evaluation O(1) regardless of `N`.

use super::{require_cells, QuantifierError, Result};
use crate::Real;

pub const MIN_RESOLUTION: usize = 64;
pub const DEFAULT_RESOLUTION: usize = 1024;

const BISECTION_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Minimum,
    Maximum,
}

/// Ordered `(H, C)` samples of one boundary curve for `N` cells.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCurve<T> {
    pub kind: BoundaryKind,
    pub cells: usize,
    pub samples: Vec<(T, T)>,
}

impl<T: Real> BoundaryCurve<T> {
    /// Piecewise-linear reading of the sampled curve; `None` outside `[0, 1]`.
    pub fn interpolate(&self, h: T) -> Option<T> {
        let s = &self.samples;
        if h < s[0].0 || h > s[s.len() - 1].0 {
            return None;
        }
        let i = s.partition_point(|&(x, _)| x < h);
        if i == 0 {
            return Some(s[0].1);
        }
        let (x0, y0) = s[i - 1];
        let (x1, y1) = s[i];
        Some(y0 + (y1 - y0) * (h - x0) / (x1 - x0))
    }
}

/// `(H, C)` of a distribution given as `(value, multiplicity)` runs over `n` cells.
fn family_point<T: Real>(n: usize, runs: &[(T, usize)]) -> (T, T) {
    let nf = T::from_usize_lossy(n);
    let half = T::lit(0.5);
    let pe = T::one() / nf;
    let xlnx = |v: T| if v > T::zero() { v * v.ln() } else { T::zero() };

    let mut s_p = T::zero();
    let mut s_mix = T::zero();
    let mut used = 0;
    for &(v, k) in runs {
        let k_t = T::from_usize_lossy(k);
        s_p = s_p - k_t * xlnx(v);
        s_mix = s_mix - k_t * xlnx((v + pe) * half);
        used += k;
    }
    let zeros = T::from_usize_lossy(n - used);
    s_mix = s_mix - zeros * xlnx(pe * half);

    let ln_n = nf.ln();
    let h = (s_p / ln_n).max(T::zero()).min(T::one());
    let js = s_mix - half * s_p - half * ln_n;
    let q0 = T::lit(super::disequilibrium_normalization(n).expect("n >= 2"));
    let q = (q0 * js).max(T::zero()).min(T::one());
    (h, h * q)
}

fn min_family<T: Real>(n: usize, p: T) -> (T, T) {
    let q = (T::one() - p) / T::from_usize_lossy(n - 1);
    family_point(n, &[(p, 1), (q, n - 1)])
}

/// Maximum family with `nonzero` occupied cells, `p ∈ [0, 1/nonzero]`.
fn max_family<T: Real>(n: usize, nonzero: usize, p: T) -> (T, T) {
    let q = (T::one() - p) / T::from_usize_lossy(nonzero - 1);
    family_point(n, &[(p, 1), (q, nonzero - 1)])
}

/// Finds the parameter in `[lo, hi]` whose family entropy equals `target`.
/// `increasing` tells whether entropy grows with the parameter.
fn solve_entropy<T: Real>(
    target: T,
    mut lo: T,
    mut hi: T,
    increasing: bool,
    entropy: impl Fn(T) -> T,
) -> T {
    for _ in 0..BISECTION_STEPS {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if (entropy(mid) < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * T::lit(0.5)
}

/// `(C_min(H), C_max(H))` for `n` cells, evaluated on the exact families.
pub fn complexity_bounds<T: Real>(n: usize, h: T) -> Result<(T, T)> {
    require_cells(n)?;
    let h = h.max(T::zero()).min(T::one());
    if h <= T::zero() || h >= T::one() {
        return Ok((T::zero(), T::zero()));
    }
    let nf = T::from_usize_lossy(n);

    let p_min = solve_entropy(h, T::one() / nf, T::one(), false, |p| min_family(n, p).0);
    let c_min = min_family(n, p_min).1;

    // the family with k nonzero cells spans H ∈ [ln(k-1)/ln N, ln k/ln N]
    let s = h * nf.ln();
    let mut k = s.exp().ceil().to_usize().unwrap_or(n).clamp(2, n);
    while k > 2 && T::from_usize_lossy(k - 1).ln() >= s {
        k -= 1;
    }
    while k < n && T::from_usize_lossy(k).ln() < s {
        k += 1;
    }
    let kf = T::from_usize_lossy(k);
    let p_max = solve_entropy(h, T::zero(), T::one() / kf, true, |p| max_family(n, k, p).0);
    let c_max = max_family(n, k, p_max).1;

    Ok((c_min, c_max))
}

/// True when `C_min(H) - tol ≤ C ≤ C_max(H) + tol`.
pub fn within_bounds<T: Real>(n: usize, h: T, c: T, tolerance: T) -> bool {
    match complexity_bounds(n, h) {
        Ok((lo, hi)) => c >= lo - tolerance && c <= hi + tolerance,
        Err(_) => false,
    }
}

/// Samples the minimum and maximum complexity curves for `n` cells.
pub fn boundary_curves<T: Real>(
    n: usize,
    resolution: usize,
) -> Result<(BoundaryCurve<T>, BoundaryCurve<T>)> {
    require_cells(n)?;
    if resolution < MIN_RESOLUTION {
        return Err(QuantifierError::ResolutionTooLow(resolution));
    }
    let nf = T::from_usize_lossy(n);
    let zero = (T::zero(), T::zero());
    let one = (T::one(), T::zero());

    let mut min = Vec::with_capacity(resolution);
    min.push(zero);
    let span = T::one() - T::one() / nf;
    let steps = T::from_usize_lossy(resolution - 1);
    for i in 1..resolution - 1 {
        let p = T::one() - span * T::from_usize_lossy(i) / steps;
        push_increasing(&mut min, min_family(n, p));
    }
    push_increasing(&mut min, one);

    let families = n - 1;
    let per_family = resolution.div_ceil(families).max(4);
    let mut max = Vec::with_capacity(families * per_family);
    max.push(zero);
    for nonzero in 2..=n {
        let top = T::one() / T::from_usize_lossy(nonzero);
        for j in 1..=per_family {
            let p = top * T::from_usize_lossy(j) / T::from_usize_lossy(per_family);
            let point = if nonzero == n && j == per_family {
                one
            } else {
                max_family(n, nonzero, p)
            };
            push_increasing(&mut max, point);
        }
    }
    if max.last() != Some(&one) {
        push_increasing(&mut max, one);
    }

    Ok((
        BoundaryCurve {
            kind: BoundaryKind::Minimum,
            cells: n,
            samples: min,
        },
        BoundaryCurve {
            kind: BoundaryKind::Maximum,
            cells: n,
            samples: max,
        },
    ))
}

fn push_increasing<T: Real>(samples: &mut Vec<(T, T)>, point: (T, T)) {
    match samples.last() {
        Some(&(h, _)) if point.0 <= h => {
            // rounding at family joins; the last sample of a curve must stay (1, 0)
            if point.0 >= T::one() {
                samples.pop();
                samples.push(point);
            }
        }
        _ => samples.push(point),
    }
}
