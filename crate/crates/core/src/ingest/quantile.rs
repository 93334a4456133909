//! Sample quantiles by linear interpolation between order statistics.
//!
//! For sorted data `x[0..n]` the `q`-quantile is read at position `h = (n-1)·q`
//! as `x[⌊h⌋] + (h - ⌊h⌋)·(x[⌊h⌋+1] - x[⌊h⌋])`. This is the default rule of
//! most statistics packages (Hyndman-Fan type 7).

/// Quantile of already sorted, finite data. `None` for empty input.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() || !(0.0..=1.0).contains(&q) {
        return None;
    }
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// First and third quartiles of `values` (copied and sorted internally).
pub fn quartiles(values: &[f64]) -> Option<(f64, f64)> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some((quantile_sorted(&v, 0.25)?, quantile_sorted(&v, 0.75)?))
}
