use super::{validate_coordinate, Result};

/// Mean Earth radius in metres.
pub const EARTH_MEAN_RADIUS_M: f64 = 6_371_008.8;

/// Great-circle (haversine) distance in metres between two `(lat, lon)` points in degrees.
pub fn geodesic_distance(a: (f64, f64), b: (f64, f64)) -> Result<f64> {
    validate_coordinate(a.0, a.1)?;
    validate_coordinate(b.0, b.1)?;
    let (lat1, lat2) = (a.0.to_radians(), b.0.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.1 - a.1).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    Ok(2.0 * EARTH_MEAN_RADIUS_M * h.clamp(0.0, 1.0).sqrt().asin())
}
