use ceplane::noisegen::{
    fit_spectral_slope, generate_fk_noise, reference_ladder, spectral_slope, NoiseSpec, SlopeBand,
    STANDARD_LADDER,
};

#[test]
fn fitted_slope_tracks_exponent() {
    for k in [0.5, 1.5, 2.5, 4.0] {
        let mean: f64 = (0..4)
            .map(|seed| {
                let x = generate_fk_noise::<f64>(&NoiseSpec::new(k, 1 << 14, seed)).unwrap();
                spectral_slope(&x).unwrap()
            })
            .sum::<f64>()
            / 4.0;
        assert!((mean + k).abs() <= 0.2, "k={k}: slope {mean}");
    }
}

#[test]
fn power_law_explains_more_variance_than_white_noise() {
    let fit = |k| {
        let x = generate_fk_noise::<f64>(&NoiseSpec::new(k, 1 << 14, 1)).unwrap();
        fit_spectral_slope(&x, SlopeBand::default()).unwrap()
    };
    let (white, brown) = (fit(0.0), fit(2.0));
    // raw periodogram bins scatter with variance pi^2/6 in log power
    assert!(brown.r_squared > 0.5, "{brown:?}");
    assert!(white.r_squared < 0.05, "{white:?}");
    assert!(brown.bins > 100);
}

#[test]
fn single_and_double_precision_agree() {
    let spec = NoiseSpec::new(1.0, 4096, 21);
    let a = generate_fk_noise::<f64>(&spec).unwrap();
    let b = generate_fk_noise::<f32>(&spec).unwrap();
    let scale = a.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - *y as f64).abs() <= 1e-4 * scale);
    }
}

#[test]
fn ladder_entropy_falls_with_exponent() {
    let pts = reference_ladder::<f64>(&STANDARD_LADDER, 1 << 14, 4, 4, 1).unwrap();
    assert_eq!(pts.len(), STANDARD_LADDER.len());
    for w in pts.windows(2) {
        assert!(
            w[1].entropy < w[0].entropy,
            "{} then {}",
            w[0].label,
            w[1].label
        );
    }
    assert!(pts.iter().all(|p| p.within_bounds(1e-9)));
    assert_eq!(pts[0].dimension, 4);
}

#[test]
fn ladder_is_reproducible() {
    let a = reference_ladder::<f64>(&[0.0, 1.0, 2.0], 4096, 77, 4, 1).unwrap();
    let b = reference_ladder::<f64>(&[0.0, 1.0, 2.0], 4096, 77, 4, 1).unwrap();
    assert_eq!(a, b);
}
