//! One-dimensional quadrature rules over sampled series.

/// Composite trapezoid rule on arbitrary nodes.
pub fn trapezoid(ts: &[f64], ys: &[f64]) -> f64 {
    debug_assert_eq!(ts.len(), ys.len());
    ts.windows(2)
        .zip(ys.windows(2))
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .sum()
}

/// Composite Simpson rule on `2m + 1` uniformly spaced samples.
pub fn simpson(h: f64, ys: &[f64]) -> f64 {
    assert!(ys.len() >= 3 && ys.len() % 2 == 1, "simpson needs an odd sample count >= 3");
    let last = ys.len() - 1;
    let mut sum = ys[0] + ys[last];
    for (i, y) in ys.iter().enumerate().take(last).skip(1) {
        sum += if i % 2 == 1 { 4.0 * y } else { 2.0 * y };
    }
    sum * h / 3.0
}

/// Trapezoid rule with Gregory end corrections on uniformly spaced samples.
///
/// Corrections use forward differences at the left end and backward
/// differences at the right end up to third order; fewer samples fall back to
/// lower orders (two samples is the plain trapezoid).
pub fn gregory(h: f64, ys: &[f64]) -> f64 {
    let n = ys.len();
    if n < 2 {
        return 0.0;
    }
    let trap: f64 = ys.windows(2).map(|y| 0.5 * h * (y[0] + y[1])).sum();
    let order = (n - 1).min(3);
    let fwd = |k: usize| -> f64 {
        match k {
            1 => ys[1] - ys[0],
            2 => ys[2] - 2.0 * ys[1] + ys[0],
            _ => ys[3] - 3.0 * ys[2] + 3.0 * ys[1] - ys[0],
        }
    };
    let bwd = |k: usize| -> f64 {
        let m = n - 1;
        match k {
            1 => ys[m] - ys[m - 1],
            2 => ys[m] - 2.0 * ys[m - 1] + ys[m - 2],
            _ => ys[m] - 3.0 * ys[m - 1] + 3.0 * ys[m - 2] - ys[m - 3],
        }
    };
    const COEF: [f64; 3] = [1.0 / 12.0, 1.0 / 24.0, 19.0 / 720.0];
    let mut corr = 0.0;
    if order >= 2 {
        // with two samples only the plain rule is used
        corr -= COEF[0] * (bwd(1) - fwd(1));
        corr -= COEF[1] * (bwd(2) + fwd(2));
    }
    if order >= 3 {
        corr -= COEF[2] * (bwd(3) - fwd(3));
    }
    trap + h * corr
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_linear_exact() {
        let ts = [0.0, 0.3, 1.0];
        let ys: Vec<f64> = ts.iter().map(|t| 2.0 * t + 1.0).collect();
        assert!((trapezoid(&ts, &ys) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn simpson_cubic_exact() {
        let h = 0.25;
        let ys: Vec<f64> = (0..5).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(h, &ys) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn gregory_is_high_order() {
        let f = |t: f64| (-2.0 * t).exp();
        let exact = (1.0 - (-2.0f64).exp()) / 2.0;
        let err = |m: usize| {
            let h = 1.0 / m as f64;
            let ys: Vec<f64> = (0..=m).map(|i| f(i as f64 * h)).collect();
            (gregory(h, &ys) - exact).abs()
        };
        let (a, b) = (err(20), err(40));
        assert!(a / b > 14.0, "order check {}", a / b);
        assert!(err(100) < 1e-10);
        // cubic polynomials integrate exactly
        let ys: Vec<f64> = (0..=6).map(|i| (i as f64 / 6.0).powi(3)).collect();
        assert!((gregory(1.0 / 6.0, &ys) - 0.25).abs() < 1e-15);
    }
}
