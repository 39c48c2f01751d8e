//! Least-squares line fit and discrete path seminorms.

/// Fits `y = intercept + slope * x`; returns `(slope, intercept)`.
///
/// Returns `None` for fewer than two points, a degenerate abscissa, or
/// non-finite data.
pub fn line_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let n = x.len();
    if n < 2 || y.len() != n || x.iter().chain(y).any(|v| !v.is_finite()) {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Discrete Holder seminorm `max |v_j - v_i| / ((j - i) step)^alpha` over
/// the dyadic lags `min_lag, 2 min_lag, 4 min_lag, ...` (in samples).
pub fn holder_seminorm(values: &[f64], step: f64, alpha: f64, min_lag: usize) -> f64 {
    let mut best = 0.0f64;
    let mut lag = min_lag.max(1);
    while lag < values.len() {
        let scale = (lag as f64 * step).powf(-alpha);
        for (a, b) in values.iter().zip(&values[lag..]) {
            best = best.max((b - a).abs() * scale);
        }
        lag *= 2;
    }
    best
}

/// Largest absolute value.
pub fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holder_of_linear_path() {
        // v = t on step 0.01: |dv| / dt^(1/4) = dt^(3/4), largest at the longest lag
        let v: Vec<f64> = (0..101).map(|i| i as f64 * 0.01).collect();
        let h = holder_seminorm(&v, 0.01, 0.25, 4);
        assert!((h - 0.64f64.powf(0.75)).abs() < 1e-12);
        assert_eq!(holder_seminorm(&[1.0; 50], 0.1, 0.25, 4), 0.0);
    }


    #[test]
    fn recovers_exact_line() {
        let x = [0.0, 1.0, 2.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let (s, c) = line_fit(&x, &y).unwrap();
        assert!((s + 0.5).abs() < 1e-14 && (c - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(line_fit(&[1.0], &[2.0]).is_none());
        assert!(line_fit(&[1.0, 1.0], &[2.0, 3.0]).is_none());
        assert!(line_fit(&[0.0, 1.0], &[f64::NEG_INFINITY, 3.0]).is_none());
    }
}
