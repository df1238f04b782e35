//! Small least-squares and decade-analysis helpers shared by the
//! condition checkers.

/// Per-decade suprema of `(s, value)` samples, in the order the samples
/// are given. Returns `(decade, sup, s attaining the sup)` per decade.
pub(crate) fn decade_sups(samples: &[(f64, f64)]) -> Vec<(i64, f64, f64)> {
    let mut decades: Vec<(i64, f64, f64)> = Vec::new();
    for &(s, v) in samples {
        let d = s.log10().floor() as i64;
        match decades.last_mut() {
            Some((dl, sup, s_at)) if *dl == d => {
                if v > *sup {
                    *sup = v;
                    *s_at = s;
                }
            }
            _ => decades.push((d, v, s)),
        }
    }
    decades
}

/// Whether the trailing `window + 1` per-decade sups are strictly
/// increasing, i.e. the quantity keeps growing as the samples progress
/// toward their end.
pub(crate) fn growing_tail(sups: &[(i64, f64, f64)], window: usize) -> bool {
    sups.len() > window && sups[sups.len() - (window + 1)..].windows(2).all(|w| w[1].1 > w[0].1)
}

/// Ordinary least-squares line fit. Returns `(slope, intercept, r_squared)`.
///
/// `r_squared` is 1 for a perfect fit and 1 when the data are constant
/// (a constant is fit exactly by a zero-slope line).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    assert!(n >= 2.0, "need at least two points to fit a line");
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let mut ss_res = 0.0;
    let mut ss_tot = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let pred = slope * x + intercept;
        ss_res += (y - pred) * (y - pred);
        ss_tot += (y - my) * (y - my);
    }
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::linear_fit;

    #[test]
    fn exact_line_recovered() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.5).collect();
        let (m, b, r2) = linear_fit(&xs, &ys);
        assert!((m - 3.0).abs() < 1e-12);
        assert!((b + 1.5).abs() < 1e-12);
        assert!((r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_data_has_zero_slope() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [4.0, 4.0, 4.0];
        let (m, _, r2) = linear_fit(&xs, &ys);
        assert_eq!(m, 0.0);
        assert_eq!(r2, 1.0);
    }
}
