//! L-curve corner by maximum discrete curvature.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LcurveCorner {
    pub lambda: f64,
    pub index: usize,
    pub curvature: f64,
    /// Curvature at every interior sample (first and last are `NaN`).
    pub curvatures: Vec<f64>,
    /// Set when the peak does not stand out: max curvature below ten times
    /// the median absolute curvature, or essentially zero.
    pub low_confidence: bool,
}

/// Three-point first and second derivatives on a non-uniform grid.
fn derivatives(t: [f64; 3], v: [f64; 3]) -> (f64, f64) {
    let h1 = t[1] - t[0];
    let h2 = t[2] - t[1];
    let d1 = -h2 / (h1 * (h1 + h2)) * v[0] + (h2 - h1) / (h1 * h2) * v[1]
        + h1 / (h2 * (h1 + h2)) * v[2];
    let d2 = 2.0 * (v[0] / (h1 * (h1 + h2)) - v[1] / (h1 * h2) + v[2] / (h2 * (h1 + h2)));
    (d1, d2)
}

/// Corner of the curve `(log ρ(λ), log η(λ))` from samples `(λ, ρ, η)` with
/// λ ascending: the interior sample of largest signed curvature
/// `(x'y'' − y'x'')/(x'² + y'²)^{3/2}`, derivatives taken in `log λ`.
pub fn lcurve_corner(samples: &[(f64, f64, f64)]) -> Result<LcurveCorner> {
    if samples.len() < 5 {
        return Err(Error::InvalidParameter(format!(
            "L-curve needs at least 5 samples, got {}",
            samples.len()
        )));
    }
    let mut t = Vec::with_capacity(samples.len());
    let mut x = Vec::with_capacity(samples.len());
    let mut y = Vec::with_capacity(samples.len());
    for &(l, rho, eta) in samples {
        let (lt, lx, ly) = (l.ln(), rho.ln(), eta.ln());
        if !(lt.is_finite() && lx.is_finite() && ly.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite logarithm in L-curve sample (λ={l}, ρ={rho}, η={eta})"
            )));
        }
        t.push(lt);
        x.push(lx);
        y.push(ly);
    }
    if t.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("L-curve λ must be strictly ascending".into()));
    }

    let n = samples.len();
    let mut curvatures = vec![f64::NAN; n];
    for i in 1..n - 1 {
        let tt = [t[i - 1], t[i], t[i + 1]];
        let (x1, x2) = derivatives(tt, [x[i - 1], x[i], x[i + 1]]);
        let (y1, y2) = derivatives(tt, [y[i - 1], y[i], y[i + 1]]);
        let speed = (x1 * x1 + y1 * y1).powf(1.5);
        curvatures[i] = if speed > 0.0 {
            (x1 * y2 - y1 * x2) / speed
        } else {
            0.0
        };
    }

    let (index, curvature) = (1..n - 1)
        .map(|i| (i, curvatures[i]))
        .fold((1, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });

    let mut abs: Vec<f64> = curvatures[1..n - 1].iter().map(|c| c.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let median = if abs.len() % 2 == 1 {
        abs[abs.len() / 2]
    } else {
        0.5 * (abs[abs.len() / 2 - 1] + abs[abs.len() / 2])
    };
    let low_confidence = curvature < 10.0 * median || curvature <= 1e-10;

    Ok(LcurveCorner {
        lambda: samples[index].0,
        index,
        curvature,
        curvatures,
        low_confidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l_shape_corner_at_joint() {
        // Vertical drop in log η, then horizontal run in log ρ; joint at j = 6.
        let j = 6;
        let samples: Vec<(f64, f64, f64)> = (0..14)
            .map(|i| {
                let l = 10f64.powi(i as i32 - 7);
                let (x, y) = if i <= j {
                    (0.0, (j - i) as f64)
                } else {
                    ((i - j) as f64, 0.0)
                };
                (l, x.exp(), y.exp())
            })
            .collect();
        let c = lcurve_corner(&samples).unwrap();
        assert_eq!(c.index, j);
        assert!(!c.low_confidence);
    }

    #[test]
    fn straight_line_is_low_confidence() {
        let samples: Vec<(f64, f64, f64)> = (0..10)
            .map(|i| {
                let s = i as f64 * 0.5;
                (10f64.powi(i), s.exp(), (-s).exp())
            })
            .collect();
        let c = lcurve_corner(&samples).unwrap();
        assert!(c.index >= 1 && c.index <= 8);
        assert!(c.low_confidence);
    }

    #[test]
    fn input_errors() {
        let s = vec![(1.0, 1.0, 1.0); 4];
        assert!(lcurve_corner(&s).is_err());
        let s: Vec<_> = (1..7).map(|i| (i as f64, 0.0, 1.0)).collect();
        assert!(lcurve_corner(&s).is_err());
        let s: Vec<_> = (1..7).map(|i| ((7 - i) as f64, 1.0, 1.0)).collect();
        assert!(lcurve_corner(&s).is_err());
    }
}
