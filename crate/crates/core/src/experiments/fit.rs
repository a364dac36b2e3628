use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares fit of `A · cos(2π f t)` with `A ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CosineFit {
    pub f_hat_hz: f64,
    pub amplitude: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

fn profile(t: &[f64], y: &[f64], f: f64) -> (f64, f64) {
    let w = std::f64::consts::TAU * f;
    let (mut yc, mut cc) = (0.0, 0.0);
    for (&ti, &yi) in t.iter().zip(y) {
        let c = (w * ti).cos();
        yc += yi * c;
        cc += c * c;
    }
    let a = if cc > 0.0 { (yc / cc).clamp(0.0, 1.0) } else { 0.0 };
    let ss = t
        .iter()
        .zip(y)
        .map(|(&ti, &yi)| (yi - a * (w * ti).cos()).powi(2))
        .sum();
    (ss, a)
}

/// Fits times `t_s` (seconds) and values `y`.
///
/// The amplitude is profiled out for each trial frequency. A dense grid up
/// to the Nyquist frequency of the smallest sample spacing locates the
/// best peak, which golden-section search then refines. A series with no
/// oscillating component comes back with `f_hat_hz = 0`.
pub fn fit_cosine(t_s: &[f64], y: &[f64]) -> Result<CosineFit> {
    if t_s.len() != y.len() {
        return Err(Error::DegenerateFit(format!(
            "{} times but {} values",
            t_s.len(),
            y.len()
        )));
    }
    if t_s.len() < 5 {
        return Err(Error::DegenerateFit(format!(
            "need at least 5 points, got {}",
            t_s.len()
        )));
    }
    if t_s.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateFit("non-finite input".into()));
    }
    let mut sorted = t_s.to_vec();
    sorted.sort_by(f64::total_cmp);
    let span = sorted[sorted.len() - 1] - sorted[0];
    let min_dt = sorted
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d > 0.0)
        .fold(f64::INFINITY, f64::min);
    if span.is_nan() || span <= 0.0 || !min_dt.is_finite() {
        return Err(Error::DegenerateFit("all sample times coincide".into()));
    }

    let f_max = 0.5 / min_dt;
    let step = 1.0 / (20.0 * span);
    let n_grid = (f_max / step).ceil() as usize;
    let (mut best_f, mut best_ss) = (0.0, profile(t_s, y, 0.0).0);
    for i in 1..=n_grid {
        let f = (i as f64 * step).min(f_max);
        let ss = profile(t_s, y, f).0;
        if ss < best_ss {
            best_ss = ss;
            best_f = f;
        }
    }

    let (mut lo, mut hi) = ((best_f - step).max(0.0), (best_f + step).min(f_max));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut s1, mut s2) = (profile(t_s, y, x1).0, profile(t_s, y, x2).0);
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
        if s1 < s2 {
            hi = x2;
            x2 = x1;
            s2 = s1;
            x1 = hi - g * (hi - lo);
            s1 = profile(t_s, y, x1).0;
        } else {
            lo = x1;
            x1 = x2;
            s1 = s2;
            x2 = lo + g * (hi - lo);
            s2 = profile(t_s, y, x2).0;
        }
    }
    let refined = 0.5 * (lo + hi);
    let (ss, amplitude) = profile(t_s, y, refined);
    let (f_hat_hz, ss, amplitude) = if ss <= best_ss {
        (refined, ss, amplitude)
    } else {
        let (s, a) = profile(t_s, y, best_f);
        (best_f, s, a)
    };
    let f_hat_hz = if amplitude < 1e-12 { 0.0 } else { f_hat_hz };
    Ok(CosineFit {
        f_hat_hz,
        amplitude,
        residual: (ss / t_s.len() as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(points: usize, stop: f64) -> Vec<f64> {
        (0..points).map(|i| stop * i as f64 / (points - 1) as f64).collect()
    }

    #[test]
    fn recovers_synthetic_frequency() {
        let t = grid(50, 10e-6);
        for f in [238e3, 167e3, 57e3] {
            let y: Vec<f64> = t.iter().map(|t| (std::f64::consts::TAU * f * t).cos()).collect();
            let fit = fit_cosine(&t, &y).unwrap();
            assert!((fit.f_hat_hz / f - 1.0).abs() < 1e-6, "{f}: {fit:?}");
            assert!((fit.amplitude - 1.0).abs() < 1e-6);
            assert!(fit.residual < 1e-6);
        }
    }

    #[test]
    fn damped_amplitude_is_profiled() {
        let t = grid(60, 10e-6);
        let y: Vec<f64> = t
            .iter()
            .map(|t| 0.6 * (std::f64::consts::TAU * 200e3 * t).cos())
            .collect();
        let fit = fit_cosine(&t, &y).unwrap();
        assert!((fit.f_hat_hz - 200e3).abs() < 1.0);
        assert!((fit.amplitude - 0.6).abs() < 1e-6);
    }

    #[test]
    fn constant_series_gives_zero_frequency() {
        let t = grid(20, 5e-6);
        assert_eq!(fit_cosine(&t, &[1.0; 20]).unwrap().f_hat_hz, 0.0);
        assert_eq!(fit_cosine(&t, &[0.0; 20]).unwrap().f_hat_hz, 0.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(fit_cosine(&[0.0, 1.0, 2.0, 3.0], &[1.0; 4]).is_err());
        assert!(fit_cosine(&[1.0; 6], &[1.0; 6]).is_err());
        assert!(fit_cosine(&[0.0, 1.0], &[1.0]).is_err());
    }
}
