//! Weighted least-squares fitting of the single-exponential decay model
//! `k(m) = B·p^{m−1}`.
//!
//! Both gate ensembles shipped here have multiplicity-free invariant blocks,
//! so the theoretical sequence average is a single scalar exponential; the
//! decay `p` is the quantity of interest and the amplitude `B` absorbs all
//! state-preparation and measurement imperfections.  Initialization uses a
//! log-linear regression where the data allows and otherwise a dense grid
//! over `p ∈ [−1, 1]` (decays of Pauli-channel eigenvalues can legitimately
//! be negative); a damped Gauss–Newton iteration polishes the result.

use crate::error::{Error, Result};

/// Result of a single-exponential fit.
#[derive(Debug, Clone, Copy)]
pub struct ExponentialFit {
    /// Prefactor `B` (SPAM-dependent).
    pub amplitude: f64,
    /// Decay parameter `p` (SPAM-free).
    pub rate: f64,
    /// Weighted root-mean-square residual of the final model.
    pub residual: f64,
}

const MAX_ITERS: usize = 100;
const GRID_POINTS: usize = 201;

/// Fit `B·p^{m−1}` to `(m, k̂, weight)` points.  Requires at least three
/// distinct sequence lengths; weights must be positive.
pub fn fit_single_exponential(points: &[(usize, f64, f64)]) -> Result<ExponentialFit> {
    let mut lengths: Vec<usize> = points.iter().map(|p| p.0).collect();
    lengths.sort_unstable();
    lengths.dedup();
    if lengths.len() < 3 {
        return Err(Error::Estimation(format!(
            "exponential fit needs ≥ 3 distinct lengths, got {}",
            lengths.len()
        )));
    }
    if points.iter().any(|&(m, _, w)| m == 0 || !(w > 0.0)) {
        return Err(Error::Estimation(
            "fit points need m ≥ 1 and positive weights".into(),
        ));
    }

    let mut candidates: Vec<(f64, f64)> = Vec::new();
    if let Some(init) = log_linear_init(points) {
        candidates.push(init);
    }
    candidates.push(grid_init(points));

    let mut best: Option<ExponentialFit> = None;
    for (b0, p0) in candidates {
        let fit = gauss_newton(points, b0, p0);
        if best.as_ref().map_or(true, |b| fit.residual < b.residual) {
            best = Some(fit);
        }
    }
    Ok(best.expect("at least the grid candidate exists"))
}

fn weighted_ssr(points: &[(usize, f64, f64)], b: f64, p: f64) -> f64 {
    points
        .iter()
        .map(|&(m, y, w)| {
            let r = y - b * p.powi(m as i32 - 1);
            w * r * r
        })
        .sum()
}

fn rms(points: &[(usize, f64, f64)], b: f64, p: f64) -> f64 {
    let wsum: f64 = points.iter().map(|&(_, _, w)| w).sum();
    (weighted_ssr(points, b, p) / wsum).sqrt()
}

/// Linear regression of `ln k̂` on `m − 1`, usable when all retained points
/// are positive and at least two lengths survive.
fn log_linear_init(points: &[(usize, f64, f64)]) -> Option<(f64, f64)> {
    let usable: Vec<(f64, f64, f64)> = points
        .iter()
        .filter(|&&(_, y, _)| y > 0.0)
        .map(|&(m, y, w)| ((m - 1) as f64, y.ln(), w))
        .collect();
    let mut xs: Vec<u64> = usable.iter().map(|p| p.0.to_bits()).collect();
    xs.sort_unstable();
    xs.dedup();
    if xs.len() < 2 {
        return None;
    }
    let sw: f64 = usable.iter().map(|p| p.2).sum();
    let mx = usable.iter().map(|p| p.0 * p.2).sum::<f64>() / sw;
    let my = usable.iter().map(|p| p.1 * p.2).sum::<f64>() / sw;
    let sxx: f64 = usable.iter().map(|p| p.2 * (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = usable.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let p = slope.exp();
    let b = intercept.exp();
    (b.is_finite() && p.is_finite()).then_some((b, p))
}

/// Dense scan over `p ∈ [−1, 1]` with the closed-form optimal `B(p)`.
fn grid_init(points: &[(usize, f64, f64)]) -> (f64, f64) {
    let mut best = (0.0, 0.0);
    let mut best_ssr = f64::INFINITY;
    for i in 0..GRID_POINTS {
        let p = -1.0 + 2.0 * i as f64 / (GRID_POINTS - 1) as f64;
        let num: f64 = points
            .iter()
            .map(|&(m, y, w)| w * y * p.powi(m as i32 - 1))
            .sum();
        let den: f64 = points
            .iter()
            .map(|&(m, _, w)| w * p.powi(2 * (m as i32 - 1)))
            .sum();
        let b = if den > 1e-300 { num / den } else { 0.0 };
        let ssr = weighted_ssr(points, b, p);
        if ssr < best_ssr {
            best_ssr = ssr;
            best = (b, p);
        }
    }
    best
}

/// Levenberg-damped Gauss–Newton refinement of `(B, p)`.
fn gauss_newton(points: &[(usize, f64, f64)], mut b: f64, mut p: f64) -> ExponentialFit {
    let mut lambda = 1e-3;
    let mut ssr = weighted_ssr(points, b, p);
    for _ in 0..MAX_ITERS {
        // Normal equations for the 2×2 damped system.
        let (mut jbb, mut jbp, mut jpp, mut gb, mut gp) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(m, y, w) in points {
            let e = m as i32 - 1;
            let phi = p.powi(e);
            let dfdb = phi;
            let dfdp = if e == 0 { 0.0 } else { b * e as f64 * p.powi(e - 1) };
            let r = y - b * phi;
            jbb += w * dfdb * dfdb;
            jbp += w * dfdb * dfdp;
            jpp += w * dfdp * dfdp;
            gb += w * dfdb * r;
            gp += w * dfdp * r;
        }
        let (abb, app) = (jbb * (1.0 + lambda), jpp * (1.0 + lambda));
        let det = abb * app - jbp * jbp;
        if det.abs() < 1e-300 {
            break;
        }
        let db = (app * gb - jbp * gp) / det;
        let dp = (abb * gp - jbp * gb) / det;
        let (nb, np) = (b + db, p + dp);
        let nssr = weighted_ssr(points, nb, np);
        if nssr.is_finite() && nssr < ssr {
            let step = db.abs().max(dp.abs());
            b = nb;
            p = np;
            ssr = nssr;
            lambda = (lambda / 10.0).max(1e-12);
            if step < 1e-13 {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    ExponentialFit {
        amplitude: b,
        rate: p,
        residual: rms(points, b, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model_points(b: f64, p: f64, ms: &[usize]) -> Vec<(usize, f64, f64)> {
        ms.iter().map(|&m| (m, b * p.powi(m as i32 - 1), 1.0)).collect()
    }

    #[test]
    fn exact_model_data_recovered() {
        let pts = model_points(0.9, 0.95, &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        let fit = fit_single_exponential(&pts).unwrap();
        assert!((fit.amplitude - 0.9).abs() < 1e-9, "B = {}", fit.amplitude);
        assert!((fit.rate - 0.95).abs() < 1e-9, "p = {}", fit.rate);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn constant_data_gives_unit_decay() {
        let pts = model_points(1.0, 1.0, &[1, 2, 4, 8]);
        let fit = fit_single_exponential(&pts).unwrap();
        assert!((fit.amplitude - 1.0).abs() < 1e-9);
        assert!((fit.rate - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_decay_recovered_without_log_init() {
        let pts = model_points(0.8, -0.6, &[1, 2, 3, 4, 5, 6, 7, 8]);
        let fit = fit_single_exponential(&pts).unwrap();
        assert!((fit.amplitude - 0.8).abs() < 1e-8, "B = {}", fit.amplitude);
        assert!((fit.rate + 0.6).abs() < 1e-8, "p = {}", fit.rate);
    }

    #[test]
    fn noisy_data_recovered_approximately() {
        let mut pts = model_points(0.97, 0.93, &[1, 2, 3, 5, 8, 12, 16, 20]);
        for (i, p) in pts.iter_mut().enumerate() {
            p.1 += if i % 2 == 0 { 2e-4 } else { -311e-6 };
        }
        let fit = fit_single_exponential(&pts).unwrap();
        assert!((fit.rate - 0.93).abs() < 5e-3);
        assert!((fit.amplitude - 0.97).abs() < 5e-3);
    }

    #[test]
    fn weights_steer_the_fit() {
        // Two clean early points plus a wildly wrong but zero-ish-weight
        // late point: the fit should follow the clean points.
        let mut pts = model_points(1.0, 0.9, &[1, 2, 3, 4]);
        pts.push((12, 5.0, 1e-9));
        let fit = fit_single_exponential(&pts).unwrap();
        assert!((fit.rate - 0.9).abs() < 1e-3);
    }

    #[test]
    fn too_few_lengths_rejected() {
        let pts = model_points(1.0, 0.9, &[1, 2]);
        assert!(fit_single_exponential(&pts).is_err());
        assert!(fit_single_exponential(&[(1, 1.0, 1.0), (2, 0.9, 1.0), (2, 0.9, 1.0)]).is_err());
    }
}
