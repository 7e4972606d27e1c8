use crate::error::{Error, Result};
use crate::slab::{ReferenceVelocity, TimePartition};
use crate::spectral::{l2_sq, SpectralVectorField};

/// Fitted rate of an error sequence under step refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log error` against `log step`.
    pub rate: f64,
    /// `errors[i+1] / errors[i]`.
    pub factors: Vec<f64>,
    /// Whether the errors decrease strictly with the step.
    pub monotone: bool,
}

/// Fit `error ≈ C · step^rate`; steps must shrink by a fixed factor.
pub fn convergence_study(steps: &[f64], errors: &[f64]) -> Result<ConvergenceReport> {
    if steps.len() != errors.len() {
        return Err(Error::ShapeMismatch { expected: steps.len(), actual: errors.len() });
    }
    if steps.len() < 3 {
        return Err(Error::Estimate(format!(
            "convergence study needs at least 3 levels, got {}",
            steps.len()
        )));
    }
    if steps.iter().chain(errors).any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::Estimate("steps and errors must be positive and finite".into()));
    }
    let r0 = steps[1] / steps[0];
    if !(r0 < 1.0) || steps.windows(2).any(|w| ((w[1] / w[0]) - r0).abs() > 1e-9 * r0) {
        return Err(Error::Estimate("steps must shrink by a fixed factor".into()));
    }
    let xs: Vec<f64> = steps.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let factors: Vec<f64> = errors.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(ConvergenceReport {
        steps: steps.to_vec(),
        errors: errors.to_vec(),
        rate: sxy / sxx,
        monotone: factors.iter().all(|&f| f < 1.0),
        factors,
    })
}

/// `‖ū − u‖_{L²(Q)}` where `ū` is the slab-wise average of the interpolated
/// velocity. On each sample interval `‖ū − u(t)‖²` is quadratic in `t`, so
/// Simpson's rule per interval is exact.
pub fn ubar_error_l2q(velocity: &ReferenceVelocity, partition: &TimePartition) -> Result<f64> {
    let times = velocity.times();
    let mut total = 0.0;
    for slab in partition.slabs() {
        let ubar = velocity.average(slab.start, slab.end)?;
        let dist = |t: f64| -> Result<f64> { Ok(l2_sq(&ubar.sub(&velocity.at(t)?))) };
        let mut cuts: Vec<f64> = vec![slab.start];
        cuts.extend(times.iter().copied().filter(|&t| t > slab.start && t < slab.end));
        cuts.push(slab.end);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            total += (b - a) / 6.0 * (dist(a)? + 4.0 * dist(0.5 * (a + b))? + dist(b)?);
        }
    }
    Ok(total.max(0.0).sqrt())
}

/// Closed form of `‖ū − u‖_{L²(Q)}` for `u(t) = cos(t)·v`.
pub fn cosine_ubar_error(v: &SpectralVectorField, partition: &TimePartition) -> f64 {
    let norm = l2_sq(v);
    let mut total = 0.0;
    for slab in partition.slabs() {
        let (a, b) = (slab.start, slab.end);
        let dt = b - a;
        let mean = (b.sin() - a.sin()) / dt;
        let mean_sq = dt / 2.0 + ((2.0 * b).sin() - (2.0 * a).sin()) / 4.0;
        total += mean_sq - dt * mean * mean;
    }
    (norm * total).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn geometric_sequence_rate_one() {
        let r = convergence_study(&[0.1, 0.05, 0.025], &[0.1, 0.05, 0.025]).unwrap();
        assert!((r.rate - 1.0).abs() < 1e-12);
        assert!(r.monotone);
        assert_eq!(r.factors, vec![0.5, 0.5]);
    }

    #[test]
    fn nonmonotone_is_flagged_not_rejected() {
        let r = convergence_study(&[0.4, 0.2, 0.1, 0.05], &[1.0, 0.5, 0.6, 0.1]).unwrap();
        assert!(!r.monotone);
        assert!(r.rate.is_finite());
    }

    #[test]
    fn preconditions() {
        assert!(convergence_study(&[0.1, 0.05], &[1.0, 0.5]).is_err());
        assert!(convergence_study(&[0.1, 0.05, 0.02], &[1.0, 0.5, 0.2]).is_err());
        assert!(convergence_study(&[0.1, 0.05, 0.025], &[1.0, 0.0, 0.2]).is_err());
    }

    #[test]
    fn cosine_study_matches_closed_form_and_rate() {
        let g = Grid::new(4).unwrap();
        let v = SpectralVectorField::from_fn(g, |x, _, _| [0.0, 0.0, x.sin()]);
        let m = 1024;
        let ts: Vec<f64> = (0..=m).map(|i| i as f64 / m as f64).collect();
        let fields = ts.iter().map(|t| v.scale(t.cos())).collect();
        let rv = ReferenceVelocity::new(ts, fields).unwrap();
        let mut steps = Vec::new();
        let mut errors = Vec::new();
        for n in [4, 8, 16] {
            let p = TimePartition::uniform(1.0, n).unwrap();
            let measured = ubar_error_l2q(&rv, &p).unwrap();
            let exact = cosine_ubar_error(&v, &p);
            assert!((measured - exact).abs() <= 1e-4 * exact, "{n}: {measured} vs {exact}");
            steps.push(1.0 / n as f64);
            errors.push(measured);
        }
        let r = convergence_study(&steps, &errors).unwrap();
        assert!((r.rate - 1.0).abs() <= 0.05, "{}", r.rate);
    }
}
