use crate::error::{Error, Result};
use crate::estimates::quadrature::trapezoid;

/// One interval `(t_{k-1}, t_k)` of a partition; `index` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slab {
    pub index: usize,
    pub start: f64,
    pub end: f64,
}

impl Slab {
    pub fn dt(&self) -> f64 {
        self.end - self.start
    }

    /// Whether `t` lies in the closed slab, up to `tol`.
    pub fn contains(&self, t: f64, tol: f64) -> bool {
        t >= self.start - tol && t <= self.end + tol
    }
}

/// Ordered breakpoints `0 = t_0 < t_1 < … < t_N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimePartition {
    breakpoints: Vec<f64>,
}

impl TimePartition {
    pub fn from_breakpoints(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::param("partition", "needs at least two breakpoints"));
        }
        if breakpoints[0] != 0.0 {
            return Err(Error::param("partition", "first breakpoint must be 0"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("partition", "breakpoints must be strictly increasing"));
        }
        Ok(TimePartition { breakpoints })
    }

    /// `t_k = k T / N`.
    pub fn uniform(t_end: f64, slabs: usize) -> Result<Self> {
        if !(t_end > 0.0) {
            return Err(Error::param("T", format!("must be positive, got {t_end}")));
        }
        if slabs == 0 {
            return Err(Error::param("slabs", "must be at least 1"));
        }
        let mut bp: Vec<f64> = (0..=slabs)
            .map(|k| k as f64 * t_end / slabs as f64)
            .collect();
        bp[slabs] = t_end;
        Self::from_breakpoints(bp)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn end_time(&self) -> f64 {
        *self.breakpoints.last().expect("nonempty")
    }

    pub fn slab(&self, k: usize) -> Slab {
        Slab {
            index: k,
            start: self.breakpoints[k - 1],
            end: self.breakpoints[k],
        }
    }

    pub fn slabs(&self) -> impl Iterator<Item = Slab> + '_ {
        (1..=self.len()).map(move |k| self.slab(k))
    }

    /// Slab holding `t` (the earlier one at a shared breakpoint).
    pub fn locate(&self, t: f64) -> Option<Slab> {
        let tol = 1e-12 * self.end_time().max(1.0);
        self.slabs().find(|s| s.contains(t, tol))
    }
}

/// Velocity norms at one instant, the input of the slab-size rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityNormSample {
    pub t: f64,
    /// `Σ‖u_i‖²`
    pub l2_sq: f64,
    /// `Σ‖∇u_i‖²`
    pub h1_semi_sq: f64,
}

/// `K*_k = Δt_k · sup ‖u‖² + ∫ ‖∇u‖²` over one slab's samples; the sup is
/// over the samples and the integral is the trapezoid rule on them.
pub fn compute_kstar(samples: &[VelocityNormSample], dt: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Estimate("K* needs at least one sample".into()));
    }
    let sup = samples.iter().map(|s| s.l2_sq).fold(f64::NEG_INFINITY, f64::max);
    let ts: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.h1_semi_sq).collect();
    Ok(dt * sup + trapezoid(&ts, &ys))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PartitionPolicy {
    Uniform { slabs: usize },
    /// Greedy slabs, each as long as `4 C K*_k <= 1 − ε₀` allows.
    Adaptive { eps0: f64, c: f64, dt_floor: f64 },
}

/// Build a partition of `(0, T)`.
///
/// The adaptive policy places breakpoints on the sample times of `series`,
/// extending each slab greedily while the slab-size rule holds. It fails
/// when a single sample interval already breaks the rule or when a slab would
/// be shorter than `dt_floor`.
pub fn build_partition(
    t_end: f64,
    policy: PartitionPolicy,
    series: Option<&[VelocityNormSample]>,
) -> Result<TimePartition> {
    match policy {
        PartitionPolicy::Uniform { slabs } => TimePartition::uniform(t_end, slabs),
        PartitionPolicy::Adaptive { eps0, c, dt_floor } => {
            if !(eps0 > 0.0 && eps0 < 1.0) {
                return Err(Error::param("epsilon0", format!("must lie in (0, 1), got {eps0}")));
            }
            if !(c > 0.0) {
                return Err(Error::param("C", format!("must be positive, got {c}")));
            }
            let series = series.ok_or_else(|| {
                Error::Partition("adaptive policy needs a sampled velocity series".into())
            })?;
            adaptive(t_end, eps0, c, dt_floor, series)
        }
    }
}

fn adaptive(
    t_end: f64,
    eps0: f64,
    c: f64,
    dt_floor: f64,
    series: &[VelocityNormSample],
) -> Result<TimePartition> {
    if series.len() < 2 {
        return Err(Error::Partition("velocity series needs at least two samples".into()));
    }
    let tol = 1e-12 * t_end.max(1.0);
    if series[0].t.abs() > tol || (series[series.len() - 1].t - t_end).abs() > tol {
        return Err(Error::Partition(format!(
            "velocity series spans [{}, {}], partition needs [0, {t_end}]",
            series[0].t,
            series[series.len() - 1].t
        )));
    }
    let limit = (1.0 - eps0) / (4.0 * c);
    let mut bp = vec![0.0];
    let mut start = 0;
    while start < series.len() - 1 {
        let mut end = start;
        for cand in start + 1..series.len() {
            let dt = series[cand].t - series[start].t;
            if compute_kstar(&series[start..=cand], dt)? <= limit {
                end = cand;
            } else {
                break;
            }
        }
        if end == start {
            return Err(Error::Partition(format!(
                "slab rule 4*C*K* <= 1-eps0 cannot hold on [{}, {}] (sampling interval); \
                 the rule forces a slab shorter than the velocity sampling",
                series[start].t,
                series[start + 1].t
            )));
        }
        let dt = series[end].t - series[start].t;
        if dt < dt_floor && end != series.len() - 1 {
            return Err(Error::Partition(format!(
                "slab starting at t = {} would have dt = {dt:.3e} below the floor {dt_floor:.3e}",
                series[start].t
            )));
        }
        bp.push(series[end].t);
        start = end;
    }
    let last = bp.len() - 1;
    bp[last] = t_end;
    TimePartition::from_breakpoints(bp)
}
