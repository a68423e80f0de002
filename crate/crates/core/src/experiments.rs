//! Ensemble protocols: the cooperation transition in `r` and the fixation
//! probability of cooperation as a function of the initial core size.
//!
//! Every trial gets its own seed from [`derive_seed`], keyed by the master
//! seed, an experiment tag and the trial's coordinates. Trials run on the
//! current rayon pool and are reduced in index order, so results do not
//! depend on the number of workers.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::output::fmt_sig;
use crate::seeding::derive_seed;
use crate::simulation::{run_realization, stationary_mean, SimParams};

pub const TRANSITION_TAG: &str = "transition";
pub const FIXATION_TAG: &str = "fixation";
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionPoint {
    pub r: f64,
    pub mean: f64,
    pub stderr: f64,
    pub nonstationary_frac: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionCurve {
    pub points: Vec<TransitionPoint>,
    pub realizations: usize,
    /// Parameters shared by every point; `r` is ignored.
    pub base: SimParams,
    pub ni: usize,
    pub nmax: usize,
    pub window: usize,
}

impl TransitionCurve {
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "r,mean_coop,stderr,nonstationary_frac,realizations")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt_sig(p.r),
                fmt_sig(p.mean),
                fmt_sig(p.stderr),
                fmt_sig(p.nonstationary_frac),
                self.realizations
            )?;
        }
        Ok(())
    }
}

/// Seed of realization `k` at benefit-cost ratio `r`.
pub fn transition_seed(master: u64, r: f64, k: usize) -> u64 {
    derive_seed(master, TRANSITION_TAG, &[r.to_bits(), k as u64])
}

/// Seed of trial `k` with an initial core of `ni` cooperators.
pub fn fixation_seed(master: u64, ni: usize, k: usize) -> u64 {
    derive_seed(master, FIXATION_TAG, &[ni as u64, k as u64])
}

fn check_ensemble(ni: usize, nmax: usize, realizations: usize, window: usize) -> Result<()> {
    if realizations == 0 {
        return Err(invalid("need at least one realization"));
    }
    if window == 0 {
        return Err(invalid("stationarity window must be >= 1"));
    }
    if nmax < ni {
        return Err(invalid(format!("Nmax = {nmax} is below Ni = {ni}")));
    }
    Ok(())
}

/// Runs `realizations` trials at a single `r` (with no cooperator influx)
/// and aggregates their stationary means. Trajectories shorter than the
/// window are averaged over their full length.
pub fn ensemble_point(
    base: &SimParams,
    r: f64,
    ni: usize,
    nmax: usize,
    realizations: usize,
    window: usize,
) -> Result<TransitionPoint> {
    check_ensemble(ni, nmax, realizations, window)?;
    let params = SimParams {
        r,
        pc_growth: 0.0,
        ..*base
    };
    params.validate()?;
    let outcomes: Vec<(f64, bool)> = (0..realizations)
        .into_par_iter()
        .map(|k| {
            let p = params.with_seed(transition_seed(base.seed, r, k));
            let traj = run_realization(&p, ni, nmax)?;
            let w = window.min(traj.len());
            stationary_mean(&traj, w)
        })
        .collect::<Result<_>>()?;
    let count = outcomes.len() as f64;
    let mean = outcomes.iter().map(|o| o.0).sum::<f64>() / count;
    let stderr = if outcomes.len() > 1 {
        let var = outcomes.iter().map(|o| (o.0 - mean).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    let nonstationary = outcomes.iter().filter(|o| !o.1).count() as f64 / count;
    Ok(TransitionPoint {
        r,
        mean,
        stderr,
        nonstationary_frac: nonstationary,
    })
}

/// Mean stationary cooperation as a function of `r` over an ascending grid.
pub fn transition_curve(
    base: &SimParams,
    r_grid: &[f64],
    ni: usize,
    nmax: usize,
    realizations: usize,
    window: usize,
) -> Result<TransitionCurve> {
    if r_grid.is_empty() {
        return Err(invalid("r grid is empty"));
    }
    if r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("r grid must be strictly increasing"));
    }
    check_ensemble(ni, nmax, realizations, window)?;
    let points = r_grid
        .iter()
        .map(|&r| ensemble_point(base, r, ni, nmax, realizations, window))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransitionCurve {
        points,
        realizations,
        base: SimParams {
            pc_growth: 0.0,
            ..*base
        },
        ni,
        nmax,
        window,
    })
}

/// `r` values from `r_min` to `r_max` inclusive in `steps` equal intervals
/// (`steps` points; a single point gives `[r_min]`).
pub fn linear_grid(r_min: f64, r_max: f64, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(invalid("grid needs at least one point"));
    }
    if steps == 1 {
        return Ok(vec![r_min]);
    }
    if r_max.is_nan() || r_max <= r_min {
        return Err(invalid(format!(
            "r_max = {r_max} must exceed r_min = {r_min}"
        )));
    }
    let h = (r_max - r_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|i| {
            if i + 1 == steps {
                r_max
            } else {
                r_min + h * i as f64
            }
        })
        .collect())
}

/// Bracket around the critical benefit-cost ratio.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RcEstimate {
    /// Largest sampled `r` whose mean cooperation is below the threshold.
    pub lo: f64,
    /// The next sampled `r`, whose mean is at or above the threshold.
    pub hi: f64,
}

impl RcEstimate {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `r` one bracket width above the midpoint, the default "just above
    /// the critical value" for fixation runs.
    pub fn just_above(&self) -> f64 {
        self.midpoint() + self.width()
    }

    pub fn overlaps(&self, other: &RcEstimate) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

/// Brackets the `threshold` crossing of a transition curve: `lo` is the
/// largest `r` with mean below the threshold and `hi` the grid point right
/// after it.
pub fn estimate_rc(curve: &TransitionCurve, threshold: f64) -> Result<RcEstimate> {
    let pts = &curve.points;
    let below = pts
        .iter()
        .rposition(|p| p.mean < threshold)
        .ok_or_else(|| {
            Error::NoTransitionInRange(format!(
                "every mean is >= {threshold}; extend the grid to lower r"
            ))
        })?;
    let above = pts.get(below + 1).ok_or_else(|| {
        Error::NoTransitionInRange(format!(
            "mean at the largest r = {} is below {threshold}; extend the grid to higher r",
            pts[below].r
        ))
    })?;
    Ok(RcEstimate {
        lo: pts[below].r,
        hi: above.r,
    })
}

/// Whether every point up to the bracket lies below the threshold, i.e. the
/// curve crosses it exactly once.
pub fn is_monotone_crossing(curve: &TransitionCurve, est: &RcEstimate, threshold: f64) -> bool {
    curve
        .points
        .iter()
        .filter(|p| p.r <= est.lo)
        .all(|p| p.mean < threshold)
}

/// Shrinks a bracket by bisection until its width is at most `tol`.
/// `mean_at` returns the ensemble mean cooperation at a given `r`.
pub fn refine_rc<F>(
    mut mean_at: F,
    mut est: RcEstimate,
    threshold: f64,
    tol: f64,
) -> Result<RcEstimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid("bisection tolerance must be > 0"));
    }
    while est.width() > tol {
        let mid = est.midpoint();
        if mean_at(mid)? < threshold {
            est.lo = mid;
        } else {
            est.hi = mid;
        }
    }
    Ok(est)
}

/// Refines a bracket by re-running ensembles at the bisection points.
pub fn refine_rc_by_simulation(
    curve: &TransitionCurve,
    est: RcEstimate,
    threshold: f64,
    tol: f64,
) -> Result<RcEstimate> {
    refine_rc(
        |r| {
            ensemble_point(
                &curve.base,
                r,
                curve.ni,
                curve.nmax,
                curve.realizations,
                curve.window,
            )
            .map(|p| p.mean)
        },
        est,
        threshold,
        tol,
    )
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixationPoint {
    pub ni: usize,
    pub m: usize,
    pub mc: usize,
    pub pf: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
}

impl FixationPoint {
    pub fn new(ni: usize, m: usize, mc: usize) -> Self {
        let (wilson_lo, wilson_hi) = wilson_interval(mc, m, Z95);
        FixationPoint {
            ni,
            m,
            mc,
            pf: if m == 0 { 0.0 } else { mc as f64 / m as f64 },
            wilson_lo,
            wilson_hi,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixationCurve {
    pub points: Vec<FixationPoint>,
    pub n_target: usize,
    pub r: f64,
    pub base: SimParams,
}

impl FixationCurve {
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "ni,M,Mc,pf,wilson_lo,wilson_hi")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.ni,
                p.m,
                p.mc,
                fmt_sig(p.pf),
                fmt_sig(p.wilson_lo),
                fmt_sig(p.wilson_hi)
            )?;
        }
        Ok(())
    }

    /// True unless some larger core does significantly worse than a smaller
    /// one, i.e. P_f is nondecreasing up to Wilson-interval overlap.
    pub fn is_nondecreasing_within_intervals(&self) -> bool {
        self.points.iter().enumerate().all(|(i, a)| {
            self.points[i + 1..]
                .iter()
                .all(|b| b.wilson_hi >= a.wilson_lo)
        })
    }
}

/// Fixation probability of cooperation: for each core size, the fraction
/// of `m` trials that reach `n_target` nodes with more than half of them
/// cooperating, under a pure defector influx.
pub fn fixation_probability(
    base: &SimParams,
    r: f64,
    ni_list: &[usize],
    m: usize,
    n_target: usize,
) -> Result<FixationCurve> {
    if ni_list.is_empty() {
        return Err(invalid("Ni list is empty"));
    }
    if ni_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("Ni list must be strictly increasing"));
    }
    if m == 0 {
        return Err(invalid("M must be >= 1"));
    }
    let params = SimParams {
        r,
        pc_growth: 0.0,
        ..*base
    };
    params.validate()?;
    let mut points = Vec::with_capacity(ni_list.len());
    for &ni in ni_list {
        if ni > n_target {
            return Err(invalid(format!(
                "Ni = {ni} exceeds the target size {n_target}"
            )));
        }
        let successes: Vec<bool> = (0..m)
            .into_par_iter()
            .map(|k| {
                let p = params.with_seed(fixation_seed(base.seed, ni, k));
                let traj = run_realization(&p, ni, n_target)?;
                Ok(!traj.absorbed && traj.final_fraction() > 0.5)
            })
            .collect::<Result<_>>()?;
        let mc = successes.iter().filter(|&&s| s).count();
        points.push(FixationPoint::new(ni, m, mc));
    }
    Ok(FixationCurve {
        points,
        n_target,
        r,
        base: params,
    })
}

/// Default tolerance for the cooperative seed: `2 / M`.
pub fn default_seed_eps(m: usize) -> f64 {
    2.0 / m as f64
}

/// Smallest core size from which P_f stays at or above `1 - eps` for every
/// larger core in the curve.
pub fn cooperative_seed_size(curve: &FixationCurve, eps: f64) -> Result<usize> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let level = 1.0 - eps;
    let start = curve
        .points
        .iter()
        .rposition(|p| p.pf < level)
        .map_or(0, |i| i + 1);
    curve
        .points
        .get(start)
        .map(|p| p.ni)
        .ok_or(Error::SeedNotFound(level))
}
