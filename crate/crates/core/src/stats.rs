//! Degree distributions and tail fits.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::network::Network;

/// Minimum number of tail samples for a power-law fit.
pub const MIN_TAIL_SAMPLES: usize = 100;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DegreeHistogram {
    /// `counts[k]` is the number of nodes of degree `k`.
    counts: Vec<usize>,
    total: usize,
}

impl DegreeHistogram {
    pub fn from_degrees<I: IntoIterator<Item = usize>>(degrees: I) -> Self {
        let mut h = DegreeHistogram::default();
        for k in degrees {
            if k >= h.counts.len() {
                h.counts.resize(k + 1, 0);
            }
            h.counts[k] += 1;
            h.total += 1;
        }
        h
    }

    pub fn from_network(net: &Network) -> Self {
        Self::from_degrees(net.degrees())
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn count(&self, k: usize) -> usize {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// Nonzero `(k, count)` pairs in increasing `k`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(k, &c)| (k, c))
    }

    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "k,count")?;
        for (k, c) in self.iter() {
            writeln!(out, "{k},{c}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub gamma: f64,
    pub std_error: f64,
    pub tail_samples: usize,
}

/// Discrete power-law exponent by maximum likelihood in the continuous
/// approximation: `gamma = 1 + m / sum(ln(k_i / (k_min - 1/2)))` over the `m`
/// samples with `k_i >= k_min`, standard error `(gamma - 1) / sqrt(m)`.
pub fn powerlaw_exponent(h: &DegreeHistogram, k_min: usize) -> Result<PowerLawFit> {
    if k_min == 0 {
        return Err(Error::InvalidParameter("k_min must be >= 1".into()));
    }
    let offset = k_min as f64 - 0.5;
    let (mut m, mut log_sum, mut distinct) = (0usize, 0.0f64, 0usize);
    for (k, c) in h.iter().filter(|&(k, _)| k >= k_min) {
        m += c;
        log_sum += c as f64 * (k as f64 / offset).ln();
        distinct += 1;
    }
    if m < MIN_TAIL_SAMPLES {
        return Err(Error::InsufficientTailSamples {
            found: m,
            needed: MIN_TAIL_SAMPLES,
            k_min,
        });
    }
    if distinct < 2 {
        return Err(Error::Degenerate(format!(
            "all {m} tail samples share a single degree"
        )));
    }
    let gamma = 1.0 + m as f64 / log_sum;
    Ok(PowerLawFit {
        gamma,
        std_error: (gamma - 1.0) / (m as f64).sqrt(),
        tail_samples: m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExpTailFit {
    /// Minus the slope of `ln S(k)` against `k`.
    pub decay_rate: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares line through `(k, ln S(k))` for every observed degree
/// `k >= k_min`, where `S(k)` is the fraction of nodes with degree `>= k`.
/// An exponentially decaying distribution gives a straight line.
pub fn exponential_tail_check(h: &DegreeHistogram, k_min: usize) -> Result<ExpTailFit> {
    if h.total() == 0 {
        return Err(Error::Degenerate("empty histogram".into()));
    }
    let n = h.total() as f64;
    let mut above: usize = h.iter().filter(|&(k, _)| k >= k_min).map(|(_, c)| c).sum();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, c) in h.iter().filter(|&(k, _)| k >= k_min) {
        xs.push(k as f64);
        ys.push((above as f64 / n).ln());
        above -= c;
    }
    if xs.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{} distinct degrees >= {k_min}; need at least 3",
            xs.len()
        )));
    }
    let (slope, r_squared) = linear_fit(&xs, &ys);
    Ok(ExpTailFit {
        decay_rate: -slope,
        r_squared,
        points: xs.len(),
    })
}

/// Ordinary least squares; returns `(slope, R^2)`.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, r2)
}
