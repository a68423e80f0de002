//! Exponential growth discretised into whole nodes per generation.
//!
//! The ideal population after `g` updates is `N0 * (1 + n)^g`. The integer
//! population is its floor, so fractional growth accumulates until it adds
//! up to a whole node.

use crate::error::{invalid, Result};

/// Ideal sizes within this relative distance below an integer count as
/// reaching it, absorbing the rounding of `(1 + n)^g`.
const INTEGER_SNAP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthSchedule {
    n: f64,
    log_factor: f64,
    initial: f64,
    steps: u64,
    population: usize,
}

impl GrowthSchedule {
    pub fn new(n: f64, initial_population: usize) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return Err(invalid(format!("growth fraction n must be > 0, got {n}")));
        }
        Ok(GrowthSchedule {
            n,
            log_factor: n.ln_1p(),
            initial: initial_population as f64,
            steps: 0,
            population: initial_population,
        })
    }

    pub fn growth_fraction(&self) -> f64 {
        self.n
    }

    /// `a * dt = ln(1 + n)`, the continuous-time rate per generation.
    pub fn rate_per_generation(&self) -> f64 {
        self.log_factor
    }

    /// Real-valued population tracked by the schedule.
    pub fn ideal_size(&self) -> f64 {
        self.initial * (self.steps as f64 * self.log_factor).exp()
    }

    pub fn population(&self) -> usize {
        self.population
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// Advances the ideal population by one factor `(1 + n)` and returns how
    /// many whole nodes must be added before the next update (possibly 0).
    pub fn nodes_before_next_update(&mut self) -> usize {
        self.steps += 1;
        let ideal = self.ideal_size();
        let target = (ideal * (1.0 + INTEGER_SNAP)).floor() as usize;
        let add = target.saturating_sub(self.population);
        self.population += add;
        add
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracker_examples() {
        let mut s = GrowthSchedule::new(0.001, 1000).unwrap();
        assert_eq!(s.nodes_before_next_update(), 1);
        assert!((s.ideal_size() - 1001.0).abs() < 1e-9);

        let mut s = GrowthSchedule::new(0.001, 100).unwrap();
        assert_eq!(s.nodes_before_next_update(), 0);
        assert!((s.ideal_size() - 100.1).abs() < 1e-9);
        assert_eq!(s.population(), 100);

        let mut s = GrowthSchedule::new(0.5, 4).unwrap();
        assert_eq!(s.nodes_before_next_update(), 2);
        assert_eq!(s.ideal_size(), 6.0);
    }

    #[test]
    fn remainder_is_carried() {
        // 100 * 1.001^g first reaches 101 at g = 10.
        let mut s = GrowthSchedule::new(0.001, 100).unwrap();
        let added: Vec<usize> = (0..10).map(|_| s.nodes_before_next_update()).collect();
        assert_eq!(&added[..9], &[0; 9]);
        assert_eq!(added[9], 1);
    }

    #[test]
    fn nonpositive_growth_is_rejected() {
        assert!(GrowthSchedule::new(0.0, 10).is_err());
        assert!(GrowthSchedule::new(-0.1, 10).is_err());
        assert!(GrowthSchedule::new(f64::NAN, 10).is_err());
    }

    #[test]
    fn long_run_ratio_matches_exponential() {
        let n = 0.001;
        let mut s = GrowthSchedule::new(n, 1000).unwrap();
        let start = s.ideal_size();
        for _ in 0..1000 {
            s.nodes_before_next_update();
        }
        let ratio = s.ideal_size() / start;
        let expected = (1.0 + n).powi(1000);
        assert!(((ratio - expected) / expected).abs() < 1e-6);
    }
}
