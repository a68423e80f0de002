//! Prisoner's dilemma payoffs and synchronous Fermi imitation.
//!
//! The cost of cooperating is normalised to 1 and the benefit to `r`, so a
//! cooperator with `k` neighbours of which `kc` cooperate earns `r*kc - k`
//! and a defector earns `r*kc`.

use rand::Rng;

use crate::error::{invalid, Result};
use crate::network::{Network, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Cooperate,
    Defect,
}

impl Strategy {
    pub fn is_cooperator(self) -> bool {
        self == Strategy::Cooperate
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameParams {
    /// Benefit-cost ratio `b/c`.
    pub r: f64,
    /// Selection intensity, in units of the normalised payoff.
    pub beta: f64,
}

impl GameParams {
    pub fn new(r: f64, beta: f64) -> Result<Self> {
        let p = GameParams { r, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r > 1.0) {
            return Err(invalid(format!("r must be finite and > 1, got {}", self.r)));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(invalid(format!(
                "beta must be finite and >= 0, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    #[inline]
    fn payoff_from_counts(&self, s: Strategy, k: usize, kc: usize) -> f64 {
        match s {
            Strategy::Cooperate => self.r * kc as f64 - k as f64,
            Strategy::Defect => self.r * kc as f64,
        }
    }
}

/// Fermi imitation probability for payoff gap `P_j - P_i`.
#[inline]
pub fn fermi(beta: f64, payoff_gap: f64) -> f64 {
    let x = (-beta * payoff_gap).clamp(-700.0, 700.0);
    1.0 / (1.0 + x.exp())
}

/// Payoff of node `i` against all of its neighbours. Isolated nodes earn 0.
pub fn payoff(net: &Network, s: &[Strategy], p: &GameParams, i: NodeId) -> f64 {
    let nb = net.neighbors(i);
    let kc = nb.iter().filter(|&&j| s[j].is_cooperator()).count();
    p.payoff_from_counts(s[i], nb.len(), kc)
}

/// Fraction of cooperators; 0 for an empty vector.
pub fn cooperation_fraction(s: &[Strategy]) -> f64 {
    if s.is_empty() {
        return 0.0;
    }
    s.iter().filter(|x| x.is_cooperator()).count() as f64 / s.len() as f64
}

/// Decision of node `i` in one synchronous generation. Consumes one draw for
/// the neighbour choice and, only when the neighbour plays the other
/// strategy, one uniform for the Fermi coin. Returns the adopted strategy if
/// `i` switches.
#[inline]
fn imitation_step<R, F>(
    neighbors: &[NodeId],
    own: Strategy,
    strategy_of: impl Fn(NodeId) -> Strategy,
    payoff_gap: F,
    beta: f64,
    rng: &mut R,
) -> Option<Strategy>
where
    R: Rng + ?Sized,
    F: FnOnce(NodeId) -> f64,
{
    if neighbors.is_empty() {
        return None;
    }
    let j = neighbors[rng.random_range(0..neighbors.len())];
    let theirs = strategy_of(j);
    if theirs == own {
        return None;
    }
    let u: f64 = rng.random();
    (u < fermi(beta, payoff_gap(j))).then_some(theirs)
}

/// One synchronous generation computed from scratch: payoffs are evaluated
/// once on the input strategies, every node imitates a uniformly chosen
/// neighbour with the Fermi probability, and all decisions read the
/// pre-update strategies.
pub fn synchronous_generation<R: Rng + ?Sized>(
    net: &Network,
    s: &[Strategy],
    p: &GameParams,
    rng: &mut R,
) -> Vec<Strategy> {
    assert_eq!(
        s.len(),
        net.node_count(),
        "strategy vector length must equal node count"
    );
    let payoffs: Vec<f64> = (0..s.len()).map(|i| payoff(net, s, p, i)).collect();
    let mut next = s.to_vec();
    for i in 0..s.len() {
        let step = imitation_step(
            net.neighbors(i),
            s[i],
            |j| s[j],
            |j| payoffs[j] - payoffs[i],
            p.beta,
            rng,
        );
        if let Some(adopted) = step {
            next[i] = adopted;
        }
    }
    next
}

/// Strategy state with incrementally maintained cooperator-neighbour counts.
///
/// Produces exactly the same generations as [`synchronous_generation`] for
/// the same random stream, but payoffs cost O(1) per node and only nodes that
/// switch touch their neighbourhoods.
#[derive(Clone, Debug)]
pub struct Population {
    strategies: Vec<Strategy>,
    coop_neighbors: Vec<u32>,
    cooperators: usize,
    switches: Vec<(NodeId, Strategy)>,
}

impl Population {
    pub fn new(net: &Network, strategies: Vec<Strategy>) -> Result<Self> {
        if strategies.len() != net.node_count() {
            return Err(invalid(format!(
                "strategy vector has length {}, network has {} nodes",
                strategies.len(),
                net.node_count()
            )));
        }
        let coop_neighbors = (0..net.node_count())
            .map(|i| {
                net.neighbors(i)
                    .iter()
                    .filter(|&&j| strategies[j].is_cooperator())
                    .count() as u32
            })
            .collect();
        let cooperators = strategies.iter().filter(|s| s.is_cooperator()).count();
        Ok(Population {
            strategies,
            coop_neighbors,
            cooperators,
            switches: Vec::new(),
        })
    }

    pub fn strategies(&self) -> &[Strategy] {
        &self.strategies
    }

    pub fn into_strategies(self) -> Vec<Strategy> {
        self.strategies
    }

    pub fn len(&self) -> usize {
        self.strategies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strategies.is_empty()
    }

    pub fn cooperators(&self) -> usize {
        self.cooperators
    }

    pub fn cooperation_fraction(&self) -> f64 {
        if self.strategies.is_empty() {
            0.0
        } else {
            self.cooperators as f64 / self.strategies.len() as f64
        }
    }

    #[inline]
    pub fn payoff(&self, net: &Network, p: &GameParams, i: NodeId) -> f64 {
        p.payoff_from_counts(
            self.strategies[i],
            net.degree(i),
            self.coop_neighbors[i] as usize,
        )
    }

    /// Registers node `id`, which must be the newest node of `net` with all
    /// of its links already in place.
    pub fn push_node(&mut self, net: &Network, id: NodeId, strategy: Strategy) {
        assert_eq!(
            id,
            self.strategies.len(),
            "nodes must be registered in order"
        );
        let mut kc = 0;
        for &j in net.neighbors(id) {
            if self.strategies[j].is_cooperator() {
                kc += 1;
            }
            if strategy.is_cooperator() {
                self.coop_neighbors[j] += 1;
            }
        }
        self.strategies.push(strategy);
        self.coop_neighbors.push(kc);
        if strategy.is_cooperator() {
            self.cooperators += 1;
        }
    }

    /// Applies one synchronous generation in place. Returns the number of
    /// nodes that switched strategy.
    pub fn generation<R: Rng + ?Sized>(
        &mut self,
        net: &Network,
        p: &GameParams,
        rng: &mut R,
    ) -> usize {
        debug_assert_eq!(self.strategies.len(), net.node_count());
        let mut switches = std::mem::take(&mut self.switches);
        switches.clear();
        for i in 0..self.strategies.len() {
            let own = self.strategies[i];
            let step = imitation_step(
                net.neighbors(i),
                own,
                |j| self.strategies[j],
                |j| self.payoff(net, p, j) - self.payoff(net, p, i),
                p.beta,
                rng,
            );
            if let Some(adopted) = step {
                switches.push((i, adopted));
            }
        }
        for &(i, adopted) in &switches {
            self.strategies[i] = adopted;
            if adopted.is_cooperator() {
                self.cooperators += 1;
                for &j in net.neighbors(i) {
                    self.coop_neighbors[j] += 1;
                }
            } else {
                self.cooperators -= 1;
                for &j in net.neighbors(i) {
                    self.coop_neighbors[j] -= 1;
                }
            }
        }
        let n = switches.len();
        self.switches = switches;
        n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::GrowthMechanism;
    use crate::SimRng;
    use rand::SeedableRng;
    use Strategy::{Cooperate as C, Defect as D};

    fn params(r: f64, beta: f64) -> GameParams {
        GameParams::new(r, beta).unwrap()
    }

    #[test]
    fn payoff_examples() {
        // Centre node 0 with four neighbours.
        let net = Network::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let p = params(2.0, 1.0);
        assert_eq!(payoff(&net, &[C, C, C, D, D], &p, 0), 0.0);
        assert_eq!(payoff(&net, &[D, C, C, C, D], &p, 0), 6.0);
        assert_eq!(payoff(&net, &[D, D, D, D, D], &p, 0), 0.0);
        assert_eq!(payoff(&net, &[C, D, D, D, D], &p, 0), -4.0);
        let lonely = Network::new_seed(1).unwrap();
        assert_eq!(payoff(&lonely, &[C], &p, 0), 0.0);
    }

    #[test]
    fn fermi_examples() {
        assert_eq!(fermi(0.0, 123.0), 0.5);
        assert_eq!(fermi(3.0, 0.0), 0.5);
        assert!((fermi(1.0, 3f64.ln()) - 0.75).abs() < 1e-12);
        assert_eq!(fermi(1e6, 1e6), 1.0);
        assert_eq!(fermi(1e6, -1e6), 1.0 / (1.0 + 700f64.exp()));
        assert!(fermi(1e6, -1e6) > 0.0);
    }

    #[test]
    fn invalid_game_params() {
        assert!(GameParams::new(1.0, 1.0).is_err());
        assert!(GameParams::new(0.5, 1.0).is_err());
        assert!(GameParams::new(2.0, -0.1).is_err());
        assert!(GameParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn uniform_states_are_fixed_points() {
        let mut rng = SimRng::seed_from_u64(11);
        let net = Network::grow(GrowthMechanism::PreferentialAttachment, 3, 200, &mut rng).unwrap();
        for s in [C, D] {
            let v = vec![s; 200];
            for beta in [0.0, 1.0, 100.0] {
                let out = synchronous_generation(&net, &v, &params(5.0, beta), &mut rng);
                assert_eq!(out, v);
            }
        }
    }

    #[test]
    fn isolated_nodes_keep_their_strategy() {
        let net = Network::from_edges(3, &[(0, 1)]).unwrap();
        let mut rng = SimRng::seed_from_u64(1);
        for _ in 0..200 {
            let out = synchronous_generation(&net, &[C, C, D], &params(2.0, 1.0), &mut rng);
            assert_eq!(out[2], D);
        }
    }

    #[test]
    fn neutral_selection_flips_with_half_the_opposite_fraction() {
        // Node 0 has neighbours C, D, D and plays C: flip probability 2/3 * 1/2.
        let net = Network::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let s = [C, C, D, D];
        let mut rng = SimRng::seed_from_u64(2);
        let trials = 100_000;
        let flips = (0..trials)
            .filter(|_| synchronous_generation(&net, &s, &params(3.0, 0.0), &mut rng)[0] == D)
            .count();
        let p = 1.0 / 3.0;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((flips as f64 / trials as f64 - p).abs() < 3.0 * se);
    }

    #[test]
    fn population_matches_reference_generation() {
        let mut rng = SimRng::seed_from_u64(5);
        let mut net =
            Network::grow(GrowthMechanism::PreferentialAttachment, 4, 300, &mut rng).unwrap();
        let init: Vec<Strategy> = (0..300)
            .map(|_| if rng.random_bool(0.6) { C } else { D })
            .collect();
        let p = params(2.5, 1.0);
        let mut pop = Population::new(&net, init.clone()).unwrap();
        let mut reference = init;
        let mut a = SimRng::seed_from_u64(77);
        let mut b = SimRng::seed_from_u64(77);
        for g in 0..100 {
            if g % 3 == 0 {
                let id = net.add_node_random(4, &mut rng).unwrap();
                let s = if g % 2 == 0 { D } else { C };
                pop.push_node(&net, id, s);
                reference.push(s);
            }
            reference = synchronous_generation(&net, &reference, &p, &mut a);
            pop.generation(&net, &p, &mut b);
            assert_eq!(pop.strategies(), &reference[..]);
            assert_eq!(pop.cooperation_fraction(), cooperation_fraction(&reference));
            for i in 0..net.node_count() {
                assert_eq!(pop.payoff(&net, &p, i), payoff(&net, &reference, &p, i));
            }
        }
    }

    #[test]
    fn cooperation_fraction_examples() {
        assert_eq!(cooperation_fraction(&[C, C]), 1.0);
        assert_eq!(cooperation_fraction(&[D, D, D]), 0.0);
        assert_eq!(cooperation_fraction(&[C, C, D, C]), 0.75);
    }
}
