//! Single realizations: a posited cooperative core that then grows under an
//! influx of newcomers while strategies evolve.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};

use crate::error::{invalid, Result};
use crate::game::{GameParams, Population, Strategy};
use crate::growth::GrowthSchedule;
use crate::network::{GrowthMechanism, Network};
use crate::output::fmt_sig;
use crate::SimRng;

/// Default stationarity window, in generations.
pub const DEFAULT_WINDOW: usize = 50;
/// Largest half-window drift for a tail to count as stationary.
pub const STATIONARY_DRIFT: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimParams {
    pub r: f64,
    pub beta: f64,
    /// Growth fraction between consecutive generations.
    pub n: f64,
    /// Links per newcomer; the seed clique has the same size.
    pub links: usize,
    pub mechanism: GrowthMechanism,
    /// Probability that a newcomer of the measured phase cooperates.
    pub pc_growth: f64,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            r: 2.0,
            beta: 1.0,
            n: 0.001,
            links: 4,
            mechanism: GrowthMechanism::PreferentialAttachment,
            pc_growth: 0.0,
            seed: 1,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        self.game().validate()?;
        if !(self.n.is_finite() && self.n > 0.0) {
            return Err(invalid(format!("n must be > 0, got {}", self.n)));
        }
        if self.links == 0 {
            return Err(invalid("L must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.pc_growth) {
            return Err(invalid(format!(
                "pc_growth must lie in [0, 1], got {}",
                self.pc_growth
            )));
        }
        Ok(())
    }

    pub fn game(&self) -> GameParams {
        GameParams {
            r: self.r,
            beta: self.beta,
        }
    }

    pub fn with_r(self, r: f64) -> Self {
        SimParams { r, ..self }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SimParams { seed, ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Record {
    pub generation: u64,
    pub population: usize,
    pub coop_fraction: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// Generation 0 is the core before any update.
    pub records: Vec<Record>,
    /// Cooperation died out with no cooperator influx; the run stopped there
    /// and every later generation is implicitly 0.
    pub absorbed: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_fraction(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.coop_fraction)
    }

    pub fn final_population(&self) -> usize {
        self.records.last().map_or(0, |r| r.population)
    }

    /// CSV body: `generation,population,coop_fraction`, after the given
    /// `#` header lines.
    pub fn write_csv<W: Write>(&self, mut out: W, header: &[String]) -> io::Result<()> {
        for line in header {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "generation,population,coop_fraction")?;
        for rec in &self.records {
            writeln!(
                out,
                "{},{},{}",
                rec.generation,
                rec.population,
                fmt_sig(rec.coop_fraction)
            )?;
        }
        Ok(())
    }
}

/// Grows the seed clique to `ni` nodes without any strategy update and
/// makes every node a cooperator.
pub fn build_cooperative_core<R: Rng + ?Sized>(
    params: &SimParams,
    ni: usize,
    rng: &mut R,
) -> Result<(Network, Vec<Strategy>)> {
    if ni < params.links {
        return Err(invalid(format!(
            "initial core Ni = {ni} is smaller than the seed clique L = {}",
            params.links
        )));
    }
    let net = Network::grow(params.mechanism, params.links, ni, rng)?;
    Ok((net, vec![Strategy::Cooperate; ni]))
}

/// Runs one realization from a cooperative core of `ni` nodes until the
/// population reaches `nmax`. Each step first adds the newcomers due under
/// the growth schedule (never overshooting `nmax`), then applies one
/// synchronous generation.
pub fn run_realization(params: &SimParams, ni: usize, nmax: usize) -> Result<Trajectory> {
    params.validate()?;
    if nmax < ni {
        return Err(invalid(format!("Nmax = {nmax} is below Ni = {ni}")));
    }
    let mut rng = SimRng::seed_from_u64(params.seed);
    let (mut net, strategies) = build_cooperative_core(params, ni, &mut rng)?;
    let mut pop = Population::new(&net, strategies)?;
    let mut schedule = GrowthSchedule::new(params.n, ni)?;
    let game = params.game();

    let mut records = vec![Record {
        generation: 0,
        population: ni,
        coop_fraction: pop.cooperation_fraction(),
    }];
    let mut absorbed = false;
    let mut generation = 0;
    while net.node_count() < nmax {
        let due = schedule.nodes_before_next_update();
        let add = due.min(nmax - net.node_count());
        for _ in 0..add {
            let id = net.add_node(params.mechanism, params.links, &mut rng)?;
            let s = if params.pc_growth > 0.0 && rng.random::<f64>() < params.pc_growth {
                Strategy::Cooperate
            } else {
                Strategy::Defect
            };
            pop.push_node(&net, id, s);
        }
        pop.generation(&net, &game, &mut rng);
        generation += 1;
        records.push(Record {
            generation,
            population: net.node_count(),
            coop_fraction: pop.cooperation_fraction(),
        });
        if params.pc_growth == 0.0 && pop.cooperators() == 0 {
            absorbed = true;
            break;
        }
    }
    Ok(Trajectory { records, absorbed })
}

/// Mean cooperation over the final `window` generations and whether the
/// tail looks stationary (the means of its two halves differ by less than
/// [`STATIONARY_DRIFT`]). Absorbed trajectories give `(0, true)`.
pub fn stationary_mean(traj: &Trajectory, window: usize) -> Result<(f64, bool)> {
    if traj.absorbed {
        return Ok((0.0, true));
    }
    if window == 0 {
        return Err(invalid("stationarity window must be >= 1"));
    }
    if traj.len() < window {
        return Err(invalid(format!(
            "trajectory has {} records, window needs {window}",
            traj.len()
        )));
    }
    let tail: Vec<f64> = traj.records[traj.len() - window..]
        .iter()
        .map(|r| r.coop_fraction)
        .collect();
    let mean = tail.iter().sum::<f64>() / window as f64;
    if window < 2 {
        return Ok((mean, true));
    }
    let half = window / 2;
    let first = tail[..half].iter().sum::<f64>() / half as f64;
    let second = tail[half..].iter().sum::<f64>() / (window - half) as f64;
    Ok((mean, (first - second).abs() < STATIONARY_DRIFT))
}
