//! Batch front-end behind the `coopgrow` binary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;

use crate::config::{parse_config_file, RawConfig, RunConfig, DEFAULT_RUN_R};
use crate::error::{Error, Result};
use crate::experiments::{
    cooperative_seed_size, default_seed_eps, estimate_rc, fixation_probability, transition_curve,
    RcEstimate, TransitionCurve,
};
use crate::network::Network;
use crate::output::{fmt_sig, PlotScript};
use crate::simulation::run_realization;
use crate::stats::{exponential_tail_check, powerlaw_exponent, DegreeHistogram};
use crate::SimRng;

#[derive(Debug, Parser)]
#[command(name = "coopgrow", version, about = "Cooperation on growing networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mean stationary cooperation over a grid of benefit-cost ratios.
    Transition(Flags),
    /// Fixation probability of cooperation versus initial core size.
    Fixation(Flags),
    /// Grow a network and write its edge list and degree histogram.
    Netgen(Flags),
    /// One realization; writes the cooperation trajectory.
    Run(Flags),
}

/// Every flag mirrors a config key and overrides the config file.
#[derive(Debug, Args, Default)]
pub struct Flags {
    /// Config file (`key=value` lines, or any coopgrow output file).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Attachment mechanism: `ba` (preferential) or `random`.
    #[arg(long)]
    pub mechanism: Option<String>,
    /// Links per newcomer; also the size of the seed clique.
    #[arg(long = "L")]
    pub links: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    /// Growth fraction between generations.
    #[arg(long)]
    pub n: Option<String>,
    /// Benefit-cost ratio (`run`, `fixation`).
    #[arg(long)]
    pub r: Option<String>,
    /// Probability that newcomers cooperate (`run` only).
    #[arg(long)]
    pub pc_growth: Option<String>,
    #[arg(long)]
    pub r_min: Option<String>,
    #[arg(long)]
    pub r_max: Option<String>,
    #[arg(long)]
    pub r_steps: Option<String>,
    /// Explicit comma-separated r grid, overriding the range.
    #[arg(long)]
    pub r_grid: Option<String>,
    /// Initial cooperative core size.
    #[arg(long)]
    pub ni: Option<String>,
    #[arg(long)]
    pub nmax: Option<String>,
    #[arg(long)]
    pub realizations: Option<String>,
    /// Trials per core size (`fixation`).
    #[arg(long = "M")]
    pub m: Option<String>,
    /// Comma-separated core sizes (`fixation`).
    #[arg(long)]
    pub ni_list: Option<String>,
    #[arg(long)]
    pub n_target: Option<String>,
    /// Network size (`netgen`).
    #[arg(long)]
    pub nodes: Option<String>,
    /// Stationarity window in generations.
    #[arg(long)]
    pub window: Option<String>,
    #[arg(long)]
    pub threshold: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads; defaults to $COOPGROW_WORKERS or all cores.
    #[arg(long)]
    pub workers: Option<String>,
    #[arg(long)]
    pub out_dir: Option<String>,
}

impl Flags {
    fn overrides(&self) -> RawConfig {
        let pairs = [
            ("mechanism", &self.mechanism),
            ("L", &self.links),
            ("beta", &self.beta),
            ("n", &self.n),
            ("r", &self.r),
            ("pc_growth", &self.pc_growth),
            ("r_min", &self.r_min),
            ("r_max", &self.r_max),
            ("r_steps", &self.r_steps),
            ("r_grid", &self.r_grid),
            ("ni", &self.ni),
            ("nmax", &self.nmax),
            ("realizations", &self.realizations),
            ("M", &self.m),
            ("ni_list", &self.ni_list),
            ("n_target", &self.n_target),
            ("nodes", &self.nodes),
            ("window", &self.window),
            ("threshold", &self.threshold),
            ("seed", &self.seed),
            ("workers", &self.workers),
            ("out_dir", &self.out_dir),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    /// Defaults, then the config file, then these flags.
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(path) => parse_config_file(path)?,
            None => RawConfig::new(),
        };
        RunConfig::resolve(&file, &self.overrides())
    }
}

type CommandFn = fn(&RunConfig) -> Result<Vec<PathBuf>>;

/// Resolves the config and executes the subcommand. Returns the files written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    let (flags, run): (&Flags, CommandFn) = match &cli.command {
        Command::Transition(f) => (f, cmd_transition),
        Command::Fixation(f) => (f, cmd_fixation),
        Command::Netgen(f) => (f, cmd_netgen),
        Command::Run(f) => (f, cmd_run),
    };
    let cfg = flags.resolve()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config {
            key: "workers".into(),
            message: e.to_string(),
        })?;
    pool.install(|| run(&cfg))
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let file = File::create(&path)?;
    Ok((path, BufWriter::new(file)))
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let (path, mut w) = create(dir, name)?;
    w.write_all(text.as_bytes())?;
    w.flush()?;
    Ok(path)
}

fn series(csv: &str, columns: &str, style: &str) -> String {
    format!("'{csv}' using {columns} with {style}")
}

/// `run`: one realization and its cooperation trajectory.
pub fn cmd_run(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let r = cfg.r.unwrap_or(DEFAULT_RUN_R);
    let cfg = RunConfig {
        r: Some(r),
        ..cfg.clone()
    };
    let traj = run_realization(&cfg.sim_params(r), cfg.ni, cfg.nmax)?;

    let mut header = cfg.header_lines("run");
    header.push(format!(
        "result generations={} final_population={} final_coop={} absorbed={}",
        traj.len() - 1,
        traj.final_population(),
        fmt_sig(traj.final_fraction()),
        traj.absorbed
    ));
    let (csv, mut w) = create(&cfg.out_dir, "trajectory.csv")?;
    traj.write_csv(&mut w, &header)?;
    w.flush()?;
    let plot = PlotScript {
        title: format!("cooperation, r={r}"),
        xlabel: "generation".into(),
        ylabel: "<c>".into(),
        logx: false,
        logy: false,
        png: "trajectory.png".into(),
        plots: vec![series("trajectory.csv", "1:3", "lines")],
    };
    let gp = write_text(&cfg.out_dir, "trajectory.gp", &plot.render())?;
    println!(
        "run: r={r} generations={} final N={} final <c>={} absorbed={}",
        traj.len() - 1,
        traj.final_population(),
        fmt_sig(traj.final_fraction()),
        traj.absorbed
    );
    Ok(vec![csv, gp])
}

fn rc_result(curve: &TransitionCurve, threshold: f64) -> (Option<RcEstimate>, String) {
    match estimate_rc(curve, threshold) {
        Ok(est) => (
            Some(est),
            format!(
                "result rc_lo={} rc_hi={} rc_mid={}",
                fmt_sig(est.lo),
                fmt_sig(est.hi),
                fmt_sig(est.midpoint())
            ),
        ),
        Err(_) => (None, "result rc=none".to_string()),
    }
}

/// `transition`: the cooperation curve over the r grid and its r_c bracket.
pub fn cmd_transition(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let grid = cfg.r_grid()?;
    let base = cfg.sim_params(grid[0]);
    let curve = transition_curve(&base, &grid, cfg.ni, cfg.nmax, cfg.realizations, cfg.window)?;
    let (est, result) = rc_result(&curve, cfg.threshold);

    let mut header = cfg.header_lines("transition");
    header.push(result);
    let (csv, mut w) = create(&cfg.out_dir, "transition.csv")?;
    curve.write_csv(&mut w, &header)?;
    w.flush()?;
    let plot = PlotScript {
        title: format!(
            "cooperation transition ({}, beta={})",
            cfg.mechanism, cfg.beta
        ),
        xlabel: "r = b/c".into(),
        ylabel: "<c>".into(),
        logx: false,
        logy: false,
        png: "transition.png".into(),
        plots: vec![series("transition.csv", "1:2:3", "yerrorlines")],
    };
    let gp = write_text(&cfg.out_dir, "transition.gp", &plot.render())?;
    for p in &curve.points {
        println!(
            "r={} <c>={} stderr={} nonstationary={}",
            fmt_sig(p.r),
            fmt_sig(p.mean),
            fmt_sig(p.stderr),
            fmt_sig(p.nonstationary_frac)
        );
    }
    match est {
        Some(e) => println!("r_c in [{}, {}]", fmt_sig(e.lo), fmt_sig(e.hi)),
        None => println!("no transition within the r grid"),
    }
    Ok(vec![csv, gp])
}

/// `fixation`: P_f versus Ni and the cooperative seed size. Without an
/// explicit `r`, a transition curve over the r grid locates r_c first and
/// the run uses the bracket midpoint plus one bracket width.
pub fn cmd_fixation(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let r = match cfg.r {
        Some(r) => r,
        None => {
            let grid = cfg.r_grid()?;
            let base = cfg.sim_params(grid[0]);
            let curve =
                transition_curve(&base, &grid, cfg.ni, cfg.nmax, cfg.realizations, cfg.window)?;
            let est = estimate_rc(&curve, cfg.threshold)?;
            let r = est.just_above();
            println!(
                "r_c in [{}, {}]; using r = {}",
                fmt_sig(est.lo),
                fmt_sig(est.hi),
                r
            );
            r
        }
    };
    let cfg = RunConfig {
        r: Some(r),
        pc_growth: 0.0,
        ..cfg.clone()
    };
    let curve = fixation_probability(&cfg.sim_params(r), r, &cfg.ni_list, cfg.m, cfg.n_target)?;
    let eps = default_seed_eps(cfg.m);
    let seed_size = cooperative_seed_size(&curve, eps);

    let mut header = cfg.header_lines("fixation");
    header.push(match &seed_size {
        Ok(nc) => format!("result n_c={nc} eps={}", fmt_sig(eps)),
        Err(_) => format!("result n_c=none eps={}", fmt_sig(eps)),
    });
    let (csv, mut w) = create(&cfg.out_dir, "fixation.csv")?;
    curve.write_csv(&mut w, &header)?;
    w.flush()?;
    let plot = PlotScript {
        title: format!("cooperation fixation probability, r={r}"),
        xlabel: "N_i".into(),
        ylabel: "P_f".into(),
        logx: false,
        logy: false,
        png: "fixation.png".into(),
        plots: vec![series("fixation.csv", "1:4:5:6", "yerrorlines")],
    };
    let gp = write_text(&cfg.out_dir, "fixation.gp", &plot.render())?;
    for p in &curve.points {
        println!(
            "Ni={} Mc={}/{} P_f={} [{}, {}]",
            p.ni,
            p.mc,
            p.m,
            fmt_sig(p.pf),
            fmt_sig(p.wilson_lo),
            fmt_sig(p.wilson_hi)
        );
    }
    match seed_size {
        Ok(nc) => println!("cooperative seed N_c = {nc}"),
        Err(e) => println!("{e}"),
    }
    Ok(vec![csv, gp])
}

/// `netgen`: grows a network, writes its edge list and degree histogram.
pub fn cmd_netgen(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let mut rng = SimRng::seed_from_u64(cfg.seed);
    let net = Network::grow(cfg.mechanism, cfg.links, cfg.nodes, &mut rng)?;
    let (edges, mut w) = create(&cfg.out_dir, "edges.txt")?;
    net.write_edge_list(&mut w, cfg.mechanism, cfg.links, cfg.seed)?;
    w.flush()?;

    let hist = DegreeHistogram::from_network(&net);
    let k_min = 2 * cfg.links;
    let mut header = vec![
        format!(
            "coopgrow command=netgen version={}",
            env!("CARGO_PKG_VERSION")
        ),
        format!(
            "nodes={} mechanism={} L={} seed={}",
            cfg.nodes, cfg.mechanism, cfg.links, cfg.seed
        ),
        format!("meta seed_network=clique N0={}", cfg.links),
    ];
    let mut summary = format!("result mean_degree={}", fmt_sig(net.mean_degree()));
    if let Ok(fit) = powerlaw_exponent(&hist, k_min) {
        summary += &format!(
            " gamma={} gamma_se={} k_min={k_min}",
            fmt_sig(fit.gamma),
            fmt_sig(fit.std_error)
        );
    }
    if let Ok(fit) = exponential_tail_check(&hist, k_min) {
        summary += &format!(
            " exp_decay={} exp_r2={}",
            fmt_sig(fit.decay_rate),
            fmt_sig(fit.r_squared)
        );
    }
    header.push(summary.clone());
    let (csv, mut w) = create(&cfg.out_dir, "degree_histogram.csv")?;
    hist.write_csv(&mut w, &header)?;
    w.flush()?;
    let plot = PlotScript {
        title: format!("degree distribution ({}, L={})", cfg.mechanism, cfg.links),
        xlabel: "k".into(),
        ylabel: "count".into(),
        logx: true,
        logy: true,
        png: "degree.png".into(),
        plots: vec![series("degree_histogram.csv", "1:2", "points")],
    };
    let gp = write_text(&cfg.out_dir, "degree.gp", &plot.render())?;
    println!(
        "netgen: {} nodes, {} edges; {}",
        net.node_count(),
        net.edge_count(),
        summary.trim_start_matches("result ")
    );
    Ok(vec![edges, csv, gp])
}
