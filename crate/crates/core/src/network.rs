//! Growing undirected simple graphs.
//!
//! Nodes are dense indices assigned in insertion order and are never removed.
//! Besides per-node adjacency lists the network keeps a flat list of edge
//! endpoints, in which node `i` appears exactly `k_i` times; a uniform draw
//! from that list is a degree-proportional draw over nodes.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Dense node index, `0..N` in growth order.
pub type NodeId = usize;

/// How a newcomer chooses the targets of its links.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GrowthMechanism {
    /// Targets drawn with probability proportional to their degree.
    PreferentialAttachment,
    /// Targets drawn uniformly among existing nodes.
    RandomAttachment,
}

impl GrowthMechanism {
    /// Short name used in config files and output headers.
    pub fn name(self) -> &'static str {
        match self {
            GrowthMechanism::PreferentialAttachment => "ba",
            GrowthMechanism::RandomAttachment => "random",
        }
    }
}

impl fmt::Display for GrowthMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GrowthMechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ba" | "preferential" | "pa" | "scale-free" | "sf" => {
                Ok(GrowthMechanism::PreferentialAttachment)
            }
            "random" | "ra" | "uniform" => Ok(GrowthMechanism::RandomAttachment),
            other => Err(invalid(format!(
                "unknown mechanism `{other}` (expected `ba` or `random`)"
            ))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Network {
    adjacency: Vec<Vec<NodeId>>,
    /// Every edge contributes both of its endpoints.
    endpoints: Vec<NodeId>,
    /// Insertion-ordered edges, stored as (older, newer).
    edges: Vec<(NodeId, NodeId)>,
}

impl Network {
    /// Empty network with no nodes.
    pub fn new() -> Self {
        Self::default()
    }

    /// Complete graph on `n0` nodes. `n0 = 1` gives a single isolated node.
    pub fn new_seed(n0: usize) -> Result<Self> {
        if n0 == 0 {
            return Err(invalid("seed network needs N0 >= 1"));
        }
        let mut net = Network {
            adjacency: vec![Vec::with_capacity(n0 - 1); n0],
            endpoints: Vec::with_capacity(n0 * (n0 - 1)),
            edges: Vec::with_capacity(n0 * (n0 - 1) / 2),
        };
        for j in 1..n0 {
            for i in 0..j {
                net.link(i, j);
            }
        }
        Ok(net)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Sum of all degrees, always `2 * edge_count()`.
    pub fn degree_sum(&self) -> usize {
        self.endpoints.len()
    }

    pub fn degree(&self, i: NodeId) -> usize {
        self.adjacency[i].len()
    }

    /// Neighbours of `i` in the order their links were created.
    pub fn neighbors(&self, i: NodeId) -> &[NodeId] {
        &self.adjacency[i]
    }

    /// Edges in insertion order, each as `(i, j)` with `i < j`.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.adjacency.iter().map(Vec::len)
    }

    pub fn mean_degree(&self) -> f64 {
        if self.adjacency.is_empty() {
            0.0
        } else {
            self.degree_sum() as f64 / self.node_count() as f64
        }
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        let (a, b) = if self.degree(i) <= self.degree(j) {
            (i, j)
        } else {
            (j, i)
        };
        self.adjacency[a].contains(&b)
    }

    /// Builds a network from an explicit edge list. Rejects self-loops,
    /// duplicates and out-of-range endpoints.
    pub fn from_edges(nodes: usize, edges: &[(NodeId, NodeId)]) -> Result<Self> {
        let mut net = Network {
            adjacency: vec![Vec::new(); nodes],
            ..Default::default()
        };
        for &(a, b) in edges {
            if a >= nodes || b >= nodes {
                return Err(invalid(format!(
                    "edge ({a}, {b}) out of range for {nodes} nodes"
                )));
            }
            if a == b {
                return Err(invalid(format!("self-loop on node {a}")));
            }
            if net.has_edge(a, b) {
                return Err(invalid(format!("duplicate edge ({a}, {b})")));
            }
            net.link(a.min(b), a.max(b));
        }
        Ok(net)
    }

    fn link(&mut self, i: NodeId, j: NodeId) {
        debug_assert!(i < j);
        self.adjacency[i].push(j);
        self.adjacency[j].push(i);
        self.endpoints.push(i);
        self.endpoints.push(j);
        self.edges.push((i, j));
    }

    fn push_node(&mut self, targets: &[NodeId]) -> NodeId {
        let id = self.adjacency.len();
        self.adjacency.push(Vec::with_capacity(targets.len()));
        for &t in targets {
            self.link(t, id);
        }
        id
    }

    fn check_links(&self, links: usize) -> Result<()> {
        if links == 0 {
            return Err(invalid("L must be >= 1"));
        }
        if links > self.node_count() {
            return Err(invalid(format!(
                "L = {links} exceeds the current node count {}",
                self.node_count()
            )));
        }
        Ok(())
    }

    /// Adds a node with `links` edges to distinct existing nodes chosen with
    /// probability proportional to degree. Draws are sequential; a target
    /// already chosen for this newcomer is redrawn, which renormalises the
    /// weights over the remaining nodes.
    pub fn add_node_preferential<R: Rng + ?Sized>(
        &mut self,
        links: usize,
        rng: &mut R,
    ) -> Result<NodeId> {
        self.check_links(links)?;
        let n = self.node_count();
        if links == n {
            let all: Vec<NodeId> = (0..n).collect();
            return Ok(self.push_node(&all));
        }
        let mut targets: Vec<NodeId> = Vec::with_capacity(links);
        let mut remaining_weight = self.degree_sum();
        while targets.len() < links {
            if remaining_weight == 0 {
                return Err(invalid(
                    "preferential attachment needs remaining nodes with nonzero degree",
                ));
            }
            let t = self.endpoints[rng.random_range(0..self.endpoints.len())];
            if !targets.contains(&t) {
                remaining_weight -= self.degree(t);
                targets.push(t);
            }
        }
        Ok(self.push_node(&targets))
    }

    /// Adds a node with `links` edges to distinct existing nodes chosen
    /// uniformly without replacement.
    pub fn add_node_random<R: Rng + ?Sized>(
        &mut self,
        links: usize,
        rng: &mut R,
    ) -> Result<NodeId> {
        self.check_links(links)?;
        let n = self.node_count();
        let targets: Vec<NodeId> = if links == n {
            (0..n).collect()
        } else {
            index::sample(rng, n, links).into_vec()
        };
        Ok(self.push_node(&targets))
    }

    pub fn add_node<R: Rng + ?Sized>(
        &mut self,
        mechanism: GrowthMechanism,
        links: usize,
        rng: &mut R,
    ) -> Result<NodeId> {
        match mechanism {
            GrowthMechanism::PreferentialAttachment => self.add_node_preferential(links, rng),
            GrowthMechanism::RandomAttachment => self.add_node_random(links, rng),
        }
    }

    /// Grows a clique of `links` nodes up to `size` nodes.
    pub fn grow<R: Rng + ?Sized>(
        mechanism: GrowthMechanism,
        links: usize,
        size: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if size < links {
            return Err(invalid(format!(
                "target size {size} is below the seed size L = {links}"
            )));
        }
        let mut net = Network::new_seed(links)?;
        net.adjacency.reserve(size - links);
        while net.node_count() < size {
            net.add_node(mechanism, links, rng)?;
        }
        Ok(net)
    }

    /// Writes the edge list: a header line, then one `i j` pair per line with
    /// `i < j`, in insertion order.
    pub fn write_edge_list<W: Write>(
        &self,
        mut out: W,
        mechanism: GrowthMechanism,
        links: usize,
        seed: u64,
    ) -> io::Result<()> {
        writeln!(
            out,
            "# nodes={} edges={} mechanism={} L={} seed={}",
            self.node_count(),
            self.edge_count(),
            mechanism.name(),
            links,
            seed
        )?;
        writeln!(out, "# seed_network=clique N0={links}")?;
        for &(i, j) in &self.edges {
            writeln!(out, "{i} {j}")?;
        }
        Ok(())
    }
}
