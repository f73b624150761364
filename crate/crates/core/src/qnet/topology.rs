use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Node id of the star's control node; QPUs are `1..=Γ`.
pub const CONTROL: usize = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Star,
    Chain,
    Custom,
}

/// JSON form: `{"kind": "star"|"chain"|"custom", "gamma": int, "edges": [[a,b],...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologySpec {
    pub kind: TopologyKind,
    pub gamma: usize,
    #[serde(default)]
    pub edges: Vec<[usize; 2]>,
    #[serde(default)]
    pub source: Option<usize>,
}

/// Undirected network of QPUs, optionally with a control node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTopology {
    kind: TopologyKind,
    gamma: usize,
    nodes: Vec<usize>,
    channels: Vec<(usize, usize)>,
    source: usize,
}

fn norm_edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl NetworkTopology {
    pub fn star(gamma: usize) -> Self {
        Self {
            kind: TopologyKind::Star,
            gamma,
            nodes: (0..=gamma).collect(),
            channels: (1..=gamma).map(|g| (CONTROL, g)).collect(),
            source: CONTROL,
        }
    }

    /// Path `1 – 2 – … – Γ`, sourced at node 1.
    pub fn chain(gamma: usize) -> Self {
        Self {
            kind: TopologyKind::Chain,
            gamma,
            nodes: (1..=gamma).collect(),
            channels: (1..gamma).map(|g| (g, g + 1)).collect(),
            source: 1,
        }
    }

    pub fn custom(gamma: usize, edges: &[[usize; 2]], source: Option<usize>) -> Result<Self> {
        let mut nodes: BTreeSet<usize> = (1..=gamma).collect();
        let mut channels = BTreeSet::new();
        for &[a, b] in edges {
            if a == b {
                return Err(Error::Topology(format!("self loop on node {a}")));
            }
            if a > gamma || b > gamma {
                return Err(Error::Topology(format!("edge ({a},{b}) names a node beyond Γ={gamma}")));
            }
            nodes.insert(a);
            nodes.insert(b);
            channels.insert(norm_edge(a, b));
        }
        let nodes: Vec<usize> = nodes.into_iter().collect();
        let source = source.unwrap_or(nodes[0]);
        if !nodes.contains(&source) {
            return Err(Error::Topology(format!("source {source} is not a node")));
        }
        let t = Self {
            kind: TopologyKind::Custom,
            gamma,
            nodes,
            channels: channels.into_iter().collect(),
            source,
        };
        t.check_connected()?;
        Ok(t)
    }

    pub fn from_spec(spec: &TopologySpec) -> Result<Self> {
        if spec.gamma == 0 {
            return Err(Error::Topology("gamma must be at least 1".into()));
        }
        let mut t = match spec.kind {
            TopologyKind::Star => Self::star(spec.gamma),
            TopologyKind::Chain => Self::chain(spec.gamma),
            TopologyKind::Custom => return Self::custom(spec.gamma, &spec.edges, spec.source),
        };
        if let Some(s) = spec.source {
            if !t.nodes.contains(&s) {
                return Err(Error::Topology(format!("source {s} is not a node")));
            }
            t.source = s;
        }
        Ok(t)
    }

    fn check_connected(&self) -> Result<()> {
        let reached = self.bfs_parents(self.source);
        if let Some(n) = self.nodes.iter().find(|n| !reached.iter().any(|(m, _)| m == *n)) {
            return Err(Error::Topology(format!("node {n} is disconnected")));
        }
        Ok(())
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn channels(&self) -> &[(usize, usize)] {
        &self.channels
    }

    pub fn has_control(&self) -> bool {
        self.nodes.contains(&CONTROL)
    }

    /// Node that prepares shared ancilla states and hosts shuttled ancillas.
    pub fn hub(&self) -> usize {
        self.source
    }

    pub fn has_channel(&self, a: usize, b: usize) -> bool {
        self.channels.binary_search(&norm_edge(a, b)).is_ok()
    }

    pub fn neighbors(&self, a: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .channels
            .iter()
            .filter_map(|&(x, y)| {
                if x == a {
                    Some(y)
                } else if y == a {
                    Some(x)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// BFS discovery order from `root` as `(node, parent)` pairs.
    pub fn bfs_parents(&self, root: usize) -> Vec<(usize, Option<usize>)> {
        let mut seen = BTreeSet::from([root]);
        let mut order = vec![(root, None)];
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for b in self.neighbors(a) {
                if seen.insert(b) {
                    order.push((b, Some(a)));
                    queue.push_back(b);
                }
            }
        }
        order
    }

    /// Shortest path `from → to`, inclusive, with lowest-id tie breaking.
    pub fn path(&self, from: usize, to: usize) -> Result<Vec<usize>> {
        if !self.nodes.contains(&from) || !self.nodes.contains(&to) {
            return Err(Error::Topology(format!("no node {from} or {to}")));
        }
        let parents = self.bfs_parents(from);
        let parent_of = |n: usize| parents.iter().find(|(m, _)| *m == n).map(|(_, p)| *p);
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            match parent_of(cur) {
                Some(Some(p)) => {
                    path.push(p);
                    cur = p;
                }
                _ => return Err(Error::Topology(format!("{to} unreachable from {from}"))),
            }
        }
        path.reverse();
        Ok(path)
    }
}
