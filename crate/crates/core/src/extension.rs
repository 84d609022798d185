//! Entropy ranges for states outside the reversibly interconnectable set,
//! computed by reachability over weight-process graphs, with non-decrease
//! and additivity-containment checks.
//!
//! A node with an assigned entropy belongs to Σ; reachability (reflexive
//! and transitive, composite weight processes count) over the directed
//! edges stands in for "a weight process exists".

use std::collections::{HashMap, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("failed to read graph file: {0}")]
    Io(#[from] std::io::Error),
    #[error("failed to parse graph file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("duplicate node id '{0}'")]
    DuplicateNodeId(String),
    #[error("edge references unknown node '{0}'")]
    UnknownEdgeEndpoint(String),
    #[error("unknown node '{0}'")]
    UnknownNode(String),
    #[error("entropy non-decrease violated inside Σ: path from '{from}' (S={s_from}) to '{to}' (S={s_to})")]
    SigmaInconsistency {
        from: String,
        to: String,
        s_from: f64,
        s_to: f64,
    },
    #[error("node '{node}' violates the relaxed accessibility assumption: {reason}")]
    RelaxedAssumptionViolated { node: String, reason: String },
    #[error("graph is inconsistent: ranges forbid '{from}' ⇝ '{to}' but such a path exists")]
    ForbiddenPathExists { from: String, to: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NodeRecord {
    id: String,
    #[serde(rename = "S")]
    entropy: Option<f64>,
}

/// An edge endpoint in a graph file: either a node index or a node id.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeEnd {
    Index(usize),
    Id(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<NodeRecord>,
    edges: Vec<(EdgeEnd, EdgeEnd)>,
}

impl GraphFile {
    fn resolve(&self, end: &EdgeEnd) -> Result<String, GraphError> {
        match end {
            EdgeEnd::Id(id) => Ok(id.clone()),
            EdgeEnd::Index(i) => self
                .nodes
                .get(*i)
                .map(|n| n.id.clone())
                .ok_or_else(|| GraphError::UnknownEdgeEndpoint(format!("#{i}"))),
        }
    }
}

/// Directed graph of labeled states; nodes with an assigned entropy form Σ.
#[derive(Debug, Clone)]
pub struct AccessibilityGraph {
    nodes: Vec<NodeRecord>,
    index: HashMap<String, usize>,
    successors: Vec<Vec<usize>>,
}

/// Closed entropy interval assigned to a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyRangeResult {
    pub low: f64,
    pub high: f64,
}

/// Outcome of the non-decrease query for an ordered pair of states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NondecreaseVerdict {
    /// The entropy ranges separate: the process is impossible.
    Forbidden,
    /// The ranges overlap; the ranges alone decide nothing.
    NotDetermined,
}

impl AccessibilityGraph {
    /// Build from node/edge lists. Structure errors (duplicate ids,
    /// dangling edges) are rejected here; theory-level validation is
    /// a separate step, see [`AccessibilityGraph::validate`].
    pub fn new(
        nodes: impl IntoIterator<Item = (String, Option<f64>)>,
        edges: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, GraphError> {
        let nodes: Vec<NodeRecord> = nodes
            .into_iter()
            .map(|(id, entropy)| NodeRecord { id, entropy })
            .collect();
        let mut index = HashMap::new();
        for (i, node) in nodes.iter().enumerate() {
            if index.insert(node.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNodeId(node.id.clone()));
            }
        }
        let mut successors = vec![Vec::new(); nodes.len()];
        for (from, to) in edges {
            let &f = index
                .get(&from)
                .ok_or(GraphError::UnknownEdgeEndpoint(from.clone()))?;
            let &t = index
                .get(&to)
                .ok_or(GraphError::UnknownEdgeEndpoint(to.clone()))?;
            successors[f].push(t);
        }
        Ok(Self {
            nodes,
            index,
            successors,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path)?;
        let file: GraphFile = serde_json::from_str(&text)?;
        let edges = file
            .edges
            .iter()
            .map(|(u, v)| Ok((file.resolve(u)?, file.resolve(v)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Self::new(file.nodes.into_iter().map(|n| (n.id, n.entropy)), edges)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = &str> {
        self.nodes.iter().map(|n| n.id.as_str())
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn idx(&self, id: &str) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(id.to_string()))
    }

    /// Nodes reachable from `start` (including `start` itself).
    fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.successors[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// Whether a (possibly composite) weight process from `from` to `to`
    /// exists.
    pub fn has_path(&self, from: &str, to: &str) -> Result<bool, GraphError> {
        let f = self.idx(from)?;
        let t = self.idx(to)?;
        Ok(self.reachable_from(f)[t])
    }

    /// Theory-level validation: entropy non-decrease along every Σ-to-Σ
    /// path, and the relaxed accessibility assumption for every node
    /// outside Σ.
    pub fn validate(&self) -> Result<(), GraphError> {
        for (u, node) in self.nodes.iter().enumerate() {
            let Some(s_from) = node.entropy else { continue };
            let reach = self.reachable_from(u);
            for (v, other) in self.nodes.iter().enumerate() {
                if v == u || !reach[v] {
                    continue;
                }
                if let Some(s_to) = other.entropy {
                    if s_to < s_from {
                        return Err(GraphError::SigmaInconsistency {
                            from: node.id.clone(),
                            to: other.id.clone(),
                            s_from,
                            s_to,
                        });
                    }
                }
            }
        }
        for (u, node) in self.nodes.iter().enumerate() {
            if node.entropy.is_some() {
                continue;
            }
            let downstream = self.reachable_from(u);
            let has_successor = self
                .nodes
                .iter()
                .enumerate()
                .any(|(v, n)| v != u && downstream[v] && n.entropy.is_some());
            if !has_successor {
                return Err(GraphError::RelaxedAssumptionViolated {
                    node: node.id.clone(),
                    reason: "no path to any Σ state".into(),
                });
            }
            let has_predecessor = self.nodes.iter().enumerate().any(|(v, n)| {
                v != u && n.entropy.is_some() && self.reachable_from(v)[u]
            });
            if !has_predecessor {
                return Err(GraphError::RelaxedAssumptionViolated {
                    node: node.id.clone(),
                    reason: "no path from any Σ state".into(),
                });
            }
        }
        Ok(())
    }

    /// Entropy range of a node: low = max Σ-entropy over predecessors,
    /// high = min Σ-entropy over successors (both including the node
    /// itself, so Σ nodes collapse to a point).
    pub fn entropy_range(&self, node: &str) -> Result<EntropyRangeResult, GraphError> {
        let u = self.idx(node)?;
        if let Some(s) = self.nodes[u].entropy {
            return Ok(EntropyRangeResult { low: s, high: s });
        }
        let downstream = self.reachable_from(u);
        let high = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(v, n)| downstream[*v] && n.entropy.is_some())
            .map(|(_, n)| n.entropy.unwrap())
            .fold(f64::INFINITY, f64::min);
        let low = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(v, n)| n.entropy.is_some() && self.reachable_from(*v)[u])
            .map(|(_, n)| n.entropy.unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        if low == f64::NEG_INFINITY {
            return Err(GraphError::RelaxedAssumptionViolated {
                node: node.to_string(),
                reason: "no path from any Σ state".into(),
            });
        }
        if high == f64::INFINITY {
            return Err(GraphError::RelaxedAssumptionViolated {
                node: node.to_string(),
                reason: "no path to any Σ state".into(),
            });
        }
        Ok(EntropyRangeResult { low, high })
    }

    /// Non-decrease query for a candidate process a2 → a1: forbidden when
    /// the ranges separate. A separating pair with an actual a2 ⇝ a1 path
    /// marks the graph as inconsistent with the theory.
    pub fn assert_nondecrease(&self, a1: &str, a2: &str) -> Result<NondecreaseVerdict, GraphError> {
        let r1 = self.entropy_range(a1)?;
        let r2 = self.entropy_range(a2)?;
        if r2.low > r1.high {
            if self.has_path(a2, a1)? {
                return Err(GraphError::ForbiddenPathExists {
                    from: a2.to_string(),
                    to: a1.to_string(),
                });
            }
            return Ok(NondecreaseVerdict::Forbidden);
        }
        Ok(NondecreaseVerdict::NotDetermined)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            nodes: self.nodes.clone(),
            edges: self
                .nodes
                .iter()
                .enumerate()
                .flat_map(|(u, n)| {
                    self.successors[u]
                        .iter()
                        .map(move |&v| {
                            (EdgeEnd::Id(n.id.clone()), EdgeEnd::Id(self.nodes[v].id.clone()))
                        })
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serialization")
    }
}

/// Id of a product node.
pub fn product_node_id(a: &str, b: &str) -> String {
    format!("{a}|{b}")
}

/// Product of two accessibility graphs: nodes (a,b) with additive Σ
/// entropies, and an edge whenever each factor either stays put or can
/// reach its target (two separate weight processes compose).
pub fn product_graph(
    ga: &AccessibilityGraph,
    gb: &AccessibilityGraph,
) -> Result<AccessibilityGraph, GraphError> {
    let mut nodes = Vec::new();
    for a in &ga.nodes {
        for b in &gb.nodes {
            let entropy = match (a.entropy, b.entropy) {
                (Some(x), Some(y)) => Some(x + y),
                _ => None,
            };
            nodes.push((product_node_id(&a.id, &b.id), entropy));
        }
    }
    let reach_a: Vec<Vec<bool>> = (0..ga.nodes.len()).map(|u| ga.reachable_from(u)).collect();
    let reach_b: Vec<Vec<bool>> = (0..gb.nodes.len()).map(|u| gb.reachable_from(u)).collect();
    let mut edges = Vec::new();
    for (ia, a) in ga.nodes.iter().enumerate() {
        for (ib, b) in gb.nodes.iter().enumerate() {
            for (ja, a2) in ga.nodes.iter().enumerate() {
                for (jb, b2) in gb.nodes.iter().enumerate() {
                    if ia == ja && ib == jb {
                        continue;
                    }
                    if reach_a[ia][ja] && reach_b[ib][jb] {
                        edges.push((
                            product_node_id(&a.id, &b.id),
                            product_node_id(&a2.id, &b2.id),
                        ));
                    }
                }
            }
        }
    }
    AccessibilityGraph::new(nodes, edges)
}

/// Whether the product-state range is contained in the sum of the factor
/// ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AdditivityVerdict {
    Contained,
    Violated,
}

/// Theorem-10-style containment check on one product node.
pub fn check_range_additivity(
    ga: &AccessibilityGraph,
    gb: &AccessibilityGraph,
    node_a: &str,
    node_b: &str,
) -> Result<AdditivityVerdict, GraphError> {
    let ra = ga.entropy_range(node_a)?;
    let rb = gb.entropy_range(node_b)?;
    let product = product_graph(ga, gb)?;
    let rp = product.entropy_range(&product_node_id(node_a, node_b))?;
    let eps = 1e-12;
    if rp.low >= ra.low + rb.low - eps && rp.high <= ra.high + rb.high + eps {
        Ok(AdditivityVerdict::Contained)
    } else {
        Ok(AdditivityVerdict::Violated)
    }
}
