//! Tag co-occurrence networks and their structure metrics.
//!
//! Three graph classes are built from a dataset: hashtag co-occurrence (HT),
//! user-tag co-occurrence (UT), and the hashtag-user bipartite network (HU).
//! Graphs are simple; co-occurrence multiplicity is kept as an integer edge
//! weight, and metrics are computed on the unweighted simple graph.
//! Entities that never co-occur stay in the graph as degree-0 nodes.

use crate::dataset::Dataset;
use crate::textfeat;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// The three co-occurrence graph classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphKind {
    /// Hashtag co-occurrence.
    HT,
    /// User-tag co-occurrence.
    UT,
    /// Hashtag-user bipartite network.
    HU,
}

impl GraphKind {
    pub const ALL: [GraphKind; 3] = [GraphKind::HT, GraphKind::UT, GraphKind::HU];

    pub fn as_str(&self) -> &'static str {
        match self {
            GraphKind::HT => "HT",
            GraphKind::UT => "UT",
            GraphKind::HU => "HU",
        }
    }
}

/// Which entity family a node belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodePart {
    Hashtag,
    Usertag,
}

impl NodePart {
    pub fn as_str(&self) -> &'static str {
        match self {
            NodePart::Hashtag => "hashtag",
            NodePart::Usertag => "usertag",
        }
    }
}

/// A node: case-folded entity label plus its part.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Node {
    pub label: String,
    pub part: NodePart,
}

/// Simple undirected co-occurrence graph. Nodes are kept sorted by
/// (part, label); edges are unordered index pairs with a co-occurrence
/// weight.
#[derive(Debug, Clone, PartialEq)]
pub struct CoocGraph {
    pub kind: GraphKind,
    nodes: Vec<Node>,
    adjacency: Vec<BTreeSet<u32>>,
    edges: BTreeMap<(u32, u32), u64>,
}

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("self-loop on node {0:?}")]
    SelfLoop(String),
    #[error("edge between {a:?} and {b:?} violates the {kind:?} part constraint")]
    PartConstraint { kind: GraphKind, a: String, b: String },
    #[error("average clustering is not defined for the bipartite HU graph; omit it")]
    BipartiteClustering,
    #[error("assortativity of a graph with no edges")]
    NoEdges,
    #[error("failed to write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {msg}")]
    InvalidCsv { path: PathBuf, line: usize, msg: String },
}

impl CoocGraph {
    /// Builds a graph from an explicit node and edge list, validating the
    /// part constraints of `kind`. Unknown endpoint labels are added as
    /// nodes automatically.
    pub fn from_edges(
        kind: GraphKind,
        nodes: impl IntoIterator<Item = Node>,
        edges: impl IntoIterator<Item = (Node, Node, u64)>,
    ) -> Result<CoocGraph, NetworkError> {
        let mut node_set: BTreeSet<Node> = nodes.into_iter().collect();
        let edge_list: Vec<(Node, Node, u64)> = edges.into_iter().collect();
        for (a, b, _) in &edge_list {
            check_edge(kind, a, b)?;
            node_set.insert(a.clone());
            node_set.insert(b.clone());
        }
        let nodes: Vec<Node> = node_set.into_iter().collect();
        let index: BTreeMap<&Node, u32> =
            nodes.iter().enumerate().map(|(i, n)| (n, i as u32)).collect();
        let mut graph = CoocGraph {
            kind,
            adjacency: vec![BTreeSet::new(); nodes.len()],
            edges: BTreeMap::new(),
            nodes: nodes.clone(),
        };
        for (a, b, w) in &edge_list {
            let (i, j) = (index[a], index[b]);
            graph.insert_edge(i, j, *w);
        }
        Ok(graph)
    }

    fn insert_edge(&mut self, i: u32, j: u32, weight: u64) {
        let key = (i.min(j), i.max(j));
        *self.edges.entry(key).or_insert(0) += weight;
        self.adjacency[i as usize].insert(j);
        self.adjacency[j as usize].insert(i);
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = u32> + '_ {
        self.adjacency[i].iter().copied()
    }

    /// Edges as (node index, node index, weight), ascending index order.
    pub fn edge_list(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.edges.iter().map(|(&(i, j), &w)| (i, j, w))
    }

    pub fn avg_degree(&self) -> f64 {
        if self.nodes.is_empty() {
            0.0
        } else {
            2.0 * self.n_edges() as f64 / self.n_nodes() as f64
        }
    }

    /// Number of edges among the neighbors of node `i`.
    fn neighbor_ties(&self, i: usize) -> usize {
        let neighbors = &self.adjacency[i];
        let mut ties = 0;
        for &u in neighbors {
            // Count each neighbor pair once: only partners above u.
            ties += self.adjacency[u as usize]
                .iter()
                .filter(|&&v| v > u && neighbors.contains(&v))
                .count();
        }
        ties
    }
}

fn check_edge(kind: GraphKind, a: &Node, b: &Node) -> Result<(), NetworkError> {
    if a == b {
        return Err(NetworkError::SelfLoop(a.label.clone()));
    }
    let ok = match kind {
        GraphKind::HT => a.part == NodePart::Hashtag && b.part == NodePart::Hashtag,
        GraphKind::UT => a.part == NodePart::Usertag && b.part == NodePart::Usertag,
        GraphKind::HU => a.part != b.part,
    };
    if ok {
        Ok(())
    } else {
        Err(NetworkError::PartConstraint { kind, a: a.label.clone(), b: b.label.clone() })
    }
}

/// Builds the co-occurrence graph of `kind` from a dataset.
///
/// Per caption, HT forms a clique over the caption's unique hashtags, UT
/// over its unique user tags, and HU joins every hashtag with every user
/// tag. Edge weight counts the captions inducing the pair.
pub fn build_graph(data: &Dataset, kind: GraphKind) -> CoocGraph {
    let mut node_set: BTreeSet<Node> = BTreeSet::new();
    let mut caption_entities: Vec<(Vec<String>, Vec<String>)> = Vec::with_capacity(data.len());
    for text in data.texts() {
        let bundle = textfeat::parse(text);
        let hashtags: BTreeSet<String> = bundle.hashtags.into_iter().collect();
        let usertags: BTreeSet<String> = bundle.usertags.into_iter().collect();
        if matches!(kind, GraphKind::HT | GraphKind::HU) {
            for tag in &hashtags {
                node_set.insert(Node { label: tag.clone(), part: NodePart::Hashtag });
            }
        }
        if matches!(kind, GraphKind::UT | GraphKind::HU) {
            for tag in &usertags {
                node_set.insert(Node { label: tag.clone(), part: NodePart::Usertag });
            }
        }
        caption_entities.push((hashtags.into_iter().collect(), usertags.into_iter().collect()));
    }

    let nodes: Vec<Node> = node_set.into_iter().collect();
    let index: BTreeMap<&Node, u32> =
        nodes.iter().enumerate().map(|(i, n)| (n, i as u32)).collect();
    let mut graph = CoocGraph {
        kind,
        adjacency: vec![BTreeSet::new(); nodes.len()],
        edges: BTreeMap::new(),
        nodes: nodes.clone(),
    };

    for (hashtags, usertags) in &caption_entities {
        match kind {
            GraphKind::HT => clique(&mut graph, &index, hashtags, NodePart::Hashtag),
            GraphKind::UT => clique(&mut graph, &index, usertags, NodePart::Usertag),
            GraphKind::HU => {
                for h in hashtags {
                    let i = index[&Node { label: h.clone(), part: NodePart::Hashtag }];
                    for u in usertags {
                        let j = index[&Node { label: u.clone(), part: NodePart::Usertag }];
                        graph.insert_edge(i, j, 1);
                    }
                }
            }
        }
    }
    graph
}

fn clique(graph: &mut CoocGraph, index: &BTreeMap<&Node, u32>, labels: &[String], part: NodePart) {
    for (a, label_a) in labels.iter().enumerate() {
        let i = index[&Node { label: label_a.clone(), part }];
        for label_b in &labels[a + 1..] {
            let j = index[&Node { label: label_b.clone(), part }];
            graph.insert_edge(i, j, 1);
        }
    }
}

/// Average local clustering coefficient; nodes of degree < 2 contribute 0.
/// Not defined for the bipartite HU class.
pub fn avg_clustering(g: &CoocGraph) -> Result<f64, NetworkError> {
    avg_clustering_opts(g, false)
}

/// Like [`avg_clustering`], with `exclude_low_degree` averaging only over
/// nodes of degree >= 2.
pub fn avg_clustering_opts(g: &CoocGraph, exclude_low_degree: bool) -> Result<f64, NetworkError> {
    if g.kind == GraphKind::HU {
        return Err(NetworkError::BipartiteClustering);
    }
    let mut sum = 0.0;
    let mut counted = 0usize;
    for i in 0..g.n_nodes() {
        let d = g.degree(i);
        if d < 2 {
            if !exclude_low_degree {
                counted += 1;
            }
            continue;
        }
        let ties = g.neighbor_ties(i) as f64;
        sum += 2.0 * ties / (d as f64 * (d - 1) as f64);
        counted += 1;
    }
    if counted == 0 {
        return Ok(0.0);
    }
    Ok(sum / counted as f64)
}

/// Degree assortativity: Pearson correlation of endpoint degrees over the
/// directed edge-stub multiset (each undirected edge contributes both
/// orientations). `None` when the endpoint-degree variance is zero.
pub fn assortativity(g: &CoocGraph) -> Result<Option<f64>, NetworkError> {
    if g.n_edges() == 0 {
        return Err(NetworkError::NoEdges);
    }
    let m = (2 * g.n_edges()) as f64;
    let mut sum_x = 0.0;
    let mut sum_x2 = 0.0;
    let mut sum_xy = 0.0;
    for (i, j, _) in g.edge_list() {
        let (di, dj) = (g.degree(i as usize) as f64, g.degree(j as usize) as f64);
        sum_x += di + dj;
        sum_x2 += di * di + dj * dj;
        sum_xy += 2.0 * di * dj;
    }
    let mean = sum_x / m;
    let variance = sum_x2 / m - mean * mean;
    let covariance = sum_xy / m - mean * mean;
    if variance <= 0.0 {
        return Ok(None);
    }
    Ok(Some(covariance / variance))
}

/// Structure metrics of one graph. `avg_clustering` is absent for the
/// bipartite HU class; `assortativity` is absent when undefined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkReport {
    pub kind: GraphKind,
    pub n_nodes: f64,
    pub n_edges: f64,
    pub avg_clustering: Option<f64>,
    pub avg_degree: f64,
    pub assortativity: Option<f64>,
}

impl NetworkReport {
    /// Field-wise average over per-resample reports. Optional metrics are
    /// averaged over the resamples where they are defined.
    pub fn average(reports: &[NetworkReport]) -> NetworkReport {
        assert!(!reports.is_empty(), "average of zero reports");
        let n = reports.len() as f64;
        let opt_avg = |get: fn(&NetworkReport) -> Option<f64>| {
            let defined: Vec<f64> = reports.iter().filter_map(get).collect();
            if defined.is_empty() {
                None
            } else {
                Some(defined.iter().sum::<f64>() / defined.len() as f64)
            }
        };
        NetworkReport {
            kind: reports[0].kind,
            n_nodes: reports.iter().map(|r| r.n_nodes).sum::<f64>() / n,
            n_edges: reports.iter().map(|r| r.n_edges).sum::<f64>() / n,
            avg_clustering: opt_avg(|r| r.avg_clustering),
            avg_degree: reports.iter().map(|r| r.avg_degree).sum::<f64>() / n,
            assortativity: opt_avg(|r| r.assortativity),
        }
    }
}

/// Builds the graph of `kind` and computes all structure metrics.
pub fn network_report(data: &Dataset, kind: GraphKind) -> NetworkReport {
    let g = build_graph(data, kind);
    let avg_clustering = avg_clustering(&g).ok();
    let assort = assortativity(&g).ok().flatten();
    NetworkReport {
        kind,
        n_nodes: g.n_nodes() as f64,
        n_edges: g.n_edges() as f64,
        avg_clustering,
        avg_degree: g.avg_degree(),
        assortativity: assort,
    }
}

/// Export formats for [`export_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExportFormat {
    Graphml,
    Dot,
    EdgelistCsv,
}

/// Serializes the graph losslessly (labels, parts, weights) to `path`.
/// Output is deterministic: nodes sorted by (part, label), edges by index.
pub fn export_graph(g: &CoocGraph, format: ExportFormat, path: &Path) -> Result<(), NetworkError> {
    let body = match format {
        ExportFormat::Graphml => to_graphml(g),
        ExportFormat::Dot => to_dot(g),
        ExportFormat::EdgelistCsv => to_edgelist_csv(g),
    };
    std::fs::write(path, body)
        .map_err(|source| NetworkError::Io { path: path.to_path_buf(), source })
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn to_graphml(g: &CoocGraph) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"part\" for=\"node\" attr.name=\"part\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    let _ = writeln!(out, "  <graph id=\"{}\" edgedefault=\"undirected\">", g.kind.as_str());
    for (i, node) in g.nodes.iter().enumerate() {
        let _ = writeln!(
            out,
            "    <node id=\"n{i}\"><data key=\"label\">{}</data><data key=\"part\">{}</data></node>",
            xml_escape(&node.label),
            node.part.as_str()
        );
    }
    for (i, j, w) in g.edge_list() {
        let _ = writeln!(
            out,
            "    <edge source=\"n{i}\" target=\"n{j}\"><data key=\"weight\">{w}</data></edge>"
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn to_dot(g: &CoocGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph {} {{", g.kind.as_str());
    for (i, node) in g.nodes.iter().enumerate() {
        let _ = writeln!(
            out,
            "  n{i} [label=\"{}\" part=\"{}\"];",
            node.label.replace('\\', "\\\\").replace('"', "\\\""),
            node.part.as_str()
        );
    }
    for (i, j, w) in g.edge_list() {
        let _ = writeln!(out, "  n{i} -- n{j} [weight={w}];");
    }
    out.push_str("}\n");
    out
}

fn to_edgelist_csv(g: &CoocGraph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "kind,{}", g.kind.as_str());
    for node in &g.nodes {
        let _ = writeln!(out, "node,{},{}", node.label, node.part.as_str());
    }
    for (i, j, w) in g.edge_list() {
        let a = &g.nodes[i as usize];
        let b = &g.nodes[j as usize];
        let _ = writeln!(
            out,
            "edge,{},{},{},{},{w}",
            a.label,
            a.part.as_str(),
            b.label,
            b.part.as_str()
        );
    }
    out
}

/// Re-imports a graph written by the `edgelist-csv` exporter.
pub fn import_edgelist_csv(path: &Path) -> Result<CoocGraph, NetworkError> {
    let body = std::fs::read_to_string(path)
        .map_err(|source| NetworkError::Io { path: path.to_path_buf(), source })?;
    let invalid =
        |line: usize, msg: String| NetworkError::InvalidCsv { path: path.to_path_buf(), line, msg };
    let parse_part = |line: usize, s: &str| match s {
        "hashtag" => Ok(NodePart::Hashtag),
        "usertag" => Ok(NodePart::Usertag),
        other => Err(invalid(line, format!("unknown part {other:?}"))),
    };
    let mut kind = None;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    for (idx, row) in body.lines().enumerate() {
        let line = idx + 1;
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        match fields[0] {
            "kind" if fields.len() == 2 => {
                kind = Some(match fields[1] {
                    "HT" => GraphKind::HT,
                    "UT" => GraphKind::UT,
                    "HU" => GraphKind::HU,
                    other => return Err(invalid(line, format!("unknown kind {other:?}"))),
                });
            }
            "node" if fields.len() == 3 => {
                nodes.push(Node {
                    label: fields[1].to_string(),
                    part: parse_part(line, fields[2])?,
                });
            }
            "edge" if fields.len() == 6 => {
                let w: u64 = fields[5]
                    .parse()
                    .map_err(|_| invalid(line, "edge weight is not an integer".to_string()))?;
                edges.push((
                    Node { label: fields[1].to_string(), part: parse_part(line, fields[2])? },
                    Node { label: fields[3].to_string(), part: parse_part(line, fields[4])? },
                    w,
                ));
            }
            _ => return Err(invalid(line, "unrecognized row".to_string())),
        }
    }
    let kind = kind.ok_or_else(|| invalid(1, "missing kind row".to_string()))?;
    CoocGraph::from_edges(kind, nodes, edges)
}
