//! JSON file formats for graphs and potentials.
//!
//! Graphs travel as vertex and edge lists:
//!
//! ```json
//! {"vertices": ["a", "b"], "edges": [["a", "a"], ["a", "b"], ["b", "a"]]}
//! ```
//!
//! Potentials carry their window and a table keyed by space-separated
//! window words, with an optional declared decay rate:
//!
//! ```json
//! {"window": [0, 1], "values": {"a a": 1.0, "a b": 2.0, "b a": 3.0}, "theta": 0.5}
//! ```
//!
//! Parsing validates everything the in-memory constructors validate:
//! vertex identifiers must be nonempty and whitespace-free, the table
//! must cover every admissible window word and nothing else, and the
//! declared rate must lie in (0, 1).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::graph::DirectedGraph;
use crate::potential::LocallyConstantPotential;

/// The serialized form of a graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    /// Vertex identifiers.
    pub vertices: Vec<String>,
    /// Directed edges as `[from, to]` pairs.
    pub edges: Vec<(String, String)>,
}

impl GraphFile {
    /// Captures a graph for serialization.
    pub fn from_graph(g: &DirectedGraph) -> Self {
        GraphFile {
            vertices: (0..g.vertex_count() as u32)
                .map(|v| g.name(v).to_string())
                .collect(),
            edges: g
                .edges()
                .map(|(u, v)| (g.name(u).to_string(), g.name(v).to_string()))
                .collect(),
        }
    }
}

/// The serialized form of a potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialFile {
    /// The coordinate window `[l, r]` the potential reads.
    pub window: (i64, i64),
    /// Values keyed by space-separated window words.
    pub values: BTreeMap<String, f64>,
    /// Optional declared variation decay rate in (0, 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl PotentialFile {
    /// Captures a potential for serialization.
    pub fn from_potential(phi: &LocallyConstantPotential) -> Self {
        PotentialFile {
            window: phi.window(),
            values: phi.entries().into_iter().collect(),
            theta: phi.declared_theta(),
        }
    }
}

/// Parses a graph from its JSON text.
pub fn parse_graph(json: &str) -> Result<Arc<DirectedGraph>> {
    let file: GraphFile = serde_json::from_str(json)?;
    Ok(Arc::new(DirectedGraph::new(&file.vertices, &file.edges)?))
}

/// Reads a graph from a JSON file.
pub fn load_graph<P: AsRef<Path>>(path: P) -> Result<Arc<DirectedGraph>> {
    parse_graph(&fs::read_to_string(path)?)
}

/// Parses a potential from its JSON text, validated against a graph.
pub fn parse_potential(json: &str, graph: &Arc<DirectedGraph>) -> Result<LocallyConstantPotential> {
    let file: PotentialFile = serde_json::from_str(json)?;
    let entries: Vec<(String, f64)> = file.values.into_iter().collect();
    LocallyConstantPotential::from_table(graph, file.window, &entries, file.theta)
}

/// Reads a potential from a JSON file, validated against a graph.
pub fn load_potential<P: AsRef<Path>>(
    path: P,
    graph: &Arc<DirectedGraph>,
) -> Result<LocallyConstantPotential> {
    parse_potential(&fs::read_to_string(path)?, graph)
}

/// Serializes a potential back to the loadable JSON format.
pub fn potential_to_json(phi: &LocallyConstantPotential) -> String {
    serde_json::to_string_pretty(&PotentialFile::from_potential(phi))
        .expect("potential files serialize without fallible map keys")
}
