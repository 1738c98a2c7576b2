//! Colored-graph interchange: a JSON record and newline-delimited files.
//!
//! graph6 carries no colors, so general inputs use the record
//! `{"n": 3, "edges": [[0,1],[1,2]], "colors": [0,0,1]}`. Multi-graph files
//! hold one record per line, either all graph6 or all JSON.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::graph6::{parse_graph6, to_graph6, Graph6Error};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}: {source}")]
    Graph6 {
        line: usize,
        #[source]
        source: Graph6Error,
    },
    #[error("line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("input contains no graphs")]
    NoGraphs,
}

/// Serialized form of a colored graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphRecord {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub colors: Option<Vec<u32>>,
}

impl GraphRecord {
    pub fn from_graph(g: &Graph) -> Self {
        GraphRecord {
            n: g.node_count(),
            edges: g.edges().to_vec(),
            colors: Some(g.colors().to_vec()),
        }
    }

    pub fn into_graph(self) -> Result<Graph, GraphError> {
        match self.colors {
            Some(colors) => Graph::with_colors(self.n, &self.edges, &colors),
            None => Graph::new(self.n, &self.edges),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Graph6,
    Json,
}

/// Renders one graph as a single line in the given format.
pub fn write_graph_line(g: &Graph, format: GraphFormat) -> String {
    match format {
        GraphFormat::Graph6 => to_graph6(g),
        GraphFormat::Json => {
            serde_json::to_string(&GraphRecord::from_graph(g)).expect("record serializes")
        }
    }
}

/// Parses one line, sniffing JSON records by their leading `{`.
pub fn parse_graph_line(line: &str, lineno: usize) -> Result<Graph, IoError> {
    let trimmed = line.trim();
    if trimmed.starts_with('{') {
        let record: GraphRecord = serde_json::from_str(trimmed).map_err(|e| IoError::Json {
            line: lineno,
            message: e.to_string(),
        })?;
        record.into_graph().map_err(|e| IoError::Invalid {
            line: lineno,
            source: e,
        })
    } else {
        parse_graph6(trimmed).map_err(|e| IoError::Graph6 {
            line: lineno,
            source: e,
        })
    }
}

/// Reads a newline-delimited multi-graph text; blank lines are skipped.
pub fn parse_graph_file(text: &str) -> Result<Vec<Graph>, IoError> {
    let mut graphs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        graphs.push(parse_graph_line(line, idx + 1)?);
    }
    if graphs.is_empty() {
        return Err(IoError::NoGraphs);
    }
    Ok(graphs)
}
