//! On-disk snapshot of a frozen graph.
//!
//! A snapshot is a single JSON object followed by a newline:
//!
//! ```text
//! {"magic":"scigraph-snapshot","version":1,"nodes":[...],"relationships":[...]}
//! ```
//!
//! Nodes are `{"id":0,"label":"Journal","properties":{"name":"..."}}` in id
//! order, with properties sorted by key. Relationships are
//! `{"id":0,"type":"PUBLISHED_IN","source":1,"target":0}`. The output is a pure
//! function of the graph, so save → load → save is byte-identical.

use crate::graph::{GraphError, Node, PropertyGraph, Relationship};
use serde::{Deserialize, Serialize};
use std::borrow::Cow;
use thiserror::Error;

pub const MAGIC: &str = "scigraph-snapshot";
pub const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("not a snapshot file (magic '{0}')")]
    BadMagic(String),
    #[error("snapshot version {found} is newer than supported version {VERSION}")]
    UnsupportedVersion { found: u32 },
    #[error("malformed snapshot: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("invalid snapshot graph: {0}")]
    Graph(#[from] GraphError),
}

#[derive(Serialize, Deserialize)]
struct Container<'a> {
    magic: Cow<'a, str>,
    version: u32,
    nodes: Cow<'a, [Node]>,
    relationships: Cow<'a, [Relationship]>,
}

#[derive(Deserialize)]
struct Header {
    magic: String,
    version: u32,
}

pub fn to_string(graph: &PropertyGraph) -> String {
    let container = Container {
        magic: Cow::Borrowed(MAGIC),
        version: VERSION,
        nodes: Cow::Borrowed(graph.nodes()),
        relationships: Cow::Borrowed(graph.relationships()),
    };
    let mut out = serde_json::to_string(&container).expect("graph values are always serializable");
    out.push('\n');
    out
}

/// Parses and validates a snapshot; the returned graph is frozen.
pub fn from_str(text: &str) -> Result<PropertyGraph, SnapshotError> {
    // Check the header first so a newer format is reported as such rather
    // than as a shape mismatch.
    let header: Header = serde_json::from_str(text)?;
    if header.magic != MAGIC {
        return Err(SnapshotError::BadMagic(header.magic));
    }
    if header.version > VERSION {
        return Err(SnapshotError::UnsupportedVersion {
            found: header.version,
        });
    }
    let container: Container<'static> = serde_json::from_str(text)?;
    let mut graph = PropertyGraph::from_parts(
        container.nodes.into_owned(),
        container.relationships.into_owned(),
    )?;
    graph.freeze();
    Ok(graph)
}
