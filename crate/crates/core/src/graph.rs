//! Embedded in-memory property graph.
//!
//! Nodes carry one of six labels and a map of scalar properties; relationships
//! are typed and directed, and every stored relationship satisfies the
//! type/endpoint table in [`RelType::endpoints`]. Ids are dense and assigned
//! sequentially; there is no deletion.
//!
//! The graph has two phases. While building, a single writer may add nodes,
//! relationships and properties. After [`PropertyGraph::freeze`] every mutation
//! fails with [`GraphError::Frozen`] and the graph can be shared freely between
//! readers.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("invalid node label '{0}'")]
    InvalidLabel(String),
    #[error("invalid relationship type '{0}'")]
    InvalidRelType(String),
    #[error("node properties must include a text 'name'")]
    MissingNameProperty,
    #[error("property '{0}' holds a non-finite float")]
    NonFiniteFloat(String),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("{rel_type} cannot connect {source_label} -> {target_label}")]
    IncompatibleEndpoints {
        rel_type: RelType,
        source_label: Label,
        target_label: Label,
    },
    #[error("an article cannot cite itself (node {0})")]
    CitesSelfLoop(NodeId),
    #[error("type mismatch: cannot compare {left} with {right}")]
    TypeMismatch {
        left: &'static str,
        right: &'static str,
    },
    #[error("graph is frozen")]
    Frozen,
}

pub type Result<T, E = GraphError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RelId(pub u32);

impl RelId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for RelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    Journal,
    Article,
    Author,
    Institute,
    Country,
    Region,
}

impl Label {
    pub const ALL: [Label; 6] = [
        Label::Journal,
        Label::Article,
        Label::Author,
        Label::Institute,
        Label::Country,
        Label::Region,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Journal => "Journal",
            Label::Article => "Article",
            Label::Author => "Author",
            Label::Institute => "Institute",
            Label::Country => "Country",
            Label::Region => "Region",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self> {
        Label::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| GraphError::InvalidLabel(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[allow(non_camel_case_types)]
pub enum RelType {
    PUBLISHED_IN,
    AUTHORED,
    WORKS_FOR,
    IS_IN,
    IN_REGION,
    CITES,
}

impl RelType {
    pub const ALL: [RelType; 6] = [
        RelType::PUBLISHED_IN,
        RelType::AUTHORED,
        RelType::WORKS_FOR,
        RelType::IS_IN,
        RelType::IN_REGION,
        RelType::CITES,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RelType::PUBLISHED_IN => "PUBLISHED_IN",
            RelType::AUTHORED => "AUTHORED",
            RelType::WORKS_FOR => "WORKS_FOR",
            RelType::IS_IN => "IS_IN",
            RelType::IN_REGION => "IN_REGION",
            RelType::CITES => "CITES",
        }
    }

    /// The only (source, target) label pair this type may connect.
    pub fn endpoints(self) -> (Label, Label) {
        match self {
            RelType::PUBLISHED_IN => (Label::Article, Label::Journal),
            RelType::AUTHORED => (Label::Author, Label::Article),
            RelType::WORKS_FOR => (Label::Author, Label::Institute),
            RelType::IS_IN => (Label::Institute, Label::Country),
            RelType::IN_REGION => (Label::Country, Label::Region),
            RelType::CITES => (Label::Article, Label::Article),
        }
    }
}

impl fmt::Display for RelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelType {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self> {
        RelType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| GraphError::InvalidRelType(s.to_string()))
    }
}

/// A scalar property value. Floats stored in a graph are always finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PropertyValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
}

impl PropertyValue {
    pub fn type_name(&self) -> &'static str {
        match self {
            PropertyValue::Bool(_) => "boolean",
            PropertyValue::Int(_) => "integer",
            PropertyValue::Float(_) => "float",
            PropertyValue::Text(_) => "text",
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            PropertyValue::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            PropertyValue::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            PropertyValue::Int(i) => Some(*i as f64),
            PropertyValue::Float(f) => Some(*f),
            _ => None,
        }
    }

    /// Typed comparison. Integers and floats compare numerically with each
    /// other; any other cross-type comparison is a [`GraphError::TypeMismatch`].
    pub fn compare(&self, other: &PropertyValue) -> Result<Ordering> {
        use PropertyValue::*;
        let ord = match (self, other) {
            (Text(a), Text(b)) => a.cmp(b),
            (Bool(a), Bool(b)) => a.cmp(b),
            (Int(a), Int(b)) => a.cmp(b),
            (Int(_) | Float(_), Int(_) | Float(_)) => {
                // Exact when both are integers; handled above.
                let (a, b) = (self.as_f64().unwrap(), other.as_f64().unwrap());
                a.partial_cmp(&b).unwrap_or(Ordering::Equal)
            }
            _ => {
                return Err(GraphError::TypeMismatch {
                    left: self.type_name(),
                    right: other.type_name(),
                })
            }
        };
        Ok(ord)
    }
}

impl fmt::Display for PropertyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyValue::Bool(b) => write!(f, "{b}"),
            PropertyValue::Int(i) => write!(f, "{i}"),
            PropertyValue::Float(x) => write!(f, "{x:?}"),
            PropertyValue::Text(s) => f.write_str(s),
        }
    }
}

impl From<&str> for PropertyValue {
    fn from(s: &str) -> Self {
        PropertyValue::Text(s.to_string())
    }
}

impl From<String> for PropertyValue {
    fn from(s: String) -> Self {
        PropertyValue::Text(s)
    }
}

impl From<i64> for PropertyValue {
    fn from(i: i64) -> Self {
        PropertyValue::Int(i)
    }
}

impl From<f64> for PropertyValue {
    fn from(x: f64) -> Self {
        PropertyValue::Float(x)
    }
}

impl From<bool> for PropertyValue {
    fn from(b: bool) -> Self {
        PropertyValue::Bool(b)
    }
}

pub type Properties = BTreeMap<String, PropertyValue>;

/// Builds a property map from `(key, value)` pairs.
pub fn props<I, K, V>(pairs: I) -> Properties
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: Into<PropertyValue>,
{
    pairs
        .into_iter()
        .map(|(k, v)| (k.into(), v.into()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub label: Label,
    pub properties: Properties,
}

impl Node {
    pub fn get(&self, key: &str) -> Option<&PropertyValue> {
        self.properties.get(key)
    }

    pub fn name(&self) -> &str {
        self.properties
            .get("name")
            .and_then(PropertyValue::as_str)
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relationship {
    pub id: RelId,
    #[serde(rename = "type")]
    pub rel_type: RelType,
    pub source: NodeId,
    pub target: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn holds(self, ord: Ordering) -> bool {
        match self {
            CmpOp::Eq => ord == Ordering::Equal,
            CmpOp::Ne => ord != Ordering::Equal,
            CmpOp::Lt => ord == Ordering::Less,
            CmpOp::Le => ord != Ordering::Greater,
            CmpOp::Gt => ord == Ordering::Greater,
            CmpOp::Ge => ord != Ordering::Less,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

/// Property filter for [`PropertyGraph::find_nodes`].
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub key: String,
    pub op: CmpOp,
    pub value: PropertyValue,
}

impl Predicate {
    pub fn new(key: impl Into<String>, op: CmpOp, value: impl Into<PropertyValue>) -> Self {
        Predicate {
            key: key.into(),
            op,
            value: value.into(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PropertyGraph {
    nodes: Vec<Node>,
    relationships: Vec<Relationship>,
    outgoing: Vec<Vec<RelId>>,
    incoming: Vec<Vec<RelId>>,
    by_label: [Vec<NodeId>; 6],
    frozen: bool,
}

impl PropertyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Rebuilds a graph from stored node and relationship collections,
    /// validating every schema invariant. The result is unfrozen.
    pub fn from_parts(nodes: Vec<Node>, relationships: Vec<Relationship>) -> Result<Self> {
        let mut graph = PropertyGraph::new();
        for (i, node) in nodes.into_iter().enumerate() {
            if node.id.index() != i {
                return Err(GraphError::UnknownNode(node.id));
            }
            graph.create_node(node.label, node.properties)?;
        }
        for (i, rel) in relationships.into_iter().enumerate() {
            if rel.id.index() != i {
                return Err(GraphError::UnknownNode(rel.source));
            }
            graph.create_relationship(rel.rel_type, rel.source, rel.target)?;
        }
        Ok(graph)
    }

    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    fn ensure_mutable(&self) -> Result<()> {
        if self.frozen {
            Err(GraphError::Frozen)
        } else {
            Ok(())
        }
    }

    pub fn create_node(&mut self, label: Label, properties: Properties) -> Result<NodeId> {
        self.ensure_mutable()?;
        if !matches!(properties.get("name"), Some(PropertyValue::Text(_))) {
            return Err(GraphError::MissingNameProperty);
        }
        for (key, value) in &properties {
            check_finite(key, value)?;
        }
        let id = NodeId(u32::try_from(self.nodes.len()).expect("node id space exhausted"));
        self.nodes.push(Node {
            id,
            label,
            properties,
        });
        self.outgoing.push(Vec::new());
        self.incoming.push(Vec::new());
        self.by_label[label.slot()].push(id);
        Ok(id)
    }

    pub fn create_relationship(
        &mut self,
        rel_type: RelType,
        source: NodeId,
        target: NodeId,
    ) -> Result<RelId> {
        self.ensure_mutable()?;
        let source_label = self.node(source)?.label;
        let target_label = self.node(target)?.label;
        if (source_label, target_label) != rel_type.endpoints() {
            return Err(GraphError::IncompatibleEndpoints {
                rel_type,
                source_label,
                target_label,
            });
        }
        if rel_type == RelType::CITES && source == target {
            return Err(GraphError::CitesSelfLoop(source));
        }
        let id = RelId(
            u32::try_from(self.relationships.len()).expect("relationship id space exhausted"),
        );
        self.relationships.push(Relationship {
            id,
            rel_type,
            source,
            target,
        });
        self.outgoing[source.index()].push(id);
        self.incoming[target.index()].push(id);
        Ok(id)
    }

    /// Sets (or overwrites) one property. `name` must stay text.
    pub fn set_property(
        &mut self,
        node: NodeId,
        key: &str,
        value: impl Into<PropertyValue>,
    ) -> Result<()> {
        self.ensure_mutable()?;
        let value = value.into();
        check_finite(key, &value)?;
        if key == "name" && !matches!(value, PropertyValue::Text(_)) {
            return Err(GraphError::MissingNameProperty);
        }
        let slot = self
            .nodes
            .get_mut(node.index())
            .ok_or(GraphError::UnknownNode(node))?;
        slot.properties.insert(key.to_string(), value);
        Ok(())
    }

    pub fn node(&self, id: NodeId) -> Result<&Node> {
        self.nodes.get(id.index()).ok_or(GraphError::UnknownNode(id))
    }

    pub fn relationship(&self, id: RelId) -> Option<&Relationship> {
        self.relationships.get(id.index())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn relationships(&self) -> &[Relationship] {
        &self.relationships
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn relationship_count(&self) -> usize {
        self.relationships.len()
    }

    /// Node ids carrying `label`, ascending.
    pub fn nodes_with_label(&self, label: Label) -> &[NodeId] {
        &self.by_label[label.slot()]
    }

    pub fn outgoing(&self, node: NodeId) -> Result<&[RelId]> {
        self.outgoing
            .get(node.index())
            .map(Vec::as_slice)
            .ok_or(GraphError::UnknownNode(node))
    }

    pub fn incoming(&self, node: NodeId) -> Result<&[RelId]> {
        self.incoming
            .get(node.index())
            .map(Vec::as_slice)
            .ok_or(GraphError::UnknownNode(node))
    }

    /// Adjacent `(relationship, other endpoint)` pairs in relationship-id order.
    pub fn neighbors(
        &self,
        node: NodeId,
        rel_type: Option<RelType>,
        direction: Direction,
    ) -> Result<Vec<(RelId, NodeId)>> {
        let out = self.outgoing(node)?;
        let inc = self.incoming(node)?;
        let keep = |rid: &RelId| rel_type.is_none_or(|t| self.relationships[rid.index()].rel_type == t);
        let mut result: Vec<(RelId, NodeId)> = Vec::new();
        if matches!(direction, Direction::Out | Direction::Both) {
            result.extend(
                out.iter()
                    .filter(|r| keep(r))
                    .map(|&r| (r, self.relationships[r.index()].target)),
            );
        }
        if matches!(direction, Direction::In | Direction::Both) {
            result.extend(
                inc.iter()
                    .filter(|r| keep(r))
                    .map(|&r| (r, self.relationships[r.index()].source)),
            );
        }
        if direction == Direction::Both {
            result.sort_by_key(|&(r, _)| r);
        }
        Ok(result)
    }

    /// Nodes with `label` satisfying `predicate`, ascending. Nodes missing the
    /// predicate key are excluded.
    pub fn find_nodes(&self, label: Label, predicate: Option<&Predicate>) -> Result<Vec<NodeId>> {
        let candidates = self.nodes_with_label(label);
        let Some(pred) = predicate else {
            return Ok(candidates.to_vec());
        };
        let mut found = Vec::new();
        for &id in candidates {
            if let Some(value) = self.nodes[id.index()].get(&pred.key) {
                if pred.op.holds(value.compare(&pred.value)?) {
                    found.push(id);
                }
            }
        }
        Ok(found)
    }

    /// Ids of the nodes adjacent via `rel_type` in `direction`, in relationship order.
    pub fn related(&self, node: NodeId, rel_type: RelType, direction: Direction) -> Vec<NodeId> {
        self.neighbors(node, Some(rel_type), direction)
            .map(|v| v.into_iter().map(|(_, n)| n).collect())
            .unwrap_or_default()
    }

    pub fn int_property(&self, node: NodeId, key: &str) -> Option<i64> {
        self.nodes.get(node.index())?.get(key)?.as_i64()
    }

    /// Full scan of every structural invariant: referential integrity, schema
    /// closure, and index coherence.
    pub fn check_integrity(&self) -> std::result::Result<(), String> {
        let rebuilt = Self::rebuild_indexes(&self.nodes, &self.relationships)?;
        if rebuilt.0 != self.outgoing || rebuilt.1 != self.incoming || rebuilt.2 != self.by_label {
            return Err("indexes diverge from collections".into());
        }
        let total_out: usize = self.outgoing.iter().map(Vec::len).sum();
        if total_out != self.relationships.len() {
            return Err("outgoing lists do not cover relationship set".into());
        }
        Ok(())
    }

    #[allow(clippy::type_complexity)]
    fn rebuild_indexes(
        nodes: &[Node],
        rels: &[Relationship],
    ) -> std::result::Result<(Vec<Vec<RelId>>, Vec<Vec<RelId>>, [Vec<NodeId>; 6]), String> {
        let mut out = vec![Vec::new(); nodes.len()];
        let mut inc = vec![Vec::new(); nodes.len()];
        let mut by_label: [Vec<NodeId>; 6] = Default::default();
        for (i, n) in nodes.iter().enumerate() {
            if n.id.index() != i {
                return Err(format!("node at position {i} has id {}", n.id));
            }
            by_label[n.label.slot()].push(n.id);
        }
        for r in rels {
            let (Some(s), Some(t)) = (nodes.get(r.source.index()), nodes.get(r.target.index()))
            else {
                return Err(format!("{} has a dangling endpoint", r.id));
            };
            if (s.label, t.label) != r.rel_type.endpoints() {
                return Err(format!("{} violates the {} schema", r.id, r.rel_type));
            }
            if r.rel_type == RelType::CITES && r.source == r.target {
                return Err(format!("{} is a CITES self-loop", r.id));
            }
            out[r.source.index()].push(r.id);
            inc[r.target.index()].push(r.id);
        }
        Ok((out, inc, by_label))
    }
}

fn check_finite(key: &str, value: &PropertyValue) -> Result<()> {
    match value {
        PropertyValue::Float(x) if !x.is_finite() => Err(GraphError::NonFiniteFloat(key.into())),
        _ => Ok(()),
    }
}
