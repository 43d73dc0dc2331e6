use super::ast::{Expr, Operand, Query, RelDirection};
use super::QueryError;
use crate::graph::{Direction, Label, NodeId, PropertyGraph, PropertyValue, RelId, RelType};
use serde::Serialize;
use crate::similarity::normalize_text;
use std::collections::HashMap;
use std::str::FromStr;

/// Tabular query result. Rows are ordered by the node ids bound along the
/// path, then by relationship ids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<PropertyValue>>>,
    #[serde(skip)]
    pub warnings: Vec<String>,
}

impl ResultTable {
    fn empty(query: &Query, warnings: Vec<String>) -> Self {
        ResultTable {
            columns: query.projections.iter().map(|p| p.column_name()).collect(),
            rows: Vec::new(),
            warnings,
        }
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result tables always serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }

    fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::False, Truth::False) => Truth::False,
            _ => Truth::Unknown,
        }
    }
}

const NAME_KEY: &str = "name";

/// What a variable is bound to within one match.
#[derive(Debug, Clone, Copy)]
enum Slot {
    Node(usize),
    Rel,
}

struct Plan<'g> {
    graph: &'g PropertyGraph,
    labels: Vec<Option<Label>>,
    rel_types: Vec<Option<RelType>>,
    directions: Vec<Direction>,
    /// For node position i, the earlier position bound to the same variable.
    same_as: Vec<Option<usize>>,
}

pub fn evaluate(graph: &PropertyGraph, query: &Query) -> Result<ResultTable, QueryError> {
    if !graph.is_frozen() {
        return Err(QueryError::NotFrozen);
    }
    let mut warnings = Vec::new();
    let mut labels = Vec::new();
    for node in &query.pattern.nodes {
        match node.label.as_deref().map(Label::from_str).transpose() {
            Ok(l) => labels.push(l),
            Err(_) => warnings.push(format!(
                "unknown label '{}'; no rows can match",
                node.label.as_deref().unwrap_or_default()
            )),
        }
    }
    let mut rel_types = Vec::new();
    for rel in &query.pattern.rels {
        match rel.rel_type.as_deref().map(RelType::from_str).transpose() {
            Ok(t) => rel_types.push(t),
            Err(_) => warnings.push(format!(
                "unknown relationship type '{}'; no rows can match",
                rel.rel_type.as_deref().unwrap_or_default()
            )),
        }
    }
    if !warnings.is_empty() {
        for w in &warnings {
            log::warn!("{w}");
        }
        return Ok(ResultTable::empty(query, warnings));
    }

    let mut slots: HashMap<&str, Slot> = HashMap::new();
    let mut same_as = Vec::new();
    for (i, node) in query.pattern.nodes.iter().enumerate() {
        match slots.get(node.var.as_str()) {
            Some(Slot::Node(j)) => same_as.push(Some(*j)),
            _ => {
                slots.insert(&node.var, Slot::Node(i));
                same_as.push(None);
            }
        }
    }
    for rel in &query.pattern.rels {
        if let Some(var) = &rel.var {
            slots.insert(var, Slot::Rel);
        }
    }
    let directions = query
        .pattern
        .rels
        .iter()
        .map(|r| match r.direction {
            RelDirection::Right => Direction::Out,
            RelDirection::Left => Direction::In,
            RelDirection::Undirected => Direction::Both,
        })
        .collect();
    let plan = Plan {
        graph,
        labels,
        rel_types,
        directions,
        same_as,
    };

    let mut matches: Vec<(Vec<NodeId>, Vec<RelId>)> = Vec::new();
    let starts: Vec<NodeId> = match plan.labels[0] {
        Some(l) => graph.nodes_with_label(l).to_vec(),
        None => graph.nodes().iter().map(|n| n.id).collect(),
    };
    let mut nodes = Vec::with_capacity(plan.labels.len());
    let mut rels = Vec::with_capacity(plan.rel_types.len());
    for start in starts {
        nodes.push(start);
        plan.extend(&mut nodes, &mut rels, &mut matches);
        nodes.pop();
    }
    matches.sort();

    let lookup = |var: &str, key: &str, nodes: &[NodeId]| -> Option<PropertyValue> {
        match slots.get(var)? {
            Slot::Node(i) => graph.node(nodes[*i]).ok()?.get(key).cloned(),
            // Relationships carry no properties.
            Slot::Rel => None,
        }
    };

    let filter = query.filter.as_ref().map(normalize_name_literals);
    let mut table = ResultTable::empty(query, warnings);
    for (nodes, _) in &matches {
        if let Some(filter) = &filter {
            if eval_expr(filter, &|v, k| lookup(v, k, nodes))? != Truth::True {
                continue;
            }
        }
        table.rows.push(
            query
                .projections
                .iter()
                .map(|p| lookup(&p.var, &p.key, nodes))
                .collect(),
        );
    }
    Ok(table)
}

impl Plan<'_> {
    fn extend(
        &self,
        nodes: &mut Vec<NodeId>,
        rels: &mut Vec<RelId>,
        out: &mut Vec<(Vec<NodeId>, Vec<RelId>)>,
    ) {
        let depth = rels.len();
        if depth == self.rel_types.len() {
            out.push((nodes.clone(), rels.clone()));
            return;
        }
        let from = nodes[depth];
        let mut adjacent = self
            .graph
            .neighbors(from, self.rel_types[depth], self.directions[depth])
            .expect("bound nodes exist");
        // A self-loop appears in both adjacency lists; match it once.
        adjacent.dedup_by_key(|(r, _)| *r);
        let next = depth + 1;
        for (rel, to) in adjacent {
            if rels.contains(&rel) {
                continue;
            }
            if let Some(label) = self.labels[next] {
                if self.graph.node(to).map(|n| n.label) != Ok(label) {
                    continue;
                }
            }
            if let Some(j) = self.same_as[next] {
                if nodes[j] != to {
                    continue;
                }
            }
            nodes.push(to);
            rels.push(rel);
            self.extend(nodes, rels, out);
            rels.pop();
            nodes.pop();
        }
    }
}

fn is_name(op: &Operand) -> bool {
    matches!(op, Operand::Property { key, .. } if key == NAME_KEY)
}

fn normalize_literal(value: &PropertyValue) -> PropertyValue {
    match value {
        PropertyValue::Text(s) => PropertyValue::Text(normalize_text(s)),
        other => other.clone(),
    }
}

/// Names are stored normalized, so text literals compared against `name`
/// are normalized the same way: `Journal.name = 'Neurocomputing'` matches.
fn normalize_name_literals(expr: &Expr) -> Expr {
    let recurse = |e: &Expr| Box::new(normalize_name_literals(e));
    match expr {
        Expr::Or(l, r) => Expr::Or(recurse(l), recurse(r)),
        Expr::And(l, r) => Expr::And(recurse(l), recurse(r)),
        Expr::Not(e) => Expr::Not(recurse(e)),
        Expr::Compare { lhs, op, rhs } => {
            let fix = |this: &Operand, other: &Operand| match this {
                Operand::Literal(v) if is_name(other) => Operand::Literal(normalize_literal(v)),
                _ => this.clone(),
            };
            Expr::Compare {
                lhs: fix(lhs, rhs),
                op: *op,
                rhs: fix(rhs, lhs),
            }
        }
        Expr::In { operand, list } => Expr::In {
            operand: operand.clone(),
            list: if is_name(operand) {
                list.iter().map(normalize_literal).collect()
            } else {
                list.clone()
            },
        },
    }
}

fn operand_value<F>(op: &Operand, lookup: &F) -> Option<PropertyValue>
where
    F: Fn(&str, &str) -> Option<PropertyValue>,
{
    match op {
        Operand::Property { var, key } => lookup(var, key),
        Operand::Literal(v) => Some(v.clone()),
    }
}

fn compare(a: &PropertyValue, b: &PropertyValue) -> Result<std::cmp::Ordering, QueryError> {
    a.compare(b).map_err(|e| QueryError::TypeMismatch(e.to_string()))
}

fn eval_expr<F>(expr: &Expr, lookup: &F) -> Result<Truth, QueryError>
where
    F: Fn(&str, &str) -> Option<PropertyValue>,
{
    Ok(match expr {
        Expr::Or(l, r) => eval_expr(l, lookup)?.or(eval_expr(r, lookup)?),
        Expr::And(l, r) => eval_expr(l, lookup)?.and(eval_expr(r, lookup)?),
        Expr::Not(e) => eval_expr(e, lookup)?.not(),
        Expr::Compare { lhs, op, rhs } => {
            match (operand_value(lhs, lookup), operand_value(rhs, lookup)) {
                (Some(a), Some(b)) => {
                    if op.holds(compare(&a, &b)?) {
                        Truth::True
                    } else {
                        Truth::False
                    }
                }
                _ => Truth::Unknown,
            }
        }
        Expr::In { operand, list } => match operand_value(operand, lookup) {
            None => Truth::Unknown,
            Some(v) => {
                let mut found = false;
                for item in list {
                    found |= compare(&v, item)?.is_eq();
                }
                if found {
                    Truth::True
                } else {
                    Truth::False
                }
            }
        },
    })
}
