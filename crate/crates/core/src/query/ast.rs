//! Query syntax tree. `Display` renders a canonical form that parses back to
//! the same tree.

use crate::graph::{CmpOp, PropertyValue};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub pattern: Pattern,
    pub filter: Option<Expr>,
    pub projections: Vec<Projection>,
}

/// A linear path: `nodes.len() == rels.len() + 1`, and `rels[i]` joins
/// `nodes[i]` to `nodes[i + 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub nodes: Vec<NodePattern>,
    pub rels: Vec<RelPattern>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodePattern {
    pub var: String,
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelDirection {
    /// `-[]->`
    Right,
    /// `<-[]-`
    Left,
    /// `-[]-`
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelPattern {
    pub var: Option<String>,
    pub rel_type: Option<String>,
    pub direction: RelDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Operand {
    Property { var: String, key: String },
    Literal(PropertyValue),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Or(Box<Expr>, Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Compare {
        lhs: Operand,
        op: CmpOp,
        rhs: Operand,
    },
    In {
        operand: Operand,
        list: Vec<PropertyValue>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    pub var: String,
    pub key: String,
}

impl Projection {
    pub fn column_name(&self) -> String {
        format!("{}.{}", self.var, self.key)
    }
}

pub(crate) fn write_literal(f: &mut fmt::Formatter<'_>, v: &PropertyValue) -> fmt::Result {
    match v {
        PropertyValue::Text(s) => {
            f.write_str("'")?;
            for c in s.chars() {
                match c {
                    '\'' => f.write_str("\\'")?,
                    '\\' => f.write_str("\\\\")?,
                    '\n' => f.write_str("\\n")?,
                    '\t' => f.write_str("\\t")?,
                    '\r' => f.write_str("\\r")?,
                    c => write!(f, "{c}")?,
                }
            }
            f.write_str("'")
        }
        PropertyValue::Float(x) => write!(f, "{x:?}"),
        other => write!(f, "{other}"),
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operand::Property { var, key } => write!(f, "{var}.{key}"),
            Operand::Literal(v) => write_literal(f, v),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Or(l, r) => write!(f, "({l} OR {r})"),
            Expr::And(l, r) => write!(f, "({l} AND {r})"),
            Expr::Not(e) => write!(f, "NOT ({e})"),
            Expr::Compare { lhs, op, rhs } => write!(f, "{lhs} {} {rhs}", op.symbol()),
            Expr::In { operand, list } => {
                write!(f, "{operand} IN [")?;
                for (i, v) in list.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write_literal(f, v)?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Display for NodePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.label {
            Some(l) => write!(f, "({}:{l})", self.var),
            None => write!(f, "({})", self.var),
        }
    }
}

impl fmt::Display for RelPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let inner = format!(
            "[{}{}]",
            self.var.as_deref().unwrap_or(""),
            self.rel_type
                .as_deref()
                .map(|t| format!(":{t}"))
                .unwrap_or_default()
        );
        match self.direction {
            RelDirection::Right => write!(f, "-{inner}->"),
            RelDirection::Left => write!(f, "<-{inner}-"),
            RelDirection::Undirected => write!(f, "-{inner}-"),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MATCH {}", self.pattern.nodes[0])?;
        for (rel, node) in self.pattern.rels.iter().zip(&self.pattern.nodes[1..]) {
            write!(f, "{rel}{node}")?;
        }
        if let Some(filter) = &self.filter {
            write!(f, " WHERE {filter}")?;
        }
        f.write_str(" RETURN ")?;
        for (i, p) in self.projections.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}.{}", p.var, p.key)?;
        }
        Ok(())
    }
}
