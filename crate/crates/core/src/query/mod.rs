//! A small Cypher-style pattern query language over [`PropertyGraph`].
//!
//! Queries match a linear path of node and relationship patterns, filter with
//! an optional `WHERE` clause and project `var.property` columns:
//!
//! ```text
//! MATCH (Journal)-[:PUBLISHED_IN]-(Article)
//! WHERE Journal.name IN ['neurocomputing']
//! RETURN Article.year, Journal.name
//! ```
//!
//! A bare variable spelled exactly like a label (`(Journal)`) also constrains
//! the node to that label. See [`parser`] for the grammar.

pub mod ast;
mod eval;
pub mod lexer;
pub mod parser;

pub use ast::Query;
pub use eval::{evaluate, ResultTable};
pub use parser::parse;

use crate::graph::PropertyGraph;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("syntax error at {line}:{column}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        found: String,
        expected: String,
    },
    #[error("undeclared variable '{name}' at {line}:{column}")]
    UndeclaredVariable {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("variable '{name}' at {line}:{column} is already bound to another pattern element")]
    VariableConflict {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("type mismatch in WHERE: {0}")]
    TypeMismatch(String),
    #[error("queries require a frozen graph")]
    NotFrozen,
}

impl QueryError {
    /// True for errors in the query text itself.
    pub fn is_syntax(&self) -> bool {
        matches!(
            self,
            QueryError::Syntax { .. }
                | QueryError::UndeclaredVariable { .. }
                | QueryError::VariableConflict { .. }
        )
    }
}

/// Parses and evaluates `text`.
pub fn run(graph: &PropertyGraph, text: &str) -> Result<ResultTable, QueryError> {
    evaluate(graph, &parse(text)?)
}
