//! Recursive-descent parser.
//!
//! ```text
//! query    := "MATCH" pattern ["WHERE" expr] "RETURN" proj {"," proj}
//! pattern  := nodepat { relpat nodepat }
//! nodepat  := "(" IDENT [":" IDENT] ")"
//! relpat   := "-" "[" [IDENT] [":" IDENT] "]" "-" [">"]
//!           | "<-" "[" [IDENT] [":" IDENT] "]" "-"
//! expr     := term {"OR" term}
//! term     := factor {"AND" factor}
//! factor   := "NOT" factor | "(" expr ")" | cmp
//! cmp      := operand (cmpop operand | "IN" "[" literal {"," literal} "]")
//! operand  := IDENT "." IDENT | literal
//! proj     := IDENT "." IDENT
//! literal  := STRING | ["-"] INT | ["-"] FLOAT | "true" | "false"
//! ```

use super::ast::*;
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use super::QueryError;
use crate::graph::{CmpOp, Label, PropertyValue};
use std::collections::HashSet;
use std::str::FromStr;

pub fn parse(text: &str) -> Result<Query, QueryError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        at: 0,
        node_vars: HashSet::new(),
        rel_vars: HashSet::new(),
    };
    parser.query()
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
    node_vars: HashSet<String>,
    rel_vars: HashSet<String>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.at].clone();
        if self.at + 1 < self.tokens.len() {
            self.at += 1;
        }
        tok
    }

    fn error(&self, expected: &str) -> QueryError {
        let tok = self.peek();
        QueryError::Syntax {
            line: tok.pos.line,
            column: tok.pos.column,
            found: tok.describe(),
            expected: expected.to_string(),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, QueryError> {
        if *self.peek_kind() == kind {
            Ok(self.advance())
        } else {
            Err(self.error(what))
        }
    }

    fn keyword(&mut self, kw: Keyword) -> bool {
        if *self.peek_kind() == TokenKind::Keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Token), QueryError> {
        match self.peek_kind() {
            TokenKind::Ident(name) => {
                let name = name.clone();
                Ok((name, self.advance()))
            }
            _ => Err(self.error(what)),
        }
    }

    fn query(&mut self) -> Result<Query, QueryError> {
        if !self.keyword(Keyword::Match) {
            return Err(self.error("MATCH"));
        }
        let pattern = self.pattern()?;
        let filter = if self.keyword(Keyword::Where) {
            Some(self.expr()?)
        } else {
            None
        };
        if !self.keyword(Keyword::Return) {
            return Err(self.error(if filter.is_some() {
                "RETURN"
            } else {
                "a relationship pattern, WHERE or RETURN"
            }));
        }
        let mut projections = vec![self.projection()?];
        while *self.peek_kind() == TokenKind::Comma {
            self.advance();
            projections.push(self.projection()?);
        }
        if *self.peek_kind() != TokenKind::Eof {
            return Err(self.error("',' or end of input"));
        }
        Ok(Query {
            pattern,
            filter,
            projections,
        })
    }

    fn pattern(&mut self) -> Result<Pattern, QueryError> {
        let mut nodes = vec![self.node_pattern()?];
        let mut rels = Vec::new();
        while matches!(self.peek_kind(), TokenKind::Dash | TokenKind::Lt) {
            rels.push(self.rel_pattern()?);
            nodes.push(self.node_pattern()?);
        }
        Ok(Pattern { nodes, rels })
    }

    fn node_pattern(&mut self) -> Result<NodePattern, QueryError> {
        self.expect(TokenKind::LParen, "'('")?;
        let (var, var_tok) = self.ident("a node variable")?;
        if self.rel_vars.contains(&var) {
            return Err(conflict(&var, &var_tok));
        }
        let label = if *self.peek_kind() == TokenKind::Colon {
            self.advance();
            Some(self.ident("a label")?.0)
        } else if Label::from_str(&var).is_ok() {
            // `(Journal)` names the variable and constrains the label.
            Some(var.clone())
        } else {
            None
        };
        self.expect(TokenKind::RParen, "')'")?;
        self.node_vars.insert(var.clone());
        Ok(NodePattern { var, label })
    }

    fn rel_pattern(&mut self) -> Result<RelPattern, QueryError> {
        let left = if *self.peek_kind() == TokenKind::Lt {
            let lt = self.advance();
            let dash = self.peek().clone();
            if dash.kind != TokenKind::Dash || dash.pos.offset != lt.pos.offset + 1 {
                return Err(self.error("'-' immediately after '<'"));
            }
            self.advance();
            true
        } else {
            self.expect(TokenKind::Dash, "'-'")?;
            false
        };
        self.expect(TokenKind::LBracket, "'['")?;
        let var = match self.peek_kind() {
            TokenKind::Ident(_) => {
                let (name, tok) = self.ident("a relationship variable")?;
                if self.node_vars.contains(&name) || self.rel_vars.contains(&name) {
                    return Err(conflict(&name, &tok));
                }
                self.rel_vars.insert(name.clone());
                Some(name)
            }
            _ => None,
        };
        let rel_type = if *self.peek_kind() == TokenKind::Colon {
            self.advance();
            Some(self.ident("a relationship type")?.0)
        } else {
            None
        };
        self.expect(TokenKind::RBracket, "']'")?;
        self.expect(TokenKind::Dash, "'-'")?;
        let direction = if left {
            RelDirection::Left
        } else if *self.peek_kind() == TokenKind::Gt {
            self.advance();
            RelDirection::Right
        } else {
            RelDirection::Undirected
        };
        Ok(RelPattern {
            var,
            rel_type,
            direction,
        })
    }

    fn expr(&mut self) -> Result<Expr, QueryError> {
        let mut lhs = self.term()?;
        while self.keyword(Keyword::Or) {
            lhs = Expr::Or(Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, QueryError> {
        let mut lhs = self.factor()?;
        while self.keyword(Keyword::And) {
            lhs = Expr::And(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, QueryError> {
        if self.keyword(Keyword::Not) {
            return Ok(Expr::Not(Box::new(self.factor()?)));
        }
        if *self.peek_kind() == TokenKind::LParen {
            self.advance();
            let inner = self.expr()?;
            self.expect(TokenKind::RParen, "')'")?;
            return Ok(inner);
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, QueryError> {
        let lhs = self.operand()?;
        let op = match self.peek_kind() {
            TokenKind::Eq => CmpOp::Eq,
            TokenKind::Ne => CmpOp::Ne,
            TokenKind::Lt => CmpOp::Lt,
            TokenKind::Le => CmpOp::Le,
            TokenKind::Gt => CmpOp::Gt,
            TokenKind::Ge => CmpOp::Ge,
            TokenKind::Keyword(Keyword::In) => {
                self.advance();
                self.expect(TokenKind::LBracket, "'['")?;
                let mut list = vec![self.literal()?];
                while *self.peek_kind() == TokenKind::Comma {
                    self.advance();
                    list.push(self.literal()?);
                }
                self.expect(TokenKind::RBracket, "',' or ']'")?;
                return Ok(Expr::In { operand: lhs, list });
            }
            _ => return Err(self.error("a comparison operator or IN")),
        };
        self.advance();
        let rhs = self.operand()?;
        Ok(Expr::Compare { lhs, op, rhs })
    }

    fn operand(&mut self) -> Result<Operand, QueryError> {
        if let TokenKind::Ident(_) = self.peek_kind() {
            let (var, key) = self.property_ref()?;
            Ok(Operand::Property { var, key })
        } else {
            Ok(Operand::Literal(self.literal()?))
        }
    }

    fn projection(&mut self) -> Result<Projection, QueryError> {
        let (var, key) = self.property_ref()?;
        Ok(Projection { var, key })
    }

    fn property_ref(&mut self) -> Result<(String, String), QueryError> {
        let (var, tok) = self.ident("a variable")?;
        if !self.node_vars.contains(&var) && !self.rel_vars.contains(&var) {
            return Err(QueryError::UndeclaredVariable {
                name: var,
                line: tok.pos.line,
                column: tok.pos.column,
            });
        }
        self.expect(TokenKind::Dot, "'.'")?;
        let (key, _) = self.ident("a property name")?;
        Ok((var, key))
    }

    fn literal(&mut self) -> Result<PropertyValue, QueryError> {
        let negative = *self.peek_kind() == TokenKind::Dash;
        if negative {
            self.advance();
        }
        let value = match self.peek_kind().clone() {
            TokenKind::Int(n) => {
                let v = if negative {
                    0i64.checked_sub_unsigned(n)
                } else {
                    i64::try_from(n).ok()
                };
                v.map(PropertyValue::Int)
                    .ok_or_else(|| self.error("an integer within 64-bit range"))?
            }
            TokenKind::Float(x) => PropertyValue::Float(if negative { -x } else { x }),
            TokenKind::Str(s) if !negative => PropertyValue::Text(s),
            TokenKind::Keyword(Keyword::True) if !negative => PropertyValue::Bool(true),
            TokenKind::Keyword(Keyword::False) if !negative => PropertyValue::Bool(false),
            _ => {
                return Err(self.error(if negative { "a number" } else { "a literal" }));
            }
        };
        self.advance();
        Ok(value)
    }
}

fn conflict(name: &str, tok: &Token) -> QueryError {
    QueryError::VariableConflict {
        name: name.to_string(),
        line: tok.pos.line,
        column: tok.pos.column,
    }
}
