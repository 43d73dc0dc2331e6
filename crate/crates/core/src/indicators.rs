//! Scholastic indicators computed over the article graph.
//!
//! * author-level self-citations: inbound citations whose citing article shares
//!   an author name (cosine-matched) with the cited article;
//! * journal-level self-citations: citations between two articles of the same
//!   journal;
//! * x1 other-citations quotient, x2 international collaboration, x3 SNIP
//!   (passed through), x4 non-local influence quotient.
//!
//! Quotients over zero citations are defined as 1.

use crate::graph::{Direction, GraphError, Label, NodeId, PropertyGraph, RelType};
use crate::internationality::{InputVector, ScoreError};
use crate::similarity::{normalize_text, tokenize, InvalidThreshold, Threshold, TokenMultiset};
use serde::Serialize;
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndicatorError {
    #[error("node {0} is not an Article")]
    NotAnArticle(NodeId),
    #[error("node {0} is not a Journal")]
    NotAJournal(NodeId),
    #[error("journal {0} has no articles")]
    NoArticles(NodeId),
    #[error("self-citations ({self_cites}) exceed total citations ({total_cites})")]
    SelfExceedsTotal { self_cites: u64, total_cites: u64 },
    #[error("SNIP must be non-negative and finite, got {0}")]
    InvalidSnip(f64),
    #[error(transparent)]
    Threshold(#[from] InvalidThreshold),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub type Result<T, E = IndicatorError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JournalIndicators {
    pub journal: NodeId,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
    pub total_cites: u64,
    pub self_cites_author_level: u64,
    pub self_cites_journal_level: u64,
}

impl JournalIndicators {
    pub fn inputs(&self) -> [f64; 4] {
        [self.x1, self.x2, self.x3, self.x4]
    }

    pub fn input_vector(&self) -> Result<InputVector, ScoreError> {
        InputVector::new(self.inputs().to_vec())
    }
}

fn expect_label(graph: &PropertyGraph, id: NodeId, label: Label) -> Result<()> {
    let node = graph.node(id)?;
    if node.label == label {
        Ok(())
    } else if label == Label::Article {
        Err(IndicatorError::NotAnArticle(id))
    } else {
        Err(IndicatorError::NotAJournal(id))
    }
}

pub fn authors_of(graph: &PropertyGraph, article: NodeId) -> Vec<NodeId> {
    graph.related(article, RelType::AUTHORED, Direction::In)
}

pub fn articles_of(graph: &PropertyGraph, journal: NodeId) -> Vec<NodeId> {
    graph.related(journal, RelType::PUBLISHED_IN, Direction::In)
}

pub fn citers_of(graph: &PropertyGraph, article: NodeId) -> Vec<NodeId> {
    graph.related(article, RelType::CITES, Direction::In)
}

/// Caches author-name token vectors so repeated self-citation checks do not
/// re-tokenize.
#[derive(Debug)]
pub struct AuthorMatcher<'g> {
    graph: &'g PropertyGraph,
    threshold: f64,
    tokens: HashMap<NodeId, TokenMultiset>,
}

impl<'g> AuthorMatcher<'g> {
    pub fn new(graph: &'g PropertyGraph, threshold: f64) -> Result<Self> {
        let threshold = Threshold::new(threshold)?.get();
        Ok(AuthorMatcher {
            graph,
            threshold,
            tokens: HashMap::new(),
        })
    }

    fn tokens(&mut self, author: NodeId) -> &TokenMultiset {
        let graph = self.graph;
        self.tokens.entry(author).or_insert_with(|| {
            let name = graph.node(author).map(|n| n.name()).unwrap_or_default();
            tokenize(&normalize_text(name))
        })
    }

    fn same(&mut self, a: NodeId, b: NodeId) -> bool {
        if a == b {
            return true;
        }
        let ta = self.tokens(a).clone();
        ta.cosine(self.tokens(b)) >= self.threshold
    }

    fn shares_author(&mut self, x: &[NodeId], y: &[NodeId]) -> bool {
        x.iter().any(|&a| y.iter().any(|&b| self.same(a, b)))
    }

    pub fn article_self_citations(&mut self, article: NodeId) -> Result<u64> {
        expect_label(self.graph, article, Label::Article)?;
        let cited_authors = authors_of(self.graph, article);
        let mut count = 0;
        for citer in citers_of(self.graph, article) {
            let citing_authors = authors_of(self.graph, citer);
            if self.shares_author(&citing_authors, &cited_authors) {
                count += 1;
            }
        }
        Ok(count)
    }
}

pub fn article_self_citations(
    graph: &PropertyGraph,
    article: NodeId,
    author_threshold: f64,
) -> Result<u64> {
    AuthorMatcher::new(graph, author_threshold)?.article_self_citations(article)
}

pub fn journal_self_citations(graph: &PropertyGraph, journal: NodeId) -> Result<u64> {
    expect_label(graph, journal, Label::Journal)?;
    let mut count = 0;
    for article in articles_of(graph, journal) {
        for citer in citers_of(graph, article) {
            if graph
                .related(citer, RelType::PUBLISHED_IN, Direction::Out)
                .contains(&journal)
            {
                count += 1;
            }
        }
    }
    Ok(count)
}

fn quotient(self_cites: u64, total_cites: u64) -> Result<f64> {
    if self_cites > total_cites {
        return Err(IndicatorError::SelfExceedsTotal {
            self_cites,
            total_cites,
        });
    }
    if total_cites == 0 {
        return Ok(1.0);
    }
    Ok(1.0 - self_cites as f64 / total_cites as f64)
}

/// x1 = 1 − self/total.
pub fn other_citation_quotient(self_cites: u64, total_cites: u64) -> Result<f64> {
    quotient(self_cites, total_cites)
}

/// x4 = 1 − journal self/total.
pub fn nonlocal_influence_quotient(journal_self_cites: u64, total_cites: u64) -> Result<f64> {
    quotient(journal_self_cites, total_cites)
}

/// Countries reached from an article via its authors' institutes.
pub fn article_countries(graph: &PropertyGraph, article: NodeId) -> BTreeSet<NodeId> {
    authors_of(graph, article)
        .into_iter()
        .flat_map(|author| graph.related(author, RelType::WORKS_FOR, Direction::Out))
        .flat_map(|inst| graph.related(inst, RelType::IS_IN, Direction::Out))
        .collect()
}

/// x2: fraction of the journal's articles whose authors span two or more countries.
pub fn international_collaboration(graph: &PropertyGraph, journal: NodeId) -> Result<f64> {
    expect_label(graph, journal, Label::Journal)?;
    let articles = articles_of(graph, journal);
    if articles.is_empty() {
        return Err(IndicatorError::NoArticles(journal));
    }
    let multi = articles
        .iter()
        .filter(|&&a| article_countries(graph, a).len() >= 2)
        .count();
    Ok(multi as f64 / articles.len() as f64)
}

/// Inbound CITES degree, or the annotated `totalcites` if present.
pub fn article_total_cites(graph: &PropertyGraph, article: NodeId) -> u64 {
    graph
        .int_property(article, "totalcites")
        .map(|v| v.max(0) as u64)
        .unwrap_or_else(|| citers_of(graph, article).len() as u64)
}

pub fn journal_indicators(
    graph: &PropertyGraph,
    journal: NodeId,
    snip: f64,
    author_threshold: f64,
) -> Result<JournalIndicators> {
    expect_label(graph, journal, Label::Journal)?;
    if !(snip.is_finite() && snip >= 0.0) {
        return Err(IndicatorError::InvalidSnip(snip));
    }
    let mut matcher = AuthorMatcher::new(graph, author_threshold)?;
    let articles = articles_of(graph, journal);
    let mut total_cites = 0;
    let mut self_author = 0;
    for &article in &articles {
        // An ingested count may exceed resolved citations, never the reverse.
        total_cites += article_total_cites(graph, article).max(citers_of(graph, article).len() as u64);
        self_author += matcher.article_self_citations(article)?;
    }
    let self_journal = journal_self_citations(graph, journal)?;
    Ok(JournalIndicators {
        journal,
        x1: other_citation_quotient(self_author, total_cites)?,
        x2: international_collaboration(graph, journal)?,
        x3: snip,
        x4: nonlocal_influence_quotient(self_journal, total_cites)?,
        total_cites,
        self_cites_author_level: self_author,
        self_cites_journal_level: self_journal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::props;

    struct Fixture {
        g: PropertyGraph,
        journal: NodeId,
        articles: Vec<NodeId>,
    }

    fn node(g: &mut PropertyGraph, label: Label, name: &str) -> NodeId {
        g.create_node(label, props([("name", name)])).unwrap()
    }

    fn article(g: &mut PropertyGraph, journal: NodeId, name: &str, authors: &[NodeId]) -> NodeId {
        let a = node(g, Label::Article, name);
        g.create_relationship(RelType::PUBLISHED_IN, a, journal).unwrap();
        for &au in authors {
            g.create_relationship(RelType::AUTHORED, au, a).unwrap();
        }
        a
    }

    /// J holds A1 (authors X, Y) and A2; C1 (author X) and C2 (author Z) sit in K.
    /// A2 → A1, C1 → A1, C2 → A1.
    fn citation_fixture() -> Fixture {
        let mut g = PropertyGraph::new();
        let j = node(&mut g, Label::Journal, "j");
        let k = node(&mut g, Label::Journal, "k");
        let x = node(&mut g, Label::Author, "xavier quinn");
        let y = node(&mut g, Label::Author, "yolanda park");
        let z = node(&mut g, Label::Author, "zed morrow");
        let w = node(&mut g, Label::Author, "walter bishop");
        let a1 = article(&mut g, j, "a1", &[x, y]);
        let a2 = article(&mut g, j, "a2", &[w]);
        let c1 = article(&mut g, k, "c1", &[x]);
        let c2 = article(&mut g, k, "c2", &[z]);
        for citer in [a2, c1, c2] {
            g.create_relationship(RelType::CITES, citer, a1).unwrap();
        }
        g.freeze();
        Fixture {
            g,
            journal: j,
            articles: vec![a1, a2, c1, c2],
        }
    }

    #[test]
    fn author_self_citations() {
        let f = citation_fixture();
        let [a1, a2, c1, _] = f.articles[..] else { unreachable!() };
        assert_eq!(article_self_citations(&f.g, a1, 0.75).unwrap(), 1);
        assert_eq!(article_self_citations(&f.g, a2, 0.75).unwrap(), 0);
        assert_eq!(
            article_self_citations(&f.g, f.journal, 0.75),
            Err(IndicatorError::NotAnArticle(f.journal))
        );
        assert!(matches!(
            article_self_citations(&f.g, c1, 0.0),
            Err(IndicatorError::Threshold(_))
        ));
    }

    #[test]
    fn every_citer_shares_an_author() {
        let mut g = PropertyGraph::new();
        let j = node(&mut g, Label::Journal, "j");
        let x = node(&mut g, Label::Author, "x");
        let cited = article(&mut g, j, "cited", &[x]);
        for i in 0..4 {
            let c = article(&mut g, j, &format!("c{i}"), &[x]);
            g.create_relationship(RelType::CITES, c, cited).unwrap();
        }
        assert_eq!(article_self_citations(&g, cited, 0.75).unwrap(), 4);
        assert_eq!(journal_self_citations(&g, j).unwrap(), 4);
    }

    #[test]
    fn journal_level_self_citations() {
        let f = citation_fixture();
        assert_eq!(journal_self_citations(&f.g, f.journal).unwrap(), 1);
        assert_eq!(
            journal_self_citations(&f.g, f.articles[0]),
            Err(IndicatorError::NotAJournal(f.articles[0]))
        );
        let mut g = PropertyGraph::new();
        let j = node(&mut g, Label::Journal, "quiet");
        let x = node(&mut g, Label::Author, "x");
        article(&mut g, j, "a", &[x]);
        assert_eq!(journal_self_citations(&g, j).unwrap(), 0);
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(other_citation_quotient(10, 40).unwrap(), 0.75);
        assert_eq!(other_citation_quotient(0, 0).unwrap(), 1.0);
        assert_eq!(other_citation_quotient(7, 7).unwrap(), 0.0);
        assert_eq!(
            other_citation_quotient(3, 2),
            Err(IndicatorError::SelfExceedsTotal {
                self_cites: 3,
                total_cites: 2
            })
        );
        assert_eq!(nonlocal_influence_quotient(1, 2).unwrap(), 0.5);
        assert_eq!(nonlocal_influence_quotient(0, 5).unwrap(), 1.0);
        assert_eq!(nonlocal_influence_quotient(0, 0).unwrap(), 1.0);
    }

    fn collaboration_fixture(multi: usize, single: usize) -> (PropertyGraph, NodeId) {
        let mut g = PropertyGraph::new();
        let j = node(&mut g, Label::Journal, "j");
        let india = node(&mut g, Label::Country, "india");
        let canada = node(&mut g, Label::Country, "canada");
        let pes = node(&mut g, Label::Institute, "pes");
        let ucal = node(&mut g, Label::Institute, "calgary");
        g.create_relationship(RelType::IS_IN, pes, india).unwrap();
        g.create_relationship(RelType::IS_IN, ucal, canada).unwrap();
        let a = node(&mut g, Label::Author, "a");
        let b = node(&mut g, Label::Author, "b");
        g.create_relationship(RelType::WORKS_FOR, a, pes).unwrap();
        g.create_relationship(RelType::WORKS_FOR, b, ucal).unwrap();
        for i in 0..multi {
            article(&mut g, j, &format!("m{i}"), &[a, b]);
        }
        for i in 0..single {
            article(&mut g, j, &format!("s{i}"), &[a]);
        }
        (g, j)
    }

    #[test]
    fn collaboration_ratio() {
        let (g, j) = collaboration_fixture(2, 2);
        assert_eq!(international_collaboration(&g, j).unwrap(), 0.5);
        let (g, j) = collaboration_fixture(0, 3);
        assert_eq!(international_collaboration(&g, j).unwrap(), 0.0);
        let (g, j) = collaboration_fixture(3, 0);
        assert_eq!(international_collaboration(&g, j).unwrap(), 1.0);
        let mut g = PropertyGraph::new();
        let j = node(&mut g, Label::Journal, "empty");
        assert_eq!(
            international_collaboration(&g, j),
            Err(IndicatorError::NoArticles(j))
        );
    }

    #[test]
    fn indicators_composition() {
        let f = citation_fixture();
        let ind = journal_indicators(&f.g, f.journal, 1.3, 0.75).unwrap();
        assert_eq!(ind.total_cites, 3);
        assert_eq!(ind.self_cites_author_level, 1);
        assert_eq!(ind.self_cites_journal_level, 1);
        assert!((ind.x1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(ind.x2, 0.0);
        assert_eq!(ind.x3, 1.3);
        assert!((ind.x4 - 2.0 / 3.0).abs() < 1e-15);

        let (g, j) = collaboration_fixture(0, 1);
        let ind = journal_indicators(&g, j, 1.0, 0.75).unwrap();
        assert_eq!(ind.inputs(), [1.0, 0.0, 1.0, 1.0]);
        let ind = journal_indicators(&g, j, 0.0, 0.75).unwrap();
        assert_eq!(ind.x3, 0.0);
        assert_eq!(
            journal_indicators(&g, j, -1.0, 0.75),
            Err(IndicatorError::InvalidSnip(-1.0))
        );
    }
}
