//! Random graph generators and brute-force oracles shared by the integration
//! tests. Nothing here calls into the code under test except to build graphs.

#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scigraph::graph::{props, Label, NodeId, PropertyGraph, PropertyValue, RelType};
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture readable")
}

pub const QUERY1: &str = "MATCH (Journal)-[:PUBLISHED_IN]-(Article) WHERE Journal.name IN ['Applied Soft Computing', 'Neurocomputing', 'Genetic Programming and Evolvable Machines'] RETURN Article.year, Journal.name";
pub const QUERY2: &str = "MATCH (n:Article) RETURN n.totalcites, n.selfcites";
pub const QUERY3: &str =
    "MATCH (Author)-[r:WORKS_FOR]->(Institute)-[s:IS_IN]->(Country) RETURN Author.name, Country.name";

// ---------------------------------------------------------------------------
// Cosine oracle: bigram counts by direct enumeration over lowercase ASCII.

pub fn oracle_bigrams(s: &str) -> BTreeMap<String, u32> {
    let mut m = BTreeMap::new();
    for word in s.split(' ').filter(|w| !w.is_empty()) {
        let b = word.as_bytes();
        if b.len() == 1 {
            *m.entry(word.to_string()).or_insert(0) += 1;
        }
        for i in 0..b.len().saturating_sub(1) {
            *m.entry(word[i..i + 2].to_string()).or_insert(0) += 1;
        }
    }
    m
}

pub fn oracle_cosine(a: &str, b: &str) -> f64 {
    let (x, y) = (oracle_bigrams(a), oracle_bigrams(b));
    if x.is_empty() && y.is_empty() {
        return 1.0;
    }
    if x.is_empty() || y.is_empty() {
        return 0.0;
    }
    let mut dot = 0u64;
    for (k, v) in &x {
        dot += u64::from(*v) * u64::from(*y.get(k).unwrap_or(&0));
    }
    let sq = |m: &BTreeMap<String, u32>| m.values().map(|&v| u64::from(v * v)).sum::<u64>();
    (dot as f64 / ((sq(&x) * sq(&y)) as f64).sqrt()).min(1.0)
}

// ---------------------------------------------------------------------------
// Self-citation graphs.

const NAME_POOL: &[&str] = &[
    "meera iyer",
    "meera iyer",
    "m iyer",
    "meera iyers",
    "tomas lindqvist",
    "t lindqvist",
    "ana pereira",
    "anna pereira",
    "kenji watanabe",
    "grace okafor",
    "priya raghavan",
    "priya raghavan a",
];

pub struct CitationGraph {
    pub graph: PropertyGraph,
    pub journals: Vec<NodeId>,
    pub articles: Vec<NodeId>,
    /// article index → author names
    pub article_authors: Vec<Vec<String>>,
    /// article index → journal index
    pub article_journal: Vec<usize>,
    /// (citing article index, cited article index)
    pub cites: Vec<(usize, usize)>,
}

/// Random graph with ≤ 50 articles, ≤ 8 authors and ≤ 200 distinct CITES pairs.
pub fn random_citation_graph(rng: &mut impl Rng) -> CitationGraph {
    let mut g = PropertyGraph::new();
    let journals: Vec<NodeId> = (0..rng.gen_range(1..=3))
        .map(|i| g.create_node(Label::Journal, props([("name", format!("journal {i}"))])).unwrap())
        .collect();
    let n_authors = rng.gen_range(1..=8);
    let names: Vec<String> = (0..n_authors)
        .map(|_| NAME_POOL.choose(rng).unwrap().to_string())
        .collect();
    let authors: Vec<NodeId> = names
        .iter()
        .map(|n| g.create_node(Label::Author, props([("name", n.as_str())])).unwrap())
        .collect();
    let n_articles = rng.gen_range(1..=50);
    let mut articles = Vec::new();
    let mut article_authors = Vec::new();
    let mut article_journal = Vec::new();
    for i in 0..n_articles {
        let a = g.create_node(Label::Article, props([("name", format!("article {i}"))])).unwrap();
        let j = rng.gen_range(0..journals.len());
        g.create_relationship(RelType::PUBLISHED_IN, a, journals[j]).unwrap();
        let k = rng.gen_range(0..=3.min(n_authors));
        let mut chosen: Vec<usize> = (0..n_authors).collect();
        chosen.shuffle(rng);
        chosen.truncate(k);
        chosen.sort();
        for &au in &chosen {
            g.create_relationship(RelType::AUTHORED, authors[au], a).unwrap();
        }
        articles.push(a);
        article_journal.push(j);
        article_authors.push(chosen.iter().map(|&au| names[au].clone()).collect());
    }
    let mut pairs = BTreeSet::new();
    if n_articles > 1 {
        let target = rng.gen_range(0..=200);
        for _ in 0..target {
            let s = rng.gen_range(0..n_articles);
            let t = rng.gen_range(0..n_articles);
            if s != t {
                pairs.insert((s, t));
            }
        }
    }
    let mut cites: Vec<(usize, usize)> = pairs.into_iter().collect();
    cites.shuffle(rng);
    for &(s, t) in &cites {
        g.create_relationship(RelType::CITES, articles[s], articles[t]).unwrap();
    }
    g.freeze();
    CitationGraph {
        graph: g,
        journals,
        articles,
        article_authors,
        article_journal,
        cites,
    }
}

/// Citations of article `t` whose citing article shares an author name at
/// cosine ≥ `threshold`.
pub fn brute_article_self_citations(cg: &CitationGraph, t: usize, threshold: f64) -> u64 {
    cg.cites
        .iter()
        .filter(|&&(s, tt)| {
            tt == t
                && cg.article_authors[s].iter().any(|x| {
                    cg.article_authors[t]
                        .iter()
                        .any(|y| oracle_cosine(x, y) >= threshold)
                })
        })
        .count() as u64
}

pub fn brute_journal_self_citations(cg: &CitationGraph, j: usize) -> u64 {
    cg.cites
        .iter()
        .filter(|&&(s, t)| cg.article_journal[s] == j && cg.article_journal[t] == j)
        .count() as u64
}

// ---------------------------------------------------------------------------
// Query oracle.

const NAMES: &[&str] = &["a", "b", "c"];
const YEARS: &[i64] = &[2014, 2015, 2016];

/// Random schema-valid graph with ≤ 20 nodes. Some nodes lack `year` or
/// `name` so that null handling is exercised.
pub fn random_query_graph(rng: &mut impl Rng) -> PropertyGraph {
    let mut g = PropertyGraph::new();
    let n = rng.gen_range(1..=20);
    for _ in 0..n {
        let label = *Label::ALL.choose(rng).unwrap();
        let mut p = BTreeMap::new();
        p.insert("name".to_string(), PropertyValue::from(*NAMES.choose(rng).unwrap()));
        if rng.gen_bool(0.6) {
            p.insert("year".to_string(), PropertyValue::Int(*YEARS.choose(rng).unwrap()));
        }
        g.create_node(label, p).unwrap();
    }
    let rel_target = rng.gen_range(0..=40);
    for _ in 0..rel_target {
        let t = *[
            RelType::PUBLISHED_IN,
            RelType::AUTHORED,
            RelType::WORKS_FOR,
            RelType::IS_IN,
            RelType::IN_REGION,
            RelType::CITES,
        ]
        .choose(rng)
        .unwrap();
        let (sl, tl) = t.endpoints();
        let sources = g.nodes_with_label(sl).to_vec();
        let targets = g.nodes_with_label(tl).to_vec();
        if sources.is_empty() || targets.is_empty() {
            continue;
        }
        let s = *sources.choose(rng).unwrap();
        let d = *targets.choose(rng).unwrap();
        if t == RelType::CITES && s == d {
            continue;
        }
        g.create_relationship(t, s, d).unwrap();
    }
    g.freeze();
    g
}

#[derive(Debug, Clone)]
pub struct QNode {
    pub var: String,
    pub label: Option<Label>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QDir {
    Right,
    Left,
    Both,
}

#[derive(Debug, Clone)]
pub struct QRel {
    pub var: Option<String>,
    pub rel_type: Option<RelType>,
    pub dir: QDir,
}

#[derive(Debug, Clone)]
pub enum QExpr {
    And(Box<QExpr>, Box<QExpr>),
    Or(Box<QExpr>, Box<QExpr>),
    Not(Box<QExpr>),
    /// var.key op literal
    Cmp(String, String, &'static str, PropertyValue),
    In(String, String, Vec<PropertyValue>),
}

#[derive(Debug, Clone)]
pub struct QuerySpec {
    pub nodes: Vec<QNode>,
    pub rels: Vec<QRel>,
    pub filter: Option<QExpr>,
    pub projections: Vec<(String, String)>,
}

fn literal_text(v: &PropertyValue) -> String {
    match v {
        PropertyValue::Text(s) => format!("'{s}'"),
        PropertyValue::Int(i) => i.to_string(),
        other => panic!("unexpected literal {other:?}"),
    }
}

impl QExpr {
    fn text(&self) -> String {
        match self {
            QExpr::And(a, b) => format!("({} AND {})", a.text(), b.text()),
            QExpr::Or(a, b) => format!("({} OR {})", a.text(), b.text()),
            QExpr::Not(e) => format!("NOT ({})", e.text()),
            QExpr::Cmp(v, k, op, lit) => format!("{v}.{k} {op} {}", literal_text(lit)),
            QExpr::In(v, k, list) => format!(
                "{v}.{k} IN [{}]",
                list.iter().map(literal_text).collect::<Vec<_>>().join(", ")
            ),
        }
    }
}

impl QuerySpec {
    pub fn text(&self) -> String {
        let mut s = String::from("MATCH ");
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                let r = &self.rels[i - 1];
                let inner = format!(
                    "{}{}",
                    r.var.clone().unwrap_or_default(),
                    r.rel_type.map(|t| format!(":{t}")).unwrap_or_default()
                );
                s.push_str(&match r.dir {
                    QDir::Right => format!("-[{inner}]->"),
                    QDir::Left => format!("<-[{inner}]-"),
                    QDir::Both => format!("-[{inner}]-"),
                });
            }
            match n.label {
                // A bare label-named variable doubles as the label.
                Some(l) if n.var == l.as_str() => s.push_str(&format!("({})", n.var)),
                Some(l) => s.push_str(&format!("({}:{l})", n.var)),
                None => s.push_str(&format!("({})", n.var)),
            }
        }
        if let Some(f) = &self.filter {
            s.push_str(&format!(" WHERE {}", f.text()));
        }
        s.push_str(" RETURN ");
        s.push_str(
            &self
                .projections
                .iter()
                .map(|(v, k)| format!("{v}.{k}"))
                .collect::<Vec<_>>()
                .join(", "),
        );
        s
    }
}

fn random_literal(rng: &mut impl Rng, key: &str) -> PropertyValue {
    if key == "name" {
        // Upper case on purpose: name literals are case-folded before comparison.
        let n = *NAMES.choose(rng).unwrap();
        if rng.gen_bool(0.3) {
            PropertyValue::from(n.to_uppercase())
        } else {
            PropertyValue::from(n)
        }
    } else {
        PropertyValue::Int(*YEARS.choose(rng).unwrap() + rng.gen_range(-1..=1))
    }
}

fn random_expr(rng: &mut impl Rng, vars: &[String], depth: u32) -> QExpr {
    if depth == 0 || rng.gen_bool(0.4) {
        let v = vars.choose(rng).unwrap().clone();
        let key = if rng.gen_bool(0.5) { "name" } else { "year" };
        if rng.gen_bool(0.25) {
            let list = (0..rng.gen_range(1..=3)).map(|_| random_literal(rng, key)).collect();
            return QExpr::In(v, key.into(), list);
        }
        let op = *["=", "<>", "<", "<=", ">", ">="].choose(rng).unwrap();
        return QExpr::Cmp(v, key.into(), op, random_literal(rng, key));
    }
    match rng.gen_range(0..3) {
        0 => QExpr::And(
            Box::new(random_expr(rng, vars, depth - 1)),
            Box::new(random_expr(rng, vars, depth - 1)),
        ),
        1 => QExpr::Or(
            Box::new(random_expr(rng, vars, depth - 1)),
            Box::new(random_expr(rng, vars, depth - 1)),
        ),
        _ => QExpr::Not(Box::new(random_expr(rng, vars, depth - 1))),
    }
}

/// Random query of 0..=3 hops. Node variables may repeat (forcing the same
/// node); relationship variables never do.
pub fn random_query(rng: &mut impl Rng) -> QuerySpec {
    let hops = rng.gen_range(0..=3);
    let mut nodes: Vec<QNode> = Vec::new();
    for i in 0..=hops {
        if i > 0 && rng.gen_bool(0.15) {
            let prev = nodes.choose(rng).unwrap().clone();
            nodes.push(prev);
            continue;
        }
        let label = if rng.gen_bool(0.6) {
            Some(*Label::ALL.choose(rng).unwrap())
        } else {
            None
        };
        let bare = label.is_some_and(|l| rng.gen_bool(0.3) && !nodes.iter().any(|n| n.var == l.as_str()));
        let var = if bare {
            label.unwrap().as_str().to_string()
        } else {
            format!("n{i}")
        };
        nodes.push(QNode { var, label });
    }
    let types = [
        RelType::PUBLISHED_IN,
        RelType::AUTHORED,
        RelType::WORKS_FOR,
        RelType::IS_IN,
        RelType::IN_REGION,
        RelType::CITES,
    ];
    let rels = (0..hops)
        .map(|i| QRel {
            var: rng.gen_bool(0.5).then(|| format!("r{i}")),
            rel_type: rng.gen_bool(0.7).then(|| *types.choose(rng).unwrap()),
            dir: *[QDir::Right, QDir::Left, QDir::Both].choose(rng).unwrap(),
        })
        .collect();
    let mut vars: Vec<String> = nodes.iter().map(|n| n.var.clone()).collect();
    vars.dedup();
    let filter = rng.gen_bool(0.6).then(|| random_expr(rng, &vars, 2));
    let projections = (0..rng.gen_range(1..=3))
        .map(|_| {
            let v = vars.choose(rng).unwrap().clone();
            let k = *["name", "year", "missing"].choose(rng).unwrap();
            (v, k.to_string())
        })
        .collect();
    QuerySpec {
        nodes,
        rels,
        filter,
        projections,
    }
}

#[derive(Clone, Copy, PartialEq, Debug)]
enum T3 {
    T,
    F,
    U,
}

fn fold_name(v: &PropertyValue, key: &str) -> PropertyValue {
    match v {
        PropertyValue::Text(s) if key == "name" => PropertyValue::Text(s.to_lowercase()),
        other => other.clone(),
    }
}

fn cmp_values(a: &PropertyValue, b: &PropertyValue) -> std::cmp::Ordering {
    match (a, b) {
        (PropertyValue::Int(x), PropertyValue::Int(y)) => x.cmp(y),
        (PropertyValue::Text(x), PropertyValue::Text(y)) => x.cmp(y),
        _ => panic!("generator only produces type-consistent comparisons"),
    }
}

fn eval3(e: &QExpr, get: &dyn Fn(&str, &str) -> Option<PropertyValue>) -> T3 {
    match e {
        QExpr::And(a, b) => match (eval3(a, get), eval3(b, get)) {
            (T3::F, _) | (_, T3::F) => T3::F,
            (T3::T, T3::T) => T3::T,
            _ => T3::U,
        },
        QExpr::Or(a, b) => match (eval3(a, get), eval3(b, get)) {
            (T3::T, _) | (_, T3::T) => T3::T,
            (T3::F, T3::F) => T3::F,
            _ => T3::U,
        },
        QExpr::Not(a) => match eval3(a, get) {
            T3::T => T3::F,
            T3::F => T3::T,
            T3::U => T3::U,
        },
        QExpr::Cmp(v, k, op, lit) => match get(v, k) {
            None => T3::U,
            Some(x) => {
                let o = cmp_values(&x, &fold_name(lit, k));
                let holds = match *op {
                    "=" => o.is_eq(),
                    "<>" => o.is_ne(),
                    "<" => o.is_lt(),
                    "<=" => o.is_le(),
                    ">" => o.is_gt(),
                    ">=" => o.is_ge(),
                    _ => unreachable!(),
                };
                if holds {
                    T3::T
                } else {
                    T3::F
                }
            }
        },
        QExpr::In(v, k, list) => match get(v, k) {
            None => T3::U,
            Some(x) => {
                if list.iter().any(|l| cmp_values(&x, &fold_name(l, k)).is_eq()) {
                    T3::T
                } else {
                    T3::F
                }
            }
        },
    }
}

pub type Row = Vec<Option<PropertyValue>>;

/// Every node tuple × relationship tuple checked directly against the
/// pattern, in lexicographic (nodes, rels) order.
pub fn brute_force(graph: &PropertyGraph, q: &QuerySpec) -> Vec<Row> {
    let n = graph.node_count();
    let k = q.nodes.len();
    let mut rows = Vec::new();
    let mut tuple = vec![0usize; k];
    let total = n.pow(k as u32);
    for code in 0..total {
        let mut c = code;
        for i in (0..k).rev() {
            tuple[i] = c % n;
            c /= n;
        }
        let ok_nodes = (0..k).all(|i| {
            let node = graph.node(NodeId(tuple[i] as u32)).unwrap();
            q.nodes[i].label.is_none_or(|l| node.label == l)
                && (0..k).all(|j| q.nodes[j].var != q.nodes[i].var || tuple[j] == tuple[i])
        });
        if !ok_nodes {
            continue;
        }
        // Candidate relationships per hop.
        let cands: Vec<Vec<usize>> = q
            .rels
            .iter()
            .enumerate()
            .map(|(h, r)| {
                let (a, b) = (tuple[h] as u32, tuple[h + 1] as u32);
                graph
                    .relationships()
                    .iter()
                    .filter(|rel| r.rel_type.is_none_or(|t| rel.rel_type == t))
                    .filter(|rel| {
                        let fwd = rel.source.0 == a && rel.target.0 == b;
                        let back = rel.source.0 == b && rel.target.0 == a;
                        match r.dir {
                            QDir::Right => fwd,
                            QDir::Left => back,
                            QDir::Both => fwd || back,
                        }
                    })
                    .map(|rel| rel.id.index())
                    .collect()
            })
            .collect();
        let mut choice = vec![0usize; cands.len()];
        'outer: loop {
            if cands.iter().any(|c| c.is_empty()) {
                break;
            }
            let chosen: Vec<usize> = choice.iter().zip(&cands).map(|(&i, c)| c[i]).collect();
            let distinct = chosen.iter().collect::<BTreeSet<_>>().len() == chosen.len();
            if distinct {
                let get = |var: &str, key: &str| -> Option<PropertyValue> {
                    let i = q.nodes.iter().position(|n| n.var == var)?;
                    graph.node(NodeId(tuple[i] as u32)).unwrap().get(key).cloned()
                };
                let keep = q.filter.as_ref().is_none_or(|f| eval3(f, &get) == T3::T);
                if keep {
                    rows.push(q.projections.iter().map(|(v, k)| get(v, k)).collect());
                }
            }
            // Odometer increment.
            let mut h = cands.len();
            loop {
                if h == 0 {
                    break 'outer;
                }
                h -= 1;
                choice[h] += 1;
                if choice[h] < cands[h].len() {
                    break;
                }
                choice[h] = 0;
            }
        }
    }
    rows
}

/// Sorts rows into a canonical multiset form.
pub fn multiset(rows: &[Row]) -> Vec<String> {
    let mut v: Vec<String> = rows.iter().map(|r| format!("{r:?}")).collect();
    v.sort();
    v
}
