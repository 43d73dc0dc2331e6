//! JSONL ingestion: record parsing, entity resolution and graph loading.
//!
//! One JSON object per line:
//!
//! ```json
//! {"title": "...", "year": 2015, "journal": "...",
//!  "journal_country": "...", "region": "...", "snip": 1.2,
//!  "authors": [{"name": "...", "institute": "...", "country": "..."}],
//!  "cited_titles": ["..."], "totalcites": 10}
//! ```
//!
//! `title`, `year`, `journal` and a non-empty `authors` list are required.
//! Unknown fields are ignored and blank lines are skipped. Every text field is
//! passed through [`normalize_text`].

use crate::graph::{props, Direction, GraphError, Label, NodeId, PropertyGraph, RelType};
use crate::indicators::{citers_of, journal_self_citations, AuthorMatcher, IndicatorError};
use crate::similarity::{
    normalize_text, InvalidThreshold, SimilarityIndex, Threshold, DEFAULT_AUTHOR_THRESHOLD,
    DEFAULT_JOURNAL_THRESHOLD, DEFAULT_TITLE_THRESHOLD,
};
use serde::Serialize;
use serde_json::{Map, Value};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthorRecord {
    pub name: String,
    pub institute: Option<String>,
    pub country: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArticleRecord {
    pub title: String,
    pub year: i64,
    pub journal: String,
    pub journal_country: Option<String>,
    pub region: Option<String>,
    pub snip: Option<f64>,
    pub authors: Vec<AuthorRecord>,
    pub cited_titles: Vec<String>,
    pub totalcites: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Title,
    Journal,
    Authors,
    Year,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Field::Title => "title",
            Field::Journal => "journal",
            Field::Authors => "authors",
            Field::Year => "year",
        })
    }
}

/// Why a line was rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Error)]
#[serde(tag = "kind", content = "detail")]
pub enum RejectReason {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("missing field '{0}'")]
    MissingField(Field),
    #[error("field '{0}' is empty after normalization")]
    EmptyField(Field),
    #[error("authors list is empty")]
    EmptyAuthors,
    #[error("author #{0} has an empty name")]
    EmptyAuthorName(usize),
    #[error("year must be an integer in 1..=3000")]
    BadYear,
    #[error("field '{field}' has the wrong type: {detail}")]
    WrongType { field: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rejection {
    pub line: usize,
    pub reason: RejectReason,
}

pub fn parse_records(stream: &str) -> (Vec<ArticleRecord>, Vec<Rejection>) {
    let mut records = Vec::new();
    let mut rejects = Vec::new();
    for (i, line) in stream.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_line(line) {
            Ok(r) => records.push(r),
            Err(reason) => rejects.push(Rejection { line: i + 1, reason }),
        }
    }
    (records, rejects)
}

fn wrong_type(field: &str, expected: &str) -> RejectReason {
    RejectReason::WrongType {
        field: field.to_string(),
        detail: format!("expected {expected}"),
    }
}

fn opt_text(obj: &Map<String, Value>, key: &str) -> Result<Option<String>, RejectReason> {
    match obj.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(Value::String(s)) => {
            let n = normalize_text(s);
            Ok((!n.is_empty()).then_some(n))
        }
        Some(_) => Err(wrong_type(key, "string")),
    }
}

fn required_text(obj: &Map<String, Value>, field: Field) -> Result<String, RejectReason> {
    let key = field.to_string();
    match obj.get(&key) {
        None | Some(Value::Null) => Err(RejectReason::MissingField(field)),
        Some(Value::String(s)) => {
            let n = normalize_text(s);
            if n.is_empty() {
                Err(RejectReason::EmptyField(field))
            } else {
                Ok(n)
            }
        }
        Some(_) => Err(wrong_type(&key, "string")),
    }
}

fn parse_line(line: &str) -> Result<ArticleRecord, RejectReason> {
    let value: Value =
        serde_json::from_str(line).map_err(|e| RejectReason::MalformedJson(e.to_string()))?;
    let Value::Object(obj) = value else {
        return Err(RejectReason::MalformedJson("expected a JSON object".into()));
    };

    let title = required_text(&obj, Field::Title)?;
    let journal = required_text(&obj, Field::Journal)?;
    let year = match obj.get("year") {
        None | Some(Value::Null) => return Err(RejectReason::MissingField(Field::Year)),
        Some(v) => v.as_i64().filter(|y| (1..=3000).contains(y)).ok_or(RejectReason::BadYear)?,
    };
    let authors = match obj.get("authors") {
        None | Some(Value::Null) => return Err(RejectReason::MissingField(Field::Authors)),
        Some(Value::Array(items)) if items.is_empty() => return Err(RejectReason::EmptyAuthors),
        Some(Value::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, item)| parse_author(i, item))
            .collect::<Result<Vec<_>, _>>()?,
        Some(_) => return Err(wrong_type("authors", "array")),
    };
    let cited_titles = match obj.get("cited_titles") {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items
            .iter()
            .map(|v| v.as_str().map(normalize_text))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| wrong_type("cited_titles", "array of strings"))?,
        Some(_) => return Err(wrong_type("cited_titles", "array of strings")),
    };
    let snip = match obj.get("snip") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_f64()
                .filter(|s| s.is_finite() && *s >= 0.0)
                .ok_or_else(|| wrong_type("snip", "non-negative number"))?,
        ),
    };
    let totalcites = match obj.get("totalcites") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_i64()
                .filter(|c| *c >= 0)
                .ok_or_else(|| wrong_type("totalcites", "non-negative integer"))?,
        ),
    };

    Ok(ArticleRecord {
        title,
        year,
        journal,
        journal_country: opt_text(&obj, "journal_country")?,
        region: opt_text(&obj, "region")?,
        snip,
        authors,
        cited_titles,
        totalcites,
    })
}

fn parse_author(index: usize, item: &Value) -> Result<AuthorRecord, RejectReason> {
    let Value::Object(obj) = item else {
        return Err(wrong_type("authors", "array of objects"));
    };
    let name = match obj.get("name") {
        Some(Value::String(s)) => normalize_text(s),
        None | Some(Value::Null) => String::new(),
        Some(_) => return Err(wrong_type("authors.name", "string")),
    };
    if name.is_empty() {
        return Err(RejectReason::EmptyAuthorName(index + 1));
    }
    Ok(AuthorRecord {
        name,
        institute: opt_text(obj, "institute")?,
        country: opt_text(obj, "country")?,
    })
}

/// Cosine thresholds used for entity resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub author: Threshold,
    pub journal: Threshold,
    pub title: Threshold,
}

impl Thresholds {
    pub fn new(author: f64, journal: f64, title: f64) -> Result<Self, InvalidThreshold> {
        Ok(Thresholds {
            author: Threshold::new(author)?,
            journal: Threshold::new(journal)?,
            title: Threshold::new(title)?,
        })
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds::new(
            DEFAULT_AUTHOR_THRESHOLD,
            DEFAULT_JOURNAL_THRESHOLD,
            DEFAULT_TITLE_THRESHOLD,
        )
        .expect("default thresholds are valid")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MergeCounts {
    pub journal: u64,
    pub article: u64,
    pub author: u64,
}

impl MergeCounts {
    pub fn total(&self) -> u64 {
        self.journal + self.article + self.author
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestReport {
    pub records_read: u64,
    pub records_accepted: u64,
    pub records_rejected: u64,
    pub rejections: Vec<Rejection>,
    pub nodes_created: BTreeMap<Label, u64>,
    pub merges: u64,
    pub merges_by_kind: MergeCounts,
    pub citation_links_resolved: u64,
    pub citation_links_unresolved: u64,
    /// Authors that named a country but no institute; the schema links
    /// authors to countries only through an institute.
    pub author_countries_unlinked: u64,
}

impl IngestReport {
    fn add_rejections(&mut self, rejects: Vec<Rejection>) {
        self.records_rejected += rejects.len() as u64;
        self.records_read += rejects.len() as u64;
        self.rejections.extend(rejects);
    }
}

/// Resolves names greedily: an incoming name joins the lowest-id existing
/// entity it matches, else becomes a new entity.
struct Resolver {
    index: SimilarityIndex,
    ids: Vec<NodeId>,
}

impl Resolver {
    fn new<'a>(threshold: Threshold, corpus: impl Iterator<Item = &'a str>) -> Self {
        let mut index = SimilarityIndex::new(threshold);
        for s in corpus {
            index.observe(s);
        }
        Resolver {
            index,
            ids: Vec::new(),
        }
    }

    fn find(&mut self, name: &str) -> Option<NodeId> {
        self.index.first_match(name).map(|i| self.ids[i])
    }

    fn add(&mut self, name: &str, id: NodeId) {
        self.index.insert(name);
        self.ids.push(id);
    }
}

#[derive(Default)]
struct ExactNames(HashMap<String, NodeId>);

impl ExactNames {
    fn get_or_create(
        &mut self,
        graph: &mut PropertyGraph,
        report: &mut IngestReport,
        label: Label,
        name: &str,
    ) -> Result<NodeId, GraphError> {
        if let Some(&id) = self.0.get(name) {
            return Ok(id);
        }
        let id = create(graph, report, label, props([("name", name)]))?;
        self.0.insert(name.to_string(), id);
        Ok(id)
    }
}

fn create(
    graph: &mut PropertyGraph,
    report: &mut IngestReport,
    label: Label,
    properties: crate::graph::Properties,
) -> Result<NodeId, GraphError> {
    let id = graph.create_node(label, properties)?;
    *report.nodes_created.entry(label).or_insert(0) += 1;
    Ok(id)
}

/// Relationship creation that skips pairs already connected by `rel_type`.
fn link_once(
    graph: &mut PropertyGraph,
    seen: &mut BTreeSet<(RelType, NodeId, NodeId)>,
    rel_type: RelType,
    source: NodeId,
    target: NodeId,
) -> Result<bool, GraphError> {
    if seen.insert((rel_type, source, target)) {
        graph.create_relationship(rel_type, source, target)?;
        Ok(true)
    } else {
        Ok(false)
    }
}

/// Builds the article graph from parsed records. The graph is left unfrozen
/// so that [`annotate_citation_counts`] can run next.
pub fn load_graph(records: &[ArticleRecord], thresholds: Thresholds) -> (PropertyGraph, IngestReport) {
    load_graph_inner(records, thresholds).expect("ingest only creates schema-valid graph elements")
}

fn load_graph_inner(
    records: &[ArticleRecord],
    thresholds: Thresholds,
) -> Result<(PropertyGraph, IngestReport), GraphError> {
    let mut graph = PropertyGraph::new();
    let mut report = IngestReport {
        records_read: records.len() as u64,
        records_accepted: records.len() as u64,
        ..IngestReport::default()
    };
    for label in Label::ALL {
        report.nodes_created.insert(label, 0);
    }

    let mut journals = Resolver::new(thresholds.journal, records.iter().map(|r| r.journal.as_str()));
    let mut authors = Resolver::new(
        thresholds.author,
        records.iter().flat_map(|r| r.authors.iter().map(|a| a.name.as_str())),
    );
    let mut titles = SimilarityIndex::new(thresholds.title);
    for r in records {
        titles.observe(&r.title);
        for c in &r.cited_titles {
            titles.observe(c);
        }
    }
    let mut article_ids: Vec<NodeId> = Vec::new();
    // Duplicate titles only merge within a journal.
    let mut journal_titles: HashMap<NodeId, SimilarityIndex> = HashMap::new();

    let mut institutes = ExactNames::default();
    let mut countries = ExactNames::default();
    let mut regions = ExactNames::default();
    let mut linked = BTreeSet::new();
    // (article node, record index) for records that produced a new article.
    let mut loaded: Vec<(NodeId, usize)> = Vec::new();

    for (ri, rec) in records.iter().enumerate() {
        let journal = match journals.find(&rec.journal) {
            Some(id) => {
                report.merges_by_kind.journal += 1;
                id
            }
            None => {
                let id = create(&mut graph, &mut report, Label::Journal, props([("name", rec.journal.as_str())]))?;
                journals.add(&rec.journal, id);
                id
            }
        };
        if let Some(snip) = rec.snip {
            if graph.node(journal)?.get("snip").is_none() {
                graph.set_property(journal, "snip", snip)?;
            }
        }
        if let Some(country) = &rec.journal_country {
            if graph.node(journal)?.get("country").is_none() {
                graph.set_property(journal, "country", country.as_str())?;
            }
            let c = countries.get_or_create(&mut graph, &mut report, Label::Country, country)?;
            if let Some(region) = &rec.region {
                let r = regions.get_or_create(&mut graph, &mut report, Label::Region, region)?;
                link_once(&mut graph, &mut linked, RelType::IN_REGION, c, r)?;
            }
        }

        let journal_titles = match journal_titles.entry(journal) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => e.insert(titles.empty_like()),
        };
        if journal_titles.first_match(&rec.title).is_some() {
            report.merges_by_kind.article += 1;
            continue;
        }

        let mut properties = props([("name", rec.title.as_str())]);
        properties.insert("year".into(), rec.year.into());
        if let Some(tc) = rec.totalcites {
            properties.insert("totalcites".into(), tc.into());
        }
        let article = create(&mut graph, &mut report, Label::Article, properties)?;
        titles.insert(&rec.title);
        journal_titles.insert(&rec.title);
        article_ids.push(article);
        loaded.push((article, ri));
        graph.create_relationship(RelType::PUBLISHED_IN, article, journal)?;

        for author in &rec.authors {
            let author_id = match authors.find(&author.name) {
                Some(id) => {
                    report.merges_by_kind.author += 1;
                    id
                }
                None => {
                    let id = create(&mut graph, &mut report, Label::Author, props([("name", author.name.as_str())]))?;
                    authors.add(&author.name, id);
                    id
                }
            };
            link_once(&mut graph, &mut linked, RelType::AUTHORED, author_id, article)?;
            match (&author.institute, &author.country) {
                (Some(inst), country) => {
                    let i = institutes.get_or_create(&mut graph, &mut report, Label::Institute, inst)?;
                    link_once(&mut graph, &mut linked, RelType::WORKS_FOR, author_id, i)?;
                    if let Some(country) = country {
                        let c = countries.get_or_create(&mut graph, &mut report, Label::Country, country)?;
                        link_once(&mut graph, &mut linked, RelType::IS_IN, i, c)?;
                    }
                }
                (None, Some(_)) => report.author_countries_unlinked += 1,
                (None, None) => {}
            }
        }
    }

    // Popular titles are cited many times; look each text up once.
    let mut lookups: HashMap<&str, Vec<NodeId>> = HashMap::new();
    for &(article, ri) in &loaded {
        for cited in &records[ri].cited_titles {
            let found = lookups.entry(cited.as_str()).or_insert_with(|| {
                // At most one match can be skipped as a self-citation.
                titles
                    .matches(cited)
                    .into_iter()
                    .take(2)
                    .map(|(i, _)| article_ids[i])
                    .collect()
            });
            let target = found.iter().copied().find(|&id| id != article);
            match target {
                Some(target) => {
                    report.citation_links_resolved += 1;
                    link_once(&mut graph, &mut linked, RelType::CITES, article, target)?;
                }
                None => report.citation_links_unresolved += 1,
            }
        }
    }

    report.merges = report.merges_by_kind.total();
    Ok((graph, report))
}

/// Writes `totalcites` and `selfcites` on every article and `jtotalcites` /
/// `jselfcites` on every journal. Returns the number of articles annotated.
pub fn annotate_citation_counts(
    graph: &mut PropertyGraph,
    author_threshold: f64,
) -> Result<usize, IndicatorError> {
    if graph.is_frozen() {
        return Err(GraphError::Frozen.into());
    }
    let articles = graph.nodes_with_label(Label::Article).to_vec();
    let mut updates = Vec::with_capacity(articles.len());
    {
        let mut matcher = AuthorMatcher::new(graph, author_threshold)?;
        for &a in &articles {
            let degree = citers_of(graph, a).len() as i64;
            // Holds the ingested count until annotated; max() keeps re-annotation stable.
            let ingested = graph.int_property(a, "totalcites").unwrap_or(0);
            let self_cites = matcher.article_self_citations(a)? as i64;
            updates.push((a, ingested.max(degree), self_cites));
        }
    }
    let mut journal_totals: BTreeMap<NodeId, i64> = BTreeMap::new();
    for &(a, total, self_cites) in &updates {
        graph.set_property(a, "totalcites", total)?;
        graph.set_property(a, "selfcites", self_cites)?;
        for j in graph.related(a, RelType::PUBLISHED_IN, Direction::Out) {
            *journal_totals.entry(j).or_insert(0) += total;
        }
    }
    for j in graph.nodes_with_label(Label::Journal).to_vec() {
        let jself = journal_self_citations(graph, j)? as i64;
        let jtotal = journal_totals.get(&j).copied().unwrap_or(0);
        graph.set_property(j, "jtotalcites", jtotal)?;
        graph.set_property(j, "jselfcites", jself)?;
    }
    Ok(updates.len())
}

/// Parse, load, annotate and freeze in one step.
pub fn ingest_jsonl(
    stream: &str,
    thresholds: Thresholds,
) -> Result<(PropertyGraph, IngestReport), IndicatorError> {
    let (records, rejects) = parse_records(stream);
    let (mut graph, mut report) = load_graph(&records, thresholds);
    report.add_rejections(rejects);
    annotate_citation_counts(&mut graph, thresholds.author.get())?;
    graph.freeze();
    Ok((graph, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(title: &str, journal: &str, authors: &[&str], cited: &[&str]) -> String {
        let authors: Vec<Value> = authors
            .iter()
            .map(|a| serde_json::json!({ "name": a }))
            .collect();
        serde_json::json!({
            "title": title, "year": 2015, "journal": journal,
            "authors": authors, "cited_titles": cited,
        })
        .to_string()
    }

    fn count(g: &PropertyGraph, label: Label) -> usize {
        g.nodes_with_label(label).len()
    }

    fn rel_count(g: &PropertyGraph, t: RelType) -> usize {
        g.relationships().iter().filter(|r| r.rel_type == t).count()
    }

    #[test]
    fn parse_minimal_record() {
        let (recs, rej) = parse_records(
            r#"{"title":"T1","year":2015,"journal":"J1","authors":[{"name":"A One"}],"cited_titles":[]}"#,
        );
        assert!(rej.is_empty());
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].title, "t1");
        assert_eq!(recs[0].authors[0].name, "a one");
        assert_eq!(recs[0].totalcites, None);
    }

    #[test]
    fn parse_field_order_irrelevant_and_extras_ignored() {
        let (recs, rej) = parse_records(
            r#"{"extra":[1,2],"authors":[{"country":"India","name":"X","institute":"PES"}],"journal":"J","year":1999,"title":"T","snip":1.5,"totalcites":4}"#,
        );
        assert!(rej.is_empty());
        assert_eq!(recs[0].snip, Some(1.5));
        assert_eq!(recs[0].totalcites, Some(4));
        assert_eq!(recs[0].authors[0].institute.as_deref(), Some("pes"));
    }

    #[test]
    fn parse_rejections() {
        let input = [
            "not json",
            r#"{"year":2015,"journal":"J","authors":[{"name":"a"}]}"#,
            r#"{"title":"t","year":2015,"journal":"J","authors":[]}"#,
            r#"{"title":"t","year":0,"journal":"J","authors":[{"name":"a"}]}"#,
            r#"{"title":"t","year":"2015","journal":"J","authors":[{"name":"a"}]}"#,
            "",
            r#"{"title":"!!","year":2015,"journal":"J","authors":[{"name":"a"}]}"#,
            r#"{"title":"t","year":2015,"journal":"J","authors":[{"name":"--"}]}"#,
            r#"[1,2]"#,
        ]
        .join("\n");
        let (recs, rej) = parse_records(&input);
        assert!(recs.is_empty());
        let reasons: Vec<(usize, RejectReason)> =
            rej.into_iter().map(|r| (r.line, r.reason)).collect();
        assert!(matches!(reasons[0], (1, RejectReason::MalformedJson(_))));
        assert_eq!(reasons[1], (2, RejectReason::MissingField(Field::Title)));
        assert_eq!(reasons[2], (3, RejectReason::EmptyAuthors));
        assert_eq!(reasons[3], (4, RejectReason::BadYear));
        assert_eq!(reasons[4], (5, RejectReason::BadYear));
        assert_eq!(reasons[5], (7, RejectReason::EmptyField(Field::Title)));
        assert_eq!(reasons[6], (8, RejectReason::EmptyAuthorName(1)));
        assert!(matches!(reasons[7], (9, RejectReason::MalformedJson(_))));
        assert_eq!(reasons.len(), 8);
    }

    #[test]
    fn two_records_same_journal() {
        let input = [
            line("First title", "J1", &["Alice Walker"], &[]),
            line("Second title", "J1", &["Bob Dylan"], &[]),
        ]
        .join("\n");
        let (recs, _) = parse_records(&input);
        let (g, report) = load_graph(&recs, Thresholds::default());
        assert_eq!(count(&g, Label::Journal), 1);
        assert_eq!(count(&g, Label::Article), 2);
        assert_eq!(count(&g, Label::Author), 2);
        assert_eq!(rel_count(&g, RelType::PUBLISHED_IN), 2);
        assert_eq!(rel_count(&g, RelType::AUTHORED), 2);
        assert_eq!(report.merges_by_kind.journal, 1);
        assert_eq!(report.nodes_created[&Label::Article], 2);
        g.check_integrity().unwrap();
    }

    #[test]
    fn citation_resolution() {
        let input = [
            line("T1", "J1", &["Alice Walker"], &[]),
            line("T2", "J1", &["Bob Dylan"], &["T1", "Unknown Work"]),
        ]
        .join("\n");
        let (recs, _) = parse_records(&input);
        let (g, report) = load_graph(&recs, Thresholds::default());
        let cites: Vec<_> = g
            .relationships()
            .iter()
            .filter(|r| r.rel_type == RelType::CITES)
            .collect();
        assert_eq!(cites.len(), 1);
        assert_eq!(g.node(cites[0].source).unwrap().name(), "t2");
        assert_eq!(g.node(cites[0].target).unwrap().name(), "t1");
        assert_eq!(report.citation_links_resolved, 1);
        assert_eq!(report.citation_links_unresolved, 1);
    }

    #[test]
    fn citing_own_title_is_unresolved() {
        let input = line("Lonely paper", "J1", &["Alice Walker"], &["Lonely paper"]);
        let (recs, _) = parse_records(&input);
        let (g, report) = load_graph(&recs, Thresholds::default());
        assert_eq!(rel_count(&g, RelType::CITES), 0);
        assert_eq!(report.citation_links_unresolved, 1);
    }

    #[test]
    fn duplicates_merge_completely() {
        let base = [
            line("Graph databases for scholarly data", "Neurocomputing", &["Priya Raman", "K Kolo"], &[]),
            line("Cobb Douglas internationality", "Neuro-computing", &["Krilorkly Kolo"], &["graph databases for scholarly data"]),
        ];
        let once = base.join("\n");
        let twice = [base.join("\n"), base.join("\n")].join("\n");
        let (r1, _) = parse_records(&once);
        let (r2, _) = parse_records(&twice);
        let (g1, rep1) = load_graph(&r1, Thresholds::default());
        let (g2, rep2) = load_graph(&r2, Thresholds::default());
        for label in Label::ALL {
            assert_eq!(count(&g1, label), count(&g2, label), "{label}");
        }
        assert_eq!(count(&g1, Label::Journal), 1);
        assert_eq!(count(&g1, Label::Author), 3);
        assert_eq!(rep2.merges_by_kind.article, 2);
        assert_eq!(rep1.merges_by_kind.article, 0);
    }

    #[test]
    fn affiliation_nodes_are_exact_deduplicated() {
        let input = [
            r#"{"title":"a","year":2015,"journal":"J","journal_country":"Netherlands","region":"Europe","authors":[{"name":"Ann Lee","institute":"Eastfield University","country":"India"},{"name":"Raj Kumar","institute":"Eastfield University","country":"India"}]}"#,
            r#"{"title":"b","year":2016,"journal":"J","journal_country":"Netherlands","region":"Europe","authors":[{"name":"Zoe Kim","country":"Canada"}]}"#,
        ]
        .join("\n");
        let (recs, _) = parse_records(&input);
        let (g, report) = load_graph(&recs, Thresholds::default());
        assert_eq!(count(&g, Label::Institute), 1);
        assert_eq!(count(&g, Label::Country), 2);
        assert_eq!(count(&g, Label::Region), 1);
        assert_eq!(rel_count(&g, RelType::IS_IN), 1);
        assert_eq!(rel_count(&g, RelType::WORKS_FOR), 2);
        assert_eq!(rel_count(&g, RelType::IN_REGION), 1);
        assert_eq!(report.author_countries_unlinked, 1);
    }

    #[test]
    fn annotation_examples() {
        let input = [
            line("Alpha study", "J1", &["Xavier Quinn", "Yolanda Park"], &[]),
            line("Beta study", "J2", &["Xavier Quinn"], &["alpha study"]),
            line("Gamma study", "J2", &["Zed Morrow"], &["alpha study"]),
            r#"{"title":"Delta study","year":2015,"journal":"J3","authors":[{"name":"Wu Ming"}],"totalcites":10}"#.to_string(),
            line("Epsilon study", "J3", &["Ivy Chen"], &["delta study"]),
        ]
        .join("\n");
        let (mut g, report) = ingest_jsonl(&input, Thresholds::default()).unwrap();
        assert_eq!(report.records_read, 5);
        let by_name = |name: &str| {
            g.nodes()
                .iter()
                .find(|n| n.name() == name)
                .map(|n| n.id)
                .unwrap()
        };
        let alpha = by_name("alpha study");
        assert_eq!(g.int_property(alpha, "totalcites"), Some(2));
        assert_eq!(g.int_property(alpha, "selfcites"), Some(1));
        let beta = by_name("beta study");
        assert_eq!(g.int_property(beta, "totalcites"), Some(0));
        assert_eq!(g.int_property(beta, "selfcites"), Some(0));
        let delta = by_name("delta study");
        assert_eq!(g.int_property(delta, "totalcites"), Some(10));
        let j3 = by_name("j3");
        assert_eq!(g.int_property(j3, "jtotalcites"), Some(10));
        assert_eq!(g.int_property(j3, "jselfcites"), Some(1));
        for &a in g.nodes_with_label(Label::Article) {
            assert!(g.int_property(a, "selfcites") <= g.int_property(a, "totalcites"));
        }
        assert!(matches!(
            annotate_citation_counts(&mut g, 0.75),
            Err(IndicatorError::Graph(GraphError::Frozen))
        ));
    }

    #[test]
    fn annotation_is_repeatable() {
        let input = [
            r#"{"title":"Delta study","year":2015,"journal":"J3","authors":[{"name":"Wu Ming"}],"totalcites":1}"#.to_string(),
            line("Epsilon study", "J3", &["Ivy Chen"], &["delta study"]),
            line("Zeta study", "J3", &["Ivy Chen"], &["delta study"]),
        ]
        .join("\n");
        let (recs, _) = parse_records(&input);
        let (mut g, _) = load_graph(&recs, Thresholds::default());
        annotate_citation_counts(&mut g, 0.75).unwrap();
        let first = g.nodes().to_vec();
        annotate_citation_counts(&mut g, 0.75).unwrap();
        assert_eq!(g.nodes(), first.as_slice());
        assert_eq!(g.int_property(NodeId(1), "totalcites"), Some(2));
    }
}
