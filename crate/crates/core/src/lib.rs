//! Bibliometric property graph with journal internationality scoring.
//!
//! JSONL article metadata is ingested into a typed property graph
//! ([`graph`]), with near-duplicate names merged by bigram cosine similarity
//! ([`similarity`]). Per-journal indicators ([`indicators`]) feed a
//! Cobb-Douglas internationality score ([`internationality`]). The graph can be
//! queried with a small pattern language ([`query`]) and exported as chart data
//! or DOT ([`chart`]).

pub mod chart;
pub mod cli;
pub mod graph;
pub mod indicators;
pub mod ingest;
pub mod internationality;
pub mod query;
pub mod similarity;
pub mod snapshot;
