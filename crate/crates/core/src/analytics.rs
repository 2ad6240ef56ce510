//! Word-level corpus analytics: per-document trend statistics for term
//! queries and keyword collocate networks.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::preprocess::{TokenizedCorpus, Vocabulary};

/// Relative frequencies are reported per this many words.
pub const RELATIVE_SCALE: u64 = 10_000_000;

/// An exact term, or a prefix query when the pattern ends in `*`.
/// Every term matched by a prefix query is counted as one term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TermQuery {
    pattern: String,
    wildcard: bool,
}

impl TermQuery {
    pub fn parse(pattern: &str) -> Result<Self> {
        let pattern = pattern.trim();
        let (stem, wildcard) = match pattern.strip_suffix('*') {
            Some(prefix) => (prefix, true),
            None => (pattern, false),
        };
        if stem.is_empty() || stem.contains('*') {
            return Err(Error::Query(pattern.to_string()));
        }
        Ok(Self {
            pattern: pattern.to_string(),
            wildcard,
        })
    }

    /// The query as written, including any trailing `*`.
    pub fn pattern(&self) -> &str {
        &self.pattern
    }

    pub fn is_wildcard(&self) -> bool {
        self.wildcard
    }

    fn stem(&self) -> &str {
        self.pattern.strip_suffix('*').unwrap_or(&self.pattern)
    }

    pub fn matches(&self, term: &str) -> bool {
        if self.wildcard {
            term.starts_with(self.stem())
        } else {
            term == self.pattern
        }
    }

    /// Ids of all matching vocabulary terms, ascending.
    pub fn resolve(&self, vocab: &Vocabulary) -> Vec<u32> {
        if !self.wildcard {
            return vocab.id(&self.pattern).into_iter().collect();
        }
        vocab
            .terms()
            .iter()
            .enumerate()
            .filter(|(_, t)| self.matches(t))
            .map(|(i, _)| i as u32)
            .collect()
    }

    /// Lowercased copy, for querying a lowercased corpus.
    pub fn to_lowercase(&self) -> Self {
        Self {
            pattern: self.pattern.to_lowercase(),
            wildcard: self.wildcard,
        }
    }
}

/// `raw / total * 10^7`, or zero for an empty document.
pub fn relative_frequency<T: Scalar>(raw: u64, total: u64) -> T {
    if total == 0 {
        return T::zero();
    }
    T::from_count(raw) * T::from_count(RELATIVE_SCALE) / T::from_count(total)
}

/// Segment of token position `pos` in a document of `len` tokens split into
/// `segments` equal spans; the last segment absorbs the remainder. When the
/// document is shorter than `segments`, each token gets its own segment.
pub fn segment_of(pos: usize, len: usize, segments: usize) -> usize {
    let span = (len / segments).max(1);
    (pos / span).min(segments - 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocTrend<T> {
    pub doc_id: String,
    pub count: u64,
    pub total: u64,
    pub relative: T,
    pub segments: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendReport<T> {
    pub query: TermQuery,
    pub segments: usize,
    pub per_doc: Vec<DocTrend<T>>,
}

impl<T: Scalar> TrendReport<T> {
    pub fn total_count(&self) -> u64 {
        self.per_doc.iter().map(|d| d.count).sum()
    }
}

pub fn trend<T: Scalar>(
    tc: &TokenizedCorpus,
    query: &TermQuery,
    segments: usize,
) -> Result<TrendReport<T>> {
    if segments == 0 {
        return Err(Error::Config("segments must be >= 1".into()));
    }
    let ids: HashSet<u32> = query.resolve(&tc.vocab).into_iter().collect();
    let per_doc = tc
        .docs
        .iter()
        .zip(&tc.doc_ids)
        .map(|(doc, id)| {
            let mut seg = vec![0u64; segments];
            for (pos, w) in doc.iter().enumerate() {
                if ids.contains(w) {
                    seg[segment_of(pos, doc.len(), segments)] += 1;
                }
            }
            let count = seg.iter().sum();
            DocTrend {
                doc_id: id.clone(),
                count,
                total: doc.len() as u64,
                relative: relative_frequency(count, doc.len() as u64),
                segments: seg,
            }
        })
        .collect();
    Ok(TrendReport {
        query: query.clone(),
        segments,
        per_doc,
    })
}

/// Corpus-wide occurrence count of each query.
pub fn keyword_counts(tc: &TokenizedCorpus, keywords: &[TermQuery]) -> Vec<(String, u64)> {
    let mut freq = vec![0u64; tc.vocab.len()];
    for &w in tc.docs.iter().flatten() {
        freq[w as usize] += 1;
    }
    keywords
        .iter()
        .map(|q| {
            let n = q.resolve(&tc.vocab).iter().map(|&w| freq[w as usize]).sum();
            (q.pattern().to_string(), n)
        })
        .collect()
}

/// For every occurrence of `query`, counts each token at most `window`
/// positions away on either side within the same document. The occurrence
/// itself is not counted; other keyword occurrences in the window are.
pub fn neighbor_counts(
    tc: &TokenizedCorpus,
    query: &TermQuery,
    window: usize,
) -> BTreeMap<u32, u64> {
    let ids: HashSet<u32> = query.resolve(&tc.vocab).into_iter().collect();
    let mut counts = BTreeMap::new();
    for doc in &tc.docs {
        for (i, w) in doc.iter().enumerate() {
            if !ids.contains(w) {
                continue;
            }
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(doc.len().saturating_sub(1));
            for (j, &n) in doc.iter().enumerate().take(hi + 1).skip(lo) {
                if j != i {
                    *counts.entry(n).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollocateEdge {
    pub keyword: String,
    pub term: String,
    pub weight: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollocateGraph {
    pub window: usize,
    pub keywords: Vec<String>,
    pub edges: Vec<CollocateEdge>,
}

impl CollocateGraph {
    pub fn edges_for<'a>(&'a self, keyword: &'a str) -> impl Iterator<Item = &'a CollocateEdge> {
        self.edges.iter().filter(move |e| e.keyword == keyword)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph collocates {\n");
        s.push_str(&format!("  graph [window={}];\n", self.window));
        for k in &self.keywords {
            s.push_str(&format!("  {} [shape=box, style=bold];\n", dot_id(k)));
        }
        for e in &self.edges {
            s.push_str(&format!(
                "  {} -> {} [weight={}, label={}];\n",
                dot_id(&e.keyword),
                dot_id(&e.term),
                e.weight,
                e.weight
            ));
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

fn dot_id(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Collocate network for `keywords`, keeping the `top_n` heaviest
/// neighbors per keyword (ties by ascending term id).
pub fn collocates(
    tc: &TokenizedCorpus,
    keywords: &[TermQuery],
    window: usize,
    top_n: usize,
) -> Result<CollocateGraph> {
    if window == 0 {
        return Err(Error::Config("collocate window must be >= 1".into()));
    }
    let mut edges = Vec::new();
    for q in keywords {
        let mut neighbors: Vec<(u32, u64)> = neighbor_counts(tc, q, window).into_iter().collect();
        neighbors.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        neighbors.truncate(top_n);
        edges.extend(neighbors.into_iter().map(|(w, weight)| CollocateEdge {
            keyword: q.pattern().to_string(),
            term: tc.vocab.term(w).to_string(),
            weight,
        }));
    }
    Ok(CollocateGraph {
        window,
        keywords: keywords.iter().map(|q| q.pattern().to_string()).collect(),
        edges,
    })
}

/// `Term,Doc,Count,Relative,Seg1..SegN`, one row per query and document.
pub fn write_trend_csv<T: Scalar + std::fmt::Display, W: Write>(
    reports: &[TrendReport<T>],
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let segments = reports.first().map_or(0, |r| r.segments);
    let mut header: Vec<String> = ["Term", "Doc", "Count", "Relative"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=segments).map(|i| format!("Seg{i}")));
    w.write_record(&header)?;
    for r in reports {
        for d in &r.per_doc {
            let mut row = vec![
                r.query.pattern().to_string(),
                d.doc_id.clone(),
                d.count.to_string(),
                d.relative.to_string(),
            ];
            row.extend(d.segments.iter().map(u64::to_string));
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Keyword, corpus count and its strongest collocates, space separated.
pub fn write_keyword_table<W: Write>(
    counts: &[(String, u64)],
    graph: &CollocateGraph,
    associated: usize,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["keyword", "count", "associated_terms"])?;
    for (k, n) in counts {
        let terms: Vec<&str> = graph
            .edges_for(k)
            .take(associated)
            .map(|e| e.term.as_str())
            .collect();
        w.write_record([k.as_str(), &n.to_string(), &terms.join(" ")])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::PreprocessProfile;

    fn tc(docs: &[&[&str]]) -> TokenizedCorpus {
        TokenizedCorpus::from_terms(
            PreprocessProfile::topic(),
            (0..docs.len()).map(|i| format!("d{i}")).collect(),
            docs.iter()
                .map(|d| d.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
    }

    fn q(p: &str) -> TermQuery {
        TermQuery::parse(p).unwrap()
    }

    #[test]
    fn query_parsing() {
        assert!(!q("coat").is_wildcard());
        assert!(q("coat*").is_wildcard());
        assert!(matches!(TermQuery::parse("co*at"), Err(Error::Query(_))));
        assert!(TermQuery::parse("*").is_err());
        assert!(TermQuery::parse("a**").is_err());
        assert!(q("coat*").matches("coating"));
        assert!(!q("coat").matches("coats"));
    }

    #[test]
    fn trend_relative_frequency() {
        let c = tc(&[&["x", "y", "x", "z"]]);
        let r: TrendReport<f64> = trend(&c, &q("x"), 2).unwrap();
        let d = &r.per_doc[0];
        assert_eq!(d.count, 2);
        assert_eq!(d.relative, 5_000_000.0);
        assert_eq!(d.segments, [1, 1]);
    }

    #[test]
    fn trend_wildcard_aggregates() {
        let c = tc(&[&["coat", "coating", "coats", "boat"]]);
        let r: TrendReport<f64> = trend(&c, &q("coat*"), 10).unwrap();
        assert_eq!(r.per_doc[0].count, 3);
        assert_eq!(r.per_doc[0].segments.iter().sum::<u64>(), 3);
    }

    #[test]
    fn trend_absent_term() {
        let c = tc(&[&["a", "b"], &[]]);
        let r: TrendReport<f64> = trend(&c, &q("zzz"), 3).unwrap();
        for d in &r.per_doc {
            assert_eq!(d.count, 0);
            assert_eq!(d.relative, 0.0);
            assert_eq!(d.segments, [0, 0, 0]);
        }
        assert!(trend::<f64>(&c, &q("a"), 0).is_err());
    }

    #[test]
    fn segments_put_remainder_last() {
        // 10 tokens, 3 segments: spans of 3, last gets 4
        let segs: Vec<usize> = (0..10).map(|p| segment_of(p, 10, 3)).collect();
        assert_eq!(segs, [0, 0, 0, 1, 1, 1, 2, 2, 2, 2]);
        let segs: Vec<usize> = (0..3).map(|p| segment_of(p, 3, 10)).collect();
        assert_eq!(segs, [0, 1, 2]);
    }

    #[test]
    fn collocates_hand_example() {
        let c = tc(&[&["a", "b", "c", "b"]]);
        let g = collocates(&c, &[q("c")], 1, 25).unwrap();
        assert_eq!(
            g.edges,
            [CollocateEdge {
                keyword: "c".into(),
                term: "b".into(),
                weight: 2
            }]
        );
    }

    #[test]
    fn collocates_at_document_start() {
        let c = tc(&[&["k", "x", "y"], &["z", "w"]]);
        let g = collocates(&c, &[q("k")], 5, 25).unwrap();
        let terms: Vec<&str> = g.edges.iter().map(|e| e.term.as_str()).collect();
        assert_eq!(terms, ["x", "y"]);
    }

    #[test]
    fn collocates_absent_keyword() {
        let c = tc(&[&["a", "b"]]);
        assert!(collocates(&c, &[q("nope")], 5, 25)
            .unwrap()
            .edges
            .is_empty());
        assert!(collocates(&c, &[q("a")], 0, 25).is_err());
    }

    #[test]
    fn collocates_truncate_by_weight_then_id() {
        let c = tc(&[&["k", "a", "b", "k", "b", "c"]]);
        let g = collocates(&c, &[q("k")], 1, 2).unwrap();
        let got: Vec<(&str, u64)> = g
            .edges
            .iter()
            .map(|e| (e.term.as_str(), e.weight))
            .collect();
        assert_eq!(got, [("b", 2), ("a", 1)]);
    }

    #[test]
    fn keyword_counts_examples() {
        let c = tc(&[&["x", "x", "y"]]);
        assert_eq!(
            keyword_counts(&c, &[q("x"), q("z")]),
            [("x".to_string(), 2), ("z".to_string(), 0)]
        );
    }

    #[test]
    fn exports() {
        let c = tc(&[&["library", "school", "library"], &["libraries"]]);
        let g = collocates(&c, &[q("librar*")], 5, 25).unwrap();
        let dot = g.to_dot();
        assert!(dot.starts_with("digraph collocates {"));
        assert!(dot.contains("\"librar*\" -> \"library\" [weight=2, label=2];"));
        let json: serde_json::Value = serde_json::from_str(&g.to_json().unwrap()).unwrap();
        assert_eq!(json["window"], 5);
        assert_eq!(json["edges"][0]["keyword"], "librar*");

        let r: TrendReport<f64> = trend(&c, &q("librar*"), 2).unwrap();
        let mut buf = Vec::new();
        write_trend_csv(&[r], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "Term,Doc,Count,Relative,Seg1,Seg2");
        assert_eq!(lines[1], "librar*,d0,2,6666666.666666667,1,1");
        assert_eq!(lines[2], "librar*,d1,1,10000000,1,0");

        let mut buf = Vec::new();
        write_keyword_table(&keyword_counts(&c, &[q("librar*")]), &g, 3, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "keyword,count,associated_terms\nlibrar*,3,library school\n"
        );
    }
}
