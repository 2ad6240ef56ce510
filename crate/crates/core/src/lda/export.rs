//! CSV and HTML renderings of a fitted topic model.

use std::fmt::Write as _;
use std::io::Write;

use super::{Tag, TopicModel};
use crate::error::Result;
use crate::num::Real;

/// `doc_id,tag,theta_a,theta_b,...` with theta columns in tag order.
pub fn write_doc_topics<T: Real, W: Write>(model: &TopicModel<T>, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let k = model.num_topics();
    let mut header = vec!["doc_id".to_string(), "tag".to_string()];
    header.extend((0..k).map(|r| format!("theta_{}", Tag::from_rank(r))));
    w.write_record(&header)?;

    let tags = model.dominant_tags();
    for (d, tag) in tags.iter().enumerate() {
        let theta = model.theta(d);
        let mut row = vec![model.doc_ids[d].clone(), tag.to_string()];
        row.extend(model.topic_order().iter().map(|&t| theta[t].to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// `tag,rank,term,phi` for the `n` top words of every topic.
pub fn write_topic_words<T: Real, W: Write>(model: &TopicModel<T>, n: usize, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["tag", "rank", "term", "phi"])?;
    for (rank, &topic) in model.topic_order().iter().enumerate() {
        let tag = Tag::from_rank(rank).to_string();
        for (i, (term, phi)) in model.top_words(topic, n).into_iter().enumerate() {
            w.write_record([
                tag.as_str(),
                &(i + 1).to_string(),
                &model.terms[term as usize],
                &phi.to_string(),
            ])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Static summary page: per tag, the top words and the titles of the most
/// representative documents. `titles[d]` belongs to document `d`.
pub fn render_html<T: Real>(
    model: &TopicModel<T>,
    titles: &[String],
    n: usize,
    generated_at: Option<&str>,
) -> String {
    let mut s = String::new();
    s.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    s.push_str("<title>Topic model summary</title>\n");
    s.push_str("<style>body{font-family:sans-serif}table{border-collapse:collapse}");
    s.push_str("td,th{border:1px solid #999;padding:4px 8px;vertical-align:top}</style>\n");
    s.push_str("</head>\n<body>\n<h1>Topic model summary</h1>\n");
    let _ = writeln!(
        s,
        "<p>documents={}; topics={}; alpha={}; beta={}; iterations={}; seed={}</p>",
        model.num_docs(),
        model.num_topics(),
        model.config.alpha,
        model.config.beta,
        model.config.iterations,
        model.config.seed
    );
    if let Some(ts) = generated_at {
        let _ = writeln!(s, "<p>generated {}</p>", escape(ts));
    }

    let weights = model.topic_weights();
    s.push_str("<h2>Top words</h2>\n<table>\n<tr>");
    for (rank, &topic) in model.topic_order().iter().enumerate() {
        let _ = write!(
            s,
            "<th>Topic {} ({:.4})</th>",
            Tag::from_rank(rank),
            weights[topic].to_f64_lossy()
        );
    }
    s.push_str("</tr>\n");
    let words: Vec<_> = model
        .topic_order()
        .iter()
        .map(|&t| model.top_words(t, n))
        .collect();
    for i in 0..n.min(model.vocab_size()) {
        s.push_str("<tr>");
        for col in &words {
            let _ = write!(s, "<td>{}</td>", escape(&model.terms[col[i].0 as usize]));
        }
        s.push_str("</tr>\n");
    }
    s.push_str("</table>\n");

    s.push_str("<h2>Representative documents</h2>\n<table>\n<tr><th></th>");
    for rank in 0..model.num_topics() {
        let _ = write!(s, "<th>Topic {}</th>", Tag::from_rank(rank));
    }
    s.push_str("</tr>\n");
    let docs: Vec<_> = model
        .topic_order()
        .iter()
        .map(|&t| model.representative_docs(t, n))
        .collect();
    for i in 0..n.min(model.num_docs()) {
        let _ = write!(s, "<tr><th>Representative {}</th>", i + 1);
        for col in &docs {
            let (d, theta) = col[i];
            let title = titles
                .get(d)
                .filter(|t| !t.is_empty())
                .unwrap_or(&model.doc_ids[d]);
            let _ = write!(
                s,
                "<td>{} <small>({:.1}%)</small></td>",
                escape(title),
                theta.to_f64_lossy() * 100.0
            );
        }
        s.push_str("</tr>\n");
    }
    s.push_str("</table>\n</body>\n</html>\n");
    s
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            _ => out.push(c),
        }
    }
    out
}
