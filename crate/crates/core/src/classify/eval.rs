use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Counts indexed `[predicted][true]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: Vec<String>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<String>) -> Self {
        let k = classes.len();
        Self {
            classes,
            counts: vec![0; k * k],
        }
    }

    /// Class set is the sorted union of both label lists.
    pub fn from_labels<S: AsRef<str>>(predicted: &[S], truth: &[S]) -> Self {
        assert_eq!(predicted.len(), truth.len());
        let mut classes: Vec<String> = predicted
            .iter()
            .chain(truth)
            .map(|s| s.as_ref().to_string())
            .collect();
        classes.sort();
        classes.dedup();
        let mut cm = Self::new(classes);
        for (p, t) in predicted.iter().zip(truth) {
            cm.record(p.as_ref(), t.as_ref());
        }
        cm
    }

    pub fn with_classes<S: AsRef<str>>(classes: Vec<String>, predicted: &[S], truth: &[S]) -> Self {
        let mut cm = Self::new(classes);
        for (p, t) in predicted.iter().zip(truth) {
            cm.record(p.as_ref(), t.as_ref());
        }
        cm
    }

    fn index(&self, class: &str) -> usize {
        self.classes
            .iter()
            .position(|c| c == class)
            .unwrap_or_else(|| panic!("class `{class}` not in confusion matrix"))
    }

    pub fn record(&mut self, predicted: &str, truth: &str) {
        let (p, t) = (self.index(predicted), self.index(truth));
        let k = self.classes.len();
        self.counts[p * k + t] += 1;
    }

    pub fn set(&mut self, predicted: usize, truth: usize, count: u64) {
        let k = self.classes.len();
        self.counts[predicted * k + truth] = count;
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn get(&self, predicted: usize, truth: usize) -> u64 {
        self.counts[predicted * self.classes.len() + truth]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.classes.len()).map(|c| self.get(c, c)).sum()
    }

    /// Number of predictions of class `c`.
    pub fn row_sum(&self, c: usize) -> u64 {
        (0..self.classes.len()).map(|t| self.get(c, t)).sum()
    }

    /// Number of true instances of class `c`.
    pub fn col_sum(&self, c: usize) -> u64 {
        (0..self.classes.len()).map(|p| self.get(p, c)).sum()
    }

    /// Same counts with classes reordered: new class `i` is old
    /// `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let classes = perm.iter().map(|&i| self.classes[i].clone()).collect();
        let mut out = Self::new(classes);
        for (pi, &p) in perm.iter().enumerate() {
            for (ti, &t) in perm.iter().enumerate() {
                out.set(pi, ti, self.get(p, t));
            }
        }
        out
    }
}

/// Which documents an evaluation covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EvalPopulation {
    /// Held-out documents only.
    #[default]
    Test,
    /// Every document, training ones included.
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<T> {
    pub confusion: ConfusionMatrix,
    pub accuracy: T,
    /// `None` when the class was never predicted.
    pub precision: Vec<Option<T>>,
    /// `None` when the class never occurs in the truth.
    pub recall: Vec<Option<T>>,
    /// `None` when chance agreement is 1 (single-class marginals).
    pub kappa: Option<T>,
}

impl<T: Scalar> EvalReport<T> {
    pub fn from_confusion(confusion: ConfusionMatrix) -> Result<Self> {
        let n = confusion.total();
        if n == 0 {
            return Err(Error::Data("cannot evaluate an empty test set".into()));
        }
        let k = confusion.classes().len();
        let total = T::from_count(n);
        let ratio = |num: u64, den: u64| -> Option<T> {
            (den > 0).then(|| T::from_count(num) / T::from_count(den))
        };
        let precision: Vec<Option<T>> = (0..k)
            .map(|c| ratio(confusion.get(c, c), confusion.row_sum(c)))
            .collect();
        let recall: Vec<Option<T>> = (0..k)
            .map(|c| ratio(confusion.get(c, c), confusion.col_sum(c)))
            .collect();
        let observed = T::from_count(confusion.trace()) / total.clone();
        let mut expected = T::zero();
        for c in 0..k {
            let p = T::from_count(confusion.row_sum(c)) / total.clone();
            let t = T::from_count(confusion.col_sum(c)) / total.clone();
            expected = expected + p * t;
        }
        let kappa = if expected == T::one() {
            log::warn!("kappa undefined: chance agreement is 1");
            None
        } else {
            Some((observed.clone() - expected.clone()) / (T::one() - expected))
        };
        for (c, name) in confusion.classes().iter().enumerate() {
            if precision[c].is_none() {
                log::warn!("class `{name}` never predicted; precision reported as 0");
            }
            if recall[c].is_none() {
                log::warn!("class `{name}` absent from truth; recall reported as 0");
            }
        }
        Ok(Self {
            confusion,
            accuracy: observed,
            precision,
            recall,
            kappa,
        })
    }

    fn kappa_text(&self) -> String {
        match &self.kappa {
            Some(k) => format!("{:.3}", k.to_f64().unwrap_or(f64::NAN)),
            None => "undefined".to_string(),
        }
    }

    fn grid(&self, label_prefix: &str) -> Vec<Vec<String>> {
        let k = self.confusion.classes().len();
        let classes = self.confusion.classes();
        let mut rows = Vec::with_capacity(k + 3);
        let mut first = vec![String::new(); k + 2];
        first[0] = format!("kappa: {}", self.kappa_text());
        rows.push(first);

        let mut header = vec![String::new()];
        header.extend(classes.iter().map(|c| format!("true {label_prefix}{c}")));
        header.push("class precision".into());
        rows.push(header);

        for (p, class) in classes.iter().enumerate() {
            let mut row = vec![format!("pred. {label_prefix}{class}")];
            row.extend((0..k).map(|t| self.confusion.get(p, t).to_string()));
            row.push(percent(&self.precision[p]));
            rows.push(row);
        }

        let mut recall = vec!["class recall".to_string()];
        recall.extend(self.recall.iter().map(percent));
        recall.push(String::new());
        rows.push(recall);
        rows
    }

    /// Tab-separated report: a kappa line, then the predicted-by-true count
    /// grid with a class precision column and a class recall row. Every line
    /// has `classes + 2` cells.
    pub fn render_text(&self, label_prefix: &str) -> String {
        let mut s = String::new();
        for row in self.grid(label_prefix) {
            let _ = writeln!(s, "{}", row.join("\t"));
        }
        s
    }

    /// The same grid as RFC 4180 CSV.
    pub fn write_csv<W: Write>(&self, label_prefix: &str, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in self.grid(label_prefix) {
            w.write_record(&row)?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

fn percent<T: Scalar>(v: &Option<T>) -> String {
    let x = v.as_ref().and_then(|v| v.to_f64()).unwrap_or(0.0);
    format!("{:.2}%", x * 100.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn cm(classes: &[&str], rows: &[&[u64]]) -> ConfusionMatrix {
        let mut m = ConfusionMatrix::new(classes.iter().map(|s| s.to_string()).collect());
        for (p, r) in rows.iter().enumerate() {
            for (t, &c) in r.iter().enumerate() {
                m.set(p, t, c);
            }
        }
        m
    }

    #[test]
    fn half_right_two_class() {
        let r = EvalReport::<Q>::from_confusion(cm(&["a", "b"], &[&[1, 1], &[1, 1]])).unwrap();
        assert_eq!(r.accuracy, Q::new(1, 2));
        assert_eq!(r.kappa, Some(Q::from_integer(0)));
    }

    #[test]
    fn single_class_kappa_undefined() {
        let r = EvalReport::<f64>::from_confusion(cm(&["a"], &[&[7]])).unwrap();
        assert_eq!(r.kappa, None);
        assert!(r.render_text("").starts_with("kappa: undefined\t"));
    }

    #[test]
    fn empty_is_error() {
        assert!(EvalReport::<f64>::from_confusion(cm(&["a", "b"], &[&[0, 0], &[0, 0]])).is_err());
    }

    #[test]
    fn unpredicted_class_reports_zero_precision() {
        // class b never predicted
        let r = EvalReport::<f64>::from_confusion(cm(&["a", "b"], &[&[3, 2], &[0, 0]])).unwrap();
        assert_eq!(r.precision[1], None);
        assert_eq!(r.recall[1], Some(0.0));
        let text = r.render_text("");
        assert!(text.contains("pred. b\t0\t0\t0.00%"));
    }

    #[test]
    fn from_labels_collects_union() {
        let m = ConfusionMatrix::from_labels(&["a", "b", "b"], &["a", "c", "b"]);
        assert_eq!(m.classes(), ["a", "b", "c"]);
        assert_eq!(m.get(1, 2), 1);
        assert_eq!(m.total(), 3);
    }

    #[test]
    fn kappa_textbook_example() {
        // Cohen's classic 2x2: 20/5/10/15 of 50 -> p_o 0.7, p_e 0.5, kappa 0.4
        let r = EvalReport::<Q>::from_confusion(cm(&["y", "n"], &[&[20, 5], &[10, 15]])).unwrap();
        assert_eq!(r.kappa, Some(Q::new(2, 5)));
    }

    #[test]
    fn csv_layout() {
        let r = EvalReport::<f64>::from_confusion(cm(&["a", "b"], &[&[2, 0], &[0, 1]])).unwrap();
        let mut buf = Vec::new();
        r.write_csv("Topic ", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "kappa: 1.000,,,");
        assert_eq!(lines[1], ",true Topic a,true Topic b,class precision");
        assert_eq!(lines[2], "pred. Topic a,2,0,100.00%");
        assert_eq!(lines[4], "class recall,100.00%,100.00%,");
    }
}
