//! Cluster-to-topic correspondence: majority mapping, error rate, and
//! per-topic precision/recall/F1.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicScore {
    pub topic: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Documents with this gold topic.
    pub support: usize,
    /// Documents in the clusters mapped to this topic.
    pub predicted: usize,
    pub correct: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterTopicReport {
    /// Gold topics in ascending name order; contingency columns follow it.
    pub topics: Vec<String>,
    /// `k × |topics|` document counts.
    pub contingency: Vec<Vec<usize>>,
    /// Topic index assigned to each cluster.
    pub mapping: Vec<usize>,
    pub matched: usize,
    pub total: usize,
    pub error_rate: f64,
    pub per_topic: Vec<TopicScore>,
    pub macro_f1: f64,
    pub micro_f1: f64,
}

impl ClusterTopicReport {
    pub fn mapped_topic(&self, cluster: usize) -> &str {
        &self.topics[self.mapping[cluster]]
    }

    /// Plain-text summary table.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let width = self.topics.iter().map(String::len).max().unwrap_or(5).max(5);
        let _ = writeln!(
            s,
            "{:<w$}  {:>9}  {:>9}  {:>9}  {:>7}",
            "topic",
            "precision",
            "recall",
            "f1",
            "support",
            w = width
        );
        for t in &self.per_topic {
            let _ = writeln!(
                s,
                "{:<w$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}",
                t.topic,
                t.precision,
                t.recall,
                t.f1,
                t.support,
                w = width
            );
        }
        let _ = writeln!(s, "macro-F1 {:.4}  micro-F1 {:.4}", self.macro_f1, self.micro_f1);
        let _ = writeln!(
            s,
            "incorrect assignments: {}/{} ({:.2}%)",
            self.total - self.matched,
            self.total,
            100.0 * self.error_rate
        );
        s
    }
}

/// Maps clusters onto gold topics.
///
/// With as many clusters as topics the mapping is the one-to-one assignment
/// maximising matched documents; otherwise each cluster takes its plurality
/// topic. Ties go to the topic whose name sorts first.
pub fn map_clusters_to_topics<S: AsRef<str>>(
    assignments: &[usize],
    k: usize,
    gold: &[Option<S>],
) -> Result<ClusterTopicReport> {
    if assignments.len() != gold.len() {
        return Err(Error::InvalidArgument(format!(
            "{} assignments but {} gold labels",
            assignments.len(),
            gold.len()
        )));
    }
    if k == 0 || assignments.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one cluster and one document".into(),
        ));
    }
    if let Some(&bad) = assignments.iter().find(|&&a| a >= k) {
        return Err(Error::InvalidArgument(format!(
            "cluster id {bad} out of range for k = {k}"
        )));
    }
    let labels: Vec<&str> = gold
        .iter()
        .enumerate()
        .map(|(i, g)| {
            g.as_ref()
                .map(AsRef::as_ref)
                .ok_or_else(|| Error::MissingTopic(format!("#{i}")))
        })
        .collect::<Result<_>>()?;
    let topics: Vec<String> = labels
        .iter()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(String::from)
        .collect();

    let mut contingency = vec![vec![0usize; topics.len()]; k];
    for (&c, l) in assignments.iter().zip(&labels) {
        let t = topics.binary_search_by(|x| x.as_str().cmp(l)).expect("topic collected");
        contingency[c][t] += 1;
    }

    let mapping = if k == topics.len() {
        optimal_assignment(&contingency)
    } else {
        contingency
            .iter()
            .map(|row| {
                let best = row.iter().copied().max().unwrap_or(0);
                row.iter().position(|&v| v == best).unwrap_or(0)
            })
            .collect()
    };
    Ok(report_from(topics, contingency, mapping))
}

fn report_from(topics: Vec<String>, contingency: Vec<Vec<usize>>, mapping: Vec<usize>) -> ClusterTopicReport {
    let total: usize = contingency.iter().flatten().sum();
    let matched: usize = mapping.iter().enumerate().map(|(c, &t)| contingency[c][t]).sum();
    let (per_topic, macro_f1) = prf_from_counts(&contingency, &mapping, &topics);
    ClusterTopicReport {
        error_rate: (total - matched) as f64 / total as f64,
        micro_f1: matched as f64 / total as f64,
        topics,
        contingency,
        mapping,
        matched,
        total,
        per_topic,
        macro_f1,
    }
}

/// Per-topic precision, recall and F1 for a cluster→topic mapping, plus
/// their unweighted mean F1. Topics with no mapped cluster score zero.
pub fn prf_from_counts(contingency: &[Vec<usize>], mapping: &[usize], topics: &[String]) -> (Vec<TopicScore>, f64) {
    let scores: Vec<TopicScore> = topics
        .iter()
        .enumerate()
        .map(|(t, name)| {
            let support: usize = contingency.iter().map(|row| row[t]).sum();
            let (mut predicted, mut correct) = (0, 0);
            for (c, row) in contingency.iter().enumerate() {
                if mapping[c] == t {
                    predicted += row.iter().sum::<usize>();
                    correct += row[t];
                }
            }
            let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
            TopicScore {
                topic: name.clone(),
                precision: ratio(correct, predicted),
                recall: ratio(correct, support),
                f1: ratio(2 * correct, predicted + support),
                support,
                predicted,
                correct,
            }
        })
        .collect();
    let macro_f1 = if scores.is_empty() {
        0.0
    } else {
        scores.iter().map(|s| s.f1).sum::<f64>() / scores.len() as f64
    };
    (scores, macro_f1)
}

/// Row→column assignment maximising the summed counts of a square matrix
/// (Hungarian algorithm with potentials, O(n³)).
pub fn optimal_assignment(counts: &[Vec<usize>]) -> Vec<usize> {
    let n = counts.len();
    if n == 0 {
        return Vec::new();
    }
    let max = counts.iter().flatten().copied().max().unwrap_or(0) as i64;
    // minimise cost = max - count; 1-based arrays per the classic formulation
    let cost = |i: usize, j: usize| max - counts[i - 1][j - 1] as i64;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[p[j] - 1] = j - 1;
    }
    assignment
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(spec: &[(&str, usize)]) -> Vec<Option<String>> {
        spec.iter()
            .flat_map(|&(t, n)| std::iter::repeat_n(Some(t.to_string()), n))
            .collect()
    }

    #[test]
    fn two_by_two_hand_example() {
        // cluster 0: 90 a + 10 b; cluster 1: 10 a + 90 b
        let mut assignments = vec![0; 90];
        assignments.extend([1; 10]);
        assignments.extend([0; 10]);
        assignments.extend([1; 90]);
        let gold = labels(&[("a", 100), ("b", 100)]);
        let r = map_clusters_to_topics(&assignments, 2, &gold).unwrap();
        assert_eq!(r.contingency, vec![vec![90, 10], vec![10, 90]]);
        assert_eq!(r.mapping, vec![0, 1]);
        assert_eq!(r.error_rate, 0.10);
        assert_eq!(r.macro_f1, 0.9);
        for t in &r.per_topic {
            assert_eq!((t.precision, t.recall), (0.9, 0.9));
        }
    }

    #[test]
    fn perfect_clustering_under_relabeling() {
        let gold = labels(&[("econ", 200), ("hist", 200), ("law", 200)]);
        let assignments: Vec<usize> = (0..600).map(|i| [2, 0, 1][i / 200]).collect();
        let r = map_clusters_to_topics(&assignments, 3, &gold).unwrap();
        assert_eq!(r.error_rate, 0.0);
        assert_eq!(r.macro_f1, 1.0);
        assert!(r.per_topic.iter().all(|t| t.f1 == 1.0));
        assert_eq!(r.mapped_topic(2), "econ");
    }

    #[test]
    fn plurality_mapping_when_k_differs() {
        // three clusters, two topics: clusters 0 and 1 both lean to "a"
        let assignments = [0, 0, 0, 1, 1, 2, 2, 2];
        let gold = labels(&[("a", 5), ("b", 3)]);
        let r = map_clusters_to_topics(&assignments, 3, &gold).unwrap();
        assert_eq!(r.mapping, vec![0, 0, 1]);
        assert_eq!(r.error_rate, 0.0);
        let r = map_clusters_to_topics(&[0, 0, 0, 0], 2, &labels(&[("a", 2), ("b", 2)])).unwrap();
        // topic b is assigned the empty cluster
        assert_eq!(r.mapping, vec![0, 1]);
        let b = &r.per_topic[1];
        assert_eq!((b.precision, b.recall, b.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn missing_labels_rejected() {
        let gold = vec![Some("a".to_string()), None];
        assert!(matches!(
            map_clusters_to_topics(&[0, 0], 1, &gold),
            Err(Error::MissingTopic(_))
        ));
        let gold = labels(&[("a", 2)]);
        assert!(map_clusters_to_topics(&[0, 5], 2, &gold).is_err());
    }

    #[test]
    fn table_mentions_error_rate() {
        let gold = labels(&[("a", 1), ("b", 1)]);
        let r = map_clusters_to_topics(&[0, 0], 2, &gold).unwrap();
        assert!(r.render_table().contains("incorrect assignments: 1/2 (50.00%)"));
    }
}
