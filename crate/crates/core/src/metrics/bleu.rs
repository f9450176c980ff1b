use std::collections::HashMap;

use crate::{Error, Result};

/// Numerator added to an n-gram precision with no matches.
pub const BLEU_EPSILON: f64 = 1e-9;

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Sentence BLEU with uniform weights over orders `1..=max_n`, clipped n-gram
/// precision and the brevity penalty. Tokens are lowercased and split on
/// whitespace. A precision with zero matches becomes `ε / total`. Orders
/// longer than the candidate contribute no n-grams and are left out of the
/// geometric mean, so `bleu(r, r) == 1` for every non-empty `r`.
pub fn bleu(reference: &str, candidate: &str, max_n: usize) -> Result<f64> {
    let reference: Vec<String> = reference
        .split_whitespace()
        .map(str::to_lowercase)
        .collect();
    if reference.is_empty() {
        return Err(Error::InvalidInput("BLEU reference is empty".into()));
    }
    if max_n == 0 {
        return Err(Error::InvalidInput("BLEU max_n must be >= 1".into()));
    }
    let candidate: Vec<String> = candidate
        .split_whitespace()
        .map(str::to_lowercase)
        .collect();
    if candidate.is_empty() {
        return Ok(0.0);
    }

    let mut log_sum = 0.0;
    let mut orders = 0;
    for n in 1..=max_n {
        let cand = ngram_counts(&candidate, n);
        let total: usize = cand.values().sum();
        if total == 0 {
            continue;
        }
        let refc = ngram_counts(&reference, n);
        let matched: usize = cand
            .iter()
            .map(|(g, &c)| c.min(refc.get(g).copied().unwrap_or(0)))
            .sum();
        let p = if matched == 0 {
            BLEU_EPSILON / total as f64
        } else {
            matched as f64 / total as f64
        };
        log_sum += p.ln();
        orders += 1;
    }
    let c = candidate.len() as f64;
    let r = reference.len() as f64;
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    Ok((bp * (log_sum / orders as f64).exp()).clamp(0.0, 1.0))
}
