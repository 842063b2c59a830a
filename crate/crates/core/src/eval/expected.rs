//! Average precision in expectation over independent Bernoulli labels.
//!
//! When the data come with a known probability of each label, a ranking can
//! be judged by the AP it earns on average rather than on one draw. Ranking
//! by that probability maximises the expectation: swapping an adjacent pair
//! so that the likelier positive comes first moves a positive up in more
//! label draws than it moves one down, and AP only rises when a positive
//! moves up. Ties in probability may be broken either way at no cost.

use super::EvalError;
use crate::scalar::Scalar;

/// Adds one Bernoulli(`p`) trial to a distribution of success counts.
fn add_trial(dist: &mut Vec<f64>, p: f64) {
    dist.push(0.0);
    for k in (1..dist.len()).rev() {
        dist[k] = dist[k] * (1.0 - p) + dist[k - 1] * p;
    }
    dist[0] *= 1.0 - p;
}

/// Exact `E[AP | at least one positive]` of ranking by `scores` when label
/// `i` is an independent Bernoulli(`probs[i]`).
///
/// AP follows [`pr_curve`](super::pr_curve): equal scores share one
/// threshold. With `A`, `X` and `B` the positives above, inside and below a
/// tie group of cumulative size `N`, the group adds
/// `E[X (A + X) / (N (A + X + B))]`; the three counts are independent
/// Poisson-binomials, so the sum is taken over their exact distributions.
/// `None` when every probability is zero.
pub fn expected_ap<F: Scalar>(scores: &[F], probs: &[f64]) -> Result<Option<f64>, EvalError> {
    if scores.len() != probs.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: probs.len(),
        });
    }
    if scores.is_empty() {
        return Err(EvalError::Empty);
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore(i));
    }
    if let Some(i) = probs.iter().position(|p| !(0.0..=1.0).contains(p)) {
        return Err(EvalError::InvalidProbability(i));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));
    let mut groups: Vec<&[usize]> = Vec::new();
    let mut rest = &order[..];
    while let Some(&first) = rest.first() {
        let len = rest.iter().take_while(|&&i| scores[i] == scores[first]).count();
        groups.push(&rest[..len]);
        rest = &rest[len..];
    }

    let mut below = vec![Vec::new(); groups.len()];
    let mut dist = vec![1.0];
    for (g, items) in groups.iter().enumerate().rev() {
        below[g] = dist.clone();
        for &i in *items {
            add_trial(&mut dist, probs[i]);
        }
    }
    let any_positive = 1.0 - dist[0];
    if any_positive <= 0.0 {
        return Ok(None);
    }

    let mut above = vec![1.0];
    let mut seen = 0usize;
    let mut total = 0.0;
    for (g, items) in groups.iter().enumerate() {
        let mut inside = vec![1.0];
        for &i in *items {
            add_trial(&mut inside, probs[i]);
        }
        seen += items.len();
        // w[s] = sum over x + a = s of x P(X = x) P(A = a)
        let mut w = vec![0.0; above.len() + inside.len() - 1];
        for (x, &px) in inside.iter().enumerate().skip(1) {
            if px == 0.0 {
                continue;
            }
            for (a, &pa) in above.iter().enumerate() {
                w[a + x] += x as f64 * px * pa;
            }
        }
        let mut group_sum = 0.0;
        for (s, &ws) in w.iter().enumerate().skip(1) {
            if ws == 0.0 {
                continue;
            }
            let h: f64 = below[g].iter().enumerate().map(|(b, &pb)| pb / (s + b) as f64).sum();
            group_sum += s as f64 * ws * h;
        }
        total += group_sum / seen as f64;
        for &i in *items {
            add_trial(&mut above, probs[i]);
        }
    }
    Ok(Some(total / any_positive))
}

/// Expected AP of ranking by the true label probabilities themselves, the
/// largest expected AP any fixed ranking can reach. `None` when every
/// probability is zero.
pub fn bayes_optimal_ap(probs: &[f64]) -> Result<Option<f64>, EvalError> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]));
    // Distinct scores in posterior order; ties broken by index.
    let mut scores = vec![0.0; probs.len()];
    for (rank, &i) in order.iter().enumerate() {
        scores[i] = (probs.len() - rank) as f64;
    }
    expected_ap(&scores, probs)
}
