//! Existence and converse bounds on the separation of `K` unit vectors in `n`
//! dimensions.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use crate::block_codes::LinearCode;
use crate::error::{Error, Result};

/// Log-domain margins smaller than this are settled with exact integers.
const TIE_MARGIN: f64 = 1e-8;

fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Whether `2^(n-k) > sum_{i=0}^{d-2} C(n-1, i)` holds, in exact integers.
pub fn gv_condition_exact(n: usize, k: usize, d: usize) -> bool {
    let lhs = BigUint::from(1u8) << (n - k);
    let mut term = BigUint::from(1u8);
    let mut sum = BigUint::from(0u8);
    let top = n - 1;
    for i in 0..d.saturating_sub(1) {
        if i > top {
            break;
        }
        sum += &term;
        term = term * (top - i) / (i + 1);
    }
    lhs > sum
}

/// Largest `d` in `[1, n]` for which an `[n, k]` binary code with minimum
/// distance `d` is guaranteed to exist. Dividing the integer condition by
/// `2^(n-1)` gives `2^(1-k) > P(Bin(n-1, 1/2) <= d-2)`; the left tail is
/// accumulated in the log domain and near-ties fall back to
/// [`gv_condition_exact`].
pub fn gv_largest_dmin(n: usize, k: usize) -> Result<usize> {
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let ln2 = std::f64::consts::LN_2;
    let target = (1.0 - k as f64) * ln2;
    let shift = (n - 1) as f64 * ln2;
    let mut ln_tail = f64::NEG_INFINITY;
    let mut best = 1;
    for d in 2..=n {
        let i = (d - 2) as u64;
        ln_tail = ln_add_exp(ln_tail, ln_binomial((n - 1) as u64, i));
        let margin = target - (ln_tail - shift);
        let holds = if margin.abs() < TIE_MARGIN {
            gv_condition_exact(n, k, d)
        } else {
            margin > 0.0
        };
        if !holds {
            break;
        }
        best = d;
    }
    Ok(best)
}

/// Message bits needed to index `K` classes, `ceil(log2 K)`.
pub fn message_bits(classes: usize) -> usize {
    assert!(classes >= 2, "need K >= 2");
    (usize::BITS - (classes - 1).leading_zeros()) as usize
}

/// `1 - 2 d_GV / n` with `k = ceil(log2 K)`.
pub fn achievable_max_cosine(n: usize, classes: usize) -> Result<f64> {
    if classes < 2 {
        return Err(Error::InvalidParameter("need K >= 2".into()));
    }
    let k = message_bits(classes);
    if k > n {
        return Err(Error::DimensionBelowMessageLength { n, k });
    }
    let d = gv_largest_dmin(n, k)?;
    Ok(1.0 - 2.0 * d as f64 / n as f64)
}

/// Best achievable bound over all dimensions `n' <= n`: a codebook in `n'`
/// dimensions padded with zero coordinates keeps its cosines, so this one is
/// non-increasing in `n` (the raw GV value is not).
pub fn padded_achievable_max_cosine(n: usize, classes: usize) -> Result<f64> {
    let k = message_bits(classes.max(2));
    let mut best = achievable_max_cosine(n, classes)?;
    for m in k..n {
        best = best.min(achievable_max_cosine(m, classes)?);
    }
    Ok(best)
}

/// No `K` unit vectors have all pairwise cosines below `-1/(K-1)`.
pub fn rankin_converse(classes: usize) -> f64 {
    assert!(classes >= 2, "need K >= 2");
    -1.0 / (classes - 1) as f64
}

pub fn singleton_dmin_upper(n_q: usize, k_q: usize) -> usize {
    assert!(1 <= k_q && k_q <= n_q, "need 1 <= k_q <= n_q");
    n_q - k_q + 1
}

/// Certified maximum cosine `1 - 2 d_min / n` of any codebook drawn from a
/// binary code.
pub fn prop1_cosine_bound(code: &LinearCode) -> Result<f64> {
    if !code.is_binary() {
        return Err(Error::InvalidParameter(
            "the Hamming-distance certificate needs a binary code".into(),
        ));
    }
    let d = code.d_min()?;
    let n = code.length() as f64;
    Ok((n - 2.0 * d as f64) / n)
}

/// Certified maximum cosine `1 - (d_min / n_q)(d_E^2 / 2)` for a q-ary code
/// whose symbols map to component points with squared distance at least
/// `d_E^2`.
pub fn prop2_cosine_bound(d_min: usize, n_q: usize, component_sq_distance: f64) -> f64 {
    assert!(d_min >= 1 && n_q >= 1, "need d_min, n_q >= 1");
    assert!(
        component_sq_distance > 0.0 && component_sq_distance <= 4.0,
        "component squared distance must lie in (0, 4]"
    );
    1.0 - (d_min as f64 / n_q as f64) * (component_sq_distance / 2.0)
}

/// Squared distance between vertices of a regular `q`-point simplex, `2q/(q-1)`.
pub fn simplex_component_sq_distance(q: usize) -> f64 {
    assert!(q >= 2, "need q >= 2");
    2.0 * q as f64 / (q - 1) as f64
}

/// Certificate of a Reed–Solomon code `[q, k_q, q - k_q + 1]` with simplex
/// components.
pub fn reed_solomon_simplex_bound(q: usize, k_q: usize) -> f64 {
    prop2_cosine_bound(
        singleton_dmin_upper(q, k_q),
        q,
        simplex_component_sq_distance(q),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub classes: usize,
    pub n: usize,
    pub message_bits: usize,
    pub gv_dmin: usize,
    pub achievable_max_cosine: f64,
    pub converse_min_of_max_cosine: f64,
    /// `0` when `n >= K`: one-hot vectors fit.
    pub onehot_reference: Option<f64>,
    /// `min(achievable, onehot_reference)`.
    pub tightened_achievable: f64,
    /// Minimum of the achievable bound over `n' <= n`.
    pub padded_achievable: f64,
}

pub fn bounds_report(classes: usize, n: usize) -> Result<BoundsReport> {
    let achievable = achievable_max_cosine(n, classes)?;
    let k = message_bits(classes);
    let onehot = (n >= classes).then_some(0.0);
    Ok(BoundsReport {
        classes,
        n,
        message_bits: k,
        gv_dmin: gv_largest_dmin(n, k)?,
        achievable_max_cosine: achievable,
        converse_min_of_max_cosine: rankin_converse(classes),
        onehot_reference: onehot,
        tightened_achievable: onehot.map_or(achievable, |z| achievable.min(z)),
        padded_achievable: padded_achievable_max_cosine(n, classes)?,
    })
}
