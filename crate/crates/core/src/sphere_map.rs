//! Codebooks of unit vectors: code-based mappings, closed-form constructions,
//! random baselines, and pairwise-cosine statistics.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::block_codes::{CodeFamily, LinearCode};
use crate::error::{Error, Result};

/// Tolerance on row norms accepted by [`Codebook::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Cosine values closer than this are reported as one atom.
pub const ATOM_TOLERANCE: f64 = 1e-12;

/// Default number of uniform histogram bins over [-1, 1].
pub const DEFAULT_BINS: usize = 201;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "onehot")]
    OneHot,
    #[serde(rename = "simplex")]
    Simplex,
    #[serde(rename = "rm")]
    RmCode,
    #[serde(rename = "bch")]
    BchCode,
    #[serde(rename = "rs-simplex")]
    RsSimplex,
    /// Any other binary linear code (repetition, user-supplied generators).
    #[serde(rename = "binary-code")]
    BinaryCode,
    #[serde(rename = "random")]
    Random,
    #[serde(rename = "lse")]
    OptimizedLse,
    #[serde(rename = "avg")]
    OptimizedAvg,
}

impl Scheme {
    pub const ALL: [Scheme; 9] = [
        Scheme::OneHot,
        Scheme::Simplex,
        Scheme::RmCode,
        Scheme::BchCode,
        Scheme::RsSimplex,
        Scheme::BinaryCode,
        Scheme::Random,
        Scheme::OptimizedLse,
        Scheme::OptimizedAvg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::OneHot => "onehot",
            Scheme::Simplex => "simplex",
            Scheme::RmCode => "rm",
            Scheme::BchCode => "bch",
            Scheme::RsSimplex => "rs-simplex",
            Scheme::BinaryCode => "binary-code",
            Scheme::Random => "random",
            Scheme::OptimizedLse => "lse",
            Scheme::OptimizedAvg => "avg",
        }
    }

    pub fn is_code_based(self) -> bool {
        matches!(
            self,
            Scheme::RmCode | Scheme::BchCode | Scheme::RsSimplex | Scheme::BinaryCode
        )
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme '{s}'")))
    }
}

/// `K` unit vectors in `R^n`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook {
    classes: usize,
    dim: usize,
    vectors: Vec<f64>,
    scheme: Scheme,
    assignment_seed: Option<u64>,
}

impl Codebook {
    pub fn new(classes: usize, dim: usize, vectors: Vec<f64>, scheme: Scheme) -> Result<Self> {
        if classes < 2 || dim == 0 {
            return Err(Error::InvalidParameter(format!(
                "a codebook needs K >= 2 and n >= 1, got K={classes}, n={dim}"
            )));
        }
        if vectors.len() != classes * dim {
            return Err(Error::InvalidParameter(format!(
                "expected {} entries for a {classes}x{dim} codebook, got {}",
                classes * dim,
                vectors.len()
            )));
        }
        let cb = Codebook {
            classes,
            dim,
            vectors,
            scheme,
            assignment_seed: None,
        };
        for i in 0..classes {
            let norm = norm(cb.row(i));
            if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::InvalidParameter(format!(
                    "row {i} has norm {norm}, expected 1"
                )));
            }
        }
        Ok(cb)
    }

    pub fn with_assignment_seed(mut self, seed: Option<u64>) -> Self {
        self.assignment_seed = seed;
        self
    }

    pub fn num_classes(&self) -> usize {
        self.classes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn assignment_seed(&self) -> Option<u64> {
        self.assignment_seed
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.vectors.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.vectors
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.vectors
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `pi(b) = 2(b - 1/2)/sqrt(n)`: each bit becomes `+-1/sqrt(n)`.
pub fn map_binary(bits: &[u8]) -> Vec<f64> {
    let scale = (bits.len() as f64).sqrt();
    bits.iter()
        .map(|&b| (2.0 * f64::from(b.min(1)) - 1.0) / scale)
        .collect()
}

/// Cosine between the images of two binary words at Hamming distance `d`.
pub fn cosine_from_hamming(d: usize, n: usize) -> f64 {
    assert!(n > 0 && d <= n, "need 0 <= d <= n, n >= 1 (d={d}, n={n})");
    (n as f64 - 2.0 * d as f64) / n as f64
}

fn scheme_for_family(family: &CodeFamily) -> Scheme {
    match family {
        CodeFamily::ReedMuller { .. } => Scheme::RmCode,
        CodeFamily::Bch { .. } => Scheme::BchCode,
        CodeFamily::Punctured { inner, .. } | CodeFamily::Extended { inner } => {
            scheme_for_family(inner)
        }
        _ => Scheme::BinaryCode,
    }
}

/// Message indices assigned to the `K` classes: the first `K` messages, or a
/// seeded random `K`-subset in random order.
fn select_messages(code: &LinearCode, classes: usize, seed: Option<u64>) -> Result<Vec<u128>> {
    let total = code.num_codewords();
    if total < classes as u128 {
        return Err(Error::CodeTooSmall {
            codewords: total,
            classes,
        });
    }
    let Some(seed) = seed else {
        return Ok((0..classes as u128).collect());
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if total <= (4 * classes) as u128 {
        return Ok(index::sample(&mut rng, total as usize, classes)
            .into_iter()
            .map(|i| i as u128)
            .collect());
    }
    let mut seen = std::collections::HashSet::with_capacity(classes);
    let mut out = Vec::with_capacity(classes);
    while out.len() < classes {
        let i = rng.random_range(0..total);
        if seen.insert(i) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Maps `K` codewords of a binary code through [`map_binary`].
pub fn codebook_from_code(
    code: &LinearCode,
    classes: usize,
    assignment_seed: Option<u64>,
) -> Result<Codebook> {
    if !code.is_binary() {
        return Err(Error::InvalidParameter(
            "codebook_from_code needs a binary code; use qary_codebook".into(),
        ));
    }
    if classes < 2 {
        return Err(Error::InvalidParameter("need K >= 2".into()));
    }
    let messages = select_messages(code, classes, assignment_seed)?;
    let mut vectors = Vec::with_capacity(classes * code.length());
    for &m in &messages {
        let bits: Vec<u8> = code.encode(m).into_iter().map(|s| s as u8).collect();
        vectors.extend(map_binary(&bits));
    }
    Ok(Codebook::new(classes, code.length(), vectors, scheme_for_family(code.family()))?
        .with_assignment_seed(assignment_seed))
}

/// Regular simplex: `K` unit vectors in `K - 1` dimensions, all pairwise
/// cosines `-1/(K-1)`.
///
/// Built from the canonical basis `e_1..e_{K-1}` plus the point `beta * 1`
/// with `beta = (1 - sqrt K)/(K - 1)`, which is at distance `sqrt 2` from every
/// `e_i`; the `K` points are then centered and scaled to unit norm.
pub fn simplex_codebook(classes: usize) -> Result<Codebook> {
    if classes < 2 {
        return Err(Error::InvalidParameter("simplex needs K >= 2".into()));
    }
    let n = classes - 1;
    let kf = classes as f64;
    let beta = (1.0 - kf.sqrt()) / n as f64;
    let centroid = (1.0 + beta) / kf;
    let mut vectors = Vec::with_capacity(classes * n);
    for i in 0..classes {
        let row: Vec<f64> = (0..n)
            .map(|j| {
                let p = if i == n {
                    beta
                } else if i == j {
                    1.0
                } else {
                    0.0
                };
                p - centroid
            })
            .collect();
        let r = norm(&row);
        vectors.extend(row.into_iter().map(|x| x / r));
    }
    Codebook::new(classes, n, vectors, Scheme::Simplex)
}

/// Canonical basis vectors `e_1..e_K` in `R^K`.
pub fn onehot_codebook(classes: usize) -> Result<Codebook> {
    onehot_codebook_in(classes, classes)
}

/// Canonical basis vectors `e_1..e_K` in `R^n`, `n >= K`.
pub fn onehot_codebook_in(classes: usize, dim: usize) -> Result<Codebook> {
    if classes < 2 || dim < classes {
        return Err(Error::InvalidParameter(format!(
            "one-hot needs K >= 2 and n >= K, got K={classes}, n={dim}"
        )));
    }
    let mut vectors = vec![0.0; classes * dim];
    for i in 0..classes {
        vectors[i * dim + i] = 1.0;
    }
    Codebook::new(classes, dim, vectors, Scheme::OneHot)
}

/// Rows i.i.d. uniform on the sphere (normalized isotropic Gaussians).
pub fn random_codebook(classes: usize, dim: usize, seed: u64) -> Result<Codebook> {
    let vectors = random_unit_rows(classes, dim, seed)?;
    Codebook::new(classes, dim, vectors, Scheme::Random)
}

pub(crate) fn random_unit_rows(classes: usize, dim: usize, seed: u64) -> Result<Vec<f64>> {
    if classes < 2 || dim == 0 {
        return Err(Error::InvalidParameter(format!(
            "need K >= 2 and n >= 1, got K={classes}, n={dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vectors = Vec::with_capacity(classes * dim);
    for _ in 0..classes {
        loop {
            let row: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
            let r = norm(&row);
            if r > 1e-150 {
                vectors.extend(row.into_iter().map(|x| x / r));
                break;
            }
        }
    }
    Ok(vectors)
}

/// Per-symbol mapping of GF(q) onto `q` points of a unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentMap {
    q: usize,
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl ComponentMap {
    /// Regular simplex of `q = 2^m` points in `q - 1` dimensions with
    /// coordinates `+-1/sqrt(q-1)`: symbol `s` has coordinate `j` (for
    /// `j = 1..q-1`) positive iff `popcount(s & j)` is odd. For `q = 2` this
    /// sends symbol 0 to -1 and symbol 1 to +1.
    pub fn hadamard_simplex(q: usize) -> Result<Self> {
        if q < 2 || !q.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "q={q} is not a power of two >= 2"
            )));
        }
        let dim = q - 1;
        let a = 1.0 / (dim as f64).sqrt();
        let points = (0..q)
            .map(|s| {
                (1..q)
                    .map(|j| if (s & j).count_ones() % 2 == 1 { a } else { -a })
                    .collect()
            })
            .collect();
        Ok(ComponentMap { q, dim, points })
    }

    /// Uses the rows of a codebook as the images of symbols `0..K`.
    pub fn from_codebook(cb: &Codebook) -> Self {
        ComponentMap {
            q: cb.num_classes(),
            dim: cb.dim(),
            points: cb.rows().map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn alphabet_size(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, symbol: usize) -> &[f64] {
        &self.points[symbol]
    }

    /// Smallest squared Euclidean distance between two symbol images.
    pub fn min_sq_distance(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.q {
            for j in i + 1..self.q {
                let d: f64 = self.points[i]
                    .iter()
                    .zip(&self.points[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                best = best.min(d);
            }
        }
        best
    }
}

/// Composite q-ary mapping with the Hadamard-form simplex component.
pub fn qary_codebook(code: &LinearCode, classes: usize) -> Result<Codebook> {
    let component = ComponentMap::hadamard_simplex(code.field_order())?;
    qary_codebook_with(code, classes, &component, None)
}

/// `pi_q(u) = (1/sqrt(n_q)) (pi(u_1), ..., pi(u_{n_q}))`, in `n_q * l` dimensions.
pub fn qary_codebook_with(
    code: &LinearCode,
    classes: usize,
    component: &ComponentMap,
    assignment_seed: Option<u64>,
) -> Result<Codebook> {
    if component.alphabet_size() != code.field_order() {
        return Err(Error::ComponentMismatch(format!(
            "component maps {} symbols but the code is over GF({})",
            component.alphabet_size(),
            code.field_order()
        )));
    }
    if classes < 2 {
        return Err(Error::InvalidParameter("need K >= 2".into()));
    }
    let messages = select_messages(code, classes, assignment_seed)?;
    let n_q = code.length();
    let scale = (n_q as f64).sqrt();
    let dim = n_q * component.dim();
    let mut vectors = Vec::with_capacity(classes * dim);
    for &m in &messages {
        for s in code.encode(m) {
            vectors.extend(component.point(s as usize).iter().map(|x| x / scale));
        }
    }
    Ok(Codebook::new(classes, dim, vectors, Scheme::RsSimplex)?.with_assignment_seed(assignment_seed))
}

fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Correctly rounded sum of the inputs (Shewchuk's non-overlapping partials,
/// with the half-way correction of the final rounding).
pub fn exact_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::with_capacity(8);
    for mut x in terms {
        let mut i = 0;
        for j in 0..partials.len() {
            let mut y = partials[j];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[i] = lo;
                i += 1;
            }
            x = hi;
        }
        partials.truncate(i);
        partials.push(x);
    }
    let Some(mut hi) = partials.pop() else {
        return 0.0;
    };
    let mut lo = 0.0;
    while let Some(y) = partials.pop() {
        let x = hi;
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    if let Some(&next) = partials.last() {
        if (lo < 0.0 && next < 0.0) || (lo > 0.0 && next > 0.0) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
    }
    hi
}

/// Correctly rounded inner product.
pub fn exact_dot(u: &[f64], v: &[f64]) -> f64 {
    compensated_dot(u, v).unwrap_or_else(|| {
        exact_sum(u.iter().zip(v).flat_map(|(&a, &b)| {
            let (p, e) = two_product(a, b);
            [p, e]
        }))
    })
}

fn split(a: f64) -> (f64, f64) {
    let c = 134_217_729.0 * a;
    let hi = c - (c - a);
    (hi, a - hi)
}

fn two_product_split(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, al * bl - (((p - ah * bh) - al * bh) - ah * bl))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Doubled-precision dot product, returned only when its error bound proves
/// the result is the correctly rounded one.
fn compensated_dot(u: &[f64], v: &[f64]) -> Option<f64> {
    let (small, large) = (2f64.powi(-400), 2f64.powi(500));
    let in_range = |x: &f64| *x == 0.0 || (small..=large).contains(&x.abs());
    if !u.iter().chain(v).all(in_range) {
        return None;
    }
    let (mut s, mut c, mut mass) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (p, e) = two_product_split(a, b);
        let (next, q) = two_sum(s, p);
        s = next;
        c += e + q;
        mass += e.abs() + q.abs();
    }
    let (r, t) = two_sum(s, c);
    if mass == 0.0 {
        return Some(r);
    }
    let terms = 2.0 * u.len().min(v.len()) as f64 + 2.0;
    let slack = 2.0 * terms * f64::EPSILON * mass;
    if r.abs() < f64::MIN_POSITIVE * 1e30 || !r.is_finite() {
        return None;
    }
    // The exact value lies in [r + t - slack, r + t + slack]; it rounds to
    // r when that interval sits strictly between the neighbouring midpoints.
    let above = (r.next_up() - r) / 2.0;
    let below = (r - r.next_down()) / 2.0;
    (t + slack < above && t - slack > -below).then_some(r)
}

/// Cosine similarity of two rows from exactly rounded inner products.
pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let c = exact_dot(u, v) / (exact_dot(u, u) * exact_dot(v, v)).sqrt();
    c.clamp(-1.0, 1.0)
}

/// Cosines of all unordered pairs `i < j`, row-major over the upper triangle.
pub fn pairwise_cosines(cb: &Codebook) -> Vec<f64> {
    let k = cb.num_classes();
    let sq: Vec<f64> = cb.rows().map(|r| exact_dot(r, r)).collect();
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let c = exact_dot(cb.row(i), cb.row(j)) / (sq[i] * sq[j]).sqrt();
            out.push(c.clamp(-1.0, 1.0));
        }
    }
    out
}

/// Plain floating-point Gram matrix `C C^T`, row-major `K x K`.
pub fn gram_matrix(cb: &Codebook) -> Vec<f64> {
    gram_of_rows(cb.as_flat(), cb.num_classes(), cb.dim())
}

pub(crate) fn gram_of_rows(rows: &[f64], k: usize, n: usize) -> Vec<f64> {
    let mut g = vec![0.0; k * k];
    for i in 0..k {
        let ri = &rows[i * n..(i + 1) * n];
        for j in i..k {
            let rj = &rows[j * n..(j + 1) * n];
            let d: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
            g[i * k + j] = d;
            g[j * k + i] = d;
        }
    }
    g
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lower: f64,
    pub upper: f64,
    pub count: u64,
}

/// A cosine value shared (within [`ATOM_TOLERANCE`]) by `count` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub cosine: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationStats {
    pub num_classes: usize,
    pub dim: usize,
    pub pairs: u64,
    pub max_cosine: f64,
    pub mean_cosine: f64,
    pub gram_offdiag_min: f64,
    pub gram_offdiag_max: f64,
    pub histogram: Vec<HistogramBin>,
    pub atoms: Vec<Atom>,
}

/// Groups sorted values into runs whose consecutive gaps are within [`ATOM_TOLERANCE`].
pub fn cluster_values(values: &[f64]) -> Vec<Atom> {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out: Vec<Atom> = Vec::new();
    let mut last = f64::NAN;
    for v in sorted {
        match out.last_mut() {
            Some(atom) if v - last <= ATOM_TOLERANCE => atom.count += 1,
            _ => out.push(Atom { cosine: v, count: 1 }),
        }
        last = v;
    }
    out
}

pub fn separation_stats(cb: &Codebook, num_bins: usize) -> SeparationStats {
    stats_from_cosines(cb.num_classes(), cb.dim(), &pairwise_cosines(cb), num_bins)
}

pub(crate) fn stats_from_cosines(
    classes: usize,
    dim: usize,
    cosines: &[f64],
    num_bins: usize,
) -> SeparationStats {
    let bins = num_bins.max(1);
    let width = 2.0 / bins as f64;
    let mut histogram: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            lower: -1.0 + b as f64 * width,
            upper: if b + 1 == bins { 1.0 } else { -1.0 + (b + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for &c in cosines {
        let b = (((c + 1.0) / width).floor() as isize).clamp(0, bins as isize - 1) as usize;
        histogram[b].count += 1;
    }
    let max = cosines.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = cosines.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = exact_sum(cosines.iter().copied()) / cosines.len() as f64;
    let clusters = cluster_values(cosines);
    let atoms = if cosines.len() == 1 {
        clusters
    } else {
        clusters.into_iter().filter(|a| a.count >= 2).collect()
    };
    SeparationStats {
        num_classes: classes,
        dim,
        pairs: cosines.len() as u64,
        max_cosine: max,
        mean_cosine: mean,
        gram_offdiag_min: min,
        gram_offdiag_max: max,
        histogram,
        atoms,
    }
}

/// Cosine atoms predicted from a code's weight distribution when all `2^k`
/// codewords are used: each weight `w` contributes `K * A_w / 2` pairs at
/// `1 - 2w/n`. Sorted by cosine.
pub fn spectrum_pushforward(code: &LinearCode) -> Result<Vec<Atom>> {
    let spectrum = code.spectrum()?;
    let k = code.num_codewords() as u64;
    let n = code.length();
    let mut atoms: Vec<Atom> = spectrum
        .nonzero()
        .filter(|&(w, _)| w > 0)
        .map(|(w, count)| Atom {
            cosine: cosine_from_hamming(w, n),
            count: k * count / 2,
        })
        .collect();
    atoms.sort_by(|a, b| a.cosine.total_cmp(&b.cosine));
    Ok(atoms)
}
