//! Linear block codes over GF(2^m) and their exact distance spectra.
//!
//! Codes are held as a generator matrix. Message `i` is the vector of base-q
//! digits of `i` with the most significant digit first, so message indices
//! enumerate message vectors in lexicographic order.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gf2m::{build_field, minimal_polynomial, poly_lcm, FieldElement, FieldTable, Poly2};

/// Default maximum number of codewords an enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 20;

/// Largest RM code parameter `m` accepted.
pub const MAX_RM_M: u32 = 14;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CodeFamily {
    Repetition,
    ReedMuller { r: u32, m: u32 },
    Bch { m: u32, design_distance: usize },
    ReedSolomon { q: usize, k_q: usize },
    Punctured { inner: Box<CodeFamily>, positions: Vec<usize> },
    Extended { inner: Box<CodeFamily> },
    Custom,
}

/// Weight distribution of a linear code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceSpectrum {
    /// `weight_counts[w]` = number of codewords of Hamming weight `w`, for `w` in `0..=n`.
    pub weight_counts: Vec<u64>,
    pub d_min: usize,
}

impl DistanceSpectrum {
    pub fn total(&self) -> u128 {
        self.weight_counts.iter().map(|&c| c as u128).sum()
    }

    /// Nonzero `(weight, count)` pairs in increasing weight order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.weight_counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(w, &c)| (w, c))
    }
}

/// An `[n, k]` linear code over GF(q), `q = 2^m`.
#[derive(Clone, Debug)]
pub struct LinearCode {
    n: usize,
    k: usize,
    field: Arc<FieldTable>,
    generator: Vec<Vec<FieldElement>>,
    family: CodeFamily,
    spectrum: OnceLock<DistanceSpectrum>,
}

impl LinearCode {
    /// Builds a code from generator rows of symbol values. The rows must be
    /// linearly independent over the field.
    pub fn from_generator(
        field: Arc<FieldTable>,
        rows: Vec<Vec<u16>>,
        family: CodeFamily,
    ) -> Result<Self> {
        let code = Self::without_rank_check(field, rows, family)?;
        let rank = rank(&code.field, &code.generator);
        if rank != code.k {
            return Err(Error::RankDeficient { rank, k: code.k });
        }
        Ok(code)
    }

    /// Shape and symbol validation only; for constructions whose rows are
    /// independent by construction.
    fn without_rank_check(
        field: Arc<FieldTable>,
        rows: Vec<Vec<u16>>,
        family: CodeFamily,
    ) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::InvalidParameter("a code needs k >= 1".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::InvalidParameter("a code needs n >= 1".into()));
        }
        let q = field.size();
        let mut generator = Vec::with_capacity(k);
        for row in rows {
            if row.len() != n {
                return Err(Error::InvalidParameter("generator rows differ in length".into()));
            }
            if let Some(&bad) = row.iter().find(|&&s| s as usize >= q) {
                return Err(Error::InvalidParameter(format!("symbol {bad} outside GF({q})")));
            }
            generator.push(row.into_iter().map(FieldElement).collect());
        }
        Ok(LinearCode {
            n,
            k,
            field,
            generator,
            family,
            spectrum: OnceLock::new(),
        })
    }

    /// Binary code from 0/1 generator rows.
    pub fn binary(rows: Vec<Vec<u8>>, family: CodeFamily) -> Result<Self> {
        Self::from_generator(Arc::new(build_field(1)?), widen(rows), family)
    }

    fn binary_structured(rows: Vec<Vec<u8>>, family: CodeFamily) -> Result<Self> {
        Self::without_rank_check(Arc::new(build_field(1)?), widen(rows), family)
    }

    pub fn length(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn field_order(&self) -> usize {
        self.field.size()
    }

    pub fn field(&self) -> &Arc<FieldTable> {
        &self.field
    }

    pub fn is_binary(&self) -> bool {
        self.field.size() == 2
    }

    pub fn family(&self) -> &CodeFamily {
        &self.family
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    /// Generator rows as symbol values.
    pub fn generator_rows(&self) -> Vec<Vec<u16>> {
        self.generator
            .iter()
            .map(|r| r.iter().map(|s| s.0).collect())
            .collect()
    }

    /// `q^k`, saturating at `u128::MAX`.
    pub fn num_codewords(&self) -> u128 {
        (self.field.size() as u128)
            .checked_pow(self.k as u32)
            .filter(|_| self.k <= u32::MAX as usize)
            .unwrap_or(u128::MAX)
    }

    /// Message digits of `index`, most significant first.
    pub fn message(&self, index: u128) -> Vec<u16> {
        let q = self.field.size() as u128;
        let mut digits = vec![0u16; self.k];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = (rest % q) as u16;
            rest /= q;
        }
        digits
    }

    /// Codeword for message `index`.
    pub fn encode(&self, index: u128) -> Vec<u16> {
        let mut word = vec![FieldElement::ZERO; self.n];
        for (digit, row) in self.message(index).into_iter().zip(&self.generator) {
            if digit == 0 {
                continue;
            }
            let u = FieldElement(digit);
            for (w, &g) in word.iter_mut().zip(row) {
                *w = self.field.add(*w, self.field.mul(u, g));
            }
        }
        word.into_iter().map(|s| s.0).collect()
    }

    fn check_cap(&self, cap: u128) -> Result<()> {
        let count = self.num_codewords();
        if count > cap {
            return Err(Error::EnumerationCap { count, cap });
        }
        Ok(())
    }

    /// Exact weight distribution, computed once and cached.
    pub fn spectrum(&self) -> Result<&DistanceSpectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        self.check_cap(DEFAULT_ENUMERATION_CAP)?;
        let s = if self.is_binary() {
            binary_spectrum(self)
        } else {
            qary_spectrum(self)
        };
        Ok(self.spectrum.get_or_init(|| s))
    }

    pub fn d_min(&self) -> Result<usize> {
        Ok(self.spectrum()?.d_min)
    }
}

fn widen(rows: Vec<Vec<u8>>) -> Vec<Vec<u16>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(u16::from).collect())
        .collect()
}

fn rank(field: &FieldTable, rows: &[Vec<FieldElement>]) -> usize {
    if field.size() == 2 {
        return binary_rank(rows.iter().map(|r| pack_bits(r)).collect());
    }
    let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = field.inv(m[rank][col]).expect("pivot is nonzero");
        let pivot_row: Vec<FieldElement> = m[rank].iter().map(|&x| field.mul(x, inv)).collect();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (x, &p) in row.iter_mut().zip(&pivot_row) {
                *x = field.add(*x, field.mul(factor, p));
            }
        }
        m[rank] = pivot_row;
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

fn binary_rank(mut rows: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let nwords = rows.first().map_or(0, Vec::len);
    for col in 0..nwords * 64 {
        let (w, b) = (col / 64, col % 64);
        let Some(pivot) = (rank..rows.len()).find(|&r| (rows[r][w] >> b) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && (row[w] >> b) & 1 == 1 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x ^= p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn pack_bits(row: &[FieldElement]) -> Vec<u64> {
    let mut words = vec![0u64; row.len().div_ceil(64)];
    for (i, s) in row.iter().enumerate() {
        if s.0 != 0 {
            words[i / 64] |= 1 << (i % 64);
        }
    }
    words
}

fn spectrum_from_counts(counts: Vec<u64>) -> DistanceSpectrum {
    let d_min = counts
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, &c)| c > 0)
        .map(|(w, _)| w)
        .expect("a code of rank >= 1 has a nonzero codeword");
    DistanceSpectrum {
        weight_counts: counts,
        d_min,
    }
}

/// Gray-code walk over all messages; each step flips one generator row.
fn binary_spectrum(code: &LinearCode) -> DistanceSpectrum {
    let rows: Vec<Vec<u64>> = code.generator.iter().map(|r| pack_bits(r)).collect();
    let mut word = vec![0u64; code.n.div_ceil(64)];
    let mut counts = vec![0u64; code.n + 1];
    counts[0] = 1;
    let total: u64 = 1 << code.k;
    for step in 1..total {
        let flip = step.trailing_zeros() as usize;
        for (w, r) in word.iter_mut().zip(&rows[flip]) {
            *w ^= r;
        }
        let weight: u32 = word.iter().map(|w| w.count_ones()).sum();
        counts[weight as usize] += 1;
    }
    spectrum_from_counts(counts)
}

/// Mixed-radix counter over messages, updating the codeword incrementally.
fn qary_spectrum(code: &LinearCode) -> DistanceSpectrum {
    let field = &code.field;
    let q = field.size() as u16;
    let mut digits = vec![0u16; code.k];
    let mut word = vec![FieldElement::ZERO; code.n];
    let mut counts = vec![0u64; code.n + 1];
    counts[0] = 1;
    let total = code.num_codewords();
    for _ in 1..total {
        for (pos, digit) in digits.iter_mut().enumerate() {
            let old = *digit;
            let new = if old + 1 == q { 0 } else { old + 1 };
            *digit = new;
            let delta = FieldElement(old ^ new);
            for (w, &g) in word.iter_mut().zip(&code.generator[pos]) {
                *w = field.add(*w, field.mul(delta, g));
            }
            if new != 0 {
                break;
            }
        }
        let weight = word.iter().filter(|s| !s.is_zero()).count();
        counts[weight] += 1;
    }
    spectrum_from_counts(counts)
}

/// `[n, 1]` binary repetition code.
pub fn repetition_code(n: usize) -> Result<LinearCode> {
    if n == 0 {
        return Err(Error::InvalidParameter("repetition code needs n >= 1".into()));
    }
    LinearCode::binary_structured(vec![vec![1; n]], CodeFamily::Repetition)
}

fn combinations(m: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i + 1, m, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, size, &mut Vec::new(), &mut out);
    out
}

/// Reed–Muller code RM(r, m): evaluations of all boolean monomials of degree
/// at most `r` in `m` variables, coordinate `j` being the point with bits of `j`.
pub fn reed_muller_code(r: u32, m: u32) -> Result<LinearCode> {
    if r > m || m > MAX_RM_M {
        return Err(Error::InvalidParameter(format!(
            "RM(r={r}, m={m}) needs 0 <= r <= m <= {MAX_RM_M}"
        )));
    }
    let n = 1usize << m;
    let mut rows = Vec::new();
    for degree in 0..=r as usize {
        for vars in combinations(m as usize, degree) {
            let mask: usize = vars.iter().map(|v| 1 << v).sum();
            rows.push((0..n).map(|j| u8::from(j & mask == mask)).collect());
        }
    }
    LinearCode::binary_structured(rows, CodeFamily::ReedMuller { r, m })
}

/// Generator polynomial of the narrow-sense primitive BCH code of length
/// `2^m - 1` and the given design distance.
pub fn bch_generator_polynomial(m: u32, design_distance: usize) -> Result<Poly2> {
    if m < 2 {
        return Err(Error::InvalidParameter("BCH codes need m >= 2".into()));
    }
    let field = build_field(m)?;
    let n = field.order();
    if design_distance < 2 || design_distance > n {
        return Err(Error::InvalidParameter(format!(
            "design distance {design_distance} outside [2, {n}]"
        )));
    }
    let mut covered = vec![false; n];
    let mut g = Poly2::one();
    for s in 1..design_distance {
        if covered[s] {
            continue;
        }
        for c in field.conjugacy_class(s) {
            covered[c] = true;
        }
        g = poly_lcm(&g, &minimal_polynomial(s, &field)?)?;
    }
    Ok(g)
}

/// Narrow-sense primitive BCH code, generator rows `x^i g(x)`.
pub fn bch_code(m: u32, design_distance: usize) -> Result<LinearCode> {
    let g = bch_generator_polynomial(m, design_distance)?;
    let n = (1usize << m) - 1;
    let deg = g.degree().expect("generator is nonzero");
    if deg >= n {
        return Err(Error::DesignDistanceTooLarge { m, design_distance });
    }
    let k = n - deg;
    let coeffs = g.coefficients();
    let rows = (0..k)
        .map(|shift| {
            let mut row = vec![0u8; n];
            row[shift..shift + coeffs.len()].copy_from_slice(&coeffs);
            row
        })
        .collect();
    // Shifts of a monic generator are triangular, hence independent.
    LinearCode::binary_structured(rows, CodeFamily::Bch { m, design_distance })
}

/// Achievable `(design_distance, k)` pairs for length `2^m - 1`, keeping the
/// largest design distance for each distinct code (the Bose distance).
pub fn bch_parameters(m: u32) -> Result<Vec<(usize, usize)>> {
    if m < 2 {
        return Err(Error::InvalidParameter("BCH codes need m >= 2".into()));
    }
    let field = build_field(m)?;
    let n = field.order();
    let mut covered = vec![false; n];
    let mut redundancy = 0usize;
    let mut out: Vec<(usize, usize)> = Vec::new();
    for delta in 2..=n {
        let s = delta - 1;
        if !covered[s] {
            for c in field.conjugacy_class(s) {
                covered[c] = true;
                redundancy += 1;
            }
        }
        if redundancy >= n {
            break;
        }
        let k = n - redundancy;
        match out.last_mut() {
            Some(last) if last.1 == k => last.0 = delta,
            _ => out.push((delta, k)),
        }
    }
    Ok(out)
}

fn message_bits(classes: usize) -> usize {
    let mut k = 0;
    while (1u128 << k) < classes as u128 {
        k += 1;
    }
    k.max(1)
}

/// The BCH code of length `2^m - 1` with the largest design distance whose
/// dimension still covers `ceil(log2 K)` message bits.
pub fn bch_best_for_classes(m: u32, classes: usize) -> Result<LinearCode> {
    let need = message_bits(classes);
    let params = bch_parameters(m)?;
    let n = (1usize << m) - 1;
    let (delta, _) = params
        .iter()
        .copied()
        .filter(|&(_, k)| k >= need)
        .max_by_key(|&(d, k)| (d, k))
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "no BCH code of length {n} has k >= {need} (needed for K={classes})"
            ))
        })?;
    bch_code(m, delta)
}

/// Reed–Solomon code over GF(q) evaluated at all `q` field elements
/// (in increasing integer order), message polynomials of degree `< k_q`.
pub fn reed_solomon_code(q: usize, k_q: usize) -> Result<LinearCode> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("q={q} is not a power of two >= 2")));
    }
    if k_q == 0 || k_q > q {
        return Err(Error::InvalidParameter(format!(
            "RS code needs 1 <= k_q <= n_q = {q}, got k_q={k_q}"
        )));
    }
    let field = Arc::new(build_field(q.trailing_zeros())?);
    let rows = (0..k_q)
        .map(|i| {
            (0..q)
                .map(|x| field.pow(FieldElement(x as u16), i).0)
                .collect()
        })
        .collect();
    // Vandermonde rows over distinct points are independent.
    LinearCode::without_rank_check(field, rows, CodeFamily::ReedSolomon { q, k_q })
}

/// Deletes the given coordinates from every codeword.
pub fn puncture(code: &LinearCode, positions: &[usize]) -> Result<LinearCode> {
    if positions.is_empty() {
        return Ok(code.clone());
    }
    let mut sorted = positions.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != positions.len() {
        return Err(Error::InvalidParameter("puncture positions must be distinct".into()));
    }
    if sorted.len() >= code.n || *sorted.last().unwrap() >= code.n {
        return Err(Error::InvalidParameter(format!(
            "cannot puncture positions {positions:?} from a length-{} code",
            code.n
        )));
    }
    let rows = code
        .generator
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(i, _)| sorted.binary_search(i).is_err())
                .map(|(_, s)| s.0)
                .collect()
        })
        .collect();
    let family = CodeFamily::Punctured {
        inner: Box::new(code.family.clone()),
        positions: sorted,
    };
    LinearCode::from_generator(code.field.clone(), rows, family).map_err(|e| match e {
        Error::RankDeficient { k, .. } => Error::PuncturingCollapses { k },
        other => other,
    })
}

/// Punctures the last `count` coordinates.
pub fn puncture_trailing(code: &LinearCode, count: usize) -> Result<LinearCode> {
    let n = code.length();
    let positions: Vec<usize> = (n.saturating_sub(count)..n).collect();
    puncture(code, &positions)
}

/// Appends an overall parity bit to every codeword of a binary code.
pub fn extend_with_parity(code: &LinearCode) -> Result<LinearCode> {
    if !code.is_binary() {
        return Err(Error::InvalidParameter("parity extension needs a binary code".into()));
    }
    let rows = code
        .generator
        .iter()
        .map(|row| {
            let mut r: Vec<u16> = row.iter().map(|s| s.0).collect();
            let parity = r.iter().fold(0u16, |acc, &b| acc ^ b);
            r.push(parity);
            r
        })
        .collect();
    let family = CodeFamily::Extended {
        inner: Box::new(code.family.clone()),
    };
    LinearCode::from_generator(code.field.clone(), rows, family)
}

/// All codewords in message order, refusing codes with more than
/// [`DEFAULT_ENUMERATION_CAP`] codewords.
pub fn enumerate_codewords(code: &LinearCode) -> Result<Vec<Vec<u16>>> {
    enumerate_codewords_capped(code, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_codewords_capped(code: &LinearCode, cap: u128) -> Result<Vec<Vec<u16>>> {
    code.check_cap(cap)?;
    Ok((0..code.num_codewords()).map(|i| code.encode(i)).collect())
}

/// Exact weight distribution by enumeration. For a linear code the pairwise
/// distances are the weights of codeword differences, so this is also the
/// distance distribution seen from any codeword.
pub fn distance_spectrum(code: &LinearCode) -> Result<DistanceSpectrum> {
    code.spectrum().cloned()
}

pub fn hamming_distance(a: &[u16], b: &[u16]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}
