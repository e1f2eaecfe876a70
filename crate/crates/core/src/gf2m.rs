//! Arithmetic over GF(2), GF(2^m) and GF(2)[x].
//!
//! Field tables are built from a fixed primitive polynomial per extension
//! degree: the lexicographically smallest primitive polynomial of that degree
//! (smallest when read as a binary integer). The table is
//!
//! | m | polynomial | | m | polynomial |
//! |---|-----------|-|---|-----------|
//! | 1 | x+1 | | 9 | x^9+x^4+1 |
//! | 2 | x^2+x+1 | | 10 | x^10+x^3+1 |
//! | 3 | x^3+x+1 | | 11 | x^11+x^2+1 |
//! | 4 | x^4+x+1 | | 12 | x^12+x^6+x^4+x+1 |
//! | 5 | x^5+x^2+1 | | 13 | x^13+x^4+x^3+x+1 |
//! | 6 | x^6+x+1 | | 14 | x^14+x^5+x^3+x+1 |
//! | 7 | x^7+x+1 | | 15 | x^15+x+1 |
//! | 8 | x^8+x^4+x^3+x^2+1 | | 16 | x^16+x^5+x^3+x^2+1 |

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported extension degree.
pub const MAX_FIELD_DEGREE: u32 = 16;

const PRIMITIVE_POLYNOMIALS: [u32; 17] = [
    0, 0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11d, 0x211, 0x409, 0x805, 0x1053, 0x201b, 0x402b,
    0x8003, 0x1002d,
];

/// Primitive polynomial used for GF(2^m), as a bit mask (bit i = coefficient of x^i).
pub fn primitive_polynomial_bits(m: u32) -> Result<u32> {
    if !(1..=MAX_FIELD_DEGREE).contains(&m) {
        return Err(Error::FieldDegree(m));
    }
    Ok(PRIMITIVE_POLYNOMIALS[m as usize])
}

/// Polynomial over GF(2), stored as packed coefficient bits, lowest degree first.
///
/// The word vector never carries trailing zero words, so the zero polynomial is
/// the empty vector and has no degree.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Poly2 {
    words: Vec<u64>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2 { words: Vec::new() }
    }

    pub fn one() -> Self {
        Poly2::from_bits(1)
    }

    pub fn from_bits(bits: u64) -> Self {
        let mut p = Poly2 { words: vec![bits] };
        p.trim();
        p
    }

    /// Builds a polynomial from coefficients, lowest degree first. Any nonzero entry counts as 1.
    pub fn from_coefficients(coeffs: &[u8]) -> Self {
        let mut p = Poly2 {
            words: vec![0; coeffs.len().div_ceil(64)],
        };
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                p.words[i / 64] |= 1 << (i % 64);
            }
        }
        p.trim();
        p
    }

    /// Sum of `x^e` over the given exponents (repeated exponents cancel).
    pub fn from_exponents(exponents: &[usize]) -> Self {
        let mut p = Poly2::zero();
        for &e in exponents {
            p.flip(e);
        }
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    fn flip(&mut self, i: usize) {
        let w = i / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] ^= 1 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let top = *self.words.last()?;
        Some((self.words.len() - 1) * 64 + 63 - top.leading_zeros() as usize)
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| (w >> (i % 64)) & 1 == 1)
    }

    /// Coefficients lowest degree first; empty for the zero polynomial.
    pub fn coefficients(&self) -> Vec<u8> {
        match self.degree() {
            None => Vec::new(),
            Some(d) => (0..=d).map(|i| self.coeff(i) as u8).collect(),
        }
    }

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn xor_shifted(&mut self, other: &Poly2, shift: usize) {
        if other.is_zero() {
            return;
        }
        let word_shift = shift / 64;
        let bit_shift = shift % 64;
        let needed = other.words.len() + word_shift + 1;
        if self.words.len() < needed {
            self.words.resize(needed, 0);
        }
        for (i, &w) in other.words.iter().enumerate() {
            self.words[i + word_shift] ^= w << bit_shift;
            if bit_shift != 0 {
                self.words[i + word_shift + 1] ^= w >> (64 - bit_shift);
            }
        }
        self.trim();
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        let Some(deg) = self.degree() else {
            return out;
        };
        for i in 0..=deg {
            if self.coeff(i) {
                out.xor_shifted(other, i);
            }
        }
        out
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        out.xor_shifted(other, 0);
        out
    }

    /// Quotient and remainder of Euclidean division.
    pub fn div_rem(&self, divisor: &Poly2) -> Result<(Poly2, Poly2)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZeroPolynomial)?;
        let mut rem = self.clone();
        let mut quot = Poly2::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            quot.flip(shift);
            rem.xor_shifted(divisor, shift);
        }
        quot.trim();
        Ok((quot, rem))
    }

    pub fn gcd(&self, other: &Poly2) -> Poly2 {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a
    }

    /// True if `divisor` divides `self` exactly.
    pub fn is_divisible_by(&self, divisor: &Poly2) -> bool {
        self.div_rem(divisor).is_ok_and(|(_, r)| r.is_zero())
    }
}

impl fmt::Debug for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly2({self})")
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some(deg) = self.degree() else {
            return write!(f, "0");
        };
        let mut first = true;
        for i in (0..=deg).rev().filter(|&i| self.coeff(i)) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Product in GF(2)[x].
pub fn poly_mul(a: &Poly2, b: &Poly2) -> Poly2 {
    a.mul(b)
}

/// Least common multiple in GF(2)[x]; monic by construction.
pub fn poly_lcm(a: &Poly2, b: &Poly2) -> Result<Poly2> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroPolynomialLcm);
    }
    let g = a.gcd(b);
    let (q, _) = a.div_rem(&g)?;
    Ok(q.mul(b))
}

/// Element of GF(2^m), represented in the polynomial basis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Log/antilog tables for GF(2^m).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTable {
    m: u32,
    primitive: Poly2,
    /// `log[x]` for nonzero x; `log[0]` is unused.
    log: Vec<u32>,
    /// `antilog[i] = alpha^i` for `i < 2^m - 1`.
    antilog: Vec<u16>,
}

impl FieldTable {
    pub fn new(m: u32) -> Result<Self> {
        let poly = primitive_polynomial_bits(m)?;
        let size = 1usize << m;
        let order = size - 1;
        let mut log = vec![0u32; size];
        let mut antilog = vec![0u16; order];
        let mut x: u32 = 1;
        for (i, slot) in antilog.iter_mut().enumerate() {
            *slot = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x >> m != 0 {
                x ^= poly;
            }
        }
        debug_assert_eq!(x, 1, "primitive polynomial table entry is not primitive");
        Ok(FieldTable {
            m,
            primitive: Poly2::from_bits(poly as u64),
            log,
            antilog,
        })
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of field elements, `2^m`.
    pub fn size(&self) -> usize {
        1 << self.m
    }

    /// Order of the multiplicative group, `2^m - 1`.
    pub fn order(&self) -> usize {
        self.antilog.len()
    }

    pub fn primitive_polynomial(&self) -> &Poly2 {
        &self.primitive
    }

    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if (value as usize) < self.size() {
            Ok(FieldElement(value as u16))
        } else {
            Err(Error::InvalidParameter(format!(
                "{value} is not an element of GF(2^{})",
                self.m
            )))
        }
    }

    /// `alpha^e`, exponent taken modulo the group order.
    pub fn alpha_pow(&self, e: usize) -> FieldElement {
        FieldElement(self.antilog[e % self.order()])
    }

    /// Discrete log of a nonzero element.
    pub fn log(&self, a: FieldElement) -> Option<usize> {
        (!a.is_zero()).then(|| self.log[a.0 as usize] as usize)
    }

    pub fn antilog_table(&self) -> &[u16] {
        &self.antilog
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let e = self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize;
        FieldElement(self.antilog[e % self.order()])
    }

    pub fn inv(&self, a: FieldElement) -> Option<FieldElement> {
        let l = self.log(a)?;
        Some(FieldElement(self.antilog[(self.order() - l) % self.order()]))
    }

    pub fn pow(&self, a: FieldElement, e: usize) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        match self.log(a) {
            None => FieldElement::ZERO,
            Some(l) => self.alpha_pow((l * e) % self.order()),
        }
    }

    /// Cyclotomic coset `{s * 2^i mod (2^m - 1)}` in increasing order.
    pub fn conjugacy_class(&self, s: usize) -> Vec<usize> {
        let order = self.order();
        let mut class = Vec::new();
        let mut e = s % order;
        while !class.contains(&e) {
            class.push(e);
            e = (e * 2) % order;
        }
        class.sort_unstable();
        class
    }
}

/// Builds the GF(2^m) tables for `1 <= m <= 16`.
pub fn build_field(m: u32) -> Result<FieldTable> {
    FieldTable::new(m)
}

/// Minimal polynomial over GF(2) of `alpha^alpha_power`.
pub fn minimal_polynomial(alpha_power: usize, field: &FieldTable) -> Result<Poly2> {
    if alpha_power >= field.order() {
        return Err(Error::InvalidParameter(format!(
            "alpha power {alpha_power} out of range for GF(2^{})",
            field.degree()
        )));
    }
    // Expand prod (x + alpha^c) over the class with coefficients in GF(2^m).
    let mut coeffs = vec![FieldElement::ONE];
    for c in field.conjugacy_class(alpha_power) {
        let root = field.alpha_pow(c);
        let mut next = vec![FieldElement::ZERO; coeffs.len() + 1];
        for (i, &a) in coeffs.iter().enumerate() {
            next[i + 1] = field.add(next[i + 1], a);
            next[i] = field.add(next[i], field.mul(a, root));
        }
        coeffs = next;
    }
    let bits: Vec<u8> = coeffs
        .iter()
        .map(|c| {
            debug_assert!(c.0 <= 1, "minimal polynomial coefficient outside GF(2)");
            c.0 as u8
        })
        .collect();
    Ok(Poly2::from_coefficients(&bits))
}
