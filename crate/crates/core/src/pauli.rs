//! Pauli strings and weighted Pauli sums in symplectic bitmask form.
//!
//! A string on `n` qubits is stored as two words: bit `q` of `x_mask` marks
//! X support on qubit `q` and bit `q` of `z_mask` marks Z support, so
//! `(x, z) = (0,0)/(1,0)/(1,1)/(0,1)` is `I/X/Y/Z`. With `Y = iXZ` every
//! string equals `i^{|x & z|} X^x Z^z`, which turns products and commutation
//! tests into a handful of word operations.
//!
//! Text form: a fixed-length string over `{I,X,Y,Z}` where the leftmost letter
//! is qubit 0.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients with magnitude at or below this are dropped by [`PauliSum`].
pub const PRUNE_TOL: f64 = 1e-12;

/// Largest register a [`PauliString`] can describe.
pub const MAX_QUBITS: usize = 64;

/// A power of `i`: `One`, `I`, `MinusOne`, `MinusI` for exponents 0..4.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(e: u32) -> Self {
        match e % 4 {
            0 => Phase::One,
            1 => Phase::I,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u32 {
        match self {
            Phase::One => 0,
            Phase::I => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self {
            Phase::One => Complex64::new(1.0, 0.0),
            Phase::I => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    /// Multiplies `z` by this phase without rounding.
    #[inline]
    pub fn apply(self, z: Complex64) -> Complex64 {
        match self {
            Phase::One => z,
            Phase::I => Complex64::new(-z.im, z.re),
            Phase::MinusOne => -z,
            Phase::MinusI => Complex64::new(z.im, -z.re),
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + other.exponent())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Phase-free tensor product of single-qubit Paulis.
///
/// Ordering is by `(x_mask, z_mask)`; the qubit count is carried for checks.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n_qubits, self.x_mask, self.z_mask).cmp(&(other.n_qubits, other.x_mask, other.z_mask))
    }
}

fn width_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn new(n_qubits: usize, x_mask: u64, z_mask: u64) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::SizeCap { n: n_qubits, cap: MAX_QUBITS });
        }
        let outside = !width_mask(n_qubits);
        if (x_mask | z_mask) & outside != 0 {
            return Err(Error::IndexOutOfRange {
                index: 63 - ((x_mask | z_mask).leading_zeros() as usize),
                bound: n_qubits,
            });
        }
        Ok(Self { n_qubits, x_mask, z_mask })
    }

    pub fn identity(n_qubits: usize) -> Self {
        assert!((1..=MAX_QUBITS).contains(&n_qubits));
        Self { n_qubits, x_mask: 0, z_mask: 0 }
    }

    /// A single letter on `qubit`, identity elsewhere.
    pub fn single(n_qubits: usize, qubit: usize, p: Pauli) -> Result<Self> {
        if qubit >= n_qubits {
            return Err(Error::IndexOutOfRange { index: qubit, bound: n_qubits });
        }
        let (x, z) = p.bits();
        Self::new(n_qubits, (x as u64) << qubit, (z as u64) << qubit)
    }

    /// Builds a string from `(qubit, letter)` pairs; later pairs overwrite earlier ones.
    pub fn from_sparse(n_qubits: usize, letters: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::new(n_qubits, 0, 0)?;
        for &(q, p) in letters {
            if q >= n_qubits {
                return Err(Error::IndexOutOfRange { index: q, bound: n_qubits });
            }
            let (x, z) = p.bits();
            s.x_mask = (s.x_mask & !(1 << q)) | ((x as u64) << q);
            s.z_mask = (s.z_mask & !(1 << q)) | ((z as u64) << q);
        }
        Ok(s)
    }

    /// Parses the text form (leftmost letter is qubit 0).
    pub fn from_letters(text: &str) -> Result<Self> {
        let n = text.chars().count();
        let mut letters = Vec::with_capacity(n);
        for (q, c) in text.chars().enumerate() {
            let p = Pauli::from_char(c)
                .ok_or_else(|| Error::InvalidConfig(format!("invalid Pauli letter {c:?} in {text:?}")))?;
            letters.push((q, p));
        }
        Self::from_sparse(n, &letters)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    pub fn letter(&self, qubit: usize) -> Pauli {
        let x = (self.x_mask >> qubit) & 1 == 1;
        let z = (self.z_mask >> qubit) & 1 == 1;
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Symplectic form: two strings commute iff it is even.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        ((self.x_mask & other.z_mask).count_ones() + (self.z_mask & other.x_mask).count_ones()).is_multiple_of(2)
    }

    /// Exact product `self * other = phase * result`.
    pub fn mul(&self, other: &PauliString) -> Result<(Phase, PauliString)> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, got: other.n_qubits });
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliString) -> (Phase, PauliString) {
        // i^{|x1 z1|} X^x1 Z^z1 i^{|x2 z2|} X^x2 Z^z2
        //   = i^{|x1 z1| + |x2 z2| + 2|z1 x2|} X^x3 Z^z3,  X^x3 Z^z3 = i^{-|x3 z3|} P3
        let x = self.x_mask ^ other.x_mask;
        let z = self.z_mask ^ other.z_mask;
        let e = (self.x_mask & self.z_mask).count_ones()
            + (other.x_mask & other.z_mask).count_ones()
            + 2 * (self.z_mask & other.x_mask).count_ones()
            + 3 * (x & z).count_ones();
        (
            Phase::from_exponent(e),
            PauliString { n_qubits: self.n_qubits, x_mask: x, z_mask: z },
        )
    }

    /// Action on a computational basis state: `P|b> = phase |b ^ x_mask>`.
    /// Bit `q` of the basis index is qubit `q`.
    #[inline]
    pub fn act_on_basis(&self, basis: usize) -> (Phase, usize) {
        let b = basis as u64;
        let e = (self.x_mask & self.z_mask).count_ones() + 2 * (self.z_mask & b).count_ones();
        (Phase::from_exponent(e), (b ^ self.x_mask) as usize)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n_qubits {
            write!(f, "{}", self.letter(q).to_char())?;
        }
        Ok(())
    }
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub coeff: Complex64,
    pub string: PauliString,
}

/// Canonical weighted sum of Pauli strings.
///
/// Terms are sorted by `(x_mask, z_mask)`, merged, and pruned at
/// [`PRUNE_TOL`]; every constructor and operation returns canonical form.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        Self::from_terms(n_qubits, vec![PauliTerm { coeff: coeff.into(), string: PauliString::identity(n_qubits) }])
            .expect("identity string has matching width")
    }

    pub fn from_string(string: PauliString, coeff: Complex64) -> Self {
        let n = string.n_qubits();
        Self::from_terms(n, vec![PauliTerm { coeff, string }]).expect("single term")
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        if let Some(t) = terms.iter().find(|t| t.string.n_qubits() != n_qubits) {
            return Err(Error::DimensionMismatch { expected: n_qubits, got: t.string.n_qubits() });
        }
        Ok(canonicalize(n_qubits, terms))
    }

    /// Convenience for tests and fixtures: real coefficients with letter strings.
    pub fn from_letters(terms: &[(f64, &str)]) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidConfig("empty term list".into()))?;
        let n = first.1.chars().count();
        let parsed = terms
            .iter()
            .map(|&(c, s)| Ok(PauliTerm { coeff: c.into(), string: PauliString::from_letters(s)? }))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(n, parsed)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_imag(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.im.abs()).fold(0.0, f64::max)
    }

    /// Pauli strings are Hermitian, so the sum is Hermitian iff every coefficient is real.
    pub fn is_hermitian(&self) -> bool {
        self.max_imag() <= PRUNE_TOL
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(Error::NotHermitian(self.max_imag()))
        }
    }

    fn check_width(&self, other: &PauliSum) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, got: other.n_qubits });
        }
        Ok(())
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other)?;
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(canonicalize(self.n_qubits, terms))
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> PauliSum {
        let terms = self.terms.iter().map(|t| PauliTerm { coeff: t.coeff * c, string: t.string }).collect();
        canonicalize(self.n_qubits, terms)
    }

    /// Operator product `self * other`.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other)?;
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for a in &self.terms {
            for b in &other.terms {
                let (phase, string) = a.string.mul_unchecked(&b.string);
                terms.push(PauliTerm { coeff: phase.apply(a.coeff * b.coeff), string });
            }
        }
        Ok(canonicalize(self.n_qubits, terms))
    }

    /// `[A, B] = AB - BA`. Commuting string pairs cancel exactly and are skipped;
    /// anticommuting pairs contribute twice their product.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_width(other)?;
        let mut terms = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                if a.string.commutes_with(&b.string) {
                    continue;
                }
                let (phase, string) = a.string.mul_unchecked(&b.string);
                terms.push(PauliTerm { coeff: phase.apply(a.coeff * b.coeff) * 2.0, string });
            }
        }
        Ok(canonicalize(self.n_qubits, terms))
    }

    pub fn adjoint(&self) -> PauliSum {
        let terms = self.terms.iter().map(|t| PauliTerm { coeff: t.coeff.conj(), string: t.string }).collect();
        canonicalize(self.n_qubits, terms)
    }

    /// True iff every pair of strings commutes.
    pub fn mutually_commuting(&self) -> bool {
        self.terms
            .iter()
            .enumerate()
            .all(|(i, a)| self.terms[i + 1..].iter().all(|b| a.string.commutes_with(&b.string)))
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.coeff.im == 0.0 {
                write!(f, "{}*{}", t.coeff.re, t.string)?;
            } else {
                write!(f, "({}{:+}i)*{}", t.coeff.re, t.coeff.im, t.string)?;
            }
        }
        Ok(())
    }
}

/// Sorts, merges and prunes. Coefficients of a repeated string are summed in
/// a fixed order so the result does not depend on the input order.
pub fn canonicalize(n_qubits: usize, terms: Vec<PauliTerm>) -> PauliSum {
    let mut groups: BTreeMap<(u64, u64), Vec<Complex64>> = BTreeMap::new();
    for t in terms {
        if t.coeff.re == 0.0 && t.coeff.im == 0.0 {
            continue;
        }
        groups.entry((t.string.x_mask, t.string.z_mask)).or_default().push(t.coeff);
    }
    let mut out = Vec::with_capacity(groups.len());
    for ((x, z), mut coeffs) in groups {
        coeffs.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let sum: Complex64 = coeffs.into_iter().sum();
        if sum.norm() > PRUNE_TOL {
            out.push(PauliTerm { coeff: sum, string: PauliString { n_qubits, x_mask: x, z_mask: z } });
        }
    }
    PauliSum { n_qubits, terms: out }
}

/// Hermitian sum of mutually commuting strings with real coefficients.
///
/// `exp(-i t G)` factorises exactly into one rotation per string, which is
/// what the state engine relies on.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutingGenerator {
    sum: PauliSum,
    rotations: Vec<(PauliString, f64)>,
}

impl CommutingGenerator {
    pub fn new(sum: PauliSum) -> Result<Self> {
        sum.ensure_hermitian()?;
        if !sum.mutually_commuting() {
            return Err(Error::UnsupportedGenerator);
        }
        let rotations = sum.terms().iter().map(|t| (t.string, t.coeff.re)).collect();
        Ok(Self { sum, rotations })
    }

    pub fn sum(&self) -> &PauliSum {
        &self.sum
    }

    pub fn rotations(&self) -> &[(PauliString, f64)] {
        &self.rotations
    }

    pub fn n_qubits(&self) -> usize {
        self.sum.n_qubits()
    }
}
