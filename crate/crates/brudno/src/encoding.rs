//! Gödel-style codes for strings, integers, algebraic numbers and
//! elementary vectors.
//!
//! Everything downstream (complexity surrogates, universal mixtures) needs a
//! fixed, decodable correspondence between finite combinatorial data and
//! natural numbers. This module pins those conventions once:
//!
//! * binary strings are numbered length-lexicographically,
//!
//!   ```text
//!   τ(s) = 2^|s| + value(s) − 1,      "" → 0, "0" → 1, "1" → 2, "00" → 3, …
//!   ```
//!
//! * pairs of naturals through the dyadic pairing
//!
//!   ```text
//!   ⟨p, q⟩ = 2^p (2q + 1) − 1,
//!   ```
//!
//!   which is a bijection ℕ×ℕ → ℕ because every positive integer has a
//!   unique odd part;
//!
//! * signed integers through the sign-tagged composition
//!
//!   ```text
//!   f(0) = 0,   f(z) = ⟨0, ⟨z, 1⟩⟩ for z > 0,   f(z) = ⟨1, ⟨−z, 1⟩⟩ for z < 0,
//!   ```
//!
//!   so f(2) = 22 and f(−1) = 21;
//!
//! * an algebraic number, given as root number `i` (in lexicographic order
//!   of the complex plane) of an integer polynomial
//!   `p(z) = x₀ zⁿ + … + xₙ`, as the exponent vector of
//!
//!   ```text
//!   w = 2ⁿ · 3^f(x₀) · 5^f(x₁) · … · p_{n+2}^f(xₙ) · p_{n+3}^i ;
//!   ```
//!
//! * an elementary vector ψ = Σ aⱼ |j⟩ with finitely many nonzero algebraic
//!   coefficients (indexed by τ over basis strings) as
//!
//!   ```text
//!   W(ψ) = 2ⁿ · 3^w(a₀) · 5^w(a₁) · … · p_{n+2}^w(aₙ),    n = max nonzero index.
//!   ```
//!
//! The numbers `w` and especially `W(ψ)` are astronomically large, so codes
//! are kept as [`ExponentVector`]s (exponents on the ordered primes
//! 2, 3, 5, …) and only materialized into a single [`BigUint`] on request,
//! when every exponent is below a caller-configured bound. All round trips
//! are exact.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Longest binary string the u64-valued numbering accepts.
pub const MAX_STRING_LEN: usize = 62;

/// Length-lexicographic index of a binary string: `τ(s) = 2^|s| + value(s) − 1`.
///
/// Strings are ordered first by length, then by numeric value with the
/// leftmost symbol most significant. The empty string maps to 0.
pub fn string_to_index(bits: &[u8]) -> Result<u64> {
    if bits.len() > MAX_STRING_LEN {
        return Err(Error::ResourceLimit {
            what: "string_to_index length",
            requested: bits.len() as u64,
            cap: MAX_STRING_LEN as u64,
        });
    }
    let mut value: u64 = 0;
    for &b in bits {
        if b > 1 {
            return Err(Error::InvalidInput(format!(
                "binary string contains symbol {b}"
            )));
        }
        value = (value << 1) | u64::from(b);
    }
    Ok((1u64 << bits.len()) + value - 1)
}

/// Inverse of [`string_to_index`].
pub fn index_to_string(n: u64) -> Vec<u8> {
    // n + 1 = 2^len + value with 0 <= value < 2^len.
    let m = n + 1;
    let len = (63 - m.leading_zeros()) as usize;
    let value = m - (1u64 << len);
    (0..len)
        .rev()
        .map(|k| ((value >> k) & 1) as u8)
        .collect()
}

/// Dyadic pairing `⟨p, q⟩ = 2^p (2q + 1) − 1`, checked against u64 overflow.
pub fn pair(p: u64, q: u64) -> Result<u64> {
    let odd = q
        .checked_mul(2)
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| Error::InvalidInput("pair: q too large".into()))?;
    if p >= 64 {
        return Err(Error::InvalidInput(format!("pair: 2^{p} exceeds u64")));
    }
    odd.checked_shl(p as u32)
        .filter(|&x| x >> p == odd)
        .and_then(|x| x.checked_sub(1))
        .ok_or_else(|| Error::InvalidInput(format!("pair({p}, {q}) exceeds u64")))
}

/// Inverse of [`pair`]: splits `n + 1` into its 2-adic valuation and odd part.
pub fn unpair(n: u64) -> (u64, u64) {
    let m = n + 1;
    let p = m.trailing_zeros() as u64;
    let q = ((m >> p) - 1) / 2;
    (p, q)
}

/// Arbitrary-precision variant of [`pair`].
pub fn pair_big(p: &BigUint, q: &BigUint) -> BigUint {
    let one = BigUint::one();
    let odd = (q << 1u32) + &one;
    let shift = p.to_u64().expect("pair_big: p does not fit a shift amount");
    (odd << shift) - one
}

/// Arbitrary-precision variant of [`unpair`].
pub fn unpair_big(n: &BigUint) -> (BigUint, BigUint) {
    let m = n + BigUint::one();
    let p = m.trailing_zeros().unwrap_or(0);
    let q = ((&m >> p) - BigUint::one()) >> 1u32;
    (BigUint::from(p), q)
}

/// Sign-tagged integer code `f : ℤ → ℕ` with `f(2) = 22`, `f(−1) = 21`,
/// `f(0) = 0`.
///
/// `f` is injective and decodable on its range but deliberately not onto ℕ
/// (most naturals are not of the form `⟨tag, ⟨m, 1⟩⟩`); use [`nat_to_int`]
/// as its partial inverse.
pub fn int_to_nat(z: i64) -> BigUint {
    if z == 0 {
        return BigUint::zero();
    }
    let magnitude = BigUint::from(z.unsigned_abs());
    let inner = pair_big(&magnitude, &BigUint::one());
    let tag = if z > 0 { 0u32 } else { 1u32 };
    pair_big(&BigUint::from(tag), &inner)
}

/// Partial inverse of [`int_to_nat`]; `None` on naturals outside its range.
pub fn nat_to_int(n: &BigUint) -> Option<i64> {
    if n.is_zero() {
        return Some(0);
    }
    let (tag, inner) = unpair_big(n);
    let (magnitude, denom) = unpair_big(&inner);
    if !denom.is_one() || magnitude.is_zero() {
        return None;
    }
    let m = magnitude.to_i64()?;
    match tag.to_u32()? {
        0 => Some(m),
        1 => Some(-m),
        _ => None,
    }
}

/// First `count` primes, smallest first.
pub fn primes(count: usize) -> Vec<u64> {
    let mut found: Vec<u64> = Vec::with_capacity(count);
    let mut candidate: u64 = 2;
    while found.len() < count {
        if found.iter().all(|p| candidate % p != 0) {
            found.push(candidate);
        }
        candidate += 1;
    }
    found
}

/// Exponents of a natural number on the ordered primes 2, 3, 5, …
///
/// `exponents[j]` is the exponent of the j-th prime; trailing zeros are
/// trimmed so equal numbers have equal vectors. Entries are arbitrary
/// precision: codes of elementary vectors have exponents far beyond u64.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentVector {
    exponents: Vec<BigUint>,
}

impl ExponentVector {
    pub fn new(mut exponents: Vec<BigUint>) -> Self {
        while exponents.last().is_some_and(Zero::is_zero) {
            exponents.pop();
        }
        ExponentVector { exponents }
    }

    pub fn from_u64s(exponents: &[u64]) -> Self {
        Self::new(exponents.iter().map(|&e| BigUint::from(e)).collect())
    }

    pub fn exponents(&self) -> &[BigUint] {
        &self.exponents
    }

    /// The encoded natural number `Π pⱼ^eⱼ`, computed only when every
    /// exponent is below `bound`; `None` signals a symbolic-only code.
    pub fn materialize(&self, bound: &BigUint) -> Option<BigUint> {
        if self.exponents.iter().any(|e| e >= bound) {
            return None;
        }
        let ps = primes(self.exponents.len());
        let mut acc = BigUint::one();
        for (p, e) in ps.iter().zip(&self.exponents) {
            acc *= BigUint::from(*p).pow(e.to_u32()?);
        }
        Some(acc)
    }
}

/// An algebraic number, pinned down as one root of an integer polynomial.
///
/// `coefficients = [x₀, …, xₙ]` spell `p(z) = x₀ zⁿ + … + xₙ` with `x₀ ≠ 0`,
/// and `root_index` selects among the n complex roots sorted by real part,
/// then imaginary part. The number 0 is canonically `(z, root 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicNumberSpec {
    coefficients: Vec<i64>,
    root_index: usize,
}

impl AlgebraicNumberSpec {
    pub fn new(coefficients: Vec<i64>, root_index: usize) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::InvalidInput(
                "algebraic spec needs degree >= 1 (constants have no roots)".into(),
            ));
        }
        if coefficients[0] == 0 {
            return Err(Error::InvalidInput(
                "leading coefficient must be nonzero".into(),
            ));
        }
        let degree = coefficients.len() - 1;
        if root_index >= degree {
            return Err(Error::InvalidInput(format!(
                "root index {root_index} out of range for degree {degree}"
            )));
        }
        Ok(AlgebraicNumberSpec {
            coefficients,
            root_index,
        })
    }

    /// The canonical code of the number 0: root 0 of `p(z) = z`.
    pub fn zero() -> Self {
        AlgebraicNumberSpec {
            coefficients: vec![1, 0],
            root_index: 0,
        }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Numeric value of the selected root, for degree <= 4 test cases.
    ///
    /// Roots come from the companion-matrix spectrum and are sorted by
    /// `(re, im)` with a 1e-9 equality tolerance, matching the ordering that
    /// `root_index` refers to. Higher degrees are out of scope.
    pub fn approximate_root(&self) -> Result<Complex64> {
        let degree = self.degree();
        if degree > 4 {
            return Err(Error::Unsupported(format!(
                "numeric roots only for degree <= 4, got {degree}"
            )));
        }
        let lead = self.coefficients[0] as f64;
        // Frobenius companion matrix of the monic normalization.
        let mut companion = nalgebra::DMatrix::<f64>::zeros(degree, degree);
        for row in 1..degree {
            companion[(row, row - 1)] = 1.0;
        }
        for row in 0..degree {
            // column n-1 holds -c_row where c_i is the coefficient of z^i
            let c = self.coefficients[degree - row] as f64 / lead;
            companion[(row, degree - 1)] = -c;
        }
        let mut roots: Vec<Complex64> = companion.complex_eigenvalues().iter().copied().collect();
        roots.sort_by(|a, b| {
            let tol = 1e-9;
            if (a.re - b.re).abs() > tol {
                a.re.partial_cmp(&b.re).unwrap()
            } else if (a.im - b.im).abs() > tol {
                a.im.partial_cmp(&b.im).unwrap()
            } else {
                std::cmp::Ordering::Equal
            }
        });
        Ok(roots[self.root_index])
    }
}

/// Code of an algebraic number: exponents `(n, f(x₀), …, f(xₙ), i)` on the
/// primes `(2, 3, …, p_{n+2}, p_{n+3})`.
pub fn encode_algebraic(spec: &AlgebraicNumberSpec) -> ExponentVector {
    let mut exponents = Vec::with_capacity(spec.coefficients.len() + 2);
    exponents.push(BigUint::from(spec.degree()));
    for &x in &spec.coefficients {
        exponents.push(int_to_nat(x));
    }
    exponents.push(BigUint::from(spec.root_index));
    ExponentVector::new(exponents)
}

/// Inverse of [`encode_algebraic`].
pub fn decode_algebraic(code: &ExponentVector) -> Result<AlgebraicNumberSpec> {
    let exps = code.exponents();
    let degree = exps
        .first()
        .ok_or_else(|| Error::InvalidInput("empty algebraic code".into()))?
        .to_usize()
        .ok_or_else(|| Error::InvalidInput("degree slot out of range".into()))?;
    if degree == 0 || exps.len() > degree + 3 {
        return Err(Error::InvalidInput(format!(
            "algebraic code shape mismatch: degree {degree}, {} slots",
            exps.len()
        )));
    }
    let zero = BigUint::zero();
    let slot = |j: usize| exps.get(j).unwrap_or(&zero);
    let mut coefficients = Vec::with_capacity(degree + 1);
    for j in 0..=degree {
        let x = nat_to_int(slot(1 + j)).ok_or_else(|| {
            Error::InvalidInput(format!("coefficient slot {j} is not a valid integer code"))
        })?;
        coefficients.push(x);
    }
    let root_index = slot(degree + 2)
        .to_usize()
        .ok_or_else(|| Error::InvalidInput("root index out of range".into()))?;
    AlgebraicNumberSpec::new(coefficients, root_index)
}

/// A finitely supported vector with algebraic coefficients on the binary
/// basis strings. Coefficients are listed only where nonzero; the zero code
/// `(z, root 0)` is reserved for implicit padding and rejected as an
/// explicit entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryVector {
    coefficients: Vec<(Vec<u8>, AlgebraicNumberSpec)>,
}

impl ElementaryVector {
    pub fn new(mut coefficients: Vec<(Vec<u8>, AlgebraicNumberSpec)>) -> Result<Self> {
        for (bits, spec) in &coefficients {
            string_to_index(bits)?;
            if *spec == AlgebraicNumberSpec::zero() {
                return Err(Error::InvalidInput(
                    "zero coefficients are implicit; drop the entry".into(),
                ));
            }
        }
        coefficients.sort_by_key(|(bits, _)| string_to_index(bits).expect("validated"));
        for w in coefficients.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!(
                    "duplicate basis string {:?}",
                    w[0].0
                )));
            }
        }
        Ok(ElementaryVector { coefficients })
    }

    pub fn zero() -> Self {
        ElementaryVector {
            coefficients: Vec::new(),
        }
    }

    pub fn coefficients(&self) -> &[(Vec<u8>, AlgebraicNumberSpec)] {
        &self.coefficients
    }
}

/// Symbolic code of an elementary vector: the outer prime 2 carries the
/// largest occupied index `n`, and primes 3, 5, … carry the (themselves
/// symbolic) codes `w(a₀), …, w(aₙ)` of each coefficient slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryVectorCode {
    max_index: u64,
    coefficient_codes: Vec<ExponentVector>,
}

impl ElementaryVectorCode {
    pub fn max_index(&self) -> u64 {
        self.max_index
    }

    pub fn coefficient_codes(&self) -> &[ExponentVector] {
        &self.coefficient_codes
    }

    /// Full Gödel number `2ⁿ · Π p_{j+2}^{w(aⱼ)}` when every inner code
    /// materializes below `bound` and those values are again below `bound`;
    /// otherwise the code stays symbolic (`None`).
    pub fn materialize(&self, bound: &BigUint) -> Option<BigUint> {
        let mut acc = BigUint::from(2u32).pow(u32::try_from(self.max_index).ok()?);
        let ps = primes(self.coefficient_codes.len() + 1);
        for (code, p) in self.coefficient_codes.iter().zip(ps.iter().skip(1)) {
            let w = code.materialize(bound)?;
            if &w >= bound {
                return None;
            }
            acc *= BigUint::from(*p).pow(w.to_u32()?);
        }
        Some(acc)
    }
}

/// Codes an [`ElementaryVector`] as `W(ψ)`. The zero vector gets the base
/// code (outer exponent 0, no coefficient slots).
pub fn encode_elementary_vector(vector: &ElementaryVector) -> Result<ElementaryVectorCode> {
    if vector.coefficients().is_empty() {
        return Ok(ElementaryVectorCode {
            max_index: 0,
            coefficient_codes: Vec::new(),
        });
    }
    let indexed: Vec<(u64, &AlgebraicNumberSpec)> = vector
        .coefficients()
        .iter()
        .map(|(bits, spec)| Ok((string_to_index(bits)?, spec)))
        .collect::<Result<_>>()?;
    let max_index = indexed.last().expect("nonempty").0;
    let mut coefficient_codes = Vec::with_capacity(max_index as usize + 1);
    let mut next = indexed.iter().peekable();
    for j in 0..=max_index {
        let spec = match next.peek() {
            Some((idx, spec)) if *idx == j => {
                next.next();
                (*spec).clone()
            }
            _ => AlgebraicNumberSpec::zero(),
        };
        coefficient_codes.push(encode_algebraic(&spec));
    }
    Ok(ElementaryVectorCode {
        max_index,
        coefficient_codes,
    })
}

/// Inverse of [`encode_elementary_vector`]: padding slots decode back to
/// absent coefficients.
pub fn decode_elementary_vector(code: &ElementaryVectorCode) -> Result<ElementaryVector> {
    if code.coefficient_codes.is_empty() {
        return Ok(ElementaryVector::zero());
    }
    if code.coefficient_codes.len() != code.max_index as usize + 1 {
        return Err(Error::InvalidInput(format!(
            "elementary code claims max index {} but carries {} slots",
            code.max_index,
            code.coefficient_codes.len()
        )));
    }
    let zero = AlgebraicNumberSpec::zero();
    let mut coefficients = Vec::new();
    for (j, inner) in code.coefficient_codes.iter().enumerate() {
        let spec = decode_algebraic(inner)?;
        if spec != zero {
            coefficients.push((index_to_string(j as u64), spec));
        }
    }
    if coefficients.is_empty() {
        return Err(Error::InvalidInput(
            "nonempty code decodes to the zero vector; use the base code".into(),
        ));
    }
    ElementaryVector::new(coefficients)
}
