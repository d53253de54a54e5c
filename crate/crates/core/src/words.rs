//! Exact counting and enumeration of two-letter words.
//!
//! `W_{m,k}` is the set of words of length `m` over `{a, b}` with exactly `k`
//! letters `b`. Words are classified by how often the subword `ab` occurs,
//! and by how sparsely the `b`s are spread. All counts are exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial as big_binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `|W_{m,k}|` that [`enumerate_words`] will walk.
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// Exact binomial coefficient, zero outside `0 <= k <= m`.
pub fn binomial(m: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > m {
        return BigUint::zero();
    }
    big_binomial(BigUint::from(m), BigUint::from(k as u64))
}

/// `|C_{m,k,s}| = C(m-k, s)·C(k, s)`: words of `W_{m,k}` containing `ab` exactly `s` times.
pub fn count_words_with_ab(m: u64, k: u64, s: u64) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    binomial(m - k, s as i64) * binomial(k, s as i64)
}

/// `|D_{m,k,L}| = |C_{m-(k+1)L, k, k}|`: words `a^{i_1} b … a^{i_k} b a^{i_{k+1}}`
/// with every `i_ν > L` for `ν <= k` and trailing run `i_{k+1} >= L`.
pub fn count_sparse_words(m: u64, k: u64, l: u64) -> BigUint {
    let reserved = (k as u128 + 1) * l as u128;
    if reserved > m as u128 {
        return BigUint::zero();
    }
    let rest = m - reserved as u64;
    if rest < 2 * k {
        return BigUint::zero();
    }
    count_words_with_ab(rest, k, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    A,
    B,
}

/// A word over `{a, b}` packed one bit per letter (`b` = 1).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    len: usize,
    bits: Vec<u64>,
}

impl Word {
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word { len: 0, bits: Vec::new() };
        for l in letters {
            w.push(l);
        }
        w
    }

    fn push(&mut self, l: Letter) {
        if self.len % 64 == 0 {
            self.bits.push(0);
        }
        if l == Letter::B {
            self.bits[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn letter(&self, i: usize) -> Letter {
        assert!(i < self.len);
        if self.bits[i / 64] >> (i % 64) & 1 == 1 {
            Letter::B
        } else {
            Letter::A
        }
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.len).map(|i| self.letter(i))
    }

    pub fn count_b(&self) -> usize {
        self.bits.iter().map(|x| x.count_ones() as usize).sum()
    }

    /// Number of positions `i` with `w[i] = a` and `w[i+1] = b`.
    pub fn count_ab_subwords(&self) -> usize {
        if self.len < 2 {
            return 0;
        }
        let mut count = 0;
        for (idx, &x) in self.bits.iter().enumerate() {
            let carry = self.bits.get(idx + 1).map_or(0, |&y| y << 63);
            let next = (x >> 1) | carry;
            // positions i with i + 1 < len inside this block
            let base = idx * 64;
            let valid = (self.len - 1).saturating_sub(base).min(64);
            let mask = if valid == 64 { u64::MAX } else { (1u64 << valid) - 1 };
            count += (!x & next & mask).count_ones() as usize;
        }
        count
    }

    /// Lengths of the `a`-runs cut by each `b`: `k + 1` entries for `k` letters `b`.
    pub fn a_runs(&self) -> Vec<usize> {
        let mut runs = vec![0];
        for l in self.letters() {
            match l {
                Letter::A => *runs.last_mut().unwrap() += 1,
                Letter::B => runs.push(0),
            }
        }
        runs
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in self.letters() {
            f.write_str(if l == Letter::A { "a" } else { "b" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'a' => Ok(Letter::A),
                'b' => Ok(Letter::B),
                other => Err(Error::Validation(format!("invalid letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word::from_letters)
    }
}

/// Lexicographic (`a < b`) stream over `W_{m,k}`.
pub struct WordIter {
    state: Option<Vec<bool>>,
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let current = self.state.as_mut()?;
        let word = Word::from_letters(current.iter().map(|&b| if b { Letter::B } else { Letter::A }));
        // next multiset permutation: rightmost "ab", swap, then sort the tail ascending
        match (0..current.len().saturating_sub(1)).rev().find(|&i| !current[i] && current[i + 1]) {
            Some(i) => {
                let j = (i + 1..current.len()).rev().find(|&j| current[j]).unwrap();
                current.swap(i, j);
                current[i + 1..].reverse();
            }
            None => self.state = None,
        }
        Some(word)
    }
}

/// Every word of `W_{m,k}` exactly once, in lexicographic order.
pub fn enumerate_words(m: u64, k: u64) -> Result<WordIter> {
    if k > m {
        return Ok(WordIter { state: None });
    }
    let count = binomial(m, k as i64);
    if count > BigUint::from(ENUMERATION_CAP) {
        return Err(Error::Resource(format!(
            "W_{{{m},{k}}} has {count} words, above the enumeration cap {ENUMERATION_CAP}"
        )));
    }
    let state = (0..m).map(|i| i >= m - k).collect();
    Ok(WordIter { state: Some(state) })
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

fn big(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn ratio(x: BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn check_epsilon(eps: f64) -> Result<BigRational> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Precondition(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    Ok(exact(eps))
}

/// Exact check of `C(m-L, k) >= (1-ε)·C(m, k)` under `m >= L(1 + k/ε)`.
pub fn lemma_3_3_holds(eps: f64, l: u64, m: u64, k: u64) -> Result<bool> {
    let e = check_epsilon(eps)?;
    if l < 1 {
        return Err(Error::Precondition("L must be at least 1".into()));
    }
    // m >= L(1 + k/ε)  <=>  (m - L)·ε >= L·k
    if (big(m) - big(l)) * &e < big(l) * big(k) {
        return Err(Error::Precondition(format!(
            "m = {m} is below L(1 + k/ε) for L = {l}, k = {k}, ε = {eps}"
        )));
    }
    let lhs = ratio(binomial(m - l, k as i64));
    let rhs = (BigRational::one() - e) * ratio(binomial(m, k as i64));
    Ok(lhs >= rhs)
}

/// Exact check of `Σ_{s<S} C(m-k,s)C(k,s) < ε·C(m-k,S)C(k,S)` under
/// `m > S³/ε + 2S - 1` and `k, m-k >= S`.
pub fn lemma_3_4_holds(eps: f64, s_max: u64, m: u64, k: u64) -> Result<bool> {
    let e = check_epsilon(eps)?;
    if s_max < 1 {
        return Err(Error::Precondition("S must be at least 1".into()));
    }
    // m > S³/ε + 2S - 1  <=>  (m - 2S + 1)·ε > S³
    let slack = BigRational::from_integer(BigInt::from(m) - BigInt::from(2 * s_max) + BigInt::one());
    if slack * &e <= big(s_max).pow(3) {
        return Err(Error::Precondition(format!(
            "m = {m} is not above S³/ε + 2S - 1 for S = {s_max}, ε = {eps}"
        )));
    }
    if k < s_max || k > m || m - k < s_max {
        return Err(Error::Precondition(format!("need k, m - k >= S; got m = {m}, k = {k}, S = {s_max}")));
    }
    let head: BigUint = (0..s_max).map(|s| count_words_with_ab(m, k, s)).sum();
    Ok(ratio(head) < e * ratio(count_words_with_ab(m, k, s_max)))
}

/// Least integer `m` with `m > S³/ε + 2S - 1`, evaluated exactly on the
/// binary value of `ε`.
pub fn alternation_threshold(s_max: u64, eps: f64) -> Result<u64> {
    let e = check_epsilon(eps)?;
    if s_max < 1 {
        return Err(Error::Precondition("S must be at least 1".into()));
    }
    let bound = big(s_max).pow(3) / e + big(2 * s_max) - BigRational::one();
    let m = bound.floor().to_integer() + BigInt::one();
    u64::try_from(m).map_err(|_| Error::Resource(format!("threshold for S = {s_max}, ε = {eps} exceeds 64 bits")))
}

/// Which subset of `W_{m,k}` a count refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordClass {
    All,
    AbExactly { s: u64 },
    Sparse { l: u64 },
}

/// An exact word-class cardinality; the count serializes as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordClassCount {
    pub m: u64,
    pub k: u64,
    pub class: WordClass,
    #[serde(serialize_with = "to_decimal", deserialize_with = "from_decimal")]
    pub count: BigUint,
}

impl WordClassCount {
    pub fn compute(m: u64, k: u64, class: WordClass) -> Self {
        let count = match class {
            WordClass::All => binomial(m, k as i64),
            WordClass::AbExactly { s } => count_words_with_ab(m, k, s),
            WordClass::Sparse { l } => count_sparse_words(m, k, l),
        };
        Self { m, k, class, count }
    }
}

fn to_decimal<S: Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

fn from_decimal<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
    let s = String::deserialize(d)?;
    BigUint::parse_bytes(s.as_bytes(), 10).ok_or_else(|| serde::de::Error::custom(format!("not a decimal integer: {s:?}")))
}
