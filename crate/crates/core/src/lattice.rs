//! Divisor classes in degree coordinates, simple and shifted reflections,
//! and the dominant representative of a shifted class.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynkin::CartanData;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("degree vector has length {len}, expected {rank}")]
    WrongLength { len: usize, rank: usize },
    #[error("dominant representative did not converge within {cap} steps")]
    GuardExceeded { cap: usize },
    #[error("unknown class name {0:?}")]
    UnknownName(String),
}

/// Integer degree vector `d_i = D . Gamma_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DivisorClass {
    pub degrees: Vec<i64>,
}

impl DivisorClass {
    pub fn new(degrees: Vec<i64>) -> Self {
        DivisorClass { degrees }
    }

    pub fn zero(rank: usize) -> Self {
        DivisorClass { degrees: vec![0; rank] }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    #[inline]
    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn is_nef(&self) -> bool {
        self.degrees.iter().all(|&d| d >= 0)
    }

    pub fn add(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass {
            degrees: self.degrees.iter().zip(&other.degrees).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &DivisorClass) -> DivisorClass {
        DivisorClass {
            degrees: self.degrees.iter().zip(&other.degrees).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, k: i64) -> DivisorClass {
        DivisorClass {
            degrees: self.degrees.iter().map(|a| a * k).collect(),
        }
    }

    /// `self + t K_i`.
    pub fn add_k(&self, c: &CartanData, i: usize, t: i64) -> DivisorClass {
        DivisorClass {
            degrees: self
                .degrees
                .iter()
                .zip(c.row(i))
                .map(|(d, a)| d - t * a)
                .collect(),
        }
    }

    /// `self + (1, .., 1)`.
    pub fn rho_shift(&self) -> DivisorClass {
        DivisorClass {
            degrees: self.degrees.iter().map(|d| d + 1).collect(),
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<Vec<i64>> for DivisorClass {
    fn from(degrees: Vec<i64>) -> Self {
        DivisorClass { degrees }
    }
}

fn check_index(c: &CartanData, i: usize) -> Result<(), LatticeError> {
    if i < c.rank() {
        Ok(())
    } else {
        Err(LatticeError::IndexOutOfRange { index: i, rank: c.rank() })
    }
}

pub(crate) fn check_class(c: &CartanData, d: &DivisorClass) -> Result<(), LatticeError> {
    if d.rank() == c.rank() {
        Ok(())
    } else {
        Err(LatticeError::WrongLength { len: d.rank(), rank: c.rank() })
    }
}

/// `r_i(D) = D + (D . Gamma_i) K_i`.
pub fn reflect(c: &CartanData, i: usize, d: &DivisorClass) -> Result<DivisorClass, LatticeError> {
    check_index(c, i)?;
    check_class(c, d)?;
    Ok(reflect_unchecked(c, i, d))
}

pub(crate) fn reflect_unchecked(c: &CartanData, i: usize, d: &DivisorClass) -> DivisorClass {
    d.add_k(c, i, d.degree(i))
}

/// `r'_i(D) = D + (D . Gamma_i + 1) K_i`.
pub fn affine_reflect(c: &CartanData, i: usize, d: &DivisorClass) -> Result<DivisorClass, LatticeError> {
    check_index(c, i)?;
    check_class(c, d)?;
    Ok(d.add_k(c, i, d.degree(i) + 1))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DominantResult {
    Singular,
    /// `dominant` is the strictly dominant shifted vector; applying the
    /// reflections of `word` (last letter first) to the shifted input gives it.
    Regular {
        dominant: DivisorClass,
        length: usize,
        word: Vec<usize>,
    },
}

impl DominantResult {
    pub fn is_singular(&self) -> bool {
        matches!(self, DominantResult::Singular)
    }

    pub fn length(&self) -> Option<usize> {
        match self {
            DominantResult::Singular => None,
            DominantResult::Regular { length, .. } => Some(*length),
        }
    }
}

fn guard_cap(c: &CartanData) -> usize {
    let n = c.rank();
    10 * (n * n + 120)
}

/// Moves `D + rho` into the dominant chamber, pivoting at the smallest
/// negative coordinate.
pub fn dominant_representative(c: &CartanData, d: &DivisorClass) -> Result<DominantResult, LatticeError> {
    dominant_representative_with(c, d, |negatives| negatives[0])
}

/// As `dominant_representative`, with the pivot chosen by `pick` among the
/// negative coordinates (given in increasing order).
pub fn dominant_representative_with<F>(c: &CartanData, d: &DivisorClass, mut pick: F) -> Result<DominantResult, LatticeError>
where
    F: FnMut(&[usize]) -> usize,
{
    check_class(c, d)?;
    let cap = guard_cap(c);
    let mut mu = d.rho_shift();
    let mut pivots = Vec::new();
    let mut negatives = Vec::with_capacity(c.rank());
    loop {
        if mu.degrees.contains(&0) {
            return Ok(DominantResult::Singular);
        }
        negatives.clear();
        negatives.extend((0..c.rank()).filter(|&i| mu.degree(i) < 0));
        if negatives.is_empty() {
            pivots.reverse();
            return Ok(DominantResult::Regular {
                dominant: mu,
                length: pivots.len(),
                word: pivots,
            });
        }
        if pivots.len() >= cap {
            return Err(LatticeError::GuardExceeded { cap });
        }
        let i = pick(&negatives);
        debug_assert!(negatives.contains(&i));
        mu = reflect_unchecked(c, i, &mu);
        pivots.push(i);
    }
}

/// Distinguished classes. Indices are 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedClass {
    K(usize),
    NegK(usize),
    CanonicalX,
    NegHalfCanonicalX,
    Lambda(usize),
}

impl FromStr for NamedClass {
    type Err = LatticeError;

    /// Accepts `K_1`, `-K_1`, `K_X`, `-K_X/2`, `Lambda_1` (1-based).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || LatticeError::UnknownName(s.to_string());
        let index = |rest: &str| -> Result<usize, LatticeError> {
            match rest.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(k - 1),
                _ => Err(bad()),
            }
        };
        match t {
            "K_X" => return Ok(NamedClass::CanonicalX),
            "-K_X/2" => return Ok(NamedClass::NegHalfCanonicalX),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("-K_") {
            return Ok(NamedClass::NegK(index(rest)?));
        }
        if let Some(rest) = t.strip_prefix("K_") {
            return Ok(NamedClass::K(index(rest)?));
        }
        if let Some(rest) = t.strip_prefix("Lambda_") {
            return Ok(NamedClass::Lambda(index(rest)?));
        }
        Err(bad())
    }
}

pub fn named_class(c: &CartanData, name: NamedClass) -> Result<DivisorClass, LatticeError> {
    let n = c.rank();
    let row = |i: usize, sign: i64| -> Result<DivisorClass, LatticeError> {
        check_index(c, i)?;
        Ok(DivisorClass::new(c.row(i).iter().map(|a| sign * a).collect()))
    };
    match name {
        NamedClass::K(i) => row(i, -1),
        NamedClass::NegK(i) => row(i, 1),
        NamedClass::CanonicalX => Ok(DivisorClass::new(vec![-2; n])),
        NamedClass::NegHalfCanonicalX => Ok(DivisorClass::new(vec![1; n])),
        NamedClass::Lambda(i) => {
            check_index(c, i)?;
            let mut v = vec![0; n];
            v[i] = 1;
            Ok(DivisorClass::new(v))
        }
    }
}

/// Reruns the dominant-representative algorithm `runs` times with random
/// pivots and checks that the dominant vector and the length never change.
pub fn orbit_length_invariance_check<R: Rng>(c: &CartanData, d: &DivisorClass, runs: usize, rng: &mut R) -> bool {
    let reference = match dominant_representative(c, d) {
        Ok(r) => r,
        Err(_) => return false,
    };
    for _ in 0..runs {
        let other = dominant_representative_with(c, d, |neg| neg[rng.gen_range(0..neg.len())]);
        match (&reference, other) {
            (DominantResult::Singular, Ok(DominantResult::Singular)) => {}
            (
                DominantResult::Regular { dominant, length, .. },
                Ok(DominantResult::Regular {
                    dominant: d2, length: l2, ..
                }),
            ) if *dominant == d2 && *length == l2 => {}
            _ => return false,
        }
    }
    true
}
