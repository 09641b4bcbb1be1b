//! Numerical model of the Bott-Samelson tower of a word.
//!
//! Curve classes are expressed in the fiber basis `beta_1..beta_r` and
//! divisor classes in the dual basis `H_1..H_r`, so a divisor pairs with
//! `beta_j` through its `j`-th coordinate.

use serde::Serialize;
use thiserror::Error;

use crate::charcalc::{euler_char_bs, CharError};
use crate::dynkin::CartanData;
use crate::lattice::{check_class, DivisorClass, LatticeError};
use crate::weyl::{check_indices, RootSystem, WeylError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BsError {
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Char(#[from] CharError),
    #[error("cone duality failed at ({t},{i}): got {value}")]
    DualityBroken { t: usize, i: usize, value: i64 },
}

impl From<WeylError> for BsError {
    fn from(e: WeylError) -> Self {
        match e {
            WeylError::IndexOutOfRange { index, rank } => BsError::IndexOutOfRange { index, rank },
            other => panic!("unexpected Weyl group error: {other}"),
        }
    }
}

/// Divisor class on the tower, in the `H` basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BsDivisor {
    pub h_coeffs: Vec<i64>,
}

impl BsDivisor {
    pub fn pair_beta(&self, j: usize) -> i64 {
        self.h_coeffs[j]
    }
}

#[derive(Clone, Debug)]
pub struct BsModel {
    cartan: CartanData,
    word: Vec<usize>,
    next_occurrence: Vec<Option<usize>>,
    /// `nb[t][i] = N_t . beta_i`.
    nb: Vec<Vec<i64>>,
    /// `gamma_in_beta[i]` holds the beta-coordinates of `gamma_i`.
    gamma_in_beta: Vec<Vec<i64>>,
}

pub fn build_model(c: &CartanData, word: &[usize]) -> Result<BsModel, BsError> {
    check_indices(c.rank(), word)?;
    let r = word.len();
    let next_occurrence: Vec<Option<usize>> = (0..r)
        .map(|i| (i + 1..r).find(|&k| word[k] == word[i]))
        .collect();
    let nb: Vec<Vec<i64>> = (0..r)
        .map(|t| (0..r).map(|i| i64::from(word[i] == word[t] && i <= t)).collect())
        .collect();
    let gamma_in_beta: Vec<Vec<i64>> = (0..r)
        .map(|i| {
            let mut g = vec![0i64; r];
            g[i] = 1;
            if let Some(k) = next_occurrence[i] {
                g[k] = -1;
            }
            g
        })
        .collect();
    let m = BsModel {
        cartan: c.clone(),
        word: word.to_vec(),
        next_occurrence,
        nb,
        gamma_in_beta,
    };
    let ng = m.n_gamma_matrix();
    for (t, row) in ng.iter().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            if v != i64::from(t == i) {
                return Err(BsError::DualityBroken { t, i, value: v });
            }
        }
    }
    Ok(m)
}

impl BsModel {
    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn next_occurrence(&self) -> &[Option<usize>] {
        &self.next_occurrence
    }

    pub fn n_beta_matrix(&self) -> &[Vec<i64>] {
        &self.nb
    }

    pub fn gamma_in_beta(&self) -> &[Vec<i64>] {
        &self.gamma_in_beta
    }

    /// `(N_t . gamma_i)`.
    pub fn n_gamma_matrix(&self) -> Vec<Vec<i64>> {
        let r = self.len();
        (0..r)
            .map(|t| {
                (0..r)
                    .map(|i| (0..r).map(|k| self.nb[t][k] * self.gamma_in_beta[i][k]).sum())
                    .collect()
            })
            .collect()
    }

    pub fn pair_gamma(&self, d: &BsDivisor, i: usize) -> i64 {
        self.gamma_in_beta[i]
            .iter()
            .zip(&d.h_coeffs)
            .map(|(g, h)| g * h)
            .sum()
    }

    /// `f^* L`: the coefficient of `H_i` is the degree of `L` on `Gamma_{l_i}`.
    pub fn pullback(&self, l: &DivisorClass) -> Result<BsDivisor, BsError> {
        check_class(&self.cartan, l)?;
        Ok(BsDivisor {
            h_coeffs: self.word.iter().map(|&li| l.degree(li)).collect(),
        })
    }

    pub fn nef_cone_generators(&self) -> Vec<BsDivisor> {
        self.nb
            .iter()
            .map(|row| BsDivisor { h_coeffs: row.clone() })
            .collect()
    }

    pub fn is_nef(&self, d: &BsDivisor) -> bool {
        (0..self.len()).all(|i| self.pair_gamma(d, i) >= 0)
    }

    /// Positions `i` whose letter occurs again later.
    pub fn stein_face(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.next_occurrence[i].is_some()).collect()
    }

    pub fn face_codimension(&self) -> usize {
        self.len() - self.stein_face().len()
    }

    /// `Z_{l(i)} . beta_j`: one on its own fiber, `A[l_i][l_j]` on earlier
    /// fibers, zero on later ones.
    pub fn section_divisor_matrix(&self) -> Vec<Vec<i64>> {
        let r = self.len();
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| match j.cmp(&i) {
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Less => self.cartan.entry(self.word[i], self.word[j]),
                        std::cmp::Ordering::Greater => 0,
                    })
                    .collect()
            })
            .collect()
    }

    /// `-K_Z . beta_j` from the section divisors plus `f^*(-K_X/2)`.
    pub fn anticanonical_from_sections(&self) -> Vec<i64> {
        let z = self.section_divisor_matrix();
        let r = self.len();
        (0..r).map(|j| (0..r).map(|i| z[i][j]).sum::<i64>() + 1).collect()
    }

    /// `-K_Z . beta_j` built stage by stage: each ruled stage adds the
    /// pullback of `-K_{l_i}`, which pairs with the fibers up to stage `i`.
    pub fn anticanonical_from_tower(&self) -> Vec<i64> {
        let r = self.len();
        let mut k = vec![0i64; r];
        for i in 0..r {
            for (j, kj) in k.iter_mut().enumerate().take(i + 1) {
                *kj += self.cartan.entry(self.word[i], self.word[j]);
            }
        }
        k
    }

    /// The two descriptions of the anticanonical class agree and every
    /// last-stage fiber has anticanonical degree 2.
    pub fn anticanonical_check(&self) -> bool {
        let a = self.anticanonical_from_sections();
        let b = self.anticanonical_from_tower();
        a == b && a.last().is_none_or(|&x| x == 2)
    }
}

/// Dimension of the image of the tower in the flag manifold.
/// This is the length of the Demazure product of the word.
pub fn image_dimension(rs: &RootSystem, word: &[usize]) -> Result<usize, BsError> {
    crate::weyl::check_indices(rs.rank(), word)?;
    let mut w = rs.identity();
    for &i in word {
        if !rs.descents(&w).contains(&i) {
            w = rs.mul(&w, &rs.element_from_word(&[i])?);
        }
    }
    Ok(w.length())
}

/// `f^* L` is nef and its top self-intersection is positive, detected
/// through the `r`-th finite difference of `k -> chi(k L)`.
pub fn pullback_nef_and_big(c: &CartanData, word: &[usize], l: &DivisorClass) -> Result<bool, BsError> {
    let m = build_model(c, word)?;
    if !m.is_nef(&m.pullback(l)?) {
        return Ok(false);
    }
    let r = word.len();
    let mut values = Vec::with_capacity(r + 1);
    for k in 0..=r as i64 {
        values.push(i128::from(euler_char_bs(c, word, &l.scale(k))?));
    }
    for step in 0..r {
        for k in 0..r - step {
            values[k] = values[k + 1] - values[k];
        }
    }
    Ok(values[0] > 0)
}
