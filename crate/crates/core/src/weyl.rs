//! Root systems, Weyl groups and reduced words.
//!
//! A Weyl group element is stored as the integer matrix of its action on
//! degree vectors (fundamental-weight coordinates). The generator `r_i`
//! acts by `d_j -> d_j - d_i A[i][j]`, and the word `(l_1, .., l_r)` denotes
//! `r_{l_1} ... r_{l_r}`, so its matrix is the left-to-right product.

use std::collections::{HashMap, VecDeque};
use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dynkin::{symmetrize, CartanData};

pub const ROOT_CAP: usize = 10_000;
pub const BFS_CAP: usize = 1_000_000;
/// Largest group for which a full multiplication table is materialized.
pub const TABLE_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeylError {
    #[error("index {index} out of range for rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },
    #[error("closure exceeded the cap of {cap} elements; the Cartan matrix is not of finite type")]
    NonTerminating { cap: usize },
    #[error("root {coeffs:?} has coefficients of mixed sign")]
    MixedSign { coeffs: Vec<i64> },
    #[error("coroot pairing {num}/{den} is not an integer")]
    NonIntegral { num: i64, den: i64 },
    #[error("vector is not a root of the system")]
    NotARoot,
    #[error("reduced-word count does not fit in 128 bits")]
    CountOverflow,
    #[error("group of order > {cap} is too large to tabulate")]
    TooLarge { cap: usize },
    #[error("rank {rank} out of range for {total} reduced words")]
    RankOutOfRange { rank: u128, total: u128 },
    #[error("word is not a reduced word of the element")]
    NotAReducedWord,
}

pub(crate) fn check_indices(rank: usize, word: &[usize]) -> Result<(), WeylError> {
    match word.iter().find(|&&i| i >= rank) {
        Some(&index) => Err(WeylError::IndexOutOfRange { index, rank }),
        None => Ok(()),
    }
}

/// A root as coefficients in the simple-root basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Root {
    pub coeffs: Vec<i64>,
    pub degrees: Vec<i64>,
}

impl Root {
    pub fn is_positive(&self) -> bool {
        self.coeffs.iter().all(|&c| c >= 0)
    }

    pub fn height(&self) -> i64 {
        self.coeffs.iter().sum()
    }

    pub fn negated(&self) -> Root {
        Root {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
            degrees: self.degrees.iter().map(|&c| -c).collect(),
        }
    }
}

/// Degree vector `c^T A` of `sum c_j alpha_j`.
pub fn root_to_degrees(c: &CartanData, coeffs: &[i64]) -> Vec<i64> {
    let n = c.rank();
    (0..n)
        .map(|k| (0..n).map(|j| coeffs[j] * c.entry(j, k)).sum())
        .collect()
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    cartan: CartanData,
    symmetrizer: Vec<i64>,
    /// Positive roots by (height, coefficients), then their negatives in the same order.
    roots: Vec<Root>,
    /// Coroot of each positive root in the simple-coroot basis.
    coroots: Vec<Vec<i64>>,
    by_degrees: HashMap<Vec<i64>, usize>,
}

/// Closure of the simple roots under the simple reflections.
pub fn generate_roots(c: &CartanData) -> Result<RootSystem, WeylError> {
    let n = c.rank();
    let mut seen: HashMap<Vec<i64>, ()> = HashMap::new();
    let mut queue = VecDeque::new();
    for i in 0..n {
        let mut e = vec![0i64; n];
        e[i] = 1;
        seen.insert(e.clone(), ());
        queue.push_back(e);
    }
    while let Some(coeffs) = queue.pop_front() {
        for i in 0..n {
            let s: i64 = (0..n).map(|j| coeffs[j] * c.entry(j, i)).sum();
            if s == 0 {
                continue;
            }
            let mut next = coeffs.clone();
            next[i] -= s;
            if !seen.contains_key(&next) {
                if seen.len() >= ROOT_CAP {
                    return Err(WeylError::NonTerminating { cap: ROOT_CAP });
                }
                seen.insert(next.clone(), ());
                queue.push_back(next);
            }
        }
    }
    let mut positives = Vec::new();
    for coeffs in seen.into_keys() {
        let pos = coeffs.iter().all(|&x| x >= 0);
        let neg = coeffs.iter().all(|&x| x <= 0);
        if !pos && !neg {
            return Err(WeylError::MixedSign { coeffs });
        }
        if pos {
            positives.push(coeffs);
        }
    }
    positives.sort_by(|a, b| {
        let ha: i64 = a.iter().sum();
        let hb: i64 = b.iter().sum();
        ha.cmp(&hb).then_with(|| b.cmp(a))
    });
    let mut roots: Vec<Root> = positives
        .iter()
        .map(|coeffs| Root {
            degrees: root_to_degrees(c, coeffs),
            coeffs: coeffs.clone(),
        })
        .collect();
    let negs: Vec<Root> = roots.iter().map(Root::negated).collect();
    roots.extend(negs);

    let symmetrizer = symmetrize(c);
    let mut coroots = Vec::with_capacity(positives.len());
    for r in &roots[..positives.len()] {
        coroots.push(coroot_coefficients(c, &symmetrizer, &r.coeffs)?);
    }
    let by_degrees = roots
        .iter()
        .enumerate()
        .map(|(k, r)| (r.degrees.clone(), k))
        .collect();
    Ok(RootSystem {
        cartan: c.clone(),
        symmetrizer,
        roots,
        coroots,
        by_degrees,
    })
}

/// Squared lengths `e_j` of the simple roots, up to a common factor: the
/// invariant form has `(alpha_i, alpha_j) = A[i][j] e_j / 2`.
fn squared_lengths(symmetrizer: &[i64]) -> Vec<i64> {
    let l = symmetrizer.iter().fold(1i64, |acc, &d| acc.lcm(&d));
    symmetrizer.iter().map(|&d| l / d).collect()
}

fn coroot_coefficients(c: &CartanData, symmetrizer: &[i64], coeffs: &[i64]) -> Result<Vec<i64>, WeylError> {
    let n = c.rank();
    let e = squared_lengths(symmetrizer);
    let mut twice_norm = 0i64;
    for j in 0..n {
        for k in 0..n {
            twice_norm += coeffs[j] * coeffs[k] * c.entry(j, k) * e[k];
        }
    }
    // (alpha, alpha) = twice_norm / 2; coefficient of alpha_j^vee is c_j e_j / (alpha, alpha).
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let q = Ratio::new(2 * coeffs[j] * e[j], twice_norm);
        if !q.is_integer() {
            return Err(WeylError::NonIntegral {
                num: *q.numer(),
                den: *q.denom(),
            });
        }
        out.push(q.to_integer());
    }
    Ok(out)
}

impl RootSystem {
    pub fn cartan(&self) -> &CartanData {
        &self.cartan
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.roots[..self.num_positive()]
    }

    pub fn num_positive(&self) -> usize {
        self.roots.len() / 2
    }

    /// Index into `roots()` of the root with the given degree vector.
    pub fn root_index_by_degrees(&self, degrees: &[i64]) -> Option<usize> {
        self.by_degrees.get(degrees).copied()
    }

    pub fn root_by_coeffs(&self, coeffs: &[i64]) -> Option<&Root> {
        self.root_index_by_degrees(&root_to_degrees(&self.cartan, coeffs))
            .map(|k| &self.roots[k])
    }

    /// Simple-coroot coefficients of the coroot of a positive root.
    pub fn coroot(&self, positive_index: usize) -> &[i64] {
        &self.coroots[positive_index]
    }

    /// `<L, alpha^vee>` for a root given by its coefficients.
    pub fn coroot_pairing(&self, coeffs: &[i64], degrees: &[i64]) -> Result<i64, WeylError> {
        let n = self.rank();
        let e = squared_lengths(&self.symmetrizer);
        let mut num = 0i64;
        let mut twice_norm = 0i64;
        for j in 0..n {
            num += coeffs[j] * degrees[j] * e[j];
            for k in 0..n {
                twice_norm += coeffs[j] * coeffs[k] * self.cartan.entry(j, k) * e[k];
            }
        }
        if twice_norm == 0 {
            return Err(WeylError::NotARoot);
        }
        let q = Ratio::new(2 * num, twice_norm);
        if q.is_integer() {
            Ok(q.to_integer())
        } else {
            Err(WeylError::NonIntegral {
                num: *q.numer(),
                den: *q.denom(),
            })
        }
    }

    fn is_negative_root(&self, degrees: &[i64]) -> bool {
        match self.by_degrees.get(degrees) {
            Some(&k) => k >= self.num_positive(),
            None => panic!("Weyl group element did not map a root to a root"),
        }
    }

    pub fn identity(&self) -> WeylElement {
        let n = self.rank();
        let mut action = vec![0i64; n * n];
        for i in 0..n {
            action[i * n + i] = 1;
        }
        WeylElement {
            n,
            action,
            length: 0,
            witness_word: Vec::new(),
        }
    }

    /// Matrix of the simple reflection `r_i`.
    pub fn generator_matrix(&self, i: usize) -> Vec<i64> {
        let n = self.rank();
        let mut m = vec![0i64; n * n];
        for j in 0..n {
            m[j * n + j] = 1;
            m[j * n + i] -= self.cartan.entry(i, j);
        }
        m
    }

    fn action_of_word(&self, word: &[usize]) -> Vec<i64> {
        let n = self.rank();
        let mut m = self.identity().action;
        for &i in word {
            m = right_mul_generator(&m, n, &self.cartan, i);
        }
        m
    }

    /// Element from an arbitrary (not necessarily reduced) word.
    pub fn element_from_word(&self, word: &[usize]) -> Result<WeylElement, WeylError> {
        check_indices(self.rank(), word)?;
        let action = self.action_of_word(word);
        Ok(self.element_from_action(action))
    }

    /// Wraps an action matrix, computing its length and a reduced word.
    pub fn element_from_action(&self, action: Vec<i64>) -> WeylElement {
        let n = self.rank();
        let length = self.length_of_action(&action);
        // Peel right descents to produce a witness.
        let mut m = action.clone();
        let mut rev = Vec::with_capacity(length);
        while let Some(i) = (0..n).find(|&i| self.is_right_descent(&m, i)) {
            rev.push(i);
            m = right_mul_generator(&m, n, &self.cartan, i);
        }
        rev.reverse();
        debug_assert_eq!(rev.len(), length);
        WeylElement {
            n,
            action,
            length,
            witness_word: rev,
        }
    }

    fn length_of_action(&self, action: &[i64]) -> usize {
        let n = self.rank();
        self.positive_roots()
            .iter()
            .filter(|r| self.is_negative_root(&apply(action, n, &r.degrees)))
            .count()
    }

    fn is_right_descent(&self, action: &[i64], i: usize) -> bool {
        let n = self.rank();
        self.is_negative_root(&apply(action, n, self.cartan.row(i)))
    }

    /// Indices `i` with `length(w r_i) < length(w)`.
    pub fn descents(&self, w: &WeylElement) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| self.is_right_descent(&w.action, i))
            .collect()
    }

    /// Indices `i` with `length(r_i w) < length(w)`.
    pub fn left_descents(&self, w: &WeylElement) -> Vec<usize> {
        left_descents_of(&w.action, w.n)
    }

    pub fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        self.element_from_action(mat_mul(&a.action, &b.action, a.n))
    }

    pub fn longest_element(&self) -> WeylElement {
        let n = self.rank();
        let mut m = self.identity().action;
        let mut word = Vec::new();
        while let Some(i) = (0..n).find(|&i| !self.is_right_descent(&m, i)) {
            m = right_mul_generator(&m, n, &self.cartan, i);
            word.push(i);
        }
        WeylElement {
            n,
            length: word.len(),
            action: m,
            witness_word: word,
        }
    }

    /// Image of a root under `w`.
    pub fn act_on_root(&self, w: &WeylElement, root: &Root) -> &Root {
        let img = apply(&w.action, w.n, &root.degrees);
        let k = self
            .root_index_by_degrees(&img)
            .expect("Weyl group element maps roots to roots");
        &self.roots[k]
    }

    pub fn is_reduced(&self, word: &[usize]) -> Result<bool, WeylError> {
        check_indices(self.rank(), word)?;
        Ok(self.length_of_action(&self.action_of_word(word)) == word.len())
    }

    /// Number of reduced words of `w`, by dynamic programming over the
    /// weak order below `w`. Fails once more than `TABLE_CAP` elements
    /// would need to be stored.
    pub fn count_reduced_words(&self, w: &WeylElement) -> Result<BigUint, WeylError> {
        self.count_reduced_words_capped(w, TABLE_CAP)
    }

    pub fn count_reduced_words_capped(&self, w: &WeylElement, cap: usize) -> Result<BigUint, WeylError> {
        let n = self.rank();
        let mut memo: HashMap<Vec<i64>, BigUint> = HashMap::new();
        // Post-order traversal with an explicit stack.
        let mut stack: Vec<(Vec<i64>, bool)> = vec![(w.action.clone(), false)];
        while let Some((m, expanded)) = stack.pop() {
            if memo.contains_key(&m) {
                continue;
            }
            let desc = left_descents_of(&m, n);
            if desc.is_empty() {
                memo.insert(m, BigUint::one());
                continue;
            }
            if memo.len() >= cap {
                return Err(WeylError::TooLarge { cap });
            }
            let children: Vec<Vec<i64>> = desc
                .iter()
                .map(|&i| left_mul_generator(&m, n, &self.cartan, i))
                .collect();
            if expanded {
                let total = children
                    .iter()
                    .fold(BigUint::zero(), |acc, ch| acc + &memo[ch]);
                memo.insert(m, total);
            } else {
                stack.push((m, true));
                for ch in children {
                    if !memo.contains_key(&ch) {
                        stack.push((ch, false));
                    }
                }
            }
        }
        Ok(memo.remove(&w.action).expect("root of the traversal is memoized"))
    }

    /// Streams the reduced words of `w` in lexicographic order. The visitor
    /// may stop the stream by returning `ControlFlow::Break`.
    pub fn enumerate_reduced_words<F>(&self, w: &WeylElement, mut visitor: F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let n = self.rank();
        let mut word = Vec::with_capacity(w.length);
        self.enumerate_rec(&w.action, n, &mut word, &mut visitor)
    }

    fn enumerate_rec<F>(&self, m: &[i64], n: usize, word: &mut Vec<usize>, visitor: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let desc = left_descents_of(m, n);
        if desc.is_empty() {
            return visitor(word);
        }
        for i in desc {
            let next = left_mul_generator(m, n, &self.cartan, i);
            word.push(i);
            self.enumerate_rec(&next, n, word, visitor)?;
            word.pop();
        }
        ControlFlow::Continue(())
    }

    /// Breadth-first closure of the group. Fails if more than `cap` elements appear.
    pub fn weyl_order_capped(&self, cap: usize) -> Result<u64, WeylError> {
        let n = self.rank();
        let id = self.identity().action;
        let mut seen: std::collections::HashSet<Vec<i64>> = std::collections::HashSet::new();
        seen.insert(id.clone());
        let mut queue = VecDeque::from([id]);
        while let Some(m) = queue.pop_front() {
            for i in 0..n {
                let next = right_mul_generator(&m, n, &self.cartan, i);
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        return Err(WeylError::NonTerminating { cap });
                    }
                    queue.push_back(next);
                }
            }
        }
        Ok(seen.len() as u64)
    }
}

/// `|W|` by breadth-first closure over action matrices.
pub fn weyl_order(c: &CartanData) -> Result<u64, WeylError> {
    generate_roots(c)?.weyl_order_capped(BFS_CAP)
}

pub fn longest_element(c: &CartanData) -> Result<WeylElement, WeylError> {
    Ok(generate_roots(c)?.longest_element())
}

pub fn is_reduced(c: &CartanData, word: &[usize]) -> Result<bool, WeylError> {
    check_indices(c.rank(), word)?;
    generate_roots(c)?.is_reduced(word)
}

/// Weyl group element: action matrix on degree vectors (row-major), its
/// length and one reduced word.
#[derive(Clone, Debug)]
pub struct WeylElement {
    n: usize,
    action: Vec<i64>,
    length: usize,
    witness_word: Vec<usize>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.action == other.action
    }
}

impl Eq for WeylElement {}

impl std::hash::Hash for WeylElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.action.hash(state)
    }
}

impl WeylElement {
    pub fn action(&self) -> &[i64] {
        &self.action
    }

    pub fn entry(&self, row: usize, col: usize) -> i64 {
        self.action[row * self.n + col]
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn witness_word(&self) -> &[usize] {
        &self.witness_word
    }

    pub fn apply(&self, degrees: &[i64]) -> Vec<i64> {
        apply(&self.action, self.n, degrees)
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    pub fn determinant(&self) -> i64 {
        let rows: Vec<Vec<i64>> = self.action.chunks(self.n).map(|r| r.to_vec()).collect();
        crate::dynkin::integer_determinant(&rows)
    }
}

pub(crate) fn apply(m: &[i64], n: usize, v: &[i64]) -> Vec<i64> {
    (0..n)
        .map(|j| (0..n).map(|k| m[j * n + k] * v[k]).sum())
        .collect()
}

fn mat_mul(a: &[i64], b: &[i64], n: usize) -> Vec<i64> {
    let mut out = vec![0i64; n * n];
    for i in 0..n {
        for k in 0..n {
            let x = a[i * n + k];
            if x == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += x * b[k * n + j];
            }
        }
    }
    out
}

/// `M S_i`: only column `i` changes, `M[j][i] -= sum_k M[j][k] A[i][k]`.
fn right_mul_generator(m: &[i64], n: usize, c: &CartanData, i: usize) -> Vec<i64> {
    let mut out = m.to_vec();
    let row = c.row(i);
    for j in 0..n {
        let s: i64 = (0..n).map(|k| m[j * n + k] * row[k]).sum();
        out[j * n + i] -= s;
    }
    out
}

/// `S_i M`: row `j` gains `-A[i][j]` times row `i`.
fn left_mul_generator(m: &[i64], n: usize, c: &CartanData, i: usize) -> Vec<i64> {
    let mut out = m.to_vec();
    for j in 0..n {
        let coef = c.entry(i, j);
        if coef == 0 {
            continue;
        }
        for k in 0..n {
            out[j * n + k] -= coef * m[i * n + k];
        }
    }
    out
}

/// `i` is a left descent of `w` iff `w(rho)` has negative `i`-th degree.
fn left_descents_of(m: &[i64], n: usize) -> Vec<usize> {
    (0..n)
        .filter(|&j| (0..n).map(|k| m[j * n + k]).sum::<i64>() < 0)
        .collect()
}

/// Full multiplication table of a Weyl group, with per-element reduced-word
/// counts. Supports lexicographic ranking and unranking of reduced words.
#[derive(Clone, Debug)]
pub struct WeylTable {
    rank: usize,
    actions: Vec<Vec<i64>>,
    lengths: Vec<u32>,
    /// `left[e * rank + i]` is the index of `r_i e`.
    left: Vec<u32>,
    /// `right[e * rank + i]` is the index of `e r_i`.
    right: Vec<u32>,
    counts: Vec<u128>,
    index: HashMap<Vec<i64>, u32>,
}

impl WeylTable {
    pub fn build(rs: &RootSystem) -> Result<WeylTable, WeylError> {
        Self::build_capped(rs, TABLE_CAP)
    }

    pub fn build_capped(rs: &RootSystem, cap: usize) -> Result<WeylTable, WeylError> {
        let n = rs.rank();
        let c = rs.cartan();
        let id = rs.identity().action;
        let mut actions = vec![id.clone()];
        let mut lengths = vec![0u32];
        let mut index: HashMap<Vec<i64>, u32> = HashMap::from([(id, 0)]);
        let mut right: Vec<u32> = Vec::new();
        let mut head = 0;
        while head < actions.len() {
            for i in 0..n {
                let next = right_mul_generator(&actions[head], n, c, i);
                let k = match index.get(&next) {
                    Some(&k) => k,
                    None => {
                        if actions.len() >= cap {
                            return Err(WeylError::TooLarge { cap });
                        }
                        let k = actions.len() as u32;
                        index.insert(next.clone(), k);
                        actions.push(next);
                        lengths.push(lengths[head] + 1);
                        k
                    }
                };
                right.push(k);
            }
            head += 1;
        }
        let mut left = Vec::with_capacity(actions.len() * n);
        for m in &actions {
            for i in 0..n {
                left.push(index[&left_mul_generator(m, n, c, i)]);
            }
        }
        // BFS order is by length, so every left child precedes its parent.
        let mut counts = vec![0u128; actions.len()];
        counts[0] = 1;
        let mut overflow = false;
        for e in 1..actions.len() {
            let mut total = 0u128;
            for i in 0..n {
                let ch = left[e * n + i] as usize;
                if lengths[ch] < lengths[e] {
                    match total.checked_add(counts[ch]) {
                        Some(t) => total = t,
                        None => overflow = true,
                    }
                }
            }
            counts[e] = total;
        }
        if overflow {
            counts.clear();
        }
        Ok(WeylTable {
            rank: n,
            actions,
            lengths,
            left,
            right,
            counts,
            index,
        })
    }

    pub fn order(&self) -> usize {
        self.actions.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn index_of(&self, w: &WeylElement) -> Option<usize> {
        self.index.get(&w.action).map(|&k| k as usize)
    }

    pub fn action(&self, e: usize) -> &[i64] {
        &self.actions[e]
    }

    pub fn length(&self, e: usize) -> usize {
        self.lengths[e] as usize
    }

    pub fn left_mul(&self, i: usize, e: usize) -> usize {
        self.left[e * self.rank + i] as usize
    }

    pub fn right_mul(&self, e: usize, i: usize) -> usize {
        self.right[e * self.rank + i] as usize
    }

    pub fn is_left_descent(&self, e: usize, i: usize) -> bool {
        self.lengths[self.left_mul(i, e)] < self.lengths[e]
    }

    pub fn longest(&self) -> usize {
        (0..self.order())
            .max_by_key(|&e| self.lengths[e])
            .expect("group is nonempty")
    }

    pub fn count(&self, e: usize) -> Result<u128, WeylError> {
        self.counts.get(e).copied().ok_or(WeylError::CountOverflow)
    }

    /// The reduced word of lexicographic rank `k` (0-based) of element `e`.
    pub fn unrank(&self, e: usize, mut k: u128) -> Result<Vec<usize>, WeylError> {
        let total = self.count(e)?;
        if k >= total {
            return Err(WeylError::RankOutOfRange { rank: k, total });
        }
        let mut word = Vec::with_capacity(self.length(e));
        let mut cur = e;
        while self.lengths[cur] > 0 {
            for i in 0..self.rank {
                if !self.is_left_descent(cur, i) {
                    continue;
                }
                let ch = self.left_mul(i, cur);
                let c = self.counts[ch];
                if k < c {
                    word.push(i);
                    cur = ch;
                    break;
                }
                k -= c;
            }
        }
        Ok(word)
    }

    /// Lexicographic rank of a reduced word of element `e`.
    pub fn rank_of(&self, e: usize, word: &[usize]) -> Result<u128, WeylError> {
        self.count(e)?;
        if word.len() != self.length(e) {
            return Err(WeylError::NotAReducedWord);
        }
        let mut r = 0u128;
        let mut cur = e;
        for &l in word {
            if l >= self.rank || !self.is_left_descent(cur, l) {
                return Err(WeylError::NotAReducedWord);
            }
            for i in 0..l {
                if self.is_left_descent(cur, i) {
                    r += self.counts[self.left_mul(i, cur)];
                }
            }
            cur = self.left_mul(l, cur);
        }
        Ok(r)
    }

    /// Replaces `word` by its lexicographic successor among the reduced words
    /// of `e`; returns false if it was the last one.
    pub fn next_word(&self, e: usize, word: &mut Vec<usize>) -> bool {
        // remaining[p] = element left after removing the first p letters.
        let mut remaining = Vec::with_capacity(word.len() + 1);
        remaining.push(e);
        for &l in word.iter() {
            let cur = *remaining.last().expect("nonempty");
            remaining.push(self.left_mul(l, cur));
        }
        while let Some(l) = word.pop() {
            remaining.pop();
            let cur = *remaining.last().expect("nonempty");
            if let Some(i) = (l + 1..self.rank).find(|&i| self.is_left_descent(cur, i)) {
                word.push(i);
                let mut cur = self.left_mul(i, cur);
                while self.lengths[cur] > 0 {
                    let j = (0..self.rank)
                        .find(|&j| self.is_left_descent(cur, j))
                        .expect("nontrivial element has a descent");
                    word.push(j);
                    cur = self.left_mul(j, cur);
                }
                return true;
            }
        }
        false
    }

    /// Streams reduced words of `e` with ranks in `[start, end)`.
    pub fn for_each_in_range<F>(&self, e: usize, start: u128, end: u128, mut visitor: F) -> Result<(), WeylError>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        let end = end.min(self.count(e)?);
        if start >= end {
            return Ok(());
        }
        let mut word = self.unrank(e, start)?;
        let mut k = start;
        loop {
            if visitor(&word).is_break() {
                return Ok(());
            }
            k += 1;
            if k >= end || !self.next_word(e, &mut word) {
                return Ok(());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynkin::{builtin, TypeLabel};
    use std::collections::HashSet;

    fn rs(label: TypeLabel, rank: usize) -> RootSystem {
        generate_roots(&builtin(label, rank).unwrap()).unwrap()
    }

    /// Brute-force oracle: all words of length `len` whose product is `w0`
    /// and which are reduced.
    fn brute_reduced_words(rs: &RootSystem, len: usize) -> Vec<Vec<usize>> {
        let n = rs.rank();
        let w0 = rs.longest_element();
        let mut out = Vec::new();
        let total = n.pow(len as u32);
        for mut code in 0..total {
            let mut w = Vec::with_capacity(len);
            for _ in 0..len {
                w.push(code % n);
                code /= n;
            }
            w.reverse();
            if rs.element_from_word(&w).unwrap() == w0 {
                out.push(w);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn root_counts() {
        let a1 = rs(TypeLabel::A, 1);
        assert_eq!(a1.roots().len(), 2);
        let a2 = rs(TypeLabel::A, 2);
        let pos: HashSet<Vec<i64>> = a2.positive_roots().iter().map(|r| r.coeffs.clone()).collect();
        assert_eq!(pos, HashSet::from([vec![1, 0], vec![0, 1], vec![1, 1]]));
        assert_eq!(rs(TypeLabel::F, 4).num_positive(), 24);
        assert_eq!(rs(TypeLabel::G, 2).num_positive(), 6);
        assert_eq!(rs(TypeLabel::E, 8).num_positive(), 120);
        assert_eq!(rs(TypeLabel::D, 4).num_positive(), 12);
    }

    #[test]
    fn degrees_of_roots() {
        let c = builtin(TypeLabel::A, 2).unwrap();
        assert_eq!(root_to_degrees(&c, &[1, 0]), vec![2, -1]);
        assert_eq!(root_to_degrees(&c, &[1, 1]), vec![1, 1]);
    }

    #[test]
    fn infinite_type_hits_cap() {
        let c = crate::dynkin::validate_cartan(vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]]).unwrap();
        assert_eq!(generate_roots(&c).unwrap_err(), WeylError::NonTerminating { cap: ROOT_CAP });
    }

    #[test]
    fn coroot_pairings() {
        let a2 = rs(TypeLabel::A, 2);
        assert_eq!(a2.coroot_pairing(&[1, 1], &[1, 0]).unwrap(), 1);
        let g2 = rs(TypeLabel::G, 2);
        for r in g2.positive_roots() {
            assert_eq!(g2.coroot_pairing(&r.coeffs, &r.degrees).unwrap(), 2);
        }
        // alpha_1 + alpha_2 in G2 is short, its coroot is alpha_1^vee + 3 alpha_2^vee.
        assert_eq!(g2.coroot_pairing(&[1, 1], &[1, 0]).unwrap(), 1);
        assert_eq!(g2.coroot_pairing(&[1, 1], &[0, 1]).unwrap(), 3);
        for (k, r) in g2.positive_roots().iter().enumerate() {
            for i in 0..2 {
                let mut e = vec![0; 2];
                e[i] = 1;
                assert_eq!(g2.coroot(k)[i], g2.coroot_pairing(&r.coeffs, &e).unwrap());
            }
        }
    }

    #[test]
    fn orders() {
        let cases = [
            (TypeLabel::A, 1, 2),
            (TypeLabel::A, 2, 6),
            (TypeLabel::B, 2, 8),
            (TypeLabel::G, 2, 12),
            (TypeLabel::A, 3, 24),
            (TypeLabel::B, 3, 48),
            (TypeLabel::C, 3, 48),
            (TypeLabel::D, 4, 192),
            (TypeLabel::F, 4, 1152),
        ];
        for (l, r, o) in cases {
            assert_eq!(weyl_order(&builtin(l, r).unwrap()).unwrap(), o, "{l}{r}");
        }
    }

    #[test]
    fn longest_lengths_and_negation() {
        for (l, r) in [(TypeLabel::A, 2), (TypeLabel::B, 2), (TypeLabel::G, 2), (TypeLabel::F, 4)] {
            let s = rs(l, r);
            let w0 = s.longest_element();
            assert_eq!(w0.length(), s.num_positive());
            for root in s.positive_roots() {
                assert!(!s.act_on_root(&w0, root).is_positive());
            }
            assert_eq!(s.descents(&w0), (0..r).collect::<Vec<_>>());
            assert_eq!(s.left_descents(&w0), (0..r).collect::<Vec<_>>());
            assert_eq!(w0.determinant().abs(), 1);
        }
    }

    #[test]
    fn descent_examples() {
        let a2 = rs(TypeLabel::A, 2);
        assert!(a2.descents(&a2.identity()).is_empty());
        let r1 = a2.element_from_word(&[0]).unwrap();
        assert_eq!(a2.descents(&r1), vec![0]);
        let w = a2.element_from_word(&[0, 1]).unwrap();
        assert_eq!(a2.descents(&w), vec![1]);
        assert_eq!(a2.left_descents(&w), vec![0]);
    }

    #[test]
    fn witness_words_reproduce_action() {
        let s = rs(TypeLabel::B, 3);
        let w = s.element_from_word(&[0, 1, 2, 1, 0, 2, 2, 1]).unwrap();
        let again = s.element_from_word(w.witness_word()).unwrap();
        assert_eq!(again, w);
        assert_eq!(w.witness_word().len(), w.length());
    }

    #[test]
    fn reduced_counts_match_brute_force() {
        for (l, r, expected) in [(TypeLabel::A, 2, 2u32), (TypeLabel::B, 2, 2), (TypeLabel::A, 3, 16), (TypeLabel::G, 2, 2)] {
            let s = rs(l, r);
            let w0 = s.longest_element();
            let brute = brute_reduced_words(&s, w0.length());
            assert_eq!(brute.len() as u32, expected);
            assert_eq!(s.count_reduced_words(&w0).unwrap(), BigUint::from(expected));
            let mut streamed = Vec::new();
            let _ = s.enumerate_reduced_words(&w0, |w| {
                streamed.push(w.to_vec());
                ControlFlow::Continue(())
            });
            assert_eq!(streamed, brute);
        }
    }

    #[test]
    fn f4_count() {
        let s = rs(TypeLabel::F, 4);
        let w0 = s.longest_element();
        assert_eq!(s.count_reduced_words(&w0).unwrap(), BigUint::from(2_144_892u32));
        let e8 = generate_roots(&builtin(TypeLabel::E, 8).unwrap()).unwrap();
        assert!(matches!(e8.count_reduced_words_capped(&e8.longest_element(), 1000), Err(WeylError::TooLarge { .. })));
        let t = WeylTable::build(&s).unwrap();
        assert_eq!(t.order(), 1152);
        assert_eq!(t.count(t.longest()).unwrap(), 2_144_892);
        assert_eq!(t.index_of(&w0), Some(t.longest()));
    }

    #[test]
    fn enumeration_edge_cases() {
        let a1 = rs(TypeLabel::A, 1);
        let mut seen = Vec::new();
        let _ = a1.enumerate_reduced_words(&a1.identity(), |w| {
            seen.push(w.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(seen, vec![Vec::<usize>::new()]);
        seen.clear();
        let _ = a1.enumerate_reduced_words(&a1.longest_element(), |w| {
            seen.push(w.to_vec());
            ControlFlow::Continue(())
        });
        assert_eq!(seen, vec![vec![0]]);
        let a3 = rs(TypeLabel::A, 3);
        let mut k = 0;
        let flow = a3.enumerate_reduced_words(&a3.longest_element(), |_| {
            k += 1;
            if k == 5 {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        assert!(flow.is_break());
        assert_eq!(k, 5);
    }

    #[test]
    fn table_rank_unrank_and_successor() {
        let s = rs(TypeLabel::A, 3);
        let t = WeylTable::build(&s).unwrap();
        let e = t.longest();
        let mut all = Vec::new();
        let _ = s.enumerate_reduced_words(&s.longest_element(), |w| {
            all.push(w.to_vec());
            ControlFlow::Continue(())
        });
        for (k, w) in all.iter().enumerate() {
            assert_eq!(&t.unrank(e, k as u128).unwrap(), w);
            assert_eq!(t.rank_of(e, w).unwrap(), k as u128);
            let mut next = w.clone();
            let more = t.next_word(e, &mut next);
            assert_eq!(more, k + 1 < all.len());
            if more {
                assert_eq!(next, all[k + 1]);
            }
        }
        assert!(t.unrank(e, 16).is_err());
        let mut got = Vec::new();
        t.for_each_in_range(e, 3, 7, |w| {
            got.push(w.to_vec());
            ControlFlow::Continue(())
        })
        .unwrap();
        assert_eq!(got, all[3..7].to_vec());
    }

    #[test]
    fn is_reduced_examples() {
        let c = builtin(TypeLabel::A, 2).unwrap();
        assert!(is_reduced(&c, &[0, 1, 0]).unwrap());
        assert!(!is_reduced(&c, &[0, 0]).unwrap());
        assert!(is_reduced(&c, &[]).unwrap());
        assert!(!is_reduced(&c, &[0, 1, 0, 1]).unwrap());
        assert_eq!(
            is_reduced(&c, &[0, 2]).unwrap_err(),
            WeylError::IndexOutOfRange { index: 2, rank: 2 }
        );
    }

    #[test]
    fn braid_consistency_b3() {
        let s = rs(TypeLabel::B, 3);
        let t = WeylTable::build(&s).unwrap();
        for e in 0..t.order() {
            let w = s.element_from_action(t.action(e).to_vec());
            assert_eq!(w.length(), t.length(e));
            let _ = s.enumerate_reduced_words(&w, |word| {
                assert_eq!(s.element_from_word(word).unwrap().action(), t.action(e));
                ControlFlow::Continue(())
            });
        }
    }
}
