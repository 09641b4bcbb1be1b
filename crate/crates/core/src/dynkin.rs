//! Cartan matrices, Dynkin classification and symmetrizers.
//!
//! Entries follow the convention `A[i][j] = <alpha_i, alpha_j^vee>`, so the
//! degree of the simple root `alpha_i` on the coroot curve `j` is `A[i][j]`.
//! Node orderings of the builtin types follow the usual textbook tables:
//! `B_n` has its short root last, `C_n` its long root last and `F_4` carries
//! the double edge between nodes 2 and 3 (1-based).

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CartanError {
    #[error("Cartan matrix is empty")]
    Empty,
    #[error("Cartan matrix is not square: row {row} has {len} entries, expected {rank}")]
    NotSquare { row: usize, len: usize, rank: usize },
    #[error("declared rank {declared} does not match the matrix size {actual}")]
    RankMismatch { declared: usize, actual: usize },
    #[error("diagonal entry ({index},{index}) is {value}, expected 2")]
    BadDiagonal { index: usize, value: i64 },
    #[error("entries ({i},{j}) and ({j},{i}) must vanish together, got ({a_ij},{a_ji})")]
    AsymmetricZero {
        i: usize,
        j: usize,
        a_ij: i64,
        a_ji: i64,
    },
    #[error("off-diagonal pair ({a_ij},{a_ji}) at ({i},{j}) is not an admissible pair")]
    BadPair {
        i: usize,
        j: usize,
        a_ij: i64,
        a_ji: i64,
    },
    #[error("Cartan matrix is not symmetrizable")]
    NotSymmetrizable,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DynkinError {
    #[error("unsupported finite type {label}{rank}")]
    UnsupportedType { label: TypeLabel, rank: usize },
    #[error("connected component with nodes {nodes:?} is not of finite type")]
    UnclassifiableComponent { nodes: Vec<usize> },
    #[error("unknown type label {0:?}")]
    UnknownLabel(String),
}

const ADMISSIBLE_PAIRS: [(i64, i64); 6] = [(0, 0), (-1, -1), (-1, -2), (-2, -1), (-1, -3), (-3, -1)];

/// A validated Cartan matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CartanData {
    rank: usize,
    matrix: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
struct RawCartan {
    rank: Option<usize>,
    matrix: Vec<Vec<i64>>,
}

impl<'de> Deserialize<'de> for CartanData {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawCartan::deserialize(deserializer)?;
        if let Some(rank) = raw.rank {
            if rank != raw.matrix.len() {
                return Err(serde::de::Error::custom(CartanError::RankMismatch {
                    declared: rank,
                    actual: raw.matrix.len(),
                }));
            }
        }
        validate_cartan(raw.matrix).map_err(serde::de::Error::custom)
    }
}

impl CartanData {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    /// Entry `A[i][j]`, 0-based.
    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.matrix[i][j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[i64] {
        &self.matrix[i]
    }

    /// Whether nodes `i` and `j` are joined in the Dynkin diagram.
    pub fn connected(&self, i: usize, j: usize) -> bool {
        i != j && self.matrix[i][j] != 0
    }

    /// Connected components of the diagram, each sorted, ordered by smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.rank;
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                for j in 0..n {
                    if !seen[j] && self.connected(i, j) {
                        seen[j] = true;
                        comp.push(j);
                        queue.push_back(j);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn determinant(&self) -> i64 {
        integer_determinant(&self.matrix)
    }

    /// Simultaneous row/column permutation: the result has entry
    /// `A'[a][b] = A[perm[a]][perm[b]]`.
    pub fn permuted(&self, perm: &[usize]) -> CartanData {
        let n = self.rank;
        assert_eq!(perm.len(), n, "permutation length must equal the rank");
        let matrix = (0..n)
            .map(|a| (0..n).map(|b| self.matrix[perm[a]][perm[b]]).collect())
            .collect();
        CartanData { rank: n, matrix }
    }

    /// Block-diagonal sum of two Cartan matrices.
    pub fn direct_sum(&self, other: &CartanData) -> CartanData {
        let n = self.rank + other.rank;
        let mut matrix = vec![vec![0; n]; n];
        for i in 0..self.rank {
            matrix[i][..self.rank].copy_from_slice(&self.matrix[i]);
        }
        for i in 0..other.rank {
            matrix[self.rank + i][self.rank..].copy_from_slice(&other.matrix[i]);
        }
        CartanData { rank: n, matrix }
    }
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn integer_determinant(rows: &[Vec<i64>]) -> i64 {
    let n = rows.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    (sign * m[n - 1][n - 1]) as i64
}

/// Checks every Cartan invariant and wraps the matrix.
pub fn validate_cartan(matrix: Vec<Vec<i64>>) -> Result<CartanData, CartanError> {
    let n = matrix.len();
    if n == 0 {
        return Err(CartanError::Empty);
    }
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(CartanError::NotSquare {
                row,
                len: r.len(),
                rank: n,
            });
        }
    }
    for (i, r) in matrix.iter().enumerate() {
        if r[i] != 2 {
            return Err(CartanError::BadDiagonal { index: i, value: r[i] });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a_ij, a_ji) = (matrix[i][j], matrix[j][i]);
            if (a_ij == 0) != (a_ji == 0) {
                return Err(CartanError::AsymmetricZero { i, j, a_ij, a_ji });
            }
            if !ADMISSIBLE_PAIRS.contains(&(a_ij, a_ji)) {
                return Err(CartanError::BadPair { i, j, a_ij, a_ji });
            }
        }
    }
    let data = CartanData { rank: n, matrix };
    rational_symmetrizer(&data).ok_or(CartanError::NotSymmetrizable)?;
    Ok(data)
}

/// Per-node rational weights `d` with `d_i A_ij = d_j A_ji`, normalized to 1
/// at the smallest node of each component. `None` if inconsistent.
fn rational_symmetrizer(c: &CartanData) -> Option<Vec<Ratio<i64>>> {
    let n = c.rank();
    let mut d: Vec<Option<Ratio<i64>>> = vec![None; n];
    for comp in c.components() {
        d[comp[0]] = Some(Ratio::from_integer(1));
        let mut queue = VecDeque::from([comp[0]]);
        while let Some(i) = queue.pop_front() {
            let di = d[i].expect("visited node has a weight");
            for j in 0..n {
                if !c.connected(i, j) {
                    continue;
                }
                let dj = di * Ratio::from_integer(c.entry(i, j)) / Ratio::from_integer(c.entry(j, i));
                match d[j] {
                    None => {
                        d[j] = Some(dj);
                        queue.push_back(j);
                    }
                    Some(existing) if existing != dj => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(d.into_iter().map(|x| x.expect("every node lies in a component")).collect())
}

/// Componentwise-minimal positive integers `d` with `d_i A_ij = d_j A_ji`.
pub fn symmetrize(c: &CartanData) -> Vec<i64> {
    let d = rational_symmetrizer(c).expect("validated Cartan data is symmetrizable");
    let mut out = vec![0i64; c.rank()];
    for comp in c.components() {
        let lcm = comp.iter().fold(1i64, |acc, &i| acc.lcm(d[i].denom()));
        let scaled: Vec<i64> = comp.iter().map(|&i| (d[i] * lcm).to_integer()).collect();
        let g = scaled.iter().fold(0i64, |acc, &x| acc.gcd(&x));
        for (&i, &x) in comp.iter().zip(&scaled) {
            out[i] = x / g;
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl TypeLabel {
    pub const ALL: [TypeLabel; 7] = [
        TypeLabel::A,
        TypeLabel::B,
        TypeLabel::C,
        TypeLabel::D,
        TypeLabel::E,
        TypeLabel::F,
        TypeLabel::G,
    ];

    pub fn supports(self, rank: usize) -> bool {
        match self {
            TypeLabel::A => rank >= 1,
            TypeLabel::B | TypeLabel::C => rank >= 2,
            TypeLabel::D => rank >= 3,
            TypeLabel::E => (6..=8).contains(&rank),
            TypeLabel::F => rank == 4,
            TypeLabel::G => rank == 2,
        }
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TypeLabel::A => "A",
            TypeLabel::B => "B",
            TypeLabel::C => "C",
            TypeLabel::D => "D",
            TypeLabel::E => "E",
            TypeLabel::F => "F",
            TypeLabel::G => "G",
        };
        f.write_str(s)
    }
}

impl FromStr for TypeLabel {
    type Err = DynkinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(TypeLabel::A),
            "B" => Ok(TypeLabel::B),
            "C" => Ok(TypeLabel::C),
            "D" => Ok(TypeLabel::D),
            "E" => Ok(TypeLabel::E),
            "F" => Ok(TypeLabel::F),
            "G" => Ok(TypeLabel::G),
            _ => Err(DynkinError::UnknownLabel(s.to_string())),
        }
    }
}

/// Parses `"F4"`, `"a2"`, `"E8"` and so on into a label and a rank.
pub fn parse_type(s: &str) -> Result<(TypeLabel, usize), DynkinError> {
    let s = s.trim();
    let mut chars = s.chars();
    let first = chars
        .next()
        .ok_or_else(|| DynkinError::UnknownLabel(s.to_string()))?;
    let label: TypeLabel = first.to_string().parse()?;
    let rank: usize = chars
        .as_str()
        .parse()
        .map_err(|_| DynkinError::UnknownLabel(s.to_string()))?;
    Ok((label, rank))
}

/// Standard Cartan matrix of a finite type.
pub fn builtin(label: TypeLabel, rank: usize) -> Result<CartanData, DynkinError> {
    if !label.supports(rank) {
        return Err(DynkinError::UnsupportedType { label, rank });
    }
    let n = rank;
    let mut m = vec![vec![0i64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut join = |i: usize, j: usize| {
        m[i][j] = -1;
        m[j][i] = -1;
    };
    match label {
        TypeLabel::A | TypeLabel::B | TypeLabel::C => {
            for i in 0..n - 1 {
                join(i, i + 1);
            }
        }
        TypeLabel::D => {
            for i in 0..n.saturating_sub(3) {
                join(i, i + 1);
            }
            join(n - 3, n - 2);
            join(n - 3, n - 1);
        }
        TypeLabel::E => {
            join(0, 2);
            join(1, 3);
            for i in 2..n - 1 {
                join(i, i + 1);
            }
        }
        TypeLabel::F => {
            join(0, 1);
            join(1, 2);
            join(2, 3);
        }
        TypeLabel::G => join(0, 1),
    }
    match label {
        TypeLabel::B => m[n - 2][n - 1] = -2,
        TypeLabel::C => m[n - 1][n - 2] = -2,
        TypeLabel::F => m[1][2] = -2,
        TypeLabel::G => m[1][0] = -3,
        _ => {}
    }
    Ok(CartanData { rank: n, matrix: m })
}

/// One connected component of a classified diagram. `nodes[k]` is the
/// 0-based global index of the component-local node `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    pub label: TypeLabel,
    pub rank: usize,
    pub nodes: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DynkinDiagram {
    pub components: Vec<Component>,
}

impl DynkinDiagram {
    /// `"A2 x A1"` style name.
    pub fn name(&self) -> String {
        self.components
            .iter()
            .map(|c| format!("{}{}", c.label, c.rank))
            .collect::<Vec<_>>()
            .join(" x ")
    }

    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }
}

// JSON form uses 1-based node indices.
#[derive(Serialize, Deserialize)]
struct ComponentJson {
    #[serde(rename = "type")]
    label: TypeLabel,
    rank: usize,
    nodes: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    components: Vec<ComponentJson>,
}

impl Serialize for DynkinDiagram {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        DiagramJson {
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    label: c.label,
                    rank: c.rank,
                    nodes: c.nodes.iter().map(|&i| i + 1).collect(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DynkinDiagram {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = DiagramJson::deserialize(deserializer)?;
        let mut components = Vec::with_capacity(raw.components.len());
        for c in raw.components {
            if c.nodes.contains(&0) {
                return Err(serde::de::Error::custom("node indices are 1-based"));
            }
            components.push(Component {
                label: c.label,
                rank: c.rank,
                nodes: c.nodes.into_iter().map(|i| i - 1).collect(),
            });
        }
        Ok(DynkinDiagram { components })
    }
}

/// Labels every connected component with its finite type.
///
/// Matching is done against the builtin templates. When several labelings
/// are possible (`A3`/`D3`, `B2`/`C2`, diagram automorphisms) the one that
/// keeps the given node order is preferred, then the lexicographically
/// smallest relabeling.
pub fn classify(c: &CartanData) -> Result<DynkinDiagram, DynkinError> {
    let mut components = Vec::new();
    for comp in c.components() {
        components.push(classify_component(c, &comp)?);
    }
    Ok(DynkinDiagram { components })
}

fn classify_component(c: &CartanData, comp: &[usize]) -> Result<Component, DynkinError> {
    let m = comp.len();
    let candidates: Vec<(TypeLabel, CartanData)> = TypeLabel::ALL
        .iter()
        .filter_map(|&label| builtin(label, m).ok().map(|t| (label, t)))
        .collect();

    for (label, t) in &candidates {
        let identity = (0..m).all(|a| (0..m).all(|b| c.entry(comp[a], comp[b]) == t.entry(a, b)));
        if identity {
            return Ok(Component {
                label: *label,
                rank: m,
                nodes: comp.to_vec(),
            });
        }
    }

    let sig_c = signatures(c, comp);
    let mut sorted_c = sig_c.clone();
    sorted_c.sort();
    for (label, t) in &candidates {
        let all: Vec<usize> = (0..m).collect();
        let sig_t = signatures(t, &all);
        let mut sorted_t = sig_t.clone();
        sorted_t.sort();
        if sorted_t != sorted_c {
            continue;
        }
        let mut assigned = Vec::with_capacity(m);
        let mut used = vec![false; m];
        if match_nodes(c, comp, &sig_c, t, &sig_t, &mut assigned, &mut used) {
            return Ok(Component {
                label: *label,
                rank: m,
                nodes: assigned.iter().map(|&k| comp[k]).collect(),
            });
        }
    }
    Err(DynkinError::UnclassifiableComponent {
        nodes: comp.to_vec(),
    })
}

/// Sorted list of (A_ij, A_ji) over neighbours, per node.
fn signatures(c: &CartanData, nodes: &[usize]) -> Vec<Vec<(i64, i64)>> {
    nodes
        .iter()
        .map(|&i| {
            let mut s: Vec<(i64, i64)> = nodes
                .iter()
                .filter(|&&j| c.connected(i, j))
                .map(|&j| (c.entry(i, j), c.entry(j, i)))
                .collect();
            s.sort();
            s
        })
        .collect()
}

/// Backtracking assignment of template nodes (in order) to component-local
/// positions, trying positions in increasing order.
fn match_nodes(
    c: &CartanData,
    comp: &[usize],
    sig_c: &[Vec<(i64, i64)>],
    t: &CartanData,
    sig_t: &[Vec<(i64, i64)>],
    assigned: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let k = assigned.len();
    if k == comp.len() {
        return true;
    }
    for p in 0..comp.len() {
        if used[p] || sig_c[p] != sig_t[k] {
            continue;
        }
        let g = comp[p];
        let consistent = assigned.iter().enumerate().all(|(kk, &pp)| {
            let gg = comp[pp];
            c.entry(g, gg) == t.entry(k, kk) && c.entry(gg, g) == t.entry(kk, k)
        });
        if !consistent {
            continue;
        }
        used[p] = true;
        assigned.push(p);
        if match_nodes(c, comp, sig_c, t, sig_t, assigned, used) {
            return true;
        }
        assigned.pop();
        used[p] = false;
    }
    false
}

/// Validation followed by classification; rejects anything that is not of
/// finite type.
pub fn finite_cartan(matrix: Vec<Vec<i64>>) -> Result<(CartanData, DynkinDiagram), FiniteTypeError> {
    let c = validate_cartan(matrix)?;
    let d = classify(&c)?;
    Ok((c, d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiniteTypeError {
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Dynkin(#[from] DynkinError),
}

/// Histogram of the component types, e.g. `{A: [2, 1]}`.
pub fn type_histogram(d: &DynkinDiagram) -> BTreeMap<TypeLabel, Vec<usize>> {
    let mut out: BTreeMap<TypeLabel, Vec<usize>> = BTreeMap::new();
    for c in &d.components {
        out.entry(c.label).or_default().push(c.rank);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_builtins(max_rank: usize) -> Vec<(TypeLabel, usize)> {
        let mut v = Vec::new();
        for label in TypeLabel::ALL {
            for rank in 1..=max_rank {
                if label.supports(rank) {
                    v.push((label, rank));
                }
            }
        }
        v
    }

    #[test]
    fn validate_examples() {
        assert!(validate_cartan(vec![vec![2, -1], vec![-1, 2]]).is_ok());
        assert_eq!(
            validate_cartan(vec![vec![2, -1], vec![-1, 3]]),
            Err(CartanError::BadDiagonal { index: 1, value: 3 })
        );
        assert!(matches!(
            validate_cartan(vec![vec![2, -2], vec![-2, 2]]),
            Err(CartanError::BadPair { .. })
        ));
        assert!(matches!(
            validate_cartan(vec![vec![2, 0], vec![-1, 2]]),
            Err(CartanError::AsymmetricZero { .. })
        ));
        assert!(matches!(
            validate_cartan(vec![vec![2, -1], vec![-1]]),
            Err(CartanError::NotSquare { .. })
        ));
        assert_eq!(validate_cartan(vec![]), Err(CartanError::Empty));
    }

    #[test]
    fn non_symmetrizable_cycle() {
        // Triangle whose double edges all point the same way round the cycle.
        let m = vec![vec![2, -1, -2], vec![-2, 2, -1], vec![-1, -2, 2]];
        assert_eq!(validate_cartan(m), Err(CartanError::NotSymmetrizable));
    }

    #[test]
    fn builtin_small() {
        assert_eq!(builtin(TypeLabel::A, 1).unwrap().matrix(), &[vec![2]]);
        assert_eq!(
            builtin(TypeLabel::A, 2).unwrap().matrix(),
            &[vec![2, -1], vec![-1, 2]]
        );
        let g2 = builtin(TypeLabel::G, 2).unwrap();
        assert_eq!((g2.entry(0, 1), g2.entry(1, 0)), (-1, -3));
        assert_eq!(
            builtin(TypeLabel::F, 4).unwrap().matrix(),
            &[
                vec![2, -1, 0, 0],
                vec![-1, 2, -2, 0],
                vec![0, -1, 2, -1],
                vec![0, 0, -1, 2]
            ]
        );
        assert!(matches!(
            builtin(TypeLabel::E, 5),
            Err(DynkinError::UnsupportedType { .. })
        ));
        assert!(builtin(TypeLabel::B, 1).is_err());
        assert!(builtin(TypeLabel::D, 2).is_err());
    }

    #[test]
    fn builtins_validate_and_round_trip() {
        for (label, rank) in all_builtins(9) {
            let c = builtin(label, rank).unwrap();
            let c = validate_cartan(c.matrix().to_vec()).unwrap();
            let d = classify(&c).unwrap();
            assert_eq!(d.components.len(), 1, "{label}{rank}");
            let comp = &d.components[0];
            assert_eq!((comp.label, comp.rank), (label, rank));
            assert_eq!(comp.nodes, (0..rank).collect::<Vec<_>>());
        }
    }

    #[test]
    fn determinants() {
        let det = |l, r| builtin(l, r).unwrap().determinant();
        assert_eq!(det(TypeLabel::A, 3), 4);
        assert_eq!(det(TypeLabel::B, 3), 2);
        assert_eq!(det(TypeLabel::D, 5), 4);
        assert_eq!(det(TypeLabel::E, 8), 1);
        assert_eq!(det(TypeLabel::F, 4), 1);
        assert_eq!(det(TypeLabel::G, 2), 1);
    }

    #[test]
    fn block_diagonal_components() {
        let c = builtin(TypeLabel::A, 2)
            .unwrap()
            .direct_sum(&builtin(TypeLabel::A, 1).unwrap());
        let d = classify(&c).unwrap();
        assert_eq!(d.name(), "A2 x A1");
        assert_eq!(d.components[1].nodes, vec![2]);
    }

    #[test]
    fn cycle_is_unclassifiable() {
        let m = vec![vec![2, -1, -1], vec![-1, 2, -1], vec![-1, -1, 2]];
        let c = validate_cartan(m).unwrap();
        assert!(matches!(
            classify(&c),
            Err(DynkinError::UnclassifiableComponent { .. })
        ));
    }

    #[test]
    fn affine_shapes_are_unclassifiable() {
        // Affine A1 would need the pair (-2,-2), so try affine D4 (star with
        // four arms) and a path with a double edge in the middle of five nodes.
        let mut star = vec![vec![0i64; 5]; 5];
        for (i, row) in star.iter_mut().enumerate() {
            row[i] = 2;
        }
        for leaf in 1..5 {
            star[0][leaf] = -1;
            star[leaf][0] = -1;
        }
        let c = validate_cartan(star).unwrap();
        assert!(classify(&c).is_err());

        let mut path = builtin(TypeLabel::A, 5).unwrap().matrix().to_vec();
        path[2][3] = -2;
        let c = validate_cartan(path).unwrap();
        assert!(classify(&c).is_err());
    }

    #[test]
    fn permuted_f4_recovers_standard_order() {
        let f4 = builtin(TypeLabel::F, 4).unwrap();
        let perm = [3, 1, 0, 2];
        let shuffled = f4.permuted(&perm);
        let d = classify(&shuffled).unwrap();
        let comp = &d.components[0];
        assert_eq!(comp.label, TypeLabel::F);
        // Local node k of the standard diagram sits at the shuffled position
        // holding original node k.
        for (k, &g) in comp.nodes.iter().enumerate() {
            assert_eq!(perm[g], k);
        }
    }

    #[test]
    fn symmetrizer_examples() {
        assert_eq!(symmetrize(&builtin(TypeLabel::A, 2).unwrap()), vec![1, 1]);
        assert_eq!(symmetrize(&builtin(TypeLabel::G, 2).unwrap()), vec![3, 1]);
        let a1a1 = builtin(TypeLabel::A, 1)
            .unwrap()
            .direct_sum(&builtin(TypeLabel::A, 1).unwrap());
        assert_eq!(symmetrize(&a1a1), vec![1, 1]);
        assert_eq!(symmetrize(&builtin(TypeLabel::B, 3).unwrap()), vec![1, 1, 2]);
        assert_eq!(symmetrize(&builtin(TypeLabel::F, 4).unwrap()), vec![1, 1, 2, 2]);
    }

    #[test]
    fn symmetrizer_identity_all_types() {
        for (label, rank) in all_builtins(8) {
            let c = builtin(label, rank).unwrap();
            let d = symmetrize(&c);
            for i in 0..rank {
                assert!(d[i] > 0);
                for j in 0..rank {
                    assert_eq!(d[i] * c.entry(i, j), d[j] * c.entry(j, i));
                }
            }
            assert_eq!(d.iter().fold(0i64, |g, &x| g.gcd(&x)), 1);
        }
    }

    #[test]
    fn json_round_trip() {
        let c = builtin(TypeLabel::F, 4).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.starts_with("{\"rank\":4,"));
        let back: CartanData = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let bad: Result<CartanData, _> = serde_json::from_str(r#"{"rank":2,"matrix":[[2,-2],[-2,2]]}"#);
        assert!(bad.is_err());
        let d = classify(&c).unwrap();
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"components":[{"type":"F","rank":4,"nodes":[1,2,3,4]}]}"#
        );
    }

    #[test]
    fn parse_type_names() {
        assert_eq!(parse_type("F4").unwrap(), (TypeLabel::F, 4));
        assert_eq!(parse_type("a12").unwrap(), (TypeLabel::A, 12));
        assert!(parse_type("X3").is_err());
        assert!(parse_type("B").is_err());
    }
}
