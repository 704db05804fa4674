//! Coxeter groups through an integral geometric representation.
//!
//! A Coxeter matrix with entries in {2, 3, 4, 6, inf} is realized by a
//! generalized Cartan matrix, so every group element is an integer matrix
//! acting on the root lattice and `l(ws) > l(w)` iff `w(alpha_s) > 0`.

use std::collections::{HashSet, VecDeque};

use thiserror::Error;

/// Coxeter matrix entry for an infinite bond.
pub const INF: u32 = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("invalid Coxeter matrix: {0}")]
    Invalid(String),
    #[error("m = {0} has no integral realization")]
    NotCrystallographic(u32),
    #[error("generator index {0} out of range")]
    Generator(usize),
}

/// A group element, stored as its matrix on the root lattice (row-major).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoxElem(Vec<i64>);

#[derive(Debug, Clone)]
pub struct CoxeterSystem {
    n: usize,
    m: Vec<Vec<u32>>,
    gens: Vec<CoxElem>,
}

impl CoxeterSystem {
    /// `m[i][j]` with `m[i][i] = 1` and [`INF`] for infinity.
    pub fn new(m: Vec<Vec<u32>>) -> Result<Self, CoxeterError> {
        let n = m.len();
        let mut a = vec![vec![0i64; n]; n];
        for i in 0..n {
            if m[i].len() != n {
                return Err(CoxeterError::Invalid("not square".into()));
            }
            a[i][i] = 2;
            if m[i][i] != 1 {
                return Err(CoxeterError::Invalid(format!("m[{i}][{i}] != 1")));
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                if m[i][j] != m[j][i] {
                    return Err(CoxeterError::Invalid("not symmetric".into()));
                }
                let (x, y) = match m[i][j] {
                    2 => (0, 0),
                    3 => (-1, -1),
                    4 => (-1, -2),
                    6 => (-1, -3),
                    INF => (-2, -2),
                    other if other < 2 => {
                        return Err(CoxeterError::Invalid(format!("m[{i}][{j}] = {other}")))
                    }
                    other => return Err(CoxeterError::NotCrystallographic(other)),
                };
                if i < j {
                    a[i][j] = x;
                    a[j][i] = y;
                }
            }
        }
        let gens = (0..n)
            .map(|i| {
                let mut s = vec![0i64; n * n];
                for k in 0..n {
                    s[k * n + k] = 1;
                }
                for j in 0..n {
                    s[i * n + j] -= a[i][j];
                }
                CoxElem(s)
            })
            .collect();
        Ok(Self { n, m, gens })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn coxeter_matrix(&self) -> &[Vec<u32>] {
        &self.m
    }

    pub fn identity(&self) -> CoxElem {
        let mut v = vec![0i64; self.n * self.n];
        for k in 0..self.n {
            v[k * self.n + k] = 1;
        }
        CoxElem(v)
    }

    pub fn generator(&self, s: usize) -> &CoxElem {
        &self.gens[s]
    }

    pub fn mul(&self, a: &CoxElem, b: &CoxElem) -> CoxElem {
        let n = self.n;
        let mut c = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let x = a.0[i * n + k];
                if x != 0 {
                    for j in 0..n {
                        c[i * n + j] += x * b.0[k * n + j];
                    }
                }
            }
        }
        CoxElem(c)
    }

    pub fn from_word(&self, word: &[usize]) -> CoxElem {
        word.iter()
            .fold(self.identity(), |w, &s| self.mul(&w, &self.gens[s]))
    }

    fn column_positive(&self, w: &CoxElem, s: usize) -> bool {
        let n = self.n;
        (0..n).all(|i| w.0[i * n + s] >= 0)
    }

    /// `l(ws) < l(w)`.
    pub fn is_right_descent(&self, w: &CoxElem, s: usize) -> bool {
        !self.column_positive(w, s)
    }

    /// `l(sw) < l(w)`.
    pub fn is_left_descent(&self, w: &CoxElem, s: usize) -> bool {
        self.is_right_descent(&self.inverse(w), s)
    }

    pub fn inverse(&self, w: &CoxElem) -> CoxElem {
        let word = self.reduced_word(w);
        let rev: Vec<usize> = word.into_iter().rev().collect();
        self.from_word(&rev)
    }

    /// Reduced word read from the right: repeatedly strip a right descent.
    fn reduced_word_right(&self, w: &CoxElem) -> Vec<usize> {
        let mut w = w.clone();
        let mut out = Vec::new();
        while let Some(s) = (0..self.n).find(|&s| self.is_right_descent(&w, s)) {
            w = self.mul(&w, &self.gens[s]);
            out.push(s);
        }
        out.reverse();
        out
    }

    /// Lexicographically smallest reduced word.
    pub fn reduced_word(&self, w: &CoxElem) -> Vec<usize> {
        // Left descents of w are right descents of w^{-1}; build w^{-1} once.
        let rw = self.reduced_word_right(w);
        let rev: Vec<usize> = rw.iter().rev().copied().collect();
        let mut inv = self.from_word(&rev);
        let mut out = Vec::with_capacity(rw.len());
        while let Some(s) = (0..self.n).find(|&s| self.is_right_descent(&inv, s)) {
            inv = self.mul(&inv, &self.gens[s]);
            out.push(s);
        }
        out
    }

    pub fn length(&self, w: &CoxElem) -> usize {
        self.reduced_word_right(w).len()
    }

    pub fn is_identity(&self, w: &CoxElem) -> bool {
        *w == self.identity()
    }

    /// Order of `w`, or `None` if it exceeds `bound`.
    pub fn order(&self, w: &CoxElem, bound: u32) -> Option<u32> {
        let mut p = w.clone();
        for k in 1..=bound {
            if self.is_identity(&p) {
                return Some(k);
            }
            p = self.mul(&p, w);
        }
        None
    }

    /// Whether the standard parabolic subgroup on `subset` is finite.
    pub fn parabolic_is_finite(&self, subset: &[usize]) -> bool {
        self.longest_element(subset).is_some()
    }

    /// Longest element of `W_subset`, or `None` if the subgroup is infinite.
    pub fn longest_element(&self, subset: &[usize]) -> Option<CoxElem> {
        // A finite parabolic of rank <= 9 has at most 120 positive roots (E_8).
        let cap = 200;
        let mut w = self.identity();
        let mut len = 0;
        while let Some(&s) = subset.iter().find(|&&s| !self.is_right_descent(&w, s)) {
            w = self.mul(&w, &self.gens[s]);
            len += 1;
            if len > cap {
                return None;
            }
        }
        Some(w)
    }

    /// All elements of length at most `max_len`, grouped by length.
    pub fn elements_by_length(&self, subset: &[usize], max_len: usize) -> Vec<Vec<CoxElem>> {
        let mut layers = vec![vec![self.identity()]];
        let mut seen: HashSet<CoxElem> = HashSet::new();
        seen.insert(self.identity());
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in layers.last().unwrap() {
                for &s in subset {
                    if !self.is_right_descent(w, s) {
                        let ws = self.mul(w, &self.gens[s]);
                        if seen.insert(ws.clone()) {
                            next.push(ws);
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            layers.push(next);
        }
        layers
    }

    /// Size of a finite parabolic subgroup, by breadth-first enumeration.
    pub fn parabolic_order(&self, subset: &[usize]) -> Option<usize> {
        self.longest_element(subset)?;
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([self.identity()]);
        seen.insert(self.identity());
        while let Some(w) = queue.pop_front() {
            for &s in subset {
                let ws = self.mul(&w, &self.gens[s]);
                if seen.insert(ws.clone()) {
                    queue.push_back(ws);
                }
            }
        }
        Some(seen.len())
    }

    /// Image of `w` under the automorphism permuting generators by `perm`.
    pub fn permute(&self, w: &CoxElem, perm: &[usize]) -> CoxElem {
        let word: Vec<usize> = self.reduced_word(w).iter().map(|&s| perm[s]).collect();
        self.from_word(&word)
    }
}

/// Coxeter matrix entry from a bond count: 0, 1, 2, 3, 4 bonds give 2, 3, 4, 6, inf.
pub fn m_from_bonds(bonds: u8) -> u32 {
    match bonds {
        0 => 2,
        1 => 3,
        2 => 4,
        3 => 6,
        _ => INF,
    }
}

/// Bond count from a Coxeter matrix entry.
pub fn bonds_from_m(m: u32) -> Option<u8> {
    match m {
        2 => Some(0),
        3 => Some(1),
        4 => Some(2),
        6 => Some(3),
        INF => Some(4),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(ms: &[u32]) -> CoxeterSystem {
        let n = ms.len() + 1;
        let mut m = vec![vec![2u32; n]; n];
        for i in 0..n {
            m[i][i] = 1;
        }
        for (i, &x) in ms.iter().enumerate() {
            m[i][i + 1] = x;
            m[i + 1][i] = x;
        }
        CoxeterSystem::new(m).unwrap()
    }

    #[test]
    fn finite_orders() {
        assert_eq!(chain(&[3, 3]).parabolic_order(&[0, 1, 2]), Some(24));
        assert_eq!(chain(&[3, 4]).parabolic_order(&[0, 1, 2]), Some(48));
        assert_eq!(chain(&[6]).parabolic_order(&[0, 1]), Some(12));
        assert_eq!(chain(&[3, 4, 3]).parabolic_order(&[0, 1, 2, 3]), Some(1152));
    }

    #[test]
    fn affine_is_infinite() {
        let w = chain(&[INF]);
        assert!(!w.parabolic_is_finite(&[0, 1]));
        let st = w.mul(w.generator(0), w.generator(1));
        assert_eq!(w.order(&st, 50), None);
        let layers = w.elements_by_length(&[0, 1], 6);
        assert!(layers.iter().skip(1).all(|l| l.len() == 2));
    }

    #[test]
    fn braid_relation_orders() {
        for &(m, o) in &[(2u32, 2u32), (3, 3), (4, 4), (6, 6)] {
            let w = chain(&[m]);
            let st = w.mul(w.generator(0), w.generator(1));
            assert_eq!(w.order(&st, 20), Some(o));
        }
    }

    #[test]
    fn reduced_words_are_lex_minimal() {
        let w = chain(&[3, 3]);
        let x = w.from_word(&[2, 1, 0, 2]);
        // 2102 = 2120 = 1210
        let rw = w.reduced_word(&x);
        assert_eq!(rw, vec![1, 2, 1, 0]);
        assert_eq!(w.from_word(&rw), x);
        assert_eq!(w.length(&x), 4);
        let longest = w.longest_element(&[0, 1, 2]).unwrap();
        assert_eq!(w.length(&longest), 6);
    }

    #[test]
    fn inverse_roundtrip() {
        let w = chain(&[4, 3]);
        let x = w.from_word(&[0, 1, 2, 1, 0]);
        assert!(w.is_identity(&w.mul(&x, &w.inverse(&x))));
    }

    #[test]
    fn rejects_non_crystallographic() {
        let m = vec![vec![1, 5], vec![5, 1]];
        assert!(matches!(
            CoxeterSystem::new(m),
            Err(CoxeterError::NotCrystallographic(5))
        ));
    }
}
