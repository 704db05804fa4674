//! Based root data of finite type, pinned diagram automorphisms, and the
//! lattice quotients behind the Kottwitz group.
//!
//! Cocharacter lattices are sublattices of the coweight lattice `P^v`, written
//! in the basis of fundamental coweights. The coroot lattice `Q^v` is spanned
//! by the rows of the Cartan matrix in that basis.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootDataError {
    #[error("unknown finite type {0}")]
    UnknownType(String),
    #[error("Cartan matrix check failed: {0}")]
    Cartan(String),
    #[error("automorphism {0:?} is not a diagram automorphism")]
    NotDiagramAutomorphism(Vec<usize>),
    #[error("action does not preserve the cocharacter lattice")]
    LatticeNotStable,
    #[error("lattice does not contain the coroot lattice")]
    MissingCoroots,
    #[error("quotient has a free part of rank {0}")]
    FreePart(usize),
    #[error("integer overflow in lattice computation")]
    Overflow,
}

/// Cartan–Killing family letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// Irreducible finite root system type, e.g. `C_3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FiniteType {
    pub family: Family,
    pub rank: usize,
}

impl FiniteType {
    pub fn new(family: Family, rank: usize) -> Result<Self, RootDataError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 1,
            Family::D => rank >= 3,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(Self { family, rank })
        } else {
            Err(RootDataError::UnknownType(format!("{family:?}_{rank}")))
        }
    }

    pub fn a(n: usize) -> Self {
        Self::new(Family::A, n).unwrap()
    }
    pub fn b(n: usize) -> Self {
        Self::new(Family::B, n).unwrap()
    }
    pub fn c(n: usize) -> Self {
        Self::new(Family::C, n).unwrap()
    }
    pub fn d(n: usize) -> Self {
        Self::new(Family::D, n).unwrap()
    }
    pub fn e(n: usize) -> Self {
        Self::new(Family::E, n).unwrap()
    }
    pub fn f4() -> Self {
        Self::new(Family::F, 4).unwrap()
    }
    pub fn g2() -> Self {
        Self::new(Family::G, 2).unwrap()
    }

    /// Same type after identifying `B_n` with `C_n` (arrow directions ignored).
    pub fn up_to_arrows(&self) -> (Family, usize) {
        match self.family {
            Family::C => (Family::B, self.rank),
            f => (f, self.rank),
        }
    }

    /// Degrees of the basic invariants.
    pub fn degrees(&self) -> Vec<u32> {
        let n = self.rank as u32;
        match self.family {
            Family::A => (2..=n + 1).collect(),
            Family::B | Family::C => (1..=n).map(|i| 2 * i).collect(),
            Family::D => {
                let mut v: Vec<u32> = (1..n).map(|i| 2 * i).collect();
                v.push(n);
                v.sort_unstable();
                v
            }
            Family::E => match n {
                6 => vec![2, 5, 6, 8, 9, 12],
                7 => vec![2, 6, 8, 10, 12, 14, 18],
                _ => vec![2, 8, 12, 14, 18, 20, 24, 30],
            },
            Family::F => vec![2, 6, 8, 12],
            Family::G => vec![2, 6],
        }
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.degrees().into_iter().map(|d| d - 1).collect()
    }

    pub fn num_positive_roots(&self) -> u64 {
        self.exponents().iter().map(|&e| e as u64).sum()
    }

    pub fn dim(&self) -> u64 {
        2 * self.num_positive_roots() + self.rank as u64
    }

    /// Squared root lengths of the simple roots (Bourbaki numbering, 0-based).
    pub fn lengths(&self) -> Vec<i64> {
        let n = self.rank;
        match self.family {
            Family::A | Family::D | Family::E => vec![2; n],
            Family::B => (0..n).map(|i| if i + 1 == n { 1 } else { 2 }).collect(),
            Family::C => (0..n).map(|i| if i + 1 == n { 2 } else { 1 }).collect(),
            Family::F => vec![2, 2, 1, 1],
            Family::G => vec![1, 3],
        }
    }

    /// Edges `(i, j, bonds)` of the Dynkin diagram.
    pub fn edges(&self) -> Vec<(usize, usize, u8)> {
        let n = self.rank;
        match self.family {
            Family::A => (0..n - 1).map(|i| (i, i + 1, 1)).collect(),
            Family::B | Family::C => (0..n - 1)
                .map(|i| (i, i + 1, if i + 2 == n { 2 } else { 1 }))
                .collect(),
            Family::D => {
                let mut v: Vec<_> = (0..n - 2).map(|i| (i, i + 1, 1)).collect();
                v.push((n - 3, n - 1, 1));
                v
            }
            Family::E => {
                let mut v = vec![(0, 2, 1), (1, 3, 1)];
                v.extend((2..n - 1).map(|i| (i, i + 1, 1)));
                v
            }
            Family::F => vec![(0, 1, 1), (1, 2, 2), (2, 3, 1)],
            Family::G => vec![(0, 1, 3)],
        }
    }

    /// Cartan matrix `a_ij = <alpha_i^v, alpha_j> = 2(alpha_i, alpha_j)/(alpha_i, alpha_i)`.
    pub fn cartan(&self) -> Vec<Vec<i64>> {
        cartan_from_gram(&self.gram())
    }

    /// Gram matrix of the simple roots, scaled so that it is integral after doubling.
    /// Entries are stored doubled to stay integral.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        gram_doubled(self.rank, &self.lengths(), &self.edges())
    }

    /// The nontrivial pinned automorphism of the given order, if any.
    pub fn diagram_automorphism(&self, order: usize) -> Option<Vec<usize>> {
        let n = self.rank;
        match (self.family, order) {
            (_, 1) => Some((0..n).collect()),
            (Family::A, 2) if n >= 2 => Some((0..n).map(|i| n - 1 - i).collect()),
            (Family::D, 2) => {
                let mut p: Vec<usize> = (0..n).collect();
                p.swap(n - 2, n - 1);
                Some(p)
            }
            (Family::D, 3) if n == 4 => Some(vec![2, 1, 3, 0]),
            (Family::E, 2) if n == 6 => Some(vec![5, 1, 4, 3, 2, 0]),
            _ => None,
        }
    }

    pub fn label(&self) -> String {
        format!("{:?}_{}", self.family, self.rank)
    }
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Doubled Gram matrix from squared lengths and bonds; `2(a_i, a_j)`.
pub fn gram_doubled(n: usize, lengths: &[i64], edges: &[(usize, usize, u8)]) -> Vec<Vec<i64>> {
    let mut g = vec![vec![0i64; n]; n];
    for i in 0..n {
        g[i][i] = 2 * lengths[i];
    }
    for &(i, j, b) in edges {
        // (a_i, a_j) = -(b/2) * shorter squared length
        let v = -(b as i64) * lengths[i].min(lengths[j]);
        g[i][j] = v;
        g[j][i] = v;
    }
    g
}

pub fn cartan_from_gram(g: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = g.len();
    let mut c = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            debug_assert_eq!((2 * g[i][j]) % g[i][i], 0);
            c[i][j] = 2 * g[i][j] / g[i][i];
        }
    }
    c
}

/// A finite abelian group `Z^free x (+) Z/d_i` with `d_1 | d_2 | ...`, all `d_i > 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    pub invariant_factors: Vec<u64>,
    #[serde(default)]
    pub free_rank: usize,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self {
            invariant_factors: Vec::new(),
            free_rank: 0,
        }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::from_orders(&[n])
    }

    /// Canonical form of `(+) Z/o_i` for arbitrary positive orders.
    pub fn from_orders(orders: &[u64]) -> Self {
        // Primary decomposition, then recombine largest powers.
        let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        for &o in orders {
            assert!(o > 0, "orders must be positive");
            for (p, e) in factorize(o) {
                by_prime.entry(p).or_default().push(p.pow(e));
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for powers in by_prime.values_mut() {
            powers.sort_unstable_by(|a, b| b.cmp(a));
            for (i, pk) in powers.iter().enumerate() {
                factors[i] *= pk;
            }
        }
        factors.reverse();
        factors.retain(|&d| d > 1);
        Self {
            invariant_factors: factors,
            free_rank: 0,
        }
    }

    pub fn order(&self) -> u64 {
        assert_eq!(self.free_rank, 0, "infinite group has no order");
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    /// Number of elements killed by `k`.
    pub fn torsion_count(&self, k: u64) -> u64 {
        self.invariant_factors
            .iter()
            .map(|&d| num_integer::gcd(d, k))
            .product()
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" x "))
        }
    }
}

pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Group structure of a finite abelian group given by the orders of its
/// elements' torsion counts: `count(k) = |{x : kx = 0}|` for `k | exponent`.
pub fn structure_from_torsion_counts(order: u64, count: impl Fn(u64) -> u64) -> FiniteAbelianGroup {
    let mut orders = Vec::new();
    for (p, e) in factorize(order) {
        // r_j = number of cyclic p-factors of order >= p^j
        let mut prev = 1u64;
        let mut ranks = Vec::new();
        for j in 1..=e {
            let c = count(p.pow(j));
            let r = (c / prev).ilog(p);
            ranks.push(r);
            prev = c;
        }
        for j in 0..ranks.len() {
            let here = ranks[j] - ranks.get(j + 1).copied().unwrap_or(0);
            for _ in 0..here {
                orders.push(p.pow(j as u32 + 1));
            }
        }
    }
    FiniteAbelianGroup::from_orders(&orders)
}

pub type Mat = Vec<Vec<i64>>;

fn identity(k: usize) -> Mat {
    (0..k)
        .map(|i| (0..k).map(|j| i64::from(i == j)).collect())
        .collect()
}

pub fn mat_vec(m: &Mat, v: &[i64]) -> Vec<i64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    let k = b.len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

/// Permutation matrix sending basis vector `e_i` to `e_{p(i)}`.
pub fn perm_matrix(p: &[usize]) -> Mat {
    let n = p.len();
    let mut m = vec![vec![0; n]; n];
    for (i, &pi) in p.iter().enumerate() {
        m[pi][i] = 1;
    }
    m
}

/// Quotient `Z^k / R` diagonalized by row and column operations.
///
/// With `U R V = D`, the class of `x` has coordinates `(U x)_i mod D_ii`.
#[derive(Debug, Clone)]
pub struct LatticeQuotient {
    k: usize,
    diag: Vec<i64>,
    u: Mat,
    uinv: Mat,
}

impl LatticeQuotient {
    /// `relations` are vectors of length `k`.
    pub fn new(k: usize, relations: &[Vec<i64>]) -> Self {
        let m = relations.len();
        // a[i][j] = relation j, coordinate i
        let mut a: Vec<Vec<i64>> = (0..k)
            .map(|i| relations.iter().map(|r| r[i]).collect())
            .collect();
        let mut u = identity(k);
        let mut uinv = identity(k);
        let mut t = 0;
        while t < k.min(m) {
            // pivot: smallest nonzero absolute value in the remaining block
            let mut best: Option<(usize, usize)> = None;
            for i in t..k {
                for j in t..m {
                    if a[i][j] != 0
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in uinv.iter_mut() {
                row.swap(t, pi);
            }
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            loop {
                let p = a[t][t];
                let mut dirty = false;
                for i in t + 1..k {
                    let q = a[i][t].div_euclid(p);
                    if q != 0 {
                        for j in 0..m {
                            a[i][j] -= q * a[t][j];
                        }
                        for j in 0..k {
                            u[i][j] -= q * u[t][j];
                        }
                        for row in uinv.iter_mut() {
                            row[t] += q * row[i];
                        }
                    }
                    if a[i][t] != 0 {
                        dirty = true;
                    }
                }
                for j in t + 1..m {
                    let q = a[t][j].div_euclid(p);
                    if q != 0 {
                        for row in a.iter_mut() {
                            row[j] -= q * row[t];
                        }
                    }
                    if a[t][j] != 0 {
                        dirty = true;
                    }
                }
                if !dirty {
                    break;
                }
                // move the smallest remaining entry of row/column t to the pivot
                let mut best = (t, t);
                for i in t..k {
                    if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t..m {
                    if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap(t, best.0);
                    u.swap(t, best.0);
                    for row in uinv.iter_mut() {
                        row.swap(t, best.0);
                    }
                }
                if best.1 != t {
                    for row in a.iter_mut() {
                        row.swap(t, best.1);
                    }
                }
            }
            t += 1;
        }
        let diag = (0..k)
            .map(|i| if i < m { a[i][i].abs() } else { 0 })
            .collect();
        Self { k, diag, u, uinv }
    }

    pub fn ambient_rank(&self) -> usize {
        self.k
    }

    fn nontrivial(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.k).filter(|&i| self.diag[i] != 1)
    }

    /// Orders of the coordinate components (0 means infinite).
    pub fn component_orders(&self) -> Vec<i64> {
        self.nontrivial().map(|i| self.diag[i]).collect()
    }

    pub fn group(&self) -> FiniteAbelianGroup {
        let free = self.nontrivial().filter(|&i| self.diag[i] == 0).count();
        let orders: Vec<u64> = self
            .nontrivial()
            .filter(|&i| self.diag[i] != 0)
            .map(|i| self.diag[i] as u64)
            .collect();
        let mut g = FiniteAbelianGroup::from_orders(&orders);
        g.free_rank = free;
        g
    }

    pub fn coords(&self, x: &[i64]) -> Vec<i64> {
        let y = mat_vec(&self.u, x);
        self.nontrivial()
            .map(|i| {
                if self.diag[i] == 0 {
                    y[i]
                } else {
                    y[i].rem_euclid(self.diag[i])
                }
            })
            .collect()
    }

    pub fn lift(&self, c: &[i64]) -> Vec<i64> {
        let mut e = vec![0i64; self.k];
        for (slot, i) in self.nontrivial().enumerate() {
            e[i] = c[slot];
        }
        mat_vec(&self.uinv, &e)
    }

    /// All elements, in lexicographic coordinate order.
    pub fn elements(&self) -> Result<Vec<Vec<i64>>, RootDataError> {
        let orders = self.component_orders();
        let free = orders.iter().filter(|&&d| d == 0).count();
        if free > 0 {
            return Err(RootDataError::FreePart(free));
        }
        let mut out = vec![Vec::new()];
        for &d in &orders {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..d).map(move |c| {
                        let mut v = prefix.clone();
                        v.push(c);
                        v
                    })
                })
                .collect();
        }
        Ok(out)
    }

    pub fn is_zero(&self, x: &[i64]) -> bool {
        self.coords(x).iter().all(|&c| c == 0)
    }
}

/// Rational solve of `sum_k y_k b_k = v` for a basis given as rows.
///
/// Machine-width rationals: entries are small and the rank is at most a few
/// dozen, so `i128` overflow (a panic, not wraparound) does not occur.
fn solve_in_basis(basis: &[Vec<i64>], v: &[i64]) -> Option<Vec<i64>> {
    type Q = num_rational::Ratio<i128>;
    let r = basis.len();
    // columns of the system are basis vectors
    let n = v.len();
    let mut m: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = (0..r).map(|k| Q::from_integer(basis[k][i] as i128)).collect();
            row.push(Q::from_integer(v[i] as i128));
            row
        })
        .collect();
    let mut piv_cols = Vec::new();
    let mut row = 0;
    for col in 0..r {
        let Some(p) = (row..n).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= inv;
        }
        for i in 0..n {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col];
                for j in 0..=r {
                    let t = f * m[row][j];
                    m[i][j] -= t;
                }
            }
        }
        piv_cols.push(col);
        row += 1;
    }
    if (row..n).any(|i| !m[i][r].is_zero()) {
        return None;
    }
    let mut y = vec![0i64; r];
    for (i, &c) in piv_cols.iter().enumerate() {
        let val = m[i][r];
        if !val.is_integer() {
            return None;
        }
        y[c] = i64::try_from(val.to_integer()).ok()?;
    }
    Some(y)
}

/// A basis (as rows) of the lattice spanned by `gens` in `Z^n`.
pub fn lattice_basis(gens: &[Vec<i64>], n: usize) -> Vec<Vec<i64>> {
    let mut rows: Vec<Vec<i64>> = gens.to_vec();
    let mut basis = Vec::new();
    for col in 0..n {
        loop {
            let nz: Vec<usize> = (0..rows.len()).filter(|&i| rows[i][col] != 0).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&i| rows[i][col].abs()).unwrap();
            for &i in &nz {
                if i != p {
                    let q = rows[i][col].div_euclid(rows[p][col]);
                    for j in 0..n {
                        rows[i][j] -= q * rows[p][j];
                    }
                }
            }
        }
        if let Some(p) = (0..rows.len()).find(|&i| rows[i][col] != 0) {
            let mut r = rows.remove(p);
            if r[col] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            basis.push(r);
        }
        rows.retain(|r| r.iter().any(|&x| x != 0));
    }
    basis
}

/// Diagram automorphisms of the Dynkin diagram, as permutations of simple roots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisAction {
    pub inertia_gens: Vec<Vec<usize>>,
    pub frobenius: Vec<usize>,
}

impl GaloisAction {
    pub fn trivial(rank: usize) -> Self {
        Self {
            inertia_gens: Vec::new(),
            frobenius: (0..rank).collect(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        let id = |p: &Vec<usize>| p.iter().enumerate().all(|(i, &x)| i == x);
        self.inertia_gens.iter().all(id) && id(&self.frobenius)
    }
}

/// A based root datum: finite type plus cocharacter lattice `P^v >= X_* >= Q^v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasedRootDatum {
    pub finite_type: FiniteType,
    /// Isogeny tag, e.g. `sc`, `ad`, `d=2`, `SO`.
    pub isogeny: String,
    /// Generators of `X_*` beyond `Q^v`, in fundamental-coweight coordinates.
    pub extra_cocharacters: Vec<Vec<i64>>,
}

impl BasedRootDatum {
    pub fn simply_connected(t: FiniteType) -> Self {
        Self {
            finite_type: t,
            isogeny: "sc".into(),
            extra_cocharacters: Vec::new(),
        }
    }

    pub fn adjoint(t: FiniteType) -> Self {
        let n = t.rank;
        Self {
            finite_type: t,
            isogeny: "ad".into(),
            extra_cocharacters: (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect(),
        }
    }

    pub fn with_extra(t: FiniteType, tag: &str, extra: Vec<Vec<i64>>) -> Self {
        Self {
            finite_type: t,
            isogeny: tag.into(),
            extra_cocharacters: extra,
        }
    }

    pub fn rank(&self) -> usize {
        self.finite_type.rank
    }

    pub fn cartan(&self) -> Mat {
        self.finite_type.cartan()
    }

    /// Simple coroots in fundamental-coweight coordinates: row `j` of the Cartan matrix.
    pub fn coroots_in_coweights(&self) -> Vec<Vec<i64>> {
        self.cartan()
    }

    /// Basis (rows) of `X_*` in fundamental-coweight coordinates.
    pub fn cocharacter_basis(&self) -> Vec<Vec<i64>> {
        let mut gens = self.coroots_in_coweights();
        gens.extend(self.extra_cocharacters.iter().cloned());
        lattice_basis(&gens, self.rank())
    }

    /// Simple coroots written in the cocharacter basis.
    pub fn simple_coroots(&self) -> Result<Vec<Vec<i64>>, RootDataError> {
        let b = self.cocharacter_basis();
        self.coroots_in_coweights()
            .iter()
            .map(|c| solve_in_basis(&b, c).ok_or(RootDataError::MissingCoroots))
            .collect()
    }

    /// Simple roots in the dual basis of `X^*`: `alpha_i(b_k)` is the `i`-th coordinate of `b_k`.
    pub fn simple_roots(&self) -> Vec<Vec<i64>> {
        let b = self.cocharacter_basis();
        (0..self.rank())
            .map(|i| b.iter().map(|bk| bk[i]).collect())
            .collect()
    }

    /// Checks the pairing against the Cartan matrix and positive definiteness.
    pub fn validate(&self) -> Result<(), RootDataError> {
        let c = self.cartan();
        let roots = self.simple_roots();
        let coroots = self.simple_coroots()?;
        let n = self.rank();
        for i in 0..n {
            for j in 0..n {
                let pairing: i64 = roots[i].iter().zip(&coroots[j]).map(|(a, b)| a * b).sum();
                if pairing != c[j][i] {
                    return Err(RootDataError::Cartan(format!(
                        "<alpha_{i}, alpha_{j}^v> = {pairing}, expected {}",
                        c[j][i]
                    )));
                }
            }
        }
        if !positive_definite(&self.finite_type.gram()) {
            return Err(RootDataError::Cartan("not of finite type".into()));
        }
        Ok(())
    }

    /// Matrix of a diagram automorphism on `X_*`, in the cocharacter basis.
    pub fn action_matrix(&self, p: &[usize]) -> Result<Mat, RootDataError> {
        check_diagram_automorphism(&self.finite_type, p)?;
        let b = self.cocharacter_basis();
        let mut cols = Vec::new();
        for bk in &b {
            let mut img = vec![0i64; self.rank()];
            for (i, &x) in bk.iter().enumerate() {
                img[p[i]] += x;
            }
            cols.push(solve_in_basis(&b, &img).ok_or(RootDataError::LatticeNotStable)?);
        }
        let n = b.len();
        Ok((0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect())
    }
}

pub fn check_diagram_automorphism(t: &FiniteType, p: &[usize]) -> Result<(), RootDataError> {
    let c = t.cartan();
    let n = t.rank;
    let bad = || RootDataError::NotDiagramAutomorphism(p.to_vec());
    if p.len() != n || p.iter().collect::<BTreeSet<_>>().len() != n || p.iter().any(|&x| x >= n)
    {
        return Err(bad());
    }
    for i in 0..n {
        for j in 0..n {
            if c[p[i]][p[j]] != c[i][j] {
                return Err(bad());
            }
        }
    }
    Ok(())
}

fn positive_definite(g: &[Vec<i64>]) -> bool {
    let n = g.len();
    let mut m: Vec<Vec<BigRational>> = g
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    for k in 0..n {
        if !m[k][k].is_positive() {
            return false;
        }
        for i in k + 1..n {
            let f = &m[i][k] / &m[k][k];
            for j in k..n {
                let t = &f * &m[k][j];
                m[i][j] -= t;
            }
        }
    }
    true
}

/// `X_*(T) / Z Phi^v` via Smith normal form.
pub fn coweight_mod_coroot(rd: &BasedRootDatum) -> Result<FiniteAbelianGroup, RootDataError> {
    let coroots = rd.simple_coroots()?;
    Ok(LatticeQuotient::new(rd.rank(), &coroots).group())
}

/// `((X_* / Z Phi^v)_{I_F})^{Frob}` with explicit representatives.
#[derive(Debug, Clone)]
pub struct KottwitzQuotient {
    pub group: FiniteAbelianGroup,
    /// Coordinates of each element in the coinvariant quotient.
    pub elements: Vec<Vec<i64>>,
    /// Representatives in fundamental-coweight coordinates.
    pub representatives: Vec<Vec<i64>>,
    coinvariants: LatticeQuotient,
    basis: Vec<Vec<i64>>,
}

impl KottwitzQuotient {
    /// Coordinates of a coweight-lattice vector that lies in `X_*`.
    pub fn class_of(&self, x: &[i64]) -> Option<Vec<i64>> {
        let y = solve_in_basis(&self.basis, x)?;
        Some(self.coinvariants.coords(&y))
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    /// Orders of the coordinates of [`Self::elements`].
    pub fn component_orders(&self) -> Vec<i64> {
        self.coinvariants.component_orders()
    }
}

/// Inertia coinvariants followed by Frobenius invariants.
pub fn invariants_coinvariants(
    rd: &BasedRootDatum,
    action: &GaloisAction,
) -> Result<KottwitzQuotient, RootDataError> {
    let n = rd.rank();
    let basis = rd.cocharacter_basis();
    let mut relations = rd.simple_coroots()?;
    for g in &action.inertia_gens {
        let m = rd.action_matrix(g)?;
        for k in 0..n {
            // (tau - 1) b_k
            let mut col: Vec<i64> = (0..n).map(|i| m[i][k]).collect();
            col[k] -= 1;
            relations.push(col);
        }
    }
    let quot = LatticeQuotient::new(n, &relations);
    let frob = rd.action_matrix(&action.frobenius)?;
    let all = quot.elements()?;
    let fixed: Vec<Vec<i64>> = all
        .into_iter()
        .filter(|c| {
            let x = quot.lift(c);
            quot.coords(&mat_vec(&frob, &x)) == *c
        })
        .collect();
    let comp = quot.component_orders();
    let order = fixed.len() as u64;
    let group = structure_from_torsion_counts(order, |k| {
        fixed
            .iter()
            .filter(|c| c.iter().zip(&comp).all(|(x, d)| (x * k as i64) % d == 0))
            .count() as u64
    });
    let representatives = fixed
        .iter()
        .map(|c| {
            let y = quot.lift(c);
            let mut x = vec![0i64; n];
            for (k, bk) in basis.iter().enumerate() {
                for i in 0..n {
                    x[i] += y[k] * bk[i];
                }
            }
            x
        })
        .collect();
    Ok(KottwitzQuotient {
        group,
        elements: fixed,
        representatives,
        coinvariants: quot,
        basis,
    })
}

/// Order of `(Z(G^v)^{I_F})_{Frob}`, computed on characters of `X_* / Z Phi^v`.
///
/// `Z(G^v)` is the character group of `A = X_*/Q^v`; inertia acts by
/// precomposition. Invariant characters are found by enumeration and the
/// Frobenius coinvariants by computing the image of `Frob - 1`.
pub fn dual_center_invariants_order(
    rd: &BasedRootDatum,
    action: &GaloisAction,
) -> Result<u64, RootDataError> {
    let n = rd.rank();
    let quot = LatticeQuotient::new(n, &rd.simple_coroots()?);
    let orders = quot.component_orders();
    if orders.iter().any(|&d| d == 0) {
        return Err(RootDataError::FreePart(1));
    }
    let chars = quot.elements()?;
    let gens: Vec<Vec<i64>> = (0..orders.len())
        .map(|i| (0..orders.len()).map(|j| i64::from(i == j)).collect())
        .collect();
    // chi_c(x) = sum c_i x_i / d_i  mod 1, as a residue mod L = lcm(d_i)
    let l: i64 = orders.iter().fold(1, |a, &d| num_integer::lcm(a, d));
    let pair = |c: &[i64], x: &[i64]| -> i64 {
        c.iter()
            .zip(x)
            .zip(&orders)
            .map(|((ci, xi), d)| ci * xi * (l / d))
            .sum::<i64>()
            .rem_euclid(l)
    };
    let apply = |p: &[usize], x: &[i64]| -> Result<Vec<i64>, RootDataError> {
        let m = rd.action_matrix(p)?;
        Ok(quot.coords(&mat_vec(&m, &quot.lift(x))))
    };
    let mut inertia_images = Vec::new();
    for g in &action.inertia_gens {
        let imgs: Vec<Vec<i64>> = gens.iter().map(|x| apply(g, x)).collect::<Result<_, _>>()?;
        inertia_images.push(imgs);
    }
    let invariant: Vec<&Vec<i64>> = chars
        .iter()
        .filter(|c| {
            inertia_images
                .iter()
                .all(|imgs| gens.iter().zip(imgs).all(|(x, tx)| pair(c, x) == pair(c, tx)))
        })
        .collect();
    // (F chi)(x) = chi(F^{-1} x); the image of F - 1 equals that of F^{-1} - 1.
    let frob_imgs: Vec<Vec<i64>> = gens
        .iter()
        .map(|x| apply(&action.frobenius, x))
        .collect::<Result<_, _>>()?;
    let char_of = |vals: Vec<i64>| vals;
    let values = |c: &[i64], imgs: &[Vec<i64>]| -> Vec<i64> {
        imgs.iter().map(|x| pair(c, x)).collect()
    };
    let identity_vals = |c: &[i64]| -> Vec<i64> { gens.iter().map(|x| pair(c, x)).collect() };
    let mut image: BTreeSet<Vec<i64>> = BTreeSet::new();
    for c in &invariant {
        let fv = values(c, &frob_imgs);
        let iv = identity_vals(c);
        image.insert(char_of(
            fv.iter().zip(&iv).map(|(a, b)| (a - b).rem_euclid(l)).collect(),
        ));
    }
    Ok(invariant.len() as u64 / image.len() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, ToPrimitive};

    fn flip(t: FiniteType) -> GaloisAction {
        GaloisAction {
            inertia_gens: vec![t.diagram_automorphism(2).unwrap()],
            frobenius: (0..t.rank).collect(),
        }
    }

    #[test]
    fn a1_quotients() {
        let sc = BasedRootDatum::simply_connected(FiniteType::a(1));
        assert!(coweight_mod_coroot(&sc).unwrap().is_trivial());
        let ad = BasedRootDatum::adjoint(FiniteType::a(1));
        assert_eq!(coweight_mod_coroot(&ad).unwrap(), FiniteAbelianGroup::cyclic(2));
        let a2 = BasedRootDatum::adjoint(FiniteType::a(2));
        assert_eq!(coweight_mod_coroot(&a2).unwrap(), FiniteAbelianGroup::cyclic(3));
    }

    #[test]
    fn d_even_is_klein() {
        let ad = BasedRootDatum::adjoint(FiniteType::d(4));
        assert_eq!(
            coweight_mod_coroot(&ad).unwrap(),
            FiniteAbelianGroup::from_orders(&[2, 2])
        );
        let ad5 = BasedRootDatum::adjoint(FiniteType::d(5));
        assert_eq!(coweight_mod_coroot(&ad5).unwrap(), FiniteAbelianGroup::cyclic(4));
    }

    #[test]
    fn determinant_matches_order() {
        for t in all_types(6) {
            let ad = BasedRootDatum::adjoint(t);
            ad.validate().unwrap();
            let det = det_i64(&t.cartan());
            assert_eq!(coweight_mod_coroot(&ad).unwrap().order() as i64, det, "{t}");
        }
    }

    #[test]
    fn ramified_unitary_coinvariants() {
        for n in 2..=4 {
            let t = FiniteType::a(2 * n - 1);
            let k = invariants_coinvariants(&BasedRootDatum::adjoint(t), &flip(t)).unwrap();
            assert_eq!(k.group, FiniteAbelianGroup::cyclic(2), "A_{}", 2 * n - 1);
        }
        for n in 1..=4 {
            let t = FiniteType::a(2 * n);
            let k = invariants_coinvariants(&BasedRootDatum::adjoint(t), &flip(t)).unwrap();
            assert!(k.group.is_trivial(), "A_{}", 2 * n);
        }
    }

    #[test]
    fn trivial_action_is_identity() {
        for t in all_types(5) {
            let ad = BasedRootDatum::adjoint(t);
            let k = invariants_coinvariants(&ad, &GaloisAction::trivial(t.rank)).unwrap();
            assert_eq!(k.group, coweight_mod_coroot(&ad).unwrap());
        }
    }

    #[test]
    fn dual_side_matches() {
        for n in 2..=5 {
            let t = FiniteType::a(2 * n - 1);
            let ad = BasedRootDatum::adjoint(t);
            assert_eq!(dual_center_invariants_order(&ad, &flip(t)).unwrap(), 2);
        }
        let e6 = FiniteType::e(6);
        let ad = BasedRootDatum::adjoint(e6);
        assert_eq!(dual_center_invariants_order(&ad, &flip(e6)).unwrap(), 1);
    }

    #[test]
    fn non_automorphism_rejected() {
        let t = FiniteType::b(3);
        assert!(check_diagram_automorphism(&t, &[2, 1, 0]).is_err());
    }

    #[test]
    fn structure_recognition() {
        let g = FiniteAbelianGroup::from_orders(&[4, 6]);
        assert_eq!(g.invariant_factors, vec![2, 12]);
        let h = structure_from_torsion_counts(24, |k| g.torsion_count(k));
        assert_eq!(h, g);
    }

    pub(crate) fn all_types(max: usize) -> Vec<FiniteType> {
        let mut v = Vec::new();
        for n in 1..=max {
            v.push(FiniteType::a(n));
            if n >= 2 {
                v.push(FiniteType::b(n));
                v.push(FiniteType::c(n));
            }
            if n >= 4 {
                v.push(FiniteType::d(n));
            }
        }
        if max >= 6 {
            v.push(FiniteType::e(6));
        }
        v.push(FiniteType::f4());
        v.push(FiniteType::g2());
        v
    }

    fn det_i64(m: &Mat) -> i64 {
        let n = m.len();
        let mut a: Vec<Vec<BigRational>> = m
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        let mut det = BigRational::one();
        for k in 0..n {
            let p = (k..n).find(|&i| !a[i][k].is_zero()).unwrap();
            if p != k {
                a.swap(p, k);
                det = -det;
            }
            det *= &a[k][k];
            for i in k + 1..n {
                let f = &a[i][k] / &a[k][k];
                for j in k..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
            }
        }
        det.to_integer().to_i64().unwrap()
    }
}
