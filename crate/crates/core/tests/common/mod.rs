//! Brute-force oracles shared by the integration tests. Everything here is
//! deliberately naive and independent of the library's algorithms.
#![allow(dead_code)]

/// A finite field with `q in {2, 3, 4, 5}` elements, encoded as `0..q`.
/// For `q = 4` the element `a + b x` (with `x^2 = x + 1`) is `a + 2b`.
#[derive(Debug, Clone, Copy)]
pub struct Field {
    pub q: usize,
}

impl Field {
    pub fn new(q: usize) -> Self {
        assert!(matches!(q, 2 | 3 | 4 | 5), "unsupported field size {q}");
        Field { q }
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        if self.q == 4 {
            a ^ b
        } else {
            (a + b) % self.q
        }
    }

    pub fn neg(&self, a: usize) -> usize {
        if self.q == 4 {
            a
        } else {
            (self.q - a) % self.q
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        if self.q != 4 {
            return a * b % self.q;
        }
        // carry-less product reduced by x^2 = x + 1
        let (a0, a1, b0, b1) = (a & 1, a >> 1, b & 1, b >> 1);
        let c0 = (a0 & b0) ^ (a1 & b1);
        let c1 = (a0 & b1) ^ (a1 & b0) ^ (a1 & b1);
        c0 | (c1 << 1)
    }

    /// The Frobenius `a -> a^2` of `F_4` over `F_2` (identity on prime fields).
    pub fn conj(&self, a: usize) -> usize {
        if self.q == 4 {
            self.mul(a, a)
        } else {
            a
        }
    }
}

pub type Matrix = Vec<Vec<usize>>;

pub fn mat_mul(f: &Field, a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(0, |s, k| f.add(s, f.mul(a[i][k], b[k][j]))))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

/// Determinant by cofactor expansion.
pub fn det(f: &Field, a: &Matrix) -> usize {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    let mut total = 0;
    for j in 0..n {
        let minor: Matrix = (1..n)
            .map(|i| (0..n).filter(|&c| c != j).map(|c| a[i][c]).collect())
            .collect();
        let term = f.mul(a[0][j], det(f, &minor));
        total = f.add(total, if j % 2 == 0 { term } else { f.neg(term) });
    }
    total
}

/// Calls `visit` on every `n x n` matrix over the field.
pub fn for_each_matrix(f: &Field, n: usize, mut visit: impl FnMut(&Matrix)) {
    let cells = n * n;
    let mut digits = vec![0usize; cells];
    loop {
        let m: Matrix = (0..n).map(|i| digits[i * n..(i + 1) * n].to_vec()).collect();
        visit(&m);
        let mut k = 0;
        loop {
            if k == cells {
                return;
            }
            digits[k] += 1;
            if digits[k] < f.q {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

fn count(f: &Field, n: usize, pred: impl Fn(&Matrix) -> bool) -> u64 {
    let mut c = 0;
    for_each_matrix(f, n, |m| {
        if pred(m) {
            c += 1;
        }
    });
    c
}

/// `|SL_n(F_q)|`.
pub fn count_sl(n: usize, q: usize) -> u64 {
    let f = Field::new(q);
    count(&f, n, |m| det(&f, m) == 1)
}

/// `|Sp_4(F_q)|` for the form `J = [[0, I], [-I, 0]]`.
pub fn count_sp4(q: usize) -> u64 {
    let f = Field::new(q);
    let mut j = vec![vec![0; 4]; 4];
    for i in 0..2 {
        j[i][i + 2] = 1;
        j[i + 2][i] = f.neg(1);
    }
    count(&f, 4, |m| mat_mul(&f, &mat_mul(&f, &transpose(m), &j), m) == j)
}

/// `|SU_n(F_2)|`: matrices over `F_4` with `conj(M)^T M = 1` and `det M = 1`.
pub fn count_su_over_f4(n: usize) -> u64 {
    let f = Field::new(4);
    let id: Matrix = (0..n).map(|i| (0..n).map(|j| usize::from(i == j)).collect()).collect();
    count(&f, n, |m| {
        let mh: Matrix = (0..n).map(|i| (0..n).map(|j| f.conj(m[j][i])).collect()).collect();
        mat_mul(&f, &mh, m) == id && det(&f, m) == 1
    })
}

/// `|SO_3(F_q)|` for the split form `x0 x2 + x1^2`, odd `q`.
pub fn count_so3(q: usize) -> u64 {
    let f = Field::new(q);
    let g: Matrix = vec![vec![0, 0, 1], vec![0, 2 % q, 0], vec![1, 0, 0]];
    count(&f, 3, |m| mat_mul(&f, &mat_mul(&f, &transpose(m), &g), m) == g && det(&f, m) == 1)
}

/// Structure of `Z^k / <relations>` by enumeration inside `(Z/N)^k`,
/// `N` the index. Returns the order and `(m, #{x : m x = 0})` for `m | N`, or
/// `None` when the relations do not span a full-rank sublattice.
pub fn quotient_torsion_counts(k: usize, relations: &[Vec<i64>]) -> Option<(u64, Vec<(u64, u64)>)> {
    let n = integer_det_of_span(k, relations)?;
    let size = (n as usize).pow(k as u32);
    let index = |x: &[i64]| x.iter().fold(0usize, |acc, &c| acc * n as usize + c.rem_euclid(n) as usize);
    // closure of the relations mod N
    let mut in_l = vec![false; size];
    let mut elems = vec![vec![0i64; k]];
    in_l[0] = true;
    let mut head = 0;
    while head < elems.len() {
        let x = elems[head].clone();
        head += 1;
        for r in relations {
            let y: Vec<i64> = x.iter().zip(r).map(|(a, b)| (a + b).rem_euclid(n)).collect();
            let iy = index(&y);
            if !in_l[iy] {
                in_l[iy] = true;
                elems.push(y);
            }
        }
    }
    let l_size = elems.len() as u64;
    let order = size as u64 / l_size;
    let nu = n as usize;
    let mut counts = Vec::new();
    for m in (1..=n).filter(|m| n % m == 0) {
        let mut c = 0u64;
        for flat in 0..size {
            // digits of `flat` in base N are the coordinates of x
            let (mut rest, mut img, mut scale) = (flat, 0usize, 1usize);
            for _ in 0..k {
                let d = rest % nu;
                rest /= nu;
                img += (d * m as usize % nu) * scale;
                scale *= nu;
            }
            if in_l[img] {
                c += 1;
            }
        }
        counts.push((m as u64, c / l_size));
    }
    Some((order, counts))
}

/// `|Z^k / L|` for `L` spanned by `relations`: the gcd of the maximal minors.
fn integer_det_of_span(k: usize, relations: &[Vec<i64>]) -> Option<i64> {
    let m = relations.len();
    if m < k {
        return None;
    }
    let mut g = 0i64;
    let mut pick = Vec::new();
    choose(m, k, 0, &mut pick, &mut |rows| {
        let sub: Vec<Vec<i64>> = rows.iter().map(|&r| relations[r].clone()).collect();
        g = num_integer::gcd(g, int_det(&sub));
    });
    (g != 0).then_some(g.abs())
}

fn choose(m: usize, k: usize, start: usize, pick: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in start..m {
        pick.push(i);
        choose(m, k, i + 1, pick, f);
        pick.pop();
    }
}

pub fn int_det(a: &[Vec<i64>]) -> i64 {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = (1..n)
                .map(|i| (0..n).filter(|&c| c != j).map(|c| a[i][c]).collect())
                .collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * a[0][j] * int_det(&minor)
        })
        .sum()
}
