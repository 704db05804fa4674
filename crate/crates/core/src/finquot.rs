//! Finite reductive quotients of parahoric subgroups: twisted types read off
//! from facets, their dimensions and order polynomials.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::HalfLaurent;
use crate::catalog::{facet_transfer, VerifiedEntry};
use crate::diagrams::{perm_cycles, AffineDiagram, Facet, Folded, LocalIndex};
use crate::rootdata::{Family, FiniteType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FinquotError {
    #[error("subdiagram on {0:?} is not of finite type")]
    NotFinite(Vec<usize>),
    #[error("twist of order {twist} is not defined on {ftype}")]
    UnsupportedTwist { ftype: FiniteType, twist: u8 },
    #[error("facet {0:?} does not fit the diagram")]
    BadFacet(Vec<usize>),
}

/// One Frobenius orbit of simple factors: `orbit_size` copies of `ftype`,
/// with `Frob^orbit_size` acting on each copy by a diagram automorphism of order `twist`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TwistedFactor {
    pub ftype: FiniteType,
    pub twist: u8,
    pub orbit_size: usize,
}

impl TwistedFactor {
    /// Comparison key ignoring the `B`/`C` distinction.
    pub fn key(&self) -> ((Family, usize), u8, usize) {
        (self.ftype.up_to_arrows(), self.twist, self.orbit_size)
    }
}

impl fmt::Display for TwistedFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twist > 1 {
            write!(f, "{}", self.twist)?;
        }
        write!(f, "{}", self.ftype)?;
        if self.orbit_size > 1 {
            write!(f, "[q^{}]", self.orbit_size)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TwistedFiniteType {
    pub factors: Vec<TwistedFactor>,
    /// Cycle lengths of Frobenius on the nodes outside the lifted facet.
    pub torus_cycles: Vec<usize>,
    /// Rank of the quotient, `|Delta_nr| - 1`.
    pub rank: usize,
}

impl TwistedFiniteType {
    pub fn central_torus_rank(&self) -> usize {
        self.torus_cycles.iter().sum::<usize>() - 1
    }

    pub fn num_positive_roots(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| f.orbit_size as u64 * f.ftype.num_positive_roots())
            .sum()
    }

    pub fn dim(&self) -> u64 {
        2 * self.num_positive_roots() + self.rank as u64
    }

    pub fn sorted_keys(&self) -> Vec<((Family, usize), u8, usize)> {
        let mut k: Vec<_> = self.factors.iter().map(TwistedFactor::key).collect();
        k.sort();
        k
    }
}

impl fmt::Display for TwistedFiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.factors.iter().map(ToString::to_string).collect();
        if self.central_torus_rank() > 0 {
            let c: Vec<String> = self.torus_cycles.iter().map(usize::to_string).collect();
            parts.push(format!("T({})", c.join(",")));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" x "))
        }
    }
}

/// Finite type of a connected subdiagram of an affine diagram.
pub fn recognize(d: &AffineDiagram, comp: &[usize]) -> Result<FiniteType, FinquotError> {
    let k = comp.len();
    let not_finite = || FinquotError::NotFinite(comp.to_vec());
    let inside: BTreeSet<usize> = comp.iter().copied().collect();
    let nbrs = |a: usize| -> Vec<usize> {
        d.neighbors(a).into_iter().filter(|b| inside.contains(b)).collect()
    };
    let edges: Vec<_> = d
        .edges
        .iter()
        .filter(|e| inside.contains(&e.i) && inside.contains(&e.j))
        .collect();
    if edges.len() + 1 != k || edges.iter().any(|e| e.bonds == 4) {
        return Err(not_finite());
    }
    let multi: Vec<_> = edges.iter().filter(|e| e.bonds > 1).collect();
    let max_deg = comp.iter().map(|&a| nbrs(a).len()).max().unwrap_or(0);
    let mk = |f: Family, r: usize| FiniteType::new(f, r).map_err(|_| not_finite());
    if max_deg <= 2 {
        match multi.as_slice() {
            [] => mk(Family::A, k),
            [e] if e.bonds == 3 && k == 2 => mk(Family::G, 2),
            [e] if e.bonds == 2 => {
                if k == 2 {
                    return mk(Family::B, 2);
                }
                let end_i = nbrs(e.i).len() == 1;
                let end_j = nbrs(e.j).len() == 1;
                let lengths = d.lengths().map_err(|_| not_finite())?;
                if end_i || end_j {
                    let end = if end_j { e.j } else { e.i };
                    let other = if end == e.j { e.i } else { e.j };
                    if lengths[end] < lengths[other] {
                        mk(Family::B, k)
                    } else {
                        mk(Family::C, k)
                    }
                } else if k == 4 {
                    mk(Family::F, 4)
                } else {
                    Err(not_finite())
                }
            }
            _ => Err(not_finite()),
        }
    } else {
        if !multi.is_empty() || max_deg != 3 {
            return Err(not_finite());
        }
        let branch = *comp.iter().find(|&&a| nbrs(a).len() == 3).unwrap();
        if comp.iter().filter(|&&a| nbrs(a).len() == 3).count() != 1 {
            return Err(not_finite());
        }
        let mut arms: Vec<usize> = nbrs(branch)
            .into_iter()
            .map(|start| {
                let (mut prev, mut cur, mut len) = (branch, start, 1);
                loop {
                    let next: Vec<usize> = nbrs(cur).into_iter().filter(|&x| x != prev).collect();
                    match next.as_slice() {
                        [n] => {
                            prev = cur;
                            cur = *n;
                            len += 1;
                        }
                        _ => break len,
                    }
                }
            })
            .collect();
        arms.sort_unstable();
        match arms.as_slice() {
            [1, 1, _] => mk(Family::D, k),
            [1, 2, 2] => mk(Family::E, 6),
            [1, 2, 3] => mk(Family::E, 7),
            [1, 2, 4] => mk(Family::E, 8),
            _ => Err(not_finite()),
        }
    }
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

/// Twisted type of the reductive quotient for the Frobenius-stable node set `lift`.
pub fn quotient_type(li: &LocalIndex, lift: &[usize]) -> Result<TwistedFiniteType, FinquotError> {
    let d = &li.diagram;
    let n = d.len();
    if lift.len() >= n || lift.iter().any(|&x| x >= n) {
        return Err(FinquotError::BadFacet(lift.to_vec()));
    }
    let lift_set: BTreeSet<usize> = lift.iter().copied().collect();
    if lift.iter().any(|&x| !lift_set.contains(&li.frob[x])) {
        return Err(FinquotError::BadFacet(lift.to_vec()));
    }
    let comps = d.components_of(lift);
    let comp_of = |x: usize| comps.iter().position(|c| c.contains(&x)).unwrap();
    let mut seen = vec![false; comps.len()];
    let mut factors = Vec::new();
    for c0 in 0..comps.len() {
        if seen[c0] {
            continue;
        }
        // Frobenius orbit of the component
        let mut m = 0;
        let mut c = c0;
        let mut power: Vec<usize> = (0..n).collect();
        loop {
            seen[c] = true;
            m += 1;
            power = compose(&li.frob, &power);
            c = comp_of(power[comps[c0][0]]);
            if c == c0 {
                break;
            }
        }
        let comp = &comps[c0];
        let ftype = recognize(d, comp)?;
        // order of Frob^m on the component
        let mut twist = 1u8;
        let mut p = power.clone();
        while comp.iter().any(|&x| p[x] != x) {
            p = compose(&power, &p);
            twist += 1;
            if twist > 6 {
                return Err(FinquotError::UnsupportedTwist { ftype, twist });
            }
        }
        let ok = match (ftype.family, twist) {
            (_, 1) => true,
            (Family::A, 2) => ftype.rank >= 2,
            (Family::D, 2) => true,
            (Family::E, 2) => ftype.rank == 6,
            (Family::D, 3) => ftype.rank == 4,
            _ => false,
        };
        if !ok {
            return Err(FinquotError::UnsupportedTwist { ftype, twist });
        }
        factors.push(TwistedFactor {
            ftype,
            twist,
            orbit_size: m,
        });
    }
    factors.sort();
    let outside: Vec<usize> = (0..n).filter(|x| !lift_set.contains(x)).collect();
    let mut torus_cycles: Vec<usize> = perm_cycles(&li.frob)
        .into_iter()
        .filter(|c| !lift_set.contains(&c[0]))
        .map(|c| c.len())
        .collect();
    torus_cycles.sort_unstable();
    debug_assert_eq!(torus_cycles.iter().sum::<usize>(), outside.len());
    Ok(TwistedFiniteType {
        factors,
        torus_cycles,
        rank: n - 1,
    })
}

/// Reductive quotient for a facet of the relative diagram.
pub fn reductive_quotient(
    li: &LocalIndex,
    folded: &Folded,
    f: &Facet,
) -> Result<TwistedFiniteType, FinquotError> {
    if f.j.len() >= folded.orbits.len() || f.j.iter().any(|&x| x >= folded.orbits.len()) {
        return Err(FinquotError::BadFacet(f.j.iter().copied().collect()));
    }
    quotient_type(li, &folded.lift(&f.j))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderPolynomial {
    /// Even exponents only: a polynomial in `q`.
    pub poly: HalfLaurent,
    pub dimension: u64,
}

fn q(k: u64) -> HalfLaurent {
    HalfLaurent::q_pow(k as i64)
}

/// `|H(F_Q)|` for one simple factor, as a polynomial in `Q`, scaled to `Q = q^m`.
fn factor_order(f: &TwistedFactor) -> HalfLaurent {
    let m = f.orbit_size as u64;
    let t = f.ftype;
    let degrees = t.degrees();
    let one = HalfLaurent::one();
    let mut p = q(m * t.num_positive_roots());
    let mut negated_pfaffian = false;
    let mut skip_pair = false;
    for &d in &degrees {
        let d = d as u64;
        let qd = q(m * d);
        let term = match (t.family, f.twist) {
            (_, 1) => &qd - &one,
            (Family::A, 2) => {
                if d % 2 == 1 {
                    &qd + &one
                } else {
                    &qd - &one
                }
            }
            (Family::D, 2) if d == t.rank as u64 && !negated_pfaffian => {
                negated_pfaffian = true;
                &qd + &one
            }
            (Family::D, 2) => &qd - &one,
            (Family::E, 2) if d == 5 || d == 9 => &qd + &one,
            (Family::E, 2) => &qd - &one,
            (Family::D, 3) if d == 4 => {
                // eigenvalues w, w^2 on the two degree-4 invariants
                if skip_pair {
                    continue;
                }
                skip_pair = true;
                &(&q(2 * m * d) + &qd) + &one
            }
            (Family::D, 3) => &qd - &one,
            _ => unreachable!("twist validated in quotient_type"),
        };
        p = &p * &term;
    }
    p
}

pub fn order_poly(t: &TwistedFiniteType) -> OrderPolynomial {
    let one = HalfLaurent::one();
    let mut p = HalfLaurent::one();
    for f in &t.factors {
        p = &p * &factor_order(f);
    }
    let mut torus = HalfLaurent::one();
    for &l in &t.torus_cycles {
        torus = &torus * &(&q(l as u64) - &one);
    }
    let torus = torus
        .exact_div(&(&q(1) - &one))
        .expect("q - 1 divides the torus factor");
    p = &p * &torus;
    OrderPolynomial {
        poly: p,
        dimension: t.dim(),
    }
}

impl OrderPolynomial {
    pub fn degree_in_q(&self) -> i64 {
        self.poly.max_exp().unwrap_or(0) / 2
    }

    pub fn eval_q(&self, q: i64) -> num_rational::BigRational {
        self.poly
            .eval_q(&crate::arith::int(q))
            .expect("polynomial has no poles")
    }
}

/// Characteristic polynomial `det(x - A)` of a rational matrix, lowest degree first.
pub fn char_poly(a: &[Vec<BigRational>]) -> Vec<BigRational> {
    let n = a.len();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::one();
    let mut m = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    s += &a[i][l] * &m[l][j];
                }
                if i == j {
                    s += &c[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        c[n - k] = -tr / BigRational::from_integer((k as i64).into());
    }
    c
}

/// `|T(k_F)| = det(q - F)` for a torus whose Frobenius acts on the
/// cocharacter lattice by `frob`.
pub fn torus_order(frob: &[Vec<BigRational>]) -> HalfLaurent {
    HalfLaurent::from_terms(
        char_poly(frob)
            .into_iter()
            .enumerate()
            .map(|(k, c)| (2 * k as i64, c)),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct MatchReport {
    pub family: String,
    pub n: usize,
    pub isogeny: String,
    pub facet: Vec<usize>,
    pub facet_prime: Vec<usize>,
    pub type_g: String,
    pub type_companion: String,
    pub order_g: String,
    pub type_match: bool,
    pub dim_match: bool,
    pub order_match: bool,
    pub omega_match: bool,
}

impl MatchReport {
    pub fn all(&self) -> bool {
        self.type_match && self.dim_match && self.order_match && self.omega_match
    }
}

/// Compares the two reductive quotients for `f` and an arbitrary companion facet.
pub fn compare_facets(
    e: &VerifiedEntry,
    f: &Facet,
    f_prime: &Facet,
) -> Result<MatchReport, FinquotError> {
    let tg = reductive_quotient(&e.g.local_index, &e.folded_g, f)?;
    let tc = reductive_quotient(&e.companion.local_index, &e.folded_companion, f_prime)?;
    let og = order_poly(&tg);
    let oc = order_poly(&tc);
    let (sg, _) = e.omega_g.facet_stabilizers(f);
    let (sc, _) = e.omega_companion.facet_stabilizers(f_prime);
    let image: BTreeSet<usize> = sg.iter().map(|&i| e.omega_iso[i]).collect();
    let omega_match = image == sc.iter().copied().collect::<BTreeSet<_>>()
        && e.omega_g.subgroup_structure(&sg) == e.omega_companion.subgroup_structure(&sc);
    Ok(MatchReport {
        family: e.family.name().into(),
        n: e.n,
        isogeny: e.isogeny.clone(),
        facet: f.j.iter().copied().collect(),
        facet_prime: f_prime.j.iter().copied().collect(),
        type_g: tg.to_string(),
        type_companion: tc.to_string(),
        order_g: og.poly.render_best(),
        type_match: tg.sorted_keys() == tc.sorted_keys(),
        dim_match: tg.dim() == tc.dim() && og.dimension == og.degree_in_q() as u64,
        order_match: og.poly == oc.poly,
        omega_match,
    })
}

/// Type, dimension, order and stabilizer comparison for `f` and its transfer.
pub fn check_facet_match(e: &VerifiedEntry, f: &Facet) -> Result<MatchReport, FinquotError> {
    compare_facets(e, f, &facet_transfer(e, f))
}

/// All facets of an entry, in facet order.
pub fn check_all_facets(e: &VerifiedEntry) -> Result<Vec<MatchReport>, FinquotError> {
    crate::diagrams::enumerate_facets(&e.g.relative)
        .par_iter()
        .map(|f| check_facet_match(e, f))
        .collect()
}

/// `|G_f(k_F)| = |Omega_{G,f}| * |G_f°(k_F)|`.
pub fn disconnected_order(e: &VerifiedEntry, f: &Facet) -> Result<HalfLaurent, FinquotError> {
    let t = reductive_quotient(&e.g.local_index, &e.folded_g, f)?;
    let (stab, _) = e.omega_g.facet_stabilizers(f);
    Ok(order_poly(&t)
        .poly
        .scale(&crate::arith::int(stab.len() as i64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::build;

    fn ft(f: Family, r: usize, twist: u8, m: usize) -> TwistedFiniteType {
        TwistedFiniteType {
            factors: vec![TwistedFactor {
                ftype: FiniteType::new(f, r).unwrap(),
                twist,
                orbit_size: m,
            }],
            torus_cycles: vec![1],
            rank: r * m,
        }
    }

    #[test]
    fn small_orders() {
        let c2 = order_poly(&ft(Family::C, 2, 1, 1));
        assert_eq!(c2.eval_q(2), crate::arith::int(720));
        let u3 = order_poly(&ft(Family::A, 2, 2, 1));
        assert_eq!(u3.eval_q(2), crate::arith::int(216));
        let g2 = order_poly(&ft(Family::G, 2, 1, 1));
        assert_eq!(g2.eval_q(2), crate::arith::int(12096));
        let d4 = order_poly(&ft(Family::D, 4, 3, 1));
        // |3D4(2)| = 211341312
        assert_eq!(d4.eval_q(2), crate::arith::int(211_341_312));
        let e6 = order_poly(&ft(Family::E, 6, 2, 1));
        // |2E6(2)| for the simply connected group: 3 * 76532479683774853939200
        assert_eq!(e6.eval_q(2), crate::arith::int(3) * num_bigint::BigInt::parse_bytes(b"76532479683774853939200", 10).unwrap());
    }

    #[test]
    fn split_torus() {
        let t = TwistedFiniteType {
            factors: Vec::new(),
            torus_cycles: vec![1, 1, 1],
            rank: 2,
        };
        let o = order_poly(&t);
        assert_eq!(o.poly, "q^2 - 2*q + 1".parse().unwrap());
        assert_eq!(o.dimension, 2);
    }

    #[test]
    fn recognizes_types() {
        let d = build::nr_b(4);
        assert_eq!(recognize(&d, &[1, 2, 3, 4]).unwrap(), FiniteType::b(4));
        assert_eq!(recognize(&d, &[0, 1, 2, 3]).unwrap(), FiniteType::d(4));
        let c = build::nr_c(3);
        assert_eq!(recognize(&c, &[1, 2, 3]).unwrap(), FiniteType::c(3));
        let f = build::nr_f4();
        assert_eq!(recognize(&f, &[1, 2, 3, 4]).unwrap(), FiniteType::f4());
        assert!(recognize(&c, &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn leg_pair_is_glued() {
        let li = LocalIndex::new(build::nr_bc(3), vec![1, 0, 2, 3]).unwrap();
        let t = quotient_type(&li, &[0, 1]).unwrap();
        assert_eq!(t.factors.len(), 1);
        assert_eq!(t.factors[0].orbit_size, 2);
        assert_eq!(t.factors[0].ftype, FiniteType::a(1));
    }

    fn catalog() -> &'static crate::catalog::Catalog {
        crate::catalog::Catalog::global().expect("catalog")
    }

    #[test]
    fn cbc2_all_facets_match() {
        let e = catalog().lookup("C-BC_n", Some(2), "d=1").unwrap();
        for r in check_all_facets(&e).unwrap() {
            assert!(r.all(), "{r:?}");
        }
    }

    #[test]
    fn bc3_chamber_matches() {
        let c = catalog();
        for e in c.family(crate::catalog::FamilyLabel::BC).filter(|e| e.n == 3) {
            let f = Facet::new([], e.rel_len()).unwrap();
            assert!(check_facet_match(e, &f).unwrap().all(), "{}", e.key());
        }
    }

    #[test]
    fn sweep_rank_four() {
        for e in catalog().entries.iter().filter(|e| e.n <= 4) {
            for r in check_all_facets(e).unwrap() {
                assert!(r.all(), "{} {r:?}", e.key());
            }
        }
    }

    #[test]
    fn mismatched_pair_is_caught() {
        // the split C_2 chamber against a facet with one C_2 vertex removed
        let e = catalog().lookup("C-BC_n", Some(2), "d=1").unwrap();
        let f = Facet::new([1], e.rel_len()).unwrap();
        let g = Facet::new([0, 1], e.rel_len()).unwrap();
        let r = compare_facets(&e, &f, &g).unwrap();
        assert!(!r.order_match);
        assert!(!r.all());
    }

    #[test]
    fn dual_types_share_orders() {
        for n in 2..=6 {
            let b = order_poly(&ft(Family::B, n, 1, 1));
            let c = order_poly(&ft(Family::C, n, 1, 1));
            assert_eq!(b.poly, c.poly);
        }
    }

    #[test]
    fn torus_orders_from_matrices() {
        use crate::arith::int;
        let perm = |p: &[usize]| -> Vec<Vec<num_rational::BigRational>> {
            (0..p.len())
                .map(|i| (0..p.len()).map(|j| int((p[j] == i) as i64)).collect())
                .collect()
        };
        // a 3-cycle: q^3 - 1
        assert_eq!(torus_order(&perm(&[1, 2, 0])), "q^3 - 1".parse().unwrap());
        // -1 on a line: q + 1
        assert_eq!(torus_order(&[vec![int(-1)]]), "q + 1".parse().unwrap());
        // the cycle type description agrees with the matrix
        let t = TwistedFiniteType {
            factors: Vec::new(),
            torus_cycles: vec![1, 2],
            rank: 2,
        };
        let by_cycles = order_poly(&t).poly;
        let by_matrix = torus_order(&perm(&[0, 2, 1]))
            .exact_div(&"q - 1".parse().unwrap())
            .unwrap();
        assert_eq!(by_cycles, by_matrix);
    }
}
