//! Library results against brute-force enumeration.

mod common;

use common::*;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unillc::catalog::Catalog;
use unillc::diagrams::enumerate_facets;
use unillc::finquot::{order_poly, reductive_quotient, TwistedFactor, TwistedFiniteType};
use unillc::rootdata::{coweight_mod_coroot, BasedRootDatum, FiniteType, LatticeQuotient};

fn semisimple(factors: &[(FiniteType, u8, usize)]) -> TwistedFiniteType {
    TwistedFiniteType {
        factors: factors
            .iter()
            .map(|&(ftype, twist, orbit_size)| TwistedFactor {
                ftype,
                twist,
                orbit_size,
            })
            .collect(),
        torus_cycles: vec![1],
        rank: factors.iter().map(|(t, _, o)| t.rank * o).sum(),
    }
}

fn order_at(t: &TwistedFiniteType, q: i64) -> BigRational {
    order_poly(t).eval_q(q)
}

fn big(n: u64) -> BigRational {
    BigRational::from_integer(n.into())
}

#[test]
fn split_orders_match_enumeration() {
    for q in [2, 3, 4, 5] {
        assert_eq!(order_at(&semisimple(&[(FiniteType::a(1), 1, 1)]), q as i64), big(count_sl(2, q)), "SL_2({q})");
    }
    assert_eq!(order_at(&semisimple(&[(FiniteType::a(2), 1, 1)]), 2), big(count_sl(3, 2)));
    assert_eq!(order_at(&semisimple(&[(FiniteType::a(3), 1, 1)]), 2), big(count_sl(4, 2)));
    let sp4 = count_sp4(2);
    assert_eq!(sp4, 720);
    assert_eq!(order_at(&semisimple(&[(FiniteType::c(2), 1, 1)]), 2), big(sp4));
    assert_eq!(order_at(&semisimple(&[(FiniteType::b(2), 1, 1)]), 2), big(sp4));
    assert_eq!(order_at(&semisimple(&[(FiniteType::b(1), 1, 1)]), 3), big(count_so3(3)));
    assert_eq!(order_at(&semisimple(&[(FiniteType::b(1), 1, 1)]), 5), big(count_so3(5)));
}

#[test]
fn twisted_and_restricted_orders_match_enumeration() {
    let su3 = count_su_over_f4(3);
    assert_eq!(su3, 216);
    assert_eq!(order_at(&semisimple(&[(FiniteType::a(2), 2, 1)]), 2), big(su3));
    // SU_2 = SL_2, and the Weil restriction of SL_2 from F_4 to F_2
    assert_eq!(count_su_over_f4(2), count_sl(2, 2));
    assert_eq!(order_at(&semisimple(&[(FiniteType::a(1), 1, 2)]), 2), big(count_sl(2, 4)));
    // products multiply
    let prod = semisimple(&[(FiniteType::a(1), 1, 1), (FiniteType::a(2), 2, 1)]);
    assert_eq!(order_at(&prod, 2), big(count_sl(2, 2) * su3));
}

/// Catalog quotients with a single anchor factor times a torus: the
/// semisimple part contributes exactly the enumerated count.
#[test]
fn catalog_quotients_hit_the_anchors() {
    let cat = Catalog::global().unwrap();
    let mut seen_c2 = false;
    let mut seen_2a2 = false;
    for e in cat.entries.iter().filter(|e| e.n <= 3) {
        for f in enumerate_facets(&e.g.relative) {
            let t = reductive_quotient(&e.g.local_index, &e.folded_g, &f).unwrap();
            if t.factors.len() != 1 {
                continue;
            }
            let anchor = match t.factors[0].to_string().as_str() {
                "C_2" | "B_2" => {
                    seen_c2 = true;
                    720
                }
                "2A_2" => {
                    seen_2a2 = true;
                    216
                }
                _ => continue,
            };
            let torus = TwistedFiniteType {
                factors: Vec::new(),
                ..t.clone()
            };
            assert_eq!(order_at(&t, 2), big(anchor) * order_at(&torus, 2), "{} {}", e.key(), f.label());
        }
    }
    assert!(seen_c2 && seen_2a2);
}

#[test]
fn smith_form_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut checked = 0;
    while checked < 150 {
        let k = rng.gen_range(1..=4);
        let m = rng.gen_range(k..=k + 2);
        let rels: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..k).map(|_| rng.gen_range(-5..=5)).collect())
            .collect();
        let Some((order, counts)) = quotient_torsion_counts_bounded(k, &rels, 48) else {
            continue;
        };
        let g = LatticeQuotient::new(k, &rels).group();
        assert_eq!(g.free_rank, 0, "{rels:?}");
        assert_eq!(g.order(), order, "{rels:?}");
        for (d, c) in counts {
            assert_eq!(g.torsion_count(d), c, "{rels:?} m = {d}");
        }
        checked += 1;
    }
}

fn quotient_torsion_counts_bounded(k: usize, rels: &[Vec<i64>], max_index: u64) -> Option<(u64, Vec<(u64, u64)>)> {
    // the enumeration is over (Z/N)^k; skip large indices before allocating
    let cheap = LatticeQuotient::new(k, rels).group();
    if cheap.free_rank > 0 || cheap.order() > max_index {
        return None;
    }
    quotient_torsion_counts(k, rels)
}

#[test]
fn coweights_mod_coroots_match_cartan_determinants() {
    let types = [
        FiniteType::a(1),
        FiniteType::a(2),
        FiniteType::a(3),
        FiniteType::b(2),
        FiniteType::b(3),
        FiniteType::c(3),
        FiniteType::d(4),
        FiniteType::g2(),
        FiniteType::f4(),
    ];
    for t in types {
        let ad = BasedRootDatum::adjoint(t);
        let cartan = t.cartan();
        let (order, counts) = quotient_torsion_counts(t.rank, &cartan).unwrap();
        let g = coweight_mod_coroot(&ad).unwrap();
        assert_eq!(g.order(), order, "{t}");
        for (d, c) in counts {
            assert_eq!(g.torsion_count(d), c, "{t}");
        }
        assert!(coweight_mod_coroot(&BasedRootDatum::simply_connected(t)).unwrap().is_trivial());
    }
}
