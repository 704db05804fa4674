//! Hand-written tables for the eight ramified families and their companions.
//!
//! Diagrams here are written from root lengths and bond counts; the relative
//! diagrams are tabulated independently of [`crate::diagrams::fold`], which
//! the loader runs to cross-check them.

use num_rational::Rational64;

use super::{CatalogEntry, DualGroupData, FamilyLabel, Side};
use crate::diagrams::{AffineDiagram, Arrow, Edge, LocalIndex};
use crate::omega::OmegaDecl;
use crate::rootdata::{BasedRootDatum, FiniteType, GaloisAction};

fn r(a: i64, b: i64) -> Rational64 {
    Rational64::new(a, b)
}

fn ri(a: i64) -> Rational64 {
    Rational64::from_integer(a)
}

/// Diagram from squared lengths and `(i, j, bonds)`; arrows toward the shorter root.
fn from_lengths(
    labels: Vec<String>,
    lengths: &[Rational64],
    edges: &[(usize, usize, u8)],
) -> AffineDiagram {
    let edges = edges
        .iter()
        .map(|&(i, j, b)| {
            let (li, lj) = (lengths[i], lengths[j]);
            let arrow = if b == 1 {
                assert_eq!(li, lj, "single bond between {i} and {j} joins unequal lengths");
                Arrow::None
            } else if li == lj {
                assert_eq!(b, 4, "equal lengths need a quadruple bond");
                Arrow::Both
            } else if li > lj {
                Arrow::Forward
            } else {
                Arrow::Backward
            };
            Edge::new(i, j, b, arrow)
        })
        .collect();
    AffineDiagram::new(labels, edges, [0]).expect("tabulated diagram is valid")
}

fn numbered(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

fn chain(labels: Vec<String>, lengths: &[Rational64], bonds: &[u8]) -> AffineDiagram {
    let edges: Vec<(usize, usize, u8)> = bonds.iter().enumerate().map(|(i, &b)| (i, i + 1, b)).collect();
    from_lengths(labels, lengths, &edges)
}

/// Chain bonds `[2, 1, ..., 1, 2]` on `k` nodes, or a single quadruple bond for `k = 2`.
fn end_doubled_bonds(k: usize) -> Vec<u8> {
    if k == 2 {
        vec![4]
    } else {
        let mut b = vec![1u8; k - 1];
        b[0] = 2;
        b[k - 2] = 2;
        b
    }
}

/// `[a, mid, ..., mid, b]` on `k >= 2` nodes.
fn ends(k: usize, a: Rational64, mid: Rational64, b: Rational64) -> Vec<Rational64> {
    let mut v = vec![mid; k];
    v[0] = a;
    v[k - 1] = b;
    v
}

/// Two legs 0, 1 on node 2, then a chain to `n` with a double bond `(n-1, n)`.
fn legs(n: usize, body: Rational64, last: Rational64) -> AffineDiagram {
    let mut lengths = vec![body; n + 1];
    lengths[n] = last;
    let edges: Vec<(usize, usize, u8)> = if n == 2 {
        vec![(0, 2, 2), (1, 2, 2)]
    } else {
        let mut e = vec![(0, 2, 1), (1, 2, 1)];
        e.extend((2..n - 1).map(|i| (i, i + 1, 1)));
        e.push((n - 1, n, 2));
        e
    };
    from_lengths(numbered(n + 1), &lengths, &edges)
}

// Affine diagrams over the maximal unramified extension.

/// Twisted `A_{2n-1}`: legs short, long end.
pub fn nr_bc(n: usize) -> AffineDiagram {
    legs(n, ri(1), ri(2))
}

/// Untwisted `B_n`.
pub fn nr_b(n: usize) -> AffineDiagram {
    legs(n, ri(2), ri(1))
}

/// Twisted `A_{2n}`.
pub fn nr_cbc(n: usize) -> AffineDiagram {
    let k = n + 1;
    chain(numbered(k), &ends(k, ri(4), ri(2), ri(1)), &end_doubled_bonds(k))
}

/// Untwisted `C_n`.
pub fn nr_c(n: usize) -> AffineDiagram {
    let k = n + 1;
    chain(numbered(k), &ends(k, ri(2), ri(1), ri(2)), &end_doubled_bonds(k))
}

/// Twisted `D_{n+1}`.
pub fn nr_cb(n: usize) -> AffineDiagram {
    let k = n + 1;
    chain(numbered(k), &ends(k, ri(1), ri(2), ri(1)), &end_doubled_bonds(k))
}

pub fn nr_f4_twisted() -> AffineDiagram {
    chain(numbered(5), &[ri(1), ri(1), ri(1), ri(2), ri(2)], &[1, 1, 2, 1])
}

pub fn nr_f4() -> AffineDiagram {
    chain(numbered(5), &[ri(2), ri(2), ri(2), ri(1), ri(1)], &[1, 1, 2, 1])
}

pub fn nr_g2_twisted() -> AffineDiagram {
    chain(numbered(3), &[ri(1), ri(1), ri(3)], &[1, 3])
}

pub fn nr_g2() -> AffineDiagram {
    chain(numbered(3), &[ri(3), ri(3), ri(1)], &[1, 3])
}

// Relative diagrams of the non-quasi-split families, orbit-labelled.

fn pair_labels(k: usize, total: usize) -> Vec<String> {
    (0..k)
        .map(|i| {
            let j = total - 1 - i;
            if i == j {
                i.to_string()
            } else {
                format!("{i}+{j}")
            }
        })
        .collect()
}

pub fn rel_2bc(n: usize) -> AffineDiagram {
    let mut labels = vec!["0+1".to_string()];
    labels.extend((2..=n).map(|i| i.to_string()));
    chain(labels, &ends(n, r(1, 2), ri(1), ri(2)), &end_doubled_bonds(n))
}

pub fn rel_2bc_companion(n: usize) -> AffineDiagram {
    let mut labels = vec!["0+1".to_string()];
    labels.extend((2..=n).map(|i| i.to_string()));
    chain(labels, &ends(n, ri(1), ri(2), ri(1)), &end_doubled_bonds(n))
}

pub fn rel_2cb_even(n: usize) -> AffineDiagram {
    chain(pair_labels(n, 2 * n), &ends(n, r(1, 2), ri(1), r(1, 2)), &end_doubled_bonds(n))
}

pub fn rel_2cb_even_companion(n: usize) -> AffineDiagram {
    chain(pair_labels(n, 2 * n), &ends(n, ri(1), r(1, 2), r(1, 4)), &end_doubled_bonds(n))
}

pub fn rel_2cb_odd(n: usize) -> AffineDiagram {
    let k = n + 1;
    chain(pair_labels(k, 2 * n + 1), &ends(k, r(1, 2), ri(1), ri(2)), &end_doubled_bonds(k))
}

pub fn rel_2cb_odd_companion(n: usize) -> AffineDiagram {
    let k = n + 1;
    chain(pair_labels(k, 2 * n + 1), &ends(k, ri(1), r(1, 2), ri(1)), &end_doubled_bonds(k))
}

fn swap01(k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    p.swap(0, 1);
    p
}

fn reflection(k: usize) -> Vec<usize> {
    (0..k).map(|i| k - 1 - i).collect()
}

fn identity(k: usize) -> Vec<usize> {
    (0..k).collect()
}

fn divisors(m: usize) -> Vec<usize> {
    (1..=m).filter(|d| m % d == 0).collect()
}

fn inertia(t: FiniteType, order: usize) -> GaloisAction {
    GaloisAction {
        inertia_gens: vec![t.diagram_automorphism(order).expect("pinned automorphism exists")],
        frobenius: (0..t.rank).collect(),
    }
}

fn unit_vector(r: usize, i: usize, scale: i64) -> Vec<i64> {
    let mut v = vec![0; r];
    v[i] = scale;
    v
}

fn decl(order: u64, action: Option<Vec<usize>>, sign: bool) -> OmegaDecl {
    OmegaDecl {
        order,
        generator_action: action,
        sign_factor: sign,
    }
}

fn side(
    name: String,
    datum: BasedRootDatum,
    action: GaloisAction,
    nr: AffineDiagram,
    frob: Vec<usize>,
    relative: AffineDiagram,
    omega: OmegaDecl,
) -> Side {
    let dim = datum.finite_type.dim();
    Side {
        name,
        datum,
        action,
        local_index: LocalIndex::new(nr, frob).expect("tabulated Frobenius is an automorphism"),
        relative,
        omega,
        dim,
    }
}

fn dual(
    dual_label: String,
    fixed_label: String,
    fixed_type: FiniteType,
    fixed_pi0: u32,
    dim_dual: u64,
    center: u64,
) -> DualGroupData {
    let dim_fixed = fixed_type.dim();
    DualGroupData {
        dual_label,
        fixed_label,
        fixed_type,
        fixed_pi0,
        dim_dual,
        dim_dual_fixed: dim_fixed,
        center_invariants_order: center,
        artin_conductor: dim_dual - dim_fixed,
        tame: true,
    }
}

/// Unitary families in even dimension (`B-C_n` and `2B-C_n`), variant `d | 2n`.
fn unitary_even(n: usize, d: usize, twisted: bool) -> CatalogEntry {
    let m = 2 * n;
    let t = FiniteType::a(m - 1);
    let k = n + 1;
    let q = m / d;
    let omega_order = if q % 2 == 0 { 2 } else { 1 };
    let ad_action_g = if twisted { None } else { Some(swap01(k)) };
    let g_action = if d % 2 == 1 { ad_action_g.clone() } else { None };
    let name = match d {
        1 => format!("PU_{m}"),
        _ if d == m => format!("SU_{m}"),
        _ => format!("SU_{m}/mu_{q}"),
    };
    let datum = BasedRootDatum::with_extra(t, &format!("d={d}"), vec![unit_vector(m - 1, 0, d as i64)]);
    let frob = if twisted { swap01(k) } else { identity(k) };
    let (rel_g, rel_gp) = if twisted {
        (rel_2bc(n), rel_2bc_companion(n))
    } else {
        (nr_bc(n), nr_b(n))
    };
    let g = side(
        name,
        datum,
        inertia(t, 2),
        nr_bc(n),
        frob.clone(),
        rel_g,
        decl(omega_order, g_action, false),
    );
    let bt = FiniteType::b(n);
    let (gp_name, gp_datum, gp_decl, fixed_label, pi0) = if d % 2 == 1 {
        (
            format!("SO_{}", m + 1),
            BasedRootDatum::adjoint(bt),
            decl(2, ad_action_g.clone(), false),
            format!("Sp_{m}"),
            1,
        )
    } else if q % 2 == 0 {
        (
            format!("Spin_{} x {{+-1}}", m + 1),
            BasedRootDatum::simply_connected(bt),
            decl(2, None, true),
            format!("PSp_{m} x {{+-1}}"),
            2,
        )
    } else {
        (
            format!("Spin_{}", m + 1),
            BasedRootDatum::simply_connected(bt),
            decl(1, None, false),
            format!("PSp_{m}"),
            1,
        )
    };
    let gp = side(gp_name, gp_datum, GaloisAction::trivial(n), nr_b(n), frob, rel_gp, gp_decl);
    let dual_label = match d {
        1 => format!("SL_{m}"),
        _ if d == m => format!("PGL_{m}"),
        _ => format!("SL_{m}/mu_{d}"),
    };
    CatalogEntry {
        family: if twisted { FamilyLabel::TwoBC } else { FamilyLabel::BC },
        n,
        isogeny: format!("d={d}"),
        quasi_split: !twisted,
        splitting: if twisted { "E(2)/F(2)" } else { "E" }.into(),
        companion_split_over: if twisted { "F(2)" } else { "F" }.into(),
        r_options: Vec::new(),
        omega_ad: decl(2, ad_action_g, false),
        dual: dual(dual_label, fixed_label, FiniteType::c(n), pi0, t.dim(), omega_order),
        g,
        companion: gp,
        marked: (0, 0),
        bijection: identity(if twisted { n } else { k }),
        relevance_nontrivial: twisted,
    }
}

/// Unitary groups in odd dimension `2n+1`, variant `d | 2n+1`.
fn unitary_odd(n: usize, d: usize) -> CatalogEntry {
    let m = 2 * n + 1;
    let t = FiniteType::a(m - 1);
    let k = n + 1;
    let q = m / d;
    let name = match d {
        1 => format!("PU_{m}"),
        _ if d == m => format!("SU_{m}"),
        _ => format!("SU_{m}/mu_{q}"),
    };
    let datum = BasedRootDatum::with_extra(t, &format!("d={d}"), vec![unit_vector(m - 1, 0, d as i64)]);
    let g = side(name, datum, inertia(t, 2), nr_cbc(n), identity(k), nr_cbc(n), decl(1, None, false));
    let ct = FiniteType::c(n);
    let gp = side(
        format!("Sp_{}", 2 * n),
        BasedRootDatum::simply_connected(ct),
        GaloisAction::trivial(n),
        nr_c(n),
        identity(k),
        nr_c(n),
        decl(1, None, false),
    );
    let dual_label = if d == 1 { format!("SL_{m}") } else if d == m { format!("PGL_{m}") } else { format!("SL_{m}/mu_{d}") };
    CatalogEntry {
        family: FamilyLabel::CBC,
        n,
        isogeny: format!("d={d}"),
        quasi_split: true,
        splitting: "E".into(),
        companion_split_over: "F".into(),
        r_options: Vec::new(),
        omega_ad: decl(1, None, false),
        dual: dual(dual_label, format!("SO_{m}"), FiniteType::b(n), 1, t.dim(), 1),
        g,
        companion: gp,
        marked: (0, 0),
        bijection: identity(k),
        relevance_nontrivial: false,
    }
}

#[derive(Clone, Copy)]
enum Orth {
    /// `C-B_n`: `D_{n+1}`, relative rank `n`.
    Quasi,
    /// `2C-B_{2n}`: `D_{2n}`.
    Even,
    /// `2C-B_{2n+1}`: `D_{2n+1}`.
    Odd,
}

/// Quaternionic orthogonal families, variant `ad`, `SO*` or `Spin*`.
fn quaternionic(kind: Orth, n: usize, variant: &str) -> CatalogEntry {
    // m = rank of the absolute D type; c = rank of the companion C type
    let (m, c) = match kind {
        Orth::Quasi => (n + 1, n),
        Orth::Even => (2 * n, 2 * n - 1),
        Orth::Odd => (2 * n + 1, 2 * n),
    };
    let t = FiniteType::d(m);
    let nr_g = nr_cb(c);
    let nr_gp = nr_c(c);
    let k = c + 1;
    let (frob, rel_g, rel_gp, fam) = match kind {
        Orth::Quasi => (identity(k), nr_cb(c), nr_c(c), FamilyLabel::CB),
        Orth::Even => (reflection(k), rel_2cb_even(n), rel_2cb_even_companion(n), FamilyLabel::TwoCBEven),
        Orth::Odd => (reflection(k), rel_2cb_odd(n), rel_2cb_odd_companion(n), FamilyLabel::TwoCBOdd),
    };
    let twisted = !matches!(kind, Orth::Quasi);
    let rel_len = rel_g.len();
    let ad_action = if twisted { None } else { Some(reflection(k)) };
    let ct = FiniteType::c(c);
    let bt = FiniteType::b(c);
    let dm = 2 * m;
    let (datum, name, g_decl, gp_datum, gp_name, gp_decl, dual_label, fixed_label, pi0, order) =
        match variant {
            "ad" => (
                BasedRootDatum::adjoint(t),
                format!("PSO*_{dm}"),
                decl(2, ad_action.clone(), false),
                BasedRootDatum::adjoint(ct),
                format!("PSp_{}", 2 * c),
                decl(2, ad_action.clone(), false),
                format!("Spin_{dm}"),
                format!("Spin_{}", 2 * c + 1),
                1,
                2,
            ),
            "SO*" => (
                BasedRootDatum::with_extra(t, "SO*", vec![unit_vector(m, 0, 1)]),
                format!("SO*_{dm}"),
                decl(2, None, false),
                BasedRootDatum::simply_connected(ct),
                format!("Sp_{} x {{+-1}}", 2 * c),
                decl(2, None, true),
                format!("SO_{dm}"),
                format!("O_{}", 2 * c + 1),
                2,
                2,
            ),
            "Spin*" => (
                BasedRootDatum::with_extra(t, "Spin*", Vec::new()),
                format!("Spin*_{dm}"),
                decl(1, None, false),
                BasedRootDatum::simply_connected(ct),
                format!("Sp_{}", 2 * c),
                decl(1, None, false),
                format!("PSO_{dm}"),
                format!("SO_{}", 2 * c + 1),
                1,
                1,
            ),
            other => panic!("unknown quaternionic variant {other}"),
        };
    let g = side(name, datum, inertia(t, 2), nr_g, frob.clone(), rel_g, g_decl);
    let gp = side(gp_name, gp_datum, GaloisAction::trivial(c), nr_gp, frob, rel_gp, gp_decl);
    CatalogEntry {
        family: fam,
        n,
        isogeny: variant.into(),
        quasi_split: !twisted,
        splitting: if twisted { "E(2)/F(2)" } else { "E" }.into(),
        companion_split_over: if twisted { "F(2)" } else { "F" }.into(),
        r_options: Vec::new(),
        omega_ad: decl(2, ad_action, false),
        dual: dual(dual_label, fixed_label, bt, pi0, t.dim(), order),
        g,
        companion: gp,
        marked: (0, 0),
        bijection: identity(rel_len),
        relevance_nontrivial: twisted,
    }
}

fn exceptional_f4(variant: &str) -> CatalogEntry {
    let t = FiniteType::e(6);
    let (datum, name, dual_label) = match variant {
        "ad" => (BasedRootDatum::adjoint(t), "2E6_ad", "E6_sc"),
        _ => (BasedRootDatum::simply_connected(t), "2E6_sc", "E6_ad"),
    };
    let g = side(name.into(), datum, inertia(t, 2), nr_f4_twisted(), identity(5), nr_f4_twisted(), decl(1, None, false));
    let ft = FiniteType::f4();
    let gp = side(
        "F4".into(),
        BasedRootDatum::simply_connected(ft),
        GaloisAction::trivial(4),
        nr_f4(),
        identity(5),
        nr_f4(),
        decl(1, None, false),
    );
    CatalogEntry {
        family: FamilyLabel::F4I,
        n: 4,
        isogeny: variant.into(),
        quasi_split: true,
        splitting: "E".into(),
        companion_split_over: "F".into(),
        r_options: Vec::new(),
        omega_ad: decl(1, None, false),
        dual: dual(dual_label.into(), "F4".into(), ft, 1, t.dim(), 1),
        g,
        companion: gp,
        marked: (0, 0),
        bijection: identity(5),
        relevance_nontrivial: false,
    }
}

/// Galois action for the `r = 6` option: triality inertia, Frobenius a transposition.
pub fn g2_action_r6() -> GaloisAction {
    GaloisAction {
        inertia_gens: vec![FiniteType::d(4).diagram_automorphism(3).unwrap()],
        frobenius: vec![2, 1, 0, 3],
    }
}

fn exceptional_g2(variant: &str) -> CatalogEntry {
    let t = FiniteType::d(4);
    let (datum, name, dual_label) = match variant {
        "ad" => (BasedRootDatum::adjoint(t), "3D4_ad", "Spin_8"),
        _ => (BasedRootDatum::simply_connected(t), "3D4_sc", "PSO_8"),
    };
    let g = side(name.into(), datum, inertia(t, 3), nr_g2_twisted(), identity(3), nr_g2_twisted(), decl(1, None, false));
    let gt = FiniteType::g2();
    let gp = side(
        "G2".into(),
        BasedRootDatum::simply_connected(gt),
        GaloisAction::trivial(2),
        nr_g2(),
        identity(3),
        nr_g2(),
        decl(1, None, false),
    );
    CatalogEntry {
        family: FamilyLabel::G2I,
        n: 2,
        isogeny: variant.into(),
        quasi_split: true,
        splitting: "E'(r)".into(),
        companion_split_over: "F".into(),
        r_options: vec![3, 6],
        omega_ad: decl(1, None, false),
        dual: dual(dual_label.into(), "G2".into(), gt, 1, t.dim(), 1),
        g,
        companion: gp,
        marked: (0, 0),
        bijection: identity(3),
        relevance_nontrivial: false,
    }
}

/// Supported parameter range of `n` for a family, capped by `max_rank`.
pub fn n_range(fam: FamilyLabel, max_rank: usize) -> Vec<usize> {
    let (lo, hi) = match fam {
        FamilyLabel::BC | FamilyLabel::TwoBC | FamilyLabel::CB => (2, max_rank),
        FamilyLabel::CBC => (1, max_rank),
        // absolute ranks 2n and 2n+1 stay within max_rank
        FamilyLabel::TwoCBEven => (2, max_rank / 2),
        FamilyLabel::TwoCBOdd => (1, max_rank.saturating_sub(1) / 2),
        FamilyLabel::F4I => (4, 4),
        FamilyLabel::G2I => (2, 2),
    };
    (lo..=hi).collect()
}

pub fn variants(fam: FamilyLabel, n: usize) -> Vec<String> {
    match fam {
        FamilyLabel::BC | FamilyLabel::TwoBC => divisors(2 * n).iter().map(|d| format!("d={d}")).collect(),
        FamilyLabel::CBC => divisors(2 * n + 1).iter().map(|d| format!("d={d}")).collect(),
        FamilyLabel::CB | FamilyLabel::TwoCBEven | FamilyLabel::TwoCBOdd => {
            vec!["ad".into(), "SO*".into(), "Spin*".into()]
        }
        FamilyLabel::F4I | FamilyLabel::G2I => vec!["ad".into(), "sc".into()],
    }
}

/// Builds one entry; `None` if the parameters are outside the family's range.
pub fn build_entry(fam: FamilyLabel, n: usize, isogeny: &str) -> Option<CatalogEntry> {
    if !variants(fam, n).iter().any(|v| v == isogeny) {
        return None;
    }
    let min_ok = match fam {
        FamilyLabel::CBC | FamilyLabel::TwoCBOdd => n >= 1,
        FamilyLabel::F4I => n == 4,
        FamilyLabel::G2I => n == 2,
        _ => n >= 2,
    };
    if !min_ok {
        return None;
    }
    let d = || isogeny.trim_start_matches("d=").parse::<usize>().ok();
    Some(match fam {
        FamilyLabel::BC => unitary_even(n, d()?, false),
        FamilyLabel::TwoBC => unitary_even(n, d()?, true),
        FamilyLabel::CBC => unitary_odd(n, d()?),
        FamilyLabel::CB => quaternionic(Orth::Quasi, n, isogeny),
        FamilyLabel::TwoCBEven => quaternionic(Orth::Even, n, isogeny),
        FamilyLabel::TwoCBOdd => quaternionic(Orth::Odd, n, isogeny),
        FamilyLabel::F4I => exceptional_f4(isogeny),
        FamilyLabel::G2I => exceptional_g2(isogeny),
    })
}

/// All entries with absolute-rank parameter up to `max_rank`.
pub fn build_all(max_rank: usize) -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for fam in FamilyLabel::ALL {
        for n in n_range(fam, max_rank) {
            for v in variants(fam, n) {
                out.push(build_entry(fam, n, &v).expect("in range"));
            }
        }
    }
    out
}
