//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p unillc --test acceptance`.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unillc::arith::{HalfLaurent, RationalFunction};
use unillc::catalog::{Catalog, FamilyLabel, SideTag, VerifiedEntry};
use unillc::diagrams::{enumerate_facets, Facet};
use unillc::fdeg::{center_sweep, fdeg_transfer_ratio, maximal_facets, shipped_center_fixtures, volume_ratio};
use unillc::finquot::{check_facet_match, order_poly, TwistedFactor, TwistedFiniteType};
use unillc::gamma::{gamma_abs_at_zero, gamma_check, WDModule};
use unillc::hecke::{
    iwahori_coxeter, iwahori_spec, transfer_check, BasisKey, CoxeterPresentation, HeckeAlgebra,
    HeckeAlgebraSpec, HeckeElement, ParamTables, ParameterTable,
};
use unillc::coxeter::INF;
use unillc::omega::compute_omega;
use unillc::rootdata::{dual_center_invariants_order, FiniteType};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn catalog() -> &'static Catalog {
    Catalog::global().expect("catalog loads")
}

fn up_to(n: usize) -> Vec<&'static std::sync::Arc<VerifiedEntry>> {
    catalog().entries.iter().filter(|e| e.n <= n).collect()
}

// 1
fn catalog_integrity() -> Outcome {
    let cat = Catalog::builtin().map_err(|e| e.to_string())?;
    for e in &cat.entries {
        let om = compute_omega(&e.g.datum, &e.g.action, &e.g.relative, &e.g.omega).map_err(|x| x.to_string())?;
        ensure(om.order() == e.g.omega.order, || format!("{}: computed {} declared {}", e.key(), om.order(), e.g.omega.order))?;
    }
    // orders stated family by family
    let stated = |fam: FamilyLabel, iso: &str| -> Option<u64> {
        match (fam, iso) {
            (FamilyLabel::BC, "d=1") | (FamilyLabel::TwoBC, "d=1") => Some(2),
            (FamilyLabel::CBC, _) => Some(1),
            (FamilyLabel::CB, "ad") | (FamilyLabel::TwoCBEven, "ad") | (FamilyLabel::TwoCBOdd, "ad") => Some(2),
            (FamilyLabel::F4I, _) | (FamilyLabel::G2I, _) => Some(1),
            _ => None,
        }
    };
    let mut pinned = 0;
    for e in &cat.entries {
        if let Some(want) = stated(e.family, &e.isogeny) {
            ensure(e.omega_g.order() == want, || format!("{}: |Omega_G| = {}, stated {want}", e.key(), e.omega_g.order()))?;
            pinned += 1;
        }
    }
    Ok(format!("{} entries, {pinned} against family-level statements", cat.entries.len()))
}

// 2
fn quotient_sweep() -> Outcome {
    let mut cases = 0;
    let mut families = std::collections::BTreeSet::new();
    for e in up_to(4) {
        families.insert(e.family);
        for f in enumerate_facets(&e.g.relative) {
            let r = check_facet_match(e, &f).map_err(|x| x.to_string())?;
            ensure(r.all(), || format!("{} facet {}: {r:?}", e.key(), f.label()))?;
            cases += 1;
        }
    }
    ensure(families.len() == 8, || format!("only {} families", families.len()))?;
    Ok(format!("{cases} facets"))
}

// 3
fn order_oracles() -> Outcome {
    let single = |ftype: FiniteType, twist: u8| TwistedFiniteType {
        factors: vec![TwistedFactor { ftype, twist, orbit_size: 1 }],
        torus_cycles: vec![1],
        rank: ftype.rank,
    };
    let q2 = |t: &TwistedFiniteType| order_poly(t).eval_q(2);
    let t0 = Instant::now();
    let sp4 = common::count_sp4(2);
    let su3 = common::count_su_over_f4(3);
    let oracle_time = t0.elapsed();
    ensure(oracle_time < Duration::from_secs(60), || format!("oracle took {oracle_time:?}"))?;
    let big = |n: u64| BigRational::from_integer(n.into());
    ensure(sp4 == 720 && q2(&single(FiniteType::c(2), 1)) == big(sp4), || format!("Sp_4(2): {sp4}"))?;
    ensure(su3 == 216 && q2(&single(FiniteType::a(2), 2)) == big(su3), || format!("SU_3(2): {su3}"))?;
    Ok(format!("720 and 216 by enumeration in {oracle_time:.2?}"))
}

// 4
fn coxeter_transfer() -> Outcome {
    let params = ParamTables::shipped();
    let entries = up_to(4);
    for e in &entries {
        let a = iwahori_coxeter(&e.g.relative).map_err(|x| x.to_string())?;
        let b = iwahori_coxeter(&e.companion.relative).map_err(|x| x.to_string())?;
        ensure(a.matches_under(&b, &e.bijection), || format!("{}: Coxeter matrices differ", e.key()))?;
        let iw = Facet { j: Default::default() };
        ensure(transfer_check(e, &iw, &params).map_err(|x| x.to_string())?, || format!("{}: parameters differ", e.key()))?;
    }
    Ok(format!("{} Iwahori facets", entries.len()))
}

// 5
fn hecke_kernel() -> Outcome {
    // quadratic relation on every catalog Iwahori algebra up to rank 4
    let mut algebras = Vec::new();
    for e in up_to(4) {
        for side in [SideTag::G, SideTag::Companion] {
            let spec = iwahori_spec(e, side).map_err(|x| x.to_string())?;
            algebras.push((format!("{} {side:?}", e.key()), HeckeAlgebra::new(spec).map_err(|x| x.to_string())?));
        }
    }
    for (name, h) in &algebras {
        for s in 0..h.rank() {
            let n2 = &h.spec.params.n[s] * BigRational::from_integer(2.into());
            let mut want = HeckeElement::zero();
            let exp: i64 = n2.to_integer().try_into().unwrap();
            want.add_term(BasisKey { omega: 0, word: vec![] }, HalfLaurent::u_pow(exp));
            ensure(h.word_product(&[s, s]).unwrap() == want, || format!("{name}: N_s^2 for s = {s}"))?;
        }
    }
    // braid relations, and their absence for m = inf
    for m in [3u32, 4, 6, 0] {
        let mm = if m == 0 { INF } else { m };
        let pres = CoxeterPresentation::new(vec!["s".into(), "t".into()], vec![vec![1, mm], vec![mm, 1]])
            .map_err(|x| x.to_string())?;
        let n = if m == 3 { vec![1, 1] } else { vec![1, 2] };
        let params = ParameterTable { n: n.into_iter().map(|x: i64| BigRational::from_integer(x.into())).collect() };
        let h = HeckeAlgebra::new(HeckeAlgebraSpec::new(pres, params, Vec::new()).map_err(|x| x.to_string())?)
            .map_err(|x| x.to_string())?;
        let alt = |start: usize, len: usize| -> Vec<usize> { (0..len).map(|i| (start + i) % 2).collect() };
        if m == 0 {
            for len in 1..=8 {
                ensure(h.word_product(&alt(0, len)).unwrap() != h.word_product(&alt(1, len)).unwrap(), || {
                    format!("m = inf: braid of length {len} holds")
                })?;
            }
        } else {
            let len = m as usize;
            ensure(h.word_product(&alt(0, len)).unwrap() == h.word_product(&alt(1, len)).unwrap(), || {
                format!("m = {m}: braid fails")
            })?;
        }
    }
    // associativity on random triples, with the Omega-extension in play
    let mut rng = ChaCha8Rng::seed_from_u64(500);
    let with_ext: Vec<&(String, HeckeAlgebra)> = algebras.iter().filter(|(_, h)| h.spec.omega_ext.len() > 1).collect();
    for trial in 0..500 {
        let (name, h) = if trial % 2 == 0 && !with_ext.is_empty() {
            with_ext[rng.gen_range(0..with_ext.len())]
        } else {
            &algebras[rng.gen_range(0..algebras.len())]
        };
        let mut random = || -> HeckeElement {
            let len = rng.gen_range(0..=6);
            let w: Vec<usize> = (0..len).map(|_| rng.gen_range(0..h.rank())).collect();
            h.basis_ext(rng.gen_range(0..h.spec.omega_ext.len()), &w).unwrap()
        };
        let (a, b, c) = (random(), random(), random());
        let left = h.mul(&h.mul(&a, &b).unwrap(), &c).unwrap();
        let right = h.mul(&a, &h.mul(&b, &c).unwrap()).unwrap();
        ensure(left == right, || format!("{name}: associativity fails on trial {trial}"))?;
        // q^N -> 1 leaves a single coefficient 1
        let sp = h.specialize_at_one(&left);
        ensure(sp.len() == 1 && sp.values().all(|v| *v == BigRational::from_integer(1.into())), || {
            format!("{name}: specialization is not 0/1")
        })?;
    }
    Ok(format!("{} algebras, 500 triples", algebras.len()))
}

// 6
fn volumes_and_fdeg() -> Outcome {
    let (mut vols, mut fdegs) = (0, 0);
    for e in up_to(4) {
        let a = e.dual.artin_conductor as i64;
        for f in enumerate_facets(&e.g.relative) {
            let r = volume_ratio(e, &f).map_err(|x| x.to_string())?;
            ensure(r == RationalFunction::u_pow(a), || format!("{} facet {}: vol ratio {r}", e.key(), f.label()))?;
            vols += 1;
        }
        for f in maximal_facets(e) {
            let r = fdeg_transfer_ratio(e, &f, 1).map_err(|x| x.to_string())?;
            ensure(r == RationalFunction::u_pow(-a), || format!("{} facet {}: fdeg ratio {r}", e.key(), f.label()))?;
            fdegs += 1;
        }
    }
    Ok(format!("{vols} volume identities, {fdegs} formal degree transfers"))
}

// 7
fn gamma_split() -> Outcome {
    let st: WDModule = "1 0 3".parse().map_err(|e: unillc::gamma::GammaError| e.to_string())?;
    let anchor = gamma_abs_at_zero(&st).map_err(|x| x.to_string())?;
    let want: RationalFunction = "(q)/(q + 1)".parse().map_err(|_| "anchor literal".to_string())?;
    ensure(anchor == want, || format!("Steinberg of PGL_2: {anchor}"))?;
    let entries = up_to(3);
    for e in &entries {
        let r = gamma_check(e).map_err(|x| x.to_string())?;
        ensure(r.split_ok && r.companion_ok, || format!("{}: {r:?}", e.key()))?;
    }
    Ok(format!("{} principal parameters, anchor q/(q+1)", entries.len()))
}

// 8
fn center_duality() -> Outcome {
    for e in &catalog().entries {
        let z = dual_center_invariants_order(&e.g.datum, &e.g.action).map_err(|x| x.to_string())?;
        ensure(z == e.omega_g.order() && z == e.dual.center_invariants_order, || {
            format!("{}: |Z^I_Frob| = {z}, |Omega_G| = {}", e.key(), e.omega_g.order())
        })?;
    }
    Ok(format!("{} entries", catalog().entries.len()))
}

// 9
fn center_fixtures() -> Outcome {
    let fixtures = shipped_center_fixtures();
    let reports = center_sweep(&fixtures, catalog()).map_err(|x| x.to_string())?;
    for r in &reports {
        ensure(r.ok(), || format!("{r:?}"))?;
    }
    let exceptional = fixtures.iter().filter(|f| f.kernel_order == 2).count();
    ensure(exceptional >= 2, || format!("only {exceptional} fixtures with kernel of order 2"))?;
    Ok(format!("{} fixtures, {} facet reports, {exceptional} with kernel of order 2", fixtures.len(), reports.len()))
}

// 10
fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_unillc"))
            .args(["verify", "all", "--max-rank", "3", "--json"])
            .env_remove("UNILLC_CATALOG")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.code() == Some(0), || format!("exit code {:?}", a.status.code()))?;
    ensure(a.stdout == b.stdout, || "reports differ".into())?;
    Ok(format!("{} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("catalog integrity", Duration::from_secs(1), catalog_integrity),
        ("reductive quotient sweep, ranks <= 4", Duration::from_secs(30), quotient_sweep),
        ("order polynomials vs enumeration", Duration::from_secs(60), order_oracles),
        ("Coxeter transfer, Iwahori facets", Duration::from_secs(5), coxeter_transfer),
        ("Hecke algebra kernel", Duration::from_secs(60), hecke_kernel),
        ("volume ratio and formal degree transfer", Duration::from_secs(10), volumes_and_fdeg),
        ("gamma factor ramified split", Duration::from_secs(5), gamma_split),
        ("center of the dual group vs Omega", Duration::from_secs(1), center_duality),
        ("center fixtures", Duration::from_secs(5), center_fixtures),
        ("determinism of verify reports", Duration::from_secs(120), determinism),
    ];
    // the shared catalog is loaded outside the timed sections
    let _ = catalog();
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = run();
        let dt = t.elapsed();
        let res = res.and_then(|d| if dt <= *budget { Ok(d) } else { Err(format!("{d}; over budget {budget:?}")) });
        match res {
            Ok(d) => println!("PASS {:>2} {name} ({dt:.2?}): {d}", i + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({dt:.2?}): {d}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
