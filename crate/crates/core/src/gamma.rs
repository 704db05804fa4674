//! Unramified Weil-Deligne modules and the absolute values of their
//! adjoint L-, epsilon- and gamma-factors, with `psi` of order 0.
//!
//! A summand token `(N, k, n)` stands for the Galois orbit
//! `⊕_ζ (ζ u^k) ⊗ Sym^{n-1}` over the primitive `N`-th roots of unity `ζ`,
//! so every local factor is a rational function of `u = q^{1/2}`.
//! Convention: the line `ker N` of `Sym^{n-1}` has Frobenius eigenvalue
//! `α u^{-(n-1)}`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{cyclotomic, HalfLaurent, RationalFunction};
use crate::catalog::VerifiedEntry;
use crate::rootdata::FiniteType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GammaError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid module: {0}")]
    Invalid(String),
    #[error("s = {0} is not a half-integer")]
    NotHalfInteger(BigRational),
    #[error("gamma factor is singular at s = 0")]
    Singular,
}

/// `(N, k, n)`: Frobenius scalar `ζ_N u^k` (whole Galois orbit), `SL_2`-dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Summand {
    pub zeta_order: u32,
    pub k: i64,
    pub n: u32,
}

impl Summand {
    pub fn dim(&self) -> u64 {
        euler_phi(self.zeta_order) * self.n as u64
    }

    /// `Π_ζ (1 - ζ x)` with `x = u^e`.
    fn orbit_factor(&self, e: i64) -> HalfLaurent {
        let phi = cyclotomic(self.zeta_order, 1);
        let at = if e == 0 {
            HalfLaurent::constant(phi.terms().map(|(_, c)| c.clone()).sum())
        } else {
            phi.substitute_power(e)
        };
        if self.zeta_order == 1 {
            // Phi_1(x) = x - 1
            -&at
        } else {
            at
        }
    }
}

/// The part of the module on which inertia acts nontrivially (tame).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RamifiedPart {
    pub dim: u64,
    pub conductor: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WDModule {
    pub summands: Vec<Summand>,
    pub ramified: RamifiedPart,
}

pub fn euler_phi(n: u32) -> u64 {
    (1..=n).filter(|&k| num_integer::gcd(k, n) == 1).count() as u64
}

impl WDModule {
    pub fn new(summands: Vec<Summand>, ramified: RamifiedPart) -> Result<Self, GammaError> {
        let mut m = WDModule { summands, ramified };
        m.summands.sort();
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), GammaError> {
        if self.ramified.conductor != self.ramified.dim {
            return Err(GammaError::Invalid(format!(
                "tame ramified part needs conductor = dimension, got a = {} for dim {}",
                self.ramified.conductor, self.ramified.dim
            )));
        }
        if let Some(s) = self.summands.iter().find(|s| s.zeta_order == 0 || s.n == 0) {
            return Err(GammaError::Invalid(format!("bad summand {s:?}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> u64 {
        self.summands.iter().map(Summand::dim).sum::<u64>() + self.ramified.dim
    }

    pub fn direct_sum(&self, other: &WDModule) -> WDModule {
        let mut summands = self.summands.clone();
        summands.extend(other.summands.iter().copied());
        summands.sort();
        WDModule {
            summands,
            ramified: RamifiedPart {
                dim: self.ramified.dim + other.ramified.dim,
                conductor: self.ramified.conductor + other.ramified.conductor,
            },
        }
    }

    pub fn unramified_part(&self) -> WDModule {
        WDModule {
            summands: self.summands.clone(),
            ramified: RamifiedPart::default(),
        }
    }

    pub fn with_ramified(&self, dim: u64, conductor: u64) -> Result<WDModule, GammaError> {
        WDModule::new(self.summands.clone(), RamifiedPart { dim, conductor })
    }

    /// Multiply every Frobenius scalar by `q^{-s0}` with `2 s0 = two_s0`.
    pub fn twist(&self, two_s0: i64) -> WDModule {
        WDModule {
            summands: self
                .summands
                .iter()
                .map(|s| Summand {
                    k: s.k - two_s0,
                    ..*s
                })
                .collect(),
            ramified: self.ramified,
        }
    }

    /// JSON or the line format: `N k n` per summand and at most one `ram dim a`.
    pub fn parse(text: &str) -> Result<Self, GammaError> {
        let t = text.trim_start();
        if t.starts_with('{') {
            let m: WDModule = serde_json::from_str(t).map_err(|e| GammaError::Parse {
                line: e.line(),
                msg: e.to_string(),
            })?;
            m.validate()?;
            return Ok(m);
        }
        let mut summands = Vec::new();
        let mut ram: Option<RamifiedPart> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| GammaError::Parse { line: i + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.as_slice() {
                ["ram", d, a] => {
                    if ram.is_some() {
                        return Err(err("more than one ram line".into()));
                    }
                    ram = Some(RamifiedPart {
                        dim: d.parse().map_err(|_| err(format!("bad dimension {d}")))?,
                        conductor: a.parse().map_err(|_| err(format!("bad conductor {a}")))?,
                    });
                }
                [z, k, n] => summands.push(Summand {
                    zeta_order: z.parse().map_err(|_| err(format!("bad root of unity order {z}")))?,
                    k: k.parse().map_err(|_| err(format!("bad exponent {k}")))?,
                    n: n.parse().map_err(|_| err(format!("bad SL_2 dimension {n}")))?,
                }),
                _ => return Err(err(format!("unrecognized line {line:?}"))),
            }
        }
        WDModule::new(summands, ram.unwrap_or_default())
    }
}

impl fmt::Display for WDModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.summands {
            writeln!(f, "{} {} {}", s.zeta_order, s.k, s.n)?;
        }
        if self.ramified.dim > 0 {
            writeln!(f, "ram {} {}", self.ramified.dim, self.ramified.conductor)?;
        }
        Ok(())
    }
}

impl FromStr for WDModule {
    type Err = GammaError;

    fn from_str(s: &str) -> Result<Self, GammaError> {
        WDModule::parse(s)
    }
}

fn two_s(s: &BigRational) -> Result<i64, GammaError> {
    let t = s * BigRational::from_integer(2.into());
    if !t.is_integer() {
        return Err(GammaError::NotHalfInteger(s.clone()));
    }
    t.to_integer()
        .try_into()
        .map_err(|_| GammaError::NotHalfInteger(s.clone()))
}

/// Euler factors `1/L(s, m)` of the unramified summands, one per token.
fn inverse_l_factors(m: &WDModule, two_s: i64) -> Vec<HalfLaurent> {
    m.summands
        .iter()
        .map(|t| t.orbit_factor(t.k - (t.n as i64 - 1) - two_s))
        .collect()
}

/// `L(s, m)`; the ramified part contributes 1. A pole gives an error.
pub fn l_factor(m: &WDModule, s: &BigRational) -> Result<RationalFunction, GammaError> {
    let den = inverse_l_factors(m, two_s(s)?)
        .into_iter()
        .fold(HalfLaurent::one(), |acc, f| &acc * &f);
    RationalFunction::new(HalfLaurent::one(), den).map_err(|_| GammaError::Singular)
}

/// `|epsilon(0, m, psi)| = q^{a/2}`.
pub fn epsilon_abs(m: &WDModule) -> HalfLaurent {
    HalfLaurent::u_pow(m.ramified.conductor as i64)
}

/// `|gamma(0, m, psi)| = |epsilon| L(1, m) / L(0, m)`, cancelling identical
/// vanishing Euler factors between the two L-values.
pub fn gamma_abs_at_zero(m: &WDModule) -> Result<RationalFunction, GammaError> {
    let mut num = inverse_l_factors(m, 0);
    let mut den = inverse_l_factors(m, 2);
    let zero_num: Vec<usize> = (0..num.len()).filter(|&i| num[i].is_zero()).collect();
    let mut zero_den: Vec<usize> = (0..den.len()).filter(|&i| den[i].is_zero()).collect();
    // each vanishing factor of L(1)^{-1} is a pole of L(1); pair it with a zero of L(0)^{-1}
    let cancelled = zero_num.len().min(zero_den.len());
    for &i in zero_num.iter().take(cancelled) {
        num[i] = HalfLaurent::one();
    }
    for i in zero_den.drain(..cancelled) {
        den[i] = HalfLaurent::one();
    }
    if !zero_den.is_empty() {
        return Err(GammaError::Singular);
    }
    let n = num.iter().fold(epsilon_abs(m), |acc, f| &acc * f);
    let d = den.iter().fold(HalfLaurent::one(), |acc, f| &acc * f);
    RationalFunction::new(n, d).map_err(|_| GammaError::Singular)
}

/// `|gamma(0, m)| = q^{a/2} |gamma(0, m^{I_F})|` with `a` the conductor of `m`.
pub fn ramified_split_check(m: &WDModule) -> Result<bool, GammaError> {
    let full = gamma_abs_at_zero(m)?;
    let fixed = gamma_abs_at_zero(&m.unramified_part())?;
    Ok(full == &fixed * &RationalFunction::u_pow(m.ramified.conductor as i64))
}

/// Adjoint module of the principal parameter of a group of type `t`:
/// `(1, 0, 2e + 1)` for each exponent `e`.
pub fn principal_parameter_module(t: &FiniteType) -> WDModule {
    let summands = t
        .exponents()
        .into_iter()
        .map(|e| Summand {
            zeta_order: 1,
            k: 0,
            n: 2 * e + 1,
        })
        .collect();
    let m = WDModule::new(summands, RamifiedPart::default()).expect("unramified");
    debug_assert_eq!(m.dim(), t.dim());
    m
}

/// Principal parameter of `G` through `(G^vee)^{I_F}`, with the ramified
/// complement attached from the catalog.
pub fn principal_module_for_entry(e: &VerifiedEntry) -> Result<WDModule, GammaError> {
    let fixed = principal_parameter_module(&e.dual.fixed_type);
    if fixed.dim() != e.dual.dim_dual_fixed {
        return Err(GammaError::Invalid(format!(
            "{}: fixed part has dimension {} but the catalog says {}",
            e.key(),
            fixed.dim(),
            e.dual.dim_dual_fixed
        )));
    }
    fixed.with_ramified(e.dual.dim_dual - e.dual.dim_dual_fixed, e.dual.artin_conductor)
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaReport {
    pub entry: String,
    pub gamma_g: RationalFunction,
    pub gamma_companion: RationalFunction,
    pub conductor: u64,
    pub split_ok: bool,
    pub companion_ok: bool,
}

/// Both gamma identities for an entry's principal parameter: the ramified
/// split, and the comparison with the companion's principal parameter.
pub fn gamma_check(e: &VerifiedEntry) -> Result<GammaReport, GammaError> {
    let m = principal_module_for_entry(e)?;
    let companion = principal_parameter_module(&e.companion.datum.finite_type);
    let g = gamma_abs_at_zero(&m)?;
    let gc = gamma_abs_at_zero(&companion)?;
    let a = e.dual.artin_conductor;
    Ok(GammaReport {
        entry: e.key(),
        split_ok: ramified_split_check(&m)?,
        companion_ok: g == &gc * &RationalFunction::u_pow(a as i64),
        gamma_g: g,
        gamma_companion: gc,
        conductor: a,
    })
}

/// Whether a rational function has a positive value at `u`.
pub fn positive_at(r: &RationalFunction, u: i64) -> bool {
    r.eval_u(&crate::arith::int(u))
        .map(|v| v > BigRational::zero())
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::catalog::Catalog;

    fn rf(s: &str) -> RationalFunction {
        s.parse().unwrap()
    }

    fn module(s: &str) -> WDModule {
        s.parse().unwrap()
    }

    #[test]
    fn l_factor_examples() {
        assert_eq!(l_factor(&WDModule::default(), &int(0)).unwrap(), RationalFunction::one());
        let m = module("2 0 1");
        assert_eq!(l_factor(&m, &int(0)).unwrap(), RationalFunction::from_rational(rat(1, 2)));
        let st = module("1 0 3");
        // (1 - q^{-1})^{-1} = q/(q - 1)
        assert_eq!(l_factor(&st, &int(0)).unwrap(), rf("(q)/(q - 1)"));
        assert!(l_factor(&st, &rat(1, 3)).is_err());
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_abs_at_zero(&WDModule::default()).unwrap(), RationalFunction::one());
        assert_eq!(gamma_abs_at_zero(&module("1 0 3")).unwrap(), rf("(q)/(q + 1)"));
        assert_eq!(gamma_abs_at_zero(&module("2 0 1")).unwrap(), rf("(2*q)/(q + 1)"));
        // the trivial character: L(0) has a pole, L(1) does not
        assert_eq!(gamma_abs_at_zero(&module("1 0 1")).unwrap(), RationalFunction::zero());
        // a pole of L(1) with nothing to cancel it
        assert_eq!(gamma_abs_at_zero(&module("1 2 1")), Err(GammaError::Singular));
        // ... and with a matching zero of 1/L(0)
        assert!(gamma_abs_at_zero(&module("1 2 1\n1 0 1")).is_ok());
    }

    #[test]
    fn epsilon_and_split() {
        assert_eq!(epsilon_abs(&WDModule::default()), HalfLaurent::one());
        let m = module("1 0 3\n1 0 7\nram 5 5");
        assert_eq!(epsilon_abs(&m), HalfLaurent::u_pow(5));
        assert!(ramified_split_check(&m).unwrap());
        assert!(ramified_split_check(&module("1 0 3")).unwrap());
        let bad = WDModule { summands: vec![], ramified: RamifiedPart { dim: 5, conductor: 4 } };
        assert!(bad.validate().is_err());
        assert!(WDModule::parse("1 0 3\nram 5 4").is_err());
    }

    #[test]
    fn principal_modules() {
        let a1 = principal_parameter_module(&FiniteType::a(1));
        assert_eq!(a1.summands, vec![Summand { zeta_order: 1, k: 0, n: 3 }]);
        let c2 = principal_parameter_module(&FiniteType::c(2));
        assert_eq!(c2, module("1 0 3\n1 0 7"));
        for t in [FiniteType::g2(), FiniteType::f4(), FiniteType::e(6), FiniteType::d(5)] {
            assert_eq!(principal_parameter_module(&t).dim(), t.dim());
        }
    }

    #[test]
    fn galois_orbit_tokens() {
        // the orbit of primitive cube roots: (1 + x + x^2) with x = q^{-s}
        let m = module("3 0 1");
        assert_eq!(m.dim(), 2);
        assert_eq!(l_factor(&m, &int(0)).unwrap(), RationalFunction::from_rational(rat(1, 3)));
        assert!(positive_at(&gamma_abs_at_zero(&m).unwrap(), 2));
    }

    #[test]
    fn round_trips() {
        let m = module("1 0 3\n2 -1 1\n3 2 2\nram 4 4");
        assert_eq!(module(&m.to_string()), m);
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(WDModule::parse(&json).unwrap(), m);
    }

    #[test]
    fn catalog_principal_parameters() {
        let cat = Catalog::global().unwrap();
        for e in cat.entries.iter().filter(|e| e.n <= 3) {
            let r = gamma_check(e).unwrap();
            assert!(r.split_ok && r.companion_ok, "{r:?}");
        }
        let pu4 = cat.lookup("B-C_n", Some(2), "d=1").unwrap();
        let m = principal_module_for_entry(&pu4).unwrap();
        assert_eq!(m.ramified, RamifiedPart { dim: 5, conductor: 5 });
    }
}
