//! The ramified simple groups with their companions, as self-verifying data.
//!
//! The canonical dataset `data/catalog.v1.json` is generated from [`build`]
//! and embedded in the binary. Every entry is re-checked when loaded.

pub mod build;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::diagrams::{
    diagram_isomorphic_up_to_arrows, fold, AffineDiagram, Facet, Folded, LocalIndex,
};
use crate::omega::{
    check_action_through_adjoint, compute_omega, equivariant_isomorphism, isogeny_kernel_image,
    KernelImage, OmegaDecl, OmegaError, OmegaGroup,
};
use crate::rootdata::{
    check_diagram_automorphism, dual_center_invariants_order, BasedRootDatum, FiniteType,
    GaloisAction,
};

pub const CATALOG_VERSION: u32 = 1;
pub const BUILTIN_JSON: &str = include_str!("../../data/catalog.v1.json");
pub const BUILTIN_SHA256: &str = include_str!("../../data/catalog.v1.sha256");
/// Environment variable naming an alternative catalog file.
pub const CATALOG_ENV: &str = "UNILLC_CATALOG";
pub const DEFAULT_MAX_RANK: usize = 8;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown family label {0:?}")]
    UnknownLabel(String),
    #[error("{label} has no entry with n = {n}, isogeny {isogeny:?}")]
    OutOfRange {
        label: String,
        n: usize,
        isogeny: String,
    },
    #[error("integrity check failed for {entry}: {msg}")]
    Integrity { entry: String, msg: String },
    #[error("catalog version {0} is not supported")]
    Version(u32),
    #[error("catalog JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("reading catalog: {0}")]
    Io(#[from] std::io::Error),
    #[error("parabolic subset contains the marked vertex {0}")]
    MarkedInParabolic(usize),
    #[error("{0}")]
    Other(String),
}

/// The eight local index names of the ramified simple groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilyLabel {
    BC,
    CBC,
    CB,
    TwoBC,
    TwoCBEven,
    TwoCBOdd,
    F4I,
    G2I,
}

impl FamilyLabel {
    pub const ALL: [FamilyLabel; 8] = [
        FamilyLabel::BC,
        FamilyLabel::CBC,
        FamilyLabel::CB,
        FamilyLabel::TwoBC,
        FamilyLabel::TwoCBEven,
        FamilyLabel::TwoCBOdd,
        FamilyLabel::F4I,
        FamilyLabel::G2I,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyLabel::BC => "B-C_n",
            FamilyLabel::CBC => "C-BC_n",
            FamilyLabel::CB => "C-B_n",
            FamilyLabel::TwoBC => "2B-C_n",
            FamilyLabel::TwoCBEven => "2C-B_2n",
            FamilyLabel::TwoCBOdd => "2C-B_2n+1",
            FamilyLabel::F4I => "F4^I",
            FamilyLabel::G2I => "G2^I",
        }
    }

    pub fn quasi_split(self) -> bool {
        !matches!(
            self,
            FamilyLabel::TwoBC | FamilyLabel::TwoCBEven | FamilyLabel::TwoCBOdd
        )
    }
}

impl fmt::Display for FamilyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyLabel {
    type Err = CatalogError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .replace('²', "2")
            .replace('−', "-")
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '{' && *c != '}')
            .collect::<String>()
            .to_ascii_lowercase();
        let hit = FamilyLabel::ALL.into_iter().find(|f| {
            let n = f.name().to_ascii_lowercase();
            norm == n || norm == n.replace("_2n+1", "_odd").replace("_2n", "_even") || norm == n.trim_end_matches("_n")
        });
        hit.or(match norm.as_str() {
            "f4i" | "f4" => Some(FamilyLabel::F4I),
            "g2i" | "g2" => Some(FamilyLabel::G2I),
            _ => None,
        })
        .ok_or_else(|| CatalogError::UnknownLabel(s.to_string()))
    }
}

impl Serialize for FamilyLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for FamilyLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Data of one of the two groups in an entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    pub name: String,
    pub datum: BasedRootDatum,
    pub action: GaloisAction,
    pub local_index: LocalIndex,
    pub relative: AffineDiagram,
    pub omega: OmegaDecl,
    pub dim: u64,
}

/// Invariants of the complex dual group under inertia.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualGroupData {
    pub dual_label: String,
    pub fixed_label: String,
    /// Type of the identity component of `(G^v)^{I_F}`.
    pub fixed_type: FiniteType,
    pub fixed_pi0: u32,
    pub dim_dual: u64,
    pub dim_dual_fixed: u64,
    pub center_invariants_order: u64,
    pub artin_conductor: u64,
    pub tame: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub family: FamilyLabel,
    pub n: usize,
    pub isogeny: String,
    pub quasi_split: bool,
    pub splitting: String,
    pub companion_split_over: String,
    /// Galois degrees allowed for the splitting field (`G2^I` only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub r_options: Vec<u32>,
    pub g: Side,
    pub companion: Side,
    /// Declared `Omega` of the adjoint group in the isogeny class.
    pub omega_ad: OmegaDecl,
    /// Marked special vertices of the two relative diagrams.
    pub marked: (usize, usize),
    /// Relative node bijection `Delta_aff -> Delta'_aff`.
    pub bijection: Vec<usize>,
    pub dual: DualGroupData,
    pub relevance_nontrivial: bool,
}

impl CatalogEntry {
    pub fn key(&self) -> String {
        format!("{} n={} {}", self.family, self.n, self.isogeny)
    }

    pub fn rel_len(&self) -> usize {
        self.g.relative.len()
    }
}

/// Which of the two groups of an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideTag {
    G,
    Companion,
}

impl std::str::FromStr for SideTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "G" | "g" => Ok(SideTag::G),
            "companion" | "G'" => Ok(SideTag::Companion),
            _ => Err(format!("unknown side {s}")),
        }
    }
}

/// An entry together with everything computed while verifying it.
#[derive(Debug, Clone)]
pub struct VerifiedEntry {
    pub entry: CatalogEntry,
    pub folded_g: Folded,
    pub folded_companion: Folded,
    pub omega_g: OmegaGroup,
    pub omega_companion: OmegaGroup,
    pub omega_ad: OmegaGroup,
    pub kernel_image: KernelImage,
    /// `Omega_G -> Omega_{G'}` compatible with the node bijection.
    pub omega_iso: Vec<usize>,
}

impl std::ops::Deref for VerifiedEntry {
    type Target = CatalogEntry;
    fn deref(&self) -> &CatalogEntry {
        &self.entry
    }
}

impl VerifiedEntry {
    pub fn side(&self, s: SideTag) -> &Side {
        match s {
            SideTag::G => &self.g,
            SideTag::Companion => &self.companion,
        }
    }

    pub fn folded(&self, s: SideTag) -> &Folded {
        match s {
            SideTag::G => &self.folded_g,
            SideTag::Companion => &self.folded_companion,
        }
    }

    pub fn omega(&self, s: SideTag) -> &OmegaGroup {
        match s {
            SideTag::G => &self.omega_g,
            SideTag::Companion => &self.omega_companion,
        }
    }

    /// Artin conductor of the dual Lie algebra: `a` for `G`, zero for the companion.
    pub fn conductor(&self, s: SideTag) -> u64 {
        match s {
            SideTag::G => self.dual.artin_conductor,
            SideTag::Companion => 0,
        }
    }

    /// `dim (G^vee)^{I_F}`; the companion is split over `F_nr`.
    pub fn dim_dual_fixed(&self, s: SideTag) -> u64 {
        match s {
            SideTag::G => self.dual.dim_dual_fixed,
            SideTag::Companion => self.companion.dim,
        }
    }
}

fn integrity(e: &CatalogEntry, msg: impl Into<String>) -> CatalogError {
    CatalogError::Integrity {
        entry: e.key(),
        msg: msg.into(),
    }
}

fn omega_err(e: &CatalogEntry, err: OmegaError) -> CatalogError {
    integrity(e, err.to_string())
}

fn check_side(e: &CatalogEntry, s: &Side) -> Result<Folded, CatalogError> {
    s.datum
        .validate()
        .map_err(|x| integrity(e, format!("{}: {x}", s.name)))?;
    let t = &s.datum.finite_type;
    for p in s.action.inertia_gens.iter().chain([&s.action.frobenius]) {
        check_diagram_automorphism(t, p).map_err(|x| integrity(e, x.to_string()))?;
    }
    if s.dim != t.dim() {
        return Err(integrity(e, format!("{}: dim {} but type gives {}", s.name, s.dim, t.dim())));
    }
    let li = LocalIndex::new(s.local_index.diagram.clone(), s.local_index.frob.clone())
        .map_err(|x| integrity(e, x.to_string()))?;
    if !li.diagram.is_connected() {
        return Err(integrity(e, format!("{}: disconnected diagram", s.name)));
    }
    let folded = fold(&li).map_err(|x| integrity(e, format!("{}: {x}", s.name)))?;
    if folded.diagram != s.relative {
        return Err(integrity(
            e,
            format!(
                "{}: folded diagram\n{}differs from the tabulated one\n{}",
                s.name, folded.diagram, s.relative
            ),
        ));
    }
    Ok(folded)
}

/// Runs every integrity check on an entry.
pub fn verify_entry(e: &CatalogEntry) -> Result<VerifiedEntry, CatalogError> {
    let folded_g = check_side(e, &e.g)?;
    let folded_companion = check_side(e, &e.companion)?;

    let omega_g = compute_omega(&e.g.datum, &e.g.action, &e.g.relative, &e.g.omega)
        .map_err(|x| omega_err(e, x))?;
    let omega_companion = compute_omega(
        &e.companion.datum,
        &e.companion.action,
        &e.companion.relative,
        &e.companion.omega,
    )
    .map_err(|x| omega_err(e, x))?;
    let ad = BasedRootDatum::adjoint(e.g.datum.finite_type);
    let omega_ad = compute_omega(&ad, &e.g.action, &e.g.relative, &e.omega_ad)
        .map_err(|x| omega_err(e, x))?;
    let kernel_image = isogeny_kernel_image(&omega_g, &omega_ad).map_err(|x| omega_err(e, x))?;
    check_action_through_adjoint(&omega_g, &omega_ad, &kernel_image)
        .map_err(|x| omega_err(e, x))?;

    // the Galois options for G2^I give the same Omega
    if e.r_options.contains(&6) {
        let alt = build::g2_action_r6();
        let om6 = compute_omega(&e.g.datum, &alt, &e.g.relative, &e.g.omega)
            .map_err(|x| omega_err(e, x))?;
        if om6.group != omega_g.group {
            return Err(integrity(e, "r = 6 action changes Omega"));
        }
    }

    // bijection of relative diagrams, anchored at the marked vertices
    let (rg, rc) = (&e.g.relative, &e.companion.relative);
    let n = rg.len();
    let bij = &e.bijection;
    if bij.len() != n || rc.len() != n || bij.iter().collect::<BTreeSet<_>>().len() != n {
        return Err(integrity(e, "bijection is not a bijection of relative nodes"));
    }
    if bij[e.marked.0] != e.marked.1 {
        return Err(integrity(e, "bijection does not match the marked vertices"));
    }
    if !rg.special.contains(&e.marked.0) || !rc.special.contains(&e.marked.1) {
        return Err(integrity(e, "marked vertices are not flagged special"));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rg.bonds(a, b) != rc.bonds(bij[a], bij[b]) {
                return Err(integrity(e, format!("bijection breaks the bond {a}-{b}")));
            }
        }
    }
    if diagram_isomorphic_up_to_arrows(rg, rc, true).is_none() {
        return Err(integrity(e, "relative diagrams are not isomorphic up to arrows"));
    }
    let omega_iso = equivariant_isomorphism(&omega_g, &omega_companion, bij)
        .ok_or_else(|| integrity(e, "no Omega-equivariant identification with the companion"))?;

    check_dual(e, &omega_g)?;
    if e.relevance_nontrivial == e.quasi_split || e.quasi_split != e.family.quasi_split() {
        return Err(integrity(e, "relevance flag disagrees with quasi-splitness"));
    }

    Ok(VerifiedEntry {
        entry: e.clone(),
        folded_g,
        folded_companion,
        omega_g,
        omega_companion,
        omega_ad,
        kernel_image,
        omega_iso,
    })
}

fn check_dual(e: &CatalogEntry, omega_g: &OmegaGroup) -> Result<(), CatalogError> {
    let d = &e.dual;
    if !d.tame {
        return Err(integrity(e, "wildly ramified entries are not supported"));
    }
    if d.dim_dual != e.g.dim {
        return Err(integrity(e, "dim G^v differs from dim G"));
    }
    if d.dim_dual_fixed != d.fixed_type.dim() {
        return Err(integrity(e, "fixed-group dimension disagrees with its type"));
    }
    // the companion's dual group is the inertia-fixed group
    let cd = e.companion.datum.finite_type;
    if d.dim_dual_fixed != cd.dim() || d.fixed_type.up_to_arrows() != cd.up_to_arrows() {
        return Err(integrity(e, "(G^v)^I does not match the companion's dual group"));
    }
    let pi0_expected = if e.companion.omega.sign_factor { 2 } else { 1 };
    if d.fixed_pi0 != pi0_expected {
        return Err(integrity(e, "pi_0 of (G^v)^I does not match the sign factor"));
    }
    if d.artin_conductor != d.dim_dual - d.dim_dual_fixed || d.artin_conductor == 0 {
        return Err(integrity(e, "Artin conductor violates the tame rule"));
    }
    let center = dual_center_invariants_order(&e.g.datum, &e.g.action)
        .map_err(|x| integrity(e, x.to_string()))?;
    if center != d.center_invariants_order || center != omega_g.order() {
        return Err(integrity(
            e,
            format!(
                "|Z(G^v)^I_Frob| = {center}, stored {}, |Omega_G| = {}",
                d.center_invariants_order,
                omega_g.order()
            ),
        ));
    }
    let zc = dual_center_invariants_order(
        &e.companion.datum,
        &GaloisAction::trivial(cd.rank),
    )
    .map_err(|x| integrity(e, x.to_string()))?
        * pi0_expected as u64;
    if zc != e.companion.omega.order {
        return Err(integrity(e, "|Z(G'^v)| differs from |Omega_G'|"));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
struct CatalogFile {
    version: u32,
    entries: Vec<CatalogEntry>,
}

/// A loaded and verified catalog.
#[derive(Debug)]
pub struct Catalog {
    pub entries: Vec<Arc<VerifiedEntry>>,
    pub sha256: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Serializes entries in the canonical layout: one entry per line.
pub fn to_json(entries: &[CatalogEntry]) -> String {
    let mut s = format!("{{\"version\":{CATALOG_VERSION},\"entries\":[\n");
    let lines: Vec<String> = entries
        .iter()
        .map(|e| serde_json::to_string(e).expect("entries serialize"))
        .collect();
    s.push_str(&lines.join(",\n"));
    s.push_str("\n]}\n");
    s
}

impl Catalog {
    pub fn from_json(text: &str) -> Result<Self, CatalogError> {
        let file: CatalogFile = serde_json::from_str(text)?;
        if file.version != CATALOG_VERSION {
            return Err(CatalogError::Version(file.version));
        }
        let entries = file
            .entries
            .iter()
            .map(|e| verify_entry(e).map(Arc::new))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            entries,
            sha256: sha256_hex(text.as_bytes()),
        })
    }

    pub fn load(path: &Path) -> Result<Self, CatalogError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The embedded catalog, checked against its recorded checksum.
    pub fn builtin() -> Result<Self, CatalogError> {
        let sum = sha256_hex(BUILTIN_JSON.as_bytes());
        if sum != BUILTIN_SHA256.trim() {
            return Err(CatalogError::Other(format!(
                "embedded catalog checksum {sum} does not match the recorded one"
            )));
        }
        Self::from_json(BUILTIN_JSON)
    }

    /// Process-wide catalog: the file named by `UNILLC_CATALOG`, else the embedded one.
    pub fn global() -> Result<&'static Catalog, &'static CatalogError> {
        static CELL: OnceLock<Result<Catalog, CatalogError>> = OnceLock::new();
        CELL.get_or_init(|| match std::env::var_os(CATALOG_ENV) {
            Some(p) => Catalog::load(Path::new(&p)),
            None => Catalog::builtin(),
        })
        .as_ref()
    }

    pub fn lookup(
        &self,
        label: &str,
        n: Option<usize>,
        isogeny: &str,
    ) -> Result<Arc<VerifiedEntry>, CatalogError> {
        let fam: FamilyLabel = label.parse()?;
        let n = n.unwrap_or(match fam {
            FamilyLabel::F4I => 4,
            FamilyLabel::G2I => 2,
            _ => 0,
        });
        let iso = normalize_isogeny(isogeny);
        self.entries
            .iter()
            .find(|e| e.family == fam && e.n == n && e.isogeny == iso)
            .cloned()
            .ok_or(CatalogError::OutOfRange {
                label: fam.name().into(),
                n,
                isogeny: iso,
            })
    }

    pub fn family(&self, fam: FamilyLabel) -> impl Iterator<Item = &Arc<VerifiedEntry>> {
        self.entries.iter().filter(move |e| e.family == fam)
    }
}

fn normalize_isogeny(s: &str) -> String {
    let t = s.trim();
    match t {
        "adjoint" => "ad".into(),
        "simply-connected" | "simply_connected" => "sc".into(),
        "SO" | "so*" => "SO*".into(),
        "Spin" | "spin*" => "Spin*".into(),
        _ if t.chars().all(|c| c.is_ascii_digit()) && !t.is_empty() => format!("d={t}"),
        _ => t.into(),
    }
}

/// Image of a facet under the marked-vertex-anchored bijection.
pub fn facet_transfer(e: &CatalogEntry, f: &Facet) -> Facet {
    Facet {
        j: f.j.iter().map(|&x| e.bijection[x]).collect(),
    }
}

pub fn facet_transfer_inverse(e: &CatalogEntry, f: &Facet) -> Facet {
    let inv = |y: usize| e.bijection.iter().position(|&x| x == y).expect("bijection");
    Facet {
        j: f.j.iter().map(|&y| inv(y)).collect(),
    }
}

/// `P -> P'` on standard parabolics, as subsets of `Delta = Delta_aff \ {marked}`.
pub fn parabolic_transfer(
    e: &CatalogEntry,
    s: &BTreeSet<usize>,
) -> Result<BTreeSet<usize>, CatalogError> {
    if s.contains(&e.marked.0) {
        return Err(CatalogError::MarkedInParabolic(e.marked.0));
    }
    if let Some(&x) = s.iter().find(|&&x| x >= e.rel_len()) {
        return Err(CatalogError::Other(format!("node {x} out of range")));
    }
    Ok(s.iter().map(|&x| e.bijection[x]).collect())
}

/// Returns the stored dual data after recomputing the checked identities.
pub fn dual_invariants(e: &CatalogEntry) -> Result<DualGroupData, CatalogError> {
    let omega = compute_omega(&e.g.datum, &e.g.action, &e.g.relative, &e.g.omega)
        .map_err(|x| omega_err(e, x))?;
    check_dual(e, &omega)?;
    Ok(e.dual.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builder_entries_verify() {
        for e in build::build_all(5) {
            verify_entry(&e).unwrap_or_else(|x| panic!("{x}"));
        }
    }

    /// Set `UNILLC_REGEN=1` to rewrite the shipped dataset and checksum.
    #[test]
    fn shipped_json_matches_builder() {
        let json = to_json(&build::build_all(DEFAULT_MAX_RANK));
        if std::env::var_os("UNILLC_REGEN").is_some() {
            let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
            std::fs::write(format!("{dir}/catalog.v1.json"), &json).unwrap();
            std::fs::write(format!("{dir}/catalog.v1.sha256"), sha256_hex(json.as_bytes()) + "\n")
                .unwrap();
            return;
        }
        assert!(json == BUILTIN_JSON, "data/catalog.v1.json is stale; rerun with UNILLC_REGEN=1");
        assert_eq!(sha256_hex(BUILTIN_JSON.as_bytes()), BUILTIN_SHA256.trim());
    }

    #[test]
    fn label_parsing() {
        assert_eq!("B-C_n".parse::<FamilyLabel>().unwrap(), FamilyLabel::BC);
        assert_eq!("²B-C_n".parse::<FamilyLabel>().unwrap(), FamilyLabel::TwoBC);
        assert_eq!("2C-B_2n+1".parse::<FamilyLabel>().unwrap(), FamilyLabel::TwoCBOdd);
        assert_eq!("2C-B_odd".parse::<FamilyLabel>().unwrap(), FamilyLabel::TwoCBOdd);
        assert_eq!("F4^I".parse::<FamilyLabel>().unwrap(), FamilyLabel::F4I);
        assert!("X-Y".parse::<FamilyLabel>().is_err());
    }
}
