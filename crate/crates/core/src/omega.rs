//! The Kottwitz group `Omega_G` with its action on the relative local Dynkin
//! diagram, facet stabilizers, and the map to the adjoint group.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::diagrams::{AffineDiagram, Facet};
use crate::rootdata::{
    invariants_coinvariants, structure_from_torsion_counts, BasedRootDatum, FiniteAbelianGroup,
    GaloisAction, KottwitzQuotient, RootDataError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OmegaError {
    #[error("integrity: {0}")]
    Integrity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    RootData(#[from] RootDataError),
}

/// Declared order and diagram action of `Omega_G`, as catalog data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct OmegaDecl {
    pub order: u64,
    /// Action of a generator on the relative nodes; `None` means trivial.
    pub generator_action: Option<Vec<usize>>,
    /// Extra `{+-1}` factor acting trivially (disconnected companions).
    #[serde(default)]
    pub sign_factor: bool,
}

/// `Omega_G` as an explicit list of elements with permutations of `Delta_aff`.
#[derive(Debug, Clone)]
pub struct OmegaGroup {
    pub group: FiniteAbelianGroup,
    component_orders: Vec<i64>,
    pub elements: Vec<Vec<i64>>,
    /// Coweight-lattice representatives; `None` on the sign factor.
    pub representatives: Vec<Option<Vec<i64>>>,
    pub perms: Vec<Vec<usize>>,
    quotient: KottwitzQuotient,
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

fn perm_power(p: &[usize], k: usize) -> Vec<usize> {
    let mut r: Vec<usize> = (0..p.len()).collect();
    for _ in 0..k {
        r = compose(p, &r);
    }
    r
}

impl OmegaGroup {
    /// Attach a declared cyclic diagram action to the lattice-computed group.
    pub fn from_quotient(
        quotient: KottwitzQuotient,
        generator_action: Option<&[usize]>,
        n_nodes: usize,
    ) -> Result<Self, OmegaError> {
        let orders = quotient.component_orders();
        let elements = quotient.elements.clone();
        let representatives = quotient.representatives.iter().cloned().map(Some).collect();
        let group = quotient.group.clone();
        let id: Vec<usize> = (0..n_nodes).collect();
        let gen = generator_action.map(<[usize]>::to_vec).unwrap_or_else(|| id.clone());
        if gen.len() != n_nodes {
            return Err(OmegaError::Integrity("action has wrong size".into()));
        }
        let size = elements.len();
        if perm_power(&gen, size) != id {
            return Err(OmegaError::Integrity(
                "generator action order does not divide |Omega|".into(),
            ));
        }
        let mut om = Self {
            group,
            component_orders: orders,
            elements,
            representatives,
            perms: Vec::new(),
            quotient,
        };
        let g = (0..size)
            .find(|&i| om.element_order(i) == size as u64)
            .ok_or_else(|| OmegaError::Unsupported("non-cyclic Omega with a diagram action".into()))?;
        let mut perms = vec![Vec::new(); size];
        let mut x = om.identity_index();
        for k in 0..size {
            perms[x] = perm_power(&gen, k);
            x = om.add(x, g);
        }
        om.perms = perms;
        Ok(om)
    }

    /// Product with a `Z/2` acting trivially on the diagram.
    pub fn with_sign_factor(&self) -> Self {
        let mut elements = Vec::new();
        let mut reps = Vec::new();
        let mut perms = Vec::new();
        for s in 0..2 {
            for (i, e) in self.elements.iter().enumerate() {
                let mut v = e.clone();
                v.push(s);
                elements.push(v);
                reps.push(if s == 0 { self.representatives[i].clone() } else { None });
                perms.push(self.perms[i].clone());
            }
        }
        let mut orders = self.component_orders.clone();
        orders.push(2);
        let mut f = self.group.invariant_factors.clone();
        f.push(2);
        Self {
            group: FiniteAbelianGroup::from_orders(&f),
            component_orders: orders,
            elements,
            representatives: reps,
            perms,
            quotient: self.quotient.clone(),
        }
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn n_nodes(&self) -> usize {
        self.perms.first().map_or(0, Vec::len)
    }

    pub fn identity_index(&self) -> usize {
        self.index_of(&vec![0; self.component_orders.len()]).expect("identity present")
    }

    pub fn index_of(&self, c: &[i64]) -> Option<usize> {
        self.elements.iter().position(|e| e == c)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let c: Vec<i64> = self.elements[a]
            .iter()
            .zip(&self.elements[b])
            .zip(&self.component_orders)
            .map(|((x, y), d)| (x + y).rem_euclid(*d))
            .collect();
        self.index_of(&c).expect("Omega is closed under addition")
    }

    pub fn element_order(&self, a: usize) -> u64 {
        let id = self.identity_index();
        let mut x = a;
        let mut k = 1;
        while x != id {
            x = self.add(x, a);
            k += 1;
        }
        k
    }

    /// Group structure of a subset closed under addition.
    pub fn subgroup_structure(&self, idx: &[usize]) -> FiniteAbelianGroup {
        let n = idx.len() as u64;
        structure_from_torsion_counts(n, |k| {
            idx.iter()
                .filter(|&&i| {
                    self.elements[i]
                        .iter()
                        .zip(&self.component_orders)
                        .all(|(x, d)| (x * k as i64) % d == 0)
                })
                .count() as u64
        })
    }

    /// Checks closure, the homomorphism property and that every image is a
    /// diagram automorphism of `rel`.
    pub fn check(&self, rel: &AffineDiagram) -> Result<(), OmegaError> {
        for (i, p) in self.perms.iter().enumerate() {
            if !rel.is_automorphism(p) {
                return Err(OmegaError::Integrity(format!(
                    "element {:?} acts by non-automorphism {p:?}",
                    self.elements[i]
                )));
            }
        }
        for a in 0..self.elements.len() {
            for b in 0..self.elements.len() {
                if self.perms[self.add(a, b)] != compose(&self.perms[a], &self.perms[b]) {
                    return Err(OmegaError::Integrity("action is not a homomorphism".into()));
                }
            }
        }
        Ok(())
    }

    /// `(Omega_{G,f}, Omega_{G,f,tor})` as element indices: the setwise
    /// stabilizer of `J`, and the pointwise stabilizer of the vertices of `f`.
    pub fn facet_stabilizers(&self, f: &Facet) -> (Vec<usize>, Vec<usize>) {
        let n = self.n_nodes();
        let verts = f.complement(n);
        let mut set = Vec::new();
        let mut tor = Vec::new();
        for (i, p) in self.perms.iter().enumerate() {
            let image: BTreeSet<usize> = f.j.iter().map(|&x| p[x]).collect();
            if image == f.j {
                set.push(i);
            }
            if verts.iter().all(|&v| p[v] == v) {
                tor.push(i);
            }
        }
        (set, tor)
    }

    /// Class of a coweight-lattice vector lying in `X_*`.
    pub fn class_of(&self, x: &[i64]) -> Option<usize> {
        let c = self.quotient.class_of(x)?;
        self.index_of(&c)
    }
}

/// Computes `Omega_G` from the root datum and checks it against the declaration.
pub fn compute_omega(
    rd: &BasedRootDatum,
    act: &GaloisAction,
    rel: &AffineDiagram,
    decl: &OmegaDecl,
) -> Result<OmegaGroup, OmegaError> {
    let kq = invariants_coinvariants(rd, act)?;
    let mut om = OmegaGroup::from_quotient(kq, decl.generator_action.as_deref(), rel.len())?;
    if decl.sign_factor {
        om = om.with_sign_factor();
    }
    if om.order() != decl.order {
        return Err(OmegaError::Integrity(format!(
            "{} {}: |Omega| computed {} but declared {}",
            rd.finite_type,
            rd.isogeny,
            om.order(),
            decl.order
        )));
    }
    om.check(rel)?;
    Ok(om)
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelImage {
    pub kernel: Vec<usize>,
    /// Indices in the adjoint group.
    pub image: Vec<usize>,
    pub map: Vec<usize>,
}

/// Kernel and image of `Omega_G -> Omega_{G_ad}` induced by `X_* -> P^v`.
pub fn isogeny_kernel_image(om_g: &OmegaGroup, om_ad: &OmegaGroup) -> Result<KernelImage, OmegaError> {
    let mut map = Vec::new();
    for (i, r) in om_g.representatives.iter().enumerate() {
        let r = r.as_ref().ok_or_else(|| {
            OmegaError::Unsupported(format!("element {:?} has no lattice representative", om_g.elements[i]))
        })?;
        let img = om_ad
            .class_of(r)
            .ok_or_else(|| OmegaError::Integrity(format!("{r:?} does not map into Omega_ad")))?;
        map.push(img);
    }
    for a in 0..map.len() {
        for b in 0..map.len() {
            if map[om_g.add(a, b)] != om_ad.add(map[a], map[b]) {
                return Err(OmegaError::Integrity("map on Omega is not a homomorphism".into()));
            }
        }
    }
    let id_ad = om_ad.identity_index();
    let kernel: Vec<usize> = (0..map.len()).filter(|&i| map[i] == id_ad).collect();
    let image: Vec<usize> = map.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if kernel.len() * image.len() != map.len() {
        return Err(OmegaError::Integrity("kernel and image orders do not multiply".into()));
    }
    Ok(KernelImage { kernel, image, map })
}

/// The action of `Omega_G` factors through its image in `Omega_{G_ad}`.
pub fn check_action_through_adjoint(
    om_g: &OmegaGroup,
    om_ad: &OmegaGroup,
    ki: &KernelImage,
) -> Result<(), OmegaError> {
    for (i, &j) in ki.map.iter().enumerate() {
        if om_g.perms[i] != om_ad.perms[j] {
            return Err(OmegaError::Integrity(format!(
                "element {:?} acts by {:?}, its adjoint image by {:?}",
                om_g.elements[i], om_g.perms[i], om_ad.perms[j]
            )));
        }
    }
    Ok(())
}

/// A group isomorphism `phi: a -> b` with `node_map o a(w) = b(phi(w)) o node_map`.
pub fn equivariant_isomorphism(
    a: &OmegaGroup,
    b: &OmegaGroup,
    node_map: &[usize],
) -> Option<Vec<usize>> {
    let n = a.elements.len();
    if n != b.elements.len() || a.group != b.group || n > 8 {
        return None;
    }
    let mut phi = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        k: usize,
        a: &OmegaGroup,
        b: &OmegaGroup,
        node_map: &[usize],
        phi: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = phi.len();
        if k == n {
            return (0..n).all(|x| {
                (0..n).all(|y| phi[a.add(x, y)] == b.add(phi[x], phi[y]))
            });
        }
        for t in 0..n {
            if used[t] {
                continue;
            }
            let lhs: Vec<usize> = a.perms[k].iter().map(|&v| node_map[v]).collect();
            let rhs: Vec<usize> = node_map.iter().map(|&v| b.perms[t][v]).collect();
            if lhs != rhs {
                continue;
            }
            phi[k] = t;
            used[t] = true;
            if go(k + 1, a, b, node_map, phi, used) {
                return true;
            }
            used[t] = false;
        }
        false
    }
    if go(0, a, b, node_map, &mut phi, &mut used) {
        Some(phi)
    } else {
        None
    }
}
