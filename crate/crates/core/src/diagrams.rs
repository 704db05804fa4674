//! Affine Dynkin diagrams, local indices and their folding to relative
//! local Dynkin diagrams.
//!
//! Arrows point toward the shorter root. A quadruple bond joins roots whose
//! squared lengths differ by a factor 4 (arrow) or agree (`Both`, affine `A_1`).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coxeter::{CoxeterSystem, INF};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("invalid diagram: {0}")]
    Invalid(String),
    #[error("permutation {0:?} is not a diagram automorphism")]
    NotAutomorphism(Vec<usize>),
    #[error("unsupported folding: {0}")]
    UnsupportedFolding(String),
    #[error("inconsistent root lengths: {0}")]
    Lengths(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("facet {0:?} is not a proper subset of the nodes")]
    ImproperFacet(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arrow {
    None,
    /// Points from `i` to `j`: `j` is shorter.
    Forward,
    /// Points from `j` to `i`: `i` is shorter.
    Backward,
    /// Quadruple bond between roots of equal length.
    Both,
}

impl Arrow {
    fn token(self) -> &'static str {
        match self {
            Arrow::None => "-",
            Arrow::Forward => ">",
            Arrow::Backward => "<",
            Arrow::Both => "<>",
        }
    }

    fn reversed(self) -> Self {
        match self {
            Arrow::Forward => Arrow::Backward,
            Arrow::Backward => Arrow::Forward,
            a => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub bonds: u8,
    pub arrow: Arrow,
}

impl Edge {
    pub fn new(i: usize, j: usize, bonds: u8, arrow: Arrow) -> Self {
        if i <= j {
            Self { i, j, bonds, arrow }
        } else {
            Self {
                i: j,
                j: i,
                bonds,
                arrow: arrow.reversed(),
            }
        }
    }

    pub fn simple(i: usize, j: usize) -> Self {
        Self::new(i, j, 1, Arrow::None)
    }

    /// Edge whose arrow points toward `short`.
    pub fn toward(long: usize, short: usize, bonds: u8) -> Self {
        Self::new(long, short, bonds, Arrow::Forward)
    }

    /// Arrow as seen from `a` toward `b`.
    fn arrow_from(&self, a: usize) -> Arrow {
        if a == self.i {
            self.arrow
        } else {
            self.arrow.reversed()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineDiagram {
    pub labels: Vec<String>,
    pub edges: Vec<Edge>,
    pub special: BTreeSet<usize>,
}

impl AffineDiagram {
    pub fn new(
        labels: Vec<String>,
        edges: Vec<Edge>,
        special: impl IntoIterator<Item = usize>,
    ) -> Result<Self, DiagramError> {
        let mut edges: Vec<Edge> = edges
            .into_iter()
            .map(|e| Edge::new(e.i, e.j, e.bonds, e.arrow))
            .collect();
        edges.sort();
        let d = Self {
            labels,
            edges,
            special: special.into_iter().collect(),
        };
        d.validate()?;
        Ok(d)
    }

    /// Nodes labelled by their index.
    pub fn numbered(n: usize, edges: Vec<Edge>, special: impl IntoIterator<Item = usize>) -> Result<Self, DiagramError> {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges, special)
    }

    pub fn validate(&self) -> Result<(), DiagramError> {
        let n = self.len();
        let bad = |m: String| Err(DiagramError::Invalid(m));
        let mut pairs = BTreeSet::new();
        for e in &self.edges {
            if e.i >= n || e.j >= n || e.i == e.j {
                return bad(format!("edge {}-{} out of range", e.i, e.j));
            }
            if !(1..=4).contains(&e.bonds) {
                return bad(format!("bond count {}", e.bonds));
            }
            if (e.bonds >= 2) == (e.arrow == Arrow::None) {
                return bad(format!("edge {}-{}: arrow iff bonds >= 2", e.i, e.j));
            }
            if e.arrow == Arrow::Both && e.bonds != 4 {
                return bad(format!("edge {}-{}: double arrow needs 4 bonds", e.i, e.j));
            }
            if !pairs.insert((e.i, e.j)) {
                return bad(format!("duplicate edge {}-{}", e.i, e.j));
            }
        }
        if let Some(&s) = self.special.iter().find(|&&s| s >= n) {
            return bad(format!("special node {s} out of range"));
        }
        for l in &self.labels {
            if l.is_empty() || l.chars().any(char::is_whitespace) || l == "special" {
                return bad(format!("label {l:?}"));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn edge(&self, a: usize, b: usize) -> Option<&Edge> {
        let (i, j) = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.i == i && e.j == j)
    }

    pub fn bonds(&self, a: usize, b: usize) -> u8 {
        self.edge(a, b).map_or(0, |e| e.bonds)
    }

    pub fn neighbors(&self, a: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| {
                if e.i == a {
                    Some(e.j)
                } else if e.j == a {
                    Some(e.i)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        components(self, &(0..self.len()).collect::<Vec<_>>()).len() <= 1
    }

    /// Squared root lengths, normalized so the shortest root has length 1.
    pub fn lengths(&self) -> Result<Vec<Rational64>, DiagramError> {
        let n = self.len();
        let mut len: Vec<Option<Rational64>> = vec![None; n];
        for start in 0..n {
            if len[start].is_some() {
                continue;
            }
            len[start] = Some(Rational64::one());
            let mut stack = vec![start];
            while let Some(a) = stack.pop() {
                let la = len[a].unwrap();
                for b in self.neighbors(a) {
                    let e = self.edge(a, b).unwrap();
                    let ratio = Rational64::from_integer(match e.bonds {
                        1 => 1,
                        4 if e.arrow == Arrow::Both => 1,
                        k => k as i64,
                    });
                    let lb = match e.arrow_from(a) {
                        Arrow::Forward => la / ratio,
                        Arrow::Backward => la * ratio,
                        _ => la,
                    };
                    match len[b] {
                        None => {
                            len[b] = Some(lb);
                            stack.push(b);
                        }
                        Some(x) if x != lb => {
                            return Err(DiagramError::Lengths(format!(
                                "node {b} gets {x} and {lb}"
                            )))
                        }
                        _ => {}
                    }
                }
            }
        }
        let len: Vec<Rational64> = len.into_iter().map(Option::unwrap).collect();
        let min = len.iter().copied().min().unwrap_or_else(Rational64::one);
        Ok(len.into_iter().map(|l| l / min).collect())
    }

    /// Gram matrix of the roots with the normalized lengths.
    pub fn gram(&self) -> Result<Vec<Vec<Rational64>>, DiagramError> {
        let len = self.lengths()?;
        let n = self.len();
        let mut g = vec![vec![Rational64::zero(); n]; n];
        for i in 0..n {
            g[i][i] = len[i];
        }
        for e in &self.edges {
            let min = len[e.i].min(len[e.j]);
            let v = match (e.bonds, e.arrow) {
                (4, Arrow::Both) => -len[e.i],
                (4, _) => -min * 2,
                (b, _) => -min * Rational64::new(b as i64, 2),
            };
            g[e.i][e.j] = v;
            g[e.j][e.i] = v;
        }
        Ok(g)
    }

    pub fn coxeter_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.len();
        let mut m = vec![vec![2u32; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        for e in &self.edges {
            let v = crate::coxeter::m_from_bonds(e.bonds);
            m[e.i][e.j] = v;
            m[e.j][e.i] = v;
        }
        m
    }

    pub fn coxeter_system(&self) -> CoxeterSystem {
        CoxeterSystem::new(self.coxeter_matrix()).expect("bond counts give crystallographic m")
    }

    /// Whether `perm` preserves edges, bond counts and arrows.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        let n = self.len();
        if perm.len() != n || perm.iter().collect::<BTreeSet<_>>().len() != n {
            return false;
        }
        if perm.iter().any(|&p| p >= n) {
            return false;
        }
        let mut image: Vec<Edge> = self
            .edges
            .iter()
            .map(|e| Edge::new(perm[e.i], perm[e.j], e.bonds, e.arrow))
            .collect();
        image.sort();
        image == self.edges
    }

    /// Connected components of the induced subdiagram on `nodes`.
    pub fn components_of(&self, nodes: &[usize]) -> Vec<Vec<usize>> {
        components(self, nodes)
    }

    /// Induced subdiagram on `nodes` (relabelled `0..`), keeping labels.
    pub fn induced(&self, nodes: &[usize]) -> AffineDiagram {
        let pos = |x: usize| nodes.iter().position(|&y| y == x);
        let edges = self
            .edges
            .iter()
            .filter_map(|e| Some(Edge::new(pos(e.i)?, pos(e.j)?, e.bonds, e.arrow)))
            .collect();
        let special: Vec<usize> = self.special.iter().filter_map(|&s| pos(s)).collect();
        AffineDiagram::new(
            nodes.iter().map(|&i| self.labels[i].clone()).collect(),
            edges,
            special,
        )
        .expect("induced subdiagram of a valid diagram")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# nodes\n");
        for (i, l) in self.labels.iter().enumerate() {
            if self.special.contains(&i) {
                s.push_str(&format!("{i} special {l}\n"));
            } else {
                s.push_str(&format!("{i} {l}\n"));
            }
        }
        s.push_str("# edges\n");
        for e in &self.edges {
            s.push_str(&format!("{} {} {} {}\n", e.i, e.j, e.bonds, e.arrow.token()));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, DiagramError> {
        #[derive(PartialEq)]
        enum Sec {
            None,
            Nodes,
            Edges,
        }
        let mut sec = Sec::None;
        let mut labels = Vec::new();
        let mut special = Vec::new();
        let mut edges = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let err = |msg: &str| DiagramError::Parse {
                line,
                msg: msg.to_string(),
            };
            let t = raw.trim();
            match t {
                "" => continue,
                "# nodes" => {
                    sec = Sec::Nodes;
                    continue;
                }
                "# edges" => {
                    sec = Sec::Edges;
                    continue;
                }
                _ => {}
            }
            let toks: Vec<&str> = t.split_whitespace().collect();
            match sec {
                Sec::None => return Err(err("expected a section header")),
                Sec::Nodes => {
                    let id: usize = toks[0].parse().map_err(|_| err("bad node id"))?;
                    if id != labels.len() {
                        return Err(err("node ids must be consecutive from 0"));
                    }
                    let (is_special, label) = match toks.as_slice() {
                        [_, "special", l] => (true, *l),
                        [_, l] => (false, *l),
                        _ => return Err(err("expected `id [special] label`")),
                    };
                    if is_special {
                        special.push(id);
                    }
                    labels.push(label.to_string());
                }
                Sec::Edges => {
                    let [i, j, b, a] = toks.as_slice() else {
                        return Err(err("expected `i j bonds arrow`"));
                    };
                    let i: usize = i.parse().map_err(|_| err("bad node"))?;
                    let j: usize = j.parse().map_err(|_| err("bad node"))?;
                    let b: u8 = b.parse().map_err(|_| err("bad bond count"))?;
                    let arrow = match *a {
                        "-" => Arrow::None,
                        ">" => Arrow::Forward,
                        "<" => Arrow::Backward,
                        "<>" => Arrow::Both,
                        _ => return Err(err("bad arrow token")),
                    };
                    edges.push(Edge { i, j, bonds: b, arrow });
                }
            }
        }
        Self::new(labels, edges, special)
    }
}

impl fmt::Display for AffineDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for AffineDiagram {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_text(s)
    }
}

fn components(d: &AffineDiagram, nodes: &[usize]) -> Vec<Vec<usize>> {
    let set: BTreeSet<usize> = nodes.iter().copied().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &s in &set {
        if seen.contains(&s) {
            continue;
        }
        let mut comp = vec![s];
        seen.insert(s);
        let mut stack = vec![s];
        while let Some(a) = stack.pop() {
            for b in d.neighbors(a) {
                if set.contains(&b) && seen.insert(b) {
                    comp.push(b);
                    stack.push(b);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// A diagram with the Frobenius permutation of its nodes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalIndex {
    pub diagram: AffineDiagram,
    pub frob: Vec<usize>,
}

impl LocalIndex {
    pub fn new(diagram: AffineDiagram, frob: Vec<usize>) -> Result<Self, DiagramError> {
        if !diagram.is_automorphism(&frob) {
            return Err(DiagramError::NotAutomorphism(frob));
        }
        Ok(Self { diagram, frob })
    }

    pub fn split(diagram: AffineDiagram) -> Self {
        let n = diagram.len();
        Self {
            diagram,
            frob: (0..n).collect(),
        }
    }

    /// Frobenius orbits, each sorted, ordered by smallest element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        perm_cycles(&self.frob)
    }
}

/// Cycles of a permutation, each sorted, ordered by smallest element.
pub fn perm_cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = p[x];
        }
        c.sort_unstable();
        out.push(c);
    }
    out
}

/// Relative diagram together with the orbit of each relative node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Folded {
    pub diagram: AffineDiagram,
    pub orbits: Vec<Vec<usize>>,
}

impl Folded {
    /// Union of the orbits of the given relative nodes.
    pub fn lift(&self, nodes: &BTreeSet<usize>) -> Vec<usize> {
        let mut v: Vec<usize> = nodes.iter().flat_map(|&o| self.orbits[o].clone()).collect();
        v.sort_unstable();
        v
    }
}

/// Orbit shapes that occur in the tabulated local indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitPattern {
    Single,
    /// Non-adjacent nodes of equal type.
    Disjoint(usize),
    /// Two nodes joined by a single bond (restricts to a non-reduced `BC_1`).
    AdjacentPair,
}

fn orbit_pattern(d: &AffineDiagram, orbit: &[usize]) -> Result<OrbitPattern, DiagramError> {
    let adjacent: Vec<(usize, usize)> = orbit
        .iter()
        .enumerate()
        .flat_map(|(k, &a)| orbit[k + 1..].iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| d.bonds(a, b) > 0)
        .collect();
    match (orbit.len(), adjacent.as_slice()) {
        (1, _) => Ok(OrbitPattern::Single),
        (2 | 3, []) => Ok(OrbitPattern::Disjoint(orbit.len())),
        (2, [(a, b)]) if d.bonds(*a, *b) == 1 => Ok(OrbitPattern::AdjacentPair),
        _ => Err(DiagramError::UnsupportedFolding(format!(
            "orbit {orbit:?} with internal edges {adjacent:?}"
        ))),
    }
}

/// Quotient of a local index by Frobenius.
///
/// Relative nodes are the Frobenius orbits. The Coxeter entry between two
/// orbits is the order of the product of the longest elements of the two
/// orbit parabolics; arrows come from the lengths of the restricted roots
/// (orbit averages of the absolute roots).
pub fn fold(li: &LocalIndex) -> Result<Folded, DiagramError> {
    let d = &li.diagram;
    let orbits = li.orbits();
    for o in &orbits {
        orbit_pattern(d, o)?;
    }
    let g = d.gram()?;
    let k = orbits.len();
    let pair_avg = |a: &[usize], b: &[usize]| -> Rational64 {
        let mut s = Rational64::zero();
        for &i in a {
            for &j in b {
                s += g[i][j];
            }
        }
        s / Rational64::from_integer((a.len() * b.len()) as i64)
    };
    let len: Vec<Rational64> = orbits.iter().map(|o| pair_avg(o, o)).collect();
    let w = d.coxeter_system();
    let longest: Vec<_> = orbits
        .iter()
        .map(|o| {
            w.longest_element(o)
                .ok_or_else(|| DiagramError::UnsupportedFolding(format!("orbit {o:?} infinite")))
        })
        .collect::<Result<_, _>>()?;
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let prod = w.mul(&longest[a], &longest[b]);
            let m = w.order(&prod, 12).unwrap_or(INF);
            let bonds = match m {
                2 => continue,
                3 => 1,
                4 => 2,
                6 => 3,
                INF => 4,
                other => {
                    return Err(DiagramError::UnsupportedFolding(format!(
                        "orbits {a},{b} generate a dihedral group with m = {other}"
                    )))
                }
            };
            let (la, lb) = (len[a], len[b]);
            let ratio = if la > lb { la / lb } else { lb / la };
            let expected: &[i64] = match bonds {
                1 => &[1],
                2 => &[2],
                3 => &[3],
                _ => &[1, 4],
            };
            if !expected.iter().any(|&r| ratio == Rational64::from_integer(r)) {
                return Err(DiagramError::Lengths(format!(
                    "orbits {a},{b}: {bonds} bonds with length ratio {ratio}"
                )));
            }
            let arrow = if bonds == 1 {
                Arrow::None
            } else if la == lb {
                Arrow::Both
            } else if la > lb {
                Arrow::Forward
            } else {
                Arrow::Backward
            };
            edges.push(Edge::new(a, b, bonds, arrow));
        }
    }
    let labels = orbits
        .iter()
        .map(|o| {
            o.iter()
                .map(|&i| d.labels[i].as_str())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    let special: Vec<usize> = (0..k)
        .filter(|&o| orbits[o].iter().any(|i| d.special.contains(i)))
        .collect();
    let diagram = AffineDiagram::new(labels, edges, special)?;
    Ok(Folded { diagram, orbits })
}

/// A facet, given by the proper subset `J` of relative nodes whose reflections
/// generate its parahoric.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Facet {
    pub j: BTreeSet<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FacetKind {
    /// `J` empty: the chamber, Iwahori subgroup.
    Chamber,
    /// `|J| = |nodes| - 1`: a vertex, maximal parahoric.
    Vertex,
    Other,
}

impl Facet {
    pub fn new(j: impl IntoIterator<Item = usize>, n: usize) -> Result<Self, DiagramError> {
        let j: BTreeSet<usize> = j.into_iter().collect();
        if j.len() >= n || j.iter().any(|&x| x >= n) {
            return Err(DiagramError::ImproperFacet(j.into_iter().collect()));
        }
        Ok(Self { j })
    }

    pub fn kind(&self, n: usize) -> FacetKind {
        if self.j.is_empty() {
            FacetKind::Chamber
        } else if self.j.len() + 1 == n {
            FacetKind::Vertex
        } else {
            FacetKind::Other
        }
    }

    /// Nodes outside `J`: the vertices of the facet.
    pub fn complement(&self, n: usize) -> BTreeSet<usize> {
        (0..n).filter(|x| !self.j.contains(x)).collect()
    }

    pub fn label(&self) -> String {
        let v: Vec<String> = self.j.iter().map(usize::to_string).collect();
        format!("{{{}}}", v.join(","))
    }
}

/// All proper subsets of the nodes, by bitmask order.
pub fn enumerate_facets(rel: &AffineDiagram) -> Vec<Facet> {
    let n = rel.len();
    (0u64..(1u64 << n) - 1)
        .map(|mask| Facet {
            j: (0..n).filter(|&i| mask >> i & 1 == 1).collect(),
        })
        .collect()
}

/// A node bijection `a -> b` preserving edges and bond counts (arrows may differ).
pub fn diagram_isomorphic_up_to_arrows(
    a: &AffineDiagram,
    b: &AffineDiagram,
    respect_special: bool,
) -> Option<Vec<usize>> {
    let n = a.len();
    if n != b.len() || a.edges.len() != b.edges.len() {
        return None;
    }
    if respect_special && a.special.len() != b.special.len() {
        return None;
    }
    let sig = |d: &AffineDiagram, x: usize| {
        let mut s: Vec<u8> = d.neighbors(x).iter().map(|&y| d.bonds(x, y)).collect();
        s.sort_unstable();
        s
    };
    let sa: Vec<_> = (0..n).map(|x| sig(a, x)).collect();
    let sb: Vec<_> = (0..n).map(|x| sig(b, x)).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        x: usize,
        a: &AffineDiagram,
        b: &AffineDiagram,
        sa: &[Vec<u8>],
        sb: &[Vec<u8>],
        respect_special: bool,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        let n = a.len();
        if x == n {
            return true;
        }
        for y in 0..n {
            if used[y] || sa[x] != sb[y] {
                continue;
            }
            if respect_special && a.special.contains(&x) != b.special.contains(&y) {
                continue;
            }
            if (0..x).any(|p| a.bonds(p, x) != b.bonds(map[p], y)) {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if go(x + 1, a, b, sa, sb, respect_special, map, used) {
                return true;
            }
            used[y] = false;
        }
        false
    }
    if go(0, a, b, &sa, &sb, respect_special, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

/// Whether `map` is an isomorphism `a -> b` including arrow directions.
pub fn is_exact_isomorphism(a: &AffineDiagram, b: &AffineDiagram, map: &[usize]) -> bool {
    if a.len() != b.len() || a.edges.len() != b.edges.len() {
        return false;
    }
    a.edges.iter().all(|e| {
        let f = Edge::new(map[e.i], map[e.j], e.bonds, e.arrow);
        b.edges.contains(&f)
    })
}
