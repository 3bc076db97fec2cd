//! Components, cut vertices, alpha-wings and irregularity tests on colour
//! classes.
//!
//! Large wings are counted as the components left after deleting alpha from
//! every edge; each pure `α^h` copy is a small wing of its own. The
//! definitional brute force lives with the integration tests.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::amalgam::AmalgamState;
use crate::error::{Error, Result};
use crate::model::{ALPHA, Color, Coloring, Instance, MultiEdge, MultiHypergraph, Vertex, class_subhypergraph};

/// Disjoint-set forest over `0..n` with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if `a` and `b` were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }
}

/// A connected piece of a hypergraph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub vertices: Vec<Vertex>,
    /// Edges with their multiplicities inside the component.
    pub edges: Vec<(MultiEdge, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Components {
    pub components: Vec<Component>,
    /// Vertices of the hypergraph that lie on no edge.
    pub isolated: Vec<Vertex>,
}

/// Connected components of `g` (union-find over edges); isolated vertices
/// are reported separately and never form components.
pub fn components(g: &MultiHypergraph) -> Components {
    let index: BTreeMap<Vertex, usize> = g.vertices().iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(index.len());
    let mut covered = vec![false; index.len()];
    for (e, _) in g.edges() {
        let first = index[&e.vertices()[0]];
        for v in e.vertices() {
            covered[index[v]] = true;
            uf.union(first, index[v]);
        }
    }
    let mut by_root: BTreeMap<usize, Component> = BTreeMap::new();
    let mut isolated = Vec::new();
    for (&v, &i) in &index {
        if !covered[i] {
            isolated.push(v);
            continue;
        }
        let root = uf.find(i);
        by_root
            .entry(root)
            .or_insert_with(|| Component {
                vertices: Vec::new(),
                edges: Vec::new(),
            })
            .vertices
            .push(v);
    }
    for (e, mult) in g.edges() {
        let root = uf.find(index[&e.vertices()[0]]);
        by_root.get_mut(&root).expect("covered").edges.push((e.clone(), mult));
    }
    let mut comps: Vec<Component> = by_root.into_values().collect();
    comps.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    Components {
        components: comps,
        isolated,
    }
}

/// Connected in the spanning sense: every vertex of `g` lies in a single
/// component. A one-vertex hypergraph is connected.
pub fn is_connected(g: &MultiHypergraph) -> bool {
    let c = components(g);
    match g.vertices().len() {
        0 | 1 => true,
        _ => c.isolated.is_empty() && c.components.len() == 1,
    }
}

/// Small and large wing counts of a hypergraph at `alpha`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WingCount {
    pub small: u64,
    pub large: u64,
}

impl WingCount {
    pub fn total(&self) -> u64 {
        self.small + self.large
    }
}

/// Counts alpha-wings of a (connected) class: each edge made only of alpha is
/// a small wing, and each component left after deleting alpha is a large one.
pub fn count_wings_in<'a>(edges: impl IntoIterator<Item = (&'a MultiEdge, u64)>, alpha: Vertex) -> WingCount {
    let mut index: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut groups: Vec<Vec<Vertex>> = Vec::new();
    let mut small = 0;
    for (e, mult) in edges {
        if mult == 0 {
            continue;
        }
        let rest: Vec<Vertex> = e.distinct().into_iter().filter(|&v| v != alpha).collect();
        if rest.is_empty() {
            small += mult;
            continue;
        }
        for v in &rest {
            let next = index.len();
            index.entry(*v).or_insert(next);
        }
        groups.push(rest);
    }
    let mut uf = UnionFind::new(index.len());
    for g in &groups {
        for v in &g[1..] {
            uf.union(index[&g[0]], index[v]);
        }
    }
    WingCount {
        small,
        large: uf.set_count() as u64,
    }
}

pub fn count_wings(class: &MultiHypergraph, alpha: Vertex) -> WingCount {
    count_wings_in(class.edges(), alpha)
}

/// Wing statistics of one amalgam colour class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WingReport {
    pub color: Color,
    pub small_wings: u64,
    pub large_wings: u64,
    pub total: u64,
    /// Components of the base class on `1..=m`, isolated vertices included.
    pub components_of_base: u64,
    /// `(r_j − 1)(n − m) + 1`.
    pub bound: u64,
}

impl WingReport {
    pub fn within_bound(&self) -> bool {
        self.total <= self.bound
    }
}

pub fn wing_report(state: &AmalgamState, j: Color) -> WingReport {
    let inst = state.instance();
    let class = state.class_hypergraph(j);
    let w = count_wings(&class, ALPHA);
    let base = class_subhypergraph(state.base(), state.base_coloring(), j);
    let c = components(&base);
    WingReport {
        color: j,
        small_wings: w.small,
        large_wings: w.large,
        total: w.total(),
        components_of_base: (c.components.len() + c.isolated.len()) as u64,
        bound: (inst.r_of(j) - 1) * (inst.n - inst.m) as u64 + 1,
    }
}

/// Whether `v` is a cut vertex of the connected hypergraph `g`: the edges
/// split into two non-empty parts meeting only at `v`.
pub fn is_cut_vertex(g: &MultiHypergraph, v: Vertex) -> Result<bool> {
    if !g.contains_vertex(v) {
        return Err(Error::UnknownVertex(v));
    }
    if !is_connected(g) {
        return Err(Error::NotConnected("cut vertices are defined on connected hypergraphs".into()));
    }
    if !g.edges().any(|(e, _)| e.contains(v)) {
        return Ok(false);
    }
    // Each part must touch v; a part that avoided v would be its own component.
    let w = count_wings(g, v);
    Ok(w.total() >= 2)
}

/// True iff no component of `class` is `r`-regular. Isolated vertices never
/// count as components.
pub fn is_irregular(class: &MultiHypergraph, r: u64) -> bool {
    components(class).components.iter().all(|comp| {
        let mut deg: BTreeMap<Vertex, u64> = BTreeMap::new();
        for (e, mult) in &comp.edges {
            for v in e.vertices() {
                *deg.entry(*v).or_insert(0) += mult;
            }
        }
        deg.values().any(|&d| d != r)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessityEntry {
    pub color: Color,
    pub passed: bool,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessityReport {
    pub entries: Vec<NecessityEntry>,
}

impl NecessityReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn first_failure(&self) -> Option<Error> {
        self.entries.iter().find(|e| !e.passed).map(|e| Error::NecessityViolated {
            color: e.color,
            reason: e.reason.clone().unwrap_or_default(),
        })
    }
}

/// For each requested class: `r_j ≥ 2` and the input class is `r_j`-irregular.
pub fn theorem13_necessity_check(
    host: &MultiHypergraph,
    coloring: &Coloring,
    inst: &Instance,
    requested: &BTreeSet<Color>,
) -> Result<NecessityReport> {
    let mut entries = Vec::new();
    for &j in requested {
        if j.0 == 0 || j.index() >= inst.k() {
            return Err(Error::UnknownColor(j, inst.k()));
        }
        let r = inst.r_of(j);
        let reason = if r < 2 {
            Some(format!("r_{j} = {r}: a connected factor needs r >= 2"))
        } else if !is_irregular(&class_subhypergraph(host, coloring, j), r) {
            Some(format!("class {j} already has an r-regular component (r = {r})"))
        } else {
            None
        };
        entries.push(NecessityEntry {
            color: j,
            passed: reason.is_none(),
            reason,
        });
    }
    Ok(NecessityReport { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EdgeCopy, complete_hypergraph};

    fn graph(n: u32, edges: &[&[u32]]) -> MultiHypergraph {
        let mut g = MultiHypergraph::on_range(2, n);
        for e in edges {
            g.add_edge(MultiEdge::from_ids(e), 1).unwrap();
        }
        g
    }

    fn alpha_graph(h: usize, base: u32, edges: &[(&[u32], usize, u64)]) -> MultiHypergraph {
        let mut g = MultiHypergraph::on_range(h, base);
        g.add_amalgam_vertex(ALPHA);
        for (x, i, mult) in edges {
            let mut v: Vec<Vertex> = x.iter().copied().map(Vertex).collect();
            v.extend(std::iter::repeat_n(ALPHA, *i));
            g.add_edge(MultiEdge::new(v), *mult).unwrap();
        }
        g
    }

    #[test]
    fn matching_has_two_components() {
        let g = graph(4, &[&[1, 2], &[3, 4]]);
        assert_eq!(components(&g).components.len(), 2);
        assert!(!is_connected(&g));
    }

    #[test]
    fn single_alpha_edge_is_one_component() {
        let mut g = MultiHypergraph::new(3, []);
        g.add_amalgam_vertex(ALPHA);
        g.add_edge(MultiEdge::new(vec![ALPHA; 3]), 1).unwrap();
        let c = components(&g);
        assert_eq!(c.components.len(), 1);
        assert_eq!(c.components[0].vertices, vec![ALPHA]);
    }

    #[test]
    fn hamiltonian_cycle_connected() {
        let g = graph(5, &[&[1, 2], &[2, 3], &[3, 4], &[4, 5], &[1, 5]]);
        assert!(is_connected(&g));
        for v in 1..=5 {
            assert!(!is_cut_vertex(&g, Vertex(v)).unwrap());
        }
    }

    #[test]
    fn path_centre_is_cut() {
        let g = graph(3, &[&[1, 2], &[2, 3]]);
        assert!(is_cut_vertex(&g, Vertex(2)).unwrap());
        assert!(!is_cut_vertex(&g, Vertex(1)).unwrap());
        let d = graph(4, &[&[1, 2], &[3, 4]]);
        assert!(matches!(is_cut_vertex(&d, Vertex(1)), Err(Error::NotConnected(_))));
    }

    #[test]
    fn wing_examples() {
        let mut g = MultiHypergraph::new(3, []);
        g.add_amalgam_vertex(ALPHA);
        g.add_edge(MultiEdge::new(vec![ALPHA; 3]), 3).unwrap();
        assert_eq!(count_wings(&g, ALPHA).total(), 3);

        let g = alpha_graph(3, 2, &[(&[1], 2, 1), (&[2], 2, 1)]);
        let w = count_wings(&g, ALPHA);
        assert_eq!((w.small, w.large), (0, 2));

        let g = alpha_graph(3, 2, &[(&[1, 2], 1, 1), (&[], 3, 1)]);
        assert!(is_cut_vertex(&g, ALPHA).unwrap());
    }

    #[test]
    fn irregularity() {
        assert!(is_irregular(&graph(2, &[&[1, 2]]), 2));
        assert!(!is_irregular(&graph(3, &[&[1, 2], &[2, 3], &[1, 3]]), 2));
        assert!(is_irregular(&graph(3, &[]), 1));
    }

    #[test]
    fn necessity_clauses() {
        let g = complete_hypergraph(5, 2, 1).unwrap();
        let inst = Instance::new(6, 2, 1, 5, vec![1, 2, 2], None).unwrap();
        let mut c = Coloring::new(3);
        for e in [[1, 2], [2, 3], [1, 3]] {
            c.assign(EdgeCopy::new(MultiEdge::from_ids(&e), 0), Color(2)).unwrap();
        }
        c.assign(EdgeCopy::new(MultiEdge::from_ids(&[4, 5]), 0), Color(3)).unwrap();
        let all: BTreeSet<Color> = inst.colors().collect();
        let rep = theorem13_necessity_check(&g, &c, &inst, &all).unwrap();
        let passed: Vec<bool> = rep.entries.iter().map(|e| e.passed).collect();
        assert_eq!(passed, vec![false, false, true]);
        assert!(matches!(rep.first_failure(), Some(Error::NecessityViolated { color: Color(1), .. })));
    }
}
