//! Hypergraphs with multiset edges, edge colourings and instance parameters.
//!
//! Vertices are dense positive integers; id `0` is reserved for the amalgam
//! vertex alpha, which is the only vertex allowed to repeat inside an edge.
//! Edge copies are individually addressable as `(edge, copy-index)` so that a
//! partial colouring can colour some copies of an h-set and leave others.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub u32);

/// The reserved amalgam vertex.
pub const ALPHA: Vertex = Vertex(0);

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == ALPHA {
            f.write_str("alpha")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// A colour in `1..=k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Color(pub u32);

impl Color {
    /// Zero-based index into per-colour tables.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(i: usize) -> Color {
        Color(i as u32 + 1)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `λ·C(n, k)` style binomial on u64; zero when `k > n`.
pub fn binom(n: u64, k: u64) -> u64 {
    if k > n {
        0
    } else {
        binomial(n, k)
    }
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub fn subsets(n: u32, k: usize) -> Vec<Vec<Vertex>> {
    let items: Vec<Vertex> = (1..=n).map(Vertex).collect();
    subsets_of(&items, k)
}

/// All `k`-subsets of `items` (assumed sorted) in lexicographic order.
pub fn subsets_of(items: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    let mut out = Vec::new();
    if k > items.len() {
        return out;
    }
    let n = items.len();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// A sorted multiset of vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiEdge(Vec<Vertex>);

impl MultiEdge {
    pub fn new(mut vertices: Vec<Vertex>) -> MultiEdge {
        vertices.sort_unstable();
        MultiEdge(vertices)
    }

    pub fn from_ids(ids: &[u32]) -> MultiEdge {
        MultiEdge::new(ids.iter().copied().map(Vertex).collect())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn size(&self) -> usize {
        self.0.len()
    }

    pub fn occurrences(&self, v: Vertex) -> u64 {
        self.0.iter().filter(|&&u| u == v).count() as u64
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Distinct vertices, in order.
    pub fn distinct(&self) -> Vec<Vertex> {
        let mut d = self.0.clone();
        d.dedup();
        d
    }

    pub fn has_repeats(&self) -> bool {
        self.0.windows(2).any(|w| w[0] == w[1])
    }
}

impl fmt::Display for MultiEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// One addressable copy of an edge.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeCopy {
    pub edge: MultiEdge,
    pub copy: u32,
}

impl EdgeCopy {
    pub fn new(edge: MultiEdge, copy: u32) -> EdgeCopy {
        EdgeCopy { edge, copy }
    }
}

/// A hypergraph whose edges form a multiset; edges themselves may repeat
/// amalgam vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiHypergraph {
    h: usize,
    vertices: BTreeSet<Vertex>,
    amalgam: BTreeSet<Vertex>,
    edges: BTreeMap<MultiEdge, u64>,
}

impl MultiHypergraph {
    pub fn new(h: usize, vertices: impl IntoIterator<Item = Vertex>) -> MultiHypergraph {
        MultiHypergraph {
            h,
            vertices: vertices.into_iter().collect(),
            amalgam: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }

    /// Vertex set `1..=n`.
    pub fn on_range(h: usize, n: u32) -> MultiHypergraph {
        MultiHypergraph::new(h, (1..=n).map(Vertex))
    }

    /// Adds `v` as an amalgam vertex (allowed to repeat within edges).
    pub fn add_amalgam_vertex(&mut self, v: Vertex) {
        self.vertices.insert(v);
        self.amalgam.insert(v);
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.vertices.insert(v);
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn is_amalgam(&self, v: Vertex) -> bool {
        self.amalgam.contains(&v)
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    fn check_edge(&self, edge: &MultiEdge) -> Result<()> {
        if edge.size() != self.h {
            return Err(Error::Validation(format!(
                "edge {edge} has size {} but h = {}",
                edge.size(),
                self.h
            )));
        }
        for w in edge.vertices().windows(2) {
            if w[0] == w[1] && !self.is_amalgam(w[0]) {
                return Err(Error::Validation(format!(
                    "edge {edge} repeats non-amalgam vertex {}",
                    w[0]
                )));
            }
        }
        for v in edge.vertices() {
            if !self.contains_vertex(*v) {
                return Err(Error::UnknownVertex(*v));
            }
        }
        Ok(())
    }

    /// Adds `count` copies of `edge`; zero is a no-op.
    pub fn add_edge(&mut self, edge: MultiEdge, count: u64) -> Result<()> {
        self.check_edge(&edge)?;
        if count > 0 {
            *self.edges.entry(edge).or_insert(0) += count;
        }
        Ok(())
    }

    /// Removes up to `count` copies; returns how many were removed.
    pub fn remove_edge(&mut self, edge: &MultiEdge, count: u64) -> u64 {
        match self.edges.get_mut(edge) {
            Some(m) => {
                let taken = count.min(*m);
                *m -= taken;
                if *m == 0 {
                    self.edges.remove(edge);
                }
                taken
            }
            None => 0,
        }
    }

    pub fn multiplicity(&self, edge: &MultiEdge) -> u64 {
        self.edges.get(edge).copied().unwrap_or(0)
    }

    /// `(edge, multiplicity)` pairs in canonical order; no zero entries.
    pub fn edges(&self) -> impl Iterator<Item = (&MultiEdge, u64)> {
        self.edges.iter().map(|(e, &m)| (e, m))
    }

    pub fn distinct_edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_copies(&self) -> u64 {
        self.edges.values().sum()
    }

    /// Every edge copy in canonical order (edge, then copy index).
    pub fn copies(&self) -> impl Iterator<Item = EdgeCopy> + '_ {
        self.edges
            .iter()
            .flat_map(|(e, &m)| (0..m as u32).map(move |c| EdgeCopy::new(e.clone(), c)))
    }

    pub fn has_copy(&self, copy: &EdgeCopy) -> bool {
        (copy.copy as u64) < self.multiplicity(&copy.edge)
    }

    pub fn degree(&self, v: Vertex) -> u64 {
        self.edges
            .iter()
            .map(|(e, &m)| e.occurrences(v) * m)
            .sum()
    }
}

/// Builds λK_n^h: every h-subset of `1..=n` with multiplicity λ.
pub fn complete_hypergraph(n: u32, h: usize, lambda: u64) -> Result<MultiHypergraph> {
    if h == 0 || lambda == 0 {
        return Err(Error::InvalidParams(format!("need h >= 1 and lambda >= 1 (h={h}, lambda={lambda})")));
    }
    if (n as usize) < h {
        return Err(Error::InvalidParams(format!("n = {n} < h = {h}")));
    }
    let mut g = MultiHypergraph::on_range(h, n);
    for s in subsets(n, h) {
        g.edges.insert(MultiEdge(s), lambda);
    }
    Ok(g)
}

/// A (partial) assignment of edge copies to colours `1..=k`. Copies absent
/// from the map are uncoloured.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    k: usize,
    assignment: BTreeMap<EdgeCopy, Color>,
}

impl Coloring {
    pub fn new(k: usize) -> Coloring {
        Coloring {
            k,
            assignment: BTreeMap::new(),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Raises the number of available colours (a k-colouring is also a
    /// (k+l)-colouring).
    pub fn widen(&mut self, k: usize) {
        self.k = self.k.max(k);
    }

    pub fn check_color(&self, color: Color) -> Result<()> {
        if color.0 == 0 || color.0 as usize > self.k {
            Err(Error::UnknownColor(color, self.k))
        } else {
            Ok(())
        }
    }

    pub fn assign(&mut self, copy: EdgeCopy, color: Color) -> Result<()> {
        self.check_color(color)?;
        self.assignment.insert(copy, color);
        Ok(())
    }

    pub fn unassign(&mut self, copy: &EdgeCopy) -> Option<Color> {
        self.assignment.remove(copy)
    }

    pub fn color_of(&self, copy: &EdgeCopy) -> Option<Color> {
        self.assignment.get(copy).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EdgeCopy, Color)> {
        self.assignment.iter().map(|(e, &c)| (e, c))
    }

    pub fn colored_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn class(&self, color: Color) -> impl Iterator<Item = &EdgeCopy> {
        self.assignment
            .iter()
            .filter(move |(_, &c)| c == color)
            .map(|(e, _)| e)
    }

    /// Number of copies per colour, indexed by `color.index()`.
    pub fn class_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.k];
        for c in self.assignment.values() {
            if let Some(s) = sizes.get_mut(c.index()) {
                *s += 1;
            }
        }
        sizes
    }

    /// Checks that every coloured copy exists in `host` and colours are in range.
    pub fn validate(&self, host: &MultiHypergraph) -> Result<()> {
        for (copy, color) in self.iter() {
            self.check_color(color)?;
            if !host.has_copy(copy) {
                return Err(Error::Validation(format!(
                    "coloured copy {}#{} is not in the host hypergraph",
                    copy.edge, copy.copy
                )));
            }
        }
        Ok(())
    }

    pub fn uncolored<'a>(&'a self, host: &'a MultiHypergraph) -> impl Iterator<Item = EdgeCopy> + 'a {
        host.copies().filter(move |c| !self.assignment.contains_key(c))
    }
}

/// Sub-hypergraph of `host` formed by the copies of colour `color`.
pub fn class_subhypergraph(host: &MultiHypergraph, coloring: &Coloring, color: Color) -> MultiHypergraph {
    let mut sub = MultiHypergraph {
        h: host.h,
        vertices: host.vertices.clone(),
        amalgam: host.amalgam.clone(),
        edges: BTreeMap::new(),
    };
    for copy in coloring.class(color) {
        if host.has_copy(copy) {
            *sub.edges.entry(copy.edge.clone()).or_insert(0) += 1;
        }
    }
    sub
}

/// Degree of `v` within colour class `j`, counting multiplicities and
/// within-edge repeats.
pub fn degree_in_class(host: &MultiHypergraph, coloring: &Coloring, v: Vertex, j: Color) -> Result<u64> {
    if !host.contains_vertex(v) {
        return Err(Error::UnknownVertex(v));
    }
    coloring.check_color(j)?;
    Ok(coloring
        .class(j)
        .filter(|c| host.has_copy(c))
        .map(|c| c.edge.occurrences(v))
        .sum())
}

/// Per-colour degree tables: `table[j.index()][v]`.
pub fn class_degrees(host: &MultiHypergraph, coloring: &Coloring) -> Vec<BTreeMap<Vertex, u64>> {
    let mut table = vec![BTreeMap::new(); coloring.k()];
    for (copy, color) in coloring.iter() {
        if !host.has_copy(copy) {
            continue;
        }
        if let Some(row) = table.get_mut(color.index()) {
            for v in copy.edge.vertices() {
                *row.entry(*v).or_insert(0) += 1;
            }
        }
    }
    table
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeViolation {
    pub vertex: Vertex,
    pub color: Color,
    pub degree: u64,
    pub cap: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialFactorizationReport {
    pub violations: Vec<DegreeViolation>,
    /// Coloured copies that are not present in the host, or colours outside `1..=k`.
    pub invalid_copies: usize,
}

impl PartialFactorizationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.invalid_copies == 0
    }
}

/// Checks that every class-degree is within its cap.
pub fn is_partial_factorization(
    host: &MultiHypergraph,
    coloring: &Coloring,
    caps: &[u64],
) -> PartialFactorizationReport {
    let invalid_copies = coloring
        .iter()
        .filter(|(c, col)| !host.has_copy(c) || coloring.check_color(*col).is_err())
        .count();
    let mut violations = Vec::new();
    for (j, row) in class_degrees(host, coloring).iter().enumerate() {
        let cap = caps.get(j).copied().unwrap_or(0);
        for (&v, &deg) in row {
            if deg > cap {
                violations.push(DegreeViolation {
                    vertex: v,
                    color: Color::from_index(j),
                    degree: deg,
                    cap,
                });
            }
        }
    }
    PartialFactorizationReport {
        violations,
        invalid_copies,
    }
}

/// Parameters of an embedding job.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub n: u32,
    pub h: usize,
    pub lambda: u64,
    pub m: u32,
    pub r: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<u64>>,
}

impl Instance {
    pub fn new(n: u32, h: usize, lambda: u64, m: u32, r: Vec<u64>, s: Option<Vec<u64>>) -> Result<Instance> {
        let inst = Instance { n, h, lambda, m, r, s };
        inst.validate()?;
        Ok(inst)
    }

    /// `k` copies of the same `r`.
    pub fn uniform(n: u32, h: usize, lambda: u64, m: u32, r: u64, k: usize) -> Result<Instance> {
        Instance::new(n, h, lambda, m, vec![r; k], None)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h < 2 {
            return Err(Error::InvalidParams(format!("h = {} < 2", self.h)));
        }
        if self.lambda == 0 {
            return Err(Error::InvalidParams("lambda must be positive".into()));
        }
        if (self.m as usize) < self.h || self.n < self.m {
            return Err(Error::InvalidParams(format!(
                "need n >= m >= h (n={}, m={}, h={})",
                self.n, self.m, self.h
            )));
        }
        if self.r.is_empty() {
            return Err(Error::InvalidParams("r-vector is empty".into()));
        }
        if self.r.contains(&0) {
            return Err(Error::InvalidParams("r-vector entries must be positive".into()));
        }
        if let Some(s) = &self.s {
            if s.len() > self.r.len() {
                return Err(Error::InvalidParams(format!("q = {} > k = {}", s.len(), self.r.len())));
            }
            for (i, (&si, &ri)) in s.iter().zip(&self.r).enumerate() {
                if si == 0 || si > ri {
                    return Err(Error::InvalidParams(format!(
                        "need 1 <= s_{0} <= r_{0} (s={si}, r={ri})",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.r.len()
    }

    pub fn q(&self) -> usize {
        self.s.as_ref().map_or(0, Vec::len)
    }

    /// λ·C(n−1, h−1): the vertex degree of λK_n^h.
    pub fn d(&self) -> u64 {
        self.lambda * binom(self.n as u64 - 1, self.h as u64 - 1)
    }

    /// λ·C(m−1, h−1).
    pub fn c(&self) -> u64 {
        self.lambda * binom(self.m as u64 - 1, self.h as u64 - 1)
    }

    /// `r_j` for a 1-based colour.
    pub fn r_of(&self, color: Color) -> u64 {
        self.r[color.index()]
    }

    pub fn colors(&self) -> impl Iterator<Item = Color> {
        (0..self.k()).map(Color::from_index)
    }

    /// The lower bound on `n` that the constructions are proven for.
    pub fn n_bound(&self) -> u64 {
        (self.h as u64 - 1) * (2 * self.m as u64 - 1)
    }

    /// Same parameters with the s-vector dropped.
    pub fn without_s(&self) -> Instance {
        Instance {
            s: None,
            ..self.clone()
        }
    }
}
