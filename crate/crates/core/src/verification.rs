//! Independent checks of finished factorizations, mutation helpers for
//! fuzzing the checker, and an exhaustive oracle for tiny instances.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::seq::IteratorRandom;
use serde::{Deserialize, Serialize};

use crate::arithmetic::{check_admissible, ryser_diagnostic};
use crate::connectivity::{UnionFind, WingReport, is_connected};
use crate::detachment::DetachmentResult;
use crate::error::{Error, Result};
use crate::model::{
    Color, Coloring, EdgeCopy, Instance, MultiEdge, MultiHypergraph, Vertex, binom, class_subhypergraph,
    complete_hypergraph, is_partial_factorization, subsets,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCertificate {
    pub color: Color,
    pub r: u64,
    /// Degree exactly `r` at every vertex.
    pub regular: bool,
    /// Every vertex meets the class.
    pub spanning: bool,
    pub connected: bool,
    pub connectivity_requested: bool,
}

impl ClassCertificate {
    pub fn passed(&self) -> bool {
        self.regular && self.spanning && (self.connected || !self.connectivity_requested)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: u32,
    pub h: usize,
    pub lambda: u64,
    pub all_colored: bool,
    pub classes: Vec<ClassCertificate>,
    /// Every h-subset of `1..=n` has multiplicity `λ` and nothing else occurs.
    pub multiplicity_ok: bool,
    pub preservation_ok: bool,
    pub admissibility_ok: bool,
    pub wing_reports: Vec<WingReport>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.all_colored
            && self.multiplicity_ok
            && self.preservation_ok
            && self.admissibility_ok
            && self.classes.iter().all(ClassCertificate::passed)
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.all_colored {
            out.push("some edge copies are uncoloured".to_string());
        }
        if !self.multiplicity_ok {
            out.push(format!("multiplicities differ from {}K_{}^{}", self.lambda, self.n, self.h));
        }
        if !self.preservation_ok {
            out.push("input colouring not preserved".to_string());
        }
        if !self.admissibility_ok {
            out.push("instance not admissible".to_string());
        }
        for c in self.classes.iter().filter(|c| !c.passed()) {
            out.push(format!(
                "class {}: regular={} spanning={} connected={}",
                c.color, c.regular, c.spanning, c.connected
            ));
        }
        out
    }
}

fn multiplicity_ok(g: &MultiHypergraph, n: u32, h: usize, lambda: u64) -> bool {
    let expected: BTreeSet<Vertex> = (1..=n).map(Vertex).collect();
    if g.h() != h || *g.vertices() != expected {
        return false;
    }
    let mut count = 0u64;
    for (e, mult) in g.edges() {
        if e.has_repeats() || mult != lambda || e.vertices().iter().any(|v| !expected.contains(v)) {
            return false;
        }
        count += 1;
    }
    count == binom(n as u64, h as u64)
}

/// Checks that `coloring` is an `r`-factorization of `λK_n^h` on `g`.
/// Never fails: every problem is recorded in the certificate.
pub fn verify_factorization(
    g: &MultiHypergraph,
    coloring: &Coloring,
    inst: &Instance,
    connected: &BTreeSet<Color>,
) -> Certificate {
    let all_colored = coloring.k() == inst.k()
        && coloring.validate(g).is_ok()
        && coloring.uncolored(g).next().is_none()
        && coloring.iter().all(|(_, c)| c.0 >= 1 && c.index() < inst.k());
    let classes = inst
        .colors()
        .map(|j| {
            let class = class_subhypergraph(g, coloring, j);
            let r = inst.r_of(j);
            let degrees: Vec<u64> = g.vertices().iter().map(|&v| class.degree(v)).collect();
            ClassCertificate {
                color: j,
                r,
                regular: degrees.iter().all(|&d| d == r),
                spanning: degrees.iter().all(|&d| d > 0),
                connected: is_connected(&class),
                connectivity_requested: connected.contains(&j),
            }
        })
        .collect();
    Certificate {
        n: inst.n,
        h: inst.h,
        lambda: inst.lambda,
        all_colored,
        classes,
        multiplicity_ok: multiplicity_ok(g, inst.n, inst.h, inst.lambda),
        preservation_ok: true,
        admissibility_ok: check_admissible(inst),
        wing_reports: Vec::new(),
    }
}

/// True iff every coloured input copy has the same colour in the output.
pub fn verify_extension(input_host: &MultiHypergraph, input: &Coloring, output: &DetachmentResult) -> Result<bool> {
    if !input_host.vertices().is_subset(output.hypergraph.vertices()) {
        return Err(Error::VertexMismatch(
            "input vertices are not all present in the output".into(),
        ));
    }
    Ok(input
        .iter()
        .all(|(copy, c)| output.hypergraph.has_copy(copy) && output.coloring.color_of(copy) == Some(c)))
}

/// A single corruption of a finished factorization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutation {
    Recolor { copy: EdgeCopy, to: Color },
    Delete { copy: EdgeCopy },
    /// Identify vertex `from` with `into`.
    Merge { from: Vertex, into: Vertex },
}

pub fn apply_mutation(g: &MultiHypergraph, coloring: &Coloring, mutation: &Mutation) -> (MultiHypergraph, Coloring) {
    match mutation {
        Mutation::Recolor { copy, to } => {
            let mut c = coloring.clone();
            c.widen(to.index() + 1);
            c.assign(copy.clone(), *to).expect("recolour target is in range");
            (g.clone(), c)
        }
        Mutation::Delete { copy } => {
            // Copies above the deleted one shift down so indices stay dense.
            let mut g2 = g.clone();
            g2.remove_edge(&copy.edge, 1);
            let mut c = Coloring::new(coloring.k());
            for (cp, col) in coloring.iter() {
                if cp.edge != copy.edge || cp.copy < copy.copy {
                    c.assign(cp.clone(), col).expect("same palette");
                } else if cp.copy > copy.copy {
                    c.assign(EdgeCopy::new(cp.edge.clone(), cp.copy - 1), col).expect("same palette");
                }
            }
            (g2, c)
        }
        Mutation::Merge { from, into } => {
            let rename = |e: &MultiEdge| {
                MultiEdge::new(e.vertices().iter().map(|&v| if v == *from { *into } else { v }).collect())
            };
            let mut g2 = MultiHypergraph::new(g.h(), g.vertices().iter().copied().filter(|v| v != from));
            // The merged vertex may now repeat inside an edge, like alpha.
            g2.add_amalgam_vertex(*into);
            let mut offset: BTreeMap<MultiEdge, u32> = BTreeMap::new();
            let mut c = Coloring::new(coloring.k());
            for (e, mult) in g.edges() {
                let e2 = rename(e);
                g2.add_edge(e2.clone(), mult).expect("renamed edge keeps size h");
                let base = offset.entry(e2.clone()).or_insert(0);
                for i in 0..mult as u32 {
                    if let Some(col) = coloring.color_of(&EdgeCopy::new(e.clone(), i)) {
                        c.assign(EdgeCopy::new(e2.clone(), *base + i), col).expect("same palette");
                    }
                }
                *base += mult as u32;
            }
            (g2, c)
        }
    }
}

/// Picks one of the three corruption kinds uniformly; `None` when `g` has
/// no copies.
pub fn random_mutation<R: Rng>(g: &MultiHypergraph, coloring: &Coloring, rng: &mut R) -> Option<Mutation> {
    let copy = g.copies().choose(rng)?;
    Some(match rng.gen_range(0..3) {
        0 => {
            let k = coloring.k().max(1);
            let old = coloring.color_of(&copy);
            let mut to = Color::from_index(rng.gen_range(0..k));
            if Some(to) == old {
                to = Color::from_index((to.index() + 1) % (k + 1));
            }
            Mutation::Recolor { copy, to }
        }
        1 => Mutation::Delete { copy },
        _ => {
            let verts: Vec<Vertex> = g.vertices().iter().copied().collect();
            let a = verts[rng.gen_range(0..verts.len())];
            let mut b = verts[rng.gen_range(0..verts.len())];
            if a == b {
                b = verts[(verts.iter().position(|&v| v == a).unwrap() + 1) % verts.len()];
            }
            Mutation::Merge { from: a, into: b }
        }
    })
}

/// Limits of the brute-force oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLimits {
    pub max_copies: u64,
    pub max_count: u64,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_copies: 64,
            max_count: 1_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOutcome {
    pub found: bool,
    /// Extensions counted up to identical copies of the same h-set.
    pub count: u64,
    /// The count stopped at `max_count`.
    pub capped: bool,
    pub witness: Option<(MultiHypergraph, Coloring)>,
}

/// Exact-cover style search over how many free copies of each h-set take
/// each colour. Branches on the (vertex, colour) demand with the fewest
/// candidate sets; later siblings ban the earlier candidates, so every
/// extension is reached once.
struct Search<'a> {
    inst: &'a Instance,
    connected: &'a BTreeSet<Color>,
    limits: OracleLimits,
    /// Vertex indices (0-based) of every h-set.
    sets: Vec<Vec<usize>>,
    /// Sets through each vertex.
    at: Vec<Vec<usize>>,
    /// Uncoloured copies left per set.
    free: Vec<u64>,
    /// `deficit[v][j]`: class degree still missing at `v`.
    deficit: Vec<Vec<u64>>,
    /// Free copies of set `s` given colour `j` so far.
    take: Vec<Vec<u64>>,
    /// Set `s` carries colour `j` in the input.
    fixed_on: Vec<Vec<bool>>,
    banned: Vec<Vec<bool>>,
    /// Input copies, takes and bans that mention each colour.
    touched: Vec<u64>,
    /// Existence only: colours nobody has touched yet with equal `r` and
    /// connectivity demand are interchangeable.
    merge_fresh: bool,
    count: u64,
    witness: Option<Vec<Vec<u64>>>,
}

impl Search<'_> {
    fn allowed(&self, s: usize, j: usize) -> bool {
        self.free[s] > 0 && !self.banned[s][j] && self.sets[s].iter().all(|&v| self.deficit[v][j] > 0)
    }

    fn room(&self, s: usize, j: usize) -> u64 {
        self.sets[s].iter().map(|&v| self.deficit[v][j]).min().unwrap_or(0).min(self.free[s])
    }

    fn wants_connected(&self, j: usize) -> bool {
        self.connected.contains(&Color::from_index(j))
    }

    /// Each connected class could still join all vertices using the edges it
    /// has plus every set that may still take it.
    fn connectable(&self) -> bool {
        let n = self.deficit.len();
        self.connected.iter().all(|&c| {
            let j = c.index();
            let mut uf = UnionFind::new(n);
            for (s, vs) in self.sets.iter().enumerate() {
                if self.fixed_on[s][j] || self.take[s][j] > 0 || self.allowed(s, j) {
                    for &v in &vs[1..] {
                        uf.union(vs[0], v);
                    }
                }
            }
            uf.set_count() == 1
        })
    }

    fn leaf_ok(&self, edges: &[MultiEdge], fixed: &Coloring) -> bool {
        if self.free.iter().any(|&f| f > 0) {
            return false;
        }
        if self.connected.is_empty() {
            return true;
        }
        let (g, c) = self.materialize(edges, fixed, &self.take);
        self.connected.iter().all(|&j| is_connected(&class_subhypergraph(&g, &c, j)))
    }

    fn materialize(&self, edges: &[MultiEdge], fixed: &Coloring, take: &[Vec<u64>]) -> (MultiHypergraph, Coloring) {
        let g = complete_hypergraph(self.inst.n, self.inst.h, self.inst.lambda).expect("valid instance");
        let mut c = fixed.clone();
        for (s, e) in edges.iter().enumerate() {
            let mut next = 0u32;
            for (j, &t) in take[s].iter().enumerate() {
                for _ in 0..t {
                    loop {
                        let copy = EdgeCopy::new(e.clone(), next);
                        next += 1;
                        if fixed.color_of(&copy).is_none() {
                            c.assign(copy, Color::from_index(j)).expect("colour in range");
                            break;
                        }
                    }
                }
            }
        }
        (g, c)
    }

    fn shift(&mut self, s: usize, j: usize, up: bool) {
        for i in 0..self.sets[s].len() {
            let v = self.sets[s][i];
            if up {
                self.deficit[v][j] += 1;
            } else {
                self.deficit[v][j] -= 1;
            }
        }
        if up {
            self.free[s] += 1;
            self.take[s][j] -= 1;
            self.touched[j] -= 1;
        } else {
            self.free[s] -= 1;
            self.take[s][j] += 1;
            self.touched[j] += 1;
        }
    }

    fn run(&mut self, edges: &[MultiEdge], fixed: &Coloring) {
        if self.count >= self.limits.max_count {
            return;
        }
        let k = self.inst.k();
        // Most constrained demand; a demand the candidates cannot cover ends the branch.
        let mut best: Option<(usize, usize, usize)> = None;
        for v in 0..self.deficit.len() {
            for j in 0..k {
                let need = self.deficit[v][j];
                if need == 0 {
                    continue;
                }
                let mut options = 0;
                let mut supply = 0;
                for &s in &self.at[v] {
                    if self.allowed(s, j) {
                        options += 1;
                        supply += self.room(s, j);
                    }
                }
                if supply < need {
                    return;
                }
                if best.is_none_or(|(_, _, o)| options < o) {
                    best = Some((v, j, options));
                }
            }
        }
        let Some((v, j, _)) = best else {
            if self.leaf_ok(edges, fixed) {
                self.count += 1;
                if self.witness.is_none() {
                    self.witness = Some(self.take.clone());
                }
            }
            return;
        };
        if (0..self.sets.len()).any(|s| self.free[s] > 0 && !(0..k).any(|i| self.allowed(s, i))) {
            return;
        }
        if !self.connectable() {
            return;
        }
        let candidates: Vec<usize> = self.at[v].iter().copied().filter(|&s| self.allowed(s, j)).collect();
        let peers: Vec<usize> = if self.merge_fresh && self.touched[j] == 0 {
            (0..k)
                .filter(|&i| {
                    self.touched[i] == 0
                        && self.inst.r[i] == self.inst.r[j]
                        && self.wants_connected(i) == self.wants_connected(j)
                })
                .collect()
        } else {
            vec![j]
        };
        let mut bans = Vec::new();
        for s in candidates {
            self.shift(s, j, false);
            self.run(edges, fixed);
            self.shift(s, j, true);
            if self.count >= self.limits.max_count {
                break;
            }
            for &i in &peers {
                if !self.banned[s][i] {
                    self.banned[s][i] = true;
                    self.touched[i] += 1;
                    bans.push((s, i));
                }
            }
        }
        for (s, i) in bans {
            self.banned[s][i] = false;
            self.touched[i] -= 1;
        }
    }
}

/// Exhaustive search for extensions of the partial colouring `input` of
/// `λK_m^h` (vertices `1..=m`) to an `r`-factorization of `λK_n^h`, with the
/// classes in `connected` connected. Free copies of one h-set are treated as
/// interchangeable.
pub fn oracle_extend(
    input: &Coloring,
    inst: &Instance,
    connected: &BTreeSet<Color>,
    limits: OracleLimits,
) -> Result<OracleOutcome> {
    run_oracle(input, inst, connected, limits, false)
}

/// Existence-only variant of [`oracle_extend`]: stops at the first witness
/// and also treats still-unused colours with equal `r` (and equal
/// connectivity demand) as interchangeable.
pub fn oracle_exists(input: &Coloring, inst: &Instance, connected: &BTreeSet<Color>, max_copies: u64) -> Result<OracleOutcome> {
    let limits = OracleLimits { max_copies, max_count: 1 };
    run_oracle(input, inst, connected, limits, true)
}

fn run_oracle(
    input: &Coloring,
    inst: &Instance,
    connected: &BTreeSet<Color>,
    limits: OracleLimits,
    merge_fresh: bool,
) -> Result<OracleOutcome> {
    let copies = inst.lambda * binom(inst.n as u64, inst.h as u64);
    if copies > limits.max_copies {
        return Err(Error::CapExceeded {
            copies,
            cap: limits.max_copies,
        });
    }
    let none = OracleOutcome {
        found: false,
        count: 0,
        capped: false,
        witness: None,
    };
    let host = complete_hypergraph(inst.n, inst.h, inst.lambda)?;
    input.validate(&host)?;
    if input.iter().any(|(cp, c)| c.0 == 0 || c.index() >= inst.k() || cp.edge.vertices().iter().any(|v| v.0 > inst.m)) {
        return Err(Error::Validation("input colouring must use colours 1..=k on vertices 1..=m".into()));
    }
    if !is_partial_factorization(&host, input, &inst.r).passed() {
        return Ok(none);
    }
    let k = inst.k();
    let n = inst.n as usize;
    let edges: Vec<MultiEdge> = subsets(inst.n, inst.h).into_iter().map(MultiEdge::new).collect();
    let sets: Vec<Vec<usize>> = edges
        .iter()
        .map(|e| e.vertices().iter().map(|v| v.0 as usize - 1).collect())
        .collect();
    let mut at = vec![Vec::new(); n];
    for (s, vs) in sets.iter().enumerate() {
        for &v in vs {
            at[v].push(s);
        }
    }
    let mut fixed = Coloring::new(k);
    let mut deficit = vec![inst.r.clone(); n];
    let mut free = vec![inst.lambda; sets.len()];
    let mut fixed_on = vec![vec![false; k]; sets.len()];
    let mut touched = vec![0u64; k];
    for (s, e) in edges.iter().enumerate() {
        for i in 0..inst.lambda as u32 {
            let copy = EdgeCopy::new(e.clone(), i);
            if let Some(c) = input.color_of(&copy) {
                for &v in &sets[s] {
                    deficit[v][c.index()] -= 1;
                }
                free[s] -= 1;
                fixed_on[s][c.index()] = true;
                touched[c.index()] += 1;
                fixed.assign(copy, c)?;
            }
        }
    }
    let mut search = Search {
        inst,
        connected,
        limits,
        take: vec![vec![0; k]; sets.len()],
        banned: vec![vec![false; k]; sets.len()],
        sets,
        at,
        free,
        deficit,
        fixed_on,
        touched,
        merge_fresh,
        count: 0,
        witness: None,
    };
    search.run(&edges, &fixed);
    let witness = search.witness.clone().map(|w| search.materialize(&edges, &fixed, &w));
    Ok(OracleOutcome {
        found: search.count > 0,
        count: search.count,
        capped: search.count >= limits.max_count,
        witness,
    })
}

/// Ranges for [`search_counterexample`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub h: Vec<usize>,
    pub m_max: u32,
    pub n_max: u32,
    pub lambda: Vec<u64>,
    /// Exhaustive over partial colourings up to this many, sampled beyond.
    pub max_colorings: usize,
    pub seed: u64,
    pub limits: OracleLimits,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub inst: Instance,
    pub input: Coloring,
    /// Whether the per-class edge-count condition holds for the input.
    pub ryser_ok: bool,
}

/// Uniform admissible instances in `space` whose input colouring is a
/// partial factorization but has no extension, per the oracle. With
/// `connected`, every class must also come out connected.
pub fn search_counterexample(space: &SearchSpace, connected: bool) -> Result<Vec<Finding>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(space.seed);
    let mut findings = Vec::new();
    for &h in &space.h {
        for m in h as u32..=space.m_max {
            for n in m + 1..=space.n_max {
                for &lambda in &space.lambda {
                    if lambda * binom(n as u64, h as u64) > space.limits.max_copies {
                        continue;
                    }
                    let d = lambda * binom(n as u64 - 1, h as u64 - 1);
                    for r in (1..=d).filter(|r| d.is_multiple_of(*r)) {
                        let k = (d / r) as usize;
                        let Ok(inst) = Instance::uniform(n, h, lambda, m, r, k) else {
                            continue;
                        };
                        if !check_admissible(&inst) || (connected && r < 2) {
                            continue;
                        }
                        let wanted: BTreeSet<Color> = if connected { inst.colors().collect() } else { BTreeSet::new() };
                        let base = complete_hypergraph(m, h, lambda)?;
                        for input in partial_colorings(&base, k, inst.r[0], space.max_colorings, &mut rng) {
                            let out = oracle_exists(&input, &inst, &wanted, space.limits.max_copies)?;
                            if !out.found && is_partial_factorization(&base, &input, &inst.r).passed() {
                                let irregular_ok = !connected
                                    || inst.colors().all(|j| {
                                        crate::connectivity::is_irregular(&class_subhypergraph(&base, &input, j), r)
                                    });
                                if irregular_ok {
                                    let ryser_ok = ryser_diagnostic(&base, &input, &inst).passed();
                                    findings.push(Finding { inst: inst.clone(), input, ryser_ok });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(findings)
}

/// Partial colourings of `base` with degree at most `r` per class, up to
/// relabelling nothing: every copy is uncoloured or gets a colour in `1..=k`,
/// copies of one h-set non-decreasing. Exhaustive when the raw count is at
/// most `max`, otherwise `max` random samples.
pub fn partial_colorings<R: Rng>(base: &MultiHypergraph, k: usize, r: u64, max: usize, rng: &mut R) -> Vec<Coloring> {
    let copies: Vec<EdgeCopy> = base.copies().collect();
    let raw = (k as f64 + 1.0).powi(copies.len() as i32);
    let fits = |c: &Coloring| is_partial_factorization(base, c, &vec![r; k]).passed();
    if raw <= max as f64 {
        let mut out = Vec::new();
        let mut digits = vec![0usize; copies.len()];
        loop {
            let ordered = copies.windows(2).zip(digits.windows(2)).all(|(cp, d)| cp[0].edge != cp[1].edge || d[0] <= d[1]);
            if ordered {
                let mut c = Coloring::new(k);
                for (cp, &d) in copies.iter().zip(&digits) {
                    if d > 0 {
                        c.assign(cp.clone(), Color(d as u32)).expect("colour in range");
                    }
                }
                if fits(&c) {
                    out.push(c);
                }
            }
            let mut i = 0;
            while i < digits.len() && digits[i] == k {
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
            digits[i] += 1;
        }
        out
    } else {
        let mut out = Vec::new();
        for _ in 0..max {
            let mut c = Coloring::new(k);
            for cp in &copies {
                let d = rng.gen_range(0..=k);
                if d > 0 {
                    c.assign(cp.clone(), Color(d as u32)).expect("colour in range");
                    if !fits(&c) {
                        c.unassign(cp);
                    }
                }
            }
            out.push(c);
        }
        out
    }
}
