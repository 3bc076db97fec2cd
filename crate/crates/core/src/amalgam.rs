//! The amalgamated hypergraph: the `n − m` future vertices collapsed into a
//! single vertex alpha, coloured in phases so that every base vertex ends at
//! degree exactly `r_j` in class `j`.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::connectivity::UnionFind;
use crate::error::{Error, Result};
use crate::model::{
    ALPHA, Color, Coloring, EdgeCopy, Instance, MultiEdge, MultiHypergraph, Vertex, binom,
    is_partial_factorization, subsets,
};

/// Multiplicity of one alpha-cell `X α^i` and how it is split among colours.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellCounts {
    pub mult: u64,
    /// Coloured copies per colour, indexed by `Color::index`.
    pub colored: Vec<u64>,
}

impl CellCounts {
    pub fn uncolored(&self) -> u64 {
        self.mult.saturating_sub(self.colored.iter().sum::<u64>())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Phase {
    Built,
    BaseFilled,
    StarColored,
    PenultimateColored,
    Complete,
}

/// The amalgam `H` on `V(G) ∪ {α}` together with its colouring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamState {
    inst: Instance,
    base: MultiHypergraph,
    base_coloring: Coloring,
    cells: BTreeMap<MultiEdge, CellCounts>,
    /// `deg[j][v]` for base vertices `v ∈ 1..=m`; index 0 is unused.
    deg: Vec<Vec<u64>>,
    phase: Phase,
}

/// One row of the serialized amalgam: the cell `X α^alpha`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamEntry {
    pub base: Vec<Vertex>,
    pub alpha: usize,
    pub mult: u64,
    pub class_mult: Vec<u64>,
    pub uncolored: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmalgamSnapshot {
    pub n: u32,
    pub h: usize,
    pub lambda: u64,
    pub m: u32,
    pub phase: Phase,
    pub entries: Vec<AmalgamEntry>,
}

fn alpha_edge(x: &[Vertex], i: usize) -> MultiEdge {
    let mut v = x.to_vec();
    v.extend(std::iter::repeat_n(ALPHA, i));
    MultiEdge::new(v)
}

/// Non-alpha part of an edge.
pub fn base_part(edge: &MultiEdge) -> Vec<Vertex> {
    edge.vertices().iter().copied().filter(|&v| v != ALPHA).collect()
}

/// Checks that `host` is exactly λK_m^h on `1..=m`.
fn check_complete(host: &MultiHypergraph, inst: &Instance) -> Result<()> {
    if host.h() != inst.h {
        return Err(Error::Validation(format!("input has h = {} but instance says {}", host.h(), inst.h)));
    }
    let expected: Vec<Vertex> = (1..=inst.m).map(Vertex).collect();
    if !host.vertices().iter().copied().eq(expected.iter().copied()) {
        return Err(Error::VertexMismatch(format!("input vertices must be 1..={}", inst.m)));
    }
    let want = binom(inst.m as u64, inst.h as u64);
    if host.distinct_edge_count() as u64 != want || host.edges().any(|(_, mu)| mu != inst.lambda) {
        return Err(Error::Validation(format!(
            "input is not lambda*K_{}^{} with lambda = {}",
            inst.m, inst.h, inst.lambda
        )));
    }
    Ok(())
}

impl AmalgamState {
    /// Builds the uncoloured amalgam around a partially coloured λK_m^h.
    pub fn build(host: &MultiHypergraph, coloring: &Coloring, inst: &Instance) -> Result<AmalgamState> {
        inst.validate()?;
        check_complete(host, inst)?;
        coloring.validate(host)?;
        if let Some((_, c)) = coloring.iter().find(|(_, c)| c.index() >= inst.k()) {
            return Err(Error::UnknownColor(c, inst.k()));
        }
        let report = is_partial_factorization(host, coloring, &inst.r);
        if !report.passed() {
            let v = &report.violations[0];
            return Err(Error::NotPartialFactorization(format!(
                "vertex {} has degree {} > r_{} = {} in class {}",
                v.vertex, v.degree, v.color, v.cap, v.color
            )));
        }
        let k = inst.k();
        let h = inst.h;
        let p = (inst.n - inst.m) as u64;
        let mut cells = BTreeMap::new();
        for i in 1..=h {
            let mult = inst.lambda * binom(p, i as u64);
            for x in subsets(inst.m, h - i) {
                cells.insert(
                    alpha_edge(&x, i),
                    CellCounts {
                        mult,
                        colored: vec![0; k],
                    },
                );
            }
        }
        let mut base_coloring = Coloring::new(k);
        let mut deg = vec![vec![0u64; inst.m as usize + 1]; k];
        for (copy, color) in coloring.iter() {
            base_coloring.assign(copy.clone(), color)?;
            for v in copy.edge.vertices() {
                deg[color.index()][v.0 as usize] += 1;
            }
        }
        Ok(AmalgamState {
            inst: inst.clone(),
            base: host.clone(),
            base_coloring,
            cells,
            deg,
            phase: Phase::Built,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn base(&self) -> &MultiHypergraph {
        &self.base
    }

    /// Colouring of the base copies (complete once phase 0 has run).
    pub fn base_coloring(&self) -> &Coloring {
        &self.base_coloring
    }

    /// Alpha-cells keyed by their multiset edge `X α^i`, `i ≥ 1`.
    pub fn cells(&self) -> &BTreeMap<MultiEdge, CellCounts> {
        &self.cells
    }

    pub fn cell(&self, x: &[Vertex], i: usize) -> Option<&CellCounts> {
        self.cells.get(&alpha_edge(x, i))
    }

    /// Class-`j` degree of a base vertex.
    pub fn degree(&self, x: Vertex, j: Color) -> u64 {
        self.deg[j.index()][x.0 as usize]
    }

    pub fn alpha_degree(&self, j: Color) -> u64 {
        self.cells
            .iter()
            .map(|(e, c)| e.occurrences(ALPHA) * c.colored[j.index()])
            .sum()
    }

    /// `mult_{H(j)}(*α^l)`: class-`j` copies with exactly `l` alphas.
    pub fn mult_by_alpha(&self, j: Color, l: usize) -> u64 {
        if l == 0 {
            return self.base_coloring.class(j).count() as u64;
        }
        self.cells
            .iter()
            .filter(|(e, _)| e.occurrences(ALPHA) as usize == l)
            .map(|(_, c)| c.colored[j.index()])
            .sum()
    }

    fn check_phase(&self, want: Phase) -> Result<()> {
        if self.phase != want {
            return Err(Error::Contract(format!("phase {:?} expected, state is at {:?}", want, self.phase)));
        }
        Ok(())
    }

    /// Colours with residual room at every vertex of `xs`, most room at the
    /// tightest vertex first; ties go to the smaller colour.
    fn roomy_colors(&self, xs: &[Vertex]) -> Vec<usize> {
        let room = |j: usize| xs.iter().map(|x| self.inst.r[j] - self.deg[j][x.0 as usize]).min().unwrap_or(0);
        let mut out: Vec<usize> = (0..self.inst.k()).filter(|&j| room(j) > 0).collect();
        out.sort_by_key(|&j| (std::cmp::Reverse(room(j)), j));
        out
    }

    /// Whether adding `xs` to base class `j` leaves its component `r_j`-regular.
    fn closes_regular_component(&self, xs: &[Vertex], j: usize) -> bool {
        let m = self.inst.m as usize;
        let mut uf = UnionFind::new(m + 1);
        let mut edges: Vec<Vec<Vertex>> = self
            .base_coloring
            .class(Color::from_index(j))
            .map(|c| c.edge.vertices().to_vec())
            .collect();
        edges.push(xs.to_vec());
        for e in &edges {
            for v in &e[1..] {
                uf.union(e[0].0 as usize, v.0 as usize);
            }
        }
        let root = uf.find(xs[0].0 as usize);
        (1..=m).filter(|&v| uf.find(v) == root).all(|v| {
            let extra = u64::from(xs.iter().any(|x| x.0 as usize == v));
            self.deg[j][v] + extra == self.inst.r[j]
        })
    }

    /// Greedily colours any uncoloured base copy, spreading copies over the
    /// colours so no class closes up on the base alone.
    pub fn fill_base_coloring(&mut self) -> Result<()> {
        self.fill_base_coloring_protecting(&BTreeSet::new())
    }

    /// As [`AmalgamState::fill_base_coloring`], but a colour in `protect` is
    /// only used when no other colour fits if it would turn a component of
    /// its base class `r_j`-regular.
    pub fn fill_base_coloring_protecting(&mut self, protect: &BTreeSet<Color>) -> Result<()> {
        self.check_phase(Phase::Built)?;
        let uncolored: Vec<EdgeCopy> = self.base_coloring.uncolored(&self.base).collect();
        for copy in uncolored {
            let xs = copy.edge.vertices().to_vec();
            let candidates = self.roomy_colors(&xs);
            let j = candidates
                .iter()
                .copied()
                .find(|&j| !protect.contains(&Color::from_index(j)) || !self.closes_regular_component(&xs, j))
                .or_else(|| candidates.first().copied())
                .ok_or_else(|| Error::ColoringStuck {
                    edge: xs.clone(),
                    alpha: 0,
                })?;
            for x in &xs {
                self.deg[j][x.0 as usize] += 1;
            }
            self.base_coloring.assign(copy, Color::from_index(j))?;
        }
        self.phase = Phase::BaseFilled;
        Ok(())
    }

    /// Colours the `*α^i` cells for `i = 1..=h−2` in that order, keeping
    /// every base degree within `r_j`.
    pub fn color_star_edges(&mut self) -> Result<()> {
        self.check_phase(Phase::BaseFilled)?;
        if self.inst.n < self.inst.n_bound() as u32 {
            warn!(
                "n = {} is below (h-1)(2m-1) = {}; the greedy may get stuck",
                self.inst.n,
                self.inst.n_bound()
            );
        }
        let h = self.inst.h;
        for i in 1..h.saturating_sub(1) {
            for x in subsets(self.inst.m, h - i) {
                let key = alpha_edge(&x, i);
                let mut remaining = self.cells[&key].mult;
                let mut add = vec![0u64; self.inst.k()];
                for (j, slot) in add.iter_mut().enumerate() {
                    if remaining == 0 {
                        break;
                    }
                    let room = x
                        .iter()
                        .map(|v| self.inst.r[j] - self.deg[j][v.0 as usize])
                        .min()
                        .unwrap_or(0);
                    let take = room.min(remaining);
                    if take > 0 {
                        *slot = take;
                        remaining -= take;
                        for v in &x {
                            self.deg[j][v.0 as usize] += take;
                        }
                    }
                }
                let cell = self.cells.get_mut(&key).expect("cell exists");
                for (c, a) in cell.colored.iter_mut().zip(&add) {
                    *c += a;
                }
                if remaining > 0 {
                    return Err(Error::ColoringStuck {
                        edge: key.vertices().to_vec(),
                        alpha: i,
                    });
                }
            }
        }
        self.phase = Phase::StarColored;
        Ok(())
    }

    /// Gives each `x α^{h−1}` cell exactly `r_j − deg(x, j)` copies of colour `j`.
    pub fn color_penultimate_edges(&mut self) -> Result<()> {
        self.check_phase(Phase::StarColored)?;
        let h = self.inst.h;
        for v in 1..=self.inst.m {
            let x = Vertex(v);
            let key = alpha_edge(&[x], h - 1);
            let mut need = Vec::with_capacity(self.inst.k());
            for j in 0..self.inst.k() {
                let d = self.deg[j][v as usize];
                if d > self.inst.r[j] {
                    return Err(Error::Contract(format!("vertex {x} exceeds r_{} before the penultimate phase", j + 1)));
                }
                need.push(self.inst.r[j] - d);
            }
            let total: u64 = need.iter().sum();
            let cell = self.cells.get_mut(&key).expect("cell exists");
            if total != cell.uncolored() {
                return Err(Error::CapacityMismatch {
                    vertex: x,
                    needed: total,
                    available: cell.uncolored(),
                });
            }
            for (j, t) in need.into_iter().enumerate() {
                cell.colored[j] += t;
                self.deg[j][v as usize] += t;
            }
        }
        self.phase = Phase::PenultimateColored;
        Ok(())
    }

    /// Splits the `α^h` copies among colours so that alpha ends at degree
    /// `r_j(n − m)` in every class.
    pub fn color_full_alpha_edges(&mut self) -> Result<()> {
        self.check_phase(Phase::PenultimateColored)?;
        let inst = &self.inst;
        let h = inst.h;
        if (inst.n as u64) < (h as u64) * inst.m as u64 {
            warn!("n = {} < hm = {}; alpha^h budgets may go negative", inst.n, h as u64 * inst.m as u64);
        }
        let mut budgets = Vec::with_capacity(inst.k());
        for j in inst.colors() {
            let r = inst.r_of(j) as i128;
            if (r * inst.n as i128) % h as i128 != 0 {
                return Err(Error::NotAdmissible(format!("h = {h} does not divide r_{j}*n")));
            }
            let mut value = r * inst.n as i128 / h as i128 - r * inst.m as i128;
            for l in 0..h - 1 {
                value += (h - l - 1) as i128 * self.mult_by_alpha(j, l) as i128;
            }
            if value < 0 {
                return Err(Error::NegativeBudget { color: j, value });
            }
            budgets.push(value as u64);
        }
        let key = alpha_edge(&[], h);
        let cell = self.cells.get_mut(&key).expect("alpha^h cell exists");
        if budgets.iter().sum::<u64>() != cell.mult {
            return Err(Error::Contract(format!(
                "alpha^h budgets sum to {} but the cell holds {}",
                budgets.iter().sum::<u64>(),
                cell.mult
            )));
        }
        cell.colored = budgets;
        self.phase = Phase::Complete;
        Ok(())
    }

    /// Runs every colouring phase in order.
    pub fn run_phases(&mut self) -> Result<()> {
        self.fill_base_coloring()?;
        self.color_star_edges()?;
        self.color_penultimate_edges()?;
        self.color_full_alpha_edges()
    }

    /// Overwrites one colour count of a cell. Intended for audits and
    /// mutation tests; it bypasses every phase invariant.
    pub fn set_class_mult(&mut self, edge: &MultiEdge, j: Color, value: u64) -> Result<()> {
        let cell = self
            .cells
            .get_mut(edge)
            .ok_or_else(|| Error::Validation(format!("no alpha-cell {edge}")))?;
        let old = cell.colored[j.index()];
        cell.colored[j.index()] = value;
        for v in base_part(edge) {
            let d = &mut self.deg[j.index()][v.0 as usize];
            *d = *d + value - old;
        }
        Ok(())
    }

    /// Colour class `j` of the amalgam as a hypergraph on `1..=m` plus alpha.
    pub fn class_hypergraph(&self, j: Color) -> MultiHypergraph {
        let mut g = MultiHypergraph::on_range(self.inst.h, self.inst.m);
        g.add_amalgam_vertex(ALPHA);
        for copy in self.base_coloring.class(j) {
            g.add_edge(copy.edge.clone(), 1).expect("base edge is valid");
        }
        for (e, c) in &self.cells {
            g.add_edge(e.clone(), c.colored[j.index()]).expect("cell edge is valid");
        }
        g
    }

    pub fn snapshot(&self) -> AmalgamSnapshot {
        let k = self.inst.k();
        let mut entries = Vec::new();
        for (e, mult) in self.base.edges() {
            let mut class_mult = vec![0u64; k];
            for c in 0..mult as u32 {
                if let Some(col) = self.base_coloring.color_of(&EdgeCopy::new(e.clone(), c)) {
                    class_mult[col.index()] += 1;
                }
            }
            let colored: u64 = class_mult.iter().sum();
            entries.push(AmalgamEntry {
                base: e.vertices().to_vec(),
                alpha: 0,
                mult,
                class_mult,
                uncolored: mult - colored,
            });
        }
        for (e, c) in &self.cells {
            entries.push(AmalgamEntry {
                base: base_part(e),
                alpha: e.occurrences(ALPHA) as usize,
                mult: c.mult,
                class_mult: c.colored.clone(),
                uncolored: c.uncolored(),
            });
        }
        AmalgamSnapshot {
            n: self.inst.n,
            h: self.inst.h,
            lambda: self.inst.lambda,
            m: self.inst.m,
            phase: self.phase,
            entries,
        }
    }
}

/// Convenience wrapper: build and run all phases.
pub fn build_amalgam(host: &MultiHypergraph, coloring: &Coloring, inst: &Instance) -> Result<AmalgamState> {
    let mut state = AmalgamState::build(host, coloring, inst)?;
    state.run_phases()?;
    Ok(state)
}

/// [`build_amalgam`] whose base fill avoids closing a class in `protect`
/// into a regular component.
pub fn build_amalgam_protecting(
    host: &MultiHypergraph,
    coloring: &Coloring,
    inst: &Instance,
    protect: &BTreeSet<Color>,
) -> Result<AmalgamState> {
    let mut state = AmalgamState::build(host, coloring, inst)?;
    state.fill_base_coloring_protecting(protect)?;
    state.color_star_edges()?;
    state.color_penultimate_edges()?;
    state.color_full_alpha_edges()?;
    Ok(state)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassIdentities {
    pub color: Color,
    /// Every base vertex has class degree `r_j`.
    pub base_regular: bool,
    /// `r_j m = Σ_{l<h} (h−l)·mult_j(*α^l)`.
    pub weighted_count: bool,
    /// `deg(α, j) = r_j (n − m)`.
    pub alpha_degree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub classes: Vec<ClassIdentities>,
    /// Every cell fully coloured and per-cell counts sum to the cell multiplicity.
    pub conservation: bool,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.conservation
            && self
                .classes
                .iter()
                .all(|c| c.base_regular && c.weighted_count && c.alpha_degree)
    }
}

/// Re-derives every degree from the tables and checks the phase identities.
pub fn assert_amalgam_identities(state: &AmalgamState) -> IdentityReport {
    let inst = &state.inst;
    let h = inst.h;
    let k = inst.k();
    let mut deg = vec![vec![0u64; inst.m as usize + 1]; k];
    for (copy, color) in state.base_coloring.iter() {
        for v in copy.edge.vertices() {
            deg[color.index()][v.0 as usize] += 1;
        }
    }
    for (e, c) in &state.cells {
        for v in base_part(e) {
            for j in 0..k {
                deg[j][v.0 as usize] += c.colored[j];
            }
        }
    }
    let conservation = state.cells.values().all(|c| c.colored.iter().sum::<u64>() == c.mult)
        && state.base_coloring.uncolored(&state.base).next().is_none();
    let classes = inst
        .colors()
        .map(|j| {
            let r = inst.r_of(j);
            let base_regular = (1..=inst.m as usize).all(|v| deg[j.index()][v] == r);
            let weighted: u64 = (0..h).map(|l| (h - l) as u64 * state.mult_by_alpha(j, l)).sum();
            ClassIdentities {
                color: j,
                base_regular,
                weighted_count: weighted == r * inst.m as u64,
                alpha_degree: state.alpha_degree(j) == r * (inst.n - inst.m) as u64,
            }
        })
        .collect();
    IdentityReport { classes, conservation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::complete_hypergraph;

    fn k4_walkthrough() -> AmalgamState {
        let inst = Instance::new(4, 2, 1, 2, vec![1, 1, 1], None).unwrap();
        let g = complete_hypergraph(2, 2, 1).unwrap();
        let mut c = Coloring::new(3);
        c.assign(EdgeCopy::new(MultiEdge::from_ids(&[1, 2]), 0), Color(1)).unwrap();
        AmalgamState::build(&g, &c, &inst).unwrap()
    }

    #[test]
    fn build_multiplicities() {
        let s = k4_walkthrough();
        assert_eq!(s.cell(&[Vertex(1)], 1).unwrap().mult, 2);
        assert_eq!(s.cell(&[Vertex(2)], 1).unwrap().mult, 2);
        assert_eq!(s.cell(&[], 2).unwrap().mult, 1);
        assert_eq!(s.base().multiplicity(&MultiEdge::from_ids(&[1, 2])), 1);
    }

    #[test]
    fn walkthrough_phases() {
        let mut s = k4_walkthrough();
        s.fill_base_coloring().unwrap();
        s.color_star_edges().unwrap();
        s.color_penultimate_edges().unwrap();
        assert_eq!(s.cell(&[Vertex(1)], 1).unwrap().colored, vec![0, 1, 1]);
        s.color_full_alpha_edges().unwrap();
        assert_eq!(s.cell(&[], 2).unwrap().colored, vec![1, 0, 0]);
        for j in 1..=3 {
            assert_eq!(s.alpha_degree(Color(j)), 2);
        }
        assert!(assert_amalgam_identities(&s).passed());
    }

    #[test]
    fn n_equals_m_keeps_only_base() {
        let inst = Instance::new(4, 2, 1, 4, vec![1, 1, 1], None).unwrap();
        let g = complete_hypergraph(4, 2, 1).unwrap();
        let s = build_amalgam(&g, &Coloring::new(3), &inst).unwrap();
        assert!(s.cells().values().all(|c| c.mult == 0));
        assert!(assert_amalgam_identities(&s).passed());
    }

    #[test]
    fn total_copies_follow_vandermonde() {
        let inst = Instance::uniform(38, 3, 1, 10, 6, 111).unwrap();
        let g = complete_hypergraph(10, 3, 1).unwrap();
        let s = AmalgamState::build(&g, &Coloring::new(111), &inst).unwrap();
        let total: u64 = s.cells().values().map(|c| c.mult).sum::<u64>() + g.total_copies();
        assert_eq!(total, binom(38, 3));
    }

    #[test]
    fn star_phase_h3() {
        let inst = Instance::uniform(11, 3, 1, 3, 3, 15).unwrap();
        let g = complete_hypergraph(3, 3, 1).unwrap();
        let mut s = AmalgamState::build(&g, &Coloring::new(15), &inst).unwrap();
        s.fill_base_coloring().unwrap();
        s.color_star_edges().unwrap();
        for e in subsets(3, 2) {
            assert_eq!(s.cell(&e, 1).unwrap().uncolored(), 0);
        }
        for v in 1..=3 {
            for j in inst.colors() {
                assert!(s.degree(Vertex(v), j) <= 3);
            }
        }
    }

    #[test]
    fn corrupted_count_breaks_identity() {
        let inst = Instance::uniform(11, 3, 1, 3, 3, 15).unwrap();
        let g = complete_hypergraph(3, 3, 1).unwrap();
        let mut s = build_amalgam(&g, &Coloring::new(15), &inst).unwrap();
        assert!(assert_amalgam_identities(&s).passed());
        let edge = alpha_edge(&[Vertex(1), Vertex(2)], 1);
        let j = Color(1);
        let old = s.cells()[&edge].colored[0];
        s.set_class_mult(&edge, j, old + 1).unwrap();
        let rep = assert_amalgam_identities(&s);
        assert!(!rep.classes[0].weighted_count);
        assert!(rep.classes[1..].iter().all(|c| c.weighted_count));
    }

    #[test]
    fn rejects_non_partial_input() {
        let inst = Instance::new(4, 2, 1, 3, vec![1, 1, 1], None).unwrap();
        let g = complete_hypergraph(3, 2, 1).unwrap();
        let mut c = Coloring::new(3);
        for copy in g.copies() {
            c.assign(copy, Color(1)).unwrap();
        }
        assert!(matches!(AmalgamState::build(&g, &c, &inst), Err(Error::NotPartialFactorization(_))));
    }

    #[test]
    fn phases_run_in_order() {
        let mut s = k4_walkthrough();
        assert!(matches!(s.color_star_edges(), Err(Error::Contract(_))));
    }

    #[test]
    fn snapshot_round_trips_through_json() {
        let mut s = k4_walkthrough();
        s.run_phases().unwrap();
        let snap = s.snapshot();
        let text = serde_json::to_string(&snap).unwrap();
        let back: AmalgamSnapshot = serde_json::from_str(&text).unwrap();
        assert_eq!(back, snap);
        assert_eq!(snap.entries.len(), 4);
    }
}
