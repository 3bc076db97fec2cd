//! Fair detachment: alpha is split off one new vertex at a time.
//!
//! At remaining weight `w` the new vertex `β` takes one alpha-slot from a
//! selection of copies. Per colour `j` it takes `⌊deg(α,j)/w⌋` or
//! `⌈deg(α,j)/w⌉` slots, and from each cell `X α^i` exactly `mult·i/w`
//! copies (integral for every state the pipelines build, since a cell of
//! weight `w` has multiplicity `λ·C(w,i)`). The selection is a min-cost
//! flow `source → colour → [wing →] cell → sink`; for colours that must end
//! up connected, the first slot taken from each distinct alpha-wing earns a
//! reward, so `β` glues wings together instead of deepening one.

pub mod flow;

use std::collections::{BTreeMap, BTreeSet};

use log::{debug, warn};
use rand::SeedableRng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamState, Phase, assert_amalgam_identities};
use crate::connectivity::{UnionFind, WingCount, count_wings_in};
use crate::error::{Error, Result};
use crate::model::{ALPHA, Color, Coloring, EdgeCopy, MultiEdge, MultiHypergraph, Vertex, subsets};
use flow::MinCostFlow;

/// Attempts per split before the step gives up on connectivity.
const STEP_ATTEMPTS: usize = 8;
/// Full restarts (fresh seeds) before reporting `ConnectivityRepairExhausted`.
pub const DEFAULT_RESTARTS: usize = 6;

/// Partially detached hypergraph: finished edges plus alpha-cells, each with
/// per-colour counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetachState {
    h: usize,
    k: usize,
    weight: u32,
    vertices: BTreeSet<Vertex>,
    cells: BTreeMap<MultiEdge, Vec<u64>>,
}

impl DetachState {
    /// `cells` may mix finished edges and alpha-cells; zero rows are dropped.
    pub fn new(
        h: usize,
        k: usize,
        weight: u32,
        vertices: impl IntoIterator<Item = Vertex>,
        cells: BTreeMap<MultiEdge, Vec<u64>>,
    ) -> Result<DetachState> {
        let vertices: BTreeSet<Vertex> = vertices.into_iter().collect();
        if vertices.contains(&ALPHA) {
            return Err(Error::InvalidParams("alpha cannot be listed as an ordinary vertex".into()));
        }
        let mut kept = BTreeMap::new();
        for (e, counts) in cells {
            if e.size() != h || counts.len() != k {
                return Err(Error::Validation(format!("cell {e} has the wrong size or colour count")));
            }
            if let Some(v) = e.vertices().iter().find(|&&v| v != ALPHA && !vertices.contains(&v)) {
                return Err(Error::UnknownVertex(*v));
            }
            if counts.iter().any(|&c| c > 0) {
                kept.insert(e, counts);
            }
        }
        Ok(DetachState {
            h,
            k,
            weight,
            vertices,
            cells: kept,
        })
    }

    /// Detachment input from a fully coloured amalgam.
    pub fn from_amalgam(state: &AmalgamState) -> Result<DetachState> {
        if state.phase() != Phase::Complete {
            return Err(Error::Contract("amalgam phases have not all run".into()));
        }
        let inst = state.instance();
        let k = inst.k();
        let mut cells: BTreeMap<MultiEdge, Vec<u64>> = BTreeMap::new();
        for (copy, color) in state.base_coloring().iter() {
            cells.entry(copy.edge.clone()).or_insert_with(|| vec![0; k])[color.index()] += 1;
        }
        for (e, c) in state.cells() {
            cells.insert(e.clone(), c.colored.clone());
        }
        DetachState::new(inst.h, k, inst.n - inst.m, (1..=inst.m).map(Vertex), cells)
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn cells(&self) -> &BTreeMap<MultiEdge, Vec<u64>> {
        &self.cells
    }

    pub fn alpha_degree(&self, j: Color) -> u64 {
        self.cells
            .iter()
            .map(|(e, c)| e.occurrences(ALPHA) * c[j.index()])
            .sum()
    }

    fn class_edges(&self) -> Vec<Vec<(&MultiEdge, u64)>> {
        let mut out = vec![Vec::new(); self.k];
        for (e, counts) in &self.cells {
            for (j, &c) in counts.iter().enumerate() {
                if c > 0 {
                    out[j].push((e, c));
                }
            }
        }
        out
    }

    fn max_vertex(&self) -> usize {
        self.vertices.iter().next_back().map_or(0, |v| v.0 as usize)
    }

    /// Alpha-wings of class `j`.
    pub fn wings(&self, j: Color) -> WingCount {
        count_wings_in(
            self.cells.iter().map(|(e, c)| (e, c[j.index()])),
            ALPHA,
        )
    }

    /// Whether class `j`, with alpha as an ordinary vertex, spans and connects
    /// every present vertex.
    pub fn class_connected(&self, j: Color) -> bool {
        class_connected_in(self, self.cells.iter().map(|(e, c)| (e, c[j.index()])))
    }
}

fn class_connected_in<'a>(state: &DetachState, edges: impl Iterator<Item = (&'a MultiEdge, u64)>) -> bool {
    let mut uf = UnionFind::new(state.max_vertex() + 1);
    let mut seen = vec![false; state.max_vertex() + 1];
    for (e, c) in edges {
        if c == 0 {
            continue;
        }
        let first = e.vertices()[0].0 as usize;
        for v in e.vertices() {
            seen[v.0 as usize] = true;
            uf.union(first, v.0 as usize);
        }
    }
    let mut present: Vec<usize> = state.vertices.iter().map(|v| v.0 as usize).collect();
    if state.weight > 0 {
        present.push(0);
    }
    let Some(&root) = present.first() else {
        return true;
    };
    present.iter().all(|&v| seen[v] || present.len() == 1) && present.iter().all(|&v| uf.same(root, v))
}

/// `deg(α,j) − ω_α(H(j)) ≥ p − 1` on the current state.
pub fn criterion_holds(state: &DetachState, j: Color, p: u32) -> bool {
    let deg = state.alpha_degree(j) as i64;
    let wings = state.wings(j).total() as i64;
    deg - wings >= p as i64 - 1
}

/// The connected-detachment criterion on a completed amalgam: class `j`
/// must be connected and `deg(α,j) − ω ≥ p − 1`.
pub fn check_connected_detachment_criterion(state: &AmalgamState, j: Color, p: u32) -> bool {
    let class = state.class_hypergraph(j);
    if !crate::connectivity::is_connected(&class) {
        return false;
    }
    let wings = crate::connectivity::count_wings(&class, ALPHA).total() as i64;
    state.alpha_degree(j) as i64 - wings >= p as i64 - 1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellMove {
    pub edge: MultiEdge,
    pub mult_before: u64,
    pub moved: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColorMove {
    pub color: Color,
    pub alpha_degree_before: u64,
    pub moved: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub edge: MultiEdge,
    pub color: Color,
    pub count: u64,
}

/// Record of one split.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStep {
    pub step_index: u32,
    pub remaining_weight: u32,
    pub new_vertex: Vertex,
    pub cells: Vec<CellMove>,
    pub colors: Vec<ColorMove>,
    pub assignments: Vec<Assignment>,
    /// Flow solves needed before every connected class passed its checks.
    pub attempts: usize,
}

impl SplitStep {
    /// Per-colour `⌊⌋/⌈⌉` band and per-cell exact share.
    pub fn is_fair(&self) -> bool {
        let w = self.remaining_weight as u64;
        let colors_ok = self.colors.iter().all(|c| {
            let lo = c.alpha_degree_before / w;
            let hi = c.alpha_degree_before.div_ceil(w);
            (lo..=hi).contains(&c.moved)
        });
        let cells_ok = self
            .cells
            .iter()
            .all(|c| c.moved * w == c.mult_before * c.edge.occurrences(ALPHA));
        colors_ok && cells_ok
    }
}

/// Knobs of one flow solve.
struct SplitPlan<'a> {
    rewards: &'a [i64],
    capped: &'a BTreeSet<usize>,
    connected: &'a BTreeSet<Color>,
    order_seed: u64,
}

/// Solves one split; `None` when the flow cannot meet every bound.
fn solve_split(state: &DetachState, plan: &SplitPlan<'_>) -> Result<Option<BTreeMap<(MultiEdge, usize), u64>>> {
    let w = state.weight as u64;
    let k = state.k;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.order_seed);

    let mut alpha_cells: Vec<(&MultiEdge, &Vec<u64>)> = state
        .cells
        .iter()
        .filter(|(e, _)| e.occurrences(ALPHA) > 0)
        .collect();
    alpha_cells.shuffle(&mut rng);

    let mut alpha_deg = vec![0u64; k];
    let mut targets = Vec::with_capacity(alpha_cells.len());
    for (e, counts) in &alpha_cells {
        let i = e.occurrences(ALPHA);
        let mult: u64 = counts.iter().sum();
        if !(mult * i).is_multiple_of(w) {
            return Err(Error::Contract(format!("cell {e} share {mult}*{i}/{w} is not integral")));
        }
        targets.push(mult * i / w);
        for (j, &c) in counts.iter().enumerate() {
            alpha_deg[j] += i * c;
        }
    }
    let total: u64 = targets.iter().sum();

    let mut g = MinCostFlow::new(2);
    let (src, sink) = (0, 1);
    let color_node: Vec<usize> = (0..k).map(|_| g.add_node()).collect();
    let cell_node: Vec<usize> = alpha_cells.iter().map(|_| g.add_node()).collect();
    for (c, &t) in targets.iter().enumerate() {
        g.add_arc(cell_node[c], sink, t as i64, 0);
    }

    let big: i64 = 1 + (0..k)
        .map(|j| plan.rewards[j] * alpha_deg[j].div_ceil(w) as i64)
        .sum::<i64>();
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(&mut rng);
    let mut mandatory = Vec::new();
    for &j in &order {
        let lo = alpha_deg[j] / w;
        let hi = alpha_deg[j].div_ceil(w);
        if lo > 0 {
            mandatory.push((g.add_arc(src, color_node[j], lo as i64, -big), lo as i64));
        }
        if hi > lo {
            g.add_arc(src, color_node[j], (hi - lo) as i64, 0);
        }
    }

    // (colour, cell index, arc id) for reading the flow back
    let mut carriers: Vec<(usize, usize, usize)> = Vec::new();
    let class_edges = state.class_edges();
    for &j in &order {
        let color = Color::from_index(j);
        let connected = plan.connected.contains(&color);
        if !connected {
            for (c, (_, counts)) in alpha_cells.iter().enumerate() {
                if counts[j] > 0 {
                    let id = g.add_arc(color_node[j], cell_node[c], counts[j] as i64, 0);
                    carriers.push((j, c, id));
                }
            }
            continue;
        }
        let reward = plan.rewards[j];
        let mut uf = UnionFind::new(state.max_vertex() + 1);
        for (e, _) in &class_edges[j] {
            let rest: Vec<usize> = e.vertices().iter().filter(|&&v| v != ALPHA).map(|v| v.0 as usize).collect();
            for v in rest.iter().skip(1) {
                uf.union(rest[0], *v);
            }
        }
        // wing root -> (node, alpha copies)
        let mut wings: BTreeMap<usize, (usize, i64, Vec<(usize, u64)>)> = BTreeMap::new();
        for (c, (e, counts)) in alpha_cells.iter().enumerate() {
            if counts[j] == 0 {
                continue;
            }
            match e.vertices().iter().find(|&&v| v != ALPHA) {
                None => {
                    let id = g.add_arc(color_node[j], cell_node[c], counts[j] as i64, -reward);
                    carriers.push((j, c, id));
                }
                Some(x) => {
                    let root = uf.find(x.0 as usize);
                    let entry = wings.entry(root).or_insert((usize::MAX, 0, Vec::new()));
                    entry.1 += counts[j] as i64;
                    entry.2.push((c, counts[j]));
                }
            }
        }
        for (_, copies, members) in wings.values_mut() {
            let node = g.add_node();
            let limit = if plan.capped.contains(&j) { *copies - 1 } else { *copies };
            if limit <= 0 {
                continue;
            }
            g.add_arc(color_node[j], node, 1, -reward);
            if limit > 1 {
                g.add_arc(color_node[j], node, limit - 1, 0);
            }
            for &(c, cap) in members.iter() {
                let id = g.add_arc(node, cell_node[c], cap as i64, 0);
                carriers.push((j, c, id));
            }
        }
    }

    let out = g.solve(src, sink, total as i64);
    if out.flow != total as i64 || mandatory.iter().any(|&(id, lo)| g.flow_on(id) != lo) {
        return Ok(None);
    }
    let mut y: BTreeMap<(MultiEdge, usize), u64> = BTreeMap::new();
    for (j, c, id) in carriers {
        let f = g.flow_on(id);
        if f > 0 {
            *y.entry((alpha_cells[c].0.clone(), j)).or_insert(0) += f as u64;
        }
    }
    Ok(Some(y))
}

fn replace_one_alpha(e: &MultiEdge, beta: Vertex) -> MultiEdge {
    let mut v = e.vertices().to_vec();
    let pos = v.iter().position(|&x| x == ALPHA).expect("edge contains alpha");
    v[pos] = beta;
    MultiEdge::new(v)
}

fn apply_split(state: &DetachState, beta: Vertex, y: &BTreeMap<(MultiEdge, usize), u64>) -> DetachState {
    let mut next = state.clone();
    for ((e, j), &count) in y {
        let row = next.cells.get_mut(e).expect("cell exists");
        row[*j] -= count;
        if row.iter().all(|&c| c == 0) {
            next.cells.remove(e);
        }
        next.cells.entry(replace_one_alpha(e, beta)).or_insert_with(|| vec![0; state.k])[*j] += count;
    }
    next.vertices.insert(beta);
    next.weight -= 1;
    next
}

/// Connected colours whose class is disconnected after the split, or that
/// can no longer satisfy the detachment criterion for the remaining weight.
fn failing_classes(next: &DetachState, connected: &BTreeSet<Color>) -> Vec<(Color, bool)> {
    let class_edges = next.class_edges();
    let mut out = Vec::new();
    for &j in connected {
        let edges = &class_edges[j.index()];
        let joined = class_connected_in(next, edges.iter().copied());
        let ok = joined && {
            let deg: u64 = edges.iter().map(|(e, c)| e.occurrences(ALPHA) * c).sum();
            let wings = count_wings_in(edges.iter().copied(), ALPHA).total();
            next.weight < 2 || deg as i64 - wings as i64 >= next.weight as i64 - 1
        };
        if !ok {
            out.push((j, joined));
        }
    }
    out
}

/// One split of `state` into `beta` and alpha of weight `w − 1`.
pub fn single_split(
    state: &DetachState,
    beta: Vertex,
    connected: &BTreeSet<Color>,
    step_index: u32,
    seed: u64,
) -> Result<(DetachState, SplitStep)> {
    let w = state.weight;
    if w < 2 {
        return Err(Error::InvalidParams(format!("a split needs weight >= 2, have {w}")));
    }
    if state.vertices.contains(&beta) || beta == ALPHA {
        return Err(Error::InvalidParams(format!("vertex {beta} already exists")));
    }
    let k = state.k;
    let mut rewards: Vec<i64> = (0..k)
        .map(|j| i64::from(connected.contains(&Color::from_index(j))))
        .collect();
    let mut capped: BTreeSet<usize> = BTreeSet::new();
    let mut mixer = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(step_index) << 32));
    let mut last_failure = None;
    for attempt in 1..=STEP_ATTEMPTS {
        let order_seed = rand::Rng::r#gen::<u64>(&mut mixer);
        let plan = SplitPlan {
            rewards: &rewards,
            capped: &capped,
            connected,
            order_seed,
        };
        let Some(y) = solve_split(state, &plan)? else {
            if capped.is_empty() {
                return Err(Error::FairnessInfeasible(step_index as usize));
            }
            capped.clear();
            continue;
        };
        let next = apply_split(state, beta, &y);
        let failing = failing_classes(&next, connected);
        if failing.is_empty() {
            let step = record_step(state, beta, step_index, &y, attempt);
            return Ok((next, step));
        }
        debug!("split {step_index}: {} classes need repair on attempt {attempt}", failing.len());
        let bump = 1 + rewards.iter().sum::<i64>();
        for &(j, joined) in &failing {
            rewards[j.index()] += bump;
            if !joined {
                capped.insert(j.index());
            }
        }
        last_failure = Some(failing[0].0);
    }
    Err(Error::ConnectivityRepairExhausted {
        color: last_failure.unwrap_or(Color(1)),
        retries: STEP_ATTEMPTS,
    })
}

fn record_step(
    state: &DetachState,
    beta: Vertex,
    step_index: u32,
    y: &BTreeMap<(MultiEdge, usize), u64>,
    attempts: usize,
) -> SplitStep {
    let mut moved_cell: BTreeMap<&MultiEdge, u64> = BTreeMap::new();
    let mut moved_color = vec![0u64; state.k];
    let mut assignments = Vec::new();
    for ((e, j), &count) in y {
        *moved_cell.entry(e).or_insert(0) += count;
        moved_color[*j] += count;
        assignments.push(Assignment {
            edge: e.clone(),
            color: Color::from_index(*j),
            count,
        });
    }
    let cells = state
        .cells
        .iter()
        .filter(|(e, _)| e.occurrences(ALPHA) > 0)
        .map(|(e, counts)| CellMove {
            edge: e.clone(),
            mult_before: counts.iter().sum(),
            moved: moved_cell.get(e).copied().unwrap_or(0),
        })
        .collect();
    let colors = (0..state.k)
        .map(|j| {
            let color = Color::from_index(j);
            ColorMove {
                color,
                alpha_degree_before: state.alpha_degree(color),
                moved: moved_color[j],
            }
        })
        .collect();
    SplitStep {
        step_index,
        remaining_weight: state.weight,
        new_vertex: beta,
        cells,
        colors,
        assignments,
        attempts,
    }
}

/// Detaches alpha completely into `new_vertices` (the first one is split
/// off first; alpha itself becomes the last). Returns the finished edges
/// with per-colour counts.
pub fn detach_all(
    state: DetachState,
    new_vertices: &[Vertex],
    connected: &BTreeSet<Color>,
    seed: u64,
) -> Result<(DetachState, Vec<SplitStep>)> {
    let p = state.weight;
    if p == 0 {
        return Err(Error::InvalidParams("nothing to detach (p = 0)".into()));
    }
    if new_vertices.len() != p as usize {
        return Err(Error::InvalidParams(format!(
            "{} new vertex names for weight {p}",
            new_vertices.len()
        )));
    }
    let mut cur = state;
    let mut steps = Vec::with_capacity(p as usize);
    for (s, &beta) in new_vertices[..p as usize - 1].iter().enumerate() {
        let (next, step) = single_split(&cur, beta, connected, s as u32 + 1, seed)?;
        steps.push(step);
        cur = next;
    }
    let last = new_vertices[p as usize - 1];
    let mut done = BTreeMap::new();
    for (e, counts) in std::mem::take(&mut cur.cells) {
        let key = match e.occurrences(ALPHA) {
            0 => e,
            1 => replace_one_alpha(&e, last),
            _ => {
                return Err(Error::Contract(format!("cell {e} still holds several alphas at weight 1")));
            }
        };
        let row = done.entry(key).or_insert_with(|| vec![0; cur.k]);
        for (r, c) in row.iter_mut().zip(counts) {
            *r += c;
        }
    }
    cur.cells = done;
    cur.vertices.insert(last);
    cur.weight = 0;
    Ok((cur, steps))
}

/// Output of a full detachment of a completed amalgam.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetachmentResult {
    pub hypergraph: MultiHypergraph,
    pub coloring: Coloring,
    pub trace: Vec<SplitStep>,
    /// Seed of the run that succeeded.
    pub seed: u64,
    /// Restarts that were needed (0 when the first seed worked).
    pub restarts: usize,
}

fn restart_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Turns finished per-colour counts into copy-level colourings: base copies
/// keep their input colouring, other h-sets get copies `0..λ` in ascending
/// colour order.
fn assemble(
    n: u32,
    h: usize,
    k: usize,
    base: &Coloring,
    base_vertices: &BTreeSet<Vertex>,
    done: &BTreeMap<MultiEdge, Vec<u64>>,
) -> Result<(MultiHypergraph, Coloring)> {
    let mut g = MultiHypergraph::on_range(h, n);
    let mut coloring = Coloring::new(k);
    for (e, counts) in done {
        let total: u64 = counts.iter().sum();
        g.add_edge(e.clone(), total)?;
        if e.vertices().iter().all(|v| base_vertices.contains(v)) {
            continue;
        }
        let mut copy = 0u32;
        for (j, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                coloring.assign(EdgeCopy::new(e.clone(), copy), Color::from_index(j))?;
                copy += 1;
            }
        }
    }
    for (copy, color) in base.iter() {
        coloring.assign(copy.clone(), color)?;
    }
    Ok((g, coloring))
}

/// Fair `(α, n − m)`-detachment of a completed amalgam. Classes listed in
/// `connected` come out connected or the call fails.
pub fn fair_detach(state: &AmalgamState, connected: &BTreeSet<Color>, seed: u64) -> Result<DetachmentResult> {
    fair_detach_with(state, connected, seed, DEFAULT_RESTARTS)
}

pub fn fair_detach_with(
    state: &AmalgamState,
    connected: &BTreeSet<Color>,
    seed: u64,
    restarts: usize,
) -> Result<DetachmentResult> {
    let inst = state.instance();
    let p = inst.n - inst.m;
    if p == 0 {
        return Err(Error::InvalidParams("p = n - m = 0: nothing to detach".into()));
    }
    let identities = assert_amalgam_identities(state);
    if !identities.passed() {
        return Err(Error::Contract("amalgam identities fail before detachment".into()));
    }
    let ds = DetachState::from_amalgam(state)?;
    for &j in connected {
        if j.0 == 0 || j.index() >= inst.k() {
            return Err(Error::UnknownColor(j, inst.k()));
        }
        if inst.r_of(j) < 2 {
            return Err(Error::NecessityViolated {
                color: j,
                reason: format!("r_{j} = {} < 2", inst.r_of(j)),
            });
        }
        if !ds.class_connected(j) || !criterion_holds(&ds, j, p) {
            return Err(Error::DetachmentCriterion {
                color: j,
                degree: ds.alpha_degree(j),
                wings: ds.wings(j).total(),
                needed: p as u64 - 1,
            });
        }
    }
    let new_vertices: Vec<Vertex> = (inst.m + 1..=inst.n).map(Vertex).collect();
    let base_vertices: BTreeSet<Vertex> = (1..=inst.m).map(Vertex).collect();
    let mut last = None;
    for attempt in 0..=restarts {
        let s = restart_seed(seed, attempt);
        match detach_all(ds.clone(), &new_vertices, connected, s) {
            Ok((done, trace)) => {
                if let Some(j) = connected.iter().find(|&&j| !done.class_connected(j)) {
                    warn!("class {j} disconnected after detachment with seed {s}; restarting");
                    last = Some(*j);
                    continue;
                }
                let (hypergraph, coloring) =
                    assemble(inst.n, inst.h, inst.k(), state.base_coloring(), &base_vertices, &done.cells)?;
                return Ok(DetachmentResult {
                    hypergraph,
                    coloring,
                    trace,
                    seed: s,
                    restarts: attempt,
                });
            }
            Err(Error::ConnectivityRepairExhausted { color, .. }) => {
                warn!("connectivity repair for class {color} failed with seed {s}; restarting");
                last = Some(color);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::ConnectivityRepairExhausted {
        color: last.unwrap_or(Color(1)),
        retries: restarts + 1,
    })
}

/// Complete λK_n^h-style check on finished counts: every h-subset of the
/// vertex set appears with total multiplicity `lambda`.
pub fn multiplicities_exact(state: &DetachState, n: u32, lambda: u64) -> bool {
    let mut seen = 0usize;
    for (e, counts) in &state.cells {
        if e.has_repeats() || e.contains(ALPHA) || counts.iter().sum::<u64>() != lambda {
            return false;
        }
        seen += 1;
    }
    seen == subsets(n, state.h).len()
}
