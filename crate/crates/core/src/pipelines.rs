//! End-to-end embeddings: complete inputs (optionally with connected
//! classes) and hole-filling for inputs that colour only part of `λK_m^h`.

use std::collections::{BTreeMap, BTreeSet};

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::amalgam::{AmalgamState, build_amalgam_protecting};
use crate::arithmetic::{BoundParams, check_admissible, admissibility_failures, default_b, theorem12_budget, theorem14_budget};
use crate::connectivity::{is_irregular, theorem13_necessity_check, wing_report};
use crate::detachment::{DetachState, DetachmentResult, detach_all, fair_detach};
use crate::error::{Error, Result};
use crate::model::{
    ALPHA, Color, Coloring, EdgeCopy, Instance, MultiEdge, MultiHypergraph, Vertex, binom, class_subhypergraph,
    is_partial_factorization,
};
use crate::verification::{Certificate, verify_extension, verify_factorization};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Complete a partial factorization of `λK_m^h`.
    Complete,
    /// As `Complete`, with the requested classes connected.
    CompleteConnected,
    /// Fill the uncoloured hole of `λK_m^h`, then complete.
    HoleFill,
    /// Hole-fill keeping requested classes irregular, then complete connected.
    HoleFillConnected,
}

impl Mode {
    pub fn connected(self) -> bool {
        matches!(self, Mode::CompleteConnected | Mode::HoleFillConnected)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingJob {
    pub inst: Instance,
    /// `λK_m^h` on `1..=m`.
    pub host: MultiHypergraph,
    pub input: Coloring,
    pub mode: Mode,
    /// Classes to make connected (`A`).
    pub connected: BTreeSet<Color>,
    /// `B` for connected hole-filling; defaults to `{i ≤ q : r_i ≠ s_i}`.
    pub b: Option<BTreeSet<Color>>,
    pub seed: u64,
}

impl EmbeddingJob {
    pub fn new(inst: Instance, host: MultiHypergraph, input: Coloring, mode: Mode, seed: u64) -> EmbeddingJob {
        EmbeddingJob {
            inst,
            host,
            input,
            mode,
            connected: BTreeSet::new(),
            b: None,
            seed,
        }
    }

    pub fn with_connected(mut self, connected: BTreeSet<Color>) -> EmbeddingJob {
        self.connected = connected;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub result: DetachmentResult,
    pub certificate: Certificate,
    /// Colouring of `λK_m^h` after the hole was filled (hole-fill modes).
    pub overlay: Option<Coloring>,
}

pub fn embed(job: &EmbeddingJob) -> Result<Embedding> {
    match job.mode {
        Mode::Complete => embed_thm11(job),
        Mode::CompleteConnected => embed_thm13(job),
        Mode::HoleFill => embed_thm12(job),
        Mode::HoleFillConnected => embed_thm14(job),
    }
}

fn require_admissible(inst: &Instance) -> Result<()> {
    if !check_admissible(inst) {
        return Err(Error::NotAdmissible(admissibility_failures(inst).join("; ")));
    }
    if (inst.n as u64) < inst.n_bound() {
        warn!(
            "n = {} is below (h-1)(2m-1) = {}; proceeding anyway",
            inst.n,
            inst.n_bound()
        );
    }
    Ok(())
}

fn check_host(job: &EmbeddingJob) -> Result<()> {
    let inst = &job.inst;
    let expected = crate::model::complete_hypergraph(inst.m, inst.h, inst.lambda)?;
    if job.host != expected {
        return Err(Error::Validation(format!(
            "host must be {}K_{}^{}",
            inst.lambda, inst.m, inst.h
        )));
    }
    job.input.validate(&job.host)
}

/// Base copies keep their input colouring when `n = m`.
fn trivial_result(state: &AmalgamState) -> DetachmentResult {
    DetachmentResult {
        hypergraph: state.base().clone(),
        coloring: state.base_coloring().clone(),
        trace: Vec::new(),
        seed: 0,
        restarts: 0,
    }
}

fn finish(
    job: &EmbeddingJob,
    state: &AmalgamState,
    connected: &BTreeSet<Color>,
    overlay: Option<Coloring>,
) -> Result<Embedding> {
    let inst = job.inst.without_s();
    let result = if inst.n == inst.m {
        trivial_result(state)
    } else {
        fair_detach(state, connected, job.seed)?
    };
    let mut certificate = verify_factorization(&result.hypergraph, &result.coloring, &inst, connected);
    certificate.preservation_ok = verify_extension(&job.host, &job.input, &result)?;
    certificate.wing_reports = connected.iter().map(|&j| wing_report(state, j)).collect();
    if !certificate.passed() {
        return Err(Error::Contract(format!(
            "output failed verification: {}",
            certificate.failures().join("; ")
        )));
    }
    Ok(Embedding {
        result,
        certificate,
        overlay,
    })
}

/// Completes a partial `r`-factorization of `λK_m^h` to one of `λK_n^h`.
pub fn embed_thm11(job: &EmbeddingJob) -> Result<Embedding> {
    check_host(job)?;
    let inst = job.inst.without_s();
    require_admissible(&inst)?;
    let state = build_amalgam_protecting(&job.host, &job.input, &inst, &BTreeSet::new())?;
    finish(job, &state, &BTreeSet::new(), None)
}

/// As [`embed_thm11`], with every class in `job.connected` connected.
pub fn embed_thm13(job: &EmbeddingJob) -> Result<Embedding> {
    check_host(job)?;
    let inst = job.inst.without_s();
    require_admissible(&inst)?;
    connected_from_input(job, &job.input, None)
}

fn connected_from_input(job: &EmbeddingJob, input: &Coloring, overlay: Option<Coloring>) -> Result<Embedding> {
    let inst = job.inst.without_s();
    let report = theorem13_necessity_check(&job.host, input, &inst, &job.connected)?;
    if let Some(e) = report.first_failure() {
        return Err(e);
    }
    let state = build_amalgam_protecting(&job.host, input, &inst, &job.connected)?;
    for &j in &job.connected {
        let w = wing_report(&state, j);
        if !w.within_bound() {
            // The bound is only guaranteed for n >= hm.
            if (inst.n as u64) >= inst.h as u64 * inst.m as u64 {
                return Err(Error::Contract(format!(
                    "class {j} has {} wings, above the bound {}",
                    w.total, w.bound
                )));
            }
            warn!("class {j} has {} wings, above the bound {}", w.total, w.bound);
        }
    }
    let job_input = EmbeddingJob {
        input: input.clone(),
        ..job.clone()
    };
    let mut out = finish(&job_input, &state, &job.connected, overlay)?;
    out.certificate.preservation_ok = verify_extension(&job.host, &job.input, &out.result)?;
    Ok(out)
}

/// Per-colour alpha^h counts for hole-filling, assigned to capacity in
/// ascending colour order until `λ·C(m,h)` copies are coloured.
fn fill_budgets(caps: &[u64], total: u64) -> Result<Vec<u64>> {
    let available: u64 = caps.iter().sum();
    if available < total {
        return Err(Error::BudgetInfeasible {
            available,
            needed: total,
        });
    }
    let mut left = total;
    Ok(caps
        .iter()
        .map(|&c| {
            let take = c.min(left);
            left -= take;
            take
        })
        .collect())
}

fn check_partial_s(job: &EmbeddingJob) -> Result<Vec<u64>> {
    let inst = &job.inst;
    let s = inst.s.clone().ok_or(Error::MissingS)?;
    if let Some((_, c)) = job.input.iter().find(|(_, c)| c.index() >= s.len()) {
        return Err(Error::Validation(format!("input uses colour {c} but q = {}", s.len())));
    }
    let mut caps = s.clone();
    caps.resize(inst.k(), 0);
    let report = is_partial_factorization(&job.host, &job.input, &caps);
    if !report.passed() {
        let v = &report.violations[0];
        return Err(Error::NotPartialFactorization(format!(
            "vertex {} has degree {} > s_{} = {}",
            v.vertex, v.degree, v.color, v.cap
        )));
    }
    Ok(s)
}

/// Colours `λK_m^h` as one alpha with `λC(m,h)` copies of `α^h`, detaches
/// alpha into `1..=m`, and copies colours onto the uncoloured input copies.
fn fill_hole(job: &EmbeddingJob, budgets: &[u64]) -> Result<Coloring> {
    let inst = &job.inst;
    let k = inst.k();
    let m = inst.m;
    let mut cells = BTreeMap::new();
    cells.insert(MultiEdge::new(vec![ALPHA; inst.h]), budgets.to_vec());
    let state = DetachState::new(inst.h, k, m, std::iter::empty(), cells)?;
    let names: Vec<Vertex> = (1..=m).map(Vertex).collect();
    let (done, trace) = detach_all(state, &names, &BTreeSet::new(), job.seed)?;
    if !trace.iter().all(|s| s.is_fair()) {
        return Err(Error::Contract("hole detachment broke a fairness band".into()));
    }
    // Final fairness: deg(α_i, j) within ⌊D_j/m⌋..⌈D_j/m⌉.
    for (j, &b) in budgets.iter().enumerate() {
        let d = b * inst.h as u64;
        for v in &names {
            let deg: u64 = done
                .cells()
                .iter()
                .filter(|(e, _)| e.contains(*v))
                .map(|(_, c)| c[j])
                .sum();
            if deg < d / m as u64 || deg > d.div_ceil(m as u64) {
                return Err(Error::Contract(format!("hole vertex {v} has class {} degree {deg}", j + 1)));
            }
        }
    }
    let mut overlay = job.input.clone();
    for (e, counts) in done.cells() {
        if counts.iter().sum::<u64>() != inst.lambda {
            return Err(Error::Contract(format!("hole h-set {e} has the wrong multiplicity")));
        }
        let mut colors = counts
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| std::iter::repeat_n(Color::from_index(j), c as usize));
        for i in 0..inst.lambda as u32 {
            let copy = EdgeCopy::new(e.clone(), i);
            if job.input.color_of(&copy).is_none() {
                let c = colors.next().expect("λ colours per h-set");
                overlay.assign(copy, c)?;
            }
        }
    }
    let report = is_partial_factorization(&job.host, &overlay, &inst.r);
    if !report.passed() {
        return Err(Error::Contract("hole overlay is not a partial factorization".into()));
    }
    Ok(overlay)
}

/// Embeds a partial `s`-factorization of a sub-hypergraph of `λK_m^h`.
pub fn embed_thm12(job: &EmbeddingJob) -> Result<Embedding> {
    check_host(job)?;
    let inst = &job.inst;
    let s = check_partial_s(job)?;
    require_admissible(inst)?;
    let m = inst.m as u64;
    let h = inst.h as u64;
    let caps: Vec<u64> = (0..inst.k())
        .map(|i| (inst.r[i] - s.get(i).copied().unwrap_or(0)) * m / h)
        .collect();
    debug_assert_eq!(caps.iter().sum::<u64>(), theorem12_budget(inst)?);
    let budgets = fill_budgets(&caps, inst.lambda * binom(m, h))?;
    let overlay = fill_hole(job, &budgets)?;
    info!("hole filled; completing on {} vertices", inst.n);
    let state = build_amalgam_protecting(&job.host, &overlay, &inst.without_s(), &BTreeSet::new())?;
    let mut out = finish(job, &state, &BTreeSet::new(), Some(overlay))?;
    out.certificate.preservation_ok = verify_extension(&job.host, &job.input, &out.result)?;
    Ok(out)
}

/// Hole-filling with the classes in `A = job.connected` kept irregular, then
/// a connected completion.
pub fn embed_thm14(job: &EmbeddingJob) -> Result<Embedding> {
    check_host(job)?;
    let inst = &job.inst;
    let s = check_partial_s(job)?;
    require_admissible(inst)?;
    let a = &job.connected;
    for &i in a {
        if i.0 == 0 || i.index() >= inst.k() {
            return Err(Error::UnknownColor(i, inst.k()));
        }
        if inst.r_of(i) < 2 {
            return Err(Error::NecessityViolated {
                color: i,
                reason: format!("r_{i} = {} < 2", inst.r_of(i)),
            });
        }
        if !is_irregular(&class_subhypergraph(&job.host, &job.input, i), inst.r_of(i)) {
            return Err(Error::NecessityViolated {
                color: i,
                reason: format!("input class {i} has an r_{i}-regular component"),
            });
        }
    }
    let b = match &job.b {
        Some(b) => b.clone(),
        None => default_b(inst)?,
    };
    let bp = BoundParams::new(inst, a, &b)?;
    let m = inst.m as u64;
    let h = inst.h as u64;
    let q = s.len();
    let caps: Vec<u64> = (0..inst.k())
        .map(|i| {
            let c = Color::from_index(i);
            if i < q {
                if b.contains(&c) { (bp.r_bar[i] - s[i]) * m / h } else { 0 }
            } else {
                bp.r_bar[i] * m / h
            }
        })
        .collect();
    debug_assert_eq!(caps.iter().sum::<u64>(), theorem14_budget(inst, &bp)?);
    let budgets = fill_budgets(&caps, inst.lambda * binom(m, h))?;
    let overlay = fill_hole(job, &budgets)?;
    for &i in a {
        if !is_irregular(&class_subhypergraph(&job.host, &overlay, i), inst.r_of(i)) {
            return Err(Error::Contract(format!("overlay class {i} has an r-regular component")));
        }
    }
    connected_from_input(job, &overlay, Some(overlay.clone()))
}
