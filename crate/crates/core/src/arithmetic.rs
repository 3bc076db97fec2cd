//! Admissibility, theorem hypotheses and the closed-form colour-budget bounds.
//!
//! Every inequality here is decided over the integers: rational right-hand
//! sides are cleared by cross-multiplication and floors use Euclidean
//! division, so boundary cases such as `q = 105` vs `q = 106` never depend on
//! float rounding.

use std::collections::BTreeSet;

use num_integer::{Integer, gcd};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Color, Coloring, Instance, MultiHypergraph, binom};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivedParams {
    /// λ·C(m−1, h−1)
    pub c: u64,
    /// λ·C(n−1, h−1)
    pub d: u64,
    /// h / gcd(n, h)
    pub g: u64,
}

pub fn derived_params(inst: &Instance) -> DerivedParams {
    DerivedParams {
        c: inst.c(),
        d: inst.d(),
        g: inst.h as u64 / gcd(inst.n as u64, inst.h as u64),
    }
}

/// `h | r_i·n` for every colour and `Σ r_i = λ·C(n−1, h−1)`.
pub fn check_admissible(inst: &Instance) -> bool {
    let h = inst.h as u64;
    let n = inst.n as u64;
    inst.r.iter().all(|&r| (r * n).is_multiple_of(h)) && inst.r.iter().sum::<u64>() == inst.d()
}

/// Human-readable reasons why an instance is not admissible.
pub fn admissibility_failures(inst: &Instance) -> Vec<String> {
    let h = inst.h as u64;
    let n = inst.n as u64;
    let mut out = Vec::new();
    if let Some((i, r)) = inst.r.iter().enumerate().find(|(_, &r)| !(r * n).is_multiple_of(h)) {
        out.push(format!("h={h} does not divide r_{}*n = {}", i + 1, r * n));
    }
    let sum: u64 = inst.r.iter().sum();
    if sum != inst.d() {
        out.push(format!("sum of r = {sum} but lambda*C(n-1,h-1) = {}", inst.d()));
    }
    out
}

fn floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

fn s_vec(inst: &Instance) -> Result<&[u64]> {
    inst.s.as_deref().ok_or(Error::MissingS)
}

/// Left-hand side of the hole-filling budget inequality:
/// `Σ_{i≤q} ⌊(r_i−s_i)m/h⌋ + Σ_{i>q} ⌊r_i m/h⌋`.
pub fn theorem12_budget(inst: &Instance) -> Result<u64> {
    let s = s_vec(inst)?;
    let m = inst.m as u64;
    let h = inst.h as u64;
    Ok(inst
        .r
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let free = if i < s.len() { r - s[i] } else { r };
            free * m / h
        })
        .sum())
}

pub fn theorem12_hypothesis(inst: &Instance) -> Result<bool> {
    Ok(theorem12_budget(inst)? >= inst.lambda * binom(inst.m as u64, inst.h as u64))
}

/// `B = {i ∈ [q] : r_i ≠ s_i}` (1-based colours).
pub fn default_b(inst: &Instance) -> Result<BTreeSet<Color>> {
    let s = s_vec(inst)?;
    Ok(s.iter()
        .zip(&inst.r)
        .enumerate()
        .filter(|(_, (s, r))| s != r)
        .map(|(i, _)| Color::from_index(i))
        .collect())
}

/// All colours with `r_i ≥ 2`.
pub fn eligible_a(inst: &Instance) -> BTreeSet<Color> {
    inst.colors().filter(|&c| inst.r_of(c) >= 2).collect()
}

/// Residues and reduced degrees used by the general bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundParams {
    pub delta: Vec<u64>,
    pub delta_bar: Vec<u64>,
    pub a: BTreeSet<Color>,
    pub b: BTreeSet<Color>,
    pub r_bar: Vec<u64>,
    /// Uniform-case residues, present when `r` and `s` are constant.
    pub uniform: Option<UniformResidues>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformResidues {
    pub delta1: u64,
    pub delta2: u64,
    pub delta1_bar: u64,
    pub delta2_bar: u64,
}

impl BoundParams {
    /// Validates `A ⊆ {i : r_i ≥ 2}` and `B = {i ∈ [q] : r_i ≠ s_i}`.
    pub fn new(inst: &Instance, a: &BTreeSet<Color>, b: &BTreeSet<Color>) -> Result<BoundParams> {
        let k = inst.k();
        for c in a {
            if c.0 == 0 || c.index() >= k {
                return Err(Error::BadSubsets(format!("A contains colour {c} outside 1..={k}")));
            }
            if inst.r_of(*c) < 2 {
                return Err(Error::BadSubsets(format!("A contains colour {c} with r < 2")));
            }
        }
        let expected_b = match inst.s {
            Some(_) => default_b(inst)?,
            None => BTreeSet::new(),
        };
        if *b != expected_b {
            return Err(Error::BadSubsets(format!(
                "B must be {{i in [q] : r_i != s_i}} = {expected_b:?}"
            )));
        }
        let s = inst.s.clone().unwrap_or_default();
        let q = s.len();
        let m = inst.m as i128;
        let h = inst.h as i128;
        let r_bar: Vec<u64> = inst
            .colors()
            .map(|c| if a.contains(&c) { inst.r_of(c) - 1 } else { inst.r_of(c) })
            .collect();
        let residue = |x: i128| (x * m).rem_euclid(h) as u64;
        let mut delta = Vec::with_capacity(k);
        let mut delta_bar = Vec::with_capacity(k);
        for i in 0..k {
            let (free, free_bar) = if i < q {
                (inst.r[i] as i128 - s[i] as i128, r_bar[i] as i128 - s[i] as i128)
            } else {
                (inst.r[i] as i128, r_bar[i] as i128)
            };
            delta.push(residue(free));
            delta_bar.push(residue(free_bar));
        }
        let uniform_r = inst.r.windows(2).all(|w| w[0] == w[1]);
        let uniform_s = s.windows(2).all(|w| w[0] == w[1]);
        let uniform = (uniform_r && uniform_s && a.len() == k).then(|| {
            let pick = |v: &Vec<u64>, inside: bool| {
                if inside {
                    if q > 0 { v[0] } else { 0 }
                } else if q < k {
                    v[q]
                } else {
                    0
                }
            };
            UniformResidues {
                delta1: pick(&delta, true),
                delta2: pick(&delta, false),
                delta1_bar: pick(&delta_bar, true),
                delta2_bar: pick(&delta_bar, false),
            }
        });
        Ok(BoundParams {
            delta,
            delta_bar,
            a: a.clone(),
            b: b.clone(),
            r_bar,
            uniform,
        })
    }
}

/// Budget inequality for connected hole-filling with the reduced degrees
/// `r̄` and the colour sets `A`, `B`.
pub fn theorem14_hypothesis(inst: &Instance, a: &BTreeSet<Color>, b: &BTreeSet<Color>) -> Result<bool> {
    s_vec(inst)?;
    let bp = BoundParams::new(inst, a, b)?;
    Ok(theorem14_budget(inst, &bp)? >= inst.lambda * binom(inst.m as u64, inst.h as u64))
}

pub fn theorem14_budget(inst: &Instance, bp: &BoundParams) -> Result<u64> {
    let s = s_vec(inst)?;
    let m = inst.m as u64;
    let h = inst.h as u64;
    let q = s.len();
    let mut total = 0;
    for c in &bp.b {
        let i = c.index();
        total += (bp.r_bar[i] - s[i]) * m / h;
    }
    for i in q..inst.k() {
        total += bp.r_bar[i] * m / h;
    }
    Ok(total)
}

/// `d − c ≥ Σ_{i∈[q]} s_i + (1/m)·Σ_{i∈[k]} δ_i`, equality allowed.
pub fn bound_71a(inst: &Instance) -> Result<bool> {
    let b = match inst.s {
        Some(_) => default_b(inst)?,
        None => BTreeSet::new(),
    };
    let bp = BoundParams::new(inst, &BTreeSet::new(), &b)?;
    let s_sum: i128 = inst.s.iter().flatten().map(|&x| x as i128).sum();
    let dp = derived_params(inst);
    let m = inst.m as i128;
    let lhs = m * (dp.d as i128 - dp.c as i128 - s_sum);
    let rhs: i128 = bp.delta.iter().map(|&x| x as i128).sum();
    Ok(lhs >= rhs)
}

/// `Σ_{i∈B∪([k]∖[q])} r̄_i − c ≥ Σ_{i∈B} s_i + (1/m)·Σ_{i∈B∪([k]∖[q])} δ̄_i`.
pub fn bound_71b(inst: &Instance, a: &BTreeSet<Color>, b: &BTreeSet<Color>) -> Result<bool> {
    let bp = BoundParams::new(inst, a, b)?;
    let q = inst.q();
    let s = inst.s.clone().unwrap_or_default();
    let members: Vec<usize> = b.iter().map(|c| c.index()).chain(q..inst.k()).collect();
    let r_sum: i128 = members.iter().map(|&i| bp.r_bar[i] as i128).sum();
    let s_sum: i128 = b.iter().map(|c| s[c.index()] as i128).sum();
    let delta_sum: i128 = members.iter().map(|&i| bp.delta_bar[i] as i128).sum();
    let m = inst.m as i128;
    Ok(m * (r_sum - inst.c() as i128 - s_sum) >= delta_sum)
}

/// Parameters of a uniform bound query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformQuery {
    pub m: u64,
    pub h: u64,
    pub lambda: u64,
    pub n: u64,
    pub r: u64,
}

impl UniformQuery {
    fn c(&self) -> i128 {
        (self.lambda * binom(self.m - 1, self.h - 1)) as i128
    }

    fn d(&self) -> i128 {
        (self.lambda * binom(self.n - 1, self.h - 1)) as i128
    }

    fn residue(&self, x: i128) -> i128 {
        (x * self.m as i128).rem_euclid(self.h as i128)
    }

    fn check(&self) -> Result<()> {
        if self.h < 2 || self.m < self.h || self.n < self.m || self.lambda == 0 || self.r == 0 {
            return Err(Error::InvalidParams(format!("need n >= m >= h >= 2, lambda, r >= 1: {self:?}")));
        }
        Ok(())
    }
}

/// Largest number of colours `q` for which a partial uniform
/// `s`-factorization still embeds (or embeds connected).
pub fn qmax_74(query: UniformQuery, s: u64, connected: bool) -> Result<i64> {
    query.check()?;
    let r = query.r as i128;
    let s_i = s as i128;
    if s == 0 || s > query.r {
        return Err(Error::InvalidParams(format!("need 1 <= s <= r (s={s}, r={})", query.r)));
    }
    let m = query.m as i128;
    let (c, d) = (query.c(), query.d());
    let (num, den) = if connected {
        if s >= query.r {
            return Err(Error::NotApplicable("connected bound needs s < r".into()));
        }
        let d1 = query.residue(r - 1 - s_i);
        let d2 = query.residue(r - 1);
        (d * r * m - c * r * m - d * d2 - d * m, r * (s_i * m + d1 - d2))
    } else {
        let d1 = query.residue(r - s_i);
        let d2 = query.residue(r);
        (d * r * m - c * r * m - d * d2, r * (s_i * m + d1 - d2))
    };
    if den <= 0 {
        return Err(Error::DegenerateDenominator(format!("r(sm + D1 - D2) = {den}")));
    }
    Ok(floor_div(num, den) as i64)
}

/// Largest `q` such that a partial uniform `r`-factorization on `q`
/// colours extends (connected: with every factor connected).
pub fn qmax_75(query: UniformQuery, connected: bool) -> Result<i64> {
    query.check()?;
    let r = query.r as i128;
    let m = query.m as i128;
    let (c, d) = (query.c(), query.d());
    let den = if connected {
        if query.r < 2 {
            return Err(Error::NotApplicable("connected bound needs r >= 2".into()));
        }
        r * m - m - query.residue(r - 1)
    } else {
        r * m - query.residue(r)
    };
    if den <= 0 {
        return Err(Error::DegenerateDenominator(format!("denominator {den}")));
    }
    // d/r − cm/den = (d·den − c·m·r) / (r·den)
    Ok(floor_div(d * den - c * m * r, r * den) as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CorollaryPart {
    I,
    II,
    III,
    IV,
    V,
}

impl std::str::FromStr for CorollaryPart {
    type Err = Error;
    fn from_str(s: &str) -> Result<CorollaryPart> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "I" | "1" => CorollaryPart::I,
            "II" | "2" => CorollaryPart::II,
            "III" | "3" => CorollaryPart::III,
            "IV" | "4" => CorollaryPart::IV,
            "V" | "5" => CorollaryPart::V,
            other => return Err(Error::InvalidParams(format!("unknown corollary part {other}"))),
        })
    }
}

/// Which family of corollaries: complete input hypergraph (`Complete`) or an
/// arbitrary sub-hypergraph with a reduced colour budget (`Subhypergraph`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorollaryVariant {
    Complete,
    Subhypergraph,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub description: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Preset {
    pub part: CorollaryPart,
    pub variant: CorollaryVariant,
    /// Uniform degree of every factor.
    pub r: u64,
    /// Number of factors in the target factorization.
    pub k: u64,
    /// Number of colours the partial input may use.
    pub color_budget: i64,
    pub connected: bool,
    /// Every input colour class must be `r`-irregular (data-dependent).
    pub requires_irregular: bool,
    pub conditions: Vec<ConditionCheck>,
    /// Whether `n ≥ (h−1)(2m−1)`; reported, not enforced.
    pub n_bound_ok: bool,
}

impl Preset {
    /// The r-vector of the target factorization.
    pub fn r_vector(&self) -> Vec<u64> {
        vec![self.r; self.k as usize]
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Instantiates one corollary part for the given parameters.
pub fn corollary_presets(
    part: CorollaryPart,
    variant: CorollaryVariant,
    n: u64,
    h: u64,
    lambda: u64,
    m: u64,
) -> Result<Preset> {
    if h < 2 || m < h || n < m || lambda == 0 {
        return Err(Error::InvalidParams(format!("need n >= m >= h >= 2 (n={n}, m={m}, h={h})")));
    }
    let d = lambda * binom(n - 1, h - 1);
    let c = lambda * binom(m - 1, h - 1);
    let g = h / gcd(n, h);
    let cond = |description: String, holds: bool| ConditionCheck { description, holds };
    use CorollaryPart::*;
    use CorollaryVariant::*;
    let (r, k, budget, connected, conditions) = match (variant, part) {
        (Complete, I) => (1, d, d as i64, false, vec![cond(format!("n = {n} = 0 mod h = {h}"), n.is_multiple_of(h))]),
        (Complete, II) => (g, d / g, (d / g) as i64, false, vec![cond(format!("g = {g} divides d = {d}"), d.is_multiple_of(g))]),
        (Complete, III) => (
            g,
            d / g,
            (d / g) as i64,
            true,
            vec![
                cond(format!("n = {n} != 0 mod h = {h}"), !n.is_multiple_of(h)),
                cond(format!("g = {g} divides d = {d}"), d.is_multiple_of(g)),
            ],
        ),
        (Complete, IV) => (
            2,
            d / 2,
            (d / 2) as i64,
            true,
            vec![cond(format!("2n = {} = 0 mod h", 2 * n), (2 * n).is_multiple_of(h)), cond(format!("d = {d} even"), d.is_multiple_of(2))],
        ),
        (Complete, V) => (
            h,
            d / h,
            (d / h) as i64,
            true,
            vec![cond("h >= 2".into(), h >= 2), cond(format!("d = {d} = 0 mod h"), d.is_multiple_of(h))],
        ),
        (Subhypergraph, I) => (
            1,
            d,
            d as i64 - c as i64,
            false,
            vec![cond(format!("n = {n} = 0 mod h"), n.is_multiple_of(h)), cond(format!("m = {m} = 0 mod h"), m.is_multiple_of(h))],
        ),
        (Subhypergraph, II) => (
            g,
            d / g,
            (d / g) as i64 - ceil_div(c, g) as i64,
            false,
            vec![cond(format!("g*m = {} = 0 mod h", g * m), (g * m).is_multiple_of(h))],
        ),
        (Subhypergraph, III) => {
            let budget = if g >= 2 { (d / g) as i64 - ceil_div(c, g - 1) as i64 } else { 0 };
            (
                g,
                d / g,
                budget,
                true,
                vec![
                    cond(format!("n = {n} != 0 mod h"), !n.is_multiple_of(h)),
                    cond(format!("m(g-1) = {} = 0 mod h", m * g.saturating_sub(1)), (m * g.saturating_sub(1)).is_multiple_of(h)),
                ],
            )
        }
        (Subhypergraph, IV) => (
            2,
            d / 2,
            (d / 2) as i64 - c as i64,
            true,
            vec![
                cond(format!("d = {d} even"), d.is_multiple_of(2)),
                cond(format!("m = {m} = 0 mod h"), m.is_multiple_of(h)),
                cond(format!("2n = {} = 0 mod h", 2 * n), (2 * n).is_multiple_of(h)),
            ],
        ),
        (Subhypergraph, V) => (
            h,
            d / h,
            (d / h) as i64 - ceil_div(c, h - 1) as i64,
            true,
            vec![
                cond("h >= 2".into(), h >= 2),
                cond(format!("d = {d} = 0 mod h"), d.is_multiple_of(h)),
                cond(format!("m = {m} = 0 mod h"), m.is_multiple_of(h)),
            ],
        ),
    };
    let failures: Vec<String> = conditions.iter().filter(|c| !c.holds).map(|c| c.description.clone()).collect();
    if !failures.is_empty() {
        return Err(Error::ConditionViolated(failures));
    }
    Ok(Preset {
        part,
        variant,
        r,
        k,
        color_budget: budget,
        connected,
        requires_irregular: connected,
        conditions,
        n_bound_ok: n >= (h - 1) * (2 * m - 1),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RyserEntry {
    pub color: Color,
    pub edges: u64,
    /// `r_i·(hm − n(h−1))`; the condition is `h·edges ≥ this`.
    pub scaled_requirement: i128,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RyserReport {
    pub entries: Vec<RyserEntry>,
}

impl RyserReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &RyserEntry> {
        self.entries.iter().filter(|e| !e.holds)
    }
}

/// Per-class edge-count lower bound `|E(i)| ≥ r_i(m − n(1 − 1/h))`, a
/// necessary condition for extendability.
pub fn ryser_diagnostic(host: &MultiHypergraph, coloring: &Coloring, inst: &Instance) -> RyserReport {
    let h = inst.h as i128;
    let slack = h * inst.m as i128 - inst.n as i128 * (h - 1);
    let mut sizes = vec![0u64; inst.k()];
    for (copy, color) in coloring.iter() {
        if host.has_copy(copy) && color.index() < sizes.len() {
            sizes[color.index()] += 1;
        }
    }
    let entries = inst
        .colors()
        .map(|c| {
            let edges = sizes[c.index()];
            let scaled_requirement = inst.r_of(c) as i128 * slack;
            RyserEntry {
                color: c,
                edges,
                scaled_requirement,
                holds: h * edges as i128 >= scaled_requirement,
            }
        })
        .collect();
    RyserReport { entries }
}
