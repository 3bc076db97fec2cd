//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use common::*;
use hypembed::amalgam::{AmalgamState, build_amalgam};
use hypembed::connectivity::{WingReport, count_wings};
use hypembed::detachment::{DetachState, SplitStep, fair_detach, single_split};
use hypembed::pipelines::{Embedding, EmbeddingJob, Mode, embed};
use hypembed::verification::{apply_mutation, oracle_exists, random_mutation, verify_factorization};
use hypembed::{ALPHA, Color, Coloring, Error, Instance, MultiEdge, MultiHypergraph, Vertex, complete_hypergraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CHECK_LIMIT: Duration = Duration::from_secs(1);
const BOUNDS_LIMIT: Duration = Duration::from_secs(1);
const DESK_RUN_LIMIT: Duration = Duration::from_secs(60);
const HOLE_RUN_LIMIT: Duration = Duration::from_secs(300);
const DESK_INPUTS: u64 = 50;
const DESK_SEEDS: u64 = 3;
const HOLE_INPUTS: u64 = 3;
const IDENTITY_INSTANCES: usize = 200;
const MUTATIONS: usize = 1000;
const WING_STATES: usize = 500;
const WING_EDGE_LIMIT: usize = 8;
const ORACLE_COPY_CAP: u64 = 64;
/// Largest `λC(n,h)` for which identity-suite instances are also detached.
const DETACH_COPY_LIMIT: u64 = 4000;

struct Verdict {
    pass: bool,
    detail: String,
}

/// Results gathered by earlier criteria and checked again by later ones.
#[derive(Default)]
struct Pool {
    steps_checked: usize,
    unfair: Vec<String>,
    contract_runs: usize,
    contract_failures: Vec<String>,
    wing_reports: Vec<(Instance, WingReport)>,
    outputs: Vec<(Instance, MultiHypergraph, Coloring, BTreeSet<Color>)>,
}

impl Pool {
    /// Band and exact-share checks on every split of a trace.
    fn check_trace(&mut self, label: &str, trace: &[SplitStep], p: u32) {
        if trace.len() as u32 != p.saturating_sub(1) {
            self.unfair.push(format!("{label}: {} splits for p={p}", trace.len()));
            return;
        }
        for (i, step) in trace.iter().enumerate() {
            self.steps_checked += 1;
            let w = p - i as u32;
            let wide = w as u64;
            let colors_ok = step.colors.iter().all(|c| {
                let lo = c.alpha_degree_before / wide;
                let hi = c.alpha_degree_before.div_ceil(wide);
                lo <= c.moved && c.moved <= hi
            });
            let cells_ok = step
                .cells
                .iter()
                .all(|c| c.moved * wide == c.mult_before * c.edge.occurrences(ALPHA));
            if step.remaining_weight != w || !colors_ok || !cells_ok {
                self.unfair.push(format!("{label}: split {i}"));
            }
        }
    }

    fn check_output(&mut self, label: &str, inst: &Instance, input: &Coloring, e: &Embedding, connected: &BTreeSet<Color>) {
        self.contract_runs += 1;
        let ids: BTreeSet<u32> = connected.iter().map(|c| c.0).collect();
        let g = &e.result.hypergraph;
        let c = &e.result.coloring;
        if let Err(msg) = check_factorization(g, c, inst.n, inst.h, inst.lambda, &inst.r, &ids) {
            self.contract_failures.push(format!("{label}: {msg}"));
        } else if !preserved(input, c) {
            self.contract_failures.push(format!("{label}: input not preserved"));
        } else if !e.certificate.passed() {
            self.contract_failures.push(format!("{label}: certificate disagrees"));
        }
        self.check_trace(label, &e.result.trace, inst.n - inst.m);
        for w in &e.certificate.wing_reports {
            self.wing_reports.push((inst.clone(), w.clone()));
        }
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hypembed"))
}

fn timed(cmd: &mut Command) -> (Output, Duration) {
    let t = Instant::now();
    let out = cmd.output().expect("binary runs");
    (out, t.elapsed())
}

fn tail(bad: &[String]) -> String {
    if bad.is_empty() {
        String::new()
    } else {
        let shown: Vec<&str> = bad.iter().take(5).map(String::as_str).collect();
        format!("; failing: {}", shown.join(", "))
    }
}

fn all_colors(k: usize) -> BTreeSet<Color> {
    (1..=k as u32).map(Color).collect()
}

fn criterion1() -> Verdict {
    let groups: [(u32, u64, [u64; 5]); 4] = [
        (30, 3, [2, 7, 14, 29, 58]),
        (45, 4, [4, 28, 44, 172, 308]),
        (60, 5, [2, 7, 14, 19, 29]),
        (75, 6, [2, 4, 6, 12, 14]),
    ];
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut runs = 0;
    for (n, h, rs) in groups {
        for r in rs {
            runs += 1;
            let d = choose(n as u64 - 1, h - 1);
            let admissible = d.is_multiple_of(r) && (r * n as u64).is_multiple_of(h);
            let header = format!("instance n={n} h={h} lambda=1 m=8 k={}", d / r);
            let (out, took) = timed(bin().args([
                "check",
                "--n",
                &n.to_string(),
                "--h",
                &h.to_string(),
                "--m",
                "8",
                "--r",
                &r.to_string(),
            ]));
            slowest = slowest.max(took);
            let text = String::from_utf8_lossy(&out.stdout);
            let ok = admissible
                && out.status.success()
                && text.lines().next() == Some(header.as_str())
                && text.lines().any(|l| l == "admissible yes")
                && took < CHECK_LIMIT;
            if !ok {
                bad.push(format!("K_{n}^{h} r={r}"));
            }
        }
    }
    Verdict {
        pass: bad.is_empty(),
        detail: format!("{}/{runs} admissible with exact k, slowest {slowest:.2?}{}", runs - bad.len(), tail(&bad)),
    }
}

fn criterion2() -> Verdict {
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    let cases: [(&[&str], i64, i64); 2] = [
        (&["--m", "10", "--h", "3", "--n", "38", "--r", "6"], 105, 103),
        (&["--m", "9", "--h", "3", "--n", "34", "--r", "24", "--s", "23"], 21, 20),
    ];
    for (args, plain, connected) in cases {
        let (out, took) = timed(bin().args(["bounds", "qmax", "--format", "json"]).args(args));
        slowest = slowest.max(took);
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_default();
        let got = (doc["qmax"].as_i64(), doc["qmax_connected"].as_i64());
        if got != (Some(plain), Some(connected)) || took >= BOUNDS_LIMIT {
            bad.push(format!("{args:?} gave {got:?}"));
        }
    }
    let (out, took) = timed(bin().args(["bounds", "cruse", "--m-max", "20", "--n-max", "60", "--format", "json"]));
    slowest = slowest.max(took);
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap_or_default();
    let mut expected = BTreeSet::new();
    for m in 2..=20i64 {
        for n in (2 * m..=60).filter(|n| n % 2 == 0) {
            expected.insert((m, n));
        }
    }
    let mut seen = BTreeSet::new();
    for row in &rows {
        let (m, n, q) = (row["m"].as_i64().unwrap(), row["n"].as_i64().unwrap(), row["qmax"].as_i64().unwrap());
        let want = if m % 2 == 0 { n - m } else { n - m - 1 };
        if q != want {
            bad.push(format!("cruse m={m} n={n}: {q} != {want}"));
        }
        seen.insert((m, n));
    }
    if seen != expected || took >= BOUNDS_LIMIT {
        bad.push("cruse grid incomplete or slow".into());
    }
    Verdict {
        pass: bad.is_empty(),
        detail: format!(
            "105/103 and 21/20 checked, {} cruse cells, slowest {slowest:.2?}{}",
            rows.len(),
            tail(&bad)
        ),
    }
}

/// A random partial 1-factorization of a sub-hypergraph of `K_8^3`.
fn k8_input(k: usize, rng: &mut ChaCha8Rng) -> Coloring {
    let palette = rng.gen_range(2..=k.min(40));
    let skip = rng.gen_range(0.0..0.6);
    greedy_partial(8, 3, 1, k, palette, &vec![1; k], skip, rng)
}

fn instance_file(inst: &Instance, input: &Coloring) -> String {
    let r: Vec<String> = inst.r.iter().map(u64::to_string).collect();
    let mut text = format!(
        "instance n={} h={} lambda={} m={}\ncolors r={}\n",
        inst.n,
        inst.h,
        inst.lambda,
        inst.m,
        r.join(",")
    );
    for (cp, col) in input.iter() {
        let vs: Vec<String> = cp.edge.vertices().iter().map(|v| v.0.to_string()).collect();
        text += &format!("edge {} color={}\n", vs.join(" "), col);
    }
    text
}

fn criterion3(pool: &mut Pool) -> Verdict {
    let (n, m, h) = (30u32, 8u32, 3usize);
    let host = complete_hypergraph(m, h, 1).unwrap();
    let mut bad = Vec::new();
    let mut slowest = Duration::ZERO;
    let mut runs = 0;
    let k = 203;
    let inst = Instance::uniform(n, h, 1, m, 2, k).unwrap();
    let connected = all_colors(k);
    for i in 0..DESK_INPUTS {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let input = k8_input(k, &mut rng);
        for seed in 0..DESK_SEEDS {
            runs += 1;
            let label = format!("input {i} seed {seed}");
            let job = EmbeddingJob::new(inst.clone(), host.clone(), input.clone(), Mode::CompleteConnected, seed)
                .with_connected(connected.clone());
            let t = Instant::now();
            let res = embed(&job);
            let took = t.elapsed();
            slowest = slowest.max(took);
            match res {
                Ok(e) => {
                    let before = pool.contract_failures.len();
                    pool.check_output(&label, &inst, &input, &e, &connected);
                    if pool.contract_failures.len() > before || took >= DESK_RUN_LIMIT {
                        bad.push(label);
                    }
                }
                Err(err) => bad.push(format!("{label}: {err}")),
            }
        }
    }
    // The same construction through the binary.
    let dir = tempfile::TempDir::new().unwrap();
    for i in 0..DESK_SEEDS {
        runs += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + i);
        let input = k8_input(k, &mut rng);
        let path = dir.path().join(format!("in{i}.txt"));
        std::fs::write(&path, instance_file(&inst, &input)).unwrap();
        let (out, took) = timed(bin().args([
            "embed",
            path.to_str().unwrap(),
            "--connected=all",
            "--seed",
            &i.to_string(),
            "--format",
            "json",
        ]));
        slowest = slowest.max(took);
        let parsed = hypembed::io::parse_result(&String::from_utf8_lossy(&out.stdout));
        let ok = match parsed {
            Ok(file) => {
                let g = complete_hypergraph(n, h, 1).unwrap();
                let ids: BTreeSet<u32> = (1..=k as u32).collect();
                out.status.success()
                    && check_factorization(&g, &file.coloring, n, h, 1, &inst.r, &ids).is_ok()
                    && preserved(&input, &file.coloring)
            }
            Err(_) => false,
        };
        if !ok || took >= DESK_RUN_LIMIT {
            bad.push(format!("binary run {i}"));
        }
    }
    // Larger r from the same family of inputs.
    let mut matrix = Vec::new();
    for r in [7u64, 14, 29, 58] {
        let k = (406 / r) as usize;
        let inst = Instance::uniform(n, h, 1, m, r, k).unwrap();
        for i in 0..2 {
            runs += 1;
            let mut rng = ChaCha8Rng::seed_from_u64(7000 + r * 10 + i);
            let input = k8_input(k, &mut rng);
            let label = format!("r={r} input {i}");
            let mut connected = all_colors(k);
            let t = Instant::now();
            let mut job = EmbeddingJob::new(inst.clone(), host.clone(), input.clone(), Mode::CompleteConnected, i)
                .with_connected(connected.clone());
            let mut res = embed(&job);
            if let Err(Error::NecessityViolated { .. }) = res {
                connected.clear();
                job.mode = Mode::Complete;
                job.connected.clear();
                res = embed(&job);
            }
            let took = t.elapsed();
            slowest = slowest.max(took);
            match res {
                Ok(e) => {
                    let before = pool.contract_failures.len();
                    pool.check_output(&label, &inst, &input, &e, &connected);
                    if pool.contract_failures.len() > before || took >= DESK_RUN_LIMIT {
                        bad.push(label);
                    } else {
                        matrix.push(format!("r={r}{}", if connected.is_empty() { "" } else { "c" }));
                    }
                }
                Err(err) => bad.push(format!("{label}: {err}")),
            }
        }
    }
    Verdict {
        pass: bad.is_empty(),
        detail: format!(
            "{}/{runs} verified K_30^3 runs (r=2 all 203 classes connected; matrix {}), slowest {slowest:.2?}{}",
            runs - bad.len(),
            matrix.join(" "),
            tail(&bad)
        ),
    }
}

struct HoleCase {
    m: u32,
    n: u32,
    r: u64,
    s: u64,
    q: usize,
    connected: bool,
}

fn criterion4(pool: &mut Pool) -> Verdict {
    let cases = [
        HoleCase { m: 10, n: 38, r: 6, s: 6, q: 105, connected: false },
        HoleCase { m: 10, n: 38, r: 6, s: 6, q: 103, connected: true },
        HoleCase { m: 9, n: 34, r: 24, s: 23, q: 21, connected: false },
        HoleCase { m: 9, n: 34, r: 24, s: 23, q: 20, connected: true },
    ];
    let mut bad = Vec::new();
    let mut done = Vec::new();
    let mut slowest = Duration::ZERO;
    for case in &cases {
        let h = 3;
        let k = (choose(case.n as u64 - 1, 2) / case.r) as usize;
        let host = complete_hypergraph(case.m, h, 1).unwrap();
        let inst = Instance::new(case.n, h, 1, case.m, vec![case.r; k], Some(vec![case.s; case.q])).unwrap();
        let mut ok_runs = 0;
        for i in 0..HOLE_INPUTS {
            let mut rng = ChaCha8Rng::seed_from_u64(9000 + case.q as u64 * 10 + i);
            let mut input = greedy_partial(case.m, h, 1, k, case.q, &vec![case.s; k], 0.2, &mut rng);
            let used: BTreeSet<Color> = input.iter().map(|(_, c)| c).collect();
            if case.connected {
                break_regular_components(&mut input, case.m, case.q, &inst.r);
            }
            let connected = if case.connected { all_colors(k) } else { BTreeSet::new() };
            let mode = if case.connected { Mode::HoleFillConnected } else { Mode::HoleFill };
            let label = format!("K_{}^3 q={} input {i} ({} colours used)", case.m, case.q, used.len());
            let job = EmbeddingJob::new(inst.clone(), host.clone(), input.clone(), mode, i).with_connected(connected.clone());
            let t = Instant::now();
            let res = embed(&job);
            let took = t.elapsed();
            slowest = slowest.max(took);
            match res {
                Ok(e) => {
                    let before = pool.contract_failures.len();
                    pool.check_output(&label, &inst.without_s(), &input, &e, &connected);
                    if pool.contract_failures.len() > before || took >= HOLE_RUN_LIMIT {
                        bad.push(label);
                    } else {
                        ok_runs += 1;
                    }
                }
                Err(err) => bad.push(format!("{label}: {err}")),
            }
        }
        done.push(format!(
            "K_{}^3->K_{}^3 q={}{} {ok_runs}/{HOLE_INPUTS}",
            case.m,
            case.n,
            case.q,
            if case.connected { " connected" } else { "" }
        ));
    }
    Verdict {
        pass: bad.is_empty(),
        detail: format!("{}, slowest {slowest:.2?}{}", done.join(", "), tail(&bad)),
    }
}

/// Random admissible `r` on a minimal `n`: parts are multiples of
/// `h / gcd(h, n)` summing to `λC(n−1, h−1)`.
fn random_r(n: u32, h: usize, lambda: u64, max_k: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let d = lambda * choose(n as u64 - 1, h as u64 - 1);
    let g = h as u64 / gcd(h as u64, n as u64);
    assert_eq!(d % g, 0);
    let units = d / g;
    let k = rng.gen_range(1..=units.min(max_k));
    let mut cuts = BTreeSet::new();
    while (cuts.len() as u64) < k - 1 {
        cuts.insert(rng.gen_range(1..units));
    }
    let mut r = Vec::new();
    let mut last = 0;
    for c in cuts.into_iter().chain([units]) {
        r.push((c - last) * g);
        last = c;
    }
    r
}

/// A full colouring of `λK_m^h` that is a partial `r`-factorization.
fn full_input(m: u32, h: usize, lambda: u64, r: &[u64], rng: &mut ChaCha8Rng) -> Option<Coloring> {
    let total = lambda * choose(m as u64, h as u64);
    for _ in 0..50 {
        let c = greedy_partial(m, h, lambda, r.len(), r.len(), r, 0.0, rng);
        if c.iter().count() as u64 == total {
            return Some(c);
        }
    }
    None
}

/// A random instance with `n` at the smallest value the identity suite allows.
fn random_instance(hs: &[usize], m_max: u32, max_k: u64, rng: &mut ChaCha8Rng) -> (Instance, Coloring) {
    loop {
        let h = hs[rng.gen_range(0..hs.len())];
        let m = rng.gen_range(h.max(2) as u32..=m_max);
        let lambda = rng.gen_range(1..=2);
        let n = ((h as u32 - 1) * (2 * m - 1)).max(h as u32 * m);
        let r = random_r(n, h, lambda, max_k, rng);
        if let Some(input) = full_input(m, h, lambda, &r, rng) {
            return (Instance::new(n, h, lambda, m, r, None).unwrap(), input);
        }
    }
}

fn identity_failures(state: &AmalgamState, inst: &Instance) -> Vec<String> {
    let mut out = Vec::new();
    let (n, m, h, lambda) = (inst.n as u64, inst.m, inst.h, inst.lambda);
    let p = n - m as u64;
    let mut alpha_h_total = 0;
    for (e, cell) in state.cells() {
        let i = e.occurrences(ALPHA);
        if cell.mult != lambda * choose(p, i) || cell.colored.iter().sum::<u64>() != cell.mult {
            out.push(format!("cell {e}"));
        }
        if i as usize == h {
            alpha_h_total += cell.colored.iter().sum::<u64>();
        }
    }
    if state.base_coloring().iter().count() as u64 != lambda * choose(m as u64, h as u64) {
        out.push("base not fully coloured".into());
    }
    if alpha_h_total != lambda * choose(p, h as u64) {
        out.push(format!("alpha^h total {alpha_h_total}"));
    }
    for j in 1..=inst.k() {
        let col = Color(j as u32);
        let r = inst.r[j - 1];
        let mut deg = vec![0u64; m as usize + 1];
        let mut weighted = 0;
        let mut alpha_deg = 0;
        for cp in state.base_coloring().class(col) {
            for v in cp.edge.vertices() {
                deg[v.0 as usize] += 1;
            }
            weighted += h as u64;
        }
        for (e, cell) in state.cells() {
            let c = cell.colored[j - 1];
            let l = e.occurrences(ALPHA);
            for v in e.vertices().iter().filter(|v| **v != ALPHA) {
                deg[v.0 as usize] += c;
            }
            if (l as usize) < h {
                weighted += (h as u64 - l) * c;
            }
            alpha_deg += l * c;
        }
        if (1..=m as usize).any(|v| deg[v] != r) {
            out.push(format!("class {j}: base degrees"));
        }
        if weighted != r * m as u64 {
            out.push(format!("class {j}: weighted count {weighted} != {}", r * m as u64));
        }
        if alpha_deg != r * p {
            out.push(format!("class {j}: alpha degree {alpha_deg} != {}", r * p));
        }
    }
    out
}

fn criterion5(pool: &mut Pool) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut bad = Vec::new();
    let mut detached = 0;
    let mut by_h = [0usize; 5];
    for i in 0..IDENTITY_INSTANCES {
        let (inst, input) = random_instance(&[2, 3, 4], 8, 40, &mut rng);
        by_h[inst.h] += 1;
        let host = complete_hypergraph(inst.m, inst.h, inst.lambda).unwrap();
        let label = format!("#{i} n={} h={} λ={} m={} k={}", inst.n, inst.h, inst.lambda, inst.m, inst.k());
        let state = match build_amalgam(&host, &input, &inst) {
            Ok(s) => s,
            Err(e) => {
                bad.push(format!("{label}: {e}"));
                continue;
            }
        };
        let fails = identity_failures(&state, &inst);
        if !fails.is_empty() {
            bad.push(format!("{label}: {}", fails.join("; ")));
            continue;
        }
        if inst.lambda * choose(inst.n as u64, inst.h as u64) <= DETACH_COPY_LIMIT {
            match fair_detach(&state, &BTreeSet::new(), i as u64) {
                Ok(result) => {
                    detached += 1;
                    let mut certificate = verify_factorization(&result.hypergraph, &result.coloring, &inst, &BTreeSet::new());
                    certificate.preservation_ok = preserved(&input, &result.coloring);
                    let e = Embedding {
                        result,
                        certificate,
                        overlay: None,
                    };
                    pool.check_output(&label, &inst, &input, &e, &BTreeSet::new());
                    pool.outputs.push((inst.clone(), e.result.hypergraph, e.result.coloring, BTreeSet::new()));
                }
                Err(e) => pool.contract_failures.push(format!("{label}: {e}")),
            }
        }
    }
    Verdict {
        pass: bad.is_empty(),
        detail: format!(
            "{}/{IDENTITY_INSTANCES} instances exact (h=2:{} h=3:{} h=4:{}), {detached} also detached{}",
            IDENTITY_INSTANCES - bad.len(),
            by_h[2],
            by_h[3],
            by_h[4],
            tail(&bad)
        ),
    }
}

fn criterion6(pool: &mut Pool) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut missed = Vec::new();
    let mut independent_misses = 0;
    if pool.outputs.is_empty() {
        missed.push("no outputs to mutate".to_string());
    }
    for i in 0..MUTATIONS {
        if pool.outputs.is_empty() {
            break;
        }
        let (inst, g, c, connected) = &pool.outputs[i % pool.outputs.len()];
        let Some(mutation) = random_mutation(g, c, &mut rng) else {
            missed.push(format!("#{i}: no mutation"));
            continue;
        };
        let (g2, c2) = apply_mutation(g, c, &mutation);
        if verify_factorization(&g2, &c2, inst, connected).passed() {
            missed.push(format!("#{i}: {mutation:?}"));
        }
        let ids: BTreeSet<u32> = connected.iter().map(|c| c.0).collect();
        if check_factorization(&g2, &c2, inst.n, inst.h, inst.lambda, &inst.r, &ids).is_ok() {
            independent_misses += 1;
        }
    }
    let pass = pool.unfair.is_empty() && pool.contract_failures.is_empty() && missed.is_empty();
    let mut bad = pool.unfair.clone();
    bad.extend(pool.contract_failures.iter().cloned());
    bad.extend(missed.iter().cloned());
    Verdict {
        pass,
        detail: format!(
            "{} splits in band, {}/{} outputs meet (a)+(b), {}/{MUTATIONS} mutations flagged ({} missed by the copy-level checker){}",
            pool.steps_checked - pool.unfair.len(),
            pool.contract_runs - pool.contract_failures.len(),
            pool.contract_runs,
            MUTATIONS - missed.len(),
            independent_misses,
            tail(&bad)
        ),
    }
}

/// Every partial `r`-factorization of `λK_m^h` on colours `1..=k`, up to
/// renaming colours: copies of an h-set take non-decreasing values
/// (0 = uncoloured) and a colour is only used after all smaller ones.
fn enumerate_inputs(m: u32, h: usize, lambda: u64, k: usize, r: u64) -> Vec<Coloring> {
    let slots: Vec<(Vec<u32>, u32)> = h_sets(m, h)
        .into_iter()
        .flat_map(|s| (0..lambda as u32).map(move |i| (s.clone(), i)))
        .collect();
    let mut out = Vec::new();
    let mut values = vec![0usize; slots.len()];
    let mut deg = vec![vec![0u64; m as usize + 1]; k + 1];
    fn go(
        at: usize,
        used: usize,
        slots: &[(Vec<u32>, u32)],
        values: &mut Vec<usize>,
        deg: &mut Vec<Vec<u64>>,
        k: usize,
        r: u64,
        out: &mut Vec<Coloring>,
    ) {
        if at == slots.len() {
            let mut c = Coloring::new(k);
            for ((s, i), &v) in slots.iter().zip(values.iter()) {
                if v > 0 {
                    c.assign(hypembed::EdgeCopy::new(MultiEdge::from_ids(s), *i), Color(v as u32)).unwrap();
                }
            }
            out.push(c);
            return;
        }
        let (s, i) = &slots[at];
        let lo = if *i == 0 { 0 } else { values[at - 1] };
        for v in lo..=k.min(used + 1) {
            if v > 0 && s.iter().any(|&x| deg[v][x as usize] >= r) {
                continue;
            }
            if v > 0 {
                for &x in s {
                    deg[v][x as usize] += 1;
                }
            }
            values[at] = v;
            go(at + 1, used.max(v), slots, values, deg, k, r, out);
            if v > 0 {
                for &x in s {
                    deg[v][x as usize] -= 1;
                }
            }
        }
        values[at] = 0;
    }
    go(0, 0, &slots, &mut values, &mut deg, k, r, &mut out);
    out
}

fn criterion7() -> Verdict {
    let mut instances = Vec::new();
    for (h, m, n_max, lambda_max) in [(2usize, 2u32, 6u32, 4u64), (2, 3, 6, 4), (3, 3, 6, 2)] {
        for n in m + 1..=n_max {
            for lambda in 1..=lambda_max {
                if lambda * choose(n as u64, h as u64) > ORACLE_COPY_CAP {
                    continue;
                }
                let d = lambda * choose(n as u64 - 1, h as u64 - 1);
                for r in (1..=d).filter(|r| d.is_multiple_of(*r) && (r * n as u64).is_multiple_of(h as u64)) {
                    instances.push(Instance::uniform(n, h, lambda, m, r, (d / r) as usize).unwrap());
                }
            }
        }
    }
    let mut inputs = 0usize;
    let mut agreed = 0usize;
    let mut declined = 0usize;
    let mut bad = Vec::new();
    let t = Instant::now();
    for inst in &instances {
        let host = complete_hypergraph(inst.m, inst.h, inst.lambda).unwrap();
        let r = inst.r[0];
        let k = inst.k();
        for input in enumerate_inputs(inst.m, inst.h, inst.lambda, k, r) {
            let mut variants = vec![(Mode::Complete, BTreeSet::new())];
            if r >= 2 {
                variants.push((Mode::CompleteConnected, all_colors(k)));
            }
            for (mode, connected) in variants {
                inputs += 1;
                let label = format!(
                    "n={} h={} λ={} m={} r={r} {:?} input {:?}",
                    inst.n,
                    inst.h,
                    inst.lambda,
                    inst.m,
                    mode,
                    input.iter().map(|(cp, c)| (cp.edge.to_string(), c.0)).collect::<Vec<_>>()
                );
                let job = EmbeddingJob::new(inst.clone(), host.clone(), input.clone(), mode, 0).with_connected(connected.clone());
                let Ok(e) = embed(&job) else {
                    declined += 1;
                    continue;
                };
                let ids: BTreeSet<u32> = connected.iter().map(|c| c.0).collect();
                let ok = check_factorization(&e.result.hypergraph, &e.result.coloring, inst.n, inst.h, inst.lambda, &inst.r, &ids)
                    .is_ok()
                    && preserved(&input, &e.result.coloring);
                if !ok {
                    bad.push(format!("{label}: pipeline output invalid"));
                    continue;
                }
                match oracle_exists(&input, inst, &connected, ORACLE_COPY_CAP) {
                    Ok(o) if o.found => {
                        let (g, c) = o.witness.as_ref().expect("found implies witness");
                        if check_factorization(g, c, inst.n, inst.h, inst.lambda, &inst.r, &ids).is_ok() && preserved(&input, c) {
                            agreed += 1;
                        } else {
                            bad.push(format!("{label}: oracle witness invalid"));
                        }
                    }
                    Ok(_) => bad.push(format!("{label}: oracle finds no extension")),
                    Err(err) => bad.push(format!("{label}: oracle {err}")),
                }
            }
        }
    }
    Verdict {
        pass: bad.is_empty() && agreed > 0,
        detail: format!(
            "{} instances, {inputs} (input, mode) pairs: pipeline succeeded on {}, oracle confirmed {agreed}, {declined} declined; {:.1?}{}",
            instances.len(),
            inputs - declined,
            t.elapsed(),
            tail(&bad)
        ),
    }
}

/// Copies of class `j` in a detachment state, one vertex list per copy.
fn detach_class(ds: &DetachState, j: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for (e, counts) in ds.cells() {
        for _ in 0..counts[j] {
            out.push(e.vertices().iter().map(|v| v.0).collect());
        }
    }
    out
}

fn is_partition(wings: &[u32], edges: usize) -> bool {
    let mut seen = 0u32;
    for &w in wings {
        if seen & w != 0 {
            return false;
        }
        seen |= w;
    }
    seen == (1u32 << edges) - 1
}

fn criterion8(pool: &Pool) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut compared = 0usize;
    let mut mid_compared = 0usize;
    let mut partitions = 0usize;
    let mut bound_checked = 0usize;
    let mut bad = Vec::new();
    let mut partition_bad = Vec::new();
    let mut states = 0;
    while states < WING_STATES {
        let (inst, input) = random_instance(&[2, 3], 5, 200, &mut rng);
        let host = complete_hypergraph(inst.m, inst.h, inst.lambda).unwrap();
        let Ok(state) = build_amalgam(&host, &input, &inst) else {
            bad.push(format!("amalgam failed for n={} h={} m={}", inst.n, inst.h, inst.m));
            states += 1;
            continue;
        };
        states += 1;
        let p = (inst.n - inst.m) as u64;
        for j in 1..=inst.k() {
            let col = Color(j as u32);
            let class = state.class_hypergraph(col);
            let edges = copy_list(&class);
            let fast = count_wings(&class, ALPHA).total();
            let mut wings = None;
            if !edges.is_empty() && edges.len() <= WING_EDGE_LIMIT {
                compared += 1;
                let brute = brute_force_wings(&edges, ALPHA.0);
                if brute.len() as u64 != fast {
                    bad.push(format!("state {states} class {j}: brute {} vs {fast}", brute.len()));
                }
                if is_partition(&brute, edges.len()) {
                    partitions += 1;
                } else {
                    partition_bad.push(format!("state {states} class {j}"));
                }
                wings = Some(brute.len() as u64);
            }
            let r = inst.r[j - 1];
            let hypotheses = r >= 2
                && !has_regular_component(state.base_coloring(), inst.m, col, r)
                && inst.n as u64 >= inst.h as u64 * inst.m as u64;
            if hypotheses {
                bound_checked += 1;
                let total = wings.unwrap_or(fast);
                if total > (r - 1) * p + 1 {
                    bad.push(format!("state {states} class {j}: {total} wings > {}", (r - 1) * p + 1));
                }
            }
        }
        if states % 2 == 0 && p >= 2 {
            let Ok(mut ds) = DetachState::from_amalgam(&state) else {
                continue;
            };
            let splits = rng.gen_range(1..p) as u32;
            for s in 0..splits {
                match single_split(&ds, Vertex(inst.m + 1 + s), &BTreeSet::new(), s, states as u64) {
                    Ok((next, _)) => ds = next,
                    Err(e) => {
                        bad.push(format!("state {states}: split {s}: {e}"));
                        break;
                    }
                }
            }
            for j in 0..inst.k() {
                let edges = detach_class(&ds, j);
                if edges.is_empty() || edges.len() > WING_EDGE_LIMIT {
                    continue;
                }
                mid_compared += 1;
                let brute = brute_force_wings(&edges, ALPHA.0);
                let fast = ds.wings(Color::from_index(j)).total();
                if brute.len() as u64 != fast {
                    bad.push(format!("state {states} split class {}: brute {} vs {fast}", j + 1, brute.len()));
                }
            }
        }
    }
    let mut pipeline_bound = 0;
    for (inst, w) in &pool.wing_reports {
        pipeline_bound += 1;
        let bound = (inst.r_of(w.color) - 1) * (inst.n - inst.m) as u64 + 1;
        if w.total > bound || w.bound != bound {
            bad.push(format!("pipeline class {}: {} wings > {bound}", w.color, w.total));
        }
    }
    let partition_note = if partition_bad.is_empty() {
        format!("wings partition the edges in all {partitions}")
    } else {
        format!("wings fail to partition the edges in {} classes", partition_bad.len())
    };
    Verdict {
        pass: bad.is_empty() && compared > 0,
        detail: format!(
            "{compared} amalgam classes and {mid_compared} mid-detachment classes match brute force ({partition_note}); wing bound holds on {bound_checked} random and {pipeline_bound} pipeline classes{}",
            tail(&bad)
        ),
    }
}

fn main() -> ExitCode {
    let mut pool = Pool::default();
    let mut failed = 0;
    // ACCEPTANCE_ONLY=3,7 runs a subset while developing.
    let only: Option<BTreeSet<u32>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |n: u32| only.as_ref().is_none_or(|o| o.contains(&n));
    let mut report = |n: u32, name: &str, v: Verdict| {
        println!("criterion {n} {name}: {} - {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed += 1;
        }
    };
    if wanted(1) {
        report(1, "admissibility reproduction", criterion1());
    }
    if wanted(2) {
        report(2, "bound reproduction", criterion2());
    }
    if wanted(3) {
        report(3, "desk-scale construction", criterion3(&mut pool));
    }
    if wanted(4) {
        report(4, "hole filling at full scale", criterion4(&mut pool));
    }
    if wanted(5) {
        report(5, "phase identities", criterion5(&mut pool));
    }
    if wanted(6) {
        report(6, "fairness contracts and mutation fuzzing", criterion6(&mut pool));
    }
    if wanted(7) {
        report(7, "oracle equivalence", criterion7());
    }
    if wanted(8) {
        report(8, "wing machinery", criterion8(&pool));
    }
    if failed == 0 {
        println!("acceptance: all 8 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}
