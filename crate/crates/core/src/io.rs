//! Text instance format and result emission.
//!
//! ```text
//! # comment
//! instance n=4 h=2 lambda=1 m=2
//! colors r=1,1,1 s=1
//! mode complete
//! connected all
//! seed 7
//! edge 1 2 color=1
//! ```
//!
//! `r=2*203` repeats a value. `vertices=N` on the `instance` line lets edges
//! use `1..=N` instead of `1..=m` (finished factorizations). An `edge` line
//! without `color=` is an uncoloured copy; repeated lines add copies.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::detachment::{DetachmentResult, SplitStep};
use crate::error::{Error, Result};
use crate::model::{Color, Coloring, EdgeCopy, Instance, MultiEdge, MultiHypergraph, Vertex};
use crate::pipelines::Mode;
use crate::verification::Certificate;

pub const SCHEMA: &str = "hypembed/result/v1";

/// Which classes must come out connected.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectedSpec {
    #[default]
    None,
    All,
    Classes(BTreeSet<Color>),
}

impl ConnectedSpec {
    pub fn resolve(&self, k: usize) -> BTreeSet<Color> {
        match self {
            ConnectedSpec::None => BTreeSet::new(),
            ConnectedSpec::All => (1..=k as u32).map(Color).collect(),
            ConnectedSpec::Classes(c) => c.clone(),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, ConnectedSpec::None)
    }
}

impl FromStr for ConnectedSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "" | "none" => Ok(ConnectedSpec::None),
            "all" => Ok(ConnectedSpec::All),
            list => parse_colors(list).map(ConnectedSpec::Classes),
        }
    }
}

fn parse_colors(list: &str) -> std::result::Result<BTreeSet<Color>, String> {
    list.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .ok()
                .filter(|&c| c > 0)
                .map(Color)
                .ok_or_else(|| format!("bad colour '{t}'"))
        })
        .collect()
}

/// `1,2,3` or `2*203`, or a mix such as `3,2*4`.
pub fn parse_vector(text: &str) -> std::result::Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('*') {
            Some((v, times)) => {
                let v: u64 = v.parse().map_err(|_| format!("bad value '{v}'"))?;
                let times: usize = times.parse().map_err(|_| format!("bad count '{times}'"))?;
                out.extend(std::iter::repeat_n(v, times));
            }
            None => out.push(part.parse().map_err(|_| format!("bad value '{part}'"))?),
        }
    }
    Ok(out)
}

/// Writes `v` with runs of length ≥ 3 compressed.
pub fn format_vector(v: &[u64]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j < v.len() && v[j] == v[i] {
            j += 1;
        }
        if j - i >= 3 {
            parts.push(format!("{}*{}", v[i], j - i));
        } else {
            parts.extend(v[i..j].iter().map(u64::to_string));
        }
        i = j;
    }
    parts.join(",")
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "complete" | "thm11" => Ok(Mode::Complete),
            "complete-connected" | "thm13" => Ok(Mode::CompleteConnected),
            "hole" | "thm12" => Ok(Mode::HoleFill),
            "hole-connected" | "thm14" => Ok(Mode::HoleFillConnected),
            _ => Err(format!("unknown mode '{s}'")),
        }
    }
}

pub fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Complete => "complete",
        Mode::CompleteConnected => "complete-connected",
        Mode::HoleFill => "hole",
        Mode::HoleFillConnected => "hole-connected",
    }
}

/// A parsed instance file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub inst: Instance,
    /// Copies listed in the file, on `1..=vertices`.
    pub listed: MultiHypergraph,
    pub coloring: Coloring,
    pub vertices: u32,
    pub mode: Option<Mode>,
    pub connected: ConnectedSpec,
    pub b: Option<BTreeSet<Color>>,
    pub seed: Option<u64>,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn key_values(line: usize, tokens: &[&str]) -> Result<Vec<(String, String)>> {
    tokens
        .iter()
        .map(|t| {
            t.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| perr(line, format!("expected key=value, got '{t}'")))
        })
        .collect()
}

fn number<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| perr(line, format!("bad {key} '{v}'")))
}

/// Parses the text format into validated job inputs.
pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut header: Option<(u32, usize, u64, u32, Option<u32>)> = None;
    let mut r: Option<Vec<u64>> = None;
    let mut s: Option<Vec<u64>> = None;
    let mut mode = None;
    let mut connected = ConnectedSpec::None;
    let mut b = None;
    let mut seed = None;
    let mut edges: Vec<(usize, Vec<u32>, Option<u32>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "instance" => {
                let (mut n, mut h, mut lambda, mut m, mut verts): (Option<u32>, Option<usize>, Option<u64>, Option<u32>, Option<u32>) =
                    (None, None, None, None, None);
                for (k, v) in key_values(line, &tokens[1..])? {
                    match k.as_str() {
                        "n" => n = Some(number(line, "n", &v)?),
                        "h" => h = Some(number(line, "h", &v)?),
                        "lambda" => lambda = Some(number(line, "lambda", &v)?),
                        "m" => m = Some(number(line, "m", &v)?),
                        "vertices" => verts = Some(number(line, "vertices", &v)?),
                        _ => return Err(perr(line, format!("unknown instance key '{k}'"))),
                    }
                }
                let get = |x: Option<u64>, name: &str| x.ok_or_else(|| perr(line, format!("missing {name}")));
                header = Some((
                    get(n.map(u64::from), "n")? as u32,
                    get(h.map(|x: usize| x as u64), "h")? as usize,
                    get(lambda, "lambda")?,
                    get(m.map(u64::from), "m")? as u32,
                    verts,
                ));
            }
            "colors" => {
                for (k, v) in key_values(line, &tokens[1..])? {
                    let vec = parse_vector(&v).map_err(|e| perr(line, e))?;
                    match k.as_str() {
                        "r" => r = Some(vec),
                        "s" => s = Some(vec),
                        _ => return Err(perr(line, format!("unknown colors key '{k}'"))),
                    }
                }
            }
            "mode" => {
                let name = tokens.get(1).ok_or_else(|| perr(line, "missing mode"))?;
                mode = Some(name.parse().map_err(|e: String| perr(line, e))?);
            }
            "connected" => {
                connected = tokens[1..].join("").parse().map_err(|e: String| perr(line, e))?;
            }
            "b" => {
                b = Some(parse_colors(&tokens[1..].join("")).map_err(|e| perr(line, e))?);
            }
            "seed" => {
                let v = tokens.get(1).ok_or_else(|| perr(line, "missing seed"))?;
                seed = Some(number(line, "seed", v)?);
            }
            "edge" => {
                let mut vs = Vec::new();
                let mut color = None;
                for t in &tokens[1..] {
                    if let Some(c) = t.strip_prefix("color=") {
                        color = Some(number(line, "color", c)?);
                    } else {
                        vs.push(number(line, "vertex", t)?);
                    }
                }
                edges.push((line, vs, color));
            }
            other => return Err(perr(line, format!("unknown record '{other}'"))),
        }
    }

    let (n, h, lambda, m, verts) = header.ok_or_else(|| perr(0, "missing 'instance' line"))?;
    let r = r.ok_or_else(|| perr(0, "missing 'colors r=' line"))?;
    let inst = Instance::new(n, h, lambda, m, r, s).map_err(|e| match e {
        Error::InvalidParams(msg) => Error::Validation(msg),
        other => other,
    })?;
    let vertices = verts.unwrap_or(m);
    if vertices < m || vertices > n {
        return Err(Error::Validation(format!("vertices={vertices} must lie in m..=n")));
    }
    let k = inst.k();
    let mut listed = MultiHypergraph::on_range(h, vertices);
    let mut coloring = Coloring::new(k);
    for (line, vs, color) in edges {
        if vs.len() != h {
            return Err(Error::Validation(format!("line {line}: edge has {} vertices, h = {h}", vs.len())));
        }
        if let Some(v) = vs.iter().find(|&&v| v == 0 || v > vertices) {
            return Err(Error::Validation(format!("line {line}: vertex {v} outside 1..={vertices}")));
        }
        let e = MultiEdge::from_ids(&vs);
        if e.has_repeats() {
            return Err(Error::Validation(format!("line {line}: repeated vertex in edge {e}")));
        }
        let copy = listed.multiplicity(&e);
        if copy >= lambda {
            return Err(Error::Validation(format!("line {line}: more than {lambda} copies of {e}")));
        }
        listed.add_edge(e.clone(), 1)?;
        if let Some(c) = color {
            if c == 0 || c as usize > k {
                return Err(Error::Validation(format!("line {line}: colour {c} outside 1..={k}")));
            }
            coloring.assign(EdgeCopy::new(e, copy as u32), Color(c))?;
        }
    }
    Ok(InstanceFile {
        inst,
        listed,
        coloring,
        vertices,
        mode,
        connected,
        b,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Text,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format '{s}'")),
        }
    }
}

/// Canonically ordered `(vertices, colour)` rows of a coloured hypergraph.
fn edge_rows(g: &MultiHypergraph, c: &Coloring) -> Vec<(Vec<u32>, Option<u32>)> {
    g.copies()
        .map(|copy| {
            let vs = copy.edge.vertices().iter().map(|v| v.0).collect();
            (vs, c.color_of(&copy).map(|c| c.0))
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct JsonEdge {
    vertices: Vec<u32>,
    color: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct JsonResult {
    schema: String,
    instance: Instance,
    seed: u64,
    edges: Vec<JsonEdge>,
    certificate: Certificate,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<SplitStep>>,
}

/// Deterministic text or JSON rendering of a finished run. The text form is
/// itself a valid instance file describing the output.
pub fn emit_result(
    inst: &Instance,
    result: &DetachmentResult,
    cert: &Certificate,
    format: Format,
    trace: bool,
) -> String {
    let inst = inst.without_s();
    match format {
        Format::Json => {
            let doc = JsonResult {
                schema: SCHEMA.to_string(),
                instance: inst,
                seed: result.seed,
                edges: edge_rows(&result.hypergraph, &result.coloring)
                    .into_iter()
                    .map(|(vertices, color)| JsonEdge { vertices, color })
                    .collect(),
                certificate: cert.clone(),
                trace: trace.then(|| result.trace.clone()),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("result serializes");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            writeln!(out, "# {SCHEMA}").unwrap();
            writeln!(
                out,
                "instance n={} h={} lambda={} m={} vertices={}",
                inst.n, inst.h, inst.lambda, inst.m, inst.n
            )
            .unwrap();
            writeln!(out, "colors r={}", format_vector(&inst.r)).unwrap();
            writeln!(out, "seed {}", result.seed).unwrap();
            for (vs, color) in edge_rows(&result.hypergraph, &result.coloring) {
                let vs: Vec<String> = vs.iter().map(u32::to_string).collect();
                match color {
                    Some(c) => writeln!(out, "edge {} color={c}", vs.join(" ")).unwrap(),
                    None => writeln!(out, "edge {}", vs.join(" ")).unwrap(),
                }
            }
            out.push_str(&certificate_text(cert));
            if trace {
                for step in &result.trace {
                    let json = serde_json::to_string(step).expect("step serializes");
                    writeln!(out, "# trace {json}").unwrap();
                }
            }
            out
        }
    }
}

/// Certificate as `#`-comment lines.
pub fn certificate_text(cert: &Certificate) -> String {
    let mut out = String::new();
    writeln!(out, "# certificate {}", if cert.passed() { "pass" } else { "fail" }).unwrap();
    writeln!(
        out,
        "# all_colored={} multiplicity_ok={} preservation_ok={} admissibility_ok={}",
        cert.all_colored, cert.multiplicity_ok, cert.preservation_ok, cert.admissibility_ok
    )
    .unwrap();
    for c in &cert.classes {
        writeln!(
            out,
            "# class {} r={} regular={} spanning={} connected={}{}",
            c.color,
            c.r,
            c.regular,
            c.spanning,
            c.connected,
            if c.connectivity_requested { " requested" } else { "" }
        )
        .unwrap();
    }
    for w in &cert.wing_reports {
        writeln!(
            out,
            "# wings class={} small={} large={} total={} bound={}",
            w.color, w.small_wings, w.large_wings, w.total, w.bound
        )
        .unwrap();
    }
    out
}

/// Writes a job as an instance file (inverse of [`parse_instance`]).
pub fn emit_instance(file: &InstanceFile) -> String {
    let inst = &file.inst;
    let mut out = String::new();
    write!(out, "instance n={} h={} lambda={} m={}", inst.n, inst.h, inst.lambda, inst.m).unwrap();
    if file.vertices != inst.m {
        write!(out, " vertices={}", file.vertices).unwrap();
    }
    out.push('\n');
    write!(out, "colors r={}", format_vector(&inst.r)).unwrap();
    if let Some(s) = &inst.s {
        write!(out, " s={}", format_vector(s)).unwrap();
    }
    out.push('\n');
    if let Some(mode) = file.mode {
        writeln!(out, "mode {}", mode_name(mode)).unwrap();
    }
    match &file.connected {
        ConnectedSpec::None => {}
        ConnectedSpec::All => out.push_str("connected all\n"),
        ConnectedSpec::Classes(c) => {
            let list: Vec<String> = c.iter().map(|c| c.0.to_string()).collect();
            writeln!(out, "connected {}", list.join(",")).unwrap();
        }
    }
    if let Some(b) = &file.b {
        let list: Vec<String> = b.iter().map(|c| c.0.to_string()).collect();
        writeln!(out, "b {}", list.join(",")).unwrap();
    }
    if let Some(seed) = file.seed {
        writeln!(out, "seed {seed}").unwrap();
    }
    for (vs, color) in edge_rows(&file.listed, &file.coloring) {
        let vs: Vec<String> = vs.iter().map(u32::to_string).collect();
        match color {
            Some(c) => writeln!(out, "edge {} color={c}", vs.join(" ")).unwrap(),
            None => writeln!(out, "edge {}", vs.join(" ")).unwrap(),
        }
    }
    out
}

/// Reads back the edges of a text or JSON result as a finished job.
pub fn parse_result(text: &str) -> Result<InstanceFile> {
    if text.trim_start().starts_with('{') {
        let doc: JsonResult =
            serde_json::from_str(text).map_err(|e| perr(e.line(), format!("bad JSON result: {e}")))?;
        if doc.schema != SCHEMA {
            return Err(Error::Validation(format!("unsupported schema '{}'", doc.schema)));
        }
        let inst = doc.instance;
        let mut listed = MultiHypergraph::on_range(inst.h, inst.n);
        let mut coloring = Coloring::new(inst.k());
        for e in doc.edges {
            let edge = MultiEdge::new(e.vertices.iter().map(|&v| Vertex(v)).collect());
            let copy = listed.multiplicity(&edge) as u32;
            listed.add_edge(edge.clone(), 1)?;
            if let Some(c) = e.color {
                coloring.assign(EdgeCopy::new(edge, copy), Color(c))?;
            }
        }
        return Ok(InstanceFile {
            vertices: inst.n,
            inst,
            listed,
            coloring,
            mode: None,
            connected: ConnectedSpec::None,
            b: None,
            seed: Some(doc.seed),
        });
    }
    parse_instance(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn k4_job_parses() {
        let f = parse_instance("instance n=4 h=2 lambda=1 m=2\ncolors r=1,1,1\nedge 1 2 color=1\n").unwrap();
        assert_eq!(f.inst.k(), 3);
        assert_eq!(f.coloring.color_of(&EdgeCopy::new(MultiEdge::from_ids(&[1, 2]), 0)), Some(Color(1)));
        assert_eq!(parse_instance(&emit_instance(&f)).unwrap(), f);
    }

    #[test]
    fn wrong_edge_size() {
        let r = parse_instance("instance n=4 h=2 lambda=1 m=3\ncolors r=1,1,1\nedge 1 2 3 color=1\n");
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn too_many_copies() {
        let r = parse_instance("instance n=4 h=2 lambda=1 m=2\ncolors r=1,1,1\nedge 1 2\nedge 2 1\n");
        assert!(matches!(r, Err(Error::Validation(_))));
    }

    #[test]
    fn parse_errors_carry_lines() {
        let r = parse_instance("# hi\ninstance n=4 h=2 lambda=1 m=2\nfoo\n");
        assert!(matches!(r, Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn runs() {
        assert_eq!(parse_vector("2*3,1").unwrap(), vec![2, 2, 2, 1]);
        assert_eq!(format_vector(&[2, 2, 2, 1, 1]), "2*3,1,1");
    }

    #[test]
    fn header_keys() {
        let f = parse_instance(
            "instance n=8 h=2 lambda=1 m=4\ncolors r=1*7 s=1\nmode hole-connected\nconnected 2,3\nb 1\nseed 9\n",
        )
        .unwrap();
        assert_eq!(f.mode, Some(Mode::HoleFillConnected));
        assert_eq!(f.connected, ConnectedSpec::Classes([Color(2), Color(3)].into()));
        assert_eq!(f.seed, Some(9));
        assert_eq!(parse_instance(&emit_instance(&f)).unwrap(), f);
    }

    proptest! {
        #[test]
        fn vector_round_trip(v in proptest::collection::vec(1u64..4, 0..20)) {
            prop_assert_eq!(parse_vector(&format_vector(&v)).unwrap(), v);
        }

        #[test]
        fn instance_round_trip(picks in proptest::collection::vec((0usize..6, 0u32..4), 0..12), seed in 0u64..100) {
            let sets = crate::model::subsets(4, 2);
            let mut text = format!("instance n=6 h=2 lambda=2 m=4\ncolors r=1*10\nseed {seed}\n");
            let mut used = std::collections::BTreeMap::new();
            for (i, c) in picks {
                let n = used.entry(i).or_insert(0);
                if *n == 2 { continue; }
                *n += 1;
                let e = &sets[i];
                if c == 0 {
                    text += &format!("edge {} {}\n", e[0].0, e[1].0);
                } else {
                    text += &format!("edge {} {} color={c}\n", e[0].0, e[1].0);
                }
            }
            let f = parse_instance(&text).unwrap();
            prop_assert_eq!(parse_instance(&emit_instance(&f)).unwrap(), f);
        }
    }
}
