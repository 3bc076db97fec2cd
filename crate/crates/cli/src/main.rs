//! `hypembed`: check, embed, verify and probe hypergraph factorization
//! embeddings from the command line.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hypembed::arithmetic::{
    self, BoundParams, CorollaryPart, CorollaryVariant, UniformQuery, check_admissible, corollary_presets,
};
use hypembed::connectivity::theorem13_necessity_check;
use hypembed::io::{ConnectedSpec, Format, InstanceFile, certificate_text, emit_result, parse_instance, parse_result, parse_vector};
use hypembed::model::{binom, complete_hypergraph, is_partial_factorization};
use hypembed::pipelines::{EmbeddingJob, Mode, embed};
use hypembed::verification::{OracleLimits, SearchSpace, oracle_extend, search_counterexample, verify_factorization};
use hypembed::{Coloring, Error, Instance};
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "hypembed", version, about = "Embed partial hypergraph factorizations")]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OutputOpts {
    #[arg(long, default_value = "text", value_parser = parse_format)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct EmbedOpts {
    /// Instance files; several run in parallel with --jobs.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Classes to make connected: a list such as 1,4,7, or all.
    #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "all")]
    connected: Option<ConnectedSpec>,
    #[arg(long)]
    seed: Option<u64>,
    /// Include the split trace.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
struct InstanceOpts {
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    h: Option<usize>,
    #[arg(long, default_value_t = 1)]
    lambda: u64,
    /// Defaults to h.
    #[arg(long)]
    m: Option<u32>,
    /// One value (uniform, k derived) or a vector such as 2*203 or 3,3,1.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Admissibility, Ryser diagnostic and theorem hypotheses.
    Check {
        file: Option<PathBuf>,
        #[command(flatten)]
        inst: InstanceOpts,
        #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "all")]
        connected: Option<ConnectedSpec>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Complete a partial factorization of λK_m^h (connected with --connected).
    Embed(EmbedOpts),
    /// Fill the uncoloured part of λK_m^h, then complete.
    EmbedPartial {
        #[command(flatten)]
        opts: EmbedOpts,
        /// The set B for connected hole-filling (default: colours with r_i != s_i).
        #[arg(long)]
        b: Option<String>,
    },
    /// Verify a finished factorization (text or JSON result file).
    Verify {
        file: PathBuf,
        #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "all")]
        connected: Option<ConnectedSpec>,
        /// Original instance whose colouring must be preserved.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Bound calculators and corollary presets.
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
    /// Exhaustive extension search for tiny instances.
    Oracle {
        file: PathBuf,
        #[arg(long, num_args = 0..=1, require_equals = true, default_missing_value = "all")]
        connected: Option<ConnectedSpec>,
        #[arg(long, default_value_t = 64)]
        max_copies: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_count: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Look for admissible instances whose partial colourings do not extend.
    Search {
        #[arg(long, value_delimiter = ',', default_value = "2")]
        h: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        m_max: u32,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        lambda: Vec<u64>,
        #[arg(long)]
        connected: bool,
        #[arg(long, default_value_t = 64)]
        max_copies: u64,
        /// Partial colourings per instance beyond which inputs are sampled.
        #[arg(long, default_value_t = 5000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// Largest number of input colours for uniform r (and s when s < r).
    Qmax {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        h: u64,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        r: u64,
        /// Defaults to r.
        #[arg(long)]
        s: Option<u64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// One corollary preset.
    Preset {
        #[arg(long)]
        part: String,
        #[arg(long, default_value = "complete", value_parser = parse_variant)]
        variant: CorollaryVariant,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        h: u64,
        #[arg(long, default_value_t = 1)]
        lambda: u64,
        #[arg(long)]
        m: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// The h = 2, λ = r = 1 bound over a grid of (m, n).
    Cruse {
        #[arg(long, default_value_t = 20)]
        m_max: u64,
        #[arg(long, default_value_t = 60)]
        n_max: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse()
}

fn parse_variant(s: &str) -> Result<CorollaryVariant, String> {
    match s {
        "complete" => Ok(CorollaryVariant::Complete),
        "subhypergraph" | "sub" => Ok(CorollaryVariant::Subhypergraph),
        _ => Err(format!("unknown variant '{s}'")),
    }
}

/// A CLI failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| fail(1, format!("{}: {e}", path.display())))
}

fn write_output(opts: &OutputOpts, text: &str) -> CliResult {
    match &opts.out {
        Some(path) => fs::write(path, text).map_err(|e| fail(1, format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| fail(1, e.to_string()))
        }
    }
}

fn json_text(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("JSON value serializes");
    s.push('\n');
    s
}

fn instance_from_opts(o: &InstanceOpts) -> CliResult<Instance> {
    let missing = |name: &str| fail(1, format!("--{name} is required without an instance file"));
    let n = o.n.ok_or_else(|| missing("n"))?;
    let h = o.h.ok_or_else(|| missing("h"))?;
    let m = o.m.unwrap_or(h as u32);
    let r_text = o.r.as_deref().ok_or_else(|| missing("r"))?;
    let mut r = parse_vector(r_text).map_err(|e| fail(1, e))?;
    if r.len() == 1 && !r_text.contains('*') {
        let d = o.lambda * binom(n as u64 - 1, h as u64 - 1);
        if r[0] == 0 || !d.is_multiple_of(r[0]) {
            return Err(fail(3, format!("r = {} does not divide λC(n-1,h-1) = {d}", r[0])));
        }
        r = vec![r[0]; (d / r[0]) as usize];
    }
    let s = o.s.as_deref().map(parse_vector).transpose().map_err(|e| fail(1, e))?;
    Ok(Instance::new(n, h, o.lambda, m, r, s)?)
}

fn run_check(
    file: Option<&Path>,
    opts: &InstanceOpts,
    connected: Option<&ConnectedSpec>,
    output: &OutputOpts,
) -> CliResult {
    let parsed = file.map(|f| read(f).and_then(|t| parse_instance(&t).map_err(Failure::from))).transpose()?;
    let (inst, input) = match &parsed {
        Some(f) => (f.inst.clone(), f.coloring.clone()),
        None => {
            let inst = instance_from_opts(opts)?;
            let k = inst.k();
            (inst, Coloring::new(k))
        }
    };
    let spec = connected.cloned().or(parsed.as_ref().map(|f| f.connected.clone())).unwrap_or_default();
    let wanted = spec.resolve(inst.k());
    let failures = arithmetic::admissibility_failures(&inst);
    let admissible = check_admissible(&inst);
    let host = complete_hypergraph(inst.m, inst.h, inst.lambda)?;
    let partial = is_partial_factorization(&host, &input, &inst.r);
    let ryser = arithmetic::ryser_diagnostic(&host, &input, &inst);
    let necessity = theorem13_necessity_check(&host, &input, &inst, &wanted)?;
    let hole = match inst.s {
        Some(_) => Some((arithmetic::theorem12_budget(&inst)?, arithmetic::theorem12_hypothesis(&inst)?)),
        None => None,
    };
    let hole_connected = match (&inst.s, wanted.is_empty()) {
        (Some(_), false) => {
            let b = arithmetic::default_b(&inst)?;
            let bp = BoundParams::new(&inst, &wanted, &b)?;
            Some((arithmetic::theorem14_budget(&inst, &bp)?, arithmetic::theorem14_hypothesis(&inst, &wanted, &b)?))
        }
        _ => None,
    };
    let needed = inst.lambda * binom(inst.m as u64, inst.h as u64);
    let n_bound_ok = inst.n as u64 >= inst.n_bound();
    let text = match output.format {
        Format::Json => json_text(json!({
            "n": inst.n, "h": inst.h, "lambda": inst.lambda, "m": inst.m, "k": inst.k(),
            "admissible": admissible,
            "admissibility_failures": failures,
            "n_bound": inst.n_bound(),
            "n_bound_ok": n_bound_ok,
            "partial_factorization": partial.passed(),
            "ryser": ryser,
            "necessity": necessity,
            "hole_budget": hole.map(|(b, ok)| json!({"budget": b, "needed": needed, "holds": ok})),
            "hole_connected_budget": hole_connected.map(|(b, ok)| json!({"budget": b, "needed": needed, "holds": ok})),
        })),
        Format::Text => {
            let mut s = format!(
                "instance n={} h={} lambda={} m={} k={}\nadmissible {}\n",
                inst.n,
                inst.h,
                inst.lambda,
                inst.m,
                inst.k(),
                if admissible { "yes" } else { "no" }
            );
            for f in &failures {
                s += &format!("  {f}\n");
            }
            s += &format!("n >= (h-1)(2m-1) = {}: {}\n", inst.n_bound(), if n_bound_ok { "yes" } else { "no" });
            s += &format!("partial factorization: {}\n", if partial.passed() { "yes" } else { "no" });
            s += &format!("ryser condition: {}\n", if ryser.passed() { "holds" } else { "fails" });
            for v in ryser.violations() {
                s += &format!("  class {}: {} edges, needs {}\n", v.color, v.edges, v.scaled_requirement);
            }
            if let Some((b, ok)) = hole {
                s += &format!("hole budget {b} vs {needed}: {}\n", if ok { "holds" } else { "fails" });
            }
            if let Some((b, ok)) = hole_connected {
                s += &format!("connected hole budget {b} vs {needed}: {}\n", if ok { "holds" } else { "fails" });
            }
            if !wanted.is_empty() {
                s += &format!("connectivity necessity: {}\n", if necessity.passed() { "holds" } else { "fails" });
            }
            s
        }
    };
    write_output(output, &text)?;
    if !admissible {
        return Err(fail(3, format!("not admissible: {}", failures.join("; "))));
    }
    if !partial.passed() {
        return Err(fail(3, "input is not a partial factorization"));
    }
    if let Some(e) = necessity.first_failure() {
        return Err(e.into());
    }
    Ok(())
}

fn build_job(file: &InstanceFile, partial: bool, opts: &EmbedOpts, b: Option<&str>) -> CliResult<EmbeddingJob> {
    let spec = opts.connected.clone().unwrap_or_else(|| file.connected.clone());
    let connected = spec.resolve(file.inst.k());
    let mode = match (partial, connected.is_empty()) {
        (false, true) => Mode::Complete,
        (false, false) => Mode::CompleteConnected,
        (true, true) => Mode::HoleFill,
        (true, false) => Mode::HoleFillConnected,
    };
    if file.vertices != file.inst.m {
        return Err(fail(1, "instance edges must lie on 1..=m for embedding"));
    }
    let host = complete_hypergraph(file.inst.m, file.inst.h, file.inst.lambda)?;
    let mut job = EmbeddingJob::new(
        file.inst.clone(),
        host,
        file.coloring.clone(),
        mode,
        opts.seed.or(file.seed).unwrap_or(0),
    )
    .with_connected(connected);
    job.b = match b {
        Some(list) => match list.parse::<ConnectedSpec>().map_err(|e| fail(1, e))? {
            ConnectedSpec::Classes(c) => Some(c),
            _ => return Err(fail(1, "--b takes a list of colours")),
        },
        None => file.b.clone(),
    };
    Ok(job)
}

fn embed_one(path: &Path, partial: bool, opts: &EmbedOpts, b: Option<&str>) -> CliResult<String> {
    let file = parse_instance(&read(path)?)?;
    let job = build_job(&file, partial, opts, b)?;
    if partial && job.inst.s.is_none() {
        return Err(Error::MissingS.into());
    }
    let out = embed(&job)?;
    Ok(emit_result(&job.inst, &out.result, &out.certificate, opts.output.format, opts.trace))
}

fn run_embed(opts: &EmbedOpts, partial: bool, b: Option<&str>) -> CliResult {
    let jobs = opts.jobs.max(1);
    let mut results: Vec<Option<CliResult<String>>> = (0..opts.files.len()).map(|_| None).collect();
    for (chunk_idx, chunk) in opts.files.chunks(jobs).enumerate() {
        let done: Vec<CliResult<String>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|path| scope.spawn(move || embed_one(path, partial, opts, b)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|_| Err(fail(4, "worker panicked"))))
                .collect()
        });
        for (i, r) in done.into_iter().enumerate() {
            results[chunk_idx * jobs + i] = Some(r);
        }
    }
    let mut text = String::new();
    let mut worst: Option<Failure> = None;
    for (path, r) in opts.files.iter().zip(results) {
        match r.expect("every file ran") {
            Ok(s) => text += &s,
            Err(f) => {
                if opts.files.len() > 1 {
                    log::error!("{}: {}", path.display(), f.message);
                }
                if worst.as_ref().is_none_or(|w| f.code > w.code) {
                    worst = Some(fail(f.code, format!("{}: {}", path.display(), f.message)));
                }
            }
        }
    }
    write_output(&opts.output, &text)?;
    worst.map_or(Ok(()), Err)
}

fn run_verify(file: &Path, connected: Option<&ConnectedSpec>, input: Option<&Path>, output: &OutputOpts) -> CliResult {
    let f = parse_result(&read(file)?)?;
    let wanted = connected.cloned().unwrap_or_else(|| f.connected.clone()).resolve(f.inst.k());
    let mut cert = verify_factorization(&f.listed, &f.coloring, &f.inst, &wanted);
    if let Some(path) = input {
        let orig = parse_instance(&read(path)?)?;
        if !orig.listed.vertices().is_subset(f.listed.vertices()) {
            return Err(Error::VertexMismatch("input vertices missing from the result".into()).into());
        }
        cert.preservation_ok = orig
            .coloring
            .iter()
            .all(|(copy, c)| f.listed.has_copy(copy) && f.coloring.color_of(copy) == Some(c));
    }
    let text = match output.format {
        Format::Json => json_text(json!({ "passed": cert.passed(), "certificate": cert })),
        Format::Text => certificate_text(&cert),
    };
    write_output(output, &text)?;
    if cert.passed() {
        Ok(())
    } else {
        Err(fail(1, format!("verification failed: {}", cert.failures().join("; "))))
    }
}

fn run_bounds(which: &BoundsCommand) -> CliResult {
    match which {
        BoundsCommand::Qmax { m, h, lambda, n, r, s, output } => {
            let query = UniformQuery {
                m: *m,
                h: *h,
                lambda: *lambda,
                n: *n,
                r: *r,
            };
            let s = s.unwrap_or(*r);
            let compute = |connected: bool| {
                if s == *r {
                    arithmetic::qmax_75(query, connected)
                } else {
                    arithmetic::qmax_74(query, s, connected)
                }
            };
            let plain = compute(false)?;
            let conn = compute(true).map_err(|e| e.to_string());
            let text = match output.format {
                Format::Json => json_text(json!({
                    "m": m, "h": h, "lambda": lambda, "n": n, "r": r, "s": s,
                    "qmax": plain,
                    "qmax_connected": conn.as_ref().ok(),
                    "connected_error": conn.as_ref().err(),
                })),
                Format::Text => {
                    let conn_text = match &conn {
                        Ok(v) => v.to_string(),
                        Err(e) => format!("n/a ({e})"),
                    };
                    format!(
                        "m   h   lambda  n    r    s    qmax  qmax_connected\n{m:<3} {h:<3} {lambda:<7} {n:<4} {r:<4} {s:<4} {plain:<5} {conn_text}\n"
                    )
                }
            };
            write_output(output, &text)
        }
        BoundsCommand::Preset { part, variant, n, h, lambda, m, output } => {
            let part: CorollaryPart = part.parse()?;
            let preset = corollary_presets(part, *variant, *n, *h, *lambda, *m)?;
            let text = match output.format {
                Format::Json => json_text(json!(preset)),
                Format::Text => {
                    let mut s = format!(
                        "part {:?} {:?}: r={} k={} colours={} connected={} n_bound_ok={}\n",
                        preset.part,
                        preset.variant,
                        preset.r,
                        preset.k,
                        preset.color_budget,
                        preset.connected,
                        preset.n_bound_ok
                    );
                    for c in &preset.conditions {
                        s += &format!("  {} : {}\n", c.description, if c.holds { "holds" } else { "fails" });
                    }
                    s
                }
            };
            write_output(output, &text)
        }
        BoundsCommand::Cruse { m_max, n_max, output } => {
            let mut rows = Vec::new();
            for m in 2..=*m_max {
                for n in (2 * m..=*n_max).step_by(2) {
                    let q = arithmetic::qmax_75(
                        UniformQuery {
                            m,
                            h: 2,
                            lambda: 1,
                            n,
                            r: 1,
                        },
                        false,
                    )?;
                    rows.push((m, n, q));
                }
            }
            let text = match output.format {
                Format::Json => json_text(json!(
                    rows.iter().map(|(m, n, q)| json!({"m": m, "n": n, "qmax": q})).collect::<Vec<_>>()
                )),
                Format::Text => {
                    let mut s = String::from("m   n   qmax\n");
                    for (m, n, q) in &rows {
                        s += &format!("{m:<3} {n:<3} {q}\n");
                    }
                    s
                }
            };
            write_output(output, &text)
        }
    }
}

fn run_oracle(
    file: &Path,
    connected: Option<&ConnectedSpec>,
    limits: OracleLimits,
    output: &OutputOpts,
) -> CliResult {
    let f = parse_instance(&read(file)?)?;
    let wanted = connected.cloned().unwrap_or_else(|| f.connected.clone()).resolve(f.inst.k());
    let out = oracle_extend(&f.coloring, &f.inst, &wanted, limits)?;
    let text = match output.format {
        Format::Json => json_text(json!({"found": out.found, "count": out.count, "capped": out.capped})),
        Format::Text => format!(
            "found {}\ncount {}{}\n",
            out.found,
            out.count,
            if out.capped { " (capped)" } else { "" }
        ),
    };
    write_output(output, &text)?;
    if out.found { Ok(()) } else { Err(fail(3, "no extension exists")) }
}

fn run(cli: Cli) -> CliResult {
    match &cli.command {
        Command::Check { file, inst, connected, output } => run_check(file.as_deref(), inst, connected.as_ref(), output),
        Command::Embed(opts) => run_embed(opts, false, None),
        Command::EmbedPartial { opts, b } => run_embed(opts, true, b.as_deref()),
        Command::Verify { file, connected, input, output } => {
            run_verify(file, connected.as_ref(), input.as_deref(), output)
        }
        Command::Bounds { which } => run_bounds(which),
        Command::Oracle { file, connected, max_copies, max_count, output } => run_oracle(
            file,
            connected.as_ref(),
            OracleLimits {
                max_copies: *max_copies,
                max_count: *max_count,
            },
            output,
        ),
        Command::Search { h, m_max, n_max, lambda, connected, max_copies, samples, seed, output } => {
            let space = SearchSpace {
                h: h.clone(),
                m_max: *m_max,
                n_max: *n_max,
                lambda: lambda.clone(),
                max_colorings: *samples,
                seed: *seed,
                limits: OracleLimits {
                    max_copies: *max_copies,
                    max_count: 1,
                },
            };
            let found = search_counterexample(&space, *connected)?;
            let text = match output.format {
                Format::Json => json_text(json!(found)),
                Format::Text => {
                    let mut s = format!("{} finding(s)\n", found.len());
                    for f in &found {
                        let colored: Vec<String> = f
                            .input
                            .iter()
                            .map(|(c, j)| format!("{}#{}={}", c.edge, c.copy, j))
                            .collect();
                        s += &format!(
                            "n={} h={} lambda={} m={} r={} k={} ryser={} input=[{}]\n",
                            f.inst.n,
                            f.inst.h,
                            f.inst.lambda,
                            f.inst.m,
                            f.inst.r[0],
                            f.inst.k(),
                            if f.ryser_ok { "holds" } else { "fails" },
                            colored.join(" ")
                        );
                    }
                    s
                }
            };
            write_output(output, &text)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
