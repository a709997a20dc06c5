use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tilesmith::construction::{verify_sampled, Certificate, Meta, DEFAULT_LIMIT};
use tilesmith::error::Error;
use tilesmith::oracle::{self, Branching, Domain, SearchProblem, Status, Symmetry, DEFAULT_BUDGET};
use tilesmith::render::{self, Slice};
use tilesmith::space::{parse_tile, TileSpec};
use tilesmith::{general, simple};

#[derive(Parser)]
#[command(name = "tilesmith", version, about = "Constructive tilings of Z^d by finite tiles")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a tiling certificate for a tile.
    Synth(SynthArgs),
    /// Check a certificate.
    Verify(VerifyArgs),
    /// Exact-cover search on a torus or box.
    Decide(DecideArgs),
    /// Draw a 1-D or 2-D slice of a certificate.
    Render(RenderArgs),
    /// Counting bound for the two-interval tile family.
    Bound(BoundArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Auto,
    Simple,
    General,
}

#[derive(Parser)]
struct SynthArgs {
    /// `X`/`.` string or JSON list of integer points.
    #[arg(long)]
    tile: String,
    #[arg(long, value_enum, default_value = "auto")]
    method: Method,
    /// Certificate path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print pipeline parameters as JSON on stderr.
    #[arg(long)]
    trace: bool,
    /// Try a small torus search before the general pipeline.
    #[arg(long)]
    shortcut: bool,
    #[arg(long, env = "TILESMITH_LIMIT", default_value_t = DEFAULT_LIMIT)]
    limit: u128,
    /// Samples for the self-check of lazy certificates.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VerifyMode {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Parser)]
struct VerifyArgs {
    path: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    mode: VerifyMode,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = "TILESMITH_LIMIT", default_value_t = DEFAULT_LIMIT)]
    limit: u128,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SymArg {
    Translate,
    Permute,
    Full,
}

#[derive(Parser)]
struct DecideArgs {
    #[arg(long)]
    tile: String,
    /// Torus moduli, e.g. `4x2`.
    #[arg(long, conflicts_with_all = ["box", "prove"])]
    torus: Option<String>,
    /// Box extents, e.g. `30` or `5x6`.
    #[arg(long = "box")]
    r#box: Option<String>,
    /// Dimension for a single box extent, and for `--prove`.
    #[arg(long)]
    dim: Option<usize>,
    /// Copies may stick out of the box.
    #[arg(long)]
    overhang: bool,
    #[arg(long, value_enum, default_value = "translate")]
    symmetry: SymArg,
    /// Search nodes before giving up.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Branch on the cell with the fewest fitting copies.
    #[arg(long)]
    fewest: bool,
    /// Look for an uncoverable box (copies overhang, all isometries).
    #[arg(long, conflicts_with = "box")]
    prove: bool,
    /// Largest cube side tried by `--prove`.
    #[arg(long, default_value_t = 12)]
    max_box: i64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Ascii,
    Svg,
}

#[derive(Parser)]
struct RenderArgs {
    path: PathBuf,
    /// Free axes, e.g. `0,1`.
    #[arg(long)]
    axes: Option<String>,
    /// Base point; comma separated, one value per axis.
    #[arg(long)]
    at: Option<String>,
    /// Window along the free axes, e.g. `8x4`.
    #[arg(long)]
    size: Option<String>,
    #[arg(long, value_enum, default_value = "ascii")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Parser)]
struct BoundArgs {
    #[arg(long)]
    k: i64,
    #[arg(long)]
    d: usize,
}

enum Fail {
    Verify(String),
    Usage(String),
    Internal(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::Json(_) | Error::Locate(_) | Error::ShapeMismatch(_) | Error::NotInjective(_) => {
                Fail::Internal(e.to_string())
            }
            _ => Fail::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Fail>;

fn ints(s: &str, sep: char) -> Result<Vec<i64>, Fail> {
    s.split(sep)
        .map(|x| x.trim().parse::<i64>().map_err(|e| Fail::Usage(format!("{s:?}: {e}"))))
        .collect()
}

// A closed pipe downstream is not an error.
fn emit(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn write_out(out: &Option<PathBuf>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Fail::Usage(format!("{}: {e}", p.display()))),
        None => {
            emit(text);
            Ok(())
        }
    }
}

fn self_check(cert: &Certificate, limit: u128, samples: usize, seed: u64) -> CmdResult {
    let ok = match cert.domain_size() {
        Some(n) if n <= limit => cert.verify_exhaustive(limit)?.ok,
        _ => verify_sampled(&cert.construction()?, samples, seed).ok,
    };
    if ok {
        Ok(())
    } else {
        Err(Fail::Internal("synthesized certificate failed its own check".into()))
    }
}

fn shortcut(tile: &TileSpec, limit: u128) -> Result<Option<Certificate>, Fail> {
    let b = tile.dim();
    let k = tile.k();
    let n = tile.len() as i64;
    let mut tori: Vec<Vec<i64>> = Vec::new();
    if b == 1 {
        tori.extend((k..=4 * k).filter(|m| m % n == 0).map(|m| vec![m]));
    }
    if b <= 2 {
        for m0 in k..=2 * k {
            for m1 in k..=2 * k {
                if (m0 * m1) % n == 0 && m0 * m1 <= oracle::MAX_CELLS as i64 {
                    tori.push(vec![m0, m1]);
                }
            }
        }
    }
    for t in tori {
        let p = SearchProblem::new(tile.clone(), Domain::Torus(t.clone()), Symmetry::Translate);
        let r = oracle::decide(&p, 1_000_000)?;
        if r.status == Status::Sat {
            let c = oracle::lift_witness(&p, &r)?;
            let mut meta = Meta { pipeline: "oracle".into(), d: t.len(), ..Meta::default() };
            meta.extra.insert("torus".into(), json!(t));
            return Ok(Some(Certificate::from_construction(c, meta, limit)?));
        }
    }
    Ok(None)
}

fn synth(a: SynthArgs) -> CmdResult {
    let tile = parse_tile(&a.tile)?;
    let punctured = simple::punctured_interval(&tile);
    let method = match a.method {
        Method::Auto if punctured.is_some() => Method::Simple,
        Method::Auto => Method::General,
        m => m,
    };
    let mut found = None;
    if a.shortcut {
        found = shortcut(&tile, a.limit)?;
    }
    let (mut cert, trace, name) = match found {
        Some(c) => (c, Value::Null, "oracle"),
        None if method == Method::Simple => {
            let (k, i) = punctured
                .ok_or_else(|| Fail::Usage(format!("{tile} is not an interval with one interior point removed")))?;
            let (c, t) = simple::synthesize(k, i, a.limit)?;
            (c, serde_json::to_value(&t).map_err(Error::from)?, "simple")
        }
        None => {
            let (c, t) = general::synthesize(&tile, a.limit)?;
            let mut v = serde_json::to_value(&t).map_err(Error::from)?;
            let size = tile.len() as f64;
            let k = tile.k() as f64;
            // Digits of the known existence bound on the dimension, for comparison.
            v["existence_bound_log10"] = json!(100.0 * (size * k.ln()).powi(2) / std::f64::consts::LN_10);
            (c, v, "general")
        }
    };
    cert.meta.extra.insert("limit".into(), json!(a.limit.to_string()));
    cert.meta.extra.insert("seed".into(), json!(a.seed));
    cert.meta.extra.insert("samples".into(), json!(a.samples));
    self_check(&cert, a.limit, a.samples, a.seed)?;
    if a.trace {
        eprintln!("{}", serde_json::to_string_pretty(&trace).map_err(Error::from)?);
    }
    write_out(&a.out, &cert.to_canonical_string())?;
    let summary = format!("tile={} method={name} d={} mode={}", tile, cert.meta.d, cert.mode().as_str());
    if a.out.is_some() {
        emit(&format!("{summary}\n"));
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> CmdResult {
    let text = fs::read_to_string(&a.path).map_err(|e| Fail::Usage(format!("{}: {e}", a.path.display())))?;
    let cert = Certificate::parse(&text).map_err(|e| Fail::Usage(format!("{}: {e}", a.path.display())))?;
    let exhaustive = match a.mode {
        VerifyMode::Exhaustive => true,
        VerifyMode::Sampled => false,
        VerifyMode::Auto => cert.domain_size().is_some_and(|n| n <= a.limit),
    };
    let (ok, report) = if exhaustive {
        match cert.verify_exhaustive(a.limit) {
            Ok(r) => (r.ok, json!({ "mode": "exhaustive", "report": r })),
            Err(e @ Error::LimitExceeded { .. }) => return Err(Fail::Usage(e.to_string())),
            Err(e) => (false, json!({ "mode": "exhaustive", "error": e.to_string() })),
        }
    } else {
        let r = verify_sampled(&cert.construction()?, a.samples, a.seed);
        (r.ok, json!({ "mode": "sampled", "report": r }))
    };
    emit(&format!("{}\n", serde_json::to_string_pretty(&report).map_err(Error::from)?));
    if ok {
        Ok(())
    } else {
        Err(Fail::Verify("certificate is not a tiling".into()))
    }
}

fn decide(a: DecideArgs) -> CmdResult {
    let tile = parse_tile(&a.tile)?;
    let symmetry = match a.symmetry {
        SymArg::Translate => Symmetry::Translate,
        SymArg::Permute => Symmetry::Permute,
        SymArg::Full => Symmetry::Full,
    };
    if a.prove {
        let d = a.dim.unwrap_or(tile.dim());
        let branching = if a.fewest { Branching::FewestCandidates } else { Branching::FirstCell };
        let proof = oracle::prove_not_tiles_with(&tile, d, a.max_box, a.budget, branching)?;
        let out = json!({ "tile": tile.describe(), "dim": d, "budget": a.budget, "proof": proof });
        emit(&format!("{}\n", serde_json::to_string_pretty(&out).map_err(Error::from)?));
        return Ok(());
    }
    let domain = match (&a.torus, &a.r#box) {
        (Some(t), None) => Domain::Torus(ints(t, 'x')?),
        (None, Some(b)) => {
            let mut extent = ints(b, 'x')?;
            if let (1, Some(d)) = (extent.len(), a.dim) {
                extent = vec![extent[0]; d];
            }
            Domain::Box { extent, overhang: a.overhang }
        }
        _ => return Err(Fail::Usage("give exactly one of --torus, --box or --prove".into())),
    };
    let mut problem = SearchProblem::new(tile.clone(), domain, symmetry);
    if a.fewest {
        problem.branching = Branching::FewestCandidates;
    }
    let r = oracle::decide(&problem, a.budget)?;
    let out = json!({ "tile": tile.describe(), "domain": problem.domain, "symmetry": problem.symmetry, "result": r });
    emit(&format!("{}\n", serde_json::to_string_pretty(&out).map_err(Error::from)?));
    Ok(())
}

fn render(a: RenderArgs) -> CmdResult {
    let text = fs::read_to_string(&a.path).map_err(|e| Fail::Usage(format!("{}: {e}", a.path.display())))?;
    let cert = Certificate::parse(&text).map_err(|e| Fail::Usage(format!("{}: {e}", a.path.display())))?;
    let c = cert.construction()?;
    let mut slice = Slice::default_for(&c);
    if let Some(axes) = &a.axes {
        slice.axes = ints(axes, ',')?.into_iter().map(|x| x as usize).collect();
        let periods = c.periods();
        slice.size = slice.axes.iter().map(|&a| periods.get(a).copied().flatten().unwrap_or(12).clamp(1, 64)).collect();
    }
    if let Some(at) = &a.at {
        slice.base = ints(at, ',')?;
    }
    if let Some(size) = &a.size {
        slice.size = ints(size, 'x')?;
    }
    let grid = render::slice_grid(&c, &slice)?;
    let text = match a.format {
        Format::Ascii => render::ascii(&grid),
        Format::Svg => render::svg(&grid),
    };
    write_out(&a.out, &text)
}

fn bound(a: BoundArgs) -> CmdResult {
    let r = oracle::density_bound(a.k, a.d)?;
    let tile = oracle::two_interval_tile(a.k)?;
    let out = json!({ "tile": tile.describe(), "bound": r });
    emit(&format!("{}\n", serde_json::to_string_pretty(&out).map_err(Error::from)?));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Synth(a) => synth(a),
        Cmd::Verify(a) => verify(a),
        Cmd::Decide(a) => decide(a),
        Cmd::Render(a) => render(a),
        Cmd::Bound(a) => bound(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Verify(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Fail::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Fail::Internal(m)) => {
            eprintln!("internal error: {m}");
            ExitCode::from(3)
        }
    }
}
