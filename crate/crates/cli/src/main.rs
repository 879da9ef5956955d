//! `geoloop` command-line front end.
//!
//! Exit codes: 0 success, 1 unreadable or unparsable input, 2 validity and
//! other domain errors, 3 solver non-convergence. Output is written only on
//! success.

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use geoloop::group::action_mu;
use geoloop::invariants::{self, chi, conjugate, deck_element_of_path, is_surface_relator, pi1_class};
use geoloop::io::{ManifoldSpec, TupleJson, WordJson};
use geoloop::realization::realize;
use geoloop::sampling;
use geoloop::{Execution, GeoError, GroupElement, Manifold, Point, Word};

const EPS_ENV: &str = "GEOLOOP_EPS_EQ";

#[derive(Parser, Debug)]
#[command(
    name = "geoloop",
    version,
    about = "Geodesic words, loop groups and their invariants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Manifold spec JSON file.
    #[arg(long, global = true)]
    manifold: Option<PathBuf>,

    /// Word JSON file, `-` for stdin. Repeatable.
    #[arg(long = "word", global = true)]
    words: Vec<PathBuf>,

    /// Surface tuple JSON file.
    #[arg(long, global = true)]
    tuple: Option<PathBuf>,

    /// Number of sample intervals.
    #[arg(long, global = true, default_value_t = 64)]
    samples: usize,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Point-coincidence tolerance; overrides the manifold file and the environment.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a word against the validity conditions of its species.
    Validate,
    /// Normal form of a word.
    Reduce,
    /// Product of two or more group elements, left to right.
    Mul,
    /// Inverse of a group element.
    Inv,
    /// Right action of a group element (second word) on a based word (first word).
    Act,
    /// Sample the piecewise-geodesic realization of a word.
    Realize,
    /// Seeded random points of the manifold.
    Sample {
        #[arg(long, default_value_t = 10)]
        count: usize,
    },
    /// Minimal geodesic between two points.
    SolveGeodesic {
        /// Start point as a JSON array.
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        /// End point as a JSON array.
        #[arg(long, allow_hyphen_values = true)]
        to: String,
    },
    /// Fundamental-group class of a group element.
    Pi1,
    /// Deck element of a based path.
    Deck,
    /// `a * g * a^-1` for `--word g --word a`.
    Conjugate,
    /// Product of commutators of a surface tuple.
    Chi,
    /// Whether the commutator product of a tuple is trivial on the fundamental group.
    Relator,
    /// Seeded corpus of random group elements.
    RandomWords {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        max_length: usize,
        /// Basepoint as a JSON array; defaults to the manifold's standard basepoint.
        #[arg(long, allow_hyphen_values = true)]
        basepoint: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Geo(GeoError),
}

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        Failure::Geo(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Geo(GeoError::Convergence { .. }) => 3,
            Failure::Geo(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Input(m) => m.clone(),
            Failure::Geo(e) => e.to_string(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

struct Inputs<'a> {
    cli: &'a Cli,
    stdin_used: bool,
}

impl Inputs<'_> {
    fn read(&mut self, path: &Path) -> Outcome<String> {
        if path == Path::new("-") {
            if self.stdin_used {
                return Err(Failure::Input("stdin can be read only once".into()));
            }
            self.stdin_used = true;
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(input("stdin"))?;
            Ok(s)
        } else {
            std::fs::read_to_string(path).map_err(input(&path.display().to_string()))
        }
    }

    fn tolerance(&self) -> Outcome<Option<f64>> {
        if let Some(t) = self.cli.tolerance {
            return Ok(Some(t));
        }
        match std::env::var(EPS_ENV) {
            Ok(s) => s.trim().parse::<f64>().map(Some).map_err(input(EPS_ENV)),
            Err(_) => Ok(None),
        }
    }

    fn manifold(&mut self) -> Outcome<Arc<Manifold>> {
        let path = self
            .cli
            .manifold
            .clone()
            .ok_or_else(|| Failure::Input("--manifold is required".into()))?;
        let text = self.read(&path)?;
        let spec: ManifoldSpec = serde_json::from_str(&text).map_err(input(&path.display().to_string()))?;
        Ok(Arc::new(spec.build(self.tolerance()?)?))
    }

    fn word_json(&mut self, i: usize) -> Outcome<WordJson> {
        let path = self.cli.words[i].clone();
        let text = self.read(&path)?;
        serde_json::from_str(&text).map_err(input(&path.display().to_string()))
    }

    /// Exactly `n` words, or at least `n` when `at_least` is set.
    fn words(&mut self, m: &Arc<Manifold>, n: usize, at_least: bool) -> Outcome<Vec<Word>> {
        let k = self.cli.words.len();
        if k < n || (!at_least && k != n) {
            let want = if at_least {
                format!("at least {n}")
            } else {
                n.to_string()
            };
            return Err(Failure::Input(format!("expected {want} --word arguments, found {k}")));
        }
        (0..k).map(|i| Ok(self.word_json(i)?.into_word(m)?)).collect()
    }

    fn elements(&mut self, m: &Arc<Manifold>, n: usize, at_least: bool) -> Outcome<Vec<GroupElement>> {
        self.words(m, n, at_least)?
            .iter()
            .map(|w| Ok(GroupElement::new(w)?))
            .collect()
    }

    fn tuple(&mut self, m: &Arc<Manifold>) -> Outcome<invariants::SurfaceTuple> {
        let path = self
            .cli
            .tuple
            .clone()
            .ok_or_else(|| Failure::Input("--tuple is required".into()))?;
        let text = self.read(&path)?;
        let t: TupleJson = serde_json::from_str(&text).map_err(input(&path.display().to_string()))?;
        Ok(t.into_tuple(m)?)
    }
}

fn point_arg(m: &Manifold, text: &str, flag: &str) -> Outcome<Point> {
    let p: Point = serde_json::from_str(text).map_err(input(flag))?;
    m.check_point(&p)?;
    Ok(p)
}

fn word_value(w: &Word) -> Value {
    serde_json::to_value(WordJson::from_word(w)).expect("serializable")
}

fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("serializable");
    s.push('\n');
    s
}

fn points_csv(header_t: bool, rows: impl Iterator<Item = (f64, Point)>, dim: usize) -> String {
    let mut out = String::new();
    if header_t {
        out.push('t');
    }
    for i in 0..dim {
        if header_t || i > 0 {
            out.push(',');
        }
        write!(out, "coord_{i}").expect("write to string");
    }
    out.push('\n');
    for (t, p) in rows {
        let mut fields: Vec<String> = Vec::with_capacity(dim + 1);
        if header_t {
            fields.push(t.to_string());
        }
        fields.extend(p.coords().iter().map(|c| c.to_string()));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn require_json(cli: &Cli, what: &str) -> Outcome<()> {
    if cli.format == Format::Csv {
        return Err(Failure::Input(format!("{what} supports only --format json")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Outcome<String> {
    let mut io = Inputs { cli, stdin_used: false };
    match &cli.command {
        Command::Validate => {
            require_json(cli, "validate")?;
            let m = io.manifold()?;
            let words = io.words(&m, 1, true)?;
            let reports: Vec<Value> = words
                .iter()
                .map(|w| match w.validate() {
                    Ok(()) => json!({ "valid": true }),
                    Err(GeoError::Validity { index, reason }) => {
                        json!({ "valid": false, "index": index, "reason": reason })
                    }
                    Err(e) => json!({ "valid": false, "reason": e.to_string() }),
                })
                .collect();
            Ok(to_text(&single_or_list(reports)))
        }
        Command::Reduce => {
            require_json(cli, "reduce")?;
            let m = io.manifold()?;
            let w = io.words(&m, 1, false)?.remove(0);
            Ok(to_text(&word_value(w.reduce()?.as_word())))
        }
        Command::Mul => {
            require_json(cli, "mul")?;
            let m = io.manifold()?;
            let gs = io.elements(&m, 2, true)?;
            let mut acc = gs[0].clone();
            for g in &gs[1..] {
                acc = acc.mul(g)?;
            }
            Ok(to_text(&word_value(acc.word())))
        }
        Command::Inv => {
            require_json(cli, "inv")?;
            let m = io.manifold()?;
            let g = io.elements(&m, 1, false)?.remove(0);
            Ok(to_text(&word_value(g.inverse().word())))
        }
        Command::Act => {
            require_json(cli, "act")?;
            let m = io.manifold()?;
            let ws = io.words(&m, 2, false)?;
            let g = GroupElement::new(&ws[1])?;
            Ok(to_text(&word_value(action_mu(&ws[0], &g)?.as_word())))
        }
        Command::Realize => {
            let m = io.manifold()?;
            let w = io.words(&m, 1, false)?.remove(0);
            let path = realize(&w)?;
            let n = cli.samples.max(1);
            let pts = path.sample(n);
            let ts = (0..=n).map(|i| i as f64 / n as f64);
            Ok(match cli.format {
                Format::Csv => points_csv(true, ts.zip(pts), m.coord_len()),
                Format::Json => to_text(&json!({
                    "length": path.total_length(),
                    "breakpoints": path.breakpoints(),
                    "t": ts.collect::<Vec<_>>(),
                    "points": pts,
                })),
            })
        }
        Command::Sample { count } => {
            let m = io.manifold()?;
            let pts = sampling::random_points(&m, *count, cli.seed, Execution::default())?;
            Ok(match cli.format {
                Format::Csv => points_csv(false, pts.into_iter().map(|p| (0.0, p)), m.coord_len()),
                Format::Json => to_text(&json!(pts)),
            })
        }
        Command::SolveGeodesic { from, to } => {
            let m = io.manifold()?;
            let a = point_arg(&m, from, "--from")?;
            let b = point_arg(&m, to, "--to")?;
            let geo = m.geodesic(&a, &b)?;
            let n = cli.samples.max(1);
            let rows: Vec<(f64, Point)> = (0..=n)
                .map(|i| {
                    let t = i as f64 / n as f64;
                    (t, geo.eval(t))
                })
                .collect();
            Ok(match cli.format {
                Format::Csv => points_csv(true, rows.into_iter(), m.coord_len()),
                Format::Json => to_text(&json!({
                    "length": geo.length(),
                    "t": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
                    "points": rows.into_iter().map(|r| r.1).collect::<Vec<_>>(),
                })),
            })
        }
        Command::Pi1 => {
            require_json(cli, "pi1")?;
            let m = io.manifold()?;
            let g = io.elements(&m, 1, false)?.remove(0);
            Ok(to_text(&json!({ "class": pi1_class(&g)? })))
        }
        Command::Deck => {
            require_json(cli, "deck")?;
            let m = io.manifold()?;
            let z = io.words(&m, 1, false)?.remove(0);
            Ok(to_text(&json!({ "class": deck_element_of_path(&z)? })))
        }
        Command::Conjugate => {
            require_json(cli, "conjugate")?;
            let m = io.manifold()?;
            let gs = io.elements(&m, 2, false)?;
            Ok(to_text(&word_value(conjugate(&gs[0], &gs[1])?.word())))
        }
        Command::Chi => {
            require_json(cli, "chi")?;
            let m = io.manifold()?;
            let s = io.tuple(&m)?;
            let c = chi(&s)?;
            let class = match pi1_class(&c) {
                Ok(d) => serde_json::to_value(d).expect("serializable"),
                Err(GeoError::Unsupported(_)) => Value::Null,
                Err(e) => return Err(e.into()),
            };
            Ok(to_text(&json!({ "class": class, "element": word_value(c.word()) })))
        }
        Command::Relator => {
            require_json(cli, "relator")?;
            let m = io.manifold()?;
            let s = io.tuple(&m)?;
            let c = chi(&s)?;
            Ok(to_text(&json!({
                "class": pi1_class(&c)?,
                "relator": is_surface_relator(&s)?,
            })))
        }
        Command::RandomWords {
            count,
            max_length,
            basepoint,
        } => {
            require_json(cli, "random-words")?;
            let m = io.manifold()?;
            let v0 = match basepoint {
                Some(text) => point_arg(&m, text, "--basepoint")?,
                None => m.default_basepoint(),
            };
            let gs = sampling::random_words(&m, &v0, *count, *max_length, cli.seed, Execution::default())?;
            let words: Vec<Value> = gs.iter().map(|g| word_value(g.word())).collect();
            Ok(to_text(&Value::Array(words)))
        }
    }
}

fn single_or_list(mut v: Vec<Value>) -> Value {
    if v.len() == 1 {
        v.remove(0)
    } else {
        Value::Array(v)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("geoloop: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
