//! `hbk`: command-line front end. Every command prints one JSON document
//! except `verify` (a text table unless `--format json`) and `tree
//! --format dot`.

use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use lambda_building::boundary::{self, BoundaryError, FiberBall, Sign};
use lambda_building::group;
use lambda_building::json::{
    class_record, matrix_rows, parse_matrix, point_record, read_class, read_point, weyl_record,
    ClassRecord, ContextTag, PointRecord,
};
use lambda_building::lattice::PivotRule;
use lambda_building::lattice::{self, LatticeClass, ValuationContext};
use lambda_building::matrix::Matrix;
use lambda_building::ordered_values::{project, ProjectionMode};
use lambda_building::projections::{self, CoarseContext};
use lambda_building::{verify, Error, FieldError, Tower};

#[derive(Parser, Debug)]
#[command(
    name = "hbk",
    version,
    about = "Lattice models of Lambda-buildings of SL_n"
)]
struct Cli {
    /// Characteristic of the residue field.
    #[arg(long, global = true, env = "HBK_P", default_value_t = 3)]
    p: u32,
    /// Transcendence depth of the field, 1 to 3.
    #[arg(long, global = true, env = "HBK_D", default_value_t = 2)]
    d: usize,
    /// Expected matrix size, 2 to 4; inputs of another size are rejected.
    #[arg(long, global = true, env = "HBK_N")]
    n: Option<usize>,
    #[arg(long, global = true, env = "HBK_SEED", default_value_t = 7)]
    seed: u64,
    /// Maximal polynomial degree kept at any tower level.
    #[arg(long, global = true, env = "HBK_DEGREE_BOUND", default_value_t = 64)]
    degree_bound: usize,
    #[arg(long, global = true, env = "HBK_FORMAT", value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DistKind {
    Max,
    Sum,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Iwasawa,
    Bruhat,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Valuation of a field element, optionally truncated to `--s` coordinates.
    Val {
        #[arg(long, allow_hyphen_values = true)]
        elem: String,
        #[arg(long)]
        s: Option<usize>,
    },
    /// Distance between two classes.
    Dist {
        #[arg(long, value_enum, default_value_t = DistKind::Sum)]
        kind: DistKind,
        #[arg(long)]
        l1: String,
        #[arg(long)]
        l2: String,
    },
    /// Elementary-divisor invariants of a pair of classes.
    Relpos {
        #[arg(long)]
        l1: String,
        #[arg(long)]
        l2: String,
    },
    /// A common apartment of two classes, or the chart `psi` (`--class`)
    /// and its inverse (`--point`) of the standard apartment.
    Apartment {
        #[arg(long, requires = "l2", conflicts_with_all = ["class", "point"])]
        l1: Option<String>,
        #[arg(long, requires = "l1")]
        l2: Option<String>,
        #[arg(long, conflicts_with = "point")]
        class: Option<String>,
        #[arg(long)]
        point: Option<String>,
    },
    /// Half-apartment bounds of the enclosure of a set of points.
    Enclosure {
        /// JSON array of point records.
        #[arg(long)]
        points: String,
        /// Also report whether this point lies in the enclosure.
        #[arg(long)]
        contains: Option<String>,
    },
    /// Iwasawa or affine Bruhat decomposition of an `SL_n` matrix.
    Decompose {
        #[arg(long, value_enum, default_value_t = Mode::Iwasawa)]
        mode: Mode,
        #[arg(long)]
        matrix: String,
        /// Randomise pivots and double-coset representative with this seed.
        #[arg(long)]
        shuffle: Option<u64>,
    },
    /// Whether a matrix lies in the parahoric subgroup of a point.
    Stabilizes {
        #[arg(long)]
        point: String,
        #[arg(long)]
        matrix: String,
    },
    /// Image of a class in the building of rank `s`.
    Project {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        class: String,
    },
    /// Residue of a class in the fiber over `--base`.
    Residue {
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long)]
        base: String,
        #[arg(long)]
        class: String,
    },
    /// Lift of a residue class back into the fiber over `--base`.
    Lift {
        #[arg(long, default_value_t = 1)]
        s: usize,
        #[arg(long)]
        base: String,
        #[arg(long)]
        class: String,
    },
    /// Ball in the fiber tree of a vertex (`n = 2`, `d = 2`).
    Tree {
        #[arg(long)]
        center: String,
        #[arg(long, default_value_t = 3)]
        radius: usize,
    },
    /// Runs the acceptance criteria.
    Verify {
        /// `all` or a comma-separated list of criterion numbers.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Append the running time of each criterion.
        #[arg(long)]
        timings: bool,
    },
}

enum Failure {
    Usage(String),
    Domain(Error),
    Verify(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}"),
            Failure::Domain(e) => write!(f, "error [{}]: {e}", e.module()),
            Failure::Verify(m) => write!(f, "{m}"),
        }
    }
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        match e.into() {
            Error::Field(FieldError::Parse(p)) => Failure::Usage(format!("bad element: {p}")),
            e => Failure::Domain(e),
        }
    }
}

type Outcome = Result<String, Failure>;

struct Env {
    p: u32,
    d: usize,
    n: Option<usize>,
    seed: u64,
    degree_bound: usize,
    format: Option<Format>,
}

impl Env {
    fn tower_at(&self, depth: usize) -> Result<Tower, FieldError> {
        Ok(Tower::new(self.p, depth)?.with_degree_bound(self.degree_bound))
    }

    fn tower(&self) -> Result<Tower, FieldError> {
        self.tower_at(self.d)
    }

    fn full(&self) -> ContextTag {
        ContextTag {
            rank: self.d,
            coarse: None,
        }
    }

    fn check_n(&self, n: usize) -> Result<(), Failure> {
        match self.n {
            Some(m) if m != n => Err(Failure::Usage(format!("expected size {m}, got {n}"))),
            _ => Ok(()),
        }
    }

    fn class(&self, text: &str, default: ContextTag) -> Result<LatticeClass, Failure> {
        let rec: ClassRecord = parse_json(text)?;
        self.check_n(rec.n)?;
        Ok(read_class(&rec, default, |k| self.tower_at(k))?)
    }

    fn matrix(&self, text: &str) -> Result<Matrix, Failure> {
        let rows: Vec<Vec<String>> = parse_json(text)?;
        self.check_n(rows.len())?;
        Ok(parse_matrix(self.tower()?, &rows)?)
    }

    fn point(&self, text: &str) -> Result<lattice::ApartmentPoint, Failure> {
        let rec: PointRecord = parse_json(text)?;
        self.check_n(rec.coords.len())?;
        let x = read_point(&rec)?;
        if x.dim() != self.d {
            return Err(Failure::Usage(format!(
                "point of rank {} for depth {}",
                x.dim(),
                self.d
            )));
        }
        Ok(x)
    }
}

/// Inline JSON, or `@path` to read it from a file.
fn parse_json<T: DeserializeOwned>(arg: &str) -> Result<T, Failure> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("bad JSON input: {e}")))
}

fn to_json(v: impl serde::Serialize) -> Outcome {
    Ok(serde_json::to_string(&v).expect("serialisable"))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(f) => {
            let code = match f {
                Failure::Usage(_) => 1,
                Failure::Domain(_) => 2,
                Failure::Verify(ref table) => {
                    emit(table);
                    return ExitCode::from(3);
                }
            };
            eprintln!("{f}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    if !(1..=3).contains(&cli.d) {
        return Err(Failure::Usage(format!(
            "--d must be 1, 2 or 3, got {}",
            cli.d
        )));
    }
    if let Some(n) = cli.n {
        if !(2..=4).contains(&n) {
            return Err(Failure::Usage(format!("--n must be 2, 3 or 4, got {n}")));
        }
    }
    let env = Env {
        p: cli.p,
        d: cli.d,
        n: cli.n,
        seed: cli.seed,
        degree_bound: cli.degree_bound,
        format: cli.format,
    };
    env.tower()?;
    match cli.command {
        Command::Val { elem, s } => val(&env, &elem, s),
        Command::Dist { kind, l1, l2 } => {
            let (a, b) = (env.class(&l1, env.full())?, env.class(&l2, env.full())?);
            let v = match kind {
                DistKind::Max => lattice::dist_max(&a, &b)?,
                DistKind::Sum => lattice::dist_sum(&a, &b)?,
            };
            to_json(v)
        }
        Command::Relpos { l1, l2 } => {
            let (a, b) = (env.class(&l1, env.full())?, env.class(&l2, env.full())?);
            to_json(lattice::rel_position(&a, &b)?)
        }
        Command::Apartment {
            l1,
            l2,
            class,
            point,
        } => apartment(&env, l1, l2, class, point),
        Command::Enclosure { points, contains } => enclosure(&env, &points, contains),
        Command::Decompose {
            mode,
            matrix,
            shuffle,
        } => decompose(&env, mode, &matrix, shuffle),
        Command::Stabilizes { point, matrix } => {
            let x = env.point(&point)?;
            let g = env.matrix(&matrix)?;
            to_json(json!({ "stabilizes": group::is_in_parahoric(&g, &x)? }))
        }
        Command::Project { s, class } => {
            let ctx = CoarseContext::new(env.tower()?, s)?;
            let l = env.class(&class, env.full())?;
            to_json(class_record(&projections::coarsen(&l, &ctx)?))
        }
        Command::Residue { s, base, class } => {
            let ctx = CoarseContext::new(env.tower()?, s)?;
            let coarse = ContextTag {
                rank: env.d,
                coarse: Some(s),
            };
            let b = env.class(&base, coarse)?;
            let l = env.class(&class, env.full())?;
            to_json(class_record(&projections::residue_class(&l, &b, &ctx)?))
        }
        Command::Lift { s, base, class } => {
            let ctx = CoarseContext::new(env.tower()?, s)?;
            let coarse = ContextTag {
                rank: env.d,
                coarse: Some(s),
            };
            let residue = ContextTag {
                rank: env.d - s,
                coarse: None,
            };
            let b = env.class(&base, coarse)?;
            let r = env.class(&class, residue)?;
            to_json(class_record(&projections::lift(&r, &b, &ctx)?))
        }
        Command::Tree { center, radius } => tree(&env, &center, radius),
        Command::Verify { suite, timings } => run_verify(&env, &suite, timings),
    }
}

fn val(env: &Env, elem: &str, s: Option<usize>) -> Outcome {
    let x = env.tower()?.parse(elem)?;
    let v = x.val();
    let v = match s {
        Some(s) if !v.is_infinite() => project(&v, s, ProjectionMode::UpTo)?,
        _ => v,
    };
    match env.format {
        Some(Format::Text) => Ok(v.to_string()),
        _ => to_json(v),
    }
}

fn apartment(
    env: &Env,
    l1: Option<String>,
    l2: Option<String>,
    class: Option<String>,
    point: Option<String>,
) -> Outcome {
    match (l1, l2, class, point) {
        (Some(l1), Some(l2), None, None) => {
            let (a, b) = (env.class(&l1, env.full())?, env.class(&l2, env.full())?);
            let ap = lattice::common_apartment(&a, &b)?;
            to_json(json!({
                "basis": matrix_rows(&ap.basis),
                "x1": point_record(&ap.x1),
                "x2": point_record(&ap.x2),
            }))
        }
        (None, None, Some(c), None) => {
            to_json(point_record(&lattice::psi(&env.class(&c, env.full())?)?))
        }
        (None, None, None, Some(p)) => {
            let ctx = ValuationContext::full(env.tower()?);
            to_json(class_record(&lattice::psi_inv(&ctx, &env.point(&p)?)?))
        }
        _ => Err(Failure::Usage(
            "give --l1 and --l2, or --class, or --point".into(),
        )),
    }
}

fn enclosure(env: &Env, points: &str, contains: Option<String>) -> Outcome {
    let recs: Vec<PointRecord> = parse_json(points)?;
    let pts = recs
        .iter()
        .map(|r| {
            env.check_n(r.coords.len())?;
            Ok(read_point(r)?)
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let bound = lattice::enclosure(&pts)?;
    let bounds: Vec<Value> = bound
        .iter()
        .map(|(&(i, j), l)| json!({ "root": [i + 1, j + 1], "lambda": l }))
        .collect();
    let mut out = json!({ "n": bound.n(), "bounds": bounds });
    if let Some(c) = contains {
        out["contains"] = json!(bound.contains(&env.point(&c)?));
    }
    to_json(out)
}

fn decompose(env: &Env, mode: Mode, matrix: &str, shuffle: Option<u64>) -> Outcome {
    let g = env.matrix(matrix)?;
    let rule = shuffle.map_or(PivotRule::Canonical, PivotRule::Shuffled);
    let out = match mode {
        Mode::Iwasawa => {
            let d = group::iwasawa_with(&g, rule)?;
            json!({
                "mode": "iwasawa",
                "u": matrix_rows(&d.u),
                "m": matrix_rows(&d.m),
                "k": matrix_rows(&d.k),
                "weyl": weyl_record(&group::nu_action(&d.m)?),
            })
        }
        Mode::Bruhat => {
            let d = group::bruhat_with(&g, rule)?;
            json!({
                "mode": "bruhat",
                "b1": matrix_rows(&d.b1),
                "m": matrix_rows(&d.m),
                "b2": matrix_rows(&d.b2),
                "weyl": weyl_record(&group::nu_action(&d.m)?),
            })
        }
    };
    to_json(out)
}

fn tree(env: &Env, center: &str, radius: usize) -> Outcome {
    let c = env.class(center, env.full())?;
    if c.n() != 2 || env.d != 2 {
        return Err(Failure::Domain(
            BoundaryError::Unsupported { n: c.n(), d: env.d }.into(),
        ));
    }
    let ball = boundary::fiber_ball(&c, radius)?;
    match env.format {
        Some(Format::Dot) => Ok(ball.to_dot().trim_end().to_string()),
        Some(Format::Text) => Err(Failure::Usage("tree supports json or dot".into())),
        _ => to_json(tree_json(&ball)),
    }
}

fn tree_json(ball: &FiberBall) -> Value {
    let vertices: Vec<Value> = ball
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            json!({
                "id": i,
                "depth": v.depth,
                "parent": v.parent,
                "word": v.word,
                "valence": v.valence,
                "label": ball.label(i),
                "class": class_record(&v.class),
            })
        })
        .collect();
    let edges: Vec<[usize; 2]> = ball.edges.iter().map(|&(a, b)| [a, b]).collect();
    let ends: Vec<Value> = ball
        .leaves()
        .map(|(i, _)| {
            let e = ball.outward_end(i);
            let edge = |s: Sign| {
                let u = boundary::upsilon(&e, s);
                json!({ "from": class_record(&u.from), "to": class_record(&u.to) })
            };
            json!({
                "vertex": i,
                "end": matrix_rows(e.basis()),
                "lim_plus": matrix_rows(boundary::lim(&e, Sign::Plus).basis()),
                "lim_minus": matrix_rows(boundary::lim(&e, Sign::Minus).basis()),
                "upsilon_plus": edge(Sign::Plus),
                "upsilon_minus": edge(Sign::Minus),
            })
        })
        .collect();
    json!({
        "radius": ball.radius,
        "tree": ball.is_tree(),
        "vertices": vertices,
        "edges": edges,
        "ends": ends,
    })
}

fn run_verify(env: &Env, suite: &str, timings: bool) -> Outcome {
    let ids: Vec<usize> = if suite == "all" {
        verify::CRITERIA.iter().map(|(id, _)| *id).collect()
    } else {
        suite
            .split(',')
            .map(|s| {
                s.trim()
                    .parse()
                    .ok()
                    .filter(|id| verify::CRITERIA.iter().any(|(i, _)| i == id))
                    .ok_or_else(|| Failure::Usage(format!("unknown criterion {s:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    let reports = verify::run(&ids, env.seed);
    let passed = reports.iter().filter(|r| r.passed).count();
    let out = if env.format == Some(Format::Json) {
        let rows: Vec<Value> = reports
            .iter()
            .map(|r| {
                json!({
                    "id": r.id,
                    "title": r.title,
                    "passed": r.passed,
                    "checks": r.checks,
                    "detail": r.detail,
                })
            })
            .collect();
        serde_json::to_string(&json!({ "seed": env.seed, "criteria": rows })).expect("serialisable")
    } else {
        let mut lines: Vec<String> = reports
            .iter()
            .map(|r| {
                if timings {
                    format!("{}  [{:.1?}]", r.line(), r.elapsed)
                } else {
                    r.line()
                }
            })
            .collect();
        lines.push(format!("{passed}/{} criteria passed", reports.len()));
        lines.join("\n")
    };
    if passed == reports.len() {
        Ok(out)
    } else {
        Err(Failure::Verify(out))
    }
}
