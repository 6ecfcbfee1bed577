use clap::{Args, Parser, Subcommand, ValueEnum};
use flatline::connections::{divergence_profile, enumerate_connections, l3};
use flatline::delaunay::{circumdisk_violations, classify, delaunay_triangulate, export, large_triangle_constant};
use flatline::kernel::square_torus;
use flatline::network::{build_network, NetworkOptions};
use flatline::numbers::{parse_real, to_f64};
use flatline::slit::{self, build_slit_torus, plant_direction, shortest_sequence, SequenceOptions, Verdict};
use flatline::strips::{buffered_square_from_strip, decompose_strips, slit_pz, time_sequence, PzOptions};
use flatline::{Error, FlatSurface, Norm, Vec2};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::process::ExitCode;

#[derive(Parser, Serialize)]
#[command(name = "flatline", version, about = "Flat surface experiments from the command line")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Serialize, Clone)]
struct Common {
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Exit with 2 on inconclusive verdicts.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Copy, Clone, ValueEnum, Serialize, PartialEq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum NormArg {
    Sup,
    Euclid,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Norm {
        match n {
            NormArg::Sup => Norm::Sup,
            NormArg::Euclid => Norm::Euclid,
        }
    }
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Command {
    /// Check a surface description and print its invariants.
    Validate {
        /// JSON file, `torus`, or `slit:λ`.
        #[arg(long)]
        surface: String,
    },
    /// Divergence profile log ℓ₁(X_t) along the flow of direction (1, θ).
    Profile {
        #[arg(long)]
        surface: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, value_enum, default_value_t = NormArg::Sup)]
        norm: NormArg,
    },
    /// Delaunay triangulation, empty-circumdisk certificate and export.
    Delaunay {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        /// Margin of the empty-circumdisk test.
        #[arg(long, default_value_t = 1e-9)]
        margin: f64,
    },
    /// Network of embedded squares and its coverage.
    Network {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0.2)]
        delta: f64,
        #[arg(long = "K", default_value_t = 2.0)]
        k: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Coverage below this is a hypothesis failure.
        #[arg(long, default_value_t = 0.999)]
        min_coverage: f64,
    },
    /// Strips cut out by a saddle connection, by index in length order
    /// among the non-vertical ones.
    Strips {
        #[arg(long)]
        surface: String,
        #[arg(long, default_value_t = 0)]
        gamma: usize,
        /// Turn the direction (1, θ) vertical first.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
    },
    /// Buffered squares along t_{n+1} = t_n + ε log t_{n+1} and their
    /// quasi-independence.
    Pz {
        #[arg(long)]
        surface: String,
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
        #[arg(long, default_value_t = 10.0)]
        t0: f64,
        #[arg(long, default_value_t = 20)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Slit-torus directions.
    Slit {
        #[command(subcommand)]
        action: SlitAction,
    },
    /// Runs the built-in examples.
    Selftest,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "action", rename_all = "lowercase")]
enum SlitAction {
    /// Sequence of shortest slits and loops and the resulting verdict.
    Analyze {
        /// Slit length: decimal, p/q, golden, sqrt(N)±M.
        #[arg(long)]
        lambda: String,
        /// Slope of the direction; ignored with --plant.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
        #[arg(long = "J", default_value_t = 30)]
        j: usize,
        /// Plant coefficients b_1,b_2,...
        #[arg(long, value_delimiter = ',')]
        plant: Option<Vec<u64>>,
        /// Seed slit of the plant.
        #[arg(long, default_value = "0,0")]
        w1: String,
        /// Working precision for irrational input.
        #[arg(long, default_value_t = 200)]
        digits: u32,
    },
}

/// A finished report: the document and whether a hypothesis failed.
struct Outcome {
    result: Value,
    csv: Option<String>,
    hypothesis_failed: bool,
}

fn ok(result: Value) -> Outcome {
    Outcome { result, csv: None, hypothesis_failed: false }
}

fn load_surface(arg: &str) -> flatline::Result<FlatSurface> {
    if arg == "torus" {
        return Ok(square_torus());
    }
    if let Some(l) = arg.strip_prefix("slit:") {
        let l = to_f64(&parse_real(l, 30)?);
        return Ok(build_slit_torus(l)?.surface);
    }
    FlatSurface::from_json(&std::fs::read_to_string(arg)?)
}

/// Direction (1, θ).
fn direction(theta: &str) -> flatline::Result<Vec2> {
    let s = to_f64(&parse_real(theta, 30)?);
    if !s.is_finite() {
        return Err(Error::Usage(format!("slope `{theta}` is not finite")));
    }
    Ok(Vec2::new(1.0, s))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn run_validate(surface: &str) -> flatline::Result<Outcome> {
    let s = load_surface(surface)?;
    let cones: Vec<Value> = s
        .cone_points()
        .iter()
        .map(|c| json!({"vertex": c.vertex, "location": c.location, "angle": c.angle, "multiplicity": c.multiplicity()}))
        .collect();
    Ok(ok(json!({
        "polygons": s.polygons().len(),
        "vertices": s.n_vertices(),
        "area": s.area(),
        "genus": s.genus(),
        "euler_characteristic": s.euler_characteristic(),
        "cone_points": cones,
    })))
}

fn run_profile(surface: &str, theta: &str, t0: f64, t1: f64, step: f64, norm: Norm) -> flatline::Result<Outcome> {
    let s = load_surface(surface)?;
    let p = divergence_profile(&s, direction(theta)?, t0, t1, step, norm)?;
    let mut doc = to_value(&p);
    doc["max_slope_deviation"] = json!(p.max_slope_deviation());
    Ok(Outcome { result: doc, csv: Some(p.to_csv()), hypothesis_failed: false })
}

fn run_delaunay(surface: &str, eps: f64, delta: f64, margin: f64) -> flatline::Result<Outcome> {
    let s = load_surface(surface)?;
    let tri = delaunay_triangulate(&s)?;
    let violations = circumdisk_violations(&tri.mesh, margin);
    let class = classify(&tri.mesh, eps, delta);
    let triangles = export(&tri.mesh);
    let mut csv = String::from("triangle,x0,y0,x1,y1,x2,y2,v0,v1,v2,n0,n1,n2,class\n");
    for (i, t) in triangles.iter().enumerate() {
        let c = t.corners;
        let _ = writeln!(
            csv,
            "{i},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            c[0][0],
            c[0][1],
            c[1][0],
            c[1][1],
            c[2][0],
            c[2][1],
            t.vertices[0],
            t.vertices[1],
            t.vertices[2],
            t.neighbors[0],
            t.neighbors[1],
            t.neighbors[2],
            to_value(&class.triangles[i]).as_str().unwrap_or("")
        );
    }
    let failed = !violations.is_empty();
    Ok(Outcome {
        result: json!({
            "flips": tri.flips,
            "triangles": triangles,
            "violations": violations,
            "classification": class,
            "large_triangle_constant": large_triangle_constant(&tri.mesh, delta),
        }),
        csv: Some(csv),
        hypothesis_failed: failed,
    })
}

fn run_network(surface: &str, opts: NetworkOptions, min_coverage: f64) -> flatline::Result<Outcome> {
    let s = load_surface(surface)?;
    let tri = delaunay_triangulate(&s)?;
    let r = build_network(&s, &tri.mesh, &opts)?;
    let check = r.check(min_coverage);
    let mut doc = to_value(&r);
    doc["check"] = match &check {
        Ok(()) => json!("ok"),
        Err(e) => json!(e.to_string()),
    };
    let mut csv = String::from("square,role,home,x,y,side\n");
    for (i, q) in r.squares.iter().enumerate() {
        let role = to_value(&q.role)["kind"].as_str().unwrap_or("").to_string();
        let _ = writeln!(csv, "{i},{role},{},{},{},{}", q.home, q.local.x, q.local.y, q.square.side);
    }
    Ok(Outcome { result: doc, csv: Some(csv), hypothesis_failed: check.is_err() })
}

fn run_strips(surface: &str, gamma: usize, theta: Option<&str>) -> flatline::Result<Outcome> {
    let mut s = load_surface(surface)?;
    if let Some(th) = theta {
        s = s.rotate_to_vertical(direction(th)?)?;
    }
    let m = delaunay_triangulate(&s)?.mesh;
    let diam = s.area().sqrt();
    let mut bound = diam;
    let conns = loop {
        let cs: Vec<_> = enumerate_connections(&m, bound, Norm::Euclid)?
            .into_iter()
            .filter(|c| c.holonomy.x.abs() > 1e-9 * c.length)
            .collect();
        if cs.len() > gamma {
            break cs;
        }
        if bound > 64.0 * diam {
            return Err(Error::Usage(format!("fewer than {} non-vertical connections of length <= {bound}", gamma + 1)));
        }
        bound *= 1.5;
    };
    let c = &conns[gamma];
    let dec = decompose_strips(&m, c)?;
    let bs = buffered_square_from_strip(&m, &dec)?;
    let mut csv = String::from("strip,left,right,width,transverse_width,height,area,shift,zipper_left,zipper_right\n");
    for (i, st) in dec.strips.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{},{},{},{},{},{},{},{},{}",
            st.left, st.right, st.width, st.transverse_width, st.height, st.area, st.shift, st.zippers[0].height, st.zippers[1].height
        );
    }
    Ok(Outcome {
        result: json!({
            "gamma": c,
            "decomposition": dec,
            "area_error": (dec.total_area - dec.surface_area).abs(),
            "buffered_square": bs,
        }),
        csv: Some(csv),
        hypothesis_failed: false,
    })
}

fn run_pz(surface: &str, theta: &str, eps: f64, t0: f64, n: usize, samples: usize, seed: u64) -> flatline::Result<Outcome> {
    let s = load_surface(surface)?;
    let seq = time_sequence(eps, t0, n)?;
    let times: Vec<f64> = seq.times.iter().copied().take(n.clamp(1, 64)).collect();
    let opts = PzOptions { samples, window: times.len(), seed, ..Default::default() };
    let r = slit_pz(&s, direction(theta)?, &times, &opts)?;
    let mut csv = String::from("n,t,side,alpha,overlap,measure,partial_sum\n");
    for (i, q) in r.squares.iter().enumerate() {
        let _ = writeln!(csv, "{i},{},{},{},{},{},{}", q.t, q.side, q.alpha, q.overlap, r.stats.measures[i], r.stats.partial_sums[i]);
    }
    Ok(Outcome {
        result: json!({
            "times": {
                "values": times,
                "max_residual": seq.max_residual,
                "growth_max": seq.growth_max,
                "growth_bounded": seq.growth_bounded,
                "doubling_ok": seq.doubling_ok,
            },
            "pz": r,
        }),
        csv: Some(csv),
        hypothesis_failed: false,
    })
}

/// Digits to which a number on the command line is known. Decimals with
/// more than six fractional digits are truncations of something else;
/// shorter ones, integers and `p/q` are exact, and symbolic input is
/// evaluated to `digits`.
fn known_digits(s: &str, digits: u32) -> Option<u32> {
    let t = s.trim();
    let body = t.strip_prefix('-').unwrap_or(t);
    if body.contains('/') {
        return None;
    }
    if !body.chars().all(|c| c.is_ascii_digit() || c == '.') {
        let scientific = body.chars().all(|c| c.is_ascii_digit() || ".eE+-".contains(c));
        return (!scientific).then_some(digits);
    }
    let frac = body.split_once('.').map_or(0, |(_, f)| f.len() as u32);
    (frac > 6).then_some(frac)
}

#[allow(clippy::too_many_arguments)]
fn run_slit(lambda: &str, theta: Option<&str>, j: usize, plant: Option<&[u64]>, w1: &str, digits: u32, strict: bool) -> flatline::Result<Outcome> {
    let lam = parse_real(lambda, digits)?;
    let lambda_digits = known_digits(lambda, digits);
    let (slope, slope_digits, t_min, planted) = match plant {
        Some(b) => {
            let (m, n) = w1
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
                .ok_or_else(|| Error::Usage(format!("--w1 expects m,n, got `{w1}`")))?;
            let p = plant_direction(&lam, b, (m, n), lambda_digits)?;
            (p.slope.clone(), None, p.t_first - 0.1, Some(p))
        }
        None => {
            let th = theta.ok_or_else(|| Error::Usage("need --theta or --plant".into()))?;
            (parse_real(th, digits)?, known_digits(th, digits), 0.0, None)
        }
    };
    let opts = SequenceOptions { entries: j, t_min, digits: lambda_digits, slope_digits, ..Default::default() };
    let a = shortest_sequence(&lam, &slope, &opts)?;
    let c = slit::classify(&a);
    let mut rows = Vec::with_capacity(a.sequence.len());
    let mut csv = String::from("j,t,kind,m,n,separating,delta,b\n");
    for (i, e) in a.sequence.iter().enumerate() {
        // δ_k is shared by the slit w_k and the loop v_k; b_k links w_{k-1} to w_k
        let k = (i >= a.run_start).then(|| (i - a.run_start) / 2);
        let delta = k.and_then(|k| a.deltas.get(k).copied());
        let b = k
            .filter(|&k| k >= 1 && (i - a.run_start) % 2 == 0)
            .and_then(|k| a.b.get(k - 1))
            .map(|b| b.to_string());
        let kind = if e.class.is_slit() { "slit" } else { "loop" };
        let _ = writeln!(
            csv,
            "{},{},{kind},{},{},{},{},{}",
            i + 1,
            e.t,
            e.class.m,
            e.class.n,
            e.class.separating,
            delta.map_or(String::new(), |d| d.to_string()),
            b.clone().unwrap_or_default()
        );
        rows.push(json!({
            "j": i + 1,
            "t": e.t,
            "kind": kind,
            "m": e.class.m.to_string(),
            "n": e.class.n.to_string(),
            "separating": e.class.separating,
            "delta": delta,
            "b": b,
        }));
    }
    let mut doc = json!({
        "lambda": a.lambda,
        "slope": a.slope,
        "table": rows,
        "partial_sums": a.partial_sums,
        "pattern": a.pattern,
        "terminated": a.terminated,
        "precision_exhausted": a.precision_exhausted,
        "verdict": c,
    });
    if let Some(p) = planted {
        doc["plant"] = to_value(&p);
    }
    Ok(Outcome { result: doc, csv: Some(csv), hypothesis_failed: strict && c.verdict == Verdict::Inconclusive })
}

fn selftest() -> flatline::Result<Outcome> {
    let mut checks: Vec<(&str, bool)> = Vec::new();
    let t = square_torus();
    checks.push(("square torus has genus 1 and area 1", t.genus() == 1 && (t.area() - 1.0).abs() < 1e-12));
    checks.push(("square torus has no separating pair", matches!(l3(&t, Norm::Euclid, 2.0, 3), Err(Error::GenusTooSmall { .. }))));
    let s = build_slit_torus(0.5)?;
    checks.push(("slit torus lies in genus 2", s.surface.genus() == 2 && (s.surface.area() - 2.0).abs() < 1e-12));
    let tri = delaunay_triangulate(&s.surface)?;
    checks.push(("slit torus triangulation is certified", circumdisk_violations(&tri.mesh, 1e-9).is_empty()));
    let seq = time_sequence(0.0, 3.0, 4)?;
    checks.push(("ε = 0 keeps the times constant", seq.times.iter().all(|&x| x == 3.0)));
    let torus_conns = enumerate_connections(t.mesh(), 1.0 + 1e-9, Norm::Euclid)?;
    checks.push(("square torus has two unit connections", torus_conns.len() == 2));
    let ue = run_slit("0.5", Some("1.6180339887"), 30, None, "0,0", 200, false)?;
    checks.push(("λ = 1/2 with golden slope is uniquely ergodic", ue.result["verdict"]["verdict"] == "UE"));
    let per = run_slit("0.3", Some("2"), 10, None, "0,0", 200, false)?;
    checks.push(("rational slope is periodic", per.result["verdict"]["verdict"] == "PERIODIC"));
    let passed = checks.iter().all(|c| c.1);
    let csv = checks.iter().fold(String::from("check,pass\n"), |mut s, (n, p)| {
        let _ = writeln!(s, "{n},{p}");
        s
    });
    Ok(Outcome {
        result: json!({
            "checks": checks.iter().map(|(n, p)| json!({"check": n, "pass": p})).collect::<Vec<_>>(),
            "passed": passed,
        }),
        csv: Some(csv),
        hypothesis_failed: !passed,
    })
}

fn dispatch(cli: &Cli) -> flatline::Result<Outcome> {
    let c = &cli.common;
    match &cli.command {
        Command::Validate { surface } => run_validate(surface),
        Command::Profile { surface, theta, t0, t1, step, norm } => run_profile(surface, theta, *t0, *t1, *step, (*norm).into()),
        Command::Delaunay { surface, eps, delta, margin } => run_delaunay(surface, *eps, *delta, *margin),
        Command::Network { surface, eps, delta, k, samples, min_coverage } => {
            let opts = NetworkOptions { eps: *eps, delta: *delta, k: *k, samples: *samples, seed: c.seed, ..Default::default() };
            run_network(surface, opts, *min_coverage)
        }
        Command::Strips { surface, gamma, theta } => run_strips(surface, *gamma, theta.as_deref()),
        Command::Pz { surface, theta, eps, t0, n, samples } => run_pz(surface, theta, *eps, *t0, *n, *samples, c.seed),
        Command::Slit { action: SlitAction::Analyze { lambda, theta, j, plant, w1, digits } } => {
            run_slit(lambda, theta.as_deref(), *j, plant.as_deref(), w1, *digits, c.strict)
        }
        Command::Selftest => selftest(),
    }
}

/// Hypothesis failures exit with 2, everything else with 1.
fn error_code(e: &Error) -> u8 {
    match e {
        Error::HypothesisFailure(_)
        | Error::NotConnected { .. }
        | Error::CoverageGap { .. }
        | Error::VerticalSaddleConnection { .. }
        | Error::GenusTooSmall { .. } => 2,
        _ => 1,
    }
}

fn render(cli: &Cli, out: &Outcome) -> String {
    let config = to_value(cli);
    let version = env!("CARGO_PKG_VERSION");
    match (cli.common.format, &out.csv) {
        (Format::Csv, Some(csv)) => format!("# flatline {version}\n# config {config}\n{csv}"),
        _ => {
            let doc = json!({"tool": "flatline", "version": version, "config": config, "result": out.result});
            serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("FLATLINE_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match dispatch(&cli) {
        Ok(out) => {
            let text = render(&cli, &out);
            match &cli.common.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: cannot write {path}: {e}");
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::from(if out.hypothesis_failed { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
