//! Command-line surface of the `gilbert` binary.
//!
//! Every parameter can come from a flag, from a `key = value` config file
//! (`--config`), or from its default, in that order of precedence. Keys in
//! the file that the subcommand does not know are a usage error. Each run
//! writes its artifacts plus `manifest.txt`, which echoes the resolved
//! configuration and the SHA-256 of every artifact.
//!
//! Exit codes: 0 success, 1 computation failure, 2 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::geom::{Angle, Point, Rect};
use crate::limits::{
    arm_body_mean, body_orientation_lengths, limit_measure, polytrope_densities_integral, polytrope_vertex_intensity,
    solve_wstar, tropical_constants, QuadOptions,
};
use crate::mosaic::{build_mosaic, census, classify_polytropes};
use crate::motorsim::{default_margin, simulate, simulate_motorcycles, SimPlan};
use crate::procs::{sample_sites, stream_rng, ModelSpec};
use crate::scaling::{converge, polytrope_densities_mc, segment_crossings_mc, ConvergeOptions, Source};
use crate::tropical::{body_radius, curve, germ_grain, mean_arm_counts, random_standard, CentroidKind, CurveLaw, TropPoly};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "GILBERT_OUT";

/// Face densities `p₃..p₆` of the tropical-line limit as commonly quoted.
pub const REFERENCE_DENSITIES: [f64; 4] = [0.429367312053161, 2.22221756362048, 0.267462936599565, 0.0809521877267980];

#[derive(Debug, Parser)]
#[command(name = "gilbert", version, about = "Iterated Gilbert mosaics, their limits and tropical germ-grain inputs")]
pub struct Cli {
    /// Plain-text `key = value` file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory [default: $GILBERT_OUT or `gilbert-out`].
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for replicate loops.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one mosaic and export sites, events, trails, SVG and a census.
    Simulate(ModelArgs),
    /// Solve for the limit weights and line process of a model.
    Limit(ModelArgs),
    /// Compare rescaled mosaics with the limit line process.
    Converge(ConvergeArgs),
    /// Face densities of the tropical-line limit arrangement.
    Polytropes(PolytropeArgs),
    /// Export a tropical curve and its dual subdivision.
    Tropical(CurveArgs),
    /// Mean crossings of limit arms with a curve body, formula against Monte Carlo.
    Armbody(ArmBodyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// tropical-lines, rectangular, custom or germ-grain.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Lives per motorcycle.
    #[arg(long)]
    pub k: Option<u32>,
    /// Side of the square core window `[0, s]²`.
    #[arg(long)]
    pub window: Option<f64>,
    /// Sampling margin around the core [default: from the limit weights].
    #[arg(long)]
    pub margin: Option<f64>,
    /// Custom model: comma-separated angles in degrees.
    #[arg(long)]
    pub angles: Option<String>,
    /// Custom model: `i+j+..:p` angle sets separated by `;`.
    #[arg(long)]
    pub sets: Option<String>,
    /// Germ-grain model: comma-separated curve degrees.
    #[arg(long)]
    pub degrees: Option<String>,
    /// Germ-grain model: coefficient spread bound.
    #[arg(long)]
    pub spread: Option<f64>,
    /// Germ-grain model: mass, min-y-east or min-x-north.
    #[arg(long)]
    pub centroid: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated list of k.
    #[arg(long)]
    pub ks: Option<String>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Translates of the window per side.
    #[arg(long)]
    pub tiles: Option<usize>,
    #[arg(long)]
    pub margin_factor: Option<f64>,
    /// Samples for the mean arm counts of a germ-grain law.
    #[arg(long)]
    pub arm_samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PolytropeArgs {
    #[arg(long)]
    pub mu_rect: Option<f64>,
    #[arg(long)]
    pub mu_diag: Option<f64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Side of the counting window for the Monte Carlo estimate.
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    /// Polynomial file with one `i j c` line per monomial.
    #[arg(long)]
    pub poly: Option<PathBuf>,
    /// Degree of a random polynomial when no file is given.
    #[arg(long)]
    pub degree: Option<u32>,
    #[arg(long)]
    pub spread: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ArmBodyArgs {
    #[command(flatten)]
    pub curve: CurveArgs,
    /// Degrees of the random curve law generating the arms.
    #[arg(long)]
    pub degrees: Option<String>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub arm_samples: Option<usize>,
}

/// Failure of a CLI run, carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failure(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<crate::Error> for CliError {
    fn from(e: crate::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Parses a config file: `key = value` lines, `#` comments, blank lines ignored.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected `key = value`", n + 1)))?;
        let key = k.trim().replace('-', "_");
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config key `{key}` given twice")));
        }
    }
    Ok(out)
}

/// Resolved configuration: flags over file over defaults, recorded in resolution order.
struct Resolver {
    file: BTreeMap<String, String>,
    resolved: Vec<(String, String)>,
}

impl Resolver {
    fn new(file: BTreeMap<String, String>, command: &str, known: &[&str]) -> CliResult<Self> {
        if let Some(k) = file.keys().find(|k| !known.contains(&k.as_str()) && !GLOBAL_KEYS.contains(&k.as_str())) {
            return Err(CliError::Usage(format!("unknown config key `{k}` for {command}")));
        }
        Ok(Resolver { file, resolved: vec![("command".into(), command.into())] })
    }

    fn lookup<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>> {
        let v = match flag {
            Some(v) => Some(v),
            None => match self.file.get(key) {
                Some(s) => Some(s.parse::<T>().map_err(|_| CliError::Usage(format!("bad value `{s}` for `{key}`")))?),
                None => None,
            },
        };
        if let Some(v) = &v {
            self.resolved.push((key.into(), v.to_string()));
        }
        Ok(v)
    }

    fn get<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T> {
        match self.lookup(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.resolved.push((key.into(), default.to_string()));
                Ok(default)
            }
        }
    }

    fn require<T: FromStr + ToString>(&mut self, key: &str, flag: Option<T>) -> CliResult<T> {
        self.lookup(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required parameter `--{}`", key.replace('_', "-"))))
    }
}

const GLOBAL_KEYS: [&str; 3] = ["out", "seed", "threads"];
const MODEL_KEYS: [&str; 10] = ["model", "lambda", "k", "window", "margin", "angles", "sets", "degrees", "spread", "centroid"];

fn parse_list<T: FromStr>(key: &str, s: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| CliError::Usage(format!("bad entry `{x}` in `{key}`"))))
        .collect()
}

/// Angle sets written as `0+1+2:0.5;0:0.5`.
fn parse_sets(s: &str) -> CliResult<Vec<(Vec<usize>, f64)>> {
    s.split(';')
        .filter(|x| !x.trim().is_empty())
        .map(|entry| {
            let bad = || CliError::Usage(format!("bad angle set `{entry}`, expected `i+j:p`"));
            let (ids, p) = entry.split_once(':').ok_or_else(bad)?;
            let ids = ids.split('+').map(|i| i.trim().parse::<usize>().map_err(|_| bad())).collect::<CliResult<_>>()?;
            Ok((ids, p.trim().parse::<f64>().map_err(|_| bad())?))
        })
        .collect()
}

fn parse_centroid(s: &str) -> CliResult<CentroidKind> {
    match s {
        "mass" => Ok(CentroidKind::MassCenter),
        "min-y-east" => Ok(CentroidKind::MinYEastApex),
        "min-x-north" => Ok(CentroidKind::MinXNorthApex),
        _ => Err(CliError::Usage(format!("unknown centroid `{s}`"))),
    }
}

enum Model {
    Sites(ModelSpec),
    GermGrain { law: CurveLaw, centroid: CentroidKind },
}

fn resolve_model(r: &mut Resolver, a: &ModelArgs, lambda: f64) -> CliResult<(String, Model)> {
    let name = r.get("model", a.model.clone(), "tropical-lines".to_string())?;
    let spec = match name.as_str() {
        "tropical-lines" => ModelSpec::tropical_lines(lambda)?,
        "rectangular" => ModelSpec::rectangular(lambda)?,
        "custom" => {
            let angles: Vec<f64> = parse_list("angles", &r.require::<String>("angles", a.angles.clone())?)?;
            let angles: Vec<Angle> = angles.into_iter().map(Angle::from_degrees).collect();
            let sets = match r.lookup::<String>("sets", a.sets.clone())? {
                Some(s) => parse_sets(&s)?,
                None => vec![((0..angles.len()).collect(), 1.0)],
            };
            ModelSpec::from_set_law(lambda, angles, sets)?
        }
        "germ-grain" => {
            let degrees = parse_list("degrees", &r.get("degrees", a.degrees.clone(), "1,2,3".to_string())?)?;
            let spread = r.get("spread", a.spread, 1.0)?;
            let centroid = parse_centroid(&r.get("centroid", a.centroid.clone(), "mass".to_string())?)?;
            let law = CurveLaw::Random { degrees, spread };
            law.validate()?;
            return Ok((name, Model::GermGrain { law, centroid }));
        }
        other => return Err(CliError::Usage(format!("unknown model `{other}`"))),
    };
    Ok((name, Model::Sites(spec)))
}

/// Output directory and manifest bookkeeping for one run.
struct Run {
    dir: PathBuf,
    artifacts: Vec<(String, String)>,
}

impl Run {
    fn new(dir: PathBuf) -> CliResult<Self> {
        fs::create_dir_all(&dir).map_err(|e| CliError::Failure(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Run { dir, artifacts: Vec::new() })
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.artifacts.push((name.to_string(), sha256_hex(bytes)));
        Ok(())
    }

    fn finish(self, r: &Resolver) -> CliResult<()> {
        let mut m = String::new();
        for (k, v) in &r.resolved {
            let _ = writeln!(m, "{k} = {v}");
        }
        for (name, hash) in &self.artifacts {
            let _ = writeln!(m, "artifact {name} sha256 {hash}");
        }
        fs::write(self.dir.join("manifest.txt"), m)?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> crate::Result<()>) -> CliResult<Vec<u8>> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

/// Parses `args` (program name first) and runs the subcommand; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{report}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line and returns the text report.
pub fn run(cli: Cli) -> CliResult<String> {
    let file = match &cli.config {
        Some(p) => parse_config(
            &fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?,
        )?,
        None => BTreeMap::new(),
    };
    let (name, known): (&str, Vec<&str>) = match &cli.command {
        Command::Simulate(_) | Command::Limit(_) => (command_name(&cli.command), MODEL_KEYS.to_vec()),
        Command::Converge(_) => {
            let mut k = MODEL_KEYS.to_vec();
            k.extend(["ks", "replicates", "tiles", "margin_factor", "arm_samples"]);
            ("converge", k)
        }
        Command::Polytropes(_) => ("polytropes", vec!["mu_rect", "mu_diag", "replicates", "window"]),
        Command::Tropical(_) => ("tropical", vec!["poly", "degree", "spread"]),
        Command::Armbody(_) => ("armbody", vec!["poly", "degree", "spread", "degrees", "lambda", "replicates", "arm_samples"]),
    };
    let mut r = Resolver::new(file, name, &known)?;
    let default_out = std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("gilbert-out"));
    let out: PathBuf = r.get("out", cli.out.clone().map(|p| p.display().to_string()), default_out.display().to_string())?.into();
    let seed = r.get("seed", cli.seed, 1u64)?;
    let threads = r.get("threads", cli.threads, 0usize)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Failure(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Simulate(a) => cmd_simulate(&mut r, a, &out, seed),
        Command::Limit(a) => cmd_limit(&mut r, a, &out, seed),
        Command::Converge(a) => cmd_converge(&mut r, a, &out, seed),
        Command::Polytropes(a) => cmd_polytropes(&mut r, a, &out, seed),
        Command::Tropical(a) => cmd_tropical(&mut r, a, &out, seed),
        Command::Armbody(a) => cmd_armbody(&mut r, a, &out, seed),
    })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Simulate(_) => "simulate",
        Command::Limit(_) => "limit",
        Command::Converge(_) => "converge",
        Command::Polytropes(_) => "polytropes",
        Command::Tropical(_) => "tropical",
        Command::Armbody(_) => "armbody",
    }
}

fn cmd_simulate(r: &mut Resolver, a: &ModelArgs, out: &Path, seed: u64) -> CliResult<String> {
    let lambda: f64 = r.require("lambda", a.lambda)?;
    let k = r.get("k", a.k, 1u32)?;
    let side = r.get("window", a.window, 10.0)?;
    let (name, model) = resolve_model(r, a, lambda)?;
    if !(side > 0.0) || k == 0 {
        return Err(CliError::Usage("need window > 0 and k >= 1".into()));
    }
    let core = Rect::square(side);
    let mut run = Run::new(out.to_path_buf())?;
    let (result, mean_multiplicity) = match &model {
        Model::Sites(spec) => {
            let margin = match r.lookup("margin", a.margin)? {
                Some(m) => m,
                None => default_margin(spec, k)?,
            };
            let plan = SimPlan::new(core, margin)?;
            let sites = sample_sites(spec, plan.sample_window, seed)?;
            run.write("sites.csv", &csv_bytes(|b| sites.write_csv(b))?)?;
            (simulate(&sites, k, &[], plan.options())?, Some(spec.mean_multiplicity()))
        }
        Model::GermGrain { law, centroid } => {
            let source = Source::GermGrain { law: law.clone(), centroid: *centroid, arm_samples: 20_000 };
            let margin = match r.lookup("margin", a.margin)? {
                Some(m) => m,
                None => {
                    let (w, _) = source.limit(lambda, seed)?;
                    4.0 * w.w.iter().cloned().fold(0.0, f64::max) * (k as f64).sqrt() + 2.0 * law.spread_bound()
                }
            };
            let plan = SimPlan::new(core, margin)?;
            let gg = germ_grain(law, lambda, &plan.sample_window, k, *centroid, seed)?;
            let mut germs = String::from("germ,x,y,degree\n");
            for (i, (p, c)) in gg.germs.iter().zip(&gg.curves).enumerate() {
                let _ = writeln!(germs, "{i},{},{},{}", p.x, p.y, c.degree);
            }
            run.write("germs.csv", germs.as_bytes())?;
            (simulate_motorcycles(gg.motorcycles, gg.obstacles, plan.options())?, None)
        }
    };
    run.write("events.csv", &csv_bytes(|b| result.write_events_csv(b))?)?;
    run.write("trails.csv", &csv_bytes(|b| result.write_trails_csv(b))?)?;
    let g = build_mosaic(&result)?;
    run.write("vertices.csv", &csv_bytes(|b| g.write_vertices_csv(b))?)?;
    run.write("faces.csv", &csv_bytes(|b| g.write_faces_csv(b))?)?;
    run.write("mosaic.svg", g.to_svg(&core).as_bytes())?;
    let c = census(&g, &core)?;
    let mut rep = String::new();
    let _ = writeln!(rep, "motorcycles = {}", result.motorcycles.len());
    let _ = writeln!(rep, "events = {}", result.events.len());
    let _ = writeln!(rep, "area = {}", c.area);
    let _ = writeln!(rep, "lambda0 = {:.6}", c.lambda0);
    let _ = writeln!(rep, "lambda1 = {:.6}", c.lambda1);
    let _ = writeln!(rep, "lambda2 = {:.6}", c.lambda2);
    let _ = writeln!(rep, "euler_holds = {}", g.euler_holds());
    let _ = writeln!(rep, "components = {}", g.components);
    let _ = writeln!(rep, "mean_vertices_per_face = {:.6}", c.mean_vertices_per_face);
    for (kind, v) in &c.vertex_intensity {
        let _ = writeln!(rep, "vertices.{} = {v:.6}", kind.name());
    }
    if let Some(m) = mean_multiplicity {
        // Mass transport: sites have degree m̄, graves 3, crossings 4.
        let kf = k as f64;
        let _ = writeln!(rep, "expected.lambda0 = {:.6}", lambda * (1.0 + m * kf));
        let _ = writeln!(rep, "expected.lambda1 = {:.6}", lambda * 2.0 * m * kf);
        let _ = writeln!(rep, "expected.lambda2 = {:.6}", lambda * (m * kf - 1.0));
    }
    if name == "tropical-lines" {
        let p = classify_polytropes(&g, &core)?;
        let _ = writeln!(rep, "polytropes.counts = {:?}", p.counts);
        let _ = writeln!(rep, "polytropes.total = {:.6}", p.total());
        let _ = writeln!(rep, "polytropes.weighted_total = {:.6}", p.weighted_total());
        let _ = writeln!(rep, "polytropes.nonconvex = {}", p.nonconvex);
    }
    run.write("census.txt", rep.as_bytes())?;
    run.finish(r)?;
    Ok(rep)
}

fn cmd_limit(r: &mut Resolver, a: &ModelArgs, out: &Path, seed: u64) -> CliResult<String> {
    let lambda = r.get("lambda", a.lambda, 1.0)?;
    let mut rep = String::new();
    let (name, model) = resolve_model(r, a, lambda)?;
    let (angles, w, lp) = match model {
        Model::Sites(spec) => {
            spec.check_no_parallel_line()?;
            let w = solve_wstar(&spec)?;
            let lp = limit_measure(&spec, &w)?;
            (spec.angles.clone(), w.w, lp)
        }
        Model::GermGrain { law, centroid } => {
            let (w, lp) = Source::GermGrain { law, centroid, arm_samples: 20_000 }.limit(lambda, seed)?;
            (w.angles, w.w, lp)
        }
    };
    let _ = writeln!(rep, "direction_deg,w_star,line_intensity");
    for ((phi, wi), (_, mu)) in angles.iter().zip(&w).zip(&lp.per_direction) {
        let _ = writeln!(rep, "{:.6},{wi:.12},{mu:.12}", phi.degrees());
    }
    let _ = writeln!(rep, "Lambda = {:.12}", lp.lambda_total());
    for (normal, mass) in lp.theta() {
        let _ = writeln!(rep, "Theta({:.6} deg) = {mass:.12}", normal.degrees());
    }
    if name == "tropical-lines" {
        // Closed forms scale like √λ for line intensities and like λ for crossings.
        let c = tropical_constants();
        let s = lambda.sqrt();
        let rows = [
            ("mu_horizontal", lp.per_direction[0].1, c.mu_axis * s),
            ("mu_vertical", lp.per_direction[1].1, c.mu_axis * s),
            ("mu_diagonal", lp.per_direction[2].1, c.mu_diag * s),
            ("crossings_axis_axis", lp.crossing_intensity(0, 1), c.p_axis_axis * lambda),
            ("crossings_axis_diagonal", lp.crossing_intensity(0, 2), c.p_axis_diag * lambda),
        ];
        let _ = writeln!(rep, "quantity,solver,closed_form,abs_diff");
        for (name, solver, closed) in rows {
            let _ = writeln!(rep, "{name},{solver:.12},{closed:.12},{:.3e}", (solver - closed).abs());
        }
    }
    let mut run = Run::new(out.to_path_buf())?;
    run.write("limit.txt", rep.as_bytes())?;
    run.finish(r)?;
    Ok(rep)
}

fn cmd_converge(r: &mut Resolver, a: &ConvergeArgs, out: &Path, seed: u64) -> CliResult<String> {
    let lambda = r.get("lambda", a.model.lambda, 1.0)?;
    let side = r.get("window", a.model.window, 50.0)?;
    let ks: Vec<u32> = parse_list("ks", &r.get("ks", a.ks.clone(), "5,20,50".to_string())?)?;
    let replicates = r.get("replicates", a.replicates, 10usize)?;
    let tiles = r.get("tiles", a.tiles, 4usize)?;
    let margin_factor = r.get("margin_factor", a.margin_factor, 2.0)?;
    let arm_samples = r.get("arm_samples", a.arm_samples, 20_000usize)?;
    let source = match resolve_model(r, &a.model, lambda)?.1 {
        Model::Sites(spec) => Source::Sites(spec),
        Model::GermGrain { law, centroid } => Source::GermGrain { law, centroid, arm_samples },
    };
    if ks.contains(&0) || !(side > 0.0) {
        return Err(CliError::Usage("need every k >= 1 and window > 0".into()));
    }
    let mut rep = String::from("k,direction_deg,mean_count,count_se,limit_mean,rel_error,ks,strip_rate,concentration\n");
    for &k in &ks {
        let mut opts = ConvergeOptions::new(Rect::square(side), replicates, seed);
        opts.tiles = tiles;
        opts.margin_factor = margin_factor;
        opts.lambda = lambda;
        let c = converge(&source, k, &opts)?;
        for d in &c.per_direction {
            let _ = writeln!(
                rep,
                "{k},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                d.angle.degrees(),
                d.mean_count,
                d.count_se,
                d.limit_mean,
                d.rel_error,
                d.ks,
                d.strip_rate,
                d.concentration
            );
        }
    }
    let mut run = Run::new(out.to_path_buf())?;
    run.write("converge.csv", rep.as_bytes())?;
    run.finish(r)?;
    Ok(rep)
}

fn cmd_polytropes(r: &mut Resolver, a: &PolytropeArgs, out: &Path, seed: u64) -> CliResult<String> {
    let c = tropical_constants();
    let mu_rect = r.get("mu_rect", a.mu_rect, c.mu_axis)?;
    let mu_diag = r.get("mu_diag", a.mu_diag, c.mu_diag)?;
    let replicates = r.get("replicates", a.replicates, 100usize)?;
    let side = r.get("window", a.window, 30.0)?;
    let exact = polytrope_densities_integral(mu_rect, mu_diag, QuadOptions::default())?;
    let mc = polytrope_densities_mc(mu_rect, mu_diag, &Rect::square(side), replicates, seed)?;
    let x = polytrope_vertex_intensity(mu_rect, mu_diag);
    let mut rep = String::from("class,integral,quadrature_error,monte_carlo,monte_carlo_se,z\n");
    for i in 0..4 {
        let z = if mc.error[i] > 0.0 { (mc.p[i] - exact.p[i]) / mc.error[i] } else { 0.0 };
        let _ = writeln!(
            rep,
            "{},{:.12},{:.3e},{:.6},{:.6},{:.3}",
            i + 3,
            exact.p[i],
            exact.error[i],
            mc.p[i],
            mc.error[i],
            z
        );
    }
    let _ = writeln!(rep, "vertex_intensity = {x:.12}");
    let _ = writeln!(rep, "residual.total.integral = {:.3e}", exact.total() - x);
    let _ = writeln!(rep, "residual.weighted.integral = {:.3e}", exact.weighted_total() - 4.0 * x);
    let _ = writeln!(rep, "residual.total.monte_carlo = {:.6}", mc.total() - x);
    let _ = writeln!(rep, "residual.weighted.monte_carlo = {:.6}", mc.weighted_total() - 4.0 * x);
    if mu_rect == c.mu_axis && mu_diag == c.mu_diag {
        let _ = writeln!(rep, "class,integral,reference,abs_diff");
        for i in 0..4 {
            let _ = writeln!(
                rep,
                "{},{:.12},{:.12},{:.3e}",
                i + 3,
                exact.p[i],
                REFERENCE_DENSITIES[i],
                (exact.p[i] - REFERENCE_DENSITIES[i]).abs()
            );
        }
    }
    let mut run = Run::new(out.to_path_buf())?;
    run.write("polytropes.txt", rep.as_bytes())?;
    run.finish(r)?;
    Ok(rep)
}

/// The polynomial from `--poly`, or a random one; also returns the resolved spread.
fn resolve_poly(r: &mut Resolver, a: &CurveArgs, seed: u64) -> CliResult<(TropPoly, f64)> {
    let spread = r.get("spread", a.spread, 1.0)?;
    let f = match r.lookup("poly", a.poly.clone().map(|p| p.display().to_string()))? {
        Some(path) => {
            let text = fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
            TropPoly::parse(&text)?
        }
        None => {
            let d = r.get("degree", a.degree, 3u32)?;
            if d == 0 {
                return Err(CliError::Usage("degree must be at least 1".into()));
            }
            random_standard(d, spread, &mut stream_rng(seed, 0x7c))
        }
    };
    Ok((f, spread))
}

/// Square view around a curve's vertices, padded so the arms show.
fn curve_view(vertices: &[Point]) -> Rect {
    let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in vertices {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let c = Point::new(0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y));
    let half = 0.5 * (hi.x - lo.x).max(hi.y - lo.y) + 1.0;
    Rect::centered(c, half, half)
}

fn cmd_tropical(r: &mut Resolver, a: &CurveArgs, out: &Path, seed: u64) -> CliResult<String> {
    let (f, _) = resolve_poly(r, a, seed)?;
    let c = curve(&f)?;
    let mut rep = String::new();
    let _ = writeln!(rep, "degree = {}", c.degree);
    for (i, v) in c.vertices.iter().enumerate() {
        let corners: Vec<String> = c.subdivision.cells[i].corners.iter().map(|(p, q)| format!("({p},{q})")).collect();
        let _ = writeln!(rep, "vertex {i} {} {} cell {}", v.x, v.y, corners.join(" "));
    }
    for e in &c.edges {
        let _ = writeln!(rep, "edge {} {} multiplicity {}", e.a, e.b, e.multiplicity);
    }
    for arm in &c.arms {
        let _ = writeln!(
            rep,
            "arm {} {} direction {:.0} multiplicity {}",
            arm.apex.x,
            arm.apex.y,
            arm.direction.degrees(),
            arm.multiplicity
        );
    }
    let [e, n, sw] = c.arm_census();
    let _ = writeln!(rep, "arm_census = {e} {n} {sw}");
    let _ = writeln!(rep, "body_radius = {:.6}", body_radius(&c));
    let mut run = Run::new(out.to_path_buf())?;
    run.write("poly.txt", f.to_text().as_bytes())?;
    run.write("curve.txt", rep.as_bytes())?;
    run.write("curve.svg", c.to_svg(&curve_view(&c.vertices)).as_bytes())?;
    run.finish(r)?;
    Ok(rep)
}

fn cmd_armbody(r: &mut Resolver, a: &ArmBodyArgs, out: &Path, seed: u64) -> CliResult<String> {
    let (f, spread) = resolve_poly(r, &a.curve, seed)?;
    let degrees = parse_list("degrees", &r.get("degrees", a.degrees.clone(), "1,2,3".to_string())?)?;
    let lambda = r.get("lambda", a.lambda, 1.0)?;
    let replicates = r.get("replicates", a.replicates, 2000usize)?;
    let arm_samples = r.get("arm_samples", a.arm_samples, 20_000usize)?;
    let law = CurveLaw::Random { degrees, spread };
    law.validate()?;
    let body = curve(&f)?.body_segments();
    let d = mean_arm_counts(&law, arm_samples, seed)?;
    let source = Source::GermGrain { law, centroid: CentroidKind::MassCenter, arm_samples };
    let (w, lp) = source.limit(lambda, seed)?;
    let m = arm_body_mean(&body_orientation_lengths(&body), d, [w.w[0], w.w[1], w.w[2]], lambda)?;
    let (mc, se) = segment_crossings_mc(&lp, &body, replicates, seed)?;
    let mut rep = String::new();
    let _ = writeln!(rep, "arm_counts = {:.6} {:.6} {:.6}", d[0], d[1], d[2]);
    let _ = writeln!(rep, "w_star = {:.9} {:.9} {:.9}", w.w[0], w.w[1], w.w[2]);
    let _ = writeln!(rep, "body_length = {:.6}", body.iter().map(|s| s.length()).sum::<f64>());
    let _ = writeln!(rep, "formula = {m:.6}");
    let _ = writeln!(rep, "monte_carlo = {mc:.6}");
    let _ = writeln!(rep, "monte_carlo_se = {se:.6}");
    let _ = writeln!(rep, "z = {:.3}", if se > 0.0 { (mc - m) / se } else { 0.0 });
    let mut run = Run::new(out.to_path_buf())?;
    run.write("poly.txt", f.to_text().as_bytes())?;
    run.write("armbody.txt", rep.as_bytes())?;
    run.finish(r)?;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let m = parse_config("# run\nlambda = 2.5\nmodel=rectangular  # inline\n\nmargin-factor = 3\n").unwrap();
        assert_eq!(m["lambda"], "2.5");
        assert_eq!(m["model"], "rectangular");
        assert_eq!(m["margin_factor"], "3");
        assert!(matches!(parse_config("lambda 2"), Err(CliError::Usage(_))));
        assert!(matches!(parse_config("a=1\na=2"), Err(CliError::Usage(_))));
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = parse_config("lambda = 2\nk = 3").unwrap();
        let mut r = Resolver::new(file, "simulate", &MODEL_KEYS).unwrap();
        assert_eq!(r.get("lambda", Some(5.0), 1.0).unwrap(), 5.0);
        assert_eq!(r.get("k", None, 1u32).unwrap(), 3);
        assert_eq!(r.get("window", None, 10.0).unwrap(), 10.0);
        assert!(matches!(r.require::<f64>("margin", None), Err(CliError::Usage(_))));
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        let file = parse_config("lambda = 2\nbogus = 1").unwrap();
        let e = Resolver::new(file, "simulate", &MODEL_KEYS).err().unwrap();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn angle_sets() {
        assert_eq!(parse_sets("0+1:0.5;2:0.5").unwrap(), vec![(vec![0, 1], 0.5), (vec![2], 0.5)]);
        assert!(parse_sets("0+x:1").is_err());
    }

    #[test]
    fn hex_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
