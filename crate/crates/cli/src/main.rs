//! `stokes`: command-line driver for the Stokes graph / Voros pipeline.
//!
//! Exit codes: 0 ok, 1 schema or usage, 2 non-generic input, 3 saddle or
//! inconclusive tracing, 4 numeric failure, 5 constraint failure, 6 nontrivial
//! branch monodromy, 7 transversality failure, 8 degenerate monodromy.

mod config;
mod exit;

use clap::{Args, Parser, Subcommand};
use config::{RunConfig, TraceOverrides};
use exit::Failure;
use num_complex::Complex64 as C;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use stokes_core::abelian::{random_system, SystemJson};
use stokes_core::foliation::{is_saddle_free, saddle_integral, Classification};
use stokes_core::quad_diff::QuadDiffJson;
use stokes_core::stokes::io::{parse, to_pretty, SpectralGraphJson, StokesGraphJson, SPECTRAL_SCHEMA, STOKES_SCHEMA};
use stokes_core::stokes::{assemble, double_cover, svg, Geometry, SpectralGraph, StokesGraph};
use stokes_core::voros::{compare_traces, expected_trace, nonabelianise_with, random_words, RepJson, REP_SCHEMA};
use stokes_core::{abelian, abelianise, voros, Error, OddAbelianSystem, QuadraticDifferential, Sl2Representation, TraceConfig};

/// Used when neither --seed nor the config gives one.
const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "stokes", version, about = "Stokes graphs, odd abelian systems and Voros nonabelianisation")]
struct Cli {
    /// Override the command's pass/fail tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Also write an SVG drawing of the Stokes graph.
    #[arg(long, global = true)]
    plot: bool,
    /// JSON RunConfig; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Source {
    /// Residue at 0, 1, ∞ as "re,im"; give exactly three.
    #[arg(long = "residues", allow_hyphen_values = true, value_parser = parse_complex)]
    residues: Vec<C>,
    /// Quadratic differential file.
    #[arg(long, conflicts_with = "residues")]
    phi: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Trace the Stokes graph and write stokes.json and spectral.json.
    Stokes {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a random odd abelian system on a spectral graph.
    RandomSystem {
        #[arg(long)]
        graph: PathBuf,
        /// Levelt exponents "re,im", one per puncture; defaults to those stored in the graph.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        lambda: Vec<C>,
        #[arg(long)]
        out: PathBuf,
    },
    /// SL(2) representation of an odd abelian system.
    Nonab {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Odd abelian system of an SL(2) representation.
    Ab {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Both round trips on a traced or stored graph.
    Roundtrip {
        #[command(flatten)]
        source: Source,
        /// Start from this system instead of sampling one.
        #[arg(long, conflicts_with_all = ["residues", "phi"])]
        system: Option<PathBuf>,
    },
    /// Check a JSON artifact against its schema and invariants.
    Validate { file: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Stokes { .. } => "stokes",
            Command::RandomSystem { .. } => "random-system",
            Command::Nonab { .. } => "nonab",
            Command::Ab { .. } => "ab",
            Command::Roundtrip { .. } => "roundtrip",
            Command::Validate { .. } => "validate",
        }
    }
}

fn parse_complex(s: &str) -> Result<C, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("expected re,im but found {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("{re:?}: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("{im:?}: {e}"))?;
    Ok(C::new(re, im))
}

/// Settings after merging flags over the config file.
struct Settings {
    tol: Option<f64>,
    seed: u64,
    plot: bool,
    trace: Option<TraceOverrides>,
    config: RunConfig,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(c) = &config.command {
        if c != cli.command.name() {
            return Err(Error::schema("command", format!("config is for {c:?}, invoked {:?}", cli.command.name())).into());
        }
    }
    let s = Settings {
        tol: cli.tol.or(config.tol),
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        plot: cli.plot || config.plot.unwrap_or(false),
        trace: config.trace.clone(),
        config,
    };
    match cli.command {
        Command::Stokes { source, out } => cmd_stokes(&s, source, out),
        Command::RandomSystem { graph, lambda, out } => cmd_random_system(&s, &graph, &lambda, &out),
        Command::Nonab { system, out } => cmd_nonab(&s, &system, &out),
        Command::Ab { rep, graph, out } => cmd_ab(&s, &rep, &graph, &out),
        Command::Roundtrip { source, system } => cmd_roundtrip(&s, source, system),
        Command::Validate { file } => cmd_validate(&s, &file),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Io(dir.to_path_buf(), e))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn differential(s: &Settings, source: Source) -> Result<QuadraticDifferential, Failure> {
    let residues = if source.residues.is_empty() {
        s.config.residues.iter().flatten().map(|r| C::new(r[0], r[1])).collect()
    } else {
        source.residues
    };
    let phi_path = source.phi.or_else(|| s.config.phi.clone());
    match (residues.len(), phi_path) {
        (0, Some(p)) => {
            let j: QuadDiffJson = parse(&read(&p)?)?;
            Ok(QuadraticDifferential::from_json(&j)?)
        }
        (3, None) => Ok(QuadraticDifferential::three_point(residues[0], residues[1], residues[2])?),
        (0, None) => Err(Failure::Usage("give --residues three times or --phi".into())),
        (n, None) => Err(Failure::Usage(format!("expected three residues, found {n}"))),
        (_, Some(_)) => Err(Failure::Usage("--residues and --phi are mutually exclusive".into())),
    }
}

struct Traced {
    graph: StokesGraph,
    cover: SpectralGraph,
    geometry: Geometry,
    lambda: Vec<C>,
}

fn trace(s: &Settings, phi: &QuadraticDifferential) -> Result<Traced, Failure> {
    let zeros = phi.zeros(1e-12)?;
    if zeros.len() == 2 {
        // Total genericity: Im of the saddle integral must stay away from 0.
        let w = saddle_integral(phi, &zeros)?;
        if w.im.abs() <= 1e-6 * w.norm().max(1.0) {
            return Err(Failure::Saddle(format!("residues on the saddle locus (Im of the saddle integral {:e})", w.im)));
        }
    }
    let mut cfg = TraceConfig::for_differential(phi, &zeros);
    if let Some(o) = &s.trace {
        o.apply(&mut cfg);
    }
    cfg.validate()?;
    let leaves = match is_saddle_free(phi, &zeros, &cfg)? {
        Classification::SaddleFree(l) => l,
        Classification::HasSaddle { from, to, .. } => {
            return Err(Failure::Saddle(format!("saddle connection between zeros {from} and {to}")))
        }
        Classification::Inconclusive(_) => return Err(Failure::Saddle("some critical leaf did not resolve".into())),
    };
    let graph = assemble(phi, &leaves)?;
    let cover = double_cover(&graph)?;
    let geometry = Geometry::from_leaves(phi, &zeros, &leaves);
    let lambda = (0..phi.marked.len()).map(|p| phi.lambda(p)).collect();
    Ok(Traced { graph, cover, geometry, lambda })
}

fn pairs(v: &[C]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn cmd_stokes(s: &Settings, source: Source, out: Option<PathBuf>) -> Result<(), Failure> {
    let phi = differential(s, source)?;
    let t = trace(s, &phi)?;
    let dir = out.or_else(|| s.config.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    write(&dir.join("stokes.json"), &to_pretty(&StokesGraphJson::from_graph(&t.graph, None)))?;
    write(&dir.join("spectral.json"), &to_pretty(&SpectralGraphJson::from_cover(&t.cover, None, Some(pairs(&t.lambda)))))?;
    if s.plot {
        write(&dir.join("stokes.svg"), &svg::render(&t.graph, Some(&t.geometry)))?;
    }
    println!(
        "branch vertices {}  rays {}  regions {}  spectral regions {}  spectral rays {}",
        t.graph.branches.len(),
        t.graph.rays.len(),
        t.graph.regions.len(),
        2 * t.graph.regions.len(),
        2 * t.graph.rays.len()
    );
    Ok(())
}

struct LoadedGraph {
    cover: SpectralGraph,
    lambda: Option<Vec<C>>,
}

fn load_spectral(path: &Path) -> Result<LoadedGraph, Failure> {
    let j: SpectralGraphJson = parse(&read(path)?)?;
    let cover = j.to_cover()?;
    let lambda = j.lambda.map(|v| v.iter().map(|l| C::new(l[0], l[1])).collect());
    Ok(LoadedGraph { cover, lambda })
}

/// Path of `target` as written into a file stored at `from`.
fn relative_ref(from: &Path, target: &Path) -> String {
    let dir_of = |p: &Path| {
        let d = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        d.canonicalize().ok()
    };
    match (dir_of(from), dir_of(target), target.file_name()) {
        (Some(a), Some(b), Some(name)) if a == b => name.to_string_lossy().into_owned(),
        _ => target.canonicalize().unwrap_or_else(|_| target.to_path_buf()).to_string_lossy().into_owned(),
    }
}

fn load_system(path: &Path) -> Result<(OddAbelianSystem, PathBuf), Failure> {
    let j: SystemJson = parse(&read(path)?)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let graph_path = base.join(&j.graph_ref);
    let g = load_spectral(&graph_path)?;
    Ok((OddAbelianSystem::from_json(&j, &g.cover)?, graph_path))
}

fn print_holonomy(sys: &OddAbelianSystem) -> Result<(), Failure> {
    for (id, z) in sys.holonomy_vector()?.entries {
        println!("  {id:<24} {:+.12e} {:+.12e}i", z.re, z.im);
    }
    Ok(())
}

fn cmd_random_system(s: &Settings, graph: &Path, lambda: &[C], out: &Path) -> Result<(), Failure> {
    let g = load_spectral(graph)?;
    let lambda = if lambda.is_empty() {
        g.lambda.ok_or_else(|| Failure::Usage("graph stores no exponents; pass --lambda".into()))?
    } else {
        lambda.to_vec()
    };
    let sys = random_system(&g.cover, &lambda, s.seed)?;
    let report = sys.validate();
    println!("validation residuals:\n{}", serde_json::to_string_pretty(&report).expect("serialisable"));
    let tol = s.tol.unwrap_or(1e-10);
    if !report.passes(tol) {
        return Err(Error::InconsistentConstraints(format!("residual {:e} above {tol:e}", report.worst())).into());
    }
    println!("holonomy vector:");
    print_holonomy(&sys)?;
    write(out, &to_pretty(&sys.to_json(&relative_ref(out, graph))))
}

fn print_rep_table(rep: &Sl2Representation) {
    println!("{:>8} {:>24} {:>24}", "puncture", "|det − 1|", "|tr − 2cos 2πλ|");
    for &p in &rep.order {
        let m = rep.matrices[p];
        println!(
            "{p:>8} {:>24.3e} {:>24.3e}",
            (m.det() - C::new(1.0, 0.0)).norm(),
            (m.trace() - expected_trace(rep.lambda[p])).norm()
        );
    }
    println!("relation residual {:.3e}", rep.relation_residual());
}

fn cmd_nonab(s: &Settings, system: &Path, out: &Path) -> Result<(), Failure> {
    let (sys, _) = load_system(system)?;
    let rep = nonabelianise_with(&sys, s.tol.unwrap_or_else(voros::branch_tolerance))?;
    print_rep_table(&rep);
    write(out, &to_pretty(&rep.to_json()))
}

fn cmd_ab(s: &Settings, rep: &Path, graph: &Path, out: &Path) -> Result<(), Failure> {
    let j: RepJson = parse(&read(rep)?)?;
    let rep = Sl2Representation::from_json(&j)?;
    let g = load_spectral(graph)?;
    let fr = abelianise::frame(&rep)?;
    let fwd = abelianise::base_connection(&rep, &g.cover.base)?;
    let lines = abelianise::continue_lines(&fr, &g.cover.base, &fwd)?;
    let tr = abelianise::check_transverse(&lines, abelianise::transversality_tolerance());
    println!("transversality:\n{}", serde_json::to_string(&tr).expect("serialisable"));
    let ex = abelianise::extract(&fr, &lines, &g.cover, &fwd)?;
    let report = ex.system.validate();
    println!("constraint residuals:\n{}", serde_json::to_string_pretty(&report).expect("serialisable"));
    let tol = s.tol.unwrap_or(1e-8);
    if !report.passes(tol) {
        return Err(Error::InconsistentConstraints(format!("extracted system residual {:e} above {tol:e}", report.worst())).into());
    }
    println!("delta consistency {:.3e}", abelianise::delta_consistency(&ex));
    println!("holonomy vector:");
    print_holonomy(&ex.system)?;
    write(out, &to_pretty(&ex.system.to_json(&relative_ref(out, graph))))
}

fn cmd_roundtrip(s: &Settings, source: Source, system: Option<PathBuf>) -> Result<(), Failure> {
    let sys = match system.or_else(|| s.config.system.clone()) {
        Some(p) => load_system(&p)?.0,
        None => {
            let phi = differential(s, source)?;
            let t = trace(s, &phi)?;
            random_system(&t.cover, &t.lambda, s.seed)?
        }
    };
    let ab = abelianise::roundtrip_ab(&sys)?;
    let rep = voros::nonabelianise(&sys)?;
    let nonab = abelianise::roundtrip_nonab(&rep, &sys.sg, s.seed)?;
    // Conjugation by a fixed unimodular matrix must not change the trace data.
    let (a, b, c) = (C::new(1.0, 0.5), C::new(-0.3, 0.2), C::new(0.4, -0.1));
    let g = stokes_core::Mat2::new(a, b, c, (1.0 + b * c) / a);
    let conj = rep.conjugate(&g);
    let conj_back = voros::nonabelianise(&abelianise::abelianise(&conj, &sys.sg)?.system)?;
    let words = random_words(rep.order.len(), 20, 6, s.seed);
    let conj_report = compare_traces(&rep, &conj_back, &words);
    let worst = ab.max().max(nonab.max()).max(conj_report.max());
    let report = json!({
        "seed": s.seed,
        "abelian_to_sl2_to_abelian": ab,
        "sl2_to_abelian_to_sl2": nonab,
        "conjugated_input": conj_report,
        "max_deviation": worst,
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("serialisable"));
    let tol = s.tol.unwrap_or(1e-8);
    if !(worst <= tol) {
        return Err(Failure::Tolerance { worst, tol });
    }
    Ok(())
}

fn cmd_validate(s: &Settings, file: &Path) -> Result<(), Failure> {
    let text = read(file)?;
    let v: serde_json::Value = parse(&text)?;
    let schema = v.get("schema").and_then(|x| x.as_str()).unwrap_or("");
    match schema {
        STOKES_SCHEMA => {
            let g = parse::<StokesGraphJson>(&text)?.to_graph()?;
            println!("{STOKES_SCHEMA}: {} branch vertices, {} rays, {} regions", g.branches.len(), g.rays.len(), g.regions.len());
        }
        SPECTRAL_SCHEMA => {
            let g = load_spectral(file)?;
            println!("{SPECTRAL_SCHEMA}: {} spectral regions, {} spectral rays", 2 * g.cover.base.regions.len(), 2 * g.cover.base.rays.len());
        }
        abelian::SYSTEM_SCHEMA => {
            let (sys, _) = load_system(file)?;
            let report = sys.validate();
            println!("{}", serde_json::to_string_pretty(&report).expect("serialisable"));
            let tol = s.tol.unwrap_or(1e-10);
            if !report.passes(tol) {
                return Err(Error::InconsistentConstraints(format!("residual {:e} above {tol:e}", report.worst())).into());
            }
        }
        REP_SCHEMA => {
            let rep = Sl2Representation::from_json(&parse(&text)?)?;
            print_rep_table(&rep);
            let tol = s.tol.unwrap_or(1e-9);
            let worst = voros::trace_residual(&rep).max(rep.relation_residual());
            if !(worst <= tol) {
                return Err(Error::InconsistentConstraints(format!("representation residual {worst:e} above {tol:e}")).into());
            }
        }
        other => return Err(Error::schema("schema", format!("unknown schema {other:?}")).into()),
    }
    println!("ok");
    Ok(())
}
