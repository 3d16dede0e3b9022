use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use toruspack::config::{self, RunConfig};
use toruspack::exponents::{self, ExponentReport, SpectrumSample};
use toruspack::harness::{CountTable, Experiment, OrbitTable};
use toruspack::measures;
use toruspack::orbit::{self, EnumConfig, EnumMode};
use toruspack::persist;
use toruspack::render::{self, FitPlot, PackingOptions};
use toruspack::schottky::DEFAULT_PING_PONG_MARGIN;
use toruspack::{LinearForm, Word};

#[derive(Parser)]
#[command(name = "toruspack", version, about = "Torus orbit counting for self-joinings of Schottky groups")]
struct Cli {
    /// Run configuration (TOML).
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads, 0 for all cores. Overrides TORUS_THREADS.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output directory. Overrides TORUS_OUTPUT_DIR.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Maximal word length, overriding `run.depth`.
    #[arg(long, global = true)]
    depth: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ping-pong and seed admissibility certificates.
    Check,
    /// Enumerate orbit tori to JSON lines.
    Enumerate {
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        #[arg(long)]
        threshold: Option<f64>,
        #[arg(long)]
        slack: Option<f64>,
    },
    /// N_R per region on an R grid.
    Count {
        /// Thresholds; default is the configured grid or the complete window.
        #[arg(long = "r", value_delimiter = ',')]
        r: Vec<f64>,
    },
    /// Critical exponent of psi by shell fit and series bracketing.
    Exponent,
    /// Patterson atoms, omega masses and a conformality check.
    Measure {
        /// Word-length shell of the atoms, overriding `run.atom_depth`.
        #[arg(long)]
        atom_depth: Option<usize>,
    },
    /// Counting and volume experiments with pass/fail flags.
    Verify,
    /// SVG packings and limit-set samples per factor.
    Render {
        #[arg(long)]
        factor: Option<usize>,
        #[arg(long, default_value_t = 1e-3)]
        radius_floor: f64,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Exhaustive,
    Pruned,
}

enum Failure {
    Config(anyhow::Error),
    Numeric(anyhow::Error),
    Acceptance(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 1,
            Self::Numeric(_) => 2,
            Self::Acceptance(_) => 3,
        }
    }
}

trait Numeric<T> {
    fn numeric(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Numeric<T> for Result<T, E> {
    fn numeric(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Numeric(e.into()))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Config(e) => eprintln!("config error: {e:#}"),
                Failure::Numeric(e) => eprintln!("error: {e:#}"),
                Failure::Acceptance(s) => eprintln!("acceptance failure: {s}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config(anyhow::anyhow!("--config is required")))?;
    let mut cfg = config::load_config(path).map_err(|e| Failure::Config(e.into()))?;
    cfg.apply_overrides(cli.threads, cli.output_dir.clone(), |k| std::env::var(k).ok())
        .map_err(|e| Failure::Config(e.into()))?;
    if let Some(d) = cli.depth {
        cfg.run.depth = d;
    }
    Ok(cfg)
}

fn output(cfg: &RunConfig, name: &str) -> Result<BufWriter<File>, Failure> {
    let dir = &cfg.run.output_dir;
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .numeric()?;
    let path = dir.join(name);
    File::create(&path)
        .with_context(|| format!("creating {}", path.display()))
        .map(BufWriter::new)
        .numeric()
}

fn write_text(cfg: &RunConfig, name: &str, text: &str) -> Result<PathBuf, Failure> {
    let mut w = output(cfg, name)?;
    w.write_all(text.as_bytes()).and_then(|_| w.flush()).numeric()?;
    Ok(cfg.run.output_dir.join(name))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = load(&cli)?;
    match cli.command {
        Command::Check => check(&cfg),
        Command::Enumerate { mode, threshold, slack } => {
            if let Some(m) = mode {
                cfg.run.mode = match m {
                    ModeArg::Exhaustive => EnumMode::Exhaustive,
                    ModeArg::Pruned => EnumMode::Pruned,
                };
            }
            if threshold.is_some() {
                cfg.run.threshold = threshold;
            }
            if let Some(s) = slack {
                cfg.run.slack = s;
            }
            enumerate(&cfg)
        }
        Command::Count { r } => count(&cfg, r),
        Command::Exponent => exponent(&cfg),
        Command::Measure { atom_depth } => {
            if let Some(d) = atom_depth {
                cfg.run.atom_depth = d;
            }
            measure(&cfg)
        }
        Command::Verify => verify(&cfg),
        Command::Render { factor, radius_floor } => render_cmd(&cfg, factor, radius_floor),
    }
}

fn check(cfg: &RunConfig) -> Result<(), Failure> {
    let spec = &cfg.fixture.spec;
    println!("fixture {}: d = {}, rank {}", cfg.fixture.id, spec.dim(), spec.rank());
    let certs = spec.verify_ping_pong(DEFAULT_PING_PONG_MARGIN).numeric()?;
    for (i, c) in certs.iter().enumerate() {
        println!("rep {}: ping-pong ok, {c:?}", i + 1);
    }
    println!("seed: {:?}", cfg.fixture.seed.certificate());
    println!("basepoint outside domes: {}", spec.basepoint_outside_domes());
    Ok(())
}

fn enum_config(cfg: &RunConfig) -> Result<EnumConfig, Failure> {
    let psi = cfg.psi();
    let base = match cfg.run.mode {
        EnumMode::Exhaustive => EnumConfig::exhaustive(cfg.run.depth, psi),
        EnumMode::Pruned => {
            let r = cfg
                .run
                .threshold
                .ok_or_else(|| Failure::Config(anyhow::anyhow!("run.threshold: pruned mode needs a threshold")))?;
            EnumConfig::pruned(cfg.run.depth, psi, r, cfg.run.slack)
        }
    };
    Ok(base.with_threads(cfg.run.threads))
}

fn enumerate(cfg: &RunConfig) -> Result<(), Failure> {
    let ecfg = enum_config(cfg)?;
    let e = orbit::enumerate_tori(&cfg.fixture.spec, &cfg.fixture.seed, &ecfg).numeric()?;
    persist::write_records(output(cfg, "records.jsonl")?, &e.records).numeric()?;
    persist::write_summary_csv(output(cfg, "summary.csv")?, &e.stats).numeric()?;
    persist::write_json(output(cfg, "stats.json")?, &e.stats).numeric()?;
    println!(
        "{} tori to depth {}, complete below psi = {}, {} line tori excluded, {} pruned subtrees, {} dedup collisions ({} unresolved key matches)",
        e.records.len(),
        cfg.run.depth,
        e.stats.complete_below,
        e.stats.excluded_lines,
        e.stats.pruned_subtrees,
        e.stats.dedup_collisions,
        e.stats.dedup_unresolved
    );
    println!("wrote {}", cfg.run.output_dir.display());
    Ok(())
}

fn count(cfg: &RunConfig, r: Vec<f64>) -> Result<(), Failure> {
    let psi = cfg.psi();
    let table = OrbitTable::build(
        &cfg.fixture.spec,
        &cfg.fixture.seed,
        &cfg.regions,
        cfg.run.depth,
        cfg.run.threads,
    )
    .numeric()?;
    let complete = table.complete_below(&psi);
    let thresholds = if !r.is_empty() {
        r
    } else if let Some(g) = &cfg.run.r_grid {
        g.clone()
    } else {
        let values = table.sorted_values(&psi, 0);
        let lo = values.get(exponents::MIN_WINDOW_COUNT).copied().unwrap_or(0.0);
        exponents::grid(lo, complete.min(values.last().copied().unwrap_or(0.0)))
    };
    let mut counts = vec![Vec::new(); cfg.regions.len()];
    for &t in &thresholds {
        for (j, c) in counts.iter_mut().enumerate() {
            c.push(table.count(&psi, t, j).numeric()?);
        }
    }
    let table = CountTable {
        variable: "r".into(),
        thresholds,
        region_names: cfg.regions.iter().map(|r| r.name.clone()).collect(),
        counts,
    };
    for (j, t) in table.thresholds.iter().enumerate() {
        let row: Vec<String> = table.counts.iter().map(|c| c[j].to_string()).collect();
        println!("R = {t}: {}", row.join(" "));
    }
    println!("regions: {}", table.region_names.join(" "));
    println!("complete below psi = {complete}");
    write_text(cfg, "counts.csv", &table.to_csv())?;
    Ok(())
}

fn exponent(cfg: &RunConfig) -> Result<(), Failure> {
    let psi = cfg.psi();
    let sample = SpectrumSample::collect(&cfg.fixture.spec, cfg.run.depth, cfg.run.threads);
    let shell = exponents::estimate_exponent(&sample, &psi).numeric()?;
    let bracket = exponents::series_bracket(&sample, &psi).numeric()?;
    let l1 = exponents::check_l1_bound(&shell, cfg.fixture.spec.dim());
    println!(
        "shell fit: delta = {:.6} +- {:.6}, R^2 {:.5}, window [{:.3}, {:.3}]",
        shell.delta, shell.stderr, shell.r_squared, shell.window.0, shell.window.1
    );
    println!("series bracket: delta = {:.6} +- {:.6}", bracket.delta, bracket.stderr);
    if psi.coeffs().iter().all(|&c| c == 1.0) {
        println!("delta_L1 bound 2/sqrt(d) = {:.4}: {}", l1.bound, if l1.passes { "holds" } else { "violated" });
    }
    let report = serde_json::json!({
        "fixture": cfg.fixture.id,
        "config": cfg.echo(),
        "shell_fit": ExponentReport::new(&psi, &shell),
        "series_bracket": ExponentReport::new(&psi, &bracket),
    });
    persist::write_json(output(cfg, "exponent.json")?, &report).numeric()?;
    let pts: Vec<(f64, f64)> = shell.table.iter().map(|&(r, n)| (r, (n as f64).ln())).collect();
    let mut csv = String::from("r,ln_n\n");
    for (x, y) in &pts {
        csv += &format!("{x},{y}\n");
    }
    write_text(cfg, "exponent-fit.csv", &csv)?;
    let svg = render::render_fit_plot(&FitPlot {
        points: &pts,
        line: Some((shell.delta, render::intercept(&pts, shell.delta))),
        x_label: "R",
        y_label: "log #{psi(mu) < R}",
    });
    write_text(cfg, "exponent-fit.svg", &svg)?;
    Ok(())
}

fn measure(cfg: &RunConfig) -> Result<(), Failure> {
    let psi = cfg.psi();
    let spec = &cfg.fixture.spec;
    let sample = SpectrumSample::collect(spec, cfg.run.depth, cfg.run.threads);
    let bracket = exponents::series_bracket(&sample, &psi).numeric()?;
    let psi0 = exponents::critical_form(&psi, &bracket).numeric()?;
    let atoms = measures::patterson_atoms(spec, &psi0, cfg.run.atom_depth, cfg.run.threads).numeric()?;
    persist::write_atoms(output(cfg, "atoms.jsonl")?, &atoms).numeric()?;
    println!(
        "{} atoms at word length {}, psi0 = {:?} (series bracket), total weight {}",
        atoms.len(),
        atoms.depth,
        psi0.coeffs(),
        atoms.total_weight()
    );
    println!("confinement to depth-1 disks: {}", atoms.confinement(spec));
    let mut omegas = Vec::new();
    for r in &cfg.regions {
        let w = measures::omega_measure(&atoms, &r.region);
        println!("omega({}) = {w}", r.name);
        omegas.push(serde_json::json!({ "region": r.name, "omega": w, "nu": measures::nu_measure(&atoms, &r.region) }));
    }
    let boxes: Vec<_> = cfg.regions.iter().map(|r| r.region.clone()).collect();
    let mut conformality = Vec::new();
    for g in 1..=spec.rank() as i8 {
        let word = Word::from_signed(&[g]).expect("single letter");
        let rep = measures::conformality_check(&atoms, &spec.evaluate_word(&word), &boxes);
        println!("conformality, gamma = {}: max deviation {:.3e}", rep.word, rep.max_deviation);
        conformality.push(rep);
    }
    let report = serde_json::json!({
        "fixture": cfg.fixture.id,
        "config": cfg.echo(),
        "psi0": psi0.coeffs(),
        "atoms": atoms.len(),
        "log_normalization": atoms.log_normalization,
        "omega": omegas,
        "conformality": conformality,
    });
    persist::write_json(output(cfg, "measure.json")?, &report).numeric()?;
    Ok(())
}

fn verify(cfg: &RunConfig) -> Result<(), Failure> {
    let psi = cfg.psi();
    let mut exp = Experiment::new(
        cfg.fixture.id.clone(),
        &cfg.fixture.spec,
        &cfg.fixture.seed,
        cfg.regions.clone(),
        cfg.run.depth,
    )
    .with_threads(cfg.run.threads)
    .with_atom_depth(cfg.run.atom_depth)
    .with_tolerance(cfg.run.tolerance);
    let mut counting = exp.counting(&psi).numeric()?;
    let mut volume = exp.volume().numeric()?;
    counting.config = Some(cfg.echo());
    volume.config = Some(cfg.echo());
    write_text(cfg, "report-counting.json", &(counting.to_json() + "\n"))?;
    write_text(cfg, "report-volume.json", &(volume.to_json() + "\n"))?;
    let text = counting.summary() + "\n" + &volume.summary();
    write_text(cfg, "report.txt", &text)?;
    if let Some(t) = &counting.counts {
        write_text(cfg, "counts.csv", &t.to_csv())?;
    }
    persist::write_json(output(cfg, "runtime.json")?, &exp.runtime).numeric()?;
    print!("{text}");
    let failed: Vec<String> = counting
        .flags
        .iter()
        .chain(&volume.flags)
        .filter(|f| !f.passed)
        .map(|f| f.criterion.clone())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Acceptance(failed.join(", ")))
    }
}

fn render_cmd(cfg: &RunConfig, factor: Option<usize>, radius_floor: f64) -> Result<(), Failure> {
    let d = cfg.fixture.spec.dim();
    if let Some(f) = factor {
        if f >= d {
            return Err(Failure::Config(anyhow::anyhow!("--factor {f}: the fixture has {d} factors (0-based)")));
        }
    }
    let ecfg = EnumConfig::exhaustive(cfg.run.depth, LinearForm::sum_form(d)).with_threads(cfg.run.threads);
    let e = orbit::enumerate_tori(&cfg.fixture.spec, &cfg.fixture.seed, &ecfg).numeric()?;
    let factors: Vec<usize> = factor.map_or_else(|| (0..d).collect(), |f| vec![f]);
    for i in factors {
        let rep = cfg.fixture.spec.rep(i);
        let extent = rep.disks().map(|(_, c, r)| c.norm() + r).fold(1.0, f64::max) * 1.1;
        let opts = PackingOptions {
            factor: i,
            view: [-extent, extent, -extent, extent],
            radius_floor,
            ..PackingOptions::default()
        };
        let path = write_text(cfg, &format!("packing-{}.svg", i + 1), &render::render_packing(&e.records, &opts))?;
        println!("{}: {} circles", path.display(), render::drawn_circles(&e.records, &opts));
        let pts = rep.limit_set_sample(cfg.run.depth.min(8));
        let path = write_text(cfg, &format!("limit-set-{}.svg", i + 1), &render::render_points(&pts, opts.size, opts.view))?;
        println!("{}: {} points", path.display(), pts.len());
    }
    Ok(())
}
