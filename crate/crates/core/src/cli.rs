//! Command-line front end: `segment`, `project`, `verify`, `demo`, `dice`.
//!
//! Exit codes: 0 success (or verdict true), 1 verdict false, 2 usage, parse
//! or input errors, 3 numerical failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use crate::convexity::{
    isoperimetric_ratio, project_convex_traced, verify_convex, ConvexityReport, CurvatureFloor,
    RadiusSchedule,
};
use crate::dual::classic_sigmoid;
use crate::error::{Error, Result};
use crate::field::{Field, SoftMask};
use crate::pipeline::{
    dice, difference_features, encode_feature_file, encode_overlay, encode_pgm,
    generate_phantom_with_noise, read_feature_file, read_image_pgm, read_label_pgm, read_pgm,
    region_variance_feature, ClassMeans, Phantom, PhantomKind,
};
use crate::regularizer::{edge_weight, EdgeWeight};
use crate::solver::{cs_std_solve, cs_std_solve_multiphase, EnergyTrace, SolverConfig};
use crate::sublevel::{sublevel_to_label, SublevelStack};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Schedule and outer iteration count of the curvature sweep.
const SWEEP_RADII: [usize; 5] = [25, 25, 25, 25, 1];
const SWEEP_OUTER: usize = 20;
const SWEEP_DELTAS: [f64; 4] = [0.0, 0.05, 0.15, 0.3];
const ORACLE_PAIRS: usize = 10_000;

#[derive(Debug, Parser)]
#[command(name = "csstd", version, about = "Convex-shape sigmoid segmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Segment an image (with class means) or a feature stack.
    Segment(SegmentArgs),
    /// Convexify a mask with the active-set projection.
    Project(ProjectArgs),
    /// Check every connected component of a mask for convexity.
    Verify(VerifyArgs),
    /// Run a synthetic experiment end to end.
    Demo(DemoArgs),
    /// Dice overlap of one sublevel class between two label maps.
    Dice(DiceArgs),
}

/// Solver flags shared by `segment` and `demo`; unset flags use the
/// command's defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// Regularization weight, one value or one per channel.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// Entropic regularization ε; smaller values give sharper masks
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Gaussian σ of the TD kernel, in pixels.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Five ball radii, cycled by the projection.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<usize>>,
    /// Curvature floor δ in [0, 1).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Outer iterations t₁.
    #[arg(long)]
    pub outer: Option<usize>,
    /// Inner projection iterations t₂.
    #[arg(long)]
    pub inner: Option<usize>,
    /// Early-exit threshold on the sup-norm change.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Skip the convex projection
    #[arg(long)]
    pub no_convex: bool,
    /// Drop the TD regularizer
    #[arg(long)]
    pub no_td: bool,
}

impl SolverArgs {
    fn config(&self, channels: usize, base: SolverConfig) -> Result<SolverConfig> {
        let mut cfg = base;
        if let Some(l) = &self.lambda {
            cfg.lambdas = match l.len() {
                1 => vec![l[0]; channels],
                n if n == channels => l.clone(),
                n => {
                    return Err(Error::InvalidParameter(format!(
                        "{n} lambda values for {channels} channels"
                    )))
                }
            };
        } else {
            cfg = cfg.with_channels(channels);
        }
        if let Some(v) = self.epsilon {
            cfg.epsilon = v;
        }
        if let Some(v) = self.sigma {
            cfg.sigma = v;
        }
        if let Some(r) = &self.radii {
            cfg.schedule = RadiusSchedule::from_slice(r)?;
        }
        if let Some(d) = self.delta {
            cfg.delta = CurvatureFloor::new(d)?;
        }
        if let Some(v) = self.outer {
            cfg.outer_iters = v;
        }
        if let Some(v) = self.inner {
            cfg.inner_iters = v;
        }
        if let Some(v) = self.tol {
            cfg.outer_tol = v;
        }
        cfg.enable_convex &= !self.no_convex;
        cfg.enable_td &= !self.no_td;
        cfg.validate(channels)?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["input", "features"])))]
pub struct SegmentArgs {
    /// 8-bit PGM image; needs --means.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// FF1 feature stack, one channel per sublevel (edge weight is 1).
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Number of classes L.
    #[arg(long)]
    pub classes: Option<usize>,
    /// Class means ordered by label, on the [0, 1] image scale.
    #[arg(long, value_delimiter = ',')]
    pub means: Option<Vec<f64>>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Output path prefix; files are `<prefix>.masks.ff1`, `.labels.pgm`,
    /// `.overlay.ppm`, `.trace.csv`, `.manifest.txt`.
    #[arg(long)]
    pub out_prefix: PathBuf,
    /// Recorded in the manifest; the solver itself is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Mask as PGM (nonzero is foreground) or single-channel FF1.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "15,10,5,3,1")]
    pub radii: Vec<usize>,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 50)]
    pub inner: usize,
    /// Writes `<prefix>.mask.pgm` (or `.mask.ff1`) and `<prefix>.manifest.txt`.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Mask as PGM (nonzero is foreground) or FF1 (thresholded at 0.5).
    #[arg(long)]
    pub input: PathBuf,
    /// 1-based FF1 channel.
    #[arg(long, default_value_t = 1)]
    pub channel: usize,
    #[arg(long, default_value_t = ORACLE_PAIRS)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoKind {
    /// Six shapes; plain sigmoid, TD only, and TD with convex projection.
    Fig4,
    /// Star under an increasing curvature floor δ.
    Fig5,
    /// Cup inside disc, three-class nested segmentation.
    Nested,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, value_enum)]
    pub kind: DemoKind,
    /// Phantom size in pixels (default 256, 96 for fig5).
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard deviation of additive Gaussian noise on the phantom.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct DiceArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: PathBuf,
    /// Evaluates the sublevel mask `{label <= class}`.
    #[arg(long, default_value_t = 1)]
    pub class: u8,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Segment(a) => cmd_segment(&a),
        Command::Project(a) => cmd_project(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Demo(a) => cmd_demo(&a),
        Command::Dice(a) => cmd_dice(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonFinite(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

/// Flat `key=value` run record.
#[derive(Debug, Default)]
struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    fn new(command: &str) -> Self {
        let mut m = Self::default();
        m.set("command", command);
        m.set("version", env!("CARGO_PKG_VERSION"));
        m
    }

    fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    fn config(&mut self, cfg: &SolverConfig) {
        self.set("lambda", join(&cfg.lambdas));
        self.set("epsilon", cfg.epsilon);
        self.set("sigma", cfg.sigma);
        self.set("radii", join(&cfg.schedule.radii()));
        self.set("delta", cfg.delta.get());
        self.set("outer_iters", cfg.outer_iters);
        self.set("inner_iters", cfg.inner_iters);
        self.set("outer_tol", cfg.outer_tol);
        self.set("enable_convex", cfg.enable_convex);
        self.set("enable_td", cfg.enable_td);
    }

    fn input(&mut self, key: &str, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path)?;
        self.set(key, path.display());
        self.set(&format!("{key}_sha256"), sha256_hex(&bytes));
        Ok(bytes)
    }

    fn write(mut self, path: &Path, started: Instant) -> Result<()> {
        self.set("elapsed_ms", started.elapsed().as_millis());
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        fs::write(path, out)?;
        Ok(())
    }
}

fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn ensure_parent(prefix: &Path) -> Result<()> {
    if let Some(parent) = prefix.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    Ok(())
}

/// Writes `bytes` and records the path under `key`.
fn emit(manifest: &mut Manifest, key: &str, path: PathBuf, bytes: &[u8]) -> Result<()> {
    fs::write(&path, bytes)?;
    manifest.set(key, path.display());
    Ok(())
}

fn mask_bytes(mask: &Field, foreground: u8) -> Vec<u8> {
    let pixels: Vec<u8> = mask
        .values()
        .iter()
        .map(|&v| if v >= 0.5 { foreground } else { 0 })
        .collect();
    encode_pgm(mask.width(), mask.height(), &pixels)
}

fn fields_of(stack: &SublevelStack) -> Vec<Field> {
    stack
        .channels()
        .iter()
        .map(|c| c.as_field().clone())
        .collect()
}

/// Runs the two-phase or multi-phase solver depending on the channel count.
fn solve(
    features: &[Field],
    e: &EdgeWeight,
    cfg: &SolverConfig,
) -> Result<(SublevelStack, EnergyTrace)> {
    if features.len() == 1 {
        let (u, trace) = cs_std_solve(&features[0], e, cfg)?;
        Ok((SublevelStack::new(vec![u])?, trace))
    } else {
        cs_std_solve_multiphase(features, e, cfg)
    }
}

/// Writes the standard artifact set for one segmentation under `prefix`.
fn write_segmentation(
    manifest: &mut Manifest,
    tag: &str,
    prefix: &Path,
    background: &Field,
    stack: &SublevelStack,
    trace: &EnergyTrace,
) -> Result<()> {
    emit(
        manifest,
        &format!("{tag}masks"),
        with_suffix(prefix, ".masks.ff1"),
        &encode_feature_file(&fields_of(stack))?,
    )?;
    let labels = sublevel_to_label(stack);
    emit(
        manifest,
        &format!("{tag}labels"),
        with_suffix(prefix, ".labels.pgm"),
        &encode_pgm(labels.width(), labels.height(), labels.labels()),
    )?;
    emit(
        manifest,
        &format!("{tag}overlay"),
        with_suffix(prefix, ".overlay.ppm"),
        &encode_overlay(background, stack)?,
    )?;
    emit(
        manifest,
        &format!("{tag}trace"),
        with_suffix(prefix, ".trace.csv"),
        trace.to_csv().as_bytes(),
    )?;
    Ok(())
}

fn print_report(name: &str, report: &ConvexityReport) {
    for c in &report.components {
        println!(
            "{name}component {} area={} violating_fraction={:.4} isoperimetric_ratio={:.4}",
            c.label, c.area, c.violating_fraction, c.isoperimetric_ratio
        );
    }
    println!("{name}components={}", report.component_count());
    println!("{name}verdict={}", report.verdict);
}

fn cmd_segment(a: &SegmentArgs) -> Result<i32> {
    let started = Instant::now();
    let mut manifest = Manifest::new("segment");
    let (features, e, background) = if let Some(path) = &a.input {
        let means = a.means.clone().ok_or_else(|| {
            Error::InvalidParameter("--input requires --means (one mean per class)".into())
        })?;
        manifest.input("input", path)?;
        let image = read_image_pgm(path)?;
        let means = ClassMeans::new(means)?;
        manifest.set("means", join(means.as_slice()));
        (
            difference_features(&image, &means),
            edge_weight(&image)?,
            image,
        )
    } else {
        let path = a.features.as_ref().expect("clap enforces one source");
        manifest.input("features", path)?;
        let features = read_feature_file(path)?;
        let (w, h) = features[0].dims();
        let background = classic_sigmoid(&features[0]).into_field();
        (features, EdgeWeight::uniform(w, h), background)
    };
    let channels = features.len();
    if let Some(l) = a.classes {
        if l != channels + 1 {
            return Err(Error::InvalidParameter(format!(
                "--classes {l} but the input defines {} classes",
                channels + 1
            )));
        }
    }
    let cfg = a.solver.config(channels, SolverConfig::default())?;
    manifest.set("classes", channels + 1);
    manifest.config(&cfg);
    manifest.set("seed", a.seed);

    let (stack, trace) = solve(&features, &e, &cfg)?;
    ensure_parent(&a.out_prefix)?;
    write_segmentation(
        &mut manifest,
        "",
        &a.out_prefix,
        &background,
        &stack,
        &trace,
    )?;
    manifest.set("outer_performed", trace.iterations());
    manifest.write(&with_suffix(&a.out_prefix, ".manifest.txt"), started)?;
    println!("outer_iterations={}", trace.iterations());
    if let Some(last) = trace.records.last() {
        println!("final_energy={:e}", last.total);
    }
    Ok(EXIT_OK)
}

fn is_ff1(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("ff1"))
}

/// Binary mask from a PGM (nonzero is foreground) or an FF1 channel
/// (thresholded at 0.5).
fn read_mask(path: &Path, channel: usize) -> Result<Field> {
    if is_ff1(path) {
        let fields = read_feature_file(path)?;
        let f = channel
            .checked_sub(1)
            .and_then(|c| fields.get(c))
            .ok_or_else(|| {
                Error::InvalidParameter(format!("no channel {channel} in {}", path.display()))
            })?;
        Ok(f.threshold(0.5))
    } else {
        let pgm = read_pgm(path)?;
        let values = pgm
            .pixels
            .iter()
            .map(|&p| if p > 0 { 1.0 } else { 0.0 })
            .collect();
        Field::new(pgm.width, pgm.height, values)
    }
}

fn cmd_project(a: &ProjectArgs) -> Result<i32> {
    let started = Instant::now();
    let mut manifest = Manifest::new("project");
    manifest.input("input", &a.input)?;
    let schedule = RadiusSchedule::from_slice(&a.radii)?;
    let delta = CurvatureFloor::new(a.delta)?;
    manifest.set("radii", join(&a.radii));
    manifest.set("delta", a.delta);
    manifest.set("inner_iters", a.inner);

    ensure_parent(&a.out_prefix)?;
    let stats = if is_ff1(&a.input) {
        let fields = read_feature_file(&a.input)?;
        if fields.len() != 1 {
            return Err(Error::InvalidInput(format!(
                "expected a single-channel FF1, got {} channels",
                fields.len()
            )));
        }
        let u = SoftMask::new(fields.into_iter().next().expect("one channel"))?;
        let (out, stats) = project_convex_traced(&u, &schedule, delta, a.inner)?;
        let bytes = encode_feature_file(&[out.into_field()])?;
        emit(
            &mut manifest,
            "mask",
            with_suffix(&a.out_prefix, ".mask.ff1"),
            &bytes,
        )?;
        stats
    } else {
        let pgm = read_pgm(&a.input)?;
        let foreground = pgm
            .pixels
            .iter()
            .copied()
            .max()
            .filter(|&m| m > 0)
            .unwrap_or(255);
        let values = pgm
            .pixels
            .iter()
            .map(|&p| if p > 0 { 1.0 } else { 0.0 })
            .collect();
        let u = SoftMask::new(Field::new(pgm.width, pgm.height, values)?)?;
        let (out, stats) = project_convex_traced(&u, &schedule, delta, a.inner)?;
        let bytes = mask_bytes(&out, foreground);
        emit(
            &mut manifest,
            "mask",
            with_suffix(&a.out_prefix, ".mask.pgm"),
            &bytes,
        )?;
        stats
    };
    manifest.set("iterations", stats.iterations);
    manifest.set("converged", stats.converged);
    manifest.set("raised", stats.raised);
    manifest.write(&with_suffix(&a.out_prefix, ".manifest.txt"), started)?;
    println!(
        "iterations={} converged={} raised={}",
        stats.iterations, stats.converged, stats.raised
    );
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let mask = read_mask(&a.input, a.channel)?;
    let report = verify_convex(&mask, a.pairs, a.seed)?;
    print_report("", &report);
    Ok(if report.verdict {
        EXIT_OK
    } else {
        EXIT_VERDICT_FALSE
    })
}

fn cmd_dice(a: &DiceArgs) -> Result<i32> {
    let pred = read_label_pgm(&a.pred)?;
    let gt = read_label_pgm(&a.gt)?;
    let dm = dice(&pred.sublevel_mask(a.class), &gt.sublevel_mask(a.class))?;
    println!("{dm:.1}");
    Ok(EXIT_OK)
}

fn cmd_demo(a: &DemoArgs) -> Result<i32> {
    let started = Instant::now();
    fs::create_dir_all(&a.out_dir)?;
    let mut manifest = Manifest::new("demo");
    manifest.set("seed", a.seed);
    manifest.set("noise", a.noise);
    match a.kind {
        DemoKind::Fig4 => demo_fig4(a, &mut manifest)?,
        DemoKind::Fig5 => demo_fig5(a, &mut manifest)?,
        DemoKind::Nested => demo_nested(a, &mut manifest)?,
    }
    manifest.write(&a.out_dir.join("manifest.txt"), started)?;
    Ok(EXIT_OK)
}

fn demo_phantom(
    a: &DemoArgs,
    kind: PhantomKind,
    default_size: usize,
    manifest: &mut Manifest,
) -> Result<Phantom> {
    let size = a.size.unwrap_or(default_size);
    let ph = generate_phantom_with_noise(kind, size, a.seed, a.noise)?;
    manifest.set("phantom", kind.name());
    manifest.set("size", size);
    let image_bytes = grey_image_bytes(&ph.image);
    emit(manifest, "image", a.out_dir.join("image.pgm"), &image_bytes)?;
    let l = &ph.labels;
    emit(
        manifest,
        "ground_truth",
        a.out_dir.join("ground_truth.pgm"),
        &encode_pgm(l.width(), l.height(), l.labels()),
    )?;
    Ok(ph)
}

fn grey_image_bytes(image: &Field) -> Vec<u8> {
    let pixels: Vec<u8> = image
        .values()
        .iter()
        .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    encode_pgm(image.width(), image.height(), &pixels)
}

fn demo_fig4(a: &DemoArgs, manifest: &mut Manifest) -> Result<()> {
    let ph = demo_phantom(a, PhantomKind::Geometry, 256, manifest)?;
    let o = region_variance_feature(&ph.image, ph.means[0], ph.means[1]);
    let e = edge_weight(&ph.image)?;
    let full = a.solver.config(1, SolverConfig::default())?;
    manifest.config(&full);
    let panels = [
        (
            "sigmoid",
            SolverConfig {
                enable_td: false,
                enable_convex: false,
                ..full.clone()
            },
        ),
        (
            "std",
            SolverConfig {
                enable_convex: false,
                ..full.clone()
            },
        ),
        ("csstd", full.clone()),
    ];
    let truth = ph.labels.sublevel_mask(1);
    for (name, cfg) in panels {
        let (stack, trace) = solve(std::slice::from_ref(&o), &e, &cfg)?;
        write_segmentation(
            manifest,
            &format!("{name}_"),
            &a.out_dir.join(name),
            &ph.image,
            &stack,
            &trace,
        )?;
        let mask = stack.channels()[0].threshold(0.5);
        let report = verify_convex(&mask, ORACLE_PAIRS, a.seed)?;
        let dm = dice(&mask, &truth)?;
        println!(
            "{name}: components={} worst_fraction={:.4} verdict={} dice={dm:.1}",
            report.component_count(),
            report.worst_fraction(),
            report.verdict
        );
        manifest.set(&format!("{name}_verdict"), report.verdict);
        manifest.set(
            &format!("{name}_worst_fraction"),
            format!("{:.6}", report.worst_fraction()),
        );
        manifest.set(&format!("{name}_dice"), format!("{dm:.3}"));
    }
    Ok(())
}

fn demo_fig5(a: &DemoArgs, manifest: &mut Manifest) -> Result<()> {
    let ph = demo_phantom(a, PhantomKind::Star, 96, manifest)?;
    let o = region_variance_feature(&ph.image, ph.means[0], ph.means[1]);
    let e = edge_weight(&ph.image)?;
    let base = SolverConfig {
        schedule: RadiusSchedule::new(SWEEP_RADII)?,
        outer_iters: SWEEP_OUTER,
        ..SolverConfig::default()
    };
    let base = a.solver.config(1, base)?;
    manifest.config(&base);
    manifest.set("deltas", join(&SWEEP_DELTAS));
    for d in SWEEP_DELTAS {
        let cfg = SolverConfig {
            delta: CurvatureFloor::new(d)?,
            ..base.clone()
        };
        let (stack, trace) = solve(std::slice::from_ref(&o), &e, &cfg)?;
        let name = format!("delta_{d}");
        write_segmentation(
            manifest,
            &format!("{name}_"),
            &a.out_dir.join(&name),
            &ph.image,
            &stack,
            &trace,
        )?;
        let mask = stack.channels()[0].threshold(0.5);
        let ratio = isoperimetric_ratio(&mask).unwrap_or(0.0);
        println!(
            "delta={d}: area={} isoperimetric_ratio={ratio:.4}",
            mask.sum()
        );
        manifest.set(
            &format!("{name}_isoperimetric_ratio"),
            format!("{ratio:.6}"),
        );
    }
    Ok(())
}

fn demo_nested(a: &DemoArgs, manifest: &mut Manifest) -> Result<()> {
    let ph = demo_phantom(a, PhantomKind::NestedDisks, 256, manifest)?;
    let means = ClassMeans::new(ph.means.clone())?;
    let features = difference_features(&ph.image, &means);
    let e = edge_weight(&ph.image)?;
    let cfg = a.solver.config(features.len(), SolverConfig::default())?;
    manifest.config(&cfg);
    let (stack, trace) = solve(&features, &e, &cfg)?;
    write_segmentation(
        manifest,
        "csstd_",
        &a.out_dir.join("csstd"),
        &ph.image,
        &stack,
        &trace,
    )?;
    let nested = stack.first_nesting_violation().is_none();
    println!("nested={nested}");
    manifest.set("nested", nested);
    for (g, channel) in stack.channels().iter().enumerate() {
        let mask = channel.threshold(0.5);
        let report = verify_convex(&mask, ORACLE_PAIRS, a.seed)?;
        let dm = dice(&mask, &ph.labels.sublevel_mask(g as u8 + 1))?;
        println!(
            "channel {}: components={} worst_fraction={:.4} verdict={} dice={dm:.1}",
            g + 1,
            report.component_count(),
            report.worst_fraction(),
            report.verdict
        );
        manifest.set(&format!("channel{}_verdict", g + 1), report.verdict);
        manifest.set(&format!("channel{}_dice", g + 1), format!("{dm:.3}"));
    }
    Ok(())
}
