//! Command-line surface: reproducible experiments with JSON artifacts and
//! CSV reports. Every command writes a `manifest.json` next to its outputs
//! (command, configuration echo, seed, version, timestamp); the numerical
//! output files themselves depend only on the configuration, so reruns with
//! an identical configuration are byte-identical.
//!
//! Exit codes: 0 success (classify: real-factorable), 1 usage/parse/IO,
//! 2 sampling failure, 3 validation or round-trip failure, 4 non-real
//! Gramian, 5 rank/spectrum/skewness failures, 6 infeasible skew system,
//! 10 complex-only verdict.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::conjecture::{self, GridPoint, ScanConfig};
use crate::factor::{self, FactorError, Verdict};
use crate::hrep::{self, HRepError};
use crate::polymat::{self, PolyMatrix};
use crate::tol::Tolerances;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SAMPLING: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NOT_REAL: i32 = 4;
pub const EXIT_RANK_SPECTRUM: i32 = 5;
pub const EXIT_INFEASIBLE: i32 = 6;
pub const EXIT_COMPLEX_ONLY: i32 = 10;

#[derive(Parser)]
#[command(name = "polygram", version, about = "Real polynomial Gramians via block-Toeplitz bilinear representations")]
struct Cli {
    /// Multiplicative scale applied to all tolerance defaults (also
    /// settable via POLYGRAM_TOL).
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Serialize)]
struct ShapeArgs {
    /// Factor row count d (the Gramian rank).
    #[arg(long)]
    d: usize,
    /// Factor column count N.
    #[arg(long = "N")]
    n: usize,
    /// Factor degree P.
    #[arg(long = "P")]
    p: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Entry scale of the symmetric W blocks; 0 yields a real factor.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a representation point and write its factor and Gramian.
    Generate {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Output directory for hrep.json, factor.json, gram.json.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Decide whether a factor's Gramian admits a real spectral factor.
    Classify {
        /// Input factor (PolyMatrix JSON).
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "classification.json")]
        out: PathBuf,
    },
    /// Canonicalize a factor and recover its (W, R) representation.
    Recover {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "hrep.json")]
        out: PathBuf,
    },
    /// Dimension scan over a (d, P, N) grid; emits CSV.
    Scan {
        /// ScanConfig JSON file; flags below override nothing when given.
        #[arg(long, conflicts_with_all = ["grid", "trials", "seed", "scale"])]
        config: Option<PathBuf>,
        /// Grid as "d,P,N;d,P,N;..." (default: 1,1,2;1,1,3;1,1,4).
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 3)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long, default_value_t = 1e-5)]
        fd_step: f64,
        #[arg(long, default_value_t = 1e-6)]
        rank_tol: f64,
        #[arg(long, default_value = "scan.csv")]
        out: PathBuf,
    },
    /// Solve X^T A - A^T X = C for one solution and describe the family.
    SolveSkew {
        /// Real matrix A (JSON: {"rows","cols","data"}).
        #[arg(long)]
        a: PathBuf,
        /// Real skew-symmetric matrix C (same schema).
        #[arg(long)]
        c: PathBuf,
        #[arg(long, default_value = "solution.json")]
        out: PathBuf,
    },
    /// Generate, recover, and compare in one shot.
    Roundtrip {
        #[command(flatten)]
        shape: ShapeArgs,
        /// Optional output directory for the intermediate artifacts.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Real matrix interchange schema for solve-skew inputs and outputs.
#[derive(Serialize, Deserialize)]
pub struct RealMatJson {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries.
    pub data: Vec<f64>,
}

impl RealMatJson {
    pub fn to_matrix(&self) -> Result<DMatrix<f64>, String> {
        if self.data.len() != self.rows * self.cols {
            return Err(format!(
                "expected {} entries, got {}",
                self.rows * self.cols,
                self.data.len()
            ));
        }
        Ok(DMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.data[i * self.cols + j]
        }))
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Self {
        let mut data = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                data.push(m[(i, j)]);
            }
        }
        RealMatJson {
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }
}

#[derive(Serialize)]
struct RunManifest {
    command: String,
    config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    tool_version: String,
    created_utc: String,
}

impl RunManifest {
    fn new(command: &str, config: serde_json::Value, seed: Option<u64>) -> Self {
        RunManifest {
            command: command.into(),
            config,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            created_utc: chrono::Utc::now().to_rfc3339(),
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value).map_err(|e| e.to_string())?;
    let mut f = fs::File::create(path).map_err(|e| format!("{}: {}", path.display(), e))?;
    f.write_all(text.as_bytes()).map_err(|e| e.to_string())?;
    f.write_all(b"\n").map_err(|e| e.to_string())?;
    Ok(())
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {}", path.display(), e))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {}", path.display(), e))
}

fn factor_error_code(e: &FactorError) -> i32 {
    match e {
        FactorError::NotRealGramian { .. } => EXIT_NOT_REAL,
        FactorError::NotSkew { .. } => EXIT_RANK_SPECTRUM,
        FactorError::Infeasible { .. } => EXIT_INFEASIBLE,
        FactorError::RankDeficientLead { .. }
        | FactorError::DegenerateSpectrum { .. }
        | FactorError::UnitarityFailure { .. }
        | FactorError::Numeric(_) => EXIT_RANK_SPECTRUM,
        FactorError::NotRepresentable { .. } => EXIT_NOT_REAL,
        FactorError::StructureViolation { .. } => EXIT_RANK_SPECTRUM,
        FactorError::HRep(_) => EXIT_VALIDATION,
    }
}

/// Run the CLI on the given arguments (without the program name); returns
/// the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut argv: Vec<String> = vec!["polygram".into()];
    argv.extend(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let mut tol = Tolerances::from_env();
    if let Some(scale) = cli.tol {
        if scale > 0.0 && scale.is_finite() {
            tol = Tolerances::default().scaled(scale);
        } else {
            eprintln!("--tol must be a positive finite scale");
            return EXIT_USAGE;
        }
    }
    match cli.command {
        Command::Generate { shape, out } => cmd_generate(&shape, &out, &tol),
        Command::Classify { input, out } => cmd_classify(&input, &out, &tol),
        Command::Recover { input, out } => cmd_recover(&input, &out, &tol),
        Command::Scan {
            config,
            grid,
            trials,
            seed,
            scale,
            fd_step,
            rank_tol,
            out,
        } => cmd_scan(config, grid, trials, seed, scale, fd_step, rank_tol, &out, &tol),
        Command::SolveSkew { a, c, out } => cmd_solve_skew(&a, &c, &out, &tol),
        Command::Roundtrip { shape, out } => cmd_roundtrip(&shape, out.as_deref(), &tol),
    }
}

fn cmd_generate(shape: &ShapeArgs, out: &Path, tol: &Tolerances) -> i32 {
    if let Err(e) = fs::create_dir_all(out) {
        eprintln!("cannot create {}: {}", out.display(), e);
        return EXIT_USAGE;
    }
    let h = match hrep::sample(shape.d, shape.n, shape.p, shape.seed, shape.scale, tol) {
        Ok(h) => h,
        Err(e @ HRepError::DimensionError { .. }) => {
            eprintln!("{}", e);
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("sampling failed: {}", e);
            return EXIT_SAMPLING;
        }
    };
    let report = h.validate(tol);
    let x = match h.to_factor(tol) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("validation failed: {}", e);
            return EXIT_VALIDATION;
        }
    };
    let g = polymat::gram(&x);
    let (real, max_imag) = polymat::is_real(&g, tol);

    let manifest = RunManifest::new("generate", serde_json::to_value(shape).unwrap(), Some(shape.seed));
    for (name, res) in [
        ("hrep.json", write_json(&out.join("hrep.json"), &h)),
        ("factor.json", write_json(&out.join("factor.json"), &x)),
        ("gram.json", write_json(&out.join("gram.json"), &g)),
        ("manifest.json", write_json(&out.join("manifest.json"), &manifest)),
    ] {
        if let Err(e) = res {
            eprintln!("writing {}: {}", name, e);
            return EXIT_USAGE;
        }
    }
    println!(
        "generated d={} N={} P={} seed={} scale={}",
        shape.d, shape.n, shape.p, shape.seed, shape.scale
    );
    println!(
        "realness: max imaginary magnitude {:.3e} ({})",
        max_imag,
        if real { "real" } else { "NOT real" }
    );
    println!(
        "validation: sym residual {:.3e}, constraint residual {:.3e}, rank(R_0) = {}",
        report.sym_residual, report.cons_residual, report.r0_rank
    );
    if real && report.pass {
        EXIT_OK
    } else {
        eprintln!("generated instance failed realness or validation");
        EXIT_VALIDATION
    }
}

fn cmd_classify(input: &Path, out: &Path, tol: &Tolerances) -> i32 {
    let x: PolyMatrix = match read_json(input) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("parse error: {}", e);
            return EXIT_USAGE;
        }
    };
    let classification = match factor::classify(&x, tol) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("classification failed: {}", e);
            return factor_error_code(&e);
        }
    };
    if let Err(e) = write_json(out, &classification) {
        eprintln!("writing {}: {}", out.display(), e);
        return EXIT_USAGE;
    }
    let manifest = RunManifest::new(
        "classify",
        serde_json::json!({ "input": input.display().to_string() }),
        None,
    );
    let _ = write_json(&out.with_file_name("classification_manifest.json"), &manifest);
    println!(
        "verdict: {:?} (normalized W norm {:.3e})",
        classification.verdict, classification.w_norm
    );
    match classification.verdict {
        Verdict::RealFactorable => EXIT_OK,
        Verdict::ComplexOnly => EXIT_COMPLEX_ONLY,
    }
}

fn cmd_recover(input: &Path, out: &Path, tol: &Tolerances) -> i32 {
    let x: PolyMatrix = match read_json(input) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("parse error: {}", e);
            return EXIT_USAGE;
        }
    };
    let cf = match factor::canonicalize_factor(&x, tol) {
        Ok(cf) => cf,
        Err(e) => {
            eprintln!("canonicalization failed: {}", e);
            return factor_error_code(&e);
        }
    };
    let h = match factor::recover_hrep(&cf, tol) {
        Ok(h) => h,
        Err(e) => {
            eprintln!("recovery failed: {}", e);
            return factor_error_code(&e);
        }
    };
    if let Err(e) = write_json(out, &h) {
        eprintln!("writing {}: {}", out.display(), e);
        return EXIT_USAGE;
    }
    println!(
        "recovered (W, R): d={} N={} P={}, W norm {:.6e}",
        h.d,
        h.n,
        h.deg,
        h.w_norm()
    );
    EXIT_OK
}

fn parse_grid(spec: &str) -> Result<Vec<GridPoint>, String> {
    let mut grid = Vec::new();
    for part in spec.split(';').filter(|s| !s.trim().is_empty()) {
        let nums: Vec<usize> = part
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|e| format!("bad grid entry '{}': {}", part, e))?;
        if nums.len() != 3 {
            return Err(format!("grid entry '{}' must be d,P,N", part));
        }
        grid.push(GridPoint {
            d: nums[0],
            p: nums[1],
            n: nums[2],
        });
    }
    Ok(grid)
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    config: Option<PathBuf>,
    grid: Option<String>,
    trials: usize,
    seed: u64,
    scale: f64,
    fd_step: f64,
    rank_tol: f64,
    out: &Path,
    tol: &Tolerances,
) -> i32 {
    let cfg: ScanConfig = if let Some(path) = config {
        match read_json(&path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("parse error: {}", e);
                return EXIT_USAGE;
            }
        }
    } else {
        let grid = match grid.as_deref().map(parse_grid).transpose() {
            Ok(g) => g.unwrap_or_else(conjecture::default_grid),
            Err(e) => {
                eprintln!("{}", e);
                return EXIT_USAGE;
            }
        };
        ScanConfig {
            grid,
            trials,
            seed,
            fd_step,
            rank_tol,
            scale,
        }
    };
    let rows = match conjecture::scan(&cfg, tol) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("scan failed: {}", e);
            return EXIT_USAGE;
        }
    };
    let mut buf = Vec::new();
    if let Err(e) = conjecture::write_csv(&rows, &mut buf) {
        eprintln!("csv error: {}", e);
        return EXIT_USAGE;
    }
    if let Err(e) = fs::write(out, &buf) {
        eprintln!("writing {}: {}", out.display(), e);
        return EXIT_USAGE;
    }
    let manifest = RunManifest::new("scan", serde_json::to_value(&cfg).unwrap(), Some(cfg.seed));
    let _ = write_json(&out.with_extension("manifest.json"), &manifest);
    println!("d P N  chart_C rank_C  chart_R rank_R  margin  agreement flags");
    for r in &rows {
        println!(
            "{} {} {}  {:7} {:6}  {:7} {:6}  {:6}  {:9} {}",
            r.d, r.p, r.n, r.chart_dim_c, r.image_rank_c, r.chart_dim_r, r.image_rank_r, r.margin, r.agreement, r.flags
        );
    }
    EXIT_OK
}

fn cmd_solve_skew(a_path: &Path, c_path: &Path, out: &Path, tol: &Tolerances) -> i32 {
    let load = |p: &Path| -> Result<DMatrix<f64>, String> {
        let j: RealMatJson = read_json(p)?;
        j.to_matrix()
    };
    let (a, c) = match (load(a_path), load(c_path)) {
        (Ok(a), Ok(c)) => (a, c),
        (Err(e), _) | (_, Err(e)) => {
            eprintln!("parse error: {}", e);
            return EXIT_USAGE;
        }
    };
    match factor::solve_skew_particular(&a, &c, tol) {
        Ok(x) => {
            let residual = crate::numeric::fro(&(&x.transpose() * &a - a.transpose() * &x - &c));
            if let Err(e) = write_json(out, &RealMatJson::from_matrix(&x)) {
                eprintln!("writing {}: {}", out.display(), e);
                return EXIT_USAGE;
            }
            println!("particular solution written, residual {:.3e}", residual);
            println!("full solution family: X = W A + X_particular for any symmetric W");
            EXIT_OK
        }
        Err(e @ FactorError::Infeasible { .. }) => {
            eprintln!("{}", e);
            EXIT_INFEASIBLE
        }
        Err(e @ FactorError::NotSkew { .. }) => {
            eprintln!("{}", e);
            EXIT_RANK_SPECTRUM
        }
        Err(e) => {
            eprintln!("{}", e);
            factor_error_code(&e)
        }
    }
}

fn cmd_roundtrip(shape: &ShapeArgs, out: Option<&Path>, tol: &Tolerances) -> i32 {
    let h = match hrep::sample(shape.d, shape.n, shape.p, shape.seed, shape.scale, tol) {
        Ok(h) => h,
        Err(e @ HRepError::DimensionError { .. }) => {
            eprintln!("{}", e);
            return EXIT_USAGE;
        }
        Err(e) => {
            eprintln!("sampling failed: {}", e);
            return EXIT_SAMPLING;
        }
    };
    let canon = match h.canonicalize(tol) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("canonicalization failed: {}", e);
            return EXIT_RANK_SPECTRUM;
        }
    };
    let x = match h.to_factor(tol) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("{}", e);
            return EXIT_VALIDATION;
        }
    };
    let cf = match factor::canonicalize_factor(&x, tol) {
        Ok(cf) => cf,
        Err(e) => {
            eprintln!("{}", e);
            return factor_error_code(&e);
        }
    };
    let rec = match factor::recover_hrep(&cf, tol) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{}", e);
            return factor_error_code(&e);
        }
    };
    let scale = canon.w_norm() + canon.r_norm() + 1.0;
    let mut max_diff = 0.0f64;
    for k in 0..2 * h.deg {
        max_diff = max_diff.max(crate::numeric::fro(&(&rec.w[k] - &canon.w[k])));
    }
    for p in 0..=h.deg {
        max_diff = max_diff.max(crate::numeric::fro(&(&rec.r[p] - &canon.r[p])));
    }
    let rel = max_diff / scale;
    if let Some(dir) = out {
        if fs::create_dir_all(dir).is_ok() {
            let _ = write_json(&dir.join("hrep.json"), &canon);
            let _ = write_json(&dir.join("factor.json"), &x);
            let _ = write_json(&dir.join("recovered_hrep.json"), &rec);
            let manifest = RunManifest::new("roundtrip", serde_json::to_value(shape).unwrap(), Some(shape.seed));
            let _ = write_json(&dir.join("manifest.json"), &manifest);
        }
    }
    println!("round trip relative deviation: {:.3e}", rel);
    if rel <= 1e-7 {
        EXIT_OK
    } else {
        eprintln!("round trip deviation exceeds 1e-7");
        EXIT_VALIDATION
    }
}
