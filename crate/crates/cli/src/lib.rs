//! Command-line front end over the JSON document formats.
//!
//! [`run`] does all the work and returns the exit code and both output
//! streams, so tests can drive it in-process.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use matmoment::error::{Error, Result};
use matmoment::json::{self as docs, JacobiDoc};
use matmoment::matkernel::{ComplexMatrix, HermitianMatrix};
use matmoment::moments::{hankel_positive, jacobi_from_moments, moments_from_jacobi, moments_of_measure};
use matmoment::nevanlinna::{second_kind, ContractionParam, IndeterminateModel, ModelParams, ROOT_TOL};
use matmoment::polys::generate_first_kind;
use matmoment::series::SeriesParams;
use matmoment::spectral::{deficiency_indices, gauss_quadrature_with, kernel_partial_with, ClassifierParams};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    /// 0 on success, 1 for invalid input, 2 for numerical failure or refusal.
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "matmoment", version, about = "Block Jacobi matrices and the matrix moment problem")]
struct Cli {
    /// Emit JSON instead of a text report.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First-kind polynomials D_0..D_N (or second-kind E_0..E_N).
    GenPoly {
        #[arg(long)]
        jacobi: PathBuf,
        #[arg(long)]
        n: usize,
        /// File holding the p×p block D_0 (overrides a "d0" in the Jacobi document).
        #[arg(long)]
        d0: Option<PathBuf>,
        #[arg(long)]
        second_kind: bool,
    },
    /// Moments S_0..S_N of a Jacobi matrix or of a step measure.
    Moments {
        #[arg(long, conflicts_with = "measure", required_unless_present = "measure")]
        jacobi: Option<PathBuf>,
        #[arg(long)]
        measure: Option<PathBuf>,
        #[arg(long)]
        n: usize,
    },
    /// Jacobi matrix and normalization D_0 recovered from moments.
    InvertMoments {
        #[arg(long)]
        moments: PathBuf,
    },
    /// Positivity of the Hankel sections of a moment sequence.
    CheckPositivity {
        #[arg(long)]
        moments: PathBuf,
    },
    /// Determinacy class and deficiency report.
    Classify {
        #[arg(long)]
        jacobi: PathBuf,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        /// JSON array of [re, im] sample points.
        #[arg(long)]
        samples: Option<PathBuf>,
    },
    /// Partial kernel K_N(z) = Σ_{k≤N} D_k(z)* D_k(z).
    Kernel {
        #[arg(long)]
        jacobi: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long)]
        n: usize,
    },
    /// Entire matrix functions F1, F2, G1, G2 at z.
    Quartet {
        #[arg(long)]
        jacobi: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[command(flatten)]
        series: SeriesFlags,
    },
    /// Stieltjes transform of an extremal solution (--xi, Im z < 0) or of
    /// the solution attached to a contraction (--v / --v-scalar, Im z > 0).
    Transform {
        #[arg(long)]
        jacobi: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true, group = "param", required = true)]
        xi: Option<f64>,
        #[arg(long, group = "param")]
        v: Option<PathBuf>,
        /// Scalar multiple of the identity, "RE,IM".
        #[arg(long, allow_hyphen_values = true, group = "param")]
        v_scalar: Option<String>,
        #[command(flatten)]
        series: SeriesFlags,
    },
    /// Spectrum of the self-adjoint extension attached to a unitary U.
    Spectrum {
        #[arg(long)]
        jacobi: PathBuf,
        #[arg(long, group = "unitary", required = true)]
        u: Option<PathBuf>,
        /// Unit scalar times the identity, "RE,IM".
        #[arg(long, allow_hyphen_values = true, group = "unitary")]
        u_scalar: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        interval: String,
        #[arg(long, default_value_t = 2000)]
        grid: usize,
        #[arg(long, default_value_t = ROOT_TOL)]
        root_tol: f64,
        #[command(flatten)]
        series: SeriesFlags,
    },
    /// Gauss quadrature of the N-block truncation.
    Quad {
        #[arg(long)]
        jacobi: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct SeriesFlags {
    /// Largest number of series terms.
    #[arg(long, default_value_t = SeriesParams::default().n_max)]
    series_n_max: usize,
    #[arg(long, default_value_t = SeriesParams::default().tol)]
    series_tol: f64,
}

impl SeriesFlags {
    fn model_params(&self) -> ModelParams {
        ModelParams {
            series: SeriesParams { n_max: self.series_n_max, tol: self.series_tol, ..Default::default() },
            ..Default::default()
        }
    }
}

/// Output of a successful command: JSON payload plus its text rendering.
struct Report {
    json: Value,
    text: String,
}

/// A failure carrying an optional JSON payload for the diagnostic.
struct Failure {
    error: Error,
    payload: Option<Value>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, payload: None }
    }
}

type CmdResult = std::result::Result<Report, Failure>;

pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandResult { exit_code: 0, stdout: text, stderr: String::new() }
                }
                _ => CommandResult { exit_code: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    let as_json = cli.json;
    match execute(cli.command) {
        Ok(r) => CommandResult {
            exit_code: 0,
            stdout: if as_json { docs::render(&r.json) } else { r.text },
            stderr: String::new(),
        },
        Err(f) => {
            let numerical = f.error.is_numerical();
            let mut stdout = String::new();
            if as_json && numerical {
                let mut body = json!({ "error": error_kind(&f.error), "message": f.error.to_string() });
                if let Some(p) = f.payload {
                    body["report"] = p;
                }
                stdout = docs::render(&body);
            }
            CommandResult { exit_code: if numerical { 2 } else { 1 }, stdout, stderr: format!("error: {}\n", f.error) }
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::InvalidInput(_) => "invalid_input",
        Error::DimensionMismatch { .. } => "dimension_mismatch",
        Error::OutOfRange { .. } => "out_of_range",
        Error::NotPositiveDefinite { .. } => "not_positive_definite",
        Error::Singular(_) => "singular",
        Error::InvalidMeasure(_) => "invalid_measure",
        Error::IllConditioned { .. } => "ill_conditioned",
        Error::HalfPlane { .. } => "half_plane",
        Error::Pole(_) => "pole",
        Error::NotCompletelyIndeterminate(_) => "not_completely_indeterminate",
        Error::ClassificationUnavailable(_) => "classification_unavailable",
        Error::NumericalFailure(_) => "numerical_failure",
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    docs::parse(&text, &path.display().to_string())
}

fn in_file<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::InvalidInput(m) => Error::InvalidInput(format!("{}: {m}", path.display())),
        Error::InvalidMeasure(m) => Error::InvalidMeasure(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn read_jacobi(path: &Path) -> Result<JacobiDoc> {
    let v = read_json(path)?;
    in_file(path, docs::jacobi_from_value(&v))
}

fn read_block(path: &Path, p: usize) -> Result<ComplexMatrix> {
    let v = read_json(path)?;
    in_file(path, docs::block_from_value(&v, p, "block"))
}

fn parse_complex(s: &str, flag: &str) -> Result<C64> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |t: &str| -> Result<f64> {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::InvalidInput(format!("--{flag}: {t:?} is not a finite number")))
    };
    match parts.as_slice() {
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(Error::InvalidInput(format!("--{flag}: expected RE,IM, got {s:?}"))),
    }
}

fn fmt_c(z: C64) -> String {
    format!("{}{}{}i", z.re, if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) { "" } else { "+" }, z.im)
}

fn fmt_block(out: &mut String, label: &str, m: &ComplexMatrix) {
    let _ = writeln!(out, "{label}:");
    for row in m.rows() {
        let cells: Vec<String> = row.into_iter().map(fmt_c).collect();
        let _ = writeln!(out, "  [{}]", cells.join(", "));
    }
}

fn block_json(m: &ComplexMatrix) -> Value {
    docs::block_to_value(m)
}

fn herm_json(m: &HermitianMatrix) -> Value {
    docs::block_to_value(m.as_matrix())
}

fn execute(cmd: Command) -> CmdResult {
    match cmd {
        Command::GenPoly { jacobi, n, d0, second_kind: second } => gen_poly(&jacobi, n, d0.as_deref(), second),
        Command::Moments { jacobi, measure, n } => moments(jacobi.as_deref(), measure.as_deref(), n),
        Command::InvertMoments { moments } => invert_moments(&moments),
        Command::CheckPositivity { moments } => check_positivity(&moments),
        Command::Classify { jacobi, n_max, samples } => classify(&jacobi, n_max, samples.as_deref()),
        Command::Kernel { jacobi, z, n } => kernel(&jacobi, &z, n),
        Command::Quartet { jacobi, z, series } => quartet(&jacobi, &z, series),
        Command::Transform { jacobi, z, xi, v, v_scalar, series } => {
            transform(&jacobi, &z, xi, v.as_deref(), v_scalar.as_deref(), series)
        }
        Command::Spectrum { jacobi, u, u_scalar, interval, grid, root_tol, series } => {
            spectrum(&jacobi, u.as_deref(), u_scalar.as_deref(), &interval, grid, root_tol, series)
        }
        Command::Quad { jacobi, n } => quad(&jacobi, n),
    }
}

fn d0_of(doc: &JacobiDoc) -> ComplexMatrix {
    doc.d0.clone().unwrap_or_else(|| ComplexMatrix::identity(doc.jacobi.p()))
}

fn gen_poly(path: &Path, n: usize, d0_path: Option<&Path>, second: bool) -> CmdResult {
    let doc = read_jacobi(path)?;
    let p = doc.jacobi.p();
    let d0 = match d0_path {
        Some(f) => read_block(f, p)?,
        None => d0_of(&doc),
    };
    let basis = generate_first_kind(&doc.jacobi, n, &d0)?;
    let polys = if second { second_kind(&basis, n)?.epolys } else { basis.polys().to_vec() };
    let kind = if second { "second" } else { "first" };
    let mut text = String::new();
    for (k, poly) in polys.iter().enumerate() {
        let _ = writeln!(text, "{}_{k} (degree {}):", if second { "E" } else { "D" }, poly.degree().map_or(-1, |d| d as i64));
        for (j, cj) in poly.coeffs().iter().enumerate() {
            fmt_block(&mut text, &format!("  λ^{j}"), cj);
        }
    }
    Ok(Report {
        json: json!({ "kind": kind, "polys": polys.iter().map(docs::matrixpoly_to_value).collect::<Vec<_>>() }),
        text,
    })
}

fn moments(jacobi: Option<&Path>, measure: Option<&Path>, n: usize) -> CmdResult {
    let s = match (jacobi, measure) {
        (Some(jp), _) => {
            let doc = read_jacobi(jp)?;
            moments_from_jacobi(&doc.jacobi, &d0_of(&doc), n)?
        }
        (None, Some(mp)) => {
            let v = read_json(mp)?;
            let t = in_file(mp, docs::measure_from_value(&v))?;
            moments_of_measure(&t, n)
        }
        (None, None) => return Err(Error::InvalidInput("one of --jacobi or --measure is required".into()).into()),
    };
    let mut text = String::new();
    for (k, m) in s.moments().iter().enumerate() {
        fmt_block(&mut text, &format!("S_{k}"), m.as_matrix());
    }
    Ok(Report { json: docs::moments_to_value(&s), text })
}

fn read_moments(path: &Path) -> Result<matmoment::moments::MomentSequence> {
    let v = read_json(path)?;
    in_file(path, docs::moments_from_value(&v))
}

fn invert_moments(path: &Path) -> CmdResult {
    let s = read_moments(path)?;
    let (j, d0) = jacobi_from_moments(&s)?;
    let mut text = format!("p = {}, {} diagonal blocks\n", j.p(), j.stored_diag().len());
    fmt_block(&mut text, "D_0", &d0);
    for (k, a) in j.stored_diag().iter().enumerate() {
        fmt_block(&mut text, &format!("A_{k}"), a);
    }
    for (k, b) in j.stored_offdiag().iter().enumerate() {
        fmt_block(&mut text, &format!("B_{k}"), b);
    }
    Ok(Report { json: docs::jacobi_to_value(&j, Some(&d0)), text })
}

fn check_positivity(path: &Path) -> CmdResult {
    let s = read_moments(path)?;
    let v = hankel_positive(&s);
    let witness = v.witness.map(|(k, ev)| json!({ "section": k, "min_eigenvalue": ev }));
    let mut text = format!(
        "{} (Hankel sections checked up to {})\n",
        if v.positive { "positive" } else { "not positive" },
        v.checked_up_to
    );
    if let Some((k, ev)) = v.witness {
        let _ = writeln!(text, "witness: section {k}, min eigenvalue {ev:e}");
    }
    if v.odd_tail_ignored {
        text.push_str("last moment unused (odd count)\n");
    }
    Ok(Report {
        json: json!({
            "positive": v.positive,
            "witness": witness,
            "checked_up_to": v.checked_up_to,
            "odd_tail_ignored": v.odd_tail_ignored,
            "min_eigenvalues": v.min_eigenvalues,
        }),
        text,
    })
}

fn classify(path: &Path, n_max: usize, samples: Option<&Path>) -> CmdResult {
    let doc = read_jacobi(path)?;
    let mut params = ClassifierParams { n_max, ..Default::default() };
    if let Some(sp) = samples {
        let v = read_json(sp)?;
        let items = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput(format!("{}: expected an array of [re, im] pairs", sp.display())))?;
        params.samples = items
            .iter()
            .enumerate()
            .map(|(k, z)| in_file(sp, docs::complex_from_value(z, &format!("[{k}]"))))
            .collect::<Result<Vec<_>>>()?;
    }
    let report = deficiency_indices(&doc.jacobi, &params)?;
    let ranks = |v: &[matmoment::spectral::SampleRank]| -> Value {
        v.iter()
            .map(|s| json!({ "z": docs::complex_to_value(s.z), "rank": s.rank, "decisive": s.decisive }))
            .collect()
    };
    let mut payload = json!({
        "p": report.p,
        "nu_plus": report.nu_plus,
        "nu_minus": report.nu_minus,
        "decisive": report.decisive,
        "samples_upper": ranks(&report.samples_upper),
        "samples_lower": ranks(&report.samples_lower),
    });
    let class = match report.class() {
        Ok(c) => c,
        Err(error) => return Err(Failure { error, payload: Some(payload) }),
    };
    payload["class"] = json!(class.to_string());
    let mut text = format!("{class}\n");
    let _ = writeln!(text, "deficiency indices ({}, {}) with p = {}", report.nu_plus, report.nu_minus, report.p);
    for s in report.samples_upper.iter().chain(&report.samples_lower) {
        let _ = writeln!(text, "  z = {}: rank {}", fmt_c(s.z), s.rank);
    }
    Ok(Report { json: payload, text })
}

fn kernel(path: &Path, z: &str, n: usize) -> CmdResult {
    let z = parse_complex(z, "z")?;
    let doc = read_jacobi(path)?;
    let k = kernel_partial_with(&doc.jacobi, &d0_of(&doc), z, n)?;
    let mut text = String::new();
    fmt_block(&mut text, &format!("K_{n}({})", fmt_c(z)), k.as_matrix());
    Ok(Report { json: json!({ "z": docs::complex_to_value(z), "n": n, "K": herm_json(&k) }), text })
}

fn model(path: &Path, series: SeriesFlags) -> Result<IndeterminateModel> {
    let doc = read_jacobi(path)?;
    IndeterminateModel::new(&doc.jacobi, &series.model_params())
}

fn quartet(path: &Path, z: &str, series: SeriesFlags) -> CmdResult {
    let z = parse_complex(z, "z")?;
    let q = model(path, series)?.quartet(z)?;
    let mut text = String::new();
    for (l, m) in [("F1", &q.f1), ("F2", &q.f2), ("G1", &q.g1), ("G2", &q.g2)] {
        fmt_block(&mut text, l, m);
    }
    let _ = writeln!(text, "terms {}, tail {:e}, converged {}", q.n_used, q.tail_norm, q.converged);
    Ok(Report {
        json: json!({
            "z": docs::complex_to_value(z),
            "F1": block_json(&q.f1),
            "F2": block_json(&q.f2),
            "G1": block_json(&q.g1),
            "G2": block_json(&q.g2),
            "n_used": q.n_used,
            "tail_norm": q.tail_norm,
            "converged": q.converged,
        }),
        text,
    })
}

fn transform(
    path: &Path,
    z: &str,
    xi: Option<f64>,
    v: Option<&Path>,
    v_scalar: Option<&str>,
    series: SeriesFlags,
) -> CmdResult {
    let z = parse_complex(z, "z")?;
    if let Some(x) = xi {
        if !x.is_finite() {
            return Err(Error::InvalidInput("--xi must be finite".into()).into());
        }
    }
    let m = model(path, series)?;
    let p = m.p();
    let (value, mode) = match (xi, v, v_scalar) {
        (Some(x), _, _) => (m.transform_extremal(x, z)?, json!({ "xi": x })),
        (_, Some(f), _) => {
            let vm = read_block(f, p)?;
            (m.transform_from_v(z, &ContractionParam::Constant(vm.clone()))?, json!({ "v": block_json(&vm) }))
        }
        (_, _, Some(s)) => {
            let vm = ComplexMatrix::scalar(p, parse_complex(s, "v-scalar")?);
            (m.transform_from_v(z, &ContractionParam::Constant(vm.clone()))?, json!({ "v": block_json(&vm) }))
        }
        _ => return Err(Error::InvalidInput("one of --xi, --v, --v-scalar is required".into()).into()),
    };
    let mut text = String::new();
    fmt_block(&mut text, &format!("m({})", fmt_c(z)), &value);
    Ok(Report { json: json!({ "z": docs::complex_to_value(z), "parameter": mode, "value": block_json(&value) }), text })
}

fn spectrum(
    path: &Path,
    u: Option<&Path>,
    u_scalar: Option<&str>,
    interval: &str,
    grid: usize,
    root_tol: f64,
    series: SeriesFlags,
) -> CmdResult {
    let parts: Vec<f64> = interval
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("--interval: expected A,B, got {interval:?}")))?;
    let [a, b] = parts[..] else {
        return Err(Error::InvalidInput(format!("--interval: expected A,B, got {interval:?}")).into());
    };
    let scalar_u = u_scalar.map(|s| parse_complex(s, "u-scalar")).transpose()?;
    let m = model(path, series)?;
    let um = match (u, scalar_u) {
        (Some(f), _) => read_block(f, m.p())?,
        (None, Some(s)) => ComplexMatrix::scalar(m.p(), s),
        _ => return Err(Error::InvalidInput("one of --u, --u-scalar is required".into()).into()),
    };
    let roots = m.extension_spectrum(&um, (a, b), grid, root_tol)?;
    let mut text = format!("{} roots in [{a}, {b}]\n", roots.len());
    for r in &roots {
        let _ = writeln!(text, "  {} (residual {:e})", r.lambda, r.residual);
    }
    Ok(Report {
        json: json!({
            "interval": [a, b],
            "u": block_json(&um),
            "roots": roots.iter().map(|r| json!({ "lambda": r.lambda, "residual": r.residual })).collect::<Vec<_>>(),
        }),
        text,
    })
}

fn quad(path: &Path, n: usize) -> CmdResult {
    let doc = read_jacobi(path)?;
    let t = gauss_quadrature_with(&doc.jacobi, n, &d0_of(&doc))?;
    let mut text = format!("{} nodes\n", t.len());
    for (x, w) in t.nodes().iter().zip(t.weights()) {
        fmt_block(&mut text, &format!("node {x}"), w.as_matrix());
    }
    Ok(Report { json: docs::measure_to_value(&t), text })
}
