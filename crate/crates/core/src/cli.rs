//! Command-line frontend: `analyze`, `sweep`, `assemble`, `commensurability`, `check-paper`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::acceptance::{all_passed, run_checks, Check};
use crate::arith::{commensurability_class, parse_basis, span_input_of, MultiQuad, SpanInput};
use crate::assembly::{assembly_report, m_complex, n_complex, w_complex, AssemblyReport, AssemblySpec};
use crate::coxeter::{
    build_diagram, enumerate_strata, finite_volume_check, gram_matrix, EdgeLabel, Polytope, PolytopeFile, StrataComplex,
    StrataMode, VolumeVerdict,
};
use crate::family::{angle_eta, angle_phi, angle_psi, angle_theta, t1, FamilyTime, Preset, PresetKind, T2};
use crate::volume::{
    closed_form_volume, fmt12, gauss_bonnet_volume, orbifold_euler_char, poincare_volume, schlafli_volume_curve, Method,
    VolumeCurve, VolumePoint,
};

pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_FLAGS: i32 = 2;
pub const EXIT_ACCEPTANCE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Numeric {
    /// Multiquadratic arithmetic for the combinatorics.
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strata {
    /// `both` for acute-angled polytopes, `geometric` otherwise.
    Auto,
    Diagram,
    Geometric,
    Both,
}

#[derive(Parser, Debug)]
#[command(name = "hypercox", version, about = "Hyperbolic Coxeter 4-polytopes from Lorentzian normals")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Strata, diagram, angles, volume and Euler characteristic of one polytope.
    Analyze {
        /// `P@t1`, `Q@tbar`, `P@0.9`, `P@sqrt(2/5)`.
        #[arg(long, group = "source")]
        preset: Option<Preset>,
        /// Shorthand for `--preset P@<t>`.
        #[arg(long, group = "source")]
        t: Option<FamilyTime>,
        /// Polytope JSON: `{"walls": [{"name": .., "normal": [..]}]}`.
        #[arg(long, group = "source")]
        polytope: Option<PathBuf>,
        /// Defaults to `exact` for presets and `float` for files.
        #[arg(long, value_enum)]
        mode: Option<Numeric>,
        #[arg(long, value_enum, default_value_t = Strata::Auto)]
        strata: Strata,
    },
    /// Angles and volume of `P_t` over a range of `t`.
    Sweep {
        #[arg(long, default_value_t = 0.01)]
        from: f64,
        #[arg(long, default_value_t = 1.0)]
        to: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = SweepMethod::ClosedForm)]
        method: SweepMethod,
        /// Worker threads; output order does not depend on it.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Face cycles, stratum surfaces, cusps and Euler characteristic of an assembly.
    Assemble {
        /// `W`, `N`, `M` or an assembly JSON file.
        #[arg(long)]
        pattern: String,
        /// Required for `W`, `N`, `M`.
        #[arg(long)]
        t: Option<FamilyTime>,
    },
    /// Hasse and Witt invariants of the rational span of the Gram matrix.
    Commensurability {
        #[arg(long, group = "input", required = true)]
        preset: Option<Preset>,
        /// `{"names": [..], "gram": [["1", "-1/2", ..], ..], "coords": optional}`.
        #[arg(long, group = "input")]
        gram_file: Option<PathBuf>,
        /// Such as `sqrt(5)*H, A, L, M, N`.
        #[arg(long)]
        basis: Option<String>,
    },
    /// Runs the acceptance checks.
    CheckPaper {
        /// A check id such as `3`, or a title prefix.
        #[arg(long)]
        section: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SweepMethod {
    ClosedForm,
    Schlafli,
    Poincare,
}

#[derive(Debug)]
pub enum CliError {
    Flags(String),
    Compute(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Flags(_) => EXIT_FLAGS,
            CliError::Compute(_) => EXIT_COMPUTE,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Flags(m) => write!(f, "invalid flags: {m}"),
            CliError::Compute(m) => write!(f, "error: {m}"),
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Compute(e.to_string())
}

fn flags(m: impl Into<String>) -> CliError {
    CliError::Flags(m.into())
}

/// Parses `args` (program name first), writes the report to `out` and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FLAGS } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.code()
        }
    }
}

/// Runs a parsed command; returns the rendered report and the exit code.
pub fn execute(cli: &Cli) -> Result<(String, i32), CliError> {
    let f = cli.format;
    match &cli.command {
        Command::Analyze { preset, t, polytope, mode, strata } => {
            let source = match (preset, t, polytope) {
                (Some(p), None, None) => Source::Preset(p.clone()),
                (None, Some(t), None) => Source::Preset(Preset::new(PresetKind::P, t.clone())),
                (None, None, Some(path)) => {
                    if *mode == Some(Numeric::Exact) {
                        return Err(flags("--polytope takes binary64 normals; exact mode needs a preset"));
                    }
                    Source::File(path.clone())
                }
                _ => return Err(flags("give one of --preset, --t, --polytope")),
            };
            let numeric = mode.unwrap_or(match source {
                Source::Preset(_) => Numeric::Exact,
                Source::File(_) => Numeric::Float,
            });
            let report = analyze(&source, numeric, *strata)?;
            Ok((render_analyze(&report, f)?, 0))
        }
        Command::Sweep { from, to, steps, method, jobs } => {
            if !(*from > 0.0 && from < to && *to <= 1.0) {
                return Err(flags("need 0 < --from < --to <= 1"));
            }
            if *steps < 2 || *jobs == 0 {
                return Err(flags("need --steps >= 2 and --jobs >= 1"));
            }
            let curve = sweep(*from, *to, *steps, *method, *jobs)?;
            Ok((render_sweep(&curve, f)?, 0))
        }
        Command::Assemble { pattern, t } => {
            let complex = match pattern.as_str() {
                "W" | "N" | "M" => {
                    let t = t.as_ref().ok_or_else(|| flags("--t is required for W, N and M"))?;
                    if pattern != "W" && t.t < t1() - crate::eps() {
                        return Err(flags("N and M are defined for t in [t1, 1]"));
                    }
                    match pattern.as_str() {
                        "W" => w_complex(t),
                        "N" => n_complex(t),
                        _ => m_complex(t),
                    }
                    .map_err(compute)?
                }
                path => {
                    if t.is_some() {
                        return Err(flags("--t does not apply to an assembly file"));
                    }
                    let text = std::fs::read_to_string(path).map_err(|e| flags(format!("{path}: {e}")))?;
                    let spec: AssemblySpec = serde_json::from_str(&text).map_err(|e| flags(format!("{path}: {e}")))?;
                    spec.build().map_err(compute)?
                }
            };
            let report = assembly_report(&complex).map_err(compute)?;
            Ok((render_assembly(&report, f)?, 0))
        }
        Command::Commensurability { preset, gram_file, basis } => {
            let input = match (preset, gram_file) {
                (Some(p), None) => span_input_of(&p.polytope::<MultiQuad>().map_err(compute)?).map_err(compute)?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|e| flags(format!("{}: {e}", path.display())))?;
                    let g: GramFile =
                        serde_json::from_str(&text).map_err(|e| flags(format!("{}: {e}", path.display())))?;
                    g.into_input().map_err(flags)?
                }
                _ => return Err(flags("give one of --preset, --gram-file")),
            };
            let basis = basis.as_deref().map(|b| parse_basis(&input, b)).transpose().map_err(|e| flags(e.to_string()))?;
            let report = commensurability(&input, basis)?;
            Ok((render_commensurability(&report, f)?, 0))
        }
        Command::CheckPaper { section } => {
            if let Some(s) = section {
                if s.trim().is_empty() {
                    return Err(flags("--section is empty"));
                }
            }
            let checks = run_checks(section.as_deref());
            if checks.is_empty() {
                return Err(flags(format!("no check matches {:?}", section.as_deref().unwrap_or(""))));
            }
            let code = acceptance_exit_code(&checks);
            Ok((render_checks(&checks, f)?, code))
        }
    }
}

/// `0` when every check passed or is a known deviation, else `3`.
pub fn acceptance_exit_code(checks: &[crate::acceptance::Check]) -> i32 {
    if all_passed(checks) {
        0
    } else {
        EXIT_ACCEPTANCE
    }
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    fmt12(x).parse().unwrap_or(x)
}

/// Rounds every float in a JSON tree to 12 significant digits.
fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round12(x))) {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_json<T: Serialize>(x: &T) -> Result<String, CliError> {
    let mut v = serde_json::to_value(x).map_err(compute)?;
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(compute)?;
    s.push('\n');
    Ok(s)
}

fn csv_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(compute)?;
    for r in rows {
        w.write_record(&r).map_err(compute)?;
    }
    String::from_utf8(w.into_inner().map_err(compute)?).map_err(compute)
}

// ---------------------------------------------------------------- analyze

enum Source {
    Preset(Preset),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagramEdge {
    pub walls: [String; 2],
    /// `pi/m`, an angle in radians, `thick`, `dashed` or `nested`.
    pub label: String,
    /// Dihedral angle, or the distance between walls for `dashed`.
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DihedralAngle {
    pub walls: [String; 2],
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeValue {
    pub method: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub polytope: String,
    pub t: Option<f64>,
    pub regime: Option<String>,
    pub numeric: String,
    pub strata: String,
    pub walls: Vec<String>,
    /// `(facets, faces, edges, vertices)`.
    pub f_vector: [usize; 4],
    pub ideal_vertices: usize,
    pub diagram: Vec<DiagramEdge>,
    pub dihedral_angles: Vec<DihedralAngle>,
    pub finite_volume: bool,
    /// An edge with a missing endpoint.
    pub witness: Option<Vec<String>>,
    pub coxeter: bool,
    pub volumes: Vec<VolumeValue>,
    /// Volumes that could not be computed, with the reason.
    pub skipped: Vec<(String, String)>,
    /// Orbifold Euler characteristic as `p/q`.
    pub euler_char: Option<String>,
}

/// `m` with `angle = π/m`, if any.
fn pi_over(angle: f64) -> Option<u64> {
    let m = std::f64::consts::PI / angle;
    let r = m.round();
    (r >= 2.0 && (m - r).abs() < 1e-9).then_some(r as u64)
}

fn strata_of(p: &Polytope<f64>, exact: Option<&Polytope<MultiQuad>>, choice: Strata) -> Result<(StrataComplex, StrataMode), CliError> {
    let acute = match exact {
        Some(e) => build_diagram(&gram_matrix(e).map_err(compute)?).is_acute(),
        None => build_diagram(&gram_matrix(p).map_err(compute)?).is_acute(),
    };
    let mode = match choice {
        Strata::Diagram if !acute => {
            return Err(compute("the diagram backend needs an acute-angled polytope"));
        }
        Strata::Diagram => StrataMode::Diagram,
        Strata::Geometric => StrataMode::Geometric,
        Strata::Both => StrataMode::Both,
        Strata::Auto if acute => StrataMode::Both,
        Strata::Auto => StrataMode::Geometric,
    };
    let s = match exact {
        Some(e) => enumerate_strata(e, mode),
        None => enumerate_strata(p, mode),
    }
    .map_err(compute)?;
    Ok((s, mode))
}

fn analyze(source: &Source, numeric: Numeric, choice: Strata) -> Result<AnalyzeReport, CliError> {
    let (name, preset, p) = match source {
        Source::Preset(pr) => (pr.to_string(), Some(pr), pr.polytope::<f64>().map_err(compute)?),
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| flags(format!("{}: {e}", path.display())))?;
            let file: PolytopeFile = serde_json::from_str(&text).map_err(|e| flags(format!("{}: {e}", path.display())))?;
            (path.display().to_string(), None, file.into_polytope().map_err(compute)?)
        }
    };
    let exact = match (numeric, preset) {
        (Numeric::Exact, Some(pr)) => Some(pr.polytope::<MultiQuad>().map_err(compute)?),
        _ => None,
    };
    let (s, mode) = strata_of(&p, exact.as_ref(), choice)?;
    let d = build_diagram(&gram_matrix(&p).map_err(compute)?);

    let mut diagram = Vec::new();
    for (i, j, l) in d.edges() {
        let (label, value) = match l {
            EdgeLabel::RightAngle => continue,
            EdgeLabel::Angle(a) => (pi_over(a).map_or_else(|| fmt12(a), |m| format!("pi/{m}")), Some(round12(a))),
            EdgeLabel::Thick => ("thick".into(), None),
            EdgeLabel::Dashed(x) => ("dashed".into(), Some(round12(x))),
            EdgeLabel::Nested => ("nested".into(), None),
        };
        diagram.push(DiagramEdge { walls: [d.nodes[i].clone(), d.nodes[j].clone()], label, value });
    }
    let dihedral_angles: Vec<DihedralAngle> = s
        .faces
        .iter()
        .map(|f| DihedralAngle {
            walls: [s.walls[f.walls[0]].clone(), s.walls[f.walls[1]].clone()],
            angle: round12(f.angle),
        })
        .collect();
    let coxeter = s.faces.iter().all(|f| pi_over(f.angle).is_some());
    let (finite_volume, witness) = match finite_volume_check(&s) {
        VolumeVerdict::Finite => (true, None),
        VolumeVerdict::Infinite { witness } => (false, witness),
    };

    let mut volumes = Vec::new();
    let mut skipped = Vec::new();
    let mut push = |method: &str, v: Result<f64, String>| match v {
        Ok(x) => volumes.push(VolumeValue { method: method.into(), value: round12(x) }),
        Err(e) => skipped.push((method.to_string(), e)),
    };
    let family_t = preset.filter(|pr| pr.kind == PresetKind::P).map(|pr| pr.time.t);
    if finite_volume {
        if let Some(t) = family_t {
            push(Method::ClosedForm.as_str(), closed_form_volume(t).map_err(|e| e.to_string()));
            push(
                Method::Schlafli.as_str(),
                schlafli_volume_curve(&[t]).map(|c| c.points[0].vol).map_err(|e| e.to_string()),
            );
        }
        push(Method::Poincare.as_str(), poincare_volume(&p, &s).map_err(|e| e.to_string()));
    }
    let euler_char = if coxeter && finite_volume {
        let chi = match &exact {
            Some(e) => orbifold_euler_char(e, &s),
            None => orbifold_euler_char(&p, &s),
        }
        .map_err(compute)?;
        push("gauss-bonnet", Ok(gauss_bonnet_volume(chi)));
        Some(chi.to_string())
    } else {
        None
    };

    Ok(AnalyzeReport {
        polytope: name,
        t: preset.map(|pr| round12(pr.time.t)),
        regime: preset.map(|pr| pr.time.regime.label().to_string()),
        numeric: match (numeric, &exact) {
            (Numeric::Exact, Some(_)) => "exact".into(),
            _ => "float".into(),
        },
        strata: format!("{mode:?}").to_lowercase(),
        walls: p.names.clone(),
        f_vector: s.f_vector(),
        ideal_vertices: s.ideal_vertices().count(),
        diagram,
        dihedral_angles,
        finite_volume,
        witness,
        coxeter,
        volumes,
        skipped,
        euler_char,
    })
}

fn render_analyze(r: &AnalyzeReport, f: Format) -> Result<String, CliError> {
    match f {
        Format::Json => to_json(r),
        Format::Csv => {
            let mut rows = vec![
                vec!["polytope".into(), r.polytope.clone()],
                vec!["f_vector".into(), r.f_vector.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")],
                vec!["ideal_vertices".into(), r.ideal_vertices.to_string()],
                vec!["finite_volume".into(), r.finite_volume.to_string()],
                vec!["coxeter".into(), r.coxeter.to_string()],
            ];
            for v in &r.volumes {
                rows.push(vec![format!("volume:{}", v.method), fmt12(v.value)]);
            }
            if let Some(chi) = &r.euler_char {
                rows.push(vec!["euler_char".into(), chi.clone()]);
            }
            for e in &r.diagram {
                rows.push(vec![format!("diagram:{}-{}", e.walls[0], e.walls[1]), e.label.clone()]);
            }
            for a in &r.dihedral_angles {
                rows.push(vec![format!("angle:{}-{}", a.walls[0], a.walls[1]), fmt12(a.angle)]);
            }
            csv_rows(&["quantity", "value"], rows)
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "polytope      {}", r.polytope);
            if let (Some(t), Some(reg)) = (r.t, &r.regime) {
                let _ = writeln!(s, "t             {} (regime {reg})", fmt12(t));
            }
            let _ = writeln!(s, "backend       {} / {}", r.numeric, r.strata);
            let fv = r.f_vector;
            let _ = writeln!(s, "f-vector      ({},{},{},{})  ideal vertices {}", fv[0], fv[1], fv[2], fv[3], r.ideal_vertices);
            let verdict = match (&r.finite_volume, &r.witness) {
                (true, _) => "finite".to_string(),
                (false, Some(w)) => format!("infinite (edge {})", w.join(",")),
                (false, None) => "infinite".to_string(),
            };
            let _ = writeln!(s, "volume        {verdict}");
            for v in &r.volumes {
                let _ = writeln!(s, "  {:<14}{}", v.method, fmt12(v.value));
            }
            for (m, why) in &r.skipped {
                let _ = writeln!(s, "  {m:<14}n/a ({why})");
            }
            let _ = writeln!(s, "coxeter       {}", r.coxeter);
            if let Some(chi) = &r.euler_char {
                let _ = writeln!(s, "euler char    {chi}");
            }
            let _ = writeln!(s, "diagram ({} non-right edges)", r.diagram.len());
            for e in &r.diagram {
                let _ = writeln!(s, "  {}-{}  {}", e.walls[0], e.walls[1], e.label);
            }
            let _ = writeln!(s, "dihedral angles ({} faces)", r.dihedral_angles.len());
            for a in &r.dihedral_angles {
                let _ = writeln!(s, "  {}-{}  {}", a.walls[0], a.walls[1], fmt12(a.angle));
            }
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- sweep

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub t: f64,
    pub theta: f64,
    pub phi: Option<f64>,
    pub psi: Option<f64>,
    pub eta: Option<f64>,
    pub vol: f64,
    pub method: Method,
}

fn sweep_point(t: f64, method: SweepMethod) -> Result<VolumePoint, CliError> {
    let vol = match method {
        SweepMethod::ClosedForm => closed_form_volume(t).map_err(compute)?,
        SweepMethod::Poincare => {
            let p = crate::family::p_polytope::<f64>(&FamilyTime::new(t).map_err(compute)?).map_err(compute)?;
            let s = enumerate_strata(&p, StrataMode::Geometric).map_err(compute)?;
            poincare_volume(&p, &s).map_err(compute)?
        }
        SweepMethod::Schlafli => unreachable!("integrated as a chain"),
    };
    Ok(VolumePoint {
        t,
        theta: angle_theta(t).map_err(compute)?,
        phi: angle_phi(t).ok(),
        vol,
        method: match method {
            SweepMethod::ClosedForm => Method::ClosedForm,
            _ => Method::Poincare,
        },
    })
}

/// Evenly spaced samples on `[from, to]`; parallel workers, results in `t` order.
pub fn sweep(from: f64, to: f64, steps: usize, method: SweepMethod, jobs: usize) -> Result<VolumeCurve, CliError> {
    let ts: Vec<f64> = (0..steps).map(|i| from + (to - from) * i as f64 / (steps - 1) as f64).collect();
    if method == SweepMethod::Schlafli {
        return schlafli_volume_curve(&ts).map_err(compute);
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(compute)?;
    let points = pool.install(|| ts.par_iter().map(|&t| sweep_point(t, method)).collect::<Result<Vec<_>, _>>())?;
    Ok(VolumeCurve { points })
}

fn sweep_rows(c: &VolumeCurve) -> Vec<SweepRow> {
    c.points
        .iter()
        .map(|p| SweepRow {
            t: p.t,
            theta: p.theta,
            phi: p.phi,
            psi: (p.t <= t1()).then(|| angle_psi(p.t).ok()).flatten(),
            eta: (p.t <= T2).then(|| angle_eta(p.t).ok()).flatten(),
            vol: p.vol,
            method: p.method,
        })
        .collect()
}

fn render_sweep(c: &VolumeCurve, f: Format) -> Result<String, CliError> {
    let rows = sweep_rows(c);
    let opt = |x: Option<f64>| x.map(fmt12).unwrap_or_default();
    match f {
        Format::Json => to_json(&rows),
        Format::Csv => csv_rows(
            &["t", "theta", "phi", "psi", "eta", "vol", "method"],
            rows.iter().map(|r| {
                vec![fmt12(r.t), fmt12(r.theta), opt(r.phi), opt(r.psi), opt(r.eta), fmt12(r.vol), r.method.as_str().into()]
            }),
        ),
        Format::Text => {
            let mut s = format!("{:<16}{:<16}{:<16}{:<16}{:<16}{:<16}\n", "t", "theta", "phi", "psi", "eta", "vol");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:<16}{:<16}{:<16}{:<16}{:<16}{:<16}",
                    fmt12(r.t),
                    fmt12(r.theta),
                    opt(r.phi),
                    opt(r.psi),
                    opt(r.eta),
                    fmt12(r.vol)
                );
            }
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- assemble

fn render_assembly(r: &AssemblyReport, f: Format) -> Result<String, CliError> {
    match f {
        Format::Json => to_json(r),
        Format::Csv => csv_rows(
            &["angle", "length", "cycles", "base_faces"],
            r.cycle_classes.iter().map(|c| vec![fmt12(c.angle), c.length.to_string(), c.cycles.to_string(), c.base_faces.to_string()]),
        ),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "copies        {}", r.copies.join(" "));
            let _ = writeln!(s, "face cycles");
            for c in &r.cycle_classes {
                let _ = writeln!(
                    s,
                    "  angle {}  length {}  cycles {}  base faces {}",
                    fmt12(c.angle),
                    c.length,
                    c.cycles,
                    c.base_faces
                );
            }
            let _ = writeln!(s, "stratum surfaces ({})", r.surfaces.len());
            for x in &r.surfaces {
                let cones: Vec<String> = x.cone_points.iter().map(|c| fmt12(c.angle)).collect();
                let _ = writeln!(
                    s,
                    "  cone angle {}  chi {}  {}  area {}  cone points [{}]",
                    fmt12(x.cone_angle),
                    x.euler_char,
                    if x.orientable { "orientable" } else { "non-orientable" },
                    fmt12(x.area),
                    cones.join(", ")
                );
            }
            let _ = writeln!(s, "cusp cycles ({})", r.cusps.len());
            for c in &r.cusps {
                let sign = c.monodromy.map_or("?".to_string(), |m| format!("{m:+}"));
                let _ = writeln!(s, "  length {}  monodromy {}  vertices {}", c.length, sign, c.vertices.join(" "));
            }
            let _ = writeln!(s, "cell count chi {}", r.cell_euler_char);
            if let Some(chi) = &r.euler_char {
                let _ = writeln!(s, "euler char    {chi}");
            }
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- commensurability

/// Exact Gram matrix input; entries such as `-1/2` or `sqrt(3)/2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GramFile {
    pub names: Vec<String>,
    pub gram: Vec<Vec<String>>,
    #[serde(default)]
    pub coords: Option<Vec<Vec<String>>>,
}

impl GramFile {
    fn into_input(self) -> Result<SpanInput, String> {
        let parse = |rows: Vec<Vec<String>>| -> Result<Vec<Vec<MultiQuad>>, String> {
            rows.into_iter()
                .map(|r| r.iter().map(|x| x.parse::<MultiQuad>().map_err(|e| e.to_string())).collect())
                .collect()
        };
        let n = self.names.len();
        let gram = parse(self.gram)?;
        if gram.len() != n || gram.iter().any(|r| r.len() != n) {
            return Err(format!("gram must be {n}x{n}"));
        }
        let coords = self.coords.map(parse).transpose()?;
        if coords.as_ref().is_some_and(|c| c.len() != n) {
            return Err("one coordinate row per name".into());
        }
        Ok(SpanInput { names: self.names, gram, coords })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommensurabilityOutput {
    pub basis: Vec<String>,
    pub form: Vec<Vec<String>>,
    pub diagonal: Vec<String>,
    pub hasse: String,
    pub witt: String,
    pub determinant_class: i64,
    pub signature: (usize, usize),
}

fn commensurability(
    input: &SpanInput,
    basis: Option<Vec<crate::arith::ScaledNormal>>,
) -> Result<CommensurabilityOutput, CliError> {
    let r = commensurability_class(input, basis).map_err(compute)?;
    let basis = r
        .basis
        .iter()
        .map(|v| {
            let name = &input.names[v.node];
            if v.coef == MultiQuad::one() {
                name.clone()
            } else {
                format!("({})*{name}", v.coef)
            }
        })
        .collect();
    let form = r.form.matrix().iter().map(|row| row.iter().map(|q| q.to_string()).collect()).collect();
    Ok(CommensurabilityOutput {
        basis,
        form,
        diagonal: r.invariant.diagonal.clone(),
        hasse: r.invariant.hasse.to_string(),
        witt: r.invariant.witt.to_string(),
        determinant_class: r.invariant.determinant_class,
        signature: r.invariant.signature,
    })
}

fn render_commensurability(r: &CommensurabilityOutput, f: Format) -> Result<String, CliError> {
    match f {
        Format::Json => to_json(r),
        Format::Csv => csv_rows(
            &["quantity", "value"],
            [
                vec!["basis".into(), r.basis.join(" ")],
                vec!["diagonal".into(), r.diagonal.join(" ")],
                vec!["hasse".into(), r.hasse.clone()],
                vec!["witt".into(), r.witt.clone()],
                vec!["determinant_class".into(), r.determinant_class.to_string()],
            ],
        ),
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "basis         {}", r.basis.join(", "));
            let _ = writeln!(s, "form");
            for row in &r.form {
                let _ = writeln!(s, "  [{}]", row.join(", "));
            }
            let _ = writeln!(s, "diagonal      <{}>", r.diagonal.join(", "));
            let _ = writeln!(s, "signature     ({}, {})", r.signature.0, r.signature.1);
            let _ = writeln!(s, "determinant   {}", r.determinant_class);
            let _ = writeln!(s, "hasse         {}", r.hasse);
            let _ = writeln!(s, "witt          {}", r.witt);
            Ok(s)
        }
    }
}

// ---------------------------------------------------------------- check-paper

fn render_checks(checks: &[Check], f: Format) -> Result<String, CliError> {
    match f {
        Format::Json => to_json(&checks),
        Format::Csv => csv_rows(
            &["id", "title", "passed", "known_deviation", "detail"],
            checks.iter().map(|c| {
                vec![c.id.clone(), c.title.clone(), c.passed.to_string(), c.known_deviation.to_string(), c.detail.clone()]
            }),
        ),
        Format::Text => {
            let mut s: String = checks.iter().map(|c| c.line() + "\n").collect();
            let failed = checks.iter().filter(|c| !c.passed && !c.known_deviation).count();
            let _ = writeln!(s, "{} checks, {failed} failed", checks.len());
            Ok(s)
        }
    }
}

/// Analysis report for a preset, as `analyze --format json` prints it.
pub fn analyze_preset(preset: &Preset, numeric: Numeric) -> Result<AnalyzeReport, CliError> {
    analyze(&Source::Preset(preset.clone()), numeric, Strata::Auto)
}
