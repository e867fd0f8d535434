//! Experiment configs, the runner behind the `maxlab` CLI, and report files.
//!
//! A config is a TOML document:
//!
//! ```toml
//! kind = "sharpness-nec1"
//!
//! [params]
//! n = 2
//! a = [2.0, 3.0]
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Omitted parameters take their defaults, and the fully resolved config is
//! written into every report. A run writes `<name>.json`, `<name>.csv` and,
//! where the experiment has a natural picture, `<name>.svg`.

pub mod svg;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bilinear::{
    average_fsliced, average_gsliced, average_param_oracle, dyadic_decay, l1_failure_probe, maximal_estimate,
    norm_ratio, sharpness_nec1, sharpness_nec2, sharpness_nec3, AverageRequest, DyadicDecayParams, MaximalRequest,
    Nec1Params, Nec2Params, QuadratureOpts,
};
use crate::curves::{curve_maximal, curve_sharpness, mstar_exponent, CurveMaximalRequest, CurveSharpnessParams, CurveSharpnessReport, MstarParams};
use crate::error::{Error, Result};
use crate::fields::{FunctionSpec, SampledField};
use crate::fit::ScalingFit;
use crate::multilinear::{multilinear_average, necessity_experiment, MultiAverageRequest, NecessityParams};
use crate::regions::{classify_case, vertices, Anisotropy, CurveCase};
pub use svg::{plot_field, plot_fit, plot_region, RegionPlot};

pub const VERSION: &str = concat!("maxlab ", env!("CARGO_PKG_VERSION"));

/// Every experiment kind, in the order `maxlab list-kinds` prints them.
pub const KINDS: [&str; 12] = [
    "bilinear-average",
    "bilinear-maximal",
    "dyadic-decay",
    "sharpness-nec1",
    "sharpness-nec2",
    "l1-failure",
    "curve-maximal",
    "mstar-exponent",
    "curve-sharpness",
    "trilinear-average",
    "trilinear-necessity",
    "region-report",
];

fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| (-(k as f64)).exp2()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BilinearAverageParams {
    pub a: Vec<f64>,
    pub f: FunctionSpec,
    pub g: FunctionSpec,
    pub x: Vec<f64>,
    pub t1: f64,
    pub t2: f64,
    pub normalized: bool,
    pub quad: QuadratureOpts,
    /// Accepted relative gap between the two slicing paths.
    pub two_path_tol: f64,
    /// Monte-Carlo oracle samples; 0 skips the oracle.
    pub oracle_samples: usize,
    pub seed: u64,
}

impl Default for BilinearAverageParams {
    fn default() -> Self {
        BilinearAverageParams {
            a: vec![2.0, 3.0],
            f: FunctionSpec::ball(vec![0.2, 0.0], 0.8),
            g: FunctionSpec::bump(vec![0.0, 0.1], 1.2),
            x: vec![0.3, 0.1],
            t1: 1.0,
            t2: 0.8,
            normalized: true,
            quad: QuadratureOpts::default(),
            two_path_tol: 1e-4,
            oracle_samples: 0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilinearMaximalParams {
    pub a: Vec<f64>,
    pub request: MaximalRequest,
    /// `(p, q, r)`: also report `‖𝔐(f, g)‖_r / (‖f‖_p ‖g‖_q)`.
    #[serde(default)]
    pub exponents: Option<(f64, f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DyadicDecayConfig {
    pub n: usize,
    pub a: Vec<f64>,
    pub settings: DyadicDecayParams,
}

impl Default for DyadicDecayConfig {
    fn default() -> Self {
        DyadicDecayConfig { n: 2, a: vec![2.0, 4.0], settings: DyadicDecayParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Nec1Config {
    pub n: usize,
    pub a: Vec<f64>,
    pub deltas: Vec<f64>,
    pub settings: Nec1Params,
}

impl Default for Nec1Config {
    fn default() -> Self {
        Nec1Config { n: 2, a: vec![2.0, 2.0], deltas: dyadic(3, 7), settings: Nec1Params::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Nec2Config {
    pub n: usize,
    pub a: Vec<f64>,
    pub deltas: Vec<f64>,
    /// Exchange the roles of `f` and `g` (the third construction).
    pub mirrored: bool,
    pub settings: Nec2Params,
}

impl Default for Nec2Config {
    fn default() -> Self {
        Nec2Config { n: 2, a: vec![2.0, 6.0], deltas: dyadic(3, 7), mirrored: false, settings: Nec2Params::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct L1Config {
    pub n: usize,
    pub a: Vec<f64>,
    pub scales: Vec<f64>,
    pub delta: f64,
}

impl Default for L1Config {
    fn default() -> Self {
        L1Config { n: 2, a: vec![2.0, 2.0], scales: vec![4.0, 8.0, 16.0, 32.0], delta: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveMaximalParams {
    pub request: CurveMaximalRequest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MstarConfig {
    pub p: f64,
    pub hs: Vec<f64>,
    pub settings: MstarParams,
}

impl Default for MstarConfig {
    fn default() -> Self {
        MstarConfig { p: 2.0, hs: (2..=8).map(|k| f64::from(k).exp2()).collect(), settings: MstarParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CurveSharpnessConfig {
    pub case: CurveCase,
    pub m: u32,
    pub p: f64,
    pub q: f64,
    pub settings: CurveSharpnessParams,
}

impl Default for CurveSharpnessConfig {
    fn default() -> Self {
        CurveSharpnessConfig { case: CurveCase::Ii, m: 3, p: 4.0, q: 2.0, settings: CurveSharpnessParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrilinearAverageParams {
    pub a: Vec<f64>,
    pub request: MultiAverageRequest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NecessityConfig {
    pub n: usize,
    pub a: Vec<f64>,
    pub deltas: Vec<f64>,
    pub settings: NecessityParams,
}

impl Default for NecessityConfig {
    fn default() -> Self {
        NecessityConfig { n: 2, a: vec![2.0, 2.0, 2.0], deltas: dyadic(2, 5), settings: NecessityParams::default() }
    }
}

/// The experiment and its kind-specific parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum Experiment {
    BilinearAverage(BilinearAverageParams),
    BilinearMaximal(BilinearMaximalParams),
    DyadicDecay(DyadicDecayConfig),
    SharpnessNec1(Nec1Config),
    SharpnessNec2(Nec2Config),
    L1Failure(L1Config),
    CurveMaximal(CurveMaximalParams),
    MstarExponent(MstarConfig),
    CurveSharpness(CurveSharpnessConfig),
    TrilinearAverage(TrilinearAverageParams),
    TrilinearNecessity(NecessityConfig),
    RegionReport(RegionPlot),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        let i = match self {
            Experiment::BilinearAverage(_) => 0,
            Experiment::BilinearMaximal(_) => 1,
            Experiment::DyadicDecay(_) => 2,
            Experiment::SharpnessNec1(_) => 3,
            Experiment::SharpnessNec2(_) => 4,
            Experiment::L1Failure(_) => 5,
            Experiment::CurveMaximal(_) => 6,
            Experiment::MstarExponent(_) => 7,
            Experiment::CurveSharpness(_) => 8,
            Experiment::TrilinearAverage(_) => 9,
            Experiment::TrilinearNecessity(_) => 10,
            Experiment::RegionReport(_) => 11,
        };
        KINDS[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Base name of the report files; defaults to the kind.
    pub name: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("."), name: None }
    }
}

/// A resolved configuration: every default is filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub experiment: Experiment,
    pub output: OutputConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: String,
    #[serde(default)]
    params: Option<toml::Table>,
    #[serde(default)]
    output: OutputConfig,
}

fn config_error(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

fn anisotropy(a: &[f64], len: Option<usize>) -> Result<Anisotropy> {
    let an = Anisotropy::new(a.to_vec()).map_err(config_error)?;
    match len {
        Some(l) if an.len() != l => Err(Error::Config(format!("expected {l} exponents in `a`, got {}", an.len()))),
        _ => Ok(an),
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig { experiment, output: OutputConfig::default() }
    }

    /// Parse and validate a TOML config.
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(config_error)?;
        if !KINDS.contains(&raw.kind.as_str()) {
            return Err(Error::Config(format!("unknown kind `{}`; known kinds: {}", raw.kind, KINDS.join(", "))));
        }
        let mut table = toml::Table::new();
        table.insert("kind".into(), toml::Value::String(raw.kind));
        table.insert("params".into(), toml::Value::Table(raw.params.unwrap_or_default()));
        let experiment: Experiment = toml::Value::Table(table).try_into().map_err(config_error)?;
        let cfg = ExperimentConfig { experiment, output: raw.output };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Checks that need more than the field types.
    pub fn validate(&self) -> Result<()> {
        match &self.experiment {
            Experiment::BilinearAverage(p) => {
                anisotropy(&p.a, Some(2))?;
                if !(p.two_path_tol > 0.0) {
                    return Err(Error::Config("two_path_tol must be positive".into()));
                }
            }
            Experiment::BilinearMaximal(p) => {
                anisotropy(&p.a, Some(2))?;
            }
            Experiment::DyadicDecay(p) => {
                anisotropy(&p.a, Some(2))?;
            }
            Experiment::SharpnessNec1(p) => {
                anisotropy(&p.a, Some(2))?;
            }
            Experiment::SharpnessNec2(p) => {
                anisotropy(&p.a, Some(2))?;
            }
            Experiment::L1Failure(p) => {
                anisotropy(&p.a, Some(2))?;
            }
            Experiment::TrilinearAverage(p) => {
                anisotropy(&p.a, None)?;
            }
            Experiment::TrilinearNecessity(p) => {
                anisotropy(&p.a, None)?;
            }
            Experiment::RegionReport(RegionPlot::Bilinear { a, .. }) => {
                anisotropy(a, Some(2))?;
            }
            Experiment::RegionReport(RegionPlot::Trilinear { a, .. }) => {
                anisotropy(a, Some(3))?;
            }
            Experiment::CurveMaximal(_)
            | Experiment::MstarExponent(_)
            | Experiment::CurveSharpness(_)
            | Experiment::RegionReport(RegionPlot::Curve { .. }) => {}
        }
        Ok(())
    }

    pub fn name(&self) -> String {
        self.output.name.clone().unwrap_or_else(|| self.experiment.kind().to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }
}

/// Exit status of a run: 0 pass, 1 fail, 2 inconclusive, 3 configuration error.
pub fn exit_code(result: &Result<Outcome>) -> i32 {
    match result {
        Ok(o) => o.status.exit_code(),
        Err(Error::Accuracy { .. } | Error::InconclusiveFit { .. }) => 2,
        Err(_) => 3,
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// What an experiment hands to the report writer.
struct Produced {
    pass: bool,
    summary: String,
    result: Value,
    csv: String,
    svg: Option<String>,
}

#[derive(Serialize)]
struct Report<'a> {
    version: &'static str,
    kind: &'static str,
    status: Status,
    summary: &'a str,
    config: &'a ExperimentConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    result: Value,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn points_csv(header: &str, rows: impl IntoIterator<Item = Vec<f64>>) -> String {
    let mut s = String::from(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", cells.join(","));
    }
    s
}

fn field_csv(field: &SampledField) -> String {
    let mut buf = Vec::new();
    field.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

fn fit_summary(label: &str, fit: &ScalingFit) -> String {
    format!(
        "{label}: slope {:.4}, predicted {:.4} ± {}, residual {:.3e}",
        fit.slope, fit.predicted_slope, fit.tolerance, fit.residual
    )
}

fn fit_produced(label: &str, xlabel: &str, fit: ScalingFit, extra: Value) -> Produced {
    let svg = plot_fit(&fit, label, xlabel, "value", true);
    Produced {
        pass: fit.pass,
        summary: fit_summary(label, &fit),
        csv: points_csv(&format!("{xlabel},value"), fit.points.iter().map(|(x, y)| vec![*x, *y])),
        svg: Some(svg),
        result: json!({ "fit": to_value(&fit), "details": extra }),
    }
}

fn execute(exp: &Experiment) -> Result<Produced> {
    match exp {
        Experiment::BilinearAverage(p) => {
            let a = anisotropy(&p.a, Some(2))?;
            let mut req = AverageRequest::new(p.f.clone(), p.g.clone(), p.x.clone(), p.t1, p.t2);
            req.normalized = p.normalized;
            req.quad = p.quad.clone();
            let gs = average_gsliced(&a, &req)?;
            let fs = average_fsliced(&a, &req)?;
            let gap = (gs - fs).abs() / gs.abs().max(f64::MIN_POSITIVE);
            let mut pass = gap <= p.two_path_tol || (gs == 0.0 && fs == 0.0);
            let mut result = json!({ "gsliced": gs, "fsliced": fs, "relative_gap": gap });
            let mut rows = vec![vec![gs, fs, gap]];
            let mut summary = format!("average {gs:.10} (paths differ by {gap:.2e})");
            if p.oracle_samples > 0 {
                let (est, se) = average_param_oracle(&a, &req.clone().unnormalized(), p.oracle_samples, p.seed)?;
                let mass = if p.normalized { gs / average_gsliced(&a, &req.clone().unnormalized())? } else { 1.0 };
                let (est, se) = if p.normalized { (est * mass, se * mass) } else { (est, se) };
                let within = (est - gs).abs() <= 3.0 * se;
                pass &= within;
                result["oracle"] = json!({ "estimate": est, "std_error": se, "within_3se": within });
                rows[0].extend([est, se]);
                summary.push_str(&format!("; oracle {est:.6} ± {se:.1e}"));
            }
            let header = if p.oracle_samples > 0 { "gsliced,fsliced,relative_gap,oracle,oracle_se" } else { "gsliced,fsliced,relative_gap" };
            Ok(Produced { pass, summary, result, csv: points_csv(header, rows), svg: None })
        }
        Experiment::BilinearMaximal(p) => {
            let a = anisotropy(&p.a, Some(2))?;
            let field = maximal_estimate(&a, &p.request)?;
            let mut result = json!({ "max": field.max(), "field": to_value(&field) });
            let mut summary = format!("max over grid {:.6}", field.max());
            if let Some((pp, q, r)) = p.exponents {
                let ratio = norm_ratio(&p.request.f, &p.request.g, pp, q, r, &field)?;
                result["norm_ratio"] = json!(ratio);
                summary.push_str(&format!("; norm ratio {ratio:.6}"));
            }
            Ok(Produced { pass: true, summary, svg: plot_field(&field, "bilinear maximal function"), csv: field_csv(&field), result })
        }
        Experiment::DyadicDecay(p) => {
            let a = anisotropy(&p.a, Some(2))?;
            let r = dyadic_decay(p.n, &a, &p.settings)?;
            let csv = points_csv("k,ratio", r.ratios.iter().map(|(k, v)| vec![f64::from(*k), *v]));
            let svg = plot_fit(&r.fit, "dyadic pieces", "2^k", "ratio", true);
            Ok(Produced { pass: r.pass, summary: fit_summary("dyadic decay", &r.fit), csv, svg: Some(svg), result: to_value(&r) })
        }
        Experiment::SharpnessNec1(p) => {
            let a = anisotropy(&p.a, Some(2))?;
            let fit = sharpness_nec1(p.n, &a, &p.deltas, &p.settings)?;
            Ok(fit_produced("first construction", "delta", fit, Value::Null))
        }
        Experiment::SharpnessNec2(p) => {
            let a = anisotropy(&p.a, Some(2))?;
            let (label, fit) = if p.mirrored {
                ("mirrored second construction", sharpness_nec3(p.n, &a, &p.deltas, &p.settings)?)
            } else {
                ("second construction", sharpness_nec2(p.n, &a, &p.deltas, &p.settings)?)
            };
            Ok(fit_produced(label, "delta", fit, Value::Null))
        }
        Experiment::L1Failure(p) => {
            let a = anisotropy(&p.a, Some(2))?;
            let r = l1_failure_probe(p.n, &a, &p.scales, p.delta)?;
            let csv = points_csv("R,mass", r.masses.iter().map(|(x, y)| vec![*x, *y]));
            let svg = plot_fit(&r.fit, "mass over [-R, R]^n", "ln R", "mass", false);
            let summary = format!("mass grows by {:.4} per unit ln R; min pointwise ratio {:.4}", r.fit.slope, r.min_ratio);
            Ok(Produced { pass: r.pass, summary, csv, svg: Some(svg), result: to_value(&r) })
        }
        Experiment::CurveMaximal(p) => {
            let field = curve_maximal(&p.request)?;
            let summary = format!("max over grid {:.6}", field.max());
            Ok(Produced {
                pass: true,
                summary,
                svg: plot_field(&field, "curve maximal function"),
                csv: field_csv(&field),
                result: json!({ "max": field.max(), "field": to_value(&field) }),
            })
        }
        Experiment::MstarExponent(p) => {
            let r = mstar_exponent(p.p, &p.hs, &p.settings)?;
            let csv = points_csv("h,norm", r.norms.iter().map(|(h, v)| vec![*h, *v]));
            let svg = plot_fit(&r.fit, "offset maximal norms", "h", "norm", true);
            let summary = format!(
                "{}; profile in [{:.3}, {:.3}]",
                fit_summary("offset maximal", &r.fit),
                r.profile_min,
                r.profile_max
            );
            Ok(Produced { pass: r.pass, summary, csv, svg: Some(svg), result: to_value(&r) })
        }
        Experiment::CurveSharpness(p) => {
            let r = curve_sharpness(p.case, p.m, p.p, p.q, &p.settings)?;
            let (csv, summary) = match &r {
                CurveSharpnessReport::Growth(g) => (
                    points_csv("cutoff,value", g.cutoffs.iter().zip(&g.values).map(|(c, v)| vec![*c, *v])),
                    format!(
                        "ratios {:?} (predicted {:.4}); divergent {} (predicted {})",
                        g.ratios, g.predicted_ratio, g.divergent, g.predicted_divergent
                    ),
                ),
                CurveSharpnessReport::Bounded(b) => (
                    points_csv("ratio_q0,ratio_p0,bound", [vec![b.ratio_q0, b.ratio_p0, b.bound]]),
                    format!("constants {:.4} and {:.4} (bound {})", b.ratio_q0, b.ratio_p0, b.bound),
                ),
            };
            Ok(Produced { pass: r.pass(), summary, csv, svg: None, result: to_value(&r) })
        }
        Experiment::TrilinearAverage(p) => {
            let a = anisotropy(&p.a, None)?;
            let (est, se) = multilinear_average(&a, &p.request)?;
            Ok(Produced {
                pass: true,
                summary: format!("average {est:.8} ± {se:.2e}"),
                csv: points_csv("estimate,std_error", [vec![est, se]]),
                svg: None,
                result: json!({ "estimate": est, "std_error": se }),
            })
        }
        Experiment::TrilinearNecessity(p) => {
            let a = anisotropy(&p.a, None)?;
            let r = necessity_experiment(p.n, &a, &p.deltas, &p.settings)?;
            let csv = points_csv(
                "delta,value,std_error",
                r.fit.points.iter().zip(&r.std_errors).map(|((d, v), se)| vec![*d, *v, *se]),
            );
            let svg = plot_fit(&r.fit, "multilinear construction", "delta", "value", true);
            let summary = format!("{}; implied 1/p1 < {:.4}", fit_summary("multilinear construction", &r.fit), r.implied_bound);
            Ok(Produced { pass: r.pass, summary, csv, svg: Some(svg), result: to_value(&r) })
        }
        Experiment::RegionReport(region) => {
            let svg = plot_region(region)?;
            let (result, csv) = match region {
                RegionPlot::Bilinear { n, a } => {
                    let an = anisotropy(a, Some(2))?;
                    let case = classify_case(*n, &an)?;
                    let report = vertices(*n, &an)?;
                    let verts: Vec<Value> = report
                        .vertices
                        .iter()
                        .map(|v| json!({ "label": v.label, "x": v.x.to_string(), "y": v.y.to_string() }))
                        .collect();
                    let mut csv = String::from("label,x,y\n");
                    for v in &report.vertices {
                        let _ = writeln!(csv, "{},{},{}", v.label, v.x, v.y);
                    }
                    (json!({ "case": to_value(&case), "vertices": verts }), csv)
                }
                RegionPlot::Trilinear { n, a, x3 } => {
                    let an = anisotropy(a, Some(3))?;
                    let poly = crate::regions::trilinear_slice_polygon(*n, &an, *x3)?;
                    let csv = points_csv("x,y", poly.iter().map(|(x, y)| vec![*x, *y]));
                    (json!({ "polygon": poly }), csv)
                }
                RegionPlot::Curve { case, m } => {
                    let poly = crate::regions::curve_polygon(*case, *m);
                    let csv = points_csv("x,y", poly.iter().map(|(x, y)| vec![*x, *y]));
                    (json!({ "polygon": poly }), csv)
                }
            };
            Ok(Produced { pass: true, summary: "region drawn".into(), result, csv, svg: Some(svg) })
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Run the experiment and write its reports.
///
/// Accuracy and fit failures still produce a JSON report, with status
/// `inconclusive`; other errors are returned.
pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    cfg.validate()?;
    let produced = execute(&cfg.experiment);
    let (status, summary, result, csv, svg, error) = match produced {
        Ok(p) => (if p.pass { Status::Pass } else { Status::Fail }, p.summary, p.result, p.csv, p.svg, None),
        Err(e @ (Error::Accuracy { .. } | Error::InconclusiveFit { .. })) => {
            let (result, csv) = match &e {
                Error::InconclusiveFit { points, .. } => (
                    json!({ "points": points }),
                    points_csv("x,y", points.iter().map(|(x, y)| vec![*x, *y])),
                ),
                _ => (Value::Null, String::new()),
            };
            (Status::Inconclusive, e.to_string(), result, csv, None, Some(e.to_string()))
        }
        Err(e) => return Err(e),
    };
    fs::create_dir_all(&cfg.output.dir)?;
    let base = cfg.output.dir.join(cfg.name());
    let report = Report { version: VERSION, kind: cfg.experiment.kind(), status, summary: &summary, config: cfg, error, result };
    let mut json = serde_json::to_string_pretty(&report).map_err(config_error)?;
    json.push('\n');
    let mut files = Vec::new();
    for (ext, contents) in [("json", Some(json)), ("csv", (!csv.is_empty()).then_some(csv)), ("svg", svg)] {
        if let Some(text) = contents {
            let path = base.with_extension(ext);
            write_file(&path, &text)?;
            files.push(path);
        }
    }
    Ok(Outcome { status, summary, files })
}

/// Size the global thread pool from `MAXLAB_THREADS`, if set.
pub fn configure_threads() -> Result<Option<usize>> {
    let Ok(raw) = std::env::var("MAXLAB_THREADS") else {
        return Ok(None);
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| Error::Config(format!("MAXLAB_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(config_error)?;
    Ok(Some(threads))
}
