//! Command implementations and file formats behind the `spherecode` binary.
//!
//! A codebook file is a one-line JSON header followed by `K` comma-separated
//! rows of `n` values written with 17 significant digits, so reading a file
//! back reproduces the vectors bit for bit. A pure-JSON layout
//! (`{"header": ..., "vectors": [[...], ...]}`) is also accepted.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::block_codes::{
    bch_code, bch_parameters, extend_with_parity, puncture_trailing,
    reed_muller_code, reed_solomon_code, LinearCode, MAX_RM_M,
};
use crate::bounds::{
    achievable_max_cosine, bounds_report, message_bits, prop1_cosine_bound, rankin_converse,
    reed_solomon_simplex_bound, BoundsReport,
};
use crate::error::{Error, Result};
use crate::gf2m::MAX_FIELD_DEGREE;
use crate::optimize::{optimize_prototypes, LossKind, OptimizerConfig};
use crate::sphere_map::{
    codebook_from_code, onehot_codebook_in, qary_codebook_with, random_codebook,
    separation_stats, simplex_codebook, Codebook, ComponentMap, HistogramBin, Scheme,
    SeparationStats,
};

pub const SCHEMA_VERSION: u32 = 1;

/// Schemes accepted by `generate` and `sweep`.
pub const CLI_SCHEMES: [Scheme; 8] = [
    Scheme::OneHot,
    Scheme::Simplex,
    Scheme::RmCode,
    Scheme::BchCode,
    Scheme::RsSimplex,
    Scheme::Random,
    Scheme::OptimizedLse,
    Scheme::OptimizedAvg,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    Json,
    #[default]
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::InvalidParameter(format!("unknown format '{s}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodebookHeader {
    pub schema_version: u32,
    pub scheme: Scheme,
    #[serde(rename = "K")]
    pub classes: usize,
    pub n: usize,
    pub seed: Option<u64>,
    pub assignment_seed: Option<u64>,
    #[serde(default)]
    pub parameters: serde_json::Value,
    /// Proven upper bound on the max pairwise cosine, when one exists.
    pub certified_max_cosine_bound: Option<f64>,
    #[serde(default)]
    pub certificate: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodebookFile {
    pub header: CodebookHeader,
    pub codebook: Codebook,
}

#[derive(Serialize, Deserialize)]
struct JsonCodebook {
    header: CodebookHeader,
    vectors: Vec<Vec<f64>>,
}

impl CodebookFile {
    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = serde_json::to_string(&self.header)?;
        out.push('\n');
        for row in self.codebook.rows() {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json_string(&self) -> Result<String> {
        let doc = JsonCodebook {
            header: self.header.clone(),
            vectors: self.codebook.rows().map(<[f64]>::to_vec).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    pub fn to_string_as(&self, format: OutputFormat) -> Result<String> {
        match format {
            OutputFormat::Csv => self.to_csv_string(),
            OutputFormat::Json => self.to_json_string(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let first = text.lines().next().unwrap_or("");
        if let Ok(header) = serde_json::from_str::<CodebookHeader>(first) {
            return parse_csv_body(header, text);
        }
        let doc: JsonCodebook = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line().max(1),
            message: e.to_string(),
        })?;
        let classes = doc.header.classes;
        let dim = doc.header.n;
        if doc.vectors.len() != classes {
            return Err(Error::Parse {
                line: 1,
                message: format!("header says K={classes} but {} vectors follow", doc.vectors.len()),
            });
        }
        if let Some(i) = doc.vectors.iter().position(|v| v.len() != dim) {
            return Err(Error::Parse {
                line: 1,
                message: format!("vector {i} has {} entries, expected n={dim}", doc.vectors[i].len()),
            });
        }
        let flat = doc.vectors.concat();
        let codebook = build_parsed(&doc.header, flat, 1)?;
        Ok(CodebookFile {
            header: doc.header,
            codebook,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path, format: OutputFormat) -> Result<()> {
        std::fs::write(path, self.to_string_as(format)?)?;
        Ok(())
    }
}

fn build_parsed(header: &CodebookHeader, flat: Vec<f64>, line: usize) -> Result<Codebook> {
    if header.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse {
            line: 1,
            message: format!("unsupported schema_version {}", header.schema_version),
        });
    }
    Codebook::new(header.classes, header.n, flat, header.scheme)
        .map(|cb| cb.with_assignment_seed(header.assignment_seed))
        .map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })
}

fn parse_csv_body(header: CodebookHeader, text: &str) -> Result<CodebookFile> {
    let mut flat = Vec::with_capacity(header.classes * header.n);
    let mut rows = 0;
    for (idx, line) in text.lines().enumerate().skip(1) {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if rows == header.classes {
            return Err(Error::Parse {
                line: lineno,
                message: format!("more than K={} rows", header.classes),
            });
        }
        let before = flat.len();
        for cell in line.split(',') {
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("'{}' is not a number", cell.trim()),
            })?;
            flat.push(v);
        }
        if flat.len() - before != header.n {
            return Err(Error::Parse {
                line: lineno,
                message: format!("{} values, expected n={}", flat.len() - before, header.n),
            });
        }
        rows += 1;
    }
    if rows != header.classes {
        return Err(Error::Parse {
            line: text.lines().count() + 1,
            message: format!("{rows} rows, expected K={}", header.classes),
        });
    }
    let codebook = build_parsed(&header, flat, 1)?;
    Ok(CodebookFile { header, codebook })
}

/// Everything needed to build one codebook.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerateRequest {
    pub scheme: Scheme,
    pub classes: usize,
    pub dim: Option<usize>,
    pub seed: u64,
    pub assignment_seed: Option<u64>,
    pub optimizer: OptimizerConfig,
    pub allow_puncture: bool,
}

impl GenerateRequest {
    pub fn new(scheme: Scheme, classes: usize, dim: Option<usize>) -> Self {
        GenerateRequest {
            scheme,
            classes,
            dim,
            seed: 0,
            assignment_seed: None,
            optimizer: OptimizerConfig::default(),
            allow_puncture: false,
        }
    }
}

fn require_dim(scheme: Scheme, dim: Option<usize>) -> Result<usize> {
    dim.ok_or_else(|| Error::InvalidParameter(format!("scheme {scheme} needs --dim")))
}

fn unrealizable(scheme: Scheme, n: usize, hints: Vec<usize>, note: &str) -> Error {
    Error::Unrealizable {
        scheme: scheme.name().into(),
        n,
        hints,
        note: note.into(),
    }
}

/// Dimensions near `n` that `scheme` realizes without puncturing.
pub fn realizable_dims(scheme: Scheme, classes: usize, n: usize) -> Vec<usize> {
    let lengths: Vec<usize> = match scheme {
        Scheme::RmCode => (0..=MAX_RM_M).map(|m| 1usize << m).collect(),
        Scheme::BchCode => (2..=MAX_FIELD_DEGREE).map(|m| (1usize << m) - 1).collect(),
        Scheme::RsSimplex => (1..=MAX_FIELD_DEGREE / 2)
            .map(|m| 1usize << m)
            .filter(|&q| rs_dimension_for(q, classes).is_some())
            .map(|q| q * (q - 1))
            .collect(),
        Scheme::Simplex => vec![classes.saturating_sub(1)],
        Scheme::OneHot => vec![classes],
        _ => vec![n],
    };
    let below = lengths.iter().copied().filter(|&l| l <= n).max();
    let above = lengths.iter().copied().filter(|&l| l >= n).min();
    let mut out: Vec<usize> = below.into_iter().chain(above).collect();
    out.dedup();
    out
}

fn rs_dimension_for(q: usize, classes: usize) -> Option<usize> {
    (1..=q).find(|&k| (q as u128).checked_pow(k as u32).is_none_or(|c| c >= classes as u128))
}

/// Codes of a family at base length `2^m` (RM) or `2^m - 1` (BCH) with at
/// least `need` message bits, from largest to smallest minimum distance.
fn family_candidates(scheme: Scheme, m: u32, need: usize) -> Result<Vec<LinearCode>> {
    let out: Vec<LinearCode> = match scheme {
        Scheme::RmCode => (0..=m)
            .map(|r| reed_muller_code(r, m))
            .filter(|c| c.as_ref().map_or(true, |c| c.dimension() >= need))
            .collect::<Result<_>>()?,
        Scheme::BchCode => {
            let mut params = bch_parameters(m)?;
            params.retain(|&(_, k)| k >= need);
            params.sort_by_key(|p| std::cmp::Reverse(p.0));
            params
                .into_iter()
                .map(|(delta, _)| bch_code(m, delta))
                .collect::<Result<_>>()?
        }
        _ => unreachable!("only binary code families"),
    };
    if out.is_empty() {
        return Err(Error::Infeasible(format!(
            "no {scheme} code at base length for m={m} carries {need} message bits"
        )));
    }
    Ok(out)
}

/// Picks a binary code of exactly length `n` for `K` classes.
pub fn realize_binary_code(
    scheme: Scheme,
    classes: usize,
    n: usize,
    allow_puncture: bool,
) -> Result<LinearCode> {
    let need = message_bits(classes);
    let (base_of, max_m, min_m) = match scheme {
        Scheme::RmCode => ((|m: u32| 1usize << m) as fn(u32) -> usize, MAX_RM_M, 0),
        Scheme::BchCode => ((|m: u32| (1usize << m) - 1) as fn(u32) -> usize, MAX_FIELD_DEGREE, 2),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "{scheme} is not a binary code scheme"
            )))
        }
    };
    if need > n {
        return Err(Error::DimensionBelowMessageLength { n, k: need });
    }
    let exact = (min_m..=max_m).find(|&m| base_of(m) == n);
    if let Some(m) = exact {
        return family_candidates(scheme, m, need)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::Infeasible("no candidate code".into()));
    }
    let hints = realizable_dims(scheme, classes, n);
    if !allow_puncture {
        return Err(unrealizable(scheme, n, hints, " (or pass --allow-puncture)"));
    }
    if let Some(m) = (min_m..=max_m).find(|&m| base_of(m) + 1 == n) {
        let mut last = None;
        for code in family_candidates(scheme, m, need)? {
            match extend_with_parity(&code) {
                Ok(c) => return Ok(c),
                Err(e) => last = Some(e),
            }
        }
        return Err(last.unwrap_or_else(|| Error::Infeasible("no candidate code".into())));
    }
    let Some(m) = (min_m..=max_m).find(|&m| base_of(m) > n) else {
        return Err(unrealizable(scheme, n, hints, " (beyond the largest supported length)"));
    };
    let mut last = None;
    for code in family_candidates(scheme, m, need)? {
        match puncture_trailing(&code, base_of(m) - n) {
            Ok(c) if c.dimension() >= need => return Ok(c),
            Ok(_) => {}
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::Infeasible(format!("no punctured code of length {n}"))))
}

/// Picks `q` and `k_q` so that the composite code has length `n = q(q-1)`.
pub fn realize_rs_code(classes: usize, n: usize) -> Result<LinearCode> {
    let q = (1..=MAX_FIELD_DEGREE / 2)
        .map(|m| 1usize << m)
        .find(|&q| q * (q - 1) == n);
    let Some(q) = q else {
        return Err(unrealizable(
            Scheme::RsSimplex,
            n,
            realizable_dims(Scheme::RsSimplex, classes, n),
            " (n must equal q(q-1) for a power of two q)",
        ));
    };
    let Some(k_q) = rs_dimension_for(q, classes) else {
        return Err(Error::CodeTooSmall {
            codewords: (q as u128).saturating_pow(q as u32),
            classes,
        });
    };
    reed_solomon_code(q, k_q)
}

fn code_parameters(code: &LinearCode) -> Result<serde_json::Value> {
    Ok(json!({
        "code": code.family(),
        "code_length": code.length(),
        "code_dimension": code.dimension(),
        "field_order": code.field_order(),
        "d_min": code.d_min()?,
    }))
}

fn optimizer_parameters(cfg: &OptimizerConfig, classes: usize) -> serde_json::Value {
    json!({
        "loss": cfg.loss,
        "epochs": cfg.epochs,
        "learning_rate": cfg.learning_rate,
        "momentum": cfg.momentum,
        "t_start": cfg.t_start,
        "t_end": cfg.t_end.unwrap_or(classes as f64),
        "tangent_gradient": cfg.tangent_gradient,
    })
}

/// Builds the codebook described by `req` together with its file header.
pub fn cmd_generate(req: &GenerateRequest) -> Result<CodebookFile> {
    let k = req.classes;
    if k < 2 {
        return Err(Error::InvalidParameter(format!("need K >= 2, got {k}")));
    }
    let scheme = req.scheme;
    let mut seed = None;
    let mut assignment_seed = None;
    let (codebook, parameters, certificate) = match scheme {
        Scheme::OneHot => {
            let n = req.dim.unwrap_or(k);
            if n < k {
                return Err(unrealizable(scheme, n, vec![k], " (one-hot needs n >= K)"));
            }
            (onehot_codebook_in(k, n)?, json!({}), Some((0.0, "orthogonal")))
        }
        Scheme::Simplex => {
            let n = req.dim.unwrap_or(k - 1);
            if n != k - 1 {
                return Err(unrealizable(scheme, n, vec![k - 1], " (the simplex lives in K-1 dimensions)"));
            }
            (simplex_codebook(k)?, json!({}), Some((rankin_converse(k), "regular simplex")))
        }
        Scheme::Random => {
            let n = require_dim(scheme, req.dim)?;
            seed = Some(req.seed);
            (random_codebook(k, n, req.seed)?, json!({}), None)
        }
        Scheme::OptimizedLse | Scheme::OptimizedAvg => {
            let n = require_dim(scheme, req.dim)?;
            let cfg = OptimizerConfig {
                loss: if scheme == Scheme::OptimizedLse { LossKind::Lse } else { LossKind::Avg },
                seed: req.seed,
                ..req.optimizer.clone()
            };
            seed = Some(req.seed);
            let (cb, trace) = optimize_prototypes(k, n, &cfg)?;
            let mut params = optimizer_parameters(&cfg, k);
            params["best_epoch"] = json!(trace.best_epoch);
            (cb, params, None)
        }
        Scheme::RmCode | Scheme::BchCode => {
            let n = require_dim(scheme, req.dim)?;
            let code = realize_binary_code(scheme, k, n, req.allow_puncture)?;
            assignment_seed = req.assignment_seed;
            let bound = prop1_cosine_bound(&code)?;
            let cb = codebook_from_code(&code, k, req.assignment_seed)?;
            (cb, code_parameters(&code)?, Some((bound, "hamming distance")))
        }
        Scheme::RsSimplex => {
            let n = require_dim(scheme, req.dim)?;
            let code = realize_rs_code(k, n)?;
            let q = code.field_order();
            let k_q = code.dimension();
            assignment_seed = req.assignment_seed;
            let component = ComponentMap::hadamard_simplex(q)?;
            let cb = qary_codebook_with(&code, k, &component, req.assignment_seed)?;
            let mut params = code_parameters(&code)?;
            params["component"] = json!("simplex");
            (cb, params, Some((reed_solomon_simplex_bound(q, k_q), "euclidean component distance")))
        }
        Scheme::BinaryCode => {
            return Err(Error::InvalidParameter(
                "binary-code codebooks are built from a code in the library, not the CLI".into(),
            ))
        }
    };
    let header = CodebookHeader {
        schema_version: SCHEMA_VERSION,
        scheme,
        classes: k,
        n: codebook.dim(),
        seed,
        assignment_seed,
        parameters,
        certified_max_cosine_bound: certificate.map(|c| c.0),
        certificate: certificate.map(|c| c.1.to_string()),
    };
    Ok(CodebookFile { header, codebook })
}

/// One bounds report per dimension; fails if any `n < ceil(log2 K)`.
pub fn cmd_bounds(classes: usize, dims: &[usize]) -> Result<Vec<BoundsReport>> {
    dims.iter().map(|&n| bounds_report(classes, n)).collect()
}

#[derive(Serialize)]
struct BoundsCsvRow {
    #[serde(rename = "K")]
    classes: usize,
    n: usize,
    message_bits: usize,
    gv_dmin: usize,
    achievable_max_cosine: f64,
    onehot_reference: Option<f64>,
    tightened_achievable: f64,
    padded_achievable: f64,
    converse_min_of_max_cosine: f64,
}

pub fn bounds_to_csv(reports: &[BoundsReport]) -> Result<String> {
    let rows = reports.iter().map(|r| BoundsCsvRow {
        classes: r.classes,
        n: r.n,
        message_bits: r.message_bits,
        gv_dmin: r.gv_dmin,
        achievable_max_cosine: r.achievable_max_cosine,
        onehot_reference: r.onehot_reference,
        tightened_achievable: r.tightened_achievable,
        padded_achievable: r.padded_achievable,
        converse_min_of_max_cosine: r.converse_min_of_max_cosine,
    });
    write_csv(rows, &[
        "K",
        "n",
        "message_bits",
        "gv_dmin",
        "achievable_max_cosine",
        "onehot_reference",
        "tightened_achievable",
        "padded_achievable",
        "converse_min_of_max_cosine",
    ])
}

fn write_csv<T: Serialize>(rows: impl IntoIterator<Item = T>, header: &[&str]) -> Result<String> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Statistics of a codebook file.
pub fn cmd_stats(path: &Path, bins: usize) -> Result<SeparationStats> {
    let file = CodebookFile::read(path)?;
    Ok(separation_stats(&file.codebook, bins))
}

pub fn histogram_to_csv(histogram: &[HistogramBin]) -> Result<String> {
    write_csv(histogram, &["lower", "upper", "count"])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub scheme: String,
    #[serde(rename = "K")]
    pub classes: usize,
    pub n: usize,
    /// `ok`, `skipped`, or `error`.
    pub status: String,
    pub runs: usize,
    /// Mean over runs of each run's max cosine.
    pub max_cosine: Option<f64>,
    pub mean_cosine: Option<f64>,
    pub max_cosine_min: Option<f64>,
    pub max_cosine_max: Option<f64>,
    pub certified_bound: Option<f64>,
    pub gv_achievable: Option<f64>,
    pub rankin_converse: f64,
    pub wall_time_ms: f64,
    pub note: String,
}

pub const SWEEP_COLUMNS: [&str; 14] = [
    "scheme",
    "K",
    "n",
    "status",
    "runs",
    "max_cosine",
    "mean_cosine",
    "max_cosine_min",
    "max_cosine_max",
    "certified_bound",
    "gv_achievable",
    "rankin_converse",
    "wall_time_ms",
    "note",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRequest {
    pub schemes: Vec<Scheme>,
    pub classes: usize,
    pub dims: Vec<usize>,
    pub seeds: Vec<u64>,
    pub optimizer: OptimizerConfig,
    pub allow_puncture: bool,
}

fn is_stochastic(scheme: Scheme) -> bool {
    matches!(
        scheme,
        Scheme::Random | Scheme::OptimizedLse | Scheme::OptimizedAvg
    )
}

fn sweep_point(req: &SweepRequest, scheme: Scheme, n: usize) -> SweepRow {
    let start = Instant::now();
    let seeds: Vec<u64> = if is_stochastic(scheme) && !req.seeds.is_empty() {
        req.seeds.clone()
    } else {
        vec![req.seeds.first().copied().unwrap_or(0)]
    };
    let mut maxes = Vec::new();
    let mut means = Vec::new();
    let mut certified = None;
    let mut failure = None;
    for &seed in &seeds {
        let gen = GenerateRequest {
            scheme,
            classes: req.classes,
            dim: Some(n),
            seed,
            assignment_seed: None,
            optimizer: req.optimizer.clone(),
            allow_puncture: req.allow_puncture,
        };
        match cmd_generate(&gen) {
            Ok(file) => {
                let stats = separation_stats(&file.codebook, 1);
                maxes.push(stats.max_cosine);
                means.push(stats.mean_cosine);
                certified = file.header.certified_max_cosine_bound;
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let avg = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let (status, note) = match &failure {
        None => ("ok", String::new()),
        Some(e @ (Error::Unrealizable { .. } | Error::DimensionBelowMessageLength { .. })) => {
            ("skipped", e.to_string())
        }
        Some(e) => ("error", e.to_string()),
    };
    let ok = failure.is_none();
    SweepRow {
        scheme: scheme.name().into(),
        classes: req.classes,
        n,
        status: status.into(),
        runs: if ok { maxes.len() } else { 0 },
        max_cosine: if ok { avg(&maxes) } else { None },
        mean_cosine: if ok { avg(&means) } else { None },
        max_cosine_min: if ok { maxes.iter().copied().reduce(f64::min) } else { None },
        max_cosine_max: if ok { maxes.iter().copied().reduce(f64::max) } else { None },
        certified_bound: if ok { certified } else { None },
        gv_achievable: achievable_max_cosine(n, req.classes).ok(),
        rankin_converse: rankin_converse(req.classes),
        wall_time_ms,
        note,
    }
}

/// One row per `(scheme, n)`, sorted by scheme name then `n`. Failures are
/// recorded in the row status instead of aborting the sweep.
pub fn cmd_sweep(req: &SweepRequest) -> Result<Vec<SweepRow>> {
    if req.classes < 2 {
        return Err(Error::InvalidParameter(format!("need K >= 2, got {}", req.classes)));
    }
    let mut points: Vec<(Scheme, usize)> = req
        .schemes
        .iter()
        .flat_map(|&s| req.dims.iter().map(move |&n| (s, n)))
        .collect();
    points.sort_by(|a, b| a.0.name().cmp(b.0.name()).then(a.1.cmp(&b.1)));
    points.dedup();
    Ok(points
        .into_iter()
        .map(|(s, n)| sweep_point(req, s, n))
        .collect())
}

pub fn sweep_to_csv(rows: &[SweepRow]) -> Result<String> {
    write_csv(rows, &SWEEP_COLUMNS)
}

/// Parses `"16,32,64"` and inclusive ranges such as `"8..=12"` or `"8..=64:8"`
/// (with a step).
pub fn parse_dim_list(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("cannot parse dimension list '{text}'"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, rest)) = part.split_once("..=") {
            let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
            let lo: usize = lo.parse().map_err(|_| bad())?;
            let hi: usize = hi.parse().map_err(|_| bad())?;
            let step: usize = step.parse().map_err(|_| bad())?;
            if step == 0 || lo > hi {
                return Err(bad());
            }
            out.extend((lo..=hi).step_by(step));
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Parses a comma-separated scheme list; an empty string gives no schemes.
pub fn parse_scheme_list(text: &str) -> Result<Vec<Scheme>> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            let s: Scheme = p.parse()?;
            if CLI_SCHEMES.contains(&s) {
                Ok(s)
            } else {
                Err(Error::InvalidParameter(format!("scheme '{p}' is not available here")))
            }
        })
        .collect()
}

/// Writes `text` to `path`, or to stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Process exit code for an error: 2 for bad input, 3 for infeasible
/// constructions, 1 for I/O failures.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_infeasible() {
        3
    } else if matches!(err, Error::Io(_)) {
        1
    } else {
        2
    }
}
