//! Command-line surface: run configuration, experiment drivers, CSV
//! output.
//!
//! Every run is deterministic given its configuration (including the
//! seed): rows are computed single-threaded, sorted on a fixed key and
//! written with Rust's shortest-roundtrip float formatting, so identical
//! configurations produce byte-identical CSV. Wall-clock timings break
//! that property, so the wall_time_ms column stays 0 unless --timings is
//! passed.

use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::helson_szego::{
    certificate_to_bound, hs_search, parse_certificate, serialize_certificate, verify_certificate,
};
use crate::multiplier::{
    basis_constant_section, power_norm, random_sign_patterns, sign_multiplier_norm, tail_gap,
    MultiplierSequence,
};
use crate::projection::{exponent_scan, riesz_norm_extrapolate, riesz_norm_section};
use crate::similarity::sandwich;
use crate::weights::{parse_sampled, QuadratureConfig, WeightSpec};

pub const CSV_HEADER: &str =
    "command,weight,alpha,param,n,quantity,value,certified_bound,cond_estimate,wall_time_ms,seed";

#[derive(Parser, Debug)]
#[command(
    name = "riesz-lab",
    about = "Numerical experiments on Riesz projection norms over weighted Hardy spaces",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Finite-section estimates of the Riesz projection norm.
    RieszNorm(RieszNormArgs),
    /// Search for an analytic certificate and write it to a file.
    HsCertificate(HsCertificateArgs),
    /// Re-measure a certificate file against its weight.
    VerifyCertificate(VerifyArgs),
    /// Multiplier power norms, tail gaps, basis constants, sign norms.
    PowerNorms(PowerNormsArgs),
    /// Exponent scans with similarity floors and sandwich legs.
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
struct WeightArgs {
    /// Weight family: constant, tan-alpha, abs-theta-alpha, step, sampled.
    #[arg(long)]
    weight: Option<String>,
    /// Family parameter in (0,1) for tan-alpha and abs-theta-alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Step levels, comma separated (step family).
    #[arg(long)]
    levels: Option<String>,
    /// Step breakpoints, comma separated, strictly increasing in (-pi,pi).
    #[arg(long)]
    breakpoints: Option<String>,
    /// Sample file for the sampled family: "theta value" per line.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Wrap the weight in a pointwise power.
    #[arg(long)]
    power: Option<f64>,
    /// Multiply the weight by a positive constant.
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key-value configuration file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Absolute tolerance for Fourier-coefficient quadrature.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for any randomized sweep (sign patterns); echoed in rows.
    #[arg(long)]
    seed: Option<u64>,
    /// Record real wall-clock times (breaks byte-reproducibility).
    #[arg(long, default_value_t = false)]
    timings: bool,
}

#[derive(Args, Debug)]
struct RieszNormArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Section sizes, comma separated, increasing.
    #[arg(long)]
    sections: Option<String>,
    /// Append the Aitken-extrapolated row (needs >= 3 sections).
    #[arg(long, default_value_t = false)]
    extrapolate: bool,
}

#[derive(Args, Debug)]
struct HsCertificateArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Certificate polynomial degree.
    #[arg(long)]
    degree: Option<usize>,
    /// Measurement grid size (even).
    #[arg(long)]
    grid: Option<usize>,
    /// Reweighting iterations.
    #[arg(long)]
    iters: Option<usize>,
    /// Where to write the certificate.
    #[arg(long)]
    cert_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Certificate file to verify.
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args, Debug)]
struct PowerNormsArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Section dimension M.
    #[arg(long)]
    dim: Option<usize>,
    /// Multiplier family (gauss).
    #[arg(long)]
    family: Option<String>,
    /// Gauss family decay parameter.
    #[arg(long)]
    c: Option<f64>,
    /// Powers n to evaluate, comma separated.
    #[arg(long)]
    powers: Option<String>,
    /// Tail-gap indices n, comma separated.
    #[arg(long)]
    tail_gaps: Option<String>,
    /// Number of seeded random sign patterns to maximize over.
    #[arg(long)]
    sign_patterns: Option<usize>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    weight: WeightArgs,
    #[command(flatten)]
    common: CommonArgs,
    /// Exponents a for the powered weights w^a, comma separated,
    /// increasing.
    #[arg(long)]
    exponents: Option<String>,
    /// Section size for the per-exponent projection norm.
    #[arg(long)]
    sections: Option<String>,
    /// Optional multiplier section dimension; adds sandwich rows.
    #[arg(long)]
    dim: Option<usize>,
    /// Gauss family decay parameter for the sandwich.
    #[arg(long)]
    c: Option<f64>,
}

/// One CSV row; fields mirror the header exactly.
#[derive(Debug, Clone)]
struct ResultRow {
    command: String,
    weight: String,
    alpha: Option<f64>,
    param: String,
    n: Option<f64>,
    quantity: &'static str,
    value: f64,
    certified_bound: Option<f64>,
    cond_estimate: Option<f64>,
    wall_time_ms: u128,
    seed: u64,
}

impl ResultRow {
    fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.command,
            self.weight,
            self.alpha.map(fmt_f64).unwrap_or_default(),
            self.param,
            self.n.map(fmt_f64).unwrap_or_default(),
            self.quantity,
            fmt_f64(self.value),
            self.certified_bound.map(fmt_f64).unwrap_or_default(),
            self.cond_estimate.map(fmt_f64).unwrap_or_default(),
            self.wall_time_ms,
            self.seed
        );
        s
    }
}

fn fmt_f64(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(|p| p.trim())
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse::<T>()
                .map_err(|_| Error::InvalidConfig(format!("bad {what} entry: {p:?}")))
        })
        .collect()
}

/// Flat key-value configuration file: "key value" per line, '#' comments.
/// Unknown keys are rejected. Values only fill in flags that were not
/// provided on the command line.
fn parse_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>> {
    const KNOWN: &[&str] = &[
        "weight",
        "alpha",
        "levels",
        "breakpoints",
        "file",
        "power",
        "scale",
        "sections",
        "dim",
        "degree",
        "grid",
        "iters",
        "family",
        "c",
        "powers",
        "tail-gaps",
        "sign-patterns",
        "exponents",
        "seed",
        "out",
        "tol",
        "cert-out",
    ];
    let text = std::fs::read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected 'key value'", lineno + 1)))?;
        if !KNOWN.contains(&key) {
            return Err(Error::InvalidConfig(format!(
                "line {}: unknown key {key:?}",
                lineno + 1
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

macro_rules! fill {
    ($target:expr, $map:expr, $key:literal, $parse:expr) => {
        if $target.is_none() {
            if let Some(v) = $map.get($key) {
                $target = Some($parse(v)?);
            }
        }
    };
}

fn parse_num<T: std::str::FromStr>(v: &String) -> Result<T> {
    v.parse()
        .map_err(|_| Error::InvalidConfig(format!("bad config value: {v:?}")))
}

fn parse_string(v: &String) -> Result<String> {
    Ok(v.clone())
}

fn parse_path(v: &String) -> Result<PathBuf> {
    Ok(PathBuf::from(v))
}

fn apply_config(weight: &mut WeightArgs, common: &mut CommonArgs) -> Result<()> {
    let Some(path) = &common.config else {
        return Ok(());
    };
    let map = parse_config_file(path)?;
    fill!(weight.weight, map, "weight", parse_string);
    fill!(weight.alpha, map, "alpha", parse_num::<f64>);
    fill!(weight.levels, map, "levels", parse_string);
    fill!(weight.breakpoints, map, "breakpoints", parse_string);
    fill!(weight.file, map, "file", parse_path);
    fill!(weight.power, map, "power", parse_num::<f64>);
    fill!(weight.scale, map, "scale", parse_num::<f64>);
    fill!(common.out, map, "out", parse_path);
    fill!(common.tol, map, "tol", parse_num::<f64>);
    fill!(common.seed, map, "seed", parse_num::<u64>);
    Ok(())
}

fn build_weight(args: &WeightArgs) -> Result<WeightSpec> {
    let family = args
        .weight
        .as_deref()
        .ok_or_else(|| Error::InvalidConfig("missing --weight".into()))?;
    let need_alpha = || {
        args.alpha
            .ok_or_else(|| Error::InvalidConfig(format!("--weight {family} needs --alpha")))
    };
    let mut w = match family {
        "constant" => WeightSpec::Constant(1.0),
        "tan-alpha" => WeightSpec::tan_alpha(need_alpha()?),
        "abs-theta-alpha" => WeightSpec::abs_theta_alpha(need_alpha()?),
        "step" => {
            let levels = parse_list::<f64>(
                args.levels
                    .as_deref()
                    .ok_or_else(|| Error::InvalidConfig("step weight needs --levels".into()))?,
                "level",
            )?;
            let breakpoints = match &args.breakpoints {
                Some(b) => parse_list::<f64>(b, "breakpoint")?,
                None => vec![],
            };
            WeightSpec::PiecewiseStep {
                levels,
                breakpoints,
            }
        }
        "sampled" => {
            let path = args
                .file
                .as_ref()
                .ok_or_else(|| Error::InvalidConfig("sampled weight needs --file".into()))?;
            parse_sampled(&std::fs::read_to_string(path)?)?
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown weight family {other:?}"
            )))
        }
    };
    if let Some(p) = args.power {
        w = WeightSpec::power_of(w, p);
    }
    if let Some(s) = args.scale {
        w = WeightSpec::scaled(w, s);
    }
    w.validate()?;
    Ok(w)
}

fn quad_config(common: &CommonArgs) -> QuadratureConfig {
    let mut cfg = QuadratureConfig::default();
    if let Some(t) = common.tol {
        cfg.abs_tol = t;
    }
    cfg
}

/// FNV-1a over the canonical config line, echoed to stderr so a row can be
/// traced back to its exact configuration.
fn config_hash(desc: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in desc.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

struct Emitter {
    rows: Vec<ResultRow>,
    command: String,
    weight_id: String,
    alpha: Option<f64>,
    seed: u64,
    timings: bool,
    started: Instant,
}

impl Emitter {
    fn new(command: &str, w: &WeightSpec, seed: u64, timings: bool) -> Self {
        Self {
            rows: Vec::new(),
            command: command.to_string(),
            weight_id: w.id(),
            alpha: w.alpha(),
            seed,
            timings,
            started: Instant::now(),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn push(
        &mut self,
        param: impl Into<String>,
        n: Option<f64>,
        quantity: &'static str,
        value: f64,
        certified_bound: Option<f64>,
        cond_estimate: Option<f64>,
    ) {
        let wall = if self.timings {
            self.started.elapsed().as_millis()
        } else {
            0
        };
        self.rows.push(ResultRow {
            command: self.command.clone(),
            weight: self.weight_id.clone(),
            alpha: self.alpha,
            param: param.into(),
            n,
            quantity,
            value,
            certified_bound,
            cond_estimate,
            wall_time_ms: wall,
            seed: self.seed,
        });
    }

    fn finish(mut self, out: Option<&PathBuf>) -> Result<()> {
        self.rows.sort_by(|a, b| {
            (&a.command, &a.weight, &a.param)
                .cmp(&(&b.command, &b.weight, &b.param))
                .then(
                    a.n.unwrap_or(-1.0)
                        .partial_cmp(&b.n.unwrap_or(-1.0))
                        .unwrap(),
                )
                .then(a.quantity.cmp(b.quantity))
        });
        let mut text = String::from(CSV_HEADER);
        text.push('\n');
        for row in &self.rows {
            text.push_str(&row.to_csv());
            text.push('\n');
        }
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

/// Known ceiling for the projection norm, when the critical exponent is
/// analytic: sec(pi / 2p).
fn known_floor(w: &WeightSpec) -> Option<f64> {
    w.critical_exponent().ok().map(|p| p.floor())
}

fn cmd_riesz_norm(args: RieszNormArgs) -> Result<()> {
    let mut weight_args = args.weight;
    let mut common = args.common;
    apply_config(&mut weight_args, &mut common)?;
    let w = build_weight(&weight_args)?;
    let sections = parse_list::<usize>(
        args.sections
            .as_deref()
            .ok_or_else(|| Error::InvalidConfig("missing --sections".into()))?,
        "section",
    )?;
    if sections.is_empty() || sections.windows(2).any(|p| p[0] >= p[1]) {
        return Err(Error::InvalidConfig(
            "sections must be nonempty and strictly increasing".into(),
        ));
    }
    let cfg = quad_config(&common);
    let seed = common.seed.unwrap_or(0);
    eprintln!(
        "# config {:016x}",
        config_hash(&format!("{weight_args:?}|{sections:?}|{:?}", common.tol))
    );
    let k = 2 * sections.last().unwrap();
    let ft = w.fourier_coeffs(k, &cfg)?;
    let bound = known_floor(&w);
    let mut em = Emitter::new("riesz-norm", &w, seed, common.timings);
    if args.extrapolate {
        let r = riesz_norm_extrapolate(&ft, &sections)?;
        for a in &r.raw {
            em.push("", Some(a.n as f64), "sec_phi", a.sec_phi, bound, Some(a.cond_estimate));
        }
        if let Some(acc) = r.accelerated_experimental {
            em.push("extrapolated", None, "sec_phi", acc, bound, None);
        }
    } else {
        for &n in &sections {
            let a = riesz_norm_section(&ft, n)?;
            em.push("", Some(n as f64), "sec_phi", a.sec_phi, bound, Some(a.cond_estimate));
        }
    }
    em.finish(common.out.as_ref())
}

fn cmd_hs_certificate(args: HsCertificateArgs) -> Result<()> {
    let mut weight_args = args.weight;
    let mut common = args.common;
    apply_config(&mut weight_args, &mut common)?;
    let w = build_weight(&weight_args)?;
    let degree = args.degree.unwrap_or(400);
    let grid = args.grid.unwrap_or(8192);
    let iters = args.iters.unwrap_or(240);
    let seed = common.seed.unwrap_or(0);
    eprintln!(
        "# config {:016x}",
        config_hash(&format!("{weight_args:?}|{degree}|{grid}|{iters}"))
    );
    let cert = hs_search(&w, degree, grid, iters)?;
    let bound = certificate_to_bound(&cert)?;
    if let Some(path) = &args.cert_out {
        std::fs::write(path, serialize_certificate(&cert))?;
    }
    let mut em = Emitter::new("hs-certificate", &w, seed, common.timings);
    em.push(
        format!("D={degree},M={grid}"),
        Some(degree as f64),
        "hs_ratio",
        cert.achieved_ratio,
        Some(bound),
        None,
    );
    em.finish(common.out.as_ref())
}

fn cmd_verify_certificate(args: VerifyArgs) -> Result<()> {
    let mut weight_args = args.weight;
    let mut common = args.common;
    apply_config(&mut weight_args, &mut common)?;
    let w = build_weight(&weight_args)?;
    let cert = parse_certificate(&std::fs::read_to_string(&args.cert)?)?;
    let measured = verify_certificate(&w, &cert)?;
    let seed = common.seed.unwrap_or(0);
    let mut em = Emitter::new("verify-certificate", &w, seed, common.timings);
    em.push(
        "verified",
        Some(cert.degree as f64),
        "hs_ratio",
        measured,
        certificate_to_bound(&cert).ok(),
        None,
    );
    em.finish(common.out.as_ref())
}

fn cmd_power_norms(args: PowerNormsArgs) -> Result<()> {
    let mut weight_args = args.weight;
    let mut common = args.common;
    apply_config(&mut weight_args, &mut common)?;
    let w = build_weight(&weight_args)?;
    let dim = args.dim.unwrap_or(128);
    let family = args.family.as_deref().unwrap_or("gauss");
    if family != "gauss" {
        return Err(Error::InvalidConfig(format!(
            "unknown multiplier family {family:?}"
        )));
    }
    let c = args.c.unwrap_or(1.0);
    let seq = MultiplierSequence::gauss(c, dim.max(2))?;
    let powers: Vec<f64> = match &args.powers {
        Some(p) => parse_list(p, "power")?,
        None => vec![0.0, 1.0, 12.0, 665.0],
    };
    let seed = common.seed.unwrap_or(0);
    let cfg = quad_config(&common);
    eprintln!(
        "# config {:016x}",
        config_hash(&format!("{weight_args:?}|{dim}|{c}|{powers:?}|{seed}"))
    );
    let ft = w.fourier_coeffs(2 * dim, &cfg)?;
    let floor = known_floor(&w);
    let mut em = Emitter::new("power-norms", &w, seed, common.timings);
    for &p in &powers {
        if p < 0.0 {
            return Err(Error::InvalidConfig("powers must be nonnegative".into()));
        }
        let v = power_norm(&seq, &ft, p, dim)?;
        em.push(format!("c={c}"), Some(p), "power_norm", v, floor, None);
    }
    let basis = basis_constant_section(&ft, dim)?;
    em.push(format!("c={c}"), Some(dim as f64), "basis_constant", basis, floor, None);
    if let Some(list) = &args.tail_gaps {
        let b = floor.filter(|f| f.is_finite()).unwrap_or(basis);
        for n in parse_list::<usize>(list, "tail index")? {
            let tg = tail_gap(&seq, &ft, n, dim, b)?;
            em.push(
                format!("c={c},N={}", fmt_f64(tg.power)),
                Some(n as f64),
                "tail_gap",
                tg.gap,
                Some(tg.analytic_bound),
                None,
            );
        }
    }
    if let Some(count) = args.sign_patterns {
        let mut max_norm: f64 = 0.0;
        for pattern in random_sign_patterns(count, dim, seed) {
            max_norm = max_norm.max(sign_multiplier_norm(&ft, &pattern)?);
        }
        em.push(
            format!("maxof{count}"),
            Some(dim as f64),
            "sign_norm",
            max_norm,
            None,
            None,
        );
    }
    em.finish(common.out.as_ref())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut weight_args = args.weight;
    let mut common = args.common;
    apply_config(&mut weight_args, &mut common)?;
    let w = build_weight(&weight_args)?;
    let exponents: Vec<f64> = match &args.exponents {
        Some(e) => parse_list(e, "exponent")?,
        None => vec![1.0],
    };
    let sections = match &args.sections {
        Some(s) => parse_list::<usize>(s, "section")?,
        None => vec![64],
    };
    let n = *sections
        .last()
        .ok_or_else(|| Error::InvalidConfig("missing --sections".into()))?;
    let cfg = quad_config(&common);
    let seed = common.seed.unwrap_or(0);
    eprintln!(
        "# config {:016x}",
        config_hash(&format!("{weight_args:?}|{exponents:?}|{n}|{:?}", args.dim))
    );
    let mut em = Emitter::new("sweep", &w, seed, common.timings);
    let rows = exponent_scan(&w, &exponents, n, &cfg)?;
    for row in rows {
        let powered = WeightSpec::power_of(w.clone(), row.exponent);
        let floor = known_floor(&powered);
        match row.outcome {
            Ok(a) => {
                em.push(
                    format!("a={}", fmt_f64(row.exponent)),
                    Some(n as f64),
                    "sec_phi",
                    a.sec_phi,
                    floor,
                    Some(a.cond_estimate),
                );
                if let Some(f) = floor {
                    em.push(
                        format!("a={}", fmt_f64(row.exponent)),
                        Some(n as f64),
                        "floor",
                        f,
                        None,
                        None,
                    );
                }
            }
            Err(e) => {
                eprintln!("# sweep row a={} failed: {e}", row.exponent);
            }
        }
    }
    if let Some(dim) = args.dim {
        let c = args.c.unwrap_or(1.0);
        let seq = MultiplierSequence::gauss(c, dim.max(2))?;
        for &a in &exponents {
            let powered = WeightSpec::power_of(w.clone(), a);
            match sandwich(&powered, &seq, dim, &cfg) {
                Ok(r) => {
                    let param = format!("a={}", fmt_f64(a));
                    em.push(param.clone(), Some(dim as f64), "lower", r.lower, None, None);
                    em.push(param.clone(), Some(dim as f64), "upper", r.upper, None, None);
                    em.push(param, Some(dim as f64), "floor", r.floor, None, None);
                }
                Err(e) => eprintln!("# sandwich a={a} failed: {e}"),
            }
        }
    }
    em.finish(common.out.as_ref())
}

/// Entry point: parses arguments, runs the experiment, maps errors to exit
/// codes (0 success, 1 numerical failure, 2 configuration rejection).
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RieszNorm(a) => cmd_riesz_norm(a),
        Command::HsCertificate(a) => cmd_hs_certificate(a),
        Command::VerifyCertificate(a) => cmd_verify_certificate(a),
        Command::PowerNorms(a) => cmd_power_norms(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
