//! Argument definitions and command implementations.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use posmap_core::{
    detect, grid, lemma21_build, linalg, make_family, make_state, map_positivity, sweep,
    thm31_build, thm41_build, BlockMatrix, CertifierConfig, CheckSet, LinearMapRep, MapFamilyKind, MapFamilySpec,
    PositivityVerdict, StateFamilyKind, StateFamilySpec, SweepTarget,
};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::files::{complex_pairs, MatrixFile, MatrixKind, Metadata, VectorFile};
use crate::sweepcsv;

#[derive(Debug, Parser)]
#[command(name = "posmap", version, about = "Positive maps, block-positive matrices and entanglement detection")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Seed for the positivity search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative tolerance for PSD and PPT decisions.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Random restarts of the positivity search.
    #[arg(long, global = true, default_value_t = 64)]
    pub restarts: usize,
}

impl GlobalOpts {
    pub fn certifier(&self) -> CertifierConfig {
        CertifierConfig {
            restarts: self.restarts,
            seed: self.seed,
            ..CertifierConfig::default()
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a state or the Choi matrix of a map family.
    Gen(GenArgs),
    /// Build a map from a block matrix.
    Build(BuildArgs),
    /// Report CP / positivity / TP / Hermiticity of a map.
    Check(CheckArgs),
    /// Apply id ⊗ Φ to a state and test the spectrum.
    Detect(DetectArgs),
    /// Evaluate checks over a parameter grid and write CSV.
    Sweep(SweepArgs),
    /// Inspect a map's Choi matrix.
    Choi(ChoiArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// `name=value`, repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Output file; the matrix file goes to standard output when omitted.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Lemma21,
    Thm31,
    Thm41,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long, value_enum)]
    pub method: Method,
    #[arg(long)]
    pub input: PathBuf,
    /// Vector file with a purification of the first reduced matrix (lemma21 only).
    #[arg(long)]
    pub purification: Option<PathBuf>,
    /// Output map file; embedded in the report when omitted.
    #[arg(short = 'o', long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub cp: bool,
    #[arg(long)]
    pub positive: bool,
    #[arg(long)]
    pub tp: bool,
    #[arg(long)]
    pub hermitian: bool,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub state: PathBuf,
    #[arg(long)]
    pub map: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Name of the swept parameter.
    #[arg(long)]
    pub param: String,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long)]
    pub step: f64,
    /// Comma-separated subset of cp, positive, ppt.
    #[arg(long, value_delimiter = ',', required = true)]
    pub check: Vec<SweepCheck>,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepCheck {
    Cp,
    Positive,
    Ppt,
}

#[derive(Debug, Args)]
pub struct ChoiArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Print the eigenvalues (descending).
    #[arg(long)]
    pub eigs: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let value: f64 = value.trim().parse().map_err(|_| format!("not a number: {value:?}"))?;
    Ok((name.trim().to_string(), value))
}

/// What a command prints on standard output.
#[derive(Debug)]
pub enum Output {
    Json(Value),
    /// Already formatted text (a matrix file or CSV).
    Text(String),
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(CliError::input("--tol must be positive"));
    }
    g.certifier().validate()?;
    match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Build(args) => cmd_build(args, g),
        Command::Check(args) => cmd_check(args, g),
        Command::Detect(args) => cmd_detect(args, g),
        Command::Sweep(args) => cmd_sweep(args, g),
        Command::Choi(args) => cmd_choi(args),
    }
}

enum Family {
    Map(MapFamilyKind),
    State(StateFamilyKind),
}

fn parse_family(name: &str) -> Result<Family, CliError> {
    if let Ok(kind) = name.parse::<MapFamilyKind>() {
        return Ok(Family::Map(kind));
    }
    if let Ok(kind) = name.parse::<StateFamilyKind>() {
        return Ok(Family::State(kind));
    }
    let maps: Vec<_> = MapFamilyKind::ALL.iter().map(|k| k.as_str()).collect();
    let states: Vec<_> = StateFamilyKind::ALL.iter().map(|k| k.as_str()).collect();
    Err(CliError::input(format!(
        "unknown family {name:?}; maps: {}; states: {}",
        maps.join(", "),
        states.join(", ")
    )))
}

fn check_param_names(expected: Option<&str>, params: &[(String, f64)]) -> Result<(), CliError> {
    for (name, _) in params {
        if Some(name.as_str()) != expected {
            return Err(CliError::input(match expected {
                Some(p) => format!("unknown parameter {name:?}; this family takes {p:?}"),
                None => format!("unknown parameter {name:?}; this family takes none"),
            }));
        }
    }
    Ok(())
}

fn write_or_embed(file: &MatrixFile, output: Option<&Path>) -> Result<Value, CliError> {
    match output {
        Some(path) => {
            file.write(path)?;
            Ok(json!(path.display().to_string()))
        }
        None => Ok(serde_json::to_value(file).expect("matrix files serialize")),
    }
}

fn cmd_gen(args: &GenArgs) -> Result<Output, CliError> {
    let params: BTreeMap<String, f64> = args.params.iter().cloned().collect();
    let (kind, block, family_name) = match parse_family(&args.family)? {
        Family::Map(kind) => {
            check_param_names(kind.param_name(), &args.params)?;
            let spec = MapFamilySpec {
                kind,
                dim: args.dim,
                params: params.clone(),
            };
            (MatrixKind::MapChoi, make_family(&spec)?.into_choi(), kind.as_str())
        }
        Family::State(kind) => {
            if matches!(kind, StateFamilyKind::ClassicalQuantum | StateFamilyKind::Product) {
                return Err(CliError::input(format!(
                    "family {kind} is built from component matrices and cannot be generated from parameters"
                )));
            }
            check_param_names(kind.param_name(), &args.params)?;
            let mut spec = StateFamilySpec::new(kind, args.dim);
            spec.params = params.clone();
            let tag = if kind == StateFamilyKind::Flip {
                MatrixKind::Block
            } else {
                MatrixKind::State
            };
            (tag, make_state(&spec)?, kind.as_str())
        }
    };
    let meta = Metadata {
        family: Some(family_name.to_string()),
        params,
        seed: None,
    };
    let file = MatrixFile::from_block(kind, &block, Some(meta));
    match &args.output {
        Some(path) => {
            file.write(path)?;
            Ok(Output::Json(json!({
                "written": path.display().to_string(),
                "family": family_name,
                "kind": file.kind,
                "m": file.m,
                "n": file.n,
            })))
        }
        None => Ok(Output::Text(serde_json::to_string(&file).expect("matrix files serialize"))),
    }
}

fn verdict_json(v: &PositivityVerdict) -> Value {
    json!({
        "verdict": v.verdict.as_str(),
        // a clean search is evidence, not proof
        "presumption": !v.is_violation(),
        "min_value": v.min_value,
        "witness_u": v.witness_u.as_ref().map(complex_pairs),
        "witness_v": v.witness_v.as_ref().map(complex_pairs),
        "restarts_run": v.restarts_run,
        "iterations_total": v.iterations_total,
        "monotone": v.monotone,
    })
}

fn read_block(path: &Path) -> Result<(MatrixFile, BlockMatrix), CliError> {
    let file = MatrixFile::read(path)?;
    let block = file.to_block()?;
    Ok((file, block))
}

fn cmd_build(args: &BuildArgs, g: &GlobalOpts) -> Result<Output, CliError> {
    let (_, a) = read_block(&args.input)?;
    if args.purification.is_some() && args.method != Method::Lemma21 {
        return Err(CliError::input("--purification applies to lemma21 only"));
    }
    let (map, mut report) = match args.method {
        Method::Lemma21 => {
            let x = match &args.purification {
                Some(path) => {
                    let file = VectorFile::read(path)?;
                    if file.m != a.m() {
                        return Err(CliError::input(format!(
                            "purification has m={}, matrix has m={}",
                            file.m,
                            a.m()
                        )));
                    }
                    Some(file.to_vector()?)
                }
                None => None,
            };
            let r = lemma21_build(&a, x.as_ref(), g.tol)?;
            let report = json!({
                "method": "lemma21",
                "reconstruction_error": r.reconstruction_error,
                "completion_indices": r.completion_indices,
                "cp": r.map.is_completely_positive(g.tol),
                "tp": r.map.is_trace_preserving(g.tol.max(1e-9) * r.map.choi().tol_scale()),
            });
            (r.map, report)
        }
        Method::Thm31 => {
            let r = thm31_build(&a, g.tol)?;
            let report = json!({
                "method": "thm31",
                "choi_min_eig": r.choi_min_eig,
                "cotranspose_choi_min_eig": r.cotranspose_choi_min_eig,
                "decomposable": r.cotranspose_choi_min_eig >= -g.tol * r.map.choi().tol_scale(),
            });
            (r.map, report)
        }
        Method::Thm41 => {
            let r = thm41_build(&a, &g.certifier())?;
            let report = json!({
                "method": "thm41",
                "diag_blocks_psd": r.diag_blocks_psd,
                "condition": verdict_json(&r.condition_report),
            });
            (r.map, report)
        }
    };
    let meta = Metadata {
        family: Some(format!("{:?}", args.method).to_lowercase()),
        params: BTreeMap::new(),
        seed: (args.method == Method::Thm41).then_some(g.seed),
    };
    let file = MatrixFile::from_block(MatrixKind::MapChoi, map.choi(), Some(meta));
    let key = if args.output.is_some() { "output" } else { "map" };
    report[key] = write_or_embed(&file, args.output.as_deref())?;
    Ok(Output::Json(report))
}

fn read_map(path: &Path) -> Result<(MatrixFile, LinearMapRep), CliError> {
    let (file, block) = read_block(path)?;
    if file.kind != MatrixKind::MapChoi {
        eprintln!("note: {} is not tagged map-choi; reading it as a Choi matrix", path.display());
    }
    Ok((file, LinearMapRep::from_choi(block)))
}

fn cmd_check(args: &CheckArgs, g: &GlobalOpts) -> Result<Output, CliError> {
    let (_, phi) = read_map(&args.input)?;
    let all = !(args.cp || args.positive || args.tp || args.hermitian);
    let mut out = serde_json::Map::new();
    let (m, n) = phi.choi().dims();
    out.insert("m".into(), json!(m));
    out.insert("n".into(), json!(n));
    let hermitian = phi.is_hermiticity_preserving(linalg::HERMITIAN_TOL);
    if all || args.hermitian {
        out.insert("hermitian".into(), json!(hermitian));
    }
    if all || args.tp {
        out.insert(
            "tp".into(),
            json!(phi.is_trace_preserving(g.tol * phi.choi().tol_scale())),
        );
    }
    if all || args.cp {
        let lmin = if hermitian { Some(phi.choi_min_eig()?) } else { None };
        out.insert("cp".into(), json!(hermitian && phi.is_completely_positive(g.tol)));
        out.insert("choi_min_eig".into(), json!(lmin));
    }
    if all || args.positive {
        if hermitian {
            let report = map_positivity(&phi, &g.certifier())?;
            out.insert("positive".into(), json!(report.verdict.verdict.as_str()));
            let mut detail = verdict_json(&report.verdict);
            detail["input_state"] = json!(report.witness_input.as_ref().map(complex_pairs));
            detail["output_min_eig"] = json!(report.output_min_eig);
            out.insert("positivity".into(), detail);
        } else {
            out.insert("positive".into(), json!("not-hermiticity-preserving"));
        }
    }
    Ok(Output::Json(Value::Object(out)))
}

fn cmd_detect(args: &DetectArgs, g: &GlobalOpts) -> Result<Output, CliError> {
    let (state_file, rho) = read_block(&args.state)?;
    let (map_file, phi) = read_map(&args.map)?;
    let stem = |p: &Path| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let report = detect(&phi, &rho, g.tol)?.labeled(map_file.label(&stem(&args.map)), state_file.label(&stem(&args.state)));
    Ok(Output::Json(json!({
        "min_eig": report.min_eig,
        "detected": report.detected,
        "map_id": report.map_id,
        "state_id": report.state_id,
    })))
}

fn cmd_sweep(args: &SweepArgs, g: &GlobalOpts) -> Result<Output, CliError> {
    let target = match parse_family(&args.family)? {
        Family::Map(kind) => SweepTarget::Map { kind, dim: args.dim },
        Family::State(kind) => SweepTarget::State { kind, dim: args.dim },
    };
    match target.param_name() {
        Some(name) if name == args.param => {}
        Some(name) => {
            return Err(CliError::input(format!(
                "family {} is swept over {name:?}, not {:?}",
                args.family, args.param
            )))
        }
        None => return Err(CliError::input(format!("family {} has no parameter", args.family))),
    }
    let checks = CheckSet {
        cp: args.check.contains(&SweepCheck::Cp),
        positive: args.check.contains(&SweepCheck::Positive),
        ppt: args.check.contains(&SweepCheck::Ppt),
    };
    let values = grid(args.from, args.to, args.step)?;
    let rows = sweep(&target, &values, checks, &g.certifier())?;
    match &args.csv {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            sweepcsv::write_rows(BufWriter::new(file), &rows)?;
            Ok(Output::Json(json!({
                "rows": rows.len(),
                "csv": path.display().to_string(),
            })))
        }
        None => {
            let mut buf = Vec::new();
            sweepcsv::write_rows(&mut buf, &rows)?;
            let text = String::from_utf8(buf).expect("csv is utf-8");
            Ok(Output::Text(text.trim_end().to_string()))
        }
    }
}

fn cmd_choi(args: &ChoiArgs) -> Result<Output, CliError> {
    let (_, phi) = read_map(&args.input)?;
    let choi = phi.choi();
    let eig = choi.eig()?;
    let mut out = json!({
        "m": choi.m(),
        "n": choi.n(),
        "min_eig": eig.min(),
        "max_eig": eig.max(),
        "trace": linalg::trace(choi.full()).re,
    });
    if args.eigs {
        out["eigenvalues"] = json!(eig.eigenvalues);
    }
    Ok(Output::Json(out))
}
