//! `su2theta` — batch front-end for the triangle-plaquette workbench.
//!
//! Five subcommands cover the reproduction pipeline: `exact-sweep` (dense
//! spectra and correlators over a coupling grid), `vqe` (multi-start
//! variational sweeps), `correlator` (re-measuring the plaquette correlator
//! at previously optimized parameters), `transpile` (lowering and routing
//! circuits onto a chip), and `fit-evals` (scaling-law fits to measured
//! evaluation counts).
//!
//! Every knob resolves with the same precedence: command-line flag, then
//! the JSON file named by `--config`, then a built-in default. Commands
//! write machine-readable CSV plus a JSON manifest carrying the schema
//! version and full resolved configuration, so a run can be reproduced or
//! fed into a downstream command (`correlator` consumes `vqe` manifests).
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags, malformed
//! config, unknown ansatz), 2 for runtime failures (I/O, infeasible
//! routing, rejected post-selection, underdetermined fits).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use su2theta::ansatz::AnsatzSpec;
use su2theta::circuit::Circuit;
use su2theta::encoding::{embed_operator, REGISTER_J_MAX};
use su2theta::half::Half;
use su2theta::mitigate::{insert_inbulk_check, mitigated_energy, MitigationConfig, ReadoutPlan};
use su2theta::sim::NoiseSpec;
use su2theta::theta::{enumerate_basis, exact_sweep, h_magnetic_plaquette, lambda_grid, solve, Pair};
use su2theta::transpile::{decompose_to_native, transpile, CouplingMap};
use su2theta::vqe::{fit_eval_scaling, sweep, Mode, OptimizerConfig, RunOptions};

// ---------------------------------------------------------------------------
// Failure handling: usage problems exit 1, runtime problems exit 2.

enum Failure {
    Usage(String),
    Runtime(String),
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn read_file(p: &Path) -> Result<String, Failure> {
    fs::read_to_string(p).map_err(|e| Failure::Runtime(format!("cannot read {}: {e}", p.display())))
}

fn write_file(p: &Path, text: &str) -> Result<(), Failure> {
    fs::write(p, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display())))
}

// ---------------------------------------------------------------------------
// Shared plumbing.

/// Resolves one knob: explicit flag beats config file beats default.
fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// Loads `--config` as JSON; a missing flag yields the all-`None` default.
/// Unknown keys are rejected so typos fail loudly instead of silently
/// falling back to defaults.
fn load_config<T: DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T, Failure> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| usage(format!("config {}: {e}", p.display())))
        }
    }
}

/// Manifest path: explicit flag, else the CSV path with a `.json`
/// extension (guarded so it never collides with the data file itself).
fn manifest_path(out: &Path, explicit: Option<PathBuf>) -> PathBuf {
    if let Some(p) = explicit {
        return p;
    }
    let p = out.with_extension("json");
    if p == out {
        out.with_extension("manifest.json")
    } else {
        p
    }
}

fn write_manifest(path: &Path, value: &serde_json::Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).map_err(runtime)?;
    text.push('\n');
    write_file(path, &text)
}

/// `square17` selects the built-in 17-node chip; anything else is read as
/// a JSON coupling map.
fn load_chip(name: &str) -> Result<CouplingMap, Failure> {
    if name == "square17" {
        return Ok(CouplingMap::square17());
    }
    let text = read_file(Path::new(name))?;
    CouplingMap::from_json(&text).map_err(|e| Failure::Runtime(format!("chip {name}: {e}")))
}

fn parse_half_list(s: &str) -> Result<Vec<Half>, Failure> {
    s.split(',').map(|t| t.trim().parse::<Half>().map_err(Failure::Usage)).collect()
}

fn parse_pair(s: &str) -> Result<Pair, Failure> {
    match s {
        "12" => Ok(Pair::P12),
        "13" => Ok(Pair::P13),
        "23" => Ok(Pair::P23),
        other => Err(usage(format!("unknown pair `{other}` (expected 12, 13, or 23)"))),
    }
}

fn grid_points(n: usize) -> Result<Vec<f64>, Failure> {
    if n < 2 {
        return Err(usage(format!("grid needs at least 2 points, got {n}")));
    }
    Ok(lambda_grid(n))
}

fn noise_spec(p2: f64, p1: f64, readout: f64) -> Result<NoiseSpec, Failure> {
    NoiseSpec::new(p2, p1)
        .and_then(|n| n.with_readout(readout))
        .map_err(|e| usage(e.to_string()))
}

// ---------------------------------------------------------------------------
// Command-line definition.

#[derive(Parser)]
#[command(
    name = "su2theta",
    version,
    about = "Spin-network diagonalization and variational workbench for an SU(2) plaquette model"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact spectra, plaquette correlator, and cutoff bands over a coupling grid.
    ExactSweep(ExactSweepArgs),
    /// Multi-start variational ground-state sweep over a coupling grid.
    Vqe(VqeArgs),
    /// Re-measure the plaquette correlator at parameters from a vqe manifest.
    Correlator(CorrelatorArgs),
    /// Lower a circuit to the native gate set and route it onto a chip.
    Transpile(TranspileArgs),
    /// Fit power and exponential scaling laws to a two-column table.
    FitEvals(FitEvalsArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::ExactSweep(a) => run_exact_sweep(a),
        Cmd::Vqe(a) => run_vqe(a),
        Cmd::Correlator(a) => run_correlator(a),
        Cmd::Transpile(a) => run_transpile(a),
        Cmd::FitEvals(a) => run_fit_evals(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

// ---------------------------------------------------------------------------
// exact-sweep

pub const EXACT_CSV_HEADER: &str = "lambda,j_max,E0,E1,gap,c_P,band_width";

#[derive(Args)]
struct ExactSweepArgs {
    /// JSON config file supplying any flag not given on the command line.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of coupling points on [0, 1].
    #[arg(long)]
    grid: Option<usize>,
    /// Comma-separated spin cutoffs, e.g. "0,1/2,1,3/2".
    #[arg(long, value_name = "LIST")]
    j_max: Option<String>,
    /// Convergence cutoff the band widths are measured against.
    #[arg(long)]
    j_conv: Option<String>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON manifest path (defaults to the CSV path with .json).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExactSweepFile {
    grid: Option<usize>,
    j_max: Option<String>,
    j_conv: Option<String>,
    out: Option<PathBuf>,
    manifest: Option<PathBuf>,
}

fn run_exact_sweep(a: ExactSweepArgs) -> Result<(), Failure> {
    let f: ExactSweepFile = load_config(&a.config)?;
    let n = pick(a.grid, f.grid, 21);
    let j_max_list = parse_half_list(&pick(a.j_max, f.j_max, "0,1/2,1,3/2".into()))?;
    let j_conv: Half = pick(a.j_conv, f.j_conv, "4".into()).parse().map_err(Failure::Usage)?;
    let out = pick(a.out, f.out, PathBuf::from("exact_sweep.csv"));
    let manifest = manifest_path(&out, a.manifest.or(f.manifest));

    if j_max_list.is_empty() {
        return Err(usage("cutoff list is empty"));
    }
    let grid = grid_points(n)?;
    let rows = exact_sweep(&j_max_list, &grid, j_conv).map_err(runtime)?;

    let mut csv = String::from(EXACT_CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.lambda, r.j_max, r.e0, r.e1, r.gap, r.c_p, r.band_width
        ));
    }
    write_file(&out, &csv)?;

    write_manifest(
        &manifest,
        &json!({
            "schema": "exact-sweep/v1",
            "grid_points": n,
            "j_max": j_max_list.iter().map(|j| j.to_string()).collect::<Vec<_>>(),
            "j_conv": j_conv.to_string(),
            "rows": rows.len(),
            "csv": out,
        }),
    )?;
    println!(
        "wrote {} rows to {} ({} cutoffs x {} couplings)",
        rows.len(),
        out.display(),
        j_max_list.len(),
        n
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// vqe

#[derive(Args)]
struct VqeArgs {
    /// JSON config file supplying any flag not given on the command line.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ansatz id: ssp2, ssp3, ssp4, hea18, hea24, or hea30.
    #[arg(long)]
    ansatz: Option<String>,
    /// Number of coupling points on [0, 1].
    #[arg(long)]
    grid: Option<usize>,
    /// Objective mode: ideal, sampled, or noisy.
    #[arg(long)]
    mode: Option<String>,
    /// Samples per objective evaluation (sampled and noisy modes).
    #[arg(long)]
    shots: Option<u64>,
    /// Two-qubit depolarizing probability (noisy mode).
    #[arg(long)]
    p2: Option<f64>,
    /// One-qubit depolarizing probability (noisy mode).
    #[arg(long)]
    p1: Option<f64>,
    /// Readout bit-flip probability (noisy mode).
    #[arg(long)]
    readout_error: Option<f64>,
    /// Independent random starts per coupling point.
    #[arg(long)]
    candidates: Option<usize>,
    /// Scale factor on the reference candidate schedule (100/200/400).
    #[arg(long)]
    candidate_scale: Option<f64>,
    /// Objective-evaluation cap per candidate.
    #[arg(long)]
    max_evals: Option<usize>,
    /// Relative sweep-improvement convergence threshold.
    #[arg(long)]
    value_tol: Option<f64>,
    /// Parameter-displacement convergence threshold.
    #[arg(long)]
    param_tol: Option<f64>,
    /// Base seed for candidate starts and shot noise.
    #[arg(long)]
    seed: Option<u64>,
    /// Post-select measured bitstrings on gauge consistency.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    gauge: Option<bool>,
    /// Apply the register-swap rotation projector at readout.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    rotation: Option<bool>,
    /// Insert the mid-circuit gauge check on a fresh ancilla.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    inbulk: Option<bool>,
    /// Chip to route onto: "square17" or a JSON coupling-map file.
    #[arg(long)]
    chip: Option<String>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON manifest path (defaults to the CSV path with .json).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct VqeFile {
    ansatz: Option<String>,
    grid: Option<usize>,
    mode: Option<String>,
    shots: Option<u64>,
    p2: Option<f64>,
    p1: Option<f64>,
    readout_error: Option<f64>,
    candidates: Option<usize>,
    candidate_scale: Option<f64>,
    max_evals: Option<usize>,
    value_tol: Option<f64>,
    param_tol: Option<f64>,
    seed: Option<u64>,
    gauge: Option<bool>,
    rotation: Option<bool>,
    inbulk: Option<bool>,
    chip: Option<String>,
    out: Option<PathBuf>,
    manifest: Option<PathBuf>,
}

fn run_vqe(a: VqeArgs) -> Result<(), Failure> {
    let f: VqeFile = load_config(&a.config)?;
    let ansatz_id = pick(a.ansatz, f.ansatz, "ssp2".into());
    let spec = AnsatzSpec::parse(&ansatz_id).map_err(|e| usage(e.to_string()))?;
    let grid = grid_points(pick(a.grid, f.grid, 21))?;

    let mode_name = pick(a.mode, f.mode, "ideal".into());
    let shots = pick(a.shots, f.shots, 1000);
    let mode = match mode_name.as_str() {
        "ideal" => Mode::Ideal,
        "sampled" => Mode::Sampled { shots },
        "noisy" => Mode::Noisy {
            noise: noise_spec(
                pick(a.p2, f.p2, NoiseSpec::DEFAULT_P2),
                pick(a.p1, f.p1, NoiseSpec::DEFAULT_P1),
                pick(a.readout_error, f.readout_error, 0.0),
            )?,
            shots,
        },
        other => {
            return Err(usage(format!(
                "unknown mode `{other}` (expected ideal, sampled, or noisy)"
            )))
        }
    };

    let scale = pick(a.candidate_scale, f.candidate_scale, 1.0);
    if !(scale > 0.0) {
        return Err(usage(format!("candidate scale must be positive, got {scale}")));
    }
    let reference = OptimizerConfig::published_candidates(&spec);
    let scaled = ((reference as f64 * scale).round() as usize).max(1);
    let candidates = pick(a.candidates, f.candidates, scaled);
    if candidates == 0 {
        return Err(usage("candidate count must be at least 1"));
    }

    let mut cfg = OptimizerConfig::for_mode(mode).with_candidates(candidates);
    cfg.seed = pick(a.seed, f.seed, cfg.seed);
    cfg.max_evals = pick(a.max_evals, f.max_evals, cfg.max_evals);
    cfg.value_tol = pick(a.value_tol, f.value_tol, cfg.value_tol);
    cfg.param_tol = pick(a.param_tol, f.param_tol, cfg.param_tol);

    let mitigation = MitigationConfig {
        gauge_postselect: pick(a.gauge, f.gauge, false),
        rotation_projector: pick(a.rotation, f.rotation, false),
        inbulk_verification: pick(a.inbulk, f.inbulk, false),
        ..MitigationConfig::none()
    };
    let chip_name = a.chip.or(f.chip);
    let chip = chip_name.as_deref().map(load_chip).transpose()?;
    let opts = RunOptions { mitigation, chip: chip.as_ref() };

    let out = pick(a.out, f.out, PathBuf::from("vqe.csv"));
    let manifest = manifest_path(&out, a.manifest.or(f.manifest));

    let result = sweep(spec, &grid, mode, &cfg, &opts).map_err(runtime)?;
    write_file(&out, &result.to_csv())?;
    write_manifest(
        &manifest,
        &json!({
            "schema": "vqe/v1",
            "ansatz": result.ansatz,
            "mode": mode,
            "optimizer": cfg,
            "mitigation": mitigation,
            "chip": chip_name,
            "csv": out,
            "f_bar": result.f_bar,
            "mean_m_eval": result.mean_m_eval(),
            "sweep": result,
        }),
    )?;
    println!(
        "ansatz={} rows={} f_bar={:.6} mean_M_eval={:.1} csv={} manifest={}",
        result.ansatz,
        result.runs.len(),
        result.f_bar,
        result.mean_m_eval(),
        out.display(),
        manifest.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// correlator

pub const CORRELATOR_CSV_HEADER: &str = "lambda,c_p,c_p_std,exact_c_p,acceptance_rate";

#[derive(Args)]
struct CorrelatorArgs {
    /// JSON config file supplying any flag not given on the command line.
    #[arg(long)]
    config: Option<PathBuf>,
    /// vqe manifest holding the optimized parameters per coupling.
    #[arg(long)]
    params: Option<PathBuf>,
    /// Edge pair carrying the plaquette: 12, 13, or 23.
    #[arg(long)]
    pair: Option<String>,
    /// Samples per readout round.
    #[arg(long)]
    shots: Option<u64>,
    /// Independent readout rounds per coupling point.
    #[arg(long)]
    readouts: Option<usize>,
    /// Seed for the readout rounds.
    #[arg(long)]
    seed: Option<u64>,
    /// Two-qubit depolarizing probability (0 = noiseless).
    #[arg(long)]
    p2: Option<f64>,
    /// One-qubit depolarizing probability (0 = noiseless).
    #[arg(long)]
    p1: Option<f64>,
    /// Readout bit-flip probability (0 = noiseless).
    #[arg(long)]
    readout_error: Option<f64>,
    /// Post-select measured bitstrings on gauge consistency.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    gauge: Option<bool>,
    /// Apply the register-swap rotation projector at readout.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    rotation: Option<bool>,
    /// Insert the mid-circuit gauge check on a fresh ancilla.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    inbulk: Option<bool>,
    /// Chip to route onto: "square17" or a JSON coupling-map file.
    #[arg(long)]
    chip: Option<String>,
    /// CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON manifest path (defaults to the CSV path with .json).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct CorrelatorFile {
    params: Option<PathBuf>,
    pair: Option<String>,
    shots: Option<u64>,
    readouts: Option<usize>,
    seed: Option<u64>,
    p2: Option<f64>,
    p1: Option<f64>,
    readout_error: Option<f64>,
    gauge: Option<bool>,
    rotation: Option<bool>,
    inbulk: Option<bool>,
    chip: Option<String>,
    out: Option<PathBuf>,
    manifest: Option<PathBuf>,
}

/// Extracts (ansatz id, per-coupling optimized parameters) from a vqe
/// manifest. Accepts either the full manifest (sweep under a "sweep" key)
/// or a bare sweep object.
fn read_params_manifest(path: &Path) -> Result<(String, Vec<(f64, Vec<f64>)>), Failure> {
    let text = read_file(path)?;
    let root: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Runtime(format!("manifest {}: {e}", path.display())))?;
    let sweep = root.get("sweep").unwrap_or(&root);
    let bad = |what: &str| Failure::Runtime(format!("manifest {}: missing {what}", path.display()));
    let ansatz = sweep
        .get("ansatz")
        .and_then(|v| v.as_str())
        .ok_or_else(|| bad("ansatz"))?
        .to_string();
    let runs = sweep.get("runs").and_then(|v| v.as_array()).ok_or_else(|| bad("runs"))?;
    let mut points = Vec::with_capacity(runs.len());
    for run in runs {
        let lambda = run.get("lambda").and_then(|v| v.as_f64()).ok_or_else(|| bad("lambda"))?;
        let params = run
            .get("params")
            .and_then(|v| v.as_array())
            .ok_or_else(|| bad("params"))?
            .iter()
            .map(|x| x.as_f64().ok_or_else(|| bad("numeric params")))
            .collect::<Result<Vec<f64>, Failure>>()?;
        points.push((lambda, params));
    }
    if points.is_empty() {
        return Err(Failure::Runtime(format!("manifest {}: no runs", path.display())));
    }
    Ok((ansatz, points))
}

fn run_correlator(a: CorrelatorArgs) -> Result<(), Failure> {
    let f: CorrelatorFile = load_config(&a.config)?;
    let params_path = a
        .params
        .or(f.params)
        .ok_or_else(|| usage("--params <vqe manifest> is required"))?;
    let pair_name = pick(a.pair, f.pair, "12".into());
    let pair = parse_pair(&pair_name)?;
    let plan = ReadoutPlan {
        readouts: pick(a.readouts, f.readouts, 200),
        shots: pick(a.shots, f.shots, 1000),
        seed: pick(a.seed, f.seed, 7),
    };
    let noise = noise_spec(
        pick(a.p2, f.p2, 0.0),
        pick(a.p1, f.p1, 0.0),
        pick(a.readout_error, f.readout_error, 0.0),
    )?;
    let (pa, pb, _) = pair.indices();
    let mitigation = MitigationConfig {
        gauge_postselect: pick(a.gauge, f.gauge, false),
        rotation_projector: pick(a.rotation, f.rotation, false),
        inbulk_verification: pick(a.inbulk, f.inbulk, false),
        projector_pair: (pa + 1, pb + 1),
    };
    let chip_name = a.chip.or(f.chip);
    let chip = chip_name.as_deref().map(load_chip).transpose()?;
    let out = pick(a.out, f.out, PathBuf::from("correlator.csv"));
    let manifest = manifest_path(&out, a.manifest.or(f.manifest));

    let (ansatz_id, points) = read_params_manifest(&params_path)?;
    let spec = AnsatzSpec::parse(&ansatz_id).map_err(runtime)?;
    let logical = spec.build().map_err(runtime)?;
    let executed = if mitigation.inbulk_verification {
        insert_inbulk_check(&logical, logical.len() / 2).0
    } else {
        logical
    };
    let prepared = if let Some(map) = chip.as_ref() {
        transpile(&executed, map, None).map_err(runtime)?.compact().circuit
    } else if !noise.is_ideal() {
        decompose_to_native(&executed)
    } else {
        executed
    };

    let basis = enumerate_basis(REGISTER_J_MAX);
    let mut observable = embed_operator(&basis, &h_magnetic_plaquette(&basis, pair)).map_err(runtime)?;
    observable.scale(0.5);

    let mut csv = String::from(CORRELATOR_CSV_HEADER);
    csv.push('\n');
    let mut manifest_rows = Vec::with_capacity(points.len());
    for (lambda, theta) in &points {
        let coupling = su2theta::theta::Coupling::new(*lambda).map_err(runtime)?;
        let spectrum = solve(&basis, coupling);
        let (_, omega) = spectrum.ground_state();
        let exact_c_p = su2theta::theta::correlator(omega, &basis, pair).map_err(runtime)?;
        let measured =
            mitigated_energy(&prepared, theta, noise, &observable, exact_c_p, &mitigation, &plan)
                .map_err(runtime)?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            lambda, measured.median, measured.std_dev, exact_c_p, measured.mean_acceptance
        ));
        manifest_rows.push(json!({
            "lambda": lambda,
            "c_p": measured.median,
            "c_p_std": measured.std_dev,
            "exact_c_p": exact_c_p,
            "acceptance_rate": measured.mean_acceptance,
            "failed_rounds": measured.failed,
            "clipped_rounds": measured.clipped,
        }));
    }
    write_file(&out, &csv)?;
    write_manifest(
        &manifest,
        &json!({
            "schema": "correlator/v1",
            "source": params_path,
            "ansatz": ansatz_id,
            "pair": pair_name,
            "plan": { "readouts": plan.readouts, "shots": plan.shots, "seed": plan.seed },
            "noise": noise,
            "mitigation": mitigation,
            "chip": chip_name,
            "csv": out,
            "rows": manifest_rows,
        }),
    )?;
    println!("rows={} csv={} manifest={}", points.len(), out.display(), manifest.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// transpile

#[derive(Args)]
struct TranspileArgs {
    /// JSON config file supplying any flag not given on the command line.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ansatz id to build and route (exclusive with --circuit).
    #[arg(long)]
    ansatz: Option<String>,
    /// Circuit text file to route (exclusive with --ansatz).
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Chip to route onto: "square17" or a JSON coupling-map file.
    #[arg(long)]
    chip: Option<String>,
    /// Routed-circuit text output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON manifest path (defaults to the output path with .json).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct TranspileFile {
    ansatz: Option<String>,
    circuit: Option<PathBuf>,
    chip: Option<String>,
    out: Option<PathBuf>,
    manifest: Option<PathBuf>,
}

fn run_transpile(a: TranspileArgs) -> Result<(), Failure> {
    let f: TranspileFile = load_config(&a.config)?;
    let ansatz = a.ansatz.or(f.ansatz);
    let circuit_path = a.circuit.or(f.circuit);
    let chip_name = pick(a.chip, f.chip, "square17".into());
    let out = pick(a.out, f.out, PathBuf::from("routed.txt"));
    let manifest = manifest_path(&out, a.manifest.or(f.manifest));

    let (source, logical) = match (ansatz, circuit_path) {
        (Some(_), Some(_)) => {
            return Err(usage("give either --ansatz or --circuit, not both"));
        }
        (None, None) => {
            return Err(usage("one of --ansatz or --circuit is required"));
        }
        (Some(id), None) => {
            let spec = AnsatzSpec::parse(&id).map_err(|e| usage(e.to_string()))?;
            (id, spec.build().map_err(runtime)?)
        }
        (None, Some(p)) => {
            let c = Circuit::from_text(&read_file(&p)?).map_err(runtime)?;
            (p.display().to_string(), c)
        }
    };

    let map = load_chip(&chip_name)?;
    let routed = transpile(&logical, &map, None).map_err(runtime)?;
    let (n1, n2, _) = routed.circuit.gate_census();
    println!("1q={} 2q={} swaps={}", n1, n2, routed.swaps);

    write_file(&out, &routed.circuit.to_text())?;
    write_manifest(
        &manifest,
        &json!({
            "schema": "transpile/v1",
            "source": source,
            "chip": chip_name,
            "one_qubit": n1,
            "two_qubit": n2,
            "swaps": routed.swaps,
            "gates": routed.circuit.len(),
            "wires_used": routed.used_wires().len(),
            "chip_qubits": map.n_qubits(),
            "out": out,
        }),
    )?;
    Ok(())
}

// ---------------------------------------------------------------------------
// fit-evals

#[derive(Args)]
struct FitEvalsArgs {
    /// JSON config file supplying any flag not given on the command line.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Two-column CSV of (size, evaluation count); non-numeric lines skip.
    #[arg(long)]
    data: Option<PathBuf>,
    /// JSON output path for the fitted laws.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FitEvalsFile {
    data: Option<PathBuf>,
    out: Option<PathBuf>,
}

fn run_fit_evals(a: FitEvalsArgs) -> Result<(), Failure> {
    let f: FitEvalsFile = load_config(&a.config)?;
    let data = a.data.or(f.data).ok_or_else(|| usage("--data <csv> is required"))?;
    let out = pick(a.out, f.out, PathBuf::from("fit_evals.json"));

    let text = read_file(&data)?;
    let mut points = Vec::new();
    for line in text.lines() {
        let mut cols = line.split(',');
        if let (Some(x), Some(y)) = (cols.next(), cols.next()) {
            if let (Ok(x), Ok(y)) = (x.trim().parse::<f64>(), y.trim().parse::<f64>()) {
                points.push((x, y));
            }
        }
    }
    let fit = fit_eval_scaling(&points).map_err(runtime)?;
    let better = if fit.power_rms <= fit.exp_rms { "power" } else { "exponential" };
    println!("power:       M = {:.6} * x^{:.6}  (log-rms {:.6})", fit.power_a, fit.power_b, fit.power_rms);
    println!("exponential: M = {:.6} * exp({:.6} x)  (log-rms {:.6})", fit.exp_a, fit.exp_b, fit.exp_rms);
    println!("better fit: {better}");
    write_manifest(
        &out,
        &json!({
            "schema": "fit-evals/v1",
            "data": data,
            "fit": fit,
            "better": better,
        }),
    )?;
    Ok(())
}
