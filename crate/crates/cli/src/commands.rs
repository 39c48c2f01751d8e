use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use sac_core::flow::{radius_sde, smbmc_run, Drive, FlowParams, SdeConfig, Sign, SmbmcConfig};
use sac_core::harness::{
    lemma2_experiment, report_emit, run_report, shared_path, sharp_interface_on_path, simulate,
    subsuper_experiment, ExperimentConfig, GeometryKind,
};
use sac_core::noise::{
    empirical_correlation, empirical_variance, pathwise_sup, validate_gamma, EnsembleSpec, MollifiedNoise,
    MollifierKernel,
};
use sac_core::wave::{c0, solve_wave, SolveOptions};
use sac_core::{Error, Result};

use crate::args::{ExperimentArgs, FlowArgs, FlowMode, GeometryArg, NoiseStatsArgs, SignArg, SimulateArgs, Switch, WaveArgs};

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

fn manifest(command: &str, seed: Option<u64>, config: Value, outputs: &[PathBuf]) -> String {
    let outputs: Vec<String> = outputs.iter().map(|p| p.display().to_string()).collect();
    let m = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": config,
        "outputs": outputs,
    });
    serde_json::to_string_pretty(&m).expect("manifest serializes") + "\n"
}

/// Writes `csv` to `out` with a manifest beside it, or to stdout.
fn emit_csv(command: &str, out: Option<&Path>, csv: &str, seed: Option<u64>, config: Value) -> Result<()> {
    match out {
        Some(path) => {
            write_file(path, csv)?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(command);
            let m = path.with_file_name(format!("{stem}.manifest.json"));
            write_file(&m, &manifest(command, seed, config, &[path.to_path_buf()]))
        }
        None => match std::io::stdout().lock().write_all(csv.as_bytes()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
            _ => Ok(()),
        },
    }
}

pub fn noise_stats(args: &NoiseStatsArgs) -> Result<()> {
    validate_gamma(args.gamma)?;
    if args.eps.is_empty() || args.eps.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::InvalidParameter { name: "eps", reason: "need values in (0, 1)".into() });
    }
    if !(args.t_end > 0.0) {
        return Err(Error::InvalidParameter { name: "T", reason: "must be positive".into() });
    }
    let mut csv = String::from("eps,gamma,var_emp,var_theory,corr_lag,sup_xi,sup_xidot\n");
    for &eps in &args.eps {
        let h = eps.powf(args.gamma);
        let spec = EnsembleSpec { epsilon: eps, gamma: args.gamma, base_seed: args.seed, n_paths: args.samples, probes_per_path: 4 };
        let var_emp = empirical_variance(&spec)?;
        let var_theory = MollifierKernel::standard().l2_norm_sq() / h;
        let corr = empirical_correlation(&spec, 3.0 * h)?;
        let path = shared_path(args.seed, &[eps], args.gamma, args.t_end)?;
        let (sup_xi, sup_xidot) = pathwise_sup(&MollifiedNoise::new(&path, eps, args.gamma)?, args.t_end)?;
        writeln!(csv, "{eps},{},{var_emp},{var_theory},{corr},{sup_xi},{sup_xidot}", args.gamma).unwrap();
    }
    let config = json!({"seed": args.seed, "eps": args.eps, "gamma": args.gamma, "T": args.t_end, "samples": args.samples});
    emit_csv("noise-stats", args.out.as_deref(), &csv, Some(args.seed), config)
}

pub fn wave(args: &WaveArgs) -> Result<()> {
    let opts = SolveOptions { half_length: args.half_length, nodes: args.n, ..SolveOptions::default() };
    let w = solve_wave(args.delta, &opts)?;
    let mut csv = format!("# c={},m_minus={},m_plus={}\nx,m\n", w.speed(), w.m_minus(), w.m_plus());
    for (x, m) in w.grid().zip(w.values()) {
        writeln!(csv, "{x},{m}").unwrap();
    }
    let config = json!({"delta": args.delta, "L": args.half_length, "n": args.n});
    emit_csv("wave", args.out.as_deref(), &csv, None, config)
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<()> {
    let cfg = ExperimentConfig {
        seed: args.seed,
        gamma: args.gamma,
        eps: vec![args.eps],
        t_end: args.t_end,
        r0: args.r0,
        dim: args.dim,
        geometry: geometry_kind(args.geometry),
        noise: args.noise == Switch::On,
        ..ExperimentConfig::default()
    };
    cfg.validate()?;
    let path = shared_path(cfg.seed, &cfg.eps, cfg.gamma, cfg.t_end)?;
    let sim = simulate(&path, &cfg, args.eps)?;
    let mut csv = String::from("t,radius,l2_dist,xi_value\n");
    for s in &sim.samples {
        writeln!(csv, "{},{},{},{}", s.t, s.radius, s.l2_dist, s.xi).unwrap();
    }
    let config = serde_json::to_value(&cfg).expect("config serializes");
    emit_csv("simulate", args.out.as_deref(), &csv, Some(cfg.seed), config)
}

pub fn flow(args: &FlowArgs) -> Result<()> {
    validate_gamma(args.gamma)?;
    let sign = match args.sign {
        SignArg::Plus => Sign::Plus,
        SignArg::Minus => Sign::Minus,
        SignArg::Zero => Sign::Zero,
    };
    let drive = match args.mode {
        FlowMode::Front => Drive::EpsFront { eps: args.eps, gamma: args.gamma, beta: args.beta, sign },
        _ => Drive::LimitSde,
    };
    let params = FlowParams::new(args.n, drive)?;
    if !(args.beta > 1.0 && args.beta < 2.0) {
        return Err(Error::InvalidParameter { name: "beta", reason: format!("requires 1 < beta < 2, got {}", args.beta) });
    }
    let path = shared_path(args.seed, &[args.eps], args.gamma, args.t_end)?;
    let floor = 5.0 * args.eps;
    let trace = match args.mode {
        FlowMode::Sde | FlowMode::Front => {
            let cfg = SdeConfig { dt: path.dt().min(1e-4), t_end: args.t_end, floor };
            radius_sde(args.r0, &path, &params, &cfg)?
        }
        FlowMode::Smbmc => {
            let cfg = SmbmcConfig { dim: args.n, dr: args.eps / 8.0, outer_limit: 2.0, floor, rebuild: true };
            let every = ((args.t_end / cfg.dt()) as usize / 200).max(1);
            let c0 = c0();
            smbmc_run(args.r0, |t| Ok(c0 * path.value_at(t)), &cfg, args.t_end, every, |_, _| Ok(()))?.1
        }
    };
    let mut csv = String::from("t,radius,forcing\n");
    for k in 0..trace.len() {
        writeln!(csv, "{},{},{}", trace.times[k], trace.radii[k], trace.xi[k]).unwrap();
    }
    let mode = match args.mode {
        FlowMode::Sde => "sde",
        FlowMode::Smbmc => "smbmc",
        FlowMode::Front => "front",
    };
    let config = json!({
        "mode": mode, "eps": args.eps, "gamma": args.gamma, "beta": args.beta, "sign": sign.value(),
        "n": args.n, "R0": args.r0, "T": args.t_end, "seed": args.seed,
    });
    emit_csv("flow", args.out.as_deref(), &csv, Some(args.seed), config)
}

fn geometry_kind(g: GeometryArg) -> GeometryKind {
    match g {
        GeometryArg::Radial => GeometryKind::Radial,
        GeometryArg::Rect2d => GeometryKind::Rect2d,
    }
}

/// `--config` (or defaults) with flag overrides, validated.
pub fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.gamma {
        cfg.gamma = v;
    }
    if let Some(v) = args.beta {
        cfg.beta = v;
    }
    if let Some(v) = args.a {
        cfg.a = v;
    }
    if args.c1.is_some() {
        cfg.c1 = args.c1;
    }
    if args.n_curv.is_some() {
        cfg.n_curv = args.n_curv;
    }
    if let Some(v) = &args.eps {
        cfg.eps = v.clone();
    }
    if let Some(v) = args.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = args.r0 {
        cfg.r0 = v;
    }
    if let Some(v) = args.dim {
        cfg.dim = v;
    }
    if let Some(v) = args.geometry {
        cfg.geometry = geometry_kind(v);
    }
    if let Some(v) = args.noise {
        cfg.noise = v == Switch::On;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn finish_experiment(command: &str, dir: &Path, cfg: &ExperimentConfig, outputs: &[PathBuf]) -> Result<()> {
    let mut config = serde_json::to_value(cfg).expect("config serializes");
    config["hash"] = json!(cfg.hash());
    write_file(&dir.join(format!("{command}.manifest.json")), &manifest(command, Some(cfg.seed), config, outputs))
}

pub fn compare(args: &ExperimentArgs) -> Result<()> {
    let cfg = experiment_config(args)?;
    let path = shared_path(cfg.seed, &cfg.eps, cfg.gamma, cfg.t_end)?;
    let rows = sharp_interface_on_path(&path, &cfg)?;
    let mut csv = String::from("eps,sup_radius_gap,sup_l2_dist,tau,samples\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{},{}", r.eps, r.sup_radius_gap, r.sup_l2_dist, r.tau, r.samples).unwrap();
    }
    let mut traces = String::from("eps,t,radius,radius_sde,l2_dist,xi\n");
    for r in &rows {
        for s in &r.trace {
            writeln!(traces, "{},{},{},{},{},{}", r.eps, s.t, s.radius, s.radius_sde, s.l2_dist, s.xi).unwrap();
        }
    }
    let out = [args.out_dir.join("compare.csv"), args.out_dir.join("compare_traces.csv")];
    write_file(&out[0], &csv)?;
    write_file(&out[1], &traces)?;
    finish_experiment("compare", &args.out_dir, &cfg, &out)
}

pub fn lemma2(args: &ExperimentArgs) -> Result<()> {
    let cfg = experiment_config(args)?;
    let rows = lemma2_experiment(&cfg)?;
    let mut csv = String::from("eps,sign,sup_dist,holder_dist\n");
    for r in &rows {
        writeln!(csv, "{},{},{},{}", r.eps, r.sign, r.sup_dist, r.holder_dist).unwrap();
    }
    let out = [args.out_dir.join("lemma2.csv")];
    write_file(&out[0], &csv)?;
    finish_experiment("lemma2", &args.out_dir, &cfg, &out)
}

pub fn sandwich(args: &ExperimentArgs) -> Result<()> {
    let cfg = experiment_config(args)?;
    let rows = subsuper_experiment(&cfg)?;
    let mut csv = String::from("eps,margin_plus,margin_minus,initial_margin_plus,initial_margin_minus,samples,t_last\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.eps, r.margin_plus, r.margin_minus, r.initial_margin_plus, r.initial_margin_minus, r.samples, r.t_last
        )
        .unwrap();
    }
    let out = [args.out_dir.join("sandwich.csv")];
    write_file(&out[0], &csv)?;
    finish_experiment("sandwich", &args.out_dir, &cfg, &out)
}

pub fn report(args: &ExperimentArgs) -> Result<()> {
    let cfg = experiment_config(args)?;
    let report = run_report(&cfg)?;
    let (csv, json) = report_emit(&report, &args.out_dir)?;
    for e in &report.errors {
        eprintln!("{}", json!({"warning": e}));
    }
    finish_experiment("report", &args.out_dir, &cfg, &[csv, json])
}
