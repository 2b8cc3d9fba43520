//! Command execution and report emission.
//!
//! Every run writes `<out>.csv` (versioned schema, plot-ready) and
//! `<out>.jsonl` (one structured record per line). Exit codes: 0 all pass,
//! 2 regime/admissibility refusals, 3 verification failures, 1 internal
//! errors.

use crate::config::{render_weight, Command, RunConfig};
use anyhow::{Context, Result};
use lorentz_hardy::characterize::{
    k_restricted, maximal_norm, MaximalSpec, MnormPath, RestrictedSpec, UProfile,
};
use lorentz_hardy::error::Error as CoreError;
use lorentz_hardy::norms::Params;
use lorentz_hardy::stepfn::Grid;
use lorentz_hardy::verify::{brute_force_k, equivalence_report};
use lorentz_hardy::weights::{check_admissibility, check_shape, ShapeKind, ShapeVerdict, Weight};
use serde_json::json;
use std::fs;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_REGIME: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

const CSV_VERSION: &str = "# lorentz-hardy csv v1";

struct Sink {
    csv: Vec<String>,
    jsonl: Vec<String>,
}

impl Sink {
    fn new(header: &str) -> Sink {
        Sink {
            csv: vec![CSV_VERSION.to_string(), header.to_string()],
            jsonl: Vec::new(),
        }
    }

    fn row(&mut self, csv: String, record: serde_json::Value) {
        self.csv.push(csv);
        self.jsonl.push(record.to_string());
    }

    fn write(&self, out: &str) -> Result<()> {
        fs::write(format!("{out}.csv"), self.csv.join("\n") + "\n")
            .with_context(|| format!("writing {out}.csv"))?;
        fs::write(format!("{out}.jsonl"), self.jsonl.join("\n") + "\n")
            .with_context(|| format!("writing {out}.jsonl"))?;
        Ok(())
    }
}

fn exit_code_for(err: &CoreError) -> i32 {
    match err {
        CoreError::Regime(_)
        | CoreError::UncoveredRegion(_)
        | CoreError::Admissibility(_)
        | CoreError::NonDegeneracy(_)
        | CoreError::Shape(_)
        | CoreError::Domain(_)
        | CoreError::Conjugate(_) => EXIT_REGIME,
        CoreError::Disagreement(_) => EXIT_VERIFY,
        _ => EXIT_INTERNAL,
    }
}

/// Grid from the config, capped by `LORENTZ_GRID_MAX_POINTS` when set.
fn build_grid(cfg: &RunConfig) -> Result<Grid> {
    let mut points = cfg.grid_points;
    if let Ok(cap) = std::env::var("LORENTZ_GRID_MAX_POINTS") {
        let cap: usize = cap
            .parse()
            .context("LORENTZ_GRID_MAX_POINTS must be an integer")?;
        points = points.min(cap.max(2));
    }
    Grid::new(cfg.grid_min, cfg.grid_max, points)
        .map_err(|e| anyhow::anyhow!("grid construction failed: {e}"))
}

fn restricted_spec(cfg: &RunConfig, grid: &Grid) -> std::result::Result<RestrictedSpec, CoreError> {
    let params = Params::new(cfg.p, cfg.m, cfg.q)?;
    let u = UProfile::Weight(cfg.u.clone().unwrap_or_else(Weight::one));
    RestrictedSpec::new(params, u, cfg.b.clone(), cfg.v.clone(), cfg.w.clone(), grid)
}

fn maximal_spec(cfg: &RunConfig) -> std::result::Result<MaximalSpec, CoreError> {
    let params = Params::with_maximal(cfg.p, cfg.m, cfg.q, cfg.alpha, cfg.r)?;
    let phi = cfg
        .phi
        .clone()
        .expect("validated: compute-mnorm carries phi");
    MaximalSpec::new(params, cfg.b.clone(), phi, cfg.v.clone(), cfg.w.clone())
}

pub fn run(cfg: &RunConfig) -> Result<i32> {
    let grid = build_grid(cfg)?;
    match cfg.command {
        Command::ComputeK => run_compute_k(cfg, &grid),
        Command::ComputeMnorm => run_compute_mnorm(cfg, &grid),
        Command::Verify => run_verify(cfg, &grid),
        Command::CheckWeights => run_check_weights(cfg, &grid),
        Command::Sweep => run_sweep(cfg, &grid),
    }
}

fn run_compute_k(cfg: &RunConfig, grid: &Grid) -> Result<i32> {
    let mut sink = Sink::new("regime,term,value");
    let code = match restricted_spec(cfg, grid).and_then(|spec| k_restricted(&spec, grid)) {
        Ok(rep) => {
            for (name, value) in &rep.terms {
                sink.row(
                    format!("{},{},{}", rep.regime, name, value),
                    json!({"kind": "term", "regime": rep.regime, "term": name, "value": value}),
                );
            }
            sink.row(
                format!("{},total,{}", rep.regime, rep.value),
                json!({"kind": "constant", "regime": rep.regime, "value": rep.value, "grid": rep.grid}),
            );
            EXIT_OK
        }
        Err(err) => {
            emit_error(&mut sink, &err);
            exit_code_for(&err)
        }
    };
    sink.write(&cfg.out)?;
    Ok(code)
}

fn emit_error(sink: &mut Sink, err: &CoreError) {
    sink.row(
        format!("error,,\"{err}\""),
        json!({"kind": "error", "message": err.to_string()}),
    );
}

fn run_compute_mnorm(cfg: &RunConfig, grid: &Grid) -> Result<i32> {
    let mut sink = Sink::new("regime,term,value");
    let code = match maximal_spec(cfg).and_then(|spec| {
        let direct = maximal_norm(&spec, MnormPath::Both, grid)?;
        let reduced = maximal_norm(&spec, MnormPath::Reduced, grid)?;
        Ok((direct, reduced))
    }) {
        Ok((direct, reduced)) => {
            for (name, value) in &direct.terms {
                sink.row(
                    format!("{},{},{}", direct.regime, name, value),
                    json!({"kind": "term", "regime": direct.regime, "term": name, "value": value}),
                );
            }
            sink.row(
                format!("{},direct,{}", direct.regime, direct.value),
                json!({"kind": "norm", "path": "direct", "regime": direct.regime, "value": direct.value}),
            );
            sink.row(
                format!("{},reduced,{}", reduced.regime, reduced.value),
                json!({"kind": "norm", "path": "reduced", "regime": reduced.regime, "value": reduced.value}),
            );
            EXIT_OK
        }
        Err(err) => {
            emit_error(&mut sink, &err);
            exit_code_for(&err)
        }
    };
    sink.write(&cfg.out)?;
    Ok(code)
}

fn run_verify(cfg: &RunConfig, grid: &Grid) -> Result<i32> {
    let mut sink = Sink::new("regime,formula,oracle,formula_over_oracle,oracle_over_formula,pass");
    let spec = match restricted_spec(cfg, grid) {
        Ok(spec) => spec,
        Err(err) => {
            emit_error(&mut sink, &err);
            sink.write(&cfg.out)?;
            return Ok(exit_code_for(&err));
        }
    };
    let code = match k_restricted(&spec, grid) {
        Ok(rep) => {
            let oracle = brute_force_k(&spec, cfg.n_samples, cfg.refine_steps, cfg.seed, grid);
            let eq = equivalence_report(rep.value, oracle.oracle_lower_bound, cfg.window);
            sink.row(
                format!(
                    "{},{},{},{},{},{}",
                    rep.regime,
                    eq.formula_value,
                    eq.oracle_lower_bound,
                    eq.formula_over_oracle,
                    eq.oracle_over_formula,
                    eq.pass
                ),
                json!({
                    "kind": "verify",
                    "regime": rep.regime,
                    "window": cfg.window,
                    "equivalence": eq,
                    "n_samples": oracle.n_samples,
                    "witness": oracle.best_witness,
                }),
            );
            if eq.pass {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(err) => {
            emit_error(&mut sink, &err);
            exit_code_for(&err)
        }
    };
    sink.write(&cfg.out)?;
    Ok(code)
}

fn run_check_weights(cfg: &RunConfig, grid: &Grid) -> Result<i32> {
    let mut sink = Sink::new("check,verdict,evidence");
    let mut failed = false;

    let adm = check_admissibility(&cfg.v, cfg.m, cfg.p);
    failed |= !adm.is_member();
    sink.row(
        format!("v admissible,{},", adm.is_member()),
        json!({"kind": "admissibility", "weight": render_weight(&cfg.v), "report": adm}),
    );
    for (cond, evidence) in &adm.diagnostics {
        sink.row(
            format!("\"{}\",,\"{}\"", cond, evidence),
            json!({"kind": "diagnostic", "condition": cond, "evidence": evidence}),
        );
    }

    let shape = |label: String, verdict: ShapeVerdict, sink: &mut Sink, failed: &mut bool| {
        *failed |= verdict == ShapeVerdict::Fails;
        sink.row(
            format!("\"{label}\",{verdict:?},"),
            json!({"kind": "shape", "check": label, "verdict": format!("{verdict:?}")}),
        );
    };
    shape(
        "b non-increasing".into(),
        if cfg.b.is_non_increasing() {
            ShapeVerdict::Holds
        } else {
            ShapeVerdict::Fails
        },
        &mut sink,
        &mut failed,
    );
    shape(
        "B doubling".into(),
        check_shape(&cfg.b, ShapeKind::Delta2),
        &mut sink,
        &mut failed,
    );
    shape(
        format!(
            "B/t^(alpha/r) quasi-increasing (alpha={}, r={})",
            cfg.alpha, cfg.r
        ),
        check_shape(
            &cfg.b,
            ShapeKind::BOverPower {
                alpha: cfg.alpha,
                r: cfg.r,
            },
        ),
        &mut sink,
        &mut failed,
    );
    if let Some(phi) = &cfg.phi {
        shape(
            "phi quasi-increasing".into(),
            check_shape(phi, ShapeKind::QuasiIncreasing),
            &mut sink,
            &mut failed,
        );
        shape(
            format!("phi in Q_r (r={})", cfg.r),
            check_shape(phi, ShapeKind::Qr(cfg.r)),
            &mut sink,
            &mut failed,
        );
    }
    let b_ok = cfg.b.cumulative_b(grid.t_min).is_ok() && cfg.b.cumulative_b(grid.t_max).is_ok();
    shape(
        "B positive finite on grid".into(),
        if b_ok {
            ShapeVerdict::Holds
        } else {
            ShapeVerdict::Fails
        },
        &mut sink,
        &mut failed,
    );

    sink.write(&cfg.out)?;
    Ok(if failed { EXIT_REGIME } else { EXIT_OK })
}

fn run_sweep(cfg: &RunConfig, grid: &Grid) -> Result<i32> {
    let param = cfg
        .sweep_param
        .as_deref()
        .expect("validated: sweep carries sweep_param");
    let steps = cfg.sweep_steps;
    let values: Vec<f64> = (0..steps)
        .map(|i| cfg.sweep_from + (cfg.sweep_to - cfg.sweep_from) * i as f64 / (steps - 1) as f64)
        .collect();

    // evaluate points in parallel, keep output order deterministic
    let mut results: Vec<Option<(f64, std::result::Result<(String, f64), CoreError>)>> =
        (0..steps).map(|_| None).collect();
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(4)
        .min(8);
    let chunk = steps.div_ceil(workers);
    std::thread::scope(|scope| {
        for (w_idx, slot_chunk) in results.chunks_mut(chunk).enumerate() {
            let values = &values;
            let cfg = &cfg;
            let grid = &grid;
            scope.spawn(move || {
                for (off, slot) in slot_chunk.iter_mut().enumerate() {
                    let i = w_idx * chunk + off;
                    let x = values[i];
                    let mut point = (*cfg).clone();
                    match param {
                        "p" => point.p = x,
                        "m" => point.m = x,
                        "q" => point.q = x,
                        "alpha" => point.alpha = x,
                        _ => unreachable!("validated sweep_param"),
                    }
                    let outcome = if point.phi.is_some() {
                        maximal_spec(&point)
                            .and_then(|spec| maximal_norm(&spec, MnormPath::Both, grid))
                            .map(|rep| (rep.regime, rep.value))
                    } else {
                        restricted_spec(&point, grid)
                            .and_then(|spec| k_restricted(&spec, grid))
                            .map(|rep| (rep.regime, rep.value))
                    };
                    *slot = Some((x, outcome));
                }
            });
        }
    });

    let mut sink = Sink::new(&format!("{param},value,regime,status"));
    let mut worst = EXIT_OK;
    for slot in results {
        let (x, outcome) = slot.expect("all sweep slots filled");
        match outcome {
            Ok((regime, value)) => sink.row(
                format!("{x},{value},{regime},ok"),
                json!({"kind": "sweep", "param": param, "value": x, "k": value, "regime": regime}),
            ),
            Err(err) => {
                sink.row(
                    format!("{x},,,\"{err}\""),
                    json!({"kind": "sweep-error", "param": param, "value": x, "message": err.to_string()}),
                );
                worst = worst.max(exit_code_for(&err));
            }
        }
    }
    sink.write(&cfg.out)?;
    Ok(worst)
}
