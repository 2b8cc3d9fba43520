//! Key-value run configuration.
//!
//! Grammar: one `key = value` per line; `#` starts a comment; weight
//! literals are piece lists `[(lo,coeff,pow,log),...]` with the first `lo`
//! equal to 0 and the last piece extending to infinity.

use anyhow::{bail, Context, Result};
use lorentz_hardy::weights::Weight;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Command {
    ComputeK,
    ComputeMnorm,
    Verify,
    CheckWeights,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ComputeK => "compute-k",
            Command::ComputeMnorm => "compute-mnorm",
            Command::Verify => "verify",
            Command::CheckWeights => "check-weights",
            Command::Sweep => "sweep",
        }
    }

    fn parse(s: &str) -> Result<Command> {
        Ok(match s {
            "compute-k" => Command::ComputeK,
            "compute-mnorm" => Command::ComputeMnorm,
            "verify" => Command::Verify,
            "check-weights" => Command::CheckWeights,
            "sweep" => Command::Sweep,
            other => bail!("unknown command {other:?}"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub p: f64,
    pub m: f64,
    pub q: f64,
    pub alpha: f64,
    pub r: f64,
    pub u: Option<Weight>,
    pub b: Weight,
    pub phi: Option<Weight>,
    pub v: Weight,
    pub w: Weight,
    pub grid_min: f64,
    pub grid_max: f64,
    pub grid_points: usize,
    pub seed: u64,
    pub window: f64,
    pub n_samples: usize,
    pub refine_steps: usize,
    pub out: String,
    pub sweep_param: Option<String>,
    pub sweep_from: f64,
    pub sweep_to: f64,
    pub sweep_steps: usize,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            command: Command::ComputeK,
            p: 2.0,
            m: 1.5,
            q: 3.0,
            alpha: 1.0,
            r: 1.0,
            u: None,
            b: Weight::one(),
            phi: None,
            v: Weight::new(&[(0.0, 1.0, -1.0, 0.0), (1.0, 1.0, -1.5, 0.0)]).expect("default v"),
            w: Weight::new(&[(0.0, 1.0, 0.5, 0.0), (1.0, 1.0, -2.0, 0.0)]).expect("default w"),
            grid_min: lorentz_hardy::stepfn::DEFAULT_T_MIN,
            grid_max: lorentz_hardy::stepfn::DEFAULT_T_MAX,
            grid_points: lorentz_hardy::stepfn::DEFAULT_POINTS,
            seed: 0,
            window: lorentz_hardy::verify::WINDOW_K,
            n_samples: 2400,
            refine_steps: 2,
            out: "report".to_string(),
            sweep_param: None,
            sweep_from: 0.0,
            sweep_to: 0.0,
            sweep_steps: 0,
        }
    }
}

/// Parse a weight literal `[(lo,coeff,pow,log),...]`.
pub fn parse_weight(text: &str) -> Result<Weight> {
    let inner = text
        .trim()
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .with_context(|| format!("weight literal must be bracketed, got {text:?}"))?;
    let mut pieces = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .with_context(|| format!("expected '(' in weight literal near {rest:?}"))?;
        let close = open
            .find(')')
            .with_context(|| format!("unclosed piece in weight literal near {rest:?}"))?;
        let body = &open[..close];
        let nums: Vec<f64> = body
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad number {tok:?}"))
            })
            .collect::<Result<_>>()?;
        if nums.len() != 4 {
            bail!("a piece needs 4 numbers (lo, coeff, pow, log), got {body:?}");
        }
        pieces.push((nums[0], nums[1], nums[2], nums[3]));
        rest = open[close + 1..].trim().trim_start_matches(',').trim();
    }
    Weight::new(&pieces).map_err(|e| anyhow::anyhow!("invalid weight {text:?}: {e}"))
}

pub fn render_weight(w: &Weight) -> String {
    let mut out = String::from("[");
    for (i, p) in w.pieces().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "({},{},{},{})", p.lo, p.coeff, p.pow, p.log_exp);
    }
    out.push(']');
    out
}

/// Parse a config document into a validated [`RunConfig`].
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut kv = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("line {}: expected 'key = value', got {raw:?}", lineno + 1))?;
        let key = key.trim().to_string();
        if kv.insert(key.clone(), value.trim().to_string()).is_some() {
            bail!("line {}: duplicate key {key:?}", lineno + 1);
        }
    }
    let mut cfg = RunConfig::default();
    let command = kv.remove("command").context("config must set 'command'")?;
    cfg.command = Command::parse(&command)?;

    macro_rules! num {
        ($key:literal, $field:expr) => {
            if let Some(val) = kv.remove($key) {
                $field = val
                    .parse()
                    .with_context(|| format!("{}: bad numeric value {val:?}", $key))?;
            }
        };
    }
    num!("p", cfg.p);
    num!("m", cfg.m);
    num!("q", cfg.q);
    num!("alpha", cfg.alpha);
    num!("r", cfg.r);
    num!("grid_min", cfg.grid_min);
    num!("grid_max", cfg.grid_max);
    num!("grid_points", cfg.grid_points);
    num!("seed", cfg.seed);
    num!("window", cfg.window);
    num!("n_samples", cfg.n_samples);
    num!("refine_steps", cfg.refine_steps);
    num!("sweep_from", cfg.sweep_from);
    num!("sweep_to", cfg.sweep_to);
    num!("sweep_steps", cfg.sweep_steps);
    if let Some(val) = kv.remove("u") {
        cfg.u = Some(parse_weight(&val)?);
    }
    if let Some(val) = kv.remove("b") {
        cfg.b = parse_weight(&val)?;
    }
    if let Some(val) = kv.remove("phi") {
        cfg.phi = Some(parse_weight(&val)?);
    }
    if let Some(val) = kv.remove("v") {
        cfg.v = parse_weight(&val)?;
    }
    if let Some(val) = kv.remove("w") {
        cfg.w = parse_weight(&val)?;
    }
    if let Some(val) = kv.remove("out") {
        cfg.out = val;
    }
    if let Some(val) = kv.remove("sweep_param") {
        cfg.sweep_param = Some(val);
    }
    if let Some(stray) = kv.keys().next() {
        bail!("unknown key {stray:?}");
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<()> {
    for (name, val) in [
        ("p", cfg.p),
        ("m", cfg.m),
        ("q", cfg.q),
        ("alpha", cfg.alpha),
        ("r", cfg.r),
        ("window", cfg.window),
    ] {
        if !(val > 0.0) || !val.is_finite() {
            bail!("{name} must be a positive real, got {val}");
        }
    }
    if !(cfg.grid_min > 0.0 && cfg.grid_max > cfg.grid_min) {
        bail!("grid needs 0 < grid_min < grid_max");
    }
    if cfg.grid_points < 2 {
        bail!("grid_points must be at least 2");
    }
    if cfg.command == Command::ComputeMnorm && cfg.phi.is_none() {
        bail!("compute-mnorm needs a 'phi' weight");
    }
    if cfg.command == Command::Sweep {
        let param = cfg
            .sweep_param
            .as_deref()
            .context("sweep needs 'sweep_param'")?;
        if !matches!(param, "p" | "m" | "q" | "alpha") {
            bail!("sweep_param must be one of p, m, q, alpha; got {param:?}");
        }
        if cfg.sweep_steps < 2 {
            bail!("sweep needs sweep_steps >= 2");
        }
        if !(cfg.sweep_to > cfg.sweep_from && cfg.sweep_from > 0.0) {
            bail!("sweep needs 0 < sweep_from < sweep_to");
        }
    }
    Ok(())
}

/// Render a config to the canonical document; `parse_config(render(c)) == c`.
pub fn render_config(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "command = {}", cfg.command.name());
    let _ = writeln!(out, "p = {}", cfg.p);
    let _ = writeln!(out, "m = {}", cfg.m);
    let _ = writeln!(out, "q = {}", cfg.q);
    let _ = writeln!(out, "alpha = {}", cfg.alpha);
    let _ = writeln!(out, "r = {}", cfg.r);
    if let Some(u) = &cfg.u {
        let _ = writeln!(out, "u = {}", render_weight(u));
    }
    let _ = writeln!(out, "b = {}", render_weight(&cfg.b));
    if let Some(phi) = &cfg.phi {
        let _ = writeln!(out, "phi = {}", render_weight(phi));
    }
    let _ = writeln!(out, "v = {}", render_weight(&cfg.v));
    let _ = writeln!(out, "w = {}", render_weight(&cfg.w));
    let _ = writeln!(out, "grid_min = {}", cfg.grid_min);
    let _ = writeln!(out, "grid_max = {}", cfg.grid_max);
    let _ = writeln!(out, "grid_points = {}", cfg.grid_points);
    let _ = writeln!(out, "seed = {}", cfg.seed);
    let _ = writeln!(out, "window = {}", cfg.window);
    let _ = writeln!(out, "n_samples = {}", cfg.n_samples);
    let _ = writeln!(out, "refine_steps = {}", cfg.refine_steps);
    let _ = writeln!(out, "out = {}", cfg.out);
    if let Some(param) = &cfg.sweep_param {
        let _ = writeln!(out, "sweep_param = {param}");
        let _ = writeln!(out, "sweep_from = {}", cfg.sweep_from);
        let _ = writeln!(out, "sweep_to = {}", cfg.sweep_to);
        let _ = writeln!(out, "sweep_steps = {}", cfg.sweep_steps);
    }
    out
}
