//! Experiment harness: configuration, subcommands and the studies they run.
//!
//! Configuration is flat `key = value` text with dotted namespaces.
//! Defaults are listed in [`DEFAULTS`]; a file given with `--config` and
//! repeated `--set key=value` override them, and the dedicated flags
//! override both. Every output starts with the resolved configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comparison::{fit_xi_star, xi_star_sweep, ComparisonConstants, Frame, XiGrid};
use crate::error::{Error, Result};
use crate::fields::{make_profile, Lattice, ProfileFamily, RadialProfile, SpaceTimeField};
use crate::linear_part::{eval_v_unclipped, verify_decay, LinearPartSpec};
use crate::norms::{basic_estimate_probe, gamma_strauss, horizon_ratio, p0, p1, zeta, BasicCase, Exponents, WeightSpec};
use crate::output::{fmt_f64, write_atomic};
use crate::residual::{
    assemble_h, chain_rule_dt, check_initial_conditions, convergence_order, effective_coefficients, pde_residual_at,
    LossInputs,
};
use crate::solver::{fit_points, lifespan_sweep, solve, NonlinearForm, NonlinearitySpec, ScalingLaw, SolveConfig, SolveMode};
use crate::sphmeans::{check_h_bounds, spherical_mean, Constant, Dimension, QuadratureSpec};

/// Every accepted key with its default.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("a", "1"),
    ("comparison.cap", "1e6"),
    ("comparison.frame", "auto"),
    ("comparison.max_ln", "400"),
    ("comparison.per_decade", "200"),
    ("comparison.xi_targets", "1e2,1e3,1e4,1e5,1e6"),
    ("eps_list", ""),
    ("epsilon", "0.5"),
    ("f.amplitude", "1"),
    ("f.family", "zero"),
    ("fit.input", ""),
    ("fit.r2_min", "0.95"),
    ("fit.tol", "0.3"),
    ("form", "abs_power"),
    ("g.amplitude", "7"),
    ("g.family", "annular_bump"),
    ("k", "1"),
    ("k0", "0.5"),
    ("kernel.norm_samples", "1000"),
    ("lattice.dr", "0.1"),
    ("lattice.dt", ""),
    ("lattice.t_max", "10"),
    ("law", "subcritical"),
    ("lifespan.grid_check", "true"),
    ("linear.band", "1.05"),
    ("linear.huygens_t", "50"),
    ("linear.t_hi", "100"),
    ("linear.t_lo", "10"),
    ("n", "3"),
    ("output.dir", "out"),
    ("output.svg", "false"),
    ("p", "2"),
    ("probe.t_list", "10,30,100"),
    ("quadrature.abs_tol", "1e-11"),
    ("quadrature.base_order", "8"),
    ("quadrature.endpoint_split", "0.2"),
    ("residual.levels", "0.3,0.1,0.0333333333333333"),
    ("residual.t_max", "10"),
    ("samples", "1000"),
    ("seed", "0"),
    ("solver.blowup_cap", "1e6"),
    ("solver.budget", "1024"),
    ("solver.delta", "0.1"),
    ("solver.mode", "march"),
    ("solver.picard_max_iters", "50"),
    ("solver.picard_tol", "1e-10"),
    ("solver.probe_cap", "1e5"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig { values: DEFAULTS.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config { key: key.to_string(), message: message.into() }
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match self.values.get_mut(key) {
            Some(v) => {
                *v = value.trim().to_string();
                Ok(())
            }
            None => Err(config_err(key, "unknown key")),
        }
    }

    /// `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(&format!("line {}", no + 1), format!("expected key = value, got '{line}'")))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err("config", format!("{}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or("")
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.values.get(key).ok_or_else(|| config_err(key, "unknown key"))?;
        raw.parse::<T>().map_err(|e| config_err(key, format!("cannot parse '{raw}': {e}")))
    }

    pub fn get_list(&self, key: &str) -> Result<Vec<f64>> {
        let raw = self.raw(key);
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',').map(|s| s.trim().parse::<f64>().map_err(|e| config_err(key, format!("'{s}': {e}")))).collect()
    }

    /// `n` as a range: `4`, `3..6` (inclusive) or `3,5`.
    pub fn dimensions(&self) -> Result<Vec<Dimension>> {
        let raw = self.raw("n");
        let ns: Vec<u32> = if let Some((a, b)) = raw.split_once("..") {
            let a: u32 = a.trim().parse().map_err(|_| config_err("n", format!("bad range '{raw}'")))?;
            let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| config_err("n", format!("bad range '{raw}'")))?;
            (a..=b).collect()
        } else {
            raw.split(',').map(|s| s.trim().parse().map_err(|_| config_err("n", format!("bad dimension '{s}'")))).collect::<Result<_>>()?
        };
        if ns.is_empty() {
            return Err(config_err("n", "empty"));
        }
        ns.into_iter().map(|n| Dimension::new(n).map_err(|e| config_err("n", e.to_string()))).collect()
    }

    pub fn dimension(&self) -> Result<Dimension> {
        let d = self.dimensions()?;
        if d.len() != 1 {
            return Err(config_err("n", "this subcommand takes a single dimension"));
        }
        Ok(d[0])
    }

    /// The resolved configuration as comment lines.
    pub fn header(&self, command: &str) -> String {
        let mut s = format!("# wavelab {command}\n");
        for (k, v) in &self.values {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s
    }

    fn check<T>(&self, key: &str, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            e @ Error::Config { .. } => e,
            other => config_err(key, other.to_string()),
        })
    }

    pub fn quadrature(&self) -> Result<QuadratureSpec> {
        let q = QuadratureSpec {
            base_order: self.get("quadrature.base_order")?,
            endpoint_split: self.get("quadrature.endpoint_split")?,
            abs_tol: self.get("quadrature.abs_tol")?,
        };
        self.check("quadrature", q.validate())?;
        Ok(q)
    }

    fn profile(&self, which: &str) -> Result<RadialProfile> {
        let fam: ProfileFamily = self.get(&format!("{which}.family"))?;
        let amp: f64 = self.get(&format!("{which}.amplitude"))?;
        let (k, k0): (f64, f64) = (self.get("k")?, self.get("k0")?);
        let k0 = if fam == ProfileFamily::AnnularBump { k0 } else { 0.0 };
        self.check(&format!("{which}.family"), make_profile(fam, k, k0, amp))
    }

    pub fn linear_spec(&self) -> Result<LinearPartSpec> {
        let mut spec = LinearPartSpec::new(self.profile("f")?, self.profile("g")?, self.dimension()?);
        spec.q = self.quadrature()?;
        self.check("quadrature", spec.validate())?;
        Ok(spec)
    }

    pub fn nonlinearity(&self) -> Result<NonlinearitySpec> {
        let form: NonlinearForm = self.get("form")?;
        self.check("p", NonlinearitySpec::new(self.get("p")?, form, self.get("a")?))
    }

    pub fn exponents(&self) -> Result<Exponents> {
        self.check("p", Exponents::new(self.dimension()?, self.get("p")?))
    }

    pub fn lattice(&self) -> Result<Lattice> {
        let dr: f64 = self.get("lattice.dr")?;
        let dt: f64 = if self.raw("lattice.dt").is_empty() { dr } else { self.get("lattice.dt")? };
        let k: f64 = self.get("k")?;
        self.check("lattice", Lattice::for_support(dr, dt, self.get("lattice.t_max")?, k))
    }

    pub fn solve_config(&self) -> Result<SolveConfig> {
        let mut cfg = SolveConfig::new(self.get("epsilon")?, self.lattice()?);
        cfg.blowup_cap = self.get("solver.blowup_cap")?;
        cfg.picard_tol = self.get("solver.picard_tol")?;
        cfg.picard_max_iters = self.get("solver.picard_max_iters")?;
        cfg.mode = self.get("solver.mode")?;
        cfg.budget = self.get::<f64>("solver.budget")? * self.get::<f64>("k")?;
        cfg.delta = self.get("solver.delta")?;
        cfg.probe_caps = vec![self.get("solver.probe_cap")?];
        self.check("solver", cfg.validate())?;
        Ok(cfg)
    }

    pub fn seed(&self) -> Result<u64> {
        self.get("seed")
    }
}

#[derive(Debug, Parser)]
#[command(name = "wavelab", version, about = "Spherical-means integral equations for semilinear waves")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub svg: bool,
    #[arg(long, global = true)]
    pub n: Option<String>,
    #[arg(long, global = true)]
    pub p: Option<String>,
    /// One value sets `epsilon`, a comma list sets `eps_list`.
    #[arg(long, global = true)]
    pub eps: Option<String>,
    #[arg(long, global = true)]
    pub law: Option<String>,
    #[arg(long, global = true)]
    pub samples: Option<String>,
    /// `key=value`, repeatable.
    #[arg(long = "set", global = true)]
    pub set: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Normalisation and bounds of the spherical-means kernel.
    VerifyKernel,
    /// Support and decay of the linear part.
    VerifyLinear,
    /// Exponent identities and the basic-estimate probe.
    VerifyEstimates,
    /// One solve; writes the solution field.
    Solve,
    /// Lifespan sweep over `eps_list`.
    Lifespan,
    /// Volterra comparison sweep.
    Comparison,
    /// Residual of the differential equation and initial conditions.
    Residual,
    /// Scaling fit of a lifespan table.
    Fit,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifyKernel => "verify-kernel",
            Command::VerifyLinear => "verify-linear",
            Command::VerifyEstimates => "verify-estimates",
            Command::Solve => "solve",
            Command::Lifespan => "lifespan",
            Command::Comparison => "comparison",
            Command::Residual => "residual",
            Command::Fit => "fit",
        }
    }
}

/// Builds the configuration from defaults, file, `--set`, `WAVELAB_SEED`
/// and flags, in that order.
pub fn resolve_config(args: &Args) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &args.config {
        cfg.apply_file(path)?;
    }
    for kv in &args.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| config_err(kv, "expected key=value"))?;
        cfg.set(k.trim(), v)?;
    }
    if let Ok(seed) = std::env::var("WAVELAB_SEED") {
        seed.trim().parse::<u64>().map_err(|_| config_err("WAVELAB_SEED", format!("not an integer: '{seed}'")))?;
        cfg.set("seed", &seed)?;
    }
    if let Some(n) = &args.n {
        cfg.set("n", n)?;
    }
    if let Some(p) = &args.p {
        cfg.set("p", p)?;
    }
    if let Some(e) = &args.eps {
        if e.contains(',') {
            cfg.set("eps_list", e)?;
        } else {
            cfg.set("epsilon", e)?;
        }
    }
    if let Some(l) = &args.law {
        cfg.set("law", l)?;
    }
    if let Some(s) = &args.samples {
        cfg.set("samples", s)?;
    }
    if let Some(o) = &args.out {
        cfg.set("output.dir", &o.to_string_lossy())?;
    }
    if args.svg {
        cfg.set("output.svg", "true")?;
    }
    Ok(cfg)
}

/// What a subcommand reports back.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { passed: true, lines: Vec::new() }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        self.passed &= ok;
        self.lines.push(format!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" }));
    }

    fn note(&mut self, line: String) {
        self.lines.push(line);
    }
}

/// Parses `argv` (program name first) and runs; returns the exit status:
/// 0 on pass, 1 on a failed check or numerical failure, 2 on a
/// configuration error.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(j) = args.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return 2;
        }
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let cfg = match resolve_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return 2;
        }
    };
    match execute(args.command, &cfg) {
        Ok(out) => {
            for l in &out.lines {
                println!("{l}");
            }
            if out.passed {
                0
            } else {
                1
            }
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("configuration error: {e}");
            2
        }
        Err(e) => {
            eprintln!("{} failed: {e}", args.command.name());
            1
        }
    }
}

pub fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    match command {
        Command::VerifyKernel => cmd_verify_kernel(cfg),
        Command::VerifyLinear => cmd_verify_linear(cfg),
        Command::VerifyEstimates => cmd_verify_estimates(cfg),
        Command::Solve => cmd_solve(cfg),
        Command::Lifespan => cmd_lifespan(cfg),
        Command::Comparison => cmd_comparison(cfg),
        Command::Residual => cmd_residual(cfg),
        Command::Fit => cmd_fit(cfg),
    }
}

fn out_path(cfg: &ExperimentConfig, file: &str) -> PathBuf {
    Path::new(cfg.raw("output.dir")).join(file)
}

fn write_table(cfg: &ExperimentConfig, command: &str, file: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    let mut s = cfg.header(command);
    s.push_str(&columns.join(","));
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    let path = out_path(cfg, file);
    write_atomic(&path, s.as_bytes())?;
    Ok(path)
}

fn f(x: f64) -> String {
    fmt_f64(x)
}

// ---- studies ----------------------------------------------------------

/// Largest relative error of the mean of `b ≡ 1` over random `(r, ρ)` in `[0.1, 10]²`.
pub fn kernel_normalization(n: Dimension, samples: usize, seed: u64, q: &QuadratureSpec) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let r = rng.gen_range(0.1..=10.0);
        let rho = rng.gen_range(0.1..=10.0);
        let m = spherical_mean(&Constant(1.0), r, rho, n, q)?;
        worst = worst.max((m - 1.0).abs());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HuygensStudy {
    pub max_abs: f64,
    pub max_outside: f64,
    pub nodes: usize,
}

/// `max |V|` over a lattice up to `t_max`, overall and outside `|t - r| ≤ band`,
/// with `V` from the quadrature of the means everywhere.
pub fn huygens_study(spec: &LinearPartSpec, dr: f64, t_max: f64, band: f64) -> Result<HuygensStudy> {
    use rayon::prelude::*;
    let k = spec.support_radius();
    let lat = Lattice::for_support(dr, dr, t_max, k)?;
    let rows: Vec<(f64, f64, usize)> = (1..lat.nt())
        .into_par_iter()
        .map(|j| {
            let t = lat.t(j);
            let mut m = (0.0f64, 0.0f64, 0usize);
            let i_end = ((t + 2.0 * k) / dr).ceil() as usize;
            for i in 0..i_end.min(lat.nr()) {
                let r = lat.r(i);
                let v = eval_v_unclipped(spec, r, t)?.abs();
                m.0 = m.0.max(v);
                if (t - r).abs() > band {
                    m.1 = m.1.max(v);
                }
                m.2 += 1;
            }
            Ok(m)
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().fold(HuygensStudy { max_abs: 0.0, max_outside: 0.0, nodes: 0 }, |a, b| HuygensStudy {
        max_abs: a.max_abs.max(b.0),
        max_outside: a.max_outside.max(b.1),
        nodes: a.nodes + b.2,
    }))
}

/// `(name, residual)` of the exponent identities for `n = 3..=8`.
pub fn exponent_identities() -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for n in 3..=8u32 {
        let d = Dimension::new(n).expect("n >= 3");
        out.push((format!("zeta(p1({n}),{n})"), zeta(p1(d), d).abs()));
        out.push((format!("gamma(p0({n}),{n})"), gamma_strauss(p0(d), d).abs()));
        if n > 3 {
            // positive when p1 < p0
            out.push((format!("p0({n})-p1({n})"), p0(d) - p1(d)));
        }
    }
    let d3 = Dimension::new(3).expect("n = 3");
    let s = 1.0 + 2f64.sqrt();
    out.push(("p1(3)-(1+sqrt2)".into(), (p1(d3) - s).abs()));
    out.push(("p0(3)-(1+sqrt2)".into(), (p0(d3) - s).abs()));
    out
}

/// One representative `(a1, a2, a3)` per case of the basic estimate.
pub const PROBE_CASES: [(BasicCase, [f64; 3]); 4] = [
    (BasicCase::Bounded, [0.0, -2.0, 0.0]),
    (BasicCase::Logarithmic, [0.0, -1.0, 0.0]),
    (BasicCase::LogPower, [0.0, -2.0, 1.0]),
    (BasicCase::Power, [0.0, -0.5, 0.0]),
];

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeRow {
    pub case: BasicCase,
    pub a: [f64; 3],
    pub t_end: f64,
    pub dr: f64,
    pub sup_ratio: f64,
}

/// Sup ratios of the basic-estimate probe for every case, horizon and
/// spacing (`dr` and `dr/2`).
pub fn probe_study(spec: &WeightSpec, t_list: &[f64], dr: f64) -> Result<Vec<ProbeRow>> {
    let t_max = t_list.iter().cloned().fold(0.0, f64::max);
    let mut rows = Vec::new();
    for h in [dr, 0.5 * dr] {
        let lat = Lattice::for_support(h, h, t_max, spec.k)?;
        for (case, a) in PROBE_CASES {
            for &t in t_list {
                let rep = basic_estimate_probe(spec, a, t, &lat)?;
                rows.push(ProbeRow { case, a, t_end: t, dr: h, sup_ratio: rep.sup_ratio });
            }
        }
    }
    Ok(rows)
}

/// Snaps `(r, t)` to the nearest node of spacing `h` (cell-centred in `r`).
/// With levels refined by odd integer factors these points are nodes of
/// every level, so all levels measure the same places.
fn snap(h: f64, r: f64, t: f64) -> (f64, f64) {
    (((r / h - 0.5).round().max(0.0) + 0.5) * h, (t / h).round() * h)
}

fn coarsest(levels: &[f64]) -> f64 {
    levels.iter().cloned().fold(0.0, f64::max)
}

/// Manufactured `u = exp(-r² - t)` with `F = u_tt - Δu` and `H = 0`, at
/// points in `r ∈ [0.5, 3]`, `t ∈ [0.5, 2.5]`; returns `(dr, L∞ residual)` per level.
pub fn manufactured_residual(n: Dimension, levels: &[f64]) -> Result<Vec<(f64, f64)>> {
    let nf = n.as_f64();
    let hc = coarsest(levels);
    let mut pts = Vec::new();
    for a in 0..=10 {
        for b in 0..=8 {
            pts.push(snap(hc, 0.5 + 0.25 * a as f64, 0.5 + 0.25 * b as f64));
        }
    }
    levels
        .iter()
        .map(|&h| {
            let lat = Lattice::new(h, h, 4.0, 3.5)?;
            let u = SpaceTimeField::from_fn(lat, None, |r, t| (-r * r - t).exp());
            let fv = SpaceTimeField::from_fn(lat, None, |r, t| (1.0 - 4.0 * r * r + 2.0 * nf) * (-r * r - t).exp());
            let res = pde_residual_at(&u, n, &pts, |i, j| fv.get(i, j), |_, _| Ok(0.0))?;
            Ok((h, res.iter().cloned().fold(0.0, f64::max)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MarchedResidual {
    pub dr: f64,
    pub linf: f64,
    /// `max |u_tt - Δu|` over the same points, for scale.
    pub scale: f64,
    pub ic: (f64, f64),
    pub blew_up: bool,
}

/// Fixed points (nodes of spacing `h`) for the marched residual: inside the cone, across
/// the wave packet and ahead of it, away from `r = 0`.
pub fn residual_points(t_max: f64, k: f64, h: f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for i in 1..=4 {
        let t = t_max * i as f64 / 5.0;
        for d in [-0.5 * k, 0.0, 0.5 * k, 2.0 * k, 0.5 * t] {
            let r = t - d;
            if r >= 0.5 * k && r <= t + 0.75 * k {
                pts.push(snap(h, r, t));
            }
        }
    }
    pts
}

/// Marches `u = εV + N(F(u))` at each spacing and measures
/// `u_tt - Δu - F + H` at [`residual_points`].
pub fn marched_residual(
    spec: &LinearPartSpec,
    nl: &NonlinearitySpec,
    eps: f64,
    t_max: f64,
    levels: &[f64],
) -> Result<Vec<MarchedResidual>> {
    let k = spec.support_radius();
    let pts = residual_points(t_max, k, coarsest(levels));
    let n = spec.n;
    let mut out = Vec::new();
    for &h in levels {
        let mut spec_h = *spec;
        spec_h.dt_fd = spec_h.dt_fd.min(0.05 * h);
        let lat = Lattice::for_support(h, h, t_max + 2.0 * h, k)?;
        let cfg = SolveConfig::new(eps, lat);
        let (u, res) = solve(&spec_h, nl, &cfg)?;
        let fv = u.map(|x| nl.eval(x));
        let dtf = chain_rule_dt(nl, &u)?;
        let inp = LossInputs { spec: &spec_h, f_field: &fv, dt_f: &dtf, eps };
        let zero = |_: f64, _: f64| Ok(0.0);
        let r = pde_residual_at(&u, n, &pts, |i, j| fv.get(i, j), |r, t| assemble_h(&inp, r, t))?;
        let s = pde_residual_at(&u, n, &pts, |_, _| 0.0, zero)?;
        let ic = check_initial_conditions(&u, &spec_h, eps)?;
        out.push(MarchedResidual {
            dr: h,
            linf: r.iter().cloned().fold(0.0, f64::max),
            scale: s.iter().cloned().fold(0.0, f64::max),
            ic,
            blew_up: res.blew_up,
        });
    }
    Ok(out)
}

/// ε values whose frame lifespans sit near the given `ξ`.
pub fn comparison_eps(consts: &ComparisonConstants, expo: &Exponents, frame: Frame, xi_targets: &[f64]) -> Vec<f64> {
    let mut e: Vec<f64> = xi_targets.iter().map(|&x| consts.eps_scale(expo, frame, x)).collect();
    e.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    e
}

// ---- output helpers ---------------------------------------------------

/// Log-log scatter with an optional fitted line `ln y = slope ln x + c`.
pub fn svg_loglog(points: &[(f64, f64)], line: Option<(f64, f64)>, xlabel: &str, ylabel: &str) -> String {
    let (w, h, pad) = (480.0, 360.0, 50.0);
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x0 -= 1.0;
        x1 += 1.0;
    }
    if !(y1 > y0) {
        y0 -= 1.0;
        y1 += 1.0;
    }
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\">\n\
         <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n\
         <line x1=\"{pad}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <text x=\"{cx}\" y=\"{ty}\" text-anchor=\"middle\">{xlabel} (log)</text>\n\
         <text x=\"15\" y=\"{cy}\" transform=\"rotate(-90 15 {cy})\" text-anchor=\"middle\">{ylabel} (log)</text>\n",
        b = h - pad,
        r = w - pad,
        cx = w / 2.0,
        ty = h - 12.0,
        cy = h / 2.0,
    );
    for &(x, y) in &pts {
        s.push_str(&format!("<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"steelblue\"/>\n", sx(x), sy(y)));
    }
    if let Some((m, c)) = line {
        s.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"firebrick\"/>\n",
            sx(x0),
            sy(m * x0 + c),
            sx(x1),
            sy(m * x1 + c)
        ));
    }
    s.push_str("</svg>\n");
    s
}

/// Reads `(epsilon, T_hat)` of the blow-up rows of a lifespan table.
pub fn read_lifespan_table(path: &Path) -> Result<Vec<(f64, f64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err("fit.input", format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines.next().ok_or_else(|| config_err("fit.input", "empty table"))?.split(',').collect();
    let col = |name: &str| header.iter().position(|h| h.trim() == name).ok_or_else(|| config_err("fit.input", format!("missing column {name}")));
    let (ie, it, ib) = (col("epsilon")?, col("T_hat")?, col("blew_up")?);
    let mut out = Vec::new();
    for l in lines {
        let c: Vec<&str> = l.split(',').collect();
        let get = |i: usize| c.get(i).map(|s| s.trim()).unwrap_or("");
        if get(ib) != "true" {
            continue;
        }
        let e: f64 = get(ie).parse().map_err(|_| config_err("fit.input", format!("bad epsilon in '{l}'")))?;
        let t: f64 = get(it).parse().map_err(|_| config_err("fit.input", format!("bad T_hat in '{l}'")))?;
        out.push((e, t));
    }
    Ok(out)
}

// ---- subcommands ------------------------------------------------------

fn cmd_verify_kernel(cfg: &ExperimentConfig) -> Result<Outcome> {
    let dims = cfg.dimensions()?;
    let samples: usize = cfg.get("samples")?;
    let norm_samples: usize = cfg.get("kernel.norm_samples")?;
    let seed = cfg.seed()?;
    let q = cfg.quadrature()?;
    let mut out = Outcome::new();
    let mut rows = Vec::new();
    for n in dims {
        let norm = kernel_normalization(n, norm_samples, seed, &q)?;
        let rep = check_h_bounds(samples, n, seed)?;
        out.check(&format!("normalisation n={n}"), norm <= 1e-8, format!("max rel err {norm:.3e} over {norm_samples}"));
        out.check(
            &format!("kernel bounds n={n}"),
            rep.passed(),
            format!("{} violations over {}, identity err {:.3e}", rep.violations.len(), rep.samples, rep.identity_max_rel_err),
        );
        rows.push(vec![
            n.to_string(),
            norm_samples.to_string(),
            f(norm),
            rep.samples.to_string(),
            rep.violations.len().to_string(),
            f(rep.max_ratio[0]),
            f(rep.max_ratio[1]),
            f(rep.max_ratio[2]),
            f(rep.max_ratio[3]),
            f(rep.identity_max_rel_err),
        ]);
    }
    let cols =
        ["n", "norm_samples", "norm_max_rel_err", "bound_samples", "violations", "ratio1", "ratio2", "ratio3", "ratio4", "identity_rel_err"];
    let p = write_table(cfg, "verify-kernel", "verify_kernel.csv", &cols, &rows)?;
    out.note(format!("wrote {}", p.display()));
    Ok(out)
}

fn cmd_verify_linear(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.linear_spec()?;
    let k = spec.support_radius();
    let dr: f64 = cfg.get("lattice.dr")?;
    let n = spec.n.as_f64();
    let mut out = Outcome::new();
    let hy = huygens_study(&spec, dr, cfg.get::<f64>("linear.huygens_t")? * k, cfg.get::<f64>("linear.band")? * k)?;
    let rel = if hy.max_abs > 0.0 { hy.max_outside / hy.max_abs } else { 0.0 };
    out.check("huygens", rel <= 1e-6, format!("outside/max = {rel:.3e} over {} nodes", hy.nodes));
    let (t_lo, t_hi): (f64, f64) = (cfg.get::<f64>("linear.t_lo")? * k, cfg.get::<f64>("linear.t_hi")? * k);
    let grid = Lattice::for_support(dr, dr, t_hi, k)?;
    let rep = verify_decay(&spec, &grid)?;
    let spread = rep.window_spread(t_lo);
    out.check("decay windows", spread <= 3.0, format!("spread {spread:.4} on [{t_lo}, {t_hi}]"));
    match rep.decay_slope(t_lo, t_hi) {
        Some(s) => out.check("decay slope", (s + (n - 2.0)).abs() <= 0.1, format!("{s:.4} against {}", -(n - 2.0))),
        None => out.check("decay slope", false, "no fit".into()),
    }
    let rows: Vec<Vec<String>> =
        rep.times.iter().zip(&rep.max_abs).zip(&rep.max_weighted).map(|((t, a), w)| vec![f(*t), f(*a), f(*w)]).collect();
    let p = write_table(cfg, "verify-linear", "verify_linear.csv", &["t", "max_abs_v", "max_weighted_v"], &rows)?;
    out.note(format!("wrote {}", p.display()));
    Ok(out)
}

fn cmd_verify_estimates(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut out = Outcome::new();
    let mut rows = Vec::new();
    for (name, v) in exponent_identities() {
        let ok = if name.starts_with("p0(") && name.contains("-p1(") { v > 1e-12 } else { v <= 1e-12 };
        out.check(&name, ok, format!("{v:.3e}"));
        rows.push(vec!["identity".into(), name, f(v), String::new(), String::new()]);
    }
    let expo = cfg.exponents()?;
    let k: f64 = cfg.get("k")?;
    let spec = WeightSpec::new(k, expo, cfg.get("solver.delta")?)?;
    let t_list: Vec<f64> = cfg.get_list("probe.t_list")?.into_iter().map(|t| t * k).collect();
    let dr: f64 = cfg.get("lattice.dr")?;
    let probe = probe_study(&spec, &t_list, dr)?;
    for r in &probe {
        rows.push(vec![
            format!("{:?}", r.case),
            format!("{};{};{}", r.a[0], r.a[1], r.a[2]),
            f(r.sup_ratio),
            f(r.t_end),
            f(r.dr),
        ]);
    }
    for check in probe_checks(&probe, k) {
        out.check(&check.0, check.1, check.2);
    }
    let p = write_table(cfg, "verify-estimates", "verify_estimates.csv", &["kind", "name", "value", "T", "dr"], &rows)?;
    out.note(format!("wrote {}", p.display()));
    Ok(out)
}

/// Finiteness and refinement stability (20%) per case, and the growth of
/// the logarithmic case: its sup must grow at one rate per unit
/// `log((2T+3k)/k)` across the horizons (15%).
pub fn probe_checks(rows: &[ProbeRow], k: f64) -> Vec<(String, bool, String)> {
    let mut checks = Vec::new();
    let dr = rows.iter().map(|r| r.dr).fold(0.0, f64::max);
    for (case, _) in PROBE_CASES {
        let coarse: Vec<&ProbeRow> = rows.iter().filter(|r| r.case == case && r.dr == dr).collect();
        let mut worst = 0.0f64;
        let mut finite = true;
        for c in &coarse {
            let fine = rows.iter().find(|r| r.case == case && r.t_end == c.t_end && r.dr < dr);
            if let Some(fi) = fine {
                finite &= c.sup_ratio.is_finite() && fi.sup_ratio.is_finite() && c.sup_ratio > 0.0;
                worst = worst.max((fi.sup_ratio / c.sup_ratio - 1.0).abs());
            }
        }
        checks.push((format!("probe {case:?}"), finite && worst <= 0.2, format!("max refinement change {:.2}%", 100.0 * worst)));
        if case == BasicCase::Logarithmic {
            // unnormalised sup against log X
            let fine_dr = rows.iter().map(|r| r.dr).fold(f64::INFINITY, f64::min);
            let mut lr: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.case == case && r.dr == fine_dr)
                .map(|r| (r.t_end, r.sup_ratio * horizon_ratio(k, r.t_end).ln()))
                .collect();
            lr.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
            // growth per unit log X must be the same on every horizon interval
            let rates: Vec<f64> = lr
                .windows(2)
                .map(|w| (w[1].1 - w[0].1) / (horizon_ratio(k, w[1].0).ln() - horizon_ratio(k, w[0].0).ln()))
                .collect();
            if let Some(&r0) = rates.first() {
                let worst = rates.iter().map(|r| (r / r0 - 1.0).abs()).fold(0.0, f64::max);
                let ok = r0 > 0.0 && worst <= 0.15;
                checks.push((
                    "probe log growth".into(),
                    ok,
                    format!("rates {rates:?} per unit log X, spread {:.2}%", 100.0 * worst),
                ));
            }
        }
    }
    checks
}

fn cmd_solve(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.linear_spec()?;
    let nl = cfg.nonlinearity()?;
    let sc = cfg.solve_config()?;
    let (u, res) = solve(&spec, &nl, &sc)?;
    let mut out = Outcome::new();
    out.note(format!(
        "epsilon={} blew_up={} T_hat={} slices={} max_weighted_norm={}",
        res.epsilon,
        res.blew_up,
        res.t_hat.map(f).unwrap_or_else(|| "survived".into()),
        res.slices_completed,
        f(res.max_weighted_norm)
    ));
    let mut s = cfg.header("solve").into_bytes();
    u.write_csv_to(&mut s)?;
    let p = out_path(cfg, "solve.csv");
    write_atomic(&p, &s)?;
    out.note(format!("wrote {}", p.display()));
    Ok(out)
}

fn eps_list(cfg: &ExperimentConfig) -> Result<Vec<f64>> {
    let l = cfg.get_list("eps_list")?;
    if l.is_empty() {
        Ok(vec![cfg.get("epsilon")?])
    } else {
        if l.windows(2).any(|w| w[1] > w[0]) {
            return Err(config_err("eps_list", "must be descending"));
        }
        Ok(l)
    }
}

fn cmd_lifespan(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.linear_spec()?;
    let nl = cfg.nonlinearity()?;
    let mut sc = cfg.solve_config()?;
    sc.mode = SolveMode::March;
    let eps = eps_list(cfg)?;
    let res = lifespan_sweep(&spec, &nl, &eps, &sc)?;
    let rows: Vec<Vec<String>> = res
        .iter()
        .map(|r| {
            vec![
                f(r.epsilon),
                r.t_hat.map(f).unwrap_or_else(|| "survived".into()),
                r.blew_up.to_string(),
                f(r.max_weighted_norm),
                f(r.dr),
                f(r.dt),
            ]
        })
        .collect();
    let p = write_table(cfg, "lifespan", "lifespan.csv", &["epsilon", "T_hat", "blew_up", "max_weighted_norm", "dr", "dt"], &rows)?;
    let mut out = Outcome::new();
    for r in &res {
        out.note(format!("epsilon={} T_hat={}", r.epsilon, r.t_hat.map(|t| format!("{t:.4}")).unwrap_or_else(|| "survived".into())));
    }
    let probe_cap: f64 = cfg.get("solver.probe_cap")?;
    let cap_dev = res
        .iter()
        .filter_map(|r| Some((r.t_hat?, r.crossing(probe_cap)?)))
        .map(|(a, b)| (a / b - 1.0).abs())
        .fold(0.0, f64::max);
    out.check("cap sensitivity", cap_dev < 0.05, format!("max change {:.2}% between caps {probe_cap:e} and {:e}", 100.0 * cap_dev, sc.blowup_cap));
    if cfg.get::<bool>("lifespan.grid_check")? {
        let mut coarse = sc.clone();
        let lat = sc.lattice;
        coarse.lattice = Lattice::for_support(2.0 * lat.dr, 2.0 * lat.dt, lat.t_max, spec.support_radius())?;
        let cres = lifespan_sweep(&spec, &nl, &eps, &coarse)?;
        let mut dev = 0.0f64;
        for (a, b) in res.iter().zip(&cres) {
            dev = dev.max(match (a.t_hat, b.t_hat) {
                (Some(x), Some(y)) => (y / x - 1.0).abs(),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            });
        }
        out.check("grid convergence", dev <= 0.1, format!("max change {:.2}% against spacing {}", 100.0 * dev, 2.0 * lat.dr));
    }
    out.note(format!("wrote {}", p.display()));
    if cfg.get::<bool>("output.svg")? {
        let pts: Vec<(f64, f64)> = res.iter().filter_map(|r| r.t_hat.map(|t| (r.epsilon, t))).collect();
        let line = fit_points(&pts, &cfg.exponents()?, ScalingLaw::Subcritical).ok().map(|f| (f.slope, f.intercept));
        let q = out_path(cfg, "lifespan.svg");
        write_atomic(&q, svg_loglog(&pts, line, "epsilon", "T_hat").as_bytes())?;
        out.note(format!("wrote {}", q.display()));
    }
    Ok(out)
}

fn cmd_fit(cfg: &ExperimentConfig) -> Result<Outcome> {
    let expo = cfg.exponents()?;
    let law: ScalingLaw = cfg.get("law")?;
    let input = if cfg.raw("fit.input").is_empty() { out_path(cfg, "lifespan.csv") } else { PathBuf::from(cfg.raw("fit.input")) };
    let pts = read_lifespan_table(&input)?;
    let fit = fit_points(&pts, &expo, law)?;
    let tol: f64 = cfg.get("fit.tol")?;
    let r2_min: f64 = cfg.get("fit.r2_min")?;
    let mut out = Outcome::new();
    match fit.predicted_slope {
        Some(pred) => out.check("slope", (fit.slope - pred).abs() <= tol, format!("{:.4} against {pred:.4} ± {tol}", fit.slope)),
        None => out.check("slope", fit.slope > 0.0, format!("{:.4e} (positive expected)", fit.slope)),
    }
    out.check("r2", fit.r2 >= r2_min, format!("{:.5} (min {r2_min})", fit.r2));
    let rows = vec![vec![
        format!("{law:?}").to_lowercase(),
        f(fit.slope),
        f(fit.intercept),
        f(fit.r2),
        fit.predicted_slope.map(f).unwrap_or_default(),
        fit.points.to_string(),
    ]];
    let p = write_table(cfg, "fit", "fit.csv", &["law", "slope", "intercept", "r2", "predicted_slope", "points"], &rows)?;
    out.note(format!("wrote {}", p.display()));
    Ok(out)
}

fn cmd_comparison(cfg: &ExperimentConfig) -> Result<Outcome> {
    let expo = cfg.exponents()?;
    let spec = cfg.linear_spec()?;
    let frame = match cfg.raw("comparison.frame") {
        "auto" => {
            if (expo.p - expo.p1).abs() <= 1e-9 * expo.p1 {
                Frame::Critical
            } else if expo.p < expo.p1 {
                Frame::Subcritical
            } else {
                Frame::General
            }
        }
        other => other.parse().map_err(|e: Error| config_err("comparison.frame", e.to_string()))?,
    };
    let (consts, spread) = ComparisonConstants::from_data(&spec, &expo).map_err(|e| config_err("g.family", e.to_string()))?;
    let grid = XiGrid::log(2.0 * consts.k, cfg.get("comparison.per_decade")?, cfg.get("comparison.max_ln")?);
    let cap: f64 = cfg.get("comparison.cap")?;
    let eps = if cfg.get_list("eps_list")?.is_empty() {
        comparison_eps(&consts, &expo, frame, &cfg.get_list("comparison.xi_targets")?)
    } else {
        eps_list(cfg)?
    };
    let sweep = xi_star_sweep(&consts, &expo, frame, &eps, &grid, cap)?;
    let critical = frame == Frame::Critical;
    let fit = fit_xi_star(&sweep, &expo, critical)?;
    let mut out = Outcome::new();
    out.note(format!("C_ngk={:.6e} (spread {spread:.3}) D_n={:.6e} E2={:.6e}", consts.c_ngk, consts.d_n, consts.e2));
    if critical {
        let increasing = fit.local_slopes.windows(2).all(|w| w[1].abs() > w[0].abs());
        out.check("critical affine fit", fit.r2 >= 0.9 && fit.slope > 0.0, format!("slope {:.4e}, r2 {:.5}", fit.slope, fit.r2));
        out.check("super-polynomial", increasing, format!("local exponents {:?}", fit.local_slopes));
    } else {
        let pred = -expo.lifespan_rate();
        out.check("slope", (fit.slope - pred).abs() <= 0.2, format!("{:.4} against {pred:.4}", fit.slope));
    }
    let rows: Vec<Vec<String>> = sweep
        .iter()
        .enumerate()
        .map(|(i, (e, s))| {
            vec![
                f(*e),
                s.map(f).unwrap_or_else(|| "survived".into()),
                if i == 0 { String::new() } else { fit.local_slopes.get(i - 1).copied().map(f).unwrap_or_default() },
                f(fit.slope),
                f(fit.r2),
            ]
        })
        .collect();
    let p = write_table(cfg, "comparison", "comparison.csv", &["epsilon", "ln_xi_star", "local_slope", "fit_slope", "fit_r2"], &rows)?;
    out.note(format!("wrote {}", p.display()));
    Ok(out)
}

fn cmd_residual(cfg: &ExperimentConfig) -> Result<Outcome> {
    let spec = cfg.linear_spec()?;
    let nl = cfg.nonlinearity()?;
    let eps: f64 = cfg.get("epsilon")?;
    let levels = cfg.get_list("residual.levels")?;
    if levels.len() < 3 {
        return Err(config_err("residual.levels", "at least three levels are needed"));
    }
    let t_max: f64 = cfg.get::<f64>("residual.t_max")? * spec.support_radius();
    let mut out = Outcome::new();
    let mms = manufactured_residual(spec.n, &levels)?;
    let o = convergence_order(&mms).unwrap_or(f64::NAN);
    out.check("manufactured order", o >= 1.8, format!("{o:.3}"));
    let marched = marched_residual(&spec, &nl, eps, t_max, &levels)?;
    let lv: Vec<(f64, f64)> = marched.iter().map(|m| (m.dr, m.linf)).collect();
    let o2 = convergence_order(&lv).unwrap_or(f64::NAN);
    out.check("marched order", o2 >= 1.5, format!("{o2:.3}"));
    let e1: Vec<(f64, f64)> = marched.iter().map(|m| (m.dr, m.ic.1)).collect();
    let o3 = convergence_order(&e1);
    out.note(format!(
        "initial conditions: e0 = {:?}, e1 order {:?}",
        marched.iter().map(|m| m.ic.0).collect::<Vec<_>>(),
        o3
    ));
    if spec.n.get() == 4 {
        for c in effective_coefficients(&spec, eps, 0.7, 1.2)? {
            out.check(&format!("coefficient {}", c.name), c.rel_err() <= 1e-10, format!("{:.3e} vs {:.3e}", c.computed, c.expected));
        }
    }
    let mut rows = Vec::new();
    for ((h, m), mr) in mms.iter().zip(&marched) {
        rows.push(vec![f(*h), f(*m), f(mr.linf), f(mr.scale), f(mr.ic.0), f(mr.ic.1)]);
    }
    let p = write_table(
        cfg,
        "residual",
        "residual.csv",
        &["dr", "manufactured_linf", "marched_linf", "operator_linf", "ic_e0", "ic_e1"],
        &rows,
    )?;
    out.note(format!("wrote {}", p.display()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let mut c = ExperimentConfig::default();
        assert!(matches!(c.set("lattice.nope", "1"), Err(Error::Config { .. })));
        assert!(c.apply_text("n = 4\n# comment\nlattice.dr = 0.2 # trailing\n").is_ok());
        assert_eq!(c.raw("n"), "4");
        assert_eq!(c.raw("lattice.dr"), "0.2");
        assert!(c.apply_text("bogus").is_err());
    }

    #[test]
    fn dimension_ranges() {
        let mut c = ExperimentConfig::default();
        c.set("n", "3..6").unwrap();
        assert_eq!(c.dimensions().unwrap().len(), 4);
        assert!(c.dimension().is_err());
        c.set("n", "2").unwrap();
        assert!(c.dimensions().is_err());
    }

    #[test]
    fn header_lists_every_key() {
        let h = ExperimentConfig::default().header("solve");
        assert_eq!(h.lines().count(), DEFAULTS.len() + 1);
    }

    #[test]
    fn missing_config_file_is_a_config_error() {
        assert_eq!(run(["wavelab", "verify-kernel", "--config", "/nonexistent/wavelab.cfg"]), 2);
        assert_eq!(run(["wavelab", "solve", "--set", "lattice.bogus=1"]), 2);
    }

    #[test]
    fn defaults_build() {
        let c = ExperimentConfig::default();
        c.linear_spec().unwrap();
        c.solve_config().unwrap();
        c.nonlinearity().unwrap();
    }
}
