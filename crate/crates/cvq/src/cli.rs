//! Command-line front end.
//!
//! Every subcommand evaluates one row function over a parameter sweep and
//! emits a table as CSV or JSON. Parameters come from a preset section, are
//! overridden by `--set key=value`, and the swept variable is written into
//! the same map before each row is computed, so any numeric key can be swept.
//!
//! Exit codes: 0 success, 1 usage error, 2 computation error, 3 a `summary`
//! anchor outside its tolerance.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bifreq::{
    h_c_bifreq, h_c_bifreq_numeric, h_q_bifreq, qcrb_residual, ratio_limit_noisy, ratio_limit_reflective,
    BifreqParams,
};
use crate::channel::{
    bose_einstein, entanglement_region, fspl, friis, l_max, lossy_tmst, mu_for_reach, preservation_threshold,
    tau_diffraction, tau_path, AirChannel, Geometry, LinkGeometry,
};
use crate::distill::{ps2_gaussian, ps2_heuristic, ps_tmsv_negativity, success_prob_tmsv, swap_symmetric};
use crate::entanglement::{cm_validity, log_negativity, negativity, negativity_from_nu, pts_eigenvalues, BipartiteCM};
use crate::error::{Error, Result};
use crate::gaussian::{purity, tmsv};
use crate::illumination::{gain, h_c, h_c_numeric, h_q, h_q_numeric, qi_probe_log_negativity, QiParams};
use crate::presets::{Params, PresetFile};
use crate::teleport::{
    classical_limit_distance, fidelity_at, fidelity_gaussian, regaussify, LinkSetup, Protocol, RegaussMode,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTE: i32 = 2;
pub const EXIT_ANCHOR: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "cvq", version, about = "Gaussian continuous-variable toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Preset section to start from (each subcommand has its own default).
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Read presets from this file instead of the built-in set.
    #[arg(long, global = true, value_name = "PATH")]
    pub preset_file: Option<PathBuf>,
    /// Override one parameter; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Write the table here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Accepted for script compatibility; every computation is deterministic.
    #[arg(long, global = true, hide = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args, Clone)]
pub struct SweepArgs {
    /// Sweep VAR over COUNT points from START to STOP.
    #[arg(long, num_args = 4, value_names = ["VAR", "START", "STOP", "COUNT"])]
    pub sweep: Option<Vec<String>>,
    /// Logarithmic spacing for --sweep.
    #[arg(long)]
    pub log: bool,
    /// Evaluate once at the preset values, without a sweep column.
    #[arg(long, conflicts_with = "sweep")]
    pub point: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Covariance-matrix summary of a two-mode state.
    State {
        /// tmsv, tmst, lossy or swapped.
        #[arg(long, default_value = "lossy")]
        kind: String,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Negativity of photon-subtracted squeezed vacua against squeezing.
    Negativity {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Numeric Gaussian QFI against the closed forms.
    Qfi {
        /// qi or bifreq.
        #[arg(long, default_value = "qi")]
        family: String,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Quantum illumination with absorption loss.
    Illum {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Bi-frequency illumination.
    Bifreq {
        /// Add the measurement-saturation residual column.
        #[arg(long)]
        qcrb: bool,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Teleportation fidelity over an open-air link.
    Teleport {
        /// tmst-asym or tmst-sym (defaults to the preset geometry).
        #[arg(long)]
        resource: Option<String>,
        /// Comma-separated protocols: bare, concat[:K], ps[:TAU], heuristic,
        /// swap, gain[:1/G], swap-gain[:1/G].
        #[arg(long, default_value = "bare,ps,heuristic,swap,gain,swap-gain")]
        protocol: String,
        /// Report the distance where each fidelity reaches 1/2 instead.
        #[arg(long)]
        classical_limit: bool,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Photon subtraction and re-Gaussification on the link resource.
    Distill {
        #[arg(long)]
        resource: Option<String>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Entanglement swapping at a midpoint relay.
    Swap {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Open-air channel: transmissivities and entanglement versus distance.
    Channel {
        /// Report the entanglement reach of both geometries instead.
        #[arg(long)]
        reach: bool,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Satellite link budget and diffraction thresholds.
    Satellite {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Headline numbers with pass/fail against stored tolerances.
    Summary,
}

/// Failure of a command, mapped onto an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// A cell of an output table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

/// Formats a number with 17 significant digits.
pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) => Value::Null,
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

/// Command echo, parameters, provenance and rows.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub command: String,
    pub parameters: Vec<(String, String)>,
    pub provenance: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::to_csv)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }

    pub fn to_json(&self) -> Value {
        let params: serde_json::Map<String, Value> =
            self.parameters.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        json!({
            "command": self.command,
            "parameters": params,
            "provenance": self.provenance,
            "columns": self.columns,
            "rows": rows,
        })
    }

    /// Index of a column by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// Validated sweep: variable name and the points to visit.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub var: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub log: bool,
}

impl SweepSpec {
    pub fn new(var: &str, start: f64, stop: f64, count: usize, log: bool) -> CliResult<Self> {
        if count < 2 {
            return Err(usage("sweep COUNT must be at least 2"));
        }
        if !(start < stop) {
            return Err(usage("sweep START must be below STOP"));
        }
        if log && !(start > 0.0) {
            return Err(usage("logarithmic sweep needs START > 0"));
        }
        Ok(SweepSpec {
            var: var.to_string(),
            start,
            stop,
            count,
            log,
        })
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == self.count - 1 {
                    return self.stop;
                }
                let t = i as f64 / last;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }

    fn from_args(args: &SweepArgs, default: SweepSpec) -> CliResult<Option<Self>> {
        if args.point {
            return Ok(None);
        }
        match &args.sweep {
            None => Ok(Some(SweepSpec { log: default.log || args.log, ..default })),
            Some(v) => {
                let num = |s: &str, what: &str| -> CliResult<f64> {
                    s.parse::<f64>().map_err(|_| usage(format!("sweep {what} `{s}` is not a number")))
                };
                let count = v[3]
                    .parse::<usize>()
                    .map_err(|_| usage(format!("sweep COUNT `{}` is not a positive integer", v[3])))?;
                SweepSpec::new(&v[0], num(&v[1], "START")?, num(&v[2], "STOP")?, count, args.log).map(Some)
            }
        }
    }
}

fn param_key(var: &str) -> String {
    var.to_ascii_lowercase()
}

/// Evaluates `row` at each sweep point in parallel, keeping input order.
fn run_sweep<F>(
    params: &Params,
    sweep: Option<&SweepSpec>,
    jobs: Option<usize>,
    row: F,
) -> CliResult<Vec<Vec<Cell>>>
where
    F: Fn(&Params) -> Result<Vec<Cell>> + Sync,
{
    let Some(sweep) = sweep else {
        return Ok(vec![row(params)?]);
    };
    let key = param_key(&sweep.var);
    let eval = |x: f64| -> Result<Vec<Cell>> {
        let mut p = params.clone();
        p.set(&key, &format!("{x:e}"));
        let mut out = vec![Cell::Num(x)];
        out.extend(row(&p)?);
        Ok(out)
    };
    let pts = sweep.points();
    let results: Vec<Result<Vec<Cell>>> = match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| usage(format!("cannot start {n} workers: {e}")))?;
            pool.install(|| pts.par_iter().map(|&x| eval(x)).collect())
        }
        None => pts.par_iter().map(|&x| eval(x)).collect(),
    };
    results.into_iter().map(|r| r.map_err(CliError::from)).collect()
}

fn geometry_of(params: &Params, resource: Option<&str>) -> CliResult<Geometry> {
    let raw = match resource {
        Some(r) => r.strip_prefix("tmst-").unwrap_or(r).to_string(),
        None => params.str_or("geometry", "asym").to_string(),
    };
    raw.parse::<Geometry>().map_err(|e| usage(e.to_string()))
}

fn link_setup(p: &Params) -> Result<LinkSetup> {
    Ok(LinkSetup {
        mu: p.f64("mu")?,
        n_th: p.f64("n_th")?,
        eta_ant: p.f64_or("eta_ant", 0.0)?,
        r: p.f64("r")?,
        n: p.f64("n")?,
    })
}

fn air_channel(p: &Params) -> Result<AirChannel> {
    AirChannel::new(p.f64("mu")?, p.f64_or("l", 0.0)?, p.f64("n_th")?, p.f64_or("eta_ant", 0.0)?)
}

fn entanglement_cells(cm: &BipartiteCM) -> Result<Vec<Cell>> {
    let (nu, _) = pts_eigenvalues(cm)?;
    Ok(vec![nu.into(), negativity(cm)?.into(), log_negativity(cm)?.into()])
}

fn header(first: Option<&SweepSpec>, rest: &[&str]) -> Vec<String> {
    first
        .map(|s| s.var.clone())
        .into_iter()
        .chain(rest.iter().map(|s| s.to_string()))
        .collect()
}

fn default_sweep(var: &str, start: f64, stop: f64, count: usize, log: bool) -> SweepSpec {
    SweepSpec {
        var: var.to_string(),
        start,
        stop,
        count,
        log,
    }
}

fn state_row(kind: &str, p: &Params) -> Result<Vec<Cell>> {
    let cm = match kind {
        "tmsv" => BipartiteCM::from_state(&tmsv(p.f64("r")?))?,
        "tmst" => BipartiteCM::from_state(&crate::gaussian::tmst(p.f64("r")?, p.f64("n")?)?)?,
        "lossy" => {
            let g: Geometry = p.str_or("geometry", "asym").parse()?;
            lossy_tmst(&air_channel(p)?, p.f64("r")?, p.f64("n")?, g)?
        }
        "swapped" => {
            let (a, b, g) = link_setup(p)?.swap_inputs(p.f64_or("l", 0.0)?)?;
            let (at, gt) = swap_symmetric(a, b, g)?;
            BipartiteCM::standard(at, at, gt)
        }
        other => {
            return Err(crate::error::invalid(
                "kind",
                format!("expected tmsv, tmst, lossy or swapped, got `{other}`"),
            ))
        }
    };
    let (a, b, g) = cm.standard_params().unwrap_or((f64::NAN, f64::NAN, f64::NAN));
    let mut out: Vec<Cell> = vec![a.into(), b.into(), g.into()];
    out.extend(entanglement_cells(&cm)?);
    out.push(purity(&cm.to_state()?)?.into());
    out.push(cm_validity(a, b, g).theta.into());
    Ok(out)
}

fn negativity_row(p: &Params) -> Result<Vec<Cell>> {
    let r = p.f64("r")?;
    let tau = p.f64("tau")?;
    let l = r.tanh();
    let n0 = negativity_from_nu((-2.0 * r).exp());
    if l == 0.0 {
        let nan = Cell::Num(f64::NAN);
        return Ok(vec![
            n0.into(),
            nan.clone(),
            nan.clone(),
            nan.clone(),
            nan.clone(),
            0.0.into(),
            0.0.into(),
            "subtraction undefined on the vacuum".into(),
        ]);
    }
    Ok(vec![
        n0.into(),
        (ps_tmsv_negativity(l, 1)? - n0).into(),
        (ps_tmsv_negativity(l * tau, 1)? - n0).into(),
        (ps_tmsv_negativity(l, 2)? - n0).into(),
        (ps_tmsv_negativity(l * tau, 2)? - n0).into(),
        success_prob_tmsv(l, tau, 1)?.into(),
        success_prob_tmsv(l, tau, 2)?.into(),
        "".into(),
    ])
}

fn qi_params(p: &Params) -> Result<QiParams> {
    QiParams::new(p.f64("n_s")?, p.f64("n_th")?, p.f64_or("gamma", 0.0)?, p.f64("eta")?)
}

fn bifreq_params(p: &Params) -> Result<BifreqParams> {
    BifreqParams::new(
        p.f64("eta1")?,
        p.f64_or("lambda", 0.0)?,
        p.f64_or("n_r", p.f64("n_s")?)?,
        p.f64_or("n", 0.0)?,
        p.f64("n_th")?,
    )
}

fn qfi_row(family: &str, p: &Params) -> Result<Vec<Cell>> {
    match family {
        "qi" => {
            let q = qi_params(p)?;
            Ok(vec![h_q(&q)?.into(), h_q_numeric(&q)?.into(), h_c(&q)?.into(), h_c_numeric(&q)?.into()])
        }
        "bifreq" => {
            let b = bifreq_params(p)?;
            Ok(vec![h_q_bifreq(&b)?.into(), h_c_bifreq(&b)?.into(), h_c_bifreq_numeric(&b)?.into()])
        }
        other => Err(crate::error::invalid("family", format!("expected qi or bifreq, got `{other}`"))),
    }
}

fn illum_row(p: &Params) -> Result<Vec<Cell>> {
    let q = qi_params(p)?;
    Ok(vec![
        q.eta_eff().into(),
        h_q(&q)?.into(),
        h_c(&q)?.into(),
        gain(&q)?.into(),
        qi_probe_log_negativity(q.n_s, q.n_th)?.into(),
    ])
}

fn bifreq_row(p: &Params, qcrb: bool) -> Result<Vec<Cell>> {
    let b = bifreq_params(p)?;
    let hq = h_q_bifreq(&b)?;
    let hc = h_c_bifreq(&b)?;
    let n_s = b.n_s();
    let mut out: Vec<Cell> = vec![
        n_s.into(),
        hq.into(),
        hc.into(),
        (hq / hc).into(),
        ratio_limit_reflective(n_s, b.n_th).into(),
        ratio_limit_noisy(n_s).into(),
    ];
    if qcrb {
        out.push(qcrb_residual(b.eta1, n_s, b.n_th)?.into());
    }
    Ok(out)
}

/// Fills in default arguments of bare protocol names from the parameters.
fn parse_protocols(list: &str, p: &Params) -> CliResult<Vec<(String, Protocol)>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let full = match item {
            "concat" => format!("concat:{}", p.f64_or("k", 2.0).map_err(|e| usage(e.to_string()))?),
            "ps" => format!("ps:{}", p.f64("tau").map_err(|e| usage(e.to_string()))?),
            "gain" | "swap-gain" => {
                format!("{item}:{}", p.f64("inv_gain").map_err(|e| usage(e.to_string()))?)
            }
            other => other.to_string(),
        };
        let proto: Protocol = full.parse().map_err(|e: Error| usage(e.to_string()))?;
        out.push((item.to_string(), proto));
    }
    if out.is_empty() {
        return Err(usage("no protocol given"));
    }
    Ok(out)
}

fn distill_row(p: &Params, geometry: Geometry) -> Result<Vec<Cell>> {
    let setup = link_setup(p)?;
    let l = p.f64_or("l", 0.0)?;
    let tau = p.f64("tau")?;
    let mode = match p.get("mode") {
        Some(m) => m.parse::<RegaussMode>()?,
        None => match geometry {
            Geometry::Sym => RegaussMode::Sym,
            Geometry::Asym => RegaussMode::Asym,
        },
    };
    let cm = setup.resource(geometry, l)?;
    let f0 = fidelity_gaussian(&cm)?;
    let heur = ps2_heuristic(&cm)?;
    let rg_h = regaussify(&cm, heur.h, mode);
    let prob = ps2_gaussian(&cm, tau)?;
    let g = prob.correction_g()?;
    let rg_p = regaussify(&prob.envelope(), g, mode);
    let f_p = fidelity_gaussian(&rg_p.cm)?;
    Ok(vec![
        prob.success_prob.into(),
        g.into(),
        heur.h.into(),
        f0.into(),
        f_p.into(),
        fidelity_gaussian(&rg_h.cm)?.into(),
        rg_p.theta.into(),
        rg_h.theta.into(),
        log_negativity(&cm)?.into(),
        log_negativity(&rg_p.cm)?.into(),
        log_negativity(&rg_h.cm)?.into(),
        negativity(&cm)?.into(),
        negativity(&rg_p.cm)?.into(),
        negativity(&rg_h.cm)?.into(),
        (prob.success_prob * (f_p - f0)).into(),
    ])
}

fn swap_row(p: &Params) -> Result<Vec<Cell>> {
    let setup = link_setup(p)?;
    let l = p.f64_or("l", 0.0)?;
    let (a, b, g) = setup.swap_inputs(l)?;
    let (at, gt) = swap_symmetric(a, b, g)?;
    let swapped = BipartiteCM::standard(at, at, gt);
    let bare = setup.resource(Geometry::Asym, l)?;
    let mut out: Vec<Cell> = vec![a.into(), b.into(), g.into(), at.into(), gt.into()];
    out.push(cm_validity(at, at, gt).theta.into());
    out.push(pts_eigenvalues(&bare)?.0.into());
    out.push(pts_eigenvalues(&swapped)?.0.into());
    out.push(log_negativity(&bare)?.into());
    out.push(log_negativity(&swapped)?.into());
    out.push(fidelity_gaussian(&bare)?.into());
    out.push(fidelity_gaussian(&swapped)?.into());
    Ok(out)
}

fn channel_row(p: &Params) -> Result<Vec<Cell>> {
    let ch = air_channel(p)?;
    let (r, n) = (p.f64("r")?, p.f64("n")?);
    let asym = lossy_tmst(&ch, r, n, Geometry::Asym)?;
    let sym = lossy_tmst(&ch, r, n, Geometry::Sym)?;
    Ok(vec![
        ch.eta_env().into(),
        ch.eta_eff(Geometry::Asym).into(),
        ch.eta_eff(Geometry::Sym).into(),
        pts_eigenvalues(&asym)?.0.into(),
        pts_eigenvalues(&sym)?.0.into(),
        log_negativity(&asym)?.into(),
        log_negativity(&sym)?.into(),
    ])
}

fn space_n_th(p: &Params) -> Result<f64> {
    match p.get("n_th") {
        Some(_) => p.f64("n_th"),
        None => bose_einstein(p.f64("nu")?, p.f64("temperature")?),
    }
}

fn satellite_row(p: &Params) -> Result<Vec<Cell>> {
    let d = p.f64("d")?;
    let g = LinkGeometry {
        nu: p.f64("nu")?,
        d,
        a: p.f64("a")?,
        e_a: p.f64_or("e_a", 1.0)?,
        w0: p.f64("w0")?,
        a_r: p.f64("a_r")?,
        r0: p.f64_or("r0", d)?,
    };
    let n_th = space_n_th(p)?;
    let r = p.f64("r")?;
    let wl = p.f64_or("wavelength", g.wavelength())?;
    let eta_lim = p.f64_or("eta_lim", preservation_threshold(n_th, r, Geometry::Sym))?;
    Ok(vec![
        fspl(g.nu, d).1.into(),
        friis(&g)?.into(),
        tau_path(&g)?.into(),
        tau_diffraction(&g)?.into(),
        g.spot_size().into(),
        preservation_threshold(n_th, r, Geometry::Asym).into(),
        preservation_threshold(n_th, r, Geometry::Sym).into(),
        entanglement_region(wl, eta_lim, d).into(),
    ])
}

/// One headline number with its target and tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub name: &'static str,
    pub value: f64,
    pub target: f64,
    pub tol: f64,
}

impl Anchor {
    pub fn pass(&self) -> bool {
        (self.value - self.target).abs() <= self.tol
    }
}

/// Evaluates every headline number. Link anchors use `p`, which defaults to
/// the `table1` preset; the others use their own built-in presets.
pub fn anchors(p: &Params) -> Result<Vec<Anchor>> {
    let mut out = Vec::new();
    let mut push = |name, value, target, tol| out.push(Anchor { name, value, target, tol });
    let setup = link_setup(p)?;
    let ch = air_channel(p)?;
    let (r, n) = (setup.r, setup.n);

    push("reach_asym_m", l_max(&ch, r, n, Geometry::Asym)?, 550.0, 5.0);
    push("reach_sym_m", l_max(&ch, r, n, Geometry::Sym)?, 480.0, 5.0);

    let builtin = PresetFile::builtin();
    for (preset, asym, sym) in [("water_avg", 450.0, 390.0), ("water_max", 400.0, 350.0)] {
        let w = builtin.resolve(preset)?;
        let wc = air_channel(&w)?;
        let (wr, wn) = (w.f64("r")?, w.f64("n")?);
        let (na, ns) = match preset {
            "water_avg" => ("reach_water_avg_asym_m", "reach_water_avg_sym_m"),
            _ => ("reach_water_max_asym_m", "reach_water_max_sym_m"),
        };
        push(na, l_max(&wc, wr, wn, Geometry::Asym)?, asym, 0.02 * asym);
        push(ns, l_max(&wc, wr, wn, Geometry::Sym)?, sym, 0.02 * sym);
    }

    let hi = 2000.0;
    let inv_gain = p.f64_or("inv_gain", 0.008)?;
    let bare_asym = classical_limit_distance(&setup, Geometry::Asym, Protocol::Bare, hi)?;
    push("teleport_ideal_asym_m", bare_asym, 479.0, 1.0);
    push(
        "teleport_ideal_sym_m",
        classical_limit_distance(&setup, Geometry::Sym, Protocol::Bare, hi)?,
        479.0,
        1.0,
    );
    push(
        "teleport_gain_asym_m",
        classical_limit_distance(&setup, Geometry::Asym, Protocol::FiniteGain { inv_gain }, hi)?,
        434.0,
        1.0,
    );
    push(
        "teleport_gain_sym_m",
        classical_limit_distance(&setup, Geometry::Sym, Protocol::FiniteGain { inv_gain }, hi)?,
        429.0,
        1.0,
    );
    push(
        "teleport_swap_gain_m",
        classical_limit_distance(&setup, Geometry::Asym, Protocol::SwappedFiniteGain { inv_gain }, hi)?,
        416.0,
        1.0,
    );
    let swapped = classical_limit_distance(&setup, Geometry::Asym, Protocol::Swapped, hi)?;
    push("swap_extension_pct", 100.0 * (swapped / bare_asym - 1.0), 14.0, 1.0);

    let (heur, prob) = distillation_gains(&setup, p.f64_or("tau", 0.95)?)?;
    push("distill_heuristic_gain_pct", 100.0 * (heur - 1.0), 46.0, 1.0);
    push("distill_probabilistic_gain_pct", 100.0 * (prob - 1.0), 28.0, 1.0);

    let qi = QiParams::new(1e-4, 1e4, 0.0, 1e-4)?;
    push("qi_gain_db", 10.0 * gain(&qi)?.log10(), 10.0 * 2f64.log10(), 5e-3);
    push("bifreq_reflective_limit", ratio_limit_reflective(2.9, 1e3), 6.4, 0.1);

    push("satellite_threshold_asym", preservation_threshold(11.0, 1.0, Geometry::Asym), 0.0833, 1e-4);
    push("satellite_threshold_sym", preservation_threshold(11.0, 1.0, Geometry::Sym), 0.0378, 1e-3);
    push("satellite_aperture_m2", entanglement_region(0.06, 0.038, 1000.0), 35.0, 1.0);

    push("thermal_photons_300k", bose_einstein(5e9, 300.0)?, 1250.0, 1.0);
    push("thermal_photons_2k7", bose_einstein(5e9, 2.7)?, 11.0, 0.5);
    Ok(out)
}

/// Negativity ratios `(heuristic, probabilistic)` of the re-Gaussified
/// symmetric resource over the bare one at zero distance.
pub fn distillation_gains(setup: &LinkSetup, tau: f64) -> Result<(f64, f64)> {
    let cm = setup.resource(Geometry::Sym, 0.0)?;
    let n0 = negativity(&cm)?;
    let h = ps2_heuristic(&cm)?.h;
    let heur = negativity(&regaussify(&cm, h, RegaussMode::Sym).cm)?;
    let o = ps2_gaussian(&cm, tau)?;
    let prob = negativity(&regaussify(&o.envelope(), o.correction_g()?, RegaussMode::Sym).cm)?;
    Ok((heur / n0, prob / n0))
}

/// Inverts an entanglement reach into the attenuation density giving it.
pub fn calibrate_mu(target_l: f64, p: &Params) -> Result<f64> {
    mu_for_reach(target_l, p.f64("r")?, p.f64("n")?, p.f64("n_th")?)
}

fn default_preset(cmd: &Command) -> &'static str {
    match cmd {
        Command::Qfi { family, .. } if family == "bifreq" => "bifreq",
        Command::Qfi { .. } | Command::Illum { .. } => "qi",
        Command::Bifreq { .. } => "bifreq",
        Command::Satellite { .. } => "satellite",
        _ => "table1",
    }
}

/// Outcome of a parsed invocation: the report and whether anchors failed.
pub struct Outcome {
    pub report: RunReport,
    pub anchors_failed: bool,
    pub default_format: Format,
}

/// Runs a parsed command without touching stdout.
pub fn execute(cli: &Cli) -> CliResult<Outcome> {
    let presets = match &cli.common.preset_file {
        Some(path) => PresetFile::load(path).map_err(|e| usage(e.to_string()))?,
        None => PresetFile::builtin(),
    };
    let preset = cli
        .common
        .preset
        .clone()
        .unwrap_or_else(|| default_preset(&cli.command).to_string());
    let mut params = presets.resolve(&preset).map_err(|e| usage(e.to_string()))?;
    for s in &cli.common.set {
        params.apply_override(s).map_err(|e| usage(e.to_string()))?;
    }
    let jobs = cli.common.jobs;
    if jobs == Some(0) {
        return Err(usage("--jobs must be at least 1"));
    }

    let mut anchors_failed = false;
    let mut default_format = Format::Csv;
    let (name, provenance, columns, rows) = match &cli.command {
        Command::State { kind, sweep } => {
            let def = match kind.as_str() {
                "tmsv" | "tmst" => default_sweep("r", 0.0, 2.0, 21, false),
                _ => default_sweep("L", 0.0, 600.0, 61, false),
            };
            let sw = SweepSpec::from_args(sweep, def)?;
            let cols = header(
                sw.as_ref(),
                &["alpha", "beta", "gamma", "nu_minus", "negativity", "log_negativity", "purity", "theta"],
            );
            let kind = kind.clone();
            let rows = run_sweep(&params, sw.as_ref(), jobs, |p| state_row(&kind, p))?;
            ("state", "standard-form covariance matrix and entanglement of a two-mode state", cols, rows)
        }
        Command::Negativity { sweep } => {
            let sw = SweepSpec::from_args(sweep, default_sweep("r", 0.0, 2.0, 101, false))?;
            let cols = header(
                sw.as_ref(),
                &[
                    "N_TMSV",
                    "dN_2PS_heur",
                    "dN_2PS_prob",
                    "dN_4PS_heur",
                    "dN_4PS_prob",
                    "P2",
                    "P4",
                    "note",
                ],
            );
            let rows = run_sweep(&params, sw.as_ref(), jobs, negativity_row)?;
            ("negativity", "negativity change from photon subtraction on a squeezed vacuum", cols, rows)
        }
        Command::Qfi { family, sweep } => {
            let (def, cols): (_, &[&str]) = match family.as_str() {
                "bifreq" => (
                    default_sweep("n_s", 0.1, 5.0, 50, false),
                    &["h_q", "h_c", "h_c_numeric"],
                ),
                _ => (
                    default_sweep("n_s", 1e-3, 10.0, 41, true),
                    &["h_q", "h_q_numeric", "h_c", "h_c_numeric"],
                ),
            };
            let sw = SweepSpec::from_args(sweep, def)?;
            let cols = header(sw.as_ref(), cols);
            let fam = family.clone();
            let rows = run_sweep(&params, sw.as_ref(), jobs, |p| qfi_row(&fam, p))?;
            ("qfi", "Gaussian quantum Fisher information, numeric against closed form", cols, rows)
        }
        Command::Illum { sweep } => {
            let sw = SweepSpec::from_args(sweep, default_sweep("n_s", 1e-4, 10.0, 41, true))?;
            let cols = header(sw.as_ref(), &["eta_eff", "h_q", "h_c", "ratio", "probe_log_negativity"]);
            let rows = run_sweep(&params, sw.as_ref(), jobs, illum_row)?;
            ("illum", "quantum illumination with absorption loss: QFI ratio", cols, rows)
        }
        Command::Bifreq { qcrb, sweep } => {
            let sw = SweepSpec::from_args(sweep, default_sweep("n_s", 0.1, 5.0, 50, false))?;
            let mut base = vec!["n_s_eff", "h_q", "h_c", "ratio", "limit_reflective", "limit_noisy"];
            if *qcrb {
                base.push("qcrb_residual");
            }
            let cols = header(sw.as_ref(), &base);
            let q = *qcrb;
            let rows = run_sweep(&params, sw.as_ref(), jobs, |p| bifreq_row(p, q))?;
            ("bifreq", "bi-frequency illumination: quantum over classical Fisher information", cols, rows)
        }
        Command::Teleport {
            resource,
            protocol,
            classical_limit,
            sweep,
        } => {
            let geo = geometry_of(&params, resource.as_deref())?;
            let protos = parse_protocols(protocol, &params)?;
            if *classical_limit {
                let setup = link_setup(&params)?;
                let hi = params.f64_or("l_hi", 2000.0)?;
                let results: Vec<Result<Vec<Cell>>> = protos
                    .par_iter()
                    .map(|(label, pr)| {
                        Ok(vec![label.as_str().into(), classical_limit_distance(&setup, geo, *pr, hi)?.into()])
                    })
                    .collect();
                let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
                (
                    "teleport",
                    "distance where teleportation fidelity reaches the classical 1/2",
                    vec!["protocol".to_string(), "classical_limit_m".to_string()],
                    rows,
                )
            } else {
                let sw = SweepSpec::from_args(sweep, default_sweep("L", 0.0, 600.0, 601, false))?;
                let labels: Vec<String> = protos.iter().map(|(l, _)| format!("F_{l}")).collect();
                let label_refs: Vec<&str> = labels.iter().map(String::as_str).collect();
                let cols = header(sw.as_ref(), &label_refs);
                let rows = run_sweep(&params, sw.as_ref(), jobs, |p| {
                    let setup = link_setup(p)?;
                    let l = p.f64_or("l", 0.0)?;
                    protos
                        .iter()
                        .map(|(_, pr)| fidelity_at(&setup, geo, *pr, l).map(Cell::Num))
                        .collect()
                })?;
                ("teleport", "average teleportation fidelity of a coherent state over an open-air link", cols, rows)
            }
        }
        Command::Distill { resource, sweep } => {
            let geo = geometry_of(&params, resource.as_deref())?;
            let sw = SweepSpec::from_args(sweep, default_sweep("L", 0.0, 500.0, 51, false))?;
            let cols = header(
                sw.as_ref(),
                &[
                    "success_prob",
                    "g",
                    "h",
                    "F_bare",
                    "F_ps",
                    "F_heuristic",
                    "theta_ps",
                    "theta_heuristic",
                    "EN_bare",
                    "EN_ps",
                    "EN_heuristic",
                    "N_bare",
                    "N_ps",
                    "N_heuristic",
                    "efficiency",
                ],
            );
            let rows = run_sweep(&params, sw.as_ref(), jobs, |p| distill_row(p, geo))?;
            ("distill", "two-photon subtraction and re-Gaussified resources over distance", cols, rows)
        }
        Command::Swap { sweep } => {
            let sw = SweepSpec::from_args(sweep, default_sweep("L", 0.0, 600.0, 61, false))?;
            let cols = header(
                sw.as_ref(),
                &[
                    "alpha",
                    "beta",
                    "gamma",
                    "alpha_swapped",
                    "gamma_swapped",
                    "theta",
                    "nu_minus_bare",
                    "nu_minus_swapped",
                    "EN_bare",
                    "EN_swapped",
                    "F_bare",
                    "F_swapped",
                ],
            );
            let rows = run_sweep(&params, sw.as_ref(), jobs, swap_row)?;
            ("swap", "entanglement swapping at a midpoint relay against direct transmission", cols, rows)
        }
        Command::Channel { reach, sweep } => {
            if *reach {
                let ch = air_channel(&params)?;
                let (r, n) = (params.f64("r")?, params.f64("n")?);
                let rows = [Geometry::Asym, Geometry::Sym]
                    .into_iter()
                    .map(|g| -> Result<Vec<Cell>> {
                        let label = match g {
                            Geometry::Asym => "asym",
                            Geometry::Sym => "sym",
                        };
                        Ok(vec![label.into(), l_max(&ch, r, n, g)?.into()])
                    })
                    .collect::<Result<Vec<_>>>()?;
                (
                    "channel",
                    "entanglement reach of a lossy two-mode squeezed thermal state",
                    vec!["geometry".to_string(), "l_max_m".to_string()],
                    rows,
                )
            } else {
                let sw = SweepSpec::from_args(sweep, default_sweep("L", 0.0, 600.0, 61, false))?;
                let cols = header(
                    sw.as_ref(),
                    &["eta_env", "eta_eff_asym", "eta_eff_sym", "nu_asym", "nu_sym", "EN_asym", "EN_sym"],
                );
                let rows = run_sweep(&params, sw.as_ref(), jobs, channel_row)?;
                ("channel", "open-air attenuation and entanglement versus distance", cols, rows)
            }
        }
        Command::Satellite { sweep } => {
            let sw = SweepSpec::from_args(sweep, default_sweep("d", 1e3, 1e7, 41, true))?;
            let cols = header(
                sw.as_ref(),
                &[
                    "fspl_db",
                    "friis",
                    "tau_path",
                    "tau_diffraction",
                    "spot_size_m",
                    "threshold_asym",
                    "threshold_sym",
                    "min_aperture_product_m2",
                ],
            );
            let rows = run_sweep(&params, sw.as_ref(), jobs, satellite_row)?;
            ("satellite", "diffraction-limited link budget and entanglement thresholds", cols, rows)
        }
        Command::Summary => {
            default_format = Format::Json;
            let list = anchors(&params)?;
            anchors_failed = list.iter().any(|a| !a.pass());
            let rows = list
                .iter()
                .map(|a| {
                    vec![
                        a.name.into(),
                        a.value.into(),
                        a.target.into(),
                        a.tol.into(),
                        a.pass().into(),
                    ]
                })
                .collect();
            (
                "summary",
                "headline numbers against stored targets and tolerances",
                ["anchor", "value", "target", "tolerance", "pass"].map(String::from).to_vec(),
                rows,
            )
        }
    };

    let report = RunReport {
        command: format!("{name} --preset {preset}"),
        parameters: params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
        provenance: provenance.to_string(),
        columns,
        rows,
    };
    Ok(Outcome {
        report,
        anchors_failed,
        default_format,
    })
}

/// Parses `args`, runs the command and writes the table. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match execute(&cli) {
        Ok(o) => o,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            return EXIT_USAGE;
        }
        Err(CliError::Compute(e)) => {
            eprintln!("error: {e}");
            return EXIT_COMPUTE;
        }
    };
    let text = match cli.common.format.unwrap_or(outcome.default_format) {
        Format::Csv => outcome.report.to_csv(),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.report.to_json()).expect("json values serialize");
            s.push('\n');
            s
        }
    };
    let written = match &cli.common.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return EXIT_COMPUTE;
    }
    if outcome.anchors_failed {
        EXIT_ANCHOR
    } else {
        EXIT_OK
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_has_17_significant_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(478.5), "4.7850000000000000e2");
        assert_eq!(format_number(f64::NAN), "NaN");
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300] {
            assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn sweep_points() {
        let s = SweepSpec::new("L", 0.0, 10.0, 11, false).unwrap();
        assert_eq!(s.points()[3], 3.0);
        let s = SweepSpec::new("d", 1.0, 100.0, 3, true).unwrap();
        assert!((s.points()[1] - 10.0).abs() < 1e-12);
        assert!(SweepSpec::new("x", 1.0, 1.0, 3, false).is_err());
        assert!(SweepSpec::new("x", 0.0, 1.0, 1, false).is_err());
        assert!(SweepSpec::new("x", 0.0, 1.0, 3, true).is_err());
    }

    #[test]
    fn csv_quotes_fields() {
        let r = RunReport {
            command: "x".into(),
            parameters: vec![],
            provenance: String::new(),
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec!["x,\"y\"".into(), 1.0.into()]],
        };
        assert_eq!(r.to_csv(), "a,b\r\n\"x,\"\"y\"\"\",1.0000000000000000e0\r\n");
    }

    #[test]
    fn protocol_defaults_come_from_parameters() {
        let p = PresetFile::builtin().resolve("table1").unwrap();
        let v = parse_protocols("ps,gain,swap-gain:0.01", &p).unwrap();
        assert_eq!(v[0].1, Protocol::Probabilistic { tau: 0.95 });
        assert_eq!(v[1].1, Protocol::FiniteGain { inv_gain: 0.008 });
        assert_eq!(v[2].1, Protocol::SwappedFiniteGain { inv_gain: 0.01 });
        assert!(parse_protocols("warp", &p).is_err());
    }
}
