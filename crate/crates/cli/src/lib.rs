//! Sweeps over the finite Kronig-Penney lattice, emitted as CSV.
//!
//! Every subcommand builds a [`SweepTable`] from laboratory-unit flags (eV,
//! nm) converted once on entry; `--model-units` skips the conversion.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use kronig_core::selfcheck::{self, Fault, SuiteReport};
use kronig_core::units::UnitSystem;
use kronig_core::{
    band_edges, band_structure, continuum_dispersion, resistivity_limit, resistivity_n,
    transmission_limit, transmission_n, BandStructure, BlochCondition, DiracCombParams,
    ModelParams,
};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Physics(#[from] kronig_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("self-check failed in suite {0}")]
    SelfCheck(String),
}

impl CliError {
    /// 2 for usage errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "kronig",
    version,
    about = "Transmission, resistivity and bands of a finite Kronig-Penney lattice"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the table here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Read every energy and length flag in model units (0.038 eV, 1 nm).
    #[arg(long, global = true)]
    pub model_units: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// S_N against energy for one or more N, plus the continuum limit.
    Transmit(TransmitArgs),
    /// Band structure E(xi) of the finite-cell lattice.
    Bands(BandsArgs),
    /// Landauer resistivity over an energy or length sweep.
    Resist(ResistArgs),
    /// Band structure of the Dirac-comb lattice.
    Comb(CombArgs),
    /// Run the embedded oracle suites.
    Selfcheck(SelfcheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct LatticeArgs {
    /// Barrier height.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub v_ev: f64,
    /// Barrier to well width ratio.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    pub gamma: f64,
    /// Device length.
    #[arg(long, default_value_t = 500.0, allow_negative_numbers = true)]
    pub l_nm: f64,
    /// Cell counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "50")]
    pub n: Vec<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.001, allow_negative_numbers = true)]
    pub emin_ev: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub emax_ev: f64,
    #[arg(long, default_value_t = 2000)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct TransmitArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BandLimitArgs {
    /// Upper end of the scanned energy range.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub emax_ev: f64,
    /// Keep at most this many bands.
    #[arg(long)]
    pub max_bands: Option<usize>,
    /// Samples of xi per band.
    #[arg(long, default_value_t = 129)]
    pub xi_steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct BandsArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub limits: BandLimitArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepKind {
    Energy,
    Length,
}

#[derive(Debug, Clone, Args)]
pub struct ResistArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = SweepKind::Energy)]
    pub sweep: SweepKind,
    #[arg(long, default_value_t = 100.0, allow_negative_numbers = true)]
    pub lmin_nm: f64,
    #[arg(long, default_value_t = 1000.0, allow_negative_numbers = true)]
    pub lmax_nm: f64,
    /// Fixed energy for a length sweep.
    #[arg(long, conflicts_with = "e_rel", allow_negative_numbers = true)]
    pub e_ev: Option<f64>,
    /// Fixed energy for a length sweep, as a multiple of E_o.
    #[arg(long, allow_negative_numbers = true)]
    pub e_rel: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct CombArgs {
    /// P = Lambda delta / 2.
    #[arg(long, allow_negative_numbers = true)]
    pub p_strength: f64,
    /// Spacing between the delta barriers.
    #[arg(long, allow_negative_numbers = true)]
    pub delta: f64,
    #[command(flatten)]
    pub limits: BandLimitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SelfcheckArgs {
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Corrupt one ingredient on purpose.
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    Units,
    Chebyshev,
}

impl From<FaultArg> for Fault {
    fn from(f: FaultArg) -> Fault {
        match f {
            FaultArg::Units => Fault::EnergyQuantum,
            FaultArg::Chebyshev => Fault::ChebyshevIndex,
        }
    }
}

/// One CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
}

impl Cell {
    fn render(self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) if x == f64::NEG_INFINITY => "-inf".to_string(),
            Cell::Num(x) if x == f64::INFINITY => "inf".to_string(),
            // + 0.0 folds -0 into 0
            Cell::Num(x) => format!("{:.16e}", x + 0.0),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Cell::Int(i) => i as f64,
            Cell::Num(x) => x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl SweepTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_f64()).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> CliResult<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ascii"))
    }
}

/// Flag values converted to model units.
#[derive(Debug, Clone, Copy)]
pub struct Units {
    sys: UnitSystem,
    model: bool,
}

impl Units {
    pub fn new(model_units: bool) -> Self {
        Units {
            sys: UnitSystem::STANDARD,
            model: model_units,
        }
    }

    fn energy(&self, x: f64) -> f64 {
        if self.model {
            x
        } else {
            self.sys.ev_to_model(x)
        }
    }

    fn length(&self, x: f64) -> f64 {
        if self.model {
            x
        } else {
            self.sys.nm_to_model(x)
        }
    }

    fn to_ev(self, e: f64) -> f64 {
        self.sys.model_to_ev(e)
    }

    fn to_nm(self, x: f64) -> f64 {
        self.sys.model_to_nm(x)
    }
}

fn lattices(a: &LatticeArgs, u: Units) -> CliResult<Vec<ModelParams>> {
    if a.n.is_empty() {
        return Err(CliError::Usage("--n needs at least one value".into()));
    }
    a.n.iter()
        .map(|&n| {
            Ok(ModelParams::new(
                u.energy(a.v_ev),
                a.gamma,
                u.length(a.l_nm),
                n,
            )?)
        })
        .collect()
}

/// `steps` points from `lo` to `hi` inclusive.
fn linear_grid(lo: f64, hi: f64, steps: usize) -> CliResult<Vec<f64>> {
    if steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if !(lo.is_finite() && hi.is_finite()) || (steps > 1 && hi <= lo) {
        return Err(CliError::Usage(format!(
            "sweep range [{lo}, {hi}] must be finite and increasing"
        )));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let h = (hi - lo) / (steps - 1) as f64;
    let mut g: Vec<f64> = (0..steps).map(|i| lo + h * i as f64).collect();
    g[steps - 1] = hi;
    Ok(g)
}

fn energy_grid(g: &GridArgs, u: Units) -> CliResult<Vec<f64>> {
    let (lo, hi) = (u.energy(g.emin_ev), u.energy(g.emax_ev));
    if lo.is_nan() || lo <= 0.0 {
        return Err(
            kronig_core::Error::Domain(format!("E_min must be > 0, got {}", g.emin_ev)).into(),
        );
    }
    linear_grid(lo, hi, g.steps)
}

/// Evaluates `f` over the grid in parallel, keeping grid order.
fn par_rows<F>(grid: &[f64], f: F) -> CliResult<Vec<Vec<Cell>>>
where
    F: Fn(f64) -> CliResult<Vec<Cell>> + Sync,
{
    grid.par_iter().map(|&x| f(x)).collect()
}

pub fn cmd_transmit(a: &TransmitArgs, u: Units) -> CliResult<SweepTable> {
    let ps = lattices(&a.lattice, u)?;
    let grid = energy_grid(&a.grid, u)?;
    let base = ps[0];
    let mut header = vec!["E_eV".to_string(), "E_model".to_string()];
    header.extend(ps.iter().map(|p| format!("S_N{}", p.n)));
    header.extend(ps.iter().map(|p| format!("log10_S_N{}", p.n)));
    header.push("S_bar".into());
    let rows = par_rows(&grid, |e| {
        let ts = ps
            .iter()
            .map(|p| transmission_n(e, p))
            .collect::<kronig_core::Result<Vec<_>>>()?;
        let limit = transmission_limit(e, base.gamma, base.v, base.l)?;
        let mut row = vec![Cell::Num(u.to_ev(e)), Cell::Num(e)];
        row.extend(ts.iter().map(|t| Cell::Num(t.s)));
        row.extend(ts.iter().map(|t| Cell::Num(t.log10_s)));
        row.push(Cell::Num(limit.s));
        Ok(row)
    })?;
    Ok(SweepTable { header, rows })
}

fn band_header() -> Vec<String> {
    ["band_index", "xi", "E_model", "E_ev", "E_continuum"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

/// Scans up to `e_max`, or (with `max_bands` and no explicit range) grows the
/// range until enough complete bands are found.
fn solve_bands<C: BlochCondition + Sync>(
    cond: &C,
    e_max: f64,
    limits: &BandLimitArgs,
    explicit_emax: bool,
) -> CliResult<BandStructure> {
    let mut e_max = e_max;
    if let (Some(mb), false) = (limits.max_bands, explicit_emax) {
        for _ in 0..60 {
            let s = band_edges(cond, e_max)?;
            if cond.is_gapless() || s.bands.iter().filter(|b| b.complete).count() >= mb {
                break;
            }
            e_max *= 2.0;
        }
    }
    Ok(band_structure(
        cond,
        e_max,
        limits.max_bands,
        limits.xi_steps,
    )?)
}

fn band_rows(s: &BandStructure, e_o: f64, u: Units) -> Vec<Vec<Cell>> {
    let mut rows = Vec::new();
    for b in &s.bands {
        for (&xi, &e) in b.xi_samples.iter().zip(&b.e_samples) {
            rows.push(vec![
                Cell::Int(b.index as u64),
                Cell::Num(xi),
                Cell::Num(e),
                Cell::Num(u.to_ev(e)),
                Cell::Num(continuum_dispersion(xi, e_o)),
            ]);
        }
    }
    rows
}

pub fn cmd_bands(a: &BandsArgs, u: Units, explicit_emax: bool) -> CliResult<SweepTable> {
    let ps = lattices(&a.lattice, u)?;
    if ps.len() != 1 {
        return Err(CliError::Usage("bands takes a single --n value".into()));
    }
    let p = ps[0];
    let s = solve_bands(&p, u.energy(a.limits.emax_ev), &a.limits, explicit_emax)?;
    Ok(SweepTable {
        header: band_header(),
        rows: band_rows(&s, p.e_o(), u),
    })
}

pub fn cmd_comb(a: &CombArgs, u: Units, explicit_emax: bool) -> CliResult<SweepTable> {
    let d = DiracCombParams::new(a.p_strength, u.length(a.delta))?;
    let s = solve_bands(&d, u.energy(a.limits.emax_ev), &a.limits, explicit_emax)?;
    // E_o = gamma V / (1 + gamma) tends to Lambda / delta in the comb limit
    let e_o = d.lambda_cap / d.delta;
    Ok(SweepTable {
        header: band_header(),
        rows: band_rows(&s, e_o, u),
    })
}

pub fn cmd_resist(a: &ResistArgs, u: Units) -> CliResult<SweepTable> {
    let ps = lattices(&a.lattice, u)?;
    let base = ps[0];
    let per_n = |p: &ModelParams| {
        [
            format!("S_N{}", p.n),
            format!("rho_N{}", p.n),
            format!("log10_rho_N{}", p.n),
        ]
    };
    let limit_cols = ["S_bar", "rho_bar", "log10_rho_bar"].map(String::from);
    let eval = |e: f64, ps: &[ModelParams]| -> CliResult<Vec<Cell>> {
        let mut row = Vec::new();
        for p in ps {
            let t = transmission_n(e, p)?;
            let r = resistivity_n(e, p)?;
            row.extend([Cell::Num(t.s), Cell::Num(r.rho), Cell::Num(r.log10_rho)]);
        }
        let b = ps[0];
        let t = transmission_limit(e, b.gamma, b.v, b.l)?;
        let r = resistivity_limit(e, b.gamma, b.v, b.l)?;
        row.extend([Cell::Num(t.s), Cell::Num(r.rho), Cell::Num(r.log10_rho)]);
        Ok(row)
    };
    match a.sweep {
        SweepKind::Energy => {
            let grid = energy_grid(&a.grid, u)?;
            let mut header = vec!["E_eV".to_string(), "E_model".to_string()];
            header.extend(ps.iter().flat_map(per_n));
            header.extend(limit_cols);
            let rows = par_rows(&grid, |e| {
                let mut row = vec![Cell::Num(u.to_ev(e)), Cell::Num(e)];
                row.extend(eval(e, &ps)?);
                Ok(row)
            })?;
            Ok(SweepTable { header, rows })
        }
        SweepKind::Length => {
            let e = match (a.e_ev, a.e_rel) {
                (Some(e), None) => u.energy(e),
                (None, Some(r)) => r * base.e_o(),
                _ => {
                    return Err(CliError::Usage(
                        "a length sweep needs exactly one of --e-ev or --e-rel".into(),
                    ))
                }
            };
            if e.is_nan() || e <= 0.0 {
                return Err(
                    kronig_core::Error::Domain(format!("energy must be > 0, got {e}")).into(),
                );
            }
            let (lo, hi) = (u.length(a.lmin_nm), u.length(a.lmax_nm));
            if lo.is_nan() || lo <= 0.0 {
                return Err(kronig_core::Error::Domain(format!(
                    "L_min must be > 0, got {}",
                    a.lmin_nm
                ))
                .into());
            }
            let grid = linear_grid(lo, hi, a.grid.steps)?;
            let mut header = vec!["L_nm".to_string(), "L_model".to_string()];
            header.extend(ps.iter().flat_map(per_n));
            header.extend(limit_cols);
            let rows = par_rows(&grid, |l| {
                let at_l: Vec<ModelParams> = ps.iter().map(|p| ModelParams { l, ..*p }).collect();
                let mut row = vec![Cell::Num(u.to_nm(l)), Cell::Num(l)];
                row.extend(eval(e, &at_l)?);
                Ok(row)
            })?;
            Ok(SweepTable { header, rows })
        }
    }
}

/// Runs the oracle suites and writes one summary line per suite.
pub fn cmd_selfcheck<W: Write>(a: &SelfcheckArgs, mut out: W) -> CliResult<Vec<SuiteReport>> {
    let fault = a.inject_fault.map(Fault::from).unwrap_or_default();
    let reports = selfcheck::run_all(a.seed, fault);
    for r in &reports {
        writeln!(out, "{r}")?;
    }
    out.flush()?;
    match reports.iter().find(|r| !r.passed()) {
        Some(r) => Err(CliError::SelfCheck(r.name.to_string())),
        None => Ok(reports),
    }
}

/// Whether `--emax-ev` appeared on the command line.
pub fn emax_given(args: &[String]) -> bool {
    args.iter()
        .any(|a| a == "--emax-ev" || a.starts_with("--emax-ev="))
}

/// Executes a parsed command, writing to `--output` or `stdout`.
pub fn run<W: Write>(cli: &Cli, explicit_emax: bool, stdout: W) -> CliResult<()> {
    let u = Units::new(cli.model_units);
    let sink = |table: SweepTable, stdout: W| -> CliResult<()> {
        match &cli.output {
            Some(path) => table.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?)),
            None => table.write_csv(stdout),
        }
    };
    match &cli.command {
        Command::Transmit(a) => sink(cmd_transmit(a, u)?, stdout),
        Command::Bands(a) => sink(cmd_bands(a, u, explicit_emax)?, stdout),
        Command::Resist(a) => sink(cmd_resist(a, u)?, stdout),
        Command::Comb(a) => sink(cmd_comb(a, u, explicit_emax)?, stdout),
        Command::Selfcheck(a) => match &cli.output {
            Some(path) => cmd_selfcheck(a, std::fs::File::create(path)?).map(|_| ()),
            None => cmd_selfcheck(a, stdout).map(|_| ()),
        },
    }
}
