//! Reproducible file-emitting commands behind the CLI.
//!
//! Every command writes its artifacts into an output directory and finishes
//! with a `manifest.json` listing each emitted file with a SHA-256 content
//! hash. Identical `(command, seed)` produce byte-identical artifacts and
//! manifests, regardless of internal parallelism: all reductions are
//! mode-sorted and random draws come from a seeded generator.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::ansatz_toolkit::{
    assembled_min_eigenvalue, constraint_solve, cutoff_gamma, glue_ansatz, positivity_check,
    ConstraintParams, CutoffKind, CutoffProfile, GluingInput,
};
use crate::decay_bootstrap::run_bootstrap_chain;
use crate::fiber_spectrum::FiberSpectrum;
use crate::nikulin_census::{distinct_triples, generate_tables, orders_list, TableId};
use crate::spectral_laplace::{
    annulus_norm, brute_force_neumann_poincare, hex_digest, mode_greens_solve,
    neumann_poincare_annulus, poincare_product_check, RadialGrid, RadialProfile, SpectralField,
};
use crate::{Error, Result};

pub const SCHEMA_VERSION: &str = "1";

/// Which table(s) to enumerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSelect {
    One(TableId),
    All,
}

/// Output format for the census.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A fully resolved command.
#[derive(Debug, Clone)]
pub enum Command {
    Enumerate {
        table: TableSelect,
        format: OutputFormat,
        audit: bool,
    },
    Solve {
        k: i32,
        mu_ordinal: usize,
        weight: f64,
    },
    Bootstrap {
        beta: f64,
        steps: usize,
        dimension: usize,
    },
    Ansatz {
        params: ConstraintParams,
        cutoff: CutoffKind,
    },
    Poincare {
        r1: f64,
        r2: f64,
        fourier_cutoff: u32,
        fields: usize,
    },
    Report,
}

/// Run configuration: command, output directory, seed.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub out_dir: PathBuf,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema_version: String,
    pub command: String,
    pub seed: u64,
    pub artifacts: Vec<ArtifactEntry>,
}

/// Collects artifacts in memory, then flushes them with hashes.
struct Emitter {
    out_dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl Emitter {
    fn new(out_dir: &Path) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            files: BTreeMap::new(),
        }
    }

    fn emit(&mut self, name: &str, content: String) {
        self.files.insert(name.to_string(), content);
    }

    fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.emit(name, s);
        Ok(())
    }

    fn flush(self, command: &str, seed: u64) -> Result<Manifest> {
        std::fs::create_dir_all(&self.out_dir)?;
        let mut artifacts = Vec::new();
        for (name, content) in &self.files {
            let path = self.out_dir.join(name);
            std::fs::write(&path, content.as_bytes())?;
            artifacts.push(ArtifactEntry {
                path: name.clone(),
                sha256: hex_digest(content.as_bytes()),
                bytes: content.len(),
            });
        }
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            seed,
            artifacts,
        };
        let mut manifest_json = serde_json::to_string_pretty(&manifest)?;
        manifest_json.push('\n');
        std::fs::write(self.out_dir.join("manifest.json"), manifest_json.as_bytes())?;
        Ok(manifest)
    }
}

/// Everything a run produces: the manifest plus any failed validation
/// checks (artifacts are still written when checks fail; the exit status is
/// the caller's business).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub failed_checks: Vec<String>,
}

/// Dispatches a command; artifacts land in the output directory and the
/// manifest is written last.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let mut emitter = Emitter::new(&config.out_dir);
    let mut failed_checks = Vec::new();
    let name = match &config.command {
        Command::Enumerate {
            table,
            format,
            audit,
        } => {
            failed_checks.extend(run_enumerate(&mut emitter, *table, *format, *audit)?);
            "enumerate"
        }
        Command::Solve {
            k,
            mu_ordinal,
            weight,
        } => {
            failed_checks.extend(run_solve(&mut emitter, *k, *mu_ordinal, *weight)?);
            "solve"
        }
        Command::Bootstrap {
            beta,
            steps,
            dimension,
        } => {
            failed_checks.extend(run_bootstrap(
                &mut emitter,
                *beta,
                *steps,
                *dimension,
                config.seed,
            )?);
            "bootstrap"
        }
        Command::Ansatz { params, cutoff } => {
            failed_checks.extend(run_ansatz(&mut emitter, params, *cutoff, config.seed)?);
            "ansatz"
        }
        Command::Poincare {
            r1,
            r2,
            fourier_cutoff,
            fields,
        } => {
            failed_checks.extend(run_poincare(
                &mut emitter,
                *r1,
                *r2,
                *fourier_cutoff,
                *fields,
                config.seed,
            )?);
            "poincare"
        }
        Command::Report => {
            failed_checks.extend(run_enumerate(
                &mut emitter,
                TableSelect::All,
                OutputFormat::Csv,
                true,
            )?);
            failed_checks.extend(run_solve(&mut emitter, 2, 1, 1.0)?);
            failed_checks.extend(run_bootstrap(&mut emitter, 0.5, 2, 3, config.seed)?);
            failed_checks.extend(run_ansatz(
                &mut emitter,
                &default_ansatz_params(),
                CutoffKind::Trapezoid,
                config.seed,
            )?);
            failed_checks.extend(run_poincare(&mut emitter, 1.0, 2.0, 8, 20, config.seed)?);
            "report"
        }
    };
    emitter.emit_json("checks.json", &failed_checks)?;
    let manifest = emitter.flush(name, config.seed)?;
    Ok(RunOutcome {
        manifest,
        failed_checks,
    })
}

pub fn default_ansatz_params() -> ConstraintParams {
    ConstraintParams {
        quasi_isometry: 2.0,
        dimension: 3,
        ord_sigma: 2,
        vol_y: 1.0,
        gamma_chi: 5.0,
        err: 1.0,
        beta: 1.0,
        r0: 100.0,
    }
}

#[derive(Serialize)]
struct EnumerateSummary {
    table1_total: u32,
    table2_total: u32,
    table3_total: u32,
    grand_total: u32,
    distinct_triples: usize,
    discrepancy_count: usize,
    orders_len: usize,
    orders_primes: usize,
    orders_composites: usize,
    orders_max: u32,
}

fn run_enumerate(
    emitter: &mut Emitter,
    table: TableSelect,
    format: OutputFormat,
    audit: bool,
) -> Result<()> {
    let census = generate_tables();
    let triples = distinct_triples(&census.rows);
    let orders = orders_list();

    let selected: Vec<_> = census
        .rows
        .iter()
        .filter(|r| match table {
            TableSelect::All => true,
            TableSelect::One(t) => r.record.table == t,
        })
        .collect();

    match format {
        OutputFormat::Csv => {
            let mut csv = String::from(
                "table,g,rational_curves,rk_ns,b2_local,b2,b3,b4,dim_moduli,dim_family,printed_match\n",
            );
            for row in &selected {
                let g = row
                    .record
                    .genus_g
                    .map(|v| v.to_string())
                    .unwrap_or_default();
                let d = &row.derived;
                writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    row.record.table.label(),
                    g,
                    row.record.rational_count,
                    row.record.rk_ns,
                    d.b2_local,
                    d.b2,
                    d.b3,
                    d.b4,
                    d.dim_moduli,
                    d.dim_family,
                    row.printed_match
                )
                .expect("string write");
            }
            emitter.emit("census.csv", csv);
        }
        OutputFormat::Json => {
            emitter.emit_json("census.json", &selected)?;
        }
    }
    if audit {
        emitter.emit_json("audit.json", &census.discrepancies)?;
        emitter.emit_json("distinct_triples.json", &triples)?;
        emitter.emit_json("orders.json", &orders)?;
    }
    emitter.emit_json(
        "summary.json",
        &EnumerateSummary {
            table1_total: census.table1_total,
            table2_total: census.table2_total,
            table3_total: census.table3_total,
            grand_total: census.grand_total,
            distinct_triples: triples.distinct_count,
            discrepancy_count: census.discrepancies.len(),
            orders_len: orders.len,
            orders_primes: orders.prime_count,
            orders_composites: orders.composite_count,
            orders_max: orders.max,
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct SolveSummary {
    k: i32,
    mu: f64,
    relative_residual: f64,
    fitted_exponent: f64,
}

fn run_solve(emitter: &mut Emitter, k: i32, mu_ordinal: usize, weight: f64) -> Result<()> {
    let spectrum = FiberSpectrum::flat_torus(&[1.0, 1.0], 200.0)?;
    let grid = RadialGrid::log(1.0, 1000.0, 512)?;
    let mode = spectrum.mode(k, mu_ordinal)?;
    let bump = |r: f64| {
        let t: f64 = (r - 2.5) / 0.5;
        if t.abs() < 1.0 {
            (1.0 - t * t).powi(3)
        } else {
            0.0
        }
    };
    let rhs = if k == 0 && mu_ordinal == 0 {
        // base sector: neutralize the radial mass so the bounded solve exists
        let wide = |r: f64| {
            let t: f64 = (r - 25.0) / 10.0;
            if t.abs() < 1.0 {
                (1.0 - t * t).powi(3)
            } else {
                0.0
            }
        };
        let ratio = grid.integrate_r_dr(|_, r| bump(r)) / grid.integrate_r_dr(|_, r| wide(r));
        RadialProfile::from_fn(mode, grid.clone(), move |r| bump(r) - ratio * wide(r))
    } else {
        RadialProfile::from_fn(mode, grid.clone(), bump)
    };
    let solution = mode_greens_solve(mode, &rhs, Complex64::new(0.0, 0.0))?;

    let mut field = SpectralField::zero(spectrum.clone(), grid.clone());
    field.set_mode(mode, solution.profile.values.clone())?;
    emitter.emit("solution.json", field.to_json()?);

    // per-annulus norm table with a local slope column
    let mut csv = String::from("R,norm,weighted_norm,fitted_exponent\n");
    let mut plot = String::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut last_slope = f64::NAN;
    for j in 0..12 {
        let r_lo = 4.0 * (400.0f64 / 4.0).powf(j as f64 / 11.0);
        let r_hi = r_lo + 2.0;
        let norm = annulus_norm(&field, r_lo, r_hi, 0.0)?;
        let weighted = annulus_norm(&field, r_lo, r_hi, weight)?;
        let slope = match prev {
            Some((r0, n0)) if norm > 0.0 && n0 > 0.0 => -(norm / n0).ln() / (r_lo / r0).ln(),
            _ => f64::NAN,
        };
        if slope.is_finite() {
            last_slope = slope;
        }
        let slope_str = if slope.is_finite() {
            format!("{slope}")
        } else {
            String::new()
        };
        writeln!(csv, "{r_lo},{norm},{weighted},{slope_str}").expect("string write");
        if norm > 0.0 {
            writeln!(plot, "{} {}", r_lo.ln(), norm.ln()).expect("string write");
        }
        prev = Some((r_lo, norm));
    }
    emitter.emit("annulus_norms.csv", csv);
    emitter.emit("annulus_norms.dat", plot);
    emitter.emit_json(
        "solve_summary.json",
        &SolveSummary {
            k,
            mu: mode.mu,
            relative_residual: solution.relative_residual(),
            fitted_exponent: last_slope,
        },
    )?;
    Ok(())
}

fn run_bootstrap(
    emitter: &mut Emitter,
    beta: f64,
    steps: usize,
    dimension: usize,
    seed: u64,
) -> Result<()> {
    let rows = run_bootstrap_chain(beta, steps, dimension, seed)?;
    let mut csv = String::from("step,beta_in,beta_Q,beta_out,r2_Q,r2_out\n");
    for row in &rows {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            row.step, row.beta_in, row.beta_q, row.beta_out, row.r2_q, row.r2_out
        )
        .expect("string write");
        // gnuplot-ready (log r, log norm) per step
        for (tag, samples) in [("q", &row.q_samples), ("out", &row.out_samples)] {
            let mut dat = String::new();
            for &(r, n) in samples.iter().filter(|&&(_, n)| n > 0.0) {
                writeln!(dat, "{} {}", r.ln(), n.ln()).expect("string write");
            }
            emitter.emit(&format!("bootstrap_step{}_{tag}.dat", row.step), dat);
        }
    }
    emitter.emit("bootstrap.csv", csv);
    emitter.emit_json("bootstrap.json", &rows)?;
    Ok(())
}

#[derive(Serialize)]
struct AnsatzReport {
    gamma_chi: f64,
    t0: f64,
    s0_interval: (f64, f64),
    s0: f64,
    t_min_gluing: f64,
    min_eigenvalue: f64,
}

fn run_ansatz(
    emitter: &mut Emitter,
    params: &ConstraintParams,
    cutoff: CutoffKind,
    seed: u64,
) -> Result<()> {
    let chi = CutoffProfile::standard(cutoff);
    let (gamma, _) = cutoff_gamma(&chi);
    let mut params = params.clone();
    params.gamma_chi = gamma;

    // conformal factor strictly inside the quasi-isometry band
    let k = params.quasi_isometry;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let lambda = move |rho: f64| {
        if k <= 1.0 {
            1.0
        } else {
            (0.9 * k.ln() * (5.0 * rho + phase).sin()).exp()
        }
    };
    let solution = constraint_solve(&params, &chi, lambda, None)?;
    let (constraint_min, _) =
        assembled_min_eigenvalue(&params, &chi, lambda, solution.t, solution.s0);

    // gluing fixture: smooth cutoffs at R = 10 with a mild two-mode potential
    let spec = FiberSpectrum::from_pairs(vec![(0.0, 1), (1.0, 1), (2.5, 1)], 1.0, true)?;
    let grid = RadialGrid::uniform(6.0, 20.0, 512)?;
    let mut phi = SpectralField::zero(spec.clone(), grid);
    phi.set_mode_fn(spec.mode(1, 1)?, |r| {
        Complex64::new(0.4 * (-0.2 * r).exp(), 0.0)
    })?;
    phi.set_mode_fn(spec.mode(0, 2)?, |r| Complex64::new(0.28 / r, 0.0))?;
    let chi_glue = CutoffProfile::ramp_up(CutoffKind::SmoothMollified, 10.0, 11.0)?;
    let varphi = CutoffProfile::ramp_up(CutoffKind::SmoothMollified, 8.0, 9.0)?;
    let probe = glue_ansatz(&GluingInput {
        omega_tilde_fiber: 1.0,
        omega_tilde_base: 1.0,
        dimension: params.dimension.max(2),
        phi: &phi,
        chi: &chi_glue,
        varphi: &varphi,
        t: 0.0,
        n_theta: 16,
    })?;
    let glued = glue_ansatz(&GluingInput {
        omega_tilde_fiber: 1.0,
        omega_tilde_base: 1.0,
        dimension: params.dimension.max(2),
        phi: &phi,
        chi: &chi_glue,
        varphi: &varphi,
        t: probe.constants.t_min,
        n_theta: 16,
    })?;
    let (glued_min, _) = positivity_check(&glued.eigenfield);

    emitter.emit_json(
        "ansatz.json",
        &AnsatzReport {
            gamma_chi: gamma,
            t0: solution.t0,
            s0_interval: solution.s0_interval,
            s0: solution.s0,
            t_min_gluing: probe.constants.t_min,
            min_eigenvalue: constraint_min.min(glued_min),
        },
    )?;
    Ok(())
}

#[derive(Serialize)]
struct PoincareSummary {
    p_a: f64,
    p_a_brute_force: f64,
    relative_gap: f64,
    p_y: f64,
    fields: usize,
    all_pass: bool,
}

fn run_poincare(
    emitter: &mut Emitter,
    r1: f64,
    r2: f64,
    fourier_cutoff: u32,
    fields: usize,
    seed: u64,
) -> Result<()> {
    let p_a = neumann_poincare_annulus(r1, r2, fourier_cutoff)?;
    let brute = brute_force_neumann_poincare(r1, r2, 24, 40)?;
    let spectrum = FiberSpectrum::flat_torus(&[1.0, 1.0], 200.0)?;
    let grid = RadialGrid::uniform(r1.max(1.0), r2, 64)?;
    let corpus = random_low_mode_fields(&spectrum, &grid, fields, seed);
    let report = poincare_product_check(p_a, &spectrum, &corpus)?;
    emitter.emit_json("poincare_cases.json", &report)?;
    emitter.emit_json(
        "poincare.json",
        &PoincareSummary {
            p_a,
            p_a_brute_force: brute,
            relative_gap: (p_a / brute - 1.0).abs(),
            p_y: spectrum.poincare_constant,
            fields: corpus.len(),
            all_pass: report.all_pass,
        },
    )?;
    Ok(())
}

/// Seeded corpus of real (conjugate-symmetric) low-mode fields with smooth
/// radial polynomials.
pub fn random_low_mode_fields(
    spectrum: &FiberSpectrum,
    grid: &RadialGrid,
    count: usize,
    seed: u64,
) -> Vec<SpectralField> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let max_ord = spectrum.eigenvalues.len().min(3);
    let r0 = grid.r_min();
    (0..count)
        .map(|_| {
            let mut field = SpectralField::zero(spectrum.clone(), grid.clone());
            for ord in 0..max_ord {
                for k in 0..=3i32 {
                    if !rng.random_bool(0.6) {
                        continue;
                    }
                    let c = Complex64::new(
                        rng.random_range(-1.0..1.0),
                        if k == 0 {
                            0.0
                        } else {
                            rng.random_range(-1.0..1.0)
                        },
                    );
                    let (a, b) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    let mode = spectrum.mode(k, ord).expect("ordinal bounded");
                    let radial = move |r: f64| 1.0 + a * (r - r0) + b * (r - r0) * (r - r0);
                    field
                        .set_mode_fn(mode, |r| c * radial(r))
                        .expect("mode valid");
                    if k != 0 {
                        let conj_mode = spectrum.mode(-k, ord).expect("ordinal bounded");
                        field
                            .set_mode_fn(conj_mode, |r| c.conj() * radial(r))
                            .expect("mode valid");
                    }
                }
            }
            field
        })
        .collect()
}

/// Machine-readable error record for the CLI.
#[derive(Serialize)]
pub struct ErrorRecord {
    pub code: &'static str,
    pub module: &'static str,
    pub message: String,
}

impl ErrorRecord {
    pub fn from_error(e: &Error) -> Self {
        Self {
            code: e.code(),
            module: e.module(),
            message: e.to_string(),
        }
    }
}
