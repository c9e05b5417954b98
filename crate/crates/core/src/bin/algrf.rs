//! Command-line entry point: reproducible, file-emitting commands over the
//! toolkit. Validation failures exit 1 with a machine-readable error record
//! on stderr; usage errors exit 2 (clap's default).

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

use algrf::ansatz_toolkit::{ConstraintParams, CutoffKind};
use algrf::nikulin_census::TableId;
use algrf::runner::{self, Command, ErrorRecord, OutputFormat, RunConfig, TableSelect};

#[derive(Parser)]
#[command(
    name = "algrf",
    about = "Numerical toolkit for mode-decomposed elliptic analysis on ALG ends",
    version
)]
struct Cli {
    /// Output directory (env ALGRF_OUT overrides the default ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized corpora; fixed seed means byte-identical output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum CutoffArg {
    Trapezoid,
    Smooth,
}

#[derive(Subcommand)]
enum Cmd {
    /// Regenerate the example census: tables, totals, distinct triples,
    /// admissible orders.
    Enumerate {
        #[arg(long, value_enum, default_value = "all")]
        table: TableArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Include the printed-vs-formula discrepancy report.
        #[arg(long)]
        audit: bool,
    },
    /// Per-mode Green solve demo with annulus-norm table.
    Solve {
        /// Circle frequency of the mode.
        #[arg(long, default_value_t = 2)]
        k: i32,
        /// Fiber eigenvalue ordinal (0 = constants).
        #[arg(long, default_value_t = 1)]
        mu_ordinal: usize,
        /// Weight for the weighted-norm column.
        #[arg(long, default_value_t = 1.0)]
        weight: f64,
    },
    /// Chained decay-doubling steps.
    Bootstrap {
        #[arg(long, default_value_t = 0.5)]
        beta: f64,
        #[arg(long, default_value_t = 2)]
        steps: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
    },
    /// Constraint and gluing constants report.
    Ansatz {
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 2.0)]
        k: f64,
        #[arg(long, default_value_t = 2)]
        ord_sigma: u32,
        #[arg(long, default_value_t = 1.0)]
        vol_y: f64,
        #[arg(long, default_value_t = 1.0)]
        err: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 100.0)]
        r0: f64,
        #[arg(long, value_enum, default_value = "trapezoid")]
        cutoff: CutoffArg,
    },
    /// Neumann Poincaré constant with brute-force validation and the
    /// product-inequality corpus.
    Poincare {
        #[arg(long, default_value_t = 1.0)]
        r1: f64,
        #[arg(long, default_value_t = 2.0)]
        r2: f64,
        #[arg(long, default_value_t = 8)]
        cutoff: u32,
        #[arg(long, default_value_t = 100)]
        fields: usize,
    },
    /// Full battery: census, solve, bootstrap, ansatz, Poincaré.
    Report,
}

fn main() {
    let cli = Cli::parse();
    let out_dir = cli
        .out
        .or_else(|| std::env::var_os("ALGRF_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let command = match cli.command {
        Cmd::Enumerate {
            table,
            format,
            audit,
        } => Command::Enumerate {
            table: match table {
                TableArg::One => TableSelect::One(TableId::T1),
                TableArg::Two => TableSelect::One(TableId::T2),
                TableArg::Three => TableSelect::One(TableId::T3),
                TableArg::All => TableSelect::All,
            },
            format: match format {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            },
            audit,
        },
        Cmd::Solve {
            k,
            mu_ordinal,
            weight,
        } => Command::Solve {
            k,
            mu_ordinal,
            weight,
        },
        Cmd::Bootstrap { beta, steps, d } => Command::Bootstrap {
            beta,
            steps,
            dimension: d,
        },
        Cmd::Ansatz {
            d,
            k,
            ord_sigma,
            vol_y,
            err,
            beta,
            r0,
            cutoff,
        } => Command::Ansatz {
            params: ConstraintParams {
                quasi_isometry: k,
                dimension: d,
                ord_sigma,
                vol_y,
                gamma_chi: 5.0, // recomputed from the cutoff inside the run
                err,
                beta,
                r0,
            },
            cutoff: match cutoff {
                CutoffArg::Trapezoid => CutoffKind::Trapezoid,
                CutoffArg::Smooth => CutoffKind::SmoothMollified,
            },
        },
        Cmd::Poincare {
            r1,
            r2,
            cutoff,
            fields,
        } => Command::Poincare {
            r1,
            r2,
            fourier_cutoff: cutoff,
            fields,
        },
        Cmd::Report => Command::Report,
    };

    let config = RunConfig {
        command,
        out_dir,
        seed: cli.seed,
    };
    match runner::run(&config) {
        Ok(manifest) => {
            println!(
                "wrote {} artifact(s) to {}",
                manifest.artifacts.len(),
                config.out_dir.display()
            );
        }
        Err(e) => {
            let record = ErrorRecord::from_error(&e);
            eprintln!(
                "{}",
                serde_json::to_string(&record)
                    .unwrap_or_else(|_| format!("{{\"message\":\"{e}\"}}"))
            );
            std::process::exit(1);
        }
    }
}
