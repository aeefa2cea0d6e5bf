//! Batch front-end over the library pipelines. Exit codes: 0 success,
//! 1 failed checks or internal error, 2 malformed instance, 3 infeasible.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use wetcluster::lattice::Stencil;
use wetcluster::pipeline::{
    cmd_oracle, cmd_render, cmd_solve_dry, cmd_sweep, cmd_verify, cmd_wet, exit_code_for,
    RunOptions,
};

#[derive(Parser)]
#[command(name = "wetcluster", version, about = "Planar minimal clusters with a wetting phase")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct CommonArgs {
    /// Instance file (JSON).
    #[arg(long)]
    instance: PathBuf,
    /// Override the instance's wet-area budget.
    #[arg(long)]
    delta: Option<f64>,
    /// Lattice resolution in cells per unit.
    #[arg(long, default_value_t = 256)]
    resolution: usize,
    /// Random seed for the lattice optimizer.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Perimeter stencil: 8 or 16 neighbors.
    #[arg(long, default_value_t = 16)]
    stencil: u8,
    /// Cap on interior junctions during topology enumeration
    /// (default: the number of trace jumps).
    #[arg(long)]
    max_junctions: Option<usize>,
}

impl CommonArgs {
    fn options(&self) -> Result<RunOptions, String> {
        let stencil = match self.stencil {
            8 => Stencil::Eight,
            16 => Stencil::Sixteen,
            other => return Err(format!("stencil must be 8 or 16, got {other}")),
        };
        Ok(RunOptions {
            delta: self.delta,
            resolution: self.resolution,
            seed: self.seed,
            stencil,
            max_junctions: self.max_junctions,
            deltas: vec![0.04, 0.02, 0.01, 0.005],
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve the dry (delta = 0) problem: network JSON + SVG.
    SolveDry(CommonArgs),
    /// Build the predicted wetted minimizer: cluster JSON + SVG.
    Wet(CommonArgs),
    /// Run the lattice optimizer: field file + energy trace CSV.
    Oracle(CommonArgs),
    /// Structure checks on a cluster or field artifact.
    Verify {
        /// Artifact to check (cluster JSON or field file).
        artifact: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Oracle runs over a list of wet-area budgets plus a summary CSV.
    Sweep {
        /// Comma-separated budgets, largest first.
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// SVG from any serialized artifact.
    Render {
        artifact: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = || -> Result<ExitCode, wetcluster::Error> {
        match &cli.command {
            Command::SolveDry(c) => {
                let opts = c.options().map_err(wetcluster::Error::InvalidInstance)?;
                let path = cmd_solve_dry(&c.instance, &c.out, &opts)?;
                eprintln!("network written to {}", path.display());
            }
            Command::Wet(c) => {
                let opts = c.options().map_err(wetcluster::Error::InvalidInstance)?;
                let path = cmd_wet(&c.instance, &c.out, &opts)?;
                eprintln!("cluster written to {}", path.display());
            }
            Command::Oracle(c) => {
                let opts = c.options().map_err(wetcluster::Error::InvalidInstance)?;
                let path = cmd_oracle(&c.instance, &c.out, &opts)?;
                eprintln!("field written to {}", path.display());
            }
            Command::Verify { artifact, common } => {
                let opts = common.options().map_err(wetcluster::Error::InvalidInstance)?;
                let report = cmd_verify(artifact, &common.instance, &common.out, &opts)?;
                print!("{}", report.to_text());
                if !report.all_passed() {
                    return Ok(ExitCode::from(1));
                }
            }
            Command::Sweep { deltas, common } => {
                let mut opts = common.options().map_err(wetcluster::Error::InvalidInstance)?;
                if let Some(d) = deltas {
                    opts.deltas = d.clone();
                }
                let rows = cmd_sweep(&common.instance, &common.out, &opts)?;
                for r in &rows {
                    eprintln!(
                        "delta {:.4}: oracle {:.6}, predicted {:.6}, wet {:.6}",
                        r.delta, r.energy_oracle, r.energy_predicted, r.wet_area
                    );
                }
            }
            Command::Render { artifact, out } => {
                let path = cmd_render(artifact, out)?;
                eprintln!("svg written to {}", path.display());
            }
        }
        Ok(ExitCode::SUCCESS)
    };
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
