//! `qlp`: finite orthomodular-lattice probability from the command line.
//!
//! Exit status: 0 when every check passes, 1 when a mathematical check
//! fails, 2 on unreadable or malformed input.

mod cmd_dist;
mod cmd_lattice;
mod cmd_smap;
mod cmd_verify;
mod load;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cmd_dist::Inputs;
use crate::cmd_smap::Search;
use crate::report::{Report, Status};

#[derive(Parser)]
#[command(
    name = "qlp",
    version,
    about = "Orthomodular lattices, s-maps and joint distribution functions with exact rationals",
    after_help = "QLP_SEED is reserved and has no effect: every computation is exact and deterministic."
)]
struct Cli {
    /// Report format on stdout and under --out.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Directory for the report and any documents produced.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Check or generate lattices.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Validate, complete, analyse or synthesize s-maps.
    #[command(subcommand)]
    Smap(SmapCmd),
    /// Joint distribution functions of observables under an s-map.
    #[command(subcommand)]
    Dist(DistCmd),
    /// Reproduce a bundled reference computation.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Check the orthomodular lattice axioms of a lattice document.
    Check { file: PathBuf },
    /// Generate `mo:<n>` or `boolean:<k>`.
    Make { spec: String },
}

#[derive(Subcommand)]
enum SmapCmd {
    /// Check the s-map axioms on a full table.
    Validate { file: PathBuf },
    /// Complete listed values to a full table.
    Complete { file: PathBuf },
    /// Check the derived properties (completing first if needed).
    Props { file: PathBuf },
    /// Find an s-map meeting constraints, or a certificate that none exists.
    Synth {
        /// Lattice document or shorthand such as `mo:3`.
        lattice: String,
        /// Arity, as `3` or `arity=3`.
        arity: String,
        /// Constraint file.
        constraints: Option<PathBuf>,
        /// Run a counterexample search instead of constraint synthesis.
        #[arg(long, value_enum)]
        search: Option<Search>,
    },
}

#[derive(Args)]
struct DistArgs {
    /// S-map document; listed values are completed first.
    #[arg(long)]
    smap: PathBuf,
    /// Observables document.
    #[arg(long)]
    observables: PathBuf,
    /// Observable names in argument order, comma separated.
    #[arg(long)]
    order: Option<String>,
}

impl DistArgs {
    fn inputs(&self) -> Inputs<'_> {
        Inputs { smap: &self.smap, observables: &self.observables, order: self.order.as_deref() }
    }
}

#[derive(Subcommand)]
enum DistCmd {
    /// F at one point, or on the whole grid with its property checks.
    #[command(name = "F")]
    F {
        #[command(flatten)]
        args: DistArgs,
        /// Comma-separated arguments r_1,...,r_n.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// A marginal: `inf` in --at drops that coordinate.
    Marginal {
        #[command(flatten)]
        args: DistArgs,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// Invariance under permutations of the observables.
    Commutativity {
        #[command(flatten)]
        args: DistArgs,
    },
    /// The classical probability space over the product of spectra.
    Classical {
        #[command(flatten)]
        args: DistArgs,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// The MO3 reference system with three two-valued observables.
    Example31 {
        /// Use the listing without the value correction.
        #[arg(long)]
        raw: bool,
        /// Leave out the classical model checks.
        #[arg(long)]
        skip_classical: bool,
    },
}

fn run(cli: &Cli) -> anyhow::Result<Report> {
    match &cli.command {
        Command::Lattice(LatticeCmd::Check { file }) => cmd_lattice::check(file),
        Command::Lattice(LatticeCmd::Make { spec }) => cmd_lattice::make(spec),
        Command::Smap(SmapCmd::Validate { file }) => cmd_smap::validate_cmd(file),
        Command::Smap(SmapCmd::Complete { file }) => cmd_smap::complete_cmd(file),
        Command::Smap(SmapCmd::Props { file }) => cmd_smap::props_cmd(file),
        Command::Smap(SmapCmd::Synth { lattice, arity, constraints, search }) => {
            cmd_smap::synth_cmd(lattice, arity, constraints.as_deref(), *search)
        }
        Command::Dist(DistCmd::F { args, at }) => cmd_dist::f_cmd(&args.inputs(), at.as_deref()),
        Command::Dist(DistCmd::Marginal { args, at }) => cmd_dist::marginal_cmd(&args.inputs(), at),
        Command::Dist(DistCmd::Commutativity { args }) => cmd_dist::commutativity_cmd(&args.inputs()),
        Command::Dist(DistCmd::Classical { args }) => cmd_dist::classical_cmd(&args.inputs()),
        Command::Verify(VerifyCmd::Example31 { raw, skip_classical }) => cmd_verify::example31(*raw, *skip_classical),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let json = cli.format == Format::Json;
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(dir) = &cli.out {
        if let Err(e) = report.write_to(dir, json) {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    }
    let body = if json { report.to_json() } else { report.to_text() };
    let _ = std::io::stdout().write_all(body.as_bytes());
    match report.status {
        Status::Pass => ExitCode::SUCCESS,
        Status::Fail => ExitCode::from(1),
    }
}
