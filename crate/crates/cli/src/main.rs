use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hfzero::subquotient::Truncation;

mod commands;
mod output;

use commands::{Failure, RedMap, SRange};

/// Heegaard Floer homology of 0-surgery from knot complex models.
#[derive(Debug, Parser)]
#[command(name = "hfzero", version)]
struct Cli {
    /// Emit one JSON record per result instead of tables.
    #[arg(long, global = true)]
    machine: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Flavor {
    Hat,
    Plus,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate complexes and look for a flip map.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Mapping cone homology for a range of s.
    Cone {
        file: PathBuf,
        /// Range `a..b` (inclusive); defaults to |s| <= A_max.
        #[arg(long, allow_hyphen_values = true)]
        s: Option<SRange>,
        #[arg(long, value_enum, default_value_t = Flavor::Hat)]
        flavor: Flavor,
        /// Plus truncation height, or `auto`.
        #[arg(long, default_value = "auto")]
        truncation: Truncation,
        /// Use F2[T, T^-1] coefficients (hat flavor only).
        #[arg(long)]
        twisted: bool,
    },
    /// Seifert genus from the v-hat maps.
    Genus { file: PathBuf },
    /// Mod 2 Alexander polynomial of each complex.
    Alex { file: PathBuf },
    /// Non-separating sphere obstruction from twisted coefficients.
    DetectSphere { file: PathBuf },
    /// Graded HF_red of the ambient manifold.
    Red {
        file: PathBuf,
        #[arg(long, default_value = "auto")]
        truncation: Truncation,
    },
    /// Necessary conditions for a non-separating sphere in the 0-surgery.
    Prop0check { file: PathBuf },
    /// Unknotting verdict from dim HF-hat of Y and N.
    Verdict {
        #[arg(long)]
        dim_y: usize,
        #[arg(long)]
        dim_n: usize,
    },
    /// HF_red = F obstruction to S^2 x S^1 surgeries.
    Red1 {
        /// Compute HF_red from the first complex of this file.
        #[arg(long, required_unless_present = "red", conflicts_with = "red")]
        from_file: Option<PathBuf>,
        /// Graded dimensions as `grading:count,...`.
        #[arg(long, allow_hyphen_values = true)]
        red: Option<RedMap>,
        /// Assert that Y is an integer homology sphere.
        #[arg(long)]
        homology_sphere: bool,
        #[arg(long, default_value = "auto")]
        truncation: Truncation,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = if cli.machine {
        output::Mode::Machine
    } else {
        output::Mode::Human
    };
    let result = match cli.command {
        Command::Check { files } => commands::check(mode, &files),
        Command::Cone {
            file,
            s,
            flavor,
            truncation,
            twisted,
        } => match (flavor, twisted) {
            (Flavor::Hat, false) => commands::cone_hat(mode, &file, s),
            (Flavor::Hat, true) => commands::cone_twisted(mode, &file, s),
            (Flavor::Plus, false) => commands::cone_plus(mode, &file, s, truncation),
            (Flavor::Plus, true) => Err(Failure::Input(
                "--twisted is only available for the hat flavor".into(),
            )),
        },
        Command::Genus { file } => commands::genus(mode, &file),
        Command::Alex { file } => commands::alex(mode, &file),
        Command::DetectSphere { file } => commands::detect_sphere(mode, &file),
        Command::Red { file, truncation } => commands::red(mode, &file, truncation),
        Command::Prop0check { file } => commands::prop0check(mode, &file),
        Command::Verdict { dim_y, dim_n } => commands::verdict(mode, dim_y, dim_n),
        Command::Red1 {
            from_file,
            red,
            homology_sphere,
            truncation,
        } => commands::red1(mode, from_file.as_deref(), red, homology_sphere, truncation),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
