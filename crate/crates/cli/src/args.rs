use clap::{Args, Parser, Subcommand, ValueEnum};
use heun_tridiag::classical::ClassicalCase;
use heun_tridiag::exactnum::{parse_rational, Rational};
use heun_tridiag::heunpoly::truncation_tau3;
use heun_tridiag::su11::Su11Config;
use heun_tridiag::tridiag::TridiagConfig;
use heun_tridiag::Result;
use num_traits::One;

#[derive(Debug, Parser)]
#[command(name = "heun-tridiag", version, about = "Exact Heun-operator tridiagonalization toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build M, its Heun form and the coefficient tables.
    Construct {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Check the quadratic algebra relations as operator identities.
    VerifyAlgebra {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 10)]
        degree: usize,
    },
    /// Casimir element and its value.
    Casimir {
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// The xi/eta/zeta table with exact tridiagonality checks.
    Tridiag {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Truncated eigensystem and expansion checks.
    HeunPolys {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// B_n/U_n recurrence table and polynomial values on a grid.
    RacahHeun {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
        /// Comma-separated evaluation points, e.g. "0,1/2,-3".
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Vec<String>,
    },
    /// Compare the tau4 = 0 recurrence with Wilson polynomials.
    WilsonCompare {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// The su(1,1) realization and its mixed operator.
    Su11 {
        #[command(flatten)]
        su11: Su11Args,
        #[arg(long, default_value_t = 10)]
        degree: usize,
    },
    /// Run the full invariant suite.
    Selftest {
        /// Seed for the sampled configurations.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Sampled configurations per case.
        #[arg(long, default_value_t = 4)]
        samples: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Pretty,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub output: OutputFormat,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<std::path::PathBuf>,
    /// Which CSV table to emit; defaults to the command's main table.
    #[arg(long, global = true)]
    pub table: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    #[value(alias = "hypergeometric")]
    Hyp,
    #[value(alias = "lag")]
    Laguerre,
    #[value(alias = "her")]
    Hermite,
}

/// Defaults reproduce the canonical configuration, which truncates at N = 2.
#[derive(Debug, Args)]
#[command(next_help_heading = "Configuration")]
pub struct ConfigArgs {
    #[arg(long, value_enum, default_value_t = CaseArg::Hyp)]
    pub case: CaseArg,
    #[arg(long, default_value = "-5", allow_hyphen_values = true)]
    pub nu1: String,
    #[arg(long, default_value = "2", allow_hyphen_values = true)]
    pub nu2: String,
    /// Laguerre parameter.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub tau1: String,
    /// Defaults to 1 - tau1.
    #[arg(long, allow_hyphen_values = true)]
    pub tau2: Option<String>,
    /// A rational, or "auto" for the truncation value at --n.
    #[arg(long, default_value = "33/2", allow_hyphen_values = true)]
    pub tau3: String,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub tau4: String,
}

impl ConfigArgs {
    pub fn case(&self) -> Result<ClassicalCase> {
        Ok(match self.case {
            CaseArg::Hyp => ClassicalCase::Hypergeometric {
                nu1: parse_rational(&self.nu1)?,
                nu2: parse_rational(&self.nu2)?,
            },
            CaseArg::Laguerre => ClassicalCase::Laguerre { a: parse_rational(&self.a)? },
            CaseArg::Hermite => ClassicalCase::Hermite,
        })
    }

    /// `truncate_at` is the N used by `--tau3 auto`.
    pub fn build(&self, truncate_at: Option<usize>) -> Result<TridiagConfig> {
        let case = self.case()?;
        let tau1 = parse_rational(&self.tau1)?;
        let tau2 = match &self.tau2 {
            Some(t) => parse_rational(t)?,
            None => Rational::one() - &tau1,
        };
        let tau4 = parse_rational(&self.tau4)?;
        let tau3 = match (self.tau3.trim(), truncate_at) {
            ("auto", Some(n)) => truncation_tau3(&case, &tau1, n),
            ("auto", None) => {
                return Err(heun_tridiag::Error::ParseRational(
                    "tau3 = auto needs a truncation degree (heun-polys --n)".into(),
                ))
            }
            (text, _) => parse_rational(text)?,
        };
        TridiagConfig::new(case, tau1, tau2, tau3, tau4)
    }
}

#[derive(Debug, Args)]
#[command(next_help_heading = "su(1,1) configuration")]
pub struct Su11Args {
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub sigma1: String,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub sigma2: String,
    #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
    pub sigma3: String,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value = "1/3", allow_hyphen_values = true)]
    pub beta: String,
}

impl Su11Args {
    pub fn build(&self) -> Result<Su11Config> {
        Ok(Su11Config::new(
            parse_rational(&self.sigma1)?,
            parse_rational(&self.sigma2)?,
            parse_rational(&self.sigma3)?,
            self.n,
            parse_rational(&self.beta)?,
        ))
    }
}
