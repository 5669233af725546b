//! Command-line frontend: reads a stacky fan as JSON, runs one of the
//! pipeline stages on it and prints JSON (or text) to stdout.

pub mod commands;
pub mod document;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use stacky_chow::inertial::MinusRule;
use stacky_chow::lattice::Coefficients;
use stacky_chow::parallel::Execution;

use commands::{Output, ProductOptions};
use document::{parse_rational, render};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("misuse: {0}")]
    Misuse(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Misuse(_) => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Product {
    Orbifold,
    Virtual,
    VPlus,
    VMinus,
    PlusInf,
    MinusInf,
}

impl Product {
    pub fn name(self) -> &'static str {
        match self {
            Product::Orbifold => "orbifold",
            Product::Virtual => "virtual",
            Product::VPlus => "v-plus",
            Product::VMinus => "v-minus",
            Product::PlusInf => "plus-inf",
            Product::MinusInf => "minus-inf",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Coeff {
    Z,
    Q,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Rule {
    /// `B-` keeps only rays with `q_1 + q_2 < 1`.
    Strict,
    /// `B-` also keeps rays with `q_1 + q_2 = 1`.
    Inclusive,
}

#[derive(Debug, Parser)]
#[command(
    name = "stacky-chow",
    version,
    about = "Chow rings and inertial products of toric DM stacks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Worker threads; 1 selects the sequential path.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, clap::Args)]
pub struct ProductArgs {
    #[arg(long, value_enum)]
    pub product: Product,
    /// Comma-separated nonnegative coefficients a_1,...,a_n of V = sum a_i L_i.
    #[arg(long)]
    pub bundle: Option<String>,
    #[arg(long, value_enum)]
    pub coeff: Option<Coeff>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the stacky fan hypotheses.
    Validate { file: PathBuf },
    /// List the box with q-vectors and group phases.
    Box { file: PathBuf },
    /// Integral Chow ring presentation.
    Chow { file: PathBuf },
    /// Inertial Chow ring presentation for one product.
    Inertial {
        file: PathBuf,
        #[command(flatten)]
        product: ProductArgs,
        #[arg(long)]
        simplify: bool,
        /// Also report graded pieces up to this degree.
        #[arg(long)]
        maxdeg: Option<String>,
    },
    /// Product of two box elements, given by index or label.
    Multiply {
        file: PathBuf,
        #[command(flatten)]
        product: ProductArgs,
        #[arg(long, value_enum, default_value = "strict")]
        minus_rule: Rule,
        left: String,
        right: String,
    },
    /// Check associativity, commutativity and the unit.
    CheckAssoc {
        file: PathBuf,
        #[command(flatten)]
        product: ProductArgs,
        #[arg(long, value_enum, default_value = "strict")]
        minus_rule: Rule,
        #[arg(long, default_value = "6")]
        maxdeg: String,
    },
    /// Graded pieces of the Chow ring, or of an inertial Chow ring.
    Hilbert {
        file: PathBuf,
        #[arg(long)]
        product: Option<Product>,
        #[arg(long)]
        bundle: Option<String>,
        #[arg(long, value_enum)]
        coeff: Option<Coeff>,
        #[arg(long)]
        simplify: bool,
        #[arg(long, default_value = "3")]
        maxdeg: String,
    },
}

fn parse_bundle(s: &str) -> Result<Vec<BigInt>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<BigInt>()
                .map_err(|_| CliError::Misuse(format!("--bundle: `{x}` is not an integer")))
        })
        .collect()
}

fn parse_maxdeg(s: &str) -> Result<BigRational, CliError> {
    parse_rational(s).ok_or_else(|| CliError::Misuse(format!("--maxdeg: `{s}` is not a rational number")))
}

fn coeff(c: Option<Coeff>) -> Option<Coefficients> {
    c.map(|c| match c {
        Coeff::Z => Coefficients::Integers,
        Coeff::Q => Coefficients::Rationals,
    })
}

fn options(p: &ProductArgs, rule: Rule, exec: Execution) -> Result<ProductOptions, CliError> {
    Ok(ProductOptions {
        product: p.product,
        bundle: p.bundle.as_deref().map(parse_bundle).transpose()?,
        coeff: coeff(p.coeff),
        rule: match rule {
            Rule::Strict => MinusRule::Strict,
            Rule::Inclusive => MinusRule::Inclusive,
        },
        exec,
    })
}

fn execution(jobs: Option<usize>) -> Result<Execution, CliError> {
    match jobs {
        Some(0) => Err(CliError::Misuse("--jobs must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        Some(n) => {
            // A global pool can only be installed once per process; later
            // requests keep the first pool.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(Execution::Parallel)
        }
        None => Ok(Execution::default()),
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<Output, CliError> {
    let exec = execution(cli.jobs)?;
    match &cli.command {
        Command::Validate { file } => Ok(commands::cmd_validate(&commands::load(file)?)),
        Command::Box { file } => commands::cmd_box(&commands::load(file)?),
        Command::Chow { file } => commands::cmd_chow(&commands::load(file)?),
        Command::Inertial {
            file,
            product,
            simplify,
            maxdeg,
        } => {
            let doc = commands::load(file)?;
            let max = maxdeg.as_deref().map(parse_maxdeg).transpose()?;
            commands::cmd_inertial(&doc, &options(product, Rule::Strict, exec)?, *simplify, max.as_ref())
        }
        Command::Multiply {
            file,
            product,
            minus_rule,
            left,
            right,
        } => {
            let doc = commands::load(file)?;
            commands::cmd_multiply(&doc, &options(product, *minus_rule, exec)?, left, right)
        }
        Command::CheckAssoc {
            file,
            product,
            minus_rule,
            maxdeg,
        } => {
            let doc = commands::load(file)?;
            commands::cmd_check_assoc(&doc, &options(product, *minus_rule, exec)?, &parse_maxdeg(maxdeg)?)
        }
        Command::Hilbert {
            file,
            product,
            bundle,
            coeff: c,
            simplify,
            maxdeg,
        } => {
            let doc = commands::load(file)?;
            let opts = match product {
                Some(p) => Some(options(
                    &ProductArgs {
                        product: *p,
                        bundle: bundle.clone(),
                        coeff: *c,
                    },
                    Rule::Strict,
                    exec,
                )?),
                None => None,
            };
            commands::cmd_hilbert(&doc, opts.as_ref(), *simplify, &parse_maxdeg(maxdeg)?, exec)
        }
    }
}

/// What the process prints and how it exits.
#[derive(Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => Outcome {
            stdout: match cli.format {
                Format::Json => render(out.json),
                Format::Text => out.text,
            },
            stderr: String::new(),
            code: out.code,
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("{e}\n"),
            code: e.exit_code(),
        },
    }
}
