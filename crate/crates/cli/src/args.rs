//! Flag definitions. Every input is a flag; there are no config files or
//! environment variables.

use clap::{Args, Parser, Subcommand, ValueEnum};
use grassmann_invariants::{Convention, SpectralFn};

#[derive(Parser, Debug, Clone, PartialEq)]
#[command(
    name = "grassmann",
    version,
    about = "Invariant measures on Stiefel and Grassmann manifolds"
)]
pub struct CommandSpec {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Command {
    /// Constants of the Grassmannian integral formula for (n, i, l)
    Constants {
        #[command(flatten)]
        dims: Nil,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Draw Haar-distributed frames or subspaces
    Sample {
        #[command(subcommand)]
        kind: SampleKind,
    },
    /// Canonical-angle spectra of uniform subspaces relative to R^l
    Angles {
        #[command(flatten)]
        dims: Nil,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Histogram of the spectrum, with KS distances when m = 1
    Density {
        #[command(flatten)]
        dims: Nil,
        #[arg(long, default_value_t = 50, value_parser = positive)]
        bins: usize,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check an integral identity numerically
    Verify {
        #[command(subcommand)]
        identity: Identity,
    },
    /// Total mass of the invariant measure on V_{n,m}
    Volume {
        #[arg(long, value_parser = positive)]
        n: usize,
        #[arg(long, value_parser = positive)]
        m: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum SampleKind {
    /// Frames in V_{n,m}
    Stiefel {
        #[arg(long, value_parser = positive)]
        n: usize,
        #[arg(long, value_parser = positive)]
        m: usize,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Projections onto subspaces in G_{n,i}
    Grassmann {
        #[arg(long, value_parser = positive)]
        n: usize,
        #[arg(long, value_parser = positive)]
        i: usize,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand, Debug, Clone, PartialEq)]
pub enum Identity {
    /// Unit sphere against its bi-spherical reduction
    Theorem1 {
        #[arg(long, value_parser = positive)]
        n: usize,
        #[arg(long, value_parser = positive)]
        l: usize,
        #[arg(long, default_value = "one", value_parser = parse_f0)]
        f0: SpectralFn,
        #[arg(long, default_value_t = 64, value_parser = positive)]
        q: usize,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Grassmannian against the ordered-simplex eigenvalue integral
    Theorem2 {
        #[command(flatten)]
        dims: Nil,
        #[arg(long, default_value = "one", value_parser = parse_f0)]
        f0: SpectralFn,
        #[arg(long, default_value_t = 64, value_parser = positive)]
        q: usize,
        #[arg(long, value_enum, default_value_t = ConventionArg::ComplementSwapped)]
        convention: ConventionArg,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Haar frames against bi-Stiefel coordinates with matrix Beta r
    Bistiefel {
        #[arg(long, value_parser = positive)]
        n: usize,
        #[arg(long, value_parser = positive)]
        m: usize,
        #[arg(long, value_parser = positive)]
        k: usize,
        /// one | top-trace | v11sq
        #[arg(long = "fn", default_value = "one", value_parser = parse_frame_fn)]
        func: FrameFn,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Matrix Beta-Gamma factorization with F = |p1|^a |p2|^b e^{-tr p1 - tr p2}
    Zhang {
        #[arg(long, value_parser = positive)]
        m: usize,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 64, value_parser = positive)]
        q: usize,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Random search for a violation of K_l-invariance
    Invariance {
        #[command(flatten)]
        dims: Nil,
        /// trace-proj | e1 | one | lift:<f0>
        #[arg(long = "fn", default_value = "trace-proj", value_parser = parse_subspace_fn)]
        func: SubspaceFn,
        #[command(flatten)]
        mc: McArgs,
        #[command(flatten)]
        out: OutArgs,
    },
}

/// `(n, i, l)`
#[derive(Args, Debug, Clone, Copy, PartialEq)]
pub struct Nil {
    #[arg(long, value_parser = positive)]
    pub n: usize,
    #[arg(long, value_parser = positive)]
    pub i: usize,
    #[arg(long, value_parser = positive)]
    pub l: usize,
}

#[derive(Args, Debug, Clone, Copy, PartialEq)]
pub struct McArgs {
    #[arg(long, default_value_t = 100_000, value_parser = positive)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    pub threads: usize,
}

#[derive(Args, Debug, Clone, PartialEq)]
pub struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
    /// Record wall-clock time (reports are no longer byte-reproducible)
    #[arg(long)]
    pub timing: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConventionArg {
    AsStated,
    ComplementSwapped,
}

impl From<ConventionArg> for Convention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::AsStated => Convention::AsStated,
            ConventionArg::ComplementSwapped => Convention::ComplementSwapped,
        }
    }
}

/// Test functions on `V_{n,m}` for the bi-Stiefel check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameFn {
    One,
    /// Trace of the Gram matrix of the top `n - k` rows.
    TopTrace,
    /// Squared top-left entry.
    V11Sq,
}

impl FrameFn {
    pub fn name(self) -> &'static str {
        match self {
            FrameFn::One => "one",
            FrameFn::TopTrace => "top-trace",
            FrameFn::V11Sq => "v11sq",
        }
    }
}

/// Functions on `G_{n,i}` for the invariance search.
#[derive(Debug, Clone, PartialEq)]
pub enum SubspaceFn {
    /// `tr(Pr_xi Pr_l)`: invariant.
    TraceProj,
    /// `(Pr_xi)_{11}`: not invariant, a negative control.
    E1,
    One,
    Lift(SpectralFn),
}

impl SubspaceFn {
    pub fn name(&self) -> String {
        match self {
            SubspaceFn::TraceProj => "trace-proj".into(),
            SubspaceFn::E1 => "e1".into(),
            SubspaceFn::One => "one".into(),
            SubspaceFn::Lift(f) => format!("lift:{f}"),
        }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be a positive integer".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(format!("must be a positive integer ({e})")),
    }
}

fn parse_f0(s: &str) -> Result<SpectralFn, String> {
    s.parse()
        .map_err(|e: grassmann_invariants::Error| e.to_string())
}

fn parse_frame_fn(s: &str) -> Result<FrameFn, String> {
    match s {
        "one" => Ok(FrameFn::One),
        "top-trace" => Ok(FrameFn::TopTrace),
        "v11sq" => Ok(FrameFn::V11Sq),
        _ => Err(format!(
            "unknown function '{s}' (expected one, top-trace, v11sq)"
        )),
    }
}

fn parse_subspace_fn(s: &str) -> Result<SubspaceFn, String> {
    match s {
        "trace-proj" => Ok(SubspaceFn::TraceProj),
        "e1" => Ok(SubspaceFn::E1),
        "one" => Ok(SubspaceFn::One),
        _ => match s.strip_prefix("lift:") {
            Some(f0) => parse_f0(f0).map(SubspaceFn::Lift),
            None => Err(format!(
                "unknown function '{s}' (expected trace-proj, e1, one, lift:<f0>)"
            )),
        },
    }
}

/// Parses `argv` (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<CommandSpec, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    CommandSpec::try_parse_from(argv)
}
