use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C;
use torus_greens::lattice::{Lattice2, Lattice3};
use torus_greens::lattice_sum::{EvalConfig, GreenMode, Strategy};

#[derive(Debug, Parser)]
#[command(name = "torus-greens", version, about = "Twisted lattice series, periodic Green functions and their identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of standard output
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<std::path::PathBuf>,
    /// Worker threads; never changes the numbers, only wall time
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate R₂(s, M, x, ξ) on a planar lattice
    Eval2(Eval2Args),
    /// Evaluate R₃(s, M, x, ξ) on a spatial lattice
    Eval3(Eval3Args),
    /// Quasi-periodic Laplace Green function on a 3-torus
    Green(GreenArgs),
    /// Evaluate the continuum series I_cont(s, ξ, x, y) on a planar lattice
    Icont(IcontArgs),
    /// Run a verification suite and report residuals
    Verify(VerifyArgs),
    /// Continuum limit c → ∞ of stacked 3D series
    Limit(LimitArgs),
    /// Sample the Dirac monopole and check the Bogomolny system
    Monopole(MonopoleArgs),
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// Exponent s as re[,im]
    #[arg(long, value_name = "RE[,IM]", value_parser = parse_complex, allow_hyphen_values = true)]
    pub s: C,
    /// Relative shell truncation tolerance
    #[arg(long, env = "TORUS_GREENS_TOL", default_value_t = 1e-14)]
    pub tol: f64,
    #[arg(long, default_value_t = 2000)]
    pub max_shells: usize,
    /// Split point λ of the t-integral (default π/|det(LM)|^{2/d})
    #[arg(long, value_name = "LAMBDA")]
    pub split: Option<f64>,
    /// Overall normalization c₀ as re[,im]
    #[arg(long, value_name = "RE[,IM]", value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    pub c0: C,
    /// Multiply by Γ(s): the completed series I instead of R
    #[arg(long)]
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Direct,
    Ewald,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Direct => Strategy::Direct,
            StrategyArg::Ewald => Strategy::Ewald,
        }
    }
}

#[derive(Debug, Args)]
pub struct Eval2Args {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Lattice rows (a,0), (bx,b) as a,bx,b
    #[arg(long, value_name = "A,BX,B", value_parser = parse_lattice2, default_value = "1,0,1")]
    pub lattice: Lattice2,
    /// Metric M, 4 row-major values
    #[arg(long, value_parser = parse_vec::<4>, allow_hyphen_values = true, default_value = "1,0,0,1")]
    pub metric: [f64; 4],
    #[arg(long, value_name = "X,Y", value_parser = parse_vec::<2>, allow_hyphen_values = true)]
    pub x: [f64; 2],
    #[arg(long, value_name = "X,Y", value_parser = parse_vec::<2>, allow_hyphen_values = true, default_value = "0,0")]
    pub xi: [f64; 2],
    /// Twist relabeling w, 4 row-major integers
    #[arg(long, value_parser = parse_ivec::<4>, allow_hyphen_values = true, default_value = "1,0,0,1")]
    pub w: [i64; 4],
    #[arg(long, visible_alias = "strategy", value_enum, default_value_t = StrategyArg::Ewald)]
    pub mode: StrategyArg,
}

#[derive(Debug, Args)]
pub struct Eval3Args {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Lower-triangular lattice rows as a,bx,b,cx,cy,c
    #[arg(long, value_name = "A,BX,B,CX,CY,C", value_parser = parse_lattice3, allow_hyphen_values = true, default_value = "1,0,1,0,0,1")]
    pub lattice: Lattice3,
    /// Metric M, 9 row-major values
    #[arg(long, value_parser = parse_vec::<9>, allow_hyphen_values = true, default_value = "1,0,0,0,1,0,0,0,1")]
    pub metric: [f64; 9],
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_vec::<3>, allow_hyphen_values = true)]
    pub x: [f64; 3],
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_vec::<3>, allow_hyphen_values = true, default_value = "0,0,0")]
    pub xi: [f64; 3],
    /// Twist relabeling w, 9 row-major integers
    #[arg(long, value_parser = parse_ivec::<9>, allow_hyphen_values = true, default_value = "1,0,0,0,1,0,0,0,1")]
    pub w: [i64; 9],
    #[arg(long, visible_alias = "strategy", value_enum, default_value_t = StrategyArg::Ewald)]
    pub mode: StrategyArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GreenModeArg {
    Fourier,
    Ewald,
}

impl From<GreenModeArg> for GreenMode {
    fn from(m: GreenModeArg) -> Self {
        match m {
            GreenModeArg::Fourier => GreenMode::Fourier,
            GreenModeArg::Ewald => GreenMode::Ewald,
        }
    }
}

#[derive(Debug, Args)]
pub struct GreenArgs {
    #[arg(long, value_name = "A,BX,B,CX,CY,C", value_parser = parse_lattice3, allow_hyphen_values = true, default_value = "1,0,1,0,0,1")]
    pub lattice: Lattice3,
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_vec::<3>, allow_hyphen_values = true)]
    pub x: [f64; 3],
    #[arg(long, value_name = "X,Y,Z", value_parser = parse_vec::<3>, allow_hyphen_values = true, default_value = "0,0,0")]
    pub xi: [f64; 3],
    #[arg(long, value_parser = parse_ivec::<9>, allow_hyphen_values = true, default_value = "1,0,0,0,1,0,0,0,1")]
    pub w: [i64; 9],
    #[arg(long, value_enum, default_value_t = GreenModeArg::Ewald)]
    pub mode: GreenModeArg,
    /// Half-width K of the Fourier cube |m_i| ≤ K
    #[arg(long, default_value_t = 40)]
    pub cutoff: usize,
    #[arg(long, env = "TORUS_GREENS_TOL", default_value_t = 1e-14)]
    pub tol: f64,
    #[arg(long, value_name = "RE[,IM]", value_parser = parse_complex, allow_hyphen_values = true, default_value = "1")]
    pub c0: C,
}

#[derive(Debug, Args)]
pub struct IcontArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, value_name = "A,BX,B", value_parser = parse_lattice2, allow_hyphen_values = true, default_value = "1,0,1")]
    pub lattice: Lattice2,
    #[arg(long, value_name = "X,Y", value_parser = parse_vec::<2>, allow_hyphen_values = true)]
    pub x: [f64; 2],
    #[arg(long, value_name = "X,Y", value_parser = parse_vec::<2>, allow_hyphen_values = true, default_value = "0,0")]
    pub xi: [f64; 2],
    /// Transverse coordinate y
    #[arg(long, allow_hyphen_values = true)]
    pub y: f64,
    #[arg(long, visible_alias = "strategy", value_enum, default_value_t = StrategyArg::Ewald)]
    pub mode: StrategyArg,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// lemma1 | lemma2 | quasi | modular2d | modular3d | limit | fed2c | all
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(torus_greens::verify::SUITES))]
    pub suite: String,
    /// Random cases per suite (for the randomized suites)
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u32).range(1..))]
    pub count: u32,
    #[arg(long, default_value_t = torus_greens::verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Residual tolerance for every row (default: per-identity tolerances)
    #[arg(long, env = "TORUS_GREENS_TOL")]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    #[arg(long, value_name = "RE[,IM]", value_parser = parse_complex, allow_hyphen_values = true, default_value = "1.2")]
    pub s: C,
    #[arg(long, value_name = "A,BX,B", value_parser = parse_lattice2, allow_hyphen_values = true, default_value = "1,0,1")]
    pub lattice: Lattice2,
    #[arg(long, value_name = "X,Y", value_parser = parse_vec::<2>, allow_hyphen_values = true, default_value = "0.4,0.1")]
    pub x: [f64; 2],
    #[arg(long, value_name = "X,Y", value_parser = parse_vec::<2>, allow_hyphen_values = true, default_value = "0.2,0.3")]
    pub xi: [f64; 2],
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    pub y: f64,
    /// Position offset ζ of the stacked point inside its layer
    #[arg(long, default_value_t = 0.5)]
    pub zeta: f64,
    /// Ascending stacking heights c
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64")]
    pub c: Vec<f64>,
    /// Required deviation at the largest c
    #[arg(long, env = "TORUS_GREENS_TOL", default_value_t = 1e-3)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct MonopoleArgs {
    /// Monopole charge m (c₀ = i·m/2 unless --c0 is given)
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    pub m: i64,
    #[arg(long, value_name = "RE[,IM]", value_parser = parse_complex, allow_hyphen_values = true)]
    pub c0: Option<C>,
    /// Coupling in the first Bogomolny equation
    #[arg(long, default_value_t = 1.0)]
    pub g: f64,
    /// Lower grid corner (Re z, Im z, y)
    #[arg(long, value_parser = parse_vec::<3>, allow_hyphen_values = true, default_value = "0.5,0.5,0.5")]
    pub lo: [f64; 3],
    /// Upper grid corner (Re z, Im z, y)
    #[arg(long, value_parser = parse_vec::<3>, allow_hyphen_values = true, default_value = "1,1,1")]
    pub hi: [f64; 3],
    /// Grid spacing
    #[arg(long, default_value_t = 0.05)]
    pub h: f64,
    /// Also check the modular substitution with this τ as re[,im]
    #[arg(long, value_name = "RE[,IM]", value_parser = parse_complex, allow_hyphen_values = true)]
    pub tau: Option<C>,
}

fn split_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|p| {
            let p = p.trim();
            p.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| format!("'{p}' is not a finite number"))
        })
        .collect()
}

pub fn parse_complex(s: &str) -> Result<C, String> {
    match split_floats(s)?.as_slice() {
        [re] => Ok(C::new(*re, 0.0)),
        [re, im] => Ok(C::new(*re, *im)),
        _ => Err("expected re or re,im".into()),
    }
}

pub fn parse_vec<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let v = split_floats(s)?;
    v.try_into().map_err(|v: Vec<f64>| format!("expected {N} comma-separated values, got {}", v.len()))
}

pub fn parse_ivec<const N: usize>(s: &str) -> Result<[i64; N], String> {
    let v = s
        .split(',')
        .map(|p| p.trim().parse::<i64>().map_err(|_| format!("'{}' is not an integer", p.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    v.try_into().map_err(|v: Vec<i64>| format!("expected {N} comma-separated integers, got {}", v.len()))
}

pub fn parse_lattice2(s: &str) -> Result<Lattice2, String> {
    let [a, bx, b] = parse_vec::<3>(s)?;
    Lattice2::new(a, bx, b).map_err(|e| e.to_string())
}

pub fn parse_lattice3(s: &str) -> Result<Lattice3, String> {
    let [a, bx, b, cx, cy, c] = parse_vec::<6>(s)?;
    Lattice3::new(a, bx, b, cx, cy, c).map_err(|e| e.to_string())
}

pub fn square<const D: usize, const N: usize>(v: &[f64; N]) -> [[f64; D]; D] {
    std::array::from_fn(|i| std::array::from_fn(|j| v[i * D + j]))
}

pub fn isquare<const D: usize, const N: usize>(v: &[i64; N]) -> [[i64; D]; D] {
    std::array::from_fn(|i| std::array::from_fn(|j| v[i * D + j]))
}

impl SeriesArgs {
    pub fn config(&self, mode: StrategyArg) -> EvalConfig {
        let mut cfg = EvalConfig::default().with_strategy(mode.into()).with_tol(self.tol).with_c0(self.c0);
        cfg.max_shells = self.max_shells;
        cfg.split_lambda = self.split;
        cfg
    }
}
