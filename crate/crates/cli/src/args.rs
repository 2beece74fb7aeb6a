use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(
    name = "varieties",
    version,
    about = "Exact checks on unitriangular p-groups, tensor rank, group laws, wreath products and Nielsen reduction"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug)]
pub struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "VARIETIES_THREADS")]
    pub threads: Option<usize>,

    /// Add a timing section to the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Unitriangular groups UT(l, p, m).
    #[command(subcommand)]
    Ut(UtCommand),
    /// Tensor rank over F_p and line certificates.
    #[command(subcommand)]
    Rank(RankCommand),
    /// Group laws, verbal subgroups and products of Burnside varieties.
    #[command(subcommand)]
    Identity(IdentityCommand),
    /// Wreath products and discrimination.
    #[command(subcommand)]
    Wreath(WreathCommand),
    /// Free-group words and Nielsen reduction.
    #[command(subcommand)]
    Words(WordsCommand),
}

#[derive(Subcommand, Debug)]
pub enum UtCommand {
    /// Check the p-th power formula, centrality and exponent of p-th powers,
    /// and the counting inequality, in UT(p+1, p, m).
    #[command(name = "verify-lemma1")]
    VerifyLemma1(UtVerifyArgs),
    /// The p-th power of one matrix, by the corner formula and by repeated
    /// multiplication.
    Power(UtPowerArgs),
    /// Group order and dimensions.
    Order(UtOrderArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct UtVerifyArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also walk every element (small groups only).
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct UtPowerArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub m: usize,
    /// Matrix JSON; a seeded random matrix when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct UtOrderArgs {
    #[arg(long)]
    pub p: u32,
    /// Matrix size; defaults to p + 1.
    #[arg(long)]
    pub l: Option<usize>,
    #[arg(long)]
    pub m: usize,
}

#[derive(Subcommand, Debug)]
pub enum RankCommand {
    /// Search for a line avoiding all sums of `count` decomposable forms.
    #[command(name = "find-line")]
    FindLine(FindLineArgs),
    /// Re-check a certificate file.
    Verify(VerifyArgs),
    /// Compare (p^(m^p) - 1)/(p - 1) with p^(p m^2) exactly.
    Inequality(InequalityArgs),
    /// Rank histogram of every form in a small space.
    Classify(ClassifyArgs),
    /// Sample products of p-th powers in UT(p+1, p, d) against a certificate.
    Shadow(ShadowArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct FindLineArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub arity: usize,
    #[arg(long)]
    pub dim: usize,
    /// Number r of decomposable summands.
    #[arg(long)]
    pub count: u32,
    /// Search nodes per query.
    #[arg(long, default_value_t = varieties_core::rankcert::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    /// Certificate JSON, bare or inside a `rank find-line` report.
    pub certificate: PathBuf,
    #[arg(long, default_value_t = varieties_core::rankcert::DEFAULT_NODE_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct InequalityArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub m: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub arity: usize,
    #[arg(long)]
    pub dim: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ShadowArgs {
    /// Certificate (bare or inside a report) with arity equal to p.
    pub certificate: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum IdentityCommand {
    /// Check a law w = 1 in a group.
    Check(CheckArgs),
    /// Verbal subgroup generated by the values of words.
    Verbal(VerbalArgs),
    /// Membership in the product B_m B_n.
    Member(MemberArgs),
    /// The scheme (x1^n ... xk^n)^m = 1 for all k, against membership in B_m B_n.
    Scheme(SchemeArgs),
    /// The single law (x1^n x2^n)^m = 1, gcd(m, n) = 1, against membership.
    Coprime(MemberArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Auto,
    Exhaustive,
    Randomized,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub word: String,
    /// Exponent parameter, `name=value`; repeatable.
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, i64)>,
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = varieties_core::identity::DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct VerbalArgs {
    #[arg(long)]
    pub group: String,
    /// Repeatable.
    #[arg(long = "word", required = true)]
    pub words: Vec<String>,
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, i64)>,
    /// Include the element list.
    #[arg(long)]
    pub elements: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct MemberArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub n: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct SchemeArgs {
    #[arg(long)]
    pub group: String,
    /// Outer exponent m.
    #[arg(long)]
    pub m: u64,
    /// Inner exponent n.
    #[arg(long)]
    pub n: u64,
}

#[derive(Subcommand, Debug)]
pub enum WreathCommand {
    /// Build A wr D and check its order and the projection onto D.
    Build(BuildArgs),
    /// Search for a homomorphism G -> D injective on a set.
    Discriminate(DiscriminateArgs),
    /// A linear functional Z^n -> Z injective on a set of integer points.
    Abelian(AbelianArgs),
    /// The maps epsilon, eta, alpha on a free group with basis split into
    /// y's and z's.
    #[command(name = "uv-shadow")]
    UvShadow(UvShadowArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct BuildArgs {
    #[arg(long)]
    pub base: String,
    #[arg(long)]
    pub top: String,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct DiscriminateArgs {
    /// Source group G.
    #[arg(long)]
    pub group: String,
    /// Target group D.
    #[arg(long)]
    pub target: String,
    /// Elements of G: encodings separated by ';', coordinates by ','.
    /// Defaults to all of G.
    #[arg(long)]
    pub set: Option<String>,
    #[arg(long, default_value_t = varieties_core::wreath::DEFAULT_SEARCH_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct AbelianArgs {
    /// Integer points separated by ';', coordinates by ','.
    #[arg(long, allow_hyphen_values = true)]
    pub set: String,
}

#[derive(Args, Debug, Serialize)]
pub struct UvShadowArgs {
    #[arg(long)]
    pub s: u32,
    #[arg(long)]
    pub r: u32,
    /// D.
    #[arg(long)]
    pub top: String,
    /// A.
    #[arg(long)]
    pub base: String,
    /// Images of the y's in D, separated by ';'; defaults to the generators
    /// of D, cyclically.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long, default_value_t = 500)]
    pub words: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum WordsCommand {
    /// Nielsen-reduce a tuple and decide whether it is a basis.
    Nielsen(NielsenArgs),
    /// Parse and freely reduce a word.
    Parse(ParseArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct NielsenArgs {
    /// Words separated by ';'.
    #[arg(long)]
    pub tuple: String,
    /// Rank of the free group; defaults to the largest variable index.
    #[arg(long)]
    pub rank: Option<u32>,
}

#[derive(Args, Debug, Serialize)]
pub struct ParseArgs {
    #[arg(long)]
    pub word: String,
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, i64)>,
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got '{s}'"))?;
    let value = value.trim().parse().map_err(|e| format!("bad value in '{s}': {e}"))?;
    Ok((name.trim().to_string(), value))
}
