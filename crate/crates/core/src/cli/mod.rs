//! Command-line front end. [`run`] does all the work so the binary stays a
//! one-liner and tests can capture output.
//!
//! Exit codes: 0 ok, 1 validation failure, 2 bad input (parse errors,
//! unknown names, bad flags), 3 contradictory evidence.

pub mod cases;
pub mod netfile;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::catalog::{self, BuiltNet, HypothesisSets, Params};
use crate::classical::{self, classical_distribution, Distribution};
use crate::error::{Error, Result};
use crate::fuzzy::DirectProductSet;
use crate::lattice::{self, Kernel, LatticeSpec, Potential};
use crate::net::{Complex, Net, Value};
use crate::pathsum::{enumerate_paths, pathsum_classical_distribution, pathsum_quantum_distribution};
use crate::quantum::{parent_cb_net, quantum_distribution};

use cases::{fmt_evidence, fmt_num, fmt_values, NO_OUTPUT};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CONTRADICTION: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qbnet",
    version,
    about = "Exact inference for classical and quantum Bayesian nets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Classical,
    Quantum,
    Pathsum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Hypotheses {
    Singles,
    Pairs,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Exact,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PotentialArg {
    Free,
    Harmonic,
    Well,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Propagate,
    Paths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseSet {
    TwoMagnet,
    ThreeMagnet,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check graph, table normalization and whole-net normalization.
    Validate { net: PathBuf },
    /// Conditional distribution of the hypothesis components.
    Query {
        net: PathBuf,
        /// Hypothesis components, comma separated or repeated.
        #[arg(short = 'H', long = "hypothesis", required = true, value_delimiter = ',')]
        hypothesis: Vec<String>,
        /// Evidence as `component=value` or `component={v1 v2}`.
        #[arg(short, long = "evidence")]
        evidence: Vec<String>,
        /// Defaults to the kind of the net. `classical` on a quantum net
        /// queries its parent classical net.
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Also print the non-additivity factor.
        #[arg(long)]
        fqna: bool,
    },
    /// Run a batch of evidence cases against every single and/or pair
    /// hypothesis drawn from the case file columns.
    Cases {
        net: PathBuf,
        cases: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        hypotheses: Hypotheses,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// List every path grouped by final state, with its Feynman integral.
    Paths { net: PathBuf },
    /// Built-in example nets.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Single-particle lattice propagation.
    Lattice(LatticeArgs),
}

#[derive(Debug, Subcommand)]
pub enum CatalogAction {
    /// List entries and their parameters.
    List,
    /// Emit an entry as a net file.
    Build {
        id: String,
        /// Parameter override `name=value`.
        #[arg(short, long = "param")]
        params: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit the standard evidence cases for the spin nets.
    Cases {
        #[arg(value_enum)]
        set: CaseSet,
    },
}

#[derive(Debug, clap::Args)]
pub struct LatticeArgs {
    #[arg(long, default_value_t = 16)]
    pub nx: usize,
    #[arg(long, default_value_t = 4)]
    pub nt: usize,
    #[arg(long, default_value_t = 0.5)]
    pub dx: f64,
    #[arg(long, default_value_t = 0.1)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, value_enum, default_value = "exact")]
    pub kernel: KernelArg,
    #[arg(long, value_enum, default_value = "free")]
    pub potential: PotentialArg,
    /// Harmonic frequency.
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Well depth.
    #[arg(long, default_value_t = 1.0)]
    pub depth: f64,
    /// Well width.
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    /// Sum over lattice paths instead of multiplying step matrices.
    #[arg(long, value_enum, default_value = "propagate")]
    pub method: Method,
    /// Instead of propagating, compare kernels over this many halvings of
    /// dt and dx.
    #[arg(long)]
    pub convergence: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
}

/// Output of one command.
struct Done {
    text: String,
    code: u8,
}

impl Done {
    fn ok(text: String) -> Self {
        Done { text, code: EXIT_OK }
    }
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ContradictoryEvidence => EXIT_CONTRADICTION,
        Error::CyclicGraph | Error::StateSpaceTooLarge { .. } => EXIT_INVALID,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code() as u8;
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, err) {
        Ok(done) => {
            let _ = out.write_all(done.text.as_bytes());
            done.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, err: &mut dyn Write) -> Result<Done> {
    match cmd {
        Command::Validate { net } => validate(&load(&net)?),
        Command::Query {
            net,
            hypothesis,
            evidence,
            mode,
            fqna,
        } => {
            let net = load(&net)?;
            let v = violations(&net);
            if !v.is_empty() {
                let _ = writeln!(err, "warning: net fails validation ({} problems)", v.len());
            }
            query(&net, &hypothesis, &parse_evidence(&evidence)?, mode, fqna)
        }
        Command::Cases {
            net,
            cases: file,
            hypotheses,
            format,
        } => {
            let net = load(&net)?;
            let (columns, list) = cases::parse_cases(&read(&file)?)?;
            for c in &columns {
                match &net {
                    BuiltNet::Classical(n) => n.component(c).map(|_| ()),
                    BuiltNet::Quantum(q) => q.component(c).map(|_| ()),
                }?;
            }
            let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
            let which = match hypotheses {
                Hypotheses::Singles => HypothesisSets::Singles,
                Hypotheses::Pairs => HypothesisSets::Pairs,
                Hypotheses::Both => HypothesisSets::Both,
            };
            let report = catalog::run_evidence_cases(&net, &list, &cols, which);
            Ok(Done::ok(match format {
                Format::Text => cases::render_text(&report),
                Format::Csv => cases::render_csv(&report),
            }))
        }
        Command::Paths { net } => paths(&load(&net)?),
        Command::Catalog { action } => catalog_cmd(action),
        Command::Lattice(args) => lattice_cmd(&args),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load(path: &Path) -> Result<BuiltNet> {
    netfile::parse_net(&read(path)?)
}

fn violations(net: &BuiltNet) -> Vec<classical::Violation> {
    catalog::validate_built(net)
}

fn validate(net: &BuiltNet) -> Result<Done> {
    let v = violations(net);
    if v.is_empty() {
        return Ok(Done::ok("ok\n".into()));
    }
    let mut text = String::new();
    for x in &v {
        writeln!(text, "violation: {x}").unwrap();
    }
    Ok(Done {
        text,
        code: EXIT_INVALID,
    })
}

/// `c=v` or `c={v1 v2}` items, merged into one set.
pub fn parse_evidence(items: &[String]) -> Result<DirectProductSet> {
    let mut e = DirectProductSet::full();
    for item in items {
        let (c, v) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidQuery(format!("expected component=value, got `{item}`")))?;
        let (c, v) = (c.trim(), v.trim());
        let vals: Option<Vec<i32>> = match v.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            Some(inner) => inner
                .split(|ch: char| ch.is_whitespace() || ch == ',')
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().ok())
                .collect(),
            None => v.parse().ok().map(|x| vec![x]),
        };
        let vals = vals
            .filter(|v| !v.is_empty())
            .ok_or_else(|| Error::InvalidQuery(format!("cannot read value `{v}` for `{c}`")))?;
        if e.get(c).is_some() {
            return Err(Error::InvalidQuery(format!("`{c}` given twice")));
        }
        e.insert(c, vals)?;
    }
    Ok(e)
}

fn query(
    net: &BuiltNet,
    hypothesis: &[String],
    evidence: &DirectProductSet,
    mode: Option<Mode>,
    fqna: bool,
) -> Result<Done> {
    let hs: Vec<&str> = hypothesis.iter().map(|s| s.trim()).collect();
    let (label, result): (&str, Result<Distribution>) = match (net, mode) {
        (BuiltNet::Classical(n), None | Some(Mode::Classical)) => {
            ("classical", classical_distribution(n, &hs, evidence))
        }
        (BuiltNet::Classical(n), Some(Mode::Pathsum)) => {
            ("classical path sum", pathsum_classical_distribution(n, &hs, evidence))
        }
        (BuiltNet::Classical(_), Some(Mode::Quantum)) => {
            return Err(Error::InvalidQuery("quantum mode needs a quantum net".into()))
        }
        (BuiltNet::Quantum(q), None | Some(Mode::Quantum)) => ("quantum", quantum_distribution(q, &hs, evidence)),
        (BuiltNet::Quantum(q), Some(Mode::Pathsum)) => {
            ("quantum path sum", pathsum_quantum_distribution(q, &hs, evidence))
        }
        (BuiltNet::Quantum(q), Some(Mode::Classical)) => (
            "classical parent",
            classical_distribution(&parent_cb_net(q), &hs, evidence),
        ),
    };
    let mut text = format!("# P({} | {}), {label}\n", hs.join(", "), fmt_evidence(evidence));
    match result {
        Ok(d) => {
            for (v, p) in &d.probabilities {
                let lhs: Vec<String> = hs.iter().zip(v).map(|(c, x)| format!("{c}={x}")).collect();
                writeln!(text, "{}  {}", lhs.join(" "), fmt_num(*p)).unwrap();
            }
            if fqna {
                writeln!(text, "f_qna  {}", fmt_num(d.f_qna)).unwrap();
            }
            Ok(Done::ok(text))
        }
        Err(Error::ContradictoryEvidence) => {
            writeln!(text, "{NO_OUTPUT} (contradictory evidence)").unwrap();
            Ok(Done {
                text,
                code: EXIT_CONTRADICTION,
            })
        }
        Err(e) => Err(e),
    }
}

fn fmt_complex(z: Complex) -> String {
    format!("({}, {})", fmt_num(z.re), fmt_num(z.im))
}

fn describe_path<T: Value>(net: &Net<T>, states: &[usize]) -> String {
    (0..net.len())
        .map(|i| format!("{}={}", net.node_name(i), fmt_values(&net.space(i).states()[states[i]])))
        .collect::<Vec<_>>()
        .join(" ")
}

fn describe_final(sigma: &crate::net::Assignment) -> String {
    sigma
        .iter()
        .map(|(c, v)| format!("{c}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn paths(net: &BuiltNet) -> Result<Done> {
    let mut text = String::new();
    match net {
        BuiltNet::Quantum(q) => {
            let p = enumerate_paths(q)?;
            let fi = p.feynman_integrals();
            let mut total = 0.0;
            for (sigma, ps) in &p.classes {
                let a = fi[sigma];
                total += a.norm_sqr();
                writeln!(
                    text,
                    "final {}: {} paths, FI = {}, |FI|^2 = {}",
                    describe_final(sigma),
                    ps.len(),
                    fmt_complex(a),
                    fmt_num(a.norm_sqr())
                )
                .unwrap();
                for path in ps {
                    writeln!(
                        text,
                        "  {}  {}",
                        describe_path(q, &path.states),
                        fmt_complex(path.value)
                    )
                    .unwrap();
                }
            }
            writeln!(
                text,
                "{} paths, {} final states, sum |FI|^2 = {}",
                p.num_paths(),
                p.classes.len(),
                fmt_num(total)
            )
            .unwrap();
        }
        BuiltNet::Classical(n) => {
            let p = enumerate_paths(n)?;
            let mut total = 0.0;
            for (sigma, ps) in &p.classes {
                let s: f64 = ps.iter().map(|x| x.value).sum();
                total += s;
                writeln!(
                    text,
                    "final {}: {} paths, P = {}",
                    describe_final(sigma),
                    ps.len(),
                    fmt_num(s)
                )
                .unwrap();
                for path in ps {
                    writeln!(text, "  {}  {}", describe_path(n, &path.states), fmt_num(path.value)).unwrap();
                }
            }
            writeln!(
                text,
                "{} paths, {} final states, sum P = {}",
                p.num_paths(),
                p.classes.len(),
                fmt_num(total)
            )
            .unwrap();
        }
    }
    Ok(Done::ok(text))
}

fn catalog_cmd(action: CatalogAction) -> Result<Done> {
    match action {
        CatalogAction::List => {
            let mut text = String::new();
            for e in catalog::entries() {
                let kind = match e.kind {
                    catalog::Kind::Classical => "classical",
                    catalog::Kind::Quantum => "quantum",
                };
                writeln!(text, "{:<22} {:<9} {}", e.id, kind, e.summary).unwrap();
                if !e.params.is_empty() {
                    let ps: Vec<String> = e.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    writeln!(text, "{:<22} {:<9} {}", "", "", ps.join(" ")).unwrap();
                }
            }
            Ok(Done::ok(text))
        }
        CatalogAction::Build { id, params, output } => {
            let net = catalog::build(&id, &Params::parse(params.iter().map(String::as_str))?)?;
            let text = netfile::emit_net(&net);
            match output {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    Ok(Done::ok(String::new()))
                }
                None => Ok(Done::ok(text)),
            }
        }
        CatalogAction::Cases { set } => Ok(Done::ok(match set {
            CaseSet::TwoMagnet => cases::emit_cases(&catalog::TWO_MAGNET_COLUMNS, &catalog::two_magnet_cases()),
            CaseSet::ThreeMagnet => cases::emit_cases(&catalog::THREE_MAGNET_COLUMNS, &catalog::three_magnet_cases()),
        })),
    }
}

fn lattice_spec(a: &LatticeArgs) -> LatticeSpec {
    let mut spec = LatticeSpec::new(a.nx, a.dx, a.nt, a.dt).with_potential(match a.potential {
        PotentialArg::Free => Potential::Free,
        PotentialArg::Harmonic => Potential::Harmonic { omega: a.omega },
        PotentialArg::Well => Potential::Well {
            depth: a.depth,
            width: a.width,
        },
    });
    spec.mass = a.mass;
    spec.hbar = a.hbar;
    spec
}

fn lattice_cmd(a: &LatticeArgs) -> Result<Done> {
    let spec = lattice_spec(a);
    spec.check()?;
    let csv = a.format == Format::Csv;
    let mut text = String::new();
    if let Some(h) = a.convergence {
        let rows = lattice::kernel_convergence(&spec, h)?;
        writeln!(text, "{}", if csv { "dt,dtheta,error" } else { "dt  dtheta  error" }).unwrap();
        let sep = if csv { "," } else { "  " };
        for (dt, dth, e) in rows {
            writeln!(text, "{}{sep}{}{sep}{}", fmt_num(dt), fmt_num(dth), fmt_num(e)).unwrap();
        }
        return Ok(Done::ok(text));
    }
    let kernel = match a.kernel {
        KernelArg::Exact => Kernel::Exact,
        KernelArg::Gaussian => Kernel::Gaussian,
    };
    let psi: Vec<Complex> = match a.method {
        Method::Propagate => lattice::propagate(&spec, kernel)?,
        Method::Paths => {
            let net = lattice::build_lattice_net(&spec, kernel)?;
            let mut psi = vec![Complex::new(0.0, 0.0); spec.nx];
            for (sigma, fi) in enumerate_paths(&net)?.feynman_integrals() {
                if let Some(s) = lattice::final_site(&spec, &sigma) {
                    psi[s] = fi;
                }
            }
            psi
        }
    };
    if csv {
        text.push_str("site,x,re,im,probability\n");
    } else {
        writeln!(
            text,
            "# t = {}, dtheta = {}",
            fmt_num(spec.duration()),
            fmt_num(spec.dtheta())
        )
        .unwrap();
        text.push_str("site  x  amplitude  probability\n");
    }
    let mut total = 0.0;
    for (s, a) in psi.iter().enumerate() {
        let x = fmt_num(spec.position(s));
        total += a.norm_sqr();
        if csv {
            writeln!(
                text,
                "{s},{x},{},{},{}",
                fmt_num(a.re),
                fmt_num(a.im),
                fmt_num(a.norm_sqr())
            )
            .unwrap();
        } else {
            writeln!(text, "{s}  {x}  {}  {}", fmt_complex(*a), fmt_num(a.norm_sqr())).unwrap();
        }
    }
    if !csv {
        writeln!(text, "total  {}", fmt_num(total)).unwrap();
    }
    Ok(Done::ok(text))
}
