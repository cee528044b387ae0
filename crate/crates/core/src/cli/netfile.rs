//! Plain-text net files.
//!
//! ```text
//! qbnet 1
//! kind classical
//!
//! node y
//! parents x
//! components y
//! states 0 1
//! entry 0 | 0 = 0.7
//! entry 1 | 0 = 0.3
//! ```
//!
//! A state is a comma-separated list of component values, one per
//! component. Entry lines give `own state | parent states = value`, with one
//! parent state per parent in `parents` order; roots omit the `|` part.
//! Unlisted entries are zero. Quantum values are reals or `[re, im]`.
//! Quantum nodes may replace their entries with one generator line:
//!
//! ```text
//! gen wavefunction psi01=[0.5,0.5] psi10=0.7071067811865476
//! gen marginalizer k=1
//! gen phase xi=3pi/4
//! gen stern-gerlach magnet=u theta=pi/5 phi=0 modes=-z@0,+z@0
//! ```
//!
//! A mode is a sign, the label of the basis it refers to, `@` and that
//! basis' polar angle, optionally followed by `:` and its azimuth.
//! `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::catalog::BuiltNet;
use crate::error::{Error, Result};
use crate::net::{parse_complex, CbNet, Complex, Net, NodeDecl, NodeSpace, QbNet, Value};
use crate::spin::{Angle, Generator, InitialWavefunction, Mode, Sign, SpinDirection};

/// A token and its 1-based column.
type Tok<'a> = (usize, &'a str);

/// Splits on whitespace, keeping `[...]` groups whole.
fn tokenize(line: &str) -> std::result::Result<Vec<Tok<'_>>, usize> {
    let mut out = Vec::new();
    let b = line.as_bytes();
    let mut i = 0;
    while i < b.len() {
        if b[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let mut depth = 0i32;
        while i < b.len() && (depth > 0 || !b[i].is_ascii_whitespace()) {
            match b[i] {
                b'[' => depth += 1,
                b']' => depth -= 1,
                _ => {}
            }
            i += 1;
        }
        if depth != 0 {
            return Err(start + 1);
        }
        out.push((start + 1, &line[start..i]));
    }
    Ok(out)
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a)
}

/// A token kept past the line it came from.
type Owned = (usize, String);

fn own(t: &Tok<'_>) -> Owned {
    (t.0, t.1.to_string())
}

fn tok(t: &Owned) -> Tok<'_> {
    (t.0, t.1.as_str())
}

#[derive(Debug)]
struct RawEntry {
    line: usize,
    own: Owned,
    parents: Vec<Owned>,
    value: Owned,
}

#[derive(Debug)]
struct Block {
    line: usize,
    name: String,
    parents: Vec<String>,
    components: Option<Vec<String>>,
    states: Option<(usize, Vec<Owned>)>,
    entries: Vec<RawEntry>,
    generator: Option<Generator>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FileKind {
    Classical,
    Quantum,
}

fn parse_state(line: usize, (col, text): Tok<'_>, arity: usize) -> Result<Vec<i32>> {
    let v: Vec<i32> = text
        .split(',')
        .map(|x| x.trim().parse::<i32>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(line, col, format!("`{text}` is not a state")))?;
    if v.len() != arity {
        return Err(Error::parse(
            line,
            col,
            format!("state `{text}` has {} values, expected {arity}", v.len()),
        ));
    }
    Ok(v)
}

fn key_values<'a>(line: usize, toks: &[Tok<'a>]) -> Result<BTreeMap<&'a str, Tok<'a>>> {
    let mut out = BTreeMap::new();
    for &(col, t) in toks {
        let (k, v) = t
            .split_once('=')
            .ok_or_else(|| Error::parse(line, col, format!("expected key=value, got `{t}`")))?;
        if out.insert(k, (col + k.len() + 1, v)).is_some() {
            return Err(Error::parse(line, col, format!("`{k}` given twice")));
        }
    }
    Ok(out)
}

fn angle(line: usize, (col, t): Tok<'_>) -> Result<Angle> {
    Angle::parse(t).map_err(|_| Error::parse(line, col, format!("`{t}` is not an angle")))
}

fn complex(line: usize, (col, t): Tok<'_>) -> Result<Complex> {
    parse_complex(t).ok_or_else(|| Error::parse(line, col, format!("`{t}` is not a number")))
}

fn parse_generator(line: usize, toks: &[Tok<'_>]) -> Result<Generator> {
    let (col, kind) = toks[0];
    let kv = key_values(line, &toks[1..])?;
    let need = |k: &str| {
        kv.get(k)
            .copied()
            .ok_or_else(|| Error::parse(line, col, format!("`{kind}` needs `{k}=`")))
    };
    let allow = |keys: &[&str]| -> Result<()> {
        match kv.iter().find(|(k, _)| !keys.contains(k)) {
            Some((k, (c, _))) => Err(Error::parse(line, *c, format!("`{kind}` takes no `{k}`"))),
            None => Ok(()),
        }
    };
    match kind {
        "wavefunction" => {
            allow(&["psi01", "psi10"])?;
            let (a, b) = (complex(line, need("psi01")?)?, complex(line, need("psi10")?)?);
            InitialWavefunction::new(a, b)
                .map(Generator::Wavefunction)
                .map_err(|e| Error::parse(line, col, e.to_string()))
        }
        "marginalizer" => {
            allow(&["k"])?;
            let (c, t) = need("k")?;
            let k = t
                .parse()
                .map_err(|_| Error::parse(line, c, format!("`{t}` is not an index")))?;
            Ok(Generator::Marginalizer { k })
        }
        "phase" => {
            allow(&["xi"])?;
            Ok(Generator::PhaseShifter {
                xi: angle(line, need("xi")?)?,
            })
        }
        "stern-gerlach" => {
            allow(&["magnet", "theta", "phi", "modes"])?;
            let (_, label) = need("magnet")?;
            let theta = angle(line, need("theta")?)?;
            let phi = match kv.get("phi") {
                Some(&t) => angle(line, t)?,
                None => Angle::zero(),
            };
            let (mcol, mtext) = need("modes")?;
            let mut inputs = Vec::new();
            let mut c = mcol;
            for m in mtext.split(',') {
                inputs.push(parse_mode(line, (c, m))?);
                c += m.len() + 1;
            }
            Ok(Generator::SternGerlach {
                magnet: SpinDirection::new(label, theta, phi),
                inputs,
            })
        }
        other => Err(Error::parse(line, col, format!("unknown generator `{other}`"))),
    }
}

fn parse_mode(line: usize, (col, t): Tok<'_>) -> Result<Mode> {
    let bad = || Error::parse(line, col, format!("`{t}` is not a mode like `+z@0`"));
    let sign = match t.chars().next() {
        Some('+') => Sign::Plus,
        Some('-') => Sign::Minus,
        _ => return Err(bad()),
    };
    let (label, dir) = t[1..].split_once('@').ok_or_else(bad)?;
    if label.is_empty() {
        return Err(bad());
    }
    let (theta, phi) = dir.split_once(':').unwrap_or((dir, "0"));
    let at = col + 2 + label.len();
    Ok(Mode::new(
        sign,
        SpinDirection::new(label, angle(line, (at, theta))?, angle(line, (at, phi))?),
    ))
}

/// Parses a net file. Syntax problems and structural problems (unknown
/// parents, bad states, duplicate entries) are reported as parse errors
/// with a line and column.
pub fn parse_net(text: &str) -> Result<BuiltNet> {
    let mut kind = None;
    let mut header = false;
    let mut blocks: Vec<Block> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let toks = tokenize(strip_comment(raw)).map_err(|c| Error::parse(line, c, "unbalanced `[`"))?;
        let Some(&(col, key)) = toks.first() else { continue };
        let rest = &toks[1..];
        if !header {
            if key != "qbnet" || rest.len() != 1 || rest[0].1 != "1" {
                return Err(Error::parse(line, col, "expected `qbnet 1` header"));
            }
            header = true;
            continue;
        }
        let one = |what: &str| -> Result<Tok<'_>> {
            match rest {
                [t] => Ok(*t),
                _ => Err(Error::parse(line, col, format!("`{key}` takes exactly one {what}"))),
            }
        };
        if key == "kind" {
            let (c, k) = one("value")?;
            if kind.is_some() {
                return Err(Error::parse(line, col, "kind given twice"));
            }
            kind = Some(match k {
                "classical" => FileKind::Classical,
                "quantum" => FileKind::Quantum,
                _ => return Err(Error::parse(line, c, format!("unknown kind `{k}`"))),
            });
            continue;
        }
        if key == "node" {
            let (_, name) = one("name")?;
            if kind.is_none() {
                return Err(Error::parse(line, col, "`kind` must come before the first node"));
            }
            if blocks.iter().any(|b| b.name == name) {
                return Err(Error::parse(line, col, format!("node `{name}` declared twice")));
            }
            blocks.push(Block {
                line,
                name: name.to_string(),
                parents: Vec::new(),
                components: None,
                states: None,
                entries: Vec::new(),
                generator: None,
            });
            continue;
        }
        let block = blocks
            .last_mut()
            .ok_or_else(|| Error::parse(line, col, format!("`{key}` outside a node block")))?;
        match key {
            "parents" => {
                if !block.parents.is_empty() || !block.entries.is_empty() {
                    return Err(Error::parse(line, col, "parents must be given once, before entries"));
                }
                block.parents = rest.iter().map(|t| t.1.to_string()).collect();
            }
            "components" => {
                if rest.is_empty() || block.components.is_some() {
                    return Err(Error::parse(
                        line,
                        col,
                        "components must be given once and be non-empty",
                    ));
                }
                block.components = Some(rest.iter().map(|t| t.1.to_string()).collect());
            }
            "states" => {
                if rest.is_empty() || block.states.is_some() {
                    return Err(Error::parse(line, col, "states must be given once and be non-empty"));
                }
                block.states = Some((line, rest.iter().map(own).collect()));
            }
            "entry" => {
                if block.generator.is_some() {
                    return Err(Error::parse(line, col, "a node has either entries or a generator"));
                }
                let eq = rest
                    .iter()
                    .position(|t| t.1 == "=")
                    .ok_or_else(|| Error::parse(line, col, "expected `= value`"))?;
                let (lhs, rhs) = (&rest[..eq], &rest[eq + 1..]);
                let [value] = rhs else {
                    return Err(Error::parse(line, col, "expected exactly one value after `=`"));
                };
                let (state, parents) = match lhs {
                    [o] => (own(o), Vec::new()),
                    [o, (_, "|"), ps @ ..] => (own(o), ps.iter().map(own).collect()),
                    _ => {
                        return Err(Error::parse(
                            line,
                            col,
                            "expected `entry state | parent states = value`",
                        ))
                    }
                };
                block.entries.push(RawEntry {
                    line,
                    own: state,
                    parents,
                    value: own(value),
                });
            }
            "gen" => {
                if kind == Some(FileKind::Classical) {
                    return Err(Error::parse(line, col, "generators are only available in quantum nets"));
                }
                if block.generator.is_some() || !block.entries.is_empty() || rest.is_empty() {
                    return Err(Error::parse(line, col, "a node has either entries or one generator"));
                }
                block.generator = Some(parse_generator(line, rest)?);
            }
            other => return Err(Error::parse(line, col, format!("unknown keyword `{other}`"))),
        }
    }
    let kind = kind.ok_or_else(|| {
        Error::parse(
            text.lines().count().max(1),
            1,
            if header { "missing `kind`" } else { "empty file" },
        )
    })?;

    let mut spaces: BTreeMap<&str, NodeSpace> = BTreeMap::new();
    for b in &blocks {
        let comps = b
            .components
            .clone()
            .ok_or_else(|| Error::parse(b.line, 1, format!("node `{}` has no components", b.name)))?;
        let (sl, toks) = b
            .states
            .as_ref()
            .ok_or_else(|| Error::parse(b.line, 1, format!("node `{}` has no states", b.name)))?;
        let states = toks
            .iter()
            .map(|t| parse_state(*sl, tok(t), comps.len()))
            .collect::<Result<Vec<_>>>()?;
        let space = NodeSpace::new(comps, states).map_err(|e| Error::parse(*sl, 1, e.to_string()))?;
        spaces.insert(&b.name, space);
    }
    match kind {
        FileKind::Classical => assemble(&blocks, &spaces, |line, t| {
            let bad = || Error::parse(line, t.0, format!("`{}` is not a real number", t.1));
            let v: f64 = t.1.parse().map_err(|_| bad())?;
            v.is_finite().then_some(v).ok_or_else(bad)
        })
        .map(BuiltNet::Classical),
        FileKind::Quantum => assemble(&blocks, &spaces, complex).map(BuiltNet::Quantum),
    }
}

fn assemble<T: Value>(
    blocks: &[Block],
    spaces: &BTreeMap<&str, NodeSpace>,
    value: impl Fn(usize, Tok<'_>) -> Result<T>,
) -> Result<Net<T>>
where
    NodeDecl<T>: FromGenerator,
{
    let mut decls = Vec::new();
    for b in blocks {
        let space = spaces[b.name.as_str()].clone();
        let mut parent_spaces = Vec::new();
        for p in &b.parents {
            parent_spaces.push(
                spaces
                    .get(p.as_str())
                    .ok_or_else(|| Error::parse(b.line, 1, format!("node `{}`: unknown parent `{p}`", b.name)))?,
            );
        }
        let parents: Vec<&str> = b.parents.iter().map(String::as_str).collect();
        if let Some(g) = &b.generator {
            decls.push(NodeDecl::<T>::from_generator(&b.name, &parents, space, g.clone()));
            continue;
        }
        let rows = space.len();
        let cols: usize = parent_spaces.iter().map(|s| s.len()).product();
        let mut values = vec![T::ZERO; rows * cols];
        let mut seen = vec![false; rows * cols];
        for e in &b.entries {
            let row = parse_state(e.line, tok(&e.own), space.components().len()).and_then(|s| {
                space.state_index(&s).ok_or_else(|| {
                    Error::parse(e.line, e.own.0, format!("`{}` is not a state of `{}`", e.own.1, b.name))
                })
            })?;
            if e.parents.len() != parent_spaces.len() {
                return Err(Error::parse(
                    e.line,
                    e.own.0,
                    format!(
                        "expected {} parent states, got {}",
                        parent_spaces.len(),
                        e.parents.len()
                    ),
                ));
            }
            let mut col = 0;
            for ((t, ps), pname) in e.parents.iter().zip(&parent_spaces).zip(&b.parents) {
                let s = parse_state(e.line, tok(t), ps.components().len())?;
                let idx = ps
                    .state_index(&s)
                    .ok_or_else(|| Error::parse(e.line, t.0, format!("`{}` is not a state of `{pname}`", t.1)))?;
                col = col * ps.len() + idx;
            }
            let at = col * rows + row;
            if std::mem::replace(&mut seen[at], true) {
                return Err(Error::parse(e.line, e.own.0, "entry given twice"));
            }
            values[at] = value(e.line, tok(&e.value))?;
        }
        decls.push(NodeDecl::dense(&b.name, &parents, space, values));
    }
    Net::build(decls).map_err(|e| match e {
        Error::Parse { .. } => e,
        other => Error::parse(blocks.first().map_or(1, |b| b.line), 1, other.to_string()),
    })
}

/// Generator nodes exist only for quantum nets.
trait FromGenerator: Sized {
    fn from_generator(name: &str, parents: &[&str], space: NodeSpace, g: Generator) -> Self;
}

impl FromGenerator for NodeDecl<Complex> {
    fn from_generator(name: &str, parents: &[&str], space: NodeSpace, g: Generator) -> Self {
        NodeDecl::generated(name, parents, space, g)
    }
}

impl FromGenerator for NodeDecl<f64> {
    fn from_generator(_: &str, _: &[&str], _: NodeSpace, _: Generator) -> Self {
        unreachable!("generators are rejected in classical files")
    }
}

fn fmt_state(s: &[i32]) -> String {
    s.iter().map(i32::to_string).collect::<Vec<_>>().join(",")
}

/// Shortest text that parses back to the same bits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

pub fn fmt_complex(z: Complex) -> String {
    if z.im.to_bits() == 0 {
        fmt_real(z.re)
    } else {
        format!("[{},{}]", fmt_real(z.re), fmt_real(z.im))
    }
}

fn fmt_generator(g: &Generator) -> String {
    match g {
        Generator::Wavefunction(psi) => format!(
            "wavefunction psi01={} psi10={}",
            fmt_complex(psi.psi01),
            fmt_complex(psi.psi10)
        ),
        Generator::Marginalizer { k } => format!("marginalizer k={k}"),
        Generator::PhaseShifter { xi } => format!("phase xi={xi}"),
        Generator::SternGerlach { magnet, inputs } => {
            let modes: Vec<String> = inputs
                .iter()
                .map(|m| {
                    let d = &m.direction;
                    let mut s = format!("{}{}@{}", m.sign.symbol(), d.label, d.theta);
                    if d.phi.value().to_bits() != 0 {
                        write!(s, ":{}", d.phi).unwrap();
                    }
                    s
                })
                .collect();
            format!(
                "stern-gerlach magnet={} theta={} phi={} modes={}",
                magnet.label,
                magnet.theta,
                magnet.phi,
                modes.join(",")
            )
        }
    }
}

fn emit<T: Value>(net: &Net<T>, kind: &str, fmt_value: impl Fn(T) -> String, is_zero: impl Fn(T) -> bool) -> String {
    let mut out = format!("qbnet 1\nkind {kind}\n");
    for i in 0..net.len() {
        let space = net.space(i);
        let parents: Vec<usize> = net.graph().parents(i).to_vec();
        writeln!(out, "\nnode {}", net.node_name(i)).unwrap();
        if !parents.is_empty() {
            let names: Vec<&str> = parents.iter().map(|&p| net.node_name(p)).collect();
            writeln!(out, "parents {}", names.join(" ")).unwrap();
        }
        writeln!(out, "components {}", space.components().join(" ")).unwrap();
        let states: Vec<String> = space.states().iter().map(|s| fmt_state(s)).collect();
        writeln!(out, "states {}", states.join(" ")).unwrap();
        let table = net.table(i);
        if let Some(g) = table.origin() {
            writeln!(out, "gen {}", fmt_generator(g)).unwrap();
            continue;
        }
        for col in 0..table.cols() {
            // mixed radix, last parent fastest
            let mut rem = col;
            let mut pstates = vec![String::new(); parents.len()];
            for (j, &p) in parents.iter().enumerate().rev() {
                let n = net.space(p).len();
                pstates[j] = fmt_state(&net.space(p).states()[rem % n]);
                rem /= n;
            }
            for row in 0..table.rows() {
                let v = table.get(row, col);
                if is_zero(v) {
                    continue;
                }
                let own = fmt_state(&space.states()[row]);
                if parents.is_empty() {
                    writeln!(out, "entry {own} = {}", fmt_value(v)).unwrap();
                } else {
                    writeln!(out, "entry {own} | {} = {}", pstates.join(" "), fmt_value(v)).unwrap();
                }
            }
        }
    }
    out
}

pub fn emit_classical(net: &CbNet) -> String {
    emit(net, "classical", fmt_real, |v| v.to_bits() == 0)
}

pub fn emit_quantum(net: &QbNet) -> String {
    emit(net, "quantum", fmt_complex, |v| {
        v.re.to_bits() == 0 && v.im.to_bits() == 0
    })
}

pub fn emit_net(net: &BuiltNet) -> String {
    match net {
        BuiltNet::Classical(n) => emit_classical(n),
        BuiltNet::Quantum(q) => emit_quantum(q),
    }
}
