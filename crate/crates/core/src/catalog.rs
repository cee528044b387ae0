//! Builders for the worked example nets, plus evidence-case batches and the
//! report runner.
//!
//! Spin nets follow one naming scheme. The root `psi` has components
//! `psi.minus` and `psi.plus`. Marginalizers `z_minus` and `z_plus` expose
//! `z.minus` and `z.plus`. A magnet along `u` is node `sg_u` (components
//! `sg_u.minus`, `sg_u.plus`) followed by marginalizers `u_minus` and
//! `u_plus` exposing `u.minus` and `u.plus`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::classical::{self, classical_distribution, coarsen, scalar_node, Distribution};
use crate::error::{Error, Result};
use crate::fuzzy::DirectProductSet;
use crate::net::{parse_complex, CbNet, Complex, Net, NodeDecl, NodeSpace, QbNet};
use crate::quantum::{parent_cb_net, quantum_distribution};
use crate::spin::{
    consistency_phase, stern_gerlach_space, wavefunction_space, Angle, Generator, InitialWavefunction, Mode, Sign,
    SpinDirection,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Classical,
    Quantum,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BuiltNet {
    Classical(CbNet),
    Quantum(QbNet),
}

impl BuiltNet {
    pub fn kind(&self) -> Kind {
        match self {
            BuiltNet::Classical(_) => Kind::Classical,
            BuiltNet::Quantum(_) => Kind::Quantum,
        }
    }

    pub fn classical(self) -> Option<CbNet> {
        match self {
            BuiltNet::Classical(n) => Some(n),
            BuiltNet::Quantum(_) => None,
        }
    }

    pub fn quantum(self) -> Option<QbNet> {
        match self {
            BuiltNet::Quantum(n) => Some(n),
            BuiltNet::Classical(_) => None,
        }
    }
}

pub struct CatalogEntry {
    pub id: &'static str,
    pub kind: Kind,
    pub summary: &'static str,
    /// `(name, default)` pairs. `xi` defaults to the consistency phase.
    pub params: &'static [(&'static str, &'static str)],
}

const PSI: [(&str, &str); 2] = [("psi01", "[0.5, 0.5]"), ("psi10", "0.7071067811865476")];
const TWO: &[(&str, &str)] = &[PSI[0], PSI[1], ("theta_z", "0"), ("theta_u", "pi/5")];
const THREE: &[(&str, &str)] = &[
    PSI[0],
    PSI[1],
    ("theta_z", "0"),
    ("theta_u", "pi/5"),
    ("theta_v", "2pi/5"),
];
const THREE_XI: &[(&str, &str)] = &[
    PSI[0],
    PSI[1],
    ("theta_z", "0"),
    ("theta_u", "pi/5"),
    ("theta_v", "2pi/5"),
    ("xi", "consistency"),
];
const GATE: &[(&str, &str)] = &[("p_x", "0.5"), ("p_y", "0.5")];
const WALK: &[(&str, &str)] = &[("steps", "3"), ("p_plus", "0.5")];

static ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        id: "fig3c-chain",
        kind: Kind::Classical,
        summary: "three-step Markov chain x -> y -> z",
        params: &[],
    },
    CatalogEntry {
        id: "fig3d-triangle",
        kind: Kind::Classical,
        summary: "fully connected three-node net",
        params: &[],
    },
    CatalogEntry {
        id: "fig9-and",
        kind: Kind::Classical,
        summary: "AND gate z = x and y",
        params: GATE,
    },
    CatalogEntry {
        id: "fig10-sum",
        kind: Kind::Classical,
        summary: "sum node z = x + y",
        params: GATE,
    },
    CatalogEntry {
        id: "fig11-ifthen",
        kind: Kind::Classical,
        summary: "if-then node z = (if x then y)",
        params: &[("p_x", "0.5"), ("p_y", "0.5"), ("p_z_given_not_x", "0.5")],
    },
    CatalogEntry {
        id: "fig12-clauser-horne",
        kind: Kind::Classical,
        summary: "hidden-variable net for fixed measurement angles",
        params: &[("theta1", "0"), ("theta2", "pi/4"), ("lambdas", "4")],
    },
    CatalogEntry {
        id: "fig13-clauser-horne",
        kind: Kind::Classical,
        summary: "hidden-variable net with randomly chosen angles",
        params: &[
            ("a", "0"),
            ("a_prime", "pi/2"),
            ("b", "pi/4"),
            ("b_prime", "3pi/4"),
            ("p_theta1", "0.5"),
            ("p_theta2", "0.5"),
            ("lambdas", "4"),
        ],
    },
    CatalogEntry {
        id: "fig14a-walk",
        kind: Kind::Classical,
        summary: "random walk with explicit step nodes",
        params: WALK,
    },
    CatalogEntry {
        id: "fig14b-walk",
        kind: Kind::Classical,
        summary: "random walk, steps summed out",
        params: WALK,
    },
    CatalogEntry {
        id: "fig14c-walk",
        kind: Kind::Classical,
        summary: "random walk start and end only",
        params: WALK,
    },
    CatalogEntry {
        id: "fig18-tree",
        kind: Kind::Quantum,
        summary: "two magnets, z+ beam enters u",
        params: TWO,
    },
    CatalogEntry {
        id: "fig19-loop",
        kind: Kind::Quantum,
        summary: "two magnets, both z beams enter u",
        params: TWO,
    },
    CatalogEntry {
        id: "fig23",
        kind: Kind::Quantum,
        summary: "z+ -> v, v+ -> u",
        params: THREE,
    },
    CatalogEntry {
        id: "fig24",
        kind: Kind::Quantum,
        summary: "z+- -> v, v+ -> u",
        params: THREE,
    },
    CatalogEntry {
        id: "fig25",
        kind: Kind::Quantum,
        summary: "z+ -> v, v+- -> u",
        params: THREE,
    },
    CatalogEntry {
        id: "fig26",
        kind: Kind::Quantum,
        summary: "z+- -> v, v+- -> u",
        params: THREE,
    },
    CatalogEntry {
        id: "fig27",
        kind: Kind::Quantum,
        summary: "z- -> v, z+ -> u",
        params: THREE,
    },
    CatalogEntry {
        id: "fig28",
        kind: Kind::Quantum,
        summary: "z- -> v, phase-shifted v+ and z+ -> u",
        params: THREE_XI,
    },
    CatalogEntry {
        id: "fig29",
        kind: Kind::Quantum,
        summary: "phase-shifted z- -> v, v+- and z+ -> u",
        params: THREE_XI,
    },
];

pub fn entries() -> &'static [CatalogEntry] {
    ENTRIES
}

pub fn entry(id: &str) -> Result<&'static CatalogEntry> {
    ENTRIES
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownEntry(id.to_string()))
}

/// Named parameter overrides, given as text.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params(BTreeMap<String, String>);

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, key: &str, value: &str) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    /// Parses `key=value` items.
    pub fn parse<'a>(items: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut p = Params::new();
        for item in items {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParams(format!("expected key=value, got `{item}`")))?;
            p.0.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(p)
    }
}

struct Resolved {
    values: BTreeMap<&'static str, String>,
}

impl Resolved {
    fn new(entry: &CatalogEntry, p: &Params) -> Result<Self> {
        for k in p.0.keys() {
            if !entry.params.iter().any(|(n, _)| n == k) {
                return Err(Error::InvalidParams(format!("`{}` takes no parameter `{k}`", entry.id)));
            }
        }
        let values = entry
            .params
            .iter()
            .map(|(n, d)| (*n, p.0.get(*n).cloned().unwrap_or_else(|| d.to_string())))
            .collect();
        Ok(Resolved { values })
    }

    fn raw(&self, k: &str) -> &str {
        &self.values[k]
    }

    fn f64(&self, k: &str) -> Result<f64> {
        self.raw(k)
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| Error::InvalidParams(format!("`{k}` is not a number: `{}`", self.raw(k))))
    }

    fn prob(&self, k: &str) -> Result<f64> {
        let v = self.f64(k)?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParams(format!("`{k}` = {v} is not a probability")));
        }
        Ok(v)
    }

    fn count(&self, k: &str, min: usize, max: usize) -> Result<usize> {
        let v: usize = self
            .raw(k)
            .parse()
            .map_err(|_| Error::InvalidParams(format!("`{k}` is not a count: `{}`", self.raw(k))))?;
        if v < min || v > max {
            return Err(Error::InvalidParams(format!("`{k}` = {v} outside {min}..={max}")));
        }
        Ok(v)
    }

    fn angle(&self, k: &str) -> Result<Angle> {
        Angle::parse(self.raw(k)).map_err(|_| Error::InvalidParams(format!("`{k}` is not an angle: `{}`", self.raw(k))))
    }

    fn psi(&self) -> Result<InitialWavefunction> {
        let c = |k: &str| {
            parse_complex(self.raw(k))
                .ok_or_else(|| Error::InvalidParams(format!("`{k}` is not a complex number: `{}`", self.raw(k))))
        };
        InitialWavefunction::new(c("psi01")?, c("psi10")?)
    }

    fn xi(&self, psi: &InitialWavefunction) -> Result<Angle> {
        match self.raw("xi") {
            "consistency" => Ok(nice_angle(consistency_phase(psi)?.arg())),
            _ => self.angle("xi"),
        }
    }
}

/// Angle that prints as a small rational multiple of pi when it is one.
pub fn nice_angle(radians: f64) -> Angle {
    for den in 1..=12i64 {
        let num = radians * den as f64 / PI;
        let r = num.round();
        if (num - r).abs() < 1e-12 {
            return Angle::pi_frac(r as i64, den);
        }
    }
    Angle::radians(radians)
}

/// Builds catalog entry `id` with `params` overriding its defaults.
pub fn build(id: &str, params: &Params) -> Result<BuiltNet> {
    let e = entry(id)?;
    let r = Resolved::new(e, params)?;
    match id {
        "fig3c-chain" => fig3c_chain().map(BuiltNet::Classical),
        "fig3d-triangle" => fig3d_triangle().map(BuiltNet::Classical),
        "fig9-and" => gate(&r, |x, y| (x & y) as i32, [0, 1]),
        "fig10-sum" => gate(&r, |x, y| (x + y) as i32, [0, 1, 2]),
        "fig11-ifthen" => if_then(&r),
        "fig12-clauser-horne" => clauser_horne(
            r.angle("theta1")?.value(),
            r.angle("theta2")?.value(),
            r.count("lambdas", 1, 4096)?,
        )
        .map(BuiltNet::Classical),
        "fig13-clauser-horne" => clauser_horne_random(&r),
        "fig14a-walk" => walk_with_steps(r.count("steps", 0, 64)?, r.prob("p_plus")?).map(BuiltNet::Classical),
        "fig14b-walk" => walk(r.count("steps", 0, 64)?, r.prob("p_plus")?).map(BuiltNet::Classical),
        "fig14c-walk" => {
            let k = r.count("steps", 0, 64)?;
            let w = walk(k, r.prob("p_plus")?)?;
            let end = format!("x{k}");
            let keep: Vec<&str> = if k == 0 { vec!["x0"] } else { vec!["x0", &end] };
            coarsen(&w, &keep).map(BuiltNet::Classical)
        }
        _ => spin_net(id, &r).map(BuiltNet::Quantum),
    }
}

fn fig3c_chain() -> Result<CbNet> {
    Net::build(vec![
        scalar_node("x", &[], [0, 1], |x, _| [0.4, 0.6][x[0] as usize])?,
        scalar_node("y", &["x"], [0, 1], |y, x| {
            [[0.7, 0.3], [0.2, 0.8]][x[0] as usize][y[0] as usize]
        })?,
        scalar_node("z", &["y"], [0, 1], |z, y| {
            [[0.9, 0.1], [0.35, 0.65]][y[0] as usize][z[0] as usize]
        })?,
    ])
}

fn fig3d_triangle() -> Result<CbNet> {
    Net::build(vec![
        scalar_node("x", &[], [0, 1], |x, _| [0.25, 0.75][x[0] as usize])?,
        scalar_node("y", &["x"], [0, 1, 2], |y, x| {
            [[0.5, 0.3, 0.2], [0.1, 0.6, 0.3]][x[0] as usize][y[0] as usize]
        })?,
        scalar_node("z", &["x", "y"], [0, 1], |z, xy| {
            let p1 = [[0.1, 0.5, 0.9], [0.3, 0.7, 0.2]][xy[0] as usize][xy[1] as usize];
            if z[0] == 1 {
                p1
            } else {
                1.0 - p1
            }
        })?,
    ])
}

fn prior(p1: f64) -> impl Fn(&[i32], &[i32]) -> f64 {
    move |s, _| if s[0] == 1 { p1 } else { 1.0 - p1 }
}

fn gate<const N: usize>(r: &Resolved, f: fn(u8, u8) -> i32, zs: [i32; N]) -> Result<BuiltNet> {
    Net::build(vec![
        scalar_node("x", &[], [0, 1], prior(r.prob("p_x")?))?,
        scalar_node("y", &[], [0, 1], prior(r.prob("p_y")?))?,
        scalar_node("z", &["x", "y"], zs, move |z, xy| {
            (z[0] == f(xy[0] as u8, xy[1] as u8)) as i32 as f64
        })?,
    ])
    .map(BuiltNet::Classical)
}

fn if_then(r: &Resolved) -> Result<BuiltNet> {
    let q = r.prob("p_z_given_not_x")?;
    Net::build(vec![
        scalar_node("x", &[], [0, 1], prior(r.prob("p_x")?))?,
        scalar_node("y", &[], [0, 1], prior(r.prob("p_y")?))?,
        scalar_node("z", &["x", "y"], [0, 1], move |z, xy| {
            let p1 = if xy[0] == 1 { xy[1] as f64 } else { q };
            if z[0] == 1 {
                p1
            } else {
                1.0 - p1
            }
        })?,
    ])
    .map(BuiltNet::Classical)
}

/// `P(x1 = + | lambda) = cos^2((theta1 - lambda)/2)` and
/// `P(x2 = + | lambda) = sin^2((theta2 - lambda)/2)` over `lambdas` evenly
/// spaced hidden angles. Outcomes are `+1` and `-1`.
pub fn clauser_horne(theta1: f64, theta2: f64, lambdas: usize) -> Result<CbNet> {
    let lam = move |k: i32| 2.0 * PI * k as f64 / lambdas as f64;
    let pm = |plus: f64, x: i32| if x == 1 { plus } else { 1.0 - plus };
    Net::build(vec![
        scalar_node("lambda", &[], 0..lambdas as i32, move |_, _| 1.0 / lambdas as f64)?,
        scalar_node("x1", &["lambda"], [-1, 1], move |x, l| {
            pm(((theta1 - lam(l[0])) / 2.0).cos().powi(2), x[0])
        })?,
        scalar_node("x2", &["lambda"], [-1, 1], move |x, l| {
            pm(((theta2 - lam(l[0])) / 2.0).sin().powi(2), x[0])
        })?,
    ])
}

fn clauser_horne_random(r: &Resolved) -> Result<BuiltNet> {
    let lambdas = r.count("lambdas", 1, 4096)?;
    let a = [r.angle("a")?.value(), r.angle("a_prime")?.value()];
    let b = [r.angle("b")?.value(), r.angle("b_prime")?.value()];
    let lam = move |k: i32| 2.0 * PI * k as f64 / lambdas as f64;
    let pm = |plus: f64, x: i32| if x == 1 { plus } else { 1.0 - plus };
    Net::build(vec![
        scalar_node("theta1", &[], [0, 1], prior(r.prob("p_theta1")?))?,
        scalar_node("theta2", &[], [0, 1], prior(r.prob("p_theta2")?))?,
        scalar_node("lambda", &[], 0..lambdas as i32, move |_, _| 1.0 / lambdas as f64)?,
        scalar_node("x1", &["theta1", "lambda"], [-1, 1], move |x, tl| {
            pm(((a[tl[0] as usize] - lam(tl[1])) / 2.0).cos().powi(2), x[0])
        })?,
        scalar_node("x2", &["theta2", "lambda"], [-1, 1], move |x, tl| {
            pm(((b[tl[0] as usize] - lam(tl[1])) / 2.0).sin().powi(2), x[0])
        })?,
    ])
    .map(BuiltNet::Classical)
}

/// Walk with position nodes `x0..xk` and step nodes `dx1..dxk`.
pub fn walk_with_steps(k: usize, p_plus: f64) -> Result<CbNet> {
    let mut decls = vec![scalar_node("x0", &[], [0], |_, _| 1.0)?];
    for j in 1..=k as i32 {
        let (dx, x, prev) = (format!("dx{j}"), format!("x{j}"), format!("x{}", j - 1));
        decls.push(scalar_node(&dx, &[], [-1, 1], move |d, _| {
            if d[0] == 1 {
                p_plus
            } else {
                1.0 - p_plus
            }
        })?);
        decls.push(scalar_node(&x, &[&prev, &dx], -j..=j, |y, pd| {
            (y[0] == pd[0] + pd[1]) as i32 as f64
        })?);
    }
    Net::build(decls)
}

/// Walk with position nodes only.
pub fn walk(k: usize, p_plus: f64) -> Result<CbNet> {
    let mut decls = vec![scalar_node("x0", &[], [0], |_, _| 1.0)?];
    for j in 1..=k as i32 {
        let (x, prev) = (format!("x{j}"), format!("x{}", j - 1));
        decls.push(scalar_node(&x, &[&prev], -j..=j, move |y, p| {
            if y[0] == p[0] + 1 {
                p_plus
            } else if y[0] == p[0] - 1 {
                1.0 - p_plus
            } else {
                0.0
            }
        })?);
    }
    Net::build(decls)
}

/// The three-node cycle with copy tables. A cyclic pre-net, kept out of the
/// catalog listing because it is not a valid net.
pub fn fig4_cycle() -> Result<CbNet> {
    let delta = |a: &[i32], b: &[i32]| (a == b) as i32 as f64;
    Net::build(vec![
        scalar_node("x", &["z"], [0, 1], delta)?,
        scalar_node("y", &["x"], [0, 1], delta)?,
        scalar_node("z", &["y"], [0, 1], delta)?,
    ])
}

/// Incremental builder for spin nets.
pub struct SpinNet {
    decls: Vec<NodeDecl<Complex>>,
    dirs: BTreeMap<String, SpinDirection>,
}

impl SpinNet {
    /// Root wavefunction plus the `z_minus` / `z_plus` marginalizers.
    pub fn new(psi: InitialWavefunction, theta_z: Angle) -> Result<Self> {
        let mut s = SpinNet {
            decls: Vec::new(),
            dirs: BTreeMap::new(),
        };
        s.dirs.insert("z".into(), SpinDirection::coplanar("z", theta_z));
        s.decls.push(NodeDecl::generated(
            "psi",
            &[],
            wavefunction_space("psi.minus", "psi.plus")?,
            Generator::Wavefunction(psi),
        ));
        s.marginalizers("psi", "z")?;
        Ok(s)
    }

    fn marginalizers(&mut self, source: &str, label: &str) -> Result<()> {
        for (k, sign) in [(1, "minus"), (2, "plus")] {
            self.decls.push(NodeDecl::generated(
                &format!("{label}_{sign}"),
                &[source],
                NodeSpace::binary(&format!("{label}.{sign}"))?,
                Generator::Marginalizer { k },
            ));
        }
        Ok(())
    }

    /// Magnet `label` at `theta` fed by `inputs`, given as
    /// `(node, sign, direction label)` of each incoming beam.
    pub fn magnet(&mut self, label: &str, theta: Angle, inputs: &[(&str, Sign, &str)]) -> Result<&mut Self> {
        let dir = SpinDirection::coplanar(label, theta);
        let modes = inputs
            .iter()
            .map(|(_, s, d)| {
                let d = self
                    .dirs
                    .get(*d)
                    .ok_or_else(|| Error::InvalidNet(format!("no magnet `{d}` declared yet")))?;
                Ok(Mode::new(*s, d.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let node = format!("sg_{label}");
        let parents: Vec<&str> = inputs.iter().map(|(n, _, _)| *n).collect();
        self.decls.push(NodeDecl::generated(
            &node,
            &parents,
            stern_gerlach_space(&format!("{node}.minus"), &format!("{node}.plus"))?,
            Generator::SternGerlach {
                magnet: dir.clone(),
                inputs: modes,
            },
        ));
        self.dirs.insert(label.to_string(), dir);
        self.marginalizers(&node, label)?;
        Ok(self)
    }

    /// Phase shifter node `name` on the beam leaving `source`; its component
    /// is named `<source component>.shifted`.
    pub fn phase(&mut self, name: &str, source: &str, xi: Angle) -> Result<&mut Self> {
        let comp = format!("{}.shifted", source.replace('_', "."));
        self.decls.push(NodeDecl::generated(
            name,
            &[source],
            NodeSpace::binary(&comp)?,
            Generator::PhaseShifter { xi },
        ));
        Ok(self)
    }

    pub fn finish(self) -> Result<QbNet> {
        Net::build(self.decls)
    }
}

fn spin_net(id: &str, r: &Resolved) -> Result<QbNet> {
    use Sign::{Minus as M, Plus as P};
    let psi = r.psi()?;
    let mut s = SpinNet::new(psi, r.angle("theta_z")?)?;
    let u = r.angle("theta_u")?;
    match id {
        "fig18-tree" => {
            s.magnet("u", u, &[("z_plus", P, "z")])?;
        }
        "fig19-loop" => {
            s.magnet("u", u, &[("z_minus", M, "z"), ("z_plus", P, "z")])?;
        }
        _ => {
            let v = r.angle("theta_v")?;
            match id {
                "fig23" => {
                    s.magnet("v", v, &[("z_plus", P, "z")])?;
                    s.magnet("u", u, &[("v_plus", P, "v")])?;
                }
                "fig24" => {
                    s.magnet("v", v, &[("z_minus", M, "z"), ("z_plus", P, "z")])?;
                    s.magnet("u", u, &[("v_plus", P, "v")])?;
                }
                "fig25" => {
                    s.magnet("v", v, &[("z_plus", P, "z")])?;
                    s.magnet("u", u, &[("v_minus", M, "v"), ("v_plus", P, "v")])?;
                }
                "fig26" => {
                    s.magnet("v", v, &[("z_minus", M, "z"), ("z_plus", P, "z")])?;
                    s.magnet("u", u, &[("v_minus", M, "v"), ("v_plus", P, "v")])?;
                }
                "fig27" => {
                    s.magnet("v", v, &[("z_minus", M, "z")])?;
                    s.magnet("u", u, &[("z_plus", P, "z")])?;
                }
                "fig28" => {
                    let xi = r.xi(&psi)?;
                    s.magnet("v", v, &[("z_minus", M, "z")])?;
                    s.phase("v_plus_phase", "v_plus", xi)?;
                    s.magnet("u", u, &[("v_plus_phase", P, "v"), ("z_plus", P, "z")])?;
                }
                "fig29" => {
                    let xi = r.xi(&psi)?;
                    s.phase("z_minus_phase", "z_minus", xi)?;
                    s.magnet("v", v, &[("z_minus_phase", M, "z")])?;
                    s.magnet("u", u, &[("v_minus", M, "v"), ("v_plus", P, "v"), ("z_plus", P, "z")])?;
                }
                _ => return Err(Error::UnknownEntry(id.to_string())),
            }
        }
    }
    s.finish()
}

/// One row of an evidence-case file.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceCase {
    pub number: u32,
    pub evidence: DirectProductSet,
}

/// Case 1 has no evidence. Then each column alone at 0, each column alone at
/// 1, and finally every column pair at 00, 01, 10 and 11.
pub fn standard_cases(columns: &[&str]) -> Vec<EvidenceCase> {
    let mut sets = vec![DirectProductSet::full()];
    for v in [0, 1] {
        for c in columns {
            sets.push(DirectProductSet::full().with(c, [v]).expect("non-empty"));
        }
    }
    for i in 0..columns.len() {
        for j in i + 1..columns.len() {
            for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let e = DirectProductSet::full()
                    .with(columns[i], [a])
                    .and_then(|e| e.with(columns[j], [b]))
                    .expect("non-empty");
                sets.push(e);
            }
        }
    }
    sets.into_iter()
        .enumerate()
        .map(|(i, evidence)| EvidenceCase {
            number: i as u32 + 1,
            evidence,
        })
        .collect()
}

pub const TWO_MAGNET_COLUMNS: [&str; 4] = ["z.plus", "z.minus", "u.plus", "u.minus"];
pub const THREE_MAGNET_COLUMNS: [&str; 6] = ["z.plus", "z.minus", "v.plus", "v.minus", "u.plus", "u.minus"];

/// The 33 cases used with the two-magnet nets.
pub fn two_magnet_cases() -> Vec<EvidenceCase> {
    standard_cases(&TWO_MAGNET_COLUMNS)
}

/// The 73 cases used with the three-magnet nets.
pub fn three_magnet_cases() -> Vec<EvidenceCase> {
    standard_cases(&THREE_MAGNET_COLUMNS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisSets {
    Singles,
    Pairs,
    Both,
}

/// Outcome of one column group (classical parent or quantum) for one row.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupResult {
    Values(Distribution),
    Contradiction,
    Failed(String),
}

impl GroupResult {
    fn from(r: Result<Distribution>) -> Self {
        match r {
            Ok(d) => GroupResult::Values(d),
            Err(Error::ContradictoryEvidence) => GroupResult::Contradiction,
            Err(e) => GroupResult::Failed(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub hypothesis: Vec<String>,
    pub classical: GroupResult,
    /// Absent for classical input nets.
    pub quantum: Option<GroupResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseBlock {
    pub number: u32,
    pub evidence: DirectProductSet,
    /// True when every group of every row hit zero evidence weight.
    pub contradiction: bool,
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub quantum: bool,
    pub blocks: Vec<CaseBlock>,
}

fn hypothesis_sets(columns: &[&str], which: HypothesisSets) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    if which != HypothesisSets::Pairs {
        out.extend(columns.iter().map(|c| vec![c.to_string()]));
    }
    if which != HypothesisSets::Singles {
        for i in 0..columns.len() {
            for j in i + 1..columns.len() {
                out.push(vec![columns[i].to_string(), columns[j].to_string()]);
            }
        }
    }
    out
}

/// Runs every case against every hypothesis set drawn from `columns`.
/// Hypotheses touching an evidence component are skipped.
pub fn run_evidence_cases(net: &BuiltNet, cases: &[EvidenceCase], columns: &[&str], which: HypothesisSets) -> Report {
    let (cb, qb) = match net {
        BuiltNet::Classical(n) => (n.clone(), None),
        BuiltNet::Quantum(q) => (parent_cb_net(q), Some(q)),
    };
    let hyps = hypothesis_sets(columns, which);
    let blocks = cases
        .iter()
        .map(|case| {
            let rows: Vec<ReportRow> = hyps
                .iter()
                .filter(|h| h.iter().all(|c| case.evidence.get(c).is_none()))
                .map(|h| {
                    let hs: Vec<&str> = h.iter().map(String::as_str).collect();
                    ReportRow {
                        hypothesis: h.clone(),
                        classical: GroupResult::from(classical_distribution(&cb, &hs, &case.evidence)),
                        quantum: qb.map(|q| GroupResult::from(quantum_distribution(q, &hs, &case.evidence))),
                    }
                })
                .collect();
            let contradiction = !rows.is_empty()
                && rows.iter().all(|r| {
                    r.classical == GroupResult::Contradiction
                        && r.quantum.as_ref().is_none_or(|q| *q == GroupResult::Contradiction)
                });
            CaseBlock {
                number: case.number,
                evidence: case.evidence.clone(),
                contradiction,
                rows,
            }
        })
        .collect();
    Report {
        quantum: qb.is_some(),
        blocks,
    }
}

/// Convenience: every catalog entry built with defaults.
pub fn build_all() -> Result<Vec<(&'static str, BuiltNet)>> {
    ENTRIES
        .iter()
        .map(|e| Ok((e.id, build(e.id, &Params::new())?)))
        .collect()
}

/// Validation messages for a built net.
pub fn validate_built(net: &BuiltNet) -> Vec<classical::Violation> {
    match net {
        BuiltNet::Classical(n) => classical::validate(n),
        BuiltNet::Quantum(q) => crate::quantum::validate_quantum(q),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{joint_probability, total_mass};
    use crate::net::assignment;

    #[test]
    fn census() {
        assert!(entries().len() >= 14);
        let mut ids: Vec<&str> = entries().iter().map(|e| e.id).collect();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), entries().len());
        assert_eq!(build("nope", &Params::new()), Err(Error::UnknownEntry("nope".into())));
    }

    #[test]
    fn every_default_entry_validates() {
        for (id, net) in build_all().unwrap() {
            assert_eq!(validate_built(&net), vec![], "{id}");
            assert_eq!(net.kind(), entry(id).unwrap().kind);
        }
    }

    #[test]
    fn and_gate() {
        let n = build("fig9-and", &Params::new()).unwrap().classical().unwrap();
        let p = joint_probability(&n, &assignment(&[("x", 1), ("y", 1), ("z", 1)])).unwrap();
        assert_eq!(p, 0.25);
        let z = n.node_index("z").unwrap();
        assert_eq!(n.table(z).column(3), &[0.0, 1.0]);
    }

    #[test]
    fn walk_step() {
        let n = walk_with_steps(2, 0.3).unwrap();
        let mut a = assignment(&[("x0", 0), ("dx1", 1), ("x1", 1), ("dx2", -1), ("x2", 0)]);
        assert!((joint_probability(&n, &a).unwrap() - 0.3 * 0.7).abs() < 1e-15);
        a.insert("x2".into(), 2);
        assert_eq!(joint_probability(&n, &a).unwrap(), 0.0);
        assert!((total_mass(&n).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_params() {
        let p = Params::new().set("psi01", "1");
        assert!(matches!(build("fig19-loop", &p), Err(Error::InvalidParams(_))));
        let p = Params::new().set("bogus", "1");
        assert!(matches!(build("fig19-loop", &p), Err(Error::InvalidParams(_))));
        let p = Params::new().set("p_x", "1.5");
        assert!(matches!(build("fig9-and", &p), Err(Error::InvalidParams(_))));
        let p = Params::new().set("psi01", "0").set("psi10", "1");
        assert_eq!(build("fig28", &p), Err(Error::DegeneratePhase));
        assert!(Params::parse(["novalue"]).is_err());
    }

    #[test]
    fn case_numbering() {
        let c = two_magnet_cases();
        assert_eq!(c.len(), 33);
        let sharp = |i: usize| c[i - 1].evidence.as_sharp().unwrap();
        assert_eq!(sharp(1), assignment(&[]));
        assert_eq!(sharp(2), assignment(&[("z.plus", 0)]));
        assert_eq!(sharp(4), assignment(&[("u.plus", 0)]));
        assert_eq!(sharp(10), assignment(&[("z.plus", 0), ("z.minus", 0)]));
        assert_eq!(sharp(11), assignment(&[("z.plus", 0), ("z.minus", 1)]));
        assert_eq!(sharp(12), assignment(&[("z.plus", 1), ("z.minus", 0)]));
        assert_eq!(three_magnet_cases().len(), 73);
        assert_eq!(
            three_magnet_cases()[1].evidence.as_sharp().unwrap(),
            assignment(&[("z.plus", 0)])
        );
    }

    #[test]
    fn nice_angles() {
        assert_eq!(nice_angle(3.0 * PI / 4.0).to_string(), "3pi/4");
        assert_eq!(nice_angle(0.0).to_string(), "0");
        assert_eq!(nice_angle(1.0).to_string(), "1.0");
    }
}
