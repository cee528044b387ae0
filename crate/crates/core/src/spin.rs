//! Spin-1/2 states and the node factories used by Stern-Gerlach nets.
//!
//! States are written in the z basis with the `+z` component first:
//! `|+u> = (C E*, S E)` and `|-u> = (-S E*, C E)` where `C = cos(theta/2)`,
//! `S = sin(theta/2)` and `E = exp(i phi / 2)`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::net::{Complex, NodeSpace};

/// An angle in radians that remembers the text it was written as, so that
/// `pi/5` survives a save and load unchanged.
#[derive(Debug, Clone)]
pub struct Angle {
    value: f64,
    text: Option<String>,
}

impl PartialEq for Angle {
    fn eq(&self, other: &Self) -> bool {
        self.value.to_bits() == other.value.to_bits()
    }
}

impl Angle {
    pub fn radians(value: f64) -> Self {
        Angle { value, text: None }
    }

    pub fn zero() -> Self {
        Angle {
            value: 0.0,
            text: Some("0".into()),
        }
    }

    /// `num * pi / den`, printed symbolically.
    pub fn pi_frac(num: i64, den: i64) -> Self {
        assert!(den > 0, "denominator must be positive");
        let text = match (num, den) {
            (0, _) => "0".to_string(),
            (1, 1) => "pi".to_string(),
            (-1, 1) => "-pi".to_string(),
            (n, 1) => format!("{n}pi"),
            (1, d) => format!("pi/{d}"),
            (-1, d) => format!("-pi/{d}"),
            (n, d) => format!("{n}pi/{d}"),
        };
        Angle {
            value: num as f64 * PI / den as f64,
            text: Some(text),
        }
    }

    /// Parses decimal radians or rational multiples of pi such as `pi/5`,
    /// `3pi/4`, `-pi/2` or `2*pi/5`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let bad = || Error::InvalidParams(format!("cannot read angle `{s}`"));
        if t.is_empty() {
            return Err(bad());
        }
        if let Some(p) = t.find("pi") {
            let (head, tail) = (&t[..p], &t[p + 2..]);
            let head = head.strip_suffix('*').unwrap_or(head).trim();
            let num: f64 = match head {
                "" | "+" => 1.0,
                "-" => -1.0,
                h => h.parse().map_err(|_| bad())?,
            };
            let tail = tail.trim();
            let den: f64 = if tail.is_empty() {
                1.0
            } else {
                let d = tail.strip_prefix('/').ok_or_else(bad)?.trim();
                d.parse().map_err(|_| bad())?
            };
            if den == 0.0 || !num.is_finite() || !den.is_finite() {
                return Err(bad());
            }
            return Ok(Angle {
                value: num * PI / den,
                text: Some(t.to_string()),
            });
        }
        let value: f64 = t.parse().map_err(|_| bad())?;
        if !value.is_finite() {
            return Err(bad());
        }
        Ok(Angle {
            value,
            text: Some(t.to_string()),
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.text {
            Some(t) => f.write_str(t),
            None => write!(f, "{:?}", self.value),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Magnetic field direction of a magnet (or of the basis a mode refers to).
#[derive(Debug, Clone, PartialEq)]
pub struct SpinDirection {
    pub theta: Angle,
    pub phi: Angle,
    pub label: String,
}

impl SpinDirection {
    pub fn new(label: &str, theta: Angle, phi: Angle) -> Self {
        SpinDirection {
            theta,
            phi,
            label: label.to_string(),
        }
    }

    /// Direction in the x-z plane.
    pub fn coplanar(label: &str, theta: Angle) -> Self {
        Self::new(label, theta, Angle::zero())
    }

    /// z-basis components of `|sign_u>`.
    pub fn state(&self, sign: Sign) -> SpinState {
        let (s, c) = (self.theta.value / 2.0).sin_cos();
        let e = Complex::from_polar(1.0, self.phi.value / 2.0);
        match sign {
            Sign::Plus => SpinState([e.conj() * c, e * s]),
            Sign::Minus => SpinState([-e.conj() * s, e * c]),
        }
    }
}

/// Two z-basis amplitudes, `+z` first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState(pub [Complex; 2]);

impl SpinState {
    pub fn inner(&self, other: &SpinState) -> Complex {
        self.0[0].conj() * other.0[0] + self.0[1].conj() * other.0[1]
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }
}

/// `<s2_{u2} | s1_{u1}>`. Coplanar directions use the half-angle closed form.
pub fn overlap(u2: &SpinDirection, s2: Sign, u1: &SpinDirection, s1: Sign) -> Complex {
    if u2.phi.value == 0.0 && u1.phi.value == 0.0 {
        let half = (u2.theta.value - u1.theta.value) / 2.0;
        let v = match (s2, s1) {
            (Sign::Plus, Sign::Plus) | (Sign::Minus, Sign::Minus) => half.cos(),
            (Sign::Plus, Sign::Minus) => half.sin(),
            (Sign::Minus, Sign::Plus) => -half.sin(),
        };
        return Complex::new(v, 0.0);
    }
    u2.state(s2).inner(&u1.state(s1))
}

/// Initial single-particle wavefunction `psi_{n_minus n_plus}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialWavefunction {
    pub psi01: Complex,
    pub psi10: Complex,
}

impl InitialWavefunction {
    pub fn new(psi01: Complex, psi10: Complex) -> Result<Self> {
        let norm = psi01.norm_sqr() + psi10.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "|psi01|^2 + |psi10|^2 = {norm}, expected 1"
            )));
        }
        Ok(InitialWavefunction { psi01, psi10 })
    }

    /// psi01 = (1 + i)/2, psi10 = 1/sqrt 2.
    pub fn standard() -> Self {
        InitialWavefunction {
            psi01: Complex::new(0.5, 0.5),
            psi10: Complex::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
        }
    }
}

/// The unit phase `i psi01 conj(psi10) / |psi01 conj(psi10)|` that makes a
/// phase-shifted three-magnet loop conserve probability.
pub fn consistency_phase(psi: &InitialWavefunction) -> Result<Complex> {
    let p = psi.psi01 * psi.psi10.conj();
    let m = p.norm();
    if m == 0.0 || !m.is_finite() {
        return Err(Error::DegeneratePhase);
    }
    Ok(Complex::i() * p / m)
}

/// `|<singlet_u | singlet_u2>|`, both singlets expanded in the z basis.
pub fn singlet_overlap_check(u: &SpinDirection, u2: &SpinDirection) -> f64 {
    let singlet = |d: &SpinDirection| {
        let (p, m) = (d.state(Sign::Plus).0, d.state(Sign::Minus).0);
        let mut v = [Complex::new(0.0, 0.0); 4];
        for a in 0..2 {
            for b in 0..2 {
                v[2 * a + b] = (p[a] * m[b] - m[a] * p[b]) / 2f64.sqrt();
            }
        }
        v
    };
    let (a, b) = (singlet(u), singlet(u2));
    a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum::<Complex>().norm()
}

/// One input mode of a Stern-Gerlach magnet: the particle arrives in state
/// `|sign_direction>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mode {
    pub sign: Sign,
    pub direction: SpinDirection,
}

impl Mode {
    pub fn new(sign: Sign, direction: SpinDirection) -> Self {
        Mode { sign, direction }
    }
}

/// Table factories. Each carries the parameters needed to regenerate it.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    /// Root node over `(n_minus, n_plus)` in `{(0,1), (1,0)}`.
    Wavefunction(InitialWavefunction),
    /// Projects out input component `k` (1-based).
    Marginalizer {
        k: usize,
    },
    /// `exp(i xi n) delta(n', n)`.
    PhaseShifter {
        xi: Angle,
    },
    SternGerlach {
        magnet: SpinDirection,
        inputs: Vec<Mode>,
    },
}

impl Generator {
    /// Entry for own state `own` given the concatenated parent components.
    pub fn amplitude(&self, own: &[i32], input: &[i32]) -> Complex {
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        match self {
            Generator::Wavefunction(psi) => match own {
                [0, 1] => psi.psi01,
                [1, 0] => psi.psi10,
                _ => zero,
            },
            Generator::Marginalizer { k } => {
                if input.get(k - 1) == Some(&own[0]) {
                    one
                } else {
                    zero
                }
            }
            Generator::PhaseShifter { xi } => {
                if own[0] == input[0] {
                    Complex::from_polar(1.0, xi.value * own[0] as f64)
                } else {
                    zero
                }
            }
            Generator::SternGerlach { magnet, inputs } => {
                let occupied: Vec<usize> = (0..input.len()).filter(|&i| input[i] != 0).collect();
                match occupied.as_slice() {
                    [k] if input[*k] == 1 => {
                        let m = &inputs[*k];
                        match own {
                            [1, 0] => overlap(magnet, Sign::Minus, &m.direction, m.sign),
                            [0, 1] => overlap(magnet, Sign::Plus, &m.direction, m.sign),
                            _ => zero,
                        }
                    }
                    // Vacuum passes through. Multi-particle inputs never carry
                    // weight in single-particle nets; they also map to vacuum
                    // so every column stays normalized.
                    _ => {
                        if own == [0, 0] {
                            one
                        } else {
                            zero
                        }
                    }
                }
            }
        }
    }

    /// Checks the generator against the node's own space and the number of
    /// concatenated parent components.
    pub fn check(&self, own: &NodeSpace, input_arity: usize) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidNet(m));
        let k_own = own.components().len();
        match self {
            Generator::Wavefunction(_) => {
                if input_arity != 0 || k_own != 2 {
                    return fail("wavefunction nodes are roots with two components".into());
                }
            }
            Generator::Marginalizer { k } => {
                if k_own != 1 || *k == 0 || *k > input_arity {
                    return fail(format!(
                        "marginalizer index {k} outside 1..={input_arity} or node not scalar"
                    ));
                }
            }
            Generator::PhaseShifter { .. } => {
                if k_own != 1 || input_arity != 1 {
                    return fail("phase shifters map one component to one component".into());
                }
            }
            Generator::SternGerlach { inputs, .. } => {
                if k_own != 2 || inputs.len() != input_arity || inputs.is_empty() {
                    return fail(format!(
                        "stern-gerlach node declares {} modes but receives {input_arity} components",
                        inputs.len()
                    ));
                }
            }
        }
        Ok(())
    }
}

/// State space of a wavefunction root: `(n_minus, n_plus)` in `{(0,1), (1,0)}`.
pub fn wavefunction_space(minus: &str, plus: &str) -> Result<NodeSpace> {
    NodeSpace::new(vec![minus.to_string(), plus.to_string()], vec![vec![0, 1], vec![1, 0]])
}

/// Output space of a magnet: vacuum or one particle in either beam.
pub fn stern_gerlach_space(minus: &str, plus: &str) -> Result<NodeSpace> {
    NodeSpace::new(
        vec![minus.to_string(), plus.to_string()],
        vec![vec![0, 0], vec![0, 1], vec![1, 0]],
    )
}

/// Dense table for a magnet fed by `inputs`, one column per binary input
/// vector (first mode slowest), rows ordered as [`stern_gerlach_space`].
pub fn stern_gerlach_table(magnet: &SpinDirection, inputs: &[Mode]) -> Vec<Vec<Complex>> {
    let g = Generator::SternGerlach {
        magnet: magnet.clone(),
        inputs: inputs.to_vec(),
    };
    binary_columns(inputs.len())
        .iter()
        .map(|input| {
            [[0, 0], [0, 1], [1, 0]]
                .iter()
                .map(|own| g.amplitude(own, input))
                .collect()
        })
        .collect()
}

/// Marginalizer table over `arity` binary inputs: one column per input vector.
pub fn marginalizer_table(k: usize, arity: usize) -> Result<Vec<Vec<Complex>>> {
    if k == 0 || k > arity {
        return Err(Error::InvalidParams(format!("component {k} outside 1..={arity}")));
    }
    let g = Generator::Marginalizer { k };
    Ok(binary_columns(arity)
        .iter()
        .map(|input| [[0], [1]].iter().map(|own| g.amplitude(own, input)).collect())
        .collect())
}

/// 2x2 phase shifter table, columns indexed by the input occupation.
pub fn phase_shifter_table(xi: &Angle) -> Vec<Vec<Complex>> {
    let g = Generator::PhaseShifter { xi: xi.clone() };
    (0..2)
        .map(|n| (0..2).map(|m| g.amplitude(&[m], &[n])).collect())
        .collect()
}

fn binary_columns(arity: usize) -> Vec<Vec<i32>> {
    (0..1usize << arity)
        .map(|bits| (0..arity).map(|i| ((bits >> (arity - 1 - i)) & 1) as i32).collect())
        .collect()
}
