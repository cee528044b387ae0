//! Single-particle space-time lattice nets.
//!
//! Positions `x_s = (s - nx/2) dx` on a periodic box, times `t_i = i dt`.
//! The particle starts at `x = 0`. One step is a matrix `alpha[s][r]`: the
//! amplitude to hop from site `r` to site `s` in one time step.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::net::{max_states, Complex, Net, NodeDecl, NodeSpace, QbNet};

#[derive(Clone)]
pub enum Potential {
    Free,
    /// `m omega^2 x^2 / 2`
    Harmonic {
        omega: f64,
    },
    /// `-depth` for `|x| < width / 2`, else 0.
    Well {
        depth: f64,
        width: f64,
    },
    /// `V(x, t)`.
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Free => f.write_str("Free"),
            Potential::Harmonic { omega } => write!(f, "Harmonic {{ omega: {omega} }}"),
            Potential::Well { depth, width } => write!(f, "Well {{ depth: {depth}, width: {width} }}"),
            Potential::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kernel {
    /// `exp(-i dt H / hbar)` with a three-point periodic Laplacian.
    Exact,
    /// `sqrt(-i dtheta / pi) exp(i dt L / hbar)`.
    Gaussian,
}

#[derive(Debug, Clone)]
pub struct LatticeSpec {
    pub nx: usize,
    pub dx: f64,
    pub nt: usize,
    pub dt: f64,
    pub mass: f64,
    pub hbar: f64,
    pub potential: Potential,
}

impl LatticeSpec {
    /// Free particle with `m = hbar = 1`.
    pub fn new(nx: usize, dx: f64, nt: usize, dt: f64) -> Self {
        LatticeSpec {
            nx,
            dx,
            nt,
            dt,
            mass: 1.0,
            hbar: 1.0,
            potential: Potential::Free,
        }
    }

    pub fn with_potential(mut self, potential: Potential) -> Self {
        self.potential = potential;
        self
    }

    pub fn check(&self) -> Result<()> {
        let pos = |v: f64| v.is_finite() && v > 0.0;
        if self.nx == 0 || self.nt == 0 {
            return Err(Error::InvalidParams("need at least one site and one step".into()));
        }
        if !(pos(self.dx) && pos(self.dt) && pos(self.mass) && pos(self.hbar)) {
            return Err(Error::InvalidParams("dx, dt, mass and hbar must be positive".into()));
        }
        Ok(())
    }

    /// Box length `nx dx`.
    pub fn length(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    /// Total time `nt dt`.
    pub fn duration(&self) -> f64 {
        self.nt as f64 * self.dt
    }

    /// Index of the site at `x = 0`.
    pub fn origin(&self) -> usize {
        self.nx / 2
    }

    pub fn position(&self, s: usize) -> f64 {
        (s as f64 - self.origin() as f64) * self.dx
    }

    /// `m dx^2 / (2 hbar dt)`: phase jump between neighbouring sites.
    pub fn dtheta(&self) -> f64 {
        self.mass * self.dx * self.dx / (2.0 * self.hbar * self.dt)
    }

    pub fn potential_at(&self, x: f64, t: f64) -> f64 {
        match &self.potential {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => 0.5 * self.mass * omega * omega * x * x,
            Potential::Well { depth, width } => {
                if x.abs() < width / 2.0 {
                    -depth
                } else {
                    0.0
                }
            }
            Potential::Custom(f) => f(x, t),
        }
    }

    /// Shortest periodic displacement from site `r` to site `s`.
    fn displacement(&self, s: usize, r: usize) -> f64 {
        let l = self.length();
        let d = (s as f64 - r as f64) * self.dx;
        d - l * (d / l).round()
    }
}

/// One-step amplitude matrix, `alpha[(s, r)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepAmplitude(pub DMatrix<Complex>);

impl StepAmplitude {
    pub fn get(&self, s: usize, r: usize) -> Complex {
        self.0[(s, r)]
    }

    /// Largest entry of `|alpha^dagger alpha - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.0.nrows();
        let g = self.0.adjoint() * &self.0;
        let id = DMatrix::<Complex>::identity(n, n);
        (g - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// `exp(-i dt H / hbar)` for `H = -hbar^2/(2m) D2 + V(x, t)`.
pub fn step_amplitudes_exact(spec: &LatticeSpec, t: f64) -> Result<StepAmplitude> {
    spec.check()?;
    let n = spec.nx;
    let k = spec.hbar * spec.hbar / (2.0 * spec.mass * spec.dx * spec.dx);
    let mut h = DMatrix::<f64>::zeros(n, n);
    for s in 0..n {
        h[(s, s)] += spec.potential_at(spec.position(s), t);
        if n > 1 {
            h[(s, s)] += 2.0 * k;
            h[(s, (s + 1) % n)] -= k;
            h[(s, (s + n - 1) % n)] -= k;
        }
    }
    let eig = SymmetricEigen::new(h);
    let q = eig.eigenvectors.map(|v| Complex::new(v, 0.0));
    let phases = DMatrix::from_diagonal(&DVector::from_iterator(
        n,
        eig.eigenvalues
            .iter()
            .map(|&e| Complex::from_polar(1.0, -e * spec.dt / spec.hbar)),
    ));
    Ok(StepAmplitude(&q * phases * q.transpose()))
}

/// Gaussian short-time kernel with the Lagrangian
/// `m/2 ((x_s - x_r)/dt)^2 - V(x_s, t)`.
pub fn step_amplitudes_gaussian(spec: &LatticeSpec, t: f64) -> Result<StepAmplitude> {
    spec.check()?;
    let pre = (Complex::new(0.0, -spec.dtheta()) / std::f64::consts::PI).sqrt();
    let n = spec.nx;
    Ok(StepAmplitude(DMatrix::from_fn(n, n, |s, r| {
        let v = spec.displacement(s, r) / spec.dt;
        let lag = 0.5 * spec.mass * v * v - spec.potential_at(spec.position(s), t);
        pre * Complex::from_polar(1.0, spec.dt * lag / spec.hbar)
    })))
}

pub fn step_amplitudes(spec: &LatticeSpec, kernel: Kernel, t: f64) -> Result<StepAmplitude> {
    match kernel {
        Kernel::Exact => step_amplitudes_exact(spec, t),
        Kernel::Gaussian => step_amplitudes_gaussian(spec, t),
    }
}

/// Component name of site `s` at step `i`.
pub fn site_component(i: usize, s: usize) -> String {
    format!("t{i}.s{s}")
}

/// Lattice net restricted to the single-particle sector.
///
/// Node `t0` is the root with one state (particle at the origin, amplitude
/// 1). Node `t{i}` carries the whole time slice: one component per site and
/// one state per occupied site. Its table is `alpha(t_i)`, so a path through
/// the net is a lattice path and its value the product of step amplitudes.
pub fn build_lattice_net(spec: &LatticeSpec, kernel: Kernel) -> Result<QbNet> {
    spec.check()?;
    let count = (spec.nx as u128).checked_pow(spec.nt as u32).unwrap_or(u128::MAX);
    let cap = max_states();
    if count > cap as u128 {
        return Err(Error::StateSpaceTooLarge { count, cap });
    }
    let origin = spec.origin();
    let mut decls = vec![NodeDecl::dense(
        "t0",
        &[],
        NodeSpace::new(vec![site_component(0, origin)], vec![vec![1]])?,
        vec![Complex::new(1.0, 0.0)],
    )];
    for i in 1..=spec.nt {
        let comps: Vec<String> = (0..spec.nx).map(|s| site_component(i, s)).collect();
        let states: Vec<Vec<i32>> = (0..spec.nx)
            .map(|s| (0..spec.nx).map(|k| (k == s) as i32).collect())
            .collect();
        let alpha = step_amplitudes(spec, kernel, i as f64 * spec.dt)?;
        let values: Vec<Complex> = if i == 1 {
            (0..spec.nx).map(|s| alpha.get(s, origin)).collect()
        } else {
            (0..spec.nx)
                .flat_map(|r| (0..spec.nx).map(move |s| (s, r)))
                .map(|(s, r)| alpha.get(s, r))
                .collect()
        };
        let parent = format!("t{}", i - 1);
        decls.push(NodeDecl::dense(
            &format!("t{i}"),
            &[&parent],
            NodeSpace::new(comps, states)?,
            values,
        ));
    }
    Net::build(decls)
}

/// Final-time amplitude per site by successive matrix-vector products.
pub fn propagate(spec: &LatticeSpec, kernel: Kernel) -> Result<Vec<Complex>> {
    spec.check()?;
    let mut psi = DVector::<Complex>::zeros(spec.nx);
    psi[spec.origin()] = Complex::new(1.0, 0.0);
    for i in 1..=spec.nt {
        psi = step_amplitudes(spec, kernel, i as f64 * spec.dt)?.0 * psi;
    }
    Ok(psi.iter().copied().collect())
}

/// Site index of the particle in a final state of [`build_lattice_net`].
pub fn final_site(spec: &LatticeSpec, sigma: &crate::net::Assignment) -> Option<usize> {
    (0..spec.nx).find(|&s| sigma.get(&site_component(spec.nt, s)) == Some(&1))
}

/// Largest gaussian-vs-exact difference over entries with `|s - r| <= 1`
/// (periodically), evaluated at `t = dt`.
pub fn near_diagonal_error(spec: &LatticeSpec) -> Result<f64> {
    let a = step_amplitudes_exact(spec, spec.dt)?;
    let b = step_amplitudes_gaussian(spec, spec.dt)?;
    let n = spec.nx;
    let mut worst: f64 = 0.0;
    for s in 0..n {
        for r in [s, (s + 1) % n, (s + n - 1) % n] {
            worst = worst.max((a.get(s, r) - b.get(s, r)).norm());
        }
    }
    Ok(worst)
}

/// Kernel error while halving `dt` and `dx` together on a fixed box, so
/// that `dtheta` halves each time. Returns `(dt, dtheta, error)` per point.
pub fn kernel_convergence(base: &LatticeSpec, halvings: usize) -> Result<Vec<(f64, f64, f64)>> {
    let mut spec = base.clone();
    let mut out = Vec::with_capacity(halvings + 1);
    for k in 0..=halvings {
        if k > 0 {
            spec.dt /= 2.0;
            spec.dx /= 2.0;
            spec.nx *= 2;
        }
        out.push((spec.dt, spec.dtheta(), near_diagonal_error(&spec)?));
    }
    Ok(out)
}

/// `| sum_s |psi_s|^2 - 1 |` after propagating with the gaussian kernel.
pub fn gaussian_norm_drift(spec: &LatticeSpec) -> Result<f64> {
    let psi = propagate(spec, Kernel::Gaussian)?;
    Ok((psi.iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs())
}
