//! Two-step paths of a free particle from the origin to a fixed end site.
//!
//! Each row is one intermediate site. The phase of the path weight is
//! flattest near the straight-line midpoint, where neighbouring paths add
//! up instead of cancelling. A second flat stretch is the periodic image of
//! that midpoint.
//!
//! ```text
//! cargo run --example stationary_phase -- [end_site]
//! ```

use qbnet::lattice::{step_amplitudes, Kernel, LatticeSpec};

fn main() {
    let spec = LatticeSpec::new(32, 0.25, 2, 0.5);
    let end: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("end site must be an integer"))
        .unwrap_or(spec.origin() + 8);
    assert!(end < spec.nx, "end site must be below {}", spec.nx);

    let a1 = step_amplitudes(&spec, Kernel::Gaussian, spec.dt).unwrap();
    let a2 = step_amplitudes(&spec, Kernel::Gaussian, 2.0 * spec.dt).unwrap();
    let start = spec.origin();
    let weights: Vec<_> = (0..spec.nx).map(|r| a2.get(end, r) * a1.get(r, start)).collect();

    println!(
        "end x = {}, classical midpoint x = {}",
        spec.position(end),
        spec.position(end) / 2.0
    );
    println!("{:>8} {:>10} {:>10} {:>12}", "x_mid", "phase", "dphase", "Re weight");
    for r in 0..spec.nx {
        let phase = weights[r].arg();
        let next = weights[(r + 1) % spec.nx].arg();
        let mut d = next - phase;
        d -= (d / std::f64::consts::TAU).round() * std::f64::consts::TAU;
        println!(
            "{:>8.3} {:>10.4} {:>10.4} {:>12.5}",
            spec.position(r),
            phase,
            d,
            weights[r].re
        );
    }
    let total: qbnet::Complex = weights.iter().sum();
    println!("sum over paths = {:.6} {:+.6}i", total.re, total.im);
}
