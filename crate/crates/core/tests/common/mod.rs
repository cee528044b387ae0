#![allow(dead_code)]

use qbnet::net::{NodeDecl, NodeSpace};
use qbnet::{CbNet, Complex, Net, QbNet};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Shape of a random net: parents and states per node.
#[derive(Debug, Clone)]
pub struct Shape {
    pub parents: Vec<Vec<usize>>,
    /// Per node: component names and their states.
    pub spaces: Vec<NodeSpace>,
}

pub fn name(i: usize) -> String {
    format!("n{i}")
}

/// Up to five nodes, at most two parents each, at most three states per
/// component. Some nodes carry two binary components.
pub fn random_shape(rng: &mut ChaCha8Rng) -> Shape {
    let n = rng.gen_range(1..=5);
    let mut parents = Vec::new();
    let mut spaces = Vec::new();
    for i in 0..n {
        let mut ps: Vec<usize> = (0..i).filter(|_| rng.gen_bool(0.5)).collect();
        while ps.len() > 2 {
            ps.remove(rng.gen_range(0..ps.len()));
        }
        parents.push(ps);
        let space = if rng.gen_bool(0.25) {
            NodeSpace::new(
                vec![format!("n{i}.a"), format!("n{i}.b")],
                vec![vec![0, 0], vec![0, 1], vec![1, 1]],
            )
            .unwrap()
        } else {
            NodeSpace::scalar(&format!("n{i}.a"), 0..rng.gen_range(2..=3)).unwrap()
        };
        spaces.push(space);
    }
    Shape { parents, spaces }
}

fn columns(shape: &Shape, i: usize) -> usize {
    shape.parents[i].iter().map(|&p| shape.spaces[p].len()).product()
}

fn decls<T>(shape: &Shape, mut column: impl FnMut(usize) -> Vec<T>) -> Vec<NodeDecl<T>>
where
    T: qbnet::net::Value,
{
    (0..shape.spaces.len())
        .map(|i| {
            let values: Vec<T> = (0..columns(shape, i))
                .flat_map(|_| column(shape.spaces[i].len()))
                .collect();
            let ps: Vec<String> = shape.parents[i].iter().map(|&p| name(p)).collect();
            let ps: Vec<&str> = ps.iter().map(String::as_str).collect();
            NodeDecl::dense(&name(i), &ps, shape.spaces[i].clone(), values)
        })
        .collect()
}

/// Random stochastic columns, with the odd exact zero.
pub fn random_cb(rng: &mut ChaCha8Rng, shape: &Shape) -> CbNet {
    let mut col = |rows: usize| {
        let mut w: Vec<f64> = (0..rows)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    0.0
                } else {
                    rng.gen_range(0.05..1.0)
                }
            })
            .collect();
        if w.iter().all(|x| *x == 0.0) {
            w[0] = 1.0;
        }
        let s: f64 = w.iter().sum();
        w.iter().map(|x| x / s).collect()
    };
    Net::build(decls(shape, &mut col)).unwrap()
}

/// Random unit-norm complex columns, with the odd exact zero.
pub fn random_qb(rng: &mut ChaCha8Rng, shape: &Shape) -> QbNet {
    let mut col = |rows: usize| {
        let mut w: Vec<Complex> = (0..rows)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    Complex::new(0.0, 0.0)
                } else {
                    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                }
            })
            .collect();
        if w.iter().all(|x| x.norm() == 0.0) {
            w[0] = Complex::new(1.0, 0.0);
        }
        let s: f64 = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        w.iter().map(|x| x / s).collect()
    };
    Net::build(decls(shape, &mut col)).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
