#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::test_runner::Config;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use slhnet_core::{CMatrix, OpArray, PortSet, SpaceLayout, StratonovichModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> CMatrix {
    let m = random_matrix(rng, n, n);
    (&m + m.adjoint()) * c(0.5, 0.0)
}

pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMatrix {
    random_matrix(rng, n, n).qr().q()
}

pub fn ports(n: usize) -> PortSet {
    PortSet::numbered("p", n)
}

/// Random Hermitian E-matrix with `n` ports on the single factor `("sys", dim)`.
pub fn random_strat(rng: &mut impl Rng, n: usize, dim: usize) -> StratonovichModel {
    let layout = SpaceLayout::single("sys", dim).unwrap();
    let data = random_hermitian(rng, (n + 1) * dim);
    StratonovichModel::new(ports(n), OpArray::new(layout, n + 1, n + 1, data).unwrap()).unwrap()
}

/// Like [`random_strat`] but with `E_ei = E_ie = 0` between the first
/// `n_ext` ports and the rest, so the remaining ports form an isolated loop.
pub fn random_isolated_strat(rng: &mut impl Rng, n_ext: usize, n_int: usize, dim: usize) -> StratonovichModel {
    let n = n_ext + n_int;
    let layout = SpaceLayout::single("sys", dim).unwrap();
    let mut data = random_hermitian(rng, (n + 1) * dim);
    for r in 0..n_ext {
        for k in n_ext..n {
            let (r0, k0) = ((r + 1) * dim, (k + 1) * dim);
            data.view_mut((r0, k0), (dim, dim)).fill(c(0.0, 0.0));
            data.view_mut((k0, r0), (dim, dim)).fill(c(0.0, 0.0));
        }
    }
    StratonovichModel::new(ports(n), OpArray::new(layout, n + 1, n + 1, data).unwrap()).unwrap()
}

pub fn port_labels(range: std::ops::Range<usize>) -> Vec<String> {
    range.map(|k| format!("p.{k}")).collect()
}

/// `cases` unless overridden by `PROPTEST_CASES`.
pub fn config(cases: u32) -> Config {
    let cases = std::env::var("PROPTEST_CASES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(cases);
    Config {
        cases,
        ..Config::default()
    }
}
