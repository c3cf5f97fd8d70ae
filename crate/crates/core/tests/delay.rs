mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use slhnet_core::linear_passive::{sweep_to_json, write_sweep_csv, LinearPassiveModel};
use slhnet_core::network::close_all_loops;
use slhnet_core::operator::{hermiticity_deviation, max_abs, max_abs_diff};
use slhnet_core::{CMatrix, Error};

fn random_model(r: &mut impl Rng, m: usize, n: usize) -> LinearPassiveModel {
    LinearPassiveModel::new(random_hermitian(r, m), random_matrix(r, n, m), random_unitary(r, n)).unwrap()
}

fn random_s(r: &mut impl Rng) -> Complex64 {
    c(r.gen_range(0.05..2.0), r.gen_range(-5.0..5.0))
}

fn scalar(x: Complex64) -> CMatrix {
    CMatrix::from_element(1, 1, x)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn realization_reproduces_delay_frequency(seed in any::<u64>(), m in 1usize..4, n in 1usize..4) {
        let mut r = rng(seed);
        let model = random_model(&mut r, m, n);
        for tau in [0.0, 0.3, 1.0] {
            let s = random_s(&mut r);
            let a_fb = model.delay_loop_generator(tau, s).unwrap();
            let omega = model.delay_loop_omega(tau, s).unwrap();
            prop_assert!(max_abs_diff(&a_fb, &(omega * c(0.0, -1.0))) < 1e-10);
        }
        let instant = model.instantaneous_loop_omega().unwrap();
        prop_assert!(max_abs_diff(&model.delay_loop_omega(0.0, random_s(&mut r)).unwrap(), &instant) < 1e-10);
        prop_assert!(hermiticity_deviation(&instant) < 1e-10 * max_abs(&instant).max(1.0));
    }

    #[test]
    fn delay_frequency_is_continuous_in_tau(seed in any::<u64>(), m in 1usize..4, n in 1usize..3) {
        let mut r = rng(seed);
        let model = random_model(&mut r, m, n);
        // the asymptotic regime starts at τ ≪ ‖(I − S)⁻¹‖⁻¹
        let id = CMatrix::identity(n, n);
        prop_assume!(slhnet_core::operator::invert_matrix(&(&id - model.s()), "I − S").map(|m| max_abs(&m) < 100.0).unwrap_or(false));
        let s = c(0.2, 0.7);
        let base = model.delay_loop_omega(0.0, s).unwrap();
        let dist: Vec<f64> = (4..=20)
            .map(|k| max_abs_diff(&model.delay_loop_omega(2f64.powi(-k), s).unwrap(), &base))
            .collect();
        // linear in τ once τ is small against the loop conditioning
        let tail = &dist[dist.len() - 4..];
        for w in tail.windows(2) {
            prop_assert!(w[1] < w[0], "{:?}", dist);
            prop_assert!((1.9..=2.1).contains(&(w[0] / w[1])), "{:?}", dist);
        }
    }
}

#[test]
fn single_cavity_examples() {
    let (omega, gamma, phi): (f64, f64, f64) = (1.3, 0.4, FRAC_PI_2);
    let model = LinearPassiveModel::new(scalar(c(omega, 0.0)), scalar(c(gamma.sqrt(), 0.0)), scalar(Complex64::from_polar(1.0, phi))).unwrap();
    let ss = model.abcd();
    assert!((ss.a[(0, 0)] - c(-gamma / 2.0, -omega)).norm() < 1e-15);
    assert!((ss.b[(0, 0)] + Complex64::from_polar(gamma.sqrt(), phi)).norm() < 1e-15);
    let w = model.delay_loop_omega(0.0, c(3.0, -2.0)).unwrap();
    assert!((w[(0, 0)] - c(omega + gamma / 2.0, 0.0)).norm() < 1e-12);
}

#[test]
fn sweep_on_imaginary_axis_is_periodic() {
    let model = LinearPassiveModel::new(scalar(c(0.5, 0.0)), scalar(c(0.8, 0.0)), scalar(Complex64::from_polar(1.0, 0.9))).unwrap();
    let tau = 1.0;
    let grid: Vec<Complex64> = (0..12).map(|k| c(0.0, 0.37 * k as f64)).collect();
    let shifted: Vec<Complex64> = grid.iter().map(|s| s + c(0.0, 2.0 * PI / tau)).collect();
    let a = model.delay_sweep(tau, &grid).unwrap();
    let b = model.delay_sweep(tau, &shifted).unwrap();
    for (p, q) in a.iter().zip(&b) {
        assert!(max_abs_diff(p.omega_fb.as_ref().unwrap(), q.omega_fb.as_ref().unwrap()) < 1e-10);
    }
    let zero_delay = model.delay_sweep(0.0, &grid).unwrap();
    for p in &zero_delay {
        assert!(max_abs_diff(p.omega_fb.as_ref().unwrap(), zero_delay[0].omega_fb.as_ref().unwrap()) < 1e-12);
    }
}

#[test]
fn resonances_are_flagged_not_fatal() {
    // e^{−sτ} = S at s = −iφ/τ
    let phi = 0.9;
    let model = LinearPassiveModel::new(scalar(c(0.5, 0.0)), scalar(c(0.8, 0.0)), scalar(Complex64::from_polar(1.0, phi))).unwrap();
    let grid = [c(0.0, 0.3), c(0.0, -phi), c(0.1, 0.0)];
    let points = model.delay_sweep(1.0, &grid).unwrap();
    assert!(points[0].omega_fb.is_some() && points[2].omega_fb.is_some());
    assert!(points[1].omega_fb.is_none());
    assert!(matches!(model.delay_loop_omega(1.0, grid[1]), Err(Error::SingularAtPoint { .. })));

    let json = serde_json::to_value(sweep_to_json(&points)).unwrap();
    assert_eq!(json[1]["singular"], true);
    assert!(json[1]["omega_fb"].is_null());
    let mut csv = Vec::new();
    write_sweep_csv(&points, 1, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(2).unwrap().ends_with(",1"));
}

#[test]
fn zero_delay_matches_truncated_operator_loop() {
    let mut r = rng(17);
    let model = random_model(&mut r, 2, 2);
    let dims = [4, 3];
    let g = model.to_slh(&dims).unwrap();
    let closed = close_all_loops(&g).unwrap();
    let lifted = LinearPassiveModel::new(model.instantaneous_loop_omega().unwrap(), CMatrix::zeros(0, 2), CMatrix::zeros(0, 0))
        .unwrap()
        .to_slh(&dims)
        .unwrap();
    // compare away from the truncation edge, where a a† ≠ a† a + 1
    let index = |n0: usize, n1: usize| n0 * dims[1] + n1;
    for (p, q) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0), (0, 2)] {
        for (u, v) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 0)] {
            let (j, k) = (index(p, q), index(u, v));
            assert!((closed.h().matrix()[(j, k)] - lifted.h().matrix()[(j, k)]).norm() < 1e-10);
        }
    }
}

#[test]
fn two_mode_lift_contains_hopping() {
    let kappa = c(0.3, -0.2);
    let omega = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), kappa, kappa.conj(), c(2.0, 0.0)]);
    let model = LinearPassiveModel::new(omega, CMatrix::zeros(0, 2), CMatrix::zeros(0, 0)).unwrap();
    let g = model.to_slh(&[3, 3]).unwrap();
    // ⟨1,0| H |0,1⟩ = κ
    assert!((g.h().matrix()[(3, 1)] - kappa).norm() < 1e-15);
    let back = LinearPassiveModel::from_slh(&g).unwrap();
    assert!(max_abs_diff(back.omega(), model.omega()) < 1e-15);
}
