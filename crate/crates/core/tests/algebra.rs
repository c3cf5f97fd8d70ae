mod common;

use common::*;
use proptest::prelude::*;
use slhnet_core::network::{
    feedback_reduce, feedback_reduce_general, feedback_reduce_strat, isolated_loop_hamiltonian, loop_z, series,
    FeedbackPlan,
};
use slhnet_core::operator::{hermiticity_deviation, unitarity_deviation};
use slhnet_core::{slh_to_strat, strat_to_slh, OpArray};

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn cayley_round_trip(seed in any::<u64>(), n in 1usize..4, dim in 1usize..5) {
        let e = random_strat(&mut rng(seed), n, dim);
        let g = strat_to_slh(&e).unwrap();
        prop_assert!(unitarity_deviation(g.s().data()) < 1e-9);
        prop_assert!(hermiticity_deviation(g.h().matrix()) < 1e-9);
        let back = slh_to_strat(&g).unwrap();
        prop_assert!(back.max_abs_diff(&e) < 1e-9, "deviation {}", back.max_abs_diff(&e));
    }

    #[test]
    fn series_is_associative(seed in any::<u64>(), n in 1usize..4, dim in 1usize..4) {
        let mut r = rng(seed);
        let gs: Vec<_> = (0..3).map(|_| strat_to_slh(&random_strat(&mut r, n, dim)).unwrap()).collect();
        let left = series(&series(&gs[2], &gs[1]).unwrap(), &gs[0]).unwrap();
        let right = series(&gs[2], &series(&gs[1], &gs[0]).unwrap()).unwrap();
        prop_assert!(left.max_abs_diff(&right) < 1e-10);
    }

    #[test]
    fn ito_and_schur_routes_agree(seed in any::<u64>(), n_ext in 1usize..3, n_int in 1usize..3, dim in 1usize..7) {
        let n = n_ext + n_int;
        let e = random_strat(&mut rng(seed), n, dim);
        let g = strat_to_slh(&e).unwrap();
        let internal = port_labels(n - n_int..n);
        let ito = feedback_reduce(&g, &FeedbackPlan::new(internal.clone()).unwrap()).unwrap();
        prop_assert!(unitarity_deviation(ito.s().data()) < 1e-9);
        prop_assert!(hermiticity_deviation(ito.h().matrix()) < 1e-9);
        let schur = feedback_reduce_strat(&e, &internal).unwrap();
        let via_ito = slh_to_strat(&ito).unwrap();
        // rounding is amplified by E_ii⁻¹ and by (I + S_fb)⁻¹, which sets the size of E_fb
        let int: Vec<usize> = (n - n_int + 1..=n).collect();
        let e_ii_inv = e.full().select(&int, &int).invert("E_ii").unwrap().max_abs();
        let scale = e_ii_inv.max(schur.full().max_abs()).max(1.0);
        prop_assert!(via_ito.max_abs_diff(&schur) < 1e-9 * scale, "deviation {}", via_ito.max_abs_diff(&schur));
    }

    #[test]
    fn shortening_order_is_irrelevant(seed in any::<u64>(), dim in 1usize..5) {
        let e = random_strat(&mut rng(seed), 3, dim);
        let conditioned = |idx: &[usize]| e.full().select(idx, idx).invert("E_ii").map(|m| m.max_abs() < 100.0).unwrap_or(false);
        prop_assume!(conditioned(&[2]) && conditioned(&[3]) && conditioned(&[2, 3]));
        let joint = feedback_reduce_strat(&e, &["p.1", "p.2"]).unwrap();
        let a = feedback_reduce_strat(&feedback_reduce_strat(&e, &["p.1"]).unwrap(), &["p.2"]).unwrap();
        let b = feedback_reduce_strat(&feedback_reduce_strat(&e, &["p.2"]).unwrap(), &["p.1"]).unwrap();
        prop_assert!(joint.max_abs_diff(&a) < 1e-9);
        prop_assert!(joint.max_abs_diff(&b) < 1e-9);
    }

    #[test]
    fn isolated_loop_paths_agree(seed in any::<u64>(), n_int in 1usize..3, dim in 1usize..5) {
        let e = random_isolated_strat(&mut rng(seed), 2, n_int, dim);
        let g = strat_to_slh(&e).unwrap();
        let plan = FeedbackPlan::new(port_labels(2..2 + n_int)).unwrap();
        let fast = feedback_reduce(&g, &plan).unwrap();
        let general = feedback_reduce_general(&g, &plan).unwrap();
        let z = loop_z(&g.s().select(&(2..2 + n_int).collect::<Vec<_>>(), &(2..2 + n_int).collect::<Vec<_>>())).unwrap();
        prop_assert!(fast.max_abs_diff(&general) < 1e-10 * z.max_abs().max(1.0));
    }

    #[test]
    fn isolated_loop_proposition(seed in any::<u64>(), n_ext in 1usize..3, n_int in 1usize..3, dim in 1usize..5) {
        let e = random_isolated_strat(&mut rng(seed), n_ext, n_int, dim);
        let g = strat_to_slh(&e).unwrap();
        let ext: Vec<usize> = (1..=n_ext).collect();
        let int: Vec<usize> = (n_ext + 1..=n_ext + n_int).collect();
        let full = e.full();

        let s_ii = g.s().select(&(n_ext..n_ext + n_int).collect::<Vec<_>>(), &(n_ext..n_ext + n_int).collect::<Vec<_>>());
        let z = loop_z(&s_ii).unwrap();
        let minus_inv = full.select(&int, &int).invert("E_ii").unwrap().scale(c(-1.0, 0.0));
        // absolute error grows with ‖E_ii⁻¹‖
        prop_assert!(z.max_abs_diff(&minus_inv) < 1e-10 * z.max_abs().max(1.0));

        // V_e = ½ E0e Im{(I + iEee/2)⁻¹} Ee0
        let id = OpArray::identity(g.layout(), n_ext);
        let inner = (&id + &full.select(&ext, &ext).scale(c(0.0, 0.5))).invert("I + iEee/2").unwrap().im_part();
        let v_e = (&(&full.select(&[0], &ext) * &inner) * &full.select(&ext, &[0])).scale(c(0.5, 0.0));
        let loop_part = &(&full.select(&[0], &int) * &z) * &full.select(&int, &[0]);
        let predicted = &(&e.e00() + &loop_part.to_operator()) + &v_e.to_operator();

        let l_i = g.l().select(&(n_ext..n_ext + n_int).collect::<Vec<_>>(), &[0]);
        let direct = g.h() + &isolated_loop_hamiltonian(&s_ii, &l_i).unwrap();
        let scale = z.max_abs().max(1.0);
        prop_assert!(predicted.max_abs_diff(&direct) < 1e-10 * scale);
        let reduced = feedback_reduce(&g, &FeedbackPlan::new(port_labels(n_ext..n_ext + n_int)).unwrap()).unwrap();
        prop_assert!(reduced.h().max_abs_diff(&direct) < 1e-10 * scale);
    }
}

#[test]
fn gain_permutation_matches_relabeled_wiring() {
    // a swap gain on the internal ports is the same as exchanging the
    // corresponding input columns of S
    let mut r = rng(7);
    let layout = slhnet_core::SpaceLayout::single("sys", 3).unwrap();
    let g = strat_to_slh(&random_strat(&mut r, 3, 3)).unwrap();
    let swap = OpArray::from_scalars(&layout, &slhnet_core::CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]));
    let with_gain = feedback_reduce(&g, &FeedbackPlan::new(port_labels(1..3)).unwrap().with_gain(swap).unwrap()).unwrap();

    // permute the input columns of S (inputs 1 ↔ 2)
    let perm = [0usize, 2, 1];
    let s_perm = g.s().select(&[0, 1, 2], &perm);
    let permuted = slhnet_core::SLHModel::new(g.ports().clone(), s_perm, g.l().clone(), g.h().clone()).unwrap();
    let plain = feedback_reduce_general(&permuted, &FeedbackPlan::new(port_labels(1..3)).unwrap()).unwrap();
    assert!(with_gain.max_abs_diff(&plain) < 1e-10, "{}", with_gain.max_abs_diff(&plain));
}
