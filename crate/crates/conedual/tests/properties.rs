//! Randomized structural properties of the sequence algebra, the certified
//! minimum, and the Parseval identity. These are invariants that must hold
//! for every input, independent of any particular extremal problem.

use proptest::prelude::*;

use conedual::seqcore::pairing;
use conedual::trig::{
    certified_min, fourier_eval, l1_lower_bound, parseval_check, AtomicMeasure,
};
use conedual::wiener::autocorrelation_candidate;
use conedual::{MultiIndex, SymmetricSequence, TorusGrid, DEFAULT_EPS_PD};

fn seq_strategy(radius: i64) -> impl Strategy<Value = SymmetricSequence> {
    prop::collection::vec(-5.0f64..5.0, 1..=(radius as usize + 1)).prop_map(|vals| {
        SymmetricSequence::from_half_values(&vals)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    /// The pairing is symmetric and linear in its first argument.
    #[test]
    fn pairing_symmetric_and_bilinear(
        f in seq_strategy(5),
        g in seq_strategy(5),
        h in seq_strategy(5),
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
    ) {
        let fh = pairing(&f, &h).unwrap();
        let hf = pairing(&h, &f).unwrap();
        prop_assert!((fh - hf).abs() <= 1e-12 * (1.0 + fh.abs()));

        // a·f + b·g assembled entrywise.
        let mut comb = SymmetricSequence::zero(1);
        for (n, v) in f.entries() {
            comb.set(n.clone(), a * v);
        }
        for (n, v) in g.entries() {
            let cur = comb.value_at(n);
            comb.set(n.clone(), cur + b * v);
        }
        let lhs = pairing(&comb, &h).unwrap();
        let rhs = a * fh + b * pairing(&g, &h).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs.abs()));
    }

    /// Symmetry of the sequence: the value at -n always equals the value at n.
    #[test]
    fn values_are_even(f in seq_strategy(6), k in -8i64..=8) {
        let n = MultiIndex::new(vec![k]);
        let m = MultiIndex::new(vec![-k]);
        prop_assert_eq!(f.value_at(&n).to_bits(), f.value_at(&m).to_bits());
    }

    /// The certified lower bound never exceeds the sampled minimum on a
    /// grid four times finer (soundness of the margin).
    #[test]
    fn certified_min_is_sound_against_finer_grid(f in seq_strategy(5)) {
        let grid = TorusGrid::new(1, 64).unwrap();
        let cert = certified_min(&f, &grid, DEFAULT_EPS_PD);
        let fine = grid.refined(4);
        let fine_min = fine
            .half_points()
            .iter()
            .map(|x| fourier_eval(&f, x))
            .fold(f64::INFINITY, f64::min);
        prop_assert!(
            cert.lower_bound() <= fine_min + 1e-12,
            "certified {} > sampled {}",
            cert.lower_bound(),
            fine_min
        );
    }

    /// The l1 estimate bounds the Fourier transform from below everywhere.
    #[test]
    fn l1_bound_below_pointwise_values(f in seq_strategy(6), t in 0.0f64..1.0) {
        let x = [t * 2.0 * std::f64::consts::PI];
        prop_assert!(l1_lower_bound(&f) <= fourier_eval(&f, &x) + 1e-12);
    }

    /// Both sides of the Parseval identity agree to relative 1e-10.
    #[test]
    fn parseval_identity(
        f in seq_strategy(6),
        atoms in prop::collection::vec((0.0f64..std::f64::consts::TAU, 0.0f64..2.0), 1..6),
    ) {
        let atom_list: Vec<(Vec<f64>, f64)> =
            atoms.into_iter().map(|(x, w)| (vec![x], w)).collect();
        let nu = AtomicMeasure::new(atom_list).unwrap();
        let (lhs, rhs) = parseval_check(&f, &nu).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    /// Autocorrelations are positive definite, and the pairing of two
    /// positive definite sequences (= the integral of the product of two
    /// nonnegative Fourier transforms) is nonnegative.
    #[test]
    fn pd_cone_pairing_nonnegative(
        u in prop::collection::vec(0.01f64..2.0, 1..5),
        v in prop::collection::vec(0.01f64..2.0, 1..5),
    ) {
        let f = autocorrelation_candidate(&u).unwrap();
        let h = autocorrelation_candidate(&v).unwrap();
        let p = pairing(&f, &h).unwrap();
        let scale = 1.0 + f.l1_norm() * h.l1_norm();
        prop_assert!(p >= -1e-10 * scale, "pairing {p} negative");
    }
}
