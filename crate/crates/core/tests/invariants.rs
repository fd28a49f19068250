use lpplab::cocycle::{crossing_check, EdgeCocycle, TieBreak};
use lpplab::lpp::{brute_force_passage_time, lpp_values, lpp_values_wavefront, rightmost_geodesic, GeoTree};
use lpplab::quantile::{PathMeasure, QuantileMap};
use lpplab::stationary::{alpha_to_direction, alpha_to_tilt, coupled_pair, coupling_violations, exp_shape};
use lpplab::{BoxRegion, Site, WeightDistribution, WeightField};
use proptest::prelude::*;

fn dist() -> impl Strategy<Value = WeightDistribution> {
    prop_oneof![
        Just(WeightDistribution::exponential(1.0).unwrap()),
        Just(WeightDistribution::geometric(0.5).unwrap()),
        Just(WeightDistribution::Uniform01),
        Just(WeightDistribution::two_point(0.0, 1.0, 0.5).unwrap()),
    ]
}

fn field(side: i64, d: WeightDistribution, seed: u64) -> WeightField {
    WeightField::generate(BoxRegion::square_from_origin(side, side).unwrap(), d, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn terminal_cocycle_evaluates_to_brute_force_differences(d in dist(), seed in any::<u64>(), a in 0i64..4, b in 0i64..4, c in 0i64..4, e in 0i64..4) {
        let f = field(6, d, seed);
        let v = Site::new(5, 5);
        let c0 = EdgeCocycle::from_terminal(&f, v, BoxRegion::square_from_origin(4, 4).unwrap()).unwrap();
        let (x, y) = (Site::new(a, b), Site::new(c, e));
        let want = brute_force_passage_time(&f, x, v).unwrap() - brute_force_passage_time(&f, y, v).unwrap();
        prop_assert!((c0.evaluate(x, y).unwrap() - want).abs() <= 1e-9);
    }

    #[test]
    fn crossing_has_no_violations(d in dist(), seed in any::<u64>()) {
        let f = field(6, d, seed);
        let r = crossing_check(&f, 7, &BoxRegion::square_from_origin(2, 2).unwrap()).unwrap();
        prop_assert_eq!(r.n_violations, 0);
    }

    #[test]
    fn plus_arrow_path_follows_rightmost_geodesic(d in dist(), seed in any::<u64>(), a in 0i64..4, b in 0i64..4) {
        let f = field(5, d, seed);
        let v = Site::new(4, 4);
        let c = EdgeCocycle::from_terminal(&f, v, BoxRegion::square_from_origin(4, 4).unwrap()).unwrap();
        let u = Site::new(a, b);
        let arrows = c.arrow_path(u, TieBreak::Plus, usize::MAX).unwrap();
        let right = rightmost_geodesic(&f, u, v).unwrap();
        prop_assert!(right.vertices().starts_with(arrows.vertices()));
    }

    #[test]
    fn wavefront_matches_row_sweep(d in dist(), seed in any::<u64>(), w in 1i64..12, h in 1i64..12) {
        let f = field(12, d, seed);
        let r = BoxRegion::square_from_origin(w, h).unwrap();
        let a = lpp_values(&f, Site::ORIGIN, &r).unwrap();
        let b = lpp_values_wavefront(&f, Site::ORIGIN, &r).unwrap();
        prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn coupled_chains_are_ordered(seed in any::<u64>(), a in 0.05f64..0.9, gap in 0.01f64..0.09) {
        let r = BoxRegion::square_from_origin(20, 20).unwrap();
        let bulk = WeightField::generate(r, WeightDistribution::exponential(1.0).unwrap(), seed).unwrap();
        let (lo, hi) = coupled_pair(&bulk, a, a + gap, seed, r).unwrap();
        prop_assert_eq!(coupling_violations(&lo, &hi).unwrap(), 0);
    }

    #[test]
    fn tilt_is_the_shape_gradient(alpha in 0.05f64..0.95) {
        let xi = alpha_to_direction(alpha).unwrap();
        let h = alpha_to_tilt(alpha).unwrap();
        let eps = 1e-6;
        let d1 = (exp_shape((xi.0 + eps, xi.1)) - exp_shape((xi.0 - eps, xi.1))) / (2.0 * eps);
        let d2 = (exp_shape((xi.0, xi.1 + eps)) - exp_shape((xi.0, xi.1 - eps))) / (2.0 * eps);
        prop_assert!((d1 + h.h1).abs() < 1e-5 * d1);
        prop_assert!((d2 + h.h2).abs() < 1e-5 * d2);
    }

    #[test]
    fn quantile_index_is_monotone(d in dist(), seed in any::<u64>(), depth in 1i64..6, raw in proptest::collection::vec(0.01f64..1.0, 1..5)) {
        let f = field(depth, d, seed);
        let tree = GeoTree::build(&f, Site::ORIGIN, depth).unwrap();
        let rays = tree.rays();
        let k = raw.len().min(rays.len());
        let total: f64 = raw[..k].iter().sum();
        let atoms = rays.iter().take(k).cloned().zip(raw[..k].iter().map(|m| m / total)).collect();
        let mu = PathMeasure::new(atoms).unwrap();
        let q = QuantileMap::new(&tree, &mu).unwrap();
        let idx: Vec<usize> = (0..=200).map(|i| q.index(f64::from(i) / 200.0).unwrap()).collect();
        prop_assert!(idx.windows(2).all(|w| w[0] <= w[1]));
    }
}
