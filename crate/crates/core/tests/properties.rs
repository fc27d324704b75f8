use std::sync::OnceLock;

use proptest::prelude::*;

use kkr_core::boxball::BoxBallState;
use kkr_core::crystal::{affine_r, is_highest, r_matrix, weight, AffineFactor};
use kkr_core::kkr::kkr_forward;
use kkr_core::rigged::{enumerate_rcs, RiggedConfiguration, DEFAULT_ENUMERATION_CAP};
use kkr_core::scattering::{compose_theorem, is_normal_ordered, normal_order, ScatteringData};
use kkr_core::tableau::{Tableau, TensorWord};

fn tableau(n: usize, max_len: usize) -> impl Strategy<Value = Tableau> {
    prop::collection::vec(1..=n, 1..=max_len)
        .prop_map(move |ls| Tableau::from_letters(n, &ls).unwrap())
}

fn triple(max_len: usize) -> impl Strategy<Value = (Tableau, Tableau, Tableau)> {
    (2usize..=5).prop_flat_map(move |n| {
        (
            tableau(n, max_len),
            tableau(n, max_len),
            tableau(n, max_len),
        )
    })
}

fn pool() -> &'static Vec<RiggedConfiguration> {
    static POOL: OnceLock<Vec<RiggedConfiguration>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut all = Vec::new();
        for n in 2..=4 {
            all.extend(enumerate_rcs(n, 5, 3, DEFAULT_ENUMERATION_CAP).unwrap());
        }
        all
    })
}

fn rc() -> impl Strategy<Value = RiggedConfiguration> {
    any::<prop::sample::Index>().prop_map(|i| i.get(pool()).clone())
}

fn layer_size(rc: &RiggedConfiguration, a: usize) -> u32 {
    if a == 0 {
        rc.quantum().iter().sum::<usize>() as u32
    } else {
        rc.shape(a).iter().sum::<usize>() as u32
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn r_is_an_involution((x, y, _) in triple(5)) {
        let img = r_matrix(&x, &y).unwrap();
        prop_assert_eq!(img.left.len(), y.len());
        prop_assert_eq!(img.right.len(), x.len());
        let back = r_matrix(&img.left, &img.right).unwrap();
        prop_assert_eq!(&back.left, &x);
        prop_assert_eq!(&back.right, &y);
        prop_assert_eq!(back.energy, img.energy);
    }

    #[test]
    fn r_conserves_weight((x, y, _) in triple(5)) {
        let n = x.n();
        let img = r_matrix(&x, &y).unwrap();
        let before = TensorWord::new(vec![x, y]).unwrap();
        let after = TensorWord::new(vec![img.left, img.right]).unwrap();
        prop_assert_eq!(weight(&before, n), weight(&after, n));
    }

    #[test]
    fn yang_baxter((x, y, z) in triple(4)) {
        // R12 R23 R12 = R23 R12 R23 on x ⊗ y ⊗ z
        let r12 = |w: [Tableau; 3]| {
            let i = r_matrix(&w[0], &w[1]).unwrap();
            [i.left, i.right, w[2].clone()]
        };
        let r23 = |w: [Tableau; 3]| {
            let i = r_matrix(&w[1], &w[2]).unwrap();
            [w[0].clone(), i.left, i.right]
        };
        let start = [x, y, z];
        let lhs = r12(r23(r12(start.clone())));
        let rhs = r23(r12(r23(start)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn affine_r_is_an_involution((x, y, _) in triple(4), d in -5i64..5, e in -5i64..5) {
        let (l, r) = affine_r(&AffineFactor::new(x.clone(), d), &AffineFactor::new(y.clone(), e)).unwrap();
        let (x2, y2) = affine_r(&l, &r).unwrap();
        prop_assert_eq!(x2, AffineFactor::new(x, d));
        prop_assert_eq!(y2, AffineFactor::new(y, e));
    }

    #[test]
    fn kkr_image_is_highest_with_the_right_weight(rc in rc()) {
        let (path, _) = kkr_forward(&rc).unwrap();
        prop_assert!(is_highest(&path), "{} from {}", path, rc.to_json());
        prop_assert_eq!(path.shape(), rc.quantum().to_vec());
        let w = weight(&path, rc.n());
        for a in 1..=rc.n() {
            prop_assert_eq!(w[a - 1], layer_size(&rc, a - 1) - layer_size(&rc, a));
        }
    }

    #[test]
    fn kkr_traces_have_monotone_columns(rc in rc()) {
        let (_, tr) = kkr_forward(&rc).unwrap();
        prop_assert!(tr.check_columns().is_ok(), "{:?}", tr.check_columns());
    }

    #[test]
    fn composition_agrees_with_kkr(rc in rc()) {
        prop_assert_eq!(compose_theorem(&rc).unwrap(), kkr_forward(&rc).unwrap().0);
    }

    #[test]
    fn restriction_stays_valid(rc in rc(), a in 0usize..4) {
        let a = a.min(rc.n() - 1);
        let r = rc.restrict(a);
        prop_assert!(r.is_valid(), "restrict({}) of {}", a, rc.to_json());
        prop_assert_eq!(r.n(), rc.n() - a);
    }

    #[test]
    fn json_round_trip(rc in rc()) {
        let (back, touched) = RiggedConfiguration::from_json(&rc.to_json()).unwrap();
        prop_assert!(touched.is_empty());
        prop_assert_eq!(back, rc);
    }

    #[test]
    fn normal_order_is_normal_ordered(
        n in 3usize..=4,
        parts in prop::collection::vec((prop::collection::vec(2usize..=4, 1..=3), 0i64..6), 1..=3),
    ) {
        let factors: Vec<AffineFactor> = parts
            .iter()
            .map(|(ls, d)| {
                let ls: Vec<usize> = ls.iter().map(|&l| l.min(n)).collect();
                AffineFactor::new(Tableau::from_letters(n, &ls).unwrap(), *d)
            })
            .collect();
        let s = ScatteringData::new(1, factors);
        let t = normal_order(&s).unwrap();
        prop_assert!(is_normal_ordered(&t).unwrap(), "{} -> {}", s, t);
        prop_assert_eq!(normal_order(&t).unwrap(), t.clone());
    }

    #[test]
    fn box_ball_conserves_letters_and_solitons(
        n in 2usize..=4,
        cells in prop::collection::vec(1usize..=4, 0..16),
        l in 1usize..=4,
    ) {
        let cells: Vec<usize> = cells.iter().map(|&c| c.min(n)).collect();
        let s = BoxBallState::new(n, cells).unwrap();
        let t = s.evolve(l).unwrap();
        prop_assert_eq!(s.content(), t.content());
        prop_assert_eq!(s.soliton_content().unwrap(), t.soliton_content().unwrap());
    }
}
