use arclab::arcs::{all_completions, coverage, Arc, SearchOrder};
use arclab::conic::ConicContext;
use arclab::curves::{build_segre_curve, rational_points};
use arclab::field::{make_field, ExtParam, FieldElem};
use proptest::prelude::*;

fn conic(q: u64) -> ConicContext {
    ConicContext::new(make_field(q).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn coverage_ignores_point_order(q in prop::sample::select(vec![7u64, 9, 11, 13, 25]), seed in any::<u64>()) {
        let c = conic(q);
        let mut pts = c.build_h().h;
        let base = coverage(&Arc::new(c.plane(), pts.clone()).unwrap());
        // deterministic shuffle from the seed
        let n = pts.len();
        for i in (1..n).rev() {
            let j = (seed.rotate_left(i as u32) % (i as u64 + 1)) as usize;
            pts.swap(i, j);
        }
        let shuffled = coverage(&Arc::new(c.plane(), pts).unwrap());
        prop_assert_eq!(base.flags(), shuffled.flags());
    }

    #[test]
    fn phi_is_an_involution(q in prop::sample::select(vec![5u64, 7, 9, 27, 49, 121]), idx in any::<usize>(), s in any::<u32>()) {
        let c = conic(q);
        let plane = c.plane();
        let r = plane.point_at(idx % plane.len());
        prop_assume!(!c.is_on_conic(r));
        let s = if s % (q as u32 + 1) == q as u32 {
            ExtParam::Infinity
        } else {
            ExtParam::Finite(c.field().elem((s % q as u32) as u64).unwrap())
        };
        let t = c.phi(r, s).unwrap();
        prop_assert_eq!(c.phi(r, t).unwrap(), s);
        // R, P and τ_R(P) are collinear
        let p = c.param_to_point(s);
        prop_assert!(plane.collinear(r, p, c.tau(r, p).unwrap()));
    }

    #[test]
    fn segre_points_symmetric(q in prop::sample::select(vec![7u64, 11, 13, 17]), a in 1u64..7, b in 1u64..7, cc in 1u64..7) {
        let f = make_field(q).unwrap();
        let (a, b, cc) = (f.elem(a).unwrap(), f.elem(b).unwrap(), f.elem(cc).unwrap());
        prop_assume!(f.mul(a, b) != f.square(cc));
        let curve = build_segre_curve(&f, a, b, cc, f.smallest_nonsquare()).unwrap();
        let plane = arclab::plane::Plane::new(f.clone());
        for p in rational_points(&plane, &curve) {
            let [x, y, z] = p.coords();
            prop_assert_eq!(curve.eval_raw(&f, [x, f.neg(y), z]), FieldElem::ZERO);
        }
    }
}

#[test]
fn completion_sets_do_not_depend_on_search_order() {
    for q in [7, 9, 11] {
        let c = conic(q);
        let h = Arc::new(c.plane(), c.build_h().h).unwrap();
        let fwd = all_completions(&h, 4, SearchOrder::Forward);
        let rev = all_completions(&h, 4, SearchOrder::Reverse);
        assert_eq!(fwd.by_size, rev.by_size, "q={q}");
    }
}
