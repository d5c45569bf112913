mod common;

use common::*;
use proptest::prelude::*;
use reachkit::boundary::{contains, sample_boundary, Membership};
use reachkit::compare::{zonotope_approximant, zonotope_volume, ApproxMode};
use reachkit::poly::{all_real_roots, MultiPoly, RatPoly};
use reachkit::size::{block_volumes, diameter, volume};
use reachkit::support::{support_box, width};
use reachkit::{build_system, state_transition, zeta, ReachSpec, RelativeDegree};

fn degrees(max_d: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 1..=3).prop_filter("dimension cap", move |r| r.iter().sum::<usize>() <= max_d)
}

prop_compose! {
    fn spec(max_d: usize)(r in degrees(max_d))(
        alpha in prop::collection::vec(-2.0f64..1.0, r.len()),
        width in prop::collection::vec(0.05f64..2.0, r.len()),
        x0 in prop::collection::vec(-1.0f64..1.0, r.iter().sum::<usize>()),
        t in 0.1f64..2.5,
        r in Just(r),
    ) -> ReachSpec {
        let beta = alpha.iter().zip(&width).map(|(a, w)| a + w).collect();
        ReachSpec::new(&r, alpha, beta, x0, t).unwrap()
    }
}

fn direction(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, d).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transition_is_a_semigroup(r in degrees(6), a in 0.0f64..2.0, b in 0.0f64..2.0) {
        let sys = build_system(&RelativeDegree::new(&r).unwrap());
        let lhs = &state_transition(&sys, a).unwrap() * &state_transition(&sys, b).unwrap();
        let rhs = state_transition(&sys, a + b).unwrap();
        for (x, y) in lhs.to_rows().iter().flatten().zip(rhs.to_rows().iter().flatten()) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn zeta_is_additive(s in spec(6), f in 0.0f64..1.0) {
        let mid = f * s.t;
        let a = zeta(&s, 0.0, mid, false).unwrap();
        let b = zeta(&s, mid, s.t, false).unwrap();
        let whole = zeta(&s, 0.0, s.t, false).unwrap();
        for k in 0..s.d() {
            prop_assert!((a[k] + b[k] - whole[k]).abs() <= 1e-12 * (1.0 + whole[k].abs()));
        }
    }

    #[test]
    fn support_matches_quadrature(s in spec(6), y in direction(6)) {
        let y = &y[..s.d()];
        let mut want = 0.0;
        for j in 0..s.m() {
            let b = s.block(j);
            want += support_block_quad(&y[b.clone()], &s.x0[b], s.input.alpha()[j], s.input.beta()[j], s.t);
        }
        let got = support_box(&s, y).unwrap().value;
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }

    #[test]
    fn support_is_sublinear(s in spec(6), y1 in direction(6), y2 in direction(6), lam in 0.1f64..5.0) {
        let (y1, y2) = (&y1[..s.d()], &y2[..s.d()]);
        let h = |y: &[f64]| support_box(&s, y).unwrap().value;
        let scale = 1.0 + h(y1).abs() + h(y2).abs();
        let ly: Vec<f64> = y1.iter().map(|v| lam * v).collect();
        prop_assert!((h(&ly) - lam * h(y1)).abs() <= 1e-12 * lam * scale);
        let sum: Vec<f64> = y1.iter().zip(y2).map(|(a, b)| a + b).collect();
        prop_assert!(h(&sum) <= h(y1) + h(y2) + 1e-12 * scale);
    }

    #[test]
    fn volume_is_a_product_and_translation_invariant(s in spec(6), shift in prop::collection::vec(-3.0f64..3.0, 6)) {
        let v = volume(&s);
        let parts: f64 = block_volumes(&s).iter().product();
        prop_assert!((v - parts).abs() <= 1e-13 * v);
        let moved = s.with_x0(shift[..s.d()].to_vec()).unwrap();
        prop_assert_eq!(volume(&moved), v);
        prop_assert_eq!(diameter(&moved).value, diameter(&s).value);
    }

    #[test]
    fn size_grows_with_horizon(s in spec(6), f in 1.01f64..2.0) {
        let later = s.with_t(s.t * f).unwrap();
        prop_assert!(volume(&later) > volume(&s));
        prop_assert!(diameter(&later).value > diameter(&s).value);
    }

    #[test]
    fn diameter_dominates_widths(s in spec(6), eta in direction(6)) {
        let d = diameter(&s);
        let w = width(&s, &eta[..s.d()]).unwrap().value;
        prop_assert!(w <= d.value * (1.0 + 1e-12));
        let dir = d.direction.unwrap();
        prop_assert!((width(&s, &dir).unwrap().value - d.value).abs() <= 1e-10 * d.value);
        let norm: f64 = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diameter_matches_partial_sums(d in 1usize..25, t in 0.1f64..3.0) {
        let got = diameter(&ReachSpec::symmetric(&[d], &[1.0], t).unwrap()).value;
        let want = 2.0 * (1..=d).map(|j| (t.powi(j as i32) / fact(j as u64)).powi(2)).sum::<f64>().sqrt();
        prop_assert!((got - want).abs() <= 1e-13 * want);
    }

    #[test]
    fn outer_pad_contains(s in spec(4), y in direction(4), n in 4usize..40) {
        prop_assume!(n >= s.d());
        let z = zonotope_approximant(&s, n, ApproxMode::OuterPad).unwrap();
        let y = &y[..s.d()];
        prop_assert!(support_box(&s, y).unwrap().value <= z.support(y) + 1e-12);
    }

    #[test]
    fn boundary_samples_classify_as_boundary(r in 2usize..=3, t in 0.3f64..2.0, lo in -1.0f64..0.0, w in 0.2f64..2.0) {
        let s = ReachSpec::new(&[r], vec![lo], vec![lo + w], vec![0.1; r], t).unwrap();
        for (_, p) in sample_boundary(&s, 0, 4).unwrap() {
            prop_assert_eq!(contains(&s, &p, 1e-7).unwrap(), Membership::Boundary);
        }
    }

    #[test]
    fn polynomial_json_round_trips(coeffs in prop::collection::vec((0u32..4, 0u32..4, -50i64..50, 1i64..9), 0..6)) {
        let vars = MultiPoly::var_names("x", 2);
        let p = MultiPoly::from_terms(&vars, coeffs.iter().map(|&(a, b, n, d)| (vec![a, b], q(n, d)))).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        prop_assert_eq!(serde_json::from_str::<MultiPoly>(&text).unwrap(), p);
    }

    #[test]
    fn real_root_counts_match_constructed_roots(roots in prop::collection::btree_set(-20i64..20, 1..6)) {
        let rs: Vec<_> = roots.iter().map(|&k| q(k, 3)).collect();
        let p = RatPoly::from_roots(&rs);
        let found = all_real_roots(&p, 1e-12);
        prop_assert_eq!(found.len(), rs.len());
        for (f, r) in found.iter().zip(roots.iter()) {
            prop_assert!((f.value - *r as f64 / 3.0).abs() < 1e-9);
        }
    }
}

#[test]
fn zonotope_error_halves_with_n() {
    let s = ReachSpec::symmetric(&[2], &[1.0], 1.0).unwrap();
    let exact = volume(&s);
    let err = |n| (zonotope_volume(&zonotope_approximant(&s, n, ApproxMode::InnerSample).unwrap()).value - exact).abs();
    for n in [256, 512, 1024, 2048] {
        let ratio = err(2 * n) / err(n);
        assert!((0.4..=0.6).contains(&ratio), "n={n}: {ratio}");
    }
}
