use proptest::prelude::*;

use shearfree::burgers::{BurgersSolution, Coefficient, Forcing, Region};
use shearfree::cli::expr::parse_expression;
use shearfree::klein::{
    alpha_trace_on_beta_plane, beta_trace_on_alpha_plane, flag_from_slopes, geodesic_chart_line, infinity,
    null_direction, null_separation, plucker_embed, quadratic_form, scri_intersection, scri_point, ChartPoint,
};
use shearfree::projlin::{contains, join, meet, span_canonical, Subspace, DEFAULT_TOL};
use shearfree::Error;

fn vec4() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(-1.0..1.0f64)
}

fn slope() -> impl Strategy<Value = f64> {
    (0.1..2.0f64, any::<bool>()).prop_map(|(m, neg)| if neg { -m } else { m })
}

fn plane(a: [f64; 4], b: [f64; 4]) -> Option<Subspace<4>> {
    span_canonical(&[a, b], DEFAULT_TOL).ok().filter(|p| p.dim() == 2)
}

fn expression() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (0.0..100.0f64).prop_map(|v| format!("{v:?}")),
        (1u32..1000).prop_map(|v| v.to_string()),
        prop::sample::select(vec!["u", "x", "y", "p"]).prop_map(String::from),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/", "^"]), inner.clone())
                .prop_map(|(a, op, b)| format!("{a} {op} {b}")),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.clone().prop_map(|a| format!("({a})")),
            (prop::sample::select(vec!["sin", "cos", "tanh", "exp", "log", "sqrt", "abs"]), inner)
                .prop_map(|(f, a)| format!("{f}({a})")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_idempotent(rows in prop::collection::vec(vec4(), 1..4)) {
        let s = span_canonical(&rows, DEFAULT_TOL).unwrap();
        let again = span_canonical(s.basis(), DEFAULT_TOL).unwrap();
        prop_assert_eq!(s.dim(), again.dim());
        for (a, b) in s.basis().iter().zip(again.basis()) {
            for i in 0..4 {
                prop_assert!((a[i] - b[i]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn meet_and_join_dimensions_add_up(
        a in prop::collection::vec(vec4(), 1..4),
        b in prop::collection::vec(vec4(), 1..4),
        share in any::<bool>(),
    ) {
        let mut b = b;
        if share {
            b[0] = a[0];
        }
        let (u, v) = (span_canonical(&a, DEFAULT_TOL).unwrap(), span_canonical(&b, DEFAULT_TOL).unwrap());
        prop_assert_eq!(u.dim() + v.dim(), meet(&u, &v).dim() + join(&u, &v).dim());
    }

    #[test]
    fn plucker_vectors_lie_on_the_quadric(a in vec4(), b in vec4()) {
        if let Some(p) = plane(a, b) {
            prop_assert!(plucker_embed(&p).unwrap().relation_residual().abs() <= 1e-12);
        }
    }

    #[test]
    fn null_separation_detects_meets(a in vec4(), b in vec4(), c in vec4(), shared in any::<bool>()) {
        let first = if shared { a } else { c };
        if let (Some(p), Some(q)) = (plane(a, b), plane(first, c.map(|v| -v * 0.5 + 0.3))) {
            let zero = null_separation(&p, &q).unwrap().abs() <= 1e-10;
            prop_assert_eq!(zero, meet(&p, &q).dim() > 0);
        }
    }

    #[test]
    fn null_directions_are_null(s in prop::array::uniform2(-2.0..2.0f64), t in prop::array::uniform2(-2.0..2.0f64)) {
        prop_assume!(s[0].abs().max(s[1].abs()) > 1e-3 && t[0].abs().max(t[1].abs()) > 1e-3);
        prop_assert_eq!(quadratic_form(&null_direction(s, t)), 0.0);
    }

    #[test]
    fn conformal_zero_set_is_null_separation(x in vec4(), s in prop::array::uniform2(-1.0..1.0f64), t in prop::array::uniform2(-1.0..1.0f64), d in vec4()) {
        prop_assume!(s[0].abs().max(s[1].abs()) > 0.1 && t[0].abs().max(t[1].abs()) > 0.1);
        let p = ChartPoint::from_vec(x).plane();
        let n = null_direction(s, t);
        let along = ChartPoint::from_vec([0, 1, 2, 3].map(|i| x[i] + n[i])).plane();
        prop_assert!(null_separation(&p, &along).unwrap().abs() <= 1e-12);
        let q = ChartPoint::from_vec([0, 1, 2, 3].map(|i| x[i] + d[i]));
        let gap = quadratic_form(&d);
        prop_assume!(gap.abs() > 1e-3);
        prop_assert!(null_separation(&p, &q.plane()).unwrap().abs() > 1e-8);
    }

    #[test]
    fn slopes_return_to_their_scri_point(
        u in -2.0..2.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64, l in slope(), m in slope(),
    ) {
        let back = scri_intersection(&flag_from_slopes(&scri_point(u, x, y), l, m).unwrap()).unwrap();
        prop_assert!((back.u - u).abs() <= 1e-10 && (back.x - x).abs() <= 1e-10 && (back.y - y).abs() <= 1e-10);
    }

    #[test]
    fn flat_solutions_are_constant_on_characteristics(a in 0.0..1.0f64, b in -1.0..1.0f64, x0 in -1.0..1.0f64, u in 0.0..2.0f64) {
        let sol = BurgersSolution::flat(move |x| a * x.tanh() + b, (-8.0, 8.0), 801).unwrap();
        let l0 = a * x0.tanh() + b;
        let l = sol.eval(u, x0 + l0 * u).unwrap();
        prop_assert!((l - l0).abs() <= 1e-9, "L = {l}, L0 = {l0}");
    }

    #[test]
    fn flat_solutions_solve_burgers(a in 0.0..1.0f64, b in -1.0..1.0f64, x in -1.0..1.0f64, u in 0.1..1.5f64) {
        let sol = BurgersSolution::flat(move |x| a * x.tanh() + b, (-8.0, 8.0), 801).unwrap();
        prop_assert!(sol.residual(u, x, 1e-3).unwrap().abs() <= 1e-5);
    }

    #[test]
    fn compressive_data_breaks_at_the_steepest_slope(a in 0.5..2.0f64) {
        let sol = BurgersSolution::flat(move |x| -a * x, (-2.0, 2.0), 401).unwrap();
        let c = sol.caustic_detect(Region { u_min: 0.0, u_max: 3.0, steps: 64 }).unwrap().unwrap();
        prop_assert!((c.u - 1.0 / a).abs() <= 1e-6);
    }

    #[test]
    fn forcing_is_cubic_in_the_slope(c in prop::array::uniform4(-1.0..1.0f64), u in -1.0..1.0f64, z in -1.0..1.0f64, p in -1.0..1.0f64) {
        let f = Forcing::cubic(c);
        let d4 = [1.0, -4.0, 6.0, -4.0, 1.0].iter().enumerate().map(|(k, w)| w * f.sigma(u, z, p + k as f64 * 0.5)).sum::<f64>();
        prop_assert!(d4.abs() <= 1e-12);
    }

    #[test]
    fn quartic_coefficients_are_rejected(q in -1.0..1.0f64) {
        let coeffs = vec![Coefficient::Const(0.1), Coefficient::Zero, Coefficient::Zero, Coefficient::Zero, Coefficient::Const(q)];
        match Forcing::from_polynomial(coeffs) {
            Ok(_) => prop_assert_eq!(q, 0.0),
            Err(e) => {
                let quartic = matches!(e, Error::QuarticForcing { degree: 4 });
                prop_assert!(quartic);
            }
        }
    }

    #[test]
    fn printing_and_parsing_agree(src in expression()) {
        let e = parse_expression(&src).unwrap();
        let printed = e.to_string();
        let again = parse_expression(&printed).unwrap();
        prop_assert_eq!(&e, &again);
        prop_assert_eq!(printed, again.to_string());
    }

    #[test]
    fn nested_spans_form_complete_flags(rows in prop::array::uniform4(vec4())) {
        let spans: Vec<_> = (1..=4).map(|k| span_canonical(&rows[..k], DEFAULT_TOL).unwrap()).collect();
        for i in 0..4 {
            for j in i..4 {
                prop_assert!(contains(&spans[j], &spans[i]));
            }
        }
    }

    #[test]
    fn join_with_a_contained_meet_is_the_larger_space(a in vec4(), b in vec4(), c in vec4()) {
        let u = span_canonical(&[a, b], DEFAULT_TOL).unwrap();
        let v = span_canonical(&[a, c], DEFAULT_TOL).unwrap();
        let m = meet(&u, &v);
        prop_assume!(m.dim() > 0);
        let j = join(&m, &v);
        prop_assert!(contains(&j, &v) && contains(&v, &j));
    }

    #[test]
    fn flags_from_slopes_sandwich_their_scri_point(
        u in -2.0..2.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64, l in slope(), m in slope(),
    ) {
        let p = scri_point(u, x, y);
        let flag = flag_from_slopes(&p, l, m).unwrap();
        prop_assert!(contains(p.plane(), flag.v1()) && contains(flag.v3(), p.plane()));
        prop_assert!(null_separation(p.plane(), &infinity()).unwrap().abs() <= 1e-12);
        let line = geodesic_chart_line(&flag).unwrap();
        prop_assert_eq!(quadratic_form(&line.direction), 0.0);
    }

    #[test]
    fn traces_stay_incident(u in -2.0..2.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64, l in slope(), m in slope(), s in -2.0..2.0f64) {
        let flag = flag_from_slopes(&scri_point(u, x, y), l, m).unwrap();
        let (x0, ll) = alpha_trace_on_beta_plane(flag.v1(), y).unwrap();
        prop_assert!((x0 + ll * u - x).abs() <= 1e-10 && (ll - l).abs() <= 1e-10);
        prop_assert!(contains(scri_point(s, x0 + ll * s, y).plane(), flag.v1()));
        let (y0, mm) = beta_trace_on_alpha_plane(flag.v3(), x).unwrap();
        prop_assert!((y0 + mm * u - y).abs() <= 1e-10 && (mm - m).abs() <= 1e-10);
        prop_assert!(contains(flag.v3(), scri_point(s, x, y0 + mm * s).plane()));
    }

    #[test]
    fn flags_sharing_v1_lie_in_one_alpha_plane(
        u in -1.0..1.0f64, x in -1.0..1.0f64, y in -1.0..1.0f64, l in slope(), m1 in slope(), m2 in slope(), t in -2.0..2.0f64,
    ) {
        let p = scri_point(u, x, y);
        let (f1, f2) = (flag_from_slopes(&p, l, m1).unwrap(), flag_from_slopes(&p, l, m2).unwrap());
        let v = f1.v1().basis()[0];
        for f in [&f1, &f2] {
            let plane = geodesic_chart_line(f).unwrap().at(t).plane();
            prop_assert!(plane.residual(&v) <= 1e-9, "residual {}", plane.residual(&v));
        }
    }
}
