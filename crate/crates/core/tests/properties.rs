use proptest::prelude::*;

use lwnls::energy::evaluate_i;
use lwnls::nehari::nehari_project;
use lwnls::problem::Expr;
use lwnls::rearrange::{center_out_order, polya_szego_check, rearrange, rearrangement_report, LP_EXPONENTS};
use lwnls::spaces::{seminorm_alpha_sq, seminorm_alpha_sq_physical};
use lwnls::spectral::{forward_transform, l2_dot};
use lwnls::{Field, FractionalOrder, Grid, Nonlinearity, Potential, Problem};

const N: usize = 64;

fn grid() -> Grid {
    Grid::new(8.0, N).unwrap()
}

fn field() -> impl Strategy<Value = Field> {
    prop::collection::vec(-2.0..2.0f64, N).prop_map(|v| Field::new(&grid(), v).unwrap())
}

fn positive_part_field() -> impl Strategy<Value = Field> {
    field().prop_filter("needs a positive part", |u| u.values().iter().any(|&x| x > 1e-3))
}

fn order() -> impl Strategy<Value = FractionalOrder> {
    (0.51..=1.0f64).prop_map(|a| FractionalOrder::new(a).unwrap())
}

fn cubic(a: FractionalOrder) -> Problem {
    Problem::new(
        a,
        grid(),
        Nonlinearity::power(3.0, 3.5).unwrap(),
        Potential::constant(1.0),
    )
}

proptest! {
    #[test]
    fn transform_round_trip(u in field()) {
        let g = grid();
        let back = g.inverse_real(&forward_transform(&u));
        for (a, b) in back.iter().zip(u.values()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn parseval(u in field()) {
        let g = grid();
        let freq = forward_transform(&u).iter().map(|c| c.norm_sqr()).sum::<f64>() / (2.0 * g.half_length());
        let phys = l2_dot(&u, &u);
        prop_assert!((freq - phys).abs() <= 1e-12 * phys.max(1e-300));
    }

    #[test]
    fn seminorm_sides_agree_and_scale(u in field(), a in order(), lambda in -5.0..5.0f64) {
        let f = seminorm_alpha_sq(&u, a);
        let p = seminorm_alpha_sq_physical(&u, a);
        prop_assert!(f >= 0.0);
        prop_assert!((f - p).abs() <= 1e-9 * f.max(1e-12));
        let scaled = seminorm_alpha_sq(&u.scaled(lambda), a);
        prop_assert!((scaled - lambda * lambda * f).abs() <= 1e-10 * scaled.max(1e-12));
    }

    #[test]
    fn rearrangement_invariants(u in field(), a in order()) {
        let s = rearrange(&u);
        let twice = rearrange(&s);
        prop_assert_eq!(twice.values(), s.values());
        let order = center_out_order(N);
        for w in order.windows(2) {
            prop_assert!(s.values()[w[1]] <= s.values()[w[0]]);
        }
        let r = rearrangement_report(&u, None);
        for q in LP_EXPONENTS {
            prop_assert!(r.lp_drift[&q] <= 1e-12);
        }
        if !u.is_zero() {
            prop_assert!(polya_szego_check(&u, a).unwrap().holds);
        }
    }

    #[test]
    fn nehari_ray_invariance_and_max(u in positive_part_field(), lambda in 0.1..10.0f64, t in 0.05..3.0f64) {
        let p = cubic(FractionalOrder::new(0.75).unwrap());
        let r = nehari_project(&u, &p).unwrap();
        let s = nehari_project(&u.scaled(lambda), &p).unwrap();
        prop_assert!((s.sigma_u * lambda - r.sigma_u).abs() <= 1e-8 * r.sigma_u);
        let peak = evaluate_i(&r.project(&u), &p).total;
        let other = evaluate_i(&u.scaled(t * r.sigma_u), &p).total;
        prop_assert!(other <= peak + 1e-12 * peak.abs());
    }

    #[test]
    fn expression_parser_never_panics(src in "[-+*/^()a-z0-9. ]{0,24}") {
        if let Ok(e) = Expr::parse(&src) {
            let _ = e.eval(0.5);
        }
    }
}
