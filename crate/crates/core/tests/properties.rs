//! Property-based invariants over random fields and parameters.

use std::sync::Arc;

use proptest::prelude::*;

use wellpde::domain::{make_grid, Params, RadialField};
use wellpde::functionals::{decomposition_residual, evaluate};
use wellpde::nehari::{classify, default_tol, fiber_scale};

fn params_strategy() -> impl Strategy<Value = Params> {
    (3u32..6, 0.0f64..2.0).prop_flat_map(|(n, s)| {
        // p strictly below N, then q strictly inside (p, Np/(N-p)).
        (Just(n), Just(s), 2.0f64..(n as f64 - 0.1)).prop_flat_map(|(n, s, p)| {
            let crit = (n as f64) * p / ((n as f64) - p);
            let hi = (crit - 0.05).max(p + 0.2);
            (Just(n), Just(s), Just(p), (p + 0.1)..hi)
                .prop_map(move |(n, s, p, q)| {
                    Params::new(p, q.min(crit - 1e-3), n, s, 1.0).unwrap()
                })
        })
    })
}

fn field_strategy(cells: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, cells)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decomposition_identity_holds(params in params_strategy(), values in field_strategy(24)) {
        let grid = Arc::new(make_grid(&params, 24).unwrap());
        let u = RadialField::new(grid, values);
        let rep = evaluate(&u, &params);
        let res = decomposition_residual(&rep, &params);
        prop_assert!(res <= 1e-12 * (1.0 + rep.j.abs()), "residual {}", res);
    }

    #[test]
    fn classification_is_even(params in params_strategy(), values in field_strategy(24)) {
        let grid = Arc::new(make_grid(&params, 24).unwrap());
        let u = RadialField::new(Arc::clone(&grid), values);
        let rep = evaluate(&u, &params);
        let tol = default_tol(rep.grad_p);
        let a = classify(&u, &params, 1.0, tol);
        let b = classify(&u.scaled(-1.0), &params, 1.0, tol);
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn fiber_scale_homogeneity(params in params_strategy(), values in field_strategy(24), c in 0.2f64..5.0) {
        let grid = Arc::new(make_grid(&params, 24).unwrap());
        let u = RadialField::new(grid, values);
        prop_assume!(!u.is_zero());
        if let Ok(lambda) = fiber_scale(&u, &params) {
            if let Ok(scaled) = fiber_scale(&u.scaled(c), &params) {
                prop_assert!((scaled - lambda / c).abs() <= 1e-6 * (lambda / c),
                    "lambda {} vs {}", scaled, lambda / c);
            }
        }
    }
}
