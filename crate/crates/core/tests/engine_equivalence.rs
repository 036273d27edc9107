use uqc_core::amtc::transform;
use uqc_core::dsl::builtin_model;
use uqc_core::engine::{evaluate_amtc, evaluate_naive, EvalOptions};
use uqc_core::quadrature::uniform_order_grid;

fn rel_eq(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

#[test]
fn engines_agree_where_defined() {
    let opts = EvalOptions::default();
    for name in ["simple", "piston", "multipoint"] {
        let g = builtin_model(name).unwrap();
        let tg = transform(&g).unwrap();
        for k in 2..=7 {
            let grid = uniform_order_grid(&g.distributions(), k).unwrap();
            match (evaluate_naive(&g, &grid, &opts), evaluate_amtc(&tg, &grid, &opts)) {
                (Ok(n), Ok(a)) => {
                    for (key, t) in &n.outputs {
                        let u = &a.outputs[key];
                        assert_eq!(t.len(), u.len());
                        assert!(t.data.iter().zip(&u.data).all(|(x, y)| rel_eq(*x, *y)), "{name} k={k}");
                    }
                    assert!(a.total_scalar_evals <= n.total_scalar_evals);
                }
                // Both engines must reject the same grids.
                (Err(_), Err(_)) => assert_eq!(name, "piston", "unexpected failure on {name} k={k}"),
                (n, a) => panic!("{name} k={k}: engines disagree on success: {:?} / {:?}", n.err(), a.err()),
            }
        }
    }
}

#[test]
fn multipoint_reduction_grows() {
    let g = builtin_model("multipoint").unwrap();
    let tg = transform(&g).unwrap();
    let mut last = 0.0;
    for k in 3..=7 {
        let grid = uniform_order_grid(&g.distributions(), k).unwrap();
        let a = evaluate_amtc(&tg, &grid, &EvalOptions::default()).unwrap();
        assert_eq!(a.total_scalar_evals, 40 * k + k * k);
        let r = 1.0 - a.total_scalar_evals as f64 / (41 * k * k) as f64;
        assert!(r >= last);
        last = r;
    }
}
