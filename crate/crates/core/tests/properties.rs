use poisson_american::config::ProblemConfig;
use poisson_american::fluct::FluctContext;
use poisson_american::scale::ScaleFunction;
use poisson_american::{Jump, LevyModel, OptionKind, PricingProblem, PutEngine, Side};
use proptest::prelude::*;

fn side() -> impl Strategy<Value = Side> {
    prop_oneof![Just(Side::SpectrallyNegative), Just(Side::SpectrallyPositive)]
}

prop_compose! {
    fn model()(side in side(), c in -1.0..1.5f64, eta in 0.05..0.6f64,
               jumps in prop::collection::vec((0.1..3.0f64, 0.5..12.0f64), 1..3)) -> LevyModel {
        let jumps = jumps.into_iter().map(|(alpha, beta)| Jump { alpha, beta }).collect();
        LevyModel::new(side, c, eta, jumps).unwrap()
    }
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_inverts_psi(m in model(), q in 0.001..3.0f64) {
        let p = m.phi(q).unwrap();
        prop_assert!(close(m.psi(p).unwrap(), q, 1e-10));
        prop_assert!(m.psi_prime(p).unwrap() > 0.0);
    }

    #[test]
    fn esscher_shifts_the_exponent(m in model(), theta in 0.0..0.4f64, s in -0.3..2.0f64) {
        let t = m.esscher(theta).unwrap();
        let lhs = t.psi(s).unwrap();
        let rhs = m.psi(s + theta).unwrap() - m.psi(theta).unwrap();
        prop_assert!(close(lhs, rhs, 1e-10), "{lhs} vs {rhs}");
    }

    #[test]
    fn scale_function_is_nondecreasing(m in model(), q in 0.0..2.0f64) {
        // W grows like e^{Phi(q) x}; stay inside the overflow guard
        prop_assume!(m.phi(q).unwrap() * 6.0 < 600.0);
        let w = ScaleFunction::new(&m, q).unwrap();
        let mut prev = w.w(0.0).unwrap();
        // eta > 0, so W(0) = 0
        prop_assert!(prev.abs() < 1e-10, "W(0) = {prev}");
        for i in 1..60 {
            let cur = w.w(i as f64 * 0.1).unwrap();
            prop_assert!(cur >= prev * (1.0 - 1e-12), "x = {}: {cur} < {prev}", i as f64 * 0.1);
            prev = cur;
        }
    }

    #[test]
    fn split_forms_reassemble(m in model(), q in 0.01..1.0f64, lambda in 0.2..5.0f64,
                              d in 0.05..4.0f64, theta in -1.0..1.0f64) {
        let ctx = FluctContext::new(&m, q, lambda).unwrap();
        let delta = ctx.dominant().delta;
        let grow = (delta * d).exp();
        let s = ctx.m_split(d, theta).unwrap();
        let direct = ctx.m_fun(d, theta).unwrap();
        prop_assert!(close(s.lead * grow + s.rest, direct, 1e-8), "M: {} vs {direct}", s.lead * grow + s.rest);
        let s = ctx.n_split(d).unwrap();
        let direct = ctx.n_fun(d).unwrap();
        prop_assert!(close(s.lead * grow + s.rest, direct, 1e-8), "N: {} vs {direct}", s.lead * grow + s.rest);
    }

    #[test]
    fn h_forms_agree(c in 0.2..1.5f64, eta in 0.1..0.4f64, beta in 1.0..5.0f64,
                     lambda in 0.2..4.0f64, l in -1.0..3.0f64, d in 0.1..2.0f64) {
        let m = LevyModel::new(Side::SpectrallyNegative, c, eta, vec![Jump { alpha: 1.0, beta }]).unwrap();
        let p = PricingProblem::new(m, 50.0, -0.05, lambda, OptionKind::Put);
        let Ok(e) = PutEngine::new(&p) else { return Ok(()) };
        let a = e.h_fun(l, l + d, 1.0).unwrap();
        let b = e.h_fun_via_m(l, l + d, 1.0).unwrap();
        prop_assert!(close(a, b, 1e-8), "{a} vs {b}");
    }

    #[test]
    fn config_round_trips(c in -1.0..1.5f64, eta in 0.0..0.6f64, alpha in 0.1..3.0f64, beta in 0.5..12.0f64,
                          k in 1.0..500.0f64, r in -0.2..0.2f64, lambda in 0.05..50.0f64, call in any::<bool>()) {
        let text = serde_json::json!({
            "model": {"side": "SN", "c": c, "eta": eta, "jumps": [{"alpha": alpha, "beta": beta}]},
            "K": k, "r": r, "lambda": lambda, "option": if call { "call" } else { "put" },
        })
        .to_string();
        let cfg = ProblemConfig::from_json_str(&text).unwrap();
        let again = ProblemConfig::from_json_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        prop_assert_eq!(again, cfg);
    }
}
