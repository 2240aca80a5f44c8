use proptest::prelude::*;

use padic_hausdorff::weights::muckenhoupt::{a1_constant_power, ap_constant_power, critical_index_estimate};
use padic_hausdorff::weights::norms::{cmo_norm, lebesgue_norm, morrey_norm};
use padic_hausdorff::{ExtendedValue, Prime, RadialFunction, RadialTerm, Region, ShellRange, Weight};

fn primes() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5]).prop_map(|p| Prime::new(p).unwrap())
}

fn piecewise(p: Prime) -> impl Strategy<Value = RadialFunction> {
    prop::collection::vec((-3.0f64..3.0, -1.5f64..1.5, 0u32..=1, -6i64..=3, 0i64..=5), 1..4).prop_map(move |ts| {
        let terms =
            ts.into_iter().map(|(c, e, k, a, len)| RadialTerm::new(c, e, k, ShellRange::finite(a, a + len))).collect();
        RadialFunction::new(p, terms)
    })
}

fn with_function() -> impl Strategy<Value = (Prime, RadialFunction)> {
    primes().prop_flat_map(|p| (Just(p), piecewise(p)))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #[test]
    fn lebesgue_norm_is_homogeneous(
        (p, f) in with_function(),
        n in 1u32..=2,
        alpha in -0.9f64..2.0,
        q in 1.0f64..5.0,
        c in -4.0f64..4.0,
    ) {
        let w = Weight::power(p, n, alpha * n as f64).unwrap();
        let a = lebesgue_norm(&f.scale(&c), &w, q, Region::All).unwrap().to_f64();
        let b = lebesgue_norm(&f, &w, q, Region::All).unwrap().to_f64();
        prop_assert!(close(a, c.abs() * b, 1e-13), "{a} vs {}", c.abs() * b);
    }

    #[test]
    fn morrey_eigenfunction_is_scale_free(
        p in primes(),
        n in 1u32..=2,
        alpha in -0.9f64..2.0,
        q in 1.1f64..5.0,
        t in 0.05f64..0.95,
    ) {
        let nf = n as f64;
        let alpha = alpha * nf;
        let lambda = -t / q;
        let w = Weight::power(p, n, alpha).unwrap();
        let g = RadialFunction::power(p, (alpha + nf) * lambda);
        let at = |k: i64| {
            let local = lebesgue_norm(&g, &w, q, Region::Ball(k)).unwrap().to_f64();
            w.ball_mass(k).to_f64().powf(-(1.0 / q + lambda)) * local
        };
        let base = at(0);
        for k in -20..=20 {
            prop_assert!(close(at(k), base, 1e-12), "shell {k}: {} vs {base}", at(k));
        }
        let m = morrey_norm(&g, &w, q, lambda, ShellRange::finite(-20, 20)).unwrap();
        prop_assert!(close(m.value.to_f64(), base, 1e-12));
    }

    #[test]
    fn cmo_ignores_constants(
        (p, b) in with_function(),
        n in 1u32..=2,
        alpha in -0.5f64..1.0,
        r in 1.0f64..4.0,
        c in -5.0f64..5.0,
    ) {
        let w = Weight::power(p, n, alpha).unwrap();
        let window = ShellRange::finite(-8, 8);
        let konst = RadialFunction::constant(p, c);
        prop_assert_eq!(cmo_norm(&konst, &w, r, window).unwrap().value, ExtendedValue::ZERO);
        let a = cmo_norm(&b, &w, r, window).unwrap().value.to_f64();
        let shifted = cmo_norm(&b.add(&konst), &w, r, window).unwrap().value.to_f64();
        prop_assert!(close(a, shifted, 1e-9), "{a} vs {shifted}");
    }
}

#[test]
fn a1_membership_of_power_weights() {
    let window = |w: i64| ShellRange::finite(-w, w);
    for (p, n) in [(2u64, 1u32), (3, 2)] {
        let p = Prime::new(p).unwrap();
        let nf = n as f64;
        for alpha in [-nf + 0.1, -nf / 2.0, 0.0] {
            let a = a1_constant_power(p, n, alpha, window(20)).unwrap();
            let b = a1_constant_power(p, n, alpha, window(40)).unwrap();
            assert!(a.is_finite() && close(a.to_f64(), b.to_f64(), 0.01), "alpha {alpha}: {a:?} {b:?}");
        }
        for alpha in [-nf - 0.1, 0.1, 0.5] {
            let a = a1_constant_power(p, n, alpha, window(20)).unwrap();
            let b = a1_constant_power(p, n, alpha, window(40)).unwrap();
            assert!(b.is_divergent() || b.to_f64() >= 10.0 * a.to_f64(), "alpha {alpha}: {a:?} {b:?}");
        }
    }
}

#[test]
fn muckenhoupt_classes_are_nested() {
    let window = ShellRange::finite(-20, 20);
    for (p, n) in [(2u64, 1u32), (5, 2)] {
        let p = Prime::new(p).unwrap();
        let nf = n as f64;
        for k in 0..12 {
            let alpha = -nf - 0.5 + 0.5 * k as f64;
            for (l, q) in [(1.5, 2.0), (2.0, 3.0), (1.2, 4.0)] {
                let a = ap_constant_power(p, n, alpha, l, window).unwrap();
                let b = ap_constant_power(p, n, alpha, q, window).unwrap();
                if a.is_finite() {
                    assert!(b.is_finite(), "alpha {alpha} in A_{l} but not A_{q}");
                    assert!(b.to_f64() <= a.to_f64() * (1.0 + 1e-12));
                }
            }
        }
    }
}

#[test]
fn critical_index_of_negative_powers() {
    // |x|^a with -n < a < 0 is in RH_r exactly for r < -n/a
    let p = Prime::new(2).unwrap();
    for (n, a) in [(1u32, -0.5), (2, -0.5), (1, -0.25)] {
        let w = Weight::power(p, n, a).unwrap();
        let r = critical_index_estimate(&w, ShellRange::finite(-20, 20), 1e-6).unwrap();
        let expected = -(n as f64) / a;
        assert!((r - expected).abs() < 1e-4, "n={n}, a={a}: {r} vs {expected}");
    }
}

#[test]
fn positive_powers_are_in_every_reverse_holder_class() {
    let window = ShellRange::finite(-40, 40);
    for (p, n, a) in [(3u64, 2u32, 0.5), (2, 1, 1.0), (5, 1, 2.0)] {
        let w = Weight::power(Prime::new(p).unwrap(), n, a).unwrap();
        let r = critical_index_estimate(&w, window, 1e-6).unwrap();
        assert!(r.is_infinite(), "p={p}, n={n}, a={a}: {r}");
    }
}
