use proptest::prelude::*;

use padic_hausdorff::harness::{compute_constant, verify_bound, ConstantId, Scenario};
use padic_hausdorff::weights::norms::lebesgue_norm;
use padic_hausdorff::{
    hausdorff_apply, maximal, maximal_mod, KernelSpec, MatrixFamily, Prime, RadialFunction, RadialTerm, Region,
    ShellRange, Weight,
};

fn primes() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5]).prop_map(|p| Prime::new(p).unwrap())
}

fn piecewise(p: Prime, sign: f64) -> impl Strategy<Value = RadialFunction> {
    prop::collection::vec((0.1f64..3.0, -1.0f64..1.0, -6i64..=3, 0i64..=5), 1..4).prop_map(move |ts| {
        let terms = ts
            .into_iter()
            .map(|(c, e, a, len)| RadialTerm::new(sign * c, e, 0, ShellRange::finite(a, a + len)))
            .collect();
        RadialFunction::new(p, terms)
    })
}

fn kernel(p: Prime) -> impl Strategy<Value = RadialFunction> {
    prop::collection::vec((0.1f64..2.0, -3i64..=3), 1..4).prop_map(move |ts| {
        let terms = ts.into_iter().map(|(c, g)| RadialTerm::new(c, 0.0, 0, ShellRange::single(g))).collect();
        RadialFunction::new(p, terms)
    })
}

fn families(m: usize) -> impl Strategy<Value = Vec<MatrixFamily>> {
    prop::collection::vec((prop::sample::select(vec![-1i64, 1, 2]), -2i64..=2), m)
        .prop_map(|v| v.into_iter().map(|(a, b)| MatrixFamily::scalar_radial(a, b)).collect())
}

#[derive(Debug)]
struct Case {
    k: KernelSpec,
    fams: Vec<MatrixFamily>,
    fs: Vec<RadialFunction>,
    g: RadialFunction,
    c: f64,
}

fn case() -> impl Strategy<Value = Case> {
    (primes(), 1u32..=2, 1usize..=3).prop_flat_map(|(p, n, m)| {
        (kernel(p), families(m), prop::collection::vec(piecewise(p, 1.0), m), piecewise(p, -1.0), -2.0f64..2.0)
            .prop_map(move |(phi, fams, fs, g, c)| Case { k: KernelSpec::new(phi, n).unwrap(), fams, fs, g, c })
    })
}

fn apply(k: &KernelSpec, fams: &[MatrixFamily], fs: &[RadialFunction]) -> RadialFunction {
    let out = hausdorff_apply(k, fams, fs, None).unwrap().into_radial().unwrap();
    assert!(out.exact);
    out.function
}

proptest! {
    #[test]
    fn linear_in_every_slot(case in case(), slot in 0usize..3) {
        let slot = slot % case.fs.len();
        let base = apply(&case.k, &case.fams, &case.fs);
        let mut other = case.fs.clone();
        other[slot] = case.g.clone();
        let side = apply(&case.k, &case.fams, &other);
        let mut mixed = case.fs.clone();
        mixed[slot] = case.fs[slot].add(&case.g.scale(&case.c));
        let lhs = apply(&case.k, &case.fams, &mixed);
        for v in -20..=20 {
            let want = base.value(v) + case.c * side.value(v);
            let got = lhs.value(v);
            prop_assert!((got - want).abs() <= 1e-12 * (base.value(v).abs() + (case.c * side.value(v)).abs()).max(1e-300));
        }
    }

    #[test]
    fn nonnegative_data_give_nonnegative_output(case in case()) {
        let out = apply(&case.k, &case.fams, &case.fs);
        for v in -30..=30 {
            prop_assert!(out.value(v) >= 0.0, "shell {v}: {}", out.value(v));
        }
    }

    #[test]
    fn centered_maximal_is_below_maximal(case in case()) {
        let f = case.fs[0].add(&case.g);
        let n = case.k.dim();
        let (m, mm) = (maximal(&f, n).unwrap(), maximal_mod(&f, n).unwrap());
        for v in -30..=30 {
            if let (Some(a), Some(b)) = (mm.value(v), m.value(v)) {
                prop_assert!(a <= b * (1.0 + 1e-12));
                prop_assert!(b >= f.value(v).abs() * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn single_factor_bound_by_c1(
        (p, phi, f) in primes().prop_flat_map(|p| (Just(p), kernel(p), piecewise(p, 1.0))),
        n in 1u32..=2,
        fam in families(1),
        q in 1.0f64..4.0,
        alpha in -0.8f64..1.5,
    ) {
        let alpha = alpha * n as f64;
        let s = scenario(p, n, phi, fam, q, alpha);
        let c1 = compute_constant(ConstantId::C1, &s).unwrap().value.to_f64();
        let w = Weight::power(p, n, alpha).unwrap();
        let hf = apply(&s.kernel, &s.families, std::slice::from_ref(&f));
        let lhs = lebesgue_norm(&hf, &w, q, Region::All).unwrap().to_f64();
        let rhs = lebesgue_norm(&f, &w, q, Region::All).unwrap().to_f64();
        prop_assert!(lhs <= c1 * rhs * (1.0 + 1e-12), "{lhs} > {c1} * {rhs}");
    }

    #[test]
    fn single_shell_kernel_is_a_scaled_dilation(
        (p, f) in primes().prop_flat_map(|p| (Just(p), piecewise(p, 1.0))),
        n in 1u32..=2,
        fam in families(1),
        q in 1.0f64..4.0,
        alpha in -0.8f64..1.5,
        g in -3i64..=3,
        c in 0.1f64..2.0,
    ) {
        let phi = RadialFunction::term(p, c, 0.0, 0, ShellRange::single(g));
        let s = scenario(p, n, phi, fam, q, alpha * n as f64);
        let rec = verify_bound(ConstantId::C1, &s, &[f]).unwrap();
        prop_assert!((rec.slack.to_f64() - 1.0).abs() <= 1e-10, "slack {:?}", rec.slack);
        prop_assert!(rec.holds);
    }
}

fn scenario(p: Prime, n: u32, phi: RadialFunction, fams: Vec<MatrixFamily>, q: f64, alpha: f64) -> Scenario {
    let mut s = Scenario::from_json(&format!(
        r#"{{"id": "c1", "prime": {}, "dim": {n}, "target": "C1",
            "kernel": [{{"coeff": 1.0, "lo": 0, "hi": 0}}],
            "families": [{{"scalar_radial": {{"slope": 1, "offset": 0}}}}],
            "params": {{"q_i": [{q}], "alpha_i": [{alpha}]}}}}"#,
        p.get()
    ))
    .unwrap();
    s.kernel = KernelSpec::new(phi, n).unwrap();
    s.families = fams;
    s
}
