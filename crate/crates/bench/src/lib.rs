//! Fixtures shared by the benchmarks.

use padic_hausdorff::harness::suites::generate;
use padic_hausdorff::{ConstantId, KernelSpec, MatrixFamily, Prime, RadialFunction, Scenario, ShellRange};

pub const SEED: u64 = 7;

pub fn scenarios(id: ConstantId, count: usize) -> Vec<Scenario> {
    generate(id, SEED, count, "bench").expect("scenario draw")
}

/// A kernel on `width` shells and `m` power-log inputs on `Q_p^n`.
pub fn operator_case(p: u64, n: u32, m: usize, width: i64) -> (KernelSpec, Vec<MatrixFamily>, Vec<RadialFunction>) {
    let p = Prime::new(p).expect("prime");
    let phi = RadialFunction::power_on(p, -0.25, ShellRange::finite(-width / 2, width - width / 2));
    let kernel = KernelSpec::new(phi, n).expect("kernel");
    let fams = (0..m).map(|i| MatrixFamily::scalar_radial([1, 2, -1][i % 3], i as i64 % 2)).collect();
    let fs =
        (0..m)
            .map(|i| {
                RadialFunction::power_on(p, -0.5 + 0.25 * i as f64, ShellRange::finite(-10, 10))
                    .add(&RadialFunction::term(p, 1.0, 0.0, 1, ShellRange::at_most(0)))
            })
            .collect();
    (kernel, fams, fs)
}
