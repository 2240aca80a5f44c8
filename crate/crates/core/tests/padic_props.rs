use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use padic_hausdorff::padic::{norm, verify_det_bounds};
use padic_hausdorff::radial::sampling::{sample_sphere, shell_rng};
use padic_hausdorff::{MatrixFamily, PAdicMatrix, PAdicVector, PNorm, Prime};

fn primes() -> impl Strategy<Value = Prime> {
    prop::sample::select(vec![2u64, 3, 5, 7]).prop_map(|p| Prime::new(p).unwrap())
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-100_000i64..100_000, 1i64..100_000).prop_map(|(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

fn matrix(n: usize) -> impl Strategy<Value = Vec<Vec<BigRational>>> {
    prop::collection::vec(prop::collection::vec(rational(), n), n)
}

proptest! {
    #[test]
    fn ultrametric_inequality(p in primes(), x in rational(), y in rational()) {
        let (nx, ny) = (norm(&x, p), norm(&y, p));
        let nsum = norm(&(&x + &y), p);
        prop_assert!(nsum <= nx.max(ny));
        if nx != ny {
            prop_assert_eq!(nsum, nx.max(ny));
        }
    }

    #[test]
    fn norm_is_multiplicative(p in primes(), x in rational(), y in rational()) {
        prop_assert_eq!(norm(&(&x * &y), p), norm(&x, p).mul(norm(&y, p)));
    }

    #[test]
    fn matrix_norm_bounds_action(p in primes(), rows in matrix(3), v in prop::collection::vec(rational(), 3)) {
        let a = PAdicMatrix::from_rows(rows, p).unwrap();
        let x = PAdicVector::new(v, p).unwrap();
        let ax = a.mul_vec(&x).unwrap();
        prop_assert!(ax.norm() <= a.norm().unwrap().mul(x.norm()));
    }

    #[test]
    fn determinant_bounds_hold(p in primes(), rows in matrix(2)) {
        let a = PAdicMatrix::from_rows(rows, p).unwrap();
        prop_assume!(a.inverse().is_ok());
        let b = verify_det_bounds(&a).unwrap();
        prop_assert!(b.holds);
        prop_assert!(b.lower <= b.mid && b.mid <= b.upper);
    }

    #[test]
    fn scalar_radial_norm_identities(
        p in primes(),
        n in 1usize..=3,
        slope in -2i64..=2,
        offset in -3i64..=3,
        g in -6i64..=6,
        seed in any::<u64>(),
        sigma in -3i64..=3,
        x in prop::collection::vec(nonzero_rational(), 3),
    ) {
        let mut rng = shell_rng(seed, g);
        let y = sample_sphere(p, n, g, &mut rng);
        let a = MatrixFamily::scalar_radial(slope, offset).matrix_at(&y).unwrap();
        let inv = a.inverse().unwrap();
        let (na, ninv) = (a.norm().unwrap(), inv.norm().unwrap());
        prop_assert_eq!(na, PNorm::Pow(slope * g + offset));
        prop_assert_eq!(na.powi(sigma), ninv.powi(-sigma));
        let x = PAdicVector::new(x[..n].to_vec(), p).unwrap();
        prop_assert_eq!(a.mul_vec(&x).unwrap().norm(), ninv.powi(-1).mul(x.norm()));
    }
}

#[test]
fn sphere_samples_lie_on_their_shell() {
    let p = Prime::new(5).unwrap();
    let mut rng = shell_rng(11, 3);
    for _ in 0..200 {
        assert_eq!(sample_sphere(p, 3, 3, &mut rng).shell(), Some(3));
    }
}
