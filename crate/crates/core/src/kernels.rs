//! Dense kernels: determinant and permanent of small complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard guard on permanent size; Ryser costs O(2^n * n).
pub const MAX_PERMANENT: usize = 20;

fn check_square(m: &DMatrix<Complex64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    Ok(m.nrows())
}

/// Determinant via LU with partial pivoting. Singular matrices return 0.
pub fn determinant(m: &DMatrix<Complex64>) -> Result<Complex64> {
    check_square(m)?;
    Ok(m.clone().lu().determinant())
}

/// Permanent via Ryser's inclusion-exclusion formula with Gray-code iteration.
///
/// per(A) = (-1)^n sum over nonempty column subsets S of
/// (-1)^|S| prod_i sum_{j in S} A[i][j].
pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = check_square(m)?;
    if n > MAX_PERMANENT {
        return Err(Error::PermanentTooLarge {
            n,
            limit: MAX_PERMANENT,
        });
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut prev_gray = 0u64;
    for k in 1u64..(1u64 << n) {
        let gray = k ^ (k >> 1);
        let changed = (gray ^ prev_gray).trailing_zeros() as usize;
        if gray & (1 << changed) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[(i, changed)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(i, changed)];
            }
        }
        prev_gray = gray;
        let product: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 0 {
            total -= product;
        } else {
            total += product;
        }
    }
    if n % 2 == 0 {
        total = -total;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::{all_permutations, parity};
    use rand::prelude::*;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// n!-term permutation expansion, the independent oracle for both kernels.
    fn expansion(m: &DMatrix<Complex64>, signed: bool) -> Complex64 {
        let n = m.nrows();
        let mut total = c(0.0, 0.0);
        for sigma in all_permutations(n) {
            let mut term = c(1.0, 0.0);
            for (k, &sk) in sigma.iter().enumerate() {
                term *= m[(sk, k)];
            }
            if signed {
                term *= c(parity(&sigma), 0.0);
            }
            total += term;
        }
        total
    }

    /// Entries scaled like unitary-matrix entries (~ 1/sqrt(n)), the
    /// regime these kernels consume.
    fn random_matrix(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
        let scale = 1.0 / (n as f64).sqrt();
        DMatrix::from_fn(n, n, |_, _| {
            c(
                rng.sample::<f64, _>(StandardNormal) * scale,
                rng.sample::<f64, _>(StandardNormal) * scale,
            )
        })
    }

    #[test]
    fn determinant_identity() {
        let id = DMatrix::<Complex64>::identity(3, 3);
        assert!((determinant(&id).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn determinant_2x2() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert!((determinant(&m).unwrap() - c(-2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn permanent_identity() {
        let id = DMatrix::<Complex64>::identity(3, 3);
        assert!((permanent(&id).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn permanent_2x2() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        assert!((permanent(&m).unwrap() - c(10.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn permanent_all_ones_is_factorial() {
        let m = DMatrix::from_element(4, 4, c(1.0, 0.0));
        assert!((permanent(&m).unwrap() - c(24.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn kernels_match_expansion_oracle() {
        let mut rng = StdRng::seed_from_u64(11);
        for n in 1..=6 {
            for _ in 0..20 {
                let m = random_matrix(&mut rng, n);
                let det = determinant(&m).unwrap();
                let per = permanent(&m).unwrap();
                assert!((det - expansion(&m, true)).norm() < 1e-12, "det n={n}");
                assert!((per - expansion(&m, false)).norm() < 1e-12, "per n={n}");
            }
        }
    }

    #[test]
    fn determinant_of_random_unitary_submatrix_matches_oracle() {
        let mut rng = StdRng::seed_from_u64(3);
        let h = {
            let raw = random_matrix(&mut rng, 6);
            (&raw + raw.adjoint()) * c(0.5, 0.0)
        };
        let u = crate::lattice::unitary_exp(&h, 1.0);
        let sub = u.view((0, 0), (4, 4)).into_owned();
        let det = determinant(&sub).unwrap();
        assert!((det - expansion(&sub, true)).norm() < 1e-12);
    }

    #[test]
    fn permanent_rejects_oversized_input() {
        let m = DMatrix::from_element(21, 21, c(1.0, 0.0));
        assert!(matches!(
            permanent(&m),
            Err(Error::PermanentTooLarge { n: 21, .. })
        ));
    }

    #[test]
    fn singular_determinant_is_zero() {
        // two identical rows
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 2.0),
                c(3.0, -1.0),
                c(0.5, 0.0),
                c(1.0, 2.0),
                c(3.0, -1.0),
                c(0.5, 0.0),
                c(0.0, 1.0),
                c(2.0, 2.0),
                c(-1.0, 0.0),
            ],
        );
        assert!(determinant(&m).unwrap().norm() < 1e-14);
    }
}
