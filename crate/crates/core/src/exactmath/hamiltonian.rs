use crate::scalar::ExactInt;

use super::{ExactMathError, GaussianInteger, GaussianMatrix, IntMatrix};

/// Integer symmetric part `S` and antisymmetric part `A` of `H = S + iA`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianParts<T> {
    s: IntMatrix<T>,
    a: IntMatrix<T>,
}

impl<T: ExactInt> HamiltonianParts<T> {
    /// Validates `S = Sᵀ`, `A = −Aᵀ` and matching square dimensions.
    pub fn new(s: IntMatrix<T>, a: IntMatrix<T>) -> Result<Self, ExactMathError> {
        for m in [&s, &a] {
            if !m.is_square() {
                return Err(ExactMathError::NotSquare {
                    rows: m.rows(),
                    cols: m.cols(),
                });
            }
        }
        if s.rows() != a.rows() {
            return Err(ExactMathError::DimensionMismatch {
                left: (s.rows(), s.cols()),
                right: (a.rows(), a.cols()),
            });
        }
        if let Some((row, col)) = s.first_asymmetry(false) {
            return Err(ExactMathError::NotSymmetric { row, col });
        }
        if let Some((row, col)) = a.first_asymmetry(true) {
            return Err(ExactMathError::NotAntisymmetric { row, col });
        }
        Ok(Self { s, a })
    }

    /// Splits a self-adjoint Gaussian matrix into its parts.
    pub fn from_hamiltonian(h: &GaussianMatrix<T>) -> Result<Self, ExactMathError> {
        Self::new(h.real_part(), h.imag_part())
    }

    pub fn dim(&self) -> usize {
        self.s.rows()
    }

    pub fn symmetric(&self) -> &IntMatrix<T> {
        &self.s
    }

    pub fn antisymmetric(&self) -> &IntMatrix<T> {
        &self.a
    }

    /// `H_{αβ} = S_{αβ} + i A_{αβ}`.
    pub fn hamiltonian(&self) -> GaussianMatrix<T> {
        let n = self.dim();
        GaussianMatrix::from_fn(n, n, |r, c| {
            GaussianInteger::new(self.s.get(r, c).clone(), self.a.get(r, c).clone())
        })
    }
}

/// Assemble `H = S + iA`, validating both parts.
pub fn build_hamiltonian<T: ExactInt>(s: &IntMatrix<T>, a: &IntMatrix<T>) -> Result<GaussianMatrix<T>, ExactMathError> {
    Ok(HamiltonianParts::new(s.clone(), a.clone())?.hamiltonian())
}

/// True iff `GH − HG` is exactly zero.
pub fn commutes<T: ExactInt>(g: &GaussianMatrix<T>, h: &GaussianMatrix<T>) -> Result<bool, ExactMathError> {
    for m in [g, h] {
        if !m.is_square() {
            return Err(ExactMathError::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
    }
    if g.rows() != h.rows() {
        return Err(ExactMathError::DimensionMismatch {
            left: (g.rows(), g.cols()),
            right: (h.rows(), h.cols()),
        });
    }
    Ok(g.mul(h)?.sub(&h.mul(g)?)?.is_zero())
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use proptest::prelude::*;

    use super::*;

    type IM = IntMatrix<i64>;
    type G = GaussianInteger<i64>;

    fn im(rows: &[Vec<i64>]) -> IM {
        IM::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn identity_case() {
        let h = build_hamiltonian(&im(&[vec![1]]), &im(&[vec![0]])).unwrap();
        assert_eq!(*h.get(0, 0), G::from_ints(1, 0));
    }

    #[test]
    fn pauli_x_case() {
        let h = build_hamiltonian(&im(&[vec![0, 1], vec![1, 0]]), &IM::zeros(2, 2)).unwrap();
        assert_eq!(h, im(&[vec![0, 1], vec![1, 0]]).to_gaussian());
        assert!(h.is_self_adjoint());
    }

    #[test]
    fn antisymmetric_case_gives_pauli_y_shape() {
        let h = build_hamiltonian(&IM::zeros(2, 2), &im(&[vec![0, 1], vec![-1, 0]])).unwrap();
        assert_eq!(*h.get(0, 1), G::from_ints(0, 1));
        assert_eq!(*h.get(1, 0), G::from_ints(0, -1));
        assert!(h.get(0, 0).is_zero() && h.get(1, 1).is_zero());
    }

    #[test]
    fn violations_report_index() {
        let err = build_hamiltonian(&im(&[vec![0, 1], vec![2, 0]]), &IM::zeros(2, 2)).unwrap_err();
        assert_eq!(err, ExactMathError::NotSymmetric { row: 0, col: 1 });
        let err = build_hamiltonian(&IM::zeros(2, 2), &im(&[vec![0, 1], vec![1, 0]])).unwrap_err();
        assert_eq!(err, ExactMathError::NotAntisymmetric { row: 0, col: 1 });
        let err = build_hamiltonian(&IM::zeros(2, 2), &IM::zeros(3, 3)).unwrap_err();
        assert!(matches!(err, ExactMathError::DimensionMismatch { .. }));
    }

    #[test]
    fn commutation_examples() {
        let px = im(&[vec![0, 1], vec![1, 0]]).to_gaussian();
        let z = im(&[vec![1, 0], vec![0, -1]]).to_gaussian();
        let id = GaussianMatrix::<i64>::identity(2);
        assert!(commutes(&id, &px).unwrap());
        assert!(commutes(&px, &px).unwrap());
        assert!(!commutes(&z, &px).unwrap());
        // [Z, X] = 2iY
        let c = z.mul(&px).unwrap().sub(&px.mul(&z).unwrap()).unwrap();
        assert_eq!(*c.get(0, 1), G::from_ints(2, 0));
        assert_eq!(*c.get(1, 0), G::from_ints(-2, 0));
        assert!(commutes(&id, &GaussianMatrix::<i64>::identity(3)).is_err());
    }

    fn sym_anti(n: usize, vals: &[i64]) -> (IM, IM) {
        let mut s = IM::zeros(n, n);
        let mut a = IM::zeros(n, n);
        let mut k = 0;
        for r in 0..n {
            for c in r..n {
                s.set(r, c, vals[k]);
                s.set(c, r, vals[k]);
                if r != c {
                    a.set(r, c, vals[k + 1]);
                    a.set(c, r, -vals[k + 1]);
                }
                k += 2;
            }
        }
        (s, a)
    }

    proptest! {
        #[test]
        fn built_hamiltonian_is_self_adjoint(
            n in 1usize..=6,
            vals in prop::collection::vec(-5i64..=5, 42),
        ) {
            let (s, a) = sym_anti(n, &vals);
            let h = build_hamiltonian(&s, &a).unwrap();
            prop_assert_eq!(h.conj_transpose(), h);
        }

        #[test]
        fn commutes_matches_entrywise_commutator(
            n in 1usize..=5,
            gv in prop::collection::vec(-3i64..=3, 50),
            hv in prop::collection::vec(-3i64..=3, 50),
        ) {
            let mk = |v: &[i64]| GaussianMatrix::<i64>::from_fn(n, n, |r, c| {
                G::from_ints(v[2 * (r * n + c)], v[2 * (r * n + c) + 1])
            });
            let (g, h) = (mk(&gv), mk(&hv));
            let mut all_zero = true;
            for r in 0..n {
                for c in 0..n {
                    let mut acc = G::zero();
                    for k in 0..n {
                        acc = &acc + &(g.get(r, k) * h.get(k, c));
                        acc = &acc - &(h.get(r, k) * g.get(k, c));
                    }
                    all_zero &= acc.is_zero();
                }
            }
            prop_assert_eq!(commutes(&g, &h).unwrap(), all_zero);
            // powers of a matrix always commute with it
            prop_assert!(commutes(&h.pow(2).unwrap(), &h).unwrap());
        }

        #[test]
        fn wide_bigint_arithmetic_is_exact(
            a in "[1-9][0-9]{199}",
            b in "-?[1-9][0-9]{199}",
            ai in "[1-9][0-9]{199}",
        ) {
            let a = GaussianInteger::new(a.parse::<BigInt>().unwrap(), ai.parse::<BigInt>().unwrap());
            let b = GaussianInteger::new(b.parse::<BigInt>().unwrap(), BigInt::from(7));
            prop_assert_eq!(&(&a + &b) - &b, a);
        }
    }
}
