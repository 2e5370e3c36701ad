use crate::exactmath::{ExactMathError, GaussianInteger, GaussianMatrix};
use crate::scalar::ExactInt;

use super::{AutomatonError, Slice, Trajectory};

fn psi_dot<T: ExactInt>(prev: &Slice<T>, next: &Slice<T>) -> Vec<GaussianInteger<T>> {
    prev.psi().iter().zip(next.psi()).map(|(a, b)| &b - a).collect()
}

/// `ψ_n† G ψ̇_n + ψ̇_n† G ψ_n` from the three slices `n−1, n, n+1`.
///
/// Vanishes exactly whenever `G` commutes with the Hamiltonian and the
/// slices obey the equations of motion.
pub fn conservation_residual_at<T: ExactInt>(
    g: &GaussianMatrix<T>,
    prev: &Slice<T>,
    curr: &Slice<T>,
    next: &Slice<T>,
) -> Result<GaussianInteger<T>, ExactMathError> {
    let psi = curr.psi();
    let dot = psi_dot(prev, next);
    let g_dot = g.matvec(&dot)?;
    if g.is_self_adjoint() {
        // second term is the conjugate of the first
        let re = psi
            .iter()
            .zip(&g_dot)
            .fold(T::zero(), |acc, (a, b)| acc.add_exact(&a.re_conj_mul(b)));
        return Ok(GaussianInteger::real(re.add_exact(&re)));
    }
    let g_psi = g.matvec(&psi)?;
    let first = psi
        .iter()
        .zip(&g_dot)
        .fold(GaussianInteger::zero(), |acc, (a, b)| &acc + &(&a.conj() * b));
    let second = dot
        .iter()
        .zip(&g_psi)
        .fold(GaussianInteger::zero(), |acc, (a, b)| &acc + &(&a.conj() * b));
    Ok(&first + &second)
}

impl<T: ExactInt> Trajectory<T> {
    /// Discrete conservation residual at interior slice `index`.
    pub fn conservation_residual(
        &self,
        g: &GaussianMatrix<T>,
        index: usize,
    ) -> Result<GaussianInteger<T>, AutomatonError> {
        self.check_interior(index)?;
        Ok(conservation_residual_at(
            g,
            &self.slices[index - 1],
            &self.slices[index],
            &self.slices[index + 1],
        )?)
    }
}

/// Doubled defect of the modified product rule at interior index `n`:
/// `2(O_{n+1}O'_{n+1} − O_{n−1}O'_{n−1}) − (Ȯ_n[O'_{n+1}+O'_{n−1}] + [O_{n+1}+O_{n−1}]Ȯ'_n)`.
///
/// Identically zero; exposed so callers can spot-check integer sequences.
pub fn leibniz_defect<T: ExactInt>(o: &[T], o2: &[T], n: usize) -> T {
    let (a_next, a_prev) = (&o[n + 1], &o[n - 1]);
    let (b_next, b_prev) = (&o2[n + 1], &o2[n - 1]);
    let lhs = a_next.mul_exact(b_next).sub_exact(&a_prev.mul_exact(b_prev));
    let rhs = a_next
        .sub_exact(a_prev)
        .mul_exact(&b_next.add_exact(b_prev))
        .add_exact(&a_next.add_exact(a_prev).mul_exact(&b_next.sub_exact(b_prev)));
    lhs.add_exact(&lhs).sub_exact(&rhs)
}

#[cfg(test)]
mod tests {
    use num_bigint::BigInt;
    use proptest::prelude::*;

    use super::super::tests::spec_1d;
    use super::super::{AutomatonSpec, StatePair};
    use super::*;
    use crate::exactmath::{HamiltonianParts, IntMatrix};

    type G = GaussianInteger<i64>;

    fn pauli_x_orbit() -> Trajectory<i64> {
        let parts = HamiltonianParts::new(
            IntMatrix::from_i64_rows(&[vec![0, 1], vec![1, 0]]).unwrap(),
            IntMatrix::zeros(2, 2),
        )
        .unwrap();
        let spec = AutomatonSpec::new(parts, 2i64);
        // generic seeds: both eigenmodes present
        let init = StatePair::new(
            Slice::from_ints(0, &[3, -1], &[0, 2], 0, 0),
            Slice::from_ints(1, &[1, 4], &[-2, 0], 1, 0),
        )
        .unwrap();
        spec.evolve(&init, 10).unwrap()
    }

    #[test]
    fn period_four_hand_value() {
        let spec = spec_1d(1, 2);
        let init = StatePair::new(
            Slice::from_ints(0, &[1], &[0], 0, 0),
            Slice::from_ints(1, &[0], &[-1], 1, 0),
        )
        .unwrap();
        let traj = spec.evolve(&init, 6).unwrap();
        let id = GaussianMatrix::<i64>::identity(1);
        // ψ₁ = −i, ψ̇₁ = ψ₂ − ψ₀ = −2: (i)(−2) + (−2)(−i) = 0
        assert_eq!(traj.conservation_residual(&id, 1).unwrap(), G::zero());
        let h = spec.hamiltonian();
        for n in 1..traj.len() - 1 {
            assert!(traj.conservation_residual(&h, n).unwrap().is_zero());
        }
    }

    #[test]
    fn non_commuting_g_is_generically_nonzero() {
        let traj = pauli_x_orbit();
        let z = IntMatrix::<i64>::from_i64_rows(&[vec![1, 0], vec![0, -1]])
            .unwrap()
            .to_gaussian();
        let nonzero = (1..traj.len() - 1).any(|n| !traj.conservation_residual(&z, n).unwrap().is_zero());
        assert!(nonzero);
        let h = traj.spec().hamiltonian();
        for g in [GaussianMatrix::identity(2), h.clone(), h.pow(2).unwrap()] {
            for n in 1..traj.len() - 1 {
                assert!(traj.conservation_residual(&g, n).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn non_hermitian_commutant_also_conserved() {
        // i·I commutes with everything but is not self-adjoint
        let traj = pauli_x_orbit();
        let ii = GaussianMatrix::<i64>::from_fn(2, 2, |r, c| if r == c { G::i() } else { G::zero() });
        for n in 1..traj.len() - 1 {
            assert!(traj.conservation_residual(&ii, n).unwrap().is_zero());
        }
    }

    #[test]
    fn residual_errors() {
        let traj = pauli_x_orbit();
        let id = GaussianMatrix::<i64>::identity(2);
        assert!(traj.conservation_residual(&id, 0).is_err());
        assert!(traj.conservation_residual(&id, traj.len() - 1).is_err());
        let wrong = GaussianMatrix::<i64>::identity(3);
        assert!(matches!(
            traj.conservation_residual(&wrong, 2),
            Err(AutomatonError::ExactMath(_))
        ));
    }

    proptest! {
        #[test]
        fn leibniz_identity_is_exact(
            o in prop::collection::vec(-1_000_000i64..1_000_000, 20),
            o2 in prop::collection::vec(-1_000_000i64..1_000_000, 20),
        ) {
            let o: Vec<BigInt> = o.into_iter().map(BigInt::from).collect();
            let o2: Vec<BigInt> = o2.into_iter().map(BigInt::from).collect();
            for n in 1..19 {
                prop_assert_eq!(leibniz_defect(&o, &o2, n), BigInt::from(0));
            }
        }
    }
}
