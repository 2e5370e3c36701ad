//! The integer cellular automaton: stepping in both time directions, the
//! doubled-unit action and its symmetric variation, and exact conservation
//! residuals.
//!
//! Hamiltonians may be half-integer (`S = [1]`, `x = 1`, `p = 0` gives
//! `H = 1/2`), so the engine keeps `2H` and `2π` as the stored integers and
//! evaluates the action as `2𝒮`. Every quantity is then an exact integer.

mod action;
mod conservation;
mod step;

use thiserror::Error;

use crate::exactmath::{ExactMathError, GaussianInteger, GaussianMatrix, HamiltonianParts};
use crate::scalar::ExactInt;

pub use action::{Site, Variable};
pub use conservation::{conservation_residual_at, leibniz_defect};

/// Default slice-magnitude budget in decimal digits.
pub const DEFAULT_BUDGET_DIGITS: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error(transparent)]
    ExactMath(#[from] ExactMathError),
    #[error("slice {n} has dimension {found}, expected {expected}")]
    SliceDimension { n: i64, expected: usize, found: usize },
    #[error("slices {first} and {second} are not consecutive")]
    NonConsecutive { first: i64, second: i64 },
    #[error("slice magnitude budget exceeded at step {step}: {digits} digits > {budget}")]
    BudgetExceeded { step: i64, digits: u64, budget: u64 },
    #[error("trajectory has {len} slices, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("slice index {index} is not interior to a trajectory of {len} slices")]
    NotInterior { index: usize, len: usize },
    #[error("component {component} out of range for dimension {dim}")]
    ComponentOutOfRange { component: usize, dim: usize },
}

/// The full dynamical law: `H = S + iA` and the constant lapse `c`.
#[derive(Clone, Debug, PartialEq)]
pub struct AutomatonSpec<T> {
    parts: HamiltonianParts<T>,
    lapse: T,
    budget_digits: u64,
}

impl<T: ExactInt> AutomatonSpec<T> {
    pub fn new(parts: HamiltonianParts<T>, lapse: T) -> Self {
        Self {
            parts,
            lapse,
            budget_digits: DEFAULT_BUDGET_DIGITS,
        }
    }

    pub fn with_budget(mut self, digits: u64) -> Self {
        self.budget_digits = digits;
        self
    }

    pub fn dim(&self) -> usize {
        self.parts.dim()
    }

    pub fn lapse(&self) -> &T {
        &self.lapse
    }

    pub fn budget_digits(&self) -> u64 {
        self.budget_digits
    }

    pub fn parts(&self) -> &HamiltonianParts<T> {
        &self.parts
    }

    pub fn hamiltonian(&self) -> GaussianMatrix<T> {
        self.parts.hamiltonian()
    }

    /// `2H = S(pp + xx) + 2 A p x`, exact.
    pub fn hamiltonian_doubled(&self, slice: &Slice<T>) -> T {
        let s = self.parts.symmetric();
        let a = self.parts.antisymmetric();
        let sx = s.matvec_unchecked(&slice.x);
        let sp = s.matvec_unchecked(&slice.p);
        let ax = a.matvec_unchecked(&slice.x);
        let mut acc = dot(&slice.x, &sx).add_exact(&dot(&slice.p, &sp));
        let pax = dot(&slice.p, &ax);
        acc = acc.add_exact(&pax).add_exact(&pax);
        acc
    }

    fn check_slice(&self, slice: &Slice<T>) -> Result<(), AutomatonError> {
        let expected = self.dim();
        for found in [slice.x.len(), slice.p.len()] {
            if found != expected {
                return Err(AutomatonError::SliceDimension {
                    n: slice.n,
                    expected,
                    found,
                });
            }
        }
        Ok(())
    }
}

pub(crate) fn dot<T: ExactInt>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (u, v)| acc.add_exact(&u.mul_exact(v)))
}

/// One automaton state: integer coordinates and momenta at step `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice<T> {
    pub n: i64,
    pub x: Vec<T>,
    pub p: Vec<T>,
    pub tau: T,
    /// Twice the time momentum π.
    pub two_pi: T,
}

impl<T: ExactInt> Slice<T> {
    pub fn new(n: i64, x: Vec<T>, p: Vec<T>, tau: T, two_pi: T) -> Self {
        Self { n, x, p, tau, two_pi }
    }

    pub fn from_ints(n: i64, x: &[i64], p: &[i64], tau: i64, two_pi: i64) -> Self {
        Self::new(
            n,
            x.iter().map(|&v| T::from_i64(v)).collect(),
            p.iter().map(|&v| T::from_i64(v)).collect(),
            T::from_i64(tau),
            T::from_i64(two_pi),
        )
    }

    pub fn zero(n: i64, dim: usize) -> Self {
        Self::new(n, vec![T::zero(); dim], vec![T::zero(); dim], T::zero(), T::zero())
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `ψ_n = x_n + i p_n`.
    pub fn psi(&self) -> Vec<GaussianInteger<T>> {
        self.x
            .iter()
            .zip(&self.p)
            .map(|(x, p)| GaussianInteger::new(x.clone(), p.clone()))
            .collect()
    }

    /// Largest bit length over every stored integer.
    pub fn magnitude_bits(&self) -> u64 {
        self.x
            .iter()
            .chain(&self.p)
            .chain([&self.tau, &self.two_pi])
            .map(ExactInt::magnitude_bits)
            .max()
            .unwrap_or(0)
    }

    pub fn max_digits(&self) -> u64 {
        self.x
            .iter()
            .chain(&self.p)
            .chain([&self.tau, &self.two_pi])
            .map(ExactInt::decimal_digits)
            .max()
            .unwrap_or(1)
    }
}

/// Two consecutive slices, the data the three-term recursion needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatePair<T> {
    prev: Slice<T>,
    curr: Slice<T>,
}

impl<T: ExactInt> StatePair<T> {
    pub fn new(prev: Slice<T>, curr: Slice<T>) -> Result<Self, AutomatonError> {
        if curr.n != prev.n + 1 {
            return Err(AutomatonError::NonConsecutive {
                first: prev.n,
                second: curr.n,
            });
        }
        let dim = prev.dim();
        for s in [&prev, &curr] {
            if s.x.len() != dim || s.p.len() != dim {
                return Err(AutomatonError::SliceDimension {
                    n: s.n,
                    expected: dim,
                    found: s.x.len().max(s.p.len()),
                });
            }
        }
        Ok(Self { prev, curr })
    }

    pub fn prev(&self) -> &Slice<T> {
        &self.prev
    }

    pub fn curr(&self) -> &Slice<T> {
        &self.curr
    }

    pub fn into_slices(self) -> (Slice<T>, Slice<T>) {
        (self.prev, self.curr)
    }
}

/// A run of consecutive slices under one spec.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    spec: AutomatonSpec<T>,
    slices: Vec<Slice<T>>,
}

impl<T: ExactInt> Trajectory<T> {
    /// Wraps externally supplied slices; checks indices and dimensions only,
    /// not the equations of motion.
    pub fn new(spec: AutomatonSpec<T>, slices: Vec<Slice<T>>) -> Result<Self, AutomatonError> {
        for s in &slices {
            spec.check_slice(s)?;
        }
        for w in slices.windows(2) {
            if w[1].n != w[0].n + 1 {
                return Err(AutomatonError::NonConsecutive {
                    first: w[0].n,
                    second: w[1].n,
                });
            }
        }
        Ok(Self { spec, slices })
    }

    pub fn spec(&self) -> &AutomatonSpec<T> {
        &self.spec
    }

    pub fn slices(&self) -> &[Slice<T>] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn slices_mut(&mut self) -> &mut [Slice<T>] {
        &mut self.slices
    }

    pub fn two_h(&self, index: usize) -> T {
        self.spec.hamiltonian_doubled(&self.slices[index])
    }

    pub fn first_pair(&self) -> Option<StatePair<T>> {
        (self.slices.len() >= 2)
            .then(|| StatePair::new(self.slices[0].clone(), self.slices[1].clone()).ok())
            .flatten()
    }

    pub fn last_pair(&self) -> Option<StatePair<T>> {
        let k = self.slices.len();
        (k >= 2)
            .then(|| StatePair::new(self.slices[k - 2].clone(), self.slices[k - 1].clone()).ok())
            .flatten()
    }

    /// `2π_n − 2H_n` per slice; constant along each parity subchain.
    pub fn pi_minus_h(&self) -> Vec<T> {
        self.slices
            .iter()
            .map(|s| s.two_pi.sub_exact(&self.spec.hamiltonian_doubled(s)))
            .collect()
    }

    /// True iff `2π − 2H` is constant on even and on odd slices separately.
    pub fn pi_integral_holds(&self) -> bool {
        let v = self.pi_minus_h();
        v.iter().zip(v.iter().skip(2)).all(|(a, b)| a == b)
    }

    pub(crate) fn check_interior(&self, index: usize) -> Result<(), AutomatonError> {
        if index == 0 || index + 1 >= self.slices.len() {
            return Err(AutomatonError::NotInterior {
                index,
                len: self.slices.len(),
            });
        }
        Ok(())
    }
}
