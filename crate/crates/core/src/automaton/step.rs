use crate::scalar::ExactInt;

use super::{AutomatonError, AutomatonSpec, Slice, StatePair, Trajectory};

/// Right-hand sides of the x and p updates at one slice, before the lapse:
/// `S p + A x` and `S x − A p`.
fn drift<T: ExactInt>(spec: &AutomatonSpec<T>, s: &Slice<T>) -> (Vec<T>, Vec<T>) {
    let sm = spec.parts.symmetric();
    let am = spec.parts.antisymmetric();
    let sp = sm.matvec_unchecked(&s.p);
    let ax = am.matvec_unchecked(&s.x);
    let sx = sm.matvec_unchecked(&s.x);
    let ap = am.matvec_unchecked(&s.p);
    let dx = sp.iter().zip(&ax).map(|(a, b)| a.add_exact(b)).collect();
    let dp = sx.iter().zip(&ap).map(|(a, b)| a.sub_exact(b)).collect();
    (dx, dp)
}

impl<T: ExactInt> AutomatonSpec<T> {
    /// Computes slice `n+1` from `n−1` and `n`. `two_h_prev` is `2H_{n−1}`;
    /// returns the new slice with its `2H`.
    pub(crate) fn advance(&self, prev: &Slice<T>, curr: &Slice<T>, two_h_prev: &T) -> (Slice<T>, T) {
        let c = &self.lapse;
        let (dx, dp) = drift(self, curr);
        let x = prev
            .x
            .iter()
            .zip(&dx)
            .map(|(x0, d)| x0.add_exact(&c.mul_exact(d)))
            .collect();
        let p = prev
            .p
            .iter()
            .zip(&dp)
            .map(|(p0, d)| p0.sub_exact(&c.mul_exact(d)))
            .collect();
        let mut next = Slice::new(curr.n + 1, x, p, prev.tau.add_exact(c), T::zero());
        let two_h = self.hamiltonian_doubled(&next);
        next.two_pi = prev.two_pi.add_exact(&two_h).sub_exact(two_h_prev);
        (next, two_h)
    }

    /// Computes slice `n−1` from `n` and `n+1`. `two_h_next` is `2H_{n+1}`.
    pub(crate) fn retreat(&self, curr: &Slice<T>, next: &Slice<T>, two_h_next: &T) -> (Slice<T>, T) {
        let c = &self.lapse;
        let (dx, dp) = drift(self, curr);
        let x = next
            .x
            .iter()
            .zip(&dx)
            .map(|(x2, d)| x2.sub_exact(&c.mul_exact(d)))
            .collect();
        let p = next
            .p
            .iter()
            .zip(&dp)
            .map(|(p2, d)| p2.add_exact(&c.mul_exact(d)))
            .collect();
        let mut prev = Slice::new(curr.n - 1, x, p, next.tau.sub_exact(c), T::zero());
        let two_h = self.hamiltonian_doubled(&prev);
        prev.two_pi = next.two_pi.sub_exact(two_h_next).add_exact(&two_h);
        (prev, two_h)
    }

    /// `(n−1, n) ↦ (n, n+1)`.
    pub fn step_forward(&self, pair: &StatePair<T>) -> StatePair<T> {
        let two_h_prev = self.hamiltonian_doubled(&pair.prev);
        let (next, _) = self.advance(&pair.prev, &pair.curr, &two_h_prev);
        StatePair {
            prev: pair.curr.clone(),
            curr: next,
        }
    }

    /// `(n, n+1) ↦ (n−1, n)`; exact inverse of [`Self::step_forward`].
    pub fn step_backward(&self, pair: &StatePair<T>) -> StatePair<T> {
        let two_h_next = self.hamiltonian_doubled(&pair.curr);
        let (earlier, _) = self.retreat(&pair.prev, &pair.curr, &two_h_next);
        StatePair {
            prev: earlier,
            curr: pair.prev.clone(),
        }
    }

    fn check_budget(&self, s: &Slice<T>) -> Result<(), AutomatonError> {
        // cheap bit-length screen before the digit estimate
        let bits = s.magnitude_bits();
        if (bits as f64) * std::f64::consts::LOG10_2 <= self.budget_digits as f64 {
            return Ok(());
        }
        let digits = s.max_digits();
        if digits > self.budget_digits {
            return Err(AutomatonError::BudgetExceeded {
                step: s.n,
                digits,
                budget: self.budget_digits,
            });
        }
        Ok(())
    }

    /// Runs `steps` steps backwards from `pair` without a budget check and
    /// returns the slices newest first, starting with `pair.curr`.
    pub fn step_back_n(&self, pair: &StatePair<T>, steps: usize) -> Vec<Slice<T>> {
        let mut out = Vec::with_capacity(steps + 2);
        out.push(pair.curr.clone());
        out.push(pair.prev.clone());
        let mut two_h_later = self.hamiltonian_doubled(&pair.curr);
        let mut two_h_earlier = self.hamiltonian_doubled(&pair.prev);
        for _ in 0..steps {
            let k = out.len();
            let (s, h) = self.retreat(&out[k - 1], &out[k - 2], &two_h_later);
            two_h_later = std::mem::replace(&mut two_h_earlier, h);
            out.push(s);
        }
        out
    }

    /// Iterates the equations of motion `steps` times from `init`, giving
    /// `steps + 2` slices.
    pub fn evolve(&self, init: &StatePair<T>, steps: usize) -> Result<Trajectory<T>, AutomatonError> {
        self.evolve_window(init, 0, steps)
    }

    /// Runs `back` steps into the past and `forward` steps into the future
    /// from `init`, returning slices `init.prev.n − back ..= init.curr.n + forward`.
    pub fn evolve_window(
        &self,
        init: &StatePair<T>,
        back: usize,
        forward: usize,
    ) -> Result<Trajectory<T>, AutomatonError> {
        self.check_slice(&init.prev)?;
        self.check_slice(&init.curr)?;

        let mut past = Vec::with_capacity(back);
        let mut later = init.curr.clone();
        let mut earlier = init.prev.clone();
        let mut two_h_later = self.hamiltonian_doubled(&later);
        let mut two_h_earlier = self.hamiltonian_doubled(&earlier);
        for _ in 0..back {
            let (s, h) = self.retreat(&earlier, &later, &two_h_later);
            self.check_budget(&s)?;
            later = std::mem::replace(&mut earlier, s.clone());
            two_h_later = std::mem::replace(&mut two_h_earlier, h);
            past.push(s);
        }
        past.reverse();

        let mut slices = past;
        slices.reserve(forward + 2);
        slices.push(init.prev.clone());
        slices.push(init.curr.clone());
        let mut two_h_prev = self.hamiltonian_doubled(&slices[slices.len() - 2]);
        let mut two_h_curr = self.hamiltonian_doubled(&slices[slices.len() - 1]);
        for _ in 0..forward {
            let k = slices.len();
            let (next, two_h_next) = self.advance(&slices[k - 2], &slices[k - 1], &two_h_prev);
            self.check_budget(&next)?;
            two_h_prev = std::mem::replace(&mut two_h_curr, two_h_next);
            slices.push(next);
        }
        Ok(Trajectory {
            spec: self.clone(),
            slices,
        })
    }
}
