use crate::scalar::ExactInt;

use super::{dot, AutomatonError, AutomatonSpec, Slice, Trajectory};

/// Which dynamical variable of a slice is varied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variable {
    X(usize),
    P(usize),
    Tau,
    Pi,
}

/// A variation site: slice index into the trajectory plus variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Site {
    pub slice: usize,
    pub var: Variable,
}

impl Site {
    pub fn new(slice: usize, var: Variable) -> Self {
        Self { slice, var }
    }
}

/// Doubled action contribution of the link `(n−1, n)`:
/// `2(p_n+p_{n−1})·Δx + (2π_n+2π_{n−1})Δτ − Δτ(2H_n+2H_{n−1}) − c·2π_n`.
fn link<T: ExactInt>(spec: &AutomatonSpec<T>, prev: &Slice<T>, curr: &Slice<T>) -> T {
    let psum: Vec<T> = curr.p.iter().zip(&prev.p).map(|(a, b)| a.add_exact(b)).collect();
    let dx: Vec<T> = curr.x.iter().zip(&prev.x).map(|(a, b)| a.sub_exact(b)).collect();
    let kinetic = dot(&psum, &dx);
    let dtau = curr.tau.sub_exact(&prev.tau);
    let hsum = spec
        .hamiltonian_doubled(curr)
        .add_exact(&spec.hamiltonian_doubled(prev));
    kinetic
        .add_exact(&kinetic)
        .add_exact(&curr.two_pi.add_exact(&prev.two_pi).mul_exact(&dtau))
        .sub_exact(&dtau.mul_exact(&hsum))
        .sub_exact(&spec.lapse().mul_exact(&curr.two_pi))
}

fn perturbed<T: ExactInt>(s: &Slice<T>, var: Variable, delta: &T) -> Slice<T> {
    let mut out = s.clone();
    match var {
        Variable::X(a) => out.x[a] = out.x[a].add_exact(delta),
        Variable::P(a) => out.p[a] = out.p[a].add_exact(delta),
        Variable::Tau => out.tau = out.tau.add_exact(delta),
        // the stored value is 2π
        Variable::Pi => out.two_pi = out.two_pi.add_exact(delta).add_exact(delta),
    }
    out
}

impl<T: ExactInt> Trajectory<T> {
    /// The doubled action `2𝒮`, summed over every link `(n−1, n)` of the
    /// trajectory.
    pub fn action(&self) -> Result<T, AutomatonError> {
        if self.slices.len() < 3 {
            return Err(AutomatonError::TooShort {
                len: self.slices.len(),
                min: 3,
            });
        }
        Ok(self
            .slices
            .windows(2)
            .fold(T::zero(), |acc, w| acc.add_exact(&link(&self.spec, &w[0], &w[1]))))
    }

    /// Symmetric integer variation `[2𝒮(f+δ) − 2𝒮(f−δ)]/2` at an interior site.
    ///
    /// Only the two links touching the site change, so only those are
    /// re-evaluated. The action is at most quadratic in any single variable,
    /// which makes the difference even and the halving exact.
    pub fn discrete_variation(&self, site: Site, delta: &T) -> Result<T, AutomatonError> {
        self.check_interior(site.slice)?;
        if let Variable::X(a) | Variable::P(a) = site.var {
            if a >= self.spec.dim() {
                return Err(AutomatonError::ComponentOutOfRange {
                    component: a,
                    dim: self.spec.dim(),
                });
            }
        }
        let k = site.slice;
        let (before, here, after) = (&self.slices[k - 1], &self.slices[k], &self.slices[k + 1]);
        let local = |s: &Slice<T>| link(&self.spec, before, s).add_exact(&link(&self.spec, s, after));
        let up = local(&perturbed(here, site.var, delta));
        let down = local(&perturbed(here, site.var, &delta.neg_exact()));
        Ok(up
            .sub_exact(&down)
            .halve()
            .expect("action difference of a quadratic form is even"))
    }

    /// Every interior site of the trajectory.
    pub fn interior_sites(&self) -> impl Iterator<Item = Site> + '_ {
        let dim = self.spec.dim();
        let len = self.slices.len();
        (1..len.saturating_sub(1)).flat_map(move |k| {
            (0..dim)
                .map(Variable::X)
                .chain((0..dim).map(Variable::P))
                .chain([Variable::Tau, Variable::Pi])
                .map(move |v| Site::new(k, v))
        })
    }

    /// First site and delta with a nonzero variation, if any.
    pub fn first_nonstationary(&self, deltas: &[T]) -> Option<(Site, T, T)> {
        for site in self.interior_sites() {
            for d in deltas {
                let v = self.discrete_variation(site, d).expect("interior site");
                if !v.is_zero() {
                    return Some((site, d.clone(), v));
                }
            }
        }
        None
    }
}
