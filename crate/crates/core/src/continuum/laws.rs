use nalgebra::{Complex, DMatrix, DVector};

use crate::scalar::Real;

use super::{check_hermitian, ContinuumError, Wave};

fn check_dims<F: Real, W: Wave<F> + ?Sized>(m: &DMatrix<Complex<F>>, wave: &W) -> Result<(), ContinuumError> {
    if m.nrows() != wave.dim() {
        return Err(ContinuumError::DimensionMismatch {
            matrix: m.nrows(),
            wave: wave.dim(),
        });
    }
    Ok(())
}

/// `½[ψ(t+l) − ψ(t−l)]`, the translation-operator form of `sinh(l∂_t)ψ`.
fn half_shift_difference<F: Real, W: Wave<F> + ?Sized>(wave: &W, t: F) -> DVector<Complex<F>> {
    let l = wave.scale();
    (wave.eval(t + l) - wave.eval(t - l)).map(|z| z * F::lit(0.5))
}

/// `‖½[ψ(t+l) − ψ(t−l)] + iHψ(t)‖`.
pub fn sinh_residual<F: Real, W: Wave<F> + ?Sized>(
    wave: &W,
    h: &DMatrix<Complex<F>>,
    t: F,
) -> Result<F, ContinuumError> {
    check_hermitian(h)?;
    check_dims(h, wave)?;
    wave.check_time(t)?;
    let lhs = half_shift_difference(wave, t);
    let hpsi = (h * wave.eval(t)).map(|z| z * Complex::new(F::zero(), F::one()));
    Ok((lhs + hpsi).norm())
}

/// `ψ†(t) G D(t) + D†(t) G ψ(t)` with `D = ½[ψ(t+l) − ψ(t−l)]`; real for
/// Hermitian `G` and zero when `[G, H] = 0`.
pub fn continuum_conservation_residual<F: Real, W: Wave<F> + ?Sized>(
    wave: &W,
    g: &DMatrix<Complex<F>>,
    t: F,
) -> Result<F, ContinuumError> {
    check_hermitian(g)?;
    check_dims(g, wave)?;
    wave.check_time(t)?;
    let psi = wave.eval(t);
    let d = half_shift_difference(wave, t);
    let total = psi.dotc(&(g * &d)) + d.dotc(&(g * &psi));
    Ok(total.re)
}

/// Two-time function `C_G(t1, t2) = Re[ψ†(t1) G ψ(t2)]`.
pub fn two_time<F: Real, W: Wave<F> + ?Sized>(
    wave: &W,
    g: &DMatrix<Complex<F>>,
    t1: F,
    t2: F,
) -> Result<F, ContinuumError> {
    check_hermitian(g)?;
    check_dims(g, wave)?;
    wave.check_time(t1)?;
    wave.check_time(t2)?;
    Ok(wave.eval(t1).dotc(&(g * wave.eval(t2))).re)
}
