use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Principal branch `W_0(z)` of the Lambert W function, `w e^w = z`, `z > -1/e`.
///
/// Halley iteration from a branch-point series near `-1/e`, `log1p(z)` for moderate
/// arguments and the asymptotic `ln z - ln ln z` for large ones.
pub fn lambert_w0<T: Scalar>(z: T) -> Result<T> {
    let branch = -T::E().recip();
    if z.is_nan() || z <= branch {
        return Err(Error::LambertDomain(z.as_f64()));
    }
    if z == T::zero() {
        return Ok(T::zero());
    }
    if z.is_infinite() {
        return Ok(z);
    }
    let one = T::one();
    let two = T::two();
    let mut w = if z < T::of(-0.25) {
        let p = (two * (T::E() * z + one)).sqrt();
        -one + p - p * p / T::of(3.0) + T::of(11.0 / 72.0) * p * p * p
    } else if z < T::of(3.0) {
        z.ln_1p() * (one - z.ln_1p() / (two + z.ln_1p()))
    } else {
        let l1 = z.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + one;
        let denom = ew * wp1 - (w + two) * f / (two * wp1);
        let step = f / denom;
        w = w - step;
        if !step.is_finite() || step.abs() <= T::of(4.0) * T::epsilon() * (one + w.abs()) {
            break;
        }
    }
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::NonConvergence {
            iterations: 64,
            reason: format!("Lambert W Halley iteration diverged at z = {z}"),
        })
    }
}
