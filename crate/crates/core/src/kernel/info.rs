//! Scalar information functions of a single spacing `x`.
//!
//! Everything is written in `q = exp(-lambda x)` with `expm1` for the small differences,
//! so nothing overflows for large `lambda x` and the `x -> 0` limits are approached
//! smoothly. The value at exactly `x = 0` is the limit.
//!
//! * `g`: trend information gained per spacing, `Q(n) = 1 + sum g(d_l)`;
//! * `phi`, `psi`: information on `lambda` and `omega` per spacing;
//! * `r`: numerator of `g'`, `g'(x) = r(x) / sinh^2(lambda x)`;
//! * `kappa`: ratio whose level sets give the critical points of `(sum phi)(sum psi)`.

use super::OuParams;
use crate::scalar::Scalar;

#[inline]
fn decay<T: Scalar>(lambda: T, x: T) -> (T, T) {
    let q = (-lambda * x).exp();
    let one_minus_q2 = -(-T::two() * lambda * x).exp_m1();
    (q, one_minus_q2)
}

/// `g(x) = (1 - 2 q cos(omega x) + q^2) / (1 - q^2)`, `g(0) = 0`.
pub fn g_func<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let lambda = p.lambda();
    let (q, one_minus_q2) = decay(lambda, x);
    let em1 = (-lambda * x).exp_m1();
    let half = (p.omega() * x * T::half()).sin();
    (em1 * em1 + T::of(4.0) * q * half * half) / one_minus_q2
}

/// `g(x) - 1 = 2 q (q - cos(omega x)) / (1 - q^2)`, exact in relative terms where `g`
/// itself rounds to one.
pub fn g_excess<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    if x == T::zero() {
        return -T::one();
    }
    let (q, one_minus_q2) = decay(p.lambda(), x);
    T::two() * q * (q - (p.omega() * x).cos()) / one_minus_q2
}

/// `(1 + q)/(1 - q) - 1`: excess of the decreasing majorant of `g` (cosine replaced by -1).
pub fn g_envelope_excess<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    if x == T::zero() {
        return T::infinity();
    }
    let q = (-p.lambda() * x).exp();
    T::two() * q / -(-p.lambda() * x).exp_m1()
}

/// `r(x) = lambda cosh(lambda x) cos(omega x) + omega sinh(lambda x) sin(omega x) - lambda`.
pub fn r_func<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    let (lambda, omega) = (p.lambda(), p.omega());
    let sh = (lambda * x * T::half()).sinh();
    let sw = (omega * x * T::half()).sin();
    let (s, c) = (omega * x).sin_cos();
    T::two() * lambda * sh * sh * c - T::two() * lambda * sw * sw + omega * (lambda * x).sinh() * s
}

/// `2 q r(x)`: same sign as `r`, bounded for every `x`.
pub fn r_scaled<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    let (lambda, omega) = (p.lambda(), p.omega());
    let (q, one_minus_q2) = decay(lambda, x);
    let em1 = (-lambda * x).exp_m1();
    let sw = (omega * x * T::half()).sin();
    let (s, c) = (omega * x).sin_cos();
    lambda * em1 * em1 * c - T::of(4.0) * lambda * q * sw * sw + omega * one_minus_q2 * s
}

/// `g'(x)`; at `0` the right limit `omega^2 / (2 lambda) + lambda / 2`.
pub fn g_prime<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    let lambda = p.lambda();
    if x == T::zero() {
        return (p.omega() * p.omega() + lambda * lambda) / (T::two() * lambda);
    }
    let (q, one_minus_q2) = decay(lambda, x);
    T::two() * q * r_scaled(p, x) / (one_minus_q2 * one_minus_q2)
}

/// `g''` at a critical point `x` of `g`: `(lambda^2 + omega^2) cos(omega x) / sinh(lambda x)`.
pub fn g_second_at_critical<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    let (lambda, omega) = (p.lambda(), p.omega());
    (lambda * lambda + omega * omega) * (omega * x).cos() / (lambda * x).sinh()
}

/// `phi(x) = 2 x^2 q^2 (1 + q^2) / (1 - q^2)^2`, `phi(0) = 1 / lambda^2`.
pub fn phi_func<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    let lambda = p.lambda();
    if x == T::zero() {
        return (lambda * lambda).recip();
    }
    let (q, v) = decay(lambda, x);
    let u = q * q;
    T::two() * x * x * u * (T::one() + u) / (v * v)
}

/// `psi(x) = 2 x^2 q^2 / (1 - q^2)`, `psi(0) = 0`.
pub fn psi_func<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let (q, v) = decay(p.lambda(), x);
    T::two() * x * x * q * q / v
}

/// `phi'(x) = 4 x u (1 - lambda x - 3 lambda x u - u^2) / (1 - u)^3` with `u = q^2`.
pub fn phi_prime<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    let lambda = p.lambda();
    if x == T::zero() {
        return -lambda.recip();
    }
    let (q, v) = decay(lambda, x);
    let u = q * q;
    let y = lambda * x;
    let m = T::one() - y - T::of(3.0) * y * u - u * u;
    T::of(4.0) * x * u * m / (v * v * v)
}

/// `psi'(x) = 4 x u (1 - lambda x - u) / (1 - u)^2`.
pub fn psi_prime<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let lambda = p.lambda();
    let (q, v) = decay(lambda, x);
    let u = q * q;
    T::of(4.0) * x * u * (v - lambda * x) / (v * v)
}

pub fn phi_second<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    let lambda = p.lambda();
    let (q, v) = decay(lambda, x);
    let u = q * q;
    let y = lambda * x;
    let four = T::of(4.0);
    let three = T::of(3.0);
    let m = T::one() - y - three * y * u - u * u;
    let dm = -lambda - three * lambda * u + T::of(6.0) * lambda * y * u + four * lambda * u * u;
    let num = four * x * u * m;
    let dnum = four * u * m - T::of(8.0) * lambda * x * u * m + four * x * u * dm;
    dnum / (v * v * v) - num * T::of(6.0) * lambda * u / (v * v * v * v)
}

pub fn psi_second<T: Scalar>(p: &OuParams<T>, x: T) -> T {
    let lambda = p.lambda();
    let (q, v) = decay(lambda, x);
    let u = q * q;
    let y = lambda * x;
    let four = T::of(4.0);
    let m = v - y;
    let num = four * x * u * m;
    let dnum = four * u * m - T::of(8.0) * lambda * x * u * m
        + four * x * u * (-lambda + T::two() * lambda * u);
    dnum / (v * v) - num * four * lambda * u / (v * v * v)
}

/// `1 - lambda d - exp(-2 lambda d)`, zero exactly at the maximiser of `psi`.
pub fn psi_critical_residual<T: Scalar>(p: &OuParams<T>, d: T) -> T {
    let y = p.lambda() * d;
    -(-T::two() * y).exp_m1() - y
}

/// `1 - x - 2 x exp(-2x) - exp(-4x)` in the scaled spacing `x = lambda d`; its positive
/// root is the common spacing maximising `(sum phi)(sum psi)`.
pub fn joint_critical_residual<T: Scalar>(x: T) -> T {
    let u = (-T::two() * x).exp();
    T::one() - x - T::two() * x * u - u * u
}

/// `kappa(x) = (1 - x + (x - 2) e^{-2x} + e^{-4x}) / (x - 1 + 3 x e^{-2x} + e^{-4x})`,
/// defined for `lambda = 1`.
pub fn kappa_func<T: Scalar>(x: T) -> T {
    let u = (-T::two() * x).exp();
    let two = T::two();
    (T::one() - x + (x - two) * u + u * u) / (x - T::one() + T::of(3.0) * x * u + u * u)
}
