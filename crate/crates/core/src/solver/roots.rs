//! One-dimensional root finding and maximisation.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub fx: T,
    pub iterations: usize,
}

/// Brent's method on a bracket with `f(a) f(b) <= 0`.
///
/// Stops when the bracket is below `2 eps |x| + xtol / 2` or `f(x) == 0`.
pub fn brent_root<T: Scalar>(
    mut f: impl FnMut(T) -> T,
    a: T,
    b: T,
    xtol: T,
    max_iter: usize,
) -> Result<Root<T>> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(Root { x: a, fx: fa, iterations: 0 });
    }
    if fb == T::zero() {
        return Ok(Root { x: b, fx: fb, iterations: 0 });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket {
            lo: a.as_f64(),
            hi: b.as_f64(),
        });
    }
    let two = T::two();
    let half = T::half();
    let three = T::of(3.0);
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (b - a, b - a);
    for iter in 1..=max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * xtol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(Root {
                x: b,
                fx: fb,
                iterations: iter,
            });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = three * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else {
            b + tol1 * xm.signum()
        };
        fb = f(b);
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        reason: format!("Brent bracket still wider than tolerance near {}", b),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum<T> {
    pub x: T,
    pub fx: T,
    /// Final bracket.
    pub lo: T,
    pub hi: T,
    pub iterations: usize,
}

/// Golden-section search for a maximum of a unimodal `f` on `[a, b]`.
pub fn golden_section_max<T: Scalar>(
    mut f: impl FnMut(T) -> T,
    a: T,
    b: T,
    xtol: T,
    max_iter: usize,
) -> Extremum<T> {
    let inv_phi = (T::of(5.0).sqrt() - T::one()) * T::half();
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iterations = 0;
    while iterations < max_iter && (b - a) > xtol {
        iterations += 1;
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    let (x, fx) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    Extremum {
        x,
        fx,
        lo: a,
        hi: b,
        iterations,
    }
}
