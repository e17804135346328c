//! Bracketing root finder: bisection interleaved with false-position steps.

use crate::scalar::Real;

#[derive(Clone, Copy, Debug)]
pub struct RootOptions<T> {
    /// Stop only once `|f(x)| < f_tol` ...
    pub f_tol: T,
    /// ... and the bracket containing `x` is narrower than `x_tol`.
    pub x_tol: T,
    pub max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub fx: T,
    /// Bracket in which `x` was evaluated; `x` lies strictly inside it.
    pub bracket: (T, T),
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RootError<T, E> {
    NoSignChange { lo: T, hi: T },
    NotConverged { bracket: (T, T), best: T },
    Eval(E),
}

impl<T, E> From<E> for RootError<T, E> {
    fn from(e: E) -> Self {
        RootError::Eval(e)
    }
}

/// Finds a sign change of `f` inside `[lo, hi]`.
///
/// Odd iterations bisect and even iterations take a false-position step, so
/// the bracket at least halves every two evaluations. Deterministic for a
/// deterministic `f`.
pub fn bisect_secant<T: Real, E>(
    mut f: impl FnMut(T) -> Result<T, E>,
    lo: T,
    hi: T,
    opts: RootOptions<T>,
) -> Result<Root<T>, RootError<T, E>> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa.signum() == fb.signum() && fa != T::zero() && fb != T::zero() {
        return Err(RootError::NoSignChange { lo: a, hi: b });
    }

    let two = T::lit(2.0);
    let mut best = if fa.abs() < fb.abs() { a } else { b };
    let mut best_f = fa.abs().min(fb.abs());

    for iter in 1..=opts.max_iter {
        let mid = a + (b - a) / two;
        let x = if iter % 2 == 0 && fb != fa {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        if !(x > a && x < b) {
            // bracket exhausted at floating-point resolution
            break;
        }
        let fx = f(x)?;
        if fx.abs() < best_f {
            best = x;
            best_f = fx.abs();
        }
        if fx == T::zero() || (fx.abs() < opts.f_tol && b - a < opts.x_tol) {
            return Ok(Root {
                x,
                fx,
                bracket: (a, b),
                iterations: iter,
            });
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }

    Err(RootError::NotConverged {
        bracket: (a, b),
        best,
    })
}
