//! Central finite differences with a Richardson cross-check.

use crate::scalar::Real;

/// A first-derivative estimate with its internal error bar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Derivative<T> {
    /// Five-point central difference with node spacing `h/2`.
    pub value: T,
    /// Richardson extrapolation combining spacings `h/2` and `h/4`.
    pub richardson: T,
    /// `|richardson - value|`.
    pub error: T,
    /// True when the function changed by less than the resolution over the
    /// stencil, so the estimate is dominated by rounding.
    pub resolution_limited: bool,
}

fn five_point<T: Real, E>(f: &mut impl FnMut(T) -> Result<T, E>, x: T, s: T) -> Result<(T, T), E> {
    let fm2 = f(x - s - s)?;
    let fm1 = f(x - s)?;
    let fp1 = f(x + s)?;
    let fp2 = f(x + s + s)?;
    let d = (fm2 - T::lit(8.0) * fm1 + T::lit(8.0) * fp1 - fp2) / (T::lit(12.0) * s);
    let spread = (fp2 - fm2).abs();
    Ok((d, spread))
}

/// First derivative of `f` at `x`. The stencil reaches `x ± h`, never further.
///
/// `resolution` is the smallest meaningful change of `f` (for example
/// `1e-6` Hz for frequencies).
pub fn derivative<T: Real, E>(
    mut f: impl FnMut(T) -> Result<T, E>,
    x: T,
    h: T,
    resolution: T,
) -> Result<Derivative<T>, E> {
    let half = h / T::lit(2.0);
    let (coarse, spread) = five_point(&mut f, x, half)?;
    let (fine, _) = five_point(&mut f, x, half / T::lit(2.0))?;
    let richardson = (T::lit(16.0) * fine - coarse) / T::lit(15.0);
    Ok(Derivative {
        value: coarse,
        richardson,
        error: (richardson - coarse).abs(),
        resolution_limited: spread < resolution,
    })
}

/// Second derivative by the five-point stencil on `x ± h, x ± 2h`.
pub fn second_derivative<T: Real, E>(
    mut f: impl FnMut(T) -> Result<T, E>,
    x: T,
    h: T,
) -> Result<T, E> {
    let f0 = f(x)?;
    let fm1 = f(x - h)?;
    let fp1 = f(x + h)?;
    let fm2 = f(x - h - h)?;
    let fp2 = f(x + h + h)?;
    Ok((-fm2 + T::lit(16.0) * (fm1 + fp1) - T::lit(30.0) * f0 - fp2) / (T::lit(12.0) * h * h))
}
