//! Quartic double-well potential `F(u) = (u^2 - 1)^2 / 4` and its reaction term.

/// `F(u) = (u^2 - 1)^2 / 4`.
#[inline]
pub fn double_well(u: f64) -> f64 {
    let s = u * u - 1.0;
    0.25 * s * s
}

/// Reaction term `f(u) = -F'(u) = u - u^3`.
#[inline]
pub fn reaction(u: f64) -> f64 {
    u - u * u * u
}

/// `f'(u) = 1 - 3u^2`.
#[inline]
pub fn reaction_deriv(u: f64) -> f64 {
    1.0 - 3.0 * u * u
}

/// `sqrt(F(u))` on `[-1, 1]`, which is `(1 - u^2) / 2` there.
#[inline]
pub fn sqrt_double_well(u: f64) -> f64 {
    double_well(u).sqrt()
}
