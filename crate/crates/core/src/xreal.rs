//! Arithmetic on `[0, +inf]` with the conventions `0 * inf = 0`,
//! `inf / inf = 0` and `0 / 0 = 0`.
//!
//! Every quantity in this crate is a non-negative extended real; keeping the
//! conventions in one place keeps `NaN` out of the formulas.

/// Product with `0 * inf = 0`.
#[inline]
pub fn xmul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Quotient with `0 / 0 = 0` and `inf / inf = 0`.
#[inline]
pub fn xdiv(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else if a.is_infinite() && b.is_infinite() {
        0.0
    } else {
        a / b
    }
}

/// `a^e` for `a >= 0`, mapping `0^0 = 1` and keeping `0`/`inf` consistent
/// under negative exponents.
#[inline]
pub fn xpow(a: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if a == 0.0 {
        if e > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else if a.is_infinite() {
        if e > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        a.powf(e)
    }
}

/// Relative distance `|a - b| / max(|a|, |b|)`, with `0` when both vanish
/// and both-infinite treated as equal.
pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    if a.is_infinite() && b.is_infinite() {
        return 0.0;
    }
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
