//! Power-log asymptotics at the two endpoints of `(0, inf)`.
//!
//! Every quantity this crate manipulates behaves like `C * t^pow * (1 + |log t|)^log`
//! near `0+` and near `inf` (the constant is not tracked). Carrying these
//! exponents through products, powers, sums, integrals and running suprema is
//! what lets divergence be classified analytically instead of by truncation.

/// Which endpoint of `(0, inf)` an [`Asym`] describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Zero,
    Inf,
}

/// Local behavior of a non-negative quantity at an endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Asym {
    /// Identically zero in a neighborhood of the endpoint.
    Zero,
    /// Asymptotic to `C * t^pow * (1 + |log t|)^log` with some `C > 0`.
    PowLog { pow: f64, log: f64 },
    /// Already infinite (a divergent integral propagated through).
    Infinite,
}

/// Limit classification at an endpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tendency {
    ToZero,
    ToFinite,
    ToInfinity,
}

/// Exponents that land within a float-noise band of an integer are snapped
/// onto it: the integration and tendency rules branch on the critical values
/// -1 and 0, and exponents composed through conjugates otherwise miss them
/// by a few ulps (a `pow + 1` of 2e-16 would then manufacture huge spurious
/// endpoint masses).
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x
    }
}

impl Asym {
    pub const ONE: Asym = Asym::PowLog { pow: 0.0, log: 0.0 };

    pub fn powlog(pow: f64, log: f64) -> Asym {
        Asym::PowLog {
            pow: snap(pow),
            log: snap(log),
        }
    }

    /// What the quantity tends to at `end`.
    pub fn tendency(self, end: End) -> Tendency {
        match self {
            Asym::Zero => Tendency::ToZero,
            Asym::Infinite => Tendency::ToInfinity,
            Asym::PowLog { pow, log } => {
                // at 0+: t^pow -> 0 iff pow > 0; at inf: t^pow -> 0 iff pow < 0
                let grows = match end {
                    End::Zero => pow < 0.0 || (pow == 0.0 && log > 0.0),
                    End::Inf => pow > 0.0 || (pow == 0.0 && log > 0.0),
                };
                let vanishes = match end {
                    End::Zero => pow > 0.0 || (pow == 0.0 && log < 0.0),
                    End::Inf => pow < 0.0 || (pow == 0.0 && log < 0.0),
                };
                if grows {
                    Tendency::ToInfinity
                } else if vanishes {
                    Tendency::ToZero
                } else {
                    Tendency::ToFinite
                }
            }
        }
    }

    pub fn diverges(self, end: End) -> bool {
        self.tendency(end) == Tendency::ToInfinity
    }

    /// Product, honoring `0 * inf = 0`.
    pub fn mul(self, other: Asym) -> Asym {
        match (self, other) {
            (Asym::Zero, _) | (_, Asym::Zero) => Asym::Zero,
            (Asym::Infinite, _) | (_, Asym::Infinite) => Asym::Infinite,
            (Asym::PowLog { pow: a, log: b }, Asym::PowLog { pow: c, log: d }) => {
                Asym::powlog(a + c, b + d)
            }
        }
    }

    /// Power with a real exponent (reciprocal via `e = -1`).
    pub fn powf(self, e: f64) -> Asym {
        if e == 0.0 {
            return Asym::ONE;
        }
        match self {
            Asym::Zero => {
                if e > 0.0 {
                    Asym::Zero
                } else {
                    Asym::Infinite
                }
            }
            Asym::Infinite => {
                if e > 0.0 {
                    Asym::Infinite
                } else {
                    Asym::Zero
                }
            }
            Asym::PowLog { pow, log } => Asym::powlog(pow * e, log * e),
        }
    }

    /// Sum of two non-negative quantities: the dominant one wins at `end`.
    pub fn add(self, other: Asym, end: End) -> Asym {
        match (self, other) {
            (Asym::Zero, x) | (x, Asym::Zero) => x,
            (Asym::Infinite, _) | (_, Asym::Infinite) => Asym::Infinite,
            (Asym::PowLog { pow: a, log: b }, Asym::PowLog { pow: c, log: d }) => {
                let first_dominates = match end {
                    End::Zero => a < c || (a == c && b >= d),
                    End::Inf => a > c || (a == c && b >= d),
                };
                if first_dominates {
                    self
                } else {
                    other
                }
            }
        }
    }

    /// Maximum of two non-negative quantities (same dominance rule as `add`).
    pub fn max(self, other: Asym, end: End) -> Asym {
        match (self, other) {
            (Asym::Zero, x) | (x, Asym::Zero) => x,
            _ => self.add(other, end),
        }
    }
}

/// Does `int_0^eps t^pow (1+|log t|)^log dt` converge?
pub fn head_converges(a: Asym) -> bool {
    match a {
        Asym::Zero => true,
        Asym::Infinite => false,
        Asym::PowLog { pow, log } => pow > -1.0 || (pow == -1.0 && log < -1.0),
    }
}

/// Does `int_T^inf t^pow (1+|log t|)^log dt` converge?
pub fn tail_converges(a: Asym) -> bool {
    match a {
        Asym::Zero => true,
        Asym::Infinite => false,
        Asym::PowLog { pow, log } => pow < -1.0 || (pow == -1.0 && log < -1.0),
    }
}

/// Asymptotics of the primitive `t -> int_0^t f` at both ends, given `f`'s
/// asymptotics. Returns `(at_zero, at_inf)`; a divergent head makes the whole
/// primitive `Infinite`.
pub fn head_integral_asym(f0: Asym, finf: Asym) -> (Asym, Asym) {
    if !head_converges(f0) {
        return (Asym::Infinite, Asym::Infinite);
    }
    let at_zero = match f0 {
        Asym::Zero => Asym::Zero,
        Asym::Infinite => Asym::Infinite,
        Asym::PowLog { pow, log } => {
            if pow > -1.0 {
                Asym::powlog(pow + 1.0, log)
            } else {
                // pow == -1, log < -1: remaining head mass ~ (1+|log t|)^(log+1)
                Asym::powlog(0.0, log + 1.0)
            }
        }
    };
    let at_inf = if tail_converges(finf) {
        Asym::ONE
    } else {
        match finf {
            Asym::Infinite => Asym::Infinite,
            Asym::Zero => Asym::ONE,
            Asym::PowLog { pow, log } => {
                if pow > -1.0 {
                    Asym::powlog(pow + 1.0, log)
                } else if log > -1.0 {
                    Asym::powlog(0.0, log + 1.0)
                } else {
                    // pow == -1, log == -1: log-log divergence; exponents
                    // are both ~0, keep a marker that still reads as growth
                    Asym::PowLog {
                        pow: 0.0,
                        log: 1e-8,
                    }
                }
            }
        }
    };
    (at_zero, at_inf)
}

/// Asymptotics of `t -> int_t^inf f` at both ends.
pub fn tail_integral_asym(f0: Asym, finf: Asym) -> (Asym, Asym) {
    if !tail_converges(finf) {
        return (Asym::Infinite, Asym::Infinite);
    }
    let at_inf = match finf {
        Asym::Zero => Asym::Zero,
        Asym::Infinite => Asym::Infinite,
        Asym::PowLog { pow, log } => {
            if pow < -1.0 {
                Asym::powlog(pow + 1.0, log)
            } else {
                Asym::powlog(0.0, log + 1.0)
            }
        }
    };
    let at_zero = if head_converges(f0) {
        Asym::ONE
    } else {
        match f0 {
            Asym::Infinite => Asym::Infinite,
            Asym::Zero => Asym::ONE,
            Asym::PowLog { pow, log } => {
                if pow < -1.0 {
                    Asym::powlog(pow + 1.0, log)
                } else if log > -1.0 {
                    Asym::powlog(0.0, log + 1.0)
                } else {
                    Asym::powlog(0.0, 1e-8)
                }
            }
        }
    };
    (at_zero, at_inf)
}

/// Asymptotics of the running supremum `t -> sup_{tau >= t} f(tau)`.
pub fn revsup_asym(f0: Asym, finf: Asym) -> (Asym, Asym) {
    let at_inf = match finf.tendency(End::Inf) {
        Tendency::ToInfinity => Asym::Infinite,
        Tendency::ToFinite => Asym::ONE,
        Tendency::ToZero => finf,
    };
    let at_zero = if finf.tendency(End::Inf) == Tendency::ToInfinity {
        Asym::Infinite
    } else {
        match f0.tendency(End::Zero) {
            Tendency::ToInfinity => f0,
            _ => Asym::ONE,
        }
    };
    (at_zero, at_inf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tendencies() {
        let a = Asym::powlog(-0.5, 0.0);
        assert_eq!(a.tendency(End::Zero), Tendency::ToInfinity);
        assert_eq!(a.tendency(End::Inf), Tendency::ToZero);
        let b = Asym::powlog(0.0, 2.0);
        assert_eq!(b.tendency(End::Zero), Tendency::ToInfinity);
        assert_eq!(b.tendency(End::Inf), Tendency::ToInfinity);
        assert_eq!(Asym::ONE.tendency(End::Inf), Tendency::ToFinite);
    }

    #[test]
    fn integral_rules() {
        // int_0^t s^-1 ds diverges
        let (z, _) = head_integral_asym(Asym::powlog(-1.0, 0.0), Asym::powlog(-2.0, 0.0));
        assert_eq!(z, Asym::Infinite);
        // int_0^t 1 ds = t
        let (z, i) = head_integral_asym(Asym::ONE, Asym::ONE);
        assert_eq!(z, Asym::powlog(1.0, 0.0));
        assert_eq!(i, Asym::powlog(1.0, 0.0));
        // int_t^inf s^-2 ds = 1/t at inf, constant at 0
        let (z, i) = tail_integral_asym(Asym::powlog(-1.0, 0.0), Asym::powlog(-2.0, 0.0));
        assert_eq!(i, Asym::powlog(-1.0, 0.0));
        // head of s^-1 diverges, so the tail integral blows up at 0 like log
        assert_eq!(z, Asym::powlog(0.0, 1.0));
    }

    #[test]
    fn dominance() {
        let a = Asym::powlog(0.5, 0.0);
        let b = Asym::powlog(2.0, 0.0);
        // near zero the smaller power dominates
        assert_eq!(a.add(b, End::Zero), a);
        // near infinity the larger power dominates
        assert_eq!(a.add(b, End::Inf), b);
    }
}
