//! Piecewise power-log weights on `(0, inf)`.
//!
//! A weight is a finite list of pieces, each of the form
//! `c * t^a * (1 + |log t|)^beta` on `[lo_i, lo_{i+1})`, the last piece
//! extending to infinity. The family is closed under pointwise powers and
//! multiplication by `t^gamma`, it admits closed-form or log-substituted
//! antiderivatives, and divergence of its integrals is decided by exponent
//! rules rather than by truncation.

use crate::asym::{head_converges, tail_converges, Asym, End};
use crate::error::{Error, Result};
use crate::quad;
use serde::{Deserialize, Serialize};

/// One piece `coeff * t^pow * (1 + |log t|)^log_exp` valid from `lo` to the
/// next breakpoint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub coeff: f64,
    pub pow: f64,
    pub log_exp: f64,
}

/// A non-negative piecewise power-log function on `(0, inf)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pieces: Vec<Piece>,
}

impl Weight {
    /// Build a weight from `(lo, coeff, pow, log_exp)` tuples. The first `lo`
    /// must be `0`, breakpoints must increase strictly, coefficients must be
    /// non-negative and finite.
    pub fn new(pieces: &[(f64, f64, f64, f64)]) -> Result<Weight> {
        if pieces.is_empty() {
            return Err(Error::Weight("at least one piece required".into()));
        }
        if pieces[0].0 != 0.0 {
            return Err(Error::Weight(format!(
                "first breakpoint must be 0, got {}",
                pieces[0].0
            )));
        }
        let mut prev = -1.0;
        for &(lo, c, a, b) in pieces {
            if !(lo > prev) {
                return Err(Error::Weight(format!(
                    "breakpoints must increase strictly ({prev} then {lo})"
                )));
            }
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::Weight(format!(
                    "coefficient {c} must be finite and >= 0"
                )));
            }
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::Weight("exponents must be finite".into()));
            }
            prev = lo;
        }
        Ok(Weight {
            pieces: pieces
                .iter()
                .map(|&(lo, coeff, pow, log_exp)| Piece {
                    lo,
                    coeff,
                    pow,
                    log_exp,
                })
                .collect(),
        })
    }

    fn from_pieces(pieces: Vec<Piece>) -> Weight {
        Weight { pieces }
    }

    /// Constant weight `c`.
    pub fn constant(c: f64) -> Weight {
        Weight::new(&[(0.0, c, 0.0, 0.0)]).expect("constant weight")
    }

    /// The weight `1`.
    pub fn one() -> Weight {
        Weight::constant(1.0)
    }

    /// The power weight `c * t^a`.
    pub fn power(c: f64, a: f64) -> Weight {
        Weight::new(&[(0.0, c, a, 0.0)]).expect("power weight")
    }

    /// Indicator of `(0, hi]` (zero beyond `hi`).
    pub fn indicator(hi: f64) -> Weight {
        Weight::new(&[(0.0, 1.0, 0.0, 0.0), (hi, 0.0, 0.0, 0.0)]).expect("indicator")
    }

    /// Indicator of `(lo, hi]`.
    pub fn window(lo: f64, hi: f64) -> Weight {
        Weight::new(&[
            (0.0, 0.0, 0.0, 0.0),
            (lo, 1.0, 0.0, 0.0),
            (hi, 0.0, 0.0, 0.0),
        ])
        .expect("window")
    }

    /// The logarithmic weight `(1 + |log t|)^{a0}` on `(0,1]` and
    /// `(1 + |log t|)^{a_inf}` on `(1, inf)`.
    pub fn ell(a0: f64, a_inf: f64) -> Weight {
        Weight::new(&[(0.0, 1.0, 0.0, a0), (1.0, 1.0, 0.0, a_inf)]).expect("ell weight")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.coeff == 0.0)
    }

    /// True when some piece has coefficient zero (the function vanishes on a
    /// set of positive measure).
    pub fn has_zero_piece(&self) -> bool {
        self.pieces.iter().any(|p| p.coeff == 0.0)
    }

    /// Pieces cover `(lo_i, lo_{i+1}]` (left-open), matching the
    /// left-continuity of the indicator weights `chi_(0,a]`.
    fn piece_index(&self, t: f64) -> usize {
        match self.pieces.iter().position(|p| p.lo >= t) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => self.pieces.len() - 1,
        }
    }

    /// Point evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0, "weights live on (0, inf)");
        let p = self.pieces[self.piece_index(t)];
        piece_value(p, t)
    }

    /// Pointwise power: `(c t^a L^b)^e` stays in the family. Pieces with zero
    /// coefficient and negative exponent become infinite-coefficient pieces;
    /// integrals overlapping them are infinite.
    pub fn powf(&self, e: f64) -> Weight {
        Weight::from_pieces(
            self.pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo,
                    coeff: crate::xreal::xpow(p.coeff, e),
                    pow: p.pow * e,
                    log_exp: p.log_exp * e,
                })
                .collect(),
        )
    }

    /// Multiply by `t^gamma` (stays in the family).
    pub fn mul_power(&self, gamma: f64) -> Weight {
        Weight::from_pieces(
            self.pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo,
                    coeff: p.coeff,
                    pow: p.pow + gamma,
                    ..*p
                })
                .collect(),
        )
    }

    /// Pointwise product of two family members (breakpoints merge, exponents
    /// add piecewise).
    pub fn mul(&self, other: &Weight) -> Weight {
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .map(|p| p.lo)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
        cuts.dedup();
        let pieces = (0..cuts.len())
            .map(|i| {
                let lo = cuts[i];
                // probe strictly inside the (left-open) merged piece
                let probe =
                    cuts.get(i + 1)
                        .copied()
                        .unwrap_or(if lo == 0.0 { 1.0 } else { lo * 2.0 });
                let a = self.pieces[self.piece_index(probe)];
                let b = other.pieces[other.piece_index(probe)];
                Piece {
                    lo,
                    coeff: a.coeff * b.coeff,
                    pow: a.pow + b.pow,
                    log_exp: a.log_exp + b.log_exp,
                }
            })
            .collect();
        Weight::from_pieces(pieces)
    }

    /// Scale by a positive constant.
    pub fn scale(&self, c: f64) -> Weight {
        Weight::from_pieces(
            self.pieces
                .iter()
                .map(|p| Piece {
                    coeff: p.coeff * c,
                    ..*p
                })
                .collect(),
        )
    }

    /// Behavior near `0+` (from the first piece) and near `inf` (last piece).
    pub fn asym(&self, end: End) -> Asym {
        let p = match end {
            End::Zero => self.pieces[0],
            End::Inf => self.pieces[self.pieces.len() - 1],
        };
        if p.coeff == 0.0 {
            Asym::Zero
        } else if p.coeff.is_infinite() {
            Asym::Infinite
        } else {
            Asym::powlog(p.pow, p.log_exp)
        }
    }

    /// Is the weight non-increasing on `(0, inf)`? Decided per piece by the
    /// sign of the exponents with a sampled fallback for mixed power-log
    /// pieces, plus junction checks.
    pub fn is_non_increasing(&self) -> bool {
        let n = self.pieces.len();
        for (i, p) in self.pieces.iter().enumerate() {
            if p.coeff == 0.0 {
                // once zero, later pieces must stay zero
                if self.pieces[i..].iter().any(|r| r.coeff != 0.0) {
                    return false;
                }
                break;
            }
            if p.pow > 0.0 {
                return false;
            }
            let hi = if i + 1 < n {
                self.pieces[i + 1].lo
            } else {
                p.lo.max(1.0) * 1e6
            };
            let lo = if p.lo == 0.0 { hi * 1e-9 } else { p.lo };
            if p.log_exp != 0.0 {
                let mut prev = f64::INFINITY;
                for k in 0..=16 {
                    let t = lo * (hi / lo).powf(k as f64 / 16.0);
                    let val = piece_value(*p, t);
                    if val > prev * (1.0 + 1e-12) {
                        return false;
                    }
                    prev = val;
                }
            }
        }
        for w in self.pieces.windows(2) {
            let t = w[1].lo;
            if piece_value(w[1], t) > piece_value(w[0], t) * (1.0 + 1e-12) {
                return false;
            }
        }
        true
    }

    /// Is `u` continuous across its interior breakpoints? Required of the
    /// `u` role in the supremal operator.
    pub fn is_continuous(&self) -> bool {
        for w in self.pieces.windows(2) {
            let (a, b) = (w[0], w[1]);
            let t = b.lo;
            let left = piece_value(a, t);
            let right = piece_value(b, t);
            let scale = left.abs().max(right.abs()).max(1e-300);
            if (left - right).abs() > 1e-9 * scale {
                return false;
            }
        }
        true
    }

    /// `int_a^b w` with analytic divergence classification. `b` may be
    /// `f64::INFINITY`; `a = 0` is allowed. Divergent integrals return
    /// `inf`, never a truncated finite value.
    pub fn primitive(&self, a: f64, b: f64) -> Result<f64> {
        if !(a >= 0.0) || !(b > a) {
            if a == b {
                return Ok(0.0);
            }
            return Err(Error::Domain(format!(
                "primitive needs 0 <= a < b, got [{a}, {b}]"
            )));
        }
        // analytic head/tail classification first
        if a == 0.0 {
            let first = self.pieces[0];
            if first.coeff != 0.0 && !head_converges(self.asym(End::Zero)) {
                return Ok(f64::INFINITY);
            }
            if first.coeff.is_infinite() {
                return Ok(f64::INFINITY);
            }
        }
        if b == f64::INFINITY {
            let last = self.pieces[self.pieces.len() - 1];
            let last_lo = last.lo.max(a);
            if last.coeff != 0.0 && !tail_converges(self.asym(End::Inf)) {
                return Ok(f64::INFINITY);
            }
            if last.coeff.is_infinite() && last_lo < b {
                return Ok(f64::INFINITY);
            }
        }
        let mut total = 0.0;
        for (i, p) in self.pieces.iter().enumerate() {
            let hi = if i + 1 < self.pieces.len() {
                self.pieces[i + 1].lo
            } else {
                f64::INFINITY
            };
            let lo = p.lo.max(a);
            let hi = hi.min(b);
            if !(hi > lo) || p.coeff == 0.0 {
                continue;
            }
            if p.coeff.is_infinite() {
                return Ok(f64::INFINITY);
            }
            total += piece_integral(*p, lo, hi);
            if total.is_infinite() {
                return Ok(f64::INFINITY);
            }
        }
        Ok(total)
    }

    /// `B(t) = int_0^t b`; errors when the cumulative is degenerate
    /// (`B(t) = 0` or `B(t) = inf`).
    pub fn cumulative_b(&self, t: f64) -> Result<f64> {
        let v = self.primitive(0.0, t)?;
        if v == 0.0 {
            return Err(Error::Domain(format!("B({t}) = 0: b vanishes near 0")));
        }
        if v.is_infinite() {
            return Err(Error::Domain(format!("B({t}) divergent at 0")));
        }
        Ok(v)
    }
}

fn piece_value(p: Piece, t: f64) -> f64 {
    if p.coeff == 0.0 {
        return 0.0;
    }
    let logf = (1.0 + t.ln().abs()).powf(p.log_exp);
    p.coeff * t.powf(p.pow) * logf
}

/// Integral of a single piece over `[lo, hi]` inside its validity range,
/// endpoints possibly `0` or `inf` (convergence already established).
fn piece_integral(p: Piece, lo: f64, hi: f64) -> f64 {
    // split at 1 so |log t| has constant sign
    if lo < 1.0 && hi > 1.0 {
        return piece_integral(p, lo, 1.0) + piece_integral(p, 1.0, hi);
    }
    if p.log_exp == 0.0 {
        return power_integral(p.coeff, p.pow, lo, hi);
    }
    if p.pow == -1.0 {
        // substitute u = 1 + |log t|: exact power integral in u
        return p.coeff * log_piece_integral(p.log_exp, lo, hi);
    }
    // quadrature in s = log t: integrand c * exp((pow+1) s) (1+|s|)^log_exp.
    // Convergence at an improper end was classified upstream, so lam > 0 when
    // lo = 0 and lam < 0 when hi = inf; the exponential factor lets those
    // ends be truncated at negligible remainder.
    let lam = p.pow + 1.0;
    let g = |s: f64| (lam * s).exp() * (1.0 + s.abs()).powf(p.log_exp);
    let s0 = if lo == 0.0 {
        hi.ln() - truncation_span(lam, p.log_exp, hi.ln())
    } else {
        lo.ln()
    };
    let s1 = if hi.is_infinite() {
        lo.ln() + truncation_span(lam, p.log_exp, lo.ln())
    } else {
        hi.ln()
    };
    p.coeff * quad::integrate(g, s0, s1, 1e-12)
}

/// Distance in log-space after which `exp(lam s)(1+|s|)^beta` has dropped by
/// a factor ~e^-80 relative to the finite end at `s_edge`.
fn truncation_span(lam: f64, beta: f64, s_edge: f64) -> f64 {
    let rate = lam.abs().max(1e-12);
    let mut delta = 80.0 / rate;
    for _ in 0..8 {
        delta = (80.0 + beta.abs() * (1.0 + delta + s_edge.abs()).ln()) / rate;
    }
    delta.min(1e6)
}

fn power_integral(c: f64, a: f64, lo: f64, hi: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    if a == -1.0 {
        return c * (hi / lo).ln();
    }
    let e = a + 1.0;
    let hi_part = if hi.is_infinite() { 0.0 } else { hi.powf(e) };
    let lo_part = if lo == 0.0 { 0.0 } else { lo.powf(e) };
    // convergence was classified upstream, so inf - finite cannot occur here
    c * (hi_part - lo_part) / e
}

/// `int_lo^hi t^-1 (1+|log t|)^beta dt` with `[lo, hi]` on one side of 1.
fn log_piece_integral(beta: f64, lo: f64, hi: f64) -> f64 {
    let u = |t: f64| -> f64 {
        if t == 0.0 || t.is_infinite() {
            f64::INFINITY
        } else {
            1.0 + t.ln().abs()
        }
    };
    let (u_lo, u_hi) = if hi <= 1.0 {
        (u(hi), u(lo))
    } else {
        (u(lo), u(hi))
    };
    if beta == -1.0 {
        return (u_hi / u_lo).ln();
    }
    let e = beta + 1.0;
    let top = if u_hi.is_infinite() {
        0.0
    } else {
        u_hi.powf(e)
    };
    (top - u_lo.powf(e)) / e
}

/// A two-piece power weight inside the admissible class for the ratio `m/p`:
/// `s^-1` on `(0,1]` (non-integrable head, integrable against `s^{m/p}`) and
/// a tail exponent placed so the tail is integrable while its `s^{m/p}`
/// moment diverges.
pub fn member_weight(m: f64, p: f64) -> Weight {
    let tail = -1.0 - 0.5 * (m / p).min(1.0);
    Weight::new(&[(0.0, 1.0, -1.0, 0.0), (1.0, 1.0, tail, 0.0)]).expect("member weight")
}

/// Verdicts of the admissibility check for membership in the weight class
/// used by the generalized Lorentz space.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub nontriv_ok: bool,
    pub nondegen_ok: bool,
    pub diagnostics: Vec<(String, String)>,
}

impl AdmissibilityReport {
    pub fn is_member(&self) -> bool {
        self.nontriv_ok && self.nondegen_ok
    }
}

/// Check the two structural conditions on `v`: finiteness of
/// `int_0^t v s^{m/p} ds + int_t^inf v ds` for all `t`, and divergence of
/// `int_0^1 v` and `int_1^inf v s^{m/p}`. All four verdicts come from
/// exponent rules on the power-log family; probe values are recorded as
/// evidence.
pub fn check_admissibility(v: &Weight, m: f64, p: f64) -> AdmissibilityReport {
    let r = m / p;
    let mut diagnostics = Vec::new();

    let head_density = v.mul_power(r); // v(s) s^{m/p}
    let head_ok = head_converges(head_density.asym(End::Zero));
    let tail_ok = tail_converges(v.asym(End::Inf));
    for &t in &[1e-8, 1.0, 1e8] {
        let head = if head_ok {
            head_density.primitive(0.0, t).unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        };
        let tail = if tail_ok {
            v.primitive(t, f64::INFINITY).unwrap_or(f64::INFINITY)
        } else {
            f64::INFINITY
        };
        diagnostics.push((
            format!("int_0^{t:.0e} v s^(m/p) ds"),
            if head_ok {
                format!("{head:.6e}")
            } else {
                "divergent".into()
            },
        ));
        diagnostics.push((
            format!("int_{t:.0e}^inf v ds"),
            if tail_ok {
                format!("{tail:.6e}")
            } else {
                "divergent".into()
            },
        ));
    }
    let nontriv_ok = head_ok && tail_ok;

    let head_div = !head_converges(v.asym(End::Zero));
    let tail_div = !tail_converges(head_density.asym(End::Inf));
    diagnostics.push((
        "int_0^1 v ds".into(),
        if head_div {
            format!("divergent (rate {:?})", v.asym(End::Zero))
        } else {
            format!(
                "{:.6e} (finite: degenerate)",
                v.primitive(0.0, 1.0).unwrap_or(0.0)
            )
        },
    ));
    diagnostics.push((
        "int_1^inf v s^(m/p) ds".into(),
        if tail_div {
            format!("divergent (rate {:?})", head_density.asym(End::Inf))
        } else {
            "finite: degenerate".into()
        },
    ));
    let nondegen_ok = head_div && tail_div;

    AdmissibilityReport {
        nontriv_ok,
        nondegen_ok,
        diagnostics,
    }
}

/// Structural conditions checkable on the power-log family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ShapeKind {
    Delta2,
    QuasiIncreasing,
    /// `Q_r` superadditivity condition with the given `r`.
    Qr(f64),
    /// `B(t) / t^{alpha/r}` quasi-increasing, for `b` the weight under test.
    BOverPower {
        alpha: f64,
        r: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeVerdict {
    Holds,
    Fails,
    BoundaryInconclusive,
}

/// Decide a shape condition by exponent rules.
pub fn check_shape(f: &Weight, kind: ShapeKind) -> ShapeVerdict {
    match kind {
        ShapeKind::Delta2 => ShapeVerdict::Holds, // finite exponents double harmlessly
        ShapeKind::QuasiIncreasing => quasi_increasing(f),
        ShapeKind::Qr(r) => {
            let mut verdict = ShapeVerdict::Holds;
            for p in f.pieces() {
                if p.coeff == 0.0 {
                    continue;
                }
                // float-noise band around the critical product
                let lr = p.pow * r;
                if lr > 1.0 + 1e-9 {
                    return ShapeVerdict::Fails;
                }
                if (lr - 1.0).abs() <= 1e-9 && p.log_exp != 0.0 {
                    verdict = ShapeVerdict::BoundaryInconclusive;
                }
            }
            verdict
        }
        ShapeKind::BOverPower { alpha, r } => b_over_power(f, alpha / r),
    }
}

fn quasi_increasing(f: &Weight) -> ShapeVerdict {
    let mut verdict = ShapeVerdict::Holds;
    for p in f.pieces() {
        if p.coeff == 0.0 {
            return ShapeVerdict::Fails; // drops to zero, then positive pieces cannot recover the ratio
        }
        if p.pow < 0.0 {
            return ShapeVerdict::Fails;
        }
        if p.pow == 0.0 && p.log_exp != 0.0 {
            // the log factor moves in opposite directions on the two sides
            // of 1; a piece confined to one side with the favorable sign is
            // still fine, anything else is a boundary case
            let hi_side = p.lo >= 1.0;
            let ok = if hi_side { p.log_exp >= 0.0 } else { false };
            if !ok {
                verdict = ShapeVerdict::BoundaryInconclusive;
            }
        }
    }
    verdict
}

/// Quasi-increasingness of `B(t)/t^gamma`, decided from the endpoint growth
/// of `B`: the ratio must not blow up at 0 nor decay to 0 at infinity.
fn b_over_power(b: &Weight, gamma: f64) -> ShapeVerdict {
    let first = b.pieces()[0];
    let last = b.pieces()[b.pieces().len() - 1];
    if first.coeff == 0.0 || last.coeff == 0.0 {
        return ShapeVerdict::Fails;
    }
    // near 0: B ~ t^(a0+1) (head integral rule)
    let a0 = first.pow + 1.0;
    if a0 < gamma {
        return ShapeVerdict::Fails; // ratio -> inf at 0
    }
    // near inf: if int^inf b converges, B -> const and the ratio decays
    if tail_converges(b.asym(End::Inf)) {
        if gamma > 0.0 {
            return ShapeVerdict::Fails;
        }
    } else {
        let ainf = last.pow + 1.0;
        if ainf < gamma {
            return ShapeVerdict::Fails;
        }
        if ainf == gamma && last.log_exp != 0.0 {
            return ShapeVerdict::BoundaryInconclusive;
        }
    }
    if a0 == gamma && first.log_exp != 0.0 {
        return ShapeVerdict::BoundaryInconclusive;
    }
    ShapeVerdict::Holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xreal::rel_err;

    #[test]
    fn eval_identity_power() {
        let w = Weight::power(1.0, 1.0);
        assert_eq!(w.eval(2.0), 2.0);
    }

    #[test]
    fn eval_ell_weight() {
        // (1+|log t|)^1 at t = 1/e is 2
        let w = Weight::ell(1.0, 0.0);
        let t = (-1.0f64).exp();
        assert!((w.eval(t) - 2.0).abs() < 1e-12);
        assert_eq!(w.eval(2.0), 1.0);
    }

    #[test]
    fn eval_tail_power() {
        let w = Weight::new(&[(0.0, 1.0, 0.0, 0.0), (1.0, 1.0, -2.0, 0.0)]).unwrap();
        assert!((w.eval(4.0) - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn primitive_constant() {
        let w = Weight::one();
        assert!((w.primitive(0.0, 3.0).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn primitive_tail() {
        let w = Weight::power(1.0, -2.0);
        assert!((w.primitive(1.0, f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn primitive_divergent_head() {
        let w = Weight::power(1.0, -1.0);
        assert_eq!(w.primitive(0.0, 1.0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn primitive_additivity() {
        let w = Weight::new(&[(0.0, 2.0, 0.5, 0.0), (2.0, 1.0, -1.5, 0.0)]).unwrap();
        let full = w.primitive(0.1, 10.0).unwrap();
        let split = w.primitive(0.1, 2.0).unwrap() + w.primitive(2.0, 10.0).unwrap();
        assert!(rel_err(full, split) < 1e-12);
    }

    #[test]
    fn primitive_log_piece_exact_substitution() {
        // int_0^1 t^-1 (1+|log t|)^-3 dt = int_1^inf u^-3 du = 1/2
        let w = Weight::new(&[(0.0, 1.0, -1.0, -3.0)]).unwrap();
        assert!((w.primitive(0.0, 1.0).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn primitive_log_quadrature_vs_closed_form() {
        // int_1^e t^0 (1+log t)^1 dt: substitute s=log t -> int_0^1 e^s (1+s) ds = 2e - 2... check numerically
        let w = Weight::new(&[(0.0, 1.0, 0.0, 1.0)]).unwrap();
        let got = w.primitive(1.0, std::f64::consts::E).unwrap();
        let exact = quad::integrate(|t: f64| 1.0 + t.ln(), 1.0, std::f64::consts::E, 1e-13);
        assert!(rel_err(got, exact) < 1e-10, "got {got} exact {exact}");
    }

    #[test]
    fn cumulative_b_examples() {
        let b = Weight::one();
        assert!((b.cumulative_b(5.0).unwrap() - 5.0).abs() < 1e-14);

        let b = Weight::new(&[(0.0, 1.0, 1.0, 0.0), (1.0, 1.0, -1.0, 0.0)]).unwrap();
        let v = b.cumulative_b(std::f64::consts::E).unwrap();
        assert!((v - 1.5).abs() < 1e-12);

        let b = Weight::power(1.0, -2.0);
        assert!(matches!(b.cumulative_b(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn admissibility_examples() {
        // v = s^-1 on (0,1], s^-2 after; m = p
        let v = Weight::new(&[(0.0, 1.0, -1.0, 0.0), (1.0, 1.0, -2.0, 0.0)]).unwrap();
        let rep = check_admissibility(&v, 2.0, 2.0);
        assert!(rep.nontriv_ok && rep.nondegen_ok && rep.is_member());

        // v = 1 fails: int_t^inf v = inf
        let rep = check_admissibility(&Weight::one(), 2.0, 2.0);
        assert!(!rep.nontriv_ok);
    }

    #[test]
    fn shape_examples() {
        let phi = Weight::power(1.0, 0.5);
        assert_eq!(check_shape(&phi, ShapeKind::Qr(2.0)), ShapeVerdict::Holds);
        let phi = Weight::power(1.0, 2.0);
        assert_eq!(
            check_shape(&phi, ShapeKind::QuasiIncreasing),
            ShapeVerdict::Holds
        );
        let phi = Weight::power(1.0, -1.0);
        assert_eq!(
            check_shape(&phi, ShapeKind::QuasiIncreasing),
            ShapeVerdict::Fails
        );
        let phi = Weight::power(1.0, 0.6);
        assert_eq!(check_shape(&phi, ShapeKind::Qr(2.0)), ShapeVerdict::Fails);
        // delta2 holds across the family
        let w = Weight::new(&[(0.0, 3.0, -0.5, 1.0), (2.0, 1.0, 4.0, -2.0)]).unwrap();
        assert_eq!(check_shape(&w, ShapeKind::Delta2), ShapeVerdict::Holds);
    }

    #[test]
    fn b_over_power_shape() {
        // b = 1: B = t, B/t^(1/2) increasing
        assert_eq!(
            check_shape(&Weight::one(), ShapeKind::BOverPower { alpha: 1.0, r: 2.0 }),
            ShapeVerdict::Holds
        );
        // B = t against gamma = 2: t/t^2 decays
        assert_eq!(
            check_shape(&Weight::one(), ShapeKind::BOverPower { alpha: 2.0, r: 1.0 }),
            ShapeVerdict::Fails
        );
    }

    #[test]
    fn negative_coefficient_rejected() {
        assert!(Weight::new(&[(0.0, -1.0, 0.0, 0.0)]).is_err());
    }

    #[test]
    fn powf_closed_under_family() {
        let v = Weight::power(2.0, 3.0);
        let w = v.powf(-0.5);
        let t = 1.7;
        assert!(rel_err(w.eval(t), (2.0f64 * t.powi(3)).powf(-0.5)) < 1e-14);
    }
}
