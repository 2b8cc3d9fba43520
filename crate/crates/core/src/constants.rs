//! Best-constant functionals for the background weighted inequalities and
//! the derived-weight kernels used by the main characterizations.

use crate::asym::{
    head_converges, head_integral_asym, tail_converges, tail_integral_asym, Asym, End,
};
use crate::error::{Error, Result};
use crate::gridfn::{integrate_fw, tail_cum_fw, weighted_cells, winsup_integral_from, GridFn};
use crate::quad;
use crate::stepfn::{Grid, GridSpec};
use crate::weights::{check_admissibility, Weight};
use crate::xreal::{xmul, xpow};
use serde::{Deserialize, Serialize};

/// A computed constant with per-term breakdown.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantReport {
    pub value: f64,
    pub terms: Vec<(String, f64)>,
    pub regime: String,
    pub grid: GridSpec,
}

impl ConstantReport {
    pub fn from_terms(regime: &str, terms: Vec<(String, f64)>, grid: &Grid) -> ConstantReport {
        let value = terms.iter().map(|t| t.1).sum();
        ConstantReport {
            value,
            terms,
            regime: regime.to_string(),
            grid: grid.descriptor(),
        }
    }

    pub fn zero(regime: &str, grid: &Grid) -> ConstantReport {
        ConstantReport {
            value: 0.0,
            terms: Vec::new(),
            regime: regime.to_string(),
            grid: grid.descriptor(),
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.0 == name).map(|t| t.1)
    }
}

/// The weight functions derived from `(v, m, p)`: partial integrals, the two
/// base combinations, and the kernel densities for the integral regimes.
#[derive(Clone, Debug)]
pub struct DerivedWeights {
    v: Weight,
    head_density: Weight, // v(s) s^{m/p}
    m: f64,
    p: f64,
}

impl DerivedWeights {
    /// Requires membership in the admissible weight class.
    pub fn new(v: Weight, m: f64, p: f64) -> Result<DerivedWeights> {
        let report = check_admissibility(&v, m, p);
        if !report.is_member() {
            return Err(Error::Admissibility(format!(
                "v fails the weight-class conditions (nontriv={}, nondegen={})",
                report.nontriv_ok, report.nondegen_ok
            )));
        }
        let head_density = v.mul_power(m / p);
        Ok(DerivedWeights {
            v,
            head_density,
            m,
            p,
        })
    }

    pub fn weight(&self) -> &Weight {
        &self.v
    }

    pub fn ratio(&self) -> f64 {
        self.m / self.p
    }

    /// `int_0^t v(s) s^{m/p} ds` (exact).
    pub fn head(&self, t: f64) -> f64 {
        self.head_density.primitive(0.0, t).unwrap_or(f64::INFINITY)
    }

    /// `int_t^inf v(s) ds` (exact).
    pub fn tail(&self, t: f64) -> f64 {
        self.v.primitive(t, f64::INFINITY).unwrap_or(f64::INFINITY)
    }

    /// `v0(t) = t^{m/p - 1} int_0^t v s^{m/p} ds * int_t^inf v ds`.
    pub fn v0(&self, t: f64) -> f64 {
        xmul(t.powf(self.ratio() - 1.0), xmul(self.head(t), self.tail(t)))
    }

    /// `v1(t) = int_0^t v s^{m/p} ds + t^{m/p} int_t^inf v ds`.
    pub fn v1(&self, t: f64) -> f64 {
        self.head(t) + xmul(t.powf(self.ratio()), self.tail(t))
    }

    pub fn head_asym(&self, end: End) -> Asym {
        let (z, i) = head_integral_asym(
            self.head_density.asym(End::Zero),
            self.head_density.asym(End::Inf),
        );
        match end {
            End::Zero => z,
            End::Inf => i,
        }
    }

    pub fn tail_asym(&self, end: End) -> Asym {
        let (z, i) = tail_integral_asym(self.v.asym(End::Zero), self.v.asym(End::Inf));
        match end {
            End::Zero => z,
            End::Inf => i,
        }
    }

    pub fn v0_asym(&self, end: End) -> Asym {
        Asym::powlog(self.ratio() - 1.0, 0.0)
            .mul(self.head_asym(end))
            .mul(self.tail_asym(end))
    }

    pub fn v1_asym(&self, end: End) -> Asym {
        self.head_asym(end).add(
            Asym::powlog(self.ratio(), 0.0).mul(self.tail_asym(end)),
            end,
        )
    }

    /// `v2(t) = t^{m'/p'} v0(t) / v1(t)^{m'+1}` (both exponents above 1).
    pub fn v2(&self, t: f64) -> Result<f64> {
        let mc = crate::norms::conjugate(self.m)?;
        let pc = crate::norms::conjugate(self.p)?;
        Ok(xmul(
            t.powf(mc / pc),
            xmul(self.v0(t), xpow(self.v1(t), -(mc + 1.0))),
        ))
    }

    pub fn v2_asym(&self, end: End) -> Result<Asym> {
        let mc = crate::norms::conjugate(self.m)?;
        let pc = crate::norms::conjugate(self.p)?;
        Ok(Asym::powlog(mc / pc, 0.0)
            .mul(self.v0_asym(end))
            .mul(self.v1_asym(end).powf(-(mc + 1.0))))
    }

    /// `v2~(t) = t^{m(p-a)/(p(m-a))} v0(t) / v1(t)^{(2m-a)/(m-a)}`, the
    /// analogue entering the maximal-operator formulas (`a` the order).
    pub fn v2_tilde(&self, t: f64, alpha: f64) -> Result<f64> {
        let (e_t, e_v1) = self.tilde_exponents(alpha)?;
        Ok(xmul(t.powf(e_t), xmul(self.v0(t), xpow(self.v1(t), -e_v1))))
    }

    pub fn v2_tilde_asym(&self, end: End, alpha: f64) -> Result<Asym> {
        let (e_t, e_v1) = self.tilde_exponents(alpha)?;
        Ok(Asym::powlog(e_t, 0.0)
            .mul(self.v0_asym(end))
            .mul(self.v1_asym(end).powf(-e_v1)))
    }

    fn tilde_exponents(&self, alpha: f64) -> Result<(f64, f64)> {
        if !(alpha > 0.0 && alpha < self.m && alpha < self.p) {
            return Err(Error::Regime(format!(
                "tilde kernel needs 0 < alpha < min(m, p), got alpha={alpha}, m={}, p={}",
                self.m, self.p
            )));
        }
        let e_t = self.m * (self.p - alpha) / (self.p * (self.m - alpha));
        let e_v1 = (2.0 * self.m - alpha) / (self.m - alpha);
        Ok((e_t, e_v1))
    }

    /// Sample `v0/v1^{-e}`-style composites on a grid with their asymptotics.
    pub fn v1_fn(&self, grid: &Grid) -> GridFn {
        GridFn::sample(
            |t| self.v1(t),
            grid,
            self.v1_asym(End::Zero),
            self.v1_asym(End::Inf),
        )
    }

    pub fn v0_fn(&self, grid: &Grid) -> GridFn {
        GridFn::sample(
            |t| self.v0(t),
            grid,
            self.v0_asym(End::Zero),
            self.v0_asym(End::Inf),
        )
    }
}

/// Convenience constructor used across the §2/§3 evaluators: exact
/// primitives sampled on the grid with the right asymptotics.
pub fn head_primitive_fn(w: &Weight, grid: &Grid) -> GridFn {
    let (a0, ai) = head_integral_asym(w.asym(End::Zero), w.asym(End::Inf));
    GridFn::sample(
        |t| w.primitive(0.0, t).unwrap_or(f64::INFINITY),
        grid,
        a0,
        ai,
    )
}

pub fn tail_primitive_fn(w: &Weight, grid: &Grid) -> GridFn {
    let (a0, ai) = tail_integral_asym(w.asym(End::Zero), w.asym(End::Inf));
    GridFn::sample(
        |t| w.primitive(t, f64::INFINITY).unwrap_or(f64::INFINITY),
        grid,
        a0,
        ai,
    )
}

/// `derived_weights` per the spec surface: bundles the evaluators.
pub fn derived_weights(v: &Weight, m: f64, p: f64) -> Result<DerivedWeights> {
    DerivedWeights::new(v.clone(), m, p)
}

/// Best constant of the weighted Hardy inequality
/// `|| int_0^x f ||_{q,w} <= C || f ||_{p,v}` over all non-negative `f`.
pub fn hardy_constant(
    p: f64,
    q: f64,
    v: &Weight,
    w: &Weight,
    grid: &Grid,
) -> Result<ConstantReport> {
    // the integral form stays valid down to q = 1 and below, so only p
    // needs a conjugate
    if !(p > 1.0 && q > 0.0) {
        return Err(Error::Regime(format!(
            "hardy constant needs p > 1 and q > 0, got p={p}, q={q}"
        )));
    }
    if w.is_zero() {
        return Ok(ConstantReport::zero("hardy", grid));
    }
    let pc = crate::norms::conjugate(p)?;
    let vp = v.powf(1.0 - pc);
    let tail_w = tail_primitive_fn(w, grid);
    let head_vp = head_primitive_fn(&vp, grid);
    if p <= q {
        let value = tail_w.powf(1.0 / q).mul(&head_vp.powf(1.0 / pc)).sup_all();
        Ok(ConstantReport::from_terms(
            "hardy.a",
            vec![("C1".into(), value)],
            grid,
        ))
    } else {
        let e_w = q / (p - q);
        let e_v = q * (p - 1.0) / (p - q);
        let integrand = tail_w.powf(e_w).mul(&head_vp.powf(e_v));
        let wc = weighted_cells(w, grid);
        let value = xpow(integrate_fw(&integrand, w, &wc, grid), (p - q) / (p * q));
        Ok(ConstantReport::from_terms(
            "hardy.b",
            vec![("C1".into(), value)],
            grid,
        ))
    }
}

/// Best constant of the Copson (dual Hardy) inequality
/// `|| int_x^inf f ||_{q,w} <= C || f ||_{p,v}`.
pub fn copson_constant(
    p: f64,
    q: f64,
    v: &Weight,
    w: &Weight,
    grid: &Grid,
) -> Result<ConstantReport> {
    if !(p > 1.0 && q > 0.0) {
        return Err(Error::Regime(format!(
            "copson constant needs p > 1 and q > 0, got p={p}, q={q}"
        )));
    }
    if w.is_zero() {
        return Ok(ConstantReport::zero("copson", grid));
    }
    let pc = crate::norms::conjugate(p)?;
    let vp = v.powf(1.0 - pc);
    let head_w = head_primitive_fn(w, grid);
    let tail_vp = tail_primitive_fn(&vp, grid);
    if p <= q {
        let value = head_w.powf(1.0 / q).mul(&tail_vp.powf(1.0 / pc)).sup_all();
        Ok(ConstantReport::from_terms(
            "copson.a",
            vec![("C2".into(), value)],
            grid,
        ))
    } else {
        let e_w = q / (p - q);
        let e_v = q * (p - 1.0) / (p - q);
        let integrand = head_w.powf(e_w).mul(&tail_vp.powf(e_v));
        let wc = weighted_cells(w, grid);
        let value = xpow(integrate_fw(&integrand, w, &wc, grid), (p - q) / (p * q));
        Ok(ConstantReport::from_terms(
            "copson.b",
            vec![("C2".into(), value)],
            grid,
        ))
    }
}

/// Shifted view for the offset-`t` theorems: everything is expressed in the
/// variable `s = x - t` on the standard grid.
struct Shifted<'a> {
    grid: &'a Grid,
    t: f64,
}

impl<'a> Shifted<'a> {
    /// Sample `x -> w(x)` in the shifted variable.
    fn weight_fn(&self, w: &Weight) -> GridFn {
        let asym0 = if self.t == 0.0 {
            w.asym(End::Zero)
        } else if w.eval(self.t + self.grid.t_min) > 0.0 {
            Asym::ONE
        } else {
            Asym::Zero
        };
        GridFn::sample(|s| w.eval(self.t + s), self.grid, asym0, w.asym(End::Inf))
    }

    /// Sample `x -> int_t^x g` exactly in the shifted variable.
    fn head_from_t(&self, g: &Weight) -> GridFn {
        let asym0 = if self.t == 0.0 {
            head_integral_asym(g.asym(End::Zero), g.asym(End::Inf)).0
        } else {
            // int_t^{t+s} g ~ g(t) s for small s
            Asym::powlog(1.0, 0.0)
        };
        let asym_inf = head_integral_asym(g.asym(End::Zero), g.asym(End::Inf)).1;
        GridFn::sample(
            |s| g.primitive(self.t, self.t + s).unwrap_or(f64::INFINITY),
            self.grid,
            asym0,
            asym_inf,
        )
    }

    /// Sample `x -> int_x^inf g` exactly in the shifted variable.
    fn tail_fn(&self, g: &Weight) -> GridFn {
        let (tz, ti) = tail_integral_asym(g.asym(End::Zero), g.asym(End::Inf));
        let asym0 = if self.t == 0.0 { tz } else { Asym::ONE };
        GridFn::sample(
            |s| {
                g.primitive(self.t + s, f64::INFINITY)
                    .unwrap_or(f64::INFINITY)
            },
            self.grid,
            asym0,
            ti,
        )
    }
}

/// Exact `int w` over shifted cells `[t+s_k, t+s_{k+1}]`, plus the gap below
/// the first node and the tail beyond the last.
fn shifted_cells(w: &Weight, t: f64, grid: &Grid) -> (Vec<f64>, f64, f64) {
    let pts = grid.points();
    let cells = (0..pts.len() - 1)
        .map(|k| {
            w.primitive(t + pts[k], t + pts[k + 1])
                .unwrap_or(f64::INFINITY)
        })
        .collect();
    let head = w.primitive(t, t + pts[0]).unwrap_or(f64::INFINITY);
    let tail = w
        .primitive(t + pts[pts.len() - 1], f64::INFINITY)
        .unwrap_or(f64::INFINITY);
    (cells, head, tail)
}

/// `int_t^inf f(x) w(x) dx` in the shifted variable, weight cells exact.
fn integrate_fw_shifted(f: &GridFn, w: &Weight, t: f64, grid: &Grid) -> f64 {
    use crate::asym::{head_converges as hc, tail_converges as tc};
    let w0 = if t == 0.0 {
        w.asym(End::Zero)
    } else {
        Asym::ONE
    };
    if !hc(f.asym0.mul(w0)) || !tc(f.asym_inf.mul(w.asym(End::Inf))) {
        return f64::INFINITY;
    }
    let (cells, head, tail) = shifted_cells(w, t, grid);
    let n = f.vals.len();
    let mut acc = 0.0;
    for k in 0..n - 1 {
        acc += 0.5 * (f.vals[k] + f.vals[k + 1]) * cells[k];
        if acc.is_infinite() {
            return f64::INFINITY;
        }
    }
    let edge = |fv: f64, mass: f64| {
        if mass.is_finite() {
            xmul(fv, mass)
        } else {
            0.0
        }
    };
    acc + edge(f.vals[0], head) + edge(f.vals[n - 1], tail)
}

fn check_supop_pre(t: f64, u: &Weight, v: &Weight, w: &Weight, grid: &Grid) -> Result<()> {
    if !u.is_continuous() {
        return Err(Error::Domain("u must be continuous on (t, inf)".into()));
    }
    for (name, g) in [("v", v), ("w", w)] {
        let small = g
            .primitive(t, t + grid.t_min * 10.0)
            .unwrap_or(f64::INFINITY);
        let large = g.primitive(t, t + grid.t_max).unwrap_or(f64::INFINITY);
        if small <= 0.0 {
            return Err(Error::Domain(format!(
                "int_t^x {name} must be positive for x > t"
            )));
        }
        if !large.is_finite() {
            return Err(Error::Domain(format!(
                "int_t^x {name} must be finite for x < inf"
            )));
        }
    }
    Ok(())
}

/// Characterizing pair for the supremal inequality with the inner integral
/// from `t`: `int_t^inf [ sup_{y >= x} u(y) int_t^y g ] w <= C ||g||_{p,v}`.
pub fn supop_d(
    p: f64,
    t: f64,
    u: &Weight,
    v: &Weight,
    w: &Weight,
    grid: &Grid,
) -> Result<ConstantReport> {
    if !(p > 1.0) {
        return Err(Error::Regime(format!(
            "supremal constant needs p > 1, got {p}"
        )));
    }
    if w.is_zero() {
        return Ok(ConstantReport::from_terms(
            "supD",
            vec![("D1".into(), 0.0), ("D2".into(), 0.0)],
            grid,
        ));
    }
    check_supop_pre(t, u, v, w, grid)?;
    let pc = crate::norms::conjugate(p)?;
    let sh = Shifted { grid, t };
    let u_fn = sh.weight_fn(u);
    let w_fn = sh.weight_fn(w);
    let vp = v.powf(1.0 - pc);
    let head_vp = sh.head_from_t(&vp);
    let head_w = sh.head_from_t(w);

    // D1: inner sup of (revsup u^{p'}) * int_t^tau v^{1-p'}, then revsup again
    let inner1 = u_fn.powf(pc).revsup().mul(&head_vp).revsup();
    let d1_integrand = inner1.mul(&head_w.powf(pc - 1.0));
    let d1 = xpow(integrate_fw_shifted(&d1_integrand, w, t, grid), 1.0 / pc);

    // D2: ( int_x^inf (revsup u) w )^{p'-1} (revsup u)(x) (int_t^x v^{1-p'}) w
    let sup_u = u_fn.revsup();
    let tail_uw = sup_u.mul(&w_fn).tail_int(grid);
    let d2_integrand = tail_uw.powf(pc - 1.0).mul(&sup_u).mul(&head_vp);
    let d2 = xpow(integrate_fw_shifted(&d2_integrand, w, t, grid), 1.0 / pc);

    Ok(ConstantReport::from_terms(
        "supD",
        vec![("D1".into(), d1), ("D2".into(), d2)],
        grid,
    ))
}

/// Characterizing pair for the supremal inequality with the tail integral:
/// `int_t^inf [ sup_{y >= x} u(y) int_y^inf g ] w <= C ||g||_{p,v}`.
pub fn supop_e(
    p: f64,
    t: f64,
    u: &Weight,
    v: &Weight,
    w: &Weight,
    grid: &Grid,
) -> Result<ConstantReport> {
    if !(p > 1.0) {
        return Err(Error::Regime(format!(
            "supremal constant needs p > 1, got {p}"
        )));
    }
    if w.is_zero() {
        return Ok(ConstantReport::from_terms(
            "supE",
            vec![("E1".into(), 0.0), ("E2".into(), 0.0)],
            grid,
        ));
    }
    check_supop_pre(t, u, v, w, grid)?;
    let pc = crate::norms::conjugate(p)?;
    let sh = Shifted { grid, t };
    let u_fn = sh.weight_fn(u);
    let w_fn = sh.weight_fn(w);
    let vp = v.powf(1.0 - pc);
    let tail_vp = sh.tail_fn(&vp);
    let head_w = sh.head_from_t(w);

    // E1: revsup of u^{p'} * int_tau^inf v^{1-p'}
    let inner1 = u_fn.powf(pc).mul(&tail_vp).revsup();
    let e1_integrand = inner1.mul(&head_w.powf(pc - 1.0));
    let e1 = xpow(integrate_fw_shifted(&e1_integrand, w, t, grid), 1.0 / pc);

    // E2: ( int_t^x (sup_{y in [s,x]} u) w(s) ds )^{p'-1} * revsup(u * tail_vp) * w
    let (w_mass, _, _) = shifted_cells(w, t, grid);
    let winsup = winsup_integral_from(&u_fn.vals, &w_mass, 0);
    let winsup_fn = GridFn {
        vals: winsup,
        asym0: Asym::Zero,
        asym_inf: head_integral_asym(u_fn.asym0.mul(w_fn.asym0), u_fn.asym_inf.mul(w_fn.asym_inf))
            .1,
    };
    let inner2 = u_fn.mul(&tail_vp).revsup();
    let e2_integrand = winsup_fn.powf(pc - 1.0).mul(&inner2);
    let e2 = xpow(integrate_fw_shifted(&e2_integrand, w, t, grid), 1.0 / pc);

    Ok(ConstantReport::from_terms(
        "supE",
        vec![("E1".into(), e1), ("E2".into(), e2)],
        grid,
    ))
}

fn gks_nondegeneracy(u: &Weight, w: &Weight, q_over_m: f64, grid: &Grid) -> Result<GridFn> {
    if u.has_zero_piece() {
        return Err(Error::NonDegeneracy("u must be strictly positive".into()));
    }
    if !tail_converges(u.asym(End::Inf)) {
        return Err(Error::NonDegeneracy("int_t^inf u must be finite".into()));
    }
    if head_converges(u.asym(End::Zero)) {
        return Err(Error::NonDegeneracy("int_0^inf u must diverge".into()));
    }
    if !head_converges(w.asym(End::Zero)) {
        return Err(Error::NonDegeneracy("int_0^t w must be finite".into()));
    }
    let tail_u = tail_primitive_fn(u, grid);
    let density = tail_u.powf(q_over_m).mul(&GridFn::from_weight(w, grid));
    if !tail_converges(density.asym_inf) {
        return Err(Error::NonDegeneracy(
            "int_t^inf w (int_s^inf u)^{q/m} ds must be finite".into(),
        ));
    }
    if head_converges(density.asym0) {
        return Err(Error::NonDegeneracy(
            "int_0^1 w (int_s^inf u)^{q/m} ds must diverge".into(),
        ));
    }
    if tail_converges(w.asym(End::Inf)) {
        return Err(Error::NonDegeneracy("int_1^inf w must diverge".into()));
    }
    Ok(tail_u)
}

/// Two-sided constant for the iterated inequality with inner tail and outer
/// tail ordering (`F`-family).
pub fn gks_constant(
    p: f64,
    m: f64,
    q: f64,
    u: &Weight,
    v: &Weight,
    w: &Weight,
    grid: &Grid,
) -> Result<ConstantReport> {
    if !(p > 1.0 && q > 1.0 && m > 1.0) {
        return Err(Error::Regime("F-family constants need p, m, q > 1".into()));
    }
    if w.is_zero() {
        return Ok(ConstantReport::zero("gks", grid));
    }
    if q < p {
        return Err(Error::Regime(format!(
            "F-family needs p <= q, got p={p} > q={q}"
        )));
    }
    let tail_u = gks_nondegeneracy(u, w, q / m, grid)?;
    let pc = crate::norms::conjugate(p)?;
    let vp = v.powf(1.0 - pc);
    let head_vp = head_primitive_fn(&vp, grid);
    let head_w = head_primitive_fn(w, grid);
    let wc = weighted_cells(w, grid);
    let f2 = tail_cum_fw(&tail_u.powf(q / m), w, &wc, grid)
        .powf(1.0 / q)
        .mul(&head_vp.powf(1.0 / pc))
        .sup_all();

    if p <= m {
        let f1 = head_w
            .powf(1.0 / q)
            .mul(&tail_u.powf(1.0 / m))
            .mul(&head_vp.powf(1.0 / pc))
            .sup_all();
        Ok(ConstantReport::from_terms(
            "gks.a",
            vec![("F1".into(), f1), ("F2".into(), f2)],
            grid,
        ))
    } else {
        // m < p <= q
        let vp_fn = GridFn::from_weight(&vp, grid);
        let inner = tail_u
            .powf(p / (p - m))
            .mul(&head_vp.powf(p * (m - 1.0) / (p - m)))
            .mul(&vp_fn)
            .tail_int(grid);
        let f3 = head_w
            .powf(1.0 / q)
            .mul(&inner.powf((p - m) / (p * m)))
            .sup_all();
        Ok(ConstantReport::from_terms(
            "gks.b",
            vec![("F2".into(), f2), ("F3".into(), f3)],
            grid,
        ))
    }
}

/// Two-sided constant for the iterated inequality with the inner-tail /
/// outer-head pairing (`G`-family).
pub fn krepick_constant(
    p: f64,
    m: f64,
    q: f64,
    u: &Weight,
    v: &Weight,
    w: &Weight,
    grid: &Grid,
) -> Result<ConstantReport> {
    if !(p > 1.0 && q > 1.0 && m > 1.0) {
        return Err(Error::Regime("G-family constants need p, m, q > 1".into()));
    }
    if w.is_zero() {
        return Ok(ConstantReport::zero("krepick", grid));
    }
    if q < p {
        return Err(Error::Regime(format!(
            "G-family needs p <= q, got p={p} > q={q}"
        )));
    }
    let pc = crate::norms::conjugate(p)?;
    let points = grid.points();
    let n = points.len();
    let w_fn = GridFn::from_weight(w, grid);
    let head_u = head_primitive_fn(u, grid);

    // density entering the pair condition: w(s) (int_s^t u)^{q/m}; near s = 0
    // the inner factor is capped by int_s^inf u (or grows like int_0^t u
    // when u is head-integrable, i.e. stays bounded in s)
    let density_asym0 = if head_converges(u.asym(End::Zero)) {
        w.asym(End::Zero)
    } else {
        tail_integral_asym(u.asym(End::Zero), u.asym(End::Inf))
            .0
            .powf(q / m)
            .mul(w.asym(End::Zero))
    };
    if !head_converges(density_asym0) {
        return Err(Error::Admissibility(
            "pair condition fails: int_0^t (int_s^t u)^{q/m} w ds diverges".into(),
        ));
    }

    // inner(t) = int_0^t ( int_s^t u )^{q/m} w(s) ds, trapezoid in s
    let mut inner = vec![0.0; n];
    for (j, &t) in points.iter().enumerate() {
        let _ = t;
        let ut = head_u.vals[j];
        let mut acc = 0.0;
        for k in 0..j {
            let us_lo = ut - head_u.vals[k];
            let us_hi = ut - head_u.vals[k + 1];
            acc += 0.5
                * (xmul(xpow(us_lo, q / m), w_fn.vals[k])
                    + xmul(xpow(us_hi, q / m), w_fn.vals[k + 1]))
                * (points[k + 1] - points[k]);
        }
        // mass below the grid: (int_s^t u)^{q/m} ~ U(t)^{q/m} there
        if j > 0 {
            acc += xmul(
                xpow(ut, q / m),
                w.primitive(0.0, points[0]).unwrap_or(f64::INFINITY),
            );
        }
        inner[j] = acc;
    }
    // growth of inner(t) as t -> inf: once the tails of u and w are both
    // integrable the limit is finite; otherwise it inflates at the composed
    // head-integral rate
    let inner_asym_inf = if tail_converges(u.asym(End::Inf)) {
        let density_inf = tail_integral_asym(u.asym(End::Zero), u.asym(End::Inf))
            .1
            .powf(q / m)
            .mul(w.asym(End::Inf));
        if tail_converges(density_inf) {
            Asym::ONE
        } else {
            head_integral_asym(density_asym0, density_inf).1
        }
    } else {
        head_integral_asym(u.asym(End::Zero), u.asym(End::Inf))
            .1
            .powf(q / m)
            .mul(head_integral_asym(w.asym(End::Zero), w.asym(End::Inf)).1)
    };
    let inner_fn = GridFn {
        vals: inner,
        asym0: head_integral_asym(density_asym0, density_asym0).0,
        asym_inf: inner_asym_inf,
    };
    // admissible-pair probe: positive and finite inside the grid
    for &j in &[n / 8, n / 2, 7 * n / 8] {
        let val = inner_fn.vals[j];
        if !(val > 0.0) || !val.is_finite() {
            return Err(Error::Admissibility(format!(
                "pair condition fails at t={}: inner integral {val}",
                points[j]
            )));
        }
    }

    let tail_vp = tail_primitive_fn(&v.powf(1.0 - pc), grid);
    let mut g1 = 0.0f64;
    for j in 0..n {
        g1 = g1.max(xmul(
            xpow(inner_fn.vals[j], 1.0 / q),
            xpow(tail_vp.vals[j], 1.0 / pc),
        ));
    }
    // endpoint blow-up checks for the G1 product
    let g1_asym_inf = inner_fn
        .asym_inf
        .powf(1.0 / q)
        .mul(tail_vp.asym_inf.powf(1.0 / pc));
    if g1_asym_inf.diverges(End::Inf) {
        g1 = f64::INFINITY;
    }

    if p <= m {
        return Ok(ConstantReport::from_terms(
            "krepick.a",
            vec![("G1".into(), g1)],
            grid,
        ));
    }

    // G2: sup_t (int_0^t w)^{1/q} ( int_t^inf (int_t^s u)^{m/(p-m)} u(s)
    //        (int_s^inf v^{1-p'})^{m(p-1)/(p-m)} ds )^{(p-m)/(pm)}
    let head_w = head_primitive_fn(w, grid);
    let u_fn = GridFn::from_weight(u, grid);
    let e_inner = m / (p - m);
    let e_v = m * (p - 1.0) / (p - m);
    let mut g2 = 0.0f64;
    for j in 0..n {
        let ut = head_u.vals[j];
        let mut acc = 0.0;
        for k in j..n - 1 {
            let lo = xmul(
                xpow(head_u.vals[k] - ut, e_inner),
                xmul(u_fn.vals[k], xpow(tail_vp.vals[k], e_v)),
            );
            let hi = xmul(
                xpow(head_u.vals[k + 1] - ut, e_inner),
                xmul(u_fn.vals[k + 1], xpow(tail_vp.vals[k + 1], e_v)),
            );
            acc += 0.5 * (lo + hi) * (points[k + 1] - points[k]);
        }
        g2 = g2.max(xmul(
            xpow(head_w.vals[j], 1.0 / q),
            xpow(acc, (p - m) / (p * m)),
        ));
    }
    Ok(ConstantReport::from_terms(
        "krepick.b",
        vec![("G1".into(), g1), ("G2".into(), g2)],
        grid,
    ))
}

/// The two-variable kernel entering the `q < p` regimes:
/// `( int_t^s (B(y)/y)^{e1} dy )^{e2} (B(s)/s)^{e1}` with
/// `e1 = p'`, `e2 = p(q-1)/(p-q)` (plain) or `e1 = p/(p-alpha)`,
/// `e2 = p(q-alpha)/(alpha(p-q))` (tilde).
#[derive(Clone, Copy, Debug)]
pub enum KernelVariant {
    Plain,
    Tilde { alpha: f64 },
}

pub fn kernel_b(t: f64, s: f64, p: f64, q: f64, b: &Weight, variant: KernelVariant) -> Result<f64> {
    if !(t < s) {
        return Err(Error::Domain(format!(
            "kernel needs t < s, got t={t}, s={s}"
        )));
    }
    let (e1, e2) = kernel_exponents(p, q, variant)?;
    let ratio = |y: f64| (b.primitive(0.0, y).unwrap_or(f64::INFINITY) / y).powf(e1);
    let inner = quad::integrate(&ratio, t, s, 1e-10);
    Ok(xmul(xpow(inner, e2), ratio(s)))
}

pub(crate) fn kernel_exponents(p: f64, q: f64, variant: KernelVariant) -> Result<(f64, f64)> {
    match variant {
        KernelVariant::Plain => {
            let pc = crate::norms::conjugate(p)?;
            if !(q < p) {
                return Err(Error::Regime(format!(
                    "kernel defined for q < p, got q={q}, p={p}"
                )));
            }
            Ok((pc, p * (q - 1.0) / (p - q)))
        }
        KernelVariant::Tilde { alpha } => {
            if !(alpha > 0.0 && alpha < p && q < p && alpha < q) {
                return Err(Error::Regime(format!(
                    "tilde kernel needs alpha < q < p with alpha < p, got alpha={alpha}, q={q}, p={p}"
                )));
            }
            Ok((p / (p - alpha), p * (q - alpha) / (alpha * (p - q))))
        }
    }
}

/// The one-variable kernels of the integral regimes: products of head/tail
/// integrals of `v0/v1^{m'+1}` (optionally against `B^{m'}`) raised to
/// `m(q-1)/(m-q)` (plain) or `m(q-alpha)/(alpha(m-q))` (tilde).
#[derive(Clone, Copy, Debug)]
pub enum FrakVariant {
    B1,
    B2,
    B1Tilde { alpha: f64 },
    B2Tilde { alpha: f64 },
}

pub fn kernel_frak(
    s: f64,
    variant: FrakVariant,
    dw: &DerivedWeights,
    b: &Weight,
    m: f64,
    q: f64,
    grid: &Grid,
) -> Result<f64> {
    let mc = crate::norms::conjugate(m)?;
    let (exp_outer, v1_pow, b_pow) = match variant {
        FrakVariant::B1 => {
            if !(q < m) {
                return Err(Error::Regime(format!(
                    "kernel needs q < m, got q={q}, m={m}"
                )));
            }
            (m * (q - 1.0) / (m - q), mc + 1.0, 0.0)
        }
        FrakVariant::B2 => {
            if !(q < m) {
                return Err(Error::Regime(format!(
                    "kernel needs q < m, got q={q}, m={m}"
                )));
            }
            (m * (q - 1.0) / (m - q), mc + 1.0, mc)
        }
        FrakVariant::B1Tilde { alpha } | FrakVariant::B2Tilde { alpha } => {
            if !(alpha < q && q < m) {
                return Err(Error::Regime(format!(
                    "tilde kernel needs alpha < q < m, got alpha={alpha}, q={q}, m={m}"
                )));
            }
            let bp = if matches!(variant, FrakVariant::B2Tilde { .. }) {
                m / (m - alpha)
            } else {
                0.0
            };
            (
                m * (q - alpha) / (alpha * (m - q)),
                (2.0 * m - alpha) / (m - alpha),
                bp,
            )
        }
    };
    let density = |t: f64| {
        let base = xmul(dw.v0(t), xpow(dw.v1(t), -v1_pow));
        if b_pow == 0.0 {
            base
        } else {
            xmul(
                xpow(b.primitive(0.0, t).unwrap_or(f64::INFINITY), b_pow),
                base,
            )
        }
    };
    let (asym0, asym_inf) = {
        let base0 = dw
            .v0_asym(End::Zero)
            .mul(dw.v1_asym(End::Zero).powf(-v1_pow));
        let basei = dw.v0_asym(End::Inf).mul(dw.v1_asym(End::Inf).powf(-v1_pow));
        let (b0, bi) = if b_pow == 0.0 {
            (Asym::ONE, Asym::ONE)
        } else {
            let (hz, hi) = head_integral_asym(b.asym(End::Zero), b.asym(End::Inf));
            (hz.powf(b_pow), hi.powf(b_pow))
        };
        (base0.mul(b0), basei.mul(bi))
    };
    let is_tail = matches!(variant, FrakVariant::B1 | FrakVariant::B1Tilde { .. });
    let cum_at_s = if is_tail {
        if !crate::asym::tail_converges(asym_inf) {
            f64::INFINITY
        } else {
            improper_log_quad(&density, s, f64::INFINITY, asym_inf, grid)
        }
    } else if !crate::asym::head_converges(asym0) {
        f64::INFINITY
    } else {
        improper_log_quad(&density, 0.0, s, asym0, grid)
    };
    Ok(xmul(xpow(cum_at_s, exp_outer), density(s)))
}

/// Adaptive quadrature of a positive density over `(lo, hi)` in the log
/// variable, truncating an improper end where the known power behavior
/// makes the remainder negligible.
fn improper_log_quad<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    end_asym: Asym,
    grid: &Grid,
) -> f64 {
    let pow = match end_asym {
        Asym::Zero => return quad_or_zero(f, lo, hi),
        Asym::Infinite => return f64::INFINITY,
        Asym::PowLog { pow, .. } => pow,
    };
    let g = |y: f64| {
        let x = y.exp();
        xmul(f(x), x)
    };
    let (y0, y1) = if lo == 0.0 {
        // integrand ~ e^{(pow+1) y} as y -> -inf
        let lam = pow + 1.0;
        let edge = hi.min(1.0).ln();
        (edge - (80.0 / lam.max(1e-6)).min(1e4), hi.ln())
    } else {
        let lam = -(pow + 1.0);
        let edge = lo.max(grid.t_min).ln();
        (lo.ln(), edge + (80.0 / lam.max(1e-6)).min(1e4))
    };
    let mid = if lo == 0.0 {
        hi.min(1.0).ln()
    } else {
        lo.max(1.0).ln().max(y0)
    };
    quad::integrate(&g, y0, mid, 1e-12) + quad::integrate(&g, mid, y1, 1e-12)
}

fn quad_or_zero<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    if hi > lo && hi.is_finite() && lo > 0.0 {
        quad::integrate(|x| f(x), lo, hi, 1e-12)
    } else {
        0.0
    }
}
