//! The main characterizations: the best constant `K` of the restricted
//! inequality for the supremal operator (with full parameter-regime
//! dispatch), the reduction of the generalized maximal operator to that
//! inequality, and the maximal-operator norms evaluated both directly and
//! through the reduction.

use crate::asym::{head_integral_asym, revsup_asym, Asym, End};
use crate::constants::{head_primitive_fn, ConstantReport, DerivedWeights};
use crate::error::{Error, Result};
use crate::gridfn::{
    integrate_fw, tail_cum_fw, weighted_cells, winsup_integral_from, GridFn, WeightedCells,
};
use crate::norms::{conjugate, Params};
use crate::stepfn::Grid;
use crate::weights::{check_shape, ShapeKind, ShapeVerdict, Weight};
use crate::xreal::{xmul, xpow};

/// Numerator profile of the supremal operator: either a plain weight or the
/// `B^{1/alpha} / phi` shape produced by the maximal-operator reduction.
#[derive(Clone, Debug)]
pub enum UProfile {
    Weight(Weight),
    BOverPhi { b: Weight, phi: Weight, alpha: f64 },
}

impl UProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            UProfile::Weight(u) => u.eval(t),
            UProfile::BOverPhi { b, phi, alpha } => {
                let big_b = b.primitive(0.0, t).unwrap_or(f64::INFINITY);
                xmul(big_b, xpow(phi.eval(t), -*alpha))
            }
        }
    }

    fn sample(&self, grid: &Grid) -> GridFn {
        match self {
            UProfile::Weight(u) => GridFn::from_weight(u, grid),
            UProfile::BOverPhi { b, phi, alpha } => {
                let (b0, bi) = head_integral_asym(b.asym(End::Zero), b.asym(End::Inf));
                GridFn::sample(
                    |t| self.eval(t),
                    grid,
                    b0.mul(phi.asym(End::Zero).powf(-alpha)),
                    bi.mul(phi.asym(End::Inf).powf(-alpha)),
                )
            }
        }
    }

    fn is_continuous(&self) -> bool {
        match self {
            UProfile::Weight(u) => u.is_continuous(),
            UProfile::BOverPhi { phi, .. } => phi.is_continuous(),
        }
    }
}

/// Inputs of the restricted inequality for `T_{u,b}`.
#[derive(Clone, Debug)]
pub struct RestrictedSpec {
    pub params: Params,
    pub u: UProfile,
    pub b: Weight,
    pub v: Weight,
    pub w: Weight,
}

impl RestrictedSpec {
    pub fn new(
        params: Params,
        u: UProfile,
        b: Weight,
        v: Weight,
        w: Weight,
        grid: &Grid,
    ) -> Result<RestrictedSpec> {
        b.cumulative_b(grid.t_min)?;
        b.cumulative_b(grid.t_max)?;
        if !b.is_non_increasing() {
            return Err(Error::Shape("b must be non-increasing".into()));
        }
        if !u.is_continuous() {
            return Err(Error::Shape("u must be continuous".into()));
        }
        let adm = crate::weights::check_admissibility(&v, params.m, params.p);
        if !adm.is_member() {
            return Err(Error::Admissibility(format!(
                "v outside the admissible class (nontriv={}, nondegen={})",
                adm.nontriv_ok, adm.nondegen_ok
            )));
        }
        Ok(RestrictedSpec { params, u, b, v, w })
    }
}

/// Inputs of the maximal-operator problem.
#[derive(Clone, Debug)]
pub struct MaximalSpec {
    pub params: Params,
    pub b: Weight,
    pub phi: Weight,
    pub v: Weight,
    pub w: Weight,
}

impl MaximalSpec {
    pub fn new(
        params: Params,
        b: Weight,
        phi: Weight,
        v: Weight,
        w: Weight,
    ) -> Result<MaximalSpec> {
        if !phi.is_continuous() {
            return Err(Error::Shape("phi must be continuous".into()));
        }
        Ok(MaximalSpec {
            params,
            b,
            phi,
            v,
            w,
        })
    }

    /// The plain maximal-function preset: order 1, unit inner weight,
    /// normalization by measure.
    pub fn hardy_littlewood(p: f64, m: f64, q: f64, v: Weight, w: Weight) -> Result<MaximalSpec> {
        MaximalSpec::new(
            Params::with_maximal(p, m, q, 1.0, 1.0)?,
            Weight::one(),
            Weight::power(1.0, 1.0),
            v,
            w,
        )
    }

    /// Fractional preset: normalization `t^{1 - gamma/n}`.
    pub fn fractional(
        p: f64,
        m: f64,
        q: f64,
        gamma_over_n: f64,
        v: Weight,
        w: Weight,
    ) -> Result<MaximalSpec> {
        if !(gamma_over_n > 0.0 && gamma_over_n < 1.0) {
            return Err(Error::Domain(
                "fractional preset needs 0 < gamma/n < 1".into(),
            ));
        }
        MaximalSpec::new(
            Params::with_maximal(p, m, q, 1.0, 1.0)?,
            Weight::one(),
            Weight::power(1.0, 1.0 - gamma_over_n),
            v,
            w,
        )
    }

    /// The Lorentz-norm maximal operator: order `q_l`, inner weight
    /// `t^{q_l/p_l - 1}`, normalization `t^{1/p_l}`.
    pub fn lorentz_maximal(
        p_l: f64,
        q_l: f64,
        p: f64,
        m: f64,
        q: f64,
        v: Weight,
        w: Weight,
    ) -> Result<MaximalSpec> {
        if !(p_l > 0.0 && q_l > 0.0 && q_l <= p_l) {
            return Err(Error::Domain("lorentz preset needs 0 < q_l <= p_l".into()));
        }
        MaximalSpec::new(
            Params::with_maximal(p, m, q, q_l, p_l)?,
            Weight::power(1.0, q_l / p_l - 1.0),
            Weight::power(1.0, 1.0 / p_l),
            v,
            w,
        )
    }

    /// The shape conditions of the reduction theorem, reported per check.
    pub fn shape_failures(&self, grid: &Grid) -> Vec<String> {
        let mut fails = Vec::new();
        let alpha = self.params.alpha;
        let r = self.params.r;
        if !(alpha <= r) {
            fails.push(format!("need alpha <= r, got alpha={alpha}, r={r}"));
        }
        if check_shape(&self.phi, ShapeKind::QuasiIncreasing) == ShapeVerdict::Fails {
            fails.push("phi not quasi-increasing".into());
        }
        if check_shape(&self.phi, ShapeKind::Qr(r)) == ShapeVerdict::Fails {
            fails.push(format!("phi fails the Q_r condition with r={r}"));
        }
        if check_shape(&self.b, ShapeKind::Delta2) == ShapeVerdict::Fails {
            fails.push("B not doubling".into());
        }
        if self.b.cumulative_b(grid.t_min).is_err() || self.b.cumulative_b(grid.t_max).is_err() {
            fails.push("B not positive-finite on the grid".into());
        }
        if crate::asym::tail_converges(self.b.asym(End::Inf)) {
            fails.push("B must be unbounded".into());
        }
        if check_shape(&self.b, ShapeKind::BOverPower { alpha, r }) == ShapeVerdict::Fails {
            fails.push(format!(
                "B(t)/t^(alpha/r) not quasi-increasing (alpha={alpha}, r={r})"
            ));
        }
        if !self.b.is_non_increasing() {
            fails.push("b must be non-increasing".into());
        }
        fails
    }
}

/// Covered parameter regions of the restricted inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    T32,
    T33i,
    T33ii,
    T34i,
    T34ii,
    T35i,
    T35ii,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::T32 => "thm3.2",
            Regime::T33i => "thm3.3i",
            Regime::T33ii => "thm3.3ii",
            Regime::T34i => "thm3.4i",
            Regime::T34ii => "thm3.4ii",
            Regime::T35i => "thm3.5i",
            Regime::T35ii => "thm3.5ii",
        }
    }
}

/// Exactly-one-case dispatch over `(p, m, q)`.
pub fn classify(p: f64, m: f64, q: f64) -> Result<Regime> {
    if !(p > 0.0 && m > 0.0 && q > 0.0) {
        return Err(Error::Regime(format!(
            "exponents must be positive, got p={p}, m={m}, q={q}"
        )));
    }
    if !(q > 1.0) {
        return Err(Error::Regime(format!(
            "the characterizations need q > 1, got q={q}"
        )));
    }
    if m <= 1.0 && p <= 1.0 {
        Ok(Regime::T32)
    } else if m <= 1.0 {
        Ok(if p <= q { Regime::T33i } else { Regime::T33ii })
    } else if p <= 1.0 {
        Ok(if m <= q { Regime::T34i } else { Regime::T34ii })
    } else if p.max(m) <= q {
        Ok(Regime::T35i)
    } else if m <= q && q < p {
        Ok(Regime::T35ii)
    } else if p <= q && q < m {
        Err(Error::UncoveredRegion(format!(
            "1 < p <= q < m (p={p}, q={q}, m={m})"
        )))
    } else {
        Err(Error::UncoveredRegion(format!(
            "1 < q < min(p, m) (p={p}, q={q}, m={m})"
        )))
    }
}

/// Grid supremum with endpoint growth detection: a profile still climbing at
/// the edge of the grid's 16-decade range is classified divergent.
fn sup_profile(vals: &[f64]) -> f64 {
    let mx = vals.iter().copied().fold(0.0f64, f64::max);
    if mx.is_infinite() || mx <= 0.0 {
        return mx.max(0.0);
    }
    let n = vals.len();
    let k = 8.min(n / 4);
    if k >= 2 {
        let left_growing = (0..k - 1).all(|i| vals[i] > vals[i + 1] * 1.001) && vals[0] >= 0.9 * mx;
        let right_growing =
            (n - k + 1..n).all(|i| vals[i] > vals[i - 1] * 1.001) && vals[n - 1] >= 0.9 * mx;
        if left_growing || right_growing {
            if std::env::var_os("LORENTZ_DEBUG_SUP").is_some() {
                eprintln!(
                    "sup_profile divergence: left={left_growing} right={right_growing} \
                     first={:?} last={:?} max={mx:.6e}",
                    &vals[..k.min(4)],
                    &vals[n - k.min(4)..],
                );
            }
            return f64::INFINITY;
        }
    }
    mx
}

/// Shared per-evaluation precomputations. `q` here is the effective outer
/// exponent of the path being evaluated.
struct Mach<'a> {
    grid: &'a Grid,
    q: f64,
    u: GridFn,
    uq: GridFn,
    uob: GridFn,
    rs_uob: GridFn,
    rs_uob_q: GridFn,
    /// `x -> int_x^inf (sup_{tau >= y} (u/B)^q)(y) w(y) dy`
    tail_j: GridFn,
    w: &'a Weight,
    /// exact `int w` per grid cell
    wc: WeightedCells,
    head_w: GridFn,
    big_b: GridFn,
    /// `t -> int_0^t ( sup_{tau in [x, t]} u^q ) w dx`
    iwin: GridFn,
}

impl<'a> Mach<'a> {
    fn new(u: GridFn, uob: GridFn, b: &Weight, w: &'a Weight, q: f64, grid: &'a Grid) -> Mach<'a> {
        let w_fn = GridFn::from_weight(w, grid);
        let wc = weighted_cells(w, grid);
        let head_w = head_primitive_fn(w, grid);
        let big_b = head_primitive_fn(b, grid);
        let uq = u.powf(q);
        let rs_uob = uob.revsup();
        let rs_uob_q = uob.powf(q).revsup();
        let tail_j = tail_cum_fw(&rs_uob_q, w, &wc, grid);
        let iwin = winsup_gridfn(&uq, w, &w_fn, &wc.cells, grid);
        Mach {
            grid,
            q,
            u,
            uq,
            uob,
            rs_uob,
            rs_uob_q,
            tail_j,
            w,
            wc,
            head_w,
            big_b,
            iwin,
        }
    }

    fn pts(&self) -> &[f64] {
        self.grid.points()
    }

    /// Relative cumulative of `(B(tau)/tau)^e` anchored at the first grid
    /// node (always finite between interior nodes).
    fn psi_rel(&self, e: f64) -> Vec<f64> {
        let pts = self.pts();
        let vals: Vec<f64> = pts
            .iter()
            .zip(&self.big_b.vals)
            .map(|(&t, &bb)| xpow(bb / t, e))
            .collect();
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(pts.len());
        out.push(0.0);
        for k in 0..pts.len() - 1 {
            acc += 0.5 * (vals[k] + vals[k + 1]) * (pts[k + 1] - pts[k]);
            out.push(acc);
        }
        out
    }

    /// `(B(s)/s)^e` sampled.
    fn b_over_s_pow(&self, e: f64) -> Vec<f64> {
        self.pts()
            .iter()
            .zip(&self.big_b.vals)
            .map(|(&t, &bb)| xpow(bb / t, e))
            .collect()
    }
}

/// `I(t) = int_0^t (sup_{tau in [x,t]} uq) w dx` as a grid function with
/// composed asymptotics and sub-grid head mass folded in.
fn winsup_gridfn(uq: &GridFn, w: &Weight, w_fn: &GridFn, w_mass: &[f64], grid: &Grid) -> GridFn {
    let density0 = uq.asym0.mul(w.asym(End::Zero));
    let rs_inf = revsup_asym(uq.asym0, uq.asym_inf).1;
    let density_inf = rs_inf.mul(w.asym(End::Inf));
    let (a0, ai) = head_integral_asym(density0, density_inf);
    let n = uq.vals.len();
    if a0 == Asym::Infinite {
        return GridFn {
            vals: vec![f64::INFINITY; n],
            asym0: a0,
            asym_inf: ai,
        };
    }
    let mut vals = winsup_integral_from(&uq.vals, w_mass, 0);
    let w_head0 = w.primitive(0.0, grid.points()[0]).unwrap_or(f64::INFINITY);
    let dens_corr = match density0 {
        Asym::Zero => 0.0,
        Asym::Infinite => f64::INFINITY,
        Asym::PowLog { pow, .. } => {
            let base = xmul(uq.vals[0], w_fn.vals[0]) * grid.points()[0];
            if pow > -1.0 {
                base / (pow + 1.0)
            } else {
                base * (1.0 + grid.points()[0].ln().abs())
            }
        }
    };
    let mut runmax = 0.0f64;
    for (j, v) in vals.iter_mut().enumerate() {
        runmax = runmax.max(uq.vals[j]);
        let corr = if w_head0.is_finite() {
            dens_corr.max(xmul(w_head0, runmax))
        } else {
            dens_corr
        };
        *v += corr;
    }
    GridFn {
        vals,
        asym0: a0,
        asym_inf: ai,
    }
}

// ---------------------------------------------------------------------------
// restricted-inequality term lists
// ---------------------------------------------------------------------------

/// `b_pow` is 1 for the restricted inequality and `1/alpha` in the direct
/// order-`alpha` display.
fn terms_t32(mach: &Mach, v1_inv_m: &GridFn, b_pow: f64) -> Vec<(String, f64)> {
    let q = mach.q;
    let big_b = mach.big_b.powf(b_pow);
    let t1 = mach.iwin.powf(1.0 / q).mul(v1_inv_m).sup_all();
    let t2 = big_b
        .mul(v1_inv_m)
        .mul(&mach.rs_uob)
        .mul(&mach.head_w.powf(1.0 / q))
        .sup_all();
    let t3 = big_b
        .mul(v1_inv_m)
        .mul(&mach.tail_j.powf(1.0 / q))
        .sup_all();
    vec![("T1".into(), t1), ("T2".into(), t2), ("T3".into(), t3)]
}

fn terms_t33i(mach: &Mach, v1_inv_m: &GridFn, p: f64) -> Result<Vec<(String, f64)>> {
    let q = mach.q;
    let pc = conjugate(p)?;
    let pts = mach.pts();
    let n = pts.len();
    let tp = GridFn::identity(mach.grid).powf(1.0 / p);
    let prefix = tp.mul(v1_inv_m);

    // T1: prefix * revsup( s^{-1/p} I(s)^{1/q} )
    let a = GridFn::identity(mach.grid)
        .powf(-1.0 / p)
        .mul(&mach.iwin.powf(1.0 / q));
    let t1 = prefix.mul(&a.revsup()).sup_all();

    // T2, T3: prefix * sup_{s >= t} (int_t^s (B/tau)^{p'})^{1/p'} * partner(s)
    let psi = mach.psi_rel(pc);
    let partner2: Vec<f64> = (0..n)
        .map(|i| xmul(mach.rs_uob.vals[i], xpow(mach.head_w.vals[i], 1.0 / q)))
        .collect();
    let partner3: Vec<f64> = (0..n).map(|i| xpow(mach.tail_j.vals[i], 1.0 / q)).collect();
    let mut prof2 = vec![0.0; n];
    let mut prof3 = vec![0.0; n];
    for i in 0..n {
        let mut best2 = 0.0f64;
        let mut best3 = 0.0f64;
        for s in i..n {
            let dpsi = xpow(psi[s] - psi[i], 1.0 / pc);
            best2 = best2.max(xmul(dpsi, partner2[s]));
            best3 = best3.max(xmul(dpsi, partner3[s]));
        }
        prof2[i] = xmul(prefix.vals[i], best2);
        prof3[i] = xmul(prefix.vals[i], best3);
    }
    let t2 = sup_profile(&prof2);
    let t3 = sup_profile(&prof3);
    Ok(vec![
        ("T1".into(), t1),
        ("T2".into(), t2),
        ("T3".into(), t3),
    ])
}

fn terms_t33ii(mach: &Mach, v1_inv_m: &GridFn, p: f64) -> Result<Vec<(String, f64)>> {
    let q = mach.q;
    let pc = conjugate(p)?;
    let pts = mach.pts();
    let n = pts.len();
    let e_w = q / (p - q);
    let e_out = (p - q) / (p * q);
    let tp = GridFn::identity(mach.grid).powf(1.0 / p);
    let prefix = tp.mul(v1_inv_m);

    // T1
    let t1 = mach.iwin.powf(1.0 / q).mul(v1_inv_m).sup_all();
    // T2: prefix * headW^{1/q} * revsup(u tau^{-1/p})
    let rs_ut = mach
        .u
        .mul(&GridFn::identity(mach.grid).powf(-1.0 / p))
        .revsup();
    let t2 = prefix.mul(&mach.head_w.powf(1.0 / q)).mul(&rs_ut).sup_all();

    // T3: prefix * ( int_t^inf rs(u^{pq/(p-q)} tau^{q/(q-p)})(s) (W(s)-W(t))^{e_w} w ds )^{e_out}
    let rs3 = mach
        .u
        .powf(p * q / (p - q))
        .mul(&GridFn::identity(mach.grid).powf(q / (q - p)))
        .revsup();
    let t3 = sup_tail_integral(mach, &prefix, |s, _i| rs3.vals[s], e_w, e_out, true);

    // T4: prefix * ( int_t^inf M_t(s)^{e_w} rs(u^q tau^{q/(q-p)})(s) w(s) ds )^{e_out}
    let rs4 = mach
        .uq
        .mul(&GridFn::identity(mach.grid).powf(q / (q - p)))
        .revsup();
    let mut prof4 = vec![0.0; n];
    for i in 0..n {
        let m_t = winsup_integral_from(&mach.uq.vals, &mach.wc.cells, i);
        let mut acc = 0.0;
        for s in i..n - 1 {
            let lo = xmul(xpow(m_t[s], e_w), rs4.vals[s]);
            let hi = xmul(xpow(m_t[s + 1], e_w), rs4.vals[s + 1]);
            acc += 0.5 * (lo + hi) * mach.wc.cells[s];
        }
        prof4[i] = xmul(prefix.vals[i], xpow(acc, e_out));
    }
    let t4 = sup_profile(&prof4);

    // ancillary arrays for the kernel terms
    let psi = mach.psi_rel(pc);
    let bos = mach.b_over_s_pow(pc);
    let e_kernel = p * (q - 1.0) / (p - q);

    // T5: prefix * W(t)^{1/q} * sup_{tau >= t} (u/B)(tau) G_t(tau)^{e_out}
    // T6: prefix * ( int_t^inf [sup_{tau>=x} rs((u/B)^{pq/(p-q)})(tau) G_t(tau)]
    //                (W(x)-W(t))^{e_w} w dx )^{e_out}
    // T7: prefix * ( int_t^inf tailJ^{e_w} rs_uob_q G_t w dx )^{e_out}
    let rs_uob_big = mach.uob.powf(p * q / (p - q)).revsup();
    let mut prof5 = vec![0.0; n];
    let mut prof6 = vec![0.0; n];
    let mut prof7 = vec![0.0; n];
    let mut g_t = vec![0.0; n];
    let mut h6 = vec![0.0; n];
    for i in 0..n {
        // G_t cumulative over the kernel
        g_t[i] = 0.0;
        for s in i..n - 1 {
            let klo = xmul(xpow(psi[s] - psi[i], e_kernel), bos[s]);
            let khi = xmul(xpow(psi[s + 1] - psi[i], e_kernel), bos[s + 1]);
            g_t[s + 1] = g_t[s] + 0.5 * (klo + khi) * (pts[s + 1] - pts[s]);
        }
        let mut best5 = 0.0f64;
        for tau in i..n {
            best5 = best5.max(xmul(mach.uob.vals[tau], xpow(g_t[tau], e_out)));
        }
        prof5[i] = xmul(
            xmul(prefix.vals[i], xpow(mach.head_w.vals[i], 1.0 / q)),
            best5,
        );

        // reverse max of rs_uob_big * G_t
        let mut running = 0.0f64;
        for tau in (i..n).rev() {
            running = running.max(xmul(rs_uob_big.vals[tau], g_t[tau]));
            h6[tau] = running;
        }
        let mut acc6 = 0.0;
        let mut acc7 = 0.0;
        for x in i..n - 1 {
            let dw_lo = xpow(mach.head_w.vals[x] - mach.head_w.vals[i], e_w);
            let dw_hi = xpow(mach.head_w.vals[x + 1] - mach.head_w.vals[i], e_w);
            acc6 += 0.5 * (xmul(h6[x], dw_lo) + xmul(h6[x + 1], dw_hi)) * mach.wc.cells[x];
            let t7_lo = xmul(
                xpow(mach.tail_j.vals[x], e_w),
                xmul(mach.rs_uob_q.vals[x], g_t[x]),
            );
            let t7_hi = xmul(
                xpow(mach.tail_j.vals[x + 1], e_w),
                xmul(mach.rs_uob_q.vals[x + 1], g_t[x + 1]),
            );
            acc7 += 0.5 * (t7_lo + t7_hi) * mach.wc.cells[x];
        }
        prof6[i] = xmul(prefix.vals[i], xpow(acc6, e_out));
        prof7[i] = xmul(prefix.vals[i], xpow(acc7, e_out));
    }
    let t5 = sup_profile(&prof5);
    let t6 = sup_profile(&prof6);
    let t7 = sup_profile(&prof7);
    Ok(vec![
        ("T1".into(), t1),
        ("T2".into(), t2),
        ("T3".into(), t3),
        ("T4".into(), t4),
        ("T5".into(), t5),
        ("T6".into(), t6),
        ("T7".into(), t7),
    ])
}

/// `sup_t prefix(t) ( int_t^inf f(s) (W(s) - W(t))^{e_w} w(s) ds )^{e_out}`.
fn sup_tail_integral<F: Fn(usize, usize) -> f64>(
    mach: &Mach,
    prefix: &GridFn,
    f: F,
    e_w: f64,
    e_out: f64,
    with_delta_w: bool,
) -> f64 {
    let pts = mach.pts();
    let n = pts.len();
    let mut prof = vec![0.0; n];
    for i in 0..n {
        let mut acc = 0.0;
        for s in i..n - 1 {
            let dw_lo = if with_delta_w {
                xpow(mach.head_w.vals[s] - mach.head_w.vals[i], e_w)
            } else {
                1.0
            };
            let dw_hi = if with_delta_w {
                xpow(mach.head_w.vals[s + 1] - mach.head_w.vals[i], e_w)
            } else {
                1.0
            };
            acc += 0.5 * (xmul(f(s, i), dw_lo) + xmul(f(s + 1, i), dw_hi)) * mach.wc.cells[s];
        }
        prof[i] = xmul(prefix.vals[i], xpow(acc, e_out));
    }
    sup_profile(&prof)
}

/// Kernel densities for the integral regimes: `base = v0/v1^{e_v1}` and the
/// `B^{e_b}`-weighted variant, with cumulative grid functions.
struct FrakMachinery {
    /// `int_s^inf base`
    tail_d: GridFn,
    /// `int_0^s B^{e_b} base`
    head_e: GridFn,
    base: GridFn,
    weighted: GridFn,
}

fn frak_machinery(mach: &Mach, dw: &DerivedWeights, e_v1: f64, e_b: f64) -> FrakMachinery {
    let base = GridFn::sample(
        |t| xmul(dw.v0(t), xpow(dw.v1(t), -e_v1)),
        mach.grid,
        dw.v0_asym(End::Zero).mul(dw.v1_asym(End::Zero).powf(-e_v1)),
        dw.v0_asym(End::Inf).mul(dw.v1_asym(End::Inf).powf(-e_v1)),
    );
    let weighted = mach.big_b.powf(e_b).mul(&base);
    FrakMachinery {
        tail_d: base.tail_int(mach.grid),
        head_e: weighted.head_int(mach.grid),
        base,
        weighted,
    }
}

fn terms_t34i(mach: &Mach, fm: &FrakMachinery, mc: f64) -> Vec<(String, f64)> {
    let q = mach.q;
    let t1 = fm
        .tail_d
        .powf(1.0 / mc)
        .mul(&mach.iwin.powf(1.0 / q))
        .sup_all();
    let t2 = fm
        .head_e
        .powf(1.0 / mc)
        .mul(&mach.head_w.powf(1.0 / q))
        .mul(&mach.rs_uob)
        .sup_all();
    let t3 = fm
        .head_e
        .powf(1.0 / mc)
        .mul(&mach.tail_j.powf(1.0 / q))
        .sup_all();
    vec![("T1".into(), t1), ("T2".into(), t2), ("T3".into(), t3)]
}

fn terms_t34ii(mach: &Mach, fm: &FrakMachinery, m: f64) -> Vec<(String, f64)> {
    let q = mach.q;
    let e_w = q / (m - q);
    let e_out = (m - q) / (m * q);
    let e_kernel = m * (q - 1.0) / (m - q);

    // frak kernels and their cumulatives
    let frak1 = fm.tail_d.powf(e_kernel).mul(&fm.base);
    let frak2 = fm.head_e.powf(e_kernel).mul(&fm.weighted);
    let tail_frak1 = frak1.tail_int(mach.grid);
    let head_frak2 = frak2.head_int(mach.grid);

    let f1 = mach
        .u
        .powf(m * q / (m - q))
        .mul(&tail_frak1)
        .revsup()
        .mul(&mach.head_w.powf(e_w));
    let u1 = integrate_fw(&f1, mach.w, &mach.wc, mach.grid);
    let f2 = mach.iwin.powf(e_w).mul(&mach.uq.mul(&tail_frak1).revsup());
    let u2 = integrate_fw(&f2, mach.w, &mach.wc, mach.grid);
    let f3 = mach
        .uob
        .powf(m * q / (m - q))
        .revsup()
        .mul(&head_frak2)
        .revsup()
        .mul(&mach.head_w.powf(e_w));
    let u3 = integrate_fw(&f3, mach.w, &mach.wc, mach.grid);
    let f4 = mach.tail_j.powf(e_w).mul(&mach.rs_uob_q).mul(&head_frak2);
    let u4 = integrate_fw(&f4, mach.w, &mach.wc, mach.grid);
    vec![
        ("T1".into(), xpow(u1, e_out)),
        ("T2".into(), xpow(u2, e_out)),
        ("T3".into(), xpow(u3, e_out)),
        ("T4".into(), xpow(u4, e_out)),
    ]
}

/// Machinery for the doubly-weighted regimes: the `v2`-type density and its
/// relative cumulative against the kernel `(int_s^t (B/y)^{e1} dy)^{e2}`.
struct V2Machinery {
    v2: GridFn,
    head_v2: GridFn,
    psi: Vec<f64>,
    /// `R(t) = int_0^t (int_s^t (B/y)^{e1} dy)^{e2} v2(s) ds`
    r_profile: Vec<f64>,
    /// `N_e(t) = int_0^inf (1/(s+t))^{e_n} v2(s) ds`
    n_profile: Vec<f64>,
    e_n: f64,
}

fn v2_machinery(mach: &Mach, v2: GridFn, e1: f64, e2: f64, e_n: f64) -> V2Machinery {
    let pts = mach.pts();
    let n = pts.len();
    let psi = mach.psi_rel(e1);
    let head_v2 = v2.head_int(mach.grid);
    let v2_head_mass = head_v2.vals[0];

    let mut r_profile = vec![0.0; n];
    for i in 0..n {
        let mut acc = xmul(v2_head_mass, xpow(psi[i] - psi[0], e2));
        for s in 0..i {
            let klo = xmul(xpow(psi[i] - psi[s], e2), v2.vals[s]);
            let khi = xmul(xpow(psi[i] - psi[s + 1], e2), v2.vals[s + 1]);
            acc += 0.5 * (klo + khi) * (pts[s + 1] - pts[s]);
        }
        r_profile[i] = acc;
    }

    let tail_scale = {
        // residual mass of v2(s) s^{-e_n} beyond the grid
        let density_inf = v2.asym_inf.mul(Asym::powlog(-e_n, 0.0));
        match density_inf {
            Asym::PowLog { pow, .. } if pow < -1.0 => {
                v2.vals[n - 1] * pts[n - 1].powf(-e_n) * pts[n - 1] / (-pow - 1.0)
            }
            _ => 0.0,
        }
    };
    let mut n_profile = vec![0.0; n];
    for i in 0..n {
        let t = pts[i];
        let mut acc = xmul(v2_head_mass, (pts[0] + t).powf(-e_n)) + tail_scale;
        for s in 0..n - 1 {
            let lo = xmul(v2.vals[s], (pts[s] + t).powf(-e_n));
            let hi = xmul(v2.vals[s + 1], (pts[s + 1] + t).powf(-e_n));
            acc += 0.5 * (lo + hi) * (pts[s + 1] - pts[s]);
        }
        n_profile[i] = acc;
    }
    V2Machinery {
        v2,
        head_v2,
        psi,
        r_profile,
        n_profile,
        e_n,
    }
}

fn terms_t35i(mach: &Mach, vm: &V2Machinery, mc: f64) -> Vec<(String, f64)> {
    let q = mach.q;

    let n = mach.pts().len();
    let mut prof1 = vec![0.0; n];
    let mut prof2 = vec![0.0; n];
    let mut prof3 = vec![0.0; n];
    for i in 0..n {
        let r = xpow(vm.r_profile[i], 1.0 / mc);
        prof1[i] = xmul(
            r,
            xmul(xpow(mach.head_w.vals[i], 1.0 / q), mach.rs_uob.vals[i]),
        );
        prof2[i] = xmul(r, xpow(mach.tail_j.vals[i], 1.0 / q));
        prof3[i] = xmul(
            xpow(vm.n_profile[i], 1.0 / mc),
            xpow(mach.iwin.vals[i], 1.0 / q),
        );
    }
    vec![
        ("T1".into(), sup_profile(&prof1)),
        ("T2".into(), sup_profile(&prof2)),
        ("T3".into(), sup_profile(&prof3)),
    ]
}

fn terms_t35ii(mach: &Mach, vm: &V2Machinery, p: f64, mc: f64, e1: f64) -> Vec<(String, f64)> {
    let q = mach.q;
    let pts = mach.pts();
    let n = pts.len();
    let e_w = q / (p - q);
    let e_out = (p - q) / (p * q);

    // first two terms share the structure of the aligned-exponent case
    let mut prof1 = vec![0.0; n];
    let mut prof2 = vec![0.0; n];
    for i in 0..n {
        let r = xpow(vm.r_profile[i], 1.0 / mc);
        prof1[i] = xmul(
            r,
            xmul(xpow(mach.head_w.vals[i], 1.0 / q), mach.rs_uob.vals[i]),
        );
        prof2[i] = xmul(r, xpow(mach.tail_j.vals[i], 1.0 / q));
    }
    let t1 = sup_profile(&prof1);
    let t2 = sup_profile(&prof2);

    // kernel pieces
    let bos = mach.b_over_s_pow(e1);
    let e_kernel = p * (q - 1.0) / (p - q);
    let rs_uob_big = mach.uob.powf(p * q / (p - q)).revsup();

    let mut prof3 = vec![0.0; n];
    let mut prof4 = vec![0.0; n];
    let mut prof5 = vec![0.0; n];
    let mut g_t = vec![0.0; n];
    let mut h4 = vec![0.0; n];
    for i in 0..n {
        let hv2 = xpow(vm.head_v2.vals[i], 1.0 / mc);
        g_t[i] = 0.0;
        for s in i..n - 1 {
            let klo = xmul(xpow(vm.psi[s] - vm.psi[i], e_kernel), bos[s]);
            let khi = xmul(xpow(vm.psi[s + 1] - vm.psi[i], e_kernel), bos[s + 1]);
            g_t[s + 1] = g_t[s] + 0.5 * (klo + khi) * (pts[s + 1] - pts[s]);
        }
        let mut best3 = 0.0f64;
        for tau in i..n {
            best3 = best3.max(xmul(mach.uob.vals[tau], xpow(g_t[tau], e_out)));
        }
        prof3[i] = xmul(hv2, xmul(xpow(mach.head_w.vals[i], 1.0 / q), best3));

        let mut running = 0.0f64;
        for tau in (i..n).rev() {
            running = running.max(xmul(rs_uob_big.vals[tau], g_t[tau]));
            h4[tau] = running;
        }
        let mut acc4 = 0.0;
        let mut acc5 = 0.0;
        for x in i..n - 1 {
            let dw_lo = xpow(mach.head_w.vals[x] - mach.head_w.vals[i], e_w);
            let dw_hi = xpow(mach.head_w.vals[x + 1] - mach.head_w.vals[i], e_w);
            acc4 += 0.5 * (xmul(h4[x], dw_lo) + xmul(h4[x + 1], dw_hi)) * mach.wc.cells[x];
            let lo5 = xmul(
                xpow(mach.tail_j.vals[x], e_w),
                xmul(mach.rs_uob_q.vals[x], g_t[x]),
            );
            let hi5 = xmul(
                xpow(mach.tail_j.vals[x + 1], e_w),
                xmul(mach.rs_uob_q.vals[x + 1], g_t[x + 1]),
            );
            acc5 += 0.5 * (lo5 + hi5) * mach.wc.cells[x];
        }
        prof4[i] = xmul(hv2, xpow(acc4, e_out));
        prof5[i] = xmul(hv2, xpow(acc5, e_out));
    }
    let t3 = sup_profile(&prof3);
    let t4 = sup_profile(&prof4);
    let t5 = sup_profile(&prof5);

    // T6/T7: prefactor int (t/(s+t))^{e_n} v2 against shifted-sup integrals
    let mut prof6 = vec![0.0; n];
    let mut prof7 = vec![0.0; n];
    let mut rs6 = vec![0.0; n];
    let mut rs7 = vec![0.0; n];
    for i in 0..n {
        let t = pts[i];
        let pref = xpow(xmul(t.powf(vm.e_n), vm.n_profile[i]), 1.0 / mc);
        let mut run6 = 0.0f64;
        let mut run7 = 0.0f64;
        for tau in (0..n).rev() {
            let shift = (pts[tau] + t).powf(q / (q - p));
            run6 = run6.max(xmul(mach.u.vals[tau].powf(p * q / (p - q)), shift));
            run7 = run7.max(xmul(mach.uq.vals[tau], shift));
            rs6[tau] = run6;
            rs7[tau] = run7;
        }
        let mut acc6 = 0.0;
        let mut acc7 = 0.0;
        for x in 0..n - 1 {
            let w_lo = xpow(mach.head_w.vals[x], e_w);
            let w_hi = xpow(mach.head_w.vals[x + 1], e_w);
            acc6 += 0.5 * (xmul(rs6[x], w_lo) + xmul(rs6[x + 1], w_hi)) * mach.wc.cells[x];
            acc7 += 0.5
                * (xmul(xpow(mach.iwin.vals[x], e_w), rs7[x])
                    + xmul(xpow(mach.iwin.vals[x + 1], e_w), rs7[x + 1]))
                * mach.wc.cells[x];
        }
        prof6[i] = xmul(pref, xpow(acc6, e_out));
        prof7[i] = xmul(pref, xpow(acc7, e_out));
    }
    let t6 = sup_profile(&prof6);
    let t7 = sup_profile(&prof7);

    vec![
        ("T1".into(), t1),
        ("T2".into(), t2),
        ("T3".into(), t3),
        ("T4".into(), t4),
        ("T5".into(), t5),
        ("T6".into(), t6),
        ("T7".into(), t7),
    ]
}

/// Conditions on the `v2` density required by the doubly-weighted regime.
fn check_v2_conditions(
    dw: &DerivedWeights,
    vm_asym0: Asym,
    vm_asym_inf: Asym,
    e_n: f64,
    probe: &[f64],
) -> Result<()> {
    let _ = dw;
    if !crate::asym::head_converges(vm_asym0) {
        return Err(Error::Admissibility("int_0^t v2 must be finite".into()));
    }
    let shifted_inf = vm_asym_inf.mul(Asym::powlog(-e_n, 0.0));
    if !crate::asym::tail_converges(shifted_inf) {
        return Err(Error::Admissibility(
            "int_t^inf s^{-e} v2 must be finite".into(),
        ));
    }
    let shifted_zero = vm_asym0.mul(Asym::powlog(-e_n, 0.0));
    if crate::asym::head_converges(shifted_zero) {
        return Err(Error::Admissibility(
            "int_0^1 s^{-e} v2 must diverge".into(),
        ));
    }
    if crate::asym::tail_converges(vm_asym_inf) {
        return Err(Error::Admissibility("int_1^inf v2 must diverge".into()));
    }
    for &r in probe {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Admissibility(format!(
                "kernel-weighted v2 integral must be positive finite, got {r}"
            )));
        }
    }
    Ok(())
}

/// Best constant of the restricted inequality, by regime-dispatched
/// evaluation of the characterizing term lists.
pub fn k_restricted(spec: &RestrictedSpec, grid: &Grid) -> Result<ConstantReport> {
    let (p, m, q) = (spec.params.p, spec.params.m, spec.params.q);
    let regime = classify(p, m, q)?;
    if spec.w.is_zero() {
        return Ok(ConstantReport::zero(regime.name(), grid));
    }
    let dw = DerivedWeights::new(spec.v.clone(), m, p)?;
    let u = spec.u.sample(grid);
    let big_b = head_primitive_fn(&spec.b, grid);
    let uob = u.mul(&big_b.powf(-1.0));
    let mach = Mach::new(u, uob, &spec.b, &spec.w, q, grid);
    let v1_inv_m = dw.v1_fn(grid).powf(-1.0 / m);

    let terms = match regime {
        Regime::T32 => terms_t32(&mach, &v1_inv_m, 1.0),
        Regime::T33i => terms_t33i(&mach, &v1_inv_m, p)?,
        Regime::T33ii => terms_t33ii(&mach, &v1_inv_m, p)?,
        Regime::T34i => {
            let mc = conjugate(m)?;
            let fm = frak_machinery(&mach, &dw, mc + 1.0, mc);
            terms_t34i(&mach, &fm, mc)
        }
        Regime::T34ii => {
            let mc = conjugate(m)?;
            let fm = frak_machinery(&mach, &dw, mc + 1.0, mc);
            terms_t34ii(&mach, &fm, m)
        }
        Regime::T35i | Regime::T35ii => {
            let mc = conjugate(m)?;
            let pc = conjugate(p)?;
            let v2 = GridFn::sample(
                |t| dw.v2(t).unwrap_or(f64::INFINITY),
                grid,
                dw.v2_asym(End::Zero)?,
                dw.v2_asym(End::Inf)?,
            );
            let e_n = mc / p;
            let vm = v2_machinery(&mach, v2, pc, mc / pc, e_n);
            let probes = [
                vm.r_profile[grid.len() / 4],
                vm.r_profile[grid.len() / 2],
                vm.r_profile[3 * grid.len() / 4],
            ];
            check_v2_conditions(&dw, vm.v2.asym0, vm.v2.asym_inf, e_n, &probes)?;
            if regime == Regime::T35i {
                terms_t35i(&mach, &vm, mc)
            } else {
                terms_t35ii(&mach, &vm, p, mc, pc)
            }
        }
    };
    Ok(ConstantReport::from_terms(regime.name(), terms, grid))
}

/// Reduce the maximal-operator problem to the restricted inequality:
/// `u = B/phi^alpha`, exponents divided by the order. The operator norm is
/// the reduced constant raised to `1/alpha`.
pub fn reduce_maximal(spec: &MaximalSpec, grid: &Grid) -> Result<(RestrictedSpec, f64)> {
    let fails = spec.shape_failures(grid);
    if !fails.is_empty() {
        return Err(Error::Shape(fails.join("; ")));
    }
    let alpha = spec.params.alpha;
    let hatted = Params::with_maximal(
        spec.params.p / alpha,
        spec.params.m / alpha,
        spec.params.q / alpha,
        1.0,
        spec.params.r,
    )?;
    let reduced = RestrictedSpec::new(
        hatted,
        UProfile::BOverPhi {
            b: spec.b.clone(),
            phi: spec.phi.clone(),
            alpha,
        },
        spec.b.clone(),
        spec.v.clone(),
        spec.w.clone(),
        grid,
    )?;
    Ok((reduced, alpha))
}

/// Which evaluation route the maximal norm takes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MnormPath {
    Direct,
    Reduced,
    Both,
}

/// §4-style regime names for reports.
fn maximal_regime_name(p: f64, m: f64, q: f64, alpha: f64) -> Result<&'static str> {
    let reduced = classify(p / alpha, m / alpha, q / alpha).map_err(|e| match e {
        Error::UncoveredRegion(msg) => Error::UncoveredRegion(msg),
        Error::Regime(msg) => Error::Regime(format!("maximal norm: {msg}")),
        other => other,
    })?;
    Ok(match reduced {
        Regime::T32 => "thm4.2",
        Regime::T33i => "thm4.3i",
        Regime::T33ii => "thm4.3ii",
        Regime::T34i => "thm4.4i",
        Regime::T34ii => "thm4.4ii",
        Regime::T35i => "thm4.5i",
        Regime::T35ii => "thm4.5ii",
    })
}

/// Norm of the generalized maximal operator. `Direct` evaluates the
/// order-`alpha` formulas verbatim; `Reduced` maps the restricted-inequality
/// terms through the reduction; `Both` runs the two and requires agreement
/// to 1e-9 relative.
pub fn maximal_norm(spec: &MaximalSpec, path: MnormPath, grid: &Grid) -> Result<ConstantReport> {
    let (p, m, q, alpha) = (
        spec.params.p,
        spec.params.m,
        spec.params.q,
        spec.params.alpha,
    );
    let regime_name = maximal_regime_name(p, m, q, alpha)?;
    if spec.w.is_zero() {
        return Ok(ConstantReport::zero(regime_name, grid));
    }
    let (reduced_spec, _) = reduce_maximal(spec, grid)?;

    let reduced_report = |grid: &Grid| -> Result<ConstantReport> {
        let inner = k_restricted(&reduced_spec, grid)?;
        let terms: Vec<(String, f64)> = inner
            .terms
            .iter()
            .map(|(name, v)| (name.clone(), xpow(*v, 1.0 / alpha)))
            .collect();
        Ok(ConstantReport::from_terms(regime_name, terms, grid))
    };

    match path {
        MnormPath::Reduced => reduced_report(grid),
        MnormPath::Direct => direct_maximal_report(spec, regime_name, grid),
        MnormPath::Both => {
            let direct = direct_maximal_report(spec, regime_name, grid)?;
            let reduced = reduced_report(grid)?;
            let err = crate::xreal::rel_err(direct.value, reduced.value);
            if err > 1e-9 {
                return Err(Error::Disagreement(format!(
                    "direct {} vs reduced {} (rel {err:.3e}) in {regime_name}",
                    direct.value, reduced.value
                )));
            }
            Ok(direct)
        }
    }
}

/// The order-`alpha` formulas written out as displayed, with
/// `B^{1/alpha}/phi` in the windowed suprema and `1/phi` in the tail parts.
fn direct_maximal_report(
    spec: &MaximalSpec,
    regime_name: &str,
    grid: &Grid,
) -> Result<ConstantReport> {
    let (p, m, q, alpha) = (
        spec.params.p,
        spec.params.m,
        spec.params.q,
        spec.params.alpha,
    );
    let dw = DerivedWeights::new(spec.v.clone(), m, p)?;

    // effective profiles
    let big_b = head_primitive_fn(&spec.b, grid);
    let phi_fn = GridFn::from_weight(&spec.phi, grid);
    let u_eff = big_b.powf(1.0 / alpha).mul(&phi_fn.powf(-1.0));
    let inv_phi = phi_fn.powf(-1.0);
    let mach = Mach::new(u_eff, inv_phi, &spec.b, &spec.w, q, grid);

    // v1^{-1/m} (the unhatted exponent appears verbatim in the displays)
    let v1_inv_m = dw.v1_fn(grid).powf(-1.0 / m);

    let terms = match regime_name {
        "thm4.2" => terms_t32(&mach, &v1_inv_m, 1.0 / alpha),
        "thm4.3i" => terms_m43i(&mach, &v1_inv_m, p, alpha)?,
        "thm4.3ii" => terms_m43ii(&mach, &v1_inv_m, p, alpha)?,
        "thm4.4i" | "thm4.4ii" => {
            let e_v1 = (2.0 * m - alpha) / (m - alpha);
            let e_b = m / (m - alpha);
            let fm = frak_machinery(&mach, &dw, e_v1, e_b);
            let e_out_sup = (m - alpha) / (m * alpha);
            if regime_name == "thm4.4i" {
                terms_m44i(&mach, &fm, e_out_sup)
            } else {
                terms_m44ii(&mach, &fm, m, alpha)
            }
        }
        "thm4.5i" | "thm4.5ii" => {
            let e1 = p / (p - alpha);
            let e2 = m * (p - alpha) / (p * (m - alpha));
            let e_n = m * alpha / (p * (m - alpha));
            let e_out_sup = (m - alpha) / (m * alpha);
            let v2 = GridFn::sample(
                |t| dw.v2_tilde(t, alpha).unwrap_or(f64::INFINITY),
                grid,
                dw.v2_tilde_asym(End::Zero, alpha)?,
                dw.v2_tilde_asym(End::Inf, alpha)?,
            );
            let vm = v2_machinery(&mach, v2, e1, e2, e_n);
            let probes = [
                vm.r_profile[grid.len() / 4],
                vm.r_profile[grid.len() / 2],
                vm.r_profile[3 * grid.len() / 4],
            ];
            check_v2_conditions(&dw, vm.v2.asym0, vm.v2.asym_inf, e_n, &probes)?;
            if regime_name == "thm4.5i" {
                terms_m45i(&mach, &vm, e_out_sup)
            } else {
                terms_m45ii(&mach, &vm, p, alpha, e_out_sup)
            }
        }
        other => return Err(Error::Regime(format!("unknown maximal regime {other}"))),
    };
    Ok(ConstantReport::from_terms(regime_name, terms, grid))
}

fn terms_m43i(mach: &Mach, v1_inv_m: &GridFn, p: f64, alpha: f64) -> Result<Vec<(String, f64)>> {
    let q = mach.q;
    let pts = mach.pts();
    let n = pts.len();
    let e1 = p / (p - alpha);
    let e_psi = (p - alpha) / (p * alpha);
    let tp = GridFn::identity(mach.grid).powf(1.0 / p);
    let prefix = tp.mul(v1_inv_m);

    let a = GridFn::identity(mach.grid)
        .powf(-1.0 / p)
        .mul(&mach.iwin.powf(1.0 / q));
    let t1 = prefix.mul(&a.revsup()).sup_all();

    let psi = mach.psi_rel(e1);
    let partner2: Vec<f64> = (0..n)
        .map(|i| xmul(mach.rs_uob.vals[i], xpow(mach.head_w.vals[i], 1.0 / q)))
        .collect();
    let partner3: Vec<f64> = (0..n).map(|i| xpow(mach.tail_j.vals[i], 1.0 / q)).collect();
    let mut prof2 = vec![0.0; n];
    let mut prof3 = vec![0.0; n];
    for i in 0..n {
        let mut best2 = 0.0f64;
        let mut best3 = 0.0f64;
        for s in i..n {
            let dpsi = xpow(psi[s] - psi[i], e_psi);
            best2 = best2.max(xmul(dpsi, partner2[s]));
            best3 = best3.max(xmul(dpsi, partner3[s]));
        }
        prof2[i] = xmul(prefix.vals[i], best2);
        prof3[i] = xmul(prefix.vals[i], best3);
    }
    Ok(vec![
        ("T1".into(), t1),
        ("T2".into(), sup_profile(&prof2)),
        ("T3".into(), sup_profile(&prof3)),
    ])
}

fn terms_m43ii(mach: &Mach, v1_inv_m: &GridFn, p: f64, alpha: f64) -> Result<Vec<(String, f64)>> {
    let q = mach.q;
    let pts = mach.pts();
    let n = pts.len();
    let e_w = q / (p - q);
    let e_out = (p - q) / (p * q);
    let e1 = p / (p - alpha);
    let e_kernel = p * (q - alpha) / (alpha * (p - q));
    let tp = GridFn::identity(mach.grid).powf(1.0 / p);
    let prefix = tp.mul(v1_inv_m);

    let t1 = mach.iwin.powf(1.0 / q).mul(v1_inv_m).sup_all();
    let rs_ut = mach
        .u
        .mul(&GridFn::identity(mach.grid).powf(-1.0 / p))
        .revsup();
    let t2 = prefix.mul(&mach.head_w.powf(1.0 / q)).mul(&rs_ut).sup_all();

    let rs3 = mach
        .u
        .powf(p * q / (p - q))
        .mul(&GridFn::identity(mach.grid).powf(q / (q - p)))
        .revsup();
    let t3 = sup_tail_integral(mach, &prefix, |s, _| rs3.vals[s], e_w, e_out, true);

    let rs4 = mach
        .uq
        .mul(&GridFn::identity(mach.grid).powf(q / (q - p)))
        .revsup();
    let mut prof4 = vec![0.0; n];
    for i in 0..n {
        let m_t = winsup_integral_from(&mach.uq.vals, &mach.wc.cells, i);
        let mut acc = 0.0;
        for s in i..n - 1 {
            let lo = xmul(xpow(m_t[s], e_w), rs4.vals[s]);
            let hi = xmul(xpow(m_t[s + 1], e_w), rs4.vals[s + 1]);
            acc += 0.5 * (lo + hi) * mach.wc.cells[s];
        }
        prof4[i] = xmul(prefix.vals[i], xpow(acc, e_out));
    }
    let t4 = sup_profile(&prof4);

    let psi = mach.psi_rel(e1);
    let bos = mach.b_over_s_pow(e1);
    let rs_inv_phi_big = mach.uob.powf(p * q / (p - q)).revsup();
    let mut prof5 = vec![0.0; n];
    let mut prof6 = vec![0.0; n];
    let mut prof7 = vec![0.0; n];
    let mut g_t = vec![0.0; n];
    let mut h6 = vec![0.0; n];
    for i in 0..n {
        g_t[i] = 0.0;
        for s in i..n - 1 {
            let klo = xmul(xpow(psi[s] - psi[i], e_kernel), bos[s]);
            let khi = xmul(xpow(psi[s + 1] - psi[i], e_kernel), bos[s + 1]);
            g_t[s + 1] = g_t[s] + 0.5 * (klo + khi) * (pts[s + 1] - pts[s]);
        }
        let mut best5 = 0.0f64;
        for tau in i..n {
            best5 = best5.max(xmul(mach.uob.vals[tau], xpow(g_t[tau], e_out)));
        }
        prof5[i] = xmul(
            xmul(prefix.vals[i], xpow(mach.head_w.vals[i], 1.0 / q)),
            best5,
        );
        let mut running = 0.0f64;
        for tau in (i..n).rev() {
            running = running.max(xmul(rs_inv_phi_big.vals[tau], g_t[tau]));
            h6[tau] = running;
        }
        let mut acc6 = 0.0;
        let mut acc7 = 0.0;
        for x in i..n - 1 {
            let dw_lo = xpow(mach.head_w.vals[x] - mach.head_w.vals[i], e_w);
            let dw_hi = xpow(mach.head_w.vals[x + 1] - mach.head_w.vals[i], e_w);
            acc6 += 0.5 * (xmul(h6[x], dw_lo) + xmul(h6[x + 1], dw_hi)) * mach.wc.cells[x];
            let lo7 = xmul(
                xpow(mach.tail_j.vals[x], e_w),
                xmul(mach.rs_uob_q.vals[x], g_t[x]),
            );
            let hi7 = xmul(
                xpow(mach.tail_j.vals[x + 1], e_w),
                xmul(mach.rs_uob_q.vals[x + 1], g_t[x + 1]),
            );
            acc7 += 0.5 * (lo7 + hi7) * mach.wc.cells[x];
        }
        prof6[i] = xmul(prefix.vals[i], xpow(acc6, e_out));
        prof7[i] = xmul(prefix.vals[i], xpow(acc7, e_out));
    }
    Ok(vec![
        ("T1".into(), t1),
        ("T2".into(), t2),
        ("T3".into(), t3),
        ("T4".into(), t4),
        ("T5".into(), sup_profile(&prof5)),
        ("T6".into(), sup_profile(&prof6)),
        ("T7".into(), sup_profile(&prof7)),
    ])
}

fn terms_m44i(mach: &Mach, fm: &FrakMachinery, e_out_sup: f64) -> Vec<(String, f64)> {
    let q = mach.q;
    let t1 = fm
        .tail_d
        .powf(e_out_sup)
        .mul(&mach.iwin.powf(1.0 / q))
        .sup_all();
    let t2 = fm
        .head_e
        .powf(e_out_sup)
        .mul(&mach.head_w.powf(1.0 / q))
        .mul(&mach.rs_uob)
        .sup_all();
    let t3 = fm
        .head_e
        .powf(e_out_sup)
        .mul(&mach.tail_j.powf(1.0 / q))
        .sup_all();
    vec![("T1".into(), t1), ("T2".into(), t2), ("T3".into(), t3)]
}

fn terms_m44ii(mach: &Mach, fm: &FrakMachinery, m: f64, alpha: f64) -> Vec<(String, f64)> {
    let q = mach.q;
    let e_w = q / (m - q);
    let e_out = (m - q) / (m * q);
    let e_kernel = m * (q - alpha) / (alpha * (m - q));

    let frak1 = fm.tail_d.powf(e_kernel).mul(&fm.base);
    let frak2 = fm.head_e.powf(e_kernel).mul(&fm.weighted);
    let tail_frak1 = frak1.tail_int(mach.grid);
    let head_frak2 = frak2.head_int(mach.grid);

    let f1 = mach
        .u
        .powf(m * q / (m - q))
        .mul(&tail_frak1)
        .revsup()
        .mul(&mach.head_w.powf(e_w));
    let u1 = integrate_fw(&f1, mach.w, &mach.wc, mach.grid);
    let f2 = mach.iwin.powf(e_w).mul(&mach.uq.mul(&tail_frak1).revsup());
    let u2 = integrate_fw(&f2, mach.w, &mach.wc, mach.grid);
    let f3 = mach
        .uob
        .powf(m * q / (m - q))
        .revsup()
        .mul(&head_frak2)
        .revsup()
        .mul(&mach.head_w.powf(e_w));
    let u3 = integrate_fw(&f3, mach.w, &mach.wc, mach.grid);
    let f4 = mach.tail_j.powf(e_w).mul(&mach.rs_uob_q).mul(&head_frak2);
    let u4 = integrate_fw(&f4, mach.w, &mach.wc, mach.grid);
    vec![
        ("T1".into(), xpow(u1, e_out)),
        ("T2".into(), xpow(u2, e_out)),
        ("T3".into(), xpow(u3, e_out)),
        ("T4".into(), xpow(u4, e_out)),
    ]
}

fn terms_m45i(mach: &Mach, vm: &V2Machinery, e_out_sup: f64) -> Vec<(String, f64)> {
    let q = mach.q;

    let n = mach.pts().len();
    let mut prof1 = vec![0.0; n];
    let mut prof2 = vec![0.0; n];
    let mut prof3 = vec![0.0; n];
    for i in 0..n {
        let r = xpow(vm.r_profile[i], e_out_sup);
        prof1[i] = xmul(
            r,
            xmul(xpow(mach.head_w.vals[i], 1.0 / q), mach.rs_uob.vals[i]),
        );
        prof2[i] = xmul(r, xpow(mach.tail_j.vals[i], 1.0 / q));
        prof3[i] = xmul(
            xpow(vm.n_profile[i], e_out_sup),
            xpow(mach.iwin.vals[i], 1.0 / q),
        );
    }
    vec![
        ("T1".into(), sup_profile(&prof1)),
        ("T2".into(), sup_profile(&prof2)),
        ("T3".into(), sup_profile(&prof3)),
    ]
}

fn terms_m45ii(
    mach: &Mach,
    vm: &V2Machinery,
    p: f64,
    alpha: f64,
    e_out_sup: f64,
) -> Vec<(String, f64)> {
    let q = mach.q;
    let pts = mach.pts();
    let n = pts.len();
    let e_w = q / (p - q);
    let e_out = (p - q) / (p * q);
    let e1 = p / (p - alpha);
    let e_kernel = p * (q - alpha) / (alpha * (p - q));

    let mut prof1 = vec![0.0; n];
    let mut prof2 = vec![0.0; n];
    for i in 0..n {
        let r = xpow(vm.r_profile[i], e_out_sup);
        prof1[i] = xmul(
            r,
            xmul(xpow(mach.head_w.vals[i], 1.0 / q), mach.rs_uob.vals[i]),
        );
        prof2[i] = xmul(r, xpow(mach.tail_j.vals[i], 1.0 / q));
    }
    let t1 = sup_profile(&prof1);
    let t2 = sup_profile(&prof2);

    let bos = mach.b_over_s_pow(e1);
    let rs_inv_phi_big = mach.uob.powf(p * q / (p - q)).revsup();
    let mut prof3 = vec![0.0; n];
    let mut prof4 = vec![0.0; n];
    let mut prof5 = vec![0.0; n];
    let mut g_t = vec![0.0; n];
    let mut h4 = vec![0.0; n];
    for i in 0..n {
        let hv2 = xpow(vm.head_v2.vals[i], e_out_sup);
        g_t[i] = 0.0;
        for s in i..n - 1 {
            let klo = xmul(xpow(vm.psi[s] - vm.psi[i], e_kernel), bos[s]);
            let khi = xmul(xpow(vm.psi[s + 1] - vm.psi[i], e_kernel), bos[s + 1]);
            g_t[s + 1] = g_t[s] + 0.5 * (klo + khi) * (pts[s + 1] - pts[s]);
        }
        let mut best3 = 0.0f64;
        for tau in i..n {
            best3 = best3.max(xmul(mach.uob.vals[tau], xpow(g_t[tau], e_out)));
        }
        prof3[i] = xmul(hv2, xmul(xpow(mach.head_w.vals[i], 1.0 / q), best3));

        let mut running = 0.0f64;
        for tau in (i..n).rev() {
            running = running.max(xmul(rs_inv_phi_big.vals[tau], g_t[tau]));
            h4[tau] = running;
        }
        let mut acc4 = 0.0;
        let mut acc5 = 0.0;
        for x in i..n - 1 {
            let dw_lo = xpow(mach.head_w.vals[x] - mach.head_w.vals[i], e_w);
            let dw_hi = xpow(mach.head_w.vals[x + 1] - mach.head_w.vals[i], e_w);
            acc4 += 0.5 * (xmul(h4[x], dw_lo) + xmul(h4[x + 1], dw_hi)) * mach.wc.cells[x];
            let lo5 = xmul(
                xpow(mach.tail_j.vals[x], e_w),
                xmul(mach.rs_uob_q.vals[x], g_t[x]),
            );
            let hi5 = xmul(
                xpow(mach.tail_j.vals[x + 1], e_w),
                xmul(mach.rs_uob_q.vals[x + 1], g_t[x + 1]),
            );
            acc5 += 0.5 * (lo5 + hi5) * mach.wc.cells[x];
        }
        prof4[i] = xmul(hv2, xpow(acc4, e_out));
        prof5[i] = xmul(hv2, xpow(acc5, e_out));
    }
    let t3 = sup_profile(&prof3);
    let t4 = sup_profile(&prof4);
    let t5 = sup_profile(&prof5);

    let mut prof6 = vec![0.0; n];
    let mut prof7 = vec![0.0; n];
    let mut rs6 = vec![0.0; n];
    let mut rs7 = vec![0.0; n];
    for i in 0..n {
        let t = pts[i];
        let pref = xpow(xmul(t.powf(vm.e_n), vm.n_profile[i]), e_out_sup);
        let mut run6 = 0.0f64;
        let mut run7 = 0.0f64;
        for tau in (0..n).rev() {
            let shift = (pts[tau] + t).powf(q / (q - p));
            run6 = run6.max(xmul(mach.u.vals[tau].powf(p * q / (p - q)), shift));
            run7 = run7.max(xmul(mach.uq.vals[tau], shift));
            rs6[tau] = run6;
            rs7[tau] = run7;
        }
        let mut acc6 = 0.0;
        let mut acc7 = 0.0;
        for x in 0..n - 1 {
            let w_lo = xpow(mach.head_w.vals[x], e_w);
            let w_hi = xpow(mach.head_w.vals[x + 1], e_w);
            acc6 += 0.5 * (xmul(rs6[x], w_lo) + xmul(rs6[x + 1], w_hi)) * mach.wc.cells[x];
            acc7 += 0.5
                * (xmul(xpow(mach.iwin.vals[x], e_w), rs7[x])
                    + xmul(xpow(mach.iwin.vals[x + 1], e_w), rs7[x + 1]))
                * mach.wc.cells[x];
        }
        prof6[i] = xmul(pref, xpow(acc6, e_out));
        prof7[i] = xmul(pref, xpow(acc7, e_out));
    }
    vec![
        ("T1".into(), t1),
        ("T2".into(), t2),
        ("T3".into(), t3),
        ("T4".into(), t4),
        ("T5".into(), t5),
        ("T6".into(), sup_profile(&prof6)),
        ("T7".into(), sup_profile(&prof7)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xreal::rel_err;

    #[test]
    fn classify_covers_and_refuses() {
        assert_eq!(classify(0.5, 0.5, 2.0).unwrap(), Regime::T32);
        assert_eq!(classify(2.0, 0.5, 3.0).unwrap(), Regime::T33i);
        assert_eq!(classify(3.0, 0.8, 2.0).unwrap(), Regime::T33ii);
        assert_eq!(classify(0.5, 2.0, 3.0).unwrap(), Regime::T34i);
        assert_eq!(classify(0.5, 3.0, 2.0).unwrap(), Regime::T34ii);
        assert_eq!(classify(2.0, 1.5, 3.0).unwrap(), Regime::T35i);
        assert_eq!(classify(2.5, 1.6, 2.0).unwrap(), Regime::T35ii);
        // the two declared holes
        assert!(matches!(
            classify(2.0, 3.0, 2.5),
            Err(Error::UncoveredRegion(_))
        ));
        assert!(matches!(
            classify(2.0, 2.0, 1.5),
            Err(Error::UncoveredRegion(_))
        ));
        // q <= 1 refused everywhere
        assert!(matches!(classify(0.5, 0.5, 1.0), Err(Error::Regime(_))));
        assert!(matches!(classify(2.0, 2.0, 0.7), Err(Error::Regime(_))));
    }

    #[test]
    fn dispatch_total_on_lattice() {
        // every lattice point yields exactly one regime or one declared error
        for i in 0..12 {
            for j in 0..12 {
                for k in 0..12 {
                    let p = 0.3 * 1.4f64.powi(i);
                    let m = 0.3 * 1.4f64.powi(j);
                    let q = 0.3 * 1.4f64.powi(k);
                    match classify(p, m, q) {
                        Ok(_) => {}
                        Err(Error::Regime(_)) | Err(Error::UncoveredRegion(_)) => {}
                        Err(other) => panic!("unexpected error {other:?} at ({p},{m},{q})"),
                    }
                }
            }
        }
    }

    #[test]
    fn reduce_identity_preset() {
        let grid = Grid::with_points(257);
        let v = crate::weights::member_weight(2.0, 2.0);
        let w = Weight::new(&[(0.0, 1.0, 0.0, 0.0), (1.0, 1.0, -2.0, 0.0)]).unwrap();
        let spec = MaximalSpec::hardy_littlewood(2.0, 2.0, 3.0, v, w).unwrap();
        let (reduced, alpha) = reduce_maximal(&spec, &grid).unwrap();
        assert_eq!(alpha, 1.0);
        assert_eq!(
            (reduced.params.p, reduced.params.m, reduced.params.q),
            (2.0, 2.0, 3.0)
        );
        // u = B/phi = t/t = 1
        for &t in &[0.01, 1.0, 70.0] {
            assert!(rel_err(reduced.u.eval(t), 1.0) < 1e-12);
        }
    }

    #[test]
    fn reduce_divides_exponents() {
        let grid = Grid::with_points(257);
        let v = crate::weights::member_weight(2.0, 2.0);
        let w = Weight::indicator(1.0);
        let params = Params::with_maximal(4.0, 4.0, 6.0, 2.0, 2.0).unwrap();
        let phi = Weight::power(1.0, 0.5);
        let spec = MaximalSpec::new(params, Weight::one(), phi, v, w).unwrap();
        let (reduced, alpha) = reduce_maximal(&spec, &grid).unwrap();
        assert_eq!(alpha, 2.0);
        assert_eq!(
            (reduced.params.p, reduced.params.m, reduced.params.q),
            (2.0, 2.0, 3.0)
        );
    }

    #[test]
    fn reduce_rejects_bad_phi() {
        let grid = Grid::with_points(257);
        let v = crate::weights::member_weight(2.0, 2.0);
        let w = Weight::indicator(1.0);
        let params = Params::with_maximal(2.0, 2.0, 3.0, 1.0, 1.0).unwrap();
        let spec = MaximalSpec::new(params, Weight::one(), Weight::power(1.0, -1.0), v, w).unwrap();
        assert!(matches!(reduce_maximal(&spec, &grid), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_weight_short_circuits() {
        let grid = Grid::with_points(257);
        let v = crate::weights::member_weight(0.5, 0.5);
        let w0 = Weight::new(&[(0.0, 0.0, 0.0, 0.0)]).unwrap();
        let spec = RestrictedSpec::new(
            Params::new(0.5, 0.5, 2.0).unwrap(),
            UProfile::Weight(Weight::one()),
            Weight::one(),
            v,
            w0,
            &grid,
        )
        .unwrap();
        let rep = k_restricted(&spec, &grid).unwrap();
        assert_eq!(rep.value, 0.0);
        assert_eq!(rep.regime, "thm3.2");
    }

    #[test]
    fn uncovered_surfaces_through_k() {
        let grid = Grid::with_points(257);
        let v = crate::weights::member_weight(3.0, 2.0);
        let spec = RestrictedSpec::new(
            Params::new(2.0, 3.0, 2.5).unwrap(),
            UProfile::Weight(Weight::one()),
            Weight::one(),
            v,
            Weight::indicator(1.0),
            &grid,
        )
        .unwrap();
        assert!(matches!(
            k_restricted(&spec, &grid),
            Err(Error::UncoveredRegion(_))
        ));
    }

    #[test]
    fn constructor_rejects_increasing_b() {
        let grid = Grid::with_points(257);
        let v = crate::weights::member_weight(2.0, 2.0);
        let res = RestrictedSpec::new(
            Params::new(2.0, 2.0, 3.0).unwrap(),
            UProfile::Weight(Weight::one()),
            Weight::power(1.0, 1.0),
            v,
            Weight::indicator(1.0),
            &grid,
        );
        assert!(matches!(res, Err(Error::Shape(_))));
    }

    #[test]
    fn k_monotone_in_w() {
        let grid = Grid::with_points(513);
        let v = Weight::new(&[(0.0, 1.0, -1.0, 0.0), (1.0, 1.0, -1.5, 0.0)]).unwrap();
        let w1 = Weight::new(&[(0.0, 1.0, 0.5, 0.0), (1.0, 1.0, -2.0, 0.0)]).unwrap();
        let w2 = Weight::new(&[(0.0, 2.0, 0.5, 0.0), (1.0, 1.0, -2.0, 0.0)]).unwrap();
        let u = Weight::new(&[(0.0, 1.0, 0.0, 0.0), (1.0, 1.0, -1.0, 0.0)]).unwrap();
        let mk = |w: Weight| {
            RestrictedSpec::new(
                Params::new(2.0, 1.5, 3.0).unwrap(),
                UProfile::Weight(u.clone()),
                Weight::one(),
                v.clone(),
                w,
                &grid,
            )
            .unwrap()
        };
        let k1 = k_restricted(&mk(w1), &grid).unwrap().value;
        let k2 = k_restricted(&mk(w2), &grid).unwrap().value;
        assert!(k1 <= k2 * (1.0 + 1e-9), "{k1} vs {k2}");
    }

    #[test]
    fn lorentz_preset_reduces() {
        let grid = Grid::with_points(257);
        // order q_l = 1, inner weight t^{q_l/p_l - 1}, normalization t^{1/p_l}
        let v = crate::weights::member_weight(2.0, 2.0);
        let w = Weight::new(&[(0.0, 1.0, 0.0, 0.0), (1.0, 1.0, -2.0, 0.0)]).unwrap();
        let spec = MaximalSpec::lorentz_maximal(2.0, 1.0, 2.0, 2.0, 3.0, v, w).unwrap();
        let (reduced, alpha) = reduce_maximal(&spec, &grid).unwrap();
        assert_eq!(alpha, 1.0);
        // u = B/phi = (2 sqrt(t)) / sqrt(t) = 2
        for &t in &[0.5, 7.0] {
            assert!(rel_err(reduced.u.eval(t), 2.0) < 1e-12);
        }
    }
}

#[cfg(test)]
mod log_weight_tests {
    use super::*;
    use crate::verify::{brute_force_k, equivalence_report, WINDOW_K};

    /// Logarithmic corrections flow through the whole pipeline: weights with
    /// nonzero log exponents keep the constant finite and inside the search
    /// window.
    #[test]
    fn k_with_log_corrected_weights() {
        let grid = Grid::with_points(513);
        let u = Weight::new(&[(0.0, 1.0, 0.0, 0.0), (1.0, 1.0, -1.0, 0.0)]).unwrap();
        let v = Weight::new(&[(0.0, 1.0, -1.0, 0.5), (1.0, 1.0, -1.5, 0.0)]).unwrap();
        let w = Weight::new(&[(0.0, 1.0, 0.5, 0.0), (1.0, 1.0, -2.0, -0.5)]).unwrap();
        let spec = RestrictedSpec::new(
            Params::new(2.0, 1.5, 3.0).unwrap(),
            UProfile::Weight(u),
            Weight::one(),
            v,
            w,
            &grid,
        )
        .unwrap();
        let rep = k_restricted(&spec, &grid).unwrap();
        assert!(
            rep.value.is_finite() && rep.value > 0.0,
            "K = {}",
            rep.value
        );
        let oracle = brute_force_k(&spec, 1200, 2, 13, &grid);
        let eq = equivalence_report(rep.value, oracle.oracle_lower_bound, WINDOW_K);
        assert!(
            eq.pass,
            "formula {} oracle {}",
            rep.value, oracle.oracle_lower_bound
        );
    }
}
