//! The supremal Hardy-type operator and the identity toolbox used as exact
//! test oracles: monotone mass transfer, the gluing identity, integration by
//! parts against a non-increasing factor, and restricted-supremum
//! decompositions.

use crate::asym::{head_integral_asym, Asym, End, Tendency};
use crate::error::{Error, Result};
use crate::gridfn::GridFn;
use crate::quad;
use crate::stepfn::{Density, Grid, StepFn};
use crate::weights::{check_shape, ShapeKind, ShapeVerdict, Weight};
use crate::xreal::{xdiv, xmul, xpow};

/// The pair `(u, b)` defining `T g (t) = sup_{tau >= t} u(tau)/B(tau) *
/// int_0^tau g b`, with `B = int_0^. b`.
#[derive(Clone, Debug)]
pub struct OperatorSpec {
    u: Weight,
    b: Weight,
}

impl OperatorSpec {
    pub fn new(u: Weight, b: Weight, grid: &Grid) -> Result<OperatorSpec> {
        if !u.is_continuous() {
            return Err(Error::Shape(
                "u must be continuous across breakpoints".into(),
            ));
        }
        // 0 < B < inf across the grid: monotone, so the endpoints decide
        b.cumulative_b(grid.t_min)?;
        b.cumulative_b(grid.t_max)?;
        Ok(OperatorSpec { u, b })
    }

    pub fn u(&self) -> &Weight {
        &self.u
    }

    pub fn b(&self) -> &Weight {
        &self.b
    }

    pub fn big_b(&self, t: f64) -> f64 {
        self.b.primitive(0.0, t).unwrap_or(f64::INFINITY)
    }

    /// `u/B` sampled with endpoint behavior (`B` is the head integral of `b`).
    pub fn u_over_b(&self, grid: &Grid) -> GridFn {
        let (b0, bi) = head_integral_asym(self.b.asym(End::Zero), self.b.asym(End::Inf));
        GridFn::sample(
            |t| xdiv(self.u.eval(t), self.big_b(t)),
            grid,
            self.u.asym(End::Zero).mul(b0.powf(-1.0)),
            self.u.asym(End::Inf).mul(bi.powf(-1.0)),
        )
    }
}

/// `int_0^tau g b` at every grid point (exact piecewise products).
pub fn pair_integral_profile(spec: &OperatorSpec, g: &StepFn, grid: &Grid) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    let mut prev = 0.0;
    for &tau in grid.points() {
        acc += segment_pair_integral(g, spec.b(), prev, tau);
        prev = tau;
        out.push(acc);
    }
    out
}

fn segment_pair_integral(g: &StepFn, b: &Weight, lo: f64, hi: f64) -> f64 {
    let mut acc = 0.0;
    let mut seg_lo = lo;
    for (&br, &v) in g.breaks().iter().zip(g.values()) {
        if br <= seg_lo {
            continue;
        }
        if seg_lo >= hi {
            break;
        }
        let seg_hi = br.min(hi);
        if v > 0.0 {
            acc += xmul(v, b.primitive(seg_lo, seg_hi).unwrap_or(f64::INFINITY));
        }
        seg_lo = seg_hi;
    }
    acc
}

/// The operator profile `t -> T g (t)` over the grid: reverse cumulative max
/// of `(u/B) * int_0^tau g b`, with the analytic tail limit folded in
/// (`int g b` is eventually constant by finite support).
pub fn t_ub_profile(spec: &OperatorSpec, g: &StepFn, grid: &Grid) -> GridFn {
    let uob = spec.u_over_b(grid);
    let pair = pair_integral_profile(spec, g, grid);
    let pointwise = GridFn {
        vals: pair
            .iter()
            .zip(&uob.vals)
            .map(|(&c, &r)| xmul(c, r))
            .collect(),
        asym0: if g.is_zero() {
            Asym::Zero
        } else {
            Asym::powlog(1.0, 0.0).mul(uob.asym0)
        },
        asym_inf: if g.is_zero() {
            Asym::Zero
        } else {
            uob.asym_inf
        },
    };
    pointwise.revsup()
}

/// `T g (t)` at a single point: the grid profile, the query point itself,
/// and the tail limit.
pub fn t_ub(spec: &OperatorSpec, g: &StepFn, t: f64) -> f64 {
    debug_assert!(t > 0.0);
    let grid = Grid::default_grid();
    let profile = t_ub_profile(spec, g, &grid);
    let at_t = xmul(
        xdiv(spec.u().eval(t), spec.big_b(t)),
        segment_pair_integral(g, spec.b(), 0.0, t),
    );
    let idx = grid.points().partition_point(|&x| x < t);
    let from_grid = if idx < grid.len() {
        profile.vals[idx]
    } else {
        0.0
    };
    let tail_inf = if profile.asym_inf.tendency(End::Inf) == Tendency::ToInfinity {
        f64::INFINITY
    } else {
        0.0
    };
    at_t.max(from_grid).max(tail_inf)
}

/// Which side of the monotone-transfer identity to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferMode {
    /// `int f(x) sup_{t >= x} w(t) dx`
    RhsFormula,
    /// greedy rightward mass transport maximizing `int g w` under
    /// `int_0^x g <= int_0^x f`
    LhsOracle,
}

/// Both sides of `sup { int g w : int_0^x g <= int_0^x f } =
/// int f(x) (sup_{t >= x} w(t)) dx` on a finite lattice.
pub fn transfer_monotone(f: &Density, w: &Weight, mode: TransferMode, lattice: &[f64]) -> f64 {
    let n = lattice.len();
    assert!(n >= 2, "transfer needs a lattice");
    let w_node: Vec<f64> = lattice.iter().map(|&x| w.eval(x)).collect();
    // cell k spans [lattice[k], lattice[k+1]) plus a leading cell (0, lattice[0]]
    let mut masses = Vec::with_capacity(n);
    masses.push(f.cum_integral(lattice[0]));
    for k in 0..n - 1 {
        masses.push(f.cum_integral(lattice[k + 1]) - f.cum_integral(lattice[k]));
    }
    match mode {
        TransferMode::RhsFormula => {
            let mut revsup = w_node.clone();
            for k in (0..n - 1).rev() {
                revsup[k] = revsup[k].max(revsup[k + 1]);
            }
            masses.iter().zip(&revsup).map(|(&m, &s)| xmul(m, s)).sum()
        }
        TransferMode::LhsOracle => {
            // move every cell's mass right to the first maximizer of w
            let mut dest = vec![0usize; n];
            let mut best = n - 1;
            for k in (0..n).rev() {
                if w_node[k] >= w_node[best] {
                    best = k;
                }
                dest[k] = best;
            }
            let mut g_mass = vec![0.0; n];
            for (k, &m) in masses.iter().enumerate() {
                g_mass[dest[k]] += m;
            }
            // feasibility: cumulative mass of g never exceeds that of f
            let mut cum_f = 0.0;
            let mut cum_g = 0.0;
            for k in 0..n {
                cum_f += masses[k];
                cum_g += g_mass[k];
                debug_assert!(cum_g <= cum_f + 1e-9 * cum_f.max(1.0));
            }
            g_mass
                .iter()
                .zip(&w_node)
                .map(|(&m, &wv)| xmul(m, wv))
                .sum()
        }
    }
}

/// Both sides of the gluing identity for a non-decreasing `a`:
/// the blended two-factor supremum against the split head/tail form.
pub fn glue_sides(
    a: &Weight,
    g: &Weight,
    h: &Weight,
    alpha: f64,
    beta: f64,
    grid: &Grid,
) -> Result<(f64, f64)> {
    if check_shape(a, ShapeKind::QuasiIncreasing) != ShapeVerdict::Holds {
        return Err(Error::Shape("gluing needs a non-decreasing".into()));
    }
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Domain("gluing exponents must be positive".into()));
    }
    let pts = grid.points();
    let g_fn = GridFn::from_weight(g, grid);
    let h_fn = GridFn::from_weight(h, grid);
    let a_fn = GridFn::from_weight(a, grid);
    let g_mass = g_fn.cell_masses(grid);
    let h_mass = h_fn.cell_masses(grid);

    let mut lhs = 0.0f64;
    for (i, &x) in pts.iter().enumerate() {
        let ax = a_fn.vals[i];
        let mut first = 0.0;
        let mut second = 0.0;
        for k in 0..pts.len() - 1 {
            let am = 0.5 * (a_fn.vals[k] + a_fn.vals[k + 1]);
            first += g_mass[k] * (ax / (ax + am)).powf(beta);
            second += h_mass[k] * (am / (ax + am)).powf(alpha);
        }
        let _ = x;
        lhs = lhs.max(xmul(xpow(first, 1.0 / beta), xpow(second, 1.0 / alpha)));
    }

    // split form, exact antiderivatives
    let head_g = crate::constants::head_primitive_fn(g, grid);
    let tail_h = crate::constants::tail_primitive_fn(h, grid);
    let term1 = head_g
        .powf(1.0 / beta)
        .mul(&tail_h.powf(1.0 / alpha))
        .sup_all();
    let ga = g.mul(&a.powf(-beta));
    let ha = h.mul(&a.powf(alpha));
    let tail_ga = crate::constants::tail_primitive_fn(&ga, grid);
    let head_ha = crate::constants::head_primitive_fn(&ha, grid);
    let term2 = tail_ga
        .powf(1.0 / beta)
        .mul(&head_ha.powf(1.0 / alpha))
        .sup_all();
    Ok((lhs, term1 + term2))
}

/// `A1 = int (int_0^t g)^alpha g(t) f(t) dt` (quadrature) and the jump-sum
/// form `A2 = sum_i (int_0^{t_i} g)^{alpha+1} jump_i` (exact); for finitely
/// supported `f` the boundary term vanishes and `A2 = (alpha+1) A1`.
pub fn ibp_pair(g: &Weight, f: &StepFn, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::Domain("ibp needs alpha > 0".into()));
    }
    let probe = g.primitive(0.0, 1e-8)?;
    if !(probe > 0.0) || !probe.is_finite() {
        return Err(Error::Domain("ibp needs 0 < int_0^t g < inf".into()));
    }
    if f.is_zero() {
        return Ok((0.0, 0.0));
    }
    let big_g = |t: f64| g.primitive(0.0, t).unwrap_or(f64::INFINITY);

    let mut a1 = 0.0;
    let mut lo = 0.0;
    for (&br, &v) in f.breaks().iter().zip(f.values()) {
        if v > 0.0 {
            // split at g's breakpoints for smooth panels
            let mut cuts = vec![lo, br];
            for p in g.pieces() {
                if p.lo > lo && p.lo < br {
                    cuts.push(p.lo);
                }
            }
            cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
            for pair in cuts.windows(2) {
                a1 += v * quad::integrate(
                    |t| big_g(t).powf(alpha) * g.eval(t),
                    pair[0],
                    pair[1],
                    1e-11,
                );
            }
        }
        lo = br;
    }

    let mut a2 = 0.0;
    let k = f.values().len();
    for i in 0..k {
        let jump = f.values()[i] - f.values().get(i + 1).copied().unwrap_or(0.0);
        if jump > 0.0 {
            a2 += big_g(f.breaks()[i]).powf(alpha + 1.0) * jump;
        }
    }
    Ok((a1, a2))
}

/// Restricted-supremum decompositions: the head form truncates the argument
/// of the supremum to `(0, t]`, the tail form to `[t, inf)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupSide {
    Head,
    Tail,
}

#[derive(Clone, Debug)]
pub struct SupRestriction {
    pub side: SupSide,
    pub t: f64,
    /// head: `x -> sup_{x <= tau <= t} F` for `x <= t`, zero past `t`;
    /// tail: `x -> sup_{tau >= x} F` (meaningful past `t`).
    pub values: Vec<f64>,
    /// tail only: `sup_{tau >= t} F`.
    pub plateau: Option<f64>,
}

pub fn sup_restrict(f_vals: &[f64], grid: &Grid, t: f64, side: SupSide) -> SupRestriction {
    let pts = grid.points();
    let n = pts.len();
    let cut = pts.partition_point(|&x| x <= t);
    match side {
        SupSide::Head => {
            let mut values = vec![0.0; n];
            let mut running = 0.0f64;
            for i in (0..cut).rev() {
                running = running.max(f_vals[i]);
                values[i] = running;
            }
            SupRestriction {
                side,
                t,
                values,
                plateau: None,
            }
        }
        SupSide::Tail => {
            let mut values = vec![0.0; n];
            let mut running = 0.0f64;
            for i in (0..n).rev() {
                running = running.max(f_vals[i]);
                values[i] = running;
            }
            let plateau = values[cut.min(n - 1)];
            SupRestriction {
                side,
                t,
                values,
                plateau: Some(plateau),
            }
        }
    }
}

impl SupRestriction {
    /// Integrate the decomposed supremum against `w`, following the split
    /// form: head uses the windowed sup on `(0, t]`; tail uses the plateau
    /// on `(0, t]` and the running sup past `t`.
    pub fn integral_against(&self, w: &GridFn, grid: &Grid) -> f64 {
        let pts = grid.points();
        let n = pts.len();
        let node = |i: usize| -> f64 {
            match self.side {
                SupSide::Head => self.values[i],
                SupSide::Tail => {
                    if pts[i] <= self.t {
                        self.plateau.expect("tail carries its plateau")
                    } else {
                        self.values[i]
                    }
                }
            }
        };
        (0..n - 1)
            .map(|k| {
                0.5 * (xmul(node(k), w.vals[k]) + xmul(node(k + 1), w.vals[k + 1]))
                    * (pts[k + 1] - pts[k])
            })
            .sum()
    }
}
