//! Functions sampled on the shared log grid, carrying power-log asymptotics
//! at both endpoints.
//!
//! The constant formulas are assembled from a small set of combinators on
//! these samples: pointwise products and powers, head/tail integrals
//! (trapezoid on the grid, divergence decided by the carried asymptotics),
//! and running suprema. Suprema over `(0, inf)` are grid suprema augmented
//! by the endpoint classification: a factor whose asymptotics blow up makes
//! the supremum infinite even when the grid values stay bounded.

use crate::asym::{
    head_converges, head_integral_asym, revsup_asym, tail_converges, tail_integral_asym, Asym, End,
    Tendency,
};
use crate::stepfn::Grid;
use crate::weights::Weight;
use crate::xreal::{xmul, xpow};

#[derive(Clone, Debug)]
pub struct GridFn {
    pub vals: Vec<f64>,
    pub asym0: Asym,
    pub asym_inf: Asym,
}

impl GridFn {
    pub fn from_weight(w: &Weight, grid: &Grid) -> GridFn {
        GridFn {
            vals: grid.points().iter().map(|&t| w.eval(t)).collect(),
            asym0: w.asym(End::Zero),
            asym_inf: w.asym(End::Inf),
        }
    }

    /// Sample an arbitrary function; the caller supplies the endpoint
    /// behavior (it cannot be inferred from samples).
    pub fn sample<F: Fn(f64) -> f64>(f: F, grid: &Grid, asym0: Asym, asym_inf: Asym) -> GridFn {
        GridFn {
            vals: grid.points().iter().map(|&t| f(t)).collect(),
            asym0,
            asym_inf,
        }
    }

    pub fn constant(c: f64, grid: &Grid) -> GridFn {
        let asym = if c == 0.0 { Asym::Zero } else { Asym::ONE };
        GridFn {
            vals: vec![c; grid.len()],
            asym0: asym,
            asym_inf: asym,
        }
    }

    /// The identity function `t`.
    pub fn identity(grid: &Grid) -> GridFn {
        GridFn {
            vals: grid.points().to_vec(),
            asym0: Asym::powlog(1.0, 0.0),
            asym_inf: Asym::powlog(1.0, 0.0),
        }
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn mul(&self, other: &GridFn) -> GridFn {
        GridFn {
            vals: self
                .vals
                .iter()
                .zip(&other.vals)
                .map(|(&a, &b)| xmul(a, b))
                .collect(),
            asym0: self.asym0.mul(other.asym0),
            asym_inf: self.asym_inf.mul(other.asym_inf),
        }
    }

    pub fn powf(&self, e: f64) -> GridFn {
        GridFn {
            vals: self.vals.iter().map(|&a| xpow(a, e)).collect(),
            asym0: self.asym0.powf(e),
            asym_inf: self.asym_inf.powf(e),
        }
    }

    pub fn add(&self, other: &GridFn) -> GridFn {
        GridFn {
            vals: self
                .vals
                .iter()
                .zip(&other.vals)
                .map(|(&a, &b)| a + b)
                .collect(),
            asym0: self.asym0.add(other.asym0, End::Zero),
            asym_inf: self.asym_inf.add(other.asym_inf, End::Inf),
        }
    }

    pub fn scale(&self, c: f64) -> GridFn {
        let asym_scale = |a: Asym| if c == 0.0 { Asym::Zero } else { a };
        GridFn {
            vals: self.vals.iter().map(|&a| xmul(c, a)).collect(),
            asym0: asym_scale(self.asym0),
            asym_inf: asym_scale(self.asym_inf),
        }
    }

    /// Running supremum over `[t, inf)`: reverse cumulative max over the
    /// grid; an endpoint that grows without bound makes the whole profile
    /// infinite.
    pub fn revsup(&self) -> GridFn {
        let (asym0, asym_inf) = revsup_asym(self.asym0, self.asym_inf);
        let mut vals = self.vals.clone();
        if self.asym_inf.tendency(End::Inf) == Tendency::ToInfinity {
            vals.iter_mut().for_each(|v| *v = f64::INFINITY);
        } else {
            let mut running = 0.0f64;
            for v in vals.iter_mut().rev() {
                running = running.max(*v);
                *v = running;
            }
        }
        GridFn {
            vals,
            asym0,
            asym_inf,
        }
    }

    /// Trapezoid cell masses against the grid spacing: `mass[k]` covers
    /// `[x_k, x_{k+1}]`.
    pub fn cell_masses(&self, grid: &Grid) -> Vec<f64> {
        let x = grid.points();
        (0..x.len() - 1)
            .map(|k| 0.5 * (self.vals[k] + self.vals[k + 1]) * (x[k + 1] - x[k]))
            .collect()
    }

    /// Mass hiding below the grid, estimated from the 0-asymptotics: for
    /// `f ~ C t^a L^b` with `a > -1` the head is `~ f(t_min) t_min / (a+1)`.
    fn head_correction(&self, grid: &Grid) -> f64 {
        if !head_converges(self.asym0) {
            return f64::INFINITY;
        }
        match self.asym0 {
            Asym::Zero => 0.0,
            Asym::Infinite => f64::INFINITY,
            Asym::PowLog { pow, .. } => {
                if pow > -1.0 {
                    xmul(self.vals[0], grid.t_min) / (pow + 1.0)
                } else {
                    // pow = -1 with log < -1: remaining head ~ f(t)*t*L(t)/|log+1|
                    xmul(self.vals[0], grid.t_min) * (1.0 + grid.t_min.ln().abs())
                }
            }
        }
    }

    fn tail_correction(&self, grid: &Grid) -> f64 {
        if !tail_converges(self.asym_inf) {
            return f64::INFINITY;
        }
        match self.asym_inf {
            Asym::Zero => 0.0,
            Asym::Infinite => f64::INFINITY,
            Asym::PowLog { pow, .. } => {
                let last = *self.vals.last().expect("non-empty grid");
                if pow < -1.0 {
                    xmul(last, grid.t_max) / (-pow - 1.0)
                } else {
                    xmul(last, grid.t_max) * (1.0 + grid.t_max.ln().abs())
                }
            }
        }
    }

    /// `t -> int_0^t f` on the grid. A divergent head makes the whole
    /// primitive infinite.
    pub fn head_int(&self, grid: &Grid) -> GridFn {
        let (asym0, asym_inf) = head_integral_asym(self.asym0, self.asym_inf);
        let n = self.vals.len();
        if asym0 == Asym::Infinite {
            return GridFn {
                vals: vec![f64::INFINITY; n],
                asym0,
                asym_inf,
            };
        }
        let masses = self.cell_masses(grid);
        let mut vals = Vec::with_capacity(n);
        let mut acc = self.head_correction(grid);
        vals.push(acc);
        for m in masses {
            acc += m;
            vals.push(acc);
        }
        GridFn {
            vals,
            asym0,
            asym_inf,
        }
    }

    /// `t -> int_t^inf f` on the grid.
    pub fn tail_int(&self, grid: &Grid) -> GridFn {
        let (asym0, asym_inf) = tail_integral_asym(self.asym0, self.asym_inf);
        let n = self.vals.len();
        if asym_inf == Asym::Infinite {
            return GridFn {
                vals: vec![f64::INFINITY; n],
                asym0,
                asym_inf,
            };
        }
        let masses = self.cell_masses(grid);
        let mut vals = vec![0.0; n];
        let mut acc = self.tail_correction(grid);
        vals[n - 1] = acc;
        for k in (0..n - 1).rev() {
            acc += masses[k];
            vals[k] = acc;
        }
        GridFn {
            vals,
            asym0,
            asym_inf,
        }
    }

    /// `int_0^inf f`: trapezoid over the grid plus endpoint corrections;
    /// infinite when either endpoint integral diverges.
    pub fn integrate_all(&self, grid: &Grid) -> f64 {
        if !head_converges(self.asym0) || !tail_converges(self.asym_inf) {
            return f64::INFINITY;
        }
        let interior: f64 = self.cell_masses(grid).iter().sum();
        interior + self.head_correction(grid) + self.tail_correction(grid)
    }

    /// `sup_(0,inf) f`: grid max, infinite when an endpoint blows up.
    pub fn sup_all(&self) -> f64 {
        if self.asym0.diverges(End::Zero) || self.asym_inf.diverges(End::Inf) {
            return f64::INFINITY;
        }
        self.vals.iter().copied().fold(0.0, f64::max)
    }
}

/// Exact per-cell masses of a weight over the grid: `cells[k]` is the true
/// `int w` over `[x_k, x_{k+1}]`, so jumps and integrable singularities of
/// the weight inside a cell cost nothing.
pub struct WeightedCells {
    pub cells: Vec<f64>,
    /// `int_0^{x_0} w` (infinite when the head diverges)
    pub head: f64,
    /// `int_{x_{n-1}}^inf w`
    pub tail: f64,
}

pub fn weighted_cells(w: &Weight, grid: &Grid) -> WeightedCells {
    let pts = grid.points();
    let cells = (0..pts.len() - 1)
        .map(|k| w.primitive(pts[k], pts[k + 1]).unwrap_or(f64::INFINITY))
        .collect();
    WeightedCells {
        cells,
        head: w.primitive(0.0, pts[0]).unwrap_or(f64::INFINITY),
        tail: w
            .primitive(pts[pts.len() - 1], f64::INFINITY)
            .unwrap_or(f64::INFINITY),
    }
}

/// `int_0^inf f w` with the weight integrated exactly per cell and `f`
/// averaged on the nodes; endpoint divergence decided by the composed
/// asymptotics.
pub fn integrate_fw(f: &GridFn, w: &Weight, wc: &WeightedCells, grid: &Grid) -> f64 {
    let w0 = w.asym(crate::asym::End::Zero);
    let wi = w.asym(crate::asym::End::Inf);
    if !head_converges(f.asym0.mul(w0)) || !tail_converges(f.asym_inf.mul(wi)) {
        return f64::INFINITY;
    }
    let n = f.vals.len();
    let mut acc = 0.0;
    for k in 0..n - 1 {
        acc += 0.5 * (f.vals[k] + f.vals[k + 1]) * wc.cells[k];
        if acc.is_infinite() {
            return f64::INFINITY;
        }
    }
    let _ = grid;
    // endpoint remainders: f is slowly varying there relative to the span
    acc + endpoint_term(f.vals[0], wc.head) + endpoint_term(f.vals[n - 1], wc.tail)
}

fn endpoint_term(f_val: f64, w_mass: f64) -> f64 {
    if w_mass.is_finite() {
        xmul(f_val, w_mass)
    } else {
        // the composed asymptotics converged, so f vanishes fast enough
        // that the unresolved endpoint mass is negligible
        0.0
    }
}

/// `t -> int_t^inf f w` with exact cell masses.
pub fn tail_cum_fw(f: &GridFn, w: &Weight, wc: &WeightedCells, grid: &Grid) -> GridFn {
    let w0 = w.asym(crate::asym::End::Zero);
    let wi = w.asym(crate::asym::End::Inf);
    let (a0, ai) = tail_integral_asym(f.asym0.mul(w0), f.asym_inf.mul(wi));
    let n = f.vals.len();
    if ai == Asym::Infinite {
        return GridFn {
            vals: vec![f64::INFINITY; n],
            asym0: a0,
            asym_inf: ai,
        };
    }
    let mut vals = vec![0.0; n];
    let mut acc = endpoint_term(f.vals[n - 1], wc.tail);
    vals[n - 1] = acc;
    for k in (0..n - 1).rev() {
        acc += 0.5 * (f.vals[k] + f.vals[k + 1]) * wc.cells[k];
        vals[k] = acc;
    }
    let _ = grid;
    GridFn {
        vals,
        asym0: a0,
        asym_inf: ai,
    }
}

/// One pass of the monotone-stack sweep: returns, for every node `j`,
/// `S(j) = int_{x_{i0}}^{x_j} ( sup_{tau in [x, x_j]} u(tau) ) w(x) dx`,
/// where the inner supremum is the running max of `u` over grid nodes and
/// the integral uses trapezoid cell masses of `w`. Amortized O(n).
pub fn winsup_integral_from(u: &[f64], w_mass: &[f64], i0: usize) -> Vec<f64> {
    let n = u.len();
    debug_assert_eq!(w_mass.len(), n - 1);
    let mut out = vec![0.0; n];
    if i0 >= n - 1 {
        return out;
    }
    // stack of (sup value over the segment, accumulated w-mass)
    let mut stack: Vec<(f64, f64)> = Vec::new();
    let mut total = 0.0f64;
    for j in (i0 + 1)..n {
        // new cell [x_{j-1}, x_j]: its window sup starts at max(u_{j-1}, u_j)
        let val = u[j - 1].max(u[j]);
        debug_assert!(val.is_finite(), "sweeper needs finite samples");
        let mut mass = w_mass[j - 1];
        // raising the right endpoint lifts every segment whose sup is below
        while let Some(&(top_val, top_mass)) = stack.last() {
            if top_val < val {
                stack.pop();
                total -= xmul(top_val, top_mass);
                mass += top_mass;
            } else {
                break;
            }
        }
        total += xmul(val, mass);
        stack.push((val, mass));
        // merging cannot create out-of-order stack entries
        debug_assert!(stack.windows(2).all(|s| s[0].0 >= s[1].0));
        if total < 0.0 {
            total = 0.0;
        }
        out[j] = total;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xreal::rel_err;

    fn grid() -> Grid {
        Grid::new(1e-4, 1e4, 600).unwrap()
    }

    #[test]
    fn head_int_matches_primitive() {
        let g = grid();
        let w = Weight::power(1.0, 1.0);
        let f = GridFn::from_weight(&w, &g);
        let h = f.head_int(&g);
        // int_0^t s ds = t^2/2
        let i = 400;
        let t = g.points()[i];
        assert!(rel_err(h.vals[i], t * t / 2.0) < 1e-3);
    }

    #[test]
    fn divergent_head_is_flagged() {
        let g = grid();
        let f = GridFn::from_weight(&Weight::power(1.0, -1.0), &g);
        let h = f.head_int(&g);
        assert!(h.vals[10].is_infinite());
    }

    #[test]
    fn tail_int_exactish() {
        let g = grid();
        let f = GridFn::from_weight(&Weight::power(1.0, -2.0), &g);
        let t = f.tail_int(&g);
        let i = 300;
        let x = g.points()[i];
        assert!(
            rel_err(t.vals[i], 1.0 / x) < 1e-3,
            "{} vs {}",
            t.vals[i],
            1.0 / x
        );
    }

    #[test]
    fn revsup_of_unimodal() {
        // 801 nodes over 8 decades puts t = 1 on the lattice
        let g = Grid::new(1e-4, 1e4, 801).unwrap();
        // min(t, 1/t): rises then falls; revsup from the left is the peak
        let f = GridFn::sample(
            |t| t.min(1.0 / t),
            &g,
            Asym::powlog(1.0, 0.0),
            Asym::powlog(-1.0, 0.0),
        );
        let r = f.revsup();
        assert!((r.vals[0] - 1.0).abs() < 1e-12);
        let i = 700;
        assert!(rel_err(r.vals[i], f.vals[i]) < 1e-12);
    }

    #[test]
    fn sup_augmented_by_asym() {
        let g = grid();
        // t^-1/6 stays modest on the grid but diverges at 0
        let f = GridFn::from_weight(&Weight::power(1.0, -1.0 / 6.0), &g);
        assert!(f.sup_all().is_infinite());
    }

    #[test]
    fn winsup_integral_against_naive() {
        let g = Grid::new(0.5, 50.0, 40).unwrap();
        let u: Vec<f64> = g
            .points()
            .iter()
            .map(|&t| (t - 3.0).abs().sin().abs() + 0.1)
            .collect();
        let w = GridFn::constant(1.0, &g);
        let masses = w.cell_masses(&g);
        let fast = winsup_integral_from(&u, &masses, 0);
        // naive O(n^2) reference
        for j in [5usize, 17, 39] {
            let mut naive = 0.0;
            for k in 0..j {
                let sup = u[k..=j].iter().copied().fold(0.0, f64::max);
                naive += sup * masses[k];
            }
            assert!(
                rel_err(fast[j], naive) < 1e-12,
                "j={j}: {} vs {naive}",
                fast[j]
            );
        }
    }
}
