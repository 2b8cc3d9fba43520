//! Non-increasing step functions on `(0, inf)`: the discretized cone of
//! rearrangements.
//!
//! A [`StepFn`] is the canonical representative of a non-increasing
//! rearrangement: right-continuous, non-negative, non-increasing, finitely
//! supported. Products against [`Weight`]s integrate exactly piece by piece.

use crate::error::{Error, Result};
use crate::weights::Weight;
use crate::xreal::xmul;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Logarithmically spaced evaluation lattice with explicit cutoffs; the
/// shared discretization for all integrals and suprema.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub t_min: f64,
    pub t_max: f64,
    points: Vec<f64>,
}

/// Default dynamic range and resolution used throughout. The node count is
/// odd so that `t = 1` lands exactly on the lattice (2048 intervals).
pub const DEFAULT_T_MIN: f64 = 1e-8;
pub const DEFAULT_T_MAX: f64 = 1e8;
pub const DEFAULT_POINTS: usize = 2049;

impl Grid {
    pub fn new(t_min: f64, t_max: f64, n_points: usize) -> Result<Grid> {
        if !(t_min > 0.0 && t_max > t_min) {
            return Err(Error::Domain(format!(
                "grid needs 0 < t_min < t_max, got [{t_min}, {t_max}]"
            )));
        }
        if n_points < 2 {
            return Err(Error::Domain("grid needs at least 2 points".into()));
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        let mut points: Vec<f64> = (0..n_points)
            .map(|i| (a + (b - a) * i as f64 / (n_points - 1) as f64).exp())
            .collect();
        points[0] = t_min;
        points[n_points - 1] = t_max;
        Ok(Grid {
            t_min,
            t_max,
            points,
        })
    }

    pub fn default_grid() -> Grid {
        Grid::new(DEFAULT_T_MIN, DEFAULT_T_MAX, DEFAULT_POINTS).expect("default grid")
    }

    pub fn with_points(n: usize) -> Grid {
        Grid::new(DEFAULT_T_MIN, DEFAULT_T_MAX, n).expect("grid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Descriptor for reports.
    pub fn descriptor(&self) -> GridSpec {
        GridSpec {
            t_min: self.t_min,
            t_max: self.t_max,
            n_points: self.points.len(),
        }
    }
}

/// Serializable grid descriptor carried by reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub n_points: usize,
}

/// Non-increasing right-continuous step function of finite support: value
/// `values[i]` on `(breaks[i-1], breaks[i]]` (with `breaks[-1] = 0`), zero
/// beyond the last breakpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFn {
    breaks: Vec<f64>,
    values: Vec<f64>,
}

impl StepFn {
    /// Build and canonicalize (merge equal adjacent values, drop trailing
    /// zeros). Values must be non-increasing and non-negative.
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<StepFn> {
        if breaks.len() != values.len() {
            return Err(Error::Domain(
                "breaks and values must have equal length".into(),
            ));
        }
        let mut prev_b = 0.0;
        let mut prev_v = f64::INFINITY;
        for (&b, &v) in breaks.iter().zip(&values) {
            if !(b > prev_b) || !b.is_finite() {
                return Err(Error::Domain(format!(
                    "breakpoints must increase strictly, got {b}"
                )));
            }
            if !(v >= 0.0) || !v.is_finite() || v > prev_v {
                return Err(Error::Domain(format!(
                    "values must be non-increasing and >= 0, got {v}"
                )));
            }
            prev_b = b;
            prev_v = v;
        }
        let mut f = StepFn { breaks, values };
        f.canonicalize();
        Ok(f)
    }

    pub fn zero() -> StepFn {
        StepFn {
            breaks: Vec::new(),
            values: Vec::new(),
        }
    }

    /// `c` on `(0, t]`.
    pub fn indicator(t: f64, c: f64) -> StepFn {
        StepFn::new(vec![t], vec![c]).expect("indicator step")
    }

    fn canonicalize(&mut self) {
        while let Some(&last) = self.values.last() {
            if last == 0.0 {
                self.values.pop();
                self.breaks.pop();
            } else {
                break;
            }
        }
        let mut i = 0;
        while i + 1 < self.values.len() {
            if self.values[i] == self.values[i + 1] {
                self.values.remove(i + 1);
                self.breaks.remove(i);
            } else {
                i += 1;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_end(&self) -> f64 {
        self.breaks.last().copied().unwrap_or(0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.values.first().copied().unwrap_or(0.0);
        }
        match self.breaks.iter().position(|&b| t <= b) {
            Some(i) => self.values[i],
            None => 0.0,
        }
    }

    /// Measure of `{f > lambda}` (exact from the step structure).
    pub fn distribution(&self, lambda: f64) -> f64 {
        for (i, &v) in self.values.iter().enumerate() {
            if v > lambda {
                continue;
            }
            return if i == 0 { 0.0 } else { self.breaks[i - 1] };
        }
        self.support_end()
    }

    /// `int_0^t f` (piecewise linear, exact).
    pub fn cum_integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut lo = 0.0;
        for (&b, &v) in self.breaks.iter().zip(&self.values) {
            if t <= lo {
                break;
            }
            let hi = b.min(t);
            acc += v * (hi - lo);
            lo = b;
        }
        acc
    }

    /// `int_0^inf f`.
    pub fn total_integral(&self) -> f64 {
        self.cum_integral(f64::INFINITY)
    }

    /// The maximal rearrangement `f**(t) = (1/t) int_0^t f`.
    pub fn double_star(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        self.cum_integral(t) / t
    }

    /// `int_0^x (f)^p dtau` (exact: `f^p` is again a step function).
    pub fn pow_cum_integral(&self, p: f64, x: f64) -> f64 {
        let mut acc = 0.0;
        let mut lo = 0.0;
        for (&b, &v) in self.breaks.iter().zip(&self.values) {
            if x <= lo {
                break;
            }
            let hi = b.min(x);
            acc += v.powf(p) * (hi - lo);
            lo = b;
        }
        acc
    }

    /// `int_0^inf f(t)^p w(t) dt`, exact piece-by-piece against the weight's
    /// antiderivatives. Infinite when `w` carries infinite mass where `f` is
    /// positive.
    pub fn integral_pow_against(&self, p: f64, w: &Weight) -> f64 {
        let mut acc = 0.0;
        let mut lo = 0.0;
        for (&b, &v) in self.breaks.iter().zip(&self.values) {
            if v > 0.0 {
                let mass = w.primitive(lo, b).unwrap_or(f64::INFINITY);
                acc += xmul(v.powf(p), mass);
                if acc.is_infinite() {
                    return f64::INFINITY;
                }
            }
            lo = b;
        }
        acc
    }

    /// `int_0^inf f(t) w(t) dt`.
    pub fn integral_against(&self, w: &Weight) -> f64 {
        self.integral_pow_against(1.0, w)
    }

    /// Cumulative `int_0^{b_i} f` at each breakpoint, for `f**` piecework.
    pub fn cum_at_breaks(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut lo = 0.0;
        self.breaks
            .iter()
            .zip(&self.values)
            .map(|(&b, &v)| {
                acc += v * (b - lo);
                lo = b;
                acc
            })
            .collect()
    }

    /// View as `(measure, value)` pieces (for re-feeding into `rearrange`).
    pub fn to_pieces(&self) -> Vec<(f64, f64)> {
        let mut lo = 0.0;
        self.breaks
            .iter()
            .zip(&self.values)
            .map(|(&b, &v)| {
                let m = b - lo;
                lo = b;
                (m, v)
            })
            .collect()
    }
}

/// Non-increasing rearrangement of a finite list of `(measure, value)`
/// pieces: sort values descending, stack the measures.
pub fn rearrange(pieces: &[(f64, f64)]) -> StepFn {
    let mut sorted: Vec<(f64, f64)> = pieces
        .iter()
        .copied()
        .filter(|&(m, v)| m > 0.0 && v > 0.0)
        .collect();
    sorted.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite values"));
    let mut breaks = Vec::with_capacity(sorted.len());
    let mut values = Vec::with_capacity(sorted.len());
    let mut acc = 0.0;
    for (m, v) in sorted {
        acc += m;
        breaks.push(acc);
        values.push(v);
    }
    let mut f = StepFn { breaks, values };
    f.canonicalize();
    f
}

/// Random non-increasing step function with `k` breakpoints drawn from the
/// grid and values that are sorted exponentials of uniform draws.
/// Deterministic per seed.
pub fn sample_cone(rng_seed: u64, grid: &Grid, k: usize) -> StepFn {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    sample_cone_with(&mut rng, grid, k)
}

/// Same as [`sample_cone`] but drawing from a caller-owned generator.
pub fn sample_cone_with(rng: &mut ChaCha8Rng, grid: &Grid, k: usize) -> StepFn {
    let n = grid.len();
    let k = k.max(1).min(n);
    let mut idx: Vec<usize> = Vec::with_capacity(k);
    while idx.len() < k {
        let i = rng.gen_range(0..n);
        if !idx.contains(&i) {
            idx.push(i);
        }
    }
    idx.sort_unstable();
    let breaks: Vec<f64> = idx.iter().map(|&i| grid.points()[i]).collect();
    let mut values: Vec<f64> = (0..k).map(|_| rng.gen_range(-3.0..3.0f64).exp()).collect();
    values.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    StepFn::new(breaks, values).expect("cone sample satisfies the invariants")
}

/// A non-negative step density without monotonicity (test functions for the
/// inequalities that quantify over all of `M^+`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Density {
    pub breaks: Vec<f64>,
    pub values: Vec<f64>,
}

impl Density {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>) -> Result<Density> {
        if breaks.len() != values.len() {
            return Err(Error::Domain(
                "breaks and values must have equal length".into(),
            ));
        }
        let mut prev = 0.0;
        for (&b, &v) in breaks.iter().zip(&values) {
            if !(b > prev) || !(v >= 0.0) || !v.is_finite() {
                return Err(Error::Domain(
                    "density needs increasing breaks and finite values >= 0".into(),
                ));
            }
            prev = b;
        }
        Ok(Density { breaks, values })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.breaks.iter().position(|&b| t <= b) {
            Some(i) => self.values[i],
            None => 0.0,
        }
    }

    /// `int_0^t h`.
    pub fn cum_integral(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut lo = 0.0;
        for (&b, &v) in self.breaks.iter().zip(&self.values) {
            if t <= lo {
                break;
            }
            acc += v * (b.min(t) - lo);
            lo = b;
        }
        acc
    }

    /// `int_t^inf h`.
    pub fn tail_integral(&self, t: f64) -> f64 {
        self.cum_integral(f64::INFINITY) - self.cum_integral(t)
    }

    /// `int_0^inf h(t)^p w(t) dt`, exact piecewise.
    pub fn integral_pow_against(&self, p: f64, w: &Weight) -> f64 {
        let mut acc = 0.0;
        let mut lo = 0.0;
        for (&b, &v) in self.breaks.iter().zip(&self.values) {
            if v > 0.0 {
                let mass = w.primitive(lo, b).unwrap_or(f64::INFINITY);
                acc += xmul(v.powf(p), mass);
                if acc.is_infinite() {
                    return f64::INFINITY;
                }
            }
            lo = b;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rearrange_sorts() {
        let f = rearrange(&[(1.0, 2.0), (1.0, 5.0), (1.0, 1.0)]);
        assert_eq!(f.values(), &[5.0, 2.0, 1.0]);
        assert_eq!(f.breaks(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn rearrange_identity_on_monotone() {
        let f = rearrange(&[(2.0, 3.0)]);
        assert_eq!(f.values(), &[3.0]);
        assert_eq!(f.breaks(), &[2.0]);
    }

    #[test]
    fn rearrange_merges_equal_values() {
        let f = rearrange(&[(0.5, 1.0), (0.5, 1.0)]);
        assert_eq!(f.values(), &[1.0]);
        assert_eq!(f.breaks(), &[1.0]);
    }

    #[test]
    fn rearrange_idempotent() {
        let f = rearrange(&[(0.3, 4.0), (1.2, 0.7), (0.5, 2.0)]);
        let g = rearrange(&f.to_pieces());
        assert_eq!(f, g);
    }

    #[test]
    fn double_star_examples() {
        let f = StepFn::indicator(1.0, 1.0);
        assert_eq!(f.double_star(0.5), 1.0);
        assert!((f.double_star(4.0) - 0.25).abs() < 1e-15);
        assert_eq!(StepFn::zero().double_star(3.0), 0.0);
    }

    #[test]
    fn double_star_dominates_and_decreases() {
        let f = rearrange(&[(0.5, 3.0), (1.0, 1.0), (2.0, 0.25)]);
        let grid = Grid::new(1e-3, 1e3, 200).unwrap();
        let mut prev = f64::INFINITY;
        for &t in grid.points() {
            let ds = f.double_star(t);
            assert!(ds >= f.eval(t) - 1e-15);
            assert!(ds <= prev + 1e-12 * prev.max(1.0));
            prev = ds;
        }
    }

    #[test]
    fn sample_cone_deterministic_and_valid() {
        let grid = Grid::with_points(64);
        let a = sample_cone(7, &grid, 5);
        let b = sample_cone(7, &grid, 5);
        assert_eq!(a, b);
        for w in a.values().windows(2) {
            assert!(w[0] >= w[1]);
        }
        let single = sample_cone(0, &grid, 1);
        assert_eq!(single.values().len(), 1);
    }

    #[test]
    fn equimeasurability() {
        let pieces = [(0.7, 2.0), (0.4, 5.0), (1.1, 2.0), (0.2, 0.1)];
        let f = rearrange(&pieces);
        for &lam in &[0.0, 0.05, 0.1, 1.0, 1.99, 2.0, 3.0, 5.0, 7.0] {
            let direct: f64 = pieces
                .iter()
                .filter(|&&(_, v)| v > lam)
                .map(|&(m, _)| m)
                .sum();
            assert!(
                (f.distribution(lam) - direct).abs() < 1e-12,
                "lambda={lam}: {} vs {direct}",
                f.distribution(lam)
            );
        }
    }

    #[test]
    fn integral_against_weight_exact() {
        // int (chi_(0,4])^2 s ds = 8
        let f = StepFn::indicator(4.0, 1.0);
        let v = f.integral_pow_against(2.0, &Weight::power(1.0, 1.0));
        assert!((v - 8.0).abs() < 1e-12);
    }
}

#[cfg(test)]
mod concurrency_contract {
    /// Values are immutable after construction and evaluations are pure;
    /// the types must stay shareable across workers.
    #[test]
    fn core_types_are_send_sync() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<crate::weights::Weight>();
        assert_send_sync::<super::StepFn>();
        assert_send_sync::<super::Density>();
        assert_send_sync::<super::Grid>();
        assert_send_sync::<crate::gridfn::GridFn>();
        assert_send_sync::<crate::constants::DerivedWeights>();
        assert_send_sync::<crate::characterize::RestrictedSpec>();
        assert_send_sync::<crate::characterize::MaximalSpec>();
    }
}
