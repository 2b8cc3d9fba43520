//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured quantities. Tolerances and windows are pinned here.

use lorentz_hardy::characterize::{
    classify, k_restricted, maximal_norm, MaximalSpec, MnormPath, RestrictedSpec, UProfile,
};
use lorentz_hardy::constants::{
    copson_constant, gks_constant, hardy_constant, krepick_constant, supop_d, supop_e,
    ConstantReport,
};
use lorentz_hardy::error::Error;
use lorentz_hardy::norms::{associate_ggamma_norm, Params};
use lorentz_hardy::operators::{ibp_pair, transfer_monotone, TransferMode};
use lorentz_hardy::stepfn::{rearrange, Density, Grid, StepFn};
use lorentz_hardy::verify::{
    brute_force_background, brute_force_k, equivalence_report, BackgroundProblem, WINDOW_K,
};
use lorentz_hardy::weights::Weight;
use lorentz_hardy::xreal::rel_err;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_piece(c0: f64, a0: f64, b0: f64, cut: f64, c1: f64, a1: f64, b1: f64) -> Weight {
    Weight::new(&[(0.0, c0, a0, b0), (cut, c1, a1, b1)]).unwrap()
}

fn w_light() -> Weight {
    two_piece(1.0, 0.0, 0.0, 1.0, 1.0, -2.0, 0.0)
}

fn w_bumped() -> Weight {
    two_piece(1.0, 0.5, 0.0, 1.0, 1.0, -2.0, 0.0)
}

fn u_capped() -> Weight {
    two_piece(1.0, 0.0, 0.0, 1.0, 1.0, -1.0, 0.0)
}

/// One admissible power-weight configuration per covered regime, validated
/// to give finite constants on the default range.
fn regime_configs() -> Vec<(&'static str, f64, f64, f64, Weight, Weight)> {
    vec![
        (
            "thm3.2",
            0.5,
            0.5,
            2.0,
            two_piece(1.0, -1.75, 0.0, 1.0, 1.0, -1.5, 0.0),
            w_light(),
        ),
        (
            "thm3.3i",
            2.0,
            0.5,
            3.0,
            two_piece(1.0, -1.0, 0.0, 1.0, 1.0, -1.125, 0.0),
            w_bumped(),
        ),
        (
            "thm3.3ii",
            3.0,
            0.8,
            2.0,
            two_piece(1.0, -1.0, 0.0, 1.0, 1.0, -1.13, 0.0),
            w_bumped(),
        ),
        (
            "thm3.4i",
            0.5,
            2.0,
            3.0,
            two_piece(1.0, -4.5, 0.0, 1.0, 1.0, -1.5, 0.0),
            w_light(),
        ),
        (
            "thm3.4ii",
            0.5,
            3.0,
            2.0,
            two_piece(1.0, -6.0, 0.0, 1.0, 1.0, -1.5, 0.0),
            w_light(),
        ),
        (
            "thm3.5i",
            2.0,
            1.5,
            3.0,
            two_piece(1.0, -1.0, 0.0, 1.0, 1.0, -1.5, 0.0),
            w_bumped(),
        ),
        (
            "thm3.5ii",
            2.5,
            1.6,
            2.0,
            Weight::power(1.0, -1.14),
            w_bumped(),
        ),
    ]
}

fn restricted(p: f64, m: f64, q: f64, v: &Weight, w: &Weight, grid: &Grid) -> RestrictedSpec {
    RestrictedSpec::new(
        Params::new(p, m, q).unwrap(),
        UProfile::Weight(u_capped()),
        Weight::one(),
        v.clone(),
        w.clone(),
        grid,
    )
    .unwrap()
}

#[test]
fn criterion_1_sinnamon_transfer() {
    let start = std::time::Instant::now();
    let lattice: Vec<f64> = {
        let g = Grid::new(1e-3, 1e3, 400).unwrap();
        g.points().to_vec()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let k = rng.gen_range(1..5usize);
        let mut breaks: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05f64..50.0)).collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
        let values: Vec<f64> = (0..breaks.len())
            .map(|_| rng.gen_range(0.0f64..5.0))
            .collect();
        let f = Density::new(breaks, values).unwrap();
        let w = two_piece(
            rng.gen_range(0.1..3.0),
            rng.gen_range(-0.8..1.5),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(0.3..3.0),
            rng.gen_range(0.1..3.0),
            rng.gen_range(-2.0..0.0),
            rng.gen_range(-1.0..1.0),
        );
        let rhs = transfer_monotone(&f, &w, TransferMode::RhsFormula, &lattice);
        let lhs = transfer_monotone(&f, &w, TransferMode::LhsOracle, &lattice);
        if rhs > 0.0 || lhs > 0.0 {
            worst = worst.max(rel_err(lhs, rhs));
        }
    }
    let elapsed = start.elapsed();
    assert!(worst <= 0.01, "worst relative gap {worst}");
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "criterion 1 (sinnamon transfer): PASS worst rel {worst:.3e} in {:.2}s",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_2_integration_by_parts() {
    // the analytic case first
    let f = StepFn::indicator(1.0, 1.0);
    let (a1, a2) = ibp_pair(&Weight::one(), &f, 1.0).unwrap();
    assert!(
        rel_err(a1, 0.5) < 1e-9 && rel_err(a2, 1.0) < 1e-12,
        "a1={a1} a2={a2}"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = 0.0f64;
    for alpha in [0.5, 1.0, 2.0] {
        for _ in 0..30 {
            let g = two_piece(
                rng.gen_range(0.2..3.0),
                rng.gen_range(-0.8..1.5),
                0.0,
                rng.gen_range(0.4..4.0),
                rng.gen_range(0.2..3.0),
                rng.gen_range(-0.8..0.5),
                0.0,
            );
            let pieces: Vec<(f64, f64)> = (0..rng.gen_range(1..5usize))
                .map(|_| (rng.gen_range(0.05f64..3.0), rng.gen_range(0.01f64..4.0)))
                .collect();
            let f = rearrange(&pieces);
            let (a1, a2) = ibp_pair(&g, &f, alpha).unwrap();
            worst = worst.max(rel_err(a2, (alpha + 1.0) * a1));
        }
    }
    assert!(worst < 1e-6, "worst rel {worst}");
    println!("criterion 2 (integration by parts): PASS worst rel {worst:.3e}");
}

#[test]
fn criterion_3_hardy_copson_windows() {
    let start = std::time::Instant::now();
    let grid = Grid::with_points(1025);
    let oracle_grid = Grid::with_points(513);

    // the classical pinned case: formula exactly 1, oracle approaching 2
    let classical =
        hardy_constant(2.0, 2.0, &Weight::one(), &Weight::power(1.0, -2.0), &grid).unwrap();
    assert!(
        (classical.value - 1.0).abs() <= 1e-9,
        "classical formula {}",
        classical.value
    );
    let classical_problem = BackgroundProblem::Hardy {
        p: 2.0,
        q: 2.0,
        v: Weight::one(),
        w: Weight::power(1.0, -2.0),
    };
    let classical_oracle = brute_force_background(&classical_problem, 300, 2, 7, &oracle_grid);
    assert!(
        classical_oracle.oracle_lower_bound >= 1.9,
        "classical oracle {}",
        classical_oracle.oracle_lower_bound
    );

    // four weight pairs per exponent pair, for each operator
    let mut lines = Vec::new();
    for &(p, q) in &[(2.0, 2.0), (1.5, 3.0), (3.0, 1.5), (2.0, 1.2)] {
        let pc = p / (p - 1.0);
        let hardy_pairs: Vec<(Weight, Weight)> = if p <= q {
            let av = 0.3;
            let aw3 = -1.0 - q * (av * (1.0 - pc) + 1.0) / pc;
            vec![
                (Weight::one(), Weight::power(1.0, -2.0)),
                (Weight::one(), w_light()),
                (
                    Weight::power(1.0, av),
                    two_piece(1.0, 0.0, 0.0, 1.0, 1.0, aw3, 0.0),
                ),
                (
                    Weight::one(),
                    Weight::new(&[(0.0, 1.0, -2.0, -0.5)]).unwrap(),
                ),
            ]
        } else {
            vec![
                (Weight::one(), Weight::indicator(1.0)),
                (Weight::one(), two_piece(1.0, 0.5, 0.0, 1.0, 0.0, 0.0, 0.0)),
                (Weight::power(1.0, 0.4), Weight::indicator(1.0)),
                (Weight::one(), two_piece(1.0, 0.0, 0.0, 1.0, 1.0, -3.0, 0.0)),
            ]
        };
        for (i, (v, w)) in hardy_pairs.iter().enumerate() {
            let rep = hardy_constant(p, q, v, w, &grid).unwrap();
            let problem = BackgroundProblem::Hardy {
                p,
                q,
                v: v.clone(),
                w: w.clone(),
            };
            let oracle = brute_force_background(&problem, 260, 2, 11, &oracle_grid);
            let ratio = rep.value / oracle.oracle_lower_bound;
            assert!(
                rep.value.is_finite() && (0.25..=4.0).contains(&ratio),
                "hardy p={p} q={q} pair {i}: formula {} oracle {} ratio {ratio}",
                rep.value,
                oracle.oracle_lower_bound
            );
            lines.push(format!("hardy({p},{q})#{i} ratio {ratio:.3}"));
        }

        let copson_pairs: Vec<(Weight, Weight)> = if p <= q {
            // balance (int_0^x w)^{1/q} (int_x^inf v^{1-p'})^{1/p'}
            let av = (1.0 + pc) / pc; // v^{1-p'} decays just past -1
            let aw = q * (av * (pc - 1.0) - 1.0) / pc - 1.0;
            vec![
                (Weight::power(1.0, 2.0 / (pc - 1.0)), Weight::one()),
                (Weight::power(1.0, av), Weight::power(1.0, aw)),
                (
                    Weight::power(1.0, av),
                    two_piece(1.0, aw, 0.0, 1.0, 1.0, aw - 0.5, 0.0),
                ),
                (
                    Weight::power(1.0, av + 0.2),
                    Weight::power(1.0, aw + 0.2 * q / p),
                ),
            ]
        } else {
            // v^{1-p'} must be tail-integrable: exponent above p - 1
            vec![
                (
                    Weight::power(1.0, p),
                    two_piece(0.0, 0.0, 0.0, 1.0, 1.0, -2.0, 0.0),
                ),
                (Weight::power(1.0, p), Weight::window(1.0, 10.0)),
                (
                    Weight::power(1.0, p + 0.5),
                    two_piece(0.0, 0.0, 0.0, 1.0, 1.0, -2.0, 0.0),
                ),
                (
                    Weight::power(1.0, p),
                    two_piece(1.0, 0.5, 0.0, 1.0, 1.0, -2.5, 0.0),
                ),
            ]
        };
        for (i, (v, w)) in copson_pairs.iter().enumerate() {
            let rep = copson_constant(p, q, v, w, &grid).unwrap();
            let problem = BackgroundProblem::Copson {
                p,
                q,
                v: v.clone(),
                w: w.clone(),
            };
            let oracle = brute_force_background(&problem, 260, 2, 13, &oracle_grid);
            let ratio = rep.value / oracle.oracle_lower_bound;
            assert!(
                rep.value.is_finite() && (0.25..=4.0).contains(&ratio),
                "copson p={p} q={q} pair {i}: formula {} oracle {} ratio {ratio}",
                rep.value,
                oracle.oracle_lower_bound
            );
            lines.push(format!("copson({p},{q})#{i} ratio {ratio:.3}"));
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "criterion 3 (hardy/copson windows): PASS classical oracle {:.4}, {} pairs in {:.1}s [{}]",
        classical_oracle.oracle_lower_bound,
        lines.len(),
        elapsed.as_secs_f64(),
        lines.join(", ")
    );
}

#[test]
fn criterion_4_restricted_equivalence() {
    let start = std::time::Instant::now();
    let grid = Grid::with_points(1025);
    let mut lines = Vec::new();
    for (name, p, m, q, v, w) in regime_configs() {
        let spec = restricted(p, m, q, &v, &w, &grid);
        let rep = k_restricted(&spec, &grid).unwrap();
        let oracle = brute_force_k(&spec, 2400, 2, 17, &grid);
        let eq = equivalence_report(rep.value, oracle.oracle_lower_bound, WINDOW_K);
        assert!(
            eq.pass,
            "{name}: formula {} oracle {} (f/o {:.3}, o/f {:.3})",
            rep.value, oracle.oracle_lower_bound, eq.formula_over_oracle, eq.oracle_over_formula
        );
        assert_eq!(rep.regime, name);
        lines.push(format!("{name} f/o {:.3}", eq.formula_over_oracle));
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "criterion 4 (restricted equivalence): PASS in {:.1}s [{}]",
        elapsed.as_secs_f64(),
        lines.join(", ")
    );
}

#[test]
fn criterion_5_closed_loop_associate() {
    let grid = Grid::with_points(513);
    let window = 8.0;
    let mut lines = Vec::new();
    for &(p, m) in &[(0.5f64, 0.5f64), (2.0, 0.5), (0.5, 2.0), (2.0, 3.0)] {
        let q = 2.0;
        let v = if p <= 1.0 {
            two_piece(
                1.0,
                -1.0 - m / p + 0.5 * m,
                0.0,
                1.0,
                1.0,
                -1.0 - 0.5 * (m / p).min(1.0),
                0.0,
            )
        } else {
            lorentz_hardy::weights::member_weight(m, p)
        };
        let w = w_light();
        // u = B for b = 1
        let spec = RestrictedSpec::new(
            Params::new(p, m, q).unwrap(),
            UProfile::Weight(Weight::power(1.0, 1.0)),
            Weight::one(),
            v.clone(),
            w.clone(),
            &grid,
        )
        .unwrap();
        let oracle = brute_force_k(&spec, 1500, 2, 5, &grid);
        let closed = w.primitive(0.0, f64::INFINITY).unwrap().powf(1.0 / q)
            * associate_ggamma_norm(&StepFn::indicator(grid.t_max, 1.0), p, m, &v, &grid).unwrap();
        let eq = equivalence_report(closed, oracle.oracle_lower_bound, window);
        assert!(
            eq.pass,
            "closed loop (p={p}, m={m}): assoc-side {closed} oracle {}",
            oracle.oracle_lower_bound
        );
        lines.push(format!(
            "(p={p},m={m}) ratio {:.3}",
            closed / oracle.oracle_lower_bound
        ));
    }
    println!(
        "criterion 5 (closed loop, four regimes): PASS [{}]",
        lines.join(", ")
    );
}

#[test]
fn criterion_6_reduction_identity() {
    let start = std::time::Instant::now();
    let grid = Grid::with_points(513);
    let bases = regime_configs();
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let mut worst = 0.0f64;
    let mut count = 0;
    while count < 50 {
        let (_, ph, mh, qh, v, w) = bases[count % bases.len()].clone();
        let alpha = rng.gen_range(1.2..2.6);
        let heavy_b = rng.gen_bool(0.5);
        let (b, lam2, r) = if heavy_b {
            (Weight::power(1.0, -0.3), 0.7 / alpha, alpha / 0.7)
        } else {
            (Weight::one(), 1.0 / alpha, alpha)
        };
        let lam1 = rng.gen_range(0.05..0.9 * lam2);
        let c = rng.gen_range(0.5..2.0);
        let phi = two_piece(c, lam1, 0.0, 1.0, c, lam2, 0.0);
        let params = Params::with_maximal(ph * alpha, mh * alpha, qh * alpha, alpha, r).unwrap();
        let vs = v.scale(rng.gen_range(0.5..2.0));
        let ws = w.scale(rng.gen_range(0.5..2.0));
        let spec = MaximalSpec::new(params, b, phi, vs, ws).unwrap();
        let direct = maximal_norm(&spec, MnormPath::Direct, &grid).unwrap();
        let reduced = maximal_norm(&spec, MnormPath::Reduced, &grid).unwrap();
        let err = rel_err(direct.value, reduced.value);
        assert!(
            err <= 1e-9,
            "spec {count}: direct {} vs reduced {} (rel {err:.3e})",
            direct.value,
            reduced.value
        );
        // the Both path enforces the same agreement internally
        maximal_norm(&spec, MnormPath::Both, &grid).unwrap();
        worst = worst.max(err);
        count += 1;
    }
    println!(
        "criterion 6 (reduction identity, 50 specs): PASS worst rel {worst:.3e} in {:.1}s",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_7_regime_dispatch() {
    let mut covered = 0usize;
    let mut refused = 0usize;
    for i in 0..10 {
        for j in 0..10 {
            for k in 0..10 {
                let p = 0.4 * 1.35f64.powi(i);
                let m = 0.4 * 1.35f64.powi(j);
                let q = 0.4 * 1.35f64.powi(k);
                match classify(p, m, q) {
                    Ok(_) => covered += 1,
                    Err(Error::Regime(_)) | Err(Error::UncoveredRegion(_)) => refused += 1,
                    Err(other) => panic!("unexpected error {other:?} at ({p},{m},{q})"),
                }
            }
        }
    }
    assert_eq!(covered + refused, 1000);
    // the two named holes
    assert!(matches!(
        classify(2.0, 3.0, 2.5),
        Err(Error::UncoveredRegion(_))
    ));
    assert!(matches!(
        classify(2.0, 2.0, 1.5),
        Err(Error::UncoveredRegion(_))
    ));
    println!(
        "criterion 7 (dispatch totality): PASS covered {covered} refused {refused} on 1000 lattice points"
    );
}

#[test]
fn criterion_8_homogeneity_laws() {
    let grid = Grid::with_points(513);
    let scales = [1.0 / 3.0, 7.0];
    let mut worst = 0.0f64;

    let check = |label: &str,
                 base: &ConstantReport,
                 scaled: &ConstantReport,
                 factor: f64,
                 worst: &mut f64| {
        if base.value == 0.0 || base.value.is_infinite() {
            return;
        }
        let err = rel_err(scaled.value, factor * base.value);
        assert!(
            err <= 1e-9,
            "{label}: {} vs {} * {}",
            scaled.value,
            factor,
            base.value
        );
        *worst = worst.max(err);
    };

    // Hardy / Copson: w -> lam w scales by lam^{1/q}; v -> mu v by mu^{-1/p}
    for &(p, q) in &[(1.5f64, 3.0f64), (3.0, 1.5)] {
        let (v, w) = if p <= q {
            (Weight::one(), Weight::power(1.0, -2.0))
        } else {
            (Weight::one(), Weight::indicator(1.0))
        };
        let base = hardy_constant(p, q, &v, &w, &grid).unwrap();
        for &s in &scales {
            let sw = hardy_constant(p, q, &v, &w.scale(s), &grid).unwrap();
            check("hardy w", &base, &sw, s.powf(1.0 / q), &mut worst);
            let sv = hardy_constant(p, q, &v.scale(s), &w, &grid).unwrap();
            check("hardy v", &base, &sv, s.powf(-1.0 / p), &mut worst);
        }
        let (cv, cw) = (Weight::power(1.0, 2.0), Weight::window(1.0, 10.0));
        let base = copson_constant(p, q, &cv, &cw, &grid).unwrap();
        for &s in &scales {
            let sw = copson_constant(p, q, &cv, &cw.scale(s), &grid).unwrap();
            check("copson w", &base, &sw, s.powf(1.0 / q), &mut worst);
            let sv = copson_constant(p, q, &cv.scale(s), &cw, &grid).unwrap();
            check("copson v", &base, &sv, s.powf(-1.0 / p), &mut worst);
        }
    }

    // supremal pairs: linear in w (their outer exponent is 1), mu^{-1/p} in v
    let u = u_capped();
    let base = supop_d(2.5, 0.0, &u, &Weight::one(), &Weight::indicator(1.0), &grid).unwrap();
    for &s in &scales {
        let sw = supop_d(
            2.5,
            0.0,
            &u,
            &Weight::one(),
            &Weight::indicator(1.0).scale(s),
            &grid,
        )
        .unwrap();
        check("supD w", &base, &sw, s, &mut worst);
        let sv = supop_d(
            2.5,
            0.0,
            &u,
            &Weight::constant(s),
            &Weight::indicator(1.0),
            &grid,
        )
        .unwrap();
        check("supD v", &base, &sv, s.powf(-1.0 / 2.5), &mut worst);
    }
    let base = supop_e(
        2.5,
        0.0,
        &Weight::one(),
        &Weight::power(1.0, 2.0),
        &Weight::indicator(1.0),
        &grid,
    )
    .unwrap();
    for &s in &scales {
        let sw = supop_e(
            2.5,
            0.0,
            &Weight::one(),
            &Weight::power(1.0, 2.0),
            &Weight::indicator(1.0).scale(s),
            &grid,
        )
        .unwrap();
        check("supE w", &base, &sw, s, &mut worst);
        let sv = supop_e(
            2.5,
            0.0,
            &Weight::one(),
            &Weight::power(s, 2.0),
            &Weight::indicator(1.0),
            &grid,
        )
        .unwrap();
        check("supE v", &base, &sv, s.powf(-1.0 / 2.5), &mut worst);
    }

    // iterated families: lam^{1/q} in w, mu^{-1/p} in v
    let (p, m, q) = (2.0, 2.0, 3.0);
    let u = Weight::power(1.0, -3.0);
    let base = gks_constant(p, m, q, &u, &Weight::one(), &Weight::one(), &grid).unwrap();
    for &s in &scales {
        let sw = gks_constant(p, m, q, &u, &Weight::one(), &Weight::constant(s), &grid).unwrap();
        check("gks w", &base, &sw, s.powf(1.0 / q), &mut worst);
        let sv = gks_constant(p, m, q, &u, &Weight::constant(s), &Weight::one(), &grid).unwrap();
        check("gks v", &base, &sv, s.powf(-1.0 / p), &mut worst);
    }
    let kv = Weight::power(1.0, 3.0);
    let kw = Weight::power(1.0, 0.5);
    let base = krepick_constant(2.0, 2.0, 3.0, &Weight::one(), &kv, &kw, &grid).unwrap();
    for &s in &scales {
        let sw = krepick_constant(2.0, 2.0, 3.0, &Weight::one(), &kv, &kw.scale(s), &grid).unwrap();
        check("krepick w", &base, &sw, s.powf(1.0 / 3.0), &mut worst);
        let sv = krepick_constant(2.0, 2.0, 3.0, &Weight::one(), &kv.scale(s), &kw, &grid).unwrap();
        check("krepick v", &base, &sv, s.powf(-1.0 / 2.0), &mut worst);
    }

    // restricted constants: lam^{1/q} in w, mu^{-1/m} in v
    for (name, p, m, q, v, w) in regime_configs() {
        let base = k_restricted(&restricted(p, m, q, &v, &w, &grid), &grid).unwrap();
        for &s in &scales {
            let sw = k_restricted(&restricted(p, m, q, &v, &w.scale(s), &grid), &grid).unwrap();
            check(
                &format!("{name} w"),
                &base,
                &sw,
                s.powf(1.0 / q),
                &mut worst,
            );
            let sv = k_restricted(&restricted(p, m, q, &v.scale(s), &w, &grid), &grid).unwrap();
            check(
                &format!("{name} v"),
                &base,
                &sv,
                s.powf(-1.0 / m),
                &mut worst,
            );
        }
    }

    // maximal-operator norm inherits the same laws in the unhatted exponents
    let (_, ph, mh, qh, v, w) = regime_configs()[5].clone();
    let alpha = 2.0;
    let mk = |v: Weight, w: Weight| {
        let params =
            Params::with_maximal(ph * alpha, mh * alpha, qh * alpha, alpha, alpha).unwrap();
        let phi = two_piece(1.0, 0.3, 0.0, 1.0, 1.0, 1.0 / alpha, 0.0);
        MaximalSpec::new(params, Weight::one(), phi, v, w).unwrap()
    };
    let base = maximal_norm(&mk(v.clone(), w.clone()), MnormPath::Both, &grid).unwrap();
    let (bp, bm, bq) = (ph * alpha, mh * alpha, qh * alpha);
    let _ = bp;
    for &s in &scales {
        let sw = maximal_norm(&mk(v.clone(), w.scale(s)), MnormPath::Both, &grid).unwrap();
        check("mnorm w", &base, &sw, s.powf(1.0 / bq), &mut worst);
        let sv = maximal_norm(&mk(v.scale(s), w.clone()), MnormPath::Both, &grid).unwrap();
        check("mnorm v", &base, &sv, s.powf(-1.0 / bm), &mut worst);
    }

    println!("criterion 8 (homogeneity laws): PASS worst rel {worst:.3e}");
}

#[test]
fn criterion_9_grid_stability() {
    let start = std::time::Instant::now();
    let coarse = Grid::with_points(1025);
    let fine = Grid::with_points(2049); // doubled interval count
    let mut worst = 0.0f64;
    for (name, p, m, q, v, w) in regime_configs() {
        let kc = k_restricted(&restricted(p, m, q, &v, &w, &coarse), &coarse).unwrap();
        let kf = k_restricted(&restricted(p, m, q, &v, &w, &fine), &fine).unwrap();
        let err = rel_err(kc.value, kf.value);
        assert!(
            kc.value.is_finite() && err < 0.02,
            "{name}: {} vs {} (rel {err:.3e})",
            kc.value,
            kf.value
        );
        worst = worst.max(err);
    }
    for &(p, q) in &[(2.0f64, 2.0f64), (1.5, 3.0), (3.0, 1.5), (2.0, 1.2)] {
        let (v, w) = if p <= q {
            (Weight::one(), Weight::power(1.0, -2.0))
        } else {
            (Weight::one(), Weight::indicator(1.0))
        };
        let hc = hardy_constant(p, q, &v, &w, &coarse).unwrap();
        let hf = hardy_constant(p, q, &v, &w, &fine).unwrap();
        let err = rel_err(hc.value, hf.value);
        assert!(err < 0.02, "hardy({p},{q}): rel {err:.3e}");
        worst = worst.max(err);
    }
    println!(
        "criterion 9 (grid stability): PASS worst rel {worst:.3e} in {:.1}s",
        start.elapsed().as_secs_f64()
    );
}
