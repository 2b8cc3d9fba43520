//! Small tour of the library: evaluate a restricted-inequality constant,
//! cross-check it against brute-force search, and run the maximal-operator
//! norm through both evaluation paths.

use lorentz_hardy::characterize::{
    k_restricted, maximal_norm, MaximalSpec, MnormPath, RestrictedSpec, UProfile,
};
use lorentz_hardy::norms::Params;
use lorentz_hardy::stepfn::Grid;
use lorentz_hardy::verify::{brute_force_k, equivalence_report, WINDOW_K};
use lorentz_hardy::weights::Weight;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::with_points(1025);

    // sup-capped numerator, unit inner weight, admissible v, decaying w
    let u = Weight::new(&[(0.0, 1.0, 0.0, 0.0), (1.0, 1.0, -1.0, 0.0)])?;
    let v = Weight::new(&[(0.0, 1.0, -1.0, 0.0), (1.0, 1.0, -1.5, 0.0)])?;
    let w = Weight::new(&[(0.0, 1.0, 0.5, 0.0), (1.0, 1.0, -2.0, 0.0)])?;

    let spec = RestrictedSpec::new(
        Params::new(2.0, 1.5, 3.0)?,
        UProfile::Weight(u),
        Weight::one(),
        v.clone(),
        w.clone(),
        &grid,
    )?;
    let report = k_restricted(&spec, &grid)?;
    println!("K [{}] = {:.6}", report.regime, report.value);
    for (name, value) in &report.terms {
        println!("  {name} = {value:.6}");
    }

    let oracle = brute_force_k(&spec, 2000, 2, 7, &grid);
    let eq = equivalence_report(report.value, oracle.oracle_lower_bound, WINDOW_K);
    println!(
        "oracle lower bound = {:.6} (formula/oracle = {:.3}, pass = {})",
        oracle.oracle_lower_bound, eq.formula_over_oracle, eq.pass
    );

    // maximal operator of order 2 with a two-piece normalization
    let phi = Weight::new(&[(0.0, 1.0, 0.3, 0.0), (1.0, 1.0, 0.5, 0.0)])?;
    let mspec = MaximalSpec::new(
        Params::with_maximal(4.0, 3.0, 6.0, 2.0, 2.0)?,
        Weight::one(),
        phi,
        v,
        w,
    )?;
    let direct = maximal_norm(&mspec, MnormPath::Direct, &grid)?;
    let reduced = maximal_norm(&mspec, MnormPath::Reduced, &grid)?;
    println!(
        "maximal norm [{}]: direct = {:.9}, reduced = {:.9}",
        direct.regime, direct.value, reduced.value
    );
    Ok(())
}
