//! Closed forms against the numerically built reduced density matrix,
//! over a ladder of shrinking regions.
//!
//! ```bash
//! cargo run --release --example oracle_comparison
//! ```

use local_entanglement::entanglement::MeasurementRegion;
use local_entanglement::oracle::{compare, CompareOptions};
use local_entanglement::state::{ConfigPoint, GaussianState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let state = GaussianState::two_mode(1.0, 0.6, 0.8)?;
    let region = MeasurementRegion::cubic(ConfigPoint::new(vec![0.4], vec![-0.7]), 0.1, 0.08)?;
    let opts = CompareOptions {
        ladder: vec![1.0, 0.5, 0.25, 0.125],
        ..CompareOptions::default()
    };
    let rep = compare(&state, &region, &opts)?;

    println!("{:>7} {:>13} {:>13} {:>10} {:>13} {:>13}", "scale", "eps", "lambda2", "rel err", "lambda3", "oracle l3");
    for r in &rep.rungs {
        println!(
            "{:>7.3} {:>13.6e} {:>13.6e} {:>10.2e} {:>13.6e} {:>13.6e}",
            r.scale,
            r.eps_formula,
            r.lambda2_oracle,
            r.rel_err_eps,
            r.lambda3_formula.unwrap_or(f64::NAN),
            r.lambda3_oracle
        );
    }
    println!(
        "slopes: eps {:.3}, lambda2 {:.3}, lambda3 {:.3} / {:.3}",
        rep.slope_eps_formula.unwrap_or(f64::NAN),
        rep.slope_lambda2_oracle.unwrap_or(f64::NAN),
        rep.slope_lambda3_formula.unwrap_or(f64::NAN),
        rep.slope_lambda3_oracle.unwrap_or(f64::NAN)
    );
    println!("passed: {}", rep.passed);
    for f in &rep.failures {
        println!("  {f}");
    }
    Ok(())
}
