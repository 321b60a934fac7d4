//! A user-supplied wavefunction with no analytic derivatives. The
//! derivatives come from Richardson-extrapolated finite differences.
//!
//! ```bash
//! cargo run --release --example custom_state
//! ```

use local_entanglement::entanglement::{report, MeasurementRegion, ReportOptions};
use local_entanglement::oracle::{build_rdm, spectrum};
use local_entanglement::state::{ConfigPoint, FnState};
use local_entanglement::Complex64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a squeezed pair with a weak quartic correction
    let state = FnState::new("squeezed-quartic", 1, 1, |a: &[f64], b: &[f64]| {
        let (x, y) = (a[0], b[0]);
        let s = x + y;
        let d = x - y;
        Complex64::new(-(0.25 * s * s + d * d + 0.05 * x.powi(4)), 0.3 * x * y).exp()
    })
    .with_extent(8.0)?;

    let region = MeasurementRegion::cubic(ConfigPoint::new(vec![0.4], vec![0.1]), 0.05, 0.05)?;
    let opts = ReportOptions { with_probability: true, ..ReportOptions::default() };
    let rep = report(&state, &region, &opts)?;
    println!("{}", serde_json::to_string_pretty(&rep)?);

    let oracle = spectrum(&build_rdm(&state, &region, 32)?)?;
    println!("oracle lambda2 {:.6e}, formula eps {:.6e}", oracle.lambda(1), rep.epsilon);
    Ok(())
}
