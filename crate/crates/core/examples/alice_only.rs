//! Entanglement between a small region held by Alice and everything
//! Bob has, from the traced marginal.
//!
//! ```bash
//! cargo run --release --example alice_only
//! ```

use local_entanglement::entanglement::{epsilon_alice_only, epsilon_joint, MeasurementRegion};
use local_entanglement::oracle::{build_rdm, spectrum};
use local_entanglement::state::{ConfigPoint, GaussianState};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let state = GaussianState::two_mode(1.0, 0.7, 0.9)?;
    for (qa, a) in [(0.0, 0.1), (0.8, 0.1), (0.8, 0.2), (1.6, 0.1)] {
        let region = MeasurementRegion::alice_only(ConfigPoint::new(vec![qa], vec![0.0]), vec![a])?;
        let (l1, _, l3) = epsilon_alice_only(&state, &region)?;
        let oracle = spectrum(&build_rdm(&state, &region, 32)?)?;
        println!(
            "q_a {qa:>4.1} a {a:.2}: lambda1 {l1:.6e} (oracle {:.6e}), lambda3 {l3:.3e} (oracle {:.3e})",
            oracle.lambda(1),
            oracle.lambda(2)
        );
    }

    // the joint value at a small Bob box for contrast
    let joint = MeasurementRegion::cubic(ConfigPoint::new(vec![0.8], vec![0.0]), 0.1, 0.1)?;
    println!("joint with b = 0.1: {:.6e}", epsilon_joint(&state, &joint)?);
    Ok(())
}
