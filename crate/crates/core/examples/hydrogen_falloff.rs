//! First-order local entanglement of hydrogen orbitals against the
//! electron-nucleus separation.
//!
//! ```bash
//! cargo run --release --example hydrogen_falloff
//! ```

use local_entanglement::entanglement::{epsilon_joint, MeasurementRegion};
use local_entanglement::state::{ComPart, ComRelState, ConfigPoint, Orbital};

const PROTON: f64 = 1836.15267343;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (a, b) = (0.05, 0.05);
    let rest = ComPart::PlaneWave { k0: vec![0.0; 3] };
    let s1 = ComRelState::hydrogen(Orbital::ground(1.0), 1.0, PROTON, rest.clone())?;
    let p2 = ComRelState::hydrogen(Orbital::new(2, 1, 0, 1.0)?, 1.0, PROTON, rest)?;

    println!("{:>5} {:>14} {:>14} {:>14}", "r", "eps(1s)", "2(ab/3r)^2", "eps(2p0)");
    for r in [1.0, 2.0, 3.0, 5.0, 8.0, 13.0] {
        // nucleus at the origin, electron off the 2p0 nodal plane
        let q_a = vec![0.6 * r, 0.0, 0.8 * r];
        let region = MeasurementRegion::cubic(ConfigPoint::new(q_a, vec![0.0; 3]), a, b)?;
        let law = 2.0 * (a * b / (3.0 * r)).powi(2);
        println!(
            "{r:>5.1} {:>14.6e} {law:>14.6e} {:>14.6e}",
            epsilon_joint(&s1, &region)?,
            epsilon_joint(&p2, &region)?
        );
    }
    Ok(())
}
