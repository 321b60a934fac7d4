//! Local coordinate changes: rotating one party's axes leaves the
//! entanglement alone, normal modes give it in closed form, and a
//! centre-of-mass packet shifts it.
//!
//! ```bash
//! cargo run --release --example coordinate_transforms
//! ```

use local_entanglement::entanglement::{epsilon_joint, MeasurementRegion};
use local_entanglement::state::{ComPart, ComRelState, ConfigPoint, Orbital, Party};
use local_entanglement::transforms::{
    gaussian_packet_epsilon, harmonic_normal_modes, orthogonal_pullback_epsilon, separable_epsilon, LocalTransform,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 2p orbital, Bob's axes rotated about z
    let h = ComRelState::hydrogen(
        Orbital::new(2, 1, 1, 1.0)?,
        1.0,
        3.0,
        ComPart::GaussianPacket { width: 2.0, k0: vec![0.0; 3] },
    )?;
    let region = MeasurementRegion::cubic(ConfigPoint::new(vec![1.2, -0.4, 0.9], vec![0.3, 0.2, -0.1]), 0.05, 0.05)?;
    let t = 0.7f64;
    let rot = vec![vec![t.cos(), -t.sin(), 0.0], vec![t.sin(), t.cos(), 0.0], vec![0.0, 0.0, 1.0]];
    let transform = LocalTransform::rotation(Party::Bob, rot, 0.05)?;
    println!("2p direct   {:.12e}", epsilon_joint(&h, &region)?);
    println!("2p rotated  {:.12e}", orthogonal_pullback_epsilon(&h, &region, &transform)?);
    println!("2p packet   {:.12e}", gaussian_packet_epsilon(&h, &region)?);

    // three masses on springs, Alice holds the first
    let chain = harmonic_normal_modes(
        1,
        &[1.0, 2.0, 1.0],
        &[vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 2.0]],
        &[0, 1, 0],
        1.0,
    )?;
    let region = MeasurementRegion::new(ConfigPoint::new(vec![0.3], vec![-0.2, 0.5]), vec![0.05], vec![0.05, 0.05])?;
    println!("chain modes {:.12e}", separable_epsilon(&chain, &region)?);
    println!("chain joint {:.12e}", epsilon_joint(&chain, &region)?);
    Ok(())
}
