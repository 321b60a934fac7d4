//! Local concurrence of a WKB eigenstate in a Morse well, across the
//! allowed region and both forbidden tails.
//!
//! ```bash
//! cargo run --release --example wkb_concurrence
//! ```

use local_entanglement::wkb::{wkb_concurrence_capped, Bound, Potential, WkbProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let morse = Potential::Morse { depth: 12.0, alpha: 0.8, r0: 2.0 };
    let problem = WkbProblem::new(morse, 4.0, 1.0, 0.05, (0.2, 30.0))?;
    let (r1, r2) = problem.turning_points();
    println!(
        "turning points {r1:.4} {r2:.4}, {} nodes, exclusion {:.3} / {:.3}",
        problem.node_count(),
        problem.exclusion_width(Bound::R1),
        problem.exclusion_width(Bound::R2)
    );

    let (a, b, sigma) = (5e-4, 5e-4, 0.1);
    for i in 0..=36 {
        let r = 0.5 + 0.25 * f64::from(i);
        if problem.check_outside_exclusion(r).is_err() {
            continue;
        }
        let (c, validity) = wkb_concurrence_capped(&problem, r, a, b, sigma)?;
        println!("{r:>7.3} {:?} C = {c:.6e} {validity:?}", problem.region(r));
    }
    Ok(())
}
