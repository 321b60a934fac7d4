//! Entanglement maps of coupled-oscillator eigenstates, written as CSV.
//!
//! ```bash
//! cargo run --release --example oscillator_maps -- /tmp/maps
//! ```

use std::path::PathBuf;

use local_entanglement::cli::{run_map, write_map_csv};
use local_entanglement::config::RunConfig;

const PANELS: [(&str, &str); 3] = [
    ("ground", include_str!("../configs/fig2a.json")),
    ("n11", include_str!("../configs/fig2b.json")),
    ("n13", include_str!("../configs/fig2c.json")),
];

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "maps".into()));
    std::fs::create_dir_all(&dir)?;
    for (name, text) in PANELS {
        let map = run_map(&RunConfig::from_json(text)?)?;
        let path = dir.join(format!("{name}.csv"));
        write_map_csv(&map, std::fs::File::create(&path)?)?;

        let max = map.cells.iter().map(|c| c.entropy_d).fold(0.0, f64::max);
        let capped = map.cells.iter().filter(|c| c.validity != "valid").count();
        println!(
            "{name}: {} cells, max E_D {max:.4e} bits, {capped} outside the validity domain -> {}",
            map.cells.len(),
            path.display()
        );
    }
    Ok(())
}
