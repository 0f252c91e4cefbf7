//! Dimension scan: compare local chart dimensions and Jacobian image ranks
//! of the Gramian-coefficient map between the generic stratum (W != 0) and
//! the real stratum (W = 0). A positive margin means the real stratum fills
//! more Gramian directions; the expected pattern is margin 0 at N = d + 1
//! and growing margins beyond.
//!
//! Run with: cargo run --release --example dimension_scan

use polygram::conjecture::{scan, write_csv, GridPoint, ScanConfig};
use polygram::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let cfg = ScanConfig {
        grid: (2..=6).map(|n| GridPoint { d: 1, p: 1, n }).collect(),
        trials: 3,
        seed: 0,
        fd_step: 1e-5,
        rank_tol: 1e-6,
        scale: 1.0,
    };
    let rows = scan(&cfg, &tol).expect("scan");
    let mut csv = Vec::new();
    write_csv(&rows, &mut csv).unwrap();
    print!("{}", String::from_utf8(csv).unwrap());
}
