//! The bijection in action: sample a representation point, map it to its
//! spectral factor, canonicalize the factor (fixing the unitary ambiguity
//! through the eigendecomposition of B_0), and recover the representation.
//!
//! Run with: cargo run --example canonical_roundtrip

use polygram::factor::{canonicalize_factor, recover_hrep};
use polygram::hrep;
use polygram::numeric::fro;
use polygram::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let h = hrep::sample(2, 5, 2, 42, 0.8, &tol).expect("sampling");
    let canon = h.canonicalize(&tol).expect("canonical form");

    let x = h.to_factor(&tol).expect("factor");
    let cf = canonicalize_factor(&x, &tol).expect("canonical factor");
    println!(
        "canonicalization residuals: unitarity {:.3e}, factor match {:.3e}",
        cf.residuals.unitarity, cf.residuals.factor_match
    );

    let rec = recover_hrep(&cf, &tol).expect("recovery");
    let scale = canon.w_norm() + canon.r_norm() + 1.0;
    let mut max_diff = 0.0f64;
    for k in 0..2 * h.deg {
        max_diff = max_diff.max(fro(&(&rec.w[k] - &canon.w[k])));
    }
    for p in 0..=h.deg {
        max_diff = max_diff.max(fro(&(&rec.r[p] - &canon.r[p])));
    }
    println!("round-trip relative deviation: {:.3e}", max_diff / scale);
}
