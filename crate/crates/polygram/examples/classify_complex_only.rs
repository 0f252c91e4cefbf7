//! Classify factors as real-factorable or complex-only.
//!
//! The scalar Gramian 1 + 2t + 5t^2 is positive for all real t but has no
//! real spectral factor: (a + b t)^2 would need a^2 = 1, 2ab = 2, b^2 = 5
//! at once. Its complex factor [1 + (1+2i)t, 0] is classified ComplexOnly,
//! while any factor with zero W blocks comes out RealFactorable together
//! with an explicit real factor.
//!
//! Run with: cargo run --example classify_complex_only

use nalgebra::DMatrix;
use num_complex::Complex64;
use polygram::factor::classify;
use polygram::hrep;
use polygram::polymat::PolyMatrix;
use polygram::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();

    let a0 = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    let a1 = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 2.0), Complex64::new(0.0, 0.0)]);
    let x = PolyMatrix::new(vec![a0, a1]).unwrap();
    let c = classify(&x, &tol).expect("classification");
    println!("[1 + (1+2i)t, 0]  ->  {:?} (normalized W norm {:.3e})", c.verdict, c.w_norm);

    let h = hrep::sample(2, 4, 2, 3, 0.0, &tol).expect("sampling");
    let real_x = h.to_factor(&tol).unwrap();
    let c = classify(&real_x, &tol).expect("classification");
    println!(
        "zero-W sample     ->  {:?} (normalized W norm {:.3e}, Gramian match {:.3e})",
        c.verdict,
        c.w_norm,
        c.residuals.gram_match.unwrap()
    );
}
