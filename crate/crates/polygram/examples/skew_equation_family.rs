//! Solve the matrix equation X^T A - A^T X = C and exhibit its affine
//! solution family: any two solutions differ by W A with W symmetric.
//!
//! Run with: cargo run --example skew_equation_family

use nalgebra::DMatrix;
use polygram::factor::{skew_offset_symmetric, solve_skew_particular};
use polygram::numeric::fro;
use polygram::tol::Tolerances;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn main() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let gaussian = |rng: &mut ChaCha8Rng, r: usize, c: usize| {
        DMatrix::from_fn(r, c, |_, _| rng.sample::<f64, _>(StandardNormal))
    };

    let a = gaussian(&mut rng, 2, 4);
    let planted = {
        let m = gaussian(&mut rng, 2, 2);
        (&m + m.transpose()) * 0.5
    };
    let x_true = &planted * &a + gaussian(&mut rng, 2, 4);
    let c = &x_true.transpose() * &a - a.transpose() * &x_true;
    let c = (&c - c.transpose()) * 0.5;

    let x = solve_skew_particular(&a, &c, &tol).expect("feasible by construction");
    let residual = fro(&(&x.transpose() * &a - a.transpose() * &x - &c));
    println!("particular solution found, residual {:.3e}", residual);
    println!("solution family: X = W A + X_particular for any symmetric W");

    let w = skew_offset_symmetric(&a, &x_true, &x, &tol).expect("structure theorem");
    println!(
        "offset of the planted solution: symmetric W with |W - W^T| = {:.3e}",
        fro(&(&w - w.transpose()))
    );
}
