//! Sample a (W, R) representation point and show that its complex spectral
//! factor has a real Gramian, even though the factor itself is complex.
//!
//! Run with: cargo run --example generate_real_gramian

use polygram::hrep;
use polygram::polymat::{gram, is_real, psd_profile, default_psd_grid};
use polygram::tol::Tolerances;

fn main() {
    let tol = Tolerances::default();
    let (d, n, p, seed, scale) = (2, 4, 2, 7, 1.0);
    let h = hrep::sample(d, n, p, seed, scale, &tol).expect("sampling");
    let report = h.validate(&tol);
    println!(
        "sampled d={} N={} P={}: constraint residual {:.3e}, rank(R_0) = {}",
        d, n, p, report.cons_residual, report.r0_rank
    );

    let x = h.to_factor(&tol).expect("valid point");
    println!("factor degree {}, max imaginary coefficient {:.4}", x.degree(), x.max_imag());

    let g = gram(&x);
    let (real, max_imag) = is_real(&g, &tol);
    println!("Gramian degree {}, real: {} (max imag {:.3e})", g.degree(), real, max_imag);

    let profile = psd_profile(&g, &default_psd_grid(), &tol).expect("real Gramian");
    println!(
        "PSD profile over the sample grid: min eigenvalue {:.3e}, max rank {}, rank at 0: {}",
        profile.min_eig, profile.max_rank, profile.rank_at_0
    );
}
