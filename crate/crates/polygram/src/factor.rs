//! Canonicalization of complex spectral factors, recovery of their (W, R)
//! representation, and the real-factorable vs complex-only classifier.
//!
//! The recovery runs the realness conditions on the Gramian coefficients as
//! a forward induction: `W_p` falls out of the imaginary part of `A_p` once
//! `W_1..W_{p-1}` are known, and the high-index blocks `W_{P+1}..W_{2P}` fall
//! out of the block-Toeplitz rows. Every step asserts symmetry and a zero
//! residual, so a factor whose Gramian is not real fails loudly at the first
//! violated step.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::hrep::{HRep, HRepError};
use crate::numeric::{self, fro, fro_c, NumericError};
use crate::polymat::{gram, is_real, GramPoly, PolyMatrix};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum FactorError {
    #[error("C is not skew-symmetric: residual {residual:.3e} exceeds {limit:.3e}")]
    NotSkew { residual: f64, limit: f64 },
    #[error("no solution: least-squares residual {residual:.3e} exceeds {limit:.3e}")]
    Infeasible { residual: f64, limit: f64 },
    #[error("offset is not of the form W A with symmetric W: {detail}")]
    StructureViolation { detail: String },
    #[error("Gramian is not real: max imaginary magnitude {max_imag:.3e} exceeds {limit:.3e}")]
    NotRealGramian { max_imag: f64, limit: f64 },
    #[error("leading coefficient A_0 has rank {rank}, expected {expected}")]
    RankDeficientLead { rank: usize, expected: usize },
    #[error("degenerate spectrum of B_0: gap {gap:.3e} below {limit:.3e}; canonical factor not unique")]
    DegenerateSpectrum { gap: f64, limit: f64 },
    #[error("canonicalizing rotation failed to be unitary: {detail}")]
    UnitarityFailure { detail: String },
    #[error("factor has no (W, R) representation: {step} residual {residual:.3e} exceeds {limit:.3e}")]
    NotRepresentable { step: String, residual: f64, limit: f64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
    #[error(transparent)]
    HRep(#[from] HRepError),
}

/// Solve `X^T A - A^T X = C` for one `d x N` solution by dense least squares
/// over the `dN` unknowns, or report infeasibility.
///
/// `A` must have full row rank and `C` must be skew-symmetric. Any two
/// solutions differ by `W A` with `W` symmetric (see
/// [`skew_offset_symmetric`]), so one particular solution describes the
/// whole affine family.
pub fn solve_skew_particular(
    a: &DMatrix<f64>,
    c: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<DMatrix<f64>, FactorError> {
    let (d, n) = (a.nrows(), a.ncols());
    let skew_res = fro(&(c + c.transpose()));
    let skew_limit = tol.eps_sym * (fro(c) + 1.0);
    if c.nrows() != n || c.ncols() != n || skew_res > skew_limit {
        return Err(FactorError::NotSkew {
            residual: skew_res,
            limit: skew_limit,
        });
    }
    let r = numeric::rank(a, tol.rank_tol);
    if r < d {
        return Err(NumericError::RankDeficient { rank: r, rows: d }.into());
    }
    // (X^T A - A^T X)_{ij} = sum_k X_{k,i} A_{k,j} - A_{k,i} X_{k,j};
    // unknown (k, i) maps to column k * N + i
    let mut system = DMatrix::zeros(n * n, d * n);
    let mut rhs = nalgebra::DVector::zeros(n * n);
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            rhs[row] = c[(i, j)];
            for k in 0..d {
                system[(row, k * n + i)] += a[(k, j)];
                system[(row, k * n + j)] -= a[(k, i)];
            }
        }
    }
    let x_vec = numeric::svd_solve(&system, &rhs, tol.rank_tol);
    let x = DMatrix::from_fn(d, n, |k, i| x_vec[k * n + i]);
    let residual = fro(&(&x.transpose() * a - a.transpose() * &x - c));
    let limit = tol.eps_cons * (fro(a) * fro(&x) + fro(c) + 1.0);
    if residual > limit {
        return Err(FactorError::Infeasible { residual, limit });
    }
    Ok(x)
}

/// Given two solutions of the same `X^T A - A^T X = C`, return the symmetric
/// `W` with `X1 - X2 = W A`. Fails if the offset does not have that
/// structure (which means the inputs were not both solutions, or `A` is rank
/// deficient).
pub fn skew_offset_symmetric(
    a: &DMatrix<f64>,
    x1: &DMatrix<f64>,
    x2: &DMatrix<f64>,
    tol: &Tolerances,
) -> Result<DMatrix<f64>, FactorError> {
    let diff = x1 - x2;
    let pinv = numeric::right_pinv(a, tol.rank_tol)?;
    let w = &diff * &pinv;
    let sym_res = fro(&(&w - w.transpose()));
    let sym_limit = tol.eps_cons * (fro(&w) + 1.0);
    if sym_res > sym_limit {
        return Err(FactorError::StructureViolation {
            detail: format!("asymmetry {:.3e} exceeds {:.3e}", sym_res, sym_limit),
        });
    }
    let recon_res = fro(&(&w * a - diff));
    let recon_limit = tol.eps_cons * (fro(&w) * fro(a) + 1.0);
    if recon_res > recon_limit {
        return Err(FactorError::StructureViolation {
            detail: format!("W A misses the offset by {:.3e} (limit {:.3e})", recon_res, recon_limit),
        });
    }
    Ok(w)
}

/// Residual diagnostics carried by a canonical factor.
#[derive(Debug, Clone, Serialize)]
pub struct CanonResiduals {
    /// `|U U^H - I|` relative.
    pub unitarity: f64,
    /// `|U A_0 - R_0|` relative.
    pub factor_match: f64,
    /// `|imag(A_0')|` relative, after rotation.
    pub realness: f64,
}

/// A factor rotated so that `imag(A_0) = 0` and `real(A_0)` has orthogonal
/// rows with descending norms and positive leading entries, together with
/// the unitary that produced it.
#[derive(Debug, Clone)]
pub struct CanonicalFactor {
    pub x: PolyMatrix,
    pub u: DMatrix<Complex64>,
    pub residuals: CanonResiduals,
}

/// Rotate an arbitrary complex factor with real Gramian into the canonical
/// form, via the eigendecomposition of `B_0 = A_0^H A_0`.
pub fn canonicalize_factor(x: &PolyMatrix, tol: &Tolerances) -> Result<CanonicalFactor, FactorError> {
    let g = gram(x);
    let (real, max_imag) = is_real(&g, tol);
    if !real {
        return Err(FactorError::NotRealGramian {
            max_imag,
            limit: tol.eps_real * (g.norm() + 1.0),
        });
    }
    let d = x.rows();
    let a0 = x.coeff(0);
    let lead_rank = numeric::rank_c(a0, tol.rank_tol);
    if lead_rank < d {
        return Err(FactorError::RankDeficientLead {
            rank: lead_rank,
            expected: d,
        });
    }
    let b0 = g.coeff(0).map(|z| z.re);
    let (vals, vecs) = numeric::sym_eig(&b0, tol)?;
    for j in 0..d {
        if j + 1 < vals.len() {
            let gap = vals[j] - vals[j + 1];
            let limit = tol.eps_gap * vals[0];
            if gap < limit {
                return Err(FactorError::DegenerateSpectrum { gap, limit });
            }
        }
    }
    // rows of R_0 are sqrt(lambda_j) v_j^T with positive leading entries
    let n = x.cols();
    let mut r0 = DMatrix::zeros(d, n);
    for j in 0..d {
        let s = vals[j].max(0.0).sqrt();
        for col in 0..n {
            r0[(j, col)] = s * vecs[(col, j)];
        }
        let row: Vec<f64> = r0.row(j).iter().copied().collect();
        if row.iter().find(|e| e.abs() > 1e-12 * (fro(&r0) + 1.0)).map_or(false, |e| *e < 0.0) {
            for col in 0..n {
                r0[(j, col)] = -r0[(j, col)];
            }
        }
    }
    let r0c = numeric::to_complex(&r0);
    let a0_gram = a0 * a0.adjoint();
    let inv = a0_gram
        .try_inverse()
        .ok_or(FactorError::RankDeficientLead { rank: lead_rank, expected: d })?;
    let u = &r0c * a0.adjoint() * inv;

    let eye = DMatrix::from_diagonal_element(d, d, Complex64::new(1.0, 0.0));
    let unitarity = fro_c(&(&u * u.adjoint() - eye)) / (d as f64).sqrt();
    let factor_match = fro_c(&(&u * a0 - &r0c)) / (fro(&r0) + 1.0);
    let limit = tol.eps_sym;
    if unitarity > limit || factor_match > limit {
        return Err(FactorError::UnitarityFailure {
            detail: format!(
                "unitarity residual {:.3e}, factor match residual {:.3e} (limit {:.3e})",
                unitarity, factor_match, limit
            ),
        });
    }
    let rotated = x.left_mul(&u);
    let realness = fro(&rotated.coeff(0).map(|z| z.im)) / (fro_c(rotated.coeff(0)) + 1.0);
    if realness > limit {
        return Err(FactorError::UnitarityFailure {
            detail: format!("rotated A_0 keeps imaginary mass {:.3e}", realness),
        });
    }
    Ok(CanonicalFactor {
        x: rotated,
        u,
        residuals: CanonResiduals {
            unitarity,
            factor_match,
            realness,
        },
    })
}

/// Recover the (W, R) representation of a canonical factor by the forward
/// induction on the realness conditions. Fails with the violated step when
/// the factor does not represent a real Gramian.
pub fn recover_hrep(cf: &CanonicalFactor, tol: &Tolerances) -> Result<HRep, FactorError> {
    let x = &cf.x;
    let (d, n, deg) = (x.rows(), x.cols(), x.degree());
    if deg < 1 {
        return Err(HRepError::DimensionError { d, n, p: deg }.into());
    }
    let r: Vec<DMatrix<f64>> = x.real_parts();
    let q: Vec<DMatrix<f64>> = x.imag_parts();
    let pinv = numeric::right_pinv(&r[0], tol.rank_tol)?;
    // errors passing through right_pinv(R_0) grow with its condition
    // number, so the step assertions scale with it
    let r0_sv = numeric::checked_svd(&r[0]).sv;
    let cond = r0_sv.max() / r0_sv.min().max(f64::MIN_POSITIVE);
    let scale = x.norm() + 1.0;
    let limit = tol.classify_tol * scale * cond.max(1.0);

    let mut w: Vec<DMatrix<f64>> = Vec::with_capacity(2 * deg);
    for p in 1..=deg {
        let mut partial = DMatrix::zeros(d, n);
        for i in 1..p {
            partial += &w[i - 1] * &r[p - i];
        }
        let wp = (&q[p] - &partial) * &pinv;
        check_step(&wp, &(&wp * &r[0] + partial - &q[p]), &format!("imag(A_{})", p), limit)?;
        w.push((&wp + wp.transpose()) * 0.5);
    }
    for p in 1..=deg {
        let mut partial = DMatrix::zeros(d, n);
        for i in 1..=deg {
            partial += &w[deg + p - i - 1] * &r[i];
        }
        let wp = -(&partial * &pinv);
        check_step(&wp, &(&wp * &r[0] + partial), &format!("Toeplitz row {}", p), limit)?;
        w.push((&wp + wp.transpose()) * 0.5);
    }

    let mut h = HRep::new(d, n, deg, w, r)?;
    h.canonical = true;
    let mut val_tol = tol.clone();
    val_tol.eps_sym *= cond.max(1.0);
    val_tol.eps_cons *= cond.max(1.0);
    let report = h.validate(&val_tol);
    if !report.pass {
        return Err(FactorError::NotRepresentable {
            step: "final validation".into(),
            residual: report.cons_residual.max(report.sym_residual),
            limit: tol.eps_cons * cond.max(1.0),
        });
    }
    Ok(h)
}

fn check_step(w: &DMatrix<f64>, residual: &DMatrix<f64>, step: &str, limit: f64) -> Result<(), FactorError> {
    let asym = fro(&(w - w.transpose()));
    if asym > limit {
        return Err(FactorError::NotRepresentable {
            step: format!("{} (symmetry)", step),
            residual: asym,
            limit,
        });
    }
    let res = fro(residual);
    if res > limit {
        return Err(FactorError::NotRepresentable {
            step: step.into(),
            residual: res,
            limit,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    RealFactorable,
    ComplexOnly,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassifyResiduals {
    pub canonical: CanonResiduals,
    /// Gramian mismatch between the input and the emitted real factor, when
    /// one is emitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram_match: Option<f64>,
}

/// Classification of a factor's Gramian: real-factorable iff the recovered
/// W blocks vanish up to `classify_tol`. The normalized W norm is reported
/// so borderline cases are visible instead of silently binned.
#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub w_norm: f64,
    pub residuals: ClassifyResiduals,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub real_factor: Option<PolyMatrix>,
}

/// Decide whether the (real) Gramian of `x` admits a real spectral factor.
pub fn classify(x: &PolyMatrix, tol: &Tolerances) -> Result<Classification, FactorError> {
    let cf = canonicalize_factor(x, tol)?;
    let h = recover_hrep(&cf, tol)?;
    let w_norm = h
        .w
        .iter()
        .map(|wk| fro(wk))
        .fold(0.0, f64::max)
        / (1.0 + h.r_norm());
    if w_norm <= tol.classify_tol {
        let real_factor = PolyMatrix::from_real(cf.x.real_parts()).expect("shapes agree");
        let gram_match = gram(&real_factor).relative_distance(&gram(x));
        Ok(Classification {
            verdict: Verdict::RealFactorable,
            w_norm,
            residuals: ClassifyResiduals {
                canonical: cf.residuals,
                gram_match: Some(gram_match),
            },
            real_factor: Some(real_factor),
        })
    } else {
        Ok(Classification {
            verdict: Verdict::ComplexOnly,
            w_norm,
            residuals: ClassifyResiduals {
                canonical: cf.residuals,
                gram_match: None,
            },
            real_factor: None,
        })
    }
}

/// Gramian of the real factor emitted by a classification, for callers that
/// want to re-check the match themselves.
pub fn real_factor_gram(c: &Classification) -> Option<GramPoly> {
    c.real_factor.as_ref().map(gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hrep;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    fn e1_factor() -> PolyMatrix {
        let a0 = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let a1 = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 2.0), Complex64::new(0.0, 0.0)]);
        PolyMatrix::new(vec![a0, a1]).unwrap()
    }

    fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| rng.sample::<f64, _>(StandardNormal))
    }

    #[test]
    fn solve_skew_zero_rhs() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let c = DMatrix::zeros(2, 2);
        let x = solve_skew_particular(&a, &c, &tols()).unwrap();
        assert!(fro(&x) < 1e-10);
    }

    #[test]
    fn solve_skew_d1_n2_feasible() {
        // (X^T A - A^T X)_{12} = -x_2 for A = [1, 0], so any c is matched
        // by x_2 = -c
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let c = DMatrix::from_row_slice(2, 2, &[0.0, 0.7, -0.7, 0.0]);
        let x = solve_skew_particular(&a, &c, &tols()).unwrap();
        assert!((x[(0, 1)] + 0.7).abs() < 1e-10);
        let res = &x.transpose() * &a - a.transpose() * &x - &c;
        assert!(fro(&res) < 1e-10);
    }

    #[test]
    fn solve_skew_construct_then_solve() {
        let tol = tols();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = gaussian(&mut rng, 2, 4);
            let w0 = gaussian(&mut rng, 2, 2);
            let w0 = (&w0 + w0.transpose()) * 0.5;
            let r0 = gaussian(&mut rng, 2, 4);
            let x_true = &w0 * &a + &r0;
            let c = &x_true.transpose() * &a - a.transpose() * &x_true;
            let c = (&c - c.transpose()) * 0.5;
            let x = solve_skew_particular(&a, &c, &tol).unwrap();
            let res = &x.transpose() * &a - a.transpose() * &x - &c;
            assert!(fro(&res) < 1e-9 * (fro(&a) * fro(&x) + fro(&c) + 1.0));
        }
    }

    #[test]
    fn solve_skew_rejects_non_skew() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let c = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            solve_skew_particular(&a, &c, &tols()),
            Err(FactorError::NotSkew { .. })
        ));
    }

    #[test]
    fn offset_of_identical_solutions_is_zero() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 2.0, 0.0, 1.0, -1.0]);
        let x = DMatrix::from_row_slice(2, 3, &[0.3, 1.0, 0.0, -0.2, 0.4, 0.9]);
        let w = skew_offset_symmetric(&a, &x, &x, &tols()).unwrap();
        assert!(fro(&w) < 1e-12);
    }

    #[test]
    fn offset_recovers_planted_w() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = gaussian(&mut rng, 2, 5);
        let w0 = gaussian(&mut rng, 2, 2);
        let w0 = (&w0 + w0.transpose()) * 0.5;
        let x2 = gaussian(&mut rng, 2, 5);
        let x1 = &w0 * &a + &x2;
        let w = skew_offset_symmetric(&a, &x1, &x2, &tols()).unwrap();
        assert!(fro(&(w - w0)) < 1e-9);
    }

    #[test]
    fn offset_family_square_case() {
        // N = d: the structure theorem still holds, with no orthogonal
        // complement term
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = gaussian(&mut rng, 3, 3);
        let w0 = gaussian(&mut rng, 3, 3);
        let w0 = (&w0 + w0.transpose()) * 0.5;
        let x2 = gaussian(&mut rng, 3, 3);
        let x1 = &w0 * &a + &x2;
        let w = skew_offset_symmetric(&a, &x1, &x2, &tols()).unwrap();
        assert!(fro(&(w - w0)) < 1e-8);
    }

    #[test]
    fn canonicalize_identity_on_canonical_input() {
        let tol = tols();
        let cf = canonicalize_factor(&e1_factor(), &tol).unwrap();
        let diff = &cf.u - DMatrix::from_diagonal_element(1, 1, Complex64::new(1.0, 0.0));
        assert!(fro_c(&diff) < 1e-10);
        for p in 0..=1 {
            let d = cf.x.coeff(p) - e1_factor().coeff(p);
            assert!(fro_c(&d) < 1e-12);
        }
    }

    #[test]
    fn canonicalize_undoes_phase_rotation() {
        // X = i * E1 = [i + (i-2)t, 0] must come back as E1 with U = -i
        let tol = tols();
        let phase = DMatrix::from_diagonal_element(1, 1, Complex64::new(0.0, 1.0));
        let rotated = e1_factor().left_mul(&phase);
        let cf = canonicalize_factor(&rotated, &tol).unwrap();
        assert!((cf.u[(0, 0)] - Complex64::new(0.0, -1.0)).norm() < 1e-10);
        let d0 = cf.x.coeff(0) - e1_factor().coeff(0);
        let d1 = cf.x.coeff(1) - e1_factor().coeff(1);
        assert!(fro_c(&d0) < 1e-10 && fro_c(&d1) < 1e-10);
        assert!(gram(&cf.x).relative_distance(&gram(&rotated)) < 1e-12);
    }

    #[test]
    fn canonicalize_real_orthogonal_input_is_fixed() {
        let tol = tols();
        let a0 = DMatrix::from_row_slice(1, 3, &[2.0, 0.0, 1.0]);
        let a1 = DMatrix::from_row_slice(1, 3, &[0.5, -1.0, 0.0]);
        let x = PolyMatrix::from_real(vec![a0, a1]).unwrap();
        let cf = canonicalize_factor(&x, &tol).unwrap();
        for p in 0..=1 {
            let d = cf.x.coeff(p) - x.coeff(p);
            assert!(fro_c(&d) < 1e-10);
        }
    }

    #[test]
    fn canonicalize_rejects_non_real_gram() {
        let a0 = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        let a1 = DMatrix::from_row_slice(1, 2, &[Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
        let x = PolyMatrix::new(vec![a0, a1]).unwrap();
        assert!(matches!(
            canonicalize_factor(&x, &tols()),
            Err(FactorError::NotRealGramian { .. })
        ));
    }

    #[test]
    fn recover_real_factor_gives_zero_w() {
        let tol = tols();
        let h = hrep::sample(2, 4, 2, 31, 0.0, &tol).unwrap();
        let cf = canonicalize_factor(&h.to_factor(&tol).unwrap(), &tol).unwrap();
        let rec = recover_hrep(&cf, &tol).unwrap();
        assert!(rec.w_norm() < 1e-10);
    }

    #[test]
    fn recover_e1_by_hand_induction() {
        let tol = tols();
        let cf = canonicalize_factor(&e1_factor(), &tol).unwrap();
        let h = recover_hrep(&cf, &tol).unwrap();
        // W_1 = Q_1 R_0^+ = 2; W_2 = -(W_1 R_1) R_0^+ = -2
        assert!((h.w[0][(0, 0)] - 2.0).abs() < 1e-12);
        assert!((h.w[1][(0, 0)] + 2.0).abs() < 1e-12);
        assert!((h.r[0][(0, 0)] - 1.0).abs() < 1e-12);
        assert!((h.r[1][(0, 0)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_on_sampled_points() {
        let tol = tols();
        for seed in [3u64, 8, 15] {
            let h = hrep::sample(2, 4, 2, seed, 0.6, &tol).unwrap();
            let canon = h.canonicalize(&tol).unwrap();
            let cf = canonicalize_factor(&h.to_factor(&tol).unwrap(), &tol).unwrap();
            let rec = recover_hrep(&cf, &tol).unwrap();
            let scale = canon.w_norm() + canon.r_norm() + 1.0;
            for k in 0..2 * h.deg {
                assert!(fro(&(&rec.w[k] - &canon.w[k])) < 1e-7 * scale);
            }
            for p in 0..=h.deg {
                assert!(fro(&(&rec.r[p] - &canon.r[p])) < 1e-7 * scale);
            }
            // and forward again
            let x_rec = rec.to_factor(&tol).unwrap();
            for p in 0..=h.deg {
                let d = x_rec.coeff(p) - cf.x.coeff(p);
                assert!(fro_c(&d) < 1e-7 * scale);
            }
        }
    }

    #[test]
    fn classify_real_input() {
        let tol = tols();
        let x = PolyMatrix::from_real(vec![
            DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
            DMatrix::from_row_slice(1, 2, &[1.0, 1.0]),
        ])
        .unwrap();
        let c = classify(&x, &tol).unwrap();
        assert_eq!(c.verdict, Verdict::RealFactorable);
        assert!(c.w_norm < 1e-10);
        assert!(c.residuals.gram_match.unwrap() < 1e-10);
    }

    #[test]
    fn classify_e1_complex_only() {
        let tol = tols();
        let c = classify(&e1_factor(), &tol).unwrap();
        assert_eq!(c.verdict, Verdict::ComplexOnly);
        assert!(c.w_norm > 0.1);
        assert!(c.real_factor.is_none());
        // independent scalar obstruction: (a + b t)^2 = 1 + 2t + 5t^2 needs
        // a^2 = 1, 2ab = 2, b^2 = 5; a = +-1 forces b = +-1, but b^2 = 5
        let a: f64 = 1.0;
        let b = 2.0 / (2.0 * a);
        assert!((b * b - 5.0).abs() > 1.0);
    }

    #[test]
    fn classify_is_gramian_invariant() {
        // rotating the factor by a constant unitary leaves the verdict alone
        let tol = tols();
        let theta = 0.83f64;
        let u = DMatrix::from_diagonal_element(1, 1, Complex64::from_polar(1.0, theta));
        let rotated = e1_factor().left_mul(&u);
        let c = classify(&rotated, &tol).unwrap();
        assert_eq!(c.verdict, Verdict::ComplexOnly);
        assert!((c.w_norm - classify(&e1_factor(), &tol).unwrap().w_norm).abs() < 1e-9);
    }
}
