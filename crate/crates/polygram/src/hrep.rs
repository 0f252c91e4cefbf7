//! The (W, R) representation of real polynomial Gramians: `2P` symmetric
//! `d x d` blocks `W_1..W_2P` and `P + 1` real `d x N` blocks `R_0..R_P`
//! subject to the block-Toeplitz constraint `W R = 0` and `rank(R_0) = d`.
//!
//! `W` is stored 1-based conceptually (`k` in `1..=2P`); the serialized list
//! holds `W_1` first.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{self, fro, NumericError};
use crate::polymat::{self, PolyMatrix};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum HRepError {
    #[error("invalid dimensions: need N >= d >= 1 and P >= 1, got d={d}, N={n}, P={p}")]
    DimensionError { d: usize, n: usize, p: usize },
    #[error("sampling failed after {retries} retries: {diagnostic}")]
    SamplingFailed { retries: u32, diagnostic: String },
    #[error("invalid representation: {0}")]
    InvalidHRep(String),
    #[error("degenerate spectrum of R_0 R_0^T: gap {gap:.3e} below {limit:.3e}; canonical form not unique")]
    DegenerateSpectrum { gap: f64, limit: f64 },
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

/// A point of the representation variety.
#[derive(Debug, Clone, PartialEq)]
pub struct HRep {
    pub d: usize,
    pub n: usize,
    /// Polynomial degree P of the factor.
    pub deg: usize,
    /// `W_1..W_2P`, each symmetric `d x d`.
    pub w: Vec<DMatrix<f64>>,
    /// `R_0..R_P`, each `d x N`.
    pub r: Vec<DMatrix<f64>>,
    pub canonical: bool,
    pub seed: Option<u64>,
}

/// Residual report from [`HRep::validate`].
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// Max relative symmetry residual over the W blocks.
    pub sym_residual: f64,
    /// Relative residual of the block-Toeplitz constraint `W R = 0`.
    pub cons_residual: f64,
    pub r0_rank: usize,
    pub canonical_claimed: bool,
    pub canonical_ok: bool,
    pub pass: bool,
}

fn sign_of_leading_entry(row: &[f64], thresh: f64) -> f64 {
    for &e in row {
        if e.abs() > thresh {
            return e.signum();
        }
    }
    0.0
}

impl HRep {
    pub fn new(
        d: usize,
        n: usize,
        deg: usize,
        w: Vec<DMatrix<f64>>,
        r: Vec<DMatrix<f64>>,
    ) -> Result<Self, HRepError> {
        if d < 1 || n < d || deg < 1 {
            return Err(HRepError::DimensionError { d, n, p: deg });
        }
        if w.len() != 2 * deg {
            return Err(HRepError::InvalidHRep(format!(
                "expected {} W blocks, got {}",
                2 * deg,
                w.len()
            )));
        }
        if r.len() != deg + 1 {
            return Err(HRepError::InvalidHRep(format!(
                "expected {} R blocks, got {}",
                deg + 1,
                r.len()
            )));
        }
        for (k, wk) in w.iter().enumerate() {
            if wk.nrows() != d || wk.ncols() != d {
                return Err(HRepError::InvalidHRep(format!("W_{} has wrong shape", k + 1)));
            }
        }
        for (p, rp) in r.iter().enumerate() {
            if rp.nrows() != d || rp.ncols() != n {
                return Err(HRepError::InvalidHRep(format!("R_{} has wrong shape", p)));
            }
        }
        Ok(HRep {
            d,
            n,
            deg,
            w,
            r,
            canonical: false,
            seed: None,
        })
    }

    /// `W_k` for `k` in `1..=2P`.
    pub fn w_block(&self, k: usize) -> &DMatrix<f64> {
        &self.w[k - 1]
    }

    /// Stack `R_0..R_P` into a `(P+1)d x N` matrix.
    pub fn stack_r(&self) -> DMatrix<f64> {
        let mut stack = DMatrix::zeros((self.deg + 1) * self.d, self.n);
        for (p, rp) in self.r.iter().enumerate() {
            stack.view_mut((p * self.d, 0), (self.d, self.n)).copy_from(rp);
        }
        stack
    }

    pub fn w_norm(&self) -> f64 {
        self.w.iter().map(|m| fro(m).powi(2)).sum::<f64>().sqrt()
    }

    pub fn r_norm(&self) -> f64 {
        self.r.iter().map(|m| fro(m).powi(2)).sum::<f64>().sqrt()
    }

    /// The `Pd x (P+1)d` block-Toeplitz constraint matrix: block `(p, q)`
    /// for `p` in `1..=P`, `q` in `0..=P` holds `W_{P+p-q}`.
    pub fn assemble_toeplitz(&self) -> DMatrix<f64> {
        let (d, p_deg) = (self.d, self.deg);
        let mut t = DMatrix::zeros(p_deg * d, (p_deg + 1) * d);
        for p in 1..=p_deg {
            for q in 0..=p_deg {
                let k = p_deg + p - q;
                t.view_mut(((p - 1) * d, q * d), (d, d)).copy_from(self.w_block(k));
            }
        }
        t
    }

    /// The `(P+1)d` square unit lower-triangular mixer: identity blocks on
    /// the diagonal and `i W_{p-q}` below it.
    pub fn assemble_mixer(&self) -> DMatrix<Complex64> {
        let (d, p_deg) = (self.d, self.deg);
        let size = (p_deg + 1) * d;
        let mut m = DMatrix::from_diagonal_element(size, size, Complex64::new(1.0, 0.0));
        for p in 0..=p_deg {
            for q in 0..p {
                let wk = self.w_block(p - q);
                for i in 0..d {
                    for j in 0..d {
                        m[(p * d + i, q * d + j)] = Complex64::new(0.0, wk[(i, j)]);
                    }
                }
            }
        }
        m
    }

    /// Residual report against the variety's defining conditions.
    pub fn validate(&self, tol: &Tolerances) -> ValidationReport {
        let mut sym_residual = 0.0f64;
        for wk in &self.w {
            let res = fro(&(wk - wk.transpose())) / (fro(wk) + 1.0);
            sym_residual = sym_residual.max(res);
        }
        let toeplitz = self.assemble_toeplitz();
        let product = &toeplitz * self.stack_r();
        let cons_residual = fro(&product) / (self.w_norm() * self.r_norm() + 1.0);
        let r0_rank = numeric::rank(&self.r[0], tol.rank_tol);

        let canonical_ok = if self.canonical {
            self.r0_in_canonical_set(tol)
        } else {
            true
        };
        let pass = sym_residual <= tol.eps_sym
            && cons_residual <= tol.eps_cons
            && r0_rank == self.d
            && canonical_ok;
        ValidationReport {
            sym_residual,
            cons_residual,
            r0_rank,
            canonical_claimed: self.canonical,
            canonical_ok,
            pass,
        }
    }

    fn r0_in_canonical_set(&self, tol: &Tolerances) -> bool {
        let r0 = &self.r[0];
        let gram = r0 * r0.transpose();
        let scale = fro(r0).powi(2) + 1.0;
        for i in 0..self.d {
            for j in 0..self.d {
                if i != j && gram[(i, j)].abs() > tol.eps_orth * scale {
                    return false;
                }
            }
            // descending row norms are part of this crate's canonical
            // representative (spectral order of R_0 R_0^T)
            if i + 1 < self.d && gram[(i, i)] < gram[(i + 1, i + 1)] - tol.eps_orth * scale {
                return false;
            }
            let row: Vec<f64> = r0.row(i).iter().copied().collect();
            let thresh = 1e-12 * (fro(r0) + 1.0);
            if sign_of_leading_entry(&row, thresh) < 0.0 {
                return false;
            }
        }
        true
    }

    /// The spectral factor of this representation:
    /// `A_p = R_p + i * sum_{j=1..p} W_j R_{p-j}`.
    pub fn to_factor(&self, tol: &Tolerances) -> Result<PolyMatrix, HRepError> {
        let report = self.validate(tol);
        if !report.pass {
            return Err(HRepError::InvalidHRep(format!(
                "sym residual {:.3e}, constraint residual {:.3e}, rank(R_0) = {} (want {})",
                report.sym_residual, report.cons_residual, report.r0_rank, self.d
            )));
        }
        let mut coeffs = Vec::with_capacity(self.deg + 1);
        for p in 0..=self.deg {
            let mut imag = DMatrix::zeros(self.d, self.n);
            for j in 1..=p {
                imag += self.w_block(j) * &self.r[p - j];
            }
            let a = DMatrix::from_fn(self.d, self.n, |i, jj| {
                Complex64::new(self.r[p][(i, jj)], imag[(i, jj)])
            });
            coeffs.push(a);
        }
        Ok(PolyMatrix::new(coeffs).expect("coefficient shapes agree"))
    }

    /// Rotate by the unique real orthogonal `U` that puts `R_0` into the
    /// canonical set (orthogonal rows, descending norms, positive leading
    /// entries): `R'_p = U R_p`, `W'_k = U W_k U^T`.
    pub fn canonicalize(&self, tol: &Tolerances) -> Result<HRep, HRepError> {
        let r0 = &self.r[0];
        if numeric::rank(r0, tol.rank_tol) < self.d {
            return Err(HRepError::InvalidHRep("R_0 is rank deficient".into()));
        }
        let gram = r0 * r0.transpose();
        let (vals, vecs) = numeric::sym_eig(&gram, tol)?;
        for j in 0..self.d.saturating_sub(1) {
            let gap = vals[j] - vals[j + 1];
            let limit = tol.eps_gap * vals[0];
            if gap < limit {
                return Err(HRepError::DegenerateSpectrum { gap, limit });
            }
        }
        let mut u = vecs.transpose();
        let candidate = &u * r0;
        let thresh = 1e-12 * (fro(r0) + 1.0);
        for i in 0..self.d {
            let row: Vec<f64> = candidate.row(i).iter().copied().collect();
            if sign_of_leading_entry(&row, thresh) < 0.0 {
                for j in 0..self.d {
                    u[(i, j)] = -u[(i, j)];
                }
            }
        }
        let r = self.r.iter().map(|rp| &u * rp).collect();
        let w = self.w.iter().map(|wk| &u * wk * u.transpose()).collect();
        Ok(HRep {
            d: self.d,
            n: self.n,
            deg: self.deg,
            w,
            r,
            canonical: true,
            seed: self.seed,
        })
    }
}

/// Draw a representation point: symmetric Gaussian `W_k` (entry scale
/// `scale`), then `R` inside the nullspace of the assembled block-Toeplitz
/// matrix, rejecting draws until `rank(R_0) = d`.
pub fn sample(
    d: usize,
    n: usize,
    deg: usize,
    seed: u64,
    scale: f64,
    tol: &Tolerances,
) -> Result<HRep, HRepError> {
    if d < 1 || n < d || deg < 1 {
        return Err(HRepError::DimensionError { d, n, p: deg });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_diag = String::new();
    for _ in 0..tol.max_retries {
        let mut w = Vec::with_capacity(2 * deg);
        for _ in 0..2 * deg {
            let m = DMatrix::from_fn(d, d, |_, _| scale * rng.sample::<f64, _>(StandardNormal));
            w.push((&m + m.transpose()) * 0.5);
        }
        let mut h = HRep::new(d, n, deg, w, vec![DMatrix::zeros(d, n); deg + 1])?;
        let toeplitz = h.assemble_toeplitz();
        let basis = numeric::nullspace(&toeplitz, tol.rank_tol);
        let nullity = basis.ncols();
        if nullity < d {
            last_diag = format!("nullity {} below d = {}", nullity, d);
            continue;
        }
        let coeff = DMatrix::from_fn(nullity, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let stack = &basis * coeff;
        for p in 0..=deg {
            h.r[p] = stack.view((p * d, 0), (d, n)).clone_owned();
        }
        // full row rank with a healthy margin: near-singular R_0 draws are
        // legal but poison every downstream pseudo-inverse, so resample
        let sv = numeric::checked_svd(&h.r[0]).sv;
        if sv.min() <= 0.1 * sv.max() {
            last_diag = format!("R_0 condition number {:.3e}", sv.max() / sv.min().max(f64::MIN_POSITIVE));
            continue;
        }
        h.seed = Some(seed);
        let report = h.validate(tol);
        if report.pass {
            return Ok(h);
        }
        last_diag = format!(
            "validation failed: sym {:.3e}, constraint {:.3e}",
            report.sym_residual, report.cons_residual
        );
    }
    Err(HRepError::SamplingFailed {
        retries: tol.max_retries,
        diagnostic: last_diag,
    })
}

// JSON schema: {"d","N","P","W":[row-major d x d],"R":[row-major d x N],
// "canonical","seed"}. W_1 comes first in the list.
#[derive(Serialize, Deserialize)]
struct HRepJson {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "P")]
    p: usize,
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
    #[serde(rename = "R")]
    r: Vec<Vec<f64>>,
    canonical: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            v.push(m[(i, j)]);
        }
    }
    v
}

impl Serialize for HRep {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HRepJson {
            d: self.d,
            n: self.n,
            p: self.deg,
            w: self.w.iter().map(row_major).collect(),
            r: self.r.iter().map(row_major).collect(),
            canonical: self.canonical,
            seed: self.seed,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HRep {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = HRepJson::deserialize(de)?;
        let unflatten = |flat: &Vec<f64>, rows: usize, cols: usize| -> Result<DMatrix<f64>, D::Error> {
            if flat.len() != rows * cols {
                return Err(D::Error::custom(format!(
                    "expected {} entries, got {}",
                    rows * cols,
                    flat.len()
                )));
            }
            Ok(DMatrix::from_fn(rows, cols, |i, jj| flat[i * cols + jj]))
        };
        let w = j.w.iter().map(|f| unflatten(f, j.d, j.d)).collect::<Result<_, _>>()?;
        let r = j.r.iter().map(|f| unflatten(f, j.d, j.n)).collect::<Result<_, _>>()?;
        let mut h = HRep::new(j.d, j.n, j.p, w, r).map_err(D::Error::custom)?;
        h.canonical = j.canonical;
        h.seed = j.seed;
        Ok(h)
    }
}

/// The Gramian of the factor of a representation point, in one call.
pub fn gram_of(h: &HRep, tol: &Tolerances) -> Result<polymat::GramPoly, HRepError> {
    Ok(polymat::gram(&h.to_factor(tol)?))
}
