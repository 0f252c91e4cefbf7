//! Polynomial matrices with complex coefficients on the real line, their
//! Gramian products, and realness/PSD diagnostics.
//!
//! A `PolyMatrix` stores `X(t) = sum_p A_p t^p` coefficient-wise; the
//! Hermitian transpose convention conjugates coefficients, never `t`, so
//! `X(t)^H = sum_p A_p^H t^p` and the Gramian `X(t)^H X(t)` is a polynomial
//! with Hermitian coefficients.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{self, fro_c};
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("polynomial matrix needs at least one coefficient")]
    Empty,
    #[error("coefficient {index} has shape {got_rows}x{got_cols}, expected {rows}x{cols}")]
    ShapeMismatch {
        index: usize,
        got_rows: usize,
        got_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("Gramian is not real: max imaginary magnitude {max_imag:.3e} exceeds {limit:.3e}")]
    NotReal { max_imag: f64, limit: f64 },
    #[error("serialized coefficient {index} has {got} entries, expected {expected}")]
    BadEntryCount { index: usize, got: usize, expected: usize },
}

/// Degree-P polynomial matrix as an ordered list of complex `d x N`
/// coefficients; index `p` holds `A_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMatrix {
    coeffs: Vec<DMatrix<Complex64>>,
}

impl PolyMatrix {
    pub fn new(coeffs: Vec<DMatrix<Complex64>>) -> Result<Self, PolyError> {
        check_shapes(&coeffs)?;
        Ok(PolyMatrix { coeffs })
    }

    pub fn from_real(coeffs: Vec<DMatrix<f64>>) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(numeric::to_complex).collect())
    }

    pub fn rows(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn cols(&self) -> usize {
        self.coeffs[0].ncols()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, p: usize) -> &DMatrix<Complex64> {
        &self.coeffs[p]
    }

    pub fn coeffs(&self) -> &[DMatrix<Complex64>] {
        &self.coeffs
    }

    pub fn real_parts(&self) -> Vec<DMatrix<f64>> {
        self.coeffs.iter().map(|a| a.map(|z| z.re)).collect()
    }

    pub fn imag_parts(&self) -> Vec<DMatrix<f64>> {
        self.coeffs.iter().map(|a| a.map(|z| z.im)).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|a| a.iter())
            .map(|z| z.im.abs())
            .fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|a| fro_c(a).powi(2)).sum::<f64>().sqrt()
    }

    /// Left-multiply every coefficient by a constant matrix.
    pub fn left_mul(&self, u: &DMatrix<Complex64>) -> PolyMatrix {
        PolyMatrix {
            coeffs: self.coeffs.iter().map(|a| u * a).collect(),
        }
    }

    /// Evaluate at a real point by Horner's scheme.
    pub fn eval(&self, t: f64) -> DMatrix<Complex64> {
        let mut acc = self.coeffs.last().unwrap().clone();
        for a in self.coeffs.iter().rev().skip(1) {
            acc = acc * Complex64::new(t, 0.0) + a;
        }
        acc
    }
}

fn check_shapes(coeffs: &[DMatrix<Complex64>]) -> Result<(), PolyError> {
    let first = coeffs.first().ok_or(PolyError::Empty)?;
    let (rows, cols) = (first.nrows(), first.ncols());
    for (index, c) in coeffs.iter().enumerate() {
        if c.nrows() != rows || c.ncols() != cols {
            return Err(PolyError::ShapeMismatch {
                index,
                got_rows: c.nrows(),
                got_cols: c.ncols(),
                rows,
                cols,
            });
        }
    }
    Ok(())
}

/// Gramian polynomial `G(t) = sum_k B_k t^k` with Hermitian `N x N`
/// coefficients, produced by [`gram`].
#[derive(Debug, Clone, PartialEq)]
pub struct GramPoly {
    coeffs: Vec<DMatrix<Complex64>>,
}

impl GramPoly {
    pub fn size(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> &DMatrix<Complex64> {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[DMatrix<Complex64>] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|b| fro_c(b).powi(2)).sum::<f64>().sqrt()
    }

    pub fn eval(&self, t: f64) -> DMatrix<Complex64> {
        let mut acc = self.coeffs.last().unwrap().clone();
        for b in self.coeffs.iter().rev().skip(1) {
            acc = acc * Complex64::new(t, 0.0) + b;
        }
        acc
    }

    /// Coefficient-wise distance to another Gramian, relative to the larger
    /// of the two norms plus one.
    pub fn relative_distance(&self, other: &GramPoly) -> f64 {
        let k = self.coeffs.len().max(other.coeffs.len());
        let mut diff = 0.0f64;
        for i in 0..k {
            let zero = DMatrix::zeros(self.size(), self.size());
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = other.coeffs.get(i).unwrap_or(&zero);
            diff += fro_c(&(a - b)).powi(2);
        }
        diff.sqrt() / (self.norm().max(other.norm()) + 1.0)
    }
}

/// Gramian of a polynomial matrix: `B_k = sum_p A_p^H A_{k-p}` over the
/// admissible `p`. Output degree is `2P`.
pub fn gram(x: &PolyMatrix) -> GramPoly {
    let deg = x.degree();
    let n = x.cols();
    let mut coeffs = Vec::with_capacity(2 * deg + 1);
    for k in 0..=2 * deg {
        let mut b = DMatrix::zeros(n, n);
        let lo = k.saturating_sub(deg);
        let hi = k.min(deg);
        for p in lo..=hi {
            b += x.coeff(p).adjoint() * x.coeff(k - p);
        }
        coeffs.push(b);
    }
    GramPoly { coeffs }
}

/// Realness check: true iff every coefficient's imaginary part is at most
/// `tol.eps_real` times the overall coefficient norm. The maximum imaginary
/// magnitude is reported either way.
pub fn is_real(g: &GramPoly, tol: &Tolerances) -> (bool, f64) {
    let max_imag = g
        .coeffs
        .iter()
        .flat_map(|b| b.iter())
        .map(|z| z.im.abs())
        .fold(0.0, f64::max);
    let limit = tol.eps_real * (g.norm() + 1.0);
    (max_imag <= limit, max_imag)
}

/// Default PSD sampling grid: 21 Chebyshev-spaced points on [-10, 10] plus
/// the endpoints.
pub fn default_psd_grid() -> Vec<f64> {
    let m = 21usize;
    let mut pts: Vec<f64> = (0..m)
        .map(|j| 10.0 * ((2 * j + 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos())
        .collect();
    pts.push(-10.0);
    pts.push(10.0);
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts
}

#[derive(Debug, Clone, Serialize)]
pub struct PsdProfile {
    pub min_eig: f64,
    pub max_rank: usize,
    pub rank_at_0: usize,
}

/// Sample-based PSD diagnostic of a real Gramian: smallest eigenvalue over
/// the grid, maximal rank over the grid, and the rank at `t = 0`. This is a
/// diagnostic, not a certificate.
pub fn psd_profile(g: &GramPoly, t_samples: &[f64], tol: &Tolerances) -> Result<PsdProfile, PolyError> {
    let (real, max_imag) = is_real(g, tol);
    if !real {
        return Err(PolyError::NotReal {
            max_imag,
            limit: tol.eps_real * (g.norm() + 1.0),
        });
    }
    let mut min_eig = f64::INFINITY;
    let mut max_rank = 0usize;
    for &t in t_samples {
        let m = g.eval(t).map(|z| z.re);
        let (vals, _) = crate::numeric::sym_eig(&m, tol).map_err(|_| PolyError::NotReal {
            max_imag,
            limit: tol.eps_real,
        })?;
        if let Some(last) = vals.iter().last() {
            min_eig = min_eig.min(*last);
        }
        max_rank = max_rank.max(crate::numeric::rank(&m, tol.rank_tol));
    }
    let at0 = g.coeff(0).map(|z| z.re);
    let rank_at_0 = crate::numeric::rank(&at0, tol.rank_tol);
    Ok(PsdProfile {
        min_eig,
        max_rank,
        rank_at_0,
    })
}

// JSON schema shared by PolyMatrix and GramPoly: row-major coefficient
// matrices split into real and imaginary parts.
#[derive(Serialize, Deserialize)]
struct PolyJson {
    rows: usize,
    cols: usize,
    degree: usize,
    coeffs_re: Vec<Vec<f64>>,
    coeffs_im: Vec<Vec<f64>>,
}

fn to_json(coeffs: &[DMatrix<Complex64>]) -> PolyJson {
    let rows = coeffs[0].nrows();
    let cols = coeffs[0].ncols();
    let row_major = |m: &DMatrix<Complex64>, im: bool| -> Vec<f64> {
        let mut v = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                v.push(if im { m[(i, j)].im } else { m[(i, j)].re });
            }
        }
        v
    };
    PolyJson {
        rows,
        cols,
        degree: coeffs.len() - 1,
        coeffs_re: coeffs.iter().map(|m| row_major(m, false)).collect(),
        coeffs_im: coeffs.iter().map(|m| row_major(m, true)).collect(),
    }
}

fn from_json(j: &PolyJson) -> Result<Vec<DMatrix<Complex64>>, PolyError> {
    if j.coeffs_re.is_empty() || j.coeffs_re.len() != j.degree + 1 || j.coeffs_im.len() != j.degree + 1 {
        return Err(PolyError::Empty);
    }
    let mut coeffs = Vec::with_capacity(j.degree + 1);
    for (index, (re, im)) in j.coeffs_re.iter().zip(&j.coeffs_im).enumerate() {
        let expected = j.rows * j.cols;
        if re.len() != expected || im.len() != expected {
            return Err(PolyError::BadEntryCount {
                index,
                got: re.len(),
                expected,
            });
        }
        let m = DMatrix::from_fn(j.rows, j.cols, |i, jj| {
            Complex64::new(re[i * j.cols + jj], im[i * j.cols + jj])
        });
        coeffs.push(m);
    }
    Ok(coeffs)
}

impl Serialize for PolyMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        to_json(&self.coeffs).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        let coeffs = from_json(&j).map_err(serde::de::Error::custom)?;
        PolyMatrix::new(coeffs).map_err(serde::de::Error::custom)
    }
}

impl Serialize for GramPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        to_json(&self.coeffs).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GramPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PolyJson::deserialize(d)?;
        let coeffs = from_json(&j).map_err(serde::de::Error::custom)?;
        check_shapes(&coeffs).map_err(serde::de::Error::custom)?;
        Ok(GramPoly { coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn tols() -> Tolerances {
        Tolerances::default()
    }

    /// The running d=1, P=1, N=2 instance: X(t) = [1 + (1+2i)t, 0].
    fn e1_factor() -> PolyMatrix {
        let a0 = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let a1 = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 2.0), Complex64::new(0.0, 0.0)]);
        PolyMatrix::new(vec![a0, a1]).unwrap()
    }

    #[test]
    fn eval_at_zero_is_leading_coefficient() {
        let x = e1_factor();
        let v = x.eval(0.0);
        assert_eq!(v[(0, 0)], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn eval_at_one_sums_coefficients() {
        let x = e1_factor();
        let v = x.eval(1.0);
        assert_eq!(v[(0, 0)], Complex64::new(2.0, 2.0));
    }

    #[test]
    fn eval_matches_naive_power_sum() {
        let x = e1_factor();
        let t = 0.73;
        let naive = x.coeff(0) + x.coeff(1) * Complex64::new(t, 0.0);
        let diff = x.eval(t) - naive;
        assert!(fro_c(&diff) < 1e-14);
    }

    #[test]
    fn gram_of_constant_real_factor() {
        let a0 = DMatrix::from_row_slice(1, 2, &[2.0, 1.0]);
        let x = PolyMatrix::from_real(vec![a0.clone()]).unwrap();
        let g = gram(&x);
        assert_eq!(g.degree(), 0);
        let expected = a0.transpose() * a0;
        let diff = g.coeff(0).map(|z| z.re) - expected;
        assert!(crate::numeric::fro(&diff) < 1e-14);
        assert_eq!(g.coeff(0).map(|z| z.im).amax(), 0.0);
    }

    #[test]
    fn gram_of_e1() {
        let g = gram(&e1_factor());
        assert_eq!(g.degree(), 2);
        // expanded by hand: (1 - 2i t)(conj coeff) convention gives
        // B_0 = 1, B_1 = 2, B_2 = |1+2i|^2 = 5 in the (1,1) slot
        assert!((g.coeff(0)[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((g.coeff(1)[(0, 0)] - Complex64::new(2.0, 0.0)).norm() < 1e-14);
        assert!((g.coeff(2)[(0, 0)] - Complex64::new(5.0, 0.0)).norm() < 1e-14);
        for k in 0..=2 {
            for (i, j) in [(0, 1), (1, 0), (1, 1)] {
                assert!(g.coeff(k)[(i, j)].norm() < 1e-14);
            }
        }
    }

    #[test]
    fn e1_gram_is_real() {
        let (real, max_imag) = is_real(&gram(&e1_factor()), &tols());
        assert!(real);
        assert!(max_imag < 1e-14);
    }

    #[test]
    fn non_real_gram_detected() {
        // X = [1 + i t, 1]: imag(B_1) has an entry at (2,1)
        let a0 = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        let a1 = DMatrix::from_row_slice(1, 2, &[Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
        let x = PolyMatrix::new(vec![a0, a1]).unwrap();
        let g = gram(&x);
        let (real, max_imag) = is_real(&g, &tols());
        assert!(!real);
        assert!(max_imag > 0.5);
        assert!(g.coeff(1)[(1, 0)].im.abs() > 0.5);
    }

    #[test]
    fn psd_profile_of_e1() {
        let g = gram(&e1_factor());
        let samples = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let p = psd_profile(&g, &samples, &tols()).unwrap();
        // 1 + 2t + 5t^2 has negative discriminant, so it stays positive
        assert!(p.min_eig >= -1e-12);
        assert_eq!(p.max_rank, 1);
        assert_eq!(p.rank_at_0, 1);
    }

    #[test]
    fn psd_profile_of_zero() {
        let x = PolyMatrix::from_real(vec![DMatrix::zeros(1, 2)]).unwrap();
        let p = psd_profile(&gram(&x), &default_psd_grid(), &tols()).unwrap();
        assert_eq!(p.max_rank, 0);
    }

    #[test]
    fn psd_profile_rejects_non_real() {
        let a0 = DMatrix::from_row_slice(1, 2, &[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        let a1 = DMatrix::from_row_slice(1, 2, &[Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)]);
        let x = PolyMatrix::new(vec![a0, a1]).unwrap();
        assert!(matches!(
            psd_profile(&gram(&x), &[0.0], &tols()),
            Err(PolyError::NotReal { .. })
        ));
    }

    #[test]
    fn json_round_trip_exact() {
        let x = e1_factor();
        let s = serde_json::to_string(&x).unwrap();
        let back: PolyMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(x, back);
    }

    #[test]
    fn shape_mismatch_rejected() {
        let a0 = DMatrix::zeros(1, 2);
        let a1 = DMatrix::zeros(2, 2);
        assert!(matches!(
            PolyMatrix::new(vec![a0, a1]),
            Err(PolyError::ShapeMismatch { .. })
        ));
    }
}
