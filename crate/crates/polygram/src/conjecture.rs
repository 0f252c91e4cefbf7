//! Numerical evidence engine for the rank-deficiency conjecture: local
//! chart dimensions of the representation variety at sampled points, and
//! finite-difference Jacobian ranks of the Gramian-coefficient map, compared
//! between the generic stratum (W != 0) and the real stratum (W = 0).
//!
//! The closed-form counts `dim_C = P d (d+1) + d N - d(d-1)/2` and
//! `dim_R = (P+1) d N - d(d-1)/2` are hypotheses the scan tests, not inputs
//! it assumes: every reported number comes from an explicit linear system or
//! a differenced Jacobian.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hrep::{self, HRep, HRepError};
use crate::numeric;
use crate::tol::Tolerances;

#[derive(Debug, Error)]
pub enum ConjectureError {
    #[error("invalid scan config: {0}")]
    InvalidConfig(String),
    #[error("Jacobian rank unstable across step halving: {rank_full} at full step, {rank_half} at half step")]
    RankUnstable { rank_full: usize, rank_half: usize },
    #[error("no scan row completed")]
    NoRows,
    #[error(transparent)]
    HRep(#[from] HRepError),
}

/// One (d, P, N) triple of the scan grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridPoint {
    pub d: usize,
    #[serde(rename = "P")]
    pub p: usize,
    #[serde(rename = "N")]
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanConfig {
    pub grid: Vec<GridPoint>,
    pub trials: usize,
    pub seed: u64,
    pub fd_step: f64,
    pub rank_tol: f64,
    pub scale: f64,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), ConjectureError> {
        if self.grid.is_empty() {
            return Err(ConjectureError::InvalidConfig("empty grid".into()));
        }
        if self.trials < 1 {
            return Err(ConjectureError::InvalidConfig("trials must be >= 1".into()));
        }
        if !(self.fd_step > 0.0) {
            return Err(ConjectureError::InvalidConfig("fd_step must be positive".into()));
        }
        for g in &self.grid {
            if g.d < 1 || g.n < g.d || g.p < 1 {
                return Err(ConjectureError::InvalidConfig(format!(
                    "bad triple d={}, P={}, N={}",
                    g.d, g.p, g.n
                )));
            }
        }
        Ok(())
    }
}

/// One scan result row. `margin = image_rank_R - image_rank_C` is the
/// conjecture-consistent quantity: positive means the real stratum fills
/// more Gramian directions than the complex-only one.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub d: usize,
    pub p: usize,
    pub n: usize,
    pub trials: usize,
    pub chart_dim_c: usize,
    pub image_rank_c: usize,
    pub chart_dim_r: usize,
    pub image_rank_r: usize,
    pub margin: i64,
    pub agreement: usize,
    pub flags: String,
}

/// Orthonormal basis of the gauge-fixed tangent space at a canonical point,
/// as columns in the flattened (W, R) parameter space.
#[derive(Debug, Clone)]
pub struct TangentBasis {
    pub basis: DMatrix<f64>,
    sym_pairs: Vec<(usize, usize)>,
    d: usize,
    n: usize,
    deg: usize,
}

impl TangentBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Split one flattened direction back into (delta W, delta R) blocks.
    pub fn unflatten(&self, v: &nalgebra::DVectorView<f64>) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
        let (d, n, deg) = (self.d, self.n, self.deg);
        let s = self.sym_pairs.len();
        let mut dw = Vec::with_capacity(2 * deg);
        for k in 0..2 * deg {
            let mut m = DMatrix::zeros(d, d);
            for (idx, &(u, vv)) in self.sym_pairs.iter().enumerate() {
                let val = v[k * s + idx];
                m[(u, vv)] = val;
                m[(vv, u)] = val;
            }
            dw.push(m);
        }
        let base = 2 * deg * s;
        let mut dr = Vec::with_capacity(deg + 1);
        for p in 0..=deg {
            let m = DMatrix::from_fn(d, n, |i, j| v[base + p * d * n + i * n + j]);
            dr.push(m);
        }
        (dw, dr)
    }
}

fn sym_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(d * (d + 1) / 2);
    for u in 0..d {
        for v in u..d {
            pairs.push((u, v));
        }
    }
    pairs
}

/// Tangent space of the variety at `h`, gauge-fixed: directions
/// `(dW_1..dW_2P symmetric, dR_0..dR_P)` with `dW R + W dR = 0` block row by
/// block row, and `R_0 dR_0^T + dR_0 R_0^T` kept diagonal so the row
/// orthogonality of the canonical `R_0` is preserved at first order.
pub fn tangent_basis(h: &HRep, tol: &Tolerances) -> Result<TangentBasis, ConjectureError> {
    let report = h.validate(tol);
    if !report.pass {
        return Err(HRepError::InvalidHRep(format!(
            "tangent space needs a valid point (constraint residual {:.3e})",
            report.cons_residual
        ))
        .into());
    }
    let (d, n, deg) = (h.d, h.n, h.deg);
    let pairs = sym_pairs(d);
    let s = pairs.len();
    let n_params = 2 * deg * s + (deg + 1) * d * n;
    let n_rows = deg * d * n + d * (d - 1) / 2;
    let mut m = DMatrix::zeros(n_rows, n_params);

    // linearized block-Toeplitz constraint
    let mut row = 0usize;
    for p in 1..=deg {
        for a in 0..d {
            for b in 0..n {
                for q in 0..=deg {
                    let k = deg + p - q; // block W_{P+p-q}
                    let wk = h.w_block(k);
                    // dR_q contribution: W_k[a, c] * dR_q[c, b]
                    for c in 0..d {
                        let col = 2 * deg * s + q * d * n + c * n + b;
                        m[(row, col)] += wk[(a, c)];
                    }
                    // dW_k contribution: dW_k[a, c] * R_q[c, b]
                    for (idx, &(u, v)) in pairs.iter().enumerate() {
                        let col = (k - 1) * s + idx;
                        if a == u {
                            m[(row, col)] += h.r[q][(v, b)];
                        }
                        if a == v && u != v {
                            m[(row, col)] += h.r[q][(u, b)];
                        }
                    }
                }
                row += 1;
            }
        }
    }
    // gauge: off-diagonal of R_0 dR_0^T + dR_0 R_0^T stays zero
    for u in 0..d {
        for v in (u + 1)..d {
            for b in 0..n {
                let col_v = 2 * deg * s + v * n + b;
                let col_u = 2 * deg * s + u * n + b;
                m[(row, col_v)] += h.r[0][(u, b)];
                m[(row, col_u)] += h.r[0][(v, b)];
            }
            row += 1;
        }
    }
    debug_assert_eq!(row, n_rows);

    let basis = numeric::nullspace(&m, tol.rank_tol);
    Ok(TangentBasis {
        basis,
        sym_pairs: pairs,
        d,
        n,
        deg,
    })
}

/// Evaluate the real parts of the Gramian coefficients of the factor of a
/// (possibly off-variety) (W, R) point, flattened to the upper triangles.
/// Stepping off the variety is fine at first order: the factor comes from
/// the mixer product directly and never requires `W R = 0`.
fn gram_coords(d: usize, n: usize, deg: usize, w: &[DMatrix<f64>], r: &[DMatrix<f64>]) -> Vec<f64> {
    // A_p = R_p + i sum_{j=1..p} W_j R_{p-j}
    let mut re = Vec::with_capacity(deg + 1);
    let mut im = Vec::with_capacity(deg + 1);
    for p in 0..=deg {
        re.push(r[p].clone());
        let mut q = DMatrix::zeros(d, n);
        for j in 1..=p {
            q += &w[j - 1] * &r[p - j];
        }
        im.push(q);
    }
    // real(B_k) = sum_p (Re_p^T Re_{k-p} + Im_p^T Im_{k-p})
    let mut out = Vec::with_capacity((2 * deg + 1) * n * (n + 1) / 2);
    for k in 0..=2 * deg {
        let mut b = DMatrix::zeros(n, n);
        let lo = k.saturating_sub(deg);
        let hi = k.min(deg);
        for p in lo..=hi {
            b += re[p].transpose() * &re[k - p] + im[p].transpose() * &im[k - p];
        }
        for i in 0..n {
            for j in i..n {
                out.push(b[(i, j)]);
            }
        }
    }
    out
}

/// Rank of the differential of the Gramian-coefficient map along the given
/// tangent basis, by central finite differences with a relative step.
pub fn gram_map_rank(h: &HRep, basis: &TangentBasis, fd_step: f64, rank_tol: f64) -> usize {
    let dim = basis.dim();
    let ambient = (2 * h.deg + 1) * h.n * (h.n + 1) / 2;
    let point_norm = (h.w_norm().powi(2) + h.r_norm().powi(2)).sqrt();
    let step = fd_step * (1.0 + point_norm);
    let mut jac = DMatrix::zeros(ambient, dim);
    for col in 0..dim {
        let (dw, dr) = basis.unflatten(&basis.basis.column(col));
        let eval = |sign: f64| -> Vec<f64> {
            let w: Vec<DMatrix<f64>> = h
                .w
                .iter()
                .zip(&dw)
                .map(|(wk, dwk)| wk + dwk * (sign * step))
                .collect();
            let r: Vec<DMatrix<f64>> = h
                .r
                .iter()
                .zip(&dr)
                .map(|(rp, drp)| rp + drp * (sign * step))
                .collect();
            gram_coords(h.d, h.n, h.deg, &w, &r)
        };
        let plus = eval(1.0);
        let minus = eval(-1.0);
        for (i, (p, m)) in plus.iter().zip(&minus).enumerate() {
            jac[(i, col)] = (p - m) / (2.0 * step);
        }
    }
    numeric::rank(&jac, rank_tol)
}

/// Like [`gram_map_rank`], but re-run at half the step and rejected when the
/// two ranks disagree; an unstable rank is reported, never guessed.
pub fn gram_map_rank_checked(
    h: &HRep,
    basis: &TangentBasis,
    fd_step: f64,
    rank_tol: f64,
) -> Result<usize, ConjectureError> {
    let rank_full = gram_map_rank(h, basis, fd_step, rank_tol);
    let rank_half = gram_map_rank(h, basis, fd_step / 2.0, rank_tol);
    if rank_full != rank_half {
        return Err(ConjectureError::RankUnstable { rank_full, rank_half });
    }
    Ok(rank_full)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct TrialResult {
    chart_dim_c: usize,
    image_rank_c: usize,
    chart_dim_r: usize,
    image_rank_r: usize,
}

// Per-trial seeds derive from the scan seed by a flat counter over
// (triple index, trial index), so trials stay reproducible however the
// scan is executed.
fn trial_seed(base: u64, triple_index: usize, trials: usize, trial: usize) -> u64 {
    base.wrapping_add((triple_index * trials + trial) as u64)
}

fn run_trial(
    g: &GridPoint,
    seed: u64,
    cfg: &ScanConfig,
    tol: &Tolerances,
    flags: &mut Vec<String>,
) -> Option<TrialResult> {
    // a handful of deterministic re-seeds absorbs rare degenerate samples
    for attempt in 0..4u64 {
        let s = seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9));
        let res = (|| -> Result<TrialResult, ConjectureError> {
            let h_c = hrep::sample(g.d, g.n, g.p, s, cfg.scale, tol)?.canonicalize(tol)?;
            let basis_c = tangent_basis(&h_c, tol)?;
            let image_rank_c = gram_map_rank_checked(&h_c, &basis_c, cfg.fd_step, cfg.rank_tol)?;
            let h_r = hrep::sample(g.d, g.n, g.p, s, 0.0, tol)?.canonicalize(tol)?;
            let basis_r = tangent_basis(&h_r, tol)?;
            let image_rank_r = gram_map_rank_checked(&h_r, &basis_r, cfg.fd_step, cfg.rank_tol)?;
            Ok(TrialResult {
                chart_dim_c: basis_c.dim(),
                image_rank_c,
                chart_dim_r: basis_r.dim(),
                image_rank_r,
            })
        })();
        match res {
            Ok(t) => return Some(t),
            Err(ConjectureError::RankUnstable { .. }) => {
                if !flags.contains(&"fd_unstable".to_string()) {
                    flags.push("fd_unstable".into());
                }
            }
            Err(_) => {
                if !flags.contains(&"trial_error".to_string()) {
                    flags.push("trial_error".into());
                }
            }
        }
    }
    None
}

/// Run the scan: for each grid triple, `trials` independent seeded trials;
/// the modal result per triple becomes the row, with the agreement count
/// and any per-trial flags. Rows come back sorted by (d, P, N).
pub fn scan(cfg: &ScanConfig, tol: &Tolerances) -> Result<Vec<ScanRow>, ConjectureError> {
    cfg.validate()?;
    let mut grid = cfg.grid.clone();
    grid.sort();
    grid.dedup();
    let mut rows = Vec::with_capacity(grid.len());
    for (ti, g) in grid.iter().enumerate() {
        let mut flags: Vec<String> = Vec::new();
        let mut results: Vec<TrialResult> = Vec::new();
        for trial in 0..cfg.trials {
            let s = trial_seed(cfg.seed, ti, cfg.trials, trial);
            if let Some(t) = run_trial(g, s, cfg, tol, &mut flags) {
                results.push(t);
            }
        }
        if results.is_empty() {
            flags.push("no_successful_trial".into());
            rows.push(ScanRow {
                d: g.d,
                p: g.p,
                n: g.n,
                trials: cfg.trials,
                chart_dim_c: 0,
                image_rank_c: 0,
                chart_dim_r: 0,
                image_rank_r: 0,
                margin: 0,
                agreement: 0,
                flags: flags.join(";"),
            });
            continue;
        }
        // modal result; ties broken by the smaller tuple for determinism
        let mut counts: std::collections::BTreeMap<(usize, usize, usize, usize), usize> =
            std::collections::BTreeMap::new();
        for t in &results {
            *counts
                .entry((t.chart_dim_c, t.image_rank_c, t.chart_dim_r, t.image_rank_r))
                .or_insert(0) += 1;
        }
        let (&mode, &agreement) = counts.iter().max_by_key(|(k, &v)| (v, std::cmp::Reverse(*k))).unwrap();
        if agreement < results.len() {
            flags.push("disagreement".into());
        }
        rows.push(ScanRow {
            d: g.d,
            p: g.p,
            n: g.n,
            trials: cfg.trials,
            chart_dim_c: mode.0,
            image_rank_c: mode.1,
            chart_dim_r: mode.2,
            image_rank_r: mode.3,
            margin: mode.3 as i64 - mode.1 as i64,
            agreement,
            flags: flags.join(";"),
        });
    }
    if rows.iter().all(|r| r.agreement == 0) {
        return Err(ConjectureError::NoRows);
    }
    Ok(rows)
}

/// Emit rows as CSV with the fixed header.
pub fn write_csv<W: std::io::Write>(rows: &[ScanRow], out: W) -> std::io::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record([
        "d",
        "P",
        "N",
        "trials",
        "chart_dim_C",
        "image_rank_C",
        "chart_dim_R",
        "image_rank_R",
        "margin",
        "agreement",
        "flags",
    ])?;
    for r in rows {
        wtr.write_record([
            r.d.to_string(),
            r.p.to_string(),
            r.n.to_string(),
            r.trials.to_string(),
            r.chart_dim_c.to_string(),
            r.image_rank_c.to_string(),
            r.chart_dim_r.to_string(),
            r.image_rank_r.to_string(),
            r.margin.to_string(),
            r.agreement.to_string(),
            r.flags.clone(),
        ])?;
    }
    wtr.flush()
}

/// Default scan grid used by the CLI: d = 1, P = 1, N in 2..=4.
pub fn default_grid() -> Vec<GridPoint> {
    (2..=4).map(|n| GridPoint { d: 1, p: 1, n }).collect()
}
