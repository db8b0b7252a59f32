//! Unitary stage: diagonalize the pivot submatrix of the Hermitian part.
//!
//! Runs a cyclic complex Jacobi sweep over the core until its off-norm is
//! negligible, and optionally post-multiplies by a column permutation that
//! keeps the smallest singular value of the leading diagonal block bounded
//! away from zero (a UBC transformation).

use crate::blockmat::{off_norm, Complex64, ComplexDenseMatrix};
use crate::error::{Error, Result};

/// Complex Jacobi rotation angles. `phi` is the rotation angle, `alpha`
/// the phase of the annihilated entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationParams {
    pub phi: f64,
    pub alpha: f64,
}

impl RotationParams {
    /// The 2x2 unitary rotation with these angles.
    pub fn core_2x2(&self) -> ComplexDenseMatrix {
        let (s, c) = self.phi.sin_cos();
        let e = Complex64::from_polar(1.0, self.alpha);
        ComplexDenseMatrix::from_rows(&[
            vec![Complex64::new(c, 0.0), -e * s],
            vec![e.conj() * s, Complex64::new(c, 0.0)],
        ])
        .expect("finite entries")
    }
}

/// Output of the unitary stage for one pivot pair.
#[derive(Debug, Clone)]
pub struct UnitaryStageResult {
    /// Accumulated unitary core, `(n_p + n_q)`-dimensional.
    pub r_core: ComplexDenseMatrix,
    /// Diagonal of the rotated Hermitian core (its eigenvalues, unsorted).
    pub diag: Vec<f64>,
    /// Column permutation folded into `r_core`; identity when UBC is off.
    pub permutation: Vec<usize>,
    pub sweeps_used: usize,
}

/// Inner Jacobi failed to reach the target off-norm. Carries the best
/// iterate so callers can still inspect it.
#[derive(Debug)]
pub struct ConvergenceFailure {
    pub best: UnitaryStageResult,
    pub best_off: f64,
    pub target: f64,
}

impl From<ConvergenceFailure> for Error {
    fn from(f: ConvergenceFailure) -> Error {
        Error::ConvergenceFailure {
            best_off: f.best_off,
            target: f.target,
            sweeps: f.best.sweeps_used,
        }
    }
}

/// Rotation annihilating the off-diagonal entry of the Hermitian 2x2
/// matrix `[[b_pp, b_pq], [conj(b_pq), b_qq]]`.
///
/// `alpha = arg(b_pq)` and `tan(2 phi) = 2 |b_pq| / (b_pp - b_qq)`, with
/// `phi` restricted to `(-pi/4, pi/4]` so the cosine never drops below
/// `1/sqrt(2)`. Equal diagonal entries give `phi = pi/4`.
pub fn jacobi_rotation_2x2(b_pp: f64, b_pq: Complex64, b_qq: f64) -> RotationParams {
    if b_pq == Complex64::new(0.0, 0.0) {
        return RotationParams { phi: 0.0, alpha: 0.0 };
    }
    let alpha = b_pq.im.atan2(b_pq.re);
    let mut two_phi = (2.0 * b_pq.norm()).atan2(b_pp - b_qq);
    if two_phi > std::f64::consts::FRAC_PI_2 {
        two_phi -= std::f64::consts::PI;
    }
    let params = RotationParams { phi: 0.5 * two_phi, alpha };

    #[cfg(debug_assertions)]
    {
        let (s2, c2) = two_phi.sin_cos();
        let rotated_off = (b_pq.norm() * c2 - 0.5 * (b_pp - b_qq) * s2).abs();
        // non-finite input flows through; the driver reports it per cycle
        debug_assert!(
            !rotated_off.is_finite()
                || rotated_off <= 1e-14 * (b_pp.abs() + b_qq.abs() + 2.0 * b_pq.norm()),
            "rotation left off-diagonal {rotated_off:e}"
        );
    }
    params
}

/// Cyclic complex Jacobi on a Hermitian core.
///
/// Returns the accumulated rotation `r_core` with
/// `off(r_core* H r_core) <= tol * ||H||_F`. Diagonal entries are not
/// sorted: sorting would silently permute the eigenvector columns.
pub fn diagonalize_hermitian_core(
    h: &ComplexDenseMatrix,
    tol: f64,
    max_sweeps: usize,
) -> std::result::Result<UnitaryStageResult, ConvergenceFailure> {
    let d = h.dim();
    let h_norm = h.frobenius_norm();
    let target = tol * h_norm;
    let mut b = h.clone();
    let mut r = ComplexDenseMatrix::identity(d);
    let mut sweeps_used = 0;

    while off_norm(&b) > target {
        if sweeps_used == max_sweeps {
            let best_off = off_norm(&b);
            return Err(ConvergenceFailure {
                best: UnitaryStageResult {
                    r_core: r,
                    diag: (0..d).map(|i| b.get(i, i).re).collect(),
                    permutation: (0..d).collect(),
                    sweeps_used,
                },
                best_off,
                target,
            });
        }
        for p in 0..d.saturating_sub(1) {
            for q in p + 1..d {
                let b_pq = b.get(p, q);
                if b_pq == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let params = jacobi_rotation_2x2(b.get(p, p).re, b_pq, b.get(q, q).re);
                apply_rotation_similarity(&mut b, p, q, params);
                // The targeted entry is zero analytically.
                b.set(p, q, Complex64::new(0.0, 0.0));
                b.set(q, p, Complex64::new(0.0, 0.0));
                let bpp = b.get(p, p);
                let bqq = b.get(q, q);
                b.set(p, p, Complex64::new(bpp.re, 0.0));
                b.set(q, q, Complex64::new(bqq.re, 0.0));
                accumulate_rotation(&mut r, p, q, params);
            }
        }
        sweeps_used += 1;
    }

    Ok(UnitaryStageResult {
        diag: (0..d).map(|i| b.get(i, i).re).collect(),
        r_core: r,
        permutation: (0..d).collect(),
        sweeps_used,
    })
}

/// In-place `B <- R* B R` with the rotation acting on rows/columns (p, q).
fn apply_rotation_similarity(b: &mut ComplexDenseMatrix, p: usize, q: usize, params: RotationParams) {
    let d = b.dim();
    let (s, c) = params.phi.sin_cos();
    let e = Complex64::from_polar(1.0, params.alpha);
    for j in 0..d {
        let bpj = b.get(p, j);
        let bqj = b.get(q, j);
        b.set(p, j, bpj * c + bqj * (e * s));
        b.set(q, j, bqj * c - bpj * (e.conj() * s));
    }
    for i in 0..d {
        let bip = b.get(i, p);
        let biq = b.get(i, q);
        b.set(i, p, bip * c + biq * (e.conj() * s));
        b.set(i, q, biq * c - bip * (e * s));
    }
}

/// In-place `R <- R * rotation` (columns p and q only).
fn accumulate_rotation(r: &mut ComplexDenseMatrix, p: usize, q: usize, params: RotationParams) {
    let d = r.dim();
    let (s, c) = params.phi.sin_cos();
    let e = Complex64::from_polar(1.0, params.alpha);
    for i in 0..d {
        let rip = r.get(i, p);
        let riq = r.get(i, q);
        r.set(i, p, rip * c + riq * (e.conj() * s));
        r.set(i, q, riq * c - rip * (e * s));
    }
}

/// Smallest singular value, via the eigenvalues of `M* M`.
pub fn sigma_min(m: &ComplexDenseMatrix) -> f64 {
    let gram = m.adjoint().mul(m);
    let diag = match diagonalize_hermitian_core(&gram, 1e-13, 60) {
        Ok(res) => res.diag,
        Err(fail) => fail.best.diag,
    };
    diag.into_iter().fold(f64::INFINITY, f64::min).max(0.0).sqrt()
}

/// Column permutation improving the smallest singular value of the leading
/// `n_p x n_p` block of a unitary core.
///
/// Greedy volume selection: each leading position takes the remaining
/// column with the largest Gram-Schmidt residual against the columns
/// already chosen (restricted to the leading rows). The identity
/// permutation is kept when it already scores at least as well.
/// Returns `(u * P, perm)` with `perm[t]` the source column of position `t`.
pub fn ubc_permute(u: &ComplexDenseMatrix, split: (usize, usize)) -> (ComplexDenseMatrix, Vec<usize>) {
    let (n1, n2) = split;
    let n = u.dim();
    assert_eq!(n1 + n2, n, "split must sum to the core dimension");
    if n1 == 0 || n2 == 0 {
        return (u.clone(), (0..n).collect());
    }

    // Gram-Schmidt residuals of the leading-row slices of every column.
    let mut residuals: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n1).map(|i| u.get(i, j)).collect())
        .collect();
    let mut available: Vec<usize> = (0..n).collect();
    let mut chosen = Vec::with_capacity(n1);
    for _ in 0..n1 {
        // first index wins ties so the identity permutation survives
        let mut pos = 0;
        let mut best = f64::NEG_INFINITY;
        for (cand, &j) in available.iter().enumerate() {
            let norm: f64 = residuals[j].iter().map(|z| z.norm_sqr()).sum();
            if norm > best {
                best = norm;
                pos = cand;
            }
        }
        let j = available.remove(pos);
        chosen.push(j);
        let norm: f64 = residuals[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            let dir: Vec<Complex64> = residuals[j].iter().map(|z| z / norm).collect();
            for &k in &available {
                let proj: Complex64 = dir
                    .iter()
                    .zip(&residuals[k])
                    .map(|(d, r)| d.conj() * r)
                    .sum();
                for (rk, d) in residuals[k].iter_mut().zip(&dir) {
                    *rk -= proj * d;
                }
            }
        }
    }
    let mut greedy = chosen;
    greedy.extend(available);

    let identity: Vec<usize> = (0..n).collect();
    let score = |perm: &[usize]| sigma_min(&leading_block(u, n1, perm));
    let perm = if score(&greedy) > score(&identity) {
        greedy
    } else {
        identity
    };

    let mut permuted = ComplexDenseMatrix::zeros(n);
    for (t, &j) in perm.iter().enumerate() {
        for i in 0..n {
            permuted.set(i, t, u.get(i, j));
        }
    }
    (permuted, perm)
}

fn leading_block(u: &ComplexDenseMatrix, n1: usize, perm: &[usize]) -> ComplexDenseMatrix {
    let mut m = ComplexDenseMatrix::zeros(n1);
    for i in 0..n1 {
        for (t, &j) in perm.iter().take(n1).enumerate() {
            m.set(i, t, u.get(i, j));
        }
    }
    m
}

/// Full unitary stage for one pivot pair: diagonalize the Hermitian core,
/// then optionally fold in the UBC permutation.
pub fn unitary_stage(
    b_core: &ComplexDenseMatrix,
    split: (usize, usize),
    tol: f64,
    max_sweeps: usize,
    enforce_ubc: bool,
) -> Result<UnitaryStageResult> {
    let mut result = diagonalize_hermitian_core(b_core, tol, max_sweeps)?;
    if enforce_ubc {
        let (permuted, perm) = ubc_permute(&result.r_core, split);
        result.r_core = permuted;
        result.diag = perm.iter().map(|&j| result.diag[j]).collect();
        result.permutation = perm;
    }
    Ok(result)
}
