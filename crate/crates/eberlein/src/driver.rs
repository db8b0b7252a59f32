//! Outer iteration: alternate the unitary and shear stages over a cyclic
//! pivot ordering, accumulate the transformation, track convergence and
//! extract eigenpairs.
//!
//! Per pivot pair the step is: build the Hermitian pivot core of the
//! current iterate, diagonalize it (unitary stage), apply that rotation as
//! a similarity, run the shear pass (which returns the updated matrix),
//! then post-multiply the accumulated transformation by both cores. The
//! stop test compares the off-norm of the Hermitian part between
//! consecutive cycles. Matrices whose eigenvalues share real parts stall
//! with residual 2x2-or-larger couplings in the limit; scalar
//! preconditioning by a complex number with nonzero imaginary part
//! sidesteps that, and the eigenvalues are recovered by dividing back.

use crate::blockmat::{
    apply_elementary_similarity, c_operator, hermitian_part, off_norm, BlockPartition, Complex64,
    ComplexDenseMatrix, ElementaryBlockTransform, PivotPair,
};
use crate::error::{Error, Result};
use crate::pivot::PivotOrdering;
use crate::rng;
use crate::shear_stage::compute_shear_block;
use crate::unitary_stage::unitary_stage;

/// Knobs for one solve.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_cycles: usize,
    pub ordering: PivotOrdering,
    pub enforce_ubc: bool,
    pub inner_jacobi_tol: f64,
    pub inner_max_sweeps: usize,
    /// Inner shear passes per pivot pair; one matches the method, more
    /// buys extra norm reduction per step at extra cost.
    pub shear_sweeps: usize,
    /// Keep per-step records (and the Hermitian-drift diagnostic).
    pub record_trace: bool,
    pub precondition: bool,
    pub precondition_scalar: Option<Complex64>,
    /// Relative coupling threshold for detecting diagonal blocks in the limit.
    pub block_threshold: f64,
    /// Interpret `tolerance` absolutely instead of relative to the norm.
    pub absolute_tolerance: bool,
    /// Extract eigenpairs on return. Benchmarks that only time sweeps can
    /// turn this off; `eigenpairs` is then empty.
    pub extract_eigenpairs: bool,
    pub seed: u64,
}

impl SolveOptions {
    pub fn new(ordering: PivotOrdering) -> Self {
        SolveOptions {
            tolerance: 1e-10,
            max_cycles: 100,
            ordering,
            enforce_ubc: true,
            inner_jacobi_tol: 1e-14,
            inner_max_sweeps: 30,
            shear_sweeps: 1,
            record_trace: false,
            precondition: false,
            precondition_scalar: None,
            block_threshold: 1e-8,
            absolute_tolerance: false,
            extract_eigenpairs: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Off-norm test fired and the limit is diagonal.
    Converged,
    /// Off-norm test fired but residual couplings remain; expected when
    /// eigenvalue real parts repeat. Success with blocks, not a failure.
    Stalled,
    /// Cycle budget exhausted before the stop test fired.
    MaxCycles,
}

/// Per-cycle convergence metrics.
#[derive(Debug, Clone)]
pub struct CycleRecord {
    pub cycle: usize,
    pub off_a: f64,
    pub off_b: f64,
    pub norm_c: f64,
    pub frob_a: f64,
    pub cum_delta: f64,
}

/// Per-step record, kept when `record_trace` is on.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub cycle: usize,
    pub step: usize,
    pub pair: PivotPair,
    /// Squared-norm reduction of this step's shear stage.
    pub delta: f64,
    pub sum_c_sq: f64,
    pub sum_c_abs: f64,
    pub frob_after: f64,
    /// `||S - I||_F` of the accumulated shear core.
    pub shear_dev: f64,
    /// `||B_next - R* B R||_F^2` against its `(3/2) n^2 sum|c|` bound.
    pub herm_drift_sq: f64,
    pub herm_drift_bound: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ConvergenceLog {
    pub cycles: Vec<CycleRecord>,
    pub steps: Vec<StepRecord>,
    /// Steps where the Hermitian-drift diagnostic exceeded its bound.
    /// Logged, never fatal.
    pub hermitian_drift_violations: usize,
    pub max_shear_dev: f64,
    /// Shear stages whose core conditioning estimate exceeded 1e8.
    pub cond_warnings: usize,
    pub max_cond_estimate: f64,
}

/// One eigenvalue with its (unit) eigenvector and residual
/// `||A t - lambda t||_2` against the original input matrix.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
    pub residual: f64,
}

/// Everything a finished solve knows.
#[derive(Debug, Clone)]
pub struct EberleinResult {
    /// Final iterate of the working matrix (the preconditioned one when
    /// preconditioning was on).
    pub lambda: ComplexDenseMatrix,
    /// Accumulated transformation; column i approximates the eigenvector
    /// of eigenvalue i.
    pub t_accum: ComplexDenseMatrix,
    /// Inverse accumulated in lockstep, never by numerical inversion.
    pub t_accum_inv: ComplexDenseMatrix,
    pub log: ConvergenceLog,
    pub status: SolveStatus,
    pub cycles_run: usize,
    pub eigenpairs: Vec<Eigenpair>,
    /// Components whose recursive extraction failed; their eigenpairs are
    /// missing from `eigenpairs`.
    pub failed_components: Vec<Vec<usize>>,
    /// Diagonal of the final Hermitian part: real parts of the (working
    /// matrix's) eigenvalues.
    pub real_parts: Vec<f64>,
    /// Connected components of the residual coupling graph of `lambda`.
    pub block_structure: Vec<Vec<usize>>,
    /// Scalar the input was multiplied by, when preconditioning was on.
    pub precondition_scalar: Option<Complex64>,
}

/// Last finite iterate and log, attached to numerical failures.
#[derive(Debug)]
pub struct FailureContext {
    pub last_good: ComplexDenseMatrix,
    pub log: ConvergenceLog,
}

impl EberleinResult {
    /// `||T||_F ||T^{-1}||_F / n`, the conditioning estimate used by the
    /// similarity invariant.
    pub fn cond_estimate(&self) -> f64 {
        self.t_accum.frobenius_norm() * self.t_accum_inv.frobenius_norm() / self.lambda.dim() as f64
    }
}

/// Scales the matrix by a complex number with nonzero imaginary part so
/// that, generically, no two eigenvalues share a real part. A supplied `d`
/// is validated; otherwise one is drawn from the seed (both parts standard
/// normal, redrawn while nearly real).
pub fn precondition(
    a: &ComplexDenseMatrix,
    d: Option<Complex64>,
    seed: u64,
) -> Result<(ComplexDenseMatrix, Complex64)> {
    let d = match d {
        Some(d) => {
            if d.im == 0.0 {
                return Err(Error::invalid("preconditioning scalar needs Im(d) != 0"));
            }
            d
        }
        None => {
            let mut rng = rng::seeded(seed);
            loop {
                let cand = rng::complex_gaussian(&mut rng);
                if cand.im.abs() >= 0.1 * cand.norm() {
                    break cand;
                }
            }
        }
    };
    Ok((a.scale(d), d))
}

/// Hermitian pivot core of `(A + A*)/2` for blocks (p, q), built straight
/// from the pivot strips.
pub fn hermitian_pivot_core(
    a: &ComplexDenseMatrix,
    partition: &BlockPartition,
    p: usize,
    q: usize,
) -> ComplexDenseMatrix {
    let strip = partition.strip_indices(p, q);
    let c = strip.len();
    let mut core = ComplexDenseMatrix::zeros(c);
    for la in 0..c {
        core.set(la, la, Complex64::new(a.get(strip[la], strip[la]).re, 0.0));
        for lb in la + 1..c {
            let h = (a.get(strip[la], strip[lb]) + a.get(strip[lb], strip[la]).conj()) * 0.5;
            core.set(la, lb, h);
            core.set(lb, la, h.conj());
        }
    }
    core
}

/// Connected components of the coupling graph: edge (i, j) iff
/// `|lambda_ij|` or `|lambda_ji|` exceeds `threshold * ||lambda||_F`.
/// Singletons are settled eigenvalues; larger components are residual
/// blocks (they need not match the block partition of the sweep).
pub fn detect_block_structure(lambda: &ComplexDenseMatrix, threshold: f64) -> Vec<Vec<usize>> {
    let n = lambda.dim();
    let cut = threshold * lambda.frobenius_norm();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = i;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for i in 0..n {
        for j in i + 1..n {
            if lambda.get(i, j).norm() > cut || lambda.get(j, i).norm() > cut {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut components: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        components[root].push(i);
    }
    components.retain(|c| !c.is_empty());
    components.sort_by_key(|c| c[0]);
    components
}

fn eig_2x2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> [(Complex64, [Complex64; 2]); 2] {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    let half = Complex64::new(0.5, 0.0);
    let lam = [(tr + disc) * half, (tr - disc) * half];
    let scale = a.norm() + b.norm() + c.norm() + d.norm();
    let mut out = [(lam[0], [Complex64::new(0.0, 0.0); 2]); 2];
    for (slot, &l) in out.iter_mut().zip(&lam) {
        let v1 = [b, l - a];
        let v2 = [l - d, c];
        let n1 = v1[0].norm_sqr() + v1[1].norm_sqr();
        let n2 = v2[0].norm_sqr() + v2[1].norm_sqr();
        let v = if n1 >= n2 { v1 } else { v2 };
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        *slot = if norm > 1e-14 * scale.max(1.0) {
            (l, [v[0] / norm, v[1] / norm])
        } else {
            // effectively diagonal: fall back to the basis vector
            let e = if (l - a).norm() <= (l - d).norm() {
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
            } else {
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]
            };
            (l, e)
        };
    }
    out
}

fn normalize(v: &mut [Complex64]) {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in v.iter_mut() {
            *z /= norm;
        }
    }
}

fn residual(a: &ComplexDenseMatrix, value: Complex64, vector: &[Complex64]) -> f64 {
    let av = a.mul_vec(vector);
    av.iter()
        .zip(vector)
        .map(|(y, x)| (y - value * x).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Eigenpairs from a finished solve: singleton components read off the
/// diagonal, 2x2 components are solved in closed form, bigger components
/// recurse (preconditioned, unit partition, depth-capped at 2).
/// `precond` is the scalar the working matrix was multiplied by, if any;
/// residuals are always measured against `a_original`.
pub fn extract_eigenpairs(
    a_original: &ComplexDenseMatrix,
    lambda: &ComplexDenseMatrix,
    t_accum: &ComplexDenseMatrix,
    threshold: f64,
    precond: Option<Complex64>,
    seed: u64,
) -> (Vec<Eigenpair>, Vec<Vec<usize>>) {
    extract_impl(a_original, lambda, t_accum, threshold, precond, seed, 1e-10, 0)
}

#[allow(clippy::too_many_arguments)]
fn extract_impl(
    a_original: &ComplexDenseMatrix,
    lambda: &ComplexDenseMatrix,
    t_accum: &ComplexDenseMatrix,
    threshold: f64,
    precond: Option<Complex64>,
    seed: u64,
    inner_tolerance: f64,
    depth: usize,
) -> (Vec<Eigenpair>, Vec<Vec<usize>>) {
    let n = lambda.dim();
    let components = detect_block_structure(lambda, threshold);
    let divide = |z: Complex64| match precond {
        Some(d) => z / d,
        None => z,
    };
    let mut pairs = Vec::with_capacity(n);
    let mut failed = Vec::new();

    for component in components {
        match component.len() {
            1 => {
                let i = component[0];
                let value = divide(lambda.get(i, i));
                let mut vector = t_accum.column(i);
                normalize(&mut vector);
                let res = residual(a_original, value, &vector);
                pairs.push(Eigenpair { value, vector, residual: res });
            }
            2 => {
                let (i, j) = (component[0], component[1]);
                let solved = eig_2x2(
                    lambda.get(i, i),
                    lambda.get(i, j),
                    lambda.get(j, i),
                    lambda.get(j, j),
                );
                for (l, w) in solved {
                    let value = divide(l);
                    let ti = t_accum.column(i);
                    let tj = t_accum.column(j);
                    let mut vector: Vec<Complex64> = ti
                        .iter()
                        .zip(&tj)
                        .map(|(a, b)| w[0] * a + w[1] * b)
                        .collect();
                    normalize(&mut vector);
                    let res = residual(a_original, value, &vector);
                    pairs.push(Eigenpair { value, vector, residual: res });
                }
            }
            g => {
                if depth >= 2 {
                    failed.push(component);
                    continue;
                }
                let sub = lambda.submatrix(&component);
                let ordering = match PivotOrdering::row_cyclic(g) {
                    Ok(o) => o,
                    Err(_) => {
                        failed.push(component);
                        continue;
                    }
                };
                let mut opts = SolveOptions::new(ordering);
                opts.tolerance = inner_tolerance;
                opts.precondition = true;
                opts.seed = seed.wrapping_add(component[0] as u64 + 1);
                let part = BlockPartition::unit(g);
                match solve_inner(&sub, &part, &opts, depth + 1, &mut |_| {}) {
                    Ok(inner) => {
                        if !inner.failed_components.is_empty()
                            || inner.eigenpairs.len() != g
                        {
                            failed.push(component);
                            continue;
                        }
                        for inner_pair in inner.eigenpairs {
                            let value = divide(inner_pair.value);
                            let mut vector = vec![Complex64::new(0.0, 0.0); n];
                            for (t, &idx) in component.iter().enumerate() {
                                let col = t_accum.column(idx);
                                for (slot, entry) in vector.iter_mut().zip(&col) {
                                    *slot += inner_pair.vector[t] * entry;
                                }
                            }
                            normalize(&mut vector);
                            let res = residual(a_original, value, &vector);
                            pairs.push(Eigenpair { value, vector, residual: res });
                        }
                    }
                    Err(_) => failed.push(component),
                }
            }
        }
    }
    (pairs, failed)
}

/// `t[:, strip] <- t[:, strip] * core`.
fn update_block_columns(t: &mut ComplexDenseMatrix, strip: &[usize], core: &ComplexDenseMatrix) {
    let n = t.dim();
    let c = strip.len();
    let mut scratch = vec![Complex64::new(0.0, 0.0); c];
    for i in 0..n {
        for (b, slot) in scratch.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a_loc, &col) in strip.iter().enumerate() {
                acc += t.get(i, col) * core.get(a_loc, b);
            }
            *slot = acc;
        }
        for (b, &col) in strip.iter().enumerate() {
            t.set(i, col, scratch[b]);
        }
    }
}

/// `t[strip, :] <- core * t[strip, :]`.
fn update_block_rows(t: &mut ComplexDenseMatrix, strip: &[usize], core: &ComplexDenseMatrix) {
    let n = t.dim();
    let c = strip.len();
    let mut scratch = vec![Complex64::new(0.0, 0.0); c * n];
    for (a_loc, row_out) in scratch.chunks_mut(n).enumerate() {
        for (b_loc, &row) in strip.iter().enumerate() {
            let w = core.get(a_loc, b_loc);
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (dst, src) in row_out.iter_mut().zip(t.row(row)) {
                *dst += w * src;
            }
        }
    }
    for (a_loc, &row) in strip.iter().enumerate() {
        for j in 0..n {
            t.set(row, j, scratch[a_loc * n + j]);
        }
    }
}

/// Runs the block Eberlein iteration. See the module docs for the shape of
/// one step; `opts.ordering` fixes the pivot sequence of every cycle.
pub fn eberlein_solve(
    a: &ComplexDenseMatrix,
    partition: &BlockPartition,
    opts: &SolveOptions,
) -> Result<EberleinResult> {
    eberlein_solve_with_progress(a, partition, opts, |_| {})
}

/// Same as [`eberlein_solve`] with a per-cycle progress callback. The
/// callback sees each cycle record right after the cycle finishes and must
/// not assume it is called from any particular thread.
pub fn eberlein_solve_with_progress(
    a: &ComplexDenseMatrix,
    partition: &BlockPartition,
    opts: &SolveOptions,
    mut on_cycle: impl FnMut(&CycleRecord),
) -> Result<EberleinResult> {
    solve_inner(a, partition, opts, 0, &mut on_cycle)
}

fn solve_inner(
    a: &ComplexDenseMatrix,
    partition: &BlockPartition,
    opts: &SolveOptions,
    depth: usize,
    on_cycle: &mut dyn FnMut(&CycleRecord),
) -> Result<EberleinResult> {
    let n = partition.n();
    if a.dim() != n {
        return Err(Error::invalid(format!(
            "matrix dimension {} does not match partition dimension {n}",
            a.dim()
        )));
    }
    if opts.ordering.m() != partition.m() {
        return Err(Error::invalid(format!(
            "ordering is over {} blocks, partition has {}",
            opts.ordering.m(),
            partition.m()
        )));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if !a.is_finite() {
        return Err(Error::invalid("input matrix has non-finite entries"));
    }

    let (mut work, precond_scalar) = if opts.precondition {
        let (scaled, d) = precondition(a, opts.precondition_scalar, opts.seed)?;
        (scaled, Some(d))
    } else {
        (a.clone(), None)
    };
    let initial = work.clone();
    let scale = if opts.absolute_tolerance { 1.0 } else { initial.frobenius_norm().max(f64::MIN_POSITIVE) };

    let mut t_accum = ComplexDenseMatrix::identity(n);
    let mut t_accum_inv = ComplexDenseMatrix::identity(n);
    let mut log = ConvergenceLog::default();
    let mut cum_delta = 0.0;
    let mut prev_off_b = off_norm(&hermitian_part(&work));
    let mut stop_triggered = false;
    let mut cycles_run = 0;
    let mut snapshot = work.clone();

    for cycle in 0..opts.max_cycles {
        for (step, pair) in opts.ordering.pairs().iter().enumerate() {
            let (p, q) = (pair.p, pair.q);
            let split = (partition.size(p), partition.size(q));
            let strip = partition.strip_indices(p, q);

            let b_core = hermitian_pivot_core(&work, partition, p, q);
            let ustage = unitary_stage(
                &b_core,
                split,
                opts.inner_jacobi_tol,
                opts.inner_max_sweeps,
                opts.enforce_ubc,
            )?;
            let r_core = ustage.r_core;
            let r_core_adj = r_core.adjoint();
            let transform = ElementaryBlockTransform::new(partition, *pair, r_core.clone())?;
            work = apply_elementary_similarity(&work, &transform, &r_core_adj)?;

            let herm_tilde = if opts.record_trace {
                Some(hermitian_part(&work))
            } else {
                None
            };

            let shear = compute_shear_block(&work, partition, p, q, opts.shear_sweeps);
            work = shear.a_next;

            let core = r_core.mul(&shear.s_core);
            let core_inv = shear.s_core_inv.mul(&r_core_adj);
            update_block_columns(&mut t_accum, &strip, &core);
            update_block_rows(&mut t_accum_inv, &strip, &core_inv);

            cum_delta += shear.norm_reduction;
            let shear_dev = shear
                .s_core
                .sub(&ComplexDenseMatrix::identity(strip.len()))
                .frobenius_norm();
            log.max_shear_dev = log.max_shear_dev.max(shear_dev);
            log.max_cond_estimate = log.max_cond_estimate.max(shear.cond_estimate);
            if shear.cond_estimate > 1e8 {
                log.cond_warnings += 1;
            }

            if let Some(herm_tilde) = herm_tilde {
                let drift_sq = hermitian_part(&work).sub(&herm_tilde).frobenius_norm_sq();
                // first-power bound with 10x slack; violations are counted,
                // never fatal
                let bound = 1.5 * (n as f64).powi(2) * shear.sum_c_abs * 10.0;
                if drift_sq > bound {
                    log.hermitian_drift_violations += 1;
                }
                log.steps.push(StepRecord {
                    cycle,
                    step,
                    pair: *pair,
                    delta: shear.norm_reduction,
                    sum_c_sq: shear.sum_c_sq,
                    sum_c_abs: shear.sum_c_abs,
                    frob_after: work.frobenius_norm(),
                    shear_dev,
                    herm_drift_sq: drift_sq,
                    herm_drift_bound: bound,
                });
            }
        }
        cycles_run = cycle + 1;

        if !work.is_finite() {
            return Err(Error::NumericalFailure {
                cycle,
                message: "iterate left the finite range".into(),
                context: Some(Box::new(FailureContext { last_good: snapshot, log })),
            });
        }
        snapshot = work.clone();

        let b = hermitian_part(&work);
        let record = CycleRecord {
            cycle,
            off_a: off_norm(&work),
            off_b: off_norm(&b),
            norm_c: c_operator(&work).frobenius_norm(),
            frob_a: work.frobenius_norm(),
            cum_delta,
        };
        on_cycle(&record);
        let off_b = record.off_b;
        log.cycles.push(record);

        if (off_b - prev_off_b).abs() < opts.tolerance * scale {
            stop_triggered = true;
            break;
        }
        prev_off_b = off_b;
    }

    let lambda = work;
    let b_final = hermitian_part(&lambda);
    let real_parts: Vec<f64> = (0..n).map(|i| b_final.get(i, i).re).collect();
    let block_structure = detect_block_structure(&lambda, opts.block_threshold);
    let status = if !stop_triggered {
        SolveStatus::MaxCycles
    } else if block_structure.iter().all(|c| c.len() == 1) {
        SolveStatus::Converged
    } else {
        SolveStatus::Stalled
    };

    let (eigenpairs, failed_components) = if opts.extract_eigenpairs {
        // recursive sub-solves stop at a sane tolerance even when the
        // outer one was set absurdly tight
        extract_impl(
            a,
            &lambda,
            &t_accum,
            opts.block_threshold,
            precond_scalar,
            opts.seed,
            opts.tolerance.max(1e-14),
            depth,
        )
    } else {
        (Vec::new(), Vec::new())
    };

    let result = EberleinResult {
        lambda,
        t_accum,
        t_accum_inv,
        log,
        status,
        cycles_run,
        eigenpairs,
        failed_components,
        real_parts,
        block_structure,
        precondition_scalar: precond_scalar,
    };

    // similarity invariant, checked on every desk-scale solve in test builds
    #[cfg(debug_assertions)]
    if n <= 64 {
        let recon = result.t_accum_inv.mul(&initial).mul(&result.t_accum);
        let err = recon.sub(&result.lambda).frobenius_norm();
        let allowed = 1e-8 * initial.frobenius_norm().max(1.0) * result.cond_estimate().max(1.0);
        debug_assert!(
            err <= allowed,
            "similarity invariant violated: {err:e} > {allowed:e}"
        );
    }

    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{gen_test_matrix, random_unitary, TestMatrixKind, TestMatrixSpec};
    use crate::unitary_stage::diagonalize_hermitian_core;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn default_opts(m: usize) -> SolveOptions {
        SolveOptions::new(PivotOrdering::row_cyclic(m).unwrap())
    }

    #[test]
    fn diagonal_input_converges_in_one_cycle() {
        let mut a = ComplexDenseMatrix::zeros(6);
        for i in 0..6 {
            a.set(i, i, c(i as f64 - 2.5, 1.5 * i as f64));
        }
        let part = BlockPartition::new(vec![2, 2, 2]).unwrap();
        let result = eberlein_solve(&a, &part, &default_opts(3)).unwrap();
        assert_eq!(result.status, SolveStatus::Converged);
        assert_eq!(result.cycles_run, 1);
        assert_eq!(result.lambda, a);
        assert_eq!(result.log.max_shear_dev, 0.0);
        assert_eq!(result.eigenpairs.len(), 6);
    }

    #[test]
    fn hermitian_input_needs_no_shears_and_matches_jacobi() {
        let (g, _) = gen_test_matrix(&TestMatrixSpec::generated(TestMatrixKind::A1Random, 12, 31))
            .unwrap();
        let h = hermitian_part(&g);
        let part = BlockPartition::new(vec![4, 4, 4]).unwrap();
        let mut opts = default_opts(3);
        opts.max_cycles = 40;
        let result = eberlein_solve(&h, &part, &opts).unwrap();

        assert!(result.log.max_shear_dev <= 1e-12);
        assert!(off_norm(&result.lambda) <= 1e-8 * h.frobenius_norm());

        // independent route: plain Jacobi on the whole matrix
        let oracle = diagonalize_hermitian_core(&h, 1e-14, 60).unwrap();
        let mut got: Vec<f64> = result.lambda.diagonal().iter().map(|z| z.re).collect();
        let mut want = oracle.diag.clone();
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-8 * h.frobenius_norm());
        }
    }

    #[test]
    fn constructed_spectrum_is_recovered() {
        let n = 20;
        let (a, spectrum) =
            gen_test_matrix(&TestMatrixSpec::generated(TestMatrixKind::A0Normal, n, 7)).unwrap();
        let spectrum = spectrum.unwrap();
        let part = BlockPartition::new(vec![5, 5, 5, 5]).unwrap();
        let mut opts = default_opts(4);
        opts.max_cycles = 60;
        let result = eberlein_solve(&a, &part, &opts).unwrap();

        assert!(off_norm(&result.lambda) <= 1e-8 * a.frobenius_norm());
        assert_eq!(result.eigenpairs.len(), n);

        // greedy nearest pairing is fine for well separated random values
        let mut remaining = spectrum.clone();
        for pair in &result.eigenpairs {
            let (idx, dist) = remaining
                .iter()
                .enumerate()
                .map(|(i, s)| (i, (s - pair.value).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            assert!(dist <= 1e-7 * remaining[idx].norm().max(1.0), "distance {dist:e}");
            remaining.remove(idx);
        }
    }

    #[test]
    fn eigenvector_residuals_and_trace_invariants() {
        let n = 8;
        let (a, _) =
            gen_test_matrix(&TestMatrixSpec::generated(TestMatrixKind::A1Random, n, 3)).unwrap();
        let part = BlockPartition::new(vec![4, 4]).unwrap();
        let result = eberlein_solve(&a, &part, &default_opts(2)).unwrap();
        assert_eq!(result.status, SolveStatus::Converged);

        let norm = a.frobenius_norm();
        for pair in &result.eigenpairs {
            assert!(pair.residual <= 1e-6 * norm, "residual {:e}", pair.residual);
            let len: f64 = pair.vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            assert!((len - 1.0).abs() <= 1e-12);
        }

        let trace: Complex64 = a.diagonal().iter().sum();
        let sum: Complex64 = result.eigenpairs.iter().map(|p| p.value).sum();
        assert!((trace - sum).norm() <= 1e-9 * n as f64 * norm);

        let a_sq = a.mul(&a);
        let trace_sq: Complex64 = a_sq.diagonal().iter().sum();
        let sum_sq: Complex64 = result.eigenpairs.iter().map(|p| p.value * p.value).sum();
        assert!((trace_sq - sum_sq).norm() <= 1e-8 * n as f64 * norm * norm);
    }

    #[test]
    fn precondition_examples() {
        let (a, _) =
            gen_test_matrix(&TestMatrixSpec::generated(TestMatrixKind::A1Random, 4, 11)).unwrap();
        let (scaled, d) = precondition(&a, Some(c(0.0, 1.0)), 0).unwrap();
        assert_eq!(d, c(0.0, 1.0));
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(scaled.get(i, j), a.get(i, j) * c(0.0, 1.0));
            }
        }

        assert!(precondition(&a, Some(c(2.0, 0.0)), 0).is_err());

        let (_, d1) = precondition(&a, None, 42).unwrap();
        let (_, d2) = precondition(&a, None, 42).unwrap();
        assert_eq!(d1, d2);
        assert!(d1.im.abs() >= 0.1 * d1.norm());
    }

    #[test]
    fn preconditioned_solve_recovers_spectrum() {
        let (a, spectrum) =
            gen_test_matrix(&TestMatrixSpec::generated(TestMatrixKind::A0Normal, 6, 19)).unwrap();
        let spectrum = spectrum.unwrap();
        let part = BlockPartition::new(vec![3, 3]).unwrap();
        let mut opts = default_opts(2);
        opts.precondition = true;
        opts.seed = 5;
        let result = eberlein_solve(&a, &part, &opts).unwrap();
        assert!(result.precondition_scalar.is_some());

        let mut remaining = spectrum;
        for pair in &result.eigenpairs {
            let (idx, dist) = remaining
                .iter()
                .enumerate()
                .map(|(i, s)| (i, (s - pair.value).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            assert!(dist <= 1e-7 * remaining[idx].norm().max(1.0));
            remaining.remove(idx);
        }
    }

    #[test]
    fn block_structure_detection() {
        let mut lam = ComplexDenseMatrix::zeros(9);
        for i in 0..9 {
            lam.set(i, i, c(1.0 + i as f64, 0.0));
        }
        assert_eq!(detect_block_structure(&lam, 1e-8).len(), 9);

        lam.set(3, 7, c(2.0, 0.0));
        let components = detect_block_structure(&lam, 1e-8);
        assert!(components.contains(&vec![3, 7]));
        assert_eq!(components.len(), 8);
    }

    #[test]
    fn two_by_two_block_closed_form() {
        let (aa, b, cc) = (c(1.0, 0.5), c(2.0, 0.0), c(0.5, 0.0));
        let mut lam = ComplexDenseMatrix::zeros(2);
        lam.set(0, 0, aa);
        lam.set(0, 1, b);
        lam.set(1, 0, cc);
        lam.set(1, 1, aa);
        let t = ComplexDenseMatrix::identity(2);
        let (pairs, failed) = extract_eigenpairs(&lam, &lam, &t, 1e-8, None, 0);
        assert!(failed.is_empty());
        let root = (b * cc).sqrt();
        let mut got: Vec<Complex64> = pairs.iter().map(|p| p.value).collect();
        got.sort_by(|x, y| x.re.total_cmp(&y.re));
        let mut want = vec![aa - root, aa + root];
        want.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() <= 1e-12);
        }
        for p in &pairs {
            assert!(p.residual <= 1e-12);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let a = ComplexDenseMatrix::identity(5);
        let part = BlockPartition::new(vec![2, 2]).unwrap(); // dim 4 != 5
        assert!(eberlein_solve(&a, &part, &default_opts(2)).is_err());

        let part5 = BlockPartition::new(vec![2, 3]).unwrap();
        assert!(eberlein_solve(&a, &part5, &default_opts(3)).is_err()); // ordering m mismatch

        let mut opts = default_opts(2);
        opts.tolerance = 0.0;
        assert!(eberlein_solve(&a, &part5, &opts).is_err());
    }

    #[test]
    fn overflowing_iterates_report_numerical_failure() {
        let mut a = ComplexDenseMatrix::zeros(4);
        for i in 0..4 {
            for j in 0..4 {
                let v = if (i + j) % 2 == 0 { 1e307 } else { -8e306 };
                a.set(i, j, c(v, v / 3.0));
            }
        }
        let part = BlockPartition::new(vec![2, 2]).unwrap();
        match eberlein_solve(&a, &part, &default_opts(2)) {
            Err(Error::NumericalFailure { context, .. }) => {
                let ctx = context.expect("context attached");
                assert!(ctx.last_good.is_finite());
            }
            other => panic!("expected numerical failure, got {other:?}"),
        }
    }

    #[test]
    fn progress_callback_sees_every_cycle() {
        let (a, _) =
            gen_test_matrix(&TestMatrixSpec::generated(TestMatrixKind::A1Random, 6, 2)).unwrap();
        let part = BlockPartition::new(vec![3, 3]).unwrap();
        let mut seen = Vec::new();
        let result = eberlein_solve_with_progress(&a, &part, &default_opts(2), |rec| {
            seen.push(rec.cycle);
        })
        .unwrap();
        assert_eq!(seen.len(), result.cycles_run);
        assert_eq!(seen.last().copied(), Some(result.cycles_run - 1));
        assert_eq!(result.log.cycles.len(), result.cycles_run);
    }

    #[test]
    fn frobenius_norm_never_increases_across_cycles() {
        let (a, _) =
            gen_test_matrix(&TestMatrixSpec::generated(TestMatrixKind::A1Random, 10, 13)).unwrap();
        let part = BlockPartition::new(vec![5, 5]).unwrap();
        let result = eberlein_solve(&a, &part, &default_opts(2)).unwrap();
        let mut prev = a.frobenius_norm();
        for rec in &result.log.cycles {
            assert!(rec.frob_a <= prev + 1e-12 * a.frobenius_norm());
            prev = rec.frob_a;
        }
    }

    #[test]
    fn unitary_t_for_normal_input() {
        // normal input: shears are identities, so T stays unitary
        let (a, _) =
            gen_test_matrix(&TestMatrixSpec::generated(TestMatrixKind::A0Normal, 10, 3)).unwrap();
        let part = BlockPartition::new(vec![5, 5]).unwrap();
        let result = eberlein_solve(&a, &part, &default_opts(2)).unwrap();
        let defect = result
            .t_accum
            .adjoint()
            .mul(&result.t_accum)
            .sub(&ComplexDenseMatrix::identity(10))
            .frobenius_norm();
        assert!(defect <= 1e-10, "defect {defect:e}");
        // and the similarity holds tightly
        let recon = result.t_accum_inv.mul(&a).mul(&result.t_accum);
        assert!(recon.sub(&result.lambda).frobenius_norm() <= 1e-9 * a.frobenius_norm());
        let _ = random_unitary(2, 0);
    }
}
