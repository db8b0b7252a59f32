//! Seed-deterministic test matrices.
//!
//! The `a0` family is normal with a known random spectrum, `a1` is a plain
//! complex Gaussian matrix, and `a2` is normal with one repeated eigenvalue
//! plus four repeated complex-conjugate pairs, so some eigenvalues share
//! real parts. All draws come from one ChaCha12 stream per spec/seed, in a
//! fixed order, so identical specs give bit-identical matrices.

use std::path::PathBuf;

use rand_chacha::ChaCha12Rng;

use crate::blockmat::{Complex64, ComplexDenseMatrix};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMatrixKind {
    A0Normal,
    A1Random,
    A2Repeated,
    FromFile,
}

/// What to generate (or load).
#[derive(Debug, Clone)]
pub struct TestMatrixSpec {
    pub kind: TestMatrixKind,
    pub n: usize,
    /// For `A2Repeated`: (m1, m2, m3, m4, m5) with `m1 + 2(m2+..+m5) = n`.
    pub multiplicities: Option<Vec<usize>>,
    pub seed: u64,
    pub file: Option<PathBuf>,
}

impl TestMatrixSpec {
    pub fn generated(kind: TestMatrixKind, n: usize, seed: u64) -> Self {
        TestMatrixSpec { kind, n, multiplicities: None, seed, file: None }
    }
}

/// Haar-ish random unitary: complex Gaussian matrix orthonormalized by
/// modified Gram-Schmidt with one reorthogonalization pass.
pub fn random_unitary(n: usize, seed: u64) -> ComplexDenseMatrix {
    let mut rng = rng::seeded(seed);
    unitary_from_stream(n, &mut rng)
}

fn unitary_from_stream(n: usize, rng: &mut ChaCha12Rng) -> ComplexDenseMatrix {
    let mut q = ComplexDenseMatrix::zeros(n);
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut v: Vec<Complex64> = (0..n).map(|_| rng::complex_gaussian(rng)).collect();
        // two Gram-Schmidt passes against the columns already fixed
        for _ in 0..2 {
            for col in &columns {
                let proj: Complex64 = col.iter().zip(&v).map(|(c, x)| c.conj() * x).sum();
                for (x, c) in v.iter_mut().zip(col) {
                    *x -= proj * c;
                }
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // a Gaussian column is dependent on the previous ones with
        // probability zero; redraw rather than divide by ~0
        if norm < 1e-8 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        columns.push(v);
        if columns.len() == n {
            break;
        }
    }
    for (j, col) in columns.iter().enumerate() {
        for (i, &value) in col.iter().enumerate() {
            q.set(i, j, value);
        }
    }
    q
}

/// `Q diag(spectrum) Q*`.
fn normal_from_spectrum(spectrum: &[Complex64], q: &ComplexDenseMatrix) -> ComplexDenseMatrix {
    let n = spectrum.len();
    let mut scaled = q.clone();
    for j in 0..n {
        for i in 0..n {
            scaled.set(i, j, scaled.get(i, j) * spectrum[j]);
        }
    }
    scaled.mul(&q.adjoint())
}

/// Generates the matrix described by `spec`; for the normal families the
/// constructed spectrum is returned alongside.
pub fn gen_test_matrix(spec: &TestMatrixSpec) -> Result<(ComplexDenseMatrix, Option<Vec<Complex64>>)> {
    match spec.kind {
        TestMatrixKind::A0Normal => {
            if spec.n == 0 {
                return Err(Error::invalid("dimension must be positive"));
            }
            let mut rng = rng::seeded(spec.seed);
            let spectrum: Vec<Complex64> =
                (0..spec.n).map(|_| rng::complex_gaussian(&mut rng)).collect();
            let q = unitary_from_stream(spec.n, &mut rng);
            Ok((normal_from_spectrum(&spectrum, &q), Some(spectrum)))
        }
        TestMatrixKind::A1Random => {
            if spec.n == 0 {
                return Err(Error::invalid("dimension must be positive"));
            }
            let mut rng = rng::seeded(spec.seed);
            let entries: Vec<Complex64> =
                (0..spec.n * spec.n).map(|_| rng::complex_gaussian(&mut rng)).collect();
            Ok((ComplexDenseMatrix::from_entries(spec.n, entries)?, None))
        }
        TestMatrixKind::A2Repeated => {
            let mult = spec
                .multiplicities
                .as_ref()
                .ok_or_else(|| Error::invalid("a2 needs multiplicities (m1,...,m5)"))?;
            if mult.len() != 5 {
                return Err(Error::invalid("a2 needs exactly five multiplicities"));
            }
            if mult.iter().any(|&m| m == 0) {
                return Err(Error::invalid("a2 multiplicities must be positive"));
            }
            let paired: usize = mult[1..].iter().sum();
            if mult[0] + 2 * paired != spec.n {
                return Err(Error::invalid(format!(
                    "multiplicities must satisfy m1 + 2(m2+..+m5) = n, got {} for n = {}",
                    mult[0] + 2 * paired,
                    spec.n
                )));
            }
            let mut rng = rng::seeded(spec.seed);
            let a1 = rng::complex_gaussian(&mut rng);
            let heads: Vec<Complex64> = (0..4).map(|_| rng::complex_gaussian(&mut rng)).collect();
            let mut spectrum = Vec::with_capacity(spec.n);
            spectrum.extend(std::iter::repeat(a1).take(mult[0]));
            for (value, &count) in heads.iter().zip(&mult[1..]) {
                spectrum.extend(std::iter::repeat(*value).take(count));
            }
            for (value, &count) in heads.iter().zip(&mult[1..]) {
                spectrum.extend(std::iter::repeat(value.conj()).take(count));
            }
            let q = unitary_from_stream(spec.n, &mut rng);
            Ok((normal_from_spectrum(&spectrum, &q), Some(spectrum)))
        }
        TestMatrixKind::FromFile => {
            let path = spec
                .file
                .as_ref()
                .ok_or_else(|| Error::invalid("from_file spec needs a path"))?;
            Ok((super::read_matrix_market(path)?, None))
        }
    }
}
