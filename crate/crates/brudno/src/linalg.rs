//! Shared dense Hermitian linear algebra: spectra with deterministic
//! ordering, trace norms, and random test states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest dense dimension the eigensolver fallback accepts (2^11).
pub const DENSE_EIGEN_CAP: usize = 2048;

/// How an eigenbasis is stored alongside sorted eigenvalues.
#[derive(Debug, Clone)]
pub enum EigenBasis {
    /// Eigenvector of sorted index `i` is the standard basis vector
    /// `perm[i]` — the matrix was diagonal in the computational basis.
    Standard { perm: Vec<usize> },
    /// Column `i` holds the full eigenvector of sorted index `i`.
    Dense { vectors: DMatrix<Complex64> },
}

/// Sorted spectral data of a Hermitian matrix.
///
/// Eigenvalues are descending; ties are broken deterministically by the
/// lexicographic order of the phase-fixed eigenvector coefficients (first
/// nonzero coefficient made real positive, complex entries compared by
/// `(re, im)`, larger vector first). For diagonal matrices that reduces to
/// ascending basis index among ties.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub basis: EigenBasis,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `⟨e_j | v_i⟩` column access without materializing standard bases.
    pub fn eigenvector(&self, sorted_index: usize) -> Vec<Complex64> {
        match &self.basis {
            EigenBasis::Standard { perm } => {
                let mut v = vec![Complex64::new(0.0, 0.0); self.values.len()];
                v[perm[sorted_index]] = Complex64::new(1.0, 0.0);
                v
            }
            EigenBasis::Dense { vectors } => vectors.column(sorted_index).iter().copied().collect(),
        }
    }

    /// For standard-basis spectra, the computational index of the sorted
    /// eigenvector; `None` when the basis is dense.
    pub fn standard_index(&self, sorted_index: usize) -> Option<usize> {
        match &self.basis {
            EigenBasis::Standard { perm } => Some(perm[sorted_index]),
            EigenBasis::Dense { .. } => None,
        }
    }
}

/// Is the matrix exactly diagonal (all off-diagonal entries identically 0)?
pub fn is_exactly_diagonal(m: &DMatrix<Complex64>) -> bool {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// Hermiticity defect `max |m − m†|` entrywise.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

pub fn require_hermitian(m: &DMatrix<Complex64>, tol: f64, label: &str) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidState(format!("{label}: matrix not square")));
    }
    let defect = hermiticity_defect(m);
    if defect > tol {
        return Err(Error::InvalidState(format!(
            "{label}: Hermiticity defect {defect:.3e} exceeds {tol:.1e}"
        )));
    }
    Ok(())
}

pub fn trace_re(m: &DMatrix<Complex64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

/// `Tr(a · b)` for Hermitian a, b — real up to roundoff.
pub fn trace_product_re(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    debug_assert_eq!(a.nrows(), b.nrows());
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc.re
}

/// Trace norm `Σ |λ_i|` of a Hermitian matrix.
pub fn trace_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    require_hermitian(m, 1e-9, "trace_norm")?;
    Ok(hermitian_eigenvalues(m)?.iter().map(|v| v.abs()).sum())
}

/// Eigenvalues only (unsorted order from the solver), for Hermitian input.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidState("eigenvalues: matrix not square".into()));
    }
    if is_exactly_diagonal(m) {
        return Ok((0..m.nrows()).map(|i| m[(i, i)].re).collect());
    }
    if m.nrows() > DENSE_EIGEN_CAP {
        return Err(Error::ResourceLimit {
            what: "dense eigensolve dimension",
            requested: m.nrows() as u64,
            cap: DENSE_EIGEN_CAP as u64,
        });
    }
    Ok(m.clone().symmetric_eigenvalues().iter().copied().collect())
}

/// Smallest eigenvalue of a Hermitian matrix, the workhorse behind
/// positivity and dominance checks.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// A certified lower bound on the smallest eigenvalue usable for
/// positivity checks at any dimension: exact for diagonal matrices and for
/// dense ones within the eigensolver cap, otherwise the Gershgorin bound
/// `min_i (Re a_ii − Σ_{j≠i} |a_ij|)` — which is only returned when it is
/// conclusive for positivity (≥ −tol); inconclusive cases are a resource
/// limit, not a silent pass.
pub fn certified_min_eigenvalue(m: &DMatrix<Complex64>, tol: f64) -> Result<f64> {
    if is_exactly_diagonal(m) || m.nrows() <= DENSE_EIGEN_CAP {
        return min_eigenvalue(m);
    }
    let mut lower = f64::INFINITY;
    for i in 0..m.nrows() {
        let mut radius = 0.0;
        for j in 0..m.ncols() {
            if i != j {
                radius += m[(i, j)].norm();
            }
        }
        lower = lower.min(m[(i, i)].re - radius);
    }
    if lower >= -tol {
        Ok(lower)
    } else {
        Err(Error::ResourceLimit {
            what: "dense positivity certification",
            requested: m.nrows() as u64,
            cap: DENSE_EIGEN_CAP as u64,
        })
    }
}

/// Full sorted spectral decomposition of a Hermitian matrix.
///
/// Exactly diagonal input takes the permutation fast path (any dimension);
/// anything else goes through the dense solver, capped at
/// [`DENSE_EIGEN_CAP`].
pub fn hermitian_spectrum(m: &DMatrix<Complex64>) -> Result<Spectrum> {
    require_hermitian(m, 1e-9, "hermitian_spectrum")?;
    if is_exactly_diagonal(m) {
        let values: Vec<f64> = (0..m.nrows()).map(|i| m[(i, i)].re).collect();
        return Ok(sorted_standard_spectrum(values));
    }
    if m.nrows() > DENSE_EIGEN_CAP {
        return Err(Error::ResourceLimit {
            what: "dense eigensolve dimension",
            requested: m.nrows() as u64,
            cap: DENSE_EIGEN_CAP as u64,
        });
    }
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let dim = m.nrows();
    let mut order: Vec<usize> = (0..dim).collect();
    let phase_fixed: Vec<Vec<Complex64>> = (0..dim)
        .map(|c| phase_fix(eig.eigenvectors.column(c).iter().copied().collect()))
        .collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap()
            .then_with(|| lex_cmp(&phase_fixed[b], &phase_fixed[a]))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<Complex64>::zeros(dim, dim);
    for (sorted, &orig) in order.iter().enumerate() {
        for (r, &x) in phase_fixed[orig].iter().enumerate() {
            vectors[(r, sorted)] = x;
        }
    }
    Ok(Spectrum {
        values,
        basis: EigenBasis::Dense { vectors },
    })
}

/// Sorts diagonal entries into a standard-basis [`Spectrum`], ties in
/// ascending basis index.
pub fn sorted_standard_spectrum(values: Vec<f64>) -> Spectrum {
    let mut perm: Vec<usize> = (0..values.len()).collect();
    perm.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap().then(a.cmp(&b)));
    let sorted = perm.iter().map(|&i| values[i]).collect();
    Spectrum {
        values: sorted,
        basis: EigenBasis::Standard { perm },
    }
}

/// Multiplies by the global phase making the first nonzero coefficient real
/// and positive.
pub fn phase_fix(mut v: Vec<Complex64>) -> Vec<Complex64> {
    if let Some(first) = v.iter().find(|x| x.norm() > 1e-12) {
        let phase = first / first.norm();
        let correction = phase.conj();
        for x in &mut v {
            *x *= correction;
        }
    }
    v
}

fn lex_cmp(a: &[Complex64], b: &[Complex64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x
            .re
            .partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
        {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Haar-ish random density matrix `G G† / Tr(G G†)` from a complex Ginibre
/// sample. Full rank almost surely.
pub fn random_density(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let g = DMatrix::<Complex64>::from_fn(dim, dim, |_, _| {
        Complex64::new(gaussian(rng), gaussian(rng))
    });
    let w = &g * g.adjoint();
    let t = trace_re(&w);
    w.map(|x| x / t)
}

/// Random semi-density: a random density scaled into (0, 1] trace.
pub fn random_semidensity(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let scale: f64 = rng.gen_range(0.1..=1.0);
    random_density(dim, rng).map(|x| x * scale)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; uniform draws are in (0, 1]
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
