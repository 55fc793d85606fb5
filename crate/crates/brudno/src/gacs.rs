//! Semi-density matrices, the quasi-order, and the two Gacs complexities.
//!
//! A semi-density matrix is a positive operator with trace at most 1 — the
//! quantum counterpart of a semi-measure. A genuinely universal one
//! dominates every computable chain-state restriction up to a constant; as
//! in the classical case that object is not computable, so here it is
//! replaced by an explicit finite surrogate
//!
//! ```text
//! μ̂^(n) = Σ_k w_k ρ_k^(n) + w_τ · I/2^n,
//! ```
//!
//! a weighted mixture of computable chain-state marginals plus a reserved
//! tracial component that guarantees full rank. Against the spectral
//! decomposition `μ̂ = Σ_i μ_i |μ_i⟩⟨μ_i|` the two complexities of a state
//! ρ are
//!
//! ```text
//! H̄(ρ) = −Tr(ρ log₂ μ̂) = −Σ_i log₂(μ_i) ⟨μ_i|ρ|μ_i⟩     (upper)
//! H̲(ρ) = −log₂ Tr(ρ μ̂)                                   (lower)
//! ```
//!
//! with `H̄ ≥ H̲` always (concavity of the logarithm). Dominance
//! `w ρ ⪯ μ̂` forces the member bound `H̄(ρ) ≤ S(ρ) + log₂(1/w)`, which is
//! the quantum face of the weight penalty in the classical mixture.
//!
//! Blocks of different lengths are compared through the standard
//! embedding `|s⟩ ↦ |s⟩ ⊗ |0^m⟩` (appended sites in `|0⟩`, site 0 = most
//! significant bit), under which compression onto the shorter block is
//! plain index selection.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, EigenBasis, Spectrum};
use crate::spin::{ChainState, LocalDensityMatrix};

const HERMITICITY_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;

/// A positive operator on n qubits with trace in [0, 1].
#[derive(Debug)]
pub struct SemiDensityMatrix {
    n: usize,
    matrix: DMatrix<Complex64>,
    /// Marks matrices constructed from exact rational data (the
    /// "elementary" operators); provenance metadata, not re-derived from
    /// the float entries.
    elementary: bool,
    spectrum: OnceLock<Spectrum>,
}

impl SemiDensityMatrix {
    pub fn new(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_flags(n, matrix, false)
    }

    /// As [`Self::new`], additionally marking the matrix elementary.
    pub fn new_elementary(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_flags(n, matrix, true)
    }

    fn with_flags(n: usize, matrix: DMatrix<Complex64>, elementary: bool) -> Result<Self> {
        let dim = 1usize
            .checked_shl(n as u32)
            .ok_or(Error::InvalidInput(format!("site count {n} overflows")))?;
        if n == 0 || matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "expected {dim}×{dim} matrix on {n} sites, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        linalg::require_hermitian(&matrix, HERMITICITY_TOL, "semi-density matrix")?;
        let tr = linalg::trace_re(&matrix);
        if !(-TRACE_TOL..=1.0 + TRACE_TOL).contains(&tr) {
            return Err(Error::InvalidState(format!(
                "trace {tr} outside [0, 1]"
            )));
        }
        let min_eig = linalg::certified_min_eigenvalue(&matrix, PSD_TOL)?;
        if min_eig < -PSD_TOL {
            return Err(Error::Positivity(format!(
                "minimum eigenvalue {min_eig} below −{PSD_TOL}"
            )));
        }
        Ok(SemiDensityMatrix {
            n,
            matrix,
            elementary,
            spectrum: OnceLock::new(),
        })
    }

    pub fn sites(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.matrix)
    }

    pub fn is_elementary(&self) -> bool {
        self.elementary
    }

    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = linalg::hermitian_spectrum(&self.matrix)?;
        Ok(self.spectrum.get_or_init(|| s))
    }

    /// Scales all entries by `c ∈ (0, 1]`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) || c == 0.0 {
            return Err(Error::InvalidInput(format!("scale {c} outside (0, 1]")));
        }
        Self::with_flags(self.n, self.matrix.scale(c), self.elementary)
    }
}

/// Compression of a larger-block operator onto the first `n1` sites under
/// the embedding `|s⟩ ↦ |s⟩ ⊗ |0^m⟩`: entry `(a, b)` of the result is
/// entry `(a·2^m, b·2^m)` of the input.
pub fn compress_to_block(m: &DMatrix<Complex64>, n_from: usize, n_to: usize) -> Result<DMatrix<Complex64>> {
    if n_to > n_from {
        return Err(Error::InvalidInput(format!(
            "cannot compress {n_from} sites onto {n_to}"
        )));
    }
    let shift = n_from - n_to;
    let dim = 1usize << n_to;
    Ok(DMatrix::from_fn(dim, dim, |a, b| {
        m[(a << shift, b << shift)]
    }))
}

/// Is `T1 ⪯_q T2`, i.e. `P_{n1} T2 P_{n1} − T1 ⪰ −tol` on the first-block
/// subspace? Requires `T1.sites() ≤ T2.sites()`.
pub fn quasi_greater(t1: &SemiDensityMatrix, t2: &SemiDensityMatrix, tol: f64) -> Result<bool> {
    if t1.sites() > t2.sites() {
        return Err(Error::InvalidInput(format!(
            "quasi-order compares n1 ≤ n2, got {} > {}",
            t1.sites(),
            t2.sites()
        )));
    }
    let compressed = compress_to_block(t2.matrix(), t2.sites(), t1.sites())?;
    let diff = compressed - t1.matrix();
    Ok(linalg::certified_min_eigenvalue(&diff, tol)? >= -tol)
}

/// A validated quasi-increasing sequence of semi-density matrices.
#[derive(Debug)]
pub struct QuasiIncreasingSequence {
    members: Vec<SemiDensityMatrix>,
}

impl QuasiIncreasingSequence {
    /// Validates block monotonicity, the quasi-order between consecutive
    /// members, and trace monotonicity.
    pub fn new(members: Vec<SemiDensityMatrix>, tol: f64) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidSequence("empty sequence".into()));
        }
        for (i, pair) in members.windows(2).enumerate() {
            if pair[0].sites() > pair[1].sites() {
                return Err(Error::InvalidSequence(format!(
                    "site counts decrease at position {i}"
                )));
            }
            if !quasi_greater(&pair[0], &pair[1], tol)? {
                return Err(Error::InvalidSequence(format!(
                    "member {} is not quasi-greater than member {i}",
                    i + 1
                )));
            }
            if pair[1].trace() < pair[0].trace() - tol {
                return Err(Error::InvalidSequence(format!(
                    "trace decreases at position {i}: {} → {}",
                    pair[0].trace(),
                    pair[1].trace()
                )));
            }
        }
        Ok(QuasiIncreasingSequence { members })
    }

    pub fn members(&self) -> &[SemiDensityMatrix] {
        &self.members
    }
}

/// Diagnostics of a finite quasi-increasing sequence standing in for its
/// trace-norm limit.
#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub traces: Vec<f64>,
    /// Trace norms of consecutive compressed differences — the Cauchy
    /// diagnostic.
    pub gaps: Vec<f64>,
    pub final_index: usize,
    pub final_trace: f64,
    /// Traces are non-decreasing and bounded by 1, so the finite prefix is
    /// consistent with convergence.
    pub trace_monotone: bool,
}

/// Returns the last member as the finite-stage stand-in for the limit,
/// with the Cauchy diagnostics that justify it.
pub fn limit_of_quasi_increasing(
    seq: &QuasiIncreasingSequence,
) -> Result<(&SemiDensityMatrix, LimitReport)> {
    let members = seq.members();
    let traces: Vec<f64> = members.iter().map(|m| m.trace()).collect();
    let mut gaps = Vec::with_capacity(members.len().saturating_sub(1));
    for pair in members.windows(2) {
        let compressed = compress_to_block(pair[1].matrix(), pair[1].sites(), pair[0].sites())?;
        let diff = compressed - pair[0].matrix();
        gaps.push(linalg::trace_norm(&diff)?);
    }
    let trace_monotone =
        traces.windows(2).all(|w| w[1] >= w[0] - 1e-12) && *traces.last().unwrap() <= 1.0 + 1e-12;
    let report = LimitReport {
        final_index: members.len() - 1,
        final_trace: *traces.last().unwrap(),
        traces,
        gaps,
        trace_monotone,
    };
    Ok((members.last().unwrap(), report))
}

/// The surrogate universal semi-density matrix: a weighted family of
/// chain-state generators plus a reserved tracial component.
#[derive(Debug)]
pub struct UniversalSemiDensity {
    members: Vec<(ChainState, f64)>,
    tracial_weight: f64,
}

impl UniversalSemiDensity {
    pub fn new(members: Vec<(ChainState, f64)>, tracial_weight: f64) -> Result<Self> {
        if tracial_weight <= 0.0 {
            return Err(Error::InvalidFamily(
                "the tracial component must carry positive weight; it is what \
                 guarantees full rank"
                    .into(),
            ));
        }
        if members.iter().any(|(_, w)| *w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidFamily("member weights must be positive".into()));
        }
        let total: f64 = members.iter().map(|(_, w)| w).sum::<f64>() + tracial_weight;
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidFamily(format!(
                "weights sum to {total} > 1"
            )));
        }
        Ok(UniversalSemiDensity {
            members,
            tracial_weight,
        })
    }

    /// The default quantum family: one generator with weight ½ and the
    /// tracial component with weight ½.
    pub fn with_default_weights(state: ChainState) -> Result<Self> {
        Self::new(vec![(state, 0.5)], 0.5)
    }

    pub fn members(&self) -> &[(ChainState, f64)] {
        &self.members
    }

    pub fn tracial_weight(&self) -> f64 {
        self.tracial_weight
    }

    /// Weight of the member whose generator matches `state` structurally
    /// (same kind and matrices, entrywise).
    pub fn member_weight(&self, index: usize) -> Option<f64> {
        self.members.get(index).map(|(_, w)| *w)
    }

    /// Realizes `μ̂^(n) = Σ_k w_k ρ_k^(n) + w_τ I/2^n` as a dense matrix.
    pub fn realize(&self, n: usize) -> Result<SemiDensityMatrix> {
        let dim = 1usize << n;
        let mut acc: DMatrix<Complex64> = DMatrix::identity(dim, dim)
            .scale(self.tracial_weight / dim as f64);
        for (state, w) in &self.members {
            acc += state.local_density(n)?.matrix().scale(*w);
        }
        let mu = SemiDensityMatrix::new(n, acc)?;
        // the tracial component makes rank deficiency impossible; check
        // anyway so a regression cannot silently weaken the hypothesis
        if mu.spectrum()?.values.last().copied().unwrap_or(0.0) <= 0.0 {
            return Err(Error::InvalidFamily(
                "realized semi-density matrix is rank-deficient".into(),
            ));
        }
        Ok(mu)
    }

    /// Sorted spectrum of `μ̂^(n)` without dense storage when every
    /// generator is diagonal.
    pub fn realize_spectrum(&self, n: usize) -> Result<Spectrum> {
        let dim = 1usize << n;
        let diagonals: Option<Vec<Vec<f64>>> = self
            .members
            .iter()
            .map(|(state, _)| state.diagonal_values(n))
            .collect();
        if let Some(diagonals) = diagonals {
            let mut values = vec![self.tracial_weight / dim as f64; dim];
            for ((_, w), diag) in self.members.iter().zip(&diagonals) {
                for (v, d) in values.iter_mut().zip(diag) {
                    *v += d * w;
                }
            }
            let spec = linalg::sorted_standard_spectrum(values);
            if spec.values.last().copied().unwrap_or(0.0) <= 0.0 {
                return Err(Error::InvalidFamily(
                    "realized semi-density matrix is rank-deficient".into(),
                ));
            }
            return Ok(spec);
        }
        Ok(self.realize(n)?.spectrum()?.clone())
    }

    /// Eigencheck of `w_k ρ_k^(n) ⪯ μ̂^(n)` for every member.
    pub fn verify_dominance(&self, n: usize, tol: f64) -> Result<Vec<DominanceRow>> {
        let mu = self.realize(n)?;
        let mut rows = Vec::with_capacity(self.members.len());
        for (k, (state, w)) in self.members.iter().enumerate() {
            let diff = mu.matrix() - state.local_density(n)?.matrix().scale(*w);
            let min_eig = linalg::certified_min_eigenvalue(&diff, tol)?;
            rows.push(DominanceRow {
                member: k,
                weight: *w,
                min_eigenvalue: min_eig,
                holds: min_eig >= -tol,
            });
        }
        Ok(rows)
    }
}

/// Outcome of one member's dominance eigencheck.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceRow {
    pub member: usize,
    pub weight: f64,
    pub min_eigenvalue: f64,
    pub holds: bool,
}

/// The pair of Gacs complexities for one state.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GacsComplexities {
    pub upper: f64,
    pub lower: f64,
}

fn require_full_rank(spec: &Spectrum) -> Result<()> {
    if spec.values.last().copied().unwrap_or(0.0) <= 0.0 {
        return Err(Error::InvalidFamily(
            "semi-density matrix must be full rank (strictly positive spectrum)".into(),
        ));
    }
    Ok(())
}

/// `H̄(ρ) = −Σ_i log₂(μ_i) ⟨μ_i|ρ|μ_i⟩` against μ̂'s eigenbasis, for a
/// density matrix of any dimension (chain blocks are the 2^n special case).
pub fn gacs_upper_matrix(rho: &DMatrix<Complex64>, mu_spec: &Spectrum) -> Result<f64> {
    if rho.nrows() != rho.ncols() || rho.nrows() != mu_spec.dim() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: ρ is {}×{}, μ̂ is {}",
            rho.nrows(),
            rho.ncols(),
            mu_spec.dim()
        )));
    }
    linalg::require_hermitian(rho, 1e-10, "gacs_upper state")?;
    require_full_rank(mu_spec)?;
    let mut bits = 0.0;
    match &mu_spec.basis {
        EigenBasis::Standard { perm } => {
            for (i, &mu_i) in mu_spec.values.iter().enumerate() {
                bits -= mu_i.log2() * rho[(perm[i], perm[i])].re;
            }
        }
        EigenBasis::Dense { vectors } => {
            for (i, &mu_i) in mu_spec.values.iter().enumerate() {
                let v = vectors.column(i);
                let overlap = (v.adjoint() * rho * v)[(0, 0)].re;
                bits -= mu_i.log2() * overlap.max(0.0);
            }
        }
    }
    Ok(bits)
}

/// `H̄` for a chain block against the realized family spectrum.
pub fn gacs_upper(rho: &LocalDensityMatrix, mu_spec: &Spectrum) -> Result<f64> {
    gacs_upper_matrix(rho.matrix(), mu_spec)
}

/// `H̲(ρ) = −log₂ Tr(ρ μ̂)` at any dimension. Callers must ensure μ̂ is
/// full rank; a non-positive overlap is reported as the family-rank error
/// it signals.
pub fn gacs_lower_matrix(rho: &DMatrix<Complex64>, mu: &DMatrix<Complex64>) -> Result<f64> {
    if rho.shape() != mu.shape() || rho.nrows() != rho.ncols() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    linalg::require_hermitian(rho, 1e-10, "gacs_lower state")?;
    let overlap = linalg::trace_product_re(rho, mu);
    if overlap <= 0.0 {
        return Err(Error::InvalidFamily(format!(
            "Tr(ρ μ̂) = {overlap} ≤ 0 — μ̂ cannot be full rank"
        )));
    }
    Ok(-overlap.log2())
}

/// `H̲` for a chain block against a realized semi-density matrix.
pub fn gacs_lower(rho: &LocalDensityMatrix, mu: &SemiDensityMatrix) -> Result<f64> {
    if rho.dim() != mu.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    require_full_rank(mu.spectrum()?)?;
    gacs_lower_matrix(rho.matrix(), mu.matrix())
}

/// `H̲` computed from spectra alone when both operators share the standard
/// eigenbasis (diagonal states): `Tr(ρ μ̂) = Σ_j ρ_jj μ̂_jj`.
pub fn gacs_lower_diagonal(rho_spec: &Spectrum, mu_spec: &Spectrum) -> Result<f64> {
    if rho_spec.dim() != mu_spec.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    require_full_rank(mu_spec)?;
    let dim = rho_spec.dim();
    let (rp, mp) = match (&rho_spec.basis, &mu_spec.basis) {
        (EigenBasis::Standard { perm: a }, EigenBasis::Standard { perm: b }) => (a, b),
        _ => {
            return Err(Error::Unsupported(
                "spectra-only overlap needs standard-basis spectra on both sides".into(),
            ))
        }
    };
    let mut rho_diag = vec![0.0; dim];
    for (i, &p) in rp.iter().enumerate() {
        rho_diag[p] = rho_spec.values[i];
    }
    let mut overlap = 0.0;
    for (i, &p) in mp.iter().enumerate() {
        overlap += mu_spec.values[i] * rho_diag[p];
    }
    if overlap <= 0.0 {
        return Err(Error::InvalidFamily(format!(
            "Tr(ρ μ̂) = {overlap} ≤ 0 — μ̂ cannot be full rank"
        )));
    }
    Ok(-overlap.log2())
}

/// `H̄` from spectra alone for standard-basis (diagonal) operators.
pub fn gacs_upper_diagonal(rho_spec: &Spectrum, mu_spec: &Spectrum) -> Result<f64> {
    if rho_spec.dim() != mu_spec.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    require_full_rank(mu_spec)?;
    let dim = rho_spec.dim();
    let (rp, mp) = match (&rho_spec.basis, &mu_spec.basis) {
        (EigenBasis::Standard { perm: a }, EigenBasis::Standard { perm: b }) => (a, b),
        _ => {
            return Err(Error::Unsupported(
                "spectra-only H̄ needs standard-basis spectra on both sides".into(),
            ))
        }
    };
    let mut rho_diag = vec![0.0; dim];
    for (i, &p) in rp.iter().enumerate() {
        rho_diag[p] = rho_spec.values[i];
    }
    let mut bits = 0.0;
    for (i, &p) in mp.iter().enumerate() {
        bits -= mu_spec.values[i].log2() * rho_diag[p];
    }
    Ok(bits)
}

/// Member bound `H̄(ρ_k^(n)) ≤ S(ρ_k^(n)) + log₂(1/w_k)` — the quantum
/// weight penalty, checked per member.
#[derive(Debug, Clone, Serialize)]
pub struct MemberBoundRow {
    pub member: usize,
    pub upper: f64,
    pub entropy: f64,
    pub weight_bits: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn member_bound_check(family: &UniversalSemiDensity, n: usize) -> Result<Vec<MemberBoundRow>> {
    let mu_spec = family.realize_spectrum(n)?;
    let mut rows = Vec::new();
    for (k, (state, w)) in family.members().iter().enumerate() {
        let rho = state.local_density(n)?;
        let upper = gacs_upper(&rho, &mu_spec)?;
        let entropy = state.block_entropy(n)?;
        let weight_bits = -(w.log2());
        let bound = entropy + weight_bits;
        rows.push(MemberBoundRow {
            member: k,
            upper,
            entropy,
            weight_bits,
            bound,
            holds: upper <= bound + 1e-9,
        });
    }
    Ok(rows)
}

/// The unitary `U = Σ_i |r_i⟩⟨μ_i|` transporting μ̂'s sorted eigenbasis
/// onto ρ's.
pub fn spectral_transport_unitary(
    rho_spec: &Spectrum,
    mu_spec: &Spectrum,
) -> Result<DMatrix<Complex64>> {
    if rho_spec.dim() != mu_spec.dim() {
        return Err(Error::InvalidInput("dimension mismatch".into()));
    }
    require_full_rank(mu_spec)?;
    let dim = rho_spec.dim();
    let mut u = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        let r = rho_spec.eigenvector(i);
        let m = mu_spec.eigenvector(i);
        // |r_i⟩⟨μ_i| accumulated densely
        for (row, &rv) in r.iter().enumerate() {
            if rv == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (col, &mv) in m.iter().enumerate() {
                if mv == Complex64::new(0.0, 0.0) {
                    continue;
                }
                u[(row, col)] += rv * mv.conj();
            }
        }
    }
    Ok(u)
}

/// One row of the transported-trace comparison.
#[derive(Debug, Clone, Serialize)]
pub struct TransportRow {
    pub n: usize,
    /// `(1/n) log₂ Tr(σ^(n) μ̂^(n))`.
    pub direct: f64,
    /// `(1/n) log₂ Tr(σ^(n) U μ̂^(n) U†) = (1/n) log₂ Σ_i r_i μ_i`.
    pub transported: f64,
    pub gap: f64,
    /// Weighted term `δ(n) · Tr(σ^(n) U†μ̂^(n)U)` of the truncated
    /// auxiliary operator `K̂ = Σ_n δ(n) U† μ̂ U`, `δ(n) = 1/(n log₂² n)`.
    pub k_hat_term: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransportReport {
    pub rows: Vec<TransportRow>,
    /// |gap| non-increasing along the grid (finite-n stand-in for the
    /// asymptotic equality of the two rates).
    pub gap_trend_nonincreasing: bool,
    /// Truncated `Tr(σ K̂)` over the grid rows.
    pub k_hat_truncated_trace: f64,
}

/// Compares `(1/n) log₂ Tr(σ μ̂)` with its spectrally transported twin
/// across a grid. `Tr(σ·Uμ̂U†) = Σ_i r_i μ_i` is evaluated exactly from the
/// sorted spectra; the transported side also feeds the truncated `K̂`
/// diagnostic.
pub fn transported_trace_compare(
    sigma: &ChainState,
    family: &UniversalSemiDensity,
    n_grid: &[usize],
) -> Result<TransportReport> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "n grid must be strictly increasing and nonempty".into(),
        ));
    }
    let mut rows = Vec::with_capacity(n_grid.len());
    let mut k_hat = 0.0;
    for &n in n_grid {
        let rho_spec = sigma.local_spectrum(n)?;
        let mu_spec = family.realize_spectrum(n)?;
        require_full_rank(&mu_spec)?;
        // direct overlap through matching standard indices where possible;
        // dense fallback otherwise
        let direct_overlap = match (&rho_spec.basis, &mu_spec.basis) {
            (EigenBasis::Standard { .. }, EigenBasis::Standard { .. }) => {
                let dim = rho_spec.dim();
                let mut rho_diag = vec![0.0; dim];
                for i in 0..dim {
                    rho_diag[rho_spec.standard_index(i).unwrap()] = rho_spec.values[i];
                }
                let mut acc = 0.0;
                for i in 0..dim {
                    acc += mu_spec.values[i] * rho_diag[mu_spec.standard_index(i).unwrap()];
                }
                acc
            }
            _ => {
                let rho = sigma.local_density(n)?;
                let mu = family.realize(n)?;
                linalg::trace_product_re(rho.matrix(), mu.matrix())
            }
        };
        // Tr(σ Uμ̂U†) = Σ_i r_i μ_i: rank-paired sorted spectra
        let transported_overlap: f64 = rho_spec
            .values
            .iter()
            .zip(mu_spec.values.iter())
            .map(|(r, m)| r * m)
            .sum();
        let direct = direct_overlap.log2() / n as f64;
        let transported = transported_overlap.log2() / n as f64;
        let delta = if n >= 2 {
            let l = (n as f64).log2();
            1.0 / (n as f64 * l * l)
        } else {
            0.25
        };
        let term = delta * transported_overlap;
        k_hat += term;
        rows.push(TransportRow {
            n,
            direct,
            transported,
            gap: transported - direct,
            k_hat_term: term,
        });
    }
    let gap_trend_nonincreasing = rows
        .windows(2)
        .all(|w| w[1].gap.abs() <= w[0].gap.abs() + 1e-12);
    Ok(TransportReport {
        rows,
        gap_trend_nonincreasing,
        k_hat_truncated_trace: k_hat,
    })
}
