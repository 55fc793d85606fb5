//! Finite local marginals of translation-invariant qubit chains.
//!
//! A translation-invariant state of the infinite chain is represented here
//! by what it does on blocks: the family of local density matrices
//! `ρ^(n)` on sites `[0, n−1]` satisfying both compatibility identities
//!
//! ```text
//! Tr_last ρ^(n+1) = ρ^(n)      and      Tr_first ρ^(n+1) = ρ^(n).
//! ```
//!
//! Two state families are provided: i.i.d. products (ergodic for the
//! shift) and mixtures of products (translation-invariant but not ergodic
//! — the standard counterexample states). Site 0 is the most significant
//! bit of the basis index, so `|s₀ s₁ … s_{n−1}⟩` sits at index
//! `Σ s_j 2^{n−1−j}`; this matches the word-rank convention used on the
//! classical side.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::linalg::{self, Spectrum};

/// Default cap on block length: `2^12 × 2^12` dense matrices.
pub const DEFAULT_SITE_CAP: usize = 12;

/// Eigenvalues below this are flagged as near-singular (the faithfulness
/// warning threshold).
pub const FAITHFUL_WARN_FLOOR: f64 = 1e-6;

const HERMITICITY_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;

/// A validated density matrix on `n` qubits, with a lazily computed
/// spectral decomposition.
#[derive(Debug)]
pub struct LocalDensityMatrix {
    n: usize,
    matrix: DMatrix<Complex64>,
    /// `true` when the matrix is certified full-rank (all eigenvalues
    /// strictly positive). Product constructions certify this
    /// structurally; otherwise it is read off the spectrum when one is
    /// computable, and left `false` when it is not.
    faithful: bool,
    spectrum: OnceLock<Spectrum>,
}

impl LocalDensityMatrix {
    /// Validates Hermiticity, unit trace, and positive semidefiniteness.
    ///
    /// Positivity is certified spectrally (exact for diagonal matrices of
    /// any admissible size, dense decomposition up to the eigensolver
    /// cap); beyond that a Gershgorin bound is tried, and if it is
    /// inconclusive the matrix is rejected rather than accepted unchecked.
    pub fn new(n: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_cap(n, matrix, DEFAULT_SITE_CAP)
    }

    pub fn with_cap(n: usize, matrix: DMatrix<Complex64>, cap: usize) -> Result<Self> {
        if n == 0 || n > cap {
            return Err(Error::ResourceLimit {
                what: "chain block length",
                requested: n as u64,
                cap: cap as u64,
            });
        }
        let dim = 1usize << n;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "expected {dim}×{dim} matrix for {n} sites, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        linalg::require_hermitian(&matrix, HERMITICITY_TOL, "local density matrix")?;
        let tr = linalg::trace_re(&matrix);
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {tr} differs from 1 beyond {TRACE_TOL}"
            )));
        }
        let min_eig = linalg::certified_min_eigenvalue(&matrix, PSD_TOL)?;
        if min_eig < -PSD_TOL {
            return Err(Error::Positivity(format!(
                "minimum eigenvalue {min_eig} below −{PSD_TOL}"
            )));
        }
        Ok(LocalDensityMatrix {
            n,
            matrix,
            faithful: min_eig > 1e-12,
            spectrum: OnceLock::new(),
        })
    }

    /// Constructor for matrices whose positivity is structural (convex
    /// combinations of Kronecker powers of validated site matrices).
    fn from_structural(n: usize, matrix: DMatrix<Complex64>, faithful: bool) -> Self {
        LocalDensityMatrix {
            n,
            matrix,
            faithful,
            spectrum: OnceLock::new(),
        }
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

    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    /// Near-singularity warning per the faithfulness switch: some
    /// eigenvalue sits below [`FAITHFUL_WARN_FLOOR`].
    pub fn near_singular(&self) -> Result<bool> {
        Ok(self.spectrum()?.values.last().copied().unwrap_or(0.0) < FAITHFUL_WARN_FLOOR)
    }

    /// Eigenvalues descending with deterministic eigenvectors; computed on
    /// first use and cached.
    pub fn spectrum(&self) -> Result<&Spectrum> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let s = linalg::hermitian_spectrum(&self.matrix)?;
        Ok(self.spectrum.get_or_init(|| s))
    }
}

/// `−Tr(ρ log₂ ρ) = −Σ r log₂ r` with `0·log 0 := 0`; eigenvalues within
/// tolerance below zero are clamped.
pub fn von_neumann_entropy(rho: &LocalDensityMatrix) -> Result<f64> {
    Ok(entropy_of_eigenvalues(&rho.spectrum()?.values))
}

fn entropy_of_eigenvalues(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|&r| if r > 0.0 { -r * r.log2() } else { 0.0 })
        .sum()
}

/// Partial trace over one end of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChainEnd {
    First,
    Last,
}

/// Traces out the chosen end site of an (n+1)-site state, yielding the
/// n-site marginal. Trace- and positivity-preserving by construction.
pub fn partial_trace(rho: &LocalDensityMatrix, end: ChainEnd) -> Result<LocalDensityMatrix> {
    if rho.sites() < 2 {
        return Err(Error::InvalidInput(
            "partial trace needs at least 2 sites".into(),
        ));
    }
    let d = rho.dim();
    let half = d / 2;
    let m = rho.matrix();
    let mut out = DMatrix::zeros(half, half);
    match end {
        // site 0 is the most significant bit: index = t·(d/2) + rest
        ChainEnd::First => {
            for a in 0..half {
                for b in 0..half {
                    out[(a, b)] = m[(a, b)] + m[(a + half, b + half)];
                }
            }
        }
        // the last site is the least significant bit: index = 2·rest + t
        ChainEnd::Last => {
            for a in 0..half {
                for b in 0..half {
                    out[(a, b)] = m[(2 * a, 2 * b)] + m[(2 * a + 1, 2 * b + 1)];
                }
            }
        }
    }
    // positivity and trace are inherited from the parent state
    Ok(LocalDensityMatrix::from_structural(
        rho.sites() - 1,
        out,
        false,
    ))
}

/// A translation-invariant chain state given by its construction rule.
#[derive(Debug, Clone)]
pub enum ChainStateKind {
    /// `ρ^(n) = σ⊗…⊗σ` — ergodic for the shift.
    IIDProduct { site: DMatrix<Complex64> },
    /// `ρ^(n) = Σ w_i σ_i⊗…⊗σ_i` — translation-invariant but not ergodic
    /// when more than one component is present.
    MixtureOfProducts {
        components: Vec<DMatrix<Complex64>>,
        weights: Vec<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct ChainState {
    kind: ChainStateKind,
    cap: usize,
}

impl ChainState {
    /// I.i.d. product chain from one validated 2×2 density matrix.
    pub fn iid_product(site: DMatrix<Complex64>) -> Result<Self> {
        validate_site(&site)?;
        Ok(ChainState {
            kind: ChainStateKind::IIDProduct { site },
            cap: DEFAULT_SITE_CAP,
        })
    }

    /// Convex mixture of product chains.
    pub fn mixture_of_products(
        components: Vec<DMatrix<Complex64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if components.is_empty() || components.len() != weights.len() {
            return Err(Error::InvalidState(
                "mixture needs matching nonempty components and weights".into(),
            ));
        }
        if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidState("mixture weights must be positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        for c in &components {
            validate_site(c)?;
        }
        Ok(ChainState {
            kind: ChainStateKind::MixtureOfProducts {
                components,
                weights,
            },
            cap: DEFAULT_SITE_CAP,
        })
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn kind(&self) -> &ChainStateKind {
        &self.kind
    }

    /// Ergodicity of the shift on this state (structural).
    pub fn is_ergodic(&self) -> bool {
        match &self.kind {
            ChainStateKind::IIDProduct { .. } => true,
            ChainStateKind::MixtureOfProducts { components, .. } => components.len() == 1,
        }
    }

    /// Exact n-site marginal as a dense matrix.
    pub fn local_density(&self, n: usize) -> Result<LocalDensityMatrix> {
        if n == 0 || n > self.cap {
            return Err(Error::ResourceLimit {
                what: "chain block length",
                requested: n as u64,
                cap: self.cap as u64,
            });
        }
        match &self.kind {
            ChainStateKind::IIDProduct { site } => {
                let matrix = kron_power(site, n);
                let faithful = site_min_eigenvalue(site)? > 1e-12;
                Ok(LocalDensityMatrix::from_structural(n, matrix, faithful))
            }
            ChainStateKind::MixtureOfProducts {
                components,
                weights,
            } => {
                let dim = 1usize << n;
                let mut acc: DMatrix<Complex64> = DMatrix::zeros(dim, dim);
                for (c, &w) in components.iter().zip(weights) {
                    acc += kron_power(c, n).scale(w);
                }
                let rho = LocalDensityMatrix::from_structural(n, acc, false);
                // faithfulness of a mixture is a property of the summed
                // marginal; read it off the spectrum when computable
                let faithful = rho
                    .spectrum()
                    .map(|s| s.values.last().copied().unwrap_or(0.0) > 1e-12)
                    .unwrap_or(false);
                Ok(LocalDensityMatrix {
                    faithful,
                    ..rho
                })
            }
        }
    }

    /// Exact block entropy `S(ρ^(n))` without materializing the dense
    /// marginal: products use eigenvalue additivity, diagonal mixtures an
    /// entrywise scan, and everything else falls back to the dense path.
    pub fn block_entropy(&self, n: usize) -> Result<f64> {
        if n == 0 || n > self.cap {
            return Err(Error::ResourceLimit {
                what: "chain block length",
                requested: n as u64,
                cap: self.cap as u64,
            });
        }
        if let ChainStateKind::IIDProduct { site } = &self.kind {
            let eigs = linalg::hermitian_eigenvalues(site)?;
            return Ok(n as f64 * entropy_of_eigenvalues(&eigs));
        }
        match self.diagonal_values(n) {
            Some(values) => Ok(entropy_of_eigenvalues(&values)),
            None => von_neumann_entropy(&self.local_density(n)?),
        }
    }

    /// Standard-basis diagonal of `ρ^(n)` when every component matrix is
    /// exactly diagonal — these are then precisely the eigenvalues, and no
    /// `2^n × 2^n` storage is needed. `None` otherwise.
    pub fn diagonal_values(&self, n: usize) -> Option<Vec<f64>> {
        if n == 0 || n > self.cap {
            return None;
        }
        let parts: Vec<(&DMatrix<Complex64>, f64)> = match &self.kind {
            ChainStateKind::IIDProduct { site } => vec![(site, 1.0)],
            ChainStateKind::MixtureOfProducts {
                components,
                weights,
            } => components.iter().zip(weights.iter().copied()).collect(),
        };
        if !parts.iter().all(|(c, _)| linalg::is_exactly_diagonal(c)) {
            return None;
        }
        let mut values = vec![0.0f64; 1 << n];
        for (idx, v) in values.iter_mut().enumerate() {
            for (c, w) in &parts {
                // same association order as the dense construction
                // (kron_power then scale), so tied values tie exactly
                let bit0 = (idx >> (n - 1)) & 1;
                let mut prod = c[(bit0, bit0)].re;
                for j in 1..n {
                    let bit = (idx >> (n - 1 - j)) & 1;
                    prod *= c[(bit, bit)].re;
                }
                *v += prod * w;
            }
        }
        Some(values)
    }

    /// Sorted spectrum of `ρ^(n)`: the diagonal fast path avoids dense
    /// storage entirely; everything else goes through [`Self::local_density`]
    /// (subject to the eigensolver cap for non-diagonal matrices).
    pub fn local_spectrum(&self, n: usize) -> Result<Spectrum> {
        if n == 0 || n > self.cap {
            return Err(Error::ResourceLimit {
                what: "chain block length",
                requested: n as u64,
                cap: self.cap as u64,
            });
        }
        if let Some(values) = self.diagonal_values(n) {
            return Ok(linalg::sorted_standard_spectrum(values));
        }
        Ok(self.local_density(n)?.spectrum()?.clone())
    }
}

fn validate_site(site: &DMatrix<Complex64>) -> Result<()> {
    if site.nrows() != 2 || site.ncols() != 2 {
        return Err(Error::InvalidState(format!(
            "site matrix must be 2×2, got {}×{}",
            site.nrows(),
            site.ncols()
        )));
    }
    linalg::require_hermitian(site, HERMITICITY_TOL, "site matrix")?;
    let tr = linalg::trace_re(site);
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("site trace {tr} is not 1")));
    }
    if site_min_eigenvalue(site)? < -PSD_TOL {
        return Err(Error::Positivity("site matrix is not positive".into()));
    }
    Ok(())
}

fn site_min_eigenvalue(site: &DMatrix<Complex64>) -> Result<f64> {
    linalg::min_eigenvalue(site)
}

fn kron_power(site: &DMatrix<Complex64>, n: usize) -> DMatrix<Complex64> {
    let mut acc = site.clone();
    for _ in 1..n {
        acc = acc.kronecker(site);
    }
    acc
}

/// Block entropies along `1..=n_max` and the finite-size rate.
#[derive(Debug, Clone, Serialize)]
pub struct EntropyRateRow {
    pub n: usize,
    pub entropy: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyRateReport {
    pub per_n: Vec<EntropyRateRow>,
    /// `S(ρ^(n_max))/n_max` — the finite-size stand-in for the limit.
    pub rate: f64,
    /// Exact additivity `S(ρ^(n)) = n·S(ρ^(1))` held on every row (always
    /// true for products; generally false for mixtures).
    pub additive: bool,
    pub ergodic: bool,
}

/// Computes `S(ρ^(n))` across the grid `1..=n_max`.
pub fn entropy_rate(state: &ChainState, n_max: usize) -> Result<EntropyRateReport> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be positive".into()));
    }
    let mut per_n = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let s = state.block_entropy(n)?;
        if s < -1e-12 {
            return Err(Error::InvalidState(format!("negative entropy {s} at n={n}")));
        }
        per_n.push(EntropyRateRow {
            n,
            entropy: s,
            rate: s / n as f64,
        });
    }
    let s1 = per_n[0].entropy;
    let additive = per_n
        .iter()
        .all(|row| (row.entropy - row.n as f64 * s1).abs() <= 1e-9);
    Ok(EntropyRateReport {
        rate: per_n.last().unwrap().rate,
        additive,
        ergodic: state.is_ergodic(),
        per_n,
    })
}

/// Maximum absolute entrywise defect of both compatibility identities at
/// block length n: `Tr_last ρ^(n+1) = ρ^(n) = Tr_first ρ^(n+1)`.
pub fn compatibility_defect(state: &ChainState, n: usize) -> Result<(f64, f64)> {
    let small = state.local_density(n)?;
    let big = state.local_density(n + 1)?;
    let from_last = partial_trace(&big, ChainEnd::Last)?;
    let from_first = partial_trace(&big, ChainEnd::First)?;
    let defect = |m: &DMatrix<Complex64>| {
        (m - small.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0f64, f64::max)
    };
    Ok((defect(from_last.matrix()), defect(from_first.matrix())))
}

/// Convenience: the diagonal qubit `diag(p, 1−p)`.
pub fn diagonal_site(p: f64) -> Result<DMatrix<Complex64>> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidInput(format!("p = {p} outside [0, 1]")));
    }
    Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(p, 0.0),
        Complex64::new(1.0 - p, 0.0),
    ])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::binary_entropy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_marginals_are_kronecker_powers() {
        let state = ChainState::iid_product(diagonal_site(0.5).unwrap()).unwrap();
        let rho2 = state.local_density(2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 0.25 } else { 0.0 };
                assert!((rho2.matrix()[(i, j)] - c(expect, 0.0)).norm() < 1e-15);
            }
        }

        let state = ChainState::iid_product(diagonal_site(0.9).unwrap()).unwrap();
        let rho2 = state.local_density(2).unwrap();
        let expect = [0.81, 0.09, 0.09, 0.01];
        for (i, &e) in expect.iter().enumerate() {
            assert!((rho2.matrix()[(i, i)].re - e).abs() < 1e-15);
        }
        assert!(rho2.is_faithful());
    }

    #[test]
    fn site_zero_is_most_significant_bit() {
        // asymmetric product σ⊗τ: entry (1,1) is |01⟩ = site0=0, site1=1
        let sigma = diagonal_site(0.9).unwrap();
        let tau = diagonal_site(0.6).unwrap();
        let product = sigma.kronecker(&tau);
        assert!((product[(1, 1)].re - 0.9 * 0.4).abs() < 1e-15);
        assert!((product[(2, 2)].re - 0.1 * 0.6).abs() < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let sigma = diagonal_site(0.7).unwrap();
        let state = ChainState::iid_product(sigma.clone()).unwrap();
        let rho3 = state.local_density(3).unwrap();
        let rho2 = partial_trace(&rho3, ChainEnd::Last).unwrap();
        let expect = sigma.kronecker(&sigma);
        assert!((rho2.matrix() - &expect)
            .iter()
            .all(|z| z.norm() < 1e-14));
        assert!((rho2.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bell_state_marginals_are_maximally_mixed() {
        // |Φ+⟩ = (|00⟩ + |11⟩)/√2
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = DMatrix::zeros(4, 4);
        for &i in &[0usize, 3] {
            for &j in &[0usize, 3] {
                m[(i, j)] = c(r * r, 0.0);
            }
        }
        let rho = LocalDensityMatrix::new(2, m).unwrap();
        assert!((von_neumann_entropy(&rho).unwrap() - 0.0).abs() < 1e-10);
        for end in [ChainEnd::First, ChainEnd::Last] {
            let reduced = partial_trace(&rho, end).unwrap();
            assert!((reduced.matrix()[(0, 0)].re - 0.5).abs() < 1e-14);
            assert!((reduced.matrix()[(1, 1)].re - 0.5).abs() < 1e-14);
            assert!(reduced.matrix()[(0, 1)].norm() < 1e-14);
        }
    }

    #[test]
    fn entropy_worked_values() {
        let pure = ChainState::iid_product(diagonal_site(1.0).unwrap()).unwrap();
        assert!(von_neumann_entropy(&pure.local_density(3).unwrap()).unwrap() < 1e-12);

        let mixed = ChainState::iid_product(diagonal_site(0.5).unwrap()).unwrap();
        let s = von_neumann_entropy(&mixed.local_density(1).unwrap()).unwrap();
        assert!((s - 1.0).abs() < 1e-12);

        let skew = ChainState::iid_product(diagonal_site(0.9).unwrap()).unwrap();
        let s = von_neumann_entropy(&skew.local_density(1).unwrap()).unwrap();
        assert!((s - binary_entropy(0.9)).abs() < 1e-12);
        assert!((s - 0.46900).abs() < 1e-5);
    }

    #[test]
    fn product_entropy_rate_is_flat() {
        let state = ChainState::iid_product(diagonal_site(0.9).unwrap()).unwrap();
        let report = entropy_rate(&state, 12).unwrap();
        assert!(report.additive);
        assert!(report.ergodic);
        assert!((report.rate - binary_entropy(0.9)).abs() < 1e-9);
        for row in &report.per_n {
            assert!((row.rate - report.rate).abs() < 1e-9);
        }
    }

    #[test]
    fn mixture_entropy_saturates_at_one_bit() {
        // ½|0…0⟩⟨0…0| + ½|1…1⟩⟨1…1|: S(ρ^(n)) = 1 for every n ≥ 1
        let state = ChainState::mixture_of_products(
            vec![diagonal_site(1.0).unwrap(), diagonal_site(0.0).unwrap()],
            vec![0.5, 0.5],
        )
        .unwrap();
        assert!(!state.is_ergodic());
        let report = entropy_rate(&state, 10).unwrap();
        for row in &report.per_n {
            assert!((row.entropy - 1.0).abs() < 1e-12, "n={}: {}", row.n, row.entropy);
        }
        assert!(!report.additive);
        assert!(report.rate < 0.11);
    }

    #[test]
    fn block_entropy_shortcuts_match_dense_path() {
        // product state: formula vs dense spectrum
        let state = ChainState::iid_product(diagonal_site(0.8).unwrap()).unwrap();
        for n in [1usize, 3, 6] {
            let fast = state.block_entropy(n).unwrap();
            let dense = von_neumann_entropy(&state.local_density(n).unwrap()).unwrap();
            assert!((fast - dense).abs() < 1e-10);
        }
        // diagonal mixture: scan vs dense spectrum
        let mix = ChainState::mixture_of_products(
            vec![diagonal_site(0.9).unwrap(), diagonal_site(0.3).unwrap()],
            vec![0.6, 0.4],
        )
        .unwrap();
        for n in [1usize, 4, 7] {
            let fast = mix.block_entropy(n).unwrap();
            let dense = von_neumann_entropy(&mix.local_density(n).unwrap()).unwrap();
            assert!((fast - dense).abs() < 1e-10);
        }
    }

    #[test]
    fn compatibility_both_ends() {
        let states = [
            ChainState::iid_product(diagonal_site(0.9).unwrap()).unwrap(),
            ChainState::mixture_of_products(
                vec![diagonal_site(0.95).unwrap(), diagonal_site(0.2).unwrap()],
                vec![0.7, 0.3],
            )
            .unwrap(),
        ];
        for state in &states {
            for n in 1..=7 {
                let (last, first) = compatibility_defect(state, n).unwrap();
                assert!(last <= 1e-10, "n={n}: last defect {last}");
                assert!(first <= 1e-10, "n={n}: first defect {first}");
            }
        }
    }

    #[test]
    fn non_diagonal_site_is_supported() {
        // σ = ½I + ¼σ_x has eigenvalues ¾, ¼
        let site = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.25, 0.0), c(0.25, 0.0), c(0.5, 0.0)]);
        let state = ChainState::iid_product(site).unwrap();
        let s1 = state.block_entropy(1).unwrap();
        assert!((s1 - binary_entropy(0.75)).abs() < 1e-12);
        let rho2 = state.local_density(2).unwrap();
        let spec = rho2.spectrum().unwrap();
        let expect = [0.5625, 0.1875, 0.1875, 0.0625];
        for (a, b) in spec.values.iter().zip(expect.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
        let (last, first) = compatibility_defect(&state, 2).unwrap();
        assert!(last <= 1e-10 && first <= 1e-10);
    }

    #[test]
    fn partial_trace_on_random_states() {
        // positivity and unit trace preserved on random 3-qubit densities
        let mut rng = ChaCha8Rng::seed_from_u64(424242);
        for _ in 0..100 {
            let m = linalg::random_density(8, &mut rng);
            let rho = LocalDensityMatrix::new(3, m).unwrap();
            for end in [ChainEnd::First, ChainEnd::Last] {
                let reduced = partial_trace(&rho, end).unwrap();
                assert!((reduced.trace() - 1.0).abs() < 1e-10);
                let min = linalg::min_eigenvalue(reduced.matrix()).unwrap();
                assert!(min >= -1e-10, "negative eigenvalue {min}");
            }
        }
    }

    #[test]
    fn validation_rejects_bad_inputs() {
        // cap
        let state = ChainState::iid_product(diagonal_site(0.5).unwrap()).unwrap();
        assert!(matches!(
            state.local_density(13),
            Err(Error::ResourceLimit { .. })
        ));
        // wrong trace
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.9, 0.0),
            c(0.9, 0.0),
        ]));
        assert!(LocalDensityMatrix::new(1, m).is_err());
        // non-Hermitian
        let m = DMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.3, 0.0), c(0.1, 0.0), c(0.5, 0.0)]);
        assert!(matches!(
            LocalDensityMatrix::new(1, m),
            Err(Error::InvalidState(_))
        ));
        // negative eigenvalue: diag(1.5, −0.5)
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.5, 0.0),
            c(-0.5, 0.0),
        ]));
        assert!(matches!(
            LocalDensityMatrix::new(1, m),
            Err(Error::Positivity(_))
        ));
        // bad mixture weights
        assert!(ChainState::mixture_of_products(
            vec![diagonal_site(0.5).unwrap()],
            vec![0.9],
        )
        .is_err());
    }

    #[test]
    fn faithfulness_flags() {
        let faithful = ChainState::iid_product(diagonal_site(0.9).unwrap()).unwrap();
        let rho = faithful.local_density(4).unwrap();
        assert!(rho.is_faithful());
        assert!(!rho.near_singular().unwrap());

        let singular = ChainState::iid_product(diagonal_site(1.0).unwrap()).unwrap();
        assert!(!singular.local_density(2).unwrap().is_faithful());

        let nearly = ChainState::iid_product(diagonal_site(1.0 - 1e-8).unwrap()).unwrap();
        let rho = nearly.local_density(1).unwrap();
        assert!(rho.is_faithful());
        assert!(rho.near_singular().unwrap());
    }

    #[test]
    fn local_spectrum_matches_dense_spectrum() {
        let mix = ChainState::mixture_of_products(
            vec![diagonal_site(0.9).unwrap(), diagonal_site(0.3).unwrap()],
            vec![0.6, 0.4],
        )
        .unwrap();
        for n in [1usize, 3, 5] {
            let fast = mix.local_spectrum(n).unwrap();
            let dense = mix.local_density(n).unwrap();
            let slow = dense.spectrum().unwrap();
            for (a, b) in fast.values.iter().zip(slow.values.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
            // identical permutations under the shared tie-break rule
            for i in 0..fast.dim() {
                assert_eq!(fast.standard_index(i), slow.standard_index(i));
            }
        }
    }

    #[test]
    fn twelve_site_diagonal_state_is_cheap() {
        // the structural entropy path never builds the 4096² matrix
        let state = ChainState::iid_product(diagonal_site(0.9).unwrap()).unwrap();
        let s = state.block_entropy(12).unwrap();
        assert!((s - 12.0 * binary_entropy(0.9)).abs() < 1e-9);
    }
}
