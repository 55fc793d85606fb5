//! The classical half of the bridge: expected complexity of blocks versus
//! block entropy.
//!
//! For an ergodic symbolic source ν and a strictly positive semi-measure μ,
//! the block complexity is the expectation
//!
//! ```text
//! G_n = Σ_{|s|=n} ν(s) · (−log₂ μ(s)),
//! ```
//!
//! and its per-symbol rate converges to the Kolmogorov–Sinai entropy rate
//! when μ dominates ν. This module renders that statement at finite n:
//! exact expectations where the block space is enumerable, Monte-Carlo
//! averages with standard errors where it is not, per-sequence rate
//! trajectories, entropy-typical sets with mass bounds, and the counting
//! bound that powers the lower half of the argument.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::semimeasure::{LengthWeighted, Member, SemiMeasure};
use crate::symbolic::{
    rank_to_word, BlockDistribution, SymbolString, SymbolicSource, BLOCK_ENUMERATION_CAP,
};

/// One estimate of `G_n`, either exhaustive or sampled.
#[derive(Debug, Clone, Serialize)]
pub struct BlockComplexity {
    pub n: usize,
    /// `G_n` in bits.
    pub bits: f64,
    /// Standard error of the Monte-Carlo mean; `None` for exact values.
    pub standard_error: Option<f64>,
    pub exhaustive: bool,
}

/// Monte-Carlo controls for block spaces too large to enumerate.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloOptions {
    pub samples: usize,
    pub seed: u64,
}

impl Default for MonteCarloOptions {
    fn default() -> Self {
        MonteCarloOptions {
            samples: 100,
            seed: 7,
        }
    }
}

fn enumerable(alphabet: u8, n: usize) -> Option<u64> {
    (alphabet as u64)
        .checked_pow(n as u32)
        .filter(|&c| c <= BLOCK_ENUMERATION_CAP)
}

/// Exact expectation of `−log₂ μ` under an explicit block law.
///
/// Words of zero ν-mass contribute nothing; a word with positive ν-mass and
/// zero μ-mass is a positivity violation.
pub fn gacs_block_complexity_dist(dist: &BlockDistribution, mu: &SemiMeasure) -> Result<f64> {
    if dist.alphabet() != mu.alphabet() {
        return Err(Error::InvalidInput("alphabet mismatch".into()));
    }
    let k = dist.alphabet();
    let n = dist.block_len();
    let mut bits = 0.0;
    for (rank, &nu) in dist.probabilities().iter().enumerate() {
        if nu == 0.0 {
            continue;
        }
        let word = SymbolString::new(rank_to_word(rank, k, n), k)?;
        let lp = mu.log2_prob(&word)?;
        if lp == f64::NEG_INFINITY {
            return Err(Error::Positivity(format!(
                "μ vanishes on a ν-positive word of length {n}"
            )));
        }
        bits += nu * (-lp);
    }
    Ok(bits)
}

/// `G_n` for a source: exact over the block distribution when `k^n` is
/// enumerable, Monte-Carlo over sampled paths otherwise.
///
/// Deterministic orbit sources have no sampling law, so beyond the
/// enumeration cap they are rejected; study them through
/// [`per_sequence_rate`] on the orbit encoding instead.
pub fn gacs_block_complexity(
    source: &SymbolicSource,
    mu: &SemiMeasure,
    n: usize,
    mc: MonteCarloOptions,
) -> Result<BlockComplexity> {
    if enumerable(source.alphabet(), n).is_some() {
        let dist = source.block_distribution(n)?;
        return Ok(BlockComplexity {
            n,
            bits: gacs_block_complexity_dist(&dist, mu)?,
            standard_error: None,
            exhaustive: true,
        });
    }
    if !source.is_stochastic() {
        return Err(Error::Unsupported(
            "orbit sources beyond the enumeration cap have no sampling law; \
             use per_sequence_rate on the orbit encoding"
                .into(),
        ));
    }
    if mc.samples < 2 {
        return Err(Error::InvalidInput(
            "Monte-Carlo estimation needs at least 2 samples".into(),
        ));
    }
    let mut values = Vec::with_capacity(mc.samples);
    for i in 0..mc.samples {
        let path = source.sample_path(n, mc.seed.wrapping_add(i as u64))?;
        let c = mu.complexity_surrogate(&path)?;
        values.push(c);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
        / (values.len() as f64 - 1.0);
    Ok(BlockComplexity {
        n,
        bits: mean,
        standard_error: Some((var / values.len() as f64).sqrt()),
        exhaustive: false,
    })
}

/// One grid row of a classical rate experiment.
#[derive(Debug, Clone, Serialize)]
pub struct GacsRow {
    pub n: usize,
    pub g_n: f64,
    pub g_rate: f64,
    /// Block entropy `H_n`, available when the block space is enumerable.
    pub h_n: Option<f64>,
    pub h_rate: Option<f64>,
    pub standard_error: Option<f64>,
    pub exhaustive: bool,
}

/// Expected-complexity rates across an n grid, with the entropy reference.
#[derive(Debug, Clone, Serialize)]
pub struct GacsClassicalReport {
    pub per_n: Vec<GacsRow>,
    /// `G_n/n` at the largest grid point — the finite-size stand-in for the
    /// limsup; no extrapolation is attempted.
    pub rate_estimate: f64,
    /// Closed-form entropy rate of the source, when one exists.
    pub reference_rate: Option<f64>,
    pub gap: Option<f64>,
    /// Whether `G_n/n` was non-increasing along the grid (tolerance 0.01);
    /// a convergence diagnostic, not a theorem.
    pub trend_nonincreasing: bool,
}

/// Runs [`gacs_block_complexity`] across a grid and attaches the
/// Kolmogorov–Sinai reference rate.
pub fn gacs_rate(
    source: &SymbolicSource,
    mu: &SemiMeasure,
    n_grid: &[usize],
    mc: MonteCarloOptions,
) -> Result<GacsClassicalReport> {
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "n grid must be strictly increasing and nonempty".into(),
        ));
    }
    let mut per_n = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let est = gacs_block_complexity(source, mu, n, mc)?;
        let h_n = if enumerable(source.alphabet(), n).is_some() {
            Some(source.block_distribution(n)?.entropy())
        } else {
            None
        };
        per_n.push(GacsRow {
            n,
            g_n: est.bits,
            g_rate: est.bits / n as f64,
            h_n,
            h_rate: h_n.map(|h| h / n as f64),
            standard_error: est.standard_error,
            exhaustive: est.exhaustive,
        });
    }
    let rate_estimate = per_n.last().unwrap().g_rate;
    let reference_rate = source.closed_form_rate();
    let trend_nonincreasing = per_n
        .windows(2)
        .all(|w| w[1].g_rate <= w[0].g_rate + 0.01);
    Ok(GacsClassicalReport {
        per_n,
        rate_estimate,
        reference_rate,
        gap: reference_rate.map(|h| rate_estimate - h),
        trend_nonincreasing,
    })
}

/// Per-sequence complexity rates `−log₂ μ(prefix_n)/n` along a prefix grid
/// — the almost-everywhere convergence statement rendered as one
/// trajectory.
pub fn per_sequence_rate(
    mu: &SemiMeasure,
    path: &SymbolString,
    n_grid: &[usize],
) -> Result<Vec<(usize, f64)>> {
    if path.alphabet() != mu.alphabet() {
        return Err(Error::InvalidInput("alphabet mismatch".into()));
    }
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput(
            "n grid must be strictly increasing and nonempty".into(),
        ));
    }
    if *n_grid.last().unwrap() > path.len() || n_grid[0] == 0 {
        return Err(Error::InvalidInput(format!(
            "grid must lie in 1..={}",
            path.len()
        )));
    }
    let mut out = Vec::with_capacity(n_grid.len());
    let mut ev = mu.evaluator();
    let mut next = 0usize;
    for (i, &s) in path.symbols().iter().enumerate() {
        ev.push(s);
        if next < n_grid.len() && i + 1 == n_grid[next] {
            let lp = ev.log2_mu();
            if lp == f64::NEG_INFINITY {
                return Err(Error::Positivity(format!(
                    "μ vanishes on the length-{} prefix",
                    i + 1
                )));
            }
            out.push((i + 1, -lp / (i + 1) as f64));
            next += 1;
        }
        if next == n_grid.len() {
            break;
        }
    }
    Ok(out)
}

/// Which of the four canonical word classes a set describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TypicalSetKind {
    /// Entropy-typical for the source law.
    A,
    /// μ-heavy words inside A.
    AHat,
    /// μ-heavy words outside A.
    ATilde,
    /// μ-light words (below the threshold).
    B,
}

/// A set of length-n words with its masses under both laws.
#[derive(Debug, Clone, Serialize)]
pub struct TypicalSet {
    pub kind: TypicalSetKind,
    pub n: usize,
    pub eps: f64,
    pub cardinality: usize,
    /// Source mass ν(set).
    pub nu_mass: f64,
    /// Semi-measure mass μ(set).
    pub mu_mass: f64,
    /// Word ranks, kept for set-algebra checks; omitted from serialized
    /// reports.
    #[serde(skip)]
    pub ranks: Vec<usize>,
}

/// Exhaustive typical-set decomposition at one (n, ε).
#[derive(Debug, Clone, Serialize)]
pub struct TypicalSetsReport {
    pub n: usize,
    pub eps: f64,
    /// Entropy rate used for the typicality window.
    pub h: f64,
    /// The μ-threshold is `2^{−threshold_exponent}`.
    pub threshold_exponent: f64,
    pub a: TypicalSet,
    pub a_hat: TypicalSet,
    pub a_tilde: TypicalSet,
    pub b: TypicalSet,
    /// Measured excess `α_n = log₂ #{μ-heavy} − threshold_exponent`;
    /// `None` when no word is μ-heavy.
    pub alpha_n: Option<f64>,
    /// Exhaustive check of `ν(Â) ≤ 2^{−nε + α_n + 1}`.
    pub a_hat_mass_bound: f64,
    pub a_hat_mass_bound_holds: bool,
}

/// Splits the length-n words by entropy-typicality for `dist` (window
/// `|−(1/n)log₂ ν(s) − h| ≤ ε`) and by μ-weight against the threshold
/// `2^{−threshold_exponent}` (default exponent `n(h − 2ε)`).
pub fn typical_sets(
    dist: &BlockDistribution,
    h: f64,
    eps: f64,
    mu: &SemiMeasure,
    threshold_exponent: Option<f64>,
) -> Result<TypicalSetsReport> {
    if dist.alphabet() != mu.alphabet() {
        return Err(Error::InvalidInput("alphabet mismatch".into()));
    }
    if eps <= 0.0 {
        return Err(Error::InvalidInput("ε must be positive".into()));
    }
    let n = dist.block_len();
    if n == 0 {
        return Err(Error::InvalidInput("block length must be positive".into()));
    }
    let k = dist.alphabet();
    let te = threshold_exponent.unwrap_or(n as f64 * (h - 2.0 * eps));
    let threshold = (-te).exp2();

    let mut sets: Vec<(TypicalSetKind, Vec<usize>, f64, f64)> = vec![
        (TypicalSetKind::A, vec![], 0.0, 0.0),
        (TypicalSetKind::AHat, vec![], 0.0, 0.0),
        (TypicalSetKind::ATilde, vec![], 0.0, 0.0),
        (TypicalSetKind::B, vec![], 0.0, 0.0),
    ];
    let mut heavy_count = 0usize;
    for (rank, &nu) in dist.probabilities().iter().enumerate() {
        let word = SymbolString::new(rank_to_word(rank, k, n), k)?;
        let mu_s = mu.prob(&word)?;
        let in_a = nu > 0.0 && ((-nu.log2()) / n as f64 - h).abs() <= eps;
        let heavy = mu_s >= threshold;
        if heavy {
            heavy_count += 1;
        }
        let mut add = |idx: usize| {
            sets[idx].1.push(rank);
            sets[idx].2 += nu;
            sets[idx].3 += mu_s;
        };
        if in_a {
            add(0);
        }
        match (heavy, in_a) {
            (true, true) => add(1),
            (true, false) => add(2),
            (false, _) => add(3),
        }
    }

    let alpha_n = if heavy_count > 0 {
        Some((heavy_count as f64).log2() - te)
    } else {
        None
    };
    let build = |(kind, ranks, nu_mass, mu_mass): (TypicalSetKind, Vec<usize>, f64, f64)| {
        TypicalSet {
            kind,
            n,
            eps,
            cardinality: ranks.len(),
            nu_mass,
            mu_mass,
            ranks,
        }
    };
    let mut it = sets.into_iter();
    let a = build(it.next().unwrap());
    let a_hat = build(it.next().unwrap());
    let a_tilde = build(it.next().unwrap());
    let b = build(it.next().unwrap());

    let a_hat_mass_bound = match alpha_n {
        Some(alpha) => (-(n as f64) * eps + alpha + 1.0).exp2(),
        None => 0.0,
    };
    let a_hat_mass_bound_holds = a_hat.nu_mass <= a_hat_mass_bound + 1e-12;
    Ok(TypicalSetsReport {
        n,
        eps,
        h,
        threshold_exponent: te,
        a,
        a_hat,
        a_tilde,
        b,
        alpha_n,
        a_hat_mass_bound,
        a_hat_mass_bound_holds,
    })
}

/// Result of the exhaustive counting bound `#{s : μ(s) ≥ 2^{−c}} ≤ 2^c`.
#[derive(Debug, Clone, Serialize)]
pub struct CountingReport {
    pub n: usize,
    pub c_bits: f64,
    pub count: usize,
    pub bound: f64,
    pub holds: bool,
    /// `count / 2^c`; close to 1 when the bound is nearly saturated.
    pub tightness: f64,
}

/// Exhaustively counts the μ-heavy words of length n against the mass
/// bound: since `Σ μ ≤ 1`, at most `2^c` words can carry `≥ 2^{−c}` each.
pub fn counting_bound_check(mu: &SemiMeasure, c_bits: f64, n: usize) -> Result<CountingReport> {
    let k = mu.alphabet();
    let total = enumerable(k, n).ok_or(Error::ResourceLimit {
        what: "counting-bound enumeration",
        requested: (k as u64).checked_pow(n as u32).unwrap_or(u64::MAX),
        cap: BLOCK_ENUMERATION_CAP,
    })?;
    let threshold = (-c_bits).exp2();
    let mut count = 0usize;
    for rank in 0..total as usize {
        let word = SymbolString::new(rank_to_word(rank, k, n), k)?;
        if mu.prob(&word)? >= threshold {
            count += 1;
        }
    }
    let bound = c_bits.exp2();
    Ok(CountingReport {
        n,
        c_bits,
        count,
        bound,
        holds: (count as f64) <= bound * (1.0 + 1e-12),
        tightness: count as f64 / bound,
    })
}

/// Finite-n inequality chain bounding expected complexity by entropy.
#[derive(Debug, Clone, Serialize)]
pub struct ChainRow {
    pub n: usize,
    /// Expected complexity of the *length-weighted* semi-measure.
    pub g_n: f64,
    pub h_n: f64,
    /// Dominance cost `log₂(1/w)` of the matching member.
    pub weight_bits: f64,
    /// Length cost `log₂(1/δ(n))`.
    pub delta_bits: f64,
    /// Normalizer cost `log₂ Z`.
    pub normalizer_bits: f64,
    pub bound: f64,
    pub slack: f64,
    pub holds: bool,
}

/// For a source that *is* a family member, verifies the exact finite-n
/// chain
///
/// ```text
/// G_n ≤ H_n + log₂(1/w) + log₂(1/δ(n)) + log₂ Z
/// ```
///
/// where `G_n` is the expected complexity of the length-weighted mixture
/// `f(s) = (δ(|s|)/Z)·μ(s)`. This is the finite-size skeleton of the
/// upper half of the complexity-equals-entropy argument.
pub fn chain_bound_check(
    source: &SymbolicSource,
    lw: &LengthWeighted,
    n: usize,
) -> Result<ChainRow> {
    let member = match source {
        SymbolicSource::Bernoulli { p } => Member::Bernoulli { p: p.clone() },
        SymbolicSource::Markov {
            transition,
            stationary,
        } => Member::Markov {
            transition: transition.clone(),
            stationary: stationary.clone(),
        },
        SymbolicSource::Orbit { .. } => {
            return Err(Error::InvalidFamily(
                "orbit sources are not mixture members".into(),
            ))
        }
    };
    let base = lw.base();
    let (_, w) = base.family().find_member(&member).ok_or_else(|| {
        Error::InvalidFamily(format!(
            "source {} is not a member of the family",
            member.describe()
        ))
    })?;
    let dist = source.block_distribution(n)?;
    let h_n = dist.entropy();

    let k = dist.alphabet();
    let mut g_n = 0.0;
    for (rank, &nu) in dist.probabilities().iter().enumerate() {
        if nu == 0.0 {
            continue;
        }
        let word = SymbolString::new(rank_to_word(rank, k, n), k)?;
        let lp = lw.log2_prob(&word)?;
        if lp == f64::NEG_INFINITY {
            return Err(Error::Positivity(
                "length-weighted mixture vanished on a ν-positive word".into(),
            ));
        }
        g_n += nu * (-lp);
    }

    let weight_bits = -(w.log2());
    let delta_bits = -(lw.weighting().delta(n).log2());
    let normalizer_bits = lw.weighting().normalizer().log2();
    let bound = h_n + weight_bits + delta_bits + normalizer_bits;
    Ok(ChainRow {
        n,
        g_n,
        h_n,
        weight_bits,
        delta_bits,
        normalizer_bits,
        bound,
        slack: bound - g_n,
        holds: g_n <= bound + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semimeasure::{LengthWeighting, WeightedFamily};

    fn default_mu() -> SemiMeasure {
        SemiMeasure::mixture(WeightedFamily::default_binary())
    }

    #[test]
    fn point_mass_source_stays_cheap() {
        // ν = point mass on s, μ contains the matching point mass with
        // weight ¼: expected complexity at most 2 bits
        let word = vec![1u8, 1, 0, 1, 0, 0, 1];
        let n = word.len();
        let mut probs = vec![0.0; 1 << n];
        probs[crate::symbolic::word_rank(&word, 2)] = 1.0;
        let dist = BlockDistribution::new(2, n, probs, false).unwrap();
        let mu = SemiMeasure::mixture(
            WeightedFamily::new(
                2,
                vec![Member::PointMass { word: word.clone() }, Member::Kt],
                vec![0.25, 0.25],
            )
            .unwrap(),
        );
        let g = gacs_block_complexity_dist(&dist, &mu).unwrap();
        assert!(g <= 2.0 + 1e-12, "G = {g}");
    }

    #[test]
    fn uniform_source_uniform_member_is_exact() {
        // uniform words, uniform member of weight w: G_n = n + log₂(1/w)
        let src = SymbolicSource::bernoulli(vec![0.5, 0.5]).unwrap();
        let mu = SemiMeasure::mixture(
            WeightedFamily::new(2, vec![Member::Uniform], vec![0.125]).unwrap(),
        );
        for n in [1usize, 4, 9] {
            let est = gacs_block_complexity(&src, &mu, n, MonteCarloOptions::default()).unwrap();
            assert!(est.exhaustive);
            assert!((est.bits - (n as f64 + 3.0)).abs() < 1e-9, "n={n}: {}", est.bits);
        }
    }

    #[test]
    fn bernoulli_03_block_rate_monte_carlo() {
        let src = SymbolicSource::bernoulli(vec![0.7, 0.3]).unwrap();
        let est = gacs_block_complexity(
            &src,
            &default_mu(),
            1024,
            MonteCarloOptions {
                samples: 60,
                seed: 11,
            },
        )
        .unwrap();
        assert!(!est.exhaustive);
        let rate = est.bits / 1024.0;
        assert!((0.88..=0.93).contains(&rate), "rate = {rate}");
        assert!(est.standard_error.unwrap() > 0.0);
    }

    #[test]
    fn gacs_rate_report_fair_coin() {
        let src = SymbolicSource::bernoulli(vec![0.5, 0.5]).unwrap();
        let report = gacs_rate(
            &src,
            &default_mu(),
            &[8, 10, 4096],
            MonteCarloOptions {
                samples: 30,
                seed: 3,
            },
        )
        .unwrap();
        assert!((report.rate_estimate - 1.0).abs() < 0.02);
        assert_eq!(report.reference_rate, Some(1.0));
        assert!(report.gap.unwrap().abs() < 0.02);
        // small-n rows are exhaustive with H_n = n
        assert!(report.per_n[0].exhaustive);
        assert!((report.per_n[0].h_n.unwrap() - 8.0).abs() < 1e-9);
        assert!(report.per_n[2].h_n.is_none());
    }

    #[test]
    fn per_sequence_constant_string_under_kt() {
        let mu = SemiMeasure::mixture(
            WeightedFamily::new(2, vec![Member::Kt], vec![1.0]).unwrap(),
        );
        let path = SymbolString::binary(vec![0; 4096]).unwrap();
        let rates = per_sequence_rate(&mu, &path, &[16, 256, 4096]).unwrap();
        // O(log n / n): rate collapses toward zero
        assert!(rates[0].1 < 0.35);
        assert!(rates[2].1 < 0.004);
        assert!(rates.windows(2).all(|w| w[1].1 < w[0].1));
    }

    #[test]
    fn per_sequence_matches_expected_rate() {
        // mean of per-sequence endpoints ≈ Monte-Carlo G_n/n within 3 SE
        let src = SymbolicSource::bernoulli(vec![0.7, 0.3]).unwrap();
        let mu = default_mu();
        let n = 256usize;
        let mut endpoints = Vec::new();
        for seed in 1000..1100u64 {
            let path = src.sample_path(n, seed).unwrap();
            let r = per_sequence_rate(&mu, &path, &[n]).unwrap();
            endpoints.push(r[0].1);
        }
        let mean1 = endpoints.iter().sum::<f64>() / endpoints.len() as f64;
        let se1 = {
            let var = endpoints.iter().map(|v| (v - mean1).powi(2)).sum::<f64>()
                / (endpoints.len() as f64 - 1.0);
            (var / endpoints.len() as f64).sqrt()
        };
        let est = gacs_block_complexity(
            &src,
            &mu,
            n,
            MonteCarloOptions {
                samples: 100,
                seed: 555,
            },
        )
        .unwrap();
        let mean2 = est.bits / n as f64;
        let se2 = est.standard_error.unwrap() / n as f64;
        assert!(
            (mean1 - mean2).abs() <= 3.0 * (se1 + se2),
            "mean1={mean1}, mean2={mean2}, se1={se1}, se2={se2}"
        );
    }

    #[test]
    fn typical_sets_uniform_source_is_everything() {
        let src = SymbolicSource::bernoulli(vec![0.5, 0.5]).unwrap();
        let dist = src.block_distribution(6).unwrap();
        let report = typical_sets(&dist, 1.0, 0.05, &default_mu(), None).unwrap();
        assert_eq!(report.a.cardinality, 64);
        assert!((report.a.nu_mass - 1.0).abs() < 1e-12);
        assert_eq!(report.a_tilde.cardinality, 0);
    }

    #[test]
    fn typical_sets_bernoulli_09_oracle() {
        // Bernoulli(0.9), n=12, ε=0.1: the typicality window catches only
        // the single-one shell, so ν(A) = 12·0.9^11·0.1
        let src = SymbolicSource::bernoulli(vec![0.9, 0.1]).unwrap();
        let dist = src.block_distribution(12).unwrap();
        let h = src.closed_form_rate().unwrap();
        let report = typical_sets(&dist, h, 0.1, &default_mu(), None).unwrap();
        assert_eq!(report.a.cardinality, 12);
        let oracle = 12.0 * 0.9f64.powi(11) * 0.1;
        assert!((report.a.nu_mass - oracle).abs() < 1e-12);
        assert!(report.a_hat_mass_bound_holds);
        // set algebra: Â ⊆ A, Ã ∩ A = ∅, Â ∪ Ã = heavy, B = complement
        let a: std::collections::HashSet<_> = report.a.ranks.iter().collect();
        assert!(report.a_hat.ranks.iter().all(|r| a.contains(r)));
        assert!(report.a_tilde.ranks.iter().all(|r| !a.contains(r)));
        assert_eq!(
            report.a_hat.cardinality + report.a_tilde.cardinality + report.b.cardinality,
            1 << 12
        );
    }

    #[test]
    fn typical_sets_dichotomy_and_masses() {
        let src = SymbolicSource::bernoulli(vec![0.7, 0.3]).unwrap();
        let dist = src.block_distribution(10).unwrap();
        let h = src.closed_form_rate().unwrap();
        for eps in [0.05, 0.2] {
            let r = typical_sets(&dist, h, eps, &default_mu(), None).unwrap();
            assert!((r.a.nu_mass + (1.0 - r.a.nu_mass) - 1.0).abs() < 1e-12);
            assert!(
                (r.a_hat.mu_mass + r.a_tilde.mu_mass + r.b.mu_mass - 0.5).abs() < 1e-9,
                "μ masses partition the total family weight"
            );
            assert!(r.a_hat_mass_bound_holds);
        }
    }

    #[test]
    fn counting_bound_kt_oracle() {
        // KT at n=4: only 0000 and 1111 reach 1/8
        let kt = SemiMeasure::mixture(
            WeightedFamily::new(2, vec![Member::Kt], vec![1.0]).unwrap(),
        );
        let report = counting_bound_check(&kt, 3.0, 4).unwrap();
        assert_eq!(report.count, 2);
        assert!(report.holds);
    }

    #[test]
    fn counting_bound_tight_within_factor_two() {
        // eight point masses of weight 1/8: exactly 2^3 words at mass 2^{-3}
        let words: Vec<Vec<u8>> = (0..8usize).map(|r| rank_to_word(r, 2, 4)).collect();
        let members: Vec<Member> = words
            .iter()
            .map(|w| Member::PointMass { word: w.clone() })
            .collect();
        let fam = WeightedFamily::new(2, members, vec![0.125; 8]).unwrap();
        let mu = SemiMeasure::mixture(fam);
        let report = counting_bound_check(&mu, 3.0, 4).unwrap();
        assert_eq!(report.count, 8);
        assert!(report.holds);
        assert!(report.tightness >= 0.5);
    }

    #[test]
    fn counting_bound_holds_for_default_family() {
        let mu = default_mu();
        for n in [4usize, 8, 12] {
            for c in [1.0f64, 2.5, 5.0, 10.0] {
                assert!(counting_bound_check(&mu, c, n).unwrap().holds);
            }
        }
    }

    #[test]
    fn chain_bound_bernoulli_member() {
        let src = SymbolicSource::bernoulli(vec![0.7, 0.3]).unwrap();
        let lw = LengthWeighted::new(LengthWeighting::inverse_log2(), default_mu());
        for n in [2usize, 6, 10] {
            let row = chain_bound_check(&src, &lw, n).unwrap();
            assert!(row.holds, "chain violated at n={n}: {row:?}");
            assert!(row.slack > 0.0);
            // entropy reference is exact for i.i.d. sources
            let h = src.closed_form_rate().unwrap();
            assert!((row.h_n - n as f64 * h).abs() < 1e-9);
        }
    }

    #[test]
    fn chain_bound_markov_member() {
        let transition = vec![vec![0.9, 0.1], vec![0.2, 0.8]];
        let src = SymbolicSource::markov(transition.clone()).unwrap();
        let mut members = WeightedFamily::default_binary().members().to_vec();
        members.push(Member::markov(transition).unwrap());
        let fam = WeightedFamily::with_dyadic_weights(2, members).unwrap();
        let lw = LengthWeighted::new(
            LengthWeighting::inverse_log2(),
            SemiMeasure::mixture(fam),
        );
        let row = chain_bound_check(&src, &lw, 8).unwrap();
        assert!(row.holds);
    }

    #[test]
    fn chain_bound_rejects_non_members() {
        let src = SymbolicSource::bernoulli(vec![0.67, 0.33]).unwrap();
        let lw = LengthWeighted::new(LengthWeighting::inverse_log2(), default_mu());
        assert!(matches!(
            chain_bound_check(&src, &lw, 4),
            Err(Error::InvalidFamily(_))
        ));
    }

    #[test]
    fn positivity_violation_detected() {
        // point-mass-only μ vanishes on some ν-positive word
        let mu = SemiMeasure::mixture(
            WeightedFamily::new(2, vec![Member::PointMass { word: vec![0, 0] }], vec![0.5])
                .unwrap(),
        );
        let src = SymbolicSource::bernoulli(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            gacs_block_complexity(&src, &mu, 2, MonteCarloOptions::default()),
            Err(Error::Positivity(_))
        ));
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let src = SymbolicSource::bernoulli(vec![0.7, 0.3]).unwrap();
        let mu = default_mu();
        let opts = MonteCarloOptions {
            samples: 10,
            seed: 99,
        };
        let a = gacs_block_complexity(&src, &mu, 64, opts).unwrap();
        let b = gacs_block_complexity(&src, &mu, 64, opts).unwrap();
        assert_eq!(a.bits, b.bits);
    }

    #[test]
    fn orbit_beyond_cap_is_rejected() {
        use crate::symbolic::{CircleMap, IntervalPartition};
        use num_rational::BigRational;
        use num_bigint::BigInt;
        let src = SymbolicSource::orbit(
            CircleMap::Doubling,
            IntervalPartition::binary(),
            BigRational::new(BigInt::from(1), BigInt::from(3)),
            64,
        )
        .unwrap();
        assert!(matches!(
            gacs_block_complexity(&src, &default_mu(), 64, MonteCarloOptions::default()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn orbit_within_cap_uses_empirical_blocks() {
        use crate::symbolic::{CircleMap, IntervalPartition};
        use num_rational::BigRational;
        use num_bigint::BigInt;
        // doubling map from 1/3: alternating 0101… — empirical blocks are
        // the two alternating words, μ-complexity stays finite
        let src = SymbolicSource::orbit(
            CircleMap::Doubling,
            IntervalPartition::binary(),
            BigRational::new(BigInt::from(1), BigInt::from(3)),
            128,
        )
        .unwrap();
        let est = gacs_block_complexity(&src, &default_mu(), 6, MonteCarloOptions::default())
            .unwrap();
        assert!(est.exhaustive);
        assert!(est.bits > 0.0 && est.bits.is_finite());
    }
}
