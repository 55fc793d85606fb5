//! Computable stand-ins for universal semi-measures.
//!
//! A semi-measure assigns words `μ(s) ≥ 0` with total mass at most 1. The
//! universal ones dominate every computable measure up to a constant,
//!
//! ```text
//! c_ν · ν(s) ≤ μ(s)    for all words s,
//! ```
//!
//! which is exactly what makes `−log₂ μ(s)` behave like a complexity. True
//! universal semi-measures are not computable, so this module builds
//! explicit finite surrogates: weighted mixtures
//!
//! ```text
//! μ(s) = Σ_k w_k ν_k(s),      Σ_k w_k ≤ 1,
//! ```
//!
//! whose members are exact word laws (Bernoulli, Markov), the
//! Krichevsky–Trofimov estimator and its order-1 per-context variant, plus
//! degenerate members for stress tests. Within the mixture the dominance
//! constant for member k is simply its weight: `w_k ν_k(s) ≤ μ(s)` with
//! equality defect measurable word by word.
//!
//! A mixture is a *process*: each member is a probability law per length
//! and consistent under extension, so `Σ_a μ(sa) = μ(s)`. To get a genuine
//! semi-measure over all of `Ω*` one multiplies in a summable length
//! weighting, by default
//!
//! ```text
//! δ(n) = 1 / (n log₂² n)   for n ≥ 2,
//! ```
//!
//! with explicit reserved weights for lengths 0 and 1 and the normalizer
//! `Z = Σ δ(n)` evaluated once with an integral tail bound.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::symbolic::{rank_to_word, SymbolString, SymbolicSource};

/// log₂ of Σ 2^{xᵢ}, stable against underflow; −∞ inputs are legal.
pub fn log2_sum_exp2(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|x| (x - m).exp2()).sum::<f64>().log2()
}

/// Order-0 Krichevsky–Trofimov probability of a word: the sequential
/// product of `(c_a + ½)/(t + k/2)` add-half estimates. For the binary
/// alphabet `KT("0000") = ½·¾·⅚·⅞ = 35/128`.
pub fn kt_probability(word: &SymbolString) -> f64 {
    let mut state = MemberState::kt(word.alphabet());
    word.symbols()
        .iter()
        .map(|&s| state.log2_next(s))
        .sum::<f64>()
        .exp2()
}

/// Order-1 Markov-KT probability: an independent KT estimator per
/// predecessor context, uniform on the first symbol.
pub fn markov_kt_probability(word: &SymbolString) -> f64 {
    let mut state = MemberState::markov_kt(word.alphabet());
    word.symbols()
        .iter()
        .map(|&s| state.log2_next(s))
        .sum::<f64>()
        .exp2()
}

/// One member of a weighted family: an exact or estimated word law,
/// normalized per length and consistent under extension.
#[derive(Debug, Clone, PartialEq)]
pub enum Member {
    /// Exact i.i.d. law.
    Bernoulli { p: Vec<f64> },
    /// Exact stationary Markov law.
    Markov {
        transition: Vec<Vec<f64>>,
        stationary: Vec<f64>,
    },
    /// Order-0 Krichevsky–Trofimov estimator.
    Kt,
    /// Order-1 per-context Krichevsky–Trofimov estimator.
    MarkovKt,
    /// Uniform law `k^{−n}` per length.
    Uniform,
    /// Point mass on `word` extended by the zero symbol forever.
    PointMass { word: Vec<u8> },
}

impl Member {
    pub fn bernoulli(p: Vec<f64>) -> Result<Self> {
        match SymbolicSource::bernoulli(p)? {
            SymbolicSource::Bernoulli { p } => Ok(Member::Bernoulli { p }),
            _ => unreachable!(),
        }
    }

    pub fn markov(transition: Vec<Vec<f64>>) -> Result<Self> {
        match SymbolicSource::markov(transition)? {
            SymbolicSource::Markov {
                transition,
                stationary,
            } => Ok(Member::Markov {
                transition,
                stationary,
            }),
            _ => unreachable!(),
        }
    }

    /// Does this member assign positive mass to every word? (The KT
    /// estimators and nondegenerate exact laws do; point masses do not.)
    pub fn strictly_positive(&self) -> bool {
        match self {
            Member::Bernoulli { p } => p.iter().all(|&x| x > 0.0),
            Member::Markov {
                transition,
                stationary,
            } => {
                stationary.iter().all(|&x| x > 0.0)
                    && transition.iter().flatten().all(|&x| x > 0.0)
            }
            Member::Kt | Member::MarkovKt | Member::Uniform => true,
            Member::PointMass { .. } => false,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Member::Bernoulli { p } => format!("bernoulli({:?})", p),
            Member::Markov { transition, .. } => format!("markov({:?})", transition),
            Member::Kt => "kt".into(),
            Member::MarkovKt => "markov-kt".into(),
            Member::Uniform => "uniform".into(),
            Member::PointMass { word } => format!("point-mass({:?})", word),
        }
    }

    /// Fresh sequential evaluator for this member.
    pub fn evaluator(&self, alphabet: u8) -> MemberState {
        match self {
            Member::Bernoulli { p } => MemberState::Bernoulli {
                log2p: p.iter().map(|&x| x.log2()).collect(),
            },
            Member::Markov {
                transition,
                stationary,
            } => MemberState::Markov {
                log2t: transition
                    .iter()
                    .map(|row| row.iter().map(|&x| x.log2()).collect())
                    .collect(),
                log2pi: stationary.iter().map(|&x| x.log2()).collect(),
                prev: None,
            },
            Member::Kt => MemberState::kt(alphabet),
            Member::MarkovKt => MemberState::markov_kt(alphabet),
            Member::Uniform => MemberState::Uniform {
                log2k: (alphabet as f64).log2(),
            },
            Member::PointMass { word } => MemberState::PointMass {
                word: word.clone(),
                pos: 0,
                alive: true,
            },
        }
    }

    /// log₂ ν(word) from a fresh evaluator.
    pub fn log2_prob(&self, word: &SymbolString) -> f64 {
        let mut state = self.evaluator(word.alphabet());
        word.symbols().iter().map(|&s| state.log2_next(s)).sum()
    }

    fn alphabet_hint(&self) -> Option<u8> {
        match self {
            Member::Bernoulli { p } => Some(p.len() as u8),
            Member::Markov { transition, .. } => Some(transition.len() as u8),
            _ => None,
        }
    }
}

/// Sequential state of one member along a growing word; `log2_next` returns
/// `log₂ P(symbol | past)` and folds the symbol in.
#[derive(Debug, Clone)]
pub enum MemberState {
    Bernoulli {
        log2p: Vec<f64>,
    },
    Markov {
        log2t: Vec<Vec<f64>>,
        log2pi: Vec<f64>,
        prev: Option<u8>,
    },
    Kt {
        counts: Vec<u64>,
        total: u64,
        half_k: f64,
    },
    MarkovKt {
        counts: Vec<Vec<u64>>,
        totals: Vec<u64>,
        half_k: f64,
        log2k: f64,
        prev: Option<u8>,
    },
    Uniform {
        log2k: f64,
    },
    PointMass {
        word: Vec<u8>,
        pos: usize,
        alive: bool,
    },
}

impl MemberState {
    fn kt(alphabet: u8) -> Self {
        MemberState::Kt {
            counts: vec![0; alphabet as usize],
            total: 0,
            half_k: alphabet as f64 / 2.0,
        }
    }

    fn markov_kt(alphabet: u8) -> Self {
        let k = alphabet as usize;
        MemberState::MarkovKt {
            counts: vec![vec![0; k]; k],
            totals: vec![0; k],
            half_k: alphabet as f64 / 2.0,
            log2k: (alphabet as f64).log2(),
            prev: None,
        }
    }

    pub fn log2_next(&mut self, symbol: u8) -> f64 {
        let a = symbol as usize;
        match self {
            MemberState::Bernoulli { log2p } => log2p[a],
            MemberState::Markov { log2t, log2pi, prev } => {
                let lp = match prev {
                    None => log2pi[a],
                    Some(p) => log2t[*p as usize][a],
                };
                *prev = Some(symbol);
                lp
            }
            MemberState::Kt {
                counts,
                total,
                half_k,
            } => {
                let lp = ((counts[a] as f64 + 0.5) / (*total as f64 + *half_k)).log2();
                counts[a] += 1;
                *total += 1;
                lp
            }
            MemberState::MarkovKt {
                counts,
                totals,
                half_k,
                log2k,
                prev,
            } => {
                let lp = match prev {
                    None => -*log2k,
                    Some(p) => {
                        let ctx = *p as usize;
                        ((counts[ctx][a] as f64 + 0.5) / (totals[ctx] as f64 + *half_k)).log2()
                    }
                };
                if let Some(p) = prev {
                    let ctx = *p as usize;
                    counts[ctx][a] += 1;
                    totals[ctx] += 1;
                }
                *prev = Some(symbol);
                lp
            }
            MemberState::Uniform { log2k } => -*log2k,
            MemberState::PointMass { word, pos, alive } => {
                let expected = word.get(*pos).copied().unwrap_or(0);
                *pos += 1;
                if symbol != expected {
                    *alive = false;
                }
                if *alive {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }
}

/// A validated weighted family: members over a common alphabet with
/// strictly positive weights summing to at most 1.
#[derive(Debug, Clone)]
pub struct WeightedFamily {
    alphabet: u8,
    members: Vec<Member>,
    weights: Vec<f64>,
}

impl WeightedFamily {
    pub fn new(alphabet: u8, members: Vec<Member>, weights: Vec<f64>) -> Result<Self> {
        if members.is_empty() || members.len() != weights.len() {
            return Err(Error::InvalidFamily(format!(
                "{} members vs {} weights",
                members.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|&w| w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidFamily(
                "weights must be strictly positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidFamily(format!(
                "weights sum to {total} > 1"
            )));
        }
        for m in &members {
            if let Some(k) = m.alphabet_hint() {
                if k != alphabet {
                    return Err(Error::InvalidFamily(format!(
                        "member {} has alphabet {k}, family has {alphabet}",
                        m.describe()
                    )));
                }
            }
        }
        Ok(WeightedFamily {
            alphabet,
            members,
            weights,
        })
    }

    /// The default binary family: Bernoulli(p) for p = 0.05, 0.10, …, 0.95,
    /// then order-1 Markov-KT, then order-0 KT, with weights proportional
    /// to 2^{−index} and normalized to total mass ½.
    pub fn default_binary() -> Self {
        let mut members: Vec<Member> = (1..=19)
            .map(|i| Member::bernoulli(vec![1.0 - i as f64 / 20.0, i as f64 / 20.0]).unwrap())
            .collect();
        members.push(Member::MarkovKt);
        members.push(Member::Kt);
        Self::with_dyadic_weights(2, members).expect("default family is valid")
    }

    /// Builds a family with weights ∝ 2^{−index}, normalized to sum ½.
    pub fn with_dyadic_weights(alphabet: u8, members: Vec<Member>) -> Result<Self> {
        let raw: Vec<f64> = (0..members.len()).map(|i| (-(i as f64)).exp2()).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| 0.5 * w / total).collect();
        WeightedFamily::new(alphabet, members, weights)
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Index and weight of the member equal to `target`, if present.
    pub fn find_member(&self, target: &Member) -> Option<(usize, f64)> {
        self.members
            .iter()
            .position(|m| m == target)
            .map(|i| (i, self.weights[i]))
    }
}

/// The mixture semi-measure `μ(s) = Σ_k w_k ν_k(s)`.
#[derive(Debug, Clone)]
pub struct SemiMeasure {
    family: WeightedFamily,
}

impl SemiMeasure {
    pub fn mixture(family: WeightedFamily) -> Self {
        SemiMeasure { family }
    }

    pub fn family(&self) -> &WeightedFamily {
        &self.family
    }

    pub fn alphabet(&self) -> u8 {
        self.family.alphabet
    }

    /// Fresh incremental evaluator (the cheap way to scan a long path's
    /// prefixes).
    pub fn evaluator(&self) -> MixtureEvaluator {
        MixtureEvaluator {
            log2w: self.family.weights.iter().map(|w| w.log2()).collect(),
            states: self
                .family
                .members
                .iter()
                .map(|m| m.evaluator(self.family.alphabet))
                .collect(),
            running: vec![0.0; self.family.members.len()],
            len: 0,
        }
    }

    pub fn log2_prob(&self, word: &SymbolString) -> Result<f64> {
        if word.alphabet() != self.family.alphabet {
            return Err(Error::InvalidInput("alphabet mismatch".into()));
        }
        let mut ev = self.evaluator();
        for &s in word.symbols() {
            ev.push(s);
        }
        Ok(ev.log2_mu())
    }

    pub fn prob(&self, word: &SymbolString) -> Result<f64> {
        Ok(self.log2_prob(word)?.exp2())
    }

    /// The complexity surrogate `−log₂ μ(s)`; errors on zero mass.
    pub fn complexity_surrogate(&self, word: &SymbolString) -> Result<f64> {
        let lp = self.log2_prob(word)?;
        if lp == f64::NEG_INFINITY {
            return Err(Error::Positivity(format!(
                "mixture assigns zero mass to {:?}",
                word.symbols()
            )));
        }
        Ok(-lp)
    }

    /// `Σ_{|s|=n} μ(s)` by exhaustive enumeration (cap `k^n ≤ 2^20`).
    /// Mixtures of per-length laws give exactly the weight total.
    pub fn total_mass(&self, n: usize) -> Result<f64> {
        let k = self.family.alphabet;
        let count = (k as u64)
            .checked_pow(n as u32)
            .filter(|&c| c <= crate::symbolic::BLOCK_ENUMERATION_CAP)
            .ok_or(Error::ResourceLimit {
                what: "semi-measure mass enumeration",
                requested: u64::MAX,
                cap: crate::symbolic::BLOCK_ENUMERATION_CAP,
            })?;
        let mut mass = 0.0;
        for rank in 0..count as usize {
            let word = SymbolString::new(rank_to_word(rank, k, n), k)?;
            mass += self.prob(&word)?;
        }
        Ok(mass)
    }

    /// Exhaustively checks `w · ν(s) ≤ μ(s)` for all words up to `n_max`,
    /// reporting the worst ratio and the first violating word (if the
    /// hypothesis fails — useful for models *outside* the family).
    pub fn dominance_check(
        &self,
        model: &Member,
        weight: f64,
        n_max: usize,
    ) -> Result<DominanceReport> {
        let k = self.family.alphabet;
        let mut worst_ratio = f64::NEG_INFINITY;
        let mut worst_word = None;
        for n in 0..=n_max {
            let count = (k as u64)
                .checked_pow(n as u32)
                .filter(|&c| c <= crate::symbolic::BLOCK_ENUMERATION_CAP)
                .ok_or(Error::ResourceLimit {
                    what: "dominance enumeration",
                    requested: u64::MAX,
                    cap: crate::symbolic::BLOCK_ENUMERATION_CAP,
                })?;
            for rank in 0..count as usize {
                let word = SymbolString::new(rank_to_word(rank, k, n), k)?;
                let lhs = weight.log2() + model.log2_prob(&word);
                if lhs == f64::NEG_INFINITY {
                    continue;
                }
                let ratio = (lhs - self.log2_prob(&word)?).exp2();
                if ratio > worst_ratio {
                    worst_ratio = ratio;
                    worst_word = Some(word);
                }
            }
        }
        let holds = worst_ratio <= 1.0 + 1e-9;
        Ok(DominanceReport {
            worst_ratio,
            holds,
            witness: if holds { None } else { worst_word },
        })
    }
}

/// Outcome of an exhaustive dominance scan.
#[derive(Debug, Clone)]
pub struct DominanceReport {
    /// max over words of `w·ν(s)/μ(s)`; ≤ 1 when dominance holds.
    pub worst_ratio: f64,
    pub holds: bool,
    /// A word violating the hypothesis, when one exists.
    pub witness: Option<SymbolString>,
}

/// Incremental mixture evaluation along a single growing word.
pub struct MixtureEvaluator {
    log2w: Vec<f64>,
    states: Vec<MemberState>,
    running: Vec<f64>,
    len: usize,
}

impl MixtureEvaluator {
    pub fn push(&mut self, symbol: u8) {
        for (state, run) in self.states.iter_mut().zip(self.running.iter_mut()) {
            *run += state.log2_next(symbol);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// log₂ μ(current prefix).
    pub fn log2_mu(&self) -> f64 {
        let terms: Vec<f64> = self
            .log2w
            .iter()
            .zip(&self.running)
            .map(|(w, r)| w + r)
            .collect();
        log2_sum_exp2(&terms)
    }

    /// log₂ of one member's running word probability.
    pub fn member_log2(&self, index: usize) -> f64 {
        self.running[index]
    }
}

/// Summable weights over word lengths, turning a per-length law into a
/// semi-measure over all finite words.
#[derive(Debug, Clone)]
pub struct LengthWeighting {
    /// explicit weights for lengths 0 .. start
    reserved: Vec<f64>,
    start: usize,
    kind: WeightKind,
    normalizer: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// `δ(n) = 1/(n log₂² n)`, n ≥ 2.
    InverseLog2,
    /// `δ(n) = 1/n²`, n ≥ 2.
    InverseSquare,
}

impl LengthWeighting {
    /// The default weighting: `δ(n) = 1/(n log₂² n)` for n ≥ 2 and reserved
    /// weights ¼ each for lengths 0 and 1.
    pub fn inverse_log2() -> Self {
        let tail = *INVERSE_LOG2_TAIL.get_or_init(|| {
            // Σ_{n≥2} 1/(n log₂² n) — partial sum plus the midpoint integral
            // tail ∫_N^∞ dx/(x log₂² x) = ln²2 / ln N
            let n_cut = 4_000_000u64;
            let mut sum = 0.0;
            for n in 2..n_cut {
                let l = (n as f64).log2();
                sum += 1.0 / (n as f64 * l * l);
            }
            let ln2 = std::f64::consts::LN_2;
            sum + ln2 * ln2 / ((n_cut as f64) - 0.5).ln()
        });
        LengthWeighting {
            reserved: vec![0.25, 0.25],
            start: 2,
            kind: WeightKind::InverseLog2,
            normalizer: 0.5 + tail,
        }
    }

    /// `δ(n) = 1/n²` for n ≥ 2, no reserved mass: normalizer `π²/6 − 1`.
    pub fn inverse_square() -> Self {
        LengthWeighting {
            reserved: vec![0.0, 0.0],
            start: 2,
            kind: WeightKind::InverseSquare,
            normalizer: std::f64::consts::PI.powi(2) / 6.0 - 1.0,
        }
    }

    /// Unnormalized weight of length n.
    pub fn delta(&self, n: usize) -> f64 {
        if n < self.start {
            return self.reserved[n];
        }
        match self.kind {
            WeightKind::InverseLog2 => {
                let l = (n as f64).log2();
                1.0 / (n as f64 * l * l)
            }
            WeightKind::InverseSquare => 1.0 / (n as f64 * n as f64),
        }
    }

    /// `Z = Σ_n δ(n)` including reserved weights.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Normalized length weight `δ(n)/Z`.
    pub fn weight(&self, n: usize) -> f64 {
        self.delta(n) / self.normalizer
    }
}

static INVERSE_LOG2_TAIL: OnceLock<f64> = OnceLock::new();

/// A genuine semi-measure on all finite words:
/// `f(s) = (δ(|s|)/Z) · π(s)` for a per-length law π.
#[derive(Debug, Clone)]
pub struct LengthWeighted {
    weighting: LengthWeighting,
    base: SemiMeasure,
}

impl LengthWeighted {
    pub fn new(weighting: LengthWeighting, base: SemiMeasure) -> Self {
        LengthWeighted { weighting, base }
    }

    pub fn weighting(&self) -> &LengthWeighting {
        &self.weighting
    }

    pub fn base(&self) -> &SemiMeasure {
        &self.base
    }

    pub fn prob(&self, word: &SymbolString) -> Result<f64> {
        Ok(self.weighting.weight(word.len()) * self.base.prob(word)?)
    }

    pub fn log2_prob(&self, word: &SymbolString) -> Result<f64> {
        Ok(self.weighting.weight(word.len()).log2() + self.base.log2_prob(word)?)
    }

    /// Total mass `Σ_n (δ(n)/Z) · mass_n(π)` truncated at `n_max`, together
    /// with the exact remainder bound `Σ_{n>n_max} δ(n)/Z`. Their sum ≤ 1
    /// with equality when the base has full per-length mass.
    pub fn mass_breakdown(&self, n_max: usize) -> Result<(f64, f64)> {
        let mut truncated = 0.0;
        for n in 0..=n_max {
            truncated += self.weighting.weight(n) * self.base.total_mass(n)?;
        }
        let mut tail = 0.0;
        // crude but rigorous overestimate of the weight tail by summing a
        // few million terms; beyond that the integral bound takes over
        let cut = (n_max + 1).max(2) as u64;
        for n in cut..(cut + 2_000_000) {
            tail += self.weighting.delta(n as usize);
        }
        let ln2 = std::f64::consts::LN_2;
        tail += match self.weighting.kind {
            WeightKind::InverseLog2 => ln2 * ln2 / ((cut as f64 + 2e6) - 0.5).ln(),
            WeightKind::InverseSquare => 1.0 / ((cut as f64 + 2e6) - 0.5),
        };
        Ok((truncated, tail / self.weighting.normalizer))
    }
}
