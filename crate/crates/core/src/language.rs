//! Finite languages of shift spaces: the S-adic limit set `Ω_τ`, plus a few
//! synthetic sources used as oracles. Word complexity, entropy estimates and
//! asymptotic-periodicity witnesses are computed from these tables.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::directive::DirectiveSequence;
use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

/// Default cap on the word length `r` a limit-set language may be asked for.
pub const DEFAULT_LANGUAGE_BUDGET: usize = 64;

/// Longest image expanded while enumerating a limit-set language.
const IMAGE_CAP: u128 = 1 << 24;

/// Anything able to list its length-`r` words, sorted and deduplicated.
///
/// Sources describe two-sided shifts, so every listed word extends in both
/// directions; the predecessor module relies on that.
pub trait LanguageSource: Sync {
    fn alphabet(&self) -> &Alphabet;
    fn words(&self, r: usize) -> Result<Vec<Word>>;
    fn describe(&self) -> String;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageTable {
    pub r: usize,
    /// Level `t` whose two-letter seeds generated the table.
    pub level: usize,
    pub words: Vec<Word>,
}

impl LanguageTable {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, w: &[Letter]) -> bool {
        self.words.binary_search_by(|x| x.letters().cmp(w)).is_ok()
    }

    /// Sorted one-word-per-line rendering.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        self.words.iter().map(|w| alphabet.format_word(w) + "\n").collect()
    }
}

/// Two-letter languages `L_2(Ω_{σ^t τ})` for every level of the description,
/// as boolean `|A_t| × |A_t|` tables.
///
/// `L_2(Ω_t)` is the set of 2-factors of `τ_t(L_2(Ω_{t+1}))`; iterating that
/// map from the full pair sets decreases to the limit, which the cycle
/// reaches after finitely many rounds.
fn two_letter_languages(seq: &DirectiveSequence) -> Vec<Vec<bool>> {
    let tt = seq.transient().len();
    let c = seq.cycle().len();
    let mut pairs: Vec<Vec<bool>> = (0..tt + c).map(|t| vec![true; seq.alphabet(t).len().pow(2)]).collect();
    loop {
        let mut changed = false;
        for i in (0..c).rev() {
            let next = if i + 1 < c { tt + i + 1 } else { tt };
            let new = pair_factors(seq, tt + i, &pairs[next]);
            if new != pairs[tt + i] {
                pairs[tt + i] = new;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    for t in (0..tt).rev() {
        pairs[t] = pair_factors(seq, t, &pairs[t + 1]);
    }
    pairs
}

fn pair_factors(seq: &DirectiveSequence, t: usize, next: &[bool]) -> Vec<bool> {
    let tau = seq.level(t);
    let n_in = tau.domain().len();
    let n_out = tau.codomain().len();
    let mut out = vec![false; n_out * n_out];
    for u in 0..n_in {
        for v in 0..n_in {
            if !next[u * n_in + v] {
                continue;
            }
            let w = tau.expand_unchecked(&[Letter(u as u8), Letter(v as u8)]);
            for p in w.windows(2) {
                out[p[0].index() * n_out + p[1].index()] = true;
            }
        }
    }
    out
}

/// Length-`r` language of `Ω_τ`.
///
/// Uses the least level `t` with `⟨τ_{[0,t)}⟩ ≥ r`: every length-`r` factor
/// of a point of `Ω_τ` then lies in the image of two consecutive level-`t`
/// letters, and those two-letter words range over `L_2(Ω_{σ^t τ})`.
pub fn language(seq: &DirectiveSequence, r: usize, budget: usize) -> Result<LanguageTable> {
    if r == 0 {
        return Err(Error::OutOfRange("language length must be positive".into()));
    }
    if r > budget {
        return Err(Error::Budget { what: "language length", needed: r, cap: budget });
    }
    if !seq.is_everywhere_growing() {
        return Err(Error::NotEverywhereGrowing);
    }
    let t = (0..).find(|&t| seq.block_min_len(0, t) >= r as u128).expect("everywhere-growing");
    language_at_level(seq, r, t)
}

/// Same as [`language`] but seeded at an explicit level `t`, which must satisfy `⟨τ_{[0,t)}⟩ ≥ r`.
pub fn language_at_level(seq: &DirectiveSequence, r: usize, t: usize) -> Result<LanguageTable> {
    if seq.block_min_len(0, t) < r as u128 {
        return Err(Error::OutOfRange(format!("level {t} images are shorter than {r}")));
    }
    let longest = seq.block_max_len(0, t);
    if longest > IMAGE_CAP {
        return Err(Error::Budget { what: "image length", needed: longest.min(usize::MAX as u128) as usize, cap: IMAGE_CAP as usize });
    }
    let pairs = two_letter_languages(seq);
    let tt = seq.transient().len();
    let idx = if t < tt { t } else { tt + (t - tt) % seq.cycle().len() };
    let n = seq.alphabet(t).len();
    let seeds: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| pairs[idx][u * n + v]).collect();
    let words: BTreeSet<Vec<Letter>> = seeds
        .par_iter()
        .map(|&(u, v)| {
            let mut w = vec![Letter(u as u8), Letter(v as u8)];
            for s in (0..t).rev() {
                w = seq.level(s).expand_unchecked(&w).into_inner();
            }
            w.windows(r).map(<[Letter]>::to_vec).collect::<BTreeSet<_>>()
        })
        .reduce(BTreeSet::new, |mut a, b| {
            a.extend(b);
            a
        });
    Ok(LanguageTable { r, level: t, words: words.into_iter().map(Word).collect() })
}

/// `p(1), …, p(r_max)`.
pub fn complexity(seq: &DirectiveSequence, r_max: usize, budget: usize) -> Result<Vec<usize>> {
    let table = language(seq, r_max, budget)?;
    Ok(complexity_from_words(&table.words, r_max))
}

/// Counts of distinct prefixes; valid because every word of a shift language extends to the right.
pub fn complexity_from_words(words: &[Word], r_max: usize) -> Vec<usize> {
    (1..=r_max)
        .map(|r| {
            let mut n = 0;
            let mut prev: Option<&[Letter]> = None;
            for w in words {
                let p = &w[..r];
                if prev != Some(p) {
                    n += 1;
                    prev = Some(p);
                }
            }
            n
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// `log p(r_max) / r_max`, an upper bound on the entropy.
    pub naive: f64,
    /// Exponential rate from the fit `log p(r) = c + d·log r + h·r` through
    /// `r ∈ {r_max/4, r_max/2, r_max}`; clamped at zero.
    pub slope: f64,
}

/// Entropy estimate from a complexity sequence `p(1..=r_max)`.
///
/// ```
/// # use expanse_core::language::entropy_estimate;
/// let p: Vec<usize> = (1..=24).map(|r| 1usize << r).collect();
/// assert!((entropy_estimate(&p).slope - 2f64.ln()).abs() < 1e-9);
/// ```
pub fn entropy_estimate(p: &[usize]) -> EntropyEstimate {
    let r_max = p.len();
    if r_max == 0 {
        return EntropyEstimate { naive: 0.0, slope: 0.0 };
    }
    let lp = |r: usize| (p[r - 1].max(1) as f64).ln();
    let naive = lp(r_max) / r_max as f64;
    if r_max < 4 {
        return EntropyEstimate { naive, slope: naive };
    }
    let (r1, r2, r3) = (r_max / 4, r_max / 2, r_max);
    // eliminate c, then d, from the three equations
    let (x1, x2, x3) = ((r1 as f64).ln(), (r2 as f64).ln(), (r3 as f64).ln());
    let (y1, y2, y3) = (lp(r1), lp(r2), lp(r3));
    let (a1, b1, c1) = (x2 - x1, (r2 - r1) as f64, y2 - y1);
    let (a2, b2, c2) = (x3 - x2, (r3 - r2) as f64, y3 - y2);
    let det = a1 * b2 - a2 * b1;
    let h = if det.abs() < 1e-12 { naive } else { (a1 * c2 - a2 * c1) / det };
    EntropyEstimate { naive, slope: h.max(0.0) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessPattern {
    /// `a^m b^m`, evidence for a configuration `…aaa.bbb…`.
    Block,
    /// `a^m b a^m`, evidence for `…aaa b aaa…`.
    Isolated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicityWitness {
    pub pattern: WitnessPattern,
    pub a: Letter,
    pub b: Letter,
    pub m_max: usize,
}

impl PeriodicityWitness {
    pub fn describe(&self, alphabet: &Alphabet) -> String {
        let (a, b) = (alphabet.name(self.a), alphabet.name(self.b));
        match self.pattern {
            WitnessPattern::Block => format!("{a}^m {b}^m in the language for all m <= {}", self.m_max),
            WitnessPattern::Isolated => format!("{a}^m {b} {a}^m in the language for all m <= {}", self.m_max),
        }
    }
}

/// Searches `a^m b^m` and `a^m b a^m` (`a ≠ b`) for all `m ≤ m_max`.
pub fn asymptotic_periodic_witness(
    seq: &DirectiveSequence,
    m_max: usize,
    budget: usize,
) -> Result<Option<PeriodicityWitness>> {
    if m_max == 0 {
        return Ok(None);
    }
    let table = language(seq, 2 * m_max + 1, budget)?;
    Ok(witness_in(&table.words, seq.alphabet(0).len(), m_max))
}

/// Witness search against a sorted list of words of length at least `2·m_max + 1`.
pub fn witness_in(words: &[Word], n_letters: usize, m_max: usize) -> Option<PeriodicityWitness> {
    let has_prefix = |w: &[Letter]| {
        let i = words.partition_point(|x| &x[..w.len().min(x.len())] < w);
        i < words.len() && words[i].starts_with(w)
    };
    for pattern in [WitnessPattern::Block, WitnessPattern::Isolated] {
        for a in 0..n_letters {
            for b in 0..n_letters {
                if a == b {
                    continue;
                }
                let (a, b) = (Letter(a as u8), Letter(b as u8));
                let found = (1..=m_max).all(|m| {
                    let mut w = vec![a; m];
                    match pattern {
                        WitnessPattern::Block => w.extend(std::iter::repeat_n(b, m)),
                        WitnessPattern::Isolated => {
                            w.push(b);
                            w.extend(std::iter::repeat_n(a, m));
                        }
                    }
                    has_prefix(&w)
                });
                if found {
                    return Some(PeriodicityWitness { pattern, a, b, m_max });
                }
            }
        }
    }
    None
}

/// The limit set `Ω_τ` of a directive sequence as a language source.
#[derive(Debug, Clone)]
pub struct LimitSet {
    pub seq: DirectiveSequence,
    pub budget: usize,
}

impl LimitSet {
    pub fn new(seq: DirectiveSequence, budget: usize) -> Self {
        LimitSet { seq, budget }
    }
}

impl LanguageSource for LimitSet {
    fn alphabet(&self) -> &Alphabet {
        self.seq.alphabet(0)
    }

    fn words(&self, r: usize) -> Result<Vec<Word>> {
        Ok(language(&self.seq, r, self.budget)?.words)
    }

    fn describe(&self) -> String {
        "S-adic limit set".into()
    }
}

/// Cap on the number of words a synthetic source will enumerate.
const ENUMERATION_CAP: usize = 1 << 22;

#[derive(Debug, Clone)]
pub struct FullShift {
    pub alphabet: Alphabet,
}

impl LanguageSource for FullShift {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn words(&self, r: usize) -> Result<Vec<Word>> {
        let n = (self.alphabet.len() as f64).powi(r as i32);
        if n > ENUMERATION_CAP as f64 {
            return Err(Error::Budget { what: "full-shift words", needed: n.min(usize::MAX as f64) as usize, cap: ENUMERATION_CAP });
        }
        Ok(self.alphabet.all_words(r))
    }

    fn describe(&self) -> String {
        format!("full shift on {} letters", self.alphabet.len())
    }
}

/// Orbit of the periodic point `…uuu.uuu…`.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub alphabet: Alphabet,
    pub period: Word,
}

impl LanguageSource for PeriodicOrbit {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn words(&self, r: usize) -> Result<Vec<Word>> {
        if self.period.is_empty() {
            return Err(Error::EmptyWord);
        }
        let p = self.period.len();
        let long = self.period.repeat(r / p + 2);
        let set: BTreeSet<Word> = (0..p).map(|i| Word::from(&long[i..i + r])).collect();
        Ok(set.into_iter().collect())
    }

    fn describe(&self) -> String {
        format!("periodic orbit of {}", self.alphabet.format_word(&self.period))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::substitution::Substitution;

    fn constant(s: Substitution) -> DirectiveSequence {
        DirectiveSequence::constant(s).unwrap()
    }

    fn words(seq: &DirectiveSequence, r: usize) -> Vec<String> {
        let t = language(seq, r, 64).unwrap();
        t.words.iter().map(|w| seq.alphabet(0).format_word(w)).collect()
    }

    /// Factors of a long prefix of the fixed point starting with `a`: an
    /// independent view of the language for primitive substitutions.
    fn fixed_point_factors(s: &Substitution, r: usize, len: usize) -> BTreeSet<Vec<Letter>> {
        let mut w = vec![Letter(0)];
        while w.len() < len {
            w = s.expand_unchecked(&w).into_inner();
        }
        w.windows(r).map(<[Letter]>::to_vec).collect()
    }

    #[test]
    fn small_languages() {
        let fib = constant(corpus::fibonacci());
        assert_eq!(words(&fib, 2), ["aa", "ab", "ba"]);
        assert_eq!(words(&constant(corpus::thue_morse()), 1), ["a", "b"]);
        assert_eq!(words(&constant(corpus::doubling()), 2), ["aa", "ab", "ba", "bb"]);
    }

    #[test]
    fn matches_fixed_points() {
        for s in [corpus::fibonacci(), corpus::thue_morse(), corpus::toeplitz(3), corpus::abc_bbc_aba()] {
            let seq = constant(s.clone());
            for r in [1, 3, 7, 12] {
                let ours: BTreeSet<Vec<Letter>> = language(&seq, r, 64).unwrap().words.into_iter().map(Word::into_inner).collect();
                assert_eq!(ours, fixed_point_factors(&s, r, 20_000), "{s} r={r}");
            }
        }
    }

    #[test]
    fn complexities() {
        let fib = constant(corpus::fibonacci());
        assert_eq!(complexity(&fib, 10, 64).unwrap(), (2..=11).collect::<Vec<_>>());
        assert_eq!(&complexity(&constant(corpus::thue_morse()), 3, 64).unwrap(), &[2, 4, 6]);
        let single = Substitution::from_rules(&[("a", "aa")]).unwrap();
        assert_eq!(complexity(&constant(single), 6, 64).unwrap(), vec![1; 6]);
    }

    #[test]
    fn budget_and_growth_errors() {
        let fib = constant(corpus::fibonacci());
        assert!(language(&fib, 65, 64).unwrap_err().is_budget());
        let stalled = constant(Substitution::from_rules(&[("a", "ab"), ("b", "b")]).unwrap());
        assert_eq!(language(&stalled, 2, 64).unwrap_err(), Error::NotEverywhereGrowing);
    }

    #[test]
    fn entropy() {
        let fib: Vec<usize> = (1..=16).map(|r| r + 1).collect();
        let e = entropy_estimate(&fib);
        assert!(e.naive <= (17f64).ln() / 16.0 + 1e-12);
        assert!(e.slope < 0.02);
        let p: Vec<usize> = (1..=24).map(|r| 1usize << r).collect();
        assert!((entropy_estimate(&p).slope - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn witnesses() {
        let w = asymptotic_periodic_witness(&constant(corpus::doubling()), 16, 64).unwrap().unwrap();
        assert_eq!((w.pattern, w.a, w.b), (WitnessPattern::Block, Letter(0), Letter(1)));
        assert_eq!(asymptotic_periodic_witness(&constant(corpus::thue_morse()), 16, 64).unwrap(), None);
        let w = asymptotic_periodic_witness(&constant(corpus::aa_ab()), 16, 64).unwrap().unwrap();
        assert_eq!((w.pattern, w.a, w.b), (WitnessPattern::Isolated, Letter(0), Letter(1)));
        assert_eq!(asymptotic_periodic_witness(&constant(corpus::fibonacci()), 16, 64).unwrap(), None);
    }

    #[test]
    fn transient_levels_restrict_the_language() {
        // a → xx, b → yx over a Thue-Morse cycle: `yy` is never produced
        let down = Substitution::parse("a -> xx\nb -> yx\n").unwrap();
        let seq = DirectiveSequence::new(vec![down], vec![corpus::thue_morse()]).unwrap();
        let two = words(&seq, 2);
        assert!(!two.contains(&"yy".to_string()));
        assert!(two.contains(&"xx".to_string()));
    }

    #[test]
    fn synthetic_sources() {
        let ab = Alphabet::from_chars("ab").unwrap();
        assert_eq!(FullShift { alphabet: ab.clone() }.words(3).unwrap().len(), 8);
        let orbit = PeriodicOrbit { alphabet: ab.clone(), period: Word::from_indices(&[0, 1]) };
        assert_eq!(orbit.words(5).unwrap().len(), 2);
    }
}
