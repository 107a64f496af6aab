//! Predecessor counting on finite windows.
//!
//! For a right word `w` of length `R_w`, the count is the number of
//! `u ∈ A^ℓ` with `uw` in the language. Any right-infinite `z` starting with
//! `w` has at most that many length-`ℓ` predecessors, so table maxima are
//! sound upper bounds for the truncated predecessor sets.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::directive::DirectiveSequence;
use crate::error::{Error, Result};
use crate::language::{language, LanguageSource};
use crate::words::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredecessorTable {
    pub ell: usize,
    pub right_len: usize,
    /// `(w, count)` for every `w ∈ L_{R_w}`, sorted by `w`.
    pub counts: Vec<(Word, usize)>,
    pub max: usize,
    pub argmax: Word,
}

impl PredecessorTable {
    pub fn count(&self, w: &[Letter]) -> Option<usize> {
        self.counts.binary_search_by(|(x, _)| x.letters().cmp(w)).ok().map(|i| self.counts[i].1)
    }
}

/// Groups the words of length `ℓ + R_w` by their last `R_w` letters.
fn table_from_words(words: &[Word], ell: usize, right_len: usize) -> PredecessorTable {
    let mut groups: HashMap<&[Letter], usize> = HashMap::new();
    for w in words {
        *groups.entry(&w[w.len() - right_len..]).or_default() += 1;
    }
    let mut counts: Vec<(Word, usize)> = groups.into_iter().map(|(w, c)| (Word::from(w), c)).collect();
    counts.sort();
    let (argmax, max) = counts
        .iter()
        .fold((Word::empty(), 0), |(bw, bc), (w, c)| if *c > bc { (w.clone(), *c) } else { (bw, bc) });
    PredecessorTable { ell, right_len, counts, max, argmax }
}

/// Distinct suffixes of the given length.
fn suffixes(words: &[Word], len: usize) -> Vec<Word> {
    let mut out: Vec<Word> = words.iter().map(|w| Word::from(&w[w.len() - len..])).collect();
    out.sort();
    out.dedup();
    out
}

pub fn predecessor_table(source: &dyn LanguageSource, ell: usize, right_len: usize) -> Result<PredecessorTable> {
    if ell == 0 {
        return Err(Error::OutOfRange("ℓ must be positive".into()));
    }
    let words = source.words(ell + right_len)?;
    Ok(table_from_words(&words, ell, right_len))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub right_len: usize,
    /// Maximal count for `ℓ = 1, …, ell_max`.
    pub maxima: Vec<usize>,
    /// The second half of the sweep is constant.
    pub bounded: bool,
}

impl DegreeProfile {
    pub fn max(&self) -> usize {
        self.maxima.iter().copied().max().unwrap_or(0)
    }
}

/// One language enumeration at length `ell_max + R_w`; shorter tables come
/// from its suffixes, since shift languages are extendable to the left.
pub fn degree_profile(source: &dyn LanguageSource, ell_max: usize, right_len: usize) -> Result<DegreeProfile> {
    if ell_max == 0 {
        return Err(Error::OutOfRange("ℓ_max must be positive".into()));
    }
    let words = source.words(ell_max + right_len)?;
    let maxima: Vec<usize> = (1..=ell_max)
        .map(|ell| {
            let w = if ell == ell_max { words.clone() } else { suffixes(&words, ell + right_len) };
            table_from_words(&w, ell, right_len).max
        })
        .collect();
    let tail = &maxima[ell_max / 2..];
    let bounded = tail.iter().all(|&m| m == tail[0]);
    Ok(DegreeProfile { right_len, maxima, bounded })
}

/// A right word whose count survives doubling the right window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerBoundWitness {
    pub ell: usize,
    pub right_len: usize,
    /// Right word of length `2·R_w` attaining the maximum.
    pub right_word: Word,
    pub count: usize,
    /// Its length-`R_w` prefix has the same count.
    pub persistent: bool,
}

pub fn lower_bound_witness(source: &dyn LanguageSource, ell: usize, right_len: usize) -> Result<LowerBoundWitness> {
    let long = predecessor_table(source, ell, 2 * right_len)?;
    let words = source.words(ell + 2 * right_len)?;
    let short_words: Vec<Word> = {
        let mut v: Vec<Word> = words.iter().map(|w| Word::from(&w[..ell + right_len])).collect();
        v.sort();
        v.dedup();
        v
    };
    let short = table_from_words(&short_words, ell, right_len);
    let prefix_count = short.count(&long.argmax[..right_len]).unwrap_or(0);
    Ok(LowerBoundWitness {
        ell,
        right_len,
        right_word: long.argmax.clone(),
        count: long.max,
        persistent: prefix_count == long.max,
    })
}

/// Both sides of the inequality
/// `|P^h(x_ℕ)| ≤ Σ_{j' = ⌈R⟨τ⟩/‖τ‖⌉}^{R} |B|^{j'+ℓ}` for `τ = τ_{[0,t)}`,
/// `B = A_t`, and `h` the least image length of a length-`ℓ` word of `Ω_{σ^t τ}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HgenradCheck {
    pub t: usize,
    pub ell: usize,
    pub radius: usize,
    pub h: usize,
    /// Largest length-`h` predecessor count over right words of length `R_w`.
    pub left: usize,
    pub right: u128,
    pub holds: bool,
}

/// `Σ_{j'=lo}^{R} b^{j'+ℓ}` with `lo = ⌈R·min/max⌉`.
pub fn hgenrad_sum(b: u128, radius: usize, ell: usize, min_len: u128, max_len: u128) -> u128 {
    let lo = (radius as u128 * min_len).div_ceil(max_len.max(1)) as usize;
    (lo..=radius).map(|j| b.saturating_pow((j + ell) as u32)).fold(0u128, u128::saturating_add)
}

pub fn verify_hgenrad_bound(
    seq: &DirectiveSequence,
    t: usize,
    ell: usize,
    radius: Option<usize>,
    right_len: usize,
    budget: usize,
) -> Result<HgenradCheck> {
    let radius = radius.ok_or_else(|| Error::MissingRadius(format!("τ_[0,{t})")))?;
    if ell == 0 {
        return Err(Error::OutOfRange("ℓ must be positive".into()));
    }
    let block = seq.block(0, t)?.substitution;
    let upper = language(&seq.shifted(t), ell, budget)?;
    let h = upper.words.iter().map(|u| u.iter().map(|&a| block.image(a).len()).sum::<usize>()).min().unwrap_or(0);
    let source = crate::language::LimitSet::new(seq.clone(), budget);
    let left = predecessor_table(&source, h, right_len)?.max;
    let b = seq.alphabet(t).len() as u128;
    let right = hgenrad_sum(b, radius, ell, block.min_len() as u128, block.max_len() as u128);
    Ok(HgenradCheck { t, ell, radius, h, left, right, holds: (left as u128) <= right })
}

/// The two rank-radius constants: the summed form `Σ_{j'} rk^{j'+1}` over
/// `j' ∈ [⌈R·min/max⌉, R]` and the simplified `rk^{R+1}`.
pub fn rkrad_bounds(rk: usize, radius: usize, min_len: u128, max_len: u128) -> (u128, u128) {
    let rk = rk as u128;
    (hgenrad_sum(rk, radius, 1, min_len, max_len), rk.saturating_pow(radius as u32 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::language::{FullShift, LimitSet, PeriodicOrbit};
    use crate::words::Alphabet;

    fn limit(s: crate::substitution::Substitution) -> LimitSet {
        LimitSet::new(DirectiveSequence::constant(s).unwrap(), 128)
    }

    /// Counts by testing every `u ∈ A^ℓ` for membership.
    fn brute_max(source: &dyn LanguageSource, ell: usize, right_len: usize) -> usize {
        let long = source.words(ell + right_len).unwrap();
        let right = source.words(right_len).unwrap();
        let all = source.alphabet().all_words(ell);
        right
            .iter()
            .map(|w| all.iter().filter(|u| long.binary_search(&u.concat(w)).is_ok()).count())
            .max()
            .unwrap()
    }

    #[test]
    fn table_examples() {
        let tm = limit(corpus::thue_morse());
        assert_eq!(predecessor_table(&tm, 3, 32).unwrap().max, 2);
        let t3 = limit(corpus::toeplitz(3));
        assert_eq!(predecessor_table(&t3, 4, 27).unwrap().max, 3);
        let full = FullShift { alphabet: Alphabet::from_chars("ab").unwrap() };
        assert_eq!(predecessor_table(&full, 3, 8).unwrap().max, 8);
    }

    #[test]
    fn brute_force_agrees() {
        for s in [corpus::fibonacci(), corpus::thue_morse(), corpus::toeplitz(3), corpus::abc_bbc_aba()] {
            let src = limit(s);
            for (ell, r) in [(1, 4), (2, 6), (3, 9)] {
                assert_eq!(predecessor_table(&src, ell, r).unwrap().max, brute_max(&src, ell, r));
            }
        }
    }

    #[test]
    fn profiles() {
        let fib = limit(corpus::fibonacci());
        let p = degree_profile(&fib, 8, 34).unwrap();
        assert_eq!(p.maxima, vec![2; 8]);
        assert!(p.bounded);
        let orbit = PeriodicOrbit { alphabet: Alphabet::from_chars("ab").unwrap(), period: Word::from_indices(&[0, 1]) };
        assert_eq!(degree_profile(&orbit, 6, 10).unwrap().maxima, vec![1; 6]);
    }

    #[test]
    fn profile_matches_separate_tables() {
        let src = limit(corpus::toeplitz(3));
        let p = degree_profile(&src, 5, 12).unwrap();
        for ell in 1..=5 {
            assert_eq!(p.maxima[ell - 1], predecessor_table(&src, ell, 12).unwrap().max);
        }
    }

    #[test]
    fn witnesses() {
        let w = lower_bound_witness(&limit(corpus::thue_morse()), 3, 32).unwrap();
        assert_eq!(w.count, 2);
        assert!(w.persistent);
    }

    #[test]
    fn hgenrad() {
        let tm = DirectiveSequence::constant(corpus::thue_morse()).unwrap();
        let c = verify_hgenrad_bound(&tm, 3, 1, Some(1), 16, 128).unwrap();
        assert_eq!((c.h, c.left, c.right, c.holds), (8, 2, 4, true));
        let c0 = verify_hgenrad_bound(&tm, 2, 1, Some(0), 16, 128).unwrap();
        assert_eq!(c0.right, 2);
        assert!(c0.holds);
        assert!(matches!(verify_hgenrad_bound(&tm, 3, 1, None, 16, 128), Err(Error::MissingRadius(_))));
        let fib = DirectiveSequence::constant(corpus::fibonacci()).unwrap();
        let tel = fib.telescope_expanding().unwrap().sequence;
        let c = verify_hgenrad_bound(&tel, 2, 1, Some(1), 16, 128).unwrap();
        assert_eq!(c.left, 2);
        assert!(c.holds);
    }

    #[test]
    fn rkrad_constants() {
        assert_eq!(rkrad_bounds(3, 1, 3, 3), (9, 9));
        assert_eq!(rkrad_bounds(2, 0, 1, 2), (2, 2));
        // non-uniform with R = 2: two terms, 4 + 8 > 2^3
        assert_eq!(rkrad_bounds(2, 2, 1, 2), (12, 8));
    }
}
