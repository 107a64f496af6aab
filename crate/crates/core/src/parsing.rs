//! Desubstitution schemes on finite windows, quasi-recognizability and
//! right-radius probes, and radius arithmetic.
//!
//! A window stands in for a configuration `x ∈ A^ℤ`: it covers the
//! coordinates `[-origin, |word| - origin)`. Schemes are cut sets inside
//! that range; the segments cut off by the window edges only have to be a
//! suffix (left edge) or prefix (right edge) of some image.
//!
//! Probe refutations are found on finite windows. They are reported as
//! refutations but remain evidence about the bi-infinite shift: a window that
//! parses two ways need not extend to a configuration that does.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::directive::DirectiveSequence;
use crate::error::{Error, Result};
use crate::language::LanguageSource;
use crate::substitution::Substitution;
use crate::words::{Alphabet, Letter, Word};

/// Cap on the number of schemes one window may produce.
const SCHEME_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub word: Word,
    pub origin: usize,
}

impl Window {
    pub fn new(word: Word, origin: usize) -> Result<Self> {
        if origin > word.len() {
            return Err(Error::OutOfRange(format!("origin {origin} beyond window of width {}", word.len())));
        }
        Ok(Window { word, origin })
    }

    /// Window centred on `[-width/2, width/2)`.
    pub fn centred(word: Word) -> Self {
        let origin = word.len() / 2;
        Window { word, origin }
    }

    pub fn start(&self) -> i64 {
        -(self.origin as i64)
    }

    pub fn end(&self) -> i64 {
        (self.word.len() - self.origin) as i64
    }

    /// Letters on `[from, to)` in window coordinates.
    pub fn slice(&self, from: i64, to: i64) -> &[Letter] {
        let o = self.origin as i64;
        &self.word[(from + o) as usize..(to + o) as usize]
    }
}

/// A tiling of a window by images of letters.
///
/// `letters` has one entry per segment, including the partial edge segments;
/// where several letters fit a segment the smallest one is recorded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DesubstitutionScheme {
    pub cuts: Vec<i64>,
    /// Index `s` of `cuts[0]` in the bi-infinite cut sequence `(k_s)`.
    pub first_index: i64,
    pub letters: Vec<Letter>,
    pub left_partial: bool,
    pub right_partial: bool,
}

impl DesubstitutionScheme {
    /// `k_s`, if that cut lies in the window.
    pub fn cut(&self, s: i64) -> Option<i64> {
        let i = s - self.first_index;
        (i >= 0).then(|| self.cuts.get(i as usize).copied()).flatten()
    }

    /// `k_0 ≤ 0 < k_1`, with both cuts inside the window or `k_0` lost off its left edge.
    pub fn is_standard(&self) -> bool {
        let k1 = self.cut(1);
        let k0_ok = match self.cut(0) {
            Some(k0) => k0 <= 0,
            None => self.first_index == 1,
        };
        k0_ok && k1.is_none_or(|k| k > 0)
    }
}

fn scheme_tail(s: &DesubstitutionScheme, j: i64) -> Option<&[i64]> {
    let i = j - s.first_index;
    if i < 0 || i as usize >= s.cuts.len() {
        return None;
    }
    Some(&s.cuts[i as usize..])
}

/// All standard schemes of `win`, in lexicographic order of their cut lists.
pub fn enumerate_standard_schemes(tau: &Substitution, win: &Window) -> Result<Vec<DesubstitutionScheme>> {
    let needed = 2 * tau.max_len();
    if win.word.len() < needed {
        return Err(Error::WindowTooNarrow { width: win.word.len(), needed });
    }
    if !tau.is_non_erasing() {
        return Err(Error::EmptyWord);
    }
    let all = enumerate_schemes(tau, win)?;
    Ok(all.into_iter().filter(DesubstitutionScheme::is_standard).collect())
}

/// Every scheme of the window, standard or not.
pub fn enumerate_schemes(tau: &Substitution, win: &Window) -> Result<Vec<DesubstitutionScheme>> {
    let (start, end) = (win.start(), win.end());
    let images = tau.images();
    let fits_full = |from: i64, to: i64| -> Option<Letter> {
        let seg = win.slice(from, to);
        tau.domain().letters().find(|&a| images[a.index()][..] == *seg)
    };
    let mut out: Vec<DesubstitutionScheme> = Vec::new();
    // first cut: at the window start, or after a proper suffix of some image
    let mut firsts: Vec<(i64, Option<Letter>)> = vec![(start, None)];
    for len in 1..tau.max_len() as i64 {
        if start + len > end {
            break;
        }
        let seg = win.slice(start, start + len);
        if let Some(a) = tau.domain().letters().find(|&a| {
            let img = &images[a.index()];
            img.len() > seg.len() && img.ends_with(seg)
        }) {
            firsts.push((start + len, Some(a)));
        }
    }
    for (c0, left) in firsts {
        let mut stack: Vec<(Vec<i64>, Vec<Letter>)> = vec![(vec![c0], left.into_iter().collect())];
        while let Some((cuts, letters)) = stack.pop() {
            let last = *cuts.last().expect("nonempty");
            if last == end {
                push_scheme(&mut out, cuts.clone(), letters.clone(), left.is_some(), false)?;
                continue;
            }
            // partial last segment
            let rest = win.slice(last, end);
            if let Some(a) = tau.domain().letters().find(|&a| {
                let img = &images[a.index()];
                img.len() > rest.len() && img.starts_with(rest)
            }) {
                let mut l = letters.clone();
                l.push(a);
                push_scheme(&mut out, cuts.clone(), l, left.is_some(), true)?;
            }
            let mut lens: Vec<usize> = images.iter().map(|w| w.len()).collect();
            lens.sort_unstable();
            lens.dedup();
            for len in lens.into_iter().rev() {
                let next = last + len as i64;
                if next > end {
                    continue;
                }
                if let Some(a) = fits_full(last, next) {
                    let mut c = cuts.clone();
                    c.push(next);
                    let mut l = letters.clone();
                    l.push(a);
                    stack.push((c, l));
                }
            }
        }
    }
    out.sort_by(|a, b| a.cuts.cmp(&b.cuts));
    out.dedup_by(|a, b| a.cuts == b.cuts);
    Ok(out)
}

fn push_scheme(
    out: &mut Vec<DesubstitutionScheme>,
    cuts: Vec<i64>,
    letters: Vec<Letter>,
    left_partial: bool,
    right_partial: bool,
) -> Result<()> {
    if out.len() >= SCHEME_CAP {
        return Err(Error::Budget { what: "desubstitution schemes", needed: out.len() + 1, cap: SCHEME_CAP });
    }
    let nonpositive = cuts.iter().filter(|&&k| k <= 0).count() as i64;
    out.push(DesubstitutionScheme { cuts, first_index: 1 - nonpositive, letters, left_partial, right_partial });
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeOutcome {
    Refuted,
    NoCounterexample,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub windows: [Window; 2],
    pub schemes: [DesubstitutionScheme; 2],
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub window: usize,
    /// `None` for a plain quasi-recognizability probe.
    pub radius: Option<usize>,
    pub outcome: ProbeOutcome,
    pub windows_checked: usize,
    pub counterexample: Option<Counterexample>,
}

impl RadiusReport {
    pub fn refuted(&self) -> bool {
        self.outcome == ProbeOutcome::Refuted
    }
}

/// Looks for a length-`2M` word of the language with two standard schemes
/// whose cuts differ within `[-M/2, M/2]`.
pub fn probe_quasi_recognizability(tau: &Substitution, m: usize, over: &dyn LanguageSource) -> Result<RadiusReport> {
    if m < tau.max_len() {
        return Err(Error::WindowTooNarrow { width: 2 * m, needed: 2 * tau.max_len() });
    }
    let words = source_words(tau, over, 2 * m)?;
    let found = words
        .par_iter()
        .map(|w| -> Result<Option<Counterexample>> {
            let win = Window::new(w.clone(), m)?;
            let schemes = enumerate_standard_schemes(tau, &win)?;
            // only disagreements in the central half count; near the edges the
            // window cannot tell how the parse continues
            let half = (m / 2) as i64;
            let central = |s: &DesubstitutionScheme| -> Vec<i64> {
                s.cuts.iter().copied().filter(|k| (-half..=half).contains(k)).collect()
            };
            let first = schemes.first().map(central);
            let other = schemes.iter().find(|s| Some(central(s)) != first);
            Ok(other.map(|o| Counterexample { windows: [win.clone(), win.clone()], schemes: [schemes[0].clone(), o.clone()] }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(report(m, None, words.len(), found))
}

fn report(m: usize, radius: Option<usize>, checked: usize, found: Option<Counterexample>) -> RadiusReport {
    RadiusReport {
        window: m,
        radius,
        outcome: if found.is_some() { ProbeOutcome::Refuted } else { ProbeOutcome::NoCounterexample },
        windows_checked: checked,
        counterexample: found,
    }
}

/// The source's words re-indexed onto the codomain of `tau`.
fn source_words(tau: &Substitution, over: &dyn LanguageSource, r: usize) -> Result<Vec<Word>> {
    let src = over.alphabet();
    let dst = tau.codomain();
    let words = over.words(r)?;
    if src == dst {
        return Ok(words);
    }
    let map: Vec<Letter> = src
        .names()
        .iter()
        .map(|n| dst.letter(n).ok_or_else(|| Error::AlphabetMismatch(format!("`{n}` not in the codomain"))))
        .collect::<Result<_>>()?;
    Ok(words.into_iter().map(|w| Word(w.iter().map(|l| map[l.index()]).collect())).collect())
}

/// Whether `(x, k)` and `(x', k')` match at some `j, j' ≤ R`.
///
/// Cut tails are compared up to the horizon `H`; beyond it the right edge of
/// the window may leave the parse ambiguous even for recognizable maps.
fn radius_match(
    r: usize,
    horizon: i64,
    x: &Window,
    k: &DesubstitutionScheme,
    y: &Window,
    kk: &DesubstitutionScheme,
) -> bool {
    let upto = |c: &[i64], from: i64| -> Vec<i64> {
        c.iter().copied().take_while(|&p| p < horizon.max(from + 1)).collect()
    };
    for j in 0..=r as i64 {
        for jj in 0..=r as i64 {
            let (Some(a), Some(b)) = (scheme_tail(k, j), scheme_tail(kk, jj)) else { continue };
            if a[0] != b[0] || upto(a, a[0]) != upto(b, b[0]) {
                continue;
            }
            let kj = a[0];
            if kj < 0 && x.slice(kj, 0) != y.slice(kj, 0) {
                continue;
            }
            return true;
        }
    }
    false
}

/// Searches pairs of width-`2M` windows sharing their right half `[0, M)`.
pub fn probe_right_radius(tau: &Substitution, r: usize, m: usize, over: &dyn LanguageSource) -> Result<RadiusReport> {
    let needed = (r + 2) * tau.max_len();
    if m < needed {
        return Err(Error::WindowTooNarrow { width: m, needed });
    }
    let words = source_words(tau, over, 2 * m)?;
    let mut groups: BTreeMap<&[Letter], Vec<&Word>> = BTreeMap::new();
    for w in &words {
        groups.entry(&w[m..]).or_default().push(w);
    }
    let horizon = (m / 2) as i64;
    let groups: Vec<Vec<&Word>> = groups.into_values().collect();
    let found = groups
        .par_iter()
        .map(|group| -> Result<Option<Counterexample>> {
            let parsed: Vec<(Window, Vec<DesubstitutionScheme>)> = group
                .iter()
                .map(|w| {
                    let win = Window::new((*w).clone(), m)?;
                    let s = enumerate_standard_schemes(tau, &win)?;
                    Ok((win, s))
                })
                .collect::<Result<_>>()?;
            let flat: Vec<(&Window, &DesubstitutionScheme)> =
                parsed.iter().flat_map(|(w, ss)| ss.iter().map(move |s| (w, s))).collect();
            for (i, &(x, k)) in flat.iter().enumerate() {
                for &(y, kk) in &flat[i + 1..] {
                    if !radius_match(r, horizon, x, k, y, kk) {
                        return Ok(Some(Counterexample { windows: [x.clone(), y.clone()], schemes: [k.clone(), kk.clone()] }));
                    }
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(report(m, Some(r), words.len(), found))
}

/// Smallest `R ≤ r_max` with no counterexample at window `M`.
pub fn least_unrefuted_radius(tau: &Substitution, r_max: usize, m: usize, over: &dyn LanguageSource) -> Result<Option<usize>> {
    for r in 0..=r_max {
        if (r + 2) * tau.max_len() > m {
            return Ok(None);
        }
        if !probe_right_radius(tau, r, m, over)?.refuted() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Radius of `τ ∘ τ̃` from a radius `R` of `τ` and `R̃` of `τ̃`: `⌈R/⟨τ̃⟩⌉ + R̃`.
pub fn radius_compose(r: u64, min_len_inner: u64, r_inner: u64) -> u64 {
    assert!(min_len_inner >= 1, "inner substitution must be non-erasing");
    r.div_ceil(min_len_inner) + r_inner
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesBound {
    /// Least `m` with `Σ_{i<t} R_i⟨τ_{[0,i]}⟩ ≤ ⟨τ_{[0,t)}⟩·m` for all `t ≤ t_max`,
    /// extrapolated when the ratio converges geometrically, or `None` when it
    /// was still growing at the end of the sweep.
    pub sweep: Option<u64>,
    /// A bound valid for every `t`, from the geometric growth of the cycle.
    pub certified: Option<u64>,
    pub t_max: usize,
}

/// Radii are given per level: either one per level of the description
/// (repeated along the cycle) or an explicit schedule of length `t_max`.
pub fn radius_series_bound(seq: &DirectiveSequence, radii: &[u64], t_max: usize) -> Result<SeriesBound> {
    let desc = seq.description_len();
    let radius_at = |i: usize| -> u64 {
        if radii.len() == t_max && radii.len() != desc {
            radii[i]
        } else {
            let tt = seq.transient().len();
            if i < tt {
                radii[i]
            } else {
                radii[tt + (i - tt) % seq.cycle().len()]
            }
        }
    };
    if radii.len() != desc && radii.len() != t_max {
        return Err(Error::LengthMismatch(format!(
            "{} radii for {desc} description levels (or a {t_max}-level schedule)",
            radii.len()
        )));
    }
    let periodic = radii.len() == desc;
    // running sum of R_i⟨τ_{[0,i]}⟩ against ⟨τ_{[0,t)}⟩, in floating point once values get large
    let mut sum = 0f64;
    let mut ratios = Vec::with_capacity(t_max);
    for t in 1..=t_max {
        let i = t - 1;
        sum += radius_at(i) as f64 * seq.block_min_len(0, i + 1) as f64;
        let denom = seq.block_min_len(0, t) as f64;
        ratios.push(sum / denom);
    }
    let ceil = |x: f64| (x - 1e-9).ceil().max(0.0) as u64;
    let sweep_m = ratios.iter().copied().fold(0f64, f64::max);
    // a ratio still rising at the end is extrapolated when its increments
    // shrink geometrically, and left open otherwise
    let n = ratios.len();
    let rising = n >= 3 && ratios[n - 1] > ratios[n - 2] + 1e-12;
    let sweep = if !rising {
        Some(ceil(sweep_m))
    } else {
        let (d1, d0) = (ratios[n - 1] - ratios[n - 2], ratios[n - 2] - ratios[n - 3]);
        let q = if d0 > 0.0 { d1 / d0 } else { 1.0 };
        (q <= 0.9).then(|| ceil(sweep_m.max(ratios[n - 1] + d1 * q / (1.0 - q))))
    };
    let certified = if periodic { geometric_bound(seq, radii) } else { None };
    Ok(SeriesBound { sweep, certified, t_max })
}

/// `Σ_{transient} R_i + R_max·S·g/(g−1)` where `S` is a span of cycle levels
/// after which every image has grown by a factor `g ≥ 2`.
fn geometric_bound(seq: &DirectiveSequence, radii: &[u64]) -> Option<u64> {
    if !seq.is_everywhere_growing() {
        return None;
    }
    let tt = seq.transient().len();
    let c = seq.cycle().len();
    let k = (1..).find(|&k| (0..c).all(|p| seq.block_min_len(tt + p, tt + p + k * c) >= 2))?;
    let span = k * c;
    let g = (0..c).map(|p| seq.block_min_len(tt + p, tt + p + span)).min()? as f64;
    let transient: u64 = radii[..tt].iter().sum();
    let r_max = radii[tt..].iter().copied().max().unwrap_or(0) as f64;
    let bound = transient as f64 + r_max * span as f64 * g / (g - 1.0);
    Some((bound - 1e-9).ceil().max(0.0) as u64)
}

/// Renders a scheme as `cuts` plus the parsed letters.
pub fn format_scheme(s: &DesubstitutionScheme, domain: &Alphabet) -> String {
    let cuts: Vec<String> = s.cuts.iter().map(i64::to_string).collect();
    format!("cuts [{}] from k_{} letters {}", cuts.join(", "), s.first_index, domain.format_word(&s.letters))
}
