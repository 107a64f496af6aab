//! Randomized property suites, shared by the `properties` and `acceptance` targets.
//!
//! Each suite runs a proptest runner for `CASES` cases and returns the
//! shrunk counterexample on failure.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use expanse_core::corpus;
use expanse_core::directive::DirectiveSequence;
use expanse_core::language::{complexity, language, language_at_level, LanguageSource, LimitSet};
use expanse_core::parsing::{enumerate_schemes, enumerate_standard_schemes, probe_right_radius, radius_compose, Window};
use expanse_core::predecessors::{degree_profile, lower_bound_witness, predecessor_table};
use expanse_core::sofic::{sft_from_forbidden, SoficPresentation, DEFAULT_COUNT_CAP};
use expanse_core::substitution::Substitution;
use expanse_core::words::{self, Alphabet, Letter, Word};
use expanse_core::{certify, CertifyConfig, Verdict};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

pub const CASES: u32 = 256;

pub fn alpha(n: usize) -> Alphabet {
    Alphabet::from_chars(&"abcd"[..n]).unwrap()
}

pub fn word_over(n: usize, lo: usize, hi: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..n as u8, lo..=hi).prop_map(|v| Word::from_indices(&v))
}

/// `dom` letters to words of length `lo..=hi` over `cod` letters.
pub fn sub(dom: usize, cod: usize, lo: usize, hi: usize) -> impl Strategy<Value = Substitution> {
    prop::collection::vec(word_over(cod, lo, hi), dom)
        .prop_map(move |imgs| Substitution::new(alpha(dom), alpha(cod), imgs).unwrap())
}

/// Right-marked endomorphism with images of length `lo..=hi`, `lo ≥ 2`.
pub fn marked(n: usize, lo: usize, hi: usize) -> impl Strategy<Value = Substitution> {
    let lasts = Just((0..n as u8).collect::<Vec<u8>>()).prop_shuffle();
    (lasts, prop::collection::vec(word_over(n, lo - 1, hi - 1), n)).prop_map(move |(lasts, bodies)| {
        let imgs = bodies.into_iter().zip(lasts).map(|(b, l)| b.concat(&[Letter(l)])).collect();
        Substitution::new(alpha(n), alpha(n), imgs).unwrap()
    })
}

/// Everywhere-growing constant sequences over 2 or 3 letters.
pub fn growing_constant(n: usize) -> impl Strategy<Value = DirectiveSequence> {
    sub(n, n, 1, 3)
        .prop_map(|s| DirectiveSequence::constant(s).unwrap())
        .prop_filter("everywhere-growing", |s| s.is_everywhere_growing())
}

pub fn sequence() -> impl Strategy<Value = DirectiveSequence> {
    (2usize..=3)
        .prop_flat_map(|n| (prop::collection::vec(sub(n, n, 1, 3), 0..=2), prop::collection::vec(sub(n, n, 1, 3), 1..=2)))
        .prop_map(|(t, c)| DirectiveSequence::new(t, c).unwrap())
}

fn run<S: Strategy>(strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: CASES, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn brute_suffix_code(ws: &[Word]) -> bool {
    let set: BTreeSet<&Word> = ws.iter().collect();
    !set.iter().any(|u| set.iter().any(|v| u != v && v.ends_with(u)))
}

/// Every word of length at most `n` over the domain.
fn words_upto(a: &Alphabet, n: usize) -> Vec<Word> {
    (0..=n).flat_map(|k| a.all_words(k)).collect()
}

// words

pub fn suffix_transitivity() -> Result<(), String> {
    run((word_over(2, 0, 6), word_over(2, 0, 6), word_over(2, 0, 6)), |(u, v, w)| {
        if words::is_suffix(&u, &v) && words::is_suffix(&v, &w) {
            prop_assert!(words::is_suffix(&u, &w));
        }
        Ok(())
    })
}

pub fn suffix_code_brute_force() -> Result<(), String> {
    run(prop::collection::vec(word_over(2, 1, 4), 1..=10), |ws| {
        prop_assert_eq!(words::is_suffix_code(&ws).unwrap(), brute_suffix_code(&ws));
        Ok(())
    })
}

pub fn suffix_code_extension() -> Result<(), String> {
    let code = prop::collection::vec(word_over(3, 1, 4), 1..=6).prop_filter("suffix code", |ws| {
        let distinct: BTreeSet<&Word> = ws.iter().collect();
        distinct.len() == ws.len() && brute_suffix_code(ws)
    });
    let case = code.prop_flat_map(|ws| {
        let n = ws.len();
        (Just(ws), prop::collection::vec(word_over(3, 0, 3), n))
    });
    run(case, |(ws, prefixes)| {
        let ext: Vec<Word> = ws.iter().zip(&prefixes).map(|(w, p)| p.concat(w)).collect();
        prop_assert!(words::is_suffix_code(&ext).unwrap());
        Ok(())
    })
}

// substitutions

pub fn composition_associativity() -> Result<(), String> {
    let triple = (1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3)
        .prop_flat_map(|(a, b, c, d)| (sub(b, a, 1, 3), sub(c, b, 1, 3), sub(d, c, 1, 3)));
    run(triple, |(t1, t2, t3)| {
        let left = t1.compose(&t2).unwrap().compose(&t3).unwrap();
        let right = t1.compose(&t2.compose(&t3).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        Ok(())
    })
}

pub fn homomorphism_law() -> Result<(), String> {
    let case = (1usize..=3, 1usize..=3, 1usize..=3)
        .prop_flat_map(|(a, b, c)| (sub(b, a, 1, 3), sub(c, b, 1, 3), word_over(c, 0, 8), word_over(c, 0, 8)));
    run(case, |(t1, t2, u, v)| {
        let composed = t1.compose(&t2).unwrap();
        prop_assert_eq!(composed.expand(&u).unwrap(), t1.expand(&t2.expand(&u).unwrap()).unwrap());
        let uv = u.concat(&v);
        prop_assert_eq!(t2.expand(&uv).unwrap(), t2.expand(&u).unwrap().concat(&t2.expand(&v).unwrap()));
        Ok(())
    })
}

/// A right-recoverable substitution induces an injective monoid morphism.
pub fn monoid_injectivity() -> Result<(), String> {
    let case = prop_oneof![(2usize..=3).prop_flat_map(|n| sub(n, n, 2, 3)), (2usize..=3).prop_flat_map(|n| marked(n, 2, 3))];
    run(case, |tau| {
        if !tau.is_right_recoverable() {
            return Ok(());
        }
        let mut seen: HashMap<Word, Word> = HashMap::new();
        for u in words_upto(tau.domain(), 6) {
            let img = tau.expand(&u).unwrap();
            if let Some(prev) = seen.insert(img, u.clone()) {
                prop_assert!(false, "{:?} and {:?} have the same image", prev, u);
            }
        }
        Ok(())
    })
}

pub fn composition_recoverability() -> Result<(), String> {
    let case = (2usize..=3).prop_flat_map(|n| {
        let inner = prop_oneof![marked(n, 2, 4), sub(n, n, 2, 4)];
        (prop_oneof![marked(n, 2, 3), sub(n, n, 2, 3)], inner, 1usize..4)
    });
    run(case, |(tau, inner, q)| {
        if !tau.is_right_recoverable() || q >= inner.min_len() || !inner.is_q_right_recoverable(q).unwrap() {
            return Ok(());
        }
        let composed = tau.compose(&inner).unwrap();
        prop_assert!(composed.is_q_right_recoverable(q * tau.min_len()).unwrap());
        Ok(())
    })
}

pub fn right_marked_closure() -> Result<(), String> {
    let case = (1usize..=3).prop_flat_map(|n| (marked(n, 2, 3), marked(n, 2, 3)));
    run(case, |(a, b)| {
        prop_assert!(a.compose(&b).unwrap().is_right_marked());
        Ok(())
    })
}

// directive sequences

pub fn block_composition() -> Result<(), String> {
    run((sequence(), 0usize..5, 0usize..5, 0usize..5), |(seq, a, b, c)| {
        let mut t = [a, b, c];
        t.sort();
        let whole = seq.block(t[0], t[2]).unwrap().substitution;
        let split = seq.block(t[0], t[1]).unwrap().substitution.compose(&seq.block(t[1], t[2]).unwrap().substitution).unwrap();
        prop_assert_eq!(whole, split);
        Ok(())
    })
}

/// `⟨τ_{[0,t)}⟩ ≥ ⟨τ_{[0,t')}⟩·⟨τ_{[t',t)}⟩`.
pub fn min_length_supermultiplicative() -> Result<(), String> {
    run((sequence(), 0usize..8, 0usize..8), |(seq, a, b)| {
        let (s, t) = (a.min(b), a.max(b));
        prop_assert!(seq.block_min_len(0, t) >= seq.block_min_len(0, s) * seq.block_min_len(s, t));
        Ok(())
    })
}

pub fn telescoping_blocks() -> Result<(), String> {
    run(sequence().prop_filter("growing", |s| s.is_everywhere_growing()), |seq| {
        let tel = seq.telescope_expanding().unwrap();
        for i in 0..tel.sequence.description_len() + 2 {
            prop_assert!(tel.sequence.level(i).min_len() >= 2);
        }
        for i in 0..=4 {
            let regrouped = tel.sequence.block(0, i).unwrap().substitution;
            let original = seq.block(0, tel.original_level(i)).unwrap().substitution;
            prop_assert_eq!(regrouped, original);
        }
        Ok(())
    })
}

pub fn growth_agrees_with_lengths() -> Result<(), String> {
    run(sequence(), |seq| {
        let tt = seq.transient().len();
        let n = seq.alphabet(tt).len();
        let c = seq.cycle().len();
        if seq.is_everywhere_growing() {
            prop_assert!(seq.block_min_len(0, tt + 4 * n * c) >= 16);
        } else {
            let cap = seq.block_max_len(0, tt);
            prop_assert!(seq.block_min_len(0, tt + 8 * n * c) <= cap);
        }
        Ok(())
    })
}

// languages

pub fn language_closure_and_extension() -> Result<(), String> {
    run((growing_constant(2), 2usize..9), |(seq, r)| {
        let long = language(&seq, r, 64).unwrap();
        let short = language(&seq, r - 1, 64).unwrap();
        let mut factors = BTreeSet::new();
        for w in &long.words {
            prop_assert!(short.contains(&w[..r - 1]) && short.contains(&w[1..]));
            factors.insert(Word::from(&w[..r - 1]));
            factors.insert(Word::from(&w[1..]));
        }
        // every shorter word extends on both sides
        for w in &short.words {
            prop_assert!(long.words.iter().any(|x| x[1..] == w[..]));
            prop_assert!(long.words.iter().any(|x| x[..r - 1] == w[..]));
        }
        prop_assert_eq!(factors.len(), short.len());
        Ok(())
    })
}

pub fn language_level_stability() -> Result<(), String> {
    run((sequence().prop_filter("growing", |s| s.is_everywhere_growing()), 1usize..8), |(seq, r)| {
        let t = (0..).find(|&t| seq.block_min_len(0, t) >= r as u128).unwrap();
        let c = seq.cycle().len();
        prop_assert_eq!(language_at_level(&seq, r, t).unwrap().words, language_at_level(&seq, r, t + c).unwrap().words);
        Ok(())
    })
}

pub fn complexity_growth() -> Result<(), String> {
    run(prop_oneof![growing_constant(2), growing_constant(3)], |seq| {
        let p = complexity(&seq, 10, 64).unwrap();
        let k = seq.alphabet(0).len();
        for w in p.windows(2) {
            prop_assert!(w[0] <= w[1] && w[1] <= k * w[0]);
        }
        Ok(())
    })
}

// parsing

fn limit_word(seq: &DirectiveSequence, r: usize, pick: usize) -> Word {
    let words = language(seq, r, 64).unwrap().words;
    words[pick % words.len()].clone()
}

fn window_case() -> impl Strategy<Value = (Substitution, Window)> {
    (growing_constant(2), any::<usize>(), 8usize..14).prop_map(|(seq, pick, len)| {
        let w = limit_word(&seq, len, pick);
        let tau = seq.level(0).clone();
        let origin = len / 2;
        (tau, Window::new(w, origin).unwrap())
    })
}

pub fn scheme_reassembly() -> Result<(), String> {
    run(window_case(), |(tau, win)| {
        for s in enumerate_schemes(&tau, &win).unwrap() {
            let mut out: Vec<Letter> = Vec::new();
            let mut letters = s.letters.iter();
            if s.left_partial {
                let img = tau.image(*letters.next().unwrap());
                let len = (s.cuts[0] - win.start()) as usize;
                out.extend_from_slice(&img[img.len() - len..]);
            }
            for p in s.cuts.windows(2) {
                out.extend_from_slice(tau.image(*letters.next().unwrap()));
                prop_assert_eq!(out.len() as i64, p[1] - win.start());
            }
            if s.right_partial {
                let img = tau.image(*letters.next().unwrap());
                let len = (win.end() - s.cuts[s.cuts.len() - 1]) as usize;
                out.extend_from_slice(&img[..len]);
            }
            prop_assert!(letters.next().is_none());
            prop_assert_eq!(&out[..], &win.word[..]);
        }
        Ok(())
    })
}

/// `i⟨τ⟩ − ‖τ‖ < k_i ≤ i‖τ‖` on standard schemes.
pub fn cut_bounds() -> Result<(), String> {
    run(window_case(), |(tau, win)| {
        if win.word.len() < 2 * tau.max_len() || win.origin < tau.max_len() {
            return Ok(());
        }
        let (lo, hi) = (tau.min_len() as i64, tau.max_len() as i64);
        for s in enumerate_standard_schemes(&tau, &win).unwrap() {
            for i in 0.. {
                let Some(k) = s.cut(i) else { break };
                prop_assert!(i * lo - hi < k && k <= i * hi, "k_{} = {} in {:?}", i, k, s.cuts);
            }
        }
        Ok(())
    })
}

pub fn scheme_shift_compatibility() -> Result<(), String> {
    run((window_case(), 0usize..4), |((tau, win), j)| {
        let j = j.min(win.word.len() - win.origin);
        let moved = Window::new(win.word.clone(), win.origin + j).unwrap();
        let before: BTreeSet<Vec<i64>> =
            enumerate_schemes(&tau, &win).unwrap().into_iter().map(|s| s.cuts.iter().map(|k| k - j as i64).collect()).collect();
        let after: BTreeSet<Vec<i64>> = enumerate_schemes(&tau, &moved).unwrap().into_iter().map(|s| s.cuts).collect();
        prop_assert_eq!(before, after);
        Ok(())
    })
}

pub fn radius_refutation_monotone() -> Result<(), String> {
    run(growing_constant(2), |seq| {
        let tau = seq.level(0).clone();
        let m = 5 * tau.max_len();
        let over = LimitSet::new(seq, 64);
        let mut refuted = Vec::new();
        for r in 0..=3 {
            match probe_right_radius(&tau, r, m, &over) {
                Ok(rep) => refuted.push(rep.refuted()),
                // exponentially many parses of a near-periodic window
                Err(e) if e.is_budget() => return Ok(()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
        for r in 1..=3 {
            if refuted[r] {
                prop_assert!(refuted[r - 1]);
            }
        }
        Ok(())
    })
}

pub fn radius_compose_identities() -> Result<(), String> {
    run((0u64..1000, 1u64..50, 0u64..1000), |(r, m, r2)| {
        prop_assert_eq!(radius_compose(0, m, r2), r2);
        prop_assert_eq!(radius_compose(r, 1, 0), r);
        prop_assert!(radius_compose(r, m, r2) <= r + r2);
        prop_assert!(radius_compose(r, m, r2) <= radius_compose(r + 1, m, r2));
        prop_assert!(radius_compose(r, m + 1, r2) <= radius_compose(r, m, r2));
        prop_assert_eq!(radius_compose(r * m, m, r2), r + r2);
        Ok(())
    })
}

// predecessors

pub fn predecessor_monotone_in_right_length() -> Result<(), String> {
    run((growing_constant(2), 1usize..4, 1usize..12), |(seq, ell, r)| {
        let src = LimitSet::new(seq, 64);
        let a = predecessor_table(&src, ell, r).unwrap().max;
        let b = predecessor_table(&src, ell, r + 1).unwrap().max;
        prop_assert!(b <= a);
        let p = degree_profile(&src, ell, r).unwrap();
        prop_assert_eq!(p.maxima[ell - 1], a);
        Ok(())
    })
}

// certificates

/// Small probe budgets keep random cases fast; soundness must not depend on them.
pub fn small_config() -> CertifyConfig {
    CertifyConfig { budget: 48, probe_window: 12, m_max: 6, radius_max: 2 }
}

/// Emitted bounds are never exceeded by the predecessor-count oracle.
pub fn certificate_soundness_random() -> Result<(), String> {
    run(growing_constant(2), |seq| {
        let cert = match certify(&seq, &small_config()) {
            Ok(c) => c,
            Err(e) if e.is_budget() => return Ok(()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        if let Verdict::Bound(n) = cert.verdict {
            let p = degree_profile(&LimitSet::new(seq, 64), 3, 32).unwrap();
            prop_assert!(p.max() as u128 <= n, "profile {:?} exceeds {} ({:?})", p.maxima, n, cert.rule);
        }
        Ok(())
    })
}

/// Certificates on the built-in corpus against the oracle at several window sizes.
pub fn certificate_soundness_corpus() -> Result<(), String> {
    for (name, seq) in corpus::sequences() {
        let cert = certify(&seq, &CertifyConfig::default()).map_err(|e| format!("{name}: {e}"))?;
        let Some(n) = cert.bound() else { continue };
        let src = LimitSet::new(seq, 128);
        for (ell, r) in [(1, 16), (2, 24), (4, 32), (6, 40)] {
            let max = predecessor_table(&src, ell, r).map_err(|e| e.to_string())?.max as u128;
            if max > n {
                return Err(format!("{name}: count {max} at ell {ell}, R_w {r} exceeds bound {n}"));
            }
        }
        if cert.lower_bound.is_some() {
            let w = lower_bound_witness(&src, 4, 32).map_err(|e| e.to_string())?;
            if w.count as u128 != n || !w.persistent {
                return Err(format!("{name}: witness {} (persistent {}) for bound {n}", w.count, w.persistent));
            }
        }
    }
    Ok(())
}

// sofic

fn graph() -> impl Strategy<Value = SoficPresentation> {
    (1usize..=4)
        .prop_flat_map(|n| prop::collection::vec((0..n, 0..2usize, 0..n), 1..=8))
        .prop_map(|edges| {
            let names: Vec<(String, String, String)> =
                edges.iter().map(|(s, l, d)| (format!("q{s}"), l.to_string(), format!("q{d}"))).collect();
            let refs: Vec<(&str, &str, &str)> = names.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
            SoficPresentation::from_edges(&refs).unwrap()
        })
        .prop_filter("nonempty", |p| !p.is_empty())
}

pub fn sofic_family_closure() -> Result<(), String> {
    run(graph(), |p| {
        let fam = p.predecessor_set_family().unwrap();
        prop_assert!(!fam.members.is_empty());
        for s in &fam.members {
            for a in p.alphabet().letters() {
                let b = p.back(s, a);
                prop_assert!(b.is_empty() || fam.members.contains(&b));
            }
        }
        prop_assert!(p.predecessor_classes(&fam) <= fam.members.len());
        Ok(())
    })
}

pub fn sofic_finiteness_coherence() -> Result<(), String> {
    run(graph(), |p| {
        let finite = p.is_finite_shift();
        let prof = p.sofic_degree_profile(12, DEFAULT_COUNT_CAP).unwrap();
        let c = p.complexity(16);
        if finite {
            prop_assert_eq!(prof.maxima[11], prof.maxima[5]);
            prop_assert_eq!(c[15], c[7]);
        } else {
            prop_assert!(prof.maxima[11].value > prof.maxima[5].value, "{:?}", prof.maxima);
            prop_assert!(c[15] > c[7]);
        }
        Ok(())
    })
}

/// Subset-automaton words of a shift of finite type against bi-infinitely extendable admissible words.
pub fn sft_language_brute_force() -> Result<(), String> {
    run(prop::collection::vec(word_over(2, 1, 3), 0..=3), |forbidden| {
        let a = alpha(2);
        let p = sft_from_forbidden(&a, &forbidden).unwrap();
        let clean = |w: &[Letter]| !forbidden.iter().any(|f| w.windows(f.len()).any(|x| x == &f[..]));
        let (r, pad) = (4, 6);
        let mut expected: BTreeSet<Word> = BTreeSet::new();
        for w in a.all_words(r + 2 * pad) {
            if clean(&w) {
                expected.insert(Word::from(&w[pad..pad + r]));
            }
        }
        let got: BTreeSet<Word> = p.words(r).unwrap().into_iter().collect();
        prop_assert_eq!(got, expected);
        Ok(())
    })
}

/// Every suite with its name, in a stable order.
pub type Suite = fn() -> Result<(), String>;

pub fn suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("suffix transitivity", suffix_transitivity),
        ("suffix code brute force", suffix_code_brute_force),
        ("suffix code extension", suffix_code_extension),
        ("composition associativity", composition_associativity),
        ("homomorphism law", homomorphism_law),
        ("monoid injectivity", monoid_injectivity),
        ("composition recoverability", composition_recoverability),
        ("right-marked closure", right_marked_closure),
        ("block composition", block_composition),
        ("min length supermultiplicative", min_length_supermultiplicative),
        ("telescoping blocks", telescoping_blocks),
        ("growth agrees with lengths", growth_agrees_with_lengths),
        ("language closure and extension", language_closure_and_extension),
        ("language level stability", language_level_stability),
        ("complexity growth", complexity_growth),
        ("scheme reassembly", scheme_reassembly),
        ("cut bounds", cut_bounds),
        ("scheme shift compatibility", scheme_shift_compatibility),
        ("radius refutation monotone", radius_refutation_monotone),
        ("radius compose identities", radius_compose_identities),
        ("predecessor monotone in right length", predecessor_monotone_in_right_length),
        ("certificate soundness random", certificate_soundness_random),
        ("certificate soundness corpus", certificate_soundness_corpus),
        ("sofic family closure", sofic_family_closure),
        ("sofic finiteness coherence", sofic_finiteness_coherence),
        ("sft language brute force", sft_language_brute_force),
    ]
}
