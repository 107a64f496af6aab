//! Built-in example systems shared by the tests, benches and the CLI's
//! `examples` subcommand.

use crate::directive::DirectiveSequence;
use crate::sofic::SoficPresentation;
use crate::substitution::Substitution;
use crate::words::{Alphabet, Letter, Word};

fn sub(rules: &[(&str, &str)]) -> Substitution {
    Substitution::from_rules(rules).expect("corpus substitution")
}

/// a → ab, b → a
pub fn fibonacci() -> Substitution {
    sub(&[("a", "ab"), ("b", "a")])
}

/// a → ab, b → ba
pub fn thue_morse() -> Substitution {
    sub(&[("a", "ab"), ("b", "ba")])
}

/// k → 0 1 … (n−1) k over the digits `0..n`.
pub fn toeplitz(n: usize) -> Substitution {
    assert!((2..=10).contains(&n), "toeplitz alphabet must have 2..=10 letters");
    let alphabet = Alphabet::indexed("", n).expect("digits");
    let images = alphabet
        .letters()
        .map(|k| Word((0..n as u8).map(Letter).chain([k]).collect()))
        .collect();
    Substitution::new(alphabet.clone(), alphabet, images).expect("toeplitz")
}

/// a → abc, b → bbc, c → aba
pub fn abc_bbc_aba() -> Substitution {
    sub(&[("a", "abc"), ("b", "bbc"), ("c", "aba")])
}

/// a → aa, b → bb
pub fn doubling() -> Substitution {
    sub(&[("a", "aa"), ("b", "bb")])
}

/// a → aa, b → ab
pub fn aa_ab() -> Substitution {
    sub(&[("a", "aa"), ("b", "ab")])
}

/// Arnoux-Rauzy generator over `a0..a{rk-1}`: a_j → a_i a_j for j ≠ i, a_i → a_i.
pub fn arnoux_rauzy_generator(rk: usize, i: usize) -> Substitution {
    assert!(i < rk);
    let alphabet = Alphabet::indexed("a", rk).expect("indexed alphabet");
    let images = alphabet
        .letters()
        .map(|j| if j.index() == i { Word(vec![j]) } else { Word(vec![Letter(i as u8), j]) })
        .collect();
    Substitution::new(alphabet.clone(), alphabet, images).expect("arnoux-rauzy")
}

pub fn arnoux_rauzy(rk: usize, transient: &[usize], cycle: &[usize]) -> DirectiveSequence {
    DirectiveSequence::new(
        transient.iter().map(|&i| arnoux_rauzy_generator(rk, i)).collect(),
        cycle.iter().map(|&i| arnoux_rauzy_generator(rk, i)).collect(),
    )
    .expect("arnoux-rauzy sequence")
}

/// Binary shift forbidding `11`.
pub fn golden_mean() -> SoficPresentation {
    SoficPresentation::from_edges(&[("0", "0", "0"), ("0", "1", "1"), ("1", "0", "0")]).expect("golden mean")
}

/// Even shift: blocks of 0 between two 1s have even length.
pub fn even_shift() -> SoficPresentation {
    SoficPresentation::from_edges(&[("A", "0", "B"), ("B", "0", "A"), ("A", "1", "A")]).expect("even shift")
}

/// Every named substitution in the corpus, as constant directive sequences.
pub fn substitutions() -> Vec<(String, Substitution)> {
    let mut out = vec![
        ("fibonacci".to_string(), fibonacci()),
        ("thue_morse".to_string(), thue_morse()),
        ("abc_bbc_aba".to_string(), abc_bbc_aba()),
        ("aa_bb".to_string(), doubling()),
        ("aa_ab".to_string(), aa_ab()),
    ];
    for n in 2..=5 {
        out.push((format!("toeplitz{n}"), toeplitz(n)));
    }
    for rk in 2..=3 {
        for i in 0..rk {
            out.push((format!("ar{rk}_tau{i}"), arnoux_rauzy_generator(rk, i)));
        }
    }
    out
}

/// Named directive sequences: the constant corpus substitutions plus Arnoux-Rauzy cycles.
pub fn sequences() -> Vec<(String, DirectiveSequence)> {
    let mut out: Vec<(String, DirectiveSequence)> = substitutions()
        .into_iter()
        .filter(|(name, _)| !name.starts_with("ar"))
        .map(|(name, s)| (name, DirectiveSequence::constant(s).expect("endomorphism")))
        .collect();
    out.push(("ar2_cycle01".to_string(), arnoux_rauzy(2, &[], &[0, 1])));
    out.push(("ar3_cycle012".to_string(), arnoux_rauzy(3, &[], &[0, 1, 2])));
    out
}

pub fn presentations() -> Vec<(String, SoficPresentation)> {
    vec![("golden_mean".to_string(), golden_mean()), ("even_shift".to_string(), even_shift())]
}
