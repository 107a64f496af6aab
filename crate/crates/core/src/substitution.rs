//! Substitutions (non-erasing letter-to-word maps), their composition and the
//! structural predicates the certificate rules are stated in terms of.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{self, Alphabet, Letter, Word};

/// A map from the letters of `domain` to words over `codomain`.
///
/// Erasing or non-injective maps are representable; the predicates report
/// which hypothesis fails instead of rewriting the map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Substitution {
    domain: Alphabet,
    codomain: Alphabet,
    images: Vec<Word>,
    min_len: usize,
    max_len: usize,
}

/// Result of [`Substitution::normalize`]: the reduced map and where each old
/// domain letter went (`None` when it was erased).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub substitution: Substitution,
    pub letter_map: Vec<Option<Letter>>,
}

impl Substitution {
    pub fn new(domain: Alphabet, codomain: Alphabet, images: Vec<Word>) -> Result<Self> {
        if images.len() != domain.len() {
            return Err(Error::LengthMismatch(format!(
                "{} images for {} letters",
                images.len(),
                domain.len()
            )));
        }
        for img in &images {
            if let Some(l) = img.iter().find(|l| !codomain.contains(**l)) {
                return Err(Error::UnknownLetter(format!("#{}", l.0)));
            }
        }
        let min_len = images.iter().map(|w| w.len()).min().unwrap_or(0);
        let max_len = images.iter().map(|w| w.len()).max().unwrap_or(0);
        Ok(Substitution { domain, codomain, images, min_len, max_len })
    }

    /// Endomorphism from `(letter, image)` pairs over single-character or dotted names.
    ///
    /// ```
    /// # use expanse_core::substitution::Substitution;
    /// let fib = Substitution::from_rules(&[("a", "ab"), ("b", "a")]).unwrap();
    /// assert_eq!(fib.to_string(), "a -> ab\nb -> a\n");
    /// ```
    pub fn from_rules(rules: &[(&str, &str)]) -> Result<Self> {
        let text: String = rules.iter().map(|(l, w)| format!("{l} -> {w}\n")).collect();
        Self::parse(&text)
    }

    pub fn identity(alphabet: &Alphabet) -> Self {
        let images = alphabet.letters().map(|l| Word(vec![l])).collect();
        Substitution::new(alphabet.clone(), alphabet.clone(), images).expect("identity is valid")
    }

    pub fn domain(&self) -> &Alphabet {
        &self.domain
    }

    pub fn codomain(&self) -> &Alphabet {
        &self.codomain
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn image(&self, a: Letter) -> &Word {
        &self.images[a.index()]
    }

    /// Minimal image length.
    pub fn min_len(&self) -> usize {
        self.min_len
    }

    /// Maximal image length.
    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain == self.codomain
    }

    /// Same map with the codomain re-indexed onto `codomain`, which must
    /// contain every letter name used by the images.
    pub fn with_codomain(&self, codomain: &Alphabet) -> Result<Self> {
        let images = self
            .images
            .iter()
            .map(|w| {
                w.iter()
                    .map(|&l| {
                        let name = self.codomain.name(l);
                        codomain.letter(name).ok_or_else(|| Error::AlphabetMismatch(format!("`{name}` missing")))
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Word)
            })
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(self.domain.clone(), codomain.clone(), images)
    }

    /// Same map with the domain letters reordered as in `domain` (same letter set).
    pub fn with_domain(&self, domain: &Alphabet) -> Result<Self> {
        if !domain.same_letters(&self.domain) {
            return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", domain.names(), self.domain.names())));
        }
        let images = domain
            .names()
            .iter()
            .map(|n| self.image(self.domain.letter(n).expect("same letters")).clone())
            .collect();
        Substitution::new(domain.clone(), self.codomain.clone(), images)
    }

    /// `self ∘ inner`: first `inner`, then `self` on each letter of the result.
    pub fn compose(&self, inner: &Substitution) -> Result<Substitution> {
        if !inner.codomain.same_letters(&self.domain) {
            return Err(Error::AlphabetMismatch(format!(
                "inner codomain {:?} vs outer domain {:?}",
                inner.codomain.names(),
                self.domain.names()
            )));
        }
        let inner = if inner.codomain == self.domain { inner.clone() } else { inner.with_codomain(&self.domain)? };
        let images = inner.images.iter().map(|w| self.expand_unchecked(w)).collect();
        Substitution::new(inner.domain.clone(), self.codomain.clone(), images)
    }

    /// Homomorphic extension to words over the domain.
    pub fn expand(&self, u: &[Letter]) -> Result<Word> {
        if let Some(l) = u.iter().find(|l| !self.domain.contains(**l)) {
            return Err(Error::UnknownLetter(format!("#{}", l.0)));
        }
        Ok(self.expand_unchecked(u))
    }

    pub(crate) fn expand_unchecked(&self, u: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(u.len() * self.max_len);
        for l in u {
            out.extend_from_slice(&self.images[l.index()]);
        }
        Word(out)
    }

    pub fn is_non_erasing(&self) -> bool {
        self.min_len >= 1
    }

    pub fn is_injective(&self) -> bool {
        let mut seen: Vec<&Word> = self.images.iter().collect();
        seen.sort();
        seen.windows(2).all(|p| p[0] != p[1])
    }

    pub fn is_uniform(&self) -> bool {
        self.min_len == self.max_len
    }

    /// Every image has length at least 2.
    pub fn is_expanding(&self) -> bool {
        self.min_len >= 2
    }

    pub fn is_left_proper(&self) -> bool {
        self.is_non_erasing() && self.images.iter().all(|w| w[0] == self.images[0][0])
    }

    /// The last-letter map is one-to-one.
    pub fn is_right_marked(&self) -> bool {
        if !self.is_non_erasing() {
            return false;
        }
        let mut last: Vec<Letter> = self.images.iter().map(|w| w[w.len() - 1]).collect();
        last.sort();
        last.windows(2).all(|p| p[0] != p[1])
    }

    /// Injective, and the words `τ(a)[q..]` are pairwise distinct and form a suffix code.
    ///
    /// `q` must lie in `[1, min_len)`; outside that range the question is
    /// ill-posed and an `OutOfRange` error is returned.
    pub fn is_q_right_recoverable(&self, q: usize) -> Result<bool> {
        if q == 0 || q >= self.min_len {
            return Err(Error::OutOfRange(format!("q = {q} not in [1, {})", self.min_len)));
        }
        if !self.is_injective() {
            return Ok(false);
        }
        let tails: Vec<&[Letter]> = self.images.iter().map(|w| &w[q..]).collect();
        let mut sorted = tails.clone();
        sorted.sort();
        if sorted.windows(2).any(|p| p[0] == p[1]) {
            return Ok(false);
        }
        words::is_suffix_code(&tails)
    }

    /// Largest `q` for which the substitution is q-right-recoverable.
    ///
    /// The valid `q` form a downward-closed interval, so the scan stops at the
    /// first success from the top.
    pub fn max_right_recoverability(&self) -> Option<usize> {
        (1..self.min_len.max(1)).rev().find(|&q| self.is_q_right_recoverable(q).unwrap_or(false))
    }

    pub fn is_right_recoverable(&self) -> bool {
        self.max_right_recoverability().is_some()
    }

    pub fn maximal_common_prefix(&self) -> Result<Word> {
        if !self.is_left_proper() {
            return Err(Error::NotLeftProper);
        }
        Ok(Word(words::common_prefix(&self.images)))
    }

    /// Injective, and `w` occurs exactly twice in every `τ(a)w`: as a prefix and as a suffix.
    pub fn is_return_substitution(&self, w: &[Letter]) -> bool {
        if w.is_empty() || !self.is_injective() {
            return false;
        }
        self.images.iter().all(|img| {
            let text = img.concat(w);
            words::occurrences(w, &text) == [0, img.len()]
        })
    }

    /// A nonoverlapping word with respect to which this is a return substitution, if any.
    ///
    /// Candidates are the prefixes of the maximal common prefix, shortest first.
    pub fn return_word(&self) -> Option<Word> {
        let prefix = self.maximal_common_prefix().ok()?;
        (1..=prefix.len())
            .map(|n| &prefix[..n])
            .find(|w| words::is_nonoverlapping(w).unwrap_or(false) && self.is_return_substitution(w))
            .map(Word::from)
    }

    /// Left-proper, uniform, injective and expanding.
    pub fn is_toeplitz(&self) -> bool {
        self.is_left_proper() && self.is_uniform() && self.is_injective() && self.is_expanding()
    }

    /// Letters whose image is a constant word `a^|τ|` of the same length as
    /// every other image; a uniform map has a monochromatic letter iff this is nonempty.
    pub fn monochromatic_letters(&self) -> Vec<(Letter, Letter)> {
        self.domain
            .letters()
            .filter_map(|b| {
                let img = self.image(b);
                let first = *img.first()?;
                img.iter().all(|&l| l == first).then_some((b, first))
            })
            .collect()
    }

    /// Drops erased letters and merges letters with equal images (keeping the
    /// first). Never applied implicitly.
    pub fn normalize(&self) -> Normalized {
        let mut kept: Vec<Letter> = Vec::new();
        let mut letter_map = vec![None; self.domain.len()];
        for a in self.domain.letters() {
            let img = self.image(a);
            if img.is_empty() {
                continue;
            }
            match kept.iter().position(|&k| self.image(k) == img) {
                Some(i) => letter_map[a.index()] = Some(Letter(i as u8)),
                None => {
                    letter_map[a.index()] = Some(Letter(kept.len() as u8));
                    kept.push(a);
                }
            }
        }
        let names: Vec<String> = kept.iter().map(|&a| self.domain.name(a).to_string()).collect();
        let images = kept.iter().map(|&a| self.image(a).clone()).collect();
        let substitution = match Alphabet::new(names) {
            Ok(domain) => Substitution::new(domain, self.codomain.clone(), images).expect("subset of a valid map"),
            // everything erased: keep the original, nothing sensible to reduce to
            Err(_) => self.clone(),
        };
        Normalized { substitution, letter_map }
    }

    /// Rewrites the images of a map whose codomain is this map's *old* domain
    /// through a [`Normalized::letter_map`], dropping erased letters.
    pub fn relabel_through(&self, norm: &Normalized) -> Result<Substitution> {
        let images = self
            .images
            .iter()
            .map(|w| Word(w.iter().filter_map(|l| norm.letter_map.get(l.index()).copied().flatten()).collect()))
            .collect();
        Substitution::new(self.domain.clone(), norm.substitution.domain.clone(), images)
    }

    /// Parses the one-rule-per-line format `<letter> -> <word>`.
    ///
    /// Blank lines and `#` comments are ignored. Words are runs of
    /// single-character letters, or `.`-separated names when any letter
    /// name is longer than one character. When every image letter also
    /// appears on a left-hand side the codomain is the domain; otherwise it
    /// is ordered by first appearance.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rules: Vec<(usize, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected `<letter> -> <word>`".into() })?;
            let lhs = lhs.trim();
            if lhs.is_empty() || lhs.contains(char::is_whitespace) {
                return Err(Error::Parse { line: i + 1, msg: format!("bad letter `{lhs}`") });
            }
            rules.push((i + 1, lhs.to_string(), rhs.trim().to_string()));
        }
        if rules.is_empty() {
            return Err(Error::Parse { line: 0, msg: "no rules".into() });
        }
        let dotted = rules.iter().any(|(_, l, r)| l.chars().count() > 1 || r.contains('.'));
        let tokenize = |r: &str| -> Vec<String> {
            if r.is_empty() || r == "ε" {
                Vec::new()
            } else if dotted {
                r.split('.').map(str::to_string).collect()
            } else {
                r.chars().map(String::from).collect()
            }
        };
        let domain = Alphabet::new(rules.iter().map(|(_, l, _)| l.clone())).map_err(|e| match e {
            Error::DuplicateLetter(d) => Error::Parse { line: 0, msg: format!("letter `{d}` defined twice") },
            e => e,
        })?;
        let tokens: Vec<(usize, Vec<String>)> = rules.iter().map(|(n, _, r)| (*n, tokenize(r))).collect();
        let codomain = if tokens.iter().all(|(_, ts)| ts.iter().all(|t| domain.letter(t).is_some())) {
            domain.clone()
        } else {
            let mut names: Vec<String> = Vec::new();
            for (_, ts) in &tokens {
                for t in ts {
                    if !names.contains(t) {
                        names.push(t.clone());
                    }
                }
            }
            Alphabet::new(names)?
        };
        let images = tokens
            .iter()
            .map(|(n, ts)| {
                ts.iter()
                    .map(|t| codomain.letter(t).ok_or_else(|| Error::Parse { line: *n, msg: format!("bad letter `{t}`") }))
                    .collect::<Result<Vec<_>>>()
                    .map(Word)
            })
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(domain, codomain, images)
    }

    /// `(letter, image)` pairs in the text format's notation.
    pub fn rules(&self) -> Vec<(String, String)> {
        let dotted = self.domain.is_dotted() || self.codomain.is_dotted();
        self.domain
            .letters()
            .map(|a| {
                let img = self.image(a);
                let rhs = if img.is_empty() {
                    "ε".to_string()
                } else {
                    let sep = if dotted { "." } else { "" };
                    img.iter().map(|&l| self.codomain.name(l)).collect::<Vec<_>>().join(sep)
                };
                (self.domain.name(a).to_string(), rhs)
            })
            .collect()
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, r) in self.rules() {
            writeln!(f, "{l} -> {r}")?;
        }
        Ok(())
    }
}
