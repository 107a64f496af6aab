//! Alphabets, finite words and elementary word predicates.
//!
//! Letters are small opaque indices into an [`Alphabet`], which owns the
//! printable names. Words are plain letter sequences; the alphabet travels
//! alongside them wherever printing or parsing is needed.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a letter within its alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(transparent)]
pub struct Letter(pub u8);

impl Letter {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ordered finite set of distinct, printable letter names.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if names.len() > 256 {
            return Err(Error::AlphabetTooLarge(names.len()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || n.contains(['.', ' ', '\t', '#']) || n == "ε" {
                return Err(Error::Parse { line: 0, msg: format!("invalid letter name `{n}`") });
            }
            if names[..i].contains(n) {
                return Err(Error::DuplicateLetter(n.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    /// Alphabet whose letters are the characters of `chars`, e.g. `"ab"`.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Self::new(chars.chars().map(String::from))
    }

    /// Letters `prefix0 .. prefix{n-1}`, or the digits `0..n` when `prefix` is empty and `n <= 10`.
    pub fn indexed(prefix: &str, n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| format!("{prefix}{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).map(|i| Letter(i as u8))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, l: Letter) -> &str {
        &self.names[l.index()]
    }

    pub fn letter(&self, name: &str) -> Option<Letter> {
        self.names.iter().position(|n| n == name).map(|i| Letter(i as u8))
    }

    pub fn contains(&self, l: Letter) -> bool {
        l.index() < self.names.len()
    }

    /// Same letter names, ignoring order.
    pub fn same_letters(&self, other: &Alphabet) -> bool {
        self.len() == other.len() && self.names.iter().all(|n| other.names.contains(n))
    }

    /// Multi-character names force the dotted word notation (`a1.a2`).
    pub fn is_dotted(&self) -> bool {
        self.names.iter().any(|n| n.chars().count() > 1)
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        let sep = if self.is_dotted() { "." } else { "" };
        w.iter().map(|&l| self.name(l)).collect::<Vec<_>>().join(sep)
    }

    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "ε" {
            return Ok(Word::empty());
        }
        let lookup = |tok: &str| self.letter(tok).ok_or_else(|| Error::UnknownLetter(tok.to_string()));
        let letters = if self.is_dotted() || s.contains('.') {
            s.split('.').map(lookup).collect::<Result<Vec<_>>>()?
        } else {
            s.chars().map(|c| lookup(c.encode_utf8(&mut [0; 4]))).collect::<Result<Vec<_>>>()?
        };
        Ok(Word(letters))
    }

    /// Every word of length `n`, in lexicographic order.
    pub fn all_words(&self, n: usize) -> Vec<Word> {
        let k = self.len();
        let mut out = vec![Word::empty()];
        for _ in 0..n {
            let mut next = Vec::with_capacity(out.len() * k);
            for w in &out {
                for l in self.letters() {
                    let mut v = w.0.clone();
                    v.push(l);
                    next.push(Word(v));
                }
            }
            out = next;
        }
        out
    }
}

/// Finite word over some alphabet.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_indices(ix: &[u8]) -> Self {
        Word(ix.iter().map(|&i| Letter(i)).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Letter> {
        self.0
    }

    pub fn concat(&self, other: &[Letter]) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn repeat(&self, n: usize) -> Word {
        Word(self.0.repeat(n))
    }
}

impl Deref for Word {
    type Target = [Letter];
    fn deref(&self) -> &[Letter] {
        &self.0
    }
}

impl AsRef<[Letter]> for Word {
    fn as_ref(&self) -> &[Letter] {
        &self.0
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl From<&[Letter]> for Word {
    fn from(v: &[Letter]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    /// Debug-ish rendering by letter index; use [`Alphabet::format_word`] for names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{}", l.0)?;
        }
        Ok(())
    }
}

/// `u` equals the last `|u|` letters of `v`.
pub fn is_suffix(u: &[Letter], v: &[Letter]) -> bool {
    v.ends_with(u)
}

/// No word of the set is a strict suffix of another. Duplicates collapse.
pub fn is_suffix_code<W: AsRef<[Letter]>>(words: &[W]) -> Result<bool> {
    if words.iter().any(|w| w.as_ref().is_empty()) {
        return Err(Error::EmptyWord);
    }
    for (i, u) in words.iter().enumerate() {
        for (j, v) in words.iter().enumerate() {
            let (u, v) = (u.as_ref(), v.as_ref());
            if i != j && u.len() < v.len() && is_suffix(u, v) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Least `p >= 1` with `u[i] == u[i + p]` wherever both are defined.
pub fn smallest_period(u: &[Letter]) -> Result<usize> {
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    // KMP failure function: period = |u| - longest proper border.
    let n = u.len();
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && u[i] != u[k] {
            k = fail[k - 1];
        }
        if u[i] == u[k] {
            k += 1;
        }
        fail[i] = k;
    }
    Ok(n - fail[n - 1])
}

/// No proper nonempty border: `A^l w` and `w A^l` are disjoint for `l in [1, |w|)`.
pub fn is_nonoverlapping(w: &[Letter]) -> Result<bool> {
    Ok(smallest_period(w)? == w.len())
}

/// Starting positions of (possibly overlapping) occurrences of `pat` in `text`.
pub fn occurrences(pat: &[Letter], text: &[Letter]) -> Vec<usize> {
    if pat.is_empty() || pat.len() > text.len() {
        return Vec::new();
    }
    text.windows(pat.len())
        .enumerate()
        .filter(|(_, w)| *w == pat)
        .map(|(i, _)| i)
        .collect()
}

/// Longest common prefix of a nonempty family of words.
pub fn common_prefix<W: AsRef<[Letter]>>(words: &[W]) -> Vec<Letter> {
    let Some(first) = words.first() else { return Vec::new() };
    let mut len = first.as_ref().len();
    for w in &words[1..] {
        len = first.as_ref()[..len]
            .iter()
            .zip(w.as_ref())
            .take_while(|(a, b)| a == b)
            .count();
    }
    first.as_ref()[..len].to_vec()
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn word(max: usize) -> impl Strategy<Value = Vec<Letter>> {
        proptest::collection::vec((0u8..3).prop_map(Letter), 0..max)
    }

    proptest! {
        #[test]
        fn suffix_transitive(u in word(4), v in word(4), w in word(6)) {
            let v2: Vec<Letter> = v.iter().chain(&u).copied().collect();
            let w2: Vec<Letter> = w.iter().chain(&v2).copied().collect();
            prop_assert!(is_suffix(&u, &v2) && is_suffix(&v2, &w2) && is_suffix(&u, &w2));
        }

        #[test]
        fn suffix_code_matches_pairwise(ws in proptest::collection::vec(
            proptest::collection::vec((0u8..2).prop_map(Letter), 1..5), 1..10)) {
            let mut brute = true;
            for u in &ws {
                for v in &ws {
                    if u.len() < v.len() && v[v.len() - u.len()..] == u[..] {
                        brute = false;
                    }
                }
            }
            prop_assert_eq!(is_suffix_code(&ws).unwrap(), brute);
        }
    }
}
