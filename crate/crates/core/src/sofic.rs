//! Sofic shifts given by labeled graphs, and shifts of finite type.
//!
//! The survivor set of a right-infinite word `z` is the set of vertices from
//! which `z` can be read. The predecessor set of `z` is the set of labels of
//! left-infinite paths ending in its survivor set, so the survivor family
//! bounds the number of distinct predecessor sets.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::LanguageSource;
use crate::words::{Alphabet, Letter, Word};

/// Default cap for path counts in degree profiles.
pub const DEFAULT_COUNT_CAP: u64 = 1_000_000;

/// Cap on explored automaton states.
const STATE_CAP: usize = 1 << 20;

/// Fixed-width vertex set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexSet(Vec<u64>);

impl VertexSet {
    fn empty(n: usize) -> Self {
        VertexSet(vec![0; n.div_ceil(64).max(1)])
    }

    fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }

    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.0.len() * 64).filter(move |&v| self.contains(v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoficPresentation {
    alphabet: Alphabet,
    vertices: Vec<String>,
    edges: Vec<(usize, Letter, usize)>,
    /// Vertices removed because they cannot lie on a bi-infinite path.
    trimmed: Vec<String>,
}

impl SoficPresentation {
    /// Builds and trims a presentation. Vertex order is order of first appearance.
    pub fn new(alphabet: Alphabet, edges: &[(String, Letter, String)]) -> Result<Self> {
        let mut vertices: Vec<String> = Vec::new();
        let index = |name: &str, vs: &mut Vec<String>| -> usize {
            match vs.iter().position(|v| v == name) {
                Some(i) => i,
                None => {
                    vs.push(name.to_string());
                    vs.len() - 1
                }
            }
        };
        let mut raw = Vec::new();
        for (s, a, d) in edges {
            if !alphabet.contains(*a) {
                return Err(Error::UnknownLetter(format!("#{}", a.0)));
            }
            let si = index(s, &mut vertices);
            let di = index(d, &mut vertices);
            raw.push((si, *a, di));
        }
        raw.sort();
        raw.dedup();
        Ok(Self::trim(alphabet, vertices, raw))
    }

    /// `(source, label, target)` triples; the alphabet is the labels in order of first appearance.
    pub fn from_edges(edges: &[(&str, &str, &str)]) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        for (_, l, _) in edges {
            if !labels.iter().any(|x| x == l) {
                labels.push(l.to_string());
            }
        }
        let alphabet = Alphabet::new(labels)?;
        let typed: Vec<(String, Letter, String)> = edges
            .iter()
            .map(|(s, l, d)| (s.to_string(), alphabet.letter(l).expect("collected"), d.to_string()))
            .collect();
        Self::new(alphabet, &typed)
    }

    /// One edge `<src> <label> <dst>` per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut triples: Vec<(String, String, String)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse { line: i + 1, msg: "expected `<src> <label> <dst>`".into() });
            }
            triples.push((parts[0].into(), parts[1].into(), parts[2].into()));
        }
        if triples.is_empty() {
            return Err(Error::Parse { line: 0, msg: "no edges".into() });
        }
        let refs: Vec<(&str, &str, &str)> = triples.iter().map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str())).collect();
        Self::from_edges(&refs)
    }

    fn trim(alphabet: Alphabet, vertices: Vec<String>, edges: Vec<(usize, Letter, usize)>) -> Self {
        let n = vertices.len();
        let mut alive = vec![true; n];
        loop {
            let mut has_in = vec![false; n];
            let mut has_out = vec![false; n];
            for &(s, _, d) in &edges {
                if alive[s] && alive[d] {
                    has_out[s] = true;
                    has_in[d] = true;
                }
            }
            let mut changed = false;
            for v in 0..n {
                if alive[v] && !(has_in[v] && has_out[v]) {
                    alive[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let mut renumber = vec![usize::MAX; n];
        let mut kept = Vec::new();
        let mut trimmed = Vec::new();
        for (v, name) in vertices.into_iter().enumerate() {
            if alive[v] {
                renumber[v] = kept.len();
                kept.push(name);
            } else {
                trimmed.push(name);
            }
        }
        let edges = edges
            .into_iter()
            .filter(|&(s, _, d)| alive[s] && alive[d])
            .map(|(s, a, d)| (renumber[s], a, renumber[d]))
            .collect();
        SoficPresentation { alphabet, vertices: kept, edges, trimmed }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, Letter, usize)] {
        &self.edges
    }

    pub fn trimmed(&self) -> &[String] {
        &self.trimmed
    }

    /// The presented shift has no points.
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn n(&self) -> usize {
        self.vertices.len()
    }

    /// `{q : q →a q' for some q' ∈ S}`.
    pub fn back(&self, s: &VertexSet, a: Letter) -> VertexSet {
        let mut out = VertexSet::empty(self.n());
        for &(src, l, dst) in &self.edges {
            if l == a && s.contains(dst) {
                out.insert(src);
            }
        }
        out
    }

    /// `{q' : q →a q' for some q ∈ S}`.
    pub fn forward(&self, s: &VertexSet, a: Letter) -> VertexSet {
        let mut out = VertexSet::empty(self.n());
        for &(src, l, dst) in &self.edges {
            if l == a && s.contains(src) {
                out.insert(dst);
            }
        }
        out
    }

    pub fn format_set(&self, s: &VertexSet) -> String {
        let names: Vec<&str> = s.iter().map(|v| self.vertices[v].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Family of survivor sets `S(z)` over right-infinite words `z`.
    ///
    /// Runs over relation states `R(w) = {(q, q') : q →w q'}` with domain
    /// `S(w)`. Along an infinite word the domains decrease and settle; a set
    /// `D` is realized iff some reachable relation with domain `D` reaches a
    /// cycle of relations that all have domain `D`.
    pub fn predecessor_set_family(&self) -> Result<SurvivorFamily> {
        let n = self.n();
        if n == 0 {
            return Ok(SurvivorFamily { members: Vec::new(), transitions: Vec::new() });
        }
        type Rel = Vec<VertexSet>; // row q: targets reachable from q
        let dom = |r: &Rel| -> VertexSet {
            let mut d = VertexSet::empty(n);
            for (q, row) in r.iter().enumerate() {
                if !row.is_empty() {
                    d.insert(q);
                }
            }
            d
        };
        let step = |r: &Rel, a: Letter| -> Rel { r.iter().map(|row| self.forward(row, a)).collect() };
        let identity: Rel = (0..n)
            .map(|q| {
                let mut s = VertexSet::empty(n);
                s.insert(q);
                s
            })
            .collect();
        let mut ids: HashMap<Rel, usize> = HashMap::new();
        let mut states: Vec<Rel> = Vec::new();
        let mut succ: Vec<Vec<usize>> = Vec::new();
        ids.insert(identity.clone(), 0);
        states.push(identity);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let mut out = Vec::new();
            for a in self.alphabet.letters() {
                let next = step(&states[i], a);
                if dom(&next).is_empty() {
                    continue;
                }
                let j = match ids.get(&next) {
                    Some(&j) => j,
                    None => {
                        if states.len() >= STATE_CAP {
                            return Err(Error::Budget { what: "relation states", needed: states.len() + 1, cap: STATE_CAP });
                        }
                        let j = states.len();
                        ids.insert(next.clone(), j);
                        states.push(next);
                        queue.push_back(j);
                        j
                    }
                };
                out.push(j);
            }
            succ.push(out);
        }
        let doms: Vec<VertexSet> = states.iter().map(dom).collect();
        // states lying on a cycle inside their own domain class, then everything reaching them there
        let m = states.len();
        let mut good = vec![false; m];
        let classes: BTreeSet<&VertexSet> = doms.iter().collect();
        for d in classes {
            let members: Vec<usize> = (0..m).filter(|&i| &doms[i] == d).collect();
            let inside: HashSet<usize> = members.iter().copied().collect();
            // iteratively drop members without a successor inside the class
            let mut alive: HashSet<usize> = inside.clone();
            loop {
                let before = alive.len();
                let keep: Vec<usize> = alive.iter().copied().filter(|&i| succ[i].iter().any(|j| alive.contains(j))).collect();
                alive = keep.into_iter().collect();
                if alive.len() == before {
                    break;
                }
            }
            for i in alive {
                good[i] = true;
            }
        }
        let members: BTreeSet<VertexSet> = (0..m).filter(|&i| good[i]).map(|i| doms[i].clone()).collect();
        let members: Vec<VertexSet> = members.into_iter().collect();
        let transitions = members
            .iter()
            .enumerate()
            .flat_map(|(i, s)| {
                self.alphabet.letters().map(move |a| (i, a, s.clone()))
            })
            .map(|(i, a, s)| {
                let b = self.back(&s, a);
                let j = members.iter().position(|x| *x == b);
                (i, a, j)
            })
            .collect();
        Ok(SurvivorFamily { members, transitions })
    }

    /// Number of distinct predecessor sets among the survivor family.
    ///
    /// Two survivor sets give the same predecessor set iff the same finite
    /// words label paths ending in them; that is decided on pairs of backward
    /// subset states.
    pub fn predecessor_classes(&self, family: &SurvivorFamily) -> usize {
        let k = family.members.len();
        let mut class_reps: Vec<usize> = Vec::new();
        for i in 0..k {
            if !class_reps.iter().any(|&j| self.same_predecessors(&family.members[i], &family.members[j])) {
                class_reps.push(i);
            }
        }
        class_reps.len()
    }

    fn same_predecessors(&self, s: &VertexSet, t: &VertexSet) -> bool {
        let mut seen: HashSet<(VertexSet, VertexSet)> = HashSet::new();
        let mut queue = VecDeque::from([(s.clone(), t.clone())]);
        while let Some((x, y)) = queue.pop_front() {
            if x.is_empty() != y.is_empty() {
                return false;
            }
            if x.is_empty() || !seen.insert((x.clone(), y.clone())) {
                continue;
            }
            for a in self.alphabet.letters() {
                queue.push_back((self.back(&x, a), self.back(&y, a)));
            }
        }
        true
    }

    /// Count of distinct labels of length-`ℓ` paths ending in `s`, for `ℓ = 1..=ell_max`.
    pub fn ending_label_counts(&self, s: &VertexSet, ell_max: usize, cap: u64) -> Vec<Count> {
        let mut layer: BTreeMap<VertexSet, u64> = BTreeMap::from([(s.clone(), 1)]);
        let mut out = Vec::with_capacity(ell_max);
        let mut capped = false;
        for _ in 0..ell_max {
            let mut next: BTreeMap<VertexSet, u64> = BTreeMap::new();
            for (x, c) in &layer {
                for a in self.alphabet.letters() {
                    let b = self.back(x, a);
                    if !b.is_empty() {
                        let e = next.entry(b).or_default();
                        *e = e.saturating_add(*c).min(cap);
                    }
                }
            }
            let total: u64 = next.values().fold(0u64, |acc, &c| acc.saturating_add(c));
            if total >= cap {
                capped = true;
            }
            out.push(Count { value: total.min(cap), capped });
            layer = next;
        }
        out
    }

    /// Maximal predecessor count by `ℓ`, over the survivor family.
    pub fn sofic_degree_profile(&self, ell_max: usize, cap: u64) -> Result<SoficProfile> {
        let family = self.predecessor_set_family()?;
        let mut maxima = vec![Count { value: 0, capped: false }; ell_max];
        for s in &family.members {
            for (i, c) in self.ending_label_counts(s, ell_max, cap).into_iter().enumerate() {
                if (c.value, c.capped) > (maxima[i].value, maxima[i].capped) {
                    maxima[i] = c;
                }
            }
        }
        Ok(SoficProfile { maxima, finite: self.is_finite_shift() })
    }

    /// Forward subset automaton from the full vertex set, trimmed to states on bi-infinite paths.
    fn deterministic_core(&self) -> (Vec<VertexSet>, Vec<Vec<usize>>) {
        let n = self.n();
        let start = VertexSet::full(n);
        let mut ids: HashMap<VertexSet, usize> = HashMap::from([(start.clone(), 0)]);
        let mut states = vec![start];
        let mut succ: Vec<Vec<usize>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut out = Vec::new();
            for a in self.alphabet.letters() {
                let f = self.forward(&states[i], a);
                if f.is_empty() {
                    continue;
                }
                let j = *ids.entry(f.clone()).or_insert_with(|| {
                    states.push(f);
                    states.len() - 1
                });
                out.push(j);
            }
            succ.push(out);
            i += 1;
        }
        let m = states.len();
        let mut alive = vec![true; m];
        loop {
            let mut has_in = vec![false; m];
            for (s, outs) in succ.iter().enumerate() {
                if alive[s] {
                    for &d in outs {
                        if alive[d] {
                            has_in[d] = true;
                        }
                    }
                }
            }
            let mut changed = false;
            for s in 0..m {
                let has_out = succ[s].iter().any(|&d| alive[d]);
                if alive[s] && !(has_in[s] && has_out) {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let succ = succ.into_iter().enumerate().map(|(s, outs)| if alive[s] { outs.into_iter().filter(|&d| alive[d]).collect() } else { Vec::new() }).collect::<Vec<_>>();
        let kept: Vec<VertexSet> = states.into_iter().enumerate().filter(|&(s, _)| alive[s]).map(|(_, v)| v).collect();
        let live_succ: Vec<Vec<usize>> = succ.into_iter().enumerate().filter(|&(s, _)| alive[s]).map(|(_, v)| v).collect();
        (kept, live_succ)
    }

    /// The trimmed right-resolving presentation is a disjoint union of cycles.
    pub fn is_finite_shift(&self) -> bool {
        let (_, succ) = self.deterministic_core();
        succ.iter().all(|outs| outs.len() == 1)
    }

    /// `p(r)` for `r = 1..=r_max`, counted on the forward subset automaton.
    pub fn complexity(&self, r_max: usize) -> Vec<u64> {
        let mut layer: BTreeMap<VertexSet, u64> = BTreeMap::new();
        if self.n() > 0 {
            layer.insert(VertexSet::full(self.n()), 1);
        }
        let mut out = Vec::with_capacity(r_max);
        for _ in 0..r_max {
            let mut next: BTreeMap<VertexSet, u64> = BTreeMap::new();
            for (x, c) in &layer {
                for a in self.alphabet.letters() {
                    let f = self.forward(x, a);
                    if !f.is_empty() {
                        let e = next.entry(f).or_default();
                        *e = e.saturating_add(*c);
                    }
                }
            }
            out.push(next.values().fold(0u64, |a, &c| a.saturating_add(c)));
            layer = next;
        }
        out
    }
}

/// Shift of finite type avoiding `forbidden`, on the de Bruijn graph of
/// `(L−1)`-words where `L` is the longest forbidden length.
pub fn sft_from_forbidden(alphabet: &Alphabet, forbidden: &[Word]) -> Result<SoficPresentation> {
    if alphabet.is_empty() {
        return Err(Error::EmptyAlphabet);
    }
    if forbidden.iter().any(|w| w.is_empty()) {
        return Err(Error::EmptyWord);
    }
    let memory = forbidden.iter().map(|w| w.len()).max().unwrap_or(1).saturating_sub(1);
    let count = (alphabet.len() as f64).powi(memory as i32 + 1);
    if count > STATE_CAP as f64 {
        return Err(Error::Budget { what: "de Bruijn edges", needed: count as usize, cap: STATE_CAP });
    }
    let clean = |w: &[Letter]| !forbidden.iter().any(|f| w.windows(f.len()).any(|x| x == &f[..]));
    let name = |w: &[Letter]| if w.is_empty() { "ε".to_string() } else { alphabet.format_word(w) };
    let mut edges = Vec::new();
    for u in alphabet.all_words(memory) {
        if !clean(&u) {
            continue;
        }
        for a in alphabet.letters() {
            let ua = u.concat(&[a]);
            if clean(&ua) {
                edges.push((name(&u), a, name(&ua[1..])));
            }
        }
    }
    SoficPresentation::new(alphabet.clone(), &edges)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivorFamily {
    pub members: Vec<VertexSet>,
    /// `(member, letter, member index of back(S, a))`; `None` when the set is empty.
    pub transitions: Vec<(usize, Letter, Option<usize>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Count {
    pub value: u64,
    /// The true count is at least `value`.
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SoficProfile {
    pub maxima: Vec<Count>,
    pub finite: bool,
}

impl SoficProfile {
    pub fn strictly_growing(&self) -> bool {
        self.maxima.windows(2).all(|p| p[1].capped || p[1].value > p[0].value)
    }
}

impl LanguageSource for SoficPresentation {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn words(&self, r: usize) -> Result<Vec<Word>> {
        let mut out: Vec<Word> = Vec::new();
        if self.n() == 0 {
            return Ok(out);
        }
        let mut stack: Vec<(Vec<Letter>, VertexSet)> = vec![(Vec::new(), VertexSet::full(self.n()))];
        while let Some((w, s)) = stack.pop() {
            if w.len() == r {
                if out.len() >= STATE_CAP {
                    return Err(Error::Budget { what: "sofic words", needed: out.len() + 1, cap: STATE_CAP });
                }
                out.push(Word(w));
                continue;
            }
            for a in self.alphabet.letters() {
                let f = self.forward(&s, a);
                if !f.is_empty() {
                    let mut v = w.clone();
                    v.push(a);
                    stack.push((v, f));
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn describe(&self) -> String {
        format!("sofic shift on {} vertices", self.n())
    }
}

impl fmt::Display for SoficPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &(s, a, d) in &self.edges {
            writeln!(f, "{} {} {}", self.vertices[s], self.alphabet.name(a), self.vertices[d])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn cycle3() -> SoficPresentation {
        SoficPresentation::from_edges(&[("p", "a", "q"), ("q", "b", "r"), ("r", "c", "p")]).unwrap()
    }

    fn full2() -> SoficPresentation {
        SoficPresentation::from_edges(&[("v", "0", "v"), ("v", "1", "v")]).unwrap()
    }

    #[test]
    fn forbidden_words() {
        let bin = Alphabet::from_chars("01").unwrap();
        let gm = sft_from_forbidden(&bin, &[bin.parse_word("11").unwrap()]).unwrap();
        assert_eq!(gm.vertices().len(), 2);
        let full = sft_from_forbidden(&bin, &[]).unwrap();
        assert_eq!((full.vertices().len(), full.edges().len()), (1, 2));
        let none = sft_from_forbidden(&bin, &[bin.parse_word("0").unwrap(), bin.parse_word("1").unwrap()]).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn trimming() {
        let p = SoficPresentation::from_edges(&[("a", "0", "a"), ("a", "1", "b"), ("c", "0", "a")]).unwrap();
        assert_eq!(p.vertices(), ["a"]);
        assert_eq!(p.trimmed(), ["b", "c"]);
    }

    #[test]
    fn families() {
        assert_eq!(corpus::golden_mean().predecessor_set_family().unwrap().members.len(), 2);
        assert_eq!(full2().predecessor_set_family().unwrap().members.len(), 1);
        let even = corpus::even_shift();
        let fam = even.predecessor_set_family().unwrap();
        assert_eq!(fam.members.len(), 3);
        assert_eq!(even.predecessor_classes(&fam), 3);
        assert_eq!(cycle3().predecessor_set_family().unwrap().members.len(), 3);
    }

    #[test]
    fn family_closure() {
        for (_, p) in corpus::presentations() {
            let fam = p.predecessor_set_family().unwrap();
            for (i, s) in fam.members.iter().enumerate() {
                for a in p.alphabet().letters() {
                    let b = p.back(s, a);
                    assert!(b.is_empty() || fam.members.contains(&b), "member {i}");
                }
            }
        }
    }

    #[test]
    fn finiteness() {
        assert!(!corpus::golden_mean().is_finite_shift());
        assert!(cycle3().is_finite_shift());
        assert!(!full2().is_finite_shift());
        assert!(!corpus::even_shift().is_finite_shift());
        assert_eq!(cycle3().complexity(6), vec![3; 6]);
    }

    #[test]
    fn profiles() {
        let gm = corpus::golden_mean().sofic_degree_profile(10, DEFAULT_COUNT_CAP).unwrap();
        assert!(gm.strictly_growing());
        assert!(!gm.finite);
        let c3 = cycle3().sofic_degree_profile(10, DEFAULT_COUNT_CAP).unwrap();
        assert!(c3.maxima.iter().all(|c| c.value == 1));
        assert!(corpus::even_shift().sofic_degree_profile(10, DEFAULT_COUNT_CAP).unwrap().strictly_growing());
    }

    #[test]
    fn words_match_complexity() {
        for (_, p) in corpus::presentations() {
            let c = p.complexity(8);
            for r in 1..=8 {
                assert_eq!(p.words(r).unwrap().len() as u64, c[r - 1]);
            }
        }
    }

    #[test]
    fn parse_format() {
        let p = SoficPresentation::parse("# even shift\nA 0 B\nB 0 A\nA 1 A\n").unwrap();
        assert_eq!(p, corpus::even_shift());
        assert_eq!(SoficPresentation::parse(&p.to_string()).unwrap(), p);
        assert!(matches!(SoficPresentation::parse("A 0\n"), Err(Error::Parse { line: 1, .. })));
    }
}
