//! Preperiodic directive sequences `τ_0, τ_1, …` with `τ_t : A_{t+1} → A_t^+`.
//!
//! A sequence is described by a finite transient followed by a cycle that
//! repeats forever. Level `t` is `transient[t]` for `t < T` and
//! `cycle[(t - T) % C]` afterwards.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::substitution::Substitution;
use crate::words::Alphabet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectiveSequence {
    transient: Vec<Substitution>,
    cycle: Vec<Substitution>,
}

/// `τ_{[from, to)} = τ_from ∘ … ∘ τ_{to-1}`, a map `A_to → A_from^*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposedBlock {
    pub t_from: usize,
    pub t_to: usize,
    pub substitution: Substitution,
}

/// An expanding regrouping of a sequence together with the original level
/// at which each regrouped level starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Telescoping {
    pub sequence: DirectiveSequence,
    transient_starts: Vec<usize>,
    cycle_base: usize,
    cycle_span: usize,
    cycle_offsets: Vec<usize>,
}

impl Telescoping {
    /// Original level `t_i` where regrouped level `i` begins (`t_0 = 0`).
    pub fn original_level(&self, i: usize) -> usize {
        let tt = self.transient_starts.len();
        if i < tt {
            return self.transient_starts[i];
        }
        let j = i - tt;
        let c = self.cycle_offsets.len();
        self.cycle_base + (j / c) * self.cycle_span + self.cycle_offsets[j % c]
    }
}

impl DirectiveSequence {
    /// Builds a sequence, re-indexing alphabets so that adjacent levels share
    /// one letter order. Fails when adjacent alphabets do not carry the same letters.
    pub fn new(transient: Vec<Substitution>, cycle: Vec<Substitution>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::NotComposable("empty cycle".into()));
        }
        let mut transient = transient;
        let mut cycle = cycle;
        let c = cycle.len();
        // Canonical A_T is the domain of the cycle's last level.
        let a_t = cycle[c - 1].domain().clone();
        for i in (0..c).rev() {
            // codomain(cycle[i]) must carry the letters of domain(cycle[i-1]), or A_T for i = 0
            let target = if i == 0 { a_t.clone() } else { cycle[i - 1].domain().clone() };
            if !cycle[i].codomain().same_letters(&target) {
                return Err(Error::NotComposable(format!(
                    "cycle level {i}: codomain {:?} vs {:?}",
                    cycle[i].codomain().names(),
                    target.names()
                )));
            }
            cycle[i] = cycle[i].with_codomain(&target)?;
        }
        if let Some(last) = transient.last_mut() {
            *last = last.with_domain(&a_t).map_err(|_| {
                Error::NotComposable(format!("transient end {:?} vs cycle {:?}", last.domain().names(), a_t.names()))
            })?;
        }
        for i in (1..transient.len()).rev() {
            let target = transient[i - 1].domain().clone();
            if !transient[i].codomain().same_letters(&target) {
                return Err(Error::NotComposable(format!(
                    "transient level {i}: codomain {:?} vs {:?}",
                    transient[i].codomain().names(),
                    target.names()
                )));
            }
            transient[i] = transient[i].with_codomain(&target)?;
        }
        Ok(DirectiveSequence { transient, cycle })
    }

    /// The constant sequence `τ, τ, τ, …`.
    pub fn constant(tau: Substitution) -> Result<Self> {
        Self::new(Vec::new(), vec![tau])
    }

    pub fn transient(&self) -> &[Substitution] {
        &self.transient
    }

    pub fn cycle(&self) -> &[Substitution] {
        &self.cycle
    }

    /// Number of levels in the finite description (transient plus one cycle).
    pub fn description_len(&self) -> usize {
        self.transient.len() + self.cycle.len()
    }

    pub fn level(&self, t: usize) -> &Substitution {
        let tt = self.transient.len();
        if t < tt {
            &self.transient[t]
        } else {
            &self.cycle[(t - tt) % self.cycle.len()]
        }
    }

    /// `A_t`, the codomain of `τ_t`.
    pub fn alphabet(&self, t: usize) -> &Alphabet {
        self.level(t).codomain()
    }

    /// The tail `σ^t τ = (τ_s)_{s ≥ t}`.
    pub fn shifted(&self, t: usize) -> DirectiveSequence {
        let tt = self.transient.len();
        if t <= tt {
            return DirectiveSequence { transient: self.transient[t..].to_vec(), cycle: self.cycle.clone() };
        }
        let r = (t - tt) % self.cycle.len();
        let mut cycle = self.cycle[r..].to_vec();
        cycle.extend_from_slice(&self.cycle[..r]);
        DirectiveSequence { transient: Vec::new(), cycle }
    }

    pub fn block(&self, t_from: usize, t_to: usize) -> Result<ComposedBlock> {
        if t_from > t_to {
            return Err(Error::OutOfRange(format!("block [{t_from}, {t_to})")));
        }
        let mut acc = Substitution::identity(self.alphabet(t_from));
        for t in t_from..t_to {
            acc = acc.compose(self.level(t))?;
        }
        Ok(ComposedBlock { t_from, t_to, substitution: acc })
    }

    /// Image lengths `|τ_{[from, to)}(a)|` for `a ∈ A_to`, saturating.
    pub fn block_lengths(&self, t_from: usize, t_to: usize) -> Vec<u128> {
        let mut lens: Vec<u128> = vec![1; self.alphabet(t_from).len()];
        for t in t_from..t_to {
            let tau = self.level(t);
            lens = tau
                .images()
                .iter()
                .map(|w| w.iter().fold(0u128, |s, l| s.saturating_add(lens[l.index()])))
                .collect();
        }
        lens
    }

    /// `⟨τ_{[from, to)}⟩`.
    pub fn block_min_len(&self, t_from: usize, t_to: usize) -> u128 {
        self.block_lengths(t_from, t_to).into_iter().min().unwrap_or(0)
    }

    /// `‖τ_{[from, to)}‖`.
    pub fn block_max_len(&self, t_from: usize, t_to: usize) -> u128 {
        self.block_lengths(t_from, t_to).into_iter().max().unwrap_or(0)
    }

    /// Least alphabet size along the cycle, i.e. the liminf of `|A_t|`.
    pub fn rank(&self) -> usize {
        self.cycle.iter().map(|s| s.codomain().len()).min().expect("nonempty cycle")
    }

    pub fn levels(&self) -> impl Iterator<Item = (usize, &Substitution)> {
        self.transient.iter().chain(&self.cycle).enumerate()
    }

    pub fn is_non_erasing(&self) -> bool {
        self.levels().all(|(_, s)| s.is_non_erasing())
    }

    /// Every level of the description satisfies `pred`.
    pub fn all_levels(&self, pred: impl Fn(&Substitution) -> bool) -> bool {
        self.levels().all(|(_, s)| pred(s))
    }

    /// Cycle composition `π = τ_{[T, T+C)}`.
    pub fn cycle_map(&self) -> Substitution {
        let tt = self.transient.len();
        self.block(tt, tt + self.cycle.len()).expect("cycle composes").substitution
    }

    /// `⟨τ_{[0,t)}⟩ → ∞`.
    ///
    /// Decided on the cycle map `π`: letters whose `π`-image is a single
    /// letter form a functional digraph, and the sequence grows everywhere
    /// iff that digraph has no cycle.
    pub fn is_everywhere_growing(&self) -> bool {
        if !self.is_non_erasing() {
            return false;
        }
        let pi = self.cycle_map();
        let n = pi.domain().len();
        let next: Vec<Option<usize>> =
            pi.images().iter().map(|w| (w.len() == 1).then(|| w[0].index())).collect();
        // a letter stalls forever iff following `next` from it loops
        for start in 0..n {
            let mut cur = start;
            for _ in 0..=n {
                match next[cur] {
                    Some(nx) => cur = nx,
                    None => break,
                }
            }
            if next[cur].is_some() {
                return false;
            }
        }
        true
    }

    /// Least `k` with `⟨π^k⟩ ≥ 2`, if the sequence is everywhere-growing.
    fn cycle_power_to_expand(&self) -> Option<usize> {
        if !self.is_everywhere_growing() {
            return None;
        }
        let tt = self.transient.len();
        let c = self.cycle.len();
        (1..).find(|&k| self.block_min_len(tt, tt + k * c) >= 2)
    }

    /// Regroups levels into blocks that are each expanding (`⟨·⟩ ≥ 2`).
    pub fn telescope_expanding(&self) -> Result<Telescoping> {
        let k = self.cycle_power_to_expand().ok_or(Error::NotEverywhereGrowing)?;
        let tt = self.transient.len();
        let c = self.cycle.len();
        let cycle_expanding = self.cycle.iter().all(Substitution::is_expanding);
        let (cycle, cycle_span, cycle_offsets) = if cycle_expanding {
            (self.cycle.clone(), c, (0..c).collect::<Vec<_>>())
        } else {
            (vec![self.cycle_map_power(k)], k * c, vec![0])
        };
        // greedy grouping of the transient; a non-expanding remainder absorbs one cycle span
        let mut transient = Vec::new();
        let mut transient_starts = Vec::new();
        let mut start = 0;
        for end in 1..=tt {
            if self.block_min_len(start, end) >= 2 {
                transient.push(self.block(start, end)?.substitution);
                transient_starts.push(start);
                start = end;
            }
        }
        let mut cycle_base = tt;
        if start < tt {
            transient.push(self.block(start, tt + cycle_span)?.substitution);
            transient_starts.push(start);
            cycle_base = tt + cycle_span;
        }
        let sequence = DirectiveSequence::new(transient, cycle)?;
        Ok(Telescoping { sequence, transient_starts, cycle_base, cycle_span, cycle_offsets })
    }

    fn cycle_map_power(&self, k: usize) -> Substitution {
        let tt = self.transient.len();
        self.block(tt, tt + k * self.cycle.len()).expect("cycle composes").substitution
    }

    /// For every `t` some later `t'` has every letter of `A_t` inside every
    /// image `τ_{[t,t')}(a)`.
    ///
    /// On cycle phases, positivity of the boolean incidence product is checked
    /// up to `|A|²` cycle periods; positivity, once reached, persists.
    pub fn is_weakly_primitive(&self) -> bool {
        let tt = self.transient.len();
        let c = self.cycle.len();
        let n = self.cycle.iter().map(|s| s.codomain().len()).max().unwrap_or(1);
        let periods = n * n + 1;
        for phase in 0..c {
            let t = tt + phase;
            let mut m = Incidence::identity(self.alphabet(t).len());
            let mut positive = false;
            for s in t..t + periods * c {
                m = m.mul(&Incidence::of(self.level(s)));
                if m.is_positive() {
                    positive = true;
                    break;
                }
            }
            if !positive {
                return false;
            }
        }
        // transient levels: every letter of A_t must occur in τ_{[t,T)}(A_T)
        (0..tt).all(|t| {
            let m = (t..tt).fold(Incidence::identity(self.alphabet(t).len()), |m, s| m.mul(&Incidence::of(self.level(s))));
            m.rows_nonzero()
        })
    }

    /// Parses `[transient]` / `[cycle]` sections of substitution blocks
    /// separated by `---` lines. Text without section headers is a cycle.
    pub fn parse(text: &str) -> Result<Self> {
        #[derive(PartialEq)]
        enum Section {
            None,
            Transient,
            Cycle,
        }
        let mut section = Section::None;
        let mut transient: Vec<String> = Vec::new();
        let mut cycle: Vec<String> = Vec::new();
        let mut current = String::new();
        let blocks_of = |s: &Section, cur: &mut String, tr: &mut Vec<String>, cy: &mut Vec<String>| {
            if cur.lines().any(|l| !l.split('#').next().unwrap_or("").trim().is_empty()) {
                match s {
                    Section::Transient => tr.push(std::mem::take(cur)),
                    _ => cy.push(std::mem::take(cur)),
                }
            }
            cur.clear();
        };
        for line in text.lines() {
            let trimmed = line.trim();
            match trimmed {
                "[transient]" | "[cycle]" => {
                    blocks_of(&section, &mut current, &mut transient, &mut cycle);
                    section = if trimmed == "[transient]" { Section::Transient } else { Section::Cycle };
                }
                "---" => blocks_of(&section, &mut current, &mut transient, &mut cycle),
                _ => {
                    current.push_str(line);
                    current.push('\n');
                }
            }
        }
        blocks_of(&section, &mut current, &mut transient, &mut cycle);
        let parse_all = |v: &[String]| v.iter().map(|b| Substitution::parse(b)).collect::<Result<Vec<_>>>();
        let mut transient = parse_all(&transient)?;
        let mut cycle = parse_all(&cycle)?;
        if cycle.is_empty() {
            return Err(Error::Parse { line: 0, msg: "no cycle substitution".into() });
        }
        // inferred codomains only list the letters used; widen them to the adjacent domain
        let c = cycle.len();
        let a_t = cycle[c - 1].domain().clone();
        for i in 0..c {
            let target = if i == 0 { a_t.clone() } else { cycle[i - 1].domain().clone() };
            cycle[i] = widen(&cycle[i], &target)?;
        }
        for i in 1..transient.len() {
            let target = transient[i - 1].domain().clone();
            transient[i] = widen(&transient[i], &target)?;
        }
        DirectiveSequence::new(transient, cycle)
    }
}

fn widen(s: &Substitution, target: &Alphabet) -> Result<Substitution> {
    if s.codomain().same_letters(target) {
        return Ok(s.clone());
    }
    s.with_codomain(target).map_err(|e| Error::NotComposable(e.to_string()))
}

impl fmt::Display for DirectiveSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let section = |f: &mut fmt::Formatter<'_>, name: &str, subs: &[Substitution]| -> fmt::Result {
            writeln!(f, "[{name}]")?;
            for (i, s) in subs.iter().enumerate() {
                if i > 0 {
                    writeln!(f, "---")?;
                }
                write!(f, "{s}")?;
            }
            Ok(())
        };
        if !self.transient.is_empty() {
            section(f, "transient", &self.transient)?;
        }
        section(f, "cycle", &self.cycle)
    }
}

/// Boolean incidence matrix: `m[b][a]` iff letter `b` occurs in `τ(a)`.
#[derive(Debug, Clone)]
struct Incidence {
    rows: usize,
    cols: usize,
    m: Vec<bool>,
}

impl Incidence {
    fn identity(n: usize) -> Self {
        let mut m = vec![false; n * n];
        for i in 0..n {
            m[i * n + i] = true;
        }
        Incidence { rows: n, cols: n, m }
    }

    fn of(s: &Substitution) -> Self {
        let rows = s.codomain().len();
        let cols = s.domain().len();
        let mut m = vec![false; rows * cols];
        for (a, img) in s.images().iter().enumerate() {
            for b in img.iter() {
                m[b.index() * cols + a] = true;
            }
        }
        Incidence { rows, cols, m }
    }

    fn mul(&self, other: &Incidence) -> Incidence {
        debug_assert_eq!(self.cols, other.rows);
        let mut m = vec![false; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.m[i * self.cols + k] {
                    for j in 0..other.cols {
                        if other.m[k * other.cols + j] {
                            m[i * other.cols + j] = true;
                        }
                    }
                }
            }
        }
        Incidence { rows: self.rows, cols: other.cols, m }
    }

    fn is_positive(&self) -> bool {
        self.m.iter().all(|&b| b)
    }

    fn rows_nonzero(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).any(|j| self.m[i * self.cols + j]))
    }
}
