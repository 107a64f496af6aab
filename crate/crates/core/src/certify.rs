//! Expansiveness certificates for S-adic limit sets.
//!
//! `certify` checks the premises of each rule, tightest bound first, and
//! returns the first rule whose premises all hold. Premises established only
//! by a finite probe are reported as caveats.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::directive::DirectiveSequence;
use crate::error::{Error, Result};
use crate::language::{asymptotic_periodic_witness, complexity, LimitSet, DEFAULT_LANGUAGE_BUDGET};
use crate::parsing::{least_unrefuted_radius, probe_quasi_recognizability, radius_compose};
use crate::predecessors::rkrad_bounds;
use crate::substitution::Substitution;
use crate::words;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Positively `n`-expansive.
    Bound(u128),
    /// Positively `n`-expansive for some finite `n`, without an explicit value.
    FinitelyExpansive,
    /// Not positively `n`-expansive for any `n`.
    Negative,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    RankOne,
    RightMarked,
    ReturnWords,
    Toeplitz,
    ArnouxRauzy,
    RightRecoverable,
    SuffixCode,
    RankRadius,
    PreperiodicAperiodic,
    AsymptoticPeriodic,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::RankOne => "rank-one",
            Rule::RightMarked => "right-marked",
            Rule::ReturnWords => "return-words",
            Rule::Toeplitz => "toeplitz",
            Rule::ArnouxRauzy => "arnoux-rauzy",
            Rule::RightRecoverable => "right-recoverable",
            Rule::SuffixCode => "suffix-code",
            Rule::RankRadius => "rank-radius",
            Rule::PreperiodicAperiodic => "preperiodic-aperiodic",
            Rule::AsymptoticPeriodic => "asymptotic-periodic",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Decided exactly.
    Holds,
    /// No counterexample within the probe window.
    Probed,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Premise {
    pub name: String,
    pub outcome: Outcome,
    pub evidence: String,
    /// Used by the emitted rule.
    pub cited: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    pub rule: Option<Rule>,
    pub rank: usize,
    pub premises: Vec<Premise>,
    /// Cited premises that only hold by probe.
    pub caveats: Vec<String>,
    /// Some right-infinite word has at least this many predecessors.
    pub lower_bound: Option<u128>,
    pub weakly_primitive: bool,
}

impl Certificate {
    pub fn bound(&self) -> Option<u128> {
        match self.verdict {
            Verdict::Bound(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_conclusive(&self) -> bool {
        self.caveats.is_empty()
    }

    pub fn premise(&self, name: &str) -> Option<&Premise> {
        self.premises.iter().find(|p| p.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let verdict = match self.verdict {
            Verdict::Bound(n) => format!("positively {n}-expansive"),
            Verdict::FinitelyExpansive => "finitely positively expansive".into(),
            Verdict::Negative => "not finitely positively expansive".into(),
            Verdict::Inconclusive => "inconclusive".into(),
        };
        s += &format!("verdict: {verdict}\n");
        s += &format!("rule: {}\n", self.rule.map_or("none", Rule::id));
        s += &format!("rank: {}\n", self.rank);
        if let Some(n) = self.lower_bound {
            s += &format!("lower bound: {n} predecessors (not positively {}-expansive)\n", n - 1);
        }
        s += &format!("weakly primitive: {}\n", self.weakly_primitive);
        s += "premises:\n";
        for p in &self.premises {
            let mark = if p.cited { "*" } else { " " };
            let outcome = match p.outcome {
                Outcome::Holds => "holds",
                Outcome::Probed => "probed",
                Outcome::Fails => "fails",
            };
            s += &format!(" {mark} {:<30} {:<7} {}\n", p.name, outcome, p.evidence);
        }
        if !self.caveats.is_empty() {
            s += &format!("caveats: {}\n", self.caveats.join(", "));
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifyConfig {
    /// Longest limit-set word enumerated.
    pub budget: usize,
    /// Half-width `M` of recognizability probes.
    pub probe_window: usize,
    /// Longest run sought by the periodicity witness.
    pub m_max: usize,
    /// Largest radius tried by the radius probe.
    pub radius_max: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig { budget: DEFAULT_LANGUAGE_BUDGET, probe_window: 32, m_max: 16, radius_max: 3 }
    }
}

struct Ledger {
    premises: Vec<Premise>,
}

impl Ledger {
    fn record(&mut self, name: &str, outcome: Outcome, evidence: impl Into<String>) -> Outcome {
        self.premises.push(Premise { name: name.into(), outcome, evidence: evidence.into(), cited: false });
        outcome
    }

    fn check(&mut self, name: &str, holds: bool, evidence: impl Into<String>) -> bool {
        self.record(name, if holds { Outcome::Holds } else { Outcome::Fails }, evidence) == Outcome::Holds
    }

    fn finish(mut self, verdict: Verdict, rule: Option<Rule>, cited: &[&str], rank: usize, weakly_primitive: bool) -> Certificate {
        let mut caveats = Vec::new();
        for p in &mut self.premises {
            if cited.contains(&p.name.as_str()) {
                p.cited = true;
                if p.outcome == Outcome::Probed {
                    caveats.push(p.name.clone());
                }
            }
        }
        caveats.dedup();
        Certificate { verdict, rule, rank, premises: self.premises, caveats, lower_bound: None, weakly_primitive }
    }
}

fn held(o: Outcome) -> bool {
    o != Outcome::Fails
}

/// Every level is a return substitution with respect to some nonoverlapping word.
fn return_route(seq: &DirectiveSequence) -> (bool, String) {
    let mut words = Vec::new();
    for (t, s) in seq.levels() {
        match s.return_word() {
            Some(w) => words.push(format!("τ_{t}: {}", s.codomain().format_word(&w))),
            None => return (false, format!("τ_{t} is not a return substitution for a nonoverlapping word")),
        }
    }
    (true, words.join(", "))
}

/// Every level is Toeplitz with a nonoverlapping maximal common prefix `u`, `2|u| ≥ |τ|`.
fn toeplitz_route(seq: &DirectiveSequence) -> (bool, String) {
    for (t, s) in seq.levels() {
        if !s.is_toeplitz() {
            return (false, format!("τ_{t} is not Toeplitz"));
        }
        let u = s.maximal_common_prefix().expect("left-proper");
        if !words::is_nonoverlapping(&u).unwrap_or(false) {
            return (false, format!("τ_{t}: common prefix overlaps itself"));
        }
        if 2 * u.len() < s.min_len() {
            return (false, format!("τ_{t}: common prefix of length {} is shorter than half of {}", u.len(), s.min_len()));
        }
    }
    (true, "nonoverlapping common prefixes of at least half the image length".into())
}

/// No infinite chain `a_t` with `τ_t(a_{t+1}) = a_t^{|τ_t|}` along the cycle.
fn no_monochromatic_chain(seq: &DirectiveSequence) -> bool {
    let pi = seq.cycle_map();
    let next: Vec<Option<usize>> = pi
        .images()
        .iter()
        .map(|w| w.iter().all(|&l| l == w[0]).then(|| w[0].index()))
        .collect();
    let n = next.len();
    (0..n).all(|start| {
        let mut cur = start;
        for _ in 0..=n {
            match next[cur] {
                Some(nx) => cur = nx,
                None => return true,
            }
        }
        false
    })
}

/// `τ_{[t', t)}` is right-recoverable for arbitrarily large `t`, from every `t'`.
///
/// Checked on the blocks from each description level up to the next
/// minimal-rank cycle phase, and on the cycle block from that phase; longer
/// blocks are compositions of these, and compositions of right-recoverable
/// maps are right-recoverable.
fn recoverable_chain(seq: &DirectiveSequence) -> Result<(bool, String)> {
    let tt = seq.transient().len();
    let c = seq.cycle().len();
    let rk = seq.rank();
    let phase = (0..c).find(|&p| seq.alphabet(tt + p).len() == rk).expect("rank is attained");
    let anchor = tt + phase;
    let next_anchor = |t: usize| if t < anchor { anchor } else { anchor + ((t - anchor) / c + 1) * c };
    let period = seq.block(anchor, anchor + c)?.substitution;
    if !period.is_right_recoverable() {
        return Ok((false, format!("cycle block from level {anchor} is not right-recoverable")));
    }
    for t in 0..seq.description_len() {
        let to = next_anchor(t);
        if !seq.block(t, to)?.substitution.is_right_recoverable() {
            return Ok((false, format!("τ_[{t},{to}) is not right-recoverable")));
        }
    }
    Ok((true, format!("blocks ending at cycle phase {phase} are right-recoverable")))
}

pub fn certify(seq: &DirectiveSequence, config: &CertifyConfig) -> Result<Certificate> {
    let mut ledger = Ledger { premises: Vec::new() };
    let rk = seq.rank();
    let primitive = seq.is_weakly_primitive();
    let inconclusive = |l: Ledger| l.finish(Verdict::Inconclusive, None, &[], rk, primitive);

    if !ledger.check("non-erasing", seq.is_non_erasing(), "every image is nonempty") {
        return Ok(inconclusive(ledger));
    }
    if rk == 1 {
        ledger.check("rank one", true, "some cycle level has a one-letter alphabet; the limit set is one periodic orbit");
        return Ok(ledger.finish(Verdict::Bound(1), Some(Rule::RankOne), &["rank one"], rk, primitive));
    }
    if !ledger.check("everywhere-growing", seq.is_everywhere_growing(), "no stalling cycle of the cycle map") {
        return Ok(inconclusive(ledger));
    }

    // negative screen
    let witness = asymptotic_periodic_witness(seq, config.m_max, config.budget)?;
    let witness_text = witness
        .as_ref()
        .map_or(format!("none up to m = {}", config.m_max), |w| w.describe(seq.alphabet(0)));
    let aperiodic_evidence = witness.is_none();

    let (returns, return_text) = return_route(seq);
    let (toeplitz, toeplitz_text) = toeplitz_route(seq);
    let returns = ledger.check("return substitutions", returns, return_text);
    let toeplitz = ledger.check("toeplitz prefix", toeplitz, toeplitz_text);
    let mono_free = no_monochromatic_chain(seq);
    let toeplitz_aperiodic = toeplitz && ledger.check("no monochromatic chain", mono_free, "cycle map has no chain of constant images");

    let recognizability = if returns || (toeplitz && toeplitz_aperiodic) {
        let route = if returns { "return substitutions" } else { "toeplitz prefix" };
        ledger.record("quasi-recognizability", Outcome::Holds, format!("by the {route} criterion"))
    } else {
        let mut outcome = Outcome::Probed;
        let mut evidence = Vec::new();
        for (t, tau) in seq.levels() {
            let over = LimitSet::new(seq.shifted(t), config.budget);
            let m = config.probe_window.max(tau.max_len());
            let report = probe_quasi_recognizability(tau, m, &over)?;
            if report.refuted() {
                outcome = Outcome::Fails;
                let cx = report.counterexample.as_ref().expect("refuted");
                evidence.push(format!(
                    "τ_{t} refuted at M = {m}: {} has two parses",
                    tau.codomain().format_word(&cx.windows[0].word)
                ));
                break;
            }
            evidence.push(format!("τ_{t}: {} windows at M = {m}", report.windows_checked));
        }
        ledger.record("quasi-recognizability", outcome, evidence.join("; "))
    };

    ledger.record(
        "asymptotically periodic point",
        if witness.is_some() { Outcome::Probed } else { Outcome::Fails },
        witness_text,
    );
    if witness.is_some() {
        return Ok(ledger.finish(
            Verdict::Negative,
            Some(Rule::AsymptoticPeriodic),
            &["asymptotically periodic point"],
            rk,
            primitive,
        ));
    }
    if !held(recognizability) {
        return Ok(inconclusive(ledger));
    }

    // rank bounds
    let bound = rk as u128;
    let marked = ledger.check("right-marked", seq.all_levels(Substitution::is_right_marked), "last letters of images are distinct");
    if marked {
        let mut cert = ledger.finish(
            Verdict::Bound(bound),
            Some(Rule::RightMarked),
            &["everywhere-growing", "quasi-recognizability", "right-marked"],
            rk,
            primitive,
        );
        cert.lower_bound = Some(bound);
        return Ok(cert);
    }
    if returns {
        return Ok(ledger.finish(
            Verdict::Bound(bound),
            Some(Rule::ReturnWords),
            &["everywhere-growing", "return substitutions", "quasi-recognizability"],
            rk,
            primitive,
        ));
    }
    if toeplitz && toeplitz_aperiodic {
        return Ok(ledger.finish(
            Verdict::Bound(bound),
            Some(Rule::Toeplitz),
            &["toeplitz prefix", "no monochromatic chain", "quasi-recognizability"],
            rk,
            primitive,
        ));
    }
    let tel = seq.telescope_expanding()?.sequence;
    let (chain, chain_text) = recoverable_chain(&tel)?;
    let tel_rank = tel.rank();
    if ledger.check("right-recoverable blocks", chain, chain_text) {
        return Ok(ledger.finish(
            Verdict::Bound(tel_rank as u128),
            Some(Rule::RightRecoverable),
            &["everywhere-growing", "quasi-recognizability", "right-recoverable blocks"],
            tel_rank,
            primitive,
        ));
    }

    // squared rank
    let suffix = seq.all_levels(|s| words::is_suffix_code(s.images()).unwrap_or(false));
    if ledger.check("suffix-code images", suffix, "no image is a proper suffix of another") {
        return Ok(ledger.finish(
            Verdict::Bound(bound * bound),
            Some(Rule::SuffixCode),
            &["everywhere-growing", "quasi-recognizability", "suffix-code images"],
            rk,
            primitive,
        ));
    }

    // common radius from per-level radii
    let injective = tel.all_levels(Substitution::is_injective);
    ledger.check("injective levels", injective, "telescoped levels are injective");
    let mut radii = Vec::new();
    for (t, tau) in tel.levels() {
        let over = LimitSet::new(tel.shifted(t), config.budget);
        match least_unrefuted_radius(tau, config.radius_max, config.probe_window, &over)? {
            Some(r) => radii.push(r as u64),
            None => break,
        }
    }
    let found = radii.len() == tel.description_len();
    let radius_text = if found {
        format!("per-level radii {radii:?} at M = {}", config.probe_window)
    } else {
        format!("no radius <= {} survives at M = {}", config.radius_max, config.probe_window)
    };
    ledger.record("right radius", if found { Outcome::Probed } else { Outcome::Fails }, radius_text);
    if found && injective {
        let common = common_radius(&tel, &radii);
        let (summed, simple) = rkrad_bounds(tel_rank, common as usize, 0, 1);
        let uniform = tel.all_levels(Substitution::is_uniform);
        let n = if common <= 1 || uniform { simple } else { summed };
        ledger.record("common radius", Outcome::Probed, format!("R = {common} for every τ_[0,t)"));
        return Ok(ledger.finish(
            Verdict::Bound(n),
            Some(Rule::RankRadius),
            &["everywhere-growing", "injective levels", "right radius", "common radius"],
            tel_rank,
            primitive,
        ));
    }

    // preperiodic catch-all
    let r = 2 * config.m_max + 1;
    let p = complexity(seq, r, config.budget)?;
    let strict = p.iter().enumerate().all(|(i, &c)| c > i + 1);
    let aperiodic = aperiodic_evidence && strict;
    ledger.record(
        "aperiodic",
        if aperiodic { Outcome::Probed } else { Outcome::Fails },
        format!("p(r) > r for r <= {r}, no periodicity witness"),
    );
    if aperiodic {
        return Ok(ledger.finish(
            Verdict::FinitelyExpansive,
            Some(Rule::PreperiodicAperiodic),
            &["everywhere-growing", "aperiodic"],
            rk,
            primitive,
        ));
    }
    Ok(inconclusive(ledger))
}

/// Largest radius along `τ_{[0,t)}`, composing per-level radii until the
/// running radius repeats at the same cycle phase.
fn common_radius(seq: &DirectiveSequence, radii: &[u64]) -> u64 {
    let tt = seq.transient().len();
    let c = seq.cycle().len();
    let radius_at = |i: usize| if i < tt { radii[i] } else { radii[tt + (i - tt) % c] };
    let mut r = radius_at(0);
    let mut best = r;
    let mut seen = std::collections::HashSet::new();
    let mut t = 1;
    loop {
        if t >= tt && !seen.insert(((t - tt) % c, r)) {
            return best;
        }
        r = radius_compose(r, seq.level(t).min_len() as u64, radius_at(t));
        best = best.max(r);
        t += 1;
    }
}

/// Certificate for the Arnoux-Rauzy sequence with generator indices `transient`, then `cycle` forever.
pub fn certify_arnoux_rauzy(rk: usize, transient: &[usize], cycle: &[usize]) -> Result<Certificate> {
    if rk < 2 {
        return Err(Error::OutOfRange(format!("rank {rk} < 2")));
    }
    if let Some(&i) = transient.iter().chain(cycle).find(|&&i| i >= rk) {
        return Err(Error::OutOfRange(format!("index {i} not below {rk}")));
    }
    if cycle.is_empty() {
        return Err(Error::NotComposable("empty cycle".into()));
    }
    let mut distinct = cycle.to_vec();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::NotEverywhereGrowing);
    }
    let seq = crate::corpus::arnoux_rauzy(rk, transient, cycle);
    let mut ledger = Ledger { premises: Vec::new() };
    ledger.check("everywhere-growing", true, format!("cycle uses {} distinct generators", distinct.len()));
    let letters: Vec<String> = distinct.iter().map(|i| format!("a{i}")).collect();
    ledger.check("return substitutions", true, format!("with respect to the letters {}", letters.join(", ")));
    ledger.check("quasi-recognizability", true, "by the return substitutions criterion");
    ledger.check("right-marked", true, "a_j -> a_i a_j and a_i -> a_i end in distinct letters");
    let primitive = seq.is_weakly_primitive();
    let mut cert = ledger.finish(
        Verdict::Bound(rk as u128),
        Some(Rule::ArnouxRauzy),
        &["everywhere-growing", "return substitutions", "quasi-recognizability", "right-marked"],
        rk,
        primitive,
    );
    cert.lower_bound = Some(rk as u128);
    Ok(cert)
}
