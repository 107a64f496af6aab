//! `expanse`: batch reports on substitution, S-adic and sofic shifts.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use expanse_core::language::{complexity, entropy_estimate, LimitSet};
use expanse_core::parsing::{
    enumerate_standard_schemes, format_scheme, least_unrefuted_radius, probe_quasi_recognizability,
    radius_series_bound,
};
use expanse_core::predecessors::{degree_profile, lower_bound_witness};
use expanse_core::sofic::DEFAULT_COUNT_CAP;
use expanse_core::words::is_suffix_code;
use expanse_core::{
    certify, corpus, predecessor_table, CertifyConfig, DirectiveSequence, LanguageSource, SoficPresentation,
    Substitution, Verdict,
};

use report::{AnalysisConfig, Format, Report};

#[derive(Parser)]
#[command(name = "expanse", version, about = "Positive expansiveness of substitutive and sofic shifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Longest word enumerated from a limit set.
    #[arg(long, global = true, default_value_t = 64, value_parser = positive)]
    budget_lang: usize,
    /// Half-width M of recognizability probes.
    #[arg(long, global = true, default_value_t = 32, value_parser = positive)]
    probe_window: usize,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct Source {
    /// A `.sub` directive sequence or a `.graph` presentation.
    #[arg(long)]
    input: Option<PathBuf>,
    /// A built-in example by name (see `expanse examples`).
    #[arg(long)]
    example: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Substitution predicates level by level.
    Props {
        #[command(flatten)]
        source: Source,
    },
    /// Complexity and entropy estimate.
    Lang {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 16, value_parser = positive)]
        length: usize,
        /// Also list the words of the largest length.
        #[arg(long)]
        words: bool,
    },
    /// Recognizability and radius probes.
    Parse {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 3)]
        radius_max: usize,
        /// Enumerate standard schemes of this centred word under the first level.
        #[arg(long)]
        word: Option<String>,
    },
    /// Predecessor counts.
    Pred {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 4, value_parser = positive)]
        ell: usize,
        #[arg(long, default_value_t = 16, value_parser = positive)]
        right: usize,
        /// Report maxima for every ℓ up to `--ell` instead of the full table.
        #[arg(long)]
        profile: bool,
    },
    /// Certificate for a directive sequence.
    Certify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 16, value_parser = positive)]
        m_max: usize,
        #[arg(long, default_value_t = 3)]
        radius_max: usize,
    },
    /// Survivor family, finiteness and degree profile of a presentation.
    Sofic {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 10, value_parser = positive)]
        profile: usize,
        #[arg(long, default_value_t = DEFAULT_COUNT_CAP, value_parser = clap::value_parser!(u64).range(1..))]
        cap: u64,
    },
    /// List the built-in corpus, or write it as files.
    Examples {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

enum Input {
    Sequence(DirectiveSequence),
    Graph(SoficPresentation),
}

fn load(source: &Source) -> Result<(String, Input)> {
    if let Some(name) = &source.example {
        if let Some((_, s)) = corpus::sequences().into_iter().find(|(n, _)| n == name) {
            return Ok((name.clone(), Input::Sequence(s)));
        }
        if let Some((_, p)) = corpus::presentations().into_iter().find(|(n, _)| n == name) {
            return Ok((name.clone(), Input::Graph(p)));
        }
        bail!("no built-in example named `{name}`");
    }
    let path = source.input.as_ref().expect("clap enforces one source");
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let label = path.display().to_string();
    let input = if path.extension().is_some_and(|e| e == "graph") {
        Input::Graph(SoficPresentation::parse(&text).with_context(|| format!("parsing {label}"))?)
    } else {
        Input::Sequence(DirectiveSequence::parse(&text).with_context(|| format!("parsing {label}"))?)
    };
    Ok((label, input))
}

fn sequence(input: Input, what: &str) -> Result<DirectiveSequence> {
    match input {
        Input::Sequence(s) => Ok(s),
        Input::Graph(_) => bail!("`{what}` needs a directive sequence, not a graph"),
    }
}

fn level_name(seq: &DirectiveSequence, t: usize) -> String {
    let tt = seq.transient().len();
    if t < tt {
        format!("transient[{t}]")
    } else {
        format!("cycle[{}]", t - tt)
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn props(cli: &Cli, source: &Source) -> Result<Report> {
    let (label, input) = load(source)?;
    let seq = sequence(input, "props")?;
    let mut rep = Report::new(AnalysisConfig::new("props", &label, cli));
    let mut levels = Vec::new();
    rep.csv_header(&[
        "level", "non_erasing", "injective", "uniform", "expanding", "left_proper", "right_marked",
        "right_recoverability", "toeplitz", "suffix_code", "return_word",
    ]);
    for t in 0..seq.description_len() {
        let tau = seq.level(t);
        let name = level_name(&seq, t);
        let suffix_code = is_suffix_code(tau.images()).unwrap_or(false);
        let recoverability = tau.max_right_recoverability();
        let return_word = tau.return_word().map(|w| tau.codomain().format_word(&w));
        rep.line(format!("{name}:"));
        for line in tau.to_string().lines() {
            rep.line(format!("  {line}"));
        }
        let flags = [
            ("non-erasing", tau.is_non_erasing()),
            ("injective", tau.is_injective()),
            ("uniform", tau.is_uniform()),
            ("expanding", tau.is_expanding()),
            ("left-proper", tau.is_left_proper()),
            ("right-marked", tau.is_right_marked()),
            ("toeplitz", tau.is_toeplitz()),
            ("suffix code", suffix_code),
        ];
        for (k, v) in flags {
            rep.line(format!("  {k:<20} {}", yes(v)));
        }
        rep.line(format!("  {:<20} {}", "right-recoverable", recoverability.map_or("no".into(), |q| format!("q = {q}"))));
        rep.line(format!("  {:<20} {}", "return word", return_word.as_deref().unwrap_or("none")));
        rep.csv_row([
            name.clone(),
            tau.is_non_erasing().to_string(),
            tau.is_injective().to_string(),
            tau.is_uniform().to_string(),
            tau.is_expanding().to_string(),
            tau.is_left_proper().to_string(),
            tau.is_right_marked().to_string(),
            recoverability.map_or(String::new(), |q| q.to_string()),
            tau.is_toeplitz().to_string(),
            suffix_code.to_string(),
            return_word.clone().unwrap_or_default(),
        ]);
        levels.push(json!({
            "level": name,
            "rules": tau.rules(),
            "non_erasing": tau.is_non_erasing(),
            "injective": tau.is_injective(),
            "uniform": tau.is_uniform(),
            "expanding": tau.is_expanding(),
            "left_proper": tau.is_left_proper(),
            "right_marked": tau.is_right_marked(),
            "right_recoverability": recoverability,
            "toeplitz": tau.is_toeplitz(),
            "suffix_code": suffix_code,
            "return_word": return_word,
        }));
    }
    rep.line(format!("rank: {}", seq.rank()));
    rep.line(format!("everywhere-growing: {}", yes(seq.is_everywhere_growing())));
    rep.line(format!("weakly primitive: {}", yes(seq.is_weakly_primitive())));
    rep.set("levels", levels);
    rep.set("rank", seq.rank());
    rep.set("everywhere_growing", seq.is_everywhere_growing());
    rep.set("weakly_primitive", seq.is_weakly_primitive());
    Ok(rep)
}

fn lang(cli: &Cli, source: &Source, length: usize, list: bool) -> Result<Report> {
    let (label, input) = load(source)?;
    let mut config = AnalysisConfig::new("lang", &label, cli);
    config.length = Some(length);
    let mut rep = Report::new(config);
    let (p, words, alphabet) = match input {
        Input::Sequence(seq) => {
            let p = complexity(&seq, length, cli.budget_lang)?;
            let src = LimitSet::new(seq, cli.budget_lang);
            let words = if list { src.words(length)? } else { Vec::new() };
            (p, words, src.alphabet().clone())
        }
        Input::Graph(g) => {
            let p = g.complexity(length).into_iter().map(|c| c as usize).collect();
            let words = if list { g.words(length)? } else { Vec::new() };
            (p, words, g.alphabet().clone())
        }
    };
    let e = entropy_estimate(&p);
    rep.csv_header(&["r", "complexity"]);
    rep.line("r complexity");
    for (i, c) in p.iter().enumerate() {
        rep.line(format!("{} {c}", i + 1));
        rep.csv_row([(i + 1).to_string(), c.to_string()]);
    }
    rep.line(format!("entropy: naive {:.6}, fitted {:.6}", e.naive, e.slope));
    let words: Vec<String> = words.iter().map(|w| alphabet.format_word(w)).collect();
    if list {
        rep.line(format!("words of length {length}:"));
        for w in &words {
            rep.line(format!("  {w}"));
        }
        rep.set("words", &words);
    }
    rep.set("complexity", &p);
    rep.set("entropy", json!({ "naive": e.naive, "fitted": e.slope }));
    Ok(rep)
}

fn parse(cli: &Cli, source: &Source, radius_max: usize, word: Option<&str>) -> Result<Report> {
    let (label, input) = load(source)?;
    let seq = sequence(input, "parse")?;
    let mut config = AnalysisConfig::new("parse", &label, cli);
    config.radius_max = Some(radius_max);
    let mut rep = Report::new(config);
    let m = cli.probe_window;
    rep.csv_header(&["level", "quasi_recognizability", "windows", "right_radius"]);
    let mut levels = Vec::new();
    let mut radii = Vec::new();
    for t in 0..seq.description_len() {
        let tau = seq.level(t);
        let name = level_name(&seq, t);
        let over = LimitSet::new(seq.shifted(t), cli.budget_lang);
        let qr = probe_quasi_recognizability(tau, m, &over)?;
        let radius = least_unrefuted_radius(tau, radius_max, m, &over)?;
        radii.push(radius.map(|r| r as u64));
        let qr_text = if qr.refuted() { "refuted" } else { "no counterexample" };
        rep.line(format!(
            "{name}: quasi-recognizability at M = {m}: {qr_text} ({} windows); right radius: {}",
            qr.windows_checked,
            radius.map_or(format!("none up to {radius_max}"), |r| r.to_string())
        ));
        let counterexample = qr.counterexample.as_ref().map(|c| {
            let cod = tau.codomain();
            json!({
                "windows": c.windows.iter().map(|w| json!({ "word": cod.format_word(&w.word), "origin": w.origin })).collect::<Vec<_>>(),
                "schemes": c.schemes.iter().map(|s| format_scheme(s, tau.domain())).collect::<Vec<_>>(),
            })
        });
        if let Some(c) = &qr.counterexample {
            for s in &c.schemes {
                rep.line(format!("  {}", format_scheme(s, tau.domain())));
            }
        }
        rep.csv_row([name.clone(), qr_text.to_string(), qr.windows_checked.to_string(), radius.map_or(String::new(), |r| r.to_string())]);
        levels.push(json!({
            "level": name,
            "quasi_recognizability": { "refuted": qr.refuted(), "windows": qr.windows_checked, "counterexample": counterexample },
            "right_radius": radius,
        }));
    }
    rep.set("levels", levels);
    if let Some(radii) = radii.into_iter().collect::<Option<Vec<u64>>>() {
        let t_max = 4 * seq.description_len().max(4);
        match radius_series_bound(&seq, &radii, t_max) {
            Ok(b) => {
                rep.line(format!(
                    "radius series: sweep {} certified {} (t <= {t_max})",
                    b.sweep.map_or("none".into(), |x| x.to_string()),
                    b.certified.map_or("none".into(), |x| x.to_string())
                ));
                rep.set("series", json!({ "sweep": b.sweep, "certified": b.certified, "t_max": b.t_max }));
            }
            Err(e) if e.is_budget() => return Err(e.into()),
            Err(e) => rep.line(format!("radius series: {e}")),
        }
    }
    if let Some(word) = word {
        let tau = seq.level(0);
        let w = tau.codomain().parse_word(word)?;
        let win = expanse_core::Window::centred(w);
        let schemes = enumerate_standard_schemes(tau, &win)?;
        rep.line(format!("standard schemes of {word} (origin {}):", win.origin));
        let list: Vec<String> = schemes.iter().map(|s| format_scheme(s, tau.domain())).collect();
        for s in &list {
            rep.line(format!("  {s}"));
        }
        rep.set("schemes", json!({ "word": word, "origin": win.origin, "standard": list }));
    }
    Ok(rep)
}

fn pred(cli: &Cli, source: &Source, ell: usize, right: usize, profile: bool) -> Result<Report> {
    let (label, input) = load(source)?;
    let mut config = AnalysisConfig::new("pred", &label, cli);
    config.ell = Some(ell);
    config.right = Some(right);
    let mut rep = Report::new(config);
    let src: Box<dyn LanguageSource> = match input {
        Input::Sequence(seq) => Box::new(LimitSet::new(seq, cli.budget_lang)),
        Input::Graph(g) => Box::new(g),
    };
    let alphabet = src.alphabet().clone();
    if profile {
        let p = degree_profile(src.as_ref(), ell, right)?;
        rep.csv_header(&["ell", "max"]);
        rep.line(format!("R_w = {right}"));
        for (i, m) in p.maxima.iter().enumerate() {
            rep.line(format!("ell {:>3}: {m}", i + 1));
            rep.csv_row([(i + 1).to_string(), m.to_string()]);
        }
        rep.line(format!("max {}; constant over the second half: {}", p.max(), yes(p.bounded)));
        rep.set("maxima", &p.maxima);
        rep.set("max", p.max());
        rep.set("bounded", p.bounded);
        return Ok(rep);
    }
    let table = predecessor_table(src.as_ref(), ell, right)?;
    let witness = lower_bound_witness(src.as_ref(), ell, right)?;
    rep.csv_header(&["right_word", "count"]);
    let mut counts = Vec::new();
    for (w, c) in &table.counts {
        let w = alphabet.format_word(w);
        rep.csv_row([w.clone(), c.to_string()]);
        counts.push(json!({ "right_word": w, "count": c }));
    }
    let argmax = alphabet.format_word(&table.argmax);
    let wword = alphabet.format_word(&witness.right_word);
    rep.line(format!("ell = {ell}, R_w = {right}: {} right words, max count {} at {argmax}", table.counts.len(), table.max));
    rep.line(format!(
        "at R_w = {}: max {} at {wword}, persistent: {}",
        2 * right,
        witness.count,
        yes(witness.persistent)
    ));
    rep.set("max", table.max);
    rep.set("argmax", argmax);
    rep.set("witness", json!({ "right_len": 2 * right, "right_word": wword, "count": witness.count, "persistent": witness.persistent }));
    rep.set("counts", counts);
    Ok(rep)
}

fn certify_cmd(cli: &Cli, source: &Source, m_max: usize, radius_max: usize) -> Result<Report> {
    let (label, input) = load(source)?;
    let seq = sequence(input, "certify")?;
    let mut config = AnalysisConfig::new("certify", &label, cli);
    config.m_max = Some(m_max);
    config.radius_max = Some(radius_max);
    let mut rep = Report::new(config);
    let cert = certify(&seq, &CertifyConfig { budget: cli.budget_lang, probe_window: cli.probe_window, m_max, radius_max })?;
    for line in cert.to_text().lines() {
        rep.line(line);
    }
    rep.csv_header(&["premise", "outcome", "cited", "evidence"]);
    for p in &cert.premises {
        let outcome = serde_json::to_value(p.outcome)?.as_str().unwrap_or_default().to_string();
        rep.csv_row([p.name.clone(), outcome, p.cited.to_string(), p.evidence.clone()]);
    }
    rep.set("bound", match cert.verdict {
        Verdict::Bound(n) => json!(n),
        _ => json!(null),
    });
    rep.set("rule", cert.rule.map(|r| r.id()));
    rep.set("certificate", serde_json::to_value(&cert)?);
    Ok(rep)
}

fn sofic(cli: &Cli, source: &Source, ell_max: usize, cap: u64) -> Result<Report> {
    let (label, input) = load(source)?;
    let g = match input {
        Input::Graph(g) => g,
        Input::Sequence(_) => bail!("`sofic` needs a graph presentation"),
    };
    let mut config = AnalysisConfig::new("sofic", &label, cli);
    config.profile = Some(ell_max);
    config.cap = Some(cap);
    let mut rep = Report::new(config);
    let family = g.predecessor_set_family()?;
    let classes = g.predecessor_classes(&family);
    let profile = g.sofic_degree_profile(ell_max, cap)?;
    let members: Vec<String> = family.members.iter().map(|s| g.format_set(s)).collect();
    rep.line(format!("vertices: {}", g.vertices().join(" ")));
    if !g.trimmed().is_empty() {
        rep.line(format!("trimmed: {}", g.trimmed().join(" ")));
    }
    rep.line(format!("survivor family ({}): {}", members.len(), members.join(" ")));
    rep.line(format!("predecessor classes: {classes}"));
    rep.line(format!("finite: {}", profile.finite));
    rep.csv_header(&["ell", "max", "capped"]);
    for (i, c) in profile.maxima.iter().enumerate() {
        let shown = if c.capped { format!(">= {}", c.value) } else { c.value.to_string() };
        rep.line(format!("ell {:>3}: {shown}", i + 1));
        rep.csv_row([(i + 1).to_string(), c.value.to_string(), c.capped.to_string()]);
    }
    rep.set("vertices", g.vertices());
    rep.set("trimmed", g.trimmed());
    rep.set("survivor_family", &members);
    rep.set("predecessor_classes", classes);
    rep.set("finite", profile.finite);
    rep.set("strictly_growing", profile.strictly_growing());
    rep.set("profile", &profile.maxima);
    Ok(rep)
}

fn examples(cli: &Cli, out: Option<&Path>) -> Result<Report> {
    let mut config = AnalysisConfig::new("examples", "", cli);
    config.out = out.map(|p| p.display().to_string());
    let mut rep = Report::new(config);
    let mut files: Vec<(String, String)> = corpus::sequences().into_iter().map(|(n, s)| (format!("{n}.sub"), s.to_string())).collect();
    for (n, tau) in corpus::substitutions() {
        if n.starts_with("ar") {
            files.push((format!("{n}.sub"), single(&tau)));
        }
    }
    files.extend(corpus::presentations().into_iter().map(|(n, p)| (format!("{n}.graph"), p.to_string())));
    files.sort();
    if let Some(dir) = out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (name, text) in &files {
            let path = dir.join(name);
            fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    rep.csv_header(&["file"]);
    for (name, _) in &files {
        rep.line(name.clone());
        rep.csv_row([name.clone()]);
    }
    rep.set("files", files.iter().map(|(n, _)| n).collect::<Vec<_>>());
    Ok(rep)
}

/// A lone substitution; non-endomorphisms only render as rules.
fn single(tau: &Substitution) -> String {
    match DirectiveSequence::constant(tau.clone()) {
        Ok(s) => s.to_string(),
        Err(_) => tau.to_string(),
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Ok(n) = std::env::var("EXPANSE_THREADS") {
        let n: usize = n.trim().parse().context("EXPANSE_THREADS must be a positive integer")?;
        if n == 0 {
            bail!("EXPANSE_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let rep = match &cli.command {
        Command::Props { source } => props(cli, source)?,
        Command::Lang { source, length, words } => lang(cli, source, *length, *words)?,
        Command::Parse { source, radius_max, word } => parse(cli, source, *radius_max, word.as_deref())?,
        Command::Pred { source, ell, right, profile } => pred(cli, source, *ell, *right, *profile)?,
        Command::Certify { source, m_max, radius_max } => certify_cmd(cli, source, *m_max, *radius_max)?,
        Command::Sofic { source, profile, cap } => sofic(cli, source, *profile, *cap)?,
        Command::Examples { out } => examples(cli, out.as_deref())?,
    };
    let text = rep.render(cli.format)?;
    match &cli.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// 3 for exhausted budgets, 2 for every other failure.
fn exit_code(err: &anyhow::Error) -> u8 {
    let budget = err.chain().any(|e| e.downcast_ref::<expanse_core::Error>().is_some_and(|e| e.is_budget()));
    if budget {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
