//! Positive expansiveness of S-adic limit sets and sofic shifts.
//!
//! Words and substitutions, preperiodic directive sequences, finite
//! languages, desubstitution schemes, predecessor counts, sofic
//! presentations, and a certificate engine that combines them.

pub mod certify;
pub mod corpus;
pub mod directive;
pub mod error;
pub mod language;
pub mod parsing;
pub mod predecessors;
pub mod sofic;
pub mod substitution;
pub mod words;

pub use certify::{certify, certify_arnoux_rauzy, Certificate, CertifyConfig, Outcome, Premise, Rule, Verdict};
pub use directive::{ComposedBlock, DirectiveSequence, Telescoping};
pub use error::{Error, Result};
pub use language::{language, LanguageSource, LanguageTable, LimitSet};
pub use parsing::{DesubstitutionScheme, RadiusReport, Window};
pub use predecessors::{degree_profile, predecessor_table, DegreeProfile, PredecessorTable};
pub use sofic::{sft_from_forbidden, SoficPresentation, SurvivorFamily};
pub use substitution::Substitution;
pub use words::{Alphabet, Letter, Word};
