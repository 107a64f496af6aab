//! Benchmark fixtures shared by the criterion targets.

use expanse_core::{corpus, DirectiveSequence};

/// Constant directive sequences used across benchmarks.
pub fn fixtures() -> Vec<(&'static str, DirectiveSequence)> {
    vec![
        ("fibonacci", DirectiveSequence::constant(corpus::fibonacci()).expect("endomorphism")),
        ("thue_morse", DirectiveSequence::constant(corpus::thue_morse()).expect("endomorphism")),
        ("toeplitz3", DirectiveSequence::constant(corpus::toeplitz(3)).expect("endomorphism")),
        ("abc_bbc_aba", DirectiveSequence::constant(corpus::abc_bbc_aba()).expect("endomorphism")),
    ]
}
