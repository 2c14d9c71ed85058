//! Recognition for Tree Adjoining Grammars whose wrapping adjunction is
//! restricted to one node per spine, in `O(n^5)` time.
//!
//! The pipeline is [`grammar::parse_grammar`] → [`grammar::normalize`] →
//! [`transform::build_transformed_grammar`] → [`recognizer::recognize`].
//! [`oracle`] holds two independent reference implementations used to check
//! it, and [`bench`] measures how its work grows with input length.

pub mod bench;
pub mod cli;
pub mod compare;
pub mod fixtures;
pub mod grammar;
pub mod oracle;
pub mod recognizer;
pub mod transform;
