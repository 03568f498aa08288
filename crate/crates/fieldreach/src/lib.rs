//! Field-sensitive reachability and cyclicity analysis.
pub mod compare;
pub mod domain;
pub mod formula;
pub mod lang;
pub mod oracle;
pub mod query;
pub mod report;
pub mod semantics;
pub mod sharing;
