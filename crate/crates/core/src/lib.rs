pub mod adversary;
pub mod ballot;
pub mod base_set;
pub mod cli;
pub mod error;
pub mod identity;
pub mod membership;
pub mod partition;
pub mod scheme;
pub mod transcript;
pub mod unanimity;
pub mod vote_hash;
