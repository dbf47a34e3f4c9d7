//! A deterministic trading-card engine for trig-function cards.
//!
//! Cards are monomials `sin^a(x)·cos^b(x)` that players combine by
//! multiplication or division: both inputs are burned and one new card is
//! minted, its rarity drawn from a probability table. Cards come from
//! randomized packs bought with currency or with XP earned in a trivia game,
//! and trade on an escrowed marketplace.
//!
//! All state lives in an event-sourced [`ledger`]: every change is a logged
//! [`ledger::TransactionEvent`], and replaying the log over the genesis state
//! reproduces the live state down to its [`ledger::snapshot_hash`].
//!
//! | module | what it holds |
//! |---|---|
//! | [`card`] | trig monomials, combine algebra, card codes and names |
//! | [`rarity`] | SplitMix64 streams, rarity tables, pack rolls |
//! | [`ledger`] | accounts, tokens, the event log, replay, hashing |
//! | [`contracts`] | combine/pack/upgrade rules, the marketplace, params upgrades |
//! | [`trivia`] | question bank, question selection, grading |
//! | [`engine`] | request handling for the single writer |
//! | [`store`] | the on-disk state directory |
//! | [`api`] | the HTTP/JSON service |
//! | [`cli`] | the `nftrig` command line |
//!
//! See the crate's `examples/` directory for one runnable program per
//! capability.

pub mod api;
pub mod card;
pub mod cli;
pub mod config;
pub mod contracts;
pub mod engine;
pub mod error;
pub mod ledger;
pub mod rarity;
pub mod store;
pub mod trivia;

pub use card::{CombineOp, Rarity, TrigFunction, Variant};
pub use config::EngineConfig;
pub use contracts::ParamsVersion;
pub use engine::{Engine, EngineError, Receipt, TxRequest};
pub use error::TxError;
pub use ledger::{AccountId, Genesis, LedgerState, TokenId, TransactionEvent, Tx};
