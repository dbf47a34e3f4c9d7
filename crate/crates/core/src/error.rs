use thiserror::Error;

use crate::card::CardError;
use crate::ledger::{AccountId, ListingId, TokenId};

/// Why a transaction was rejected. A rejected transaction is never appended
/// to the log and leaves the state untouched.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TxError {
    #[error("sequence gap: expected seq {expected}, got {got}")]
    SequenceGap { expected: u64, got: u64 },
    #[error("account id {0:?} is reserved")]
    ReservedAccount(AccountId),
    #[error("account {0} already exists")]
    AccountExists(AccountId),
    #[error("unknown account {0}")]
    UnknownAccount(AccountId),
    #[error("unknown token {0}")]
    UnknownToken(TokenId),
    #[error("{caller} does not own token {token}")]
    NotOwner { token: TokenId, caller: AccountId },
    #[error("token {0} is held in marketplace escrow")]
    TokenEscrowed(TokenId),
    #[error("cannot combine a token with itself")]
    SameToken,
    #[error("cannot transfer a token to its current owner")]
    SelfTransfer,
    #[error(transparent)]
    ExponentOutOfRange(CardError),
    #[error("insufficient funds: need {needed}, have {available}")]
    InsufficientFunds { needed: u64, available: u64 },
    #[error("insufficient xp: need {needed}, have {available}")]
    InsufficientXp { needed: u64, available: u64 },
    #[error("token {0} is already legendary")]
    AlreadyMaxRarity(TokenId),
    #[error("price must be at least 1")]
    InvalidPrice,
    #[error("amount must be at least 1")]
    InvalidAmount,
    #[error("balance overflow")]
    Overflow,
    #[error("unknown listing {0}")]
    UnknownListing(ListingId),
    #[error("{0} is not the seller")]
    NotSeller(AccountId),
    #[error("listing {0} is not active")]
    ListingNotActive(ListingId),
    #[error("seller cannot buy their own listing")]
    SelfPurchase,
    #[error("{0} is not the administrator")]
    NotAdmin(AccountId),
    #[error("invalid params: {0}")]
    InvalidParams(String),
    #[error("params version skew: expected {expected}, got {got}")]
    VersionSkew { expected: u64, got: u64 },
}

impl TxError {
    /// Stable machine-readable name, used by the API and scenario files.
    pub fn machine_code(&self) -> &'static str {
        match self {
            TxError::SequenceGap { .. } => "SequenceGap",
            TxError::ReservedAccount(_) => "ReservedAccount",
            TxError::AccountExists(_) => "AccountExists",
            TxError::UnknownAccount(_) => "UnknownAccount",
            TxError::UnknownToken(_) => "UnknownToken",
            TxError::NotOwner { .. } => "NotOwner",
            TxError::TokenEscrowed(_) => "TokenEscrowed",
            TxError::SameToken => "SameToken",
            TxError::SelfTransfer => "SelfTransfer",
            TxError::ExponentOutOfRange(_) => "ExponentOutOfRange",
            TxError::InsufficientFunds { .. } => "InsufficientFunds",
            TxError::InsufficientXp { .. } => "InsufficientXp",
            TxError::AlreadyMaxRarity(_) => "AlreadyMaxRarity",
            TxError::InvalidPrice => "InvalidPrice",
            TxError::InvalidAmount => "InvalidAmount",
            TxError::Overflow => "Overflow",
            TxError::UnknownListing(_) => "UnknownListing",
            TxError::NotSeller(_) => "NotSeller",
            TxError::ListingNotActive(_) => "ListingNotActive",
            TxError::SelfPurchase => "SelfPurchase",
            TxError::NotAdmin(_) => "NotAdmin",
            TxError::InvalidParams(_) => "InvalidParams",
            TxError::VersionSkew { .. } => "VersionSkew",
        }
    }
}

impl From<CardError> for TxError {
    fn from(e: CardError) -> Self {
        TxError::ExponentOutOfRange(e)
    }
}
