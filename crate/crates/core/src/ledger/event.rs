use serde::{Deserialize, Serialize};

use super::{AccountId, ListingId, TokenId};
use crate::card::{CombineOp, Rarity, TrigFunction, Variant};
use crate::contracts::ParamsVersion;

/// One entry of the append-only transaction log.
///
/// JSON form (one per line in `txlog.jsonl`):
/// `{"seq":3,"kind":"Combine","payload":{...},"wall_clock":1760000000000}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransactionEvent {
    pub seq: u64,
    #[serde(flatten)]
    pub tx: Tx,
    /// Milliseconds since the Unix epoch. Informational only: never hashed,
    /// never consulted by `apply`.
    #[serde(default)]
    pub wall_clock: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Faucet {
    pub caller: AccountId,
    pub account: AccountId,
    pub amount: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mint {
    pub caller: AccountId,
    pub owner: AccountId,
    pub function: TrigFunction,
    pub rarity: Rarity,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Burn {
    pub caller: AccountId,
    pub token_id: TokenId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transfer {
    pub token_id: TokenId,
    pub from: AccountId,
    pub to: AccountId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Combine {
    pub caller: AccountId,
    pub token_a: TokenId,
    pub token_b: TokenId,
    pub op: CombineOp,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuyPack {
    pub caller: AccountId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpgradeCard {
    pub caller: AccountId,
    pub token_id: TokenId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct List {
    pub caller: AccountId,
    pub token_id: TokenId,
    pub price: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CancelListing {
    pub caller: AccountId,
    pub listing_id: ListingId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Purchase {
    pub buyer: AccountId,
    pub listing_id: ListingId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpgradeParams {
    pub caller: AccountId,
    pub params: ParamsVersion,
}

/// The kind and payload of a logged transaction.
///
/// `CreateAccount` carries the credential digest, never the secret, and
/// `AnswerQuestion` carries the grade computed against the question bank at
/// submission time, so replay needs neither secrets nor the bank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum Tx {
    CreateAccount {
        account: AccountId,
        credential: String,
    },
    Faucet(Faucet),
    Mint(Mint),
    Burn(Burn),
    Transfer(Transfer),
    Combine(Combine),
    BuyPack(BuyPack),
    XpBuyPack(BuyPack),
    UpgradeCard(UpgradeCard),
    List(List),
    CancelListing(CancelListing),
    Purchase(Purchase),
    AnswerQuestion {
        account: AccountId,
        qid: String,
        choice_index: u32,
        correct: bool,
        xp_reward: u64,
    },
    UpgradeParams(UpgradeParams),
}

impl Tx {
    pub fn kind(&self) -> &'static str {
        match self {
            Tx::CreateAccount { .. } => "CreateAccount",
            Tx::Faucet(_) => "Faucet",
            Tx::Mint(_) => "Mint",
            Tx::Burn(_) => "Burn",
            Tx::Transfer(_) => "Transfer",
            Tx::Combine(_) => "Combine",
            Tx::BuyPack(_) => "BuyPack",
            Tx::XpBuyPack(_) => "XpBuyPack",
            Tx::UpgradeCard(_) => "UpgradeCard",
            Tx::List(_) => "List",
            Tx::CancelListing(_) => "CancelListing",
            Tx::Purchase(_) => "Purchase",
            Tx::AnswerQuestion { .. } => "AnswerQuestion",
            Tx::UpgradeParams(_) => "UpgradeParams",
        }
    }
}
