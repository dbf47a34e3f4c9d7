//! The event-sourced state machine that stands in for a blockchain.
//!
//! [`LedgerState`] only ever changes by applying a [`TransactionEvent`];
//! folding a log over the genesis state with [`replay`] reproduces the live
//! state exactly, which [`snapshot_hash`] makes checkable.

mod canonical;
mod event;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canonical::{hash_excluding_params, snapshot_hash, StateHash};
pub use event::{
    Burn, BuyPack, CancelListing, Combine, Faucet, List, Mint, Purchase, TransactionEvent, Transfer, Tx,
    UpgradeCard, UpgradeParams,
};

use crate::card::{Rarity, TrigFunction, Variant};
use crate::contracts::{Listing, ParamsVersion, SaleRecord};
use crate::error::TxError;
use crate::rarity::CardDraw;

/// Maximum length of an account id.
pub const MAX_ACCOUNT_ID_LEN: usize = 64;

/// Wallet-address stand-in: 1 to 64 chars of `[a-z0-9_-]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AccountId(String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid account id {0:?}: expected 1-64 chars of [a-z0-9_-]")]
pub struct InvalidAccountId(pub String);

impl AccountId {
    /// The administrator principal. Never a regular account.
    pub const ADMIN: &'static str = "admin";

    pub fn new(id: impl Into<String>) -> Result<Self, InvalidAccountId> {
        let id = id.into();
        let valid = !id.is_empty()
            && id.len() <= MAX_ACCOUNT_ID_LEN
            && id
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_' || b == b'-');
        if valid {
            Ok(AccountId(id))
        } else {
            Err(InvalidAccountId(id))
        }
    }

    pub fn admin() -> Self {
        AccountId(Self::ADMIN.to_owned())
    }

    pub fn is_admin(&self) -> bool {
        self.0 == Self::ADMIN
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for AccountId {
    type Error = InvalidAccountId;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        AccountId::new(s)
    }
}

impl From<AccountId> for String {
    fn from(id: AccountId) -> String {
        id.0
    }
}

impl std::str::FromStr for AccountId {
    type Err = InvalidAccountId;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AccountId::new(s)
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenId(pub u64);

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

pub type ListingId = u64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Account {
    pub id: AccountId,
    pub currency: u64,
    pub xp: u64,
    /// Hex SHA-256 of the login secret.
    pub credential: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Owner {
    Account(AccountId),
    MarketEscrow,
}

impl Owner {
    pub fn account(&self) -> Option<&AccountId> {
        match self {
            Owner::Account(a) => Some(a),
            Owner::MarketEscrow => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenRecord {
    pub token_id: TokenId,
    pub function: TrigFunction,
    pub rarity: Rarity,
    pub variant: Variant,
    pub owner: Owner,
    /// Sequence number of the minting event.
    pub minted_at: u64,
}

/// What the ledger starts from before the first event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genesis {
    pub global_seed: u64,
    pub params: ParamsVersion,
}

/// What a successfully applied event did.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    AccountCreated(AccountId),
    Credited { account: AccountId, amount: u64 },
    Minted(Vec<TokenRecord>),
    Burned(TokenId),
    Transferred(TokenId),
    Combined { burned: [TokenId; 2], minted: TokenRecord },
    Upgraded { burned: TokenId, minted: TokenRecord },
    Listed(Listing),
    Cancelled(ListingId),
    Sold(SaleRecord),
    Answered { correct: bool, xp_awarded: u64, new_xp: u64 },
    ParamsInstalled(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerState {
    pub(crate) global_seed: u64,
    pub(crate) next_seq: u64,
    pub(crate) next_token_id: u64,
    pub(crate) next_listing_id: u64,
    pub(crate) treasury: u64,
    pub(crate) accounts: BTreeMap<AccountId, Account>,
    pub(crate) tokens: BTreeMap<TokenId, TokenRecord>,
    pub(crate) listings: BTreeMap<ListingId, Listing>,
    pub(crate) sales: Vec<SaleRecord>,
    /// Questions each account has answered correctly.
    pub(crate) answered: BTreeMap<AccountId, BTreeSet<String>>,
    pub(crate) params: ParamsVersion,
}

impl LedgerState {
    pub fn genesis(genesis: &Genesis) -> Self {
        LedgerState {
            global_seed: genesis.global_seed,
            next_seq: 0,
            next_token_id: 0,
            next_listing_id: 0,
            treasury: 0,
            accounts: BTreeMap::new(),
            tokens: BTreeMap::new(),
            listings: BTreeMap::new(),
            sales: Vec::new(),
            answered: BTreeMap::new(),
            params: genesis.params.clone(),
        }
    }

    pub fn global_seed(&self) -> u64 {
        self.global_seed
    }

    /// Sequence number the next event must carry.
    pub fn next_seq(&self) -> u64 {
        self.next_seq
    }

    pub fn next_token_id(&self) -> TokenId {
        TokenId(self.next_token_id)
    }

    pub fn treasury(&self) -> u64 {
        self.treasury
    }

    pub fn params(&self) -> &ParamsVersion {
        &self.params
    }

    pub fn accounts(&self) -> &BTreeMap<AccountId, Account> {
        &self.accounts
    }

    pub fn account(&self, id: &AccountId) -> Option<&Account> {
        self.accounts.get(id)
    }

    pub fn tokens(&self) -> &BTreeMap<TokenId, TokenRecord> {
        &self.tokens
    }

    pub fn token(&self, id: TokenId) -> Option<&TokenRecord> {
        self.tokens.get(&id)
    }

    pub fn listings(&self) -> &BTreeMap<ListingId, Listing> {
        &self.listings
    }

    pub fn listing(&self, id: ListingId) -> Option<&Listing> {
        self.listings.get(&id)
    }

    pub fn sales(&self) -> &[SaleRecord] {
        &self.sales
    }

    pub fn has_answered(&self, account: &AccountId, qid: &str) -> bool {
        self.answered.get(account).is_some_and(|s| s.contains(qid))
    }

    pub fn answered(&self, account: &AccountId) -> impl Iterator<Item = &str> {
        self.answered.get(account).into_iter().flatten().map(String::as_str)
    }

    /// Tokens currently held by `account` (escrowed listings excluded).
    pub fn cards_of<'a>(&'a self, account: &'a AccountId) -> impl Iterator<Item = &'a TokenRecord> + 'a {
        self.tokens
            .values()
            .filter(move |t| t.owner.account() == Some(account))
    }

    pub fn total_currency(&self) -> u128 {
        self.accounts.values().map(|a| u128::from(a.currency)).sum()
    }

    /// Applies one event in place. On error nothing has been modified.
    pub fn apply(&mut self, event: &TransactionEvent) -> Result<Outcome, TxError> {
        if event.seq != self.next_seq {
            return Err(TxError::SequenceGap {
                expected: self.next_seq,
                got: event.seq,
            });
        }
        let seq = event.seq;
        let outcome = match &event.tx {
            Tx::CreateAccount {
                account,
                credential,
            } => self.create_account(account, credential)?,
            Tx::Faucet(f) => self.faucet(f)?,
            Tx::Mint(m) => self.admin_mint(m, seq)?,
            Tx::Burn(b) => self.admin_burn(b)?,
            Tx::Transfer(t) => {
                self.transfer_token(t.token_id, &t.from, &t.to)?;
                Outcome::Transferred(t.token_id)
            }
            Tx::Combine(c) => self.combine(c, seq)?,
            Tx::BuyPack(b) => self.buy_pack(&b.caller, seq)?,
            Tx::XpBuyPack(b) => self.buy_pack_with_xp(&b.caller, seq)?,
            Tx::UpgradeCard(u) => self.upgrade_card(&u.caller, u.token_id, seq)?,
            Tx::List(l) => self.list_for_sale(&l.caller, l.token_id, l.price)?,
            Tx::CancelListing(c) => self.cancel_listing(&c.caller, c.listing_id)?,
            Tx::Purchase(p) => self.purchase_listing(&p.buyer, p.listing_id, seq)?,
            Tx::AnswerQuestion {
                account,
                qid,
                correct,
                xp_reward,
                ..
            } => self.record_answer(account, qid, *correct, *xp_reward)?,
            Tx::UpgradeParams(u) => self.upgrade_params(&u.caller, &u.params)?,
        };
        self.next_seq += 1;
        Ok(outcome)
    }

    fn create_account(&mut self, id: &AccountId, credential: &str) -> Result<Outcome, TxError> {
        if id.is_admin() {
            return Err(TxError::ReservedAccount(id.clone()));
        }
        if self.accounts.contains_key(id) {
            return Err(TxError::AccountExists(id.clone()));
        }
        self.accounts.insert(
            id.clone(),
            Account {
                id: id.clone(),
                currency: 0,
                xp: 0,
                credential: credential.to_owned(),
            },
        );
        Ok(Outcome::AccountCreated(id.clone()))
    }

    fn faucet(&mut self, f: &Faucet) -> Result<Outcome, TxError> {
        require_admin(&f.caller)?;
        if f.amount == 0 {
            return Err(TxError::InvalidAmount);
        }
        let acct = self.account_mut(&f.account)?;
        acct.currency = acct.currency.checked_add(f.amount).ok_or(TxError::Overflow)?;
        Ok(Outcome::Credited {
            account: f.account.clone(),
            amount: f.amount,
        })
    }

    fn admin_mint(&mut self, m: &Mint, seq: u64) -> Result<Outcome, TxError> {
        require_admin(&m.caller)?;
        self.require_account(&m.owner)?;
        let draw = CardDraw {
            function: m.function,
            rarity: m.rarity,
            variant: m.variant,
        };
        Ok(Outcome::Minted(vec![self.mint_token(&m.owner, draw, seq)]))
    }

    fn admin_burn(&mut self, b: &Burn) -> Result<Outcome, TxError> {
        require_admin(&b.caller)?;
        let token = self.tokens.get(&b.token_id).ok_or(TxError::UnknownToken(b.token_id))?;
        if token.owner == Owner::MarketEscrow {
            return Err(TxError::TokenEscrowed(b.token_id));
        }
        self.burn_token(b.token_id);
        Ok(Outcome::Burned(b.token_id))
    }

    pub(crate) fn require_account(&self, id: &AccountId) -> Result<&Account, TxError> {
        self.accounts
            .get(id)
            .ok_or_else(|| TxError::UnknownAccount(id.clone()))
    }

    pub(crate) fn account_mut(&mut self, id: &AccountId) -> Result<&mut Account, TxError> {
        self.accounts
            .get_mut(id)
            .ok_or_else(|| TxError::UnknownAccount(id.clone()))
    }

    /// The token, provided `caller` holds it outside escrow.
    pub(crate) fn require_owned(&self, token: TokenId, caller: &AccountId) -> Result<&TokenRecord, TxError> {
        let record = self.tokens.get(&token).ok_or(TxError::UnknownToken(token))?;
        match &record.owner {
            Owner::MarketEscrow => Err(TxError::TokenEscrowed(token)),
            Owner::Account(owner) if owner == caller => Ok(record),
            Owner::Account(_) => Err(TxError::NotOwner {
                token,
                caller: caller.clone(),
            }),
        }
    }

    /// Assigns the next token id. The owner must already have been checked.
    pub(crate) fn mint_token(&mut self, owner: &AccountId, draw: CardDraw, seq: u64) -> TokenRecord {
        let token_id = TokenId(self.next_token_id);
        self.next_token_id += 1;
        let record = TokenRecord {
            token_id,
            function: draw.function,
            rarity: draw.rarity,
            variant: draw.variant,
            owner: Owner::Account(owner.clone()),
            minted_at: seq,
        };
        self.tokens.insert(token_id, record.clone());
        record
    }

    pub(crate) fn burn_token(&mut self, token: TokenId) -> TokenRecord {
        self.tokens.remove(&token).expect("burn of a checked token")
    }

    pub(crate) fn transfer_token(&mut self, token: TokenId, from: &AccountId, to: &AccountId) -> Result<(), TxError> {
        self.require_account(from)?;
        self.require_account(to)?;
        self.require_owned(token, from)?;
        if from == to {
            return Err(TxError::SelfTransfer);
        }
        self.tokens.get_mut(&token).expect("checked").owner = Owner::Account(to.clone());
        Ok(())
    }

    pub(crate) fn set_owner(&mut self, token: TokenId, owner: Owner) {
        self.tokens.get_mut(&token).expect("checked").owner = owner;
    }

    fn record_answer(&mut self, account: &AccountId, qid: &str, correct: bool, reward: u64) -> Result<Outcome, TxError> {
        let already = self.has_answered(account, qid);
        let acct = self.require_account(account)?;
        let xp_awarded = if correct && !already { reward } else { 0 };
        let new_xp = acct.xp.checked_add(xp_awarded).ok_or(TxError::Overflow)?;
        self.account_mut(account)?.xp = new_xp;
        if correct {
            self.answered
                .entry(account.clone())
                .or_default()
                .insert(qid.to_owned());
        }
        Ok(Outcome::Answered {
            correct,
            xp_awarded,
            new_xp,
        })
    }
}

pub(crate) fn require_admin(caller: &AccountId) -> Result<(), TxError> {
    if caller.is_admin() {
        Ok(())
    } else {
        Err(TxError::NotAdmin(caller.clone()))
    }
}

/// Pure form of [`LedgerState::apply`].
pub fn apply_event(state: &LedgerState, event: &TransactionEvent) -> Result<(LedgerState, Outcome), TxError> {
    let mut next = state.clone();
    let outcome = next.apply(event)?;
    Ok((next, outcome))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("corrupt log at seq {seq}: {reason}")]
pub struct CorruptLog {
    pub seq: u64,
    pub reason: String,
}

/// Folds `log` over the genesis state.
pub fn replay<'a>(genesis: &Genesis, log: impl IntoIterator<Item = &'a TransactionEvent>) -> Result<LedgerState, CorruptLog> {
    let mut state = LedgerState::genesis(genesis);
    for event in log {
        state.apply(event).map_err(|e| CorruptLog {
            seq: event.seq,
            reason: e.to_string(),
        })?;
    }
    Ok(state)
}
