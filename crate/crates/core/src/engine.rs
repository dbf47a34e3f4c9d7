//! The single writer: turns client requests into logged events.
//!
//! A [`TxRequest`] is what a client asks for. Two kinds need work before they
//! can be logged: account creation replaces the secret with its digest, and
//! trivia answers are graded against the question bank. Everything else maps
//! one-to-one onto a [`Tx`].

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::error::TxError;
use crate::ledger::{
    snapshot_hash, AccountId, Burn, BuyPack, CancelListing, Combine, CorruptLog, Faucet, Genesis, LedgerState, List,
    Mint, Outcome, Purchase, StateHash, TransactionEvent, Transfer, Tx, UpgradeCard, UpgradeParams,
};
use crate::rarity::RngStream;
use crate::trivia::{grade_answer, next_question, Question, QuestionBank, TriviaError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateAccountRequest {
    pub account: AccountId,
    pub secret: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRequest {
    pub account: AccountId,
    pub qid: String,
    pub choice_index: u32,
}

/// A transaction as submitted by a client or a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum TxRequest {
    CreateAccount(CreateAccountRequest),
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
    AnswerQuestion(AnswerRequest),
    UpgradeParams(UpgradeParams),
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Rejected(#[from] TxError),
    #[error(transparent)]
    Trivia(#[from] TriviaError),
}

impl EngineError {
    pub fn machine_code(&self) -> &'static str {
        match self {
            EngineError::Rejected(e) => e.machine_code(),
            EngineError::Trivia(e) => e.machine_code(),
        }
    }
}

/// Hex SHA-256 of `account || 0x00 || secret`.
pub fn credential_digest(account: &AccountId, secret: &str) -> String {
    let mut h = Sha256::new();
    h.update(account.as_str());
    h.update([0]);
    h.update(secret);
    hex::encode(h.finalize())
}

/// An applied transaction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Receipt {
    pub seq: u64,
    pub outcome: Outcome,
}

fn unix_millis() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

/// Ledger state plus the events this instance has applied.
#[derive(Debug, Clone)]
pub struct Engine {
    genesis: Genesis,
    state: LedgerState,
    log: Vec<TransactionEvent>,
    bank: QuestionBank,
}

impl Engine {
    pub fn new(genesis: Genesis, bank: QuestionBank) -> Self {
        Engine {
            state: LedgerState::genesis(&genesis),
            genesis,
            log: Vec::new(),
            bank,
        }
    }

    /// Resumes from `state`, which must already include every event before
    /// `tail`, then applies `tail`.
    pub fn resume(
        genesis: Genesis,
        bank: QuestionBank,
        state: LedgerState,
        tail: Vec<TransactionEvent>,
    ) -> Result<Self, CorruptLog> {
        let mut state = state;
        for event in &tail {
            state.apply(event).map_err(|e| CorruptLog {
                seq: event.seq,
                reason: e.to_string(),
            })?;
        }
        Ok(Engine {
            genesis,
            state,
            log: tail,
            bank,
        })
    }

    pub fn genesis(&self) -> &Genesis {
        &self.genesis
    }

    pub fn state(&self) -> &LedgerState {
        &self.state
    }

    /// Events applied since this engine was created or resumed.
    pub fn log(&self) -> &[TransactionEvent] {
        &self.log
    }

    pub fn bank(&self) -> &QuestionBank {
        &self.bank
    }

    pub fn hash(&self) -> StateHash {
        snapshot_hash(&self.state)
    }

    pub fn prepare(&self, request: TxRequest) -> Result<Tx, EngineError> {
        Ok(match request {
            TxRequest::CreateAccount(r) => Tx::CreateAccount {
                credential: credential_digest(&r.account, &r.secret),
                account: r.account,
            },
            TxRequest::AnswerQuestion(r) => grade_answer(&self.bank, &r.account, &r.qid, r.choice_index)?,
            TxRequest::Faucet(x) => Tx::Faucet(x),
            TxRequest::Mint(x) => Tx::Mint(x),
            TxRequest::Burn(x) => Tx::Burn(x),
            TxRequest::Transfer(x) => Tx::Transfer(x),
            TxRequest::Combine(x) => Tx::Combine(x),
            TxRequest::BuyPack(x) => Tx::BuyPack(x),
            TxRequest::XpBuyPack(x) => Tx::XpBuyPack(x),
            TxRequest::UpgradeCard(x) => Tx::UpgradeCard(x),
            TxRequest::List(x) => Tx::List(x),
            TxRequest::CancelListing(x) => Tx::CancelListing(x),
            TxRequest::Purchase(x) => Tx::Purchase(x),
            TxRequest::UpgradeParams(x) => Tx::UpgradeParams(x),
        })
    }

    pub fn submit(&mut self, request: TxRequest) -> Result<Receipt, EngineError> {
        let tx = self.prepare(request)?;
        Ok(self.submit_tx(tx)?)
    }

    /// Applies an already-prepared transaction as the next event. Rejected
    /// transactions are not logged and consume no sequence number.
    pub fn submit_tx(&mut self, tx: Tx) -> Result<Receipt, TxError> {
        let event = TransactionEvent {
            seq: self.state.next_seq(),
            tx,
            wall_clock: unix_millis(),
        };
        let outcome = self.state.apply(&event)?;
        let seq = event.seq;
        self.log.push(event);
        Ok(Receipt { seq, outcome })
    }

    /// The question `account` should see next. Deterministic for a given
    /// account and ledger position.
    pub fn next_question(&self, account: &AccountId) -> Result<&Question, TriviaError> {
        let salt = Sha256::digest(account.as_str());
        let salt = u64::from_be_bytes(salt[..8].try_into().expect("8 bytes"));
        let mut stream = RngStream::for_tx(self.state.global_seed() ^ salt, self.state.next_seq());
        next_question(&self.bank, &self.state, account, &mut stream)
    }

    pub fn verify_credential(&self, account: &AccountId, secret: &str) -> bool {
        self.state
            .account(account)
            .is_some_and(|a| a.credential == credential_digest(account, secret))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::ParamsVersion;
    use crate::ledger::replay;

    fn engine() -> Engine {
        Engine::new(
            Genesis {
                global_seed: 42,
                params: ParamsVersion::default(),
            },
            QuestionBank::starter(),
        )
    }

    fn id(s: &str) -> AccountId {
        AccountId::new(s).unwrap()
    }

    #[test]
    fn request_json_shape() {
        let req: TxRequest =
            serde_json::from_str(r#"{"kind":"CreateAccount","payload":{"account":"alice","secret":"pw"}}"#).unwrap();
        assert!(matches!(req, TxRequest::CreateAccount(_)));
        // clients cannot submit pre-graded answers
        let forged = r#"{"kind":"AnswerQuestion","payload":{"account":"a","qid":"sin-30","choice_index":0,"correct":true,"xp_reward":999}}"#;
        assert!(serde_json::from_str::<TxRequest>(forged).is_err());
    }

    #[test]
    fn secrets_are_not_logged() {
        let mut e = engine();
        e.submit(TxRequest::CreateAccount(CreateAccountRequest {
            account: id("alice"),
            secret: "hunter2".into(),
        }))
        .unwrap();
        let line = serde_json::to_string(&e.log()[0]).unwrap();
        assert!(!line.contains("hunter2"));
        assert!(e.verify_credential(&id("alice"), "hunter2"));
        assert!(!e.verify_credential(&id("alice"), "hunter3"));
        assert!(!e.verify_credential(&id("bob"), "hunter2"));
    }

    #[test]
    fn rejected_requests_consume_no_seq() {
        let mut e = engine();
        let err = e
            .submit(TxRequest::BuyPack(BuyPack { caller: id("ghost") }))
            .unwrap_err();
        assert_eq!(err.machine_code(), "UnknownAccount");
        assert_eq!(e.state().next_seq(), 0);
        assert!(e.log().is_empty());
        let err = e
            .submit(TxRequest::AnswerQuestion(AnswerRequest {
                account: id("ghost"),
                qid: "nope".into(),
                choice_index: 0,
            }))
            .unwrap_err();
        assert_eq!(err.machine_code(), "UnknownQuestion");
    }

    #[test]
    fn engine_log_replays_to_same_hash() {
        let mut e = engine();
        e.submit(TxRequest::CreateAccount(CreateAccountRequest {
            account: id("alice"),
            secret: "x".into(),
        }))
        .unwrap();
        e.submit(TxRequest::Faucet(Faucet {
            caller: AccountId::admin(),
            account: id("alice"),
            amount: 300,
        }))
        .unwrap();
        e.submit(TxRequest::BuyPack(BuyPack { caller: id("alice") })).unwrap();
        let q = e.next_question(&id("alice")).unwrap().clone();
        e.submit(TxRequest::AnswerQuestion(AnswerRequest {
            account: id("alice"),
            qid: q.qid.clone(),
            choice_index: q.answer_index as u32,
        }))
        .unwrap();
        assert_eq!(e.state().account(&id("alice")).unwrap().xp, q.xp_reward);
        let replayed = replay(e.genesis(), e.log()).unwrap();
        assert_eq!(snapshot_hash(&replayed), e.hash());

        let resumed = Engine::resume(e.genesis().clone(), QuestionBank::starter(), LedgerState::genesis(e.genesis()), e.log().to_vec()).unwrap();
        assert_eq!(resumed.hash(), e.hash());
    }

    #[test]
    fn next_question_is_stable_until_state_moves() {
        let mut e = engine();
        e.submit(TxRequest::CreateAccount(CreateAccountRequest {
            account: id("alice"),
            secret: "x".into(),
        }))
        .unwrap();
        let a = e.next_question(&id("alice")).unwrap().qid.clone();
        let b = e.next_question(&id("alice")).unwrap().qid.clone();
        assert_eq!(a, b);
    }
}
