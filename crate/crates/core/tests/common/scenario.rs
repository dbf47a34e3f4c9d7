//! Random mixed transaction streams and the per-step ledger invariants
//! they are checked against.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nftrig::card::{base_catalog, CombineOp, Rarity, Variant};
use nftrig::contracts::ListingStatus;
use nftrig::engine::{AnswerRequest, CreateAccountRequest};
use nftrig::ledger::{
    snapshot_hash, Burn, BuyPack, CancelListing, Combine, Faucet, List, Mint, Outcome, Owner, Purchase, StateHash,
    Transfer, UpgradeCard, UpgradeParams,
};
use nftrig::rarity::{CombineTable, RarityDistribution};
use nftrig::{AccountId, Engine, LedgerState, ParamsVersion, TokenId, Tx, TxRequest};

pub const PLAYERS: usize = 10;

pub fn player(i: usize) -> AccountId {
    AccountId::new(format!("p{i}")).unwrap()
}

pub fn ghost() -> AccountId {
    AccountId::new("ghost").unwrap()
}

/// Draws requests against the engine's current state. Roughly a third of
/// them are invalid in some way: wrong caller, unknown ids, escrowed
/// tokens, empty wallets, stale params.
pub struct Generator {
    rng: ChaCha8Rng,
    qids: Vec<(String, u32)>,
}

impl Generator {
    pub fn new(seed: u64, engine: &Engine) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            qids: engine
                .bank()
                .questions()
                .iter()
                .map(|q| (q.qid.clone(), q.answer_index as u32))
                .collect(),
        }
    }

    fn someone(&mut self, state: &LedgerState) -> AccountId {
        if self.rng.gen_bool(0.04) || state.accounts().is_empty() {
            return ghost();
        }
        let n = state.accounts().len();
        state.accounts().keys().nth(self.rng.gen_range(0..n)).unwrap().clone()
    }

    fn token(&mut self, state: &LedgerState) -> TokenId {
        let n = state.tokens().len();
        if n == 0 || self.rng.gen_bool(0.08) {
            return TokenId(self.rng.gen_range(0..state.next_token_id().0 + 3));
        }
        *state.tokens().keys().nth(self.rng.gen_range(0..n)).unwrap()
    }

    /// The token's holder most of the time, anyone otherwise.
    fn caller_for(&mut self, state: &LedgerState, token: TokenId) -> AccountId {
        match state.token(token).map(|t| &t.owner) {
            Some(Owner::Account(a)) if self.rng.gen_bool(0.8) => a.clone(),
            _ => self.someone(state),
        }
    }

    fn listing(&mut self, state: &LedgerState) -> u64 {
        let active: Vec<u64> = state
            .listings()
            .values()
            .filter(|l| l.status == ListingStatus::Active)
            .map(|l| l.listing_id)
            .collect();
        if active.is_empty() || self.rng.gen_bool(0.15) {
            self.rng.gen_range(0..state.listings().len() as u64 + 2)
        } else {
            *active.choose(&mut self.rng).unwrap()
        }
    }

    fn admin_or_not(&mut self, state: &LedgerState, p_admin: f64) -> AccountId {
        if self.rng.gen_bool(p_admin) {
            AccountId::admin()
        } else {
            self.someone(state)
        }
    }

    pub fn next(&mut self, engine: &Engine) -> TxRequest {
        let state = engine.state();
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=3 => {
                let account = match self.rng.gen_range(0..20) {
                    0 => AccountId::admin(),
                    1..=6 => self.someone(state),
                    _ => player(self.rng.gen_range(0..PLAYERS)),
                };
                TxRequest::CreateAccount(CreateAccountRequest {
                    account,
                    secret: "pw".into(),
                })
            }
            4..=7 => {
                let caller = self.admin_or_not(state, 0.8);
                let account = self.someone(state);
                let amount = if self.rng.gen_bool(0.1) { 0 } else { self.rng.gen_range(50..400) };
                TxRequest::Faucet(Faucet { caller, account, amount })
            }
            8..=16 => TxRequest::BuyPack(BuyPack {
                caller: self.someone(state),
            }),
            17..=19 => TxRequest::XpBuyPack(BuyPack {
                caller: self.someone(state),
            }),
            20..=41 => {
                let token_a = self.token(state);
                let caller = self.caller_for(state, token_a);
                // prefer a second card from the same hand
                let mine: Vec<TokenId> = state.cards_of(&caller).map(|t| t.token_id).collect();
                let token_b = match mine.choose(&mut self.rng) {
                    Some(&t) if self.rng.gen_bool(0.85) => t,
                    _ => self.token(state),
                };
                let op = if self.rng.gen_bool(0.5) { CombineOp::Multiply } else { CombineOp::Divide };
                TxRequest::Combine(Combine {
                    caller,
                    token_a,
                    token_b,
                    op,
                })
            }
            42..=48 => {
                let token_id = self.token(state);
                let from = self.caller_for(state, token_id);
                let to = self.someone(state);
                TxRequest::Transfer(Transfer { token_id, from, to })
            }
            49..=53 => {
                let token_id = self.token(state);
                TxRequest::UpgradeCard(UpgradeCard {
                    caller: self.caller_for(state, token_id),
                    token_id,
                })
            }
            54..=62 => {
                let token_id = self.token(state);
                let price = if self.rng.gen_bool(0.08) { 0 } else { self.rng.gen_range(1..250) };
                TxRequest::List(List {
                    caller: self.caller_for(state, token_id),
                    token_id,
                    price,
                })
            }
            63..=66 => {
                let listing_id = self.listing(state);
                let caller = match state.listing(listing_id) {
                    Some(l) if self.rng.gen_bool(0.7) => l.seller.clone(),
                    _ => self.someone(state),
                };
                TxRequest::CancelListing(CancelListing { caller, listing_id })
            }
            67..=75 => TxRequest::Purchase(Purchase {
                buyer: self.someone(state),
                listing_id: self.listing(state),
            }),
            76..=92 => {
                let account = self.someone(state);
                let (qid, answer) = if self.rng.gen_bool(0.03) {
                    ("no-such-question".to_owned(), 0)
                } else {
                    self.qids.choose(&mut self.rng).unwrap().clone()
                };
                let choice_index = if self.rng.gen_bool(0.6) { answer } else { (answer + 1) % 4 };
                TxRequest::AnswerQuestion(AnswerRequest {
                    account,
                    qid,
                    choice_index,
                })
            }
            93 => {
                let caller = self.admin_or_not(state, 0.7);
                let mut params = state.params().clone();
                params.version += if self.rng.gen_bool(0.8) { 1 } else { self.rng.gen_range(2..4) };
                params.combine_table = random_table(&mut self.rng);
                params.market_fee_basis_points = self.rng.gen_range(0..=1000);
                TxRequest::UpgradeParams(UpgradeParams { caller, params })
            }
            94..=96 => {
                let catalog = base_catalog();
                TxRequest::Mint(Mint {
                    caller: self.admin_or_not(state, 0.6),
                    owner: self.someone(state),
                    function: *catalog.choose(&mut self.rng).unwrap(),
                    rarity: Rarity::ALL[self.rng.gen_range(0..4)],
                    variant: Variant::new(self.rng.gen_range(0..4)).unwrap(),
                })
            }
            _ => TxRequest::Burn(Burn {
                caller: self.admin_or_not(state, 0.6),
                token_id: self.token(state),
            }),
        }
    }
}

pub fn random_distribution(rng: &mut impl Rng) -> RarityDistribution {
    let raw: [f64; 4] = [rng.gen(), rng.gen(), rng.gen(), rng.gen::<f64>() + 0.01];
    let total: f64 = raw.iter().sum();
    let mut p = raw.map(|x| x / total);
    // absorb rounding so the row sums to 1 within tolerance
    p[3] = 1.0 - p[0] - p[1] - p[2];
    RarityDistribution::new(p).unwrap()
}

pub fn random_table(rng: &mut impl Rng) -> CombineTable {
    CombineTable::ByMax([
        random_distribution(rng),
        random_distribution(rng),
        random_distribution(rng),
        random_distribution(rng),
    ])
}

/// What the checker needs from the state before an event.
#[derive(Debug, Clone)]
pub struct Before {
    pub hash: StateHash,
    pub log_len: usize,
    pub balances: BTreeMap<AccountId, (u64, u64)>,
    pub treasury: u64,
    pub tokens: usize,
    pub next_token: u64,
    pub params: ParamsVersion,
    /// For answer requests: had this pair already been answered correctly.
    pub already_answered: bool,
}

impl Before {
    pub fn capture(engine: &Engine, hash: StateHash, request: &TxRequest) -> Self {
        let s = engine.state();
        Before {
            hash,
            log_len: engine.log().len(),
            balances: s.accounts().values().map(|a| (a.id.clone(), (a.currency, a.xp))).collect(),
            treasury: s.treasury(),
            tokens: s.tokens().len(),
            next_token: s.next_token_id().0,
            params: s.params().clone(),
            already_answered: match request {
                TxRequest::AnswerQuestion(a) => s.has_answered(&a.account, &a.qid),
                _ => false,
            },
        }
    }
}

fn money(state: &LedgerState, id: &AccountId) -> (u64, u64) {
    state.account(id).map_or((0, 0), |a| (a.currency, a.xp))
}

/// Asserts every ledger invariant across one accepted event. `tx` is the
/// logged transaction.
pub fn check_accepted(before: &Before, engine: &Engine, tx: &Tx, outcome: &Outcome) {
    let state = engine.state();
    assert_eq!(engine.log().len(), before.log_len + 1);

    // token count deltas
    let delta = state.tokens().len() as i64 - before.tokens as i64;
    let expected_delta = match tx {
        Tx::BuyPack(_) | Tx::XpBuyPack(_) => i64::from(before.params.pack_spec.cards_per_pack()),
        Tx::Combine(_) | Tx::Burn(_) => -1,
        Tx::Mint(_) => 1,
        _ => 0,
    };
    assert_eq!(delta, expected_delta, "token delta for {}", tx.kind());

    // fresh ids only, strictly increasing
    let minted: Vec<TokenId> = match outcome {
        Outcome::Minted(ts) => ts.iter().map(|t| t.token_id).collect(),
        Outcome::Combined { minted, .. } | Outcome::Upgraded { minted, .. } => vec![minted.token_id],
        _ => vec![],
    };
    let mut expect_id = before.next_token;
    for id in &minted {
        assert_eq!(id.0, expect_id, "token ids must be fresh and increasing");
        expect_id += 1;
    }
    assert_eq!(state.next_token_id().0, expect_id);

    // currency: only the faucet creates money; fees move into the treasury
    let total_before: u128 = before.balances.values().map(|b| u128::from(b.0)).sum::<u128>() + u128::from(before.treasury);
    let total_after = state.total_currency() + u128::from(state.treasury());
    match tx {
        Tx::Faucet(f) => assert_eq!(total_after, total_before + u128::from(f.amount)),
        _ => assert_eq!(total_after, total_before, "currency changed on {}", tx.kind()),
    }

    if let (Tx::Purchase(_), Outcome::Sold(sale)) = (tx, outcome) {
        let fee = before.params.market_fee(sale.price);
        assert_eq!(sale.fee_paid, fee);
        let buyer_before = before.balances[&sale.buyer].0;
        let seller_before = before.balances[&sale.seller].0;
        let buyer_debit = buyer_before - money(state, &sale.buyer).0;
        let seller_credit = money(state, &sale.seller).0 - seller_before;
        assert_eq!(buyer_debit, sale.price);
        assert_eq!(buyer_debit, seller_credit + fee);
        assert_eq!(state.treasury() - before.treasury, fee);
    }

    // xp moves only on answers, xp packs and upgrades
    for (id, &(_, xp_before)) in &before.balances {
        let xp_after = money(state, id).1;
        let expected = match tx {
            Tx::AnswerQuestion {
                account,
                correct,
                xp_reward,
                ..
            } if account == id => {
                if *correct && !before.already_answered {
                    xp_before + xp_reward
                } else {
                    xp_before
                }
            }
            Tx::XpBuyPack(b) if &b.caller == id => xp_before - before.params.pack_price_xp,
            Tx::UpgradeCard(u) if &u.caller == id => {
                let target = match outcome {
                    Outcome::Upgraded { minted, .. } => minted.rarity.level() as u64,
                    _ => unreachable!(),
                };
                xp_before - before.params.upgrade_xp_cost_per_level * target
            }
            _ => xp_before,
        };
        assert_eq!(xp_after, expected, "xp of {id} on {}", tx.kind());
    }
    if let Tx::AnswerQuestion { account, qid, correct, .. } = tx {
        if *correct {
            assert!(state.has_answered(account, qid));
        }
    }

    check_listings(state);
}

/// One active listing per escrowed token, and escrow only for listed tokens.
pub fn check_listings(state: &LedgerState) {
    let mut active_per_token: BTreeMap<TokenId, usize> = BTreeMap::new();
    for l in state.listings().values().filter(|l| l.status == ListingStatus::Active) {
        *active_per_token.entry(l.token_id).or_default() += 1;
        assert_eq!(state.token(l.token_id).map(|t| &t.owner), Some(&Owner::MarketEscrow));
    }
    assert!(active_per_token.values().all(|&n| n == 1));
    let escrowed = state.tokens().values().filter(|t| t.owner == Owner::MarketEscrow).count();
    assert_eq!(escrowed, active_per_token.len());
}

/// Tallies from one generated run.
#[derive(Debug, Default, Clone)]
pub struct RunStats {
    pub accepted: usize,
    pub rejected: usize,
    pub codes: BTreeMap<&'static str, usize>,
    pub kinds: BTreeMap<&'static str, usize>,
}

impl RunStats {
    pub fn invalid_fraction(&self) -> f64 {
        self.rejected as f64 / (self.accepted + self.rejected) as f64
    }
}

/// Runs `steps` generated requests, checking every invariant as it goes.
pub fn run_checked(engine: &mut Engine, seed: u64, steps: usize) -> RunStats {
    let mut gen = Generator::new(seed, engine);
    let mut stats = RunStats::default();
    let mut hash = snapshot_hash(engine.state());
    for _ in 0..steps {
        let request = gen.next(engine);
        let before = Before::capture(engine, hash, &request);
        match engine.submit(request) {
            Ok(receipt) => {
                let tx = engine.log().last().unwrap().tx.clone();
                *stats.kinds.entry(tx.kind()).or_default() += 1;
                check_accepted(&before, engine, &tx, &receipt.outcome);
                stats.accepted += 1;
                hash = snapshot_hash(engine.state());
            }
            Err(e) => {
                *stats.codes.entry(e.machine_code()).or_default() += 1;
                stats.rejected += 1;
                hash = snapshot_hash(engine.state());
                assert_eq!(hash, before.hash, "rejected {} changed the state", e.machine_code());
                assert_eq!(engine.log().len(), before.log_len);
            }
        }
    }
    stats
}
