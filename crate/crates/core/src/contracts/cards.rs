use serde::Serialize;

use crate::card::{canonical_key, encode_card, CombineOp, Rarity, TrigFunction, Variant};
use crate::error::TxError;
use crate::ledger::{AccountId, Combine, LedgerState, Outcome, TokenId};
use crate::rarity::{roll_pack, seed_for_tx, CardDraw, RarityDistribution};

/// What a combine would produce, without producing it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CombineOutcomePreview {
    pub token_a: TokenId,
    pub token_b: TokenId,
    pub op: CombineOp,
    pub possible: bool,
    /// Set when the result exponent leaves the card range.
    pub impossible_reason: Option<String>,
    pub result_function: Option<TrigFunction>,
    pub per_rarity: RarityDistribution,
    pub outcomes: Vec<PreviewOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PreviewOutcome {
    pub rarity: Rarity,
    pub color: &'static str,
    pub probability: f64,
    pub display_name: String,
    /// Asset code per variant; `None` for functions with negative exponents.
    pub codes: Vec<Option<String>>,
    pub canonical_keys: Vec<String>,
}

/// Pure query: consumes no randomness and does not touch the state.
pub fn preview_combine(
    state: &LedgerState,
    token_a: TokenId,
    token_b: TokenId,
    op: CombineOp,
) -> Result<CombineOutcomePreview, TxError> {
    let a = state.token(token_a).ok_or(TxError::UnknownToken(token_a))?;
    let b = state.token(token_b).ok_or(TxError::UnknownToken(token_b))?;
    let per_rarity = state.params().combine_table.distribution(a.rarity, b.rarity);
    let mut preview = CombineOutcomePreview {
        token_a,
        token_b,
        op,
        possible: false,
        impossible_reason: None,
        result_function: None,
        per_rarity,
        outcomes: Vec::new(),
    };
    match a.function.apply(op, b.function) {
        Ok(f) => {
            preview.possible = true;
            preview.result_function = Some(f);
            preview.outcomes = Rarity::ALL
                .into_iter()
                .map(|rarity| PreviewOutcome {
                    rarity,
                    color: rarity.color(),
                    probability: per_rarity.probability(rarity),
                    display_name: f.display_name(),
                    codes: Variant::all()
                        .map(|v| encode_card(f, rarity, v).ok().map(|c| c.to_string()))
                        .collect(),
                    canonical_keys: Variant::all().map(|v| canonical_key(f, rarity, v)).collect(),
                })
                .collect();
        }
        Err(e) => preview.impossible_reason = Some(e.to_string()),
    }
    Ok(preview)
}

impl LedgerState {
    /// Burns two owned cards and mints their product or quotient. The new
    /// card's rarity is drawn from the active table, then its variant.
    pub(crate) fn combine(&mut self, c: &Combine, seq: u64) -> Result<Outcome, TxError> {
        self.require_account(&c.caller)?;
        if c.token_a == c.token_b {
            return Err(TxError::SameToken);
        }
        let a = self.require_owned(c.token_a, &c.caller)?;
        let b = self.require_owned(c.token_b, &c.caller)?;
        let function = a.function.apply(c.op, b.function)?;
        let dist = self.params.combine_table.distribution(a.rarity, b.rarity);

        let mut rng = seed_for_tx(self.global_seed, seq);
        let rarity = dist.sample(&mut rng);
        let variant = rng.next_variant();

        self.burn_token(c.token_a);
        self.burn_token(c.token_b);
        let minted = self.mint_token(
            &c.caller,
            CardDraw {
                function,
                rarity,
                variant,
            },
            seq,
        );
        Ok(Outcome::Combined {
            burned: [c.token_a, c.token_b],
            minted,
        })
    }

    pub(crate) fn buy_pack(&mut self, caller: &AccountId, seq: u64) -> Result<Outcome, TxError> {
        let price = self.params.pack_price_currency;
        let available = self.require_account(caller)?.currency;
        if available < price {
            return Err(TxError::InsufficientFunds {
                needed: price,
                available,
            });
        }
        let treasury = self.treasury.checked_add(price).ok_or(TxError::Overflow)?;
        self.account_mut(caller)?.currency = available - price;
        self.treasury = treasury;
        Ok(Outcome::Minted(self.mint_pack(caller, seq)))
    }

    /// Spent XP is destroyed, not transferred.
    pub(crate) fn buy_pack_with_xp(&mut self, caller: &AccountId, seq: u64) -> Result<Outcome, TxError> {
        let price = self.params.pack_price_xp;
        let available = self.require_account(caller)?.xp;
        if available < price {
            return Err(TxError::InsufficientXp {
                needed: price,
                available,
            });
        }
        self.account_mut(caller)?.xp = available - price;
        Ok(Outcome::Minted(self.mint_pack(caller, seq)))
    }

    fn mint_pack(&mut self, caller: &AccountId, seq: u64) -> Vec<crate::ledger::TokenRecord> {
        let mut rng = seed_for_tx(self.global_seed, seq);
        roll_pack(&self.params.pack_spec, &mut rng)
            .into_iter()
            .map(|draw| self.mint_token(caller, draw, seq))
            .collect()
    }

    /// Burns the card and re-mints it one tier higher for
    /// `upgrade_xp_cost_per_level * (level + 1)` XP.
    pub(crate) fn upgrade_card(&mut self, caller: &AccountId, token: TokenId, seq: u64) -> Result<Outcome, TxError> {
        let xp = self.require_account(caller)?.xp;
        let record = self.require_owned(token, caller)?;
        let next = record.rarity.next().ok_or(TxError::AlreadyMaxRarity(token))?;
        let cost = self
            .params
            .upgrade_xp_cost_per_level
            .checked_mul(u64::from(record.rarity.level()) + 1)
            .ok_or(TxError::Overflow)?;
        if xp < cost {
            return Err(TxError::InsufficientXp {
                needed: cost,
                available: xp,
            });
        }
        let draw = CardDraw {
            function: record.function,
            rarity: next,
            variant: record.variant,
        };
        self.account_mut(caller)?.xp = xp - cost;
        self.burn_token(token);
        let minted = self.mint_token(caller, draw, seq);
        Ok(Outcome::Upgraded {
            burned: token,
            minted,
        })
    }
}
