//! Canonical byte encoding of [`LedgerState`] and its SHA-256 digest.
//!
//! Layout: the tag `nftrig-state/1`; then the header integers; then each
//! collection as a `u64` count followed by its entries in ascending key order;
//! then the active params. Integers are fixed-width big-endian, strings are
//! `u32` length-prefixed UTF-8, probabilities are the IEEE-754 bits of the
//! `f64`. The params-excluded form drops both the params block and the
//! sequence cursor.

use sha2::{Digest, Sha256};

use super::{LedgerState, Owner};
use crate::contracts::{ListingStatus, ParamsVersion};
use crate::rarity::{CombineTable, RarityDistribution};

const TAG: &[u8] = b"nftrig-state/1";

/// 32-byte SHA-256 digest of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateHash(pub [u8; 32]);

impl StateHash {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl std::fmt::Display for StateHash {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_hex())
    }
}

struct Encoder<D: Digest>(D);

impl<D: Digest> Encoder<D> {
    fn u8(&mut self, v: u8) {
        self.0.update([v]);
    }
    fn i8(&mut self, v: i8) {
        self.0.update(v.to_be_bytes());
    }
    fn u16(&mut self, v: u16) {
        self.0.update(v.to_be_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.0.update(v.to_be_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.update(v.to_be_bytes());
    }
    fn len(&mut self, n: usize) {
        self.u64(n as u64);
    }
    fn str(&mut self, s: &str) {
        self.u32(u32::try_from(s.len()).expect("string longer than 4 GiB"));
        self.0.update(s.as_bytes());
    }
    fn dist(&mut self, d: &RarityDistribution) {
        for p in d.probabilities() {
            self.u64(p.to_bits());
        }
    }
}

fn encode_state<D: Digest>(enc: &mut Encoder<D>, s: &LedgerState, with_params: bool) {
    enc.0.update(TAG);
    enc.u64(s.global_seed);
    if with_params {
        enc.u64(s.next_seq);
    }
    enc.u64(s.next_token_id);
    enc.u64(s.next_listing_id);
    enc.u64(s.treasury);

    enc.len(s.accounts.len());
    for (id, acct) in &s.accounts {
        enc.str(id.as_str());
        enc.u64(acct.currency);
        enc.u64(acct.xp);
        enc.str(&acct.credential);
    }

    enc.len(s.tokens.len());
    for (id, t) in &s.tokens {
        enc.u64(id.0);
        enc.i8(t.function.sin_pow());
        enc.i8(t.function.cos_pow());
        enc.u8(t.rarity.level());
        enc.u8(t.variant.index());
        match &t.owner {
            Owner::Account(a) => {
                enc.u8(0);
                enc.str(a.as_str());
            }
            Owner::MarketEscrow => enc.u8(1),
        }
        enc.u64(t.minted_at);
    }

    enc.len(s.listings.len());
    for (id, l) in &s.listings {
        enc.u64(*id);
        enc.u64(l.token_id.0);
        enc.str(l.seller.as_str());
        enc.u64(l.price);
        enc.u8(match l.status {
            ListingStatus::Active => 0,
            ListingStatus::Sold => 1,
            ListingStatus::Cancelled => 2,
        });
    }

    enc.len(s.sales.len());
    for r in &s.sales {
        enc.u64(r.listing_id);
        enc.u64(r.token_id.0);
        enc.str(r.seller.as_str());
        enc.str(r.buyer.as_str());
        enc.u64(r.price);
        enc.u64(r.fee_paid);
        enc.u64(r.seq);
    }

    enc.len(s.answered.len());
    for (account, qids) in &s.answered {
        enc.str(account.as_str());
        enc.len(qids.len());
        for q in qids {
            enc.str(q);
        }
    }

    if with_params {
        encode_params(enc, &s.params);
    }
}

fn encode_params<D: Digest>(enc: &mut Encoder<D>, p: &ParamsVersion) {
    enc.u64(p.version);
    match &p.combine_table {
        CombineTable::ByMax(rows) => {
            enc.u8(0);
            rows.iter().for_each(|r| enc.dist(r));
        }
        CombineTable::ByPair(rows) => {
            enc.u8(1);
            rows.iter().flatten().for_each(|r| enc.dist(r));
        }
    }
    enc.u32(p.pack_spec.cards_per_pack());
    enc.dist(p.pack_spec.rarity_weights());
    enc.len(p.pack_spec.catalog().len());
    for f in p.pack_spec.catalog() {
        enc.i8(f.sin_pow());
        enc.i8(f.cos_pow());
    }
    enc.u64(p.pack_price_currency);
    enc.u64(p.pack_price_xp);
    enc.u64(p.upgrade_xp_cost_per_level);
    enc.u16(p.market_fee_basis_points);
}

pub fn snapshot_hash(state: &LedgerState) -> StateHash {
    let mut enc = Encoder(Sha256::new());
    encode_state(&mut enc, state, true);
    StateHash(enc.0.finalize().into())
}

/// Digest of everything except the active params and the sequence cursor:
/// the part of the state a params upgrade must leave alone.
pub fn hash_excluding_params(state: &LedgerState) -> StateHash {
    let mut enc = Encoder(Sha256::new());
    encode_state(&mut enc, state, false);
    StateHash(enc.0.finalize().into())
}
