use serde::{Deserialize, Serialize};

use crate::error::TxError;
use crate::ledger::{AccountId, LedgerState, ListingId, Outcome, Owner, TokenId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListingStatus {
    Active,
    Sold,
    Cancelled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Listing {
    pub listing_id: ListingId,
    pub token_id: TokenId,
    pub seller: AccountId,
    pub price: u64,
    pub status: ListingStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaleRecord {
    pub listing_id: ListingId,
    pub token_id: TokenId,
    pub seller: AccountId,
    pub buyer: AccountId,
    pub price: u64,
    pub fee_paid: u64,
    pub seq: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
pub struct SaleFilter {
    pub token_id: Option<TokenId>,
    /// Matches either side of the sale.
    pub account: Option<AccountId>,
}

/// Sales matching `filter`, oldest first.
pub fn sale_history<'a>(state: &'a LedgerState, filter: &SaleFilter) -> Vec<&'a SaleRecord> {
    state
        .sales()
        .iter()
        .filter(|r| filter.token_id.is_none_or(|t| r.token_id == t))
        .filter(|r| {
            filter
                .account
                .as_ref()
                .is_none_or(|a| &r.seller == a || &r.buyer == a)
        })
        .collect()
}

impl LedgerState {
    /// Moves the token into escrow under a new active listing.
    pub(crate) fn list_for_sale(&mut self, caller: &AccountId, token: TokenId, price: u64) -> Result<Outcome, TxError> {
        self.require_account(caller)?;
        self.require_owned(token, caller)?;
        if price == 0 {
            return Err(TxError::InvalidPrice);
        }
        let listing = Listing {
            listing_id: self.next_listing_id,
            token_id: token,
            seller: caller.clone(),
            price,
            status: ListingStatus::Active,
        };
        self.next_listing_id += 1;
        self.set_owner(token, Owner::MarketEscrow);
        self.listings.insert(listing.listing_id, listing.clone());
        Ok(Outcome::Listed(listing))
    }

    pub(crate) fn cancel_listing(&mut self, caller: &AccountId, id: ListingId) -> Result<Outcome, TxError> {
        let listing = self.listings.get(&id).ok_or(TxError::UnknownListing(id))?;
        if &listing.seller != caller {
            return Err(TxError::NotSeller(caller.clone()));
        }
        if listing.status != ListingStatus::Active {
            return Err(TxError::ListingNotActive(id));
        }
        let token = listing.token_id;
        self.set_owner(token, Owner::Account(caller.clone()));
        self.listings.get_mut(&id).expect("checked").status = ListingStatus::Cancelled;
        Ok(Outcome::Cancelled(id))
    }

    /// Buyer pays `price`; the seller receives `price - fee` and the fee
    /// goes to the treasury.
    pub(crate) fn purchase_listing(&mut self, buyer: &AccountId, id: ListingId, seq: u64) -> Result<Outcome, TxError> {
        let available = self.require_account(buyer)?.currency;
        let listing = self.listings.get(&id).ok_or(TxError::UnknownListing(id))?;
        if listing.status != ListingStatus::Active {
            return Err(TxError::ListingNotActive(id));
        }
        if &listing.seller == buyer {
            return Err(TxError::SelfPurchase);
        }
        if available < listing.price {
            return Err(TxError::InsufficientFunds {
                needed: listing.price,
                available,
            });
        }
        let fee = self.params.market_fee(listing.price);
        let proceeds = listing.price - fee;
        let seller_balance = self
            .require_account(&listing.seller)?
            .currency
            .checked_add(proceeds)
            .ok_or(TxError::Overflow)?;
        let treasury = self.treasury.checked_add(fee).ok_or(TxError::Overflow)?;

        let record = SaleRecord {
            listing_id: id,
            token_id: listing.token_id,
            seller: listing.seller.clone(),
            buyer: buyer.clone(),
            price: listing.price,
            fee_paid: fee,
            seq,
        };
        self.account_mut(buyer)?.currency = available - record.price;
        self.account_mut(&record.seller)?.currency = seller_balance;
        self.treasury = treasury;
        self.set_owner(record.token_id, Owner::Account(buyer.clone()));
        self.listings.get_mut(&id).expect("checked").status = ListingStatus::Sold;
        self.sales.push(record.clone());
        Ok(Outcome::Sold(record))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::card::{CombineOp, Rarity, TrigFunction};
    use crate::contracts::testkit::*;
    use crate::ledger::{snapshot_hash, CancelListing, Combine, List, Purchase, Transfer, Tx, UpgradeCard};

    fn list(chain: &mut Chain, caller: &AccountId, token: TokenId, price: u64) -> Result<Outcome, TxError> {
        chain.submit(Tx::List(List {
            caller: caller.clone(),
            token_id: token,
            price,
        }))
    }

    fn buy(chain: &mut Chain, buyer: &AccountId, id: ListingId) -> Result<Outcome, TxError> {
        chain.submit(Tx::Purchase(Purchase {
            buyer: buyer.clone(),
            listing_id: id,
        }))
    }

    fn cancel(chain: &mut Chain, caller: &AccountId, id: ListingId) -> Result<Outcome, TxError> {
        chain.submit(Tx::CancelListing(CancelListing {
            caller: caller.clone(),
            listing_id: id,
        }))
    }

    #[test]
    fn list_escrows_token() {
        let mut chain = Chain::new();
        let alice = chain.account("alice", 0, 0);
        let t = chain.mint(&alice, TrigFunction::SIN, Rarity::Common);
        let Outcome::Listed(l) = list(&mut chain, &alice, t, 500).unwrap() else {
            panic!()
        };
        assert_eq!(l.status, ListingStatus::Active);
        assert_eq!(chain.state.token(t).unwrap().owner, Owner::MarketEscrow);
        assert_eq!(chain.state.cards_of(&alice).count(), 0);
        assert_eq!(list(&mut chain, &alice, t, 500).unwrap_err().machine_code(), "TokenEscrowed");

        let t2 = chain.mint(&alice, TrigFunction::COS, Rarity::Common);
        assert_eq!(list(&mut chain, &alice, t2, 0).unwrap_err(), TxError::InvalidPrice);
    }

    #[test]
    fn escrowed_token_is_frozen() {
        let mut chain = Chain::new();
        let alice = chain.account("alice", 0, 1000);
        let bob = chain.account("bob", 0, 0);
        let t = chain.mint(&alice, TrigFunction::SIN, Rarity::Common);
        let other = chain.mint(&alice, TrigFunction::COS, Rarity::Common);
        list(&mut chain, &alice, t, 10).unwrap();
        let before = snapshot_hash(&chain.state);
        let attempts = [
            Tx::Combine(Combine {
                caller: alice.clone(),
                token_a: t,
                token_b: other,
                op: CombineOp::Multiply,
            }),
            Tx::Transfer(Transfer {
                token_id: t,
                from: alice.clone(),
                to: bob.clone(),
            }),
            Tx::UpgradeCard(UpgradeCard {
                caller: alice.clone(),
                token_id: t,
            }),
        ];
        for tx in attempts {
            assert_eq!(chain.submit(tx).unwrap_err().machine_code(), "TokenEscrowed");
        }
        assert_eq!(snapshot_hash(&chain.state), before);
    }

    #[test]
    fn cancel_rules() {
        let mut chain = Chain::new();
        let alice = chain.account("alice", 0, 0);
        let bob = chain.account("bob", 0, 0);
        let t = chain.mint(&alice, TrigFunction::SIN, Rarity::Common);
        list(&mut chain, &alice, t, 10).unwrap();
        assert_eq!(cancel(&mut chain, &bob, 0).unwrap_err().machine_code(), "NotSeller");
        cancel(&mut chain, &alice, 0).unwrap();
        assert_eq!(chain.state.token(t).unwrap().owner, Owner::Account(alice.clone()));
        assert_eq!(chain.state.listing(0).unwrap().status, ListingStatus::Cancelled);
        assert_eq!(cancel(&mut chain, &alice, 0).unwrap_err().machine_code(), "ListingNotActive");
        assert_eq!(cancel(&mut chain, &alice, 9).unwrap_err().machine_code(), "UnknownListing");
    }

    #[test]
    fn purchase_splits_price() {
        let mut chain = Chain::new();
        let alice = chain.account("alice", 0, 0);
        let bob = chain.account("bob", 5000, 0);
        let t = chain.mint(&alice, TrigFunction::SIN, Rarity::Common);
        list(&mut chain, &alice, t, 1000).unwrap();
        assert_eq!(buy(&mut chain, &alice, 0).unwrap_err(), TxError::SelfPurchase);
        let Outcome::Sold(rec) = buy(&mut chain, &bob, 0).unwrap() else {
            panic!()
        };
        assert_eq!((rec.price, rec.fee_paid), (1000, 20));
        assert_eq!(chain.state.account(&alice).unwrap().currency, 980);
        assert_eq!(chain.state.account(&bob).unwrap().currency, 4000);
        assert_eq!(chain.state.treasury(), 20);
        assert_eq!(chain.state.token(t).unwrap().owner, Owner::Account(bob.clone()));
        assert_eq!(buy(&mut chain, &bob, 0).unwrap_err().machine_code(), "ListingNotActive");

        // floor(1 * 200 / 10000) = 0
        let t2 = chain.mint(&alice, TrigFunction::COS, Rarity::Common);
        list(&mut chain, &alice, t2, 1).unwrap();
        let Outcome::Sold(rec) = buy(&mut chain, &bob, 1).unwrap() else {
            panic!()
        };
        assert_eq!(rec.fee_paid, 0);
        assert_eq!(chain.state.account(&alice).unwrap().currency, 981);
    }

    #[test]
    fn purchase_requires_funds() {
        let mut chain = Chain::new();
        let alice = chain.account("alice", 0, 0);
        let bob = chain.account("bob", 99, 0);
        let t = chain.mint(&alice, TrigFunction::SIN, Rarity::Common);
        list(&mut chain, &alice, t, 100).unwrap();
        let before = snapshot_hash(&chain.state);
        assert_eq!(
            buy(&mut chain, &bob, 0).unwrap_err(),
            TxError::InsufficientFunds { needed: 100, available: 99 }
        );
        assert_eq!(snapshot_hash(&chain.state), before);
    }

    #[test]
    fn history_filters() {
        let mut chain = Chain::new();
        let alice = chain.account("alice", 0, 0);
        let bob = chain.account("bob", 1000, 0);
        let carol = chain.account("carol", 0, 0);
        let t = chain.mint(&alice, TrigFunction::SIN, Rarity::Common);
        let u = chain.mint(&alice, TrigFunction::COS, Rarity::Common);
        list(&mut chain, &alice, t, 10).unwrap();
        list(&mut chain, &alice, u, 10).unwrap();
        buy(&mut chain, &bob, 0).unwrap();
        buy(&mut chain, &bob, 1).unwrap();

        let all = sale_history(&chain.state, &SaleFilter::default());
        assert_eq!(all.len(), 2);
        assert!(all.windows(2).all(|w| w[0].seq < w[1].seq));
        let by_token = sale_history(&chain.state, &SaleFilter { token_id: Some(u), account: None });
        assert_eq!(by_token.len(), 1);
        assert_eq!(by_token[0].token_id, u);
        let by_carol = sale_history(&chain.state, &SaleFilter { token_id: None, account: Some(carol) });
        assert!(by_carol.is_empty());
        let by_bob = sale_history(&chain.state, &SaleFilter { token_id: None, account: Some(bob) });
        assert_eq!(by_bob.len(), 2);
    }
}
