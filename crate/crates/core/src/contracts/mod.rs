//! Game rules as transitions over [`LedgerState`]: the card contract
//! (combine, packs, upgrades, XP spending) and the marketplace contract
//! (listings, escrow, purchases, sale history).
//!
//! Both read their tunables from the active [`ParamsVersion`], which an
//! administrator can replace at runtime without touching any other state.
//! Every transition validates fully before it mutates anything.

mod cards;
mod market;

use serde::{Deserialize, Serialize};

pub use cards::{preview_combine, CombineOutcomePreview, PreviewOutcome};
pub use market::{sale_history, Listing, ListingStatus, SaleFilter, SaleRecord};

use crate::error::TxError;
use crate::ledger::{hash_excluding_params, require_admin, AccountId, LedgerState, Outcome};
use crate::rarity::{CombineTable, PackSpec};

/// Upper bound on the marketplace fee, in basis points (10%).
pub const MAX_FEE_BASIS_POINTS: u16 = 1000;

/// The replaceable rule set, the "logic contract" behind the proxy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsVersion {
    pub version: u64,
    pub combine_table: CombineTable,
    pub pack_spec: PackSpec,
    pub pack_price_currency: u64,
    pub pack_price_xp: u64,
    pub upgrade_xp_cost_per_level: u64,
    pub market_fee_basis_points: u16,
}

impl Default for ParamsVersion {
    fn default() -> Self {
        ParamsVersion {
            version: 1,
            combine_table: CombineTable::default(),
            pack_spec: PackSpec::default(),
            pack_price_currency: 100,
            pack_price_xp: 100,
            upgrade_xp_cost_per_level: 100,
            market_fee_basis_points: 200,
        }
    }
}

impl ParamsVersion {
    /// Distributions and pack shape are validated when deserialized; this
    /// checks the remaining scalar bounds.
    pub fn validate(&self) -> Result<(), TxError> {
        let bad = |m: &str| Err(TxError::InvalidParams(m.to_owned()));
        if self.version == 0 {
            return bad("version starts at 1");
        }
        if let Err(e) = self.combine_table.validate() {
            return bad(&e.to_string());
        }
        if self.pack_price_currency == 0 || self.pack_price_xp == 0 {
            return bad("pack prices must be positive");
        }
        if self.upgrade_xp_cost_per_level == 0 {
            return bad("upgrade cost must be positive");
        }
        if self.market_fee_basis_points > MAX_FEE_BASIS_POINTS {
            return bad("market fee above 1000 basis points");
        }
        Ok(())
    }

    /// `floor(price * fee_bp / 10000)`.
    pub fn market_fee(&self, price: u64) -> u64 {
        (u128::from(price) * u128::from(self.market_fee_basis_points) / 10_000) as u64
    }
}

impl LedgerState {
    pub(crate) fn upgrade_params(&mut self, caller: &AccountId, params: &ParamsVersion) -> Result<Outcome, TxError> {
        require_admin(caller)?;
        params.validate()?;
        let expected = self.params.version + 1;
        if params.version != expected {
            return Err(TxError::VersionSkew {
                expected,
                got: params.version,
            });
        }
        let untouched = hash_excluding_params(self);
        self.params = params.clone();
        debug_assert_eq!(untouched, hash_excluding_params(self));
        Ok(Outcome::ParamsInstalled(params.version))
    }
}
