//! Escrowed marketplace: list, fail to touch the escrowed card, buy, read history.
//!
//! cargo run --example marketplace

use nftrig::contracts::{sale_history, SaleFilter};
use nftrig::engine::CreateAccountRequest;
use nftrig::ledger::{BuyPack, Faucet, List, Outcome, Purchase, Transfer};
use nftrig::trivia::QuestionBank;
use nftrig::{AccountId, Engine, EngineConfig, TokenId, TxRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut engine = Engine::new(EngineConfig::from_json(r#"{"global_seed": 7}"#)?.genesis()?, QuestionBank::starter());
    let (alice, bob): (AccountId, AccountId) = ("alice".parse()?, "bob".parse()?);
    for who in [&alice, &bob] {
        engine.submit(TxRequest::CreateAccount(CreateAccountRequest { account: who.clone(), secret: "pw".into() }))?;
        engine.submit(TxRequest::Faucet(Faucet { caller: AccountId::admin(), account: who.clone(), amount: 300 }))?;
    }
    engine.submit(TxRequest::BuyPack(BuyPack { caller: alice.clone() }))?;

    let card = TokenId(0);
    let Outcome::Listed(listing) = engine.submit(TxRequest::List(List { caller: alice.clone(), token_id: card, price: 120 }))?.outcome else {
        unreachable!()
    };
    println!("alice listed {card} as listing {} for {}", listing.listing_id, listing.price);

    let sneaky = engine.submit(TxRequest::Transfer(Transfer { token_id: card, from: alice.clone(), to: bob.clone() }));
    println!("transfer while escrowed: {}", sneaky.unwrap_err().machine_code());
    let own = engine.submit(TxRequest::Purchase(Purchase { buyer: alice.clone(), listing_id: listing.listing_id }));
    println!("alice buying her own listing: {}", own.unwrap_err().machine_code());

    let Outcome::Sold(sale) = engine.submit(TxRequest::Purchase(Purchase { buyer: bob.clone(), listing_id: listing.listing_id }))?.outcome else {
        unreachable!()
    };
    println!("bob bought it: price {} fee {} (treasury now {})", sale.price, sale.fee_paid, engine.state().treasury());
    for who in [&alice, &bob] {
        let a = engine.state().account(who).unwrap();
        println!("  {who}: currency {} cards {}", a.currency, engine.state().cards_of(who).count());
    }
    let history = sale_history(engine.state(), &SaleFilter { token_id: Some(card), account: None });
    println!("history for {card}: {}", serde_json::to_string(&history)?);
    Ok(())
}
