//! Versioned parameters: the admin installs v2 with a richer combine table.
//! Existing cards and balances are untouched; later combines use the new odds.
//!
//! cargo run --example params_upgrade

use nftrig::engine::CreateAccountRequest;
use nftrig::ledger::{hash_excluding_params, Mint, Outcome, UpgradeParams};
use nftrig::rarity::{CombineTable, RarityDistribution};
use nftrig::trivia::QuestionBank;
use nftrig::{AccountId, CombineOp, Engine, EngineConfig, Rarity, TrigFunction, Tx, TxRequest, Variant};

fn legendary_rate(engine: &mut Engine, who: &AccountId, n: usize) -> f64 {
    let mut hits = 0;
    for _ in 0..n {
        let a = engine.state().next_token_id();
        for _ in 0..2 {
            engine
                .submit_tx(Tx::Mint(Mint {
                    caller: AccountId::admin(),
                    owner: who.clone(),
                    function: TrigFunction::COS,
                    rarity: Rarity::Common,
                    variant: Variant::new(0).unwrap(),
                }))
                .unwrap();
        }
        let combine = nftrig::ledger::Combine { caller: who.clone(), token_a: a, token_b: nftrig::TokenId(a.0 + 1), op: CombineOp::Multiply };
        if let Outcome::Combined { minted, .. } = engine.submit_tx(Tx::Combine(combine)).unwrap().outcome {
            hits += usize::from(minted.rarity == Rarity::Legendary);
        }
    }
    hits as f64 / n as f64
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut engine = Engine::new(EngineConfig::default().genesis()?, QuestionBank::starter());
    let who: AccountId = "collector".parse()?;
    engine.submit(TxRequest::CreateAccount(CreateAccountRequest { account: who.clone(), secret: "pw".into() }))?;

    println!("v1 legendary rate from two commons: {:.3}", legendary_rate(&mut engine, &who, 5_000));
    let before = hash_excluding_params(engine.state());

    let mut v2 = engine.state().params().clone();
    v2.version = 2;
    let row = |p| RarityDistribution::new(p).unwrap();
    v2.combine_table = CombineTable::ByMax([
        row([0.40, 0.30, 0.20, 0.10]),
        row([0.05, 0.55, 0.25, 0.15]),
        row([0.00, 0.10, 0.60, 0.30]),
        row([0.00, 0.00, 0.20, 0.80]),
    ]);

    let skew = {
        let mut p = v2.clone();
        p.version = 5;
        engine.submit(TxRequest::UpgradeParams(UpgradeParams { caller: AccountId::admin(), params: p }))
    };
    println!("installing v5 over v1: {}", skew.unwrap_err().machine_code());
    let stranger = engine.submit(TxRequest::UpgradeParams(UpgradeParams { caller: who.clone(), params: v2.clone() }));
    println!("non-admin install: {}", stranger.unwrap_err().machine_code());

    engine.submit(TxRequest::UpgradeParams(UpgradeParams { caller: AccountId::admin(), params: v2 }))?;
    println!("params now v{}", engine.state().params().version);
    println!("state outside params unchanged: {}", hash_excluding_params(engine.state()) == before);
    println!("v2 legendary rate from two commons: {:.3}", legendary_rate(&mut engine, &who, 5_000));
    Ok(())
}
