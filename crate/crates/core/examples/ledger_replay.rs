//! Event sourcing: apply requests, persist the log, replay it, compare hashes.
//!
//! cargo run --example ledger_replay

use nftrig::engine::CreateAccountRequest;
use nftrig::ledger::{replay, snapshot_hash, BuyPack, Combine, Faucet};
use nftrig::store::{load_state, read_log, StateDir};
use nftrig::trivia::QuestionBank;
use nftrig::{AccountId, CombineOp, Engine, EngineConfig, TokenId, TxRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let genesis = EngineConfig::from_json(r#"{"global_seed": 42}"#)?.genesis()?;
    let mut engine = Engine::new(genesis.clone(), QuestionBank::starter());
    let alice: AccountId = "alice".parse()?;

    let requests = vec![
        TxRequest::CreateAccount(CreateAccountRequest { account: alice.clone(), secret: "pw".into() }),
        TxRequest::BuyPack(BuyPack { caller: alice.clone() }),
        TxRequest::Faucet(Faucet { caller: AccountId::admin(), account: alice.clone(), amount: 250 }),
        TxRequest::BuyPack(BuyPack { caller: alice.clone() }),
        TxRequest::Combine(Combine { caller: alice.clone(), token_a: TokenId(0), token_b: TokenId(1), op: CombineOp::Multiply }),
    ];
    for r in requests {
        let kind = serde_json::to_value(&r)?["kind"].as_str().unwrap_or("?").to_owned();
        match engine.submit(r) {
            Ok(receipt) => println!("seq {:>2}  {kind:<13} ok", receipt.seq),
            Err(e) => println!("        {kind:<13} rejected: {} (no seq used)", e.machine_code()),
        }
    }

    let dir = std::env::temp_dir().join(format!("nftrig-ledger-replay-{}", std::process::id()));
    {
        let mut sd = StateDir::open(&dir)?;
        for ev in engine.log() {
            sd.append(ev)?;
        }
        sd.write_snapshot(engine.state())?;
    }
    println!("\nfirst log line: {}", std::fs::read_to_string(dir.join("txlog.jsonl"))?.lines().next().unwrap_or(""));

    let from_disk = replay(&genesis, &read_log(&dir)?)?;
    let (snapshot, tail) = load_state(&dir, &genesis)?;
    println!("live     {}", engine.hash());
    println!("replayed {}", snapshot_hash(&from_disk));
    println!("snapshot {} (+{} tail events)", snapshot_hash(&snapshot), tail.len());
    assert_eq!(engine.hash(), snapshot_hash(&from_disk));
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
