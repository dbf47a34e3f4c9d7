//! Trivia economy: answer questions for XP, get paid once per question,
//! spend XP on a pack.
//!
//! cargo run --example trivia_xp

use nftrig::engine::{AnswerRequest, CreateAccountRequest};
use nftrig::ledger::{BuyPack, Outcome};
use nftrig::trivia::QuestionBank;
use nftrig::{AccountId, Engine, EngineConfig, TxRequest};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut engine = Engine::new(EngineConfig::default().genesis()?, QuestionBank::starter());
    let me: AccountId = "student".parse()?;
    engine.submit(TxRequest::CreateAccount(CreateAccountRequest { account: me.clone(), secret: "pw".into() }))?;

    let answer = |engine: &mut Engine, qid: &str, choice: u32| -> Result<Outcome, Box<dyn std::error::Error>> {
        let req = TxRequest::AnswerQuestion(AnswerRequest { account: me.clone(), qid: qid.into(), choice_index: choice });
        Ok(engine.submit(req)?.outcome)
    };

    let first = engine.next_question(&me)?.clone();
    println!("Q [{}] {}", first.qid, first.prompt);
    for (i, c) in first.choices.iter().enumerate() {
        println!("   {i}) {c}");
    }
    let wrong = (first.answer_index as u32 + 1) % first.choices.len() as u32;
    println!("wrong answer  -> {:?}", answer(&mut engine, &first.qid, wrong)?);
    println!("right answer  -> {:?}", answer(&mut engine, &first.qid, first.answer_index as u32)?);
    println!("same again    -> {:?}", answer(&mut engine, &first.qid, first.answer_index as u32)?);

    // keep answering whatever comes next until a pack is affordable
    let price = engine.state().params().pack_price_xp;
    while engine.state().account(&me).unwrap().xp < price {
        let q = engine.next_question(&me)?.clone();
        answer(&mut engine, &q.qid, q.answer_index as u32)?;
    }
    println!("xp {} >= pack price {price}", engine.state().account(&me).unwrap().xp);
    if let Outcome::Minted(cards) = engine.submit(TxRequest::XpBuyPack(BuyPack { caller: me.clone() }))?.outcome {
        let names: Vec<String> = cards.iter().map(|c| c.function.display_name()).collect();
        println!("xp pack: {}", names.join(", "));
    }
    println!("xp left {}", engine.state().account(&me).unwrap().xp);
    Ok(())
}
