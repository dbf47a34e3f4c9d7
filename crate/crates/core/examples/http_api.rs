//! The HTTP API in-process: serve on a random port, drive it with raw
//! HTTP/1.1 requests, shut down cleanly.
//!
//! cargo run --example http_api

use std::io::{Read, Write};
use std::net::TcpStream;

use nftrig::api::{ApiOptions, Service};
use nftrig::trivia::QuestionBank;
use nftrig::{Engine, EngineConfig};

fn call(addr: &str, method: &str, path: &str, token: Option<&str>, body: &str) -> String {
    let mut s = TcpStream::connect(addr).unwrap();
    let auth = token.map(|t| format!("Authorization: Bearer {t}\r\n")).unwrap_or_default();
    write!(
        s,
        "{method} {path} HTTP/1.1\r\nHost: x\r\n{auth}Content-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut out = String::new();
    s.read_to_string(&mut out).unwrap();
    let status = out.lines().next().unwrap_or("").to_owned();
    let payload = out.split("\r\n\r\n").nth(1).unwrap_or("").to_owned();
    println!("{method} {path}\n  {status}\n  {}", if payload.len() > 160 { format!("{}...", &payload[..160]) } else { payload.clone() });
    payload
}

fn token(json: &str) -> String {
    serde_json::from_str::<serde_json::Value>(json).unwrap()["token"].as_str().unwrap().to_owned()
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let genesis = EngineConfig::from_json(r#"{"global_seed": 42}"#)?.genesis()?;
    let service = Service::in_memory(
        Engine::new(genesis, QuestionBank::starter()),
        ApiOptions { admin_secret: Some("root".into()), ..ApiOptions::default() },
    );
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?.to_string();
    let router = service.router();
    let server = tokio::spawn(async move { axum::serve(listener, router).await });

    // plain blocking client on its own thread
    let client = tokio::task::spawn_blocking(move || {
        call(&addr, "POST", "/api/accounts", None, r#"{"account":"alice","secret":"pw"}"#);
        call(&addr, "POST", "/api/session/login", None, r#"{"account":"alice","secret":"nope"}"#);
        let alice = token(&call(&addr, "POST", "/api/session/login", None, r#"{"account":"alice","secret":"pw"}"#));
        let root = token(&call(&addr, "POST", "/api/session/login", None, r#"{"account":"admin","secret":"root"}"#));
        call(&addr, "POST", "/api/packs/purchase", Some(&alice), r#"{"pay_with":"currency"}"#);
        call(&addr, "POST", "/api/admin/faucet", Some(&root), r#"{"account":"alice","amount":200}"#);
        call(&addr, "POST", "/api/packs/purchase", Some(&alice), r#"{"pay_with":"currency"}"#);
        call(&addr, "GET", "/api/combine/preview?a=0&b=1&op=multiply", None, "");
        call(&addr, "POST", "/api/combine", Some(&alice), r#"{"token_a":0,"token_b":1,"op":"multiply"}"#);
        call(&addr, "POST", "/api/marketplace/listings", Some(&alice), r#"{"token_id":2,"price":40}"#);
        call(&addr, "GET", "/api/marketplace/listings", None, "");
        call(&addr, "GET", "/api/accounts/alice", None, "");
    });
    client.await?;
    println!("\nlog length {}, hash {}", service.engine().log().len(), service.engine().hash());
    server.abort();
    service.shutdown().await?;
    Ok(())
}
