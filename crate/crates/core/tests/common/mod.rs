#![allow(dead_code)]

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use tower::ServiceExt;

use nftrig::api::{ApiOptions, Service, DEFAULT_TTL};
use nftrig::trivia::QuestionBank;
use nftrig::{Engine, Genesis, ParamsVersion};

pub const ADMIN_SECRET: &str = "root-secret";

pub fn genesis(seed: u64) -> Genesis {
    Genesis {
        global_seed: seed,
        params: ParamsVersion::default(),
    }
}

pub fn service_with_ttl(ttl: std::time::Duration) -> Service {
    Service::in_memory(
        Engine::new(genesis(42), QuestionBank::starter()),
        ApiOptions {
            admin_secret: Some(ADMIN_SECRET.into()),
            session_ttl: ttl,
        },
    )
}

pub fn service() -> Service {
    service_with_ttl(DEFAULT_TTL)
}

pub async fn call(router: &Router, method: &str, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string()))
            .unwrap(),
        None => req.body(Body::empty()).unwrap(),
    };
    let resp = router.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let json = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into()))
    };
    (status, json)
}

pub async fn get(router: &Router, uri: &str, token: Option<&str>) -> (StatusCode, Value) {
    call(router, "GET", uri, token, None).await
}

pub async fn post(router: &Router, uri: &str, token: Option<&str>, body: Value) -> (StatusCode, Value) {
    call(router, "POST", uri, token, Some(body)).await
}

/// Registers `name` (secret = name) and returns a session token.
pub async fn signup(router: &Router, name: &str) -> String {
    let (s, _) = post(router, "/api/accounts", None, serde_json::json!({"account": name, "secret": name})).await;
    assert_eq!(s, StatusCode::OK, "register {name}");
    login(router, name, name).await
}

pub async fn login(router: &Router, name: &str, secret: &str) -> String {
    let (s, body) = post(
        router,
        "/api/session/login",
        None,
        serde_json::json!({"account": name, "secret": secret}),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "login {name}: {body}");
    body["token"].as_str().unwrap().to_owned()
}

pub async fn admin(router: &Router) -> String {
    login(router, "admin", ADMIN_SECRET).await
}

pub async fn fund(router: &Router, admin: &str, name: &str, amount: u64) {
    let (s, body) = post(
        router,
        "/api/admin/faucet",
        Some(admin),
        serde_json::json!({"account": name, "amount": amount}),
    )
    .await;
    assert_eq!(s, StatusCode::OK, "{body}");
}
pub mod scenario;
