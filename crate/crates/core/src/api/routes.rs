use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tower_http::cors::CorsLayer;

use super::{ApiError, Auth, Body, Query, Shared};
use crate::card::{canonical_key, encode_card, CombineOp, Rarity, TrigFunction, Variant};
use crate::contracts::{preview_combine, sale_history, Listing, ListingStatus, ParamsVersion, SaleFilter};
use crate::engine::{AnswerRequest, CreateAccountRequest, TxRequest};
use crate::ledger::{
    AccountId, BuyPack, CancelListing, Combine, Faucet, List, Outcome, Owner, Purchase, TokenId, TokenRecord,
    UpgradeCard, UpgradeParams,
};

type Shared_ = State<Arc<Shared>>;
type ApiResult<T> = Result<Json<T>, ApiError>;

pub(super) fn router(shared: Arc<Shared>) -> Router {
    Router::new()
        .route("/api/session/login", post(login))
        .route("/api/accounts", post(register))
        .route("/api/accounts/{id}", get(account))
        .route("/api/accounts/{id}/cards", get(account_cards))
        .route("/api/tokens/{token_id}", get(token))
        .route("/api/tokens/{token_id}/upgrade", post(upgrade))
        .route("/api/combine", post(combine))
        .route("/api/combine/preview", get(preview))
        .route("/api/packs/purchase", post(buy_pack))
        .route("/api/marketplace/listings", get(listings).post(create_listing))
        .route("/api/marketplace/listings/{id}/purchase", post(purchase))
        .route("/api/marketplace/listings/{id}/cancel", post(cancel))
        .route("/api/marketplace/history", get(history))
        .route("/api/trivia/next", get(next_question))
        .route("/api/trivia/answer", post(answer))
        .route("/api/params", get(params))
        .route("/api/admin/params", post(install_params))
        .route("/api/admin/faucet", post(faucet))
        .layer(CorsLayer::permissive())
        .with_state(shared)
}

/// A token with everything a card tile needs.
#[derive(Debug, Serialize)]
pub struct TokenView {
    pub token_id: TokenId,
    pub function: TrigFunction,
    pub display_name: String,
    pub rarity: Rarity,
    pub rarity_level: u8,
    pub color: &'static str,
    pub variant: Variant,
    /// Four-digit image code, `null` for negative exponents.
    pub code: Option<String>,
    pub canonical_key: String,
    pub owner: Owner,
    pub minted_at: u64,
}

impl From<&TokenRecord> for TokenView {
    fn from(t: &TokenRecord) -> Self {
        TokenView {
            token_id: t.token_id,
            function: t.function,
            display_name: t.function.display_name(),
            rarity: t.rarity,
            rarity_level: t.rarity.level(),
            color: t.rarity.color(),
            variant: t.variant,
            code: encode_card(t.function, t.rarity, t.variant).ok().map(|c| c.to_string()),
            canonical_key: canonical_key(t.function, t.rarity, t.variant),
            owner: t.owner.clone(),
            minted_at: t.minted_at,
        }
    }
}

fn parse_account(id: &str) -> Result<AccountId, ApiError> {
    AccountId::new(id).map_err(|e| ApiError::malformed(e.to_string()))
}

fn forbid_admin(session: &super::Session) -> Result<(), ApiError> {
    if session.account.is_admin() {
        Err(ApiError::forbidden("the admin session cannot hold cards or currency"))
    } else {
        Ok(())
    }
}

fn require_admin(session: &super::Session) -> Result<(), ApiError> {
    if session.account.is_admin() {
        Ok(())
    } else {
        Err(ApiError::forbidden("admin session required"))
    }
}

fn unexpected(outcome: Outcome) -> ApiError {
    ApiError::new(
        StatusCode::INTERNAL_SERVER_ERROR,
        "Internal",
        format!("unexpected outcome {outcome:?}"),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoginRequest {
    account: String,
    secret: String,
    /// Reserved for signature-based login.
    #[serde(default)]
    #[allow(dead_code)]
    nonce: Option<String>,
}

async fn login(State(s): Shared_, Body(req): Body<LoginRequest>) -> ApiResult<Value> {
    let denied = || ApiError::unauthorized("InvalidCredentials", "unknown account or wrong secret");
    let account = AccountId::new(req.account).map_err(|_| denied())?;
    let ok = if account.is_admin() {
        s.admin_secret.as_deref().is_some_and(|secret| secret == req.secret)
    } else {
        s.engine().verify_credential(&account, &req.secret)
    };
    if !ok {
        return Err(denied());
    }
    let session = s.sessions.issue(account);
    Ok(Json(json!({
        "token": session.token,
        "account": session.account,
        "expires_at": session.expires_at,
    })))
}

async fn register(State(s): Shared_, Body(req): Body<CreateAccountRequest>) -> ApiResult<Value> {
    let account = req.account.clone();
    let receipt = s.submit(TxRequest::CreateAccount(req)).await?;
    Ok(Json(json!({ "seq": receipt.seq, "account": account })))
}

async fn account(State(s): Shared_, Path(id): Path<String>) -> ApiResult<Value> {
    let id = parse_account(&id)?;
    let engine = s.engine();
    let acct = engine
        .state()
        .account(&id)
        .ok_or_else(|| ApiError::not_found("UnknownAccount", format!("unknown account {id}")))?;
    Ok(Json(json!({ "account": acct.id, "currency": acct.currency, "xp": acct.xp })))
}

async fn account_cards(State(s): Shared_, Path(id): Path<String>) -> ApiResult<Vec<TokenView>> {
    let id = parse_account(&id)?;
    let engine = s.engine();
    if engine.state().account(&id).is_none() {
        return Err(ApiError::not_found("UnknownAccount", format!("unknown account {id}")));
    }
    Ok(Json(engine.state().cards_of(&id).map(TokenView::from).collect()))
}

async fn token(State(s): Shared_, Path(id): Path<u64>) -> ApiResult<TokenView> {
    let engine = s.engine();
    engine
        .state()
        .token(TokenId(id))
        .map(|t| Json(TokenView::from(t)))
        .ok_or_else(|| ApiError::not_found("UnknownToken", format!("unknown token {id}")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CombineRequest {
    token_a: TokenId,
    token_b: TokenId,
    op: CombineOp,
}

async fn combine(State(s): Shared_, Auth(session): Auth, Body(req): Body<CombineRequest>) -> ApiResult<Value> {
    let receipt = s
        .submit(TxRequest::Combine(Combine {
            caller: session.account,
            token_a: req.token_a,
            token_b: req.token_b,
            op: req.op,
        }))
        .await?;
    match receipt.outcome {
        Outcome::Combined { minted, .. } => Ok(Json(json!({
            "seq": receipt.seq,
            "new_token": TokenView::from(&minted),
        }))),
        other => Err(unexpected(other)),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PreviewQuery {
    a: u64,
    b: u64,
    op: CombineOp,
}

async fn preview(State(s): Shared_, Query(q): Query<PreviewQuery>) -> ApiResult<Value> {
    let engine = s.engine();
    let preview = preview_combine(engine.state(), TokenId(q.a), TokenId(q.b), q.op)
        .map_err(|e| ApiError::not_found("UnknownToken", e.to_string()))?;
    Ok(Json(serde_json::to_value(preview).expect("serializable")))
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum PayWith {
    Currency,
    Xp,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PackRequest {
    pay_with: PayWith,
}

async fn buy_pack(State(s): Shared_, Auth(session): Auth, Body(req): Body<PackRequest>) -> ApiResult<Value> {
    let caller = BuyPack {
        caller: session.account,
    };
    let request = match req.pay_with {
        PayWith::Currency => TxRequest::BuyPack(caller),
        PayWith::Xp => TxRequest::XpBuyPack(caller),
    };
    let receipt = s.submit(request).await?;
    match receipt.outcome {
        Outcome::Minted(tokens) => Ok(Json(json!({
            "seq": receipt.seq,
            "tokens": tokens.iter().map(TokenView::from).collect::<Vec<_>>(),
        }))),
        other => Err(unexpected(other)),
    }
}

async fn upgrade(State(s): Shared_, Auth(session): Auth, Path(id): Path<u64>) -> ApiResult<Value> {
    let receipt = s
        .submit(TxRequest::UpgradeCard(UpgradeCard {
            caller: session.account,
            token_id: TokenId(id),
        }))
        .await?;
    match receipt.outcome {
        Outcome::Upgraded { minted, .. } => Ok(Json(json!({
            "seq": receipt.seq,
            "new_token": TokenView::from(&minted),
        }))),
        other => Err(unexpected(other)),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ListingsQuery {
    #[serde(default)]
    status: Option<String>,
}

#[derive(Serialize)]
struct ListingView<'a> {
    #[serde(flatten)]
    listing: &'a Listing,
    /// `null` once the token has been burned after a sale.
    card: Option<TokenView>,
}

async fn listings(State(s): Shared_, Query(q): Query<ListingsQuery>) -> ApiResult<Value> {
    let wanted = match q.status.as_deref().unwrap_or("active") {
        "active" => Some(ListingStatus::Active),
        "sold" => Some(ListingStatus::Sold),
        "cancelled" => Some(ListingStatus::Cancelled),
        "all" => None,
        other => return Err(ApiError::malformed(format!("unknown status {other:?}"))),
    };
    let engine = s.engine();
    let state = engine.state();
    let views: Vec<ListingView> = state
        .listings()
        .values()
        .filter(|l| wanted.is_none_or(|w| l.status == w))
        .map(|l| ListingView {
            listing: l,
            card: state.token(l.token_id).map(TokenView::from),
        })
        .collect();
    Ok(Json(serde_json::to_value(views).expect("serializable")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ListRequest {
    token_id: TokenId,
    price: u64,
}

async fn create_listing(State(s): Shared_, Auth(session): Auth, Body(req): Body<ListRequest>) -> ApiResult<Value> {
    let receipt = s
        .submit(TxRequest::List(List {
            caller: session.account,
            token_id: req.token_id,
            price: req.price,
        }))
        .await?;
    match receipt.outcome {
        Outcome::Listed(l) => Ok(Json(json!({ "seq": receipt.seq, "listing_id": l.listing_id }))),
        other => Err(unexpected(other)),
    }
}

async fn purchase(State(s): Shared_, Auth(session): Auth, Path(id): Path<u64>) -> ApiResult<Value> {
    forbid_admin(&session)?;
    let receipt = s
        .submit(TxRequest::Purchase(Purchase {
            buyer: session.account,
            listing_id: id,
        }))
        .await?;
    match receipt.outcome {
        Outcome::Sold(record) => Ok(Json(json!({ "seq": receipt.seq, "sale_record": record }))),
        other => Err(unexpected(other)),
    }
}

async fn cancel(State(s): Shared_, Auth(session): Auth, Path(id): Path<u64>) -> ApiResult<Value> {
    let receipt = s
        .submit(TxRequest::CancelListing(CancelListing {
            caller: session.account,
            listing_id: id,
        }))
        .await?;
    Ok(Json(json!({ "seq": receipt.seq })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HistoryQuery {
    #[serde(default)]
    token_id: Option<u64>,
    #[serde(default)]
    account: Option<String>,
}

async fn history(State(s): Shared_, Query(q): Query<HistoryQuery>) -> ApiResult<Value> {
    let filter = SaleFilter {
        token_id: q.token_id.map(TokenId),
        account: q.account.as_deref().map(parse_account).transpose()?,
    };
    let engine = s.engine();
    let records = sale_history(engine.state(), &filter);
    Ok(Json(serde_json::to_value(records).expect("serializable")))
}

async fn next_question(State(s): Shared_, Auth(session): Auth) -> ApiResult<Value> {
    forbid_admin(&session)?;
    let engine = s.engine();
    let q = engine
        .next_question(&session.account)
        .map_err(|e| ApiError::from(crate::engine::EngineError::from(e)))?;
    Ok(Json(serde_json::to_value(q.public()).expect("serializable")))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerBody {
    qid: String,
    choice_index: u32,
}

async fn answer(State(s): Shared_, Auth(session): Auth, Body(req): Body<AnswerBody>) -> ApiResult<Value> {
    let receipt = s
        .submit(TxRequest::AnswerQuestion(AnswerRequest {
            account: session.account,
            qid: req.qid,
            choice_index: req.choice_index,
        }))
        .await?;
    match receipt.outcome {
        Outcome::Answered {
            correct,
            xp_awarded,
            new_xp,
        } => Ok(Json(json!({
            "seq": receipt.seq,
            "correct": correct,
            "xp_awarded": xp_awarded,
            "new_xp": new_xp,
        }))),
        other => Err(unexpected(other)),
    }
}

async fn params(State(s): Shared_) -> ApiResult<ParamsVersion> {
    Ok(Json(s.engine().state().params().clone()))
}

async fn install_params(State(s): Shared_, Auth(session): Auth, Body(params): Body<ParamsVersion>) -> ApiResult<Value> {
    require_admin(&session)?;
    let receipt = s
        .submit(TxRequest::UpgradeParams(UpgradeParams {
            caller: session.account,
            params,
        }))
        .await?;
    match receipt.outcome {
        Outcome::ParamsInstalled(version) => Ok(Json(json!({ "seq": receipt.seq, "version": version }))),
        other => Err(unexpected(other)),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FaucetRequest {
    account: AccountId,
    amount: u64,
}

async fn faucet(State(s): Shared_, Auth(session): Auth, Body(req): Body<FaucetRequest>) -> ApiResult<Value> {
    require_admin(&session)?;
    let receipt = s
        .submit(TxRequest::Faucet(Faucet {
            caller: session.account,
            account: req.account,
            amount: req.amount,
        }))
        .await?;
    Ok(Json(json!({ "seq": receipt.seq })))
}
