//! Card identity: trig monomials `sin^a(x)·cos^b(x)`, their multiplication and
//! division, the four-digit image code and human-readable names.
//!
//! A card's mathematical identity is a [`TrigFunction`], a signed exponent
//! pair. Multiplying cards adds exponents, dividing subtracts them, so
//! `sin ÷ cos = tan` falls out as `(1, 0) - (0, 1) = (1, -1)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest absolute exponent a card may carry.
pub const MAX_POW: i8 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CardError {
    #[error("exponent out of range: sin^{sin_pow} cos^{cos_pow} (allowed -{MAX_POW}..={MAX_POW})")]
    ExponentOutOfRange { sin_pow: i32, cos_pow: i32 },
    #[error("card with negative exponent has no four-digit code")]
    NotEncodable,
    #[error("malformed card code {0:?}")]
    MalformedCode(String),
    #[error("rarity level {0} out of range")]
    BadRarity(u8),
    #[error("variant {0} out of range")]
    BadVariant(u8),
}

/// The monomial `sin^sin_pow(x) · cos^cos_pow(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawFunction")]
pub struct TrigFunction {
    sin_pow: i8,
    cos_pow: i8,
}

#[derive(Deserialize)]
struct RawFunction {
    sin_pow: i32,
    cos_pow: i32,
}

impl TryFrom<RawFunction> for TrigFunction {
    type Error = CardError;

    fn try_from(raw: RawFunction) -> Result<Self, Self::Error> {
        TrigFunction::checked(raw.sin_pow, raw.cos_pow)
    }
}

impl TrigFunction {
    pub const ONE: TrigFunction = TrigFunction { sin_pow: 0, cos_pow: 0 };
    pub const SIN: TrigFunction = TrigFunction { sin_pow: 1, cos_pow: 0 };
    pub const COS: TrigFunction = TrigFunction { sin_pow: 0, cos_pow: 1 };
    pub const TAN: TrigFunction = TrigFunction { sin_pow: 1, cos_pow: -1 };
    pub const COT: TrigFunction = TrigFunction { sin_pow: -1, cos_pow: 1 };

    pub fn new(sin_pow: i8, cos_pow: i8) -> Result<Self, CardError> {
        Self::checked(sin_pow.into(), cos_pow.into())
    }

    fn checked(sin_pow: i32, cos_pow: i32) -> Result<Self, CardError> {
        let range = -i32::from(MAX_POW)..=i32::from(MAX_POW);
        if range.contains(&sin_pow) && range.contains(&cos_pow) {
            Ok(TrigFunction {
                sin_pow: sin_pow as i8,
                cos_pow: cos_pow as i8,
            })
        } else {
            Err(CardError::ExponentOutOfRange { sin_pow, cos_pow })
        }
    }

    pub fn sin_pow(self) -> i8 {
        self.sin_pow
    }

    pub fn cos_pow(self) -> i8 {
        self.cos_pow
    }

    pub fn multiply(self, other: TrigFunction) -> Result<TrigFunction, CardError> {
        Self::checked(
            i32::from(self.sin_pow) + i32::from(other.sin_pow),
            i32::from(self.cos_pow) + i32::from(other.cos_pow),
        )
    }

    pub fn divide(self, other: TrigFunction) -> Result<TrigFunction, CardError> {
        Self::checked(
            i32::from(self.sin_pow) - i32::from(other.sin_pow),
            i32::from(self.cos_pow) - i32::from(other.cos_pow),
        )
    }

    pub fn apply(self, op: CombineOp, other: TrigFunction) -> Result<TrigFunction, CardError> {
        match op {
            CombineOp::Multiply => self.multiply(other),
            CombineOp::Divide => self.divide(other),
        }
    }

    /// Every function the algebra can represent, in lexicographic order.
    pub fn all() -> impl Iterator<Item = TrigFunction> {
        (-MAX_POW..=MAX_POW).flat_map(|s| {
            (-MAX_POW..=MAX_POW).map(move |c| TrigFunction {
                sin_pow: s,
                cos_pow: c,
            })
        })
    }

    /// `sin(x)`, `tan(x)`, `sin^2(x)cos(x)`, `csc(x)sec^2(x)`, ...
    pub fn display_name(self) -> String {
        match (self.sin_pow, self.cos_pow) {
            (0, 0) => return "1".to_owned(),
            (1, -1) => return "tan(x)".to_owned(),
            (-1, 1) => return "cot(x)".to_owned(),
            _ => {}
        }
        let mut name = String::new();
        push_factor(&mut name, self.sin_pow, "sin", "csc");
        push_factor(&mut name, self.cos_pow, "cos", "sec");
        name
    }
}

fn push_factor(out: &mut String, pow: i8, positive: &str, reciprocal: &str) {
    let base = match pow.signum() {
        0 => return,
        1 => positive,
        _ => reciprocal,
    };
    match pow.unsigned_abs() {
        1 => out.push_str(&format!("{base}(x)")),
        n => out.push_str(&format!("{base}^{n}(x)")),
    }
}

impl fmt::Display for TrigFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineOp {
    Multiply,
    Divide,
}

impl std::str::FromStr for CombineOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multiply" | "mul" | "*" => Ok(CombineOp::Multiply),
            "divide" | "div" | "/" => Ok(CombineOp::Divide),
            other => Err(format!("unknown combine op {other:?}")),
        }
    }
}

/// Card tier. Ordered, with a fixed colour per tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rarity {
    Common = 0,
    Uncommon = 1,
    Rare = 2,
    Legendary = 3,
}

impl Rarity {
    pub const ALL: [Rarity; 4] = [
        Rarity::Common,
        Rarity::Uncommon,
        Rarity::Rare,
        Rarity::Legendary,
    ];

    pub fn level(self) -> u8 {
        self as u8
    }

    pub fn from_level(level: u8) -> Result<Rarity, CardError> {
        Rarity::ALL
            .get(usize::from(level))
            .copied()
            .ok_or(CardError::BadRarity(level))
    }

    pub fn color(self) -> &'static str {
        match self {
            Rarity::Common => "green",
            Rarity::Uncommon => "blue",
            Rarity::Rare => "purple",
            Rarity::Legendary => "red",
        }
    }

    pub fn next(self) -> Option<Rarity> {
        Rarity::from_level(self.level() + 1).ok()
    }
}

/// Text variant of a card face, 0..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Variant(u8);

impl Variant {
    pub const COUNT: u8 = 4;

    pub fn new(index: u8) -> Result<Variant, CardError> {
        if index < Self::COUNT {
            Ok(Variant(index))
        } else {
            Err(CardError::BadVariant(index))
        }
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = Variant> {
        (0..Self::COUNT).map(Variant)
    }
}

impl TryFrom<u8> for Variant {
    type Error = CardError;

    fn try_from(index: u8) -> Result<Self, Self::Error> {
        Variant::new(index)
    }
}

impl From<Variant> for u8 {
    fn from(v: Variant) -> u8 {
        v.0
    }
}

/// The digit-level content of a card code. Exponent digits span 0..=9, wider
/// than the algebra's range, so every four-digit asset name is representable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardFace {
    pub sin_digit: u8,
    pub cos_digit: u8,
    pub rarity: Rarity,
    pub variant: Variant,
}

/// Four-digit card code `⟨sin⟩⟨cos⟩⟨rarity⟩⟨variant⟩`, e.g. `1023`.
/// Doubles as the image asset basename (`1023.jpg`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct CardCode(String);

impl CardCode {
    pub fn from_face(face: CardFace) -> Result<CardCode, CardError> {
        if face.sin_digit > 9 || face.cos_digit > 9 {
            return Err(CardError::NotEncodable);
        }
        Ok(CardCode(format!(
            "{}{}{}{}",
            face.sin_digit,
            face.cos_digit,
            face.rarity.level(),
            face.variant.index()
        )))
    }

    pub fn parse(code: &str) -> Result<CardCode, CardError> {
        let malformed = || CardError::MalformedCode(code.to_owned());
        let digits: Vec<u8> = code
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(malformed)?;
        if digits.len() != 4 || digits[2] > 3 || digits[3] > 3 {
            return Err(malformed());
        }
        Ok(CardCode(code.to_owned()))
    }

    pub fn face(&self) -> CardFace {
        let d: Vec<u8> = self.0.bytes().map(|b| b - b'0').collect();
        CardFace {
            sin_digit: d[0],
            cos_digit: d[1],
            rarity: Rarity::from_level(d[2]).expect("validated on construction"),
            variant: Variant(d[3]),
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn asset_file(&self) -> String {
        format!("{}.jpg", self.0)
    }
}

impl fmt::Display for CardCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn encode_card(f: TrigFunction, rarity: Rarity, variant: Variant) -> Result<CardCode, CardError> {
    if f.sin_pow < 0 || f.cos_pow < 0 {
        return Err(CardError::NotEncodable);
    }
    CardCode::from_face(CardFace {
        sin_digit: f.sin_pow as u8,
        cos_digit: f.cos_pow as u8,
        rarity,
        variant,
    })
}

/// Decodes a card code into a playable card. Codes whose exponent digits
/// exceed the algebra range parse as a [`CardFace`] but are rejected here.
pub fn decode_card(code: &str) -> Result<(TrigFunction, Rarity, Variant), CardError> {
    let face = CardCode::parse(code)?.face();
    let f = TrigFunction::checked(face.sin_digit.into(), face.cos_digit.into())?;
    Ok((f, face.rarity, face.variant))
}

/// Injective key over the full signed domain, e.g. `s1c-1r3v1`.
pub fn canonical_key(f: TrigFunction, rarity: Rarity, variant: Variant) -> String {
    format!(
        "s{}c{}r{}v{}",
        f.sin_pow,
        f.cos_pow,
        rarity.level(),
        variant.index()
    )
}

/// Pack-mintable starter set: exponents in {0,1,2}², minus the constant 1.
pub fn base_catalog() -> Vec<TrigFunction> {
    (0..=2)
        .flat_map(|s| (0..=2).map(move |c| TrigFunction { sin_pow: s, cos_pow: c }))
        .filter(|f| *f != TrigFunction::ONE)
        .collect()
}
