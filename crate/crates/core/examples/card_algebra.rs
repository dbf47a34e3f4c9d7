//! Card algebra: combine monomials, name them, map them to image codes.
//!
//! cargo run --example card_algebra

use nftrig::card::{canonical_key, decode_card, encode_card, CombineOp, Rarity, TrigFunction, Variant};

fn main() {
    let sin = TrigFunction::SIN;
    let cos = TrigFunction::COS;

    let tan = sin.divide(cos).unwrap();
    println!("sin / cos = {}", tan.display_name());
    println!("tan * cos = {}", tan.multiply(cos).unwrap().display_name());
    println!("cot = {}", cos.apply(CombineOp::Divide, sin).unwrap().display_name());

    // exponents stay within -3..=3
    let cube = sin.multiply(sin).unwrap().multiply(sin).unwrap();
    match cube.multiply(sin) {
        Ok(f) => println!("unexpected {f}"),
        Err(e) => println!("{} * sin(x): {e}", cube.display_name()),
    }

    // codes are sin-digit, cos-digit, rarity, variant
    let v3 = Variant::new(3).unwrap();
    let code = encode_card(sin, Rarity::Rare, v3).unwrap();
    println!("sin(x) rare v3 -> {} ({})", code, code.asset_file());
    let (f, r, v) = decode_card("1023").unwrap();
    println!("1023 -> {} {:?} {} variant {}", f.display_name(), r, r.color(), v.index());

    // negative exponents have no image code but still have a key
    println!("tan(x) code: {:?}", encode_card(tan, Rarity::Common, v3).map(|c| c.to_string()));
    println!("tan(x) key: {}", canonical_key(tan, Rarity::Common, v3));

    println!("\nmultiplication table over sin^a cos^b, a,b in 0..=1:");
    let small: Vec<_> = TrigFunction::all()
        .filter(|f| (0..=1).contains(&f.sin_pow()) && (0..=1).contains(&f.cos_pow()))
        .collect();
    for a in &small {
        let row: Vec<String> = small.iter().map(|b| format!("{:>18}", a.multiply(*b).unwrap().display_name())).collect();
        println!("{:>14} | {}", a.display_name(), row.join(""));
    }
}
