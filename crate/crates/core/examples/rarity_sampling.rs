//! Seeded rarity sampling: raw SplitMix64 output, table rows, a pack roll.
//!
//! cargo run --release --example rarity_sampling [draws]

use nftrig::rarity::{roll_pack, CombineTable, PackSpec, RngStream};
use nftrig::Rarity;

fn main() {
    let draws: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200_000);

    let mut s = RngStream::from_seed(0);
    let first: Vec<String> = (0..3).map(|_| format!("{:016X}", s.next_u64())).collect();
    println!("seed 0: {} ...", first.join(" "));

    let table = CombineTable::default();
    println!("\n{draws} draws per row (observed vs table):");
    for (i, r) in Rarity::ALL.into_iter().enumerate() {
        let row = table.distribution(r, Rarity::Common);
        let mut stream = RngStream::from_seed(1000 + i as u64);
        let mut counts = [0usize; 4];
        for _ in 0..draws {
            counts[usize::from(row.sample(&mut stream).level())] += 1;
        }
        let cells: Vec<String> = Rarity::ALL
            .iter()
            .map(|x| {
                let lvl = usize::from(x.level());
                format!("{:.3}/{:.2}", counts[lvl] as f64 / draws as f64, row.probabilities()[lvl])
            })
            .collect();
        println!("  max input {:<9} {}", format!("{r:?}"), cells.join("  "));
    }

    // the stream a BuyPack at seq 2 would get under seed 42
    let pack = roll_pack(&PackSpec::default(), &mut RngStream::for_tx(42, 2));
    println!("\npack for seed 42, seq 2:");
    for card in pack {
        println!("  {:<16} {:<9} variant {}", card.function.display_name(), format!("{:?}", card.rarity), card.variant.index());
    }
}
