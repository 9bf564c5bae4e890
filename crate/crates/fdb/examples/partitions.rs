//! Enumerate the set partitions of {1, ..., n} and cross-check the count
//! against the Bell-triangle recurrence.
//!
//! Run with: cargo run --example partitions [n]

use fdb::{bell_number, block_profile, enumerate_set_partitions};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("n must be a small nonnegative integer"))
        .unwrap_or(4);

    println!("partitions of {{1..{n}}}, in lexicographic rgs order:\n");
    let mut count = 0usize;
    for p in enumerate_set_partitions(n).expect("n is under the cap") {
        count += 1;
        println!(
            "  {:<24} rgs={:?}  blocks={}  profile={}",
            p.to_string(),
            p.rgs(),
            p.block_count(),
            block_profile(&p),
        );
    }
    let bell = bell_number(n);
    println!("\ncount = {count}, Bell({n}) = {bell}");
    assert_eq!(bell.to_string(), count.to_string());

    println!("\nBell numbers up to 14:");
    for m in 0..=14 {
        println!("  Bell({m:>2}) = {}", bell_number(m));
    }
}
