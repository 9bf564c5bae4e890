//! Grow every partition of {1, ..., n} into partitions of {1, ..., n+1}
//! by the two product-rule moves: append {n+1} as a new singleton block, or
//! insert n+1 into an existing block. Each next-level partition shows up
//! exactly once, which is what makes the derivative recursion work.
//!
//! Run with: cargo run --example extension_bijection

use std::collections::HashMap;

use fdb::{enumerate_set_partitions, extend_partition, SetPartition};

fn main() {
    let n = 3;
    println!("extending each partition of {{1..{n}}}:\n");
    for p in enumerate_set_partitions(n).unwrap() {
        let extended = extend_partition(&p);
        let as_text: Vec<String> = extended.iter().map(|q| q.to_string()).collect();
        println!("  {:<14} -> {}", p.to_string(), as_text.join("  "));
    }

    for level in 0..=6 {
        let mut seen: HashMap<SetPartition, usize> = HashMap::new();
        for p in enumerate_set_partitions(level).unwrap() {
            for q in extend_partition(&p) {
                *seen.entry(q).or_insert(0) += 1;
            }
        }
        let next: Vec<SetPartition> = enumerate_set_partitions(level + 1).unwrap().collect();
        assert_eq!(seen.len(), next.len());
        assert!(next.iter().all(|q| seen[q] == 1));
        println!(
            "level {level} -> {}: {} partitions, each covered exactly once",
            level + 1,
            next.len()
        );
    }
}
