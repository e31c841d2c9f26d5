//! Prints the terminal rank-pair histogram of random searches.
//!
//! cargo run --release -p peres --example survey -- 3x3 100 [seed]

use std::time::Instant;

use peres::{rank_survey, BipartiteDims, Tolerances};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().collect();
    let dims: BipartiteDims = args.get(1).map(String::as_str).unwrap_or("3x3").parse()?;
    let runs: usize = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seed: u64 = args.get(3).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let start = Instant::now();
    let survey = rank_survey(dims, runs, seed, &Tolerances::default())?;
    for ((n, m), count) in survey.histogram() {
        println!("{dims} ({n},{m}) {count}");
    }
    println!("{runs} runs in {:.2?}", start.elapsed());
    Ok(())
}
