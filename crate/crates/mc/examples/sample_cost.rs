//! Wall time per sample for one lasso of area 1.
//!
//! cargo run --release -p masterfield-mc --example sample_cost -- [N] [samples]

use std::time::Instant;

use masterfield_core::{LassoKey, LassoWord};
use masterfield_mc::{estimate_trace_moments, McConfig};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(128);
    let samples = args.next().unwrap_or(20);
    let key = LassoKey::new(1, 1);
    let word = LassoWord::new(vec![(key, 1)], [(key, 1.0)].into_iter().collect());
    let config = McConfig { n, samples, ..McConfig::default() };
    let start = Instant::now();
    let est = estimate_trace_moments(&word, &[1, 2, 3], &config).unwrap();
    let per_sample = start.elapsed() / samples as u32;
    println!("N={n} threads={}: {per_sample:?} per sample", rayon::current_num_threads());
    for e in est {
        println!("k={} mean={:.6} stderr={:?}", e.k, e.mean, e.stderr);
    }
}
