//! Fixed workloads for the engine benchmarks in `benches/`.

use defmatch::instances::{self, rng};
use defmatch::{DefSet, NiceGraph, SymbolicMatching, Universe};

/// A split k-regular graph on `s` points per side, with half of A matched.
pub fn regular_workload(seed: u64, s: u64, k: usize) -> (NiceGraph, SymbolicMatching) {
    let mut r = rng(seed);
    let g = instances::random_regular_split(&mut r, s, k, 4).expect("regular graph");
    let m = instances::random_matching(&mut r, &g, 0.5).expect("matching");
    (g, m)
}

/// The doubling universe on ℕ with X = ℕ and Y = the even numbers.
pub fn doubling_workload() -> (Universe, DefSet, DefSet) {
    let g = instances::hilbert_hotel();
    let u = g.universe().clone();
    let x = u.whole();
    let y = u.progression(0, 2).expect("evens");
    (u, x, y)
}
