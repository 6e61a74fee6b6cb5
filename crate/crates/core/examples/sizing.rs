use metastab::ladder::{build_aux_chain_mh, enumerate_ladder_trees};
use std::time::Instant;

fn main() {
    for k in [3usize, 6, 8, 10, 11, 12, 13, 14] {
        let t0 = Instant::now();
        let trees = enumerate_ladder_trees(k).unwrap();
        let enum_ms = t0.elapsed().as_millis();
        let t1 = Instant::now();
        let aux = build_aux_chain_mh(k).unwrap();
        let solve_ms = t1.elapsed().as_millis();
        println!(
            "K={k:2} trees={:8} enum={enum_ms:6}ms solve={solve_ms:6}ms cap={:.6e} e0={:.6}  K*e0={:.4}",
            trees.len(),
            aux.capacity,
            aux.e0,
            k as f64 * aux.e0
        );
    }
}
