use metastab::ladder::build_aux_chain_cyclic;
use std::time::Instant;

fn main() {
    for (k, q) in [(6usize, 3u8), (6, 4), (11, 3), (11, 4), (12, 3), (12, 4)] {
        for shift in 1..q {
            let t0 = Instant::now();
            let aux = build_aux_chain_cyclic(k, q, shift).unwrap();
            println!(
                "K={k:2} q={q} shift={shift} |V|={:8} e0bar={:.12} cap={:.6e} capadj={:.6e} relcapdiff={:.2e} |A|={} |B|={} t={}ms",
                aux.states.len(),
                aux.e0_bar,
                aux.capacity,
                aux.adjoint_capacity,
                (aux.capacity - aux.adjoint_capacity).abs() / aux.capacity,
                aux.set_a.len(),
                aux.set_b.len(),
                t0.elapsed().as_millis()
            );
        }
    }
}
