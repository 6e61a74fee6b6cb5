use metastab::dynamics::{outgoing_rates, DynamicsSpec};
use metastab::ladder::{classify_flips, realize, Ladder, StripAxis};
use metastab::lattice::{hamiltonian, LatticeDims};
use metastab::taxonomy::{Located, Taxonomy};
use metastab::testfn::TestFunction;

fn main() {
    let dims = LatticeDims::new(11, 12).unwrap();
    let tf = TestFunction::build(dims, DynamicsSpec::cyclic(3), vec![1], vec![2]).unwrap();
    let tax = Taxonomy::new(&tf);
    let gamma = tf.gamma();
    let beta = 1.0;
    let ladder = Ladder::new(11).unwrap();
    let (s, t) = (1u8, 3u8);
    let aux = &tf.cyc_aux[&2u8];
    let trees: Vec<u32> = aux.states.iter().filter_map(|st| match st {
        metastab::ladder::CyclicAuxState::Tree(m) => Some(*m), _ => None }).collect();
    let mut worst = (0.0f64, 0u32, 0usize);
    for &mask in &trees {
        let classes = classify_flips(&ladder, mask);
        for nb in classes.tree_neighbors {
            if nb > mask || nb.count_ones() == 1 { continue; }
            let vertex = (mask ^ nb).trailing_zeros() as usize;
            let (kk, level) = ladder.coords(vertex);
            let site = dims.index(kk, level);
            let cfg = realize(mask, 11, dims, 3, s, t, 0, StripAxis::Rows);
            let mut cur = cfg;
            for _ in 0..2 {
                cur = cur.rotate(site);
                if cur.get(site) == s || cur.get(site) == t { continue; }
                let h_own = hamiltonian(&cur) as f64;
                let own = match tax.value(&cur, false) { Located::Value(x) => x, _ => { println!("int unvalued mask={mask:022b} v={vertex}"); continue } };
                let mu = (-beta * h_own).exp();
                let mut acc = 0.0; let mut scale: f64 = 0.0;
                for term in outgoing_rates(&cur, &tf.spec) {
                    if h_own + term.exponent > gamma + 1e-9 { continue; }
                    let target = term.apply(&cur);
                    match tax.value(&target, false) {
                        Located::Value(v) => { acc += mu * term.rate(beta) * (own - v); scale = scale.max(mu*term.rate(beta)); }
                        Located::OutsideDomain => {}
                        Located::Unknown => println!("int UNKNOWN-target mask={mask:022b} v={vertex}"),
                    }
                }
                let rel = if scale > 0.0 { acc.abs()/scale } else { 0.0 };
                if rel > worst.0 { worst = (rel, mask, vertex); }
            }
        }
    }
    println!("worst int: rel={:.4e} mask={:022b} vertex={}", worst.0, worst.1, worst.2);
    let (mask, vertex) = (worst.1, worst.2);
    let (kk, level) = ladder.coords(vertex);
    let site = dims.index(kk, level);
    let mut cur = realize(mask, 11, dims, 3, s, t, 0, StripAxis::Rows).rotate(site);
    if cur.get(site) == t { cur = cur.rotate(site); }
    println!("int spin at site: {}", cur.get(site));
    let own = match tax.value(&cur, false) { Located::Value(x) => x, _ => panic!() };
    let h_own = hamiltonian(&cur) as f64;
    println!("own={own:.8} H={h_own}");
    let mu = (-beta*h_own).exp();
    for term in outgoing_rates(&cur, &tf.spec) {
        if h_own + term.exponent > gamma + 1e-9 { continue; }
        let target = term.apply(&cur);
        let (x, y) = dims.coords(term.site);
        if let Located::Value(v) = tax.value(&target, false) {
            let tv = mu * term.rate(beta) * (own - v);
            if tv.abs() > 0.0 {
                println!("  ({x},{y}) {}->{} exp={} tgt={v:.8} term={:+.3e}", cur.get(term.site), term.new_spin, term.exponent, tv);
            }
        }
    }
}
