use metastab::dynamics::{outgoing_rates, DynamicsSpec};
use metastab::ladder::{classify_flips, realize, CyclicAuxState, Ladder, StripAxis};
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
    let (s, t) = (1u8, 2u8);
    let shift = 1u8;
    let aux = &tf.cyc_aux[&shift];
    let in_a: std::collections::HashSet<usize> = aux.set_a.iter().copied().collect();
    let in_b: std::collections::HashSet<usize> = aux.set_b.iter().copied().collect();
    let mut worst = (0.0f64, 0u32, false);
    for (i, &state) in aux.states.iter().enumerate() {
        let CyclicAuxState::Tree(mask) = state else { continue };
        if in_a.contains(&i) || in_b.contains(&i) { continue }
        let cfg = realize(mask, 11, dims, 3, s, t, 0, StripAxis::Rows);
        let h_own = hamiltonian(&cfg) as f64;
        let own = match tax.value(&cfg, false) { Located::Value(x) => x, _ => { println!("tree {mask:#b} unvalued"); continue } };
        let mu = (-beta * h_own).exp();
        let mut acc = 0.0; let mut scale: f64 = 0.0;
        for term in outgoing_rates(&cfg, &tf.spec) {
            if h_own + term.exponent > gamma + 1e-9 { continue; }
            let target = term.apply(&cfg);
            match tax.value(&target, false) {
                Located::Value(v) => { acc += mu * term.rate(beta) * (own - v); scale = scale.max(mu * term.rate(beta)); }
                Located::OutsideDomain => {}
                Located::Unknown => println!("tree {mask:032b}: UNKNOWN target"),
            }
        }
        let rel = if scale > 0.0 { acc.abs()/scale } else { 0.0 };
        if rel > worst.0 { worst = (rel, mask, false); }
    }
    println!("worst tree: rel={:.4e} mask={:022b}", worst.0, worst.1);
    // dump its terms
    let mask = worst.1;
    let cfg = realize(mask, 11, dims, 3, s, t, 0, StripAxis::Rows);
    let own = match tax.value(&cfg, false) { Located::Value(x) => x, _ => panic!() };
    let h_own = hamiltonian(&cfg) as f64;
    let classes = classify_flips(&ladder, mask);
    println!("own={own:.8} H={h_own} ground_adj={} iso={} xi={}", classes.ground_adjacent, classes.isolated_b_sites, classes.xi_adjacent);
    let mu = (-beta * h_own).exp();
    for term in outgoing_rates(&cfg, &tf.spec) {
        if h_own + term.exponent > gamma + 1e-9 { continue; }
        let target = term.apply(&cfg);
        let (x, y) = dims.coords(term.site);
        if let Located::Value(v) = tax.value(&target, false) {
            let tv = mu * term.rate(beta) * (own - v);
            if tv.abs() > 1e-16 * mu {
                println!("  ({x},{y}) {}->{} exp={} tgt={v:.8} term={:+.3e}", cfg.get(term.site), term.new_spin, term.exponent, tv);
            }
        }
    }
}
