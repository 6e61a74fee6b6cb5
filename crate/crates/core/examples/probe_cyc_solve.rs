use metastab::dynamics::{outgoing_rates, DynamicsSpec};
use metastab::fullspace::build_chain;
use metastab::lattice::{LatticeDims, SpinConfig};

fn main() {
    let dims = LatticeDims::new(3, 3).unwrap();
    let spec = DynamicsSpec::cyclic(3);
    let beta = 4.0;
    let chain = build_chain(dims, 3, &spec, beta, 1 << 24).unwrap();
    let one = SpinConfig::monochromatic(dims, 3, 1).encode() as usize;
    let two = SpinConfig::monochromatic(dims, 3, 2).encode() as usize;
    println!("built chain n={} one={one} two={two}", chain.len());
    // check rates reaching state one
    let mut inflow = 0usize;
    for i in 0..chain.len() {
        for e in chain.edges(i) {
            if e.to as usize == one { inflow += 1; }
        }
    }
    println!("edges into ground 1: {inflow}");
    // min/max exponent
    let mut mn = f64::INFINITY; let mut mx = f64::NEG_INFINITY;
    for i in 0..chain.len() {
        for e in chain.edges(i) {
            mn = mn.min(e.exponent); mx = mx.max(e.exponent);
        }
    }
    println!("exponent range {mn}..{mx}, rate range e^{:.0}..e^{:.0}", -beta*mx, -beta*mn);
    // count states with tiny total rate
    let mut zero_diag = 0;
    for i in 0..chain.len() {
        let tot: f64 = chain.edges(i).iter().map(|e| e.prefactor * (-beta*(e.exponent-mn)).exp()).sum();
        if tot == 0.0 { zero_diag += 1; }
    }
    println!("states with zero shifted total rate: {zero_diag}");
    match chain.equilibrium_potential(&[one], &[two], false) {
        Ok(sol) => println!("solved: h(3-ground) = {}", sol.h[SpinConfig::monochromatic(dims,3,3).encode() as usize]),
        Err(e) => println!("solve failed: {e}"),
    }
    let _ = outgoing_rates;
}
