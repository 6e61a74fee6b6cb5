use metastab::dynamics::DynamicsSpec;
use metastab::landscape::communication_height;
use metastab::lattice::{LatticeDims, SpinConfig};
use metastab::testfn_small::{build_materialized, h1_error};

fn main() {
    let betas = [4.0, 5.0, 6.0, 7.0, 8.0];
    // 3x4 q=2 MH
    let dims = LatticeDims::new(3, 4).unwrap();
    let spec = DynamicsSpec::mh(2);
    let one = SpinConfig::monochromatic(dims, 2, 1);
    let two = SpinConfig::monochromatic(dims, 2, 2);
    let gamma = communication_height(&one, &two, &spec, 1 << 24).unwrap();
    println!("3x4 MH Gamma_emp = {gamma}");
    let table = build_materialized(dims, spec, vec![1], vec![2]).unwrap();
    for adjoint in [false] {
        let pts = h1_error(&table, gamma, &[1], &[2], &betas, adjoint, 1 << 24).unwrap();
        for p in &pts {
            println!("  beta={} err={:.6e} ratio={:.6e} iddef={:.2e}", p.beta, p.error, p.ratio, p.identity_defect);
        }
    }
    // 3x3 q=3 cyclic
    let dims = LatticeDims::new(3, 3).unwrap();
    let spec = DynamicsSpec::cyclic(3);
    let one = SpinConfig::monochromatic(dims, 3, 1);
    let two = SpinConfig::monochromatic(dims, 3, 2);
    let gamma = communication_height(&one, &two, &spec, 1 << 24).unwrap();
    println!("3x3 cyclic Gamma_emp = {gamma}");
    let table = build_materialized(dims, spec, vec![1], vec![2]).unwrap();
    for adjoint in [false, true] {
        let pts = h1_error(&table, gamma, &[1], &[2], &betas, adjoint, 1 << 24).unwrap();
        println!("  adjoint={adjoint}");
        for p in &pts {
            println!("  beta={} err={:.6e} ratio={:.6e} iddef={:.2e}", p.beta, p.error, p.ratio, p.identity_defect);
        }
    }
}
