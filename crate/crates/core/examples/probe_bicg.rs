use metastab::dynamics::{outgoing_rates, DynamicsSpec};
use metastab::lattice::{LatticeDims, SpinConfig};

fn main() {
    let dims = LatticeDims::new(3, 3).unwrap();
    let spec = DynamicsSpec::cyclic(3);
    let beta = 4.0;
    let n = 19683usize;
    let one = SpinConfig::monochromatic(dims, 3, 1).encode() as usize;
    let two = SpinConfig::monochromatic(dims, 3, 2).encode() as usize;
    // assemble rows
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
    for i in 0..n as u64 {
        let cfg = SpinConfig::decode(dims, 3, i);
        for t in outgoing_rates(&cfg, &spec) {
            rows[i as usize].push((t.apply(&cfg).encode() as u32, t.rate(beta)));
        }
    }
    let mut kind = vec![0u8; n];
    kind[one] = 1; kind[two] = 2;
    let interior: Vec<usize> = (0..n).filter(|&i| kind[i] == 0).collect();
    let mut slot = vec![usize::MAX; n];
    for (s, &i) in interior.iter().enumerate() { slot[i] = s; }
    let m = interior.len();
    let mut total = vec![0.0; m];
    let mut rhs = vec![0.0; m];
    for (s, &i) in interior.iter().enumerate() {
        for &(to, r) in &rows[i] {
            total[s] += r;
            if kind[to as usize] == 1 { rhs[s] += r; }
        }
    }
    let apply = |x: &[f64], y: &mut [f64]| {
        for (s, &i) in interior.iter().enumerate() {
            let mut acc = total[s] * x[s];
            for &(to, r) in &rows[i] {
                if slot[to as usize] != usize::MAX {
                    acc -= r * x[slot[to as usize]];
                }
            }
            y[s] = acc;
        }
    };
    let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(p,q)| p*q).sum() };
    let b_norm = dot(&rhs, &rhs).sqrt();
    println!("m={m} b_norm={b_norm:.3e} min_diag={:.3e} max_diag={:.3e}",
        total.iter().cloned().fold(f64::INFINITY, f64::min),
        total.iter().cloned().fold(0.0, f64::max));
    // plain bicgstab几 iterations
    let inv: Vec<f64> = total.iter().map(|&d| 1.0/d).collect();
    let x = vec![0.0; m];
    let r = rhs.clone();
    let r0 = r.clone();
    let p = r.clone(); // first iteration: p = r
    let p_hat: Vec<f64> = p.iter().zip(&inv).map(|(a,b)| a*b).collect();
    let mut v = vec![0.0; m];
    apply(&p_hat, &mut v);
    let rho = dot(&r0, &r);
    let denom = dot(&r0, &v);
    println!("rho={rho:.6e} denom={denom:.6e}");
    let alpha = rho/denom;
    let s: Vec<f64> = r.iter().zip(&v).map(|(ri,vi)| ri - alpha*vi).collect();
    println!("alpha={alpha:.3e} |s|={:.3e}", dot(&s,&s).sqrt());
    let _ = x;
}
