//! Full configuration-space views: explicit chains over enumerable spaces
//! and a matrix-free equilibrium-potential solve for spaces too large to
//! store edge lists for.

use crate::chain::FiniteChain;
use crate::dynamics::{outgoing_rates, DynamicsSpec};
use crate::error::{ChainError, LatticeError};
use crate::lattice::{hamiltonian, LatticeDims, SpinConfig};
use crate::linalg::{bicgstab, LinearOp};

/// Explicit chain over the whole configuration space with Gibbs weights.
/// State i of the chain is the configuration with code i.
pub fn build_chain(
    dims: LatticeDims,
    q: u8,
    spec: &DynamicsSpec,
    beta: f64,
    guard: u64,
) -> Result<FiniteChain, LatticeError> {
    let total = SpinConfig::space_size(dims, q, guard)? as usize;
    let mut chain = FiniteChain::new(total, beta);
    let mut weights = Vec::with_capacity(total);
    let mut min_h = u32::MAX;
    let mut energies = Vec::with_capacity(total);
    for idx in 0..total as u64 {
        let cfg = SpinConfig::decode(dims, q, idx);
        let h = hamiltonian(&cfg);
        min_h = min_h.min(h);
        energies.push(h);
        for term in outgoing_rates(&cfg, spec) {
            let target = term.apply(&cfg).encode() as usize;
            chain.add_edge(idx as usize, target, term.prefactor, term.exponent);
        }
    }
    for h in energies {
        weights.push((-beta * (h - min_h) as f64).exp());
    }
    chain.set_weights(weights);
    Ok(chain)
}

pub fn ground_code(dims: LatticeDims, q: u8, a: u8) -> u64 {
    SpinConfig::monochromatic(dims, q, a).encode()
}

struct LatticeOp<'a> {
    dims: LatticeDims,
    q: u8,
    spec: &'a DynamicsSpec,
    beta: f64,
    /// flattened spins, `sites` bytes per state
    spins: Vec<u8>,
    /// interior states in code order
    interior: Vec<u32>,
    /// code -> slot in `interior`, or MAX
    slot: Vec<u32>,
    /// 0 interior, 1 in P, 2 in Q
    kind: Vec<u8>,
    total_rate: Vec<f64>,
}

impl LatticeOp<'_> {
    fn config(&self, code: usize) -> SpinConfig {
        let n = self.dims.sites();
        SpinConfig::new(
            self.dims,
            self.q,
            self.spins[code * n..(code + 1) * n].to_vec(),
        )
        .expect("cached spins")
    }
}

impl LinearOp for LatticeOp<'_> {
    fn dim(&self) -> usize {
        self.interior.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (s, &code) in self.interior.iter().enumerate() {
            let cfg = self.config(code as usize);
            let mut acc = self.total_rate[s] * x[s];
            for term in outgoing_rates(&cfg, self.spec) {
                let target = term.apply(&cfg).encode() as usize;
                if self.kind[target] == 0 {
                    acc -= term.rate(self.beta) * x[self.slot[target] as usize];
                }
            }
            y[s] = acc;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        self.total_rate.clone()
    }
}

/// Matrix-free equilibrium potential h(i) = P_i[tau_P < tau_Q] over the
/// full space, for state counts where edge lists would not fit in memory.
pub fn equilibrium_potential_free(
    dims: LatticeDims,
    q: u8,
    spec: &DynamicsSpec,
    beta: f64,
    p: &[u64],
    q_set: &[u64],
    guard: u64,
) -> Result<Vec<f64>, ChainError> {
    let total = SpinConfig::space_size(dims, q, guard)
        .map_err(|_| ChainError::SingularSystem(f64::NAN))? as usize;
    let sites = dims.sites();
    let mut kind = vec![0u8; total];
    for &i in p {
        kind[i as usize] = 1;
    }
    for &i in q_set {
        kind[i as usize] = 2;
    }
    let mut spins = vec![0u8; total * sites];
    let mut interior = Vec::new();
    for code in 0..total {
        let cfg = SpinConfig::decode(dims, q, code as u64);
        spins[code * sites..(code + 1) * sites].copy_from_slice(cfg.spins());
        if kind[code] == 0 {
            interior.push(code as u32);
        }
    }
    let mut slot = vec![u32::MAX; total];
    for (s, &code) in interior.iter().enumerate() {
        slot[code as usize] = s as u32;
    }
    let mut total_rate = vec![0.0f64; interior.len()];
    let mut rhs = vec![0.0f64; interior.len()];
    for (s, &code) in interior.iter().enumerate() {
        let cfg = SpinConfig::decode(dims, q, code as u64);
        for term in outgoing_rates(&cfg, spec) {
            let rate = term.rate(beta);
            total_rate[s] += rate;
            let target = term.apply(&cfg).encode() as usize;
            if kind[target] == 1 {
                rhs[s] += rate;
            }
        }
    }
    let op = LatticeOp {
        dims,
        q,
        spec,
        beta,
        spins,
        interior,
        slot,
        kind: kind.clone(),
        total_rate,
    };
    let (x, res) = bicgstab(&op, &rhs, 1e-12, 200_000);
    if res > 1e-10 {
        return Err(ChainError::SingularSystem(res));
    }
    let mut h = vec![0.0f64; total];
    for code in 0..total {
        match kind[code] {
            1 => h[code] = 1.0,
            2 => h[code] = 0.0,
            _ => h[code] = x[op.slot[code] as usize],
        }
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gibbs_weights_are_stationary_for_all_kernels() {
        let dims = LatticeDims::new(3, 3).unwrap();
        for (spec, beta) in [
            (DynamicsSpec::mh(2), 2.0),
            (DynamicsSpec::cyclic(3), 1.0),
        ] {
            let chain = build_chain(dims, spec.q, &spec, beta, 1 << 24).unwrap();
            let res = chain.weight_residual().unwrap();
            assert!(res <= 1e-12, "{:?}: {res}", spec.kind);
            // stationary distribution equals normalized Gibbs weights
            let pi = chain.stationary_distribution().unwrap();
            let w = chain.weights().unwrap();
            let total: f64 = w.iter().sum();
            for i in (0..pi.len()).step_by(57) {
                assert!((pi[i] - w[i] / total).abs() <= 1e-10 * pi[i].max(1e-300));
            }
        }
    }

    #[test]
    fn matrix_free_matches_explicit() {
        let dims = LatticeDims::new(3, 3).unwrap();
        let spec = DynamicsSpec::mh(2);
        let beta = 2.0;
        let p = vec![ground_code(dims, 2, 1)];
        let q = vec![ground_code(dims, 2, 2)];
        let free = equilibrium_potential_free(dims, 2, &spec, beta, &p, &q, 1 << 24).unwrap();
        let chain = build_chain(dims, 2, &spec, beta, 1 << 24).unwrap();
        let sol = chain
            .equilibrium_potential(&[p[0] as usize], &[q[0] as usize], false)
            .unwrap();
        for i in 0..free.len() {
            assert!((free[i] - sol.h[i]).abs() < 1e-8);
        }
    }
}
