//! Materialized test functions on small lattices: explicit value tables
//! over the reachable tube, the exact H1 error against the solved
//! equilibrium potential, and the ground-state boundary sums of phi_1.
//!
//! Below the paper regime the bulk families thin out or vanish (no
//! protuberance plateau at L = 4, no bands at all at L = 3), so the table
//! is assembled from whatever families exist: strip trees with their
//! ladder potentials, regular bands, basin regions grown by restricted
//! BFS, and the constant-1 default outside the tube.

use crate::constants::{gamma, nu0};
use crate::dynamics::{outgoing_rates, DynKind, DynamicsSpec};
use crate::error::TestFnError;
use crate::fullspace::build_chain;
use crate::ladder::{
    build_aux_chain_cyclic, build_aux_chain_mh, enumerate_ladder_trees, realize, AuxChainCyclic,
    AuxChainMh, CyclicAuxState, Ladder, StripAxis,
};
use crate::landscape::{regular_config, restricted_neighborhood};
use crate::lattice::{hamiltonian, LatticeDims, SpinConfig};
use crate::testfn::RoleTable;
use std::collections::{HashMap, HashSet};

pub struct MaterializedTestFn {
    pub dims: LatticeDims,
    pub spec: DynamicsSpec,
    pub roles: RoleTable,
    pub gamma: f64,
    pub kappa: f64,
    pub edge_constant: f64,
    /// h-tilde on the tube; states off the table carry the default 1.
    pub values: HashMap<u64, f64>,
    /// the adjoint variant h-tilde-star
    pub adjoint_values: HashMap<u64, f64>,
}

impl MaterializedTestFn {
    pub fn value(&self, code: u64, adjoint: bool) -> f64 {
        let table = if adjoint {
            &self.adjoint_values
        } else {
            &self.values
        };
        table.get(&code).copied().unwrap_or(1.0)
    }
}

struct LadderSolves {
    mh: Option<AuxChainMh>,
    cyclic: HashMap<u8, AuxChainCyclic>,
}

pub fn build_materialized(
    dims: LatticeDims,
    spec: DynamicsSpec,
    p_spins: Vec<u8>,
    q_spins: Vec<u8>,
) -> Result<MaterializedTestFn, TestFnError> {
    let (k, l, q) = (dims.k(), dims.l(), spec.q);
    let roles = RoleTable::new(q, p_spins, q_spins);
    let gamma_v = gamma(k, &spec);

    let solves = match spec.kind {
        DynKind::Mh => LadderSolves {
            mh: Some(build_aux_chain_mh(k)?),
            cyclic: HashMap::new(),
        },
        DynKind::Cyclic => {
            let mut m = HashMap::new();
            for shift in 1..q {
                m.insert(shift, build_aux_chain_cyclic(k, q, shift)?);
            }
            LadderSolves {
                mh: None,
                cyclic: m,
            }
        }
        _ => {
            return Err(TestFnError::FamilyUnavailable(
                "materialized test functions exist for MH and cyclic".into(),
            ))
        }
    };

    // constants: the bulk display turns negative below L = 4; there is no
    // bulk plateau there and the constant is clamped to zero
    let v0 = nu0(k, l);
    let bulk = match spec.kind {
        DynKind::Mh => v0 * ((k + 2) as f64) * (l as f64 - 4.0) / (4 * k * l) as f64,
        DynKind::Cyclic => v0 * ((k - 2) as f64) * (l as f64 - 4.0) / (4 * k * l) as f64,
        _ => unreachable!(),
    }
    .max(0.0);
    let e0 = match spec.kind {
        DynKind::Mh => solves.mh.as_ref().unwrap().e0,
        DynKind::Cyclic => solves.cyclic[&1].e0_bar,
        _ => unreachable!(),
    };
    let edge = v0 * e0 / l as f64;
    let kappa = bulk + 2.0 * edge;

    // at L = 3 the strip corridor is the whole transition: interpolate the
    // ladder potential over the full value span instead of the edge share
    let edge_share = if l >= 4 { edge / kappa } else { 1.0 };

    let mut values: HashMap<u64, f64> = HashMap::new();
    let mut adjoint_values: HashMap<u64, f64> = HashMap::new();
    let put = |vals: &mut HashMap<u64, f64>, code: u64, v: f64| {
        vals.entry(code).or_insert(v);
    };

    let axes: Vec<StripAxis> = if dims.is_square() {
        vec![StripAxis::Rows, StripAxis::Cols]
    } else {
        vec![StripAxis::Rows]
    };

    // strip trees (and the cyclic orbit closure) for every ordered pair
    let trees = enumerate_ladder_trees(k)?;
    let ladder = Ladder::new(k)?;
    for s in 1..=q {
        for t in 1..=q {
            if s == t {
                continue;
            }
            let gs = roles.ground_value(s);
            let gt = roles.ground_value(t);
            let z_val = |f: f64| gs + (gt - gs) * edge_share * (1.0 - f);
            for &axis in &axes {
                for ell in 0..l {
                    match spec.kind {
                        DynKind::Mh => {
                            let aux = solves.mh.as_ref().unwrap();
                            for &mask in &trees {
                                let cfg = realize(mask, k, dims, q, s, t, ell, axis);
                                let code = cfg.encode();
                                let f = aux.f_tree(mask);
                                put(&mut values, code, z_val(f));
                                put(&mut adjoint_values, code, z_val(f));
                            }
                        }
                        DynKind::Cyclic => {
                            let shift = (t + q - s) % q;
                            let aux = &solves.cyclic[&shift];
                            // tree states
                            for (i, &state) in aux.states.iter().enumerate() {
                                match state {
                                    CyclicAuxState::Tree(mask) => {
                                        let cfg = realize(mask, k, dims, q, s, t, ell, axis);
                                        let code = cfg.encode();
                                        put(&mut values, code, z_val(aux.potential.h[i]));
                                        put(
                                            &mut adjoint_values,
                                            code,
                                            z_val(aux.adjoint_potential.h[i]),
                                        );
                                    }
                                    CyclicAuxState::Intermediate {
                                        with_site,
                                        vertex,
                                        j,
                                    } => {
                                        // realize the larger tree, rotate the
                                        // vertex j times
                                        let base =
                                            realize(with_site, k, dims, q, s, t, ell, axis);
                                        let (kk, level) = ladder.coords(vertex as usize);
                                        let site = match axis {
                                            StripAxis::Rows => {
                                                dims.index(kk, (ell + level) % l)
                                            }
                                            StripAxis::Cols => {
                                                dims.index((ell + level) % l, kk)
                                            }
                                        };
                                        let mut cfg = base;
                                        for _ in 0..j {
                                            cfg = cfg.rotate(site);
                                        }
                                        let code = cfg.encode();
                                        put(&mut values, code, z_val(aux.potential.h[i]));
                                        put(
                                            &mut adjoint_values,
                                            code,
                                            z_val(aux.adjoint_potential.h[i]),
                                        );
                                    }
                                }
                            }
                        }
                        _ => unreachable!(),
                    }
                }
            }
        }
    }

    // regular bands and their orbit closures; no protuberance families
    // survive below L = 5
    for s in 1..=q {
        for t in 1..=q {
            if s == t {
                continue;
            }
            let gs = roles.ground_value(s);
            let gt = roles.ground_value(t);
            for v in 2..=l.saturating_sub(2) {
                let profile = if l > 4 {
                    (l as f64 - 2.0 - v as f64) / (l as f64 - 4.0)
                } else {
                    0.0
                };
                let val = gt + (gs - gt) * (profile * bulk + edge) / kappa;
                for ell in 0..l {
                    let base = regular_config(dims, q, s, t, ell, v);
                    let mut members = vec![base.clone()];
                    if let DynKind::Cyclic = spec.kind {
                        for site in 0..dims.sites() {
                            let mut cur = base.clone();
                            for _ in 1..q {
                                cur = cur.rotate(site);
                                if hamiltonian(&cur) as f64 <= gamma_v {
                                    members.push(cur.clone());
                                }
                            }
                        }
                    }
                    for c in members {
                        let cs = if dims.is_square() {
                            vec![c.clone(), c.transpose().unwrap()]
                        } else {
                            vec![c]
                        };
                        for cc in cs {
                            put(&mut values, cc.encode(), val);
                            put(&mut adjoint_values, cc.encode(), val);
                        }
                    }
                }
            }
        }
    }

    // basin regions: everything reachable from each ground state below the
    // barrier while avoiding the strip families, at the basin constant
    let tree_codes: HashSet<u64> = values.keys().copied().collect();
    for s in 1..=q {
        let g = roles.ground_value(s);
        let start = SpinConfig::monochromatic(dims, q, s);
        let basin = restricted_neighborhood(
            &[start],
            &tree_codes,
            &spec,
            gamma_v,
            1 << 22,
        )
        .map_err(|e| TestFnError::FamilyUnavailable(format!("basin BFS: {e}")))?;
        for code in basin {
            put(&mut values, code, g);
            put(&mut adjoint_values, code, g);
        }
    }

    Ok(MaterializedTestFn {
        dims,
        spec,
        roles,
        gamma: gamma_v,
        kappa,
        edge_constant: edge,
        values,
        adjoint_values,
    })
}

/// Exact H1 error on an enumerable lattice: D(h - h-tilde) with h from the
/// full-space solve, reported against exp(-Gamma_emp beta).
pub struct H1Point {
    pub beta: f64,
    pub error: f64,
    pub ratio: f64,
    /// relative defect of D(h - ht) = D(ht) - sum h (-L ht) mu
    pub identity_defect: f64,
}

pub fn h1_error(
    table: &MaterializedTestFn,
    gamma_emp: f64,
    p_spins: &[u8],
    q_spins: &[u8],
    betas: &[f64],
    adjoint: bool,
    guard: u64,
) -> Result<Vec<H1Point>, TestFnError> {
    let dims = table.dims;
    let q = table.spec.q;
    let mut out = Vec::new();
    for &beta in betas {
        let chain = build_chain(dims, q, &table.spec, beta, guard)?;
        let p: Vec<usize> = p_spins
            .iter()
            .map(|&s| SpinConfig::monochromatic(dims, q, s).encode() as usize)
            .collect();
        let qq: Vec<usize> = q_spins
            .iter()
            .map(|&s| SpinConfig::monochromatic(dims, q, s).encode() as usize)
            .collect();
        let sol = chain.equilibrium_potential(&p, &qq, adjoint)?;
        let ht: Vec<f64> = (0..chain.len())
            .map(|i| table.value(i as u64, adjoint))
            .collect();
        let diff: Vec<f64> = sol.h.iter().zip(&ht).map(|(a, b)| a - b).collect();
        // the adjoint equilibrium potential pairs with the adjoint Dirichlet
        // form, which coincides with the forward one as a quadratic form
        let error = chain.dirichlet_form(&diff);
        // identity: D(h - ht) = D(ht) - <h, -L ht>_mu, generator of the
        // matching (forward or adjoint) dynamics
        let d_ht = chain.dirichlet_form(&ht);
        let cross = cross_term(&chain, &sol.h, &ht, adjoint);
        let identity_defect =
            ((error - (d_ht - cross)) / error.abs().max(f64::MIN_POSITIVE)).abs();
        out.push(H1Point {
            beta,
            error,
            ratio: error / (-beta * gamma_emp).exp(),
            identity_defect,
        });
    }
    Ok(out)
}

fn cross_term(
    chain: &crate::chain::FiniteChain,
    h: &[f64],
    ht: &[f64],
    adjoint: bool,
) -> f64 {
    // sum_sigma h(sigma) (-L ht)(sigma) mu(sigma), with L the generator of
    // the forward (or adjoint) chain, all in true units
    let w = chain.weights().expect("gibbs weights");
    let total: f64 = w.iter().sum();
    let beta = chain.beta();
    let mut acc = 0.0;
    for i in 0..chain.len() {
        for e in chain.edges(i) {
            let rate = e.prefactor * (-beta * e.exponent).exp();
            let flow = w[i] / total * rate;
            let j = e.to as usize;
            if adjoint {
                // adjoint generator row at j: mu(i) r(i,j) / mu(j) toward i
                acc += h[j] * flow * (ht[j] - ht[i]) * (-1.0);
            } else {
                acc += h[i] * flow * (ht[i] - ht[j]);
            }
        }
    }
    acc
}

/// phi_1 summed over a materialized ground-state neighborhood, compared to
/// the capacity-flux prediction sign * |other| / (kappa (|P|+|Q|)) e^{-G b}.
pub struct BoundarySum {
    pub spin: u8,
    pub sum: f64,
    pub predicted: f64,
}

pub fn boundary_sums(
    table: &MaterializedTestFn,
    beta: f64,
    max_frontier: usize,
) -> Result<Vec<BoundarySum>, TestFnError> {
    let dims = table.dims;
    let spec = table.spec;
    let q = spec.q;
    let p_n = table.roles.p_spins.len() as f64;
    let q_n = table.roles.q_spins.len() as f64;
    let mut out = Vec::new();
    for s in 1..=q {
        let start = SpinConfig::monochromatic(dims, q, s);
        // strict neighborhood: communication below the barrier
        let basin = restricted_neighborhood(
            &[start],
            &HashSet::new(),
            &spec,
            table.gamma - 1.0,
            max_frontier,
        )
        .map_err(|e| TestFnError::FamilyUnavailable(format!("N({s}) BFS: {e}")))?;
        let mut sum = 0.0;
        for &code in &basin {
            let cfg = SpinConfig::decode(dims, q, code);
            let h_own = hamiltonian(&cfg) as f64;
            let own = table.value(code, false);
            for term in outgoing_rates(&cfg, &spec) {
                if h_own + term.exponent > table.gamma + 1e-9 {
                    continue;
                }
                let t_code = term.apply(&cfg).encode();
                let tv = table.value(t_code, false);
                sum += (-beta * h_own).exp() * term.rate(beta) * (own - tv);
            }
        }
        // per the capacity-flux displays: +|Q|/... on P-side, -|P|/... on
        // Q-side, o(1) on neutral wells; Z_beta replaced by q
        let scale = (-beta * table.gamma).exp() / (table.kappa * (p_n + q_n)) / q as f64
            * q as f64;
        let predicted = match table.roles.role(s) {
            crate::testfn::Role::P => q_n * scale,
            crate::testfn::Role::Q => -p_n * scale,
            crate::testfn::Role::C => 0.0,
        };
        out.push(BoundarySum {
            spin: s,
            sum,
            predicted,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn materialized_values_3x4_mh() {
        let dims = LatticeDims::new(3, 4).unwrap();
        let spec = DynamicsSpec::mh(2);
        let table = build_materialized(dims, spec, vec![1], vec![2]).unwrap();
        // R_2 bands carry the midpoint: bulk vanishes at L = 4
        assert!(table.kappa > 0.0);
        let band = regular_config(dims, 2, 1, 2, 0, 2);
        let v = table.value(band.encode(), false);
        assert!((v - 0.5).abs() < 1e-12, "band value {v}");
        // ground states
        let one = SpinConfig::monochromatic(dims, 2, 1);
        assert_eq!(table.value(one.encode(), false), 1.0);
        let two = SpinConfig::monochromatic(dims, 2, 2);
        assert_eq!(table.value(two.encode(), false), 0.0);
        // default far away
        assert_eq!(table.value(band.encode() ^ 0x15, false), 1.0);
    }

    #[test]
    fn h1_identity_holds_on_3x4() {
        let dims = LatticeDims::new(3, 4).unwrap();
        let spec = DynamicsSpec::mh(2);
        let table = build_materialized(dims, spec, vec![1], vec![2]).unwrap();
        let pts = h1_error(&table, 8.0, &[1], &[2], &[4.0, 5.0], false, 1 << 24).unwrap();
        for p in &pts {
            assert!(p.error >= 0.0);
            assert!(p.identity_defect <= 1e-9, "defect {}", p.identity_defect);
        }
    }
}
