//! Transition-rate kernels for the four dynamics, adjoint rates, edge
//! heights, Gibbs weights and stationarity verifiers.
//!
//! Rates are carried as (prefactor, exponent) pairs realizing
//! `prefactor * exp(-beta * exponent)`, never as pre-evaluated reals, so
//! that barrier arithmetic stays exact and large-beta evaluation stable.

use crate::error::LatticeError;
use crate::lattice::{flip_delta, hamiltonian, LatticeDims, SpinConfig};
use serde::{Deserialize, Serialize};

pub const DEFAULT_STATE_GUARD: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DynKind {
    Mh,
    Cyclic,
    PCyclic { p: f64 },
    PDirected { p: f64 },
}

/// A dynamics kind together with the spin count it acts on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSpec {
    pub kind: DynKind,
    pub q: u8,
}

impl DynamicsSpec {
    /// Validates the (kind, q) pair. Cyclic dynamics with q = 2 coincides
    /// with MH and is normalized to it; the note records the substitution.
    pub fn new(kind: DynKind, q: u8) -> Result<(Self, Option<String>), String> {
        if q < 2 {
            return Err("q must be at least 2".into());
        }
        match kind {
            DynKind::PCyclic { p } | DynKind::PDirected { p } if !(0.0..=1.0).contains(&p) => {
                return Err(format!("p = {p} outside [0, 1]"));
            }
            DynKind::PDirected { .. } if q != 2 => {
                return Err("p-directed dynamics requires q = 2".into());
            }
            DynKind::Cyclic | DynKind::PCyclic { .. } if q == 2 => {
                return Ok((
                    DynamicsSpec {
                        kind: DynKind::Mh,
                        q,
                    },
                    Some("cyclic dynamics with q = 2 equals MH; normalized".into()),
                ));
            }
            _ => {}
        }
        Ok((DynamicsSpec { kind, q }, None))
    }

    pub fn mh(q: u8) -> Self {
        DynamicsSpec {
            kind: DynKind::Mh,
            q,
        }
    }

    pub fn cyclic(q: u8) -> Self {
        assert!(q >= 3, "cyclic dynamics needs q >= 3; use mh for q = 2");
        DynamicsSpec {
            kind: DynKind::Cyclic,
            q,
        }
    }

    pub fn is_reversible(&self) -> bool {
        match self.kind {
            DynKind::Mh => true,
            DynKind::Cyclic => false,
            DynKind::PCyclic { p } => (p - 0.5).abs() < 1e-15,
            DynKind::PDirected { p } => (p - 0.5).abs() < 1e-15,
        }
    }

    /// The adjoint dynamics with respect to the Gibbs measure.
    pub fn adjoint(&self) -> Self {
        let kind = match self.kind {
            DynKind::Mh => DynKind::Mh,
            DynKind::Cyclic => DynKind::PCyclic { p: 0.0 },
            DynKind::PCyclic { p } => DynKind::PCyclic { p: 1.0 - p },
            DynKind::PDirected { p } => DynKind::PDirected { p: 1.0 - p },
        };
        DynamicsSpec { kind, q: self.q }
    }
}

/// One outgoing transition: the move, a prefactor and an exponent, with
/// realized rate `prefactor * exp(-beta * exponent)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateTerm {
    pub site: usize,
    pub new_spin: u8,
    pub prefactor: f64,
    pub exponent: f64,
}

impl RateTerm {
    pub fn rate(&self, beta: f64) -> f64 {
        self.prefactor * (-beta * self.exponent).exp()
    }

    pub fn apply(&self, sigma: &SpinConfig) -> SpinConfig {
        sigma.with_spin(self.site, self.new_spin)
    }
}

fn rotate_spin(q: u8, s: u8, steps: u8) -> u8 {
    (s - 1 + steps) % q + 1
}

/// max_a H(sigma^{x,a}) - H(sigma), the cyclic uphill exponent at `site`.
/// The maximum runs over all q spins including the current one.
pub fn cyclic_exponent(sigma: &SpinConfig, site: usize) -> i32 {
    (1..=sigma.q())
        .map(|a| flip_delta(sigma, site, a))
        .max()
        .expect("q >= 2")
}

/// Per-direction edge costs for the p-directed dynamics at `site`:
/// the east+north change A and the west+south change B of the flip.
///
/// The kernel realizes r(sigma, sigma^x) = p e^{-beta A} + (1-p) e^{-beta B},
/// i.e. the p-mixture of the two fully directed generators. Each directed
/// generator leaves the Gibbs measure invariant on the torus, hence so does
/// every mixture; the single-exponential form exp(-beta [pA + (1-p)B]) does
/// not balance for p outside {0, 1/2, 1}. Requires K, L >= 3 so that the
/// four directed edges are distinct.
pub fn directed_edge_costs(sigma: &SpinConfig, site: usize) -> (f64, f64) {
    let dims = sigma.dims();
    assert!(
        dims.k() > 2 && dims.l() > 2,
        "p-directed dynamics needs K, L >= 3"
    );
    let old = sigma.get(site);
    let new = if old == 1 { 2 } else { 1 };
    let edge = |nbr: usize| -> f64 {
        let s = sigma.get(nbr);
        ((new != s) as i32 - (old != s) as i32) as f64
    };
    let a = edge(dims.east(site)) + edge(dims.north(site));
    let b = edge(dims.west(site)) + edge(dims.south(site));
    (a, b)
}

/// All outgoing transitions from `sigma`; zero-prefactor terms are omitted.
pub fn outgoing_rates(sigma: &SpinConfig, spec: &DynamicsSpec) -> Vec<RateTerm> {
    assert_eq!(sigma.q(), spec.q, "config and dynamics disagree on q");
    let n = sigma.dims().sites();
    let q = spec.q;
    let mut out = Vec::new();
    match spec.kind {
        DynKind::Mh => {
            for site in 0..n {
                for a in 1..=q {
                    if a == sigma.get(site) {
                        continue;
                    }
                    out.push(RateTerm {
                        site,
                        new_spin: a,
                        prefactor: 1.0,
                        exponent: flip_delta(sigma, site, a).max(0) as f64,
                    });
                }
            }
        }
        DynKind::Cyclic => {
            for site in 0..n {
                out.push(RateTerm {
                    site,
                    new_spin: rotate_spin(q, sigma.get(site), 1),
                    prefactor: 1.0,
                    exponent: cyclic_exponent(sigma, site) as f64,
                });
            }
        }
        DynKind::PCyclic { p } => {
            for site in 0..n {
                let exponent = cyclic_exponent(sigma, site) as f64;
                if p > 0.0 {
                    out.push(RateTerm {
                        site,
                        new_spin: rotate_spin(q, sigma.get(site), 1),
                        prefactor: p,
                        exponent,
                    });
                }
                if p < 1.0 {
                    out.push(RateTerm {
                        site,
                        new_spin: rotate_spin(q, sigma.get(site), q - 1),
                        prefactor: 1.0 - p,
                        exponent,
                    });
                }
            }
        }
        DynKind::PDirected { p } => {
            for site in 0..n {
                let new_spin = if sigma.get(site) == 1 { 2 } else { 1 };
                let (a, b) = directed_edge_costs(sigma, site);
                if p > 0.0 {
                    out.push(RateTerm {
                        site,
                        new_spin,
                        prefactor: p,
                        exponent: a,
                    });
                }
                if p < 1.0 {
                    out.push(RateTerm {
                        site,
                        new_spin,
                        prefactor: 1.0 - p,
                        exponent: b,
                    });
                }
            }
        }
    }
    out
}

/// Adjoint rates r*(sigma, zeta) = mu(zeta) r(zeta, sigma) / mu(sigma),
/// evaluated locally. For MH this equals `outgoing_rates` termwise.
pub fn adjoint_rates(sigma: &SpinConfig, spec: &DynamicsSpec) -> Vec<RateTerm> {
    outgoing_rates(sigma, &spec.adjoint())
}

/// Communication height charged to an adjacent ordered pair, or None when
/// the pair is not adjacent under the given dynamics.
///
/// MH: max(H(sigma), H(zeta)). Cyclic and p-cyclic: the orbit maximum
/// max_a H(sigma^{x,a}). p-directed: H(sigma) + Delta_p(sigma, zeta),
/// an artifact convention preserving mu r = Z^-1 exp(-beta height).
pub fn edge_height(sigma: &SpinConfig, zeta: &SpinConfig, spec: &DynamicsSpec) -> Option<f64> {
    let site = single_site_difference(sigma, zeta)?;
    match spec.kind {
        DynKind::Mh => Some(hamiltonian(sigma).max(hamiltonian(zeta)) as f64),
        DynKind::Cyclic => {
            let fwd = zeta.get(site) == rotate_spin(spec.q, sigma.get(site), 1);
            let bwd = sigma.get(site) == rotate_spin(spec.q, zeta.get(site), 1);
            (fwd || bwd)
                .then(|| (hamiltonian(sigma) as i32 + cyclic_exponent(sigma, site)) as f64)
        }
        DynKind::PCyclic { .. } => {
            Some((hamiltonian(sigma) as i32 + cyclic_exponent(sigma, site)) as f64)
        }
        DynKind::PDirected { p } => {
            // asymptotic height of the mixed rate: the smaller active exponent
            let (a, b) = directed_edge_costs(sigma, site);
            let exp = if p == 0.0 {
                b
            } else if p == 1.0 {
                a
            } else {
                a.min(b)
            };
            Some(hamiltonian(sigma) as f64 + exp)
        }
    }
}

fn single_site_difference(sigma: &SpinConfig, zeta: &SpinConfig) -> Option<usize> {
    if sigma.dims() != zeta.dims() || sigma.q() != zeta.q() {
        return None;
    }
    let mut site = None;
    for i in 0..sigma.dims().sites() {
        if sigma.get(i) != zeta.get(i) {
            if site.is_some() {
                return None;
            }
            site = Some(i);
        }
    }
    site
}

/// Exact partition function together with the energy spectrum histogram.
pub struct PartitionFunction {
    pub z: f64,
    /// count of configurations per Hamiltonian value
    pub spectrum: std::collections::BTreeMap<u32, u64>,
}

impl PartitionFunction {
    pub fn at_beta(&self, beta: f64) -> f64 {
        self.spectrum
            .iter()
            .map(|(&h, &c)| c as f64 * (-beta * h as f64).exp())
            .sum()
    }
}

pub fn partition_function(
    dims: LatticeDims,
    q: u8,
    beta: f64,
    guard: u64,
) -> Result<PartitionFunction, LatticeError> {
    let total = SpinConfig::space_size(dims, q, guard)?;
    let mut spectrum = std::collections::BTreeMap::new();
    for idx in 0..total {
        let cfg = SpinConfig::decode(dims, q, idx);
        *spectrum.entry(hamiltonian(&cfg)).or_insert(0u64) += 1;
    }
    let z = spectrum
        .iter()
        .map(|(&h, &c)| c as f64 * (-beta * h as f64).exp())
        .sum();
    Ok(PartitionFunction { z, spectrum })
}

/// Maximum stationarity violation of the Gibbs measure on the full space.
///
/// For MH the per-edge detailed-balance defect is reported; for the other
/// kernels the per-state net flow of unnormalized Gibbs mass. Both are
/// relative to the largest flow encountered.
pub struct StationarityReport {
    pub max_residual: f64,
    pub states: u64,
}

pub fn verify_stationarity(
    spec: &DynamicsSpec,
    dims: LatticeDims,
    beta: f64,
    guard: u64,
) -> Result<StationarityReport, LatticeError> {
    let total = SpinConfig::space_size(dims, spec.q, guard)?;
    let mut max_abs = 0.0f64;
    let mut max_flow = 0.0f64;
    // flows are evaluated as a single exponential of H(sigma) + exponent so
    // that symmetric quantities compute bit-identically
    let flow_of = |h: f64, term: &RateTerm| term.prefactor * (-beta * (h + term.exponent)).exp();
    if let DynKind::Mh = spec.kind {
        for idx in 0..total {
            let sigma = SpinConfig::decode(dims, spec.q, idx);
            let h = hamiltonian(&sigma) as f64;
            for term in outgoing_rates(&sigma, spec) {
                let zeta = term.apply(&sigma);
                let h_z = hamiltonian(&zeta) as f64;
                let back = outgoing_rates(&zeta, spec)
                    .into_iter()
                    .find(|t| t.site == term.site && t.new_spin == sigma.get(term.site))
                    .expect("MH moves are invertible");
                let fwd_flow = flow_of(h, &term);
                let bwd_flow = flow_of(h_z, &back);
                max_abs = max_abs.max((fwd_flow - bwd_flow).abs());
                max_flow = max_flow.max(fwd_flow.max(bwd_flow));
            }
        }
    } else {
        // net flow per state: sum_in mu(zeta) r(zeta, sigma) - mu(sigma) sum_out
        let mut net = vec![0.0f64; total as usize];
        let mut gross = vec![0.0f64; total as usize];
        for idx in 0..total {
            let sigma = SpinConfig::decode(dims, spec.q, idx);
            let h = hamiltonian(&sigma) as f64;
            for term in outgoing_rates(&sigma, spec) {
                let flow = flow_of(h, &term);
                let target = term.apply(&sigma).encode() as usize;
                net[idx as usize] -= flow;
                net[target] += flow;
                gross[idx as usize] += flow;
            }
        }
        for idx in 0..total as usize {
            max_abs = max_abs.max(net[idx].abs());
            max_flow = max_flow.max(gross[idx]);
        }
    }
    Ok(StationarityReport {
        max_residual: if max_flow > 0.0 { max_abs / max_flow } else { 0.0 },
        states: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeDims;

    fn dims33() -> LatticeDims {
        LatticeDims::new(3, 3).unwrap()
    }

    #[test]
    fn mh_rates_from_ground_state() {
        let d = dims33();
        let cfg = SpinConfig::monochromatic(d, 3, 1);
        let spec = DynamicsSpec::mh(3);
        let terms = outgoing_rates(&cfg, &spec);
        assert_eq!(terms.len(), 9 * 2);
        assert!(terms.iter().all(|t| t.exponent == 4.0 && t.prefactor == 1.0));
    }

    #[test]
    fn cyclic_rates_from_ground_state() {
        let d = dims33();
        let cfg = SpinConfig::monochromatic(d, 3, 1);
        let spec = DynamicsSpec::cyclic(3);
        let terms = outgoing_rates(&cfg, &spec);
        assert_eq!(terms.len(), 9);
        for t in &terms {
            assert_eq!(t.exponent, 4.0);
            assert_eq!(t.new_spin, 2);
        }
    }

    #[test]
    fn directed_exponent_from_ground_state_is_two() {
        let d = dims33();
        let cfg = SpinConfig::monochromatic(d, 2, 1);
        for p in [0.0, 0.3, 0.5, 1.0] {
            let spec = DynamicsSpec {
                kind: DynKind::PDirected { p },
                q: 2,
            };
            for t in outgoing_rates(&cfg, &spec) {
                assert!((t.exponent - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cyclic_q2_normalizes_to_mh() {
        let (spec, note) = DynamicsSpec::new(DynKind::Cyclic, 2).unwrap();
        assert_eq!(spec.kind, DynKind::Mh);
        assert!(note.is_some());
    }

    #[test]
    fn mh_adjoint_equals_original() {
        let d = dims33();
        let cfg = SpinConfig::decode(d, 2, 0b101_110_010);
        let spec = DynamicsSpec::mh(2);
        assert_eq!(outgoing_rates(&cfg, &spec), adjoint_rates(&cfg, &spec));
    }

    /// Brute-force check of r*(sigma, zeta) = mu(zeta) r(zeta, sigma) / mu(sigma)
    /// for the non-reversible kernels on the full 3x3 space.
    #[test]
    fn adjoint_rates_match_definition() {
        let d = dims33();
        let beta = 0.7;
        for (spec, states) in [
            (DynamicsSpec::cyclic(3), 50u64),
            (
                DynamicsSpec {
                    kind: DynKind::PCyclic { p: 0.3 },
                    q: 3,
                },
                50,
            ),
            (
                DynamicsSpec {
                    kind: DynKind::PDirected { p: 0.2 },
                    q: 2,
                },
                50,
            ),
        ] {
            for idx in 0..states {
                let sigma = SpinConfig::decode(d, spec.q, idx * 37 + 5);
                let h_sigma = hamiltonian(&sigma) as f64;
                // total adjoint rate per target state
                let mut by_target: std::collections::HashMap<u64, f64> =
                    std::collections::HashMap::new();
                for term in adjoint_rates(&sigma, &spec) {
                    *by_target.entry(term.apply(&sigma).encode()).or_insert(0.0) +=
                        term.rate(beta);
                }
                for (&target, &got) in &by_target {
                    let zeta = SpinConfig::decode(d, spec.q, target);
                    let h_zeta = hamiltonian(&zeta) as f64;
                    let back = outgoing_rates(&zeta, &spec)
                        .into_iter()
                        .filter(|t| t.apply(&zeta) == sigma)
                        .map(|t| t.rate(beta))
                        .sum::<f64>();
                    let expected = (-beta * (h_zeta - h_sigma)).exp() * back;
                    assert!(
                        (got - expected).abs() <= 1e-12 * expected.max(1.0),
                        "{:?} idx {idx} target {target}",
                        spec.kind
                    );
                }
            }
        }
    }

    #[test]
    fn adjoint_of_adjoint_is_original() {
        let d = dims33();
        let cfg = SpinConfig::decode(d, 3, 7777);
        for spec in [
            DynamicsSpec::mh(3),
            DynamicsSpec::cyclic(3),
            DynamicsSpec {
                kind: DynKind::PCyclic { p: 0.25 },
                q: 3,
            },
        ] {
            let twice = spec.adjoint().adjoint();
            assert_eq!(outgoing_rates(&cfg, &spec), outgoing_rates(&cfg, &twice));
        }
    }

    #[test]
    fn nonnegative_exponents_for_metropolis_family() {
        let d = dims33();
        for spec in [
            DynamicsSpec::mh(3),
            DynamicsSpec::cyclic(3),
            DynamicsSpec {
                kind: DynKind::PCyclic { p: 0.7 },
                q: 3,
            },
        ] {
            for idx in (0..19683u64).step_by(311) {
                let cfg = SpinConfig::decode(d, 3, idx);
                for t in outgoing_rates(&cfg, &spec) {
                    assert!(t.exponent >= 0.0);
                }
            }
        }
    }

    #[test]
    fn edge_height_identity_mu_r() {
        // mu(sigma) r(sigma, zeta) = Z^-1 exp(-beta H(sigma, zeta)) whenever
        // r(sigma, zeta) > 0, for MH and cyclic.
        let d = dims33();
        let beta = 1.3;
        for spec in [DynamicsSpec::mh(3), DynamicsSpec::cyclic(3)] {
            for idx in (0..19683u64).step_by(509) {
                let sigma = SpinConfig::decode(d, 3, idx);
                let mu = (-beta * hamiltonian(&sigma) as f64).exp();
                for term in outgoing_rates(&sigma, &spec) {
                    let zeta = term.apply(&sigma);
                    let h = edge_height(&sigma, &zeta, &spec).unwrap();
                    let lhs = mu * term.rate(beta);
                    let rhs = (-beta * h).exp();
                    assert!((lhs - rhs).abs() <= 1e-12 * rhs);
                }
            }
        }
    }

    #[test]
    fn stationarity_residuals() {
        let d = dims33();
        let guard = DEFAULT_STATE_GUARD;
        let r = verify_stationarity(&DynamicsSpec::mh(2), d, 2.0, guard).unwrap();
        assert_eq!(r.max_residual, 0.0);
        for spec in [
            DynamicsSpec::cyclic(3),
            DynamicsSpec {
                kind: DynKind::PCyclic { p: 1.0 },
                q: 3,
            },
            DynamicsSpec {
                kind: DynKind::PCyclic { p: 0.3 },
                q: 3,
            },
            DynamicsSpec {
                kind: DynKind::PDirected { p: 0.3 },
                q: 2,
            },
        ] {
            let r = verify_stationarity(&spec, d, 1.0, guard).unwrap();
            assert!(
                r.max_residual <= 1e-12,
                "{:?}: residual {}",
                spec.kind,
                r.max_residual
            );
        }
    }

    #[test]
    fn partition_function_values() {
        let d = dims33();
        let pf = partition_function(d, 2, 0.0, DEFAULT_STATE_GUARD).unwrap();
        assert_eq!(pf.z, 512.0);
        assert_eq!(pf.spectrum[&0], 2);
        assert_eq!(pf.spectrum[&4], 18); // single flips
        let z3 = pf.at_beta(3.0);
        let expected = 2.0 + 18.0 * (-12.0f64).exp();
        assert!((z3 - expected).abs() / expected < 1e-3);
    }
}
