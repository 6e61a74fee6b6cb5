//! Closed-form model constants and the asymptotic p-cyclic prefactors.

use crate::dynamics::{DynKind, DynamicsSpec};
use crate::error::LadderError;
use crate::ladder::{build_aux_chain_cyclic, build_aux_chain_mh};
use serde::Serialize;

/// The assembled constants of one (K, L, q, dynamics) instance.
#[derive(Debug, Clone, Serialize)]
pub struct ModelConstants {
    pub k: usize,
    pub l: usize,
    pub q: u8,
    /// 1 when K < L, 1/2 when K = L.
    pub nu0: f64,
    /// Energy barrier of the dynamics.
    pub gamma: f64,
    /// Bulk constant; None for dynamics without a stated display.
    pub bulk: Option<f64>,
    /// Edge constant e = nu0 * e0 / L.
    pub edge: Option<f64>,
    /// Ladder capacity constant e0 (MH) or e0-bar (cyclic).
    pub e0: Option<f64>,
    /// kappa = bulk + 2 edge.
    pub kappa: Option<f64>,
}

impl ModelConstants {
    /// c0(P, Q) = |P||Q| / (kappa (|P| + |Q|)).
    pub fn c0(&self, p: usize, q: usize) -> f64 {
        let kappa = self.kappa.expect("kappa requires MH or cyclic dynamics");
        (p * q) as f64 / (kappa * (p + q) as f64)
    }

    /// Deviation of kappa from its large-K limit nu0 / 4.
    pub fn kappa_asymptotic_gap(&self) -> Option<f64> {
        self.kappa.map(|k| k - self.nu0 / 4.0)
    }
}

pub fn nu0(k: usize, l: usize) -> f64 {
    assert!(k <= l);
    if k < l {
        1.0
    } else {
        0.5
    }
}

pub fn gamma(k: usize, spec: &DynamicsSpec) -> f64 {
    match spec.kind {
        DynKind::Mh => 2.0 * k as f64 + 2.0,
        DynKind::Cyclic | DynKind::PCyclic { .. } => 2.0 * k as f64 + 4.0,
        DynKind::PDirected { p } => 2.0 * k as f64 + 4.0 * p.min(1.0 - p),
    }
}

pub fn bulk_constant(k: usize, l: usize, spec: &DynamicsSpec) -> Option<f64> {
    let v = nu0(k, l);
    match spec.kind {
        DynKind::Mh => Some(v * ((k + 2) * (l - 4)) as f64 / (4 * k * l) as f64),
        DynKind::Cyclic => Some(v * ((k - 2) * (l - 4)) as f64 / (4 * k * l) as f64),
        _ => None,
    }
}

/// Assemble nu0, Gamma, bulk and edge constants and kappa. The edge
/// constant requires the ladder auxiliary-chain solve.
pub fn model_constants(
    k: usize,
    l: usize,
    q: u8,
    spec: &DynamicsSpec,
) -> Result<ModelConstants, LadderError> {
    assert!(k <= l, "orient inputs so that K <= L");
    let v = nu0(k, l);
    let e0 = match spec.kind {
        DynKind::Mh => Some(build_aux_chain_mh(k)?.e0),
        DynKind::Cyclic => Some(build_aux_chain_cyclic(k, q, 1)?.e0_bar),
        _ => None,
    };
    let bulk = bulk_constant(k, l, spec);
    let edge = e0.map(|e0| v * e0 / l as f64);
    let kappa = match (bulk, edge) {
        (Some(b), Some(e)) => Some(b + 2.0 * e),
        _ => None,
    };
    Ok(ModelConstants {
        k,
        l,
        q,
        nu0: v,
        gamma: gamma(k, spec),
        bulk,
        edge,
        e0,
        kappa,
    })
}

/// Leading term of the p-cyclic Eyring-Kramers prefactor kappa_i:
/// nu0 (1+ph)(1+...+ph^{i-1})(1+...+ph^{q-i-1}) / (4 (1+...+ph^{q-1}))
/// with ph = min(p, 1-p)/max(p, 1-p), and ph = 0 at p in {0, 1}.
pub fn pcyclic_kappa_asymptotic(k: usize, l: usize, q: u8, p: f64, i: u8) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p outside [0,1]");
    assert!(i >= 1 && i < q, "i must lie in 1..q-1");
    let _ = k;
    let ph = if p == 0.0 || p == 1.0 {
        0.0
    } else {
        p.min(1.0 - p) / p.max(1.0 - p)
    };
    let geom = |n: u8| -> f64 { (0..n).map(|j| ph.powi(j as i32)).sum() };
    nu0(k, l) * (1.0 + ph) * geom(i) * geom(q - i) / (4.0 * geom(q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nu0_values() {
        assert_eq!(nu0(11, 12), 1.0);
        assert_eq!(nu0(11, 11), 0.5);
    }

    #[test]
    fn bulk_mh_11_12() {
        // 13 * 8 / (4 * 132) = 13/66
        let b = bulk_constant(11, 12, &DynamicsSpec::mh(2)).unwrap();
        assert!((b - 13.0 / 66.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma(11, &DynamicsSpec::mh(2)), 24.0);
        assert_eq!(gamma(11, &DynamicsSpec::cyclic(3)), 26.0);
        let pd = DynamicsSpec {
            kind: DynKind::PDirected { p: 0.25 },
            q: 2,
        };
        assert_eq!(gamma(11, &pd), 23.0);
    }

    #[test]
    fn kappa_assembly() {
        let c = model_constants(11, 12, 2, &DynamicsSpec::mh(2)).unwrap();
        let (b, e, kappa) = (c.bulk.unwrap(), c.edge.unwrap(), c.kappa.unwrap());
        assert_eq!(kappa, b + 2.0 * e);
        // c0 identities behind the EK pair kappa/(q-1) and kappa
        assert!((c.c0(1, 1) - 1.0 / (2.0 * kappa)).abs() < 1e-15);
        let q = 3usize;
        let c3 = model_constants(11, 12, 3, &DynamicsSpec::mh(3)).unwrap();
        let kappa3 = c3.kappa.unwrap();
        assert!(
            (c3.c0(1, q - 1) - (q - 1) as f64 / (kappa3 * q as f64)).abs() < 1e-15
        );
    }

    #[test]
    fn pcyclic_asymptotic_examples() {
        // p = 1 (ph = 0), q = 3: nu0/4
        let v = pcyclic_kappa_asymptotic(11, 12, 3, 1.0, 1);
        assert!((v - 0.25).abs() < 1e-15);
        // p = 1/2 (ph = 1), q = 3, i = 1: nu0 * 2*1*2/(4*3) = 1/3
        let v = pcyclic_kappa_asymptotic(11, 12, 3, 0.5, 1);
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        // symmetry kappa_i = kappa_{q-i} for q = 5
        for p in [0.2, 0.35, 0.5] {
            for i in 1..5u8 {
                let a = pcyclic_kappa_asymptotic(11, 12, 5, p, i);
                let b = pcyclic_kappa_asymptotic(11, 12, 5, p, 5 - i);
                assert!((a - b).abs() < 1e-14);
            }
        }
        // monotone increasing in p on [0, 1/2]
        let mut last = -1.0;
        for step in 0..=10 {
            let p = 0.05 * step as f64;
            let v = pcyclic_kappa_asymptotic(11, 12, 4, p, 1);
            assert!(v >= last - 1e-15);
            last = v;
        }
    }

    #[test]
    fn pcyclic_limit_matches_cyclic_leading_term() {
        // the p in {0,1} asymptotic equals nu0/4, the cyclic large-K limit
        for (k, l) in [(11, 12), (12, 12)] {
            let v = pcyclic_kappa_asymptotic(k, l, 3, 0.0, 2);
            assert!((v - nu0(k, l) / 4.0).abs() < 1e-15);
        }
    }
}
