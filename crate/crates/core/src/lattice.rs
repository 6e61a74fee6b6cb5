//! Torus geometry, spin configurations, the Hamiltonian and structural
//! classifiers (bridges, crosses, low-energy types).

use crate::error::LatticeError;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Dimensions of the periodic K x L box, with K <= L enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticeDims {
    k: usize,
    l: usize,
}

impl LatticeDims {
    pub fn new(k: usize, l: usize) -> Result<Self, LatticeError> {
        if k < 2 || k > l {
            return Err(LatticeError::BadDims { k, l });
        }
        Ok(LatticeDims { k, l })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn sites(&self) -> usize {
        self.k * self.l
    }

    pub fn is_square(&self) -> bool {
        self.k == self.l
    }

    /// The standing assumption of the asymptotic theory is K, L >= 11.
    pub fn paper_regime(&self) -> bool {
        self.k >= 11 && self.l >= 11
    }

    /// K or L below 3 collapses two lattice directions onto one edge.
    pub fn degenerate_torus(&self) -> bool {
        self.k < 3 || self.l < 3
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.k + x
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.k, site / self.k)
    }

    /// Neighbor in the east, north, west, south direction respectively.
    pub fn east(&self, site: usize) -> usize {
        let (x, y) = self.coords(site);
        self.index((x + 1) % self.k, y)
    }

    pub fn west(&self, site: usize) -> usize {
        let (x, y) = self.coords(site);
        self.index((x + self.k - 1) % self.k, y)
    }

    pub fn north(&self, site: usize) -> usize {
        let (x, y) = self.coords(site);
        self.index(x, (y + 1) % self.l)
    }

    pub fn south(&self, site: usize) -> usize {
        let (x, y) = self.coords(site);
        self.index(x, (y + self.l - 1) % self.l)
    }

    /// Distinct edges incident to `site`. For K = 2 (resp. L = 2) the east
    /// and west (resp. north and south) neighbors coincide and the shared
    /// edge is listed once, so that every unordered torus pair is counted
    /// exactly once.
    pub fn incident(&self, site: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(4);
        out.push(self.east(site));
        if self.k > 2 {
            out.push(self.west(site));
        }
        out.push(self.north(site));
        if self.l > 2 {
            out.push(self.south(site));
        }
        out
    }

    /// Canonical list of unordered nearest-neighbor pairs, each exactly once.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2 * self.sites());
        for site in 0..self.sites() {
            let (x, y) = self.coords(site);
            if self.k > 2 || x == 0 {
                out.push((site, self.east(site)));
            }
            if self.l > 2 || y == 0 {
                out.push((site, self.north(site)));
            }
        }
        out
    }
}

/// A full spin assignment on the torus; entries take values 1..=q.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfig {
    dims: LatticeDims,
    q: u8,
    spins: Vec<u8>,
}

impl SpinConfig {
    pub fn new(dims: LatticeDims, q: u8, spins: Vec<u8>) -> Result<Self, LatticeError> {
        assert!(q >= 2, "need at least two spin values");
        if spins.len() != dims.sites() {
            return Err(LatticeError::BadText(format!(
                "expected {} spins, got {}",
                dims.sites(),
                spins.len()
            )));
        }
        for &s in &spins {
            if s == 0 || s > q {
                return Err(LatticeError::BadSpin { spin: s, q });
            }
        }
        Ok(SpinConfig { dims, q, spins })
    }

    /// The monochromatic configuration with all spins equal to `a`.
    pub fn monochromatic(dims: LatticeDims, q: u8, a: u8) -> Self {
        assert!(a >= 1 && a <= q);
        SpinConfig {
            dims,
            q,
            spins: vec![a; dims.sites()],
        }
    }

    pub fn dims(&self) -> LatticeDims {
        self.dims
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn spins(&self) -> &[u8] {
        &self.spins
    }

    pub fn get(&self, site: usize) -> u8 {
        self.spins[site]
    }

    pub fn set(&mut self, site: usize, spin: u8) {
        debug_assert!(spin >= 1 && spin <= self.q);
        self.spins[site] = spin;
    }

    /// The configuration with the spin at `site` updated to `a`.
    pub fn with_spin(&self, site: usize, a: u8) -> Self {
        let mut out = self.clone();
        out.set(site, a);
        out
    }

    /// Rotate the spin at `site` forward: a -> a+1 with q+1 = 1.
    pub fn rotate(&self, site: usize) -> Self {
        let mut out = self.clone();
        out.set(site, out.get(site) % out.q + 1);
        out
    }

    /// Rotate the spin at `site` backward: a -> a-1 with 1-1 = q.
    pub fn rotate_back(&self, site: usize) -> Self {
        let mut out = self.clone();
        let s = out.get(site);
        out.set(site, if s == 1 { out.q } else { s - 1 });
        out
    }

    pub fn is_monochromatic(&self) -> Option<u8> {
        let first = self.spins[0];
        self.spins.iter().all(|&s| s == first).then_some(first)
    }

    /// Number of sites with spin `a`.
    pub fn spin_count(&self, a: u8) -> usize {
        self.spins.iter().filter(|&&s| s == a).count()
    }

    /// Base-q little-endian encoding over sites; bijective on the full space.
    pub fn encode(&self) -> u64 {
        let mut idx: u64 = 0;
        for &s in self.spins.iter().rev() {
            idx = idx * self.q as u64 + (s - 1) as u64;
        }
        idx
    }

    pub fn decode(dims: LatticeDims, q: u8, mut idx: u64) -> Self {
        let mut spins = vec![1u8; dims.sites()];
        for s in spins.iter_mut() {
            *s = (idx % q as u64) as u8 + 1;
            idx /= q as u64;
        }
        SpinConfig { dims, q, spins }
    }

    /// Total number of configurations q^(K*L), checked against `guard`.
    pub fn space_size(dims: LatticeDims, q: u8, guard: u64) -> Result<u64, LatticeError> {
        let mut n: u128 = 1;
        for _ in 0..dims.sites() {
            n *= q as u128;
            if n > guard as u128 {
                return Err(LatticeError::SpaceTooLarge { states: n, guard });
            }
        }
        Ok(n as u64)
    }

    /// Transpose on a square torus: (Theta sigma)(k, l) = sigma(l, k).
    pub fn transpose(&self) -> Result<Self, LatticeError> {
        if !self.dims.is_square() {
            return Err(LatticeError::NotSquare {
                k: self.dims.k,
                l: self.dims.l,
            });
        }
        let n = self.dims.k;
        let mut spins = vec![0u8; self.spins.len()];
        for y in 0..n {
            for x in 0..n {
                spins[self.dims.index(x, y)] = self.spins[self.dims.index(y, x)];
            }
        }
        Ok(SpinConfig {
            dims: self.dims,
            q: self.q,
            spins,
        })
    }

    /// Textual form: a `q K L` header, then L rows of K spin digits.
    pub fn to_text(&self) -> Result<String, LatticeError> {
        if self.q > 9 {
            return Err(LatticeError::TextQTooLarge(self.q));
        }
        let mut out = format!("{} {} {}\n", self.q, self.dims.k, self.dims.l);
        for y in 0..self.dims.l {
            for x in 0..self.dims.k {
                out.push((b'0' + self.spins[self.dims.index(x, y)]) as char);
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn from_text(text: &str) -> Result<Self, LatticeError> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| LatticeError::BadText("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let mut next_num = |name: &str| -> Result<usize, LatticeError> {
            parts
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| LatticeError::BadText(format!("bad header field {name}")))
        };
        let q = next_num("q")? as u8;
        let k = next_num("K")?;
        let l = next_num("L")?;
        let dims = LatticeDims::new(k, l)?;
        let mut spins = Vec::with_capacity(dims.sites());
        for _ in 0..l {
            let row = lines
                .next()
                .ok_or_else(|| LatticeError::BadText("missing row".into()))?;
            let row = row.trim();
            if row.len() != k {
                return Err(LatticeError::BadText(format!(
                    "row `{row}` has length {} != K={k}",
                    row.len()
                )));
            }
            for ch in row.chars() {
                let d = ch
                    .to_digit(10)
                    .ok_or_else(|| LatticeError::BadText(format!("bad digit `{ch}`")))?;
                spins.push(d as u8);
            }
        }
        SpinConfig::new(dims, q, spins)
    }
}

impl fmt::Display for SpinConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_text() {
            Ok(t) => f.write_str(&t),
            Err(_) => write!(f, "<spin config q={} {:?}>", self.q, self.dims),
        }
    }
}

/// Count of unordered nearest-neighbor pairs with disagreeing spins.
pub fn hamiltonian(sigma: &SpinConfig) -> u32 {
    let dims = sigma.dims();
    let mut h = 0u32;
    for (a, b) in dims.edges() {
        if sigma.get(a) != sigma.get(b) {
            h += 1;
        }
    }
    h
}

/// H(sigma^{x,a}) - H(sigma) evaluated from the edges incident to `x` only.
pub fn flip_delta(sigma: &SpinConfig, site: usize, a: u8) -> i32 {
    let old = sigma.get(site);
    if old == a {
        return 0;
    }
    let mut delta = 0i32;
    for nbr in sigma.dims().incident(site) {
        let s = sigma.get(nbr);
        delta += (a != s) as i32 - (old != s) as i32;
    }
    delta
}

/// Row/column decomposition of H plus bridge and cross bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeProfile {
    /// Number of monochromatic rows/columns per spin value (index spin-1).
    pub bridges_per_spin: Vec<u32>,
    pub horizontal_per_spin: Vec<u32>,
    pub vertical_per_spin: Vec<u32>,
    /// Spin owning both a horizontal and a vertical bridge, if any.
    pub cross_spin: Option<u8>,
    /// In-row horizontal edge disagreements, one entry per row.
    pub row_costs: Vec<u32>,
    /// In-column vertical edge disagreements, one entry per column.
    pub col_costs: Vec<u32>,
}

impl BridgeProfile {
    pub fn total_bridges(&self) -> u32 {
        self.bridges_per_spin.iter().sum()
    }

    pub fn has_cross(&self) -> bool {
        self.cross_spin.is_some()
    }
}

pub fn bridge_profile(sigma: &SpinConfig) -> BridgeProfile {
    let dims = sigma.dims();
    let (k, l, q) = (dims.k(), dims.l(), sigma.q() as usize);
    let mut horizontal = vec![0u32; q];
    let mut vertical = vec![0u32; q];
    let mut row_costs = vec![0u32; l];
    let mut col_costs = vec![0u32; k];

    for y in 0..l {
        let first = sigma.get(dims.index(0, y));
        let mut mono = true;
        for x in 0..k {
            let site = dims.index(x, y);
            if sigma.get(site) != first {
                mono = false;
            }
            // horizontal edge (x, y)-(x+1, y); counted once for K = 2
            if k > 2 || x == 0 {
                if sigma.get(site) != sigma.get(dims.east(site)) {
                    row_costs[y] += 1;
                }
            }
        }
        if mono {
            horizontal[first as usize - 1] += 1;
        }
    }
    for x in 0..k {
        let first = sigma.get(dims.index(x, 0));
        let mut mono = true;
        for y in 0..l {
            let site = dims.index(x, y);
            if sigma.get(site) != first {
                mono = false;
            }
            if l > 2 || y == 0 {
                if sigma.get(site) != sigma.get(dims.north(site)) {
                    col_costs[x] += 1;
                }
            }
        }
        if mono {
            vertical[first as usize - 1] += 1;
        }
    }

    let mut cross_spin = None;
    let mut bridges = vec![0u32; q];
    for s in 0..q {
        bridges[s] = horizontal[s] + vertical[s];
        if horizontal[s] > 0 && vertical[s] > 0 && cross_spin.is_none() {
            cross_spin = Some(s as u8 + 1);
        }
    }
    BridgeProfile {
        bridges_per_spin: bridges,
        horizontal_per_spin: horizontal,
        vertical_per_spin: vertical,
        cross_spin,
        row_costs,
        col_costs,
    }
}

/// A two-spin configuration whose minority band occupies `v` consecutive
/// rows (or columns when transposed on a square lattice).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandShape {
    /// Background spin.
    pub a: u8,
    /// Band spin.
    pub b: u8,
    /// First band row (or column).
    pub ell: usize,
    /// Band height, 1..=L-1.
    pub v: usize,
    pub transposed: bool,
}

/// Detect whether `sigma` is a regular band configuration xi_{ell,v}^{a,b}
/// with 1 <= v <= L-1; both orientations are reported on square lattices.
pub fn band_shapes(sigma: &SpinConfig) -> Vec<BandShape> {
    let mut out = Vec::new();
    detect_rows(sigma, false, &mut out);
    if sigma.dims().is_square() {
        if let Ok(t) = sigma.transpose() {
            let mut tr = Vec::new();
            detect_rows(&t, true, &mut tr);
            out.extend(tr);
        }
    }
    out
}

fn detect_rows(sigma: &SpinConfig, transposed: bool, out: &mut Vec<BandShape>) {
    let dims = sigma.dims();
    let (k, l) = (dims.k(), dims.l());
    // row colors, all rows must be monochromatic
    let mut colors = Vec::with_capacity(l);
    for y in 0..l {
        let first = sigma.get(dims.index(0, y));
        for x in 1..k {
            if sigma.get(dims.index(x, y)) != first {
                return;
            }
        }
        colors.push(first);
    }
    let distinct: std::collections::BTreeSet<u8> = colors.iter().copied().collect();
    if distinct.len() != 2 {
        return;
    }
    let spins: Vec<u8> = distinct.into_iter().collect();
    // the b-rows must be circularly consecutive; try both spin assignments
    for (a, b) in [(spins[0], spins[1]), (spins[1], spins[0])] {
        let rows: Vec<usize> = (0..l).filter(|&y| colors[y] == b).collect();
        let v = rows.len();
        if v == 0 || v == l {
            continue;
        }
        // find ell such that rows == { ell, ell+1, ..., ell+v-1 } mod L
        'ell: for &ell in &rows {
            for n in 0..v {
                if colors[(ell + n) % l] != b {
                    continue 'ell;
                }
            }
            out.push(BandShape {
                a,
                b,
                ell,
                v,
                transposed,
            });
            break;
        }
    }
}

/// Low-energy classification of configurations with H < 2K+2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LowEnergyClass {
    /// Regular band of height v in 2..=L-2.
    L1 { a: u8, b: u8, v: usize },
    /// Band of height 1 (or L-1, read from the other ground state).
    L2 { a: u8, b: u8 },
    /// Configuration with an a-cross.
    L3 { a: u8 },
    AboveThreshold,
}

/// Outcome of `classify_low_energy`: either a class or an explicit gap
/// report for lattices outside the K, L >= 11 regime.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Class(LowEnergyClass),
    /// H < 2K+2 but no type matched; carries (H, lower bound on minority size).
    Gap { h: u32 },
}

pub fn classify_low_energy(sigma: &SpinConfig) -> Classification {
    let h = hamiltonian(sigma);
    let gamma_mh = 2 * sigma.dims().k() as u32 + 2;
    if h >= gamma_mh {
        return Classification::Class(LowEnergyClass::AboveThreshold);
    }
    let profile = bridge_profile(sigma);
    if let Some(a) = profile.cross_spin {
        // isoperimetric bound on the minority mass
        let minority: usize = (1..=sigma.q())
            .filter(|&s| s != a)
            .map(|s| sigma.spin_count(s))
            .sum();
        debug_assert!(16 * minority as u64 <= (h as u64) * (h as u64));
        return Classification::Class(LowEnergyClass::L3 { a });
    }
    let l = sigma.dims().l();
    for shape in band_shapes(sigma) {
        if shape.v >= 2 && shape.v <= l - 2 {
            return Classification::Class(LowEnergyClass::L1 {
                a: shape.a,
                b: shape.b,
                v: shape.v,
            });
        }
        if shape.v == 1 {
            return Classification::Class(LowEnergyClass::L2 {
                a: shape.a,
                b: shape.b,
            });
        }
    }
    Classification::Gap { h }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(k: usize, l: usize) -> LatticeDims {
        LatticeDims::new(k, l).unwrap()
    }

    /// xi_{ell,v}^{a,b}: spins b on rows ell..ell+v-1, a elsewhere.
    pub(crate) fn band(d: LatticeDims, q: u8, a: u8, b: u8, ell: usize, v: usize) -> SpinConfig {
        let mut cfg = SpinConfig::monochromatic(d, q, a);
        for n in 0..v {
            let y = (ell + n) % d.l();
            for x in 0..d.k() {
                cfg.set(d.index(x, y), b);
            }
        }
        cfg
    }

    /// Band plus a protuberance of length h on the upper (+) side.
    pub(crate) fn band_protub(
        d: LatticeDims,
        q: u8,
        a: u8,
        b: u8,
        ell: usize,
        v: usize,
        k0: usize,
        h: usize,
    ) -> SpinConfig {
        let mut cfg = band(d, q, a, b, ell, v);
        let y = (ell + v) % d.l();
        for n in 0..h {
            cfg.set(d.index((k0 + n) % d.k(), y), b);
        }
        cfg
    }

    #[test]
    fn hamiltonian_monochromatic_is_zero() {
        for (k, l, q) in [(2, 2, 2), (3, 3, 3), (11, 12, 4)] {
            let cfg = SpinConfig::monochromatic(dims(k, l), q, 1);
            assert_eq!(hamiltonian(&cfg), 0);
        }
    }

    #[test]
    fn hamiltonian_band_values_11_12() {
        let d = dims(11, 12);
        // xi^{1,2}_{0,3}: H = 2K = 22 = Gamma_MH - 2
        let cfg = band(d, 2, 1, 2, 0, 3);
        assert_eq!(hamiltonian(&cfg), 22);
        // xi^{1,2,+}_{0,3;0,5}: H = 2K + 2 = 24 = Gamma_MH
        let cfg = band_protub(d, 2, 1, 2, 0, 3, 0, 5);
        assert_eq!(hamiltonian(&cfg), 24);
    }

    #[test]
    fn single_flip_costs_four() {
        let d = dims(5, 7);
        let cfg = SpinConfig::monochromatic(d, 3, 1);
        assert_eq!(flip_delta(&cfg, d.index(2, 3), 2), 4);
        assert_eq!(flip_delta(&cfg, d.index(2, 3), 1), 0);
        let flipped = cfg.with_spin(d.index(2, 3), 2);
        assert_eq!(hamiltonian(&flipped), 4);
    }

    #[test]
    fn flip_delta_matches_hamiltonian_difference() {
        let d = dims(11, 12);
        let cfg = band(d, 3, 1, 2, 0, 3);
        // interior of the spin-2 band, flip to 1
        let site = d.index(4, 1);
        let target = cfg.with_spin(site, 1);
        assert_eq!(
            flip_delta(&cfg, site, 1),
            hamiltonian(&target) as i32 - hamiltonian(&cfg) as i32
        );
        assert_eq!(flip_delta(&cfg, site, 1), 4);
    }

    #[test]
    fn flip_delta_consistent_on_degenerate_torus() {
        // K = 2 duplicates east/west; the edge must be counted once.
        let d = dims(2, 4);
        for idx in 0..16u64 {
            let cfg = SpinConfig::decode(d, 2, idx);
            for site in 0..d.sites() {
                for a in 1..=2u8 {
                    let target = cfg.with_spin(site, a);
                    assert_eq!(
                        flip_delta(&cfg, site, a),
                        hamiltonian(&target) as i32 - hamiltonian(&cfg) as i32,
                        "site {site} a {a} idx {idx}"
                    );
                }
            }
        }
    }

    #[test]
    fn bridges_on_monochromatic() {
        let d = dims(11, 12);
        let cfg = SpinConfig::monochromatic(d, 2, 1);
        let p = bridge_profile(&cfg);
        assert_eq!(p.bridges_per_spin[0], 23); // K + L
        assert!(p.has_cross());
    }

    #[test]
    fn bridges_on_band() {
        let d = dims(11, 12);
        let cfg = band(d, 2, 1, 2, 0, 3);
        let p = bridge_profile(&cfg);
        assert_eq!(p.bridges_per_spin[0], 9);
        assert_eq!(p.bridges_per_spin[1], 3);
        assert_eq!(p.vertical_per_spin, vec![0, 0]);
        assert!(!p.has_cross());
    }

    #[test]
    fn bridges_on_single_flip() {
        let d = dims(11, 12);
        let cfg = SpinConfig::monochromatic(d, 2, 1).with_spin(5, 2);
        let p = bridge_profile(&cfg);
        assert_eq!(p.total_bridges(), (11 + 12 - 2) as u32);
        assert_eq!(p.cross_spin, Some(1));
    }

    #[test]
    fn row_col_costs_decompose_h() {
        let d = dims(4, 5);
        for idx in [0u64, 17, 123456, 987654, 1 << 19] {
            let cfg = SpinConfig::decode(d, 2, idx);
            let p = bridge_profile(&cfg);
            let total: u32 =
                p.row_costs.iter().sum::<u32>() + p.col_costs.iter().sum::<u32>();
            assert_eq!(total, hamiltonian(&cfg));
            // H >= 2 [K + L - sum_a B_a]
            let lb = 2 * (4 + 5 - p.total_bridges() as i64);
            assert!(hamiltonian(&cfg) as i64 >= lb);
        }
    }

    #[test]
    fn classify_examples() {
        let d = dims(11, 12);
        let cfg = band(d, 2, 1, 2, 0, 3);
        assert_eq!(
            classify_low_energy(&cfg),
            Classification::Class(LowEnergyClass::L1 { a: 1, b: 2, v: 3 })
        );
        let cfg = band(d, 2, 1, 2, 0, 1);
        assert_eq!(
            classify_low_energy(&cfg),
            Classification::Class(LowEnergyClass::L2 { a: 1, b: 2 })
        );
        let cfg = SpinConfig::monochromatic(d, 2, 1).with_spin(17, 2);
        assert_eq!(
            classify_low_energy(&cfg),
            Classification::Class(LowEnergyClass::L3 { a: 1 })
        );
        let cfg = band_protub(d, 2, 1, 2, 0, 3, 0, 5);
        assert_eq!(
            classify_low_energy(&cfg),
            Classification::Class(LowEnergyClass::AboveThreshold)
        );
    }

    #[test]
    fn transpose_involution_preserves_h() {
        let d = dims(11, 11);
        let cfg = band(d, 3, 1, 2, 0, 3);
        let t = cfg.transpose().unwrap();
        assert_eq!(hamiltonian(&t), hamiltonian(&cfg));
        assert_eq!(t.transpose().unwrap(), cfg);
        assert!(SpinConfig::monochromatic(d, 2, 1)
            .transpose()
            .unwrap()
            .is_monochromatic()
            .is_some());
        let rect = band(dims(3, 4), 2, 1, 2, 0, 1);
        assert!(rect.transpose().is_err());
    }

    #[test]
    fn spin_counts() {
        let d = dims(11, 12);
        let cfg = band(d, 2, 1, 2, 0, 3);
        assert_eq!(cfg.spin_count(2), 33);
        assert_eq!(cfg.spin_count(1) + cfg.spin_count(2), d.sites());
        let single = SpinConfig::monochromatic(d, 3, 1).with_spin(0, 3);
        assert_eq!(single.spin_count(3), 1);
    }

    #[test]
    fn encode_decode_roundtrip() {
        let d = dims(3, 3);
        for idx in 0..19683u64 {
            let cfg = SpinConfig::decode(d, 3, idx);
            assert_eq!(cfg.encode(), idx);
        }
    }

    #[test]
    fn text_roundtrip() {
        let d = dims(4, 5);
        let cfg = band_protub(d, 3, 1, 2, 1, 2, 2, 2);
        let text = cfg.to_text().unwrap();
        assert_eq!(SpinConfig::from_text(&text).unwrap(), cfg);
    }
}
