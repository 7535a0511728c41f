use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use super::element::{Block, OpticalElement};
use super::mode::ModeRegistry;
use crate::{Error, Result, C64};

/// Amplitudes smaller than this are dropped after every element.
pub const PRUNE_EPS: f64 = 1e-14;

/// Sorted list of occupied mode indices, one entry per photon. This is the
/// occupation vector in multiset form.
pub type Photons = SmallVec<[u16; 10]>;

pub(crate) fn sqrt_factorial(n: usize) -> f64 {
    (2..=n).map(|k| k as f64).product::<f64>().sqrt()
}

/// `Π_m sqrt(n_m!)` over the distinct modes of a sorted photon list.
pub(crate) fn bosonic_weight(photons: &[u16]) -> f64 {
    let mut w = 1.0;
    let mut i = 0;
    while i < photons.len() {
        let mut j = i + 1;
        while j < photons.len() && photons[j] == photons[i] {
            j += 1;
        }
        w *= sqrt_factorial(j - i);
        i = j;
    }
    w
}

pub(crate) fn merge(a: &[u16], b: &[u16]) -> Photons {
    let mut out = Photons::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[j]);
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sparse superposition of Fock basis states over a fixed mode registry.
///
/// Keys are sorted photon lists, so iteration order (and every derived sum)
/// is deterministic. The state need not be normalized: after post-selection
/// or loss-path removal its squared norm is the branch probability.
#[derive(Clone, Debug)]
pub struct FockState {
    registry: Arc<ModeRegistry>,
    terms: BTreeMap<Photons, C64>,
}

impl FockState {
    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Photons::new(), C64::new(1.0, 0.0));
        FockState { registry, terms }
    }

    /// Build from `(photon list, amplitude)` pairs; lists need not be sorted.
    pub fn from_terms<I>(registry: Arc<ModeRegistry>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u16>, C64)>,
    {
        let n = registry.len() as u16;
        let mut map: BTreeMap<Photons, C64> = BTreeMap::new();
        for (mut photons, amp) in terms {
            if let Some(&m) = photons.iter().find(|&&m| m >= n) {
                return Err(Error::InvalidParameter(format!("mode index {m} outside registry")));
            }
            photons.sort_unstable();
            *map.entry(Photons::from_vec(photons)).or_default() += amp;
        }
        let mut s = FockState { registry, terms: map };
        s.prune();
        Ok(s)
    }

    pub(crate) fn from_map(registry: Arc<ModeRegistry>, terms: BTreeMap<Photons, C64>) -> Self {
        let mut s = FockState { registry, terms };
        s.prune();
        s
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Photons, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, photons: &[u16]) -> C64 {
        let mut key = Photons::from_slice(photons);
        key.sort_unstable();
        self.terms.get(&key).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    /// The renormalized state and its former squared norm.
    pub fn normalized(&self) -> Result<(FockState, f64)> {
        let n = self.norm_sqr();
        if n <= 0.0 {
            return Err(Error::ZeroProbability);
        }
        Ok((self.scaled(C64::new(1.0 / n.sqrt(), 0.0)), n))
    }

    pub fn scaled(&self, c: C64) -> FockState {
        FockState {
            registry: self.registry.clone(),
            terms: self.terms.iter().map(|(k, a)| (k.clone(), a * c)).collect(),
        }
    }

    /// Distinct total photon numbers present.
    pub fn photon_numbers(&self) -> BTreeSet<usize> {
        self.terms.keys().map(|k| k.len()).collect()
    }

    pub fn inner(&self, other: &FockState) -> C64 {
        self.terms
            .iter()
            .filter_map(|(k, a)| other.terms.get(k).map(|b| a.conj() * b))
            .sum()
    }

    /// Photons per registered path for one key.
    pub fn path_counts(&self, photons: &[u16]) -> Vec<usize> {
        let mut counts = vec![0; self.registry.paths().len()];
        for &m in photons {
            counts[self.registry.decompose(m).0] += 1;
        }
        counts
    }

    /// Keep only the terms for which `keep` holds. Used to drop branches
    /// that can no longer reach an accepted detection pattern.
    pub fn retain(&self, mut keep: impl FnMut(&[u16]) -> bool) -> FockState {
        FockState {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, a)| (k.clone(), *a))
                .collect(),
        }
    }

    /// Split terms by a key function. The parts are mutually orthogonal, so
    /// their squared norms add up to this state's.
    pub fn partition<K: Ord>(&self, mut key: impl FnMut(&[u16]) -> K) -> BTreeMap<K, FockState> {
        let mut out: BTreeMap<K, BTreeMap<Photons, C64>> = BTreeMap::new();
        for (k, a) in &self.terms {
            out.entry(key(k)).or_default().insert(k.clone(), *a);
        }
        out.into_iter()
            .map(|(k, terms)| {
                (
                    k,
                    FockState {
                        registry: self.registry.clone(),
                        terms,
                    },
                )
            })
            .collect()
    }

    /// Remove every photon on `path`, keeping the photons elsewhere. Terms
    /// that differed only on `path` are orthogonal and stay separate: the
    /// result is one branch per distinct removed configuration.
    pub fn trace_path(&self, path: &str) -> Result<Vec<(Photons, FockState)>> {
        let p = self.registry.path_index(path)?;
        let reg = &self.registry;
        let mut branches: BTreeMap<Photons, BTreeMap<Photons, C64>> = BTreeMap::new();
        for (k, a) in &self.terms {
            let (gone, kept): (Photons, Photons) = k.iter().copied().partition(|&m| reg.decompose(m).0 == p);
            *branches.entry(gone).or_default().entry(kept).or_default() += *a;
        }
        Ok(branches
            .into_iter()
            .map(|(gone, terms)| (gone, FockState::from_map(self.registry.clone(), terms)))
            .collect())
    }

    pub fn apply(&self, element: &OpticalElement) -> Result<FockState> {
        let blocks = element.blocks(&self.registry)?;
        Ok(self.apply_blocks(&blocks))
    }

    pub fn apply_all<'a>(&self, elements: impl IntoIterator<Item = &'a OpticalElement>) -> Result<FockState> {
        let mut s = self.clone();
        for e in elements {
            s = s.apply(e)?;
        }
        Ok(s)
    }

    fn apply_blocks(&self, blocks: &[Block]) -> FockState {
        let mut owner: Vec<Option<usize>> = vec![None; self.registry.len()];
        for (b, block) in blocks.iter().enumerate() {
            for &m in &block.modes {
                owner[m as usize] = Some(b);
            }
        }
        let mut memo: HashMap<(usize, Photons), Vec<(Photons, C64)>> = HashMap::new();
        let mut out: BTreeMap<Photons, C64> = BTreeMap::new();
        let mut parts: Vec<Photons> = vec![Photons::new(); blocks.len()];
        for (key, amp) in &self.terms {
            for p in parts.iter_mut() {
                p.clear();
            }
            let mut outside = Photons::new();
            for &m in key {
                match owner[m as usize] {
                    Some(b) => parts[b].push(m),
                    None => outside.push(m),
                }
            }
            let mut acc: Vec<(Photons, C64)> = vec![(outside, *amp)];
            for (b, inside) in parts.iter().enumerate() {
                if inside.is_empty() {
                    continue;
                }
                let expansion = memo
                    .entry((b, inside.clone()))
                    .or_insert_with(|| blocks[b].expand(inside));
                let mut next = Vec::with_capacity(acc.len() * expansion.len());
                for (base, c) in &acc {
                    for (sub, d) in expansion.iter() {
                        next.push((merge(base, sub), c * d));
                    }
                }
                acc = next;
            }
            for (k, a) in acc {
                *out.entry(k).or_default() += a;
            }
        }
        FockState::from_map(self.registry.clone(), out)
    }

    /// Apply a polynomial in creation operators: `Σ c · Π a†_m |self⟩`.
    /// The result is not normalized.
    pub fn create(&self, poly: &CreationPoly) -> FockState {
        let mut out: BTreeMap<Photons, C64> = BTreeMap::new();
        for (key, amp) in &self.terms {
            let w_in = bosonic_weight(key);
            for (mono, c) in &poly.terms {
                let merged = merge(key, mono);
                let w = bosonic_weight(&merged) / w_in;
                *out.entry(merged).or_default() += amp * c * w;
            }
        }
        FockState::from_map(self.registry.clone(), out)
    }

    fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm() >= PRUNE_EPS);
    }

    /// Human-readable occupation of one key, e.g. `3:H 4:V#1`.
    pub fn describe(&self, photons: &[u16]) -> String {
        photons
            .iter()
            .map(|&m| self.registry.mode(m).to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, a) in &self.terms {
            writeln!(f, "({:+.6}{:+.6}i) |{}⟩", a.re, a.im, self.describe(k))?;
        }
        Ok(())
    }
}

/// Polynomial in creation operators, keyed by sorted monomials.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CreationPoly {
    terms: BTreeMap<Photons, C64>,
}

impl CreationPoly {
    pub fn one() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Photons::new(), C64::new(1.0, 0.0));
        CreationPoly { terms }
    }

    /// `Σ c_m a†_m`.
    pub fn linear(parts: impl IntoIterator<Item = (u16, C64)>) -> Self {
        let mut terms = BTreeMap::new();
        for (m, c) in parts {
            *terms.entry(Photons::from_slice(&[m])).or_insert(C64::new(0.0, 0.0)) += c;
        }
        CreationPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Photons, &C64)> {
        self.terms.iter()
    }

    pub fn scaled(&self, c: C64) -> Self {
        CreationPoly {
            terms: self.terms.iter().map(|(k, a)| (k.clone(), a * c)).collect(),
        }
    }

    pub fn add(&self, other: &CreationPoly) -> Self {
        let mut terms = self.terms.clone();
        for (k, a) in &other.terms {
            *terms.entry(k.clone()).or_default() += a;
        }
        CreationPoly { terms }
    }

    pub fn mul(&self, other: &CreationPoly) -> Self {
        let mut terms: BTreeMap<Photons, C64> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *terms.entry(merge(a, b)).or_default() += ca * cb;
            }
        }
        terms.retain(|_, c| c.norm() >= PRUNE_EPS);
        CreationPoly { terms }
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(CreationPoly::one(), |acc, _| acc.mul(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::mode::Polarization;

    fn reg() -> Arc<ModeRegistry> {
        Arc::new(ModeRegistry::new(["a", "b"], 1).unwrap())
    }

    #[test]
    fn sqrt_factorial_table() {
        let mut f = 1.0f64;
        for n in 0..13 {
            if n > 0 {
                f *= n as f64;
            }
            assert!((sqrt_factorial(n) - f.sqrt()).abs() / f.sqrt() < 1e-14);
        }
    }

    #[test]
    fn creation_normalization() {
        let r = reg();
        let a = r.mode_index("a", Polarization::H, 0).unwrap();
        let poly = CreationPoly::linear([(a, C64::new(1.0, 0.0))]).pow(2);
        let s = FockState::vacuum(r).create(&poly);
        // (a†)² |0⟩ = √2 |2⟩
        assert!((s.amplitude(&[a, a]).re - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn trace_path_branches() {
        let r = reg();
        let a = r.mode_index("a", Polarization::H, 0).unwrap();
        let b = r.mode_index("b", Polarization::V, 0).unwrap();
        let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let s = FockState::from_terms(r, [(vec![a], h), (vec![b], h)]).unwrap();
        let branches = s.trace_path("b").unwrap();
        assert_eq!(branches.len(), 2);
        let total: f64 = branches.iter().map(|(_, s)| s.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}
