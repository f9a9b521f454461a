//! Truncated Fock space over a finite set of propagation-constant bins,
//! carrying the indefinite (Krein) inner product of the physical, gauge,
//! and ghost ladder algebra, the Gupta-Bleuler classification, and
//! wave-packet creation operators.
//!
//! The continuum delta(beta - beta') is booked as Kronecker/width on bins,
//! so a bin of width w contributes a factor 1/w per excitation to inner
//! products. Physical excitations pair diagonally; gauge and ghost
//! excitations pair only with each other. Consequently the annihilator
//! associated with the gauge sector lowers ghost occupation and vice
//! versa, which is exactly why "no ghost excitations" is equivalent to
//! the Gupta-Bleuler condition.

use crate::error::{Error, Result};
use crate::fiber_modes::ModeKey;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Hard cap on total occupation; covers two photons per interferometer arm
/// with headroom while keeping states tiny.
pub const OCCUPATION_CAP: u32 = 4;

/// Which ladder family an excitation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExcitationKind {
    /// a-type; pairs with itself.
    Physical,
    /// b-type; pairs with ghost excitations.
    Gauge,
    /// c-type; pairs with gauge excitations.
    Ghost,
}

impl ExcitationKind {
    /// The kind an annihilator of `self`'s sector actually lowers.
    fn lowers(self) -> ExcitationKind {
        match self {
            ExcitationKind::Physical => ExcitationKind::Physical,
            ExcitationKind::Gauge => ExcitationKind::Ghost,
            ExcitationKind::Ghost => ExcitationKind::Gauge,
        }
    }
}

/// One propagation-constant bin of a mode branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBin {
    pub key: ModeKey,
    pub beta_center: f64,
    pub width: f64,
}

/// The shared bin universe states are built over.
#[derive(Debug, Clone, PartialEq)]
pub struct BinSet {
    bins: Vec<ModeBin>,
}

impl BinSet {
    /// Validates positive widths and, per (family, m, kappa) branch,
    /// pairwise-disjoint bin intervals.
    pub fn new(bins: Vec<ModeBin>) -> Result<Arc<Self>> {
        for bin in &bins {
            if !(bin.width > 0.0) {
                return Err(Error::Domain(format!(
                    "bin width must be positive, got {}",
                    bin.width
                )));
            }
        }
        for (i, a) in bins.iter().enumerate() {
            for b in bins.iter().skip(i + 1) {
                let same_branch = a.key.family == b.key.family
                    && a.key.m == b.key.m
                    && a.key.kappa == b.key.kappa;
                if same_branch {
                    let gap = (a.beta_center - b.beta_center).abs();
                    if gap < 0.5 * (a.width + b.width) - 1e-15 * gap.max(1.0) {
                        return Err(Error::Domain(format!(
                            "bins at beta {} and {} overlap",
                            a.beta_center, b.beta_center
                        )));
                    }
                }
            }
        }
        Ok(Arc::new(Self { bins }))
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn bin(&self, idx: usize) -> &ModeBin {
        &self.bins[idx]
    }

    /// 1/width: the delta(0) surrogate of the bin.
    fn weight(&self, idx: usize) -> f64 {
        1.0 / self.bins[idx].width
    }
}

/// Occupation numbers per (bin, kind), sparse and sorted; no zero entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Occupation(Vec<(u16, ExcitationKind, u8)>);

impl Occupation {
    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    pub fn single(bin: u16, kind: ExcitationKind) -> Self {
        Self(vec![(bin, kind, 1)])
    }

    pub fn from_counts(mut counts: Vec<(u16, ExcitationKind, u8)>) -> Self {
        counts.retain(|&(_, _, n)| n > 0);
        counts.sort();
        Self(counts)
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&(_, _, n)| n as u32).sum()
    }

    pub fn count(&self, bin: u16, kind: ExcitationKind) -> u8 {
        self.0
            .iter()
            .find(|&&(b, k, _)| b == bin && k == kind)
            .map_or(0, |&(_, _, n)| n)
    }

    fn with_count(&self, bin: u16, kind: ExcitationKind, n: u8) -> Self {
        let mut items: Vec<_> = self
            .0
            .iter()
            .copied()
            .filter(|&(b, k, _)| !(b == bin && k == kind))
            .collect();
        if n > 0 {
            items.push((bin, kind, n));
        }
        items.sort();
        Self(items)
    }

    pub fn has_kind(&self, kind: ExcitationKind) -> bool {
        self.0.iter().any(|&(_, k, n)| k == kind && n > 0)
    }

    /// Swap gauge and ghost counts; the occupation this one pairs with.
    fn dual(&self) -> Self {
        let mut items: Vec<_> = self
            .0
            .iter()
            .map(|&(b, k, n)| (b, k.lowers(), n))
            .collect();
        items.sort();
        Self(items)
    }

    pub fn entries(&self) -> &[(u16, ExcitationKind, u8)] {
        &self.0
    }
}

/// Gupta-Bleuler classification of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    Ghost,
    Gauge,
    Physical,
}

/// The single-excitation pseudo-inner-product matrix over all
/// (bin, kind) slots: physical excitations pair diagonally with weight
/// 1/width, gauge and ghost pair off-diagonally with the same weight,
/// and the gauge and ghost diagonals vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct GramStructure {
    /// Slot order: for each bin, (Physical, Gauge, Ghost).
    pub matrix: Vec<Vec<f64>>,
}

impl GramStructure {
    pub fn of(bins: &BinSet) -> Self {
        let kinds = [
            ExcitationKind::Physical,
            ExcitationKind::Gauge,
            ExcitationKind::Ghost,
        ];
        let n = 3 * bins.len();
        let mut matrix = vec![vec![0.0; n]; n];
        for (row, cell) in matrix.iter_mut().enumerate() {
            let (bin_r, kind_r) = (row / 3, kinds[row % 3]);
            for (col, value) in cell.iter_mut().enumerate() {
                let (bin_c, kind_c) = (col / 3, kinds[col % 3]);
                if bin_r == bin_c && kind_c == kind_r.lowers() {
                    *value = bins.weight(bin_r);
                }
            }
        }
        Self { matrix }
    }

    /// Hermitian by construction (real symmetric here).
    pub fn is_hermitian(&self) -> bool {
        let n = self.matrix.len();
        (0..n).all(|i| (0..n).all(|j| self.matrix[i][j] == self.matrix[j][i]))
    }

    /// The indefiniteness marker: any gauge/ghost block contributes a
    /// hyperbolic (+w, -w) eigenvalue pair.
    pub fn is_indefinite(&self) -> bool {
        !self.matrix.is_empty()
    }
}

/// A vector in the truncated Krein-Fock space: finitely many occupation
/// basis kets with complex amplitudes. Basis kets carry the usual
/// sqrt(n!) normalization, so creation acts with sqrt(n + 1).
#[derive(Debug, Clone)]
pub struct KreinState {
    bins: Arc<BinSet>,
    amplitudes: BTreeMap<Occupation, Complex64>,
}

impl KreinState {
    pub fn vacuum(bins: Arc<BinSet>) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(Occupation::vacuum(), Complex64::new(1.0, 0.0));
        Self { bins, amplitudes }
    }

    pub fn zero(bins: Arc<BinSet>) -> Self {
        Self {
            bins,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn bins(&self) -> &Arc<BinSet> {
        &self.bins
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.amplitudes
            .get(occ)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn occupations(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.values().all(|a| a.norm() == 0.0)
    }

    fn insert(&mut self, occ: Occupation, amp: Complex64) {
        if amp.norm_sqr() == 0.0 {
            return;
        }
        let entry = self
            .amplitudes
            .entry(occ)
            .or_insert(Complex64::new(0.0, 0.0));
        *entry += amp;
        if entry.norm_sqr() == 0.0 {
            // exact cancellation; drop the ket
            let key = self
                .amplitudes
                .iter()
                .find(|(_, v)| v.norm_sqr() == 0.0)
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.amplitudes.remove(&k);
            }
        }
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = Self::zero(self.bins.clone());
        for (occ, amp) in &self.amplitudes {
            out.insert(occ.clone(), amp * factor);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if !Arc::ptr_eq(&self.bins, &other.bins) && self.bins.as_ref() != other.bins.as_ref() {
            return Err(Error::UniverseMismatch);
        }
        let mut out = self.clone();
        for (occ, amp) in &other.amplitudes {
            out.insert(occ.clone(), *amp);
        }
        Ok(out)
    }

    /// Apply the creation operator of (kind, bin): sqrt(n+1) on that slot.
    pub fn create(&self, kind: ExcitationKind, bin: usize) -> Result<Self> {
        if bin >= self.bins.len() {
            return Err(Error::Domain(format!("bin index {bin} out of range")));
        }
        let mut out = Self::zero(self.bins.clone());
        for (occ, amp) in &self.amplitudes {
            if occ.total() + 1 > OCCUPATION_CAP {
                return Err(Error::CapExceeded {
                    cap: OCCUPATION_CAP,
                });
            }
            let n = occ.count(bin as u16, kind);
            let raised = occ.with_count(bin as u16, kind, n + 1);
            out.insert(raised, amp * ((n as f64) + 1.0).sqrt());
        }
        Ok(out)
    }

    /// Apply the annihilation operator of (kind, bin). Per the commutator
    /// algebra this lowers the occupation of the kind it pairs with
    /// (physical lowers physical, gauge lowers ghost, ghost lowers gauge)
    /// and carries the bin weight: sqrt(n)/width.
    pub fn annihilate(&self, kind: ExcitationKind, bin: usize) -> Result<Self> {
        if bin >= self.bins.len() {
            return Err(Error::Domain(format!("bin index {bin} out of range")));
        }
        let target = kind.lowers();
        let weight = self.bins.weight(bin);
        let mut out = Self::zero(self.bins.clone());
        for (occ, amp) in &self.amplitudes {
            let n = occ.count(bin as u16, target);
            if n == 0 {
                continue;
            }
            let lowered = occ.with_count(bin as u16, target, n - 1);
            out.insert(lowered, amp * (n as f64).sqrt() * weight);
        }
        Ok(out)
    }

    /// The indefinite inner product <self|other>.
    ///
    /// On basis kets it is diagonal once gauge and ghost occupations are
    /// swapped on one side, with a factor 1/width per excitation:
    /// <n_a, n_b, n_c | m_a, m_b, m_c> =
    ///     delta(n_a, m_a) delta(n_b, m_c) delta(n_c, m_b) w^(-N).
    pub fn pseudo_inner(&self, other: &Self) -> Result<Complex64> {
        if !Arc::ptr_eq(&self.bins, &other.bins) && self.bins.as_ref() != other.bins.as_ref() {
            return Err(Error::UniverseMismatch);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for (occ, amp) in &self.amplitudes {
            let partner = occ.dual();
            let other_amp = other.amplitude(&partner);
            if other_amp.norm_sqr() == 0.0 {
                continue;
            }
            let mut weight = 1.0;
            for &(bin, _, n) in occ.entries() {
                weight *= self.bins.weight(bin as usize).powi(n as i32);
            }
            sum += amp.conj() * other_amp * weight;
        }
        Ok(sum)
    }

    /// Real pseudo-norm <self|self>.
    pub fn pseudo_norm(&self) -> f64 {
        let v = self.pseudo_inner(self).expect("same universe");
        debug_assert!(v.im.abs() <= 1e-12 * v.re.abs().max(1.0));
        v.re
    }

    /// Positive-definite magnitude sum |amp|^2 w^N, used as the scale
    /// against which "zero pseudo-norm" is judged.
    fn magnitude(&self) -> f64 {
        let mut sum = 0.0;
        for (occ, amp) in &self.amplitudes {
            let mut weight = 1.0;
            for &(bin, _, n) in occ.entries() {
                weight *= self.bins.weight(bin as usize).powi(n as i32);
            }
            sum += amp.norm_sqr() * weight;
        }
        sum
    }

    /// Gupta-Bleuler classification. A state is Ghost when the gauge-sector
    /// annihilator fails to kill it, which on this basis means a c-type
    /// excitation is present; among condition-satisfying states, zero
    /// pseudo-norm means Gauge and positive means Physical. A
    /// condition-satisfying state of negative pseudo-norm would violate
    /// the quantization scheme and is reported as a data-integrity error.
    pub fn gupta_bleuler_classify(&self) -> Result<StateClass> {
        let has_ghost = self
            .amplitudes
            .iter()
            .any(|(occ, amp)| amp.norm_sqr() > 0.0 && occ.has_kind(ExcitationKind::Ghost));
        if has_ghost {
            return Ok(StateClass::Ghost);
        }
        let norm = self.pseudo_norm();
        let scale = self.magnitude().max(f64::MIN_POSITIVE);
        if norm.abs() <= 1e-12 * scale {
            Ok(StateClass::Gauge)
        } else if norm > 0.0 {
            Ok(StateClass::Physical)
        } else {
            Err(Error::DataIntegrity(format!(
                "Gupta-Bleuler-satisfying state with negative pseudo-norm {norm}"
            )))
        }
    }

    /// Representative of the state's class in the quotient by gauge
    /// states: every component carrying a b-type excitation is dropped.
    /// This preserves all inner products against condition-satisfying
    /// states (such components pair only with c-type excitations, which
    /// those states do not have). A purely gauge state maps to the zero
    /// vector. Ghost states are rejected.
    pub fn gauge_quotient(&self) -> Result<Self> {
        if self.gupta_bleuler_classify()? == StateClass::Ghost {
            return Err(Error::GhostState);
        }
        let mut out = Self::zero(self.bins.clone());
        for (occ, amp) in &self.amplitudes {
            if !occ.has_kind(ExcitationKind::Gauge) {
                out.insert(occ.clone(), *amp);
            }
        }
        Ok(out)
    }
}

/// A normalized wave-packet creation operator
/// a_psi^dagger = sum_bins psi(bin) width(bin) a_bin^dagger.
#[derive(Debug, Clone)]
pub struct WavepacketCreator {
    kind: ExcitationKind,
    /// (bin index, psi(bin) * width(bin))
    terms: Vec<(usize, Complex64)>,
}

impl WavepacketCreator {
    /// Build from amplitudes psi over all bins of the universe; requires
    /// sum |psi|^2 width = 1 to 1e-12.
    pub fn new(
        bins: &Arc<BinSet>,
        kind: ExcitationKind,
        psi: &[Complex64],
    ) -> Result<Self> {
        if psi.len() != bins.len() {
            return Err(Error::Domain(format!(
                "psi has {} entries for {} bins",
                psi.len(),
                bins.len()
            )));
        }
        let norm: f64 = psi
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * bins.bin(i).width)
            .sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Unnormalized { norm });
        }
        Ok(Self {
            kind,
            terms: psi
                .iter()
                .enumerate()
                .filter(|(_, a)| a.norm_sqr() > 0.0)
                .map(|(i, a)| (i, a * bins.bin(i).width))
                .collect(),
        })
    }

    /// Linear-combination creator with explicit coefficients (already
    /// weighted); used for beam-splitter output expansions.
    pub fn from_coefficients(
        kind: ExcitationKind,
        terms: Vec<(usize, Complex64)>,
    ) -> Self {
        Self { kind, terms }
    }

    /// a_psi^dagger |state>
    pub fn create(&self, state: &KreinState) -> Result<KreinState> {
        let mut out = KreinState::zero(state.bins().clone());
        for &(bin, coeff) in &self.terms {
            out = out.add(&state.create(self.kind, bin)?.scaled(coeff))?;
        }
        Ok(out)
    }

    /// a_psi |state> (the adjoint of `create`).
    pub fn annihilate(&self, state: &KreinState) -> Result<KreinState> {
        let mut out = KreinState::zero(state.bins().clone());
        for &(bin, coeff) in &self.terms {
            out = out.add(&state.annihilate(self.kind, bin)?.scaled(coeff.conj()))?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber_modes::ModeFamily;

    fn test_bins(widths: &[f64]) -> Arc<BinSet> {
        let bins = widths
            .iter()
            .enumerate()
            .map(|(i, &w)| ModeBin {
                key: ModeKey {
                    family: ModeFamily::Physical,
                    beta: 5.9,
                    m: 1,
                    kappa: 1,
                },
                beta_center: 5.9 + i as f64 * 1.0,
                width: w,
            })
            .collect();
        BinSet::new(bins).unwrap()
    }

    #[test]
    fn binset_rejects_overlap_on_shared_branch() {
        let key = ModeKey {
            family: ModeFamily::Physical,
            beta: 5.9,
            m: 1,
            kappa: 1,
        };
        let overlapping = vec![
            ModeBin {
                key,
                beta_center: 5.9,
                width: 0.2,
            },
            ModeBin {
                key,
                beta_center: 5.95,
                width: 0.2,
            },
        ];
        assert!(BinSet::new(overlapping).is_err());
    }

    #[test]
    fn single_physical_excitation_norm_carries_bin_weight() {
        let bins = test_bins(&[0.25]);
        let vac = KreinState::vacuum(bins);
        let one = vac.create(ExcitationKind::Physical, 0).unwrap();
        // <1|1> = 1/width = 4
        assert!((one.pseudo_norm() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn gauge_excitation_has_zero_norm_and_pairs_with_ghost() {
        let bins = test_bins(&[0.5]);
        let vac = KreinState::vacuum(bins);
        let b = vac.create(ExcitationKind::Gauge, 0).unwrap();
        let c = vac.create(ExcitationKind::Ghost, 0).unwrap();
        assert_eq!(b.pseudo_norm(), 0.0);
        assert_eq!(c.pseudo_norm(), 0.0);
        let cross = b.pseudo_inner(&c).unwrap();
        assert!((cross.re - 2.0).abs() < 1e-14 && cross.im == 0.0);
    }

    #[test]
    fn gram_structure_blocks() {
        let bins = test_bins(&[0.5, 0.25]);
        let gram = GramStructure::of(&bins);
        assert!(gram.is_hermitian());
        assert!(gram.is_indefinite());
        // bin 0: physical diagonal 1/w, gauge/ghost off-diagonal 1/w,
        // gauge and ghost diagonals zero
        assert_eq!(gram.matrix[0][0], 2.0);
        assert_eq!(gram.matrix[1][1], 0.0);
        assert_eq!(gram.matrix[2][2], 0.0);
        assert_eq!(gram.matrix[1][2], 2.0);
        assert_eq!(gram.matrix[2][1], 2.0);
        // no cross-bin coupling
        assert_eq!(gram.matrix[0][3], 0.0);
        assert_eq!(gram.matrix[1][5], 0.0);
        // bin 1 weight
        assert_eq!(gram.matrix[3][3], 4.0);
        // the hyperbolic gauge/ghost block makes (b - c) a negative
        // direction: [0, 1, -1] . G . [0, 1, -1] = -2/w
        let v = [0.0, 1.0, -1.0, 0.0, 0.0, 0.0];
        let mut quad = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                quad += v[i] * gram.matrix[i][j] * v[j];
            }
        }
        assert_eq!(quad, -4.0);
    }

    #[test]
    fn indefiniteness_witness() {
        let bins = test_bins(&[1.0]);
        let vac = KreinState::vacuum(bins);
        let b = vac.create(ExcitationKind::Gauge, 0).unwrap();
        let c = vac.create(ExcitationKind::Ghost, 0).unwrap();
        let plus = b.add(&c).unwrap();
        let minus = b.add(&c.scaled(Complex64::new(-1.0, 0.0))).unwrap();
        assert!((plus.pseudo_norm() - 2.0).abs() < 1e-14);
        assert!((minus.pseudo_norm() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn classification_of_elementary_states() {
        let bins = test_bins(&[1.0]);
        let vac = KreinState::vacuum(bins);
        assert_eq!(vac.gupta_bleuler_classify().unwrap(), StateClass::Physical);
        let a = vac.create(ExcitationKind::Physical, 0).unwrap();
        assert_eq!(a.gupta_bleuler_classify().unwrap(), StateClass::Physical);
        let b = vac.create(ExcitationKind::Gauge, 0).unwrap();
        assert_eq!(b.gupta_bleuler_classify().unwrap(), StateClass::Gauge);
        let c = vac.create(ExcitationKind::Ghost, 0).unwrap();
        assert_eq!(c.gupta_bleuler_classify().unwrap(), StateClass::Ghost);
    }

    #[test]
    fn cap_is_enforced() {
        let bins = test_bins(&[1.0]);
        let mut state = KreinState::vacuum(bins);
        for _ in 0..OCCUPATION_CAP {
            state = state.create(ExcitationKind::Physical, 0).unwrap();
        }
        assert!(matches!(
            state.create(ExcitationKind::Physical, 0),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn gauge_quotient_strips_b_components() {
        let bins = test_bins(&[1.0]);
        let vac = KreinState::vacuum(bins.clone());
        let a = vac.create(ExcitationKind::Physical, 0).unwrap();
        let b = vac.create(ExcitationKind::Gauge, 0).unwrap();
        let mixed = a.add(&b).unwrap();
        let rep = mixed.gauge_quotient().unwrap();
        assert_eq!(rep.amplitude(&Occupation::single(0, ExcitationKind::Physical)),
            Complex64::new(1.0, 0.0));
        assert_eq!(rep.amplitudes.len(), 1);
        // products against any condition-satisfying state are unchanged
        let probe = a.clone();
        let before = mixed.pseudo_inner(&probe).unwrap();
        let after = rep.pseudo_inner(&probe).unwrap();
        assert_eq!(before, after);
        // vacuum maps to itself
        let vq = vac.gauge_quotient().unwrap();
        assert_eq!(vq.amplitude(&Occupation::vacuum()), Complex64::new(1.0, 0.0));
        // pure gauge collapses to the zero vector of the quotient class
        let bb = b.create(ExcitationKind::Gauge, 0).unwrap();
        assert!(bb.gauge_quotient().unwrap().is_zero());
        // ghosts are rejected
        let c = vac.create(ExcitationKind::Ghost, 0).unwrap();
        assert!(matches!(c.gauge_quotient(), Err(Error::GhostState)));
    }

    #[test]
    fn wavepacket_creator_normalization() {
        let bins = test_bins(&[0.5, 0.5]);
        let vac = KreinState::vacuum(bins.clone());
        let amp = Complex64::new(1.0, 0.0);
        // sum |psi|^2 w = 1 -> psi = 1/sqrt(2 w)
        let psi = vec![amp / (2.0_f64 * 0.5).sqrt(); 2];
        let creator = WavepacketCreator::new(&bins, ExcitationKind::Physical, &psi).unwrap();
        let photon = creator.create(&vac).unwrap();
        // [a_psi, a_psi^dagger] = 1 -> the single-photon state has norm 1
        assert!((photon.pseudo_norm() - 1.0).abs() < 1e-12);
        // unnormalized input is rejected
        let bad = vec![amp, amp * 0.3];
        assert!(matches!(
            WavepacketCreator::new(&bins, ExcitationKind::Physical, &bad),
            Err(Error::Unnormalized { .. })
        ));
        // single-bin packet reduces to the elementary creator up to the
        // normalization of the amplitude
        let single = test_bins(&[0.25]);
        let svac = KreinState::vacuum(single.clone());
        let spsi = vec![Complex64::new(2.0, 0.0)]; // |psi|^2 w = 1
        let sc = WavepacketCreator::new(&single, ExcitationKind::Physical, &spsi).unwrap();
        let sp = sc.create(&svac).unwrap();
        let elementary = svac.create(ExcitationKind::Physical, 0).unwrap();
        let expect = elementary.scaled(Complex64::new(2.0 * 0.25, 0.0));
        let occ = Occupation::single(0, ExcitationKind::Physical);
        assert_eq!(sp.amplitude(&occ), expect.amplitude(&occ));
    }

    #[test]
    fn wavepacket_overlap_formula() {
        // <0| a_psi a_phi^dagger |0> = sum psi* phi width
        let bins = test_bins(&[0.3, 0.7]);
        let vac = KreinState::vacuum(bins.clone());
        // psi concentrated on bin 0, phi spread over both, each normalized
        let psi = vec![
            Complex64::new(1.0 / 0.3_f64.sqrt(), 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let spread = (0.3_f64 * 0.5 + 0.7).sqrt();
        let phi = vec![
            Complex64::new(0.0, 0.5_f64.sqrt() / spread),
            Complex64::new(1.0 / spread, 0.0),
        ];
        let cpsi = WavepacketCreator::new(&bins, ExcitationKind::Physical, &psi).unwrap();
        let cphi = WavepacketCreator::new(&bins, ExcitationKind::Physical, &phi).unwrap();
        let ppsi = cpsi.create(&vac).unwrap();
        let pphi = cphi.create(&vac).unwrap();
        let overlap = ppsi.pseudo_inner(&pphi).unwrap();
        let expect: Complex64 = psi
            .iter()
            .zip(phi.iter())
            .enumerate()
            .map(|(i, (a, b))| a.conj() * b * bins.bin(i).width)
            .sum();
        assert!((overlap - expect).norm() <= 1e-14 * expect.norm());
    }
}
