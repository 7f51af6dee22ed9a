//! The event-multiset (nonpersistence) model and the symmetrization
//! procedures connecting it to the labelled model: the amplitude rule
//! (signed permutation sums, equivalently permanents and determinants of
//! propagator submatrices), the state-based forms on reduced configuration
//! space, observables on that space, and the textbook product-state
//! symmetrization kept for contrast experiments.

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{determinant, permanent};
use crate::lattice::{Amplitude, CMatrix, CVector, SingleParticlePropagator, SingleParticleState};
use crate::perm::{all_permutations, factorial, parity, MAX_ENUMERATED};
use crate::persistence::{config_index, decode_index, PermutationAmplitudes, PersistenceState};

/// Exchange statistics: the sign in the symmetrization rule, equivalently
/// the permanent-vs-determinant branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeStatistics {
    Boson,
    Fermion,
}

impl ExchangeStatistics {
    pub fn sign(self) -> f64 {
        match self {
            ExchangeStatistics::Boson => 1.0,
            ExchangeStatistics::Fermion => -1.0,
        }
    }

    pub fn perm_sign(self, sigma: &[usize]) -> f64 {
        match self {
            ExchangeStatistics::Boson => 1.0,
            ExchangeStatistics::Fermion => parity(sigma),
        }
    }
}

impl std::fmt::Display for ExchangeStatistics {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExchangeStatistics::Boson => write!(f, "boson"),
            ExchangeStatistics::Fermion => write!(f, "fermion"),
        }
    }
}

/// Sorted (non-decreasing) tuple of lattice sites: the bare record of
/// identical localized events at one time.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventMultiset {
    events: Vec<usize>,
}

impl EventMultiset {
    /// Sorts the input; rejects empty tuples and off-lattice sites.
    pub fn new(mut events: Vec<usize>, sites: usize) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::ParticleCountMismatch(0, 1));
        }
        for &e in &events {
            if e >= sites {
                return Err(Error::EventOutsideLattice { event: e, sites });
            }
        }
        events.sort_unstable();
        Ok(Self { events })
    }

    pub fn events(&self) -> &[usize] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn min_event(&self) -> usize {
        self.events[0]
    }

    pub fn max_event(&self) -> usize {
        *self.events.last().unwrap()
    }

    pub fn strictly_increasing(&self) -> bool {
        self.events.windows(2).all(|w| w[0] < w[1])
    }

    /// Multiplicity weight w(m) = 1 / prod_j (mult_j!), the reduced-space
    /// measure that makes permanent-based amplitudes unitary as stored.
    pub fn weight(&self) -> f64 {
        let mut w = 1.0;
        let mut run = 1usize;
        for i in 1..self.events.len() {
            if self.events[i] == self.events[i - 1] {
                run += 1;
                w /= run as f64;
            } else {
                run = 1;
            }
        }
        w
    }

    /// All sorted multisets of `n` events on `sites` sites, lexicographic.
    pub fn enumerate(sites: usize, n: usize) -> Vec<EventMultiset> {
        (0..sites)
            .combinations_with_replacement(n)
            .map(|events| EventMultiset { events })
            .collect()
    }

    /// All strictly increasing tuples of `n` events, lexicographic.
    pub fn enumerate_strict(sites: usize, n: usize) -> Vec<EventMultiset> {
        (0..sites)
            .combinations(n)
            .map(|events| EventMultiset { events })
            .collect()
    }

    /// Multisets valid under the given statistics.
    pub fn enumerate_for(sites: usize, n: usize, stats: ExchangeStatistics) -> Vec<EventMultiset> {
        match stats {
            ExchangeStatistics::Boson => Self::enumerate(sites, n),
            ExchangeStatistics::Fermion => Self::enumerate_strict(sites, n),
        }
    }
}

impl std::fmt::Display for EventMultiset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}", self.events.iter().join(","))
    }
}

/// Feynman's rule: the nonpersistence amplitude is the (anti)symmetrized sum
/// of the labelled-model permutation amplitudes.
pub fn symmetrize_amp(
    amps: &PermutationAmplitudes,
    stats: ExchangeStatistics,
) -> Result<Amplitude> {
    let expected = factorial(amps.n());
    if amps.len() != expected {
        return Err(Error::IncompletePermutationMap {
            expected,
            found: amps.len(),
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (sigma, amp) in amps.iter() {
        total += Complex64::new(stats.perm_sign(sigma), 0.0) * amp;
    }
    Ok(total)
}

/// The same amplitude computed as a permanent (bosons) or determinant
/// (fermions) of the propagator submatrix M[j][k] = U[to_j, from_k].
pub fn transition_amplitude(
    u: &SingleParticlePropagator,
    from: &EventMultiset,
    to: &EventMultiset,
    stats: ExchangeStatistics,
) -> Result<Amplitude> {
    let n = from.len();
    if n != to.len() {
        return Err(Error::ParticleCountMismatch(n, to.len()));
    }
    for &e in from.events().iter().chain(to.events()) {
        if e >= u.sites() {
            return Err(Error::EventOutsideLattice {
                event: e,
                sites: u.sites(),
            });
        }
    }
    let m = DMatrix::from_fn(n, n, |j, k| u.amp(to.events()[j], from.events()[k]));
    match stats {
        ExchangeStatistics::Boson => permanent(&m),
        ExchangeStatistics::Fermion => determinant(&m),
    }
}

/// Born-rule weight of observing `to` given events `from`:
/// |amplitude|^2 * w(from) * w(to). Sums to one over all final multisets.
pub fn transition_probability(
    u: &SingleParticlePropagator,
    from: &EventMultiset,
    to: &EventMultiset,
    stats: ExchangeStatistics,
) -> Result<f64> {
    if stats == ExchangeStatistics::Fermion
        && !(from.strictly_increasing() && to.strictly_increasing())
    {
        return Err(Error::CoincidentFermionEvents);
    }
    let amp = transition_amplitude(u, from, to, stats)?;
    Ok(amp.norm_sqr() * from.weight() * to.weight())
}

/// Wavefunction over reduced configuration space (sorted event tuples),
/// normalized under the multiplicity-weighted measure.
#[derive(Debug, Clone)]
pub struct NonpersistenceState {
    amplitudes: BTreeMap<EventMultiset, Amplitude>,
    statistics: ExchangeStatistics,
    sites: usize,
    n: usize,
}

impl NonpersistenceState {
    /// Normalizes the given map; rejects empty, non-finite, or (for
    /// fermions) coincident-event entries.
    pub fn new(
        amplitudes: BTreeMap<EventMultiset, Amplitude>,
        statistics: ExchangeStatistics,
        sites: usize,
    ) -> Result<Self> {
        let mut n = None;
        for (m, a) in &amplitudes {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NonFiniteAmplitude);
            }
            match n {
                None => n = Some(m.len()),
                Some(k) if k != m.len() => {
                    return Err(Error::ParticleCountMismatch(k, m.len()));
                }
                _ => {}
            }
            if m.max_event() >= sites {
                return Err(Error::EventOutsideLattice {
                    event: m.max_event(),
                    sites,
                });
            }
            if statistics == ExchangeStatistics::Fermion && !m.strictly_increasing() {
                return Err(Error::CoincidentFermionEvents);
            }
        }
        let n = n.ok_or(Error::ParticleCountMismatch(0, 1))?;
        let mut state = Self {
            amplitudes,
            statistics,
            sites,
            n,
        };
        let norm = state.weighted_norm();
        if !norm.is_finite() || norm < 1e-150 {
            return Err(Error::NullState);
        }
        for a in state.amplitudes.values_mut() {
            *a /= Complex64::new(norm, 0.0);
        }
        Ok(state)
    }

    /// State concentrated on a single multiset.
    pub fn concentrated(
        m: EventMultiset,
        statistics: ExchangeStatistics,
        sites: usize,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        map.insert(m, Complex64::new(1.0, 0.0));
        Self::new(map, statistics, sites)
    }

    pub fn statistics(&self) -> ExchangeStatistics {
        self.statistics
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn amplitude(&self, m: &EventMultiset) -> Amplitude {
        self.amplitudes
            .get(m)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EventMultiset, Amplitude)> {
        self.amplitudes.iter().map(|(m, a)| (m, *a))
    }

    /// sqrt( sum_m w(m) |psid(m)|^2 ).
    pub fn weighted_norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|(m, a)| m.weight() * a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max-norm amplitude difference against another state.
    pub fn max_diff(&self, other: &Self) -> f64 {
        let mut keys: Vec<&EventMultiset> = self.amplitudes.keys().collect();
        keys.extend(other.amplitudes.keys());
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|m| (self.amplitude(m) - other.amplitude(m)).norm())
            .fold(0.0, f64::max)
    }
}

/// State-based symmetrization: project a labelled-space wavefunction onto
/// reduced configuration space,
/// psid(sorted m) = sum_sigma (+-1)^sigma psi(m_sigma(0), ..., m_sigma(n-1)),
/// then renormalize. Returns the state together with the norm of the raw
/// projection (the renormalization factor).
pub fn symmetrize_state(
    psi: &PersistenceState,
    stats: ExchangeStatistics,
) -> Result<(NonpersistenceState, f64)> {
    let n = psi.particles();
    if n > MAX_ENUMERATED {
        return Err(Error::TooManyParticles {
            n,
            limit: MAX_ENUMERATED,
        });
    }
    let sites = psi.sites();
    let perms = all_permutations(n);
    let mut map = BTreeMap::new();
    for m in EventMultiset::enumerate_for(sites, n, stats) {
        let mut raw = Complex64::new(0.0, 0.0);
        for sigma in &perms {
            let permuted: Vec<usize> = sigma.iter().map(|&k| m.events()[k]).collect();
            raw += Complex64::new(stats.perm_sign(sigma), 0.0) * psi.amplitude(&permuted);
        }
        map.insert(m, raw);
    }
    let raw_state = NonpersistenceState {
        amplitudes: map,
        statistics: stats,
        sites,
        n,
    };
    let factor = raw_state.weighted_norm();
    if factor < 1e-12 {
        return Err(Error::NullProjection);
    }
    let mut state = raw_state;
    for a in state.amplitudes.values_mut() {
        *a /= Complex64::new(factor, 0.0);
    }
    Ok((state, factor))
}

/// (Anti)symmetric continuation of a reduced-space state to the full
/// labelled configuration space with 1/sqrt(n!) normalization.
#[derive(Debug, Clone)]
pub struct ExtendedState {
    psi_tilde: CVector,
    statistics: ExchangeStatistics,
    sites: usize,
    n: usize,
}

impl ExtendedState {
    pub fn vector(&self) -> &CVector {
        &self.psi_tilde
    }

    pub fn statistics(&self) -> ExchangeStatistics {
        self.statistics
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn norm(&self) -> f64 {
        self.psi_tilde.norm()
    }

    pub fn amplitude(&self, positions: &[usize]) -> Amplitude {
        self.psi_tilde[config_index(positions, self.sites)]
    }

    /// View as a labelled-space state (it lives in the same space).
    pub fn to_persistence(&self) -> Result<PersistenceState> {
        PersistenceState::new(self.psi_tilde.clone(), self.sites, self.n)
    }

    /// Wrap an exchange-(anti)symmetric labelled-space state. Rejects
    /// vectors outside the requested sector.
    pub fn from_persistence(psi: &PersistenceState, stats: ExchangeStatistics) -> Result<Self> {
        let state = Self {
            psi_tilde: psi.vector().clone(),
            statistics: stats,
            sites: psi.sites(),
            n: psi.particles(),
        };
        if state.sector_defect()? > 1e-10 {
            return Err(Error::NullProjection);
        }
        Ok(state)
    }

    /// Max-norm of (P psi -+ psi) over transpositions of adjacent labels;
    /// zero exactly when the state sits in its statistics sector.
    pub fn sector_defect(&self) -> Result<f64> {
        let base = PersistenceState::new(self.psi_tilde.clone(), self.sites, self.n)?;
        let sign = Complex64::new(self.statistics.sign(), 0.0);
        let mut worst = 0.0f64;
        for k in 0..self.n.saturating_sub(1) {
            let mut sigma: Vec<usize> = (0..self.n).collect();
            sigma.swap(k, k + 1);
            let swapped = base.permute_labels(&sigma)?;
            let defect = (swapped.vector() - base.vector() * sign)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            worst = worst.max(defect);
        }
        Ok(worst)
    }
}

/// Extend a reduced-space state over the whole labelled space:
/// psi_tilde(x) = sign(sort permutation) * psid(sorted x) / sqrt(n!).
/// Restricting back to sorted arguments recovers psid exactly.
pub fn extend_state(psid: &NonpersistenceState) -> ExtendedState {
    let n = psid.particles();
    let sites = psid.sites();
    let dim = sites.pow(n as u32);
    let scale = 1.0 / (factorial(n) as f64).sqrt();
    let mut psi_tilde = CVector::zeros(dim);
    let mut config = vec![0usize; n];
    for idx in 0..dim {
        decode_index(idx, sites, &mut config);
        let sign = match psid.statistics() {
            ExchangeStatistics::Boson => 1.0,
            ExchangeStatistics::Fermion => {
                if config.windows(2).any(|w| w[0] == w[1]) {
                    continue; // antisymmetry forces the diagonal to zero
                }
                sorting_parity(&config)
            }
        };
        let mut sorted = config.clone();
        sorted.sort_unstable();
        let m = EventMultiset { events: sorted };
        psi_tilde[idx] = Complex64::new(sign * scale, 0.0) * psid.amplitude(&m);
    }
    ExtendedState {
        psi_tilde,
        statistics: psid.statistics(),
        sites,
        n,
    }
}

/// Restrict an extended state back to sorted arguments:
/// psid(m) = sqrt(n!) * psi_tilde(m), renormalized. Returns the state and
/// the renormalization factor (1 for a well-formed extended state).
pub fn restrict_state(ext: &ExtendedState) -> Result<(NonpersistenceState, f64)> {
    let n = ext.particles();
    let scale = (factorial(n) as f64).sqrt();
    let mut map = BTreeMap::new();
    for m in EventMultiset::enumerate_for(ext.sites(), n, ext.statistics()) {
        map.insert(
            m.clone(),
            ext.amplitude(m.events()) * Complex64::new(scale, 0.0),
        );
    }
    let raw = NonpersistenceState {
        amplitudes: map,
        statistics: ext.statistics(),
        sites: ext.sites(),
        n,
    };
    let factor = raw.weighted_norm();
    if factor < 1e-12 {
        return Err(Error::NullProjection);
    }
    let mut state = raw;
    for a in state.amplitudes.values_mut() {
        *a /= Complex64::new(factor, 0.0);
    }
    Ok((state, factor))
}

/// Parity of the permutation that sorts `config` (distinct entries).
fn sorting_parity(config: &[usize]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..config.len() {
        for j in (i + 1)..config.len() {
            if config[i] > config[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Evolve a reduced-space state by the symmetrized transition amplitudes of
/// a single-particle propagator (non-interacting dynamics):
/// psid'(m) = sum_l w(l) A(m|l) psid(l).
pub fn evolve_reduced(
    psid: &NonpersistenceState,
    u: &SingleParticlePropagator,
) -> Result<NonpersistenceState> {
    if u.sites() != psid.sites() {
        return Err(Error::DimensionMismatch {
            expected: psid.sites(),
            found: u.sites(),
        });
    }
    let stats = psid.statistics();
    let mut map = BTreeMap::new();
    for to in EventMultiset::enumerate_for(psid.sites(), psid.particles(), stats) {
        let mut acc = Complex64::new(0.0, 0.0);
        for (from, a) in psid.iter() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            acc +=
                Complex64::new(from.weight(), 0.0) * transition_amplitude(u, from, &to, stats)? * a;
        }
        map.insert(to, acc);
    }
    Ok(NonpersistenceState {
        amplitudes: map,
        statistics: stats,
        sites: psid.sites(),
        n: psid.particles(),
    })
}

/// Distribution of the left-most event position:
/// P(x) = sum over multisets with minimum x of w(m) |psid(m)|^2.
pub fn leftmost_distribution(psid: &NonpersistenceState) -> Vec<f64> {
    let mut p = vec![0.0; psid.sites()];
    for (m, a) in psid.iter() {
        p[m.min_event()] += m.weight() * a.norm_sqr();
    }
    p
}

/// Distribution of the inter-event distance:
/// P(d) = sum over multisets with max - min = d of w(m) |psid(m)|^2.
pub fn distance_distribution(psid: &NonpersistenceState) -> Vec<f64> {
    let mut p = vec![0.0; psid.sites()];
    for (m, a) in psid.iter() {
        p[m.max_event() - m.min_event()] += m.weight() * a.norm_sqr();
    }
    p
}

/// Textbook product-state symmetrization,
/// (phi_a (x) phi_b +- phi_b (x) phi_a) / norm, living on the labelled
/// tensor-product space. Kept for contrast experiments.
pub fn dirac_symmetrize(
    phi_a: &SingleParticleState,
    phi_b: &SingleParticleState,
    stats: ExchangeStatistics,
) -> Result<ExtendedState> {
    if phi_a.len() != phi_b.len() {
        return Err(Error::DimensionMismatch {
            expected: phi_a.len(),
            found: phi_b.len(),
        });
    }
    let sites = phi_a.len();
    let ab = phi_a.vector().kronecker(phi_b.vector());
    let ba = phi_b.vector().kronecker(phi_a.vector());
    let sign = Complex64::new(stats.sign(), 0.0);
    let combined = ab + ba * sign;
    let norm = combined.norm();
    if norm < 1e-10 {
        return Err(Error::NullState);
    }
    Ok(ExtendedState {
        psi_tilde: combined / Complex64::new(norm, 0.0),
        statistics: stats,
        sites,
        n: 2,
    })
}

/// Which particle label to keep when tracing out the other.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParticleLabel {
    First,
    Second,
}

/// Partial trace of a two-particle labelled-space state over the other
/// label. Hermitian with unit trace.
pub fn reduced_density(psi: &PersistenceState, which: ParticleLabel) -> Result<CMatrix> {
    if psi.particles() != 2 {
        return Err(Error::NotTwoParticles(psi.particles()));
    }
    let s = psi.sites();
    let mut rho = CMatrix::zeros(s, s);
    for x in 0..s {
        for xp in 0..s {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..s {
                let (bra, ket) = match which {
                    ParticleLabel::First => ([x, y], [xp, y]),
                    ParticleLabel::Second => ([y, x], [y, xp]),
                };
                acc += psi.amplitude(&bra) * psi.amplitude(&ket).conj();
            }
            rho[(x, xp)] = acc;
        }
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_hamiltonian, gaussian_packet, propagator, Boundary, LatticeSpec};
    use crate::persistence::all_permutation_amps;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn balanced_two_site() -> SingleParticlePropagator {
        let spec = LatticeSpec::uniform(2, Boundary::Open, 1.0, 0.1);
        let h = build_hamiltonian(&spec).unwrap();
        propagator(&h, std::f64::consts::FRAC_PI_4).unwrap()
    }

    fn disjoint_packets(sites: usize) -> (LatticeSpec, SingleParticleState, SingleParticleState) {
        let spec = LatticeSpec::uniform(sites, Boundary::Open, 1.0, 0.1);
        let a = gaussian_packet(&spec, sites as f64 * 0.25, 0.0, 1.0).unwrap();
        let b = gaussian_packet(&spec, sites as f64 * 0.75, 0.0, 1.0).unwrap();
        (spec, a, b)
    }

    #[test]
    fn multiset_sorts_and_weights() {
        let m = EventMultiset::new(vec![7, 3], 8).unwrap();
        assert_eq!(m.events(), &[3, 7]);
        assert!((m.weight() - 1.0).abs() < 1e-15);
        let d = EventMultiset::new(vec![4, 4], 8).unwrap();
        assert!((d.weight() - 0.5).abs() < 1e-15);
        let t = EventMultiset::new(vec![1, 1, 1], 8).unwrap();
        assert!((t.weight() - 1.0 / 6.0).abs() < 1e-15);
        assert!(!d.strictly_increasing());
    }

    #[test]
    fn symmetrize_amp_two_particles() {
        let amps = PermutationAmplitudes::from_pair(c(0.6, 0.0), c(0.3, 0.0));
        let plus = symmetrize_amp(&amps, ExchangeStatistics::Boson).unwrap();
        let minus = symmetrize_amp(&amps, ExchangeStatistics::Fermion).unwrap();
        assert!((plus - c(0.9, 0.0)).norm() < 1e-15);
        assert!((minus - c(0.3, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn fermion_coincident_events_cancel() {
        let u = balanced_two_site();
        let from = EventMultiset::new(vec![0, 1], 2).unwrap();
        let to = EventMultiset::new(vec![0, 0], 2).unwrap();
        let amps = all_permutation_amps(&u, &from, &to).unwrap();
        let amp = symmetrize_amp(&amps, ExchangeStatistics::Fermion).unwrap();
        assert_eq!(amp, c(0.0, 0.0));
    }

    #[test]
    fn signed_sum_matches_kernel_route() {
        // Two-path agreement on a 4-site ring with three events.
        let spec = LatticeSpec::uniform(4, Boundary::Periodic, 1.0, 0.1);
        let h = build_hamiltonian(&spec).unwrap();
        let u = propagator(&h, 1.0).unwrap();
        let from = EventMultiset::new(vec![0, 1, 2], 4).unwrap();
        let to = EventMultiset::new(vec![1, 2, 3], 4).unwrap();
        let amps = all_permutation_amps(&u, &from, &to).unwrap();
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let summed = symmetrize_amp(&amps, stats).unwrap();
            let kernel = transition_amplitude(&u, &from, &to, stats).unwrap();
            assert!((summed - kernel).norm() < 1e-12);
        }
    }

    #[test]
    fn identity_transition_probabilities() {
        let u = SingleParticlePropagator::new(CMatrix::identity(9, 9), 0.0, 0.0).unwrap();
        let from = EventMultiset::new(vec![3, 7], 9).unwrap();
        let stay = transition_probability(&u, &from, &from, ExchangeStatistics::Boson).unwrap();
        assert!((stay - 1.0).abs() < 1e-12);
        let moved = EventMultiset::new(vec![3, 8], 9).unwrap();
        let p = transition_probability(&u, &from, &moved, ExchangeStatistics::Boson).unwrap();
        assert!(p < 1e-15);
    }

    #[test]
    fn bosonic_bunching_on_balanced_unitary() {
        // Brute force over the 3 final multisets {0,0}, {0,1}, {1,1}.
        let u = balanced_two_site();
        let from = EventMultiset::new(vec![0, 1], 2).unwrap();
        let both_zero = EventMultiset::new(vec![0, 0], 2).unwrap();
        let split = EventMultiset::new(vec![0, 1], 2).unwrap();
        let both_one = EventMultiset::new(vec![1, 1], 2).unwrap();
        let stats = ExchangeStatistics::Boson;
        let p00 = transition_probability(&u, &from, &both_zero, stats).unwrap();
        let p01 = transition_probability(&u, &from, &split, stats).unwrap();
        let p11 = transition_probability(&u, &from, &both_one, stats).unwrap();
        assert!((p00 - 0.5).abs() < 1e-10);
        assert!(p01.abs() < 1e-10);
        assert!((p11 - 0.5).abs() < 1e-10);
        assert!((p00 + p01 + p11 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fermion_probability_rejects_coincident_events() {
        let u = balanced_two_site();
        let from = EventMultiset::new(vec![0, 1], 2).unwrap();
        let diag = EventMultiset::new(vec![0, 0], 2).unwrap();
        assert!(matches!(
            transition_probability(&u, &from, &diag, ExchangeStatistics::Fermion),
            Err(Error::CoincidentFermionEvents)
        ));
    }

    #[test]
    fn symmetrize_antisymmetric_state_is_projection() {
        let (_, a, b) = disjoint_packets(16);
        let ab = PersistenceState::product(&[a.clone(), b.clone()]).unwrap();
        let ba = PersistenceState::product(&[b, a]).unwrap();
        let anti = PersistenceState::new(ab.vector() - ba.vector(), 16, 2).unwrap();
        let (psid, factor) = symmetrize_state(&anti, ExchangeStatistics::Fermion).unwrap();
        assert!((psid.weighted_norm() - 1.0).abs() < 1e-12);
        // psid(x1 < x2) = sqrt(2) * anti(x1, x2) after renormalization
        let m = EventMultiset::new(vec![3, 12], 16).unwrap();
        let expected = anti.amplitude(&[3, 12]) * c(2.0f64.sqrt(), 0.0);
        assert!(
            (psid.amplitude(&m) - expected).norm() < 1e-10,
            "factor {factor}"
        );
    }

    #[test]
    fn disjoint_product_symmetrizes_to_product_form() {
        let (_, a, b) = disjoint_packets(32);
        let product = PersistenceState::product(&[a.clone(), b.clone()]).unwrap();
        let (psid, _) = symmetrize_state(&product, ExchangeStatistics::Boson).unwrap();
        // On x1 <= x2 the state is phi_a(x1) phi_b(x2) because the packets
        // have no common support.
        for x1 in 0..32 {
            for x2 in x1..32 {
                let m = EventMultiset::new(vec![x1, x2], 32).unwrap();
                let expected = a.vector()[x1] * b.vector()[x2];
                assert!(
                    (psid.amplitude(&m) - expected).norm() < 1e-10,
                    "({x1},{x2})"
                );
            }
        }
    }

    #[test]
    fn fermion_rejects_symmetric_input() {
        let (_, a, b) = disjoint_packets(8);
        let ab = PersistenceState::product(&[a.clone(), b.clone()]).unwrap();
        let ba = PersistenceState::product(&[b, a]).unwrap();
        let sym = PersistenceState::new(ab.vector() + ba.vector(), 8, 2).unwrap();
        assert!(matches!(
            symmetrize_state(&sym, ExchangeStatistics::Fermion),
            Err(Error::NullProjection)
        ));
    }

    #[test]
    fn extend_restrict_round_trip() {
        let (_, a, b) = disjoint_packets(8);
        let product = PersistenceState::product(&[a, b]).unwrap();
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let (psid, _) = symmetrize_state(&product, stats).unwrap();
            let ext = extend_state(&psid);
            assert!((ext.norm() - 1.0).abs() < 1e-10);
            assert!(ext.sector_defect().unwrap() < 1e-12);
            let (back, factor) = restrict_state(&ext).unwrap();
            assert!(psid.max_diff(&back) < 1e-12);
            assert!((factor - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn fermion_extension_vanishes_on_diagonal() {
        let (_, a, b) = disjoint_packets(8);
        let product = PersistenceState::product(&[a, b]).unwrap();
        let (psid, _) = symmetrize_state(&product, ExchangeStatistics::Fermion).unwrap();
        let ext = extend_state(&psid);
        for x in 0..8 {
            assert_eq!(ext.amplitude(&[x, x]), c(0.0, 0.0));
        }
    }

    #[test]
    fn boson_extension_matches_hand_expansion() {
        // Direct expansion oracle: psi_tilde = (phi_a phi_b + phi_b phi_a)/sqrt(2).
        let (_, a, b) = disjoint_packets(32);
        let product = PersistenceState::product(&[a.clone(), b.clone()]).unwrap();
        let (psid, _) = symmetrize_state(&product, ExchangeStatistics::Boson).unwrap();
        let ext = extend_state(&psid);
        let scale = c(1.0 / 2.0f64.sqrt(), 0.0);
        for x1 in 0..32 {
            for x2 in 0..32 {
                let expected =
                    (a.vector()[x1] * b.vector()[x2] + b.vector()[x1] * a.vector()[x2]) * scale;
                assert!((ext.amplitude(&[x1, x2]) - expected).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn leftmost_distribution_cases() {
        // Concentrated on {3,7}: all mass at 3.
        let psid = NonpersistenceState::concentrated(
            EventMultiset::new(vec![3, 7], 8).unwrap(),
            ExchangeStatistics::Boson,
            8,
        )
        .unwrap();
        let p = leftmost_distribution(&psid);
        assert!((p[3] - 1.0).abs() < 1e-12);

        // Uniform over {0,1}, {0,2}, {1,2}: counting minima gives 2/3, 1/3.
        let mut map = BTreeMap::new();
        for pair in [[0, 1], [0, 2], [1, 2]] {
            map.insert(EventMultiset::new(pair.to_vec(), 3).unwrap(), c(1.0, 0.0));
        }
        let psid = NonpersistenceState::new(map, ExchangeStatistics::Boson, 3).unwrap();
        let p = leftmost_distribution(&psid);
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((p[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!(p[2].abs() < 1e-15);
    }

    #[test]
    fn leftmost_of_disjoint_product_recovers_left_packet() {
        // Marginalization oracle: for isolated packets the left-most
        // distribution is the left packet's density.
        let (_, a, b) = disjoint_packets(32);
        let product = PersistenceState::product(&[a.clone(), b]).unwrap();
        let (psid, _) = symmetrize_state(&product, ExchangeStatistics::Boson).unwrap();
        let p = leftmost_distribution(&psid);
        let reference = a.density();
        let max_diff = p
            .iter()
            .zip(reference.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-10, "max diff {max_diff:e}");
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn distance_distribution_cases() {
        let psid = NonpersistenceState::concentrated(
            EventMultiset::new(vec![3, 7], 8).unwrap(),
            ExchangeStatistics::Boson,
            8,
        )
        .unwrap();
        let p = distance_distribution(&psid);
        assert!((p[4] - 1.0).abs() < 1e-12);

        // Fermion states never weight distance zero.
        let u = balanced_two_site();
        let from = NonpersistenceState::concentrated(
            EventMultiset::new(vec![0, 1], 2).unwrap(),
            ExchangeStatistics::Fermion,
            2,
        )
        .unwrap();
        let evolved = evolve_reduced(&from, &u).unwrap();
        let p = distance_distribution(&evolved);
        assert!(p[0].abs() < 1e-12);
    }

    #[test]
    fn bosonic_bunching_distance_collapses_to_zero() {
        // Same brute-force oracle as the bunching example: after the
        // balanced unitary the two bosons are never found apart.
        let u = balanced_two_site();
        let from = NonpersistenceState::concentrated(
            EventMultiset::new(vec![0, 1], 2).unwrap(),
            ExchangeStatistics::Boson,
            2,
        )
        .unwrap();
        let evolved = evolve_reduced(&from, &u).unwrap();
        let p = distance_distribution(&evolved);
        assert!((p[0] - 1.0).abs() < 1e-10);
        assert!(p[1].abs() < 1e-10);
    }

    #[test]
    fn evolve_reduced_preserves_weighted_norm() {
        let spec = LatticeSpec::uniform(5, Boundary::Periodic, 1.0, 0.1);
        let h = build_hamiltonian(&spec).unwrap();
        let u = propagator(&h, 0.8).unwrap();
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let from = NonpersistenceState::concentrated(
                EventMultiset::new(vec![1, 3], 5).unwrap(),
                stats,
                5,
            )
            .unwrap();
            let evolved = evolve_reduced(&from, &u).unwrap();
            assert!((evolved.weighted_norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dirac_symmetrize_orthogonal_inputs() {
        let (_, a, b) = disjoint_packets(32);
        let ext = dirac_symmetrize(&a, &b, ExchangeStatistics::Boson).unwrap();
        assert!((ext.norm() - 1.0).abs() < 1e-12);
        // Norm factor 1/sqrt(2) for orthogonal inputs.
        let expected = a.vector()[8] * b.vector()[24] / c(2.0f64.sqrt(), 0.0);
        assert!((ext.amplitude(&[8, 24]) - expected).norm() < 1e-12);
    }

    #[test]
    fn from_persistence_enforces_the_sector() {
        let (_, a, b) = disjoint_packets(16);
        let ext = dirac_symmetrize(&a, &b, ExchangeStatistics::Fermion).unwrap();
        let labelled = ext.to_persistence().unwrap();
        let rewrapped =
            ExtendedState::from_persistence(&labelled, ExchangeStatistics::Fermion).unwrap();
        assert!(rewrapped.sector_defect().unwrap() < 1e-12);
        // a bare product state sits in neither sector
        let product = PersistenceState::product(&[a, b]).unwrap();
        assert!(ExtendedState::from_persistence(&product, ExchangeStatistics::Fermion).is_err());
    }

    #[test]
    fn dirac_symmetrize_null_for_parallel_fermions() {
        let (_, a, _) = disjoint_packets(16);
        assert!(matches!(
            dirac_symmetrize(&a, &a, ExchangeStatistics::Fermion),
            Err(Error::NullState)
        ));
    }

    #[test]
    fn dirac_route_matches_extension_route_on_disjoint_supports() {
        // Direct construction comparison.
        let (_, a, b) = disjoint_packets(16);
        let product = PersistenceState::product(&[a.clone(), b.clone()]).unwrap();
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let via_state = extend_state(&symmetrize_state(&product, stats).unwrap().0);
            let via_dirac = dirac_symmetrize(&a, &b, stats).unwrap();
            let diff = (via_state.vector() - via_dirac.vector())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-12, "{stats}: diff {diff:e}");
        }
    }

    #[test]
    fn reduced_density_of_dirac_state_is_even_mixture() {
        // Hand-expansion oracle: both labels reduce to
        // (|a><a| + |b><b|) / 2 for disjoint packets.
        let (_, a, b) = disjoint_packets(32);
        let ext = dirac_symmetrize(&a, &b, ExchangeStatistics::Boson).unwrap();
        let psi = ext.to_persistence().unwrap();
        let mixture = {
            let pa = a.vector() * a.vector().adjoint();
            let pb = b.vector() * b.vector().adjoint();
            (pa + pb) * c(0.5, 0.0)
        };
        for which in [ParticleLabel::First, ParticleLabel::Second] {
            let rho = reduced_density(&psi, which).unwrap();
            let diff = (&rho - &mixture)
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10);
            let trace: Complex64 = rho.diagonal().iter().sum();
            assert!((trace - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn reduced_density_of_product_is_pure() {
        let (_, a, b) = disjoint_packets(16);
        let product = PersistenceState::product(&[a.clone(), b]).unwrap();
        let rho = reduced_density(&product, ParticleLabel::First).unwrap();
        let pure = a.vector() * a.vector().adjoint();
        let diff = (&rho - &pure).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }
}
