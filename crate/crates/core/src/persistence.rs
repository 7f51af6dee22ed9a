//! The labelled-particle (persistence) model: ordered configurations,
//! permutation-indexed transition amplitudes, and evolution of states on
//! the full labelled configuration space under a label-symmetric Hamiltonian.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{
    hermiticity_defect, unitary_exp, Amplitude, CMatrix, CVector, LatticeSpec,
    SingleParticlePropagator, SingleParticleState,
};
use crate::nonpersistence::EventMultiset;
use crate::perm::{all_permutations, factorial, MAX_ENUMERATED};

/// Ordered tuple of lattice sites; index k is the position of the particle
/// labelled k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledConfig {
    positions: Vec<usize>,
}

impl LabelledConfig {
    pub fn new(positions: Vec<usize>, sites: usize) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::ParticleCountMismatch(0, 1));
        }
        for &p in &positions {
            if p >= sites {
                return Err(Error::EventOutsideLattice { event: p, sites });
            }
        }
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Transition amplitude of each labelled particle making its own transition:
/// the product over k of U[to_k, from_k].
pub fn persistence_amp(
    u: &SingleParticlePropagator,
    from: &LabelledConfig,
    to: &LabelledConfig,
) -> Result<Amplitude> {
    if from.len() != to.len() {
        return Err(Error::ParticleCountMismatch(from.len(), to.len()));
    }
    let mut amp = Complex64::new(1.0, 0.0);
    for (f, t) in from.positions().iter().zip(to.positions()) {
        amp *= u.amp(*t, *f);
    }
    Ok(amp)
}

/// Amplitudes of every permutation-indexed transition between two event
/// multisets, keyed by permutations of `0..n` in lexicographic order.
///
/// Events are taken left-most-first, so the identity permutation is the
/// "direct" transition and, for n = 2, the swap is the "indirect" one.
#[derive(Debug, Clone)]
pub struct PermutationAmplitudes {
    n: usize,
    perms: Vec<Vec<usize>>,
    amps: Vec<Amplitude>,
}

impl PermutationAmplitudes {
    pub fn from_parts(n: usize, perms: Vec<Vec<usize>>, amps: Vec<Amplitude>) -> Result<Self> {
        let expected = factorial(n);
        if perms.len() != expected || amps.len() != expected {
            return Err(Error::IncompletePermutationMap {
                expected,
                found: perms.len().min(amps.len()),
            });
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFiniteAmplitude);
        }
        Ok(Self { n, perms, amps })
    }

    /// Two-particle constructor from the direct and indirect amplitudes.
    pub fn from_pair(direct: Amplitude, indirect: Amplitude) -> Self {
        Self {
            n: 2,
            perms: vec![vec![0, 1], vec![1, 0]],
            amps: vec![direct, indirect],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Amplitude of the identity (order-preserving) permutation.
    pub fn direct(&self) -> Amplitude {
        self.amps[0]
    }

    /// Amplitude of the swap; only meaningful for n = 2.
    pub fn indirect(&self) -> Result<Amplitude> {
        if self.n != 2 {
            return Err(Error::NotTwoParticles(self.n));
        }
        Ok(self.amps[1])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], Amplitude)> {
        self.perms
            .iter()
            .map(Vec::as_slice)
            .zip(self.amps.iter().copied())
    }
}

/// Amplitudes for all n! permutation-indexed transitions from `from` to `to`:
/// amps[sigma] = prod_k U[to[sigma(k)], from[k]].
pub fn all_permutation_amps(
    u: &SingleParticlePropagator,
    from: &EventMultiset,
    to: &EventMultiset,
) -> Result<PermutationAmplitudes> {
    let n = from.len();
    if n != to.len() {
        return Err(Error::ParticleCountMismatch(n, to.len()));
    }
    if n > MAX_ENUMERATED {
        return Err(Error::TooManyParticles {
            n,
            limit: MAX_ENUMERATED,
        });
    }
    for &e in from.events().iter().chain(to.events()) {
        if e >= u.sites() {
            return Err(Error::EventOutsideLattice {
                event: e,
                sites: u.sites(),
            });
        }
    }
    let perms = all_permutations(n);
    let amps = perms
        .iter()
        .map(|sigma| {
            let mut amp = Complex64::new(1.0, 0.0);
            for (k, &sk) in sigma.iter().enumerate() {
                amp *= u.amp(to.events()[sk], from.events()[k]);
            }
            amp
        })
        .collect();
    PermutationAmplitudes::from_parts(n, perms, amps)
}

/// Wavefunction over the full labelled configuration space (sites^n entries).
///
/// Index convention: config (x_0, ..., x_{n-1}) maps to
/// x_0 * sites^(n-1) + ... + x_{n-1}, i.e. particle 0 is the most
/// significant digit, matching Kronecker-product ordering.
#[derive(Debug, Clone)]
pub struct PersistenceState {
    psi: CVector,
    sites: usize,
    n: usize,
}

impl PersistenceState {
    /// Normalize an arbitrary vector over the labelled space.
    pub fn new(psi: CVector, sites: usize, n: usize) -> Result<Self> {
        let expected = sites.pow(n as u32);
        if psi.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: psi.len(),
            });
        }
        let norm = psi.norm();
        if !norm.is_finite() || norm < 1e-150 {
            return Err(Error::NullState);
        }
        Ok(Self {
            psi: psi / Complex64::new(norm, 0.0),
            sites,
            n,
        })
    }

    /// Tensor product of single-particle factors, particle 0 first.
    pub fn product(factors: &[SingleParticleState]) -> Result<Self> {
        let n = factors.len();
        if n == 0 {
            return Err(Error::ParticleCountMismatch(0, 1));
        }
        let sites = factors[0].len();
        let mut psi = factors[0].vector().clone();
        for f in &factors[1..] {
            if f.len() != sites {
                return Err(Error::DimensionMismatch {
                    expected: sites,
                    found: f.len(),
                });
            }
            psi = psi.kronecker(f.vector());
        }
        Self::new(psi, sites, n)
    }

    pub fn vector(&self) -> &CVector {
        &self.psi
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn norm(&self) -> f64 {
        self.psi.norm()
    }

    /// Linear index of a labelled configuration.
    pub fn index_of(&self, positions: &[usize]) -> usize {
        config_index(positions, self.sites)
    }

    pub fn amplitude(&self, positions: &[usize]) -> Amplitude {
        self.psi[self.index_of(positions)]
    }

    /// The state with particle labels permuted: psi'(x_sigma(0), ...) layout,
    /// i.e. psi'(x_0..x_{n-1}) = psi(x_sigma(0), ..., x_sigma(n-1)).
    pub fn permute_labels(&self, sigma: &[usize]) -> Result<Self> {
        if sigma.len() != self.n {
            return Err(Error::ParticleCountMismatch(sigma.len(), self.n));
        }
        let mut out = CVector::zeros(self.psi.len());
        let mut config = vec![0usize; self.n];
        for idx in 0..self.psi.len() {
            decode_index(idx, self.sites, &mut config);
            let permuted: Vec<usize> = sigma.iter().map(|&k| config[k]).collect();
            out[idx] = self.psi[config_index(&permuted, self.sites)];
        }
        Ok(Self {
            psi: out,
            sites: self.sites,
            n: self.n,
        })
    }

    /// Max-norm distance to another state.
    pub fn max_diff(&self, other: &Self) -> f64 {
        (&self.psi - &other.psi)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

pub fn config_index(positions: &[usize], sites: usize) -> usize {
    positions.iter().fold(0, |acc, &x| acc * sites + x)
}

pub fn decode_index(mut idx: usize, sites: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % sites;
        idx /= sites;
    }
}

/// Label-symmetric two-particle Hamiltonian
/// H2 = H (x) I + I (x) H + interaction * sum_x |x,x><x,x|.
pub fn symmetric_two_particle_hamiltonian(spec: &LatticeSpec, interaction: f64) -> Result<CMatrix> {
    let h = crate::lattice::build_hamiltonian(spec)?;
    let n = spec.sites;
    let id = CMatrix::identity(n, n);
    let mut h2 = h.kronecker(&id) + id.kronecker(&h);
    for x in 0..n {
        let idx = x * n + x;
        h2[(idx, idx)] += Complex64::new(interaction, 0.0);
    }
    Ok(h2)
}

/// Exchange operator P on the two-particle labelled space: P|x1,x2> = |x2,x1>.
pub fn exchange_operator(sites: usize) -> CMatrix {
    let dim = sites * sites;
    let mut p = CMatrix::zeros(dim, dim);
    for x1 in 0..sites {
        for x2 in 0..sites {
            p[(x2 * sites + x1, x1 * sites + x2)] = Complex64::new(1.0, 0.0);
        }
    }
    p
}

/// psi' = exp(-i H2 t) psi on the labelled configuration space.
pub fn evolve_persistence(
    state: &PersistenceState,
    h2: &CMatrix,
    t: f64,
) -> Result<PersistenceState> {
    if h2.nrows() != state.vector().len() {
        return Err(Error::DimensionMismatch {
            expected: state.vector().len(),
            found: h2.nrows(),
        });
    }
    let defect = hermiticity_defect(h2);
    if defect > crate::lattice::HERMITICITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let u2 = unitary_exp(h2, t);
    Ok(PersistenceState {
        psi: u2 * &state.psi,
        sites: state.sites,
        n: state.n,
    })
}

/// Non-interacting evolution psi' = (U (x) ... (x) U) psi, exact for
/// interaction-free dynamics and far cheaper than exponentiating H2.
pub fn evolve_noninteracting(
    state: &PersistenceState,
    u: &SingleParticlePropagator,
) -> Result<PersistenceState> {
    if u.sites() != state.sites {
        return Err(Error::DimensionMismatch {
            expected: state.sites,
            found: u.sites(),
        });
    }
    match state.n {
        1 => Ok(PersistenceState {
            psi: u.matrix() * &state.psi,
            sites: state.sites,
            n: 1,
        }),
        2 => {
            // With row-major indexing, (U (x) U) psi is U M U^T on the
            // reshaped sites x sites coefficient matrix M.
            let s = state.sites;
            let m = DMatrix::from_fn(s, s, |x1, x2| state.psi[x1 * s + x2]);
            let evolved = u.matrix() * m * u.matrix().transpose();
            let mut psi = CVector::zeros(s * s);
            for x1 in 0..s {
                for x2 in 0..s {
                    psi[x1 * s + x2] = evolved[(x1, x2)];
                }
            }
            Ok(PersistenceState {
                psi,
                sites: s,
                n: 2,
            })
        }
        n => {
            // Apply U along each tensor leg in turn.
            let s = state.sites;
            let dim = state.psi.len();
            let mut psi = state.psi.clone();
            let mut stride = dim / s; // leg 0 is most significant
            for _leg in 0..n {
                let mut next = CVector::zeros(dim);
                for base in 0..dim / (s * stride) {
                    for offset in 0..stride {
                        let start = base * s * stride + offset;
                        for to in 0..s {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for from in 0..s {
                                acc += u.amp(to, from) * psi[start + from * stride];
                            }
                            next[start + to * stride] = acc;
                        }
                    }
                }
                psi = next;
                stride /= s;
                if stride == 0 {
                    break;
                }
            }
            Ok(PersistenceState { psi, sites: s, n })
        }
    }
}

/// The single-particle amplitude sum rule: two path amplitudes combine as
/// c = a + b.
pub fn sum_rule_demo(a: Amplitude, b: Amplitude) -> Amplitude {
    a + b
}
