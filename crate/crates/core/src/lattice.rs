//! 1-D lattice specification, Hamiltonians, unitary propagators, and
//! Gaussian wavepacket preparation.
//!
//! Units: hbar = 1, lattice spacing = 1. Sites are indexed 0..sites.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A quantum transition amplitude.
pub type Amplitude = Complex64;
/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex vector.
pub type CVector = DVector<Complex64>;

/// Unitarity tolerance enforced on every stored propagator.
pub const UNITARITY_TOL: f64 = 1e-10;
/// Hermiticity tolerance enforced on propagator inputs.
pub const HERMITICITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Finite 1-D lattice with nearest-neighbour hopping and an on-site potential.
#[derive(Debug, Clone)]
pub struct LatticeSpec {
    pub sites: usize,
    pub boundary: Boundary,
    pub hopping: f64,
    pub potential: Vec<f64>,
    pub dt: f64,
}

impl LatticeSpec {
    /// Lattice with a flat (zero) potential.
    pub fn uniform(sites: usize, boundary: Boundary, hopping: f64, dt: f64) -> Self {
        Self {
            sites,
            boundary,
            hopping,
            potential: vec![0.0; sites],
            dt,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::TooFewSites(self.sites));
        }
        if self.dt.is_nan() || self.dt <= 0.0 {
            return Err(Error::NonPositiveDt(self.dt));
        }
        if self.potential.len() != self.sites {
            return Err(Error::PotentialLength {
                expected: self.sites,
                found: self.potential.len(),
            });
        }
        Ok(())
    }
}

/// Max-norm of M - M^dagger.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let diff = m - m.adjoint();
    diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-norm of U^dagger U - I.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let defect = u.adjoint() * u - CMatrix::identity(u.nrows(), u.ncols());
    defect.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Single-particle tight-binding Hamiltonian:
/// H = -hopping * sum(|i><i+1| + h.c.) + sum(potential[i] |i><i|),
/// with the hopping wrapping around iff the boundary is periodic.
pub fn build_hamiltonian(spec: &LatticeSpec) -> Result<CMatrix> {
    spec.validate()?;
    let n = spec.sites;
    let hop = Complex64::new(-spec.hopping, 0.0);
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = Complex64::new(spec.potential[i], 0.0);
    }
    for i in 0..n - 1 {
        h[(i, i + 1)] += hop;
        h[(i + 1, i)] += hop;
    }
    if spec.boundary == Boundary::Periodic {
        // n = 2 already has the 0-1 bond; wrapping would double it.
        if n > 2 {
            h[(0, n - 1)] += hop;
            h[(n - 1, 0)] += hop;
        }
    }
    Ok(h)
}

/// exp(-i H t) by Hermitian eigendecomposition. Caller must pass Hermitian H.
pub fn unitary_exp(h: &CMatrix, t: f64) -> CMatrix {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|e| (Complex64::new(0.0, -1.0) * e * t).exp()),
    );
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Unitary single-particle propagator over a time interval.
#[derive(Debug, Clone)]
pub struct SingleParticlePropagator {
    matrix: CMatrix,
    t_from: f64,
    t_to: f64,
}

impl SingleParticlePropagator {
    /// Wrap an externally produced matrix, enforcing unitarity.
    pub fn new(matrix: CMatrix, t_from: f64, t_to: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let defect = unitarity_defect(&matrix);
        if defect >= UNITARITY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self {
            matrix,
            t_from,
            t_to,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn sites(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.t_from, self.t_to)
    }

    /// Amplitude for a single particle to go from site `from` to site `to`.
    pub fn amp(&self, to: usize, from: usize) -> Amplitude {
        self.matrix[(to, from)]
    }

    /// Composition: first `self`, then `later`.
    pub fn then(&self, later: &SingleParticlePropagator) -> Result<SingleParticlePropagator> {
        if later.sites() != self.sites() {
            return Err(Error::DimensionMismatch {
                expected: self.sites(),
                found: later.sites(),
            });
        }
        SingleParticlePropagator::new(&later.matrix * &self.matrix, self.t_from, later.t_to)
    }

    /// Apply to a single-particle state.
    pub fn apply(&self, state: &SingleParticleState) -> Result<SingleParticleState> {
        if state.len() != self.sites() {
            return Err(Error::DimensionMismatch {
                expected: self.sites(),
                found: state.len(),
            });
        }
        Ok(SingleParticleState {
            vector: &self.matrix * &state.vector,
        })
    }
}

/// U(t) = exp(-i H t) for a Hermitian H, starting at time 0.
pub fn propagator(h: &CMatrix, t: f64) -> Result<SingleParticlePropagator> {
    propagator_over(h, 0.0, t)
}

/// U over [t_from, t_to] = exp(-i H (t_to - t_from)).
pub fn propagator_over(h: &CMatrix, t_from: f64, t_to: f64) -> Result<SingleParticlePropagator> {
    if h.nrows() != h.ncols() {
        return Err(Error::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let defect = hermiticity_defect(h);
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    SingleParticlePropagator::new(unitary_exp(h, t_to - t_from), t_from, t_to)
}

/// Normalized single-particle wavefunction on the lattice.
#[derive(Debug, Clone)]
pub struct SingleParticleState {
    vector: CVector,
}

impl SingleParticleState {
    /// Normalize an arbitrary complex vector.
    pub fn new(vector: CVector) -> Result<Self> {
        let norm = vector.norm();
        if !norm.is_finite() || norm < 1e-150 {
            return Err(Error::PacketOffLattice);
        }
        Ok(Self {
            vector: vector / Complex64::new(norm, 0.0),
        })
    }

    pub fn vector(&self) -> &CVector {
        &self.vector
    }

    pub fn len(&self) -> usize {
        self.vector.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vector.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.vector.norm()
    }

    /// Site-resolved probability density |psi(x)|^2.
    pub fn density(&self) -> Vec<f64> {
        self.vector.iter().map(|z| z.norm_sqr()).collect()
    }

    /// <self|other>.
    pub fn overlap(&self, other: &SingleParticleState) -> Amplitude {
        self.vector.dotc(&other.vector)
    }

    /// Site with the largest probability density.
    pub fn peak_site(&self) -> usize {
        let mut best = 0;
        let mut best_p = -1.0;
        for (i, z) in self.vector.iter().enumerate() {
            let p = z.norm_sqr();
            if p > best_p {
                best_p = p;
                best = i;
            }
        }
        best
    }
}

/// Gaussian wavepacket psi(x) ~ exp(-(x - x0)^2 / (4 sigma^2) + i p0 x),
/// normalized on the lattice.
pub fn gaussian_packet(
    spec: &LatticeSpec,
    x0: f64,
    p0: f64,
    sigma: f64,
) -> Result<SingleParticleState> {
    spec.validate()?;
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::NonPositiveSigma(sigma));
    }
    let vector = CVector::from_fn(spec.sites, |x, _| {
        let d = x as f64 - x0;
        let envelope = (-d * d / (4.0 * sigma * sigma)).exp();
        Complex64::new(0.0, p0 * x as f64).exp() * envelope
    });
    SingleParticleState::new(vector)
}
