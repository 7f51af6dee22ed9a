use thiserror::Error;

/// Errors produced by the lattice laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice must have at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("time step must be positive, got {0}")]
    NonPositiveDt(f64),
    #[error("potential has {found} entries but the lattice has {expected} sites")]
    PotentialLength { expected: usize, found: usize },
    #[error("matrix is not Hermitian (symmetry defect {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (defect {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must be at least 1x1")]
    EmptyMatrix,
    #[error("packet width must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("packet carries no weight on the lattice")]
    PacketOffLattice,
    #[error("permanent is limited to n <= {limit}, got {n}")]
    PermanentTooLarge { n: usize, limit: usize },
    #[error("permutation enumeration is limited to n <= {limit}, got {n}")]
    TooManyParticles { n: usize, limit: usize },
    #[error("particle counts differ: {0} vs {1}")]
    ParticleCountMismatch(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("event at site {event} lies outside a lattice of {sites} sites")]
    EventOutsideLattice { event: usize, sites: usize },
    #[error("fermionic events must be strictly increasing, found a coincidence")]
    CoincidentFermionEvents,
    #[error("permutation amplitude map is incomplete: expected {expected} entries, got {found}")]
    IncompletePermutationMap { expected: usize, found: usize },
    #[error("amplitude is not finite")]
    NonFiniteAmplitude,
    #[error("state has zero projection onto the requested exchange sector")]
    NullProjection,
    #[error("symmetrized state is null (inputs parallel under fermionic statistics)")]
    NullState,
    #[error("all permutation amplitudes vanish: transition unreachable")]
    UnreachableTransition,
    #[error("observation times must be strictly increasing")]
    TimesNotIncreasing,
    #[error("event history needs one propagator per interval: {intervals} intervals, {propagators} propagators")]
    PropagatorCountMismatch {
        intervals: usize,
        propagators: usize,
    },
    #[error("history multisets must all have the same size")]
    UnevenHistory,
    #[error("operation requires a two-particle state, got n = {0}")]
    NotTwoParticles(usize),
    #[error("empty candidate registry")]
    EmptyRegistry,
    #[error("unknown criterion '{0}'")]
    UnknownCriterion(String),
}

pub type Result<T> = std::result::Result<T, Error>;
