//! Numerical laboratory for identical quantum particles on a 1-D lattice.
//!
//! Two models of identical localized detection events are implemented side
//! by side: a labelled (persistence) model on the full configuration space
//! and an event-multiset (nonpersistence) model on reduced configuration
//! space. The bridge between them is the symmetrization rule: bosonic
//! amplitudes sum permutation amplitudes (permanents of propagator
//! submatrices), fermionic ones take the signed sum (determinants). The
//! `consistency` module certifies the conditions that single out those two
//! rules, and `reidentify` quantifies when the labelled picture survives as
//! approximate particle tracks.

pub mod consistency;
pub mod error;
pub mod kernels;
pub mod lattice;
pub mod nonpersistence;
pub mod perm;
pub mod persistence;
pub mod reidentify;
pub mod verification;

pub use error::{Error, Result};
pub use lattice::{
    build_hamiltonian, gaussian_packet, propagator, propagator_over, Amplitude, Boundary, CMatrix,
    CVector, LatticeSpec, SingleParticlePropagator, SingleParticleState,
};
pub use nonpersistence::{
    dirac_symmetrize, distance_distribution, evolve_reduced, extend_state, leftmost_distribution,
    reduced_density, restrict_state, symmetrize_amp, symmetrize_state, transition_amplitude,
    transition_probability, EventMultiset, ExchangeStatistics, ExtendedState, NonpersistenceState,
    ParticleLabel,
};
pub use persistence::{
    all_permutation_amps, evolve_noninteracting, evolve_persistence, persistence_amp,
    sum_rule_demo, symmetric_two_particle_hamiltonian, LabelledConfig, PermutationAmplitudes,
    PersistenceState,
};
