//! Property tests for the laboratory's guaranteed invariants.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use idlab_core::consistency::random_unitary;
use idlab_core::lattice::{
    build_hamiltonian, gaussian_packet, propagator, unitarity_defect, Boundary, LatticeSpec,
};
use idlab_core::nonpersistence::{
    distance_distribution, evolve_reduced, extend_state, leftmost_distribution, restrict_state,
    symmetrize_amp, symmetrize_state, transition_amplitude, transition_probability, EventMultiset,
    ExchangeStatistics, NonpersistenceState,
};
use idlab_core::persistence::{all_permutation_amps, LabelledConfig, PersistenceState};
use idlab_core::reidentify::swap_probability;
use idlab_core::{kernels, perm};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// n!-term permutation expansion oracle, independent of the kernels.
fn expansion(m: &DMatrix<Complex64>, signed: bool) -> Complex64 {
    let n = m.nrows();
    let mut total = c(0.0, 0.0);
    for sigma in perm::all_permutations(n) {
        let mut term = c(1.0, 0.0);
        for (k, &sk) in sigma.iter().enumerate() {
            term *= m[(sk, k)];
        }
        if signed {
            term *= c(perm::parity(&sigma), 0.0);
        }
        total += term;
    }
    total
}

fn arb_spec() -> impl Strategy<Value = LatticeSpec> {
    (
        2usize..=10,
        prop::bool::ANY,
        0.2f64..2.0,
        -1.0f64..1.0,
        0.01f64..0.5,
    )
        .prop_map(|(sites, periodic, hopping, pot_scale, dt)| LatticeSpec {
            sites,
            boundary: if periodic {
                Boundary::Periodic
            } else {
                Boundary::Open
            },
            hopping,
            potential: (0..sites).map(|i| pot_scale * (i as f64).sin()).collect(),
            dt,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn propagators_are_unitary(spec in arb_spec(), t in -4.0f64..4.0) {
        let h = build_hamiltonian(&spec).unwrap();
        let u = propagator(&h, t).unwrap();
        prop_assert!(unitarity_defect(u.matrix()) < 1e-10);
    }

    #[test]
    fn propagators_compose(spec in arb_spec(), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let h = build_hamiltonian(&spec).unwrap();
        let u1 = propagator(&h, t1).unwrap();
        let u2 = propagator(&h, t2).unwrap();
        let direct = propagator(&h, t1 + t2).unwrap();
        let composed = u2.matrix() * u1.matrix();
        let diff = (&composed - direct.matrix())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        prop_assert!(diff < 1e-10, "group property violated by {diff:e}");
    }

    #[test]
    fn packets_are_normalized(
        sites in 8usize..=48,
        x0 in 0.0f64..32.0,
        p0 in -3.0f64..3.0,
        sigma in 0.3f64..8.0,
    ) {
        prop_assume!(x0 < sites as f64);
        let spec = LatticeSpec::uniform(sites, Boundary::Open, 1.0, 0.1);
        let packet = gaussian_packet(&spec, x0, p0, sigma).unwrap();
        prop_assert!((packet.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kernels_match_expansion(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (n as f64).sqrt();
        let m = DMatrix::from_fn(n, n, |_, _| {
            c(
                rng.sample::<f64, _>(StandardNormal) * scale,
                rng.sample::<f64, _>(StandardNormal) * scale,
            )
        });
        let det = kernels::determinant(&m).unwrap();
        let per = kernels::permanent(&m).unwrap();
        prop_assert!((det - expansion(&m, true)).norm() < 1e-12);
        prop_assert!((per - expansion(&m, false)).norm() < 1e-12);
    }

    /// Resolution of identity per label: summing the labelled amplitude
    /// over all intermediate configurations reproduces the composed
    /// propagator's amplitude.
    #[test]
    fn labelled_amplitudes_compose(seed in any::<u64>(), sites in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, sites);
        let v = random_unitary(&mut rng, sites);
        let w = u.then(&v).unwrap();
        let from = LabelledConfig::new(
            vec![rng.gen_range(0..sites), rng.gen_range(0..sites)],
            sites,
        ).unwrap();
        let to = LabelledConfig::new(
            vec![rng.gen_range(0..sites), rng.gen_range(0..sites)],
            sites,
        ).unwrap();
        let mut summed = c(0.0, 0.0);
        for k1 in 0..sites {
            for k2 in 0..sites {
                let mid = LabelledConfig::new(vec![k1, k2], sites).unwrap();
                summed += idlab_core::persistence_amp(&v, &mid, &to).unwrap()
                    * idlab_core::persistence_amp(&u, &from, &mid).unwrap();
            }
        }
        let direct = idlab_core::persistence_amp(&w, &from, &to).unwrap();
        prop_assert!((summed - direct).norm() < 1e-10);
    }

    #[test]
    fn identity_amps_are_kronecker_deltas(
        sites in 3usize..=8,
        picks in prop::collection::vec(0usize..8, 2..=3),
    ) {
        let mut events: Vec<usize> = picks.iter().map(|p| p % 8).collect();
        events.sort_unstable();
        events.dedup();
        prop_assume!(events.len() >= 2);
        prop_assume!(*events.iter().max().unwrap() < sites);
        let u = idlab_core::SingleParticlePropagator::new(
            DMatrix::identity(sites, sites),
            0.0,
            0.0,
        ).unwrap();
        let m = EventMultiset::new(events, sites).unwrap();
        let amps = all_permutation_amps(&u, &m, &m).unwrap();
        for (sigma, amp) in amps.iter() {
            let is_identity = sigma.iter().enumerate().all(|(i, &s)| i == s);
            if is_identity {
                prop_assert!((amp - c(1.0, 0.0)).norm() < 1e-15);
            } else {
                prop_assert!(amp.norm() < 1e-15);
            }
        }
    }

    /// Exclusion: fermionic amplitudes into any coincident pair vanish.
    #[test]
    fn fermion_exclusion(seed in any::<u64>(), sites in 3usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, sites);
        let from = EventMultiset::new(vec![0, sites - 1], sites).unwrap();
        for m in 0..sites {
            let to = EventMultiset::new(vec![m, m], sites).unwrap();
            let amps = all_permutation_amps(&u, &from, &to).unwrap();
            let amp = symmetrize_amp(&amps, ExchangeStatistics::Fermion).unwrap();
            prop_assert!(amp.norm() < 1e-12);
        }
    }

    /// Two-path agreement between the signed permutation sum and the
    /// permanent/determinant kernels.
    #[test]
    fn signed_sum_agrees_with_kernels(seed in any::<u64>(), sites in 3usize..=6, n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assume!(n <= sites);
        let u = random_unitary(&mut rng, sites);
        let mut chosen: Vec<usize> = (0..sites).collect();
        chosen.shuffle(&mut rng);
        chosen.truncate(n);
        let from = EventMultiset::new(chosen.clone(), sites).unwrap();
        chosen.shuffle(&mut rng);
        let to = EventMultiset::new(chosen, sites).unwrap();
        let amps = all_permutation_amps(&u, &from, &to).unwrap();
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let summed = symmetrize_amp(&amps, stats).unwrap();
            let kernel = transition_amplitude(&u, &from, &to, stats).unwrap();
            prop_assert!((summed - kernel).norm() < 1e-12);
        }
    }

    /// Completeness: Born-rule weights over all final multisets sum to one.
    #[test]
    fn transition_probabilities_sum_to_one(seed in any::<u64>(), sites in 3usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, sites);
        let a = rng.gen_range(0..sites);
        let mut b = rng.gen_range(0..sites - 1);
        if b >= a { b += 1; }
        let from = EventMultiset::new(vec![a, b], sites).unwrap();
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let mut total = 0.0;
            for to in EventMultiset::enumerate_for(sites, 2, stats) {
                total += transition_probability(&u, &from, &to, stats).unwrap();
            }
            prop_assert!((total - 1.0).abs() < 1e-10, "{stats}: total {total}");
        }
    }

    /// Permuting the event tuple before canonicalization never changes the
    /// amplitude magnitude.
    #[test]
    fn relabelling_is_absorbed(seed in any::<u64>(), sites in 4usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, sites);
        let mut events: Vec<usize> = (0..sites).collect();
        events.shuffle(&mut rng);
        events.truncate(3);
        let from_sorted = EventMultiset::new(events.clone(), sites).unwrap();
        events.shuffle(&mut rng);
        let from_shuffled = EventMultiset::new(events, sites).unwrap();
        let to = EventMultiset::new(vec![0, 1, 2], sites).unwrap();
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let a = transition_amplitude(&u, &from_sorted, &to, stats).unwrap();
            let b = transition_amplitude(&u, &from_shuffled, &to, stats).unwrap();
            prop_assert!((a - b).norm() < 1e-15);
        }
    }

    /// Swap probability only depends on the ray of the amplitude pair.
    #[test]
    fn swap_probability_is_projective(
        re1 in -2.0f64..2.0, im1 in -2.0f64..2.0,
        re2 in -2.0f64..2.0, im2 in -2.0f64..2.0,
        sre in -3.0f64..3.0, sim in -3.0f64..3.0,
    ) {
        let a = c(re1, im1);
        let b = c(re2, im2);
        let s = c(sre, sim);
        prop_assume!(a.norm() > 1e-6 || b.norm() > 1e-6);
        prop_assume!(s.norm() > 1e-3);
        let amps = idlab_core::PermutationAmplitudes::from_pair(a, b);
        let scaled = idlab_core::PermutationAmplitudes::from_pair(a * s, b * s);
        let p = swap_probability(&amps).unwrap();
        let q = swap_probability(&scaled).unwrap();
        prop_assert!((p - q).abs() < 1e-12);
    }
}

fn random_reduced_state(
    rng: &mut ChaCha8Rng,
    sites: usize,
    n: usize,
    stats: ExchangeStatistics,
) -> NonpersistenceState {
    let mut map = BTreeMap::new();
    for m in EventMultiset::enumerate_for(sites, n, stats) {
        map.insert(m, c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    }
    NonpersistenceState::new(map, stats, sites).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Extension and restriction are mutually inverse.
    #[test]
    fn extend_restrict_round_trip(seed in any::<u64>(), sites in 3usize..=7, n in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assume!(n <= sites);
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let psid = random_reduced_state(&mut rng, sites, n, stats);
            let ext = extend_state(&psid);
            prop_assert!((ext.norm() - 1.0).abs() < 1e-10);
            prop_assert!(ext.sector_defect().unwrap() < 1e-12);
            let (back, factor) = restrict_state(&ext).unwrap();
            prop_assert!(psid.max_diff(&back) < 1e-12);
            prop_assert!((factor - 1.0).abs() < 1e-10);
        }
    }

    /// Projecting the extension through the state-based symmetrization also
    /// recovers the original reduced state.
    #[test]
    fn symmetrize_after_extend_round_trip(seed in any::<u64>(), sites in 3usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let psid = random_reduced_state(&mut rng, sites, 2, stats);
            let lifted = extend_state(&psid).to_persistence().unwrap();
            let (back, _) = symmetrize_state(&lifted, stats).unwrap();
            prop_assert!(psid.max_diff(&back) < 1e-12);
        }
    }

    /// Reduced-space evolution is unitary and its observables stay
    /// normalized.
    #[test]
    fn reduced_evolution_preserves_distributions(seed in any::<u64>(), sites in 3usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, sites);
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let psid = random_reduced_state(&mut rng, sites, 2, stats);
            let evolved = evolve_reduced(&psid, &u).unwrap();
            prop_assert!((evolved.weighted_norm() - 1.0).abs() < 1e-10);
            let leftmost: f64 = leftmost_distribution(&evolved).iter().sum();
            let distance: f64 = distance_distribution(&evolved).iter().sum();
            prop_assert!((leftmost - 1.0).abs() < 1e-10);
            prop_assert!((distance - 1.0).abs() < 1e-10);
        }
    }

    /// Evolving the labelled product of packets and projecting agrees with
    /// reduced-space evolution of the projected state.
    #[test]
    fn state_and_amplitude_routes_agree(seed in any::<u64>(), sites in 3usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = LatticeSpec::uniform(sites, Boundary::Open, 1.0, 0.1);
        let h = build_hamiltonian(&spec).unwrap();
        let t = rng.gen_range(0.1..1.0);
        let u = propagator(&h, t).unwrap();
        for stats in [ExchangeStatistics::Boson, ExchangeStatistics::Fermion] {
            let psid = random_reduced_state(&mut rng, sites, 2, stats);
            let lifted = extend_state(&psid).to_persistence().unwrap();
            let h2 = idlab_core::symmetric_two_particle_hamiltonian(&spec, 0.0).unwrap();
            let evolved = idlab_core::evolve_persistence(&lifted, &h2, t).unwrap();
            let (via_state, _) = symmetrize_state(&evolved, stats).unwrap();
            let via_amps = evolve_reduced(&psid, &u).unwrap();
            prop_assert!(via_state.max_diff(&via_amps) < 1e-10);
        }
    }

    /// The fermionic sector never weights coincident events.
    #[test]
    fn fermion_states_exclude_diagonals(seed in any::<u64>(), sites in 3usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, sites);
        let psid = random_reduced_state(&mut rng, sites, 2, ExchangeStatistics::Fermion);
        let evolved = evolve_reduced(&psid, &u).unwrap();
        let p = distance_distribution(&evolved);
        prop_assert!(p[0].abs() < 1e-20);
        let ext = extend_state(&evolved);
        for x in 0..sites {
            prop_assert!(ext.amplitude(&[x, x]).norm() < 1e-20);
        }
    }

    /// Tensor products of evolved factors match evolved tensor products.
    #[test]
    fn product_states_evolve_factorwise(seed in any::<u64>(), sites in 4usize..=8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let spec = LatticeSpec::uniform(sites, Boundary::Periodic, 1.0, 0.1);
        let h = build_hamiltonian(&spec).unwrap();
        let t = rng.gen_range(0.1..1.5);
        let u = propagator(&h, t).unwrap();
        let a = gaussian_packet(&spec, rng.gen_range(0.0..sites as f64), 0.3, 0.8).unwrap();
        let b = gaussian_packet(&spec, rng.gen_range(0.0..sites as f64), -0.2, 0.8).unwrap();
        let product = PersistenceState::product(&[a.clone(), b.clone()]).unwrap();
        let fast = idlab_core::evolve_noninteracting(&product, &u).unwrap();
        let oracle = PersistenceState::product(&[
            u.apply(&a).unwrap(),
            u.apply(&b).unwrap(),
        ]).unwrap();
        prop_assert!(fast.max_diff(&oracle) < 1e-12);
    }
}
