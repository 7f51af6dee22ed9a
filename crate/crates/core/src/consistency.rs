//! Numerical certification of the conditions that single out the +-
//! synthesis rules: the isolation condition on single-path transitions, the
//! three-time composition consistency (a Cauchy-Binet identity for the +-
//! rules), and falsification of alternative candidate synthesis functions.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::lattice::{unitary_exp, Amplitude, CMatrix, SingleParticlePropagator};
use crate::nonpersistence::{transition_amplitude, EventMultiset, ExchangeStatistics};

/// Candidate synthesis function H(direct, indirect) -> combined amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Candidate {
    /// direct + indirect (the bosonic rule)
    Plus,
    /// direct - indirect (the fermionic rule)
    Minus,
    /// direct + e^{i theta} * indirect
    Phase(f64),
    /// |direct| + |indirect|
    AbsSum,
    /// direct alone
    FirstOnly,
}

impl Candidate {
    pub fn eval(&self, direct: Amplitude, indirect: Amplitude) -> Amplitude {
        match self {
            Candidate::Plus => direct + indirect,
            Candidate::Minus => direct - indirect,
            Candidate::Phase(theta) => direct + Complex64::new(0.0, *theta).exp() * indirect,
            Candidate::AbsSum => Complex64::new(direct.norm() + indirect.norm(), 0.0),
            Candidate::FirstOnly => direct,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Candidate::Plus => "plus".into(),
            Candidate::Minus => "minus".into(),
            Candidate::Phase(theta) => format!("phase({theta:.4})"),
            Candidate::AbsSum => "abs-sum".into(),
            Candidate::FirstOnly => "first-only".into(),
        }
    }
}

/// A registry entry together with the probe results computed at
/// construction time.
#[derive(Debug, Clone)]
pub struct CandidateProfile {
    pub candidate: Candidate,
    pub continuous: bool,
    pub holomorphic: bool,
}

/// The fixed candidate registry, probed for continuity and complex
/// linearity on construction.
pub fn registry() -> Vec<CandidateProfile> {
    let candidates = vec![
        Candidate::Plus,
        Candidate::Minus,
        Candidate::Phase(std::f64::consts::FRAC_PI_2),
        Candidate::Phase(std::f64::consts::FRAC_PI_3),
        Candidate::AbsSum,
        Candidate::FirstOnly,
    ];
    candidates
        .into_iter()
        .map(|candidate| CandidateProfile {
            candidate,
            continuous: continuity_defect(&candidate) < 10.0,
            holomorphic: holomorphy_defect(&candidate) < 1e-6,
        })
        .collect()
}

/// Finite-difference modulus-of-continuity probe: the largest ratio
/// |H(a + d) - H(a)| / |d| over a fixed sample set. Finite for every
/// registry candidate.
pub fn continuity_defect(candidate: &Candidate) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ab);
    let step = 1e-7;
    let mut worst: f64 = 0.0;
    for _ in 0..64 {
        let a = random_amplitude(&mut rng);
        let b = random_amplitude(&mut rng);
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let d = Complex64::new(0.0, phi).exp() * step;
        let base = candidate.eval(a, b);
        worst = worst.max((candidate.eval(a + d, b) - base).norm() / step);
        worst = worst.max((candidate.eval(a, b + d) - base).norm() / step);
    }
    worst
}

/// Finite-difference Cauchy-Riemann probe: compares derivatives taken along
/// the real and imaginary axes in each argument. Near zero only for
/// complex-linear candidates; flags abs-sum as non-holomorphic.
pub fn holomorphy_defect(candidate: &Candidate) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    let h = 1e-5;
    let re = Complex64::new(h, 0.0);
    let im = Complex64::new(0.0, h);
    let mut worst: f64 = 0.0;
    for _ in 0..64 {
        let a = random_amplitude(&mut rng);
        let b = random_amplitude(&mut rng);
        let d_re = (candidate.eval(a + re, b) - candidate.eval(a - re, b)) / (2.0 * re);
        let d_im = (candidate.eval(a + im, b) - candidate.eval(a - im, b)) / (2.0 * im);
        worst = worst.max((d_re - d_im).norm());
        let d_re = (candidate.eval(a, b + re) - candidate.eval(a, b - re)) / (2.0 * re);
        let d_im = (candidate.eval(a, b + im) - candidate.eval(a, b - im)) / (2.0 * im);
        worst = worst.max((d_re - d_im).norm());
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Isolation,
    Composition,
    Normalization,
}

impl std::fmt::Display for Condition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Condition::Isolation => write!(f, "isolation"),
            Condition::Composition => write!(f, "composition"),
            Condition::Normalization => write!(f, "normalization"),
        }
    }
}

/// Outcome of one consistency check.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub condition: Condition,
    pub max_violation: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    /// Description of the worst-violating sample, when one exists.
    pub counterexample: Option<String>,
}

impl ConsistencyReport {
    fn from_violations(
        condition: Condition,
        violations: &[(f64, String)],
        tolerance: f64,
        seed: u64,
    ) -> Self {
        let (max_violation, worst) =
            violations
                .iter()
                .fold((0.0f64, None), |(mv, w), (v, desc)| {
                    if *v > mv {
                        (*v, Some(desc.clone()))
                    } else {
                        (mv, w)
                    }
                });
        let pass = max_violation < tolerance;
        ConsistencyReport {
            condition,
            max_violation,
            samples: violations.len(),
            tolerance,
            pass,
            seed,
            counterexample: if pass { None } else { worst },
        }
    }

    /// One delimited record: condition, samples, violation, tolerance, pass.
    pub fn record(&self, label: &str) -> String {
        format!(
            "{},{},{},{:.17e},{:.17e},{}",
            label, self.condition, self.samples, self.max_violation, self.tolerance, self.pass
        )
    }
}

fn random_amplitude(rng: &mut ChaCha8Rng) -> Amplitude {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-like random unitary: exponential of a random Hermitian matrix with
/// unit-normal entries.
pub fn random_unitary(rng: &mut ChaCha8Rng, sites: usize) -> SingleParticlePropagator {
    let raw = CMatrix::from_fn(sites, sites, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    SingleParticlePropagator::new(unitary_exp(&h, 1.0), 0.0, 1.0)
        .expect("exponential of Hermitian is unitary")
}

/// Isolation condition: when one path amplitude vanishes, the synthesized
/// probability must equal the surviving path's probability,
/// |H(a, 0)|^2 = |a|^2 and |H(0, b)|^2 = |b|^2.
pub fn check_isolation(
    candidate: &Candidate,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> ConsistencyReport {
    let zero = Complex64::new(0.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = Vec::with_capacity(samples);
    for i in 0..samples {
        let a = random_amplitude(&mut rng);
        let b = random_amplitude(&mut rng);
        let v_direct = (candidate.eval(a, zero).norm_sqr() - a.norm_sqr()).abs();
        let v_indirect = (candidate.eval(zero, b).norm_sqr() - b.norm_sqr()).abs();
        violations.push((
            v_direct.max(v_indirect),
            format!("sample {i}: a={a}, b={b}"),
        ));
    }
    ConsistencyReport::from_violations(Condition::Isolation, &violations, tolerance, seed)
}

/// The two-particle permutation amplitudes of a propagator between sorted
/// event pairs: (direct, indirect).
fn pair_amps(
    u: &SingleParticlePropagator,
    from: &EventMultiset,
    to: &EventMultiset,
) -> (Amplitude, Amplitude) {
    let f = from.events();
    let t = to.events();
    let direct = u.amp(t[0], f[0]) * u.amp(t[1], f[1]);
    let indirect = u.amp(t[1], f[0]) * u.amp(t[0], f[1]);
    (direct, indirect)
}

/// Three-time composition violation for a candidate synthesis rule at
/// n = 2: the candidate applied to the composed propagator's permutation
/// amplitudes, versus the sum over intermediate event multisets of
/// candidate-synthesized leg amplitudes (with the reduced-space
/// multiplicity weights). Zero for plus under bosonic weighting and for
/// minus under fermionic weighting (Cauchy-Binet).
pub fn composition_violation(
    candidate: &Candidate,
    u: &SingleParticlePropagator,
    v: &SingleParticlePropagator,
    from: &EventMultiset,
    to: &EventMultiset,
    stats: ExchangeStatistics,
) -> Result<f64> {
    if from.len() != 2 || to.len() != 2 {
        return Err(Error::NotTwoParticles(from.len().max(to.len())));
    }
    if v.sites() != u.sites() {
        return Err(Error::DimensionMismatch {
            expected: u.sites(),
            found: v.sites(),
        });
    }
    if stats == ExchangeStatistics::Fermion
        && !(from.strictly_increasing() && to.strictly_increasing())
    {
        return Err(Error::CoincidentFermionEvents);
    }
    let composed = u.then(v)?;
    let (direct, indirect) = pair_amps(&composed, from, to);
    let route_direct = candidate.eval(direct, indirect);

    let mut route_summed = Complex64::new(0.0, 0.0);
    for mid in EventMultiset::enumerate_for(u.sites(), 2, stats) {
        let (ud, ui) = pair_amps(u, from, &mid);
        let (vd, vi) = pair_amps(v, &mid, to);
        let weight = match stats {
            ExchangeStatistics::Boson => mid.weight(),
            ExchangeStatistics::Fermion => 1.0,
        };
        route_summed +=
            Complex64::new(weight, 0.0) * candidate.eval(ud, ui) * candidate.eval(vd, vi);
    }
    Ok((route_direct - route_summed).norm())
}

/// Composition check packaged as a report.
pub fn check_composition(
    candidate: &Candidate,
    u: &SingleParticlePropagator,
    v: &SingleParticlePropagator,
    from: &EventMultiset,
    to: &EventMultiset,
    stats: ExchangeStatistics,
    tolerance: f64,
) -> Result<ConsistencyReport> {
    let violation = composition_violation(candidate, u, v, from, to, stats)?;
    let desc = format!("{stats}: {from} -> {to}");
    Ok(ConsistencyReport::from_violations(
        Condition::Composition,
        &[(violation, desc)],
        tolerance,
        0,
    ))
}

/// Composition consistency for the +- rules at any particle count
/// (permanent/determinant Cauchy-Binet): |direct three-time amplitude minus
/// the weighted intermediate-multiset sum of per-leg amplitudes|.
pub fn composed_vs_summed(
    u: &SingleParticlePropagator,
    v: &SingleParticlePropagator,
    from: &EventMultiset,
    to: &EventMultiset,
    stats: ExchangeStatistics,
) -> Result<f64> {
    if v.sites() != u.sites() {
        return Err(Error::DimensionMismatch {
            expected: u.sites(),
            found: v.sites(),
        });
    }
    let n = from.len();
    if n != to.len() {
        return Err(Error::ParticleCountMismatch(n, to.len()));
    }
    let composed = u.then(v)?;
    let direct = transition_amplitude(&composed, from, to, stats)?;
    let mut summed = Complex64::new(0.0, 0.0);
    for mid in EventMultiset::enumerate_for(u.sites(), n, stats) {
        let leg1 = transition_amplitude(u, from, &mid, stats)?;
        let leg2 = transition_amplitude(v, &mid, to, stats)?;
        let weight = match stats {
            ExchangeStatistics::Boson => mid.weight(),
            ExchangeStatistics::Fermion => 1.0,
        };
        summed += Complex64::new(weight, 0.0) * leg1 * leg2;
    }
    Ok((direct - summed).norm())
}

/// Born-rule completeness: sum over all final multisets of
/// transition_probability equals one.
pub fn check_normalization(
    u: &SingleParticlePropagator,
    from: &EventMultiset,
    stats: ExchangeStatistics,
    tolerance: f64,
) -> Result<ConsistencyReport> {
    let mut total = 0.0;
    for to in EventMultiset::enumerate_for(u.sites(), from.len(), stats) {
        total += crate::nonpersistence::transition_probability(u, from, &to, stats)?;
    }
    let violation = (total - 1.0).abs();
    let desc = format!("{stats}: from {from}");
    Ok(ConsistencyReport::from_violations(
        Condition::Normalization,
        &[(violation, desc)],
        tolerance,
        0,
    ))
}

/// Configuration for the candidate scan.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub scenarios: usize,
    pub seed: u64,
    pub min_sites: usize,
    pub max_sites: usize,
    pub isolation_samples: usize,
    pub isolation_tol: f64,
    pub composition_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            scenarios: 50,
            seed: 20250811,
            min_sites: 4,
            max_sites: 8,
            isolation_samples: 1000,
            isolation_tol: 1e-12,
            composition_tol: 1e-10,
        }
    }
}

/// Scan result for one candidate.
#[derive(Debug, Clone)]
pub struct ScanOutcome {
    pub profile: CandidateProfile,
    pub isolation: ConsistencyReport,
    pub composition: ConsistencyReport,
    pub survives: bool,
}

/// A reproducible random composition scenario: two unitaries and a pair of
/// sorted event pairs, valid for both statistics.
pub struct Scenario {
    pub u: SingleParticlePropagator,
    pub v: SingleParticlePropagator,
    pub from: EventMultiset,
    pub to: EventMultiset,
}

pub fn random_scenario(rng: &mut ChaCha8Rng, min_sites: usize, max_sites: usize) -> Scenario {
    let sites = rng.gen_range(min_sites..=max_sites);
    let u = random_unitary(rng, sites);
    let v = random_unitary(rng, sites);
    let pick_pair = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(0..sites);
        let mut b = rng.gen_range(0..sites - 1);
        if b >= a {
            b += 1;
        }
        EventMultiset::new(vec![a, b], sites).expect("valid events")
    };
    let from = pick_pair(rng);
    let to = pick_pair(rng);
    Scenario { u, v, from, to }
}

/// Evaluate every candidate against the isolation and composition
/// conditions over a reproducible scenario set. A candidate's composition
/// violation on a scenario is the smaller of the bosonic- and
/// fermionic-weighting violations: a synthesis rule is viable if it is
/// consistent under at least one event-counting measure. The certified
/// outcome is that exactly plus and minus survive.
pub fn scan_candidates(
    profiles: &[CandidateProfile],
    config: &ScanConfig,
) -> Result<Vec<ScanOutcome>> {
    if profiles.is_empty() {
        return Err(Error::EmptyRegistry);
    }
    let mut scenarios = Vec::with_capacity(config.scenarios);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    for _ in 0..config.scenarios {
        scenarios.push(random_scenario(
            &mut rng,
            config.min_sites,
            config.max_sites,
        ));
    }
    let mut outcomes = Vec::with_capacity(profiles.len());
    for profile in profiles {
        let isolation = check_isolation(
            &profile.candidate,
            config.isolation_samples,
            config.isolation_tol,
            config.seed,
        );
        let mut violations = Vec::with_capacity(scenarios.len());
        for (i, sc) in scenarios.iter().enumerate() {
            let v_boson = composition_violation(
                &profile.candidate,
                &sc.u,
                &sc.v,
                &sc.from,
                &sc.to,
                ExchangeStatistics::Boson,
            )?;
            let v_fermion = composition_violation(
                &profile.candidate,
                &sc.u,
                &sc.v,
                &sc.from,
                &sc.to,
                ExchangeStatistics::Fermion,
            )?;
            violations.push((
                v_boson.min(v_fermion),
                format!(
                    "scenario {i} ({} sites, {} -> {}): boson violation {v_boson:.3e}, fermion violation {v_fermion:.3e}",
                    sc.u.sites(),
                    sc.from,
                    sc.to
                ),
            ));
        }
        let composition = ConsistencyReport::from_violations(
            Condition::Composition,
            &violations,
            config.composition_tol,
            config.seed,
        );
        let survives = isolation.pass && composition.pass;
        outcomes.push(ScanOutcome {
            profile: profile.clone(),
            isolation,
            composition,
            survives,
        });
    }
    Ok(outcomes)
}
