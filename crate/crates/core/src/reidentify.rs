//! Probabilistic reidentifiability: swap probabilities, isolation
//! detection, and multi-time track assignment over identical-event
//! sequences — the bubble-chamber picture and its breakdown.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::lattice::SingleParticlePropagator;
use crate::nonpersistence::EventMultiset;
use crate::perm::MAX_ENUMERATED;
use crate::persistence::{all_permutation_amps, PermutationAmplitudes};

/// Amplitude magnitudes below this are treated as an unreachable path.
const UNREACHABLE: f64 = 1e-300;

/// A sequence of identical-event observations at strictly increasing times.
#[derive(Debug, Clone)]
pub struct EventHistory {
    times: Vec<f64>,
    events: Vec<EventMultiset>,
}

impl EventHistory {
    pub fn new(times: Vec<f64>, events: Vec<EventMultiset>) -> Result<Self> {
        if times.len() != events.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: events.len(),
            });
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::TimesNotIncreasing);
        }
        if let Some(first) = events.first() {
            if events.iter().any(|e| e.len() != first.len()) {
                return Err(Error::UnevenHistory);
            }
        }
        Ok(Self { times, events })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn events(&self) -> &[EventMultiset] {
        &self.events
    }
}

/// Conditional probability of the indirect path given the observed
/// endpoints, computed in the labelled model:
/// |a_21|^2 / (|a_12|^2 + |a_21|^2).
pub fn swap_probability(amps: &PermutationAmplitudes) -> Result<f64> {
    if amps.n() != 2 {
        return Err(Error::NotTwoParticles(amps.n()));
    }
    let direct = amps.direct().norm();
    let indirect = amps.indirect()?.norm();
    if direct < UNREACHABLE && indirect < UNREACHABLE {
        return Err(Error::UnreachableTransition);
    }
    let d2 = direct * direct;
    let i2 = indirect * indirect;
    Ok(i2 / (d2 + i2))
}

/// Whether one permutation dominates enough to treat the data as a
/// probabilistic labelled model. For two particles this is
/// min(|a_12|^2, |a_21|^2) / max(...) < epsilon; for more, the best
/// permutation must carry more than 1 - epsilon of the total mass.
pub fn is_isolated(amps: &PermutationAmplitudes, epsilon: f64) -> Result<bool> {
    if amps.n() == 2 {
        let d2 = amps.direct().norm_sqr();
        let i2 = amps.indirect()?.norm_sqr();
        if d2 < UNREACHABLE && i2 < UNREACHABLE {
            return Err(Error::UnreachableTransition);
        }
        let (lo, hi) = if d2 < i2 { (d2, i2) } else { (i2, d2) };
        Ok(lo / hi < epsilon)
    } else {
        let masses: Vec<f64> = amps.iter().map(|(_, a)| a.norm_sqr()).collect();
        let total: f64 = masses.iter().sum();
        if total < UNREACHABLE {
            return Err(Error::UnreachableTransition);
        }
        let best = masses.iter().copied().fold(0.0, f64::max);
        Ok(best / total > 1.0 - epsilon)
    }
}

/// A single interval's track decision.
#[derive(Debug, Clone)]
pub struct StepAssignment {
    pub t_from: f64,
    pub t_to: f64,
    /// Chosen permutation: event j at the later time continues the track of
    /// event permutation[j]... the permutation maximizing the path mass.
    pub permutation: Vec<usize>,
    /// Best-permutation mass over total permutation mass.
    pub step_probability: f64,
    /// Two-particle swap probability for this interval, when n = 2.
    pub swap_probability: Option<f64>,
    /// Whether one permutation dominates at the supplied epsilon.
    pub isolated: bool,
}

/// A full track assignment across an event history.
#[derive(Debug, Clone)]
pub struct TrackAssignment {
    pub steps: Vec<StepAssignment>,
    /// Product over intervals of the per-step probability.
    pub confidence: f64,
}

impl TrackAssignment {
    /// Delimited-text report: one row per interval.
    pub fn to_delimited(&self) -> String {
        let mut out = String::from(
            "interval,t_from,t_to,permutation,step_probability,swap_probability,isolated\n",
        );
        for (i, step) in self.steps.iter().enumerate() {
            let perm = step.permutation.iter().map(|p| p.to_string()).join("-");
            let swap = step
                .swap_probability
                .map(|s| format!("{s:.17e}"))
                .unwrap_or_else(|| "nan".into());
            out.push_str(&format!(
                "{},{:.17e},{:.17e},{},{:.17e},{},{}\n",
                i, step.t_from, step.t_to, perm, step.step_probability, swap, step.isolated
            ));
        }
        out
    }
}

/// Assign tracks across a history: per interval, pick the permutation
/// maximizing the product of single-step path probabilities; confidence is
/// the product of best-to-total mass ratios. Steps where no permutation
/// dominates are flagged as not isolated.
pub fn assign_tracks(
    history: &EventHistory,
    propagators: &[SingleParticlePropagator],
    epsilon: f64,
) -> Result<TrackAssignment> {
    let intervals = history.len().saturating_sub(1);
    if propagators.len() != intervals {
        return Err(Error::PropagatorCountMismatch {
            intervals,
            propagators: propagators.len(),
        });
    }
    if let Some(first) = history.events().first() {
        if first.len() > MAX_ENUMERATED {
            return Err(Error::TooManyParticles {
                n: first.len(),
                limit: MAX_ENUMERATED,
            });
        }
    }
    let mut steps = Vec::with_capacity(intervals);
    let mut confidence = 1.0;
    for (i, propagator) in propagators.iter().enumerate() {
        let from = &history.events()[i];
        let to = &history.events()[i + 1];
        let amps = all_permutation_amps(propagator, from, to)?;
        let masses: Vec<f64> = amps.iter().map(|(_, a)| a.norm_sqr()).collect();
        let total: f64 = masses.iter().sum();
        if total < UNREACHABLE {
            return Err(Error::UnreachableTransition);
        }
        let (best_idx, best_mass) =
            masses
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, -1.0),
                    |(bi, bm), (j, m)| {
                        if m > bm {
                            (j, m)
                        } else {
                            (bi, bm)
                        }
                    },
                );
        let permutation = amps
            .iter()
            .nth(best_idx)
            .map(|(sigma, _)| sigma.to_vec())
            .expect("index in range");
        let step_probability = best_mass / total;
        confidence *= step_probability;
        let swap = if from.len() == 2 {
            Some(swap_probability(&amps)?)
        } else {
            None
        };
        steps.push(StepAssignment {
            t_from: history.times()[i],
            t_to: history.times()[i + 1],
            permutation,
            step_probability,
            swap_probability: swap,
            isolated: is_isolated(&amps, epsilon)?,
        });
    }
    Ok(TrackAssignment { steps, confidence })
}
