//! Scenario analyses: each one drives the core modules and produces a
//! delimited table.

use itertools::Itertools;
use num_complex::Complex64;

use idlab_core::consistency::{
    check_isolation, composition_violation, registry, scan_candidates, Candidate,
};
use idlab_core::nonpersistence::{
    dirac_symmetrize, distance_distribution, leftmost_distribution, reduced_density,
    symmetrize_state, transition_probability, EventMultiset, ExchangeStatistics, ParticleLabel,
};
use idlab_core::persistence::{all_permutation_amps, PersistenceState};
use idlab_core::reidentify::{assign_tracks, is_isolated, swap_probability, EventHistory};
use idlab_core::{
    build_hamiltonian, evolve_noninteracting, evolve_persistence, gaussian_packet, propagator_over,
    CMatrix, CVector, Error, Result, SingleParticlePropagator, SingleParticleState,
};

use crate::output::{fmt_f, Table};
use crate::scenario::{Analysis, Initial, Scenario};

/// Shared precomputed pieces for one scenario run.
pub struct Context {
    pub hamiltonian: CMatrix,
    pub packets: Option<Vec<SingleParticleState>>,
    pub initial_state: PersistenceState,
    pub initial_events: Option<EventMultiset>,
}

impl Context {
    pub fn prepare(sc: &Scenario) -> Result<Context> {
        let hamiltonian = build_hamiltonian(&sc.lattice)?;
        match &sc.initial {
            Initial::Packets(specs) => {
                let packets: Vec<SingleParticleState> = specs
                    .iter()
                    .map(|p| gaussian_packet(&sc.lattice, p.x0, p.p0, p.sigma))
                    .collect::<Result<_>>()?;
                let initial_state = PersistenceState::product(&packets)?;
                let events = EventMultiset::new(
                    specs.iter().map(|p| p.x0.round() as usize).collect(),
                    sc.lattice.sites,
                )?;
                Ok(Context {
                    hamiltonian,
                    packets: Some(packets),
                    initial_state,
                    initial_events: Some(events),
                })
            }
            Initial::Amplitudes(entries) => {
                let n = entries[0].0.len();
                let dim = sc.lattice.sites.pow(n as u32);
                let mut psi = CVector::zeros(dim);
                for (positions, amp) in entries {
                    let idx = idlab_core::persistence::config_index(positions, sc.lattice.sites);
                    psi[idx] += amp;
                }
                let initial_state = PersistenceState::new(psi, sc.lattice.sites, n)?;
                Ok(Context {
                    hamiltonian,
                    packets: None,
                    initial_state,
                    initial_events: None,
                })
            }
        }
    }

    fn propagator_from_start(&self, sc: &Scenario, t: f64) -> Result<SingleParticlePropagator> {
        propagator_over(&self.hamiltonian, sc.schedule[0], t)
    }

    /// Detected event positions at time t: the peak site of each packet
    /// evolved independently from the first schedule time.
    fn events_at(&self, sc: &Scenario, t: f64) -> Result<EventMultiset> {
        let packets = self.packets.as_ref().ok_or(Error::NullState)?;
        let u = self.propagator_from_start(sc, t)?;
        let peaks: Result<Vec<usize>> = packets
            .iter()
            .map(|p| Ok(u.apply(p)?.peak_site()))
            .collect();
        EventMultiset::new(peaks?, sc.lattice.sites)
    }

    /// The two-particle state evolved from the first schedule time to t.
    fn state_at(&self, sc: &Scenario, t: f64) -> Result<PersistenceState> {
        if sc.interaction == 0.0 {
            let u = self.propagator_from_start(sc, t)?;
            evolve_noninteracting(&self.initial_state, &u)
        } else {
            let h2 = idlab_core::symmetric_two_particle_hamiltonian(&sc.lattice, sc.interaction)?;
            evolve_persistence(&self.initial_state, &h2, t - sc.schedule[0])
        }
    }
}

pub fn run_analysis(analysis: Analysis, sc: &Scenario, ctx: &Context) -> Result<Table> {
    match analysis {
        Analysis::TransitionMap => transition_map(sc, ctx),
        Analysis::CompositionCheck => composition_check(sc, ctx),
        Analysis::IsolationCheck => isolation_check(sc),
        Analysis::CandidateScan => candidate_scan(sc),
        Analysis::Swap => swap(sc, ctx),
        Analysis::Tracks => tracks(sc, ctx),
        Analysis::Leftmost => leftmost(sc, ctx),
        Analysis::Distance => distance(sc, ctx),
        Analysis::DiracContrast => dirac_contrast(sc, ctx),
        Analysis::SumRuleDemo => sum_rule_demo(sc, ctx),
    }
}

fn events_field(m: &EventMultiset) -> String {
    m.events().iter().map(|e| e.to_string()).join("-")
}

fn transition_map(sc: &Scenario, ctx: &Context) -> Result<Table> {
    let from = ctx.initial_events.clone().ok_or(Error::NullState)?;
    let tol = sc.tolerances.get("normalization");
    let mut table = Table::new("transition_map", &["time", "final_events", "probability"]);
    table.meta("from_events", events_field(&from));
    table.meta("tolerance normalization", fmt_f(tol));
    for &t in &sc.schedule[1..] {
        let u = ctx.propagator_from_start(sc, t)?;
        let mut total = 0.0;
        for to in EventMultiset::enumerate_for(sc.lattice.sites, from.len(), sc.statistics) {
            let p = transition_probability(&u, &from, &to, sc.statistics)?;
            total += p;
            table.row(vec![fmt_f(t), events_field(&to), fmt_f(p)]);
        }
        table.meta(&format!("total_probability t={t}"), fmt_f(total));
    }
    Ok(table)
}

fn composition_check(sc: &Scenario, ctx: &Context) -> Result<Table> {
    let events = ctx.initial_events.clone().ok_or(Error::NullState)?;
    let candidate = match sc.statistics {
        ExchangeStatistics::Boson => Candidate::Plus,
        ExchangeStatistics::Fermion => Candidate::Minus,
    };
    let tol = sc.tolerances.get("composition");
    let mut table = Table::new(
        "composition_check",
        &[
            "t1",
            "t2",
            "t3",
            "candidate",
            "violation",
            "tolerance",
            "pass",
        ],
    );
    table.meta("events", events_field(&events));
    for window in sc.schedule.windows(3) {
        let (t1, t2, t3) = (window[0], window[1], window[2]);
        let u = propagator_over(&ctx.hamiltonian, t1, t2)?;
        let v = propagator_over(&ctx.hamiltonian, t2, t3)?;
        let violation = composition_violation(&candidate, &u, &v, &events, &events, sc.statistics)?;
        table.row(vec![
            fmt_f(t1),
            fmt_f(t2),
            fmt_f(t3),
            candidate.name(),
            fmt_f(violation),
            fmt_f(tol),
            (violation < tol).to_string(),
        ]);
    }
    Ok(table)
}

fn isolation_check(sc: &Scenario) -> Result<Table> {
    let tol = sc.tolerances.get("isolation");
    let samples = sc.scan.isolation_samples;
    let mut table = Table::new(
        "isolation_check",
        &[
            "candidate",
            "continuous",
            "holomorphic",
            "samples",
            "max_violation",
            "tolerance",
            "pass",
        ],
    );
    for profile in registry() {
        let report = check_isolation(&profile.candidate, samples, tol, sc.seed);
        table.row(vec![
            profile.candidate.name(),
            profile.continuous.to_string(),
            profile.holomorphic.to_string(),
            report.samples.to_string(),
            fmt_f(report.max_violation),
            fmt_f(tol),
            report.pass.to_string(),
        ]);
    }
    Ok(table)
}

fn candidate_scan(sc: &Scenario) -> Result<Table> {
    let outcomes = scan_candidates(&registry(), &sc.scan)?;
    let mut table = Table::new(
        "candidate_scan",
        &[
            "candidate",
            "continuous",
            "holomorphic",
            "isolation_violation",
            "isolation_pass",
            "composition_violation",
            "composition_pass",
            "survives",
        ],
    );
    table.meta("scenarios", sc.scan.scenarios.to_string());
    table.meta("tolerance isolation", fmt_f(sc.scan.isolation_tol));
    table.meta("tolerance composition", fmt_f(sc.scan.composition_tol));
    let survivors: Vec<String> = outcomes
        .iter()
        .filter(|o| o.survives)
        .map(|o| o.profile.candidate.name())
        .collect();
    table.meta("survivors", survivors.join("+"));
    for outcome in &outcomes {
        table.row(vec![
            outcome.profile.candidate.name(),
            outcome.profile.continuous.to_string(),
            outcome.profile.holomorphic.to_string(),
            fmt_f(outcome.isolation.max_violation),
            outcome.isolation.pass.to_string(),
            fmt_f(outcome.composition.max_violation),
            outcome.composition.pass.to_string(),
            outcome.survives.to_string(),
        ]);
    }
    Ok(table)
}

fn swap(sc: &Scenario, ctx: &Context) -> Result<Table> {
    let mut table = Table::new(
        "swap",
        &[
            "t_from",
            "t_to",
            "from_events",
            "to_events",
            "swap_probability",
            "isolated",
        ],
    );
    table.meta("epsilon", fmt_f(sc.epsilon));
    for window in sc.schedule.windows(2) {
        let (t1, t2) = (window[0], window[1]);
        let from = ctx.events_at(sc, t1)?;
        let to = ctx.events_at(sc, t2)?;
        let u = propagator_over(&ctx.hamiltonian, t1, t2)?;
        let amps = all_permutation_amps(&u, &from, &to)?;
        table.row(vec![
            fmt_f(t1),
            fmt_f(t2),
            events_field(&from),
            events_field(&to),
            fmt_f(swap_probability(&amps)?),
            is_isolated(&amps, sc.epsilon)?.to_string(),
        ]);
    }
    Ok(table)
}

fn tracks(sc: &Scenario, ctx: &Context) -> Result<Table> {
    let times = sc.schedule.clone();
    let events: Result<Vec<EventMultiset>> = times.iter().map(|&t| ctx.events_at(sc, t)).collect();
    let history = EventHistory::new(times.clone(), events?)?;
    let props: Result<Vec<SingleParticlePropagator>> = times
        .windows(2)
        .map(|w| propagator_over(&ctx.hamiltonian, w[0], w[1]))
        .collect();
    let assignment = assign_tracks(&history, &props?, sc.epsilon)?;
    let mut table = Table::new(
        "tracks",
        &[
            "interval",
            "t_from",
            "t_to",
            "permutation",
            "step_probability",
            "swap_probability",
            "isolated",
        ],
    );
    table.meta("epsilon", fmt_f(sc.epsilon));
    table.meta("confidence", fmt_f(assignment.confidence));
    for (i, step) in assignment.steps.iter().enumerate() {
        table.row(vec![
            i.to_string(),
            fmt_f(step.t_from),
            fmt_f(step.t_to),
            step.permutation.iter().map(|p| p.to_string()).join("-"),
            fmt_f(step.step_probability),
            step.swap_probability
                .map(fmt_f)
                .unwrap_or_else(|| "nan".into()),
            step.isolated.to_string(),
        ]);
    }
    Ok(table)
}

fn leftmost(sc: &Scenario, ctx: &Context) -> Result<Table> {
    let with_reference = ctx.packets.is_some();
    let columns: &[&str] = if with_reference {
        &[
            "time",
            "site",
            "probability",
            "left_packet_density",
            "abs_diff",
        ]
    } else {
        &["time", "site", "probability"]
    };
    let mut table = Table::new("leftmost", columns);
    table.meta(
        "tolerance normalization",
        fmt_f(sc.tolerances.get("normalization")),
    );
    for &t in &sc.schedule {
        let state = ctx.state_at(sc, t)?;
        let (psid, _) = symmetrize_state(&state, sc.statistics)?;
        let p = leftmost_distribution(&psid);
        let reference = match &ctx.packets {
            Some(packets) => {
                let u = ctx.propagator_from_start(sc, t)?;
                Some(u.apply(&packets[0])?.density())
            }
            None => None,
        };
        for (site, &prob) in p.iter().enumerate() {
            let mut row = vec![fmt_f(t), site.to_string(), fmt_f(prob)];
            if let Some(reference) = &reference {
                row.push(fmt_f(reference[site]));
                row.push(fmt_f((prob - reference[site]).abs()));
            }
            table.row(row);
        }
        table.meta(
            &format!("total_probability t={t}"),
            fmt_f(p.iter().sum::<f64>()),
        );
    }
    Ok(table)
}

fn distance(sc: &Scenario, ctx: &Context) -> Result<Table> {
    let mut table = Table::new("distance", &["time", "distance", "probability"]);
    table.meta(
        "tolerance normalization",
        fmt_f(sc.tolerances.get("normalization")),
    );
    for &t in &sc.schedule {
        let state = ctx.state_at(sc, t)?;
        let (psid, _) = symmetrize_state(&state, sc.statistics)?;
        let p = distance_distribution(&psid);
        for (d, &prob) in p.iter().enumerate() {
            table.row(vec![fmt_f(t), d.to_string(), fmt_f(prob)]);
        }
        table.meta(
            &format!("total_probability t={t}"),
            fmt_f(p.iter().sum::<f64>()),
        );
    }
    Ok(table)
}

fn dirac_contrast(sc: &Scenario, ctx: &Context) -> Result<Table> {
    let packets = ctx.packets.as_ref().ok_or(Error::NullState)?;
    let (phi_a, phi_b) = (&packets[0], &packets[1]);
    let ext = dirac_symmetrize(phi_a, phi_b, sc.statistics)?;
    let labelled = ext.to_persistence()?;
    let rho_1 = reduced_density(&labelled, ParticleLabel::First)?;
    let rho_2 = reduced_density(&labelled, ParticleLabel::Second)?;
    let mixture = (phi_a.vector() * phi_a.vector().adjoint()
        + phi_b.vector() * phi_b.vector().adjoint())
        * Complex64::new(0.5, 0.0);

    let (psid, _) = symmetrize_state(&ctx.initial_state, sc.statistics)?;
    let p_leftmost = leftmost_distribution(&psid);
    let density_a = phi_a.density();

    let mut table = Table::new(
        "dirac_contrast",
        &[
            "site",
            "dirac_density_label1",
            "dirac_density_label2",
            "even_mixture",
            "leftmost_probability",
            "left_packet_density",
        ],
    );
    let mut max_reduced_dev: f64 = 0.0;
    let mut max_leftmost_dev: f64 = 0.0;
    for site in 0..sc.lattice.sites {
        let d1 = rho_1[(site, site)].re;
        let d2 = rho_2[(site, site)].re;
        let mix = mixture[(site, site)].re;
        max_reduced_dev = max_reduced_dev.max((d1 - mix).abs()).max((d2 - mix).abs());
        max_leftmost_dev = max_leftmost_dev.max((p_leftmost[site] - density_a[site]).abs());
        table.row(vec![
            site.to_string(),
            fmt_f(d1),
            fmt_f(d2),
            fmt_f(mix),
            fmt_f(p_leftmost[site]),
            fmt_f(density_a[site]),
        ]);
    }
    table.meta(
        "tolerance dirac-contrast",
        fmt_f(sc.tolerances.get("dirac-contrast")),
    );
    table.meta("tolerance leftmost", fmt_f(sc.tolerances.get("leftmost")));
    table.meta("max_reduced_density_deviation", fmt_f(max_reduced_dev));
    table.meta(
        "max_leftmost_deviation_from_left_packet",
        fmt_f(max_leftmost_dev),
    );
    let half = sc.lattice.sites / 2;
    let left_mass_reduced: f64 = (0..half).map(|x| rho_1[(x, x)].re).sum();
    let left_mass_observable: f64 = p_leftmost.iter().take(half).sum();
    table.meta("left_half_mass_reduced_state", fmt_f(left_mass_reduced));
    table.meta(
        "left_half_mass_leftmost_observable",
        fmt_f(left_mass_observable),
    );
    Ok(table)
}

fn sum_rule_demo(sc: &Scenario, ctx: &Context) -> Result<Table> {
    let events = ctx.initial_events.clone().ok_or(Error::NullState)?;
    let source = events.min_event();
    let target = if events.max_event() != source {
        events.max_event()
    } else {
        (source + sc.lattice.sites / 2) % sc.lattice.sites
    };
    let (t1, t2, t3) = (sc.schedule[0], sc.schedule[1], sc.schedule[2]);
    let u = propagator_over(&ctx.hamiltonian, t1, t2)?;
    let v = propagator_over(&ctx.hamiltonian, t2, t3)?;
    let direct = u.then(&v)?.amp(target, source);
    let paths: Vec<Complex64> = (0..sc.lattice.sites)
        .map(|k| v.amp(target, k) * u.amp(k, source))
        .collect();
    let full_sum: Complex64 = paths.iter().sum();
    let mut ranked: Vec<usize> = (0..sc.lattice.sites).collect();
    ranked.sort_by(|&i, &j| paths[j].norm().total_cmp(&paths[i].norm()));
    let (a, b) = (paths[ranked[0]], paths[ranked[1]]);
    let ab = a + b;
    let difference = (full_sum - direct).norm();
    let tol = sc.tolerances.get("sum-rule");

    let mut table = Table::new(
        "sum_rule_demo",
        &[
            "a_re",
            "a_im",
            "b_re",
            "b_im",
            "a_plus_b_re",
            "a_plus_b_im",
            "direct_re",
            "direct_im",
            "full_sum_re",
            "full_sum_im",
            "difference",
            "tolerance",
            "pass",
        ],
    );
    table.meta("source_site", source.to_string());
    table.meta("target_site", target.to_string());
    table.meta("path_a_site", ranked[0].to_string());
    table.meta("path_b_site", ranked[1].to_string());
    table.row(vec![
        fmt_f(a.re),
        fmt_f(a.im),
        fmt_f(b.re),
        fmt_f(b.im),
        fmt_f(ab.re),
        fmt_f(ab.im),
        fmt_f(direct.re),
        fmt_f(direct.im),
        fmt_f(full_sum.re),
        fmt_f(full_sum.im),
        fmt_f(difference),
        fmt_f(tol),
        (difference < tol).to_string(),
    ]);
    Ok(table)
}
