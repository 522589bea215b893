//! The five campaigns. Trials run on the rayon pool and are collected in
//! index order, so reports do not depend on scheduling.

use std::collections::BTreeSet;
use std::path::Path;
use std::sync::Arc;

use anyhow::Context;
use cmcsplit::complex::Subcomplex;
use cmcsplit::group::{all_subgroups, build_level_system, LinearRep, Subgroup};
use cmcsplit::hashing::short_hash;
use cmcsplit::idempotents::IdempotentSystem;
use cmcsplit::linalg::Scalar;
use cmcsplit::resolution::{
    multi_level_alpha, smooth_product_decomposition, uniformly_cuspidal, LevelMaps,
};
use cmcsplit::splitting::{
    construct_global_retraction, construct_global_section, random_extension, LevelData,
    SplittingCertificate,
};
use cmcsplit::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{config_error, Campaign, CampaignConfig};
use crate::fixture::{shrink, Fixture, FixtureRecord};
use crate::instance::Instance;
use crate::report::{
    summarize, BadCharacteristicRecord, Check, Outcome, Report, TrialRecord, SCHEMA_VERSION,
};

/// Seed of trial `i` under campaign seed `seed`.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    let mut z = seed.wrapping_add(
        (i as u64)
            .wrapping_add(1)
            .wrapping_mul(0x9e37_79b9_7f4a_7c15),
    );
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn bad_characteristic(e: &Error) -> Option<BadCharacteristicRecord> {
    match e {
        Error::BadCharacteristic {
            characteristic,
            subgroup,
        } => Some(BadCharacteristicRecord {
            characteristic: *characteristic,
            context: subgroup.context.clone(),
            order: subgroup.order,
            elements: subgroup.elements.clone(),
            divides_order: *characteristic > 0 && subgroup.order as u64 % characteristic == 0,
        }),
        _ => None,
    }
}

/// Files the error on the trial: a characteristic failure is its own outcome,
/// anything else fails the trial.
fn record_error(mut t: TrialRecord, e: &anyhow::Error) -> TrialRecord {
    match e.downcast_ref::<Error>().and_then(bad_characteristic) {
        Some(b) => {
            t.checks.push(Check::new(
                "characteristic divides the named subgroup order",
                b.divides_order,
            ));
            t.outcome = Outcome::BadCharacteristic;
            t.bad_characteristic = Some(b);
        }
        None => {
            t.outcome = Outcome::Fail;
            t.error = Some(format!("{e:#}"));
        }
    }
    t
}

fn derived_level_systems(
    inst: &Instance,
    rep: &LinearRep,
) -> anyhow::Result<Vec<IdempotentSystem>> {
    let systems = build_level_system(&inst.action, rep, &inst.family)?;
    Ok(systems
        .into_iter()
        .map(IdempotentSystem::derive_cell_idempotents)
        .collect::<Result<Vec<_>, _>>()?)
}

fn first_level_system(inst: &Instance, rep: &LinearRep) -> anyhow::Result<IdempotentSystem> {
    let mut fam = inst.family.clone();
    fam.levels.truncate(1);
    Ok(build_level_system(&inst.action, rep, &fam)?
        .remove(0)
        .derive_cell_idempotents()?)
}

struct Body {
    trials: Vec<TrialRecord>,
    fixtures: Vec<FixtureRecord>,
    notes: Vec<String>,
}

/// Runs the configured campaign. Fixture files, if any, go under `out/fixtures`.
pub fn run(cfg: &CampaignConfig, out: Option<&Path>) -> anyhow::Result<Report> {
    cfg.validate()?;
    let inst = Instance::build(cfg)?;
    let mut body = match cfg.campaign {
        Campaign::SupportProjection => support_projection(cfg, &inst, out)?,
        Campaign::Resolution => resolution(cfg, &inst)?,
        Campaign::Splitting | Campaign::Retraction => splitting(cfg, &inst)?,
        Campaign::Fuzz => fuzz(cfg, &inst, out)?,
    };
    body.notes.push(format!(
        "level family: {}",
        match inst.family.base_radius {
            Some(r) => format!("pointwise stabilizers of balls of radius {r} + n"),
            None => "explicit".to_string(),
        }
    ));
    let summary = summarize(
        cfg.campaign,
        cfg.expect_bad_characteristic,
        &body.trials,
        &body.fixtures,
    );
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        campaign: cfg.campaign,
        config: cfg.clone(),
        config_hash: short_hash(cfg),
        instance: inst.summary(),
        trials: body.trials,
        summary,
        fixtures: body.fixtures,
        notes: body.notes,
    })
}

/// One representation per basis round; without `random_basis` there is a single round.
fn round_reps(
    cfg: &CampaignConfig,
    inst: &Instance,
    rounds: usize,
) -> anyhow::Result<Vec<(Option<u64>, Arc<LinearRep>)>> {
    if !cfg.random_basis {
        return Ok(vec![(None, inst.rep.clone())]);
    }
    (0..rounds)
        .map(|r| {
            let s = trial_seed(cfg.seed(), r);
            Ok((Some(s), inst.rep_for(cfg, s)?))
        })
        .collect()
}

fn support_projection(
    cfg: &CampaignConfig,
    inst: &Instance,
    out: Option<&Path>,
) -> anyhow::Result<Body> {
    let c = inst.action.complex();
    let mut notes = Vec::new();
    let subjects = if c.is_tree() {
        c.enumerate_convex_subcomplexes(cfg.caps.subcomplexes)
            .map_err(|e| config_error(format!("complex: {e}")))?
    } else {
        notes.push(
            "complex is not a tree: only the whole complex is checked, convexity asserted".into(),
        );
        vec![Subcomplex::whole(c)]
    };
    let n = subjects.len();
    let reps = round_reps(cfg, inst, cfg.trials.div_ceil(n))?;
    let systems: Vec<anyhow::Result<IdempotentSystem>> = reps
        .par_iter()
        .map(|(_, rep)| first_level_system(inst, rep))
        .collect();
    // Generators suffice: the convex subcomplexes are permuted by the group,
    // so generator checks over a full round cover every element.
    let elements = inst.action.group().generators().to_vec();
    notes.push(format!(
        "u_Σ equivariance checked on {} generators; a round that visits all {n} subjects covers the whole group",
        elements.len()
    ));
    let trials: Vec<(TrialRecord, Option<Fixture>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let round = if cfg.random_basis { i / n } else { 0 };
            let sigma = &subjects[i % n];
            let mut t = TrialRecord::new(i, reps[round].0, sigma.to_string());
            let sys = match &systems[round] {
                Ok(s) => s,
                Err(e) => return (record_error(t, e), None),
            };
            let checked = (|| -> anyhow::Result<_> {
                let rec = sys.verify_support_projection(sigma)?;
                let eq = sys.support_projection_equivariant(
                    &inst.action,
                    &reps[round].1,
                    sigma,
                    elements.iter().copied(),
                )?;
                Ok((rec, eq))
            })();
            match checked {
                Ok((rec, eq)) => {
                    t.checks.push(Check::new("u_Σ idempotent", rec.idempotent));
                    t.checks
                        .push(Check::new("im u_Σ = Σ im e_x", rec.image_identity));
                    t.checks
                        .push(Check::new("ker u_Σ = ∩ ker e_x", rec.kernel_identity));
                    t.checks.push(Check::new(
                        format!("equivariant for {} generators", elements.len()),
                        eq,
                    ));
                    t.data = json!(rec);
                    let t = t.settle();
                    let fixture = if t.outcome == Outcome::Fail {
                        Fixture::new(sys, sigma.clone()).ok()
                    } else {
                        None
                    };
                    (t, fixture)
                }
                Err(e) => (record_error(t, &e), None),
            }
        })
        .collect();
    let (trials, fixtures) = archive(cfg, trials, out)?;
    Ok(Body {
        trials,
        fixtures,
        notes,
    })
}

/// Writes the first `caps.fixtures` fixtures with their shrunk forms.
fn archive(
    cfg: &CampaignConfig,
    trials: Vec<(TrialRecord, Option<Fixture>)>,
    out: Option<&Path>,
) -> anyhow::Result<(Vec<TrialRecord>, Vec<FixtureRecord>)> {
    let mut records = Vec::new();
    let mut fixtures = Vec::new();
    for (t, f) in trials {
        if let Some(f) = f.filter(|_| fixtures.len() < cfg.caps.fixtures) {
            let minimized = shrink(&f)?;
            let file = format!("fixtures/trial-{}.json", t.index);
            let minimized_file = format!("fixtures/trial-{}.min.json", t.index);
            if let Some(dir) = out {
                std::fs::create_dir_all(dir.join("fixtures"))
                    .context("creating the fixture directory")?;
                f.save(&dir.join(&file))?;
                minimized.save(&dir.join(&minimized_file))?;
            }
            fixtures.push(FixtureRecord {
                trial: t.index,
                file,
                minimized_file,
                original_cells: f.subcomplex.len(),
                minimized_cells: minimized.subcomplex.len(),
                minimized_subcomplex: minimized.subcomplex.to_string(),
                gap_cells: minimized.gap_cells(),
                still_fails: minimized.fails(),
                replays: f.replays()? && minimized.replays()?,
            });
        }
        records.push(t);
    }
    Ok((records, fixtures))
}

fn resolution(cfg: &CampaignConfig, inst: &Instance) -> anyhow::Result<Body> {
    let g = inst.action.group().clone();
    let elements = inst.check_elements();
    let subgroups: Vec<Subgroup> = if g.order() <= 48 {
        all_subgroups(&g, 4096).ok_or_else(|| anyhow::anyhow!("too many subgroups"))?
    } else {
        let mut s: BTreeSet<Subgroup> = (0..inst.action.complex().num_cells())
            .map(|c| inst.action.stabilizer(c))
            .collect();
        s.insert(Subgroup::trivial());
        s.into_iter().collect()
    };
    let trials: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.random_basis.then(|| trial_seed(cfg.seed(), i));
            let t = TrialRecord::new(i, seed, format!("level system, trial {i}"));
            match resolution_trial(cfg, inst, i, seed, &elements, &subgroups, t.clone()) {
                Ok(t) => t.settle(),
                Err(e) => record_error(t, &e),
            }
        })
        .collect();
    let mut notes = vec![format!(
        "π̄ checked over {} subgroups{}",
        subgroups.len(),
        if g.order() <= 48 {
            " (all of them)"
        } else {
            " (cell stabilizers and the trivial group)"
        }
    )];
    notes.push(uniformly_cuspidal(&inst.rep).1.to_string());
    Ok(Body {
        trials,
        fixtures: Vec::new(),
        notes,
    })
}

fn resolution_trial(
    cfg: &CampaignConfig,
    inst: &Instance,
    i: usize,
    seed: Option<u64>,
    elements: &[usize],
    subgroups: &[Subgroup],
    mut t: TrialRecord,
) -> anyhow::Result<TrialRecord> {
    let rep = match seed {
        Some(s) => inst.rep_for(cfg, s)?,
        None => inst.rep.clone(),
    };
    let systems = derived_level_systems(inst, &rep)?;
    let lm = LevelMaps::build(systems, inst.action.clone(), rep.clone())?;
    let mut levels = Vec::new();
    for (n, space) in lm.spaces.iter().enumerate() {
        let rec = space.verify_alpha_pi()?;
        t.checks.push(Check::new(
            format!("level {n}: π∘α idempotent"),
            rec.q_idempotent,
        ));
        t.checks.push(Check::new(
            format!("level {n}: im π∘α = Σ im e_x"),
            rec.image_identity,
        ));
        t.checks.push(Check::new(
            format!("level {n}: π∘α = u_whole"),
            rec.matches_support_projection,
        ));
        let k = elements.len();
        t.checks.push(Check::new(
            format!("level {n}: ρ_F multiplicative"),
            space.action_is_multiplicative(elements),
        ));
        t.checks.push(Check::new(
            format!("level {n}: α equivariant for {k} elements"),
            space.alpha_is_equivariant(elements),
        ));
        t.checks.push(Check::new(
            format!("level {n}: π equivariant for {k} elements"),
            space.pi_is_equivariant(elements),
        ));
        levels.push(rec);
    }
    let mut decomposition = None;
    if inst.family.is_exhaustive() {
        let ml = multi_level_alpha(&lm.maps);
        t.checks.push(Check::new(
            "q_n q_{n-1} = q_{n-1} = q_{n-1} q_n",
            !matches!(ml, Err(Error::NotIncreasing(_))),
        ));
        t.checks.push(Check::new(
            "π∘α = Id (telescoping)",
            ml.map(|m| m.telescopes).unwrap_or(false),
        ));
        let d = smooth_product_decomposition(&lm.composites())?;
        t.checks.push(Check::new("p_n idempotent", d.idempotent));
        t.checks
            .push(Check::new("p_n pairwise orthogonal", d.orthogonal));
        t.checks.push(Check::new("Σ p_n = Id", d.sums_to_identity));
        decomposition = Some(d.record());
    }
    // π̄ independence on level 0, for a ψ fixed by a subgroup chosen by trial index.
    let space = &lm.spaces[0];
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed(), i) ^ 0x5ca1ab1e);
    let raw: Vec<Scalar> = (0..space.dim())
        .map(|_| cfg.field.from_i64(rng.gen_range(-3..=3)))
        .collect();
    let fixer = &subgroups[i % subgroups.len()];
    let (mut singles, mut pairs, mut agree) = (0usize, 0usize, true);
    if let Ok(psi) = space.average(fixer, &raw) {
        let target = space.pi().mul_vec(&psi);
        let fixing: Vec<&Subgroup> = subgroups
            .iter()
            .filter(|u| space.is_fixed(u, &psi))
            .collect();
        for u in &fixing {
            singles += 1;
            agree &= space.pi_bar(u, &psi)? == target;
            for big in &fixing {
                if u.is_normal_in(inst.action.group(), big) {
                    pairs += 1;
                    agree &= space.pi_bar_reindexed(u, big, &psi)? == target;
                }
            }
        }
        t.checks.push(Check::new("π̄_U(ψ) = π̄_U′(ψ) = π(ψ)", agree));
    }
    t.data = json!({
        "levels": levels,
        "decomposition": decomposition,
        "pi_bar": { "fixer_order": fixer.order(), "subgroups": singles, "normal_pairs": pairs },
    });
    Ok(t)
}

fn splitting(cfg: &CampaignConfig, inst: &Instance) -> anyhow::Result<Body> {
    if !inst.family.is_exhaustive() {
        return Err(config_error(
            "levels: splitting needs an exhaustive level family (omit levels.depth)",
        ));
    }
    let data = LevelData {
        action: inst.action.clone(),
        family: inst.family.clone(),
    };
    let kind = if cfg.campaign == Campaign::Splitting {
        "section"
    } else {
        "retraction"
    };
    let trials: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(cfg.seed(), i);
            let t = TrialRecord::new(i, Some(seed), format!("random extension, {kind}"));
            let built = (|| -> anyhow::Result<(SplittingCertificate, usize, usize)> {
                let rep = inst.rep_for(cfg, seed)?;
                let ext = random_extension(rep, 1, seed)?;
                let cert = if cfg.campaign == Campaign::Splitting {
                    construct_global_section(&ext, &data)?
                } else {
                    construct_global_retraction(&ext, &data)?
                };
                Ok((cert, ext.sub.dim(), ext.quotient.dim()))
            })();
            match built {
                Ok((cert, sub, quotient)) => {
                    let mut t = t;
                    t.checks = cert
                        .transcript
                        .iter()
                        .map(|e| Check::new(e.identity.clone(), e.holds))
                        .collect();
                    t.data = json!({
                        "dim_sub": sub,
                        "dim_quotient": quotient,
                        "certificate_hash": short_hash(&cert),
                    });
                    t.settle()
                }
                Err(e) => record_error(t, &e),
            }
        })
        .collect();
    let notes = vec![
        "every subgroup of a finite group is compact, so cmc- and c-splittings coincide".into(),
        "cuspidality reduces to the exhaustive-level precondition in the finite model".into(),
        "initial linear maps and coset representatives are canonical choices of this implementation".into(),
    ];
    Ok(Body {
        trials,
        fixtures: Vec::new(),
        notes,
    })
}

fn fuzz(cfg: &CampaignConfig, inst: &Instance, out: Option<&Path>) -> anyhow::Result<Body> {
    let c = inst.action.complex().clone();
    let rep = inst.rep_for(cfg, trial_seed(cfg.seed(), usize::MAX))?;
    let sys = match first_level_system(inst, &rep) {
        Ok(s) => s,
        Err(e) => {
            let t = record_error(TrialRecord::new(0, Some(cfg.seed()), "level system"), &e);
            return Ok(Body {
                trials: vec![t],
                fixtures: Vec::new(),
                notes: Vec::new(),
            });
        }
    };
    let nv = c.num_vertices();
    let trials: Vec<(TrialRecord, Option<Fixture>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let seed = trial_seed(cfg.seed(), i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = rng.gen_range(1..=nv.min(6));
            let picked: BTreeSet<usize> = (0..k).map(|_| rng.gen_range(0..nv)).collect();
            let mut sigma = Subcomplex::full_on_vertices(&c, &picked);
            for &e in sigma.cells().to_vec().iter().filter(|&&e| c.dim_of(e) > 0) {
                if rng.gen_ratio(1, 3) {
                    sigma = sigma.without_cell(&c, e);
                }
            }
            let mut t = TrialRecord::new(i, Some(seed), sigma.to_string());
            match sys.verify_support_projection(&sigma) {
                Ok(rec) => {
                    let holds = rec.passed();
                    t.checks
                        .push(Check::new("support projection identities", holds));
                    t.data = json!(rec);
                    if holds || rec.convex == Some(true) {
                        (t.settle(), None)
                    } else {
                        t.outcome = Outcome::Counterexample;
                        let f = Fixture::new(&sys, sigma).ok();
                        (t, f)
                    }
                }
                Err(e) => (record_error(t, &e.into()), None),
            }
        })
        .collect();
    let (trials, fixtures) = archive(cfg, trials, out)?;
    let notes = vec!["a failing identity on a convex subcomplex counts as a failure, on a non-convex one as a counterexample".into()];
    Ok(Body {
        trials,
        fixtures,
        notes,
    })
}
