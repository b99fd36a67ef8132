//! One function per experiment; each returns a filled [`Report`].

use nonlocal_core::functional::{self, Classification, RateModel};
use nonlocal_core::interval::{make_union, Interval, IntervalUnion};
use nonlocal_core::levelset;
use nonlocal_core::piecewise::{self, affine_function, centered_heaviside, heaviside, step_function, PiecewiseFunction};
use nonlocal_core::rational::{int, ratio, Rational};
use nonlocal_core::weight::{self, SequenceKind, SequencePair, Weight, WeightSpec, EXACT_INDEX_LIMIT};
use nonlocal_core::Error;
use num::traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::report::{num, opt, Check, Report};

pub fn counterexample(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let c = &cfg.counterexample;
    let mut report = Report::new("counterexample", cfg.seed, json!({ "counterexample": c, "quadrature": cfg.quadrature }));
    if c.j_max > c.j_cap {
        return Err(Error::ResourceCap {
            what: "counterexample J_max",
            needed: c.j_max as u64,
            cap: c.j_cap as u64,
        }
        .into());
    }
    let seq = SequencePair::new(SequenceKind::from_preset(&c.preset)?, EXACT_INDEX_LIMIT)?;

    let cond = weight::check_sequence_conditions(&seq, c.n_check)?;
    let broken: Vec<u32> = cond
        .rows
        .iter()
        .filter(|r| {
            !(r.mu_dominates_log && r.gap_log && r.mu_dominates_exact != Some(false) && r.gap_exact != Some(false))
        })
        .map(|r| r.n)
        .collect();
    report.check(Check::new(
        "sequence conditions",
        cond.all_hold,
        None,
        if broken.is_empty() {
            format!("n = 1..={}: μ_n ≥ 3ⁿk_n and k_(n+1) ≥ k_n + μ_n + 3", c.n_check)
        } else {
            format!("violated at n = {broken:?}")
        },
    ));

    let top = c.j_max.min(c.quotient_max_j);
    let mut quotient_rows = Vec::new();
    let (mut violations, mut witnesses) = (0u64, true);
    for j in 2..=top {
        for i in 1..j {
            let seed = cfg.seed.wrapping_mul(1_000_003).wrapping_add((j * 64 + i) as u64);
            let r = piecewise::quotient_bounds_check(&seq, i, j, c.quotient_samples, seed)?;
            violations += r.violations;
            witnesses &= r.lower_witness && r.upper_witness;
            quotient_rows.push(r);
        }
    }
    report.check(Check::new(
        "quotient containment",
        violations == 0 && witnesses,
        None,
        format!("{} blocks i < j ≤ {top}, {violations} violations", quotient_rows.len()),
    ));

    let w = Weight::counterexample(seq.clone())?;
    let sums = functional::counterexample_partial_sum(&seq, &w, c.j_max, &cfg.quadrature)?;
    report.check(Check::new("S_J monotone", sums.monotone, None, format!("J = 2..={}", c.j_max)));
    let margin = sums
        .rows
        .iter()
        .map(|r| r.b_j + r.tail_bound.unwrap_or(f64::NEG_INFINITY) - r.s_j)
        .fold(f64::INFINITY, f64::min);
    report.check(Check::new(
        "S_J ≤ B_J + tail",
        sums.bounded,
        Some(margin),
        format!("smallest slack {margin:.6e}"),
    ));
    report.check(Check::new(
        "per-cell bounds",
        sums.cell_bound_violations == 0,
        None,
        format!("{} cells, {} over bound", sums.cells_evaluated, sums.cell_bound_violations),
    ));
    report.check(Check::new("same-set cells vanish", sums.same_set_zero, None, ""));

    let growth = weight::growth_check(&w, c.growth_theta, &c.growth_grid)?;
    report.check(Check::new(
        "ω outgrows μ^θ-type growth on the grid",
        growth.strictly_increasing,
        None,
        format!("θ = {}, accelerating: {}", c.growth_theta, growth.accelerating),
    ));

    let tail_beyond_20 = weight::check_sequence_conditions(&seq, 20.min(seq.n_max()))?.tail_bound;
    report.csv_header = ["j", "S_j", "B_j", "tail_bound"].map(String::from).to_vec();
    report.csv_rows = sums
        .rows
        .iter()
        .map(|r| vec![r.j.to_string(), num(r.s_j), num(r.b_j), opt(r.tail_bound)])
        .collect();
    report.results = json!({
        "sequence_conditions": cond,
        "quotient_bounds": quotient_rows,
        "partial_sums": sums,
        "growth": growth,
        "series_tail_bound_beyond_20": tail_beyond_20,
    });
    Ok(report)
}

/// `F^ε → 2[1/(1-θ) + 2(1-2^{-θ})/θ - (2^{1-θ}-1)/(1-θ)]` for the unit jump
/// on `(-1, 1)` and `ω(μ) = μ^θ`, `θ < 1`.
pub fn heaviside_limit(theta: f64) -> f64 {
    2.0 * (1.0 / (1.0 - theta) + 2.0 * (1.0 - 2f64.powf(-theta)) / theta - (2f64.powf(1.0 - theta) - 1.0) / (1.0 - theta))
}

const FINITE_TOL: f64 = 1e-4;
const SLOPE_REL_TOL: f64 = 0.05;

pub fn heaviside_dichotomy(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let c = &cfg.heaviside;
    let mut report = Report::new("heaviside", cfg.seed, json!({ "heaviside": c, "quadrature": cfg.quadrature }));
    let h = heaviside(int(-1), int(1))?;
    let schedule = functional::dyadic_schedule(c.k_from, c.k_to);
    let mut table = Vec::new();
    report.csv_header = ["weight", "epsilon", "value"].map(String::from).to_vec();
    for spec in &c.weights {
        let w = spec.build()?;
        let r = functional::classify(&h, &w, h.domain(), &schedule, &cfg.quadrature)?;
        let name = w.name();
        let theta = match spec {
            WeightSpec::PowerLaw { theta } => Some(*theta),
            WeightSpec::Linear => Some(1.0),
            _ => None,
        };
        let check = match (spec, theta, &r.kind) {
            (_, Some(t), Classification::Finite { value, .. }) if t < 1.0 => {
                let limit = heaviside_limit(t);
                let gap = (value - limit).abs();
                Some(Check::new(
                    format!("{name}: finite at the closed-form limit"),
                    gap <= FINITE_TOL,
                    Some(FINITE_TOL - gap),
                    format!("{value:.8} vs {limit:.8}"),
                ))
            }
            (_, Some(t), Classification::Divergent { rate_model, slope }) if t >= 1.0 => {
                // logarithmic with slope 2 at θ = 1, power ε^{1-θ} beyond
                let (model, expected) = if t == 1.0 {
                    (RateModel::Logarithmic, 2.0)
                } else {
                    (RateModel::Power, t - 1.0)
                };
                let rel = (slope - expected).abs() / expected;
                Some(Check::new(
                    format!("{name}: divergent"),
                    *rate_model == model && rel <= SLOPE_REL_TOL,
                    Some(SLOPE_REL_TOL - rel),
                    format!("{rate_model:?} slope {slope:.6} vs {model:?} {expected}"),
                ))
            }
            (WeightSpec::Counterexample { .. }, _, kind) => Some(Check::new(
                format!("{name}: divergent"),
                matches!(kind, Classification::Divergent { .. }),
                None,
                format!("{kind:?}"),
            )),
            (WeightSpec::Table { .. }, _, _) => None,
            (_, _, kind) => Some(Check::new(format!("{name}: classification"), false, None, format!("{kind:?}"))),
        };
        if let Some(ch) = check {
            report.check(ch);
        }
        for (eps, v) in &r.epsilon_trace {
            report.csv_rows.push(vec![name.clone(), num(*eps), num(*v)]);
        }
        table.push(json!({ "weight": spec, "result": r }));
    }
    report.results = json!({ "dichotomy": table });
    Ok(report)
}

fn toy_map(ell: &Rational) -> Result<(PiecewiseFunction, IntervalUnion), CliError> {
    let end = int(1) + ell;
    let phi = affine_function(
        Interval::new(int(0), end.clone())?,
        &[(int(0), int(1), 1.0, 0.0), (int(1), end.clone(), 1.0, -1.0)],
    )?;
    Ok((phi, make_union(vec![Interval::new(int(0), end)?])))
}

/// Three unit-slope pieces on `(0, 1)` with random breakpoints, directions
/// and offsets.
fn random_shuffle(rng: &mut ChaCha8Rng) -> Result<PiecewiseFunction, CliError> {
    let a = rng.gen_range(1..31i64);
    let b = rng.gen_range(a + 1..32i64);
    let edges = [int(0), ratio(a, 32), ratio(b, 32), int(1)];
    let rows = (0..3)
        .map(|k| {
            let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let offset = rng.gen_range(0..17) as f64 / 16.0;
            (edges[k].clone(), edges[k + 1].clone(), sign, offset)
        })
        .collect::<Vec<_>>();
    Ok(affine_function(Interval::from_ints(0, 1)?, &rows)?)
}

pub fn locvsglob(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let c = &cfg.locvsglob;
    let mut report = Report::new("locvsglob", cfg.seed, json!({ "locvsglob": c }));
    let schedule: Vec<f64> = (c.k_from..=c.k_to).map(|k| 2f64.powi(-k)).collect();
    let mut fixtures: Vec<(String, PiecewiseFunction, IntervalUnion, Option<f64>)> = Vec::new();
    for &ell in &c.ells {
        let (phi, a) = toy_map(&nonlocal_core::rational::from_f64(ell)?)?;
        fixtures.push((format!("toy ell={ell}"), phi, a, Some(ell)));
    }
    let id = affine_function(Interval::from_ints(0, 2)?, &[(int(0), int(2), 1.0, 0.0)])?;
    fixtures.push(("injective".into(), id, make_union(vec![Interval::from_ints(0, 2)?]), None));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for k in 0..c.randomized_count {
        let phi = random_shuffle(&mut rng)?;
        fixtures.push((format!("shuffle {k}"), phi, make_union(vec![Interval::from_ints(0, 1)?]), None));
    }

    report.csv_header = ["fixture", "delta_or_mu", "value", "bound"].map(String::from).to_vec();
    let mut rows = Vec::new();
    for (name, phi, a, ell) in &fixtures {
        let r = levelset::loc_vs_glob_check(phi, a, &schedule, c.rel_tol)?;
        report.check(Check::new(
            format!("{name}: lhs ≥ rhs"),
            r.pass,
            Some(r.margin + r.tolerance),
            format!("lhs {:.6}, rhs {:.6}", r.lhs, r.rhs),
        ));
        if let Some(l) = ell {
            let rel = (r.lhs - l).abs() / l;
            report.check(Check::new(
                format!("{name}: equality"),
                rel <= c.rel_tol,
                Some(c.rel_tol - rel),
                format!("lhs {:.6} vs ℓ = {l}", r.lhs),
            ));
        }
        for (d, v) in &r.trace {
            report.csv_rows.push(vec![name.clone(), num(*d), num(*v), num(r.rhs)]);
        }
        rows.push(json!({ "fixture": name, "report": r }));
    }
    report.results = json!({ "fixtures": rows });
    Ok(report)
}

fn gamma_fixture(name: &str) -> Result<(PiecewiseFunction, Option<f64>), CliError> {
    Ok(match name {
        "centered_heaviside" => (centered_heaviside(int(-1), int(1))?, Some(0.4)),
        "staircase" => (
            step_function(Interval::from_ints(0, 3)?, &[int(1), int(2)], &[int(-1), int(0), int(1)])?,
            Some(0.5),
        ),
        "constant" => (step_function(Interval::from_ints(0, 1)?, &[], &[int(0)])?, None),
        other => return Err(CliError::Config(format!("unknown γ preset {other:?}"))),
    })
}

pub fn gamma(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let c = &cfg.gamma;
    let mut report = Report::new("gamma", cfg.seed, json!({ "gamma": c }));
    report.notes.push(levelset::FINITE_DELTA_NOTE.into());
    report.csv_header = ["fixture", "weight", "delta_or_mu", "value", "lower", "upper", "bound"]
        .map(String::from)
        .to_vec();
    let mut rows = Vec::new();
    for preset in &c.presets {
        let (u, default_j) = gamma_fixture(preset)?;
        for spec in &c.weights {
            let w = spec.build()?;
            let name = w.name();
            match default_j {
                Some(j0) => {
                    let j = c.j.unwrap_or(j0);
                    let r = levelset::gamma_lower_bound_check(&u, u.domain(), &w, &c.mu_list, j, c.delta)?;
                    for row in &r.rows {
                        let label = format!("{preset}/{name} μ={}", row.mu);
                        match (&row.estimate, row.pass) {
                            (Some(e), Some(pass)) => {
                                report.check(Check::new(
                                    format!("{label}: γ̂ ≥ Jω(μ)/μ²"),
                                    pass,
                                    row.margin,
                                    format!("lower {:.6e} vs bound {:.6e}", e.lower, row.bound),
                                ));
                                report.csv_rows.push(vec![
                                    preset.clone(),
                                    name.clone(),
                                    num(row.mu),
                                    num(e.value),
                                    num(e.lower),
                                    num(e.upper),
                                    num(row.bound),
                                ]);
                            }
                            _ => report.notes.push(format!("{label}: skipped, μ ≤ μ₀ = {}", r.mu0)),
                        }
                    }
                    rows.push(json!({ "fixture": preset, "weight": spec, "report": r }));
                }
                None => {
                    let mut values = Vec::new();
                    for &mu in &c.mu_list {
                        let e = levelset::gamma_estimate(&u, u.domain(), &w, mu, c.delta)?;
                        report.csv_rows.push(vec![
                            preset.clone(),
                            name.clone(),
                            num(mu),
                            num(e.value),
                            num(e.lower),
                            num(e.upper),
                            String::new(),
                        ]);
                        values.push(e);
                    }
                    let zero = values.iter().all(|e| e.value == 0.0 && e.upper == 0.0);
                    report.check(Check::new(format!("{preset}/{name}: γ̂ = 0"), zero, None, ""));
                    rows.push(json!({ "fixture": preset, "weight": spec, "estimates": values }));
                }
            }
        }
    }
    report.results = json!({ "fixtures": rows });
    Ok(report)
}

pub fn olimpico(cfg: &ExperimentConfig) -> Result<Report, CliError> {
    let c = &cfg.olimpico;
    let mut report = Report::new("olimpico", cfg.seed, json!({ "olimpico": c }));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut per_m: Vec<(u64, f64)> = vec![(0, f64::INFINITY); c.m_max + 1];
    let mut generated = 0u64;
    while generated < c.count {
        let m = rng.gen_range(2..=c.m_max);
        let r: Vec<f64> = (0..m).map(|_| rng.gen::<f64>()).collect();
        if r.iter().sum::<f64>() < 1.0 {
            continue;
        }
        let margin = levelset::olimpico_check(&r)?;
        per_m[m].0 += 1;
        per_m[m].1 = per_m[m].1.min(margin);
        generated += 1;
    }
    let min_margin = per_m.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    report.check(Check::new(
        "random admissible vectors",
        min_margin >= 0.0,
        Some(min_margin),
        format!("{generated} vectors, min margin {min_margin:.6e}"),
    ));
    let equality = (0..=100).all(|k| {
        levelset::olimpico_check_exact(&[int(1), ratio(k, 100)]).is_ok_and(|v| v == Rational::zero())
    });
    report.check(Check::new("equality family (1, s)", equality, Some(0.0), "exact arithmetic"));
    let rejected = matches!(levelset::olimpico_check(&[0.2, 0.3]), Err(Error::Precondition(_)));
    report.check(Check::new("sum below 1 rejected", rejected, None, "(0.2, 0.3)"));
    report.csv_header = ["m", "count", "min_margin"].map(String::from).to_vec();
    report.csv_rows = per_m
        .iter()
        .enumerate()
        .filter(|(_, p)| p.0 > 0)
        .map(|(m, p)| vec![m.to_string(), p.0.to_string(), num(p.1)])
        .collect();
    report.results = json!({ "min_margin": min_margin, "vectors": generated });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heaviside_limit_at_half() {
        assert!((heaviside_limit(0.5) - (16.0 - 8.0 * 2f64.sqrt())).abs() < 1e-12);
    }
}
