//! Executes a [`RunConfig`] and collects its results.

use std::time::Instant;

use rwre_core::env::{
    annealed_mean_excursion, classify_solomon, critical_exponent, sample_environment, sigma_squared_logrho,
    solomon_velocity, EnvironmentLaw, Regime, SiteWindow,
};
use rwre_core::fit::fit_leakage_exponent;
use rwre_core::graphene::{conductance_scaling, default_doping_grid, doping_sweep, sigma_min_curve, GrapheneParams};
use rwre_core::network::{
    hitting_probability_mc, polya_escape_series, solve_dirichlet, ConductanceNetwork, DirichletProblem,
    DEFAULT_TOLERANCE,
};
use rwre_core::rng::{derive_seed, Stream};
use rwre_core::walk::{
    annealed_markov_violation, endpoint_ensemble, eq23_harness, left_excursion_durations_capped, local_time,
    quenched_return_profile, simulate_quenched, sinai_rescaled_ensemble, window_for_law, EnvMode,
    DEFAULT_EXCURSION_CAP, RETURN_TOLERANCE,
};

use crate::config::{Experiment, RunConfig, SweepParameter};
use crate::record::{Cell, Metric, RunRecord, Table};
use crate::CliError;

fn rt<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Runs `config` on the current rayon pool.
pub fn run(config: &RunConfig) -> Result<RunRecord, CliError> {
    let started = Instant::now();
    let mut rec = RunRecord::new(config.clone());
    rec.label("kind", config.experiment.kind());
    let seed = config.seed;
    match &config.experiment {
        Experiment::Classify { law } => classify(&mut rec, law),
        Experiment::Simulate { law, n_steps, n_walks, env_seed, trajectory } => {
            simulate(&mut rec, law, *n_steps, *n_walks, *env_seed, *trajectory, seed)?
        }
        Experiment::Excursion { law, n_excursions, radius, cap } => {
            excursion(&mut rec, law, *n_excursions, *radius, cap.unwrap_or(DEFAULT_EXCURSION_CAP), seed)?
        }
        Experiment::Sinai { law, n, n_env, n_walks_per_env } => {
            let ens = sinai_rescaled_ensemble(law, *n, *n_env, *n_walks_per_env, seed).map_err(rt)?;
            rec.metric("sigma_squared", Metric::exact(ens.sigma_squared));
            rec.metric("median_abs_position", Metric::exact(ens.median_abs_position()));
            rec.metric("median_abs_rescaled", Metric::exact(ens.median_abs_rescaled()));
            rec.metric("median_abs_over_sqrt_n", Metric::exact(ens.median_abs_position() / (*n as f64).sqrt()));
            let mut envs = Table::new(&["env", "env_seed", "median_rescaled"]);
            for (e, (&s, &m)) in ens.env_seeds.iter().zip(&ens.env_medians).enumerate() {
                envs.push(vec![e.into(), s.into(), m.into()]);
            }
            let mut samples = Table::new(&["env", "walk", "position", "rescaled"]);
            for s in &ens.samples {
                samples.push(vec![s.env.into(), s.walk.into(), s.position.into(), s.rescaled.into()]);
            }
            rec.table("environments", envs);
            rec.table("samples", samples);
        }
        Experiment::Network { n_nodes, edges, source, sink, mc_trials } => {
            network(&mut rec, *n_nodes, edges, *source, *sink, *mc_trials, seed)?
        }
        Experiment::Polya { dimension, radii, norm } => {
            let points = polya_escape_series(*dimension, radii, *norm).map_err(rt)?;
            let mut t = Table::new(&["r", "R_eff", "p_esc"]);
            for p in &points {
                t.push(vec![p.radius.into(), p.r_eff.into(), p.p_esc.into()]);
            }
            rec.table("series", t);
        }
        Experiment::GrapheneScaling { sizes, n_realizations, c, gamma, p } => {
            let params = GrapheneParams::new(*c, *gamma, *p).map_err(CliError::config)?;
            let res = conductance_scaling(sizes, *n_realizations, params, seed).map_err(rt)?;
            rec.metric("exponent", Metric { std_error: Some(res.fit.exponent_std_error.into()), ..Metric::exact(res.fit.exponent) });
            rec.metric("prefactor", Metric::exact(res.fit.prefactor));
            let mut t = Table::new(&["L", "mean", "stderr", "n", "zeros", "residual"]);
            for (i, &l) in res.sizes.iter().enumerate() {
                let m = res.means[i];
                t.push(vec![l.into(), m.mean.into(), m.std_error.into(), m.n.into(), res.zero_counts[i].into(), res.fit.residuals[i].into()]);
            }
            rec.table("sizes", t);
        }
        Experiment::GrapheneSweep { parameter, grid, size, n_realizations, c, gamma } => {
            let curve = match parameter {
                SweepParameter::Gamma => {
                    let grid = grid.clone().ok_or_else(|| CliError::Config("a gamma sweep needs a grid".into()))?;
                    sigma_min_curve(&grid, *size, *n_realizations, *c, seed)
                }
                SweepParameter::P => {
                    let grid = grid.clone().unwrap_or_else(default_doping_grid);
                    doping_sweep(&grid, *size, *gamma, *n_realizations, *c, seed)
                }
            }
            .map_err(rt)?;
            let mut t = Table::new(&["parameter", "mean", "stderr", "n"]);
            for p in &curve.points {
                t.push(vec![p.parameter.into(), p.conductance.mean.into(), p.conductance.std_error.into(), p.conductance.n.into()]);
            }
            if let Some(i) = curve.argmin() {
                rec.metric("argmin_parameter", Metric::exact(curve.points[i].parameter));
            }
            if *parameter == SweepParameter::Gamma {
                let gs: Vec<f64> = curve.points.iter().map(|p| p.parameter).collect();
                let ms: Vec<f64> = curve.points.iter().map(|p| p.conductance.mean).collect();
                if let Ok(fit) = fit_leakage_exponent(&gs, &ms) {
                    rec.metric("alpha", Metric { std_error: Some(fit.alpha_std_error.into()), ..Metric::exact(fit.alpha) });
                    rec.metric("leakage_prefactor", Metric::exact(fit.prefactor));
                }
            }
            rec.table("curve", t);
        }
        Experiment::Eq23Harness { law, ks, n_envs, n_trials } => {
            let rows = eq23_harness(law, ks, *n_envs, *n_trials, seed).map_err(rt)?;
            let mut t = Table::new(&["env", "env_seed", "k", "exact", "mc", "mc_stderr", "mc_z", "formula", "formula_rel_dev"]);
            let mut max_z: f64 = 0.0;
            for r in &rows {
                max_z = max_z.max(r.mc_z);
                t.push(vec![
                    r.env_index.into(),
                    r.env_seed.into(),
                    r.k.into(),
                    r.exact.into(),
                    r.mc.mean.into(),
                    r.mc.std_error.into(),
                    r.mc_z.into(),
                    r.formula.into(),
                    r.formula_rel_dev.into(),
                ]);
            }
            rec.metric("max_mc_z", Metric::exact(max_z));
            for &k in ks {
                let devs: Vec<f64> = rows.iter().filter(|r| r.k == k).map(|r| r.formula_rel_dev.abs()).collect();
                rec.metric(&format!("mean_abs_formula_rel_dev_k{k}"), Metric::exact(devs.iter().sum::<f64>() / devs.len() as f64));
            }
            rec.table("rows", t);
        }
        Experiment::MarkovViolation { law, prefix_a, prefix_b, next } => {
            let (a, b) = annealed_markov_violation(law, prefix_a, prefix_b, *next).map_err(rt)?;
            rec.metric("conditional_a", Metric::exact(a));
            rec.metric("conditional_b", Metric::exact(b));
            rec.metric("difference", Metric::exact(a - b));
        }
    }
    rec.wall_time = Some(started.elapsed().as_secs_f64());
    Ok(rec)
}

fn classify(rec: &mut RunRecord, law: &EnvironmentLaw) {
    let class = classify_solomon(law);
    rec.label(
        "regime",
        match class.regime {
            Regime::TransientRight => "transient-right",
            Regime::TransientLeft => "transient-left",
            Regime::Recurrent => "recurrent",
        },
    );
    rec.metric("eta", Metric::exact(class.eta));
    rec.metric("sigma_squared", Metric::exact(sigma_squared_logrho(law)));
    rec.metric("velocity", Metric::exact(solomon_velocity(law)));
    rec.metric("mean_rho", Metric::exact(law.mean_rho()));
    rec.metric("annealed_mean_excursion", Metric::exact(annealed_mean_excursion(law)));
    if let Ok(k) = critical_exponent(law) {
        rec.metric("critical_exponent", Metric::exact(k));
    }
}

fn simulate(
    rec: &mut RunRecord,
    law: &EnvironmentLaw,
    n_steps: u64,
    n_walks: u64,
    env_seed: Option<u64>,
    trajectory: bool,
    seed: u64,
) -> Result<(), CliError> {
    let mode = env_seed.map_or(EnvMode::Annealed, |env_seed| EnvMode::Quenched { env_seed });
    let ens = endpoint_ensemble(law, n_steps, n_walks, seed, mode).map_err(rt)?;
    rec.label("mode", if env_seed.is_some() { "quenched" } else { "annealed" });
    rec.metric("velocity", ens.velocity());
    rec.metric("fraction_positive", ens.fraction_positive());
    rec.metric("median_position", Metric::exact(ens.median()));
    rec.metric("median_abs_position", Metric::exact(ens.median_abs()));
    rec.metric("solomon_velocity", Metric::exact(solomon_velocity(law)));
    let mut t = Table::new(&["walk", "walk_seed", "env_seed", "position"]);
    for (i, &x) in ens.endpoints.iter().enumerate() {
        let i = i as u64;
        let es = env_seed.unwrap_or_else(|| derive_seed(seed, Stream::Environment, i));
        t.push(vec![i.into(), derive_seed(seed, Stream::Walk, i).into(), es.into(), x.into()]);
    }
    rec.table("endpoints", t);
    if trajectory {
        let es = env_seed.unwrap_or_else(|| derive_seed(seed, Stream::Environment, 0));
        let env = sample_environment(law, window_for_law(law, n_steps), es).map_err(rt)?;
        let traj = simulate_quenched(&env, 0, n_steps, derive_seed(seed, Stream::Walk, 0)).map_err(rt)?;
        let mut path = Table::new(&["time", "position"]);
        for (t, &x) in traj.positions.iter().enumerate() {
            path.push(vec![(t as u64).into(), x.into()]);
        }
        let lt = local_time(&traj);
        let mut counts = Table::new(&["site", "count"]);
        for (&x, &c) in &lt.counts {
            counts.push(vec![x.into(), c.into()]);
        }
        let (site, count) = lt.argmax();
        rec.metric("max_local_time", Metric::exact(count));
        rec.metric("max_local_time_site", Metric::exact(site));
        rec.table("trajectory", path);
        rec.table("local_time", counts);
    }
    Ok(())
}

/// Left margin so that the expected truncation error of the return-time
/// recurrence is below tolerance: `(E rho)^R 2 / (1 - E rho) < tol`.
fn excursion_radius(law: &EnvironmentLaw) -> Result<u64, CliError> {
    let m = law.mean_rho();
    if m >= 1.0 {
        return Err(CliError::Runtime(format!("E rho = {m} >= 1: left excursions have infinite mean; set radius explicitly")));
    }
    let r = (RETURN_TOLERANCE * (1.0 - m) / 2.0).ln() / m.ln();
    Ok(r.ceil() as u64 + 64)
}

fn excursion(
    rec: &mut RunRecord,
    law: &EnvironmentLaw,
    n: u64,
    radius: Option<u64>,
    cap: u64,
    seed: u64,
) -> Result<(), CliError> {
    let radius = match radius {
        Some(r) => r,
        None => excursion_radius(law)?,
    };
    let env_seed = derive_seed(seed, Stream::Environment, 0);
    let env = sample_environment(law, SiteWindow::symmetric(radius.max(2)), env_seed).map_err(rt)?;
    let sample = left_excursion_durations_capped(&env, n, derive_seed(seed, Stream::Excursion, 0), cap).map_err(rt)?;
    rec.metric("mc_mean_duration", sample.estimate());
    rec.metric("timeouts", Metric::exact(sample.timeouts));
    rec.metric("env_seed", Metric::exact(env_seed));
    rec.metric("annealed_mean", Metric::exact(annealed_mean_excursion(law)));
    let prof = quenched_return_profile(&env, 1).map_err(rt)?;
    let residual = (prof.first_site + 1..=1)
        .map(|x| (prof.at(x) - (2.0 + env.rho(x - 1) * prof.at(x - 1))).abs())
        .fold(0.0, f64::max);
    rec.metric("quenched_return", Metric::exact(prof.at(1)));
    rec.metric("truncation_bound", Metric::exact(prof.truncation_bound));
    rec.metric("recurrence_residual", Metric::exact(residual));
    rec.label("converged", (prof.truncation_bound <= RETURN_TOLERANCE).to_string());
    Ok(())
}

fn network(
    rec: &mut RunRecord,
    n_nodes: usize,
    edges: &[(usize, usize, f64)],
    source: usize,
    sink: usize,
    mc_trials: u64,
    seed: u64,
) -> Result<(), CliError> {
    let net = ConductanceNetwork::new(n_nodes, edges.to_vec()).map_err(CliError::config)?;
    if source == sink || source >= n_nodes || sink >= n_nodes {
        return Err(CliError::Config("source and sink must be distinct nodes".into()));
    }
    if !net.is_connected() {
        return Err(CliError::Config("network is not connected".into()));
    }
    let prob = DirichletProblem::new(&net, vec![(source, 1.0), (sink, 0.0)]).map_err(rt)?;
    let sol = solve_dirichlet(&prob, DEFAULT_TOLERANCE).map_err(rt)?;
    let i_a = sol.boundary_currents[0].1;
    rec.metric("source_current", Metric::exact(i_a));
    rec.metric("effective_resistance", Metric::exact(1.0 / i_a));
    rec.metric("escape_probability", Metric::exact(i_a / net.node_conductances()[source]));
    rec.metric("kirchhoff_residual", Metric::exact(sol.kirchhoff_residual(&net, prob.boundary())));
    let mut t = Table::new(&["node", "voltage", "mc", "mc_stderr", "mc_z"]);
    let mut max_z: f64 = 0.0;
    for (x, &v) in sol.voltages.iter().enumerate() {
        let mut row: Vec<Cell> = vec![x.into(), v.into()];
        if mc_trials > 0 && x != source && x != sink {
            let est = hitting_probability_mc(&net, x, source, sink, mc_trials, derive_seed(seed, Stream::Network, x as u64));
            let z = est.z_score(v).abs();
            max_z = max_z.max(z);
            row.extend([est.mean.into(), est.std_error.into(), z.into()]);
        } else {
            row.extend([Cell::from(f64::NAN), Cell::from(f64::NAN), Cell::from(f64::NAN)]);
        }
        t.push(row);
    }
    if mc_trials > 0 {
        rec.metric("max_mc_z", Metric::exact(max_z));
    }
    rec.table("voltages", t);
    Ok(())
}
