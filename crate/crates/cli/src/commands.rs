// Copyright 2026 The hetero-oracle Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use hetero_oracle::{
    audit_oracle, err_n, estimate_with_family, run_lemma_suite, slow_variation_check, DesignGrid, LemmaSuiteConfig,
    OracleReport, VarianceMode, WeightFamily,
};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::output::{num, slug, write_atomic, Csv};

/// Whether every asserted inequality held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    fn and(self, other: Outcome) -> Outcome {
        Outcome::from_bool(self == Outcome::Pass && other == Outcome::Pass)
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn mode_name(mode: VarianceMode) -> &'static str {
    match mode {
        VarianceMode::Estimated => "estimated",
        VarianceMode::Known => "known",
    }
}

const SIMULATE_POINTS: usize = 1000;

pub fn simulate(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    for rs in &cfg.scenarios {
        for &n in &rs.n_list {
            let sc = rs.at(n)?;
            let prep = sc.prepare()?;
            let sample = prep.generator.draw(rs.seed);
            let mut est_cfg = sc.estimator;
            est_cfg.variance = rs.mode;
            let fit = estimate_with_family(&sample, &est_cfg, &prep.family)?;
            let err = err_n(fit.chosen().coeffs(), &fit.state.theta_hat, &prep.theta_true)?;
            let mut csv = Csv::new("simulate", &["x", "s", "s_hat"]);
            for g in 0..SIMULATE_POINTS {
                let x = g as f64 / SIMULATE_POINTS as f64;
                csv.row(&[num(x), num(sc.signal.eval(x)), num(fit.eval(x))]);
            }
            write_atomic(
                &cfg.out,
                &format!("simulate_{}_n{n}.csv", slug(&rs.name)),
                &csv.into_string(),
            )?;
            println!(
                "simulate {} n={n} seed={} chosen={} err_n={}",
                rs.name,
                rs.seed,
                fit.selection.index,
                num(err)
            );
        }
    }
    Ok(Outcome::Pass)
}

pub fn audit(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let mut reports: Vec<OracleReport<f64>> = Vec::new();
    for rs in &cfg.scenarios {
        for &n in &rs.n_list {
            let sc = rs.at(n)?;
            let report = audit_oracle(&sc, rs.replications, rs.seed, rs.mode)?;
            println!(
                "audit {} n={n} mode={} lhs={} rhs={} slack={} {}",
                rs.name,
                mode_name(rs.mode),
                num(report.lhs),
                num(report.rhs),
                num(report.slack),
                verdict(report.pass)
            );
            reports.push(report);
        }
    }
    let mut summary = Csv::new(
        "audit",
        &[
            "scenario",
            "n",
            "mode",
            "replications",
            "seed",
            "adaptive_risk",
            "adaptive_se",
            "oracle_index",
            "oracle_risk",
            "oracle_se",
            "kappa",
            "b_n",
            "lhs",
            "rhs",
            "combined_se",
            "slack",
            "pass",
        ],
    );
    let mut risks = Csv::new(
        "audit_risk",
        &["scenario", "n", "mode", "lambda_index", "risk", "risk_se", "selected"],
    );
    for r in &reports {
        summary.row(&[
            r.scenario.clone(),
            r.n.to_string(),
            mode_name(r.mode).into(),
            r.replication_count.to_string(),
            r.seed.to_string(),
            num(r.adaptive_risk.mean),
            num(r.adaptive_risk.std_err),
            r.oracle_index.to_string(),
            num(r.oracle_risk.mean),
            num(r.oracle_risk.std_err),
            num(r.constants.kappa),
            num(r.constants.b_n),
            num(r.lhs),
            num(r.rhs),
            num(r.combined_std_err),
            num(r.slack),
            r.pass.to_string(),
        ]);
        for (i, est) in r.per_lambda_risk.iter().enumerate() {
            risks.row(&[
                r.scenario.clone(),
                r.n.to_string(),
                mode_name(r.mode).into(),
                i.to_string(),
                num(est.mean),
                num(est.std_err),
                r.selection_counts[i].to_string(),
            ]);
        }
    }
    write_atomic(&cfg.out, "audit.csv", &summary.into_string())?;
    write_atomic(&cfg.out, "audit_risk.csv", &risks.into_string())?;
    let mut json = serde_json::to_string_pretty(&AuditDocument {
        version: crate::output::VERSION,
        reports: &reports,
    })?;
    json.push('\n');
    write_atomic(&cfg.out, "audit.json", &json)?;
    Ok(Outcome::from_bool(reports.iter().all(|r| r.pass)))
}

#[derive(Serialize)]
struct AuditDocument<'a> {
    version: &'a str,
    reports: &'a [OracleReport<f64>],
}

pub fn lemmas(out: &Path, seed: Option<u64>, replications: Option<usize>) -> anyhow::Result<Outcome> {
    let mut suite = LemmaSuiteConfig::default();
    if let Some(s) = seed {
        suite.seed = s;
    }
    if let Some(r) = replications {
        suite.lemma31_replications = r;
        suite.a1_replications = r;
    }
    let cases = run_lemma_suite(&suite)?;
    let mut csv = Csv::new("lemmas", &["lemma", "case", "lhs", "bound", "margin", "pass"]);
    for c in &cases {
        csv.row(&[
            c.lemma.clone(),
            c.case.clone(),
            num(c.lhs),
            num(c.bound),
            num(c.margin),
            c.pass.to_string(),
        ]);
    }
    write_atomic(out, "lemmas.csv", &csv.into_string())?;
    let mut lemma_names: Vec<&str> = cases.iter().map(|c| c.lemma.as_str()).collect();
    lemma_names.dedup();
    for name in lemma_names {
        let rows: Vec<_> = cases.iter().filter(|c| c.lemma == name).collect();
        let failed = rows.iter().filter(|c| !c.pass).count();
        println!(
            "lemma {name} cases={} failed={failed} {}",
            rows.len(),
            verdict(failed == 0)
        );
    }
    Ok(Outcome::from_bool(cases.iter().all(|c| c.pass)))
}

pub fn constants(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let mut outcome = Outcome::Pass;
    for rs in &cfg.scenarios {
        let base = rs.at(rs.n_list[0])?;
        let table = slow_variation_check(&base, &rs.n_list, 0.5, 0)?;
        let mut csv = Csv::new(
            "constants",
            &[
                "n",
                "epsilon",
                "k_star",
                "nu",
                "rho_n",
                "rho_bar_1",
                "rho_bar_2",
                "rho",
                "m_n",
                "kappa",
                "kappa_star",
                "upsilon_star",
                "psi_n",
                "b_n",
                "sigma_bar",
                "zeta_star",
                "d_n",
                "psi_over_sqrt_n",
                "d_over_sqrt_n",
            ],
        );
        let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
        for row in &table.rows {
            let c = &row.constants;
            csv.row(&[
                row.n.to_string(),
                opt(row.epsilon),
                row.k_star.map(|k| k.to_string()).unwrap_or_default(),
                row.stats.nu.to_string(),
                num(row.stats.rho_n),
                num(row.stats.rho_bar_1),
                num(row.stats.rho_bar_2),
                num(c.rho),
                c.m_n.to_string(),
                num(c.kappa),
                num(c.kappa_star),
                num(c.upsilon_star),
                num(c.psi_n),
                num(c.b_n),
                num(c.sigma_bar),
                opt(c.zeta_star),
                opt(c.d_n),
                num(row.psi_ratio),
                opt(row.d_ratio),
            ]);
        }
        write_atomic(
            &cfg.out,
            &format!("constants_{}.csv", slug(&rs.name)),
            &csv.into_string(),
        )?;
        let ok = table.pass();
        println!(
            "constants {} n={:?} psi_decreasing={} d_decreasing={} {}",
            rs.name,
            rs.n_list,
            table.psi_decreasing,
            table
                .d_decreasing
                .map(|b| b.to_string())
                .unwrap_or_else(|| "n/a".into()),
            verdict(ok)
        );
        outcome = outcome.and(Outcome::from_bool(ok));
    }
    Ok(outcome)
}

pub fn sieve(cfg: &ExperimentConfig) -> anyhow::Result<Outcome> {
    let mut outcome = Outcome::Pass;
    for rs in &cfg.scenarios {
        for &n in &rs.n_list {
            let grid = DesignGrid::<f64>::new(n)?;
            let family = WeightFamily::pinsker(&grid, rs.base.estimator.sieve)?;
            let sieve = family.sieve().expect("Pinsker family carries its sieve");
            let stats = family.stats();
            let mut csv = Csv::new("sieve", &["index", "beta", "t", "omega", "j0", "sum", "norm_sq"]);
            for (i, m) in family.members().iter().enumerate() {
                let label = m.label().expect("Pinsker members are labelled");
                csv.row(&[
                    i.to_string(),
                    label.beta.to_string(),
                    num(label.t),
                    num(label.omega),
                    label.j0.to_string(),
                    num(m.sum()),
                    num(m.norm_sq()),
                ]);
            }
            write_atomic(
                &cfg.out,
                &format!("sieve_{}_n{n}.csv", slug(&rs.name)),
                &csv.into_string(),
            )?;
            let consistent = sieve.nu() == family.len();
            println!(
                "sieve {} n={n} epsilon={} k_star={} m={} nu={} members={} rho_n={} rho_bar_1={} rho_bar_2={} {}",
                rs.name,
                num(sieve.epsilon),
                sieve.k_star,
                sieve.m,
                sieve.nu(),
                family.len(),
                num(stats.rho_n),
                num(stats.rho_bar_1),
                num(stats.rho_bar_2),
                verdict(consistent)
            );
            outcome = outcome.and(Outcome::from_bool(consistent));
        }
    }
    Ok(outcome)
}
