//! One run function per subcommand. Each builds both output forms (JSON
//! summary, CSV table) from the same resolved parameters, embeds those
//! parameters as metadata, and evaluates a self-check so CI can gate on
//! the expected numbers (exit code 2 on check failure).

use hvlab_core::bench::{
    ghz_pipeline_run, hom_trials, swap_sweep, write_event_csv, PipelineConfig, PipelineResult,
};
use hvlab_core::boolean::{ch_value, chsh_value, mc_coincidence, qm_pp, sawtooth_prob, BellAngles};
use hvlab_core::ghz::{full_table, GhzConfig};
use hvlab_core::linalg::Mat;
use hvlab_core::nogo::{
    card_demo, filtering_order_demo, ghz_instruction_search, ghz_qm_targets, inplane_witness,
    ks_assignment_search, mermin_peres_square, pauli_square_targets, plane_rotation_demo,
    rotation_square, rotation_square_targets, row_col_products, squared_products,
    two_qubit_instruction_search, CardRotation, GhzSearchReport, KsSearchReport,
};
use hvlab_core::rng::CounterRng;
use hvlab_core::stats::fit_sin2;
use hvlab_core::stream::{chsh_experiment, PairSourceConfig, ThresholdDetector};
use hvlab_core::BellKind;

use crate::emit::{num, Meta, Table, Val};

const PI: f64 = std::f64::consts::PI;
const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Everything a finished run hands back to `main`.
pub struct RunOutput {
    pub json: Val,
    pub table: Table,
    /// `Err` carries the failed-check description; the process exits 2.
    pub check: Result<(), String>,
    /// Extra files to write (path, contents), e.g. the pipeline event log.
    pub extra_files: Vec<(String, String)>,
}

fn fmt_angles(a: &BellAngles<f64>) -> String {
    [a.a, a.a_prime, a.b, a.b_prime].map(num).join(";")
}

fn check_str(check: &Result<(), String>) -> String {
    match check {
        Ok(()) => "pass".to_string(),
        Err(reason) => format!("fail: {reason}"),
    }
}

fn assemble(
    mut meta: Meta,
    check: Result<(), String>,
    fields: Vec<(&'static str, Val)>,
    mut table: Table,
    extra_files: Vec<(String, String)>,
) -> RunOutput {
    meta.push("check", check_str(&check));
    meta.apply_to(&mut table);
    let mut all = vec![("meta", meta.to_json())];
    all.extend(fields);
    RunOutput {
        json: Val::obj(all),
        table,
        check,
        extra_files,
    }
}

// ---------------------------------------------------------------------------
// Two-station correlation experiments
// ---------------------------------------------------------------------------

pub fn bell_boolean(seed: u64, n: u64, angles: BellAngles<f64>) -> RunOutput {
    let mut meta = Meta::new("bell-boolean", Some(seed));
    meta.push("n", n.to_string());
    meta.push("angles", fmt_angles(&angles));

    let saw = |a: f64, b: f64| sawtooth_prob(a - b);
    let s_analytic = chsh_value(saw, &angles);
    let j_analytic = ch_value(saw, |_| 0.5, |_| 0.5, &angles);

    let rng = CounterRng::new(seed);
    let settings = [
        ("a:b", angles.a, angles.b),
        ("a:b'", angles.a, angles.b_prime),
        ("a':b", angles.a_prime, angles.b),
        ("a':b'", angles.a_prime, angles.b_prime),
    ];
    let mut rows = Vec::new();
    let mut setting_vals = Vec::new();
    let mut s_mc = 0.0;
    let mut var_s = 0.0;
    let mut j_terms = 0.0;
    let mut var_j = 0.0;
    let mut singles = (0.0, 0.0);
    for (i, (label, alpha, beta)) in settings.iter().enumerate() {
        let est = mc_coincidence::<f64>(*alpha, *beta, n, &rng.substream(i as u64));
        let sign = if i == 1 { -1.0 } else { 1.0 };
        s_mc += sign * (4.0 * est.p_pp - 1.0);
        j_terms += sign * est.p_pp;
        let var_p = est.p_pp * (1.0 - est.p_pp) / n as f64;
        var_s += 16.0 * var_p;
        var_j += var_p;
        if i == 2 {
            singles.0 = est.p_plus_a;
        }
        if i == 0 {
            singles.1 = est.p_plus_b;
        }
        let analytic = sawtooth_prob(alpha - beta);
        rows.push(vec![
            label.to_string(),
            num(*alpha),
            num(*beta),
            num(est.p_pp),
            num(analytic),
            num(var_p.sqrt()),
        ]);
        setting_vals.push(Val::obj(vec![
            ("setting", Val::Str(label.to_string())),
            ("p_pp", Val::Num(est.p_pp)),
            ("p_pp_analytic", Val::Num(analytic)),
            ("se", Val::Num(var_p.sqrt())),
        ]));
    }
    let j_mc = j_terms - singles.0 - singles.1;
    var_j += (singles.0 * (1.0 - singles.0) + singles.1 * (1.0 - singles.1)) / n as f64;
    let (s_se, j_se) = (var_s.sqrt(), var_j.sqrt());

    let standard = BellAngles::<f64>::standard();
    let at_standard = [
        angles.a - standard.a,
        angles.a_prime - standard.a_prime,
        angles.b - standard.b,
        angles.b_prime - standard.b_prime,
    ]
    .iter()
    .all(|d| d.abs() < 1e-12);
    let check = if at_standard && (s_analytic - 2.0).abs() > 1e-12 {
        Err(format!("analytic S = {s_analytic}, want 2"))
    } else if at_standard && j_analytic.abs() > 1e-12 {
        Err(format!("analytic J = {j_analytic}, want 0"))
    } else if (s_mc - s_analytic).abs() > 5.0 * s_se {
        Err(format!("MC S = {s_mc} is over 5 sigma from {s_analytic}"))
    } else if (j_mc - j_analytic).abs() > 5.0 * j_se {
        Err(format!("MC J = {j_mc} is over 5 sigma from {j_analytic}"))
    } else {
        Ok(())
    };

    let mut table = Table::new(vec!["setting", "alpha", "beta", "p_pp_mc", "p_pp_analytic", "se"]);
    table.rows = rows;
    meta.push("s_analytic", num(s_analytic));
    meta.push("j_analytic", num(j_analytic));
    meta.push("s_mc", num(s_mc));
    meta.push("j_mc", num(j_mc));
    assemble(
        meta,
        check,
        vec![
            ("s_analytic", Val::Num(s_analytic)),
            ("j_analytic", Val::Num(j_analytic)),
            ("s_mc", Val::Num(s_mc)),
            ("s_se", Val::Num(s_se)),
            ("j_mc", Val::Num(j_mc)),
            ("j_se", Val::Num(j_se)),
            ("settings", Val::Arr(setting_vals)),
        ],
        table,
        Vec::new(),
    )
}

pub fn bell_vector(seed: u64, n: u64, angles: BellAngles<f64>) -> RunOutput {
    let mut meta = Meta::new("bell-vector", Some(seed));
    meta.push("n", n.to_string());
    meta.push("angles", fmt_angles(&angles));

    let cfg = PairSourceConfig::<f64>::new(BellKind::PhiPlus, n);
    let det = ThresholdDetector::normalized_for(n, 1.0);
    let res = chsh_experiment(cfg, &angles, det, &CounterRng::new(seed));

    // Binomial-style error estimates from the correlators.
    let var_p: f64 = res
        .correlators
        .iter()
        .map(|e| {
            let p = (e + 1.0) / 4.0;
            p * (1.0 - p) / n as f64
        })
        .sum();
    let s_se = (16.0 * var_p).sqrt();
    let j_se = (var_p + 0.5 / n as f64).sqrt();

    let check = if (res.s - 2.0 * SQRT_2).abs() > 6.0 * s_se.max(1e-6) {
        Err(format!("S = {} is far from 2*sqrt(2)", res.s))
    } else if (res.j_ch - (SQRT_2 - 1.0) / 2.0).abs() > 6.0 * j_se.max(1e-6) {
        Err(format!("J = {} is far from (sqrt(2)-1)/2", res.j_ch))
    } else {
        Ok(())
    };

    let labels = ["a:b", "a:b'", "a':b", "a':b'"];
    let mut table = Table::new(vec!["setting", "correlator"]);
    table.rows = labels
        .iter()
        .zip(res.correlators)
        .map(|(l, e)| vec![l.to_string(), num(e)])
        .collect();
    meta.push("s", num(res.s));
    meta.push("j_ch", num(res.j_ch));
    assemble(
        meta,
        check,
        vec![
            ("s", Val::Num(res.s)),
            ("s_se", Val::Num(s_se)),
            ("j_ch", Val::Num(res.j_ch)),
            ("j_se", Val::Num(j_se)),
            (
                "correlators",
                Val::Arr(res.correlators.iter().map(|&e| Val::Num(e)).collect()),
            ),
        ],
        table,
        Vec::new(),
    )
}

/// Analytic coincidence-probability columns for both models over a delta
/// grid on [0, pi/2].
pub fn sweep(seed: Option<u64>, steps: u64) -> RunOutput {
    let mut meta = Meta::new("sweep", seed);
    meta.push("steps", steps.to_string());

    let mut table = Table::new(vec!["delta", "p_boolean", "p_vector"]);
    let mut points = Vec::new();
    let mut check = Ok(());
    for k in 0..=steps {
        let delta = k as f64 * PI / 2.0 / steps as f64;
        let b = sawtooth_prob(delta);
        let v = qm_pp(delta, 0.0);
        let meets = delta < 1e-12
            || (delta - PI / 4.0).abs() < 1e-12
            || (delta - PI / 2.0).abs() < 1e-12;
        if meets && (b - v).abs() > 1e-12 && check.is_ok() {
            check = Err(format!("curves split at delta = {delta}: {b} vs {v}"));
        }
        if delta > 1e-12 && delta < PI / 4.0 - 1e-12 && b >= v && check.is_ok() {
            check = Err(format!("no gap at delta = {delta}: {b} vs {v}"));
        }
        table.rows.push(vec![num(delta), num(b), num(v)]);
        points.push(Val::obj(vec![
            ("delta", Val::Num(delta)),
            ("p_boolean", Val::Num(b)),
            ("p_vector", Val::Num(v)),
        ]));
    }
    assemble(meta, check, vec![("points", Val::Arr(points))], table, Vec::new())
}

// ---------------------------------------------------------------------------
// Bench experiments
// ---------------------------------------------------------------------------

pub fn hom(seed: u64, n: u64) -> RunOutput {
    let mut meta = Meta::new("hom", Some(seed));
    meta.push("n", n.to_string());

    let mut table = Table::new(vec!["kind", "both_c", "both_d", "coincidence", "discarded"]);
    let mut kinds = Vec::new();
    let mut check = Ok(());
    for (i, kind) in BellKind::ALL.into_iter().enumerate() {
        let t = hom_trials::<f64>(kind, n, &CounterRng::new(seed).substream(i as u64));
        let on_table = match kind {
            BellKind::PhiPlus => t.both_c == n,
            BellKind::PsiMinus => t.coincidence == n,
            BellKind::PhiMinus | BellKind::PsiPlus => {
                t.coincidence == 0 && t.discarded == 0 && t.both_c + t.both_d == n
            }
        };
        if !on_table && check.is_ok() {
            check = Err(format!("{} tally off the bunching table", kind.label()));
        }
        table.rows.push(vec![
            kind.label().to_string(),
            t.both_c.to_string(),
            t.both_d.to_string(),
            t.coincidence.to_string(),
            t.discarded.to_string(),
        ]);
        kinds.push(Val::obj(vec![
            ("kind", Val::Str(kind.label().to_string())),
            ("both_c", Val::UInt(t.both_c)),
            ("both_d", Val::UInt(t.both_d)),
            ("coincidence", Val::UInt(t.coincidence)),
            ("discarded", Val::UInt(t.discarded)),
        ]));
    }
    assemble(meta, check, vec![("kinds", Val::Arr(kinds))], table, Vec::new())
}

pub fn swap(seed: u64, n: u64, steps: u64, tol: f64) -> RunOutput {
    let mut meta = Meta::new("swap", Some(seed));
    meta.push("n", n.to_string());
    meta.push("steps", steps.to_string());
    meta.push("tol", num(tol));

    let deltas: Vec<f64> = (0..steps)
        .map(|k| k as f64 * PI / 2.0 / (steps.max(2) - 1) as f64)
        .collect();
    let points = swap_sweep(n, &deltas, tol, &CounterRng::new(seed));
    let kept: u64 = points.iter().map(|p| p.kept).sum();
    let ys: Vec<f64> = points.iter().map(|p| p.rate).collect();
    let fit = fit_sin2(&deltas, &ys);

    let mut check = if fit.r_squared > 0.99 {
        Ok(())
    } else {
        Err(format!("R^2 = {} below 0.99", fit.r_squared))
    };
    for p in &points {
        if (p.unconditioned_rate - 0.25).abs() > 3.0 * p.unconditioned_se && check.is_ok() {
            check = Err(format!(
                "unconditioned rate {} at delta {} is not flat",
                p.unconditioned_rate, p.delta
            ));
        }
    }

    let mut table = Table::new(vec![
        "delta",
        "kept",
        "rate",
        "rate_se",
        "unconditioned_rate",
        "unconditioned_se",
    ]);
    let mut rows_json = Vec::new();
    for p in &points {
        table.rows.push(vec![
            num(p.delta),
            p.kept.to_string(),
            num(p.rate),
            num(p.rate_se),
            num(p.unconditioned_rate),
            num(p.unconditioned_se),
        ]);
        rows_json.push(Val::obj(vec![
            ("delta", Val::Num(p.delta)),
            ("kept", Val::UInt(p.kept)),
            ("rate", Val::Num(p.rate)),
            ("rate_se", Val::Num(p.rate_se)),
            ("unconditioned_rate", Val::Num(p.unconditioned_rate)),
            ("unconditioned_se", Val::Num(p.unconditioned_se)),
        ]));
    }
    meta.push("fit_amplitude", num(fit.amplitude));
    meta.push("fit_r_squared", num(fit.r_squared));
    meta.push("total_kept", kept.to_string());
    assemble(
        meta,
        check,
        vec![
            ("fit_amplitude", Val::Num(fit.amplitude)),
            ("fit_r_squared", Val::Num(fit.r_squared)),
            ("total_kept", Val::UInt(kept)),
            ("points", Val::Arr(rows_json)),
        ],
        table,
        Vec::new(),
    )
}

pub fn ghz_pipeline(seed: u64, n: u64, events_out: Option<String>) -> RunOutput {
    let mut meta = Meta::new("ghz-pipeline", Some(seed));
    meta.push("n", n.to_string());

    let cfg = PipelineConfig {
        n_pulses: n,
        record_events: events_out.is_some(),
    };
    let res: PipelineResult<f64> = ghz_pipeline_run(&cfg, &CounterRng::new(seed));
    let analytic = full_table::<f64>();
    let fractions = res.fractions();

    let mut per_config_total = std::collections::BTreeMap::new();
    for (config, _, count) in &res.counts {
        *per_config_total.entry(config.label()).or_insert(0u64) += count;
    }

    let mut table = Table::new(vec![
        "config", "i", "j", "k", "count", "fraction", "se", "expected",
    ]);
    let mut rows_json = Vec::new();
    let mut worst_z = 0.0f64;
    for ((config, outcomes, count), (_, _, fraction)) in res.counts.iter().zip(&fractions) {
        let expected = analytic.get(config, *outcomes).unwrap();
        let total = per_config_total[&config.label()];
        let se = if total > 0 {
            (fraction * (1.0 - fraction) / total as f64).sqrt()
        } else {
            0.0
        };
        if total > 0 {
            let sigma = (expected * (1.0 - expected) / total as f64)
                .sqrt()
                .max(2.0 / total as f64);
            worst_z = worst_z.max((fraction - expected).abs() / sigma);
        }
        table.rows.push(vec![
            config.label(),
            outcomes[0].to_string(),
            outcomes[1].to_string(),
            outcomes[2].to_string(),
            count.to_string(),
            num(*fraction),
            num(se),
            num(expected),
        ]);
        rows_json.push(Val::obj(vec![
            ("config", Val::Str(config.label())),
            (
                "outcomes",
                Val::Arr(outcomes.iter().map(|&o| Val::Int(o as i64)).collect()),
            ),
            ("count", Val::UInt(*count)),
            ("fraction", Val::Num(*fraction)),
            ("se", Val::Num(se)),
            ("expected", Val::Num(expected)),
        ]));
    }

    let check = if res.kept == 0 {
        Err("no pulse survived post-selection".to_string())
    } else if worst_z >= 3.0 {
        Err(format!("worst cell is {worst_z:.2} sigma from the analytic table"))
    } else {
        Ok(())
    };

    let mut extra_files = Vec::new();
    if let (Some(path), Some(events)) = (&events_out, &res.events) {
        let mut body = Vec::new();
        write_event_csv(events, &mut body).expect("writing to memory cannot fail");
        let mut text = format!("# experiment=ghz-pipeline\n# seed={seed}\n# n={n}\n");
        text.push_str(&String::from_utf8(body).expect("ascii event log"));
        extra_files.push((path.clone(), text));
    }

    meta.push("kept", res.kept.to_string());
    meta.push("worst_z", num(worst_z));
    assemble(
        meta,
        check,
        vec![
            ("n_pulses", Val::UInt(res.n_pulses)),
            ("kept", Val::UInt(res.kept)),
            ("no_trigger", Val::UInt(res.no_trigger)),
            ("missing_detection", Val::UInt(res.missing_detection)),
            ("ties", Val::UInt(res.ties)),
            ("worst_z", Val::Num(worst_z)),
            ("cells", Val::Arr(rows_json)),
        ],
        table,
        extra_files,
    )
}

// ---------------------------------------------------------------------------
// Exact no-go structures
// ---------------------------------------------------------------------------

fn ks_report_json(report: &KsSearchReport) -> Val {
    Val::obj(vec![
        (
            "targets",
            Val::Arr(report.targets.iter().map(|&t| Val::Int(t as i64)).collect()),
        ),
        ("best_satisfied", Val::UInt(report.best_satisfied as u64)),
        ("n_full", Val::UInt(report.n_full as u64)),
        (
            "histogram",
            Val::Arr(report.histogram.iter().map(|&h| Val::UInt(h as u64)).collect()),
        ),
        ("n_witnesses", Val::UInt(report.witnesses.len() as u64)),
        (
            "first_witness",
            report.witnesses.first().map_or(Val::Arr(Vec::new()), |w| {
                Val::Arr(
                    w.iter()
                        .map(|row| Val::Arr(row.iter().map(|&s| Val::Int(s as i64)).collect()))
                        .collect(),
                )
            }),
        ),
        ("classical_parity", Val::Int(report.classical_parity as i64)),
        ("target_parity", Val::Int(report.target_parity as i64)),
    ])
}

pub fn ks_square(seed: Option<u64>) -> RunOutput {
    let mut meta = Meta::new("ks-square", seed);
    let sq = mermin_peres_square();
    let products = row_col_products(&sq);
    let targets = pauli_square_targets();

    let id = Mat::identity(4);
    let products_ok = products
        .iter()
        .zip(targets)
        .all(|(m, t)| *m == if t == 1 { id.clone() } else { id.neg() });
    let check = if !products_ok {
        Err("a line product is not the signed identity".to_string())
    } else if targets != [1, 1, 1, 1, 1, -1] {
        Err(format!("line signs {targets:?}, want [1,1,1,1,1,-1]"))
    } else {
        Ok(())
    };

    let mut table = Table::new(vec!["row", "col", "first", "second"]);
    let mut cells = Vec::new();
    for r in 0..3 {
        for c in 0..3 {
            let (a, b) = sq.cell_axes(r, c);
            table.rows.push(vec![
                r.to_string(),
                c.to_string(),
                format!("{a:?}"),
                format!("{b:?}"),
            ]);
            cells.push(Val::obj(vec![
                ("row", Val::UInt(r as u64)),
                ("col", Val::UInt(c as u64)),
                ("first", Val::Str(format!("{a:?}"))),
                ("second", Val::Str(format!("{b:?}"))),
            ]));
        }
    }
    let line_names = ["row1", "row2", "row3", "col1", "col2", "col3"];
    meta.push(
        "line_signs",
        line_names
            .iter()
            .zip(targets)
            .map(|(n, t)| format!("{n}:{t:+}"))
            .collect::<Vec<_>>()
            .join(";"),
    );
    assemble(
        meta,
        check,
        vec![
            ("cells", Val::Arr(cells)),
            (
                "line_signs",
                Val::Arr(targets.iter().map(|&t| Val::Int(t as i64)).collect()),
            ),
        ],
        table,
        Vec::new(),
    )
}

pub fn ks_rotations(seed: Option<u64>) -> RunOutput {
    let mut meta = Meta::new("ks-rotations", seed);
    let sq = rotation_square();
    let squared = squared_products(&sq);
    let targets = rotation_square_targets();
    let witness = inplane_witness(0.3_f64, 1.1).expect("non-degenerate probe");

    let id = Mat::<i64>::identity(3);
    let half_turn = Mat::from_rows(&[&[-1i64, 0, 0], &[0, -1, 0], &[0, 0, 1]]);
    let squares_ok = squared.iter().enumerate().all(|(i, (m1, m2))| {
        *m1 == id && *m2 == if i == 2 { half_turn.clone() } else { id.clone() }
    });
    let check = if !squares_ok {
        Err("a squared line product is off the expected form".to_string())
    } else if targets != [1, 1, -1, 1, 1, 1] {
        Err(format!("squared-line signs {targets:?}"))
    } else if witness != -1 {
        Err(format!("in-plane witness {witness}, want -1"))
    } else {
        Ok(())
    };

    let line_names = ["row1", "row2", "row3", "col1", "col2", "col3"];
    let mut table = Table::new(vec!["line", "space", "m00", "m01", "m02", "m10", "m11", "m12", "m20", "m21", "m22"]);
    let mut lines = Vec::new();
    for (i, (m1, m2)) in squared.iter().enumerate() {
        for (space, m) in [(1, m1), (2, m2)] {
            let entries: Vec<i64> = (0..3)
                .flat_map(|r| (0..3).map(move |c| *m.get(r, c)))
                .collect();
            let mut row = vec![line_names[i].to_string(), space.to_string()];
            row.extend(entries.iter().map(|e| e.to_string()));
            table.rows.push(row);
            lines.push(Val::obj(vec![
                ("line", Val::Str(line_names[i].to_string())),
                ("space", Val::UInt(space)),
                (
                    "matrix",
                    Val::Arr(
                        (0..3)
                            .map(|r| {
                                Val::Arr((0..3).map(|c| Val::Int(*m.get(r, c))).collect())
                            })
                            .collect(),
                    ),
                ),
            ]));
        }
    }
    meta.push("in_plane_witness", witness.to_string());
    assemble(
        meta,
        check,
        vec![
            ("squared_lines", Val::Arr(lines)),
            (
                "squared_line_signs",
                Val::Arr(targets.iter().map(|&t| Val::Int(t as i64)).collect()),
            ),
            ("in_plane_witness", Val::Int(witness as i64)),
        ],
        table,
        Vec::new(),
    )
}

pub fn ks_search(seed: Option<u64>) -> RunOutput {
    let mut meta = Meta::new("ks-search", seed);
    let standard = ks_assignment_search(pauli_square_targets());
    let rotation_form = ks_assignment_search(rotation_square_targets());
    let control = ks_assignment_search([1; 6]);

    let check = if standard.best_satisfied != 5 || standard.n_full != 0 {
        Err(format!(
            "standard targets: best {} of 6 with {} full tables; want 5 and 0",
            standard.best_satisfied, standard.n_full
        ))
    } else if rotation_form.best_satisfied != 5 || rotation_form.n_full != 0 {
        Err("rotation-form targets should match the standard result".to_string())
    } else if control.n_full == 0 {
        Err("all-plus control found no satisfying table".to_string())
    } else {
        Ok(())
    };

    let mut table = Table::new(vec!["satisfied", "standard", "rotation_form", "all_plus_control"]);
    for k in 0..7 {
        table.rows.push(vec![
            k.to_string(),
            standard.histogram[k].to_string(),
            rotation_form.histogram[k].to_string(),
            control.histogram[k].to_string(),
        ]);
    }
    meta.push("best_satisfied", standard.best_satisfied.to_string());
    meta.push("n_full", standard.n_full.to_string());
    assemble(
        meta,
        check,
        vec![
            ("standard", ks_report_json(&standard)),
            ("rotation_form", ks_report_json(&rotation_form)),
            ("all_plus_control", ks_report_json(&control)),
        ],
        table,
        Vec::new(),
    )
}

// ---------------------------------------------------------------------------
// Triple-particle experiments
// ---------------------------------------------------------------------------

pub fn ghz_table(seed: Option<u64>) -> RunOutput {
    let meta = Meta::new("ghz-table", seed);
    let table_data = full_table::<f64>();

    let mut check = Ok(());
    for cfg in GhzConfig::all() {
        let sum = table_data.config_sum(&cfg);
        if (sum - 1.0).abs() > 1e-12 && check.is_ok() {
            check = Err(format!("configuration {} sums to {sum}", cfg.label()));
        }
    }

    let mut table = Table::new(vec!["config", "i", "j", "k", "fraction"]);
    let mut rows_json = Vec::new();
    for row in table_data.rows() {
        table.rows.push(vec![
            row.config.label(),
            row.outcomes[0].to_string(),
            row.outcomes[1].to_string(),
            row.outcomes[2].to_string(),
            num(row.fraction),
        ]);
        rows_json.push(Val::obj(vec![
            ("config", Val::Str(row.config.label())),
            (
                "outcomes",
                Val::Arr(row.outcomes.iter().map(|&o| Val::Int(o as i64)).collect()),
            ),
            ("fraction", Val::Num(row.fraction)),
        ]));
    }
    assemble(meta, check, vec![("rows", Val::Arr(rows_json))], table, Vec::new())
}

fn ghz_report_json(report: &GhzSearchReport) -> Val {
    Val::obj(vec![
        (
            "targets",
            Val::Arr(
                report
                    .targets
                    .iter()
                    .map(|(label, t)| {
                        Val::obj(vec![
                            ("config", Val::Str(label.clone())),
                            (
                                "target",
                                t.map_or(Val::Str("unconstrained".into()), |s| Val::Int(s as i64)),
                            ),
                        ])
                    })
                    .collect(),
            ),
        ),
        ("best_satisfied", Val::UInt(report.best_satisfied as u64)),
        ("n_full", Val::UInt(report.n_full as u64)),
        (
            "histogram",
            Val::Arr(report.histogram.iter().map(|&h| Val::UInt(h as u64)).collect()),
        ),
        ("n_witnesses", Val::UInt(report.witnesses.len() as u64)),
        ("classical_parity", Val::Int(report.classical_parity as i64)),
        ("target_parity", Val::Int(report.target_parity as i64)),
        (
            "min_discrepancy_probability",
            Val::Num(report.min_discrepancy_probability),
        ),
    ])
}

pub fn ghz_instructions(seed: Option<u64>) -> RunOutput {
    let mut meta = Meta::new("ghz-instructions", seed);
    let report = ghz_instruction_search(&ghz_qm_targets());
    let (n_two_qubit, two_qubit_witnesses) = two_qubit_instruction_search();

    let check = if report.best_satisfied != 7 || report.n_full != 0 {
        Err(format!(
            "best table satisfies {} of 8 with {} full; want 7 and 0",
            report.best_satisfied, report.n_full
        ))
    } else if (report.min_discrepancy_probability - 0.125).abs() > 1e-15 {
        Err(format!(
            "discrepancy probability {}, want 1/8",
            report.min_discrepancy_probability
        ))
    } else if n_two_qubit == 0 {
        Err("two-station control found no satisfying table".to_string())
    } else {
        Ok(())
    };

    let mut table = Table::new(vec!["satisfied", "tables"]);
    for k in 0..9 {
        table.rows.push(vec![k.to_string(), report.histogram[k].to_string()]);
    }
    meta.push("best_satisfied", report.best_satisfied.to_string());
    meta.push(
        "min_discrepancy_probability",
        num(report.min_discrepancy_probability),
    );
    assemble(
        meta,
        check,
        vec![
            ("search", ghz_report_json(&report)),
            (
                "two_station_control",
                Val::obj(vec![
                    ("n_satisfying", Val::UInt(n_two_qubit as u64)),
                    (
                        "witnesses",
                        Val::Arr(
                            two_qubit_witnesses
                                .iter()
                                .map(|w| {
                                    Val::Arr(w.iter().map(|&s| Val::Int(s as i64)).collect())
                                })
                                .collect(),
                        ),
                    ),
                ]),
            ),
        ],
        table,
        Vec::new(),
    )
}

// ---------------------------------------------------------------------------
// Demos
// ---------------------------------------------------------------------------

fn frame_json(images: &hvlab_core::nogo::FrameImages) -> Val {
    let arr = |v: [i64; 3]| Val::Arr(v.iter().map(|&x| Val::Int(x)).collect());
    Val::obj(vec![
        ("x", arr(images.x)),
        ("y", arr(images.y)),
        ("z", arr(images.z)),
    ])
}

pub fn demo_card(seed: Option<u64>) -> RunOutput {
    let mut meta = Meta::new("demo-card", seed);
    let order = [CardRotation::Rx90, CardRotation::Rz90];
    let demo = card_demo(&order);
    let reversed = card_demo(&[CardRotation::Rz90, CardRotation::Rx90]);

    // The two conventions disagree for one order and swap roles when the
    // order is reversed; that is the non-commutation being demonstrated.
    let check = if demo.fixed_frame == demo.body_frame {
        Err("the two conventions agree, rotations look commutative".to_string())
    } else if demo.fixed_frame != reversed.body_frame {
        Err("fixed-frame images do not match the reversed body-frame images".to_string())
    } else {
        Ok(())
    };

    let mut table = Table::new(vec!["frame", "axis", "ix", "iy", "iz"]);
    for (frame, images) in [("fixed", &demo.fixed_frame), ("body", &demo.body_frame)] {
        for (axis, v) in [("x", images.x), ("y", images.y), ("z", images.z)] {
            table.rows.push(vec![
                frame.to_string(),
                axis.to_string(),
                v[0].to_string(),
                v[1].to_string(),
                v[2].to_string(),
            ]);
        }
    }
    meta.push("sequence", demo.sequence.join(";"));
    assemble(
        meta,
        check,
        vec![
            (
                "sequence",
                Val::Arr(demo.sequence.iter().map(|s| Val::Str(s.clone())).collect()),
            ),
            ("fixed_frame", frame_json(&demo.fixed_frame)),
            ("body_frame", frame_json(&demo.body_frame)),
        ],
        table,
        Vec::new(),
    )
}

pub fn demo_plane_rotation(seed: Option<u64>) -> RunOutput {
    let mut meta = Meta::new("demo-plane-rotation", seed);
    let demo = plane_rotation_demo();
    let got = (
        demo.three_half_turns,
        demo.two_half_one_quarter,
        demo.one_half_two_quarters,
    );
    let check = if got == (-1, 0, 1) {
        Ok(())
    } else {
        Err(format!("witness triple {got:?}, want (-1, 0, 1)"))
    };

    let mut table = Table::new(vec!["combination", "overlap"]);
    let rows = [
        ("three_half_turns", demo.three_half_turns),
        ("two_half_one_quarter", demo.two_half_one_quarter),
        ("one_half_two_quarters", demo.one_half_two_quarters),
    ];
    for (name, value) in rows {
        table.rows.push(vec![name.to_string(), value.to_string()]);
    }
    meta.push("witness", format!("{got:?}"));
    assemble(
        meta,
        check,
        rows.iter()
            .map(|(name, value)| (*name, Val::Int(*value)))
            .collect(),
        table,
        Vec::new(),
    )
}

pub fn demo_filtering_order(seed: Option<u64>, theta: f64) -> anyhow::Result<RunOutput> {
    let mut meta = Meta::new("demo-filtering-order", seed);
    meta.push("theta", num(theta));
    let (direct, sequential) = filtering_order_demo(theta)
        .map_err(|_| anyhow::anyhow!("theta must lie strictly between 0 and pi/2"))?;
    let expected = theta.cos() * theta.sin();
    let check = if direct.abs() > 1e-12 {
        Err(format!("direct overlap {direct}, want 0"))
    } else if (sequential - expected).abs() > 1e-12 {
        Err(format!("sequential magnitude {sequential}, want {expected}"))
    } else {
        Ok(())
    };

    let mut table = Table::new(vec!["quantity", "value"]);
    table.rows.push(vec!["direct_overlap".into(), num(direct)]);
    table.rows.push(vec!["sequential_magnitude".into(), num(sequential)]);
    table.rows.push(vec!["expected_sequential".into(), num(expected)]);
    Ok(assemble(
        meta,
        check,
        vec![
            ("direct_overlap", Val::Num(direct)),
            ("sequential_magnitude", Val::Num(sequential)),
            ("expected_sequential", Val::Num(expected)),
        ],
        table,
        Vec::new(),
    ))
}

