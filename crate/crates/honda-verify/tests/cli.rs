//! CLI contract tests: exit codes, report shape against the shipped JSON
//! schema, corpus handling, sentence printing, and worker-count
//! determinism.

use honda_verify::cli::{execute_args, report::REPORT_SCHEMA, CliOutcome};

fn run(args: &[&str]) -> CliOutcome {
    execute_args(args.iter().copied())
}

// ---------------------------------------------------------------------------
// Minimal JSON-schema checker, enough for the shipped schema subset:
// type / required / properties / additionalProperties / enum / minimum /
// items.
// ---------------------------------------------------------------------------

fn check_schema(schema: &serde_json::Value, value: &serde_json::Value, path: &str) -> Vec<String> {
    let mut errors = Vec::new();
    let obj = match schema.as_object() {
        Some(o) => o,
        None => return errors,
    };
    if let Some(ty) = obj.get("type").and_then(|t| t.as_str()) {
        let ok = match ty {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "integer" => value.as_i64().is_some() || value.as_u64().is_some(),
            "boolean" => value.is_boolean(),
            _ => true,
        };
        if !ok {
            errors.push(format!("{path}: expected {ty}, got {value}"));
            return errors;
        }
    }
    if let Some(allowed) = obj.get("enum").and_then(|e| e.as_array()) {
        if !allowed.contains(value) {
            errors.push(format!("{path}: {value} not in {allowed:?}"));
        }
    }
    if let Some(min) = obj.get("minimum").and_then(|m| m.as_i64()) {
        if let Some(v) = value.as_i64() {
            if v < min {
                errors.push(format!("{path}: {v} below minimum {min}"));
            }
        }
    }
    if let Some(map) = value.as_object() {
        let props = obj.get("properties").and_then(|p| p.as_object());
        if let Some(required) = obj.get("required").and_then(|r| r.as_array()) {
            for key in required.iter().filter_map(|k| k.as_str()) {
                if !map.contains_key(key) {
                    errors.push(format!("{path}: missing required key '{key}'"));
                }
            }
        }
        if obj.get("additionalProperties") == Some(&serde_json::Value::Bool(false)) {
            if let Some(props) = props {
                for key in map.keys() {
                    if !props.contains_key(key) {
                        errors.push(format!("{path}: unexpected key '{key}'"));
                    }
                }
            }
        }
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(v) = map.get(key) {
                    errors.extend(check_schema(sub, v, &format!("{path}.{key}")));
                }
            }
        }
    }
    if let (Some(items), Some(arr)) = (obj.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            errors.extend(check_schema(items, v, &format!("{path}[{i}]")));
        }
    }
    errors
}

fn assert_valid_report(outcome: &CliOutcome) {
    let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).expect("schema parses");
    let report = outcome.report.as_ref().expect("command produced a report");
    let value: serde_json::Value =
        serde_json::from_str(&report.to_json()).expect("report serializes to JSON");
    let errors = check_schema(&schema, &value, "$");
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}

// ---------------------------------------------------------------------------
// Exit codes and verdicts
// ---------------------------------------------------------------------------

#[test]
fn honda_on_corpus_entry_passes() {
    let outcome = run(&["honda", "--entry", "sl2_f3"]);
    assert_eq!(outcome.exit_code, 0, "{:?}", outcome.text);
    assert_valid_report(&outcome);
    let report = outcome.report.unwrap();
    assert!(report.passed());
    assert_eq!(report.body.statistics.groups_checked, Some(1));
}

#[test]
fn honda_inline_trivial_group_passes() {
    let outcome = run(&["honda", "--modulus", "5", "--n", "2"]);
    assert_eq!(outcome.exit_code, 0);
    let report = outcome.report.unwrap();
    assert_eq!(report.body.statistics.elements_scanned, Some(1));
}

#[test]
fn honda_all_sweeps_the_corpus() {
    let outcome = run(&["honda", "--all"]);
    assert_eq!(outcome.exit_code, 0);
    assert_valid_report(&outcome);
    let report = outcome.report.unwrap();
    assert_eq!(report.body.items.len(), 11);
    assert!(report.body.items.iter().all(|i| matches!(
        i.verdict,
        honda_verify::cli::report::Verdict::Pass
    )));
}

#[test]
fn unknown_entry_is_usage_error() {
    let outcome = run(&["honda", "--entry", "nonexistent"]);
    assert_eq!(outcome.exit_code, 2);
}

#[test]
fn corrupted_corpus_is_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.groups");
    // {I, E12, E21} is not closed under products.
    std::fs::write(
        &path,
        "group bad {\n modulus 2\n dim 2\n elem 1 0 0 1\n elem 1 1 0 1\n elem 1 0 1 1\n}\n",
    )
    .unwrap();
    let outcome = run(&["honda", "--corpus", path.to_str().unwrap(), "--entry", "bad"]);
    assert_eq!(outcome.exit_code, 2);
    let outcome = run(&["corpus", "validate", "--corpus", path.to_str().unwrap()]);
    assert_eq!(outcome.exit_code, 2);
}

#[test]
fn non_unimodular_generator_is_validation_error() {
    let outcome = run(&["honda", "--modulus", "4", "--n", "2", "--gen", "2 0 0 2"]);
    assert_eq!(outcome.exit_code, 2);
}

#[test]
fn cap_exceeded_is_exit_3() {
    // SL_2(F_5) has 120 elements; a cap of 10 is exceeded during closure.
    let outcome = run(&["honda", "--entry", "sl2_f5", "--cap", "10"]);
    assert_eq!(outcome.exit_code, 3, "{:?}", outcome.text);
    // Exhaustive sweep over 3^225 tuples is over the alpha cap.
    let outcome = run(&[
        "psi", "dagger", "--modulus", "3", "--n", "2", "--r", "2", "--s", "1", "--t", "1",
        "--mode", "exhaustive",
    ]);
    assert_eq!(outcome.exit_code, 3);
    assert!(outcome.text.unwrap().contains("cap"));
    // Tower cap.
    let outcome = run(&["lift", "--p", "2", "--levels", "9"]);
    assert_eq!(outcome.exit_code, 3);
}

#[test]
fn strong_honda_pair_and_sweep() {
    let outcome = run(&["strong-honda", "--entry", "sl2_f2"]);
    assert_eq!(outcome.exit_code, 0);
    assert_valid_report(&outcome);
    let report = outcome.report.unwrap();
    assert_eq!(report.body.statistics.pairs_checked, Some(36));

    let outcome = run(&["strong-honda", "--entry", "sl2_f2", "--a", "0", "--b", "3"]);
    assert_eq!(outcome.exit_code, 0);
    let outcome = run(&["strong-honda", "--entry", "sl2_f2", "--a", "99", "--b", "0"]);
    assert_eq!(outcome.exit_code, 2);
}

// ---------------------------------------------------------------------------
// The sentence commands
// ---------------------------------------------------------------------------

#[test]
fn psi_print_is_byte_stable_and_reparses() {
    let a = run(&["psi", "print", "--n", "2", "--r", "1", "--s", "2", "--t", "1"]);
    let b = run(&["psi", "print", "--n", "2", "--r", "1", "--s", "2", "--t", "1"]);
    assert_eq!(a.exit_code, 0);
    let text_a = a.text.unwrap();
    assert_eq!(text_a, b.text.unwrap());
    let parsed = honda_verify::folang::parse::parse(&text_a).expect("printed sentence reparses");
    assert!(parsed.is_sentence());
}

#[test]
fn psi_eval_f2_spec_point() {
    // One representative exponent pair; the acceptance campaign runs the
    // full grid.
    let outcome = run(&[
        "psi", "eval", "--modulus", "2", "--n", "2", "--r", "1", "--s", "3", "--t", "5",
    ]);
    assert_eq!(outcome.exit_code, 0);
    assert_valid_report(&outcome);
    let report = outcome.report.unwrap();
    assert!(report.passed());
    assert_eq!(report.body.statistics.alphas_visited, Some(1 << 25));
}

#[test]
fn psi_xcheck_agrees() {
    let outcome = run(&[
        "psi", "xcheck", "--modulus", "2", "--n", "2", "--r", "1", "--s", "2", "--t", "1",
    ]);
    assert_eq!(outcome.exit_code, 0);
    assert_valid_report(&outcome);
    let report = outcome.report.unwrap();
    assert!(report.passed());
    assert_eq!(report.body.statistics.disagreements, Some(0));
    assert_eq!(report.body.items.len(), 2);
}

#[test]
fn psi_dagger_sampled_is_seeded() {
    let outcome = run(&[
        "psi", "dagger", "--modulus", "3", "--n", "2", "--r", "2", "--s", "2", "--t", "1",
        "--mode", "sampled", "--seed", "42", "--samples", "10000",
    ]);
    assert_eq!(outcome.exit_code, 0);
    assert_valid_report(&outcome);
    let report = outcome.report.unwrap();
    assert_eq!(report.body.config.seed, Some(42));
    assert_eq!(report.body.statistics.alphas_visited, Some(10000));
}

// ---------------------------------------------------------------------------
// Towers
// ---------------------------------------------------------------------------

#[test]
fn lift_depth_one_degenerates_to_honda() {
    let outcome = run(&["lift", "--p", "2", "--levels", "1"]);
    assert_eq!(outcome.exit_code, 0);
    let report = outcome.report.unwrap();
    assert_eq!(report.body.statistics.level_sizes, Some(vec![6]));
    assert_eq!(report.body.statistics.lift_targets, Some(3));
    assert_eq!(report.body.statistics.lifts_succeeded, Some(3));
}

#[test]
fn lift_exports_verifiable_traces() {
    let dir = tempfile::tempdir().unwrap();
    let traces_path = dir.path().join("traces.json");
    let outcome = run(&[
        "lift", "--p", "2", "--levels", "3", "--traces",
        traces_path.to_str().unwrap(),
    ]);
    assert_eq!(outcome.exit_code, 0);
    assert_valid_report(&outcome);
    let raw = std::fs::read_to_string(&traces_path).unwrap();
    let value: serde_json::Value = serde_json::from_str(&raw).unwrap();
    assert_eq!(value["p"], 2);
    assert_eq!(value["depth"], 3);
    let traces = value["traces"].as_array().unwrap();
    assert!(!traces.is_empty());
    // Row-major integer matrices at every level.
    let first = &traces[0]["levels"][0];
    assert!(first["sigma"]["entries"].as_array().unwrap().len() == 4);
}

// ---------------------------------------------------------------------------
// Corpus commands, config file, output modes
// ---------------------------------------------------------------------------

#[test]
fn corpus_list_names_all_entries() {
    let outcome = run(&["corpus", "list"]);
    assert_eq!(outcome.exit_code, 0);
    assert_valid_report(&outcome);
    let report = outcome.report.unwrap();
    let names: Vec<&str> = report.body.items.iter().map(|i| i.name.as_str()).collect();
    assert!(names.contains(&"sl2_z9"));
    assert!(names.contains(&"trivial"));
}

#[test]
fn config_file_supplies_values_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "entry = \"sl2_f2\"\n").unwrap();
    let outcome = run(&["honda", "--config", cfg.to_str().unwrap()]);
    assert_eq!(outcome.exit_code, 0);
    assert_eq!(outcome.report.unwrap().body.config.entry.as_deref(), Some("sl2_f2"));
    // The flag overrides the file.
    let outcome = run(&["honda", "--config", cfg.to_str().unwrap(), "--entry", "sl2_f3"]);
    assert_eq!(outcome.report.unwrap().body.config.entry.as_deref(), Some("sl2_f3"));
    // Unknown keys are rejected.
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let outcome = run(&["honda", "--config", cfg.to_str().unwrap(), "--entry", "sl2_f2"]);
    assert_eq!(outcome.exit_code, 2);
}

#[test]
fn out_writes_report_file_and_csv_mode_works() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let outcome = run(&["honda", "--entry", "sl2_f2", "--out", path.to_str().unwrap()]);
    assert_eq!(outcome.exit_code, 0);
    let raw = std::fs::read_to_string(&path).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&raw).is_ok());

    let outcome = run(&["honda", "--entry", "sl2_f2", "--format", "csv"]);
    assert_eq!(outcome.exit_code, 0);
    let text = outcome.text.unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("verdict,pass"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(run(&["honda"]).exit_code, 2); // no entry selected
    assert_eq!(run(&["psi", "eval", "--n", "2"]).exit_code, 2); // missing modulus
    assert_eq!(run(&["lift", "--p", "4", "--levels", "2"]).exit_code, 2); // not prime
    assert_eq!(run(&["no-such-command"]).exit_code, 2);
}

// ---------------------------------------------------------------------------
// Determinism across worker counts
// ---------------------------------------------------------------------------

#[test]
fn workers_env_var_overrides_default_and_flag_wins() {
    std::env::set_var(honda_verify::cli::WORKERS_ENV, "3");
    let outcome = run(&["honda", "--entry", "trivial"]);
    assert_eq!(outcome.report.as_ref().unwrap().meta.workers, 3);
    let outcome = run(&["honda", "--entry", "trivial", "--workers", "2"]);
    assert_eq!(outcome.report.as_ref().unwrap().meta.workers, 2);
    std::env::remove_var(honda_verify::cli::WORKERS_ENV);
}

#[test]
fn sampled_reports_are_byte_identical_across_worker_counts() {
    let base = [
        "psi", "dagger", "--modulus", "3", "--n", "2", "--r", "2", "--s", "2", "--t", "1",
        "--mode", "sampled", "--seed", "7", "--samples", "1200",
    ];
    let w1 = run(&[&base[..], &["--workers", "1"]].concat());
    let w8 = run(&[&base[..], &["--workers", "8"]].concat());
    assert_eq!(w1.exit_code, 0);
    assert_eq!(w8.exit_code, 0);
    assert_eq!(
        w1.report.unwrap().body_json(),
        w8.report.unwrap().body_json()
    );
}
