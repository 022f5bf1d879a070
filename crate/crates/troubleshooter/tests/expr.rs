// SPDX-License-Identifier: Apache-2.0

use troubleshooter::{decision_eval, Bindings, TsgError, Value};

fn eval(expr: &str) -> Value {
    decision_eval(expr, &Bindings::new()).expect(expr)
}

#[test]
fn comparisons_and_arithmetic_follow_the_usual_precedence() {
    assert_eq!(eval("0.8 > 0.5"), Value::Bool(true));
    assert_eq!(eval("2 + 3 * 4"), Value::Num(14.0));
    assert_eq!(eval("(2 + 3) * 4"), Value::Num(20.0));
    assert_eq!(eval("10 - 2 - 3"), Value::Num(5.0));
    assert_eq!(eval("-3 + 5"), Value::Num(2.0));
    assert_eq!(eval("7 / 2 >= 3.5"), Value::Bool(true));
    assert_eq!(eval("1 != 2"), Value::Bool(true));
    assert_eq!(eval("2 + 2 == 5"), Value::Bool(false));
}

#[test]
fn aggregates_use_the_population_convention() {
    assert_eq!(eval("mean([90, 10])"), Value::Num(50.0));
    assert_eq!(eval("stdev([90, 10])"), Value::Num(40.0));
    assert_eq!(eval("min([3, 1, 2])"), Value::Num(1.0));
    assert_eq!(eval("max(3, 1, 2)"), Value::Num(3.0));
    assert_eq!(eval("stdev([5, 5, 5])"), Value::Num(0.0));
    // the motivating check: relative imbalance of a skewed cpu profile
    assert_eq!(eval("stdev([90, 10]) / mean([90, 10]) > 0.5"), Value::Bool(true));
    assert_eq!(eval("stdev([50, 50]) / mean([50, 50]) > 0.5"), Value::Bool(false));
}

#[test]
fn boolean_connectives_short_circuit() {
    assert_eq!(eval("true and false"), Value::Bool(false));
    assert_eq!(eval("true or false"), Value::Bool(true));
    assert_eq!(eval("not false"), Value::Bool(true));
    assert_eq!(eval("1 < 2 and 2 < 3"), Value::Bool(true));
    // the right side would fail on evaluation; short-circuit skips it
    assert_eq!(eval("false and no_such_var > 1"), Value::Bool(false));
    assert_eq!(eval("true or no_such_var > 1"), Value::Bool(true));
    assert_eq!(eval("else"), Value::Bool(true));
}

#[test]
fn variables_come_from_the_bindings() {
    let mut env = Bindings::new();
    env.insert("cpu".into(), Value::List(vec![90.0, 10.0]));
    env.insert("link_load".into(), Value::Num(0.9));
    env.insert("delta".into(), Value::Num(0.0));
    let check = |expr: &str, want: bool| {
        assert_eq!(decision_eval(expr, &env).expect(expr), Value::Bool(want), "{expr}");
    };
    check("stdev(cpu) / mean(cpu) > 0.5", true);
    check("link_load > 0.8 and delta == 0", true);
    check("link_load > 0.8 and not (delta == 0)", false);
    check("mean(cpu) == 50", true);
}

#[test]
fn type_errors_are_reported_not_coerced() {
    let mut env = Bindings::new();
    env.insert("cpu".into(), Value::List(vec![1.0, 2.0]));
    let fails = |expr: &str, needle: &str| match decision_eval(expr, &env) {
        Err(TsgError::ExprType { msg, .. }) => {
            assert!(msg.contains(needle), "{expr}: {msg:?} lacks {needle:?}")
        }
        other => panic!("{expr}: expected type error, got {other:?}"),
    };
    fails("no_such_var > 1", "unknown variable");
    fails("5 and true", "expected a boolean");
    fails("true > false", "expected a number");
    fails("cpu > 0.5", "expected a number");
    fails("1 / 0", "division by zero");
    fails("mean([])", "empty list");
    fails("1 +", "expected a value");
    fails("frobnicate(1)", "unknown function");
}

#[test]
fn the_fleet_decision_matches_its_hand_evaluated_truth_table() {
    let imbalance = "stdev(cpu) / mean(cpu) > 0.5";
    let congestion = "link_load > 0.8 and delta == 0";
    // (imbalanced?, static?) -> (guard1, guard2)
    let cases = [
        (vec![90.0, 10.0], 0.0, true, true),
        (vec![90.0, 10.0], 1.0, true, false),
        (vec![50.0, 50.0], 0.0, false, true),
        (vec![50.0, 50.0], 1.0, false, false),
    ];
    for (cpu, delta, want1, want2) in cases {
        let mut env = Bindings::new();
        env.insert("cpu".into(), Value::List(cpu.clone()));
        env.insert("link_load".into(), Value::Num(0.9));
        env.insert("delta".into(), Value::Num(delta));
        assert_eq!(decision_eval(imbalance, &env).unwrap(), Value::Bool(want1), "{cpu:?}");
        assert_eq!(decision_eval(congestion, &env).unwrap(), Value::Bool(want2), "{cpu:?}/{delta}");
    }
}
