//! JSON and text renderings of the pipeline results.

use std::fmt::Write;

use mahler::frobenius::FrobeniusOutput;
use mahler::newton::{FrobeniusPlan, NewtonData};
use serde_json::{json, Value};

use crate::parse::EquationSpec;
use crate::RunOptions;

fn input_json(spec: &EquationSpec, opts: Option<&RunOptions>) -> Value {
    let mut v = json!({ "p": spec.p, "order": spec.coeffs.len() - 1, "spec": spec.to_string() });
    if let Some(o) = opts {
        v["precision"] = json!(o.precision.to_string());
        v["depth"] = json!(o.depth);
        v["expansion_ceiling"] = json!(o.expansion_ceiling().to_string());
    }
    v
}

fn newton_section(data: &NewtonData, plan: &FrobeniusPlan) -> Value {
    let mut v = data.to_json();
    v["plan"] = plan.to_json();
    v
}

pub fn newton_json(spec: &EquationSpec, data: &NewtonData, plan: &FrobeniusPlan) -> Value {
    json!({ "input": input_json(spec, None), "newton": newton_section(data, plan) })
}

pub fn solve_json(spec: &EquationSpec, opts: &RunOptions, out: &FrobeniusOutput) -> Value {
    let blocks: Vec<Value> = out
        .blocks
        .iter()
        .map(|b| {
            json!({
                "c": b.entry.c.to_string(),
                "j": b.entry.j + 1,
                "mu": b.mu.to_string(),
                "g": b.g.to_json(),
                "checks": b.checks.to_json(),
            })
        })
        .collect();
    let solutions: Vec<Value> = out
        .labeled_solutions()
        .iter()
        .map(|(label, _, y)| {
            json!({
                "c": label.c.to_string(),
                "j": label.j + 1,
                "m": label.m,
                "solution": y.to_json(),
            })
        })
        .collect();
    let partial = out.partial.as_ref().map(|p| {
        json!({
            "slope": p.slope.as_ref().map(|s| s.to_string()),
            "solved_order": p.solved_order,
            "warning": "some exponents are not rational; only the right factor with rational exponents was solved",
        })
    });
    let mut input = input_json(spec, Some(opts));
    input["epsilon"] = json!(opts.basis_options().epsilon_for(spec.p).to_string());
    json!({
        "input": input,
        "newton": newton_section(&out.newton, &out.plan),
        "factorization": out.factorization.to_json(),
        "gcj": blocks,
        "solutions": solutions,
        "partial": partial,
        "verification": out.verification.as_ref().map(|v| v.to_json()),
    })
}

fn header(spec: &EquationSpec) -> String {
    let mut s = format!(
        "Mahler equation of order {} with p = {}\n",
        spec.coeffs.len() - 1,
        spec.p
    );
    for (i, a) in spec.coeffs.iter().enumerate() {
        let _ = writeln!(s, "  a[{i}] = {a}");
    }
    s
}

fn newton_text(data: &NewtonData, plan: &FrobeniusPlan) -> String {
    let mut s = String::from("\nNewton polygon\n  vertices:");
    for v in &data.vertices {
        let _ = write!(s, " ({}, {})", v.x, v.y);
    }
    s.push('\n');
    for (j, sd) in data.slopes.iter().enumerate() {
        let exps: Vec<String> = sd.exponents.iter().map(|(c, m)| format!("{c} (×{m})")).collect();
        let _ = writeln!(
            s,
            "  slope {}: μ = {}, r = {}, χ = {}, exponents: {}",
            j + 1,
            sd.slope.mu,
            sd.slope.r,
            sd.charpoly,
            if exps.is_empty() {
                "none".to_string()
            } else {
                exps.join(", ")
            }
        );
        if !sd.splits() {
            let _ = writeln!(s, "    factor without rational roots: {}", sd.residual);
        }
    }
    s.push_str("\nPlan\n");
    for e in &plan.entries {
        let _ = writeln!(
            s,
            "  c = {}, j = {}: s = {}, m = {}, ν = {}",
            e.c,
            e.j + 1,
            e.s,
            e.m,
            e.nu
        );
    }
    s
}

pub fn newton_pretty(spec: &EquationSpec, data: &NewtonData, plan: &FrobeniusPlan) -> String {
    let mut s = header(spec);
    s += &newton_text(data, plan);
    if !data.all_rational() {
        s += "\nwarning: some exponents are not rational\n";
    }
    s
}

pub fn solve_pretty(spec: &EquationSpec, opts: &RunOptions, out: &FrobeniusOutput) -> String {
    let mut s = header(spec);
    s += &newton_text(&out.newton, &out.plan);

    s.push_str("\nFactorization\n");
    let _ = writeln!(s, "  a = {}", out.factorization.a);
    for (j, layer) in out.factorization.layers.iter().enumerate() {
        for f in layer {
            let _ = writeln!(s, "  slope {}: (z^({}) φ - {}) h^-1,  h = {}", j + 1, f.nu, f.c, f.h);
        }
    }

    let _ = writeln!(
        s,
        "\nSolutions (exponents below {}, depth {})",
        opts.precision, opts.depth
    );
    for (label, _, y) in out.labeled_solutions() {
        let _ = writeln!(s, "  y[c = {}, j = {}, m = {}] = {}", label.c, label.j + 1, label.m, y);
    }

    if let Some(p) = &out.partial {
        let slope = p.slope.as_ref().map_or("?".to_string(), |m| m.to_string());
        let _ = writeln!(
            s,
            "\nwarning: partial basis. The slope μ = {slope} has non-rational exponents; \
             {} of {} solutions were computed.",
            p.solved_order, out.order
        );
    }

    if let Some(v) = &out.verification {
        s.push_str("\nVerification\n");
        for c in &v.solutions {
            let _ = writeln!(
                s,
                "  y[c = {}, j = {}, m = {}]: residual {} on {}, gaps {}",
                c.label.c,
                c.label.j + 1,
                c.label.m,
                if c.residual_zero { "zero" } else { "NONZERO" },
                c.residual_mask,
                if c.gaps_ok { "ok" } else { "TOO WIDE" }
            );
        }
        for r in &v.gcj_residuals {
            let _ = writeln!(
                s,
                "  g[c = {}, j = {}]: defining equation {}",
                r.c,
                r.j + 1,
                if r.ok { "ok" } else { "FAILED" }
            );
        }
        let _ = writeln!(
            s,
            "  independence: {}",
            if v.independence.passed() { "ok" } else { "FAILED" }
        );
        let _ = writeln!(
            s,
            "  {} of {} solutions: {}",
            v.count,
            v.expected_count,
            if v.passed() { "PASSED" } else { "FAILED" }
        );
    }
    s
}
