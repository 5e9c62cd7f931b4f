use std::fmt::Write;

use moframe::expr::cap::with_size_cap;
use moframe::forms::{verify_recurrence, verify_structure, Level};
use moframe::frame::{
    equivalence_signature, invariants as frame_invariants, symbolic_invariants, FrameConfig,
    FrameError,
};
use moframe::jet::{FJet, JetError};
use moframe::parse::{parse_corpus, parse_expr, render_latex, render_text, OdeInput};
use moframe::vfield::{check_determining, symbolic_prolong_generic};
use serde_json::{json, Value};

use crate::{Common, Fail, OutFormat, RunMode, Suite};

fn frame_fail(e: FrameError) -> Fail {
    match e {
        FrameError::BudgetExceeded | FrameError::Jet(JetError::SizeCap(_)) => {
            Fail::Budget(e.to_string())
        }
        FrameError::Jet(JetError::ForeignSymbol(_)) | FrameError::Hint(_) => {
            Fail::Input(e.to_string())
        }
        other => Fail::Verification(other.to_string()),
    }
}

fn inputs(c: &Common) -> Result<Vec<OdeInput>, Fail> {
    let mut out = Vec::new();
    if let Some(path) = &c.corpus {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Fail::Input(format!("{}: {e}", path.display())))?;
        out.extend(parse_corpus(&text).map_err(|e| Fail::Input(e.to_string()))?);
    }
    for s in &c.ode {
        let parsed = match s.split_once(':') {
            Some((name, rhs)) => OdeInput::from_text(Some(name.trim()), rhs.trim()),
            None => OdeInput::from_text(None, s.trim()),
        };
        out.push(parsed.map_err(|e| Fail::Input(format!("`{s}`: {e}")))?);
    }
    Ok(out)
}

fn frame_config(c: &Common) -> FrameConfig {
    FrameConfig {
        points: c.points,
        seed: c.seed,
        order: c.order,
        ..FrameConfig::default()
    }
}

fn build(ode: &OdeInput, order: usize, budget: usize) -> Result<FJet, Fail> {
    match with_size_cap(budget, || FJet::build(&ode.rhs, order)) {
        Ok(r) => r.map_err(|e| frame_fail(e.into())),
        Err(e) => Err(Fail::Budget(e.to_string())),
    }
}

fn one(ode: &OdeInput, c: &Common) -> Result<Value, Fail> {
    let head = json!({"name": ode.label(), "rhs": render_text(&ode.rhs)});
    let mut v = head;
    match c.mode {
        RunMode::Pointwise => {
            let fjet = build(ode, c.order, c.budget)?;
            let rep = frame_invariants(&fjet, &frame_config(c)).map_err(frame_fail)?;
            v["verdict"] = json!(rep.verdict.to_string());
            v["branch"] = json!(rep.branch);
            v["report"] = serde_json::to_value(&rep).expect("report serializes");
        }
        RunMode::Symbolic => {
            let fjet = build(ode, moframe::frame::SYMBOLIC_ORDER, c.budget)?;
            let s = symbolic_invariants(&fjet, c.budget).map_err(frame_fail)?;
            v["verdict"] = json!(if s.flat() {
                "linearizable"
            } else {
                "not-linearizable"
            });
            v["symbolic"] = serde_json::to_value(&s).expect("report serializes");
            v["latex"] = json!({
                "R_QQ": render_latex(&s.values[0]),
                "R_XPQ": render_latex(&s.values[1]),
                "R_XXQ": render_latex(&s.values[2]),
            });
        }
    }
    Ok(v)
}

pub fn invariants(c: &Common) -> Result<(Value, bool), Fail> {
    let odes = inputs(c)?;
    if odes.is_empty() {
        return Err(Fail::Input(
            "no equation given (use --ode or --corpus)".into(),
        ));
    }
    let rows = odes
        .iter()
        .map(|o| one(o, c))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((Value::Array(rows), true))
}

pub fn classify(c: &Common) -> Result<(Value, bool), Fail> {
    let odes = inputs(c)?;
    let mut rows = Vec::new();
    for o in &odes {
        let full = one(o, c)?;
        let first = match c.mode {
            RunMode::Pointwise => full["report"]["points-used"][0]["frame"]["fundamental"].clone(),
            RunMode::Symbolic => {
                let s = &full["symbolic"];
                json!({"R_QQ": s["R_QQ"], "R_XPQ": s["R_XPQ"], "R_XXQ": s["R_XXQ"]})
            }
        };
        rows.push(json!({
            "name": full["name"],
            "rhs": full["rhs"],
            "branch": full.get("branch").cloned().unwrap_or(json!("symbolic")),
            "verdict": full["verdict"],
            "first-point": first,
        }));
    }
    let mut counts = serde_json::Map::new();
    for r in &rows {
        let k = r["verdict"].as_str().unwrap_or("").to_string();
        let n = counts.get(&k).and_then(Value::as_u64).unwrap_or(0);
        counts.insert(k, json!(n + 1));
    }
    Ok((json!({"rows": rows, "summary": counts}), true))
}

pub fn equivalent(c: &Common, hint: Option<&(String, String)>) -> Result<(Value, bool), Fail> {
    let odes = inputs(c)?;
    if odes.len() != 2 {
        return Err(Fail::Input(format!(
            "equivalent needs exactly two equations, got {}",
            odes.len()
        )));
    }
    let hint = match hint {
        Some((x, p)) => {
            let e = |s: &str| parse_expr(s).map_err(|e| Fail::Input(format!("hint `{s}`: {e}")));
            Some((e(x)?, e(p)?))
        }
        None => None,
    };
    let rep = equivalence_signature(
        &odes[0].rhs,
        &odes[1].rhs,
        hint.as_ref().map(|(a, b)| (a, b)),
        &frame_config(c),
    )
    .map_err(frame_fail)?;
    let v = json!({
        "a": {"name": odes[0].label(), "rhs": render_text(&odes[0].rhs)},
        "b": {"name": odes[1].label(), "rhs": render_text(&odes[1].rhs)},
        "report": serde_json::to_value(&rep).expect("report serializes"),
    });
    Ok((v, true))
}

fn suite(name: &str, pass: bool, body: Value) -> Value {
    json!({"suite": name, "pass": pass, "details": body})
}

pub fn verify(which: Suite, seed: u64) -> Result<(Value, bool), Fail> {
    let all = which == Suite::All;
    let mut out = Vec::new();
    if all || which == Suite::Determining {
        let chk = check_determining(&symbolic_prolong_generic());
        let chain = moframe::action::display_vs_chain();
        let pass = chk.ok && chain.iter().all(|(_, r)| r.is_zero());
        let prolongation: Vec<Value> = ["gamma", "tau", "varsigma"]
            .iter()
            .zip(chk.residuals.iter())
            .map(|(l, r)| json!({"label": l, "residual": render_text(r)}))
            .collect();
        let vs_chain: Vec<Value> = chain
            .iter()
            .map(|(l, r)| json!({"label": l, "residual": render_text(r)}))
            .collect();
        out.push(suite(
            "determining",
            pass,
            json!({
                "prolongation": prolongation,
                "action-vs-chain-rule": vs_chain,
                "ledger": ["varsigma-p", "chi-p-phi", "chi-p2", "chi-pq", "chi-last"],
            }),
        ));
    }
    if all || which == Suite::GroupLaw {
        let r = moframe::action::group_law(seed, 25, 25);
        out.push(suite(
            "group-law",
            r.ok(),
            json!({"trials": r.trials, "exact": r.exact, "failures": r.failures}),
        ));
    }
    if all || which == Suite::Structure {
        for l in Level::ALL {
            let r = verify_structure(l);
            out.push(suite(
                &format!("structure/{}", l.name()),
                r.pass,
                serde_json::to_value(&r).expect("report serializes"),
            ));
        }
    }
    if all || which == Suite::Recurrence {
        let r = verify_recurrence();
        out.push(suite(
            "recurrence",
            r.pass,
            serde_json::to_value(&r).expect("report serializes"),
        ));
    }
    let ok = out.iter().all(|s| s["pass"] == json!(true));
    Ok((Value::Array(out), ok))
}

fn s(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn frac_latex(v: &str) -> String {
    match v.split_once('/') {
        Some((n, d)) => match n.strip_prefix('-') {
            Some(n) => format!("-\\frac{{{n}}}{{{d}}}"),
            None => format!("\\frac{{{n}}}{{{d}}}"),
        },
        None => v.to_string(),
    }
}

const FUND: [&str; 3] = ["R_QQ", "R_XPQ", "R_XXQ"];

fn text_point(out: &mut String, p: &Value) {
    let f = &p["frame"];
    let pt = &f["point"];
    let _ = write!(
        out,
        "  point {}: (x, u, p, q) = ({}, {}, {}, {})",
        s(&p["index"]),
        s(&pt["x"]),
        s(&pt["u"]),
        s(&pt["p"]),
        s(&pt["q"])
    );
    for k in FUND {
        let _ = write!(out, "  {k} = {}", s(&f["fundamental"][k]));
    }
    out.push('\n');
    if let Some(words) = p["generic-extras"]["words"].as_array() {
        for w in words {
            let _ = writeln!(out, "    R_{} = {}  J = {}", s(&w[0]), s(&w[1]), s(&w[2]));
        }
    }
}

fn text(report: &Value) -> String {
    let mut out = String::new();
    let cmd = report["config"]["command"].as_str().unwrap_or("");
    let res = &report["results"];
    match cmd {
        "invariants" => {
            for r in res.as_array().into_iter().flatten() {
                let _ = writeln!(out, "{}: u''' = {}", s(&r["name"]), s(&r["rhs"]));
                let _ = writeln!(out, "  verdict: {}", s(&r["verdict"]));
                if let Some(b) = r.get("branch") {
                    let _ = writeln!(out, "  branch: {}", s(b));
                }
                if let Some(sym) = r.get("symbolic") {
                    for k in FUND {
                        let _ = writeln!(out, "  {k} = {}", s(&sym[k]));
                    }
                }
                for p in r["report"]["points-used"].as_array().into_iter().flatten() {
                    text_point(&mut out, p);
                }
            }
        }
        "classify" => {
            let _ = writeln!(
                out,
                "{:<16} {:<18} {:<26} first point (R_QQ, R_XPQ, R_XXQ)",
                "name", "verdict", "branch"
            );
            for r in res["rows"].as_array().into_iter().flatten() {
                let fp = &r["first-point"];
                let _ = writeln!(
                    out,
                    "{:<16} {:<18} {:<26} ({}, {}, {})",
                    s(&r["name"]),
                    s(&r["verdict"]),
                    s(&r["branch"]),
                    s(&fp["R_QQ"]),
                    s(&fp["R_XPQ"]),
                    s(&fp["R_XXQ"])
                );
            }
            if let Some(m) = res["summary"].as_object() {
                let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}: {v}")).collect();
                let _ = writeln!(
                    out,
                    "total {}; {}",
                    res["rows"].as_array().map_or(0, Vec::len),
                    parts.join(", ")
                );
            }
        }
        "equivalent" => {
            let r = &res["report"];
            let _ = writeln!(
                out,
                "a: {}  ({}, {})",
                s(&res["a"]["rhs"]),
                s(&r["verdict-a"]),
                s(&r["branch-a"])
            );
            let _ = writeln!(
                out,
                "b: {}  ({}, {})",
                s(&res["b"]["rhs"]),
                s(&r["verdict-b"]),
                s(&r["branch-b"])
            );
            let _ = writeln!(out, "signature: {}", s(&r["signature"]));
            let _ = writeln!(out, "reason: {}", s(&r["reason"]));
        }
        _ => {
            for su in report["suite-residuals"].as_array().into_iter().flatten() {
                let _ = writeln!(
                    out,
                    "{} {}",
                    if su["pass"] == json!(true) {
                        "PASS"
                    } else {
                        "FAIL"
                    },
                    s(&su["suite"])
                );
                let d = &su["details"];
                for c in d["checks"].as_array().into_iter().flatten() {
                    let _ = write!(out, "  {}: residual {}", s(&c["label"]), s(&c["residual"]));
                    if c["display-residual"] != json!("0") {
                        let ids: Vec<String> = c["ledger"]
                            .as_array()
                            .into_iter()
                            .flatten()
                            .map(s)
                            .collect();
                        let _ = write!(
                            out,
                            "; printed form differs by {} [{}]",
                            s(&c["display-residual"]),
                            ids.join(", ")
                        );
                    }
                    out.push('\n');
                }
                for key in ["prolongation", "action-vs-chain-rule"] {
                    for c in d[key].as_array().into_iter().flatten() {
                        let _ = writeln!(
                            out,
                            "  {key} {}: residual {}",
                            s(&c["label"]),
                            s(&c["residual"])
                        );
                    }
                }
                if let Some(a) = d["absorbed"].as_array().filter(|a| !a.is_empty()) {
                    let _ = writeln!(
                        out,
                        "  absorbed: {}",
                        a.iter().map(s).collect::<Vec<_>>().join(", ")
                    );
                }
                if d.get("trials").is_some() {
                    let _ = writeln!(
                        out,
                        "  {}/{} compositions exact",
                        s(&d["exact"]),
                        s(&d["trials"])
                    );
                }
            }
        }
    }
    let _ = writeln!(out, "typo ledger {}", s(&report["typo-ledger-version"]));
    out
}

fn latex(report: &Value) -> String {
    let mut out = String::from("\\begin{tabular}{lll}\n\\hline\n");
    let cmd = report["config"]["command"].as_str().unwrap_or("");
    let rows: Vec<&Value> = match cmd {
        "invariants" => report["results"].as_array().into_iter().flatten().collect(),
        "classify" => report["results"]["rows"]
            .as_array()
            .into_iter()
            .flatten()
            .collect(),
        _ => return text(report),
    };
    out.push_str("$F$ & verdict & $(R_{QQ}, R_{XPQ}, R_{XXQ})$ \\\\\n\\hline\n");
    for r in rows {
        let vals: Vec<String> = if let Some(l) = r.get("latex") {
            FUND.iter().map(|k| s(&l[*k])).collect()
        } else {
            let fp = r
                .get("first-point")
                .cloned()
                .unwrap_or_else(|| r["report"]["points-used"][0]["frame"]["fundamental"].clone());
            FUND.iter().map(|k| frac_latex(&s(&fp[*k]))).collect()
        };
        let _ = writeln!(
            out,
            "${}$ & {} & $({})$ \\\\",
            s(&r["rhs"]),
            s(&r["verdict"]),
            vals.join(", ")
        );
    }
    out.push_str("\\hline\n\\end{tabular}\n");
    let _ = writeln!(out, "% typo ledger {}", s(&report["typo-ledger-version"]));
    out
}

pub fn emit(report: &Value, f: OutFormat) -> String {
    match f {
        OutFormat::Json => serde_json::to_string_pretty(report).expect("json") + "\n",
        OutFormat::Text => text(report),
        OutFormat::Latex => latex(report),
    }
}
