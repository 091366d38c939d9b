//! Handlers for the individual subcommands.

use serde_json::{json, Value};
use ss3_core::fermat_curve as fc;
use ss3_core::field_tower::{make_field, FieldCtx, FieldElem};
use ss3_core::group_oracle::{self as go, QuatOrder};
use ss3_core::intersection_atlas as ia;
use ss3_core::mass_formulas as mf;
use ss3_core::strata::{self, Classification, StratumLabel, StratumPoint};

use crate::report::{Check, Table};
use crate::suites::{self, Env};
use crate::{CliError, Outcome, PointArgs, Suite, WitnessKind};

fn parse_point(a: &PointArgs) -> Result<(FieldCtx, StratumPoint), CliError> {
    let ctx = make_field(a.p, a.m)?;
    let parse = |s: &String| ctx.parse_elem(s);
    let t: Vec<FieldElem> = a.t.iter().map(parse).collect::<Result<_, _>>()?;
    let u: Vec<FieldElem> = a.u.iter().map(parse).collect::<Result<_, _>>()?;
    let t = fc::on_curve(&ctx, &[t[0], t[1], t[2]])?
        .ok_or_else(|| CliError::Usage("t is not a point of the curve".into()))?;
    let x = StratumPoint::new(&ctx, t, [u[0], u[1]])?;
    Ok((ctx, x))
}

fn point_inputs(ctx: &FieldCtx, a: &PointArgs, x: &StratumPoint) -> Value {
    json!({
        "p": a.p,
        "m": a.m,
        "field_modulus": ctx.modulus(),
        "t": x.t.coords.iter().map(|c| ctx.to_json(c)).collect::<Vec<_>>(),
        "u": x.u.iter().map(|c| ctx.to_json(c)).collect::<Vec<_>>(),
        "t_degree": x.t.degree,
    })
}

pub fn classify(a: &PointArgs) -> Result<Outcome, CliError> {
    let (ctx, x) = parse_point(a)?;
    let Classification { label, d, d_span, in_delta, in_d } = strata::classify_stratum(&ctx, &x)?;
    let p = ctx.p();
    let mass = mf::mass_stratum_g3(p, &label)?;
    let mut checks = vec![Check::eq("label-legal", true, label.is_legal(p))];
    if let (Some(d), Some(span)) = (d, d_span) {
        if p > 2 {
            checks.push(Check::eq("d-equals-monomial-span", d, span));
        }
    }
    checks.push(Check::eq("delta-iff-span-at-most-5", in_delta, d_span.map_or(in_delta, |s| s <= 5)));
    Ok(Outcome {
        inputs: point_inputs(&ctx, a, &x),
        results: json!({
            "label": label.to_string(),
            "a_number": label.a_number(),
            "d": d,
            "d_span": d_span,
            "in_delta": in_delta,
            "in_d": in_d,
            "mass": mass,
        }),
        checks,
        table: None,
    })
}

pub fn mass_table(p: u32) -> Result<Outcome, CliError> {
    if !ss3_core::nt::is_prime(p as u64) {
        return Err(CliError::Usage(format!("{p} is not prime")));
    }
    let rows = mf::mass_table(p);
    let mut table = Table::new(&["label", "d", "in_d", "l_p", "mass", "index"]);
    let mut checks = Vec::new();
    let opt = |v: Option<String>| v.unwrap_or_default();
    for r in &rows {
        table.push(vec![
            r.label.to_string(),
            opt(r.d.map(|d| d.to_string())),
            opt(r.in_d.map(|b| b.to_string())),
            r.l_p.to_string(),
            r.mass.to_string(),
            r.index.to_string(),
        ]);
        let product = mf::MassValue(mf::base_mass(p, &r.label).0 * num_rational::BigRational::from_integer(r.index.clone()));
        checks.push(Check::eq(format!("mass-factorisation/{}", r.label), product, &r.mass));
        checks.push(Check::eq(format!("mass-positive/{}", r.label), true, r.mass.is_positive()));
    }
    Ok(Outcome {
        inputs: json!({"p": p}),
        results: json!({"rows": rows, "superspecial_mass": mf::mass_superspecial(3, 0, p)?}),
        checks,
        table: Some(table),
    })
}

pub fn verify(suite: &Suite, env: &Env) -> Result<Outcome, CliError> {
    let (name, inputs, (results, checks)) = match suite {
        Suite::Counts { p: Some(p), max_i } => {
            let max_i = max_i.unwrap_or(3);
            let cases: Vec<(u64, u32)> = (1..=max_i).map(|i| (*p, i)).collect();
            let s = suites::point_counts(&cases)?;
            let results = json!({"criterion01": Value::Object(s.results)});
            ("counts", json!({"p": p, "max_i": max_i}), (results, s.checks))
        }
        Suite::Counts { p: None, max_i: Some(_) } => {
            return Err(CliError::Usage("--max-i requires --p".into()));
        }
        other => {
            let name = match other {
                Suite::Counts { .. } => "counts",
                Suite::Strata => "strata",
                Suite::Groups => "groups",
                Suite::Masses => "masses",
                Suite::Aut => "aut",
                Suite::All => "all",
            };
            let list = suites::suite_criteria(name).expect("known suite");
            (name, json!({"seed": env.seed}), suites::run_criteria(list, env)?)
        }
    };
    let mut inputs = inputs;
    inputs["suite"] = json!(name);
    Ok(Outcome { inputs, results, checks, table: None })
}

fn a1_label(ctx: &FieldCtx, x: &StratumPoint) -> Result<StratumLabel, CliError> {
    let label = strata::classify_stratum(ctx, x)?.label;
    if label.a_number() != 1 {
        return Err(go::GroupError::WrongANumber.into());
    }
    Ok(label)
}

pub fn oracle_group(a: &PointArgs) -> Result<Outcome, CliError> {
    let (ctx, x) = parse_point(a)?;
    let label = a1_label(&ctx, &x)?;
    let StratumLabel::A1 { d, case } = label else { unreachable!() };
    let g = go::enumerate_g_m(&ctx, &x)?;
    let f = mf::formula_group_orders(ctx.p(), d, case);
    let ty = g.group_type();
    let checks = vec![Check::eq("g-m-order-matches-closed-form", &f.g_m, g.order())];
    Ok(Outcome {
        inputs: point_inputs(&ctx, a, &x),
        results: json!({
            "label": label.to_string(),
            "order": g.order(),
            "formula_order": f.g_m.to_string(),
            "match": f.g_m == g.order().into(),
            "type": ty,
        }),
        checks,
        table: None,
    })
}

pub fn aut(a: &PointArgs, env: &Env) -> Result<Outcome, CliError> {
    let (ctx, x) = parse_point(a)?;
    let label = a1_label(&ctx, &x)?;
    let order = QuatOrder::for_prime(ctx.p())?;
    let red = go::reduction_mod_p_embedding(order)?;
    let u3o = env.u3o(order)?;
    let g = go::aut_polarised(&ctx, &x, &red, &u3o)?;
    let ty = g.group_type();
    let expected = suites::expected_aut_order(ctx.p(), &label);
    let mut checks = vec![Check::eq("aut-order-even", true, g.order() % 2 == 0)];
    if let Some(e) = expected {
        checks.push(Check::eq("aut-order-matches-closed-form", e, g.order()));
    }
    Ok(Outcome {
        inputs: point_inputs(&ctx, a, &x),
        results: json!({
            "label": label.to_string(),
            "order": g.order(),
            "formula_order": expected,
            "match": expected.map(|e| e == g.order() as u64),
            "type": ty,
        }),
        checks,
        table: None,
    })
}

pub fn atlas(p: u64, max_degree: u32) -> Result<Outcome, CliError> {
    let (census, checks, coverage) = if p == 2 {
        let s = suites::atlas()?;
        (ia::intersection_census(2)?, s.checks, json!({"complete": true}))
    } else {
        let c = ia::degree_census(p, max_degree)?;
        let cov = json!({
            "complete": false,
            "degrees": format!("1..={max_degree}"),
            "note": "partial census: points of higher degree are not scanned, so count and epsilon are bounds only",
        });
        (c, Vec::new(), cov)
    };
    let mut table = Table::new(&["degree", "points", "in_delta", "orbits_in_delta"]);
    for r in &census.per_degree {
        table.push(vec![r.degree.to_string(), r.points.to_string(), r.in_delta.to_string(), r.orbits_in_delta.to_string()]);
    }
    Ok(Outcome {
        inputs: json!({"p": p, "max_degree": if p == 2 { 2 * (p as u32 + 1) } else { max_degree }}),
        results: json!({"census": census, "coverage": coverage}),
        checks,
        table: Some(table),
    })
}

pub fn witness(kind: &WitnessKind) -> Result<Outcome, CliError> {
    let (name, p, w) = match kind {
        WitnessKind::Ml { p } => ("degree-p-plus-1", *p, ia::witness_degree_p_plus_1(*p)?),
        WitnessKind::Akio { p } => ("degree-2p-plus-2", *p, ia::witness_degree_2p_plus_2(*p)?),
    };
    let ctx = make_field(p, w.m)?;
    let checks = w.checks.iter().map(|(k, ok)| Check::eq(format!("witness/{name}/{k}"), true, ok)).collect();
    let conic: Vec<String> = w.conic.iter().map(|c| format!("{c:?}")).collect();
    Ok(Outcome {
        inputs: json!({"kind": name, "p": p}),
        results: json!({
            "m": w.m,
            "field_modulus": ctx.modulus(),
            "t": w.point.representative.coords.iter().map(|c| ctx.to_json(c)).collect::<Vec<_>>(),
            "degree": w.point.degree,
            "in_delta": w.point.in_delta,
            "conic": {
                "monomials": ["X1^2", "X2^2", "X3^2", "X1X2", "X1X3", "X2X3"],
                "coefficients": conic,
            },
        }),
        checks,
        table: None,
    })
}
