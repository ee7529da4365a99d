//! Pretty-printing back to the concrete syntax accepted by the parser.

use std::fmt::Write;

use super::ast::*;

fn expr_level(e: &Expr) -> u8 {
    match e {
        Expr::Or(..) => 1,
        Expr::And(..) => 2,
        Expr::Not(..) => 3,
        Expr::Cmp(..) => 4,
        Expr::Add(..) | Expr::Sub(..) => 5,
        Expr::Int(_) | Expr::Bool(_) | Expr::Var(_) | Expr::ActionIs { .. } => 6,
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let paren = expr_level(e) < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Int(n) => write!(out, "{n}").unwrap(),
        Expr::Bool(b) => write!(out, "{b}").unwrap(),
        Expr::Var(v) => write!(out, "{v}").unwrap(),
        Expr::ActionIs { agent, action } => write!(out, "{agent}.Action = {action}").unwrap(),
        Expr::Not(x) => {
            out.push('!');
            write_expr(out, x, 3);
        }
        Expr::And(l, r) => binary(out, l, " and ", r, 2, 3),
        Expr::Or(l, r) => binary(out, l, " or ", r, 1, 2),
        Expr::Cmp(op, l, r) => binary(out, l, &format!(" {} ", op.symbol()), r, 5, 5),
        Expr::Add(l, r) => binary(out, l, " + ", r, 5, 6),
        Expr::Sub(l, r) => binary(out, l, " - ", r, 5, 6),
    }
    if paren {
        out.push(')');
    }
}

fn binary(out: &mut String, l: &Expr, op: &str, r: &Expr, lmin: u8, rmin: u8) {
    write_expr(out, l, lmin);
    out.push_str(op);
    write_expr(out, r, rmin);
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 1);
    s
}

fn formula_level(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => 1,
        Formula::And(..) => 2,
        _ => 3,
    }
}

fn write_formula(out: &mut String, f: &Formula, min: u8) {
    let paren = formula_level(f) < min;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Atom(a) => out.push_str(a),
        Formula::Not(x) => {
            out.push('!');
            write_formula(out, x, 3);
        }
        Formula::And(l, r) => {
            write_formula(out, l, 2);
            out.push_str(" and ");
            write_formula(out, r, 3);
        }
        Formula::Or(l, r) => {
            write_formula(out, l, 1);
            out.push_str(" or ");
            write_formula(out, r, 2);
        }
        Formula::Next(c, x) => temporal(out, c, "X", x),
        Formula::Eventually(c, x) => temporal(out, c, "F", x),
        Formula::Always(c, x) => temporal(out, c, "G", x),
        Formula::Until(c, l, r) => {
            write!(out, "<{c}> (").unwrap();
            write_formula(out, l, 1);
            out.push_str(" U ");
            write_formula(out, r, 1);
            out.push(')');
        }
    }
    if paren {
        out.push(')');
    }
}

fn temporal(out: &mut String, coalition: &str, op: &str, inner: &Formula) {
    write!(out, "<{coalition}> {op}(").unwrap();
    write_formula(out, inner, 1);
    out.push(')');
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self, 1);
        f.write_str(&s)
    }
}

fn write_vars(out: &mut String, vars: &[VarDecl]) {
    if vars.is_empty() {
        return;
    }
    out.push_str("    Vars:\n");
    for v in vars {
        match v.domain {
            Domain::Boolean => writeln!(out, "        {} : boolean;", v.name).unwrap(),
            Domain::Range { lo, hi } => writeln!(out, "        {} : {lo}..{hi};", v.name).unwrap(),
        }
    }
    out.push_str("    end Vars\n");
}

fn write_evolution(out: &mut String, rules: &[EvolutionRule]) {
    if rules.is_empty() {
        return;
    }
    out.push_str("    Evolution:\n");
    for r in rules {
        out.push_str("        ");
        for (i, a) in r.assignments.iter().enumerate() {
            if i > 0 {
                out.push_str(" and ");
            }
            let mut rhs = String::new();
            write_expr(&mut rhs, &a.value, 3);
            write!(out, "{} = {rhs}", a.target.name).unwrap();
        }
        writeln!(out, " if {};", expr_to_string(&r.condition)).unwrap();
    }
    out.push_str("    end Evolution\n");
}

/// Renders a model in the accepted ISPL subset; parsing the output yields an equal model.
pub fn model_to_string(spec: &ModelSpec) -> String {
    let mut out = String::new();
    out.push_str("Agent Environment\n");
    write_vars(&mut out, &spec.environment_vars);
    write_evolution(&mut out, &spec.environment_evolution);
    out.push_str("end Agent\n");

    for a in &spec.agents {
        writeln!(out, "\nAgent {}", a.name).unwrap();
        write_vars(&mut out, &a.vars);
        writeln!(out, "    Actions = {{{}}};", a.actions.join(", ")).unwrap();
        if let Some(rules) = &a.protocol {
            out.push_str("    Protocol:\n");
            for r in rules {
                let guard = match &r.guard {
                    ProtocolGuard::Other => "Other".to_string(),
                    ProtocolGuard::When(e) => expr_to_string(e),
                };
                writeln!(out, "        {guard} : {{{}}};", r.actions.join(", ")).unwrap();
            }
            out.push_str("    end Protocol\n");
        }
        write_evolution(&mut out, &a.evolution);
        out.push_str("end Agent\n");
    }

    out.push_str("\nEvaluation\n");
    for p in &spec.propositions {
        writeln!(out, "    {} if {};", p.name, expr_to_string(&p.condition)).unwrap();
    }
    out.push_str("end Evaluation\n");

    if !spec.groups.is_empty() {
        out.push_str("\nGroups\n");
        for g in &spec.groups {
            writeln!(out, "    {} = {{{}}};", g.name, g.members.join(", ")).unwrap();
        }
        out.push_str("end Groups\n");
    }

    out.push_str("\nFormulae\n");
    for f in &spec.formulas {
        writeln!(out, "    {f};").unwrap();
    }
    out.push_str("end Formulae\n");
    out
}
