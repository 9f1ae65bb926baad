//! Evaluation of parsed scripts against the core library.

use std::collections::HashMap;

use serde_json::{json, Map, Value as Json};

use mwk_core::chowwitt::{self, Curve, Pb1Class, Point, QuadraticDivisor};
use mwk_core::exact::{Elem, Field, Poly};
use mwk_core::fields::{self, finite_field, Extension, Place};
use mwk_core::gw::{self, GwElem, GwInvariants};
use mwk_core::km::{self, KmElem};
use mwk_core::mw::{self, MwElem, NormalizedPair};
use mwk_core::{rules, sstrace, transfer, MwkError};

use crate::ast::*;
use crate::error::CliError;

pub type Record = Map<String, Json>;

type Res<T> = std::result::Result<T, CliError>;

/// A bound element.
#[derive(Clone, Debug)]
pub enum Value {
    Mw(MwElem),
    Gw(GwElem),
    Km(KmElem),
}

impl Value {
    pub fn show(&self) -> String {
        match self {
            Value::Mw(x) => mw::show_mw(x),
            Value::Gw(g) => gw::show_gw(g),
            Value::Km(x) => km::show_km(x),
        }
    }

    pub fn type_name(&self) -> String {
        match self {
            Value::Mw(x) => match &x.twist {
                Some(l) => format!("KMW({}, {}) @ {l}", x.degree, x.field),
                None => format!("KMW({}, {})", x.degree, x.field),
            },
            Value::Gw(g) => format!("GW({})", g.field),
            Value::Km(x) => format!("KM({}, {})", x.degree, x.field),
        }
    }

    fn field(&self) -> &Field {
        match self {
            Value::Mw(x) => &x.field,
            Value::Gw(g) => &g.field,
            Value::Km(x) => &x.field,
        }
    }
}

#[derive(Clone, Debug)]
struct ExtEntry {
    ext: Extension,
    /// Stage polynomials as written, each over the field below it.
    polys: Vec<Poly>,
}

/// Resolved type of an element expression.
#[derive(Clone, Debug)]
enum Ty {
    Kmw(Option<i64>, Field, Option<String>),
    Km(Option<i64>, Field),
    Gw(Field),
}

/// Either a polymorphic zero or an element.
enum Lit<T> {
    Zero,
    Elem(T),
}

/// Interpreter state: bindings persist across statements.
#[derive(Default)]
pub struct Session {
    fields: HashMap<String, Field>,
    exts: HashMap<String, ExtEntry>,
    values: HashMap<String, Value>,
    divisors: HashMap<String, QuadraticDivisor>,
    last_field: Option<Field>,
    /// Default seed of `rules-suite`.
    pub suite_seed: u64,
}

fn domain(msg: impl Into<String>) -> CliError {
    CliError::from(MwkError::domain(msg))
}

/// Twist labels meet: an untwisted literal adopts the label of the other side.
fn adopt(a: MwElem, b: MwElem) -> (MwElem, MwElem) {
    match (&a.twist, &b.twist) {
        (None, Some(l)) => {
            let l = l.clone();
            (a.with_twist(Some(l)), b)
        }
        (Some(l), None) => {
            let l = l.clone();
            (a, b.with_twist(Some(l)))
        }
        _ => (a, b),
    }
}

fn adopt_gw(a: GwElem, b: GwElem) -> (GwElem, GwElem) {
    match (&a.twist, &b.twist) {
        (None, Some(l)) => {
            let l = l.clone();
            (a.with_twist(Some(l)), b)
        }
        (Some(l), None) => {
            let l = l.clone();
            (a, b.with_twist(Some(l)))
        }
        _ => (a, b),
    }
}

/// Generator named `name` somewhere in the tower of `k`.
fn lookup_var(k: &Field, name: &str) -> Option<Elem> {
    let (var, base) = match k {
        Field::Rat(r) => (r.var.as_str(), &r.base),
        Field::Ext(e) => (e.var.as_str(), &e.base),
        _ => return None,
    };
    if var == name {
        return k.gen().ok();
    }
    lookup_var(base, name).map(|x| k.embed_base(&x))
}

/// Field element from a unit expression.
pub fn eval_unit(k: &Field, u: &UnitExpr) -> Res<Elem> {
    Ok(match u {
        UnitExpr::Int(n) => k.from_bigint(n),
        UnitExpr::Var(v, pos) => {
            return lookup_var(k, v)
                .ok_or_else(|| CliError::domain(*pos, format!("unknown variable '{v}' in {k}")));
        }
        UnitExpr::Add(a, b) => k.add(&eval_unit(k, a)?, &eval_unit(k, b)?),
        UnitExpr::Sub(a, b) => k.sub(&eval_unit(k, a)?, &eval_unit(k, b)?),
        UnitExpr::Mul(a, b) => k.mul(&eval_unit(k, a)?, &eval_unit(k, b)?),
        UnitExpr::Div(a, b) => {
            let d = eval_unit(k, b)?;
            if d.is_zero() {
                return Err(domain("division by zero"));
            }
            k.div(&eval_unit(k, a)?, &d)?
        }
        UnitExpr::Neg(a) => k.neg(&eval_unit(k, a)?),
        UnitExpr::Pow(a, e) => {
            let b = eval_unit(k, a)?;
            if b.is_zero() && *e < 0 {
                return Err(domain("division by zero"));
            }
            k.powi(&b, *e)?
        }
    })
}

/// Polynomial in `var` over `k` from a unit expression.
fn unit_poly(k: &Field, var: &str, u: &UnitExpr) -> Res<Poly> {
    let func = Field::rat(k, var);
    let f = eval_unit(&func, u)?;
    let (n, d) = func.rat_parts(&f);
    if d.deg() != Some(0) {
        return Err(domain(format!("{} is not a polynomial in {var}", func.show(&f))));
    }
    let c = k.inv(&d.c[0])?;
    Ok(k.pscale(n, &c))
}

fn collect_vars(u: &UnitExpr, out: &mut Vec<String>) {
    match u {
        UnitExpr::Int(_) => {}
        UnitExpr::Var(v, _) => {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        UnitExpr::Add(a, b) | UnitExpr::Sub(a, b) | UnitExpr::Mul(a, b) | UnitExpr::Div(a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        UnitExpr::Neg(a) | UnitExpr::Pow(a, _) => collect_vars(a, out),
    }
}

fn expr_vars(e: &Expr, out: &mut Vec<String>) {
    match e {
        Expr::Bracket(u) => collect_vars(u, out),
        Expr::Angle(us) | Expr::Braces(us) => us.iter().for_each(|u| collect_vars(u, out)),
        Expr::Pair(a, b) | Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
            expr_vars(a, out);
            expr_vars(b, out);
        }
        Expr::Neg(a) | Expr::Twist(a, _) => expr_vars(a, out),
        _ => {}
    }
}

fn first_name(e: &Expr) -> Option<(&str, Pos)> {
    match e {
        Expr::Name(n, p) => Some((n.as_str(), *p)),
        Expr::Pair(a, b) | Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => first_name(a).or_else(|| first_name(b)),
        Expr::Neg(a) | Expr::Twist(a, _) => first_name(a),
        _ => None,
    }
}

/// Strip a trailing `*dt`.
fn strip_dt(e: &Expr) -> Option<&Expr> {
    match e {
        Expr::Mul(a, b) if **b == Expr::Dt => Some(a),
        _ => None,
    }
}

fn point_text(k: &Field, var: &str, p: &Point) -> String {
    match p {
        Point::Finite(pi) => format!("({})", k.show_poly(pi, var)),
        Point::Infinity => "inf".to_string(),
    }
}

/// Divisor in the entry syntax of `divisor ... = (p): c, inf: c`.
pub fn show_divisor(d: &QuadraticDivisor) -> String {
    let k = d.curve.base();
    let var = d.curve.func.var().unwrap_or("t");
    let parts: Vec<String> = d
        .entries
        .iter()
        .filter(|(_, c)| !mw::mw_is_zero(c).unwrap_or(false))
        .map(|(p, c)| format!("{}: {}", point_text(k, var, p), mw::show_mw(&c.clone().with_twist(None))))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(", ")
    }
}

fn divisor_json(d: &QuadraticDivisor) -> Json {
    let rows: Vec<Json> = d
        .rows()
        .into_iter()
        .map(|(p, c, t)| {
            let point = match p {
                Some(cs) => json!(cs),
                None => json!("inf"),
            };
            json!({"point": point, "coefficient": c, "twist": t})
        })
        .collect();
    Json::Array(rows)
}

fn invariants_json(k: &Field, inv: &GwInvariants) -> Json {
    let mut m = Map::new();
    m.insert("rank".into(), json!(inv.rank));
    m.insert("disc".into(), inv.disc.as_ref().map(|d| json!(k.show(d))).unwrap_or(Json::Null));
    m.insert("signature".into(), inv.signature.map(|(p, n)| json!([p, n])).unwrap_or(Json::Null));
    let hasse: Map<String, Json> = inv.hasse.iter().map(|(p, s)| (p.to_string(), json!(s))).collect();
    m.insert("hasse".into(), Json::Object(hasse));
    let profile: Vec<Json> = inv
        .residue_profile
        .iter()
        .map(|(place, i)| {
            let residue_field = k.base().cloned().unwrap_or_else(|| k.clone());
            json!({"place": place, "invariants": invariants_json(&residue_field, i)})
        })
        .collect();
    m.insert("residueProfile".into(), Json::Array(profile));
    Json::Object(m)
}

fn record(command: &str, inputs: Vec<(&str, String)>, result: String) -> Record {
    let mut r = Map::new();
    r.insert("command".into(), json!(command));
    let ins: Map<String, Json> = inputs.into_iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    r.insert("inputs".into(), Json::Object(ins));
    r.insert("result".into(), json!(result));
    r
}

impl Session {
    pub fn new() -> Self {
        Session { suite_seed: 1, ..Default::default() }
    }

    /// Execute one statement; commands yield a record, bindings yield none.
    pub fn exec(&mut self, s: &Located) -> Res<Option<Record>> {
        self.exec_stmt(&s.stmt).map_err(|e| e.at(s.pos))
    }

    fn exec_stmt(&mut self, s: &Stmt) -> Res<Option<Record>> {
        match s {
            Stmt::Field { name, spec } => {
                let k = self.field(spec)?;
                self.fields.insert(name.clone(), k.clone());
                self.last_field = Some(k);
                Ok(None)
            }
            Stmt::Ext { name, base, stages, label } => {
                let base = self.field(base)?;
                let (ext, polys) = self.build_ext(&base, stages, label.as_deref().unwrap_or("w"))?;
                self.fields.insert(name.clone(), ext.top.clone());
                self.last_field = Some(ext.top.clone());
                self.exts.insert(name.clone(), ExtEntry { ext, polys });
                Ok(None)
            }
            Stmt::Elem { name, ty, expr } => {
                let ty = self.ty(ty)?;
                let v = self.value(expr, &ty)?;
                self.values.insert(name.clone(), v);
                Ok(None)
            }
            Stmt::Gw { name, field, expr } => {
                let k = match field {
                    Some(f) => self.field(f)?,
                    None => self.last_field.clone().ok_or_else(|| domain("no field declared yet; write gw NAME : FIELD = ..."))?,
                };
                let g = self.gw_expr(expr, &k)?;
                self.values.insert(name.clone(), Value::Gw(g));
                Ok(None)
            }
            Stmt::Divisor { name, def } => {
                let d = self.divisor(def)?;
                self.divisors.insert(name.clone(), d);
                Ok(None)
            }
            Stmt::Eval(op) => {
                let v = self.operand(op)?;
                let mut r = record("eval", vec![("expr", op.to_string())], v.show());
                r.insert("type".into(), json!(v.type_name()));
                Ok(Some(r))
            }
            Stmt::Equal { left, right, ty } => {
                let ty = match ty {
                    Some(t) => self.ty(t)?,
                    None => self.infer(left).or_else(|_| self.infer(right))?,
                };
                let a = self.value(left, &ty)?;
                let b = self.value(right, &ty)?;
                let eq = match (&a, &b) {
                    (Value::Mw(x), Value::Mw(y)) => {
                        let (x, y) = adopt(x.clone(), y.clone());
                        mw::mw_equal(&x, &y)?
                    }
                    (Value::Gw(x), Value::Gw(y)) => {
                        let (x, y) = adopt_gw(x.clone(), y.clone());
                        gw::gw_equal(&x, &y)?
                    }
                    (Value::Km(x), Value::Km(y)) => km::km_equal(x, y)?,
                    _ => return Err(domain("operands of different kinds")),
                };
                let mut r =
                    record("equal", vec![("left", left.to_string()), ("right", right.to_string())], eq.to_string());
                r.insert("type".into(), json!(a.type_name()));
                Ok(Some(r))
            }
            Stmt::Residue { of, at } | Stmt::Specialize { of, at } => {
                let residue = matches!(s, Stmt::Residue { .. });
                let v = self.operand(of)?;
                let place = self.place(v.field(), at)?;
                let out = match (&v, residue) {
                    (Value::Mw(x), true) => Value::Mw(mw::mw_residue(x, &place)?),
                    (Value::Mw(x), false) => Value::Mw(mw::mw_specialize(x, &place)?),
                    (Value::Km(x), true) => Value::Km(km::km_residue(x, &place)?),
                    (Value::Km(x), false) => Value::Km(km::km_specialize(x, &place)?),
                    (Value::Gw(g), true) => Value::Gw(gw::second_residue(g, &place)?),
                    (Value::Gw(g), false) => Value::Gw(gw::first_residue(g, &place)?),
                };
                let cmd = if residue { "residue" } else { "specialize" };
                let mut r = record(cmd, vec![("element", of.to_string()), ("place", at.to_string())], out.show());
                r.insert("type".into(), json!(out.type_name()));
                Ok(Some(r))
            }
            Stmt::Transfer { of, ext, label, bass_tate } => self.transfer(of, ext, label.as_deref(), *bass_tate).map(Some),
            Stmt::Reciprocity { form, over } => self.reciprocity(form, over.as_ref()).map(Some),
            Stmt::Tdiv { of, curve } => {
                let d = self.tdiv(of, curve.as_ref())?;
                let mut r = record("tdiv", vec![("element", of.to_string())], show_divisor(&d));
                r.insert("divisor".into(), divisor_json(&d));
                Ok(Some(r))
            }
            Stmt::Tdeg(name) => {
                let d = self.divisor_named(name)?;
                let m = chowwitt::quadratic_degree(d)?;
                Ok(Some(record("tdeg", vec![("divisor", name.clone())], mw::show_mw(&m))))
            }
            Stmt::Pb1 { divisor, twist } => {
                let mut d = self.divisor_named(divisor)?.clone();
                if let Some(t) = twist {
                    d.curve = Curve::projective(&d.curve.func, *t);
                }
                let c = chowwitt::pb1_class(&d)?;
                let parity = match c {
                    Pb1Class::Even(_) => "even",
                    Pb1Class::Odd(_) => "odd",
                };
                let mut r = record("pb1", vec![("divisor", divisor.clone())], c.show());
                r.insert("parity".into(), json!(parity));
                r.insert("zero".into(), json!(c.is_zero()?));
                Ok(Some(r))
            }
            Stmt::Decompose(op) => {
                let Value::Mw(x) = self.operand(op)? else {
                    return Err(domain("decompose takes a Milnor-Witt element over k(t)"));
                };
                let (c, d) = chowwitt::a1_decompose(&x)?;
                let mut r = record("decompose", vec![("element", op.to_string())], mw::show_mw(&c));
                r.insert("constant".into(), json!(mw::show_mw(&c)));
                r.insert("divisorText".into(), json!(show_divisor(&d)));
                r.insert("divisor".into(), divisor_json(&d));
                Ok(Some(r))
            }
            Stmt::Invariants(op) => {
                let g = match self.operand(op)? {
                    Value::Gw(g) => g,
                    Value::Mw(x) if x.degree == 0 => mw::mw_normalize(&x)?.witt,
                    _ => return Err(domain("invariants take a Grothendieck-Witt class")),
                };
                let inv = gw::gw_invariants(&g)?;
                let mut r = record("invariants", vec![("form", op.to_string())], gw::show_gw(&g));
                r.insert("invariants".into(), invariants_json(&g.field, &inv));
                Ok(Some(r))
            }
            Stmt::RulesSuite { filter, instances, seed } => {
                let seed = seed.unwrap_or(self.suite_seed);
                let n = instances.unwrap_or(50);
                let out = rules::run_suite(seed, n, filter.as_deref())?;
                if out.is_empty() {
                    return Err(domain(format!("no rule matches '{}'", filter.clone().unwrap_or_default())));
                }
                let ok = !out.iter().any(|o| matches!(o.status, rules::RuleStatus::Failed(_)));
                let rows: Vec<Json> = out
                    .iter()
                    .map(|o| {
                        let status = match &o.status {
                            rules::RuleStatus::Passed => "pass".to_string(),
                            rules::RuleStatus::Failed(m) => format!("fail: {m}"),
                            rules::RuleStatus::NotImplemented(why) => format!("not implemented ({why})"),
                        };
                        json!({"rule": o.rule, "instances": o.instances, "failures": o.failures, "status": status})
                    })
                    .collect();
                let mut inputs = vec![("instances", n.to_string()), ("seed", seed.to_string())];
                if let Some(f) = filter {
                    inputs.push(("filter", f.clone()));
                }
                let mut r = record("rules-suite", inputs, if ok { "pass" } else { "fail" }.into());
                r.insert("rules".into(), Json::Array(rows));
                Ok(Some(r))
            }
        }
    }

    // -----------------------------------------------------------------------
    // Fields and types

    fn field(&self, spec: &FieldSpec) -> Res<Field> {
        Ok(match spec {
            FieldSpec::Named(n, pos) => {
                return self.fields.get(n).cloned().ok_or_else(|| CliError::domain(*pos, format!("unbound field '{n}'")))
            }
            FieldSpec::Gf(q) => finite_field(*q)?,
            FieldSpec::Qq => Field::Q,
            FieldSpec::Rat(b, v) => Field::rat(&self.field(b)?, v),
            FieldSpec::Ext(b, v, p) => {
                let base = self.field(b)?;
                self.build_ext(&base, &[(v.clone(), p.clone())], "w")?.0.top
            }
        })
    }

    fn build_ext(&self, base: &Field, stages: &[(String, UnitExpr)], label: &str) -> Res<(Extension, Vec<Poly>)> {
        let mut cur = base.clone();
        let mut polys = Vec::new();
        for (v, u) in stages {
            let f = unit_poly(&cur, v, u)?;
            let monic = cur.pmonic(&f);
            if f.deg().unwrap_or(0) == 0 {
                return Err(domain(format!("stage polynomial in {v} must have positive degree")));
            }
            polys.push(f);
            cur = Field::ext_unchecked(&cur, monic, v)?;
        }
        let vars: Vec<&str> = stages.iter().map(|(v, _)| v.as_str()).collect();
        let ext = Extension::new(base, &polys, &vars, label)?;
        Ok((ext, polys))
    }

    fn ty(&self, t: &TypeSpec) -> Res<Ty> {
        Ok(match t {
            TypeSpec::Kmw(n, k, l) => Ty::Kmw(Some(*n), self.field(k)?, l.clone()),
            TypeSpec::Km(n, k) => Ty::Km(Some(*n), self.field(k)?),
            TypeSpec::Gw(k) => Ty::Gw(self.field(k)?),
        })
    }

    /// Type from the first bound name, else `K^MW` over the last declared field.
    fn infer(&self, e: &Expr) -> Res<Ty> {
        if let Some((n, pos)) = first_name(e) {
            let v = self.values.get(n).ok_or_else(|| CliError::domain(pos, format!("unbound name '{n}'")))?;
            return Ok(match v {
                Value::Mw(x) => Ty::Kmw(None, x.field.clone(), None),
                Value::Gw(g) => Ty::Gw(g.field.clone()),
                Value::Km(x) => Ty::Km(None, x.field.clone()),
            });
        }
        match &self.last_field {
            Some(k) => Ok(Ty::Kmw(None, k.clone(), None)),
            None => Err(domain("cannot infer the field; add `in KMW(n, F)`")),
        }
    }

    fn operand(&self, op: &Operand) -> Res<Value> {
        let ty = match &op.ty {
            Some(t) => self.ty(t)?,
            None => self.infer(&op.expr)?,
        };
        self.value(&op.expr, &ty)
    }

    fn value(&self, e: &Expr, ty: &Ty) -> Res<Value> {
        match ty {
            Ty::Kmw(n, k, label) => {
                let x = match self.mw_expr(e, k, *n)? {
                    Lit::Zero => MwElem::zero(k, n.unwrap_or(0)),
                    Lit::Elem(x) => x,
                };
                if let Some(n) = n {
                    if x.degree != *n {
                        return Err(domain(format!("expression has degree {}, declared degree is {n}", x.degree)));
                    }
                }
                let x = match (label, &x.twist) {
                    (None, _) => x,
                    (Some(l), None) => x.with_twist(Some(l.clone())),
                    (Some(l), Some(m)) if l == m => x,
                    (Some(l), Some(m)) => return Err(domain(format!("twist mismatch: declared {l}, expression has {m}"))),
                };
                Ok(Value::Mw(x))
            }
            Ty::Km(n, k) => {
                let x = match self.km_expr(e, k)? {
                    Lit::Zero => KmElem::zero(k, n.unwrap_or(0)),
                    Lit::Elem(x) => x,
                };
                if let Some(n) = n {
                    if x.degree != *n {
                        return Err(domain(format!("expression has degree {}, declared degree is {n}", x.degree)));
                    }
                }
                Ok(Value::Km(x))
            }
            Ty::Gw(k) => Ok(Value::Gw(self.gw_expr(e, k)?)),
        }
    }

    fn name(&self, n: &str, pos: Pos) -> Res<&Value> {
        self.values.get(n).ok_or_else(|| CliError::domain(pos, format!("unbound name '{n}'")))
    }

    fn check_field(&self, n: &str, pos: Pos, have: &Field, want: &Field) -> Res<()> {
        if have != want {
            return Err(CliError::domain(pos, format!("'{n}' lives over {have}, expected {want}")));
        }
        Ok(())
    }

    fn units(&self, k: &Field, us: &[UnitExpr]) -> Res<Vec<Elem>> {
        let mut out = Vec::new();
        for u in us {
            let x = eval_unit(k, u)?;
            if x.is_zero() {
                return Err(domain(format!("symbols take units; {u} is zero in {k}")));
            }
            out.push(x);
        }
        Ok(out)
    }

    // -----------------------------------------------------------------------
    // Element expressions

    fn mw_expr(&self, e: &Expr, k: &Field, deg: Option<i64>) -> Res<Lit<MwElem>> {
        let elem = |x: MwElem| Ok(Lit::Elem(x));
        match e {
            Expr::Int(0) => Ok(Lit::Zero),
            Expr::Int(n) => elem(MwElem::int(k, *n)),
            Expr::Eta(r) => elem(MwElem::eta_pow(k, *r)),
            Expr::H => elem(MwElem::h(k)),
            Expr::Eps => elem(MwElem::eps(k)),
            Expr::NEps(n) => elem(MwElem::n_eps(k, *n)),
            Expr::Bracket(u) => elem(MwElem::symbol(k, &self.units(k, std::slice::from_ref(u))?)?),
            Expr::Angle(us) => {
                let mut acc = MwElem::zero(k, 0);
                for u in self.units(k, us)? {
                    acc = acc.add(&MwElem::angle(k, &u)?)?;
                }
                elem(acc)
            }
            Expr::Braces(_) => Err(domain("{...} is a Milnor K-theory symbol; use [...] for Milnor-Witt symbols")),
            Expr::Pair(a, b) => {
                let g = self.gw_expr(a, k)?;
                let m = self.km_expr(b, k)?;
                let n = match (&m, deg) {
                    (Lit::Elem(m), _) if !m.terms.is_empty() && m.degree != 0 => m.degree,
                    (_, Some(d)) => d,
                    (Lit::Elem(m), None) => m.degree,
                    (Lit::Zero, None) => return Err(domain("pair(...) needs a declared degree")),
                };
                let m = match m {
                    Lit::Zero => KmElem::zero(k, n),
                    Lit::Elem(m) if m.degree == 0 && n < 0 && m.as_int() == 0 => KmElem::zero(k, n),
                    Lit::Elem(m) => m,
                };
                if m.degree != n {
                    return Err(domain(format!("Milnor component has degree {}, expected {n}", m.degree)));
                }
                if n == 0 && g.rank() != m.as_int() {
                    return Err(domain("pair components disagree: rank differs from the integer part"));
                }
                let twist = g.twist.clone();
                elem(MwElem::from_pair(k, n, NormalizedPair { witt: g, km: m }, twist))
            }
            Expr::Name(n, pos) => match self.name(n, *pos)? {
                Value::Mw(x) => {
                    self.check_field(n, *pos, &x.field, k)?;
                    elem(x.clone())
                }
                Value::Gw(g) => {
                    self.check_field(n, *pos, &g.field, k)?;
                    elem(MwElem::from_gw(g)?)
                }
                Value::Km(_) => Err(CliError::domain(*pos, format!("'{n}' is a Milnor K-theory element"))),
            },
            Expr::Dt => Err(domain("dt only appears in reciprocity forms")),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let x = self.mw_expr(a, k, deg)?;
                let y = self.mw_expr(b, k, deg)?;
                let sub = matches!(e, Expr::Sub(..));
                match (x, y) {
                    (x, Lit::Zero) => Ok(x),
                    (Lit::Zero, Lit::Elem(y)) => elem(if sub { y.neg() } else { y }),
                    (Lit::Elem(x), Lit::Elem(y)) => {
                        let (x, y) = adopt(x, y);
                        elem(if sub { x.sub(&y)? } else { x.add(&y)? })
                    }
                }
            }
            Expr::Neg(a) => Ok(match self.mw_expr(a, k, deg)? {
                Lit::Zero => Lit::Zero,
                Lit::Elem(x) => Lit::Elem(x.neg()),
            }),
            Expr::Mul(a, b) => {
                let x = self.mw_expr(a, k, None)?;
                let y = self.mw_expr(b, k, None)?;
                match (x, y) {
                    (Lit::Elem(x), Lit::Elem(y)) => elem(x.mul(&y)?),
                    _ => Ok(Lit::Zero),
                }
            }
            Expr::Twist(a, l) => Ok(match self.mw_expr(a, k, deg)? {
                Lit::Zero => Lit::Elem(MwElem::zero(k, deg.unwrap_or(0)).with_twist(Some(l.clone()))),
                Lit::Elem(x) => Lit::Elem(x.with_twist(Some(l.clone()))),
            }),
        }
    }

    fn gw_expr(&self, e: &Expr, k: &Field) -> Res<GwElem> {
        Ok(match e {
            Expr::Int(n) => GwElem::from_int(k, *n),
            Expr::H => GwElem::h(k),
            Expr::Eps => GwElem::eps(k),
            Expr::NEps(n) => gw::n_eps(k, *n),
            Expr::Angle(us) => GwElem::diag(k, &self.units(k, us)?)?,
            Expr::Name(n, pos) => match self.name(n, *pos)? {
                Value::Gw(g) => {
                    self.check_field(n, *pos, &g.field, k)?;
                    g.clone()
                }
                Value::Mw(x) if x.degree == 0 => {
                    self.check_field(n, *pos, &x.field, k)?;
                    mw::mw_normalize(x)?.witt.with_twist(x.twist.clone())
                }
                _ => return Err(CliError::domain(*pos, format!("'{n}' is not a Grothendieck-Witt class"))),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let (x, y) = adopt_gw(self.gw_expr(a, k)?, self.gw_expr(b, k)?);
                if matches!(e, Expr::Sub(..)) {
                    x.sub(&y)
                } else {
                    x.add(&y)
                }
            }
            Expr::Neg(a) => self.gw_expr(a, k)?.neg(),
            Expr::Mul(a, b) => self.gw_expr(a, k)?.mul(&self.gw_expr(b, k)?),
            Expr::Twist(a, l) => self.gw_expr(a, k)?.with_twist(Some(l.clone())),
            other => return Err(domain(format!("{other} is not a Grothendieck-Witt expression"))),
        })
    }

    fn km_expr(&self, e: &Expr, k: &Field) -> Res<Lit<KmElem>> {
        let elem = |x: KmElem| Ok(Lit::Elem(x));
        match e {
            Expr::Int(0) => Ok(Lit::Zero),
            Expr::Int(n) => elem(KmElem::int(k, *n)),
            Expr::Braces(us) => elem(KmElem::symbol(k, &self.units(k, us)?)?),
            Expr::Name(n, pos) => match self.name(n, *pos)? {
                Value::Km(x) => {
                    self.check_field(n, *pos, &x.field, k)?;
                    elem(x.clone())
                }
                _ => Err(CliError::domain(*pos, format!("'{n}' is not a Milnor K-theory element"))),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let x = self.km_expr(a, k)?;
                let y = self.km_expr(b, k)?;
                let sub = matches!(e, Expr::Sub(..));
                match (x, y) {
                    (x, Lit::Zero) => Ok(x),
                    (Lit::Zero, Lit::Elem(y)) => elem(if sub { y.neg() } else { y }),
                    (Lit::Elem(x), Lit::Elem(y)) => elem(if sub { x.sub(&y)? } else { x.add(&y)? }),
                }
            }
            Expr::Neg(a) => Ok(match self.km_expr(a, k)? {
                Lit::Zero => Lit::Zero,
                Lit::Elem(x) => Lit::Elem(x.neg()),
            }),
            Expr::Mul(a, b) => match (self.km_expr(a, k)?, self.km_expr(b, k)?) {
                (Lit::Elem(x), Lit::Elem(y)) => elem(x.mul(&y)?),
                _ => Ok(Lit::Zero),
            },
            other => Err(domain(format!("{other} is not a Milnor K-theory expression"))),
        }
    }

    // -----------------------------------------------------------------------
    // Places, transfers, divisors

    fn place(&self, func: &Field, at: &PlaceSpec) -> Res<Place> {
        let Field::Rat(r) = func else {
            return Err(domain(format!("places live on rational function fields, not {func}")));
        };
        match at {
            PlaceSpec::Inf => Ok(Place::infinity(func)?),
            PlaceSpec::Poly(p, u) => {
                let pi = unit_poly(&r.base, &r.var, p)?;
                if !r.base.is_monic(&pi) {
                    return Err(domain(format!("place polynomial {} must be monic", r.base.show_poly(&pi, &r.var))));
                }
                let place = Place::finite_checked(func, &pi)?;
                match u {
                    Some(u) => Ok(place.with_uniformizer(&eval_unit(func, u)?)?),
                    None => Ok(place),
                }
            }
        }
    }

    fn transfer(&self, of: &Operand, name: &str, label: Option<&str>, bass_tate: bool) -> Res<Record> {
        let entry = self.exts.get(name).ok_or_else(|| domain(format!("unbound extension '{name}'")))?;
        let mut ext = entry.ext.clone();
        if let Some(l) = label {
            ext.label = l.to_string();
        }
        let ty = match (&of.ty, first_name(&of.expr)) {
            (Some(t), _) => self.ty(t)?,
            (None, Some(_)) => self.infer(&of.expr)?,
            (None, None) => Ty::Kmw(None, ext.top.clone(), None),
        };
        let v = self.value(&of.expr, &ty)?;
        let out = match v {
            Value::Mw(x) => {
                let x = match &x.twist {
                    None => x.with_twist(Some(ext.label.clone())),
                    Some(_) => x,
                };
                if bass_tate {
                    let chain = self.chain(entry, &ext.label)?;
                    Value::Mw(transfer::mw_transfer_bass_tate(&chain, &x)?)
                } else {
                    Value::Mw(transfer::mw_transfer(&ext, &x)?)
                }
            }
            Value::Gw(g) => {
                if bass_tate {
                    return Err(domain("the Bass-Tate route applies to Milnor-Witt elements"));
                }
                let g = if g.twist.is_none() { g.with_twist(Some(ext.label.clone())) } else { g };
                Value::Gw(sstrace::gw_transfer(&ext, &g)?)
            }
            Value::Km(x) => {
                if bass_tate {
                    return Err(domain("the Bass-Tate route applies to Milnor-Witt elements"));
                }
                Value::Km(km::km_transfer(&x, &ext)?)
            }
        };
        let route = if bass_tate { "bass-tate" } else { "glued" };
        let mut r = record(
            "transfer",
            vec![("element", of.to_string()), ("extension", name.to_string()), ("label", ext.label.clone()), ("route", route.into())],
            out.show(),
        );
        r.insert("type".into(), json!(out.type_name()));
        Ok(r)
    }

    /// Monogenic steps of a declared tower.
    fn chain(&self, entry: &ExtEntry, label: &str) -> Res<Vec<Extension>> {
        let ext = &entry.ext;
        let mut out = Vec::new();
        let mut below = ext.base.clone();
        for (i, f) in entry.polys.iter().enumerate() {
            let step = Extension::new_trusted(&below, std::slice::from_ref(f), &[ext.vars[i].as_str()], label)?;
            below = ext.stages[i].clone();
            out.push(step);
        }
        Ok(out)
    }

    fn reciprocity(&self, form: &Expr, over: Option<&FieldSpec>) -> Res<Record> {
        let sigma_expr = match strip_dt(form) {
            Some(s) => s,
            None if matches!(form, Expr::Name(..)) => form,
            None => return Err(domain("reciprocity takes a form `sigma*dt`")),
        };
        let func = match over {
            Some(spec) => {
                let k = self.field(spec)?;
                if matches!(k, Field::Rat(_)) {
                    k
                } else {
                    let mut vars = Vec::new();
                    expr_vars(sigma_expr, &mut vars);
                    vars.retain(|v| lookup_var(&k, v).is_none());
                    match vars.len() {
                        0 => Field::rat(&k, "t"),
                        1 => Field::rat(&k, &vars[0]),
                        _ => return Err(domain(format!("several candidate variables: {}", vars.join(", ")))),
                    }
                }
            }
            None => match self.infer(sigma_expr)? {
                Ty::Kmw(_, k, _) => k,
                _ => return Err(domain("reciprocity takes a Milnor-Witt element")),
            },
        };
        let sigma = match self.value(sigma_expr, &Ty::Kmw(None, func.clone(), None))? {
            Value::Mw(x) => x,
            _ => unreachable!(),
        };
        let report = transfer::reciprocity_check(&sigma)?;
        let sum = mw::show_mw(&report.sum);
        let mut r = record("reciprocity", vec![("form", form.to_string()), ("field", func.to_string())], sum.clone());
        r.insert("ok".into(), json!(report.ok));
        r.insert("sum".into(), json!(sum));
        let per: Vec<Json> = report
            .per_place
            .iter()
            .map(|p| json!({"place": p.place, "residue": p.residue, "transferred": p.transferred}))
            .collect();
        r.insert("perPlace".into(), Json::Array(per));
        Ok(r)
    }

    fn curve(func: &Field, spec: Option<&CurveSpec>) -> Res<Curve> {
        match spec {
            Some(CurveSpec { kind: CurveKind::A1, twist }) => {
                if twist.unwrap_or(0) != 0 {
                    return Err(domain("line bundles on A1 are trivial; drop the twist"));
                }
                Ok(Curve::affine(func))
            }
            Some(CurveSpec { kind: CurveKind::P1, twist }) => Ok(Curve::projective(func, twist.unwrap_or(-2))),
            None => Ok(Curve::projective(func, -2)),
        }
    }

    fn mw_over_function_field(&self, op: &Operand) -> Res<MwElem> {
        match self.operand(op)? {
            Value::Mw(x) if matches!(x.field, Field::Rat(_)) => Ok(x),
            _ => Err(domain("expected a Milnor-Witt element over a rational function field")),
        }
    }

    fn tdiv(&self, of: &Operand, curve: Option<&CurveSpec>) -> Res<QuadraticDivisor> {
        let x = self.mw_over_function_field(of)?;
        let c = Self::curve(&x.field, curve)?;
        Ok(chowwitt::tdiv(&x, &c)?)
    }

    fn function_field(&self, spec: &FieldSpec) -> Res<Field> {
        let k = self.field(spec)?;
        Ok(if matches!(k, Field::Rat(_)) { k } else { Field::rat(&k, "t") })
    }

    fn divisor(&self, def: &DivisorDef) -> Res<QuadraticDivisor> {
        match def {
            DivisorDef::Tdiv(op, c) => self.tdiv(op, c.as_ref()),
            DivisorDef::Push { value, field, twist } => {
                let func = self.function_field(field)?;
                let k = func.base().unwrap().clone();
                let ty = match &value.ty {
                    Some(t) => self.ty(t)?,
                    None => match first_name(&value.expr) {
                        Some(_) => self.infer(&value.expr)?,
                        None => Ty::Kmw(None, k.clone(), None),
                    },
                };
                let Value::Mw(x) = self.value(&value.expr, &ty)? else {
                    return Err(domain("push takes a Milnor-Witt element"));
                };
                if x.field != k {
                    return Err(domain(format!("pushed element lives over {}, expected {k}", x.field)));
                }
                Ok(chowwitt::push_infinity(&Curve::projective(&func, *twist), &x)?)
            }
            DivisorDef::Explicit { field, curve, degree, entries } => {
                let func = self.function_field(field)?;
                let c = Self::curve(&func, Some(curve))?;
                let mut coefs = Vec::new();
                for (at, e) in entries {
                    let place = self.place(&func, at)?;
                    let point = match &place.kind {
                        fields::PlaceKind::Finite(p) => Point::Finite(p.clone()),
                        fields::PlaceKind::Infinity => Point::Infinity,
                    };
                    if at != &PlaceSpec::Inf {
                        if let PlaceSpec::Poly(_, Some(_)) = at {
                            return Err(domain("divisor points take no uniformizer"));
                        }
                    }
                    let v = match self.mw_expr(e, &place.residue, *degree)? {
                        Lit::Zero => None,
                        Lit::Elem(x) => Some(x),
                    };
                    coefs.push((point, place.residue.clone(), v));
                }
                let q = degree.or_else(|| coefs.iter().find_map(|(_, _, v)| v.as_ref().map(|x| x.degree))).unwrap_or(0);
                let mut d = QuadraticDivisor::zero(&c, q);
                for (p, res, v) in coefs {
                    let x = v.unwrap_or_else(|| MwElem::zero(&res, q));
                    d.add_at(p, &x.with_twist(None))?;
                }
                Ok(d)
            }
        }
    }

    fn divisor_named(&self, name: &str) -> Res<&QuadraticDivisor> {
        self.divisors.get(name).ok_or_else(|| domain(format!("unbound divisor '{name}'")))
    }
}
