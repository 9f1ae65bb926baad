//! Syntax tree of `.mwk` scripts and its canonical printer.

use std::fmt;

use num_bigint::BigInt;

/// Source position, 1-based. Ignored by equality so that printed and
/// re-parsed trees compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl PartialEq for Pos {
    fn eq(&self, _: &Pos) -> bool {
        true
    }
}

impl Eq for Pos {}

/// Arithmetic in a field: integers, generator names, `+ - * / ^`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnitExpr {
    Int(BigInt),
    Var(String, Pos),
    Add(Box<UnitExpr>, Box<UnitExpr>),
    Sub(Box<UnitExpr>, Box<UnitExpr>),
    Mul(Box<UnitExpr>, Box<UnitExpr>),
    Div(Box<UnitExpr>, Box<UnitExpr>),
    Neg(Box<UnitExpr>),
    Pow(Box<UnitExpr>, i64),
}

/// Element expressions for `K^MW`, `GW` and `K^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Int(i64),
    Eta(u32),
    H,
    Eps,
    NEps(i64),
    Bracket(UnitExpr),
    Angle(Vec<UnitExpr>),
    Braces(Vec<UnitExpr>),
    Pair(Box<Expr>, Box<Expr>),
    Name(String, Pos),
    Dt,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Twist(Box<Expr>, String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Named(String, Pos),
    Gf(u64),
    Qq,
    Rat(Box<FieldSpec>, String),
    Ext(Box<FieldSpec>, String, UnitExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TypeSpec {
    Kmw(i64, FieldSpec, Option<String>),
    Km(i64, FieldSpec),
    Gw(FieldSpec),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaceSpec {
    Poly(UnitExpr, Option<UnitExpr>),
    Inf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveKind {
    P1,
    A1,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveSpec {
    pub kind: CurveKind,
    pub twist: Option<i64>,
}

/// An element expression with an optional explicit type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operand {
    pub expr: Expr,
    pub ty: Option<TypeSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisorDef {
    Tdiv(Operand, Option<CurveSpec>),
    Push { value: Operand, field: FieldSpec, twist: i64 },
    Explicit { field: FieldSpec, curve: CurveSpec, degree: Option<i64>, entries: Vec<(PlaceSpec, Expr)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stmt {
    Field { name: String, spec: FieldSpec },
    Ext { name: String, base: FieldSpec, stages: Vec<(String, UnitExpr)>, label: Option<String> },
    Elem { name: String, ty: TypeSpec, expr: Expr },
    Gw { name: String, field: Option<FieldSpec>, expr: Expr },
    Divisor { name: String, def: DivisorDef },
    Eval(Operand),
    Equal { left: Expr, right: Expr, ty: Option<TypeSpec> },
    Residue { of: Operand, at: PlaceSpec },
    Specialize { of: Operand, at: PlaceSpec },
    Transfer { of: Operand, ext: String, label: Option<String>, bass_tate: bool },
    Reciprocity { form: Expr, over: Option<FieldSpec> },
    Tdiv { of: Operand, curve: Option<CurveSpec> },
    Tdeg(String),
    Pb1 { divisor: String, twist: Option<i64> },
    Decompose(Operand),
    Invariants(Operand),
    RulesSuite { filter: Option<String>, instances: Option<usize>, seed: Option<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Located {
    pub pos: Pos,
    pub stmt: Stmt,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Script {
    pub stmts: Vec<Located>,
}

impl Stmt {
    /// Command keyword, used as the `command` field of output records.
    pub fn keyword(&self) -> &'static str {
        match self {
            Stmt::Field { .. } => "field",
            Stmt::Ext { .. } => "ext",
            Stmt::Elem { .. } => "elem",
            Stmt::Gw { .. } => "gw",
            Stmt::Divisor { .. } => "divisor",
            Stmt::Eval(_) => "eval",
            Stmt::Equal { .. } => "equal",
            Stmt::Residue { .. } => "residue",
            Stmt::Specialize { .. } => "specialize",
            Stmt::Transfer { .. } => "transfer",
            Stmt::Reciprocity { .. } => "reciprocity",
            Stmt::Tdiv { .. } => "tdiv",
            Stmt::Tdeg(_) => "tdeg",
            Stmt::Pb1 { .. } => "pb1",
            Stmt::Decompose(_) => "decompose",
            Stmt::Invariants(_) => "invariants",
            Stmt::RulesSuite { .. } => "rules-suite",
        }
    }
}

// ---------------------------------------------------------------------------
// Printing

fn unit_prec(u: &UnitExpr) -> u8 {
    match u {
        UnitExpr::Add(..) | UnitExpr::Sub(..) => 1,
        UnitExpr::Neg(_) => 2,
        UnitExpr::Mul(..) | UnitExpr::Div(..) => 3,
        UnitExpr::Pow(..) => 4,
        UnitExpr::Int(n) if n.sign() == num_bigint::Sign::Minus => 2,
        UnitExpr::Int(_) | UnitExpr::Var(..) => 5,
    }
}

fn paren_unit(f: &mut fmt::Formatter<'_>, u: &UnitExpr, min: u8) -> fmt::Result {
    if unit_prec(u) < min {
        write!(f, "({u})")
    } else {
        write!(f, "{u}")
    }
}

impl fmt::Display for UnitExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnitExpr::Int(n) => write!(f, "{n}"),
            UnitExpr::Var(v, _) => write!(f, "{v}"),
            UnitExpr::Add(a, b) => {
                paren_unit(f, a, 1)?;
                write!(f, "+")?;
                paren_unit(f, b, 3)
            }
            UnitExpr::Sub(a, b) => {
                paren_unit(f, a, 1)?;
                write!(f, "-")?;
                paren_unit(f, b, 3)
            }
            UnitExpr::Mul(a, b) => {
                paren_unit(f, a, 3)?;
                write!(f, "*")?;
                paren_unit(f, b, 4)
            }
            UnitExpr::Div(a, b) => {
                paren_unit(f, a, 3)?;
                write!(f, "/")?;
                paren_unit(f, b, 4)
            }
            UnitExpr::Neg(a) => {
                write!(f, "-")?;
                paren_unit(f, a, 3)
            }
            UnitExpr::Pow(a, e) => {
                paren_unit(f, a, 5)?;
                write!(f, "^{e}")
            }
        }
    }
}

fn expr_prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Neg(_) => 2,
        Expr::Int(n) if *n < 0 => 2,
        Expr::Twist(..) => 3,
        Expr::Mul(..) => 4,
        _ => 5,
    }
}

fn paren_expr(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    if expr_prec(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn join_units(us: &[UnitExpr]) -> String {
    us.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Eta(1) => write!(f, "eta"),
            Expr::Eta(r) => write!(f, "eta^{r}"),
            Expr::H => write!(f, "h"),
            Expr::Eps => write!(f, "eps"),
            Expr::NEps(n) => write!(f, "neps({n})"),
            Expr::Bracket(u) => write!(f, "[{u}]"),
            Expr::Angle(us) => write!(f, "<{}>", join_units(us)),
            Expr::Braces(us) => write!(f, "{{{}}}", join_units(us)),
            Expr::Pair(a, b) => write!(f, "pair({a}, {b})"),
            Expr::Name(n, _) => write!(f, "{n}"),
            Expr::Dt => write!(f, "dt"),
            Expr::Add(a, b) => {
                paren_expr(f, a, 1)?;
                write!(f, " + ")?;
                paren_expr(f, b, 3)
            }
            Expr::Sub(a, b) => {
                paren_expr(f, a, 1)?;
                write!(f, " - ")?;
                paren_expr(f, b, 3)
            }
            Expr::Mul(a, b) => {
                paren_expr(f, a, 4)?;
                write!(f, "*")?;
                paren_expr(f, b, 5)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                paren_expr(f, a, 3)
            }
            Expr::Twist(a, l) => write!(f, "({a}) @ {l}"),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Named(n, _) => write!(f, "{n}"),
            FieldSpec::Gf(q) => write!(f, "GF({q})"),
            FieldSpec::Qq => write!(f, "QQ"),
            FieldSpec::Rat(b, v) => write!(f, "{b}({v})"),
            FieldSpec::Ext(b, v, p) => write!(f, "{b}[{v}]/({p})"),
        }
    }
}

impl fmt::Display for TypeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeSpec::Kmw(n, k, None) => write!(f, "KMW({n}, {k})"),
            TypeSpec::Kmw(n, k, Some(l)) => write!(f, "KMW({n}, {k}) @ {l}"),
            TypeSpec::Km(n, k) => write!(f, "KM({n}, {k})"),
            TypeSpec::Gw(k) => write!(f, "GW({k})"),
        }
    }
}

impl fmt::Display for PlaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceSpec::Poly(p, None) => write!(f, "({p})"),
            PlaceSpec::Poly(p, Some(u)) => write!(f, "({p}) uniformizer ({u})"),
            PlaceSpec::Inf => write!(f, "inf"),
        }
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CurveKind::P1 => write!(f, "on P1")?,
            CurveKind::A1 => write!(f, "on A1")?,
        }
        if let Some(d) = self.twist {
            write!(f, " twist O({d})")?;
        }
        Ok(())
    }
}

impl fmt::Display for Operand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)?;
        if let Some(t) = &self.ty {
            write!(f, " in {t}")?;
        }
        Ok(())
    }
}

fn curve_suffix(c: &Option<CurveSpec>) -> String {
    c.as_ref().map(|c| format!(" {c}")).unwrap_or_default()
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Field { name, spec } => write!(f, "field {name} = {spec}"),
            Stmt::Ext { name, base, stages, label } => {
                write!(f, "ext {name} = {base}")?;
                for (v, p) in stages {
                    write!(f, "[{v}]/({p})")?;
                }
                if let Some(l) = label {
                    write!(f, " with {l}")?;
                }
                Ok(())
            }
            Stmt::Elem { name, ty, expr } => write!(f, "elem {name} : {ty} = {expr}"),
            Stmt::Gw { name, field: None, expr } => write!(f, "gw {name} = {expr}"),
            Stmt::Gw { name, field: Some(k), expr } => write!(f, "gw {name} : {k} = {expr}"),
            Stmt::Divisor { name, def } => match def {
                DivisorDef::Tdiv(op, c) => write!(f, "divisor {name} = tdiv {op}{}", curve_suffix(c)),
                DivisorDef::Push { value, field, twist } => {
                    write!(f, "divisor {name} = push {value} on P1({field}) twist O({twist})")
                }
                DivisorDef::Explicit { field, curve, degree, entries } => {
                    let kind = match curve.kind {
                        CurveKind::P1 => "P1",
                        CurveKind::A1 => "A1",
                    };
                    write!(f, "divisor {name} on {kind}({field})")?;
                    if let Some(d) = curve.twist {
                        write!(f, " twist O({d})")?;
                    }
                    if let Some(q) = degree {
                        write!(f, " degree {q}")?;
                    }
                    let es: Vec<String> = entries.iter().map(|(p, e)| format!("{p}: {e}")).collect();
                    write!(f, " = {}", es.join(", "))
                }
            },
            Stmt::Eval(op) => write!(f, "eval {op}"),
            Stmt::Equal { left, right, ty } => {
                write!(f, "equal {left}, {right}")?;
                if let Some(t) = ty {
                    write!(f, " in {t}")?;
                }
                Ok(())
            }
            Stmt::Residue { of, at } => write!(f, "residue {of} at {at}"),
            Stmt::Specialize { of, at } => write!(f, "specialize {of} at {at}"),
            Stmt::Transfer { of, ext, label, bass_tate } => {
                write!(f, "transfer {of} from {ext}")?;
                if let Some(l) = label {
                    write!(f, " with {l}")?;
                }
                if *bass_tate {
                    write!(f, " via bass-tate")?;
                }
                Ok(())
            }
            Stmt::Reciprocity { form, over } => {
                write!(f, "reciprocity {form}")?;
                if let Some(k) = over {
                    write!(f, " over {k}")?;
                }
                Ok(())
            }
            Stmt::Tdiv { of, curve } => write!(f, "tdiv {of}{}", curve_suffix(curve)),
            Stmt::Tdeg(d) => write!(f, "tdeg {d}"),
            Stmt::Pb1 { divisor, twist } => {
                write!(f, "pb1 {divisor}")?;
                if let Some(d) = twist {
                    write!(f, " twist O({d})")?;
                }
                Ok(())
            }
            Stmt::Decompose(op) => write!(f, "decompose {op}"),
            Stmt::Invariants(op) => write!(f, "invariants {op}"),
            Stmt::RulesSuite { filter, instances, seed } => {
                write!(f, "rules-suite")?;
                if let Some(x) = filter {
                    write!(f, " filter {x}")?;
                }
                if let Some(n) = instances {
                    write!(f, " instances {n}")?;
                }
                if let Some(s) = seed {
                    write!(f, " seed {s}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stmts {
            writeln!(f, "{}", s.stmt)?;
        }
        Ok(())
    }
}
