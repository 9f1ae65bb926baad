//! Recursive-descent parser, one statement per line.

use num_bigint::BigInt;

use crate::ast::*;
use crate::error::CliError;
use crate::lexer::{lex_line, Tok, Token};

const KEYWORDS: &[&str] = &[
    "field", "ext", "elem", "gw", "divisor", "eval", "equal", "residue", "specialize", "transfer", "reciprocity",
    "tdiv", "tdeg", "pb1", "decompose", "invariants", "rules-suite", "in", "at", "from", "with", "via", "over", "on",
    "twist", "filter", "instances", "seed", "uniformizer", "inf", "eta", "h", "eps", "neps", "pair", "dt", "push",
    "degree", "KMW", "KM", "GW", "GF", "QQ", "P1", "A1", "O", "bass-tate",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

/// Parse a whole script.
pub fn parse_script(src: &str) -> Result<Script, CliError> {
    let mut stmts = Vec::new();
    for (i, line) in src.lines().enumerate() {
        if let Some(s) = parse_line(line, i + 1)? {
            stmts.push(s);
        }
    }
    Ok(Script { stmts })
}

/// Parse one line; `None` for blank lines and comments.
pub fn parse_line(line: &str, lineno: usize) -> Result<Option<Located>, CliError> {
    let toks = lex_line(line, lineno)?;
    if toks.is_empty() {
        return Ok(None);
    }
    let end = Pos { line: lineno, col: line.chars().count() + 1 };
    let mut p = Parser { toks, i: 0, end };
    let pos = p.pos();
    let stmt = p.statement()?;
    if let Some(t) = p.peek() {
        return Err(CliError::syntax(t.pos, format!("unexpected {} after statement", describe(&t.tok))));
    }
    Ok(Some(Located { pos, stmt }))
}

/// Parse a standalone element expression (used for round-trips).
pub fn parse_expr(src: &str) -> Result<Expr, CliError> {
    let toks = lex_line(src, 1)?;
    let end = Pos { line: 1, col: src.chars().count() + 1 };
    let mut p = Parser { toks, i: 0, end };
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(CliError::syntax(t.pos, format!("unexpected {}", describe(&t.tok))));
    }
    Ok(e)
}

/// Parse a standalone field element expression.
pub fn parse_unit(src: &str) -> Result<UnitExpr, CliError> {
    let toks = lex_line(src, 1)?;
    let end = Pos { line: 1, col: src.chars().count() + 1 };
    let mut p = Parser { toks, i: 0, end };
    let e = p.unit()?;
    if let Some(t) = p.peek() {
        return Err(CliError::syntax(t.pos, format!("unexpected {}", describe(&t.tok))));
    }
    Ok(e)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("'{s}'"),
        Tok::Int(s) => format!("number {s}"),
        Tok::Sym(c) => format!("'{c}'"),
        Tok::Label(s) => format!("label '{s}'"),
    }
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.i)
    }

    fn pos(&self) -> Pos {
        self.peek().map(|t| t.pos).unwrap_or(self.end)
    }

    fn error<T>(&self, what: &str) -> Result<T, CliError> {
        let found = match self.peek() {
            Some(t) => describe(&t.tok),
            None => "end of line".to_string(),
        };
        Err(CliError::syntax(self.pos(), format!("expected {what}, found {found}")))
    }

    fn is_sym(&self, c: char) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Sym(x), .. }) if *x == c)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Token { tok: Tok::Ident(x), .. }) if x == w)
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if self.is_sym(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        if self.is_word(w) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn sym(&mut self, c: char) -> Result<(), CliError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            self.error(&format!("'{c}'"))
        }
    }

    fn word(&mut self, w: &str) -> Result<(), CliError> {
        if self.eat_word(w) {
            Ok(())
        } else {
            self.error(&format!("'{w}'"))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), CliError> {
        match self.peek().cloned() {
            Some(Token { tok: Tok::Ident(s), pos }) => {
                self.i += 1;
                Ok((s, pos))
            }
            _ => self.error("an identifier"),
        }
    }

    fn name(&mut self) -> Result<(String, Pos), CliError> {
        let pos = self.pos();
        let (s, p) = self.ident()?;
        if is_keyword(&s) {
            return Err(CliError::syntax(pos, format!("'{s}' is a keyword and cannot be used as a name")));
        }
        Ok((s, p))
    }

    fn label(&mut self) -> Result<String, CliError> {
        match self.peek().cloned() {
            Some(Token { tok: Tok::Label(s), .. }) => {
                self.i += 1;
                Ok(s)
            }
            _ => self.error("a twist label"),
        }
    }

    fn uint(&mut self) -> Result<BigInt, CliError> {
        match self.peek().cloned() {
            Some(Token { tok: Tok::Int(s), .. }) => {
                self.i += 1;
                Ok(s.parse().unwrap())
            }
            _ => self.error("a number"),
        }
    }

    fn small(&mut self) -> Result<i64, CliError> {
        let pos = self.pos();
        let n = self.uint()?;
        i64::try_from(n).map_err(|_| CliError::syntax(pos, "number out of range"))
    }

    fn signed(&mut self) -> Result<i64, CliError> {
        let neg = self.eat_sym('-');
        let n = self.small()?;
        Ok(if neg { -n } else { n })
    }

    // -----------------------------------------------------------------------
    // Statements

    fn statement(&mut self) -> Result<Stmt, CliError> {
        let (kw, pos) = self.ident()?;
        match kw.as_str() {
            "field" => {
                let (name, _) = self.name()?;
                self.sym('=')?;
                let spec = self.field_spec()?;
                Ok(Stmt::Field { name, spec })
            }
            "ext" => {
                let (name, _) = self.name()?;
                self.sym('=')?;
                let at = self.pos();
                let mut spec = self.field_spec()?;
                let mut stages = Vec::new();
                while let FieldSpec::Ext(b, v, p) = spec {
                    stages.push((v, p));
                    spec = *b;
                }
                if stages.is_empty() {
                    return Err(CliError::syntax(at, "an extension needs at least one stage [x]/(f)"));
                }
                stages.reverse();
                let label = if self.eat_word("with") { Some(self.label()?) } else { None };
                Ok(Stmt::Ext { name, base: spec, stages, label })
            }
            "elem" => {
                let (name, _) = self.name()?;
                self.sym(':')?;
                let ty = self.type_spec()?;
                self.sym('=')?;
                let expr = self.expr()?;
                Ok(Stmt::Elem { name, ty, expr })
            }
            "gw" => {
                let (name, _) = self.name()?;
                let field = if self.eat_sym(':') { Some(self.field_spec()?) } else { None };
                self.sym('=')?;
                let expr = self.expr()?;
                Ok(Stmt::Gw { name, field, expr })
            }
            "divisor" => self.divisor(),
            "eval" => Ok(Stmt::Eval(self.operand()?)),
            "equal" => {
                let left = self.expr()?;
                self.sym(',')?;
                let right = self.expr()?;
                let ty = if self.eat_word("in") { Some(self.type_spec()?) } else { None };
                Ok(Stmt::Equal { left, right, ty })
            }
            "residue" | "specialize" => {
                let of = self.operand()?;
                self.word("at")?;
                let at = self.place()?;
                Ok(if kw == "residue" { Stmt::Residue { of, at } } else { Stmt::Specialize { of, at } })
            }
            "transfer" => {
                let of = self.operand()?;
                self.word("from")?;
                let (ext, _) = self.name()?;
                let label = if self.eat_word("with") { Some(self.label()?) } else { None };
                let bass_tate = if self.eat_word("via") {
                    self.word("bass-tate")?;
                    true
                } else {
                    false
                };
                Ok(Stmt::Transfer { of, ext, label, bass_tate })
            }
            "reciprocity" => {
                let form = self.expr()?;
                let over = if self.eat_word("over") { Some(self.field_spec()?) } else { None };
                Ok(Stmt::Reciprocity { form, over })
            }
            "tdiv" => {
                let of = self.operand()?;
                let curve = self.curve_opt()?;
                Ok(Stmt::Tdiv { of, curve })
            }
            "tdeg" => Ok(Stmt::Tdeg(self.name()?.0)),
            "pb1" => {
                let (divisor, _) = self.name()?;
                let twist = if self.eat_word("twist") { Some(self.twist_degree()?) } else { None };
                Ok(Stmt::Pb1 { divisor, twist })
            }
            "decompose" => Ok(Stmt::Decompose(self.operand()?)),
            "invariants" => Ok(Stmt::Invariants(self.operand()?)),
            "rules-suite" => {
                let mut filter = None;
                let mut instances = None;
                let mut seed = None;
                loop {
                    if self.eat_word("filter") {
                        let (mut r, _) = self.ident()?;
                        if self.eat_sym('+') {
                            r.push('+');
                        }
                        filter = Some(r);
                    } else if self.eat_word("instances") {
                        instances = Some(self.small()? as usize);
                    } else if self.eat_word("seed") {
                        seed = Some(self.small()? as u64);
                    } else {
                        break;
                    }
                }
                Ok(Stmt::RulesSuite { filter, instances, seed })
            }
            _ => Err(CliError::syntax(pos, format!("unknown command '{kw}'"))),
        }
    }

    fn divisor(&mut self) -> Result<Stmt, CliError> {
        let (name, _) = self.name()?;
        if self.eat_word("on") {
            let kind = self.curve_kind()?;
            self.sym('(')?;
            let field = self.field_spec()?;
            self.sym(')')?;
            let twist = if self.eat_word("twist") { Some(self.twist_degree()?) } else { None };
            let degree = if self.eat_word("degree") { Some(self.signed()?) } else { None };
            self.sym('=')?;
            let mut entries = Vec::new();
            loop {
                let p = self.place()?;
                self.sym(':')?;
                entries.push((p, self.expr()?));
                if !self.eat_sym(',') {
                    break;
                }
            }
            let curve = CurveSpec { kind, twist };
            return Ok(Stmt::Divisor { name, def: DivisorDef::Explicit { field, curve, degree, entries } });
        }
        self.sym('=')?;
        if self.eat_word("tdiv") {
            let op = self.operand()?;
            let c = self.curve_opt()?;
            return Ok(Stmt::Divisor { name, def: DivisorDef::Tdiv(op, c) });
        }
        if self.eat_word("push") {
            let value = self.operand()?;
            self.word("on")?;
            self.word("P1")?;
            self.sym('(')?;
            let field = self.field_spec()?;
            self.sym(')')?;
            self.word("twist")?;
            let twist = self.twist_degree()?;
            return Ok(Stmt::Divisor { name, def: DivisorDef::Push { value, field, twist } });
        }
        self.error("'tdiv', 'push' or 'on'")
    }

    fn curve_kind(&mut self) -> Result<CurveKind, CliError> {
        if self.eat_word("P1") {
            Ok(CurveKind::P1)
        } else if self.eat_word("A1") {
            Ok(CurveKind::A1)
        } else {
            self.error("'P1' or 'A1'")
        }
    }

    fn curve_opt(&mut self) -> Result<Option<CurveSpec>, CliError> {
        if self.eat_word("on") {
            let kind = self.curve_kind()?;
            let twist = if self.eat_word("twist") { Some(self.twist_degree()?) } else { None };
            return Ok(Some(CurveSpec { kind, twist }));
        }
        if self.eat_word("twist") {
            return Ok(Some(CurveSpec { kind: CurveKind::P1, twist: Some(self.twist_degree()?) }));
        }
        Ok(None)
    }

    fn twist_degree(&mut self) -> Result<i64, CliError> {
        self.word("O")?;
        self.sym('(')?;
        let d = self.signed()?;
        self.sym(')')?;
        Ok(d)
    }

    fn operand(&mut self) -> Result<Operand, CliError> {
        let expr = self.expr()?;
        let ty = if self.eat_word("in") { Some(self.type_spec()?) } else { None };
        Ok(Operand { expr, ty })
    }

    fn place(&mut self) -> Result<PlaceSpec, CliError> {
        if self.eat_word("inf") {
            return Ok(PlaceSpec::Inf);
        }
        self.sym('(')?;
        let p = self.unit()?;
        self.sym(')')?;
        let u = if self.eat_word("uniformizer") {
            self.sym('(')?;
            let u = self.unit()?;
            self.sym(')')?;
            Some(u)
        } else {
            None
        };
        Ok(PlaceSpec::Poly(p, u))
    }

    fn type_spec(&mut self) -> Result<TypeSpec, CliError> {
        let (kw, pos) = self.ident()?;
        match kw.as_str() {
            "KMW" | "KM" => {
                self.sym('(')?;
                let n = self.signed()?;
                self.sym(',')?;
                let k = self.field_spec()?;
                self.sym(')')?;
                if kw == "KM" {
                    return Ok(TypeSpec::Km(n, k));
                }
                let label = if self.eat_sym('@') { Some(self.label()?) } else { None };
                Ok(TypeSpec::Kmw(n, k, label))
            }
            "GW" => {
                self.sym('(')?;
                let k = self.field_spec()?;
                self.sym(')')?;
                Ok(TypeSpec::Gw(k))
            }
            _ => Err(CliError::syntax(pos, format!("expected KMW, KM or GW, found '{kw}'"))),
        }
    }

    fn field_spec(&mut self) -> Result<FieldSpec, CliError> {
        let mut spec = if self.eat_word("GF") {
            self.sym('(')?;
            let pos = self.pos();
            let q = self.small()?;
            self.sym(')')?;
            if q < 2 {
                return Err(CliError::syntax(pos, "field size must be at least 2"));
            }
            FieldSpec::Gf(q as u64)
        } else if self.eat_word("QQ") {
            FieldSpec::Qq
        } else {
            let (n, pos) = self.name()?;
            FieldSpec::Named(n, pos)
        };
        loop {
            let rat = self.is_sym('(')
                && matches!(self.toks.get(self.i + 1), Some(Token { tok: Tok::Ident(_), .. }))
                && matches!(self.toks.get(self.i + 2), Some(Token { tok: Tok::Sym(')'), .. }));
            if rat {
                self.i += 1;
                let (v, _) = self.name()?;
                self.i += 1;
                spec = FieldSpec::Rat(Box::new(spec), v);
            } else if self.eat_sym('[') {
                let (v, _) = self.name()?;
                self.sym(']')?;
                self.sym('/')?;
                self.sym('(')?;
                let f = self.unit()?;
                self.sym(')')?;
                spec = FieldSpec::Ext(Box::new(spec), v, f);
            } else {
                return Ok(spec);
            }
        }
    }

    // -----------------------------------------------------------------------
    // Element expressions

    pub fn expr(&mut self) -> Result<Expr, CliError> {
        let mut e = self.term()?;
        loop {
            if self.eat_sym('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat_sym('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, CliError> {
        if self.eat_sym('-') {
            return Ok(Expr::Neg(Box::new(self.product()?)));
        }
        self.product()
    }

    fn product(&mut self) -> Result<Expr, CliError> {
        let mut e = self.factor()?;
        while self.eat_sym('*') {
            e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<Expr, CliError> {
        let Some(t) = self.peek().cloned() else { return self.error("an expression") };
        match t.tok {
            Tok::Int(_) => Ok(Expr::Int(self.small()?)),
            Tok::Sym('[') => {
                self.i += 1;
                let u = self.unit()?;
                self.sym(']')?;
                Ok(Expr::Bracket(u))
            }
            Tok::Sym('<') => {
                self.i += 1;
                let us = self.unit_list()?;
                self.sym('>')?;
                Ok(Expr::Angle(us))
            }
            Tok::Sym('{') => {
                self.i += 1;
                let us = self.unit_list()?;
                self.sym('}')?;
                Ok(Expr::Braces(us))
            }
            Tok::Sym('(') => {
                self.i += 1;
                let e = self.expr()?;
                self.sym(')')?;
                if self.eat_sym('@') {
                    return Ok(Expr::Twist(Box::new(e), self.label()?));
                }
                Ok(e)
            }
            Tok::Ident(w) => {
                self.i += 1;
                match w.as_str() {
                    "eta" => {
                        if self.eat_sym('^') {
                            let pos = self.pos();
                            let r = self.small()?;
                            if r == 0 || r > u32::MAX as i64 {
                                return Err(CliError::syntax(pos, "eta takes a positive exponent"));
                            }
                            Ok(Expr::Eta(r as u32))
                        } else {
                            Ok(Expr::Eta(1))
                        }
                    }
                    "h" => Ok(Expr::H),
                    "eps" => Ok(Expr::Eps),
                    "dt" => Ok(Expr::Dt),
                    "neps" => {
                        self.sym('(')?;
                        let n = self.signed()?;
                        self.sym(')')?;
                        Ok(Expr::NEps(n))
                    }
                    "pair" => {
                        self.sym('(')?;
                        let a = self.expr()?;
                        self.sym(',')?;
                        let b = self.expr()?;
                        self.sym(')')?;
                        Ok(Expr::Pair(Box::new(a), Box::new(b)))
                    }
                    _ if is_keyword(&w) => {
                        Err(CliError::syntax(t.pos, format!("'{w}' is a keyword and cannot start an expression")))
                    }
                    _ => Ok(Expr::Name(w, t.pos)),
                }
            }
            _ => self.error("an expression"),
        }
    }

    fn unit_list(&mut self) -> Result<Vec<UnitExpr>, CliError> {
        let mut us = vec![self.unit()?];
        while self.eat_sym(',') {
            us.push(self.unit()?);
        }
        Ok(us)
    }

    // -----------------------------------------------------------------------
    // Field elements

    fn unit(&mut self) -> Result<UnitExpr, CliError> {
        let mut e = self.uterm()?;
        loop {
            if self.eat_sym('+') {
                e = UnitExpr::Add(Box::new(e), Box::new(self.uterm()?));
            } else if self.eat_sym('-') {
                e = UnitExpr::Sub(Box::new(e), Box::new(self.uterm()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn uterm(&mut self) -> Result<UnitExpr, CliError> {
        if self.eat_sym('-') {
            return Ok(UnitExpr::Neg(Box::new(self.uproduct()?)));
        }
        self.uproduct()
    }

    fn uproduct(&mut self) -> Result<UnitExpr, CliError> {
        let mut e = self.upow()?;
        loop {
            if self.eat_sym('*') {
                e = UnitExpr::Mul(Box::new(e), Box::new(self.upow()?));
            } else if self.eat_sym('/') {
                e = UnitExpr::Div(Box::new(e), Box::new(self.upow()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn upow(&mut self) -> Result<UnitExpr, CliError> {
        let mut a = self.uatom()?;
        while self.eat_sym('^') {
            a = UnitExpr::Pow(Box::new(a), self.signed()?);
        }
        Ok(a)
    }

    fn uatom(&mut self) -> Result<UnitExpr, CliError> {
        match self.peek().cloned() {
            Some(Token { tok: Tok::Int(_), .. }) => Ok(UnitExpr::Int(self.uint()?)),
            Some(Token { tok: Tok::Ident(v), pos }) => {
                self.i += 1;
                Ok(UnitExpr::Var(v, pos))
            }
            Some(Token { tok: Tok::Sym('('), .. }) => {
                self.i += 1;
                let e = self.unit()?;
                self.sym(')')?;
                Ok(e)
            }
            _ => self.error("a field element"),
        }
    }
}
