//! Text format for OPE algebras.
//!
//! ```text
//! algebra virasoro
//! param c
//! def h = 2
//! field T weight=2 parity=even ghost=0
//! ope T T : 4 -> c/2*one ; 2 -> h*T ; 1 -> D(T)
//! ```
//!
//! `default regular` makes undeclared pairs regular. Right-hand sides may use
//! normal products whose reordering depends on other table entries; entries
//! are evaluated in whatever order lets them resolve.

use std::cell::Cell;

use super::algebra::{OpeAlgebra, Parity};
use super::engine::OpeEngine;
use super::field::{FieldExpr, FieldMonomial, PoleSeries};
use super::OpeError;
use crate::scalar::{Rational, RationalFunction, Var};
use crate::syntax::{eval, parse_ast, parse_scalar, Ast, Env, ParseError};

struct AlgEnv<'e, 'a> {
    engine: &'e OpeEngine<'a>,
    missing: Cell<bool>,
}

impl AlgEnv<'_, '_> {
    fn note(&self, e: OpeError) -> String {
        if matches!(e, OpeError::MissingPair { .. }) {
            self.missing.set(true);
        }
        e.to_string()
    }
}

impl Env for AlgEnv<'_, '_> {
    fn scalar(&self, name: &str) -> Option<RationalFunction> {
        let alg = self.engine.algebra();
        if let Some(v) = alg.def(name) {
            return Some(v.clone());
        }
        alg.params()
            .iter()
            .any(|p| p == name)
            .then(|| RationalFunction::param(name))
    }

    fn field(&self, name: &str) -> Option<FieldExpr> {
        self.engine.algebra().field(name).ok()
    }

    fn nprod(&self, x: &FieldExpr, y: &FieldExpr) -> Result<FieldExpr, String> {
        self.engine.nprod_expr(x, y).map_err(|e| self.note(e))
    }

    fn derivative(&self, x: &FieldExpr, k: u32) -> Result<FieldExpr, String> {
        self.engine.derivative_n(x, k).map_err(|e| self.note(e))
    }
}

/// Parses a field expression such as `N(b_T, D(c_T)) - 2*W` against `engine`'s algebra.
pub fn parse_field_expr(engine: &OpeEngine<'_>, src: &str) -> Result<FieldExpr, ParseError> {
    let ast = parse_ast(src, 1, 1)?;
    let env = AlgEnv {
        engine,
        missing: Cell::new(false),
    };
    Ok(eval(&ast, &env, 1)?.into_field())
}

struct PendingOpe {
    line: usize,
    a: usize,
    b: usize,
    poles: Vec<(u32, Ast)>,
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn col_of(line: &str, part: &str) -> usize {
    let offset = part.as_ptr() as usize - line.as_ptr() as usize;
    line[..offset].chars().count() + 1
}

pub fn parse_algebra(src: &str) -> Result<OpeAlgebra, ParseError> {
    parse_algebra_with(src, &[])
}

/// Like [`parse_algebra`], but `def` lines named in `overrides` take the
/// given value instead of the one in the file.
pub fn parse_algebra_with(
    src: &str,
    overrides: &[(String, RationalFunction)],
) -> Result<OpeAlgebra, ParseError> {
    let mut alg: Option<OpeAlgebra> = None;
    let mut pending: Vec<PendingOpe> = Vec::new();
    let mut default_regular = false;

    for (idx, raw) in src.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(raw);
        let body = line.trim();
        if body.is_empty() {
            continue;
        }
        let col = col_of(raw, body);
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        let perr = |c: usize, m: String| ParseError::new(lineno, c, m);

        if kw == "algebra" {
            if alg.is_some() {
                return Err(perr(col, "duplicate 'algebra' line".into()));
            }
            if rest.is_empty() {
                return Err(perr(col, "missing algebra name".into()));
            }
            alg = Some(OpeAlgebra::new(rest));
            continue;
        }
        let Some(a) = alg.as_mut() else {
            return Err(perr(col, "expected 'algebra NAME' first".into()));
        };
        match kw {
            "param" => {
                for p in rest.split([',', ' ']).filter(|s| !s.is_empty()) {
                    a.add_param(p);
                }
            }
            "def" => {
                let (name, expr) = rest
                    .split_once('=')
                    .ok_or_else(|| perr(col, "expected 'def NAME = EXPR'".into()))?;
                let name = name.trim();
                let value = if let Some((_, v)) = overrides.iter().find(|(n, _)| n == name) {
                    v.clone()
                } else {
                    let mut names: Vec<(String, RationalFunction)> = a.defs().to_vec();
                    names.extend(a.params().iter().map(|p| (p.clone(), RationalFunction::param(p))));
                    parse_scalar(expr, &names, false).map_err(|e| {
                        perr(col_of(raw, expr) + e.col - 1, e.msg)
                    })?
                };
                a.add_def(name, value);
            }
            "field" => {
                let mut words = rest.split_whitespace();
                let name = words
                    .next()
                    .ok_or_else(|| perr(col, "missing field name".into()))?;
                let (mut weight, mut parity, mut ghost) = (None, Parity::Even, 0i32);
                for w in words {
                    let (k, v) = w
                        .split_once('=')
                        .ok_or_else(|| perr(col_of(raw, w), format!("expected key=value, got '{w}'")))?;
                    match k {
                        "weight" => {
                            let q = parse_scalar(v, &[], false)
                                .ok()
                                .and_then(|x| x.as_constant())
                                .ok_or_else(|| perr(col_of(raw, w), format!("bad weight '{v}'")))?;
                            weight = Some(q);
                        }
                        "parity" => {
                            parity = match v {
                                "even" => Parity::Even,
                                "odd" => Parity::Odd,
                                _ => return Err(perr(col_of(raw, w), format!("bad parity '{v}'"))),
                            }
                        }
                        "ghost" => {
                            ghost = v
                                .parse()
                                .map_err(|_| perr(col_of(raw, w), format!("bad ghost number '{v}'")))?
                        }
                        _ => return Err(perr(col_of(raw, w), format!("unknown attribute '{k}'"))),
                    }
                }
                let weight = weight.ok_or_else(|| perr(col, format!("field '{name}' needs a weight")))?;
                a.add_generator(name, weight, parity, ghost)
                    .map_err(|e| perr(col, e.to_string()))?;
            }
            "default" => {
                if rest != "regular" {
                    return Err(perr(col, "expected 'default regular'".into()));
                }
                default_regular = true;
            }
            "ope" => {
                let (pair, poles) = rest
                    .split_once(':')
                    .ok_or_else(|| perr(col, "expected 'ope A B : ...'".into()))?;
                let names: Vec<&str> = pair.split_whitespace().collect();
                if names.len() != 2 {
                    return Err(perr(col, "expected two field names".into()));
                }
                let ia = a
                    .gen(names[0])
                    .map_err(|e| perr(col_of(raw, names[0]), e.to_string()))?;
                let ib = a
                    .gen(names[1])
                    .map_err(|e| perr(col_of(raw, names[1]), e.to_string()))?;
                if pending
                    .iter()
                    .any(|p| (p.a, p.b) == (ia, ib) || (p.a, p.b) == (ib, ia))
                {
                    return Err(perr(col, format!("duplicate ope for {} {}", names[0], names[1])));
                }
                let mut entries = Vec::new();
                for part in poles.split(';') {
                    if part.trim().is_empty() {
                        continue;
                    }
                    let (n, expr) = part
                        .split_once("->")
                        .ok_or_else(|| perr(col_of(raw, part), "expected 'n -> expr'".into()))?;
                    let n: u32 = n
                        .trim()
                        .parse()
                        .ok()
                        .filter(|&n| n >= 1)
                        .ok_or_else(|| perr(col_of(raw, n), format!("bad pole order '{}'", n.trim())))?;
                    if entries.iter().any(|(m, _)| *m == n) {
                        return Err(perr(col_of(raw, part), format!("pole {n} given twice")));
                    }
                    entries.push((n, parse_ast(expr, lineno, col_of(raw, expr))?));
                }
                pending.push(PendingOpe {
                    line: lineno,
                    a: ia,
                    b: ib,
                    poles: entries,
                });
            }
            _ => return Err(perr(col, format!("unknown directive '{kw}'"))),
        }
    }

    let mut alg = alg.ok_or_else(|| ParseError::new(1, 1, "empty algebra file"))?;
    resolve(&mut alg, pending, default_regular)?;
    alg.set_default_regular(default_regular);
    Ok(alg)
}

fn resolve(
    alg: &mut OpeAlgebra,
    mut pending: Vec<PendingOpe>,
    default_regular: bool,
) -> Result<(), ParseError> {
    // Placeholders keep unresolved pairs from looking absent.
    let mut lenient = false;
    while !pending.is_empty() {
        let mut progress = false;
        let mut stuck = Vec::new();
        let mut last_err = None;
        for p in pending {
            let result = {
                let mut scratch = alg.clone();
                scratch.set_default_regular(lenient);
                let engine = OpeEngine::new(&scratch);
                let env = AlgEnv {
                    engine: &engine,
                    missing: Cell::new(false),
                };
                let mut series = PoleSeries::new();
                let mut outcome = Ok(());
                for (n, ast) in &p.poles {
                    match eval(ast, &env, p.line) {
                        Ok(v) => series.set(*n, v.into_field()),
                        Err(e) => {
                            outcome = Err((e, env.missing.get()));
                            break;
                        }
                    }
                }
                outcome.map(|_| series)
            };
            match result {
                Ok(series) => {
                    alg.set_ope(p.a, p.b, series);
                    progress = true;
                }
                Err((e, true)) => {
                    last_err = Some(e);
                    stuck.push(p);
                }
                Err((e, false)) => return Err(e),
            }
        }
        pending = stuck;
        if !progress && !pending.is_empty() {
            if default_regular && !lenient {
                lenient = true;
            } else {
                return Err(last_err.expect("stuck entries carry an error"));
            }
        }
    }
    Ok(())
}

fn show_factor(alg: &OpeAlgebra, f: super::field::Factor) -> String {
    let name = &alg.generator(f.gen as usize).name;
    match f.deriv {
        0 => name.clone(),
        1 => format!("D({name})"),
        k => format!("D{k}({name})"),
    }
}

impl OpeAlgebra {
    /// Right-nested `N(...)` form of a monomial; the unit prints as `one`.
    pub fn show_monomial(&self, m: &FieldMonomial) -> String {
        let fs = m.factors();
        if fs.is_empty() {
            return "one".into();
        }
        let mut s = show_factor(self, fs[fs.len() - 1]);
        for &f in fs[..fs.len() - 1].iter().rev() {
            s = format!("N({}, {s})", show_factor(self, f));
        }
        s
    }

    /// Expression in the input grammar; parses back to the same value.
    pub fn show(&self, e: &FieldExpr) -> String {
        if e.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in e.terms().enumerate() {
            let mono = self.show_monomial(m);
            let term = match c.as_constant() {
                Some(q) if q == Rational::from_integer(1.into()) => mono,
                Some(q) if q == Rational::from_integer((-1).into()) => format!("-{mono}"),
                _ if c.denom().is_one() && c.numer().num_terms() > 1 => format!("({c})*{mono}"),
                _ => format!("{c}*{mono}"),
            };
            if i == 0 {
                out.push_str(&term);
            } else if let Some(t) = term.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(t);
            } else {
                out.push_str(" + ");
                out.push_str(&term);
            }
        }
        out
    }

    pub fn show_series(&self, s: &PoleSeries) -> String {
        s.iter()
            .rev()
            .map(|(n, e)| format!("{n} -> {}", self.show(e)))
            .collect::<Vec<_>>()
            .join(" ; ")
    }

    /// The algebra in the file format. Empty entries are omitted under
    /// `default regular`.
    pub fn to_text(&self) -> String {
        let mut out = format!("algebra {}\n", self.name);
        for p in self.params() {
            out.push_str(&format!("param {p}\n"));
        }
        for (n, v) in self.defs() {
            out.push_str(&format!("def {n} = {v}\n"));
        }
        for g in self.generators() {
            out.push_str(&format!(
                "field {} weight={} parity={} ghost={}\n",
                g.name,
                g.weight,
                g.parity.name(),
                g.ghost
            ));
        }
        if self.default_regular() {
            out.push_str("default regular\n");
        }
        for (&(a, b), s) in self.table() {
            if s.is_regular() && self.default_regular() {
                continue;
            }
            out.push_str(&format!(
                "ope {} {} : {}\n",
                self.generator(a).name,
                self.generator(b).name,
                self.show_series(s)
            ));
        }
        out
    }

    /// Substitutes parameter values everywhere; bound parameters are removed.
    pub fn specialize(&self, bindings: &[(Var, Rational)]) -> Result<OpeAlgebra, OpeError> {
        let mut out = OpeAlgebra::new(&self.name);
        for p in self.params() {
            if !bindings.iter().any(|(v, _)| v.name() == *p) {
                out.add_param(p);
            }
        }
        for (n, v) in self.defs() {
            out.add_def(n, v.eval(bindings)?);
        }
        for g in self.generators() {
            out.add_generator(&g.name, g.weight.clone(), g.parity, g.ghost)?;
        }
        for (&(a, b), s) in self.table() {
            out.set_ope(a, b, s.try_map(|e| e.eval(bindings))?);
        }
        out.set_default_regular(self.default_regular());
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    const VIR: &str = "\
algebra virasoro   # pure Virasoro
param c
field T weight=2 parity=even ghost=0
ope T T : 4 -> c/2*one ; 2 -> 2*T ; 1 -> D(T)
";

    #[test]
    fn parse_and_print_round_trip() {
        let a = parse_algebra(VIR).unwrap();
        let text = a.to_text();
        let b = parse_algebra(&text).unwrap();
        assert_eq!(a, b);
        assert_eq!(b.to_text(), text);
        assert!(text.contains("ope T T : 4 -> 1/2*c*one ; 2 -> 2*T ; 1 -> D(T)"));
    }

    #[test]
    fn entries_resolve_out_of_order() {
        let src = "\
algebra test
param c
field T weight=2 parity=even ghost=0
field X weight=4 parity=even ghost=0
ope X X :
ope T X : 2 -> 4*X ; 1 -> D(X)
ope T T : 4 -> c/2*one ; 2 -> 2*T ; 1 -> D(T)
def k = 3
ope X T : 1 -> k*D(N(T, T))
";
        let e = parse_algebra(src).unwrap_err();
        assert!(e.msg.contains("duplicate"), "{e}");
        let src = src.replace("ope X T : 1 -> k*D(N(T, T))\n", "");
        let src = src.replace("ope X X :", "ope X X : 1 -> D(N(T, T)) - 2*N(D(T), T)");
        let a = parse_algebra(&src).unwrap();
        let engine = OpeEngine::new(&a);
        let t = a.gen("T").unwrap();
        let x = a.gen("X").unwrap();
        let got = a.table()[&(x, x)].pole(1);
        let want = parse_field_expr(&engine, "N(T, D(T)) - N(D(T), T)").unwrap();
        assert_eq!(got, want);
        let d3 = FieldExpr::factor(super::super::field::Factor::new(t, 3));
        assert_eq!(want, d3.scale(&RationalFunction::from_ratio(1, 6)));
        assert_eq!(parse_algebra(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_algebra("algebra x\nfield T weight=2\nope T T : 2 -> 2*Q\n").unwrap_err();
        assert_eq!((e.line, e.col), (3, 18));
        let e = parse_algebra("algebra x\nfield T weight=2 colour=red\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_algebra("field T weight=2\n").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        let e = parse_algebra("algebra x\nfield T weight=2\nfield U weight=1\nope T U : 1 -> N(U, T)\n")
            .unwrap_err();
        assert!(e.msg.contains("no OPE"), "{e}");
    }

    #[test]
    fn default_regular_and_specialize() {
        let src = format!("{VIR}field b weight=2 parity=odd ghost=-1\nfield cg weight=-1 parity=odd ghost=1\ndefault regular\nope b cg : 1 -> one\n");
        let a = parse_algebra(&src).unwrap();
        let b = parse_algebra(&a.to_text()).unwrap();
        assert_eq!(a, b);
        let c = Var::lookup("c").unwrap();
        let s = a.specialize(&[(c, rat(26, 1))]).unwrap();
        assert!(s.params().is_empty());
        let t = s.gen("T").unwrap();
        assert_eq!(
            s.table()[&(t, t)].pole(4),
            FieldExpr::scalar(RationalFunction::from_int(13))
        );
    }

    #[test]
    fn def_overrides() {
        let src = "algebra x\nparam c\ndef a = c + 1\nfield T weight=2\nope T T : 4 -> a*one\n";
        let a = parse_algebra_with(src, &[("a".into(), RationalFunction::from_int(7))]).unwrap();
        let t = a.gen("T").unwrap();
        assert_eq!(a.table()[&(t, t)].pole(4), FieldExpr::scalar(RationalFunction::from_int(7)));
    }
}
