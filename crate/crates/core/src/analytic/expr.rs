//! Immutable scalar expression trees with exact differentiation.
//!
//! An [`Expr`] is a reference-counted tree over named variables. Constructors
//! perform light value-preserving folding (constant arithmetic, additive and
//! multiplicative identities) so derivative trees stay compact; they never
//! reorder function applications or attempt algebraic simplification.
//! Evaluation is deterministic and reports singular points (division by zero,
//! log of a non-positive number, non-finite intermediates) as errors carrying
//! the offending subexpression.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An evaluation point: ordered bindings from variable names to values.
///
/// Bindings are stored in insertion order; [`Point::set`] replaces an
/// existing binding in place, so the order stays stable when a solver
/// rebinds the time variable every step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Point {
    bindings: Vec<(String, f64)>,
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a point from name/value pairs.
    pub fn of(pairs: &[(&str, f64)]) -> Self {
        let mut p = Self::new();
        for (name, value) in pairs {
            p.set(name, *value);
        }
        p
    }

    /// Binds `name` to `value`, replacing any existing binding.
    pub fn set(&mut self, name: &str, value: f64) {
        if let Some(slot) = self.bindings.iter_mut().find(|(n, _)| n == name) {
            slot.1 = value;
        } else {
            self.bindings.push((name.to_owned(), value));
        }
    }

    /// Consuming variant of [`Point::set`] for literal construction.
    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.set(name, value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.bindings
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.bindings.iter().map(|(n, v)| (n.as_str(), *v))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, (n, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{n}={v}")?;
        }
        write!(f, ")")
    }
}

/// Elementary functions available as tree nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Ln,
    Sqrt,
    Abs,
    Sin,
    Cos,
    Tan,
    Sec,
    Arcsin,
    Arccos,
    Sinh,
    Cosh,
    Tanh,
    Coth,
    Sech,
}

impl Func {
    pub const ALL: [Func; 15] = [
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sec,
        Func::Arcsin,
        Func::Arccos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Coth,
        Func::Sech,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sec => "sec",
            Func::Arcsin => "arcsin",
            Func::Arccos => "arccos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Coth => "coth",
            Func::Sech => "sech",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    /// Applies the function, reporting domain violations textually.
    /// The caller wraps failures into [`Error::Singular`].
    fn apply(self, x: f64) -> std::result::Result<f64, String> {
        let v = match self {
            Func::Exp => x.exp(),
            Func::Ln => {
                if x <= 0.0 {
                    return Err(format!("ln of non-positive argument {x}"));
                }
                x.ln()
            }
            Func::Sqrt => {
                if x < 0.0 {
                    return Err(format!("sqrt of negative argument {x}"));
                }
                x.sqrt()
            }
            Func::Abs => x.abs(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sec => {
                let c = x.cos();
                if c == 0.0 {
                    return Err(format!("sec pole at argument {x}"));
                }
                c.recip()
            }
            Func::Arcsin => {
                if !(-1.0..=1.0).contains(&x) {
                    return Err(format!("arcsin argument {x} outside [-1, 1]"));
                }
                x.asin()
            }
            Func::Arccos => {
                if !(-1.0..=1.0).contains(&x) {
                    return Err(format!("arccos argument {x} outside [-1, 1]"));
                }
                x.acos()
            }
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
            Func::Tanh => x.tanh(),
            Func::Coth => {
                let t = x.tanh();
                if t == 0.0 {
                    return Err(format!("coth pole at argument {x}"));
                }
                t.recip()
            }
            Func::Sech => x.cosh().recip(),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(format!("non-finite value {v}"))
        }
    }
}

#[derive(Debug, PartialEq)]
enum Node {
    Const(f64),
    Var(String),
    Add(Vec<Expr>),
    Neg(Expr),
    Mul(Vec<Expr>),
    Div(Expr, Expr),
    Pow(Expr, Expr),
    Fun(Func, Expr),
}

/// Immutable scalar expression over named variables.
///
/// Cheap to clone (`Arc` internally); all operations are pure, so values are
/// safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr(Arc<Node>);

impl Expr {
    fn wrap(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn constant(c: f64) -> Expr {
        Expr::wrap(Node::Const(c))
    }

    /// Variable reference. Names must be non-empty identifiers
    /// (`[A-Za-z_][A-Za-z0-9_]*`) so the s-expression form round-trips.
    pub fn var(name: impl Into<String>) -> Expr {
        let name = name.into();
        debug_assert!(is_identifier(&name), "invalid variable name {name:?}");
        Expr::wrap(Node::Var(name))
    }

    fn as_const(&self) -> Option<f64> {
        match &*self.0 {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    /// n-ary sum. Flattens nested sums, merges constants, drops zeros.
    pub fn add(terms: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(terms.len());
        let mut acc = 0.0;
        for term in terms {
            match &*term.0 {
                Node::Const(c) => acc += c,
                Node::Add(inner) => {
                    for t in inner {
                        match t.as_const() {
                            Some(c) => acc += c,
                            None => flat.push(t.clone()),
                        }
                    }
                }
                _ => flat.push(term),
            }
        }
        if acc != 0.0 || flat.is_empty() {
            flat.push(Expr::constant(acc));
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Expr::wrap(Node::Add(flat))
        }
    }

    pub fn neg(e: Expr) -> Expr {
        match &*e.0 {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::wrap(Node::Neg(e)),
        }
    }

    /// n-ary product. Flattens nested products, folds constants into a
    /// leading coefficient, collapses to zero on an exact zero factor.
    pub fn mul(factors: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(factors.len());
        let mut coeff = 1.0;
        for factor in factors {
            match &*factor.0 {
                Node::Const(c) => coeff *= c,
                Node::Mul(inner) => {
                    for f in inner {
                        match f.as_const() {
                            Some(c) => coeff *= c,
                            None => flat.push(f.clone()),
                        }
                    }
                }
                _ => flat.push(factor),
            }
        }
        if coeff == 0.0 || flat.is_empty() {
            return Expr::constant(coeff);
        }
        if coeff != 1.0 {
            flat.insert(0, Expr::constant(coeff));
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Expr::wrap(Node::Mul(flat))
        }
    }

    pub fn div(num: Expr, den: Expr) -> Expr {
        if let (Some(a), Some(b)) = (num.as_const(), den.as_const()) {
            if b != 0.0 && (a / b).is_finite() {
                return Expr::constant(a / b);
            }
        }
        if den.as_const() == Some(1.0) {
            return num;
        }
        Expr::wrap(Node::Div(num, den))
    }

    pub fn pow(base: Expr, exponent: Expr) -> Expr {
        match exponent.as_const() {
            Some(0.0) => return Expr::constant(1.0),
            Some(1.0) => return base,
            Some(e) => {
                if let Some(b) = base.as_const() {
                    let v = pow_value(b, e);
                    if let Ok(v) = v {
                        return Expr::constant(v);
                    }
                }
            }
            None => {}
        }
        Expr::wrap(Node::Pow(base, exponent))
    }

    pub fn powi(self, n: i32) -> Expr {
        Expr::pow(self, Expr::constant(n as f64))
    }

    pub fn fun(f: Func, arg: Expr) -> Expr {
        if let Some(c) = arg.as_const() {
            if let Ok(v) = f.apply(c) {
                return Expr::constant(v);
            }
        }
        Expr::wrap(Node::Fun(f, arg))
    }

    pub fn exp(self) -> Expr {
        Expr::fun(Func::Exp, self)
    }
    pub fn ln(self) -> Expr {
        Expr::fun(Func::Ln, self)
    }
    pub fn sqrt(self) -> Expr {
        Expr::fun(Func::Sqrt, self)
    }
    pub fn abs(self) -> Expr {
        Expr::fun(Func::Abs, self)
    }
    pub fn sin(self) -> Expr {
        Expr::fun(Func::Sin, self)
    }
    pub fn cos(self) -> Expr {
        Expr::fun(Func::Cos, self)
    }
    pub fn tan(self) -> Expr {
        Expr::fun(Func::Tan, self)
    }
    pub fn sec(self) -> Expr {
        Expr::fun(Func::Sec, self)
    }
    pub fn arcsin(self) -> Expr {
        Expr::fun(Func::Arcsin, self)
    }
    pub fn arccos(self) -> Expr {
        Expr::fun(Func::Arccos, self)
    }
    pub fn sinh(self) -> Expr {
        Expr::fun(Func::Sinh, self)
    }
    pub fn cosh(self) -> Expr {
        Expr::fun(Func::Cosh, self)
    }
    pub fn tanh(self) -> Expr {
        Expr::fun(Func::Tanh, self)
    }
    pub fn coth(self) -> Expr {
        Expr::fun(Func::Coth, self)
    }
    pub fn sech(self) -> Expr {
        Expr::fun(Func::Sech, self)
    }

    fn singular(&self, detail: String) -> Error {
        let mut rendered = self.to_string();
        if rendered.len() > 160 {
            rendered.truncate(157);
            rendered.push_str("...");
        }
        Error::Singular {
            subexpr: rendered,
            detail,
        }
    }

    /// Evaluates at `point`. Every free variable must be bound; any
    /// non-finite intermediate is reported as a singular evaluation.
    pub fn eval(&self, point: &Point) -> Result<f64> {
        match &*self.0 {
            Node::Const(c) => {
                if c.is_finite() {
                    Ok(*c)
                } else {
                    Err(self.singular(format!("non-finite constant {c}")))
                }
            }
            Node::Var(name) => point
                .get(name)
                .ok_or_else(|| Error::UnboundVariable(name.clone())),
            Node::Add(terms) => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.eval(point)?;
                }
                self.check_finite(acc)
            }
            Node::Neg(e) => Ok(-e.eval(point)?),
            Node::Mul(factors) => {
                let mut acc = 1.0;
                for f in factors {
                    acc *= f.eval(point)?;
                }
                self.check_finite(acc)
            }
            Node::Div(num, den) => {
                let d = den.eval(point)?;
                if d == 0.0 {
                    return Err(self.singular("division by zero".into()));
                }
                self.check_finite(num.eval(point)? / d)
            }
            Node::Pow(base, exponent) => {
                let b = base.eval(point)?;
                let e = exponent.eval(point)?;
                pow_value(b, e).map_err(|detail| self.singular(detail))
            }
            Node::Fun(f, arg) => {
                let x = arg.eval(point)?;
                f.apply(x).map_err(|detail| self.singular(detail))
            }
        }
    }

    fn check_finite(&self, v: f64) -> Result<f64> {
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.singular(format!("non-finite value {v}")))
        }
    }

    /// Exact symbolic derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Expr {
        match &*self.0 {
            Node::Const(_) => Expr::constant(0.0),
            Node::Var(name) => Expr::constant(if name == var { 1.0 } else { 0.0 }),
            Node::Add(terms) => Expr::add(terms.iter().map(|t| t.differentiate(var)).collect()),
            Node::Neg(e) => Expr::neg(e.differentiate(var)),
            Node::Mul(factors) => {
                // n-ary product rule: sum over i of (d factor_i) * rest.
                let mut terms = Vec::with_capacity(factors.len());
                for i in 0..factors.len() {
                    let mut parts = Vec::with_capacity(factors.len());
                    for (j, f) in factors.iter().enumerate() {
                        parts.push(if i == j {
                            f.differentiate(var)
                        } else {
                            f.clone()
                        });
                    }
                    terms.push(Expr::mul(parts));
                }
                Expr::add(terms)
            }
            Node::Div(num, den) => {
                let dn = num.differentiate(var);
                let dd = den.differentiate(var);
                Expr::div(
                    Expr::add(vec![
                        Expr::mul(vec![dn, den.clone()]),
                        Expr::neg(Expr::mul(vec![num.clone(), dd])),
                    ]),
                    Expr::pow(den.clone(), Expr::constant(2.0)),
                )
            }
            Node::Pow(base, exponent) => {
                let db = base.differentiate(var);
                match exponent.as_const() {
                    // d a^c = c * a^(c-1) * a'
                    Some(c) => Expr::mul(vec![
                        Expr::constant(c),
                        Expr::pow(base.clone(), Expr::constant(c - 1.0)),
                        db,
                    ]),
                    // d a^b = a^b * (b' ln a + b a'/a)
                    None => {
                        let de = exponent.differentiate(var);
                        Expr::mul(vec![
                            self.clone(),
                            Expr::add(vec![
                                Expr::mul(vec![de, base.clone().ln()]),
                                Expr::div(Expr::mul(vec![exponent.clone(), db]), base.clone()),
                            ]),
                        ])
                    }
                }
            }
            Node::Fun(f, arg) => {
                let da = arg.differentiate(var);
                let a = arg.clone();
                let outer = match f {
                    Func::Exp => a.exp(),
                    Func::Ln => return Expr::div(da, a),
                    Func::Sqrt => return Expr::div(da, Expr::mul(vec![Expr::constant(2.0), a.sqrt()])),
                    // sign(a) written as a/|a|; undefined at a = 0, as is |a|'.
                    Func::Abs => Expr::div(a.clone(), a.abs()),
                    Func::Sin => a.cos(),
                    Func::Cos => Expr::neg(a.sin()),
                    Func::Tan => Expr::add(vec![
                        Expr::constant(1.0),
                        Expr::pow(a.tan(), Expr::constant(2.0)),
                    ]),
                    Func::Sec => Expr::mul(vec![a.clone().sec(), a.tan()]),
                    Func::Arcsin => {
                        return Expr::div(
                            da,
                            Expr::add(vec![
                                Expr::constant(1.0),
                                Expr::neg(Expr::pow(a, Expr::constant(2.0))),
                            ])
                            .sqrt(),
                        )
                    }
                    Func::Arccos => {
                        return Expr::neg(Expr::div(
                            da,
                            Expr::add(vec![
                                Expr::constant(1.0),
                                Expr::neg(Expr::pow(a, Expr::constant(2.0))),
                            ])
                            .sqrt(),
                        ))
                    }
                    Func::Sinh => a.cosh(),
                    Func::Cosh => a.sinh(),
                    Func::Tanh => Expr::add(vec![
                        Expr::constant(1.0),
                        Expr::neg(Expr::pow(a.tanh(), Expr::constant(2.0))),
                    ]),
                    Func::Coth => Expr::add(vec![
                        Expr::constant(1.0),
                        Expr::neg(Expr::pow(a.coth(), Expr::constant(2.0))),
                    ]),
                    Func::Sech => Expr::neg(Expr::mul(vec![a.clone().sech(), a.tanh()])),
                };
                Expr::mul(vec![outer, da])
            }
        }
    }

    /// Replaces variables by expressions, rebuilding (and refolding) the tree.
    pub fn substitute(&self, map: &[(&str, Expr)]) -> Expr {
        match &*self.0 {
            Node::Const(_) => self.clone(),
            Node::Var(name) => map
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| self.clone()),
            Node::Add(terms) => Expr::add(terms.iter().map(|t| t.substitute(map)).collect()),
            Node::Neg(e) => Expr::neg(e.substitute(map)),
            Node::Mul(factors) => Expr::mul(factors.iter().map(|f| f.substitute(map)).collect()),
            Node::Div(n, d) => Expr::div(n.substitute(map), d.substitute(map)),
            Node::Pow(b, e) => Expr::pow(b.substitute(map), e.substitute(map)),
            Node::Fun(f, a) => Expr::fun(*f, a.substitute(map)),
        }
    }

    /// The set of variable names appearing in the tree.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut vars = BTreeSet::new();
        self.collect_vars(&mut vars);
        vars
    }

    fn collect_vars(&self, vars: &mut BTreeSet<String>) {
        match &*self.0 {
            Node::Const(_) => {}
            Node::Var(name) => {
                vars.insert(name.clone());
            }
            Node::Add(terms) | Node::Mul(terms) => {
                for t in terms {
                    t.collect_vars(vars);
                }
            }
            Node::Neg(e) => e.collect_vars(vars),
            Node::Div(a, b) | Node::Pow(a, b) => {
                a.collect_vars(vars);
                b.collect_vars(vars);
            }
            Node::Fun(_, a) => a.collect_vars(vars),
        }
    }

    pub(crate) fn write_sexpr(&self, out: &mut String) {
        match &*self.0 {
            Node::Const(c) => {
                use std::fmt::Write;
                write!(out, "{c}").unwrap();
            }
            Node::Var(name) => {
                out.push_str("(var ");
                out.push_str(name);
                out.push(')');
            }
            Node::Add(terms) => write_list(out, "add", terms),
            Node::Neg(e) => write_list(out, "neg", std::slice::from_ref(e)),
            Node::Mul(factors) => write_list(out, "mul", factors),
            Node::Div(a, b) => write_list(out, "div", &[a.clone(), b.clone()]),
            Node::Pow(a, b) => write_list(out, "pow", &[a.clone(), b.clone()]),
            Node::Fun(f, a) => write_list(out, f.name(), std::slice::from_ref(a)),
        }
    }
}

fn write_list(out: &mut String, head: &str, items: &[Expr]) {
    out.push('(');
    out.push_str(head);
    for item in items {
        out.push(' ');
        item.write_sexpr(out);
    }
    out.push(')');
}

/// Power evaluation shared by `eval` and constructor folding. Integer
/// exponents of modest size use `powi` for accuracy on expressions like
/// (x² + y²)³; everything else goes through `powf` with NaN/∞ checks.
fn pow_value(base: f64, exponent: f64) -> std::result::Result<f64, String> {
    let v = if exponent.fract() == 0.0 && exponent.abs() <= 64.0 {
        base.powi(exponent as i32)
    } else {
        base.powf(exponent)
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("non-finite power {base}^{exponent}"))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write_sexpr(&mut s);
        f.write_str(&s)
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Expr> {
        super::sexpr::parse(s)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! binary_ops {
    ($lhs:ty, $rhs:ty) => {
        impl std::ops::Add<$rhs> for $lhs {
            type Output = Expr;
            fn add(self, rhs: $rhs) -> Expr {
                Expr::add(vec![self.clone(), rhs.clone()])
            }
        }
        impl std::ops::Sub<$rhs> for $lhs {
            type Output = Expr;
            fn sub(self, rhs: $rhs) -> Expr {
                Expr::add(vec![self.clone(), Expr::neg(rhs.clone())])
            }
        }
        impl std::ops::Mul<$rhs> for $lhs {
            type Output = Expr;
            fn mul(self, rhs: $rhs) -> Expr {
                Expr::mul(vec![self.clone(), rhs.clone()])
            }
        }
        impl std::ops::Div<$rhs> for $lhs {
            type Output = Expr;
            fn div(self, rhs: $rhs) -> Expr {
                Expr::div(self.clone(), rhs.clone())
            }
        }
    };
}

binary_ops!(Expr, Expr);
binary_ops!(Expr, &Expr);
binary_ops!(&Expr, Expr);
binary_ops!(&Expr, &Expr);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self.clone())
    }
}
