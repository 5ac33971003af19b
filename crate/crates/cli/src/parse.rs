//! Problem documents and polynomial expressions.

use std::collections::BTreeSet;
use std::fmt;

use loopcoh::exact::{int, Rational, SparsePoly, Var};
use loopcoh::jet::BaseRing;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebroidKind {
    Cotangent,
    Tangent,
}

impl AlgebroidKind {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cotangent" => Some(AlgebroidKind::Cotangent),
            "tangent" => Some(AlgebroidKind::Tangent),
            _ => None,
        }
    }
}

impl fmt::Display for AlgebroidKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AlgebroidKind::Cotangent => "cotangent",
            AlgebroidKind::Tangent => "tangent",
        })
    }
}

pub const DEFAULT_WEIGHT: usize = 2;
pub const DEFAULT_BOUND: i64 = 2;
pub const DEFAULT_LC_DEGREE: usize = 2;

/// A validated problem document. Optional fields are `None` when the
/// document leaves them at their defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemSpec {
    pub variety: String,
    pub base: BaseRing,
    /// `(a, b, {x_a, x_b})` with `a < b`, sorted, zero entries dropped.
    pub brackets: Vec<(usize, usize, SparsePoly)>,
    pub algebroid: Option<AlgebroidKind>,
    pub weight: Option<usize>,
    pub bounds: Option<Vec<i64>>,
    pub total: Option<i64>,
    pub lc_degree: Option<usize>,
}

impl ProblemSpec {
    pub fn weight(&self) -> usize {
        self.weight.unwrap_or(DEFAULT_WEIGHT)
    }

    pub fn bounds(&self) -> Vec<i64> {
        self.bounds.clone().unwrap_or_else(|| vec![DEFAULT_BOUND; self.base.m()])
    }

    pub fn lc_degree(&self) -> usize {
        self.lc_degree.unwrap_or(DEFAULT_LC_DEGREE)
    }
}

fn err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Parse {
        line,
        message: message.into(),
    }
}

fn valid_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric()) && !s.starts_with(|c: char| c.is_ascii_digit())
}

pub fn parse_problem(text: &str) -> Result<ProblemSpec, CliError> {
    let mut variety = None;
    let mut base: Option<BaseRing> = None;
    let mut entries: Vec<(usize, usize, SparsePoly, usize)> = Vec::new();
    let mut algebroid = None;
    let mut weight = None;
    let mut bounds = None;
    let mut total = None;
    let mut lc_degree = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let key = words.next().unwrap_or_default();
        let rest: Vec<&str> = words.collect();
        match key {
            "variety" => {
                if rest.len() != 1 {
                    return Err(err(line, "expected: variety <name>"));
                }
                variety = Some(rest[0].to_string());
            }
            "vars" => {
                if base.is_some() {
                    return Err(err(line, "vars declared twice"));
                }
                let mut names = Vec::new();
                let mut inv = Vec::new();
                for w in &rest {
                    let (name, star) = match w.strip_suffix('*') {
                        Some(n) => (n, true),
                        None => (*w, false),
                    };
                    if !valid_ident(name) {
                        return Err(err(line, format!("invalid variable name {w}")));
                    }
                    names.push(name.to_string());
                    inv.push(star);
                }
                if names.is_empty() {
                    return Err(err(line, "no variables declared"));
                }
                base = Some(BaseRing::new(names, inv).map_err(|e| err(line, e.to_string()))?);
            }
            "bracket" => {
                let b = base.as_ref().ok_or_else(|| err(line, "bracket before vars"))?;
                let (lhs, rhs) = content["bracket".len()..]
                    .split_once(':')
                    .ok_or_else(|| err(line, "expected: bracket <v1> <v2> : <expression>"))?;
                let pair: Vec<&str> = lhs.split_whitespace().collect();
                if pair.len() != 2 {
                    return Err(err(line, "expected two variables before ':'"));
                }
                let idx = |n: &str| b.index_of(n).ok_or_else(|| err(line, format!("undeclared variable {n}")));
                let (a, c) = (idx(pair[0])?, idx(pair[1])?);
                if a == c {
                    return Err(err(line, format!("bracket of {} with itself", pair[0])));
                }
                let p = parse_polynomial(rhs, &|n| b.index_of(n).map(|a| (a as Var, b.is_invertible(a))))
                    .map_err(|m| err(line, m))?;
                let (a, c, p) = if a < c { (a, c, p) } else { (c, a, -&p) };
                if let Some(prev) = entries.iter().find(|e| e.0 == a && e.1 == c) {
                    if prev.2 != p {
                        return Err(err(
                            line,
                            format!(
                                "bracket {} {} contradicts line {} (entries must be antisymmetric)",
                                b.name(a),
                                b.name(c),
                                prev.3
                            ),
                        ));
                    }
                    continue;
                }
                entries.push((a, c, p, line));
            }
            "algebroid" => {
                if rest.len() != 1 {
                    return Err(err(line, "expected: algebroid cotangent|tangent"));
                }
                algebroid = Some(AlgebroidKind::parse(rest[0]).ok_or_else(|| err(line, format!("unknown algebroid {}", rest[0])))?);
            }
            "window" => {
                let what = rest.first().copied().unwrap_or_default();
                let nums = &rest[rest.len().min(1)..];
                match what {
                    "weight" => {
                        if nums.len() != 1 {
                            return Err(err(line, "expected: window weight <W>"));
                        }
                        weight = Some(nums[0].parse().map_err(|_| err(line, format!("bad weight {}", nums[0])))?);
                    }
                    "multidegree" => {
                        let (bs, tot) = match nums.iter().position(|w| *w == "total") {
                            Some(i) => {
                                if i + 2 != nums.len() {
                                    return Err(err(line, "expected: total <T> at the end"));
                                }
                                (&nums[..i], Some(nums[i + 1]))
                            }
                            None => (nums, None),
                        };
                        let parsed = bs
                            .iter()
                            .map(|w| w.parse::<i64>().ok().filter(|b| *b >= 0))
                            .collect::<Option<Vec<_>>>()
                            .ok_or_else(|| err(line, "multidegree bounds must be non-negative integers"))?;
                        bounds = Some(parsed);
                        total = match tot {
                            Some(t) => Some(t.parse::<i64>().ok().filter(|t| *t >= 0).ok_or_else(|| err(line, format!("bad total {t}")))?),
                            None => None,
                        };
                    }
                    "lcdegree" => {
                        let d = nums
                            .first()
                            .and_then(|w| w.parse::<usize>().ok())
                            .filter(|d| *d <= 2 && nums.len() == 1)
                            .ok_or_else(|| err(line, "expected: window lcdegree 0|1|2"))?;
                        lc_degree = Some(d);
                    }
                    other => return Err(err(line, format!("unknown window {other}"))),
                }
            }
            other => return Err(err(line, format!("unknown key {other}"))),
        }
    }
    let base = base.ok_or_else(|| CliError::Input("missing vars line".into()))?;
    if let Some(b) = &bounds {
        if b.len() != base.m() {
            return Err(CliError::Input(format!("multidegree window has {} bounds for {} variables", b.len(), base.m())));
        }
    }
    let mut brackets: Vec<(usize, usize, SparsePoly)> =
        entries.into_iter().filter(|e| !e.2.is_zero()).map(|(a, b, p, _)| (a, b, p)).collect();
    brackets.sort_by_key(|e| (e.0, e.1));
    Ok(ProblemSpec {
        variety: variety.unwrap_or_else(|| "unnamed".into()),
        base,
        brackets,
        algebroid,
        weight,
        bounds,
        total,
        lc_degree,
    })
}

/// Prints a document that parses back to the same spec.
pub fn print_problem(spec: &ProblemSpec) -> String {
    let b = &spec.base;
    let mut out = format!("variety {}\n", spec.variety);
    let vars: Vec<String> = (0..b.m())
        .map(|a| format!("{}{}", b.name(a), if b.is_invertible(a) { "*" } else { "" }))
        .collect();
    out += &format!("vars {}\n", vars.join(" "));
    for (a, c, p) in &spec.brackets {
        out += &format!("bracket {} {} : {}\n", b.name(*a), b.name(*c), b.display(p));
    }
    if let Some(k) = spec.algebroid {
        out += &format!("algebroid {k}\n");
    }
    if let Some(w) = spec.weight {
        out += &format!("window weight {w}\n");
    }
    if let Some(bs) = &spec.bounds {
        let s: Vec<String> = bs.iter().map(i64::to_string).collect();
        out += &format!("window multidegree {}", s.join(" "));
        if let Some(t) = spec.total {
            out += &format!(" total {t}");
        }
        out += "\n";
    }
    if let Some(d) = spec.lc_degree {
        out += &format!("window lcdegree {d}\n");
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(i64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Token::Num(lit.parse().map_err(|_| format!("number too large: {lit}"))?));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character '{c}'"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    resolve: &'a dyn Fn(&str) -> Option<(Var, bool)>,
    invertible: BTreeSet<Var>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<SparsePoly, String> {
        let mut acc = if self.eat('-') {
            -&self.term()?
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly, String> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                let d = self.power()?;
                if !d.is_constant() || d.is_zero() {
                    return Err("division only by nonzero constants".into());
                }
                acc = acc.scale(&d.constant_term().recip());
            } else {
                return Ok(acc);
            }
        }
    }

    fn exponent(&mut self) -> Result<i64, String> {
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(if neg { -n } else { n })
            }
            _ => Err("expected an integer exponent".into()),
        }
    }

    fn power(&mut self) -> Result<SparsePoly, String> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = self.exponent()?;
        if e >= 0 {
            return Ok(base.pow(e as u32));
        }
        let inv = base.monomial_inverse().ok_or("negative exponent on a non-monomial")?;
        Ok(inv.pow((-e) as u32))
    }

    fn atom(&mut self) -> Result<SparsePoly, String> {
        match self.peek().cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(SparsePoly::constant(int(n)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                let (v, inv) = (self.resolve)(&name).ok_or_else(|| format!("undeclared variable {name}"))?;
                if inv {
                    self.invertible.insert(v);
                }
                Ok(SparsePoly::var(v))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let p = self.expr()?;
                if !self.eat(')') {
                    return Err("missing ')'".into());
                }
                Ok(p)
            }
            Some(t) => Err(format!("unexpected {t:?}")),
            None => Err("unexpected end of expression".into()),
        }
    }
}

/// Parses a polynomial expression. `resolve` maps a name to its variable id
/// and whether it may carry negative exponents.
pub fn parse_polynomial(s: &str, resolve: &dyn Fn(&str) -> Option<(Var, bool)>) -> Result<SparsePoly, String> {
    let tokens = tokenize(s)?;
    if tokens.is_empty() {
        return Err("empty expression".into());
    }
    let mut p = Parser {
        tokens,
        pos: 0,
        resolve,
        invertible: BTreeSet::new(),
    };
    let out = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(format!("trailing input at token {}", p.pos + 1));
    }
    for (m, _) in out.terms() {
        if m.iter().any(|(v, e)| e < 0 && !p.invertible.contains(&v)) {
            return Err("negative exponent on a variable that is not invertible".into());
        }
    }
    Ok(out)
}

/// Rationals as `p/q`, or `p` when `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TORUS: &str = "\
# algebraic torus
variety torus
vars x* y*
bracket x y : x*y
window weight 2
window multidegree 2 2
";

    #[test]
    fn torus_document() {
        let s = parse_problem(TORUS).unwrap();
        assert_eq!(s.base.m(), 2);
        assert!(s.base.is_invertible(0) && s.base.is_invertible(1));
        assert_eq!(s.brackets, vec![(0, 1, &SparsePoly::var(0) * &SparsePoly::var(1))]);
        assert_eq!(s.weight(), 2);
        assert_eq!(s.bounds(), vec![2, 2]);
    }

    #[test]
    fn missing_entry_is_zero() {
        let s = parse_problem("vars x y z\nbracket x y : z\n").unwrap();
        assert_eq!(s.brackets.len(), 1);
    }

    #[test]
    fn undeclared_variable_names_the_line() {
        let e = parse_problem("vars x y\n\nbracket x z : 1\n").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("line 3") && msg.contains('z'), "{msg}");
        let e = parse_problem("vars x y\nbracket x y : z + 1\n").unwrap_err();
        assert!(e.to_string().contains("undeclared variable z"));
    }

    #[test]
    fn duplicate_entries() {
        assert!(parse_problem("vars x y\nbracket x y : 1\nbracket y x : -1\n").is_ok());
        let e = parse_problem("vars x y\nbracket x y : 1\nbracket y x : 1\n").unwrap_err();
        assert!(e.to_string().contains("line 3"));
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(parse_problem("vars x\nfoo 1\n").is_err());
        assert!(parse_problem("vars x\nwindow height 1\n").is_err());
    }

    #[test]
    fn expressions() {
        let r = |n: &str| match n {
            "x" => Some((0, true)),
            "y" => Some((1, false)),
            _ => None,
        };
        let p = parse_polynomial("(x + 1/2)^2 - 3*y*x^-1", &r).unwrap();
        let x = SparsePoly::var(0);
        let y = SparsePoly::var(1);
        let half = SparsePoly::constant(loopcoh::exact::rat(1, 2));
        let want = &(&(&x + &half) * &(&x + &half)) - &(&y * &x.monomial_inverse().unwrap()).scale(&int(3));
        assert_eq!(p, want);
        assert!(parse_polynomial("y^-1", &r).is_err());
        assert!(parse_polynomial("x +", &r).is_err());
        assert!(parse_polynomial("x / y", &r).is_err());
    }

    #[test]
    fn rationals() {
        assert_eq!(format_rational(&loopcoh::exact::rat(-3, 6)), "-1/2");
        assert_eq!(format_rational(&int(4)), "4");
    }

    #[test]
    fn round_trip() {
        let s = parse_problem("variety so3\nvars x y z\nbracket x y : z\nbracket z y : x\nbracket z x : y\nwindow multidegree 1 1 1 total 2\nwindow lcdegree 1\nalgebroid tangent\n").unwrap();
        assert_eq!(parse_problem(&print_problem(&s)).unwrap(), s);
        let t = parse_problem(TORUS).unwrap();
        assert_eq!(parse_problem(&print_problem(&t)).unwrap(), t);
    }
}
