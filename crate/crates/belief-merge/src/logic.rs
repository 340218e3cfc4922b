//! Propositional formulas: parsing, printing, evaluation and model enumeration.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::MergeError;

/// Default bound on universe size for model enumeration.
pub const DEFAULT_ENUM_CAP: usize = 22;

/// A propositional formula over named variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Var(String),
    True,
    False,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Variable with the given name.
    pub fn var(name: impl Into<String>) -> Formula {
        Formula::Var(name.into())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Positive or negative literal over `name`.
    pub fn literal(name: impl Into<String>, positive: bool) -> Formula {
        let v = Formula::var(name);
        if positive {
            v
        } else {
            Formula::not(v)
        }
    }

    /// Left-folded conjunction; empty input yields `true`.
    pub fn and_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Left-folded disjunction; empty input yields `false`.
    pub fn or_all<I: IntoIterator<Item = Formula>>(items: I) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::False,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    /// Distinct variable names in first-occurrence order.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashMap::new();
        self.collect_variables(&mut out, &mut seen);
        out
    }

    fn collect_variables(&self, out: &mut Vec<String>, seen: &mut HashMap<String, ()>) {
        match self {
            Formula::Var(name) => {
                if seen.insert(name.clone(), ()).is_none() {
                    out.push(name.clone());
                }
            }
            Formula::True | Formula::False => {}
            Formula::Not(a) => a.collect_variables(out, seen),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b) => {
                a.collect_variables(out, seen);
                b.collect_variables(out, seen);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

/// Binding strength; higher binds tighter.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        Formula::Not(..) => 5,
        Formula::Var(_) | Formula::True | Formula::False => 6,
    }
}

fn write_formula(f: &Formula, min_level: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    let lv = level(f);
    if lv < min_level {
        write!(out, "(")?;
        write_formula(f, 0, out)?;
        return write!(out, ")");
    }
    match f {
        Formula::Var(name) => write!(out, "{name}"),
        Formula::True => write!(out, "true"),
        Formula::False => write!(out, "false"),
        Formula::Not(a) => {
            write!(out, "!")?;
            write_formula(a, 5, out)
        }
        // `&` and `|` associate to the left, `->` and `<->` to the right.
        Formula::And(a, b) => {
            write_formula(a, 4, out)?;
            write!(out, " & ")?;
            write_formula(b, 5, out)
        }
        Formula::Or(a, b) => {
            write_formula(a, 3, out)?;
            write!(out, " | ")?;
            write_formula(b, 4, out)
        }
        Formula::Implies(a, b) => {
            write_formula(a, 3, out)?;
            write!(out, " -> ")?;
            write_formula(b, 2, out)
        }
        Formula::Iff(a, b) => {
            write_formula(a, 2, out)?;
            write!(out, " <-> ")?;
            write_formula(b, 1, out)
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, 0, f)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    True,
    False,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::True => write!(f, "`true`"),
            Token::False => write!(f, "`false`"),
            Token::Bang => write!(f, "`!`"),
            Token::Amp => write!(f, "`&`"),
            Token::Pipe => write!(f, "`|`"),
            Token::Arrow => write!(f, "`->`"),
            Token::DArrow => write!(f, "`<->`"),
            Token::LParen => write!(f, "`(`"),
            Token::RParen => write!(f, "`)`"),
            Token::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer {
    tokens: Vec<(Token, u32, u32)>,
    pos: usize,
}

fn lex(input: &str) -> Result<Vec<(Token, u32, u32)>, MergeError> {
    let mut tokens = Vec::new();
    let mut line: u32 = 1;
    let mut col: u32 = 1;
    let mut chars = input.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let advance = |chars: &mut std::iter::Peekable<std::str::Chars>,
                           line: &mut u32,
                           col: &mut u32| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };
        if c.is_whitespace() {
            advance(&mut chars, &mut line, &mut col);
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut name = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    name.push(advance(&mut chars, &mut line, &mut col));
                } else {
                    break;
                }
            }
            let tok = match name.as_str() {
                "true" => Token::True,
                "false" => Token::False,
                _ => Token::Ident(name),
            };
            tokens.push((tok, tline, tcol));
            continue;
        }
        match c {
            '!' => {
                advance(&mut chars, &mut line, &mut col);
                tokens.push((Token::Bang, tline, tcol));
            }
            '&' => {
                advance(&mut chars, &mut line, &mut col);
                tokens.push((Token::Amp, tline, tcol));
            }
            '|' => {
                advance(&mut chars, &mut line, &mut col);
                tokens.push((Token::Pipe, tline, tcol));
            }
            '(' => {
                advance(&mut chars, &mut line, &mut col);
                tokens.push((Token::LParen, tline, tcol));
            }
            ')' => {
                advance(&mut chars, &mut line, &mut col);
                tokens.push((Token::RParen, tline, tcol));
            }
            '-' => {
                advance(&mut chars, &mut line, &mut col);
                if chars.peek() == Some(&'>') {
                    advance(&mut chars, &mut line, &mut col);
                    tokens.push((Token::Arrow, tline, tcol));
                } else {
                    return Err(MergeError::Parse {
                        line: tline,
                        col: tcol,
                        message: "expected `->`".to_string(),
                    });
                }
            }
            '<' => {
                advance(&mut chars, &mut line, &mut col);
                if chars.peek() == Some(&'-') {
                    advance(&mut chars, &mut line, &mut col);
                    if chars.peek() == Some(&'>') {
                        advance(&mut chars, &mut line, &mut col);
                        tokens.push((Token::DArrow, tline, tcol));
                    } else {
                        return Err(MergeError::Parse {
                            line: tline,
                            col: tcol,
                            message: "expected `<->`".to_string(),
                        });
                    }
                } else {
                    return Err(MergeError::Parse {
                        line: tline,
                        col: tcol,
                        message: "expected `<->`".to_string(),
                    });
                }
            }
            other => {
                return Err(MergeError::Parse {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    tokens.push((Token::Eof, line, col));
    Ok(tokens)
}

impl Lexer {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn here(&self) -> (u32, u32) {
        let (_, l, c) = self.tokens[self.pos];
        (l, c)
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Token) -> Result<(), MergeError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let (line, col) = self.here();
            Err(MergeError::Parse {
                line,
                col,
                message: format!("expected {}, found {}", want, self.peek()),
            })
        }
    }
}

/// Parses a formula from the ASCII syntax (`! & | -> <->`, `true`, `false`).
pub fn parse(input: &str) -> Result<Formula, MergeError> {
    let mut lx = Lexer {
        tokens: lex(input)?,
        pos: 0,
    };
    let f = parse_iff(&mut lx)?;
    if *lx.peek() != Token::Eof {
        let (line, col) = lx.here();
        return Err(MergeError::Parse {
            line,
            col,
            message: format!("unexpected {} after formula", lx.peek()),
        });
    }
    Ok(f)
}

fn parse_iff(lx: &mut Lexer) -> Result<Formula, MergeError> {
    let left = parse_implies(lx)?;
    if *lx.peek() == Token::DArrow {
        lx.bump();
        let right = parse_iff(lx)?;
        Ok(Formula::iff(left, right))
    } else {
        Ok(left)
    }
}

fn parse_implies(lx: &mut Lexer) -> Result<Formula, MergeError> {
    let left = parse_or(lx)?;
    if *lx.peek() == Token::Arrow {
        lx.bump();
        let right = parse_implies(lx)?;
        Ok(Formula::implies(left, right))
    } else {
        Ok(left)
    }
}

fn parse_or(lx: &mut Lexer) -> Result<Formula, MergeError> {
    let mut f = parse_and(lx)?;
    while *lx.peek() == Token::Pipe {
        lx.bump();
        let rhs = parse_and(lx)?;
        f = Formula::or(f, rhs);
    }
    Ok(f)
}

fn parse_and(lx: &mut Lexer) -> Result<Formula, MergeError> {
    let mut f = parse_not(lx)?;
    while *lx.peek() == Token::Amp {
        lx.bump();
        let rhs = parse_not(lx)?;
        f = Formula::and(f, rhs);
    }
    Ok(f)
}

fn parse_not(lx: &mut Lexer) -> Result<Formula, MergeError> {
    if *lx.peek() == Token::Bang {
        lx.bump();
        let inner = parse_not(lx)?;
        Ok(Formula::not(inner))
    } else {
        parse_atom(lx)
    }
}

fn parse_atom(lx: &mut Lexer) -> Result<Formula, MergeError> {
    let (line, col) = lx.here();
    match lx.bump() {
        Token::Ident(name) => Ok(Formula::Var(name)),
        Token::True => Ok(Formula::True),
        Token::False => Ok(Formula::False),
        Token::LParen => {
            let inner = parse_iff(lx)?;
            lx.expect(Token::RParen)?;
            Ok(inner)
        }
        other => Err(MergeError::Parse {
            line,
            col,
            message: format!("expected formula, found {other}"),
        }),
    }
}

// ---------------------------------------------------------------------------
// Universe and interpretations
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct UniverseInner {
    names: Vec<String>,
    index: HashMap<String, usize>,
    cap: usize,
}

/// Ordered set of variable names shared by a family of formulas.
///
/// Cheap to clone; interpretations keep a handle to their universe.
#[derive(Debug, Clone)]
pub struct VariableUniverse(Arc<UniverseInner>);

impl PartialEq for VariableUniverse {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.names == other.0.names
    }
}

impl Eq for VariableUniverse {}

impl VariableUniverse {
    /// Builds a universe from explicit names; duplicates are rejected.
    pub fn new(names: Vec<String>) -> Result<VariableUniverse, MergeError> {
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(MergeError::Precondition(format!(
                    "duplicate variable `{n}` in universe"
                )));
            }
        }
        Ok(VariableUniverse(Arc::new(UniverseInner {
            names,
            index,
            cap: DEFAULT_ENUM_CAP,
        })))
    }

    /// Collects variables of `formulas` in first-occurrence order.
    pub fn from_formulas<'a, I: IntoIterator<Item = &'a Formula>>(
        formulas: I,
    ) -> VariableUniverse {
        let mut names = Vec::new();
        let mut seen = HashMap::new();
        for f in formulas {
            f.collect_variables(&mut names, &mut seen);
        }
        VariableUniverse::new(names).expect("first-occurrence collection cannot duplicate")
    }

    /// Same universe with a different enumeration cap.
    pub fn with_cap(&self, cap: usize) -> VariableUniverse {
        VariableUniverse(Arc::new(UniverseInner {
            names: self.0.names.clone(),
            index: self.0.index.clone(),
            cap,
        }))
    }

    pub fn len(&self) -> usize {
        self.0.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.names.is_empty()
    }

    pub fn cap(&self) -> usize {
        self.0.cap
    }

    pub fn names(&self) -> &[String] {
        &self.0.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    /// Errors unless the universe is small enough to enumerate.
    pub fn check_enumerable(&self) -> Result<(), MergeError> {
        if self.len() > self.cap() {
            Err(MergeError::UniverseTooLarge {
                size: self.len(),
                cap: self.cap(),
            })
        } else {
            Ok(())
        }
    }

    /// Number of interpretations (`2^len`); requires enumerability.
    pub fn interpretation_count(&self) -> Result<u64, MergeError> {
        self.check_enumerable()?;
        Ok(1u64 << self.len())
    }
}

/// Total assignment of truth values to a universe's variables.
#[derive(Debug, Clone)]
pub struct Interpretation {
    universe: VariableUniverse,
    values: Vec<bool>,
}

impl Interpretation {
    /// Interpretation from a bit mask; variable `i` reads bit `len-1-i`,
    /// so ascending masks enumerate value vectors in lexicographic order.
    pub fn from_mask(universe: &VariableUniverse, mask: u64) -> Interpretation {
        let n = universe.len();
        let values = (0..n).map(|i| (mask >> (n - 1 - i)) & 1 == 1).collect();
        Interpretation {
            universe: universe.clone(),
            values,
        }
    }

    pub fn from_values(universe: &VariableUniverse, values: Vec<bool>) -> Interpretation {
        assert_eq!(universe.len(), values.len(), "value vector length mismatch");
        Interpretation {
            universe: universe.clone(),
            values,
        }
    }

    pub fn mask(&self) -> u64 {
        let n = self.values.len();
        self.values
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &v)| if v { m | 1 << (n - 1 - i) } else { m })
    }

    pub fn universe(&self) -> &VariableUniverse {
        &self.universe
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn value(&self, name: &str) -> Option<bool> {
        self.universe.index_of(name).map(|i| self.values[i])
    }
}

impl PartialEq for Interpretation {
    fn eq(&self, other: &Self) -> bool {
        self.universe == other.universe && self.values == other.values
    }
}

impl Eq for Interpretation {}

impl PartialOrd for Interpretation {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interpretation {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.universe
            .names()
            .cmp(other.universe.names())
            .then_with(|| self.values.cmp(&other.values))
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, name) in self.universe.names().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{name}={}", if self.values[i] { 1 } else { 0 })?;
        }
        write!(f, "}}")
    }
}

// ---------------------------------------------------------------------------
// Evaluation and model enumeration
// ---------------------------------------------------------------------------

/// Formula with variables resolved to universe indices, for fast mask evaluation.
#[derive(Debug, Clone)]
pub(crate) enum Compiled {
    Var(usize),
    True,
    False,
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
}

pub(crate) fn compile(f: &Formula, u: &VariableUniverse) -> Result<Compiled, MergeError> {
    Ok(match f {
        Formula::Var(name) => Compiled::Var(u.index_of(name).ok_or_else(|| {
            MergeError::Precondition(format!("variable `{name}` not in universe"))
        })?),
        Formula::True => Compiled::True,
        Formula::False => Compiled::False,
        Formula::Not(a) => Compiled::Not(Box::new(compile(a, u)?)),
        Formula::And(a, b) => Compiled::And(Box::new(compile(a, u)?), Box::new(compile(b, u)?)),
        Formula::Or(a, b) => Compiled::Or(Box::new(compile(a, u)?), Box::new(compile(b, u)?)),
        Formula::Implies(a, b) => {
            Compiled::Implies(Box::new(compile(a, u)?), Box::new(compile(b, u)?))
        }
        Formula::Iff(a, b) => Compiled::Iff(Box::new(compile(a, u)?), Box::new(compile(b, u)?)),
    })
}

pub(crate) fn eval_mask(c: &Compiled, n: usize, mask: u64) -> bool {
    match c {
        Compiled::Var(i) => (mask >> (n - 1 - i)) & 1 == 1,
        Compiled::True => true,
        Compiled::False => false,
        Compiled::Not(a) => !eval_mask(a, n, mask),
        Compiled::And(a, b) => eval_mask(a, n, mask) && eval_mask(b, n, mask),
        Compiled::Or(a, b) => eval_mask(a, n, mask) || eval_mask(b, n, mask),
        Compiled::Implies(a, b) => !eval_mask(a, n, mask) || eval_mask(b, n, mask),
        Compiled::Iff(a, b) => eval_mask(a, n, mask) == eval_mask(b, n, mask),
    }
}

/// Evaluates `f` under `i`; all variables of `f` must belong to `i`'s universe.
pub fn evaluate(f: &Formula, i: &Interpretation) -> Result<bool, MergeError> {
    let c = compile(f, i.universe())?;
    Ok(eval_mask(&c, i.universe().len(), i.mask()))
}

/// Masks of the models of `f` within `u`, ascending (lexicographic vectors).
pub(crate) fn model_masks(f: &Formula, u: &VariableUniverse) -> Result<Vec<u64>, MergeError> {
    u.check_enumerable()?;
    let c = compile(f, u)?;
    let n = u.len();
    let mut out = Vec::new();
    for mask in 0..(1u64 << n) {
        if eval_mask(&c, n, mask) {
            out.push(mask);
        }
    }
    Ok(out)
}

/// Models of `f` within `u`, in lexicographic value-vector order.
pub fn models(f: &Formula, u: &VariableUniverse) -> Result<Vec<Interpretation>, MergeError> {
    Ok(model_masks(f, u)?
        .into_iter()
        .map(|m| Interpretation::from_mask(u, m))
        .collect())
}

/// Satisfiability over the formula's own variables.
pub fn is_satisfiable(f: &Formula) -> Result<bool, MergeError> {
    let u = VariableUniverse::from_formulas([f]);
    u.check_enumerable()?;
    let c = compile(f, &u)?;
    let n = u.len();
    Ok((0..(1u64 << n)).any(|mask| eval_mask(&c, n, mask)))
}

/// Does every model of `f` satisfy `g`?
pub fn entails(f: &Formula, g: &Formula) -> Result<bool, MergeError> {
    let u = VariableUniverse::from_formulas([f, g]);
    u.check_enumerable()?;
    let cf = compile(f, &u)?;
    let cg = compile(g, &u)?;
    let n = u.len();
    Ok((0..(1u64 << n)).all(|mask| !eval_mask(&cf, n, mask) || eval_mask(&cg, n, mask)))
}

/// Do `f` and `g` have the same models?
pub fn equivalent(f: &Formula, g: &Formula) -> Result<bool, MergeError> {
    let u = VariableUniverse::from_formulas([f, g]);
    u.check_enumerable()?;
    let cf = compile(f, &u)?;
    let cg = compile(g, &u)?;
    let n = u.len();
    Ok((0..(1u64 << n)).all(|mask| eval_mask(&cf, n, mask) == eval_mask(&cg, n, mask)))
}

/// Disjunctive-normal-form rendering of an explicit model list.
pub fn dnf_string(models: &[Interpretation]) -> String {
    if models.is_empty() {
        return "false".to_string();
    }
    let mut parts = Vec::with_capacity(models.len());
    for m in models {
        if m.universe().is_empty() {
            parts.push("true".to_string());
            continue;
        }
        let lits: Vec<String> = m
            .universe()
            .names()
            .iter()
            .enumerate()
            .map(|(i, name)| {
                if m.values()[i] {
                    name.clone()
                } else {
                    format!("!{name}")
                }
            })
            .collect();
        parts.push(lits.join(" & "));
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        parts
            .into_iter()
            .map(|p| format!("({p})"))
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

// ---------------------------------------------------------------------------
// Syntactic classification
// ---------------------------------------------------------------------------

/// A propositional literal: a variable or its negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: String,
    pub positive: bool,
}

/// Syntactic fragment flags for a formula.
///
/// All clause-level flags are relative to `cnf`; a formula that is not in
/// conjunctive normal form reports every flag false (general formula).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FormulaClass {
    pub cnf: bool,
    pub literal_conjunction: bool,
    pub horn: bool,
    pub krom: bool,
}

impl FormulaClass {
    pub fn is_general(&self) -> bool {
        !self.cnf
    }
}

fn literal_of(f: &Formula) -> Option<Literal> {
    match f {
        Formula::Var(v) => Some(Literal {
            var: v.clone(),
            positive: true,
        }),
        Formula::Not(inner) => match inner.as_ref() {
            Formula::Var(v) => Some(Literal {
                var: v.clone(),
                positive: false,
            }),
            _ => None,
        },
        _ => None,
    }
}

fn clause_of(f: &Formula) -> Option<Vec<Literal>> {
    match f {
        Formula::Or(a, b) => {
            let mut left = clause_of(a)?;
            let right = clause_of(b)?;
            left.extend(right);
            Some(left)
        }
        _ => literal_of(f).map(|l| vec![l]),
    }
}

/// Clause list when the formula is syntactically in conjunctive normal form.
///
/// The constant `true` is the empty clause set, the constant `false` a single
/// empty clause; constants nested below a connective are not CNF.
pub fn cnf_clauses(f: &Formula) -> Option<Vec<Vec<Literal>>> {
    match f {
        Formula::True => Some(vec![]),
        Formula::False => Some(vec![vec![]]),
        Formula::And(a, b) => {
            let mut left = cnf_clauses_inner(a)?;
            left.extend(cnf_clauses_inner(b)?);
            Some(left)
        }
        _ => clause_of(f).map(|c| vec![c]),
    }
}

fn cnf_clauses_inner(f: &Formula) -> Option<Vec<Vec<Literal>>> {
    match f {
        Formula::And(a, b) => {
            let mut left = cnf_clauses_inner(a)?;
            left.extend(cnf_clauses_inner(b)?);
            Some(left)
        }
        _ => clause_of(f).map(|c| vec![c]),
    }
}

/// Syntactic classification of `f` into CNF-based fragments.
pub fn classify(f: &Formula) -> FormulaClass {
    match cnf_clauses(f) {
        None => FormulaClass::default(),
        Some(clauses) => {
            let literal_conjunction = clauses.iter().all(|c| c.len() == 1);
            let horn = clauses
                .iter()
                .all(|c| c.iter().filter(|l| l.positive).count() <= 1);
            let krom = clauses.iter().all(|c| c.len() <= 2);
            FormulaClass {
                cnf: true,
                literal_conjunction,
                horn,
                krom,
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Negation normal form and bounded CNF distribution (for search move scoring)
// ---------------------------------------------------------------------------

fn to_nnf(f: &Formula, negate: bool) -> Formula {
    match (f, negate) {
        (Formula::Var(_), false) => f.clone(),
        (Formula::Var(_), true) => Formula::not(f.clone()),
        (Formula::True, false) | (Formula::False, true) => Formula::True,
        (Formula::True, true) | (Formula::False, false) => Formula::False,
        (Formula::Not(a), n) => to_nnf(a, !n),
        (Formula::And(a, b), false) => Formula::and(to_nnf(a, false), to_nnf(b, false)),
        (Formula::And(a, b), true) => Formula::or(to_nnf(a, true), to_nnf(b, true)),
        (Formula::Or(a, b), false) => Formula::or(to_nnf(a, false), to_nnf(b, false)),
        (Formula::Or(a, b), true) => Formula::and(to_nnf(a, true), to_nnf(b, true)),
        (Formula::Implies(a, b), false) => Formula::or(to_nnf(a, true), to_nnf(b, false)),
        (Formula::Implies(a, b), true) => Formula::and(to_nnf(a, false), to_nnf(b, true)),
        (Formula::Iff(a, b), false) => Formula::and(
            Formula::or(to_nnf(a, true), to_nnf(b, false)),
            Formula::or(to_nnf(a, false), to_nnf(b, true)),
        ),
        (Formula::Iff(a, b), true) => Formula::or(
            Formula::and(to_nnf(a, false), to_nnf(b, true)),
            Formula::and(to_nnf(a, true), to_nnf(b, false)),
        ),
    }
}

fn distribute(f: &Formula, cap: usize) -> Option<Vec<Vec<Literal>>> {
    match f {
        Formula::True => Some(vec![]),
        Formula::False => Some(vec![vec![]]),
        Formula::And(a, b) => {
            let mut left = distribute(a, cap)?;
            let right = distribute(b, cap)?;
            if left.len() + right.len() > cap {
                return None;
            }
            left.extend(right);
            Some(left)
        }
        Formula::Or(a, b) => {
            let left = distribute(a, cap)?;
            let right = distribute(b, cap)?;
            if left.len().saturating_mul(right.len()) > cap {
                return None;
            }
            let mut out = Vec::with_capacity(left.len() * right.len());
            for cl in &left {
                for cr in &right {
                    let mut clause = cl.clone();
                    clause.extend(cr.iter().cloned());
                    clause.sort();
                    clause.dedup();
                    out.push(clause);
                }
            }
            Some(out)
        }
        _ => literal_of(f).map(|l| vec![vec![l]]),
    }
}

/// CNF clause list via negation normal form and distribution, abandoning the
/// conversion when it would exceed `cap` clauses.
pub fn distributed_cnf(f: &Formula, cap: usize) -> Option<Vec<Vec<Literal>>> {
    distribute(&to_nnf(f, false), cap)
}

/// Top-level conjuncts of a formula (the formula itself when not a conjunction).
pub fn conjuncts(f: &Formula) -> Vec<&Formula> {
    let mut out = Vec::new();
    fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
        match f {
            Formula::And(a, b) => {
                walk(a, out);
                walk(b, out);
            }
            other => out.push(other),
        }
    }
    walk(f, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn parses_precedence_and_associativity() {
        assert_eq!(p("!a & b"), Formula::and(Formula::not(Formula::var("a")), Formula::var("b")));
        assert_eq!(
            p("a | b & c"),
            Formula::or(Formula::var("a"), Formula::and(Formula::var("b"), Formula::var("c")))
        );
        assert_eq!(
            p("a -> b -> c"),
            Formula::implies(
                Formula::var("a"),
                Formula::implies(Formula::var("b"), Formula::var("c"))
            )
        );
        assert_eq!(
            p("a <-> b <-> c"),
            Formula::iff(Formula::var("a"), Formula::iff(Formula::var("b"), Formula::var("c")))
        );
        assert_eq!(
            p("a & b & c"),
            Formula::and(Formula::and(Formula::var("a"), Formula::var("b")), Formula::var("c"))
        );
        assert_eq!(
            p("a -> b | c"),
            Formula::implies(Formula::var("a"), Formula::or(Formula::var("b"), Formula::var("c")))
        );
    }

    #[test]
    fn parse_reports_position() {
        let err = parse("a &\n& b").unwrap_err();
        match err {
            MergeError::Parse { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 1);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse("").is_err());
        assert!(parse("a b").is_err());
        assert!(parse("(a").is_err());
        assert!(parse("a <- b").is_err());
    }

    #[test]
    fn print_parse_fixpoint() {
        let samples = [
            "a",
            "true",
            "false",
            "!a",
            "!!a",
            "a & b",
            "a & (b & c)",
            "a & b & c",
            "(a | b) & c",
            "a | b & c",
            "a -> b -> c",
            "(a -> b) -> c",
            "a <-> b <-> c",
            "(a <-> b) <-> c",
            "!(a & b)",
            "!(a -> b)",
            "a & !b | c -> d <-> e",
            "_x1 & Y_2",
        ];
        for s in samples {
            let f = p(s);
            let printed = f.to_string();
            assert_eq!(p(&printed), f, "fixpoint failed for `{s}` -> `{printed}`");
        }
    }

    #[test]
    fn first_occurrence_universe_order() {
        let f1 = p("b & a");
        let f2 = p("c | a");
        let u = VariableUniverse::from_formulas([&f1, &f2]);
        assert_eq!(u.names(), ["b", "a", "c"]);
    }

    #[test]
    fn models_are_lexicographic() {
        let f = p("a");
        let u = VariableUniverse::new(vec!["a".into(), "b".into()]).unwrap();
        let ms = models(&f, &u).unwrap();
        let vecs: Vec<Vec<bool>> = ms.iter().map(|m| m.values().to_vec()).collect();
        assert_eq!(vecs, [[true, false], [true, true]]);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let names: Vec<String> = (0..23).map(|i| format!("v{i}")).collect();
        let u = VariableUniverse::new(names).unwrap();
        assert!(matches!(
            models(&Formula::True, &u),
            Err(MergeError::UniverseTooLarge { .. })
        ));
        let small = u.with_cap(23);
        assert!(models(&Formula::True, &small).is_ok());
    }

    #[test]
    fn semantic_queries() {
        assert!(is_satisfiable(&p("a & !b")).unwrap());
        assert!(!is_satisfiable(&p("a & !a")).unwrap());
        assert!(entails(&p("a & b"), &p("a | c")).unwrap());
        assert!(!entails(&p("a | b"), &p("a")).unwrap());
        assert!(equivalent(&p("a -> b"), &p("!a | b")).unwrap());
        assert!(!equivalent(&p("a"), &p("b")).unwrap());
    }

    #[test]
    fn classification_flags() {
        let lc = classify(&p("a & !b & c"));
        assert!(lc.cnf && lc.literal_conjunction && lc.horn && lc.krom);

        let horn = classify(&p("(!a | !b | c) & !d"));
        assert!(horn.cnf && horn.horn && !horn.krom && !horn.literal_conjunction);

        let krom = classify(&p("(a | b) & (!b | c)"));
        assert!(krom.cnf && krom.krom && !krom.literal_conjunction);

        let general = classify(&p("a -> b"));
        assert!(general.is_general());
        assert!(classify(&p("a & (b | (c & d))")).is_general());

        let t = classify(&Formula::True);
        assert!(t.cnf && t.literal_conjunction && t.horn && t.krom);
        let f = classify(&Formula::False);
        assert!(f.cnf && !f.literal_conjunction && f.horn && f.krom);
    }

    #[test]
    fn distributed_cnf_matches_semantics() {
        let f = p("(a & b) | (c & d)");
        let clauses = distributed_cnf(&f, 64).unwrap();
        let rebuilt = Formula::and_all(clauses.into_iter().map(|c| {
            Formula::or_all(c.into_iter().map(|l| Formula::literal(l.var, l.positive)))
        }));
        assert!(equivalent(&f, &rebuilt).unwrap());

        let iff = p("a <-> (b <-> c)");
        let clauses = distributed_cnf(&iff, 64).unwrap();
        let rebuilt = Formula::and_all(clauses.into_iter().map(|c| {
            Formula::or_all(c.into_iter().map(|l| Formula::literal(l.var, l.positive)))
        }));
        assert!(equivalent(&iff, &rebuilt).unwrap());
    }

    #[test]
    fn dnf_rendering() {
        let f = p("a & b | a & !b");
        let u = VariableUniverse::from_formulas([&f]);
        let ms = models(&f, &u).unwrap();
        let dnf = dnf_string(&ms);
        assert_eq!(dnf, "(a & !b) | (a & b)");
        assert_eq!(dnf_string(&[]), "false");
    }
}
