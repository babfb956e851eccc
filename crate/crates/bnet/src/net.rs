//! Boolean networks: textual definitions, expression ASTs, and compilation
//! to structure matrices and the transition matrix.
//!
//! # Text format
//!
//! A network is defined one statement per line:
//!
//! ```text
//! # comments run to end of line
//! vars: x1 x2 x3 x4          # optional; fixes variable order
//! x1' = (x1 & x2 & !x4) | (!x1 & x2)
//! x2' = x2 | (x3 <-> x4)
//! ...
//! out y1 = x1 & !x2          # zero or more output functions
//! ```
//!
//! Operators, tightest first: `!`, `&`, `^`, `|`, then `->`/`<->` together
//! on the lowest tier. The binary tiers associate to the left except the
//! lowest, which associates to the right (`a -> b -> c` is
//! `a -> (b -> c)`). `true` and `false` are literals; parentheses group.
//!
//! When the `vars:` header is omitted, variables are declared by their
//! update lines in order of appearance. Every declared variable needs
//! exactly one update rule, and every name used on a right-hand side must
//! be a declared state variable.
//!
//! # State indexing
//!
//! The vector form of a state assigns `true ↦ δ_2^1`, `false ↦ δ_2^2` and
//! stacks the variables in declaration order by semi-tensor product, so a
//! state maps to a basis vector of dimension 2^n. [`state_index`] gives the
//! resulting 1-based index: all-true is state 1, all-false is state 2^n,
//! and flipping variable k to false adds 2^(n−k). [`index_to_state`]
//! inverts it.
//!
//! The per-update structure matrices (2 × 2^n logical matrices whose
//! column j is the update's truth value on state j) combine by the
//! column-wise product into the network's transition matrix M, the 2^n ×
//! 2^n logical matrix with `M.col(j) = state_index(step(state j))`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::matrix::LogicalMatrix;

/// Default upper bound on the number of state variables (the state space is
/// 2^n; past twenty variables the dense state enumeration stops being a
/// desk-scale object).
pub const DEFAULT_MAX_VARS: usize = 20;

// ============================================================================
// Expressions
// ============================================================================

/// A Boolean expression over the state variables of a network.
///
/// Variables are stored as positions into the owning network's variable
/// list, so an `Expr` is only meaningful together with the network that
/// produced it (see [`BooleanNetwork::parse_expression`] and
/// [`BooleanNetwork::render_expression`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// `true` or `false`.
    Const(bool),
    /// Variable by position in the network's declaration order (0-based).
    Var(usize),
    /// `!e`
    Not(Box<Expr>),
    /// `a & b`
    And(Box<Expr>, Box<Expr>),
    /// `a | b`
    Or(Box<Expr>, Box<Expr>),
    /// `a ^ b`
    Xor(Box<Expr>, Box<Expr>),
    /// `a -> b`, equivalent to `!a | b`.
    Implies(Box<Expr>, Box<Expr>),
    /// `a <-> b`, true when both sides agree.
    Iff(Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluates the expression under the given assignment, indexed by
    /// variable position.
    ///
    /// # Panics
    ///
    /// Panics if a variable position is out of range for `state`.
    pub fn eval(&self, state: &[bool]) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Var(i) => state[*i],
            Expr::Not(e) => !e.eval(state),
            Expr::And(a, b) => a.eval(state) && b.eval(state),
            Expr::Or(a, b) => a.eval(state) || b.eval(state),
            Expr::Xor(a, b) => a.eval(state) ^ b.eval(state),
            Expr::Implies(a, b) => !a.eval(state) || b.eval(state),
            Expr::Iff(a, b) => a.eval(state) == b.eval(state),
        }
    }

    /// Binding strength used by the parser and printer; higher binds
    /// tighter. `->`/`<->` share the lowest tier.
    fn precedence(&self) -> u8 {
        match self {
            Expr::Implies(..) | Expr::Iff(..) => 1,
            Expr::Or(..) => 2,
            Expr::Xor(..) => 3,
            Expr::And(..) => 4,
            Expr::Not(..) => 5,
            Expr::Const(..) | Expr::Var(..) => 6,
        }
    }
}

// ============================================================================
// State indexing
// ============================================================================

/// 1-based index of a state in the stacked vector form: all-true is 1,
/// all-false is 2^n, and variable k being false contributes 2^(n−k).
pub fn state_index(bits: &[bool]) -> usize {
    let n = bits.len();
    1 + bits
        .iter()
        .enumerate()
        .map(|(k, &b)| if b { 0 } else { 1usize << (n - 1 - k) })
        .sum::<usize>()
}

/// Inverse of [`state_index`]: the n-variable assignment behind a 1-based
/// state index.
///
/// # Errors
///
/// Rejects indices outside `1..=2^n`.
pub fn index_to_state(index: usize, n: usize) -> Result<Vec<bool>> {
    let size = 1usize << n;
    if index == 0 || index > size {
        return Err(Error::InvalidIndexSet(format!(
            "state index {index} out of range 1..={size}"
        )));
    }
    Ok((0..n)
        .map(|k| (index - 1) >> (n - 1 - k) & 1 == 0)
        .collect())
}

// ============================================================================
// Lexing
// ============================================================================

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
    LParen,
    RParen,
    Prime,
    Equals,
    Colon,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::True => "'true'".into(),
            Tok::False => "'false'".into(),
            Tok::Not => "'!'".into(),
            Tok::And => "'&'".into(),
            Tok::Or => "'|'".into(),
            Tok::Xor => "'^'".into(),
            Tok::Implies => "'->'".into(),
            Tok::Iff => "'<->'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Prime => "'''".into(),
            Tok::Equals => "'='".into(),
            Tok::Colon => "':'".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct SpannedTok {
    tok: Tok,
    col: usize,
}

fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Tokenizes one line; `#` starts a comment running to end of line.
fn lex_line(line: &str, lineno: usize) -> Result<Vec<SpannedTok>> {
    let chars: Vec<char> = line.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        let simple = |tok| SpannedTok { tok, col };
        match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => toks.push(simple(Tok::LParen)),
            ')' => toks.push(simple(Tok::RParen)),
            '\'' => toks.push(simple(Tok::Prime)),
            '=' => toks.push(simple(Tok::Equals)),
            ':' => toks.push(simple(Tok::Colon)),
            '&' => toks.push(simple(Tok::And)),
            '|' => toks.push(simple(Tok::Or)),
            '^' => toks.push(simple(Tok::Xor)),
            '!' => toks.push(simple(Tok::Not)),
            '-' => {
                if chars.get(i + 1) == Some(&'>') {
                    toks.push(simple(Tok::Implies));
                    i += 2;
                    continue;
                }
                return Err(parse_err(lineno, col, "expected '->' after '-'"));
            }
            '<' => {
                if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') {
                    toks.push(simple(Tok::Iff));
                    i += 3;
                    continue;
                }
                return Err(parse_err(lineno, col, "expected '<->' after '<'"));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                };
                toks.push(SpannedTok { tok, col });
                continue;
            }
            other => {
                return Err(parse_err(
                    lineno,
                    col,
                    format!("unexpected character '{other}'"),
                ));
            }
        }
        i += 1;
    }
    Ok(toks)
}

// ============================================================================
// Expression parsing
// ============================================================================

struct ExprParser<'a> {
    toks: &'a [SpannedTok],
    pos: usize,
    line: usize,
    vars: &'a BTreeMap<String, usize>,
}

impl<'a> ExprParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    /// Column used when reporting an error at the current position.
    fn here(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|s| s.col)
            .or_else(|| self.toks.last().map(|s| s.col + 1))
            .unwrap_or(1)
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn parse(mut self) -> Result<Expr> {
        let expr = self.parse_lowest()?;
        if let Some(tok) = self.peek() {
            return Err(parse_err(
                self.line,
                self.here(),
                format!("unexpected {} after expression", tok.describe()),
            ));
        }
        Ok(expr)
    }

    /// `->` and `<->`, both on the lowest tier, associating to the right.
    fn parse_lowest(&mut self) -> Result<Expr> {
        let lhs = self.parse_or()?;
        match self.peek() {
            Some(Tok::Implies) => {
                self.bump();
                let rhs = self.parse_lowest()?;
                Ok(Expr::Implies(Box::new(lhs), Box::new(rhs)))
            }
            Some(Tok::Iff) => {
                self.bump();
                let rhs = self.parse_lowest()?;
                Ok(Expr::Iff(Box::new(lhs), Box::new(rhs)))
            }
            _ => Ok(lhs),
        }
    }

    fn parse_or(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_xor()?;
        while self.peek() == Some(&Tok::Or) {
            self.bump();
            let rhs = self.parse_xor()?;
            lhs = Expr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_xor(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_and()?;
        while self.peek() == Some(&Tok::Xor) {
            self.bump();
            let rhs = self.parse_and()?;
            lhs = Expr::Xor(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Expr> {
        let mut lhs = self.parse_unary()?;
        while self.peek() == Some(&Tok::And) {
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = Expr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr> {
        if self.peek() == Some(&Tok::Not) {
            self.bump();
            let inner = self.parse_unary()?;
            return Ok(Expr::Not(Box::new(inner)));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> Result<Expr> {
        let col = self.here();
        match self.peek().cloned() {
            Some(Tok::True) => {
                self.bump();
                Ok(Expr::Const(true))
            }
            Some(Tok::False) => {
                self.bump();
                Ok(Expr::Const(false))
            }
            Some(Tok::Ident(name)) => {
                self.bump();
                match self.vars.get(&name) {
                    Some(&idx) => Ok(Expr::Var(idx)),
                    None => Err(Error::UnknownVariable(name)),
                }
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.parse_lowest()?;
                if self.peek() == Some(&Tok::RParen) {
                    self.bump();
                    Ok(inner)
                } else {
                    Err(parse_err(self.line, self.here(), "expected ')'"))
                }
            }
            Some(other) => Err(parse_err(
                self.line,
                col,
                format!("expected an expression, found {}", other.describe()),
            )),
            None => Err(parse_err(
                self.line,
                col,
                "expected an expression, found end of line",
            )),
        }
    }
}

// ============================================================================
// Network parsing
// ============================================================================

/// One raw statement from the first pass, before names are resolved.
enum RawStmt {
    /// `name' = <tokens>`
    Update {
        name: String,
        line: usize,
        rhs: Vec<SpannedTok>,
    },
    /// `out name = <tokens>`
    Output {
        name: String,
        line: usize,
        rhs: Vec<SpannedTok>,
    },
}

/// A Boolean network: named state variables with one update rule each,
/// plus zero or more named output functions.
///
/// Built by [`BooleanNetwork::parse`]; all compilation targets (structure
/// matrices, the transition matrix, output matrices) derive from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanNetwork {
    var_names: Vec<String>,
    updates: Vec<Expr>,
    outputs: Vec<(String, Expr)>,
}

impl BooleanNetwork {
    /// Parses a network definition with the default variable cap
    /// ([`DEFAULT_MAX_VARS`]).
    ///
    /// # Errors
    ///
    /// Syntax errors carry line and column; semantic problems (duplicate or
    /// missing updates, undeclared names, too many variables) are reported
    /// by name.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_limit(text, DEFAULT_MAX_VARS)
    }

    /// Parses a network definition, allowing up to `max_vars` variables.
    ///
    /// The cap exists because every compilation step enumerates all 2^n
    /// states; `max_vars` values above 63 are clamped to 63 (past which
    /// state indices would not even fit a machine word).
    ///
    /// # Errors
    ///
    /// As for [`BooleanNetwork::parse`].
    pub fn parse_with_limit(text: &str, max_vars: usize) -> Result<Self> {
        let max_vars = max_vars.min(63);
        let mut header: Option<Vec<String>> = None;
        let mut seen_statement = false;
        let mut stmts: Vec<RawStmt> = Vec::new();

        for (lineno, line) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let toks = lex_line(line, lineno)?;
            if toks.is_empty() {
                continue;
            }
            match (&toks[0].tok, toks.get(1).map(|s| &s.tok)) {
                (Tok::Ident(kw), Some(Tok::Colon)) if kw == "vars" => {
                    if header.is_some() {
                        return Err(parse_err(lineno, toks[0].col, "duplicate 'vars:' header"));
                    }
                    if seen_statement {
                        return Err(parse_err(
                            lineno,
                            toks[0].col,
                            "'vars:' header must precede all update and output lines",
                        ));
                    }
                    let mut names = Vec::new();
                    for spanned in &toks[2..] {
                        match &spanned.tok {
                            Tok::Ident(name) => names.push(name.clone()),
                            other => {
                                return Err(parse_err(
                                    lineno,
                                    spanned.col,
                                    format!("expected a variable name, found {}", other.describe()),
                                ));
                            }
                        }
                    }
                    if names.is_empty() {
                        return Err(parse_err(
                            lineno,
                            toks[0].col,
                            "'vars:' header declares no variables",
                        ));
                    }
                    header = Some(names);
                }
                (Tok::Ident(kw), Some(Tok::Ident(name))) if kw == "out" => {
                    seen_statement = true;
                    let name = name.clone();
                    match toks.get(2).map(|s| &s.tok) {
                        Some(Tok::Equals) => {}
                        _ => {
                            let col = toks.get(2).map(|s| s.col).unwrap_or(toks[1].col + 1);
                            return Err(parse_err(lineno, col, "expected '=' after output name"));
                        }
                    }
                    stmts.push(RawStmt::Output {
                        name,
                        line: lineno,
                        rhs: toks[3..].to_vec(),
                    });
                }
                (Tok::Ident(name), Some(Tok::Prime)) => {
                    seen_statement = true;
                    match toks.get(2).map(|s| &s.tok) {
                        Some(Tok::Equals) => {}
                        _ => {
                            let col = toks.get(2).map(|s| s.col).unwrap_or(toks[1].col + 1);
                            return Err(parse_err(
                                lineno,
                                col,
                                "expected '=' after primed variable",
                            ));
                        }
                    }
                    stmts.push(RawStmt::Update {
                        name: name.clone(),
                        line: lineno,
                        rhs: toks[3..].to_vec(),
                    });
                }
                _ => {
                    return Err(parse_err(
                        lineno,
                        toks[0].col,
                        "expected an update rule (name' = ...), an output (out name = ...), or a 'vars:' header",
                    ));
                }
            }
        }

        // Fix the variable order: header order, or update-line order.
        let var_names: Vec<String> = match &header {
            Some(names) => names.clone(),
            None => stmts
                .iter()
                .filter_map(|s| match s {
                    RawStmt::Update { name, .. } => Some(name.clone()),
                    RawStmt::Output { .. } => None,
                })
                .collect(),
        };
        let mut var_index: BTreeMap<String, usize> = BTreeMap::new();
        for (i, name) in var_names.iter().enumerate() {
            if var_index.insert(name.clone(), i).is_some() {
                // Without a header the duplicate necessarily came from a
                // second update line for the same variable.
                if header.is_some() {
                    return Err(Error::DuplicateName(name.clone()));
                }
                return Err(Error::DuplicateUpdate(name.clone()));
            }
        }
        if var_names.is_empty() {
            return Err(Error::InvalidStructure(
                "input defines no update rules".into(),
            ));
        }
        if var_names.len() > max_vars {
            return Err(Error::TooManyVariables {
                n: var_names.len(),
                max: max_vars,
            });
        }

        // Resolve statements against the variable order.
        let mut updates: Vec<Option<Expr>> = vec![None; var_names.len()];
        let mut outputs: Vec<(String, Expr)> = Vec::new();
        for stmt in &stmts {
            match stmt {
                RawStmt::Update { name, line, rhs } => {
                    let idx = *var_index
                        .get(name)
                        .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
                    if updates[idx].is_some() {
                        return Err(Error::DuplicateUpdate(name.clone()));
                    }
                    let parser = ExprParser {
                        toks: rhs,
                        pos: 0,
                        line: *line,
                        vars: &var_index,
                    };
                    updates[idx] = Some(parser.parse()?);
                }
                RawStmt::Output { name, line, rhs } => {
                    if var_index.contains_key(name) || outputs.iter().any(|(n, _)| n == name) {
                        return Err(Error::DuplicateName(name.clone()));
                    }
                    let parser = ExprParser {
                        toks: rhs,
                        pos: 0,
                        line: *line,
                        vars: &var_index,
                    };
                    outputs.push((name.clone(), parser.parse()?));
                }
            }
        }
        let updates = var_names
            .iter()
            .zip(updates)
            .map(|(name, u)| u.ok_or_else(|| Error::MissingUpdate(name.clone())))
            .collect::<Result<Vec<_>>>()?;

        Ok(BooleanNetwork {
            var_names,
            updates,
            outputs,
        })
    }

    /// Variable names in declaration order.
    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    /// Number of state variables n.
    pub fn num_vars(&self) -> usize {
        self.var_names.len()
    }

    /// Number of states, 2^n.
    pub fn state_count(&self) -> usize {
        1usize << self.num_vars()
    }

    /// Update expressions, aligned with [`BooleanNetwork::var_names`].
    pub fn updates(&self) -> &[Expr] {
        &self.updates
    }

    /// Output functions in declaration order.
    pub fn outputs(&self) -> &[(String, Expr)] {
        &self.outputs
    }

    /// One synchronous step: evaluates every update on `state`.
    ///
    /// # Panics
    ///
    /// Panics if `state.len() != num_vars()`.
    pub fn step(&self, state: &[bool]) -> Vec<bool> {
        assert_eq!(state.len(), self.num_vars(), "state width mismatch");
        self.updates.iter().map(|e| e.eval(state)).collect()
    }

    /// Parses a single expression over this network's variables (used for
    /// ad-hoc output functions).
    ///
    /// # Errors
    ///
    /// Syntax errors (reported as line 1 of the fragment) and undeclared
    /// variable names.
    pub fn parse_expression(&self, text: &str) -> Result<Expr> {
        let var_index: BTreeMap<String, usize> = self
            .var_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        let mut all_toks = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let mut toks = lex_line(line, lineno + 1)?;
            all_toks.append(&mut toks);
        }
        let parser = ExprParser {
            toks: &all_toks,
            pos: 0,
            line: 1,
            vars: &var_index,
        };
        parser.parse()
    }

    /// Renders an expression back to source form with minimal parentheses;
    /// re-parsing the result reproduces the same AST.
    ///
    /// # Panics
    ///
    /// Panics if the expression mentions a variable position this network
    /// does not have.
    pub fn render_expression(&self, expr: &Expr) -> String {
        let mut out = String::new();
        self.render_prec(expr, 0, &mut out);
        out
    }

    fn render_prec(&self, expr: &Expr, min: u8, out: &mut String) {
        let wrap = expr.precedence() < min;
        if wrap {
            out.push('(');
        }
        match expr {
            Expr::Const(true) => out.push_str("true"),
            Expr::Const(false) => out.push_str("false"),
            Expr::Var(i) => out.push_str(&self.var_names[*i]),
            Expr::Not(e) => {
                out.push('!');
                self.render_prec(e, 5, out);
            }
            // Left-associative tiers: the right child needs to bind
            // strictly tighter to survive a round-trip unchanged.
            Expr::And(a, b) => {
                self.render_prec(a, 4, out);
                out.push_str(" & ");
                self.render_prec(b, 5, out);
            }
            Expr::Xor(a, b) => {
                self.render_prec(a, 3, out);
                out.push_str(" ^ ");
                self.render_prec(b, 4, out);
            }
            Expr::Or(a, b) => {
                self.render_prec(a, 2, out);
                out.push_str(" | ");
                self.render_prec(b, 3, out);
            }
            // The lowest tier associates to the right.
            Expr::Implies(a, b) => {
                self.render_prec(a, 2, out);
                out.push_str(" -> ");
                self.render_prec(b, 1, out);
            }
            Expr::Iff(a, b) => {
                self.render_prec(a, 2, out);
                out.push_str(" <-> ");
                self.render_prec(b, 1, out);
            }
        }
        if wrap {
            out.push(')');
        }
    }

    /// Renders the whole network in the input format (header, updates,
    /// outputs); parsing the result yields an equal network.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "vars: {}", self.var_names.join(" "));
        for (name, expr) in self.var_names.iter().zip(&self.updates) {
            let _ = writeln!(out, "{name}' = {}", self.render_expression(expr));
        }
        for (name, expr) in &self.outputs {
            let _ = writeln!(out, "out {name} = {}", self.render_expression(expr));
        }
        out
    }

    /// The 2 × 2^n structure matrix of an arbitrary expression over this
    /// network's variables: column j is δ_2^1 when the expression is true
    /// on state j, δ_2^2 otherwise.
    pub fn expression_structure_matrix(&self, expr: &Expr) -> LogicalMatrix {
        let n = self.num_vars();
        let cols = (1..=self.state_count())
            .map(|j| {
                let bits = index_to_state(j, n).expect("index in range by construction");
                if expr.eval(&bits) {
                    1
                } else {
                    2
                }
            })
            .collect();
        LogicalMatrix::new(2, cols).expect("structure matrix columns are 1 or 2")
    }

    /// Structure matrix of the i-th update rule (0-based, declaration
    /// order).
    ///
    /// # Panics
    ///
    /// Panics if `i` is out of range.
    pub fn update_structure_matrix(&self, i: usize) -> LogicalMatrix {
        self.expression_structure_matrix(&self.updates[i])
    }

    /// Structure matrix of the i-th output function (0-based, declaration
    /// order).
    ///
    /// # Panics
    ///
    /// Panics if `i` is out of range.
    pub fn output_structure_matrix(&self, i: usize) -> LogicalMatrix {
        self.expression_structure_matrix(&self.outputs[i].1)
    }

    /// The network's 2^n × 2^n transition matrix: the column-wise product
    /// of the per-variable structure matrices, so that column j is the
    /// state index of the synchronous update of state j.
    pub fn transition_matrix(&self) -> LogicalMatrix {
        let mut m = self.update_structure_matrix(0);
        for i in 1..self.num_vars() {
            m = m
                .khatri_rao(&self.update_structure_matrix(i))
                .expect("structure matrices share the column count 2^n");
        }
        m
    }

    /// The combined output matrix: the column-wise product of the
    /// per-output structure matrices (a 2^p × 2^n logical matrix for p
    /// outputs), or `None` when the network declares no outputs.
    pub fn output_matrix(&self) -> Option<LogicalMatrix> {
        let mut it = (0..self.outputs.len()).map(|i| self.output_structure_matrix(i));
        let first = it.next()?;
        Some(it.fold(first, |acc, m| {
            acc.khatri_rao(&m)
                .expect("structure matrices share the column count 2^n")
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(text: &str) -> BooleanNetwork {
        BooleanNetwork::parse(text).unwrap()
    }

    #[test]
    fn state_index_convention() {
        assert_eq!(state_index(&[true, true]), 1);
        assert_eq!(state_index(&[true, false]), 2);
        assert_eq!(state_index(&[false, true]), 3);
        assert_eq!(state_index(&[false, false]), 4);
        for j in 1..=8 {
            assert_eq!(state_index(&index_to_state(j, 3).unwrap()), j);
        }
        assert!(index_to_state(0, 3).is_err());
        assert!(index_to_state(9, 3).is_err());
    }

    #[test]
    fn negation_network_structure_matrix() {
        let n = net("x1' = !x1");
        assert_eq!(
            n.transition_matrix(),
            LogicalMatrix::new(2, vec![2, 1]).unwrap()
        );
    }

    #[test]
    fn conjunction_and_iff_structure_matrices() {
        let n = net("x1' = x1\nx2' = x2");
        let and = n.parse_expression("x1 & x2").unwrap();
        assert_eq!(
            n.expression_structure_matrix(&and),
            LogicalMatrix::new(2, vec![1, 2, 2, 2]).unwrap()
        );
        let iff = n.parse_expression("x1 <-> x2").unwrap();
        assert_eq!(
            n.expression_structure_matrix(&iff),
            LogicalMatrix::new(2, vec![1, 2, 2, 1]).unwrap()
        );
    }

    #[test]
    fn swap_network_equals_swap_matrix() {
        let n = net("x1' = x2\nx2' = x1");
        assert_eq!(n.transition_matrix(), crate::matrix::swap_matrix(2, 2));
    }

    #[test]
    fn identity_network_compiles_to_identity() {
        let n = net("vars: a b c\na' = a\nb' = b\nc' = c");
        assert_eq!(n.transition_matrix(), LogicalMatrix::identity(8));
    }

    #[test]
    fn khatri_rao_construction_matches_truth_table_simulation() {
        let n = net("vars: a b c\na' = b | !c\nb' = a ^ c\nc' = (a -> b) & c");
        let m = n.transition_matrix();
        for j in 1..=8 {
            let state = index_to_state(j, 3).unwrap();
            assert_eq!(m.col(j), state_index(&n.step(&state)));
        }
    }

    #[test]
    fn precedence_ladder() {
        let n = net("vars: a b c\na' = a\nb' = b\nc' = c");
        // OR binds looser than AND.
        let e = n.parse_expression("a | b & c").unwrap();
        assert!(!e.eval(&[false, true, false]));
        // XOR sits between AND and OR.
        let e = n.parse_expression("a ^ b & c").unwrap();
        assert_eq!(
            e,
            Expr::Xor(
                Box::new(Expr::Var(0)),
                Box::new(Expr::And(Box::new(Expr::Var(1)), Box::new(Expr::Var(2))))
            )
        );
        let e = n.parse_expression("a | b ^ c").unwrap();
        assert_eq!(
            e,
            Expr::Or(
                Box::new(Expr::Var(0)),
                Box::new(Expr::Xor(Box::new(Expr::Var(1)), Box::new(Expr::Var(2))))
            )
        );
        // NOT binds tightest.
        let e = n.parse_expression("!a & b").unwrap();
        assert!(e.eval(&[false, true, true]));
        // The lowest tier associates to the right: a -> (b -> c).
        let e = n.parse_expression("a -> b -> c").unwrap();
        assert!(e.eval(&[false, true, false]));
        let left_assoc = n.parse_expression("(a -> b) -> c").unwrap();
        assert!(!left_assoc.eval(&[false, true, false]));
        // Implication truth table corner: false antecedent.
        let e = n.parse_expression("false -> a").unwrap();
        assert!(e.eval(&[false, false, false]) && e.eval(&[true, false, false]));
    }

    #[test]
    fn render_round_trips() {
        let n = net("vars: a b c\na' = a\nb' = b\nc' = c");
        for src in [
            "a & (b & c)",
            "a & b & c",
            "!(a | b) ^ !c",
            "a -> b -> c",
            "(a -> b) -> c",
            "a <-> b -> c",
            "(a <-> b) -> c",
            "a | (b ^ (c & true))",
            "!!a",
            "false",
        ] {
            let ast = n.parse_expression(src).unwrap();
            let rendered = n.render_expression(&ast);
            let reparsed = n.parse_expression(&rendered).unwrap();
            assert_eq!(reparsed, ast, "{src} -> {rendered}");
        }
        let reparsed = BooleanNetwork::parse(&n.render()).unwrap();
        assert_eq!(reparsed, n);
    }

    #[test]
    fn header_is_optional_and_fixes_order() {
        let with_header = net("vars: a b\na' = b\nb' = a");
        let without = net("a' = b\nb' = a");
        assert_eq!(with_header, without);
        // Header order wins over update-line order.
        let reordered = net("vars: a b\nb' = a\na' = b");
        assert_eq!(reordered.var_names(), &["a".to_string(), "b".to_string()]);
        assert_eq!(reordered, with_header);
    }

    #[test]
    fn outputs_compile_to_output_matrix() {
        let n = net("x1' = x2\nx2' = x1\nout y = x1 ^ x2");
        assert_eq!(
            n.output_matrix().unwrap(),
            LogicalMatrix::new(2, vec![2, 1, 1, 2]).unwrap()
        );
        let two = net("x1' = x2\nx2' = x1\nout y1 = x1\nout y2 = x2");
        // Two outputs stack to the full state: y = x here.
        assert_eq!(two.output_matrix().unwrap(), LogicalMatrix::identity(4));
        assert!(net("x1' = x1").output_matrix().is_none());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let n = net("# heading\n\nvars: a # trailing\na' = !a # rule\n");
        assert_eq!(n.num_vars(), 1);
    }

    #[test]
    fn error_cases() {
        // Trailing operator.
        let err = BooleanNetwork::parse("x1' = x1 & x1 &").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        // Unknown variable on the right-hand side.
        let err = BooleanNetwork::parse("x1' = x2").unwrap_err();
        assert!(
            matches!(err, Error::UnknownVariable(ref n) if n == "x2"),
            "{err}"
        );
        // Duplicate update.
        let err = BooleanNetwork::parse("x1' = x1\nx1' = !x1").unwrap_err();
        assert!(matches!(err, Error::DuplicateUpdate(_)), "{err}");
        // Missing update for a declared variable.
        let err = BooleanNetwork::parse("vars: a b\na' = a").unwrap_err();
        assert!(
            matches!(err, Error::MissingUpdate(ref n) if n == "b"),
            "{err}"
        );
        // Duplicate declaration in the header.
        let err = BooleanNetwork::parse("vars: a a\na' = a").unwrap_err();
        assert!(matches!(err, Error::DuplicateName(_)), "{err}");
        // Output name collides with a variable.
        let err = BooleanNetwork::parse("a' = a\nout a = a").unwrap_err();
        assert!(matches!(err, Error::DuplicateName(_)), "{err}");
        // Variable cap.
        let err = BooleanNetwork::parse_with_limit("a' = a\nb' = b\nc' = c", 2).unwrap_err();
        assert!(
            matches!(err, Error::TooManyVariables { n: 3, max: 2 }),
            "{err}"
        );
        // Unexpected character with position.
        let err = BooleanNetwork::parse("x1' = x1 @ x1").unwrap_err();
        match err {
            Error::Parse { line, column, .. } => {
                assert_eq!((line, column), (1, 10));
            }
            other => panic!("expected parse error, got {other}"),
        }
        // Empty input.
        let err = BooleanNetwork::parse("# nothing\n").unwrap_err();
        assert!(matches!(err, Error::InvalidStructure(_)), "{err}");
        // Unclosed parenthesis.
        let err = BooleanNetwork::parse("x1' = (x1 & x1").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
    }

    #[test]
    fn eval_on_mixed_connectives() {
        let n = net("vars: x1 x2 x3 x4\nx1' = x1\nx2' = x2\nx3' = x3\nx4' = x4");
        let e = n.parse_expression("x2 | (x3 <-> x4)").unwrap();
        // x = (1,0,1,1): 0 or (1 iff 1) = 1.
        assert!(e.eval(&[true, false, true, true]));
        assert!(!e.eval(&[true, false, true, false]));
    }
}
