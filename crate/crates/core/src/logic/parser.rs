//! Text formats: alphabet declarations, formulas and executions.
//!
//! ```text
//! sys: a b; env: c d;
//! A x. (d(x) -> E y. (x ~ y & a(y)))
//! procs sys=1,2,3 env=4,5 both=6,7,8; (a,1)(b,8)(d,7)
//! ```
//!
//! `#` starts a comment that runs to the end of the line.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use super::{Alphabet, Event, Execution, Formula, ProcId, ProcType, ProcessUniverse};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u32),
    LParen,
    RParen,
    Comma,
    Dot,
    Semi,
    Colon,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    Eq,
    EqEq,
    Ge,
    Tilde,
    Lt,
    Succ,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::End => write!(f, "end of input"),
            other => {
                let s = match other {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::Comma => ",",
                    Tok::Dot => ".",
                    Tok::Semi => ";",
                    Tok::Colon => ":",
                    Tok::Bang => "!",
                    Tok::Amp => "&",
                    Tok::Pipe => "|",
                    Tok::Arrow => "->",
                    Tok::DArrow => "<->",
                    Tok::Eq => "=",
                    Tok::EqEq => "==",
                    Tok::Ge => ">=",
                    Tok::Tilde => "~",
                    Tok::Lt => "<",
                    Tok::Succ => "+1",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
    text: String,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error_at(text: &str, offset: usize, message: impl Into<String>) -> ParseError {
    let (line, column) = position(text, offset);
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Lexed, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let rest = &text[i..];
        let fixed = [
            ("<->", Tok::DArrow),
            ("->", Tok::Arrow),
            ("==", Tok::EqEq),
            (">=", Tok::Ge),
            ("+1", Tok::Succ),
            ("(", Tok::LParen),
            (")", Tok::RParen),
            (",", Tok::Comma),
            (".", Tok::Dot),
            (";", Tok::Semi),
            (":", Tok::Colon),
            ("!", Tok::Bang),
            ("&", Tok::Amp),
            ("|", Tok::Pipe),
            ("=", Tok::Eq),
            ("~", Tok::Tilde),
            ("<", Tok::Lt),
        ];
        if let Some((s, tok)) = fixed.iter().find(|(s, _)| rest.starts_with(s)) {
            toks.push((tok.clone(), start));
            i += s.len();
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i]
                .parse()
                .map_err(|_| error_at(text, start, "integer out of range"))?;
            toks.push((Tok::Int(n), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            toks.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        }
        let ch = rest.chars().next().unwrap_or('?');
        return Err(error_at(text, start, format!("unexpected character `{ch}`")));
    }
    toks.push((Tok::End, text.len()));
    Ok(Lexed {
        toks,
        text: text.to_string(),
    })
}

struct Cursor<'a> {
    lexed: &'a Lexed,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> &Tok {
        &self.lexed.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.lexed.toks.len() - 1);
        &self.lexed.toks[i].0
    }

    fn next(&mut self) -> Tok {
        let t = self.lexed.toks[self.pos].0.clone();
        if self.pos + 1 < self.lexed.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        error_at(&self.lexed.text, self.lexed.toks[self.pos].1, message)
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.err(format!("expected {tok}, found {}", self.peek())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            other => Err(self.err(format!("expected {what}, found {other}"))),
        }
    }

    fn int(&mut self) -> Result<u32, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            other => Err(self.err(format!("expected a number, found {other}"))),
        }
    }

    fn at_end(&self) -> bool {
        *self.peek() == Tok::End
    }
}

fn alphabet_decl(cur: &mut Cursor<'_>) -> Result<Alphabet, ParseError> {
    let mut sides: [Vec<String>; 2] = Default::default();
    for (i, keyword) in ["sys", "env"].into_iter().enumerate() {
        match cur.peek() {
            Tok::Ident(s) if s == keyword => {
                cur.next();
            }
            other => return Err(cur.err(format!("expected `{keyword}:`, found {other}"))),
        }
        cur.expect(Tok::Colon)?;
        while let Tok::Ident(name) = cur.peek().clone() {
            cur.next();
            sides[i].push(name);
        }
        cur.expect(Tok::Semi)?;
    }
    let [sys, env] = sides;
    Alphabet::new(sys, env).map_err(|e| cur.err(e.to_string()))
}

/// Parses `sys: a b; env: c d;`.
pub fn parse_alphabet(text: &str) -> Result<Alphabet, ParseError> {
    let lexed = lex(text)?;
    let mut cur = Cursor {
        lexed: &lexed,
        pos: 0,
    };
    let ab = alphabet_decl(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.err(format!("unexpected {} after declaration", cur.peek())));
    }
    Ok(ab)
}

struct FormulaParser<'a, 'b> {
    cur: Cursor<'a>,
    alphabet: &'b Alphabet,
    scope: Vec<String>,
}

impl FormulaParser<'_, '_> {
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.implication()?;
        while *self.cur.peek() == Tok::DArrow {
            self.cur.next();
            let rhs = self.implication()?;
            lhs = Formula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.cur.peek() == Tok::Arrow {
            self.cur.next();
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.cur.peek() == Tok::Pipe {
            self.cur.next();
            lhs = Formula::or(lhs, self.conjunction()?);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.cur.peek() == Tok::Amp {
            self.cur.next();
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if *self.cur.peek() == Tok::Bang {
            self.cur.next();
            return Ok(Formula::not(self.unary()?));
        }
        if let Tok::Ident(q) = self.cur.peek() {
            if q == "E" || q == "A" {
                return self.quantifier();
            }
        }
        self.primary()
    }

    fn quantifier(&mut self) -> Result<Formula, ParseError> {
        let universal = matches!(self.cur.next(), Tok::Ident(q) if q == "A");
        let count = match self.cur.peek() {
            Tok::Ge | Tok::EqEq if !universal => {
                let exact = self.cur.next() == Tok::EqEq;
                Some((exact, self.cur.int()?))
            }
            _ => None,
        };
        let var = self.cur.ident("a variable")?;
        if super::RESERVED.contains(&var.as_str()) {
            return Err(self.cur.err(format!("`{var}` is reserved")));
        }
        self.cur.expect(Tok::Dot)?;
        self.scope.push(var.clone());
        let body = self.formula();
        self.scope.pop();
        let body = body?;
        Ok(match (universal, count) {
            (true, _) => Formula::forall(var, body),
            (false, None) => Formula::exists(var, body),
            (false, Some((false, n))) => Formula::at_least(n, var, body),
            (false, Some((true, n))) => Formula::exactly(n, var, body),
        })
    }

    fn variable(&mut self) -> Result<String, ParseError> {
        let var = self.cur.ident("a variable")?;
        if !self.scope.contains(&var) {
            return Err(self.cur.err(format!("unbound variable `{var}`")));
        }
        Ok(var)
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.cur.peek().clone() {
            Tok::LParen => {
                self.cur.next();
                let f = self.formula()?;
                self.cur.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Succ => {
                self.cur.next();
                self.cur.expect(Tok::LParen)?;
                let x = self.variable()?;
                self.cur.expect(Tok::Comma)?;
                let y = self.variable()?;
                self.cur.expect(Tok::RParen)?;
                Ok(Formula::Succ(x, y))
            }
            Tok::Ident(name) if name == "true" => {
                self.cur.next();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.cur.next();
                Ok(Formula::False)
            }
            Tok::Ident(name) if *self.cur.peek_at(1) == Tok::LParen => {
                let kind = ProcType::from_name(&name);
                if kind.is_none() && self.alphabet.index_of(&name).is_none() {
                    return Err(self.cur.err(format!("unknown action `{name}`")));
                }
                self.cur.next();
                self.cur.next();
                let x = self.variable()?;
                self.cur.expect(Tok::RParen)?;
                Ok(match kind {
                    Some(t) => Formula::Type(t, x),
                    None => Formula::Action(name, x),
                })
            }
            Tok::Ident(_) => {
                let x = self.variable()?;
                let op = self.cur.next();
                let y = self.variable()?;
                match op {
                    Tok::Eq => Ok(Formula::Eq(x, y)),
                    Tok::Tilde => Ok(Formula::Sim(x, y)),
                    Tok::Lt => Ok(Formula::Less(x, y)),
                    other => Err(self
                        .cur
                        .err(format!("expected `=`, `~` or `<` after `{x}`, found {other}"))),
                }
            }
            other => Err(self.cur.err(format!("expected a formula, found {other}"))),
        }
    }
}

fn formula_from(
    cur: Cursor<'_>,
    alphabet: &Alphabet,
    free: &[&str],
) -> Result<Formula, ParseError> {
    let mut p = FormulaParser {
        cur,
        alphabet,
        scope: free.iter().map(|s| s.to_string()).collect(),
    };
    let f = p.formula()?;
    if !p.cur.at_end() {
        return Err(p.cur.err(format!("unexpected {}", p.cur.peek())));
    }
    Ok(f)
}

/// Parses a sentence over `alphabet`.
pub fn parse_formula(text: &str, alphabet: &Alphabet) -> Result<Formula, ParseError> {
    parse_formula_with_free(text, alphabet, &[])
}

/// Parses a formula whose free variables must be among `free`.
pub fn parse_formula_with_free(
    text: &str,
    alphabet: &Alphabet,
    free: &[&str],
) -> Result<Formula, ParseError> {
    let lexed = lex(text)?;
    formula_from(
        Cursor {
            lexed: &lexed,
            pos: 0,
        },
        alphabet,
        free,
    )
}

/// Parses an alphabet declaration followed by a sentence.
pub fn parse_formula_file(text: &str) -> Result<(Alphabet, Formula), ParseError> {
    let lexed = lex(text)?;
    let mut cur = Cursor {
        lexed: &lexed,
        pos: 0,
    };
    let alphabet = alphabet_decl(&mut cur)?;
    let f = formula_from(cur, &alphabet, &[])?;
    Ok((alphabet, f))
}

/// Parses `procs sys=1,2 env=3 both=4; (a,1)(d,4)`.
pub fn parse_execution(text: &str, alphabet: Arc<Alphabet>) -> Result<Execution, ParseError> {
    let lexed = lex(text)?;
    let mut cur = Cursor {
        lexed: &lexed,
        pos: 0,
    };
    match cur.peek() {
        Tok::Ident(s) if s == "procs" => {
            cur.next();
        }
        other => return Err(cur.err(format!("expected `procs`, found {other}"))),
    }
    let mut sets: [Vec<u32>; 3] = Default::default();
    let mut given = [false; 3];
    while let Tok::Ident(label) = cur.peek().clone() {
        let slot = match label.as_str() {
            "sys" => 0,
            "env" => 1,
            "both" => 2,
            _ => return Err(cur.err(format!("expected `sys`, `env` or `both`, found `{label}`"))),
        };
        if given[slot] {
            return Err(cur.err(format!("`{label}` given twice")));
        }
        given[slot] = true;
        cur.next();
        cur.expect(Tok::Eq)?;
        if let Tok::Int(_) = cur.peek() {
            sets[slot].push(cur.int()?);
            while *cur.peek() == Tok::Comma {
                cur.next();
                sets[slot].push(cur.int()?);
            }
        }
    }
    cur.expect(Tok::Semi)?;
    let [sys, env, both] = sets;
    let universe = ProcessUniverse::new(sys, env, both).map_err(|e| cur.err(e.to_string()))?;
    let mut events = Vec::new();
    while *cur.peek() == Tok::LParen {
        cur.next();
        let name = cur.ident("an action")?;
        let action = alphabet
            .index_of(&name)
            .ok_or_else(|| cur.err(format!("unknown action `{name}`")))?;
        cur.expect(Tok::Comma)?;
        let process = ProcId(cur.int()?);
        cur.expect(Tok::RParen)?;
        events.push(Event { action, process });
    }
    if !cur.at_end() {
        return Err(cur.err(format!("unexpected {}", cur.peek())));
    }
    Execution::new(alphabet, universe, events).map_err(|e| cur.err(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"], ["c", "d"]).unwrap()
    }

    #[test]
    fn precedence() {
        let f = parse_formula("E x. !a(x) & b(x) | c(x) -> d(x) -> a(x)", &ab()).unwrap();
        assert_eq!(
            f.to_string(),
            "E x. (((!a(x) & b(x)) | c(x)) -> (d(x) -> a(x)))"
        );
    }

    #[test]
    fn quantifier_bodies_extend_right() {
        let f = parse_formula("E x. a(x) & E y. b(y) | c(y)", &ab()).unwrap();
        assert_eq!(f.to_string(), "E x. (a(x) & (E y. (b(y) | c(y))))");
    }

    #[test]
    fn counting_and_relations() {
        let f = parse_formula(
            "A x. E>=2 y. (x ~ y & x < y & +1(x, y) & !(x = y)) <-> E==0 z. se(z)",
            &ab(),
        )
        .unwrap();
        let again = parse_formula(&f.to_string(), &ab()).unwrap();
        assert_eq!(f, again);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_formula("E x. a(y)", &ab()).unwrap_err();
        assert_eq!((err.line, err.column), (1, 9));
        assert!(err.message.contains("unbound"));
        assert!(parse_formula("E x. z(x)", &ab()).is_err());
        assert!(parse_formula("E x. a(x) &", &ab()).is_err());
        assert!(parse_formula("E x. a(x) $", &ab()).is_err());
        assert!(parse_formula_with_free("a(x)", &ab(), &["x"]).is_ok());
    }

    #[test]
    fn formula_file() {
        let (alphabet, f) = parse_formula_file("# comment\nsys: a; env: d;\nE x. d(x)").unwrap();
        assert_eq!(alphabet, Alphabet::new(["a"], ["d"]).unwrap());
        assert_eq!(f, Formula::exists("x", Formula::Action("d".into(), "x".into())));
        assert!(parse_formula_file("sys: a; E x. a(x)").is_err());
    }

    #[test]
    fn execution_text() {
        let alphabet = Arc::new(ab());
        let w = parse_execution(
            "procs sys=1,2,3 env=4,5 both=6,7,8; (a,1)(b,8)(d,7)(c,4)",
            alphabet.clone(),
        )
        .unwrap();
        assert_eq!(w.len(), 4);
        let again = parse_execution(&w.to_string(), alphabet.clone()).unwrap();
        assert_eq!(w, again);
        assert!(parse_execution("procs sys= env= both=;", alphabet.clone())
            .unwrap()
            .is_empty());
        assert!(parse_execution("procs sys=1; (c,1)", alphabet.clone()).is_err());
        assert!(parse_execution("procs sys=1; (a,2)", alphabet).is_err());
    }
}
