//! Recursive-descent parser for terms, guards and interface files.

use std::collections::{BTreeMap, BTreeSet};

use super::lexer::{tokenize, tokenize_at, Tok, Token};
use super::{ComponentInterface, FrontendError, LocalConstraint};
use crate::mdl::{Alt, Collection, Entry, Flag, Guard, Label, Sort, Term};

const KEYWORDS: &[&str] = &["or", "and", "not", "true", "false", "IN", "OUT"];

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self, FrontendError> {
        Ok(Parser { toks: tokenize(src)?, pos: 0 })
    }

    pub(crate) fn new_at(src: &str, line: usize, col: usize) -> Result<Self, FrontendError> {
        Ok(Parser { toks: tokenize_at(src, line, col)?, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, msg: impl Into<String>) -> FrontendError {
        let t = &self.toks[self.pos];
        FrontendError::Parse { line: t.line, col: t.col, msg: msg.into() }
    }

    fn unexpected(&self, wanted: &str) -> FrontendError {
        self.error_here(format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), FrontendError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub(crate) fn expect_eof(&self) -> Result<(), FrontendError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    pub(crate) fn term(&mut self) -> Result<Term, FrontendError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(Term::Symbol(s))
            }
            Tok::Up(v) => {
                self.next();
                Ok(Term::Up(v))
            }
            Tok::Down(v) => {
                self.next();
                Ok(Term::Down(v))
            }
            Tok::LBrace => {
                self.next();
                Ok(Term::Record(self.collection(Sort::Down)?))
            }
            Tok::ChoiceOpen => {
                self.next();
                Ok(Term::Choice(self.collection(Sort::Up)?))
            }
            Tok::LParen => {
                self.next();
                let mut items = Vec::new();
                while *self.peek() != Tok::RParen {
                    if *self.peek() == Tok::Eof {
                        return Err(self.unexpected("`)`"));
                    }
                    items.push(self.term()?);
                }
                if items.is_empty() {
                    return Err(self.error_here("tuples must have at least one item"));
                }
                self.next();
                Ok(Term::Tuple(items))
            }
            Tok::Lt => {
                self.next();
                let mut alts = Vec::new();
                loop {
                    let guard = self.guard()?;
                    self.expect(Tok::Colon, "`:`")?;
                    let term = self.term()?;
                    alts.push(Alt { guard, term });
                    match self.peek() {
                        Tok::Comma => {
                            self.next();
                        }
                        Tok::Gt => {
                            self.next();
                            break;
                        }
                        _ => return Err(self.unexpected("`,` or `>`")),
                    }
                }
                Ok(Term::Switch(alts))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    /// Entries and optional tail up to the closing bracket.
    fn collection(&mut self, sort: Sort) -> Result<Collection, FrontendError> {
        let close = match sort {
            Sort::Down => Tok::RBrace,
            Sort::Up => Tok::ChoiceClose,
        };
        let wanted = match sort {
            Sort::Down => "`}`",
            Sort::Up => "`:)`",
        };
        let mut entries = Vec::new();
        let mut tail = None;
        loop {
            if *self.peek() == close {
                break;
            }
            if *self.peek() == Tok::Bar {
                self.next();
                let at = self.toks[self.pos].clone();
                tail = Some(match (at.tok, sort) {
                    (Tok::Down(v), Sort::Down) | (Tok::Up(v), Sort::Up) => v,
                    (Tok::Up(_), Sort::Down) => {
                        return Err(FrontendError::Sort {
                            line: at.line,
                            col: at.col,
                            msg: "record tail must be down-coerced".into(),
                        })
                    }
                    (Tok::Down(_), Sort::Up) => {
                        return Err(FrontendError::Sort {
                            line: at.line,
                            col: at.col,
                            msg: "choice tail must be up-coerced".into(),
                        })
                    }
                    _ => return Err(self.unexpected("a tail variable")),
                });
                self.next();
                if *self.peek() != close {
                    return Err(self.unexpected(wanted));
                }
                break;
            }
            entries.push(self.entry()?);
            match self.peek() {
                // a trailing comma before `|` or the closing bracket is allowed
                Tok::Comma => {
                    self.next();
                }
                t if *t == close || *t == Tok::Bar => {}
                _ => return Err(self.unexpected(&format!("`,`, `|` or {wanted}"))),
            }
        }
        self.next();
        Ok(Collection::new(entries, tail))
    }

    fn entry(&mut self) -> Result<Entry, FrontendError> {
        let label = match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                Label::new(s).map_err(|e| self.error_here(e.to_string()))?
            }
            _ => return Err(self.unexpected("a label")),
        };
        self.next();
        let guard = if *self.peek() == Tok::LParen {
            self.next();
            let g = self.guard()?;
            self.expect(Tok::RParen, "`)`")?;
            g
        } else {
            Guard::True
        };
        self.expect(Tok::Colon, "`:`")?;
        let term = self.term()?;
        Ok(Entry::new(label, guard, term))
    }

    pub(crate) fn guard(&mut self) -> Result<Guard, FrontendError> {
        let mut g = self.guard_and()?;
        while self.is_keyword("or") {
            self.next();
            g = Guard::or(g, self.guard_and()?);
        }
        Ok(g)
    }

    fn guard_and(&mut self) -> Result<Guard, FrontendError> {
        let mut g = self.guard_not()?;
        while self.is_keyword("and") {
            self.next();
            g = Guard::and(g, self.guard_not()?);
        }
        Ok(g)
    }

    fn guard_not(&mut self) -> Result<Guard, FrontendError> {
        if self.is_keyword("not") {
            self.next();
            return Ok(Guard::not(self.guard_not()?));
        }
        self.guard_atom()
    }

    fn starts_operand(&self) -> bool {
        match self.peek() {
            Tok::LParen => true,
            Tok::Ident(s) => s != "or" && s != "and",
            _ => false,
        }
    }

    fn guard_atom(&mut self) -> Result<Guard, FrontendError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.next();
                let g = self.guard()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(g)
            }
            Tok::Ident(s) if s == "true" => {
                self.next();
                Ok(Guard::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.next();
                Ok(Guard::False)
            }
            // prefix application: `or c g u`, `and a (or b c)`
            Tok::Ident(s) if (s == "or" || s == "and") && self.operand_follows() => {
                self.next();
                let mut g = self.guard_not()?;
                while self.starts_operand() {
                    let x = self.guard_not()?;
                    g = if s == "or" { Guard::or(g, x) } else { Guard::and(g, x) };
                }
                Ok(g)
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let f = Flag::new(s.clone()).map_err(|e| self.error_here(e.to_string()))?;
                self.next();
                Ok(Guard::Flag(f))
            }
            _ => Err(self.unexpected("a guard")),
        }
    }

    fn operand_follows(&self) -> bool {
        match self.peek_at(1) {
            Tok::LParen => true,
            Tok::Ident(s) => s != "or" && s != "and",
            _ => false,
        }
    }

    /// `IN` and `OUT` sections followed by local constraint lines.
    pub(crate) fn interface(&mut self) -> Result<ComponentInterface, FrontendError> {
        let mut iface = ComponentInterface::default();
        if self.is_keyword("IN") {
            self.next();
            iface.in_channels = self.channels()?;
        }
        if self.is_keyword("OUT") {
            self.next();
            iface.out_channels = self.channels()?;
        }
        while *self.peek() != Tok::Eof {
            iface.local_constraints.push(self.local_constraint()?);
        }
        iface.validate()?;
        Ok(iface)
    }

    fn channels(&mut self) -> Result<BTreeMap<u32, Term>, FrontendError> {
        let mut out = BTreeMap::new();
        while let Tok::Number(n) = *self.peek() {
            let (line, col) = (self.toks[self.pos].line, self.toks[self.pos].col);
            self.next();
            self.expect(Tok::Colon, "`:`")?;
            let t = self.term()?;
            if !t.is_choice() {
                return Err(FrontendError::Sort {
                    line,
                    col,
                    msg: format!("channel {n} must carry a choice"),
                });
            }
            if out.insert(n, t).is_some() {
                return Err(FrontendError::Parse { line, col, msg: format!("channel {n} declared twice") });
            }
        }
        if out.keys().copied().ne(1..=out.len() as u32) {
            return Err(self.error_here("channel numbers must run contiguously from 1"));
        }
        Ok(out)
    }

    fn local_constraint(&mut self) -> Result<LocalConstraint, FrontendError> {
        let start = self.toks[self.pos].clone();
        let junior = self.variable()?;
        self.expect(Tok::Le, "`<=`")?;
        let senior = self.variable()?;
        if junior.sort() != senior.sort() {
            return Err(FrontendError::Sort {
                line: start.line,
                col: start.col,
                msg: "`<=` relates variables of different sorts".into(),
            });
        }
        self.expect(Tok::Semi, "`;`")?;
        Ok(LocalConstraint { junior, senior, line: start.line })
    }

    fn variable(&mut self) -> Result<Term, FrontendError> {
        match self.peek().clone() {
            Tok::Up(v) => {
                self.next();
                Ok(Term::Up(v))
            }
            Tok::Down(v) => {
                self.next();
                Ok(Term::Down(v))
            }
            _ => Err(self.unexpected("a variable")),
        }
    }
}

impl ComponentInterface {
    fn validate(&self) -> Result<(), FrontendError> {
        let mut declared = BTreeSet::new();
        for t in self.in_channels.values().chain(self.out_channels.values()) {
            t.visit_vars(&mut |s, v| {
                declared.insert((s, v.to_string()));
            });
        }
        for c in &self.local_constraints {
            for t in [&c.junior, &c.senior] {
                let (s, v) = match t {
                    Term::Up(v) => (Sort::Up, v),
                    Term::Down(v) => (Sort::Down, v),
                    _ => unreachable!("local constraints relate variables"),
                };
                if !declared.contains(&(s, v.clone())) {
                    return Err(FrontendError::Invalid(format!(
                        "line {}: `{t}` does not occur in any channel",
                        c.line
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_guard, parse_interface, parse_term};
    use super::*;

    #[test]
    fn records_choices_and_tails() {
        let t = parse_term("{img: vector<vector<double>>, | $_ro1 }").unwrap();
        let Term::Record(c) = &t else { panic!() };
        assert_eq!(c.entries.len(), 1);
        assert_eq!(c.tail.as_deref(), Some("ro1"));
        let t = parse_term("(: init(or c g u): {} | $^r :)").unwrap();
        let Term::Choice(c) = &t else { panic!() };
        assert_eq!(c.entries[0].guard.to_string(), "or c g u");
        assert_eq!(parse_term("(: :)").unwrap(), Term::none());
        assert_eq!(parse_term("{}").unwrap(), Term::nil());
    }

    #[test]
    fn tail_sorts_are_checked() {
        assert!(matches!(parse_term("{x: int | $^t}"), Err(FrontendError::Sort { .. })));
        assert!(matches!(parse_term("(: x: {} | $_t :)"), Err(FrontendError::Sort { .. })));
    }

    #[test]
    fn guard_syntax() {
        let infix = parse_guard("a and not b or c").unwrap();
        let prefix = parse_guard("or (and a (not b)) c").unwrap();
        assert_eq!(infix, prefix);
        assert_eq!(parse_guard("or c g u").unwrap(), parse_guard("c or g or u").unwrap());
        assert!(parse_guard("and").is_err());
    }

    #[test]
    fn interface_errors() {
        assert!(matches!(
            parse_interface("IN 1: (: a: {| $_x} :)\n$_x <= $^y;"),
            Err(FrontendError::Sort { line: 2, .. })
        ));
        assert!(matches!(parse_interface("IN 2: (: :)"), Err(FrontendError::Parse { .. })));
        assert!(matches!(parse_interface("IN 1: {}"), Err(FrontendError::Sort { .. })));
        let i = parse_interface("IN 1: (: :)").unwrap();
        assert_eq!(i.in_channels[&1], Term::none());
    }
}
