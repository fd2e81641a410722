//! Requisite expressions: `&`, `|` and parentheses over course codes, with
//! `|` binding looser than `&`. Parsed expressions are normalized to
//! disjunctive normal form.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A requisite in disjunctive normal form: the requirement holds when every
/// code of at least one conjunction is satisfied. No disjuncts means no
/// requirement.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RequisiteExpr {
    disjuncts: Vec<Vec<String>>,
}

impl RequisiteExpr {
    pub fn none() -> RequisiteExpr {
        RequisiteExpr::default()
    }

    /// Builds an expression from conjunctions, dropping duplicate codes,
    /// duplicate conjunctions and conjunctions that are supersets of another.
    ///
    /// Panics if a conjunction is empty.
    pub fn from_dnf<I, C, S>(disjuncts: I) -> RequisiteExpr
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let raw: Vec<Vec<String>> = disjuncts
            .into_iter()
            .map(|c| c.into_iter().map(Into::into).collect())
            .collect();
        assert!(raw.iter().all(|c| !c.is_empty()), "empty conjunction in requisite");
        RequisiteExpr { disjuncts: simplify(raw) }
    }

    pub fn parse(text: &str) -> Result<RequisiteExpr, String> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Ok(RequisiteExpr::none());
        }
        let mut parser = Parser { tokens: &tokens, pos: 0 };
        let dnf = parser.or()?;
        if parser.pos != tokens.len() {
            return Err(format!("unexpected `{}`", tokens[parser.pos]));
        }
        Ok(RequisiteExpr { disjuncts: simplify(dnf) })
    }

    pub fn disjuncts(&self) -> &[Vec<String>] {
        &self.disjuncts
    }

    pub fn is_empty(&self) -> bool {
        self.disjuncts.is_empty()
    }

    /// Every code mentioned anywhere in the expression, first occurrence
    /// order.
    pub fn codes(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for code in self.disjuncts.iter().flatten() {
            if !out.contains(&code.as_str()) {
                out.push(code);
            }
        }
        out
    }

    /// Rewrites every code through `f`, re-simplifying afterwards.
    pub fn try_map_codes<E>(&self, mut f: impl FnMut(&str) -> Result<String, E>) -> Result<RequisiteExpr, E> {
        let mut out = Vec::with_capacity(self.disjuncts.len());
        for conj in &self.disjuncts {
            let mut mapped = Vec::with_capacity(conj.len());
            for code in conj {
                mapped.push(f(code)?);
            }
            out.push(mapped);
        }
        Ok(RequisiteExpr { disjuncts: simplify(out) })
    }

    /// Direct DNF evaluation.
    pub fn satisfied_by(&self, mut holds: impl FnMut(&str) -> bool) -> bool {
        self.disjuncts.is_empty() || self.disjuncts.iter().any(|c| c.iter().all(|code| holds(code)))
    }
}

impl fmt::Display for RequisiteExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, conj) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            f.write_str(&conj.join(" & "))?;
        }
        Ok(())
    }
}

fn simplify(raw: Vec<Vec<String>>) -> Vec<Vec<String>> {
    let mut conjs: Vec<Vec<String>> = raw
        .into_iter()
        .map(|c| {
            let mut seen = Vec::with_capacity(c.len());
            for code in c {
                if !seen.contains(&code) {
                    seen.push(code);
                }
            }
            seen
        })
        .collect();
    let is_subset = |a: &[String], b: &[String]| a.iter().all(|x| b.contains(x));
    let mut keep = vec![true; conjs.len()];
    for i in 0..conjs.len() {
        for j in 0..conjs.len() {
            if i == j || !keep[j] {
                continue;
            }
            // j absorbs i when j ⊆ i; among equal sets the earlier one survives
            let absorbs = is_subset(&conjs[j], &conjs[i])
                && (conjs[j].len() < conjs[i].len() || j < i);
            if absorbs {
                keep[i] = false;
                break;
            }
        }
    }
    let mut idx = 0;
    conjs.retain(|_| {
        idx += 1;
        keep[idx - 1]
    });
    conjs
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Code(String),
    And,
    Or,
    Open,
    Close,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Code(c) => f.write_str(c),
            Token::And => f.write_str("&"),
            Token::Or => f.write_str("|"),
            Token::Open => f.write_str("("),
            Token::Close => f.write_str(")"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>, String> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(start, ch)) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '&' => {
                chars.next();
                tokens.push(Token::And);
            }
            '|' => {
                chars.next();
                tokens.push(Token::Or);
            }
            '(' => {
                chars.next();
                tokens.push(Token::Open);
            }
            ')' => {
                chars.next();
                tokens.push(Token::Close);
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let mut end = start;
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        end = i + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Code(text[start..end].to_string()));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(tokens)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn or(&mut self) -> Result<Vec<Vec<String>>, String> {
        let mut dnf = self.and()?;
        while self.peek() == Some(&Token::Or) {
            self.pos += 1;
            dnf.extend(self.and()?);
        }
        Ok(dnf)
    }

    fn and(&mut self) -> Result<Vec<Vec<String>>, String> {
        let mut dnf = self.atom()?;
        while self.peek() == Some(&Token::And) {
            self.pos += 1;
            let rhs = self.atom()?;
            let mut product = Vec::with_capacity(dnf.len() * rhs.len());
            for left in &dnf {
                for right in &rhs {
                    let mut conj = left.clone();
                    conj.extend(right.iter().cloned());
                    product.push(conj);
                }
            }
            dnf = product;
        }
        Ok(dnf)
    }

    fn atom(&mut self) -> Result<Vec<Vec<String>>, String> {
        match self.tokens.get(self.pos) {
            Some(Token::Code(code)) => {
                self.pos += 1;
                Ok(vec![vec![code.clone()]])
            }
            Some(Token::Open) => {
                self.pos += 1;
                let inner = self.or()?;
                if self.peek() != Some(&Token::Close) {
                    return Err("missing `)`".to_string());
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(tok) => Err(format!("unexpected `{tok}`")),
            None => Err("unexpected end of expression".to_string()),
        }
    }
}
