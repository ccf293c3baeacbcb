//! The text format for presentations and ideals.
//!
//! ```text
//! # comments run to the end of the line; layout is free
//! ntree COMB
//!   start c
//!   state c  tail 0 1 0 -> z
//!   state z  edge 0 -> z
//! pairtree HALF
//!   start h0
//!   state h0 xtail 0 2 0, 0 -> h1
//!   state h1 dtail 0 1 0 -> h1
//! ideal evens base {} tails {0 2 0}
//! ```
//!
//! `edge`/`tail` lines attach to the most recent `state`.

use std::fmt::Write as _;

use crate::epset::{ArithClass, EPSet};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::ntree::{NTree, NTreeBuilder};
use crate::pairtree::{PairRule, PairTree, PairTreeBuilder};

const KEYWORDS: &[&str] = &[
    "ntree", "pairtree", "ideal", "start", "state", "edge", "tail", "xtail", "ytail", "dtail",
    "base", "tails",
];

/// Name reserved for the Fin ideal.
pub const FIN: &str = "fin";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Definition {
    NTree(NTree),
    PairTree(PairTree),
    Ideal(Ideal),
}

/// Named definitions in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Definitions {
    pub entries: Vec<(String, Definition)>,
}

impl Definitions {
    pub fn get(&self, name: &str) -> Option<&Definition> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    /// The named presentation as a pair tree (trees on ℕ pair with zeros).
    pub fn pair_tree(&self, name: &str) -> Result<PairTree> {
        match self.get(name) {
            Some(Definition::PairTree(s)) => Ok(s.clone()),
            Some(Definition::NTree(t)) => Ok(t.pairize()),
            Some(Definition::Ideal(_)) => Err(Error::Validation(format!("{name} is an ideal"))),
            None => Err(Error::Validation(format!("no definition named {name}"))),
        }
    }

    /// `fin` or a named ideal.
    pub fn ideal(&self, name: &str) -> Result<Ideal> {
        if name == FIN {
            return Ok(Ideal::fin());
        }
        match self.get(name) {
            Some(Definition::Ideal(i)) => Ok(i.clone()),
            Some(_) => Err(Error::Validation(format!("{name} is not an ideal"))),
            None => Err(Error::Validation(format!("no ideal named {name}"))),
        }
    }

    /// Names of tree definitions, in file order.
    pub fn tree_names(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|(_, d)| !matches!(d, Definition::Ideal(_)))
            .map(|(n, _)| n.clone())
            .collect()
    }

    /// Names of ideal definitions, in file order.
    pub fn ideal_names(&self) -> Vec<String> {
        self.entries
            .iter()
            .filter(|(_, d)| matches!(d, Definition::Ideal(_)))
            .map(|(n, _)| n.clone())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, def) in &self.entries {
            out.push_str(&match def {
                Definition::NTree(t) => ntree_to_text(name, t),
                Definition::PairTree(s) => pairtree_to_text(name, s),
                Definition::Ideal(i) => ideal_to_text(name, i),
            });
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Punct(&'static str),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || "_.'+~/@-".contains(c)
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut j = 0;
        while j < chars.len() {
            let c = chars[j];
            let at = |tok| Token {
                tok,
                line: i + 1,
                column: j + 1,
            };
            if c == '#' {
                break;
            } else if c.is_whitespace() {
                j += 1;
            } else if c == '-' && chars.get(j + 1) == Some(&'>') {
                out.push(at(Tok::Punct("->")));
                j += 2;
            } else if let Some(p) = ["(", ")", ",", ";", "{", "}"].iter().find(|p| p.starts_with(c)) {
                out.push(at(Tok::Punct(p)));
                j += 1;
            } else if is_name_char(c) {
                let start = j;
                while j < chars.len()
                    && is_name_char(chars[j])
                    && !(chars[j] == '-' && chars.get(j + 1) == Some(&'>'))
                {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                out.push(Token {
                    tok: Tok::Word(word),
                    line: i + 1,
                    column: start + 1,
                });
            } else {
                return Err(Error::Parse {
                    line: i + 1,
                    column: j + 1,
                    message: format!("unexpected character {c:?}"),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = match self.toks.get(self.pos) {
            Some(t) => (t.line, t.column),
            None => self
                .toks
                .last()
                .map_or((1, 1), |t| (t.line, t.column + 1)),
        };
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn word(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn name(&mut self, what: &str) -> Result<String> {
        let at = self.pos;
        let w = self.word(what)?;
        if KEYWORDS.contains(&w.as_str()) {
            self.pos = at;
            return Err(self.error(format!("keyword {w} cannot be used as {what}")));
        }
        Ok(w)
    }

    fn number(&mut self) -> Result<u64> {
        let at = self.pos;
        let w = self.word("a number")?;
        w.parse().map_err(|_| {
            self.pos = at;
            self.error(format!("expected a number, found {w}"))
        })
    }

    fn class(&mut self) -> Result<ArithClass> {
        let at = self.pos;
        let (k, m, r) = (self.number()?, self.number()?, self.number()?);
        ArithClass::new(k, m, r).map_err(|e| {
            self.pos = at;
            self.error(e.to_string())
        })
    }

    fn punct(&mut self, p: &'static str) -> Result<()> {
        if self.peek() == Some(&Tok::Punct(p)) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{p}'")))
        }
    }

    fn eat_punct(&mut self, p: &'static str) -> bool {
        let hit = self.peek() == Some(&Tok::Punct(p));
        if hit {
            self.pos += 1;
        }
        hit
    }

    /// The next word if it is one of `words`, consumed.
    fn keyword(&mut self, words: &[&str]) -> Option<String> {
        match self.peek() {
            Some(Tok::Word(w)) if words.contains(&w.as_str()) => {
                let w = w.clone();
                self.pos += 1;
                Some(w)
            }
            _ => None,
        }
    }

    fn current_state<'a>(&self, state: &'a Option<String>) -> Result<&'a str> {
        state
            .as_deref()
            .ok_or_else(|| self.error("move before any state declaration"))
    }

    fn ntree(&mut self) -> Result<NTree> {
        let mut b = NTreeBuilder::new();
        let mut state = None;
        while let Some(kw) = self.keyword(&["start", "state", "edge", "tail"]) {
            match kw.as_str() {
                "start" => {
                    let s = self.name("a state name")?;
                    b.start(&s);
                }
                "state" => {
                    let s = self.name("a state name")?;
                    b.state(&s);
                    state = Some(s);
                }
                "edge" => {
                    let from = self.current_state(&state)?.to_string();
                    let a = self.number()?;
                    self.punct("->")?;
                    let to = self.name("a state name")?;
                    b.edge(&from, a, &to);
                }
                _ => {
                    let from = self.current_state(&state)?.to_string();
                    let c = self.class()?;
                    self.punct("->")?;
                    let to = self.name("a state name")?;
                    b.tail(&from, c, &to);
                }
            }
        }
        b.build()
    }

    fn pairtree(&mut self) -> Result<PairTree> {
        let mut b = PairTreeBuilder::new();
        let mut state = None;
        while let Some(kw) = self.keyword(&["start", "state", "edge", "xtail", "ytail", "dtail"]) {
            if kw == "start" || kw == "state" {
                let s = self.name("a state name")?;
                if kw == "start" {
                    b.start(&s);
                } else {
                    b.state(&s);
                    state = Some(s);
                }
                continue;
            }
            let from = self.current_state(&state)?.to_string();
            let rule = match kw.as_str() {
                "edge" => {
                    self.punct("(")?;
                    let x = self.number()?;
                    self.punct(",")?;
                    let y = self.number()?;
                    self.punct(")")?;
                    PairRule::Edge { x, y }
                }
                "xtail" => {
                    let x = self.class()?;
                    self.punct(",")?;
                    PairRule::XTail { x, y: self.number()? }
                }
                "ytail" => {
                    let x = self.number()?;
                    self.punct(",")?;
                    PairRule::YTail { x, y: self.class()? }
                }
                _ => PairRule::DTail(self.class()?),
            };
            self.punct("->")?;
            let to = self.name("a state name")?;
            b.rule(&from, rule, &to);
        }
        b.build()
    }

    fn ideal(&mut self) -> Result<Ideal> {
        let mut base = EPSet::empty();
        if self.keyword(&["base"]).is_some() {
            self.punct("{")?;
            if !self.eat_punct("}") {
                loop {
                    base.insert(self.number()?);
                    if self.eat_punct("}") {
                        break;
                    }
                    self.punct(",")?;
                }
            }
        }
        if self.keyword(&["tails"]).is_some() {
            self.punct("{")?;
            if !self.eat_punct("}") {
                loop {
                    base.insert_class(self.class()?);
                    if self.eat_punct("}") {
                        break;
                    }
                    self.punct(";")?;
                }
            }
        }
        Ideal::dilute(base)
    }
}

/// Parses and validates a definitions file.
pub fn parse_definitions(text: &str) -> Result<Definitions> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
    };
    let mut defs = Definitions::default();
    while p.peek().is_some() {
        let Some(kind) = p.keyword(&["ntree", "pairtree", "ideal"]) else {
            return Err(p.error("expected ntree, pairtree or ideal"));
        };
        let at = p.pos;
        let name = p.name("a definition name")?;
        if defs.get(&name).is_some() || (kind == "ideal" && name == FIN) {
            p.pos = at;
            return Err(p.error(format!("name {name} is already defined or reserved")));
        }
        let context = |e: Error| match e {
            Error::Validation(m) => Error::Validation(format!("{kind} {name}: {m}")),
            Error::ImproperIdeal => {
                Error::Validation(format!("ideal {name}: base complement is finite (improper)"))
            }
            other => other,
        };
        let def = match kind.as_str() {
            "ntree" => Definition::NTree(p.ntree().map_err(context)?),
            "pairtree" => Definition::PairTree(p.pairtree().map_err(context)?),
            _ => Definition::Ideal(p.ideal().map_err(context)?),
        };
        defs.entries.push((name, def));
    }
    Ok(defs)
}

fn class_text(c: &ArithClass) -> String {
    format!("{} {} {}", c.threshold(), c.modulus(), c.residue())
}

pub fn ntree_to_text(name: &str, t: &NTree) -> String {
    let mut out = format!("ntree {name}\n  start {}\n", t.name(t.start()));
    for (q, st) in t.states().iter().enumerate() {
        writeln!(out, "  state {}", t.name(q)).unwrap();
        for (a, &to) in &st.edges {
            writeln!(out, "    edge {a} -> {}", t.name(to)).unwrap();
        }
        for (c, to) in &st.tails {
            writeln!(out, "    tail {} -> {}", class_text(c), t.name(*to)).unwrap();
        }
    }
    out
}

pub fn pairtree_to_text(name: &str, s: &PairTree) -> String {
    let mut out = format!("pairtree {name}\n  start {}\n", s.name(s.start()));
    for (q, st) in s.states().iter().enumerate() {
        writeln!(out, "  state {}", s.name(q)).unwrap();
        for (r, to) in &st.rules {
            let body = match r {
                PairRule::Edge { x, y } => format!("edge ({x},{y})"),
                PairRule::XTail { x, y } => format!("xtail {}, {y}", class_text(x)),
                PairRule::YTail { x, y } => format!("ytail {x}, {}", class_text(y)),
                PairRule::DTail(c) => format!("dtail {}", class_text(c)),
            };
            writeln!(out, "    {body} -> {}", s.name(*to)).unwrap();
        }
    }
    out
}

pub fn ideal_to_text(name: &str, i: &Ideal) -> String {
    let base = i.base();
    let letters: Vec<String> = base.explicit.iter().map(u64::to_string).collect();
    let tails: Vec<String> = base.classes.iter().map(class_text).collect();
    format!(
        "ideal {name}\n  base {{{}}} tails {{{}}}\n",
        letters.join(","),
        tails.join("; ")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::truncate_enumerate;

    const SAMPLE: &str = "
        # the full tree and a comb
        ntree FULL start q state q tail 0 1 0 -> q
        ntree COMB
          start c
          state c tail 0 1 0 -> z
          state z edge 0 -> z
        pairtree HALF
          start h0
          state h0 xtail 0 2 0, 0 -> h1
          state h1 dtail 0 1 0 -> h1
        pairtree MIX
          start a
          state a edge (0,1) -> a
                  ytail 1, 2 3 1 -> a
        ideal evens base {} tails {0 2 0}
        ideal odd3 base {3,5} tails {1 2 1}
    ";

    #[test]
    fn parses_every_kind() {
        let defs = parse_definitions(SAMPLE).unwrap();
        assert_eq!(defs.tree_names(), ["FULL", "COMB", "HALF", "MIX"]);
        assert_eq!(defs.ideal_names(), ["evens", "odd3"]);
        let Some(Definition::NTree(full)) = defs.get("FULL") else {
            panic!()
        };
        assert_eq!(full, &crate::ntree::fixtures::full());
        assert_eq!(defs.pair_tree("HALF").unwrap(), crate::pairtree::fixtures::half());
        assert!(defs.ideal("fin").unwrap().is_fin());
        assert!(defs.ideal("evens").unwrap().contains(&EPSet::from_letters([1])));
    }

    #[test]
    fn round_trip_is_exact() {
        let defs = parse_definitions(SAMPLE).unwrap();
        let text = defs.to_text();
        let again = parse_definitions(&text).unwrap();
        assert_eq!(again, defs);
        assert_eq!(again.to_text(), text);
        for name in defs.tree_names() {
            let a = defs.pair_tree(&name).unwrap();
            let b = again.pair_tree(&name).unwrap();
            assert_eq!(truncate_enumerate(&a, 3, 6), truncate_enumerate(&b, 3, 6));
        }
    }

    #[test]
    fn overlap_is_a_validation_error() {
        let e = parse_definitions("ntree T start q state q edge 2 -> q tail 0 2 0 -> q").unwrap_err();
        assert!(matches!(e, Error::Validation(m) if m.contains("letter 2")));
    }

    #[test]
    fn diagnostics_carry_positions() {
        let e = parse_definitions("ntree T\n  start q\n  state q edge x -> q").unwrap_err();
        assert_eq!(
            e,
            Error::Parse {
                line: 3,
                column: 16,
                message: "expected a number, found x".into()
            }
        );
        assert!(matches!(
            parse_definitions("ntree T start q edge 0 -> q"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(parse_definitions("ntree T start q state q $"), Err(Error::Parse { .. })));
    }

    #[test]
    fn invalid_definitions() {
        assert!(matches!(
            parse_definitions("ntree T start q state q edge 0 -> r"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            parse_definitions("ideal all base {} tails {0 2 0; 0 2 1}"),
            Err(Error::Validation(m)) if m.contains("improper")
        ));
        assert!(matches!(parse_definitions("ideal fin base {}"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_definitions("ntree A start q state q edge 0 -> q ntree A start q state q edge 0 -> q"),
            Err(Error::Parse { .. })
        ));
    }
}
