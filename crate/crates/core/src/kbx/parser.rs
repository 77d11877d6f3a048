use crate::kb::{ClassExpression, Datatype, Family, Name};

use super::lexer::{tokenize, Spanned, Tok};
use super::ParseError;

/// Literal as written, before coercion to the attribute's datatype.
#[derive(Debug, Clone, PartialEq)]
pub enum RawLiteral {
    Str(String),
    Int(i64),
    Decimal(f64),
    Bool(bool),
}

/// One KBX statement.
#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Ontology(String),
    License(String),
    Class {
        name: Name,
        definition: Option<ClassExpression>,
        parents: Vec<Name>,
    },
    Prop {
        name: Name,
        family: Family,
        domain: Vec<Name>,
        range: Vec<Name>,
        inverse: Option<Name>,
    },
    Data {
        name: Name,
        domain: Name,
        datatype: Datatype,
    },
    Ind {
        name: Name,
        types: Vec<Name>,
    },
    Fact {
        subject: Name,
        relation: Name,
        object: Name,
    },
    FactData {
        subject: Name,
        attribute: Name,
        value: RawLiteral,
    },
    Label {
        subject: Name,
        text: String,
    },
    Comment {
        subject: Name,
        text: String,
    },
}

/// Parsed statements with their 1-based source lines, in file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KbxDocument {
    pub statements: Vec<(usize, Statement)>,
}

struct Cursor {
    toks: Vec<Spanned>,
    pos: usize,
    line: usize,
    /// Column just past the last character of the line.
    end_column: usize,
}

impl Cursor {
    fn new(text: &str, line: usize) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: tokenize(text, line)?,
            pos: 0,
            line,
            end_column: text.chars().count() + 1,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset).map(|s| &s.tok)
    }

    fn error(&self, expected: &str) -> ParseError {
        let (column, found) = match self.toks.get(self.pos) {
            Some(s) => (s.column, s.tok.describe()),
            None => (self.end_column, "end of line".to_string()),
        };
        ParseError {
            line: self.line,
            column,
            expected: expected.to_string(),
            found,
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => match self.next() {
                Some(Tok::Ident(s)) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.error("name")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(&format!("`{kw}`"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn punct(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(&format!("`{c}`"))),
        }
    }

    fn at_punct(&self, c: char) -> bool {
        matches!(self.peek(), Some(Tok::Punct(p)) if *p == c)
    }

    fn string(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Str(_)) => match self.next() {
                Some(Tok::Str(s)) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.error("string literal")),
        }
    }

    fn namelist(&mut self) -> Result<Vec<Name>, ParseError> {
        let mut names = vec![self.name()?];
        while self.at_punct(',') {
            self.pos += 1;
            names.push(self.name()?);
        }
        Ok(names)
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.error("end of line"))
        }
    }

    fn expr(&mut self) -> Result<ClassExpression, ParseError> {
        let head = self.name().map_err(|_| self.error("class expression"))?;
        let is_call = matches!(self.peek(), Some(Tok::Punct('(')));
        if !is_call {
            return Ok(ClassExpression::Named(head));
        }
        match head.as_str() {
            "and" | "or" => {
                self.punct('(')?;
                let mut ops = vec![self.expr()?];
                while self.at_punct(',') {
                    self.pos += 1;
                    ops.push(self.expr()?);
                }
                if ops.len() < 2 {
                    return Err(self.error("`,` and a second operand"));
                }
                self.punct(')')?;
                Ok(if head == "and" {
                    ClassExpression::And(ops)
                } else {
                    ClassExpression::Or(ops)
                })
            }
            "some" => {
                self.punct('(')?;
                let relation = self.name()?;
                self.punct(',')?;
                let filler = self.expr()?;
                self.punct(')')?;
                Ok(ClassExpression::some(relation, filler))
            }
            "min" => {
                self.punct('(')?;
                let n = match self.peek() {
                    Some(Tok::Int(n)) if *n >= 1 && *n <= u32::MAX as i64 => *n as u32,
                    _ => return Err(self.error("positive integer")),
                };
                self.pos += 1;
                self.punct(',')?;
                let relation = self.name()?;
                self.punct(',')?;
                let filler = self.expr()?;
                self.punct(')')?;
                Ok(ClassExpression::min(n, relation, filler))
            }
            _ => Err(self.error("end of expression")),
        }
    }

    fn literal(&mut self) -> Result<RawLiteral, ParseError> {
        let lit = match self.peek() {
            Some(Tok::Str(s)) => RawLiteral::Str(s.clone()),
            Some(Tok::Int(n)) => RawLiteral::Int(*n),
            Some(Tok::Decimal(x)) => RawLiteral::Decimal(*x),
            Some(Tok::Ident(s)) if s == "true" => RawLiteral::Bool(true),
            Some(Tok::Ident(s)) if s == "false" => RawLiteral::Bool(false),
            _ => return Err(self.error("literal")),
        };
        self.pos += 1;
        Ok(lit)
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        let kw = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return Err(self.error("statement keyword")),
        };
        let stmt = match kw.as_str() {
            "ontology" => {
                self.pos += 1;
                Statement::Ontology(self.string()?)
            }
            "license" => {
                self.pos += 1;
                Statement::License(self.string()?)
            }
            "class" => {
                self.pos += 1;
                let name = self.name()?;
                let mut definition = None;
                if self.at_keyword("defined") && matches!(self.peek_at(1), Some(Tok::Punct('='))) {
                    self.pos += 2;
                    definition = Some(self.expr()?);
                }
                let mut parents = Vec::new();
                if self.at_keyword("sub") {
                    self.pos += 1;
                    parents = self.namelist()?;
                }
                Statement::Class {
                    name,
                    definition,
                    parents,
                }
            }
            "prop" => {
                self.pos += 1;
                let name = self.name()?;
                self.keyword("family")?;
                let family = match self.peek() {
                    Some(Tok::Ident(f)) => Family::parse(f),
                    _ => None,
                }
                .ok_or_else(|| self.error("relation family"))?;
                self.pos += 1;
                let mut domain = Vec::new();
                let mut range = Vec::new();
                let mut inverse = None;
                if self.at_keyword("domain") {
                    self.pos += 1;
                    domain = self.namelist()?;
                }
                if self.at_keyword("range") {
                    self.pos += 1;
                    range = self.namelist()?;
                }
                if self.at_keyword("inverse") {
                    self.pos += 1;
                    inverse = Some(self.name()?);
                }
                Statement::Prop {
                    name,
                    family,
                    domain,
                    range,
                    inverse,
                }
            }
            "data" => {
                self.pos += 1;
                let name = self.name()?;
                self.keyword("domain")?;
                let domain = self.name()?;
                self.keyword("range")?;
                let datatype = match self.peek() {
                    Some(Tok::Ident(d)) => Datatype::parse(d),
                    _ => None,
                }
                .ok_or_else(|| self.error("datatype"))?;
                self.pos += 1;
                Statement::Data {
                    name,
                    domain,
                    datatype,
                }
            }
            "ind" => {
                self.pos += 1;
                let name = self.name()?;
                self.punct(':')?;
                let types = if self.pos == self.toks.len() {
                    Vec::new()
                } else {
                    self.namelist()?
                };
                Statement::Ind { name, types }
            }
            "fact" => {
                self.pos += 1;
                Statement::Fact {
                    subject: self.name()?,
                    relation: self.name()?,
                    object: self.name()?,
                }
            }
            "factd" => {
                self.pos += 1;
                Statement::FactData {
                    subject: self.name()?,
                    attribute: self.name()?,
                    value: self.literal()?,
                }
            }
            "label" => {
                self.pos += 1;
                Statement::Label {
                    subject: self.name()?,
                    text: self.string()?,
                }
            }
            "comment" => {
                self.pos += 1;
                Statement::Comment {
                    subject: self.name()?,
                    text: self.string()?,
                }
            }
            _ => return Err(self.error("statement keyword")),
        };
        self.end()?;
        Ok(stmt)
    }
}

/// Parses KBX text into statements without resolving names.
pub fn parse_document(text: &str) -> Result<KbxDocument, ParseError> {
    let mut doc = KbxDocument::default();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = line.trim_start_matches([' ', '\t']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut cursor = Cursor::new(line, idx + 1)?;
        doc.statements.push((idx + 1, cursor.statement()?));
    }
    Ok(doc)
}

/// Parses a standalone class expression (single line).
pub fn parse_expression(text: &str) -> Result<ClassExpression, ParseError> {
    let mut cursor = Cursor::new(text, 1)?;
    let e = cursor.expr()?;
    cursor.end()?;
    Ok(e)
}
