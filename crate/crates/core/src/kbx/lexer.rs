use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    Decimal(f64),
    Str(String),
    Punct(char),
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Decimal(x) => format!("decimal {x}"),
            Tok::Str(_) => "string literal".to_string(),
            Tok::Punct(c) => format!("`{c}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    /// 1-based character column of the first character.
    pub column: usize,
}

/// Splits one line into tokens. `line` is the 1-based line number used in errors.
pub(crate) fn tokenize(text: &str, line: usize) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, expected: &str, found: String| ParseError {
        line,
        column: col,
        expected: expected.to_string(),
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c == ' ' || c == '\t' {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                column,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_decimal = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                is_decimal = true;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < chars.len() && (chars[i].is_ascii_alphabetic() || chars[i] == '_' || chars[i] == '.') {
                return Err(err(i + 1, "delimiter after number", format!("`{}`", chars[i])));
            }
            let lexeme: String = chars[start..i].iter().collect();
            let tok = if is_decimal {
                match lexeme.parse::<f64>() {
                    Ok(x) if x.is_finite() => Tok::Decimal(x),
                    _ => return Err(err(column, "finite decimal", format!("`{lexeme}`"))),
                }
            } else {
                match lexeme.parse::<i64>() {
                    Ok(n) => Tok::Int(n),
                    Err(_) => return Err(err(column, "64-bit integer", format!("`{lexeme}`"))),
                }
            };
            out.push(Spanned { tok, column });
            continue;
        }
        if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(err(i + 1, "closing `\"`", "end of line".to_string())),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => match chars.get(i + 1) {
                        Some(&e @ ('"' | '\\')) => {
                            s.push(e);
                            i += 2;
                        }
                        Some(other) => {
                            return Err(err(i + 1, "`\\\"` or `\\\\` escape", format!("`\\{other}`")))
                        }
                        None => return Err(err(i + 2, "escape character", "end of line".to_string())),
                    },
                    Some(&ch) if ch.is_control() => {
                        return Err(err(i + 1, "printable character", format!("{:?}", ch)))
                    }
                    Some(&ch) => {
                        s.push(ch);
                        i += 1;
                    }
                }
            }
            out.push(Spanned {
                tok: Tok::Str(s),
                column,
            });
            continue;
        }
        if matches!(c, '=' | ':' | ',' | '(' | ')') {
            out.push(Spanned {
                tok: Tok::Punct(c),
                column,
            });
            i += 1;
            continue;
        }
        return Err(err(column, "token", format!("`{c}`")));
    }
    Ok(out)
}
