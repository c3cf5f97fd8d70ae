//! Line-oriented netlist parser.
//!
//! ```text
//! program  := line*
//! line     := compdecl | stmt | comment | blank
//! compdecl := KIND NAME (KEY "=" VALUE)*
//! stmt     := "series" NAME NAME "->" NAME
//!           | "concat" NAME+ "->" NAME
//!           | "feedback" NAME PAIR+ ["gain" NAME]
//!           | "loop" NAME
//!           | "output" NAME
//! PAIR     := PORT ":" PORT
//! VALUE    := NUM | STRING
//! NUM      := ["+"|"-"] FACTOR (("*"|"/") FACTOR)*      FACTOR := float | "pi"
//! ```
//!
//! `#` starts a comment outside of strings. Strings are double-quoted with
//! `\"` and `\\` escapes.

use std::collections::HashSet;
use std::f64::consts::PI;

use thiserror::Error;

use crate::ast::{ComponentDecl, Kind, Location, NetworkSpec, Param, ParamType, Statement, StatementKind, Value};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseError {
    #[error("{location}: syntax error: {message}")]
    Syntax { location: Location, message: String },

    #[error("{location}: undefined name `{name}`")]
    UndefinedName { location: Location, name: String },

    #[error("{location}: duplicate name `{name}`")]
    DuplicateName { location: Location, name: String },
}

impl ParseError {
    pub fn location(&self) -> Location {
        match self {
            ParseError::Syntax { location, .. }
            | ParseError::UndefinedName { location, .. }
            | ParseError::DuplicateName { location, .. } => *location,
        }
    }
}

const KEYWORDS: &[&str] = &[
    "cavity", "phase", "beamsplitter", "qubit_coupler", "custom", "series", "concat", "feedback", "loop", "output",
    "gain",
];

/// Largest accepted `dim` or `n`; the dense algebra is quadratic in the total
/// dimension so anything larger is almost certainly a typo.
const MAX_COUNT: f64 = 4096.0;

#[derive(Debug)]
struct Token {
    text: String,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        location: Location { line, column },
        message: message.into(),
    }
}

/// Splits a line into whitespace-separated tokens; quoted sections may
/// contain spaces and `#`.
fn tokenize(text: &str, line: usize) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut current: Option<Token> = None;
    let mut in_string = false;
    let mut escaped = false;
    let mut string_start = 0;
    for (idx, ch) in text.chars().enumerate() {
        let column = idx + 1;
        if in_string {
            let tok = current.as_mut().expect("inside a token");
            tok.text.push(ch);
            if escaped {
                escaped = false;
            } else if ch == '\\' {
                escaped = true;
            } else if ch == '"' {
                in_string = false;
            }
            continue;
        }
        match ch {
            '#' => break,
            c if c.is_whitespace() => {
                if let Some(tok) = current.take() {
                    tokens.push(tok);
                }
            }
            c => {
                let tok = current.get_or_insert_with(|| Token {
                    text: String::new(),
                    column,
                });
                tok.text.push(c);
                if c == '"' {
                    in_string = true;
                    string_start = column;
                }
            }
        }
    }
    if in_string {
        return Err(syntax(line, string_start, "unterminated string"));
    }
    tokens.extend(current);
    Ok(tokens)
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn is_port(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-'))
}

fn parse_factor(s: &str) -> Option<f64> {
    let (sign, body) = match s.as_bytes().first() {
        Some(b'-') => (-1.0, &s[1..]),
        Some(b'+') => (1.0, &s[1..]),
        _ => (1.0, s),
    };
    if body == "pi" {
        return Some(sign * PI);
    }
    // reject the words `inf` and `nan` that f64::from_str would accept
    if !body.starts_with(|c: char| c.is_ascii_digit() || c == '.') {
        return None;
    }
    body.parse::<f64>().ok().map(|x| sign * x)
}

/// Evaluates `NUM`; `None` if malformed or not finite.
pub fn parse_number(s: &str) -> Option<f64> {
    let mut value = None;
    let mut op = '*';
    let mut start = 0;
    let bytes = s.as_bytes();
    for i in 0..=bytes.len() {
        let at_op = i < bytes.len() && (bytes[i] == b'*' || bytes[i] == b'/');
        if i == bytes.len() || at_op {
            let x = parse_factor(&s[start..i])?;
            value = Some(match (value, op) {
                (None, _) => x,
                (Some(acc), '*') => acc * x,
                (Some(acc), _) => acc / x,
            });
            if i < bytes.len() {
                op = bytes[i] as char;
                start = i + 1;
            }
        }
    }
    value.filter(|x: &f64| x.is_finite())
}

fn parse_string(raw: &str) -> Option<String> {
    let inner = raw.strip_prefix('"')?.strip_suffix('"')?;
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next()? {
                c @ ('"' | '\\') => out.push(c),
                _ => return None,
            },
            '"' => return None,
            c => out.push(c),
        }
    }
    Some(out)
}

struct Parser {
    spec: NetworkSpec,
    names: HashSet<String>,
    output_line: Option<usize>,
}

impl Parser {
    fn define(&mut self, name: &str, location: Location) -> Result<(), ParseError> {
        if !is_identifier(name) || KEYWORDS.contains(&name) {
            return Err(ParseError::Syntax {
                location,
                message: format!("`{name}` is not a valid name"),
            });
        }
        if !self.names.insert(name.to_string()) {
            return Err(ParseError::DuplicateName {
                location,
                name: name.to_string(),
            });
        }
        Ok(())
    }

    fn reference(&self, tok: &Token, line: usize) -> Result<String, ParseError> {
        let location = Location {
            line,
            column: tok.column,
        };
        if !is_identifier(&tok.text) || KEYWORDS.contains(&tok.text.as_str()) {
            return Err(ParseError::Syntax {
                location,
                message: format!("expected a name, found `{}`", tok.text),
            });
        }
        if !self.names.contains(&tok.text) {
            return Err(ParseError::UndefinedName {
                location,
                name: tok.text.clone(),
            });
        }
        Ok(tok.text.clone())
    }

    fn component(&mut self, kind: Kind, tokens: &[Token], line: usize) -> Result<(), ParseError> {
        let head = &tokens[0];
        let name_tok = tokens
            .get(1)
            .ok_or_else(|| syntax(line, head.column + head.text.chars().count(), "expected a component name"))?;
        let location = Location {
            line,
            column: name_tok.column,
        };
        self.define(&name_tok.text, location)?;

        let schema = kind.params();
        let mut params: Vec<Param> = Vec::new();
        for tok in &tokens[2..] {
            let (key, raw) = tok
                .text
                .split_once('=')
                .ok_or_else(|| syntax(line, tok.column, format!("expected key=value, found `{}`", tok.text)))?;
            let value_column = tok.column + key.chars().count() + 1;
            let (_, ty, _) = schema.iter().find(|(k, _, _)| *k == key).ok_or_else(|| {
                syntax(line, tok.column, format!("`{}` has no parameter `{key}`", kind.keyword()))
            })?;
            if params.iter().any(|p| p.key == key) {
                return Err(syntax(line, tok.column, format!("parameter `{key}` given twice")));
            }
            let value = match ty {
                ParamType::Text => Value::Str(
                    parse_string(raw).ok_or_else(|| syntax(line, value_column, format!("expected a string for `{key}`")))?,
                ),
                ParamType::Real => Value::Num(
                    parse_number(raw).ok_or_else(|| syntax(line, value_column, format!("invalid number `{raw}`")))?,
                ),
                ParamType::Count => {
                    let x = parse_number(raw).filter(|x| x.fract() == 0.0 && (0.0..=MAX_COUNT).contains(x));
                    Value::Num(x.ok_or_else(|| {
                        syntax(line, value_column, format!("`{key}` must be a whole number, found `{raw}`"))
                    })?)
                }
            };
            params.push(Param {
                key: key.to_string(),
                value,
            });
        }
        for (key, _, required) in schema {
            if *required && !params.iter().any(|p| p.key == *key) {
                return Err(syntax(
                    line,
                    name_tok.column,
                    format!("`{}` requires parameter `{key}`", kind.keyword()),
                ));
            }
        }
        self.spec.components.push(ComponentDecl {
            kind,
            name: name_tok.text.clone(),
            params,
            location,
        });
        Ok(())
    }

    /// Parses `... "->" NAME` at the end of `tokens`, returning the sources.
    fn arrow_target<'t>(&mut self, tokens: &'t [Token], line: usize) -> Result<(&'t [Token], String), ParseError> {
        let arrow = tokens
            .iter()
            .position(|t| t.text == "->")
            .ok_or_else(|| syntax(line, tokens[0].column, format!("`{}` needs `-> target`", tokens[0].text)))?;
        let rest = &tokens[arrow + 1..];
        let target = match rest {
            [t] => t,
            [] => return Err(syntax(line, tokens[arrow].column + 2, "expected a target name after `->`")),
            [_, extra, ..] => return Err(syntax(line, extra.column, format!("unexpected `{}`", extra.text))),
        };
        Ok((&tokens[1..arrow], target.text.clone()))
    }

    fn statement(&mut self, tokens: &[Token], line: usize) -> Result<(), ParseError> {
        let head = &tokens[0];
        let location = Location {
            line,
            column: head.column,
        };
        let end_column = |t: &Token| t.column + t.text.chars().count();
        let expect_single = |tokens: &[Token]| -> Result<(), ParseError> {
            match tokens.len() {
                2 => Ok(()),
                1 => Err(syntax(line, end_column(&tokens[0]) + 1, format!("`{}` needs a name", tokens[0].text))),
                _ => Err(syntax(line, tokens[2].column, format!("unexpected `{}`", tokens[2].text))),
            }
        };
        let kind = match head.text.as_str() {
            "series" => {
                let (sources, target) = self.arrow_target(tokens, line)?;
                if sources.len() != 2 {
                    return Err(syntax(line, head.column, "`series` takes exactly two names before `->`"));
                }
                let first = self.reference(&sources[0], line)?;
                let second = self.reference(&sources[1], line)?;
                let target_tok = tokens.last().expect("target");
                self.define(&target, Location { line, column: target_tok.column })?;
                StatementKind::Series { first, second, target }
            }
            "concat" => {
                let (sources, target) = self.arrow_target(tokens, line)?;
                if sources.is_empty() {
                    return Err(syntax(line, head.column, "`concat` needs at least one name before `->`"));
                }
                let parts = sources
                    .iter()
                    .map(|t| self.reference(t, line))
                    .collect::<Result<Vec<_>, _>>()?;
                let target_tok = tokens.last().expect("target");
                self.define(&target, Location { line, column: target_tok.column })?;
                StatementKind::Concat { parts, target }
            }
            "feedback" => {
                let name_tok = tokens
                    .get(1)
                    .ok_or_else(|| syntax(line, end_column(head) + 1, "`feedback` needs a name"))?;
                let name = self.reference(name_tok, line)?;
                let mut pairs = Vec::new();
                let mut gain = None;
                let mut rest = tokens[2..].iter();
                while let Some(tok) = rest.next() {
                    if tok.text == "gain" {
                        let g = rest
                            .next()
                            .ok_or_else(|| syntax(line, end_column(tok) + 1, "`gain` needs a name"))?;
                        gain = Some(self.reference(g, line)?);
                        if let Some(extra) = rest.next() {
                            return Err(syntax(line, extra.column, format!("unexpected `{}`", extra.text)));
                        }
                        break;
                    }
                    let pair = tok
                        .text
                        .split_once(':')
                        .filter(|(a, b)| is_port(a) && is_port(b))
                        .ok_or_else(|| syntax(line, tok.column, format!("expected out:in port pair, found `{}`", tok.text)))?;
                    pairs.push((pair.0.to_string(), pair.1.to_string()));
                }
                if pairs.is_empty() {
                    return Err(syntax(line, head.column, "`feedback` needs at least one port pair"));
                }
                StatementKind::Feedback { name, pairs, gain }
            }
            "loop" => {
                expect_single(tokens)?;
                StatementKind::Loop {
                    name: self.reference(&tokens[1], line)?,
                }
            }
            "output" => {
                expect_single(tokens)?;
                let name = self.reference(&tokens[1], line)?;
                if let Some(first) = self.output_line {
                    return Err(syntax(line, head.column, format!("second output statement (first on line {first})")));
                }
                self.output_line = Some(line);
                StatementKind::Output { name }
            }
            other => return Err(syntax(line, head.column, format!("unknown keyword `{other}`"))),
        };
        self.spec.statements.push(Statement { kind, location });
        Ok(())
    }
}

/// Parses a netlist. Names must be declared before use and the program
/// must contain exactly one `output` statement.
pub fn parse_netspec(text: &str) -> Result<NetworkSpec, ParseError> {
    let mut parser = Parser {
        spec: NetworkSpec::default(),
        names: HashSet::new(),
        output_line: None,
    };
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let tokens = tokenize(raw, line)?;
        let Some(head) = tokens.first() else { continue };
        match Kind::parse(&head.text) {
            Some(kind) => parser.component(kind, &tokens, line)?,
            None => parser.statement(&tokens, line)?,
        }
    }
    if parser.output_line.is_none() {
        return Err(syntax(last_line + 1, 1, "missing output statement"));
    }
    Ok(parser.spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_program() {
        let spec = parse_netspec("cavity c1 omega=1 gamma=0.5 phi=1.5707963 dim=6\nloop c1\noutput c1").unwrap();
        assert_eq!(spec.components.len(), 1);
        assert_eq!(spec.components[0].num("dim"), Some(6.0));
        assert_eq!(spec.statements.len(), 2);
        assert!(matches!(spec.statements[0].kind, StatementKind::Loop { .. }));
        assert_eq!(spec.output(), Some("c1"));
    }

    #[test]
    fn undefined_name_has_location() {
        let err = parse_netspec("cavity a omega=1 gamma=1\nseries a b -> c\noutput c").unwrap_err();
        assert_eq!(
            err,
            ParseError::UndefinedName {
                location: Location::default(),
                name: "b".into()
            }
        );
        let loc = err.location();
        assert_eq!((loc.line, loc.column), (2, 10));
    }

    #[test]
    fn duplicate_names() {
        let err = parse_netspec("phase p phi=1\nphase p phi=2\noutput p").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateName { .. }));
        assert_eq!(err.location().line, 2);
        let err = parse_netspec("phase p phi=1\nphase q phi=2\nseries p q -> p\noutput p").unwrap_err();
        assert!(matches!(err, ParseError::DuplicateName { .. }));
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("pi/2"), Some(PI / 2.0));
        assert_eq!(parse_number("-3*pi/4"), Some(-3.0 * PI / 4.0));
        assert_eq!(parse_number("1e-3"), Some(1e-3));
        assert_eq!(parse_number("2.5e+2*pi"), Some(250.0 * PI));
        assert_eq!(parse_number("-0.5"), Some(-0.5));
        for bad in ["", "pi*", "inf", "nan", "1/0", "abc", "1..2", "--1"] {
            assert_eq!(parse_number(bad), None, "{bad}");
        }
    }

    #[test]
    fn strings_and_comments() {
        let spec = parse_netspec("custom m file=\"dir with space/#m.json\" # trailing\n# only a comment\n\noutput m\n").unwrap();
        assert_eq!(spec.components[0].get("file"), Some(&Value::Str("dir with space/#m.json".into())));
        let err = parse_netspec("custom m file=\"open\noutput m").unwrap_err();
        assert_eq!(err.location().column, 15);
    }

    #[test]
    fn parameter_checks() {
        let cases = [
            ("cavity c omega=1\noutput c", "requires parameter `gamma`"),
            ("cavity c omega=1 gamma=1 dim=2.5\noutput c", "whole number"),
            ("cavity c omega=1 gamma=1 t=0.3\noutput c", "no parameter `t`"),
            ("cavity c omega=1 omega=2 gamma=1\noutput c", "given twice"),
            ("phase p phi=x\noutput p", "invalid number"),
            ("custom m file=plain\noutput m", "expected a string"),
            ("phase p phi\noutput p", "key=value"),
        ];
        for (text, needle) in cases {
            let err = parse_netspec(text).unwrap_err();
            assert!(err.to_string().contains(needle), "{text:?}: {err}");
            assert_eq!(err.location().line, 1);
        }
    }

    #[test]
    fn statement_shapes() {
        let base = "phase a phi=1\nphase b phi=2\n";
        let bad = [
            ("series a -> c\noutput c", "exactly two"),
            ("series a b c\noutput a", "-> target"),
            ("series a b ->\noutput a", "target name"),
            ("concat -> c\noutput c", "at least one"),
            ("feedback a\noutput a", "port pair"),
            ("feedback a a.0\noutput a", "port pair"),
            ("feedback a a.0:a.0 gain\noutput a", "`gain` needs"),
            ("loop\noutput a", "needs a name"),
            ("loop a b\noutput a", "unexpected"),
            ("output a\noutput b", "second output"),
            ("frobnicate a\noutput a", "unknown keyword"),
            ("phase loop phi=1\noutput a", "not a valid name"),
            ("", "missing output"),
        ];
        for (text, needle) in bad {
            let err = parse_netspec(&format!("{base}{text}")).unwrap_err();
            assert!(err.to_string().contains(needle), "{text:?}: {err}");
        }
        let spec = parse_netspec(&format!("{base}concat a b -> ab\nfeedback ab a.0:b.0 b.0:a.0 gain b\noutput ab")).unwrap();
        assert_eq!(
            spec.statements[1].kind,
            StatementKind::Feedback {
                name: "ab".into(),
                pairs: vec![("a.0".into(), "b.0".into()), ("b.0".into(), "a.0".into())],
                gain: Some("b".into())
            }
        );
    }

    #[test]
    fn canonical_text_reparses() {
        let text = "phase a phi=pi/3 n=2\nbeamsplitter b t=0.25 n=2  # comment\nconcat a b -> ab\nfeedback ab a.0:b.2\noutput ab\n";
        let spec = parse_netspec(text).unwrap();
        let canonical = spec.to_string();
        assert_eq!(parse_netspec(&canonical).unwrap(), spec);
        assert!(canonical.starts_with("phase a phi=1.0471975511965976 n=2\n"));
    }
}
