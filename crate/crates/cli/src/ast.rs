//! Syntax tree of a netlist.

use std::fmt;

/// Source position, 1-based. Positions do not take part in equality, so a
/// reparsed program compares equal to the original.
#[derive(Clone, Copy, Debug, Default)]
pub struct Location {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Location {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Cavity,
    Phase,
    Beamsplitter,
    QubitCoupler,
    Custom,
}

impl Kind {
    pub fn parse(word: &str) -> Option<Kind> {
        Some(match word {
            "cavity" => Kind::Cavity,
            "phase" => Kind::Phase,
            "beamsplitter" => Kind::Beamsplitter,
            "qubit_coupler" => Kind::QubitCoupler,
            "custom" => Kind::Custom,
            _ => return None,
        })
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Kind::Cavity => "cavity",
            Kind::Phase => "phase",
            Kind::Beamsplitter => "beamsplitter",
            Kind::QubitCoupler => "qubit_coupler",
            Kind::Custom => "custom",
        }
    }

    /// `(key, type, required)` for every parameter this kind accepts.
    pub fn params(self) -> &'static [(&'static str, ParamType, bool)] {
        use ParamType::*;
        match self {
            Kind::Cavity => &[("omega", Real, true), ("gamma", Real, true), ("phi", Real, false), ("dim", Count, false)],
            Kind::Phase => &[("phi", Real, true), ("n", Count, false)],
            Kind::Beamsplitter => &[("t", Real, true), ("n", Count, false)],
            Kind::QubitCoupler => &[("gamma", Real, true), ("kappa", Real, true), ("phi", Real, false)],
            Kind::Custom => &[("file", Text, true)],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamType {
    Real,
    /// A non-negative integer written as a number.
    Count,
    Text,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Str(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Num(x) if x.fract() == 0.0 && x.abs() < 1e15 => write!(f, "{}", *x as i64),
            // Debug formatting of f64 is the shortest string that reparses exactly
            Value::Num(x) => write!(f, "{x:?}"),
            Value::Str(s) => {
                f.write_str("\"")?;
                for ch in s.chars() {
                    match ch {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub key: String,
    pub value: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentDecl {
    pub kind: Kind,
    pub name: String,
    pub params: Vec<Param>,
    pub location: Location,
}

impl ComponentDecl {
    pub fn get(&self, key: &str) -> Option<&Value> {
        self.params.iter().find(|p| p.key == key).map(|p| &p.value)
    }

    pub fn num(&self, key: &str) -> Option<f64> {
        match self.get(key) {
            Some(Value::Num(x)) => Some(*x),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StatementKind {
    /// `series first second -> target`: `first` drives `second`.
    Series { first: String, second: String, target: String },
    Concat { parts: Vec<String>, target: String },
    /// Each pair feeds an output port into an input port of `name`.
    Feedback { name: String, pairs: Vec<(String, String)>, gain: Option<String> },
    Loop { name: String },
    Output { name: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statement {
    pub kind: StatementKind,
    pub location: Location,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct NetworkSpec {
    pub components: Vec<ComponentDecl>,
    pub statements: Vec<Statement>,
}

impl NetworkSpec {
    pub fn output(&self) -> Option<&str> {
        self.statements.iter().find_map(|s| match &s.kind {
            StatementKind::Output { name } => Some(name.as_str()),
            _ => None,
        })
    }
}

impl fmt::Display for ComponentDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.keyword(), self.name)?;
        for p in &self.params {
            write!(f, " {}={}", p.key, p.value)?;
        }
        Ok(())
    }
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatementKind::Series { first, second, target } => write!(f, "series {first} {second} -> {target}"),
            StatementKind::Concat { parts, target } => write!(f, "concat {} -> {target}", parts.join(" ")),
            StatementKind::Feedback { name, pairs, gain } => {
                write!(f, "feedback {name}")?;
                for (out, inp) in pairs {
                    write!(f, " {out}:{inp}")?;
                }
                if let Some(g) = gain {
                    write!(f, " gain {g}")?;
                }
                Ok(())
            }
            StatementKind::Loop { name } => write!(f, "loop {name}"),
            StatementKind::Output { name } => write!(f, "output {name}"),
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

/// Canonical text: declarations first, then statements, one per line.
impl fmt::Display for NetworkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.components {
            writeln!(f, "{c}")?;
        }
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
