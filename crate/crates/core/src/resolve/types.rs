use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::ast::PrimType;

pub const STRING: &str = "java.lang.String";
pub const OBJECT: &str = "java.lang.Object";

/// A resolved type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Ty {
    Prim(PrimType),
    PrimArray(PrimType),
    /// Qualified name of an allowlisted type, or the unit's own class name.
    Ref(String),
    RefArray(String),
    Null,
    Void,
    /// Allowlisted value whose type the allowlist does not spell out.
    Opaque,
}

impl Ty {
    pub fn prim(self: &Ty) -> Option<PrimType> {
        match self {
            Ty::Prim(p) => Some(*p),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.prim().is_some_and(PrimType::is_numeric)
    }

    pub fn is_boolean(&self) -> bool {
        *self == Ty::Prim(PrimType::Boolean)
    }

    pub fn is_reference(&self) -> bool {
        matches!(self, Ty::Ref(_) | Ty::RefArray(_) | Ty::PrimArray(_) | Ty::Null)
    }

    pub fn is_string(&self) -> bool {
        matches!(self, Ty::Ref(n) if n == STRING)
    }

    /// Parses the allowlist spelling: `int`, `double[]`, `void`,
    /// `java.lang.String`, `java.lang.String[]`.
    pub fn parse(text: &str) -> Option<Ty> {
        let text = text.trim();
        if text == "void" {
            return Some(Ty::Void);
        }
        let (base, array) = match text.strip_suffix("[]") {
            Some(b) => (b.trim_end(), true),
            None => (text, false),
        };
        if base.is_empty() || base.contains("[]") {
            return None;
        }
        if let Some(p) = PrimType::from_keyword(base) {
            return Some(if array { Ty::PrimArray(p) } else { Ty::Prim(p) });
        }
        let valid = base
            .split('.')
            .all(|part| !part.is_empty() && part.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$'));
        if !valid {
            return None;
        }
        Some(if array {
            Ty::RefArray(base.to_string())
        } else {
            Ty::Ref(base.to_string())
        })
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Prim(p) => write!(f, "{p}"),
            Ty::PrimArray(p) => write!(f, "{p}[]"),
            Ty::Ref(n) => f.write_str(n),
            Ty::RefArray(n) => write!(f, "{n}[]"),
            Ty::Null => f.write_str("null"),
            Ty::Void => f.write_str("void"),
            Ty::Opaque => f.write_str("?"),
        }
    }
}

fn rank(p: PrimType) -> u8 {
    match p {
        PrimType::Byte => 1,
        PrimType::Short | PrimType::Char => 2,
        PrimType::Int => 3,
        PrimType::Long => 4,
        PrimType::Float => 5,
        PrimType::Double => 6,
        PrimType::Boolean => 0,
    }
}

/// Primitive widening conversion (identity included).
pub fn widens_to(from: PrimType, to: PrimType) -> bool {
    if from == to {
        return true;
    }
    if from == PrimType::Boolean || to == PrimType::Boolean || to == PrimType::Char {
        return false;
    }
    match from {
        // char widens to int and above, but not to short or byte
        PrimType::Char => rank(to) >= rank(PrimType::Int),
        _ => rank(to) > rank(from),
    }
}

/// Unary numeric promotion: byte, short and char become int.
pub fn unary_promote(p: PrimType) -> Option<PrimType> {
    match p {
        PrimType::Boolean => None,
        PrimType::Byte | PrimType::Short | PrimType::Char | PrimType::Int => Some(PrimType::Int),
        other => Some(other),
    }
}

/// Binary numeric promotion over the primitive lattice.
pub fn binary_promote(a: PrimType, b: PrimType) -> Option<PrimType> {
    if !a.is_numeric() || !b.is_numeric() {
        return None;
    }
    Some(if a == PrimType::Double || b == PrimType::Double {
        PrimType::Double
    } else if a == PrimType::Float || b == PrimType::Float {
        PrimType::Float
    } else if a == PrimType::Long || b == PrimType::Long {
        PrimType::Long
    } else {
        PrimType::Int
    })
}

/// Method-invocation conversion from an argument type to a parameter type.
pub fn assignable(arg: &Ty, param: &Ty) -> bool {
    if arg == param || *arg == Ty::Opaque || *param == Ty::Opaque {
        return true;
    }
    match (arg, param) {
        (Ty::Prim(a), Ty::Prim(p)) => widens_to(*a, *p),
        (Ty::Null, p) => p.is_reference(),
        (a, Ty::Ref(o)) if o == OBJECT => a.is_reference(),
        _ => false,
    }
}
