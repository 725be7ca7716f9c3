//! The permitted library surface.
//!
//! One entry per line:
//!
//! ```text
//! java.lang.Math#abs(int)->int        method
//! java.lang.Math#PI->double           field
//! java.lang.RuntimeException          bare type: every member allowed
//! ```
//!
//! `#` starts a comment when it is the first non-blank character of a line.
//! The `Verifier` instrumentation class is always present.

use std::collections::BTreeMap;

use crate::syntax::ast::PrimType;

use super::types::{assignable, widens_to, Ty, STRING};

pub const VERIFIER: &str = "Verifier";
pub const CONSTRUCTOR: &str = "<init>";

static DEFAULT_ALLOWLIST: &str = include_str!("../../data/jdk_allowlist.txt");

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("allowlist line {line}: {message}")]
pub struct AllowlistError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MemberSig {
    pub name: String,
    /// `None` for fields.
    pub params: Option<Vec<Ty>>,
    pub ret: Ty,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AllowedType {
    pub all_members: bool,
    pub members: Vec<MemberSig>,
}

/// Result of looking up a member against the allowlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup {
    /// A listed signature matched.
    Member { params: Option<Vec<Ty>>, ret: Ty },
    /// The type is listed bare; the member is allowed but its type unknown.
    Opaque,
    NotFound,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Allowlist {
    types: BTreeMap<String, AllowedType>,
}

impl Default for Allowlist {
    fn default() -> Self {
        Allowlist::jdk_default()
    }
}

impl Allowlist {
    /// An allowlist holding only the always-present entries.
    pub fn builtin() -> Allowlist {
        let mut types = BTreeMap::new();
        let members = PrimType::ALL
            .iter()
            .map(|p| MemberSig {
                name: format!("nondet{}", p.title()),
                params: Some(vec![]),
                ret: Ty::Prim(*p),
            })
            .collect();
        types.insert(
            VERIFIER.to_string(),
            AllowedType {
                all_members: false,
                members,
            },
        );
        types.insert(STRING.to_string(), AllowedType::default());
        Allowlist { types }
    }

    pub fn jdk_default() -> Allowlist {
        Allowlist::parse(DEFAULT_ALLOWLIST).expect("shipped allowlist parses")
    }

    pub fn parse(text: &str) -> Result<Allowlist, AllowlistError> {
        let mut list = Allowlist::builtin();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| AllowlistError {
                line: idx + 1,
                message,
            };
            let Some((ty_name, member)) = line.split_once('#') else {
                match Ty::parse(line) {
                    Some(Ty::Ref(name)) => {
                        list.types.entry(name).or_default().all_members = true;
                        continue;
                    }
                    _ => return Err(err(format!("`{line}` is not a reference type name"))),
                }
            };
            let ty_name = ty_name.trim();
            if !matches!(Ty::parse(ty_name), Some(Ty::Ref(_))) {
                return Err(err(format!("`{ty_name}` is not a reference type name")));
            }
            let Some((head, ret)) = member.split_once("->") else {
                return Err(err("missing `->returnType`".into()));
            };
            let ret = Ty::parse(ret).ok_or_else(|| err(format!("bad return type `{}`", ret.trim())))?;
            let head = head.trim();
            let (name, params) = match head.split_once('(') {
                Some((name, rest)) => {
                    let Some(inner) = rest.strip_suffix(')') else {
                        return Err(err("unbalanced parameter list".into()));
                    };
                    let params = if inner.trim().is_empty() {
                        Vec::new()
                    } else {
                        inner
                            .split(',')
                            .map(|p| match Ty::parse(p) {
                                Some(Ty::Void) | None => Err(err(format!("bad parameter type `{}`", p.trim()))),
                                Some(t) => Ok(t),
                            })
                            .collect::<Result<Vec<_>, _>>()?
                    };
                    (name.trim(), Some(params))
                }
                None => {
                    if ret == Ty::Void {
                        return Err(err("fields cannot be void".into()));
                    }
                    (head, None)
                }
            };
            let valid_name = name == CONSTRUCTOR
                || (!name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$'));
            if !valid_name {
                return Err(err(format!("bad member name `{name}`")));
            }
            list.types
                .entry(ty_name.to_string())
                .or_default()
                .members
                .push(MemberSig {
                    name: name.to_string(),
                    params,
                    ret,
                });
        }
        Ok(list)
    }

    pub fn contains_type(&self, qualified: &str) -> bool {
        self.types.contains_key(qualified)
    }

    /// Whether any listed type lives directly in `package`.
    pub fn has_package(&self, package: &str) -> bool {
        self.types
            .keys()
            .any(|t| t.rsplit_once('.').is_some_and(|(pkg, _)| pkg == package))
    }

    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.types.keys().map(String::as_str)
    }

    pub fn lookup_field(&self, ty: &str, name: &str) -> Lookup {
        let Some(entry) = self.types.get(ty) else {
            return Lookup::NotFound;
        };
        match entry.members.iter().find(|m| m.name == name && m.params.is_none()) {
            Some(m) => Lookup::Member {
                params: None,
                ret: m.ret.clone(),
            },
            None if entry.all_members => Lookup::Opaque,
            None => Lookup::NotFound,
        }
    }

    /// Overload resolution. `args` holds `None` for arguments whose type is
    /// unknown; those only resolve when a single candidate has the right
    /// arity.
    pub fn lookup_method(&self, ty: &str, name: &str, args: &[Option<Ty>]) -> Lookup {
        let Some(entry) = self.types.get(ty) else {
            return Lookup::NotFound;
        };
        let candidates: Vec<&Vec<Ty>> = entry
            .members
            .iter()
            .filter(|m| m.name == name)
            .filter_map(|m| m.params.as_ref())
            .filter(|p| p.len() == args.len())
            .collect();
        let fallback = if entry.all_members {
            Lookup::Opaque
        } else {
            Lookup::NotFound
        };
        let found = |params: &Vec<Ty>| {
            let ret = entry
                .members
                .iter()
                .find(|m| m.name == name && m.params.as_ref() == Some(params))
                .map(|m| m.ret.clone())
                .unwrap_or(Ty::Opaque);
            let ret = if name == CONSTRUCTOR { Ty::Ref(ty.to_string()) } else { ret };
            Lookup::Member {
                params: Some(params.clone()),
                ret,
            }
        };
        if args.iter().any(Option::is_none) {
            return match candidates.as_slice() {
                [only] => found(only),
                _ => fallback,
            };
        }
        let args: Vec<&Ty> = args.iter().flatten().collect();
        let applicable: Vec<&Vec<Ty>> = candidates
            .into_iter()
            .filter(|params| args.iter().zip(params.iter()).all(|(a, p)| assignable(a, p)))
            .collect();
        let more_specific = |a: &Vec<Ty>, b: &Vec<Ty>| {
            a.iter().zip(b).all(|(x, y)| match (x, y) {
                (Ty::Prim(x), Ty::Prim(y)) => widens_to(*x, *y),
                _ => assignable(x, y),
            })
        };
        let best = applicable
            .iter()
            .find(|a| applicable.iter().all(|b| more_specific(a, b)))
            .or(applicable.first());
        match best {
            Some(params) => found(params),
            None => fallback,
        }
    }

    pub fn lookup_constructor(&self, ty: &str, args: &[Option<Ty>]) -> Lookup {
        match self.lookup_method(ty, CONSTRUCTOR, args) {
            Lookup::Opaque => Lookup::Member {
                params: None,
                ret: Ty::Ref(ty.to_string()),
            },
            other => other,
        }
    }

    /// Parameter types for a call whose head is known but whose arguments
    /// may not be: the unique same-arity candidate, if any.
    pub fn unique_params(&self, ty: &str, name: &str, arity: usize) -> Option<Vec<Ty>> {
        let entry = self.types.get(ty)?;
        let mut it = entry
            .members
            .iter()
            .filter(|m| m.name == name)
            .filter_map(|m| m.params.as_ref())
            .filter(|p| p.len() == arity);
        let first = it.next()?;
        match it.next() {
            None => Some(first.clone()),
            Some(_) => None,
        }
    }
}
