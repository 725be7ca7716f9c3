use std::collections::BTreeMap;

use crate::syntax::ast::{BaseType, CompilationUnit, Import, TypeRef};

use super::allowlist::{Allowlist, VERIFIER};
use super::types::{Ty, STRING};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("duplicate field `{0}`")]
    DuplicateField(String),
    #[error("duplicate method `{0}`")]
    DuplicateMethod(String),
    #[error("duplicate constructor signature in `{0}`")]
    DuplicateConstructor(String),
}

impl ResolveError {
    pub fn code(&self) -> &'static str {
        "RESOLVE_FAIL"
    }
}

/// A declared type after name resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclTy {
    Known(Ty),
    /// The written name refers to nothing in the unit or the allowlist.
    External(String),
}

impl DeclTy {
    pub fn known(&self) -> Option<&Ty> {
        match self {
            DeclTy::Known(t) => Some(t),
            DeclTy::External(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldInfo {
    pub ty: DeclTy,
    pub is_static: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodInfo {
    pub params: Vec<DeclTy>,
    /// `DeclTy::Known(Ty::Void)` for `void` methods.
    pub ret: DeclTy,
    pub is_static: bool,
}

/// Where a name lookup landed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VarRef<'t> {
    Local(&'t DeclTy),
    Field(&'t FieldInfo),
}

/// How a simple or dotted type name resolves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeName {
    Own,
    Allowed(String),
    External(String),
}

/// Per-unit symbol table: class members, a scope stack for locals, and the
/// allowlist used for everything outside the unit.
#[derive(Debug, Clone)]
pub struct TypeTable<'a> {
    pub class_name: String,
    pub fields: BTreeMap<String, FieldInfo>,
    pub methods: BTreeMap<String, MethodInfo>,
    pub constructors: Vec<Vec<DeclTy>>,
    pub allowlist: &'a Allowlist,
    imports: Vec<Import>,
    scopes: Vec<BTreeMap<String, DeclTy>>,
}

pub fn build_type_table<'a>(unit: &CompilationUnit, allowlist: &'a Allowlist) -> Result<TypeTable<'a>, ResolveError> {
    let mut table = TypeTable {
        class_name: unit.class.name.clone(),
        fields: BTreeMap::new(),
        methods: BTreeMap::new(),
        constructors: Vec::new(),
        allowlist,
        imports: unit.imports.clone(),
        scopes: Vec::new(),
    };
    for f in &unit.class.fields {
        let info = FieldInfo {
            ty: table.resolve_type_ref(&f.ty),
            is_static: f.modifiers.is_static,
        };
        if table.fields.insert(f.name.clone(), info).is_some() {
            return Err(ResolveError::DuplicateField(f.name.clone()));
        }
    }
    for m in &unit.class.methods {
        let info = MethodInfo {
            params: m.params.iter().map(|p| table.resolve_type_ref(&p.ty)).collect(),
            ret: match &m.return_type {
                Some(t) => table.resolve_type_ref(t),
                None => DeclTy::Known(Ty::Void),
            },
            is_static: m.modifiers.is_static,
        };
        if table.methods.insert(m.name.clone(), info).is_some() {
            return Err(ResolveError::DuplicateMethod(m.name.clone()));
        }
    }
    for c in &unit.class.constructors {
        let sig: Vec<DeclTy> = c.params.iter().map(|p| table.resolve_type_ref(&p.ty)).collect();
        if table.constructors.contains(&sig) {
            return Err(ResolveError::DuplicateConstructor(unit.class.name.clone()));
        }
        table.constructors.push(sig);
    }
    Ok(table)
}

impl<'a> TypeTable<'a> {
    pub fn resolve_type_name(&self, name: &str) -> TypeName {
        if name == self.class_name {
            return TypeName::Own;
        }
        let allow = self.allowlist;
        if name.contains('.') {
            return if allow.contains_type(name) {
                TypeName::Allowed(name.to_string())
            } else {
                TypeName::External(name.to_string())
            };
        }
        for imp in &self.imports {
            if !imp.wildcard && imp.path.rsplit('.').next() == Some(name) {
                return if allow.contains_type(&imp.path) {
                    TypeName::Allowed(imp.path.clone())
                } else {
                    TypeName::External(imp.path.clone())
                };
            }
        }
        if name == VERIFIER && allow.contains_type(VERIFIER) {
            return TypeName::Allowed(VERIFIER.to_string());
        }
        let lang = format!("java.lang.{name}");
        if allow.contains_type(&lang) {
            return TypeName::Allowed(lang);
        }
        for imp in self.imports.iter().filter(|i| i.wildcard) {
            let candidate = format!("{}.{name}", imp.path);
            if allow.contains_type(&candidate) {
                return TypeName::Allowed(candidate);
            }
        }
        TypeName::External(name.to_string())
    }

    pub fn resolve_type_ref(&self, t: &TypeRef) -> DeclTy {
        match &t.base {
            BaseType::Prim(p) => DeclTy::Known(if t.array { Ty::PrimArray(*p) } else { Ty::Prim(*p) }),
            BaseType::Named(n) => {
                let q = match self.resolve_type_name(n) {
                    TypeName::Own => self.class_name.clone(),
                    TypeName::Allowed(q) => q,
                    TypeName::External(q) => return DeclTy::External(q),
                };
                DeclTy::Known(if t.array { Ty::RefArray(q) } else { Ty::Ref(q) })
            }
        }
    }

    /// Whether an import names something the allowlist permits.
    pub fn import_allowed(&self, imp: &Import) -> bool {
        if imp.wildcard {
            self.allowlist.has_package(&imp.path)
        } else {
            self.allowlist.contains_type(&imp.path)
        }
    }

    pub fn push_scope(&mut self) {
        self.scopes.push(BTreeMap::new());
    }

    pub fn pop_scope(&mut self) {
        self.scopes.pop().expect("scope stack underflow");
    }

    pub fn scope_depth(&self) -> usize {
        self.scopes.len()
    }

    pub fn declare_local(&mut self, name: &str, ty: DeclTy) {
        if self.scopes.is_empty() {
            self.push_scope();
        }
        self.scopes
            .last_mut()
            .expect("non-empty")
            .insert(name.to_string(), ty);
    }

    /// Innermost local first, then fields.
    pub fn lookup_var(&self, name: &str) -> Option<VarRef<'_>> {
        for scope in self.scopes.iter().rev() {
            if let Some(t) = scope.get(name) {
                return Some(VarRef::Local(t));
            }
        }
        self.fields.get(name).map(VarRef::Field)
    }

    pub fn string_ty(&self) -> Ty {
        Ty::Ref(STRING.to_string())
    }
}
