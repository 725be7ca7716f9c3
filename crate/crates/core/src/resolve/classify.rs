use std::collections::BTreeMap;

use serde::Serialize;

use crate::syntax::ast::*;

use super::allowlist::Lookup;
use super::table::{DeclTy, TypeName, TypeTable, VarRef};
use super::types::{binary_promote, unary_promote, Ty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BindingKind {
    Local,
    Field,
    Method,
    /// Literals, operators, casts, `this` and creations typed by the
    /// language rules rather than by a declaration.
    Intrinsic,
    AllowlistedExternal,
    UnresolvedExternal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Binding {
    pub kind: BindingKind,
    /// Absent exactly when `kind` is `UnresolvedExternal`.
    pub ty: Option<Ty>,
}

impl Binding {
    pub fn unresolved() -> Binding {
        Binding {
            kind: BindingKind::UnresolvedExternal,
            ty: None,
        }
    }

    fn of(kind: BindingKind, ty: Ty) -> Binding {
        Binding { kind, ty: Some(ty) }
    }

    pub fn is_unresolved(&self) -> bool {
        self.kind == BindingKind::UnresolvedExternal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum DeclSite {
    Import,
    Field,
    ReturnType,
    Param,
    Local,
}

/// A declaration whose written type (or an import) names something outside
/// the unit and the allowlist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnresolvedDecl {
    pub site: DeclSite,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classification {
    pub bindings: BTreeMap<NodeId, Binding>,
    /// Parameter types of calls and creations whose head resolved; `None`
    /// entries are parameters of unknown type.
    pub param_types: BTreeMap<NodeId, Vec<Option<Ty>>>,
    pub unresolved_decls: Vec<UnresolvedDecl>,
}

impl Classification {
    pub fn binding(&self, id: NodeId) -> Option<&Binding> {
        self.bindings.get(&id)
    }

    pub fn ty(&self, id: NodeId) -> Option<&Ty> {
        self.bindings.get(&id).and_then(|b| b.ty.as_ref())
    }

    pub fn is_unresolved(&self, id: NodeId) -> bool {
        self.bindings.get(&id).is_none_or(Binding::is_unresolved)
    }

    pub fn unresolved_exprs(&self) -> usize {
        self.bindings.values().filter(|b| b.is_unresolved()).count()
    }

    /// Unresolved expression nodes plus unresolved declarations.
    pub fn unresolved_total(&self) -> usize {
        self.unresolved_exprs() + self.unresolved_decls.len()
    }

    /// Whether any node of `e`'s subtree is unresolved.
    pub fn subtree_unresolved(&self, e: &Expr) -> bool {
        let mut found = false;
        e.walk(&mut |n| found |= self.is_unresolved(n.id));
        found
    }
}

/// Resolves one expression against the table's current scopes.
pub fn resolve(table: &TypeTable<'_>, expr: &Expr) -> Binding {
    let mut c = Classifier {
        table: table.clone(),
        out: Classification::default(),
    };
    match c.expr(expr) {
        Res::Value(b) => b,
        Res::Type(_) => c.out.bindings[&expr.id].clone(),
    }
}

/// Classifies every expression node of the unit and collects unresolved
/// declarations.
pub fn classify_unit(unit: &CompilationUnit, table: &TypeTable<'_>) -> Classification {
    let mut c = Classifier {
        table: table.clone(),
        out: Classification::default(),
    };
    c.unit(unit);
    c.out
}

enum Res {
    Value(Binding),
    Type(TypeName),
}

impl Res {
    fn value_ty(&self) -> Option<&Ty> {
        match self {
            Res::Value(b) => b.ty.as_ref(),
            Res::Type(_) => None,
        }
    }
}

struct Classifier<'a> {
    table: TypeTable<'a>,
    out: Classification,
}

impl<'a> Classifier<'a> {
    fn decl_ty(&mut self, t: &TypeRef, site: DeclSite) -> DeclTy {
        let d = self.table.resolve_type_ref(t);
        if let DeclTy::External(name) = &d {
            self.out.unresolved_decls.push(UnresolvedDecl {
                site,
                name: name.clone(),
                span: t.span,
            });
        }
        d
    }

    fn unit(&mut self, unit: &CompilationUnit) {
        for imp in &unit.imports {
            if !self.table.import_allowed(imp) {
                self.out.unresolved_decls.push(UnresolvedDecl {
                    site: DeclSite::Import,
                    name: imp.path.clone(),
                    span: imp.span,
                });
            }
        }
        for f in &unit.class.fields {
            self.decl_ty(&f.ty, DeclSite::Field);
            if let Some(init) = &f.init {
                self.expr(init);
            }
        }
        for c in &unit.class.constructors {
            self.table.push_scope();
            for p in &c.params {
                let d = self.decl_ty(&p.ty, DeclSite::Param);
                self.table.declare_local(&p.name, d);
            }
            self.block(&c.body);
            self.table.pop_scope();
        }
        for m in &unit.class.methods {
            if let Some(rt) = &m.return_type {
                self.decl_ty(rt, DeclSite::ReturnType);
            }
            self.table.push_scope();
            for p in &m.params {
                let d = self.decl_ty(&p.ty, DeclSite::Param);
                self.table.declare_local(&p.name, d);
            }
            self.block(&m.body);
            self.table.pop_scope();
        }
    }

    fn block(&mut self, b: &Block) {
        self.table.push_scope();
        for s in &b.stmts {
            self.stmt(s);
        }
        self.table.pop_scope();
    }

    fn local(&mut self, d: &LocalDecl) {
        let ty = self.decl_ty(&d.ty, DeclSite::Local);
        if let Some(init) = &d.init {
            self.expr(init);
        }
        self.table.declare_local(&d.name, ty);
    }

    /// Nested statement bodies get their own scope even when unbraced.
    fn scoped_stmt(&mut self, s: &Stmt) {
        self.table.push_scope();
        self.stmt(s);
        self.table.pop_scope();
    }

    fn stmt(&mut self, s: &Stmt) {
        match &s.kind {
            StmtKind::Block(b) => self.block(b),
            StmtKind::Local(d) => self.local(d),
            StmtKind::Expr(e) | StmtKind::Throw(e) => {
                self.expr(e);
            }
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                self.expr(cond);
                self.scoped_stmt(then_branch);
                if let Some(e) = else_branch {
                    self.scoped_stmt(e);
                }
            }
            StmtKind::While { cond, body } => {
                self.expr(cond);
                self.scoped_stmt(body);
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                self.table.push_scope();
                match init {
                    Some(ForInit::Local(d)) => self.local(d),
                    Some(ForInit::Exprs(es)) => {
                        for e in es {
                            self.expr(e);
                        }
                    }
                    None => {}
                }
                if let Some(c) = cond {
                    self.expr(c);
                }
                for u in update {
                    self.expr(u);
                }
                self.scoped_stmt(body);
                self.table.pop_scope();
            }
            StmtKind::Return(e) => {
                if let Some(e) = e {
                    self.expr(e);
                }
            }
            StmtKind::Assert { cond, message } => {
                self.expr(cond);
                if let Some(m) = message {
                    self.expr(m);
                }
            }
        }
    }

    fn record(&mut self, e: &Expr, b: Binding) -> Res {
        self.out.bindings.insert(e.id, b.clone());
        Res::Value(b)
    }

    fn unresolved(&mut self, e: &Expr) -> Res {
        self.record(e, Binding::unresolved())
    }

    fn intrinsic(&mut self, e: &Expr, ty: Option<Ty>) -> Res {
        match ty {
            Some(t) => self.record(e, Binding::of(BindingKind::Intrinsic, t)),
            None => self.unresolved(e),
        }
    }

    fn own_method(&mut self, e: &Expr, name: &str, arity: usize) -> Res {
        let Some(m) = self.table.methods.get(name) else {
            return self.unresolved(e);
        };
        if m.params.len() != arity {
            return self.unresolved(e);
        }
        let params = m.params.iter().map(|p| p.known().cloned()).collect();
        let ret = m.ret.known().cloned();
        self.out.param_types.insert(e.id, params);
        match ret {
            Some(t) => self.record(e, Binding::of(BindingKind::Method, t)),
            None => self.unresolved(e),
        }
    }

    fn allowlisted(&mut self, e: &Expr, lookup: Lookup) -> Res {
        match lookup {
            Lookup::Member { params, ret } => {
                if let Some(p) = params {
                    self.out
                        .param_types
                        .insert(e.id, p.into_iter().map(Some).collect());
                }
                self.record(e, Binding::of(BindingKind::AllowlistedExternal, ret))
            }
            Lookup::Opaque => self.record(e, Binding::of(BindingKind::AllowlistedExternal, Ty::Opaque)),
            Lookup::NotFound => self.unresolved(e),
        }
    }

    fn field_of(&mut self, e: &Expr, name: &str, info_static_only: bool) -> Res {
        match self.table.fields.get(name) {
            Some(f) if !info_static_only || f.is_static => match f.ty.known().cloned() {
                Some(t) => self.record(e, Binding::of(BindingKind::Field, t)),
                None => self.unresolved(e),
            },
            _ => self.unresolved(e),
        }
    }

    fn expr(&mut self, e: &Expr) -> Res {
        match &e.kind {
            ExprKind::Literal(l) => {
                let ty = match l {
                    Literal::Int(_) => Ty::Prim(PrimType::Int),
                    Literal::Long(_) => Ty::Prim(PrimType::Long),
                    Literal::Float(_) => Ty::Prim(PrimType::Float),
                    Literal::Double(_) => Ty::Prim(PrimType::Double),
                    Literal::Char(_) => Ty::Prim(PrimType::Char),
                    Literal::Bool(_) => Ty::Prim(PrimType::Boolean),
                    Literal::Str(_) => self.table.string_ty(),
                    Literal::Null => Ty::Null,
                };
                self.intrinsic(e, Some(ty))
            }
            ExprKind::This => {
                let own = Ty::Ref(self.table.class_name.clone());
                self.intrinsic(e, Some(own))
            }
            ExprKind::Name(n) => {
                let var = self.table.lookup_var(n).map(|v| match v {
                    VarRef::Local(d) => (BindingKind::Local, d.known().cloned()),
                    VarRef::Field(f) => (BindingKind::Field, f.ty.known().cloned()),
                });
                match var {
                    Some((kind, Some(t))) => self.record(e, Binding::of(kind, t)),
                    Some((_, None)) => self.unresolved(e),
                    None => match self.table.resolve_type_name(n) {
                        TypeName::Own => {
                            let own = Ty::Ref(self.table.class_name.clone());
                            self.record(e, Binding::of(BindingKind::Intrinsic, own));
                            Res::Type(TypeName::Own)
                        }
                        TypeName::Allowed(q) => {
                            self.record(e, Binding::of(BindingKind::AllowlistedExternal, Ty::Ref(q.clone())));
                            Res::Type(TypeName::Allowed(q))
                        }
                        TypeName::External(_) => self.unresolved(e),
                    },
                }
            }
            ExprKind::FieldAccess { target, name } => {
                let t = self.expr(target);
                match t {
                    Res::Type(TypeName::Own) => self.field_of(e, name, true),
                    Res::Type(TypeName::Allowed(q)) => {
                        let l = self.table.allowlist.lookup_field(&q, name);
                        self.allowlisted(e, l)
                    }
                    Res::Type(TypeName::External(_)) => self.unresolved(e),
                    Res::Value(b) => match b.ty {
                        Some(Ty::Ref(q)) if q == self.table.class_name => self.field_of(e, name, false),
                        Some(Ty::Ref(q)) => {
                            let l = self.table.allowlist.lookup_field(&q, name);
                            self.allowlisted(e, l)
                        }
                        Some(Ty::PrimArray(_) | Ty::RefArray(_)) if name == "length" => {
                            self.intrinsic(e, Some(Ty::Prim(PrimType::Int)))
                        }
                        Some(Ty::Opaque) => {
                            self.record(e, Binding::of(BindingKind::AllowlistedExternal, Ty::Opaque))
                        }
                        _ => self.unresolved(e),
                    },
                }
            }
            ExprKind::Call { target, name, args } => {
                let recv = target.as_ref().map(|t| self.expr(t));
                let arg_tys: Vec<Option<Ty>> = args
                    .iter()
                    .map(|a| self.expr(a).value_ty().cloned().filter(|t| *t != Ty::Void))
                    .collect();
                match recv {
                    None | Some(Res::Type(TypeName::Own)) => self.own_method(e, name, args.len()),
                    Some(Res::Type(TypeName::Allowed(q))) => {
                        let l = self.table.allowlist.lookup_method(&q, name, &arg_tys);
                        self.allowlisted(e, l)
                    }
                    Some(Res::Type(TypeName::External(_))) => self.unresolved(e),
                    Some(Res::Value(b)) => match b.ty {
                        Some(Ty::Ref(q)) if q == self.table.class_name => self.own_method(e, name, args.len()),
                        Some(Ty::Ref(q)) => {
                            let l = self.table.allowlist.lookup_method(&q, name, &arg_tys);
                            self.allowlisted(e, l)
                        }
                        Some(Ty::Opaque) => {
                            self.record(e, Binding::of(BindingKind::AllowlistedExternal, Ty::Opaque))
                        }
                        _ => self.unresolved(e),
                    },
                }
            }
            ExprKind::New { class, args } => {
                let arg_tys: Vec<Option<Ty>> = args.iter().map(|a| self.expr(a).value_ty().cloned()).collect();
                match self.table.resolve_type_name(class) {
                    TypeName::Own => {
                        let own = Ty::Ref(self.table.class_name.clone());
                        let ctors = &self.table.constructors;
                        let sig = if ctors.is_empty() && args.is_empty() {
                            Some(Vec::new())
                        } else {
                            ctors
                                .iter()
                                .find(|c| c.len() == args.len())
                                .map(|c| c.iter().map(|d| d.known().cloned()).collect())
                        };
                        match sig {
                            Some(sig) => {
                                self.out.param_types.insert(e.id, sig);
                                self.intrinsic(e, Some(own))
                            }
                            None => self.unresolved(e),
                        }
                    }
                    TypeName::Allowed(q) => {
                        let l = self.table.allowlist.lookup_constructor(&q, &arg_tys);
                        self.allowlisted(e, l)
                    }
                    TypeName::External(_) => self.unresolved(e),
                }
            }
            ExprKind::NewArray { elem, creation } => {
                match creation {
                    ArrayCreation::Sized(len) => {
                        self.expr(len);
                    }
                    ArrayCreation::Init(elems) => {
                        for x in elems {
                            self.expr(x);
                        }
                    }
                }
                let ty = match self.table.resolve_type_ref(elem) {
                    DeclTy::Known(Ty::Prim(p)) => Some(Ty::PrimArray(p)),
                    DeclTy::Known(Ty::Ref(q)) => Some(Ty::RefArray(q)),
                    _ => None,
                };
                self.intrinsic(e, ty)
            }
            ExprKind::ArrayAccess { array, index } => {
                let a = self.expr(array);
                self.expr(index);
                let ty = match a.value_ty() {
                    Some(Ty::PrimArray(p)) => Some(Ty::Prim(*p)),
                    Some(Ty::RefArray(q)) => Some(Ty::Ref(q.clone())),
                    Some(Ty::Opaque) => Some(Ty::Opaque),
                    _ => None,
                };
                self.intrinsic(e, ty)
            }
            ExprKind::Unary { op, operand } => {
                let o = self.expr(operand);
                let ty = o.value_ty().and_then(|t| unary_type(*op, t));
                self.intrinsic(e, ty)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.expr(lhs);
                let r = self.expr(rhs);
                let ty = match (l.value_ty(), r.value_ty()) {
                    (Some(a), Some(b)) => binary_type(*op, a, b),
                    _ => None,
                };
                self.intrinsic(e, ty)
            }
            ExprKind::Conditional {
                cond,
                then_expr,
                else_expr,
            } => {
                let c = self.expr(cond);
                let t = self.expr(then_expr);
                let f = self.expr(else_expr);
                let ty = match (c.value_ty(), t.value_ty(), f.value_ty()) {
                    (Some(c), Some(a), Some(b)) if c.is_boolean() || *c == Ty::Opaque => conditional_type(a, b),
                    _ => None,
                };
                self.intrinsic(e, ty)
            }
            ExprKind::Cast { ty, operand } => {
                let o = self.expr(operand);
                let target = self.table.resolve_type_ref(ty).known().cloned();
                let ok = match (&target, o.value_ty()) {
                    (Some(_), None) => true, // operand failures stay on the operand
                    (Some(Ty::Prim(t)), Some(Ty::Prim(s))) => t.is_numeric() == s.is_numeric(),
                    (Some(_), Some(_)) => true,
                    (None, _) => false,
                };
                self.intrinsic(e, if ok { target } else { None })
            }
            ExprKind::Paren(inner) => {
                let i = self.expr(inner);
                let ty = i.value_ty().cloned();
                self.intrinsic(e, ty)
            }
            ExprKind::Assign { op, target, value } => {
                let t = self.expr(target);
                let v = self.expr(value);
                let ty = match (op, t.value_ty(), v.value_ty()) {
                    (_, None, _) => None,
                    (AssignOp::Assign, Some(t), _) => Some(t.clone()),
                    (AssignOp::Compound(_), Some(t), None) => Some(t.clone()),
                    (AssignOp::Compound(op), Some(t), Some(v)) => {
                        // `s += x` is a text concatenation; only text operands are in the subset
                        binary_type(*op, t, v).map(|_| t.clone())
                    }
                };
                self.intrinsic(e, ty)
            }
        }
    }
}

fn unary_type(op: UnaryOp, t: &Ty) -> Option<Ty> {
    if *t == Ty::Opaque {
        return Some(if op == UnaryOp::Not {
            Ty::Prim(PrimType::Boolean)
        } else {
            Ty::Opaque
        });
    }
    let p = t.prim()?;
    match op {
        UnaryOp::Not => (p == PrimType::Boolean).then_some(Ty::Prim(p)),
        UnaryOp::Neg | UnaryOp::Plus => unary_promote(p).map(Ty::Prim),
        UnaryOp::BitNot => p.is_integral().then(|| unary_promote(p).map(Ty::Prim)).flatten(),
        UnaryOp::PreInc | UnaryOp::PreDec | UnaryOp::PostInc | UnaryOp::PostDec => {
            p.is_numeric().then_some(Ty::Prim(p))
        }
    }
}

/// Result type of a binary operator; `None` when the operands are not
/// well-typed in the subset.
pub fn binary_type(op: BinaryOp, a: &Ty, b: &Ty) -> Option<Ty> {
    let boolean = Ty::Prim(PrimType::Boolean);
    if *a == Ty::Opaque || *b == Ty::Opaque {
        return Some(match op {
            BinaryOp::And | BinaryOp::Or => boolean,
            o if o.is_relational() => boolean,
            _ => Ty::Opaque,
        });
    }
    match op {
        BinaryOp::And | BinaryOp::Or => (a.is_boolean() && b.is_boolean()).then_some(boolean),
        BinaryOp::Eq | BinaryOp::Ne => {
            let ok = match (a, b) {
                (Ty::Prim(x), Ty::Prim(y)) => {
                    (x.is_numeric() && y.is_numeric()) || (*x == PrimType::Boolean && *y == PrimType::Boolean)
                }
                (x, y) => x.is_reference() && y.is_reference(),
            };
            ok.then_some(boolean)
        }
        BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge => {
            (a.is_numeric() && b.is_numeric()).then_some(boolean)
        }
        BinaryOp::Add if a.is_string() || b.is_string() => {
            // concatenation with non-text operands is outside the subset
            (a.is_string() && b.is_string()).then(|| a.clone())
        }
        BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => {
            binary_promote(a.prim()?, b.prim()?).map(Ty::Prim)
        }
        BinaryOp::Shl | BinaryOp::Shr | BinaryOp::UShr => {
            let (x, y) = (a.prim()?, b.prim()?);
            (x.is_integral() && y.is_integral()).then(|| unary_promote(x).map(Ty::Prim)).flatten()
        }
        BinaryOp::BitAnd | BinaryOp::BitOr | BinaryOp::BitXor => {
            let (x, y) = (a.prim()?, b.prim()?);
            if x == PrimType::Boolean && y == PrimType::Boolean {
                Some(boolean)
            } else if x.is_integral() && y.is_integral() {
                binary_promote(x, y).map(Ty::Prim)
            } else {
                None
            }
        }
    }
}

fn conditional_type(a: &Ty, b: &Ty) -> Option<Ty> {
    if a == b {
        return Some(a.clone());
    }
    match (a, b) {
        (Ty::Opaque, _) | (_, Ty::Opaque) => Some(Ty::Opaque),
        (Ty::Prim(x), Ty::Prim(y)) => binary_promote(*x, *y).map(Ty::Prim),
        (Ty::Null, t) | (t, Ty::Null) if t.is_reference() => Some(t.clone()),
        _ => None,
    }
}
