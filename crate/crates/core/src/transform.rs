//! Rewrites a classified unit into a self-contained benchmark: unresolved
//! values become `Verifier` stubs, whatever still depends on the outside
//! world is pruned, an entry method is synthesized and the class is renamed
//! to `Main` with a provenance header.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::acquire::RepoSpec;
use crate::resolve::{
    build_type_table, classify_unit, Classification, DeclTy, Ty, TypeTable, STRING, VERIFIER,
};
use crate::syntax::ast::*;
use crate::syntax::parse_source;
use crate::syntax::printer::print_expr;

pub const MAIN_CLASS: &str = "Main";
pub const ENTRY: &str = "main";
const INSTANCE: &str = "instance";
const RENAMED_MAIN: &str = "originalMain";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TransformConfig {
    pub array_length_bound: u32,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig { array_length_bound: 16 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub repo: RepoSpec,
    pub original_path: String,
    pub original_class: String,
    pub tool_version: String,
}

impl Provenance {
    /// `<owner>/<name>@<revision> <path>`
    pub fn origin(&self) -> String {
        format!(
            "{}/{}@{} {}",
            self.repo.owner,
            self.repo.name,
            self.repo.revision_or_unknown(),
            self.original_path
        )
    }

    pub fn header_lines(&self) -> Vec<String> {
        vec![
            format!("origin: {}", self.origin()),
            format!("class: {}", self.original_class),
            format!("tool: {}", self.tool_version),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TransformStatus {
    Transformed,
    RejectedEmpty,
    RejectedUnresolvable,
}

impl TransformStatus {
    pub fn code(self) -> Option<&'static str> {
        match self {
            TransformStatus::Transformed => None,
            TransformStatus::RejectedEmpty => Some("TRANSFORM_EMPTY"),
            TransformStatus::RejectedUnresolvable => Some("TRANSFORM_UNRESOLVABLE"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum StubKind {
    Prim(PrimType),
    Array(PrimType),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Injection {
    pub span: Span,
    pub stub: StubKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Reason {
    ImportRemoved,
    FieldRemoved,
    MethodSignature,
    MethodReturn,
    ConstructorSignature,
    LocalRemoved,
    StatementRemoved,
    ConditionReplaced,
    ForInitDropped,
    ForUpdateDropped,
    AssertMessageDropped,
    MainRenamed,
    MethodNotInvoked,
    EntrySynthesized,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LogEntry {
    pub span: Span,
    pub reason: Reason,
    /// Name of the affected declaration, or the text of the affected
    /// statement or expression.
    pub subject: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformOutcome {
    pub status: TransformStatus,
    pub unit: Option<CompilationUnit>,
    pub removals: Vec<LogEntry>,
    pub injections: Vec<Injection>,
    /// Inject/prune rounds performed before the unit was closed.
    pub iterations: usize,
}

fn log(span: Span, reason: Reason, subject: impl Into<String>) -> LogEntry {
    LogEntry {
        span,
        reason,
        subject: subject.into(),
    }
}

fn with_span(mut e: Expr, span: Span) -> Expr {
    e.walk_mut(&mut |n| n.span = span);
    e
}

fn verifier_call(p: PrimType, span: Span) -> Expr {
    with_span(
        Expr::call(Some(Expr::name(VERIFIER)), &format!("nondet{}", p.title()), vec![]),
        span,
    )
}

pub fn array_helper_name(p: PrimType) -> String {
    format!("nondet{}Array", p.title())
}

fn stub_expr(stub: StubKind, span: Span) -> Expr {
    match stub {
        StubKind::Prim(p) => verifier_call(p, span),
        StubKind::Array(p) => with_span(Expr::call(None, &array_helper_name(p), vec![]), span),
    }
}

fn stub_for(t: &Ty) -> Option<StubKind> {
    match t {
        Ty::Prim(p) => Some(StubKind::Prim(*p)),
        Ty::PrimArray(p) => Some(StubKind::Array(*p)),
        _ => None,
    }
}

/// Parses a single member declaration out of a template class, with all
/// positions cleared.
fn template_method(class: &str, text: &str) -> MethodDecl {
    let src = format!("class {class} {{\n{text}\n}}\n");
    let unit = parse_source(&src).expect("generated member parses").normalized();
    unit.class.methods.into_iter().next().expect("template declares a method")
}

fn array_helper(class: &str, p: PrimType, bound: u32) -> MethodDecl {
    let t = p.keyword();
    let title = p.title();
    let name = array_helper_name(p);
    template_method(
        class,
        &format!(
            "private static {t}[] {name}() {{
    int length = {VERIFIER}.nondetInt();
    if (length < 0 || length > {bound}) {{
        length = 0;
    }}
    {t}[] result = new {t}[length];
    for (int i = 0; i < length; i++) {{
        result[i] = {VERIFIER}.nondet{title}();
    }}
    return result;
}}"
        ),
    )
}

/// Whether `m` is one of the generated array stubs.
pub fn is_array_helper(m: &MethodDecl) -> bool {
    m.params.is_empty()
        && m.modifiers.is_static
        && m.modifiers.visibility == Some(Visibility::Private)
        && PrimType::ALL.iter().any(|p| {
            m.name == array_helper_name(*p)
                && m.return_type.as_ref().is_some_and(|t| t.base == BaseType::Prim(*p) && t.array)
        })
}

fn is_entry(m: &MethodDecl, table: &TypeTable<'_>) -> bool {
    m.name == ENTRY
        && m.modifiers.is_static
        && m.return_type.is_none()
        && m.params.len() == 1
        && table.resolve_type_ref(&m.params[0].ty) == DeclTy::Known(Ty::RefArray(STRING.to_string()))
}

fn ensure_helpers(unit: &mut CompilationUnit, arrays: &BTreeSet<PrimType>, config: &TransformConfig) {
    for p in arrays {
        let name = array_helper_name(*p);
        if !unit.class.methods.iter().any(|m| m.name == name) {
            let helper = array_helper(&unit.class.name, *p, config.array_length_bound);
            unit.class.methods.push(helper);
        }
    }
}

struct Injector<'a, 't> {
    table: &'a TypeTable<'t>,
    cls: &'a Classification,
    log: Vec<Injection>,
    arrays: BTreeSet<PrimType>,
}

fn prim_only(t: Option<&Ty>) -> Option<Ty> {
    t.filter(|t| matches!(t, Ty::Prim(_))).cloned()
}

impl Injector<'_, '_> {
    fn replace(&mut self, e: &mut Expr, expected: Option<&Ty>) -> bool {
        let Some(stub) = expected.and_then(stub_for) else {
            return false;
        };
        let span = e.span;
        *e = stub_expr(stub, span);
        if let StubKind::Array(p) = stub {
            self.arrays.insert(p);
        }
        self.log.push(Injection { span, stub });
        true
    }

    /// Replaces the innermost unresolved nodes that sit in a context with a
    /// stub-able expected type. Assignment targets are never replaced.
    fn expr(&mut self, e: &mut Expr, expected: Option<&Ty>, lvalue: bool) -> bool {
        let cls = self.cls;
        let unresolved = cls.is_unresolved(e.id);
        if !unresolved && !cls.subtree_unresolved(e) {
            return false;
        }
        let id = e.id;
        let ty_of = |x: &Expr| cls.ty(x.id).cloned();
        let boolean = Ty::Prim(PrimType::Boolean);
        let int = Ty::Prim(PrimType::Int);
        let changed = match &mut e.kind {
            ExprKind::Literal(_) | ExprKind::Name(_) | ExprKind::This => false,
            ExprKind::FieldAccess { target, .. } => !unresolved && self.expr(target, None, false),
            ExprKind::Call { target, args, .. } => {
                if target.as_ref().is_some_and(|t| cls.is_unresolved(t.id)) {
                    false
                } else {
                    let params = cls.param_types.get(&id);
                    let mut ch = false;
                    if let Some(t) = target {
                        ch |= self.expr(t, None, false);
                    }
                    for (i, a) in args.iter_mut().enumerate() {
                        // an unresolved allowlisted call usually maps its
                        // argument type to its result type (abs, max, ...)
                        let exp = params
                            .and_then(|p| p.get(i).cloned().flatten())
                            .or_else(|| if unresolved { prim_only(expected) } else { None });
                        ch |= self.expr(a, exp.as_ref(), false);
                    }
                    ch
                }
            }
            ExprKind::New { args, .. } => {
                let params = cls.param_types.get(&id);
                let mut ch = false;
                for (i, a) in args.iter_mut().enumerate() {
                    let exp = params.and_then(|p| p.get(i).cloned().flatten());
                    ch |= self.expr(a, exp.as_ref(), false);
                }
                ch
            }
            ExprKind::NewArray { elem, creation } => match creation {
                ArrayCreation::Sized(len) => self.expr(len, Some(&int), false),
                ArrayCreation::Init(elems) => {
                    let et = self.table.resolve_type_ref(elem).known().cloned();
                    let mut ch = false;
                    for x in elems {
                        ch |= self.expr(x, et.as_ref(), false);
                    }
                    ch
                }
            },
            ExprKind::ArrayAccess { array, index } => {
                let arr = match expected {
                    Some(Ty::Prim(p)) => Some(Ty::PrimArray(*p)),
                    _ => None,
                };
                let a = self.expr(array, arr.as_ref(), false);
                self.expr(index, Some(&int), false) | a
            }
            ExprKind::Unary { op, operand } => match op {
                UnaryOp::Not => self.expr(operand, Some(&boolean), false),
                UnaryOp::PreInc | UnaryOp::PreDec | UnaryOp::PostInc | UnaryOp::PostDec => {
                    self.expr(operand, None, true)
                }
                _ => {
                    let exp = expected.filter(|t| t.is_numeric()).cloned();
                    self.expr(operand, exp.as_ref(), false)
                }
            },
            ExprKind::Binary { op, lhs, rhs } => {
                let (lt, rt) = (prim_only(ty_of(lhs).as_ref()), prim_only(ty_of(rhs).as_ref()));
                let (el, er) = match op {
                    BinaryOp::And | BinaryOp::Or => (Some(boolean.clone()), Some(boolean.clone())),
                    o if o.is_relational() => (rt, lt),
                    BinaryOp::Shl | BinaryOp::Shr | BinaryOp::UShr => {
                        (expected.filter(|t| t.is_numeric()).cloned(), Some(int.clone()))
                    }
                    _ => {
                        let own = prim_only(expected).filter(|t| !t.is_boolean() || !op_is_arith(*op));
                        (own.clone().or(rt), own.or(lt))
                    }
                };
                let a = self.expr(lhs, el.as_ref(), false);
                self.expr(rhs, er.as_ref(), false) | a
            }
            ExprKind::Conditional {
                cond,
                then_expr,
                else_expr,
            } => {
                let c = self.expr(cond, Some(&boolean), false);
                let t = self.expr(then_expr, expected, false);
                self.expr(else_expr, expected, false) | c | t
            }
            ExprKind::Cast { ty, operand } => {
                let target = self.table.resolve_type_ref(ty).known().cloned();
                self.expr(operand, prim_only(target.as_ref()).as_ref(), false)
            }
            ExprKind::Paren(inner) => self.expr(inner, expected, lvalue),
            ExprKind::Assign { target, value, .. } => {
                let tt = ty_of(target);
                let t = self.expr(target, None, true);
                self.expr(value, tt.as_ref(), false) | t
            }
        };
        if changed {
            return true;
        }
        unresolved && !lvalue && self.replace(e, expected)
    }

    fn local(&mut self, d: &mut LocalDecl) -> bool {
        let t = self.table.resolve_type_ref(&d.ty).known().cloned();
        match &mut d.init {
            Some(init) => self.expr(init, t.as_ref(), false),
            None => false,
        }
    }

    fn stmt(&mut self, s: &mut Stmt, ret: Option<&Ty>) -> bool {
        let boolean = Ty::Prim(PrimType::Boolean);
        match &mut s.kind {
            StmtKind::Block(b) => self.block(b, ret),
            StmtKind::Local(d) => self.local(d),
            StmtKind::Expr(e) | StmtKind::Throw(e) => self.expr(e, None, false),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => {
                let mut ch = self.expr(cond, Some(&boolean), false);
                ch |= self.stmt(then_branch, ret);
                if let Some(e) = else_branch {
                    ch |= self.stmt(e, ret);
                }
                ch
            }
            StmtKind::While { cond, body } => {
                let c = self.expr(cond, Some(&boolean), false);
                self.stmt(body, ret) | c
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                let mut ch = match init {
                    Some(ForInit::Local(d)) => self.local(d),
                    Some(ForInit::Exprs(es)) => es.iter_mut().fold(false, |ch, e| self.expr(e, None, false) | ch),
                    None => false,
                };
                if let Some(c) = cond {
                    ch |= self.expr(c, Some(&boolean), false);
                }
                for u in update {
                    ch |= self.expr(u, None, false);
                }
                self.stmt(body, ret) | ch
            }
            StmtKind::Return(e) => match e {
                Some(e) => self.expr(e, ret, false),
                None => false,
            },
            StmtKind::Assert { cond, message } => {
                let mut ch = self.expr(cond, Some(&boolean), false);
                if let Some(m) = message {
                    ch |= self.expr(m, None, false);
                }
                ch
            }
        }
    }

    fn block(&mut self, b: &mut Block, ret: Option<&Ty>) -> bool {
        b.stmts.iter_mut().fold(false, |ch, s| self.stmt(s, ret) | ch)
    }
}

fn op_is_arith(op: BinaryOp) -> bool {
    matches!(
        op,
        BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem
    )
}

/// Replaces unresolved expressions whose context expects a primitive or
/// primitive array with nondeterministic stubs, adding array helpers as
/// needed. Node ids are stale afterwards; renumber before reclassifying.
pub fn inject_nondet(
    unit: &mut CompilationUnit,
    table: &TypeTable<'_>,
    cls: &Classification,
    config: &TransformConfig,
) -> Vec<Injection> {
    let mut inj = Injector {
        table,
        cls,
        log: Vec::new(),
        arrays: BTreeSet::new(),
    };
    for f in &mut unit.class.fields {
        let t = table.resolve_type_ref(&f.ty).known().cloned();
        if let Some(init) = &mut f.init {
            inj.expr(init, t.as_ref(), false);
        }
    }
    for c in &mut unit.class.constructors {
        inj.block(&mut c.body, None);
    }
    for m in &mut unit.class.methods {
        let ret = match &m.return_type {
            Some(t) => table.resolve_type_ref(t).known().cloned(),
            None => Some(Ty::Void),
        };
        inj.block(&mut m.body, ret.as_ref());
    }
    let Injector { log, arrays, .. } = inj;
    ensure_helpers(unit, &arrays, config);
    log
}

struct Pruner<'a, 't> {
    table: &'a TypeTable<'t>,
    cls: &'a Classification,
    log: Vec<LogEntry>,
    unresolved_return: bool,
}

impl Pruner<'_, '_> {
    fn unresolved(&self, e: &Expr) -> bool {
        self.cls.subtree_unresolved(e)
    }

    fn local_fails(&self, d: &LocalDecl) -> bool {
        self.table.resolve_type_ref(&d.ty).known().is_none() || d.init.as_ref().is_some_and(|e| self.unresolved(e))
    }

    fn nondet_condition(&mut self, cond: &mut Expr) {
        if self.unresolved(cond) {
            self.log.push(log(cond.span, Reason::ConditionReplaced, print_expr(cond)));
            *cond = verifier_call(PrimType::Boolean, cond.span);
        }
    }

    /// A removed branch body becomes an empty block so the statement shape
    /// stays valid.
    fn branch(&mut self, s: Stmt) -> Stmt {
        let span = s.span;
        self.stmt(s).unwrap_or(Stmt {
            kind: StmtKind::Block(Block { stmts: vec![], span }),
            span,
        })
    }

    fn stmts(&mut self, stmts: Vec<Stmt>) -> Vec<Stmt> {
        stmts.into_iter().filter_map(|s| self.stmt(s)).collect()
    }

    fn stmt(&mut self, s: Stmt) -> Option<Stmt> {
        let span = s.span;
        let kind = match s.kind {
            StmtKind::Block(b) => StmtKind::Block(Block {
                stmts: self.stmts(b.stmts),
                span: b.span,
            }),
            StmtKind::Local(d) => {
                if self.local_fails(&d) {
                    self.log.push(log(span, Reason::LocalRemoved, d.name));
                    return None;
                }
                StmtKind::Local(d)
            }
            StmtKind::Expr(e) | StmtKind::Throw(e) if self.unresolved(&e) => {
                self.log.push(log(span, Reason::StatementRemoved, print_expr(&e)));
                return None;
            }
            StmtKind::Assert { cond, .. } if self.unresolved(&cond) => {
                self.log.push(log(span, Reason::StatementRemoved, print_expr(&cond)));
                return None;
            }
            StmtKind::Assert {
                cond,
                message: Some(m),
            } if self.unresolved(&m) => {
                self.log.push(log(m.span, Reason::AssertMessageDropped, print_expr(&m)));
                StmtKind::Assert { cond, message: None }
            }
            StmtKind::Return(Some(e)) => {
                if self.unresolved(&e) {
                    self.unresolved_return = true;
                }
                StmtKind::Return(Some(e))
            }
            StmtKind::If {
                mut cond,
                then_branch,
                else_branch,
            } => {
                self.nondet_condition(&mut cond);
                StmtKind::If {
                    cond,
                    then_branch: Box::new(self.branch(*then_branch)),
                    else_branch: else_branch.and_then(|e| self.stmt(*e)).map(Box::new),
                }
            }
            StmtKind::While { mut cond, body } => {
                self.nondet_condition(&mut cond);
                StmtKind::While {
                    cond,
                    body: Box::new(self.branch(*body)),
                }
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                let init = match init {
                    Some(ForInit::Local(d)) if self.local_fails(&d) => {
                        self.log.push(log(span, Reason::ForInitDropped, d.name));
                        None
                    }
                    Some(ForInit::Exprs(es)) => {
                        let kept: Vec<Expr> = es
                            .into_iter()
                            .filter(|e| {
                                let bad = self.unresolved(e);
                                if bad {
                                    self.log.push(log(e.span, Reason::ForInitDropped, print_expr(e)));
                                }
                                !bad
                            })
                            .collect();
                        (!kept.is_empty()).then_some(ForInit::Exprs(kept))
                    }
                    other => other,
                };
                let cond = cond.map(|mut c| {
                    self.nondet_condition(&mut c);
                    c
                });
                let update = update
                    .into_iter()
                    .filter(|e| {
                        let bad = self.unresolved(e);
                        if bad {
                            self.log.push(log(e.span, Reason::ForUpdateDropped, print_expr(e)));
                        }
                        !bad
                    })
                    .collect();
                StmtKind::For {
                    init,
                    cond,
                    update,
                    body: Box::new(self.branch(*body)),
                }
            }
            other => other,
        };
        Some(Stmt { kind, span })
    }
}

/// Removes what still references unresolved names after injection,
/// smallest enclosing construct first. Conditions of control statements
/// are replaced by `Verifier.nondetBoolean()` instead of being removed.
pub fn prune_external(unit: &mut CompilationUnit, table: &TypeTable<'_>, cls: &Classification) -> Vec<LogEntry> {
    let mut p = Pruner {
        table,
        cls,
        log: Vec::new(),
        unresolved_return: false,
    };
    let imports = std::mem::take(&mut unit.imports);
    for imp in imports {
        if table.import_allowed(&imp) {
            unit.imports.push(imp);
        } else {
            p.log.push(log(imp.span, Reason::ImportRemoved, imp.path.clone()));
        }
    }
    let fields = std::mem::take(&mut unit.class.fields);
    for f in fields {
        let external = table.resolve_type_ref(&f.ty).known().is_none();
        if external || f.init.as_ref().is_some_and(|e| cls.subtree_unresolved(e)) {
            p.log.push(log(f.span, Reason::FieldRemoved, f.name.clone()));
        } else {
            unit.class.fields.push(f);
        }
    }
    let external_sig = |params: &[Param]| params.iter().any(|x| table.resolve_type_ref(&x.ty).known().is_none());
    let ctors = std::mem::take(&mut unit.class.constructors);
    for mut c in ctors {
        if external_sig(&c.params) {
            p.log.push(log(c.span, Reason::ConstructorSignature, c.name.clone()));
            continue;
        }
        c.body.stmts = p.stmts(std::mem::take(&mut c.body.stmts));
        unit.class.constructors.push(c);
    }
    let methods = std::mem::take(&mut unit.class.methods);
    for mut m in methods {
        let bad_ret = m.return_type.as_ref().is_some_and(|t| table.resolve_type_ref(t).known().is_none());
        if bad_ret || external_sig(&m.params) {
            p.log.push(log(m.span, Reason::MethodSignature, m.name.clone()));
            continue;
        }
        p.unresolved_return = false;
        let mark = p.log.len();
        let stmts = p.stmts(std::mem::take(&mut m.body.stmts));
        if p.unresolved_return {
            // the statement-level entries are moot once the method goes
            p.log.truncate(mark);
            p.log.push(log(m.span, Reason::MethodReturn, m.name.clone()));
            continue;
        }
        m.body.stmts = stmts;
        unit.class.methods.push(m);
    }
    p.log
}

fn nondet_args(params: &[Param], table: &TypeTable<'_>) -> Option<(Vec<Expr>, BTreeSet<PrimType>)> {
    let mut args = Vec::new();
    let mut arrays = BTreeSet::new();
    for p in params {
        let stub = table.resolve_type_ref(&p.ty).known().and_then(stub_for)?;
        if let StubKind::Array(t) = stub {
            arrays.insert(t);
        }
        args.push(stub_expr(stub, Span::default()));
    }
    Some((args, arrays))
}

fn invocable_methods(unit: &CompilationUnit, table: &TypeTable<'_>) -> usize {
    unit.class
        .methods
        .iter()
        .filter(|m| !is_array_helper(m) && !is_entry(m, table))
        .count()
}

/// Appends `public static void main(String[] args)` invoking every other
/// method once in declaration order. A unit that already has such an entry
/// keeps it unchanged. Returns the log, or the log with the unit rejected
/// when nothing can be invoked.
pub fn synthesize_entry(
    unit: &mut CompilationUnit,
    table: &TypeTable<'_>,
    config: &TransformConfig,
) -> Result<Vec<LogEntry>, Vec<LogEntry>> {
    let mut out = Vec::new();
    if unit.class.methods.iter().any(|m| is_entry(m, table)) {
        return Ok(out);
    }
    if invocable_methods(unit, table) == 0 {
        return Err(out);
    }
    // a non-entry method called `main` would clash with the entry
    if unit.class.methods.iter().any(|m| m.name == ENTRY) {
        let mut new_name = RENAMED_MAIN.to_string();
        let mut k = 2;
        while table.methods.contains_key(&new_name) || table.fields.contains_key(&new_name) {
            new_name = format!("{RENAMED_MAIN}{k}");
            k += 1;
        }
        let class = unit.class.name.clone();
        for m in &mut unit.class.methods {
            if m.name == ENTRY {
                out.push(log(m.span, Reason::MainRenamed, new_name.clone()));
                m.name = new_name.clone();
            }
        }
        unit.walk_exprs_mut(&mut |e| {
            if let ExprKind::Call { target, name, .. } = &mut e.kind {
                let own = match target.as_deref() {
                    None => true,
                    Some(t) => matches!(&t.kind, ExprKind::This) || matches!(&t.kind, ExprKind::Name(n) if *n == class),
                };
                if own && name == ENTRY {
                    *name = new_name.clone();
                }
            }
        });
    }
    let needs_instance = unit.class.methods.iter().any(|m| !m.modifiers.is_static && !is_array_helper(m))
        || unit.class.fields.iter().any(|f| !f.modifiers.is_static);
    let mut arrays = BTreeSet::new();
    let mut body = Vec::new();
    let mut have_instance = false;
    if needs_instance {
        let ctor_args = if unit.class.constructors.is_empty() {
            Some(Vec::new())
        } else {
            unit.class.constructors.iter().find_map(|c| nondet_args(&c.params, table)).map(|(args, arr)| {
                arrays.extend(arr);
                args
            })
        };
        if let Some(args) = ctor_args {
            let class = unit.class.name.clone();
            body.push(Stmt::synthetic(StmtKind::Local(LocalDecl {
                is_final: false,
                ty: TypeRef::named(&class, false),
                name: INSTANCE.to_string(),
                init: Some(Expr::synthetic(ExprKind::New { class, args })),
            })));
            have_instance = true;
        }
    }
    let mut calls = 0;
    for m in &unit.class.methods {
        if is_array_helper(m) {
            continue;
        }
        let args = nondet_args(&m.params, table);
        let receiver_ok = m.modifiers.is_static || have_instance;
        match args {
            Some((args, arr)) if receiver_ok => {
                arrays.extend(arr);
                let target = (!m.modifiers.is_static).then(|| Expr::name(INSTANCE));
                body.push(Stmt::synthetic(StmtKind::Expr(Expr::call(target, &m.name, args))));
                calls += 1;
            }
            _ => out.push(log(m.span, Reason::MethodNotInvoked, m.name.clone())),
        }
    }
    if calls == 0 {
        return Err(out);
    }
    ensure_helpers(unit, &arrays, config);
    let mut entry = template_method(&unit.class.name, "public static void main(String[] args) {}");
    entry.body.stmts = body;
    unit.class.methods.push(entry);
    out.push(log(unit.class.span, Reason::EntrySynthesized, ENTRY));
    Ok(out)
}

/// Renames the class to `Main` (with every self-reference), drops the
/// package declaration and replaces the header with provenance.
pub fn rename_standardize(unit: &mut CompilationUnit, prov: &Provenance) {
    let old = unit.class.name.clone();
    if old != MAIN_CLASS {
        unit.class.name = MAIN_CLASS.to_string();
        for c in &mut unit.class.constructors {
            c.name = MAIN_CLASS.to_string();
        }
        unit.walk_type_refs_mut(&mut |t| {
            if matches!(&t.base, BaseType::Named(n) if *n == old) {
                t.base = BaseType::Named(MAIN_CLASS.to_string());
            }
        });
        unit.walk_exprs_mut(&mut |e| match &mut e.kind {
            ExprKind::Name(n) | ExprKind::New { class: n, .. } if *n == old => *n = MAIN_CLASS.to_string(),
            _ => {}
        });
    }
    unit.package = None;
    unit.header = prov.header_lines();
}

fn non_helper_methods(unit: &CompilationUnit) -> usize {
    unit.class.methods.iter().filter(|m| !is_array_helper(m)).count()
}

/// inject → prune to a fixpoint, then entry synthesis and renaming.
pub fn transform_file(
    unit: &CompilationUnit,
    table: &TypeTable<'_>,
    prov: &Provenance,
    config: &TransformConfig,
) -> TransformOutcome {
    let allow = table.allowlist;
    let mut u = unit.clone();
    u.renumber();
    let mut outcome = TransformOutcome {
        status: TransformStatus::Transformed,
        unit: None,
        removals: Vec::new(),
        injections: Vec::new(),
        iterations: 0,
    };
    let reject = |mut o: TransformOutcome, status| {
        o.status = status;
        o
    };
    let bound = u.expr_count() + 1;
    loop {
        let Ok(t) = build_type_table(&u, allow) else {
            return reject(outcome, TransformStatus::RejectedUnresolvable);
        };
        let cls = classify_unit(&u, &t);
        if cls.unresolved_total() == 0 {
            break;
        }
        if outcome.iterations == bound {
            return reject(outcome, TransformStatus::RejectedUnresolvable);
        }
        outcome.iterations += 1;
        let inj = inject_nondet(&mut u, &t, &cls, config);
        u.renumber();
        if !inj.is_empty() {
            outcome.injections.extend(inj);
            continue;
        }
        let rem = prune_external(&mut u, &t, &cls);
        if rem.is_empty() {
            return reject(outcome, TransformStatus::RejectedUnresolvable);
        }
        outcome.removals.extend(rem);
        u.renumber();
        if non_helper_methods(&u) == 0 {
            return reject(outcome, TransformStatus::RejectedEmpty);
        }
    }
    let Ok(t) = build_type_table(&u, allow) else {
        return reject(outcome, TransformStatus::RejectedUnresolvable);
    };
    match synthesize_entry(&mut u, &t, config) {
        Ok(l) => outcome.removals.extend(l),
        Err(l) => {
            outcome.removals.extend(l);
            return reject(outcome, TransformStatus::RejectedEmpty);
        }
    }
    rename_standardize(&mut u, prov);
    u.renumber();
    // closure is a postcondition; never emit a unit that violates it
    match build_type_table(&u, allow) {
        Ok(t) if classify_unit(&u, &t).unresolved_total() == 0 => {}
        _ => return reject(outcome, TransformStatus::RejectedUnresolvable),
    }
    outcome.unit = Some(u);
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resolve::Allowlist;
    use crate::syntax::pretty_print;

    fn prov() -> Provenance {
        Provenance {
            repo: RepoSpec::new("acme", "widgets", "3f9c0aa"),
            original_path: "src/Widget.java".into(),
            original_class: "Widget".into(),
            tool_version: "argforge 0.1.0".into(),
        }
    }

    fn run(src: &str) -> TransformOutcome {
        let unit = parse_source(src).unwrap();
        let allow = Allowlist::jdk_default();
        let table = build_type_table(&unit, &allow).unwrap();
        transform_file(&unit, &table, &prov(), &TransformConfig::default())
    }

    fn output(src: &str) -> String {
        let o = run(src);
        assert_eq!(o.status, TransformStatus::Transformed, "{o:?}");
        pretty_print(o.unit.as_ref().unwrap())
    }

    #[test]
    fn external_int_becomes_a_stub() {
        let out = output("class A { int f() { int n = reader.nextInt(); return n; } }");
        assert!(out.contains("int n = Verifier.nondetInt();"), "{out}");
    }

    #[test]
    fn resolved_code_is_untouched() {
        let o = run("class A { boolean f() { boolean b = true; return b; } }");
        assert!(o.injections.is_empty());
        assert_eq!(o.removals.iter().map(|l| l.reason).collect::<Vec<_>>(), vec![Reason::EntrySynthesized]);
        assert!(pretty_print(o.unit.as_ref().unwrap()).contains("boolean b = true;"));
    }

    #[test]
    fn external_array_becomes_a_bounded_fresh_array() {
        let o = run("class A { double f() { double[] xs = source.data(); return xs[0]; } }");
        assert_eq!(o.injections[0].stub, StubKind::Array(PrimType::Double));
        let out = pretty_print(o.unit.as_ref().unwrap());
        assert!(out.contains("double[] xs = nondetDoubleArray();"), "{out}");
        assert!(out.contains("if (length < 0 || length > 16) {"), "{out}");
        assert!(out.contains("result[i] = Verifier.nondetDouble();"), "{out}");
    }

    #[test]
    fn array_bound_comes_from_config() {
        let unit = parse_source("class A { int f() { int[] xs = src.get(); return xs.length; } }").unwrap();
        let allow = Allowlist::jdk_default();
        let table = build_type_table(&unit, &allow).unwrap();
        let o = transform_file(&unit, &table, &prov(), &TransformConfig { array_length_bound: 3 });
        assert!(pretty_print(o.unit.as_ref().unwrap()).contains("length > 3"));
    }

    #[test]
    fn external_statement_is_removed() {
        let o = run("class A { int x; void f() { log.info(\"x\"); x++; } }");
        let removed: Vec<_> = o.removals.iter().filter(|l| l.reason == Reason::StatementRemoved).collect();
        assert_eq!(removed.len(), 1);
        assert_eq!(removed[0].subject, "log.info(\"x\")");
        assert!(pretty_print(o.unit.as_ref().unwrap()).contains("x++;"));
    }

    #[test]
    fn external_field_and_its_uses_are_removed() {
        let out = output(
            "import org.slf4j.Logger; class A { Logger log = getLogger(); int n; \
             void f() { log.debug(\"start\"); n = n + 1; } }",
        );
        assert!(!out.contains("log"), "{out}");
        assert!(!out.contains("import"), "{out}");
        assert!(out.contains("n = n + 1;"), "{out}");
    }

    #[test]
    fn external_condition_becomes_nondet() {
        let out = output("class A { int x; void f() { if (ext.check()) { x++; } } }");
        assert!(out.contains("if (Verifier.nondetBoolean()) {\n            x++;"), "{out}");
    }

    #[test]
    fn static_entry_calls_with_stubs() {
        let out = output("class A { static int f(int a) { return a + 1; } }");
        assert!(out.contains("public static void main(String[] args) {\n        f(Verifier.nondetInt());\n    }"), "{out}");
    }

    #[test]
    fn instance_entry_constructs_first() {
        let out = output("class A { int k; int g(double d) { return k; } }");
        assert!(
            out.contains("Main instance = new Main();\n        instance.g(Verifier.nondetDouble());"),
            "{out}"
        );
    }

    #[test]
    fn wrapper_files_are_rejected_empty() {
        let o = run(
            "import com.api.Client; class W { Client c; Client client() { return c; } \
             void send(Client x) { x.send(); } }",
        );
        assert_eq!(o.status, TransformStatus::RejectedEmpty);
        assert!(o.unit.is_none());
    }

    #[test]
    fn rename_and_provenance() {
        let out = output(
            "package com.acme; class Widget { static Widget make() { return new Widget(); } \
             Widget() {} int size() { return 3; } }",
        );
        assert!(out.starts_with("// origin: acme/widgets@3f9c0aa src/Widget.java\n"), "{out}");
        assert!(!out.contains("package"));
        assert!(!out.contains("Widget()") && out.contains("new Main()") && out.contains("    Main() {"), "{out}");
    }

    #[test]
    fn unknown_revision() {
        let mut p = prov();
        p.repo.revision.clear();
        assert_eq!(p.origin(), "acme/widgets@unknown src/Widget.java");
    }

    #[test]
    fn existing_entry_is_kept_and_clashing_main_is_renamed() {
        let kept = output("class A { public static void main(String[] args) { int x = 1; } static void g() {} }");
        assert_eq!(kept.matches("main(").count(), 1);
        let renamed = output("class A { static int main(int a) { return a; } static int g() { return main(2); } }");
        assert!(renamed.contains("static int originalMain(int a)"), "{renamed}");
        assert!(renamed.contains("return originalMain(2);"), "{renamed}");
    }

    #[test]
    fn operator_with_external_operand_keeps_resolved_side() {
        let out = output("class A { int f(int a) { int x = a + reader.next(); return x; } }");
        assert!(out.contains("int x = a + Verifier.nondetInt();"), "{out}");
    }

    #[test]
    fn text_contexts_are_pruned_not_stubbed() {
        let o = run("class A { int f() { String s = ext.name(); int k = 2; return k; } }");
        assert!(o.injections.is_empty());
        assert!(o.removals.iter().any(|l| l.reason == Reason::LocalRemoved && l.subject == "s"));
    }

    #[test]
    fn logs_reference_input_spans() {
        let src = "class A { int f(int a) {\n  int x = a + reader.next();\n  ext.go();\n  return x; } }";
        let o = run(src);
        let unit = parse_source(src).unwrap();
        let mut spans = BTreeSet::new();
        unit.walk_exprs(&mut |e| {
            spans.insert(e.span);
        });
        unit.walk_stmts(&mut |s| {
            spans.insert(s.span);
        });
        spans.insert(unit.class.span);
        for m in &unit.class.methods {
            spans.insert(m.span);
        }
        for i in &o.injections {
            assert!(spans.contains(&i.span), "{:?}", i);
        }
        for r in &o.removals {
            assert!(spans.contains(&r.span), "{:?}", r);
        }
    }
}
