//! Syntax tree for one compilation unit of the source subset.
//!
//! Every node carries a [`Span`]; expressions additionally carry a
//! [`NodeId`] so that resolution results can be keyed per node. Structural
//! equality (as used by the round-trip property) ignores both: compare
//! [`CompilationUnit::normalized`] copies.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct Span {
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(start_line: u32, start_col: u32, end_line: u32, end_col: u32) -> Span {
        Span {
            start_line,
            start_col,
            end_line,
            end_col,
        }
    }

    pub fn to(self, other: Span) -> Span {
        Span {
            start_line: self.start_line,
            start_col: self.start_col,
            end_line: other.end_line,
            end_col: other.end_col,
        }
    }

    pub fn start(self) -> (u32, u32) {
        (self.start_line, self.start_col)
    }

    pub fn end(self) -> (u32, u32) {
        (self.end_line, self.end_col)
    }

    pub fn contains(self, inner: Span) -> bool {
        self.start() <= inner.start() && inner.end() <= self.end()
    }

    pub fn is_synthetic(self) -> bool {
        self == Span::default()
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}",
            self.start_line, self.start_col, self.end_line, self.end_col
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct NodeId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PrimType {
    Boolean,
    Byte,
    Char,
    Short,
    Int,
    Long,
    Float,
    Double,
}

impl PrimType {
    pub const ALL: [PrimType; 8] = [
        PrimType::Boolean,
        PrimType::Byte,
        PrimType::Char,
        PrimType::Short,
        PrimType::Int,
        PrimType::Long,
        PrimType::Float,
        PrimType::Double,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            PrimType::Boolean => "boolean",
            PrimType::Byte => "byte",
            PrimType::Char => "char",
            PrimType::Short => "short",
            PrimType::Int => "int",
            PrimType::Long => "long",
            PrimType::Float => "float",
            PrimType::Double => "double",
        }
    }

    pub fn from_keyword(s: &str) -> Option<PrimType> {
        PrimType::ALL.into_iter().find(|p| p.keyword() == s)
    }

    /// `Boolean`, `Int`, ... as used in `Verifier.nondetInt()`.
    pub fn title(self) -> &'static str {
        match self {
            PrimType::Boolean => "Boolean",
            PrimType::Byte => "Byte",
            PrimType::Char => "Char",
            PrimType::Short => "Short",
            PrimType::Int => "Int",
            PrimType::Long => "Long",
            PrimType::Float => "Float",
            PrimType::Double => "Double",
        }
    }

    pub fn is_numeric(self) -> bool {
        self != PrimType::Boolean
    }

    pub fn is_integral(self) -> bool {
        matches!(
            self,
            PrimType::Byte | PrimType::Char | PrimType::Short | PrimType::Int | PrimType::Long
        )
    }
}

impl fmt::Display for PrimType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaseType {
    Prim(PrimType),
    /// Simple or dotted reference-type name as written.
    Named(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeRef {
    pub base: BaseType,
    pub array: bool,
    pub span: Span,
}

impl TypeRef {
    pub fn prim(p: PrimType) -> TypeRef {
        TypeRef {
            base: BaseType::Prim(p),
            array: false,
            span: Span::default(),
        }
    }

    pub fn named(name: &str, array: bool) -> TypeRef {
        TypeRef {
            base: BaseType::Named(name.to_string()),
            array,
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Visibility {
    Public,
    Protected,
    Private,
}

impl Visibility {
    pub fn keyword(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Protected => "protected",
            Visibility::Private => "private",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Modifiers {
    pub visibility: Option<Visibility>,
    pub is_static: bool,
    pub is_final: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompilationUnit {
    /// Leading `//` comment lines.
    pub header: Vec<String>,
    pub package: Option<String>,
    pub imports: Vec<Import>,
    pub class: ClassDecl,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    pub path: String,
    pub wildcard: bool,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassDecl {
    pub modifiers: Modifiers,
    pub name: String,
    pub fields: Vec<FieldDecl>,
    pub constructors: Vec<ConstructorDecl>,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub modifiers: Modifiers,
    pub ty: TypeRef,
    pub name: String,
    pub init: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub is_final: bool,
    pub ty: TypeRef,
    pub name: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodDecl {
    pub modifiers: Modifiers,
    /// `None` is `void`.
    pub return_type: Option<TypeRef>,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructorDecl {
    pub modifiers: Modifiers,
    pub name: String,
    pub params: Vec<Param>,
    pub body: Block,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalDecl {
    pub is_final: bool,
    pub ty: TypeRef,
    pub name: String,
    pub init: Option<Expr>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForInit {
    Local(LocalDecl),
    Exprs(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Block(Block),
    Local(LocalDecl),
    Expr(Expr),
    If {
        cond: Expr,
        then_branch: Box<Stmt>,
        else_branch: Option<Box<Stmt>>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    For {
        init: Option<ForInit>,
        cond: Option<Expr>,
        update: Vec<Expr>,
        body: Box<Stmt>,
    },
    Return(Option<Expr>),
    Assert {
        cond: Expr,
        message: Option<Expr>,
    },
    Throw(Expr),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub id: NodeId,
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Long(i64),
    Float(f32),
    Double(f64),
    Char(char),
    Str(String),
    Bool(bool),
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Plus,
    Not,
    BitNot,
    PreInc,
    PreDec,
    PostInc,
    PostDec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Mul,
    Div,
    Rem,
    Add,
    Sub,
    Shl,
    Shr,
    UShr,
    Lt,
    Gt,
    Le,
    Ge,
    Eq,
    Ne,
    BitAnd,
    BitXor,
    BitOr,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Shl => "<<",
            BinaryOp::Shr => ">>",
            BinaryOp::UShr => ">>>",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::BitAnd => "&",
            BinaryOp::BitXor => "^",
            BinaryOp::BitOr => "|",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::BitOr => 3,
            BinaryOp::BitXor => 4,
            BinaryOp::BitAnd => 5,
            BinaryOp::Eq | BinaryOp::Ne => 6,
            BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge => 7,
            BinaryOp::Shl | BinaryOp::Shr | BinaryOp::UShr => 8,
            BinaryOp::Add | BinaryOp::Sub => 9,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 10,
        }
    }

    pub fn is_relational(self) -> bool {
        matches!(
            self,
            BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge | BinaryOp::Eq | BinaryOp::Ne
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssignOp {
    Assign,
    /// Compound assignment `op=`.
    Compound(BinaryOp),
}

impl AssignOp {
    pub fn symbol(self) -> String {
        match self {
            AssignOp::Assign => "=".to_string(),
            AssignOp::Compound(op) => format!("{}=", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ArrayCreation {
    /// `new T[len]`
    Sized(Box<Expr>),
    /// `new T[] { a, b }`
    Init(Vec<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Literal(Literal),
    Name(String),
    This,
    FieldAccess {
        target: Box<Expr>,
        name: String,
    },
    Call {
        target: Option<Box<Expr>>,
        name: String,
        args: Vec<Expr>,
    },
    New {
        class: String,
        args: Vec<Expr>,
    },
    NewArray {
        elem: TypeRef,
        creation: ArrayCreation,
    },
    ArrayAccess {
        array: Box<Expr>,
        index: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Conditional {
        cond: Box<Expr>,
        then_expr: Box<Expr>,
        else_expr: Box<Expr>,
    },
    Cast {
        ty: TypeRef,
        operand: Box<Expr>,
    },
    Paren(Box<Expr>),
    Assign {
        op: AssignOp,
        target: Box<Expr>,
        value: Box<Expr>,
    },
}

impl Expr {
    /// A synthetic node; ids are reassigned by [`CompilationUnit::renumber`].
    pub fn synthetic(kind: ExprKind) -> Expr {
        Expr {
            id: NodeId::default(),
            kind,
            span: Span::default(),
        }
    }

    pub fn name(n: &str) -> Expr {
        Expr::synthetic(ExprKind::Name(n.to_string()))
    }

    pub fn call(target: Option<Expr>, name: &str, args: Vec<Expr>) -> Expr {
        Expr::synthetic(ExprKind::Call {
            target: target.map(Box::new),
            name: name.to_string(),
            args,
        })
    }

    /// Direct children in evaluation order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Literal(_) | ExprKind::Name(_) | ExprKind::This => vec![],
            ExprKind::FieldAccess { target, .. } => vec![target],
            ExprKind::Call { target, args, .. } => {
                target.iter().map(|t| &**t).chain(args.iter()).collect()
            }
            ExprKind::New { args, .. } => args.iter().collect(),
            ExprKind::NewArray { creation, .. } => match creation {
                ArrayCreation::Sized(len) => vec![len],
                ArrayCreation::Init(elems) => elems.iter().collect(),
            },
            ExprKind::ArrayAccess { array, index } => vec![array, index],
            ExprKind::Unary { operand, .. } => vec![operand],
            ExprKind::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            ExprKind::Conditional {
                cond,
                then_expr,
                else_expr,
            } => vec![cond, then_expr, else_expr],
            ExprKind::Cast { operand, .. } => vec![operand],
            ExprKind::Paren(inner) => vec![inner],
            ExprKind::Assign { target, value, .. } => vec![target, value],
        }
    }

    pub fn children_mut(&mut self) -> Vec<&mut Expr> {
        match &mut self.kind {
            ExprKind::Literal(_) | ExprKind::Name(_) | ExprKind::This => vec![],
            ExprKind::FieldAccess { target, .. } => vec![target],
            ExprKind::Call { target, args, .. } => target
                .iter_mut()
                .map(|t| &mut **t)
                .chain(args.iter_mut())
                .collect(),
            ExprKind::New { args, .. } => args.iter_mut().collect(),
            ExprKind::NewArray { creation, .. } => match creation {
                ArrayCreation::Sized(len) => vec![len],
                ArrayCreation::Init(elems) => elems.iter_mut().collect(),
            },
            ExprKind::ArrayAccess { array, index } => vec![array, index],
            ExprKind::Unary { operand, .. } => vec![operand],
            ExprKind::Binary { lhs, rhs, .. } => vec![lhs, rhs],
            ExprKind::Conditional {
                cond,
                then_expr,
                else_expr,
            } => vec![cond, then_expr, else_expr],
            ExprKind::Cast { operand, .. } => vec![operand],
            ExprKind::Paren(inner) => vec![inner],
            ExprKind::Assign { target, value, .. } => vec![target, value],
        }
    }

    /// Pre-order traversal of this expression and all sub-expressions.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Expr)) {
        f(self);
        for c in self.children_mut() {
            c.walk_mut(f);
        }
    }
}

impl Stmt {
    pub fn synthetic(kind: StmtKind) -> Stmt {
        Stmt {
            kind,
            span: Span::default(),
        }
    }

    /// Expressions owned directly by this statement (not by nested statements).
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::Block(_) => vec![],
            StmtKind::Local(d) => d.init.iter().collect(),
            StmtKind::Expr(e) | StmtKind::Throw(e) => vec![e],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::For {
                init, cond, update, ..
            } => {
                let mut v: Vec<&Expr> = Vec::new();
                match init {
                    Some(ForInit::Local(d)) => v.extend(d.init.iter()),
                    Some(ForInit::Exprs(es)) => v.extend(es.iter()),
                    None => {}
                }
                v.extend(cond.iter());
                v.extend(update.iter());
                v
            }
            StmtKind::Return(e) => e.iter().collect(),
            StmtKind::Assert { cond, message } => {
                std::iter::once(cond).chain(message.iter()).collect()
            }
        }
    }

    /// Nested statements, in source order.
    pub fn children(&self) -> Vec<&Stmt> {
        match &self.kind {
            StmtKind::Block(b) => b.stmts.iter().collect(),
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => std::iter::once(&**then_branch)
                .chain(else_branch.iter().map(|s| &**s))
                .collect(),
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => vec![body],
            _ => vec![],
        }
    }

    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    pub fn walk_mut(&mut self, f: &mut dyn FnMut(&mut Stmt)) {
        f(self);
        match &mut self.kind {
            StmtKind::Block(b) => b.stmts.iter_mut().for_each(|s| s.walk_mut(f)),
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                then_branch.walk_mut(f);
                if let Some(e) = else_branch {
                    e.walk_mut(f);
                }
            }
            StmtKind::While { body, .. } | StmtKind::For { body, .. } => body.walk_mut(f),
            _ => {}
        }
    }

    /// All expressions in this statement's subtree, outermost first.
    pub fn walk_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        self.walk(&mut |s| {
            for e in s.own_exprs() {
                e.walk(f);
            }
        });
    }
}

impl Block {
    pub fn synthetic(stmts: Vec<Stmt>) -> Block {
        Block {
            stmts,
            span: Span::default(),
        }
    }
}

fn exprs_mut_of_stmt(stmt: &mut Stmt, f: &mut dyn FnMut(&mut Expr)) {
    match &mut stmt.kind {
        StmtKind::Block(b) => b.stmts.iter_mut().for_each(|s| exprs_mut_of_stmt(s, f)),
        StmtKind::Local(d) => {
            if let Some(e) = &mut d.init {
                e.walk_mut(f);
            }
        }
        StmtKind::Expr(e) | StmtKind::Throw(e) => e.walk_mut(f),
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            cond.walk_mut(f);
            exprs_mut_of_stmt(then_branch, f);
            if let Some(e) = else_branch {
                exprs_mut_of_stmt(e, f);
            }
        }
        StmtKind::While { cond, body } => {
            cond.walk_mut(f);
            exprs_mut_of_stmt(body, f);
        }
        StmtKind::For {
            init,
            cond,
            update,
            body,
        } => {
            match init {
                Some(ForInit::Local(d)) => {
                    if let Some(e) = &mut d.init {
                        e.walk_mut(f);
                    }
                }
                Some(ForInit::Exprs(es)) => es.iter_mut().for_each(|e| e.walk_mut(f)),
                None => {}
            }
            if let Some(c) = cond {
                c.walk_mut(f);
            }
            update.iter_mut().for_each(|e| e.walk_mut(f));
            exprs_mut_of_stmt(body, f);
        }
        StmtKind::Return(e) => {
            if let Some(e) = e {
                e.walk_mut(f);
            }
        }
        StmtKind::Assert { cond, message } => {
            cond.walk_mut(f);
            if let Some(m) = message {
                m.walk_mut(f);
            }
        }
    }
}

impl CompilationUnit {
    /// Every expression node in the unit, pre-order, fields first.
    pub fn walk_exprs<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        for field in &self.class.fields {
            if let Some(init) = &field.init {
                init.walk(f);
            }
        }
        for ctor in &self.class.constructors {
            for s in &ctor.body.stmts {
                s.walk_exprs(f);
            }
        }
        for m in &self.class.methods {
            for s in &m.body.stmts {
                s.walk_exprs(f);
            }
        }
    }

    pub fn walk_exprs_mut(&mut self, f: &mut dyn FnMut(&mut Expr)) {
        for field in &mut self.class.fields {
            if let Some(init) = &mut field.init {
                init.walk_mut(f);
            }
        }
        for ctor in &mut self.class.constructors {
            for s in &mut ctor.body.stmts {
                exprs_mut_of_stmt(s, f);
            }
        }
        for m in &mut self.class.methods {
            for s in &mut m.body.stmts {
                exprs_mut_of_stmt(s, f);
            }
        }
    }

    pub fn walk_stmts<'a>(&'a self, f: &mut dyn FnMut(&'a Stmt)) {
        for ctor in &self.class.constructors {
            ctor.body.stmts.iter().for_each(|s| s.walk(f));
        }
        for m in &self.class.methods {
            m.body.stmts.iter().for_each(|s| s.walk(f));
        }
    }

    pub fn walk_stmts_mut(&mut self, f: &mut dyn FnMut(&mut Stmt)) {
        for ctor in &mut self.class.constructors {
            ctor.body.stmts.iter_mut().for_each(|s| s.walk_mut(f));
        }
        for m in &mut self.class.methods {
            m.body.stmts.iter_mut().for_each(|s| s.walk_mut(f));
        }
    }

    /// Visits every written type reference (fields, signatures, locals,
    /// casts and array creations).
    pub fn walk_type_refs_mut(&mut self, f: &mut dyn FnMut(&mut TypeRef)) {
        for field in &mut self.class.fields {
            f(&mut field.ty);
        }
        for ctor in &mut self.class.constructors {
            ctor.params.iter_mut().for_each(|p| f(&mut p.ty));
        }
        for m in &mut self.class.methods {
            if let Some(rt) = &mut m.return_type {
                f(rt);
            }
            m.params.iter_mut().for_each(|p| f(&mut p.ty));
        }
        self.walk_stmts_mut(&mut |s| match &mut s.kind {
            StmtKind::Local(d) => f(&mut d.ty),
            StmtKind::For {
                init: Some(ForInit::Local(d)),
                ..
            } => f(&mut d.ty),
            _ => {}
        });
        self.walk_exprs_mut(&mut |e| match &mut e.kind {
            ExprKind::Cast { ty, .. } => f(ty),
            ExprKind::NewArray { elem, .. } => f(elem),
            _ => {}
        });
    }

    /// Assigns fresh, sequential ids to every expression node.
    pub fn renumber(&mut self) {
        let mut next = 0u32;
        self.walk_exprs_mut(&mut |e| {
            e.id = NodeId(next);
            next += 1;
        });
    }

    pub fn expr_count(&self) -> usize {
        let mut n = 0;
        self.walk_exprs(&mut |_| n += 1);
        n
    }

    /// Copy with every span and node id zeroed, for structural comparison.
    pub fn normalized(&self) -> CompilationUnit {
        let mut u = self.clone();
        u.span = Span::default();
        for i in &mut u.imports {
            i.span = Span::default();
        }
        u.class.span = Span::default();
        for f in &mut u.class.fields {
            f.span = Span::default();
        }
        for c in &mut u.class.constructors {
            c.span = Span::default();
            c.body.span = Span::default();
            c.params.iter_mut().for_each(|p| p.span = Span::default());
        }
        for m in &mut u.class.methods {
            m.span = Span::default();
            m.body.span = Span::default();
            m.params.iter_mut().for_each(|p| p.span = Span::default());
        }
        u.walk_stmts_mut(&mut |s| {
            s.span = Span::default();
            if let StmtKind::Block(b) = &mut s.kind {
                b.span = Span::default();
            }
        });
        u.walk_exprs_mut(&mut |e| {
            e.span = Span::default();
            e.id = NodeId::default();
        });
        u.walk_type_refs_mut(&mut |t| t.span = Span::default());
        u
    }
}

/// Structural normalization of a single statement (spans and ids zeroed).
pub fn normalize_stmt(stmt: &Stmt) -> Stmt {
    let mut s = stmt.clone();
    s.walk_mut(&mut |s| {
        s.span = Span::default();
        match &mut s.kind {
            StmtKind::Block(b) => b.span = Span::default(),
            StmtKind::Local(d)
            | StmtKind::For {
                init: Some(ForInit::Local(d)),
                ..
            } => d.ty.span = Span::default(),
            _ => {}
        }
    });
    exprs_mut_of_stmt(&mut s, &mut |e| {
        e.span = Span::default();
        e.id = NodeId::default();
        match &mut e.kind {
            ExprKind::Cast { ty, .. } | ExprKind::NewArray { elem: ty, .. } => {
                ty.span = Span::default()
            }
            _ => {}
        }
    });
    s
}
