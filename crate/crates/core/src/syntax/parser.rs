//! Recursive-descent parser for the source subset.
//!
//! Anything outside the subset (generics, lambdas, inner classes,
//! inheritance, annotations, `switch`, `try`, multi-dimensional arrays, ...)
//! fails the whole unit; no partial trees are produced.

use super::ast::*;
use super::lexer::{Keyword, Lexed, Punct, Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

type PResult<T> = Result<T, ParseError>;

/// Parses a token stream with no header comments.
pub fn parse(tokens: &[Token]) -> PResult<CompilationUnit> {
    Parser::new(tokens).unit(Vec::new())
}

pub fn parse_lexed(lexed: &Lexed) -> PResult<CompilationUnit> {
    Parser::new(&lexed.tokens).unit(lexed.header.clone())
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    last_span: Span,
    next_id: u32,
}

fn is_kw(tok: Option<&Token>, kw: Keyword) -> bool {
    matches!(tok, Some(Token { kind: TokenKind::Keyword(k), .. }) if *k == kw)
}

fn is_punct(tok: Option<&Token>, p: Punct) -> bool {
    matches!(tok, Some(Token { kind: TokenKind::Punct(q), .. }) if *q == p)
}

fn prim_of(kw: Keyword) -> Option<PrimType> {
    Some(match kw {
        Keyword::Boolean => PrimType::Boolean,
        Keyword::Byte => PrimType::Byte,
        Keyword::Char => PrimType::Char,
        Keyword::Short => PrimType::Short,
        Keyword::Int => PrimType::Int,
        Keyword::Long => PrimType::Long,
        Keyword::Float => PrimType::Float,
        Keyword::Double => PrimType::Double,
        _ => return None,
    })
}

fn binary_op(p: Punct) -> Option<BinaryOp> {
    Some(match p {
        Punct::Star => BinaryOp::Mul,
        Punct::Slash => BinaryOp::Div,
        Punct::Percent => BinaryOp::Rem,
        Punct::Plus => BinaryOp::Add,
        Punct::Minus => BinaryOp::Sub,
        Punct::Shl => BinaryOp::Shl,
        Punct::Shr => BinaryOp::Shr,
        Punct::UShr => BinaryOp::UShr,
        Punct::Lt => BinaryOp::Lt,
        Punct::Gt => BinaryOp::Gt,
        Punct::LtEq => BinaryOp::Le,
        Punct::GtEq => BinaryOp::Ge,
        Punct::EqEq => BinaryOp::Eq,
        Punct::NotEq => BinaryOp::Ne,
        Punct::Amp => BinaryOp::BitAnd,
        Punct::Caret => BinaryOp::BitXor,
        Punct::Pipe => BinaryOp::BitOr,
        Punct::AndAnd => BinaryOp::And,
        Punct::OrOr => BinaryOp::Or,
        _ => return None,
    })
}

fn assign_op(p: Punct) -> Option<AssignOp> {
    Some(match p {
        Punct::Assign => AssignOp::Assign,
        Punct::PlusAssign => AssignOp::Compound(BinaryOp::Add),
        Punct::MinusAssign => AssignOp::Compound(BinaryOp::Sub),
        Punct::StarAssign => AssignOp::Compound(BinaryOp::Mul),
        Punct::SlashAssign => AssignOp::Compound(BinaryOp::Div),
        Punct::PercentAssign => AssignOp::Compound(BinaryOp::Rem),
        Punct::AndAssign => AssignOp::Compound(BinaryOp::BitAnd),
        Punct::OrAssign => AssignOp::Compound(BinaryOp::BitOr),
        Punct::XorAssign => AssignOp::Compound(BinaryOp::BitXor),
        Punct::ShlAssign => AssignOp::Compound(BinaryOp::Shl),
        Punct::ShrAssign => AssignOp::Compound(BinaryOp::Shr),
        Punct::UShrAssign => AssignOp::Compound(BinaryOp::UShr),
        _ => return None,
    })
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        Parser {
            tokens,
            pos: 0,
            last_span: Span::new(1, 1, 1, 1),
            next_id: 0,
        }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_n(&self, n: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + n)
    }

    fn here(&self) -> Span {
        self.peek().map(|t| t.span).unwrap_or(self.last_span)
    }

    fn bump(&mut self) -> &'t Token {
        let t = &self.tokens[self.pos];
        self.pos += 1;
        self.last_span = t.span;
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(ParseError {
            span: self.here(),
            message: message.into(),
        })
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        match self.peek() {
            Some(t) => self.fail(format!("expected {wanted}, found {}", t.kind)),
            None => self.fail(format!("expected {wanted}, found end of input")),
        }
    }

    fn at_punct(&self, p: Punct) -> bool {
        is_punct(self.peek(), p)
    }

    fn at_kw(&self, k: Keyword) -> bool {
        is_kw(self.peek(), k)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        if self.at_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<Span> {
        if self.at_punct(p) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&format!("`{}`", p.as_str()))
        }
    }

    fn expect_kw(&mut self, k: Keyword) -> PResult<Span> {
        if self.at_kw(k) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&format!("`{}`", k.as_str()))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                span,
            }) => {
                self.bump();
                Ok((name.clone(), *span))
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn mk(&mut self, kind: ExprKind, span: Span) -> Expr {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        Expr { id, kind, span }
    }

    fn qualified_name(&mut self) -> PResult<(String, Span)> {
        let (mut name, start) = self.ident()?;
        let mut end = start;
        while self.at_punct(Punct::Dot) && matches!(self.peek_n(1), Some(Token { kind: TokenKind::Ident(_), .. })) {
            self.bump();
            let (part, sp) = self.ident()?;
            name.push('.');
            name.push_str(&part);
            end = sp;
        }
        Ok((name, start.to(end)))
    }

    // ---- compilation unit ----

    fn unit(mut self, header: Vec<String>) -> PResult<CompilationUnit> {
        let start = self.here();
        let mut package = None;
        if self.eat_kw(Keyword::Package) {
            let (name, _) = self.qualified_name()?;
            self.expect_punct(Punct::Semi)?;
            package = Some(name);
        }
        let mut imports = Vec::new();
        while self.at_kw(Keyword::Import) {
            let kw = self.bump().span;
            if self.at_kw(Keyword::Static) {
                return self.fail("static imports are outside the supported subset");
            }
            let (path, _) = self.qualified_name()?;
            let mut wildcard = false;
            if self.eat_punct(Punct::Dot) {
                self.expect_punct(Punct::Star)?;
                wildcard = true;
            }
            let end = self.expect_punct(Punct::Semi)?;
            imports.push(Import {
                path,
                wildcard,
                span: kw.to(end),
            });
        }
        if self.peek().is_none() {
            return self.fail("expected a class declaration");
        }
        let class = self.class_decl()?;
        if self.peek().is_some() {
            return self.fail("exactly one top-level class is supported per unit");
        }
        let span = if package.is_some() || !imports.is_empty() {
            start.to(class.span)
        } else {
            class.span
        };
        Ok(CompilationUnit {
            header,
            package,
            imports,
            class,
            span,
        })
    }

    fn modifiers(&mut self) -> PResult<(Modifiers, Option<Span>)> {
        let mut m = Modifiers::default();
        let mut first = None;
        while let Some(tok) = self.peek() {
            let vis = match &tok.kind {
                TokenKind::Keyword(Keyword::Public) => Some(Visibility::Public),
                TokenKind::Keyword(Keyword::Protected) => Some(Visibility::Protected),
                TokenKind::Keyword(Keyword::Private) => Some(Visibility::Private),
                TokenKind::Keyword(Keyword::Static) => {
                    if m.is_static {
                        return self.fail("repeated `static`");
                    }
                    m.is_static = true;
                    None
                }
                TokenKind::Keyword(Keyword::Final) => {
                    if m.is_final {
                        return self.fail("repeated `final`");
                    }
                    m.is_final = true;
                    None
                }
                TokenKind::Keyword(
                    k @ (Keyword::Abstract
                    | Keyword::Synchronized
                    | Keyword::Native
                    | Keyword::Transient
                    | Keyword::Volatile
                    | Keyword::Strictfp
                    | Keyword::Default),
                ) => {
                    return self.fail(format!("modifier `{}` is outside the supported subset", k.as_str()));
                }
                TokenKind::Punct(Punct::At) => {
                    return self.fail("annotations are outside the supported subset");
                }
                _ => break,
            };
            if let Some(v) = vis {
                if m.visibility.is_some() {
                    return self.fail("conflicting visibility modifiers");
                }
                m.visibility = Some(v);
            }
            let sp = self.bump().span;
            first.get_or_insert(sp);
        }
        Ok((m, first))
    }

    fn class_decl(&mut self) -> PResult<ClassDecl> {
        let (modifiers, mod_span) = self.modifiers()?;
        if modifiers.is_static {
            return self.fail("top-level classes cannot be static");
        }
        if self.at_kw(Keyword::Interface) || self.at_kw(Keyword::Enum) {
            return self.fail("only class declarations are supported");
        }
        let kw = self.expect_kw(Keyword::Class)?;
        let (name, _) = self.ident()?;
        if self.at_kw(Keyword::Extends) || self.at_kw(Keyword::Implements) {
            return self.fail("inheritance is outside the supported subset");
        }
        if self.at_punct(Punct::Lt) {
            return self.fail("generic type parameters are outside the supported subset");
        }
        self.expect_punct(Punct::LBrace)?;
        let mut class = ClassDecl {
            modifiers,
            name,
            fields: Vec::new(),
            constructors: Vec::new(),
            methods: Vec::new(),
            span: Span::default(),
        };
        while !self.at_punct(Punct::RBrace) {
            if self.peek().is_none() {
                return self.unexpected("`}`");
            }
            self.member(&mut class)?;
        }
        let end = self.expect_punct(Punct::RBrace)?;
        class.span = mod_span.unwrap_or(kw).to(end);
        Ok(class)
    }

    fn member(&mut self, class: &mut ClassDecl) -> PResult<()> {
        let start = self.here();
        let (modifiers, _) = self.modifiers()?;
        if self.at_kw(Keyword::Class) || self.at_kw(Keyword::Interface) || self.at_kw(Keyword::Enum) {
            return self.fail("nested types are outside the supported subset");
        }
        if self.at_punct(Punct::LBrace) {
            return self.fail("initializer blocks are outside the supported subset");
        }
        if self.at_punct(Punct::Lt) {
            return self.fail("generic methods are outside the supported subset");
        }
        // constructor: ClassName '('
        if let (Some(Token { kind: TokenKind::Ident(n), .. }), true) =
            (self.peek(), is_punct(self.peek_n(1), Punct::LParen))
        {
            if *n != class.name {
                return self.fail(format!("method `{n}` is missing a return type"));
            }
            if modifiers.is_static || modifiers.is_final {
                return self.fail("constructors cannot be static or final");
            }
            let (name, _) = self.ident()?;
            let params = self.params()?;
            let body = self.block()?;
            class.constructors.push(ConstructorDecl {
                modifiers,
                name,
                params,
                span: start.to(body.span),
                body,
            });
            return Ok(());
        }
        let return_type = if self.eat_kw(Keyword::Void) {
            None
        } else {
            Some(self.type_ref()?)
        };
        let (name, _) = self.ident()?;
        if self.at_punct(Punct::LParen) {
            let params = self.params()?;
            if self.at_kw(Keyword::Throws) {
                return self.fail("`throws` clauses are outside the supported subset");
            }
            if self.at_punct(Punct::LBracket) {
                return self.fail("C-style array return types are not supported");
            }
            let body = self.block()?;
            class.methods.push(MethodDecl {
                modifiers,
                return_type,
                name,
                params,
                span: start.to(body.span),
                body,
            });
            return Ok(());
        }
        let Some(ty) = return_type else {
            return self.fail("fields cannot have type `void`");
        };
        let init = if self.eat_punct(Punct::Assign) {
            Some(self.expr()?)
        } else {
            None
        };
        if self.at_punct(Punct::Comma) {
            return self.fail("one declarator per field declaration is supported");
        }
        let end = self.expect_punct(Punct::Semi)?;
        class.fields.push(FieldDecl {
            modifiers,
            ty,
            name,
            init,
            span: start.to(end),
        });
        Ok(())
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct(Punct::LParen)?;
        let mut params = Vec::new();
        if !self.at_punct(Punct::RParen) {
            loop {
                let start = self.here();
                let is_final = self.eat_kw(Keyword::Final);
                if self.at_punct(Punct::At) {
                    return self.fail("annotations are outside the supported subset");
                }
                let ty = self.type_ref()?;
                if self.at_punct(Punct::Ellipsis) {
                    return self.fail("varargs are outside the supported subset");
                }
                let (name, end) = self.ident()?;
                if self.at_punct(Punct::LBracket) {
                    return self.fail("C-style array declarators are not supported");
                }
                params.push(Param {
                    is_final,
                    ty,
                    name,
                    span: start.to(end),
                });
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(params)
    }

    fn type_ref(&mut self) -> PResult<TypeRef> {
        let (base, mut span) = match self.peek() {
            Some(Token {
                kind: TokenKind::Keyword(k),
                span,
            }) if prim_of(*k).is_some() => {
                self.bump();
                (BaseType::Prim(prim_of(*k).unwrap()), *span)
            }
            Some(Token {
                kind: TokenKind::Ident(_),
                ..
            }) => {
                let (name, sp) = self.qualified_name()?;
                (BaseType::Named(name), sp)
            }
            _ => return self.unexpected("a type"),
        };
        if self.at_punct(Punct::Lt) {
            return self.fail("generic types are outside the supported subset");
        }
        let mut array = false;
        if self.at_punct(Punct::LBracket) && is_punct(self.peek_n(1), Punct::RBracket) {
            self.bump();
            span = span.to(self.bump().span);
            array = true;
            if self.at_punct(Punct::LBracket) {
                return self.fail("multi-dimensional arrays are outside the supported subset");
            }
        }
        Ok(TypeRef { base, array, span })
    }

    // ---- statements ----

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect_punct(Punct::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at_punct(Punct::RBrace) {
            if self.peek().is_none() {
                return self.unexpected("`}`");
            }
            stmts.push(self.stmt()?);
        }
        let end = self.expect_punct(Punct::RBrace)?;
        Ok(Block {
            stmts,
            span: start.to(end),
        })
    }

    /// `Type ident` lookahead for local declarations.
    fn looks_like_local_decl(&self) -> bool {
        let mut i = 0;
        match self.peek_n(0) {
            Some(Token { kind: TokenKind::Keyword(Keyword::Final), .. }) => return true,
            Some(Token { kind: TokenKind::Keyword(k), .. }) if prim_of(*k).is_some() => return true,
            Some(Token { kind: TokenKind::Ident(_), .. }) => i += 1,
            _ => return false,
        }
        while is_punct(self.peek_n(i), Punct::Dot)
            && matches!(self.peek_n(i + 1), Some(Token { kind: TokenKind::Ident(_), .. }))
        {
            i += 2;
        }
        if is_punct(self.peek_n(i), Punct::LBracket) && is_punct(self.peek_n(i + 1), Punct::RBracket) {
            i += 2;
        }
        matches!(self.peek_n(i), Some(Token { kind: TokenKind::Ident(_), .. }))
    }

    fn local_decl(&mut self) -> PResult<LocalDecl> {
        let is_final = self.eat_kw(Keyword::Final);
        let ty = self.type_ref()?;
        let (name, _) = self.ident()?;
        if self.at_punct(Punct::LBracket) {
            return self.fail("C-style array declarators are not supported");
        }
        let init = if self.eat_punct(Punct::Assign) {
            if self.at_punct(Punct::LBrace) {
                return self.fail("array initializers need an explicit `new T[]`");
            }
            Some(self.expr()?)
        } else {
            None
        };
        if self.at_punct(Punct::Comma) {
            return self.fail("one declarator per local declaration is supported");
        }
        Ok(LocalDecl {
            is_final,
            ty,
            name,
            init,
        })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.here();
        let Some(tok) = self.peek() else {
            return self.unexpected("a statement");
        };
        let kind = match &tok.kind {
            TokenKind::Punct(Punct::LBrace) => StmtKind::Block(self.block()?),
            TokenKind::Keyword(Keyword::If) => {
                self.bump();
                self.expect_punct(Punct::LParen)?;
                let cond = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                let then_branch = Box::new(self.stmt()?);
                let else_branch = if self.eat_kw(Keyword::Else) {
                    Some(Box::new(self.stmt()?))
                } else {
                    None
                };
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                }
            }
            TokenKind::Keyword(Keyword::While) => {
                self.bump();
                self.expect_punct(Punct::LParen)?;
                let cond = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                StmtKind::While {
                    cond,
                    body: Box::new(self.stmt()?),
                }
            }
            TokenKind::Keyword(Keyword::For) => {
                self.bump();
                self.expect_punct(Punct::LParen)?;
                let init = if self.at_punct(Punct::Semi) {
                    None
                } else if self.looks_like_local_decl() {
                    let decl = self.local_decl()?;
                    if self.at_punct(Punct::Colon) {
                        return self.fail("enhanced for loops are outside the supported subset");
                    }
                    Some(ForInit::Local(decl))
                } else {
                    Some(ForInit::Exprs(self.stmt_expr_list()?))
                };
                self.expect_punct(Punct::Semi)?;
                let cond = if self.at_punct(Punct::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect_punct(Punct::Semi)?;
                let update = if self.at_punct(Punct::RParen) {
                    Vec::new()
                } else {
                    self.stmt_expr_list()?
                };
                self.expect_punct(Punct::RParen)?;
                StmtKind::For {
                    init,
                    cond,
                    update,
                    body: Box::new(self.stmt()?),
                }
            }
            TokenKind::Keyword(Keyword::Return) => {
                self.bump();
                let value = if self.at_punct(Punct::Semi) {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.expect_punct(Punct::Semi)?;
                StmtKind::Return(value)
            }
            TokenKind::Keyword(Keyword::Assert) => {
                self.bump();
                let cond = self.expr()?;
                let message = if self.eat_punct(Punct::Colon) {
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect_punct(Punct::Semi)?;
                StmtKind::Assert { cond, message }
            }
            TokenKind::Keyword(Keyword::Throw) => {
                self.bump();
                let e = self.expr()?;
                self.expect_punct(Punct::Semi)?;
                StmtKind::Throw(e)
            }
            TokenKind::Keyword(
                k @ (Keyword::Do
                | Keyword::Switch
                | Keyword::Try
                | Keyword::Break
                | Keyword::Continue
                | Keyword::Synchronized
                | Keyword::Class
                | Keyword::Case
                | Keyword::Default),
            ) => {
                return self.fail(format!("`{}` is outside the supported subset", k.as_str()));
            }
            TokenKind::Punct(Punct::Semi) => {
                return self.fail("empty statements are outside the supported subset");
            }
            _ if self.looks_like_local_decl() => {
                let d = self.local_decl()?;
                self.expect_punct(Punct::Semi)?;
                StmtKind::Local(d)
            }
            _ => {
                let e = self.stmt_expr()?;
                self.expect_punct(Punct::Semi)?;
                StmtKind::Expr(e)
            }
        };
        Ok(Stmt {
            kind,
            span: start.to(self.last_span),
        })
    }

    /// Expression usable as a statement: assignment, increment/decrement,
    /// call, or instance creation.
    fn stmt_expr(&mut self) -> PResult<Expr> {
        let start = self.here();
        let e = self.expr()?;
        match &e.kind {
            ExprKind::Assign { .. }
            | ExprKind::Call { .. }
            | ExprKind::New { .. }
            | ExprKind::Unary {
                op: UnaryOp::PreInc | UnaryOp::PreDec | UnaryOp::PostInc | UnaryOp::PostDec,
                ..
            } => Ok(e),
            _ => Err(ParseError {
                span: start.to(self.last_span),
                message: "not a statement".into(),
            }),
        }
    }

    fn stmt_expr_list(&mut self) -> PResult<Vec<Expr>> {
        let mut v = vec![self.stmt_expr()?];
        while self.eat_punct(Punct::Comma) {
            v.push(self.stmt_expr()?);
        }
        Ok(v)
    }

    // ---- expressions ----

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        let lhs = self.conditional()?;
        if let Some(Token {
            kind: TokenKind::Punct(p),
            ..
        }) = self.peek()
        {
            if let Some(op) = assign_op(*p) {
                if !matches!(
                    lhs.kind,
                    ExprKind::Name(_) | ExprKind::FieldAccess { .. } | ExprKind::ArrayAccess { .. }
                ) {
                    return self.fail("invalid assignment target");
                }
                self.bump();
                let value = self.expr()?;
                let span = lhs.span.to(value.span);
                return Ok(self.mk(
                    ExprKind::Assign {
                        op,
                        target: Box::new(lhs),
                        value: Box::new(value),
                    },
                    span,
                ));
            }
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(1)?;
        if !self.eat_punct(Punct::Question) {
            return Ok(cond);
        }
        let then_expr = self.expr()?;
        self.expect_punct(Punct::Colon)?;
        let else_expr = self.conditional()?;
        let span = cond.span.to(else_expr.span);
        Ok(self.mk(
            ExprKind::Conditional {
                cond: Box::new(cond),
                then_expr: Box::new(then_expr),
                else_expr: Box::new(else_expr),
            },
            span,
        ))
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.at_kw(Keyword::Instanceof) {
                return self.fail("`instanceof` is outside the supported subset");
            }
            let op = match self.peek() {
                Some(Token {
                    kind: TokenKind::Punct(p),
                    ..
                }) => match binary_op(*p) {
                    Some(op) if op.precedence() >= min_prec => op,
                    _ => break,
                },
                _ => break,
            };
            self.bump();
            let rhs = self.binary(op.precedence() + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = self.mk(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                span,
            );
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.here();
        let op = match self.peek() {
            Some(Token {
                kind: TokenKind::Punct(p),
                ..
            }) => match p {
                Punct::Minus => Some(UnaryOp::Neg),
                Punct::Plus => Some(UnaryOp::Plus),
                Punct::Bang => Some(UnaryOp::Not),
                Punct::Tilde => Some(UnaryOp::BitNot),
                Punct::PlusPlus => Some(UnaryOp::PreInc),
                Punct::MinusMinus => Some(UnaryOp::PreDec),
                _ => None,
            },
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(self.mk(
                ExprKind::Unary {
                    op,
                    operand: Box::new(operand),
                },
                span,
            ));
        }
        if self.at_punct(Punct::LParen) {
            if let Some(ty) = self.try_cast_type()? {
                let operand = self.unary()?;
                let span = start.to(operand.span);
                return Ok(self.mk(
                    ExprKind::Cast {
                        ty,
                        operand: Box::new(operand),
                    },
                    span,
                ));
            }
        }
        self.postfix()
    }

    /// Recognizes `(prim)` / `(prim[])` and `(Name)` followed by a token
    /// that can only begin an operand. Consumes the parenthesized type on
    /// success.
    fn try_cast_type(&mut self) -> PResult<Option<TypeRef>> {
        let save = self.pos;
        let save_span = self.last_span;
        self.bump(); // (
        let prim = matches!(self.peek(), Some(Token { kind: TokenKind::Keyword(k), .. }) if prim_of(*k).is_some());
        let named = matches!(self.peek(), Some(Token { kind: TokenKind::Ident(_), .. }));
        if !prim && !named {
            self.pos = save;
            self.last_span = save_span;
            return Ok(None);
        }
        let ty = match self.type_ref() {
            Ok(ty) => ty,
            Err(e) if prim => return Err(e),
            Err(_) => {
                self.pos = save;
                self.last_span = save_span;
                return Ok(None);
            }
        };
        if !self.at_punct(Punct::RParen) {
            if prim {
                return self.unexpected("`)`");
            }
            self.pos = save;
            self.last_span = save_span;
            return Ok(None);
        }
        let follows_operand = match self.peek_n(1) {
            Some(Token { kind, .. }) => match kind {
                TokenKind::Ident(_)
                | TokenKind::Int(_)
                | TokenKind::Long(_)
                | TokenKind::Float(_)
                | TokenKind::Double(_)
                | TokenKind::Char(_)
                | TokenKind::Str(_) => true,
                TokenKind::Keyword(k) => matches!(
                    k,
                    Keyword::This | Keyword::New | Keyword::True | Keyword::False | Keyword::Null
                ),
                TokenKind::Punct(p) => matches!(p, Punct::LParen | Punct::Bang | Punct::Tilde),
            },
            None => false,
        };
        if prim || follows_operand {
            self.bump(); // )
            Ok(Some(ty))
        } else {
            self.pos = save;
            self.last_span = save_span;
            Ok(None)
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.expect_punct(Punct::LParen)?;
        let mut args = Vec::new();
        if !self.at_punct(Punct::RParen) {
            loop {
                args.push(self.expr()?);
                if !self.eat_punct(Punct::Comma) {
                    break;
                }
            }
        }
        self.expect_punct(Punct::RParen)?;
        Ok(args)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        let is_array_creation = matches!(e.kind, ExprKind::NewArray { .. });
        loop {
            if self.at_punct(Punct::Dot) {
                self.bump();
                if self.at_punct(Punct::Lt) {
                    return self.fail("explicit type arguments are outside the supported subset");
                }
                let (name, name_span) = self.ident()?;
                if self.at_punct(Punct::LParen) {
                    let args = self.args()?;
                    let span = e.span.to(self.last_span);
                    e = self.mk(
                        ExprKind::Call {
                            target: Some(Box::new(e)),
                            name,
                            args,
                        },
                        span,
                    );
                } else {
                    let span = e.span.to(name_span);
                    e = self.mk(
                        ExprKind::FieldAccess {
                            target: Box::new(e),
                            name,
                        },
                        span,
                    );
                }
            } else if self.at_punct(Punct::LBracket) {
                if is_array_creation {
                    return self.fail("multi-dimensional arrays are outside the supported subset");
                }
                self.bump();
                let index = self.expr()?;
                let end = self.expect_punct(Punct::RBracket)?;
                let span = e.span.to(end);
                e = self.mk(
                    ExprKind::ArrayAccess {
                        array: Box::new(e),
                        index: Box::new(index),
                    },
                    span,
                );
            } else if self.at_punct(Punct::ColonColon) {
                return self.fail("method references are outside the supported subset");
            } else {
                break;
            }
        }
        loop {
            let op = if self.at_punct(Punct::PlusPlus) {
                UnaryOp::PostInc
            } else if self.at_punct(Punct::MinusMinus) {
                UnaryOp::PostDec
            } else {
                break;
            };
            let end = self.bump().span;
            let span = e.span.to(end);
            e = self.mk(
                ExprKind::Unary {
                    op,
                    operand: Box::new(e),
                },
                span,
            );
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek() else {
            return self.unexpected("an expression");
        };
        let span = tok.span;
        let lit = |l: Literal| ExprKind::Literal(l);
        let kind = match &tok.kind {
            TokenKind::Int(v) => lit(Literal::Int(*v)),
            TokenKind::Long(v) => lit(Literal::Long(*v)),
            TokenKind::Float(v) => lit(Literal::Float(*v)),
            TokenKind::Double(v) => lit(Literal::Double(*v)),
            TokenKind::Char(c) => lit(Literal::Char(*c)),
            TokenKind::Str(s) => lit(Literal::Str(s.clone())),
            TokenKind::Keyword(Keyword::True) => lit(Literal::Bool(true)),
            TokenKind::Keyword(Keyword::False) => lit(Literal::Bool(false)),
            TokenKind::Keyword(Keyword::Null) => lit(Literal::Null),
            TokenKind::Keyword(Keyword::This) => {
                if is_punct(self.peek_n(1), Punct::LParen) {
                    return self.fail("explicit constructor calls are outside the supported subset");
                }
                ExprKind::This
            }
            TokenKind::Keyword(Keyword::Super) => {
                return self.fail("`super` is outside the supported subset");
            }
            TokenKind::Keyword(Keyword::New) => return self.creation(),
            TokenKind::Punct(Punct::LParen) => {
                self.bump();
                let inner = self.expr()?;
                let end = self.expect_punct(Punct::RParen)?;
                if self.at_punct(Punct::Arrow) {
                    return self.fail("lambdas are outside the supported subset");
                }
                return Ok(self.mk(ExprKind::Paren(Box::new(inner)), span.to(end)));
            }
            TokenKind::Ident(name) => {
                let name = name.clone();
                self.bump();
                if self.at_punct(Punct::Arrow) {
                    return self.fail("lambdas are outside the supported subset");
                }
                if self.at_punct(Punct::LParen) {
                    let args = self.args()?;
                    return Ok(self.mk(
                        ExprKind::Call {
                            target: None,
                            name,
                            args,
                        },
                        span.to(self.last_span),
                    ));
                }
                return Ok(self.mk(ExprKind::Name(name), span));
            }
            _ => return self.unexpected("an expression"),
        };
        self.bump();
        Ok(self.mk(kind, span))
    }

    fn creation(&mut self) -> PResult<Expr> {
        let start = self.bump().span; // new
        let (base, base_span) = match self.peek() {
            Some(Token {
                kind: TokenKind::Keyword(k),
                span,
            }) if prim_of(*k).is_some() => {
                self.bump();
                (BaseType::Prim(prim_of(*k).unwrap()), *span)
            }
            Some(Token {
                kind: TokenKind::Ident(_),
                ..
            }) => {
                let (name, sp) = self.qualified_name()?;
                (BaseType::Named(name), sp)
            }
            _ => return self.unexpected("a type after `new`"),
        };
        if self.at_punct(Punct::Lt) {
            return self.fail("generic types are outside the supported subset");
        }
        if self.at_punct(Punct::LParen) {
            let BaseType::Named(class) = base else {
                return self.fail("cannot instantiate a primitive type");
            };
            let args = self.args()?;
            if self.at_punct(Punct::LBrace) {
                return self.fail("anonymous classes are outside the supported subset");
            }
            return Ok(self.mk(ExprKind::New { class, args }, start.to(self.last_span)));
        }
        self.expect_punct(Punct::LBracket)?;
        let creation = if self.eat_punct(Punct::RBracket) {
            if self.at_punct(Punct::LBracket) {
                return self.fail("multi-dimensional arrays are outside the supported subset");
            }
            self.expect_punct(Punct::LBrace)?;
            let mut elems = Vec::new();
            if !self.at_punct(Punct::RBrace) {
                loop {
                    if self.at_punct(Punct::LBrace) {
                        return self.fail("nested array initializers are outside the supported subset");
                    }
                    elems.push(self.expr()?);
                    if !self.eat_punct(Punct::Comma) || self.at_punct(Punct::RBrace) {
                        break;
                    }
                }
            }
            self.expect_punct(Punct::RBrace)?;
            ArrayCreation::Init(elems)
        } else {
            let len = self.expr()?;
            self.expect_punct(Punct::RBracket)?;
            if self.at_punct(Punct::LBracket) {
                return self.fail("multi-dimensional arrays are outside the supported subset");
            }
            ArrayCreation::Sized(Box::new(len))
        };
        let elem = TypeRef {
            base,
            array: false,
            span: base_span,
        };
        Ok(self.mk(ExprKind::NewArray { elem, creation }, start.to(self.last_span)))
    }
}

#[cfg(test)]
mod tests {
    use super::super::lexer::tokenize;
    use super::*;

    fn parse_src(src: &str) -> PResult<CompilationUnit> {
        parse(&tokenize(src).expect("lexes"))
    }

    fn body_of(src: &str) -> Vec<Stmt> {
        let unit = parse_src(&format!("class T {{ void m() {{ {src} }} }}")).unwrap();
        unit.class.methods[0].body.stmts.clone()
    }

    #[test]
    fn empty_class() {
        let unit = parse_src("class A {}").unwrap();
        assert_eq!(unit.class.name, "A");
        assert!(unit.class.fields.is_empty() && unit.class.methods.is_empty());
        assert_eq!(unit.package, None);
    }

    #[test]
    fn members_are_split_by_kind() {
        let unit = parse_src(
            "package a.b; import java.util.Random; import java.util.*;
             public class W { static int x = 1; private double[] d; W(int a) { x = a; }
             public static int f(int a) { return a; } void g() {} }",
        )
        .unwrap();
        assert_eq!(unit.package.as_deref(), Some("a.b"));
        assert_eq!(unit.imports.len(), 2);
        assert!(unit.imports[1].wildcard);
        assert_eq!(unit.class.fields.len(), 2);
        assert!(unit.class.fields[0].modifiers.is_static);
        assert!(unit.class.fields[1].ty.array);
        assert_eq!(unit.class.constructors.len(), 1);
        assert_eq!(unit.class.methods.len(), 2);
        assert!(unit.class.methods[1].return_type.is_none());
    }

    #[test]
    fn precedence_and_associativity() {
        let stmts = body_of("x = a + b * c - d;");
        let StmtKind::Expr(Expr { kind: ExprKind::Assign { value, .. }, .. }) = &stmts[0].kind else {
            panic!()
        };
        // (a + (b * c)) - d
        let ExprKind::Binary { op: BinaryOp::Sub, lhs, .. } = &value.kind else { panic!() };
        let ExprKind::Binary { op: BinaryOp::Add, rhs, .. } = &lhs.kind else { panic!() };
        assert!(matches!(rhs.kind, ExprKind::Binary { op: BinaryOp::Mul, .. }));
    }

    #[test]
    fn casts_versus_parenthesized_names() {
        let stmts = body_of("y = (int) d; z = (a) - b; w = (Foo) o;");
        let value = |i: usize| match &stmts[i].kind {
            StmtKind::Expr(Expr { kind: ExprKind::Assign { value, .. }, .. }) => value.kind.clone(),
            _ => panic!(),
        };
        assert!(matches!(value(0), ExprKind::Cast { .. }));
        assert!(matches!(value(1), ExprKind::Binary { op: BinaryOp::Sub, .. }));
        assert!(matches!(value(2), ExprKind::Cast { .. }));
    }

    #[test]
    fn local_declarations_and_loops() {
        let stmts = body_of(
            "int[] a = new int[4]; for (int i = 0; i < a.length; i++) { a[i] = i; } \
             double[] d = new double[] {1.0, 2.0}; while (x > 0) x--; Foo f = null;",
        );
        assert!(matches!(stmts[0].kind, StmtKind::Local(_)));
        assert!(matches!(stmts[1].kind, StmtKind::For { .. }));
        assert!(matches!(stmts[2].kind, StmtKind::Local(_)));
        assert!(matches!(stmts[3].kind, StmtKind::While { .. }));
        assert!(matches!(stmts[4].kind, StmtKind::Local(_)));
    }

    #[test]
    fn out_of_subset_constructs_fail() {
        let cases = [
            "import java.util.List; class A { List<String> xs; }",
            "class A<T> {}",
            "class A extends B {}",
            "interface A {}",
            "class A { class B {} }",
            "class A { void m() { switch (x) {} } }",
            "class A { void m() { try { } finally { } } }",
            "class A { void m() { Runnable r = () -> {}; } }",
            "class A { int[][] grid; }",
            "class A { void m() { x = new int[2][3]; } }",
            "class A { @Override public String toString() { return \"\"; } }",
            "class A { void m() { break; } }",
            "class A { void m() { a + b; } }",
            "class A { int a, b; }",
            "class A { void m() { if (o instanceof String) {} } }",
            "class A {} class B {}",
            "class A { abstract void m(); }",
            "class A { void m() throws Exception {} }",
            "class A { void m() { for (int x : xs) {} } }",
        ];
        for src in cases {
            assert!(parse_src(src).is_err(), "should reject: {src}");
        }
    }

    #[test]
    fn error_points_at_first_offending_token() {
        let err = parse_src("class A {\n  List<String> xs;\n}").unwrap_err();
        assert_eq!(err.span.start_line, 2);
    }

    #[test]
    fn expression_ids_are_unique() {
        let unit = parse_src("class A { int f(int a) { return a * 2 + g(a, 1); } int g(int x, int y) { return x; } }").unwrap();
        let mut ids = Vec::new();
        unit.walk_exprs(&mut |e| ids.push(e.id));
        let n = ids.len();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn child_spans_nest_inside_parents() {
        let unit = parse_src("class A { int f(int a) { if (a > 0) { return -a * (a + 1); } return a; } }").unwrap();
        unit.walk_exprs(&mut |e| {
            for c in e.children() {
                assert!(e.span.contains(c.span), "{:?} not in {:?}", c.span, e.span);
            }
        });
    }
}
