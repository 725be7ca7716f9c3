//! Canonical pretty-printer.
//!
//! Layout: 4-space indentation per nesting level, one statement per line,
//! fields before constructors before methods, a blank line between members
//! of different kinds and between bodies. Parenthesization is taken from the
//! tree (`Paren` nodes), so printing never changes structure.

use super::ast::*;

const INDENT: &str = "    ";

pub fn pretty_print(unit: &CompilationUnit) -> String {
    let mut p = Printer { lines: Vec::new() };
    p.unit(unit);
    let mut out = p.lines.join("\n");
    out.push('\n');
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

pub fn print_type(t: &TypeRef) -> String {
    let mut s = match &t.base {
        BaseType::Prim(p) => p.keyword().to_string(),
        BaseType::Named(n) => n.clone(),
    };
    if t.array {
        s.push_str("[]");
    }
    s
}

/// Prints one statement at indentation level `depth`.
pub fn print_stmt(stmt: &Stmt, depth: usize) -> String {
    let mut p = Printer { lines: Vec::new() };
    p.stmt(stmt, depth);
    p.lines.join("\n")
}

struct Printer {
    lines: Vec<String>,
}

fn modifiers(m: &Modifiers) -> String {
    let mut s = String::new();
    if let Some(v) = m.visibility {
        s.push_str(v.keyword());
        s.push(' ');
    }
    if m.is_static {
        s.push_str("static ");
    }
    if m.is_final {
        s.push_str("final ");
    }
    s
}

fn params(ps: &[Param]) -> String {
    ps.iter()
        .map(|p| {
            format!(
                "{}{} {}",
                if p.is_final { "final " } else { "" },
                print_type(&p.ty),
                p.name
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

fn local(d: &LocalDecl) -> String {
    let mut s = format!(
        "{}{} {}",
        if d.is_final { "final " } else { "" },
        print_type(&d.ty),
        d.name
    );
    if let Some(init) = &d.init {
        s.push_str(" = ");
        write_expr(&mut s, init);
    }
    s
}

fn expr_list(es: &[Expr]) -> String {
    es.iter().map(print_expr).collect::<Vec<_>>().join(", ")
}

impl Printer {
    fn line(&mut self, depth: usize, text: impl AsRef<str>) {
        self.lines.push(format!("{}{}", INDENT.repeat(depth), text.as_ref()));
    }

    fn blank(&mut self) {
        self.lines.push(String::new());
    }

    fn unit(&mut self, u: &CompilationUnit) {
        for h in &u.header {
            if h.is_empty() {
                self.lines.push("//".into());
            } else {
                self.lines.push(format!("// {h}"));
            }
        }
        if !u.header.is_empty() {
            self.blank();
        }
        if let Some(pkg) = &u.package {
            self.line(0, format!("package {pkg};"));
            self.blank();
        }
        for i in &u.imports {
            let star = if i.wildcard { ".*" } else { "" };
            self.line(0, format!("import {}{star};", i.path));
        }
        if !u.imports.is_empty() {
            self.blank();
        }
        self.class(&u.class);
    }

    fn class(&mut self, c: &ClassDecl) {
        self.line(0, format!("{}class {} {{", modifiers(&c.modifiers), c.name));
        let mut first_section = true;
        if !c.fields.is_empty() {
            for f in &c.fields {
                let mut s = format!("{}{} {}", modifiers(&f.modifiers), print_type(&f.ty), f.name);
                if let Some(init) = &f.init {
                    s.push_str(" = ");
                    write_expr(&mut s, init);
                }
                s.push(';');
                self.line(1, s);
            }
            first_section = false;
        }
        for ctor in &c.constructors {
            if !first_section {
                self.blank();
            }
            first_section = false;
            self.body_head(
                1,
                format!("{}{}({})", modifiers(&ctor.modifiers), ctor.name, params(&ctor.params)),
                &ctor.body,
            );
        }
        for m in &c.methods {
            if !first_section {
                self.blank();
            }
            first_section = false;
            let ret = m
                .return_type
                .as_ref()
                .map(print_type)
                .unwrap_or_else(|| "void".into());
            self.body_head(
                1,
                format!("{}{} {}({})", modifiers(&m.modifiers), ret, m.name, params(&m.params)),
                &m.body,
            );
        }
        self.line(0, "}");
    }

    fn body_head(&mut self, depth: usize, head: String, body: &Block) {
        self.line(depth, format!("{head} {{"));
        for s in &body.stmts {
            self.stmt(s, depth + 1);
        }
        self.line(depth, "}");
    }

    /// Emits `head` followed by `body`; returns true when the body was a
    /// block (so the last emitted line is its closing brace).
    fn headed(&mut self, depth: usize, head: String, body: &Stmt) -> bool {
        match &body.kind {
            StmtKind::Block(b) => {
                self.body_head(depth, head, b);
                true
            }
            _ => {
                self.line(depth, head);
                self.stmt(body, depth + 1);
                false
            }
        }
    }

    fn if_chain(&mut self, depth: usize, lead: &str, cond: &Expr, then_b: &Stmt, else_b: Option<&Stmt>) {
        let head = format!("{lead}if ({})", print_expr(cond));
        let closed = self.headed(depth, head, then_b);
        let Some(else_b) = else_b else { return };
        let lead = if closed {
            self.lines.pop();
            "} else"
        } else {
            "else"
        };
        match &else_b.kind {
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => self.if_chain(depth, &format!("{lead} "), cond, then_branch, else_branch.as_deref()),
            _ => {
                self.headed(depth, lead.to_string(), else_b);
            }
        }
    }

    fn stmt(&mut self, s: &Stmt, depth: usize) {
        match &s.kind {
            StmtKind::Block(b) => {
                self.line(depth, "{");
                for s in &b.stmts {
                    self.stmt(s, depth + 1);
                }
                self.line(depth, "}");
            }
            StmtKind::Local(d) => self.line(depth, format!("{};", local(d))),
            StmtKind::Expr(e) => self.line(depth, format!("{};", print_expr(e))),
            StmtKind::If {
                cond,
                then_branch,
                else_branch,
            } => self.if_chain(depth, "", cond, then_branch, else_branch.as_deref()),
            StmtKind::While { cond, body } => {
                self.headed(depth, format!("while ({})", print_expr(cond)), body);
            }
            StmtKind::For {
                init,
                cond,
                update,
                body,
            } => {
                let init = match init {
                    None => String::new(),
                    Some(ForInit::Local(d)) => local(d),
                    Some(ForInit::Exprs(es)) => expr_list(es),
                };
                let cond = cond.as_ref().map(print_expr).unwrap_or_default();
                let cond = if cond.is_empty() { cond } else { format!(" {cond}") };
                let update = expr_list(update);
                let update = if update.is_empty() { update } else { format!(" {update}") };
                self.headed(depth, format!("for ({init};{cond};{update})"), body);
            }
            StmtKind::Return(None) => self.line(depth, "return;"),
            StmtKind::Return(Some(e)) => self.line(depth, format!("return {};", print_expr(e))),
            StmtKind::Assert { cond, message } => match message {
                None => self.line(depth, format!("assert {};", print_expr(cond))),
                Some(m) => self.line(
                    depth,
                    format!("assert {} : {};", print_expr(cond), print_expr(m)),
                ),
            },
            StmtKind::Throw(e) => self.line(depth, format!("throw {};", print_expr(e))),
        }
    }
}

fn escape_char(c: char, quote: char, out: &mut String) {
    match c {
        '\n' => out.push_str("\\n"),
        '\t' => out.push_str("\\t"),
        '\r' => out.push_str("\\r"),
        '\u{8}' => out.push_str("\\b"),
        '\u{c}' => out.push_str("\\f"),
        '\\' => out.push_str("\\\\"),
        c if c == quote => {
            out.push('\\');
            out.push(c);
        }
        c if (c as u32) < 0x20 || c as u32 == 0x7f => out.push_str(&format!("\\u{:04x}", c as u32)),
        c if (c as u32) > 0xffff => {
            let mut buf = [0u16; 2];
            for unit in c.encode_utf16(&mut buf) {
                out.push_str(&format!("\\u{:04x}", unit));
            }
        }
        c => out.push(c),
    }
}

fn float_text(v: f64) -> String {
    // `{:?}` is the shortest text that round-trips; make sure it still reads
    // as a floating-point literal.
    let s = format!("{v:?}");
    if s.contains('.') || s.contains('e') || s.contains("inf") || s.contains("NaN") {
        s
    } else {
        format!("{s}.0")
    }
}

fn literal(l: &Literal, out: &mut String) {
    match l {
        Literal::Int(v) => {
            if *v < 0 {
                out.push_str(&format!("0x{:X}", *v as i32 as u32));
            } else {
                out.push_str(&v.to_string());
            }
        }
        Literal::Long(v) => {
            if *v < 0 {
                out.push_str(&format!("0x{:X}L", *v as u64));
            } else {
                out.push_str(&format!("{v}L"));
            }
        }
        Literal::Float(v) => {
            let s = format!("{v:?}");
            out.push_str(&s);
            out.push('f');
        }
        Literal::Double(v) => out.push_str(&float_text(*v)),
        Literal::Char(c) => {
            out.push('\'');
            escape_char(*c, '\'', out);
            out.push('\'');
        }
        Literal::Str(s) => {
            out.push('"');
            for c in s.chars() {
                escape_char(c, '"', out);
            }
            out.push('"');
        }
        Literal::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Literal::Null => out.push_str("null"),
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Literal(l) => literal(l, out),
        ExprKind::Name(n) => out.push_str(n),
        ExprKind::This => out.push_str("this"),
        ExprKind::FieldAccess { target, name } => {
            write_expr(out, target);
            out.push('.');
            out.push_str(name);
        }
        ExprKind::Call { target, name, args } => {
            if let Some(t) = target {
                write_expr(out, t);
                out.push('.');
            }
            out.push_str(name);
            out.push('(');
            out.push_str(&expr_list(args));
            out.push(')');
        }
        ExprKind::New { class, args } => {
            out.push_str("new ");
            out.push_str(class);
            out.push('(');
            out.push_str(&expr_list(args));
            out.push(')');
        }
        ExprKind::NewArray { elem, creation } => {
            out.push_str("new ");
            out.push_str(&print_type(elem));
            match creation {
                ArrayCreation::Sized(len) => {
                    out.push('[');
                    write_expr(out, len);
                    out.push(']');
                }
                ArrayCreation::Init(elems) => {
                    out.push_str("[] {");
                    if !elems.is_empty() {
                        out.push(' ');
                        out.push_str(&expr_list(elems));
                        out.push(' ');
                    }
                    out.push('}');
                }
            }
        }
        ExprKind::ArrayAccess { array, index } => {
            write_expr(out, array);
            out.push('[');
            write_expr(out, index);
            out.push(']');
        }
        ExprKind::Unary { op, operand } => {
            let prefix = match op {
                UnaryOp::Neg => "-",
                UnaryOp::Plus => "+",
                UnaryOp::Not => "!",
                UnaryOp::BitNot => "~",
                UnaryOp::PreInc => "++",
                UnaryOp::PreDec => "--",
                UnaryOp::PostInc | UnaryOp::PostDec => {
                    write_expr(out, operand);
                    out.push_str(if *op == UnaryOp::PostInc { "++" } else { "--" });
                    return;
                }
            };
            let inner = print_expr(operand);
            out.push_str(prefix);
            // `- -x` and `+ +x` must not fuse into `--x` / `++x`
            let last = prefix.chars().last().unwrap_or(' ');
            if (last == '-' || last == '+') && inner.starts_with(last) {
                out.push(' ');
            }
            out.push_str(&inner);
        }
        ExprKind::Binary { op, lhs, rhs } => {
            write_expr(out, lhs);
            out.push(' ');
            out.push_str(op.symbol());
            out.push(' ');
            write_expr(out, rhs);
        }
        ExprKind::Conditional {
            cond,
            then_expr,
            else_expr,
        } => {
            write_expr(out, cond);
            out.push_str(" ? ");
            write_expr(out, then_expr);
            out.push_str(" : ");
            write_expr(out, else_expr);
        }
        ExprKind::Cast { ty, operand } => {
            out.push('(');
            out.push_str(&print_type(ty));
            out.push_str(") ");
            write_expr(out, operand);
        }
        ExprKind::Paren(inner) => {
            out.push('(');
            write_expr(out, inner);
            out.push(')');
        }
        ExprKind::Assign { op, target, value } => {
            write_expr(out, target);
            out.push(' ');
            out.push_str(&op.symbol());
            out.push(' ');
            write_expr(out, value);
        }
    }
}
