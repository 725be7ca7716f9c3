//! Independent reference computations the library is checked against.

use std::collections::{BTreeMap, BTreeSet};

use argforge::metrics::{MetricSet, Outcome, Rational};
use argforge::resolve::{classify_unit, TypeTable};
use argforge::syntax::ast::{ArrayCreation, AssignOp, BaseType, CompilationUnit, ExprKind, ForInit, Literal, Stmt, StmtKind};
use argforge::syntax::printer::print_stmt;
use argforge::transform::{Reason, TransformOutcome};

// ---- metrics ----------------------------------------------------------

/// Numerator and denominator as counted; a zero denominator is undefined.
pub type Frac = (u64, u64);

fn count(records: &[(bool, Outcome)], pred: impl Fn(bool, Outcome) -> bool) -> u64 {
    records.iter().filter(|(e, a)| pred(*e, *a)).count() as u64
}

fn decisive(a: Outcome) -> bool {
    a == Outcome::True || a == Outcome::False
}

fn correct(e: bool, a: Outcome) -> bool {
    (e && a == Outcome::True) || (!e && a == Outcome::False)
}

/// Accuracy, precision, recall and specificity over decisive answers only.
pub fn exclusive(records: &[(bool, Outcome)]) -> [Frac; 4] {
    [
        (count(records, correct), count(records, |_, a| decisive(a))),
        (
            count(records, |e, a| e && a == Outcome::True),
            count(records, |_, a| a == Outcome::True),
        ),
        (
            count(records, |e, a| e && a == Outcome::True),
            count(records, |e, a| e && decisive(a)),
        ),
        (
            count(records, |e, a| !e && a == Outcome::False),
            count(records, |e, a| !e && decisive(a)),
        ),
    ]
}

/// The same four with undecidable answers counted as wrong, plus the
/// undecidable share.
pub fn inclusive(records: &[(bool, Outcome)]) -> [Frac; 5] {
    let n = records.len() as u64;
    [
        (count(records, correct), n),
        (
            count(records, |e, a| e && a == Outcome::True),
            count(records, |_, a| a == Outcome::True),
        ),
        (count(records, |e, a| e && a == Outcome::True), count(records, |e, _| e)),
        (count(records, |e, a| !e && a == Outcome::False), count(records, |e, _| !e)),
        (count(records, |_, a| !decisive(a)), n),
    ]
}

/// Exact equality between an engine value and a counted fraction.
pub fn same(engine: Option<Rational>, (num, den): Frac) -> bool {
    match engine {
        None => den == 0,
        Some(r) => den != 0 && *r.numer() as u128 * den as u128 == num as u128 * *r.denom() as u128,
    }
}

pub fn matches_exclusive(m: &MetricSet, records: &[(bool, Outcome)]) -> bool {
    let [acc, prec, rec, spec] = exclusive(records);
    same(m.accuracy, acc) && same(m.precision, prec) && same(m.recall, rec) && same(m.specificity, spec)
}

pub fn matches_inclusive(m: &MetricSet, records: &[(bool, Outcome)]) -> bool {
    let [acc, prec, rec, spec, und] = inclusive(records);
    same(m.accuracy, acc)
        && same(m.precision, prec)
        && same(m.recall, rec)
        && same(m.specificity, spec)
        && same(m.pct_undecidable, und)
}

/// Every multiset of size at most `max` over `cells` kinds, as
/// non-decreasing index sequences.
pub fn multisets(cells: usize, max: usize) -> Vec<Vec<usize>> {
    fn go(cells: usize, max: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if cur.len() == max {
            return;
        }
        for c in start..cells {
            cur.push(c);
            go(cells, max, c, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(cells, max, 0, &mut Vec::new(), &mut out);
    out
}

// ---- grammar coverage -------------------------------------------------

/// Production names present in a unit.
pub fn productions(unit: &CompilationUnit) -> BTreeSet<String> {
    let mut p = BTreeSet::new();
    let mut add = |s: &str| {
        p.insert(s.to_string());
    };
    if unit.package.is_some() {
        add("package");
    }
    for i in &unit.imports {
        add(if i.wildcard { "import-wildcard" } else { "import-single" });
    }
    let mods = std::iter::once(&unit.class.modifiers)
        .chain(unit.class.fields.iter().map(|f| &f.modifiers))
        .chain(unit.class.methods.iter().map(|m| &m.modifiers))
        .chain(unit.class.constructors.iter().map(|c| &c.modifiers));
    let mut flags = Vec::new();
    for m in mods {
        if let Some(v) = m.visibility {
            flags.push(v.keyword().to_string());
        }
        if m.is_static {
            flags.push("static".into());
        }
        if m.is_final {
            flags.push("final".into());
        }
    }
    for f in flags {
        add(&format!("modifier-{f}"));
    }
    let mut types = Vec::new();
    for f in &unit.class.fields {
        add(if f.init.is_some() { "field-init" } else { "field" });
        types.push(f.ty.clone());
    }
    for c in &unit.class.constructors {
        add("constructor");
        types.extend(c.params.iter().map(|x| x.ty.clone()));
    }
    for m in &unit.class.methods {
        match &m.return_type {
            None => add("method-void"),
            Some(t) => {
                add("method-typed");
                types.push(t.clone());
            }
        }
        for x in &m.params {
            if x.is_final {
                add("param-final");
            }
            types.push(x.ty.clone());
        }
    }
    unit.walk_stmts(&mut |s| match &s.kind {
        StmtKind::Block(_) => add("stmt-block"),
        StmtKind::Local(d) => {
            add(if d.is_final { "stmt-local-final" } else { "stmt-local" });
            types.push(d.ty.clone());
        }
        StmtKind::Expr(_) => add("stmt-expr"),
        StmtKind::If { else_branch, .. } => add(if else_branch.is_some() { "stmt-if-else" } else { "stmt-if" }),
        StmtKind::While { .. } => add("stmt-while"),
        StmtKind::For { init, .. } => match init {
            Some(ForInit::Local(d)) => {
                add("stmt-for-local");
                types.push(d.ty.clone());
            }
            Some(ForInit::Exprs(_)) => add("stmt-for-exprs"),
            None => add("stmt-for"),
        },
        StmtKind::Return(e) => add(if e.is_some() { "stmt-return-value" } else { "stmt-return" }),
        StmtKind::Assert { message, .. } => add(if message.is_some() { "stmt-assert-message" } else { "stmt-assert" }),
        StmtKind::Throw(_) => add("stmt-throw"),
    });
    unit.walk_exprs(&mut |e| match &e.kind {
        ExprKind::Literal(l) => add(match l {
            Literal::Int(_) => "lit-int",
            Literal::Long(_) => "lit-long",
            Literal::Float(_) => "lit-float",
            Literal::Double(_) => "lit-double",
            Literal::Char(_) => "lit-char",
            Literal::Str(_) => "lit-string",
            Literal::Bool(_) => "lit-boolean",
            Literal::Null => "lit-null",
        }),
        ExprKind::Name(_) => add("expr-name"),
        ExprKind::This => add("expr-this"),
        ExprKind::FieldAccess { name, .. } => add(if name == "length" { "expr-length" } else { "expr-field" }),
        ExprKind::Call { target, .. } => add(if target.is_some() { "expr-call-target" } else { "expr-call" }),
        ExprKind::New { .. } => add("expr-new"),
        ExprKind::NewArray { elem, creation } => {
            add(match creation {
                ArrayCreation::Sized(_) => "expr-new-array-sized",
                ArrayCreation::Init(_) => "expr-new-array-init",
            });
            types.push(elem.clone());
        }
        ExprKind::ArrayAccess { .. } => add("expr-index"),
        ExprKind::Unary { op, .. } => add(&format!("unary-{op:?}")),
        ExprKind::Binary { op, .. } => add(&format!("binary-{op:?}")),
        ExprKind::Conditional { .. } => add("expr-conditional"),
        ExprKind::Cast { ty, .. } => {
            add("expr-cast");
            types.push(ty.clone());
        }
        ExprKind::Paren(_) => add("expr-paren"),
        ExprKind::Assign { op, .. } => match op {
            AssignOp::Assign => add("assign"),
            AssignOp::Compound(b) => add(&format!("assign-{b:?}")),
        },
    });
    for t in types {
        let base = match &t.base {
            BaseType::Prim(p) => format!("type-{p}"),
            BaseType::Named(_) => "type-named".to_string(),
        };
        add(&base);
        if t.array {
            add(&format!("{base}-array"));
        }
    }
    p
}

/// Everything the subset grammar can express.
pub fn all_productions() -> BTreeSet<String> {
    let mut s: BTreeSet<String> = [
        "package",
        "import-single",
        "import-wildcard",
        "modifier-public",
        "modifier-protected",
        "modifier-private",
        "modifier-static",
        "modifier-final",
        "field",
        "field-init",
        "constructor",
        "method-void",
        "method-typed",
        "param-final",
        "stmt-block",
        "stmt-local",
        "stmt-local-final",
        "stmt-expr",
        "stmt-if",
        "stmt-if-else",
        "stmt-while",
        "stmt-for-local",
        "stmt-for-exprs",
        "stmt-return",
        "stmt-return-value",
        "stmt-assert",
        "stmt-assert-message",
        "stmt-throw",
        "lit-int",
        "lit-long",
        "lit-float",
        "lit-double",
        "lit-char",
        "lit-string",
        "lit-boolean",
        "lit-null",
        "expr-name",
        "expr-this",
        "expr-field",
        "expr-length",
        "expr-call",
        "expr-call-target",
        "expr-new",
        "expr-new-array-sized",
        "expr-new-array-init",
        "expr-index",
        "expr-conditional",
        "expr-cast",
        "expr-paren",
        "assign",
        "type-named",
        "type-named-array",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    for op in ["Neg", "Plus", "Not", "BitNot", "PreInc", "PreDec", "PostInc", "PostDec"] {
        s.insert(format!("unary-{op}"));
    }
    let binary = [
        "Mul", "Div", "Rem", "Add", "Sub", "Shl", "Shr", "UShr", "Lt", "Gt", "Le", "Ge", "Eq", "Ne", "BitAnd", "BitXor",
        "BitOr", "And", "Or",
    ];
    for op in binary {
        s.insert(format!("binary-{op}"));
    }
    for op in ["Mul", "Div", "Rem", "Add", "Sub", "Shl", "Shr", "UShr", "BitAnd", "BitXor", "BitOr"] {
        s.insert(format!("assign-{op}"));
    }
    for p in ["boolean", "byte", "char", "short", "int", "long", "float", "double"] {
        s.insert(format!("type-{p}"));
    }
    for p in ["int", "double"] {
        s.insert(format!("type-{p}-array"));
    }
    s
}

// ---- logic preservation -------------------------------------------------

fn identifiers(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '$'))
        .filter(|w| w.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_' || c == '$'))
}

fn rename_ident(text: &str, from: &str, to: &str) -> String {
    let mut out = String::new();
    let mut word = String::new();
    for c in text.chars().chain(std::iter::once('\0')) {
        if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
            word.push(c);
            continue;
        }
        out.push_str(if word == from { to } else { &word });
        word.clear();
        if c != '\0' {
            out.push(c);
        }
    }
    out
}

fn leaf(s: &Stmt) -> bool {
    matches!(
        s.kind,
        StmtKind::Local(_) | StmtKind::Expr(_) | StmtKind::Return(_) | StmtKind::Assert { .. } | StmtKind::Throw(_)
    )
}

fn leaf_texts(body: &[Stmt], out: &mut Vec<(String, bool)>, keep: &dyn Fn(&Stmt) -> bool) {
    for s in body {
        s.walk(&mut |s| {
            if leaf(s) {
                out.push((print_stmt(s, 0).trim().to_string(), keep(s)));
            }
        });
    }
}

pub struct Preservation {
    /// Fully-resolved, untainted input statements that were looked for.
    pub checked: usize,
    /// Those not found in the output.
    pub missing: Vec<String>,
}

/// Checks that every input statement whose expressions all resolve
/// appears verbatim in the output, modulo the class rename. Statements
/// that mention a removed declaration, or live in a removed member, are
/// excused: their dependency is gone, so dropping them is forced.
pub fn preservation(input: &CompilationUnit, table: &TypeTable<'_>, outcome: &TransformOutcome) -> Preservation {
    let output = outcome.unit.as_ref().expect("transformed");
    let mut input = input.clone();
    input.renumber();
    let cls = classify_unit(&input, table);
    let mut tainted: BTreeSet<String> = BTreeSet::new();
    let mut removed_methods = BTreeSet::new();
    let mut ctor_removed = false;
    for r in &outcome.removals {
        match r.reason {
            Reason::LocalRemoved | Reason::FieldRemoved | Reason::ForInitDropped => {
                tainted.extend(identifiers(&r.subject).map(String::from));
            }
            Reason::MethodSignature | Reason::MethodReturn => {
                tainted.insert(r.subject.clone());
                removed_methods.insert(r.subject.clone());
            }
            Reason::ConstructorSignature => {
                tainted.insert(r.subject.clone());
                ctor_removed = true;
            }
            Reason::MainRenamed => {
                tainted.insert("main".into());
            }
            _ => {}
        }
    }
    let resolved = |s: &Stmt| {
        let mut ok = true;
        s.walk_exprs(&mut |e| ok &= !cls.is_unresolved(e.id));
        if let StmtKind::Local(d) = &s.kind {
            ok &= table.resolve_type_ref(&d.ty).known().is_some();
        }
        ok
    };
    let mut wanted = Vec::new();
    if !ctor_removed {
        for c in &input.class.constructors {
            leaf_texts(&c.body.stmts, &mut wanted, &resolved);
        }
    }
    for m in &input.class.methods {
        if !removed_methods.contains(&m.name) {
            leaf_texts(&m.body.stmts, &mut wanted, &resolved);
        }
    }
    let mut have: BTreeMap<String, usize> = BTreeMap::new();
    let mut out_leaves = Vec::new();
    for c in &output.class.constructors {
        leaf_texts(&c.body.stmts, &mut out_leaves, &|_| true);
    }
    for m in &output.class.methods {
        leaf_texts(&m.body.stmts, &mut out_leaves, &|_| true);
    }
    for (t, _) in out_leaves {
        *have.entry(t).or_default() += 1;
    }
    let class = input.class.name.clone();
    let mut checked = 0;
    let mut missing = Vec::new();
    for (text, ok) in wanted {
        if !ok || identifiers(&text).any(|w| tainted.contains(w)) {
            continue;
        }
        checked += 1;
        let expect = rename_ident(&text, &class, "Main");
        match have.get_mut(&expect) {
            Some(n) if *n > 0 => *n -= 1,
            _ => missing.push(expect),
        }
    }
    Preservation { checked, missing }
}
