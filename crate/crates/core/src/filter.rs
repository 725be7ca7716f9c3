//! Per-file feature counts and threshold selection.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::resolve::{classify_unit, Classification, Ty, TypeTable};
use crate::syntax::ast::{BinaryOp, CompilationUnit, Expr, ExprKind, PrimType, StmtKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureProfile {
    pub if_count: u32,
    pub if_on_chosen_primitive: u32,
    pub loop_count: u32,
    pub boolean_connective_count: u32,
    /// Casts plus array creations.
    pub type_expression_count: u32,
    /// The subset has no generics, so this is always zero.
    pub type_parameter_count: u32,
    pub assert_count: u32,
    pub method_count: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct FilterCriteria {
    #[serde(rename = "minIfStmt")]
    pub min_if: u32,
    pub min_if_on_chosen_primitive: u32,
    pub min_loops: u32,
    pub min_connectives: u32,
    #[serde(rename = "minTypeExpr")]
    pub min_type_expressions: u32,
    pub min_type_params: u32,
    pub min_methods: u32,
}

/// Whether `e` is a data-carrying operand: a variable, field, call result or
/// array element. Literals and operators are not.
fn is_data_operand(e: &Expr) -> bool {
    matches!(
        e.kind,
        ExprKind::Name(_) | ExprKind::FieldAccess { .. } | ExprKind::Call { .. } | ExprKind::ArrayAccess { .. }
    )
}

fn conditional_on(cond: &Expr, chosen: &BTreeSet<PrimType>, c: &Classification) -> bool {
    let mut hit = false;
    cond.walk(&mut |e| {
        if is_data_operand(e) {
            if let Some(Ty::Prim(p)) = c.ty(e.id) {
                hit |= chosen.contains(p);
            }
        }
    });
    hit
}

pub fn profile(unit: &CompilationUnit, chosen: &BTreeSet<PrimType>, table: &TypeTable<'_>) -> FeatureProfile {
    let classes = classify_unit(unit, table);
    profile_classified(unit, chosen, &classes)
}

/// Same as [`profile`] for a unit that has already been classified.
pub fn profile_classified(unit: &CompilationUnit, chosen: &BTreeSet<PrimType>, c: &Classification) -> FeatureProfile {
    let mut p = FeatureProfile {
        method_count: unit.class.methods.len() as u32,
        ..FeatureProfile::default()
    };
    unit.walk_stmts(&mut |s| match &s.kind {
        StmtKind::If { cond, .. } => {
            p.if_count += 1;
            if conditional_on(cond, chosen, c) {
                p.if_on_chosen_primitive += 1;
            }
        }
        StmtKind::While { .. } | StmtKind::For { .. } => p.loop_count += 1,
        StmtKind::Assert { .. } => p.assert_count += 1,
        _ => {}
    });
    unit.walk_exprs(&mut |e| match &e.kind {
        ExprKind::Binary {
            op: BinaryOp::And | BinaryOp::Or,
            ..
        } => p.boolean_connective_count += 1,
        ExprKind::Cast { .. } | ExprKind::NewArray { .. } => p.type_expression_count += 1,
        _ => {}
    });
    p
}

pub fn accept(p: &FeatureProfile, c: &FilterCriteria) -> bool {
    p.if_count >= c.min_if
        && p.if_on_chosen_primitive >= c.min_if_on_chosen_primitive
        && p.loop_count >= c.min_loops
        && p.boolean_connective_count >= c.min_connectives
        && p.type_expression_count >= c.min_type_expressions
        && p.type_parameter_count >= c.min_type_params
        && p.method_count >= c.min_methods
}
