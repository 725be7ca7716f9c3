//! Name and type resolution against the unit itself and an allowlist of
//! library members.

mod allowlist;
mod classify;
mod table;
mod types;

pub use allowlist::{AllowedType, Allowlist, AllowlistError, Lookup, MemberSig, CONSTRUCTOR, VERIFIER};
pub use classify::{
    binary_type, classify_unit, resolve, Binding, BindingKind, Classification, DeclSite, UnresolvedDecl,
};
pub use table::{build_type_table, DeclTy, FieldInfo, MethodInfo, ResolveError, TypeName, TypeTable, VarRef};
pub use types::{assignable, binary_promote, unary_promote, widens_to, Ty, OBJECT, STRING};
