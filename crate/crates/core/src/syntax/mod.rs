//! Front end for the Java-like source subset: lexer, parser, syntax tree,
//! canonical printer and line counting.

pub mod ast;
pub mod lexer;
mod loc;
pub mod parser;
pub mod printer;

pub use ast::{CompilationUnit, Span};
pub use lexer::{tokenize, LexError, Token};
pub use loc::loc_count;
pub use parser::{parse, ParseError};
pub use printer::pretty_print;

/// Why a unit could not be turned into a tree. Exactly one of the two is
/// reported for any rejected input.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrontendError {
    #[error("lexical error at {0}")]
    Lex(#[from] LexError),
    #[error("syntax error at {0}")]
    Parse(#[from] ParseError),
}

impl FrontendError {
    pub fn code(&self) -> &'static str {
        match self {
            FrontendError::Lex(_) => "LEX_FAIL",
            FrontendError::Parse(_) => "PARSE_FAIL",
        }
    }
}

/// Tokenizes and parses `source`, keeping leading `//` comments as the
/// unit header.
pub fn parse_source(source: &str) -> Result<CompilationUnit, FrontendError> {
    let lexed = lexer::tokenize_with_header(source)?;
    Ok(parser::parse_lexed(&lexed)?)
}
