//! Tokenizer for the Java-like source subset.
//!
//! Whitespace and comments are dropped, except for `//` line comments that
//! appear before the first token: those are kept as the unit's header so a
//! provenance block survives a parse/print round trip.

use std::fmt;

use super::ast::Span;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct LexError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    /// Decoded `int` literal. Decimal `2147483648` is admitted so that it can
    /// follow a unary minus; hex/octal/binary literals wrap like Java does.
    Int(i64),
    Long(i64),
    Float(f32),
    Double(f64),
    Char(char),
    Str(String),
    Punct(Punct),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

macro_rules! keywords {
    ($($variant:ident => $text:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Keyword { $($variant),* }

        impl Keyword {
            pub fn from_word(s: &str) -> Option<Keyword> {
                match s {
                    $($text => Some(Keyword::$variant),)*
                    _ => None,
                }
            }

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Keyword::$variant => $text,)*
                }
            }
        }
    };
}

keywords! {
    Abstract => "abstract", Assert => "assert", Boolean => "boolean", Break => "break",
    Byte => "byte", Case => "case", Catch => "catch", Char => "char", Class => "class",
    Const => "const", Continue => "continue", Default => "default", Do => "do",
    Double => "double", Else => "else", Enum => "enum", Extends => "extends",
    False => "false", Final => "final", Finally => "finally", Float => "float",
    For => "for", Goto => "goto", If => "if", Implements => "implements",
    Import => "import", Instanceof => "instanceof", Int => "int", Interface => "interface",
    Long => "long", Native => "native", New => "new", Null => "null", Package => "package",
    Private => "private", Protected => "protected", Public => "public", Return => "return",
    Short => "short", Static => "static", Strictfp => "strictfp", Super => "super",
    Switch => "switch", Synchronized => "synchronized", This => "this", Throw => "throw",
    Throws => "throws", Transient => "transient", True => "true", Try => "try",
    Void => "void", Volatile => "volatile", While => "while",
}

macro_rules! puncts {
    ($($variant:ident => $text:literal),* $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Punct { $($variant),* }

        impl Punct {
            pub fn as_str(self) -> &'static str {
                match self {
                    $(Punct::$variant => $text,)*
                }
            }
        }

        /// Longest first, so maximal munch falls out of a linear scan.
        const PUNCT_TABLE: &[(&str, Punct)] = &[$(($text, Punct::$variant)),*];
    };
}

puncts! {
    UShrAssign => ">>>=", Ellipsis => "...", ShlAssign => "<<=", ShrAssign => ">>=", UShr => ">>>",
    EqEq => "==", NotEq => "!=", LtEq => "<=", GtEq => ">=", AndAnd => "&&", OrOr => "||",
    PlusPlus => "++", MinusMinus => "--", PlusAssign => "+=", MinusAssign => "-=",
    StarAssign => "*=", SlashAssign => "/=", PercentAssign => "%=", AndAssign => "&=",
    OrAssign => "|=", XorAssign => "^=", Shl => "<<", Shr => ">>", Arrow => "->",
    ColonColon => "::",
    LParen => "(", RParen => ")", LBrace => "{", RBrace => "}", LBracket => "[",
    RBracket => "]", Semi => ";", Comma => ",", Dot => ".", At => "@", Question => "?",
    Colon => ":", Assign => "=", Lt => "<", Gt => ">", Bang => "!", Tilde => "~",
    Plus => "+", Minus => "-", Star => "*", Slash => "/", Percent => "%", Amp => "&",
    Pipe => "|", Caret => "^",
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Ident(s) => write!(f, "identifier `{s}`"),
            TokenKind::Keyword(k) => write!(f, "`{}`", k.as_str()),
            TokenKind::Int(v) => write!(f, "int literal {v}"),
            TokenKind::Long(v) => write!(f, "long literal {v}"),
            TokenKind::Float(v) => write!(f, "float literal {v}"),
            TokenKind::Double(v) => write!(f, "double literal {v}"),
            TokenKind::Char(c) => write!(f, "char literal {c:?}"),
            TokenKind::Str(s) => write!(f, "text literal {s:?}"),
            TokenKind::Punct(p) => write!(f, "`{}`", p.as_str()),
        }
    }
}

/// Output of [`tokenize_with_header`].
#[derive(Debug, Clone, PartialEq)]
pub struct Lexed {
    /// Text of the leading `//` comments, with the `//` and one following
    /// space stripped.
    pub header: Vec<String>,
    pub tokens: Vec<Token>,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    tokenize_with_header(source).map(|l| l.tokens)
}

pub fn tokenize_with_header(source: &str) -> Result<Lexed, LexError> {
    let mut lx = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut header = Vec::new();
    let mut tokens = Vec::new();
    loop {
        lx.skip_trivia(if tokens.is_empty() { Some(&mut header) } else { None })?;
        if lx.at_end() {
            break;
        }
        tokens.push(lx.token()?);
    }
    Ok(Lexed { header, tokens })
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
}

impl Lexer {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, LexError> {
        Err(LexError {
            line: self.line,
            column: self.col,
            message: message.into(),
        })
    }

    fn skip_trivia(&mut self, mut header: Option<&mut Vec<String>>) -> Result<(), LexError> {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    self.bump();
                    self.bump();
                    let mut text = String::new();
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        text.push(c);
                        self.bump();
                    }
                    if let Some(h) = header.as_deref_mut() {
                        let text = text.strip_suffix('\r').unwrap_or(&text);
                        let text = text.strip_prefix(' ').unwrap_or(text);
                        h.push(text.to_string());
                    }
                }
                Some('/') if self.peek_at(1) == Some('*') => {
                    // a block comment ends the header
                    header = None;
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            None => return self.error("unterminated block comment"),
                            Some('*') if self.peek_at(1) == Some('/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            _ => {
                                self.bump();
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn token(&mut self) -> Result<Token, LexError> {
        let (line, col) = (self.line, self.col);
        let c = self.peek().expect("caller checked for end of input");
        let kind = if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let mut word = String::new();
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '$' {
                    word.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            match Keyword::from_word(&word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word),
            }
        } else if c.is_ascii_digit() || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit())) {
            self.number()?
        } else if c == '"' {
            self.string()?
        } else if c == '\'' {
            self.char_literal()?
        } else {
            self.punct()?
        };
        Ok(Token {
            kind,
            span: Span::new(line, col, self.line, self.col),
        })
    }

    fn punct(&mut self) -> Result<TokenKind, LexError> {
        for (text, p) in PUNCT_TABLE {
            let matches = text
                .chars()
                .enumerate()
                .all(|(i, tc)| self.peek_at(i) == Some(tc));
            if matches {
                for _ in 0..text.chars().count() {
                    self.bump();
                }
                return Ok(TokenKind::Punct(*p));
            }
        }
        let c = self.peek().unwrap_or('\0');
        self.error(format!("illegal character {c:?}"))
    }

    fn number(&mut self) -> Result<TokenKind, LexError> {
        let start_line = self.line;
        let start_col = self.col;
        let fail = |msg: String| -> Result<TokenKind, LexError> {
            Err(LexError {
                line: start_line,
                column: start_col,
                message: msg,
            })
        };

        let radix = if self.peek() == Some('0') {
            match self.peek_at(1) {
                Some('x' | 'X') => 16,
                Some('b' | 'B') => 2,
                _ => 10,
            }
        } else {
            10
        };

        if radix != 10 {
            self.bump();
            self.bump();
            let digits = self.take_digits(|c| c.is_digit(radix));
            if digits.is_empty() {
                return fail("missing digits in integer literal".into());
            }
            if matches!(self.peek(), Some('.' | 'p' | 'P')) {
                return fail("hexadecimal floating-point literals are not supported".into());
            }
            let long = self.eat_suffix(&['l', 'L']);
            self.reject_ident_tail()?;
            return if long {
                match u64::from_str_radix(&digits, radix) {
                    Ok(v) => Ok(TokenKind::Long(v as i64)),
                    Err(_) => fail(format!("long literal out of range: {digits}")),
                }
            } else {
                match u32::from_str_radix(&digits, radix) {
                    Ok(v) => Ok(TokenKind::Int(i64::from(v as i32))),
                    Err(_) => fail(format!("int literal out of range: {digits}")),
                }
            };
        }

        let int_part = self.take_digits(|c| c.is_ascii_digit());
        let mut is_float = false;
        let mut text = int_part.clone();
        if self.peek() == Some('.') && self.peek_at(1).is_none_or(|c| c.is_ascii_digit() || !c.is_ascii_alphabetic() && c != '.') {
            is_float = true;
            self.bump();
            text.push('.');
            text.push_str(&self.take_digits(|c| c.is_ascii_digit()));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            is_float = true;
            self.bump();
            text.push('e');
            if let Some(sign @ ('+' | '-')) = self.peek() {
                self.bump();
                text.push(sign);
            }
            let exp = self.take_digits(|c| c.is_ascii_digit());
            if exp.is_empty() {
                return fail("missing exponent digits".into());
            }
            text.push_str(&exp);
        }
        if self.eat_suffix(&['f', 'F']) {
            self.reject_ident_tail()?;
            return match text.parse::<f32>() {
                Ok(v) if v.is_finite() => Ok(TokenKind::Float(v)),
                _ => fail(format!("float literal out of range: {text}")),
            };
        }
        if self.eat_suffix(&['d', 'D']) {
            is_float = true;
        }
        if is_float {
            self.reject_ident_tail()?;
            return match text.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(TokenKind::Double(v)),
                _ => fail(format!("double literal out of range: {text}")),
            };
        }

        let long = self.eat_suffix(&['l', 'L']);
        self.reject_ident_tail()?;
        // a leading zero means octal in Java
        let (digits, radix) = if int_part.len() > 1 && int_part.starts_with('0') {
            (&int_part[1..], 8)
        } else {
            (&int_part[..], 10)
        };
        if long {
            let parsed = if radix == 8 {
                u64::from_str_radix(digits, 8).map(|v| v as i64)
            } else {
                digits.parse::<i64>()
            };
            match parsed {
                Ok(v) => Ok(TokenKind::Long(v)),
                Err(_) => fail(format!("long literal out of range: {int_part}")),
            }
        } else if radix == 8 {
            match u32::from_str_radix(digits, 8) {
                Ok(v) => Ok(TokenKind::Int(i64::from(v as i32))),
                Err(_) => fail(format!("int literal out of range: {int_part}")),
            }
        } else {
            match digits.parse::<i64>() {
                Ok(v) if v <= 1 << 31 => Ok(TokenKind::Int(v)),
                _ => fail(format!("int literal out of range: {int_part}")),
            }
        }
    }

    fn take_digits(&mut self, accept: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if accept(c) {
                s.push(c);
                self.bump();
            } else if c == '_' && self.peek_at(1).is_some_and(|n| accept(n) || n == '_') && !s.is_empty() {
                self.bump();
            } else {
                break;
            }
        }
        s
    }

    fn eat_suffix(&mut self, options: &[char]) -> bool {
        match self.peek() {
            Some(c) if options.contains(&c) => {
                self.bump();
                true
            }
            _ => false,
        }
    }

    fn reject_ident_tail(&self) -> Result<(), LexError> {
        match self.peek() {
            Some(c) if c.is_ascii_alphanumeric() || c == '_' || c == '$' => {
                self.error(format!("malformed numeric literal near {c:?}"))
            }
            _ => Ok(()),
        }
    }

    fn escape(&mut self) -> Result<char, LexError> {
        // the backslash is already consumed
        let Some(c) = self.bump() else {
            return self.error("unterminated escape sequence");
        };
        Ok(match c {
            'n' => '\n',
            't' => '\t',
            'b' => '\u{8}',
            'r' => '\r',
            'f' => '\u{c}',
            's' => ' ',
            '\'' => '\'',
            '"' => '"',
            '\\' => '\\',
            '0'..='7' => {
                let max_len = if c <= '3' { 3 } else { 2 };
                let mut value = c.to_digit(8).unwrap_or(0);
                let mut len = 1;
                while len < max_len {
                    match self.peek().and_then(|d| d.to_digit(8)) {
                        Some(d) => {
                            value = value * 8 + d;
                            self.bump();
                            len += 1;
                        }
                        None => break,
                    }
                }
                char::from_u32(value).unwrap_or('\0')
            }
            'u' => {
                while self.peek() == Some('u') {
                    self.bump();
                }
                let mut value = 0u32;
                for _ in 0..4 {
                    match self.bump().and_then(|d| d.to_digit(16)) {
                        Some(d) => value = value * 16 + d,
                        None => return self.error("malformed unicode escape"),
                    }
                }
                match char::from_u32(value) {
                    Some(ch) => ch,
                    None => return self.error("unicode escape is a lone surrogate"),
                }
            }
            other => return self.error(format!("unknown escape sequence \\{other}")),
        })
    }

    fn string(&mut self) -> Result<TokenKind, LexError> {
        self.bump();
        if self.peek() == Some('"') && self.peek_at(1) == Some('"') {
            return self.error("text blocks are not supported");
        }
        let mut out = String::new();
        loop {
            match self.bump() {
                None | Some('\n') => return self.error("unterminated text literal"),
                Some('"') => break,
                Some('\\') => out.push(self.escape()?),
                Some(c) => out.push(c),
            }
        }
        Ok(TokenKind::Str(out))
    }

    fn char_literal(&mut self) -> Result<TokenKind, LexError> {
        self.bump();
        let c = match self.bump() {
            None | Some('\n') | Some('\'') => return self.error("malformed char literal"),
            Some('\\') => self.escape()?,
            Some(c) => c,
        };
        if self.bump() != Some('\'') {
            return self.error("unterminated char literal");
        }
        Ok(TokenKind::Char(c))
    }
}
