use super::QueryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Match,
    Where,
    Return,
    And,
    Or,
    Not,
    In,
    True,
    False,
}

impl Keyword {
    fn lookup(word: &str) -> Option<Keyword> {
        let kw = match word.to_ascii_uppercase().as_str() {
            "MATCH" => Keyword::Match,
            "WHERE" => Keyword::Where,
            "RETURN" => Keyword::Return,
            "AND" => Keyword::And,
            "OR" => Keyword::Or,
            "NOT" => Keyword::Not,
            "IN" => Keyword::In,
            "TRUE" => Keyword::True,
            "FALSE" => Keyword::False,
            _ => return None,
        };
        Some(kw)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    Str(String),
    Int(u64),
    Float(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Dot,
    Dash,
    Gt,
    Lt,
    Eq,
    Ne,
    Le,
    Ge,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
    /// Char offset from the start of input.
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text of the token (empty at end of input).
    pub text: String,
    pub pos: Pos,
}

impl Token {
    pub fn describe(&self) -> String {
        match self.kind {
            TokenKind::Eof => "end of input".to_string(),
            _ => format!("'{}'", self.text),
        }
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        self.pos.offset += 1;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, QueryError> {
    let mut cur = Cursor {
        chars: src.chars().peekable(),
        pos: Pos {
            line: 1,
            column: 1,
            offset: 0,
        },
    };
    let mut tokens = Vec::new();
    loop {
        while cur.peek().is_some_and(char::is_whitespace) {
            cur.bump();
        }
        let start = cur.pos;
        let Some(c) = cur.bump() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                pos: start,
            });
            return Ok(tokens);
        };
        let mut text = c.to_string();
        let kind = match c {
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            ':' => TokenKind::Colon,
            ',' => TokenKind::Comma,
            '.' => TokenKind::Dot,
            '-' => TokenKind::Dash,
            '=' => TokenKind::Eq,
            '>' if cur.peek() == Some('=') => {
                text.push(cur.bump().unwrap());
                TokenKind::Ge
            }
            '>' => TokenKind::Gt,
            '<' => match cur.peek() {
                Some('=') => {
                    text.push(cur.bump().unwrap());
                    TokenKind::Le
                }
                Some('>') => {
                    text.push(cur.bump().unwrap());
                    TokenKind::Ne
                }
                _ => TokenKind::Lt,
            },
            '\'' => lex_string(&mut cur, &mut text, start)?,
            c if c.is_ascii_digit() => lex_number(&mut cur, &mut text, start)?,
            c if c.is_alphabetic() || c == '_' => {
                while cur.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    text.push(cur.bump().unwrap());
                }
                match Keyword::lookup(&text) {
                    Some(kw) => TokenKind::Keyword(kw),
                    None => TokenKind::Ident(text.clone()),
                }
            }
            _ => {
                return Err(QueryError::Syntax {
                    line: start.line,
                    column: start.column,
                    found: format!("'{c}'"),
                    expected: "a token".into(),
                })
            }
        };
        tokens.push(Token {
            kind,
            text,
            pos: start,
        });
    }
}

fn lex_string(cur: &mut Cursor<'_>, text: &mut String, start: Pos) -> Result<TokenKind, QueryError> {
    let mut value = String::new();
    loop {
        let Some(c) = cur.bump() else {
            return Err(QueryError::Syntax {
                line: start.line,
                column: start.column,
                found: "unterminated string".into(),
                expected: "closing quote".into(),
            });
        };
        text.push(c);
        match c {
            '\'' => return Ok(TokenKind::Str(value)),
            '\\' => {
                let Some(e) = cur.bump() else { continue };
                text.push(e);
                value.push(match e {
                    'n' => '\n',
                    't' => '\t',
                    'r' => '\r',
                    other => other,
                });
            }
            c => value.push(c),
        }
    }
}

fn lex_number(cur: &mut Cursor<'_>, text: &mut String, start: Pos) -> Result<TokenKind, QueryError> {
    let digits = |cur: &mut Cursor<'_>, text: &mut String| {
        while cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            text.push(cur.bump().unwrap());
        }
    };
    digits(cur, text);
    let mut is_float = false;
    // A '.' only continues the number when a digit follows; "1.x" is not a float.
    if cur.peek() == Some('.') {
        let mut ahead = cur.chars.clone();
        ahead.next();
        if ahead.next().is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            text.push(cur.bump().unwrap());
            digits(cur, text);
        }
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let mut ahead = cur.chars.clone();
        ahead.next();
        let mut next = ahead.next();
        if matches!(next, Some('+' | '-')) {
            next = ahead.next();
        }
        if next.is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            text.push(cur.bump().unwrap());
            if matches!(cur.peek(), Some('+' | '-')) {
                text.push(cur.bump().unwrap());
            }
            digits(cur, text);
        }
    }
    let bad = || QueryError::Syntax {
        line: start.line,
        column: start.column,
        found: format!("'{text}'"),
        expected: "a representable number".into(),
    };
    if is_float {
        text.parse::<f64>()
            .ok()
            .filter(|f| f.is_finite())
            .map(TokenKind::Float)
            .ok_or_else(bad)
    } else {
        text.parse::<u64>().map(TokenKind::Int).map_err(|_| bad())
    }
}
