use std::fmt;

use super::SourceSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Net,
    Position,
    Transition,
    Kind,
    Input,
    Output,
    Inputs,
    Outputs,
    Selector,
    Resolution,
    Attr,
    Proc,
    Peripheral,
    Label,
}

impl Keyword {
    fn from_ident(s: &str) -> Option<Self> {
        Some(match s {
            "net" => Keyword::Net,
            "position" => Keyword::Position,
            "transition" => Keyword::Transition,
            "kind" => Keyword::Kind,
            "input" => Keyword::Input,
            "output" => Keyword::Output,
            "inputs" => Keyword::Inputs,
            "outputs" => Keyword::Outputs,
            "selector" => Keyword::Selector,
            "resolution" => Keyword::Resolution,
            "attr" => Keyword::Attr,
            "proc" => Keyword::Proc,
            "peripheral" => Keyword::Peripheral,
            "label" => Keyword::Label,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Keyword::Net => "net",
            Keyword::Position => "position",
            Keyword::Transition => "transition",
            Keyword::Kind => "kind",
            Keyword::Input => "input",
            Keyword::Output => "output",
            Keyword::Inputs => "inputs",
            Keyword::Outputs => "outputs",
            Keyword::Selector => "selector",
            Keyword::Resolution => "resolution",
            Keyword::Attr => "attr",
            Keyword::Proc => "proc",
            Keyword::Peripheral => "peripheral",
            Keyword::Label => "label",
        }
    }
}

/// Is `s` usable as an identifier (not a keyword, ASCII word characters)?
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && Keyword::from_ident(s).is_none()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(String),
    Int(u64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    /// Unlexable input; the payload says what went wrong.
    Error(String),
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenKind::Keyword(k) => write!(f, "kw:{}", k.as_str()),
            TokenKind::Ident(s) => write!(f, "ident:{s}"),
            TokenKind::Int(i) => write!(f, "int:{i}"),
            TokenKind::Str(s) => write!(f, "str:{s:?}"),
            TokenKind::LBrace => f.write_str("lbrace"),
            TokenKind::RBrace => f.write_str("rbrace"),
            TokenKind::LParen => f.write_str("lparen"),
            TokenKind::RParen => f.write_str("rparen"),
            TokenKind::Semi => f.write_str("semi"),
            TokenKind::Comma => f.write_str("comma"),
            TokenKind::Error(m) => write!(f, "error:{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexToken {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }
}

/// Splits source text into tokens. Whitespace and `#` comments are skipped;
/// characters outside the language become [`TokenKind::Error`] tokens.
pub fn tokenize(source: &str) -> Vec<LexToken> {
    let mut cur = Cursor {
        chars: source.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let span = |len: usize| SourceSpan::new(line, column, len);

        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '#' {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }

        let single = match c {
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            ';' => Some(TokenKind::Semi),
            ',' => Some(TokenKind::Comma),
            _ => None,
        };
        if let Some(kind) = single {
            cur.bump();
            out.push(LexToken { kind, span: span(1) });
            continue;
        }

        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            let len = word.len();
            let kind = match Keyword::from_ident(&word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word),
            };
            out.push(LexToken { kind, span: span(len) });
            continue;
        }

        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            let kind = match digits.parse::<u64>() {
                Ok(v) => TokenKind::Int(v),
                Err(_) => TokenKind::Error(format!("integer `{digits}` is too large")),
            };
            out.push(LexToken {
                kind,
                span: span(digits.len()),
            });
            continue;
        }

        if c == '"' {
            cur.bump();
            let mut text = String::new();
            let mut len = 1;
            let mut closed = false;
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
                len += 1;
                match c {
                    '"' => {
                        closed = true;
                        break;
                    }
                    '\\' => match cur.bump() {
                        Some(e @ ('"' | '\\')) => {
                            len += 1;
                            text.push(e);
                        }
                        Some('n') => {
                            len += 1;
                            text.push('\n');
                        }
                        Some(other) => {
                            len += 1;
                            text.push('\\');
                            text.push(other);
                        }
                        None => break,
                    },
                    c => text.push(c),
                }
            }
            let kind = if closed {
                TokenKind::Str(text)
            } else {
                TokenKind::Error("unterminated string".into())
            };
            out.push(LexToken { kind, span: span(len) });
            continue;
        }

        cur.bump();
        out.push(LexToken {
            kind: TokenKind::Error(format!("unexpected character `{c}`")),
            span: span(1),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<String> {
        tokenize(src).iter().map(|t| t.kind.to_string()).collect()
    }

    #[test]
    fn basic_net() {
        assert_eq!(kinds("net A {}"), ["kw:net", "ident:A", "lbrace", "rbrace"]);
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(
            kinds("# comment\nnet A {}"),
            ["kw:net", "ident:A", "lbrace", "rbrace"]
        );
    }

    #[test]
    fn unknown_character_is_an_error_token() {
        let toks = tokenize("net @");
        assert_eq!(toks.len(), 2);
        assert!(matches!(toks[1].kind, TokenKind::Error(_)));
        assert_eq!(toks[1].span, SourceSpan::new(1, 5, 1));
    }

    #[test]
    fn strings_ints_and_spans() {
        let toks = tokenize("label 0 \"t2\u{2228}\";\n  x");
        assert_eq!(toks[1].kind, TokenKind::Int(0));
        assert_eq!(toks[2].kind, TokenKind::Str("t2\u{2228}".into()));
        assert_eq!(toks[2].span, SourceSpan::new(1, 9, 5));
        assert_eq!(toks[4].span, SourceSpan::new(2, 3, 1));
        assert!(matches!(tokenize("\"open").last().unwrap().kind, TokenKind::Error(_)));
    }

    #[test]
    fn identifier_rule() {
        assert!(is_identifier("b_1"));
        assert!(!is_identifier("net"));
        assert!(!is_identifier("1b"));
        assert!(!is_identifier("t2~"));
    }
}
