//! Hand-written lexer for the extended OpenQASM 3 subset.

use crate::diag::{Diagnostic, SourceLocation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    IntLiteral,
    FloatLiteral,
    StringLiteral,
    Punct,
    Operator,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub loc: SourceLocation,
}

impl Token {
    pub fn is(&self, text: &str) -> bool {
        self.text == text && self.kind != TokenKind::StringLiteral
    }
}

const KEYWORDS: &[&str] = &[
    "OPENQASM", "include", "const", "qubit", "bit", "int", "int64_t", "uint", "float", "double",
    "bool", "let", "def", "extern", "return", "if", "else", "for", "while", "in", "measure",
    "reset", "compute", "action", "ctrl", "inv", "pow", "print",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn loc(&self) -> SourceLocation {
        SourceLocation::new(self.line, self.col, self.pos)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek2(&self) -> Option<u8> {
        self.src.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 0;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.peek2() == Some(b'/') => {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                Some(b'/') if self.peek2() == Some(b'*') => {
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek() {
                            None => break,
                            Some(b'*') if self.peek2() == Some(b'/') => {
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
                _ => break,
            }
        }
    }
}

/// Split source text into tokens. Comments and whitespace are discarded.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut lx = Lexer {
        src: source.as_bytes(),
        pos: 0,
        line: 1,
        col: 0,
    };
    let mut out = Vec::new();
    loop {
        lx.skip_trivia();
        let loc = lx.loc();
        let Some(c) = lx.peek() else {
            out.push(Token {
                kind: TokenKind::Eof,
                text: String::new(),
                loc,
            });
            return Ok(out);
        };
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = lx.pos;
            while let Some(c) = lx.peek() {
                if c.is_ascii_alphanumeric() || c == b'_' {
                    lx.bump();
                } else {
                    break;
                }
            }
            let text = source[start..lx.pos].to_string();
            let kind = if is_keyword(&text) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            out.push(Token { kind, text, loc });
        } else if c.is_ascii_digit() || (c == b'.' && lx.peek2().is_some_and(|d| d.is_ascii_digit()))
        {
            let start = lx.pos;
            let mut is_float = false;
            while let Some(c) = lx.peek() {
                if c.is_ascii_digit() {
                    lx.bump();
                } else if c == b'.' && !is_float {
                    is_float = true;
                    lx.bump();
                } else if (c == b'e' || c == b'E')
                    && lx
                        .peek2()
                        .is_some_and(|d| d.is_ascii_digit() || d == b'+' || d == b'-')
                {
                    is_float = true;
                    lx.bump();
                    if matches!(lx.peek(), Some(b'+') | Some(b'-')) {
                        lx.bump();
                    }
                } else {
                    break;
                }
            }
            out.push(Token {
                kind: if is_float {
                    TokenKind::FloatLiteral
                } else {
                    TokenKind::IntLiteral
                },
                text: source[start..lx.pos].to_string(),
                loc,
            });
        } else if c == b'"' {
            lx.bump();
            let start = lx.pos;
            loop {
                match lx.peek() {
                    None | Some(b'\n') => {
                        return Err(Diagnostic::error("unterminated string literal", loc));
                    }
                    Some(b'"') => break,
                    _ => {
                        lx.bump();
                    }
                }
            }
            let text = source[start..lx.pos].to_string();
            lx.bump();
            out.push(Token {
                kind: TokenKind::StringLiteral,
                text,
                loc,
            });
        } else {
            // Punctuation and operators, longest match first.
            let two: Option<&str> = source.get(lx.pos..lx.pos + 2);
            let op2 = matches!(
                two,
                Some("==" | "!=" | "<=" | ">=" | "&&" | "||" | "+=" | "-=" | "*=" | "/=" | "++" | "--" | "->")
            );
            if op2 {
                let text = two.unwrap().to_string();
                lx.bump();
                lx.bump();
                out.push(Token {
                    kind: TokenKind::Operator,
                    text,
                    loc,
                });
                continue;
            }
            match c {
                b'(' | b')' | b'[' | b']' | b'{' | b'}' | b';' | b',' | b':' => {
                    lx.bump();
                    out.push(Token {
                        kind: TokenKind::Punct,
                        text: (c as char).to_string(),
                        loc,
                    });
                }
                b'+' | b'-' | b'*' | b'/' | b'%' | b'<' | b'>' | b'=' | b'!' | b'@' => {
                    lx.bump();
                    out.push(Token {
                        kind: TokenKind::Operator,
                        text: (c as char).to_string(),
                        loc,
                    });
                }
                _ => {
                    return Err(Diagnostic::error(
                        format!("illegal character `{}`", c as char),
                        loc,
                    ));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .filter(|t| t.kind != TokenKind::Eof)
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn qubit_decl_lexemes() {
        let toks = kinds("qubit q[2];");
        assert_eq!(
            toks,
            vec![
                (TokenKind::Keyword, "qubit".into()),
                (TokenKind::Identifier, "q".into()),
                (TokenKind::Punct, "[".into()),
                (TokenKind::IntLiteral, "2".into()),
                (TokenKind::Punct, "]".into()),
                (TokenKind::Punct, ";".into()),
            ]
        );
    }

    #[test]
    fn comments_skipped_and_lines_tracked() {
        let toks = tokenize("// c\nx q;").unwrap();
        assert_eq!(toks[0].text, "x");
        assert_eq!(toks[0].loc.line, 2);
        assert_eq!(toks[0].loc.column, 0);
        assert_eq!(toks[1].text, "q");
        assert_eq!(toks[2].text, ";");
    }

    #[test]
    fn malformed_decl_lexes_fine() {
        // The error belongs to the parser, not the lexer.
        let toks = tokenize("qubit q[;").unwrap();
        assert_eq!(toks.len(), 5); // qubit q [ ; eof
    }

    #[test]
    fn unterminated_string_reports_location() {
        let err = tokenize("include \"oops").unwrap_err();
        assert!(err.message.contains("unterminated"));
        assert_eq!(err.loc.unwrap().column, 8);
    }

    #[test]
    fn float_forms() {
        let toks = kinds(".01 1.5 2e3 7");
        assert_eq!(toks[0].0, TokenKind::FloatLiteral);
        assert_eq!(toks[1].0, TokenKind::FloatLiteral);
        assert_eq!(toks[2].0, TokenKind::FloatLiteral);
        assert_eq!(toks[3].0, TokenKind::IntLiteral);
    }
}
