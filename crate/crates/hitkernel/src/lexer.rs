//! Lexer for the surface language. Comments run from `--` to end of
//! line; unknown characters are lexing errors with a span.

use crate::diag::{codes, DiagResult, Diagnostic};
use crate::span::{FileId, Span};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokKind {
    Ident,
    NatLit(u64),
    Keyword(Keyword),
    Directive(Directive),
    LParen,
    RParen,
    Colon,
    ColonEq,
    Arrow,
    FatArrow,
    Star,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Def,
    Axiom,
    Import,
    Fun,
    Let,
    In,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Directive {
    Check,
    Normalize,
    AssertDefeq,
    AssertType,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokKind,
    pub lexeme: String,
    pub span: Span,
}

struct Lexer<'s> {
    src: &'s str,
    chars: std::str::CharIndices<'s>,
    peeked: Option<(usize, char)>,
    #[allow(dead_code)]
    file: FileId,
    line: u32,
    col: u32,
}

impl<'s> Lexer<'s> {
    fn new(file: FileId, src: &'s str) -> Lexer<'s> {
        Lexer { src, chars: src.char_indices(), peeked: None, file, line: 1, col: 1 }
    }

    fn peek(&mut self) -> Option<(usize, char)> {
        if self.peeked.is_none() {
            self.peeked = self.chars.next();
        }
        self.peeked
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.peek()?;
        self.peeked = None;
        if next.1 == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(next)
    }

    fn pos(&mut self) -> (u32, u32) {
        (self.line, self.col)
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(file: FileId, source: &str) -> DiagResult<Vec<Token>> {
    let mut lx = Lexer::new(file, source);
    let mut out = Vec::new();
    loop {
        // skip whitespace and comments
        loop {
            match lx.peek() {
                Some((_, c)) if c.is_whitespace() => {
                    lx.bump();
                }
                Some((i, '-')) if lx.src[i..].starts_with("--") => {
                    while let Some((_, c)) = lx.peek() {
                        if c == '\n' {
                            break;
                        }
                        lx.bump();
                    }
                }
                _ => break,
            }
        }
        let start = lx.pos();
        let (i, c) = match lx.bump() {
            Some(x) => x,
            None => break,
        };
        let single = |lx: &mut Lexer<'_>, kind: TokKind, text: &str| Token {
            kind,
            lexeme: text.to_owned(),
            span: Span::new(file, start, lx.pos()),
        };
        match c {
            '(' => out.push(single(&mut lx, TokKind::LParen, "(")),
            ')' => out.push(single(&mut lx, TokKind::RParen, ")")),
            '*' => out.push(single(&mut lx, TokKind::Star, "*")),
            ':' => {
                if matches!(lx.peek(), Some((_, '='))) {
                    lx.bump();
                    out.push(single(&mut lx, TokKind::ColonEq, ":="));
                } else {
                    out.push(single(&mut lx, TokKind::Colon, ":"));
                }
            }
            '-' => {
                if matches!(lx.peek(), Some((_, '>'))) {
                    lx.bump();
                    out.push(single(&mut lx, TokKind::Arrow, "->"));
                } else {
                    return Err(Diagnostic::error(
                        codes::LEX,
                        "stray `-`; expected `->` or a `--` comment",
                        Span::new(file, start, lx.pos()),
                    ));
                }
            }
            '=' => {
                if matches!(lx.peek(), Some((_, '>'))) {
                    lx.bump();
                    out.push(single(&mut lx, TokKind::FatArrow, "=>"));
                } else {
                    return Err(Diagnostic::error(
                        codes::LEX,
                        "stray `=`; expected `=>`",
                        Span::new(file, start, lx.pos()),
                    ));
                }
            }
            '#' => {
                let word_start = i + 1;
                let mut end = word_start;
                while let Some((j, c)) = lx.peek() {
                    if is_ident_continue(c) {
                        end = j + c.len_utf8();
                        lx.bump();
                    } else {
                        break;
                    }
                }
                let word = &lx.src[word_start..end];
                let dir = match word {
                    "check" => Directive::Check,
                    "normalize" => Directive::Normalize,
                    "assert_defeq" => Directive::AssertDefeq,
                    "assert_type" => Directive::AssertType,
                    other => {
                        return Err(Diagnostic::error(
                            codes::LEX,
                            format!("unknown directive `#{other}`"),
                            Span::new(file, start, lx.pos()),
                        ))
                    }
                };
                out.push(Token {
                    kind: TokKind::Directive(dir),
                    lexeme: format!("#{word}"),
                    span: Span::new(file, start, lx.pos()),
                });
            }
            c if c.is_ascii_digit() => {
                let num_start = i;
                let mut end = i + 1;
                while let Some((j, c)) = lx.peek() {
                    if c.is_ascii_digit() {
                        end = j + 1;
                        lx.bump();
                    } else {
                        break;
                    }
                }
                let text = &lx.src[num_start..end];
                let value: u64 = text.parse().map_err(|_| {
                    Diagnostic::error(
                        codes::LEX,
                        format!("numeral `{text}` is too large"),
                        Span::new(file, start, lx.pos()),
                    )
                })?;
                out.push(Token {
                    kind: TokKind::NatLit(value),
                    lexeme: text.to_owned(),
                    span: Span::new(file, start, lx.pos()),
                });
            }
            c if is_ident_start(c) => {
                let id_start = i;
                let mut end = i + c.len_utf8();
                while let Some((j, c)) = lx.peek() {
                    if is_ident_continue(c) {
                        end = j + c.len_utf8();
                        lx.bump();
                    } else {
                        break;
                    }
                }
                let text = &lx.src[id_start..end];
                let kind = match text {
                    "def" => TokKind::Keyword(Keyword::Def),
                    "axiom" => TokKind::Keyword(Keyword::Axiom),
                    "import" => TokKind::Keyword(Keyword::Import),
                    "fun" => TokKind::Keyword(Keyword::Fun),
                    "let" => TokKind::Keyword(Keyword::Let),
                    "in" => TokKind::Keyword(Keyword::In),
                    _ => TokKind::Ident,
                };
                out.push(Token {
                    kind,
                    lexeme: text.to_owned(),
                    span: Span::new(file, start, lx.pos()),
                });
            }
            other => {
                return Err(Diagnostic::error(
                    codes::LEX,
                    format!("unexpected character `{other}`"),
                    Span::new(file, start, lx.pos()),
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(src: &str) -> usize {
        lex(FileId(0), src).unwrap().len()
    }

    #[test]
    fn token_count_of_identity_definition() {
        // counted by hand against the grammar: def | id | : | Nat | -> |
        // Nat | := | fun | ( | x | : | Nat | ) | => | x
        assert_eq!(count("def id : Nat -> Nat := fun (x : Nat) => x"), 15);
    }

    #[test]
    fn comments_lex_to_nothing() {
        assert_eq!(count("-- comment\n"), 0);
        assert_eq!(count("-- one\n-- two"), 0);
    }

    #[test]
    fn unknown_character_is_a_lex_error() {
        let err = lex(FileId(0), "\u{22a5}").unwrap_err();
        assert_eq!(err.code, codes::LEX);
    }

    #[test]
    fn spans_are_one_based_and_contiguous(){
        let toks = lex(FileId(0), "def x").unwrap();
        assert_eq!(toks[0].span.start_line, 1);
        assert_eq!(toks[0].span.start_col, 1);
        assert_eq!(toks[0].span.end_col, 4);
        assert_eq!(toks[1].span.start_col, 5);
    }
}
