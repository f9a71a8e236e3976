use alloc::string::String;
use alloc::vec::Vec;

use super::Diagnostic;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
    Ge,
    Eq,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn describe(kind: &TokenKind) -> String {
    use alloc::format;
    match kind {
        TokenKind::Ident(s) => format!("'{s}'"),
        TokenKind::Number(n) => format!("number {n}"),
        TokenKind::LParen => "'('".into(),
        TokenKind::RParen => "')'".into(),
        TokenKind::Comma => "','".into(),
        TokenKind::Ge => "'>='".into(),
        TokenKind::Eq => "'='".into(),
        TokenKind::Eof => "end of input".into(),
    }
}

/// Splits source into tokens. Lexical errors are collected and the
/// offending character skipped, so later diagnostics still surface.
pub(crate) fn tokenize(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut tokens = Vec::new();
    let mut diags = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let mut push = |kind| tokens.push(Token { kind, line: start_line, column: start_col });
        match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    column += 1;
                }
                continue;
            }
            '(' => push(TokenKind::LParen),
            ')' => push(TokenKind::RParen),
            ',' => push(TokenKind::Comma),
            '=' => push(TokenKind::Eq),
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(TokenKind::Ge);
                    i += 2;
                    column += 2;
                    continue;
                }
                diags.push(Diagnostic::new(start_line, start_col, "expected '>=' after '>'"));
            }
            c if c.is_ascii_digit() => {
                let begin = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if chars.get(i) == Some(&'.') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let text: String = chars[begin..i].iter().collect();
                column += i - begin;
                match text.parse::<f64>() {
                    Ok(n) => push(TokenKind::Number(n)),
                    Err(_) => diags.push(Diagnostic::new(start_line, start_col, "malformed number")),
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let begin = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                column += i - begin;
                push(TokenKind::Ident(chars[begin..i].iter().collect()));
                continue;
            }
            other => {
                diags.push(Diagnostic::new(
                    start_line,
                    start_col,
                    alloc::format!("unexpected character '{other}'"),
                ));
            }
        }
        i += 1;
        column += 1;
    }
    tokens.push(Token { kind: TokenKind::Eof, line, column });
    (tokens, diags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).0.into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn number_with_unit_suffix() {
        assert_eq!(
            kinds("30s, 1.5km"),
            [
                TokenKind::Number(30.0),
                TokenKind::Ident("s".into()),
                TokenKind::Comma,
                TokenKind::Number(1.5),
                TokenKind::Ident("km".into()),
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn positions_are_one_based() {
        let (toks, _) = tokenize("fluent a\n  initiate");
        assert_eq!((toks[0].line, toks[0].column), (1, 1));
        assert_eq!((toks[1].line, toks[1].column), (1, 8));
        assert_eq!((toks[2].line, toks[2].column), (2, 3));
    }

    #[test]
    fn comments_are_skipped() {
        assert_eq!(kinds("# nothing here\n# (\n"), [TokenKind::Eof]);
    }

    #[test]
    fn bad_characters_are_reported() {
        let (_, diags) = tokenize("fluent a\ninitiate a when x; y");
        assert_eq!(diags.len(), 1);
        assert_eq!((diags[0].line, diags[0].column), (2, 18));
    }
}
