//! Tokens of the interface language.

use super::FrontendError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    LBrace,
    RBrace,
    LParen,
    RParen,
    /// `(:`
    ChoiceOpen,
    /// `:)`
    ChoiceClose,
    Lt,
    Gt,
    Le,
    Comma,
    Bar,
    Colon,
    Semi,
    Number(u32),
    Up(String),
    Down(String),
    Ident(String),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Number(n) => format!("number {n}"),
            Tok::Up(v) => format!("`$^{v}`"),
            Tok::Down(v) => format!("`$_{v}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::ChoiceOpen => "(:",
            Tok::ChoiceClose => ":)",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Le => "<=",
            Tok::Comma => ",",
            Tok::Bar => "|",
            Tok::Colon => ":",
            Tok::Semi => ";",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `src` into tokens. Positions are 1-based and offset by `line0`
/// and `col0` on the first line so that embedded snippets report positions
/// in their host file.
pub(crate) fn tokenize_at(src: &str, line0: usize, col0: usize) -> Result<Vec<Token>, FrontendError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, line0, col0);
    let err = |line, col, msg: String| FrontendError::Parse { line, col, msg };

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        let (tl, tc) = (line, col);
        let mut push = |tok, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: tl, col: tc });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' if next == Some(':') => push(Tok::ChoiceOpen, 2, &mut i, &mut col),
            ':' if next == Some(')') => push(Tok::ChoiceClose, 2, &mut i, &mut col),
            '<' if next == Some('=') => push(Tok::Le, 2, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '<' => push(Tok::Lt, 1, &mut i, &mut col),
            '>' => push(Tok::Gt, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '|' => push(Tok::Bar, 1, &mut i, &mut col),
            ':' => push(Tok::Colon, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            '$' => {
                let up = match next {
                    Some('^') => true,
                    Some('_') => false,
                    _ => return Err(err(tl, tc, "expected `$^` or `$_`".into())),
                };
                let mut j = i + 2;
                if !chars.get(j).is_some_and(|&c| is_ident_start(c)) {
                    return Err(err(tl, tc, "expected a variable name".into()));
                }
                // namespaced names such as `read.rc`
                while j < chars.len()
                    && (is_ident_char(chars[j])
                        || (chars[j] == '.' && chars.get(j + 1).is_some_and(|&c| is_ident_start(c))))
                {
                    j += 1;
                }
                let name: String = chars[i + 2..j].iter().collect();
                let tok = if up { Tok::Up(name) } else { Tok::Down(name) };
                push(tok, j - i, &mut i, &mut col);
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                let n = text
                    .parse()
                    .map_err(|_| err(tl, tc, format!("number `{text}` out of range")))?;
                push(Tok::Number(n), j - i, &mut i, &mut col);
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                // an immediately following `<` opens a type-argument suffix
                if chars.get(j) == Some(&'<') && chars.get(j + 1) != Some(&'=') {
                    let mut depth = 0usize;
                    let mut k = j;
                    loop {
                        match chars.get(k) {
                            Some('<') => depth += 1,
                            Some('>') => {
                                depth -= 1;
                                if depth == 0 {
                                    k += 1;
                                    break;
                                }
                            }
                            Some(&c) if is_ident_char(c) || c == ',' || c == ' ' => {}
                            _ => return Err(err(tl, tc, "unbalanced `<` in symbol".into())),
                        }
                        k += 1;
                    }
                    j = k;
                }
                let text: String = chars[i..j].iter().collect();
                push(Tok::Ident(text), j - i, &mut i, &mut col);
            }
            other => return Err(err(tl, tc, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, FrontendError> {
    tokenize_at(src, 1, 1)
}
