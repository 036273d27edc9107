use super::DslError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(f64),
    Tilde,
    LParen,
    RParen,
    Comma,
    Eq,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(v) => format!("number `{v}`"),
            Tok::Tilde => "`~`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

/// Splits source into tokens. Newlines inside parentheses are dropped so
/// long expressions may wrap; `#` starts a comment running to end of line.
pub fn tokenize(src: &str) -> Result<Vec<Token>, DslError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    let mut depth = 0usize;

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        match c {
            '\n' => {
                if depth == 0 {
                    out.push(Token { tok: Tok::Newline, pos });
                }
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            ' ' | '\t' | '\r' => {}
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                out.push(Token { tok: Tok::Ident(word), pos });
                continue;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        while j < chars.len() && chars[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                col += i - start;
                let value = text.parse::<f64>().map_err(|_| DslError::Parse {
                    line: pos.line,
                    col: pos.col,
                    expected: vec!["number".into()],
                    found: format!("`{text}`"),
                })?;
                out.push(Token { tok: Tok::Number(value), pos });
                continue;
            }
            '(' => {
                depth += 1;
                out.push(Token { tok: Tok::LParen, pos });
            }
            ')' => {
                depth = depth.saturating_sub(1);
                out.push(Token { tok: Tok::RParen, pos });
            }
            '~' => out.push(Token { tok: Tok::Tilde, pos }),
            ',' => out.push(Token { tok: Tok::Comma, pos }),
            '=' => out.push(Token { tok: Tok::Eq, pos }),
            '+' => out.push(Token { tok: Tok::Plus, pos }),
            '-' => out.push(Token { tok: Tok::Minus, pos }),
            '*' => out.push(Token { tok: Tok::Star, pos }),
            '/' => out.push(Token { tok: Tok::Slash, pos }),
            '^' => out.push(Token { tok: Tok::Caret, pos }),
            other => {
                return Err(DslError::Parse {
                    line,
                    col,
                    expected: vec!["token".into()],
                    found: format!("character `{other}`"),
                })
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers() {
        assert_eq!(
            toks("1 2.5 .5 1e-3 19.62 3E2"),
            vec![
                Tok::Number(1.0),
                Tok::Number(2.5),
                Tok::Number(0.5),
                Tok::Number(1e-3),
                Tok::Number(19.62),
                Tok::Number(300.0),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_wrapped_lines() {
        let t = toks("x = (a +\n b) # note\ny = 1");
        assert_eq!(t.iter().filter(|t| **t == Tok::Newline).count(), 1);
    }

    #[test]
    fn positions() {
        let t = tokenize("a\n  bc").unwrap();
        assert_eq!(t[2].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn bad_character() {
        assert!(matches!(tokenize("a = $"), Err(DslError::Parse { line: 1, col: 5, .. })));
    }
}
