use super::{ParseError, ParseErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Keyword(&'static str),
    Sym(&'static str),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Keyword(k) => format!("keyword `{k}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
        }
    }
}

pub const KEYWORDS: &[&str] = &[
    "type", "term", "red", "mu", "mu~", "not", "not+", "not-", "inl", "inr", "fst", "snd", "case", "Top",
    "Bot", "refl", "trans", "beta_mu", "beta_mu~", "beta_fst", "beta_snd", "beta_inl", "beta_inr",
    "beta_not", "cong_mu", "cong_mu~", "cong_cut", "cong_pair", "cong_inl", "cong_inr", "cong_fst",
    "cong_snd", "cong_case", "cong_not", "cong_not+", "cong_not-",
];

const SYMBOLS: &[&str] = &["/\\", "\\/", "(", ")", "[", "]", "<", ">", "|", ":", ",", ";", ".", "=", "+", "-", "#", "~"];

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\''
}

pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let advance = |i: &mut usize, line: &mut u32, col: &mut u32, n: usize, chars: &[char]| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1, &chars);
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1, &chars);
            }
            continue;
        }
        let pos = Pos { line, column: col };
        if is_ident_start(c) {
            let start = i;
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let mut word: String = chars[start..j].iter().collect();
            // keywords spelled with a trailing sign
            if let Some(&next) = chars.get(j) {
                let joined = format!("{word}{next}");
                if matches!(next, '~' | '+' | '-') && KEYWORDS.contains(&joined.as_str()) && chars.get(j + 1) != Some(&'-') {
                    word = joined;
                    j += 1;
                }
            }
            let tok = match KEYWORDS.iter().find(|k| **k == word) {
                Some(k) => Tok::Keyword(k),
                None => Tok::Ident(word),
            };
            advance(&mut i, &mut line, &mut col, j - start, &chars);
            out.push(Token { tok, pos });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                advance(&mut i, &mut line, &mut col, s.chars().count(), &chars);
                out.push(Token { tok: Tok::Sym(s), pos });
            }
            None => {
                return Err(ParseError {
                    line,
                    column: col,
                    message: format!("unexpected character {c:?}"),
                    expected: Vec::new(),
                    kind: ParseErrorKind::Lex,
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, pos: Pos { line, column: col } });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn signed_keywords() {
        assert_eq!(
            toks("mu~ x not+ not- cong_not+ beta_mu~"),
            vec![
                Tok::Keyword("mu~"),
                Tok::Ident("x".into()),
                Tok::Keyword("not+"),
                Tok::Keyword("not-"),
                Tok::Keyword("cong_not+"),
                Tok::Keyword("beta_mu~"),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_and_positions() {
        let t = lex("-- hello\n  x /\\ y").unwrap();
        assert_eq!(t[0].tok, Tok::Ident("x".into()));
        assert_eq!((t[0].pos.line, t[0].pos.column), (2, 3));
        assert_eq!(t[1].tok, Tok::Sym("/\\"));
    }

    #[test]
    fn negative_judgment_is_not_a_comment() {
        assert_eq!(toks("-A"), vec![Tok::Sym("-"), Tok::Ident("A".into()), Tok::Eof]);
    }

    #[test]
    fn stray_character() {
        let e = lex("x @ y").unwrap_err();
        assert_eq!((e.line, e.column), (1, 3));
    }
}
