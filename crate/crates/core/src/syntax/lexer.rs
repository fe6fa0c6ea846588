use super::SyntaxError;

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Number(String),
    Turnstile,
    Comma,
    CorrComma(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Hash,
    Dot,
    Semi,
    Colon,
    Amp,
    Vee,
    Star,
    Eq,
    Neq,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Number(s) => format!("number `{s}`"),
            Tok::CorrComma(l) => format!("`,_{l}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Turnstile => "|-",
            Tok::Comma => ",",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Hash => "#",
            Tok::Dot => ".",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Amp => "&",
            Tok::Vee => "\\/",
            Tok::Star => "*",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            _ => "?",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '\'' || c == '^'
}

/// Tokenizes DSL text. Unicode spellings of the connectives are accepted
/// and mapped onto the ASCII tokens.
pub fn tokenize(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let push = |out: &mut Vec<Spanned>, tok, line, col| out.push(Spanned { tok, line, col });
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut adv = 1;
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '-' if chars.get(i + 1) == Some(&'-') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '|' if chars.get(i + 1) == Some(&'-') => {
                push(&mut out, Tok::Turnstile, l0, c0);
                adv = 2;
            }
            '\\' if chars.get(i + 1) == Some(&'/') => {
                push(&mut out, Tok::Vee, l0, c0);
                adv = 2;
            }
            '!' if chars.get(i + 1) == Some(&'=') => {
                push(&mut out, Tok::Neq, l0, c0);
                adv = 2;
            }
            ',' if chars.get(i + 1) == Some(&'_') && chars.get(i + 2).is_some_and(|c| is_ident_char(*c)) => {
                let mut j = i + 2;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                push(&mut out, Tok::CorrComma(chars[i + 2..j].iter().collect()), l0, c0);
                adv = j - i;
            }
            ',' => push(&mut out, Tok::Comma, l0, c0),
            '(' => push(&mut out, Tok::LParen, l0, c0),
            ')' => push(&mut out, Tok::RParen, l0, c0),
            '{' => push(&mut out, Tok::LBrace, l0, c0),
            '}' => push(&mut out, Tok::RBrace, l0, c0),
            '[' => push(&mut out, Tok::LBracket, l0, c0),
            ']' => push(&mut out, Tok::RBracket, l0, c0),
            '<' | '⟨' => push(&mut out, Tok::Lt, l0, c0),
            '>' | '⟩' => push(&mut out, Tok::Gt, l0, c0),
            '#' => push(&mut out, Tok::Hash, l0, c0),
            '.' => push(&mut out, Tok::Dot, l0, c0),
            ';' => push(&mut out, Tok::Semi, l0, c0),
            ':' => push(&mut out, Tok::Colon, l0, c0),
            '&' => push(&mut out, Tok::Amp, l0, c0),
            '*' | '∗' => push(&mut out, Tok::Star, l0, c0),
            '=' => push(&mut out, Tok::Eq, l0, c0),
            '⊢' => push(&mut out, Tok::Turnstile, l0, c0),
            '∨' => push(&mut out, Tok::Vee, l0, c0),
            '≠' => push(&mut out, Tok::Neq, l0, c0),
            '∀' => push(&mut out, Tok::Ident("forall".into()), l0, c0),
            '∃' => push(&mut out, Tok::Ident("exists".into()), l0, c0),
            '∈' => push(&mut out, Tok::Ident("in".into()), l0, c0),
            '⋈' => push(&mut out, Tok::Ident("bowtie".into()), l0, c0),
            '⊥' => push(&mut out, Tok::Ident("bot".into()), l0, c0),
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.' || chars[j] == '/') {
                    j += 1;
                }
                push(&mut out, Tok::Number(chars[i..j].iter().collect()), l0, c0);
                adv = j - i;
            }
            c if is_ident_start(c) => {
                let mut j = i;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let name: String = chars[i..j].iter().collect();
                let name = name.replace('Γ', "G").replace('Δ', "Delta");
                push(&mut out, Tok::Ident(name), l0, c0);
                adv = j - i;
            }
            other => return Err(SyntaxError::At { line: l0, col: c0, msg: format!("unexpected character `{other}`") }),
        }
        i += adv;
        col += adv;
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}
