use super::ast::{Logic, Span};
use super::error::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Eventually,
    Always,
    Until,
    Not,
    And,
    Or,
    Caret,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Gt,
    Ge,
    Lt,
    Le,
    /// `=` or `==`; lexed so the parser can reject equality with a precise message.
    Equal,
    True,
    False,
    /// A numeric literal; `integer` is set when the text is a plain digit string.
    Number {
        value: f64,
        integer: Option<u64>,
    },
    Ident(String),
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Eventually => "`F`".into(),
            Tok::Always => "`G`".into(),
            Tok::Until => "`U`".into(),
            Tok::Not => "`!`".into(),
            Tok::And => "`&&`".into(),
            Tok::Or => "`||`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Equal => "`=`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::Number { value, .. } => format!("number {value}"),
            Tok::Ident(name) => format!("identifier `{name}`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

/// Splits `text` into tokens. The weight marker `^` is only recognized for weighted STL.
pub fn tokenize(text: &str, logic: Logic) -> Result<Vec<Token>, SyntaxError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let next = bytes.get(i + 1).copied();
        let (tok, len) = match c {
            b'[' if next == Some(b']') => (Tok::Always, 2),
            b'[' => (Tok::LBracket, 1),
            b']' => (Tok::RBracket, 1),
            b'(' => (Tok::LParen, 1),
            b')' => (Tok::RParen, 1),
            b',' => (Tok::Comma, 1),
            b'<' if next == Some(b'>') => (Tok::Eventually, 2),
            b'<' if next == Some(b'=') => (Tok::Le, 2),
            b'<' => (Tok::Lt, 1),
            b'>' if next == Some(b'=') => (Tok::Ge, 2),
            b'>' => (Tok::Gt, 1),
            b'=' if next == Some(b'=') => (Tok::Equal, 2),
            b'=' => (Tok::Equal, 1),
            b'!' | b'~' => (Tok::Not, 1),
            b'&' if next == Some(b'&') => (Tok::And, 2),
            b'&' => (Tok::And, 1),
            b'|' if next == Some(b'|') => (Tok::Or, 2),
            b'|' => (Tok::Or, 1),
            b'^' if logic == Logic::Wstl => (Tok::Caret, 1),
            b'0'..=b'9' | b'-' | b'.' => lex_number(text, i)?,
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                let tok = match word {
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    "U" => Tok::Until,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word.to_string()),
                };
                (tok, j - i)
            }
            _ => {
                let found = text[i..].chars().next().unwrap_or('\u{fffd}');
                return Err(SyntaxError::Lex { offset: i, found });
            }
        };
        i += len;
        out.push(Token { tok, span: Span::new(start, i) });
    }
    Ok(out)
}

fn lex_number(text: &str, start: usize) -> Result<(Tok, usize), SyntaxError> {
    let bytes = text.as_bytes();
    let mut j = start;
    let digits = |j: &mut usize| {
        let s = *j;
        while *j < bytes.len() && bytes[*j].is_ascii_digit() {
            *j += 1;
        }
        *j - s
    };
    if bytes[j] == b'-' {
        j += 1;
    }
    let int_digits = digits(&mut j);
    let mut frac_digits = 0;
    let mut plain = bytes[start] != b'-';
    if j < bytes.len() && bytes[j] == b'.' {
        j += 1;
        frac_digits = digits(&mut j);
        plain = false;
    }
    if int_digits + frac_digits == 0 {
        let found = text[start..].chars().next().unwrap_or('\u{fffd}');
        return Err(SyntaxError::Lex { offset: start, found });
    }
    if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
        let mut k = j + 1;
        if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
            k += 1;
        }
        if digits(&mut k) > 0 {
            j = k;
            plain = false;
        }
    }
    let raw = &text[start..j];
    let value: f64 = raw.parse().map_err(|_| SyntaxError::Lex { offset: start, found: bytes[start] as char })?;
    let integer = if plain { raw.parse::<u64>().ok() } else { None };
    Ok((Tok::Number { value, integer }, j - start))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, Logic::Stl).unwrap().into_iter().map(|t| t.tok).collect()
    }

    fn int(v: u64) -> Tok {
        Tok::Number { value: v as f64, integer: Some(v) }
    }

    #[test]
    fn eventually_predicate() {
        assert_eq!(
            toks("F[0,4] s>2"),
            vec![
                Tok::Eventually,
                Tok::LBracket,
                int(0),
                Tok::Comma,
                int(4),
                Tok::RBracket,
                Tok::Ident("s".into()),
                Tok::Gt,
                int(2),
            ]
        );
    }

    #[test]
    fn empty_input() {
        assert!(toks("").is_empty());
        assert!(toks("   \t\n").is_empty());
    }

    #[test]
    fn invalid_character_offset() {
        let text = "F[0,4] s @ 2";
        let err = tokenize(text, Logic::Stl).unwrap_err();
        assert_eq!(err, SyntaxError::Lex { offset: text.find('@').unwrap(), found: '@' });
    }

    #[test]
    fn alternate_spellings() {
        assert_eq!(toks("<> [] ~ & |"), vec![Tok::Eventually, Tok::Always, Tok::Not, Tok::And, Tok::Or]);
        assert_eq!(toks("F G ! && ||"), vec![Tok::Eventually, Tok::Always, Tok::Not, Tok::And, Tok::Or]);
    }

    #[test]
    fn caret_only_in_weighted_logic() {
        assert!(tokenize("G^w[0,1] s>0", Logic::Stl).is_err());
        assert!(tokenize("G^w[0,1] s>0", Logic::Wstl).is_ok());
    }

    #[test]
    fn numbers() {
        assert_eq!(toks("-3.5"), vec![Tok::Number { value: -3.5, integer: None }]);
        assert_eq!(toks("1e2"), vec![Tok::Number { value: 100.0, integer: None }]);
        assert_eq!(toks("0.25"), vec![Tok::Number { value: 0.25, integer: None }]);
        assert!(tokenize("-x", Logic::Stl).is_err());
    }

    #[test]
    fn comparison_operators() {
        assert_eq!(toks("< <= > >= = =="), vec![Tok::Lt, Tok::Le, Tok::Gt, Tok::Ge, Tok::Equal, Tok::Equal]);
    }

    #[test]
    fn identifiers_are_not_keywords() {
        assert_eq!(
            toks("Foo FG s_1"),
            vec![Tok::Ident("Foo".into()), Tok::Ident("FG".into()), Tok::Ident("s_1".into())]
        );
    }
}
