use super::{PeripheralSubgroup, Presentation};
use crate::error::{Error, Result};
use crate::word::Word;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Caret,
    Eq,
    Comma,
    Semi,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let content = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = content.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let single = match c {
                '^' => Some(Tok::Caret),
                '=' => Some(Tok::Eq),
                ',' => Some(Tok::Comma),
                ';' => Some(Tok::Semi),
                _ => None,
            };
            if let Some(tok) = single {
                out.push(Spanned { tok, line, column });
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() || c == '-' || c == '+' {
                let start = i;
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let v = s
                    .parse::<i64>()
                    .map_err(|_| syntax(line, column, format!("bad integer `{s}`")))?;
                out.push(Spanned {
                    tok: Tok::Int(v),
                    line,
                    column,
                });
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line,
                    column,
                });
            } else {
                return Err(syntax(line, column, format!("unexpected character `{c}`")));
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|s| (s.line, s.column)).unwrap_or(self.end)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        let (l, c) = self.here();
        syntax(l, c, msg)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(s) if s.tok == tok => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err(format!("expected {what}"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek().map(|s| s.tok.clone()) {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("expected a name")),
        }
    }

    /// `<gen>` / `<gen>^<int>` tokens (or a lone `1`) up to a delimiter.
    fn word(&mut self, gens: &[String]) -> Result<Word> {
        let mut w = Word::identity();
        while let Some(s) = self.peek().cloned() {
            match s.tok {
                Tok::Ident(name) => {
                    self.pos += 1;
                    let g = gens
                        .iter()
                        .position(|x| *x == name)
                        .ok_or(Error::UndeclaredGenerator(name))?;
                    let mut e = 1;
                    if matches!(self.peek().map(|t| &t.tok), Some(Tok::Caret)) {
                        self.pos += 1;
                        match self.peek().map(|t| t.tok.clone()) {
                            Some(Tok::Int(v)) => {
                                self.pos += 1;
                                e = v;
                            }
                            _ => return Err(self.err("expected an integer exponent")),
                        }
                    }
                    w.push(g, e);
                }
                Tok::Int(1) => self.pos += 1,
                Tok::Int(_) => return Err(self.err("unexpected integer")),
                _ => break,
            }
        }
        Ok(w)
    }
}

fn parser_for(text: &str) -> Result<Parser> {
    let toks = tokenize(text)?;
    let end = text
        .lines()
        .enumerate()
        .last()
        .map(|(i, l)| (i + 1, l.chars().count() + 1))
        .unwrap_or((1, 1));
    Ok(Parser { toks, pos: 0, end })
}

/// Parses the presentation-file grammar:
/// `gens <name>+ ;` then `rel <word> ;`* then `peripheral <name> = <word> , <word> ;`*.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut p = parser_for(text)?;
    match p.ident() {
        Ok(kw) if kw == "gens" => {}
        _ => {
            p.pos = 0;
            return Err(p.err("presentation must start with `gens`"));
        }
    }
    let mut gens = Vec::new();
    while let Some(Tok::Ident(_)) = p.peek().map(|s| &s.tok) {
        let g = p.ident()?;
        if gens.contains(&g) {
            return Err(Error::DuplicateGenerator(g));
        }
        gens.push(g);
    }
    if gens.is_empty() {
        return Err(p.err("`gens` needs at least one generator"));
    }
    p.expect(Tok::Semi, "`;`")?;

    let mut relators = Vec::new();
    let mut peripherals = Vec::new();
    while p.peek().is_some() {
        let kw = p.ident()?;
        match kw.as_str() {
            "rel" if peripherals.is_empty() => {
                relators.push(p.word(&gens)?);
                p.expect(Tok::Semi, "`;`")?;
            }
            "peripheral" => {
                let name = p.ident()?;
                p.expect(Tok::Eq, "`=`")?;
                let mu = p.word(&gens)?;
                p.expect(Tok::Comma, "`,`")?;
                let lambda = p.word(&gens)?;
                p.expect(Tok::Semi, "`;`")?;
                peripherals.push(PeripheralSubgroup { name, mu, lambda });
            }
            other => {
                p.pos -= 1;
                return Err(p.err(format!("unexpected `{other}`")));
            }
        }
    }
    let pres = Presentation {
        generators: gens,
        relators,
        peripherals,
    };
    pres.validate()?;
    Ok(pres)
}

pub(crate) fn parse_word_tokens(pres: &Presentation, text: &str) -> Result<Word> {
    let mut p = parser_for(text)?;
    let w = p.word(&pres.generators)?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after word"));
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klein_bottle_text() {
        let p = parse_presentation("gens x y; rel x y x^-1 y;").unwrap();
        assert_eq!(p.generators, vec!["x", "y"]);
        assert_eq!(p.relators[0].syllables(), &[(0, 1), (1, 1), (0, -1), (1, 1)]);
    }

    #[test]
    fn free_rank_one() {
        let p = parse_presentation("gens a;").unwrap();
        assert_eq!(p.rank(), 1);
        assert!(p.relators.is_empty());
    }

    #[test]
    fn trefoil_text_with_comment_and_peripheral() {
        let text = "# trefoil\ngens u v;\nrel u^2 v^-3;  # u^2 = v^3\nperipheral T = u v^-1, u^2 v u^-1 v u^-1 v u^-1 v u^-1 v u^-1 v u^-1;\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.relators[0].syllables(), &[(0, 2), (1, -3)]);
        assert_eq!(p.peripherals[0].name, "T");
        assert_eq!(p.peripherals[0].mu.syllables(), &[(0, 1), (1, -1)]);
    }

    #[test]
    fn errors_carry_positions() {
        match parse_presentation("gens x;\nrel x y;") {
            Err(Error::UndeclaredGenerator(g)) => assert_eq!(g, "y"),
            other => panic!("{other:?}"),
        }
        match parse_presentation("gens x;\nrel x^ ;") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 8)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_presentation("rel x;"),
            Err(Error::Syntax { line: 1, column: 1, .. })
        ));
        assert!(matches!(
            parse_presentation("gens x x;"),
            Err(Error::DuplicateGenerator(_))
        ));
        assert!(matches!(
            parse_presentation("gens x; peripheral T = x, z;"),
            Err(Error::UndeclaredGenerator(_))
        ));
    }

    #[test]
    fn text_round_trip() {
        let text = "gens u v;\nrel u^2 v^-3;\nperipheral T = u v^-1, u^2;\n";
        let p = parse_presentation(text).unwrap();
        assert_eq!(p.to_text(), text);
        assert_eq!(parse_presentation(&p.to_text()).unwrap(), p);
    }
}
