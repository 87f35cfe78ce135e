use thiserror::Error;

use super::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("unbalanced parentheses at byte {0}")]
    UnbalancedParens(usize),
    #[error("empty expression at byte {0}")]
    EmptyExpression(usize),
    #[error("unexpected input after a complete expression at byte {0}")]
    DanglingInput(usize),
    #[error("unterminated quoted text starting at byte {0}")]
    UnterminatedString(usize),
    #[error("functor at byte {0} must be a bare atom")]
    InvalidFunctor(usize),
    #[error("compound at byte {0} has a functor but no arguments")]
    NullaryCompound(usize),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Text(String),
    Bare(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                tokens.push((pos, Token::Open));
            }
            ')' => {
                chars.next();
                tokens.push((pos, Token::Close));
            }
            '\'' => {
                chars.next();
                let mut value = String::new();
                let mut closed = false;
                while let Some((_, c)) = chars.next() {
                    match c {
                        '\\' => match chars.next() {
                            Some((_, escaped)) => value.push(escaped),
                            None => break,
                        },
                        '\'' => {
                            closed = true;
                            break;
                        }
                        c => value.push(c),
                    }
                }
                if !closed {
                    return Err(ParseError::UnterminatedString(pos));
                }
                tokens.push((pos, Token::Text(value)));
            }
            _ => {
                let mut word = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '\'') {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                tokens.push((pos, Token::Bare(word)));
            }
        }
    }
    Ok(tokens)
}

fn bare_to_term(word: &str) -> Term {
    if let Some(name) = word.strip_prefix('?') {
        Term::Variable(name.to_string())
    } else if let Ok(n) = word.parse::<i64>() {
        Term::Integer(n)
    } else {
        Term::Atom(word.to_string())
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn next_term(&mut self) -> Result<Term, ParseError> {
        let Some((at, token)) = self.tokens.get(self.pos).cloned() else {
            return Err(ParseError::EmptyExpression(self.end));
        };
        self.pos += 1;
        match token {
            Token::Close => Err(ParseError::UnbalancedParens(at)),
            Token::Text(s) => Ok(Term::Text(s)),
            Token::Bare(w) => Ok(bare_to_term(&w)),
            Token::Open => {
                let functor = match self.tokens.get(self.pos) {
                    None => return Err(ParseError::UnbalancedParens(at)),
                    Some((close_at, Token::Close)) => return Err(ParseError::EmptyExpression(*close_at)),
                    Some((f_at, Token::Bare(w))) => match bare_to_term(w) {
                        Term::Atom(name) => name,
                        _ => return Err(ParseError::InvalidFunctor(*f_at)),
                    },
                    Some((f_at, _)) => return Err(ParseError::InvalidFunctor(*f_at)),
                };
                self.pos += 1;
                let mut args = Vec::new();
                loop {
                    match self.tokens.get(self.pos) {
                        None => return Err(ParseError::UnbalancedParens(at)),
                        Some((_, Token::Close)) => {
                            self.pos += 1;
                            break;
                        }
                        Some(_) => args.push(self.next_term()?),
                    }
                }
                if args.is_empty() {
                    return Err(ParseError::NullaryCompound(at));
                }
                Ok(Term::Compound { functor, args })
            }
        }
    }
}

/// Parses exactly one s-expression.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let term = parser.next_term()?;
    if let Some((at, token)) = parser.tokens.get(parser.pos) {
        return Err(match token {
            Token::Close => ParseError::UnbalancedParens(*at),
            _ => ParseError::DanglingInput(*at),
        });
    }
    Ok(term)
}

/// Parses a whitespace-separated sequence of s-expressions.
pub fn parse_terms(text: &str) -> Result<Vec<Term>, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let mut out = Vec::new();
    while parser.pos < parser.tokens.len() {
        out.push(parser.next_term()?);
    }
    Ok(out)
}
