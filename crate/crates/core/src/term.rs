//! Closed combinatory terms: the code universe shared by the partiality and
//! continuation tiers.
//!
//! Textual grammar: atoms `S K P FST SND CC Z0`, lowercase identifiers are
//! variables, juxtaposition is left-associative application and parentheses
//! group. Captured continuations (`Cont`) have no surface syntax; they only
//! arise inside the stack machine and print as `<cont:n>`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Atom {
    S,
    K,
    Pair,
    Fst,
    Snd,
    CC,
    /// The distinguished result constant; a process accepts iff it halts on it.
    Zero,
}

impl Atom {
    pub const ALL: [Atom; 7] = [
        Atom::S,
        Atom::K,
        Atom::Pair,
        Atom::Fst,
        Atom::Snd,
        Atom::CC,
        Atom::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Atom::S => "S",
            Atom::K => "K",
            Atom::Pair => "P",
            Atom::Fst => "FST",
            Atom::Snd => "SND",
            Atom::CC => "CC",
            Atom::Zero => "Z0",
        }
    }

    pub fn from_name(s: &str) -> Option<Atom> {
        Atom::ALL.into_iter().find(|a| a.name() == s)
    }
}

/// A continuation captured by `CC`: the argument stack (top last) together
/// with the return continuation that was active at capture time.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Captured {
    pub stack: Vec<Term>,
    pub ret: Option<Term>,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Atom(Atom),
    Cont(Arc<Captured>),
    Var(Arc<str>),
    App(Arc<Term>, Arc<Term>),
}

pub const S: Term = Term::Atom(Atom::S);
pub const K: Term = Term::Atom(Atom::K);

impl Term {
    pub fn atom(a: Atom) -> Term {
        Term::Atom(a)
    }

    pub fn var(name: &str) -> Term {
        Term::Var(Arc::from(name))
    }

    pub fn app(f: Term, x: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(x))
    }

    /// Left-nested application `head a1 a2 ...`.
    pub fn apply_all<I: IntoIterator<Item = Term>>(head: Term, args: I) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn cont(stack: Vec<Term>, ret: Option<Term>) -> Term {
        Term::Cont(Arc::new(Captured { stack, ret }))
    }

    /// `S K K`.
    pub fn identity() -> Term {
        Term::apply_all(S, [K, K])
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Atom(_) | Term::Cont(_) => true,
            Term::App(f, x) => f.is_closed() && x.is_closed(),
        }
    }

    pub fn occurs(&self, name: &str) -> bool {
        match self {
            Term::Var(v) => &**v == name,
            Term::Atom(_) | Term::Cont(_) => false,
            Term::App(f, x) => f.occurs(name) || x.occurs(name),
        }
    }

    pub fn contains_cont(&self) -> bool {
        match self {
            Term::Cont(_) => true,
            Term::Atom(_) | Term::Var(_) => false,
            Term::App(f, x) => f.contains_cont() || x.contains_cont(),
        }
    }

    /// Number of leaves.
    pub fn size(&self) -> usize {
        match self {
            Term::App(f, x) => f.size() + x.size(),
            _ => 1,
        }
    }

    pub fn substitute(&self, name: &str, value: &Term) -> Term {
        match self {
            Term::Var(v) if &**v == name => value.clone(),
            Term::App(f, x) => Term::app(f.substitute(name, value), x.substitute(name, value)),
            _ => self.clone(),
        }
    }

    /// Splits `h a1 ... an` into `(h, [a1, ..., an])`.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut head = self;
        let mut args = Vec::new();
        while let Term::App(f, x) = head {
            args.push(&**x);
            head = f;
        }
        args.reverse();
        (head, args)
    }
}

/// Bracket abstraction `λ*var.body`:
/// `λ*x.x = S K K`, `λ*x.M = K M` when `x ∉ FV(M)`,
/// `λ*x.(M N) = S (λ*x.M) (λ*x.N)`.
pub fn abstract_var(var: &str, body: &Term) -> Term {
    match body {
        Term::Var(v) if &**v == var => Term::identity(),
        _ if !body.occurs(var) => Term::app(K, body.clone()),
        Term::App(f, x) => Term::apply_all(S, [abstract_var(var, f), abstract_var(var, x)]),
        _ => unreachable!("a leaf containing the variable is the variable itself"),
    }
}

/// Abstracts several variables, outermost first: `λ*x.λ*y.body`.
pub fn abstract_vars(vars: &[&str], body: &Term) -> Term {
    vars.iter()
        .rev()
        .fold(body.clone(), |acc, v| abstract_var(v, &acc))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unexpected character {found:?} at position {pos}")]
    UnexpectedChar { pos: usize, found: char },
    #[error("unknown atom {name:?} at position {pos}")]
    UnknownAtom { pos: usize, name: String },
    #[error("unbalanced parenthesis at position {pos}")]
    Unbalanced { pos: usize },
    #[error("empty term at position {pos}")]
    Empty { pos: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Open,
    Close,
    Word(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            out.push((pos, Token::Open));
        } else if c == ')' {
            chars.next();
            out.push((pos, Token::Close));
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let mut word = String::new();
            while let Some(&(_, d)) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    word.push(d);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push((pos, Token::Word(word)));
        } else {
            return Err(ParseError::UnexpectedChar { pos, found: c });
        }
    }
    Ok(out)
}

pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let tokens = tokenize(text)?;
    let mut idx = 0;
    let t = parse_seq(&tokens, &mut idx, text.len())?;
    if idx < tokens.len() {
        return Err(ParseError::Unbalanced { pos: tokens[idx].0 });
    }
    Ok(t)
}

fn parse_seq(tokens: &[(usize, Token)], idx: &mut usize, end: usize) -> Result<Term, ParseError> {
    let start = tokens.get(*idx).map_or(end, |t| t.0);
    let mut acc: Option<Term> = None;
    while let Some((pos, tok)) = tokens.get(*idx) {
        let item = match tok {
            Token::Close => break,
            Token::Open => {
                *idx += 1;
                let inner = parse_seq(tokens, idx, end)?;
                match tokens.get(*idx) {
                    Some((_, Token::Close)) => *idx += 1,
                    _ => return Err(ParseError::Unbalanced { pos: *pos }),
                }
                inner
            }
            Token::Word(w) => {
                *idx += 1;
                if let Some(a) = Atom::from_name(w) {
                    Term::Atom(a)
                } else if w.chars().next().is_some_and(|c| c.is_ascii_lowercase()) {
                    Term::var(w)
                } else {
                    return Err(ParseError::UnknownAtom {
                        pos: *pos,
                        name: w.clone(),
                    });
                }
            }
        };
        acc = Some(match acc {
            None => item,
            Some(f) => Term::app(f, item),
        });
    }
    acc.ok_or(ParseError::Empty { pos: start })
}

impl std::str::FromStr for Term {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

pub fn print_term(t: &Term) -> String {
    t.to_string()
}

fn fmt_term(t: &Term, f: &mut fmt::Formatter<'_>, arg_position: bool) -> fmt::Result {
    match t {
        Term::Atom(a) => f.write_str(a.name()),
        Term::Var(v) => f.write_str(v),
        Term::Cont(c) => write!(f, "<cont:{}>", c.stack.len()),
        Term::App(g, x) => {
            if arg_position {
                f.write_str("(")?;
            }
            fmt_term(g, f, false)?;
            f.write_str(" ")?;
            fmt_term(x, f, true)?;
            if arg_position {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, f, false)
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn parse_is_left_associative() {
        assert_eq!(p("S K K"), Term::app(Term::app(S, K), K));
        assert_eq!(p("(K (S K))"), Term::app(K, Term::app(S, K)));
    }

    #[test]
    fn print_round_trip() {
        assert_eq!(print_term(&p("S (K S) K")), "S (K S) K");
        assert_eq!(print_term(&p("P FST SND (CC Z0)")), "P FST SND (CC Z0)");
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_term("S (K"),
            Err(ParseError::Unbalanced { pos: 2 })
        );
        assert_eq!(
            parse_term("S Q"),
            Err(ParseError::UnknownAtom {
                pos: 2,
                name: "Q".into()
            })
        );
        assert_eq!(
            parse_term("S + K"),
            Err(ParseError::UnexpectedChar { pos: 2, found: '+' })
        );
        assert!(matches!(parse_term("  "), Err(ParseError::Empty { .. })));
        assert!(matches!(parse_term("S )"), Err(ParseError::Unbalanced { .. })));
    }

    #[test]
    fn abstraction_rules() {
        assert_eq!(abstract_var("x", &Term::var("x")), p("S K K"));
        assert_eq!(abstract_var("x", &K), p("K K"));
        let xx = Term::app(Term::var("x"), Term::var("x"));
        assert_eq!(abstract_var("x", &xx), p("S (S K K) (S K K)"));
    }

    #[test]
    fn abstraction_removes_variable() {
        let body = p("x (y x) K");
        let t = abstract_var("x", &body);
        assert!(!t.occurs("x"));
        assert!(t.occurs("y"));
        assert!(abstract_vars(&["x", "y"], &body).is_closed());
    }

    #[test]
    fn closedness_and_size() {
        assert!(p("S K").is_closed());
        assert!(!p("S x").is_closed());
        assert_eq!(p("S (K S) K").size(), 4);
    }
}
