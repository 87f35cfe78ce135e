//! Symbolic terms, s-expression syntax, unification and a provenance-aware
//! fact store.

mod kb;
mod parse;
mod store;
mod term;
mod unify;

pub use kb::{is_relation, load_kb, normalize_triple, parse_kb, KbError, RELATIONS};
pub use parse::{parse_term, parse_terms, ParseError};
pub use store::{Fact, FactError, FactStore, Source, UnknownSourceTag};
pub use term::{is_atom_token, Term};
pub use unify::{unify, Bindings};
