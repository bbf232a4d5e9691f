//! Text format for query representations (`.gq` files).
//!
//! ```text
//! query "valjean" {
//!   node n0;
//!   motif C0 = clique(nodes=5);
//!   edge e0 = n0 -- C0;
//!   rule attr node n0 : name == "Valjean";
//!   rule repeat C0 : count=0..3;
//! }
//! ```
//!
//! Declarations: `node ID;`, `motif ID = KIND[(nodes=R[, width=R][, depth=R])];`,
//! `edge ID = REF (->|--) REF;` with `REF := ID | ID.head | ID.tail`,
//! `group ID = { ID, ... };`, and rules
//! `rule attr (node|edge|nodes in|edges in) ID : NAME OP LITERAL;`,
//! `rule motif ID : nodes=R[, width=R][, depth=R];`, `rule repeat ID : count=R;`,
//! `rule chain ID : start=ID, end=ID, iterations=R, mode=(linked|shared);`.
//! `R` is `INT` or `INT..INT`. A rule may end in `as ID` to name it;
//! otherwise it is named `r<k>` after its position. Identifiers that are
//! not plain words are written as quoted strings. `#` starts a comment.

mod lexer;
mod parser;
mod serialize;

pub use parser::{parse, Parsed};
pub use serialize::{ident, literal, quote, serialize};
