//! Control-code equation augmentation for math word problem corpora.
//!
//! Equation annotations are parsed into trees, put into a canonical operand
//! order, and rewritten under five control codes (`add`, `mul`, `sol`,
//! `equ`, `var`). Each rewrite is checked against the original by a seeded
//! numeric oracle, and the surviving variants are emitted as
//! `(control code + problem text, prefix target)` training examples.
//!
//! ```
//! use eqaug::{infix, transforms, EquationSet};
//!
//! let eq = infix::parse_equation("x_1 = n_1 + n_2 + n_3").unwrap();
//! let set = EquationSet::single(eq).unwrap();
//! let swapped = transforms::apply_add(&set).into_changed().unwrap();
//! let eq = &swapped.equations()[0];
//! assert_eq!(infix::print_infix(eq), "x_1 = n_3 + (n_2 + n_1)");
//! assert_eq!(infix::print_display(eq), "x_1 = n_3 + n_2 + n_1");
//! ```

pub mod canon;
pub mod code;
pub mod expr;
pub mod infix;
pub mod oracle;
pub mod par;
pub mod pipeline;
pub mod prefix;
pub mod synth;
pub mod transforms;

pub use canon::canonicalize;
pub use code::{CodeStyle, ControlCode, Lang};
pub use expr::{uet_from_set, BinOp, Equation, EquationSet, Expr, Number, UetTree};
pub use infix::{parse_equation, print_display, print_infix, ParseError};
pub use oracle::{check_equivalent, Mode, OracleConfig, Verdict};
pub use par::Execution;
pub use prefix::{parse_prefix, prefix_tokens, Token};
pub use transforms::{generate_all, TransformOutcome};
