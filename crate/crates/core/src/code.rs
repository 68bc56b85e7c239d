//! Control codes and their surface renderings.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlCode {
    /// The annotated (canonicalized) expression itself; used at inference.
    Orig,
    /// Commutative law of addition.
    Add,
    /// Commutative law of multiplication.
    Mul,
    /// Solution form `x_j = ...`.
    Sol,
    /// Equations rotated right by one.
    Equ,
    /// Unknowns relabeled cyclically.
    Var,
}

/// Whether the code is rendered as a special token or as a short description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeStyle {
    #[default]
    Token,
    Description,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lang {
    #[default]
    En,
    Zh,
}

impl ControlCode {
    /// Output order of augmented examples.
    pub const ALL: [ControlCode; 6] = [
        ControlCode::Orig,
        ControlCode::Add,
        ControlCode::Mul,
        ControlCode::Sol,
        ControlCode::Equ,
        ControlCode::Var,
    ];

    pub const TRANSFORMS: [ControlCode; 5] = [
        ControlCode::Add,
        ControlCode::Mul,
        ControlCode::Sol,
        ControlCode::Equ,
        ControlCode::Var,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ControlCode::Orig => "orig",
            ControlCode::Add => "add",
            ControlCode::Mul => "mul",
            ControlCode::Sol => "sol",
            ControlCode::Equ => "equ",
            ControlCode::Var => "var",
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            ControlCode::Orig => "<orig>",
            ControlCode::Add => "<add>",
            ControlCode::Mul => "<mul>",
            ControlCode::Sol => "<sol>",
            ControlCode::Equ => "<equ>",
            ControlCode::Var => "<var>",
        }
    }

    pub fn description(self, lang: Lang) -> &'static str {
        match (lang, self) {
            (Lang::En, ControlCode::Orig) => "Original Form",
            (Lang::En, ControlCode::Add) => "Swap addition operands",
            (Lang::En, ControlCode::Mul) => "Swap multiplication operands",
            (Lang::En, ControlCode::Sol) => "Solution form",
            (Lang::En, ControlCode::Equ) => "Swap equation order sequentially",
            (Lang::En, ControlCode::Var) => "Swap unknown variables order sequentially",
            (Lang::Zh, ControlCode::Orig) => "原始形式",
            (Lang::Zh, ControlCode::Add) => "加法交换律",
            (Lang::Zh, ControlCode::Mul) => "乘法交换律",
            (Lang::Zh, ControlCode::Sol) => "以解形式表达",
            (Lang::Zh, ControlCode::Equ) => "交换方程组算式",
            (Lang::Zh, ControlCode::Var) => "交换未知量",
        }
    }

    pub fn render(self, style: CodeStyle, lang: Lang) -> &'static str {
        match style {
            CodeStyle::Token => self.token(),
            CodeStyle::Description => self.description(lang),
        }
    }

    /// Inverse of [`ControlCode::render`].
    pub fn from_rendering(s: &str, style: CodeStyle, lang: Lang) -> Option<ControlCode> {
        ControlCode::ALL.into_iter().find(|c| c.render(style, lang) == s)
    }
}

impl fmt::Display for ControlCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown control code {0:?} (expected one of orig, add, mul, sol, equ, var)")]
pub struct UnknownCode(pub String);

impl FromStr for ControlCode {
    type Err = UnknownCode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = s.trim().trim_start_matches('<').trim_end_matches('>');
        ControlCode::ALL
            .into_iter()
            .find(|c| c.name() == bare)
            .ok_or_else(|| UnknownCode(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn renderings_are_bijective_per_language() {
        for style in [CodeStyle::Token, CodeStyle::Description] {
            for lang in [Lang::En, Lang::Zh] {
                let seen: HashSet<_> = ControlCode::ALL.iter().map(|c| c.render(style, lang)).collect();
                assert_eq!(seen.len(), 6);
                for c in ControlCode::ALL {
                    assert_eq!(ControlCode::from_rendering(c.render(style, lang), style, lang), Some(c));
                }
            }
        }
    }

    #[test]
    fn description_strings() {
        assert_eq!(ControlCode::Add.description(Lang::En), "Swap addition operands");
        assert_eq!(ControlCode::Sol.description(Lang::En), "Solution form");
        assert_eq!(ControlCode::Orig.description(Lang::En), "Original Form");
        assert_eq!(ControlCode::Add.description(Lang::Zh), "加法交换律");
        assert_eq!(ControlCode::Orig.description(Lang::Zh), "原始形式");
    }

    #[test]
    fn parses_names_and_tokens() {
        assert_eq!("add".parse::<ControlCode>().unwrap(), ControlCode::Add);
        assert_eq!("<var>".parse::<ControlCode>().unwrap(), ControlCode::Var);
        assert!("swap".parse::<ControlCode>().is_err());
    }
}
