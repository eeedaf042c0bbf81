use std::collections::BTreeMap;

use crate::tree::LabeledTree;

/// Strip functional suffixes at the first `-` or `=` that is not the first
/// character: `NP-SBJ-1` becomes `NP`. Labels starting with `-` such as
/// `-NONE-` are kept.
pub fn strip_function_tags(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    match label.char_indices().skip(1).find(|&(_, c)| c == '-' || c == '=') {
        Some((k, _)) => &label[..k],
        None => label,
    }
}

/// Language-specific merges onto PTB-style categories; identity for labels
/// not listed.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelMap {
    pub language: String,
    pub merges: BTreeMap<String, String>,
}

impl LabelMap {
    pub fn identity(language: &str) -> Self {
        LabelMap { language: language.to_string(), merges: BTreeMap::new() }
    }

    /// Built-in merges for French, Polish and Basque; identity elsewhere.
    pub fn builtin(language: &str) -> Self {
        let pairs: &[(&str, &str)] = match language {
            "fr" => &[("Srel", "S"), ("Sint", "S"), ("Ssub", "S"), ("VPpart", "VP"), ("VPinf", "VP")],
            "pl" => &[("zdanie", "S"), ("fwe", "VP"), ("fno", "NP")],
            "eu" => &[("SN", "NP"), ("SP", "PP")],
            _ => &[],
        };
        LabelMap {
            language: language.to_string(),
            merges: pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        }
    }

    pub fn apply<'a>(&'a self, label: &'a str) -> &'a str {
        self.merges.get(label).map(String::as_str).unwrap_or(label)
    }
}

/// Rewrite every node label through `map`; structure and spans are untouched.
pub fn normalize_labels(tree: &LabeledTree, map: &LabelMap) -> LabeledTree {
    let mut out = tree.clone();
    out.map_labels(&|l| map.apply(l).to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treebank::parse_bracketed;

    #[test]
    fn function_tags() {
        assert_eq!(strip_function_tags("NP-SBJ"), "NP");
        assert_eq!(strip_function_tags("NP-SBJ-1"), "NP");
        assert_eq!(strip_function_tags("NP=2"), "NP");
        assert_eq!(strip_function_tags("-NONE-"), "-NONE-");
        assert_eq!(strip_function_tags("-LRB-"), "-LRB-");
        assert_eq!(strip_function_tags("PRP$"), "PRP$");
    }

    #[test]
    fn french_basque_polish_merges() {
        let fr = LabelMap::builtin("fr");
        assert_eq!(fr.apply("Srel"), "S");
        assert_eq!(fr.apply("Sint"), "S");
        assert_eq!(fr.apply("Ssub"), "S");
        assert_eq!(fr.apply("VPpart"), "VP");
        assert_eq!(fr.apply("VPinf"), "VP");
        assert_eq!(fr.apply("NP"), "NP");
        let eu = LabelMap::builtin("eu");
        assert_eq!(eu.apply("SN"), "NP");
        assert_eq!(eu.apply("SP"), "PP");
        let pl = LabelMap::builtin("pl");
        assert_eq!(pl.apply("zdanie"), "S");
        assert_eq!(pl.apply("fwe"), "VP");
        assert_eq!(pl.apply("fno"), "NP");
    }

    #[test]
    fn normalization_preserves_geometry() {
        let t = parse_bracketed("(SENT (Srel (VPinf (V manger)) (NP (N pommes))))").unwrap();
        let n = normalize_labels(&t, &LabelMap::builtin("fr"));
        assert_eq!(n.spans(), t.spans());
        assert_eq!(n.children()[0].label(), "S");
        assert_eq!(n.children()[0].children()[0].label(), "VP");
        assert_eq!(normalize_labels(&t, &LabelMap::identity("fr")), t);
    }
}
