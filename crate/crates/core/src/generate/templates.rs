use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Instruction families. Each has one or more sub-instructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Movement,
    QuestionConversion,
    Tense,
    Passivization,
    Clefting,
    LanguageSpecific,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Movement,
        Family::QuestionConversion,
        Family::Tense,
        Family::Passivization,
        Family::Clefting,
        Family::LanguageSpecific,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Movement => "movement",
            Family::QuestionConversion => "question_conversion",
            Family::Tense => "tense",
            Family::Passivization => "passivization",
            Family::Clefting => "clefting",
            Family::LanguageSpecific => "language_specific",
        }
    }

    /// Parse `all` or a `,`/`+`-separated list of family names.
    pub fn parse_set(list: &str) -> Result<BTreeSet<Family>> {
        let mut out = BTreeSet::new();
        for part in list.split([',', '+']).map(str::trim).filter(|s| !s.is_empty()) {
            if part == "all" {
                out.extend(Family::ALL);
            } else {
                out.insert(part.parse()?);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("empty instruction family set".into()));
        }
        Ok(out)
    }

    pub fn names(set: &BTreeSet<Family>) -> BTreeSet<String> {
        set.iter().map(|f| f.name().to_string()).collect()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown instruction family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstructionTemplate {
    pub family: Family,
    pub sub_tag: &'static str,
    pub text: &'static str,
}

impl InstructionTemplate {
    /// `family.sub_tag`, as stored in generation records.
    pub fn tag(&self) -> String {
        format!("{}.{}", self.family.name(), self.sub_tag)
    }
}

pub const TEMPLATES: [InstructionTemplate; 12] = [
    InstructionTemplate {
        family: Family::Movement,
        sub_tag: "topicalization",
        text: "Generate diverse sentences by performing the topicalization transformation to the below sentence.",
    },
    InstructionTemplate {
        family: Family::Movement,
        sub_tag: "preposing",
        text: "Generate diverse sentences by performing the preposing transformation to the below sentence.",
    },
    InstructionTemplate {
        family: Family::Movement,
        sub_tag: "postposing",
        text: "Generate diverse sentences by performing the postposing transformation to the below sentence.",
    },
    InstructionTemplate {
        family: Family::Movement,
        sub_tag: "extraposition",
        text: "Generate diverse sentences by performing the extraposition transformation to the below sentence.",
    },
    InstructionTemplate {
        family: Family::QuestionConversion,
        sub_tag: "yes_no",
        text: "Generate diverse sentences by converting the below sentence to a yes-no question.",
    },
    InstructionTemplate {
        family: Family::QuestionConversion,
        sub_tag: "wh",
        text: "Generate diverse sentences by converting the below sentence to a wh-question.",
    },
    InstructionTemplate {
        family: Family::Tense,
        sub_tag: "tense",
        text: "Generate diverse sentences by converting the below sentence to other tenses.",
    },
    InstructionTemplate {
        family: Family::Passivization,
        sub_tag: "passive",
        text: "Generate diverse sentences by passivizing the below sentence.",
    },
    InstructionTemplate {
        family: Family::Clefting,
        sub_tag: "cleft",
        text: "Generate diverse sentences by converting the below sentence to a cleft sentence.",
    },
    InstructionTemplate {
        family: Family::LanguageSpecific,
        sub_tag: "scrambling",
        text: "Generate diverse sentences by performing the scrambling transformation to the below sentence.",
    },
    InstructionTemplate {
        family: Family::LanguageSpecific,
        sub_tag: "heavy_np_shift",
        text: "Generate diverse sentences by performing heavy NP shift.",
    },
    InstructionTemplate {
        family: Family::LanguageSpecific,
        sub_tag: "ba_construction",
        text: "Generate diverse sentences by converting the below sentence into ones with ba-construction.",
    },
];

pub fn template(sub_tag: &str) -> Option<&'static InstructionTemplate> {
    TEMPLATES.iter().find(|t| t.sub_tag == sub_tag)
}

/// English name of a supported language code.
pub fn language_name(code: &str) -> Result<&'static str> {
    Ok(match code {
        "en" => "English",
        "zh" => "Chinese",
        "de" => "German",
        "fr" => "French",
        "hu" => "Hungarian",
        "sv" => "Swedish",
        "pl" => "Polish",
        "eu" => "Basque",
        "he" => "Hebrew",
        "ko" => "Korean",
        other => return Err(Error::UnknownLanguage(other.to_string())),
    })
}

/// Which languages receive the language-specific sub-instructions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Gating {
    pub ba_construction: BTreeSet<String>,
    pub scrambling: BTreeSet<String>,
    pub heavy_np_shift: BTreeSet<String>,
}

impl Default for Gating {
    fn default() -> Self {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Gating {
            ba_construction: set(&["zh"]),
            scrambling: set(&["de", "ko", "hu", "pl", "eu"]),
            heavy_np_shift: set(&["en", "fr", "sv"]),
        }
    }
}

impl Gating {
    pub fn allows(&self, t: &InstructionTemplate, language: &str) -> bool {
        match t.sub_tag {
            "ba_construction" => self.ba_construction.contains(language),
            "scrambling" => self.scrambling.contains(language),
            "heavy_np_shift" => self.heavy_np_shift.contains(language),
            _ => true,
        }
    }

    /// Templates of the selected families that apply to `language`, in
    /// table order.
    pub fn select(&self, families: &BTreeSet<Family>, language: &str) -> Vec<&'static InstructionTemplate> {
        TEMPLATES
            .iter()
            .filter(|t| families.contains(&t.family) && self.allows(t, language))
            .collect()
    }
}

/// Instruction text, the language directive for non-English targets, then
/// the target sentence on its own line.
pub fn render_instruction(template: &InstructionTemplate, language: &str, target_text: &str) -> Result<String> {
    let name = language_name(language)?;
    let mut prompt = template.text.to_string();
    if language != "en" {
        prompt.push_str(&format!(" The generated sentences must be in {name}."));
    }
    prompt.push('\n');
    prompt.push_str(target_text);
    Ok(prompt)
}
