//! Closed string-labelled vocabularies shared across the crate: parts of
//! speech, derivational classes, relation labels, and the small enums used by
//! the rule tables.

/// Generates a copyable enum with a fixed string form per variant, plus
/// `Display`, `FromStr`, and serde impls that all go through those strings.
macro_rules! string_enum {
    ($(#[$meta:meta])* $name:ident, $kind:literal { $($variant:ident => $text:literal,)+ }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant,)+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$(Self::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(Self::$variant => $text,)+
                }
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl std::str::FromStr for $name {
            type Err = crate::error::Error;

            fn from_str(s: &str) -> crate::error::Result<Self> {
                match s {
                    $($text => Ok(Self::$variant),)+
                    _ => Err(crate::error::Error::UnknownLabel {
                        kind: $kind,
                        text: s.to_string(),
                    }),
                }
            }
        }

        impl serde::Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.serialize_str(self.as_str())
            }
        }

        impl<'de> serde::Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_enum! {
    /// Part of speech carried by pattern entries and lexicon entries.
    Pos, "part-of-speech" {
        Verb => "verb",
        Noun => "noun",
        Adjective => "adjective",
    }
}

string_enum! {
    /// Morphosemantic class of an abstract pattern or a lemma.
    DerivClass, "derivational class" {
        UnaugmentedVerb => "unaugmented-verb",
        AugmentedVerb => "augmented-verb",
        Masdar => "masdar",
        ActiveParticiple => "active-participle",
        PassiveParticiple => "passive-participle",
        DescriptiveAdjective => "descriptive-adjective",
        AttributiveAdjective => "attributive-adjective",
        NounOfLocation => "noun-of-location",
        PrimaryNoun => "primary-noun",
        SpecifiedNoun => "specified-noun",
    }
}

string_enum! {
    /// Label on a derivational edge, from base to derived form.
    Relation, "relation" {
        FormIOf => "form-I-of",
        FormIIOf => "form-II-of",
        FormIIIOf => "form-III-of",
        FormIVOf => "form-IV-of",
        FormVOf => "form-V-of",
        FormVIOf => "form-VI-of",
        FormVIIOf => "form-VII-of",
        FormVIIIOf => "form-VIII-of",
        FormIXOf => "form-IX-of",
        FormXOf => "form-X-of",
        FormQIOf => "form-QI-of",
        FormQIIOf => "form-QII-of",
        MasdarOf => "masdar-of",
        ActiveParticipleOf => "active-participle-of",
        PassiveParticipleOf => "passive-participle-of",
        DescriptiveOf => "descriptive-of",
        AttributiveOf => "attributive-of",
        LocationOf => "location-of",
        PrimaryOf => "primary-of",
        SemanticSpecificationOf => "semantic-specification-of",
        Unknown => "unknown",
    }
}

string_enum! {
    /// Whether a word's meaning matches its pattern's canonical meaning.
    Canonicality, "canonicality" {
        Canonical => "canonical",
        NonCanonical => "non-canonical",
    }
}

string_enum! {
    /// Which rule table produced a derivational edge.
    SourceTable, "source table" {
        Canonical => "canonical",
        Affixational => "affixational",
        SemanticSpec => "semantic_spec",
    }
}

string_enum! {
    /// Which form of the base lemma a derivation builds on.
    BaseFormRequirement, "base form" {
        Lemma => "lemma",
        FeminineSingular => "feminine_singular",
        BrokenPlural => "broken_plural",
    }
}

string_enum! {
    /// Class of an alphabet symbol.
    SymbolClass, "symbol class" {
        Consonant => "consonant",
        Vowel => "vowel",
        Marker => "marker",
    }
}

impl DerivClass {
    /// Parts of speech a class may legally carry.
    pub fn allowed_pos(self) -> &'static [Pos] {
        use DerivClass::*;
        match self {
            UnaugmentedVerb | AugmentedVerb => &[Pos::Verb],
            Masdar | NounOfLocation | PrimaryNoun | SpecifiedNoun => &[Pos::Noun],
            ActiveParticiple => &[Pos::Noun, Pos::Adjective],
            PassiveParticiple => &[Pos::Adjective, Pos::Noun],
            DescriptiveAdjective | AttributiveAdjective => &[Pos::Adjective],
        }
    }

    pub fn is_verb(self) -> bool {
        matches!(self, DerivClass::UnaugmentedVerb | DerivClass::AugmentedVerb)
    }
}
