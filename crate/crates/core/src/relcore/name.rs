//! Relation identities and the underscore naming convention.
//!
//! A relation name reads `<kind>_<db>[_<org>]_<tail>`. The organism token is
//! omitted for human map relations and for human ontology edges; interaction
//! edges always spell it out (`edge_strg_hs_symb`).

use std::fmt;
use std::str::FromStr;

use super::RelError;

/// The two relation kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelKind {
    Map,
    Edge,
}

impl RelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RelKind::Map => "map",
            RelKind::Edge => "edge",
        }
    }
}

impl fmt::Display for RelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Registered source-database tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DbToken {
    Ense,
    Gont,
    Hgnc,
    Mgim,
    Ncbi,
    Pros,
    Strg,
    Unip,
}

impl DbToken {
    pub const ALL: [DbToken; 8] = [
        DbToken::Ense,
        DbToken::Gont,
        DbToken::Hgnc,
        DbToken::Mgim,
        DbToken::Ncbi,
        DbToken::Pros,
        DbToken::Strg,
        DbToken::Unip,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DbToken::Ense => "ense",
            DbToken::Gont => "gont",
            DbToken::Hgnc => "hgnc",
            DbToken::Mgim => "mgim",
            DbToken::Ncbi => "ncbi",
            DbToken::Pros => "pros",
            DbToken::Strg => "strg",
            DbToken::Unip => "unip",
        }
    }
}

impl FromStr for DbToken {
    type Err = RelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DbToken::ALL
            .iter()
            .copied()
            .find(|db| db.as_str() == s)
            .ok_or_else(|| RelError::UnknownDbToken(s.to_string()))
    }
}

impl fmt::Display for DbToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Organism tokens. Ordering puts `hs` first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OrgToken {
    Hs,
    Mouse,
}

impl OrgToken {
    pub const ALL: [OrgToken; 2] = [OrgToken::Hs, OrgToken::Mouse];

    pub fn as_str(self) -> &'static str {
        match self {
            OrgToken::Hs => "hs",
            OrgToken::Mouse => "mouse",
        }
    }
}

impl FromStr for OrgToken {
    type Err = RelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hs" => Ok(OrgToken::Hs),
            "mouse" => Ok(OrgToken::Mouse),
            other => Err(RelError::UnknownOrgToken(other.to_string())),
        }
    }
}

impl fmt::Display for OrgToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How [`format_rel_name`] treats the human organism token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameStyle {
    /// Omit `hs` for map relations and ontology edges.
    ImplicitHs,
    /// Always write the organism.
    Explicit,
}

/// Parsed relation identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelName {
    kind: RelKind,
    db: DbToken,
    org: OrgToken,
    object: Option<String>,
    subject: Option<String>,
    label: Option<String>,
    arity: usize,
}

impl RelName {
    /// A map relation `map_<db>_<org>_<object>_<subject>` of arity 2.
    pub fn map(db: DbToken, org: OrgToken, object: &str, subject: &str) -> Result<Self, RelError> {
        check_product_token(object)?;
        check_product_token(subject)?;
        Ok(RelName {
            kind: RelKind::Map,
            db,
            org,
            object: Some(object.to_string()),
            subject: Some(subject.to_string()),
            label: None,
            arity: 2,
        })
    }

    /// A weighted interaction edge relation `edge_<db>_<org>_<object>` of arity 3.
    pub fn edge(db: DbToken, org: OrgToken, object: &str) -> Result<Self, RelError> {
        check_product_token(object)?;
        Ok(RelName {
            kind: RelKind::Edge,
            db,
            org,
            object: Some(object.to_string()),
            subject: None,
            label: None,
            arity: 3,
        })
    }

    /// An ontology edge relation whose tail is a relation label, e.g. `is_a`.
    pub fn labelled_edge(db: DbToken, org: OrgToken, label: &str) -> Result<Self, RelError> {
        check_label(label)?;
        Ok(RelName {
            kind: RelKind::Edge,
            db,
            org,
            object: None,
            subject: None,
            label: Some(label.to_string()),
            arity: 2,
        })
    }

    pub fn with_arity(mut self, arity: usize) -> Result<Self, RelError> {
        if arity < 2 {
            return Err(RelError::MalformedName(format!("{self}/{arity}: arity below 2")));
        }
        self.arity = arity;
        Ok(self)
    }

    pub fn kind(&self) -> RelKind {
        self.kind
    }

    pub fn db(&self) -> DbToken {
        self.db
    }

    pub fn org(&self) -> OrgToken {
        self.org
    }

    pub fn object(&self) -> Option<&str> {
        self.object.as_deref()
    }

    pub fn subject(&self) -> Option<&str> {
        self.subject.as_deref()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// `name/arity`, as printed by table listings.
    pub fn indicator(&self) -> String {
        format!("{self}/{}", self.arity)
    }
}

impl fmt::Display for RelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rel_name(self, NameStyle::ImplicitHs))
    }
}

impl FromStr for RelName {
    type Err = RelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rel_name(s)
    }
}

fn check_product_token(tok: &str) -> Result<(), RelError> {
    if tok.len() == 4 && tok.bytes().all(|b| b.is_ascii_lowercase() || b.is_ascii_digit()) {
        Ok(())
    } else {
        Err(RelError::MalformedName(format!("bad product token {tok:?}")))
    }
}

fn check_label(label: &str) -> Result<(), RelError> {
    let ok = !label.is_empty()
        && label
            .split('_')
            .all(|part| !part.is_empty() && part.bytes().all(|b| b.is_ascii_lowercase()));
    if ok {
        Ok(())
    } else {
        Err(RelError::MalformedName(format!("bad relation label {label:?}")))
    }
}

/// Parses `map_unip_hgnc_unip`, `edge_strg_hs_symb/3`, `edge_gont_is_a` and friends.
pub fn parse_rel_name(text: &str) -> Result<RelName, RelError> {
    let malformed = |why: &str| RelError::MalformedName(format!("{text:?}: {why}"));
    let (body, arity) = match text.split_once('/') {
        Some((body, arity)) => {
            let arity: usize = arity.parse().map_err(|_| malformed("arity is not a number"))?;
            (body, Some(arity))
        }
        None => (text, None),
    };
    if body.is_empty() {
        return Err(malformed("empty name"));
    }
    let tokens: Vec<&str> = body.split('_').collect();
    if tokens.len() < 3 {
        return Err(malformed("too few tokens"));
    }
    let kind = match tokens[0] {
        "map" => RelKind::Map,
        "edge" => RelKind::Edge,
        _ => return Err(malformed("kind must be map or edge")),
    };
    let db: DbToken = tokens[1].parse()?;
    let rest = &tokens[2..];

    let name = match kind {
        RelKind::Map => match rest {
            [object, subject] => RelName::map(db, OrgToken::Hs, object, subject)?,
            [org, object, subject] => RelName::map(db, org.parse()?, object, subject)?,
            _ => return Err(malformed("map relations take an optional organism and two product tokens")),
        },
        RelKind::Edge if db == DbToken::Gont => {
            let (org, tail) = match rest[0].parse::<OrgToken>() {
                Ok(org) if rest.len() > 1 => (org, &rest[1..]),
                _ => (OrgToken::Hs, rest),
            };
            RelName::labelled_edge(db, org, &tail.join("_"))?
        }
        RelKind::Edge => match rest {
            [org, object] => RelName::edge(db, org.parse()?, object)?,
            _ => return Err(malformed("edge relations take an organism and a product token")),
        },
    };
    match arity {
        Some(arity) => name.with_arity(arity),
        None => Ok(name),
    }
}

/// Renders a relation name. Arity is not part of the name.
pub fn format_rel_name(name: &RelName, style: NameStyle) -> String {
    let omit_org = style == NameStyle::ImplicitHs
        && name.org == OrgToken::Hs
        && (name.kind == RelKind::Map || name.label.is_some());
    let mut parts: Vec<&str> = vec![name.kind.as_str(), name.db.as_str()];
    if !omit_org {
        parts.push(name.org.as_str());
    }
    if let Some(label) = &name.label {
        parts.push(label);
    }
    if let Some(object) = &name.object {
        parts.push(object);
    }
    if let Some(subject) = &name.subject {
        parts.push(subject);
    }
    parts.join("_")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implicit_human_map() {
        let r = parse_rel_name("map_unip_hgnc_unip").unwrap();
        assert_eq!(r.kind(), RelKind::Map);
        assert_eq!(r.db(), DbToken::Unip);
        assert_eq!(r.org(), OrgToken::Hs);
        assert_eq!(r.object(), Some("hgnc"));
        assert_eq!(r.subject(), Some("unip"));
        assert_eq!(r.arity(), 2);
        assert_eq!(format_rel_name(&r, NameStyle::ImplicitHs), "map_unip_hgnc_unip");
        assert_eq!(format_rel_name(&r, NameStyle::Explicit), "map_unip_hs_hgnc_unip");
    }

    #[test]
    fn explicit_mouse_map() {
        let r = parse_rel_name("map_mgim_mouse_mgim_symb").unwrap();
        assert_eq!(r.org(), OrgToken::Mouse);
        assert_eq!(r.object(), Some("mgim"));
        assert_eq!(r.subject(), Some("symb"));
        assert_eq!(format_rel_name(&r, NameStyle::Explicit), "map_mgim_mouse_mgim_symb");
        assert_eq!(format_rel_name(&r, NameStyle::ImplicitHs), "map_mgim_mouse_mgim_symb");
    }

    #[test]
    fn interaction_edge_keeps_organism() {
        let r = parse_rel_name("edge_strg_hs_symb").unwrap();
        assert_eq!(r.kind(), RelKind::Edge);
        assert_eq!(r.org(), OrgToken::Hs);
        assert_eq!(r.object(), Some("symb"));
        assert_eq!(r.arity(), 3);
        assert_eq!(r.to_string(), "edge_strg_hs_symb");
        assert_eq!(r.indicator(), "edge_strg_hs_symb/3");
    }

    #[test]
    fn ontology_edge_label() {
        let r = parse_rel_name("edge_gont_is_a").unwrap();
        assert_eq!(r.label(), Some("is_a"));
        assert_eq!(r.object(), None);
        assert_eq!(r.org(), OrgToken::Hs);
        assert_eq!(r.arity(), 2);
        assert_eq!(r.to_string(), "edge_gont_is_a");
        let explicit = format_rel_name(&r, NameStyle::Explicit);
        assert_eq!(explicit, "edge_gont_hs_is_a");
        assert_eq!(parse_rel_name(&explicit).unwrap(), r);
    }

    #[test]
    fn arity_suffix() {
        let r = parse_rel_name("map_mgim_mouse_mgim_unip/2").unwrap();
        assert_eq!(r, parse_rel_name("map_mgim_mouse_mgim_unip").unwrap());
        assert!(matches!(parse_rel_name("map_hgnc_hgnc_symb/x"), Err(RelError::MalformedName(_))));
    }

    #[test]
    fn rejects() {
        assert!(matches!(parse_rel_name("map_bogus_x_y"), Err(RelError::UnknownDbToken(t)) if t == "bogus"));
        assert!(matches!(parse_rel_name("map_hgnc_fish_hgnc_symb"), Err(RelError::UnknownOrgToken(_))));
        assert!(matches!(parse_rel_name("edge_strg_fish_symb"), Err(RelError::UnknownOrgToken(_))));
        assert!(matches!(parse_rel_name("tree_hgnc_hgnc_symb"), Err(RelError::MalformedName(_))));
        assert!(matches!(parse_rel_name("map_hgnc"), Err(RelError::MalformedName(_))));
        assert!(matches!(parse_rel_name("map_hgnc_hgnc"), Err(RelError::MalformedName(_))));
        assert!(matches!(parse_rel_name("map_hgnc_a_b_c_d"), Err(RelError::MalformedName(_))));
        assert!(matches!(parse_rel_name("map_hgnc_hgnc_symbol"), Err(RelError::MalformedName(_))));
        assert!(matches!(parse_rel_name("edge_strg_symb"), Err(RelError::MalformedName(_))));
        assert!(matches!(parse_rel_name(""), Err(RelError::MalformedName(_))));
    }
}
