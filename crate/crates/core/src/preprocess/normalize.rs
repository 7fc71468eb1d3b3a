use serde::{Deserialize, Serialize};

/// Characters dropped during normalization, applied after whitespace substitution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeConfig {
    #[serde(default = "default_removed")]
    pub remove: Vec<char>,
}

fn default_removed() -> Vec<char> {
    vec!['\u{00A0}', '\u{00AD}']
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig {
            remove: default_removed(),
        }
    }
}

/// Normalizes with the default removal set.
pub fn normalize_text(raw: &str) -> String {
    normalize_with(raw, &NormalizeConfig::default())
}

/// Collapses every whitespace run inside a line to one ASCII space, trims each
/// line and drops the configured characters. Line breaks are kept.
pub fn normalize_with(raw: &str, cfg: &NormalizeConfig) -> String {
    let mut out = String::with_capacity(raw.len());
    for (i, line) in raw.split('\n').enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let mut pending_space = false;
        let mut wrote_any = false;
        for c in line.chars() {
            if c.is_whitespace() {
                pending_space = true;
                continue;
            }
            if cfg.remove.contains(&c) {
                continue;
            }
            if pending_space && wrote_any {
                out.push(' ');
            }
            pending_space = false;
            wrote_any = true;
            out.push(c);
        }
    }
    out
}
