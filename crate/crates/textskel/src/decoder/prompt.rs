use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::text::Lang;

pub const SKELETON_PLACEHOLDER: &str = "{SKELETON}";
pub const TARGET_LEN_PLACEHOLDER: &str = "{TARGET_LEN}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    Reconstruct,
    Summarize,
}

/// Prompt text with `{SKELETON}` and `{TARGET_LEN}` placeholders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub id: String,
    pub text: String,
}

impl PromptTemplate {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let path = path.as_ref();
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".into());
        Ok(Self::new(id, fs::read_to_string(path)?))
    }

    /// Built-in template for a language and task.
    pub fn builtin(kind: TemplateKind, lang: Lang) -> Self {
        let (id, text) = match (kind, lang) {
            (TemplateKind::Reconstruct, Lang::English) => {
                ("reconstruct_en", include_str!("../../templates/reconstruct_en.txt"))
            }
            (TemplateKind::Reconstruct, Lang::Presegmented) => {
                ("reconstruct_zh", include_str!("../../templates/reconstruct_zh.txt"))
            }
            (TemplateKind::Summarize, Lang::English) => {
                ("summarize_en", include_str!("../../templates/summarize_en.txt"))
            }
            (TemplateKind::Summarize, Lang::Presegmented) => {
                ("summarize_zh", include_str!("../../templates/summarize_zh.txt"))
            }
        };
        Self::new(id, text)
    }

    /// Substitutes both placeholders. Skeleton text is inserted verbatim, and
    /// placeholders inside it are not expanded again.
    pub fn render(&self, skeleton: &str, target_len: usize) -> String {
        let with_len = self.text.replace(TARGET_LEN_PLACEHOLDER, &target_len.to_string());
        with_len.replacen(SKELETON_PLACEHOLDER, skeleton, 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn english_template_is_stable() {
        let t = PromptTemplate::builtin(TemplateKind::Reconstruct, Lang::English);
        assert!(t.text.starts_with("You are a text reconstruction assistant."));
        let a = t.render("Th cmmtt sd", 42);
        assert_eq!(a, t.render("Th cmmtt sd", 42));
        assert!(a.contains("approximately 42 characters"));
        assert!(a.ends_with("Input:\nTh cmmtt sd\n"));
    }

    #[test]
    fn skeleton_placeholders_are_not_re_expanded() {
        let t = PromptTemplate::new("t", "[{SKELETON}] {TARGET_LEN}");
        assert_eq!(t.render("{TARGET_LEN}", 3), "[{TARGET_LEN}] 3");
    }

    #[test]
    fn chinese_templates_exist() {
        let t = PromptTemplate::builtin(TemplateKind::Reconstruct, Lang::Presegmented);
        assert!(t.text.starts_with("你是一个中文文本重建助手"));
        let s = PromptTemplate::builtin(TemplateKind::Summarize, Lang::Presegmented);
        assert!(s.render("x", 16).contains("16"));
    }
}
