use std::path::Path;

use thiserror::Error;

use super::TaskKind;

const DEFAULT_TEMPLATES: &str = include_str!("../../data/templates.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemplateError {
    #[error("template for {task} is missing placeholder {{{placeholder}}}")]
    Missing {
        task: TaskKind,
        placeholder: &'static str,
    },
    #[error("template for {task} uses {{smiles}} {count} times, expected once")]
    SmilesCount { task: TaskKind, count: usize },
    #[error("template for {task} uses unknown placeholder {{{placeholder}}}")]
    Unknown { task: TaskKind, placeholder: String },
    #[error("unresolved placeholder {{{0}}}")]
    Unresolved(String),
    #[error("unterminated placeholder in template text")]
    Unterminated,
    #[error("template file line {line}: {message}")]
    Config { line: usize, message: String },
}

/// Values substituted into a template.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PromptFields {
    pub smiles: String,
    pub group: Option<String>,
    pub k: Option<usize>,
    pub frag_a: Option<String>,
    pub frag_b: Option<String>,
}

impl PromptFields {
    pub fn smiles(smiles: impl Into<String>) -> Self {
        PromptFields {
            smiles: smiles.into(),
            ..Default::default()
        }
    }

    fn get(&self, name: &str) -> Option<String> {
        match name {
            "smiles" => Some(self.smiles.clone()),
            "group" => self.group.clone(),
            "k" => self.k.map(|k| k.to_string()),
            "frag_a" => self.frag_a.clone(),
            "frag_b" => self.frag_b.clone(),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub task: TaskKind,
    pub text: String,
}

fn placeholders(text: &str) -> Result<Vec<&str>, TemplateError> {
    let mut out = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or(TemplateError::Unterminated)?;
        out.push(&after[..close]);
        rest = &after[close + 1..];
    }
    Ok(out)
}

impl PromptTemplate {
    /// Checks that the task's required placeholders are present, `{smiles}`
    /// appears exactly once, and nothing unknown is referenced.
    pub fn new(task: TaskKind, text: impl Into<String>) -> Result<Self, TemplateError> {
        let text = text.into();
        let used = placeholders(&text)?;
        for p in &used {
            if !task.allowed_placeholders().contains(p) {
                return Err(TemplateError::Unknown {
                    task,
                    placeholder: p.to_string(),
                });
            }
        }
        for &req in task.required_placeholders() {
            if !used.contains(&req) {
                return Err(TemplateError::Missing {
                    task,
                    placeholder: req,
                });
            }
        }
        let count = used.iter().filter(|p| **p == "smiles").count();
        if count != 1 {
            return Err(TemplateError::SmilesCount { task, count });
        }
        Ok(PromptTemplate { task, text })
    }
}

/// Plain placeholder substitution.
pub fn render_prompt(
    template: &PromptTemplate,
    fields: &PromptFields,
) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(template.text.len() + fields.smiles.len());
    let mut rest = template.text.as_str();
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after.find('}').ok_or(TemplateError::Unterminated)?;
        let name = &after[..close];
        let value = fields
            .get(name)
            .ok_or_else(|| TemplateError::Unresolved(name.to_string()))?;
        out.push_str(&value);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// One template per task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateSet {
    templates: Vec<PromptTemplate>,
}

impl TemplateSet {
    pub fn get(&self, task: TaskKind) -> &PromptTemplate {
        self.templates
            .iter()
            .find(|t| t.task == task)
            .expect("template sets cover every task")
    }

    pub fn default_set() -> Self {
        parse_templates(DEFAULT_TEMPLATES).expect("embedded templates are valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TemplateError> {
        let text = std::fs::read_to_string(path.as_ref()).map_err(|e| TemplateError::Config {
            line: 0,
            message: format!("cannot read {}: {e}", path.as_ref().display()),
        })?;
        parse_templates(&text)
    }

    /// Serializes in the file format read by [`parse_templates`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for task in TaskKind::ALL {
            out.push_str(&format!("[{}]\n{}\n\n", task, self.get(task).text));
        }
        out
    }
}

impl Default for TemplateSet {
    fn default() -> Self {
        Self::default_set()
    }
}

/// Reads `[task_name]` headers, each followed by the template text up to the
/// next header. Lines starting with `#` are comments; surrounding blank lines
/// are trimmed. All five tasks must be present exactly once.
pub fn parse_templates(text: &str) -> Result<TemplateSet, TemplateError> {
    let mut blocks: Vec<(TaskKind, usize, Vec<&str>)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim_start().starts_with('#') {
            continue;
        }
        let trimmed = line.trim();
        if let Some(name) = trimmed.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let task: TaskKind = name.parse().map_err(|_| TemplateError::Config {
                line: line_no,
                message: format!("unknown task {name:?}"),
            })?;
            if blocks.iter().any(|(t, _, _)| *t == task) {
                return Err(TemplateError::Config {
                    line: line_no,
                    message: format!("duplicate template for {task}"),
                });
            }
            blocks.push((task, line_no, Vec::new()));
            continue;
        }
        match blocks.last_mut() {
            Some((_, _, lines)) => lines.push(line),
            None if trimmed.is_empty() => {}
            None => {
                return Err(TemplateError::Config {
                    line: line_no,
                    message: "text before the first [task] header".into(),
                })
            }
        }
    }
    let mut templates = Vec::new();
    for task in TaskKind::ALL {
        let Some((_, _, lines)) = blocks.iter().find(|(t, _, _)| *t == task) else {
            return Err(TemplateError::Config {
                line: text.lines().count().max(1),
                message: format!("no template for {task}"),
            });
        };
        let body = lines.join("\n");
        templates.push(PromptTemplate::new(task, body.trim())?);
    }
    Ok(TemplateSet { templates })
}
