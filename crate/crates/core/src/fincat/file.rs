//! JSON descriptions of finite categories and of base-type assignments.
//!
//! A category file:
//!
//! ```json
//! {
//!   "objects": ["0", "1"],
//!   "arrows": [{"name": "f", "src": "0", "dst": "1"}],
//!   "identities": {"0": "id0", "1": "id1"},
//!   "compose": [["id0", "f", "f"]]
//! }
//! ```
//!
//! `compose` lists triples `[f, g, h]` meaning "`f` then `g` is `h`".
//! Composites involving an identity may be omitted. When `identities` is
//! absent an arrow `id_<object>` is added for every object.
//!
//! A base file maps base type names to categories, each given as
//! `{"builtin": "z2"}`, `{"file": "cats/x.json"}` (relative to the base
//! file) or `{"inline": {...}}`. Unlisted names use `default`, which is
//! the terminal category when omitted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Arrow, FinCat, FinError};
use crate::syntax::Name;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("unknown built-in category `{0}`")]
    UnknownBuiltin(String),
    #[error("composite of `{0}` then `{1}` is given twice")]
    DuplicateComposite(String, String),
    #[error(transparent)]
    Category(#[from] FinError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub name: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryFile {
    pub objects: Vec<String>,
    #[serde(default)]
    pub arrows: Vec<ArrowSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub identities: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub compose: Vec<(String, String, String)>,
}

impl CategoryFile {
    pub fn build(&self) -> Result<FinCat, FileError> {
        let objects: Vec<Arc<str>> = self.objects.iter().map(|o| Arc::from(o.as_str())).collect();
        let obj = |name: &str| {
            self.objects
                .iter()
                .position(|o| o == name)
                .map(|i| i as u32)
                .ok_or_else(|| FileError::UnknownObject(name.to_string()))
        };
        let mut arrows = Vec::new();
        for a in &self.arrows {
            arrows.push(Arrow { name: Arc::from(a.name.as_str()), src: obj(&a.src)?, dst: obj(&a.dst)? });
        }
        let find = |arrows: &[Arrow], name: &str| {
            arrows
                .iter()
                .position(|a| &*a.name == name)
                .map(|i| i as u32)
                .ok_or_else(|| FileError::UnknownArrow(name.to_string()))
        };
        let mut identities = Vec::with_capacity(objects.len());
        match &self.identities {
            Some(ids) => {
                for o in &self.objects {
                    let name = ids.get(o).ok_or_else(|| FileError::Category(FinError::Malformed(format!("object `{o}` has no identity"))))?;
                    identities.push(find(&arrows, name)?);
                }
                if let Some(extra) = ids.keys().find(|k| !self.objects.contains(k)) {
                    return Err(FileError::UnknownObject(extra.clone()));
                }
            }
            None => {
                for (i, o) in self.objects.iter().enumerate() {
                    identities.push(arrows.len() as u32);
                    arrows.push(Arrow { name: Arc::from(format!("id_{o}").as_str()), src: i as u32, dst: i as u32 });
                }
            }
        }
        let m = arrows.len();
        let mut table: Vec<Option<u32>> = vec![None; m * m];
        for (f, g, h) in &self.compose {
            let (fi, gi, hi) = (find(&arrows, f)?, find(&arrows, g)?, find(&arrows, h)?);
            let slot = &mut table[fi as usize * m + gi as usize];
            if slot.is_some_and(|prev| prev != hi) {
                return Err(FileError::DuplicateComposite(f.clone(), g.clone()));
            }
            *slot = Some(hi);
        }
        for (f, a) in arrows.iter().enumerate() {
            let (s, d) = (identities[a.src as usize] as usize, identities[a.dst as usize] as usize);
            table[s * m + f].get_or_insert(f as u32);
            table[f * m + d].get_or_insert(f as u32);
        }
        let cat = FinCat::from_raw(objects, arrows, identities, table);
        cat.validate()?;
        Ok(cat)
    }

    /// The description of an existing category, listing every composite.
    pub fn describe(cat: &FinCat) -> CategoryFile {
        let objects = cat.object_names().iter().map(|o| o.to_string()).collect();
        let arrows = cat
            .arrows()
            .iter()
            .map(|a| ArrowSpec {
                name: a.name.to_string(),
                src: cat.object_name(a.src).to_string(),
                dst: cat.object_name(a.dst).to_string(),
            })
            .collect();
        let identities = (0..cat.n_objects() as u32)
            .map(|a| (cat.object_name(a).to_string(), cat.arrow_name(cat.id(a)).to_string()))
            .collect();
        let mut compose = Vec::new();
        for f in 0..cat.n_arrows() as u32 {
            for g in 0..cat.n_arrows() as u32 {
                if let Some(h) = cat.then(f, g) {
                    compose.push((cat.arrow_name(f).to_string(), cat.arrow_name(g).to_string(), cat.arrow_name(h).to_string()));
                }
            }
        }
        CategoryFile { objects, arrows, identities: Some(identities), compose }
    }
}

/// Looks up a built-in category: `terminal`, `walking-arrow`, `z2`,
/// `parallel-pair`, `discrete-N`, `chain-N` or `cyclic-N`.
pub fn builtin(name: &str) -> Result<FinCat, FileError> {
    let unknown = || FileError::UnknownBuiltin(name.to_string());
    let sized = |prefix: &str| -> Option<Result<usize, FileError>> {
        name.strip_prefix(prefix).map(|n| match n.parse::<usize>() {
            Ok(n) if (1..=64).contains(&n) => Ok(n),
            _ => Err(unknown()),
        })
    };
    Ok(match name {
        "terminal" => FinCat::terminal(),
        "walking-arrow" => FinCat::walking_arrow(),
        "z2" => FinCat::z2(),
        "parallel-pair" => FinCat::parallel_pair(),
        _ => {
            if let Some(n) = sized("discrete-") {
                FinCat::discrete(n?)
            } else if let Some(n) = sized("chain-") {
                FinCat::chain(n?)
            } else if let Some(n) = sized("cyclic-") {
                FinCat::cyclic(n?)
            } else {
                return Err(unknown());
            }
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum CatRef {
    Builtin(String),
    File(PathBuf),
    Inline(CategoryFile),
}

impl CatRef {
    pub fn resolve(&self, dir: &Path) -> Result<FinCat, FileError> {
        match self {
            CatRef::Builtin(name) => builtin(name),
            CatRef::Inline(f) => f.build(),
            CatRef::File(p) => load_category(&dir.join(p)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaseFile {
    #[serde(default)]
    pub bases: BTreeMap<String, CatRef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default: Option<CatRef>,
}

/// Categories assigned to base type names.
#[derive(Clone, Debug)]
pub struct BaseAssignment {
    named: BTreeMap<Name, Arc<FinCat>>,
    default: Arc<FinCat>,
}

impl Default for BaseAssignment {
    fn default() -> Self {
        BaseAssignment::uniform(FinCat::terminal())
    }
}

impl BaseAssignment {
    /// Every base type gets `cat`.
    pub fn uniform(cat: FinCat) -> Self {
        BaseAssignment { named: BTreeMap::new(), default: Arc::new(cat) }
    }

    pub fn with(mut self, name: &str, cat: FinCat) -> Self {
        self.named.insert(Name::new(name), Arc::new(cat));
        self
    }

    pub fn get(&self, name: &Name) -> Arc<FinCat> {
        self.named.get(name).unwrap_or(&self.default).clone()
    }

    pub fn named(&self) -> impl Iterator<Item = (&Name, &Arc<FinCat>)> {
        self.named.iter()
    }

    pub fn default_category(&self) -> &Arc<FinCat> {
        &self.default
    }

    /// The largest object count among the assigned categories.
    pub fn max_objects(&self) -> usize {
        self.named.values().chain(std::iter::once(&self.default)).map(|c| c.n_objects()).max().unwrap_or(0)
    }

    /// True when every assigned category is discrete.
    pub fn all_discrete(&self) -> bool {
        self.named.values().chain(std::iter::once(&self.default)).all(|c| c.is_discrete())
    }

    pub fn from_file(file: &BaseFile, dir: &Path) -> Result<Self, FileError> {
        let default = match &file.default {
            Some(r) => r.resolve(dir)?,
            None => FinCat::terminal(),
        };
        let mut named = BTreeMap::new();
        for (k, r) in &file.bases {
            named.insert(Name::new(k), Arc::new(r.resolve(dir)?));
        }
        Ok(BaseAssignment { named, default: Arc::new(default) })
    }

    pub fn parse_json(text: &str, dir: &Path) -> Result<Self, FileError> {
        let file: BaseFile =
            serde_json::from_str(text).map_err(|source| FileError::Json { path: "<base>".into(), source })?;
        BaseAssignment::from_file(&file, dir)
    }
}

fn read(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Io { path: path.to_path_buf(), source })
}

pub fn load_category(path: &Path) -> Result<FinCat, FileError> {
    let text = read(path)?;
    let file: CategoryFile = serde_json::from_str(&text)
        .map_err(|source| FileError::Json { path: path.display().to_string(), source })?;
    file.build()
}

pub fn load_bases(path: &Path) -> Result<BaseAssignment, FileError> {
    let text = read(path)?;
    let file: BaseFile = serde_json::from_str(&text)
        .map_err(|source| FileError::Json { path: path.display().to_string(), source })?;
    BaseAssignment::from_file(&file, path.parent().unwrap_or(Path::new(".")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walking_arrow_with_generated_identities() {
        let f: CategoryFile = serde_json::from_str(
            r#"{"objects": ["0", "1"], "arrows": [{"name": "f", "src": "0", "dst": "1"}]}"#,
        )
        .unwrap();
        let c = f.build().unwrap();
        assert_eq!(c.n_arrows(), 3);
        assert_eq!(c.arrow_name(c.id(1)), "id_1");
    }

    #[test]
    fn missing_composite_is_reported() {
        let f: CategoryFile = serde_json::from_str(
            r#"{"objects": ["x"], "arrows": [{"name": "s", "src": "x", "dst": "x"}]}"#,
        )
        .unwrap();
        assert!(matches!(f.build(), Err(FileError::Category(FinError::MissingComposite { .. }))));
    }

    #[test]
    fn describe_round_trips() {
        for c in [FinCat::z2(), FinCat::parallel_pair(), FinCat::chain(3)] {
            let d = CategoryFile::describe(&c);
            let text = serde_json::to_string(&d).unwrap();
            let back: CategoryFile = serde_json::from_str(&text).unwrap();
            assert_eq!(back.build().unwrap(), c);
        }
    }

    #[test]
    fn base_file_forms() {
        let b = BaseAssignment::parse_json(
            r#"{"bases": {"A": {"builtin": "walking-arrow"}, "C": {"inline": {"objects": ["*"]}}},
                "default": {"builtin": "discrete-2"}}"#,
            Path::new("."),
        )
        .unwrap();
        assert_eq!(b.get(&Name::new("A")).n_arrows(), 3);
        assert_eq!(b.get(&Name::new("C")).n_arrows(), 1);
        assert_eq!(b.get(&Name::new("Z")).n_objects(), 2);
        assert!(BaseAssignment::parse_json(r#"{"bases": {}, "extra": 1}"#, Path::new(".")).is_err());
    }

    #[test]
    fn unknown_builtin() {
        assert!(builtin("discrete-0").is_err());
        assert!(builtin("nope").is_err());
    }
}
