//! Run configuration: command-line flags layered over an optional TOML run file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ontoqual::profile::BUNDLED_PROFILES;
use ontoqual::{ExtractionProfile, ParseMode};
use serde::Deserialize;

use crate::Failure;

/// Directory searched for `<name>.toml` before the bundled profiles.
pub const PROFILE_DIR_ENV: &str = "ONTOQUAL_PROFILE_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunFlags {
    /// N-Triples file with the knowledge graph (plain or gzip).
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Separate N-Triples file holding the ontology.
    #[arg(long)]
    pub ontology: Option<PathBuf>,
    /// Bundled profile name, or `<name>.toml` in $ONTOQUAL_PROFILE_DIR.
    #[arg(long, conflicts_with = "profile_file")]
    pub profile: Option<String>,
    /// Extraction profile TOML file.
    #[arg(long)]
    pub profile_file: Option<PathBuf>,
    /// Keep only subjects labelled in this language.
    #[arg(long)]
    pub lang_filter: Option<String>,
    /// Name shown for the KG in tables (default: data file stem).
    #[arg(long)]
    pub name: Option<String>,
    /// Abort on the first malformed line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// TOML run file; flags given on the command line take precedence.
    #[arg(long)]
    pub run: Option<PathBuf>,
}

/// Keys accepted in a run file. Relative paths resolve against the file's directory.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub name: Option<String>,
    pub data: Option<PathBuf>,
    pub ontology: Option<PathBuf>,
    pub profile: Option<String>,
    pub profile_file: Option<PathBuf>,
    pub lang_filter: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub strict: bool,
}

impl RunFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let mut file: RunFile =
            toml::from_str(&text).map_err(|e| Failure::config(format!("run file `{}`: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut file.data, &mut file.ontology, &mut file.profile_file, &mut file.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(file)
    }
}

#[derive(Debug, Clone)]
pub enum ProfileSource {
    Name(String),
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub name: String,
    pub data: PathBuf,
    pub ontology: Option<PathBuf>,
    pub profile: ProfileSource,
    pub lang_filter: Option<String>,
    pub mode: ParseMode,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// Merges flags over the run file (if any) and checks the result.
    pub fn resolve(flags: &RunFlags) -> Result<Self, Failure> {
        let file = match &flags.run {
            Some(path) => RunFile::load(path)?,
            None => RunFile::default(),
        };
        Self::merge(flags, file)
    }

    pub fn merge(flags: &RunFlags, file: RunFile) -> Result<Self, Failure> {
        let data = flags
            .data
            .clone()
            .or(file.data)
            .ok_or_else(|| Failure::usage("no data file given (use --data or `data` in the run file)"))?;
        let profile = match (&flags.profile, &flags.profile_file) {
            (Some(name), None) => ProfileSource::Name(name.clone()),
            (None, Some(path)) => ProfileSource::File(path.clone()),
            (Some(_), Some(_)) => return Err(Failure::usage("give only one of --profile and --profile-file")),
            (None, None) => match (file.profile, file.profile_file) {
                (Some(name), None) => ProfileSource::Name(name),
                (None, Some(path)) => ProfileSource::File(path),
                (Some(_), Some(_)) => return Err(Failure::config("run file sets both `profile` and `profile_file`")),
                (None, None) => return Err(Failure::usage("no profile given (use --profile or --profile-file)")),
            },
        };
        let ontology = flags.ontology.clone().or(file.ontology);
        for path in std::iter::once(&data).chain(ontology.as_ref()) {
            if !path.is_file() {
                return Err(Failure::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "no such file")));
            }
        }
        let name = flags.name.clone().or(file.name).unwrap_or_else(|| {
            let stem = data.file_name().and_then(|s| s.to_str()).unwrap_or("kg");
            stem.trim_end_matches(".gz").trim_end_matches(".nt").to_string()
        });
        Ok(RunConfig {
            name,
            data,
            ontology,
            profile,
            lang_filter: flags.lang_filter.clone().or(file.lang_filter),
            mode: if flags.strict || file.strict { ParseMode::Strict } else { ParseMode::Lenient },
            format: file.format,
            out: file.out,
        })
    }

    pub fn load_profile(&self) -> Result<ExtractionProfile, Failure> {
        match &self.profile {
            ProfileSource::File(path) => load_profile_file(path),
            ProfileSource::Name(name) => {
                if let Some(dir) = std::env::var_os(PROFILE_DIR_ENV) {
                    let path = Path::new(&dir).join(format!("{name}.toml"));
                    if path.is_file() {
                        return load_profile_file(&path);
                    }
                }
                ExtractionProfile::bundled(name).map_err(|_| {
                    Failure::config(format!(
                        "unknown profile `{name}` (bundled: {}; or set {PROFILE_DIR_ENV})",
                        BUNDLED_PROFILES.join(", ")
                    ))
                })
            }
        }
    }
}

fn load_profile_file(path: &Path) -> Result<ExtractionProfile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    ExtractionProfile::from_toml(&text).map_err(|e| Failure::config(format!("profile `{}`: {e}", path.display())))
}
