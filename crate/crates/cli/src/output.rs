use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::Failure;

/// Output directory whose files are written to a temporary name and renamed
/// into place, so readers never see a partial file.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(root).map_err(|e| Failure::Usage(format!("{}: {e}", root.display())))?;
        Ok(Self {
            root: root.to_path_buf(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), Failure> {
        let target = self.root.join(name);
        let tmp = self.root.join(format!(".{name}.{}.tmp", std::process::id()));
        let io = |e: std::io::Error| Failure::Usage(format!("{}: {e}", target.display()));
        {
            let mut f = fs::File::create(&tmp).map_err(io)?;
            f.write_all(contents.as_bytes()).map_err(io)?;
            f.sync_all().map_err(io)?;
        }
        fs::rename(&tmp, &target).map_err(io)
    }
}
