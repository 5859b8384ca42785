//! RESULTS.md summary and gnuplot script emission.

use std::path::Path;

use anyhow::{Context, Result};

pub struct Results {
    title: String,
    sections: Vec<(String, String)>,
}

impl Results {
    pub fn new(title: &str) -> Self {
        Self {
            title: title.to_string(),
            sections: Vec::new(),
        }
    }

    pub fn section(&mut self, heading: &str, body: String) {
        self.sections.push((heading.to_string(), body));
    }

    pub fn write(&self, out_dir: &Path) -> Result<()> {
        let mut text = format!("# {}\n", self.title);
        for (heading, body) in &self.sections {
            text.push_str(&format!("\n## {heading}\n\n{body}\n"));
        }
        let path = out_dir.join("RESULTS.md");
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }
}

/// Data-only plot script for the sweep CSVs; no plotting dependency, feed it
/// to gnuplot directly.
pub fn write_gnuplot_script(
    out_dir: &Path,
    script_name: &str,
    csv_files: &[String],
    columns: &[String],
) -> Result<()> {
    let mut s = String::from(
        "set datafile separator ','\n\
         set logscale x\n\
         set xlabel 'eigenvalue d'\n\
         set ylabel 'convergence factor'\n\
         set key outside\n",
    );
    let mut plots = Vec::new();
    for file in csv_files {
        for (i, col) in columns.iter().enumerate() {
            plots.push(format!(
                "'{file}' using 1:{} with lines title '{col} {file}'",
                i + 2
            ));
        }
    }
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s.push_str("pause -1 'press enter'\n");
    let path = out_dir.join(script_name);
    std::fs::write(&path, s).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
