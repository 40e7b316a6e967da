//! Subcommand parameters. Each struct doubles as the command-line flag set
//! and as the schema of a TOML config file; flags win over file keys.

use clap::Args;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

macro_rules! params {
    ($(#[$m:meta])* $name:ident { $($(#[$fm:meta])* $f:ident : $t:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, Args, Deserialize, Serialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            $($(#[$fm])* #[serde(default, skip_serializing_if = "Option::is_none")] pub $f: Option<$t>,)*
        }

        impl $name {
            /// Fields set on the command line take precedence over `file`.
            pub fn layered(self, file: Self) -> Self {
                Self { $($f: self.$f.or(file.$f),)* }
            }
        }
    };
}

params!(PadeParams {
    /// Numerator degree.
    #[arg(long = "M")]
    #[serde(rename = "M")]
    m: usize,
    /// Denominator degree.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: usize,
    /// Number of sampled angles for the reflection-coefficient table (0 = none).
    #[arg(long)]
    samples: usize,
    #[arg(long)]
    out_dir: PathBuf,
});

params!(MeshParams {
    /// Scene file (TOML).
    #[arg(long)]
    scene: PathBuf,
    /// Wavenumber used by the mesh-size rule.
    #[arg(long)]
    k: f64,
    /// Mesh constant C in h = C k^(-1-1/(2p)).
    #[arg(long = "C")]
    #[serde(rename = "C")]
    c: f64,
    /// Element order (1 or 2).
    #[arg(long)]
    p: u32,
    /// Extend the mesh over the PML annulus of the scene.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pml: bool,
    #[arg(long)]
    out_dir: PathBuf,
});

params!(SolveParams {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    k: f64,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    m: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: usize,
    /// Incident direction in degrees from the x axis.
    #[arg(long)]
    angle_deg: f64,
    #[arg(long = "C")]
    #[serde(rename = "C")]
    c: f64,
    #[arg(long)]
    p: u32,
    /// Add the curvature term on circular truncation boundaries.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    curvature: bool,
    #[arg(long)]
    out_dir: PathBuf,
});

params!(ReferenceParams {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    k: f64,
    #[arg(long)]
    angle_deg: f64,
    #[arg(long = "C")]
    #[serde(rename = "C")]
    c: f64,
    #[arg(long)]
    p: u32,
    /// Damping strength; tuned to the layer width when absent.
    #[arg(long)]
    sigma0: f64,
    #[arg(long)]
    out_dir: PathBuf,
});

params!(MieParams {
    #[arg(long)]
    k: f64,
    /// Disc radius.
    #[arg(long)]
    radius: f64,
    #[arg(long)]
    angle_deg: f64,
    /// Outer radius of the sampling grid.
    #[arg(long)]
    r_max: f64,
    /// Grid points per direction (radial and angular).
    #[arg(long)]
    n: usize,
    #[arg(long)]
    out_dir: PathBuf,
});

params!(RaysParams {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long = "M")]
    #[serde(rename = "M")]
    m: usize,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: usize,
    /// Number of rays or samples.
    #[arg(long = "n")]
    #[serde(rename = "rays")]
    rays: usize,
    /// direct | angles | unfold | reentrant
    #[arg(long)]
    mode: String,
    #[arg(long)]
    angle_deg: f64,
    /// Seed of the Monte-Carlo sampler.
    #[arg(long)]
    seed: u64,
    /// Bounce limit per ray.
    #[arg(long)]
    bounces: usize,
    /// Histogram bins.
    #[arg(long)]
    bins: usize,
    #[arg(long)]
    out_dir: PathBuf,
});

params!(ExperimentParams {
    /// ball | butterfly | square_fixedR | square_growR | custom
    #[arg(long)]
    table: String,
    /// Experiment spec file (required for custom tables).
    #[arg(long)]
    spec: PathBuf,
    /// Drop rows with k above this value.
    #[arg(long)]
    kmax: f64,
    #[arg(long)]
    workers: usize,
    /// Largest PML system size per row.
    #[arg(long)]
    dof_cap: usize,
    #[arg(long = "C")]
    #[serde(rename = "C")]
    c: f64,
    #[arg(long)]
    out_dir: PathBuf,
});
