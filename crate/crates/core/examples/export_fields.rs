//! Write an extension on a grid as CSV with a JSON sidecar, then its FFT
//! transform as CSV. Files go to the system temp directory.
//!
//!     cargo run --release --example export_fields

use std::fs::File;
use std::io::BufWriter;

use inflexion::extender::{build_extension, export_field, ExtensionSpec, GridSpec};
use inflexion::models::FunctionModel;
use inflexion::spectral::{ft_grid, sample_source};

fn main() -> inflexion::Result<()> {
    let model = FunctionModel::parse("product(gaussian,rational{p=2})", 2)?;
    let ext = build_extension(ExtensionSpec::new(model, 4.0, 3, 2)?)?;
    let grid = GridSpec::centered(2, ext.outer(), 81)?;
    let dir = std::env::temp_dir();

    let field = dir.join("inflexion_field.csv");
    let mut csv = BufWriter::new(File::create(&field)?);
    let mut side = BufWriter::new(File::create(dir.join("inflexion_field.csv.json"))?);
    export_field(&ext, &grid, &mut csv, &mut side)?;
    println!("wrote {} ({} points)", field.display(), grid.len());

    let spectrum = ft_grid(&sample_source(&ext, &grid)?, &grid)?;
    let out = dir.join("inflexion_spectrum.csv");
    spectrum.write_csv(&mut BufWriter::new(File::create(&out)?))?;
    println!("wrote {}, max |F| = {:.6}", out.display(), spectrum.max_abs());
    Ok(())
}
