//! Legacy ASCII VTK rectilinear grids with cell data.

use std::fmt::Write as _;
use std::path::Path;

use adaptflow_core::analysis::RegionLabels;
use adaptflow_core::grid::{magnitudes, reconstruct_cell_flux, CartGrid, CellField, FaceField};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum CellData {
    Scalars(Vec<f64>),
    Ints(Vec<i64>),
    Vectors(Vec<[f64; 3]>),
}

impl CellData {
    fn len(&self) -> usize {
        match self {
            CellData::Scalars(v) => v.len(),
            CellData::Ints(v) => v.len(),
            CellData::Vectors(v) => v.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VtkDataset {
    pub title: String,
    /// Node coordinates per axis.
    pub coords: [Vec<f64>; 3],
    pub cell_data: Vec<(String, CellData)>,
}

impl VtkDataset {
    /// Empty dataset on the nodes of `grid`. A 2D grid becomes one layer of
    /// cells spanning its thickness.
    pub fn from_grid(grid: &CartGrid, title: &str) -> Self {
        let n = grid.dims();
        let h = grid.spacing();
        let o = grid.origin();
        let coords = std::array::from_fn(|a| (0..=n[a]).map(|i| o[a] + i as f64 * h[a]).collect());
        Self { title: title.replace('\n', " "), coords, cell_data: Vec::new() }
    }

    pub fn n_cells(&self) -> usize {
        self.coords.iter().map(|c| c.len().saturating_sub(1)).product()
    }

    pub fn add(&mut self, name: &str, data: CellData) -> Result<()> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(Error::Vtk(format!("invalid field name `{name}`")));
        }
        if data.len() != self.n_cells() {
            return Err(Error::Vtk(format!("field {name} has {} values, grid has {} cells", data.len(), self.n_cells())));
        }
        self.cell_data.push((name.to_string(), data));
        Ok(())
    }

    pub fn field(&self, name: &str) -> Option<&CellData> {
        self.cell_data.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    pub fn to_vtk_string(&self) -> String {
        let mut s = String::new();
        let dims = self.coords.each_ref().map(Vec::len);
        let _ = writeln!(s, "# vtk DataFile Version 3.0\n{}\nASCII\nDATASET RECTILINEAR_GRID", self.title);
        let _ = writeln!(s, "DIMENSIONS {} {} {}", dims[0], dims[1], dims[2]);
        for (axis, c) in ["X", "Y", "Z"].iter().zip(&self.coords) {
            let _ = writeln!(s, "{axis}_COORDINATES {} double", c.len());
            let _ = writeln!(s, "{}", join(c.iter()));
        }
        let _ = writeln!(s, "CELL_DATA {}", self.n_cells());
        for (name, data) in &self.cell_data {
            match data {
                CellData::Scalars(v) => {
                    let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
                    for x in v {
                        let _ = writeln!(s, "{x:e}");
                    }
                }
                CellData::Ints(v) => {
                    let _ = writeln!(s, "SCALARS {name} int 1\nLOOKUP_TABLE default");
                    for x in v {
                        let _ = writeln!(s, "{x}");
                    }
                }
                CellData::Vectors(v) => {
                    let _ = writeln!(s, "VECTORS {name} double");
                    for x in v {
                        let _ = writeln!(s, "{:e} {:e} {:e}", x[0], x[1], x[2]);
                    }
                }
            }
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_vtk_string()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses the subset of the legacy format written by [`Self::to_vtk_string`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default();
        if !header.starts_with("# vtk DataFile Version") {
            return Err(Error::Vtk("missing legacy header".into()));
        }
        let title = lines.next().ok_or_else(|| Error::Vtk("missing title".into()))?.to_string();
        let rest: Vec<&str> = lines.flat_map(str::split_whitespace).collect();
        let mut t = Tokens { toks: &rest, pos: 0 };
        t.expect("ASCII")?;
        t.expect("DATASET")?;
        t.expect("RECTILINEAR_GRID")?;
        t.expect("DIMENSIONS")?;
        let dims = [t.usize()?, t.usize()?, t.usize()?];
        let mut coords: [Vec<f64>; 3] = Default::default();
        for (a, axis) in ["X_COORDINATES", "Y_COORDINATES", "Z_COORDINATES"].iter().enumerate() {
            t.expect(axis)?;
            let n = t.usize()?;
            if n != dims[a] {
                return Err(Error::Vtk(format!("{axis} count {n} differs from DIMENSIONS")));
            }
            t.next()?;
            coords[a] = (0..n).map(|_| t.f64()).collect::<Result<_>>()?;
        }
        let mut ds = Self { title, coords, cell_data: Vec::new() };
        if t.done() {
            return Ok(ds);
        }
        t.expect("CELL_DATA")?;
        let n = t.usize()?;
        if n != ds.n_cells() {
            return Err(Error::Vtk(format!("CELL_DATA {n} differs from grid cell count {}", ds.n_cells())));
        }
        while !t.done() {
            let kind = t.next()?;
            let name = t.next()?.to_string();
            let ty = t.next()?;
            let data = match kind {
                "SCALARS" => {
                    if t.peek() == Some("1") {
                        t.next()?;
                    }
                    t.expect("LOOKUP_TABLE")?;
                    t.next()?;
                    match ty {
                        "int" => CellData::Ints((0..n).map(|_| t.i64()).collect::<Result<_>>()?),
                        _ => CellData::Scalars((0..n).map(|_| t.f64()).collect::<Result<_>>()?),
                    }
                }
                "VECTORS" => CellData::Vectors(
                    (0..n).map(|_| Ok([t.f64()?, t.f64()?, t.f64()?])).collect::<Result<_>>()?,
                ),
                other => return Err(Error::Vtk(format!("unsupported section {other}"))),
            };
            ds.cell_data.push((name, data));
        }
        Ok(ds)
    }
}

fn join<'a>(v: impl Iterator<Item = &'a f64>) -> String {
    v.map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ")
}

struct Tokens<'a> {
    toks: &'a [&'a str],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).copied()
    }

    fn next(&mut self) -> Result<&'a str> {
        let t = self.peek().ok_or_else(|| Error::Vtk("unexpected end of file".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, want: &str) -> Result<()> {
        let got = self.next()?;
        if got != want {
            return Err(Error::Vtk(format!("expected {want}, found {got}")));
        }
        Ok(())
    }

    fn parse<T: std::str::FromStr>(&mut self) -> Result<T> {
        let tok = self.next()?;
        tok.parse().map_err(|_| Error::Vtk(format!("bad number `{tok}`")))
    }

    fn usize(&mut self) -> Result<usize> {
        self.parse()
    }

    fn i64(&mut self) -> Result<i64> {
        self.parse()
    }

    fn f64(&mut self) -> Result<f64> {
        self.parse()
    }
}

/// Solution dataset with pressure, cell flux, flux magnitude, optional
/// region labels (1 fast, 0 slow) and log10 permeability.
pub fn solution_dataset(
    grid: &CartGrid,
    title: &str,
    pressure: &CellField<f64>,
    flux: &FaceField,
    labels: Option<&RegionLabels>,
    log10_k: &[f64],
) -> Result<VtkDataset> {
    let cell_u = reconstruct_cell_flux(grid, flux)?;
    let mags = magnitudes(&cell_u);
    let mut ds = VtkDataset::from_grid(grid, title);
    ds.add("pressure", CellData::Scalars(pressure.values().to_vec()))?;
    ds.add("flux", CellData::Vectors(cell_u.into_values()))?;
    ds.add("flux_magnitude", CellData::Scalars(mags.into_values()))?;
    if let Some(l) = labels {
        ds.add("region", CellData::Ints((0..l.labels.len()).map(|c| i64::from(l.is_fast(c))).collect()))?;
    }
    ds.add("log10_permeability", CellData::Scalars(log10_k.to_vec()))?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let g = CartGrid::new_2d(3, 2, 0.1, 0.3, 2.0).unwrap();
        let mut ds = VtkDataset::from_grid(&g, "test");
        ds.add("p", CellData::Scalars(vec![1.0, -2.5e-300, 1.0 / 3.0, 1e10, 0.0, f64::MIN_POSITIVE])).unwrap();
        ds.add("r", CellData::Ints(vec![0, 1, 1, 0, 0, 1])).unwrap();
        ds.add("u", CellData::Vectors(vec![[0.1, 0.2, 0.3]; 6])).unwrap();
        let text = ds.to_vtk_string();
        assert!(text.starts_with("# vtk DataFile Version 3.0\ntest\nASCII\nDATASET RECTILINEAR_GRID\nDIMENSIONS 4 3 2\n"));
        assert_eq!(VtkDataset::parse(&text).unwrap(), ds);
    }

    #[test]
    fn rejects_mismatched_fields() {
        let g = CartGrid::new_2d(2, 2, 1.0, 1.0, 1.0).unwrap();
        let mut ds = VtkDataset::from_grid(&g, "t");
        assert!(ds.add("p", CellData::Scalars(vec![0.0; 3])).is_err());
        assert!(ds.add("bad name", CellData::Scalars(vec![0.0; 4])).is_err());
        assert!(VtkDataset::parse("nonsense").is_err());
        let text = ds.to_vtk_string().replace("DIMENSIONS 3 3 2", "DIMENSIONS 3 4 2");
        assert!(VtkDataset::parse(&text).is_err());
    }
}
