//! JSON representation of models.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major nested
//! arrays of them. Operator arrays are nested lists of matrices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{CMatrix, OpArray, Operator, SpaceLayout};
use crate::slh::{PortSet, SLHModel, StratonovichModel};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_rows(m: &CMatrix) -> MatrixJson {
    m.row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &MatrixJson) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |r, c| {
        let [re, im] = rows[r][c];
        Complex64::new(re, im)
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorJson {
    pub label: String,
    pub dim: usize,
}

fn layout_to_json(layout: &SpaceLayout) -> Vec<FactorJson> {
    layout
        .factors()
        .iter()
        .map(|f| FactorJson {
            label: f.label.clone(),
            dim: f.dim,
        })
        .collect()
}

fn layout_from_json(factors: &[FactorJson]) -> Result<SpaceLayout> {
    SpaceLayout::new(factors.iter().map(|f| (f.label.clone(), f.dim)))
}

fn array_to_json(a: &OpArray) -> Vec<Vec<MatrixJson>> {
    (0..a.rows())
        .map(|j| (0..a.cols()).map(|k| matrix_to_rows(a.entry(j, k).matrix())).collect())
        .collect()
}

fn array_from_json(layout: &SpaceLayout, cols: usize, rows: &[Vec<MatrixJson>]) -> Result<OpArray> {
    let entries = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|m| Operator::new(layout.clone(), rows_to_matrix(m)?))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    OpArray::from_entries(layout, cols, &entries)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlhJson {
    pub ports: Vec<String>,
    pub layout: Vec<FactorJson>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<MatrixJson>>,
    #[serde(rename = "L")]
    pub l: Vec<MatrixJson>,
    #[serde(rename = "H")]
    pub h: MatrixJson,
}

impl From<&SLHModel> for SlhJson {
    fn from(g: &SLHModel) -> Self {
        Self {
            ports: g.ports().labels().to_vec(),
            layout: layout_to_json(g.layout()),
            s: array_to_json(g.s()),
            l: array_to_json(g.l()).into_iter().map(|mut r| r.remove(0)).collect(),
            h: matrix_to_rows(g.h().matrix()),
        }
    }
}

impl TryFrom<&SlhJson> for SLHModel {
    type Error = Error;

    fn try_from(j: &SlhJson) -> Result<Self> {
        let layout = layout_from_json(&j.layout)?;
        let n = j.ports.len();
        let s = array_from_json(&layout, n, &j.s)?;
        let l_rows: Vec<Vec<MatrixJson>> = j.l.iter().map(|m| vec![m.clone()]).collect();
        let l = array_from_json(&layout, 1, &l_rows)?;
        let h = Operator::new(layout, rows_to_matrix(&j.h)?)?;
        SLHModel::new(PortSet::new(j.ports.iter().cloned())?, s, l, h)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratJson {
    pub ports: Vec<String>,
    pub layout: Vec<FactorJson>,
    #[serde(rename = "E00")]
    pub e00: MatrixJson,
    #[serde(rename = "E0k")]
    pub e0k: Vec<MatrixJson>,
    #[serde(rename = "Ek0")]
    pub ek0: Vec<MatrixJson>,
    #[serde(rename = "Ekk")]
    pub ekk: Vec<Vec<MatrixJson>>,
}

impl From<&StratonovichModel> for StratJson {
    fn from(e: &StratonovichModel) -> Self {
        Self {
            ports: e.ports().labels().to_vec(),
            layout: layout_to_json(e.layout()),
            e00: matrix_to_rows(e.e00().matrix()),
            e0k: array_to_json(&e.e0k()).remove(0),
            ek0: array_to_json(&e.ek0()).into_iter().map(|mut r| r.remove(0)).collect(),
            ekk: array_to_json(&e.ekk()),
        }
    }
}

impl TryFrom<&StratJson> for StratonovichModel {
    type Error = Error;

    /// `E0k` is checked against `Ek0†` by the Hermiticity test on the whole array.
    fn try_from(j: &StratJson) -> Result<Self> {
        let layout = layout_from_json(&j.layout)?;
        let n = j.ports.len();
        let d = layout.dim();
        let e00 = rows_to_matrix(&j.e00)?;
        let e0k = array_from_json(&layout, n, &[j.e0k.clone()])?;
        let ek0_rows: Vec<Vec<MatrixJson>> = j.ek0.iter().map(|m| vec![m.clone()]).collect();
        let ek0 = array_from_json(&layout, 1, &ek0_rows)?;
        let ekk = array_from_json(&layout, n, &j.ekk)?;
        if e00.shape() != (d, d) {
            return Err(Error::DimensionMismatch("E00 does not match the layout".into()));
        }
        let mut data = CMatrix::zeros((n + 1) * d, (n + 1) * d);
        data.view_mut((0, 0), (d, d)).copy_from(&e00);
        data.view_mut((0, d), (d, n * d)).copy_from(e0k.data());
        data.view_mut((d, 0), (n * d, d)).copy_from(ek0.data());
        data.view_mut((d, d), (n * d, n * d)).copy_from(ekk.data());
        StratonovichModel::new(
            PortSet::new(j.ports.iter().cloned())?,
            OpArray::new(layout, n + 1, n + 1, data)?,
        )
    }
}
