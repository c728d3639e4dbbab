//! Convergence of check residuals under grid refinement.

use serde::{Deserialize, Serialize};

use crate::calculus::{assemble, pointwise_identity_report};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::grid::{build_grid_with, DiffMethod, Resolution, ScalarField};
use crate::inequality::{
    affine_identity, af_local_witness, main_lemma_equality, minkowski_reports, p_chain, poincare_equality,
    spectral_gap, spectral_gap_witness, xi_identity,
};
use crate::zoo::{make_body, BodySpec};

/// Checks with a scalar error measure.
pub const STUDY_CHECKS: &[&str] = &[
    "euler",
    "identities",
    "minkowski",
    "xi_identity",
    "p_chain",
    "integration_by_parts",
    "affine_identity",
    "main_lemma_equality",
    "af_local_witness",
    "spectral_gap_witness",
    "poincare_equality",
];

/// Error measure of `check` on the body `h`: a residual for identities, the
/// relative slack magnitude for equality cases.
pub fn study_metric(check: &str, h: &ScalarField, tol: &Tolerances) -> Result<f64> {
    let g = assemble(h)?;
    let n = g.dim();
    let worst = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
    let rel = |r: crate::report::SlackReport| r.relative_slack().map_or(0.0, f64::abs);
    Ok(match check {
        "euler" => worst(pointwise_identity_report(&g).euler),
        "identities" => pointwise_identity_report(&g).algebraic_max(),
        "minkowski" => worst(minkowski_reports(&g, tol)?.into_iter().filter_map(|r| r.residual).collect()),
        "xi_identity" => {
            let m = [[0.7, 0.2, -0.1], [0.4, -0.3, 0.5], [0.1, 0.6, 0.2]];
            xi_identity(&g, &m, tol)?.residual.unwrap_or(0.0)
        }
        "p_chain" => worst(
            [-(n as f64) - 1.0, 0.0, 1.5]
                .iter()
                .map(|&p| p_chain(&g, p, tol).map(|r| r.residual.unwrap_or(0.0)))
                .collect::<Result<_>>()?,
        ),
        "integration_by_parts" => {
            let f = ScalarField::from_fn(h.grid(), |x| x[0] * x[1] + 0.3 * x[n]);
            worst((1..=n).map(|k| spectral_gap(&g, &f, k, tol).map(|r| r.residual.unwrap_or(0.0))).collect::<Result<_>>()?)
        }
        "affine_identity" => affine_identity(&g, tol)?.residual.unwrap_or(0.0),
        "main_lemma_equality" => {
            worst((1..=n).map(|k| main_lemma_equality(&g, k, tol).map(rel)).collect::<Result<_>>()?)
        }
        "af_local_witness" => worst(
            (1..=n).map(|k| af_local_witness(&g, &[0.3, -0.2, 0.5], 0.7, k, tol).map(rel)).collect::<Result<_>>()?,
        ),
        "spectral_gap_witness" => {
            worst((1..=n).map(|k| spectral_gap_witness(&g, &[0.3, -0.2, 0.5], k, tol).map(rel)).collect::<Result<_>>()?)
        }
        "poincare_equality" => {
            let f = ScalarField::from_fn(h.grid(), |x| 1.0 + 0.4 * x[0] - 0.3 * x[n]);
            rel(poincare_equality(&f, tol))
        }
        other => return Err(Error::InvalidSpec(format!("unknown study check `{other}`"))),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub resolution: Resolution,
    pub value: f64,
    /// Observed order against the previous rung.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineStudy {
    pub check: String,
    pub rows: Vec<StudyRow>,
    /// Every value is at roundoff level, so no order is meaningful.
    pub exact: bool,
    /// Both values of the final pair are at roundoff level.
    pub final_pair_exact: bool,
    pub final_order: Option<f64>,
}

impl RefineStudy {
    /// Final-pair order at least `min_order`, or roundoff on the final pair.
    pub fn passed(&self, min_order: f64) -> bool {
        self.final_pair_exact || self.final_order.is_some_and(|o| o >= min_order)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("resolution,value,order\n");
        for r in &self.rows {
            let o = r.order.map_or(String::new(), |o| o.to_string());
            s.push_str(&format!("{},{},{}\n", r.resolution, r.value, o));
        }
        s
    }
}

/// Runs `check` on the body at each rung of `ladder`.
pub fn refinement_study(
    check: &str,
    body: &BodySpec,
    ladder: &[Resolution],
    method: DiffMethod,
    tol: &Tolerances,
) -> Result<RefineStudy> {
    if ladder.len() < 2 {
        return Err(Error::BadResolution("a refinement ladder needs at least two rungs".into()));
    }
    let mut rows: Vec<StudyRow> = Vec::with_capacity(ladder.len());
    for &res in ladder {
        let grid = build_grid_with(res.dim(), res, method)?;
        let h = make_body(body, &grid)?;
        let value = study_metric(check, &h, tol)?;
        let order = rows.last().and_then(|p| {
            let ratio = res.linear_size() as f64 / p.resolution.linear_size() as f64;
            (value > 0.0 && p.value > 0.0 && ratio > 1.0).then(|| (p.value / value).ln() / ratio.ln())
        });
        rows.push(StudyRow { resolution: res, value, order });
    }
    let floor = tol.roundoff_floor;
    let at_floor = |r: &StudyRow| r.value <= floor;
    let exact = rows.iter().all(at_floor);
    let final_pair_exact = rows[rows.len() - 2..].iter().all(at_floor);
    let final_order = rows.last().and_then(|r| r.order);
    Ok(RefineStudy { check: check.to_string(), rows, exact, final_pair_exact, final_order })
}

/// Parses `16x32,24x48,32x64` (or `64,128,256` on the circle).
pub fn parse_ladder(s: &str) -> Result<Vec<Resolution>> {
    s.split(',').map(|r| r.trim().parse::<Resolution>()).collect()
}
