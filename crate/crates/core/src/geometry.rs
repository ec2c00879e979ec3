//! Node placement, the unit-cell lattice of the surface and distance-based
//! channel variances.
//!
//! The surface is treated as a point at its centre for path loss; unit-cell
//! positions only feed the spatial correlation model.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::linkbudget::IrsPlacement;
use crate::{Error, Result};

pub type Point = Vector3<f64>;

/// Positions of the four network nodes in metres.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeLayout {
    pub source: Point,
    pub relay: Point,
    pub destination: Point,
    pub irs_center: Point,
}

impl NodeLayout {
    pub fn new(source: Point, relay: Point, destination: Point, irs_center: Point) -> Result<Self> {
        let layout = Self {
            source,
            relay,
            destination,
            irs_center,
        };
        let nodes = layout.nodes();
        if nodes.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::invalid("node coordinates must be finite"));
        }
        for i in 0..nodes.len() {
            for j in i + 1..nodes.len() {
                if (nodes[i] - nodes[j]).norm() <= 0.0 {
                    return Err(Error::invalid("nodes must be pairwise distinct"));
                }
            }
        }
        Ok(layout)
    }

    fn nodes(&self) -> [Point; 4] {
        [self.source, self.relay, self.destination, self.irs_center]
    }

    /// Shifts every node by `offset`.
    pub fn translated(&self, offset: Point) -> Self {
        Self {
            source: self.source + offset,
            relay: self.relay + offset,
            destination: self.destination + offset,
            irs_center: self.irs_center + offset,
        }
    }
}

/// Square `m_d x m_d` lattice of unit-cell positions.
#[derive(Debug, Clone, PartialEq)]
pub struct UcGrid {
    m_d: usize,
    spacing: f64,
    positions: Vec<Point>,
}

impl UcGrid {
    pub fn m_d(&self) -> usize {
        self.m_d
    }

    /// Number of unit cells, `m_d²`.
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Positions in row-major order: cell `m = row * m_d + col`.
    pub fn positions(&self) -> &[Point] {
        &self.positions
    }
}

/// Lays out `m_d²` cells centred on `center` in the plane with normal `orientation`.
pub fn build_uc_grid(
    m_d: usize,
    spacing: f64,
    center: Point,
    orientation: Point,
) -> Result<UcGrid> {
    if m_d == 0 {
        return Err(Error::invalid("m_d must be at least 1"));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::invalid(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    let norm = orientation.norm();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::invalid("orientation must be a non-zero vector"));
    }
    let normal = orientation / norm;
    // In-plane axes: horizontal first, then the remaining direction.
    let helper = if normal.z.abs() < 0.9 {
        Point::z()
    } else {
        Point::x()
    };
    let u = helper.cross(&normal).normalize();
    let v = normal.cross(&u);

    let half = (m_d as f64 - 1.0) / 2.0;
    let positions = (0..m_d)
        .flat_map(|row| (0..m_d).map(move |col| (row, col)))
        .map(|(row, col)| {
            center + u * ((row as f64 - half) * spacing) + v * ((col as f64 - half) * spacing)
        })
        .collect();
    Ok(UcGrid {
        m_d,
        spacing,
        positions,
    })
}

/// Log-distance path-loss model: `ρ[dB] = 10·log10((d/d0)^-α) + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub reference_distance: f64,
    pub offset_db: f64,
    /// Exponent for every link that touches the surface.
    pub alpha_irs: f64,
    /// Exponent for source-relay and relay-destination links.
    pub alpha_relay: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            reference_distance: 1.0,
            offset_db: -20.0,
            alpha_irs: 3.0,
            alpha_relay: 3.7,
        }
    }
}

impl PathLossModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.reference_distance > 0.0) {
            return Err(Error::invalid("reference distance must be positive"));
        }
        if !(self.alpha_irs > 0.0 && self.alpha_relay > 0.0) {
            return Err(Error::invalid("path-loss exponents must be positive"));
        }
        if !self.offset_db.is_finite() {
            return Err(Error::invalid("path-loss offset must be finite"));
        }
        Ok(())
    }
}

/// Linear-scale channel variance at distance `d` with exponent `alpha`.
pub fn channel_variance(d: f64, model: &PathLossModel, alpha: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::invalid(format!(
            "distance must be positive, got {d}"
        )));
    }
    let db = 10.0 * (d / model.reference_distance).powf(-alpha).log10() + model.offset_db;
    Ok(10f64.powf(db / 10.0))
}

/// Per-link channel variances of one layout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkVariances {
    pub sr: f64,
    pub rd: f64,
    pub si: f64,
    pub ir: f64,
    pub ri: f64,
    pub id: f64,
}

impl LinkVariances {
    /// All links with unit variance.
    pub const UNIT: LinkVariances = LinkVariances {
        sr: 1.0,
        rd: 1.0,
        si: 1.0,
        ir: 1.0,
        ri: 1.0,
        id: 1.0,
    };
}

pub fn scenario_variances(
    layout: &NodeLayout,
    grid: &UcGrid,
    model: &PathLossModel,
) -> Result<LinkVariances> {
    if grid.is_empty() {
        return Err(Error::invalid("empty unit-cell grid"));
    }
    model.validate()?;
    let relay_link =
        |a: &Point, b: &Point| channel_variance((a - b).norm(), model, model.alpha_relay);
    let irs_link =
        |a: &Point| channel_variance((a - layout.irs_center).norm(), model, model.alpha_irs);
    let ir = irs_link(&layout.relay)?;
    Ok(LinkVariances {
        sr: relay_link(&layout.source, &layout.relay)?,
        rd: relay_link(&layout.relay, &layout.destination)?,
        si: irs_link(&layout.source)?,
        ir,
        ri: ir,
        id: irs_link(&layout.destination)?,
    })
}

/// Fixed node positions plus both candidate surface positions and the lattice
/// parameters; resolves into a [`NodeLayout`] and [`UcGrid`] per placement.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub source: Point,
    pub relay: Point,
    pub destination: Point,
    pub irs_near_relay: Point,
    pub irs_near_source: Point,
    /// Normal of the surface plane.
    pub orientation: Point,
    /// Distance between adjacent unit cells (m).
    pub spacing: f64,
    /// Carrier wavelength (m), which sets the correlation length.
    pub wavelength: f64,
}

impl Deployment {
    pub fn irs_center(&self, placement: IrsPlacement) -> Point {
        match placement {
            IrsPlacement::NearRelay => self.irs_near_relay,
            IrsPlacement::NearSource => self.irs_near_source,
        }
    }

    pub fn layout(&self, placement: IrsPlacement) -> Result<NodeLayout> {
        NodeLayout::new(
            self.source,
            self.relay,
            self.destination,
            self.irs_center(placement),
        )
    }

    pub fn grid(&self, m_d: usize, placement: IrsPlacement) -> Result<UcGrid> {
        build_uc_grid(
            m_d,
            self.spacing,
            self.irs_center(placement),
            self.orientation,
        )
    }
}

/// `m_d` such that `m_d² = m`, if `m` is a non-zero perfect square.
pub fn side_length(m: usize) -> Option<usize> {
    let r = (m as f64).sqrt().round() as usize;
    (m > 0 && r * r == m).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64, z: f64) -> Point {
        Point::new(x, y, z)
    }

    fn layout(irs: Point) -> NodeLayout {
        NodeLayout::new(p(0., 0., 0.), p(100., 0., 0.), p(200., 0., 0.), irs).unwrap()
    }

    fn db(x: f64) -> f64 {
        10.0 * x.log10()
    }

    #[test]
    fn degenerate_grid_is_center() {
        let c = p(1., 2., 3.);
        let g = build_uc_grid(1, 0.5, c, p(0., -1., 0.)).unwrap();
        assert_eq!(g.positions(), &[c]);
    }

    #[test]
    fn two_by_two_grid_is_square() {
        let s = 0.02;
        let g = build_uc_grid(2, s, p(0., 0., 0.), p(0., -1., 0.)).unwrap();
        assert_eq!(g.len(), 4);
        let pos = g.positions();
        let mut min = f64::INFINITY;
        for i in 0..4 {
            for j in i + 1..4 {
                min = min.min((pos[i] - pos[j]).norm());
            }
        }
        assert!((min - s).abs() < 1e-15);
        // All corners lie at s/√2 from the centre.
        for q in pos {
            assert!((q.norm() - s / 2f64.sqrt()).abs() < 1e-15);
        }
    }

    #[test]
    fn twelve_grid_extent() {
        let s = 0.0197;
        let g = build_uc_grid(12, s, p(100., 2., 8.), p(0., -1., 0.)).unwrap();
        assert_eq!(g.len(), 144);
        let pos = g.positions();
        let max = pos
            .iter()
            .flat_map(|a| pos.iter().map(move |b| (a - b).norm()))
            .fold(0.0, f64::max);
        assert!((max - s * 11.0 * 2f64.sqrt()).abs() < 1e-12);
        // Lattice lies in the plane y = 2.
        assert!(pos.iter().all(|q| (q.y - 2.0).abs() < 1e-12));
    }

    #[test]
    fn grid_rejects_bad_arguments() {
        assert!(build_uc_grid(0, 1.0, p(0., 0., 0.), p(0., 0., 1.)).is_err());
        assert!(build_uc_grid(2, 0.0, p(0., 0., 0.), p(0., 0., 1.)).is_err());
        assert!(build_uc_grid(2, -1.0, p(0., 0., 0.), p(0., 0., 1.)).is_err());
        assert!(build_uc_grid(2, 1.0, p(0., 0., 0.), p(0., 0., 0.)).is_err());
    }

    #[test]
    fn variance_at_reference_distance_is_offset() {
        let m = PathLossModel::default();
        for alpha in [2.0, 3.0, 3.7] {
            assert!((channel_variance(1.0, &m, alpha).unwrap() - 1e-2).abs() < 1e-15);
        }
    }

    #[test]
    fn variance_relay_hop() {
        let m = PathLossModel::default();
        let v = channel_variance(100.0, &m, 3.7).unwrap();
        assert!((db(v) + 94.0).abs() < 1e-9);
    }

    #[test]
    fn variance_scenario_one_source_to_irs() {
        let m = PathLossModel::default();
        let d = (100f64.powi(2) + 4.0 + 64.0).sqrt();
        assert!((d - 100.3394).abs() < 1e-4);
        let v = channel_variance(d, &m, 3.0).unwrap();
        assert!((db(v) + 80.04).abs() < 0.005, "{}", db(v));
    }

    #[test]
    fn variance_rejects_non_positive_distance() {
        let m = PathLossModel::default();
        assert!(channel_variance(0.0, &m, 3.0).is_err());
        assert!(channel_variance(-1.0, &m, 3.0).is_err());
    }

    #[test]
    fn scenario_one_and_two_distances() {
        let m = PathLossModel::default();
        let short = channel_variance(68f64.sqrt(), &m, 3.0).unwrap();
        let g = build_uc_grid(4, 0.02, p(100., 2., 8.), p(0., -1., 0.)).unwrap();
        let v1 = scenario_variances(&layout(p(100., 2., 8.)), &g, &m).unwrap();
        assert!((v1.ir - short).abs() < 1e-20);
        assert_eq!(v1.ir, v1.ri);
        assert_eq!(v1.sr, v1.rd);
        assert_eq!(v1.si, v1.id);

        let v2 = scenario_variances(&layout(p(0., 2., 8.)), &g, &m).unwrap();
        assert!((v2.si - short).abs() < 1e-20);
        assert!(v2.id < v1.id);
    }

    #[test]
    fn layout_rejects_coincident_nodes() {
        let o = p(0., 0., 0.);
        assert!(NodeLayout::new(o, o, p(1., 0., 0.), p(2., 0., 0.)).is_err());
        assert!(NodeLayout::new(o, p(f64::NAN, 0., 0.), p(1., 0., 0.), p(2., 0., 0.)).is_err());
    }

    #[test]
    fn side_lengths() {
        assert_eq!(side_length(144), Some(12));
        assert_eq!(side_length(1), Some(1));
        assert_eq!(side_length(0), None);
        assert_eq!(side_length(150), None);
    }

    proptest! {
        #[test]
        fn variance_monotone(d in 0.1f64..1e4, dd in 1e-3f64..100.0, a in 1.0f64..5.0, da in 0.01f64..2.0) {
            let m = PathLossModel::default();
            prop_assert!(channel_variance(d + dd, &m, a).unwrap() < channel_variance(d, &m, a).unwrap());
            if d > 1.0 + 1e-6 {
                prop_assert!(channel_variance(d, &m, a + da).unwrap() < channel_variance(d, &m, a).unwrap());
            }
        }

        #[test]
        fn variances_translation_invariant(x in -1e3f64..1e3, y in -1e3f64..1e3, z in -1e3f64..1e3) {
            let m = PathLossModel::default();
            let g = build_uc_grid(2, 0.02, p(100., 2., 8.), p(0., -1., 0.)).unwrap();
            let base = layout(p(100., 2., 8.));
            let a = scenario_variances(&base, &g, &m).unwrap();
            let b = scenario_variances(&base.translated(p(x, y, z)), &g, &m).unwrap();
            for (u, v) in [(a.sr, b.sr), (a.rd, b.rd), (a.si, b.si), (a.ir, b.ir), (a.id, b.id)] {
                prop_assert!(((u - v) / u).abs() < 1e-9);
            }
        }
    }
}
