//! Inductive systems of finite spectral triples and their level-`J`
//! truncated realizations.
//!
//! Only the adjacent links `T_j → T_{j+1}` are stored. Every `m_{j,k}` is
//! obtained by chaining them, so the cocycle law holds by construction.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::StarHomomorphism;
use crate::error::{validation, Result};
use crate::generators::GapSequence;
use crate::operator::{eigh, operator_norm, ComplexMatrix, HermitianOperator, Isometry, SpectralDecomposition};
use crate::tolerance::Tolerances;
use crate::triple::{
    compose_morphisms, validate_morphism, validate_triple, FiniteSpectralTriple, MorphismReport, TripleMorphism,
    TripleReport,
};

/// Connecting morphism data `(φ_j, I_j)` from level `j` to level `j + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub phi: StarHomomorphism,
    pub iso: Isometry,
}

/// Which generator produced a system; used for analytic bounds.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Provenance {
    Cantor {
        gaps: GapSequence,
    },
    ChristensenIvan {
        alphas: Vec<f64>,
    },
    LinearGrowth,
    Random,
    #[default]
    Custom,
}

/// A chain `T_0 → T_1 → … → T_top` of triples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct InductiveSystem {
    provenance: Provenance,
    triples: Vec<Arc<FiniteSpectralTriple>>,
    links: Vec<Link>,
}

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    #[serde(default)]
    provenance: Provenance,
    triples: Vec<Arc<FiniteSpectralTriple>>,
    links: Vec<Link>,
}

impl TryFrom<SystemRepr> for InductiveSystem {
    type Error = crate::Error;

    fn try_from(r: SystemRepr) -> Result<Self> {
        Self::new(r.triples, r.links, r.provenance)
    }
}

impl From<InductiveSystem> for SystemRepr {
    fn from(s: InductiveSystem) -> Self {
        Self { provenance: s.provenance, triples: s.triples, links: s.links }
    }
}

impl InductiveSystem {
    /// Checks the dimension chain; the axioms are reported by
    /// [`system_validate`].
    pub fn new(triples: Vec<Arc<FiniteSpectralTriple>>, links: Vec<Link>, provenance: Provenance) -> Result<Self> {
        if triples.is_empty() {
            return validation("an inductive system needs at least one triple");
        }
        if links.len() + 1 != triples.len() {
            return validation(format!("{} triples need {} links, got {}", triples.len(), triples.len() - 1, links.len()));
        }
        for (j, link) in links.iter().enumerate() {
            TripleMorphism::new(link.phi.clone(), link.iso.clone(), triples[j].clone(), triples[j + 1].clone())
                .map_err(|e| crate::Error::Validation(format!("link {j}→{}: {e}", j + 1)))?;
        }
        Ok(Self { provenance, triples, links })
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn top_level(&self) -> usize {
        self.triples.len() - 1
    }

    pub fn triple(&self, j: usize) -> &Arc<FiniteSpectralTriple> {
        &self.triples[j]
    }

    pub fn triples(&self) -> &[Arc<FiniteSpectralTriple>] {
        &self.triples
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn dims(&self) -> Vec<usize> {
        self.triples.iter().map(|t| t.hilbert_dim()).collect()
    }

    pub fn link_morphism(&self, j: usize) -> TripleMorphism {
        let link = &self.links[j];
        TripleMorphism {
            phi: link.phi.clone(),
            iso: link.iso.clone(),
            source: self.triples[j].clone(),
            target: self.triples[j + 1].clone(),
        }
    }

    /// The first `levels + 1` triples.
    pub fn truncate(&self, levels: usize) -> Result<Self> {
        if levels > self.top_level() {
            return validation(format!("level {levels} exceeds the top level {}", self.top_level()));
        }
        Ok(Self {
            provenance: self.provenance.clone(),
            triples: self.triples[..=levels].to_vec(),
            links: self.links[..levels].to_vec(),
        })
    }
}

/// `m_{j,k}`: the links `j → j+1 → … → k` composed; the identity for `j = k`.
pub fn embed(s: &InductiveSystem, j: usize, k: usize) -> Result<TripleMorphism> {
    if j > k || k > s.top_level() {
        return validation(format!("cannot embed level {j} into level {k} (top level {})", s.top_level()));
    }
    let mut m = TripleMorphism::identity(s.triples[j].clone());
    for l in j..k {
        m = compose_morphisms(&m, &s.link_morphism(l))?;
    }
    Ok(m)
}

/// Per-level and per-link validation residuals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemReport {
    pub triples: Vec<TripleReport>,
    pub links: Vec<MorphismReport>,
    pub passed: bool,
    pub failures: Vec<String>,
}

pub fn system_validate(s: &InductiveSystem, tol: &Tolerances) -> Result<SystemReport> {
    let triples: Vec<TripleReport> =
        s.triples.par_iter().map(|t| validate_triple(t, tol)).collect::<Result<_>>()?;
    let links: Vec<MorphismReport> = (0..s.links.len())
        .into_par_iter()
        .map(|j| validate_morphism(&s.link_morphism(j), tol))
        .collect::<Result<_>>()?;
    let mut failures = Vec::new();
    for (j, r) in triples.iter().enumerate() {
        failures.extend(r.failures.iter().map(|f| format!("triple {j}: {f}")));
    }
    for (j, r) in links.iter().enumerate() {
        failures.extend(r.failures.iter().map(|f| format!("link {j}→{}: {f}", j + 1)));
    }
    Ok(SystemReport { triples, links, passed: failures.is_empty(), failures })
}

/// Spectral data of one level, lifted into the ambient space.
#[derive(Debug)]
pub(crate) struct LevelSpectrum {
    pub decomposition: SpectralDecomposition,
    /// `E_j U_j`: eigenvectors of `D_j` embedded in `H_J`.
    pub lifted: ComplexMatrix,
}

/// Level-`J` truncation of the inductive realization.
///
/// All ambient computations happen in `H_J` coordinates; `E_j = I_{j,J}` and
/// `P_j = E_j E_j*`. Spectral data is computed lazily and cached, so a shared
/// realization can serve concurrent diagnostics.
#[derive(Debug)]
pub struct Realization {
    level: usize,
    provenance: Provenance,
    triples: Vec<Arc<FiniteSpectralTriple>>,
    phis: Vec<StarHomomorphism>,
    embeddings: Vec<Isometry>,
    tol: Tolerances,
    ambient_spectrum: SpectralDecomposition,
    levels: Vec<OnceLock<LevelSpectrum>>,
    containment: Vec<OnceLock<Vec<f64>>>,
}

pub fn realize(s: &InductiveSystem, level: usize, tol: &Tolerances) -> Result<Realization> {
    if level > s.top_level() {
        return validation(format!("level {level} exceeds the top level {}", s.top_level()));
    }
    let mut embeddings = vec![Isometry::identity(s.triples[level].hilbert_dim())];
    let mut phis = vec![StarHomomorphism::identity(s.triples[level].algebra())];
    for j in (0..level).rev() {
        let link = &s.links[j];
        let e = embeddings.last().expect("nonempty").after(&link.iso)?;
        let phi = link.phi.then(phis.last().expect("nonempty"))?;
        embeddings.push(e);
        phis.push(phi);
    }
    embeddings.reverse();
    phis.reverse();
    let ambient_spectrum = eigh(s.triples[level].dirac(), tol)?;
    Ok(Realization {
        level,
        provenance: s.provenance.clone(),
        triples: s.triples[..=level].to_vec(),
        phis,
        embeddings,
        tol: *tol,
        ambient_spectrum,
        levels: (0..=level).map(|_| OnceLock::new()).collect(),
        containment: (0..=level).map(|_| OnceLock::new()).collect(),
    })
}

impl Realization {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn ambient(&self) -> &FiniteSpectralTriple {
        &self.triples[self.level]
    }

    pub fn dim(&self) -> usize {
        self.ambient().hilbert_dim()
    }

    pub fn triple(&self, j: usize) -> &FiniteSpectralTriple {
        &self.triples[j]
    }

    /// `I_{j,J}`.
    pub fn embedding(&self, j: usize) -> &Isometry {
        &self.embeddings[j]
    }

    /// `φ_{j,J}`.
    pub fn phi(&self, j: usize) -> &StarHomomorphism {
        &self.phis[j]
    }

    /// `P_j = I_{j,J} I_{j,J}*`.
    pub fn projection(&self, j: usize) -> HermitianOperator {
        self.embeddings[j].range_projection()
    }

    pub fn ambient_spectrum(&self) -> &SpectralDecomposition {
        &self.ambient_spectrum
    }

    pub fn morphism(&self, j: usize) -> TripleMorphism {
        TripleMorphism {
            phi: self.phis[j].clone(),
            iso: self.embeddings[j].clone(),
            source: self.triples[j].clone(),
            target: self.triples[self.level].clone(),
        }
    }

    pub(crate) fn level_spectrum(&self, j: usize) -> Result<&LevelSpectrum> {
        self.check_level(j)?;
        if let Some(s) = self.levels[j].get() {
            return Ok(s);
        }
        let decomposition = if j == self.level {
            self.ambient_spectrum.clone()
        } else {
            eigh(self.triples[j].dirac(), &self.tol)?
        };
        let lifted = self.embeddings[j].matrix().checked_mul(decomposition.eigenvectors())?;
        Ok(self.levels[j].get_or_init(|| LevelSpectrum { decomposition, lifted }))
    }

    /// `D_j`'s eigendecomposition.
    pub fn level_decomposition(&self, j: usize) -> Result<&SpectralDecomposition> {
        Ok(&self.level_spectrum(j)?.decomposition)
    }

    /// `‖Q_c − P_j Q_c‖ = ‖U_c − E_j(E_j* U_c)‖` for every eigenvalue cluster
    /// `c` of `D_J`.
    pub fn cluster_containment(&self, j: usize) -> Result<&[f64]> {
        self.check_level(j)?;
        if let Some(r) = self.containment[j].get() {
            return Ok(r);
        }
        let d = &self.ambient_spectrum;
        let residuals: Vec<f64> = (0..d.groups().len())
            .into_par_iter()
            .map(|g| {
                let u = d.group_vectors(g);
                let pu = self.embeddings[j].project(&u).expect("shapes agree");
                operator_norm(&(&u - &pu))
            })
            .collect();
        Ok(self.containment[j].get_or_init(|| residuals))
    }

    pub(crate) fn check_level(&self, j: usize) -> Result<()> {
        if j > self.level {
            return validation(format!("level {j} exceeds the realization level {}", self.level));
        }
        Ok(())
    }
}

/// Residuals of the realization identities at one level `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationLevelReport {
    pub level: usize,
    /// `‖I_{j,J}* I_{j,J} − 1‖`; zero iff `P_j` is an orthogonal projection.
    pub projection_residual: f64,
    /// `‖P_{j+1} I_{j,J} − I_{j,J}‖`, i.e. `P_j ≤ P_{j+1}`; zero at `j = J`.
    pub monotonicity_residual: f64,
    /// `‖[P_j, D_J]‖`.
    pub dirac_commutation: f64,
    /// `‖I_{j,J} D_j − D_J I_{j,J}‖`.
    pub dirac_intertwining: f64,
    /// `max_k ‖π_J(φ_{j,J}(e_k)) I_{j,J} − I_{j,J} π_j(e_k)‖_F`.
    pub algebra_intertwining: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationReport {
    pub levels: Vec<RealizationLevelReport>,
    pub passed: bool,
    pub failures: Vec<String>,
}

pub fn realization_validate(r: &Realization, tol: &Tolerances) -> Result<RealizationReport> {
    let d = r.ambient().dirac().matrix();
    let scale = r.ambient_spectrum.spectral_radius().max(1.0);
    let levels: Vec<RealizationLevelReport> = (0..=r.level)
        .into_par_iter()
        .map(|j| {
            let m = validate_morphism(&r.morphism(j), tol)?;
            let e = r.embeddings[j].matrix();
            let monotonicity_residual = if j < r.level {
                let next = &r.embeddings[j + 1];
                operator_norm(&(&next.project(e)? - e))
            } else {
                0.0
            };
            // [P_j, D] = E(E* D) − (D E) E*
            let pd = r.embeddings[j].project(d)?;
            let dp = d.checked_mul(e)?.checked_mul(&e.adjoint())?;
            Ok(RealizationLevelReport {
                level: j,
                projection_residual: m.isometry_residual,
                monotonicity_residual,
                dirac_commutation: operator_norm(&(&pd - &dp)),
                dirac_intertwining: m.dirac_intertwining,
                algebra_intertwining: m.algebra_intertwining,
            })
        })
        .collect::<Result<_>>()?;
    let mut failures = Vec::new();
    for l in &levels {
        let checks = [
            ("P_j is not a projection", l.projection_residual, tol.validation),
            ("P_j is not below P_{j+1}", l.monotonicity_residual, tol.validation),
            ("P_j does not commute with D", l.dirac_commutation, tol.validation * scale),
            ("Dirac operators not intertwined", l.dirac_intertwining, tol.validation * scale),
            ("representations not intertwined", l.algebra_intertwining, tol.validation),
        ];
        for (what, value, limit) in checks {
            if value > limit {
                failures.push(format!("level {}: {what} ({value:e})", l.level));
            }
        }
    }
    Ok(RealizationReport { levels, passed: failures.is_empty(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use crate::generators::{cantor_system, middle_thirds};

    fn complex(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn cantor(levels: usize) -> InductiveSystem {
        cantor_system(&middle_thirds(levels), levels, false).unwrap()
    }

    #[test]
    fn embed_same_level_is_identity() {
        let s = cantor(3);
        let m = embed(&s, 2, 2).unwrap();
        assert_eq!(m.iso, Isometry::identity(6));
        assert_eq!(m.phi, StarHomomorphism::identity(s.triple(2).algebra()));
    }

    #[test]
    fn embed_is_chained_composition() {
        let s = cantor(3);
        let direct = embed(&s, 0, 2).unwrap();
        let chained = compose_morphisms(&embed(&s, 0, 1).unwrap(), &embed(&s, 1, 2).unwrap()).unwrap();
        assert_eq!(direct.iso, chained.iso);
        assert_eq!(direct.phi, chained.phi);
        assert!(embed(&s, 2, 1).is_err());
    }

    #[test]
    fn cantor_embedding_is_coordinate_inclusion() {
        let s = cantor(3);
        let m = embed(&s, 0, 3).unwrap();
        let expected = ComplexMatrix::from_fn(8, 2, |i, j| complex(if i == j { 1.0 } else { 0.0 }));
        assert_eq!(m.iso.matrix(), &expected);
    }

    #[test]
    fn realize_level_zero_is_the_first_triple() {
        let s = cantor(2);
        let r = realize(&s, 0, &Tolerances::default()).unwrap();
        assert_eq!(r.ambient(), &**s.triple(0));
        assert_eq!(r.projection(0).matrix(), &ComplexMatrix::identity(2));
        assert!(realize(&s, 3, &Tolerances::default()).is_err());
    }

    #[test]
    fn cantor_realization_dimensions() {
        let s = cantor(3);
        let r = realize(&s, 3, &Tolerances::default()).unwrap();
        assert_eq!(r.dim(), 8);
        let p1 = r.projection(1);
        let rank: f64 = p1.matrix().trace().re;
        assert!((rank - 4.0).abs() < 1e-14);
        assert!(realization_validate(&r, &Tolerances::default()).unwrap().passed);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let s = cantor(3);
        let text = serde_json::to_string(&s).unwrap();
        let back: InductiveSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
