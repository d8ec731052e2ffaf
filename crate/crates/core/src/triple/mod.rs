//! Finite spectral triples `(A, H, D)`, isometric morphisms between them,
//! commutator seminorms, grading diagnostics and the spectral distance.

mod distance;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{hom_apply, hom_validate, AlgebraElement, FiniteCStarAlgebra, HomReport, StarHomomorphism};
use crate::error::{validation, Result};
use crate::operator::{commutator, operator_norm, ComplexMatrix, HermitianOperator, Isometry};
use crate::tolerance::Tolerances;

pub use distance::{connes_distance, connes_distance_with, Distance, DistanceMethod};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A representation of a finite C*-algebra on `ℂ^N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Representation {
    /// Commutative algebra acting by multiplication: basis vector `i` sits
    /// over point `labels[i]`, so `π(f) = diag(f(labels[i]))`.
    Diagonal { labels: Vec<usize> },
    /// `images[k] = π(e_k)` for every matrix unit `e_k`.
    Matrices { images: Vec<ComplexMatrix> },
}

/// Residuals of the representation axioms, in Frobenius norm (an upper
/// bound for the operator norm).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationReport {
    pub unit_residual: f64,
    pub multiplicative_residual: f64,
    pub star_residual: f64,
    /// Smallest singular value of `a ↦ π(a)` on matrix-unit coordinates.
    pub faithfulness_margin: f64,
}

impl Representation {
    pub fn hilbert_dim(&self) -> usize {
        match self {
            Self::Diagonal { labels } => labels.len(),
            Self::Matrices { images } => images.first().map_or(0, ComplexMatrix::rows),
        }
    }

    /// Checks the representation's shape against `algebra`.
    pub fn check_shape(&self, algebra: &FiniteCStarAlgebra) -> Result<()> {
        match self {
            Self::Diagonal { labels } => {
                if !algebra.is_commutative() {
                    return validation("a diagonal representation needs a commutative algebra");
                }
                if labels.is_empty() {
                    return validation("representation space must be nonzero");
                }
                if let Some(i) = labels.iter().position(|&p| p >= algebra.dim()) {
                    return validation(format!(
                        "basis vector {i} sits over point {} but the algebra has {} points",
                        labels[i],
                        algebra.dim()
                    ));
                }
            }
            Self::Matrices { images } => {
                if images.len() != algebra.dim() {
                    return validation(format!(
                        "representation needs {} basis images, got {}",
                        algebra.dim(),
                        images.len()
                    ));
                }
                let n = self.hilbert_dim();
                if let Some(k) = images.iter().position(|m| m.shape() != (n, n)) {
                    return validation(format!("basis image {k} has shape {:?}, expected {n}x{n}", images[k].shape()));
                }
            }
        }
        Ok(())
    }

    /// Diagonal of `π(a)` for a diagonal representation.
    pub fn diagonal_values(&self, a: &AlgebraElement) -> Option<Vec<Complex64>> {
        match self {
            Self::Diagonal { labels } => Some(labels.iter().map(|&p| a.coordinates()[p]).collect()),
            Self::Matrices { .. } => None,
        }
    }

    pub fn apply(&self, algebra: &FiniteCStarAlgebra, a: &AlgebraElement) -> Result<ComplexMatrix> {
        if a.algebra() != algebra {
            return validation(format!(
                "element of {:?} does not belong to {:?}",
                a.algebra().block_dims(),
                algebra.block_dims()
            ));
        }
        Ok(match self {
            Self::Diagonal { .. } => ComplexMatrix::from_diagonal(&self.diagonal_values(a).expect("diagonal")),
            Self::Matrices { images } => {
                let n = self.hilbert_dim();
                let mut out = ComplexMatrix::zeros(n, n);
                for (z, img) in a.coordinates().iter().zip(images) {
                    if *z == ZERO {
                        continue;
                    }
                    out = &out + &img.scale(*z);
                }
                out
            }
        })
    }

    /// Point over each basis vector, when every `π(e_p)` is a diagonal 0/1
    /// matrix of a commutative algebra.
    pub fn point_labels(&self, algebra: &FiniteCStarAlgebra, tol: f64) -> Option<Vec<usize>> {
        if !algebra.is_commutative() {
            return None;
        }
        match self {
            Self::Diagonal { labels } => Some(labels.clone()),
            Self::Matrices { images } => {
                let n = self.hilbert_dim();
                let mut labels = vec![usize::MAX; n];
                for (p, img) in images.iter().enumerate() {
                    if !img.is_diagonal() {
                        return None;
                    }
                    for (i, label) in labels.iter_mut().enumerate() {
                        let d = img[(i, i)];
                        if (d - ONE).norm() <= tol {
                            if *label != usize::MAX {
                                return None;
                            }
                            *label = p;
                        } else if d.norm() > tol {
                            return None;
                        }
                    }
                }
                labels.iter().all(|&l| l != usize::MAX).then_some(labels)
            }
        }
    }

    /// Representation of `ψ`'s source on `range(V)`: `a ↦ V* π(ψ(a)) V`.
    ///
    /// Stays diagonal when `self` is diagonal, `ψ` is a spectrum map and
    /// every column of `V` lives over a single fiber of `ψ`.
    pub fn restrict(
        &self,
        algebra: &FiniteCStarAlgebra,
        psi: &StarHomomorphism,
        v: &Isometry,
    ) -> Result<Representation> {
        if psi.target() != *algebra {
            return validation("restriction needs a homomorphism into the represented algebra");
        }
        if v.target_dim() != self.hilbert_dim() {
            return validation("restriction isometry does not map into the representation space");
        }
        if let (Self::Diagonal { labels }, StarHomomorphism::SpectrumMap { map, .. }) = (self, psi) {
            if let Some(restricted) = restrict_diagonal(labels, map, v.matrix()) {
                return Ok(Self::Diagonal { labels: restricted });
            }
        }
        let source = psi.source();
        let vm = v.matrix();
        let images = (0..source.dim())
            .map(|k| {
                let img = self.apply(algebra, &hom_apply(psi, &source.basis_element(k))?)?;
                vm.adjoint().checked_mul(&img.checked_mul(vm)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::Matrices { images })
    }

    pub fn validate(&self, algebra: &FiniteCStarAlgebra) -> Result<RepresentationReport> {
        self.check_shape(algebra)?;
        if let Self::Diagonal { labels } = self {
            let mut hit = vec![false; algebra.dim()];
            labels.iter().for_each(|&p| hit[p] = true);
            return Ok(RepresentationReport {
                unit_residual: 0.0,
                multiplicative_residual: 0.0,
                star_residual: 0.0,
                faithfulness_margin: if hit.iter().all(|&h| h) { 1.0 } else { 0.0 },
            });
        }
        let n = self.hilbert_dim();
        let unit = (&self.apply(algebra, &algebra.unit())? - &ComplexMatrix::identity(n)).frobenius_norm();
        let images: Vec<ComplexMatrix> =
            (0..algebra.dim()).map(|k| self.apply(algebra, &algebra.basis_element(k))).collect::<Result<_>>()?;
        let mut mult: f64 = 0.0;
        let mut star: f64 = 0.0;
        for k in 0..algebra.dim() {
            let ek = algebra.basis_element(k);
            let adj = self.apply(algebra, &ek.adjoint())?;
            star = star.max((&adj - &images[k].adjoint()).frobenius_norm());
            for l in 0..algebra.dim() {
                let prod = self.apply(algebra, &ek.mul(&algebra.basis_element(l))?)?;
                mult = mult.max((&prod - &(&images[k] * &images[l])).frobenius_norm());
            }
        }
        // Gram matrix of the images under the Hilbert–Schmidt inner product
        let d = algebra.dim();
        let gram = ComplexMatrix::from_fn(d, d, |k, l| {
            images[k].as_slice().iter().zip(images[l].as_slice()).map(|(a, b)| a.conj() * b).sum()
        });
        let gram = HermitianOperator::from_matrix_unchecked(gram.hermitian_part());
        let margin = crate::operator::eigh(&gram, &Tolerances::default())
            .map(|e| e.eigenvalues()[0].max(0.0).sqrt())
            .unwrap_or(0.0);
        Ok(RepresentationReport {
            unit_residual: unit,
            multiplicative_residual: mult,
            star_residual: star,
            faithfulness_margin: margin,
        })
    }
}

fn restrict_diagonal(labels: &[usize], map: &[usize], v: &ComplexMatrix) -> Option<Vec<usize>> {
    let mut out = Vec::with_capacity(v.cols());
    for c in 0..v.cols() {
        let mut fiber = None;
        for r in 0..v.rows() {
            if v[(r, c)] == ZERO {
                continue;
            }
            let p = map[labels[r]];
            match fiber {
                None => fiber = Some(p),
                Some(q) if q == p => {}
                Some(_) => return None,
            }
        }
        out.push(fiber?);
    }
    Some(out)
}

/// `(A, π, D)` on `ℂ^N` with an optional grading.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TripleRepr", into = "TripleRepr")]
pub struct FiniteSpectralTriple {
    algebra: FiniteCStarAlgebra,
    representation: Representation,
    dirac: HermitianOperator,
    grading: Option<HermitianOperator>,
}

#[derive(Serialize, Deserialize)]
struct TripleRepr {
    algebra: FiniteCStarAlgebra,
    representation: Representation,
    dirac: HermitianOperator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grading: Option<HermitianOperator>,
}

impl TryFrom<TripleRepr> for FiniteSpectralTriple {
    type Error = crate::Error;

    fn try_from(r: TripleRepr) -> Result<Self> {
        Self::new(r.algebra, r.representation, r.dirac, r.grading)
    }
}

impl From<FiniteSpectralTriple> for TripleRepr {
    fn from(t: FiniteSpectralTriple) -> Self {
        Self { algebra: t.algebra, representation: t.representation, dirac: t.dirac, grading: t.grading }
    }
}

impl FiniteSpectralTriple {
    /// Checks shapes only; the axioms are reported by [`validate_triple`].
    pub fn new(
        algebra: FiniteCStarAlgebra,
        representation: Representation,
        dirac: HermitianOperator,
        grading: Option<HermitianOperator>,
    ) -> Result<Self> {
        representation.check_shape(&algebra)?;
        let n = representation.hilbert_dim();
        if dirac.matrix().shape() != (n, n) {
            return validation(format!(
                "Dirac operator has shape {:?}, the representation space has dimension {n}",
                dirac.matrix().shape()
            ));
        }
        if let Some(g) = &grading {
            if g.matrix().shape() != (n, n) {
                return validation(format!("grading has shape {:?}, expected {n}x{n}", g.matrix().shape()));
            }
        }
        Ok(Self { algebra, representation, dirac, grading })
    }

    /// `A = ℂ`, `H = ℂ`, `D = 0`.
    pub fn trivial() -> Self {
        Self {
            algebra: FiniteCStarAlgebra::commutative(1).expect("one point"),
            representation: Representation::Diagonal { labels: vec![0] },
            dirac: HermitianOperator::zeros(1),
            grading: None,
        }
    }

    pub fn algebra(&self) -> &FiniteCStarAlgebra {
        &self.algebra
    }

    pub fn representation(&self) -> &Representation {
        &self.representation
    }

    pub fn dirac(&self) -> &HermitianOperator {
        &self.dirac
    }

    pub fn grading(&self) -> Option<&HermitianOperator> {
        self.grading.as_ref()
    }

    pub fn with_grading(mut self, grading: Option<HermitianOperator>) -> Result<Self> {
        self.grading = grading;
        Self::new(self.algebra, self.representation, self.dirac, self.grading)
    }

    pub fn hilbert_dim(&self) -> usize {
        self.representation.hilbert_dim()
    }

    pub fn represent(&self, a: &AlgebraElement) -> Result<ComplexMatrix> {
        self.representation.apply(&self.algebra, a)
    }
}

/// Validation residuals of a triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleReport {
    pub hermitian_residual: f64,
    pub representation: RepresentationReport,
    pub passed: bool,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

const FINITE_DIMENSION_NOTE: &str = "finite dimension: D has compact resolvent and every commutator [D, π(a)] is bounded, so the smooth subalgebra is all of A";

pub fn validate_triple(t: &FiniteSpectralTriple, tol: &Tolerances) -> Result<TripleReport> {
    let representation = t.representation.validate(&t.algebra)?;
    let hermitian_residual = t.dirac.hermitian_residual();
    let mut failures = Vec::new();
    if hermitian_residual > tol.hermitian * t.dirac.matrix().frobenius_norm().max(1.0) {
        failures.push(format!("dirac is not Hermitian: ‖D − D*‖_F = {hermitian_residual:e}"));
    }
    if representation.unit_residual > tol.validation {
        failures.push(format!("representation is not unital: {:e}", representation.unit_residual));
    }
    if representation.multiplicative_residual > tol.validation {
        failures.push(format!(
            "representation is not multiplicative: {:e}",
            representation.multiplicative_residual
        ));
    }
    if representation.star_residual > tol.validation {
        failures.push(format!("representation is not *-preserving: {:e}", representation.star_residual));
    }
    if representation.faithfulness_margin <= tol.rank {
        failures.push("representation is not faithful".to_string());
    }
    Ok(TripleReport {
        hermitian_residual,
        representation,
        passed: failures.is_empty(),
        failures,
        notes: vec![FINITE_DIMENSION_NOTE.to_string()],
    })
}

/// Isometric morphism `(φ, I)` between triples.
#[derive(Clone, Debug)]
pub struct TripleMorphism {
    pub phi: StarHomomorphism,
    pub iso: Isometry,
    pub source: Arc<FiniteSpectralTriple>,
    pub target: Arc<FiniteSpectralTriple>,
}

impl TripleMorphism {
    /// Checks shapes only; the axioms are reported by [`validate_morphism`].
    pub fn new(
        phi: StarHomomorphism,
        iso: Isometry,
        source: Arc<FiniteSpectralTriple>,
        target: Arc<FiniteSpectralTriple>,
    ) -> Result<Self> {
        if phi.source() != source.algebra || phi.target() != target.algebra {
            return validation("homomorphism does not map the source algebra into the target algebra");
        }
        if (iso.target_dim(), iso.source_dim()) != (target.hilbert_dim(), source.hilbert_dim()) {
            return validation(format!(
                "isometry must be {}x{}, got {}x{}",
                target.hilbert_dim(),
                source.hilbert_dim(),
                iso.target_dim(),
                iso.source_dim()
            ));
        }
        Ok(Self { phi, iso, source, target })
    }

    pub fn identity(t: Arc<FiniteSpectralTriple>) -> Self {
        Self {
            phi: StarHomomorphism::identity(&t.algebra),
            iso: Isometry::identity(t.hilbert_dim()),
            source: t.clone(),
            target: t,
        }
    }
}

/// Validation residuals of a morphism.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismReport {
    /// `‖I*I − 1‖`.
    pub isometry_residual: f64,
    /// `max_k ‖I π₁(e_k) − π₂(φ(e_k)) I‖_F` over matrix units.
    pub algebra_intertwining: f64,
    /// `‖I D₁ − D₂ I‖`.
    pub dirac_intertwining: f64,
    pub homomorphism: HomReport,
    pub passed: bool,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

pub fn validate_morphism(m: &TripleMorphism, tol: &Tolerances) -> Result<MorphismReport> {
    let (s, t) = (&m.source, &m.target);
    if (m.iso.target_dim(), m.iso.source_dim()) != (t.hilbert_dim(), s.hilbert_dim()) {
        return validation("isometry shape does not match the triples");
    }
    let homomorphism = hom_validate(&m.phi, tol);
    let isometry_residual = m.iso.residual();
    let algebra_intertwining = algebra_intertwining(m)?;
    let lhs = m.iso.matrix().checked_mul(s.dirac.matrix())?;
    let rhs = t.dirac.matrix().checked_mul(m.iso.matrix())?;
    let dirac_intertwining = operator_norm(&(&lhs - &rhs));
    let dirac_scale = operator_norm(t.dirac.matrix()).max(1.0);

    let mut failures: Vec<String> = homomorphism.failures.iter().map(|f| format!("homomorphism: {f}")).collect();
    if isometry_residual > tol.validation {
        failures.push(format!("not an isometry: ‖I*I − 1‖ = {isometry_residual:e}"));
    }
    if algebra_intertwining > tol.validation {
        failures.push(format!("representations not intertwined: {algebra_intertwining:e}"));
    }
    if dirac_intertwining > tol.validation * dirac_scale {
        failures.push(format!("Dirac operators not intertwined: ‖I D₁ − D₂ I‖ = {dirac_intertwining:e}"));
    }
    Ok(MorphismReport {
        isometry_residual,
        algebra_intertwining,
        dirac_intertwining,
        homomorphism,
        passed: failures.is_empty(),
        failures,
        notes: vec!["finite dimension: φ maps the smooth subalgebra into the smooth subalgebra".to_string()],
    })
}

fn algebra_intertwining(m: &TripleMorphism) -> Result<f64> {
    let (s, t) = (&m.source, &m.target);
    if let (
        Representation::Diagonal { labels: src },
        Representation::Diagonal { labels: tgt },
        StarHomomorphism::SpectrumMap { map, source_points },
    ) = (&s.representation, &t.representation, &m.phi)
    {
        // (I π₁(δ_p) − π₂(δ_p ∘ θ) I)_kl = I_kl (δ_{p, src(l)} − δ_{p, θ(tgt(k))})
        let mut sq = vec![0.0; *source_points];
        let iso = m.iso.matrix();
        for k in 0..iso.rows() {
            let over = map[tgt[k]];
            for (l, z) in iso.row(k).iter().enumerate() {
                if *z != ZERO && src[l] != over {
                    sq[src[l]] += z.norm_sqr();
                    sq[over] += z.norm_sqr();
                }
            }
        }
        return Ok(sq.into_iter().fold(0.0, f64::max).sqrt());
    }
    let source = &s.algebra;
    let mut worst: f64 = 0.0;
    for k in 0..source.dim() {
        let e = source.basis_element(k);
        let lhs = m.iso.matrix().checked_mul(&s.represent(&e)?)?;
        let rhs = t.represent(&hom_apply(&m.phi, &e)?)?.checked_mul(m.iso.matrix())?;
        worst = worst.max((&lhs - &rhs).frobenius_norm());
    }
    Ok(worst)
}

/// `second ∘ first`.
pub fn compose_morphisms(first: &TripleMorphism, second: &TripleMorphism) -> Result<TripleMorphism> {
    if !Arc::ptr_eq(&first.target, &second.source) && *first.target != *second.source {
        return validation("cannot compose: the first morphism's target is not the second's source");
    }
    Ok(TripleMorphism {
        phi: first.phi.then(&second.phi)?,
        iso: second.iso.after(&first.iso)?,
        source: first.source.clone(),
        target: second.target.clone(),
    })
}

/// `[D, π(a)]`.
pub fn commutator_with_dirac(t: &FiniteSpectralTriple, a: &AlgebraElement) -> Result<ComplexMatrix> {
    if a.algebra() != &t.algebra {
        return validation("element does not belong to the triple's algebra");
    }
    let d = t.dirac.matrix();
    match t.representation.diagonal_values(a) {
        // [D, diag(f)]_kl = D_kl (f_l − f_k)
        Some(f) => Ok(ComplexMatrix::from_fn(d.rows(), d.cols(), |k, l| d[(k, l)] * (f[l] - f[k]))),
        None => commutator(d, &t.represent(a)?),
    }
}

/// `‖[D, π(a)]‖`.
pub fn commutator_norm(t: &FiniteSpectralTriple, a: &AlgebraElement) -> Result<f64> {
    Ok(operator_norm(&commutator_with_dirac(t, a)?))
}

/// Residuals of the even-triple axioms for the attached grading. The pair
/// `‖γD − Dγ‖`, `‖γD + Dγ‖` is reported without a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradingReport {
    /// `‖γ* − γ‖`.
    pub selfadjoint_residual: f64,
    /// `‖γ² − 1‖`.
    pub involution_residual: f64,
    /// `max_k ‖[γ, π(e_k)]‖` over matrix units.
    pub algebra_commutator: f64,
    /// `‖γD − Dγ‖`.
    pub dirac_commutator: f64,
    /// `‖γD + Dγ‖`.
    pub dirac_anticommutator: f64,
}

pub fn check_even(t: &FiniteSpectralTriple) -> Result<GradingReport> {
    let Some(gamma) = &t.grading else {
        return validation("triple has no grading");
    };
    let g = gamma.matrix();
    let d = t.dirac.matrix();
    let n = t.hilbert_dim();
    let mut algebra_commutator: f64 = 0.0;
    for k in 0..t.algebra.dim() {
        let pk = t.represent(&t.algebra.basis_element(k))?;
        algebra_commutator = algebra_commutator.max(operator_norm(&commutator(g, &pk)?));
    }
    let gd = g * d;
    let dg = d * g;
    Ok(GradingReport {
        selfadjoint_residual: operator_norm(&(&g.adjoint() - g)),
        involution_residual: operator_norm(&(&(g * g) - &ComplexMatrix::identity(n))),
        algebra_commutator,
        dirac_commutator: operator_norm(&(&gd - &dg)),
        dirac_anticommutator: operator_norm(&(&gd + &dg)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn two_point_triple() -> FiniteSpectralTriple {
        let d = ComplexMatrix::from_real_rows(&[vec![0.0, 3.0], vec![3.0, 0.0]]);
        FiniteSpectralTriple::new(
            FiniteCStarAlgebra::commutative(2).unwrap(),
            Representation::Diagonal { labels: vec![0, 1] },
            HermitianOperator::new(d, &tol()).unwrap(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn trivial_triple_passes() {
        let r = validate_triple(&FiniteSpectralTriple::trivial(), &tol()).unwrap();
        assert!(r.passed);
        assert!(!r.notes.is_empty());
    }

    #[test]
    fn non_hermitian_dirac_fails_by_name() {
        let d = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let t = FiniteSpectralTriple::new(
            FiniteCStarAlgebra::commutative(2).unwrap(),
            Representation::Diagonal { labels: vec![0, 1] },
            HermitianOperator::from_matrix_unchecked(d),
            None,
        )
        .unwrap();
        let r = validate_triple(&t, &tol()).unwrap();
        assert!(!r.passed);
        assert!(r.failures[0].contains("not Hermitian"));
    }

    #[test]
    fn unit_commutes_with_dirac() {
        let t = two_point_triple();
        assert_eq!(commutator_norm(&t, &t.algebra().unit()).unwrap(), 0.0);
    }

    #[test]
    fn indicator_commutator_on_two_points() {
        let t = two_point_triple();
        let f = AlgebraElement::from_real_function(&[1.0, 0.0]).unwrap();
        assert!((commutator_norm(&t, &f).unwrap() - 3.0).abs() < 1e-12);
        // diagonal fast path agrees with the dense commutator
        let dense = commutator(t.dirac().matrix(), &t.represent(&f).unwrap()).unwrap();
        assert_eq!(commutator_with_dirac(&t, &f).unwrap(), dense);
    }

    #[test]
    fn identity_morphism_has_zero_residuals() {
        let t = Arc::new(two_point_triple());
        let r = validate_morphism(&TripleMorphism::identity(t), &tol()).unwrap();
        assert!(r.passed);
        assert_eq!(
            (r.isometry_residual, r.algebra_intertwining, r.dirac_intertwining),
            (0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn compose_with_identity_is_unchanged() {
        let t = Arc::new(two_point_triple());
        let id = TripleMorphism::identity(t.clone());
        let swap = TripleMorphism::new(
            StarHomomorphism::spectrum_map(2, vec![1, 0]).unwrap(),
            Isometry::from_matrix_unchecked(ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])),
            t.clone(),
            t,
        )
        .unwrap();
        let c = compose_morphisms(&id, &swap).unwrap();
        assert_eq!(c.phi, swap.phi);
        assert_eq!(c.iso, swap.iso);
        assert!(validate_morphism(&c, &tol()).unwrap().passed);
    }

    #[test]
    fn grading_reports() {
        let t = FiniteSpectralTriple::trivial().with_grading(Some(HermitianOperator::identity(1))).unwrap();
        let r = check_even(&t).unwrap();
        assert_eq!(
            (r.selfadjoint_residual, r.involution_residual, r.algebra_commutator, r.dirac_commutator, r.dirac_anticommutator),
            (0.0, 0.0, 0.0, 0.0, 0.0)
        );
        let sign = HermitianOperator::new(ComplexMatrix::from_real_diagonal(&[1.0, -1.0]), &tol()).unwrap();
        let t = two_point_triple().with_grading(Some(sign)).unwrap();
        assert!(check_even(&t).unwrap().dirac_anticommutator < 1e-15);
        assert!(check_even(&two_point_triple()).is_err());
    }

    #[test]
    fn matrix_representation_labels() {
        let images = vec![
            ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 1.0]),
            ComplexMatrix::from_real_diagonal(&[0.0, 1.0, 0.0]),
        ];
        let rep = Representation::Matrices { images };
        let alg = FiniteCStarAlgebra::commutative(2).unwrap();
        assert_eq!(rep.point_labels(&alg, 1e-12), Some(vec![0, 1, 0]));
        let r = rep.validate(&alg).unwrap();
        assert_eq!(r.multiplicative_residual, 0.0);
        assert!(r.faithfulness_margin >= 1.0 - 1e-12);
    }
}
