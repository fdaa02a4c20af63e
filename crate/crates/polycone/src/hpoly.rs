//! Homogeneous polynomials in two variables and root clustering.
//!
//! Two coordinate pairs are used for the same underlying space:
//!
//! * the real pair `(X, Y)`, in which the SL(2,R) substitution action has
//!   real matrices, stored as `coeffs[k] = coefficient of X^(d-k) Y^k`;
//! * the rotated pair `Z = (X - iY)/2`, `W = (X + iY)/2`, in which the
//!   circle action is diagonal, stored as
//!   `coeffs[k] = coefficient of Z^k W^(d-k)`.
//!
//! Real polynomials (real `(X,Y)` coefficients) are exactly those whose
//! `(Z,W)` coefficients satisfy `p_k = conj(p_(d-k))`.
//!
//! Roots are reported on the Riemann sphere: eigenvalues of the companion
//! matrix of `P(x, 1)`, plus a root at infinity for each unit the degree of
//! `P(x, 1)` falls short of `d`. Clusters are formed in the chordal metric,
//! so huge finite roots and the point at infinity merge gracefully.

use crate::{C64, Error, Result};
use nalgebra::DMatrix;

/// Variable pair in which coefficients are stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    /// Real pair; `coeffs[k]` multiplies `X^(d-k) Y^k`.
    XY,
    /// Rotated pair; `coeffs[k]` multiplies `Z^k W^(d-k)`.
    ZW,
}

/// Exact binomial coefficient as `u128` (valid for the degrees used here).
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Homogeneous form of arbitrary degree `coeffs.len() - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct HForm {
    basis: Basis,
    coeffs: Vec<C64>,
}

impl HForm {
    pub fn new(basis: Basis, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::BadLength { got: 0, expected: 1 });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// The linear form `a*U + b*V` where `(U, V)` is the variable pair of
    /// `basis` (`(X, Y)` or `(Z, W)`).
    pub fn linear(basis: Basis, a: C64, b: C64) -> Self {
        let coeffs = match basis {
            Basis::XY => vec![a, b],
            Basis::ZW => vec![b, a],
        };
        Self { basis, coeffs }
    }

    /// Constant-one form of degree 0.
    pub fn one(basis: Basis) -> Self {
        Self { basis, coeffs: vec![C64::new(1.0, 0.0)] }
    }

    /// Product of two forms in the same basis (degrees add).
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        // In both storage conventions the stored index is the exponent of a
        // fixed variable, so the product is a plain convolution.
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Ok(Self { basis: self.basis, coeffs: out })
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.basis);
        for _ in 0..e {
            acc = acc.mul(self).expect("same basis");
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.basis != other.basis || self.coeffs.len() != other.coeffs.len() {
            return Err(Error::BasisMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { basis: self.basis, coeffs })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Value at `(u, v)`, interpreted in this form's own variable pair.
    pub fn evaluate(&self, u: C64, v: C64) -> C64 {
        let d = self.degree();
        let mut acc = C64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            let (eu, ev) = match self.basis {
                Basis::XY => ((d - k) as i32, k as i32),
                Basis::ZW => (k as i32, (d - k) as i32),
            };
            acc += c * u.powi(eu) * v.powi(ev);
        }
        acc
    }

    /// Coefficients in descending powers of the first variable of the pair.
    fn desc(&self) -> Vec<C64> {
        match self.basis {
            Basis::XY => self.coeffs.clone(),
            Basis::ZW => self.coeffs.iter().rev().cloned().collect(),
        }
    }

    fn from_desc(basis: Basis, desc: Vec<C64>) -> Self {
        let coeffs = match basis {
            Basis::XY => desc,
            Basis::ZW => desc.into_iter().rev().collect(),
        };
        Self { basis, coeffs }
    }

    /// Re-expands the form after substituting `U = m00*S + m01*T`,
    /// `V = m10*S + m11*T`; input indexed by descending `U`, output by
    /// descending `S`.
    fn substitute_desc(desc: &[C64], m: [C64; 4]) -> Vec<C64> {
        let d = desc.len() - 1;
        let u = [m[0], m[1]];
        let v = [m[2], m[3]];
        let mut out = vec![C64::new(0.0, 0.0); d + 1];
        // Build (U-form)^(d-k) (V-form)^k incrementally: start with U^d and
        // trade one U factor for a V factor at each step.
        let mut upow: Vec<Vec<C64>> = Vec::with_capacity(d + 1);
        let mut acc = vec![C64::new(1.0, 0.0)];
        upow.push(acc.clone());
        for _ in 0..d {
            acc = conv2(&acc, u);
            upow.push(acc.clone());
        }
        let mut vpow = vec![C64::new(1.0, 0.0)];
        for (k, c) in desc.iter().enumerate() {
            let term = convolve(&upow[d - k], &vpow);
            for (i, t) in term.iter().enumerate() {
                out[i] += c * t;
            }
            vpow = conv2(&vpow, v);
        }
        out
    }

    /// Re-expands an `XY`-basis form after the linear substitution
    /// `X -> m[0] X + m[1] Y`, `Y -> m[2] X + m[3] Y`.
    pub fn substitute_xy(&self, m: [C64; 4]) -> Result<Self> {
        if self.basis != Basis::XY {
            return Err(Error::BasisMismatch);
        }
        let out = Self::substitute_desc(&self.coeffs, m);
        Ok(Self { basis: Basis::XY, coeffs: out })
    }

    /// The same form expressed in the other variable pair.
    pub fn to_basis(&self, target: Basis) -> Self {
        if self.basis == target {
            return self.clone();
        }
        let i = C64::new(0.0, 1.0);
        let half = C64::new(0.5, 0.0);
        let desc = self.desc();
        let out = match (self.basis, target) {
            // X = Z + W, Y = i(Z - W)
            (Basis::XY, Basis::ZW) => Self::substitute_desc(
                &desc,
                [C64::new(1.0, 0.0), C64::new(1.0, 0.0), i, -i],
            ),
            // Z = (X - iY)/2, W = (X + iY)/2
            (Basis::ZW, Basis::XY) => Self::substitute_desc(
                &desc,
                [half, -i * half, half, i * half],
            ),
            _ => unreachable!(),
        };
        Self::from_desc(target, out)
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn conv2(a: &[C64], lin: [C64; 2]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len() + 1];
    for (i, x) in a.iter().enumerate() {
        out[i] += x * lin[0];
        out[i + 1] += x * lin[1];
    }
    out
}

/// Homogeneous polynomial of odd degree `2n - 1` (the 2n-dimensional
/// representation space of SL(2,R)).
#[derive(Clone, Debug, PartialEq)]
pub struct HPoly {
    n: usize,
    form: HForm,
}

impl HPoly {
    pub fn new(n: usize, basis: Basis, coeffs: Vec<C64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("n must be at least 1".into()));
        }
        if coeffs.len() != 2 * n {
            return Err(Error::BadLength { got: coeffs.len(), expected: 2 * n });
        }
        Ok(Self { n, form: HForm::new(basis, coeffs)? })
    }

    /// Wraps a form of odd degree `2n - 1`.
    pub fn from_form(form: HForm) -> Result<Self> {
        let d = form.degree();
        if d % 2 == 0 {
            return Err(Error::Invalid(format!(
                "degree {d} is even; expected odd degree 2n-1"
            )));
        }
        Ok(Self { n: (d + 1) / 2, form })
    }

    /// Basis monomial: index `k` of the storage convention of `basis`.
    pub fn monomial(n: usize, basis: Basis, k: usize) -> Result<Self> {
        let mut coeffs = vec![C64::new(0.0, 0.0); 2 * n];
        if k >= 2 * n {
            return Err(Error::BadLength { got: k, expected: 2 * n });
        }
        coeffs[k] = C64::new(1.0, 0.0);
        Self::new(n, basis, coeffs)
    }

    pub fn zero(n: usize, basis: Basis) -> Self {
        Self::new(n, basis, vec![C64::new(0.0, 0.0); 2 * n]).expect("valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        2 * self.n - 1
    }

    pub fn basis(&self) -> Basis {
        self.form.basis()
    }

    pub fn coeffs(&self) -> &[C64] {
        self.form.coeffs()
    }

    pub fn form(&self) -> &HForm {
        &self.form
    }

    pub fn to_basis(&self, target: Basis) -> Self {
        Self { n: self.n, form: self.form.to_basis(target) }
    }

    /// Coefficient vector in the requested basis (converting if needed).
    pub fn coeffs_in(&self, basis: Basis) -> Vec<C64> {
        if self.basis() == basis {
            self.coeffs().to_vec()
        } else {
            self.to_basis(basis).coeffs().to_vec()
        }
    }

    pub fn evaluate(&self, u: C64, v: C64) -> C64 {
        self.form.evaluate(u, v)
    }

    pub fn norm(&self) -> f64 {
        self.form.norm()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { n: self.n, form: self.form.add(&other.form)? })
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { n: self.n, form: self.form.scale(s) }
    }

    /// Max deviation from the reality condition `p_k = conj(p_(d-k))` on
    /// `(Z,W)` coefficients; zero exactly for real-(X,Y) polynomials.
    pub fn reality_residual(&self) -> f64 {
        let p = self.coeffs_in(Basis::ZW);
        let d = self.degree();
        (0..=d)
            .map(|k| (p[k] - p[d - k].conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// Point of the real projective line, stored as a unit vector `[a : b]`
/// with the first nonzero entry positive. `[1 : 0]` is the point at
/// infinity of the chart `x = a/b`.
#[derive(Clone, Copy, Debug)]
pub struct RP1Point {
    a: f64,
    b: f64,
}

impl RP1Point {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        let r = a.hypot(b);
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Invalid("[a : b] needs (a, b) nonzero and finite".into()));
        }
        let (mut a, mut b) = (a / r, b / r);
        let lead = if a.abs() > 1e-300 { a } else { b };
        if lead < 0.0 {
            a = -a;
            b = -b;
        }
        Ok(Self { a, b })
    }

    pub fn from_real(x: f64) -> Self {
        Self::new(x, 1.0).expect("finite real")
    }

    pub fn infinity() -> Self {
        Self { a: 1.0, b: 0.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_infinity(&self) -> bool {
        self.b == 0.0
    }

    /// Chart value `a/b`, or `None` at infinity.
    pub fn to_real(&self) -> Option<f64> {
        if self.b == 0.0 {
            None
        } else {
            Some(self.a / self.b)
        }
    }

    /// Sine of the angle between the two lines (both representatives are
    /// unit vectors); a metric on the projective line.
    pub fn chordal(&self, other: &Self) -> f64 {
        (self.a * other.b - self.b * other.a).abs()
    }
}

/// Chordal distance on the unit Riemann sphere (`None` = infinity);
/// ranges over `[0, 2]`.
pub fn chordal_sphere(z: Option<C64>, w: Option<C64>) -> f64 {
    match (z, w) {
        (None, None) => 0.0,
        (Some(z), None) | (None, Some(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (Some(z), Some(w)) => {
            2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
        }
    }
}

/// Chordal distance from a sphere point to the circle of real points
/// (real axis plus infinity).
pub fn chordal_to_real(z: Option<C64>) -> f64 {
    match z {
        None => 0.0,
        Some(z) => {
            let s = 2.0 * z.im / (1.0 + z.norm_sqr());
            let c2 = (1.0 - s * s).max(0.0);
            (2.0 - 2.0 * c2.sqrt()).max(0.0).sqrt()
        }
    }
}

/// One cluster of nearby roots.
#[derive(Clone, Debug)]
pub struct RootCluster {
    /// Cluster center; `None` when the cluster contains the point at
    /// infinity.
    pub center: Option<C64>,
    /// Number of roots in the cluster (multiplicity estimate).
    pub size: usize,
    /// Whether the center lies on the real circle within `tol_real`.
    pub is_real: bool,
    /// Chordal distance to the nearest other cluster center
    /// (`f64::INFINITY` when there is only one cluster).
    pub gap: f64,
}

/// Clustered root data for one polynomial.
#[derive(Clone, Debug)]
pub struct RootReport {
    pub clusters: Vec<RootCluster>,
    /// Largest cluster size among real clusters (0 when none is real).
    pub max_real_mult: usize,
    /// Set when any clustering or realness decision sits within a factor
    /// of ten of its threshold, i.e. could flip under small perturbation.
    pub ambiguous: bool,
}

/// Default clustering and realness tolerances.
pub const DEFAULT_TOL_CLUSTER: f64 = 1e-6;
pub const DEFAULT_TOL_REAL: f64 = 1e-6;

/// Roots of `P` on the Riemann sphere, clustered in the chordal metric with
/// multiplicity; realness of each cluster is decided against `tol_real`.
pub fn real_root_multiplicity(
    p: &HPoly,
    tol_cluster: f64,
    tol_real: f64,
) -> Result<RootReport> {
    let roots = sphere_roots(p)?;
    Ok(cluster_roots(&roots, tol_cluster, tol_real))
}

/// [`real_root_multiplicity`] with the default tolerances.
pub fn real_root_multiplicity_default(p: &HPoly) -> Result<RootReport> {
    real_root_multiplicity(p, DEFAULT_TOL_CLUSTER, DEFAULT_TOL_REAL)
}

/// All `2n - 1` roots of `P` on the sphere (`None` = infinity), unclustered.
pub fn sphere_roots(p: &HPoly) -> Result<Vec<Option<C64>>> {
    let c = p.coeffs_in(Basis::XY);
    let maxabs = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if maxabs == 0.0 {
        return Err(Error::ZeroPolynomial);
    }
    // Leading (X-power) coefficients at numerical zero each contribute one
    // root at infinity of the dehomogenization P(x, 1).
    let cut = 1e-13 * maxabs;
    let mut lead = 0;
    while lead < c.len() && c[lead].norm() <= cut {
        lead += 1;
    }
    let mut roots: Vec<Option<C64>> = vec![None; lead];
    // Trailing (Y-power) coefficients at numerical zero each contribute an
    // exact root at x = 0; peeling them keeps the companion matrix
    // nonsingular, which the eigenvalue iteration needs to behave.
    let mut tail = c.len();
    while tail > lead + 1 && c[tail - 1].norm() <= cut {
        tail -= 1;
        roots.push(Some(C64::new(0.0, 0.0)));
    }
    let reduced = &c[lead..tail];
    let m = reduced.len() - 1;
    if m > 0 {
        let lead_c = reduced[0];
        let mut comp = DMatrix::<C64>::zeros(m, m);
        for i in 1..m {
            comp[(i, i - 1)] = C64::new(1.0, 0.0);
        }
        for i in 0..m {
            // p(x) = x^m + a_(m-1) x^(m-1) + ... + a_0 after normalization;
            // last column holds -a_i with a_i the coefficient of x^i.
            let a_i = reduced[m - i] / lead_c;
            comp[(i, m - 1)] = -a_i;
        }
        // Bounded iteration count: a cycling Schur reduction must surface
        // as an error instead of a hang.
        let schur = nalgebra::linalg::Schur::try_new(comp, f64::EPSILON, 200 * (m + 5));
        let eig = schur
            .and_then(|s| s.eigenvalues())
            .ok_or(Error::EigenFailure)?;
        roots.extend(eig.iter().map(|z| Some(*z)));
    }
    Ok(roots)
}

fn cluster_roots(roots: &[Option<C64>], tol_cluster: f64, tol_real: f64) -> RootReport {
    let r = roots.len();
    let mut parent: Vec<usize> = (0..r).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    let mut ambiguous = false;
    for i in 0..r {
        for j in (i + 1)..r {
            let d = chordal_sphere(roots[i], roots[j]);
            if d < tol_cluster {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
            if d > tol_cluster / 10.0 && d < tol_cluster * 10.0 {
                ambiguous = true;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = vec![usize::MAX; r];
    for i in 0..r {
        let root = find(&mut parent, i);
        if group_of[root] == usize::MAX {
            group_of[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of[root]].push(i);
    }
    let mut clusters: Vec<RootCluster> = groups
        .iter()
        .map(|members| {
            let center = if members.iter().any(|&i| roots[i].is_none()) {
                None
            } else {
                let sum: C64 = members.iter().map(|&i| roots[i].unwrap()).sum();
                Some(sum / members.len() as f64)
            };
            let dr = chordal_to_real(center);
            if dr > tol_real / 10.0 && dr < tol_real * 10.0 {
                ambiguous = true;
            }
            RootCluster { center, size: members.len(), is_real: dr <= tol_real, gap: f64::INFINITY }
        })
        .collect();
    for i in 0..clusters.len() {
        let mut gap = f64::INFINITY;
        for j in 0..clusters.len() {
            if i != j {
                gap = gap.min(chordal_sphere(clusters[i].center, clusters[j].center));
            }
        }
        clusters[i].gap = gap;
    }
    let max_real_mult = clusters
        .iter()
        .filter(|c| c.is_real)
        .map(|c| c.size)
        .max()
        .unwrap_or(0);
    RootReport { clusters, max_real_mult, ambiguous }
}

/// Rebuilds `prod (b X - a Y)^size` over clusters with centers `a/b`
/// (factor `Y` for the cluster at infinity); used to validate reports
/// against the original polynomial up to overall scale.
pub fn reconstruct_from_report(report: &RootReport, n: usize) -> Result<HPoly> {
    let one = C64::new(1.0, 0.0);
    let mut acc = HForm::one(Basis::XY);
    for cl in &report.clusters {
        let lin = match cl.center {
            Some(c) => HForm::linear(Basis::XY, one, -c),
            None => HForm::linear(Basis::XY, C64::new(0.0, 0.0), one),
        };
        acc = acc.mul(&lin.pow(cl.size))?;
    }
    let mut coeffs = acc.coeffs().to_vec();
    coeffs.resize(2 * n, C64::new(0.0, 0.0));
    HPoly::new(n, Basis::XY, coeffs)
}
