//! Structure analysis of coefficient tuples: linear independence,
//! multiplication tables, generated algebras, centralizers, minimal and
//! ball-minimal reductions, and affine changes of variables.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mat::{self, cr, CMatrix, CVector, C64};
use crate::pencil::{HermitianPencil, SpectraballPencil};
use crate::random::{self, SeededRng};
use crate::tol::ToleranceProfile;
use crate::tuple::MatrixTuple;

/// Structure constants of the algebra spanned by a tuple: `g` square
/// matrices of size `g` with `A_k A_j = sum_s (Xi_j)_{k,s} A_s`, plus the
/// worst least-squares misfit over all coefficient pairs.
#[derive(Debug, Clone)]
pub struct MultiplicationTable {
    pub xi: MatrixTuple,
    pub residual: f64,
}

/// Basis `J` of the algebra generated by a tuple `A`, with `J_j = A_j` for
/// the first `g` entries and `h` the dimension of the algebra.
#[derive(Debug, Clone)]
pub struct AlgebraBasis {
    pub j: MatrixTuple,
    pub h: usize,
    pub g: usize,
}

/// Unitary block decomposition of a square tuple: `similarity* A similarity`
/// equals the direct sum of the listed summands.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub summands: Vec<HermitianPencil>,
    pub similarity: CMatrix,
}

/// Result of a minimality reduction: the reduced pencil, the full block
/// decomposition of the input, and how many summands were discarded by the
/// randomized redundancy search (0 means the answer did not rely on it).
#[derive(Debug, Clone)]
pub struct MinimalReduction {
    pub pencil: HermitianPencil,
    pub decomposition: Decomposition,
    pub heuristically_pruned: usize,
}

/// True iff the vectorized coordinates of `a` have full rank `g`.
pub fn is_linearly_independent(a: &MatrixTuple, tol: &ToleranceProfile) -> bool {
    let g = a.g();
    let len = a.rows() * a.cols();
    let mut m = mat::zeros(len, g);
    for (j, aj) in a.iter().enumerate() {
        m.set_column(j, &mat::vectorize(aj));
    }
    mat::numerical_rank(&m, tol) == g
}

/// Solves `A_k A_j = sum_s (Xi_j)_{k,s} A_s` by least squares against the
/// span of `A`.  Returns `None` when some product leaves the span beyond
/// `residual_tol` (the tuple does not span an algebra), and an error when
/// `A` is linearly dependent so the table would not be unique.
pub fn solve_multiplication_table(
    a: &MatrixTuple,
    tol: &ToleranceProfile,
) -> Result<Option<MultiplicationTable>> {
    if !a.is_square() {
        return Err(Error::Shape("multiplication needs square coefficients".into()));
    }
    if !is_linearly_independent(a, tol) {
        return Err(Error::LinearlyDependent);
    }
    let g = a.g();
    let mut xi = vec![mat::zeros(g, g); g];
    let mut worst = 0.0f64;
    for j in 0..g {
        for k in 0..g {
            let prod = a.mat(k) * a.mat(j);
            let (coeffs, residual) = mat::fit_in_span(a.mats(), &prod, tol);
            worst = worst.max(residual);
            if worst > tol.residual_tol {
                return Ok(None);
            }
            for s in 0..g {
                xi[j][(k, s)] = coeffs[s];
            }
        }
    }
    Ok(Some(MultiplicationTable {
        xi: MatrixTuple::new(xi)?,
        residual: worst,
    }))
}

/// Checks the defining identity `Xi_k Xi_j = sum_s (Xi_j)_{k,s} Xi_s` of a
/// convexotonic tuple within `residual_tol`.
pub fn is_convexotonic(xi: &MatrixTuple, tol: &ToleranceProfile) -> Result<bool> {
    let g = xi.g();
    if xi.rows() != g || xi.cols() != g {
        return Err(Error::Shape(format!(
            "expected {g} matrices of size {g}x{g}, got {}x{}",
            xi.rows(),
            xi.cols()
        )));
    }
    let mut worst = 0.0f64;
    for k in 0..g {
        for j in 0..g {
            let mut rhs = mat::zeros(g, g);
            for s in 0..g {
                rhs += xi.mat(s) * xi.mat(j)[(k, s)];
            }
            let lhs = xi.mat(k) * xi.mat(j);
            worst = worst.max(mat::operator_norm(&(lhs - rhs)));
        }
    }
    Ok(worst <= tol.residual_tol)
}

/// Incremental orthonormal span of vectorized matrices.
struct VecSpan {
    basis: Vec<CVector>,
}

impl VecSpan {
    fn new() -> Self {
        Self { basis: Vec::new() }
    }

    /// Residual norm of `v` against the span, after normalizing `v`.
    fn residual(&self, m: &CMatrix) -> f64 {
        let mut v = mat::vectorize(m);
        let n = v.norm();
        if n < 1e-300 {
            return 0.0;
        }
        v /= cr(n);
        for b in &self.basis {
            let coeff = b.dotc(&v);
            v -= b * coeff;
        }
        v.norm()
    }

    /// Adds `m` to the span; returns false if it was already inside.
    fn insert(&mut self, m: &CMatrix, cutoff: f64) -> bool {
        let mut v = mat::vectorize(m);
        let n = v.norm();
        if n < 1e-300 {
            return false;
        }
        v /= cr(n);
        for b in &self.basis {
            let coeff = b.dotc(&v);
            v -= b * coeff;
        }
        let r = v.norm();
        if r <= cutoff {
            return false;
        }
        self.basis.push(v / cr(r));
        true
    }
}

/// Closes a linearly independent square tuple under products, returning a
/// basis of the generated algebra that starts with the input coordinates.
pub fn generated_algebra_basis(a: &MatrixTuple, tol: &ToleranceProfile) -> Result<AlgebraBasis> {
    if !a.is_square() {
        return Err(Error::Shape("algebra closure needs square coefficients".into()));
    }
    if !is_linearly_independent(a, tol) {
        return Err(Error::LinearlyDependent);
    }
    let g = a.g();
    let r = a.rows();
    let mut elems: Vec<CMatrix> = a.mats().to_vec();
    let mut span = VecSpan::new();
    let cutoff = tol.rank_tol.max(1e-12);
    for m in &elems {
        span.insert(m, cutoff);
    }
    // Breadth-first closure; terminates because the dimension caps at r^2.
    let mut frontier_start = 0;
    while frontier_start < elems.len() && elems.len() < r * r {
        let frontier_end = elems.len();
        for l in 0..frontier_end {
            for m in frontier_start.max(0)..frontier_end {
                for (x, y) in [(l, m), (m, l)] {
                    if x < frontier_start && y < frontier_start {
                        continue;
                    }
                    let prod = &elems[x] * &elems[y];
                    let scale = mat::frobenius(&prod);
                    if scale < 1e-300 {
                        continue;
                    }
                    if span.insert(&prod, cutoff) {
                        elems.push(prod);
                        if elems.len() >= r * r {
                            break;
                        }
                    }
                }
            }
        }
        frontier_start = frontier_end;
    }
    let h = elems.len();
    Ok(AlgebraBasis {
        j: MatrixTuple::new(elems)?,
        h,
        g,
    })
}

/// Dimension of `{T : TF = FT for every F in the family}`, via the null
/// space of stacked Sylvester operators.
pub fn centralizer_dim(family: &[CMatrix], tol: &ToleranceProfile) -> Result<usize> {
    if family.is_empty() {
        return Err(Error::Invalid("centralizer of an empty family".into()));
    }
    let n = family[0].nrows();
    for f in family {
        if f.nrows() != n || f.ncols() != n {
            return Err(Error::Shape("centralizer family must be square and uniform".into()));
        }
    }
    let ops = sylvester_stack(family);
    Ok(mat::kernel_basis(&ops, tol).len())
}

fn sylvester_stack(family: &[CMatrix]) -> CMatrix {
    let n = family[0].nrows();
    let id = mat::identity(n);
    let mut stacked = mat::zeros(family.len() * n * n, n * n);
    for (i, f) in family.iter().enumerate() {
        // vec(TF - FT) = (F^T (x) I - I (x) F) vec(T), column-major vec.
        let block = mat::kron(&f.transpose(), &id) - mat::kron(&id, f);
        stacked
            .view_mut((i * n * n, 0), (n * n, n * n))
            .copy_from(&block);
    }
    stacked
}

/// Orthonormal basis of the commutant of a family, as matrices.
fn commutant_basis(family: &[CMatrix], tol: &ToleranceProfile) -> Vec<CMatrix> {
    let n = family[0].nrows();
    mat::kernel_basis(&sylvester_stack(family), tol)
        .into_iter()
        .map(|v| CMatrix::from_column_slice(n, n, v.as_slice()))
        .collect()
}

/// Atom test for the defining polynomial of a spectraball: the centralizer
/// of the embedded `2g`-family must be trivial and both kernels of the
/// coefficient tuple must vanish.
pub fn atom_check(e: &SpectraballPencil, tol: &ToleranceProfile) -> Result<bool> {
    let (d, ecols) = (e.d(), e.e());
    let mut family = Vec::with_capacity(2 * e.g());
    for ej in e.coefficients().iter() {
        let mut upper = mat::zeros(d + ecols, d + ecols);
        upper.view_mut((0, d), (d, ecols)).copy_from(ej);
        family.push(upper);
        let mut lower = mat::zeros(d + ecols, d + ecols);
        lower.view_mut((d, 0), (ecols, d)).copy_from(&ej.adjoint());
        family.push(lower);
    }
    let trivial = centralizer_dim(&family, tol)? == 1;
    let ker_e = mat::kernel_basis(&e.coefficients().stack_rows(), tol).is_empty();
    let ker_e_star = mat::kernel_basis(&e.coefficients().adjoint().stack_rows(), tol).is_empty();
    Ok(trivial && ker_e && ker_e_star)
}

/// Recombination of coordinates: `(Delta . C)_j = sum_k Delta_{j,k} C_k`.
pub fn dot_action(delta: &CMatrix, c: &MatrixTuple) -> Result<MatrixTuple> {
    let g = c.g();
    if delta.nrows() != g || delta.ncols() != g {
        return Err(Error::Shape(format!(
            "recombination matrix must be {g}x{g}, got {}x{}",
            delta.nrows(),
            delta.ncols()
        )));
    }
    let mats = (0..g)
        .map(|j| {
            let mut acc = mat::zeros(c.rows(), c.cols());
            for k in 0..g {
                acc += c.mat(k) * delta[(j, k)];
            }
            acc
        })
        .collect();
    MatrixTuple::new(mats)
}

/// Pushforward of a point under the affine map `x -> x . M + b`:
/// coordinates combine as `sum_k M_{kj} X_k + b_j I`.
pub fn affine_apply(m: &CMatrix, b: &[C64], x: &MatrixTuple) -> Result<MatrixTuple> {
    let moved = dot_action(&m.transpose(), x)?;
    let shift = MatrixTuple::scalars(b)?;
    moved.shift_by_scalars(&shift)
}

/// Coefficient tuple of the pulled-back pencil under `x -> x . M + b`:
/// `F = M . (H A H)` with `H` the inverse PSD square root of the pencil
/// evaluated at `b`.  Requires `M` invertible and `b` interior at level one.
pub fn affine_change(
    a: &HermitianPencil,
    m: &CMatrix,
    b: &[C64],
    tol: &ToleranceProfile,
) -> Result<HermitianPencil> {
    let g = a.g();
    if b.len() != g {
        return Err(Error::Shape(format!("expected {} shift entries", g)));
    }
    if m.nrows() != g || m.ncols() != g || mat::numerical_rank(m, tol) != g {
        return Err(Error::Precondition("derivative matrix must be invertible".into()));
    }
    let bt = MatrixTuple::scalars(b)?;
    let l = a.hermitian_eval(&bt)?;
    let h = mat::inv_sqrt_psd(&l, tol)
        .map_err(|_| Error::Precondition("shift point is not interior at level one".into()))?;
    let conjugated = a.coefficients().map(|aj| &h * aj * &h);
    HermitianPencil::new(dot_action(m, &conjugated)?)
}

/// Orthonormal basis of the column space, with the `rank_tol` cutoff.
fn range_basis(m: &CMatrix, tol: &ToleranceProfile) -> CMatrix {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd requested u");
    let cols: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tol.rank_tol)
        .map(|(i, _)| i)
        .collect();
    let mut out = mat::zeros(m.nrows(), cols.len());
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &u.column(i));
    }
    out
}

/// Splits a square tuple into blocks with trivial commutant of
/// `{A_j, A_j*}`, returning `(summand, isometry)` pairs.
fn irreducible_split(
    a: &MatrixTuple,
    tol: &ToleranceProfile,
    rng: &mut SeededRng,
    depth: usize,
) -> Vec<(MatrixTuple, CMatrix)> {
    let n = a.rows();
    let whole = || vec![(a.clone(), mat::identity(n))];
    if n <= 1 || depth > 2 * n + 4 {
        return whole();
    }
    let mut family: Vec<CMatrix> = a.mats().to_vec();
    family.extend(a.iter().map(|m| m.adjoint()));
    let commutant = commutant_basis(&family, tol);
    if commutant.len() <= 1 {
        return whole();
    }
    // A generic hermitian commutant element has eigenspaces that reduce the
    // family; a degenerate draw merely under-splits and the recursion
    // retries on the merged block.
    for _attempt in 0..3 {
        let mut h = mat::zeros(n, n);
        for k in &commutant {
            let z = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            h += k * z;
        }
        h = mat::hermitian_part(&h);
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let spread = (eig.eigenvalues[order[n - 1]] - eig.eigenvalues[order[0]]).abs();
        let gap_cut = 1e-8_f64.max(1e-8 * spread);
        let mut clusters: Vec<Vec<usize>> = vec![vec![order[0]]];
        for w in order.windows(2) {
            if (eig.eigenvalues[w[1]] - eig.eigenvalues[w[0]]).abs() > gap_cut {
                clusters.push(Vec::new());
            }
            clusters.last_mut().unwrap().push(w[1]);
        }
        if clusters.len() < 2 {
            continue;
        }
        let mut out = Vec::new();
        for cluster in clusters {
            let mut v = mat::zeros(n, cluster.len());
            for (k, &i) in cluster.iter().enumerate() {
                v.set_column(k, &eig.eigenvectors.column(i));
            }
            let compressed = a.map(|m| v.adjoint() * m * &v);
            for (sub, viso) in irreducible_split(&compressed, tol, rng, depth + 1) {
                out.push((sub, &v * viso));
            }
        }
        return out;
    }
    whole()
}

/// Traces of all words in `(A_j, A_j*)` up to length 4; invariant under
/// simultaneous unitary similarity, used to group candidate duplicates.
fn word_trace_fingerprint(a: &MatrixTuple) -> Vec<C64> {
    let n = a.rows();
    let mut letters: Vec<CMatrix> = a.mats().to_vec();
    letters.extend(a.iter().map(|m| m.adjoint()));
    let mut fingerprint = vec![cr(n as f64)];
    let mut layer: Vec<CMatrix> = vec![mat::identity(n)];
    for _len in 1..=4 {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for l in &letters {
                let prod = w * l;
                fingerprint.push(prod.diagonal().sum());
                next.push(prod);
            }
        }
        layer = next;
    }
    fingerprint
}

fn fingerprints_match(f1: &[C64], f2: &[C64]) -> bool {
    f1.len() == f2.len()
        && f1
            .iter()
            .zip(f2.iter())
            .all(|(a, b)| (a - b).norm() <= 1e-7 * (1.0 + a.norm().max(b.norm())))
}

/// Searches the commutant of the direct sum for an intertwiner between two
/// square tuples; for blocks with trivial self-commutant a nonzero
/// intertwiner is a multiple of a unitary, recovered by its polar factor.
pub fn unitary_similarity(
    a: &MatrixTuple,
    b: &MatrixTuple,
    tol: &ToleranceProfile,
) -> Result<Option<CMatrix>> {
    if a.g() != b.g() || a.rows() != b.rows() || !a.is_square() || !b.is_square() {
        return Err(Error::Shape("unitary similarity needs equal square shapes".into()));
    }
    let n = a.rows();
    let sum = a.direct_sum(b)?;
    let mut family: Vec<CMatrix> = sum.mats().to_vec();
    family.extend(sum.iter().map(|m| m.adjoint()));
    let commutant = commutant_basis(&family, tol);
    let mut best: Option<CMatrix> = None;
    let mut best_norm = 0.0;
    for k in &commutant {
        let block = k.view((0, n), (n, n)).into_owned();
        let f = mat::frobenius(&block);
        if f > best_norm {
            best_norm = f;
            best = Some(block);
        }
    }
    let Some(t) = best else { return Ok(None) };
    if best_norm < 1e-8 {
        return Ok(None);
    }
    let u = mat::polar_unitary(&t);
    let mut worst = 0.0f64;
    for (aj, bj) in a.iter().zip(b.iter()) {
        worst = worst.max(mat::frobenius(&(aj * &u - &u * bj)));
    }
    if worst <= tol.residual_tol.max(1e-8) * (1.0 + a.max_coordinate_norm()) {
        Ok(Some(u))
    } else {
        Ok(None)
    }
}

fn is_zero_tuple(a: &MatrixTuple) -> bool {
    a.iter().all(|m| mat::max_abs(m) <= 1e-12)
}

/// Exit threshold along the ray `t X`, `t >= 0`, for the feasibility set of
/// a summand: infinite when the ray never леaves.
fn ray_exit_threshold(summand: &MatrixTuple, x: &MatrixTuple) -> f64 {
    let lam = match crate::tuple::lambda_eval(summand, x) {
        Ok(l) => l,
        Err(_) => return f64::INFINITY,
    };
    let h = &lam + lam.adjoint();
    let eig = nalgebra::SymmetricEigen::new(h);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-14 {
        -1.0 / min
    } else {
        f64::INFINITY
    }
}

/// Splits a pencil into irreducible summands, removes duplicates up to
/// unitary equivalence (word-trace fingerprints confirmed by an explicit
/// unitary), prunes summands whose constraint never binds, and returns the
/// reduced pencil together with the full decomposition of the input.
///
/// Redundancy pruning samples ray directions and compares exit thresholds;
/// it is a randomized heuristic and the count of summands it removed is
/// reported separately.
pub fn minimal_reduction(
    a: &HermitianPencil,
    tol: &ToleranceProfile,
    seed: u64,
) -> Result<MinimalReduction> {
    let mut rng = random::rng_from_seed(seed);
    let tuple = a.coefficients();
    let parts = irreducible_split(tuple, tol, &mut rng, 0);

    let n = tuple.rows();
    let mut similarity = mat::zeros(n, n);
    let mut col = 0;
    let mut summands = Vec::new();
    for (sub, iso) in &parts {
        similarity
            .view_mut((0, col), (n, iso.ncols()))
            .copy_from(iso);
        col += iso.ncols();
        summands.push(HermitianPencil::new(sub.clone())?);
    }
    let decomposition = Decomposition {
        summands,
        similarity,
    };

    // Group unitarily equivalent summands.
    let fingerprints: Vec<Vec<C64>> = parts.iter().map(|(s, _)| word_trace_fingerprint(s)).collect();
    let mut reps: Vec<MatrixTuple> = Vec::new();
    let mut rep_fps: Vec<Vec<C64>> = Vec::new();
    for (i, (sub, _)) in parts.iter().enumerate() {
        let mut duplicate = false;
        for (r, fp) in rep_fps.iter().enumerate() {
            if reps[r].rows() == sub.rows()
                && fingerprints_match(fp, &fingerprints[i])
                && unitary_similarity(&reps[r], sub, tol)?.is_some()
            {
                duplicate = true;
                break;
            }
        }
        if !duplicate {
            reps.push(sub.clone());
            rep_fps.push(fingerprints[i].clone());
        }
    }

    // Zero summands never constrain the set.
    let mut kept: Vec<MatrixTuple> = Vec::new();
    for r in &reps {
        if !is_zero_tuple(r) {
            kept.push(r.clone());
        }
    }
    if kept.is_empty() {
        kept.push(reps[0].clone());
    }

    // Redundancy: a summand is essential when some ray exits it strictly
    // before exiting the intersection of the others.
    let mut pruned = 0usize;
    if kept.len() > 1 {
        let g = tuple.g();
        let samples = 48;
        let mut essential = vec![false; kept.len()];
        for s in 0..samples {
            let mut srng = random::stream(seed.wrapping_add(1), s as u64);
            let level = 1 + (s % 2);
            let x = random::gaussian_tuple(&mut srng, g, level);
            let thresholds: Vec<f64> = kept.iter().map(|k| ray_exit_threshold(k, &x)).collect();
            for i in 0..kept.len() {
                let others = thresholds
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &t)| t)
                    .fold(f64::INFINITY, f64::min);
                if thresholds[i] < others * (1.0 - 1e-9) {
                    essential[i] = true;
                }
            }
        }
        let before = kept.len();
        let survivors: Vec<MatrixTuple> = kept
            .into_iter()
            .zip(essential.iter())
            .filter(|(_, &e)| e)
            .map(|(k, _)| k)
            .collect();
        kept = if survivors.is_empty() {
            vec![reps[0].clone()]
        } else {
            survivors
        };
        pruned = before - kept.len();
    }

    let mut reduced = kept[0].clone();
    for k in &kept[1..] {
        reduced = reduced.direct_sum(k)?;
    }
    Ok(MinimalReduction {
        pencil: HermitianPencil::new(reduced)?,
        decomposition,
        heuristically_pruned: pruned,
    })
}

/// Ball-minimal form of a spectraball pencil: reduce the embedded square
/// pencil, then recover the rectangular coefficients from the ranges of the
/// reduced tuple and its adjoint.  Errors when the reduced tuple violates
/// the required `A_m A_j = 0` block structure or when sampled memberships
/// disagree with the input ball.
pub fn ball_minimal_reduction(
    e: &SpectraballPencil,
    tol: &ToleranceProfile,
    seed: u64,
) -> Result<SpectraballPencil> {
    let reduced = minimal_reduction(&e.embed_ball(), tol, seed)?;
    let a = reduced.pencil.coefficients();
    let n = a.rows();
    let scale = 1.0 + a.max_coordinate_norm().powi(2);
    let struct_tol = tol.residual_tol.max(1e-9) * scale;
    for am in a.iter() {
        for aj in a.iter() {
            let prod = am * aj;
            if mat::operator_norm(&prod) > struct_tol {
                return Err(Error::Numerical(
                    "reduced pencil violates the nilpotency structure".into(),
                ));
            }
        }
    }
    let q_range = range_basis(&a.stack_cols(), tol);
    let q_corange = range_basis(&a.adjoint().stack_cols(), tol);
    let (s, t) = (q_range.ncols(), q_corange.ncols());
    if s + t != n {
        return Err(Error::Numerical(format!(
            "range splitting {s}+{t} does not fill size {n}"
        )));
    }
    let mats: Vec<CMatrix> = a
        .iter()
        .map(|aj| q_range.adjoint() * aj * &q_corange)
        .collect();
    let f = MatrixTuple::new(mats)?;
    // Structure residual: the compressed form must reproduce the summand.
    for (aj, fj) in a.iter().zip(f.iter()) {
        let back = &q_range * fj * q_corange.adjoint();
        if mat::operator_norm(&(aj - back)) > struct_tol {
            return Err(Error::Numerical(
                "range compression does not reproduce the reduced pencil".into(),
            ));
        }
    }
    let out = SpectraballPencil::new(f)?;
    // Sampled gauge agreement between the input and reduced balls.
    for i in 0..10u64 {
        let mut rng = random::stream(seed.wrapping_add(2), i);
        let level = 1 + (i % 2) as usize;
        let x = random::gaussian_tuple(&mut rng, e.g(), level);
        let before = mat::operator_norm(&e.lambda(&x)?);
        let after = mat::operator_norm(&out.lambda(&x)?);
        if (before - after).abs() > 1e-7 * (1.0 + before) {
            return Err(Error::Numerical(
                "reduced ball disagrees with the input on sampled points".into(),
            ));
        }
    }
    Ok(out)
}

/// Searches for unitaries `(W, V)` with `F_j = W E_j V` by alternating
/// orthogonal Procrustes steps from seeded random starts.  `None` is
/// inconclusive: the budget ran out without a certificate.
pub fn ball_equivalent(
    e: &MatrixTuple,
    f: &MatrixTuple,
    tol: &ToleranceProfile,
    seed: u64,
) -> Result<Option<(CMatrix, CMatrix)>> {
    if e.g() != f.g() || e.rows() != f.rows() || e.cols() != f.cols() {
        return Err(Error::Shape(format!(
            "tuples of shape {}x{} and {}x{} cannot be ball-equivalent",
            e.rows(),
            e.cols(),
            f.rows(),
            f.cols()
        )));
    }
    let (d, cols) = (e.rows(), e.cols());
    let accept = tol.residual_tol.max(1e-9) * (1.0 + f.max_coordinate_norm());
    let starts = 24;
    for start in 0..starts {
        let mut rng = random::stream(seed, start);
        let mut w = if start == 0 {
            mat::identity(d)
        } else {
            random::haar_unitary(&mut rng, d)
        };
        let mut v = if start == 0 {
            mat::identity(cols)
        } else {
            random::haar_unitary(&mut rng, cols)
        };
        let mut prev = f64::INFINITY;
        for _iter in 0..300 {
            let mut mw = mat::zeros(d, d);
            for (ej, fj) in e.iter().zip(f.iter()) {
                mw += fj * (ej * &v).adjoint();
            }
            w = mat::polar_unitary(&mw);
            let mut mv = mat::zeros(cols, cols);
            for (ej, fj) in e.iter().zip(f.iter()) {
                mv += (&w * ej).adjoint() * fj;
            }
            v = mat::polar_unitary(&mv);
            let residual = e
                .iter()
                .zip(f.iter())
                .map(|(ej, fj)| mat::operator_norm(&(fj - &w * ej * &v)))
                .fold(0.0, f64::max);
            if residual <= accept {
                return Ok(Some((w, v)));
            }
            if (prev - residual).abs() < 1e-14 {
                break;
            }
            prev = residual;
        }
    }
    Ok(None)
}
