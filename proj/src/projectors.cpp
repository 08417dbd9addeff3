#include "spin7/projectors.hpp"

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "spin7/parallel.hpp"

namespace spin7 {

// G-orthonormalize the columns of V (span basis) for the grade inner product.
Eigen::MatrixXd gramOrthonormalize(const Eigen::MatrixXd& V, const Eigen::MatrixXd& G,
                                   int expectedRank, double gapTol)
{
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd Y = L.transpose() * V;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > gapTol * sv[0]) ++rank;
    if (expectedRank >= 0 && rank != expectedRank)
        throw ClaimViolation("span rank " + std::to_string(rank) + ", expected " +
                             std::to_string(expectedRank));
    Eigen::MatrixXd Q = svd.matrixU().leftCols(rank);
    return L.transpose().triangularView<Eigen::Upper>().solve(Q);
}

namespace {

Eigen::MatrixXd projectorFromBasis(const Eigen::MatrixXd& B, const Eigen::MatrixXd& G)
{
    return B * B.transpose() * G;
}

void validateProjector(const Eigen::MatrixXd& P, const Eigen::MatrixXd& G, int rank,
                       const char* name)
{
    const double tol = 1e-9;
    const int n = static_cast<int>(P.rows());
    if ((P * P - P).norm() > tol * n) throw ClaimViolation(std::string(name) + ": not idempotent");
    Eigen::MatrixXd GP = G * P;
    if ((GP - GP.transpose()).norm() > tol * n)
        throw ClaimViolation(std::string(name) + ": not self-adjoint");
    if (std::abs(P.trace() - rank) > tol * n)
        throw ClaimViolation(std::string(name) + ": rank " + std::to_string(P.trace()) +
                             " != " + std::to_string(rank));
}

// The Lambda^4_7 generator of a 2-form theta: view theta inside V ⊗ V^* as
// a sum of v ⊗ Theta pieces and contract against Omega, (v ⊗ Theta) ⊗ Omega
// -> v ∧ i_Theta Omega. In coordinates: sum_cd theta_cd dx_c ∧ i_{(dx_d)#} Omega.
KForm lambda47Generator(const KForm& theta, const KForm& omega, const EuclideanData& e)
{
    const Matrix8d ginv = e.metric().inverse();
    Matrix8d t = twoFormToMatrix(theta);
    KForm r(4);
    for (int c = 0; c < kDim; ++c) {
        for (int d = 0; d < kDim; ++d) {
            if (t(c, d) == 0.0) continue;
            Vector8d sharp = ginv.col(d); // (dx_d)#
            KForm dxc(1);
            dxc.coeffs = Eigen::VectorXd::Zero(kDim);
            dxc.coeffs[c] = 1.0;
            r.coeffs += t(c, d) * wedge(dxc, contract(sharp, omega)).coeffs;
        }
    }
    return r;
}

Eigen::VectorXd randomVec(int n, std::mt19937_64& rng)
{
    std::normal_distribution<double> d;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

} // namespace

Spin7Structure Spin7Structure::standard()
{
    return Spin7Structure(cayleyForm(), Matrix8d::Identity(), EuclideanData());
}

Spin7Structure Spin7Structure::fromFrame(const Matrix8d& A)
{
    if (A.determinant() <= 0.0)
        throw std::invalid_argument("frame must be orientation-preserving");
    KForm omega = pullback(cayleyForm(), A);
    EuclideanData e(A.transpose() * A);
    return Spin7Structure(std::move(omega), A, std::move(e));
}

const Eigen::MatrixXd& ProjectorSet::projector(int grade, int dim) const
{
    if (grade == 2 && dim == 7) return p2_7;
    if (grade == 2 && dim == 21) return p2_21;
    if (grade == 3 && dim == 8) return p3_8;
    if (grade == 3 && dim == 48) return p3_48;
    if (grade == 4 && dim == 1) return p4_1;
    if (grade == 4 && dim == 7) return p4_7;
    if (grade == 4 && dim == 27) return p4_27;
    if (grade == 4 && dim == 35) return p4_35;
    throw std::invalid_argument("no such summand");
}

const Eigen::MatrixXd& ProjectorSet::basis(int grade, int dim) const
{
    if (grade == 2 && dim == 7) return b2_7;
    if (grade == 2 && dim == 21) return b2_21;
    if (grade == 3 && dim == 8) return b3_8;
    if (grade == 3 && dim == 48) return b3_48;
    if (grade == 4 && dim == 1) return b4_1;
    if (grade == 4 && dim == 7) return b4_7;
    if (grade == 4 && dim == 27) return b4_27;
    if (grade == 4 && dim == 35) return b4_35;
    throw std::invalid_argument("no such summand");
}

double ProjectorSet::componentNorm(const KForm& f, int dim) const
{
    Eigen::VectorXd c = projector(f.grade, dim) * f.coeffs;
    return std::sqrt(std::abs(c.dot(euclid.gram(f.grade) * c)));
}

ProjectorSet buildProjectors(const Spin7Structure& s)
{
    ProjectorSet ps;
    ps.omega = s.omega();
    ps.euclid = s.euclid();
    const EuclideanData& e = ps.euclid;
    const KForm& omega = ps.omega;

    if ((pullback(cayleyForm(), s.frame()).coeffs - omega.coeffs).norm() > 1e-9)
        throw ClaimViolation("structure form is not the frame pullback of the Cayley form");

    // Lambda^2: eigenspaces of alpha -> *(alpha ∧ Omega), eigenvalues 3 / -1.
    const Eigen::MatrixXd& G2 = e.gram(2);
    Eigen::MatrixXd M2 = e.starMatrix(6) * wedgeMatrix(omega, 2);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(G2 * M2, G2);
    if (es.info() != Eigen::Success) throw ClaimViolation("Lambda^2 eigensolve failed");
    const Eigen::VectorXd& ev = es.eigenvalues(); // ascending
    const double clusterTol = 1e-6;
    for (int i = 0; i < 21; ++i)
        if (std::abs(ev[i] + 1.0) > clusterTol)
            throw ClaimViolation("Lambda^2 eigenvalue cluster at -1 broken");
    for (int i = 21; i < 28; ++i)
        if (std::abs(ev[i] - 3.0) > clusterTol)
            throw ClaimViolation("Lambda^2 eigenvalue cluster at 3 broken");
    ps.b2_21 = es.eigenvectors().leftCols(21); // G-orthonormal already
    ps.b2_7 = es.eigenvectors().rightCols(7);
    ps.p2_7 = projectorFromBasis(ps.b2_7, G2);
    ps.p2_21 = projectorFromBasis(ps.b2_21, G2);

    // Lambda^3_8 = {*(alpha ∧ Omega) : alpha in Lambda^1}; Lambda^3_48 its
    // orthogonal complement (= ker(· ∧ Omega), verified below).
    const Eigen::MatrixXd& G3 = e.gram(3);
    Eigen::MatrixXd V38 = e.starMatrix(5) * wedgeMatrix(omega, 1);
    ps.b3_8 = gramOrthonormalize(V38, G3, 8);
    ps.p3_8 = projectorFromBasis(ps.b3_8, G3);
    ps.p3_48 = Eigen::MatrixXd::Identity(56, 56) - ps.p3_8;
    {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> c48(G3 * ps.p3_48, G3);
        ps.b3_48 = c48.eigenvectors().rightCols(48);
        // the defining property of the complement: beta ∧ Omega = 0
        Eigen::MatrixXd WO3 = wedgeMatrix(omega, 3) * ps.b3_48;
        if (WO3.norm() > 1e-8 * omega.coeffs.norm())
            throw ClaimViolation("Lambda^3_48 candidates do not satisfy beta ∧ Omega = 0");
    }

    // Lambda^4: star eigenspaces, then 1 + 7 + 27 inside the self-dual part.
    const Eigen::MatrixXd& G4 = e.gram(4);
    const Eigen::MatrixXd S4 = e.starMatrix(4);
    const Eigen::MatrixXd I70 = Eigen::MatrixXd::Identity(70, 70);
    Eigen::MatrixXd Pplus = 0.5 * (I70 + S4);
    ps.p4_35 = 0.5 * (I70 - S4);

    const double omegaNormSq = omega.coeffs.dot(G4 * omega.coeffs);
    ps.b4_1 = omega.coeffs / std::sqrt(omegaNormSq);
    ps.p4_1 = projectorFromBasis(ps.b4_1, G4);

    Eigen::MatrixXd V47(70, 7);
    for (int j = 0; j < 7; ++j) {
        KForm theta(2);
        theta.coeffs = ps.b2_7.col(j);
        V47.col(j) = lambda47Generator(theta, omega, e).coeffs;
    }
    ps.b4_7 = gramOrthonormalize(V47, G4, 7);
    ps.p4_7 = projectorFromBasis(ps.b4_7, G4);
    ps.p4_27 = Pplus - ps.p4_1 - ps.p4_7;
    {
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> c27(G4 * ps.p4_27, G4);
        ps.b4_27 = c27.eigenvectors().rightCols(27);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> c35(G4 * ps.p4_35, G4);
        ps.b4_35 = c35.eigenvectors().rightCols(35);
    }

    validateProjector(ps.p2_7, G2, 7, "p2_7");
    validateProjector(ps.p2_21, G2, 21, "p2_21");
    validateProjector(ps.p3_8, G3, 8, "p3_8");
    validateProjector(ps.p3_48, G3, 48, "p3_48");
    validateProjector(ps.p4_1, G4, 1, "p4_1");
    validateProjector(ps.p4_7, G4, 7, "p4_7");
    validateProjector(ps.p4_27, G4, 27, "p4_27");
    validateProjector(ps.p4_35, G4, 35, "p4_35");
    const double n2 = (ps.p2_7 * ps.p2_21).norm();
    const double n4 = (ps.p4_1 * ps.p4_7).norm() + (ps.p4_1 * ps.p4_27).norm() +
                      (ps.p4_7 * ps.p4_27).norm() + ((ps.p4_1 + ps.p4_7 + ps.p4_27) * ps.p4_35).norm();
    if (n2 > 1e-9 * 28 || n4 > 1e-9 * 70)
        throw ClaimViolation("projectors of one grade are not mutually annihilating");
    if ((ps.p2_7 + ps.p2_21 - Eigen::MatrixXd::Identity(28, 28)).norm() > 1e-9 * 28 ||
        (ps.p4_1 + ps.p4_7 + ps.p4_27 + ps.p4_35 - I70).norm() > 1e-9 * 70)
        throw ClaimViolation("projectors do not sum to the identity");
    return ps;
}

std::vector<std::pair<std::string, KForm>> decompose(const KForm& f, const ProjectorSet& ps)
{
    static const std::vector<std::pair<int, std::vector<int>>> table = {
        {2, {7, 21}}, {3, {8, 48}}, {4, {1, 7, 27, 35}}};
    for (const auto& [grade, dims] : table) {
        if (grade != f.grade) continue;
        std::vector<std::pair<std::string, KForm>> out;
        for (int d : dims) {
            KForm comp(grade);
            comp.coeffs = ps.projector(grade, d) * f.coeffs;
            out.emplace_back("Lambda^" + std::to_string(grade) + "_" + std::to_string(d),
                             std::move(comp));
        }
        return out;
    }
    throw std::invalid_argument("decompose: unsupported grade " + std::to_string(f.grade));
}

WedgeImageReport wedgeImageCheck(const ProjectorSet& ps, int samples, std::uint64_t seed,
                                 double tol)
{
    struct Case {
        const char* name;
        int dimA, dimB;
        std::vector<int> allowed, forbidden;
    };
    const std::vector<Case> cases = {
        {"7x7", 7, 7, {27, 1}, {7, 35}},
        {"7x21", 7, 21, {7, 35}, {1, 27}},
        {"21x21", 21, 21, {1, 27, 35}, {7}},
    };
    WedgeImageReport report;
    const double attain = 1e-6;
    for (const auto& c : cases) {
        const Eigen::MatrixXd& BA = ps.basis(2, c.dimA);
        const Eigen::MatrixXd& BB = ps.basis(2, c.dimB);
        // exhaustive basis pairs span the bilinear map; random pairs on top
        const int nbasis = c.dimA * c.dimB;
        const int total = nbasis + samples;
        std::vector<double> forb(total, 0.0);
        std::vector<std::vector<double>> allow(c.allowed.size(),
                                               std::vector<double>(total, 0.0));
        std::mt19937_64 rng(seed ^ std::hash<std::string>{}(c.name));
        Eigen::MatrixXd randA(c.dimA, samples), randB(c.dimB, samples);
        for (int s = 0; s < samples; ++s) {
            randA.col(s) = randomVec(c.dimA, rng);
            randB.col(s) = randomVec(c.dimB, rng);
        }
        par::forEach(total, [&](std::int64_t t) {
            KForm a(2), b(2);
            if (t < nbasis) {
                a.coeffs = BA.col(t % c.dimA);
                b.coeffs = BB.col(t / c.dimA);
            } else {
                a.coeffs = BA * randA.col(t - nbasis);
                b.coeffs = BB * randB.col(t - nbasis);
            }
            KForm w = wedge(a, b);
            const double scale = std::sqrt(w.coeffs.dot(ps.euclid.gram(4) * w.coeffs));
            if (scale == 0.0) return;
            for (std::size_t i = 0; i < c.forbidden.size(); ++i)
                forb[t] = std::max(forb[t], ps.componentNorm(w, c.forbidden[i]) / scale);
            for (std::size_t i = 0; i < c.allowed.size(); ++i)
                allow[i][t] = ps.componentNorm(w, c.allowed[i]) / scale;
        });
        WedgeCaseReport cr;
        cr.name = c.name;
        cr.samples = total;
        cr.allowed = c.allowed;
        for (double f : forb) cr.maxForbiddenRel = std::max(cr.maxForbiddenRel, f);
        for (auto& av : allow) {
            double best = 0;
            for (double x : av) best = std::max(best, x);
            cr.attained.push_back(best > attain);
        }
        report.cases.push_back(std::move(cr));
    }
    report.pass = true;
    for (const auto& cr : report.cases) {
        if (cr.maxForbiddenRel > tol)
            throw ClaimViolation("wedge image check: forbidden summand residual " +
                                 std::to_string(cr.maxForbiddenRel) + " in case " + cr.name);
        for (bool a : cr.attained)
            if (!a) report.pass = false;
    }
    if (!report.pass) throw ClaimViolation("wedge image check: an allowed summand was not attained");
    return report;
}

namespace {
void requireMembership(const KForm& f, const ProjectorSet& ps, int dim, const char* what)
{
    const double n = f.coeffs.norm();
    if (n == 0.0) return;
    Eigen::VectorXd res = ps.projector(f.grade, dim) * f.coeffs - f.coeffs;
    if (res.norm() > 1e-8 * n)
        throw std::invalid_argument(std::string(what) + ": input not in the required summand");
}

int svdRank(const Eigen::MatrixXd& M, double rel = 1e-9)
{
    if (M.size() == 0 || M.norm() == 0.0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > rel * sv[0]) ++r;
    return r;
}
} // namespace

int lambda27Lambda221WedgeRank(const KForm& alpha, const ProjectorSet& ps)
{
    if (alpha.grade != 2) throw std::invalid_argument("alpha must be a 2-form");
    requireMembership(alpha, ps, 7, "lambda27Lambda221WedgeRank");
    if (alpha.coeffs.norm() == 0.0) throw std::invalid_argument("alpha must be nonzero");
    Eigen::MatrixXd M = wedgeMatrix(alpha, 2) * ps.b2_21; // 70 x 21
    return svdRank(M);
}

Eigen::MatrixXd lambda27OneFormIso(const KForm& omega7, const ProjectorSet& ps)
{
    if (omega7.grade != 2) throw std::invalid_argument("omega7 must be a 2-form");
    requireMembership(omega7, ps, 7, "lambda27OneFormIso");
    // rows: b3_8 coordinates; columns: the euclidean Lambda^1 basis
    return ps.b3_8.transpose() * ps.euclid.gram(3) * wedgeMatrix(omega7, 1);
}

int wedgeRankOnOneForms(const KForm& omega2)
{
    if (omega2.grade != 2) throw std::invalid_argument("expects a 2-form");
    return svdRank(wedgeMatrix(omega2, 1));
}

int lambda221NoDecomposable(const KForm& omega21, const ProjectorSet& ps)
{
    requireMembership(omega21, ps, 21, "lambda221NoDecomposable");
    if (omega21.coeffs.norm() == 0.0) throw std::invalid_argument("omega21 must be nonzero");
    return wedgeRankOnOneForms(omega21);
}

KForm structureDerivative(const Spin7Structure& s, const Matrix8d& X, double h)
{
    Matrix8d Ep = (h * X).exp();
    Matrix8d Em = (-h * X).exp();
    KForm r(4);
    r.coeffs = (pullback(s.omega(), Ep).coeffs - pullback(s.omega(), Em).coeffs) / (2 * h);
    return r;
}

std::vector<KForm> tangentSpaceBasis(const Spin7Structure& s, TangentVariant variant,
                                     const ProjectorSet& ps)
{
    std::vector<Matrix8d> dirs;
    auto basisElem = [](int i, int j) {
        Matrix8d m = Matrix8d::Zero();
        m(i, j) = 1;
        return m;
    };
    switch (variant) {
    case TangentVariant::Full:
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j) dirs.push_back(basisElem(i, j));
        break;
    case TangentVariant::Metric:
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) dirs.push_back(basisElem(i, j) - basisElem(j, i));
        break;
    case TangentVariant::Volume:
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                if (i != j) dirs.push_back(basisElem(i, j));
        for (int i = 0; i < 7; ++i) dirs.push_back(basisElem(i, i) - basisElem(i + 1, i + 1));
        break;
    case TangentVariant::Conformal:
        dirs.push_back(Matrix8d::Identity());
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) dirs.push_back(basisElem(i, j) - basisElem(j, i));
        break;
    }

    Eigen::MatrixXd D(70, dirs.size());
    par::forEach(static_cast<std::int64_t>(dirs.size()), [&](std::int64_t i) {
        D.col(i) = structureDerivative(s, dirs[i]).coeffs;
    });

    int expected = 0;
    std::vector<int> summands;
    switch (variant) {
    case TangentVariant::Full:
        expected = 43;
        summands = {1, 7, 35};
        break;
    case TangentVariant::Metric:
        expected = 7;
        summands = {7};
        break;
    case TangentVariant::Volume:
        expected = 42;
        summands = {7, 35};
        break;
    case TangentVariant::Conformal:
        expected = 8;
        summands = {1, 7};
        break;
    }
    Eigen::MatrixXd B = gramOrthonormalize(D, ps.euclid.gram(4), expected);

    // span must lie inside the direct sum of the expected summands
    Eigen::MatrixXd inside = Eigen::MatrixXd::Zero(70, 70);
    for (int d : summands) inside += ps.projector(4, d);
    if (((Eigen::MatrixXd::Identity(70, 70) - inside) * B).norm() > 1e-6 * B.cols())
        throw ClaimViolation("tangent space span leaves the expected summands");

    std::vector<KForm> out;
    for (int j = 0; j < B.cols(); ++j) {
        KForm f(4);
        f.coeffs = B.col(j);
        out.push_back(std::move(f));
    }
    return out;
}

std::pair<int, int> su2OrthogonalityRank(const Eigen::Matrix<double, 3, 21>& F,
                                         const Eigen::Matrix<double, 3, 7>& psi, double tol)
{
    const double scale = std::max(1.0, F.norm() * psi.norm());
    if ((F.transpose() * psi).norm() > tol * scale)
        throw std::invalid_argument("su2OrthogonalityRank: images are not orthogonal");
    const int rf = svdRank(F, 1e-9);
    const int rp = svdRank(psi, 1e-9);
    if (rf + rp > 3)
        throw ClaimViolation("orthogonal images in R^3 with rank sum > 3");
    return {rf, rp};
}

Matrix8d twoFormToMatrix(const KForm& beta)
{
    if (beta.grade != 2) throw std::invalid_argument("expects a 2-form");
    const auto& fb = FormBasis::get();
    Matrix8d m = Matrix8d::Zero();
    for (int p = 0; p < fb.dim(2); ++p) {
        unsigned mask = fb.maskAt(2, p);
        int a = -1, b = -1;
        for (int bit = 0; bit < kDim; ++bit)
            if (mask & (1u << bit)) (a < 0 ? a : b) = bit;
        m(a, b) = beta.coeffs[p];
        m(b, a) = -beta.coeffs[p];
    }
    return m;
}

KForm matrixToTwoForm(const Matrix8d& X)
{
    const auto& fb = FormBasis::get();
    KForm f(2);
    for (int p = 0; p < fb.dim(2); ++p) {
        unsigned mask = fb.maskAt(2, p);
        int a = -1, b = -1;
        for (int bit = 0; bit < kDim; ++bit)
            if (mask & (1u << bit)) (a < 0 ? a : b) = bit;
        f.coeffs[p] = 0.5 * (X(a, b) - X(b, a));
    }
    return f;
}

} // namespace spin7
