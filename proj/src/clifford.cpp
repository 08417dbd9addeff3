#include "spin7/clifford.hpp"

#include <cmath>

namespace spin7 {

namespace {

using Mat2 = Eigen::Matrix2d;

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B)
{
    Eigen::MatrixXd R(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j) R.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return R;
}

// Iterated doubling: from an anticommuting family on R^d produce
// {E (x) I, T (x) I, S (x) g_i} on R^{2d}; squares -1, +1, g_i^2.
std::vector<Eigen::MatrixXd> doubleFamily(const std::vector<Eigen::MatrixXd>& fam, int d)
{
    Mat2 E, S, T;
    E << 0, 1, -1, 0;
    S << 1, 0, 0, -1;
    T << 0, 1, 1, 0;
    Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
    std::vector<Eigen::MatrixXd> out;
    out.push_back(kron(E, I));
    out.push_back(kron(T, I));
    for (const auto& g : fam) out.push_back(kron(S, g));
    return out;
}

} // namespace

CliffordRep::CliffordRep(int volumeSign)
{
    // Double three times: {} -> (1,1) on R^2 -> (2,2) on R^4 -> (3,3) on R^8
    // -> (4,4) on R^16, then twist the +1-square elements by their product
    // to reach signature (0,8): all generators square to -Id.
    std::vector<Eigen::MatrixXd> fam;
    int d = 1;
    for (int step = 0; step < 4; ++step) {
        fam = doubleFamily(fam, d);
        d *= 2;
    }
    std::vector<Matrix16d> plus, minus;
    for (const auto& g : fam) {
        Matrix16d m = g;
        if ((m * m - Matrix16d::Identity()).norm() < 1e-12)
            plus.push_back(m);
        else
            minus.push_back(m);
    }
    Matrix16d tw = plus[0] * plus[1] * plus[2] * plus[3];
    for (int i = 0; i < 4; ++i) {
        gamma_[i] = plus[i] * tw;
        gamma_[i + 4] = minus[i];
    }

    pairing_ = Matrix16d::Identity();
    volume_ = Matrix16d::Identity();
    for (int i = 0; i < 8; ++i) volume_ = volume_ * gamma_[i];
    volume_ *= volumeSign;
    projPlus_ = 0.5 * (Matrix16d::Identity() + volume_);
    projMinus_ = 0.5 * (Matrix16d::Identity() - volume_);

    Eigen::SelfAdjointEigenSolver<Matrix16d> es(volume_);
    basisMinus_ = es.eigenvectors().leftCols(8);
    basisPlus_ = es.eigenvectors().rightCols(8);

    const auto& fb = FormBasis::get();
    for (unsigned mask = 0; mask < 256; ++mask) {
        Matrix16d m = Matrix16d::Identity();
        for (int b = 0; b < kDim; ++b)
            if (mask & (1u << b)) m = m * gamma_[b];
        gammaBasis_[mask] = m;
        const int k = fb.gradeOfMask(mask);
        // gamma(e_I)^2 = (-1)^{k(k-1)/2} (gamma_i^2)^k = (-1)^{k(k+1)/2}
        signs_[mask] = ((k * (k + 1) / 2) % 2) ? -1.0 : 1.0;
    }
}

CliffordRep buildRep() { return CliffordRep(); }

Matrix16d CliffordRep::formAction(const KForm& f) const
{
    const auto& fb = FormBasis::get();
    Matrix16d m = Matrix16d::Zero();
    for (int p = 0; p < fb.dim(f.grade); ++p)
        if (f.coeffs[p] != 0.0) m += f.coeffs[p] * gammaBasis_[fb.maskAt(f.grade, p)];
    return m;
}

Matrix16d CliffordRep::formAction(const Multivector& mv) const
{
    Matrix16d m = Matrix16d::Zero();
    for (unsigned mask = 0; mask < 256; ++mask)
        if (mv[mask] != 0.0) m += mv[mask] * gammaBasis_[mask];
    return m;
}

Chirality CliffordRep::classify(const Vector16d& s, double tol) const
{
    const double n = s.norm();
    if (n == 0.0) return Chirality::Mixed;
    if ((projMinus_ * s).norm() < tol * n) return Chirality::Plus;
    if ((projPlus_ * s).norm() < tol * n) return Chirality::Minus;
    return Chirality::Mixed;
}

Spinor cliffordAct(const KForm& form, const Spinor& s, const CliffordRep& rep)
{
    Spinor r;
    r.components = rep.formAction(form) * s.components;
    r.chirality = rep.classify(r.components);
    return r;
}

Spinor findStabilizedSpinor(const ProjectorSet& ps, const CliffordRep& rep)
{
    const auto& Q = rep.chiralBasis(Chirality::Plus);
    Eigen::MatrixXd stacked(21 * 16, 8);
    for (int j = 0; j < 21; ++j) {
        KForm beta(2);
        beta.coeffs = ps.b2_21.col(j);
        stacked.middleRows(j * 16, 16) = rep.formAction(beta) * Q;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    int kernel = 0;
    for (int i = 0; i < 8; ++i)
        if (sv[i] < 1e-9 * sv[0]) ++kernel;
    if (kernel != 1)
        throw ClaimViolation("stabilized-spinor kernel has dimension " + std::to_string(kernel) +
                             " (convention mismatch)");
    Vector16d eta = Q * svd.matrixV().col(7);
    eta.normalize();
    for (int i = 0; i < 16; ++i) {
        if (std::abs(eta[i]) > 1e-8) {
            if (eta[i] < 0) eta = -eta;
            break;
        }
    }
    Spinor out;
    out.components = eta;
    out.chirality = Chirality::Plus;
    return out;
}

Spinor mapI(const KForm& alpha, const Spinor& eta, const CliffordRep& rep)
{
    Spinor r = cliffordAct(alpha, eta, rep);
    const double along = std::abs(r.components.dot(eta.components));
    if (along > 1e-9 * (1.0 + r.norm()))
        throw ClaimViolation("mapI image has a component along eta");
    return r;
}

Eigen::MatrixXd mapIMatrix(const ProjectorSet& ps, const Spinor& eta, const CliffordRep& rep)
{
    // orthonormal basis of H = eta-perp inside S^+
    const auto& Q = rep.chiralBasis(Chirality::Plus);
    Eigen::Matrix<double, 8, 1> etaPlus = Q.transpose() * eta.components;
    Eigen::Matrix<double, 8, 8> M = Eigen::Matrix<double, 8, 8>::Identity();
    M.col(0) = etaPlus;
    // unpivoted QR keeps eta in the first column, so the rest spans H
    Eigen::HouseholderQR<Eigen::Matrix<double, 8, 8>> qr(M);
    Eigen::Matrix<double, 8, 8> full = qr.householderQ();
    Eigen::Matrix<double, 16, 7> H = Q * full.rightCols(7);

    Eigen::MatrixXd out(7, 7);
    for (int j = 0; j < 7; ++j) {
        KForm alpha(2);
        alpha.coeffs = ps.b2_7.col(j);
        Spinor img = mapI(alpha, eta, rep);
        out.col(j) = H.transpose() * img.components;
    }
    return out;
}

Multivector polyFormOfEndomorphism(const Matrix16d& X, const CliffordRep& rep)
{
    Multivector mv;
    for (unsigned mask = 0; mask < 256; ++mask) {
        const Matrix16d& g = rep.gammaBasis(mask);
        // gamma^{-1} = sign * gamma
        mv[mask] = rep.gammaBasisSign(mask) * (g * X).trace() / 16.0;
    }
    return mv;
}

EtaOmegaReport verifyEtaOmegaIdentity(const Spinor& eta, const KForm& omega,
                                      const CliffordRep& rep, double tol)
{
    const auto& fb = FormBasis::get();
    Matrix16d X = eta.components * eta.components.transpose();
    Multivector mv = polyFormOfEndomorphism(X, rep);

    EtaOmegaReport out;
    out.scalar = mv[0];
    KForm g4 = mv.gradePart(4);
    const double omegaNormSq = omega.coeffs.squaredNorm();
    const double g4fit = g4.coeffs.dot(omega.coeffs) / omegaNormSq;
    out.omegaRatio = g4fit / out.scalar;
    out.volumeRatio = mv[255] / out.scalar;

    for (int k : {1, 2, 3, 5, 6, 7}) out.offGradeNorm += mv.gradePart(k).norm();

    // residual of the structural identity c (1 + r Omega + v nu)
    Multivector model = Multivector::fromKForm(omega);
    model *= g4fit;
    model[0] += out.scalar;
    model[255] += mv[255];
    out.structResidual = (mv - model).norm() / mv.norm();

    // residual against the all-plus normalization c (1 + Omega + nu)
    Multivector target = Multivector::fromKForm(omega);
    target[0] += 1.0;
    target[255] += 1.0;
    double tt = 0, mt = 0;
    for (unsigned m = 0; m < 256; ++m) {
        tt += target[m] * target[m];
        mt += mv[m] * target[m];
    }
    const double cplus = mt / tt;
    double res2 = 0;
    for (unsigned m = 0; m < 256; ++m) {
        const double d = mv[m] - cplus * target[m];
        res2 += d * d;
    }
    out.plusConventionResidual = std::sqrt(res2) / (std::abs(cplus) * std::sqrt(tt));

    // Direct quadruple identity: <gamma(e_I) eta, eta> proportional to the
    // Omega coefficients over all C(8,4) basis quadruples.
    Eigen::VectorXd quad(fb.dim(4));
    for (int p = 0; p < fb.dim(4); ++p)
        quad[p] = eta.components.dot(rep.gammaBasis(fb.maskAt(4, p)) * eta.components);
    out.quadFitScalar = quad.dot(omega.coeffs) / omegaNormSq;
    out.quadFitResidual = (quad - out.quadFitScalar * omega.coeffs).norm() /
                          (std::abs(out.quadFitScalar) * std::sqrt(omegaNormSq));

    const bool structureOk = out.scalar > 0 && out.structResidual < tol &&
                             out.offGradeNorm < tol &&
                             std::abs(std::abs(out.omegaRatio) - 1.0) < tol &&
                             std::abs(out.volumeRatio - 1.0) < tol &&
                             out.quadFitResidual < tol;
    if (!structureOk)
        throw ClaimViolation(
            "eta (x) eta does not expand as c (1 + r Omega + nu) with |r| = 1");
    return out;
}

SpinorialKernelReport spinorialInstantonKernel(const Spinor& eta, const ProjectorSet& ps,
                                               const CliffordRep& rep)
{
    const auto& fb = FormBasis::get();
    Eigen::MatrixXd K(16, 28);
    for (int p = 0; p < 28; ++p) K.col(p) = rep.gammaBasis(fb.maskAt(2, p)) * eta.components;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    SpinorialKernelReport out;
    const double scale = sv[0];
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-9 * scale) ++rank;
    out.kernelDim = 28 - rank;

    Eigen::MatrixXd kernel = svd.matrixV().rightCols(out.kernelDim);
    out.kernelAlignment = ((Eigen::MatrixXd::Identity(28, 28) - ps.p2_21) * kernel).norm();

    for (int j = 0; j < 21; ++j) {
        KForm beta(2);
        beta.coeffs = ps.b2_21.col(j);
        out.maxLambda21Norm =
            std::max(out.maxLambda21Norm, (rep.formAction(beta) * eta.components).norm());
    }
    out.minLambda7Norm = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 7; ++j) {
        KForm beta(2);
        beta.coeffs = ps.b2_7.col(j);
        out.minLambda7Norm =
            std::min(out.minLambda7Norm, (rep.formAction(beta) * eta.components).norm());
    }
    if (out.kernelDim != 21)
        throw ClaimViolation("spinorial instanton kernel has dimension " +
                             std::to_string(out.kernelDim) + ", expected 21");
    return out;
}

} // namespace spin7
