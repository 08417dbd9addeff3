#pragma once

#include <array>

#include "spin7/exterior.hpp"
#include "spin7/projectors.hpp"

namespace spin7 {

using Matrix16d = Eigen::Matrix<double, 16, 16>;
using Vector16d = Eigen::Matrix<double, 16, 1>;

enum class Chirality { Plus, Minus, Mixed };

struct Spinor {
    Vector16d components = Vector16d::Zero();
    Chirality chirality = Chirality::Mixed;
    double norm() const { return components.norm(); }
};

/// A concrete real 16-dimensional representation of Cl(8), generators with
/// v.v = -|v|^2, built by iterated 2x2 doubling. The invariant pairing is
/// the standard dot product (all generators are orthogonal), Clifford
/// multiplication is orthogonal for it.
class CliffordRep {
public:
    /// volumeSign flips the labelling of the chirality split (the ledgered
    /// convention knob); the default is the one that reproduces
    /// eta (x) eta = 1 + Omega_0 + nu with a positive scalar.
    explicit CliffordRep(int volumeSign = +1);

    const std::array<Matrix16d, 8>& gammas() const { return gamma_; }
    const Matrix16d& pairing() const { return pairing_; }
    const Matrix16d& volumeOp() const { return volume_; }
    const Matrix16d& chiralProjector(Chirality c) const
    {
        return c == Chirality::Plus ? projPlus_ : projMinus_;
    }
    /// Orthonormal basis (columns) of S^+ / S^-.
    const Eigen::Matrix<double, 16, 8>& chiralBasis(Chirality c) const
    {
        return c == Chirality::Plus ? basisPlus_ : basisMinus_;
    }

    /// gamma(e_I) for the basis multivector with index-subset mask I.
    const Matrix16d& gammaBasis(unsigned mask) const { return gammaBasis_[mask]; }
    /// gamma(e_I)^2 = sign * Id.
    double gammaBasisSign(unsigned mask) const { return signs_[mask]; }

    /// Matrix of Clifford action of a homogeneous form.
    Matrix16d formAction(const KForm& f) const;
    Matrix16d formAction(const Multivector& m) const;

    Chirality classify(const Vector16d& s, double tol = 1e-10) const;

private:
    std::array<Matrix16d, 8> gamma_;
    std::array<Matrix16d, 256> gammaBasis_;
    std::array<double, 256> signs_;
    Matrix16d pairing_, volume_, projPlus_, projMinus_;
    Eigen::Matrix<double, 16, 8> basisPlus_, basisMinus_;
};

CliffordRep buildRep();

Spinor cliffordAct(const KForm& form, const Spinor& s, const CliffordRep& rep);

/// Unit spinor in S^+ spanning the common kernel of the Lambda^2_21
/// Clifford actions (the spin(7)-stabilized spinor); the kernel must be
/// exactly one-dimensional.
Spinor findStabilizedSpinor(const ProjectorSet& ps, const CliffordRep& rep);

/// alpha . eta for alpha in Lambda^2_7; lands in H = eta-perp inside S^+.
Spinor mapI(const KForm& alpha, const Spinor& eta, const CliffordRep& rep);

/// 7x7 matrix of mapI over the Lambda^2_7 basis and an orthonormal basis
/// of H; invertibility is the paper's isomorphism claim.
Eigen::MatrixXd mapIMatrix(const ProjectorSet& ps, const Spinor& eta, const CliffordRep& rep);

/// Expansion of a 16x16 endomorphism over the 256 gamma(e_I) basis via the
/// trace pairing; reassembling the result returns the input.
Multivector polyFormOfEndomorphism(const Matrix16d& X, const CliffordRep& rep);

struct EtaOmegaReport {
    double scalar = 0.0;       // grade-0 coefficient of the expansion
    double omegaRatio = 0.0;   // grade-4 coefficient along Omega, over scalar
    double volumeRatio = 0.0;  // grade-8 coefficient over scalar
    double structResidual = 0.0;  // residual of c (1 + r*Omega + v*nu)
    double offGradeNorm = 0.0;    // total mass in grades {1,2,3,5,6,7}
    double plusConventionResidual = 0.0; // residual against c (1 + Omega + nu)
    double quadFitScalar = 0.0;   // signed scalar of the <gamma_I eta, eta> fit
    double quadFitResidual = 0.0;
};

/// Expands eta (x) eta over the gamma basis and checks the spinor/Cayley
/// relation: only grades 0, 4, 8 appear, the grade-4 part is proportional
/// to Omega, and the three scalars have equal magnitude. The sign of the
/// Omega coefficient is measured and reported (omegaRatio); the residual
/// against the all-plus normalization c (1 + Omega + nu) is reported
/// separately. Also checks the quadruple identity
/// Omega(u,v,w,z) ~ <(u∧v∧w∧z).eta, eta> over all basis quadruples.
EtaOmegaReport verifyEtaOmegaIdentity(const Spinor& eta, const KForm& omega,
                                      const CliffordRep& rep, double tol = 1e-8);

struct SpinorialKernelReport {
    int kernelDim = 0;
    double maxLambda21Norm = 0.0; // max |beta.eta| over the Lambda^2_21 basis
    double minLambda7Norm = 0.0;  // min |beta.eta| over the Lambda^2_7 basis
    double kernelAlignment = 0.0; // residual of kernel against Lambda^2_21
};

/// {beta in Lambda^2 : beta.eta = 0} must equal Lambda^2_21 exactly.
SpinorialKernelReport spinorialInstantonKernel(const Spinor& eta, const ProjectorSet& ps,
                                               const CliffordRep& rep);

} // namespace spin7
