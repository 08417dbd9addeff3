#pragma once

#include <optional>
#include <string>

#include "spin7/fourier.hpp"
#include "spin7/projectors.hpp"

namespace spin7 {

/// A Spin(7)-structure field on the flat torus: a band-limited frame field
/// A(x) with positive determinant; the Cayley 4-form field is the pointwise
/// pullback of Omega_0 and the metric is A(x)^T A(x). The frame is the
/// primary datum (metric provenance); the nonlinear recovery of the frame
/// from the form alone is deliberately absent.
class StructureField {
public:
    /// constant standard structure
    static StructureField standard(int K = 2, double period = 2 * M_PI);
    /// conformal family A(x) = exp(f(x)) Id, f = eps cos(2 pi x_axis / l),
    /// with the scalar factor band-limited to frameK modes (the exponential
    /// tail beyond frameK is below double precision for small eps).
    static StructureField conformal(double eps, int K = 2, double period = 2 * M_PI,
                                    int axis = 0, int frameK = 8);
    /// generic family A(x) = exp(eps cos(2 pi x_axis / l) X) for a fixed
    /// direction X in gl(8).
    static StructureField frameDeformed(double eps, const Matrix8d& X, int K = 2,
                                        double period = 2 * M_PI, int axis = 1,
                                        int frameK = 8);
    /// left-multiply the frame field by a constant matrix (gauge action;
    /// for R in Spin(7) the derived structure is unchanged).
    StructureField gaugeRotated(const Matrix8d& R) const;
    /// pull back along the lattice-preserving rotation x -> S x (S a
    /// signed permutation with det +1): frame A(Sx) S, modes remapped.
    StructureField baseRotated(const Matrix8d& S) const;

    bool isConstant() const { return constant_; }
    int fieldTruncation() const { return K_; }
    double period() const { return period_; }
    std::vector<int> activeAxes() const;

    Matrix8d frameAt(const Vector8d& x) const;
    KForm omegaAt(const Vector8d& x) const;
    EuclideanData euclidAt(const Vector8d& x) const;

    /// Fitted Fourier representation of the Cayley form field, refined
    /// until the fit residual is below tailTol; throws if the frame field
    /// is not band-limited enough for that.
    const FourierField& omegaField(double tailTol = 1e-8) const;

private:
    StructureField() = default;
    bool constant_ = true;
    int K_ = 2;
    int frameK_ = 0;
    double period_ = 2 * M_PI;
    std::map<WaveVector, Eigen::Matrix<std::complex<double>, 8, 8>> frameModes_;
    mutable std::optional<FourierField> omegaCache_;
};

struct TorsionReport {
    FourierField W, W8, W48, lee, T;
    std::string torsionClass; // holonomy | balanced | locally-conformally-parallel | generic
    double wNorm = 0, w8Rel = 0, w48Rel = 0, leeNorm = 0;
    double omegaFitResidual = 0;
    double leeConstant = 0;    // calibrated c in theta = c * *(D(Omega) ∧ Omega)
    double lcpRatio = 0;       // fitted q in dOmega = q * theta ∧ Omega (LCP class)
    double lcpRatioUnnormalized = 0; // same against the c = 1 Lee form
    double lcpResidual = 0;    // relative residual of that fit
};

/// Torsion W = dOmega, its Lambda^5_8 / Lambda^5_48 parts, the Lee form and
/// the antisymmetric torsion of the spinor connection, classified per the
/// four torsion classes.
TorsionReport torsionClassify(const StructureField& s, double classTol = 1e-6);

/// The torsion formulas leave two conventions open: the sign of the
/// codifferential entering theta and T (d* = ±*d*), and the scale of the
/// Lee form. Both are fixed once by least squares on the conformal family
/// against *T = W + (1/6)(*( *W ∧ Omega) ∧ Omega); the result makes that
/// relation an identity for every structure.
struct LeeCalibration {
    int dstarSign = +1;  // sign s in  D(Omega) := s * (dOmega)
    double constant = 0; // c in theta = c *(D(Omega) ∧ Omega)
    double residual = 0; // relation residual achieved on the calibration family
};
const LeeCalibration& calibratedLee();
double calibratedLeeConstant();

struct TorsionRelationReport {
    double residual = 0; // ||*T - W - (1/6) *( *W ∧ Omega) ∧ Omega|| / ||W||
    bool wZero = false;
    double t8Rel = 0, w8Rel = 0, t48Rel = 0, w48Rel = 0; // component norms / ||.||
};

/// The *T = W + (1/6)(*( *W ∧ Omega) ∧ Omega) relation, both sides
/// evaluated independently pointwise; also reports the component norms
/// behind the T8=0 <=> W8=0 equivalences.
TorsionRelationReport torsionWRelation(const StructureField& s);

struct TorsionBoundReport {
    double wNormL2 = 0;  // volume-averaged L2 norm of W
    double wNormSup = 0; // pointwise sup of |W(x)|_g
    double lambda1 = 0;  // (2 pi / l)^2
    bool satisfied = false;
    // rigidity check (filled when satisfied and a kernel was extracted)
    int kernelDim = -1;
    double maxKernelDaNorm = -1; // max ||da|| over unit kernel elements
    double otherFiberSigmaMin = -1;
};

/// Thm-7.1-style bound check: ||W|| against the first Laplacian eigenvalue,
/// with rigidity of the gauge-fixed kernel when the bound holds.
TorsionBoundReport torsionBoundCheck(const StructureField& s, int K = 2);

} // namespace spin7
