#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spin7/exterior.hpp"

namespace spin7 {

/// A Spin(7)-form together with the frame carrying it to the standard
/// Cayley form; the metric is derived from the frame (A^T A).
class Spin7Structure {
public:
    static Spin7Structure standard();
    /// omega := A^* Omega_0 for a frame A with det A > 0.
    static Spin7Structure fromFrame(const Matrix8d& A);

    const KForm& omega() const { return omega_; }
    const Matrix8d& frame() const { return frame_; }
    const EuclideanData& euclid() const { return euclid_; }

private:
    Spin7Structure(KForm omega, Matrix8d frame, EuclideanData e)
        : omega_(std::move(omega)), frame_(frame), euclid_(std::move(e))
    {
    }
    KForm omega_;
    Matrix8d frame_;
    EuclideanData euclid_;
};

/// Irreducible-decomposition projectors of Lambda^2/3/4 for one structure.
/// Projectors act on packed coefficient vectors and are self-adjoint for the
/// structure's inner product; bases are columns, orthonormal for the same
/// product.
struct ProjectorSet {
    KForm omega;
    EuclideanData euclid;

    Eigen::MatrixXd p2_7, p2_21;              // 28 x 28
    Eigen::MatrixXd p3_8, p3_48;              // 56 x 56
    Eigen::MatrixXd p4_1, p4_7, p4_27, p4_35; // 70 x 70

    Eigen::MatrixXd b2_7, b2_21; // 28 x 7, 28 x 21
    Eigen::MatrixXd b3_8, b3_48; // 56 x 8, 56 x 48
    Eigen::MatrixXd b4_1, b4_7, b4_27, b4_35;

    const Eigen::MatrixXd& projector(int grade, int dim) const;
    const Eigen::MatrixXd& basis(int grade, int dim) const;

    /// Norm of the component of f in the labelled summand.
    double componentNorm(const KForm& f, int dim) const;
};

/// Eigenprojector construction from alpha -> *(alpha ∧ Omega) plus the
/// constructive Lambda^4 pieces; validates idempotency, ranks, completeness.
ProjectorSet buildProjectors(const Spin7Structure& s);

std::vector<std::pair<std::string, KForm>> decompose(const KForm& f, const ProjectorSet& ps);

struct WedgeCaseReport {
    std::string name;
    int samples = 0;
    double maxForbiddenRel = 0.0; // worst forbidden-summand residual, relative
    std::vector<int> allowed;
    std::vector<bool> attained;
};

struct WedgeImageReport {
    std::vector<WedgeCaseReport> cases;
    bool pass = false;
};

/// Prop "under the wedge map": checks the three inclusions on all basis
/// pairs plus `samples` random pairs per case, and that every allowed
/// summand is attained. Forbidden residual above `tol` throws.
WedgeImageReport wedgeImageCheck(const ProjectorSet& ps, int samples = 500,
                                 std::uint64_t seed = 1, double tol = 1e-9);

/// Rank of beta -> alpha ∧ beta restricted to Lambda^2_21 (21 expected for
/// nonzero alpha in Lambda^2_7).
int lambda27Lambda221WedgeRank(const KForm& alpha, const ProjectorSet& ps);

/// Matrix of lambda -> p3_8(omega7 ∧ lambda) in orthonormal bases of
/// Lambda^1 and Lambda^3_8.
Eigen::MatrixXd lambda27OneFormIso(const KForm& omega7, const ProjectorSet& ps);

/// Rank of lambda -> omega ∧ lambda on one-forms, no membership check.
int wedgeRankOnOneForms(const KForm& omega2);

/// Same rank with the Lambda^2_21 membership validated (8 expected).
int lambda221NoDecomposable(const KForm& omega21, const ProjectorSet& ps);

enum class TangentVariant { Full, Metric, Volume, Conformal };

/// Orthonormal basis of the span of d/dt|_0 exp(tX)^* Omega over the
/// variant's directions X; validates the span against the expected
/// Lambda^4 summands.
std::vector<KForm> tangentSpaceBasis(const Spin7Structure& s, TangentVariant variant,
                                     const ProjectorSet& ps);

/// Derivative of t -> exp(tX)^* omega at t = 0 (central difference).
KForm structureDerivative(const Spin7Structure& s, const Matrix8d& X, double h = 1e-5);

/// (rank F, rank psi) for maps with pointwise-orthogonal images in
/// R^3 = su(2); orthogonality is a precondition and is checked.
std::pair<int, int> su2OrthogonalityRank(const Eigen::Matrix<double, 3, 21>& F,
                                         const Eigen::Matrix<double, 3, 7>& psi,
                                         double tol = 1e-9);

/// Orthonormalize the span of V's columns for the inner product G; throws
/// if the numerical rank differs from expectedRank (pass -1 to skip).
Eigen::MatrixXd gramOrthonormalize(const Eigen::MatrixXd& V, const Eigen::MatrixXd& G,
                                   int expectedRank = -1, double gapTol = 1e-6);

/// Identification of 2-forms with antisymmetric matrices (X_ab = coeff on
/// dx_a∧dx_b for a<b).
Matrix8d twoFormToMatrix(const KForm& beta);
KForm matrixToTwoForm(const Matrix8d& X);

} // namespace spin7
