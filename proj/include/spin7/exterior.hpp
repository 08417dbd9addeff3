#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace spin7 {

using Matrix8d = Eigen::Matrix<double, 8, 8>;
using Vector8d = Eigen::Matrix<double, 8, 1>;

constexpr int kDim = 8;
constexpr int kBasisSize = 256; // 2^8 index subsets

/// Raised when a verified paper claim fails numerically (CLI exit code 2).
struct ClaimViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int binom(int n, int k);

/// Basis bookkeeping for Lambda^* R^8. A basis k-form dx_I is addressed
/// either by the bitmask of its index subset I ⊂ {1..8} or by (grade,
/// position) with positions enumerating the subsets of each grade in
/// lexicographic order of the ascending index sequence.
class FormBasis {
public:
    static const FormBasis& get();

    int gradeOfMask(unsigned mask) const { return grade_[mask]; }
    int posOfMask(unsigned mask) const { return pos_[mask]; }
    unsigned maskAt(int grade, int pos) const { return masks_[grade][pos]; }
    int dim(int grade) const { return static_cast<int>(masks_[grade].size()); }

private:
    FormBasis();
    std::array<std::vector<unsigned>, 9> masks_;
    std::array<int, kBasisSize> grade_{};
    std::array<int, kBasisSize> pos_{};
};

/// Sign of dx_I ∧ dx_J -> dx_{I∪J} for disjoint masks; 0 on overlap.
int wedgeSign(unsigned maskI, unsigned maskJ);

/// Normalize a 1-based index tuple: (sign, mask); sign 0 if an index repeats.
std::pair<int, unsigned> normalizeIndices(const std::vector<int>& idx);

/// Homogeneous k-form in packed lexicographic coordinates.
template <typename Scalar>
struct KFormT {
    int grade = 0;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coeffs;

    KFormT() : coeffs(1) { coeffs.setZero(); }
    explicit KFormT(int g)
        : grade(g), coeffs(Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(binom(kDim, g)))
    {
        if (g < 0 || g > kDim) throw std::invalid_argument("grade out of range");
    }
    double norm() const { return coeffs.norm(); }
};

using KForm = KFormT<double>;
using KFormC = KFormT<std::complex<double>>;

/// Inhomogeneous element of Lambda^* R^8; 256 coefficients indexed by mask.
class Multivector {
public:
    Multivector() { c_.fill(0.0); }

    double& operator[](unsigned mask) { return c_[mask]; }
    double operator[](unsigned mask) const { return c_[mask]; }

    Multivector& operator+=(const Multivector& o);
    Multivector& operator*=(double s);
    Multivector operator-(const Multivector& o) const;

    /// Packed slice of one grade (lexicographic positions).
    KForm gradePart(int k) const;
    void setGradePart(const KForm& f);

    double norm() const;

    static Multivector fromKForm(const KForm& f)
    {
        Multivector m;
        m.setGradePart(f);
        return m;
    }

private:
    std::array<double, kBasisSize> c_;
};

Multivector wedge(const Multivector& a, const Multivector& b);

template <typename S>
KFormT<S> wedge(const KFormT<S>& a, const KFormT<S>& b);

KFormC wedge(const KForm& a, const KFormC& b);
KFormC wedge(const KFormC& a, const KForm& b);

/// Contraction by a coordinate vector (metric-free antiderivation).
template <typename S>
KFormT<S> contract(const Vector8d& v, const KFormT<S>& a);

/// Constant metric data on R^8. `metric` is the inner product on vectors;
/// the induced product on k-forms uses Gram determinants of its inverse.
class EuclideanData {
public:
    explicit EuclideanData(Matrix8d metric = Matrix8d::Identity(), int orientation = +1);

    const Matrix8d& metric() const { return g_; }
    int orientation() const { return orientation_; }
    double volumeScale() const { return volScale_; } // nu = volScale * dx_{1..8}

    /// Gram matrix of <.,.> on grade k (computed on first use).
    const Eigen::MatrixXd& gram(int k) const;
    /// Matrix of the Hodge star Lambda^k -> Lambda^{8-k}.
    const Eigen::MatrixXd& starMatrix(int k) const;

private:
    Matrix8d g_;
    Matrix8d ginv_;
    int orientation_;
    double volScale_;
    mutable std::array<Eigen::MatrixXd, 9> gram_;
    mutable std::array<Eigen::MatrixXd, 9> star_;
};

template <typename S>
KFormT<S> hodgeStar(const KFormT<S>& a, const EuclideanData& e)
{
    KFormT<S> r(kDim - a.grade);
    r.coeffs = e.starMatrix(a.grade) * a.coeffs;
    return r;
}

template <typename S>
S innerProduct(const KFormT<S>& a, const KFormT<S>& b, const EuclideanData& e)
{
    if (a.grade != b.grade) throw std::invalid_argument("innerProduct: grade mismatch");
    return a.coeffs.dot(e.gram(a.grade) * b.coeffs); // conjugates a for complex S
}

/// The 14-term Cayley 4-form of the standard Spin(7)-structure.
KForm cayleyForm();

/// Volume form of the given metric data, as an 8-form.
KForm volumeForm(const EuclideanData& e);

/// Pullback matrix of A on grade-k coefficients: (A^*w)_J = sum_I det(A[I,J]) w_I.
Eigen::MatrixXd pullbackMatrix(const Matrix8d& A, int k);

KForm pullback(const KForm& f, const Matrix8d& A);

/// Matrix of b -> a ∧ b from grade gb into grade a.grade+gb.
Eigen::MatrixXd wedgeMatrix(const KForm& a, int gb);

/// Matrix of v-contraction on grade k (v a coordinate vector).
Eigen::MatrixXd contractionMatrix(const Vector8d& v, int k);

} // namespace spin7
