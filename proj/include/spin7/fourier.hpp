#pragma once

#include <array>
#include <functional>
#include <map>
#include <vector>

#include "spin7/exterior.hpp"

namespace spin7 {

using WaveVector = std::array<int, 8>;

inline WaveVector negated(const WaveVector& k)
{
    WaveVector n;
    for (int i = 0; i < 8; ++i) n[i] = -k[i];
    return n;
}

/// Truncated Fourier representation of a form-valued field on the flat
/// torus R^8 / (period * Z^8). Modes are stored sparsely; real fields keep
/// the conjugate pair at -k explicitly.
class FourierField {
public:
    FourierField() = default;
    FourierField(int grade, int K, double period = 2 * M_PI)
        : grade_(grade), K_(K), period_(period)
    {
    }

    int grade() const { return grade_; }
    int truncation() const { return K_; }
    double period() const { return period_; }
    const std::map<WaveVector, Eigen::VectorXcd>& modes() const { return modes_; }

    void setMode(const WaveVector& k, const Eigen::VectorXcd& c);
    /// setMode(k, c) plus the conjugate at -k.
    void setModePair(const WaveVector& k, const Eigen::VectorXcd& c);
    void addMode(const WaveVector& k, const Eigen::VectorXcd& c);
    Eigen::VectorXcd mode(const WaveVector& k) const;

    /// max |coeff(-k) - conj(coeff(k))| over stored modes.
    double realityDefect() const;
    /// drop modes with max-abs coefficient below tol (exact zeros by default).
    void prune(double tol = 0.0);

    Eigen::VectorXcd evalComplexAt(const Vector8d& x) const;
    /// value of a real field at x (the imaginary residue must be noise).
    Eigen::VectorXd evalAt(const Vector8d& x) const;

    double maxAbsCoeff() const;
    /// l2 norm over mode coefficients (Parseval, no volume factor).
    double coeffNorm() const;

    /// axes along which any stored mode has a nonzero component.
    std::vector<int> activeAxes() const;

    FourierField& operator+=(const FourierField& o);
    FourierField& operator-=(const FourierField& o);
    FourierField& operator*=(double s);

private:
    int grade_ = 0;
    int K_ = 0;
    double period_ = 2 * M_PI;
    std::map<WaveVector, Eigen::VectorXcd> modes_;
};

/// Spectral exterior derivative: mode-wise wedge by i (2 pi / l) k-flat.
FourierField extDeriv(const FourierField& f);

/// Codifferential for the flat standard metric: mode-wise -i iota_kappa.
FourierField coDerivFlat(const FourierField& f);

/// L2 inner product over the torus for two real fields with constant
/// metric data (Parseval). Includes the volume factor period^8.
double innerProductL2Flat(const FourierField& a, const FourierField& b, const EuclideanData& e);

/// Mode-convolution wedge; the result keeps every produced wavevector.
FourierField wedgeField(const FourierField& a, const FourierField& b);

/// Uniform tensor grid over the given axes (2K+1 points per axis), other
/// coordinates zero; the DFT on it is exact for fields band-limited to K.
struct ActiveGrid {
    std::vector<int> axes;
    int pointsPerAxis = 1;
    double period = 2 * M_PI;
    std::vector<Vector8d> nodes; // size pointsPerAxis^axes.size()

    static ActiveGrid build(const std::vector<int>& axes, int K, double period);
    /// multi-index of node i along axis position a.
    int nodeStep(int i, int a) const;
};

/// Least-squares mode fit (= DFT on the active grid) of a pointwise
/// sampler; modes outside the grid's axes are zero.
FourierField fitField(int grade, const ActiveGrid& grid, int K,
                      const std::function<Eigen::VectorXd(const Vector8d&)>& sampler);

/// Same fit from precomputed node values (dim x nodes, grid order); the
/// mode radius is the grid's Nyquist radius (pointsPerAxis-1)/2.
FourierField fitFieldOnGrid(int grade, const ActiveGrid& grid, const Eigen::MatrixXd& values);

/// Max pointwise deviation |fit - sampler| over off-grid probe points,
/// relative to the field scale.
double fitResidual(const FourierField& fit,
                   const std::function<Eigen::VectorXd(const Vector8d&)>& sampler,
                   int probes = 17);

} // namespace spin7
