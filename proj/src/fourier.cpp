#include "spin7/fourier.hpp"

#include <cmath>

#include "spin7/parallel.hpp"

namespace spin7 {

namespace {
constexpr std::complex<double> kI{0.0, 1.0};
}

void FourierField::setMode(const WaveVector& k, const Eigen::VectorXcd& c)
{
    for (int i = 0; i < 8; ++i)
        if (std::abs(k[i]) > K_) throw std::invalid_argument("mode outside truncation radius");
    if (c.size() != binom(kDim, grade_)) throw std::invalid_argument("mode length mismatch");
    modes_[k] = c;
}

void FourierField::setModePair(const WaveVector& k, const Eigen::VectorXcd& c)
{
    setMode(k, c);
    if (k != negated(k)) setMode(negated(k), c.conjugate());
}

void FourierField::addMode(const WaveVector& k, const Eigen::VectorXcd& c)
{
    auto it = modes_.find(k);
    if (it == modes_.end())
        setMode(k, c);
    else
        it->second += c;
}

Eigen::VectorXcd FourierField::mode(const WaveVector& k) const
{
    auto it = modes_.find(k);
    if (it != modes_.end()) return it->second;
    return Eigen::VectorXcd::Zero(binom(kDim, grade_));
}

double FourierField::realityDefect() const
{
    double worst = 0;
    for (const auto& [k, c] : modes_) {
        auto it = modes_.find(negated(k));
        if (it == modes_.end()) {
            worst = std::max(worst, c.cwiseAbs().maxCoeff());
            continue;
        }
        worst = std::max(worst, (it->second - c.conjugate()).cwiseAbs().maxCoeff());
    }
    return worst;
}

void FourierField::prune(double tol)
{
    for (auto it = modes_.begin(); it != modes_.end();) {
        if (it->second.cwiseAbs().maxCoeff() <= tol)
            it = modes_.erase(it);
        else
            ++it;
    }
}

Eigen::VectorXcd FourierField::evalComplexAt(const Vector8d& x) const
{
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(binom(kDim, grade_));
    const double w = 2 * M_PI / period_;
    for (const auto& [k, c] : modes_) {
        double phase = 0;
        for (int i = 0; i < 8; ++i) phase += w * k[i] * x[i];
        v += std::exp(kI * phase) * c;
    }
    return v;
}

Eigen::VectorXd FourierField::evalAt(const Vector8d& x) const
{
    return evalComplexAt(x).real();
}

double FourierField::maxAbsCoeff() const
{
    double m = 0;
    for (const auto& [k, c] : modes_) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
}

double FourierField::coeffNorm() const
{
    double s = 0;
    for (const auto& [k, c] : modes_) s += c.squaredNorm();
    return std::sqrt(s);
}

std::vector<int> FourierField::activeAxes() const
{
    std::array<bool, 8> act{};
    for (const auto& [k, c] : modes_)
        for (int i = 0; i < 8; ++i)
            if (k[i] != 0) act[i] = true;
    std::vector<int> out;
    for (int i = 0; i < 8; ++i)
        if (act[i]) out.push_back(i);
    return out;
}

FourierField& FourierField::operator+=(const FourierField& o)
{
    if (o.grade_ != grade_) throw std::invalid_argument("grade mismatch");
    for (const auto& [k, c] : o.modes_) addMode(k, c);
    return *this;
}

FourierField& FourierField::operator-=(const FourierField& o)
{
    if (o.grade_ != grade_) throw std::invalid_argument("grade mismatch");
    for (const auto& [k, c] : o.modes_) addMode(k, -c);
    return *this;
}

FourierField& FourierField::operator*=(double s)
{
    for (auto& [k, c] : modes_) c *= s;
    return *this;
}

FourierField extDeriv(const FourierField& f)
{
    if (f.grade() >= kDim) throw std::invalid_argument("extDeriv: grade 8 field");
    FourierField out(f.grade() + 1, f.truncation(), f.period());
    const double w = 2 * M_PI / f.period();
    for (const auto& [k, c] : f.modes()) {
        KForm kflat(1);
        for (int i = 0; i < 8; ++i) kflat.coeffs[i] = w * k[i];
        if (kflat.coeffs.norm() == 0.0) continue;
        KFormC src(f.grade());
        src.coeffs = c;
        KFormC res = wedge(kflat, src);
        out.addMode(k, kI * res.coeffs);
    }
    out.prune();
    return out;
}

FourierField coDerivFlat(const FourierField& f)
{
    if (f.grade() == 0) return FourierField(0, f.truncation(), f.period());
    FourierField out(f.grade() - 1, f.truncation(), f.period());
    const double w = 2 * M_PI / f.period();
    for (const auto& [k, c] : f.modes()) {
        Vector8d kappa;
        for (int i = 0; i < 8; ++i) kappa[i] = w * k[i];
        if (kappa.norm() == 0.0) continue;
        KFormC src(f.grade());
        src.coeffs = c;
        KFormC res = contract(kappa, src);
        out.addMode(k, -kI * res.coeffs);
    }
    out.prune();
    return out;
}

double innerProductL2Flat(const FourierField& a, const FourierField& b, const EuclideanData& e)
{
    if (a.grade() != b.grade()) throw std::invalid_argument("grade mismatch");
    const Eigen::MatrixXd& G = e.gram(a.grade());
    std::complex<double> s = 0;
    for (const auto& [k, c] : a.modes()) {
        auto it = b.modes().find(k);
        if (it == b.modes().end()) continue;
        s += c.dot(G * it->second); // conjugates the first factor
    }
    return std::pow(a.period(), 8) * e.volumeScale() * s.real();
}

FourierField wedgeField(const FourierField& a, const FourierField& b)
{
    FourierField out(a.grade() + b.grade(), a.truncation() + b.truncation(), a.period());
    for (const auto& [ka, ca] : a.modes()) {
        KFormC fa(a.grade());
        fa.coeffs = ca;
        for (const auto& [kb, cb] : b.modes()) {
            KFormC fb(b.grade());
            fb.coeffs = cb;
            WaveVector k;
            for (int i = 0; i < 8; ++i) k[i] = ka[i] + kb[i];
            out.addMode(k, wedge(fa, fb).coeffs);
        }
    }
    out.prune();
    return out;
}

ActiveGrid ActiveGrid::build(const std::vector<int>& axes, int K, double period)
{
    ActiveGrid g;
    g.axes = axes;
    g.pointsPerAxis = 2 * K + 1;
    g.period = period;
    long total = 1;
    for (std::size_t i = 0; i < axes.size(); ++i) total *= g.pointsPerAxis;
    g.nodes.resize(total);
    for (long i = 0; i < total; ++i) {
        Vector8d x = Vector8d::Zero();
        long rem = i;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            const int step = static_cast<int>(rem % g.pointsPerAxis);
            rem /= g.pointsPerAxis;
            x[axes[a]] = period * step / g.pointsPerAxis;
        }
        g.nodes[i] = x;
    }
    return g;
}

int ActiveGrid::nodeStep(int i, int a) const
{
    long rem = i;
    for (int t = 0; t < a; ++t) rem /= pointsPerAxis;
    return static_cast<int>(rem % pointsPerAxis);
}

FourierField fitField(int grade, const ActiveGrid& grid, int K,
                      const std::function<Eigen::VectorXd(const Vector8d&)>& sampler)
{
    const int dim = binom(kDim, grade);
    const long n = static_cast<long>(grid.nodes.size());
    Eigen::MatrixXd values(dim, n);
    par::forEach(n, [&](std::int64_t i) { values.col(i) = sampler(grid.nodes[i]); });
    (void)K;
    return fitFieldOnGrid(grade, grid, values);
}

FourierField fitFieldOnGrid(int grade, const ActiveGrid& grid, const Eigen::MatrixXd& values)
{
    const int dim = binom(kDim, grade);
    const long n = static_cast<long>(grid.nodes.size());
    const int N = grid.pointsPerAxis;
    const int K = (N - 1) / 2;

    FourierField out(grade, K, grid.period);
    // enumerate wavevectors supported on the grid axes with |k_a| <= K
    std::vector<WaveVector> ks;
    const long nk = n; // same tensor count
    for (long t = 0; t < nk; ++t) {
        WaveVector k{};
        long rem = t;
        for (std::size_t a = 0; a < grid.axes.size(); ++a) {
            const int step = static_cast<int>(rem % N);
            rem /= N;
            k[grid.axes[a]] = step <= K ? step : step - N;
        }
        ks.push_back(k);
    }
    std::vector<Eigen::VectorXcd> coeffs(ks.size());
    par::forEach(static_cast<std::int64_t>(ks.size()), [&](std::int64_t t) {
        const WaveVector& k = ks[t];
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dim);
        for (long i = 0; i < n; ++i) {
            double phase = 0;
            for (std::size_t a = 0; a < grid.axes.size(); ++a)
                phase += 2 * M_PI * k[grid.axes[a]] * grid.nodeStep(static_cast<int>(i), static_cast<int>(a)) / double(N);
            c += std::exp(-kI * phase) * values.col(i).cast<std::complex<double>>();
        }
        coeffs[t] = c / double(n);
    });
    for (std::size_t t = 0; t < ks.size(); ++t) out.addMode(ks[t], coeffs[t]);
    out.prune(1e-300);
    return out;
}

double fitResidual(const FourierField& fit,
                   const std::function<Eigen::VectorXd(const Vector8d&)>& sampler, int probes)
{
    const auto axes = fit.activeAxes();
    const double scale = std::max(fit.maxAbsCoeff(), 1e-30);
    double worst = 0;
    // deterministic off-grid probes (golden-ratio stride)
    for (int p = 0; p < probes; ++p) {
        Vector8d x = Vector8d::Zero();
        double t = 0.618033988749895 * (p + 1);
        for (std::size_t a = 0; a < axes.size(); ++a) {
            t = t - std::floor(t);
            x[axes[a]] = fit.period() * t;
            t = t * 2.618033988749895;
        }
        worst = std::max(worst, (fit.evalAt(x) - sampler(x)).cwiseAbs().maxCoeff());
    }
    return worst / scale;
}

} // namespace spin7
