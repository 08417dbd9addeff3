#include "spin7/exterior.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace spin7 {

int binom(int n, int k)
{
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}

FormBasis::FormBasis()
{
    // Enumerate subsets of each grade in lexicographic order of the
    // ascending index sequence, e.g. {1,2} < {1,3} < ... < {1,8} < {2,3}.
    for (unsigned mask = 0; mask < kBasisSize; ++mask) grade_[mask] = std::popcount(mask);
    for (int k = 0; k <= kDim; ++k) {
        std::vector<int> idx(k);
        for (int i = 0; i < k; ++i) idx[i] = i + 1;
        while (true) {
            unsigned mask = 0;
            for (int i : idx) mask |= 1u << (i - 1);
            pos_[mask] = static_cast<int>(masks_[k].size());
            masks_[k].push_back(mask);
            // next lexicographic k-combination of {1..8}
            int j = k - 1;
            while (j >= 0 && idx[j] == kDim - (k - 1 - j)) --j;
            if (j < 0) break;
            ++idx[j];
            for (int t = j + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
        }
    }
}

const FormBasis& FormBasis::get()
{
    static const FormBasis tables;
    return tables;
}

int wedgeSign(unsigned maskI, unsigned maskJ)
{
    if (maskI & maskJ) return 0;
    // Sorting the concatenation (I, J) moves each j in J past every i in I
    // with i > j; the sign is the parity of those crossings.
    int inversions = 0;
    for (int b = 0; b < kDim; ++b)
        if (maskJ & (1u << b)) inversions += std::popcount(maskI & ~((1u << (b + 1)) - 1));
    return (inversions & 1) ? -1 : +1;
}

std::pair<int, unsigned> normalizeIndices(const std::vector<int>& idx)
{
    std::vector<int> v = idx;
    int sign = 1;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j) {
            if (v[i] == v[j]) return {0, 0};
            if (v[i] > v[j]) {
                std::swap(v[i], v[j]);
                sign = -sign;
            }
        }
    unsigned mask = 0;
    for (int i : v) {
        if (i < 1 || i > kDim) throw std::invalid_argument("index out of range");
        mask |= 1u << (i - 1);
    }
    return {sign, mask};
}

Multivector& Multivector::operator+=(const Multivector& o)
{
    for (int i = 0; i < kBasisSize; ++i) c_[i] += o.c_[i];
    return *this;
}

Multivector& Multivector::operator*=(double s)
{
    for (auto& x : c_) x *= s;
    return *this;
}

Multivector Multivector::operator-(const Multivector& o) const
{
    Multivector r;
    for (int i = 0; i < kBasisSize; ++i) r.c_[i] = c_[i] - o.c_[i];
    return r;
}

KForm Multivector::gradePart(int k) const
{
    const auto& fb = FormBasis::get();
    KForm f(k);
    for (int p = 0; p < fb.dim(k); ++p) f.coeffs[p] = c_[fb.maskAt(k, p)];
    return f;
}

void Multivector::setGradePart(const KForm& f)
{
    const auto& fb = FormBasis::get();
    for (int p = 0; p < fb.dim(f.grade); ++p) c_[fb.maskAt(f.grade, p)] = f.coeffs[p];
}

double Multivector::norm() const
{
    double s = 0;
    for (double x : c_) s += x * x;
    return std::sqrt(s);
}

Multivector wedge(const Multivector& a, const Multivector& b)
{
    Multivector r;
    for (unsigned i = 0; i < kBasisSize; ++i) {
        if (a[i] == 0.0) continue;
        for (unsigned j = 0; j < kBasisSize; ++j) {
            if (b[j] == 0.0 || (i & j)) continue;
            r[i | j] += wedgeSign(i, j) * a[i] * b[j];
        }
    }
    return r;
}

template <typename S>
KFormT<S> wedge(const KFormT<S>& a, const KFormT<S>& b)
{
    const auto& fb = FormBasis::get();
    if (a.grade + b.grade > kDim) return KFormT<S>(0);
    KFormT<S> r(a.grade + b.grade);
    for (int p = 0; p < fb.dim(a.grade); ++p) {
        const S av = a.coeffs[p];
        if (av == S(0)) continue;
        const unsigned mi = fb.maskAt(a.grade, p);
        for (int q = 0; q < fb.dim(b.grade); ++q) {
            const unsigned mj = fb.maskAt(b.grade, q);
            if (mi & mj) continue;
            r.coeffs[fb.posOfMask(mi | mj)] += S(double(wedgeSign(mi, mj))) * av * b.coeffs[q];
        }
    }
    return r;
}

template KFormT<double> wedge(const KFormT<double>&, const KFormT<double>&);
template KFormT<std::complex<double>> wedge(const KFormT<std::complex<double>>&,
                                            const KFormT<std::complex<double>>&);

static KFormC toComplex(const KForm& a)
{
    KFormC r(a.grade);
    r.coeffs = a.coeffs.cast<std::complex<double>>();
    return r;
}

KFormC wedge(const KForm& a, const KFormC& b) { return wedge(toComplex(a), b); }
KFormC wedge(const KFormC& a, const KForm& b) { return wedge(a, toComplex(b)); }

template <typename S>
KFormT<S> contract(const Vector8d& v, const KFormT<S>& a)
{
    const auto& fb = FormBasis::get();
    if (a.grade == 0) return KFormT<S>(0);
    KFormT<S> r(a.grade - 1);
    for (int p = 0; p < fb.dim(a.grade); ++p) {
        const S av = a.coeffs[p];
        if (av == S(0)) continue;
        const unsigned m = fb.maskAt(a.grade, p);
        int slot = 0;
        for (int b = 0; b < kDim; ++b) {
            if (!(m & (1u << b))) continue;
            if (v[b] != 0.0) {
                const double sgn = (slot & 1) ? -1.0 : 1.0;
                r.coeffs[fb.posOfMask(m & ~(1u << b))] += S(sgn * v[b]) * av;
            }
            ++slot;
        }
    }
    return r;
}

template KFormT<double> contract(const Vector8d&, const KFormT<double>&);
template KFormT<std::complex<double>> contract(const Vector8d&,
                                               const KFormT<std::complex<double>>&);

namespace {

// determinant of the k x k submatrix A[I, J] without allocation
double subdet(const Matrix8d& A, const int* I, const int* J, int k)
{
    switch (k) {
    case 0:
        return 1.0;
    case 1:
        return A(I[0], J[0]);
    case 2:
        return A(I[0], J[0]) * A(I[1], J[1]) - A(I[0], J[1]) * A(I[1], J[0]);
    case 3: {
        const double a = A(I[0], J[0]), b = A(I[0], J[1]), c = A(I[0], J[2]);
        const double d = A(I[1], J[0]), e = A(I[1], J[1]), f = A(I[1], J[2]);
        const double g = A(I[2], J[0]), h = A(I[2], J[1]), i = A(I[2], J[2]);
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    }
    default: {
        // Laplace along the first row onto (k-1) x (k-1) minors
        double det = 0.0;
        int subI[7];
        for (int t = 1; t < k; ++t) subI[t - 1] = I[t];
        int subJ[7];
        double sign = 1.0;
        for (int c = 0; c < k; ++c) {
            int at = 0;
            for (int t = 0; t < k; ++t)
                if (t != c) subJ[at++] = J[t];
            det += sign * A(I[0], J[c]) * subdet(A, subI, subJ, k - 1);
            sign = -sign;
        }
        return det;
    }
    }
}

void unpackMask(unsigned mask, int* idx, int& n)
{
    n = 0;
    for (int b = 0; b < kDim; ++b)
        if (mask & (1u << b)) idx[n++] = b;
}

} // namespace

EuclideanData::EuclideanData(Matrix8d metric, int orientation)
    : g_(std::move(metric)), orientation_(orientation)
{
    if (orientation_ != 1 && orientation_ != -1)
        throw std::invalid_argument("orientation must be +1 or -1");
    if ((g_ - g_.transpose()).norm() > 1e-12 * g_.norm())
        throw std::invalid_argument("metric must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix8d> es(g_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("metric must be positive-definite");
    ginv_ = g_.inverse();
    volScale_ = orientation_ * std::sqrt(g_.determinant());
}

const Eigen::MatrixXd& EuclideanData::gram(int k) const
{
    if (k < 0 || k > kDim) throw std::invalid_argument("grade out of range");
    if (gram_[k].size() == 0) {
        const auto& fb = FormBasis::get();
        const int n = fb.dim(k);
        Eigen::MatrixXd G(n, n);
        int I[kDim], J[kDim], ni, nj;
        for (int p = 0; p < n; ++p) {
            unpackMask(fb.maskAt(k, p), I, ni);
            for (int q = 0; q <= p; ++q) {
                unpackMask(fb.maskAt(k, q), J, nj);
                G(p, q) = subdet(ginv_, I, J, k);
                G(q, p) = G(p, q);
            }
        }
        gram_[k] = std::move(G);
    }
    return gram_[k];
}

const Eigen::MatrixXd& EuclideanData::starMatrix(int k) const
{
    if (k < 0 || k > kDim) throw std::invalid_argument("grade out of range");
    if (star_[k].size() == 0) {
        // a ∧ *b = <a,b> nu fixes the star:
        // (*b)_{I^c} = volScale * sign(I, I^c) * (G_k b)_I
        const auto& fb = FormBasis::get();
        const int n = fb.dim(k);
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(fb.dim(kDim - k), n);
        for (int p = 0; p < n; ++p) {
            const unsigned mi = fb.maskAt(k, p);
            const unsigned mc = ~mi & (kBasisSize - 1u);
            S(fb.posOfMask(mc), p) = volScale_ * wedgeSign(mi, mc);
        }
        star_[k] = S * gram(k);
    }
    return star_[k];
}

namespace {
KForm buildCayleyForm()
{
    // dx_1234 - dx_1278 - dx_1638 - dx_1674 + dx_1526 + dx_1537 + dx_1548
    // + dx_5678 - dx_5634 - dx_5274 - dx_5238 + dx_3748 + dx_2648 + dx_2637
    static const int terms[14][5] = {
        {+1, 1, 2, 3, 4}, {-1, 1, 2, 7, 8}, {-1, 1, 6, 3, 8}, {-1, 1, 6, 7, 4},
        {+1, 1, 5, 2, 6}, {+1, 1, 5, 3, 7}, {+1, 1, 5, 4, 8}, {+1, 5, 6, 7, 8},
        {-1, 5, 6, 3, 4}, {-1, 5, 2, 7, 4}, {-1, 5, 2, 3, 8}, {+1, 3, 7, 4, 8},
        {+1, 2, 6, 4, 8}, {+1, 2, 6, 3, 7}};
    const auto& fb = FormBasis::get();
    KForm f(4);
    for (const auto& t : terms) {
        auto [sgn, mask] = normalizeIndices({t[1], t[2], t[3], t[4]});
        f.coeffs[fb.posOfMask(mask)] += t[0] * sgn;
    }
    return f;
}
} // namespace

KForm cayleyForm()
{
    static const KForm f = buildCayleyForm();
    return f;
}

KForm volumeForm(const EuclideanData& e)
{
    KForm f(kDim);
    f.coeffs[0] = e.volumeScale();
    return f;
}

Eigen::MatrixXd pullbackMatrix(const Matrix8d& A, int k)
{
    const auto& fb = FormBasis::get();
    const int n = fb.dim(k);
    Eigen::MatrixXd M(n, n);
    int I[kDim], J[kDim], ni, nj;
    for (int p = 0; p < n; ++p) {
        unpackMask(fb.maskAt(k, p), I, ni);
        for (int q = 0; q < n; ++q) {
            unpackMask(fb.maskAt(k, q), J, nj);
            M(q, p) = subdet(A, I, J, k);
        }
    }
    return M;
}

KForm pullback(const KForm& f, const Matrix8d& A)
{
    // only the nonzero input coefficients contribute rows of minors
    const auto& fb = FormBasis::get();
    const int k = f.grade;
    const int n = fb.dim(k);
    KForm r(k);
    int I[kDim], J[kDim], ni, nj;
    for (int p = 0; p < n; ++p) {
        if (f.coeffs[p] == 0.0) continue;
        unpackMask(fb.maskAt(k, p), I, ni);
        for (int q = 0; q < n; ++q) {
            unpackMask(fb.maskAt(k, q), J, nj);
            r.coeffs[q] += f.coeffs[p] * subdet(A, I, J, k);
        }
    }
    return r;
}

Eigen::MatrixXd wedgeMatrix(const KForm& a, int gb)
{
    const auto& fb = FormBasis::get();
    const int gout = a.grade + gb;
    if (gout > kDim) return Eigen::MatrixXd::Zero(0, fb.dim(gb));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(fb.dim(gout), fb.dim(gb));
    for (int p = 0; p < fb.dim(a.grade); ++p) {
        const double av = a.coeffs[p];
        if (av == 0.0) continue;
        const unsigned mi = fb.maskAt(a.grade, p);
        for (int q = 0; q < fb.dim(gb); ++q) {
            const unsigned mj = fb.maskAt(gb, q);
            if (mi & mj) continue;
            M(fb.posOfMask(mi | mj), q) += wedgeSign(mi, mj) * av;
        }
    }
    return M;
}

Eigen::MatrixXd contractionMatrix(const Vector8d& v, int k)
{
    const auto& fb = FormBasis::get();
    if (k == 0) return Eigen::MatrixXd::Zero(1, 1);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(fb.dim(k - 1), fb.dim(k));
    for (int p = 0; p < fb.dim(k); ++p) {
        const unsigned m = fb.maskAt(k, p);
        int slot = 0;
        for (int b = 0; b < kDim; ++b) {
            if (!(m & (1u << b))) continue;
            M(fb.posOfMask(m & ~(1u << b)), p) += ((slot & 1) ? -1.0 : 1.0) * v[b];
            ++slot;
        }
    }
    return M;
}

} // namespace spin7
