#include "spin7/u1.hpp"

#include <cmath>
#include <random>

#include "spin7/parallel.hpp"

namespace spin7 {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::vector<int> unionAxes(const std::vector<int>& a, const std::vector<int>& b)
{
    std::array<bool, 8> act{};
    for (int i : a) act[i] = true;
    for (int i : b) act[i] = true;
    std::vector<int> out;
    for (int i = 0; i < 8; ++i)
        if (act[i]) out.push_back(i);
    return out;
}

// Joint grid fine enough for products of the fields with the structure's
// star factors (bands add under multiplication).
ActiveGrid jointGrid(const FourierField& f, const StructureField& s, int extra = 4)
{
    const int Ks = s.isConstant() ? 0 : s.omegaField().truncation();
    const int K = f.truncation() + Ks + extra;
    return ActiveGrid::build(unionAxes(f.activeAxes(), s.activeAxes()), K, s.period());
}

// Pointwise Hodge star of a real field, refit on the given grid.
FourierField starFieldOn(const FourierField& f, const StructureField& s, const ActiveGrid& grid)
{
    const int gout = kDim - f.grade();
    const long n = static_cast<long>(grid.nodes.size());
    Eigen::MatrixXd values(binom(kDim, gout), n);
    par::forEach(n, [&](std::int64_t i) {
        values.col(i) = s.euclidAt(grid.nodes[i]).starMatrix(f.grade()) * f.evalAt(grid.nodes[i]);
    });
    return fitFieldOnGrid(gout, grid, values);
}

double quadratureVolume(double period) { return std::pow(period, 8); }

} // namespace

FourierField coDeriv(const FourierField& f, const StructureField& s)
{
    if (s.isConstant()) return coDerivFlat(f);
    if (f.grade() == 0) return FourierField(0, f.truncation(), f.period());
    ActiveGrid grid = jointGrid(f, s);
    FourierField sf = starFieldOn(f, s, grid);
    FourierField dsf = extDeriv(sf);
    FourierField r = starFieldOn(dsf, s, grid);
    r *= -1.0;
    return r;
}

double innerProductL2(const FourierField& a, const FourierField& b, const StructureField& s)
{
    if (s.isConstant()) return innerProductL2Flat(a, b, EuclideanData());
    if (a.grade() != b.grade()) throw std::invalid_argument("grade mismatch");
    ActiveGrid grid = jointGrid(a, s);
    const long n = static_cast<long>(grid.nodes.size());
    std::vector<double> vals(n);
    par::forEach(n, [&](std::int64_t i) {
        EuclideanData e = s.euclidAt(grid.nodes[i]);
        Eigen::VectorXd av = a.evalAt(grid.nodes[i]);
        Eigen::VectorXd bv = b.evalAt(grid.nodes[i]);
        vals[i] = av.dot(e.gram(a.grade()) * bv) * std::sqrt(e.metric().determinant());
    });
    double sum = 0;
    for (double v : vals) sum += v;
    return quadratureVolume(s.period()) * sum / double(n);
}

void validateChernIntegrality(const U1Problem& p, double tol)
{
    if (p.F0.grade != 2) throw std::invalid_argument("F0 must be a 2-form");
    const double lattice = std::pow(p.period() / (2 * M_PI), 2);
    for (int i = 0; i < p.F0.coeffs.size(); ++i) {
        const double periods = p.F0.coeffs[i] * lattice / (2 * M_PI);
        if (std::abs(periods - std::round(periods)) > tol)
            throw std::invalid_argument("F0 periods are not 2 pi integral");
    }
}

Eigen::Matrix<std::complex<double>, 8, 8> flatModeBlock(const WaveVector& k, double period,
                                                        const ProjectorSet& ps)
{
    const double w = 2 * M_PI / period;
    Eigen::Matrix<std::complex<double>, 8, 8> B;
    B.setZero();
    KForm kflat(1);
    for (int i = 0; i < 8; ++i) kflat.coeffs[i] = w * k[i];
    // d* row: a -> -i <kappa, a>
    for (int i = 0; i < 8; ++i) B(0, i) = -kI * kflat.coeffs[i];
    // pi_7(da) rows: a -> i Q7^T (kappa ∧ a)
    Eigen::MatrixXd M = ps.b2_7.transpose() * wedgeMatrix(kflat, 1);
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 8; ++c) B(1 + r, c) = kI * M(r, c);
    return B;
}

ModeSweepResult sweepFlatDeformationOperator(int K, double period, const ProjectorSet& ps)
{
    // The block is i * (2 pi / l) * [ -k^T ; M(k) ] with M(k) = sum_d k_d T_d
    // real, so complex kernel/cokernel dimensions equal the real ones of
    // [ k^T ; M(k) ]; ranks are invariant under k -> -k.
    std::array<Eigen::Matrix<double, 7, 8>, 8> T;
    for (int d = 0; d < 8; ++d) {
        KForm dx(1);
        dx.coeffs = Eigen::VectorXd::Zero(8);
        dx.coeffs[d] = 1.0;
        T[d] = ps.b2_7.transpose() * wedgeMatrix(dx, 1);
    }

    const long side = 2 * K + 1;
    long total = 1;
    for (int i = 0; i < 8; ++i) total *= side;

    struct Chunk {
        long kernel = 0, cokernel = 0;
        std::vector<WaveVector> kernelModes;
    };
    const long chunkSize = 1 << 14;
    const long nchunks = (total + chunkSize - 1) / chunkSize;
    std::vector<Chunk> chunks(nchunks);

    par::forEachChunk(total, chunkSize, [&](std::int64_t begin, std::int64_t end) {
        Chunk& ch = chunks[begin / chunkSize];
        Eigen::Matrix<double, 8, 8> R;
        for (std::int64_t t = begin; t < end; ++t) {
            WaveVector k{};
            long rem = t;
            for (int i = 0; i < 8; ++i) {
                k[i] = static_cast<int>(rem % side) - K;
                rem /= side;
            }
            // canonical representative of the {k, -k} pair
            int firstNonzero = 0;
            for (int i = 0; i < 8; ++i)
                if (k[i] != 0) {
                    firstNonzero = k[i];
                    break;
                }
            if (firstNonzero < 0) continue;
            const int weight = firstNonzero == 0 ? 1 : 2;
            if (firstNonzero == 0) {
                // zero block: kernel and cokernel are everything
                ch.kernel += 8;
                ch.cokernel += 8;
                ch.kernelModes.push_back(k);
                continue;
            }
            for (int c = 0; c < 8; ++c) R(0, c) = k[c];
            R.bottomRows<7>().setZero();
            for (int d = 0; d < 8; ++d)
                if (k[d] != 0) R.bottomRows<7>() += double(k[d]) * T[d];
            // rank by Gaussian elimination with partial pivoting
            const double thresh = 1e-9 * double(std::abs(firstNonzero) + K);
            int rank = 0;
            for (int col = 0; col < 8 && rank < 8; ++col) {
                int piv = -1;
                double best = thresh;
                for (int r = rank; r < 8; ++r)
                    if (std::abs(R(r, col)) > best) {
                        best = std::abs(R(r, col));
                        piv = r;
                    }
                if (piv < 0) continue;
                R.row(piv).swap(R.row(rank));
                for (int r = rank + 1; r < 8; ++r) {
                    const double f = R(r, col) / R(rank, col);
                    if (f != 0.0) R.row(r).tail(8 - col) -= f * R.row(rank).tail(8 - col);
                }
                ++rank;
            }
            if (rank < 8) {
                ch.kernel += weight * (8 - rank);
                ch.cokernel += weight * (8 - rank);
                ch.kernelModes.push_back(k);
            }
        }
    });

    ModeSweepResult out;
    out.totalModes = total;
    for (const Chunk& ch : chunks) {
        out.kernelDim += ch.kernel;
        out.cokernelDim += ch.cokernel;
        for (const auto& k : ch.kernelModes) out.kernelModes.push_back(k);
    }
    out.index = out.kernelDim - out.cokernelDim;
    return out;
}

namespace {

// ---- variable-structure fiber assembly -------------------------------

// Real degrees of freedom for real fields on the active-axes fiber: mode 0
// (re only) plus re/im for canonical nonzero modes.
struct FiberBasis {
    std::vector<WaveVector> canonical; // k = 0 first, then canonical pairs
    double period = 2 * M_PI;
    int K = 0;

    int dofCount(int componentDim) const
    {
        int n = 0;
        for (const auto& k : canonical) n += (k == WaveVector{} ? 1 : 2) * componentDim;
        return n;
    }
};

FiberBasis makeFiberBasis(const std::vector<int>& axes, int K, double period)
{
    FiberBasis fb;
    fb.period = period;
    fb.K = K;
    const long side = 2 * K + 1;
    long total = 1;
    for (std::size_t i = 0; i < axes.size(); ++i) total *= side;
    for (long t = 0; t < total; ++t) {
        WaveVector k{};
        long rem = t;
        for (std::size_t a = 0; a < axes.size(); ++a) {
            k[axes[a]] = static_cast<int>(rem % side) - K;
            rem /= side;
        }
        int firstNonzero = 0;
        for (int i = 0; i < 8; ++i)
            if (k[i] != 0) {
                firstNonzero = k[i];
                break;
            }
        if (firstNonzero < 0) continue;
        fb.canonical.push_back(k);
    }
    std::sort(fb.canonical.begin(), fb.canonical.end());
    return fb;
}

// basis field for dof (mode index, component, re/im part)
FourierField basisField(const FiberBasis& fb, int grade, std::size_t modeIdx, int comp,
                        bool imaginary)
{
    FourierField f(grade, fb.K, fb.period);
    const WaveVector& k = fb.canonical[modeIdx];
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(binom(kDim, grade));
    if (k == WaveVector{}) {
        c[comp] = 1.0;
        f.setMode(k, c);
    } else {
        c[comp] = imaginary ? kI * 0.5 : std::complex<double>(0.5);
        // real field: conjugate mode at -k (cos / sin profiles)
        f.setModePair(k, c);
    }
    return f;
}

// pack a real field's modes into dof coordinates (inverse of basisField)
Eigen::VectorXd packField(const FiberBasis& fb, const FourierField& f, int componentDim)
{
    Eigen::VectorXd v = Eigen::VectorXd::Zero(fb.dofCount(componentDim));
    int at = 0;
    for (const auto& k : fb.canonical) {
        Eigen::VectorXcd c = f.mode(k);
        if (k == WaveVector{}) {
            for (int i = 0; i < componentDim; ++i) v[at + i] = c[i].real();
            at += componentDim;
        } else {
            for (int i = 0; i < componentDim; ++i) {
                v[at + 2 * i] = 2 * c[i].real();
                v[at + 2 * i + 1] = -2 * c[i].imag();
            }
            at += 2 * componentDim;
        }
    }
    return v;
}

// Pointwise-orthonormal Lambda^2_7 frame by Gram-Schmidt of the projected
// flat frame: valid while the structure's 2-form splitting stays close to
// the flat one (exact for conformal structures).
Eigen::MatrixXd lambda7FrameAt(const EuclideanData& e, const KForm& omega,
                               const Eigen::MatrixXd& flatB7)
{
    Eigen::MatrixXd M2 = e.starMatrix(6) * wedgeMatrix(omega, 2);
    Eigen::MatrixXd P7 = (M2 + Eigen::MatrixXd::Identity(28, 28)) / 4.0;
    Eigen::MatrixXd V = P7 * flatB7;
    return gramOrthonormalize(V, e.gram(2), 7);
}

struct FiberOperator {
    FiberBasis basis;
    ActiveGrid grid;
    Eigen::MatrixXd matrix; // rows: [d* dofs ; Lambda^2_7 dofs]
    Eigen::VectorXd rhs;    // -(coordinates of P(F0))
    int domainDofs = 0;
};

FiberOperator assembleFiber(const U1Problem& p, const ProjectorSet& flatPs)
{
    const StructureField& s = p.structure;
    FiberOperator op;
    op.basis = makeFiberBasis(s.activeAxes(), p.K, s.period());
    FourierField probe(1, p.K, s.period());
    op.grid = jointGrid(probe, s);
    const long n = static_cast<long>(op.grid.nodes.size());

    // cache pointwise structure data
    std::vector<EuclideanData> es;
    std::vector<Eigen::MatrixXd> frames;
    es.reserve(n);
    frames.reserve(n);
    for (long i = 0; i < n; ++i) {
        es.push_back(s.euclidAt(op.grid.nodes[i]));
        frames.push_back(lambda7FrameAt(es.back(), s.omegaAt(op.grid.nodes[i]), flatPs.b2_7));
    }

    auto lambda7Coords = [&](const FourierField& F) {
        Eigen::MatrixXd values(7, n);
        for (long i = 0; i < n; ++i)
            values.col(i) =
                frames[i].transpose() * es[i].gram(2) * F.evalAt(op.grid.nodes[i]);
        // fit each of the 7 coordinate functions as a scalar field; pack per
        // component by fitting a 7-vector "grade 0"-like block: reuse grade-0
        // fits component-wise
        std::vector<FourierField> comps;
        for (int c = 0; c < 7; ++c) comps.push_back(fitFieldOnGrid(0, op.grid, values.row(c)));
        return comps;
    };

    op.domainDofs = op.basis.dofCount(8);
    const int rows = op.basis.dofCount(1) * 8; // 1 (d*) + 7 (Lambda^2_7) per scalar dof
    op.matrix.resize(rows, op.domainDofs);

    int col = 0;
    for (std::size_t m = 0; m < op.basis.canonical.size(); ++m) {
        const int parts = op.basis.canonical[m] == WaveVector{} ? 1 : 2;
        for (int comp = 0; comp < 8; ++comp)
            for (int part = 0; part < parts; ++part) {
                FourierField a = basisField(op.basis, 1, m, comp, part == 1);
                FourierField da = extDeriv(a);
                FourierField ds = coDeriv(a, s);
                Eigen::VectorXd r0 = packField(op.basis, ds, 1);
                std::vector<FourierField> coords = lambda7Coords(da);
                Eigen::VectorXd rc(op.basis.dofCount(1) * 7);
                for (int c = 0; c < 7; ++c)
                    rc.segment(c * op.basis.dofCount(1), op.basis.dofCount(1)) =
                        packField(op.basis, coords[c], 1);
                op.matrix.col(col) << r0, rc;
                ++col;
            }
    }

    // affine part from F0
    FourierField F0field(2, p.K, s.period());
    F0field.setMode(WaveVector{}, p.F0.coeffs.cast<std::complex<double>>());
    std::vector<FourierField> c0 = lambda7Coords(F0field);
    Eigen::VectorXd rhsC(op.basis.dofCount(1) * 7);
    for (int c = 0; c < 7; ++c)
        rhsC.segment(c * op.basis.dofCount(1), op.basis.dofCount(1)) =
            packField(op.basis, c0[c], 1);
    op.rhs = Eigen::VectorXd::Zero(rows);
    op.rhs.tail(rhsC.size()) = -rhsC;
    return op;
}

FourierField fieldFromDofs(const FiberBasis& fb, const Eigen::VectorXd& dofs, int grade)
{
    FourierField f(grade, fb.K, fb.period);
    const int dim = binom(kDim, grade);
    int at = 0;
    for (const auto& k : fb.canonical) {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(dim);
        if (k == WaveVector{}) {
            for (int i = 0; i < dim; ++i) c[i] = dofs[at + i];
            at += dim;
            f.setMode(k, c);
        } else {
            for (int i = 0; i < dim; ++i)
                c[i] = 0.5 * (dofs[at + 2 * i] + kI * (-dofs[at + 2 * i + 1]));
            at += 2 * dim;
            f.setModePair(k, c);
        }
    }
    f.prune();
    return f;
}

} // namespace

double instantonResidual(const FourierField& a, const U1Problem& p)
{
    const StructureField& s = p.structure;
    FourierField F = extDeriv(a);
    if (s.isConstant()) {
        static const ProjectorSet flatPs = buildProjectors(Spin7Structure::standard());
        double sq = (flatPs.p2_7 * p.F0.coeffs + flatPs.p2_7 * F.mode(WaveVector{}).real())
                        .squaredNorm();
        for (const auto& [k, c] : F.modes()) {
            if (k == WaveVector{}) continue;
            sq += (flatPs.p2_7 * c).squaredNorm();
        }
        return std::sqrt(sq);
    }
    ActiveGrid grid = jointGrid(F, s);
    const long n = static_cast<long>(grid.nodes.size());
    std::vector<double> num(n), den(n);
    par::forEach(n, [&](std::int64_t i) {
        EuclideanData e = s.euclidAt(grid.nodes[i]);
        KForm omega = s.omegaAt(grid.nodes[i]);
        Eigen::VectorXd Fx = F.evalAt(grid.nodes[i]) + p.F0.coeffs;
        Eigen::MatrixXd M2 = e.starMatrix(6) * wedgeMatrix(omega, 2);
        Eigen::VectorXd pi7 = (M2 * Fx + Fx) / 4.0;
        const double w = std::sqrt(e.metric().determinant());
        num[i] = w * pi7.dot(e.gram(2) * pi7);
        den[i] = w;
    });
    double ns = 0, ds = 0;
    for (long i = 0; i < n; ++i) {
        ns += num[i];
        ds += den[i];
    }
    return std::sqrt(ns / ds);
}

ModuliReport solveU1Moduli(const U1Problem& p)
{
    validateChernIntegrality(p);
    static const ProjectorSet flatPs = buildProjectors(Spin7Structure::standard());
    ModuliReport r;
    r.solution = FourierField(1, p.K, p.period());

    if (p.structure.isConstant()) {
        Eigen::VectorXd obst = flatPs.p2_7 * p.F0.coeffs;
        r.obstructionNorm = obst.norm();
        ModeSweepResult sweep = sweepFlatDeformationOperator(p.K, p.period(), flatPs);
        r.kernelDim = sweep.kernelDim;
        r.cokernelDim = sweep.cokernelDim;
        r.index = sweep.index;
        // representative block conditioning at the first lattice shell
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(flatModeBlock(WaveVector{1, 0, 0, 0, 0, 0, 0, 0},
                                                             p.period(), flatPs));
        r.conditionNumber = svd.singularValues()(0) / svd.singularValues()(7);
        if (r.conditionNumber > 1e12) throw std::runtime_error("ill-conditioned mode block");

        if (r.obstructionNorm > 1e-7 * std::max(1.0, p.F0.coeffs.norm())) {
            r.status = "empty";
            return r;
        }
        // harmonic curvature representative: a = 0, F = F0
        r.status = "solved";
        r.harmonicTorusDim = 8;
        r.instantonResidual = instantonResidual(r.solution, p);
        return r;
    }

    FiberOperator op = assembleFiber(p, flatPs);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double kernelTol = 1e-6 * sv(0);
    int kernel = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] < kernelTol) ++kernel;
    r.kernelDim = kernel;
    r.cokernelDim = static_cast<long>(op.matrix.rows()) - (sv.size() - kernel);
    r.index = r.kernelDim - r.cokernelDim;
    r.conditionNumber = sv(0) / sv(sv.size() - kernel - 1);
    if (r.conditionNumber > 1e12) throw std::runtime_error("ill-conditioned fiber block");

    const double rhsNorm = op.rhs.norm();
    Eigen::VectorXd sol = Eigen::VectorXd::Zero(op.domainDofs);
    if (rhsNorm > 1e-13 * std::max(1.0, p.F0.coeffs.norm())) {
        // truncated-SVD least squares above the kernel
        Eigen::VectorXd ut = svd.matrixU().transpose() * op.rhs;
        Eigen::VectorXd y = Eigen::VectorXd::Zero(sv.size());
        for (int i = 0; i < sv.size() - kernel; ++i) y[i] = ut[i] / sv[i];
        sol = svd.matrixV() * y;
        const double residual = (op.matrix * sol - op.rhs).norm();
        if (residual > 1e-7 * rhsNorm) {
            r.status = "empty";
            r.obstructionNorm = instantonResidual(r.solution, p); // RMS of P(F0)
            return r;
        }
    }
    r.status = "solved";
    r.solution = fieldFromDofs(op.basis, sol, 1);
    r.instantonResidual = instantonResidual(r.solution, p);
    // harmonic torus: kernel directions that are closed (Thm-7.1 rigidity)
    int harmonic = 0;
    for (int i = 0; i < kernel; ++i) {
        FourierField ker = fieldFromDofs(op.basis, svd.matrixV().col(sv.size() - 1 - i), 1);
        FourierField dk = extDeriv(ker);
        if (dk.coeffNorm() <= 1e-6 * std::max(1e-30, ker.coeffNorm())) ++harmonic;
    }
    r.harmonicTorusDim = harmonic;
    return r;
}

SymbolComplexReport symbolComplexCheck(const KForm& xi, const ProjectorSet& ps)
{
    SymbolComplexReport r;
    if (xi.grade != 1) throw std::invalid_argument("xi must be a covector");
    if (xi.coeffs.norm() == 0.0) {
        r.applicable = false;
        return r;
    }
    r.applicable = true;
    Eigen::VectorXd d1 = xi.coeffs; // Lambda^0 -> Lambda^1, rank <= 1
    Eigen::MatrixXd d2 = ps.b2_7.transpose() * ps.euclid.gram(2) * wedgeMatrix(xi, 1); // 7x8
    r.rankDelta1 = 1;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(d2, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    r.rankDelta2 = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-10 * sv[0]) ++r.rankDelta2;
    r.kerDelta2Dim = 8 - r.rankDelta2;
    r.composeNorm = (d2 * d1).norm() / (d1.norm() * d2.norm());
    // exactness: the kernel of delta2 must be the line spanned by xi
    Eigen::MatrixXd ker = svd.matrixV().rightCols(r.kerDelta2Dim);
    Eigen::VectorXd unit = d1 / d1.norm();
    r.exactnessResidual = (ker - unit * (unit.transpose() * ker)).norm();
    return r;
}

double diracDecompositionCheck(const CliffordRep& rep, const ProjectorSet& ps,
                               const Spinor& eta, int samples, std::uint64_t seed,
                               double period)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::uniform_int_distribution<int> ki(-2, 2);
    const double w = 2 * M_PI / period;
    double worst = 0;

    auto actC = [&](const Eigen::MatrixXd& m, const Eigen::VectorXcd& v) {
        return Eigen::VectorXcd(m * v);
    };

    for (int t = 0; t < samples; ++t) {
        WaveVector k{};
        bool zero = true;
        while (zero) {
            for (int i = 0; i < 8; ++i) {
                k[i] = ki(rng);
                if (k[i] != 0) zero = false;
            }
        }
        Eigen::VectorXcd tau(8);
        for (int i = 0; i < 8; ++i) tau[i] = std::complex<double>(nd(rng), nd(rng));

        KForm kflat(1);
        for (int i = 0; i < 8; ++i) kflat.coeffs[i] = w * k[i];

        // LHS: Dirac symbol i gamma(kappa) applied to gamma(tau) eta
        Eigen::VectorXcd tauEta = Eigen::VectorXcd::Zero(16);
        for (int i = 0; i < 8; ++i)
            tauEta += tau[i] * (rep.gammas()[i] * eta.components).cast<std::complex<double>>();
        Matrix16d gk = Matrix16d::Zero();
        for (int i = 0; i < 8; ++i) gk += kflat.coeffs[i] * rep.gammas()[i];
        Eigen::VectorXcd lhs = kI * actC(gk, tauEta);

        // RHS: (d* tau) eta + gamma(pi_7(d tau)) eta
        const std::complex<double> dstar = -kI * (kflat.coeffs.transpose() * tau)(0);
        KFormC tauForm(1);
        tauForm.coeffs = tau;
        KFormC dtau = wedge(kflat, tauForm);
        Eigen::VectorXcd beta = kI * (ps.p2_7 * dtau.coeffs);
        Eigen::VectorXcd rhs = dstar * eta.components.cast<std::complex<double>>();
        const auto& fb = FormBasis::get();
        for (int p = 0; p < 28; ++p)
            if (beta[p] != 0.0)
                rhs += beta[p] *
                       (rep.gammaBasis(fb.maskAt(2, p)) * eta.components).cast<std::complex<double>>();
        const double scale = std::max(lhs.norm(), rhs.norm());
        if (scale > 0) worst = std::max(worst, (lhs - rhs).norm() / scale);
    }
    return worst;
}

double u1Action(const FourierField& a, const U1Problem& p)
{
    const StructureField& s = p.structure;
    FourierField dA = extDeriv(a);
    if (s.isConstant()) {
        // fully spectral: Parseval for <F,F> and mode convolution for F∧F∧Omega
        FourierField F = dA;
        FourierField F0field(2, std::max(1, p.K), s.period());
        F0field.setMode(WaveVector{}, p.F0.coeffs.cast<std::complex<double>>());
        F += F0field;
        const double t1 = innerProductL2Flat(F, F, EuclideanData());
        FourierField FF = wedgeField(F, F);
        FourierField omConst(4, 1, s.period());
        omConst.setMode(WaveVector{}, cayleyForm().coeffs.cast<std::complex<double>>());
        FourierField top = wedgeField(FF, omConst);
        const double t2 = top.mode(WaveVector{})(0).real() * quadratureVolume(p.period());
        return t1 + t2;
    }
    ActiveGrid grid = jointGrid(dA, s);
    const long n = static_cast<long>(grid.nodes.size());
    std::vector<double> vals(n);
    par::forEach(n, [&](std::int64_t i) {
        EuclideanData e = s.euclidAt(grid.nodes[i]);
        KForm F(2);
        F.coeffs = dA.evalAt(grid.nodes[i]) + p.F0.coeffs;
        KForm omega = s.omegaAt(grid.nodes[i]);
        const double t1 =
            F.coeffs.dot(e.gram(2) * F.coeffs) * std::sqrt(e.metric().determinant());
        const double t2 = wedge(wedge(F, F), omega).coeffs[0];
        vals[i] = t1 + t2;
    });
    double sum = 0;
    for (double v : vals) sum += v;
    return quadratureVolume(p.period()) * sum / double(n);
}

FourierField u1EulerLagrange(const FourierField& a, const U1Problem& p)
{
    const StructureField& s = p.structure;
    FourierField F = extDeriv(a);
    FourierField F0field(2, std::max(1, p.K), s.period());
    F0field.setMode(WaveVector{}, p.F0.coeffs.cast<std::complex<double>>());
    F += F0field;

    FourierField dstarF = coDeriv(F, s);

    const FourierField& om = s.omegaField();
    FourierField W = extDeriv(om);
    if (W.modes().empty()) return dstarF;

    ActiveGrid grid = jointGrid(F, s);
    const long n = static_cast<long>(grid.nodes.size());
    Eigen::MatrixXd values(8, n);
    par::forEach(n, [&](std::int64_t i) {
        EuclideanData e = s.euclidAt(grid.nodes[i]);
        KForm Fx(2), Wx(5);
        Fx.coeffs = F.evalAt(grid.nodes[i]);
        Wx.coeffs = W.evalAt(grid.nodes[i]);
        values.col(i) = e.starMatrix(7) * wedge(Fx, Wx).coeffs;
    });
    FourierField fw = fitFieldOnGrid(1, grid, values);
    dstarF -= fw;
    return dstarF;
}

double u1EulerLagrangeResidual(const FourierField& a, const U1Problem& p)
{
    FourierField r = u1EulerLagrange(a, p);
    const double vol = quadratureVolume(p.period());
    return std::sqrt(std::max(0.0, innerProductL2(r, r, p.structure)) / vol);
}

double actionGradientCheck(const FourierField& a, const U1Problem& p, double step)
{
    FourierField el = u1EulerLagrange(a, p);
    el *= 2.0;
    double worst = 0;
    auto probe = [&](const FourierField& b) {
        FourierField bp = b;
        bp *= step;
        FourierField bm = b;
        bm *= -step;
        FourierField a1 = a;
        a1 += bp;
        FourierField a2 = a;
        a2 += bm;
        const double fd = (u1Action(a1, p) - u1Action(a2, p)) / (2 * step);
        const double pairing = innerProductL2(el, b, p.structure);
        const double scale = std::max({std::abs(fd), std::abs(pairing), 1e-10});
        worst = std::max(worst, std::abs(fd - pairing) / scale);
    };
    for (const auto& [k, c] : a.modes()) {
        int firstNonzero = 0;
        for (int i = 0; i < 8; ++i)
            if (k[i] != 0) {
                firstNonzero = k[i];
                break;
            }
        if (firstNonzero < 0) continue;
        for (int comp = 0; comp < 8; ++comp) {
            for (int part = 0; part < (firstNonzero == 0 ? 1 : 2); ++part) {
                FourierField b(1, a.truncation(), a.period());
                Eigen::VectorXcd bc = Eigen::VectorXcd::Zero(8);
                if (firstNonzero == 0) {
                    bc[comp] = 1.0;
                    b.setMode(k, bc);
                } else {
                    bc[comp] = part == 0 ? std::complex<double>(0.5) : kI * 0.5;
                    b.setModePair(k, bc);
                }
                probe(b);
            }
        }
    }
    return worst;
}

TorsionBoundReport torsionBoundCheck(const StructureField& s, int K)
{
    TorsionBoundReport r;
    r.lambda1 = std::pow(2 * M_PI / s.period(), 2);

    const FourierField& om = s.omegaField();
    FourierField W = extDeriv(om);
    ActiveGrid grid = ActiveGrid::build(om.activeAxes(),
                                        s.isConstant() ? 0 : 2 * om.truncation() + 2, s.period());
    double wSq = 0, wsum = 0;
    for (const auto& x : grid.nodes) {
        EuclideanData e = s.euclidAt(x);
        Eigen::VectorXd wv = W.evalAt(x);
        const double wgt = std::sqrt(e.metric().determinant());
        const double n2 = wv.dot(e.gram(5) * wv);
        wSq += wgt * n2;
        wsum += wgt;
        r.wNormSup = std::max(r.wNormSup, std::sqrt(std::abs(n2)));
    }
    r.wNormL2 = std::sqrt(wSq / wsum);
    r.satisfied = std::max(r.wNormL2, r.wNormSup) < r.lambda1;
    if (!r.satisfied) return r;

    if (s.isConstant()) {
        static const ProjectorSet flatPs = buildProjectors(Spin7Structure::standard());
        ModeSweepResult sweep = sweepFlatDeformationOperator(K, s.period(), flatPs);
        r.kernelDim = static_cast<int>(sweep.kernelDim);
        r.maxKernelDaNorm = 0.0; // kernel is the constant modes, d kills them
        return r;
    }

    static const ProjectorSet flatPs = buildProjectors(Spin7Structure::standard());
    U1Problem p;
    p.structure = s;
    p.K = K;
    p.F0 = KForm(2);
    FiberOperator op = assembleFiber(p, flatPs);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(op.matrix, Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double kernelTol = 1e-6 * sv(0);
    int kernel = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] < kernelTol) ++kernel;
    r.kernelDim = kernel;
    r.maxKernelDaNorm = 0;
    for (int i = 0; i < kernel; ++i) {
        FourierField ker = fieldFromDofs(op.basis, svd.matrixV().col(sv.size() - 1 - i), 1);
        FourierField dk = extDeriv(ker);
        r.maxKernelDaNorm =
            std::max(r.maxKernelDaNorm, dk.coeffNorm() / std::max(1e-30, ker.coeffNorm()));
    }
    // sampled transverse fibers: the flat block floor keeps them invertible
    r.otherFiberSigmaMin = std::numeric_limits<double>::infinity();
    const auto axes = s.activeAxes();
    for (int ax = 0; ax < 8; ++ax) {
        if (std::find(axes.begin(), axes.end(), ax) != axes.end()) continue;
        WaveVector kperp{};
        kperp[ax] = 1;
        const double w = 2 * M_PI / s.period();
        // flat blocks of the shifted modes bound the fiber spectrum
        double sigma = std::numeric_limits<double>::infinity();
        for (const auto& km : makeFiberBasis(axes, K, s.period()).canonical) {
            WaveVector k = km;
            k[ax] += 1;
            Eigen::JacobiSVD<Eigen::MatrixXcd> bs(flatModeBlock(k, s.period(), flatPs));
            sigma = std::min(sigma, bs.singularValues()(7) / w);
        }
        r.otherFiberSigmaMin = std::min(r.otherFiberSigmaMin, sigma);
        break;
    }
    return r;
}

} // namespace spin7
