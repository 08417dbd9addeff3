#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spin7/clifford.hpp"

using namespace spin7;

namespace {

struct Fixture {
    ProjectorSet ps = buildProjectors(Spin7Structure::standard());
    CliffordRep rep = buildRep();
    Spinor eta;
    Fixture() { eta = findStabilizedSpinor(ps, rep); }
};

const Fixture& fix()
{
    static const Fixture f;
    return f;
}

Vector8d randomVector(std::mt19937_64& rng)
{
    std::normal_distribution<double> n;
    Vector8d v;
    for (int i = 0; i < 8; ++i) v[i] = n(rng);
    return v;
}

} // namespace

TEST_CASE("defining relations of the representation")
{
    const auto& rep = fix().rep;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            Matrix16d ac = rep.gammas()[i] * rep.gammas()[j] + rep.gammas()[j] * rep.gammas()[i];
            Matrix16d expect =
                i == j ? Matrix16d(-2.0 * Matrix16d::Identity()) : Matrix16d(Matrix16d::Zero());
            CHECK((ac - expect).norm() == 0.0); // exact: signed permutation matrices
        }
    CHECK((rep.volumeOp() * rep.volumeOp() - Matrix16d::Identity()).norm() == 0.0);
    CHECK(rep.chiralProjector(Chirality::Plus).trace() == doctest::Approx(8.0));
    CHECK(rep.chiralProjector(Chirality::Minus).trace() == doctest::Approx(8.0));

    // volume operator is central in the even part
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j) {
            Matrix16d even = rep.gammas()[i] * rep.gammas()[j];
            CHECK((rep.volumeOp() * even - even * rep.volumeOp()).norm() < 1e-14);
        }
}

TEST_CASE("clifford multiplication is orthogonal for the pairing")
{
    const auto& rep = fix().rep;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    for (int rep_i = 0; rep_i < 10; ++rep_i) {
        Vector8d v = randomVector(rng);
        Vector16d s, t;
        for (int i = 0; i < 16; ++i) {
            s[i] = n(rng);
            t[i] = n(rng);
        }
        Matrix16d gv = Matrix16d::Zero();
        for (int i = 0; i < 8; ++i) gv += v[i] * rep.gammas()[i];
        const double lhs = (gv * s).dot(gv * t);
        CHECK(lhs == doctest::Approx(v.squaredNorm() * s.dot(t)).epsilon(1e-12));

        // v.(v.s) = -|v|^2 s (the fixed sign convention)
        CHECK((gv * (gv * s) + v.squaredNorm() * s).norm() < 1e-12 * s.norm());
    }
}

TEST_CASE("odd forms flip chirality, even forms preserve it")
{
    const auto& rep = fix().rep;
    Spinor sp;
    sp.components = rep.chiralBasis(Chirality::Plus).col(0);
    sp.chirality = Chirality::Plus;

    KForm dx1(1);
    dx1.coeffs = Eigen::VectorXd::Zero(8);
    dx1.coeffs[0] = 1;
    CHECK(cliffordAct(dx1, sp, rep).chirality == Chirality::Minus);

    KForm one(0);
    one.coeffs[0] = 1.0;
    auto id = cliffordAct(one, sp, rep);
    CHECK((id.components - sp.components).norm() == 0.0);

    // the volume form acts as +1 on S^+
    KForm nu(8);
    nu.coeffs[0] = 1.0;
    auto vol = cliffordAct(nu, sp, rep);
    CHECK((vol.components - sp.components).norm() < 1e-14);
}

TEST_CASE("stabilized spinor: unit, positive-sign convention, in S^+")
{
    const auto& f = fix();
    CHECK(f.eta.norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.eta.chirality == Chirality::Plus);
    CHECK((f.rep.chiralProjector(Chirality::Minus) * f.eta.components).norm() < 1e-12);
    int firstNonzero = -1;
    for (int i = 0; i < 16; ++i)
        if (std::abs(f.eta.components[i]) > 1e-8) {
            firstNonzero = i;
            break;
        }
    REQUIRE(firstNonzero >= 0);
    CHECK(f.eta.components[firstNonzero] > 0);

    // every Lambda^2_7 basis element acts nontrivially on eta
    for (int j = 0; j < 7; ++j) {
        KForm beta(2);
        beta.coeffs = f.ps.b2_7.col(j);
        CHECK(cliffordAct(beta, f.eta, f.rep).norm() > 0.5);
    }
}

TEST_CASE("map I lands in H and is an isomorphism")
{
    const auto& f = fix();
    Eigen::MatrixXd M = mapIMatrix(f.ps, f.eta, f.rep);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    CHECK(svd.singularValues().minCoeff() > 1e-6);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> n;
    for (int rep_i = 0; rep_i < 10; ++rep_i) {
        KForm alpha(2);
        Eigen::VectorXd c(7);
        for (int i = 0; i < 7; ++i) c[i] = n(rng);
        alpha.coeffs = f.ps.b2_7 * c;
        Spinor img = mapI(alpha, f.eta, f.rep);
        CHECK(std::abs(img.components.dot(f.eta.components)) < 1e-10);
    }
    KForm zero(2);
    CHECK(mapI(zero, f.eta, f.rep).norm() == 0.0);
}

TEST_CASE("poly-form expansion is a linear bijection")
{
    const auto& rep = fix().rep;
    // generators and simple products go to the right basis forms
    Multivector id = polyFormOfEndomorphism(Matrix16d::Identity(), rep);
    CHECK(id[0] == doctest::Approx(1.0));
    Multivector m1 = polyFormOfEndomorphism(rep.gammas()[0], rep);
    CHECK(m1[1] == doctest::Approx(1.0)); // dx_1 has mask 1
    CHECK((m1.norm() - 1.0) < 1e-12);
    Multivector m12 = polyFormOfEndomorphism(rep.gammas()[0] * rep.gammas()[1], rep);
    CHECK(m12[3] == doctest::Approx(1.0)); // dx_12 has mask 3

    // round trip on random matrices
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n;
    for (int rep_i = 0; rep_i < 50; ++rep_i) {
        Matrix16d X;
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) X(i, j) = n(rng);
        Multivector mv = polyFormOfEndomorphism(X, rep);
        Matrix16d back = rep.formAction(mv);
        CHECK((back - X).norm() < 1e-9 * X.norm());
    }
}

TEST_CASE("eta (x) eta expands over grades 0, 4, 8 with the Cayley grade-4 part")
{
    const auto& f = fix();
    auto report = verifyEtaOmegaIdentity(f.eta, cayleyForm(), f.rep);
    CHECK(report.scalar == doctest::Approx(1.0 / 16).epsilon(1e-12));
    CHECK(report.offGradeNorm < 1e-13);
    CHECK(report.structResidual < 1e-13);
    CHECK(std::abs(report.omegaRatio) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.volumeRatio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.quadFitResidual < 1e-12);
    // measured sign convention: the grade-4 part is -Omega_0 for the printed
    // Cayley form (recorded, see the report fields)
    CHECK(report.omegaRatio == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(report.quadFitScalar < 0);
}

TEST_CASE("kernel of beta -> beta.eta on 2-forms is exactly Lambda^2_21")
{
    const auto& f = fix();
    auto report = spinorialInstantonKernel(f.eta, f.ps, f.rep);
    CHECK(report.kernelDim == 21);
    CHECK(report.maxLambda21Norm < 1e-10);
    CHECK(report.minLambda7Norm > 0.5);
    CHECK(report.kernelAlignment < 1e-9);

    KForm b21(2);
    b21.coeffs = f.ps.p2_21 * Eigen::VectorXd::Unit(28, 0);
    CHECK(cliffordAct(b21, f.eta, f.rep).norm() < 1e-10);
    KForm b7(2);
    b7.coeffs = f.ps.p2_7 * Eigen::VectorXd::Unit(28, 0);
    CHECK(cliffordAct(b7, f.eta, f.rep).norm() > 0.1);
}

TEST_CASE("the 21 Lambda^2_21 operators close under commutator and kill eta")
{
    const auto& f = fix();
    std::vector<Matrix16d> ops;
    for (int j = 0; j < 21; ++j) {
        KForm beta(2);
        beta.coeffs = f.ps.b2_21.col(j);
        ops.push_back(f.rep.formAction(beta));
    }
    Eigen::MatrixXd flat(16 * 16, 21);
    for (int j = 0; j < 21; ++j)
        flat.col(j) = Eigen::Map<Eigen::VectorXd>(ops[j].data(), 256);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> pick(0, 20);
    for (int rep_i = 0; rep_i < 15; ++rep_i) {
        int a = pick(rng), b = pick(rng);
        Matrix16d comm = ops[a] * ops[b] - ops[b] * ops[a];
        Eigen::VectorXd target = Eigen::Map<Eigen::VectorXd>(comm.data(), 256);
        Eigen::VectorXd sol = flat.colPivHouseholderQr().solve(target);
        CHECK((flat * sol - target).norm() < 1e-9 * (1 + target.norm()));
        CHECK((comm * f.eta.components).norm() < 1e-12);
    }
}

TEST_CASE("wrong-chirality convention is rejected, not silently accepted")
{
    const auto& ps = fix().ps;
    CliffordRep flipped(-1);
    CHECK_THROWS_AS((void)findStabilizedSpinor(ps, flipped), ClaimViolation);
}
