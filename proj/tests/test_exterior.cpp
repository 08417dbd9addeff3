#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spin7/exterior.hpp"

using namespace spin7;

namespace {

KForm basisForm(std::initializer_list<int> idx)
{
    const auto& fb = FormBasis::get();
    auto [sgn, mask] = normalizeIndices(std::vector<int>(idx));
    KForm f(static_cast<int>(idx.size()));
    f.coeffs[fb.posOfMask(mask)] = sgn;
    return f;
}

KForm randomForm(int grade, std::mt19937_64& rng)
{
    KForm f(grade);
    std::normal_distribution<double> n;
    for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = n(rng);
    return f;
}

// Independent oracle for Omega ∧ Omega: expand the 14x14 term products of
// the printed Cayley form directly over index tuples, bypassing the packed
// wedge implementation.
double cayleySquareOracle()
{
    static const int terms[14][5] = {
        {+1, 1, 2, 3, 4}, {-1, 1, 2, 7, 8}, {-1, 1, 6, 3, 8}, {-1, 1, 6, 7, 4},
        {+1, 1, 5, 2, 6}, {+1, 1, 5, 3, 7}, {+1, 1, 5, 4, 8}, {+1, 5, 6, 7, 8},
        {-1, 5, 6, 3, 4}, {-1, 5, 2, 7, 4}, {-1, 5, 2, 3, 8}, {+1, 3, 7, 4, 8},
        {+1, 2, 6, 4, 8}, {+1, 2, 6, 3, 7}};
    double total = 0;
    for (const auto& s : terms)
        for (const auto& t : terms) {
            std::vector<int> idx = {s[1], s[2], s[3], s[4], t[1], t[2], t[3], t[4]};
            auto [sgn, mask] = normalizeIndices(idx);
            if (sgn == 0) continue;
            REQUIRE(mask == 0xFFu);
            total += double(s[0] * t[0]) * sgn;
        }
    return total; // coefficient of dx_{1..8}
}

} // namespace

TEST_CASE("wedge on basis elements")
{
    auto d1 = basisForm({1});
    auto d2 = basisForm({2});
    auto w = wedge(d1, d2);
    CHECK(w.grade == 2);
    CHECK(w.coeffs == basisForm({1, 2}).coeffs);

    auto z = wedge(d1, d1);
    CHECK(z.norm() == 0.0);

    // graded anticommutativity on random homogeneous forms
    std::mt19937_64 rng(7);
    for (auto [ga, gb] : {std::pair{1, 2}, {2, 2}, {2, 3}, {3, 3}, {1, 4}}) {
        auto a = randomForm(ga, rng);
        auto b = randomForm(gb, rng);
        auto ab = wedge(a, b);
        auto ba = wedge(b, a);
        const double sgn = (ga * gb) % 2 ? -1.0 : 1.0;
        CHECK((ab.coeffs - sgn * ba.coeffs).norm() < 1e-12 * ab.coeffs.norm());
    }
}

TEST_CASE("wedge associativity and bilinearity")
{
    std::mt19937_64 rng(11);
    auto a = randomForm(1, rng), b = randomForm(2, rng), c = randomForm(3, rng);
    auto l = wedge(wedge(a, b), c);
    auto r = wedge(a, wedge(b, c));
    CHECK((l.coeffs - r.coeffs).norm() < 1e-12 * l.coeffs.norm());
}

TEST_CASE("cayley form: printed signs land on the expected lex coefficients")
{
    const auto& fb = FormBasis::get();
    auto omega = cayleyForm();
    CHECK(omega.grade == 4);
    auto coeff = [&](std::initializer_list<int> idx) {
        auto [sgn, mask] = normalizeIndices(std::vector<int>(idx));
        return sgn * omega.coeffs[fb.posOfMask(mask)];
    };
    CHECK(coeff({1, 2, 3, 4}) == 1.0);
    CHECK(coeff({1, 2, 7, 8}) == -1.0);
    CHECK(coeff({1, 2, 3, 5}) == 0.0);
    CHECK(coeff({5, 6, 7, 8}) == 1.0);
    CHECK(coeff({2, 6, 3, 7}) == 1.0); // unsorted tuple, parity folded in
    // exactly 14 nonzero entries, all +-1
    int nonzero = 0;
    for (int i = 0; i < omega.coeffs.size(); ++i)
        if (omega.coeffs[i] != 0.0) {
            ++nonzero;
            CHECK(std::abs(omega.coeffs[i]) == 1.0);
        }
    CHECK(nonzero == 14);
}

TEST_CASE("Omega ∧ Omega = 14 nu, against the term-product oracle")
{
    auto omega = cayleyForm();
    auto sq = wedge(omega, omega);
    REQUIRE(sq.grade == 8);
    const double oracle = cayleySquareOracle();
    CHECK(oracle == 14.0);
    CHECK(sq.coeffs[0] == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("hodge star basics")
{
    EuclideanData e;
    auto omega = cayleyForm();
    auto so = hodgeStar(omega, e);
    CHECK((so.coeffs - omega.coeffs).norm() < 1e-14); // *Omega0 = Omega0

    KForm one(0);
    one.coeffs[0] = 1.0;
    auto nu = hodgeStar(one, e);
    CHECK(nu.grade == 8);
    CHECK(nu.coeffs[0] == 1.0); // *1 = nu

    auto top = basisForm({1, 2, 3, 4, 5, 6, 7, 8});
    auto s = hodgeStar(top, e);
    CHECK(s.grade == 0);
    CHECK(s.coeffs[0] == 1.0);
}

TEST_CASE("star-squared is (-1)^k gradewise")
{
    EuclideanData e;
    const auto& fb = FormBasis::get();
    for (int k = 0; k <= 8; ++k) {
        Eigen::MatrixXd ss = e.starMatrix(8 - k) * e.starMatrix(k);
        const double sgn = (k % 2) ? -1.0 : 1.0;
        Eigen::MatrixXd expect = sgn * Eigen::MatrixXd::Identity(fb.dim(k), fb.dim(k));
        CHECK((ss - expect).norm() < 1e-13);
    }
}

TEST_CASE("inner products on the orthonormal basis")
{
    EuclideanData e;
    CHECK(innerProduct(basisForm({1, 2}), basisForm({1, 2}), e) == doctest::Approx(1.0));
    CHECK(innerProduct(basisForm({1, 2}), basisForm({3, 4}), e) == doctest::Approx(0.0));
    auto omega = cayleyForm();
    CHECK(innerProduct(omega, omega, e) == doctest::Approx(14.0).epsilon(1e-13));
    CHECK_THROWS_AS(innerProduct(basisForm({1}), basisForm({1, 2}), e), std::invalid_argument);
}

TEST_CASE("a ∧ *b = <a,b> nu on random pairs, identity and non-identity metric")
{
    std::mt19937_64 rng(23);
    std::normal_distribution<double> n;
    Matrix8d m = Matrix8d::Identity();
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j <= i; ++j) {
            double v = 0.2 * n(rng);
            m(i, j) += v;
            m(j, i) += i == j ? 0 : v;
        }
    Matrix8d g = m.transpose() * m; // SPD
    for (const EuclideanData& e : {EuclideanData(), EuclideanData(g)}) {
        for (int k = 0; k <= 8; ++k) {
            auto a = randomForm(k, rng);
            auto b = randomForm(k, rng);
            auto asb = wedge(a, hodgeStar(b, e));
            const double lhs = asb.coeffs[0];
            const double rhs = innerProduct(a, b, e) * e.volumeScale();
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
        // positive-definiteness spot check
        auto a = randomForm(3, rng);
        CHECK(innerProduct(a, a, e) > 0.0);
    }
}

TEST_CASE("contraction")
{
    Vector8d e1 = Vector8d::Zero(), e4 = Vector8d::Zero();
    e1[0] = 1;
    e4[3] = 1;
    auto d123 = basisForm({1, 2, 3});
    CHECK((contract(e1, d123).coeffs - basisForm({2, 3}).coeffs).norm() == 0.0);
    CHECK(contract(e4, d123).norm() == 0.0);

    // iota_{e1} Omega0 = dx_234 - dx_278 - dx_638 - dx_674 + dx_526 + dx_537 + dx_548
    auto got = contract(e1, cayleyForm());
    KForm expect(3);
    const auto& fb = FormBasis::get();
    auto add = [&](int sgn, std::initializer_list<int> idx) {
        auto [s, mask] = normalizeIndices(std::vector<int>(idx));
        expect.coeffs[fb.posOfMask(mask)] += sgn * s;
    };
    add(+1, {2, 3, 4});
    add(-1, {2, 7, 8});
    add(-1, {6, 3, 8});
    add(-1, {6, 7, 4});
    add(+1, {5, 2, 6});
    add(+1, {5, 3, 7});
    add(+1, {5, 4, 8});
    CHECK((got.coeffs - expect.coeffs).norm() == 0.0);
}

TEST_CASE("contraction is an antiderivation and adjoint to wedging v-flat")
{
    std::mt19937_64 rng(37);
    std::normal_distribution<double> n;
    EuclideanData e;
    for (int rep = 0; rep < 10; ++rep) {
        Vector8d v;
        for (int i = 0; i < 8; ++i) v[i] = n(rng);
        auto a = randomForm(2, rng);
        auto b = randomForm(3, rng);
        auto lhs = contract(v, wedge(a, b));
        auto rhs = wedge(contract(v, a), b);
        rhs.coeffs += wedge(a, contract(v, b)).coeffs; // (-1)^{|a|} = +1
        CHECK((lhs.coeffs - rhs.coeffs).norm() < 1e-12 * (1 + lhs.coeffs.norm()));

        // <iota_v a, c> = <a, v-flat ∧ c> for the euclidean metric
        auto c = randomForm(1, rng);
        KForm vflat(1);
        vflat.coeffs = Eigen::Map<Eigen::VectorXd>(v.data(), 8);
        const double l = innerProduct(contract(v, a), c, e);
        const double r = innerProduct(a, wedge(vflat, c), e);
        CHECK(l == doctest::Approx(r).epsilon(1e-12));
    }
}

TEST_CASE("multivector wedge agrees with packed wedge and grades add")
{
    std::mt19937_64 rng(41);
    auto a = randomForm(2, rng);
    auto b = randomForm(2, rng);
    auto ma = Multivector::fromKForm(a);
    auto mb = Multivector::fromKForm(b);
    auto mw = wedge(ma, mb);
    auto w = wedge(a, b);
    CHECK((mw.gradePart(4).coeffs - w.coeffs).norm() < 1e-14 * w.coeffs.norm());
    for (int k = 0; k <= 8; ++k)
        if (k != 4) CHECK(mw.gradePart(k).norm() == 0.0);
}

TEST_CASE("pullback: compound matrices respect composition and the cayley identity")
{
    std::mt19937_64 rng(43);
    std::normal_distribution<double> n;
    Matrix8d A, B;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
            A(i, j) = n(rng);
            B(i, j) = n(rng);
        }
    // (AB)^* = B^* A^* on grade 3
    Eigen::MatrixXd lhs = pullbackMatrix(A * B, 3);
    Eigen::MatrixXd rhs = pullbackMatrix(B, 3) * pullbackMatrix(A, 3);
    CHECK((lhs - rhs).norm() < 1e-10 * lhs.norm());

    // identity pullback of the cayley form
    auto om = cayleyForm();
    CHECK((pullback(om, Matrix8d::Identity()).coeffs - om.coeffs).norm() == 0.0);
}

TEST_CASE("euclidean data validation")
{
    Matrix8d g = Matrix8d::Identity();
    g(0, 0) = -1.0;
    CHECK_THROWS_AS((void)EuclideanData(g), std::invalid_argument);
    CHECK_THROWS_AS((void)EuclideanData(Matrix8d::Identity(), 2), std::invalid_argument);
    EuclideanData rev(Matrix8d::Identity(), -1);
    CHECK(rev.volumeScale() == -1.0);
}
