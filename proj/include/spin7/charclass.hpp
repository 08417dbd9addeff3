#pragma once

#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace spin7::charclass {

using Rational = boost::multiprecision::cpp_rational;

/// Formal variables of the cohomology ring we need, with their real
/// cohomological degrees.
enum class Sym { p1 = 0, p2, c1, c2, c3, c4 };
constexpr int kSymCount = 6;
int symDegree(Sym s);
const char* symName(Sym s);

/// Monomial = exponent vector over {p1, p2, c1, c2, c3, c4}.
struct Monomial {
    std::array<int, kSymCount> exp{};
    int degree() const;
    bool operator<(const Monomial& o) const { return exp < o.exp; }
    bool operator==(const Monomial& o) const { return exp == o.exp; }
    std::string name() const; // e.g. "p1c1c1" (alphabetical key form)
};

Monomial mono(std::initializer_list<std::pair<Sym, int>> powers);

/// Graded-commutative polynomial with exact rational coefficients
/// (all generators have even degree, so plain commutative).
class CohomologyElement {
public:
    CohomologyElement() = default;
    explicit CohomologyElement(const Rational& scalar);
    static CohomologyElement variable(Sym s, int power = 1);

    CohomologyElement& operator+=(const CohomologyElement& o);
    CohomologyElement& operator-=(const CohomologyElement& o);
    CohomologyElement operator+(const CohomologyElement& o) const;
    CohomologyElement operator-(const CohomologyElement& o) const;
    CohomologyElement operator*(const CohomologyElement& o) const;
    CohomologyElement operator*(const Rational& s) const;
    bool operator==(const CohomologyElement& o) const { return terms_ == o.terms_; }

    /// Degrees above 16 cannot pair on an 8-manifold and are dropped.
    void truncateAbove(int degree);
    CohomologyElement gradePart(int degree) const;
    /// substitute zero for a variable
    CohomologyElement without(Sym s) const;

    const std::map<Monomial, Rational>& terms() const { return terms_; }
    bool isZero() const { return terms_.empty(); }
    std::string str() const;

private:
    std::map<Monomial, Rational> terms_;
    void addTerm(const Monomial& m, const Rational& c);
};

/// Topological input: b1 and the pairing table <monomial, [M]> for every
/// degree-8 monomial that can appear in the index formulas.
struct ManifoldData {
    int b1 = 0;
    std::map<std::string, Rational> pairings;

    /// evaluates a degree-8 element against the table; missing monomials
    /// with nonzero coefficient are an error.
    Rational evaluate(const CohomologyElement& e) const;

    static ManifoldData torus8();
};

/// Denominator convention for the degree-8 A-roof term; 5760 is standard,
/// 5670 reproduces the printed value.
enum class ARoofDenominator { Standard5760 = 5760, Printed5670 = 5670 };

/// (7 <p1^2> - 4 <p2>) / denominator.
Rational aRoofTwo(const ManifoldData& m,
                  ARoofDenominator den = ARoofDenominator::Standard5760);

/// A-roof term - 1 + b1.
Rational b27(const ManifoldData& m, ARoofDenominator den = ARoofDenominator::Standard5760);

/// Bundle data for the general index formula: p1(g_E) and the degree-16
/// combination p1(g_E)^2 - 2 p2(g_E) as polynomials over the pairing table.
struct AdjointBundleData {
    CohomologyElement p1;          // degree 4
    CohomologyElement p1sqMinus2p2; // degree 8
    int dimG = 0;
};

/// -(dim g) Aroof2 + (1/24) <p1(M) p1(g_E)> - (1/12) <p1(g_E)^2 - 2 p2(g_E)>.
Rational indexGeneral(const ManifoldData& m, const AdjointBundleData& bundle,
                      ARoofDenominator den = ARoofDenominator::Standard5760);

/// su(r) adjoint data derived from the Chern classes of E via the
/// Chern-character machinery (p1 = -2r c2 + (r-1) c1^2 etc.).
AdjointBundleData suAdjointData(int rank);

/// Fixed-determinant index polynomial of the given rank, as an element
/// paired against the table (the -(r^2-1)(1 - b1 + b27) term uses the
/// manifold data directly).
Rational indexFixedDet(const ManifoldData& m, int rank,
                       ARoofDenominator den = ARoofDenominator::Standard5760);

/// The printed rank-2 polynomial.
Rational indexRank2(const ManifoldData& m,
                    ARoofDenominator den = ARoofDenominator::Standard5760);

/// The degree-8 Chern-character part of the fixed-determinant formula,
/// as a polynomial in c1..c4 (before pairing).
CohomologyElement fixedDetCh4Polynomial(int rank);
CohomologyElement rank2Ch4Polynomial();

struct ChernIdentityReport {
    int rank = 0;
    bool ch4Matches = false; // against the printed polynomial
    bool p1Matches = false;
    CohomologyElement ch4EndE;   // the Newton-identity expansion
    CohomologyElement p1Adjoint;
    CohomologyElement ch4Discrepancy; // printed - computed (0 iff they agree)
};

/// Chern-character oracle: expands ch(End E) = ch(E) ch(E)^dual via Newton
/// identities and compares ch4(End E) and p1(g_E) against the printed
/// polynomials; exact rational equality. The two ch4 routes disagree by
/// (2/3)(c1^4 - 3 c1^2 c2 + 3 c1 c3) = 4 c1 ch3(E), which vanishes iff
/// c1 = 0; the report carries the discrepancy explicitly.
ChernIdentityReport verifyChernIdentities(int rank);

/// Independent splitting-principle oracle: evaluates ch4(End E) =
/// sum_{i,j} (x_i - x_j)^4 / 24 on formal Chern roots substituted by the
/// given rationals, for comparison against a polynomial in c1..c4.
Rational ch4EndEFromRoots(const std::vector<Rational>& roots);
/// Evaluates a polynomial in c1..c4 on the elementary symmetric values of
/// the given roots (p1, p2 must not appear).
Rational evaluateOnRoots(const CohomologyElement& e, const std::vector<Rational>& roots);

/// Parse "num/den" or integer strings into exact rationals.
Rational parseRational(const std::string& s);
std::string rationalToString(const Rational& r);

} // namespace spin7::charclass
