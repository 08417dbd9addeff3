#include "spin7/charclass.hpp"

#include <sstream>
#include <stdexcept>

namespace spin7::charclass {

int symDegree(Sym s)
{
    switch (s) {
    case Sym::p1: return 4;
    case Sym::p2: return 8;
    case Sym::c1: return 2;
    case Sym::c2: return 4;
    case Sym::c3: return 6;
    case Sym::c4: return 8;
    }
    return 0;
}

const char* symName(Sym s)
{
    switch (s) {
    case Sym::p1: return "p1";
    case Sym::p2: return "p2";
    case Sym::c1: return "c1";
    case Sym::c2: return "c2";
    case Sym::c3: return "c3";
    case Sym::c4: return "c4";
    }
    return "";
}

int Monomial::degree() const
{
    int d = 0;
    for (int i = 0; i < kSymCount; ++i) d += exp[i] * symDegree(static_cast<Sym>(i));
    return d;
}

std::string Monomial::name() const
{
    std::string s;
    for (int i = 0; i < kSymCount; ++i)
        for (int t = 0; t < exp[i]; ++t) s += symName(static_cast<Sym>(i));
    return s.empty() ? "1" : s;
}

Monomial mono(std::initializer_list<std::pair<Sym, int>> powers)
{
    Monomial m;
    for (const auto& [s, p] : powers) m.exp[static_cast<int>(s)] += p;
    return m;
}

CohomologyElement::CohomologyElement(const Rational& scalar)
{
    if (scalar != 0) terms_[Monomial{}] = scalar;
}

CohomologyElement CohomologyElement::variable(Sym s, int power)
{
    CohomologyElement e;
    Monomial m;
    m.exp[static_cast<int>(s)] = power;
    e.terms_[m] = 1;
    return e;
}

void CohomologyElement::addTerm(const Monomial& m, const Rational& c)
{
    if (c == 0) return;
    auto [it, fresh] = terms_.emplace(m, c);
    if (!fresh) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

CohomologyElement& CohomologyElement::operator+=(const CohomologyElement& o)
{
    for (const auto& [m, c] : o.terms_) addTerm(m, c);
    return *this;
}

CohomologyElement& CohomologyElement::operator-=(const CohomologyElement& o)
{
    for (const auto& [m, c] : o.terms_) addTerm(m, -c);
    return *this;
}

CohomologyElement CohomologyElement::operator+(const CohomologyElement& o) const
{
    CohomologyElement r = *this;
    r += o;
    return r;
}

CohomologyElement CohomologyElement::operator-(const CohomologyElement& o) const
{
    CohomologyElement r = *this;
    r -= o;
    return r;
}

CohomologyElement CohomologyElement::operator*(const CohomologyElement& o) const
{
    CohomologyElement r;
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) {
            Monomial m;
            for (int i = 0; i < kSymCount; ++i) m.exp[i] = ma.exp[i] + mb.exp[i];
            if (m.degree() > 16) continue; // cannot pair on an 8-manifold
            r.addTerm(m, ca * cb);
        }
    return r;
}

CohomologyElement CohomologyElement::operator*(const Rational& s) const
{
    CohomologyElement r;
    if (s == 0) return r;
    for (const auto& [m, c] : terms_) r.terms_[m] = c * s;
    return r;
}

void CohomologyElement::truncateAbove(int degree)
{
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (it->first.degree() > degree)
            it = terms_.erase(it);
        else
            ++it;
    }
}

CohomologyElement CohomologyElement::gradePart(int degree) const
{
    CohomologyElement r;
    for (const auto& [m, c] : terms_)
        if (m.degree() == degree) r.terms_[m] = c;
    return r;
}

CohomologyElement CohomologyElement::without(Sym s) const
{
    CohomologyElement r;
    for (const auto& [m, c] : terms_)
        if (m.exp[static_cast<int>(s)] == 0) r.terms_[m] = c;
    return r;
}

std::string CohomologyElement::str() const
{
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c << ")";
        if (!(m == Monomial{})) os << " " << m.name();
    }
    return os.str();
}

Rational ManifoldData::evaluate(const CohomologyElement& e) const
{
    Rational total = 0;
    for (const auto& [m, c] : e.terms()) {
        if (m.degree() != 8)
            throw std::invalid_argument("pairing a non-top-degree monomial: " + m.name());
        auto it = pairings.find(m.name());
        if (it == pairings.end())
            throw std::invalid_argument("missing pairing for monomial " + m.name());
        total += c * it->second;
    }
    return total;
}

ManifoldData ManifoldData::torus8()
{
    ManifoldData m;
    m.b1 = 8;
    for (const char* key : {"p1p1", "p2", "p1c1c1", "p1c2", "c1c1c1c1", "c1c1c2", "c1c3",
                            "c2c2", "c4"})
        m.pairings[key] = 0;
    return m;
}

Rational aRoofTwo(const ManifoldData& m, ARoofDenominator den)
{
    CohomologyElement p1sq = CohomologyElement::variable(Sym::p1, 2);
    CohomologyElement p2 = CohomologyElement::variable(Sym::p2);
    Rational num = m.evaluate(p1sq * Rational(7) - p2 * Rational(4));
    return num / Rational(static_cast<int>(den));
}

Rational b27(const ManifoldData& m, ARoofDenominator den)
{
    return aRoofTwo(m, den) - 1 + m.b1;
}

namespace {

// Chern character of a rank-r bundle up to degree 8 via Newton identities.
CohomologyElement chernCharacter(int rank, bool dual)
{
    auto cls = [&](Sym s, int i) {
        CohomologyElement c = CohomologyElement::variable(s);
        return (dual && (i % 2) == 1) ? c * Rational(-1) : c;
    };
    CohomologyElement e1 = cls(Sym::c1, 1), e2 = cls(Sym::c2, 2), e3 = cls(Sym::c3, 3),
                      e4 = cls(Sym::c4, 4);
    CohomologyElement s1 = e1;
    CohomologyElement s2 = e1 * s1 - e2 * Rational(2);
    CohomologyElement s3 = e1 * s2 - e2 * s1 + e3 * Rational(3);
    CohomologyElement s4 = e1 * s3 - e2 * s2 + e3 * s1 - e4 * Rational(4);
    CohomologyElement ch{Rational(rank)};
    ch += s1;
    ch += s2 * Rational(1, 2);
    ch += s3 * Rational(1, 6);
    ch += s4 * Rational(1, 24);
    ch.truncateAbove(8);
    return ch;
}

CohomologyElement chEndE(int rank)
{
    CohomologyElement prod = chernCharacter(rank, false) * chernCharacter(rank, true);
    prod.truncateAbove(8);
    return prod;
}

} // namespace

CohomologyElement fixedDetCh4Polynomial(int rank)
{
    const Rational r(rank);
    CohomologyElement c1_4 = CohomologyElement::variable(Sym::c1, 4);
    CohomologyElement c1sq_c2 =
        CohomologyElement::variable(Sym::c1, 2) * CohomologyElement::variable(Sym::c2);
    CohomologyElement c1c3 =
        CohomologyElement::variable(Sym::c1) * CohomologyElement::variable(Sym::c3);
    CohomologyElement c2sq = CohomologyElement::variable(Sym::c2, 2);
    CohomologyElement c4 = CohomologyElement::variable(Sym::c4);
    return c1_4 * ((r + 7) / 12) - c1sq_c2 * ((r + 6) / 3) + c1c3 * ((r + 3) / 3) +
           c2sq * ((r + 6) / 6) - c4 * (r / 3);
}

CohomologyElement rank2Ch4Polynomial()
{
    CohomologyElement c1_4 = CohomologyElement::variable(Sym::c1, 4);
    CohomologyElement c1sq_c2 =
        CohomologyElement::variable(Sym::c1, 2) * CohomologyElement::variable(Sym::c2);
    CohomologyElement c2sq = CohomologyElement::variable(Sym::c2, 2);
    return c1_4 * Rational(3, 4) - c1sq_c2 * Rational(8, 3) + c2sq * Rational(4, 3);
}

ChernIdentityReport verifyChernIdentities(int rank)
{
    if (rank < 2 || rank > 6) throw std::invalid_argument("rank must be in 2..6");
    ChernIdentityReport rep;
    rep.rank = rank;
    CohomologyElement endE = chEndE(rank);
    rep.ch4EndE = endE.gradePart(8);
    rep.ch4Matches = rep.ch4EndE == fixedDetCh4Polynomial(rank);

    // p1(g_E) = ch2(End E): degree-4 part of the character of the
    // complexified adjoint (the trivial summand contributes nothing)
    rep.p1Adjoint = endE.gradePart(4);
    const Rational r(rank);
    CohomologyElement printed =
        CohomologyElement::variable(Sym::c1, 2) * (r - 1) -
        CohomologyElement::variable(Sym::c2) * (2 * r);
    rep.p1Matches = rep.p1Adjoint == printed;
    rep.ch4Discrepancy = fixedDetCh4Polynomial(rank) - rep.ch4EndE;
    return rep;
}

Rational ch4EndEFromRoots(const std::vector<Rational>& roots)
{
    Rational total = 0;
    for (const Rational& a : roots)
        for (const Rational& b : roots) {
            Rational d = a - b;
            total += d * d * d * d;
        }
    return total / 24;
}

Rational evaluateOnRoots(const CohomologyElement& e, const std::vector<Rational>& roots)
{
    // elementary symmetric polynomials of the roots
    std::array<Rational, 5> sym{1, 0, 0, 0, 0};
    for (const Rational& x : roots)
        for (int k = 4; k >= 1; --k) sym[k] += sym[k - 1] * x;
    Rational total = 0;
    for (const auto& [m, coeff] : e.terms()) {
        if (m.exp[static_cast<int>(Sym::p1)] || m.exp[static_cast<int>(Sym::p2)])
            throw std::invalid_argument("roots oracle only covers Chern classes");
        Rational term = coeff;
        for (int i = 0; i < 4; ++i) {
            const int p = m.exp[static_cast<int>(Sym::c1) + i];
            for (int t = 0; t < p; ++t) term *= sym[i + 1];
        }
        total += term;
    }
    return total;
}

AdjointBundleData suAdjointData(int rank)
{
    AdjointBundleData d;
    CohomologyElement endE = chEndE(rank);
    d.p1 = endE.gradePart(4);
    d.p1sqMinus2p2 = endE.gradePart(8) * Rational(12); // 12 ch4 = p1^2 - 2 p2
    d.dimG = rank * rank - 1;
    return d;
}

Rational indexGeneral(const ManifoldData& m, const AdjointBundleData& bundle,
                      ARoofDenominator den)
{
    CohomologyElement p1M = CohomologyElement::variable(Sym::p1);
    Rational coupling = m.evaluate(p1M * bundle.p1) / 24;
    Rational ch4term = m.evaluate(bundle.p1sqMinus2p2) / 12;
    return -Rational(bundle.dimG) * aRoofTwo(m, den) + coupling - ch4term;
}

Rational indexFixedDet(const ManifoldData& m, int rank, ARoofDenominator den)
{
    if (rank < 2) throw std::invalid_argument("rank must be >= 2");
    const Rational r(rank);
    CohomologyElement p1M = CohomologyElement::variable(Sym::p1);
    CohomologyElement p1g = CohomologyElement::variable(Sym::c1, 2) * (r - 1) -
                            CohomologyElement::variable(Sym::c2) * (2 * r);
    Rational topTerm = -(r * r - 1) * (Rational(1) - m.b1 + b27(m, den));
    return topTerm + m.evaluate(p1M * p1g) / 24 - m.evaluate(fixedDetCh4Polynomial(rank));
}

Rational indexRank2(const ManifoldData& m, ARoofDenominator den)
{
    CohomologyElement p1M = CohomologyElement::variable(Sym::p1);
    CohomologyElement p1g = CohomologyElement::variable(Sym::c1, 2) -
                            CohomologyElement::variable(Sym::c2) * Rational(4);
    Rational topTerm = Rational(-3) * (Rational(1) - m.b1 + b27(m, den));
    return topTerm + m.evaluate(p1M * p1g) / 24 - m.evaluate(rank2Ch4Polynomial());
}

Rational parseRational(const std::string& s)
{
    const auto slash = s.find('/');
    using boost::multiprecision::cpp_int;
    if (slash == std::string::npos) return Rational(cpp_int(s));
    cpp_int num(s.substr(0, slash));
    cpp_int den(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
}

std::string rationalToString(const Rational& r)
{
    std::ostringstream os;
    os << numerator(r);
    if (denominator(r) != 1) os << "/" << denominator(r);
    return os.str();
}

} // namespace spin7::charclass
