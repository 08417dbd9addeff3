#pragma once

#include <string>

#include "spin7/clifford.hpp"
#include "spin7/structure_field.hpp"

namespace spin7 {

/// U(1) instanton problem data: structure field, constant curvature
/// representative F0 (2 pi integral periods), field truncation radius.
struct U1Problem {
    StructureField structure = StructureField::standard();
    KForm F0{2};
    int K = 2;

    double period() const { return structure.period(); }
};

/// Validates the 2 pi integrality of F0's periods (lattice normalization:
/// coeff * (period / 2 pi)^2 must lie in 2 pi Z).
void validateChernIntegrality(const U1Problem& p, double tol = 1e-9);

struct ModuliReport {
    std::string status; // "solved" | "empty"
    FourierField solution;
    int harmonicTorusDim = 0;
    double obstructionNorm = 0;
    long kernelDim = 0;
    long cokernelDim = 0;
    long index = 0;
    double instantonResidual = 0; // RMS of P_Omega(F0 + da) for the solution
    double conditionNumber = 0;   // of the solved block, above its kernel
};

/// Per-mode block of the flat deformation operator a -> (d*a, pi_7(da)),
/// rows ordered as [Lambda^0 ; Lambda^2_7 coords]; 8x8 complex.
Eigen::Matrix<std::complex<double>, 8, 8> flatModeBlock(const WaveVector& k, double period,
                                                        const ProjectorSet& ps);

struct ModeSweepResult {
    long totalModes = 0;
    long kernelDim = 0;
    long cokernelDim = 0;
    long index = 0;
    std::vector<WaveVector> kernelModes; // modes contributing kernel (k = 0 expected)
};

/// Rank sweep of the flat operator over all modes with |k|_inf <= K.
/// OpenMP-parallel with a serial reference path (deterministic merge).
ModeSweepResult sweepFlatDeformationOperator(int K, double period, const ProjectorSet& ps);

/// Affine solve of P_Omega(F0 + da) = 0, d*a = 0 per mode/fiber.
ModuliReport solveU1Moduli(const U1Problem& p);

struct SymbolComplexReport {
    bool applicable = false;
    int rankDelta1 = 0;
    int rankDelta2 = 0;
    int kerDelta2Dim = 0;
    double composeNorm = 0;      // ||delta2 . delta1||
    double exactnessResidual = 0; // ker(delta2) against im(delta1)
};

/// Exactness of 0 -> Lambda^0 -> Lambda^1 -> Lambda^2_7 -> 0 at a nonzero
/// covector (rank-1 abelian case).
SymbolComplexReport symbolComplexCheck(const KForm& xi, const ProjectorSet& ps);

/// Flat-case Dirac decomposition: mode-wise Clifford symbol of the Dirac
/// operator against (d* tau).eta + pi_7(d tau).eta; max relative residual
/// over `samples` random modes and coefficients.
double diracDecompositionCheck(const CliffordRep& rep, const ProjectorSet& ps,
                               const Spinor& eta, int samples, std::uint64_t seed,
                               double period = 2 * M_PI);

/// Yang-Mills-type action of A = A0 + a (F = F0 + da):
/// integral of <F,F> dvol + (F ∧ F ∧ Omega).
double u1Action(const FourierField& a, const U1Problem& p);

/// Euler-Lagrange field d*F - *(F ∧ W) (vanishes on instantons).
FourierField u1EulerLagrange(const FourierField& a, const U1Problem& p);

/// Volume-averaged L2 norm of the Euler-Lagrange field.
double u1EulerLagrangeResidual(const FourierField& a, const U1Problem& p);

/// RMS of the pointwise instanton defect P_Omega(x)(F(x)).
double instantonResidual(const FourierField& a, const U1Problem& p);

/// Max relative error between the finite-difference directional derivative
/// of the action and the assembled Euler-Lagrange pairing, over every real
/// degree of freedom of `a`'s mode set.
double actionGradientCheck(const FourierField& a, const U1Problem& p, double step = 1e-4);

/// d* for fields over a (possibly variable) structure; flat fast path.
FourierField coDeriv(const FourierField& f, const StructureField& s);

/// L2 inner product of two real fields for the structure's metric.
double innerProductL2(const FourierField& a, const FourierField& b, const StructureField& s);

} // namespace spin7
