#pragma once

#include <string>
#include <string_view>

#include "qfluct/observables.hpp"
#include "qfluct/states.hpp"

namespace qfluct {

enum class URClass { rs_valid, cs_only, trivial_zero, rs_violated };

/// RS_VALID, CS_ONLY, TRIVIAL_ZERO, RS_VIOLATED
std::string to_string(URClass c);

struct URVerdict {
    std::string pair;
    double delta_a = 0.0;
    double delta_b = 0.0;
    /// delta_a * delta_b
    double lhs = 0.0;
    /// |C(A, B)|
    double cs_rhs = 0.0;
    /// |<[A, B]>| / 2
    double rs_rhs = 0.0;
    complex gap_ab;
    complex gap_ba;
    URClass cls = URClass::cs_only;
};

struct PairConditions {
    complex gap_ab;
    complex gap_ba;
    /// <[A, B]>
    complex commutator;
};

/// Classification, in order:
///   TRIVIAL_ZERO  when dA < tol or dB < tol;
///   RS_VIOLATED   when lhs < rs_rhs - tol;
///   RS_VALID      when both |gaps| < tol and rs_rhs >= tol;
///   CS_ONLY       otherwise (gaps open, or a commuting pair where only the
///                 Cauchy-Schwarz bound carries information).
URVerdict relation_verdict(const EstimatorSet& set, std::string_view a, std::string_view b,
                           const PairConditions& cond, double tol);

/// Computes estimators, both condition gaps and the commutator mean, then
/// classifies. `tol` <= 0 selects gap_tolerance(grid, hbar).
URVerdict audit_pair(const OperatorSpec& a, const OperatorSpec& b, const ComplexField& psi,
                     double hbar = 1.0, double tol = 0.0);

struct Determinant {
    double value = 0.0;
    bool nonnegative = true;
};

/// det[C_jk] for up to four observables; nonnegative means value >= -1e-8.
Determinant correlation_determinant(const EstimatorSet& set);

/// (hbar / 2) |1 - 2 pi |psi(2 pi - 0)|^2| for a circle state.
double boundary_rhs(const ComplexField& psi, double hbar = 1.0);

/// Analytic verdict for the energy-time pair: dt = 0, gap = -i hbar.
URVerdict energy_time_verdict(double delta_e, double hbar = 1.0);

/// Rotor gap written through the angular matrix elements:
///   i hbar {1 + 2 Im[sum c_m* c_r m (Y_lm, phi Y_lr)]}
/// with the matrix elements taken by quadrature on `grid`.
complex rotor_gap_reference(const DegenerateRotor& rotor, const GridPtr& grid, double hbar = 1.0);

}  // namespace qfluct
