#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qfluct/numgrid.hpp"

namespace qfluct {

enum class OpKind {
    x,        ///< x.  (segment)
    x2,       ///< x^2 (segment)
    p,        ///< -i hbar d/dx
    p2,       ///< -hbar^2 d^2/dx^2
    phi,      ///< azimuthal angle as multiplier (circle, sphere, torsion segment)
    Lz,       ///< -i hbar d/dphi
    N,        ///< i d/dphi on the phase circle
    phase,    ///< phase angle as multiplier on the phase circle
    H_qtp,    ///< Lz^2 / 2I + I omega^2 phi^2 / 2
    H_osc,    ///< p^2 / 2m + m omega^2 x^2 / 2
    H_rotor,  ///< Lz^2 / 2I
    px,       ///< momentum along x for the rotated well frame
    py,       ///< momentum along y for the rotated well frame
};

/// An observable acting on sampled wave functions. `inertia` is the mass or
/// moment of inertia for the Hamiltonians; `omega` their angular frequency.
struct OperatorSpec {
    OpKind kind = OpKind::x;
    double inertia = 1.0;
    double omega = 1.0;

    int derivative_order() const;
    bool allowed_on(DomainKind domain) const;
};

/// `Lz`, `phi`, `N`, `phase`, `x`, `p`, `x2`, `p2`, `H_qtp`, `H_osc`, `H_rotor`,
/// `px`, `py`. Hamiltonians take optional parameters, e.g. `H_osc(m=1,omega=2)`,
/// `H_qtp(I=1,omega=1)`, `H_rotor(I=2)`.
OperatorSpec parse_operator(std::string_view text);
std::string format_operator(const OperatorSpec& op);
/// Bare name without parameters; used as estimator label.
std::string operator_name(const OperatorSpec& op);
/// Splits a comma-separated operator list, honoring parentheses.
std::vector<OperatorSpec> parse_operator_list(std::string_view text);

/// A psi for a single operator.
ComplexField apply(const OperatorSpec& op, const ComplexField& psi, double hbar = 1.0);
/// Product ops[0] ops[1] ... ops[n-1] psi evaluated right to left.
ComplexField apply(const std::vector<OperatorSpec>& ops, const ComplexField& psi,
                   double hbar = 1.0);

struct EstimatorSet {
    std::vector<std::string> labels;
    std::vector<complex> means;
    Eigen::MatrixXcd correlation;
    std::vector<double> deltas;

    std::size_t size() const { return labels.size(); }
    /// Index of `label`; throws DomainError if absent.
    std::size_t index(std::string_view label) const;
    double delta(std::string_view label) const { return deltas[index(label)]; }
    complex mean(std::string_view label) const { return means[index(label)]; }
    complex corr(std::string_view a, std::string_view b) const {
        return correlation(static_cast<Eigen::Index>(index(a)), static_cast<Eigen::Index>(index(b)));
    }
};

/// Fills deltas from the correlation diagonal.
void finish_estimators(EstimatorSet& set);

/// <A_j> = (psi, A_j psi), C_jk = (dA_j psi, dA_k psi), dA = A - <A>.
EstimatorSet estimator_set(const std::vector<OperatorSpec>& ops, const ComplexField& psi,
                           double hbar = 1.0);

/// (A psi, B psi) - (psi, A B psi).
complex condition_gap(const OperatorSpec& a, const OperatorSpec& b, const ComplexField& psi,
                      double hbar = 1.0);
/// <[A, B]> = (psi, A B psi) - (psi, B A psi).
complex commutator_mean(const OperatorSpec& a, const OperatorSpec& b, const ComplexField& psi,
                        double hbar = 1.0);

/// Default tolerance for a vanishing condition gap on this grid.
double gap_tolerance(const Grid& grid, double hbar = 1.0);

// ---------------------------------------------------------------------------
// Finite matrices

struct MatrixObservable {
    std::string label;
    Eigen::MatrixXcd matrix;

    MatrixObservable(std::string label, Eigen::MatrixXcd matrix);
};

class DensityMatrix {
public:
    explicit DensityMatrix(Eigen::MatrixXcd rho);
    const Eigen::MatrixXcd& matrix() const { return rho_; }
    Eigen::Index dimension() const { return rho_.rows(); }

private:
    Eigen::MatrixXcd rho_;
};

/// <A> = Tr(A rho), C(A, B) = Tr(dA dB rho).
EstimatorSet matrix_estimator_set(const std::vector<MatrixObservable>& obs,
                                  const DensityMatrix& rho);

/// Total spin magnetization M_x, M_y, M_z for n spin-1/2 with gyromagnetic
/// factor gamma, dimension 2^n.
std::vector<MatrixObservable> magnetization_operators(int n_spins, double gamma,
                                                      double hbar = 1.0);

/// Largest entry of |[M_a, M_b] - i hbar gamma eps_abc M_c| over all a, b.
double magnetization_commutator_residual(const std::vector<MatrixObservable>& m, double gamma,
                                         double hbar = 1.0);

}  // namespace qfluct
