#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qfluct/numgrid.hpp"
#include "qfluct/observables.hpp"
#include "qfluct/states.hpp"

namespace qfluct {

/// Gaussian transfer kernel along `axis`, scaled symmetrically (W_ij = d_i G_ij d_j)
/// until every row and column integrates to one. Width 0 gives the identity.
Kernel make_gaussian_kernel(const GridPtr& grid, double width, std::size_t axis = 0);

/// w_out(a) = integral G(a, a') w_in(a') da'
RealField classical_transform(const RealField& w_in, const Kernel& kernel);

/// -integral f ln f, nodes with f = 0 skipped.
double distribution_entropy(const RealField& f);

struct Indicator {
    std::string label;
    double value = 0.0;
};

/// Ordered list of named indicator values.
struct ErrorReport {
    std::vector<Indicator> entries;

    void add(std::string label, double value) { entries.push_back({std::move(label), value}); }
    bool has(std::string_view label) const;
    double get(std::string_view label) const;
};

/// eps_mean, eps_delta, eps_moment<n> for 3 <= n <= max_order, and the signed
/// entropy change eps_entropy = S(w_out) - S(w_in).
ErrorReport classical_error_indicators(const RealField& w_in, const RealField& w_out,
                                       int max_order = 4);

struct QuantumChannel {
    Kernel gamma;
    Kernel lambda;
    /// Speed scale dividing the current inside the current entropy.
    double upsilon = 1.0;
};

QuantumChannel make_quantum_channel(const GridPtr& grid, double gamma, double lambda,
                                    double upsilon);

/// lambda^2 < sigma^2 + 2 gamma^2; otherwise the out momentum spread diverges.
bool channel_valid(double sigma, double gamma, double lambda);
void require_channel_validity(double sigma, double gamma, double lambda);

/// rho_out = Gamma * rho_in, J_out = Lambda * J_in on a line grid.
DensityCurrent quantum_transform(const DensityCurrent& in, const QuantumChannel& channel);

/// Estimators of x, x2, p, p2 and H_osc rebuilt from a density and a current.
/// Each operator gets a local value a(x) = psi* A psi / rho written in rho, J:
///   p  -> (-i hbar rho' / 2 + m J) / rho
///   p2 -> -hbar^2 (sqrt rho)'' / sqrt rho - i hbar m J' / rho + m^2 J^2 / rho^2
/// so that <A> = int rho a and C_jk = int rho conj(a_j - <A_j>) (a_k - <A_k>).
EstimatorSet estimators_from_density_current(const DensityCurrent& dc,
                                             const std::vector<OperatorSpec>& ops, double mass,
                                             double hbar = 1.0);

/// eps_mean:A, eps_delta:A, eps_corr:A,B, the entropies S_rho_in/out,
/// S_J_in/out, the signed changes eps_S_rho and eps_S_J, and mu when both x
/// and p are present.
ErrorReport quantum_error_report(const EstimatorSet& in_set, const EstimatorSet& out_set,
                                 const DensityCurrent& in, const DensityCurrent& out,
                                 double upsilon, double hbar = 1.0);

}  // namespace qfluct
