#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qfluct/states.hpp"

namespace qfluct {

/// Flat table produced by a property sweep. Each row carries its own verdict.
struct SweepTable {
    std::string kind;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<bool> row_pass;
    /// Smallest margin seen (property value minus its bound); negative means a failure.
    double worst_margin = 0.0;

    bool pass() const;
    void add(std::vector<std::string> row, bool ok, double margin);
};

/// Representative catalog states, one or more per kind.
std::vector<StateSpec> catalog_states();

/// Random (distribution, kernel width) pairs: classical entropy change and the
/// density entropy change of a Gaussian packet through a Gaussian channel.
SweepTable entropy_sweep(int cases, std::uint64_t seed, double hbar = 1.0);

/// Random smooth periodic circle states: |C(Lz, phi)| against the boundary bound,
/// and the gap identity gap = i hbar 2 pi |psi(2 pi - 0)|^2.
SweepTable boundary_sweep(int cases, std::uint64_t seed, std::size_t nodes = 0, double hbar = 1.0);

/// Correlation determinants for observable sets of size 1..3 on every catalog state.
SweepTable determinant_sweep(double hbar = 1.0);

/// Random rotor coefficients; reports dLz * dphi against hbar / 2.
SweepTable rotor_search(int cases, std::uint64_t seed, std::size_t theta_nodes = 0,
                        double hbar = 1.0);

/// Random density matrices on n = 1..n_max spins: dA dB >= |C(A, B)| for the
/// magnetization components and a random Hermitian pair.
SweepTable density_matrix_sweep(int cases_per_n, int n_max, std::uint64_t seed, double hbar = 1.0);

/// Verdict classes on the default grid and on one with half the spacing.
SweepTable stability_sweep(double hbar = 1.0);

}  // namespace qfluct
