#pragma once

#include <map>
#include <string>
#include <vector>

#include "qfluct/states.hpp"

namespace qfluct {

/// Closed-form values for the Gaussian-packet and oscillator channel runs.
/// Labels follow the numeric pipeline: `mean_in:x`, `delta_out:p`,
/// `corr_in:x,p`, `eps_delta:x`, `eps_S_rho`, ...
struct OracleCard {
    std::map<std::string, double> parameters;
    std::vector<CardEntry> entries;

    complex at(const std::string& label) const;
};

/// Momentum spread after a Gaussian channel with density width gamma and
/// current width lambda.
double gaussian_out_momentum_spread(double sigma, double k, double gamma, double lambda,
                                    double hbar);

OracleCard gaussian_packet_oracle(double x0, double sigma, double k, double gamma,
                                  double lambda, double hbar = 1.0, double mass = 1.0);

OracleCard oscillator_oracle(double mass, double omega, double gamma, double hbar = 1.0);

struct CheckRow {
    std::string label;
    complex expected;
    complex actual;
    /// Relative error, or absolute error when the expected value is zero.
    double error = 0.0;
    bool pass = false;
};

struct CheckReport {
    std::vector<CheckRow> rows;
    bool pass = true;
};

/// Compares every oracle entry to the numeric value of the same label.
/// Throws DomainError when a label is missing from `numeric`.
CheckReport crosscheck(const OracleCard& oracle, const std::vector<CardEntry>& numeric,
                       double rel_tol);

}  // namespace qfluct
