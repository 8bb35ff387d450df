#pragma once

#include <optional>
#include <vector>

#include "qfluct/channel.hpp"
#include "qfluct/states.hpp"

namespace qfluct {

struct PacketChannelParams {
    GaussianPacket packet;
    double gamma = 0.0;
    double lambda = 0.0;
    double mass = 1.0;
    double hbar = 1.0;
    /// Defaults to hbar k / m, or 1 when k = 0.
    std::optional<double> upsilon;
    std::size_t nodes = 0;
    std::vector<OperatorSpec> ops{{OpKind::x}, {OpKind::p}};
};

/// Sampled packet pushed through a Gaussian channel, with in/out estimators
/// rebuilt from density and current.
struct PacketChannelRun {
    GridPtr grid;
    double upsilon = 1.0;
    DensityCurrent in;
    DensityCurrent out;
    EstimatorSet in_set;
    EstimatorSet out_set;
    ErrorReport report;
    /// mean_in:A, mean_out:A, delta_in:A, delta_out:A, corr_in:A,B,
    /// corr_out:A,B followed by every report entry.
    std::vector<CardEntry> numeric;
};

double default_upsilon(const GaussianPacket& packet, double mass, double hbar);

/// Throws ValidityError when lambda^2 >= sigma^2 + 2 gamma^2.
PacketChannelRun run_packet_channel(const PacketChannelParams& params);

/// Oscillator ground state (x0 = 0, k = 0, sigma^2 = hbar / 2 m omega) observed
/// through a channel with lambda = gamma, estimator H_osc.
PacketChannelRun run_oscillator_channel(double mass, double omega, double gamma, double hbar = 1.0,
                                        std::size_t nodes = 0);

}  // namespace qfluct
