#include "qfluct/pipeline.hpp"

#include <cmath>

namespace qfluct {

double default_upsilon(const GaussianPacket& packet, double mass, double hbar) {
    const double v = hbar * std::abs(packet.k) / mass;
    return v > 0.0 ? v : 1.0;
}

PacketChannelRun run_packet_channel(const PacketChannelParams& p) {
    validate_state(p.packet);
    if (!(p.gamma >= 0.0) || !(p.lambda >= 0.0)) throw DomainError("kernel widths must be non-negative");
    require_channel_validity(p.packet.sigma, p.gamma, p.lambda);

    const double upsilon = p.upsilon ? *p.upsilon : default_upsilon(p.packet, p.mass, p.hbar);
    const GridPtr grid = default_grid(p.packet, p.nodes, p.hbar, std::max(p.gamma, p.lambda));
    const ComplexField psi = sample(p.packet, grid, p.hbar);
    DensityCurrent in = density_and_current(psi, p.mass, p.hbar);
    const QuantumChannel channel = make_quantum_channel(grid, p.gamma, p.lambda, upsilon);
    DensityCurrent out = quantum_transform(in, channel);
    EstimatorSet in_set = estimators_from_density_current(in, p.ops, p.mass, p.hbar);
    EstimatorSet out_set = estimators_from_density_current(out, p.ops, p.mass, p.hbar);
    ErrorReport report = quantum_error_report(in_set, out_set, in, out, upsilon, p.hbar);
    PacketChannelRun run{grid,   upsilon,          std::move(in), std::move(out), std::move(in_set),
                         std::move(out_set), std::move(report), {}};

    auto& num = run.numeric;
    const std::size_t n = run.in_set.size();
    for (std::size_t k = 0; k < n; ++k) {
        const auto& l = run.in_set.labels[k];
        num.push_back({"mean_in:" + l, run.in_set.means[k], "numeric"});
        num.push_back({"mean_out:" + l, run.out_set.means[k], "numeric"});
        num.push_back({"delta_in:" + l, run.in_set.deltas[k], "numeric"});
        num.push_back({"delta_out:" + l, run.out_set.deltas[k], "numeric"});
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const std::string pair = run.in_set.labels[j] + "," + run.in_set.labels[k];
            const auto jj = static_cast<Eigen::Index>(j);
            const auto kk = static_cast<Eigen::Index>(k);
            num.push_back({"corr_in:" + pair, run.in_set.correlation(jj, kk), "numeric"});
            num.push_back({"corr_out:" + pair, run.out_set.correlation(jj, kk), "numeric"});
        }
    }
    for (const auto& e : run.report.entries) num.push_back({e.label, e.value, "numeric"});
    return run;
}

PacketChannelRun run_oscillator_channel(double mass, double omega, double gamma, double hbar,
                                        std::size_t nodes) {
    if (!(mass > 0.0) || !(omega > 0.0)) throw DomainError("oscillator needs m > 0 and omega > 0");
    PacketChannelParams p;
    p.packet = GaussianPacket{0.0, std::sqrt(hbar / (2.0 * mass * omega)), 0.0};
    p.gamma = gamma;
    p.lambda = gamma;
    p.mass = mass;
    p.hbar = hbar;
    p.nodes = nodes;
    OperatorSpec h{OpKind::H_osc, mass, omega};
    p.ops = {h};
    return run_packet_channel(p);
}

}  // namespace qfluct
