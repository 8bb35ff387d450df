#include "qfluct/annex_oracle.hpp"

#include <cmath>

namespace qfluct {

complex OracleCard::at(const std::string& label) const {
    for (const auto& e : entries) {
        if (e.label == label) return e.value;
    }
    throw DomainError("oracle card has no entry '" + label + "'");
}

double gaussian_out_momentum_spread(double sigma, double k, double gamma, double lambda,
                                    double hbar) {
    const double s2 = sigma * sigma;
    const double g2 = gamma * gamma;
    const double l2 = lambda * lambda;
    const double inner = k * k * (s2 + g2) / std::sqrt((s2 + l2) * (s2 + 2.0 * g2 - l2)) - k * k +
                         1.0 / (4.0 * (s2 + g2));
    return hbar * std::sqrt(inner);
}

OracleCard gaussian_packet_oracle(double x0, double sigma, double k, double gamma, double lambda,
                                  double hbar, double mass) {
    if (!(sigma > 0.0)) throw DomainError("oracle needs sigma > 0");
    if (!(gamma >= 0.0) || !(lambda >= 0.0)) throw DomainError("kernel widths must be non-negative");
    if (!(hbar > 0.0) || !(mass > 0.0)) throw DomainError("hbar and mass must be positive");
    if (!(lambda * lambda < sigma * sigma + 2.0 * gamma * gamma)) {
        throw ValidityError("oracle needs lambda^2 < sigma^2 + 2 gamma^2");
    }

    OracleCard card;
    card.parameters = {{"x0", x0},     {"sigma", sigma}, {"k", k},     {"gamma", gamma},
                       {"lambda", lambda}, {"hbar", hbar},   {"m", mass}};
    auto add = [&](std::string label, complex v, std::string src) {
        card.entries.push_back({std::move(label), v, std::move(src)});
    };
    const complex c_xp(0.0, 0.5 * hbar);
    const double dx_in = sigma;
    const double dx_out = std::sqrt(sigma * sigma + gamma * gamma);
    const double dp_in = hbar / (2.0 * sigma);
    const double dp_out = gaussian_out_momentum_spread(sigma, k, gamma, lambda, hbar);

    add("mean_in:x", x0, "packet-means");
    add("mean_out:x", x0, "packet-means");
    add("mean_in:p", hbar * k, "packet-means");
    add("mean_out:p", hbar * k, "packet-means");
    add("corr_in:x,p", c_xp, "packet-correlation");
    add("corr_out:x,p", c_xp, "packet-correlation");
    add("delta_in:x", dx_in, "position-spread");
    add("delta_out:x", dx_out, "position-spread");
    add("delta_in:p", dp_in, "momentum-spread-in");
    add("delta_out:p", dp_out, "momentum-spread-out");
    add("eps_mean:x", 0.0, "mean-indicators");
    add("eps_mean:p", 0.0, "mean-indicators");
    add("eps_corr:x,p", 0.0, "mean-indicators");
    add("eps_delta:x", dx_out - dx_in, "position-indicator");
    add("eps_delta:p", std::abs(dp_out - dp_in), "momentum-indicator");
    add("eps_S_rho", 0.5 * std::log1p(gamma * gamma / (sigma * sigma)), "density-entropy");
    add("eps_S_J", 0.5 * std::log1p(lambda * lambda / (sigma * sigma)), "current-entropy");
    return card;
}

OracleCard oscillator_oracle(double mass, double omega, double gamma, double hbar) {
    if (!(mass > 0.0) || !(omega > 0.0)) throw DomainError("oracle needs m > 0 and omega > 0");
    if (!(gamma >= 0.0)) throw DomainError("gamma must be non-negative");
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");

    OracleCard card;
    card.parameters = {{"m", mass}, {"omega", omega}, {"gamma", gamma}, {"hbar", hbar}};
    const double g2 = gamma * gamma;
    const double u = hbar + 2.0 * mass * omega * g2;
    const double mean_in = 0.5 * hbar * omega;
    const double mean_out = omega * (hbar * hbar + u * u) / (4.0 * u);
    const double delta_out = std::sqrt(2.0) * mass * omega * omega * g2 * (hbar + mass * omega * g2) / u;

    card.entries = {
        {"mean_in:H_osc", mean_in, "ground-energy"},
        {"delta_in:H_osc", 0.0, "ground-energy"},
        {"mean_out:H_osc", mean_out, "blurred-energy-mean"},
        {"delta_out:H_osc", delta_out, "blurred-energy-spread"},
        {"eps_mean:H_osc", std::abs(mean_out - mean_in), "energy-indicators"},
        {"eps_delta:H_osc", delta_out, "energy-indicators"},
    };
    return card;
}

CheckReport crosscheck(const OracleCard& oracle, const std::vector<CardEntry>& numeric,
                       double rel_tol) {
    CheckReport report;
    for (const auto& e : oracle.entries) {
        const CardEntry* match = nullptr;
        for (const auto& n : numeric) {
            if (n.label == e.label) match = &n;
        }
        if (!match) throw DomainError("numeric report lacks '" + e.label + "'");
        CheckRow row{e.label, e.value, match->value, 0.0, false};
        const double diff = std::abs(match->value - e.value);
        const double scale = std::abs(e.value);
        row.error = scale > 0.0 ? diff / scale : diff;
        row.pass = std::isfinite(row.error) && row.error <= rel_tol;
        report.pass = report.pass && row.pass;
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace qfluct
