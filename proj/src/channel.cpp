#include "qfluct/channel.hpp"

#include <algorithm>
#include <cmath>

namespace qfluct {

namespace {

constexpr int sinkhorn_max_iterations = 20000;
constexpr double sinkhorn_tolerance = 1e-14;

void require_line(const Grid& g, const char* what) {
    if (g.rank() != 1) throw DomainError(std::string(what) + " needs a one-dimensional grid");
}

double moment(const RealField& w, double center, int n) {
    const Grid& g = w.grid();
    const auto q = g.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += q[i] * w[i] * std::pow(g.coordinate(i, 0) - center, n);
    return s;
}

void require_normalized(const RealField& w, const char* what) {
    const double total = integrate(w);
    if (std::abs(total - 1.0) > 1e-8) {
        throw DomainError(std::string(what) + " is not normalized (integral " + std::to_string(total) + ")");
    }
}

}  // namespace

Kernel make_gaussian_kernel(const GridPtr& grid, double width, std::size_t axis) {
    if (!grid) throw DomainError("kernel needs a grid");
    if (!(width >= 0.0) || !std::isfinite(width)) {
        throw DomainError("kernel width must be finite and non-negative");
    }
    if (width == 0.0) return Kernel::identity(grid, axis);
    const Axis& a = grid->axis(axis);
    if (width > a.span() / 4.0) {
        throw DomainError("kernel width exceeds a quarter of the domain span");
    }

    const std::size_t n = a.size();
    const auto& q = a.weights;
    std::vector<double> g(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d = (a.nodes[i] - a.nodes[j]) / width;
            g[i * n + j] = std::exp(-0.5 * d * d);
        }
    }

    std::vector<double> d(n, 1.0 / std::sqrt(std::sqrt(two_pi) * width));
    std::vector<double> row(n);
    for (int it = 0; it < sinkhorn_max_iterations; ++it) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            const double* gi = &g[i * n];
            for (std::size_t j = 0; j < n; ++j) s += gi[j] * q[j] * d[j];
            row[i] = s;
            worst = std::max(worst, std::abs(d[i] * s - 1.0));
        }
        if (worst < sinkhorn_tolerance) break;
        for (std::size_t i = 0; i < n; ++i) d[i] = std::sqrt(d[i] / row[i]);
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) g[i * n + j] *= d[i] * d[j];
    }
    return Kernel(grid, axis, width, std::move(g));
}

RealField classical_transform(const RealField& w_in, const Kernel& kernel) {
    require_normalized(w_in, "input distribution");
    RealField out = convolve(kernel, w_in);
    const double floor = -1e-12 * std::max(1.0, *std::max_element(out.values().begin(), out.values().end()));
    for (double v : out.values()) {
        if (v < floor) throw DomainError("kernel produced a negative probability");
    }
    return out;
}

double distribution_entropy(const RealField& f) {
    const auto q = f.grid().weights();
    double peak = 0.0;
    for (double v : f.values()) peak = std::max(peak, v);
    const double floor = -1e-12 * std::max(1.0, peak);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double v = f[i];
        if (v < floor) throw DomainError("entropy of a field with negative values");
        if (v > 0.0) s -= q[i] * v * std::log(v);
    }
    return s;
}

bool ErrorReport::has(std::string_view label) const {
    return std::any_of(entries.begin(), entries.end(), [&](const Indicator& e) { return e.label == label; });
}

double ErrorReport::get(std::string_view label) const {
    for (const auto& e : entries) {
        if (e.label == label) return e.value;
    }
    throw DomainError("error report has no entry '" + std::string(label) + "'");
}

ErrorReport classical_error_indicators(const RealField& w_in, const RealField& w_out, int max_order) {
    if (max_order > 6) throw DomainError("moment order above 6 is not supported");
    require_conforming(w_in.grid(), w_out.grid(), "classical indicators");
    require_line(w_in.grid(), "classical indicators");
    require_normalized(w_in, "input distribution");
    require_normalized(w_out, "output distribution");

    const double mean_in = moment(w_in, 0.0, 1);
    const double mean_out = moment(w_out, 0.0, 1);
    ErrorReport r;
    r.add("eps_mean", std::abs(mean_out - mean_in));
    r.add("eps_delta", std::abs(std::sqrt(moment(w_out, mean_out, 2)) - std::sqrt(moment(w_in, mean_in, 2))));
    for (int n = 3; n <= max_order; ++n) {
        r.add("eps_moment" + std::to_string(n), std::abs(moment(w_out, mean_out, n) - moment(w_in, mean_in, n)));
    }
    r.add("eps_entropy", distribution_entropy(w_out) - distribution_entropy(w_in));
    return r;
}

QuantumChannel make_quantum_channel(const GridPtr& grid, double gamma, double lambda, double upsilon) {
    if (!(upsilon > 0.0) || !std::isfinite(upsilon)) throw DomainError("upsilon must be positive");
    require_line(*grid, "quantum channel");
    return QuantumChannel{make_gaussian_kernel(grid, gamma), make_gaussian_kernel(grid, lambda), upsilon};
}

bool channel_valid(double sigma, double gamma, double lambda) {
    return lambda * lambda < sigma * sigma + 2.0 * gamma * gamma;
}

void require_channel_validity(double sigma, double gamma, double lambda) {
    if (!channel_valid(sigma, gamma, lambda)) {
        throw ValidityError("channel needs lambda^2 < sigma^2 + 2 gamma^2 (sigma=" + std::to_string(sigma) +
                            ", gamma=" + std::to_string(gamma) + ", lambda=" + std::to_string(lambda) + ")");
    }
}

DensityCurrent quantum_transform(const DensityCurrent& in, const QuantumChannel& channel) {
    require_line(in.density.grid(), "quantum transform");
    if (in.current.size() != 1) throw DomainError("quantum transform needs one current component");
    require_normalized(in.density, "input density");
    return DensityCurrent{convolve(channel.gamma, in.density), {convolve(channel.lambda, in.current[0])}};
}

EstimatorSet estimators_from_density_current(const DensityCurrent& dc, const std::vector<OperatorSpec>& ops,
                                             double mass, double hbar) {
    if (!(mass > 0.0) || !(hbar > 0.0)) throw DomainError("mass and hbar must be positive");
    const RealField& rho = dc.density;
    const Grid& g = rho.grid();
    require_line(g, "density-current estimators");
    if (dc.current.size() != 1) throw DomainError("expected one current component");
    const RealField& J = dc.current[0];
    require_conforming(g, J.grid(), "density-current estimators");
    require_normalized(rho, "density");

    const std::size_t n = rho.size();
    double rho_max = 0.0;
    double j_max = 0.0;
    std::vector<double> root(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rho[i] < -1e-12) throw DomainError("negative density");
        rho_max = std::max(rho_max, rho[i]);
        j_max = std::max(j_max, std::abs(J[i]));
        root[i] = std::sqrt(std::max(0.0, rho[i]));
    }
    const RealField d_rho = differentiate(rho, 1);
    const RealField d_j = differentiate(J, 1);
    const RealField d2_root = differentiate(RealField(rho.grid_ptr(), root), 2);

    // Nodes whose density is negligible carry no weight; they are only safe to
    // drop when the current vanishes there as well.
    const double rho_floor = 1e-14 * rho_max;
    std::vector<bool> active(n, true);
    for (std::size_t i = 0; i < n; ++i) {
        if (rho[i] < rho_floor) {
            if (std::abs(J[i]) > 1e-7 * j_max) {
                throw DomainError("current does not vanish where the density does");
            }
            active[i] = false;
        }
    }

    const complex I(0.0, 1.0);
    auto local_value = [&](const OperatorSpec& op, std::size_t i) -> complex {
        const double x = g.coordinate(i, 0);
        const double r = rho[i];
        auto p_loc = [&] { return (-0.5 * I * hbar * d_rho[i] + mass * J[i]) / r; };
        auto p2_loc = [&] {
            return -hbar * hbar * d2_root[i] / root[i] - I * hbar * mass * d_j[i] / r +
                   mass * mass * J[i] * J[i] / (r * r);
        };
        switch (op.kind) {
            case OpKind::x: return x;
            case OpKind::x2: return x * x;
            case OpKind::p: return p_loc();
            case OpKind::p2: return p2_loc();
            case OpKind::H_osc:
                return p2_loc() / (2.0 * op.inertia) + 0.5 * op.inertia * op.omega * op.omega * x * x;
            default:
                throw DomainError("operator " + operator_name(op) +
                                  " cannot be evaluated from density and current");
        }
    };

    const std::size_t r = ops.size();
    const auto q = g.weights();
    std::vector<std::vector<complex>> loc(r, std::vector<complex>(n, 0.0));
    EstimatorSet set;
    for (std::size_t k = 0; k < r; ++k) {
        complex mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            loc[k][i] = local_value(ops[k], i);
            mean += q[i] * rho[i] * loc[k][i];
        }
        set.labels.push_back(operator_name(ops[k]));
        set.means.push_back(mean);
        for (std::size_t i = 0; i < n; ++i) {
            if (active[i]) loc[k][i] -= mean;
        }
    }
    set.correlation.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t k = j; k < r; ++k) {
            complex c = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (active[i]) c += q[i] * rho[i] * std::conj(loc[j][i]) * loc[k][i];
            }
            const auto jj = static_cast<Eigen::Index>(j);
            const auto kk = static_cast<Eigen::Index>(k);
            set.correlation(jj, kk) = j == k ? complex(c.real(), 0.0) : c;
            set.correlation(kk, jj) = std::conj(set.correlation(jj, kk));
        }
    }
    finish_estimators(set);
    return set;
}

namespace {

double current_entropy(const RealField& J, double upsilon) {
    std::vector<double> f(J.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::abs(J[i]) / upsilon;
    return distribution_entropy(RealField(J.grid_ptr(), std::move(f)));
}

}  // namespace

ErrorReport quantum_error_report(const EstimatorSet& in_set, const EstimatorSet& out_set, const DensityCurrent& in,
                                 const DensityCurrent& out, double upsilon, double hbar) {
    if (!(upsilon > 0.0) || !std::isfinite(upsilon)) throw DomainError("upsilon must be positive");
    if (in_set.labels != out_set.labels) throw DomainError("estimator sets do not conform");
    require_conforming(in.density.grid(), out.density.grid(), "error report");
    if (in.current.size() != 1 || out.current.size() != 1) throw DomainError("expected one current component");

    ErrorReport r;
    const std::size_t n = in_set.size();
    for (std::size_t k = 0; k < n; ++k) {
        r.add("eps_mean:" + in_set.labels[k], std::abs(out_set.means[k] - in_set.means[k]));
    }
    for (std::size_t k = 0; k < n; ++k) {
        r.add("eps_delta:" + in_set.labels[k], std::abs(out_set.deltas[k] - in_set.deltas[k]));
    }
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = j + 1; k < n; ++k) {
            const auto jj = static_cast<Eigen::Index>(j);
            const auto kk = static_cast<Eigen::Index>(k);
            r.add("eps_corr:" + in_set.labels[j] + "," + in_set.labels[k],
                  std::abs(out_set.correlation(jj, kk) - in_set.correlation(jj, kk)));
        }
    }
    const double s_rho_in = distribution_entropy(in.density);
    const double s_rho_out = distribution_entropy(out.density);
    const double s_j_in = current_entropy(in.current[0], upsilon);
    const double s_j_out = current_entropy(out.current[0], upsilon);
    r.add("S_rho_in", s_rho_in);
    r.add("S_rho_out", s_rho_out);
    r.add("eps_S_rho", s_rho_out - s_rho_in);
    r.add("S_J_in", s_j_in);
    r.add("S_J_out", s_j_out);
    r.add("eps_S_J", s_j_out - s_j_in);
    if (r.has("eps_delta:x") && r.has("eps_delta:p")) {
        r.add("mu", r.get("eps_delta:x") * r.get("eps_delta:p") / hbar);
    }
    return r;
}

}  // namespace qfluct
