#include "qfluct/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qfluct/channel.hpp"
#include "qfluct/pipeline.hpp"
#include "qfluct/report.hpp"
#include "qfluct/urelations.hpp"

namespace qfluct {

bool SweepTable::pass() const {
    return std::all_of(row_pass.begin(), row_pass.end(), [](bool b) { return b; });
}

void SweepTable::add(std::vector<std::string> row, bool ok, double margin) {
    if (rows.empty()) {
        worst_margin = margin;
    } else {
        worst_margin = std::min(worst_margin, margin);
    }
    rows.push_back(std::move(row));
    row_pass.push_back(ok);
}

namespace {

std::string num(double v) { return format_number(v); }
std::string yes_no(bool b) { return b ? "PASS" : "FAIL"; }

DegenerateRotor single_rotor(int l, int m) {
    DegenerateRotor r{l, std::vector<complex>(2 * l + 1, 0.0)};
    r.c[m + l] = 1.0;
    return r;
}

/// Observables that make sense for each catalog state.
std::vector<OperatorSpec> natural_operators(const StateSpec& spec) {
    switch (spec.index()) {
        case 0: return {{OpKind::Lz}, {OpKind::phi}, {OpKind::H_rotor}};
        case 1: return {{OpKind::N}, {OpKind::phase}};
        case 2: {
            const auto& q = std::get<TorsionPendulum>(spec);
            return {{OpKind::Lz}, {OpKind::phi}, {OpKind::H_qtp, q.I, q.omega}};
        }
        case 3: return {{OpKind::Lz}, {OpKind::phi}, {OpKind::H_rotor}};
        case 4: return {{OpKind::x}, {OpKind::p}, {OpKind::H_osc}};
        case 5: return {{OpKind::px}, {OpKind::py}};
        default: return {};
    }
}

/// Default audited pair per catalog state.
std::pair<OperatorSpec, OperatorSpec> natural_pair(const StateSpec& spec) {
    auto ops = natural_operators(spec);
    return {ops.at(0), ops.at(1)};
}

std::size_t coarse_nodes(const StateSpec& spec) {
    // Sphere sweeps run on a lighter grid than single audits.
    return spec.index() == 3 ? 32 : 0;
}

std::complex<double> normal_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

}  // namespace

std::vector<StateSpec> catalog_states() {
    DegenerateRotor mixed{2, {0.0, complex(0.6, 0.0), 0.0, complex(0.0, 0.8), 0.0}};
    return {
        AzimuthalEigenstate{-2},
        AzimuthalEigenstate{1},
        AzimuthalEigenstate{3},
        PhaseEigenstate{0},
        PhaseEigenstate{2},
        TorsionPendulum{0, 1.0, 1.0},
        TorsionPendulum{1, 1.0, 1.0},
        TorsionPendulum{2, 2.0, 0.5},
        TorsionPendulum{3, 1.0, 1.0},
        single_rotor(1, 1),
        mixed,
        GaussianPacket{0.0, 1.0, 1.0},
        GaussianPacket{0.5, 0.7, -2.0},
        Box2DGround{1.0, 2.0},
    };
}

SweepTable entropy_sweep(int cases, std::uint64_t seed, double hbar) {
    SweepTable t;
    t.kind = "entropy";
    t.header = {"case", "kernel_width", "eps_S_w", "sigma", "gamma", "lambda", "eps_S_rho", "status"};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto line = Grid::segment(-10.0, 10.0, 512);

    for (int c = 0; c < cases; ++c) {
        const int parts = 1 + static_cast<int>(u(rng) * 3.0);
        std::vector<double> centers, widths, weights;
        for (int k = 0; k < parts; ++k) {
            centers.push_back(-4.0 + 8.0 * u(rng));
            widths.push_back(0.3 + 1.2 * u(rng));
            weights.push_back(0.2 + u(rng));
        }
        std::vector<double> w(line->size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double x = line->coordinate(i, 0);
            for (int k = 0; k < parts; ++k) {
                const double d = (x - centers[k]) / widths[k];
                w[i] += weights[k] * std::exp(-0.5 * d * d) / widths[k];
            }
        }
        RealField raw(line, w);
        const double total = integrate(raw);
        for (auto& v : w) v /= total;
        RealField w_in(line, std::move(w));
        const double width = 0.05 + 1.95 * u(rng);
        const RealField w_out = classical_transform(w_in, make_gaussian_kernel(line, width));
        const double eps_w = classical_error_indicators(w_in, w_out).get("eps_entropy");

        PacketChannelParams p;
        p.packet = GaussianPacket{-1.0 + 2.0 * u(rng), 0.5 + 1.5 * u(rng), -2.0 + 4.0 * u(rng)};
        p.gamma = 0.05 + 1.45 * u(rng);
        p.lambda = p.gamma * u(rng);
        p.hbar = hbar;
        p.nodes = 512;
        const auto run = run_packet_channel(p);
        const double eps_rho = run.report.get("eps_S_rho");

        const double margin = std::min(eps_w, eps_rho);
        const bool ok = margin >= -1e-6;
        t.add({std::to_string(c), num(width), num(eps_w), num(p.packet.sigma), num(p.gamma), num(p.lambda),
               num(eps_rho), yes_no(ok)},
              ok, margin);
    }
    return t;
}

SweepTable boundary_sweep(int cases, std::uint64_t seed, std::size_t nodes, double hbar) {
    SweepTable t;
    t.kind = "boundary";
    t.header = {"case", "abs_C", "bound", "margin", "gap_im", "gap_identity_err", "status"};
    std::mt19937_64 rng(seed);
    auto grid = Grid::circle(nodes ? nodes : 2048);
    const OperatorSpec lz{OpKind::Lz};
    const OperatorSpec phi{OpKind::phi};

    for (int c = 0; c < cases; ++c) {
        std::vector<complex> coeff(7);
        double norm = 0.0;
        for (auto& z : coeff) {
            z = normal_complex(rng);
            norm += std::norm(z);
        }
        for (auto& z : coeff) z /= std::sqrt(norm);
        std::vector<complex> v(grid->size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double ph = grid->coordinate(i, 0);
            for (int m = -3; m <= 3; ++m) v[i] += coeff[m + 3] * std::polar(1.0 / std::sqrt(two_pi), m * ph);
        }
        ComplexField psi(grid, std::move(v));
        const EstimatorSet set = estimator_set({lz, phi}, psi, hbar);
        const double abs_c = std::abs(set.correlation(0, 1));
        const double bound = boundary_rhs(psi, hbar);
        const complex gap = condition_gap(lz, phi, psi, hbar);
        const complex identity(0.0, hbar * two_pi * std::norm(upper_limit(psi)));
        const double gap_err = std::abs(gap - identity);
        const double margin = abs_c - bound;
        const bool ok = margin >= -1e-3 && gap_err < 1e-3;
        t.add({std::to_string(c), num(abs_c), num(bound), num(margin), num(gap.imag()), num(gap_err), yes_no(ok)},
              ok, std::min(margin, 1e-3 - gap_err));
    }
    return t;
}

SweepTable determinant_sweep(double hbar) {
    SweepTable t;
    t.kind = "determinant";
    t.header = {"state", "observables", "determinant", "status"};
    for (const auto& spec : catalog_states()) {
        const auto grid = default_grid(spec, coarse_nodes(spec), hbar);
        const ComplexField psi = sample(spec, grid, hbar);
        const auto ops = natural_operators(spec);
        const std::size_t n = ops.size();
        for (unsigned mask = 1; mask < (1u << n); ++mask) {
            std::vector<OperatorSpec> subset;
            std::string names;
            for (std::size_t k = 0; k < n; ++k) {
                if (mask & (1u << k)) {
                    subset.push_back(ops[k]);
                    names += (names.empty() ? "" : " ") + operator_name(ops[k]);
                }
            }
            const Determinant d = correlation_determinant(estimator_set(subset, psi, hbar));
            t.add({format_state(spec), names, num(d.value), yes_no(d.nonnegative)}, d.nonnegative,
                  d.value + 1e-8);
        }
    }
    return t;
}

SweepTable rotor_search(int cases, std::uint64_t seed, std::size_t theta_nodes, double hbar) {
    SweepTable t;
    t.kind = "rotor";
    t.header = {"case", "state", "delta_Lz", "delta_phi", "lhs", "half_hbar", "prohibited_holds",
                "gap_im", "reference_gap_im"};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick_l(1, 3);
    const OperatorSpec lz{OpKind::Lz};
    const OperatorSpec phi{OpKind::phi};
    for (int c = 0; c < cases; ++c) {
        DegenerateRotor r;
        r.l = pick_l(rng);
        double norm = 0.0;
        for (int m = -r.l; m <= r.l; ++m) {
            r.c.push_back(normal_complex(rng));
            norm += std::norm(r.c.back());
        }
        for (auto& z : r.c) z /= std::sqrt(norm);

        const auto grid = default_grid(r, theta_nodes ? theta_nodes : 32, hbar);
        const ComplexField psi = sample(r, grid, hbar);
        const EstimatorSet set = estimator_set({lz, phi}, psi, hbar);
        const double lhs = set.deltas[0] * set.deltas[1];
        const bool holds = lhs >= 0.5 * hbar;
        const complex gap = condition_gap(lz, phi, psi, hbar);
        const complex ref = rotor_gap_reference(r, grid, hbar);
        t.add({std::to_string(c), format_state(r), num(set.deltas[0]), num(set.deltas[1]), num(lhs),
               num(0.5 * hbar), holds ? "yes" : "no", num(gap.imag()), num(ref.imag())},
              true, lhs - 0.5 * hbar);
    }
    return t;
}

SweepTable density_matrix_sweep(int cases_per_n, int n_max, std::uint64_t seed, double hbar) {
    SweepTable t;
    t.kind = "density-matrix";
    t.header = {"n_spins", "case", "pair", "lhs", "abs_C", "status"};
    std::mt19937_64 rng(seed);
    for (int n = 1; n <= n_max; ++n) {
        const auto mags = magnetization_operators(n, 1.0, hbar);
        const Eigen::Index d = mags[0].matrix.rows();
        for (int c = 0; c < cases_per_n; ++c) {
            Eigen::MatrixXcd g(d, d), h1(d, d), h2(d, d);
            for (Eigen::Index i = 0; i < d; ++i) {
                for (Eigen::Index j = 0; j < d; ++j) {
                    g(i, j) = normal_complex(rng);
                    h1(i, j) = normal_complex(rng);
                    h2(i, j) = normal_complex(rng);
                }
            }
            Eigen::MatrixXcd rho = g * g.adjoint();
            rho /= rho.trace().real();
            rho = 0.5 * (rho + rho.adjoint()).eval();
            std::vector<MatrixObservable> obs = mags;
            obs.emplace_back("A", 0.5 * (h1 + h1.adjoint()));
            obs.emplace_back("B", 0.5 * (h2 + h2.adjoint()));
            const EstimatorSet set = matrix_estimator_set(obs, DensityMatrix(rho));
            for (std::size_t a = 0; a < set.size(); ++a) {
                for (std::size_t b = a + 1; b < set.size(); ++b) {
                    const double lhs = set.deltas[a] * set.deltas[b];
                    const double rhs = std::abs(set.correlation(static_cast<Eigen::Index>(a),
                                                                static_cast<Eigen::Index>(b)));
                    const double margin = lhs - rhs;
                    const bool ok = margin >= -1e-12 * std::max(1.0, lhs);
                    t.add({std::to_string(n), std::to_string(c), set.labels[a] + "," + set.labels[b], num(lhs),
                           num(rhs), yes_no(ok)},
                          ok, margin);
                }
            }
        }
    }
    return t;
}

SweepTable stability_sweep(double hbar) {
    SweepTable t;
    t.kind = "stability";
    t.header = {"state", "pair", "class_default", "class_refined", "status"};
    for (const auto& spec : catalog_states()) {
        const auto [a, b] = natural_pair(spec);
        auto base = default_grid(spec, coarse_nodes(spec), hbar);
        const std::size_t n0 = base->axis(0).size();
        const std::size_t n_fine = base->kind() == DomainKind::circle ? 2 * n0 : 2 * n0 - 1;
        auto fine = default_grid(spec, n_fine, hbar);
        const URVerdict v0 = audit_pair(a, b, sample(spec, base, hbar), hbar);
        const URVerdict v1 = audit_pair(a, b, sample(spec, fine, hbar), hbar);
        const bool ok = v0.cls == v1.cls;
        t.add({format_state(spec), v0.pair, to_string(v0.cls), to_string(v1.cls), yes_no(ok)}, ok, ok ? 0.0 : -1.0);
    }
    return t;
}

}  // namespace qfluct
