#include "qfluct/observables.hpp"

#include <charconv>
#include <cmath>

namespace qfluct {

namespace {

struct OpName {
    OpKind kind;
    const char* name;
};

constexpr OpName op_names[] = {
    {OpKind::x, "x"},         {OpKind::x2, "x2"},         {OpKind::p, "p"},
    {OpKind::p2, "p2"},       {OpKind::phi, "phi"},       {OpKind::Lz, "Lz"},
    {OpKind::N, "N"},         {OpKind::phase, "phase"},   {OpKind::H_qtp, "H_qtp"},
    {OpKind::H_osc, "H_osc"}, {OpKind::H_rotor, "H_rotor"}, {OpKind::px, "px"},
    {OpKind::py, "py"},
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

double parse_positive(std::string_view s, const std::string& what) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError("invalid number '" + std::string(s) + "' for " + what);
    }
    if (!(v > 0.0) || !std::isfinite(v)) throw ParseError(what + " must be positive");
    return v;
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

/// Axis that carries the azimuthal angle for the given grid.
std::size_t angle_axis(const Grid& g) { return g.kind() == DomainKind::sphere ? 1 : 0; }

ComplexField multiply(const ComplexField& f, std::size_t axis, int power) {
    const Grid& g = f.grid();
    std::vector<complex> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double c = g.coordinate(i, axis);
        out[i] = (power == 1 ? c : c * c) * f[i];
    }
    return ComplexField(f.grid_ptr(), std::move(out));
}

/// a * d2 + b * coord^2 * f
ComplexField kinetic_plus_harmonic(const ComplexField& f, std::size_t axis, double kin,
                                   double pot) {
    const ComplexField d2 = differentiate(f, 2, axis);
    const Grid& g = f.grid();
    std::vector<complex> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double c = g.coordinate(i, axis);
        out[i] = kin * d2[i] + pot * c * c * f[i];
    }
    return ComplexField(f.grid_ptr(), std::move(out));
}

void require_normalized(const ComplexField& psi) {
    const double n = norm_squared(psi);
    if (std::abs(n - 1.0) > 1e-6) {
        throw DomainError("state is not normalized (norm^2 = " + fmt(n) + ")");
    }
}

const complex I(0.0, 1.0);

}  // namespace

int OperatorSpec::derivative_order() const {
    switch (kind) {
        case OpKind::x:
        case OpKind::x2:
        case OpKind::phi:
        case OpKind::phase: return 0;
        case OpKind::p:
        case OpKind::Lz:
        case OpKind::N:
        case OpKind::px:
        case OpKind::py: return 1;
        case OpKind::p2:
        case OpKind::H_qtp:
        case OpKind::H_osc:
        case OpKind::H_rotor: return 2;
    }
    return 0;
}

bool OperatorSpec::allowed_on(DomainKind d) const {
    switch (kind) {
        case OpKind::x:
        case OpKind::x2:
        case OpKind::p:
        case OpKind::p2:
        case OpKind::H_osc:
        case OpKind::H_qtp: return d == DomainKind::segment;
        case OpKind::phi:
        case OpKind::Lz:
            return d == DomainKind::circle || d == DomainKind::sphere || d == DomainKind::segment;
        case OpKind::N:
        case OpKind::phase: return d == DomainKind::circle;
        case OpKind::H_rotor: return d == DomainKind::circle || d == DomainKind::sphere;
        case OpKind::px:
        case OpKind::py: return d == DomainKind::plane;
    }
    return false;
}

OperatorSpec parse_operator(std::string_view text) {
    text = trim(text);
    const auto paren = text.find('(');
    const std::string name(trim(text.substr(0, paren)));
    OperatorSpec op;
    bool found = false;
    for (const auto& n : op_names) {
        if (name == n.name) {
            op.kind = n.kind;
            found = true;
        }
    }
    if (!found) throw ParseError("unknown operator '" + name + "'");
    if (paren == std::string_view::npos) return op;

    if (text.back() != ')') throw ParseError("unterminated parameters in '" + std::string(text) + "'");
    const char* inertia_key = op.kind == OpKind::H_osc ? "m" : "I";
    const bool has_omega = op.kind == OpKind::H_osc || op.kind == OpKind::H_qtp;
    if (op.kind != OpKind::H_osc && op.kind != OpKind::H_qtp && op.kind != OpKind::H_rotor) {
        throw ParseError("operator '" + name + "' takes no parameters");
    }
    std::string_view body = text.substr(paren + 1, text.size() - paren - 2);
    while (!trim(body).empty()) {
        const auto comma = body.find(',');
        const std::string_view item = trim(body.substr(0, comma));
        body = comma == std::string_view::npos ? std::string_view{} : body.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key=value in operator parameters");
        const std::string key(trim(item.substr(0, eq)));
        if (key == inertia_key) {
            op.inertia = parse_positive(item.substr(eq + 1), key);
        } else if (key == "omega" && has_omega) {
            op.omega = parse_positive(item.substr(eq + 1), key);
        } else {
            throw ParseError("unknown parameter '" + key + "' for " + name);
        }
    }
    return op;
}

std::string operator_name(const OperatorSpec& op) {
    for (const auto& n : op_names) {
        if (n.kind == op.kind) return n.name;
    }
    return "?";
}

std::string format_operator(const OperatorSpec& op) {
    const std::string name = operator_name(op);
    switch (op.kind) {
        case OpKind::H_osc: return name + "(m=" + fmt(op.inertia) + ",omega=" + fmt(op.omega) + ")";
        case OpKind::H_qtp: return name + "(I=" + fmt(op.inertia) + ",omega=" + fmt(op.omega) + ")";
        case OpKind::H_rotor: return name + "(I=" + fmt(op.inertia) + ")";
        default: return name;
    }
}

std::vector<OperatorSpec> parse_operator_list(std::string_view text) {
    std::vector<OperatorSpec> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        const char ch = i < text.size() ? text[i] : ',';
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            const auto item = trim(text.substr(start, i - start));
            if (item.empty()) throw ParseError("empty operator in list '" + std::string(text) + "'");
            out.push_back(parse_operator(item));
            start = i + 1;
        }
    }
    if (depth != 0) throw ParseError("unbalanced parentheses in '" + std::string(text) + "'");
    return out;
}

ComplexField apply(const OperatorSpec& op, const ComplexField& psi, double hbar) {
    const Grid& g = psi.grid();
    if (!op.allowed_on(g.kind())) {
        throw DomainError("operator " + operator_name(op) + " is not defined on this domain");
    }
    const std::size_t ang = angle_axis(g);
    switch (op.kind) {
        case OpKind::x: return multiply(psi, 0, 1);
        case OpKind::x2: return multiply(psi, 0, 2);
        case OpKind::p: return (-I * hbar) * differentiate(psi, 1, 0);
        case OpKind::p2: return complex(-hbar * hbar) * differentiate(psi, 2, 0);
        case OpKind::phi:
        case OpKind::phase: return multiply(psi, ang, 1);
        case OpKind::Lz: return (-I * hbar) * differentiate(psi, 1, ang);
        case OpKind::N: return I * differentiate(psi, 1, ang);
        case OpKind::H_qtp:
        case OpKind::H_osc:
            return kinetic_plus_harmonic(psi, 0, -hbar * hbar / (2.0 * op.inertia),
                                         0.5 * op.inertia * op.omega * op.omega);
        case OpKind::H_rotor:
            return complex(-hbar * hbar / (2.0 * op.inertia)) * differentiate(psi, 2, ang);
        case OpKind::px:
        case OpKind::py: {
            const ComplexField d1 = differentiate(psi, 1, 0);
            const ComplexField d2 = differentiate(psi, 1, 1);
            const complex c = -I * hbar / std::sqrt(2.0);
            return c * (op.kind == OpKind::px ? d1 - d2 : d1 + d2);
        }
    }
    throw DomainError("unhandled operator");
}

ComplexField apply(const std::vector<OperatorSpec>& ops, const ComplexField& psi, double hbar) {
    ComplexField out = psi;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) out = apply(*it, out, hbar);
    return out;
}

std::size_t EstimatorSet::index(std::string_view label) const {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return i;
    }
    throw DomainError("estimator set has no entry '" + std::string(label) + "'");
}

void finish_estimators(EstimatorSet& set) {
    set.deltas.resize(set.size());
    for (std::size_t j = 0; j < set.size(); ++j) {
        const auto k = static_cast<Eigen::Index>(j);
        set.deltas[j] = std::sqrt(std::max(0.0, set.correlation(k, k).real()));
    }
}

EstimatorSet estimator_set(const std::vector<OperatorSpec>& ops, const ComplexField& psi,
                           double hbar) {
    require_normalized(psi);
    const std::size_t r = ops.size();
    EstimatorSet set;
    std::vector<ComplexField> deviations;
    deviations.reserve(r);
    for (const auto& op : ops) {
        const ComplexField a_psi = apply(op, psi, hbar);
        const complex mean = inner_product(psi, a_psi);
        set.labels.push_back(operator_name(op));
        set.means.push_back(mean);
        deviations.push_back(a_psi - mean * psi);
    }
    set.correlation.resize(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r));
    for (std::size_t j = 0; j < r; ++j) {
        for (std::size_t k = j; k < r; ++k) {
            const complex c = inner_product(deviations[j], deviations[k]);
            const auto jj = static_cast<Eigen::Index>(j);
            const auto kk = static_cast<Eigen::Index>(k);
            set.correlation(jj, kk) = j == k ? complex(c.real(), 0.0) : c;
            set.correlation(kk, jj) = std::conj(set.correlation(jj, kk));
        }
    }
    finish_estimators(set);
    return set;
}

complex condition_gap(const OperatorSpec& a, const OperatorSpec& b, const ComplexField& psi,
                      double hbar) {
    const ComplexField a_psi = apply(a, psi, hbar);
    const ComplexField b_psi = apply(b, psi, hbar);
    const ComplexField ab_psi = apply(a, b_psi, hbar);
    return inner_product(a_psi, b_psi) - inner_product(psi, ab_psi);
}

complex commutator_mean(const OperatorSpec& a, const OperatorSpec& b, const ComplexField& psi,
                        double hbar) {
    const ComplexField ab_psi = apply(a, apply(b, psi, hbar), hbar);
    const ComplexField ba_psi = apply(b, apply(a, psi, hbar), hbar);
    return inner_product(psi, ab_psi) - inner_product(psi, ba_psi);
}

double gap_tolerance(const Grid& grid, double hbar) {
    const double h = grid.max_spacing();
    return hbar * std::max(1e-3, 10.0 * h * h);
}

// ---------------------------------------------------------------------------
// Finite matrices

MatrixObservable::MatrixObservable(std::string l, Eigen::MatrixXcd m)
    : label(std::move(l)), matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
        throw DomainError("matrix observable must be square and non-empty");
    }
    const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw DomainError("matrix observable '" + label + "' is not Hermitian");
    }
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
        throw DomainError("density matrix must be square and non-empty");
    }
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
        throw DomainError("density matrix is not Hermitian");
    }
    if (std::abs(rho_.trace() - complex(1.0)) > 1e-12) {
        throw DomainError("density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) {
        throw DomainError("density matrix is not positive semidefinite");
    }
}

EstimatorSet matrix_estimator_set(const std::vector<MatrixObservable>& obs,
                                  const DensityMatrix& rho) {
    const auto d = rho.dimension();
    EstimatorSet set;
    std::vector<Eigen::MatrixXcd> dev;
    for (const auto& o : obs) {
        if (o.matrix.rows() != d) {
            throw DomainError("observable '" + o.label + "' does not conform to the density matrix");
        }
        const complex mean = (o.matrix * rho.matrix()).trace();
        set.labels.push_back(o.label);
        set.means.push_back(mean);
        dev.push_back(o.matrix - mean * Eigen::MatrixXcd::Identity(d, d));
    }
    const auto r = static_cast<Eigen::Index>(obs.size());
    set.correlation.resize(r, r);
    for (Eigen::Index j = 0; j < r; ++j) {
        for (Eigen::Index k = 0; k < r; ++k) {
            set.correlation(j, k) = (dev[j] * dev[k] * rho.matrix()).trace();
        }
    }
    finish_estimators(set);
    return set;
}

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

}  // namespace

std::vector<MatrixObservable> magnetization_operators(int n_spins, double gamma, double hbar) {
    if (n_spins < 1 || n_spins > 8) throw DomainError("magnetization needs 1 <= n_spins <= 8");
    Eigen::Matrix2cd sx, sy, sz;
    sx << 0.0, 1.0, 1.0, 0.0;
    sy << 0.0, -I, I, 0.0;
    sz << 1.0, 0.0, 0.0, -1.0;
    const Eigen::Matrix2cd paulis[3] = {sx, sy, sz};
    const char* labels[3] = {"Mx", "My", "Mz"};
    const Eigen::Index dim = Eigen::Index(1) << n_spins;

    std::vector<MatrixObservable> out;
    for (int a = 0; a < 3; ++a) {
        Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
        for (int slot = 0; slot < n_spins; ++slot) {
            Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(1, 1);
            for (int s = 0; s < n_spins; ++s) {
                term = kron(term, s == slot ? Eigen::MatrixXcd(paulis[a])
                                            : Eigen::MatrixXcd(Eigen::Matrix2cd::Identity()));
            }
            total += term;
        }
        out.emplace_back(labels[a], (0.5 * gamma * hbar) * total);
    }
    return out;
}

double magnetization_commutator_residual(const std::vector<MatrixObservable>& m, double gamma,
                                         double hbar) {
    if (m.size() != 3) throw DomainError("expected three magnetization components");
    double worst = 0.0;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const auto& ma = m[a].matrix;
            const auto& mb = m[b].matrix;
            Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(ma.rows(), ma.cols());
            if (a != b) {
                const int c = 3 - a - b;
                const double eps = ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
                expected = (I * hbar * gamma * eps) * m[c].matrix;
            }
            const Eigen::MatrixXcd comm = ma * mb - mb * ma;
            worst = std::max(worst, (comm - expected).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

}  // namespace qfluct
