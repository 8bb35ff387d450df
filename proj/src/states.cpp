#include "qfluct/states.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace qfluct {

namespace {

constexpr std::size_t default_line_nodes = 2048;
constexpr std::size_t default_qtp_nodes = 4096;
constexpr std::size_t default_plane_nodes = 256;
constexpr std::size_t default_theta_nodes = 64;
constexpr std::size_t phi_per_theta = 32;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

/// Splits on `sep` at nesting depth zero of () and [].
std::vector<std::string_view> split_top(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char ch = s[i];
        if (ch == '(' || ch == '[') ++depth;
        if (ch == ')' || ch == ']') --depth;
        if (depth < 0) throw ParseError("unbalanced brackets in '" + std::string(s) + "'");
        if (ch == sep && depth == 0) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (depth != 0) throw ParseError("unbalanced brackets in '" + std::string(s) + "'");
    out.push_back(trim(s.substr(start)));
    return out;
}

double parse_real(std::string_view s, std::string_view what) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError("invalid number '" + std::string(s) + "' for " + std::string(what));
    }
    if (!std::isfinite(v)) throw ParseError("non-finite value for " + std::string(what));
    return v;
}

int parse_int(std::string_view s, std::string_view what) {
    s = trim(s);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        throw ParseError("invalid integer '" + std::string(s) + "' for " + std::string(what));
    }
    return v;
}

complex parse_complex(std::string_view s) {
    s = trim(s);
    if (s.empty()) throw ParseError("empty coefficient");
    if (s.front() == '(') {
        if (s.back() != ')') throw ParseError("unterminated complex '" + std::string(s) + "'");
        auto parts = split_top(s.substr(1, s.size() - 2), ',');
        if (parts.size() != 2) throw ParseError("complex pair needs two parts");
        return {parse_real(parts[0], "real part"), parse_real(parts[1], "imaginary part")};
    }
    if (s.back() != 'i') return {parse_real(s, "coefficient"), 0.0};

    std::string_view body = s.substr(0, s.size() - 1);
    std::size_t split = std::string_view::npos;
    for (std::size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    auto imag_of = [](std::string_view t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        std::string_view u = t.front() == '+' ? t.substr(1) : t;
        return parse_real(u, "imaginary part");
    };
    if (split == std::string_view::npos) return {0.0, imag_of(body)};
    return {parse_real(body.substr(0, split), "real part"), imag_of(body.substr(split))};
}

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string fmt(complex z) {
    if (z.imag() == 0.0) return fmt(z.real());
    return "(" + fmt(z.real()) + "," + fmt(z.imag()) + ")";
}

struct KeyValues {
    std::vector<std::pair<std::string, std::string>> items;

    const std::string* get(std::string_view key) const {
        for (const auto& [k, v] : items) {
            if (k == key) return &v;
        }
        return nullptr;
    }
};

KeyValues parse_params(std::string_view body, std::initializer_list<std::string_view> allowed) {
    KeyValues kv;
    if (trim(body).empty()) return kv;
    for (auto item : split_top(body, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("expected key=value, got '" + std::string(item) + "'");
        }
        std::string key(trim(item.substr(0, eq)));
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ParseError("unknown parameter '" + key + "'");
        if (kv.get(key)) throw ParseError("duplicate parameter '" + key + "'");
        kv.items.emplace_back(key, std::string(trim(item.substr(eq + 1))));
    }
    return kv;
}

double real_or(const KeyValues& kv, std::string_view key, double fallback) {
    const auto* v = kv.get(key);
    return v ? parse_real(*v, key) : fallback;
}

int int_or(const KeyValues& kv, std::string_view key, int fallback) {
    const auto* v = kv.get(key);
    return v ? parse_int(*v, key) : fallback;
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

/// Associated Legendre P_l^m(x), m >= 0, Condon-Shortley phase included.
double assoc_legendre(int l, int m, double x) {
    double pmm = 1.0;
    const double s = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    for (int k = 1; k <= m; ++k) pmm *= -(2.0 * k - 1.0) * s;
    if (l == m) return pmm;
    double pm1 = x * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) return pm1;
    double pl = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        pl = ((2.0 * ll - 1.0) * x * pm1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pm1;
        pm1 = pl;
    }
    return pl;
}

}  // namespace

// ---------------------------------------------------------------------------
// Text form

StateSpec parse_state(std::string_view text) {
    text = trim(text);
    const auto colon = text.find(':');
    const std::string kind(trim(text.substr(0, colon)));
    const std::string_view body = colon == std::string_view::npos ? "" : text.substr(colon + 1);

    StateSpec spec;
    if (kind == "azimuthal") {
        auto kv = parse_params(body, {"m"});
        spec = AzimuthalEigenstate{int_or(kv, "m", 0)};
    } else if (kind == "phase") {
        auto kv = parse_params(body, {"N"});
        spec = PhaseEigenstate{int_or(kv, "N", 0)};
    } else if (kind == "qtp") {
        auto kv = parse_params(body, {"N", "I", "omega"});
        spec = TorsionPendulum{int_or(kv, "N", 0), real_or(kv, "I", 1.0), real_or(kv, "omega", 1.0)};
    } else if (kind == "rotor") {
        auto kv = parse_params(body, {"l", "c", "m"});
        DegenerateRotor r;
        r.l = int_or(kv, "l", 0);
        if (r.l < 0 || r.l > 3) throw ParseError("rotor needs 0 <= l <= 3");
        const auto* c = kv.get("c");
        const auto* m = kv.get("m");
        if (c && m) throw ParseError("rotor takes either c=[...] or m=<int>, not both");
        if (c) {
            std::string_view list = trim(*c);
            if (list.size() < 2 || list.front() != '[' || list.back() != ']') {
                throw ParseError("rotor coefficients must be written c=[...]");
            }
            for (auto item : split_top(list.substr(1, list.size() - 2), ',')) {
                r.c.push_back(parse_complex(item));
            }
        } else {
            const int mm = m ? parse_int(*m, "m") : 0;
            if (std::abs(mm) > r.l) throw ParseError("rotor m must satisfy |m| <= l");
            r.c.assign(2 * r.l + 1, 0.0);
            r.c[mm + r.l] = 1.0;
        }
        spec = std::move(r);
    } else if (kind == "gaussian") {
        auto kv = parse_params(body, {"x0", "sigma", "k"});
        spec = GaussianPacket{real_or(kv, "x0", 0.0), real_or(kv, "sigma", 1.0),
                              real_or(kv, "k", 0.0)};
    } else if (kind == "box2d") {
        auto kv = parse_params(body, {"a", "b"});
        spec = Box2DGround{real_or(kv, "a", 1.0), real_or(kv, "b", 2.0)};
    } else {
        throw ParseError("unknown state kind '" + kind + "'");
    }
    validate_state(spec);
    return spec;
}

std::string format_state(const StateSpec& spec) {
    return std::visit(
        overloaded{
            [](const AzimuthalEigenstate& s) { return "azimuthal:m=" + std::to_string(s.m); },
            [](const PhaseEigenstate& s) { return "phase:N=" + std::to_string(s.N); },
            [](const TorsionPendulum& s) {
                return "qtp:N=" + std::to_string(s.N) + ",I=" + fmt(s.I) + ",omega=" + fmt(s.omega);
            },
            [](const DegenerateRotor& s) {
                std::string out = "rotor:l=" + std::to_string(s.l) + ",c=[";
                for (std::size_t i = 0; i < s.c.size(); ++i) {
                    if (i) out += ',';
                    out += fmt(s.c[i]);
                }
                return out + "]";
            },
            [](const GaussianPacket& s) {
                return "gaussian:x0=" + fmt(s.x0) + ",sigma=" + fmt(s.sigma) + ",k=" + fmt(s.k);
            },
            [](const Box2DGround& s) { return "box2d:a=" + fmt(s.a) + ",b=" + fmt(s.b); },
            [](const RawGrid&) { return std::string("raw"); },
        },
        spec);
}

std::string state_kind(const StateSpec& spec) {
    static const char* names[] = {"azimuthal", "phase", "qtp", "rotor", "gaussian", "box2d", "raw"};
    return names[spec.index()];
}

void validate_state(const StateSpec& spec) {
    std::visit(
        overloaded{
            [](const AzimuthalEigenstate&) {},
            [](const PhaseEigenstate& s) {
                if (s.N < 0) throw DomainError("phase eigenstate needs N >= 0");
            },
            [](const TorsionPendulum& s) {
                if (s.N < 0) throw DomainError("torsion pendulum needs N >= 0");
                if (!(s.I > 0.0) || !(s.omega > 0.0)) {
                    throw DomainError("torsion pendulum needs I > 0 and omega > 0");
                }
            },
            [](const DegenerateRotor& s) {
                if (s.l < 0 || s.l > 3) throw DomainError("rotor needs 0 <= l <= 3");
                if (s.c.size() != static_cast<std::size_t>(2 * s.l + 1)) {
                    throw DomainError("rotor needs 2l+1 coefficients");
                }
                double norm = 0.0;
                for (auto c : s.c) norm += std::norm(c);
                if (std::abs(norm - 1.0) > 1e-12) {
                    throw DomainError("rotor coefficients are not normalized (sum |c_m|^2 = " +
                                      fmt(norm) + ")");
                }
            },
            [](const GaussianPacket& s) {
                if (!(s.sigma > 0.0)) throw DomainError("gaussian packet needs sigma > 0");
            },
            [](const Box2DGround& s) {
                if (!(s.a > 0.0) || !(s.b > s.a)) throw DomainError("box2d needs 0 < a < b");
            },
            [](const RawGrid&) {},
        },
        spec);
}

DomainKind state_domain(const StateSpec& spec) {
    return std::visit(
        overloaded{
            [](const AzimuthalEigenstate&) { return DomainKind::circle; },
            [](const PhaseEigenstate&) { return DomainKind::circle; },
            [](const TorsionPendulum&) { return DomainKind::segment; },
            [](const DegenerateRotor&) { return DomainKind::sphere; },
            [](const GaussianPacket&) { return DomainKind::segment; },
            [](const Box2DGround&) { return DomainKind::plane; },
            [](const RawGrid& r) { return r.field.grid().kind(); },
        },
        spec);
}

// ---------------------------------------------------------------------------
// Sampling

GridPtr default_grid(const StateSpec& spec, std::size_t nodes, double hbar, double extra_width) {
    validate_state(spec);
    auto pick = [&](std::size_t fallback) { return nodes ? nodes : fallback; };
    return std::visit(
        overloaded{
            [&](const AzimuthalEigenstate&) { return Grid::circle(pick(default_line_nodes)); },
            [&](const PhaseEigenstate&) { return Grid::circle(pick(default_line_nodes)); },
            [&](const TorsionPendulum& s) {
                const double scale = std::sqrt(hbar / (s.I * s.omega));
                const double half = (std::sqrt(2.0 * s.N + 1.0) + 7.0) * scale;
                return Grid::segment(-half, half, pick(default_qtp_nodes));
            },
            [&](const DegenerateRotor&) {
                const std::size_t nt = pick(default_theta_nodes);
                return Grid::sphere(nt, phi_per_theta * nt);
            },
            [&](const GaussianPacket& s) {
                const double w = std::max(s.sigma, extra_width);
                return Grid::segment(s.x0 - 8.0 * w, s.x0 + 8.0 * w, pick(default_line_nodes));
            },
            [&](const Box2DGround& s) {
                const std::size_t n = pick(default_plane_nodes);
                return Grid::plane(0.0, s.a, n, 0.0, s.b, n);
            },
            [&](const RawGrid& r) { return r.field.grid_ptr(); },
        },
        spec);
}

double hermite_function(int n, double xi) {
    if (n < 0) throw DomainError("hermite index must be non-negative");
    double prev = 0.0;
    double cur = std::pow(pi, -0.25) * std::exp(-0.5 * xi * xi);
    for (int k = 0; k < n; ++k) {
        const double next =
            std::sqrt(2.0 / (k + 1.0)) * xi * cur - std::sqrt(static_cast<double>(k) / (k + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

complex spherical_harmonic(int l, int m, double theta, double phi) {
    if (l < 0 || l > 3) throw DomainError("spherical harmonics are supported for 0 <= l <= 3");
    if (std::abs(m) > l) throw DomainError("spherical harmonic needs |m| <= l");
    const int am = std::abs(m);
    const double norm =
        std::sqrt((2.0 * l + 1.0) / (4.0 * pi) * factorial(l - am) / factorial(l + am));
    const complex y = norm * assoc_legendre(l, am, std::cos(theta)) * std::polar(1.0, am * phi);
    if (m >= 0) return y;
    return ((am % 2) ? -1.0 : 1.0) * std::conj(y);
}

ComplexField sample(const StateSpec& spec, const GridPtr& grid, double hbar) {
    validate_state(spec);
    if (!grid) throw DomainError("sample needs a grid");
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    const Grid& g = *grid;
    if (g.kind() != state_domain(spec)) {
        throw DomainError("state " + state_kind(spec) + " cannot be sampled on this grid kind");
    }
    std::vector<complex> v(g.size());
    const double inv_sqrt_2pi = 1.0 / std::sqrt(two_pi);

    std::visit(
        overloaded{
            [&](const AzimuthalEigenstate& s) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    v[i] = std::polar(inv_sqrt_2pi, s.m * g.coordinate(i, 0));
                }
            },
            [&](const PhaseEigenstate& s) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    v[i] = std::polar(inv_sqrt_2pi, -s.N * g.coordinate(i, 0));
                }
            },
            [&](const TorsionPendulum& s) {
                const double k = std::sqrt(s.I * s.omega / hbar);
                const double amp = std::sqrt(k);
                for (std::size_t i = 0; i < v.size(); ++i) {
                    v[i] = amp * hermite_function(s.N, k * g.coordinate(i, 0));
                }
            },
            [&](const DegenerateRotor& s) {
                for (std::size_t i = 0; i < v.size(); ++i) {
                    const double th = g.coordinate(i, 0);
                    const double ph = g.coordinate(i, 1);
                    complex acc = 0.0;
                    for (int m = -s.l; m <= s.l; ++m) {
                        const complex c = s.c[m + s.l];
                        if (c != 0.0) acc += c * spherical_harmonic(s.l, m, th, ph);
                    }
                    v[i] = acc;
                }
            },
            [&](const GaussianPacket& s) {
                const double amp = std::pow(two_pi * s.sigma * s.sigma, -0.25);
                for (std::size_t i = 0; i < v.size(); ++i) {
                    const double x = g.coordinate(i, 0);
                    const double d = x - s.x0;
                    v[i] = std::polar(amp * std::exp(-d * d / (4.0 * s.sigma * s.sigma)), s.k * x);
                }
            },
            [&](const Box2DGround& s) {
                const double amp = 2.0 / std::sqrt(s.a * s.b);
                for (std::size_t i = 0; i < v.size(); ++i) {
                    v[i] = amp * std::sin(pi * g.coordinate(i, 0) / s.a) *
                           std::sin(pi * g.coordinate(i, 1) / s.b);
                }
            },
            [&](const RawGrid& r) {
                require_conforming(r.field.grid(), g, "raw state");
                v.assign(r.field.values().begin(), r.field.values().end());
            },
        },
        spec);
    return ComplexField(grid, std::move(v));
}

DensityCurrent density_and_current(const ComplexField& psi, double mass, double hbar) {
    if (!(mass > 0.0)) throw DomainError("mass must be positive");
    if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
    const std::size_t n = psi.size();
    std::vector<double> rho(n);
    for (std::size_t i = 0; i < n; ++i) rho[i] = std::norm(psi[i]);

    DensityCurrent out{RealField(psi.grid_ptr(), std::move(rho)), {}};
    for (std::size_t axis = 0; axis < psi.grid().rank(); ++axis) {
        const ComplexField d = differentiate(psi, 1, axis);
        std::vector<double> j(n);
        for (std::size_t i = 0; i < n; ++i) j[i] = hbar / mass * std::imag(std::conj(psi[i]) * d[i]);
        out.current.emplace_back(psi.grid_ptr(), std::move(j));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Closed forms

std::optional<complex> ClosedFormCard::find(std::string_view label) const {
    for (const auto& e : entries) {
        if (e.label == label) return e.value;
    }
    return std::nullopt;
}

ClosedFormCard closed_form_card(const StateSpec& spec, double hbar) {
    validate_state(spec);
    ClosedFormCard card{format_state(spec), {}};
    auto add = [&](std::string label, complex value, std::string source) {
        card.entries.push_back({std::move(label), value, std::move(source)});
    };
    const double uniform_phi_spread = pi / std::sqrt(3.0);
    const complex i(0.0, 1.0);

    std::visit(
        overloaded{
            [&](const AzimuthalEigenstate& s) {
                add("mean:Lz", hbar * s.m, "azimuthal-eigenvalue");
                add("delta:Lz", 0.0, "azimuthal-spread");
                add("mean:phi", pi, "uniform-angle");
                add("delta:phi", uniform_phi_spread, "azimuthal-spread");
                add("corr:Lz,phi", 0.0, "eigenstate-rule");
                add("gap:Lz,phi", i * hbar, "azimuthal-gap");
            },
            [&](const PhaseEigenstate& s) {
                add("mean:N", static_cast<double>(s.N), "phase-eigenvalue");
                add("delta:N", 0.0, "phase-spread");
                add("mean:phase", pi, "uniform-angle");
                add("delta:phase", uniform_phi_spread, "phase-spread");
                add("corr:N,phase", 0.0, "eigenstate-rule");
                add("gap:N,phase", -i, "phase-gap");
            },
            [&](const TorsionPendulum& s) {
                const double level = s.N + 0.5;
                add("mean:Lz", 0.0, "qtp-parity");
                add("delta:Lz", std::sqrt(hbar * s.I * s.omega * level), "qtp-spread");
                add("mean:phi", 0.0, "qtp-parity");
                add("delta:phi", std::sqrt(hbar / (s.I * s.omega) * level), "qtp-spread");
                add("corr:Lz,phi", -0.5 * i * hbar, "qtp-commutator");
                add("gap:Lz,phi", 0.0, "qtp-gap");
                add("mean:H_qtp", hbar * s.omega * level, "qtp-energy");
                add("delta:H_qtp", 0.0, "qtp-energy");
            },
            [&](const DegenerateRotor& s) {
                double m1 = 0.0;
                double m2 = 0.0;
                for (int m = -s.l; m <= s.l; ++m) {
                    const double p = std::norm(s.c[m + s.l]);
                    m1 += p * hbar * m;
                    m2 += p * hbar * hbar * m * m;
                }
                add("mean:Lz", m1, "rotor-lz");
                add("delta:Lz", std::sqrt(std::max(0.0, m2 - m1 * m1)), "rotor-lz");
            },
            [&](const GaussianPacket& s) {
                add("mean:x", s.x0, "packet-means");
                add("mean:p", hbar * s.k, "packet-means");
                add("delta:x", s.sigma, "packet-spread");
                add("delta:p", hbar / (2.0 * s.sigma), "packet-spread");
                add("corr:x,p", 0.5 * i * hbar, "packet-correlation");
                add("gap:x,p", 0.0, "line-domain");
            },
            [&](const Box2DGround& s) {
                const double base = hbar * pi / (s.a * s.b);
                const double dp = base * std::sqrt((s.a * s.a + s.b * s.b) / 2.0);
                add("mean:px", 0.0, "well-parity");
                add("mean:py", 0.0, "well-parity");
                add("delta:px", dp, "well-momentum-spread");
                add("delta:py", dp, "well-momentum-spread");
                add("corr_abs:px,py", base * base * (s.b * s.b - s.a * s.a) / 2.0,
                    "well-momentum-correlation");
                add("gap:px,py", 0.0, "well-dirichlet");
            },
            [&](const RawGrid&) {
                throw DomainError("raw grid states have no closed-form card");
            },
        },
        spec);
    return card;
}

}  // namespace qfluct
