#include <doctest.h>

#include <cmath>
#include <random>

#include "qfluct/observables.hpp"
#include "qfluct/states.hpp"

using namespace qfluct;

namespace {

const complex I(0.0, 1.0);

double interior_error(const ComplexField& got, const ComplexField& want, std::size_t skip = 4) {
    double worst = 0.0;
    for (std::size_t i = skip; i + skip < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    return worst;
}

Eigen::MatrixXcd random_hermitian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = complex(n(rng), n(rng));
    return (a + a.adjoint()) / 2.0;
}

Eigen::MatrixXcd random_density(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd a(dim, dim);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) a(r, c) = complex(n(rng), n(rng));
    Eigen::MatrixXcd rho = a * a.adjoint();
    rho /= rho.trace();
    return (rho + rho.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("operator text round-trips") {
    for (const char* text : {"Lz", "phi", "N", "phase", "x", "p", "x2", "p2", "px", "py"}) {
        CHECK(format_operator(parse_operator(text)) == text);
    }
    CHECK(format_operator(parse_operator("H_rotor")) == "H_rotor(I=1)");
    const auto h = parse_operator("H_qtp(I=2,omega=0.5)");
    CHECK(h.kind == OpKind::H_qtp);
    CHECK(h.inertia == 2.0);
    CHECK(h.omega == 0.5);
    CHECK(parse_operator(format_operator(h)).inertia == 2.0);
    CHECK(operator_name(h) == "H_qtp");
    const auto list = parse_operator_list("Lz, phi ,H_osc(m=2,omega=3)");
    REQUIRE(list.size() == 3);
    CHECK(list[2].inertia == 2.0);
    CHECK_THROWS_AS(parse_operator("Q"), ParseError);
    CHECK_THROWS_AS(parse_operator("H_osc(m=1"), ParseError);
}

TEST_CASE("operators are tied to their domains") {
    CHECK(parse_operator("Lz").allowed_on(DomainKind::circle));
    CHECK_FALSE(parse_operator("x").allowed_on(DomainKind::circle));
    auto psi = sample(AzimuthalEigenstate{1}, default_grid(AzimuthalEigenstate{1}));
    CHECK_THROWS_AS(qfluct::apply(parse_operator("p"), psi), DomainError);
}

TEST_CASE("eigenstates are eigenvectors of their operators") {
    SUBCASE("Lz on the circle") {
        const double hbar = 0.5;
        auto psi = sample(AzimuthalEigenstate{3}, default_grid(AzimuthalEigenstate{3}, 0, hbar), hbar);
        CHECK(interior_error(qfluct::apply(parse_operator("Lz"), psi, hbar), complex(3 * hbar) * psi) < 1e-8);
    }
    SUBCASE("N on the phase circle") {
        auto psi = sample(PhaseEigenstate{2}, default_grid(PhaseEigenstate{2}));
        CHECK(interior_error(qfluct::apply(parse_operator("N"), psi), complex(2.0) * psi) < 1e-8);
    }
    SUBCASE("torsion pendulum energy") {
        const TorsionPendulum q{3, 2.0, 0.5};
        auto psi = sample(q, default_grid(q));
        OperatorSpec h{OpKind::H_qtp, 2.0, 0.5};
        CHECK(interior_error(qfluct::apply(h, psi), complex(0.5 * 3.5) * psi) < 1e-6);
    }
    SUBCASE("products apply right to left") {
        auto psi = sample(AzimuthalEigenstate{2}, default_grid(AzimuthalEigenstate{2}));
        auto lz = parse_operator("Lz");
        auto phi = parse_operator("phi");
        auto direct = qfluct::apply(lz, qfluct::apply(phi, psi));
        auto product = qfluct::apply(std::vector<OperatorSpec>{lz, phi}, psi);
        CHECK(interior_error(direct, product, 0) == 0.0);
    }
}

TEST_CASE("azimuthal eigenstate estimators") {
    for (int m : {1, 2, 3}) {
        auto psi = sample(AzimuthalEigenstate{m}, default_grid(AzimuthalEigenstate{m}));
        auto set = estimator_set(parse_operator_list("Lz,phi"), psi);
        CHECK(set.delta("Lz") <= 1e-8);
        CHECK(std::abs(set.delta("phi") - pi / std::sqrt(3.0)) <= 1e-4);
        CHECK(set.mean("Lz").real() == doctest::Approx(m));
        CHECK(std::abs(set.corr("Lz", "phi")) < 1e-8);
        CHECK_THROWS_AS(set.index("x"), DomainError);
    }
}

TEST_CASE("estimators reject unnormalized fields") {
    auto g = Grid::circle(256);
    ComplexField psi(g, std::vector<complex>(256, complex(1.0)));
    CHECK_THROWS_AS(estimator_set(parse_operator_list("Lz"), psi), DomainError);
}

TEST_CASE("condition gaps follow hbar") {
    for (double hbar : {1.0, 0.25}) {
        auto psi = sample(AzimuthalEigenstate{1}, default_grid(AzimuthalEigenstate{1}, 0, hbar), hbar);
        const auto gap = condition_gap(parse_operator("Lz"), parse_operator("phi"), psi, hbar);
        CHECK(std::abs(gap - I * hbar) < 1e-3 * hbar);
    }
    auto ph = sample(PhaseEigenstate{4}, default_grid(PhaseEigenstate{4}));
    CHECK(std::abs(condition_gap(parse_operator("N"), parse_operator("phase"), ph) + I) < 1e-3);
    for (int n = 0; n <= 3; ++n) {
        const TorsionPendulum q{n, 1.0, 1.0};
        auto psi = sample(q, default_grid(q));
        CHECK(std::abs(condition_gap(parse_operator("Lz"), parse_operator("phi"), psi)) < 1e-3);
    }
}

TEST_CASE("gap equals i hbar 2 pi |psi(2 pi - 0)|^2 for smooth circle states") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 1.0);
    auto g = Grid::circle(2048);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<complex> c(7);
        for (auto& z : c) z = complex(n(rng), n(rng));
        std::vector<complex> v(g->size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            for (int m = -3; m <= 3; ++m) v[i] += c[m + 3] * std::polar(1.0, m * g->coordinate(i, 0));
        }
        ComplexField raw(g, v);
        const double norm = std::sqrt(norm_squared(raw));
        ComplexField psi = complex(1.0 / norm) * raw;
        // Periodic psi: psi(2 pi - 0) = psi(0) = sum c_m / norm.
        complex edge = 0.0;
        for (auto z : c) edge += z;
        edge /= norm;
        const complex expected = I * two_pi * std::norm(edge);
        CHECK(std::abs(condition_gap(parse_operator("Lz"), parse_operator("phi"), psi) - expected) < 1e-4);
    }
}

TEST_CASE("imaginary part of the correlation is half the commutator mean") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.4, 1.6);
    for (int trial = 0; trial < 5; ++trial) {
        const GaussianPacket g{u(rng) - 1.0, u(rng), 2.0 * u(rng) - 1.6};
        auto psi = sample(g, default_grid(g));
        auto set = estimator_set(parse_operator_list("x,p"), psi);
        const complex comm = commutator_mean(parse_operator("x"), parse_operator("p"), psi);
        CHECK(std::abs(comm - I) < 1e-4);
        CHECK(std::abs(set.corr("x", "p").imag() - comm.imag() / 2.0) < 1e-4);
        CHECK(set.delta("x") == doctest::Approx(g.sigma).epsilon(1e-6));
        CHECK(set.delta("p") == doctest::Approx(0.5 / g.sigma).epsilon(1e-4));
    }
}

TEST_CASE("gap tolerance scales with hbar and spacing") {
    auto fine = Grid::circle(4096);
    auto coarse = Grid::circle(64);
    CHECK(gap_tolerance(*fine) == doctest::Approx(1e-3));
    CHECK(gap_tolerance(*fine, 2.0) == doctest::Approx(2e-3));
    CHECK(gap_tolerance(*coarse) > 1e-3);
}

TEST_CASE("matrix observables and density matrices are validated") {
    Eigen::MatrixXcd bad(2, 2);
    bad << 0.0, 1.0, 0.0, 0.0;
    CHECK_THROWS_AS(MatrixObservable("bad", bad), DomainError);
    CHECK_THROWS_AS(DensityMatrix(Eigen::MatrixXcd::Identity(2, 2)), DomainError);
    Eigen::MatrixXcd neg(2, 2);
    neg << 1.5, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(DensityMatrix{neg}, DomainError);
}

TEST_CASE("matrix estimators") {
    const double hbar = 1.0, gamma = 2.0;
    auto m = magnetization_operators(1, gamma, hbar);
    Eigen::MatrixXcd up = Eigen::MatrixXcd::Zero(2, 2);
    up(0, 0) = 1.0;
    auto set = matrix_estimator_set(m, DensityMatrix(up));
    CHECK(set.mean("Mz").real() == doctest::Approx(hbar * gamma / 2));
    CHECK(set.delta("Mz") < 1e-15);
    CHECK(set.delta("Mx") == doctest::Approx(hbar * gamma / 2));
    CHECK(set.corr("Mx", "My").imag() == doctest::Approx(hbar * gamma * set.mean("Mz").real() / 2));

    auto id = matrix_estimator_set({MatrixObservable("one", Eigen::MatrixXcd::Identity(4, 4))},
                                   DensityMatrix(Eigen::MatrixXcd::Identity(4, 4) / 4.0));
    CHECK(id.mean("one").real() == doctest::Approx(1.0));
    CHECK(id.delta("one") < 1e-15);
}

TEST_CASE("random 4x4 matrices satisfy dA dB >= |C| >= |<[A,B]>| / 2") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::MatrixXcd a = random_hermitian(4, rng);
        const Eigen::MatrixXcd b = random_hermitian(4, rng);
        const DensityMatrix rho(random_density(4, rng));
        auto set = matrix_estimator_set({MatrixObservable("A", a), MatrixObservable("B", b)}, rho);
        const double comm = std::abs((rho.matrix() * (a * b - b * a)).trace()) / 2.0;
        const double c = std::abs(set.corr("A", "B"));
        CHECK(set.delta("A") * set.delta("B") >= c - 1e-12);
        CHECK(c >= comm - 1e-12);
    }
}

TEST_CASE("spin magnetization commutators") {
    for (int n = 1; n <= 3; ++n) {
        for (double gamma : {1.0, -0.7}) {
            auto m = magnetization_operators(n, gamma, 0.5);
            REQUIRE(m.size() == 3);
            CHECK(m[0].matrix.rows() == (1 << n));
            CHECK(magnetization_commutator_residual(m, gamma, 0.5) <= 1e-12);
        }
    }
    auto m = magnetization_operators(2, 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m[2].matrix);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
    CHECK(es.eigenvalues()(3) == doctest::Approx(1.0));
    CHECK_THROWS_AS(magnetization_operators(0, 1.0), DomainError);
}

TEST_CASE("grid estimators agree with a truncated oscillator basis") {
    // Levels 0..4 carry the state; a sixth level keeps x x exact on that span.
    const double mass = 1.0, omega = 1.0, hbar = 1.0;
    const int levels = 6;
    Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(levels, levels);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(levels, levels);
    const double scale = std::sqrt(hbar / (2 * mass * omega));
    for (int n = 0; n + 1 < levels; ++n) x(n, n + 1) = x(n + 1, n) = scale * std::sqrt(n + 1.0);
    for (int n = 0; n < levels; ++n) h(n, n) = hbar * omega * (n + 0.5);

    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(levels);
    for (int n = 0; n < 5; ++n) c(n) = complex(nd(rng), nd(rng));
    c.normalize();

    auto grid = Grid::segment(-14.0, 14.0, 4096);
    std::vector<complex> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double xi = grid->coordinate(i, 0) / (std::sqrt(2.0) * scale);
        for (int n = 0; n < 5; ++n) v[i] += c(n) * hermite_function(n, xi) / std::sqrt(std::sqrt(2.0) * scale);
    }
    ComplexField psi(grid, v);
    auto numeric = estimator_set({parse_operator("x"), parse_operator("H_osc")}, psi, hbar);
    auto matrix = matrix_estimator_set({MatrixObservable("x", x), MatrixObservable("H_osc", h)},
                                       DensityMatrix(c * c.adjoint()));
    for (const char* a : {"x", "H_osc"}) {
        CHECK(std::abs(numeric.mean(a) - matrix.mean(a)) < 1e-6);
        for (const char* b : {"x", "H_osc"}) CHECK(std::abs(numeric.corr(a, b) - matrix.corr(a, b)) < 1e-6);
    }
}

TEST_CASE("grid estimators agree with a truncated rotor basis") {
    // Lz and H_rotor are diagonal on Y_2m.
    const int l = 2;
    const double inertia = 1.0;
    std::mt19937_64 rng(21);
    std::normal_distribution<double> nd(0.0, 1.0);
    Eigen::VectorXcd c(2 * l + 1);
    for (auto& z : c) z = complex(nd(rng), nd(rng));
    c.normalize();
    DegenerateRotor r{l, std::vector<complex>(c.data(), c.data() + c.size())};
    Eigen::MatrixXcd lz = Eigen::MatrixXcd::Zero(2 * l + 1, 2 * l + 1);
    Eigen::MatrixXcd h = lz;
    for (int m = -l; m <= l; ++m) {
        lz(m + l, m + l) = m;
        h(m + l, m + l) = m * m / (2 * inertia);
    }
    auto psi = sample(r, default_grid(r, 32));
    auto numeric = estimator_set(parse_operator_list("Lz,H_rotor"), psi);
    auto matrix = matrix_estimator_set({MatrixObservable("Lz", lz), MatrixObservable("H_rotor", h)},
                                       DensityMatrix(c * c.adjoint()));
    for (const char* a : {"Lz", "H_rotor"}) {
        CHECK(std::abs(numeric.mean(a) - matrix.mean(a)) < 1e-6);
        for (const char* b : {"Lz", "H_rotor"}) CHECK(std::abs(numeric.corr(a, b) - matrix.corr(a, b)) < 1e-6);
    }
}
