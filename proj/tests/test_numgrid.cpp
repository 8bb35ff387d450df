#include <doctest.h>

#include <cmath>
#include <random>

#include "qfluct/channel.hpp"
#include "qfluct/numgrid.hpp"

using namespace qfluct;

namespace {

ComplexField tabulate(const GridPtr& g, auto fn) {
    std::vector<complex> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g->coordinate(i, 0));
    return ComplexField(g, std::move(v));
}

RealField tabulate_real(const GridPtr& g, auto fn) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(g->coordinate(i, 0));
    return RealField(g, std::move(v));
}

double sum_weights(const Grid& g) {
    double s = 0.0;
    for (double w : g.weights()) s += w;
    return s;
}

double max_rel_error(const ComplexField& got, auto exact) {
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        const complex e = exact(got.grid().coordinate(i, 0));
        worst = std::max(worst, std::abs(got[i] - e) / std::max(1.0, std::abs(e)));
    }
    return worst;
}

double variance(const RealField& rho) {
    const auto& g = rho.grid();
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const double x = g.coordinate(i, 0);
        const double w = g.weights()[i] * rho[i];
        m0 += w;
        m1 += w * x;
        m2 += w * x * x;
    }
    const double mean = m1 / m0;
    return m2 / m0 - mean * mean;
}

}  // namespace

TEST_CASE("circle of 8 nodes is the uniform partition") {
    auto g = build_grid(DomainKind::circle, 8);
    REQUIRE(g->size() == 8);
    CHECK(g->axis(0).spacing == doctest::Approx(pi / 4));
    for (std::size_t k = 0; k < 8; ++k) CHECK(g->coordinate(k, 0) == doctest::Approx(k * pi / 4));
    CHECK(g->coordinate(7, 0) < two_pi);
}

TEST_CASE("quadrature weights sum to the domain measure") {
    CHECK(sum_weights(*build_grid(DomainKind::segment, 16, 0.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sum_weights(*Grid::segment(-3.0, 5.0, 101)) == doctest::Approx(8.0).epsilon(1e-12));
    for (std::size_t n : {8, 9, 64, 2048}) {
        CHECK(sum_weights(*Grid::circle(n)) == doctest::Approx(two_pi).epsilon(1e-12));
    }
    CHECK(sum_weights(*Grid::plane(0, 1, 32, 0, 2, 48)) == doctest::Approx(2.0).epsilon(1e-12));
    auto s = Grid::sphere(64, 128);
    CHECK(std::abs(sum_weights(*s) - 4 * pi) < 1e-10);
    CHECK(s->measure() == doctest::Approx(4 * pi));
    for (double w : s->weights()) CHECK(w > 0.0);
}

TEST_CASE("polar weights integrate cos^2 theta sin theta exactly") {
    auto g = Grid::sphere(33, 8);
    const auto& ax = g->axis(0);
    double s = 0.0;
    for (std::size_t k = 0; k < ax.size(); ++k) s += ax.weights[k] * std::pow(std::cos(ax.nodes[k]), 2);
    CHECK(s == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("grid construction rejects bad input") {
    CHECK_THROWS_AS(Grid::circle(4), DomainError);
    CHECK_THROWS_AS(Grid::segment(0.0, 1.0, 7), DomainError);
    CHECK_THROWS_AS(Grid::segment(0.0, INFINITY, 32), DomainError);
    CHECK_THROWS_AS(Grid::segment(1.0, 0.0, 32), DomainError);
    auto g = Grid::circle(16);
    CHECK_THROWS_AS(ComplexField(g, std::vector<complex>(15)), DomainError);
    std::vector<complex> bad(16, 1.0);
    bad[3] = complex(NAN, 0.0);
    CHECK_THROWS_AS(ComplexField(g, bad), DomainError);
}

TEST_CASE("integration of simple fields") {
    auto c = Grid::circle(2048);
    CHECK(integrate(tabulate(c, [](double) { return complex(1.0); })).real() == doctest::Approx(two_pi));
    const double a = 1.0 / std::sqrt(two_pi);
    auto psi = tabulate(c, [&](double p) { return std::polar(a, 3 * p); });
    CHECK(std::abs(norm_squared(psi) - 1.0) < 1e-10);

    auto s = Grid::segment(-8.0, 8.0, 2048);
    auto packet = tabulate(s, [](double x) { return complex(std::pow(two_pi, -0.25) * std::exp(-x * x / 4)); });
    CHECK(std::abs(norm_squared(packet) - 1.0) < 1e-8);

    auto other = Grid::circle(1024);
    CHECK_THROWS_AS(integrate(psi, *other), DomainError);
    CHECK_THROWS_AS(inner_product(psi, tabulate(other, [](double) { return complex(1.0); })), DomainError);
}

TEST_CASE("circle quadrature treats the last cell by extrapolation") {
    auto c = Grid::circle(1024);
    // int_0^{2pi} phi^2 = 8 pi^3 / 3, not periodic, so a wrapped rule would be O(h) off.
    auto f = tabulate_real(c, [](double p) { return p * p; });
    CHECK(integrate(f) == doctest::Approx(8 * pi * pi * pi / 3).epsilon(1e-5));
}

TEST_CASE("first derivative on the circle") {
    auto c = Grid::circle(2048);
    auto f = tabulate(c, [](double p) { return std::polar(1.0, p); });
    auto d = differentiate(f, 1);
    CHECK(max_rel_error(d, [](double p) { return complex(0, 1) * std::polar(1.0, p); }) < 1e-4);

    auto g = tabulate(c, [](double p) { return p * std::polar(1.0, p); });
    auto dg = differentiate(g, 1);
    const std::size_t last = c->size() - 1;
    const double p = c->coordinate(last, 0);
    const complex exact = (1.0 + complex(0, 1) * p) * std::polar(1.0, p);
    CHECK(std::abs(dg[last] - exact) < 1e-3);
}

TEST_CASE("derivative of a constant vanishes in the interior") {
    auto s = Grid::segment(0.0, 1.0, 64);
    auto f = tabulate(s, [](double) { return complex(2.5, -1.0); });
    for (int order : {1, 2}) {
        auto d = differentiate(f, order);
        for (std::size_t i = 2; i + 2 < s->size(); ++i) CHECK(d[i] == complex(0.0));
    }
    CHECK_THROWS_AS(differentiate(f, 3), DomainError);
}

TEST_CASE("differentiation error shrinks at least threefold when nodes double") {
    for (int m : {1, 2, 3}) {
        double prev = 0.0;
        for (std::size_t n : {64, 128, 256, 512}) {
            auto c = Grid::circle(n);
            auto f = tabulate(c, [&](double p) { return std::polar(1.0, m * p); });
            const double err = max_rel_error(differentiate(f, 1), [&](double p) {
                return complex(0, m) * std::polar(1.0, m * p);
            });
            if (prev > 0.0) CHECK(prev / err >= 3.0);
            prev = err;
        }
    }
}

TEST_CASE("twice the first derivative matches the second derivative") {
    auto s = Grid::segment(-8.0, 8.0, 2048);
    auto f = tabulate(s, [](double x) { return std::exp(-x * x / 4) * std::polar(1.0, 1.5 * x); });
    auto twice = differentiate(differentiate(f, 1), 1);
    auto direct = differentiate(f, 2);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        num = std::max(num, std::abs(twice[i] - direct[i]));
        den = std::max(den, std::abs(direct[i]));
    }
    CHECK(num / den < 1e-3);
}

TEST_CASE("derivatives act along the selected axis of a plane") {
    auto g = Grid::plane(0, 1, 40, 0, 2, 60);
    std::vector<complex> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = g->coordinate(i, 0) * 3.0 + g->coordinate(i, 1) * g->coordinate(i, 1);
    ComplexField f(g, v);
    auto dx = differentiate(f, 1, 0);
    auto dy = differentiate(f, 1, 1);
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(std::abs(dx[i] - 3.0) < 1e-10);
        CHECK(std::abs(dy[i] - 2.0 * g->coordinate(i, 1)) < 1e-10);
    }
}

TEST_CASE("cubic extrapolation is exact on cubics") {
    std::vector<double> line;
    auto cubic = [](double t) { return 1.0 - 2.0 * t + 0.5 * t * t + 0.25 * t * t * t; };
    for (int k = 0; k < 6; ++k) line.push_back(cubic(k));
    CHECK(extrapolate_upper(std::span<const double>(line)) == doctest::Approx(cubic(6)));
    auto c = Grid::circle(512);
    auto f = tabulate(c, [](double p) { return complex(std::cos(p / 4), 0.0); });
    CHECK(std::abs(upper_limit(f) - std::cos(pi / 2)) < 1e-9);
}

TEST_CASE("identity kernel leaves the field unchanged") {
    auto s = Grid::segment(-4.0, 4.0, 256);
    auto f = tabulate(s, [](double x) { return complex(std::exp(-x * x), x); });
    auto k = make_gaussian_kernel(s, 0.0);
    CHECK(k.is_identity());
    auto out = convolve(k, f);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(out[i] == f[i]);
    CHECK(k.row_integral(10) == doctest::Approx(1.0));
}

TEST_CASE("gaussian convolution adds variances") {
    auto s = Grid::segment(-8.0, 8.0, 2048);
    const double sigma = 1.0, gamma = 0.5;
    auto rho = tabulate_real(s, [&](double x) { return std::exp(-x * x / (2 * sigma * sigma)) / std::sqrt(two_pi); });
    auto out = convolve(make_gaussian_kernel(s, gamma), rho);
    CHECK(std::abs(variance(out) - (sigma * sigma + gamma * gamma)) < 1e-4);
    CHECK(std::abs(integrate(out) - 1.0) < 1e-8);
}

TEST_CASE("convolution with a normalized kernel preserves the integral of nonnegative fields") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto s = Grid::segment(-5.0, 5.0, 400);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(s->size());
        for (auto& x : v) x = u(rng);
        RealField f(s, v);
        auto k = make_gaussian_kernel(s, 0.05 + 1.0 * u(rng));
        CHECK(std::abs(integrate(convolve(k, f)) - integrate(f)) < 1e-8 * std::max(1.0, integrate(f)));
    }
}

TEST_CASE("kernel must conform to the field grid") {
    auto a = Grid::segment(-4.0, 4.0, 128);
    auto b = Grid::segment(-4.0, 4.0, 129);
    auto k = make_gaussian_kernel(a, 0.3);
    CHECK_THROWS_AS(convolve(k, RealField(b)), DomainError);
    CHECK_THROWS_AS(Kernel(a, 0, 0.3, std::vector<double>(10)), DomainError);
}
