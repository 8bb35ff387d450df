#include "qfluct/numgrid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qfluct {

namespace {

void require_nodes(std::size_t n, const char* axis) {
    if (n < min_axis_nodes) {
        throw DomainError(std::string("grid axis '") + axis + "' needs at least " +
                          std::to_string(min_axis_nodes) + " nodes, got " + std::to_string(n));
    }
}

Axis segment_axis(double lo, double hi, std::size_t n) {
    require_nodes(n, "segment");
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("segment bounds must be finite");
    }
    if (!(hi > lo)) {
        throw DomainError("segment upper bound must exceed the lower bound");
    }
    Axis a{AxisKind::segment, lo, hi, (hi - lo) / static_cast<double>(n - 1), {}, {}};
    a.nodes.resize(n);
    a.weights.assign(n, a.spacing);
    for (std::size_t i = 0; i < n; ++i) {
        a.nodes[i] = lo + a.spacing * static_cast<double>(i);
    }
    a.nodes.back() = hi;
    a.weights.front() *= 0.5;
    a.weights.back() *= 0.5;
    return a;
}

Axis circle_axis(std::size_t n) {
    require_nodes(n, "circle");
    const double h = two_pi / static_cast<double>(n);
    Axis a{AxisKind::circle, 0.0, two_pi, h, {}, {}};
    a.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        a.nodes[i] = h * static_cast<double>(i);
    }
    // Trapezoid over [0, (n-1)h] plus the last cell [(n-1)h, 2pi] integrated
    // against the linear extrapolation through nodes n-2 and n-1.
    a.weights.assign(n, h);
    a.weights[0] = 0.5 * h;
    a.weights[n - 2] = 0.5 * h;
    a.weights[n - 1] = 2.0 * h;
    return a;
}

// Clenshaw-Curtis weights on theta_k = k pi / (n-1); they integrate
// f(theta) sin(theta) over [0, pi].
Axis polar_axis(std::size_t n) {
    require_nodes(n, "polar");
    const std::size_t intervals = n - 1;
    const double h = pi / static_cast<double>(intervals);
    Axis a{AxisKind::polar, 0.0, pi, h, {}, {}};
    a.nodes.resize(n);
    a.weights.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double theta = h * static_cast<double>(k);
        a.nodes[k] = theta;
        double sum = 1.0;
        for (std::size_t j = 1; j <= intervals / 2; ++j) {
            const double b = (2 * j == intervals) ? 1.0 : 2.0;
            sum -= b / (4.0 * static_cast<double>(j * j) - 1.0) *
                   std::cos(2.0 * static_cast<double>(j) * theta);
        }
        const double c = (k == 0 || k == intervals) ? 1.0 : 2.0;
        a.weights[k] = c / static_cast<double>(intervals) * sum;
    }
    a.nodes.back() = pi;
    return a;
}

double axis_measure(const Axis& a) {
    return a.kind == AxisKind::polar ? 2.0 : a.span();
}

}  // namespace

Grid::Grid(DomainKind kind, std::vector<Axis> axes) : kind_(kind), axes_(std::move(axes)) {
    std::size_t total = 1;
    for (const auto& a : axes_) total *= a.size();
    weights_.resize(total);
    if (axes_.size() == 1) {
        weights_ = axes_[0].weights;
    } else {
        const auto& a0 = axes_[0];
        const auto& a1 = axes_[1];
        for (std::size_t i = 0; i < a0.size(); ++i) {
            for (std::size_t j = 0; j < a1.size(); ++j) {
                weights_[i * a1.size() + j] = a0.weights[i] * a1.weights[j];
            }
        }
    }
}

GridPtr Grid::segment(double lo, double hi, std::size_t nodes) {
    return GridPtr(new Grid(DomainKind::segment, {segment_axis(lo, hi, nodes)}));
}

GridPtr Grid::circle(std::size_t nodes) {
    return GridPtr(new Grid(DomainKind::circle, {circle_axis(nodes)}));
}

GridPtr Grid::plane(double x_lo, double x_hi, std::size_t nx, double y_lo, double y_hi,
                    std::size_t ny) {
    return GridPtr(
        new Grid(DomainKind::plane, {segment_axis(x_lo, x_hi, nx), segment_axis(y_lo, y_hi, ny)}));
}

GridPtr Grid::sphere(std::size_t n_theta, std::size_t n_phi) {
    return GridPtr(new Grid(DomainKind::sphere, {polar_axis(n_theta), circle_axis(n_phi)}));
}

GridPtr build_grid(DomainKind kind, std::size_t nodes, double lo, double hi) {
    switch (kind) {
        case DomainKind::segment: return Grid::segment(lo, hi, nodes);
        case DomainKind::circle: return Grid::circle(nodes);
        case DomainKind::plane: return Grid::plane(lo, hi, nodes, lo, hi, nodes);
        case DomainKind::sphere: return Grid::sphere(nodes, 2 * nodes);
    }
    throw DomainError("unknown domain kind");
}

double Grid::measure() const {
    double m = 1.0;
    for (const auto& a : axes_) m *= axis_measure(a);
    return m;
}

std::size_t Grid::stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t k = axis + 1; k < axes_.size(); ++k) s *= axes_[k].size();
    return s;
}

double Grid::coordinate(std::size_t index, std::size_t axis) const {
    const auto& a = axes_.at(axis);
    return a.nodes[(index / stride(axis)) % a.size()];
}

double Grid::max_spacing() const {
    double h = 0.0;
    for (const auto& a : axes_) h = std::max(h, a.spacing);
    return h;
}

bool Grid::conforms(const Grid& other) const {
    if (this == &other) return true;
    if (kind_ != other.kind_ || axes_.size() != other.axes_.size()) return false;
    for (std::size_t k = 0; k < axes_.size(); ++k) {
        const auto& a = axes_[k];
        const auto& b = other.axes_[k];
        if (a.kind != b.kind || a.size() != b.size()) return false;
        const double tol = 1e-12 * std::max(1.0, std::abs(a.span()));
        if (std::abs(a.lo - b.lo) > tol || std::abs(a.hi - b.hi) > tol) return false;
    }
    return true;
}

void require_conforming(const Grid& a, const Grid& b, const char* what) {
    if (!a.conforms(b)) {
        throw DomainError(std::string(what) + ": grids do not conform");
    }
}

// ---------------------------------------------------------------------------
// Field

template <class T>
Field<T>::Field(GridPtr grid) : grid_(std::move(grid)) {
    if (!grid_) throw DomainError("field needs a grid");
    values_.assign(grid_->size(), T{});
}

template <class T>
Field<T>::Field(GridPtr grid, std::vector<T> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) throw DomainError("field needs a grid");
    if (values_.size() != grid_->size()) {
        throw DomainError("field has " + std::to_string(values_.size()) +
                          " values for a grid of " + std::to_string(grid_->size()) + " nodes");
    }
    for (const auto& v : values_) {
        if constexpr (std::is_same_v<T, complex>) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                throw DomainError("field contains a non-finite value");
            }
        } else {
            if (!std::isfinite(v)) throw DomainError("field contains a non-finite value");
        }
    }
}

template class Field<complex>;
template class Field<double>;

namespace {

template <class F>
ComplexField zip(const ComplexField& a, const ComplexField& b, F op, const char* what) {
    require_conforming(a.grid(), b.grid(), what);
    std::vector<complex> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
    return ComplexField(a.grid_ptr(), std::move(out));
}

}  // namespace

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
    return zip(a, b, [](complex x, complex y) { return x + y; }, "field sum");
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
    return zip(a, b, [](complex x, complex y) { return x - y; }, "field difference");
}

ComplexField operator*(complex s, const ComplexField& f) {
    std::vector<complex> out(f.values().begin(), f.values().end());
    for (auto& v : out) v *= s;
    return ComplexField(f.grid_ptr(), std::move(out));
}

ComplexField multiply_by_coordinate(const ComplexField& f, std::size_t axis) {
    const Grid& g = f.grid();
    std::vector<complex> out(f.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = g.coordinate(i, axis) * f[i];
    return ComplexField(f.grid_ptr(), std::move(out));
}

ComplexField to_complex(const RealField& f) {
    std::vector<complex> out(f.values().begin(), f.values().end());
    return ComplexField(f.grid_ptr(), std::move(out));
}

// ---------------------------------------------------------------------------
// Quadrature

complex integrate(const ComplexField& f) {
    const auto w = f.grid().weights();
    complex s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i];
    return s;
}

double integrate(const RealField& f) {
    const auto w = f.grid().weights();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * f[i];
    return s;
}

complex integrate(const ComplexField& f, const Grid& grid) {
    require_conforming(f.grid(), grid, "integrate");
    return integrate(f);
}

double integrate(const RealField& f, const Grid& grid) {
    require_conforming(f.grid(), grid, "integrate");
    return integrate(f);
}

complex inner_product(const ComplexField& f, const ComplexField& g) {
    require_conforming(f.grid(), g.grid(), "inner product");
    const auto w = f.grid().weights();
    complex s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::conj(f[i]) * g[i];
    return s;
}

double norm_squared(const ComplexField& f) {
    const auto w = f.grid().weights();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::norm(f[i]);
    return s;
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

// Applies the derivative stencil to one line of samples f[start + k*stride].
template <class T>
void differentiate_line(const T* in, T* out, std::size_t n, std::size_t stride, double h,
                        int order) {
    auto f = [&](std::size_t k) { return in[k * stride]; };
    auto put = [&](std::size_t k, T v) { out[k * stride] = v; };
    const std::size_t m = n - 1;
    if (order == 1) {
        const double c = 1.0 / (12.0 * h);
        put(0, c * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)));
        put(1, c * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)));
        for (std::size_t k = 2; k + 2 < n; ++k) {
            put(k, c * (f(k - 2) - 8.0 * f(k - 1) + 8.0 * f(k + 1) - f(k + 2)));
        }
        put(m - 1, -c * (-3.0 * f(m) - 10.0 * f(m - 1) + 18.0 * f(m - 2) - 6.0 * f(m - 3) +
                         f(m - 4)));
        put(m, -c * (-25.0 * f(m) + 48.0 * f(m - 1) - 36.0 * f(m - 2) + 16.0 * f(m - 3) -
                     3.0 * f(m - 4)));
    } else {
        const double c = 1.0 / (12.0 * h * h);
        put(0, c * (45.0 * f(0) - 154.0 * f(1) + 214.0 * f(2) - 156.0 * f(3) + 61.0 * f(4) -
                    10.0 * f(5)));
        put(1, c * (10.0 * f(0) - 15.0 * f(1) - 4.0 * f(2) + 14.0 * f(3) - 6.0 * f(4) + f(5)));
        for (std::size_t k = 2; k + 2 < n; ++k) {
            put(k, c * (-f(k - 2) + 16.0 * f(k - 1) - 30.0 * f(k) + 16.0 * f(k + 1) - f(k + 2)));
        }
        put(m - 1, c * (10.0 * f(m) - 15.0 * f(m - 1) - 4.0 * f(m - 2) + 14.0 * f(m - 3) -
                        6.0 * f(m - 4) + f(m - 5)));
        put(m, c * (45.0 * f(m) - 154.0 * f(m - 1) + 214.0 * f(m - 2) - 156.0 * f(m - 3) +
                    61.0 * f(m - 4) - 10.0 * f(m - 5)));
    }
}

template <class T>
Field<T> differentiate_impl(const Field<T>& f, int order, std::size_t axis) {
    if (order != 1 && order != 2) throw DomainError("derivative order must be 1 or 2");
    const Grid& g = f.grid();
    if (axis >= g.rank()) throw DomainError("derivative axis out of range");
    const Axis& a = g.axis(axis);
    const std::size_t n = a.size();
    if (n < 6) throw DomainError("differentiation needs at least 6 nodes on the axis");

    const std::size_t stride = g.stride(axis);
    const std::size_t block = stride * n;
    std::vector<T> out(f.size());
    const T* in = f.values().data();
    for (std::size_t outer = 0; outer < f.size(); outer += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            const std::size_t start = outer + inner;
            differentiate_line(in + start, out.data() + start, n, stride, a.spacing, order);
        }
    }
    return Field<T>(f.grid_ptr(), std::move(out));
}

template <class T>
T extrapolate_upper_impl(std::span<const T> line) {
    const std::size_t n = line.size();
    if (n < 4) throw DomainError("extrapolation needs at least 4 samples");
    return 4.0 * line[n - 1] - 6.0 * line[n - 2] + 4.0 * line[n - 3] - line[n - 4];
}

}  // namespace

ComplexField differentiate(const ComplexField& f, int order, std::size_t axis) {
    return differentiate_impl(f, order, axis);
}

RealField differentiate(const RealField& f, int order, std::size_t axis) {
    return differentiate_impl(f, order, axis);
}

complex extrapolate_upper(std::span<const complex> line) { return extrapolate_upper_impl(line); }
double extrapolate_upper(std::span<const double> line) { return extrapolate_upper_impl(line); }

complex upper_limit(const ComplexField& f) {
    if (f.grid().kind() != DomainKind::circle) {
        throw DomainError("psi(2pi - 0) is only defined for circle grids");
    }
    return extrapolate_upper(f.values());
}

// ---------------------------------------------------------------------------
// Kernels

Kernel::Kernel(GridPtr grid, std::size_t axis) : grid_(std::move(grid)), axis_(axis) {
    if (!grid_) throw DomainError("kernel needs a grid");
    if (axis_ >= grid_->rank()) throw DomainError("kernel axis out of range");
    n_ = grid_->axis(axis_).size();
}

Kernel Kernel::identity(GridPtr grid, std::size_t axis) { return Kernel(std::move(grid), axis); }

Kernel::Kernel(GridPtr grid, std::size_t axis, double width, std::vector<double> matrix)
    : Kernel(std::move(grid), axis) {
    if (!(width >= 0.0) || !std::isfinite(width)) {
        throw DomainError("kernel width must be finite and non-negative");
    }
    width_ = width;
    if (matrix.size() != n_ * n_) {
        throw DomainError("kernel matrix does not conform to the grid axis");
    }
    for (double v : matrix) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw DomainError("kernel weights must be finite and non-negative");
        }
    }
    matrix_ = std::move(matrix);
}

double Kernel::operator()(std::size_t i, std::size_t j) const {
    if (is_identity()) {
        return i == j ? 1.0 / grid_->axis(axis_).weights[i] : 0.0;
    }
    return matrix_[i * n_ + j];
}

double Kernel::row_integral(std::size_t i) const {
    const auto& q = grid_->axis(axis_).weights;
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * q[j];
    return s;
}

double Kernel::column_integral(std::size_t j) const {
    const auto& q = grid_->axis(axis_).weights;
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += q[i] * (*this)(i, j);
    return s;
}

namespace {

template <class T>
Field<T> convolve_impl(const Kernel& kernel, const Field<T>& f) {
    require_conforming(kernel.grid(), f.grid(), "convolve");
    if (kernel.is_identity()) return f;

    const Grid& g = f.grid();
    const std::size_t axis = kernel.axis();
    const std::size_t n = kernel.size();
    const std::size_t stride = g.stride(axis);
    const std::size_t block = stride * n;
    const auto& q = g.axis(axis).weights;

    std::vector<T> out(f.size(), T{});
    std::vector<T> weighted(n);
    for (std::size_t outer = 0; outer < f.size(); outer += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) {
            const std::size_t start = outer + inner;
            for (std::size_t j = 0; j < n; ++j) weighted[j] = q[j] * f[start + j * stride];
            for (std::size_t i = 0; i < n; ++i) {
                T acc{};
                for (std::size_t j = 0; j < n; ++j) acc += kernel(i, j) * weighted[j];
                out[start + i * stride] = acc;
            }
        }
    }
    return Field<T>(f.grid_ptr(), std::move(out));
}

}  // namespace

ComplexField convolve(const Kernel& kernel, const ComplexField& f) {
    return convolve_impl(kernel, f);
}

RealField convolve(const Kernel& kernel, const RealField& f) { return convolve_impl(kernel, f); }

}  // namespace qfluct
