#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "qfluct/errors.hpp"

namespace qfluct {

using complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

enum class DomainKind { segment, circle, plane, sphere };

/// How a single axis is sampled and integrated.
///  - segment: closed interval [lo, hi], endpoints are nodes, trapezoid weights.
///  - circle: [0, 2pi) with nodes k*h, h = 2pi/N. Numerically this is the closed
///    segment [0, 2pi]; the value at 2pi-0 is never wrapped to node 0 but
///    extrapolated from the last nodes, and the final cell is integrated with
///    that extrapolation.
///  - polar: theta in [0, pi] with uniform nodes and Clenshaw-Curtis weights
///    that already contain the sin(theta) surface factor.
enum class AxisKind { segment, circle, polar };

struct Axis {
    AxisKind kind;
    double lo;
    double hi;
    double spacing;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
    double span() const { return hi - lo; }
};

inline constexpr std::size_t min_axis_nodes = 8;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Immutable tensor-product grid. Flat indices are row-major with axis 0 slowest.
class Grid {
public:
    static GridPtr segment(double lo, double hi, std::size_t nodes);
    static GridPtr circle(std::size_t nodes);
    static GridPtr plane(double x_lo, double x_hi, std::size_t nx,
                         double y_lo, double y_hi, std::size_t ny);
    static GridPtr sphere(std::size_t n_theta, std::size_t n_phi);

    DomainKind kind() const { return kind_; }
    std::size_t rank() const { return axes_.size(); }
    const Axis& axis(std::size_t i) const { return axes_.at(i); }
    std::size_t size() const { return weights_.size(); }
    std::span<const double> weights() const { return weights_; }
    double measure() const;

    std::size_t stride(std::size_t axis) const;
    /// Position along `axis` of the node with flat index `index`.
    double coordinate(std::size_t index, std::size_t axis) const;
    /// Largest spacing over all axes.
    double max_spacing() const;

    bool conforms(const Grid& other) const;

private:
    Grid(DomainKind kind, std::vector<Axis> axes);

    DomainKind kind_;
    std::vector<Axis> axes_;
    std::vector<double> weights_;
};

/// Grid factory keyed by domain kind. Segment bounds are taken from `lo`/`hi`;
/// the circle ignores them. Use the named factories for 2D domains.
GridPtr build_grid(DomainKind kind, std::size_t nodes, double lo = 0.0, double hi = 1.0);

/// Samples on a grid. Values are finite; the grid is shared and immutable.
template <class T>
class Field {
public:
    explicit Field(GridPtr grid);
    Field(GridPtr grid, std::vector<T> values);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    std::span<const T> values() const { return values_; }
    const T& operator[](std::size_t i) const { return values_[i]; }

private:
    GridPtr grid_;
    std::vector<T> values_;
};

using ComplexField = Field<complex>;
using RealField = Field<double>;

extern template class Field<complex>;
extern template class Field<double>;

ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(complex s, const ComplexField& f);
/// Pointwise product with the coordinate of `axis`.
ComplexField multiply_by_coordinate(const ComplexField& f, std::size_t axis);
ComplexField to_complex(const RealField& f);

/// Throws DomainError unless both fields live on conforming grids.
void require_conforming(const Grid& a, const Grid& b, const char* what);

complex integrate(const ComplexField& f);
double integrate(const RealField& f);
complex integrate(const ComplexField& f, const Grid& grid);
double integrate(const RealField& f, const Grid& grid);

/// Discrete scalar product sum_i w_i conj(f_i) g_i.
complex inner_product(const ComplexField& f, const ComplexField& g);
double norm_squared(const ComplexField& f);

/// Finite-difference derivative of order 1 or 2 along `axis`. Fourth-order
/// central stencils inside, fourth-order one-sided stencils on the two extremity
/// nodes of the axis. Circles are never wrapped.
ComplexField differentiate(const ComplexField& f, int order, std::size_t axis = 0);
RealField differentiate(const RealField& f, int order, std::size_t axis = 0);

/// Cubic extrapolation of samples to one spacing past the last node, i.e. the
/// limit value f(hi - 0) for a circle axis.
complex extrapolate_upper(std::span<const complex> line);
double extrapolate_upper(std::span<const double> line);

/// psi(2pi - 0) for a field on a circle grid.
complex upper_limit(const ComplexField& f);

/// Transfer kernel acting along one axis of a grid. Weights are W[i][j] over the
/// axis nodes and are applied as out_i = sum_j W_ij f_j q_j with q the axis
/// quadrature weights. A zero width denotes the identity kernel.
class Kernel {
public:
    static Kernel identity(GridPtr grid, std::size_t axis = 0);
    Kernel(GridPtr grid, std::size_t axis, double width, std::vector<double> matrix);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t axis() const { return axis_; }
    std::size_t size() const { return n_; }
    double width() const { return width_; }
    bool is_identity() const { return matrix_.empty(); }
    double operator()(std::size_t i, std::size_t j) const;

    /// sum_j W_ij q_j
    double row_integral(std::size_t i) const;
    /// sum_i q_i W_ij
    double column_integral(std::size_t j) const;

private:
    Kernel(GridPtr grid, std::size_t axis);

    GridPtr grid_;
    std::size_t axis_ = 0;
    std::size_t n_ = 0;
    double width_ = 0.0;
    std::vector<double> matrix_;
};

ComplexField convolve(const Kernel& kernel, const ComplexField& f);
RealField convolve(const Kernel& kernel, const RealField& f);

}  // namespace qfluct
