#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qfluct/numgrid.hpp"

namespace qfluct {

/// psi_m(phi) = e^{i m phi} / sqrt(2 pi) on the circle.
struct AzimuthalEigenstate {
    int m = 0;
};

/// Oscillator eigenstate in the phase representation, e^{-i N phi} / sqrt(2 pi).
struct PhaseEigenstate {
    int N = 0;
};

/// Torsion pendulum eigenstate; phi runs over the real line, truncated.
struct TorsionPendulum {
    int N = 0;
    double I = 1.0;
    double omega = 1.0;
};

/// sum_m c_m Y_lm on the sphere; c[m + l] holds c_m.
struct DegenerateRotor {
    int l = 0;
    std::vector<complex> c;
};

struct GaussianPacket {
    double x0 = 0.0;
    double sigma = 1.0;
    double k = 0.0;
};

/// Ground state of a rectangular well 0 < x1 < a, 0 < y1 < b whose frame is
/// rotated by 45 degrees relative to the (x, y) axes.
struct Box2DGround {
    double a = 1.0;
    double b = 2.0;
};

struct RawGrid {
    ComplexField field;
};

using StateSpec = std::variant<AzimuthalEigenstate, PhaseEigenstate, TorsionPendulum,
                               DegenerateRotor, GaussianPacket, Box2DGround, RawGrid>;

/// Parses `azimuthal:m=1`, `phase:N=2`, `qtp:N=0,I=1,omega=1`,
/// `rotor:l=1,c=[0,1,0]`, `gaussian:x0=0,sigma=1,k=1`, `box2d:a=1,b=2`.
/// Rotor coefficients may be complex, written `re+imi` or `(re,im)`.
StateSpec parse_state(std::string_view text);
std::string format_state(const StateSpec& spec);
/// Short tag naming the alternative: azimuthal, phase, qtp, rotor, gaussian, box2d, raw.
std::string state_kind(const StateSpec& spec);
/// Throws DomainError for out-of-range parameters.
void validate_state(const StateSpec& spec);

DomainKind state_domain(const StateSpec& spec);

/// Grid suited to the state. `nodes` = 0 selects the default resolution; for
/// 2D domains it is the count along each axis (sphere: theta count, phi = 32x).
GridPtr default_grid(const StateSpec& spec, std::size_t nodes = 0, double hbar = 1.0,
                     double extra_width = 0.0);

/// Normalized hermite function phi_n(xi) = (2^n n! sqrt(pi))^{-1/2} H_n(xi) e^{-xi^2/2}.
double hermite_function(int n, double xi);
/// Orthonormal spherical harmonic with the Condon-Shortley phase, l <= 3.
complex spherical_harmonic(int l, int m, double theta, double phi);

ComplexField sample(const StateSpec& spec, const GridPtr& grid, double hbar = 1.0);

struct DensityCurrent {
    RealField density;
    /// One component per grid axis.
    std::vector<RealField> current;
};

/// rho = |psi|^2, J = (hbar/m) Im(psi* grad psi) per axis.
DensityCurrent density_and_current(const ComplexField& psi, double mass, double hbar = 1.0);

struct CardEntry {
    std::string label;
    complex value;
    std::string source;
};

/// Closed-form values known for a catalog state. Labels: `mean:A`, `delta:A`,
/// `corr:A,B`, `corr_abs:A,B`, `gap:A,B`.
struct ClosedFormCard {
    std::string state;
    std::vector<CardEntry> entries;

    std::optional<complex> find(std::string_view label) const;
};

ClosedFormCard closed_form_card(const StateSpec& spec, double hbar = 1.0);

}  // namespace qfluct
