#include "qfluct/urelations.hpp"

#include <cmath>

namespace qfluct {

std::string to_string(URClass c) {
    switch (c) {
        case URClass::rs_valid: return "RS_VALID";
        case URClass::cs_only: return "CS_ONLY";
        case URClass::trivial_zero: return "TRIVIAL_ZERO";
        case URClass::rs_violated: return "RS_VIOLATED";
    }
    return "?";
}

URVerdict relation_verdict(const EstimatorSet& set, std::string_view a, std::string_view b,
                           const PairConditions& cond, double tol) {
    if (!(tol > 0.0)) throw DomainError("verdict tolerance must be positive");
    const std::size_t ia = set.index(a);
    const std::size_t ib = set.index(b);
    if (set.correlation.rows() != static_cast<Eigen::Index>(set.size())) {
        throw DomainError("estimator set lacks its correlation matrix");
    }

    URVerdict v;
    v.pair = std::string(a) + "," + std::string(b);
    v.delta_a = set.deltas[ia];
    v.delta_b = set.deltas[ib];
    v.lhs = v.delta_a * v.delta_b;
    v.cs_rhs = std::abs(set.correlation(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ib)));
    v.rs_rhs = 0.5 * std::abs(cond.commutator);
    v.gap_ab = cond.gap_ab;
    v.gap_ba = cond.gap_ba;

    if (v.delta_a < tol || v.delta_b < tol) {
        v.cls = URClass::trivial_zero;
    } else if (v.lhs < v.rs_rhs - tol) {
        v.cls = URClass::rs_violated;
    } else if (std::abs(v.gap_ab) < tol && std::abs(v.gap_ba) < tol && v.rs_rhs >= tol) {
        v.cls = URClass::rs_valid;
    } else {
        v.cls = URClass::cs_only;
    }
    return v;
}

URVerdict audit_pair(const OperatorSpec& a, const OperatorSpec& b, const ComplexField& psi,
                     double hbar, double tol) {
    if (tol <= 0.0) tol = gap_tolerance(psi.grid(), hbar);
    const EstimatorSet set = estimator_set({a, b}, psi, hbar);
    PairConditions cond{condition_gap(a, b, psi, hbar), condition_gap(b, a, psi, hbar),
                        commutator_mean(a, b, psi, hbar)};
    return relation_verdict(set, set.labels[0], set.labels[1], cond, tol);
}

Determinant correlation_determinant(const EstimatorSet& set) {
    const auto r = set.correlation.rows();
    if (r == 0 || r > 4 || set.correlation.cols() != r) {
        throw DomainError("determinant needs a square correlation matrix of size 1..4");
    }
    const double scale = std::max(1.0, set.correlation.cwiseAbs().maxCoeff());
    if ((set.correlation - set.correlation.adjoint()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw DomainError("correlation matrix is not Hermitian");
    }
    Determinant d;
    d.value = set.correlation.determinant().real();
    d.nonnegative = d.value >= -1e-8;
    return d;
}

double boundary_rhs(const ComplexField& psi, double hbar) {
    if (psi.grid().kind() != DomainKind::circle) {
        throw DomainError("boundary bound needs a circle state");
    }
    return 0.5 * hbar * std::abs(1.0 - two_pi * std::norm(upper_limit(psi)));
}

URVerdict energy_time_verdict(double delta_e, double hbar) {
    if (!(delta_e >= 0.0) || !std::isfinite(delta_e)) {
        throw DomainError("energy spread must be finite and non-negative");
    }
    URVerdict v;
    v.pair = "E,t";
    v.delta_a = delta_e;
    v.delta_b = 0.0;
    v.lhs = 0.0;
    v.cs_rhs = 0.0;
    v.rs_rhs = 0.5 * hbar;
    v.gap_ab = complex(0.0, -hbar);
    v.gap_ba = 0.0;
    v.cls = URClass::trivial_zero;
    return v;
}

complex rotor_gap_reference(const DegenerateRotor& rotor, const GridPtr& grid, double hbar) {
    validate_state(rotor);
    if (!grid || grid->kind() != DomainKind::sphere) {
        throw DomainError("rotor reference gap needs a sphere grid");
    }
    const int l = rotor.l;
    std::vector<ComplexField> ylm;
    for (int m = -l; m <= l; ++m) {
        DegenerateRotor single{l, std::vector<complex>(2 * l + 1, 0.0)};
        single.c[m + l] = 1.0;
        ylm.push_back(sample(single, grid));
    }
    OperatorSpec phi{OpKind::phi};
    complex sum = 0.0;
    for (int m = -l; m <= l; ++m) {
        const complex cm = rotor.c[m + l];
        if (cm == 0.0 || m == 0) continue;
        for (int r = -l; r <= l; ++r) {
            const complex cr = rotor.c[r + l];
            if (cr == 0.0) continue;
            sum += std::conj(cm) * cr * static_cast<double>(m) *
                   inner_product(ylm[m + l], apply(phi, ylm[r + l], hbar));
        }
    }
    return complex(0.0, hbar) * (1.0 + 2.0 * sum.imag());
}

}  // namespace qfluct
