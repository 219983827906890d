#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace topgrad {

enum class LawKind { quadratic_box, binary_fixed_one };

/// Pointwise control cost g. Either g(u) = (alpha/2)u^2 + indicator of
/// [ua, ub], or the binary case where u is fixed to 1 and g = 0.
struct ControlLaw {
    LawKind kind = LawKind::quadratic_box;
    double alpha = 0.01;
    double ua = -4.0;
    double ub = 4.0;

    static ControlLaw quadratic_box(double alpha, double ua, double ub) {
        if (!(alpha > 0.0)) throw std::invalid_argument("control law: alpha must be positive");
        if (!(ua < 0.0 && 0.0 < ub)) {
            throw std::invalid_argument("control law: box must contain 0 in its interior");
        }
        return ControlLaw{LawKind::quadratic_box, alpha, ua, ub};
    }

    static ControlLaw binary_fixed_one() {
        return ControlLaw{LawKind::binary_fixed_one, 0.0, 0.0, 0.0};
    }

    /// strong convexity modulus of g
    double mu() const { return alpha; }

    double g(double u) const {
        if (kind == LawKind::binary_fixed_one) return 0.0;
        if (u < ua || u > ub) return std::numeric_limits<double>::infinity();
        return 0.5 * alpha * u * u;
    }
};

/// argmin_u p*u + g(u) for the quadratic-box law: clamp(-p/alpha, ua, ub)
double pointwise_minimizer(const ControlLaw& law, double p);

/// Hbar(p) = min_u p*u + g(u) = -g*(-p). For the binary law this is
/// identified with p itself (value of p*u at the fixed u = 1).
double hbar(const ControlLaw& law, double p);

/// |Hbar(p1)-Hbar(p2)| <= |p1-p2| * max(|u(p1)|,|u(p2)|)
bool hbar_lipschitz_check(const ControlLaw& law, double p1, double p2);

}  // namespace topgrad
