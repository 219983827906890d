#include "topgrad/control_law.hpp"

#include <algorithm>

namespace topgrad {

double pointwise_minimizer(const ControlLaw& law, double p) {
    if (law.kind != LawKind::quadratic_box) {
        throw std::logic_error("pointwise_minimizer: only defined for the quadratic-box law");
    }
    return std::clamp(-p / law.alpha, law.ua, law.ub);
}

double hbar(const ControlLaw& law, double p) {
    if (!std::isfinite(p)) throw std::invalid_argument("hbar: non-finite adjoint value");
    if (law.kind == LawKind::binary_fixed_one) return p;
    const double u = pointwise_minimizer(law, p);
    return p * u + 0.5 * law.alpha * u * u;
}

bool hbar_lipschitz_check(const ControlLaw& law, double p1, double p2) {
    if (law.kind != LawKind::quadratic_box) {
        throw std::logic_error("hbar_lipschitz_check: quadratic-box law only");
    }
    const double u1 = pointwise_minimizer(law, p1);
    const double u2 = pointwise_minimizer(law, p2);
    const double bound = std::abs(p1 - p2) * std::max(std::abs(u1), std::abs(u2));
    // rounding slack: the inequality is exact in real arithmetic
    return std::abs(hbar(law, p1) - hbar(law, p2)) <= bound + 1e-12 * (1.0 + std::abs(bound));
}

}  // namespace topgrad
