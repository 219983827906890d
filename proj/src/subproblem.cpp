#include "topgrad/subproblem.hpp"

#include <algorithm>
#include <cmath>

namespace topgrad {

namespace {

// cell-averaged adjoint of the state generated by the cellwise control u
// restricted to A, i.e. (S chi_A)^* (S chi_A) u in P0 form
FieldP0 normal_operator_apply(const DiscreteOperators& ops, const CellSet& A, const FieldP0& u) {
    FieldP1 y = ops.solve_state(u, A);
    return ops.cell_average(ops.solve_adjoint_p1(y));
}

double box_clamp(const ControlLaw& law, double p) {
    return std::clamp(-p / law.alpha, law.ua, law.ub);
}

}  // namespace

double evaluate_J(const ProblemSpec& spec, const DiscreteOperators& ops, const CellSet& A,
                  const FieldP0& u) {
    const Mesh& mesh = *ops.mesh();
    const double area = mesh.cell_area();
    FieldP0 masked;
    masked.values.assign(mesh.num_cells(), 0.0);
    double cost = 0.0;
    for (int c : A.cells()) {
        const double v = u.values[c];
        if (spec.law.kind == LawKind::quadratic_box) {
            if (v < spec.law.ua - 1e-12 || v > spec.law.ub + 1e-12) {
                throw InfeasibleControl("evaluate_J: control violates the box on A");
            }
            cost += area * (0.5 * spec.law.alpha * v * v + spec.beta_at(c));
        } else {
            cost += area * spec.beta_at(c);
        }
        masked.values[c] = v;
    }
    FieldP1 y = ops.solve_state(masked, A);
    FieldP1 yd = ops.interpolate_target(spec.yd);
    return ops.tracking_value(y, yd) + cost;
}

SubproblemSolution solve_binary(const ProblemSpec& spec, const DiscreteOperators& ops,
                                const CellSet& A) {
    if (spec.law.kind != LawKind::binary_fixed_one) {
        throw std::logic_error("solve_binary: law is not binary_fixed_one");
    }
    const Mesh& mesh = *ops.mesh();
    SubproblemSolution sol;
    sol.u.values.assign(mesh.num_cells(), 0.0);
    for (int c : A.cells()) sol.u.values[c] = 1.0;
    sol.y = ops.solve_state(sol.u, A);
    FieldP1 yd = ops.interpolate_target(spec.yd);
    sol.p = ops.solve_adjoint(sol.y, yd);
    double cost = 0.0;
    for (int c : A.cells()) cost += mesh.cell_area() * spec.beta_at(c);
    sol.value = ops.tracking_value(sol.y, yd) + cost;
    sol.kkt_residual = 0.0;
    sol.iterations = 0;
    return sol;
}

SubproblemSolution solve_subproblem(const ProblemSpec& spec, const DiscreteOperators& ops,
                                    const CellSet& A, const std::optional<FieldP0>& warm_start,
                                    const SubproblemOptions& opts) {
    if (spec.law.kind != LawKind::quadratic_box) {
        throw std::logic_error("solve_subproblem: law is not quadratic_box");
    }
    const ControlLaw& law = spec.law;
    const Mesh& mesh = *ops.mesh();
    const int nc = mesh.num_cells();
    const double area = mesh.cell_area();
    const std::vector<int> acells = A.cells();

    FieldP1 yd = ops.interpolate_target(spec.yd);
    // affine part of the adjoint: S^* yd in P0 form
    FieldP0 adj_yd = ops.cell_average(ops.solve_adjoint_p1(yd));

    FieldP0 u;
    u.values.assign(nc, 0.0);
    if (warm_start) {
        for (int c : acells) {
            u.values[c] = std::clamp(warm_start->values[c], law.ua, law.ub);
        }
    }

    auto adjoint_of = [&](const FieldP0& ctrl) {
        FieldP0 p = normal_operator_apply(ops, A, ctrl);
        for (int c = 0; c < nc; ++c) p.values[c] -= adj_yd.values[c];
        return p;
    };

    auto kkt_of = [&](const FieldP0& ctrl, const FieldP0& p) {
        double r = 0.0;
        for (int c : acells) {
            r = std::max(r, std::abs(ctrl.values[c] - box_clamp(law, p.values[c])));
        }
        return r;
    };

    SubproblemSolution sol;
    FieldP0 p = adjoint_of(u);
    double kkt = kkt_of(u, p);
    std::vector<int8_t> prev_state;  // -1 lower, 0 inactive, +1 upper, per A-cell
    double cg_floor = std::max(1e-3 * opts.tol * law.alpha, 1e-300);

    int iter = 0;
    while (kkt > opts.tol) {
        if (iter >= opts.max_iters) {
            throw NonConvergence("solve_subproblem: active-set iterations exhausted", kkt);
        }
        ++iter;

        std::vector<int8_t> state(acells.size());
        std::vector<int> inactive;
        FieldP0 fixed;  // active-cell part of the control
        fixed.values.assign(nc, 0.0);
        for (size_t k = 0; k < acells.size(); ++k) {
            const int c = acells[k];
            const double cand = -p.values[c] / law.alpha;
            if (cand <= law.ua) {
                state[k] = -1;
                fixed.values[c] = law.ua;
            } else if (cand >= law.ub) {
                state[k] = 1;
                fixed.values[c] = law.ub;
            } else {
                state[k] = 0;
                inactive.push_back(c);
            }
        }
        const bool sets_repeat = (state == prev_state);
        prev_state = state;

        // reduced system on the inactive cells:
        //   alpha u_I + (S chi)^* S chi (u_I + fixed) = S^* yd   on I
        FieldP0 gfixed = normal_operator_apply(ops, A, fixed);
        const size_t ni = inactive.size();
        std::vector<double> rhs(ni), x(ni, 0.0);
        for (size_t k = 0; k < ni; ++k) {
            const int c = inactive[k];
            rhs[k] = adj_yd.values[c] - gfixed.values[c];
            x[k] = u.values[c];  // warm start the conjugate gradients
        }

        auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
            FieldP0 emb;
            emb.values.assign(nc, 0.0);
            for (size_t k = 0; k < ni; ++k) emb.values[inactive[k]] = v[k];
            FieldP0 g = normal_operator_apply(ops, A, emb);
            for (size_t k = 0; k < ni; ++k) {
                out[k] = law.alpha * v[k] + g.values[inactive[k]];
            }
            ++sol.cg_iterations;
        };

        if (ni > 0) {
            std::vector<double> r(ni), dir(ni), ad(ni);
            apply(x, r);
            double rhs_norm = 0.0;
            for (size_t k = 0; k < ni; ++k) {
                r[k] = rhs[k] - r[k];
                rhs_norm += rhs[k] * rhs[k];
            }
            rhs_norm = std::sqrt(rhs_norm);
            const double target = std::max(opts.cg_tol * rhs_norm, cg_floor);
            double rr = 0.0;
            for (double v : r) rr += v * v;
            dir = r;
            int cg_guard = 10 * static_cast<int>(ni) + 50;
            while (std::sqrt(rr) > target && cg_guard-- > 0) {
                apply(dir, ad);
                double dad = 0.0;
                for (size_t k = 0; k < ni; ++k) dad += dir[k] * ad[k];
                const double step = rr / dad;
                double rr_next = 0.0;
                for (size_t k = 0; k < ni; ++k) {
                    x[k] += step * dir[k];
                    r[k] -= step * ad[k];
                    rr_next += r[k] * r[k];
                }
                const double momentum = rr_next / rr;
                for (size_t k = 0; k < ni; ++k) dir[k] = r[k] + momentum * dir[k];
                rr = rr_next;
            }
        }

        u = fixed;
        for (size_t k = 0; k < ni; ++k) u.values[inactive[k]] = x[k];
        p = adjoint_of(u);
        kkt = kkt_of(u, p);

        if (sets_repeat && kkt > opts.tol) {
            // stagnated above tolerance: the condensed solve is the limiter
            cg_floor *= 1e-3;
            if (cg_floor < 1e-300) {
                throw NonConvergence("solve_subproblem: stagnation above tolerance", kkt);
            }
        }
    }

    sol.u = u;
    sol.y = ops.solve_state(u, A);
    sol.p = p;
    sol.kkt_residual = kkt;
    sol.iterations = iter;
    double cost = 0.0;
    for (int c : acells) {
        cost += area * (0.5 * law.alpha * u.values[c] * u.values[c] + spec.beta_at(c));
    }
    sol.value = ops.tracking_value(sol.y, yd) + cost;
    return sol;
}

SubproblemSolution solve_inner(const ProblemSpec& spec, const DiscreteOperators& ops,
                               const CellSet& A, const std::optional<FieldP0>& warm_start,
                               const SubproblemOptions& opts) {
    if (spec.law.kind == LawKind::binary_fixed_one) return solve_binary(spec, ops, A);
    return solve_subproblem(spec, ops, A, warm_start, opts);
}

}  // namespace topgrad
