#include "topgrad/descent.hpp"

#include <cmath>

namespace topgrad {

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::delta_tol: return "delta_tol";
        case StopReason::rho_inf: return "rho_inf";
        case StopReason::support_min: return "support_min";
        case StopReason::linesearch_failed: return "linesearch_failed";
        case StopReason::max_iters: return "max_iters";
    }
    return "?";
}

void DescentConfig::validate() const {
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("descent: tau must be in (0,1)");
    if (!(sigma_armijo > 0.0 && sigma_armijo < 1.0)) {
        throw std::invalid_argument("descent: sigma must be in (0,1)");
    }
    if (!(delta_tol >= 0.0)) throw std::invalid_argument("descent: delta_tol must be >= 0");
    if (max_iters < 1) throw std::invalid_argument("descent: max_iters must be >= 1");
}

double armijo_rhs(const TopoField& tf, const SelectionResult& d, double sigma_armijo) {
    (void)tf;
    return -sigma_armijo * d.mass;
}

namespace {

// previous control restricted to the trial set; cells entering the set
// start at the pointwise minimizer of the previous adjoint
FieldP0 make_warm_start(const ProblemSpec& spec, const CellSet& prev_set, const CellSet& trial,
                        const SubproblemSolution& prev) {
    FieldP0 w;
    w.values.assign(prev.u.values.size(), 0.0);
    for (int c : trial.cells()) {
        if (prev_set.contains(c)) {
            w.values[c] = prev.u.values[c];
        } else if (spec.law.kind == LawKind::quadratic_box) {
            w.values[c] = pointwise_minimizer(spec.law, prev.p.values[c]);
        }
    }
    return w;
}

}  // namespace

DescentResult run_descent(const ProblemSpec& spec, const DiscreteOperators& ops,
                          const DescentConfig& cfg) {
    cfg.validate();
    spec.validate();
    auto mesh = ops.mesh();

    CellSet A;
    switch (cfg.initial_set.kind) {
        case InitialSet::Kind::full: A = CellSet::full(mesh); break;
        case InitialSet::Kind::empty: A = CellSet::empty(mesh); break;
        case InitialSet::Kind::explicit_set:
            A = *cfg.initial_set.set;
            if (A.mesh() != mesh) {
                throw std::invalid_argument("run_descent: initial set on a different mesh");
            }
            break;
    }

    DescentResult result;
    SubproblemSolution sol = solve_inner(spec, ops, A, std::nullopt, cfg.sub);

    for (int k = 0;; ++k) {
        TopoField tf = topological_derivative(spec, A, sol);

        IterationRecord rec;
        rec.k = k;
        rec.J = sol.value;
        rec.set_measure = A.measure();
        rec.rho_l1 = tf.rho_l1;
        rec.rho_support = tf.support_cells;
        rec.sub_iters = sol.iterations;
        rec.kkt_residual = sol.kkt_residual;

        std::optional<StopReason> stop;
        if (tf.rho_l1 <= cfg.delta_tol) {
            stop = StopReason::delta_tol;
        } else if (tf.rho_inf <= cfg.rho_inf_tol) {
            stop = StopReason::rho_inf;
        } else if (tf.support_cells <= cfg.support_min) {
            stop = StopReason::support_min;
        } else if (k >= cfg.max_iters) {
            stop = StopReason::max_iters;
        }
        if (stop) {
            rec.stop_reason = stop;
            result.history.push_back(rec);
            result.stop_reason = *stop;
            break;
        }

        // Armijo line-search; D is recomputed at every trial t
        bool accepted = false;
        CellSet trial_set;
        SubproblemSolution trial_sol;
        for (double t = 1.0; t >= cfg.t_min; t *= cfg.tau) {
            SelectionResult d = select_d(tf, mesh, t);
            trial_set = symmetric_difference(A, d.d_set);
            std::optional<FieldP0> warm;
            if (cfg.warm_start) warm = make_warm_start(spec, A, trial_set, sol);
            trial_sol = solve_inner(spec, ops, trial_set, warm, cfg.sub);
            ++rec.ls_trials;
            if (trial_sol.value <= sol.value + armijo_rhs(tf, d, cfg.sigma_armijo)) {
                accepted = true;
                rec.t_accepted = t;
                rec.step_mass = d.mass;
                break;
            }
        }
        if (!accepted) {
            rec.stop_reason = StopReason::linesearch_failed;
            result.history.push_back(rec);
            result.stop_reason = StopReason::linesearch_failed;
            break;
        }

        result.history.push_back(rec);
        A = std::move(trial_set);
        sol = std::move(trial_sol);
    }

    result.final_set = std::move(A);
    result.final_solution = std::move(sol);
    return result;
}

bool minimizing_sequence_check(const std::vector<IterationRecord>& history, double sigma_armijo,
                               double delta_tol) {
    if (history.empty()) return false;
    for (size_t i = 1; i < history.size(); ++i) {
        if (!(history[i].J < history[i - 1].J)) return false;
    }
    double weighted_sum = 0.0;
    for (const auto& rec : history) {
        if (rec.t_accepted > 0.0) weighted_sum += rec.t_accepted * rec.rho_l1;
    }
    const double budget = (history.front().J - history.back().J) / sigma_armijo + 1e-9;
    if (weighted_sum > budget) return false;
    const auto& last = history.back();
    if (last.stop_reason == StopReason::delta_tol && last.rho_l1 > delta_tol) return false;
    return true;
}

}  // namespace topgrad
