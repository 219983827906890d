#include <doctest.h>

#include <cmath>
#include <random>

#include "topgrad/descent.hpp"
#include "topgrad/experiments.hpp"

using namespace topgrad;

TEST_CASE("armijo_rhs arithmetic and the symmetric-difference identity") {
    auto mesh = build_mesh({1.0, 1.0}, 4, 4);
    const double area = mesh->cell_area();

    SelectionResult d;
    d.d_set = CellSet(mesh);
    d.mass = 1.75;
    TopoField tf;
    CHECK(armijo_rhs(tf, d, 0.1) == doctest::Approx(-0.175).epsilon(1e-14));
    d.mass = 0.0;
    CHECK(armijo_rhs(tf, d, 0.1) == 0.0);

    // identity: sigma * sum_{c in D} area * rho[c] recomputed from A symdiff A_trial
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> mag(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 100; ++trial) {
        TopoField f;
        f.rho.values.assign(mesh->num_cells(), 0.0);
        for (double& v : f.rho.values) {
            if (coin(rng)) v = -mag(rng);
        }
        f.dj = f.rho;
        f.rho_l1 = 0.0;
        for (double v : f.rho.values) f.rho_l1 += area * (-v);
        if (f.rho_l1 == 0.0) continue;
        f.delta_A = f.rho_l1;
        for (double v : f.rho.values) {
            if (v < -f.rho_zero_tol) ++f.support_cells;
        }

        SelectionResult sel = select_d(f, mesh, 0.4);
        CellSet A(mesh);
        for (int c = 0; c < mesh->num_cells(); c += 3) A.insert(c);
        CellSet trial_set = symmetric_difference(A, sel.d_set);
        double rhs = 0.0;
        CellSet diff = symmetric_difference(A, trial_set);
        for (int c : diff.cells()) rhs += area * f.rho.values[c];
        CHECK(armijo_rhs(f, sel, 0.1) == doctest::Approx(0.1 * rhs).epsilon(1e-12));
    }
}

TEST_CASE("config validation") {
    DescentConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.tau = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.tau = 0.5;
    cfg.sigma_armijo = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.sigma_armijo = 0.1;
    cfg.delta_tol = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("already-optimal start returns after one solve") {
    ProblemSpec spec = preset("l0_elliptic");
    spec.yd = YdSpec::constant(0.0);
    auto mesh = build_mesh(spec.domain, 8, 8);
    auto ops = assemble(mesh, spec.pde);

    DescentConfig cfg;
    cfg.initial_set = InitialSet::empty();
    DescentResult res = run_descent(spec, *ops, cfg);
    REQUIRE(res.history.size() == 1);
    CHECK((res.stop_reason == StopReason::delta_tol || res.stop_reason == StopReason::rho_inf));
    CHECK(res.final_set.count() == 0);
    CHECK(res.history.back().stop_reason.has_value());
    CHECK(minimizing_sequence_check(res.history, cfg.sigma_armijo, cfg.delta_tol));
}

TEST_CASE("elliptic preset at n=32 reproduces the reference run") {
    ProblemSpec spec = preset("l0_elliptic");
    auto mesh = build_mesh(spec.domain, 32, 32);
    auto ops = assemble(mesh, spec.pde);

    DescentConfig cfg;
    DescentResult res = run_descent(spec, *ops, cfg);
    const IterationRecord& last = res.history.back();
    CHECK(last.J == doctest::Approx(4.7597836382).epsilon(1e-8));
    CHECK(res.final_set.measure() == doctest::Approx(0.4404296875).epsilon(1e-12));
    CHECK(res.history.size() <= 6);  // <= 5 accepted outer steps
    CHECK((res.stop_reason == StopReason::rho_inf ||
           res.stop_reason == StopReason::support_min ||
           res.stop_reason == StopReason::delta_tol));

    double prev = std::numeric_limits<double>::infinity();
    for (const auto& rec : res.history) {
        CHECK(rec.J < prev);
        prev = rec.J;
        CHECK(rec.kkt_residual <= 1e-10);
        if (rec.t_accepted > 0.0) CHECK(rec.t_accepted == 1.0);  // t=1 always accepted here
    }

    // per-step descent identity: J_{k+1} - J_k <= -sigma * mass(D_k)
    for (std::size_t k = 0; k + 1 < res.history.size(); ++k) {
        CHECK(res.history[k + 1].J - res.history[k].J <=
              -cfg.sigma_armijo * res.history[k].step_mass + 1e-12);
    }
    CHECK(minimizing_sequence_check(res.history, cfg.sigma_armijo, cfg.delta_tol));
}

TEST_CASE("alt parameter set: full and empty starts agree") {
    ProblemSpec spec = preset("l0_elliptic_alt");
    auto mesh = build_mesh(spec.domain, 16, 16);
    auto ops = assemble(mesh, spec.pde);

    DescentConfig cfg;
    cfg.initial_set = InitialSet::full();
    DescentResult from_full = run_descent(spec, *ops, cfg);
    cfg.initial_set = InitialSet::empty();
    DescentResult from_empty = run_descent(spec, *ops, cfg);

    const double jf = from_full.history.back().J;
    const double je = from_empty.history.back().J;
    CHECK(jf == doctest::Approx(je).epsilon(1e-6));
}

TEST_CASE("explicit initial set is honored") {
    ProblemSpec spec = preset("l0_elliptic");
    auto mesh = build_mesh(spec.domain, 8, 8);
    auto ops = assemble(mesh, spec.pde);

    CellSet a0(mesh);
    for (int c = 0; c < mesh->num_cells() / 2; ++c) a0.insert(c);
    DescentConfig cfg;
    cfg.max_iters = 1;
    cfg.initial_set = InitialSet::explicit_set(a0);
    DescentResult res = run_descent(spec, *ops, cfg);
    CHECK(res.history.front().set_measure ==
          doctest::Approx(a0.measure()).epsilon(1e-14));

    auto other = build_mesh(spec.domain, 4, 4);
    cfg.initial_set = InitialSet::explicit_set(CellSet(other));
    CHECK_THROWS_AS(run_descent(spec, *ops, cfg), std::invalid_argument);
}

TEST_CASE("warm start does not change the outcome") {
    ProblemSpec spec = preset("l0_elliptic");
    auto mesh = build_mesh(spec.domain, 16, 16);
    auto ops = assemble(mesh, spec.pde);

    DescentConfig warm;
    DescentConfig cold = warm;
    cold.warm_start = false;
    DescentResult rw = run_descent(spec, *ops, warm);
    DescentResult rc = run_descent(spec, *ops, cold);
    CHECK(rw.history.size() == rc.history.size());
    CHECK(rw.history.back().J == doctest::Approx(rc.history.back().J).epsilon(1e-10));
    CHECK(rw.final_set == rc.final_set);
}

TEST_CASE("minimizing_sequence_check rejects fabricated histories") {
    std::vector<IterationRecord> hist(2);
    hist[0].k = 0;
    hist[0].J = 1.0;
    hist[0].rho_l1 = 0.5;
    hist[0].t_accepted = 1.0;
    hist[1].k = 1;
    hist[1].J = 2.0;  // increase
    hist[1].stop_reason = StopReason::support_min;
    CHECK_FALSE(minimizing_sequence_check(hist, 0.1, 0.0));

    hist[1].J = 0.9;  // decreasing but summability violated
    hist[0].rho_l1 = 1e6;
    CHECK_FALSE(minimizing_sequence_check(hist, 0.1, 0.0));
}
