#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "topgrad/experiments.hpp"

using namespace topgrad;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("topgrad_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "topgrad");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("preset parameters") {
    ProblemSpec e = preset("l0_elliptic");
    CHECK(e.law.alpha == 0.01);
    CHECK(e.beta == 0.01);
    CHECK(e.law.ua == -4.0);
    CHECK(e.law.ub == 4.0);
    CHECK(e.yd(0.0, 0.77) == 0.0);  // factor x1
    CHECK(e.yd(0.5, 0.25) ==
          doctest::Approx(10 * 0.5 * std::sin(2.5) * std::cos(1.75)).epsilon(1e-15));

    ProblemSpec alt = preset("l0_elliptic_alt");
    CHECK(alt.law.alpha == 0.001);
    CHECK(alt.beta == 0.1);
    CHECK(alt.law.ub == 40.0);

    ProblemSpec u = preset("l0_neumann_unsolvable");
    CHECK(u.pde == PdeKind::neumann_helmholtz);
    CHECK(u.yd(0.3, 0.9) == doctest::Approx(-4.47529823).epsilon(1e-8));

    ProblemSpec b = preset("binary");
    CHECK(b.law.kind == LawKind::binary_fixed_one);
    CHECK(b.beta == 0.002);
    CHECK(b.yd(1.0, 1.0) == 0.05);
    CHECK(b.domain.lx == 1.0);
    CHECK(b.domain.ly == 2.0);
    auto mesh = build_mesh(b.domain, 3, 3);
    for (int c = 0; c < mesh->num_cells(); ++c) CHECK(b.beta_at(c) == 0.002);

    CHECK_THROWS_AS(preset("nonsense"), std::invalid_argument);
}

TEST_CASE("preset echo matches the reference parameter strings byte-for-byte") {
    RunConfig cfg;
    cfg.spec = preset("l0_elliptic");
    auto kv = config_echo(cfg);
    CHECK(kv["alpha"] == "0.01");
    CHECK(kv["beta"] == "0.01");
    CHECK(kv["ua"] == "-4");
    CHECK(kv["ub"] == "4");
    CHECK(kv["tau"] == "0.5");
    CHECK(kv["sigma"] == "0.1");

    cfg.spec = preset("l0_elliptic_alt");
    kv = config_echo(cfg);
    CHECK(kv["alpha"] == "0.001");
    CHECK(kv["beta"] == "0.1");
    CHECK(kv["ua"] == "-40");
    CHECK(kv["ub"] == "40");

    cfg.spec = preset("l0_neumann_unsolvable");
    kv = config_echo(cfg);
    CHECK(kv["alpha"] == "1000");
    CHECK(kv["beta"] == "0.01");

    cfg.spec = preset("binary");
    kv = config_echo(cfg);
    CHECK(kv["beta"] == "0.002");
    CHECK(kv["yd_value"] == "0.05");
    CHECK(kv["domain_inferred"] == "1");
}

TEST_CASE("config round-trip preserves every parameter") {
    RunConfig cfg;
    cfg.spec = preset("l0_elliptic_alt");
    cfg.n = 24;
    cfg.a0 = "empty";
    cfg.descent.delta_tol = 1e-4;
    cfg.descent.max_iters = 17;
    cfg.descent.warm_start = false;

    std::stringstream buf;
    write_config(buf, cfg);
    RunConfig back = parse_config(buf);

    CHECK(back.spec.pde == cfg.spec.pde);
    CHECK(back.spec.law.kind == cfg.spec.law.kind);
    CHECK(back.spec.law.alpha == cfg.spec.law.alpha);
    CHECK(back.spec.law.ua == cfg.spec.law.ua);
    CHECK(back.spec.law.ub == cfg.spec.law.ub);
    CHECK(back.spec.beta == cfg.spec.beta);
    CHECK(back.spec.yd.tag == cfg.spec.yd.tag);
    CHECK(back.n == 24);
    CHECK(back.a0 == "empty");
    CHECK(back.descent.delta_tol == 1e-4);
    CHECK(back.descent.max_iters == 17);
    CHECK(back.descent.warm_start == false);
}

TEST_CASE("config parsing: comments, whitespace and errors") {
    std::stringstream buf;
    buf << "# a comment\n"
        << "preset=l0_elliptic\n"
        << "  n = 12   # trailing comment\n"
        << "\n"
        << "a0=empty\n";
    RunConfig cfg = parse_config(buf);
    CHECK(cfg.n == 12);
    CHECK(cfg.a0 == "empty");
    CHECK(cfg.spec.law.alpha == 0.01);

    std::stringstream bad;
    bad << "pde=heat_equation\n";
    CHECK_THROWS_AS(parse_config(bad), std::invalid_argument);

    CHECK_THROWS_AS(parse_config_file("/nonexistent/path/cfg.txt"), std::system_error);
}

TEST_CASE("exit codes per stop reason") {
    CHECK(exit_code_for(StopReason::delta_tol) == 0);
    CHECK(exit_code_for(StopReason::rho_inf) == 0);
    CHECK(exit_code_for(StopReason::support_min) == 0);
    CHECK(exit_code_for(StopReason::linesearch_failed) == 2);
    CHECK(exit_code_for(StopReason::max_iters) == 3);
}

TEST_CASE("execute_run writes artifacts and a summary line") {
    auto dir = temp_dir("run");
    RunConfig cfg;
    cfg.spec = preset("l0_elliptic");
    cfg.n = 16;
    cfg.out_dir = dir;
    cfg.dump = DumpLevel::full;

    std::stringstream log;
    RunOutcome outcome = execute_run(cfg, log);
    CHECK(outcome.exit_code == 0);
    const std::string line = log.str();
    CHECK(line.find("J=") != std::string::npos);
    CHECK(line.find("chi_l1=") != std::string::npos);
    CHECK(line.find("rho_l1=") != std::string::npos);
    CHECK(line.find("iters=") != std::string::npos);
    CHECK(line.find("stop=") != std::string::npos);

    for (const char* name : {"history.csv", "final_set.csv", "final_set.pgm", "meta.txt",
                             "config.txt", "u.csv", "y.csv", "p.csv", "topo.csv", "u.pgm",
                             "dj.pgm"}) {
        CHECK(std::filesystem::exists(dir / name));
    }

    // meta.txt records the stop reason and the preset echo
    std::ifstream meta(dir / "meta.txt");
    std::string meta_text((std::istreambuf_iterator<char>(meta)),
                          std::istreambuf_iterator<char>());
    CHECK(meta_text.find("alpha=0.01") != std::string::npos);
    CHECK(meta_text.find("stop=") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("replaying the emitted config reproduces the run to 1e-12") {
    auto dir = temp_dir("replay");
    RunConfig cfg;
    cfg.spec = preset("l0_elliptic");
    cfg.n = 16;
    cfg.out_dir = dir;
    std::stringstream log1;
    RunOutcome first = execute_run(cfg, log1);

    RunConfig replay = parse_config_file(dir / "config.txt");
    replay.out_dir.clear();
    std::stringstream log2;
    RunOutcome second = execute_run(replay, log2);

    const double j1 = first.result.final_solution.value;
    const double j2 = second.result.final_solution.value;
    CHECK(j2 == doctest::Approx(j1).epsilon(1e-12));
    CHECK(second.result.final_set.measure() ==
          doctest::Approx(first.result.final_set.measure()).epsilon(1e-12));
    CHECK(second.result.history.size() == first.result.history.size());
    std::filesystem::remove_all(dir);
}

TEST_CASE("a0=file round-trip through the final-set CSV") {
    auto dir = temp_dir("a0file");
    RunConfig cfg;
    cfg.spec = preset("l0_elliptic");
    cfg.n = 8;
    cfg.out_dir = dir;
    std::stringstream log;
    RunOutcome first = execute_run(cfg, log);

    // restarting from the converged set terminates immediately at the same J
    RunConfig again = cfg;
    again.out_dir.clear();
    again.a0 = "file:" + (dir / "final_set.csv").string();
    std::stringstream log2;
    RunOutcome second = execute_run(again, log2);
    CHECK(second.result.history.size() == 1);
    CHECK(second.result.final_solution.value ==
          doctest::Approx(first.result.final_solution.value).epsilon(1e-12));
    std::filesystem::remove_all(dir);
}

TEST_CASE("CLI flag handling and exit codes") {
    CHECK(cli({"--frobnicate"}) == 64);
    CHECK(cli({}) == 64);  // neither --preset nor --config
    CHECK(cli({"--preset", "no_such_preset", "--n", "8"}) == 64);
    CHECK(cli({"--config", "/nonexistent/file.cfg"}) == 66);
    CHECK(cli({"--preset", "l0_elliptic", "--dump", "bogus"}) == 64);
    CHECK(cli({"--preset", "l0_elliptic", "--config", "x.cfg"}) == 64);  // mutually exclusive

    // successful tiny run, no artifacts
    CHECK(cli({"--preset", "l0_elliptic", "--n", "8", "--dump", "none"}) == 0);
    // iteration cap forces exit 3 (this instance never converges)
    CHECK(cli({"--preset", "l0_neumann_unsolvable", "--n", "16", "--max-iters", "1", "--a0",
               "full", "--dump", "none"}) == 3);
}
