#include <doctest.h>

#include <cmath>
#include <random>

#include "nfnls/dynamics.hpp"
#include "nfnls/errors.hpp"
#include "nfnls/solver.hpp"
#include "nfnls/verify.hpp"
#include "support.hpp"

using namespace nfnls;
using testing::max_abs;
using testing::max_diff;
using testing::random_vector;

namespace {

const cplx I(0.0, 1.0);

// direct transcription of the two admissibility sums
bool K_admissible(double K, double R, int J, double c) {
    double a = 0.0, b = 0.0;
    for (int j = 2; j <= J; ++j) {
        const double fact = std::tgamma(j + 1.0);
        a += std::pow(K, 4.0 - 4.0 * j) * std::pow(R, 2.0 * j - 1) / fact;
        b += std::pow(K, 4.0 - 4.0 * j) * std::pow(2 * R, 2.0 * j - 2) / fact;
    }
    return c * a <= 0.1 && c * b <= 0.1;
}

std::vector<ModeVector> sample(double h, int n, auto f) {
    std::vector<ModeVector> out;
    for (int i = 0; i < n; ++i) out.push_back(ModeVector::from_modes(0, {{0, f(i * h)}}));
    return out;
}

SolverConfig small_config(int n_max, int J) {
    SolverConfig cfg;
    cfg.n_max = n_max;
    cfg.J_max = J;
    cfg.T = 0.2;
    cfg.time_grid_size = 41;
    cfg.quadrature = Quadrature::simpson;
    cfg.picard_tol = 1e-12;
    cfg.auto_K = false;
    cfg.mod.cutoff_override = {{1, 4.0}, {2, 8.0}, {3, 12.0}};
    return cfg;
}

}  // namespace

TEST_CASE("choose_K") {
    CHECK(choose_K(0.0, 2.0, 3, 1.0) == 1.0);
    CHECK(choose_K(100.0, 2.0, 1, 1.0) == 1.0);
    // 2 K^{-4} <= 0.1 first holds at K = 4
    CHECK(choose_K(1.0, 2.0, 2, 1.0) == 4.0);
    for (double R : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        for (int J = 1; J <= 4; ++J) {
            const double K = choose_K(R, 2.0, J, 1.0);
            CHECK(K_admissible(K, R, J, 1.0));
            if (K > 1.0) CHECK_FALSE(K_admissible(K / 2, R, J, 1.0));
            CHECK(choose_K(2 * R, 2.0, J, 1.0) >= K);
            CHECK(choose_K(R, 2.0, J, 10.0) >= K);
        }
    }
    CHECK_THROWS_AS(choose_K(-1.0, 2.0, 2, 1.0), DomainError);
    CHECK_THROWS_AS(choose_K(1.0, 2.0, 0, 1.0), DomainError);
}

TEST_CASE("cumulative quadrature") {
    const double h = 0.1;
    // cubics are integrated exactly at every node
    const auto cubic = sample(h, 11, [](double t) { return cplx(t * t * t - t, 2 * t * t); });
    const auto q = cumulative_quadrature(cubic, h, Quadrature::simpson);
    for (int i = 0; i < 11; ++i) {
        const double t = i * h;
        CHECK(std::abs(q[i][0] - cplx(t * t * t * t / 4 - t * t / 2, 2 * t * t * t / 3)) < 1e-13);
    }
    const auto line = sample(h, 6, [](double t) { return cplx(3 * t + 1); });
    const auto ql = cumulative_quadrature(line, h, Quadrature::trapezoid);
    for (int i = 0; i < 6; ++i) CHECK(std::abs(ql[i][0] - (1.5 * i * h * i * h + i * h)) < 1e-14);

    auto worst_error = [](Quadrature kind, int n) {
        const double h = 1.0 / (n - 1);
        const auto f = sample(h, n, [](double t) { return std::exp(I * 3.0 * t); });
        const auto q = cumulative_quadrature(f, h, kind);
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const cplx exact = (std::exp(I * 3.0 * (i * h)) - 1.0) / (3.0 * I);
            worst = std::max(worst, std::abs(q[i][0] - exact));
        }
        return worst;
    };
    CHECK(std::log2(worst_error(Quadrature::trapezoid, 21) / worst_error(Quadrature::trapezoid, 41)) ==
          doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::log2(worst_error(Quadrature::simpson, 21) / worst_error(Quadrature::simpson, 41)) ==
          doctest::Approx(4.0).epsilon(0.1));
    // three nodes use the quadratic first panel
    const auto short_q = cumulative_quadrature(sample(0.5, 3, [](double t) { return cplx(t * t); }), 0.5, Quadrature::simpson);
    CHECK(std::abs(short_q[1][0] - 0.125 / 3) < 1e-15);
    CHECK(std::abs(short_q[2][0] - 1.0 / 3) < 1e-15);
}

TEST_CASE("gamma map worked examples") {
    const cplx c(0.6, 0.3);
    SolverConfig cfg;
    cfg.n_max = 2;
    cfg.T = 0.5;
    cfg.time_grid_size = 6;
    const auto u0 = ModeVector::from_modes(2, {{1, c}});
    Trajectory flat;
    flat.times = cfg.time_grid();
    flat.states.assign(flat.times.size(), u0);
    const auto g = gamma_map(u0, flat, cfg);
    CHECK(g.states[0] == u0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(std::abs(g.states[i][1] - (c - I * std::norm(c) * c * g.times[i])) < 1e-15);
        CHECK(max_abs(g.states[i].truncated(0)) == 0.0);
    }

    Trajectory wrong = flat;
    wrong.times.pop_back();
    wrong.states.pop_back();
    CHECK_THROWS_AS(gamma_map(u0, wrong, cfg), DomainError);
}

TEST_CASE("zero data is a fixed point") {
    SolverConfig cfg = small_config(3, 2);
    const auto report = solve_normal_form(ModeVector(3), cfg);
    CHECK(report.iterations == 1);
    CHECK(report.final_update_norm == 0.0);
    for (const auto& s : report.trajectory.states) CHECK(s.is_zero());
}

TEST_CASE("single mode closed form") {
    const cplx c(0.7, -0.4);
    for (int sign : {1, -1}) {
        SolverConfig cfg;
        cfg.n_max = 3;
        cfg.T = 0.5;
        cfg.time_grid_size = 51;
        cfg.quadrature = Quadrature::simpson;
        cfg.picard_tol = 1e-13;
        cfg.model.sign = sign;
        const auto report = solve_normal_form(ModeVector::from_modes(3, {{-2, c}}), cfg);
        for (std::size_t i = 0; i < report.trajectory.size(); ++i) {
            const double t = report.trajectory.times[i];
            CHECK(std::abs(report.trajectory.states[i][-2] - c * std::polar(1.0, -sign * std::norm(c) * t)) < 1e-9);
        }
        cfg.model.renormalization = Renormalization::full;
        const auto full = solve_normal_form(ModeVector::from_modes(3, {{-2, c}}), cfg);
        CHECK(std::abs(full.trajectory.states.back()[-2] - c * std::polar(1.0, sign * std::norm(c) * cfg.T)) < 1e-9);
    }
}

TEST_CASE("phase rotation equivariance") {
    std::mt19937_64 rng(51);
    const auto u0 = random_vector(3, rng, 0.2);
    const SolverConfig cfg = small_config(3, 2);
    const cplx rot = std::polar(1.0, 0.9);
    const auto a = solve_normal_form(u0, cfg).trajectory;
    const auto b = solve_normal_form(rot * u0, cfg).trajectory;
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_diff(rot * a.states[i], b.states[i]) < 1e-12);
}

TEST_CASE("plain equation converges to the reference under grid refinement") {
    const auto u0 = ModeVector::from_modes(4, {{-1, 0.5}, {0, cplx(0.2, 0.3)}, {2, 0.4}});
    SolverConfig cfg;
    cfg.n_max = 4;
    cfg.T = 0.5;
    cfg.quadrature = Quadrature::simpson;
    cfg.picard_tol = 1e-13;
    double prev = 0.0;
    for (int grid : {11, 21, 41}) {
        cfg.time_grid_size = grid;
        const double err = compare_solutions(u0, cfg, 1e-4).max_distance;
        if (prev > 0.0) CHECK(std::log2(prev / err) > 3.5);
        prev = err;
    }
    CHECK(prev < 1e-6);
}

TEST_CASE("deeper truncations approach the reference") {
    const auto u0 = ModeVector::from_modes(3, {{-1, 0.3}, {1, 0.25}, {2, cplx(0.1, 0.15)}});
    SolverConfig cfg = small_config(3, 1);
    cfg.time_grid_size = 81;
    double prev = kInfinity;
    for (int J = 1; J <= 3; ++J) {
        cfg.J_max = J;
        const double err = compare_solutions(u0, cfg, 1e-4).max_distance;
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("picard contraction and reporting") {
    std::mt19937_64 rng(52);
    const auto u0 = random_vector(3, rng, 0.2);
    SolverConfig cfg = small_config(3, 3);
    const auto report = solve_normal_form(u0, cfg);
    CHECK(report.final_update_norm < cfg.picard_tol);
    CHECK(report.contraction_estimate < 1.0);
    CHECK(report.iterations == static_cast<int>(report.update_norms.size()));
    for (std::size_t k = 1; k < report.update_norms.size(); ++k)
        CHECK(report.update_norms[k] < report.update_norms[k - 1]);
    CHECK(report.tail_estimate > 0.0);
    CHECK(report.K_used == 1.0);

    cfg.auto_K = true;
    CHECK(solve_normal_form(u0, cfg).K_used == choose_K(fl_norm(u0, 2.0), 2.0, 3, 1.0));

    cfg.picard_max_iter = 1;
    CHECK_THROWS_AS(solve_normal_form(u0, cfg), ConvergenceError);
}

TEST_CASE("lipschitz probe") {
    std::mt19937_64 rng(53);
    const auto u0 = random_vector(3, rng, 0.2);
    const auto v0 = u0 + 0.01 * random_vector(3, rng);
    const SolverConfig cfg = small_config(3, 2);
    const double L = lipschitz_probe(u0, v0, cfg);
    CHECK(L >= 1.0 - 1e-9);  // t = 0 is on the grid
    CHECK(L < 2.0);
    CHECK_THROWS_AS(lipschitz_probe(u0, u0, cfg), DomainError);
}

TEST_CASE("configuration validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.J_max = 9;
    CHECK_THROWS_AS(bad.validate(), SizeError);
    bad = cfg;
    bad.time_grid_size = 1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = cfg;
    bad.T = -1;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = cfg;
    bad.model.sign = 0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    CHECK_THROWS_AS(solve_normal_form(ModeVector(2), cfg), DomainError);
    CHECK(quadrature_from_string("simpson") == Quadrature::simpson);
    CHECK_THROWS_AS(quadrature_from_string("gauss"), DomainError);
    const auto grid = cfg.time_grid();
    CHECK(grid.size() == 101);
    CHECK(grid.back() == cfg.T);
}
