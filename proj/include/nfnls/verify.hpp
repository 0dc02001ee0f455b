#pragma once

#include <cstdint>
#include <vector>

#include "nfnls/dynamics.hpp"
#include "nfnls/normal_form.hpp"
#include "nfnls/solver.hpp"

namespace nfnls {

/// Number of divisors of n >= 1, by trial division up to sqrt(n).
std::uint64_t divisor_count(std::int64_t n);

struct DivisorGrowth {
    double max_ratio = 0.0;
    std::int64_t argmax = 1;
};

/// max_{1 <= n <= N} d(n) / n^delta, from a divisor sieve.
DivisorGrowth divisor_growth_check(std::int64_t N, double delta);

/// max over grid times of the FL^inf norm of
///   int_0^t N2^(j) - [N0^(j+1)(t) - N0^(j+1)(0) + int_0^t (R^(j+1) [+ R2^(j+1)] + N^(j+1))],
/// with fourth-order cumulative quadrature on the trajectory's uniform grid.
/// R2 enters for the full model. Throws GridTooCoarse when the grid
/// spacing times the largest phase frequency seen exceeds pi.
double telescoping_residual(int j, const Trajectory& traj, const EvalContext& ctx, const ModelSpec& model);

struct ResidualRow {
    double dt = 0.0;
    double residual = 0.0;
    double order = 0.0;  ///< log2(previous residual / this residual); 0 on the first row
};

/// Integrates u0 with integrate_reference at each dt (recording every step)
/// and tabulates telescoping_residual with observed convergence orders.
std::vector<ResidualRow> telescoping_order_study(int j, const ModeVector& u0, double T, const std::vector<double>& dts,
                                                 const EvalContext& ctx, const ModelSpec& model);

struct DecayRow {
    int J = 0;
    double sup_fl_inf = 0.0;
    double envelope = 0.0;
};

/// sup over the sample times of |N2^(J)(u)(t)|_{FL^inf} for J in
/// [J_min, J_max], with the envelope c K^{-4(J-1)} ((2J-1)!!)^{-2} fitted
/// to the J_min row.
std::vector<DecayRow> remainder_decay_study(const ModeVector& u, int J_min, int J_max,
                                            const std::vector<double>& t_samples, const EvalContext& ctx);

struct CompareRow {
    double t = 0.0;
    double distance = 0.0;
};

struct CompareTable {
    std::vector<CompareRow> rows;
    double max_distance = 0.0;
    SolveReport report;
};

/// FL^p distance at each grid time between solve_normal_form and an RK4
/// reference whose step (at most dt_ref) divides the grid spacing.
CompareTable compare_solutions(const ModeVector& u0, const SolverConfig& cfg, double dt_ref);

struct StabilityRow {
    int m = 0;
    double data_distance = 0.0;      ///< |u0_m - u0_{m_prev}|, 0 on the first row
    double solution_distance = 0.0;  ///< sup_t |u_m - u_{m_prev}|
    double bound = 0.0;              ///< lipschitz * data_distance
};

struct StabilityTable {
    std::vector<StabilityRow> rows;
    /// max lipschitz_probe over (u0, truncations) and random perturbations of u0.
    double lipschitz = 0.0;
    bool within_bound = true;
    bool monotone = true;
};

/// Solves for the truncations u0_m (modes |n| > m zeroed) and compares
/// consecutive members against the measured Lipschitz constant.
StabilityTable approximation_stability(const ModeVector& u0, const std::vector<int>& m_range, const SolverConfig& cfg,
                                       int perturbation_probes = 2, std::uint64_t seed = 1);

/// A e^{-rate |n|} e^{i (0.3 n + 0.1 n^2)} on |n| <= support.
ModeVector geometric_data(int n_max, double amplitude, double rate, int support);

}  // namespace nfnls
