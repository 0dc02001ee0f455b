#pragma once

// Picard iteration for the truncated normal form equation
//
//   u(t) = u0 + sum_{j=2}^{J} [N0^(j)(u)(t) - N0^(j)(u)(0)]
//             + int_0^t sum_{j=1}^{J} [N1^(j) + R^(j) (+ R2^(j))](u)(t') dt'
//
// on a uniform time grid.

#include <span>
#include <string>
#include <vector>

#include "nfnls/dynamics.hpp"
#include "nfnls/normal_form.hpp"

namespace nfnls {

enum class Quadrature { trapezoid, simpson };

const char* to_string(Quadrature q) noexcept;
Quadrature quadrature_from_string(const std::string& name);

struct SolverConfig {
    ModelSpec model;
    ModulationConfig mod;
    int J_max = 1;
    int n_max = 8;
    double T = 0.1;
    int time_grid_size = 101;
    double picard_tol = 1e-10;
    int picard_max_iter = 100;
    Quadrature quadrature = Quadrature::trapezoid;
    /// Pick K by choose_K from the data norm instead of using mod.K.
    bool auto_K = true;
    double safety_constant = 1.0;

    void validate() const;
    std::vector<double> time_grid() const;
    EvalContext context() const;
};

struct SolveReport {
    Trajectory trajectory;
    int iterations = 0;
    double final_update_norm = 0.0;
    double K_used = 1.0;
    double contraction_estimate = 0.0;
    std::vector<double> update_norms;
    /// T * sum_{j > J_max} R^{2j+1} K^{-4(j-1)} ((2j-1)!!)^{-2}, unit constant.
    double tail_estimate = 0.0;
};

/// Smallest K in 1, 2, 4, ... with
///   c sum_{j=2}^{J} K^{4(1-j)} R^{2j-1} / j!       <= 1/10 and
///   c sum_{j=2}^{J} K^{4(1-j)} (2R)^{2j-2} / j!    <= 1/10.
double choose_K(double R, double p, int J_max, double safety_constant);

/// Running integrals Q_i ~ int_0^{t_i} f on a uniform grid of spacing h.
/// The Simpson variant is fourth order at every node: Simpson pairs, with
/// a four-point Adams-Moulton end panel at odd nodes.
std::vector<ModeVector> cumulative_quadrature(std::span<const ModeVector> f, double h, Quadrature q);

Trajectory gamma_map(const ModeVector& u0, const Trajectory& traj, const SolverConfig& cfg);

/// Throws ConvergenceError when the update norm does not drop below
/// picard_tol within picard_max_iter iterations.
SolveReport solve_normal_form(const ModeVector& u0, const SolverConfig& cfg);

/// sup_t |u(t) - v(t)|_{FL^p} / |u0 - v0|_{FL^p}.
double lipschitz_probe(const ModeVector& u0, const ModeVector& v0, const SolverConfig& cfg);

/// sup over the grid of the FL^p distance between two trajectories.
double trajectory_distance(const Trajectory& a, const Trajectory& b, double p);

}  // namespace nfnls
