#pragma once

// Multilinear operators of the normal form reduction.
//
// A summand of generation g is indexed by an ordered tree with g
// generations and an index assignment whose nodes all lie in the lattice.
// With s the nonlinearity sign and sigma_b = +1 / -1 for an unconjugated /
// conjugated node, the weights and phases follow the recursion
//
//   W_1 = s i,              W_{g+1} = W_g (-s sigma_b) / mut_g,
//   mut_1 = mu_1,           mut_{g+1} = mut_g + sigma_b mu_{g+1},
//
// where b is the terminal grown at generation g+1 and mu = 2 (m-m1)(m-m3).
// Leaves contribute u(n_a), or conj(u(n_a)) when conjugated. Writing
// Pi for the leaf product and X_g for the indicator of
// |mut_k| > cutoff(k) for all k <= g:
//
//   N^(g)     = sum X_{g-1} W_g e^{i mut_g t} Pi            (unsplit)
//   N1^(g)    = N^(g) restricted to |mut_g| <= cutoff(g)
//   N2^(g)    = N^(g) restricted to |mut_g| >  cutoff(g)
//   N0^(g+1)  = sum X_g W_g / (i mut_g) e^{i mut_g t} Pi
//   R^(g+1)   = -sum X_g W_g / (i mut_g) e^{i mut_g t} sum_b [s R1(u)(n_b)]^{sigma_b} Pi / x_b
//   R2^(g+1)  = same with s R2(u)
//
// so that along solutions N2^(g) = d/dt N0^(g+1) + R^(g+1) [+ R2^(g+1)] + N^(g+1).

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <span>
#include <vector>

#include "nfnls/dynamics.hpp"
#include "nfnls/spectral.hpp"

namespace nfnls {

struct ModulationConfig {
    double p = 2.0;
    double eps = 0.5;
    double theta = 16.0;
    double K = 1.0;
    std::map<int, double> cutoff_override;

    /// eps = (p'-1)/2 and theta = 4p'/(p'-1-eps); p = 1 takes the p' -> inf
    /// limit eps = inf, theta = 8.
    static ModulationConfig from_exponent(double p, double K = 1.0);
    /// theta implied by p and eps.
    static double default_theta(double p, double eps);
    static double default_eps(double p);

    /// ((2j+1) K)^theta, or the override. May be +inf.
    double cutoff(int j) const;
    void validate() const;
};

enum class OperatorKind { N0, N1, N2, N, R, R2 };

const char* to_string(OperatorKind kind) noexcept;
OperatorKind operator_kind_from_string(const std::string& name);

/// How conjugated conversions enter mut. `unsigned_sum` drops the sign
/// (mut_{g+1} = mut_g + mu_{g+1}) and exists only as a negative control.
enum class PhaseConvention { exact, unsigned_sum };

struct EvalContext {
    ModulationConfig mod;
    int sign = 1;
    PhaseConvention convention = PhaseConvention::exact;
    /// Upper bound on the estimated number of visited tree states per call.
    double state_budget = 4e9;
};

struct OperatorResult {
    ModeVector value;
    std::uint64_t summand_count = 0;
    /// Extremes of |mut| over the index support of the operator (the last
    /// generation for N-kinds, generation j-1 for N0/R/R2); 0 when empty.
    std::int64_t max_modulation = 0;
    std::int64_t min_modulation = 0;
};

struct TermRequest {
    OperatorKind kind;
    int j;
};

/// Evaluates several operators in one pass over the tree states.
std::vector<OperatorResult> eval_terms(std::span<const TermRequest> requests, const ModeVector& u, double t,
                                       const EvalContext& ctx);

OperatorResult eval_generation(OperatorKind kind, int j, const ModeVector& u, double t, const EvalContext& ctx);

/// Sum_{j=2}^{J} N0^(j) and sum_{j=1}^{J} (N1^(j) + R^(j) [+ R2^(j)]).
struct SeriesTerms {
    ModeVector boundary;
    ModeVector integrand;
};
SeriesTerms eval_series(int J, const ModeVector& u, double t, const EvalContext& ctx, bool include_R2);

/// N^(j) for j >= 2 by substituting s N1(u) (conjugated at conjugated
/// leaves) into the generation j-1 boundary structure. Independent of the
/// binned evaluation used by eval_generation.
ModeVector eval_unsplit_by_substitution(int j, const ModeVector& u, double t, const EvalContext& ctx);

/// Deepest tree generation a request set needs, after discarding
/// generations whose modulation set is provably empty on the lattice.
int required_depth(std::span<const TermRequest> requests, int n_max, const ModulationConfig& mod);

/// Rough number of tree states visited for the given depth.
double estimated_states(int depth, int n_max);

/// Multilinear degree of an operator of generation j.
int operator_degree(OperatorKind kind, int j);

/// fl_norm(op(u)) / fl_norm(u)^degree in FL^p; 0 for the zero vector.
double bound_ratio(OperatorKind kind, int j, const ModeVector& u, double t, const EvalContext& ctx, double p);

/// Maximum of bound_ratio over `trials` random inputs on the lattice
/// [-n_max, n_max] at random times in [0, 2 pi). Deterministic in seed.
double operator_bound_ratio(OperatorKind kind, int j, double p, int trials, std::uint64_t seed,
                            const EvalContext& ctx, int n_max);

/// Shape of the bound with unit constants: K^{4(1-j)} / ((2j-1)!!)^2 for N0,
/// times K^{2 theta / p'} for N1, times (2j-1) for R, R2 at j >= 2; 1 and 2
/// for R^(1), R2^(1); the remainder envelope for N2.
double predicted_bound(OperatorKind kind, int j, const ModulationConfig& mod);

/// Random complex vector with unit FL^p norm; support size drawn at random.
ModeVector random_unit_vector(int n_max, double p, std::mt19937_64& rng);

/// Uniform double in [0, 1) from the top 53 bits of one draw, so streams
/// agree across standard libraries.
double uniform01(std::mt19937_64& rng);

}  // namespace nfnls
