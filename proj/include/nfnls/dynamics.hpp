#pragma once

// Interaction-picture form of the periodic cubic NLS on a truncated lattice.
//
// With the profile u(n,t) = e^{in^2 t} v(n,t) of a solution v, the
// renormalized equation reads
//
//   d/dt u(n) = s * ( N1(u)(n) + R1(u)(n) ),
//   N1(u)(n)  =  i sum_{n = n1 - n2 + n3, n2 != n1, n3} e^{i Phi t} u(n1) conj(u(n2)) u(n3),
//   R1(u)(n)  = -i |u(n)|^2 u(n),
//
// with Phi = n^2 - n1^2 + n2^2 - n3^2 = 2 (n - n1)(n - n3) and s = +1
// (focusing) or -1 (defocusing). The full (unrenormalized) equation adds
// R2(u)(n) = 2i mass(u) u(n). Every sum runs over the lattice only and output
// frequencies outside [-n_max, n_max] are discarded.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "nfnls/spectral.hpp"

namespace nfnls {

enum class Renormalization { renormalized, full };

struct ModelSpec {
    Renormalization renormalization = Renormalization::renormalized;
    int sign = 1;  ///< +1 focusing, -1 defocusing

    bool full() const noexcept { return renormalization == Renormalization::full; }
    void validate() const;
};

/// Time grid with one profile state per grid time.
struct Trajectory {
    std::vector<double> times;
    std::vector<ModeVector> states;

    std::size_t size() const noexcept { return times.size(); }
    /// Throws DomainError unless times strictly increase and states share n_max.
    void validate() const;
};

/// n^2 - n1^2 + n2^2 - n3^2 with n = n1 - n2 + n3, i.e. 2 (n - n1)(n - n3).
std::int64_t phase_phi(std::int64_t n1, std::int64_t n2, std::int64_t n3) noexcept;

/// Lattice size up to which eval_N1_first enumerates triples directly.
inline constexpr int kDirectConvolutionLimit = 32;

/// Non-resonant trilinear term N1(u1, u2, u3) at time t. Dispatches to the
/// direct or the FFT path depending on n_max.
ModeVector eval_N1_first(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3, double t);
ModeVector eval_N1_direct(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3, double t);
/// Full cubic convolution via zero-padded FFT minus the n2 in {n1, n3} diagonals.
ModeVector eval_N1_fft(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3, double t);

/// -i u1(n) conj(u2(n)) u3(n)
ModeVector eval_R1(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3);

/// 2i (sum_m u1(m) conj(u2(m))) u3(n)
ModeVector eval_R2(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3);

/// Right-hand side of the profile ODE for the chosen model.
ModeVector rhs(const ModeVector& u, double t, const ModelSpec& model);

/// Magnitude above which a coefficient is treated as truncation blow-up.
inline constexpr double kOverflowGuard = 1e150;

/// Classical RK4 on the profile ODE from t = 0 to T. The step is adjusted
/// down to T / ceil(T / dt); states are recorded every `record_stride`
/// steps and at T. Throws IntegrationError on blow-up.
Trajectory integrate_reference(const ModeVector& u0, double T, double dt, const ModelSpec& model,
                               int record_stride = 1);

/// RK4 recorded exactly on the uniform grid t_i = i T / (grid_size - 1),
/// using the largest step <= dt_max that divides the grid spacing.
Trajectory integrate_reference_on_grid(const ModeVector& u0, double T, int grid_size, double dt_max,
                                       const ModelSpec& model);

/// Strang split-step integrator in the solution variable (exact linear
/// flow, pointwise nonlinear phase rotation on a padded grid), returned as
/// a profile trajectory. Cross-check only: the pointwise step is not a
/// Galerkin projection, so agreement with integrate_reference is limited by
/// aliasing of the exponential.
Trajectory integrate_split_step(const ModeVector& u0, double T, double dt, const ModelSpec& model,
                                int record_stride = 1);

/// One JSON record per line: { "t": float, "state": ModeVector-json }.
void write_trajectory_jsonl(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_jsonl(std::istream& is);

}  // namespace nfnls
