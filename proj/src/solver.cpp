#include "nfnls/solver.hpp"

#include <cmath>

#include "nfnls/errors.hpp"
#include "nfnls/trees.hpp"

namespace nfnls {

const char* to_string(Quadrature q) noexcept { return q == Quadrature::simpson ? "simpson" : "trapezoid"; }

Quadrature quadrature_from_string(const std::string& name) {
    if (name == "trapezoid") return Quadrature::trapezoid;
    if (name == "simpson") return Quadrature::simpson;
    throw DomainError("unknown quadrature: " + name);
}

void SolverConfig::validate() const {
    model.validate();
    mod.validate();
    if (J_max < 1) throw DomainError("J_max must be >= 1");
    if (J_max > kMaxGenerations) throw SizeError("J_max exceeds the guard " + std::to_string(kMaxGenerations));
    if (n_max < 0) throw DomainError("n_max must be >= 0");
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("T must be positive");
    if (time_grid_size < 2) throw DomainError("time_grid_size must be >= 2");
    if (!(picard_tol > 0.0)) throw DomainError("picard_tol must be positive");
    if (picard_max_iter < 1) throw DomainError("picard_max_iter must be >= 1");
    if (!(safety_constant > 0.0)) throw DomainError("safety_constant must be positive");
}

std::vector<double> SolverConfig::time_grid() const {
    std::vector<double> t(time_grid_size);
    for (int i = 0; i < time_grid_size; ++i) t[i] = T * double(i) / double(time_grid_size - 1);
    t.back() = T;
    return t;
}

EvalContext SolverConfig::context() const {
    EvalContext ctx;
    ctx.mod = mod;
    ctx.sign = model.sign;
    return ctx;
}

double choose_K(double R, double p, int J_max, double safety_constant) {
    if (!(R >= 0.0) || !std::isfinite(R)) throw DomainError("choose_K: R must be finite and >= 0");
    if (!(p >= 1.0)) throw DomainError("choose_K: p must be >= 1");
    if (J_max < 1) throw DomainError("choose_K: J_max must be >= 1");
    auto sums = [&](double K) {
        double a = 0.0, b = 0.0, fact = 1.0;
        for (int j = 2; j <= J_max; ++j) {
            fact *= j;
            const double kf = std::pow(K, 4.0 * (1.0 - j));
            a += kf * std::pow(R, 2.0 * j - 1.0) / fact;
            b += kf * std::pow(2.0 * R, 2.0 * j - 2.0) / fact;
        }
        return std::max(safety_constant * a, safety_constant * b);
    };
    double K = 1.0;
    while (sums(K) > 0.1) {
        K *= 2.0;
        if (K > 0x1.0p100) throw DomainError("choose_K: no admissible K");
    }
    return K;
}

std::vector<ModeVector> cumulative_quadrature(std::span<const ModeVector> f, double h, Quadrature q) {
    const std::size_t n = f.size();
    std::vector<ModeVector> out;
    if (n == 0) return out;
    const int n_max = f[0].n_max();
    out.assign(n, ModeVector(n_max));
    auto axpy = [](ModeVector& acc, double w, const ModeVector& x) {
        auto a = acc.coeffs();
        auto b = x.coeffs();
        for (std::size_t k = 0; k < a.size(); ++k) a[k] += w * b[k];
    };
    if (q == Quadrature::trapezoid || n < 3) {
        for (std::size_t i = 1; i < n; ++i) {
            out[i] = out[i - 1];
            axpy(out[i], h / 2, f[i - 1]);
            axpy(out[i], h / 2, f[i]);
        }
        return out;
    }
    for (std::size_t i = 2; i < n; i += 2) {
        out[i] = out[i - 2];
        axpy(out[i], h / 3, f[i - 2]);
        axpy(out[i], 4 * h / 3, f[i - 1]);
        axpy(out[i], h / 3, f[i]);
    }
    if (n >= 4) {
        axpy(out[1], 9 * h / 24, f[0]);
        axpy(out[1], 19 * h / 24, f[1]);
        axpy(out[1], -5 * h / 24, f[2]);
        axpy(out[1], h / 24, f[3]);
    } else {
        axpy(out[1], 5 * h / 12, f[0]);
        axpy(out[1], 8 * h / 12, f[1]);
        axpy(out[1], -h / 12, f[2]);
    }
    for (std::size_t i = 3; i < n; i += 2) {
        out[i] = out[i - 1];
        axpy(out[i], h / 24, f[i - 3]);
        axpy(out[i], -5 * h / 24, f[i - 2]);
        axpy(out[i], 19 * h / 24, f[i - 1]);
        axpy(out[i], 9 * h / 24, f[i]);
    }
    return out;
}

namespace {

void check_grid(const Trajectory& traj, const SolverConfig& cfg) {
    const auto grid = cfg.time_grid();
    if (traj.size() != grid.size()) throw DomainError("trajectory does not match the configured time grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(traj.times[i] - grid[i]) > 1e-12 * std::max(1.0, cfg.T)) {
            throw DomainError("trajectory does not match the configured time grid");
        }
        require_same_lattice(traj.states[i], traj.states[0], "gamma_map");
    }
}

}  // namespace

Trajectory gamma_map(const ModeVector& u0, const Trajectory& traj, const SolverConfig& cfg) {
    cfg.validate();
    check_grid(traj, cfg);
    require_same_lattice(u0, traj.states[0], "gamma_map");
    const EvalContext ctx = cfg.context();
    const std::size_t n = traj.size();

    std::vector<ModeVector> boundary(n), integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto terms = eval_series(cfg.J_max, traj.states[i], traj.times[i], ctx, cfg.model.full());
        boundary[i] = std::move(terms.boundary);
        integrand[i] = std::move(terms.integrand);
    }
    const double h = cfg.T / double(n - 1);
    const auto integral = cumulative_quadrature(integrand, h, cfg.quadrature);

    Trajectory out;
    out.times = traj.times;
    out.states.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ModeVector v = u0;
        if (i > 0) {
            v += boundary[i];
            v -= boundary[0];
            v += integral[i];
        }
        out.states.push_back(std::move(v));
    }
    return out;
}

double trajectory_distance(const Trajectory& a, const Trajectory& b, double p) {
    if (a.size() != b.size()) throw DomainError("trajectories have different lengths");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, fl_norm(a.states[i] - b.states[i], p));
    return worst;
}

SolveReport solve_normal_form(const ModeVector& u0, const SolverConfig& cfg_in) {
    cfg_in.validate();
    if (u0.n_max() != cfg_in.n_max) throw DomainError("initial data lattice does not match n_max");
    if (!u0.all_finite()) throw DomainError("initial data must be finite");

    SolverConfig cfg = cfg_in;
    const double p = cfg.mod.p;
    const double R = fl_norm(u0, p);
    if (cfg.auto_K) cfg.mod.K = choose_K(R, p, cfg.J_max, cfg.safety_constant);

    SolveReport report;
    report.K_used = cfg.mod.K;
    for (int j = cfg.J_max + 1; j <= cfg.J_max + 4; ++j) {
        const double df = double(tree_count(j));
        report.tail_estimate +=
            cfg.T * std::pow(R, 2.0 * j + 1.0) * std::pow(cfg.mod.K, -4.0 * (j - 1)) / (df * df);
    }

    Trajectory traj;
    traj.times = cfg.time_grid();
    traj.states.assign(traj.times.size(), u0);
    for (int it = 1; it <= cfg.picard_max_iter; ++it) {
        Trajectory next = gamma_map(u0, traj, cfg);
        const double update = trajectory_distance(next, traj, p);
        traj = std::move(next);
        report.update_norms.push_back(update);
        report.iterations = it;
        report.final_update_norm = update;
        if (!std::isfinite(update)) throw ConvergenceError("Picard iteration diverged (non-finite update)");
        if (report.update_norms.size() >= 2) {
            const double prev = report.update_norms[report.update_norms.size() - 2];
            report.contraction_estimate = prev > 0.0 ? update / prev : 0.0;
        }
        if (update < cfg.picard_tol) {
            report.trajectory = std::move(traj);
            return report;
        }
    }
    throw ConvergenceError("Picard iteration did not reach tolerance " + std::to_string(cfg.picard_tol) +
                           " in " + std::to_string(cfg.picard_max_iter) + " iterations (last update " +
                           std::to_string(report.final_update_norm) + "); reduce T or raise K");
}

double lipschitz_probe(const ModeVector& u0, const ModeVector& v0, const SolverConfig& cfg) {
    require_same_lattice(u0, v0, "lipschitz_probe");
    const double p = cfg.mod.p;
    const double data = fl_norm(u0 - v0, p);
    if (data == 0.0) throw DomainError("lipschitz_probe: identical data");
    // both solves must use the same operator family
    SolverConfig shared = cfg;
    if (cfg.auto_K) {
        shared.validate();
        shared.mod.K = choose_K(std::max(fl_norm(u0, p), fl_norm(v0, p)), p, cfg.J_max, cfg.safety_constant);
        shared.auto_K = false;
    }
    const auto a = solve_normal_form(u0, shared);
    const auto b = solve_normal_form(v0, shared);
    return trajectory_distance(a.trajectory, b.trajectory, p) / data;
}

}  // namespace nfnls
