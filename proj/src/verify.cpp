#include "nfnls/verify.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "nfnls/errors.hpp"
#include "nfnls/trees.hpp"

namespace nfnls {

std::uint64_t divisor_count(std::int64_t n) {
    if (n < 1) throw DomainError("divisor_count: n must be >= 1");
    std::uint64_t d = 0;
    for (std::int64_t k = 1; k * k <= n; ++k) {
        if (n % k == 0) d += (k * k == n) ? 1 : 2;
    }
    return d;
}

DivisorGrowth divisor_growth_check(std::int64_t N, double delta) {
    if (N < 1) throw DomainError("divisor_growth_check: N must be >= 1");
    if (!(delta > 0.0)) throw DomainError("divisor_growth_check: delta must be > 0");
    std::vector<std::uint32_t> d(static_cast<std::size_t>(N) + 1, 0);
    for (std::int64_t k = 1; k <= N; ++k) {
        for (std::int64_t m = k; m <= N; m += k) ++d[m];
    }
    DivisorGrowth out;
    for (std::int64_t n = 1; n <= N; ++n) {
        const double r = double(d[n]) / std::pow(double(n), delta);
        if (r > out.max_ratio) {
            out.max_ratio = r;
            out.argmax = n;
        }
    }
    return out;
}

namespace {

double uniform_spacing(const Trajectory& traj) {
    if (traj.size() < 4) throw DomainError("telescoping check needs at least 4 grid times");
    const double h = traj.times[1] - traj.times[0];
    for (std::size_t i = 1; i < traj.size(); ++i) {
        if (std::abs(traj.times[i] - traj.times[i - 1] - h) > 1e-9 * h) {
            throw DomainError("telescoping check needs a uniform time grid");
        }
    }
    return h;
}

}  // namespace

double telescoping_residual(int j, const Trajectory& traj, const EvalContext& ctx_in, const ModelSpec& model) {
    model.validate();
    traj.validate();
    if (j < 1) throw DomainError("telescoping_residual: j must be >= 1");
    const double h = uniform_spacing(traj);
    EvalContext ctx = ctx_in;
    ctx.sign = model.sign;

    std::vector<TermRequest> req{{OperatorKind::N2, j}, {OperatorKind::N0, j + 1}, {OperatorKind::R, j + 1},
                                 {OperatorKind::N, j + 1}};
    if (model.full()) req.push_back({OperatorKind::R2, j + 1});

    const std::size_t n = traj.size();
    std::vector<ModeVector> lhs(n), rhs_int(n), boundary(n);
    std::int64_t omega = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto res = eval_terms(req, traj.states[i], traj.times[i], ctx);
        lhs[i] = res[0].value;
        boundary[i] = res[1].value;
        rhs_int[i] = res[2].value + res[3].value;
        if (model.full()) rhs_int[i] += res[4].value;
        for (const auto& r : res) omega = std::max(omega, r.max_modulation);
    }
    if (h * double(omega) > std::numbers::pi) {
        throw GridTooCoarse("grid spacing " + std::to_string(h) + " cannot resolve phase frequency " +
                            std::to_string(omega));
    }
    const auto q_lhs = cumulative_quadrature(lhs, h, Quadrature::simpson);
    const auto q_rhs = cumulative_quadrature(rhs_int, h, Quadrature::simpson);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ModeVector r = q_lhs[i] - q_rhs[i];
        r -= boundary[i];
        r += boundary[0];
        worst = std::max(worst, fl_norm(r, kInfinity));
    }
    return worst;
}

std::vector<ResidualRow> telescoping_order_study(int j, const ModeVector& u0, double T, const std::vector<double>& dts,
                                                 const EvalContext& ctx, const ModelSpec& model) {
    std::vector<ResidualRow> rows;
    for (double dt : dts) {
        const Trajectory traj = integrate_reference(u0, T, dt, model, 1);
        ResidualRow row;
        row.dt = T / double(traj.size() - 1);
        row.residual = telescoping_residual(j, traj, ctx, model);
        if (!rows.empty() && row.residual > 0.0 && rows.back().residual > 0.0) {
            row.order = std::log2(rows.back().residual / row.residual) / std::log2(rows.back().dt / row.dt);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<DecayRow> remainder_decay_study(const ModeVector& u, int J_min, int J_max,
                                            const std::vector<double>& t_samples, const EvalContext& ctx) {
    if (J_min < 1 || J_max < J_min) throw DomainError("remainder_decay_study: need 1 <= J_min <= J_max");
    if (t_samples.empty()) throw DomainError("remainder_decay_study: no sample times");
    auto shape = [&](int J) {
        const double df = double(tree_count(J));
        return std::pow(ctx.mod.K, -4.0 * (J - 1)) / (df * df);
    };
    std::vector<DecayRow> rows;
    for (int J = J_min; J <= J_max; ++J) {
        DecayRow row;
        row.J = J;
        for (double t : t_samples) {
            row.sup_fl_inf = std::max(row.sup_fl_inf, fl_norm(eval_generation(OperatorKind::N2, J, u, t, ctx).value, kInfinity));
        }
        rows.push_back(row);
    }
    const double c = rows.front().sup_fl_inf / shape(J_min);
    for (auto& row : rows) row.envelope = c * shape(row.J);
    return rows;
}

CompareTable compare_solutions(const ModeVector& u0, const SolverConfig& cfg, double dt_ref) {
    CompareTable out;
    out.report = solve_normal_form(u0, cfg);
    const Trajectory ref = integrate_reference_on_grid(u0, cfg.T, cfg.time_grid_size, dt_ref, cfg.model);
    const auto& sol = out.report.trajectory;
    for (std::size_t i = 0; i < sol.size(); ++i) {
        const double d = fl_norm(sol.states[i] - ref.states[i], cfg.mod.p);
        out.rows.push_back({sol.times[i], d});
        out.max_distance = std::max(out.max_distance, d);
    }
    return out;
}

StabilityTable approximation_stability(const ModeVector& u0, const std::vector<int>& m_range, const SolverConfig& cfg_in,
                                       int perturbation_probes, std::uint64_t seed) {
    if (m_range.empty()) throw DomainError("approximation_stability: empty m_range");
    for (std::size_t k = 1; k < m_range.size(); ++k) {
        if (m_range[k] <= m_range[k - 1]) throw DomainError("approximation_stability: m_range must increase");
    }
    SolverConfig cfg = cfg_in;
    cfg.validate();
    const double p = cfg.mod.p;
    if (cfg.auto_K) {
        cfg.mod.K = choose_K(fl_norm(u0, p), p, cfg.J_max, cfg.safety_constant);
        cfg.auto_K = false;
    }

    StabilityTable table;
    const auto full = solve_normal_form(u0, cfg).trajectory;
    auto probe = [&](const ModeVector& v0, const Trajectory& v) {
        const double data = fl_norm(u0 - v0, p);
        if (data > 0.0) table.lipschitz = std::max(table.lipschitz, trajectory_distance(full, v, p) / data);
    };

    std::vector<ModeVector> data;
    std::vector<Trajectory> sols;
    for (int m : m_range) {
        data.push_back(u0.truncated(m));
        sols.push_back(solve_normal_form(data.back(), cfg).trajectory);
        probe(data.back(), sols.back());
    }
    std::mt19937_64 rng(seed);
    const double scale = std::max(fl_norm(u0, p), 1e-3) * 1e-2;
    for (int k = 0; k < perturbation_probes; ++k) {
        const ModeVector v0 = u0 + scale * random_unit_vector(u0.n_max(), p, rng);
        probe(v0, solve_normal_form(v0, cfg).trajectory);
    }

    for (std::size_t k = 0; k < m_range.size(); ++k) {
        StabilityRow row;
        row.m = m_range[k];
        if (k > 0) {
            row.data_distance = fl_norm(data[k] - data[k - 1], p);
            row.solution_distance = trajectory_distance(sols[k], sols[k - 1], p);
            row.bound = table.lipschitz * row.data_distance;
            table.within_bound &= row.solution_distance <= row.bound;
        }
        table.rows.push_back(row);
    }
    for (std::size_t k = 2; k < table.rows.size(); ++k) {
        const auto& prev = table.rows[k - 1];
        const auto& cur = table.rows[k];
        if (cur.data_distance <= prev.data_distance) table.monotone &= cur.solution_distance <= prev.solution_distance;
    }
    return table;
}

ModeVector geometric_data(int n_max, double amplitude, double rate, int support) {
    if (support < 0) throw DomainError("geometric_data: support must be >= 0");
    if (!(rate >= 0.0)) throw DomainError("geometric_data: rate must be >= 0");
    ModeVector u(n_max);
    for (int n = -std::min(support, n_max); n <= std::min(support, n_max); ++n) {
        u.at(n) = amplitude * std::exp(-rate * std::abs(n)) * std::polar(1.0, 0.3 * n + 0.1 * n * n);
    }
    return u;
}

}  // namespace nfnls
