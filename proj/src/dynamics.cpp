#include "nfnls/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "nfnls/errors.hpp"
#include "nfnls/fft.hpp"

namespace nfnls {

void ModelSpec::validate() const {
    if (sign != 1 && sign != -1) throw DomainError("nonlinearity_sign must be +1 or -1");
}

void Trajectory::validate() const {
    if (times.size() != states.size()) throw DomainError("trajectory: times/states size mismatch");
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw DomainError("trajectory: times must strictly increase");
        require_same_lattice(states[i], states[0], "trajectory");
    }
}

std::int64_t phase_phi(std::int64_t n1, std::int64_t n2, std::int64_t n3) noexcept {
    const std::int64_t n = n1 - n2 + n3;
    return n * n - n1 * n1 + n2 * n2 - n3 * n3;
}

namespace {

// v(m) = e^{-i m^2 t} u(m): the solution variable, so that
// e^{i Phi t} u(n1) conj(u(n2)) u(n3) = e^{i n^2 t} v(n1) conj(v(n2)) v(n3).
std::vector<cplx> to_solution_variable(const ModeVector& u, double t) {
    std::vector<cplx> v(static_cast<std::size_t>(u.size()));
    const int n_max = u.n_max();
    for (int m = -n_max; m <= n_max; ++m) v[m + n_max] = u[m] * std::polar(1.0, -double(m) * m * t);
    return v;
}

void check_trilinear_args(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3,
                          const char* where) {
    require_same_lattice(u1, u2, where);
    require_same_lattice(u1, u3, where);
}

int padded_length(int min_length) { return static_cast<int>(std::bit_ceil(static_cast<unsigned>(min_length))); }

}  // namespace

ModeVector eval_N1_first(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3, double t) {
    return u1.n_max() <= kDirectConvolutionLimit ? eval_N1_direct(u1, u2, u3, t)
                                                 : eval_N1_fft(u1, u2, u3, t);
}

ModeVector eval_N1_direct(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3, double t) {
    check_trilinear_args(u1, u2, u3, "eval_N1_first");
    const int n_max = u1.n_max();
    const auto v1 = to_solution_variable(u1, t);
    const auto v2 = to_solution_variable(u2, t);
    const auto v3 = to_solution_variable(u3, t);

    ModeVector out(n_max);
    for (int n = -n_max; n <= n_max; ++n) {
        cplx acc{};
        for (int n1 = -n_max; n1 <= n_max; ++n1) {
            for (int n3 = -n_max; n3 <= n_max; ++n3) {
                const int n2 = n1 + n3 - n;
                if (n2 < -n_max || n2 > n_max || n2 == n1 || n2 == n3) continue;
                acc += v1[n1 + n_max] * std::conj(v2[n2 + n_max]) * v3[n3 + n_max];
            }
        }
        out.at(n) = cplx(0.0, 1.0) * std::polar(1.0, double(n) * n * t) * acc;
    }
    return out;
}

ModeVector eval_N1_fft(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3, double t) {
    check_trilinear_args(u1, u2, u3, "eval_N1_first");
    const int n_max = u1.n_max();
    // Products reach |f| <= 3 n_max; L > 4 n_max keeps aliases off the lattice.
    const int L = padded_length(4 * n_max + 1);
    auto& ws = fft::workspace(L);
    auto buf = ws.buffer();

    const std::vector<cplx> v[3] = {to_solution_variable(u1, t), to_solution_variable(u2, t),
                                    to_solution_variable(u3, t)};
    std::vector<cplx> grid[3];
    for (int k = 0; k < 3; ++k) {
        std::fill(buf.begin(), buf.end(), cplx{});
        for (int m = -n_max; m <= n_max; ++m) buf[(m + L) % L] = v[k][m + n_max];
        ws.to_grid();
        grid[k].assign(buf.begin(), buf.end());
    }
    for (int x = 0; x < L; ++x) buf[x] = grid[0][x] * std::conj(grid[1][x]) * grid[2][x];
    ws.to_coefficients();

    cplx v12{}, v32{};
    for (int m = 0; m < 2 * n_max + 1; ++m) {
        v12 += v[0][m] * std::conj(v[1][m]);
        v32 += v[2][m] * std::conj(v[1][m]);
    }

    ModeVector out(n_max);
    for (int n = -n_max; n <= n_max; ++n) {
        const cplx a = v[0][n + n_max], b = v[1][n + n_max], c = v[2][n + n_max];
        const cplx admissible = buf[(n + L) % L] - v12 * c - v32 * a + a * std::conj(b) * c;
        out.at(n) = cplx(0.0, 1.0) * std::polar(1.0, double(n) * n * t) * admissible;
    }
    return out;
}

ModeVector eval_R1(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3) {
    check_trilinear_args(u1, u2, u3, "eval_R1");
    ModeVector out(u1.n_max());
    for (int n = -u1.n_max(); n <= u1.n_max(); ++n) {
        out.at(n) = cplx(0.0, -1.0) * u1[n] * std::conj(u2[n]) * u3[n];
    }
    return out;
}

ModeVector eval_R2(const ModeVector& u1, const ModeVector& u2, const ModeVector& u3) {
    check_trilinear_args(u1, u2, u3, "eval_R2");
    return (cplx(0.0, 2.0) * inner(u1, u2)) * u3;
}

ModeVector rhs(const ModeVector& u, double t, const ModelSpec& model) {
    ModeVector out = eval_N1_first(u, u, u, t);
    out += eval_R1(u, u, u);
    if (model.full()) out += eval_R2(u, u, u);
    if (model.sign != 1) out *= double(model.sign);
    return out;
}

namespace {

void guard_state(const ModeVector& u, double t) {
    for (cplx c : u.coeffs()) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()) || std::abs(c) > kOverflowGuard) {
            throw IntegrationError("coefficient overflow at t = " + std::to_string(t) +
                                   " (truncated dynamics blew up)");
        }
    }
}

ModeVector rk4_step(const ModeVector& u, double t, double h, const ModelSpec& model) {
    const ModeVector k1 = rhs(u, t, model);
    const ModeVector k2 = rhs(u + (0.5 * h) * k1, t + 0.5 * h, model);
    const ModeVector k3 = rhs(u + (0.5 * h) * k2, t + 0.5 * h, model);
    const ModeVector k4 = rhs(u + h * k3, t + h, model);
    ModeVector next = u;
    for (int n = -u.n_max(); n <= u.n_max(); ++n) {
        next.at(n) += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
    }
    return next;
}

long step_count(double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) throw DomainError("integration requires T > 0 and dt > 0");
    return std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9)));
}

}  // namespace

Trajectory integrate_reference(const ModeVector& u0, double T, double dt, const ModelSpec& model,
                               int record_stride) {
    model.validate();
    if (record_stride < 1) throw DomainError("record_stride must be >= 1");
    guard_state(u0, 0.0);
    const long steps = step_count(T, dt);
    const double h = T / double(steps);

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    ModeVector u = u0;
    for (long k = 0; k < steps; ++k) {
        const double t = double(k) * h;
        u = rk4_step(u, t, h, model);
        guard_state(u, t + h);
        if ((k + 1) % record_stride == 0 || k + 1 == steps) {
            traj.times.push_back(k + 1 == steps ? T : double(k + 1) * h);
            traj.states.push_back(u);
        }
    }
    return traj;
}

Trajectory integrate_reference_on_grid(const ModeVector& u0, double T, int grid_size, double dt_max,
                                       const ModelSpec& model) {
    if (grid_size < 2) throw DomainError("grid_size must be >= 2");
    if (!(dt_max > 0.0)) throw DomainError("dt must be positive");
    const double spacing = T / double(grid_size - 1);
    const long per_interval = std::max(1L, static_cast<long>(std::ceil(spacing / dt_max - 1e-9)));
    const long steps = per_interval * (grid_size - 1);
    Trajectory traj = integrate_reference(u0, T, T / double(steps), model, static_cast<int>(per_interval));
    for (int i = 0; i < grid_size; ++i) traj.times[i] = i == grid_size - 1 ? T : double(i) * spacing;
    return traj;
}

Trajectory integrate_split_step(const ModeVector& u0, double T, double dt, const ModelSpec& model,
                                int record_stride) {
    model.validate();
    if (record_stride < 1) throw DomainError("record_stride must be >= 1");
    guard_state(u0, 0.0);
    const long steps = step_count(T, dt);
    const double h = T / double(steps);
    const int n_max = u0.n_max();
    const int L = padded_length(8 * n_max + 4);
    auto& ws = fft::workspace(L);
    auto buf = ws.buffer();

    auto linear_half = [&](ModeVector& w) {
        for (int n = -n_max; n <= n_max; ++n) w.at(n) *= std::polar(1.0, -double(n) * n * 0.5 * h);
    };
    auto nonlinear = [&](ModeVector& w) {
        const double m = mass(w);
        std::fill(buf.begin(), buf.end(), cplx{});
        for (int n = -n_max; n <= n_max; ++n) buf[(n + L) % L] = w[n];
        ws.to_grid();
        for (auto& z : buf) {
            const double density = std::norm(z) - (model.full() ? 0.0 : 2.0 * m);
            z *= std::polar(1.0, model.sign * density * h);
        }
        ws.to_coefficients();
        for (int n = -n_max; n <= n_max; ++n) w.at(n) = buf[(n + L) % L];
    };

    Trajectory traj;
    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    ModeVector w = u0;  // solution variable; equals the profile at t = 0
    for (long k = 0; k < steps; ++k) {
        linear_half(w);
        nonlinear(w);
        linear_half(w);
        const double t = k + 1 == steps ? T : double(k + 1) * h;
        guard_state(w, t);
        if ((k + 1) % record_stride == 0 || k + 1 == steps) {
            traj.times.push_back(t);
            traj.states.push_back(interaction_representation(w, t, Picture::to_profile));
        }
    }
    return traj;
}

void write_trajectory_jsonl(std::ostream& os, const Trajectory& traj) {
    for (std::size_t i = 0; i < traj.size(); ++i) {
        nlohmann::json rec = {{"t", traj.times[i]}, {"state", to_json(traj.states[i])}};
        os << rec.dump() << '\n';
    }
}

Trajectory read_trajectory_jsonl(std::istream& is) {
    Trajectory traj;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        try {
            const auto rec = nlohmann::json::parse(line);
            traj.times.push_back(rec.at("t").get<double>());
            traj.states.push_back(mode_vector_from_json(rec.at("state")));
        } catch (const nlohmann::json::exception& ex) {
            throw DomainError(std::string("malformed trajectory line: ") + ex.what(), "parse_error");
        }
    }
    traj.validate();
    return traj;
}

}  // namespace nfnls
