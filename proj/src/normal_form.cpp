#include "nfnls/normal_form.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "nfnls/errors.hpp"
#include "nfnls/parallel.hpp"
#include "nfnls/trees.hpp"

namespace nfnls {

// ---------------------------------------------------------------- modulation

double ModulationConfig::default_eps(double p) {
    if (!(p >= 1.0)) throw DomainError("p must be >= 1");
    if (p == 1.0) return kInfinity;
    if (std::isinf(p)) return 0.0;
    const double p_dual = p / (p - 1.0);
    return (p_dual - 1.0) / 2.0;
}

double ModulationConfig::default_theta(double p, double eps) {
    if (!(p >= 1.0)) throw DomainError("p must be >= 1");
    if (p == 1.0) return std::isinf(eps) ? 8.0 : 4.0;
    const double p_dual = std::isinf(p) ? 1.0 : p / (p - 1.0);
    const double denom = p_dual - 1.0 - eps;
    if (!(denom > 0.0)) throw DomainError("modulation exponents need p' - 1 - eps > 0");
    return 4.0 * p_dual / denom;
}

ModulationConfig ModulationConfig::from_exponent(double p, double K) {
    ModulationConfig cfg;
    cfg.p = p;
    cfg.eps = default_eps(p);
    cfg.theta = default_theta(p, cfg.eps);
    cfg.K = K;
    cfg.validate();
    return cfg;
}

double ModulationConfig::cutoff(int j) const {
    if (j < 1) throw DomainError("cutoff: generation must be >= 1");
    if (auto it = cutoff_override.find(j); it != cutoff_override.end()) return it->second;
    return std::pow((2.0 * j + 1.0) * K, theta);
}

void ModulationConfig::validate() const {
    if (!(p >= 1.0)) throw DomainError("p must be >= 1");
    if (!(eps > 0.0)) throw DomainError("eps must be > 0");
    if (!(theta > 0.0) || std::isinf(theta)) throw DomainError("theta must be finite and > 0");
    if (!(K >= 1.0) || std::isinf(K)) throw DomainError("K must be finite and >= 1");
    if (p > 1.0 && !std::isinf(p) && std::isfinite(eps) && !(p / (p - 1.0) - 1.0 - eps > 0.0)) {
        throw DomainError("modulation exponents need p' - 1 - eps > 0");
    }
    for (const auto& [j, c] : cutoff_override) {
        if (j < 1) throw DomainError("cutoff_override generation must be >= 1");
        if (!(c >= 0.0)) throw DomainError("cutoff_override values must be >= 0");
    }
}

const char* to_string(OperatorKind kind) noexcept {
    switch (kind) {
        case OperatorKind::N0: return "N0";
        case OperatorKind::N1: return "N1";
        case OperatorKind::N2: return "N2";
        case OperatorKind::N: return "N";
        case OperatorKind::R: return "R";
        case OperatorKind::R2: return "R2";
    }
    return "?";
}

OperatorKind operator_kind_from_string(const std::string& name) {
    for (auto k : {OperatorKind::N0, OperatorKind::N1, OperatorKind::N2, OperatorKind::N, OperatorKind::R,
                   OperatorKind::R2}) {
        if (name == to_string(k)) return k;
    }
    throw DomainError("unknown operator kind: " + name);
}

int operator_degree(OperatorKind kind, int j) { return kind == OperatorKind::N0 ? 2 * j - 1 : 2 * j + 1; }

// ----------------------------------------------------------------- evaluator

namespace {

constexpr int kMaxLeaves = 2 * kMaxGenerations + 1;

bool is_n_kind(OperatorKind k) { return k == OperatorKind::N1 || k == OperatorKind::N2 || k == OperatorKind::N; }

std::int64_t max_phase(int n_max) { return 8LL * n_max * n_max; }

void check_request(const TermRequest& r) {
    if (r.j < 1) throw DomainError("operator generation must be >= 1");
    if (r.kind == OperatorKind::N0 && r.j < 2) throw DomainError("N0 is defined for j >= 2");
    if (r.j > kMaxGenerations) {
        throw SizeError("generation " + std::to_string(r.j) + " exceeds the guard " + std::to_string(kMaxGenerations));
    }
}

// Sums over the last generation grouped by the (signed) phase psi it adds
// to mut, for every leaf frequency m and conjugation sigma. Lets N1/N2
// windows |mut + psi| <= c be read off as prefix-sum differences.
class LeafTables {
public:
    LeafTables(const ModeVector& u, double t, int sign_convention_flip) : n_max_(u.n_max()) {
        off_ = 4LL * n_max_ * n_max_;
        bins_ = 2 * off_ + 1;
        const int lattice = 2 * n_max_ + 1;
        data_.resize(static_cast<std::size_t>(2 * lattice));
        for (auto& tb : data_) {
            tb.prefix.assign(bins_ + 1, cplx{});
            tb.count.assign(bins_ + 1, 0);
        }
        std::vector<cplx> raw_plus(bins_), raw_minus(bins_);
        std::vector<std::int64_t> cnt_plus(bins_), cnt_minus(bins_);
        for (int m = -n_max_; m <= n_max_; ++m) {
            std::fill(raw_plus.begin(), raw_plus.end(), cplx{});
            std::fill(raw_minus.begin(), raw_minus.end(), cplx{});
            std::fill(cnt_plus.begin(), cnt_plus.end(), 0);
            std::fill(cnt_minus.begin(), cnt_minus.end(), 0);
            for (int m1 = -n_max_; m1 <= n_max_; ++m1) {
                for (int m3 = -n_max_; m3 <= n_max_; ++m3) {
                    const int m2 = m1 + m3 - m;
                    if (m2 < -n_max_ || m2 > n_max_ || m2 == m1 || m2 == m3) continue;
                    const std::int64_t mu = 2LL * (m - m1) * (m - m3);
                    const cplx val = u[m1] * std::conj(u[m2]) * u[m3];
                    raw_plus[mu / 2 + off_] += std::polar(1.0, double(mu) * t) * val;
                    ++cnt_plus[mu / 2 + off_];
                    const std::int64_t psi = sign_convention_flip * mu;
                    raw_minus[psi / 2 + off_] += std::polar(1.0, double(psi) * t) * std::conj(val);
                    ++cnt_minus[psi / 2 + off_];
                }
            }
            finish(table(m, +1), raw_plus, cnt_plus);
            finish(table(m, -1), raw_minus, cnt_minus);
        }
    }

    struct Window {
        cplx inside, total;
        std::int64_t count_inside = 0, count_total = 0;
    };

    // Sums over psi with |mut + psi| <= c.
    Window window(int m, int sigma, std::int64_t mut, double c) const {
        const Table& tb = table(m, sigma);
        const auto [a, b] = bin_range(mut, c);
        Window w;
        w.total = tb.prefix[bins_];
        w.count_total = tb.count[bins_];
        if (a <= b) {
            w.inside = tb.prefix[b + 1] - tb.prefix[a];
            w.count_inside = tb.count[b + 1] - tb.count[a];
        }
        return w;
    }

    struct Extremes {
        bool any = false;
        std::int64_t lo = 0, hi = 0;
        void merge(std::int64_t v) {
            if (!any) {
                lo = hi = v;
                any = true;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        void merge(const Extremes& o) {
            if (o.any) {
                merge(o.lo);
                merge(o.hi);
            }
        }
    };

    // min / max of |mut + psi| over occupied bins inside (or outside) the window.
    Extremes modulation(int m, int sigma, std::int64_t mut, double c, bool inside) const {
        const Table& tb = table(m, sigma);
        const auto [a, b] = bin_range(mut, c);
        Extremes e;
        if (inside) {
            range_extremes(tb, a, b, mut, e);
        } else {
            range_extremes(tb, 0, std::min<std::int64_t>(a, bins_) - 1, mut, e);
            range_extremes(tb, std::max<std::int64_t>(b, -1) + 1, bins_ - 1, mut, e);
        }
        return e;
    }

private:
    struct Table {
        std::vector<cplx> prefix;
        std::vector<std::int64_t> count;
        std::vector<std::int64_t> next, prev;  // nearest occupied bin at or after / before
    };

    Table& table(int m, int sigma) { return data_[2 * (m + n_max_) + (sigma > 0 ? 0 : 1)]; }
    const Table& table(int m, int sigma) const { return data_[2 * (m + n_max_) + (sigma > 0 ? 0 : 1)]; }

    void finish(Table& tb, const std::vector<cplx>& raw, const std::vector<std::int64_t>& cnt) const {
        for (std::int64_t k = 0; k < bins_; ++k) {
            tb.prefix[k + 1] = tb.prefix[k] + raw[k];
            tb.count[k + 1] = tb.count[k] + cnt[k];
        }
        tb.next.assign(bins_ + 1, bins_);
        tb.prev.assign(bins_ + 1, -1);
        for (std::int64_t k = bins_ - 1; k >= 0; --k) tb.next[k] = cnt[k] > 0 ? k : tb.next[k + 1];
        for (std::int64_t k = 0; k < bins_; ++k) tb.prev[k] = cnt[k] > 0 ? k : (k > 0 ? tb.prev[k - 1] : -1);
    }

    std::pair<std::int64_t, std::int64_t> bin_range(std::int64_t mut, double c) const {
        // psi = 2 (k - off) in [-c - mut, c - mut]
        const double lo = std::ceil((-c - double(mut)) / 2.0) + double(off_);
        const double hi = std::floor((c - double(mut)) / 2.0) + double(off_);
        const auto a = static_cast<std::int64_t>(std::max(lo, 0.0));
        const auto b = static_cast<std::int64_t>(std::min(hi, double(bins_ - 1)));
        if (lo > double(bins_ - 1) || hi < 0.0) return {1, 0};
        return {a, b};
    }

    void range_extremes(const Table& tb, std::int64_t a, std::int64_t b, std::int64_t mut, Extremes& e) const {
        if (a > b || a >= bins_ || b < 0) return;
        const std::int64_t first = tb.next[a];
        const std::int64_t last = tb.prev[b];
        if (first > b) return;
        auto mod = [&](std::int64_t k) -> std::int64_t { return std::llabs(mut + 2 * (k - off_)); };
        e.merge(std::max(mod(first), mod(last)));
        // closest occupied bin to psi = -mut
        const std::int64_t z = std::clamp<std::int64_t>(-mut / 2 + off_, a, b);
        std::int64_t best = std::min(mod(first), mod(last));
        if (tb.next[z] <= b) best = std::min(best, mod(tb.next[z]));
        if (tb.prev[z] >= a) best = std::min(best, mod(tb.prev[z]));
        e.merge(best);
    }

    int n_max_;
    std::int64_t off_ = 0, bins_ = 0;
    std::vector<Table> data_;
};

struct Slot {
    OperatorKind kind;
    int j;
    const std::vector<cplx>* substitution = nullptr;  // y-table for R-like slots
};

struct Accumulator {
    cplx value{};
    std::uint64_t count = 0;
    LeafTables::Extremes mod;
};

struct TreeState {
    int g = 0;
    int leaves = 0;
    std::array<int, kMaxLeaves> freq{};
    std::array<int, kMaxLeaves> sigma{};
    std::int64_t mut = 0;
    double pre = 1.0;  // -W_g / (i mut_g), real; 1 for the bare root
};

class Evaluator {
public:
    Evaluator(const ModeVector& u, double t, const EvalContext& ctx, std::vector<Slot> slots, int depth)
        : u_(u), t_(t), ctx_(ctx), slots_(std::move(slots)), depth_(depth), n_max_(u.n_max()) {
        for (int g = 0; g <= kMaxGenerations; ++g) cutoff_[g] = g >= 1 ? ctx.mod.cutoff(g) : 0.0;
        bool need_tables = false;
        for (const auto& s : slots_) need_tables |= is_n_kind(s.kind) && s.j - 1 <= depth_;
        if (need_tables) {
            tables_.emplace(u, t, ctx.convention == PhaseConvention::exact ? -1 : 1);
        }
    }

    std::vector<std::vector<Accumulator>> run() {
        const int lattice = 2 * n_max_ + 1;
        std::vector<std::vector<Accumulator>> per_root(lattice, std::vector<Accumulator>(slots_.size()));
        parallel_for(static_cast<std::size_t>(lattice), [&](std::size_t i) {
            TreeState root;
            root.leaves = 1;
            root.freq[0] = static_cast<int>(i) - n_max_;
            root.sigma[0] = 1;
            visit(root, per_root[i]);
        });
        return per_root;
    }

private:
    cplx leaf_value(int m, int sigma) const { return sigma > 0 ? u_[m] : std::conj(u_[m]); }

    void visit(const TreeState& st, std::vector<Accumulator>& acc) const {
        const int j = st.g + 1;
        std::array<cplx, kMaxLeaves> x{}, excl{};
        for (int a = 0; a < st.leaves; ++a) x[a] = leaf_value(st.freq[a], st.sigma[a]);
        cplx running{1.0, 0.0};
        for (int a = 0; a < st.leaves; ++a) {
            excl[a] = running;
            running *= x[a];
        }
        const cplx product = running;
        running = {1.0, 0.0};
        for (int a = st.leaves - 1; a >= 0; --a) {
            excl[a] *= running;
            running *= x[a];
        }
        const cplx base = st.g == 0 ? cplx(1.0) : st.pre * std::polar(1.0, double(st.mut) * t_);
        const cplx si(0.0, double(ctx_.sign));

        for (std::size_t k = 0; k < slots_.size(); ++k) {
            const Slot& slot = slots_[k];
            if (slot.j != j) continue;
            Accumulator& a = acc[k];
            if (is_n_kind(slot.kind)) {
                const double c = cutoff_[j];
                for (int b = 0; b < st.leaves; ++b) {
                    const auto w = tables_->window(st.freq[b], st.sigma[b], st.mut, c);
                    const cplx coef = base * (double(st.sigma[b]) * si) * excl[b];
                    switch (slot.kind) {
                        case OperatorKind::N1:
                            a.value += coef * w.inside;
                            a.count += static_cast<std::uint64_t>(w.count_inside);
                            a.mod.merge(tables_->modulation(st.freq[b], st.sigma[b], st.mut, c, true));
                            break;
                        case OperatorKind::N2:
                            a.value += coef * (w.total - w.inside);
                            a.count += static_cast<std::uint64_t>(w.count_total - w.count_inside);
                            a.mod.merge(tables_->modulation(st.freq[b], st.sigma[b], st.mut, c, false));
                            break;
                        default:
                            a.value += coef * w.total;
                            a.count += static_cast<std::uint64_t>(w.count_total);
                            a.mod.merge(tables_->modulation(st.freq[b], st.sigma[b], st.mut, -1.0, false));
                            break;
                    }
                }
            } else if (st.g >= 1 && slot.kind == OperatorKind::N0) {
                a.value -= base * product;
                a.count += 1;
                a.mod.merge(std::llabs(st.mut));
            } else if (st.g >= 1) {
                const std::vector<cplx>& y = *slot.substitution;
                cplx sum{};
                for (int b = 0; b < st.leaves; ++b) {
                    const cplx yb = y[st.freq[b] + n_max_];
                    sum += (st.sigma[b] > 0 ? yb : std::conj(yb)) * excl[b];
                }
                a.value += base * sum;
                a.count += static_cast<std::uint64_t>(st.leaves);
                a.mod.merge(std::llabs(st.mut));
            }
        }

        if (st.g >= depth_) return;
        const double c_next = cutoff_[j];
        const bool exact = ctx_.convention == PhaseConvention::exact;
        TreeState child;
        child.g = st.g + 1;
        child.leaves = st.leaves + 2;
        for (int b = 0; b < st.leaves; ++b) {
            // leaves keep node-id order: drop b, append its three children
            int pos = 0;
            for (int a = 0; a < st.leaves; ++a) {
                if (a == b) continue;
                child.freq[pos] = st.freq[a];
                child.sigma[pos] = st.sigma[a];
                ++pos;
            }
            const int m = st.freq[b];
            const int sigma = st.sigma[b];
            child.sigma[pos] = sigma;
            child.sigma[pos + 1] = -sigma;
            child.sigma[pos + 2] = sigma;
            const double w_next = st.pre * sigma * ctx_.sign;
            for (int m1 = -n_max_; m1 <= n_max_; ++m1) {
                for (int m3 = -n_max_; m3 <= n_max_; ++m3) {
                    const int m2 = m1 + m3 - m;
                    if (m2 < -n_max_ || m2 > n_max_ || m2 == m1 || m2 == m3) continue;
                    const std::int64_t mu = 2LL * (m - m1) * (m - m3);
                    const std::int64_t mut = st.mut + ((exact && sigma < 0) ? -mu : mu);
                    if (!(double(std::llabs(mut)) > c_next)) continue;
                    child.freq[pos] = m1;
                    child.freq[pos + 1] = m2;
                    child.freq[pos + 2] = m3;
                    child.mut = mut;
                    child.pre = -w_next / double(mut);
                    visit(child, acc);
                }
            }
        }
    }

    const ModeVector& u_;
    double t_;
    const EvalContext& ctx_;
    std::vector<Slot> slots_;
    int depth_;
    int n_max_;
    std::array<double, kMaxGenerations + 1> cutoff_{};
    std::optional<LeafTables> tables_;
};

int depth_for(const TermRequest& r) { return r.j - 1; }

}  // namespace

int required_depth(std::span<const TermRequest> requests, int n_max, const ModulationConfig& mod) {
    int depth = 0;
    for (const auto& r : requests) depth = std::max(depth, depth_for(r));
    // |mut_k| <= k * 8 n_max^2, so a cutoff at or above that empties A_k^c
    // and with it every state of generation >= k.
    for (int k = 1; k <= depth; ++k) {
        if (mod.cutoff(k) >= double(k) * double(max_phase(n_max))) return k - 1;
    }
    return depth;
}

double estimated_states(int depth, int n_max) {
    const double L = 2.0 * n_max + 1.0;
    double total = L;
    for (int g = 1; g <= depth; ++g) total += double(tree_count(g)) * std::pow(L, 2.0 * g + 1.0);
    return total;
}

namespace {

std::vector<OperatorResult> run_slots(std::vector<Slot> slots, const ModeVector& u, double t,
                                      const EvalContext& ctx, int depth) {
    if (estimated_states(depth, u.n_max()) > ctx.state_budget) {
        throw SizeError("operator evaluation at depth " + std::to_string(depth) + " on n_max = " +
                        std::to_string(u.n_max()) + " exceeds the state budget");
    }
    Evaluator ev(u, t, ctx, slots, depth);
    const auto per_root = ev.run();
    std::vector<OperatorResult> out(slots.size());
    for (std::size_t k = 0; k < slots.size(); ++k) {
        out[k].value = ModeVector(u.n_max());
        LeafTables::Extremes mod;
        for (int i = 0; i < static_cast<int>(per_root.size()); ++i) {
            out[k].value.at(i - u.n_max()) = per_root[i][k].value;
            out[k].summand_count += per_root[i][k].count;
            mod.merge(per_root[i][k].mod);
        }
        out[k].min_modulation = mod.lo;
        out[k].max_modulation = mod.hi;
    }
    return out;
}

std::vector<cplx> dense(const ModeVector& v) { return {v.coeffs().begin(), v.coeffs().end()}; }

}  // namespace

std::vector<OperatorResult> eval_terms(std::span<const TermRequest> requests, const ModeVector& u, double t,
                                       const EvalContext& ctx) {
    ctx.mod.validate();
    if (ctx.sign != 1 && ctx.sign != -1) throw DomainError("nonlinearity sign must be +1 or -1");
    for (const auto& r : requests) check_request(r);

    const int n_max = u.n_max();
    const double s = ctx.sign;
    const std::vector<cplx> r1 = dense(s * eval_R1(u, u, u));
    const std::vector<cplx> r2 = dense(s * eval_R2(u, u, u));
    const int depth = required_depth(requests, n_max, ctx.mod);

    std::vector<OperatorResult> out(requests.size());
    std::vector<Slot> slots;
    std::vector<std::size_t> slot_of;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const auto& r = requests[i];
        const bool resonant = r.kind == OperatorKind::R || r.kind == OperatorKind::R2;
        if (resonant && r.j == 1) {
            out[i].value = r.kind == OperatorKind::R ? s * eval_R1(u, u, u) : s * eval_R2(u, u, u);
            out[i].summand_count = static_cast<std::uint64_t>(2 * n_max + 1);
            continue;
        }
        if (depth_for(r) > depth) {  // modulation set empty on this lattice
            out[i].value = ModeVector(n_max);
            continue;
        }
        slots.push_back({r.kind, r.j, r.kind == OperatorKind::R ? &r1 : r.kind == OperatorKind::R2 ? &r2 : nullptr});
        slot_of.push_back(i);
    }
    if (!slots.empty()) {
        auto results = run_slots(std::move(slots), u, t, ctx, depth);
        for (std::size_t k = 0; k < results.size(); ++k) out[slot_of[k]] = std::move(results[k]);
    }
    return out;
}

OperatorResult eval_generation(OperatorKind kind, int j, const ModeVector& u, double t, const EvalContext& ctx) {
    const TermRequest req{kind, j};
    return std::move(eval_terms({&req, 1}, u, t, ctx)[0]);
}

SeriesTerms eval_series(int J, const ModeVector& u, double t, const EvalContext& ctx, bool include_R2) {
    if (J < 1) throw DomainError("J_max must be >= 1");
    const double s = ctx.sign;
    SeriesTerms out{ModeVector(u.n_max()), ModeVector(u.n_max())};
    if (ctx.mod.cutoff(1) >= double(max_phase(u.n_max()))) {
        // A_1 covers the lattice: the series collapses to the plain equation.
        ctx.mod.validate();
        if (J > kMaxGenerations) throw SizeError("J_max exceeds the guard");
        out.integrand = s * (eval_N1_first(u, u, u, t) + eval_R1(u, u, u));
        if (include_R2) out.integrand += s * eval_R2(u, u, u);
        return out;
    }
    std::vector<TermRequest> req;
    for (int j = 1; j <= J; ++j) {
        if (j >= 2) req.push_back({OperatorKind::N0, j});
        req.push_back({OperatorKind::N1, j});
        req.push_back({OperatorKind::R, j});
        if (include_R2) req.push_back({OperatorKind::R2, j});
    }
    const auto res = eval_terms(req, u, t, ctx);
    for (std::size_t i = 0; i < req.size(); ++i) {
        (req[i].kind == OperatorKind::N0 ? out.boundary : out.integrand) += res[i].value;
    }
    return out;
}

ModeVector eval_unsplit_by_substitution(int j, const ModeVector& u, double t, const EvalContext& ctx) {
    check_request({OperatorKind::N, j});
    ctx.mod.validate();
    const double s = ctx.sign;
    const ModeVector n1 = s * eval_N1_first(u, u, u, t);
    if (j == 1) return n1;
    const std::vector<TermRequest> req{{OperatorKind::R, j}};
    const int depth = required_depth(req, u.n_max(), ctx.mod);
    if (j - 1 > depth) return ModeVector(u.n_max());
    const std::vector<cplx> y = dense(n1);
    return std::move(run_slots({{OperatorKind::R, j, &y}}, u, t, ctx, depth)[0].value);
}

// -------------------------------------------------------------------- bounds

double uniform01(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

ModeVector random_unit_vector(int n_max, double p, std::mt19937_64& rng) {
    const int lattice = 2 * n_max + 1;
    for (;;) {
        std::vector<int> slots(lattice);
        for (int i = 0; i < lattice; ++i) slots[i] = i - n_max;
        const int support = 1 + static_cast<int>(uniform01(rng) * lattice) % lattice;
        ModeVector u(n_max);
        for (int k = 0; k < support; ++k) {
            const int pick = k + static_cast<int>(uniform01(rng) * (lattice - k)) % (lattice - k);
            std::swap(slots[k], slots[pick]);
            const double re = 2.0 * uniform01(rng) - 1.0;
            const double im = 2.0 * uniform01(rng) - 1.0;
            u.at(slots[k]) = {re, im};
        }
        const double norm = fl_norm(u, p);
        if (norm > 0.0) return (1.0 / norm) * u;
    }
}

double bound_ratio(OperatorKind kind, int j, const ModeVector& u, double t, const EvalContext& ctx, double p) {
    const double norm = fl_norm(u, p);
    if (norm == 0.0) return 0.0;
    const OperatorResult r = eval_generation(kind, j, u, t, ctx);
    return fl_norm(r.value, p) / std::pow(norm, operator_degree(kind, j));
}

double operator_bound_ratio(OperatorKind kind, int j, double p, int trials, std::uint64_t seed,
                            const EvalContext& ctx, int n_max) {
    if (trials < 1) throw DomainError("trials must be >= 1");
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        const ModeVector u = random_unit_vector(n_max, p, rng);
        const double t = 2.0 * std::numbers::pi * uniform01(rng);
        worst = std::max(worst, bound_ratio(kind, j, u, t, ctx, p));
    }
    return worst;
}

double predicted_bound(OperatorKind kind, int j, const ModulationConfig& mod) {
    const double df = double(tree_count(j));
    const double base = std::pow(mod.K, 4.0 * (1.0 - j)) / (df * df);
    const double inv_dual = mod.p == 1.0 ? 0.0 : 1.0 - 1.0 / mod.p;
    switch (kind) {
        case OperatorKind::R: return j == 1 ? 1.0 : (2.0 * j - 1.0) * base;
        case OperatorKind::R2: return j == 1 ? 2.0 : (2.0 * j - 1.0) * base;
        case OperatorKind::N0: return base;
        case OperatorKind::N1:
        case OperatorKind::N: return std::pow(mod.K, 2.0 * mod.theta * inv_dual) * base;
        case OperatorKind::N2: return base;
    }
    return base;
}

}  // namespace nfnls
