#include "nfnls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nfnls/errors.hpp"

namespace nfnls {

ModeVector::ModeVector(int n_max) : n_max_(n_max) {
    if (n_max < 0) throw DomainError("ModeVector: n_max must be nonnegative");
    coeffs_.assign(static_cast<std::size_t>(2 * n_max + 1), cplx{});
}

ModeVector ModeVector::from_modes(int n_max, std::initializer_list<std::pair<int, cplx>> modes) {
    return from_modes(n_max, std::span<const std::pair<int, cplx>>(modes.begin(), modes.size()));
}

ModeVector ModeVector::from_modes(int n_max, std::span<const std::pair<int, cplx>> modes) {
    ModeVector u(n_max);
    for (const auto& [n, c] : modes) u.at(n) += c;
    return u;
}

cplx& ModeVector::at(int n) {
    if (!contains(n)) {
        throw DomainError("frequency " + std::to_string(n) + " outside lattice [-" +
                          std::to_string(n_max_) + ", " + std::to_string(n_max_) + "]");
    }
    return coeffs_[n + n_max_];
}

bool ModeVector::all_finite() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) {
        return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
}

bool ModeVector::is_zero() const noexcept {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](cplx c) { return c == cplx{}; });
}

ModeVector ModeVector::truncated(int m) const {
    ModeVector out(*this);
    for (int n = -n_max_; n <= n_max_; ++n) {
        if (std::abs(n) > m) out.coeffs_[n + n_max_] = cplx{};
    }
    return out;
}

ModeVector& ModeVector::operator+=(const ModeVector& other) {
    require_same_lattice(*this, other, "ModeVector::operator+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

ModeVector& ModeVector::operator-=(const ModeVector& other) {
    require_same_lattice(*this, other, "ModeVector::operator-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

ModeVector& ModeVector::operator*=(cplx c) noexcept {
    for (auto& x : coeffs_) x *= c;
    return *this;
}

void require_same_lattice(const ModeVector& a, const ModeVector& b, const char* where) {
    if (a.n_max() != b.n_max()) {
        throw DomainError(std::string(where) + ": mismatched n_max (" + std::to_string(a.n_max()) +
                          " vs " + std::to_string(b.n_max()) + ")");
    }
}

double fl_norm(const ModeVector& u, FLParams params) {
    if (!(params.p >= 1.0)) throw DomainError("fl_norm: p must be >= 1");
    if (!std::isfinite(params.s)) throw DomainError("fl_norm: s must be finite");

    const int n_max = u.n_max();
    std::vector<double> w;
    w.reserve(static_cast<std::size_t>(u.size()));
    double peak = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
        double a = std::abs(u[n]);
        if (params.s != 0.0) a *= std::pow(1.0 + double(n) * n, 0.5 * params.s);
        w.push_back(a);
        peak = std::max(peak, a);
    }
    if (std::isinf(params.p) || peak == 0.0) return peak;
    if (params.p == 1.0) {
        double sum = 0.0;
        for (double a : w) sum += a;
        return sum;
    }
    // Scale by the peak so large p neither overflows nor underflows.
    double sum = 0.0;
    for (double a : w) sum += std::pow(a / peak, params.p);
    return peak * std::pow(sum, 1.0 / params.p);
}

double mass(const ModeVector& u) {
    double m = 0.0;
    for (cplx c : u.coeffs()) m += std::norm(c);
    return m;
}

cplx inner(const ModeVector& u1, const ModeVector& u2) {
    require_same_lattice(u1, u2, "inner");
    cplx s{};
    auto a = u1.coeffs();
    auto b = u2.coeffs();
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

ModeVector gauge_transform(const ModeVector& u, double t, int sign, GaugeDirection direction) {
    if (sign != 1 && sign != -1) throw DomainError("gauge_transform: sign must be +1 or -1");
    const double dir = direction == GaugeDirection::forward ? -1.0 : 1.0;
    return std::polar(1.0, dir * 2.0 * sign * t * mass(u)) * u;
}

ModeVector interaction_representation(const ModeVector& u, double t, Picture direction) {
    const double dir = direction == Picture::to_profile ? 1.0 : -1.0;
    ModeVector out(u);
    for (int n = -u.n_max(); n <= u.n_max(); ++n) {
        out.at(n) *= std::polar(1.0, dir * double(n) * n * t);
    }
    return out;
}

nlohmann::json to_json(const ModeVector& u) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (int n = -u.n_max(); n <= u.n_max(); ++n) {
        coeffs.push_back({n, u[n].real(), u[n].imag()});
    }
    return {{"n_max", u.n_max()}, {"coeffs", std::move(coeffs)}};
}

ModeVector mode_vector_from_json(const nlohmann::json& j) {
    try {
        ModeVector u(j.at("n_max").get<int>());
        for (const auto& e : j.at("coeffs")) {
            if (!e.is_array() || e.size() != 3) throw DomainError("coeff entry must be [n, re, im]");
            u.at(e[0].get<int>()) += cplx(e[1].get<double>(), e[2].get<double>());
        }
        if (!u.all_finite()) throw DomainError("ModeVector JSON contains non-finite values");
        return u;
    } catch (const nlohmann::json::exception& ex) {
        throw DomainError(std::string("malformed ModeVector JSON: ") + ex.what(), "parse_error");
    }
}

}  // namespace nfnls
