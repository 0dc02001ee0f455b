#pragma once

// Truncated Fourier representation on the circle.
//
// A ModeVector holds the coefficients u(n), |n| <= n_max, of
// u(x) = sum_n u(n) e^{inx}. Factors of 2*pi are dropped throughout, so the
// mass is simply sum_n |u(n)|^2.

#include <complex>
#include <initializer_list>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

namespace nfnls {

using cplx = std::complex<double>;

class ModeVector {
public:
    ModeVector() : ModeVector(0) {}
    explicit ModeVector(int n_max);

    /// Zero-padded construction from (frequency, value) pairs; every
    /// frequency must lie in [-n_max, n_max].
    static ModeVector from_modes(int n_max, std::initializer_list<std::pair<int, cplx>> modes);
    static ModeVector from_modes(int n_max, std::span<const std::pair<int, cplx>> modes);

    int n_max() const noexcept { return n_max_; }
    int size() const noexcept { return static_cast<int>(coeffs_.size()); }
    bool contains(int n) const noexcept { return n >= -n_max_ && n <= n_max_; }

    /// Coefficient at frequency n; zero outside the lattice.
    cplx operator[](int n) const noexcept { return contains(n) ? coeffs_[n + n_max_] : cplx{}; }
    /// Mutable coefficient; throws DomainError outside the lattice.
    cplx& at(int n);

    /// Dense storage, index n + n_max.
    std::span<const cplx> coeffs() const noexcept { return coeffs_; }
    std::span<cplx> coeffs() noexcept { return coeffs_; }

    bool all_finite() const noexcept;
    bool is_zero() const noexcept;

    /// Copy restricted to |n| <= m (higher modes zeroed); lattice unchanged.
    ModeVector truncated(int m) const;

    ModeVector& operator+=(const ModeVector& other);
    ModeVector& operator-=(const ModeVector& other);
    ModeVector& operator*=(cplx c) noexcept;

    friend ModeVector operator+(ModeVector a, const ModeVector& b) { return a += b; }
    friend ModeVector operator-(ModeVector a, const ModeVector& b) { return a -= b; }
    friend ModeVector operator*(cplx c, ModeVector a) { return a *= c; }
    friend ModeVector operator*(ModeVector a, cplx c) { return a *= c; }
    friend bool operator==(const ModeVector& a, const ModeVector& b) = default;

private:
    int n_max_;
    std::vector<cplx> coeffs_;
};

/// Throws DomainError unless both vectors live on the same lattice.
void require_same_lattice(const ModeVector& a, const ModeVector& b, const char* where);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Weighted Fourier-Lebesgue exponents; p may be kInfinity.
struct FLParams {
    double s = 0.0;
    double p = 2.0;
};

/// (sum_n <n>^{sp} |u(n)|^p)^{1/p}, <n> = (1+n^2)^{1/2}; sup norm for p = inf.
double fl_norm(const ModeVector& u, FLParams params);

/// Shorthand for the unweighted FL^p norm.
inline double fl_norm(const ModeVector& u, double p) { return fl_norm(u, FLParams{0.0, p}); }

/// sum_n |u(n)|^2
double mass(const ModeVector& u);

/// sum_m u1(m) conj(u2(m))
cplx inner(const ModeVector& u1, const ModeVector& u2);

enum class GaugeDirection { forward, inverse };

/// Forward map multiplies by e^{-2i sign t mass(u)}, the inverse by
/// e^{+2i sign t mass(u)}; sign = +1 focusing, -1 defocusing. Takes the
/// full cubic equation to its renormalized form.
ModeVector gauge_transform(const ModeVector& u, double t, int sign, GaugeDirection direction);

enum class Picture { to_profile, to_solution };

/// Profile u(n) e^{+in^2 t} (to_profile) or solution u(n) e^{-in^2 t} (to_solution).
ModeVector interaction_representation(const ModeVector& u, double t, Picture direction);

/// { "n_max": int, "coeffs": [[n, re, im], ...] } sorted by n.
nlohmann::json to_json(const ModeVector& u);
ModeVector mode_vector_from_json(const nlohmann::json& j);

}  // namespace nfnls
