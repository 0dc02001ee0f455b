#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nfnls/errors.hpp"
#include "nfnls/spectral.hpp"
#include "support.hpp"

using namespace nfnls;
using testing::max_diff;
using testing::random_vector;

constexpr double pi = std::numbers::pi;

TEST_CASE("fl_norm worked values") {
    const auto single = ModeVector::from_modes(2, {{0, {3, 4}}});
    for (double p : {1.0, 1.5, 2.0, 4.0, kInfinity}) CHECK(fl_norm(single, p) == doctest::Approx(5.0).epsilon(1e-14));

    CHECK(fl_norm(ModeVector::from_modes(1, {{-1, 1}, {1, 1}}), 2.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(fl_norm(ModeVector::from_modes(2, {{0, 1}, {1, 2}, {2, 2}}), 1.0) == 5.0);
}

TEST_CASE("fl_norm weight and sup") {
    const auto u = ModeVector::from_modes(3, {{0, 1}, {3, 0.5}});
    const double w3 = std::sqrt(10.0);
    CHECK(fl_norm(u, {1.0, kInfinity}) == doctest::Approx(std::max(1.0, w3 * 0.5)));
    CHECK(fl_norm(u, {1.0, 2.0}) == doctest::Approx(std::sqrt(1.0 + 10.0 * 0.25)));
    CHECK_THROWS_AS(fl_norm(u, 0.5), DomainError);
}

TEST_CASE("mass values") {
    CHECK(mass(ModeVector::from_modes(1, {{0, 2}, {1, {0, 1}}})) == 5.0);
    CHECK(mass(ModeVector(4)) == 0.0);
    CHECK(mass(ModeVector::from_modes(5, {{5, 1}})) == 1.0);
}

TEST_CASE("gauge transform") {
    std::mt19937_64 rng(11);
    const auto u = random_vector(4, rng);
    CHECK(gauge_transform(u, 0.0, 1, GaugeDirection::forward) == u);
    for (int sign : {1, -1}) {
        const auto there = gauge_transform(u, 0.37, sign, GaugeDirection::forward);
        CHECK(max_diff(gauge_transform(there, 0.37, sign, GaugeDirection::inverse), u) < 1e-14);
    }
    const auto unit = ModeVector::from_modes(0, {{0, 1}});
    CHECK(max_diff(gauge_transform(unit, pi, 1, GaugeDirection::forward), unit) < 1e-14);

    // e^{-2 i t M} with M = mass
    const auto g = gauge_transform(u, 0.2, 1, GaugeDirection::forward);
    CHECK(std::abs(g[1] - u[1] * std::polar(1.0, -0.4 * mass(u))) < 1e-14);
}

TEST_CASE("interaction representation") {
    std::mt19937_64 rng(12);
    const auto u = random_vector(5, rng);
    CHECK(interaction_representation(u, 0.0, Picture::to_profile) == u);
    const auto two = ModeVector::from_modes(2, {{2, 1}});
    CHECK(std::abs(interaction_representation(two, pi / 4, Picture::to_profile)[2] - cplx(-1.0)) < 1e-15);
    const auto back = interaction_representation(interaction_representation(u, 1.3, Picture::to_profile), 1.3,
                                                 Picture::to_solution);
    CHECK(max_diff(back, u) < 1e-14);
}

TEST_CASE("norm properties on random vectors") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const int n_max = static_cast<int>(uniform01(rng) * 8);
        const auto u = random_vector(n_max, rng, 3.0);
        CHECK(fl_norm(u, 2.0) == doctest::Approx(std::sqrt(mass(u))).epsilon(1e-13));

        const cplx c(2.0 * uniform01(rng) - 1.0, 2.0 * uniform01(rng) - 1.0);
        for (double p : {1.0, 2.0, 3.5, kInfinity}) {
            CHECK(fl_norm(c * u, {0.7, p}) == doctest::Approx(std::abs(c) * fl_norm(u, {0.7, p})).epsilon(1e-12));
        }

        const double ps[] = {1.0, 1.5, 2.0, 4.0, 10.0, kInfinity};
        for (int k = 1; k < 6; ++k) CHECK(fl_norm(u, ps[k]) <= fl_norm(u, ps[k - 1]) * (1 + 1e-14));

        const double t = 10.0 * uniform01(rng);
        for (double p : {1.0, 2.0, kInfinity}) {
            const FLParams fp{1.5, p};
            CHECK(fl_norm(gauge_transform(u, t, 1, GaugeDirection::forward), fp) ==
                  doctest::Approx(fl_norm(u, fp)).epsilon(1e-13));
            CHECK(fl_norm(interaction_representation(u, t, Picture::to_solution), fp) ==
                  doctest::Approx(fl_norm(u, fp)).epsilon(1e-13));
        }
    }
}

TEST_CASE("lattice handling") {
    auto u = ModeVector::from_modes(2, {{-2, 1}, {1, {0, 2}}});
    CHECK(u.size() == 5);
    CHECK(u[7] == cplx{});
    CHECK_THROWS_AS(u.at(3), DomainError);
    CHECK_THROWS_AS(ModeVector::from_modes(1, {{2, 1}}), DomainError);
    CHECK_THROWS_AS(ModeVector(-1), DomainError);
    CHECK_THROWS_AS(u + ModeVector(3), DomainError);
    CHECK(u.truncated(1)[-2] == cplx{});
    CHECK(u.truncated(1)[1] == cplx(0, 2));
}

TEST_CASE("json round trip") {
    std::mt19937_64 rng(14);
    const auto u = random_vector(3, rng);
    const auto j = to_json(u);
    CHECK(j["n_max"] == 3);
    CHECK(j["coeffs"].size() == 7);
    CHECK(j["coeffs"][0][0] == -3);
    CHECK(mode_vector_from_json(nlohmann::json::parse(j.dump())) == u);

    CHECK_THROWS_AS(mode_vector_from_json(nlohmann::json::parse(R"({"n_max": 1})")), DomainError);
    CHECK_THROWS_AS(mode_vector_from_json(nlohmann::json::parse(R"({"n_max": 1, "coeffs": [[4, 1, 0]]})")),
                    DomainError);
}
