#include <doctest.h>

#include <cmath>

#include "bubbletree/constants.hpp"
#include "bubbletree/errors.hpp"
#include "bubbletree/reduced_ode.hpp"

using namespace bubbletree;

TEST_SUITE("reduced") {

TEST_CASE("right-hand side: frozen lambda_1 and the classified sign directions") {
    EquationKind n8 = EquationKind::nlh(8);
    auto d = ode_rhs({1.0}, n8, {1});
    CHECK(d[0] == 0.0);
    // NLH with iota_bar_2 = -1 shrinks
    auto d2 = ode_rhs({1.0, 0.1}, n8, {1, -1});
    CHECK(d2[1] < 0.0);
    // HMHF with iota_bar_2 = +1 shrinks since kappa < 0
    auto d3 = ode_rhs({1.0, 0.1}, EquationKind::hmhf(3), {1, 1});
    CHECK(d3[1] < 0.0);
    CHECK_THROWS_AS(ode_rhs({0.1, 1.0}, n8, {1, -1}), ParameterError);
}

TEST_CASE("the universal family solves the system identically") {
    for (auto kind : {EquationKind::hmhf(3), EquationKind::nlh(7)}) {
        RateTable rt = rates(kind, 3, 1.0);
        const auto iotas = classify_signs(kind, 3).front();
        for (double t : {1.0, 10.0, 100.0}) {
            std::vector<double> lam(3);
            for (std::size_t j = 1; j <= 3; ++j) lam[j - 1] = lambda_ex(rt, j, t);
            auto d = ode_rhs(lam, kind, iotas);
            for (std::size_t j = 2; j <= 3; ++j) {
                const double exact =
                    -rt.alphas[j - 1] * rt.betas[j - 1] * std::pow(t, -rt.alphas[j - 1] - 1.0);
                CHECK(std::abs(d[j - 1] - exact) <= 1e-10 * std::abs(exact));
            }
            CHECK(d[0] == 0.0);
        }
    }
}

TEST_CASE("two bubbles reach the universal rate from a generic seed") {
    EquationKind kind = EquationKind::hmhf(3);
    RateTable rt = rates(kind, 2, 1.0);
    ScaleTrajectory tr = integrate_scales({1.0, 0.05}, kind, {1, 1}, 1.0, 1e4);
    CHECK(!tr.collision);
    CHECK(std::abs(tr.fitted[1].exponent - 1.0) < 0.02);
    CHECK(std::abs(tr.fitted[1].prefactor / rt.betas[1] - 1.0) < 0.05);
    // lambda_1 exactly frozen; mu eventually decreasing
    for (const auto& row : tr.scales) CHECK(row[0] == doctest::Approx(1.0).epsilon(1e-12));
    const auto mu_of = [&](std::size_t i) { return tr.scales[i][1] / tr.scales[i][0]; };
    for (std::size_t i = tr.times.size() / 2; i + 1 < tr.times.size(); ++i)
        CHECK(mu_of(i + 1) < mu_of(i));
}

TEST_CASE("three bubbles recover exponents (0, 1, 4)") {
    EquationKind kind = EquationKind::hmhf(3);
    RateTable rt = rates(kind, 3, 1.0);
    std::vector<double> init = {1.0, rt.betas[1], rt.betas[2]};
    ScaleTrajectory tr = integrate_scales(init, kind, {1, 1, 1}, 1.0, 1e4);
    CHECK(!tr.collision);
    CHECK(std::abs(tr.fitted[0].exponent - 0.0) < 0.03);
    CHECK(std::abs(tr.fitted[1].exponent - 1.0) < 0.03);
    CHECK(std::abs(tr.fitted[2].exponent - 4.0) < 0.12);  // within 3% of 4
}

TEST_CASE("wrong sign pattern collides") {
    ScaleTrajectory tr = integrate_scales({1.0, 0.1}, EquationKind::nlh(8), {1, 1}, 1.0, 1e4);
    CHECK(tr.collision);
    CHECK(tr.t_collision < 1e4);
    ScaleTrajectory tr2 = integrate_scales({1.0, 0.1}, EquationKind::hmhf(3), {1, -1}, 1.0, 1e4);
    CHECK(tr2.collision);
}

TEST_CASE("classified sign patterns") {
    auto nlh = classify_signs(EquationKind::nlh(8), 2);
    REQUIRE(nlh.size() == 2);
    CHECK(nlh[0] == std::vector<int>{1, -1});
    CHECK(nlh[1] == std::vector<int>{-1, 1});
    auto hm = classify_signs(EquationKind::hmhf(3), 2);
    CHECK(hm[0] == std::vector<int>{1, 1});
    CHECK(hm[1] == std::vector<int>{-1, -1});
    auto j1 = classify_signs(EquationKind::nlh(8), 1);
    REQUIRE(j1.size() == 2);  // both global signs admissible
}

TEST_CASE("parabolic time-scaling covariance") {
    EquationKind kind = EquationKind::hmhf(3);
    const double c = 3.0;
    for (double t_end : {10.0, 40.0, 100.0}) {
        ScaleTrajectory base = integrate_scales({1.0, 0.08}, kind, {1, 1}, 1.0, t_end, 1e-11);
        ScaleTrajectory scal = integrate_scales({c * 1.0, c * 0.08}, kind, {1, 1}, c * c * 1.0,
                                                c * c * t_end, 1e-11);
        // endpoints are hit exactly by both integrations
        CHECK(scal.times.back() == doctest::Approx(c * c * base.times.back()).epsilon(1e-12));
        CHECK(scal.scales.back()[1] == doctest::Approx(c * base.scales.back()[1]).epsilon(1e-7));
        CHECK(scal.scales.back()[0] == doctest::Approx(c * base.scales.back()[0]).epsilon(1e-12));
    }
}

} // TEST_SUITE
