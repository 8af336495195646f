#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "urnsim/equilibria.hpp"
#include "urnsim/rng.hpp"
#include "urnsim/stability.hpp"

using namespace urnsim;

namespace {

ModelParams lp_fig(int n) {
    return ModelParams(n, 0.1, 0.2, 0.4, ReinforcementFunction::lp(0.9, 1.0 / 3.0));
}

JacobianSpec random_spec(SplitMix64& rng, int n) {
    JacobianSpec spec;
    spec.alpha_over_n = 0.95 * rng.uniform01() / n;
    for (int i = 0; i < n; ++i) spec.d.push_back(-2.0 + 3.0 * rng.uniform01());
    return spec;
}

} // namespace

TEST_CASE("jacobian diagonal entries") {
    // Tech has f'(0) = 0, so d_i = -1 exactly at the origin
    ModelParams p(4, 0.3, 0.1, 0.5, ReinforcementFunction::tech(0.9));
    const JacobianSpec spec = jacobian(p, {0.0, 0.0, 0.0, 0.0});
    CHECK(spec.alpha_over_n == doctest::Approx(0.3 / 4.0).epsilon(1e-15));
    for (double d : spec.d) CHECK(d == -1.0);

    // equal arguments give equal entries
    const JacobianSpec sync = jacobian(p, std::vector<double>(4, 0.37));
    for (double d : sync.d) CHECK(d == sync.d[0]);

    // the materialized matrix is symmetric by construction
    const auto a = spec.dense();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(a[i * 4 + j] == a[j * 4 + i]);
}

TEST_CASE("jacobian columns match finite differences of the drift") {
    ModelParams p(3, 0.25, 0.15, 0.7, ReinforcementFunction::logp(6.0, 0.4));
    const std::vector<double> z{0.21, 0.52, 0.83};
    const auto a = jacobian(p, z).dense();
    const double h = 1e-6;
    for (int j = 0; j < 3; ++j) {
        std::vector<double> zp(z), zm(z);
        zp[j] += h;
        zm[j] -= h;
        const auto fp = drift(p, zp), fm = drift(p, zm);
        for (int i = 0; i < 3; ++i)
            CHECK(std::abs((fp[i] - fm[i]) / (2.0 * h) - a[i * 3 + j]) <= 1e-6);
    }
}

TEST_CASE("one-point spectrum closed form") {
    JacobianSpec spec;
    spec.alpha_over_n = 0.4 / 5.0;
    spec.d.assign(5, -1.0);
    const auto [l1, l2] = eigen_sync(spec);
    CHECK(l1 == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(l2 == doctest::Approx(-0.6).epsilon(1e-15));

    spec.d[2] = -0.5;
    CHECK_THROWS_AS(eigen_sync(spec), std::invalid_argument);
}

TEST_CASE("spectrum at the LP figure zero") {
    ModelParams p = lp_fig(2);
    const auto zeros = sync_zeros(p);
    REQUIRE(zeros.size() == 1);
    // frozen from the closed form (1-a-b) f'(z) - 1 at the quadratic root
    CHECK(zeros[0].spectrum[0] == doctest::Approx(-0.7395365489651216).epsilon(1e-10));
    CHECK(zeros[0].spectrum[1] == doctest::Approx(-0.6395365489651216).epsilon(1e-10));
    CHECK(zeros[0].stability == Stability::StrictlyStable);
}

TEST_CASE("closed forms agree with the dense eigensolver") {
    SplitMix64 rng(99);

    // one-point structure
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 6);
        JacobianSpec spec;
        spec.alpha_over_n = 0.9 * rng.uniform01() / n;
        spec.d.assign(n, -2.0 + 3.0 * rng.uniform01());
        const auto [l1, l2] = eigen_sync(spec);
        const auto dense = eigen_general(spec);
        std::vector<double> expect(n - 1, l1);
        expect.push_back(l2);
        std::sort(expect.begin(), expect.end());
        for (int i = 0; i < n; ++i) REQUIRE(std::abs(dense[i] - expect[i]) <= 1e-12);
    }

    // two-group structure
    for (int trial = 0; trial < 1000; ++trial) {
        const int n1 = 1 + static_cast<int>(rng.uniform01() * 4);
        const int n2 = 1 + static_cast<int>(rng.uniform01() * 4);
        const double c2 = 0.9 * rng.uniform01() / (n1 + n2);
        const double d1 = -2.0 + 3.0 * rng.uniform01();
        double d2 = -2.0 + 3.0 * rng.uniform01();
        if (std::abs(d1 - d2) < 1e-6) d2 += 0.1;
        const auto closed = eigen_two_group(c2, d1, n1, d2, n2);

        JacobianSpec spec;
        spec.alpha_over_n = c2;
        spec.d.assign(n1, d1);
        spec.d.insert(spec.d.end(), n2, d2);
        const auto dense = eigen_general(spec);
        REQUIRE(closed.size() == dense.size());
        for (std::size_t i = 0; i < closed.size(); ++i)
            REQUIRE(std::abs(closed[i] - dense[i]) <= 1e-10);
    }
}

TEST_CASE("two-group stability conditions") {
    SplitMix64 rng(4242);
    for (int trial = 0; trial < 2000; ++trial) {
        const int n1 = 1 + static_cast<int>(rng.uniform01() * 5);
        const int n2 = 1 + static_cast<int>(rng.uniform01() * 5);
        const int n = n1 + n2;
        const double c2 = (0.02 + 0.93 * rng.uniform01()) / n;
        const double d1 = -1.5 + 2.0 * rng.uniform01();
        double d2 = -1.5 + 2.0 * rng.uniform01();
        if (std::abs(d1 - d2) < 1e-6) d2 += 0.05;

        const auto eig = eigen_two_group(c2, d1, n1, d2, n2);
        const bool all_negative = eig.back() < 0.0;

        // criterion on the quadratic coefficients
        const double b = d1 + d2 + c2 * n;
        const double c = d1 * d2 + c2 * n1 * d2 + c2 * n2 * d1;
        const bool predicted = d1 < 0.0 && d2 < 0.0 && b < 0.0 && c >= 0.0;
        if (all_negative) {
            CHECK(predicted);
            // necessary condition D_i < -c^2 N_i
            CHECK(d1 < -c2 * n1);
            CHECK(d2 < -c2 * n2);
        }
        if (predicted) CHECK(all_negative);

        // sufficient condition: D_i <= -c^2 N for both groups
        if (d1 <= -c2 * n && d2 <= -c2 * n)
            CHECK(classify(eig) == Stability::StrictlyStable);
    }

    JacobianSpec three;
    three.alpha_over_n = 0.05;
    three.d = {-1.0, -0.5, 0.0};
    CHECK_THROWS_AS(eigen_two_group(three), std::invalid_argument);
    CHECK_THROWS_AS(eigen_two_group(0.1, -1.0, 0, -0.5, 2), std::invalid_argument);
}

TEST_CASE("dense solver properties") {
    SplitMix64 rng(2718);

    // no interaction: eigenvalues are the diagonal entries
    JacobianSpec diag;
    diag.alpha_over_n = 0.0;
    diag.d = {0.3, -1.2, -0.4, 0.9};
    auto sorted_d = diag.d;
    std::sort(sorted_d.begin(), sorted_d.end());
    const auto eig0 = eigen_general(diag);
    for (int i = 0; i < 4; ++i) CHECK(eig0[i] == doctest::Approx(sorted_d[i]).epsilon(1e-14));

    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 7);
        const JacobianSpec spec = random_spec(rng, n);
        const auto eig = eigen_general(spec);
        const double alpha = spec.alpha_over_n * n;

        // rank-one update interlacing envelope
        const double dmin = *std::min_element(spec.d.begin(), spec.d.end());
        const double dmax = *std::max_element(spec.d.begin(), spec.d.end());
        for (double l : eig) {
            REQUIRE(l >= dmin - 1e-10);
            REQUIRE(l <= dmax + alpha + 1e-10);
        }

        // trace identity
        double trace = alpha, esum = 0.0;
        for (double d : spec.d) trace += d;
        for (double l : eig) esum += l;
        REQUIRE(std::abs(trace - esum) <= 1e-10);

        // characteristic polynomial residual at every eigenvalue
        for (double l : eig) REQUIRE(charpoly_relative_residual(spec, l) <= 1e-8);
    }

    // N = 2 determinant check
    JacobianSpec two;
    two.alpha_over_n = 0.15;
    two.d = {-0.8, -0.3};
    const auto eig = eigen_general(two);
    const double det = (two.d[0] + 0.15) * (two.d[1] + 0.15) - 0.15 * 0.15;
    CHECK(eig[0] * eig[1] == doctest::Approx(det).epsilon(1e-10));
}

TEST_CASE("classification margins") {
    CHECK(classify({-1.0, -0.6}) == Stability::StrictlyStable);
    CHECK(classify({-1e-12, -0.5}) == Stability::Stable);
    CHECK(classify({0.0, -0.5}) == Stability::Stable);
    CHECK(classify({1e-6, -0.5}) == Stability::LinearlyUnstable);
    CHECK(classify({0.2}) == Stability::LinearlyUnstable);
    CHECK_THROWS_AS(classify({}), std::invalid_argument);

    // steep symmetric LogP at 1/2: d = 0.6*7.5 - 1 = 3.5, unstable
    ModelParams p(2, 0.4, 0.0, 0.5, ReinforcementFunction::logp(30.0, 0.5));
    const auto spectrum = spectrum_at(p, {0.5, 0.5});
    CHECK(spectrum[0] == doctest::Approx(3.5).epsilon(1e-13));
    CHECK(spectrum[1] == doctest::Approx(3.9).epsilon(1e-13));
    CHECK(classify(spectrum) == Stability::LinearlyUnstable);
}

TEST_CASE("spectrum dispatch covers the group structures") {
    // equal d on distinct group values routes through the one-point form
    ModelParams pt(4, 0.14, 0.0, 0.5, ReinforcementFunction::tech(0.99));
    const auto ns = nosync_zeros(pt);
    for (const auto& z : ns) {
        if (z.groups.size() == 2 && z.groups[0].count == 2) {
            const double d = pt.weight() * pt.f.deriv(z.groups[0].value) - 1.0;
            CHECK(z.spectrum[0] == doctest::Approx(d).epsilon(1e-9));
            CHECK(z.spectrum.back() == doctest::Approx(d + pt.alpha).epsilon(1e-9));
        }
        // structured path always matches the dense route
        const auto dense = eigen_general(jacobian(pt, z.expand()));
        for (std::size_t i = 0; i < dense.size(); ++i)
            CHECK(std::abs(dense[i] - z.spectrum[i]) <= 1e-10);
    }
}
