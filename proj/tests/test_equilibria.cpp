#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "urnsim/equilibria.hpp"
#include "urnsim/rng.hpp"

using namespace urnsim;

namespace {

ModelParams lp_fig(int n) {
    return ModelParams(n, 0.1, 0.2, 0.4, ReinforcementFunction::lp(0.9, 1.0 / 3.0));
}

ModelParams logp_unique(int n) {
    return ModelParams(n, 0.1, 0.3, 0.4, ReinforcementFunction::logp(5.0, 0.6));
}

ModelParams logp_frag(int n) {
    return ModelParams(n, 0.1, 0.3, 0.4, ReinforcementFunction::logp(12.0, 0.47));
}

ModelParams logp_symmetric(int n) {
    return ModelParams(n, 0.4, 0.0, 0.5, ReinforcementFunction::logp(30.0, 0.5));
}

ModelParams tech_frag(int n) {
    return ModelParams(n, 0.14, 0.0, 0.5, ReinforcementFunction::tech(0.99));
}

int count_stable(const std::vector<ZeroPoint>& zeros) {
    int k = 0;
    for (const auto& z : zeros) k += !is_unstable(z.stability);
    return k;
}

const ZeroPoint* find_near(const std::vector<ZeroPoint>& zeros,
                           const std::vector<double>& values, double tol) {
    for (const auto& z : zeros) {
        if (z.groups.size() != values.size()) continue;
        bool ok = true;
        for (std::size_t i = 0; i < values.size(); ++i)
            ok = ok && std::abs(z.groups[i].value - values[i]) <= tol;
        if (ok) return &z;
    }
    return nullptr;
}

} // namespace

TEST_CASE("drift: closed-form cases") {
    // identity reinforcement, alpha = 0: F_h = beta q + (1-beta) z_h - z_h
    ModelParams ident(3, 0.0, 0.5, 0.5, ReinforcementFunction::polynomial({0.0, 1.0}));
    const std::vector<double> z{0.1, 0.4, 0.9};
    const std::vector<double> f = drift(ident, z);
    for (int h = 0; h < 3; ++h)
        CHECK(f[h] == doctest::Approx(0.25 - 0.5 * z[h]).epsilon(1e-15));

    // near the synchronized fixed point of the LP figure parameters
    CHECK(drift_sup_norm(lp_fig(4), std::vector<double>(4, 0.664)) < 2e-3);

    CHECK_THROWS_AS(drift(ident, {0.1, 0.2}), std::invalid_argument);
}

TEST_CASE("drift vanishes at computed zeros to 1e-12") {
    for (const ModelParams& p : {lp_fig(3), logp_frag(3), tech_frag(3)})
        for (const auto& z : all_zeros(p))
            CHECK(drift_sup_norm(p, z.expand()) <= 1e-12);
}

TEST_CASE("sync residual: exact zeros and boundary signs") {
    // Tech with beta = 0 passes through 1/2
    ModelParams t(2, 0.2, 0.0, 0.5, ReinforcementFunction::tech(0.8));
    CHECK(std::abs(sync_residual(t, 0.5)) <= 1e-15);

    // LogP through x* when (1-a)(1-2x*) = b(1-2q)
    ModelParams lg(2, 0.1, 0.3, 0.2, ReinforcementFunction::logp(7.0, 0.4));
    CHECK(std::abs(sync_residual(lg, 0.4)) <= 1e-15);

    // the LP figure root
    CHECK(std::abs(sync_residual(lp_fig(2), 0.66435)) < 1e-4);

    // phi(0) >= 0 and phi(1) <= 0 for every valid parameter set
    SplitMix64 rng(8);
    auto fns = {ReinforcementFunction::lp(0.9, 1.0 / 3.0),
                ReinforcementFunction::logp(12.0, 0.47),
                ReinforcementFunction::tech(0.99)};
    for (const auto& f : fns)
        for (int i = 0; i < 50; ++i) {
            const double a = 0.98 * rng.uniform01();
            const double b = (1.0 - a) * 0.98 * rng.uniform01();
            const double q = 0.01 + 0.99 * rng.uniform01();
            ModelParams p(2, a, b, q, f);
            CHECK(sync_residual(p, 0.0) >= 0.0);
            CHECK(sync_residual(p, 1.0) <= 0.0);
        }
}

TEST_CASE("LP synchronization zeros: quadratic and bisection agree") {
    const auto zeros = sync_zeros(lp_fig(30));
    REQUIRE(zeros.size() == 1);
    CHECK(std::abs(zeros[0].groups[0].value - 0.664) <= 1e-2);
    CHECK(zeros[0].stability == Stability::StrictlyStable);

    const auto scanned = sync_zero_values_scan(lp_fig(30));
    REQUIRE(scanned.size() == 1);
    CHECK(std::abs(scanned[0] - zeros[0].groups[0].value) <= 1e-10);

    // beta = 0: {0, (1-theta x*)/theta}
    ModelParams free(4, 0.3, 0.0, 0.5, ReinforcementFunction::lp(0.9, 1.0 / 3.0));
    const auto zf = sync_zeros(free);
    REQUIRE(zf.size() == 2);
    CHECK(zf[0].groups[0].value == 0.0);
    CHECK(zf[1].groups[0].value == doctest::Approx(0.7 / 0.9).epsilon(1e-12));
    CHECK(is_unstable(zf[0].stability));
    CHECK(zf[1].stability == Stability::StrictlyStable);
    const auto sf = sync_zero_values_scan(free);
    REQUIRE(sf.size() == 2);
    CHECK(std::abs(sf[0] - 0.0) <= 1e-10);
    CHECK(std::abs(sf[1] - 0.7 / 0.9) <= 1e-10);
}

TEST_CASE("LogP synchronization zeros") {
    const auto unique = sync_zeros(logp_unique(15));
    REQUIRE(unique.size() == 1);
    CHECK(unique[0].groups[0].value == doctest::Approx(0.22011614241787014).epsilon(1e-9));
    CHECK(unique[0].stability == Stability::StrictlyStable);

    const auto frag = sync_zeros(logp_frag(30));
    REQUIRE(frag.size() == 3);
    CHECK(frag[0].groups[0].value == doctest::Approx(0.14685131191606263).epsilon(1e-9));
    CHECK(frag[1].groups[0].value == doctest::Approx(0.47333422279158960).epsilon(1e-9));
    CHECK(frag[2].groups[0].value == doctest::Approx(0.78515064225949840).epsilon(1e-9));
    CHECK(frag[0].stability == Stability::StrictlyStable);
    CHECK(is_unstable(frag[1].stability));
    CHECK(frag[2].stability == Stability::StrictlyStable);

    // steep symmetric case: outer zeros hug the boundary, the middle repels
    const auto sym = sync_zeros(logp_symmetric(4));
    REQUIRE(sym.size() == 3);
    CHECK(sym[0].groups[0].value > 0.0);
    CHECK(sym[0].groups[0].value < 0.01);
    CHECK(sym[1].groups[0].value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(is_unstable(sym[1].stability));
    CHECK(sym[2].groups[0].value > 0.99);
    CHECK(sym[2].groups[0].value < 1.0);
    // symmetric pair of stable zeros
    CHECK(sym[0].groups[0].value ==
          doctest::Approx(1.0 - sym[2].groups[0].value).epsilon(1e-9));
}

TEST_CASE("Tech single-unit threshold") {
    // below and at the critical slope: 1/2 is the unique (stable) zero
    for (double theta : {0.8, 0.83, 5.0 / 6.0}) {
        ModelParams p(1, 0.0, 0.0, 0.5, ReinforcementFunction::tech(theta));
        const auto zeros = sync_zeros(p);
        REQUIRE(count_stable(zeros) == 1);
        bool has_half = false;
        for (const auto& z : zeros)
            has_half = has_half ||
                       (!is_unstable(z.stability) &&
                        std::abs(z.groups[0].value - 0.5) <= 1e-6);
        CHECK(has_half);
    }
    // above it: two stable zeros, symmetric about 1/2, and 1/2 turns unstable
    ModelParams p9(1, 0.0, 0.0, 0.5, ReinforcementFunction::tech(0.9));
    const auto zeros = sync_zeros(p9);
    REQUIRE(zeros.size() == 3);
    CHECK(zeros[0].groups[0].value ==
          doctest::Approx((2.0 - std::sqrt(2.0)) / 4.0).epsilon(1e-9));
    CHECK(zeros[1].groups[0].value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(is_unstable(zeros[1].stability)); // f'(1/2) = 1.2 > 1
    CHECK(zeros[2].groups[0].value ==
          doctest::Approx((2.0 + std::sqrt(2.0)) / 4.0).epsilon(1e-9));
    CHECK(count_stable(zeros) == 2);
}

TEST_CASE("sync_zeros is never empty") {
    SplitMix64 rng(31);
    for (int i = 0; i < 40; ++i) {
        const double a = 0.98 * rng.uniform01();
        const double b = (1.0 - a) * 0.98 * rng.uniform01();
        const double q = 0.01 + 0.99 * rng.uniform01();
        const double theta = 0.55 + 0.4 * rng.uniform01();
        ModelParams p(3, a, b, q, ReinforcementFunction::tech(theta));
        CHECK(!sync_zeros(p).empty());
        ModelParams p2(3, a, b, q, ReinforcementFunction::logp(1.0 + 30.0 * rng.uniform01(),
                                                               0.05 + 0.9 * rng.uniform01()));
        CHECK(!sync_zeros(p2).empty());
    }
}

TEST_CASE("no-synchronization zeros: existence, symmetry, and gates") {
    // S1 (flat sigmoid): no two-group zeros
    CHECK(nosync_zeros(logp_unique(6)).empty());
    CHECK(diagnostics(logp_unique(6)).flags.s1);

    // S3 parameters: the admissible offset interval is empty
    ModelParams s3(5, 0.05, 0.15, 0.4, ReinforcementFunction::logp(20.0, 0.15));
    CHECK(diagnostics(s3).flags.s3);
    CHECK(nosync_zeros(s3).empty());

    // S2 parameters: the critical level never detaches from the edge slope
    ModelParams s2(5, 0.1, 0.2, 0.4, ReinforcementFunction::logp(30.0, 0.93));
    CHECK(diagnostics(s2).flags.s2);
    CHECK(nosync_zeros(s2).empty());

    // symmetric LogP: balanced split at {~0.2, ~0.8}
    const auto ns = nosync_zeros(logp_symmetric(4));
    const ZeroPoint* sym = find_near(ns, {0.2, 0.8}, 0.01);
    REQUIRE(sym != nullptr);
    CHECK(sym->groups[0].value == doctest::Approx(0.200074201718373).epsilon(1e-9));
    CHECK(sym->groups[0].count == 2);
    CHECK(sym->groups[1].value ==
          doctest::Approx(1.0 - sym->groups[0].value).epsilon(1e-10));
    CHECK(!is_unstable(sym->stability));
    // the balanced-split identity (1-a-b) f(z1) - z1 = -(a+b)/2
    const ModelParams& ps = logp_symmetric(4);
    const double z1 = sym->groups[0].value;
    CHECK(std::abs(ps.weight() * ps.f.eval(z1) - z1 + 0.5 * (ps.alpha + ps.beta)) <= 1e-12);

    // symmetric Tech split
    const auto tns = nosync_zeros(tech_frag(4));
    const ZeroPoint* tsym = find_near(tns, {0.104, 0.896}, 0.005);
    REQUIRE(tsym != nullptr);
    CHECK(tsym->groups[0].value == doctest::Approx(0.10409667851604058).epsilon(1e-9));
    CHECK(tsym->groups[1].value == doctest::Approx(0.89590332148395940).epsilon(1e-9));
    CHECK(tsym->groups[0].count == 2);
    CHECK(tsym->stability == Stability::StrictlyStable);

    // single unit: no fragmentation possible
    CHECK(nosync_zeros(logp_symmetric(1)).empty());
}

TEST_CASE("LP admits no two-group zeros") {
    for (int n : {2, 4, 6}) {
        CHECK(nosync_zeros(lp_fig(n)).empty());
        ModelParams free(n, 0.3, 0.0, 0.5, ReinforcementFunction::lp(0.9, 1.0 / 3.0));
        CHECK(nosync_zeros(free).empty());
        ModelParams other(n, 0.05, 0.15, 0.3, ReinforcementFunction::lp(2.0, 0.5));
        CHECK(nosync_zeros(other).empty());
        CHECK(all_zeros(lp_fig(n)).size() == sync_zeros(lp_fig(n)).size());
    }
}

TEST_CASE("all_zeros: fragmentation landscape for the steep LogP case") {
    const auto zeros = all_zeros(logp_frag(2));
    CHECK(find_near(zeros, {0.14685131191606263}, 1e-6) != nullptr);
    CHECK(find_near(zeros, {0.78515064225949840}, 1e-6) != nullptr);
    const ZeroPoint* pair = find_near(zeros, {0.185713, 0.745274}, 1e-4);
    REQUIRE(pair != nullptr);
    CHECK(pair->stability == Stability::StrictlyStable);
    CHECK(pair->kind == ZeroKind::NoSynchronization);

    for (const auto& z : zeros) {
        CHECK(z.residual <= 1e-9);
        CHECK((z.kind == ZeroKind::Synchronization) == (z.groups.size() == 1));
        CHECK(static_cast<int>(z.spectrum.size()) == 2);
    }
}

TEST_CASE("permutation closure: shuffled zeros still annihilate the drift") {
    ModelParams p = tech_frag(4);
    SplitMix64 rng(17);
    for (const auto& zp : all_zeros(p)) {
        std::vector<double> z = zp.expand();
        for (int k = 0; k < 10; ++k) {
            for (int i = 3; i > 0; --i)
                std::swap(z[i], z[static_cast<int>(rng.uniform01() * (i + 1))]);
            CHECK(drift_sup_norm(p, z) <= 1e-9);
        }
    }
}

TEST_CASE("middle-branch candidates are enumerated on request and unstable") {
    const auto base = nosync_zeros(logp_frag(3), false);
    const auto with_middle = nosync_zeros(logp_frag(3), true);
    CHECK(with_middle.size() > base.size());
    for (const auto& z : with_middle) {
        bool in_base = false;
        for (const auto& b : base) {
            if (b.groups.size() != z.groups.size()) continue;
            bool same = true;
            for (std::size_t i = 0; i < b.groups.size(); ++i)
                same = same && std::abs(b.groups[i].value - z.groups[i].value) <= 1e-9 &&
                       b.groups[i].count == z.groups[i].count;
            in_base = in_base || same;
        }
        if (!in_base) CHECK(is_unstable(z.stability)); // every extra point repels
        CHECK(z.residual <= 1e-9);
    }
}

TEST_CASE("oracle agrees with the structured enumeration") {
    for (const ModelParams& p : {logp_frag(3), tech_frag(3), lp_fig(3)}) {
        const auto structured = all_zeros(p, true);
        const auto oracle = oracle_zeros(p, 3000);
        for (const auto& oz : oracle) {
            const std::vector<double> ov = oz.expand();
            double best = 1e9;
            for (const auto& sz : structured) {
                const std::vector<double> sv = sz.expand();
                double diff = 0.0;
                for (std::size_t i = 0; i < ov.size(); ++i)
                    diff = std::max(diff, std::abs(ov[i] - sv[i]));
                best = std::min(best, diff);
            }
            CHECK(best <= 1e-6);
        }
        CHECK(oracle.size() == structured.size()); // none missing either
    }
    // the self-checking variant accepts these parameter sets
    CHECK(all_zeros_verified(logp_frag(2), true, 2000).size() ==
          all_zeros(logp_frag(2), true).size());
}

TEST_CASE("restriction bounds on the group split") {
    // f'(0) = f'(1) = 0 for Tech, so the interval is (-0.6, 1)
    ModelParams p(4, 0.4, 0.0, 0.5, ReinforcementFunction::tech(0.9));
    const auto [lo, hi] = restriction_bounds(p, 0.0, 1.0);
    CHECK(lo == doctest::Approx(-0.6).epsilon(1e-15));
    CHECK(hi == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(restriction_bounds(p, 0.9, 0.1), std::invalid_argument);

    // stable symmetric Tech split satisfies the two-sided bound
    ModelParams pt = tech_frag(4);
    const auto ns = nosync_zeros(pt);
    const ZeroPoint* sym = find_near(ns, {0.104, 0.896}, 0.005);
    REQUIRE(sym != nullptr);
    const auto [blo, bhi] = restriction_bounds(pt, sym->groups[0].value, sym->groups[1].value);
    const double ratio = pt.alpha * sym->groups[0].count / pt.n_agents;
    CHECK(blo < ratio);
    CHECK(ratio < bhi);

    // steep slopes on both branches exclude stable splits entirely
    ModelParams steep(4, 0.1, 0.3, 0.4, ReinforcementFunction::logp(8.0, 0.5));
    const auto level = steep.f.deriv_level_points(1.6);
    REQUIRE(level.size() == 2);
    // here (1-a-b)[f'(z1)+f'(z3)] = 1.92 >= 1 + (1-a) = 1.9
    const auto [xlo, xhi] = restriction_bounds(steep, level[0], level[1]);
    CHECK(xlo >= xhi);
}

TEST_CASE("unstable zeros are excluded from the predicted support") {
    // interior sigmoid: the repelling middle zero disappears
    const auto support = exclude_unstable(tech_frag(4), all_zeros(tech_frag(4)));
    for (const auto& z : support) CHECK(!is_unstable(z.stability));
    CHECK(find_near(support, {0.5}, 1e-9) == nullptr);

    // logp always has f(0) > 0 and f(1) < 1, so exclusion always applies
    const auto lsupport = exclude_unstable(logp_symmetric(3), all_zeros(logp_symmetric(3)));
    CHECK(find_near(lsupport, {0.5}, 1e-9) == nullptr);
    for (const auto& z : lsupport) {
        CHECK(!is_unstable(z.stability));
        CHECK(!z.excluded_given_nonzero_start);
    }

    // LP with beta = 0: the origin stays but is flagged
    ModelParams free(3, 0.3, 0.0, 0.5, ReinforcementFunction::lp(0.9, 1.0 / 3.0));
    const auto kept = exclude_unstable(free, all_zeros(free));
    REQUIRE(kept.size() == 2);
    CHECK(kept[0].groups[0].value == 0.0);
    CHECK(kept[0].excluded_given_nonzero_start);
    CHECK(kept[1].excluded_given_nonzero_start == false);
    CHECK(kept[1].groups[0].value == doctest::Approx(0.7 / 0.9).epsilon(1e-9));
}

TEST_CASE("diagnostics flags and degeneracies") {
    CHECK(diagnostics(logp_unique(2)).flags.s1); // theta/4 = 1.25 < 1/0.6
    CHECK(diagnostics(logp_unique(2)).flags.u1); // also below (1-a)/(1-a-b) = 1.5
    CHECK_FALSE(diagnostics(logp_frag(2)).flags.s1);

    CHECK(diagnostics(tech_frag(2)).half_is_zero); // beta = 0
    ModelParams q12(2, 0.1, 0.3, 0.5, ReinforcementFunction::tech(0.9));
    CHECK(diagnostics(q12).half_is_zero); // q = 1/2
    CHECK_FALSE(diagnostics(lp_fig(2)).half_is_zero);

    // tangency of max f' with the critical level: flagged, no fragmentation
    ModelParams tangent(4, 0.2, 0.0, 0.5,
                        ReinforcementFunction::tech(0.9166666666666667));
    CHECK(diagnostics(tangent).degenerate);
    CHECK(nosync_zeros(tangent).empty());

    const auto ca = critical_abscissas(tech_frag(2));
    REQUIRE(ca.xstar12.size() == 2);
    CHECK(ca.xstar12[0] == doctest::Approx(0.2714251107681691).epsilon(1e-12));
    CHECK(ca.xstar12[1] == doctest::Approx(0.7285748892318309).epsilon(1e-12));
}

TEST_CASE("basin assignment uses the permutation-invariant distance") {
    ModelParams p = tech_frag(4);
    const auto zeros = all_zeros(p);
    const ZeroPoint* sym = find_near(zeros, {0.104, 0.896}, 0.005);
    REQUIRE(sym != nullptr);

    ReplicationReport rep;
    rep.terminal = make_state({0.90, 0.11, 0.889, 0.10}); // shuffled, slightly off
    assign_nearest(rep, zeros, 0.1);
    REQUIRE(rep.assigned_zero.has_value());
    CHECK(&zeros[*rep.assigned_zero] == sym);
    CHECK(rep.distance_to_zero < 0.02);

    ReplicationReport far;
    far.terminal = make_state({0.4, 0.45, 0.55, 0.6});
    assign_nearest(far, zeros, 0.1);
    CHECK(!far.assigned_zero.has_value());
    CHECK(far.distance_to_zero > 0.1);

    CHECK(sorted_distance({0.896, 0.104, 0.104, 0.896}, *sym) ==
          doctest::Approx(sorted_distance({0.104, 0.104, 0.896, 0.896}, *sym))
              .epsilon(1e-15));
}
