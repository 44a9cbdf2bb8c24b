#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "onsetqlab/measures.hpp"

using namespace oql;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

BooleanFunction or_n(int n) {
    std::vector<BitString> on;
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << n); ++i) on.emplace_back(n, i);
    return BooleanFunction::from_onset(n, on);
}

BooleanFunction parity3() {
    std::vector<BitString> on;
    for (std::uint64_t i = 0; i < 8; ++i)
        if (std::popcount(i) % 2 == 1) on.emplace_back(3, i);
    return BooleanFunction::from_onset(3, on);
}

} // namespace

TEST_CASE("pointwise and global sensitivity") {
    auto and2 = BooleanFunction::from_onset(2, {BitString::parse("11")});
    CHECK(sensitivity_at(or_n(3), BitString::parse("000")) == 3);
    CHECK(sensitivity_at(and2, BitString::parse("11")) == 2);
    CHECK(sensitivity_at(subcube_function(3, 2), BitString::parse("000")) == 2);

    CHECK(sensitivity(parity3()) == 3);
    CHECK(sensitivity(or_n(3)) == 3);
    CHECK(sensitivity(subcube_function(3, 2)) == 2);
}

TEST_CASE("edge boundary counts one-endpoint edges") {
    auto f1 = BooleanFunction::from_onset(3, {BitString::parse("000"), BitString::parse("001")});
    CHECK(edge_boundary(f1) == 4);
    CHECK(edge_boundary(BooleanFunction::from_onset(2, {BitString::parse("11")})) == 2);
    CHECK(edge_boundary(subcube_function(3, 4)) == 4);

    // boundary equals the on-set sum of pointwise sensitivities
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        auto f = sample_uniform_fnm(6, 20, 900 + seed);
        std::uint64_t total = 0;
        for (const auto& x : f.onset()) total += sensitivity_at(f, x);
        CHECK(edge_boundary(f) == total);
    }
}

TEST_CASE("isoperimetric floor values") {
    CHECK_THAT(isoperimetric_bound(3, 2), WithinAbs(4.0, 1e-12));
    CHECK_THAT(isoperimetric_bound(3, 4), WithinAbs(4.0, 1e-12));
    CHECK_THAT(isoperimetric_bound(5, 32), WithinAbs(0.0, 1e-12));
}

TEST_CASE("sensitivity chain holds exhaustively at n=3 and by sampling at n=10") {
    for (std::uint64_t m = 1; m <= 8; ++m) {
        FnmEnumerator e(3, m);
        while (auto f = e.next()) {
            double gamma = static_cast<double>(edge_boundary(*f));
            double md = static_cast<double>(m);
            CHECK(sensitivity(*f) >= gamma / md - 1e-9);
            CHECK(gamma >= isoperimetric_bound(3, m) - 1e-9);
            CHECK(sensitivity(*f) >= 3 - std::log2(md) - 1e-9);
        }
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto f = sample_uniform_fnm(10, 64, 7000 + seed);
        CHECK(edge_boundary(f) >= isoperimetric_bound(10, 64) - 1e-9);
        CHECK(sensitivity(f) >= 10 - 6);
    }
}

TEST_CASE("growth exponent values and properties") {
    CHECK_THAT(d_of_z(16.0, 16), WithinRel(0.29047010790179745, 1e-12));
    CHECK_THAT(d_of_z(65536.0, 16), WithinRel(2.772588722239782, 1e-12));
    CHECK(d_of_z(4.0, 16) <= d_of_z(16.0, 16));

    // monotone non-decreasing in z, and (en/d)^d stays at or below z
    for (int n : {8, 16, 32, 64}) {
        double prev = 0.0;
        for (double z = 1.5; z <= std::exp2(n); z *= 2.7) {
            double d = d_of_z(z, n);
            CHECK(d >= prev - 1e-12);
            prev = d;
            double lhs = d * std::log2(std::exp(1.0) * n / d);
            CHECK(lhs <= std::log2(z) + 1e-9);
        }
    }
    CHECK_THROWS(d_of_z(1.0, 8));
    CHECK_THROWS(d_of_z(0.5, 8));
    CHECK_THROWS(d_of_z(512.0, 8));
}

TEST_CASE("partial binomial sums are exact") {
    CHECK(binom_partial_sum(4, 1) == 5);
    CHECK(binom_partial_sum(4, 2) == 11);
    CHECK(binom_partial_sum(20, 20) == BigInt(1) << 20);
    CHECK(binom_partial_sum(64, 64) == BigInt(1) << 64);
    CHECK(binom_exact(52, 5) == 2598960);
}

namespace {

// Number of 2-variable functions expressible as the strict sign of an affine
// form; searched over an integer coefficient grid wide enough for n=2.
int sign_degree_le1_count() {
    int hits = 0;
    for (unsigned table = 0; table < 16; ++table) {
        bool found = false;
        for (int a = -4; a <= 4 && !found; ++a)
            for (int b = -4; b <= 4 && !found; ++b)
                for (int c = -4; c <= 4 && !found; ++c) {
                    bool ok = true;
                    for (int x1 = 0; x1 < 2 && ok; ++x1)
                        for (int x2 = 0; x2 < 2 && ok; ++x2) {
                            int p = a + b * x1 + c * x2;
                            bool want = (table >> (2 * x1 + x2)) & 1u;
                            ok = (p != 0) && ((p > 0) == want);
                        }
                    found = ok;
                }
        if (found) ++hits;
    }
    return hits;
}

} // namespace

TEST_CASE("sign pattern count matches the brute-force low-degree census") {
    CHECK(sign_degree_le1_count() == 14);
    CHECK_THAT(sign_count_T(2, 1.0), WithinRel(std::log2(14.0), 1e-12));
    CHECK_THAT(sign_count_T(2, 1.9), WithinRel(std::log2(14.0), 1e-12));
    CHECK_THAT(sign_count_T(5, 0.0), WithinAbs(1.0, 1e-12));
    CHECK_THAT(sign_count_T(2, 5.0), WithinAbs(4.0, 1e-12));
    CHECK_THAT(sign_count_T(16, 1.0), WithinRel(212.74721774896784, 1e-9));
    CHECK_THAT(sign_count_T(24, 1.0), WithinRel(497.9623188472854, 1e-9));
}

TEST_CASE("counting floor uses the growth exponent only above the small-m regime") {
    CHECK_THAT(counting_lower_bound(16, 16.0), WithinAbs(4.0, 1e-12));
    CHECK_THAT(counting_lower_bound(64, std::exp2(32)), WithinAbs(8.0, 1e-12));
    double prev = 0.0;
    for (int e = 2; e <= 60; e += 2) {
        double v = counting_lower_bound(64, std::exp2(e));
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("graph family calculators match the pinned values") {
    CHECK_THAT(genus_family_log_size(10, 0), WithinRel(164.09640474436813, 1e-12));
    CHECK_THAT(isomorphism_family_log_size(10), WithinRel(21.791061114716953, 1e-12));
    CHECK_THAT(graph_property_query_bound(10, genus_family_log_size(10, 0)), WithinRel(112.03542828616615, 1e-9));
    CHECK_THAT(graph_property_query_bound(10, isomorphism_family_log_size(10)), WithinRel(32.03281651484998, 1e-9));
    CHECK_THAT(graph_property_query_bound(10, 0.0), WithinAbs(10.0, 1e-12));
}

TEST_CASE("derived bound parameters at the pinned problem sizes") {
    auto p = BoundParams::for_problem(16, 256);
    CHECK_THAT(p.z, WithinRel(7.086505190311419, 1e-12));
    CHECK_THAT(p.d_z, WithinRel(0.17905574118008372, 1e-12));
    CHECK(p.d_ceil == 1);
    CHECK(p.big_d == 17);
    CHECK_THAT(p.log2_t, WithinRel(212.74721774896784, 1e-9));
    CHECK(p.log2_t <= 16.0 * 17 - 16);

    auto q = BoundParams::for_problem(24, 4096);
    CHECK(q.big_d == 25);
    CHECK_THAT(q.log2_t, WithinRel(497.9623188472854, 1e-9));
    CHECK(q.log2_t <= 24.0 * 25 - 24);

    auto r = BoundParams::for_problem(12, 16);
    CHECK_THAT(r.beta_prime, WithinRel(2.018438361073413, 1e-12));
    CHECK(r.beta_out_of_range);
    CHECK_THAT(r.beta_effective, WithinAbs(0.5, 1e-15));

    auto s = BoundParams::for_problem(16, 16);
    CHECK_THAT(s.beta_prime, WithinRel(1.7213475204444817, 1e-12));

    auto t = BoundParams::for_problem(16, 64);
    CHECK(t.copies_cap == 10);
    CHECK(t.overlap_bound_vacuous);
    CHECK_THAT(t.overlap_bound_sq, WithinAbs(1.5, 1e-12));

    auto u = BoundParams::for_problem(16, 32);
    CHECK_THAT(u.gamma_prime, WithinRel(0.009479424707068796, 1e-12));
}

TEST_CASE("three-case query scales") {
    CHECK_THAT(worst_case_query_bound(16, 256), WithinRel(9.36761963992219, 1e-12));
    CHECK_THAT(average_case_query_bound(16, 256), WithinRel(5.800708787429901, 1e-12));
    CHECK_THAT(best_case_query_bound(16, 256), WithinRel(2.8284271247461903, 1e-12));
    CHECK_THAT(worst_case_query_bound(64, 256), WithinRel(16.9145862877322, 1e-12));
    CHECK_THAT(average_case_query_bound(64, 256), WithinRel(9.241716385647234, 1e-12));

    // m = 1 collapses every case to the bare search term
    CHECK(worst_case_query_bound(16, 1) == 4.0);
    CHECK(average_case_query_bound(16, 1) == 4.0);
    CHECK_THAT(best_case_query_bound(16, 32768), WithinRel(1.0, 1e-12));

    // the worst-case scale dominates the average-case one at equal size
    for (int n : {8, 12, 16, 24}) {
        for (std::uint64_t m = 2; m <= (std::uint64_t{1} << (n - 1)); m *= 4) {
            CHECK(worst_case_query_bound(n, m) >= average_case_query_bound(n, m));
            CHECK(best_case_query_bound(n, m) <= worst_case_query_bound(n, m));
        }
    }

    CHECK_THROWS_AS(worst_case_query_bound(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(best_case_query_bound(4, 32), std::invalid_argument);
}
