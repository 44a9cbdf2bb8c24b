#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "onsetqlab/adversary.hpp"
#include "onsetqlab/measures.hpp"

using namespace oql;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("hamming slice at n=4 k=1 reproduces the closed-form ratios") {
    auto f = threshold_padded_function(4, 5);
    auto rel = hamming_slice_relation(4, 1, f);

    CHECK(rel.side(Side::A).size() == 6);
    CHECK(rel.side(Side::B).size() == 4);
    CHECK(rel.weights().size() == 12);
    for (const auto& [ai, bj, w] : rel.weights()) CHECK(w == 1.0);

    for (const auto& a : rel.side(Side::A))
        for (int i = 0; i < 4; ++i)
            if (a.bit(i)) CHECK_THAT(rel.theta(Side::A, a, i), WithinAbs(0.5, 1e-12));
    for (const auto& b : rel.side(Side::B))
        for (int i = 0; i < 4; ++i)
            if (!b.bit(i)) CHECK_THAT(rel.theta(Side::B, b, i), WithinAbs(1.0 / 3, 1e-12));

    CHECK_THAT(v_geom(rel), WithinRel(std::sqrt(1.0 / 6), 1e-12));
    CHECK_THAT(1.0 / v_geom(rel), WithinRel(std::sqrt(6.0), 1e-12));
    CHECK_THAT(v_min(rel), WithinRel(1.0 / 3, 1e-12));
}

TEST_CASE("degenerate slices") {
    auto f = threshold_padded_function(3, 1);
    auto star = hamming_slice_relation(3, 0, f);
    CHECK(star.side(Side::A).size() == 3);
    CHECK(star.side(Side::B).size() == 1);
    CHECK(star.weights().size() == 3);
    CHECK_THAT(v_geom(star), WithinRel(std::sqrt(1.0 / 3), 1e-12));

    auto single = AdversaryRelation(
        BooleanFunction::from_onset(3, {BitString::parse("111")}),
        {BitString::parse("000")}, {BitString::parse("111")}, {{0, 0, 1.0}});
    CHECK_THAT(v_geom(single), WithinAbs(1.0, 1e-12));
    CHECK_THAT(v_min(single), WithinAbs(1.0, 1e-12));
    CHECK_THAT(single.theta(Side::A, BitString::parse("000"), 2), WithinAbs(1.0, 1e-12));
}

TEST_CASE("slice ratios match closed forms for every k below n up to 12") {
    for (int n = 2; n <= 12; n += 2) {
        for (int k = 0; k < n; ++k) {
            std::uint64_t m = static_cast<std::uint64_t>(binom_partial_sum(n, k));
            auto f = threshold_padded_function(n, m);
            REQUIRE(threshold_index(n, m) == k);
            auto rel = hamming_slice_relation(n, k, f);
            double ta = 1.0 / (k + 1);
            double tb = 1.0 / (n - k);
            for (std::size_t e = 0; e < rel.side(Side::A).size(); ++e)
                for (int i = 0; i < n; ++i)
                    if (rel.side(Side::A)[e].bit(i))
                        CHECK_THAT(rel.theta_by_index(Side::A, e, i), WithinAbs(ta, 1e-12));
            CHECK_THAT(v_geom(rel), WithinRel(std::sqrt(ta * tb), 1e-12));
            CHECK_THAT(v_min(rel), WithinRel(std::min(ta, tb), 1e-12));
            CHECK_THAT(1.0 / v_geom(rel), WithinRel(std::sqrt(static_cast<double>(k + 1) * (n - k)), 1e-12));
        }
    }
}

TEST_CASE("ratios are scale invariant and pointwise ordered") {
    auto f = threshold_padded_function(6, 22);
    int k = threshold_index(6, 22);
    auto rel = hamming_slice_relation(6, k, f);

    std::vector<std::tuple<std::size_t, std::size_t, double>> scaled;
    for (auto [ai, bj, w] : rel.weights()) scaled.emplace_back(ai, bj, 3.5 * w);
    auto rel2 = AdversaryRelation(f, rel.side(Side::A), rel.side(Side::B), scaled);

    CHECK_THAT(v_geom(rel2), WithinRel(v_geom(rel), 1e-12));
    CHECK_THAT(v_min(rel2), WithinRel(v_min(rel), 1e-12));

    // pointwise: min of the two ratios never exceeds their geometric mean
    for (const auto& [ai, bj, w] : rel.weights()) {
        if (w <= 0) continue;
        for (int i = 0; i < 6; ++i) {
            if (rel.side(Side::A)[ai].bit(i) == rel.side(Side::B)[bj].bit(i)) continue;
            double ta = rel.theta_by_index(Side::A, ai, i);
            double tb = rel.theta_by_index(Side::B, bj, i);
            CHECK(std::min(ta, tb) <= std::sqrt(ta * tb) + 1e-12);
        }
    }
}

TEST_CASE("construction rejects inconsistent inputs") {
    auto f = threshold_padded_function(4, 5);
    CHECK_THROWS(hamming_slice_relation(4, 2, f));
    CHECK_THROWS(AdversaryRelation(f, {BitString::parse("0000")}, {BitString::parse("0001")}, {{0, 0, 1.0}}));
    CHECK_THROWS(AdversaryRelation(f, {BitString::parse("0011")}, {BitString::parse("0001")}, {{0, 0, -2.0}}));
    auto rel = AdversaryRelation(f, {BitString::parse("0011")}, {BitString::parse("0001")}, {{0, 0, 0.0}});
    CHECK_THROWS(v_geom(rel));
    CHECK_THROWS(rel.theta(Side::A, BitString::parse("0011"), 0));
    CHECK_THROWS(rel.theta(Side::A, BitString::parse("0001"), 0));
}
