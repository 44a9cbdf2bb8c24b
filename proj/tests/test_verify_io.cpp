#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "onsetqlab/algorithms.hpp"
#include "onsetqlab/io.hpp"
#include "onsetqlab/parallel.hpp"
#include "onsetqlab/verify.hpp"

using namespace oql;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("distance mark formula") {
    CHECK_THAT(default_distance_eps(), WithinAbs(0.8853900817779268, 1e-15));
    CHECK(default_distance_eps() > 0.88);

    CHECK_THAT(min_distance_r_star(64, 256, 0.88), WithinRel(9.393727567702886, 1e-13));
    CHECK_THAT(min_distance_r_star(8, 4, 0.88), WithinRel(0.0037378664430507413, 1e-10));
    CHECK(min_distance_r_star(24, 64, default_distance_eps()) == 0.0);
    CHECK(min_distance_r_star(6, 4, 0.88) < 0.0);
    CHECK(min_distance_r_star(16, 1, 0.88) == 8.0);

    CHECK_THROWS_AS(min_distance_r_star(0, 4, 0.88), std::invalid_argument);
    CHECK_THROWS_AS(min_distance_r_star(8, 0, 0.88), std::invalid_argument);
    CHECK_THROWS_AS(min_distance_r_star(8, 4, 0.0), std::invalid_argument);
}

TEST_CASE("min-distance check at the wide point") {
    auto r = check_min_distance(64, 256, 0.88, 2000, 7);
    CHECK(r.claim == "min-distance");
    CHECK(r.n == 64);
    CHECK(r.m == 256);
    CHECK(r.trials == 2000);
    CHECK(r.seed == 7);
    CHECK_THAT(r.r_star, WithinRel(9.393727567702886, 1e-13));
    CHECK_THAT(r.bound, WithinRel(0.015197733553316961, 1e-14));
    CHECK(r.details.at("vacuous") == 0.0);
    CHECK(r.passed);
    CHECK_THAT(r.empirical_rate,
               WithinAbs(static_cast<double>(r.violation_count) / 2000.0, 1e-15));

    // same seed, same verdict, regardless of how trials were scheduled
    auto again = check_min_distance(64, 256, 0.88, 2000, 7);
    CHECK(again.violation_count == r.violation_count);
}

TEST_CASE("min-distance check at the zero-mark point") {
    auto r = check_min_distance(24, 64, default_distance_eps(), 500, 3);
    CHECK(r.r_star == 0.0);
    CHECK(r.details.at("vacuous") == 1.0);
    CHECK(r.violation_count == 0);
    CHECK(r.passed);
    CHECK_THAT(r.bound, WithinRel(0.0503333875984647, 1e-13));
}

TEST_CASE("min-distance check with a single-element on-set") {
    auto r = check_min_distance(16, 1, 0.88, 100, 5);
    CHECK(r.violation_count == 0);
    CHECK(r.passed);
    CHECK(r.bound == 2.0);
}

TEST_CASE("min-distance check rejects out-of-regime parameters") {
    CHECK_THROWS_AS(check_min_distance(6, 4, 0.88, 100, 1), std::domain_error);
    CHECK_THROWS_AS(check_min_distance(6, 4, 0.88, 0, 1), std::invalid_argument);
    CHECK_THROWS_AS(check_min_distance(0, 4, 0.88, 100, 1), std::invalid_argument);
    CHECK_THROWS_AS(check_min_distance(65, 4, 0.88, 100, 1), std::invalid_argument);
}

TEST_CASE("pairwise distance and agreement-gap scans") {
    CHECK(detail::min_pairwise_distance({0b0000, 0b0011, 0b1111}) == 2);
    CHECK(detail::min_pairwise_distance({0b0000, 0b1111}) == 4);

    // a pair at distance n/2 has zero signed agreement gap
    CHECK(detail::max_pairwise_agreement_gap(4, {0b0000, 0b0011}) == 0);
    CHECK(detail::max_pairwise_agreement_gap(4, {0b0000, 0b1111}) == 4);
    CHECK(detail::max_pairwise_agreement_gap(4, {0b0000, 0b0011, 0b1111}) == 4);
    CHECK(detail::max_pairwise_agreement_gap(6, {0b000000, 0b000001}) == 4);
}

TEST_CASE("overlap check against the orthogonality cap") {
    auto r = check_overlap_bound(32, 64, 2000, 11);
    CHECK(r.claim == "overlap");
    CHECK_THAT(r.details.at("overlap_cap"), WithinRel(0.8660254037844386, 1e-15));
    CHECK(r.details.at("vacuous") == 0.0);
    CHECK_THAT(r.bound, WithinRel(0.05147443857922332, 1e-14));
    CHECK(r.passed);

    auto again = check_overlap_bound(32, 64, 2000, 11);
    CHECK(again.violation_count == r.violation_count);
}

TEST_CASE("overlap check reports a vacuous cap") {
    auto r = check_overlap_bound(16, 64, 200, 1);
    CHECK_THAT(r.details.at("overlap_cap"), WithinRel(1.224744871391589, 1e-15));
    CHECK(r.details.at("vacuous") == 1.0);
    CHECK(r.violation_count == 0);
    CHECK(r.passed);
}

TEST_CASE("growth-exponent property grid") {
    auto r = check_d_property({8, 16, 24, 32, 48, 64}, 64);
    CHECK(r.claim == "d-property");
    CHECK(r.trials == 6 * 64);
    CHECK(r.violation_count == 0);
    CHECK(r.bound == 0.0);
    CHECK(r.passed);

    CHECK_THROWS_AS(check_d_property({}, 64), std::invalid_argument);
    CHECK_THROWS_AS(check_d_property({16}, 1), std::invalid_argument);
    CHECK_THROWS_AS(check_d_property({1}, 8), std::invalid_argument);
}

TEST_CASE("counting chain at the pinned points") {
    auto r = check_counting_chain(16, 256);
    CHECK(r.violation_count == 0);
    CHECK(r.passed);
    CHECK(r.details.at("d_ceil") == 1.0);
    CHECK_THAT(r.details.at("d_value"), WithinRel(0.17905574118008372, 1e-12));
    CHECK(r.details.at("nd") == 272.0);
    CHECK(r.details.at("nd_minus_n") == 256.0);
    CHECK(r.details.at("m_prime") == 2048.0);
    CHECK_THAT(r.details.at("log2_count"), WithinRel(212.74721774896784, 1e-12));
    CHECK(r.details.at("in_regime") == 1.0);

    auto r2 = check_counting_chain(24, 4096);
    CHECK(r2.violation_count == 0);
    CHECK(r2.details.at("nd") == 600.0);
    CHECK(r2.details.at("nd_minus_n") == 576.0);
    CHECK(r2.details.at("m_prime") == 49152.0);
    CHECK_THAT(r2.details.at("log2_count"), WithinRel(497.9623188472854, 1e-12));
    CHECK(r2.details.at("in_regime") == 1.0);
}

TEST_CASE("counting chain reports small-scale failures") {
    auto r = check_counting_chain(8, 16);
    CHECK(r.violation_count == 1);
    CHECK_FALSE(r.passed);
    CHECK(r.details.at("nd_minus_n") == 0.0);
    CHECK(r.details.at("log2_count") == 1.0);
    CHECK(r.details.at("in_regime") == 1.0);
}

TEST_CASE("counting chain scan finds the turnover") {
    CHECK(counting_chain_smallest_n(0.5, 4, 16) == 9);
    CHECK(counting_chain_smallest_n(0.5, 10, 16) == 10);
    CHECK(counting_chain_smallest_n(0.5, 4, 8) == -1);

    CHECK_THROWS_AS(counting_chain_smallest_n(0.0, 4, 16), std::invalid_argument);
    CHECK_THROWS_AS(counting_chain_smallest_n(1.0, 4, 16), std::invalid_argument);
    CHECK_THROWS_AS(counting_chain_smallest_n(0.5, 16, 4), std::invalid_argument);
}

TEST_CASE("sensitivity chain exhaustive tier") {
    auto r = check_sensitivity_chain(4, 0, 1);
    CHECK(r.claim == "sensitivity-chain");
    CHECK(r.details.at("exhaustive_functions") == 65808.0);
    CHECK(r.details.at("sampled_functions") == 0.0);
    CHECK(r.trials == 65808);
    CHECK(r.violation_count == 0);
    CHECK(r.passed);
}

TEST_CASE("sensitivity chain sampled tier") {
    auto r = check_sensitivity_chain(6, 50, 17);
    CHECK(r.details.at("exhaustive_functions") == 65808.0);
    CHECK(r.details.at("sampled_functions") == 900.0);
    CHECK(r.trials == 65808 + 900);
    CHECK(r.violation_count == 0);
    CHECK(r.passed);

    CHECK_THROWS_AS(check_sensitivity_chain(0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(check_sensitivity_chain(13, 10, 1), std::invalid_argument);
}

TEST_CASE("prefix-cube boundaries sit on the isoperimetric floor") {
    CHECK(static_cast<double>(edge_boundary(subcube_function(6, 8))) == isoperimetric_bound(6, 8));
    CHECK(static_cast<double>(edge_boundary(subcube_function(6, 4))) == isoperimetric_bound(6, 4));
    CHECK(static_cast<double>(edge_boundary(subcube_function(5, 16))) == isoperimetric_bound(5, 16));
    CHECK(static_cast<double>(edge_boundary(subcube_function(5, 1))) == isoperimetric_bound(5, 1));
}

TEST_CASE("three-sigma margin edge cases") {
    CHECK(three_sigma_margin(0.0, 100) == 0.0);
    CHECK(three_sigma_margin(0.5, 0) == 0.0);
    CHECK_THAT(three_sigma_margin(0.5, 900), WithinRel(3.0 * 0.5 / 30.0, 1e-12));
}

TEST_CASE("parallel partition covers each index exactly once") {
    for (int workers : {1, 3, 7, 16}) {
        std::vector<int> hits(1000, 0);
        parallel_for(1000, [&](std::uint64_t i) { ++hits[i]; }, workers);
        CHECK(std::count(hits.begin(), hits.end(), 1) == 1000);
    }
    std::vector<int> small(3, 0);
    parallel_for(3, [&](std::uint64_t i) { ++small[i]; }, 16);
    CHECK(std::count(small.begin(), small.end(), 1) == 3);
    CHECK(thread_budget() >= 1);
}

TEST_CASE("stable decimal forms") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(0.25) == "0.25");
    CHECK(format_double(9.393727567702886) == "9.393727567702886");
    CHECK(format_double(0.015197733553316961) == "0.015197733553316961");
    CHECK(format_double(0.0) == "0");

    for (double v : {1.0 / 3.0, 0.1, 1e-300, 6.02214076e23, -2.5, 272.0}) {
        std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("trial reports serialize without timing") {
    auto r = check_counting_chain(16, 256);
    Json j = trial_report_json(r);
    CHECK(j.at("schema") == kSchemaVersion);
    CHECK(j.at("kind") == "trial_report");
    CHECK(j.at("claim") == "counting-chain");
    CHECK(j.at("n") == 16);
    CHECK(j.at("m") == 256);
    CHECK(j.at("trials") == 2);
    CHECK(j.at("violation_count") == 0);
    CHECK(j.at("passed") == true);
    CHECK(j.at("details").at("nd") == 272.0);
    CHECK_FALSE(j.contains("wall_time_s"));
    CHECK(j.dump().find("wall") == std::string::npos);

    // recomputing the report yields the same bytes
    CHECK(trial_report_json(check_counting_chain(16, 256)).dump() == j.dump());
}

TEST_CASE("run records serialize with the full parameter block") {
    auto oracle = Oracle::hiding(BitString::parse("00010000"));
    auto rec = subcube_evaluate(oracle, 8, 16, 42);
    Json j = run_record_json(rec);
    CHECK(j.at("schema") == kSchemaVersion);
    CHECK(j.at("kind") == "run_record");
    CHECK(j.at("algorithm") == "subcube");
    CHECK(j.at("input_x") == "00010000");
    CHECK(j.at("queries").get<std::uint64_t>() == rec.queries);
    CHECK(j.at("params").at("big_d").is_string());
    CHECK(j.at("params").at("m") == 16);
    CHECK(j.at("flags").is_array());
    CHECK(Json::parse(j.dump()) == j);
}

TEST_CASE("relation documents round-trip") {
    auto f = threshold_padded_function(4, 5);
    auto rel = hamming_slice_relation(4, 1, f);
    Json j = relation_json(rel);
    CHECK(j.at("kind") == "relation");
    CHECK(j.at("arity") == 4);
    CHECK(j.at("onset").size() == 5);
    CHECK(j.at("weights").size() == rel.weights().size());

    auto back = relation_from_json(j);
    CHECK(relation_json(back) == j);
    CHECK_THAT(v_geom(back), WithinRel(v_geom(rel), 1e-15));
    CHECK_THAT(v_min(back), WithinRel(v_min(rel), 1e-15));

    Json bad_kind = j;
    bad_kind["kind"] = "run_record";
    CHECK_THROWS_AS(relation_from_json(bad_kind), std::invalid_argument);
    Json bad_schema = j;
    bad_schema["schema"] = kSchemaVersion + 1;
    CHECK_THROWS_AS(relation_from_json(bad_schema), std::invalid_argument);
    Json bad_weight = j;
    bad_weight["weights"][0] = Json::array({0, 1});
    CHECK_THROWS_AS(relation_from_json(bad_weight), std::invalid_argument);
}

TEST_CASE("record streams emit one document per line") {
    auto oracle = Oracle::hiding(BitString::parse("000000"));
    std::vector<RunRecord> recs;
    for (std::uint64_t s = 1; s <= 3; ++s) recs.push_back(subcube_evaluate(oracle, 6, 4, s));

    std::ostringstream os;
    write_run_records_jsonl(os, recs);
    std::istringstream is(os.str());
    std::string line;
    int lines = 0;
    while (std::getline(is, line)) {
        Json j = Json::parse(line);
        CHECK(j.at("kind") == "run_record");
        CHECK(j.at("seed") == static_cast<std::uint64_t>(lines + 1));
        ++lines;
    }
    CHECK(lines == 3);

    std::ostringstream ts;
    write_trial_reports_jsonl(ts, {check_counting_chain(16, 256), check_counting_chain(24, 4096)});
    std::string text = ts.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}

TEST_CASE("fixed-column tables") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");

    auto cols = trial_report_csv_columns();
    auto row = trial_report_csv_row(check_counting_chain(16, 256));
    CHECK(cols.size() == row.size());

    CsvTable table(cols);
    table.add_row(row);
    CHECK_THROWS_AS(table.add_row({"too", "short"}), std::invalid_argument);

    std::ostringstream os;
    table.write(os);
    std::string text = os.str();
    CHECK(text.rfind("schema,claim,n,m,eps,r_star,trials,seed,violation_count,"
                     "empirical_rate,bound,passed,provenance\n",
                     0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    CHECK(text.find("counting-chain") != std::string::npos);
    CHECK(text.find("measured") != std::string::npos);

    auto rcols = run_record_csv_columns();
    auto oracle = Oracle::hiding(BitString::parse("0000"));
    auto rrow = run_record_csv_row(subcube_evaluate(oracle, 4, 2, 9));
    CHECK(rcols.size() == rrow.size());

    CHECK(std::string(provenance_name(Provenance::measured)) == "measured");
    CHECK(std::string(provenance_name(Provenance::formula)) == "formula");
    CHECK(std::string(provenance_name(Provenance::claim_bound)) == "claim-bound");
}
