#pragma once

#include <charconv>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "onsetqlab/adversary.hpp"
#include "onsetqlab/algorithms.hpp"
#include "onsetqlab/boolfn.hpp"
#include "onsetqlab/measures.hpp"
#include "onsetqlab/verify.hpp"

namespace oql {

using Json = nlohmann::ordered_json;

// Bumped whenever a serialized field changes meaning, name, or position.
inline constexpr int kSchemaVersion = 1;

// Where a reported number comes from: a counted/simulated quantity, a closed
// formula evaluated at the parameters, or the bound a claim asserts.
enum class Provenance { measured, formula, claim_bound };

inline const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::measured: return "measured";
        case Provenance::formula: return "formula";
        default: return "claim-bound";
    }
}

// Shortest round-trip decimal form, locale independent; identical input bits
// give identical bytes, which the fixed-seed output contract depends on.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline Json bound_params_json(const BoundParams& p) {
    Json j;
    j["n"] = p.n;
    j["m"] = p.m;
    j["m_prime"] = p.m_prime;
    j["z"] = p.z;
    j["d_z"] = p.d_z;
    j["d_ceil"] = p.d_ceil;
    j["big_d"] = p.big_d.str();
    j["log2_t"] = p.log2_t;
    j["k"] = p.k;
    j["beta_prime"] = p.beta_prime;
    j["beta_effective"] = p.beta_effective;
    j["beta_out_of_range"] = p.beta_out_of_range;
    j["gamma_prime"] = p.gamma_prime;
    j["overlap_bound_sq"] = p.overlap_bound_sq;
    j["overlap_bound_vacuous"] = p.overlap_bound_vacuous;
    j["copies_cap"] = p.copies_cap;
    return j;
}

// wall_time_s stays out on purpose: emitted files must be byte-stable under a
// fixed seed, and timing goes to stderr instead.
inline Json trial_report_json(const TrialReport& r) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "trial_report";
    j["claim"] = r.claim;
    j["n"] = r.n;
    j["m"] = r.m;
    j["eps"] = r.eps;
    j["r_star"] = r.r_star;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["violation_count"] = r.violation_count;
    j["empirical_rate"] = r.empirical_rate;
    j["bound"] = r.bound;
    j["passed"] = r.passed;
    j["details"] = r.details;
    return j;
}

inline Json run_record_json(const RunRecord& r) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "run_record";
    j["algorithm"] = r.algorithm;
    j["n"] = r.n;
    j["m"] = r.m;
    j["seed"] = r.seed;
    j["input_x"] = r.input_x.str();
    j["output"] = r.output;
    j["correct"] = r.correct;
    j["queries"] = r.queries;
    j["phase_queries"] = r.phase_queries;
    j["metrics"] = r.metrics;
    j["flags"] = r.flags;
    j["params"] = bound_params_json(r.params);
    return j;
}

inline Json relation_json(const AdversaryRelation& rel) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "relation";
    j["arity"] = rel.function().arity();
    Json onset = Json::array();
    for (const BitString& x : rel.function().onset()) onset.push_back(x.str());
    j["onset"] = onset;
    Json a_side = Json::array(), b_side = Json::array();
    for (const BitString& x : rel.side(Side::A)) a_side.push_back(x.str());
    for (const BitString& x : rel.side(Side::B)) b_side.push_back(x.str());
    j["a_side"] = a_side;
    j["b_side"] = b_side;
    Json weights = Json::array();
    for (const auto& [ai, bj, wv] : rel.weights()) weights.push_back(Json::array({ai, bj, wv}));
    j["weights"] = weights;
    return j;
}

inline AdversaryRelation relation_from_json(const Json& j) {
    if (!j.contains("kind") || j.at("kind") != "relation")
        throw std::invalid_argument("relation_from_json: not a relation document");
    if (j.at("schema").get<int>() != kSchemaVersion)
        throw std::invalid_argument("relation_from_json: schema version mismatch");
    int arity = j.at("arity").get<int>();
    std::vector<BitString> onset;
    for (const auto& s : j.at("onset")) onset.push_back(BitString::parse(s.get<std::string>()));
    BooleanFunction f = BooleanFunction::from_onset(arity, onset);
    std::vector<BitString> a_side, b_side;
    for (const auto& s : j.at("a_side")) a_side.push_back(BitString::parse(s.get<std::string>()));
    for (const auto& s : j.at("b_side")) b_side.push_back(BitString::parse(s.get<std::string>()));
    std::vector<std::tuple<std::size_t, std::size_t, double>> weights;
    for (const auto& w : j.at("weights")) {
        if (!w.is_array() || w.size() != 3) throw std::invalid_argument("relation_from_json: weight triple expected");
        weights.emplace_back(w[0].get<std::size_t>(), w[1].get<std::size_t>(), w[2].get<double>());
    }
    return AdversaryRelation(std::move(f), std::move(a_side), std::move(b_side), std::move(weights));
}

template <typename Range, typename ToJson>
inline void write_jsonl(std::ostream& os, const Range& items, ToJson to_json) {
    for (const auto& item : items) os << to_json(item).dump() << "\n";
}

inline void write_run_records_jsonl(std::ostream& os, const std::vector<RunRecord>& recs) {
    write_jsonl(os, recs, [](const RunRecord& r) { return run_record_json(r); });
}

inline void write_trial_reports_jsonl(std::ostream& os, const std::vector<TrialReport>& reps) {
    write_jsonl(os, reps, [](const TrialReport& r) { return trial_report_json(r); });
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

// Fixed-column CSV: header row then data rows, every row width-checked.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    explicit CsvTable(std::vector<std::string> cols) : columns(std::move(cols)) {}

    void add_row(std::vector<std::string> row) {
        if (row.size() != columns.size()) throw std::invalid_argument("CsvTable: column count mismatch");
        rows.push_back(std::move(row));
    }

    void write(std::ostream& os) const {
        write_line(os, columns);
        for (const auto& r : rows) write_line(os, r);
    }

  private:
    static void write_line(std::ostream& os, const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os << ",";
            os << csv_escape(cells[i]);
        }
        os << "\n";
    }
};

inline std::vector<std::string> trial_report_csv_columns() {
    return {"schema",  "claim", "n",     "m",
            "eps",     "r_star", "trials", "seed",
            "violation_count", "empirical_rate", "bound", "passed", "provenance"};
}

inline std::vector<std::string> trial_report_csv_row(const TrialReport& r) {
    return {std::to_string(kSchemaVersion),
            r.claim,
            std::to_string(r.n),
            std::to_string(r.m),
            format_double(r.eps),
            format_double(r.r_star),
            std::to_string(r.trials),
            std::to_string(r.seed),
            std::to_string(r.violation_count),
            format_double(r.empirical_rate),
            format_double(r.bound),
            r.passed ? "1" : "0",
            provenance_name(Provenance::measured)};
}

inline std::vector<std::string> run_record_csv_columns() {
    return {"schema", "algorithm", "n",       "m",    "seed",  "input_x",
            "output", "correct",   "queries", "flags", "provenance"};
}

inline std::vector<std::string> run_record_csv_row(const RunRecord& r) {
    std::string flags;
    for (std::size_t i = 0; i < r.flags.size(); ++i) {
        if (i) flags += ";";
        flags += r.flags[i];
    }
    return {std::to_string(kSchemaVersion),
            r.algorithm,
            std::to_string(r.n),
            std::to_string(r.m),
            std::to_string(r.seed),
            r.input_x.str(),
            std::to_string(r.output),
            r.correct ? "1" : "0",
            std::to_string(r.queries),
            flags,
            provenance_name(Provenance::measured)};
}

} // namespace oql
