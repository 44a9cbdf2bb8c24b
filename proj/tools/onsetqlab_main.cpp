#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "onsetqlab/adversary.hpp"
#include "onsetqlab/algorithms.hpp"
#include "onsetqlab/boolfn.hpp"
#include "onsetqlab/io.hpp"
#include "onsetqlab/measures.hpp"
#include "onsetqlab/parallel.hpp"
#include "onsetqlab/qsim.hpp"
#include "onsetqlab/verify.hpp"

namespace {

using namespace oql;

// Everything destined for --out / stdout is assembled first and written once;
// only timing notes go to stderr, so a fixed argv+seed gives fixed bytes.
void deliver(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    os << text;
}

std::string dump_jsonl(const std::vector<Json>& docs) {
    std::string out;
    for (const auto& j : docs) {
        out += j.dump();
        out += "\n";
    }
    return out;
}

std::string dump_csv(const CsvTable& table) {
    std::ostringstream os;
    table.write(os);
    return os.str();
}

struct Common {
    std::string format = "json";
    std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--format", c.format, "output format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", c.out, "write the output to this file instead of stdout");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return Rng(seed, stream).u64(); }

void check_family_size(int n, std::uint64_t m) {
    if (n < 1 || n > 64) throw std::invalid_argument("n out of range [1, 64]");
    if (m < 1 || (n <= 63 && m > (std::uint64_t{1} << (n - 1))))
        throw std::invalid_argument("m out of range [1, 2^(n-1)]");
}

std::uint64_t resolve_m(int n, const std::optional<std::uint64_t>& m, const std::optional<double>& alpha) {
    if (m.has_value() == alpha.has_value())
        throw std::invalid_argument("exactly one of --m / --m-exp is required");
    if (m) return *m;
    int e = static_cast<int>(std::lround(*alpha * n));
    e = std::max(1, std::min(e, n - 1));
    return std::uint64_t{1} << e;
}

std::vector<std::uint64_t> resolve_m_list(int n, const std::vector<std::uint64_t>& ms,
                                          const std::vector<double>& alphas) {
    if (ms.empty() == alphas.empty())
        throw std::invalid_argument("exactly one of --m / --m-exp is required");
    if (!ms.empty()) return ms;
    std::vector<std::uint64_t> out;
    for (double a : alphas) out.push_back(resolve_m(n, std::nullopt, a));
    return out;
}

double median_of(std::vector<std::uint64_t> v) {
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    if (v.size() % 2 == 1) return static_cast<double>(v[h]);
    return (static_cast<double>(v[h - 1]) + static_cast<double>(v[h])) / 2.0;
}

std::string join_flags(const std::vector<std::string>& flags) {
    std::string out;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (i) out += ";";
        out += flags[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// sample: draw on-sets from the uniform family.

struct SampleArgs {
    Common common;
    int n = 0;
    std::optional<std::uint64_t> m;
    std::optional<double> m_exp;
    std::uint64_t seed = 0;
    std::uint64_t count = 1;
    bool table = false;
};

void run_sample(const SampleArgs& a) {
    std::uint64_t m = resolve_m(a.n, a.m, a.m_exp);
    check_family_size(a.n, m);
    if (a.table && a.n > kTableArityMax)
        throw std::invalid_argument("--table needs n <= " + std::to_string(kTableArityMax));

    std::string text;
    std::vector<Json> docs;
    CsvTable csv({"schema", "n", "m", "seed", "index", "element", "provenance"});
    for (std::uint64_t i = 0; i < a.count; ++i) {
        Rng rng(a.seed, i);
        auto vals = sample_onset(a.n, m, rng);
        if (a.table) {
            std::ostringstream os;
            write_table(os, BooleanFunction::from_onset_values(a.n, vals));
            text += os.str();
            continue;
        }
        Json onset = Json::array();
        for (std::uint64_t v : vals) onset.push_back(BitString(a.n, v).str());
        if (a.common.format == "json") {
            Json j;
            j["schema"] = kSchemaVersion;
            j["kind"] = "sample";
            j["n"] = a.n;
            j["m"] = m;
            j["seed"] = a.seed;
            j["index"] = i;
            j["onset"] = onset;
            docs.push_back(std::move(j));
        } else {
            for (std::uint64_t v : vals)
                csv.add_row({std::to_string(kSchemaVersion), std::to_string(a.n), std::to_string(m),
                             std::to_string(a.seed), std::to_string(i), BitString(a.n, v).str(),
                             provenance_name(Provenance::measured)});
        }
    }
    if (a.table)
        deliver(text, a.common.out);
    else
        deliver(a.common.format == "json" ? dump_jsonl(docs) : dump_csv(csv), a.common.out);
}

// ---------------------------------------------------------------------------
// measure: complexity measures and closed-form scales over an (n, m) grid.

struct MeasureArgs {
    Common common;
    std::vector<int> ns;
    std::vector<std::uint64_t> ms;
    std::vector<double> m_exps;
};

void run_measure(const MeasureArgs& a) {
    if (a.ns.empty()) throw std::invalid_argument("--n is required");
    std::vector<Json> docs;
    CsvTable csv({"schema", "n", "m", "quantity", "value", "provenance"});
    for (int n : a.ns) {
        for (std::uint64_t m : resolve_m_list(n, a.ms, a.m_exps)) {
            check_family_size(n, m);
            std::vector<std::tuple<std::string, double, Provenance>> rows = {
                {"isoperimetric_bound", isoperimetric_bound(n, m), Provenance::formula},
                {"counting_lower_bound", counting_lower_bound(n, static_cast<double>(m)), Provenance::formula},
                {"threshold_index", static_cast<double>(threshold_index(n, m)), Provenance::formula},
                {"worst_case_query_bound", worst_case_query_bound(n, m), Provenance::formula},
                {"best_case_query_bound", best_case_query_bound(n, m), Provenance::formula},
                {"average_case_query_bound", average_case_query_bound(n, m), Provenance::formula},
            };
            if (n <= 16) {
                auto cube = subcube_function(n, m);
                auto thr = threshold_padded_function(n, m);
                rows.emplace_back("subcube_sensitivity", sensitivity(cube), Provenance::measured);
                rows.emplace_back("subcube_edge_boundary", static_cast<double>(edge_boundary(cube)),
                                  Provenance::measured);
                rows.emplace_back("threshold_sensitivity", sensitivity(thr), Provenance::measured);
                rows.emplace_back("threshold_edge_boundary", static_cast<double>(edge_boundary(thr)),
                                  Provenance::measured);
            }
            if (a.common.format == "json") {
                Json j;
                j["schema"] = kSchemaVersion;
                j["kind"] = "measure";
                j["n"] = n;
                j["m"] = m;
                Json jr = Json::array();
                for (const auto& [q, v, p] : rows)
                    jr.push_back(Json{{"quantity", q}, {"value", v}, {"provenance", provenance_name(p)}});
                j["rows"] = std::move(jr);
                docs.push_back(std::move(j));
            } else {
                for (const auto& [q, v, p] : rows)
                    csv.add_row({std::to_string(kSchemaVersion), std::to_string(n), std::to_string(m), q,
                                 format_double(v), provenance_name(p)});
            }
        }
    }
    deliver(a.common.format == "json" ? dump_jsonl(docs) : dump_csv(csv), a.common.out);
}

// ---------------------------------------------------------------------------
// adversary: ratio-profile relations and the floors they certify.

struct HammingSliceArgs {
    Common common;
    int n = 0;
    int k = -1;
    std::optional<std::uint64_t> m;
    std::string relation_out;
};

Json adversary_metrics_json(const AdversaryRelation& rel, const std::string& label) {
    int n = rel.function().arity();
    const auto& [ai, bj, w] = rel.weights().at(0);
    (void)w;
    int pos = -1;
    for (int i = 0; i < n; ++i)
        if (rel.side(Side::A)[ai].bit(i) != rel.side(Side::B)[bj].bit(i)) {
            pos = i;
            break;
        }
    Json j;
    j["schema"] = kSchemaVersion;
    j["kind"] = "adversary";
    j["relation"] = label;
    j["n"] = n;
    j["m"] = rel.function().onset_size();
    j["theta_a"] = rel.theta_by_index(Side::A, ai, pos);
    j["theta_b"] = rel.theta_by_index(Side::B, bj, pos);
    j["v_geom"] = v_geom(rel);
    j["v_min"] = v_min(rel);
    j["query_bound"] = 1.0 / v_geom(rel);
    return j;
}

void emit_adversary(const Json& j, const Common& common, double closed_form) {
    if (common.format == "json") {
        Json full = j;
        full["closed_form_bound"] = closed_form;
        deliver(full.dump() + "\n", common.out);
        return;
    }
    CsvTable csv({"schema", "relation", "n", "m", "quantity", "value", "provenance"});
    auto row = [&](const std::string& q, double v, Provenance p) {
        csv.add_row({std::to_string(kSchemaVersion), j.at("relation").get<std::string>(),
                     std::to_string(j.at("n").get<int>()), std::to_string(j.at("m").get<std::uint64_t>()), q,
                     format_double(v), provenance_name(p)});
    };
    row("theta_a", j.at("theta_a").get<double>(), Provenance::measured);
    row("theta_b", j.at("theta_b").get<double>(), Provenance::measured);
    row("v_geom", j.at("v_geom").get<double>(), Provenance::measured);
    row("v_min", j.at("v_min").get<double>(), Provenance::measured);
    row("query_bound", j.at("query_bound").get<double>(), Provenance::measured);
    row("closed_form_bound", closed_form, Provenance::formula);
    deliver(dump_csv(csv), common.out);
}

void run_hamming_slice(const HammingSliceArgs& a) {
    if (a.k < 0) throw std::invalid_argument("--k is required");
    BigInt slice_m = binom_partial_sum(a.n, a.k);
    std::uint64_t m = a.m ? *a.m : static_cast<std::uint64_t>(slice_m);
    auto f = threshold_padded_function(a.n, m);
    auto rel = hamming_slice_relation(a.n, a.k, f);
    if (!a.relation_out.empty()) {
        std::ofstream os(a.relation_out, std::ios::binary);
        if (!os) throw std::runtime_error("cannot open output file: " + a.relation_out);
        os << relation_json(rel).dump() << "\n";
    }
    Json j = adversary_metrics_json(rel, "hamming-slice");
    j["k"] = a.k;
    double closed = std::sqrt(static_cast<double>(a.k + 1) * (a.n - a.k));
    emit_adversary(j, a.common, closed);
}

struct AdversaryEvalArgs {
    Common common;
    std::string relation_path;
};

void run_adversary_eval(const AdversaryEvalArgs& a) {
    std::ifstream is(a.relation_path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open relation file: " + a.relation_path);
    Json doc = Json::parse(is);
    auto rel = relation_from_json(doc);
    Json j = adversary_metrics_json(rel, "file");
    emit_adversary(j, a.common, 1.0 / v_geom(rel));
}

// ---------------------------------------------------------------------------
// alg: run the evaluation algorithms, exactly or by simulation.

struct AlgArgs {
    Common common;
    int n = 0;
    std::optional<std::uint64_t> m;
    std::optional<double> m_exp;
    std::string function = "sampled"; // sampled | subcube | threshold
    std::string f_table;
    std::uint64_t f_seed = 0;
    bool f_seed_set = false;
    bool exhaustive = false;
    std::string input;
    std::optional<std::uint64_t> onset_index;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::uint64_t trials = 1;
};

BooleanFunction pick_function(const AlgArgs& a, int n, std::uint64_t m) {
    if (a.function == "subcube") return subcube_function(n, m);
    if (a.function == "threshold") return threshold_padded_function(n, m);
    if (!a.f_seed_set) throw std::invalid_argument("--f-seed is required with --function sampled");
    return sample_uniform_fnm(n, m, a.f_seed);
}

// --f-table loads the function (and with it n, m) from a truth-table file;
// otherwise the family parameters select or sample one.
BooleanFunction load_or_pick(const AlgArgs& a, int& n, std::uint64_t& m) {
    if (!a.f_table.empty()) {
        std::ifstream is(a.f_table, std::ios::binary);
        if (!is) throw std::runtime_error("cannot open table file: " + a.f_table);
        auto f = read_table(is);
        if (a.n != 0 && a.n != f.arity()) throw std::invalid_argument("--n disagrees with the table file");
        n = f.arity();
        m = f.onset_size();
        return f;
    }
    if (a.n == 0) throw std::invalid_argument("--n is required without --f-table");
    n = a.n;
    m = resolve_m(a.n, a.m, a.m_exp);
    check_family_size(n, m);
    return pick_function(a, n, m);
}

BitString pick_input(const AlgArgs& a, const BooleanFunction& f) {
    if (!a.input.empty()) {
        BitString x = BitString::parse(a.input);
        if (x.length() != f.arity()) throw std::invalid_argument("--input length must equal n");
        return x;
    }
    if (a.onset_index) {
        auto onset = f.onset();
        if (*a.onset_index >= onset.size()) throw std::invalid_argument("--onset-index out of range");
        return onset[*a.onset_index];
    }
    throw std::invalid_argument("need --input or --onset-index (or --exhaustive)");
}

void emit_exhaustive(const Common& common, const std::string& algorithm, int n, std::uint64_t m,
                     const std::vector<std::pair<BitString, double>>& success_by_input,
                     const std::vector<int>& expected) {
    double min_success = 1.0;
    for (const auto& [x, p] : success_by_input) min_success = std::min(min_success, p);
    if (common.format == "json") {
        std::vector<Json> docs;
        Json head;
        head["schema"] = kSchemaVersion;
        head["kind"] = "alg_exhaustive";
        head["algorithm"] = algorithm;
        head["n"] = n;
        head["m"] = m;
        head["inputs"] = success_by_input.size();
        head["min_success"] = min_success;
        head["max_error"] = 1.0 - min_success;
        docs.push_back(std::move(head));
        for (std::size_t i = 0; i < success_by_input.size(); ++i) {
            Json j;
            j["schema"] = kSchemaVersion;
            j["kind"] = "alg_input_row";
            j["input_x"] = success_by_input[i].first.str();
            j["expected"] = expected[i];
            j["p_correct"] = success_by_input[i].second;
            docs.push_back(std::move(j));
        }
        deliver(dump_jsonl(docs), common.out);
        return;
    }
    CsvTable csv({"schema", "algorithm", "n", "m", "input_x", "expected", "p_correct", "provenance"});
    for (std::size_t i = 0; i < success_by_input.size(); ++i)
        csv.add_row({std::to_string(kSchemaVersion), algorithm, std::to_string(n), std::to_string(m),
                     success_by_input[i].first.str(), std::to_string(expected[i]),
                     format_double(success_by_input[i].second), provenance_name(Provenance::formula)});
    deliver(dump_csv(csv), common.out);
}

void emit_records(const Common& common, const std::vector<RunRecord>& recs) {
    if (common.format == "json") {
        std::ostringstream os;
        write_run_records_jsonl(os, recs);
        std::uint64_t ok = 0;
        for (const auto& r : recs) ok += r.correct ? 1 : 0;
        Json tail;
        tail["schema"] = kSchemaVersion;
        tail["kind"] = "alg_summary";
        tail["trials"] = recs.size();
        tail["successes"] = ok;
        tail["success_rate"] = recs.empty() ? 0.0 : static_cast<double>(ok) / recs.size();
        deliver(os.str() + tail.dump() + "\n", common.out);
        return;
    }
    CsvTable csv(run_record_csv_columns());
    for (const auto& r : recs) csv.add_row(run_record_csv_row(r));
    deliver(dump_csv(csv), common.out);
}

void require_seed(const AlgArgs& a) {
    if (!a.seed_set) throw std::invalid_argument("--seed is required for simulated runs");
}

void run_alg_subcube(const AlgArgs& a) {
    std::uint64_t m = resolve_m(a.n, a.m, a.m_exp);
    check_family_size(a.n, m);
    if (a.exhaustive) {
        if (a.n > 14) throw std::invalid_argument("--exhaustive needs n <= 14 here");
        std::vector<std::pair<BitString, double>> rows;
        std::vector<int> expected;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << a.n); ++v) {
            BitString x(a.n, v);
            rows.emplace_back(x, subcube_success_probability(a.n, m, x));
            expected.push_back(subcube_member(a.n, m, x) ? 1 : 0);
        }
        emit_exhaustive(a.common, "subcube", a.n, m, rows, expected);
        return;
    }
    require_seed(a);
    auto f = subcube_function(a.n, m);
    BitString x = pick_input(a, f);
    std::vector<RunRecord> recs;
    for (std::uint64_t t = 0; t < a.trials; ++t)
        recs.push_back(subcube_evaluate(Oracle::hiding(x), a.n, m, derive_seed(a.seed, t)));
    emit_records(a.common, recs);
}

void run_alg_worst(const AlgArgs& a) {
    int n = 0;
    std::uint64_t m = 0;
    auto f = load_or_pick(a, n, m);
    if (a.exhaustive) {
        if (n > 10) throw std::invalid_argument("--exhaustive needs n <= 10 here");
        std::vector<std::pair<BitString, double>> rows;
        std::vector<int> expected;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
            BitString x(n, v);
            rows.emplace_back(x, worst_case_success_probability(f, x));
            expected.push_back(f.value(x) ? 1 : 0);
        }
        emit_exhaustive(a.common, "worst_case", n, m, rows, expected);
        return;
    }
    require_seed(a);
    BitString x = pick_input(a, f);
    std::vector<RunRecord> recs;
    for (std::uint64_t t = 0; t < a.trials; ++t)
        recs.push_back(worst_case_evaluate(Oracle::hiding(x), f, derive_seed(a.seed, t)));
    emit_records(a.common, recs);
}

void run_alg_average(const AlgArgs& a) {
    int n = 0;
    std::uint64_t m = 0;
    auto f = load_or_pick(a, n, m);
    auto model = AvgCaseModel::build(f);
    std::fprintf(stderr, "# copies=%d cap=%d min_pgm_success=%s flags=%s\n", model.choice.copies,
                 model.choice.cap, format_double(model.choice.min_success).c_str(),
                 join_flags(model.flags).c_str());
    if (a.exhaustive) {
        if (n > 12) throw std::invalid_argument("--exhaustive needs n <= 12 here");
        std::vector<std::pair<BitString, double>> rows;
        std::vector<int> expected;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
            BitString x(n, v);
            rows.emplace_back(x, average_case_success_probability(model, x));
            expected.push_back(f.value(x) ? 1 : 0);
        }
        emit_exhaustive(a.common, "average_case", n, m, rows, expected);
        return;
    }
    require_seed(a);
    BitString x = pick_input(a, f);
    std::vector<RunRecord> recs;
    for (std::uint64_t t = 0; t < a.trials; ++t)
        recs.push_back(average_case_evaluate(Oracle::hiding(x), model, derive_seed(a.seed, t)));
    emit_records(a.common, recs);
}

// ---------------------------------------------------------------------------
// verify: claim checkers; the report is the output, timing goes to stderr.

void emit_report(const Common& common, const TrialReport& r) {
    std::fprintf(stderr, "# wall_time_s=%s\n", format_double(r.wall_time_s).c_str());
    if (common.format == "json") {
        deliver(trial_report_json(r).dump() + "\n", common.out);
        return;
    }
    CsvTable csv(trial_report_csv_columns());
    csv.add_row(trial_report_csv_row(r));
    deliver(dump_csv(csv), common.out);
}

struct VerifyArgs {
    Common common;
    int n = 0;
    std::optional<std::uint64_t> m;
    std::optional<double> m_exp;
    std::optional<double> eps; // resolved at call time so defaults keep full precision
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::vector<int> n_grid;
    int points = 64;
    std::optional<double> alpha;
    int n_lo = 4;
    int n_hi = 32;
    int n_max = 4;
    std::uint64_t samples = 10000;
};

// ---------------------------------------------------------------------------
// bounds: the derived parameter block plus every closed-form scale at (n, m).

struct BoundsArgs {
    Common common;
    int n = 0;
    std::optional<std::uint64_t> m;
    std::optional<double> m_exp;
};

void run_bounds(const BoundsArgs& a) {
    std::uint64_t m = resolve_m(a.n, a.m, a.m_exp);
    auto params = BoundParams::for_problem(a.n, m);
    std::vector<std::tuple<std::string, double, Provenance>> rows = {
        {"worst_case_query_bound", worst_case_query_bound(a.n, m), Provenance::formula},
        {"best_case_query_bound", best_case_query_bound(a.n, m), Provenance::formula},
        {"average_case_query_bound", average_case_query_bound(a.n, m), Provenance::formula},
        {"counting_lower_bound", counting_lower_bound(a.n, static_cast<double>(m)), Provenance::formula},
        {"isoperimetric_bound", isoperimetric_bound(a.n, m), Provenance::formula},
        {"bound_constant_c", bound_constant_c(), Provenance::formula},
    };
    if (a.common.format == "json") {
        Json j;
        j["schema"] = kSchemaVersion;
        j["kind"] = "bounds";
        j["n"] = a.n;
        j["m"] = m;
        Json jr = Json::array();
        for (const auto& [q, v, p] : rows)
            jr.push_back(Json{{"quantity", q}, {"value", v}, {"provenance", provenance_name(p)}});
        j["rows"] = std::move(jr);
        j["params"] = bound_params_json(params);
        deliver(j.dump() + "\n", a.common.out);
        return;
    }
    CsvTable csv({"schema", "n", "m", "quantity", "value", "provenance"});
    for (const auto& [q, v, p] : rows)
        csv.add_row({std::to_string(kSchemaVersion), std::to_string(a.n), std::to_string(m), q,
                     format_double(v), provenance_name(p)});
    deliver(dump_csv(csv), a.common.out);
}

struct GraphBoundsArgs {
    Common common;
    int vertices = 0;
    std::optional<int> genus;
    bool isomorphism = false;
    std::optional<double> family_log2;
};

void run_graph_bounds(const GraphBoundsArgs& a) {
    int modes = (a.genus ? 1 : 0) + (a.isomorphism ? 1 : 0) + (a.family_log2 ? 1 : 0);
    if (modes != 1) throw std::invalid_argument("pick exactly one of --genus / --isomorphism / --family-log2");
    std::string family;
    double lf = 0.0;
    if (a.genus) {
        family = "genus";
        lf = genus_family_log_size(a.vertices, *a.genus);
    } else if (a.isomorphism) {
        family = "isomorphism";
        lf = isomorphism_family_log_size(a.vertices);
    } else {
        family = "explicit";
        lf = *a.family_log2;
    }
    double bound = graph_property_query_bound(a.vertices, lf);
    if (a.common.format == "json") {
        Json j;
        j["schema"] = kSchemaVersion;
        j["kind"] = "graph_bound";
        j["vertices"] = a.vertices;
        j["family"] = family;
        j["family_log2"] = lf;
        j["query_bound"] = bound;
        j["provenance"] = provenance_name(Provenance::formula);
        deliver(j.dump() + "\n", a.common.out);
        return;
    }
    CsvTable csv({"schema", "vertices", "family", "quantity", "value", "provenance"});
    csv.add_row({std::to_string(kSchemaVersion), std::to_string(a.vertices), family, "family_log2",
                 format_double(lf), provenance_name(Provenance::formula)});
    csv.add_row({std::to_string(kSchemaVersion), std::to_string(a.vertices), family, "query_bound",
                 format_double(bound), provenance_name(Provenance::formula)});
    deliver(dump_csv(csv), a.common.out);
}

// ---------------------------------------------------------------------------
// table1: measured query counts against the closed-form scales, three rows
// per (n, m) cell.

struct Table1Args {
    Common common;
    std::vector<int> ns;
    std::vector<std::uint64_t> ms;
    std::vector<double> m_exps;
    std::uint64_t seed = 0;
    std::uint64_t trials = 5;
};

void run_table1(const Table1Args& a) {
    if (a.ns.empty()) throw std::invalid_argument("--n is required");
    if (a.trials < 1) throw std::invalid_argument("--trials must be at least 1");
    std::vector<Json> docs;
    CsvTable csv({"schema", "n", "m", "case", "measured_queries", "measured_provenance", "formula_value",
                  "formula_provenance", "flags"});
    std::uint64_t cell = 0;
    for (int n : a.ns) {
        for (std::uint64_t m : resolve_m_list(n, a.ms, a.m_exps)) {
            check_family_size(n, m);
            if (n > 12) throw std::invalid_argument("table1 cells need n <= 12");
            ++cell;
            std::uint64_t f_seed = derive_seed(a.seed, cell);

            auto f = sample_uniform_fnm(n, m, f_seed);
            auto f_onset = f.onset();
            auto cube = subcube_function(n, m);
            auto cube_onset = cube.onset();
            auto model = AvgCaseModel::build(f);

            struct Row {
                const char* label;
                double measured;
                double formula;
                std::string flags;
            };
            std::vector<std::uint64_t> worst_q, avg_q, best_q;
            for (std::uint64_t t = 0; t < a.trials; ++t) {
                std::uint64_t run_seed = derive_seed(f_seed, 1000 + t);
                const BitString& wx = f_onset[t % f_onset.size()];
                worst_q.push_back(worst_case_evaluate(Oracle::hiding(wx), f, run_seed).queries);
                avg_q.push_back(average_case_evaluate(Oracle::hiding(wx), model, run_seed).queries);
                const BitString& bx = cube_onset[t % cube_onset.size()];
                best_q.push_back(subcube_evaluate(Oracle::hiding(bx), n, m, run_seed).queries);
            }
            std::vector<Row> rows = {
                {"worst", median_of(worst_q), worst_case_query_bound(n, m), ""},
                {"average", median_of(avg_q), average_case_query_bound(n, m), join_flags(model.flags)},
                {"best", median_of(best_q), best_case_query_bound(n, m), ""},
            };
            for (const auto& r : rows) {
                if (a.common.format == "json") {
                    Json j;
                    j["schema"] = kSchemaVersion;
                    j["kind"] = "table1_row";
                    j["n"] = n;
                    j["m"] = m;
                    j["case"] = r.label;
                    j["measured_queries"] = r.measured;
                    j["measured_provenance"] = provenance_name(Provenance::measured);
                    j["formula_value"] = r.formula;
                    j["formula_provenance"] = provenance_name(Provenance::formula);
                    j["flags"] = r.flags;
                    docs.push_back(std::move(j));
                } else {
                    csv.add_row({std::to_string(kSchemaVersion), std::to_string(n), std::to_string(m),
                                 r.label, format_double(r.measured), provenance_name(Provenance::measured),
                                 format_double(r.formula), provenance_name(Provenance::formula), r.flags});
                }
            }
        }
    }
    deliver(a.common.format == "json" ? dump_jsonl(docs) : dump_csv(csv), a.common.out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"query-model laboratory for Boolean function families keyed by on-set size"};
    app.require_subcommand(1);

    SampleArgs sample_args;
    auto* sample = app.add_subcommand("sample", "draw uniform on-sets from the family");
    sample->add_option("--n", sample_args.n, "number of variables")->required();
    sample->add_option("--m", sample_args.m, "on-set size");
    sample->add_option("--m-exp", sample_args.m_exp, "on-set size as 2^(alpha*n)");
    sample->add_option("--seed", sample_args.seed, "RNG seed")->required();
    sample->add_option("--count", sample_args.count, "number of samples");
    sample->add_flag("--table", sample_args.table, "emit truth-table files instead of JSON/CSV");
    add_common(sample, sample_args.common);
    sample->callback([&] { run_sample(sample_args); });

    MeasureArgs measure_args;
    auto* measure = app.add_subcommand("measure", "complexity measures over an (n, m) grid");
    measure->add_option("--n", measure_args.ns, "numbers of variables")->required();
    measure->add_option("--m", measure_args.ms, "on-set sizes");
    measure->add_option("--m-exp", measure_args.m_exps, "on-set sizes as 2^(alpha*n)");
    add_common(measure, measure_args.common);
    measure->callback([&] { run_measure(measure_args); });

    auto* adversary = app.add_subcommand("adversary", "ratio-profile lower-bound relations");
    adversary->require_subcommand(1);
    HammingSliceArgs slice_args;
    auto* slice = adversary->add_subcommand("hamming-slice", "weight-slice relation at level k");
    slice->add_option("--n", slice_args.n, "number of variables")->required();
    slice->add_option("--k", slice_args.k, "slice level")->required();
    slice->add_option("--m", slice_args.m, "on-set size (default: all weight <= k strings)");
    slice->add_option("--relation-out", slice_args.relation_out, "also write the relation as JSON");
    add_common(slice, slice_args.common);
    slice->callback([&] { run_hamming_slice(slice_args); });
    AdversaryEvalArgs adv_eval_args;
    auto* adv_eval = adversary->add_subcommand("eval", "evaluate a relation loaded from JSON");
    adv_eval->add_option("--relation", adv_eval_args.relation_path, "relation JSON file")->required();
    add_common(adv_eval, adv_eval_args.common);
    adv_eval->callback([&] { run_adversary_eval(adv_eval_args); });

    auto* alg = app.add_subcommand("alg", "run an evaluation algorithm");
    alg->require_subcommand(1);
    auto add_alg_options = [](CLI::App* cmd, AlgArgs& args, bool with_function) {
        auto* n_opt = cmd->add_option("--n", args.n, "number of variables");
        if (!with_function) n_opt->required();
        cmd->add_option("--m", args.m, "on-set size");
        cmd->add_option("--m-exp", args.m_exp, "on-set size as 2^(alpha*n)");
        if (with_function) {
            cmd->add_option("--function", args.function, "sampled | subcube | threshold")
                ->check(CLI::IsMember({"sampled", "subcube", "threshold"}));
            cmd->add_option("--f-table", args.f_table, "load the function from a truth-table file");
            cmd->add_option("--f-seed", args.f_seed, "seed for --function sampled")
                ->each([&args](const std::string&) { args.f_seed_set = true; });
        }
        cmd->add_flag("--exhaustive", args.exhaustive, "exact success probability for every input");
        cmd->add_option("--input", args.input, "explicit input bitstring");
        cmd->add_option("--onset-index", args.onset_index, "use this on-set element as input");
        cmd->add_option("--seed", args.seed, "RNG seed for simulated runs")
            ->each([&args](const std::string&) { args.seed_set = true; });
        cmd->add_option("--trials", args.trials, "simulated runs to perform");
        add_common(cmd, args.common);
    };
    AlgArgs subcube_args;
    auto* alg_subcube = alg->add_subcommand("subcube", "prefix-cube membership evaluation");
    add_alg_options(alg_subcube, subcube_args, false);
    alg_subcube->callback([&] { run_alg_subcube(subcube_args); });
    AlgArgs worst_args;
    auto* alg_worst = alg->add_subcommand("worst", "identification-based evaluation");
    add_alg_options(alg_worst, worst_args, true);
    alg_worst->callback([&] { run_alg_worst(worst_args); });
    AlgArgs average_args;
    auto* alg_average = alg->add_subcommand("average", "state-discrimination evaluation");
    add_alg_options(alg_average, average_args, true);
    alg_average->callback([&] { run_alg_average(average_args); });

    auto* verify = app.add_subcommand("verify", "check a probabilistic or inequality claim");
    verify->require_subcommand(1);
    VerifyArgs vmd_args;
    auto* vmd = verify->add_subcommand("min-distance", "no sampled pair closer than the distance mark");
    vmd->add_option("--n", vmd_args.n, "number of variables")->required();
    vmd->add_option("--m", vmd_args.m, "on-set size");
    vmd->add_option("--m-exp", vmd_args.m_exp, "on-set size as 2^(alpha*n)");
    vmd->add_option("--eps", vmd_args.eps, "claim exponent (default: the canonical distance exponent)");
    vmd->add_option("--trials", vmd_args.trials, "trial count")->required();
    vmd->add_option("--seed", vmd_args.seed, "RNG seed")->required();
    add_common(vmd, vmd_args.common);
    vmd->callback([&] {
        const VerifyArgs& v = vmd_args;
        std::uint64_t m = resolve_m(v.n, v.m, v.m_exp);
        // pairwise scan is O(m^2 n) bit ops per trial; keep sweeps tractable
        if (m > (std::uint64_t{1} << 16)) throw std::invalid_argument("min-distance caps m at 2^16");
        emit_report(v.common, check_min_distance(v.n, m, v.eps.value_or(default_distance_eps()),
                                                 v.trials, v.seed));
    });
    VerifyArgs vov_args;
    auto* vov = verify->add_subcommand("overlap", "pairwise signed overlap stays under the cap");
    vov->add_option("--n", vov_args.n, "number of variables")->required();
    vov->add_option("--m", vov_args.m, "on-set size");
    vov->add_option("--m-exp", vov_args.m_exp, "on-set size as 2^(alpha*n)");
    vov->add_option("--eps", vov_args.eps, "claim exponent (default 0.88)");
    vov->add_option("--trials", vov_args.trials, "trial count")->required();
    vov->add_option("--seed", vov_args.seed, "RNG seed")->required();
    add_common(vov, vov_args.common);
    vov->callback([&] {
        const VerifyArgs& v = vov_args;
        emit_report(v.common, check_overlap_bound(v.n, resolve_m(v.n, v.m, v.m_exp), v.trials, v.seed,
                                                  v.eps.value_or(0.88)));
    });
    VerifyArgs vdp_args;
    auto* vdp = verify->add_subcommand("d-property", "growth exponent inequality and monotonicity");
    vdp->add_option("--n", vdp_args.n_grid, "grid of n values")->required();
    vdp->add_option("--points", vdp_args.points, "grid points per n");
    add_common(vdp, vdp_args.common);
    vdp->callback([&] { emit_report(vdp_args.common, check_d_property(vdp_args.n_grid, vdp_args.points)); });
    VerifyArgs vcc_args;
    auto* vcc = verify->add_subcommand("counting-chain", "two-step count bound at (n, m)");
    vcc->add_option("--n", vcc_args.n, "number of variables");
    vcc->add_option("--m", vcc_args.m, "on-set size");
    vcc->add_option("--m-exp", vcc_args.m_exp, "on-set size as 2^(alpha*n)");
    vcc->add_option("--alpha", vcc_args.alpha, "scan mode: m = 2^(alpha*n) over [--n-lo, --n-hi]");
    vcc->add_option("--n-lo", vcc_args.n_lo, "scan start");
    vcc->add_option("--n-hi", vcc_args.n_hi, "scan end");
    add_common(vcc, vcc_args.common);
    vcc->callback([&] {
        const VerifyArgs& v = vcc_args;
        if (v.alpha) {
            int smallest = counting_chain_smallest_n(*v.alpha, v.n_lo, v.n_hi);
            Json j;
            j["schema"] = kSchemaVersion;
            j["kind"] = "counting_scan";
            j["alpha"] = *v.alpha;
            j["n_lo"] = v.n_lo;
            j["n_hi"] = v.n_hi;
            j["smallest_n"] = smallest;
            if (v.common.format == "json") {
                deliver(j.dump() + "\n", v.common.out);
            } else {
                CsvTable csv({"schema", "alpha", "n_lo", "n_hi", "smallest_n", "provenance"});
                csv.add_row({std::to_string(kSchemaVersion), format_double(*v.alpha),
                             std::to_string(v.n_lo), std::to_string(v.n_hi), std::to_string(smallest),
                             provenance_name(Provenance::measured)});
                deliver(dump_csv(csv), v.common.out);
            }
            return;
        }
        if (v.n == 0) throw std::invalid_argument("need --n plus --m/--m-exp, or --alpha");
        emit_report(v.common, check_counting_chain(v.n, resolve_m(v.n, v.m, v.m_exp)));
    });
    VerifyArgs vsc_args;
    auto* vsc = verify->add_subcommand("sensitivity-chain", "pointwise max dominates mean and floor");
    vsc->add_option("--n-max", vsc_args.n_max, "largest n (exhaustive through 4, sampled above)")->required();
    vsc->add_option("--samples", vsc_args.samples, "samples per sampled (n, m) cell");
    vsc->add_option("--seed", vsc_args.seed, "RNG seed")->required();
    add_common(vsc, vsc_args.common);
    vsc->callback([&] {
        emit_report(vsc_args.common, check_sensitivity_chain(vsc_args.n_max, vsc_args.samples, vsc_args.seed));
    });

    BoundsArgs bounds_args;
    auto* bounds = app.add_subcommand("bounds", "closed-form scales and derived parameters");
    bounds->add_option("--n", bounds_args.n, "number of variables");
    bounds->add_option("--m", bounds_args.m, "on-set size");
    bounds->add_option("--m-exp", bounds_args.m_exp, "on-set size as 2^(alpha*n)");
    add_common(bounds, bounds_args.common);
    GraphBoundsArgs graph_args;
    auto* graph = bounds->add_subcommand("graph", "query bound for a graph-property family");
    graph->add_option("--vertices", graph_args.vertices, "number of vertices")->required();
    graph->add_option("--genus", graph_args.genus, "genus-bounded family");
    graph->add_flag("--isomorphism", graph_args.isomorphism, "single-isomorphism-class family");
    graph->add_option("--family-log2", graph_args.family_log2, "explicit log2 family size");
    add_common(graph, graph_args.common);
    graph->callback([&] { run_graph_bounds(graph_args); });
    bounds->callback([&] {
        if (bounds->get_subcommands().empty()) {
            if (bounds_args.n == 0) throw std::invalid_argument("need --n plus --m/--m-exp");
            run_bounds(bounds_args);
        }
    });

    Table1Args table_args;
    auto* table1 = app.add_subcommand("table1", "measured three-case comparison over an (n, m) grid");
    table1->add_option("--n", table_args.ns, "numbers of variables")->required();
    table1->add_option("--m", table_args.ms, "on-set sizes");
    table1->add_option("--m-exp", table_args.m_exps, "on-set sizes as 2^(alpha*n)");
    table1->add_option("--seed", table_args.seed, "RNG seed")->required();
    table1->add_option("--trials", table_args.trials, "runs per cell and case");
    add_common(table1, table_args.common);
    table1->callback([&] { run_table1(table_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
