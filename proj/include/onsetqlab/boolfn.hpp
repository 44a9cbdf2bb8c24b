#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "onsetqlab/bitstring.hpp"
#include "onsetqlab/rng.hpp"

namespace oql {

// Explicit-table representation caps the arity; larger N is supported only by
// the on-set samplers that never materialize a table.
inline constexpr int kTableArityMax = 28;

// Total Boolean function on {0,1}^N stored as a flat 2^N-bit table.
// Table bit index = integer value of the input with x1 as most significant
// bit, so a prefix cube occupies a contiguous index range.
class BooleanFunction {
public:
    BooleanFunction(int arity, std::vector<std::uint64_t> table_words, std::uint64_t onset_size)
        : arity_(arity), words_(std::move(table_words)), onset_size_(onset_size) {}

    static BooleanFunction from_onset(int arity, const std::vector<BitString>& onset) {
        check_arity(arity);
        if (onset.empty()) throw std::invalid_argument("from_onset: empty on-set");
        std::vector<std::uint64_t> words(word_count(arity), 0);
        for (const BitString& x : onset) {
            if (x.length() != arity) throw std::invalid_argument("from_onset: length mismatch");
            std::uint64_t idx = x.value();
            std::uint64_t mask = std::uint64_t{1} << (idx & 63u);
            if (words[idx >> 6] & mask) throw std::invalid_argument("from_onset: duplicate element");
            words[idx >> 6] |= mask;
        }
        return BooleanFunction(arity, std::move(words), onset.size());
    }

    static BooleanFunction from_onset_values(int arity, const std::vector<std::uint64_t>& onset) {
        check_arity(arity);
        if (onset.empty()) throw std::invalid_argument("from_onset: empty on-set");
        std::vector<std::uint64_t> words(word_count(arity), 0);
        for (std::uint64_t idx : onset) {
            if (arity < 64 && (idx >> arity) != 0) throw std::invalid_argument("from_onset: value out of range");
            std::uint64_t mask = std::uint64_t{1} << (idx & 63u);
            if (words[idx >> 6] & mask) throw std::invalid_argument("from_onset: duplicate element");
            words[idx >> 6] |= mask;
        }
        return BooleanFunction(arity, std::move(words), onset.size());
    }

    int arity() const { return arity_; }
    std::uint64_t onset_size() const { return onset_size_; }
    std::uint64_t domain_size() const { return std::uint64_t{1} << arity_; }

    bool value(std::uint64_t idx) const { return (words_[idx >> 6] >> (idx & 63u)) & 1u; }
    bool value(const BitString& x) const {
        if (x.length() != arity_) throw std::invalid_argument("BooleanFunction::value: length mismatch");
        return value(x.value());
    }

    std::vector<BitString> onset() const {
        std::vector<BitString> out;
        out.reserve(onset_size_);
        for (std::uint64_t idx = 0; idx < domain_size(); ++idx)
            if (value(idx)) out.emplace_back(arity_, idx);
        return out;
    }

    std::vector<std::uint64_t> onset_values() const {
        std::vector<std::uint64_t> out;
        out.reserve(onset_size_);
        for (std::uint64_t idx = 0; idx < domain_size(); ++idx)
            if (value(idx)) out.push_back(idx);
        return out;
    }

    const std::vector<std::uint64_t>& table_words() const { return words_; }

    friend bool operator==(const BooleanFunction& a, const BooleanFunction& b) {
        return a.arity_ == b.arity_ && a.words_ == b.words_;
    }

private:
    static void check_arity(int arity) {
        if (arity < 1 || arity > kTableArityMax) throw std::invalid_argument("BooleanFunction: arity out of range");
    }
    static std::size_t word_count(int arity) {
        return arity <= 6 ? 1 : (std::size_t{1} << (arity - 6));
    }

    int arity_;
    std::vector<std::uint64_t> words_;
    std::uint64_t onset_size_;
};

namespace detail {

inline std::uint64_t binom_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

} // namespace detail

// m distinct values drawn uniformly from [0, 2^n), sorted ascending.
// Floyd's sampling: for j descending from the top of the range toward the
// start, each accepted value stays uniform without building the full range,
// which keeps n = 64 usable.
inline std::vector<std::uint64_t> sample_onset(int n, std::uint64_t m, Rng& rng) {
    if (n < 1 || n > 64) throw std::invalid_argument("sample_onset: arity out of range");
    bool full_width = (n == 64);
    std::uint64_t range_minus_1 = full_width ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    if (m == 0 || (!full_width && m > range_minus_1 + 1)) throw std::invalid_argument("sample_onset: m out of range");
    std::vector<std::uint64_t> chosen;
    chosen.reserve(m);
    // j runs over the last m values of the range: range - m .. range - 1.
    std::uint64_t j = range_minus_1 - m + 1;
    for (std::uint64_t i = 0; i < m; ++i, ++j) {
        std::uint64_t t = rng.in_range(0, j);
        bool hit = std::find(chosen.begin(), chosen.end(), t) != chosen.end();
        chosen.push_back(hit ? j : t);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

// Uniform draw from the family of N-variable functions with exactly M ones,
// restricted per the family definition to 1 <= M <= 2^(N-1).
inline BooleanFunction sample_uniform_fnm(int arity, std::uint64_t m, Rng& rng) {
    if (arity < 1 || arity > kTableArityMax) throw std::invalid_argument("sample_uniform_fnm: arity out of range");
    if (m < 1 || m > (std::uint64_t{1} << (arity - 1))) throw std::invalid_argument("sample_uniform_fnm: m out of range");
    return BooleanFunction::from_onset_values(arity, sample_onset(arity, m, rng));
}

inline BooleanFunction sample_uniform_fnm(int arity, std::uint64_t m, std::uint64_t seed) {
    Rng rng(seed);
    return sample_uniform_fnm(arity, m, rng);
}

// Streams every m-element on-set of [0, 2^n) once, in lexicographic order of
// the sorted value tuple. Caller is responsible for C(2^n, m) being sane.
class OnsetEnumerator {
public:
    OnsetEnumerator(int n, std::uint64_t m) : n_(n), m_(m) {
        if (n < 1 || n > 62) throw std::invalid_argument("OnsetEnumerator: arity out of range");
        std::uint64_t domain = std::uint64_t{1} << n;
        if (m < 1 || m > domain) throw std::invalid_argument("OnsetEnumerator: m out of range");
        current_.resize(m);
        for (std::uint64_t i = 0; i < m; ++i) current_[i] = i;
        fresh_ = true;
    }

    std::optional<std::vector<std::uint64_t>> next() {
        std::uint64_t domain = std::uint64_t{1} << n_;
        if (fresh_) {
            fresh_ = false;
            return current_;
        }
        // standard combination odometer
        std::uint64_t k = m_;
        std::uint64_t i = k;
        while (i > 0 && current_[i - 1] == domain - k + (i - 1)) --i;
        if (i == 0) return std::nullopt;
        ++current_[i - 1];
        for (std::uint64_t j = i; j < k; ++j) current_[j] = current_[j - 1] + 1;
        return current_;
    }

private:
    int n_;
    std::uint64_t m_;
    std::vector<std::uint64_t> current_;
    bool fresh_;
};

class FnmEnumerator {
public:
    FnmEnumerator(int arity, std::uint64_t m) : arity_(arity), inner_(arity, m) {
        if (arity > kTableArityMax) throw std::invalid_argument("FnmEnumerator: arity out of range");
    }

    std::optional<BooleanFunction> next() {
        auto vals = inner_.next();
        if (!vals) return std::nullopt;
        return BooleanFunction::from_onset_values(arity_, *vals);
    }

private:
    int arity_;
    OnsetEnumerator inner_;
};

// On-set = the prefix cube {0,1}^L 0^(N-L) with L = floor(log2 M); when M is
// not a power of two, the extra Delta = M - 2^L elements are y,1,0^(N-L-1)
// for y = 0 .. Delta-1 read as L-bit prefixes.
inline BooleanFunction subcube_function(int arity, std::uint64_t m) {
    if (arity < 1 || arity > kTableArityMax) throw std::invalid_argument("subcube_function: arity out of range");
    if (m < 1 || m > (std::uint64_t{1} << (arity - 1))) throw std::invalid_argument("subcube_function: m out of range");
    int L = std::bit_width(m) - 1;
    std::vector<std::uint64_t> onset;
    onset.reserve(m);
    std::uint64_t cube = std::uint64_t{1} << L;
    for (std::uint64_t y = 0; y < cube; ++y) onset.push_back(y << (arity - L));
    std::uint64_t delta = m - cube;
    for (std::uint64_t y = 0; y < delta; ++y)
        onset.push_back((y << (arity - L)) | (std::uint64_t{1} << (arity - L - 1)));
    return BooleanFunction::from_onset_values(arity, onset);
}

// On-set = every string of weight <= k, where k is the largest threshold with
// that count <= M, padded up to M with the lexicographically smallest strings
// of weight >= k+2. Weight k+1 strings stay in the off-set by construction.
inline BooleanFunction threshold_padded_function(int arity, std::uint64_t m) {
    if (arity < 1 || arity > kTableArityMax) throw std::invalid_argument("threshold_padded_function: arity out of range");
    if (m < 1 || m > (std::uint64_t{1} << arity)) throw std::invalid_argument("threshold_padded_function: m out of range");
    int k = 0;
    std::uint64_t count = 1;
    while (k + 1 <= arity && count + detail::binom_u64(arity, k + 1) <= m)
        count += detail::binom_u64(arity, ++k);
    std::vector<std::uint64_t> onset;
    onset.reserve(m);
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << arity); ++idx)
        if (std::popcount(idx) <= k) onset.push_back(idx);
    std::uint64_t pad = m - count;
    for (std::uint64_t idx = 0; pad > 0 && idx < (std::uint64_t{1} << arity); ++idx) {
        if (std::popcount(idx) >= k + 2) {
            onset.push_back(idx);
            --pad;
        }
    }
    if (pad != 0) throw std::runtime_error("threshold_padded_function: not enough high-weight strings to pad");
    return BooleanFunction::from_onset_values(arity, onset);
}

inline int threshold_index(int arity, std::uint64_t m) {
    int k = 0;
    std::uint64_t count = 1;
    while (k + 1 <= arity && count + detail::binom_u64(arity, k + 1) <= m)
        count += detail::binom_u64(arity, ++k);
    return k;
}

// Table file: "n=<N>" then one line of hex, most significant nibble first.
// Bit i of the table (f at input index i) sits at hex-bit position i.
inline void write_table(std::ostream& os, const BooleanFunction& f) {
    os << "n=" << f.arity() << "\n";
    std::uint64_t bits = f.domain_size();
    std::uint64_t digits = (bits + 3) / 4;
    std::string hex(digits, '0');
    static const char* kDigits = "0123456789abcdef";
    for (std::uint64_t d = 0; d < digits; ++d) {
        unsigned nibble = 0;
        for (int b = 3; b >= 0; --b) {
            std::uint64_t idx = 4 * (digits - 1 - d) + static_cast<std::uint64_t>(b);
            nibble = (nibble << 1) | (idx < bits && f.value(idx) ? 1u : 0u);
        }
        hex[d] = kDigits[nibble];
    }
    os << hex << "\n";
}

inline BooleanFunction read_table(std::istream& is) {
    std::string header, hex;
    if (!std::getline(is, header) || header.rfind("n=", 0) != 0)
        throw std::runtime_error("read_table: expected 'n=<N>' header");
    int arity = std::stoi(header.substr(2));
    if (arity < 1 || arity > kTableArityMax) throw std::runtime_error("read_table: arity out of range");
    if (!std::getline(is, hex)) throw std::runtime_error("read_table: missing table line");
    std::uint64_t bits = std::uint64_t{1} << arity;
    std::uint64_t digits = (bits + 3) / 4;
    if (hex.size() != digits) throw std::runtime_error("read_table: table width mismatch");
    std::vector<std::uint64_t> words(arity <= 6 ? 1 : (std::size_t{1} << (arity - 6)), 0);
    std::uint64_t ones = 0;
    for (std::uint64_t d = 0; d < digits; ++d) {
        char c = hex[d];
        unsigned v;
        if (c >= '0' && c <= '9') v = static_cast<unsigned>(c - '0');
        else if (c >= 'a' && c <= 'f') v = static_cast<unsigned>(c - 'a') + 10;
        else if (c >= 'A' && c <= 'F') v = static_cast<unsigned>(c - 'A') + 10;
        else throw std::runtime_error("read_table: bad hex digit");
        for (int b = 0; b < 4; ++b) {
            if (!((v >> b) & 1u)) continue;
            std::uint64_t idx = 4 * (digits - 1 - d) + static_cast<std::uint64_t>(b);
            if (idx >= bits) throw std::runtime_error("read_table: bit beyond table");
            words[idx >> 6] |= std::uint64_t{1} << (idx & 63u);
            ++ones;
        }
    }
    return BooleanFunction(arity, std::move(words), ones);
}

} // namespace oql
