#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "onsetqlab/boolfn.hpp"

namespace oql {

enum class Side { A, B };

// Weighted relation between a zero-side list A (f=0) and a one-side list B
// (f=1). Per-element totals and per-position restricted totals are built once
// so the ratio queries are O(1).
class AdversaryRelation {
public:
    AdversaryRelation(BooleanFunction f,
                      std::vector<BitString> a_side,
                      std::vector<BitString> b_side,
                      std::vector<std::tuple<std::size_t, std::size_t, double>> weights)
        : f_(std::move(f)), a_(std::move(a_side)), b_(std::move(b_side)), w_(std::move(weights)) {
        int n = f_.arity();
        for (std::size_t i = 0; i < a_.size(); ++i) {
            if (a_[i].length() != n || f_.value(a_[i])) throw std::invalid_argument("AdversaryRelation: A-side member not in the off-set");
            a_index_[a_[i].value()] = i;
        }
        for (std::size_t j = 0; j < b_.size(); ++j) {
            if (b_[j].length() != n || !f_.value(b_[j])) throw std::invalid_argument("AdversaryRelation: B-side member not in the on-set");
            b_index_[b_[j].value()] = j;
        }
        a_total_.assign(a_.size(), 0.0);
        b_total_.assign(b_.size(), 0.0);
        a_diff_.assign(a_.size(), std::vector<double>(n, 0.0));
        b_diff_.assign(b_.size(), std::vector<double>(n, 0.0));
        for (const auto& [ai, bj, wv] : w_) {
            if (ai >= a_.size() || bj >= b_.size()) throw std::invalid_argument("AdversaryRelation: weight index out of range");
            if (wv < 0) throw std::invalid_argument("AdversaryRelation: negative weight");
            if (wv == 0) continue;
            a_total_[ai] += wv;
            b_total_[bj] += wv;
            std::uint64_t diff = a_[ai].value() ^ b_[bj].value();
            while (diff) {
                int bit = std::countr_zero(diff);
                diff &= diff - 1;
                int pos = n - 1 - bit;
                a_diff_[ai][pos] += wv;
                b_diff_[bj][pos] += wv;
            }
        }
    }

    const BooleanFunction& function() const { return f_; }
    const std::vector<BitString>& side(Side s) const { return s == Side::A ? a_ : b_; }
    const std::vector<std::tuple<std::size_t, std::size_t, double>>& weights() const { return w_; }

    double theta(Side s, const BitString& element, int i) const {
        const auto& index = (s == Side::A) ? a_index_ : b_index_;
        auto it = index.find(element.value());
        if (it == index.end() || side(s)[it->second] != element)
            throw std::invalid_argument("theta: element not on the stated side");
        return theta_by_index(s, it->second, i);
    }

    double theta_by_index(Side s, std::size_t e, int i) const {
        if (i < 0 || i >= f_.arity()) throw std::out_of_range("theta: position");
        double total = (s == Side::A) ? a_total_[e] : b_total_[e];
        if (total <= 0) throw std::domain_error("theta: element has zero total weight");
        double restricted = (s == Side::A) ? a_diff_[e][i] : b_diff_[e][i];
        return restricted / total;
    }

private:
    BooleanFunction f_;
    std::vector<BitString> a_, b_;
    std::vector<std::tuple<std::size_t, std::size_t, double>> w_;
    std::unordered_map<std::uint64_t, std::size_t> a_index_, b_index_;
    std::vector<double> a_total_, b_total_;
    std::vector<std::vector<double>> a_diff_, b_diff_;
};

namespace detail {

template <typename Combine>
double adversary_extremum(const AdversaryRelation& rel, Combine combine) {
    int n = rel.function().arity();
    double best = -1.0;
    for (const auto& [ai, bj, wv] : rel.weights()) {
        if (wv <= 0) continue;
        std::uint64_t diff = rel.side(Side::A)[ai].value() ^ rel.side(Side::B)[bj].value();
        while (diff) {
            int bit = std::countr_zero(diff);
            diff &= diff - 1;
            int pos = n - 1 - bit;
            best = std::max(best, combine(rel.theta_by_index(Side::A, ai, pos),
                                          rel.theta_by_index(Side::B, bj, pos)));
        }
    }
    if (best < 0) throw std::domain_error("adversary extremum: relation has no positive-weight pair");
    return best;
}

} // namespace detail

// Largest geometric mean of the two ratio profiles over related pairs and
// differing positions; 1/v_geom is the quantum query floor.
inline double v_geom(const AdversaryRelation& rel) {
    return detail::adversary_extremum(rel, [](double ta, double tb) { return std::sqrt(ta * tb); });
}

// Same extremum with min instead of the geometric mean; 1/v_min is the
// randomized query floor.
inline double v_min(const AdversaryRelation& rel) {
    return detail::adversary_extremum(rel, [](double ta, double tb) { return std::min(ta, tb); });
}

// Unit weights between adjacent Hamming shells: A at weight k+1 (off-set),
// B at weight k (on-set), related exactly at Hamming distance 1.
inline AdversaryRelation hamming_slice_relation(int n, int k, const BooleanFunction& f) {
    if (f.arity() != n) throw std::invalid_argument("hamming_slice_relation: arity mismatch");
    if (k < 0 || k >= n) throw std::invalid_argument("hamming_slice_relation: k out of range");
    std::vector<BitString> a_side, b_side;
    std::unordered_map<std::uint64_t, std::size_t> b_index;
    for (std::uint64_t idx = 0; idx < f.domain_size(); ++idx) {
        int w = std::popcount(idx);
        if (w == k + 1) {
            if (f.value(idx)) throw std::invalid_argument("hamming_slice_relation: weight k+1 string inside the on-set");
            a_side.emplace_back(n, idx);
        } else if (w == k) {
            if (!f.value(idx)) throw std::invalid_argument("hamming_slice_relation: weight k string outside the on-set");
            b_index[idx] = b_side.size();
            b_side.emplace_back(n, idx);
        }
    }
    std::vector<std::tuple<std::size_t, std::size_t, double>> weights;
    for (std::size_t ai = 0; ai < a_side.size(); ++ai) {
        std::uint64_t av = a_side[ai].value();
        std::uint64_t ones = av;
        while (ones) {
            std::uint64_t low = ones & (0 - ones);
            ones ^= low;
            weights.emplace_back(ai, b_index.at(av ^ low), 1.0);
        }
    }
    return AdversaryRelation(f, std::move(a_side), std::move(b_side), std::move(weights));
}

} // namespace oql
