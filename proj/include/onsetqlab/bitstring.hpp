#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oql {

// Fixed-length binary string over variables x1..xN, N <= 64.
// Convention throughout the library: x1 is the most significant bit of
// value(), so the string "x1 x2 ... xN" read left to right is the binary
// expansion of value(). bit(0) is x1.
class BitString {
public:
    BitString() = default;

    BitString(int length, std::uint64_t value) : len_(length), val_(value) {
        if (length < 0 || length > 64) throw std::invalid_argument("BitString: length must be in [0,64]");
        if (length < 64 && (value >> length) != 0) throw std::invalid_argument("BitString: value wider than length");
    }

    static BitString parse(std::string_view s) {
        if (s.size() > 64) throw std::invalid_argument("BitString: string wider than 64 bits");
        std::uint64_t v = 0;
        for (char c : s) {
            if (c != '0' && c != '1') throw std::invalid_argument("BitString: expected only '0'/'1'");
            v = (v << 1) | static_cast<std::uint64_t>(c - '0');
        }
        return BitString(static_cast<int>(s.size()), v);
    }

    static BitString all_zero(int length) { return BitString(length, 0); }

    static BitString all_one(int length) {
        if (length < 0 || length > 64) throw std::invalid_argument("BitString: length must be in [0,64]");
        return BitString(length, length == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << length) - 1);
    }

    int length() const { return len_; }
    std::uint64_t value() const { return val_; }

    bool bit(int i) const {
        check_index(i);
        return (val_ >> (len_ - 1 - i)) & 1u;
    }

    BitString with_bit(int i, bool b) const {
        check_index(i);
        std::uint64_t m = std::uint64_t{1} << (len_ - 1 - i);
        return BitString(len_, b ? (val_ | m) : (val_ & ~m));
    }

    BitString flipped(int i) const {
        check_index(i);
        return BitString(len_, val_ ^ (std::uint64_t{1} << (len_ - 1 - i)));
    }

    int popcount() const { return std::popcount(val_); }

    // Contiguous window [from, from+count) as its own string, same bit order.
    BitString slice(int from, int count) const {
        if (from < 0 || count < 0 || from + count > len_) throw std::out_of_range("BitString::slice");
        if (count == 0) return BitString(0, 0);
        std::uint64_t v = val_ >> (len_ - from - count);
        if (count < 64) v &= (std::uint64_t{1} << count) - 1;
        return BitString(count, v);
    }

    std::string str() const {
        std::string s(static_cast<std::size_t>(len_), '0');
        for (int i = 0; i < len_; ++i)
            if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
        return s;
    }

    friend BitString operator^(const BitString& a, const BitString& b) {
        if (a.len_ != b.len_) throw std::invalid_argument("BitString: xor length mismatch");
        return BitString(a.len_, a.val_ ^ b.val_);
    }
    friend bool operator==(const BitString& a, const BitString& b) {
        return a.len_ == b.len_ && a.val_ == b.val_;
    }
    friend bool operator!=(const BitString& a, const BitString& b) { return !(a == b); }
    friend bool operator<(const BitString& a, const BitString& b) {
        return a.len_ != b.len_ ? a.len_ < b.len_ : a.val_ < b.val_;
    }

private:
    void check_index(int i) const {
        if (i < 0 || i >= len_) throw std::out_of_range("BitString: bit index");
    }

    int len_ = 0;
    std::uint64_t val_ = 0;
};

inline int hamming(const BitString& a, const BitString& b) {
    if (a.length() != b.length()) throw std::invalid_argument("hamming: length mismatch");
    return std::popcount(a.value() ^ b.value());
}

} // namespace oql
