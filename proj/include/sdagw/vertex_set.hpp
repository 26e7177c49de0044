#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace sdagw {

using Vertex = int;

// Fixed-capacity bitset over [0, capacity).
class VertexSet {
public:
    using Word = std::uint64_t;
    static constexpr int kBits = 64;

    VertexSet() = default;
    explicit VertexSet(int capacity) : n_(capacity), w_(words_for(capacity), 0) {}
    VertexSet(int capacity, std::initializer_list<Vertex> members) : VertexSet(capacity) {
        for (Vertex v : members) insert(v);
    }
    VertexSet(int capacity, const std::vector<Vertex>& members) : VertexSet(capacity) {
        for (Vertex v : members) insert(v);
    }

    static VertexSet full(int capacity) {
        VertexSet s(capacity);
        for (int v = 0; v < capacity; ++v) s.insert(v);
        return s;
    }
    static VertexSet single(int capacity, Vertex v) {
        VertexSet s(capacity);
        s.insert(v);
        return s;
    }

    int capacity() const { return n_; }

    void insert(Vertex v) {
        check(v);
        w_[v / kBits] |= Word{1} << (v % kBits);
    }
    void erase(Vertex v) {
        check(v);
        w_[v / kBits] &= ~(Word{1} << (v % kBits));
    }
    bool contains(Vertex v) const {
        if (v < 0 || v >= n_) return false;
        return (w_[v / kBits] >> (v % kBits)) & 1U;
    }

    int size() const {
        int c = 0;
        for (Word x : w_) c += std::popcount(x);
        return c;
    }
    bool empty() const {
        for (Word x : w_)
            if (x) return false;
        return true;
    }
    void clear() { std::fill(w_.begin(), w_.end(), 0); }

    // Smallest member, or -1.
    Vertex first() const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i]) return static_cast<Vertex>(i * kBits + std::countr_zero(w_[i]));
        return -1;
    }

    bool subset_of(const VertexSet& o) const {
        same(o);
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }
    bool intersects(const VertexSet& o) const {
        same(o);
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & o.w_[i]) return true;
        return false;
    }

    VertexSet& operator|=(const VertexSet& o) {
        same(o);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    VertexSet& operator&=(const VertexSet& o) {
        same(o);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    VertexSet& operator-=(const VertexSet& o) {
        same(o);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
        return *this;
    }
    VertexSet& operator^=(const VertexSet& o) {
        same(o);
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }
    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
    friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
    friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }
    friend VertexSet operator^(VertexSet a, const VertexSet& b) { return a ^= b; }

    VertexSet complement() const {
        VertexSet c = full(n_);
        return c -= *this;
    }

    friend bool operator==(const VertexSet& a, const VertexSet& b) {
        return a.n_ == b.n_ && std::equal(a.w_.begin(), a.w_.end(), b.w_.begin(), b.w_.end());
    }

    // Lexicographic order on the ascending member sequences.
    friend bool lex_less(const VertexSet& a, const VertexSet& b) {
        a.same(b);
        for (std::size_t i = 0; i < a.w_.size(); ++i) {
            Word x = a.w_[i], y = b.w_[i];
            if (x == y) continue;
            Word diff = x ^ y;
            Word low = diff & (~diff + 1);
            // The first differing vertex is a member of exactly one set.
            if (x & low) {
                // a has it: a is smaller unless b ran out first (b has no element
                // at or above this position).
                Word above_b = y & ~(low - 1);
                if (above_b) return true;
                for (std::size_t j = i + 1; j < a.w_.size(); ++j)
                    if (b.w_[j]) return true;
                return false;
            }
            Word above_a = x & ~(low - 1);
            if (above_a) return false;
            for (std::size_t j = i + 1; j < a.w_.size(); ++j)
                if (a.w_[j]) return false;
            return true;
        }
        return false;
    }

    // Total order usable as a map key (word-wise, not lexicographic).
    friend bool operator<(const VertexSet& a, const VertexSet& b) {
        if (a.n_ != b.n_) return a.n_ < b.n_;
        return std::lexicographical_compare(a.w_.rbegin(), a.w_.rend(), b.w_.rbegin(), b.w_.rend());
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            Word x = w_[i];
            while (x) {
                int b = std::countr_zero(x);
                f(static_cast<Vertex>(i * kBits + b));
                x &= x - 1;
            }
        }
    }

    std::vector<Vertex> to_vector() const {
        std::vector<Vertex> out;
        out.reserve(static_cast<std::size_t>(size()));
        for_each([&](Vertex v) { out.push_back(v); });
        return out;
    }

    std::string to_string() const {
        std::string s = "{";
        bool first = true;
        for_each([&](Vertex v) {
            if (!first) s += ",";
            s += std::to_string(v);
            first = false;
        });
        return s + "}";
    }

    std::size_t hash() const {
        std::size_t h = static_cast<std::size_t>(n_) * 0x9e3779b97f4a7c15ULL;
        for (Word x : w_) h ^= std::hash<Word>{}(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }

    const Word* words() const { return w_.data(); }
    std::size_t word_count() const { return w_.size(); }

private:
    static std::size_t words_for(int n) { return static_cast<std::size_t>((n + kBits - 1) / kBits); }
    void check(Vertex v) const {
        if (v < 0 || v >= n_) throw std::out_of_range("vertex " + std::to_string(v) + " outside [0," + std::to_string(n_) + ")");
    }
    void same(const VertexSet& o) const {
        if (n_ != o.n_) throw std::invalid_argument("vertex sets over different universes");
    }

    int n_ = 0;
    boost::container::small_vector<Word, 2> w_;
};

struct VertexSetHash {
    std::size_t operator()(const VertexSet& s) const { return s.hash(); }
};

// Calls f on every subset of `base` with at most `max_size` members, in
// order of increasing size and lexicographically within a size.
template <class F>
void for_each_subset_upto(const VertexSet& base, int max_size, F&& f) {
    std::vector<Vertex> items = base.to_vector();
    const int m = static_cast<int>(items.size());
    const int top = std::min(max_size, m);
    VertexSet cur(base.capacity());
    std::vector<int> idx;
    for (int s = 0; s <= top; ++s) {
        idx.assign(static_cast<std::size_t>(s), 0);
        for (int i = 0; i < s; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            cur.clear();
            for (int i : idx) cur.insert(items[static_cast<std::size_t>(i)]);
            f(cur);
            int i = s - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - s + i) --i;
            if (i < 0) break;
            ++idx[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < s; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
}

}  // namespace sdagw
