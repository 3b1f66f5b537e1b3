#ifndef VALIRON_MULTIINDEX_HPP
#define VALIRON_MULTIINDEX_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "valiron/bigfloat.hpp"
#include "valiron/rational.hpp"

namespace valiron {

// n-variable multi-index. Ordered graded-lexicographically so that map
// iteration enumerates levels |alpha| = 0, 1, 2, ... in a fixed order.
struct MultiIndex {
    std::vector<uint32_t> e;

    MultiIndex() = default;
    explicit MultiIndex(size_t n) : e(n, 0) {}
    MultiIndex(std::initializer_list<uint32_t> init) : e(init) {}

    size_t n() const { return e.size(); }
    uint64_t degree() const {
        uint64_t s = 0;
        for (auto x : e) s += x;
        return s;
    }

    static MultiIndex unit(size_t n, size_t axis, uint32_t amount = 1) {
        MultiIndex m(n);
        m.e[axis] = amount;
        return m;
    }

    bool operator==(const MultiIndex& o) const { return e == o.e; }
    bool operator!=(const MultiIndex& o) const { return e != o.e; }
    bool operator<(const MultiIndex& o) const {
        uint64_t da = degree(), db = o.degree();
        if (da != db) return da < db;
        return e < o.e;  // lexicographic within a level
    }

    // componentwise partial order
    bool leq(const MultiIndex& o) const {
        if (e.size() != o.e.size()) return false;
        for (size_t i = 0; i < e.size(); ++i)
            if (e[i] > o.e[i]) return false;
        return true;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex r(*this);
        for (size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
        return r;
    }
    // requires o.leq(*this)
    MultiIndex operator-(const MultiIndex& o) const {
        MultiIndex r(*this);
        for (size_t i = 0; i < e.size(); ++i) r.e[i] -= o.e[i];
        return r;
    }

    Rat factorial_rat() const {          // alpha!
        Rat f(1);
        for (auto x : e) f *= Rat::factorial(x);
        return f;
    }
    BigFloat ln_factorial_bf() const {   // ln(alpha!)
        BigFloat s(0L);
        for (auto x : e) s += valiron::ln_factorial(x);
        return s;
    }

    std::string str() const;             // "(a,b,c)"
};

// All multi-indices with n entries and |alpha| = q, in the graded-lex order.
std::vector<MultiIndex> level_indices(size_t n, uint64_t q);
// All multi-indices with |alpha| <= q_max.
std::vector<MultiIndex> indices_up_to(size_t n, uint64_t q_max);

// nH_q = binom(n+q-1, q), exact; counts the multi-indices with |alpha| = q.
Rat multi_choose(unsigned long n, unsigned long q);
// ln nH_q for bound arithmetic at large q.
BigFloat ln_multi_choose(unsigned long n, unsigned long q);

}  // namespace valiron

#endif
