#include "valiron/multiindex.hpp"

#include "valiron/errors.hpp"

namespace valiron {

std::string MultiIndex::str() const {
    std::string s = "(";
    for (size_t i = 0; i < e.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(e[i]);
    }
    return s + ")";
}

namespace {
void emit_level(size_t pos, uint64_t remaining, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (pos + 1 == cur.e.size()) {
        cur.e[pos] = static_cast<uint32_t>(remaining);
        out.push_back(cur);
        return;
    }
    // graded-lex descending in the leading entry matches the map order used
    // throughout (std::vector lex compare on equal degree)
    for (uint64_t v = 0; v <= remaining; ++v) {
        cur.e[pos] = static_cast<uint32_t>(v);
        emit_level(pos + 1, remaining - v, cur, out);
    }
}
}  // namespace

std::vector<MultiIndex> level_indices(size_t n, uint64_t q) {
    if (n == 0) throw domain_error("multi-index needs n >= 1");
    std::vector<MultiIndex> out;
    MultiIndex cur(n);
    emit_level(0, q, cur, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<MultiIndex> indices_up_to(size_t n, uint64_t q_max) {
    std::vector<MultiIndex> out;
    for (uint64_t q = 0; q <= q_max; ++q) {
        auto lv = level_indices(n, q);
        out.insert(out.end(), lv.begin(), lv.end());
    }
    return out;
}

Rat multi_choose(unsigned long n, unsigned long q) {
    if (n == 0) throw domain_error("multi_choose needs n >= 1");
    Rat r;
    mpz_bin_uiui(mpq_numref(r.raw()), n + q - 1, q);
    return r;
}

BigFloat ln_multi_choose(unsigned long n, unsigned long q) {
    if (n == 0) throw domain_error("multi_choose needs n >= 1");
    return ln_factorial(n + q - 1) - ln_factorial(q) - ln_factorial(n - 1);
}

}  // namespace valiron
