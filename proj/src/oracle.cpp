#include "qcd/oracle.hpp"

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace qcd {

namespace {

struct SimplexKeyHash {
    size_t operator()(const std::array<int, 4>& k) const {
        size_t h = 14695981039346656037ull;
        for (int x : k) {
            h ^= static_cast<size_t>(static_cast<unsigned>(x));
            h *= 1099511628211ull;
        }
        return h;
    }
};

// Bit-packed Z2 column.
using Column = std::vector<uint64_t>;

void set_bit(Column& c, int row) { c[row >> 6] ^= (uint64_t(1) << (row & 63)); }

int top_bit(const Column& c) {
    for (int w = static_cast<int>(c.size()) - 1; w >= 0; --w)
        if (c[w]) return (w << 6) + 63 - __builtin_clzll(c[w]);
    return -1;
}

void column_xor(Column& a, const Column& b) {
    for (size_t w = 0; w < a.size(); ++w) a[w] ^= b[w];
}

// Rank of a Z2 matrix given as columns over `rows` rows.
int z2_rank(std::vector<Column>& cols) {
    std::unordered_map<int, int> pivot_col;  // pivot row -> column index
    int rank = 0;
    for (size_t j = 0; j < cols.size(); ++j) {
        int p = top_bit(cols[j]);
        while (p >= 0) {
            auto it = pivot_col.find(p);
            if (it == pivot_col.end()) break;
            column_xor(cols[j], cols[it->second]);
            p = top_bit(cols[j]);
        }
        if (p >= 0) {
            pivot_col.emplace(p, static_cast<int>(j));
            ++rank;
        }
    }
    return rank;
}

}  // namespace

BettiTriple betti_at(const Filtration& f, double eps, int max_simplices) {
    // Simplices of the restricted complex, grouped by dimension.
    std::vector<std::array<int, 4>> simp[4];
    int total = 0;
    for (const Simplex& s : f.simplices) {
        if (s.value > eps) continue;
        simp[s.dim].push_back(s.v);
        if (++total > max_simplices)
            throw ComplexTooLarge("restricted complex exceeds " +
                                  std::to_string(max_simplices) + " simplices");
    }

    // Row index of each (q-1)-simplex for the boundary matrix of degree q.
    auto rank_boundary = [&](int q) -> int {
        if (simp[q].empty() || q == 0) return 0;
        std::unordered_map<std::array<int, 4>, int, SimplexKeyHash> row_of;
        row_of.reserve(simp[q - 1].size() * 2);
        for (size_t i = 0; i < simp[q - 1].size(); ++i)
            row_of.emplace(simp[q - 1][i], static_cast<int>(i));

        const int rows = static_cast<int>(simp[q - 1].size());
        const int words = (rows + 63) >> 6;
        std::vector<Column> cols;
        cols.reserve(simp[q].size());
        for (const auto& v : simp[q]) {
            Column col(words, 0);
            for (int drop = 0; drop <= q; ++drop) {
                std::array<int, 4> face{{-1, -1, -1, -1}};
                int w = 0;
                for (int i = 0; i <= q; ++i)
                    if (i != drop) face[w++] = v[i];
                set_bit(col, row_of.at(face));
            }
            cols.push_back(std::move(col));
        }
        return z2_rank(cols);
    };

    const int n0 = static_cast<int>(simp[0].size());
    const int n1 = static_cast<int>(simp[1].size());
    const int n2 = static_cast<int>(simp[2].size());
    const int r1 = rank_boundary(1);
    const int r2 = rank_boundary(2);
    const int r3 = rank_boundary(3);

    BettiTriple b;
    b.b0 = n0 - r1;
    b.b1 = (n1 - r1) - r2;
    b.b2 = (n2 - r2) - r3;
    return b;
}

}  // namespace qcd
