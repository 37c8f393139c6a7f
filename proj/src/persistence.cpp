#include "qcd/persistence.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

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

// XOR of two sorted index columns (symmetric difference over Z2).
std::vector<int> column_xor(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) out.push_back(a[i++]);
        else if (b[j] < a[i]) out.push_back(b[j++]);
        else { ++i; ++j; }
    }
    out.insert(out.end(), a.begin() + i, a.end());
    out.insert(out.end(), b.begin() + j, b.end());
    return out;
}

void sort_intervals(Barcode& pb) {
    std::sort(pb.intervals.begin(), pb.intervals.end(), [](const Interval& x, const Interval& y) {
        return x.birth != y.birth ? x.birth < y.birth : x.death < y.death;
    });
}

}  // namespace

BarcodeSet reduce(const Filtration& f) {
    const int n = static_cast<int>(f.simplices.size());

    // Global order index per simplex tuple (the filtration is sorted).
    std::unordered_map<std::array<int, 4>, int, SimplexKeyHash> index;
    index.reserve(n * 2);
    for (int i = 0; i < n; ++i) index.emplace(f.simplices[i].v, i);

    std::vector<int> by_dim_count(4, 0);
    for (const Simplex& s : f.simplices) ++by_dim_count[s.dim];
    int top_dim = 3;
    while (top_dim > 0 && by_dim_count[top_dim] == 0) --top_dim;

    std::vector<char> cleared(n, 0);   // known-zero columns (paired creators)
    std::vector<char> positive(n, 0);  // creators of a class in their degree
    std::vector<std::pair<int, int>> pairs;  // (birth simplex, death simplex)

    for (int q = top_dim; q >= 1; --q) {
        std::unordered_map<int, std::vector<int>> reduced_by_pivot;
        for (int j = 0; j < n; ++j) {
            const Simplex& s = f.simplices[j];
            if (s.dim != q) continue;
            if (cleared[j]) {  // clearing: pivot of the (q+1)-pass, already paired
                positive[j] = 1;
                continue;
            }
            std::vector<int> col;
            col.reserve(q + 1);
            for (int drop = 0; drop <= q; ++drop) {
                std::array<int, 4> face{{-1, -1, -1, -1}};
                int w = 0;
                for (int i = 0; i <= q; ++i)
                    if (i != drop) face[w++] = s.v[i];
                col.push_back(index.at(face));
            }
            std::sort(col.begin(), col.end());

            while (!col.empty()) {
                auto it = reduced_by_pivot.find(col.back());
                if (it == reduced_by_pivot.end()) break;
                col = column_xor(col, it->second);
            }
            if (col.empty()) {
                positive[j] = 1;
            } else {
                const int pivot = col.back();
                reduced_by_pivot.emplace(pivot, std::move(col));
                cleared[pivot] = 1;
                pairs.emplace_back(pivot, j);
            }
        }
    }

    BarcodeSet out;
    auto barcode_of = [&](int degree) -> Barcode* {
        switch (degree) {
            case 0: return &out.pb0;
            case 1: return &out.pb1;
            case 2: return &out.pb2;
            default: return nullptr;
        }
    };

    for (const auto& [bi, di] : pairs) {
        const double birth = f.simplices[bi].value;
        const double death = f.simplices[di].value;
        if (birth == death) continue;  // simultaneous insertion, no topology
        if (Barcode* pb = barcode_of(f.simplices[bi].dim))
            pb->intervals.push_back({birth, death});
    }
    for (int i = 0; i < n; ++i) {
        const int q = f.simplices[i].dim;
        const bool creator = (q == 0) || positive[i];
        if (creator && !cleared[i])
            if (Barcode* pb = barcode_of(q))
                pb->intervals.push_back({f.simplices[i].value, kInfDeath});
    }

    sort_intervals(out.pb0);
    sort_intervals(out.pb1);
    sort_intervals(out.pb2);
    std::tie(out.pb1_finite, out.pb1_inf) = decompose_pb1(out.pb1);

    if (f.max_dim < 3) {
        out.pb2_complete = false;
        out.warnings.push_back("pb2 incomplete: filtration built with max_dim < 3, "
                               "degree-2 deaths unavailable");
    }
    for (const Interval& iv : out.pb2.intervals) {
        if (iv.essential()) {
            out.warnings.push_back("essential degree-2 class; a larger max filtration "
                                   "value may close this void");
            break;
        }
    }
    return out;
}

std::pair<Barcode, Barcode> decompose_pb1(const Barcode& pb1) {
    Barcode fin{1, {}}, inf{1, {}};
    for (const Interval& iv : pb1.intervals)
        (iv.essential() ? inf : fin).intervals.push_back(iv);
    return {fin, inf};
}

int betti_from_barcode(const Barcode& pb, double t) {
    int count = 0;
    for (const Interval& iv : pb.intervals)
        if (iv.birth <= t && t < iv.death) ++count;
    return count;
}

bool multiset_subset(const Barcode& inner, const Barcode& outer) {
    // Both are sorted by (birth, death); a merge scan suffices.
    auto before = [](const Interval& x, const Interval& y) {
        return x.birth != y.birth ? x.birth < y.birth : x.death < y.death;
    };
    size_t j = 0;
    for (const Interval& iv : inner.intervals) {
        while (j < outer.intervals.size() && before(outer.intervals[j], iv)) ++j;
        if (j >= outer.intervals.size() || !(outer.intervals[j] == iv)) return false;
        ++j;
    }
    return true;
}

bool multiset_equal(const Barcode& a, const Barcode& b) {
    return a.intervals == b.intervals;
}

namespace {

std::string interval_json(const Interval& iv) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", iv.birth);
    std::string out = std::string("[") + buf + ",";
    if (iv.essential()) {
        out += "\"inf\"";
    } else {
        std::snprintf(buf, sizeof(buf), "%.17g", iv.death);
        out += buf;
    }
    return out + "]";
}

}  // namespace

std::string barcode_to_json(const Barcode& pb) {
    std::string out = "{\"degree\":" + std::to_string(pb.degree) + ",\"intervals\":[";
    for (size_t i = 0; i < pb.intervals.size(); ++i) {
        if (i) out += ",";
        out += interval_json(pb.intervals[i]);
    }
    return out + "]}";
}

std::string barcode_set_to_json(const BarcodeSet& bs) {
    std::string out = "{";
    out += "\"pb0\":" + barcode_to_json(bs.pb0);
    out += ",\"pb1\":" + barcode_to_json(bs.pb1);
    out += ",\"pb1_finite\":" + barcode_to_json(bs.pb1_finite);
    out += ",\"pb1_inf\":" + barcode_to_json(bs.pb1_inf);
    out += ",\"pb2\":" + barcode_to_json(bs.pb2);
    out += ",\"pb2_complete\":" + std::string(bs.pb2_complete ? "true" : "false");
    out += ",\"warnings\":[";
    for (size_t i = 0; i < bs.warnings.size(); ++i) {
        if (i) out += ",";
        out += "\"" + bs.warnings[i] + "\"";
    }
    return out + "]}";
}

}  // namespace qcd
