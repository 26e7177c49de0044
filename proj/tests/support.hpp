#pragma once

#include <random>
#include <string>
#include <vector>

#include <sdagw/digraph.hpp>

namespace sdagw::testing {

// Mixed random digraphs with 1..max_n vertices, reproducible from `seed`.
inline std::vector<Digraph> random_corpus(int count, int max_n, std::uint64_t seed) {
    static const char* models[] = {"erdos(0.2)", "erdos(0.35)", "erdos(0.5)", "dag(0.4)",
                                   "banded(1)",  "banded(2)",   "cycle",      "path"};
    std::mt19937_64 rng(seed);
    std::vector<Digraph> out;
    for (int i = 0; i < count; ++i) {
        int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_n));
        const char* model = models[rng() % std::size(models)];
        out.push_back(gen_digraph(model, n, rng()));
    }
    return out;
}

inline VertexSet mask_set(int n, unsigned mask) {
    VertexSet s(n);
    for (Vertex v = 0; v < n; ++v)
        if (mask >> v & 1U) s.insert(v);
    return s;
}

}  // namespace sdagw::testing
