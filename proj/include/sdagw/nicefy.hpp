#pragma once

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdag.hpp"

namespace sdagw {

// Output size bound |T'| <= nicefy_size_factor * |T| * |V|.
inline constexpr int nicefy_size_factor = 4;

struct NicefyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace nicefy_detail {

// Copies every node of s and every arc not marked in `drop`.
inline SDag copy_without(const SDag& s, const std::vector<bool>& drop) {
    SDag out(s.universe());
    for (int t = 0; t < s.node_count(); ++t) out.add_node();
    for (int a = 0; a < s.arc_count(); ++a)
        if (!drop[static_cast<std::size_t>(a)]) out.add_arc(s.arc(a).from, s.arc(a).to, s.arc(a).sigma);
    return out;
}

// (i) one source with an empty bag: a binary tree over the old sources, or a
// fresh root above a single source, all arcs carrying the minimum separation.
inline SDag single_root(const SDag& s) {
    SDag out = s;
    const int n = s.universe();
    std::vector<int> level = s.sources();
    if (level.empty()) throw NicefyError("S-DAG has no source");
    if (level.size() == 1) {
        int r = out.add_node();
        out.add_arc(r, level[0], Separation::minimum(n));
        return out;
    }
    while (level.size() > 1) {
        std::vector<int> next;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
            int p = out.add_node();
            out.add_arc(p, level[i], Separation::minimum(n));
            out.add_arc(p, level[i + 1], Separation::minimum(n));
            next.push_back(p);
        }
        if (level.size() % 2) next.push_back(level.back());
        level = std::move(next);
    }
    return out;
}

// (ii) sigma(u,v) := topS(v).
inline SDag normalize_sigmas(const SDag& s) {
    SDagDerived der = derive(s);
    SDag out = s;
    for (int a = 0; a < s.arc_count(); ++a) out.set_sigma(a, der.top_sep(s.arc(a).to));
    return out;
}

inline bool has_bag_jump(const SDag& s) {
    SDagDerived der = derive(s);
    for (int t = 0; t < s.node_count(); ++t)
        if (s.out_arcs(t).size() == 1 && (der.bag_of(t) ^ der.bag_of(s.arc(s.out_arcs(t)[0]).to)).size() > 1) return true;
    return false;
}

// (iii) replaces each single-child pair (t,c) whose bags differ in l > 1
// vertices by a chain that removes bag(t)\bag(c) and then adds bag(c)\bag(t)
// one vertex at a time.
inline SDag expand_bag_jumps_once(const SDag& s) {
    SDagDerived der = derive(s);
    SDag out(s.universe());
    for (int t = 0; t < s.node_count(); ++t) out.add_node();

    // Arcs of s are re-added unless a chain replaces them; copies of shared
    // children receive the out-arcs of the original.
    std::vector<bool> replaced(static_cast<std::size_t>(s.arc_count()), false);
    struct Chain {
        int t, c, arc;
    };
    std::vector<Chain> chains;
    for (int t = 0; t < s.node_count(); ++t) {
        if (s.out_arcs(t).size() != 1) continue;
        int a = s.out_arcs(t)[0];
        int c = s.arc(a).to;
        if ((der.bag_of(t) ^ der.bag_of(c)).size() > 1) {
            replaced[static_cast<std::size_t>(a)] = true;
            chains.push_back({t, c, a});
        }
    }
    for (int a = 0; a < s.arc_count(); ++a)
        if (!replaced[static_cast<std::size_t>(a)]) out.add_arc(s.arc(a).from, s.arc(a).to, s.arc(a).sigma);

    for (const Chain& ch : chains) {
        const VertexSet& bt = der.bag_of(ch.t);
        const VertexSet& bc = der.bag_of(ch.c);
        std::vector<Vertex> u = (bt - bc).to_vector();
        std::vector<Vertex> w = (bc - bt).to_vector();
        const VertexSet b_top_t = der.top_sep(ch.t).b();
        const VertexSet a_bot_c = der.bot_sep(ch.c).a();
        const VertexSet a_tc = s.arc(ch.arc).sigma.a();
        const VertexSet uset = bt - bc;

        int target = ch.c;
        if (w.size() >= 2 && s.in_arcs(ch.c).size() > 1) {
            target = out.add_node();
            for (int oa : s.out_arcs(ch.c)) out.add_arc(target, s.arc(oa).to, s.arc(oa).sigma);
        }

        std::vector<Separation> steps;
        VertexSet b = b_top_t;
        for (Vertex x : u) {
            b.erase(x);
            steps.emplace_back(a_tc, b);
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
            VertexSet a = a_bot_c;
            for (std::size_t j = i; j < w.size(); ++j) a.erase(w[j]);
            steps.emplace_back(a, b_top_t - uset);
        }
        int prev = ch.t;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            int next = (i + 1 == steps.size()) ? target : out.add_node();
            out.add_arc(prev, next, steps[i]);
            prev = next;
        }
    }
    return out;
}

// Copies made for shared children may carry jumps of their own, so the
// rewrite repeats until none is left.
inline SDag expand_bag_jumps(SDag s) {
    while (has_bag_jump(s)) s = expand_bag_jumps_once(s);
    return s;
}

// (iv) splits each child c of a two-child node with topS(c) != botS(c) into
// c_top -> c_bot carrying topS(c).
inline SDag split_children(const SDag& s) {
    SDagDerived der = derive(s);
    std::vector<bool> split(static_cast<std::size_t>(s.node_count()), false);
    for (int t = 0; t < s.node_count(); ++t)
        if (s.out_arcs(t).size() == 2)
            for (int c : s.children(t))
                if (!(der.top_sep(c) == der.bot_sep(c))) split[static_cast<std::size_t>(c)] = true;

    // c keeps its id and becomes c_bot; c_top is new and takes the in-arcs.
    SDag out(s.universe());
    for (int t = 0; t < s.node_count(); ++t) out.add_node();
    std::vector<int> top_of(static_cast<std::size_t>(s.node_count()), -1);
    for (int c = 0; c < s.node_count(); ++c)
        if (split[static_cast<std::size_t>(c)]) top_of[static_cast<std::size_t>(c)] = out.add_node();
    for (const auto& e : s.arcs()) {
        int to = split[static_cast<std::size_t>(e.to)] ? top_of[static_cast<std::size_t>(e.to)] : e.to;
        out.add_arc(e.from, to, e.sigma);
    }
    for (int c = 0; c < s.node_count(); ++c)
        if (split[static_cast<std::size_t>(c)]) out.add_arc(top_of[static_cast<std::size_t>(c)], c, der.top_sep(c));
    return out;
}

// (v) drops the larger of two comparable sibling arcs, then deletes every
// source other than `root` that this creates, repeatedly.
inline SDag drop_laminar_siblings(const SDag& s, int root, int* new_root) {
    std::vector<bool> drop(static_cast<std::size_t>(s.arc_count()), false);
    for (int t = 0; t < s.node_count(); ++t) {
        const auto& oa = s.out_arcs(t);
        if (oa.size() != 2) continue;
        int a1 = oa[0], a2 = oa[1];
        if (s.arc(a1).to > s.arc(a2).to) std::swap(a1, a2);
        const Separation& s1 = s.arc(a1).sigma;
        const Separation& s2 = s.arc(a2).sigma;
        if (sep_leq(s1, s2))
            drop[static_cast<std::size_t>(a2)] = true;
        else if (sep_leq(s2, s1))
            drop[static_cast<std::size_t>(a1)] = true;
    }
    std::vector<int> indeg(static_cast<std::size_t>(s.node_count()), 0);
    for (int a = 0; a < s.arc_count(); ++a)
        if (!drop[static_cast<std::size_t>(a)]) ++indeg[static_cast<std::size_t>(s.arc(a).to)];
    std::vector<bool> keep(static_cast<std::size_t>(s.node_count()), true);
    std::deque<int> work;
    for (int t = 0; t < s.node_count(); ++t)
        if (t != root && indeg[static_cast<std::size_t>(t)] == 0) work.push_back(t);
    while (!work.empty()) {
        int t = work.front();
        work.pop_front();
        if (!keep[static_cast<std::size_t>(t)]) continue;
        keep[static_cast<std::size_t>(t)] = false;
        for (int a : s.out_arcs(t)) {
            if (drop[static_cast<std::size_t>(a)]) continue;
            drop[static_cast<std::size_t>(a)] = true;
            int c = s.arc(a).to;
            if (--indeg[static_cast<std::size_t>(c)] == 0 && c != root) work.push_back(c);
        }
    }
    std::vector<bool> keep_arc(drop.size());
    for (std::size_t a = 0; a < drop.size(); ++a) keep_arc[a] = !drop[a];
    std::vector<int> old_of_new;
    SDag out = s.compact(keep, keep_arc, &old_of_new);
    for (std::size_t i = 0; i < old_of_new.size(); ++i)
        if (old_of_new[i] == root) *new_root = static_cast<int>(i);
    return out;
}

}  // namespace nicefy_detail

// Rewrites a valid S-DAG into a nice one of no larger width.
inline SDag nicefy(const Digraph& d, const SDag& s) {
    using namespace nicefy_detail;
    SDagReport in = validate_sdag(d, s);
    if (!in.valid()) throw NicefyError("nicefy: invalid input S-DAG: " + (in.problems.empty() ? std::string() : in.problems[0]));
    if (s.node_count() == 0) throw NicefyError("nicefy: empty S-DAG");

    SDag cur = single_root(s);
    int root = cur.sources().at(0);
    if (!derive(cur).bag_of(root).empty()) throw NicefyError("nicefy: new source has a non-empty bag");
    cur = normalize_sigmas(cur);
    cur = expand_bag_jumps(cur);
    cur = split_children(cur);
    int new_root = -1;
    cur = drop_laminar_siblings(cur, root, &new_root);
    cur = expand_bag_jumps(cur);

    SDagReport out = validate_sdag(d, cur);
    if (!out.valid()) throw NicefyError("nicefy produced an invalid S-DAG: " + out.problems.at(0));
    if (out.width > in.width)
        throw NicefyError("nicefy increased the width from " + std::to_string(in.width) + " to " + std::to_string(out.width));
    NiceReport nice = validate_nice(d, cur);
    if (!nice.nice()) throw NicefyError("nicefy output is not nice: " + nice.witnesses.at(0));
    return cur;
}

}  // namespace sdagw
