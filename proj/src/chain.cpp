#include "dice/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <queue>

#include "dice/errors.hpp"

namespace dice {

NeighborIndex build_neighbors(const Ladder& L) {
    NeighborIndex N;
    N.m = L.m;
    N.k1 = L.size();
    N.nb.assign(N.k1, std::vector<std::vector<int32_t>>(L.m + 1));
    N.S.assign(N.k1, std::vector<double>(L.m + 1, 0.0));

    std::map<Monomial, int> idx;
    for (int i = 0; i < L.size(); ++i) idx[L.states[i].n] = i;

    std::vector<int32_t> probe;
    for (int i = 0; i < L.size(); ++i) {
        const auto& n = L.states[i].n.e;
        for (int b = 0; b <= L.m; ++b) {
            auto& lst = N.nb[i][b];
            for (int c = 0; c <= L.m; ++c) {
                if (c == b || n[c] == 0) continue;
                probe = n;
                probe[b] += 1;
                probe[c] -= 1;
                auto it = idx.find(Monomial(probe));
                if (it != idx.end()) lst.push_back(it->second);
            }
            std::sort(lst.begin(), lst.end());
            for (int32_t j : lst) N.S[i][b] += L.states[j].R;
        }
    }
    return N;
}

double TransitionKernel::v(int i, int j) const {
    for (int b = 0; b <= m; ++b)
        for (const auto& e : row[i][b])
            if (e.j == j) return e.v;
    return 0.0;
}

double TransitionKernel::min_positive_v() const {
    double mn = 1.0;
    for (const auto& faces : row)
        for (const auto& lst : faces)
            for (const auto& e : lst)
                if (e.v > 0.0) mn = std::min(mn, e.v);
    return mn;
}

int TransitionKernel::face_of(const Ladder& L, int i, int j) const {
    const auto& ni = L.states[i].n.e;
    const auto& nj = L.states[j].n.e;
    for (int b = 0; b <= L.m; ++b)
        if (nj[b] == ni[b] + 1) return b;
    return -1;
}

namespace {

TransitionKernel kernel_from_edges(const Ladder& L,
                                   const std::map<std::pair<int, int>, double>& V) {
    NeighborIndex N = build_neighbors(L);
    TransitionKernel K;
    K.m = L.m;
    K.k1 = L.size();
    K.row.assign(K.k1, std::vector<std::vector<KernelEntry>>(L.m + 1));
    for (int i = 0; i < K.k1; ++i) {
        for (int b = 0; b <= L.m; ++b) {
            double cum = 0.0;
            for (int32_t j : N.nb[i][b]) {
                auto it = V.find({i, j});
                double v = it == V.end() ? 0.0 : it->second;
                cum += v;
                K.row[i][b].push_back({j, v, cum});
            }
            if (cum > 1.0 + 1e-12)
                throw Error("escape probability exceeds 1 for a (state, face) pair");
        }
    }
    return K;
}

}  // namespace

TransitionKernel build_kernel(const Ladder& L) {
    if (!L.fine()) throw Error("build_kernel requires a fine ladder");
    NeighborIndex N = build_neighbors(L);
    const int m = L.m;
    const int k1 = L.size();

    // Working copies; pairs are addressed as i * (m+1) + b.
    std::vector<std::vector<int32_t>> nb(static_cast<std::size_t>(k1) * (m + 1));
    std::vector<double> S(nb.size(), 0.0), W(nb.size(), 0.0);
    for (int i = 0; i < k1; ++i)
        for (int b = 0; b <= m; ++b) {
            nb[i * (m + 1) + b] = N.nb[i][b];
            S[i * (m + 1) + b] = N.S[i][b];
        }

    // Lazy max-heap over S with lexicographic (b, i) tie-break.
    struct Item {
        double s;
        int b, i;
        bool operator<(const Item& o) const {
            if (s != o.s) return s < o.s;
            if (b != o.b) return b > o.b;
            return i > o.i;
        }
    };
    std::priority_queue<Item> heap;
    for (int i = 0; i < k1; ++i)
        for (int b = 0; b <= m; ++b)
            if (!nb[i * (m + 1) + b].empty()) heap.push({S[i * (m + 1) + b], b, i});

    std::map<std::pair<int, int>, double> V;
    auto face_of = [&](int from, int to) {
        const auto& na = L.states[from].n.e;
        const auto& nbv = L.states[to].n.e;
        for (int b = 0; b <= m; ++b)
            if (nbv[b] == na[b] + 1) return b;
        throw Error("neighbor pair without a connecting face");
    };

    while (!heap.empty()) {
        auto [s, b, i] = heap.top();
        heap.pop();
        std::size_t key = static_cast<std::size_t>(i) * (m + 1) + b;
        if (nb[key].empty() || s != S[key]) continue;  // stale entry

        double denom = S[key];
        for (int32_t j : nb[key]) {
            V[{i, j}] = L.states[j].R / denom;
            W[key] += L.states[j].R / denom;
            // Reverse edge with the same denominator keeps detailed balance.
            int c = face_of(j, i);
            std::size_t rkey = static_cast<std::size_t>(j) * (m + 1) + c;
            V[{j, i}] = L.states[i].R / denom;
            auto& rlist = nb[rkey];
            auto rit = std::find(rlist.begin(), rlist.end(), i);
            if (rit == rlist.end()) throw Error("internal: reverse edge already consumed");
            rlist.erase(rit);
            W[rkey] += L.states[i].R / denom;
            if (W[rkey] > 1.0 + 1e-12)
                throw Error("internal: escape weight exceeded 1 during construction");
            if (rlist.empty()) {
                S[rkey] = 0.0;
            } else if (W[rkey] >= 1.0 - 1e-15) {
                throw Error("internal: escape weight saturated with neighbors remaining");
            } else {
                double rem = 0.0;
                for (int32_t h : rlist) rem += L.states[h].R;
                S[rkey] = rem / (1.0 - W[rkey]);
                heap.push({S[rkey], c, static_cast<int>(j)});
            }
        }
        nb[key].clear();
        S[key] = 0.0;
    }
    return kernel_from_edges(L, V);
}

TransitionKernel suboptimal_kernel(const Ladder& L) {
    if (!L.fine()) throw Error("suboptimal_kernel requires a fine ladder");
    NeighborIndex N = build_neighbors(L);
    std::map<std::pair<int, int>, double> V;
    for (int i = 0; i < L.size(); ++i) {
        for (int b = 0; b <= L.m; ++b) {
            for (int32_t j : N.nb[i][b]) {
                // c with i in N_c(j)
                const auto& ni = L.states[i].n.e;
                const auto& nj = L.states[j].n.e;
                int c = -1;
                for (int h = 0; h <= L.m; ++h)
                    if (ni[h] == nj[h] + 1) c = h;
                V[{i, j}] = L.states[j].R / std::max(N.S[i][b], N.S[j][c]);
            }
        }
    }
    return kernel_from_edges(L, V);
}

std::vector<std::vector<double>> evaluate_P(const TransitionKernel& K,
                                            [[maybe_unused]] const Ladder& L,
                                            std::span<const double> point) {
    std::vector<std::vector<double>> P(K.k1, std::vector<double>(K.k1, 0.0));
    for (int i = 0; i < K.k1; ++i) {
        double off = 0.0;
        for (int b = 0; b <= K.m; ++b) {
            for (const auto& e : K.row[i][b]) {
                P[i][e.j] = e.v * point[b];
                off += P[i][e.j];
            }
        }
        P[i][i] = std::max(0.0, 1.0 - off);
    }
    return P;
}

bool check_detailed_balance(const TransitionKernel& K, const Ladder& L,
                            std::span<const double> point, double tol) {
    auto P = evaluate_P(K, L, point);
    auto pi = L.weights_at(point);
    for (int i = 0; i < K.k1; ++i) {
        for (int j = i + 1; j < K.k1; ++j) {
            double lhs = pi[i] * P[i][j];
            double rhs = pi[j] * P[j][i];
            if (std::abs(lhs - rhs) > tol * std::max({1.0, std::abs(lhs), std::abs(rhs)}))
                return false;
        }
    }
    return true;
}

std::string pretty_print_P(const TransitionKernel& K, [[maybe_unused]] const Ladder& L) {
    std::vector<std::vector<std::string>> cells(K.k1, std::vector<std::string>(K.k1, "0"));
    for (int i = 0; i < K.k1; ++i) {
        cells[i][i] = ".";
        for (int b = 0; b <= K.m; ++b) {
            for (const auto& e : K.row[i][b]) {
                char buf[48];
                std::snprintf(buf, sizeof(buf), "%.6g p%d", e.v, b);
                cells[i][e.j] = buf;
            }
        }
    }
    std::size_t w = 0;
    for (const auto& r : cells)
        for (const auto& c : r) w = std::max(w, c.size());
    std::string out;
    for (const auto& r : cells) {
        for (const auto& c : r) {
            out += c;
            out.append(w + 2 - c.size(), ' ');
        }
        out += '\n';
    }
    return out;
}

}  // namespace dice
