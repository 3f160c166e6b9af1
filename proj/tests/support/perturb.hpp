#pragma once

#include <algorithm>
#include <random>
#include <vector>

namespace oracle {

// Moves mass among three atoms i < j < k of p so that total mass and the mean
// of v are both unchanged. Returns an empty vector if the move would make a
// mass negative at every scale tried.
inline std::vector<double> constrained_perturbation(const std::vector<double>& p, const std::vector<double>& v,
                                                    std::mt19937_64& gen) {
    const std::size_t n = p.size();
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::size_t> idx;
    while (idx.size() < 3) {
        const std::size_t c = pick(gen);
        if (std::find(idx.begin(), idx.end(), c) == idx.end()) idx.push_back(c);
    }
    std::sort(idx.begin(), idx.end());
    const double vi = v[idx[0]];
    const double vj = v[idx[1]];
    const double vk = v[idx[2]];
    if (!(vi < vj && vj < vk)) return {};
    const double sign = std::uniform_int_distribution<int>(0, 1)(gen) ? 1.0 : -1.0;
    double eps = sign * std::uniform_real_distribution<double>(0.05, 1.0)(gen);
    for (int tries = 0; tries < 60; ++tries, eps *= 0.5) {
        const double dk = eps * (vj - vi) / (vk - vj);
        const double dj = -eps - dk;
        std::vector<double> out = p;
        out[idx[0]] += eps;
        out[idx[1]] += dj;
        out[idx[2]] += dk;
        if (out[idx[0]] >= 0 && out[idx[1]] >= 0 && out[idx[2]] >= 0) return out;
    }
    return {};
}

}  // namespace oracle
