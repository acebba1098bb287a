#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rdcp/rng.hpp"

namespace rdcp {

/// Law of the degree constraint D on {2, ..., delta_max}.
class DegreeDistribution {
public:
    DegreeDistribution() = default;

    static DegreeDistribution from_pmf(const std::vector<std::pair<int, double>>& entries) {
        if (entries.empty()) throw std::invalid_argument("degree distribution: no entries");
        int kmax = 0;
        double total = 0.0;
        for (auto [k, w] : entries) {
            if (k < 2) throw std::invalid_argument("degree distribution: constraint " + std::to_string(k) + " < 2");
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("degree distribution: negative or non-finite weight for k=" + std::to_string(k));
            if (w > 0.0) kmax = std::max(kmax, k);
            total += w;
        }
        if (!(total > 0.0)) throw std::invalid_argument("degree distribution: all weights are zero");

        DegreeDistribution d;
        d.delta_ = kmax;
        d.pmf_.assign(kmax + 1, 0.0);
        for (auto [k, w] : entries)
            if (k <= kmax) d.pmf_[k] += w / total;
        d.kmin_ = 2;
        while (d.pmf_[d.kmin_] == 0.0) ++d.kmin_;
        d.tail_.assign(kmax + 2, 0.0);
        for (int k = kmax; k > d.kmin_; --k) d.tail_[k] = d.tail_[k + 1] + d.pmf_[k];
        for (int k = 1; k <= d.kmin_; ++k) d.tail_[k] = 1.0;
        // p_k re-read from the tail so that q_k - q_{k+1} == p_k holds bitwise
        for (int k = 2; k <= kmax; ++k) d.pmf_[k] = d.tail_[k] - d.tail_[k + 1];
        d.cdf_.assign(kmax + 1, 0.0);
        for (int k = 2; k <= kmax; ++k) d.cdf_[k] = 1.0 - d.tail_[k + 1];
        return d;
    }

    /// Parses "k:w,k:w,...".
    static DegreeDistribution parse(const std::string& text) {
        std::vector<std::pair<int, double>> entries;
        std::string compact;
        for (char c : text)
            if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
        std::stringstream ss(compact);
        std::string item;
        int field = 0;
        while (std::getline(ss, item, ',')) {
            ++field;
            auto colon = item.find(':');
            if (colon == std::string::npos)
                throw std::invalid_argument("dist spec field " + std::to_string(field) + " '" + item + "': expected k:weight");
            try {
                std::size_t used = 0;
                int k = std::stoi(item.substr(0, colon), &used);
                if (used != colon) throw std::invalid_argument("k");
                std::string ws = item.substr(colon + 1);
                double w = std::stod(ws, &used);
                if (used != ws.size()) throw std::invalid_argument("w");
                entries.emplace_back(k, w);
            } catch (const std::logic_error&) {
                throw std::invalid_argument("dist spec field " + std::to_string(field) + " '" + item + "': not a number");
            }
        }
        return from_pmf(entries);
    }

    int delta_max() const { return delta_; }
    int k_min() const { return kmin_; }

    double p(int k) const { return (k >= 0 && k <= delta_) ? pmf_[k] : 0.0; }

    /// q_k = sum_{d >= k} p_d
    double q(int k) const {
        if (k <= 1) return 1.0;
        return k <= delta_ + 1 ? tail_[k] : 0.0;
    }

    double mean() const {
        double m = 0.0;
        for (int k = 2; k <= delta_; ++k) m += k * pmf_[k];
        return m;
    }

    double inv_factorial_moment() const {
        double m = 0.0, fact = 1.0;
        for (int k = 2; k <= delta_; ++k) {
            fact *= k;
            m += pmf_[k] / fact;
        }
        return m;
    }

    int sample(Rng& rng) const {
        double u = uniform01(rng);
        for (int k = 2; k < delta_; ++k)
            if (u < cdf_[k]) return k;
        return delta_;
    }

    std::string to_string() const {
        std::ostringstream os;
        os.precision(17);
        bool first = true;
        for (int k = 2; k <= delta_; ++k) {
            if (pmf_[k] == 0.0) continue;
            if (!first) os << ';';
            os << k << ':' << pmf_[k];
            first = false;
        }
        return os.str();
    }

private:
    int delta_ = 0;
    int kmin_ = 0;
    std::vector<double> pmf_;
    std::vector<double> tail_;
    std::vector<double> cdf_;
};

}  // namespace rdcp
