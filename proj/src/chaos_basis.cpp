#include "chaosfit/chaos_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "chaosfit/error.hpp"

namespace chaosfit {

double hermite_eval(unsigned n, double x) {
    if (n == 0) return 1.0;
    double prev = 1.0;
    double curr = x;
    for (unsigned k = 1; k < n; ++k) {
        const double next = (x * curr - std::sqrt(static_cast<double>(k)) * prev) /
                            std::sqrt(static_cast<double>(k + 1));
        prev = curr;
        curr = next;
    }
    return curr;
}

// ---------------------------------------------------------------------------
// MultiIndex

MultiIndex MultiIndex::from_dense(std::span<const unsigned> dense) {
    MultiIndex m;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0) {
            m.entries_.emplace_back(static_cast<unsigned>(i + 1), dense[i]);
            m.degree_ += dense[i];
        }
    }
    return m;
}

MultiIndex MultiIndex::from_entries(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end());
    MultiIndex m;
    for (const auto& [slot, value] : entries) {
        if (slot == 0) throw ValidationError("multi-index slots are 1-based");
        if (value == 0) continue;
        if (!m.entries_.empty() && m.entries_.back().first == slot) {
            throw ValidationError("duplicate multi-index slot " + std::to_string(slot));
        }
        m.entries_.emplace_back(slot, value);
        m.degree_ += value;
    }
    return m;
}

MultiIndex MultiIndex::unit(unsigned slot) { return from_entries({{slot, 1}}); }

unsigned MultiIndex::operator[](unsigned slot) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{slot, 0});
    return (it != entries_.end() && it->first == slot) ? it->second : 0;
}

MultiIndex MultiIndex::raised(unsigned slot) const {
    if (slot == 0) throw ValidationError("multi-index slots are 1-based");
    MultiIndex m = *this;
    auto it = std::lower_bound(m.entries_.begin(), m.entries_.end(), Entry{slot, 0});
    if (it != m.entries_.end() && it->first == slot) {
        ++it->second;
    } else {
        m.entries_.insert(it, Entry{slot, 1});
    }
    ++m.degree_;
    return m;
}

std::string MultiIndex::to_string() const {
    if (entries_.empty()) return "0";
    std::ostringstream os;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        if (k) os << '|';
        os << entries_[k].first << ':' << entries_[k].second;
    }
    return os.str();
}

MultiIndex MultiIndex::parse(const std::string& text) {
    if (text == "0") return {};
    std::vector<Entry> entries;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, '|')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ValidationError("bad multi-index token '" + item + "'");
        try {
            std::size_t used_a = 0;
            std::size_t used_b = 0;
            const std::string a = item.substr(0, colon);
            const std::string b = item.substr(colon + 1);
            const unsigned long slot = std::stoul(a, &used_a);
            const unsigned long value = std::stoul(b, &used_b);
            if (used_a != a.size() || used_b != b.size()) throw std::invalid_argument(item);
            entries.emplace_back(static_cast<unsigned>(slot), static_cast<unsigned>(value));
        } catch (const std::logic_error&) {
            throw ValidationError("bad multi-index token '" + item + "'");
        }
    }
    return from_entries(std::move(entries));
}

bool operator<(const MultiIndex& a, const MultiIndex& b) {
    if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
    const auto& ea = a.entries_;
    const auto& eb = b.entries_;
    std::size_t i = 0;
    for (; i < ea.size() && i < eb.size(); ++i) {
        if (ea[i].first != eb[i].first) return ea[i].first < eb[i].first;
        if (ea[i].second != eb[i].second) return ea[i].second > eb[i].second;
    }
    // Equal degree and equal common prefix means equal indices.
    return false;
}

MultiIndex lower(const MultiIndex& alpha, unsigned slot) {
    if (alpha[slot] == 0) {
        throw UndefinedError("lowering slot " + std::to_string(slot) + " of " + alpha.to_string() +
                             ": entry is zero");
    }
    std::vector<MultiIndex::Entry> entries = alpha.entries();
    for (auto& e : entries) {
        if (e.first == slot) --e.second;
    }
    return MultiIndex::from_entries(std::move(entries));
}

namespace {

void enumerate_rec(unsigned slot, unsigned K, unsigned budget, std::vector<unsigned>& dense,
                   std::vector<MultiIndex>& out) {
    if (slot == K) {
        out.push_back(MultiIndex::from_dense(dense));
        return;
    }
    for (unsigned v = 0; v <= budget; ++v) {
        dense[slot] = v;
        enumerate_rec(slot + 1, K, budget - v, dense, out);
    }
    dense[slot] = 0;
}

}  // namespace

std::vector<MultiIndex> enumerate_multiindices(unsigned K, unsigned P) {
    if (K == 0) throw ValidationError("enumerate_multiindices: K must be >= 1");
    std::vector<MultiIndex> out;
    std::vector<unsigned> dense(K, 0);
    enumerate_rec(0, K, P, dense, out);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// BasisSet

BasisSet::BasisSet(double horizon, unsigned count)
    : horizon_(horizon), count_(count), c0_(0.0), c1_(0.0) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("basis horizon must be > 0");
    if (count == 0) throw ValidationError("basis count must be >= 1");
    c0_ = 1.0 / std::sqrt(horizon);
    c1_ = std::sqrt(2.0 / horizon);
}

double BasisSet::eval(unsigned i, double t) const {
    if (i < 1 || i > count_) {
        throw ValidationError("basis index " + std::to_string(i) + " outside 1.." + std::to_string(count_));
    }
    const double slack = 1e-12 * horizon_;
    if (!(t >= -slack && t <= horizon_ + slack)) {
        throw ValidationError("basis time " + std::to_string(t) + " outside [0, T]");
    }
    if (i == 1) return c0_;
    return c1_ * std::cos(static_cast<double>(i - 1) * std::numbers::pi * t / horizon_);
}

void BasisSet::eval_all(double t, std::span<double> out) const {
    const std::size_t n = std::min<std::size_t>(out.size(), count_);
    if (n == 0) return;
    out[0] = c0_;
    const double w = std::numbers::pi * t / horizon_;
    for (std::size_t i = 1; i < n; ++i) out[i] = c1_ * std::cos(static_cast<double>(i) * w);
}

// ---------------------------------------------------------------------------

GaussianDraw GaussianDraw::sample(unsigned K, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    GaussianDraw d;
    d.seed = seed;
    d.z.resize(K);
    for (auto& v : d.z) v = normal(rng);
    return d;
}

double xi_sample(const MultiIndex& alpha, const GaussianDraw& draw) {
    if (alpha.max_slot() > draw.z.size()) {
        throw ValidationError("multi-index " + alpha.to_string() + " exceeds draw length " +
                              std::to_string(draw.z.size()));
    }
    double prod = 1.0;
    for (const auto& [slot, power] : alpha.entries()) prod *= hermite_eval(power, draw.z[slot - 1]);
    return prod;
}

}  // namespace chaosfit
