#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chaosfit {

/// Normalized (probabilists') Hermite polynomial, E[H_m(Z) H_n(Z)] = delta_mn
/// for standard normal Z. Three-term recurrence; stable for moderate n.
double hermite_eval(unsigned n, double x);

/**
 * Finitely supported sequence of non-negative integers indexing a chaos
 * mode. Basis slots are 1-based. Only non-zero entries are stored, sorted by
 * slot, and the total degree is cached.
 *
 * Ordering is by degree first; within a degree, by the dense sequence
 * (alpha_1, alpha_2, ...) with larger leading entries first, so for two slots
 * the degree-one modes come out as (1,0) then (0,1).
 */
class MultiIndex {
public:
    using Entry = std::pair<unsigned, unsigned>;  // (slot, exponent)

    MultiIndex() = default;

    /// From a dense vector; position 0 is slot 1.
    static MultiIndex from_dense(std::span<const unsigned> dense);
    /// From (slot, exponent) pairs in any order; zero exponents are dropped.
    static MultiIndex from_entries(std::vector<Entry> entries);
    /// Single first-order mode 1_i.
    static MultiIndex unit(unsigned slot);

    unsigned degree() const noexcept { return degree_; }
    bool empty() const noexcept { return entries_.empty(); }
    unsigned operator[](unsigned slot) const noexcept;
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    /// Largest slot with a non-zero entry, 0 for the empty index.
    unsigned max_slot() const noexcept { return entries_.empty() ? 0 : entries_.back().first; }

    /// Entry `slot` raised by one.
    MultiIndex raised(unsigned slot) const;

    /// Canonical text form "1:2|4:1"; the empty index is "0".
    std::string to_string() const;
    static MultiIndex parse(const std::string& text);

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator<(const MultiIndex& a, const MultiIndex& b);

private:
    std::vector<Entry> entries_;
    unsigned degree_ = 0;
};

/// alpha with entry `slot` decremented. Throws UndefinedError if that entry is 0.
MultiIndex lower(const MultiIndex& alpha, unsigned slot);

/// All multi-indices on slots 1..K with degree <= P, strictly increasing.
std::vector<MultiIndex> enumerate_multiindices(unsigned K, unsigned P);

/// Cosine orthonormal basis of L2([0, T]).
class BasisSet {
public:
    BasisSet(double horizon, unsigned count);

    double horizon() const noexcept { return horizon_; }
    unsigned count() const noexcept { return count_; }

    /// e_i(t) with range checks on i and t.
    double eval(unsigned i, double t) const;
    /// All of e_1(t)..e_K(t) into `out` (size K). No range checks on t.
    void eval_all(double t, std::span<double> out) const;

private:
    double horizon_;
    unsigned count_;
    double c0_;
    double c1_;
};

inline double basis_eval(const BasisSet& basis, unsigned i, double t) { return basis.eval(i, t); }

/// K standard-normal realizations of W(e_1)..W(e_K).
struct GaussianDraw {
    std::vector<double> z;
    std::uint64_t seed = 0;

    static GaussianDraw sample(unsigned K, std::uint64_t seed);
};

/// xi_alpha = prod_i H_{alpha_i}(z_i).
double xi_sample(const MultiIndex& alpha, const GaussianDraw& draw);

}  // namespace chaosfit
