#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "megflood/rng.hpp"

namespace megflood {

// Subset B of an m x m cell grid.
struct CellSubset {
    std::int32_t m = 1;
    std::vector<std::uint8_t> members; // m*m flags, row-major

    bool contains(std::int32_t row, std::int32_t col) const {
        return members[static_cast<std::size_t>(row) * m + col] != 0;
    }
    std::int64_t size() const;
};

// 4-adjacency boundary: cells outside B that share an edge with a cell in B.
std::vector<std::pair<std::int32_t, std::int32_t>> boundary(
    const CellSubset& subset);

struct LemmaReport {
    std::string lemma;
    std::uint64_t cases = 0;
    std::uint64_t violations = 0;
    double worst_margin = 0.0; // smallest slack observed (bound side)
    std::uint64_t seed = 0;

    std::string to_text() const;
    std::string to_json() const;
};

// |boundary(B)| >= sqrt(min(|B|, m^2 - |B|)) over all 2^(m^2) subsets for
// each m in [1, m_max]. Exhaustive; m_max is capped at 4.
LemmaReport verify_boundary_lemma(std::int32_t m_max);

// Same bound over `samples` uniformly random subsets of an m x m grid.
LemmaReport verify_boundary_lemma_sampled(std::int32_t m, std::uint64_t samples,
                                          std::uint64_t seed);

// Steps taken by the slowest admissible integer sequence
// q_0 = 1, q_{t+1} = min(K, q_t + ceil(sqrt(min(q_t, K - q_t)))) to reach K.
std::int64_t minimal_spreading_sequence(std::int64_t k_total);

// minimal_spreading_sequence(K) <= ceil(5*sqrt(K)) for every K in [1, K_max].
LemmaReport verify_spreading_lemma(std::int64_t k_max);

// Ceiling of sqrt(x) in exact integer arithmetic.
std::int64_t ceil_sqrt(std::int64_t x);

// Parameters of the almost-increasing process bound: X_0 = 1, growth by at
// least alpha except with probability <= p (while below M), never shrinking
// below beta * X_t.
struct AlmostIncreasingSpec {
    double alpha = 2.0;
    double beta = 1.0 / 121.0;
    std::int64_t big_m = 1000;
    double p = 0.01;

    // p < log(alpha) / (e * log(alpha/beta))
    bool applicable() const;
    // smallest t the bound speaks about:
    // ceil(log M / (log alpha - e p log(alpha/beta)))
    std::int64_t time_threshold() const;
    double tail_bound(std::int64_t t) const; // e^(-p t)
};

struct AlmostIncreasingResult {
    double empirical = 0.0; // fraction of trials with X_i < M for all i <= t
    double bound = 0.0;     // e^(-p t)
    double std_error = 0.0;
    std::uint64_t trials = 0;
    std::int64_t t = 0;
    bool within_margin = false; // empirical <= bound + 3 * std_error
};

// One X_{t+1} from X_t; must satisfy the lemma's two hypotheses.
using ProcessStep = std::function<double(double, Rng&)>;

// The adversarial generator: beta-step with probability p, alpha-step
// otherwise (hypotheses enforced only below M, per the lemma statement).
ProcessStep adversarial_generator(const AlmostIncreasingSpec& spec);

// Monte Carlo estimate of P(for all i in [1, t]: X_i < M). Throws
// std::invalid_argument when the spec fails the p condition or t is below
// the lemma's threshold.
AlmostIncreasingResult simulate_almost_increasing(
    const AlmostIncreasingSpec& spec, std::int64_t t, std::uint64_t trials,
    Rng& rng, const ProcessStep& step = {});

} // namespace megflood
