#include "megflood/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "megflood/csvfmt.hpp"

namespace megflood {

std::int64_t CellSubset::size() const {
    return std::accumulate(members.begin(), members.end(), std::int64_t{0});
}

std::vector<std::pair<std::int32_t, std::int32_t>> boundary(
    const CellSubset& subset) {
    const std::int32_t m = subset.m;
    std::vector<std::pair<std::int32_t, std::int32_t>> out;
    static constexpr std::int32_t adj[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    for (std::int32_t row = 0; row < m; ++row) {
        for (std::int32_t col = 0; col < m; ++col) {
            if (subset.contains(row, col)) continue;
            for (const auto& d : adj) {
                const std::int32_t nr = row + d[0];
                const std::int32_t nc = col + d[1];
                if (nr < 0 || nc < 0 || nr >= m || nc >= m) continue;
                if (subset.contains(nr, nc)) {
                    out.emplace_back(row, col);
                    break;
                }
            }
        }
    }
    return out;
}

std::int64_t ceil_sqrt(std::int64_t x) {
    if (x <= 0) return 0;
    auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(x)));
    while (s * s >= x && s > 0) --s; // s = largest with s^2 < x
    while (s * s < x) ++s;
    return s;
}

namespace {

// |boundary| and |B| for a bitmask subset; the bound is checked in integer
// arithmetic (|bd|^2 >= min) so ties are exact.
struct BoundaryCheck {
    std::int64_t boundary_size;
    std::int64_t min_side; // min(|B|, m^2 - |B|)
    bool holds() const { return boundary_size * boundary_size >= min_side; }
    double slack() const {
        return static_cast<double>(boundary_size) -
               std::sqrt(static_cast<double>(min_side));
    }
};

BoundaryCheck check_mask(std::int32_t m, std::uint64_t mask) {
    const std::int32_t cells = m * m;
    std::int64_t black = 0;
    std::int64_t bd = 0;
    for (std::int32_t k = 0; k < cells; ++k) {
        if (mask >> k & 1) {
            ++black;
            continue;
        }
        const std::int32_t row = k / m;
        const std::int32_t col = k % m;
        const bool adjacent =
            (row > 0 && (mask >> (k - m) & 1)) ||
            (row + 1 < m && (mask >> (k + m) & 1)) ||
            (col > 0 && (mask >> (k - 1) & 1)) ||
            (col + 1 < m && (mask >> (k + 1) & 1));
        if (adjacent) ++bd;
    }
    return BoundaryCheck{bd, std::min(black, static_cast<std::int64_t>(cells) - black)};
}

} // namespace

LemmaReport verify_boundary_lemma(std::int32_t m_max) {
    if (m_max < 1 || m_max > 4)
        throw std::invalid_argument(
            "verify_boundary_lemma: exhaustive mode supports m_max in [1,4]");
    LemmaReport report;
    report.lemma = "boundary";
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (std::int32_t m = 1; m <= m_max; ++m) {
        const std::uint64_t subsets = std::uint64_t{1} << (m * m);
        for (std::uint64_t mask = 0; mask < subsets; ++mask) {
            const BoundaryCheck c = check_mask(m, mask);
            ++report.cases;
            if (!c.holds()) ++report.violations;
            report.worst_margin = std::min(report.worst_margin, c.slack());
        }
    }
    return report;
}

LemmaReport verify_boundary_lemma_sampled(std::int32_t m, std::uint64_t samples,
                                          std::uint64_t seed) {
    if (m < 1 || m > 8)
        throw std::invalid_argument(
            "verify_boundary_lemma_sampled: m in [1,8] (mask width)");
    LemmaReport report;
    report.lemma = "boundary";
    report.seed = seed;
    report.worst_margin = std::numeric_limits<double>::infinity();
    Rng rng(seed);
    const std::int32_t cells = m * m;
    for (std::uint64_t s = 0; s < samples; ++s) {
        std::uint64_t mask = rng.next_u64();
        if (cells < 64) mask &= (std::uint64_t{1} << cells) - 1;
        const BoundaryCheck c = check_mask(m, mask);
        ++report.cases;
        if (!c.holds()) ++report.violations;
        report.worst_margin = std::min(report.worst_margin, c.slack());
    }
    return report;
}

std::int64_t minimal_spreading_sequence(std::int64_t k_total) {
    if (k_total < 1)
        throw std::invalid_argument("minimal_spreading_sequence: K >= 1");
    std::int64_t q = 1;
    std::int64_t steps = 0;
    while (q < k_total) {
        q = std::min(k_total, q + ceil_sqrt(std::min(q, k_total - q)));
        ++steps;
    }
    return steps;
}

LemmaReport verify_spreading_lemma(std::int64_t k_max) {
    if (k_max < 1)
        throw std::invalid_argument("verify_spreading_lemma: K_max >= 1");
    LemmaReport report;
    report.lemma = "spreading";
    report.worst_margin = 0.0; // here: max of steps / (5*sqrt(K))
    for (std::int64_t k = 1; k <= k_max; ++k) {
        const std::int64_t steps = minimal_spreading_sequence(k);
        // smallest integer t >= 5*sqrt(K), exactly: ceil_sqrt(25 K)
        const std::int64_t deadline = ceil_sqrt(25 * k);
        ++report.cases;
        if (steps > deadline) ++report.violations;
        report.worst_margin =
            std::max(report.worst_margin,
                     static_cast<double>(steps) /
                         (5.0 * std::sqrt(static_cast<double>(k))));
    }
    return report;
}

bool AlmostIncreasingSpec::applicable() const {
    if (!(alpha > 1.0) || !(beta > 0.0 && beta < 1.0) || big_m < 1 ||
        !(p > 0.0 && p < 1.0))
        return false;
    const double e = std::exp(1.0);
    return p < std::log(alpha) / (e * std::log(alpha / beta));
}

std::int64_t AlmostIncreasingSpec::time_threshold() const {
    const double e = std::exp(1.0);
    const double denom = std::log(alpha) - e * p * std::log(alpha / beta);
    return static_cast<std::int64_t>(
        std::ceil(std::log(static_cast<double>(big_m)) / denom));
}

double AlmostIncreasingSpec::tail_bound(std::int64_t t) const {
    return std::exp(-p * static_cast<double>(t));
}

ProcessStep adversarial_generator(const AlmostIncreasingSpec& spec) {
    const double alpha = spec.alpha;
    const double beta = spec.beta;
    const double p = spec.p;
    return [alpha, beta, p](double x, Rng& rng) {
        return rng.next_bernoulli(p) ? beta * x : alpha * x;
    };
}

AlmostIncreasingResult simulate_almost_increasing(
    const AlmostIncreasingSpec& spec, std::int64_t t, std::uint64_t trials,
    Rng& rng, const ProcessStep& step) {
    if (!spec.applicable())
        throw std::invalid_argument(
            "simulate_almost_increasing: spec violates the p condition "
            "p < log(alpha)/(e log(alpha/beta))");
    if (t < spec.time_threshold())
        throw std::invalid_argument(
            "simulate_almost_increasing: t below the lemma's time threshold");
    if (trials == 0)
        throw std::invalid_argument("simulate_almost_increasing: no trials");

    const ProcessStep gen = step ? step : adversarial_generator(spec);
    const double big_m = static_cast<double>(spec.big_m);

    std::uint64_t stuck = 0;
    for (std::uint64_t trial = 0; trial < trials; ++trial) {
        double x = 1.0;
        bool below = true;
        for (std::int64_t i = 1; i <= t; ++i) {
            x = gen(x, rng);
            if (x >= big_m) {
                below = false;
                break;
            }
        }
        if (below) ++stuck;
    }

    AlmostIncreasingResult result;
    result.trials = trials;
    result.t = t;
    result.empirical =
        static_cast<double>(stuck) / static_cast<double>(trials);
    result.bound = spec.tail_bound(t);
    result.std_error = std::sqrt(result.empirical * (1.0 - result.empirical) /
                                 static_cast<double>(trials));
    result.within_margin =
        result.empirical <= result.bound + 3.0 * result.std_error;
    return result;
}

std::string LemmaReport::to_text() const {
    std::ostringstream os;
    os << "lemma=" << lemma << " cases=" << cases
       << " violations=" << violations
       << " worst_margin=" << format_double(worst_margin) << " seed=" << seed;
    return os.str();
}

std::string LemmaReport::to_json() const {
    const nlohmann::json j = {{"lemma", lemma},
                              {"cases", cases},
                              {"violations", violations},
                              {"worst_margin", worst_margin},
                              {"seed", seed}};
    return j.dump();
}

} // namespace megflood
