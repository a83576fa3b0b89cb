#ifndef PBIT_ANALYSIS_HPP
#define PBIT_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pbit/error.hpp"
#include "pbit/ising.hpp"
#include "pbit/sparsify.hpp"

namespace pbit {

/// Pairwise (cascade) summation; the reduction order depends only on the length.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0;
        for (double x : xs) {
            s += x;
        }
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct MeanStderr {
    double mean = 0;
    double std_error = 0;
};

/// Sample mean and standard error of the mean (0 for fewer than two samples).
inline MeanStderr mean_stderr(std::span<const double> xs) {
    MeanStderr out;
    if (xs.empty()) {
        return out;
    }
    const auto k = static_cast<double>(xs.size());
    out.mean = pairwise_sum(xs) / k;
    if (xs.size() > 1) {
        std::vector<double> sq;
        sq.reserve(xs.size());
        for (double x : xs) {
            sq.push_back((x - out.mean) * (x - out.mean));
        }
        out.std_error = std::sqrt(pairwise_sum(sq) / (k - 1.0) / k);
    }
    return out;
}

/// Probability table over the 2^n states of n spins, indexed by SpinState::bits().
class Distribution {
   public:
    Distribution() = default;
    Distribution(std::size_t spins, std::vector<double> probabilities) : spins_(spins), p_(std::move(probabilities)) {
        if (p_.size() != (std::size_t{1} << spins)) {
            throw dimension_error("distribution over " + std::to_string(spins) + " spins needs " +
                                  std::to_string(std::size_t{1} << spins) + " entries");
        }
        for (double x : p_) {
            if (!(x >= 0.0)) {
                throw invalid_argument("probabilities must be non-negative");
            }
        }
        if (std::abs(pairwise_sum(p_) - 1.0) > 1e-12) {
            throw invalid_argument("probabilities must sum to 1");
        }
    }

    /// Normalizes non-negative weights (e.g. histogram counts).
    static Distribution from_weights(std::size_t spins, std::vector<double> weights) {
        const double total = pairwise_sum(weights);
        if (!(total > 0.0)) {
            throw invalid_argument("cannot normalize an all-zero histogram");
        }
        for (double &w : weights) {
            w /= total;
        }
        return Distribution(spins, std::move(weights));
    }

    std::size_t spins() const noexcept {
        return spins_;
    }
    std::size_t size() const noexcept {
        return p_.size();
    }
    double operator[](std::size_t state) const noexcept {
        return p_[state];
    }
    const std::vector<double> &probabilities() const noexcept {
        return p_;
    }

   private:
    std::size_t spins_ = 0;
    std::vector<double> p_;
};

inline constexpr std::size_t kBoltzmannMaxNodes = 20;

/// p(s) = exp(-beta E(s)) / Z over all 2^n states (n <= 20).
inline Distribution boltzmann_exact(const IsingModel &model, double beta) {
    auto e = all_energies(model, kBoltzmannMaxNodes);
    const double e_min = *std::min_element(e.begin(), e.end());
    for (double &x : e) {
        x = std::exp(-beta * (x - e_min));
    }
    return Distribution::from_weights(model.size(), std::move(e));
}

/// Histogram of decoded physical samples over the logical state space.
class ReducedHistogram {
   public:
    ReducedHistogram(const SparseEmbedding &emb, DecodePolicy policy)
        : emb_(&emb), decoder_(policy), counts_(std::size_t{1} << emb.logical_n, 0.0) {
        if (emb.logical_n > kBoltzmannMaxNodes) {
            throw capacity_error("reduced histogram limited to " + std::to_string(kBoltzmannMaxNodes) +
                                 " logical spins");
        }
    }

    void add(const SpinState &physical) {
        counts_[decoder_(*emb_, physical).bits()] += 1.0;
        ++samples_;
    }

    std::size_t samples() const noexcept {
        return samples_;
    }

    Distribution distribution() const {
        if (samples_ == 0) {
            throw invalid_argument("no samples recorded");
        }
        return Distribution::from_weights(emb_->logical_n, counts_);
    }

   private:
    const SparseEmbedding *emb_;
    Decoder decoder_;
    std::vector<double> counts_;
    std::size_t samples_ = 0;
};

/// Decodes every physical sample with one decoder stream and normalizes the histogram.
inline Distribution reduced_empirical(std::span<const SpinState> samples, const SparseEmbedding &emb,
                                      DecodePolicy policy) {
    if (samples.empty()) {
        throw invalid_argument("reduced_empirical needs at least one sample");
    }
    ReducedHistogram h(emb, policy);
    for (const auto &s : samples) {
        h.add(s);
    }
    return h.distribution();
}

/// D(P_emp || P_exact) in nats; states with P_emp = 0 contribute nothing.
inline double kl_divergence(const Distribution &p_emp, const Distribution &p_exact) {
    if (p_emp.size() != p_exact.size()) {
        throw dimension_error("distributions have different supports");
    }
    std::vector<double> terms;
    terms.reserve(p_emp.size());
    for (std::size_t s = 0; s < p_emp.size(); ++s) {
        if (p_emp[s] == 0.0) {
            continue;
        }
        if (p_exact[s] == 0.0) {
            throw invalid_argument("reference distribution is zero where the empirical one is not");
        }
        terms.push_back(p_emp[s] * std::log(p_emp[s] / p_exact[s]));
    }
    return std::max(0.0, pairwise_sum(terms));
}

namespace detail {

inline bool same_cut(double cut, double optimum) {
    return std::abs(cut - optimum) <= 1e-9 * std::max(1.0, std::abs(optimum));
}

}  // namespace detail

/// Fraction of trials whose best cut equals the optimum.
inline double success_probability(std::span<const double> best_cuts, double optimum) {
    if (best_cuts.empty()) {
        throw invalid_argument("success probability needs at least one trial");
    }
    std::size_t hits = 0;
    for (double c : best_cuts) {
        hits += detail::same_cut(c, optimum) ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(best_cuts.size());
}

/// Mean of best_cut / optimum over trials.
inline double approximation_ratio(std::span<const double> best_cuts, double optimum) {
    if (best_cuts.empty()) {
        throw invalid_argument("approximation ratio needs at least one trial");
    }
    if (!(optimum > 0.0)) {
        throw invalid_argument("approximation ratio needs a positive optimum");
    }
    std::vector<double> r;
    r.reserve(best_cuts.size());
    for (double c : best_cuts) {
        r.push_back(c / optimum);
    }
    return pairwise_sum(r) / static_cast<double>(r.size());
}

namespace detail {

inline void require_curve(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw dimension_error("x and y grids differ in length");
    }
    if (xs.empty()) {
        throw invalid_argument("curve needs at least one point");
    }
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) {
            throw invalid_argument("x grid must be strictly increasing");
        }
    }
}

// x where the segment (x0, y0)-(x1, y1) crosses level y
inline double crossing(double x0, double y0, double x1, double y1, double y) {
    return y1 == y0 ? x0 : x0 + (y - y0) * (x1 - x0) / (y1 - y0);
}

}  // namespace detail

struct Peak {
    std::size_t index = 0;
    double x = 0;
    double value = 0;
    /// Width at value/2 with linearly interpolated crossings; a side that never drops
    /// below half height extends to the grid edge.
    double fwhm = 0;
    bool interior = false;
};

/// Global maximum (first one on ties) of a sampled curve and its full width at half max.
inline Peak find_peak(std::span<const double> xs, std::span<const double> ys) {
    detail::require_curve(xs, ys);
    Peak p;
    p.index = static_cast<std::size_t>(std::max_element(ys.begin(), ys.end()) - ys.begin());
    p.x = xs[p.index];
    p.value = ys[p.index];
    p.interior = p.index > 0 && p.index + 1 < xs.size();
    const double half = p.value / 2.0;
    double left = xs.front();
    for (std::size_t i = p.index; i > 0; --i) {
        if (ys[i - 1] < half) {
            left = detail::crossing(xs[i - 1], ys[i - 1], xs[i], ys[i], half);
            break;
        }
    }
    double right = xs.back();
    for (std::size_t i = p.index; i + 1 < xs.size(); ++i) {
        if (ys[i + 1] < half) {
            right = detail::crossing(xs[i], ys[i], xs[i + 1], ys[i + 1], half);
            break;
        }
    }
    p.fwhm = right - left;
    return p;
}

struct Interval {
    double lo = 0;
    double hi = 0;
    double width() const {
        return hi - lo;
    }
};

/// Longest stretch of the x axis on which the linearly interpolated curve is >= level.
/// Empty (width 0 at the first x) when no sample reaches the level.
inline Interval longest_interval_at_least(std::span<const double> xs, std::span<const double> ys, double level) {
    detail::require_curve(xs, ys);
    Interval best{xs.front(), xs.front()};
    bool found = false;
    for (std::size_t i = 0; i < xs.size();) {
        if (ys[i] < level) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < xs.size() && ys[j + 1] >= level) {
            ++j;
        }
        Interval run{i == 0 ? xs.front() : detail::crossing(xs[i - 1], ys[i - 1], xs[i], ys[i], level),
                     j + 1 == xs.size() ? xs.back() : detail::crossing(xs[j], ys[j], xs[j + 1], ys[j + 1], level)};
        if (!found || run.width() > best.width()) {
            best = run;
            found = true;
        }
        i = j + 1;
    }
    return best;
}

struct ResidualPoint {
    double rho = 0;
    double std_error = 0;
};

/// rho_E = (mean_k E(s_k) - E_gs) / N over logical states s_k, with its standard error.
inline ResidualPoint residual_energy(const IsingModel &logical, std::span<const SpinState> states, double e_gs) {
    if (states.empty()) {
        throw invalid_argument("residual energy needs at least one state");
    }
    std::vector<double> gaps;
    gaps.reserve(states.size());
    for (const auto &s : states) {
        gaps.push_back(energy(logical, s) - e_gs);
    }
    const auto ms = mean_stderr(gaps);
    const auto n = static_cast<double>(logical.size());
    return {ms.mean / n, ms.std_error / n};
}

struct ResidualSample {
    double t = 0;  // Monte Carlo sweeps
    double rho = 0;
    double std_error = 0;
};

struct ResidualCurve {
    std::size_t n = 0;
    std::vector<ResidualSample> points;

    /// Throws unless sweep counts are positive and strictly increasing. Returns the
    /// number of points with negative rho (possible only through noise).
    std::size_t validate() const {
        std::size_t negative = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!(points[i].t > 0.0) || (i > 0 && !(points[i].t > points[i - 1].t))) {
                throw invalid_argument("residual curve sweep counts must be positive and increasing");
            }
            negative += points[i].rho < 0.0 ? 1 : 0;
        }
        return negative;
    }
};

struct CollapsePoint {
    std::size_t n = 0;
    double x = 0;  // t * N^-mu
    double y = 0;  // rho * N^b
};

struct CollapseResult {
    double b = 0;
    double mu = 0;
    double quality = 0;
    std::vector<std::size_t> curves_used;
    std::vector<CollapsePoint> points;
    /// Best quality after each objective evaluation; never increases.
    std::vector<double> history;
};

struct CollapseOptions {
    double mu_lo = 0.0;
    double mu_hi = 8.0;
    std::size_t scan_points = 41;
    double tolerance = 1e-4;
};

/// Collapse score at a given mu.
///
/// Points are placed at (X, Y) = (ln t - mu ln N, rho N^b). For every point and every
/// other curve whose X range contains it, the other curve is linearly interpolated
/// between its two bracketing points. The score is the mean squared deviation over all
/// such pairs divided by the variance of all Y values; infinity when no pair overlaps.
inline double collapse_quality(std::span<const ResidualCurve> curves, double b, double mu) {
    struct Rescaled {
        std::vector<double> x, y;
    };
    std::vector<Rescaled> rs(curves.size());
    std::vector<double> all_y;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const double ln_n = std::log(static_cast<double>(curves[c].n));
        const double scale = std::pow(static_cast<double>(curves[c].n), b);
        for (const auto &p : curves[c].points) {
            rs[c].x.push_back(std::log(p.t) - mu * ln_n);
            rs[c].y.push_back(p.rho * scale);
            all_y.push_back(p.rho * scale);
        }
    }
    std::vector<double> sq;
    for (std::size_t c = 0; c < rs.size(); ++c) {
        for (std::size_t i = 0; i < rs[c].x.size(); ++i) {
            const double x = rs[c].x[i];
            for (std::size_t o = 0; o < rs.size(); ++o) {
                const auto &other = rs[o];
                if (o == c || other.x.size() < 2 || x < other.x.front() || x > other.x.back()) {
                    continue;
                }
                auto hi = static_cast<std::size_t>(std::upper_bound(other.x.begin(), other.x.end(), x) -
                                                   other.x.begin());
                hi = std::min(hi, other.x.size() - 1);
                const std::size_t lo = hi - 1;
                const double w = (x - other.x[lo]) / (other.x[hi] - other.x[lo]);
                const double y_hat = other.y[lo] + w * (other.y[hi] - other.y[lo]);
                sq.push_back((rs[c].y[i] - y_hat) * (rs[c].y[i] - y_hat));
            }
        }
    }
    if (sq.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    const auto ms = mean_stderr(all_y);
    std::vector<double> dev;
    for (double y : all_y) {
        dev.push_back((y - ms.mean) * (y - ms.mean));
    }
    double var = pairwise_sum(dev) / static_cast<double>(dev.size());
    if (!(var > 0.0)) {
        var = 1.0;
    }
    return pairwise_sum(sq) / static_cast<double>(sq.size()) / var;
}

/// Finite-size-scaling collapse rho N^b ~ F(t N^-mu) with b fixed.
///
/// mu is found by a uniform scan of [mu_lo, mu_hi] followed by golden-section
/// refinement around the best scan point.
inline CollapseResult fss_collapse(std::span<const ResidualCurve> curves, double b,
                                   const CollapseOptions &options = {}) {
    if (curves.size() < 3) {
        throw invalid_argument("collapse needs curves for at least 3 sizes");
    }
    for (std::size_t c = 0; c < curves.size(); ++c) {
        curves[c].validate();
        for (std::size_t o = 0; o < c; ++o) {
            if (curves[o].n == curves[c].n) {
                throw invalid_argument("collapse curves must have distinct sizes");
            }
        }
    }
    if (!(options.mu_hi > options.mu_lo) || options.scan_points < 2) {
        throw invalid_argument("collapse needs a non-empty mu bracket");
    }

    CollapseResult r;
    r.b = b;
    r.quality = std::numeric_limits<double>::infinity();
    auto eval = [&](double mu) {
        const double q = collapse_quality(curves, b, mu);
        if (q < r.quality) {
            r.quality = q;
            r.mu = mu;
        }
        r.history.push_back(r.quality);
        return q;
    };

    const double step = (options.mu_hi - options.mu_lo) / static_cast<double>(options.scan_points - 1);
    std::size_t best_i = 0;
    double best_q = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < options.scan_points; ++i) {
        const double q = eval(options.mu_lo + step * static_cast<double>(i));
        if (q < best_q) {
            best_q = q;
            best_i = i;
        }
    }
    if (!std::isfinite(best_q)) {
        throw no_overlap_error("rescaled curves never overlap inside the mu bracket");
    }

    constexpr double inv_phi = 0.6180339887498949;
    double a = options.mu_lo + step * static_cast<double>(best_i == 0 ? 0 : best_i - 1);
    double d = std::min(options.mu_hi, options.mu_lo + step * static_cast<double>(best_i + 1));
    double x1 = d - inv_phi * (d - a);
    double x2 = a + inv_phi * (d - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    while (d - a > options.tolerance) {
        if (f1 <= f2) {
            d = x2;
            x2 = x1;
            f2 = f1;
            x1 = d - inv_phi * (d - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (d - a);
            f2 = eval(x2);
        }
    }

    for (const auto &c : curves) {
        r.curves_used.push_back(c.n);
        const auto nn = static_cast<double>(c.n);
        for (const auto &p : c.points) {
            r.points.push_back({c.n, p.t * std::pow(nn, -r.mu), p.rho * std::pow(nn, b)});
        }
    }
    return r;
}

inline constexpr double kParisiConstant = 0.7632;

/// Expected Max-Cut of a dense G(n, p): (p/4) n^2 + P* sqrt(p/4) n^{3/2}.
inline double maxcut_expectation(std::size_t n, double p) {
    if (n < 2) {
        throw invalid_argument("maxcut expectation needs n >= 2");
    }
    if (!(p > 0.0 && p <= 1.0)) {
        throw invalid_argument("edge probability must lie in (0, 1]");
    }
    const auto nn = static_cast<double>(n);
    return p / 4.0 * nn * nn + kParisiConstant * std::sqrt(p / 4.0) * std::pow(nn, 1.5);
}

}  // namespace pbit

#endif  // PBIT_ANALYSIS_HPP
