#include "irsa/de.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "irsa/errors.hpp"

namespace irsa {

namespace {

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double value) {
        const double y = value - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Per-t constants of the slot-update series for a fixed channel:
//   term_t(mu) = exp((t-1) log mu - (t-1)/2 * w_t - c1_t - c2_t * mu)
// with w_t = t log(1+b), z_t = e^{w_t}, c1_t = (z_t-1)/avg_snr and
// c2_t = (z_t-1)/z_t. Terms with c1_t beyond e^-745 underflow for every mu
// and bound the table length.
class SlotSeries {
public:
    SlotSeries(const ChannelModel& ch, int max_terms) {
        const double log_b1 = std::log1p(ch.threshold);
        const double w_dead = std::log(745.0 * ch.avg_snr);
        w_.reserve(16);
        for (int t = 1; t <= max_terms; ++t) {
            const double w = t * log_b1;
            if (w > w_dead) break;
            const double z = std::exp(w);
            w_.push_back(w);
            c1_.push_back((z - 1.0) / ch.avg_snr);
            c2_.push_back((z - 1.0) / z);
        }
        exhausted_ = static_cast<int>(w_.size()) == max_terms;
    }

    // p = 1 - sum_t term_t(mu), clamped to [0,1]
    double eval(double mu, const DeConfig& cfg) const {
        KahanSum acc;
        const double log_mu = mu > 0.0 ? std::log(mu) : 0.0;
        double prev_term = 0.0;
        bool tail_ok = !exhausted_;
        for (std::size_t i = 0; i < w_.size(); ++i) {
            const double t_minus_1 = static_cast<double>(i);
            double log_term;
            if (i == 0) {
                log_term = -c1_[0] - c2_[0] * mu;
            } else if (mu == 0.0) {
                tail_ok = true;
                break;
            } else {
                log_term = t_minus_1 * log_mu - 0.5 * t_minus_1 * w_[i] - c1_[i] - c2_[i] * mu;
            }
            const double term = log_term < -745.0 ? 0.0 : std::exp(log_term);
            acc.add(term);
            // the log-term is concave in t, so once terms decrease they keep
            // decreasing; only then is a small term a valid stopping point
            if (i > 0 && term <= prev_term && term < cfg.series_term_tol) {
                tail_ok = true;
                break;
            }
            prev_term = term;
        }
        if (!tail_ok)
            throw NumericalError("f_s: series did not reach term tolerance within " +
                                 std::to_string(cfg.series_max_terms) + " terms");
        const double p = 1.0 - acc.sum;
        return std::clamp(p, 0.0, 1.0);
    }

private:
    std::vector<double> w_, c1_, c2_;
    bool exhausted_ = false;
};

double plr_of(const DegreeDistribution& dist, double p_inf) { return dist.eval(p_inf); }

}  // namespace

double f_b(double p, const EdgeDistribution& lambda_edge) { return lambda_edge.eval(p); }

double f_s(double q, double offered, const ChannelModel& ch, const DeConfig& cfg) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("f_s: q must lie in [0,1]");
    if (!(offered >= 0.0)) throw std::invalid_argument("f_s: offered load must be >= 0");
    return SlotSeries(ch, cfg.series_max_terms).eval(offered * q, cfg);
}

double f_s_reference(double q, double offered, const ChannelModel& ch, int c_max) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("f_s_reference: q must lie in [0,1]");
    if (!(offered >= 0.0)) throw std::invalid_argument("f_s_reference: offered load must be >= 0");
    if (offered == 0.0) return 1.0 - capture_prob(1, ch);
    if (c_max == 0) {
        // Poisson(offered) tail below 1e-13: mean + wide guard band
        c_max = static_cast<int>(offered + 14.0 * std::sqrt(offered) + 40.0);
    }
    std::vector<double> d_of_r(static_cast<std::size_t>(c_max) + 1, 0.0);
    for (int r = 1; r <= c_max; ++r) d_of_r[r] = capture_prob(r, ch);
    // rho_c = e^-offered offered^(c-1)/(c-1)!; tail mass must be negligible
    double rho = std::exp(-offered);
    double rho_cum = 0.0;
    double decoded = 0.0;  // sum_c rho_c sum_r D(r) C(c-1,r-1) q^(r-1) (1-q)^(c-r)
    for (int c = 1; c <= c_max; ++c) {
        // C(c-1, r-1) q^(r-1) (1-q)^(c-r), updated across r from its r = 1 value
        double binom = std::pow(1.0 - q, c - 1);
        double inner = 0.0;
        for (int r = 1; r <= c; ++r) {
            inner += d_of_r[r] * binom;
            binom *= q * static_cast<double>(c - r) / ((1.0 - q) * r);
            if (!std::isfinite(binom)) break;  // q == 1 handled below
        }
        if (q == 1.0) inner = d_of_r[c];  // only r == c survives
        decoded += rho * inner;
        rho_cum += rho;
        rho *= offered / c;
    }
    if (1.0 - rho_cum > 1e-12)
        throw NumericalError("f_s_reference: slot-degree truncation tail exceeds 1e-12");
    return std::clamp(1.0 - decoded, 0.0, 1.0);
}

DeResult de_fixed_point(const DegreeDistribution& dist, double load, const ChannelModel& ch,
                        const DeConfig& cfg) {
    if (!(load >= 0.0)) throw std::invalid_argument("de_fixed_point: load must be >= 0");
    const EdgeDistribution lambda = to_edge_perspective(dist);
    const SlotSeries series(ch, cfg.series_max_terms);
    const double offered = load * dist.avg_degree();

    DeResult result;
    double p = series.eval(offered, cfg);  // p_0 = f_s(1)
    result.iterations_used = 0;
    for (int i = 1; i <= cfg.max_iterations; ++i) {
        const double q = f_b(p, lambda);
        double p_next = series.eval(offered * q, cfg);
        if (p_next > p + 1e-9)
            throw NumericalError("de_fixed_point: p-sequence increased, recursion is not monotone");
        p_next = std::min(p_next, p);  // keep the sequence monotone under fp noise
        const double delta = p - p_next;
        p = p_next;
        result.iterations_used = i;
        if (delta < cfg.convergence_eps) {
            result.converged = true;
            break;
        }
    }
    result.p_inf = p;
    result.plr = plr_of(dist, p);
    return result;
}

namespace {

// Decides PLR(load) < target without always converging the recursion: the
// p-sequence is nonincreasing, so PLR_i = Lambda(p_i) is an upper bound on
// the limit and the first dip below target settles the question.
bool plr_below_target(const DegreeDistribution& dist, const EdgeDistribution& lambda,
                      const SlotSeries& series, double offered, double target,
                      const DeConfig& cfg) {
    double p = series.eval(offered, cfg);
    if (plr_of(dist, p) < target) return true;
    for (int i = 1; i <= cfg.max_iterations; ++i) {
        const double q = f_b(p, lambda);
        const double p_next = std::min(series.eval(offered * q, cfg), p);
        const double delta = p - p_next;
        p = p_next;
        if (plr_of(dist, p) < target) return true;
        if (delta < cfg.convergence_eps) return false;
    }
    return false;  // not converged and still above target
}

}  // namespace

ThresholdResult decoding_threshold(const DegreeDistribution& dist, const ChannelModel& ch,
                                   double plr_target, const DeConfig& cfg,
                                   const ThresholdSearch& search) {
    if (!(plr_target > 0.0 && plr_target < 1.0))
        throw std::invalid_argument("decoding_threshold: plr_target must lie in (0,1)");
    if (!(search.g_lo >= 0.0 && search.g_hi > search.g_lo))
        throw std::invalid_argument("decoding_threshold: invalid search window");

    const EdgeDistribution lambda = to_edge_perspective(dist);
    const SlotSeries series(ch, cfg.series_max_terms);
    const double mean = dist.avg_degree();
    const auto below = [&](double load) {
        return plr_below_target(dist, lambda, series, load * mean, plr_target, cfg);
    };

    if (!below(search.g_lo)) {
        ThresholdResult res;
        res.threshold = 0.0;
        res.feasible = false;
        res.diagnostic = "PLR at the bottom of the search window already exceeds the target";
        return res;
    }

    // coarse scan: bracket the waterfall and check the below/above pattern is
    // monotone in load before trusting bisection
    double lo = search.g_lo;
    double hi = -1.0;
    for (double g = search.g_lo + search.coarse_step; g < search.g_hi + 0.5 * search.coarse_step;
         g += search.coarse_step) {
        const double load = std::min(g, search.g_hi);
        if (below(load)) {
            if (hi >= 0.0)
                throw NumericalError(
                    "decoding_threshold: PLR is not monotone in load across the coarse scan");
            lo = load;
        } else if (hi < 0.0) {
            hi = load;
        }
    }
    ThresholdResult res;
    res.feasible = true;
    if (hi < 0.0) {
        res.threshold = search.g_hi;
        res.diagnostic = "target met across the whole search window";
        return res;
    }
    while (hi - lo > search.resolution) {
        const double mid = 0.5 * (lo + hi);
        if (below(mid))
            lo = mid;
        else
            hi = mid;
    }
    res.threshold = lo;  // certified: PLR(lo) < target
    return res;
}

}  // namespace irsa
