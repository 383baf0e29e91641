#pragma once

#include <string>

#include "irsa/capture.hpp"
#include "irsa/degree.hpp"

namespace irsa {

// Truncation and convergence controls for the density-evolution recursion.
// The underlying sums run to infinity; these bound them.
struct DeConfig {
    int max_iterations = 10000;      // fixed-point iterations
    double convergence_eps = 1e-12;  // stop when |p_i - p_{i-1}| < eps
    double series_term_tol = 1e-15;  // truncate the slot-update series when a term drops below
    int series_max_terms = 256;
};

struct DeResult {
    double p_inf = 1.0;       // fixed point of the p-recursion
    double plr = 1.0;         // sum_d Lambda_d p_inf^d
    int iterations_used = 0;
    bool converged = false;
};

// Burst-node update, q = f_b(p) = sum_d lambda_d p^(d-1).
double f_b(double p, const EdgeDistribution& lambda_edge);

// Slot-node update under Rayleigh fading with capture,
//   f_s(q) = 1 - sum_{t>=1} (offered q)^(t-1) / z_t^((t-1)/2)
//                 * exp(-(z_t - 1)(1/avg_snr + offered q / z_t)),
// with z_t = (1 + threshold)^t and offered = G/R. Terms are evaluated in log
// domain and accumulated with compensated summation; the result is clamped
// to [0,1]. Throws NumericalError if the series does not reach the term
// tolerance within series_max_terms.
double f_s(double q, double offered, const ChannelModel& ch, const DeConfig& cfg = {});

// Unsimplified double-sum form of the slot update: Poisson slot-degree
// mixture of 1 - sum_r D(r) C(c-1,r-1) q^(r-1) (1-q)^(c-r). Cross-check
// oracle for f_s; c_max == 0 picks the truncation adaptively.
double f_s_reference(double q, double offered, const ChannelModel& ch, int c_max = 0);

// Iterates p_i = f_s(f_b(p_{i-1})) from p_0 = f_s(1) until |p_i - p_{i-1}|
// falls below convergence_eps or max_iterations is hit. Non-convergence is
// reported via the converged flag, never an exception.
DeResult de_fixed_point(const DegreeDistribution& dist, double load, const ChannelModel& ch,
                        const DeConfig& cfg = {});

struct ThresholdSearch {
    double g_lo = 0.05;
    double g_hi = 5.0;        // generous offered-load ceiling
    double resolution = 1e-3;
    double coarse_step = 0.05;
};

struct ThresholdResult {
    double threshold = 0.0;
    bool feasible = false;
    std::string diagnostic;  // nonempty when threshold could not be bracketed
};

// Largest load with PLR below plr_target, located by a coarse scan (which
// also checks that the below/above pattern is monotone in load) followed by
// bisection down to `resolution`. The returned load itself satisfies the
// target. PLR(g_lo) >= target yields threshold 0 with a diagnostic; a
// non-monotone scan pattern throws NumericalError.
ThresholdResult decoding_threshold(const DegreeDistribution& dist, const ChannelModel& ch,
                                   double plr_target, const DeConfig& cfg = {},
                                   const ThresholdSearch& search = {});

}  // namespace irsa
