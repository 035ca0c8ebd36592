// Copyright 2026 qsegsim Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qsegsim/rng.hpp"

namespace qsegsim {

// Per-round logical error rate from a trial count, inverting
// P_fail = (1 - (1-2 p)^rounds) / 2, with binomial error propagation.
struct PerRoundRate {
    double p = 0.0;
    double stderr_ = 0.0;
    bool saturated = false;  // P_fail at or beyond 1/2: inversion singular
    long failures = 0;
    long trials = 0;
};

inline PerRoundRate per_round_rate(long failures, long trials, int rounds) {
    if (trials <= 0 || failures < 0 || failures > trials) {
        throw std::invalid_argument("bad trial counts");
    }
    PerRoundRate out;
    out.failures = failures;
    out.trials = trials;
    double P = static_cast<double>(failures) / trials;
    double sigmaP = std::sqrt(std::max(P * (1 - P), 1e-300) / trials);
    if (failures == 0) {
        // One-sided 95% bound via the rule of three.
        out.p = 0.0;
        double Pup = 3.0 / trials;
        out.stderr_ = (1.0 - std::pow(1.0 - 2.0 * Pup, 1.0 / rounds)) / 2.0;
        return out;
    }
    if (P >= 0.5) {
        out.saturated = true;
        out.p = 0.5;
        out.stderr_ = sigmaP;
        return out;
    }
    out.p = (1.0 - std::pow(1.0 - 2.0 * P, 1.0 / rounds)) / 2.0;
    // dp/dP = (1-2P)^(1/rounds - 1) / rounds
    double deriv = std::pow(1.0 - 2.0 * P, 1.0 / rounds - 1.0) / rounds;
    out.stderr_ = sigmaP * deriv;
    return out;
}

// Logical-rate scaling model:
//   ln p_L = (alpha ln eps2 + beta) (d + delta) + gamma.
struct ScalingFit {
    double alpha = 0, beta = 0, gamma = 0, delta = 0;
    double sigma_alpha = 0, sigma_beta = 0, sigma_gamma = 0, sigma_delta = 0;
    double chi2 = 0;
    int n_points = 0;

    double evaluate(double eps2, double d) const {
        return std::exp((alpha * std::log(eps2) + beta) * (d + delta) + gamma);
    }
    // The d-dependence changes sign where alpha ln eps2 + beta = 0.
    double threshold() const {
        return std::exp(-beta / alpha);
    }
};

// Bundled fit of the shipped simulation campaign; the analyze subcommand
// refits from fresh sweep data.
inline ScalingFit reference_scaling_fit() {
    ScalingFit f;
    f.alpha = 0.5978;
    f.beta = 2.9767;
    f.gamma = -3.9819;
    f.delta = 0.2923;
    f.sigma_alpha = 0.0058;
    f.sigma_beta = 0.0330;
    f.sigma_gamma = 0.0256;
    f.sigma_delta = 0.0413;
    return f;
}

// Conservative empirical model p_L = p_th (eps2/eps2_th)^((d+1)/2). In the
// scaling-model form it has alpha = 0.5, beta = -0.5 ln(eps2_th),
// gamma = ln(p_th) and delta = 1.
struct EmpiricalModel {
    double p_th = 0.02;
    double eps2_th = 0.007;

    double evaluate(double eps2, double d) const {
        return p_th * std::pow(eps2 / eps2_th, (d + 1.0) / 2.0);
    }
    ScalingFit as_scaling() const {
        ScalingFit f;
        f.alpha = 0.5;
        f.beta = -0.5 * std::log(eps2_th);
        f.gamma = std::log(p_th);
        f.delta = 1.0;
        return f;
    }
};

struct GridPoint {
    double eps2 = 0;
    int d = 0;
    double p = 0;       // per-round logical rate
    double stderr_ = 0;  // absolute
};

namespace detail {

// Solves the 4x4 normal equations with plain Gaussian elimination.
inline std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> A,
                                    std::array<double, 4> b) {
    for (int c = 0; c < 4; c++) {
        int piv = c;
        for (int r = c + 1; r < 4; r++) {
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) {
                piv = r;
            }
        }
        std::swap(A[c], A[piv]);
        std::swap(b[c], b[piv]);
        if (std::fabs(A[c][c]) < 1e-14) {
            throw std::runtime_error("degenerate fit system");
        }
        for (int r = 0; r < 4; r++) {
            if (r == c) {
                continue;
            }
            double f = A[r][c] / A[c][c];
            for (int k = c; k < 4; k++) {
                A[r][k] -= f * A[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    return {b[0] / A[0][0], b[1] / A[1][1], b[2] / A[2][2], b[3] / A[3][3]};
}

inline std::array<std::array<double, 4>, 4> invert4(std::array<std::array<double, 4>, 4> A) {
    std::array<std::array<double, 4>, 4> inv{};
    for (int i = 0; i < 4; i++) {
        inv[i][i] = 1.0;
    }
    for (int c = 0; c < 4; c++) {
        int piv = c;
        for (int r = c + 1; r < 4; r++) {
            if (std::fabs(A[r][c]) > std::fabs(A[piv][c])) {
                piv = r;
            }
        }
        std::swap(A[c], A[piv]);
        std::swap(inv[c], inv[piv]);
        double diag = A[c][c];
        if (std::fabs(diag) < 1e-14) {
            throw std::runtime_error("singular covariance system");
        }
        for (int k = 0; k < 4; k++) {
            A[c][k] /= diag;
            inv[c][k] /= diag;
        }
        for (int r = 0; r < 4; r++) {
            if (r == c) {
                continue;
            }
            double f = A[r][c];
            for (int k = 0; k < 4; k++) {
                A[r][k] -= f * A[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

}  // namespace detail

// Weighted nonlinear least squares of the scaling model in log space
// (Levenberg-Marquardt with analytic Jacobian).
inline ScalingFit fit_scaling(const std::vector<GridPoint> &points) {
    if (points.size() < 5) {
        throw std::invalid_argument("need at least 5 points to fit 4 parameters");
    }
    struct Obs {
        double le, d, y, w;  // ln eps2, d, ln p, 1/sigma_ln
    };
    std::vector<Obs> obs;
    for (const auto &pt : points) {
        if (pt.p <= 0 || pt.stderr_ <= 0) {
            continue;
        }
        obs.push_back({std::log(pt.eps2), static_cast<double>(pt.d), std::log(pt.p),
                       pt.p / pt.stderr_});
    }
    if (obs.size() < 5) {
        throw std::invalid_argument("not enough valid points");
    }
    // Linear warm start: ln p = a*le*d + b*d + c + e*le (ignoring the
    // delta cross-terms), then delta from averages.
    double alpha = 0.5, beta = 2.0, gamma = -4.0, delta = 0.5;
    double lambda = 1e-3;
    auto chi2_of = [&](double a, double b, double g, double dd) {
        double c2 = 0;
        for (const auto &o : obs) {
            double r = (o.y - ((a * o.le + b) * (o.d + dd) + g)) * o.w;
            c2 += r * r;
        }
        return c2;
    };
    double chi2 = chi2_of(alpha, beta, gamma, delta);
    for (int it = 0; it < 200; it++) {
        std::array<std::array<double, 4>, 4> JTJ{};
        std::array<double, 4> JTr{};
        for (const auto &o : obs) {
            double model = (alpha * o.le + beta) * (o.d + delta) + gamma;
            double r = (o.y - model) * o.w;
            std::array<double, 4> J = {o.le * (o.d + delta) * o.w, (o.d + delta) * o.w, o.w,
                                       (alpha * o.le + beta) * o.w};
            for (int i = 0; i < 4; i++) {
                for (int j = 0; j < 4; j++) {
                    JTJ[i][j] += J[i] * J[j];
                }
                JTr[i] += J[i] * r;
            }
        }
        auto damped = JTJ;
        for (int i = 0; i < 4; i++) {
            damped[i][i] *= (1.0 + lambda);
        }
        std::array<double, 4> step{};
        try {
            step = detail::solve4(damped, JTr);
        } catch (const std::exception &) {
            break;
        }
        double na = alpha + step[0], nb = beta + step[1], ng = gamma + step[2],
               nd = delta + step[3];
        double nchi = chi2_of(na, nb, ng, nd);
        if (nchi < chi2) {
            alpha = na;
            beta = nb;
            gamma = ng;
            delta = nd;
            lambda = std::max(lambda * 0.3, 1e-9);
            if (chi2 - nchi < 1e-12 * (1 + chi2)) {
                chi2 = nchi;
                break;
            }
            chi2 = nchi;
        } else {
            lambda *= 3.0;
            if (lambda > 1e12) {
                break;
            }
        }
    }
    ScalingFit out;
    out.alpha = alpha;
    out.beta = beta;
    out.gamma = gamma;
    out.delta = delta;
    out.chi2 = chi2;
    out.n_points = static_cast<int>(obs.size());
    // Covariance from the unscaled normal matrix.
    std::array<std::array<double, 4>, 4> JTJ{};
    for (const auto &o : obs) {
        std::array<double, 4> J = {o.le * (o.d + delta) * o.w, (o.d + delta) * o.w, o.w,
                                   (alpha * o.le + beta) * o.w};
        for (int i = 0; i < 4; i++) {
            for (int j = 0; j < 4; j++) {
                JTJ[i][j] += J[i] * J[j];
            }
        }
    }
    try {
        auto cov = detail::invert4(JTJ);
        out.sigma_alpha = std::sqrt(std::max(cov[0][0], 0.0));
        out.sigma_beta = std::sqrt(std::max(cov[1][1], 0.0));
        out.sigma_gamma = std::sqrt(std::max(cov[2][2], 0.0));
        out.sigma_delta = std::sqrt(std::max(cov[3][3], 0.0));
    } catch (const std::exception &) {
        // Leave uncertainties at zero for degenerate geometry.
    }
    return out;
}

// Threshold estimate: crossing of p_L(eps2) curves for successive d values,
// via power-law interpolation in log-log space, bootstrap for the error.
struct ThresholdEstimate {
    double eps2_th = 0;
    double stderr_ = 0;
    bool found = false;
    std::vector<double> pair_crossings;
};

namespace detail {

// log-log linear interpolation of one d-curve, returns ln p at ln eps.
struct Curve {
    std::vector<double> le, lp;
    double eval(double x) const {
        if (x <= le.front()) {
            return lp.front() + (lp[1] - lp[0]) * (x - le[0]) / (le[1] - le[0]);
        }
        if (x >= le.back()) {
            size_t n = le.size();
            return lp[n - 1] + (lp[n - 1] - lp[n - 2]) * (x - le[n - 1]) / (le[n - 1] - le[n - 2]);
        }
        for (size_t i = 1; i < le.size(); i++) {
            if (x <= le[i]) {
                double t = (x - le[i - 1]) / (le[i] - le[i - 1]);
                return lp[i - 1] + t * (lp[i] - lp[i - 1]);
            }
        }
        return lp.back();
    }
};

inline std::optional<double> curve_crossing(const Curve &a, const Curve &b, double lo,
                                            double hi) {
    auto f = [&](double x) {
        return a.eval(x) - b.eval(x);
    };
    double flo = f(lo), fhi = f(hi);
    if (flo == 0) {
        return lo;
    }
    if (flo * fhi > 0) {
        return std::nullopt;
    }
    for (int it = 0; it < 80; it++) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0) {
            return mid;
        }
        if (flo * fm < 0) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

inline ThresholdEstimate find_threshold(const std::vector<GridPoint> &grid, uint64_t seed = 17,
                                        int bootstrap = 200) {
    std::map<int, std::vector<GridPoint>> by_d;
    for (const auto &p : grid) {
        if (p.p > 0) {
            by_d[p.d].push_back(p);
        }
    }
    if (by_d.size() < 2) {
        throw std::invalid_argument("need at least two distinct d values");
    }
    std::vector<int> ds;
    for (auto &[d, pts] : by_d) {
        std::sort(pts.begin(), pts.end(), [](auto &a, auto &b) {
            return a.eps2 < b.eps2;
        });
        if (pts.size() >= 2) {
            ds.push_back(d);
        }
    }
    auto estimate = [&](std::mt19937_64 *rng) -> std::optional<double> {
        std::vector<double> crossings;
        for (size_t i = 0; i + 1 < ds.size(); i++) {
            detail::Curve ca, cb;
            double lo = -1e30, hi = 1e30;
            for (int which = 0; which < 2; which++) {
                const auto &pts = by_d[ds[i + which]];
                detail::Curve &c = which ? cb : ca;
                for (const auto &p : pts) {
                    double lp = std::log(p.p);
                    if (rng) {
                        std::normal_distribution<double> g(0.0, p.stderr_ / p.p);
                        lp += g(*rng);
                    }
                    c.le.push_back(std::log(p.eps2));
                    c.lp.push_back(lp);
                }
                lo = std::max(lo, c.le.front());
                hi = std::min(hi, c.le.back());
            }
            if (lo >= hi) {
                continue;
            }
            auto x = detail::curve_crossing(ca, cb, lo, hi);
            if (x) {
                crossings.push_back(std::exp(*x));
            }
        }
        if (crossings.empty()) {
            return std::nullopt;
        }
        double sum = 0;
        for (double c : crossings) {
            sum += c;
        }
        return sum / crossings.size();
    };

    ThresholdEstimate out;
    auto central = estimate(nullptr);
    if (!central) {
        out.found = false;
        return out;
    }
    out.found = true;
    out.eps2_th = *central;
    // Record the central per-pair crossings.
    {
        std::vector<double> crossings;
        for (size_t i = 0; i + 1 < ds.size(); i++) {
            detail::Curve ca, cb;
            double lo = -1e30, hi = 1e30;
            for (int which = 0; which < 2; which++) {
                const auto &pts = by_d[ds[i + which]];
                detail::Curve &c = which ? cb : ca;
                for (const auto &p : pts) {
                    c.le.push_back(std::log(p.eps2));
                    c.lp.push_back(std::log(p.p));
                }
                lo = std::max(lo, c.le.front());
                hi = std::min(hi, c.le.back());
            }
            if (lo >= hi) {
                continue;
            }
            auto x = detail::curve_crossing(ca, cb, lo, hi);
            if (x) {
                out.pair_crossings.push_back(std::exp(*x));
            }
        }
    }
    std::vector<double> samples;
    for (int b = 0; b < bootstrap; b++) {
        auto rng = trial_rng(seed, b);
        auto e = estimate(&rng);
        if (e) {
            samples.push_back(*e);
        }
    }
    if (samples.size() > 1) {
        double mean = 0;
        for (double s : samples) {
            mean += s;
        }
        mean /= samples.size();
        double var = 0;
        for (double s : samples) {
            var += (s - mean) * (s - mean);
        }
        out.stderr_ = std::sqrt(var / (samples.size() - 1));
    }
    return out;
}

// Smallest segment size s = d + 2 whose surface-code CNOT error rate
// 14 d p_L(eps2, d) meets the target. d is rounded up to odd.
struct SegmentRequirement {
    int d = 0;
    int s = 0;
    bool attainable = false;
    double p_cnot = 0;
};

inline SegmentRequirement required_segment(const ScalingFit &fit, double eps2,
                                           double target_p_cnot, bool odd_d = true,
                                           int d_max = 4001) {
    SegmentRequirement out;
    if (eps2 >= fit.threshold()) {
        return out;  // unattainable above threshold
    }
    for (int d = 3; d <= d_max; d++) {
        double p = 14.0 * d * fit.evaluate(eps2, d);
        if (p <= target_p_cnot) {
            if (odd_d && d % 2 == 0) {
                int d2 = d + 1;
                out.d = d2;
                out.p_cnot = 14.0 * d2 * fit.evaluate(eps2, d2);
            } else {
                out.d = d;
                out.p_cnot = p;
            }
            out.s = out.d + 2;
            out.attainable = true;
            return out;
        }
    }
    return out;
}

// Concatenated-level scaling ln P = kappa ln p + eta.
struct GaugeLevelFit {
    int level = 0;
    double kappa = 0, eta = 0;
    double sigma_kappa = 0, sigma_eta = 0;
    int n_points = 0;
};

inline std::array<double, 4> reference_kappa() {
    return {0.9973, 1.0303, 2.0717, 3.4795};
}
inline std::array<double, 4> reference_eta() {
    return {4.1141, 5.8552, 18.7274, 36.4548};
}

// Average number of logical CNOT gates before one logical error.
// Level 0: 1/p_cnot from the surface code alone; levels 3 and 4 use the
// concatenated-code scaling.
inline double gates_before_failure(const ScalingFit &fit, double eps2, int s, int level) {
    int d = s - 2;
    if (d < 1) {
        throw std::invalid_argument("segment too small");
    }
    double p_cnot = 14.0 * d * fit.evaluate(eps2, d);
    if (p_cnot >= 1.0) {
        throw std::invalid_argument("above threshold: no error correction benefit");
    }
    if (level == 0) {
        return 1.0 / p_cnot;
    }
    if (level != 3 && level != 4) {
        throw std::invalid_argument("supported encoding levels: 0, 3, 4");
    }
    double kappa = reference_kappa()[level - 1];
    double eta = reference_eta()[level - 1];
    double P = std::exp(kappa * std::log(p_cnot) + eta);
    return 1.0 / P;
}

// Surface-code qubits per gauge-code logical qubit at level n: one
// information patch in every four, 6 lower-level qubits per level.
inline long gauge_overhead_qubits(int level) {
    long q = 4;
    for (int i = 0; i < level; i++) {
        q *= 6;
    }
    return q;
}


// Weighted linear fit of ln P = kappa ln p + eta for one concatenation
// level, with parameter uncertainties from the covariance.
struct GaugeCurvePoint {
    double p_cnot = 0;
    long trials = 0;
    long failures = 0;
};

inline GaugeLevelFit fit_gauge_level(int level, const std::vector<GaugeCurvePoint> &pts) {
    GaugeLevelFit out;
    out.level = level;
    double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
    int n = 0;
    for (const auto &pt : pts) {
        if (pt.failures <= 0 || pt.trials <= 0) {
            continue;
        }
        double P = static_cast<double>(pt.failures) / pt.trials;
        if (P >= 0.2) {
            continue;  // saturation bends the curve; fit the scaling regime
        }
        double sigmaP = std::sqrt(P * (1 - P) / pt.trials);
        double y = std::log(P), x = std::log(pt.p_cnot);
        double w = (P / sigmaP) * (P / sigmaP);  // 1/sigma_lnP^2
        sw += w;
        swx += w * x;
        swy += w * y;
        swxx += w * x * x;
        swxy += w * x * y;
        n++;
    }
    if (n < 2) {
        throw std::invalid_argument("need at least 2 unsaturated points per level");
    }
    double det = sw * swxx - swx * swx;
    if (std::fabs(det) < 1e-12) {
        throw std::runtime_error("degenerate gauge fit");
    }
    out.kappa = (sw * swxy - swx * swy) / det;
    out.eta = (swxx * swy - swx * swxy) / det;
    out.sigma_kappa = std::sqrt(sw / det);
    out.sigma_eta = std::sqrt(swxx / det);
    out.n_points = n;
    return out;
}

// Crossing of two fitted level curves: P_a(p) = P_b(p).
inline double gauge_crossing(const GaugeLevelFit &a, const GaugeLevelFit &b) {
    if (a.kappa == b.kappa) {
        throw std::invalid_argument("parallel level curves have no crossing");
    }
    return std::exp(-(b.eta - a.eta) / (b.kappa - a.kappa));
}

}  // namespace qsegsim
