#ifndef ENTROCORR_MAXENT_HPP
#define ENTROCORR_MAXENT_HPP

// Maximum-entropy inference over a finite state set: given feature
// functions and required expectations, find the least-biased
// distribution.  The solution has exponential-family form
// p_i ~ exp(-sum_k lambda_k f_k(i)); the solver runs damped Newton on
// the convex dual log Z(lambda) + lambda . F.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "entrocorr/accum.hpp"
#include "entrocorr/dist.hpp"
#include "entrocorr/entropy.hpp"
#include "entrocorr/error.hpp"

namespace entrocorr {

/// A multiplier past this magnitude with a stalled residual means the
/// target sits on or outside the achievable hull.
inline constexpr double kMultiplierCap = 1e3;
inline constexpr int kStagnationWindow = 25;
inline constexpr double kConstantFeatureTol = 1e-12;

class MaxEntProblem {
public:
    MaxEntProblem(std::size_t states, std::vector<std::vector<double>> features,
                  std::vector<double> targets)
        : states_(states), features_(std::move(features)), targets_(std::move(targets))
    {
        if (states_ == 0) fail(errc::empty_shape, "MaxEntProblem: zero states");
        if (features_.size() != targets_.size())
            fail(errc::shape_mismatch, "MaxEntProblem: feature count != target count");
        for (std::size_t k = 0; k < features_.size(); ++k) {
            const auto& f = features_[k];
            if (f.size() != states_)
                fail(errc::shape_mismatch,
                     "MaxEntProblem: feature " + std::to_string(k) + " has wrong length");
            for (double v : f)
                if (!std::isfinite(v))
                    fail(errc::domain_error, "MaxEntProblem: non-finite feature value");
            if (!std::isfinite(targets_[k]))
                fail(errc::domain_error, "MaxEntProblem: non-finite target");

            const auto [lo_it, hi_it] = std::minmax_element(f.begin(), f.end());
            const double lo = *lo_it, hi = *hi_it;
            if (hi - lo <= kConstantFeatureTol) {
                // Constant feature: only satisfiable at its own value, and
                // then it constrains nothing, so it is dropped.
                if (std::abs(targets_[k] - lo) > kConstantFeatureTol)
                    fail(errc::infeasible_target,
                         "MaxEntProblem: constant feature " + std::to_string(k) +
                             " with target != constant");
            } else {
                if (!(targets_[k] > lo && targets_[k] < hi))
                    fail(errc::infeasible_target,
                         "MaxEntProblem: target " + detail::fmt_g(targets_[k]) +
                             " not strictly inside (" + detail::fmt_g(lo) + ", " +
                             detail::fmt_g(hi) + ")");
                active_.push_back(k);
            }
        }
    }

    std::size_t states() const noexcept { return states_; }
    std::size_t num_features() const noexcept { return features_.size(); }
    const std::vector<std::vector<double>>& features() const noexcept { return features_; }
    const std::vector<double>& targets() const noexcept { return targets_; }
    /// Indices of non-constant features, the ones the solver works on.
    const std::vector<std::size_t>& active() const noexcept { return active_; }

private:
    std::size_t states_;
    std::vector<std::vector<double>> features_;
    std::vector<double> targets_;
    std::vector<std::size_t> active_;
};

struct MaxEntSolution {
    Marginal dist;
    std::vector<double> multipliers;  // per original feature; dropped constants get 0
    EntropyValue entropy;
    double residual;                  // max_k |achieved expectation - target|
    int iterations;
    std::vector<double> dual_trace;   // dual value after each accepted step, non-increasing
};

/// p_i = exp(-beta E_i) / Z, computed with max-shift.  beta = 0 gives uniform.
inline Marginal boltzmann(std::span<const double> energies, double beta)
{
    if (energies.empty()) fail(errc::empty_input, "boltzmann: no energies");
    if (!(beta >= 0.0)) fail(errc::domain_error, "boltzmann: beta must be >= 0");
    for (double e : energies)
        if (!std::isfinite(e)) fail(errc::domain_error, "boltzmann: non-finite energy");

    double tmax = -beta * energies[0];
    for (double e : energies) tmax = std::max(tmax, -beta * e);
    std::vector<double> w(energies.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(-beta * energies[i] - tmax);
    return Marginal(std::move(w), Normalize::renormalize);
}

namespace detail {

// Cholesky solve of (H + jitter I) d = rhs for a small dense SPD system.
// Returns false if the factorization breaks down.
inline bool cholesky_solve(std::vector<double> h, std::size_t c, double jitter,
                           std::vector<double>& d, const std::vector<double>& rhs)
{
    for (std::size_t i = 0; i < c; ++i) h[i * c + i] += jitter;
    // in-place lower-triangular factor
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = h[i * c + j];
            for (std::size_t k = 0; k < j; ++k) s -= h[i * c + k] * h[j * c + k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                h[i * c + i] = std::sqrt(s);
            } else {
                h[i * c + j] = s / h[j * c + j];
            }
        }
    }
    d = rhs;
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t k = 0; k < i; ++k) d[i] -= h[i * c + k] * d[k];
        d[i] /= h[i * c + i];
    }
    for (std::size_t i = c; i-- > 0;) {
        for (std::size_t k = i + 1; k < c; ++k) d[i] -= h[k * c + i] * d[k];
        d[i] /= h[i * c + i];
    }
    return true;
}

struct DualState {
    std::vector<double> p;         // current distribution
    std::vector<double> expect;    // E_p[f_a] per active feature
    double log_z;
    double dual;
    double residual;
};

// Evaluates p, expectations, log-partition and dual at lambda.
inline DualState eval_dual(const MaxEntProblem& prob, const std::vector<double>& lambda)
{
    const auto& act = prob.active();
    const std::size_t k = prob.states();
    const std::size_t c = act.size();

    DualState st;
    st.p.assign(k, 0.0);
    std::vector<double> t(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        double acc = 0.0;
        for (std::size_t a = 0; a < c; ++a) acc -= lambda[a] * prob.features()[act[a]][i];
        t[i] = acc;
    }
    const double shift = *std::max_element(t.begin(), t.end());
    StableSum z;
    for (std::size_t i = 0; i < k; ++i) {
        st.p[i] = std::exp(t[i] - shift);
        z.add(st.p[i]);
    }
    const double zv = z.value();
    for (double& x : st.p) x /= zv;
    st.log_z = shift + std::log(zv);

    st.expect.assign(c, 0.0);
    st.residual = 0.0;
    for (std::size_t a = 0; a < c; ++a) {
        StableSum e;
        for (std::size_t i = 0; i < k; ++i) e.add(st.p[i] * prob.features()[act[a]][i]);
        st.expect[a] = e.value();
        st.residual = std::max(st.residual, std::abs(st.expect[a] - prob.targets()[act[a]]));
    }
    double lf = 0.0;
    for (std::size_t a = 0; a < c; ++a) lf += lambda[a] * prob.targets()[act[a]];
    st.dual = st.log_z + lf;
    return st;
}

}  // namespace detail

inline MaxEntSolution solve_maxent(const MaxEntProblem& prob, double tol = 1e-10,
                                   int max_iter = 500)
{
    if (!(tol > 0.0)) fail(errc::non_positive_tolerance, "solve_maxent: tol must be > 0");
    if (max_iter < 1) fail(errc::domain_error, "solve_maxent: max_iter must be >= 1");

    const auto& act = prob.active();
    const std::size_t k = prob.states();
    const std::size_t c = act.size();

    auto finish = [&](const detail::DualState& st, const std::vector<double>& lambda,
                      int iters, std::vector<double> trace) {
        std::vector<double> mult(prob.num_features(), 0.0);
        for (std::size_t a = 0; a < c; ++a) mult[act[a]] = lambda[a];
        Marginal dist(std::vector<double>(st.p), Normalize::strict);
        EntropyValue s = entropy(dist);
        return MaxEntSolution{std::move(dist), std::move(mult), s, st.residual, iters,
                              std::move(trace)};
    };

    std::vector<double> lambda(c, 0.0);
    detail::DualState st = detail::eval_dual(prob, lambda);
    std::vector<double> trace{st.dual};

    if (c == 0 || st.residual <= tol) return finish(st, lambda, 0, std::move(trace));

    double best_residual = st.residual;
    int stagnant = 0;

    for (int iter = 1; iter <= max_iter; ++iter) {
        // Newton system: covariance of active features under p.
        std::vector<double> hess(c * c, 0.0);
        for (std::size_t a = 0; a < c; ++a) {
            for (std::size_t b = a; b < c; ++b) {
                StableSum s;
                for (std::size_t i = 0; i < k; ++i)
                    s.add(st.p[i] * (prob.features()[act[a]][i] - st.expect[a]) *
                          (prob.features()[act[b]][i] - st.expect[b]));
                hess[a * c + b] = hess[b * c + a] = s.value();
            }
        }
        std::vector<double> grad(c);  // gradient of the dual: F - E
        for (std::size_t a = 0; a < c; ++a) grad[a] = prob.targets()[act[a]] - st.expect[a];

        double trace_h = 0.0;
        for (std::size_t a = 0; a < c; ++a) trace_h += hess[a * c + a];
        std::vector<double> rhs(c);
        for (std::size_t a = 0; a < c; ++a) rhs[a] = -grad[a];

        std::vector<double> step;
        bool solved = false;
        for (double jitter : {0.0, 1e-14 * trace_h, 1e-10 * trace_h, 1e-6 * trace_h}) {
            if (detail::cholesky_solve(hess, c, jitter, step, rhs)) {
                solved = true;
                break;
            }
        }
        if (!solved) {
            // singular curvature; fall back to steepest descent on the dual
            step = rhs;
        }

        // Step halving until the dual decreases.  Near the minimum the dual
        // flattens to machine precision before the residual does; a step
        // that leaves the dual flat but shrinks the residual still counts.
        const double flat = 1e-14 * (1.0 + std::abs(st.dual));
        double t = 1.0;
        bool moved = false;
        std::vector<double> cand(c);
        detail::DualState cand_st;
        for (int h = 0; h < 60; ++h, t *= 0.5) {
            for (std::size_t a = 0; a < c; ++a) cand[a] = lambda[a] + t * step[a];
            cand_st = detail::eval_dual(prob, cand);
            if (cand_st.dual < st.dual ||
                (cand_st.dual <= st.dual + flat && cand_st.residual < st.residual)) {
                moved = true;
                break;
            }
        }
        if (moved) {
            lambda = cand;
            st = cand_st;
            trace.push_back(st.dual);
        }

        if (st.residual <= tol) return finish(st, lambda, iter, std::move(trace));

        if (st.residual < best_residual * (1.0 - 1e-9)) {
            best_residual = st.residual;
            stagnant = 0;
        } else {
            ++stagnant;
        }
        double lmax = 0.0;
        for (double l : lambda) lmax = std::max(lmax, std::abs(l));
        if (lmax > kMultiplierCap && stagnant >= kStagnationWindow)
            fail(errc::infeasible_target,
                 "solve_maxent: multiplier magnitude " + detail::fmt_g(lmax) +
                     " with stagnant residual " + detail::fmt_g(st.residual) +
                     "; target lies on or outside the achievable hull");
        if (!moved && stagnant >= kStagnationWindow)
            fail(errc::no_convergence,
                 "solve_maxent: no progress at residual " + detail::fmt_g(st.residual));
    }
    fail(errc::no_convergence,
         "solve_maxent: residual " + detail::fmt_g(st.residual) + " after " +
             std::to_string(max_iter) + " iterations");
}

}  // namespace entrocorr

#endif  // ENTROCORR_MAXENT_HPP
