#ifndef ENTROCORR_ENTROPY_HPP
#define ENTROCORR_ENTROPY_HPP

// The Boltzmann/Shannon entropy functional and the identities attached
// to it: chain decomposition over a conditional family, the averaging
// (concavity) inequality for mixtures, subadditivity under the
// correlation-destroying transform, and mutual information expressed as
// the entropy gap that transform opens.

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "entrocorr/accum.hpp"
#include "entrocorr/dist.hpp"
#include "entrocorr/error.hpp"

namespace entrocorr {

/// Entropy gaps in [-kGapBand, 0) report as 0; anything below that band
/// is a logic bug, not rounding, and raises internal_error.
inline constexpr double kGapBand = 1e-12;

inline constexpr double kSigmaSlack = 1e-12;

/// sigma(x) = -x ln x on [0, 1], with sigma(0) = sigma(1) = 0.
inline double sigma(double x)
{
    if (!(x >= -kSigmaSlack && x <= 1.0 + kSigmaSlack))
        fail(errc::domain_error, "sigma: argument outside [0, 1]");
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return -x * std::log(x);
}

/// Entropy in natural-log units.  The value is canonical in nats; bits
/// and physical (Boltzmann-constant-scaled) readings are views.
class EntropyValue {
public:
    static EntropyValue from_nats(double nats)
    {
        if (std::isnan(nats) || nats < -kGapBand)
            fail(errc::internal_error,
                 "EntropyValue: " + detail::fmt_g(nats) + " nats below the rounding band");
        return EntropyValue(nats < 0.0 ? 0.0 : nats);
    }

    double nats() const noexcept { return nats_; }
    double bits() const noexcept { return nats_ / std::numbers::ln2; }
    double physical(double boltzmann_scale) const noexcept { return boltzmann_scale * nats_; }

private:
    explicit EntropyValue(double n) : nats_(n) {}
    double nats_;
};

namespace detail {

inline double entropy_nats(std::span<const double> probs)
{
    StableSum s;
    for (double p : probs) s.add(sigma(p));
    return s.value();
}

}  // namespace detail

inline EntropyValue entropy(const Marginal& d)
{
    return EntropyValue::from_nats(detail::entropy_nats(d.probs()));
}

inline EntropyValue entropy(const JointDist& j)
{
    return EntropyValue::from_nats(detail::entropy_nats(j.cells()));
}

/// S(p) split per the Shannon chain rule: S(p) = S(P) + sum_i P_i S(zeta_i).
struct ChainDecomposition {
    EntropyValue s_base;   // S(P)
    EntropyValue s_cond;   // sum_i P_i S(zeta_i), undefined rows contribute 0
    EntropyValue s_total;  // their sum
};

inline ChainDecomposition chain_decompose(const JointDist& j)
{
    const ConditionalFamily f = condition_on_a(j);
    const double s_base = entropy(f.base()).nats();
    StableSum cond;
    for (std::size_t i = 0; i < f.num_rows(); ++i)
        if (f.defined(i)) cond.add(f.base()[i] * entropy(f.row(i)).nats());
    const double s_cond = cond.value();
    return {EntropyValue::from_nats(s_base), EntropyValue::from_nats(s_cond),
            EntropyValue::from_nats(s_base + s_cond)};
}

/// S(decorrelate(J)) - S(J).  Nonnegative; zero exactly when the joint
/// factorizes into its marginals.
inline EntropyValue mutual_information(const JointDist& j)
{
    const double gap = entropy(decorrelate(j)).nats() - entropy(j).nats();
    return EntropyValue::from_nats(gap);
}

/// S(mixture) - sum_k w_k S(dists_k), weights normalized.  Nonnegative
/// by the concavity of sigma.
inline double averaging_gap(std::span<const Marginal> dists, const MixtureWeights& weights)
{
    const Marginal u = mixture(dists, weights);
    const std::vector<double> wn = weights.normalized();
    StableSum avg;
    for (std::size_t k = 0; k < dists.size(); ++k) avg.add(wn[k] * entropy(dists[k]).nats());
    return EntropyValue::from_nats(entropy(u).nats() - avg.value()).nats();
}

inline double averaging_gap(const std::vector<Marginal>& dists, const MixtureWeights& weights)
{
    return averaging_gap(std::span<const Marginal>(dists), weights);
}

/// Same gap computed through a conditional family: mixture the defined
/// rows with their base weights.  Equals mutual_information of the
/// recomposed joint.
inline double averaging_gap(const ConditionalFamily& f)
{
    std::vector<Marginal> rows;
    std::vector<double> w;
    for (std::size_t i = 0; i < f.num_rows(); ++i) {
        if (!f.defined(i)) continue;
        rows.push_back(f.row(i));
        w.push_back(f.base()[i]);
    }
    return averaging_gap(rows, MixtureWeights(std::move(w)));
}

/// One-stop record for the central inequality S(p) <= S(pi).
struct SubadditivityReport {
    double s_joint;   // S(p), nats
    double s_pi;      // S(pi) = S(decorrelate(p))
    double s_marg_a;  // S(P)
    double s_marg_b;  // S(Q)
    double gap;       // s_pi - s_joint
    bool holds;       // gap >= -kGapBand
};

inline SubadditivityReport subadditivity_report(const JointDist& j)
{
    const double s_joint = entropy(j).nats();
    const double s_pi = entropy(decorrelate(j)).nats();
    const double s_a = entropy(marginal_a(j)).nats();
    const double s_b = entropy(marginal_b(j)).nats();
    const double gap = s_pi - s_joint;
    return {s_joint, s_pi, s_a, s_b, gap, gap >= -kGapBand};
}

}  // namespace entrocorr

#endif  // ENTROCORR_ENTROPY_HPP
