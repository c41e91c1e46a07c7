#ifndef ENTROCORR_DIST_HPP
#define ENTROCORR_DIST_HPP

// Discrete distributions over one and two variables: validated
// construction, marginalization, the correlation-destroying transform
// (joint -> outer product of its marginals), conditional decomposition
// and recomposition, and weighted mixtures.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "entrocorr/accum.hpp"
#include "entrocorr/error.hpp"

namespace entrocorr {

/// Entries in [-kNegativeDust, 0) are clamped to 0; anything below is an error.
inline constexpr double kNegativeDust = 1e-12;

/// Strict construction accepts totals in [1 - kStrictBand, 1 + kStrictBand]
/// and renormalizes exactly; renormalizing construction accepts any positive total.
inline constexpr double kStrictBand = 1e-6;

enum class Normalize { strict, renormalize };

namespace detail {

// Clamps dust, rejects genuine negatives and non-finite entries, and
// returns the compensated total.
inline double clean_and_total(std::span<double> w, const char* what)
{
    for (double& x : w) {
        if (std::isnan(x) || std::isinf(x))
            fail(errc::domain_error, std::string(what) + ": non-finite entry");
        if (x < -kNegativeDust)
            fail(errc::negative_mass, std::string(what) + ": entry below -1e-12");
        if (x < 0.0) x = 0.0;
    }
    StableSum s;
    for (double x : w) s.add(x);
    return s.value();
}

inline void normalize_in_place(std::span<double> w, double total, Normalize mode, const char* what)
{
    if (total <= 0.0)
        fail(errc::zero_total, std::string(what) + ": all entries zero");
    if (mode == Normalize::strict && std::abs(total - 1.0) > kStrictBand)
        fail(errc::not_normalized,
             std::string(what) + ": total " + fmt_g(total) + " outside strict band");
    for (double& x : w) x /= total;
}

}  // namespace detail

/// Probability vector over the states of one variable.  Entries are
/// nonnegative and sum to 1 after construction-time renormalization.
class Marginal {
public:
    explicit Marginal(std::vector<double> w, Normalize mode = Normalize::strict)
        : w_(std::move(w))
    {
        if (w_.empty()) fail(errc::empty_shape, "Marginal: no states");
        const double total = detail::clean_and_total(w_, "Marginal");
        detail::normalize_in_place(w_, total, mode, "Marginal");
    }

    std::size_t size() const noexcept { return w_.size(); }
    double at(std::size_t i) const { return w_.at(i); }
    double operator[](std::size_t i) const noexcept { return w_[i]; }
    std::span<const double> probs() const noexcept { return w_; }

private:
    std::vector<double> w_;
};

/// Joint distribution over two discrete variables A (rows, n states) and
/// B (columns, m states).  Dense row-major storage; immutable once built.
class JointDist {
public:
    JointDist(std::size_t n, std::size_t m, std::vector<double> cells,
              Normalize mode = Normalize::strict)
        : n_(n), m_(m), p_(std::move(cells))
    {
        if (n_ == 0 || m_ == 0) fail(errc::empty_shape, "JointDist: empty shape");
        if (p_.size() != n_ * m_)
            fail(errc::shape_mismatch, "JointDist: cell count does not match n*m");
        const double total = detail::clean_and_total(p_, "JointDist");
        detail::normalize_in_place(p_, total, mode, "JointDist");
    }

    static JointDist from_rows(const std::vector<std::vector<double>>& rows,
                               Normalize mode = Normalize::strict)
    {
        if (rows.empty() || rows.front().empty())
            fail(errc::empty_shape, "JointDist: empty matrix");
        const std::size_t m = rows.front().size();
        std::vector<double> cells;
        cells.reserve(rows.size() * m);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m)
                fail(errc::shape_mismatch,
                     "JointDist: row " + std::to_string(i) + " has " +
                         std::to_string(rows[i].size()) + " columns, expected " +
                         std::to_string(m));
            cells.insert(cells.end(), rows[i].begin(), rows[i].end());
        }
        return JointDist(rows.size(), m, std::move(cells), mode);
    }

    /// States of variable A (row count).
    std::size_t rows() const noexcept { return n_; }
    /// States of variable B (column count).
    std::size_t cols() const noexcept { return m_; }

    double at(std::size_t i, std::size_t j) const
    {
        if (i >= n_ || j >= m_) fail(errc::domain_error, "JointDist: index out of range");
        return p_[i * m_ + j];
    }

    std::span<const double> row(std::size_t i) const
    {
        if (i >= n_) fail(errc::domain_error, "JointDist: row out of range");
        return {p_.data() + i * m_, m_};
    }

    std::span<const double> cells() const noexcept { return p_; }

private:
    std::size_t n_;
    std::size_t m_;
    std::vector<double> p_;  // row-major
};

/// P_i = sum_j p_ij.
inline Marginal marginal_a(const JointDist& j)
{
    std::vector<double> w(j.rows());
    for (std::size_t i = 0; i < j.rows(); ++i) {
        StableSum s;
        for (double x : j.row(i)) s.add(x);
        w[i] = s.value();
    }
    return Marginal(std::move(w), Normalize::strict);
}

/// Q_j = sum_i p_ij.
inline Marginal marginal_b(const JointDist& j)
{
    std::vector<StableSum> cols(j.cols());
    for (std::size_t i = 0; i < j.rows(); ++i) {
        const auto row = j.row(i);
        for (std::size_t k = 0; k < j.cols(); ++k) cols[k].add(row[k]);
    }
    std::vector<double> w(j.cols());
    for (std::size_t k = 0; k < j.cols(); ++k) w[k] = cols[k].value();
    return Marginal(std::move(w), Normalize::strict);
}

/// The correlation-destroying transform: replaces the joint with the
/// outer product of its marginals.  Marginals are preserved and product
/// distributions are fixed points.
inline JointDist decorrelate(const JointDist& j)
{
    const Marginal p = marginal_a(j);
    const Marginal q = marginal_b(j);
    std::vector<double> cells(j.rows() * j.cols());
    for (std::size_t i = 0; i < j.rows(); ++i)
        for (std::size_t k = 0; k < j.cols(); ++k)
            cells[i * j.cols() + k] = p[i] * q[k];
    return JointDist(j.rows(), j.cols(), std::move(cells), Normalize::strict);
}

/// True iff max_ij |p_ij - P_i Q_j| <= tol.
inline bool is_product(const JointDist& j, double tol)
{
    if (!(tol > 0.0)) fail(errc::non_positive_tolerance, "is_product: tol must be > 0");
    const Marginal p = marginal_a(j);
    const Marginal q = marginal_b(j);
    double worst = 0.0;
    for (std::size_t i = 0; i < j.rows(); ++i) {
        const auto row = j.row(i);
        for (std::size_t k = 0; k < j.cols(); ++k)
            worst = std::max(worst, std::abs(row[k] - p[i] * q[k]));
    }
    return worst <= tol;
}

/// Two-stage decomposition of a joint: a base marginal over A and one
/// conditional row over B per state of A.  Rows where the base weight is
/// zero are undefined and carry no value; asking for one is an error.
class ConditionalFamily {
public:
    ConditionalFamily(Marginal base, std::vector<std::optional<Marginal>> rows)
        : base_(std::move(base)), rows_(std::move(rows))
    {
        if (rows_.size() != base_.size())
            fail(errc::shape_mismatch, "ConditionalFamily: row count != base state count");
        std::size_t m = 0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const bool has_mass = base_[i] > 0.0;
            if (rows_[i].has_value() != has_mass)
                fail(errc::domain_error,
                     "ConditionalFamily: row " + std::to_string(i) +
                         " defined-ness inconsistent with base weight");
            if (rows_[i]) {
                if (m == 0)
                    m = rows_[i]->size();
                else if (rows_[i]->size() != m)
                    fail(errc::shape_mismatch, "ConditionalFamily: rows of unequal length");
            }
        }
        cols_ = m;  // at least one row is defined since the base sums to 1
    }

    const Marginal& base() const noexcept { return base_; }
    std::size_t num_rows() const noexcept { return rows_.size(); }
    std::size_t cols() const noexcept { return cols_; }
    bool defined(std::size_t i) const { return rows_.at(i).has_value(); }

    const Marginal& row(std::size_t i) const
    {
        const auto& r = rows_.at(i);
        if (!r)
            fail(errc::domain_error,
                 "ConditionalFamily: row " + std::to_string(i) + " has zero base weight");
        return *r;
    }

private:
    Marginal base_;
    std::vector<std::optional<Marginal>> rows_;
    std::size_t cols_;
};

/// Splits p_ij into base P_i and conditional rows p_ij / P_i.
inline ConditionalFamily condition_on_a(const JointDist& j)
{
    Marginal base = marginal_a(j);
    std::vector<std::optional<Marginal>> rows;
    rows.reserve(j.rows());
    for (std::size_t i = 0; i < j.rows(); ++i) {
        const auto row = j.row(i);
        StableSum s;
        for (double x : row) s.add(x);
        const double rowsum = s.value();
        if (rowsum > 0.0) {
            std::vector<double> zeta(row.begin(), row.end());
            for (double& x : zeta) x /= rowsum;
            rows.emplace_back(Marginal(std::move(zeta), Normalize::strict));
        } else {
            rows.emplace_back(std::nullopt);
        }
    }
    return ConditionalFamily(std::move(base), std::move(rows));
}

/// Rebuilds p_ij = base_i * row_i_j; undefined rows contribute zeros.
inline JointDist recompose(const ConditionalFamily& f)
{
    const std::size_t n = f.num_rows();
    const std::size_t m = f.cols();
    std::vector<double> cells(n * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!f.defined(i)) continue;
        const double w = f.base()[i];
        const auto& row = f.row(i);
        for (std::size_t k = 0; k < m; ++k) cells[i * m + k] = w * row[k];
    }
    return JointDist(n, m, std::move(cells), Normalize::strict);
}

/// Nonnegative mixture weights with positive total.  Kept unnormalized;
/// normalized() divides by the total.
class MixtureWeights {
public:
    explicit MixtureWeights(std::vector<double> w) : w_(std::move(w))
    {
        StableSum s;
        for (double x : w_) {
            if (std::isnan(x) || std::isinf(x))
                fail(errc::domain_error, "MixtureWeights: non-finite weight");
            if (x < 0.0)
                fail(errc::domain_error, "MixtureWeights: negative weight");
            s.add(x);
        }
        total_ = s.value();
        if (!(total_ > 0.0)) fail(errc::zero_total_weight, "MixtureWeights: total weight is 0");
    }

    std::size_t size() const noexcept { return w_.size(); }
    std::span<const double> raw() const noexcept { return w_; }
    double total() const noexcept { return total_; }

    std::vector<double> normalized() const
    {
        std::vector<double> out(w_);
        for (double& x : out) x /= total_;
        return out;
    }

private:
    std::vector<double> w_;
    double total_ = 0.0;
};

/// Weighted average of distributions over the same states.
inline Marginal mixture(std::span<const Marginal> dists, const MixtureWeights& weights)
{
    if (dists.empty()) fail(errc::empty_input, "mixture: no distributions");
    if (weights.size() != dists.size())
        fail(errc::shape_mismatch, "mixture: weight count != distribution count");
    const std::size_t k = dists.front().size();
    for (const Marginal& d : dists)
        if (d.size() != k) fail(errc::shape_mismatch, "mixture: distributions of unequal length");

    const std::vector<double> wn = weights.normalized();
    std::vector<double> u(k, 0.0);
    for (std::size_t s = 0; s < k; ++s) {
        StableSum acc;
        for (std::size_t d = 0; d < dists.size(); ++d) acc.add(wn[d] * dists[d][s]);
        u[s] = acc.value();
    }
    return Marginal(std::move(u), Normalize::strict);
}

inline Marginal mixture(const std::vector<Marginal>& dists, const MixtureWeights& weights)
{
    return mixture(std::span<const Marginal>(dists), weights);
}

}  // namespace entrocorr

#endif  // ENTROCORR_DIST_HPP
