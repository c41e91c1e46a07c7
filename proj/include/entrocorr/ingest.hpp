#ifndef ENTROCORR_INGEST_HPP
#define ENTROCORR_INGEST_HPP

// File entry and exit: joint distributions and sample columns from CSV,
// empirical joints from labeled pairs, and report serialization.  CSV
// numbers are written with 17 significant digits so a write/read round
// trip is exact in binary64.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "entrocorr/continuum.hpp"
#include "entrocorr/dist.hpp"
#include "entrocorr/entropy.hpp"
#include "entrocorr/error.hpp"
#include "entrocorr/maxent.hpp"
#include "entrocorr/version.hpp"

namespace entrocorr {

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_number(std::string_view token)
{
    token = trim(token);
    if (token.empty()) return std::nullopt;
    double value = 0.0;
    const char* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

inline std::vector<std::string_view> split_csv(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

}  // namespace detail

/// Rectangular numeric grid from CSV.  A single leading header row is
/// detected by a non-numeric first token and skipped.  Row/column
/// coordinates in errors are 1-based over data rows.
inline std::vector<std::vector<double>> parse_numeric_grid(std::istream& in)
{
    std::vector<std::vector<double>> grid;
    std::string line;
    std::size_t lineno = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto tokens = detail::split_csv(line);
        if (first_content_line) {
            first_content_line = false;
            if (!detail::parse_number(tokens.front())) continue;  // header row
        }
        std::vector<double> row;
        row.reserve(tokens.size());
        for (std::size_t c = 0; c < tokens.size(); ++c) {
            const auto v = detail::parse_number(tokens[c]);
            if (!v)
                fail(errc::parse_error, "non-numeric cell at row " + std::to_string(lineno) +
                                            ", column " + std::to_string(c + 1));
            row.push_back(*v);
        }
        if (!grid.empty() && row.size() != grid.front().size())
            fail(errc::parse_error, "ragged row " + std::to_string(lineno) + ": " +
                                        std::to_string(row.size()) + " columns, expected " +
                                        std::to_string(grid.front().size()));
        grid.push_back(std::move(row));
    }
    return grid;
}

inline JointDist parse_joint_csv(std::istream& in, Normalize mode)
{
    const auto grid = parse_numeric_grid(in);
    if (grid.empty()) fail(errc::empty_shape, "joint CSV: no data rows");
    // report coordinates for entry errors before delegating to the validator
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid[i].size(); ++j)
            if (grid[i][j] < -kNegativeDust)
                fail(errc::negative_mass, "negative entry at row " + std::to_string(i + 1) +
                                              ", column " + std::to_string(j + 1));
    return JointDist::from_rows(grid, mode);
}

inline JointDist read_joint_csv(const std::filesystem::path& path,
                                Normalize mode = Normalize::strict)
{
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open " + path.string());
    return parse_joint_csv(in, mode);
}

/// Sample value stream from CSV, flattened row-major.  Rows may have any
/// width; a single leading header row is skipped as in the grid format.
inline std::vector<double> read_samples_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open " + path.string());
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        const auto tokens = detail::split_csv(line);
        if (first_content_line) {
            first_content_line = false;
            if (!detail::parse_number(tokens.front())) continue;  // header row
        }
        for (std::size_t c = 0; c < tokens.size(); ++c) {
            const auto v = detail::parse_number(tokens[c]);
            if (!v || !std::isfinite(*v))
                fail(errc::parse_error, "bad sample value at row " + std::to_string(lineno) +
                                            ", column " + std::to_string(c + 1));
            out.push_back(*v);
        }
    }
    return out;
}

/// Empirical counts over an n x m label grid, the precursor of a joint.
class CountTable {
public:
    CountTable(std::size_t n, std::size_t m) : n_(n), m_(m), counts_(n * m, 0)
    {
        if (n == 0 || m == 0) fail(errc::empty_shape, "CountTable: empty shape");
    }

    void increment(std::size_t i, std::size_t j, std::uint64_t by = 1)
    {
        if (i >= n_ || j >= m_) fail(errc::domain_error, "CountTable: index out of range");
        counts_[i * m_ + j] += by;
    }

    std::size_t rows() const noexcept { return n_; }
    std::size_t cols() const noexcept { return m_; }
    std::uint64_t at(std::size_t i, std::size_t j) const { return counts_.at(i * m_ + j); }

    JointDist to_joint(double pseudocount) const
    {
        if (pseudocount < 0.0)
            fail(errc::negative_pseudocount, "CountTable: pseudocount must be >= 0");
        std::vector<double> cells(counts_.size());
        for (std::size_t i = 0; i < counts_.size(); ++i)
            cells[i] = static_cast<double>(counts_[i]) + pseudocount;
        return JointDist(n_, m_, std::move(cells), Normalize::renormalize);
    }

private:
    std::size_t n_, m_;
    std::vector<std::uint64_t> counts_;
};

struct LabeledJoint {
    JointDist joint;
    std::vector<std::string> labels_a;  // index -> label, first-appearance order
    std::vector<std::string> labels_b;
};

/// Joint estimated from labeled pairs with optional additive smoothing.
inline LabeledJoint joint_from_pairs(std::span<const std::pair<std::string, std::string>> pairs,
                                     double pseudocount)
{
    if (pairs.empty()) fail(errc::empty_input, "joint_from_pairs: no pairs");
    if (pseudocount < 0.0)
        fail(errc::negative_pseudocount, "joint_from_pairs: pseudocount must be >= 0");

    std::unordered_map<std::string, std::size_t> index_a, index_b;
    std::vector<std::string> labels_a, labels_b;
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    coords.reserve(pairs.size());
    for (const auto& [a, b] : pairs) {
        auto ia = index_a.try_emplace(a, labels_a.size());
        if (ia.second) labels_a.push_back(a);
        auto ib = index_b.try_emplace(b, labels_b.size());
        if (ib.second) labels_b.push_back(b);
        coords.emplace_back(ia.first->second, ib.first->second);
    }
    CountTable table(labels_a.size(), labels_b.size());
    for (const auto& [i, j] : coords) table.increment(i, j);
    return {table.to_joint(pseudocount), std::move(labels_a), std::move(labels_b)};
}

/// Two-column label CSV.  Header detection is impossible for string
/// labels, so the caller says whether one is present.
inline std::vector<std::pair<std::string, std::string>> read_pairs_csv(
    const std::filesystem::path& path, bool has_header = false)
{
    std::ifstream in(path);
    if (!in) fail(errc::io_error, "cannot open " + path.string());
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        if (has_header && pairs.empty() && lineno == 1) continue;
        const auto tokens = detail::split_csv(line);
        if (tokens.size() != 2)
            fail(errc::parse_error, "pairs CSV row " + std::to_string(lineno) + " has " +
                                        std::to_string(tokens.size()) + " columns, expected 2");
        pairs.emplace_back(std::string(detail::trim(tokens[0])),
                           std::string(detail::trim(tokens[1])));
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// Serialization

/// 17 significant digits: exact binary64 round trip through decimal text.
inline std::string format_full(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_joint_csv(const JointDist& j, std::ostream& out)
{
    for (std::size_t i = 0; i < j.rows(); ++i) {
        const auto row = j.row(i);
        for (std::size_t k = 0; k < j.cols(); ++k) {
            if (k) out << ',';
            out << format_full(row[k]);
        }
        out << '\n';
    }
}

inline void write_joint_csv(const JointDist& j, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot write " + path.string());
    write_joint_csv(j, out);
    out.flush();
    if (!out) fail(errc::io_error, "write failed for " + path.string());
}

struct ReportMeta {
    std::string unit = "nats";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> rng;
};

inline nlohmann::json report_envelope(nlohmann::json result, const ReportMeta& meta)
{
    nlohmann::json m;
    m["version"] = kVersion;
    m["unit"] = meta.unit;
    if (meta.seed) m["seed"] = *meta.seed;
    if (meta.rng) m["rng"] = *meta.rng;
    return nlohmann::json{{"meta", std::move(m)}, {"result", std::move(result)}};
}

// Result objects as JSON.  `scale` converts entropy-valued fields from
// nats to the display unit; nothing else is touched.

inline nlohmann::json to_result_json(const SubadditivityReport& r, double scale = 1.0)
{
    return {{"s_joint", r.s_joint * scale}, {"s_pi", r.s_pi * scale},
            {"s_marg_a", r.s_marg_a * scale}, {"s_marg_b", r.s_marg_b * scale},
            {"gap", r.gap * scale}, {"holds", r.holds}};
}

inline nlohmann::json to_result_json(const ChainDecomposition& c, double scale = 1.0)
{
    return {{"s_base", c.s_base.nats() * scale},
            {"s_cond", c.s_cond.nats() * scale},
            {"s_total", c.s_total.nats() * scale}};
}

inline nlohmann::json to_result_json(const MaxwellReport& r, double scale = 1.0)
{
    return {{"mi_xy", r.mi_xy * scale}, {"mi_xz", r.mi_xz * scale}, {"mi_yz", r.mi_yz * scale},
            {"speed_mode", r.speed_mode}, {"angular_deviation", r.angular_deviation}};
}

inline nlohmann::json to_result_json(std::span<const SweepRow> table, double scale = 1.0)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table)
        rows.push_back({{"bins", r.bins}, {"delta", r.delta},
                        {"s_binned", r.s_binned * scale},
                        {"s_corrected", r.s_corrected * scale}});
    return rows;
}

inline nlohmann::json to_result_json(const MaxEntSolution& s, double scale = 1.0)
{
    return {{"dist", std::vector<double>(s.dist.probs().begin(), s.dist.probs().end())},
            {"multipliers", s.multipliers},
            {"entropy", s.entropy.nats() * scale},
            {"residual", s.residual},
            {"iterations", s.iterations}};
}

inline void write_report_json(const nlohmann::json& result, const ReportMeta& meta,
                              std::ostream& out)
{
    out << report_envelope(result, meta).dump(2) << '\n';
}

inline void write_report_json(const nlohmann::json& result, const ReportMeta& meta,
                              const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) fail(errc::io_error, "cannot write " + path.string());
    write_report_json(result, meta, out);
    out.flush();
    if (!out) fail(errc::io_error, "write failed for " + path.string());
}

/// Flat record as CSV: one header row of field names, one data row.
inline void write_report_csv(const nlohmann::json& result, std::ostream& out)
{
    if (result.is_array()) {  // table of rows with identical keys
        if (result.empty()) return;
        bool first = true;
        for (auto it = result.front().begin(); it != result.front().end(); ++it) {
            if (!first) out << ',';
            out << it.key();
            first = false;
        }
        out << '\n';
        for (const auto& row : result) {
            first = true;
            for (const auto& [key, value] : row.items()) {
                (void)key;
                if (!first) out << ',';
                out << (value.is_number_float() ? format_full(value.get<double>())
                                                : value.dump());
                first = false;
            }
            out << '\n';
        }
        return;
    }
    bool first = true;
    for (auto it = result.begin(); it != result.end(); ++it) {
        if (!first) out << ',';
        out << it.key();
        first = false;
    }
    out << '\n';
    first = true;
    for (const auto& [key, value] : result.items()) {
        (void)key;
        if (!first) out << ',';
        out << (value.is_number_float() ? format_full(value.get<double>()) : value.dump());
        first = false;
    }
    out << '\n';
}

}  // namespace entrocorr

#endif  // ENTROCORR_INGEST_HPP
