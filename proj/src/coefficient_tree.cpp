#include "bwshrink/coefficient_tree.hpp"

#include "bwshrink/text.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace bwshrink {

namespace {

constexpr int kMaxLevels = 40;

void check_j_max(int j_max)
{
    if (j_max < 0 || j_max > kMaxLevels)
        throw std::invalid_argument("CoefficientTree: j_max must lie in [0, 40], got " +
                                    std::to_string(j_max));
}

} // namespace

CoefficientTree::CoefficientTree(int j_max, double alpha00)
    : j_max_(j_max), alpha00_(alpha00)
{
    check_j_max(j_max);
    coeffs_.assign(tree_size(j_max), 0.0);
}

CoefficientTree::CoefficientTree(int j_max, double alpha00, std::vector<double> flat)
    : j_max_(j_max), alpha00_(alpha00), coeffs_(std::move(flat))
{
    check_j_max(j_max);
    if (coeffs_.size() != tree_size(j_max))
        throw std::invalid_argument("CoefficientTree: expected " + std::to_string(tree_size(j_max)) +
                                    " coefficients for j_max " + std::to_string(j_max) + ", got " +
                                    std::to_string(coeffs_.size()));
    if (!is_finite())
        throw std::invalid_argument("CoefficientTree: non-finite coefficient");
}

CoefficientTree CoefficientTree::from_levels(double alpha00, const std::vector<std::vector<double>>& levels)
{
    if (levels.empty())
        throw std::invalid_argument("CoefficientTree: at least one level is required");
    const int j_max = static_cast<int>(levels.size()) - 1;
    std::vector<double> flat;
    flat.reserve(tree_size(j_max));
    for (int j = 0; j <= j_max; ++j) {
        if (levels[j].size() != level_width(j))
            throw std::invalid_argument("CoefficientTree: level " + std::to_string(j) + " must hold " +
                                        std::to_string(level_width(j)) + " entries, got " +
                                        std::to_string(levels[j].size()));
        flat.insert(flat.end(), levels[j].begin(), levels[j].end());
    }
    return CoefficientTree(j_max, alpha00, std::move(flat));
}

std::span<const double> CoefficientTree::level(int j) const
{
    if (j < 0 || j > j_max_)
        throw std::out_of_range("CoefficientTree: level " + std::to_string(j) + " out of range");
    return std::span<const double>(coeffs_).subspan(level_offset(j), level_width(j));
}

std::span<double> CoefficientTree::level(int j)
{
    if (j < 0 || j > j_max_)
        throw std::out_of_range("CoefficientTree: level " + std::to_string(j) + " out of range");
    return std::span<double>(coeffs_).subspan(level_offset(j), level_width(j));
}

double CoefficientTree::at(int j, std::size_t k) const
{
    if (j < 0 || k >= level_width(j))
        throw std::out_of_range("CoefficientTree: index out of range");
    return j > j_max_ ? 0.0 : coeffs_[level_offset(j) + k];
}

bool CoefficientTree::is_finite() const noexcept
{
    return std::isfinite(alpha00_) &&
           std::all_of(coeffs_.begin(), coeffs_.end(), [](double v) { return std::isfinite(v); });
}

CoefficientTree CoefficientTree::resized(int j_max) const
{
    CoefficientTree out(j_max, alpha00_);
    const std::size_t n = std::min(coeffs_.size(), out.coeffs_.size());
    std::copy_n(coeffs_.begin(), n, out.coeffs_.begin());
    return out;
}

CoefficientTree& CoefficientTree::operator+=(const CoefficientTree& rhs)
{
    if (rhs.j_max_ > j_max_)
        *this = resized(rhs.j_max_);
    alpha00_ += rhs.alpha00_;
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i)
        coeffs_[i] += rhs.coeffs_[i];
    return *this;
}

CoefficientTree& CoefficientTree::operator-=(const CoefficientTree& rhs)
{
    if (rhs.j_max_ > j_max_)
        *this = resized(rhs.j_max_);
    alpha00_ -= rhs.alpha00_;
    for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i)
        coeffs_[i] -= rhs.coeffs_[i];
    return *this;
}

CoefficientTree& CoefficientTree::operator*=(double c) noexcept
{
    alpha00_ *= c;
    for (double& v : coeffs_)
        v *= c;
    return *this;
}

CoefficientTree operator+(CoefficientTree lhs, const CoefficientTree& rhs) { return lhs += rhs; }
CoefficientTree operator-(CoefficientTree lhs, const CoefficientTree& rhs) { return lhs -= rhs; }
CoefficientTree operator*(double c, CoefficientTree t) { return t *= c; }

double l2_distance_sq(const CoefficientTree& a, const CoefficientTree& b)
{
    const auto fa = a.flat();
    const auto fb = b.flat();
    const std::size_t common = std::min(fa.size(), fb.size());
    double d = a.alpha00() - b.alpha00();
    double sum = d * d;
    for (std::size_t i = 0; i < common; ++i) {
        const double e = fa[i] - fb[i];
        sum += e * e;
    }
    for (std::size_t i = common; i < fa.size(); ++i)
        sum += fa[i] * fa[i];
    for (std::size_t i = common; i < fb.size(); ++i)
        sum += fb[i] * fb[i];
    return sum;
}

double l2_norm_sq(const CoefficientTree& t)
{
    double sum = t.alpha00() * t.alpha00();
    for (double v : t.flat())
        sum += v * v;
    return sum;
}

CoefficientTree truncate(const CoefficientTree& t, int J)
{
    if (J < -1)
        throw std::invalid_argument("truncate: J must be >= -1");
    CoefficientTree out = t;
    if (J >= t.j_max())
        return out;
    auto flat = out.flat();
    std::fill(flat.begin() + static_cast<std::ptrdiff_t>(tree_size(J)), flat.end(), 0.0);
    return out;
}

void write_tree(std::ostream& os, const CoefficientTree& t)
{
    os << t.j_max() << ' ' << format_double(t.alpha00()) << '\n';
    for (int j = 0; j <= t.j_max(); ++j) {
        bool first = true;
        for (double v : t.level(j)) {
            if (!first)
                os << ' ';
            os << format_double(v);
            first = false;
        }
        os << '\n';
    }
}

CoefficientTree read_tree(std::istream& is)
{
    std::string line;
    std::size_t line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            ++line_no;
            if (!trim(line).empty())
                return true;
        }
        return false;
    };
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("tree format, line " + std::to_string(line_no) + ": " + what);
    };

    if (!next_line())
        fail("missing header");
    auto header = split_whitespace(line);
    if (header.size() != 2)
        fail("header must be 'J_max alpha00'");
    auto j_max = parse_integer(header[0]);
    auto alpha00 = parse_double(header[1]);
    if (!j_max || *j_max < 0 || *j_max > kMaxLevels)
        fail("invalid J_max");
    if (!alpha00)
        fail("invalid alpha00");

    const int levels = static_cast<int>(*j_max);
    std::vector<double> flat;
    flat.reserve(tree_size(levels));
    for (int j = 0; j <= levels; ++j) {
        if (!next_line())
            fail("missing level " + std::to_string(j));
        auto tokens = split_whitespace(line);
        if (tokens.size() != level_width(j))
            fail("level " + std::to_string(j) + " must hold " + std::to_string(level_width(j)) +
                 " values, got " + std::to_string(tokens.size()));
        for (auto tok : tokens) {
            auto v = parse_double(tok);
            if (!v || !std::isfinite(*v))
                fail("invalid coefficient '" + std::string(tok) + "'");
            flat.push_back(*v);
        }
    }
    return CoefficientTree(levels, *alpha00, std::move(flat));
}

} // namespace bwshrink
