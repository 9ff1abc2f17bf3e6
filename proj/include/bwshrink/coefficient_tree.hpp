#ifndef BWSHRINK_COEFFICIENT_TREE_HPP
#define BWSHRINK_COEFFICIENT_TREE_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace bwshrink {

// Number of coefficients stored in levels 0..j_max, i.e. 2^(j_max+1) - 1.
constexpr std::size_t tree_size(int j_max) noexcept
{
    return j_max < 0 ? 0 : (std::size_t{1} << (j_max + 1)) - 1;
}

constexpr std::size_t level_offset(int j) noexcept { return (std::size_t{1} << j) - 1; }
constexpr std::size_t level_width(int j) noexcept { return std::size_t{1} << j; }

/// Dyadic wavelet coefficient sequence: a scaling coefficient alpha00 plus
/// detail levels j = 0..j_max, level j holding 2^j coefficients beta_jk.
/// Coefficients above j_max are implicitly zero.
class CoefficientTree {
public:
    CoefficientTree() : CoefficientTree(0) {}

    /// Zero tree with levels 0..j_max.
    explicit CoefficientTree(int j_max, double alpha00 = 0.0);

    /// Tree from a flat level-major coefficient array; throws if the size does
    /// not match 2^(j_max+1) - 1 or any entry is non-finite.
    CoefficientTree(int j_max, double alpha00, std::vector<double> flat);

    /// Tree from per-level vectors; level j must hold 2^j entries.
    static CoefficientTree from_levels(double alpha00, const std::vector<std::vector<double>>& levels);

    int j_max() const noexcept { return j_max_; }
    int num_levels() const noexcept { return j_max_ + 1; }
    std::size_t size() const noexcept { return coeffs_.size(); }

    double alpha00() const noexcept { return alpha00_; }
    void set_alpha00(double value) noexcept { alpha00_ = value; }

    std::span<const double> level(int j) const;
    std::span<double> level(int j);

    /// beta_jk, or 0 above j_max.
    double at(int j, std::size_t k) const;

    std::span<const double> flat() const noexcept { return coeffs_; }
    std::span<double> flat() noexcept { return coeffs_; }

    bool is_finite() const noexcept;

    /// Copy with levels 0..j_max (truncating or zero-padding).
    CoefficientTree resized(int j_max) const;

    CoefficientTree& operator+=(const CoefficientTree& rhs);
    CoefficientTree& operator-=(const CoefficientTree& rhs);
    CoefficientTree& operator*=(double c) noexcept;

    friend bool operator==(const CoefficientTree&, const CoefficientTree&) = default;

private:
    int j_max_;
    double alpha00_;
    std::vector<double> coeffs_;
};

CoefficientTree operator+(CoefficientTree lhs, const CoefficientTree& rhs);
CoefficientTree operator-(CoefficientTree lhs, const CoefficientTree& rhs);
CoefficientTree operator*(double c, CoefficientTree t);

/// Squared l2 distance over the alpha00 slot and all detail levels; the
/// shorter tree is treated as zero-padded.
double l2_distance_sq(const CoefficientTree& a, const CoefficientTree& b);

/// Squared l2 norm, alpha00 included.
double l2_norm_sq(const CoefficientTree& t);

/// Projection P_J: levels j <= J kept, levels above zeroed. J = -1 keeps only
/// alpha00. The returned tree keeps the input's j_max.
CoefficientTree truncate(const CoefficientTree& t, int J);

// Text format: header line "J_max alpha00" then one line per level with
// space-separated coefficients, printed with round-trip precision.
void write_tree(std::ostream& os, const CoefficientTree& t);
CoefficientTree read_tree(std::istream& is);

} // namespace bwshrink

#endif // BWSHRINK_COEFFICIENT_TREE_HPP
