#ifndef BWSHRINK_RESULTS_HPP
#define BWSHRINK_RESULTS_HPP

#include "bwshrink/config.hpp"
#include "bwshrink/contraction.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace bwshrink {

/// I/O failure; what() names the path.
class OutputError : public std::runtime_error {
public:
    OutputError(const std::filesystem::path& path, const std::string& reason);
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// Replaces `path` with `content`. Written to a sibling temporary first so a
/// failed run never leaves a truncated file behind.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

/// Creates `dir` (and parents) when missing.
void ensure_directory(const std::filesystem::path& dir);

// CSV with a header row and '.' decimal separator.
std::string rate_csv(const RateExperimentResult& result);
std::string prior_mass_csv(const std::vector<PriorMassRow>& rows);

/// summary.json; leads with slope, exponent_theoretical, pass.
std::string rate_summary_json(const RateExperimentResult& result, const LabConfig& cfg);
std::string prior_mass_summary_json(const std::vector<PriorMassRow>& rows, const LabConfig& cfg);

/// rate.csv, summary.json and config.txt under `dir`.
void emit_rate_results(const RateExperimentResult& result, const LabConfig& cfg, const std::filesystem::path& dir);

/// prior_mass.csv, prior_mass.json and config.txt under `dir`.
void emit_prior_mass_results(const std::vector<PriorMassRow>& rows, const LabConfig& cfg,
                             const std::filesystem::path& dir);

} // namespace bwshrink

#endif // BWSHRINK_RESULTS_HPP
