#include "bwshrink/results.hpp"

#include "bwshrink/text.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bwshrink {

namespace fs = std::filesystem;

OutputError::OutputError(const fs::path& path, const std::string& reason)
    : std::runtime_error(path.string() + ": " + reason), path_(path)
{
}

void ensure_directory(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw OutputError(dir, "cannot create directory (" + ec.message() + ")");
    if (!fs::is_directory(dir))
        throw OutputError(dir, "not a directory");
}

void write_text_file(const fs::path& path, const std::string& content)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw OutputError(path, std::string("cannot open for writing (") + std::strerror(errno) + ")");
        os << content;
        os.flush();
        if (!os)
            throw OutputError(path, "write failed");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw OutputError(path, "cannot replace file (" + ec.message() + ")");
    }
}

std::string read_text_file(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw OutputError(path, std::string("cannot open for reading (") + std::strerror(errno) + ")");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

namespace {

std::string m_label(double m) { return "M" + format_double(m); }

class CsvRow {
public:
    CsvRow& operator<<(const std::string& field)
    {
        sep();
        // RFC 4180 quoting for fields that need it
        if (field.find_first_of(",\"\r\n") != std::string::npos) {
            os_ << '"';
            for (char c : field) {
                if (c == '"')
                    os_ << '"';
                os_ << c;
            }
            os_ << '"';
        } else {
            os_ << field;
        }
        return *this;
    }
    CsvRow& operator<<(double v) { return *this << format_double(v); }
    CsvRow& operator<<(std::int64_t v) { return *this << std::to_string(v); }
    CsvRow& operator<<(int v) { return *this << std::to_string(v); }
    CsvRow& operator<<(bool v) { return *this << std::string(v ? "1" : "0"); }

    std::string str() const { return os_.str() + "\r\n"; }

private:
    void sep()
    {
        if (!first_)
            os_ << ',';
        first_ = false;
    }
    std::ostringstream os_;
    bool first_ = true;
};

nlohmann::ordered_json config_json(const LabConfig& cfg)
{
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& e : config_entries(cfg))
        out[e.section][e.key] = e.value;
    return out;
}

} // namespace

std::string rate_csv(const RateExperimentResult& result)
{
    std::string out;
    CsvRow header;
    header << std::string("n") << std::string("eps_sq") << std::string("J") << std::string("J_data")
           << std::string("loss_mean") << std::string("loss_mean_se") << std::string("loss_median")
           << std::string("loss_median_se") << std::string("complement_mass") << std::string("complement_mass_se");
    if (!result.records.empty())
        for (const auto& c : result.records.front().sweep)
            header << "complement_" + m_label(c.M) << "complement_" + m_label(c.M) + "_se";
    header << std::string("sample_loss") << std::string("sample_loss_se") << std::string("variance_check_failures")
           << std::string("truncation_bias") << std::string("truncation_flag");
    out += header.str();

    for (const auto& r : result.records) {
        CsvRow row;
        row << r.n << r.eps_sq << r.J << r.J_data << r.loss_mean << r.loss_mean_se << r.loss_median
            << r.loss_median_se << r.complement_mass << r.complement_mass_se;
        for (const auto& c : r.sweep)
            row << c.mass << c.se;
        row << r.sample_loss << r.sample_loss_se << r.variance_check_failures << r.truncation_bias
            << r.truncation_flag;
        out += row.str();
    }
    return out;
}

std::string prior_mass_csv(const std::vector<PriorMassRow>& rows)
{
    std::string out;
    CsvRow header;
    header << std::string("n") << std::string("eps_sq") << std::string("log_mass") << std::string("stderr")
           << std::string("ratio") << std::string("J") << std::string("ess") << std::string("hits")
           << std::string("samples") << std::string("reliable");
    out += header.str();
    for (const auto& r : rows) {
        CsvRow row;
        row << r.n << r.eps_sq << r.estimate.log_mass << r.estimate.log_mass_se << r.ratio << r.J << r.estimate.ess
            << r.estimate.hits << r.estimate.samples << r.estimate.reliable;
        out += row.str();
    }
    return out;
}

std::string rate_summary_json(const RateExperimentResult& result, const LabConfig& cfg)
{
    nlohmann::ordered_json j;
    j["slope"] = result.fit_mean.slope;
    j["exponent_theoretical"] = result.exponent_theoretical;
    j["pass"] = result.pass;
    j["slope_tolerance"] = cfg.experiment.slope_tolerance;
    j["intercept"] = result.fit_mean.intercept;
    j["residual"] = result.fit_mean.residual;
    j["slope_median"] = result.fit_median.slope;
    j["alpha"] = result.alpha;

    const ContractionCheck cc = check_contraction(result);
    j["contraction"] = {{"nonincreasing", cc.nonincreasing},
                        {"final_min_mass", cc.final_min_mass},
                        {"final_best_M", cc.final_best_M},
                        {"pass", cc.pass}};

    nlohmann::ordered_json flagged = nlohmann::ordered_json::array();
    int variance_failures = 0;
    for (const auto& r : result.records) {
        if (r.truncation_flag)
            flagged.push_back(r.n);
        variance_failures += r.variance_check_failures;
    }
    j["truncation_flagged_n"] = flagged;
    j["variance_check_failures"] = variance_failures;
    j["config"] = config_json(cfg);
    return j.dump(2) + "\n";
}

std::string prior_mass_summary_json(const std::vector<PriorMassRow>& rows, const LabConfig& cfg)
{
    const PriorMassSummary s = summarize_prior_mass(rows);
    nlohmann::ordered_json j;
    j["min_ratio"] = s.min_ratio;
    j["max_ratio"] = s.max_ratio;
    j["spread"] = s.spread;
    j["min_ess"] = s.min_ess;
    j["pass"] = s.pass;
    j["config"] = config_json(cfg);
    return j.dump(2) + "\n";
}

void emit_rate_results(const RateExperimentResult& result, const LabConfig& cfg, const fs::path& dir)
{
    ensure_directory(dir);
    write_text_file(dir / "rate.csv", rate_csv(result));
    write_text_file(dir / "summary.json", rate_summary_json(result, cfg));
    write_text_file(dir / "config.txt", emit_config(cfg));
}

void emit_prior_mass_results(const std::vector<PriorMassRow>& rows, const LabConfig& cfg, const fs::path& dir)
{
    ensure_directory(dir);
    write_text_file(dir / "prior_mass.csv", prior_mass_csv(rows));
    write_text_file(dir / "prior_mass.json", prior_mass_summary_json(rows, cfg));
    write_text_file(dir / "config.txt", emit_config(cfg));
}

} // namespace bwshrink
