#include "bwshrink/config.hpp"
#include "bwshrink/denoise.hpp"
#include "bwshrink/results.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <stdexcept>

using namespace bwshrink;
namespace fs = std::filesystem;

namespace {

std::string first_diagnostic(std::string_view text, const std::vector<std::string>& overrides = {})
{
    try {
        parse_config(text, overrides);
    } catch (const ConfigError& e) {
        return e.diagnostics().front();
    }
    return "";
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("bwshrink_test_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("empty config gives defaults")
{
    CHECK(parse_config("") == LabConfig{});
    CHECK(parse_config("# only a comment\n\n   \n") == LabConfig{});
}

TEST_CASE("emit and parse round trip")
{
    LabConfig cfg;
    cfg.experiment.besov = BesovIndex(1.5, 1.0, kInfinity, 2.0);
    cfg.experiment.truth.besov = cfg.experiment.besov;
    cfg.experiment.truth.kind = TruthKind::level_sparse;
    cfg.experiment.truth.alpha00 = 0.125;
    cfg.experiment.n_grid = {100, 1000, 10000};
    cfg.experiment.M_sweep = {0.3, 3.0};
    cfg.experiment.prior_kind = PriorKind::sieve;
    cfg.experiment.alpha = 2.75;
    cfg.experiment.m_max = 7;
    cfg.experiment.mu = 0.1 + 0.2;
    cfg.experiment.seed = 123456789012345ULL;
    cfg.experiment.noisy_alpha00 = true;
    cfg.probe_samples = 777;
    CHECK(parse_config(emit_config(cfg)) == cfg);
    CHECK(parse_config(emit_config(LabConfig{})) == LabConfig{});
    CHECK(emit_config(parse_config(emit_config(cfg))) == emit_config(cfg));
}

TEST_CASE("config values and sections")
{
    const LabConfig cfg = parse_config("[besov]\ns = 2   # smoother\np = inf\n[experiment]\nn_grid = 2^8..2^10\n"
                                       "replicates = 7\n");
    CHECK(cfg.experiment.besov.s() == 2.0);
    CHECK(std::isinf(cfg.experiment.besov.p()));
    CHECK(cfg.experiment.n_grid == std::vector<std::int64_t>{256, 512, 1024});
    CHECK(cfg.experiment.replicates == 7);
    CHECK(cfg.experiment.truth.besov == cfg.experiment.besov);

    const LabConfig o = parse_config("replicates = 7\n", {"replicates=9", "seed = 5"});
    CHECK(o.experiment.replicates == 9);
    CHECK(o.experiment.seed == 5);
}

TEST_CASE("config diagnostics")
{
    CHECK(first_diagnostic("p = 0.5\n").find("line 1") == 0);
    CHECK(first_diagnostic("p = 0.5\n").find("1 <= p") != std::string::npos);
    const std::string s_msg = first_diagnostic("s = 0.2\np = 1\n");
    CHECK(s_msg.find("line 1") == 0);
    CHECK(s_msg.find("0.5") != std::string::npos);
    CHECK(first_diagnostic("\nfoo = 1\n") == "line 2: unknown key 'foo'");
    CHECK(first_diagnostic("s = 1\ns = 2\n").find("first set on line 1") != std::string::npos);
    CHECK(first_diagnostic("[bogus]\n").find("unknown section") != std::string::npos);
    CHECK(first_diagnostic("[besov]\nreplicates = 3\n").find("belongs to section [experiment]") !=
          std::string::npos);
    CHECK(first_diagnostic("replicates = many\n").find("line 1") == 0);
    CHECK(first_diagnostic("just text\n").find("line 1") == 0);
    CHECK(first_diagnostic("", {"seed=-1"}).find("override") != std::string::npos);

    try {
        parse_config("foo = 1\nbar = 2\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.diagnostics().size() == 2);
        CHECK(std::string(e.what()).find('\n') != std::string::npos);
    }
}

TEST_CASE("parse_n_grid")
{
    CHECK(parse_n_grid("2^3..2^5") == std::vector<std::int64_t>{8, 16, 32});
    CHECK(parse_n_grid("10, 20 40") == std::vector<std::int64_t>{10, 20, 40});
    CHECK(parse_n_grid("2^8..2^8") == std::vector<std::int64_t>{256});
    CHECK_THROWS(parse_n_grid("2^5..2^3"));
    CHECK_THROWS(parse_n_grid("2^3..2^50"));
    CHECK_THROWS(parse_n_grid(""));
    CHECK_THROWS(parse_n_grid("10, x"));
}

TEST_CASE("result files are byte-identical across reruns")
{
    LabConfig cfg;
    cfg.experiment.truth.j_max = 10;
    cfg.experiment.n_grid = {64, 128, 256, 512};
    cfg.experiment.replicates = 3;
    cfg.experiment.posterior_samples = 10;
    const fs::path a = scratch_dir("rerun_a");
    const fs::path b = scratch_dir("rerun_b");
    emit_rate_results(run_contraction_experiment(cfg.experiment), cfg, a);
    emit_rate_results(run_contraction_experiment(cfg.experiment), cfg, b);
    for (const char* name : {"rate.csv", "summary.json", "config.txt"})
        CHECK(read_text_file(a / name) == read_text_file(b / name));

    const std::string csv = read_text_file(a / "rate.csv");
    CHECK(csv.rfind("n,eps_sq,J,J_data,loss_mean,", 0) == 0);
    CHECK(csv.find("\r\n") != std::string::npos);
    CHECK(parse_config(read_text_file(a / "config.txt")) == cfg);

    const auto summary = nlohmann::ordered_json::parse(read_text_file(a / "summary.json"));
    CHECK(summary.contains("slope"));
    CHECK(summary["exponent_theoretical"].get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(summary["config"]["experiment"]["replicates"] == "3");
    CHECK(summary.begin().key() == "slope");

    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("output errors name the path")
{
    const fs::path dir = scratch_dir("blocked");
    fs::create_directories(dir);
    write_text_file(dir / "file", "x");
    const fs::path bad = dir / "file" / "child.txt";
    try {
        write_text_file(bad, "y");
        FAIL("expected OutputError");
    } catch (const OutputError& e) {
        CHECK(std::string(e.what()).find(bad.string()) != std::string::npos);
        CHECK(e.path() == bad);
    }
    CHECK_THROWS_AS(read_text_file(dir / "missing"), OutputError);
    CHECK_THROWS_AS(ensure_directory(dir / "file" / "sub"), OutputError);
    fs::remove_all(dir);
}

TEST_CASE("denoise")
{
    const std::size_t N = 1024;
    auto noisy_version = [&](const SampledSignal& clean) {
        SplitMix64 rng(2);
        std::vector<double> v(N);
        for (std::size_t i = 0; i < N; ++i)
            v[i] = clean.values()[i] + 0.5 * rng.normal();
        return SampledSignal(v);
    };
    auto mse = [&](const SampledSignal& a, const SampledSignal& b) {
        double e = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            e += std::pow(a.values()[i] - b.values()[i], 2);
        return e / N;
    };

    const SampledSignal doppler = standard_signal("doppler", N);
    const SampledSignal y = noisy_version(doppler);
    DenoiseOptions opts;
    opts.noise_sd = 0.5;
    const DenoiseResult med = denoise(y, opts);
    CHECK(mse(med.signal, doppler) < 0.25 * mse(y, doppler));
    CHECK(med.alpha == 3.0);
    CHECK(med.levels.size() == 10);

    opts.estimator = Estimator::mean;
    opts.wavelet = "d4";
    CHECK(mse(denoise(y, opts).signal, doppler) < 0.25 * mse(y, doppler));

    opts.noise_sd.reset();
    const DenoiseResult mad = denoise(y, opts);
    CHECK(mad.noise_sd == doctest::Approx(0.5).epsilon(0.15));

    // jumps are sparse in the wavelet domain: the p = 1 prior suits them better
    const SampledSignal blocks = standard_signal("blocks", N);
    const SampledSignal yb = noisy_version(blocks);
    DenoiseOptions sparse;
    sparse.noise_sd = 0.5;
    sparse.p = 1.0;
    DenoiseOptions smooth = sparse;
    smooth.p = 2.0;
    const double sparse_mse = mse(denoise(yb, sparse).signal, blocks);
    CHECK(sparse_mse < mse(denoise(yb, smooth).signal, blocks));
    CHECK(denoise(yb, sparse).alpha == 2.0);

    // the scaling coefficient passes through: a constant input is returned unchanged
    const DenoiseResult flat = denoise(SampledSignal(std::vector<double>(64, 3.0)), DenoiseOptions{});
    for (double v : flat.signal.values())
        CHECK(v == doctest::Approx(3.0));

    CHECK(parse_estimator("mean") == Estimator::mean);
    CHECK_THROWS(parse_estimator("mode"));
}
