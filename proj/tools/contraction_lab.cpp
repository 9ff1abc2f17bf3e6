// contraction_lab: command-line front end for the wavelet shrinkage library.

#include "bwshrink/checks.hpp"
#include "bwshrink/config.hpp"
#include "bwshrink/contraction.hpp"
#include "bwshrink/denoise.hpp"
#include "bwshrink/parallel.hpp"
#include "bwshrink/results.hpp"
#include "bwshrink/sequence_model.hpp"
#include "bwshrink/text.hpp"
#include "bwshrink/wavelet.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace bwshrink;

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::int64_t> seed;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonArgs& args)
{
    sub->add_option("-c,--config", args.config_path, "configuration file (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--seed", args.seed, "root seed; overrides the config value")->check(CLI::NonNegativeNumber);
    sub->add_option("-o,--out-dir", args.out_dir, "output directory");
    sub->add_option("--set", args.overrides, "extra key=value entries applied after the file");
}

LabConfig load_config(const CommonArgs& args)
{
    std::string text;
    if (!args.config_path.empty())
        text = read_text_file(args.config_path);
    LabConfig cfg;
    try {
        cfg = parse_config(text, args.overrides);
    } catch (const ConfigError& e) {
        std::ostringstream os;
        const std::string where = args.config_path.empty() ? std::string("<overrides>") : args.config_path;
        for (const auto& d : e.diagnostics())
            os << where << ": " << d << '\n';
        throw std::runtime_error(os.str());
    }
    if (args.seed)
        cfg.experiment.seed = static_cast<Seed>(*args.seed);
    cfg.experiment.workers = worker_count();
    return cfg;
}

int cmd_simulate(const CommonArgs& args, const std::string& truth_path, std::int64_t n, int resolution)
{
    const LabConfig cfg = load_config(args);
    CoefficientTree truth = [&] {
        if (truth_path.empty())
            return experiment_truth(cfg.experiment);
        std::ifstream is(truth_path);
        if (!is)
            throw std::runtime_error(truth_path + ": cannot open truth file");
        try {
            return read_tree(is);
        } catch (const std::exception& e) {
            throw std::runtime_error(truth_path + ": " + e.what());
        }
    }();

    ObservationOptions opts;
    opts.resolution = resolution;
    opts.noisy_alpha00 = cfg.experiment.noisy_alpha00;
    const SequenceObservation obs =
        simulate_observation(truth, n, derive_seed(cfg.experiment.seed, StreamTag::observation), opts);

    ensure_directory(args.out_dir);
    std::ostringstream t;
    write_tree(t, truth);
    write_text_file(fs::path(args.out_dir) / "truth.txt", t.str());
    std::ostringstream o;
    write_tree(o, obs.data);
    write_text_file(fs::path(args.out_dir) / "observation.txt", o.str());
    write_text_file(fs::path(args.out_dir) / "config.txt", emit_config(cfg));
    std::cout << "n = " << n << ", J_max = " << obs.data.j_max() << ", sigma_n = " << format_double(obs.sigma_n)
              << "\nwrote " << (fs::path(args.out_dir) / "observation.txt").string() << '\n';
    return 0;
}

struct DenoiseArgs {
    std::string input;
    std::string output;
    std::string wavelet = "haar";
    std::string estimator = "median";
    std::string noise_sd;
    std::optional<double> n;
    double s = 1.0;
    double p = 2.0;
    double q = 2.0;
    double gamma = 0.5;
    double c_a = 1.0;
    double c_pi = 1.0;
};

int cmd_denoise(const DenoiseArgs& a)
{
    std::ifstream is(a.input);
    if (!is)
        throw std::runtime_error(a.input + ": cannot open signal file");
    SampledSignal y = [&] {
        try {
            return read_signal(is);
        } catch (const std::exception& e) {
            throw std::runtime_error(a.input + ": " + e.what());
        }
    }();

    DenoiseOptions opts;
    opts.wavelet = a.wavelet;
    opts.s = a.s;
    opts.p = a.p;
    opts.gamma = a.gamma;
    opts.c_a = a.c_a;
    opts.c_pi = a.c_pi;
    opts.estimator = parse_estimator(a.estimator);
    if (a.n) {
        // coefficient noise variance 1/n is a per-sample sd of sqrt(N/n)
        opts.noise_sd = std::sqrt(static_cast<double>(y.length()) / *a.n);
    } else if (a.noise_sd.empty()) {
        opts.noise_sd = 1.0;
    } else if (a.noise_sd == "mad") {
        opts.noise_sd.reset();
    } else {
        auto sd = parse_double(a.noise_sd);
        if (!sd)
            throw std::runtime_error("--noise-sd: expected a number or 'mad', got '" + a.noise_sd + "'");
        opts.noise_sd = *sd;
    }
    const std::string err = BesovIndex::validate(a.s, a.p, a.q, 1.0);
    if (!err.empty())
        throw std::runtime_error("--s/--p/--q: " + err);

    const DenoiseResult r = denoise(y, opts);
    std::ostringstream os;
    write_signal(os, r.signal);
    write_text_file(a.output, os.str());

    nlohmann::ordered_json j;
    j["input"] = a.input;
    j["length"] = y.length();
    j["wavelet"] = WaveletFilter::by_name(a.wavelet).label();
    j["estimator"] = a.estimator;
    j["noise_sd"] = r.noise_sd;
    j["alpha"] = r.alpha;
    j["levels"] = nlohmann::ordered_json::array();
    for (const auto& l : r.levels)
        j["levels"].push_back({{"j", l.j}, {"mean_omega", l.mean_omega}, {"nonzero", l.nonzero}});
    write_text_file(a.output + ".json", j.dump(2) + "\n");
    std::cout << "wrote " << a.output << " (" << y.length() << " samples, noise sd " << format_double(r.noise_sd)
              << ")\n";
    return 0;
}

int cmd_rate(const CommonArgs& args)
{
    const LabConfig cfg = load_config(args);
    const RateExperimentResult result = run_contraction_experiment(cfg.experiment);
    emit_rate_results(result, cfg, args.out_dir);
    const ContractionCheck cc = check_contraction(result);
    std::cout << "slope " << format_double(result.fit_mean.slope) << " (theory -"
              << format_double(result.exponent_theoretical) << ", tolerance "
              << format_double(cfg.experiment.slope_tolerance) << "): " << (result.pass ? "PASS" : "FAIL") << '\n'
              << "contraction: " << (cc.pass ? "PASS" : "FAIL") << " (final min mass "
              << format_double(cc.final_min_mass) << " at M = " << format_double(cc.final_best_M) << ")\n"
              << "wrote " << (fs::path(args.out_dir) / "rate.csv").string() << '\n';
    return 0;
}

int cmd_prior_mass(const CommonArgs& args)
{
    const LabConfig cfg = load_config(args);
    const auto rows = run_prior_mass_experiment(cfg.experiment, cfg.probe_samples);
    emit_prior_mass_results(rows, cfg, args.out_dir);
    const PriorMassSummary s = summarize_prior_mass(rows);
    std::cout << "ratio spread " << format_double(s.spread) << ", min ess " << format_double(s.min_ess) << ": "
              << (s.pass ? "PASS" : "FAIL") << '\n'
              << "wrote " << (fs::path(args.out_dir) / "prior_mass.csv").string() << '\n';
    return 0;
}

int cmd_check(std::int64_t seed)
{
    const auto rows = run_checks(static_cast<Seed>(seed));
    print_check_table(std::cout, rows);
    return all_passed(rows) ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bayesian wavelet shrinkage and posterior contraction lab"};
    app.require_subcommand(1);

    CommonArgs sim_args;
    std::string truth_path;
    std::int64_t sim_n = 0;
    int sim_resolution = -1;
    auto* sim = app.add_subcommand("simulate", "truth + n -> observation file");
    add_common(sim, sim_args);
    sim->add_option("--truth", truth_path, "truth tree file; generated from the config when omitted")
        ->check(CLI::ExistingFile);
    sim->add_option("-n,--n", sim_n, "sample size")->required()->check(CLI::PositiveNumber);
    sim->add_option("--resolution", sim_resolution, "finest observed level; default ceil(log2 n)");

    DenoiseArgs den;
    auto* dn = app.add_subcommand("denoise", "signal -> signal");
    dn->add_option("-i,--input", den.input, "signal file, one value per line")->required()->check(CLI::ExistingFile);
    dn->add_option("-o,--output", den.output, "output signal file")->required();
    dn->add_option("--wavelet", den.wavelet, "haar or d4")->check(CLI::IsMember({"haar", "d4", "db2", "daubechies4"}));
    dn->add_option("--estimator", den.estimator, "mean or median")->check(CLI::IsMember({"mean", "median"}));
    auto* sd_opt = dn->add_option("--noise-sd", den.noise_sd, "per-sample noise sd (default 1), or 'mad' to estimate it");
    dn->add_option("--n", den.n, "sample size of the sequence model; coefficient noise variance 1/n")
        ->check(CLI::PositiveNumber)
        ->excludes(sd_opt);
    dn->add_option("--s", den.s, "smoothness");
    dn->add_option("--p", den.p, "integrability");
    dn->add_option("--q", den.q, "fine index");
    dn->add_option("--gamma", den.gamma, "inclusion decay exponent")->check(CLI::NonNegativeNumber);
    dn->add_option("--c-a", den.c_a, "slab variance constant")->check(CLI::PositiveNumber);
    dn->add_option("--c-pi", den.c_pi, "inclusion constant")->check(CLI::Range(0.0, 1.0));

    CommonArgs rate_args;
    auto* rate = app.add_subcommand("rate", "config -> rate.csv + summary.json");
    add_common(rate, rate_args);

    CommonArgs pm_args;
    auto* pm = app.add_subcommand("prior-mass", "config -> prior_mass.csv");
    add_common(pm, pm_args);

    std::int64_t check_seed = 0;
    auto* chk = app.add_subcommand("check", "numeric probes; nonzero exit on failure");
    chk->add_option("--seed", check_seed, "seed for the randomized probes")->check(CLI::NonNegativeNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim)
            return cmd_simulate(sim_args, truth_path, sim_n, sim_resolution);
        if (*dn)
            return cmd_denoise(den);
        if (*rate)
            return cmd_rate(rate_args);
        if (*pm)
            return cmd_prior_mass(pm_args);
        if (*chk)
            return cmd_check(check_seed);
    } catch (const OutputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::string msg = e.what();
        if (!msg.empty() && msg.back() == '\n')
            msg.pop_back();
        std::cerr << "error: " << msg << '\n';
        return 2;
    }
    return 0;
}
