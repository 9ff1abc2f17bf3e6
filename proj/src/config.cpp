#include "bwshrink/config.hpp"

#include "bwshrink/text.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

namespace bwshrink {

ConfigError::ConfigError(std::vector<std::string> diagnostics)
    : std::runtime_error([&] {
          std::string msg;
          for (const auto& d : diagnostics) {
              if (!msg.empty())
                  msg += '\n';
              msg += d;
          }
          return msg;
      }()),
      diagnostics_(std::move(diagnostics))
{
}

std::vector<std::int64_t> parse_n_grid(std::string_view text)
{
    text = trim(text);
    if (auto dots = text.find(".."); dots != std::string_view::npos) {
        auto power = [](std::string_view tok) -> std::optional<long long> {
            tok = trim(tok);
            if (tok.substr(0, 2) != "2^")
                return std::nullopt;
            return parse_integer(tok.substr(2));
        };
        auto lo = power(text.substr(0, dots));
        auto hi = power(text.substr(dots + 2));
        if (!lo || !hi || *lo < 0 || *hi > 40 || *lo > *hi)
            throw std::invalid_argument("expected a range of the form 2^a..2^b with 0 <= a <= b <= 40");
        std::vector<std::int64_t> out;
        for (long long e = *lo; e <= *hi; ++e)
            out.push_back(std::int64_t{1} << e);
        return out;
    }
    std::string normalized(text);
    std::replace(normalized.begin(), normalized.end(), ',', ' ');
    std::vector<std::int64_t> out;
    for (auto tok : split_whitespace(normalized)) {
        auto v = parse_integer(tok);
        if (!v)
            throw std::invalid_argument("'" + std::string(tok) + "' is not an integer");
        out.push_back(*v);
    }
    if (out.empty())
        throw std::invalid_argument("n_grid is empty");
    return out;
}

namespace {

// Values are staged as raw Besov parameters so cross-field checks can run
// after every key is read.
struct Staging {
    double s = 1.0;
    double p = 2.0;
    double q = 2.0;
    double B = 1.0;
    std::size_t s_line = 0;
    std::size_t p_line = 0;
    std::size_t q_line = 0;
    std::size_t B_line = 0;
};

using Setter = std::function<void(LabConfig&, Staging&, std::string_view, std::size_t)>;
using Getter = std::function<std::string(const LabConfig&)>;

struct KeySpec {
    std::string section;
    std::string key;
    Setter set;
    Getter get;
};

struct ValueError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

double as_real(std::string_view v)
{
    auto d = parse_double(v);
    if (!d || std::isnan(*d))
        throw ValueError("expected a number, got '" + std::string(v) + "'");
    return *d;
}

double as_finite(std::string_view v)
{
    double d = as_real(v);
    if (!std::isfinite(d))
        throw ValueError("expected a finite number, got '" + std::string(v) + "'");
    return d;
}

long long as_int(std::string_view v)
{
    auto i = parse_integer(v);
    if (!i)
        throw ValueError("expected an integer, got '" + std::string(v) + "'");
    return *i;
}

bool as_bool(std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ValueError("expected true or false, got '" + std::string(v) + "'");
}

std::string join_reals(const std::vector<double>& v)
{
    std::string out;
    for (double x : v) {
        if (!out.empty())
            out += ", ";
        out += format_double(x);
    }
    return out;
}

std::string join_ints(const std::vector<std::int64_t>& v)
{
    std::string out;
    for (auto x : v) {
        if (!out.empty())
            out += ", ";
        out += std::to_string(x);
    }
    return out;
}

const std::vector<KeySpec>& key_table()
{
    static const std::vector<KeySpec> table = [] {
        std::vector<KeySpec> t;
        auto add = [&](std::string section, std::string key, Setter set, Getter get) {
            t.push_back({std::move(section), std::move(key), std::move(set), std::move(get)});
        };

        // [besov]
        add("besov", "s",
            [](LabConfig&, Staging& st, std::string_view v, std::size_t line) { st.s = as_finite(v); st.s_line = line; },
            [](const LabConfig& c) { return format_double(c.experiment.besov.s()); });
        add("besov", "p",
            [](LabConfig&, Staging& st, std::string_view v, std::size_t line) { st.p = as_real(v); st.p_line = line; },
            [](const LabConfig& c) { return format_double(c.experiment.besov.p()); });
        add("besov", "q",
            [](LabConfig&, Staging& st, std::string_view v, std::size_t line) { st.q = as_real(v); st.q_line = line; },
            [](const LabConfig& c) { return format_double(c.experiment.besov.q()); });
        add("besov", "B",
            [](LabConfig&, Staging& st, std::string_view v, std::size_t line) { st.B = as_real(v); st.B_line = line; },
            [](const LabConfig& c) { return format_double(c.experiment.besov.radius()); });

        // [truth]
        add("truth", "kind",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                try {
                    c.experiment.truth.kind = parse_truth_kind(std::string(v));
                } catch (const std::invalid_argument& e) {
                    throw ValueError(e.what());
                }
            },
            [](const LabConfig& c) { return to_string(c.experiment.truth.kind); });
        add("truth", "margin",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                double m = as_finite(v);
                if (!(m > 0.0 && m < 1.0))
                    throw ValueError("margin must lie in (0, 1)");
                c.experiment.truth.margin = m;
            },
            [](const LabConfig& c) { return format_double(c.experiment.truth.margin); });
        add("truth", "J_max",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                long long j = as_int(v);
                if (j < 0 || j > 26)
                    throw ValueError("J_max must lie in [0, 26]");
                c.experiment.truth.j_max = static_cast<int>(j);
            },
            [](const LabConfig& c) { return std::to_string(c.experiment.truth.j_max); });
        add("truth", "decay",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                double d = as_finite(v);
                if (d < 0.0)
                    throw ValueError("decay must be >= 0");
                c.experiment.truth.decay = d;
            },
            [](const LabConfig& c) { return format_double(c.experiment.truth.decay); });
        add("truth", "alpha00",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) { c.experiment.truth.alpha00 = as_finite(v); },
            [](const LabConfig& c) { return format_double(c.experiment.truth.alpha00); });
        add("truth", "signal-name",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                static const std::vector<std::string> names{"blocks", "bumps", "doppler", "heavisine"};
                if (std::find(names.begin(), names.end(), v) == names.end())
                    throw ValueError("signal-name must be one of blocks, bumps, doppler, heavisine");
                c.experiment.truth.signal = std::string(v);
            },
            [](const LabConfig& c) { return c.experiment.truth.signal; });
        add("truth", "wavelet",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                if (v != "haar" && v != "d4")
                    throw ValueError("wavelet must be haar or d4");
                c.experiment.truth.wavelet = std::string(v);
            },
            [](const LabConfig& c) { return c.experiment.truth.wavelet; });

        // [prior]
        add("prior", "prior",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                if (v == "spike-slab")
                    c.experiment.prior_kind = PriorKind::spike_slab;
                else if (v == "sieve")
                    c.experiment.prior_kind = PriorKind::sieve;
                else
                    throw ValueError("prior must be spike-slab or sieve");
            },
            [](const LabConfig& c) {
                return std::string(c.experiment.prior_kind == PriorKind::sieve ? "sieve" : "spike-slab");
            });
        add("prior", "alpha",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                if (v == "auto") {
                    c.experiment.alpha.reset();
                    return;
                }
                double a = as_finite(v);
                if (!(a > 1.0))
                    throw ValueError("alpha must be > 1");
                c.experiment.alpha = a;
            },
            [](const LabConfig& c) {
                return c.experiment.alpha ? format_double(*c.experiment.alpha) : std::string("auto");
            });
        add("prior", "gamma",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                double g = as_finite(v);
                if (g < 0.0)
                    throw ValueError("gamma must be >= 0");
                c.experiment.gamma = g;
            },
            [](const LabConfig& c) { return format_double(c.experiment.gamma); });
        add("prior", "c_a",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                double a = as_finite(v);
                if (!(a > 0.0))
                    throw ValueError("c_a must be > 0");
                c.experiment.c_a = a;
            },
            [](const LabConfig& c) { return format_double(c.experiment.c_a); });
        add("prior", "c_pi",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                double a = as_finite(v);
                if (!(a > 0.0 && a <= 1.0))
                    throw ValueError("c_pi must lie in (0, 1]");
                c.experiment.c_pi = a;
            },
            [](const LabConfig& c) { return format_double(c.experiment.c_pi); });
        add("prior", "mu",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                double m = as_finite(v);
                if (!(m > 0.0))
                    throw ValueError("mu must be > 0");
                c.experiment.mu = m;
            },
            [](const LabConfig& c) { return format_double(c.experiment.mu); });
        add("prior", "m_max",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                if (v == "auto") {
                    c.experiment.m_max.reset();
                    return;
                }
                long long m = as_int(v);
                if (m < 0 || m > 26)
                    throw ValueError("m_max must lie in [0, 26] or be auto");
                c.experiment.m_max = static_cast<int>(m);
            },
            [](const LabConfig& c) {
                return c.experiment.m_max ? std::to_string(*c.experiment.m_max) : std::string("auto");
            });

        // [experiment]
        add("experiment", "n_grid",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                std::vector<std::int64_t> grid;
                try {
                    grid = parse_n_grid(v);
                } catch (const std::invalid_argument& e) {
                    throw ValueError(e.what());
                }
                if (grid.front() < 2)
                    throw ValueError("n_grid values must be >= 2");
                for (std::size_t i = 1; i < grid.size(); ++i)
                    if (grid[i] <= grid[i - 1])
                        throw ValueError("n_grid must be strictly increasing");
                c.experiment.n_grid = std::move(grid);
            },
            [](const LabConfig& c) { return join_ints(c.experiment.n_grid); });
        add("experiment", "replicates",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                long long r = as_int(v);
                if (r < 1)
                    throw ValueError("replicates must be >= 1");
                c.experiment.replicates = static_cast<int>(r);
            },
            [](const LabConfig& c) { return std::to_string(c.experiment.replicates); });
        add("experiment", "M",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                double m = as_finite(v);
                if (!(m > 0.0))
                    throw ValueError("M must be > 0");
                c.experiment.M = m;
            },
            [](const LabConfig& c) { return format_double(c.experiment.M); });
        add("experiment", "M_sweep",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                std::string normalized(v);
                std::replace(normalized.begin(), normalized.end(), ',', ' ');
                std::vector<double> sweep;
                for (auto tok : split_whitespace(normalized)) {
                    double m = as_finite(tok);
                    if (!(m > 0.0))
                        throw ValueError("M_sweep values must be > 0");
                    sweep.push_back(m);
                }
                c.experiment.M_sweep = std::move(sweep);
            },
            [](const LabConfig& c) { return join_reals(c.experiment.M_sweep); });
        add("experiment", "posterior_samples",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                long long n = as_int(v);
                if (n < 1)
                    throw ValueError("posterior_samples must be >= 1");
                c.experiment.posterior_samples = n;
            },
            [](const LabConfig& c) { return std::to_string(c.experiment.posterior_samples); });
        add("experiment", "seed",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                long long s = as_int(v);
                if (s < 0)
                    throw ValueError("seed must be >= 0");
                c.experiment.seed = static_cast<Seed>(s);
            },
            [](const LabConfig& c) { return std::to_string(c.experiment.seed); });
        add("experiment", "noisy_alpha00",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) { c.experiment.noisy_alpha00 = as_bool(v); },
            [](const LabConfig& c) { return std::string(c.experiment.noisy_alpha00 ? "true" : "false"); });
        add("experiment", "slope_tolerance",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                double t = as_finite(v);
                if (!(t > 0.0))
                    throw ValueError("slope_tolerance must be > 0");
                c.experiment.slope_tolerance = t;
            },
            [](const LabConfig& c) { return format_double(c.experiment.slope_tolerance); });

        // [probe]
        add("probe", "probe_samples",
            [](LabConfig& c, Staging&, std::string_view v, std::size_t) {
                long long n = as_int(v);
                if (n < 1)
                    throw ValueError("probe_samples must be >= 1");
                c.probe_samples = n;
            },
            [](const LabConfig& c) { return std::to_string(c.probe_samples); });
        return t;
    }();
    return table;
}

const KeySpec* find_key(std::string_view key)
{
    for (const auto& spec : key_table())
        if (spec.key == key)
            return &spec;
    return nullptr;
}

bool known_section(std::string_view name)
{
    for (const auto& spec : key_table())
        if (spec.section == name)
            return true;
    return false;
}

} // namespace

LabConfig parse_config(std::string_view text, const std::vector<std::string>& overrides)
{
    LabConfig cfg;
    Staging st;
    std::vector<std::string> diags;
    std::map<std::string, std::size_t, std::less<>> seen;
    std::string section;

    auto handle = [&](std::string_view line, const std::string& where, std::size_t line_no, bool is_override) {
        line = trim(line);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = trim(line.substr(0, hash));
        if (line.empty())
            return;
        if (!is_override && line.front() == '[') {
            if (line.back() != ']') {
                diags.push_back(where + ": malformed section header");
                return;
            }
            auto name = trim(line.substr(1, line.size() - 2));
            if (!known_section(name)) {
                diags.push_back(where + ": unknown section [" + std::string(name) + "]");
                section.clear();
                return;
            }
            section = std::string(name);
            return;
        }
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            diags.push_back(where + ": expected 'key = value'");
            return;
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        const KeySpec* spec = find_key(key);
        if (spec == nullptr) {
            diags.push_back(where + ": unknown key '" + std::string(key) + "'");
            return;
        }
        if (!is_override && !section.empty() && spec->section != section) {
            diags.push_back(where + ": key '" + std::string(key) + "' belongs to section [" + spec->section +
                            "], not [" + section + "]");
            return;
        }
        if (!is_override) {
            if (auto it = seen.find(key); it != seen.end()) {
                diags.push_back(where + ": duplicate key '" + std::string(key) + "' (first set on line " +
                                std::to_string(it->second) + ")");
                return;
            }
            seen.emplace(std::string(key), line_no);
        }
        try {
            spec->set(cfg, st, value, line_no);
        } catch (const ValueError& e) {
            diags.push_back(where + ": " + std::string(key) + ": " + e.what());
        }
    };

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++line_no;
        handle(text.substr(start, end - start), "line " + std::to_string(line_no), line_no, false);
        start = end + 1;
    }
    for (std::size_t i = 0; i < overrides.size(); ++i)
        handle(overrides[i], "override '" + overrides[i] + "'", 0, true);

    // Cross-field Besov constraints, attributed to the line that set the offending key.
    auto at = [](std::size_t line) { return line == 0 ? std::string("override") : "line " + std::to_string(line); };
    if (std::isnan(st.p) || st.p < 1.0)
        diags.push_back(at(st.p_line) + ": p: p must satisfy 1 <= p <= inf (got " + format_double(st.p) + ")");
    else if (std::isnan(st.q) || st.q < 1.0)
        diags.push_back(at(st.q_line) + ": q: q must satisfy 1 <= q <= inf (got " + format_double(st.q) + ")");
    else if (!(st.B > 0.0) || !std::isfinite(st.B))
        diags.push_back(at(st.B_line) + ": B: B must be a positive finite radius");
    else if (!(st.s > std::max(0.0, 1.0 / st.p - 0.5)))
        diags.push_back(at(st.s_line != 0 ? st.s_line : st.p_line) + ": s: s must satisfy s > max(0, 1/p - 1/2) = " +
                        format_double(std::max(0.0, 1.0 / st.p - 0.5)) + " (got s = " + format_double(st.s) +
                        ", p = " + format_double(st.p) + ")");
    else
        cfg.experiment.besov = BesovIndex(st.s, st.p, st.q, st.B);

    if (diags.empty() && !(cfg.experiment.resolved_alpha() > 1.0))
        diags.push_back("config: alpha resolved from (s, p) is not > 1");

    if (!diags.empty())
        throw ConfigError(std::move(diags));
    cfg.experiment.truth.besov = cfg.experiment.besov;
    return cfg;
}

std::vector<ConfigEntry> config_entries(const LabConfig& cfg)
{
    std::vector<ConfigEntry> out;
    for (const auto& spec : key_table())
        out.push_back({spec.section, spec.key, spec.get(cfg)});
    return out;
}

std::string emit_config(const LabConfig& cfg)
{
    std::ostringstream os;
    std::string section;
    for (const auto& e : config_entries(cfg)) {
        if (e.section != section) {
            if (!section.empty())
                os << '\n';
            section = e.section;
            os << '[' << section << "]\n";
        }
        os << e.key << " = " << e.value << '\n';
    }
    return os.str();
}

} // namespace bwshrink
