#include "chpca/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <numbers>
#include <random>

#include "chpca/error.hpp"
#include "chpca/io.hpp"
#include "chpca/significance.hpp"

namespace chpca {

std::vector<SeriesLabel> synth_labels(const SynthSpec& spec) {
    std::vector<SeriesLabel> labels;
    for (const auto& p : spec.products)
        for (Variable v : spec.variables) labels.push_back({p, v});
    return labels;
}

namespace {

std::vector<Factor> all_factors(const SynthSpec& spec) {
    std::vector<Factor> factors = spec.factors;
    if (spec.firms.empty() || spec.firm_loading == 0.0) return factors;
    if (spec.firms.size() != spec.products.size()) throw Error("synth: one firm id per product required");
    std::vector<int> firm_ids = spec.firms;
    std::sort(firm_ids.begin(), firm_ids.end());
    firm_ids.erase(std::unique(firm_ids.begin(), firm_ids.end()), firm_ids.end());
    const std::size_t V = spec.variables.size();
    const std::size_t N = spec.series_count();
    for (std::size_t f = 0; f < firm_ids.size(); ++f) {
        Factor factor;
        factor.cycles = {spec.firm_cycles + static_cast<double>(f)};
        factor.lags.assign(N, 0.0);
        factor.loadings.assign(N, 0.0);
        for (std::size_t p = 0; p < spec.products.size(); ++p) {
            if (spec.firms[p] != firm_ids[f]) continue;
            for (std::size_t v = 0; v < V; ++v) factor.loadings[p * V + v] = spec.firm_loading;
        }
        factors.push_back(std::move(factor));
    }
    return factors;
}

void validate(const SynthSpec& spec, const std::vector<Factor>& factors) {
    const std::size_t N = spec.series_count();
    const double T = static_cast<double>(spec.length);
    if (spec.length < 64) throw Error("synth: length must be at least 64");
    if (N == 0) throw Error("synth: no series requested");
    if (spec.noise_sd < 0.0 || !std::isfinite(spec.noise_sd)) throw Error("synth: noise_sd must be nonnegative");
    for (std::size_t f = 0; f < factors.size(); ++f) {
        const Factor& factor = factors[f];
        const std::string where = "synth factor " + std::to_string(f) + ": ";
        if (factor.lags.size() != N || factor.loadings.size() != N)
            throw Error(where + "needs one lag and one loading per series");
        if (factor.cycles.empty()) throw Error(where + "no frequencies");
        if (!factor.phases.empty() && factor.phases.size() != factor.cycles.size())
            throw Error(where + "needs one phase per frequency");
        for (double k : factor.cycles) {
            if (!(k > 0.0 && k < T / 2.0)) throw Error(where + "cycle count outside (0, T/2)");
            if (!spec.allow_fractional_cycles && k != std::round(k))
                throw Error(where + "fractional cycle count " + format_double(k) + " requires allow_fractional_cycles");
        }
        for (double lag : factor.lags)
            if (!(lag > -T / 4.0 && lag < T / 4.0)) throw Error(where + "lag outside (-T/4, T/4)");
        for (double w : factor.loadings)
            if (!(w >= 0.0 && w <= 1.0)) throw Error(where + "loading outside [0, 1]");
    }
}

} // namespace

SynthResult generate(const SynthSpec& spec) {
    const std::vector<Factor> factors = all_factors(spec);
    validate(spec, factors);
    const std::size_t N = spec.series_count();
    const auto T = static_cast<Eigen::Index>(spec.length);
    const auto F = static_cast<Eigen::Index>(factors.size());
    const double two_pi = 2.0 * std::numbers::pi;

    SynthResult out;
    out.panel.labels = synth_labels(spec);
    for (Eigen::Index t = 0; t < T; ++t) out.panel.days.push_back(spec.start + std::chrono::days(static_cast<int>(t)));
    out.panel.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), T);

    for (const Factor& factor : factors) {
        for (std::size_t a = 0; a < N; ++a) {
            if (factor.loadings[a] == 0.0) continue;
            const double amplitude = factor.loadings[a] * std::sqrt(2.0 / static_cast<double>(factor.cycles.size()));
            for (std::size_t k = 0; k < factor.cycles.size(); ++k) {
                const double omega = two_pi * factor.cycles[k] / static_cast<double>(T);
                const double phase = factor.phases.empty() ? 0.0 : factor.phases[k];
                for (Eigen::Index t = 0; t < T; ++t) {
                    out.panel.values(static_cast<Eigen::Index>(a), t) +=
                        amplitude * std::cos(omega * (static_cast<double>(t) - factor.lags[a]) + phase);
                }
            }
        }
    }
    if (spec.noise_sd > 0.0) {
        // One stream per series keeps a series' noise independent of N.
        for (std::size_t a = 0; a < N; ++a) {
            std::mt19937_64 rng(derive_seed(spec.seed, a));
            std::normal_distribution<double> gauss(0.0, spec.noise_sd);
            for (Eigen::Index t = 0; t < T; ++t) out.panel.values(static_cast<Eigen::Index>(a), t) += gauss(rng);
        }
    }

    GroundTruth& truth = out.truth;
    truth.labels = out.panel.labels;
    truth.lags = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), F);
    truth.loadings = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), F);
    for (Eigen::Index f = 0; f < F; ++f) {
        for (std::size_t a = 0; a < N; ++a) {
            truth.lags(static_cast<Eigen::Index>(a), f) = factors[static_cast<std::size_t>(f)].lags[a];
            truth.loadings(static_cast<Eigen::Index>(a), f) = factors[static_cast<std::size_t>(f)].loadings[a];
        }
    }
    const auto n = static_cast<Eigen::Index>(N);
    truth.expected_theta = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
    auto only_factor = [&](Eigen::Index a) -> Eigen::Index {
        Eigen::Index found = -1;
        for (Eigen::Index f = 0; f < F; ++f) {
            if (truth.loadings(a, f) == 0.0) continue;
            if (found >= 0) return -1;
            found = f;
        }
        return found;
    };
    for (Eigen::Index a = 0; a < n; ++a) {
        const Eigen::Index fa = only_factor(a);
        for (Eigen::Index b = 0; b < n; ++b) {
            if (fa < 0 || only_factor(b) != fa) continue;
            const Factor& factor = factors[static_cast<std::size_t>(fa)];
            if (factor.cycles.size() != 1) continue;
            const double omega = two_pi * factor.cycles.front() / static_cast<double>(T);
            truth.expected_theta(a, b) = omega * (truth.lags(a, fa) - truth.lags(b, fa));
        }
    }
    return out;
}

std::vector<double> cycle_band(int lo, int hi) {
    std::vector<double> out;
    for (int k = lo; k <= hi; ++k) out.push_back(static_cast<double>(k));
    return out;
}

SynthSpec lead_lag_spec(std::size_t n_products, const std::vector<std::pair<Variable, double>>& variable_lags,
                        const LeadLagOptions& options) {
    SynthSpec spec;
    spec.length = options.length;
    spec.noise_sd = options.noise_sd;
    spec.seed = options.seed;
    spec.variables.clear();
    for (const auto& [v, lag] : variable_lags) spec.variables.push_back(v);
    for (std::size_t p = 0; p < n_products; ++p) {
        spec.products.push_back(std::string(1, static_cast<char>('A' + p / 9)) + std::to_string(p % 9 + 1));
    }
    const std::size_t V = variable_lags.size();
    const bool market = options.per_product && options.market_loading > 0.0;
    const std::size_t n_factors = (options.per_product ? n_products : 1) + (market ? 1 : 0);
    for (std::size_t f = 0; f < n_factors; ++f) {
        Factor factor;
        factor.cycles = options.cycles;
        std::mt19937_64 rng(derive_seed(options.seed ^ 0x5048415345ULL, f));
        std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
        for (std::size_t k = 0; k < factor.cycles.size(); ++k) factor.phases.push_back(phase(rng));
        const bool market_factor = market && f == n_products;
        for (std::size_t p = 0; p < n_products; ++p) {
            double loading = 0.0;
            if (market_factor)
                loading = options.market_loading;
            else if (!options.per_product || p == f)
                loading = options.loading;
            for (std::size_t v = 0; v < V; ++v) {
                factor.lags.push_back(variable_lags[v].second);
                factor.loadings.push_back(loading);
            }
        }
        spec.factors.push_back(std::move(factor));
    }
    return spec;
}

void save_ground_truth(const std::filesystem::path& dir, const GroundTruth& truth) {
    std::string out = "index,product,variable";
    for (Eigen::Index f = 0; f < truth.lags.cols(); ++f) {
        out += ",lag_f" + std::to_string(f) + ",loading_f" + std::to_string(f);
    }
    out += "\n";
    for (std::size_t a = 0; a < truth.labels.size(); ++a) {
        out += std::to_string(a) + "," + truth.labels[a].product + "," + std::string(to_string(truth.labels[a].variable));
        for (Eigen::Index f = 0; f < truth.lags.cols(); ++f) {
            out += "," + format_double(truth.lags(static_cast<Eigen::Index>(a), f)) + "," +
                   format_double(truth.loadings(static_cast<Eigen::Index>(a), f));
        }
        out += "\n";
    }
    write_text(dir / "ground_truth.csv", out);
    write_matrix(dir / "expected_theta.csv", truth.expected_theta);
}

namespace {

double level_of(Variable v) {
    switch (v) {
    case Variable::P: return 0.3;
    case Variable::Q: return 20000.0;
    case Variable::Visit: return 40.0;
    case Variable::TVAd: return 3000.0;
    case Variable::Search: return 2.0;
    }
    return 1.0;
}

} // namespace

RawEventTable synth_events(const PanelSeries& x, const SynthEventsOptions& options) {
    if (options.customers == 0) throw Error("synth events need at least one customer");
    if (x.days.size() != x.length()) throw Error("synth events need calendar days on the panel");
    std::vector<std::string> ids;
    for (std::size_t c = 0; c < options.customers; ++c) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "C%04zu", c + 1);
        ids.emplace_back(buf);
    }
    RawEventTable table;
    for (std::size_t a = 0; a < x.labels.size(); ++a) {
        const SeriesLabel& label = x.labels[a];
        const auto row = static_cast<Eigen::Index>(a);
        std::mt19937_64 rng(derive_seed(options.seed, a));
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const std::string sku = label.product + "-01";
        for (std::size_t t = 0; t < x.length(); ++t) {
            const double total = level_of(label.variable) * std::exp(0.25 * x.values(row, static_cast<Eigen::Index>(t)));
            std::vector<std::size_t> active;
            std::vector<double> weight;
            for (std::size_t c = 0; c < ids.size(); ++c) {
                const double u = unit(rng);
                const double w = unit(rng) + 0.05;
                if (u < options.participation) {
                    active.push_back(c);
                    weight.push_back(w);
                }
            }
            if (active.empty()) {
                active.push_back(t % ids.size());
                weight.push_back(1.0);
            }
            double weight_sum = 0.0;
            for (double w : weight) weight_sum += w;
            for (std::size_t i = 0; i < active.size(); ++i) {
                RawEvent ev;
                ev.customer_id = ids[active[i]];
                ev.product = label.product;
                ev.sku = sku;
                ev.variable = label.variable;
                ev.date = x.days[t];
                ev.value = label.variable == Variable::P ? total : total * weight[i] / weight_sum;
                table.rows.push_back(std::move(ev));
            }
        }
    }
    std::stable_sort(table.rows.begin(), table.rows.end(), [](const RawEvent& a, const RawEvent& b) {
        if (a.date != b.date) return a.date < b.date;
        return a.customer_id < b.customer_id;
    });
    return table;
}

ProfileTable synth_profiles(const std::vector<std::string>& ids, std::uint64_t seed) {
    ProfileTable profiles;
    profiles.ids = ids;
    std::mt19937_64 rng(derive_seed(seed, 0x70726F66ULL));
    for (const auto& [name, range] : profile_ranges()) {
        std::uniform_int_distribution<int> draw(static_cast<int>(range.lo), static_cast<int>(range.hi));
        auto& col = profiles.columns[name];
        for (std::size_t i = 0; i < ids.size(); ++i) col.push_back(static_cast<double>(draw(rng)));
    }
    return profiles;
}

void save_events(const std::filesystem::path& path, const RawEventTable& table) {
    std::string out = "customer_id,product_code,sku_code,variable,date,value\n";
    for (const auto& ev : table.rows) {
        out += ev.customer_id + "," + ev.product + "," + ev.sku + "," + std::string(to_string(ev.variable)) + "," +
               format_iso_date(ev.date) + "," + format_double(ev.value) + "\n";
    }
    write_text(path, out);
}

void save_profiles(const std::filesystem::path& path, const ProfileTable& profiles) {
    std::string out = "customer_id";
    for (const auto& [name, values] : profiles.columns) out += "," + name;
    out += "\n";
    for (std::size_t i = 0; i < profiles.ids.size(); ++i) {
        out += profiles.ids[i];
        for (const auto& [name, values] : profiles.columns) out += "," + (std::isnan(values[i]) ? std::string("NA") : format_double(values[i]));
        out += "\n";
    }
    write_text(path, out);
}

} // namespace chpca
