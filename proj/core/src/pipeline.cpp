#include "chpca/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "chpca/customer.hpp"
#include "chpca/eigenmodes.hpp"
#include "chpca/error.hpp"
#include "chpca/hilbert.hpp"
#include "chpca/hodge.hpp"
#include "chpca/ingest.hpp"
#include "chpca/io.hpp"
#include "chpca/significance.hpp"
#include "chpca/synth.hpp"

namespace fs = std::filesystem;

namespace chpca {

namespace {

constexpr const char* kPanel = "panel";
constexpr const char* kManifest = "manifest.txt";

const char* const kStageNames[] = {"synth", "ingest", "chpca", "rrs", "hodge", "project", "report"};

// What a stage consumed and which parameters shaped its output.
struct Stamp {
    std::vector<std::pair<std::string, std::string>> params;
    std::vector<std::pair<std::string, std::string>> inputs;  // file name, sha256
};

fs::path stamp_path(const fs::path& dir, Stage s) { return dir / (std::string(to_string(s)) + ".stamp"); }

void write_stamp(const fs::path& dir, Stage s, const Stamp& stamp) {
    std::string out = "stage " + std::string(to_string(s)) + "\n";
    for (const auto& [k, v] : stamp.params) out += "param " + k + " = " + v + "\n";
    for (const auto& [f, h] : stamp.inputs) out += "input " + f + " " + h + "\n";
    write_text(stamp_path(dir, s), out);
}

std::optional<Stamp> read_stamp(const fs::path& dir, Stage s) {
    const fs::path path = stamp_path(dir, s);
    if (!fs::exists(path)) return std::nullopt;
    Stamp stamp;
    std::istringstream in(read_text(path));
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("param ", 0) == 0) {
            const auto eq = line.find(" = ");
            if (eq == std::string::npos) continue;
            stamp.params.emplace_back(line.substr(6, eq - 6), line.substr(eq + 3));
        } else if (line.rfind("input ", 0) == 0) {
            const auto sp = line.rfind(' ');
            stamp.inputs.emplace_back(line.substr(6, sp - 6), line.substr(sp + 1));
        }
    }
    return stamp;
}

// Tracks a stage's inputs so that they can be stamped afterwards.
class StageContext {
public:
    StageContext(Stage stage, const RunConfig& config)
        : stage_(stage), dir_(config.out_dir), threads_(effective_threads(config)) {}

    const fs::path& dir() const { return dir_; }
    unsigned threads() const { return threads_; }
    std::string name() const { return std::string(to_string(stage_)); }

    [[noreturn]] void fail(const std::string& what) const { throw StageError(name(), what); }

    // Requires `file` (relative to out_dir) produced by `producer`, and checks
    // that the producer's own inputs have not changed since it ran.
    fs::path require(const std::string& file, Stage producer, std::string_view producer_hint = {}) {
        const fs::path path = dir_ / file;
        const std::string hint = producer_hint.empty() ? std::string(to_string(producer)) : std::string(producer_hint);
        if (!fs::exists(path)) fail("missing artifact '" + path.string() + "'; run the '" + hint + "' stage first");
        if (const auto stamp = read_stamp(dir_, producer)) {
            for (const auto& [input, hash] : stamp->inputs) {
                const fs::path upstream = fs::path(input).is_absolute() ? fs::path(input) : dir_ / input;
                if (!fs::exists(upstream) || sha256_file(upstream) != hash) {
                    fail("artifact '" + file + "' is stale ('" + input + "' changed); re-run the '" +
                         std::string(to_string(producer)) + "' stage");
                }
            }
        }
        record(path);
        return path;
    }

    // Registers an external input (not produced by any stage).
    fs::path external(const fs::path& path, const std::string& what) {
        if (!fs::exists(path)) fail(what + " not found: '" + path.string() + "'");
        record(path);
        return path;
    }

    void param(const std::string& key, const std::string& value) { stamp_.params.emplace_back(key, value); }

    void finish() { write_stamp(dir_, stage_, stamp_); }

private:
    void record(const fs::path& path) {
        std::string key = path.parent_path() == dir_ ? path.filename().string() : fs::absolute(path).string();
        for (const auto& [f, h] : stamp_.inputs)
            if (f == key) return;
        stamp_.inputs.emplace_back(key, sha256_file(path));
    }

    Stage stage_;
    fs::path dir_;
    unsigned threads_;
    Stamp stamp_;
};

std::string str(std::size_t v) { return std::to_string(v); }

// The panel may come from ingest or synth; both stamp it.
Stage panel_producer(const fs::path& dir) {
    return fs::exists(stamp_path(dir, Stage::Ingest)) ? Stage::Ingest : Stage::Synth;
}

PanelSeries require_panel(StageContext& ctx) {
    const Stage producer = panel_producer(ctx.dir());
    for (const char* part : {".labels.csv", ".days.csv", ".matrix.csv"})
        ctx.require(std::string(kPanel) + part, producer, "ingest' or 'synth");
    return load_panel(ctx.dir(), kPanel);
}

std::vector<std::size_t> significant_modes(StageContext& ctx) {
    const fs::path path = ctx.require("rrs_report.csv", Stage::Rrs);
    const DelimitedTable table = read_delimited(path);
    const std::size_t col = table.column("significant");
    std::vector<std::size_t> modes;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i][col] != "1") break;
        modes.push_back(i);
    }
    return modes;
}

EigenSystem require_eigensystem(StageContext& ctx) {
    ctx.require("eigenvectors.real.csv", Stage::Chpca);
    ctx.require("eigenvectors.imag.csv", Stage::Chpca);
    const fs::path values = ctx.require("eigenvalues.csv", Stage::Chpca);
    EigenSystem sys;
    sys.eigenvectors = read_complex_matrix(ctx.dir(), "eigenvectors");
    const DelimitedTable table = read_delimited(values);
    const std::size_t col = table.column("lambda");
    sys.eigenvalues.resize(static_cast<Eigen::Index>(table.rows.size()));
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        sys.eigenvalues(static_cast<Eigen::Index>(i)) = parse_double(table.rows[i][col]);
    if (sys.eigenvalues.size() != sys.eigenvectors.cols())
        ctx.fail("eigenvalues.csv and eigenvectors disagree on the number of modes; re-run the 'chpca' stage");
    return sys;
}

std::string panel_summary(const PanelSeries& all, const EntryDayCount& counts, std::size_t min_days) {
    std::string out = "product,variable,entry_days,kept,total\n";
    for (std::size_t a = 0; a < all.labels.size(); ++a) {
        const auto& label = all.labels[a];
        const auto it = counts.find(label);
        const std::size_t days = it == counts.end() ? 0 : it->second;
        out += label.product + "," + std::string(to_string(label.variable)) + "," + str(days) + "," +
               (days >= min_days ? "1" : "0") + "," + format_double(all.values.row(static_cast<Eigen::Index>(a)).sum()) +
               "\n";
    }
    return out;
}

DayRange resolve_window(const RunConfig& config, const RawEventTable& raw) {
    DayRange window{parse_iso_date("0001-01-01"), parse_iso_date("9999-12-31")};
    if (!config.window_start.empty()) window.first = parse_iso_date(config.window_start);
    if (!config.window_end.empty()) window.last = parse_iso_date(config.window_end);
    if (config.window_start.empty() || config.window_end.empty()) {
        if (raw.rows.empty()) throw Error("no data in window");
        auto [lo, hi] = std::minmax_element(raw.rows.begin(), raw.rows.end(),
                                            [](const RawEvent& a, const RawEvent& b) { return a.date < b.date; });
        if (config.window_start.empty()) window.first = lo->date;
        if (config.window_end.empty()) window.last = hi->date;
    }
    if (window.last < window.first) throw Error("window end precedes window start");
    return window;
}

DayRange wide_or_configured(const RunConfig& config) {
    DayRange window{parse_iso_date("0001-01-01"), parse_iso_date("9999-12-31")};
    if (!config.window_start.empty()) window.first = parse_iso_date(config.window_start);
    if (!config.window_end.empty()) window.last = parse_iso_date(config.window_end);
    return window;
}

void stage_synth(const RunConfig& config) {
    StageContext ctx(Stage::Synth, config);
    const double step = config.synth_lag_step;
    if (config.synth_min_cycle < 1 || config.synth_max_cycle < config.synth_min_cycle)
        ctx.fail("synth cycle band must satisfy 1 <= min_cycle <= max_cycle");
    LeadLagOptions opts;
    opts.cycles = cycle_band(static_cast<int>(config.synth_min_cycle), static_cast<int>(config.synth_max_cycle));
    opts.loading = config.synth_loading;
    opts.noise_sd = config.synth_noise;
    opts.seed = config.seed;
    opts.length = config.synth_length;
    opts.per_product = config.synth_per_product;
    opts.market_loading = config.synth_market_loading;
    const SynthSpec spec = lead_lag_spec(config.synth_products,
                                         {{Variable::P, 0.0}, {Variable::Q, step}, {Variable::TVAd, 2.0 * step}}, opts);
    const SynthResult result = generate(spec);
    const PanelSeries panel = standardize(result.panel);
    save_panel(ctx.dir(), kPanel, panel);
    save_ground_truth(ctx.dir(), result.truth);

    EntryDayCount counts;
    for (const auto& label : panel.labels) counts[label] = panel.length();
    write_text(ctx.dir() / "panel_summary.csv", panel_summary(result.panel, counts, 0));

    if (config.synth_customers > 0) {
        const RawEventTable events = synth_events(panel, {config.synth_customers, 0.3, config.seed});
        std::set<std::string> ids;
        for (const auto& ev : events.rows) ids.insert(ev.customer_id);
        save_events(ctx.dir() / "events.csv", events);
        save_profiles(ctx.dir() / "profiles.csv", synth_profiles({ids.begin(), ids.end()}, config.seed));
    }
    ctx.param("products", str(config.synth_products));
    ctx.param("length", str(config.synth_length));
    ctx.param("cycles", std::to_string(config.synth_min_cycle) + ".." + std::to_string(config.synth_max_cycle));
    ctx.param("per_product", config.synth_per_product ? "true" : "false");
    ctx.param("lag_step", format_double(step));
    ctx.param("loading", format_double(config.synth_loading));
    ctx.param("market_loading", format_double(config.synth_market_loading));
    ctx.param("noise", format_double(config.synth_noise));
    ctx.param("customers", str(config.synth_customers));
    ctx.param("seed", std::to_string(config.seed));
    ctx.finish();
}

void stage_ingest(const RunConfig& config) {
    StageContext ctx(Stage::Ingest, config);
    if (config.input.empty()) {
        // Import a previously saved panel instead of raw events.
        if (config.panel.empty()) ctx.fail("no input: pass --input (events) or --panel (saved panel directory)");
        for (const char* part : {".labels.csv", ".days.csv", ".matrix.csv"})
            ctx.external(config.panel / (std::string(kPanel) + part), "panel file");
        const PanelSeries panel = standardize(load_panel(config.panel, kPanel));
        save_panel(ctx.dir(), kPanel, panel);
        EntryDayCount counts;
        for (const auto& label : panel.labels) counts[label] = panel.length();
        write_text(ctx.dir() / "panel_summary.csv", panel_summary(panel, counts, 0));
        ctx.finish();
        return;
    }
    ctx.external(config.input, "input file");
    const LoadResult loaded = load_events(config.input, config.schema, wide_or_configured(config));
    const DayRange window = resolve_window(config, loaded.table);
    const AggregateResult agg = aggregate(loaded.table, window);
    const PanelSeries panel = standardize(filter_sparse(agg.panel, agg.counts, config.min_days));
    save_panel(ctx.dir(), kPanel, panel);
    write_text(ctx.dir() / "panel_summary.csv", panel_summary(agg.panel, agg.counts, config.min_days));

    std::vector<double> totals;
    for (std::size_t idx : indices_of(agg.panel.labels, Variable::Q))
        totals.push_back(agg.panel.values.row(static_cast<Eigen::Index>(idx)).sum());
    std::string ranksize = "first_rank,exponent,intercept,r2,points\n";
    for (std::size_t first : {std::size_t{1}, std::size_t{2}}) {
        try {
            const RankSizeFit fit = ranksize_fit(totals, {0.0, first});
            ranksize += str(first) + "," + format_double(fit.exponent) + "," + format_double(fit.intercept) + "," +
                        format_double(fit.r2) + "," + str(fit.points) + "\n";
        } catch (const Error&) {
            // too few products for a fit; leave the row out
        }
    }
    write_text(ctx.dir() / "ranksize.csv", ranksize);

    ctx.param("window", format_iso_date(window.first) + ".." + format_iso_date(window.last));
    ctx.param("min_days", str(config.min_days));
    ctx.param("rows_outside_window", str(loaded.dropped));
    ctx.finish();
}

void stage_chpca(const RunConfig& config) {
    StageContext ctx(Stage::Chpca, config);
    const PanelSeries panel = require_panel(ctx);
    const ComplexPanel z = complexify(panel, ctx.threads());
    const ComplexCorrelation c = correlation(z, ctx.threads());
    EigenSystem sys = eigendecompose(c, z);
    std::vector<std::size_t> quantity = indices_of(panel.labels, Variable::Q);
    const std::vector<std::size_t> price = indices_of(panel.labels, Variable::P);
    if (quantity.empty()) {
        for (std::size_t a = 0; a < panel.size(); ++a) quantity.push_back(a);
    }
    sys = fix_gauge(std::move(sys), quantity, price);

    write_complex_matrix(ctx.dir(), "correlation", c.matrix);
    write_complex_matrix(ctx.dir(), "eigenvectors", sys.eigenvectors);
    const Eigen::VectorXd pca = real_pca_spectrum(panel.values);
    const auto cum = cumulative_eigenvalues(sys);
    const auto pca_cum = cumulative_eigenvalues(pca);
    std::string out = "rank,lambda,cumulative,pca_lambda,pca_cumulative,gauge_fixed\n";
    for (std::size_t n = 0; n < sys.size(); ++n) {
        out += str(n + 1) + "," + format_double(sys.eigenvalues(static_cast<Eigen::Index>(n))) + "," +
               format_double(cum[n]) + "," + format_double(pca(static_cast<Eigen::Index>(n))) + "," +
               format_double(pca_cum[n]) + "," + (sys.gauge_fixed[n] ? "1" : "0") + "\n";
    }
    write_text(ctx.dir() / "eigenvalues.csv", out);
    ctx.param("convention", std::string(ComplexPanel::kConvention));
    ctx.finish();
}

void stage_rrs(const RunConfig& config) {
    StageContext ctx(Stage::Rrs, config);
    const PanelSeries panel = require_panel(ctx);
    const ComplexPanel z = complexify(panel, ctx.threads());
    RrsOptions opts;
    opts.n_sims = config.n_sims;
    opts.seed = config.seed;
    opts.threads = ctx.threads();
    const RrsResult rrs = rrs_test(z, opts);
    write_text(ctx.dir() / "rrs_report.csv", format_rrs_report(rrs));

    std::vector<std::size_t> modes;
    for (std::size_t n = 0; n < rrs.significant_count(); ++n) modes.push_back(n);
    ComponentBand bands;
    bands.n_trials = config.n_trials;
    if (!modes.empty()) {
        BandOptions band_opts;
        band_opts.n_trials = config.n_trials;
        band_opts.seed = config.seed;
        band_opts.threads = ctx.threads();
        bands = component_bands(z, modes, band_opts);
    }
    write_text(ctx.dir() / "component_bands.csv", format_band_report(bands));
    ctx.param("n_sims", str(config.n_sims));
    ctx.param("n_trials", str(config.n_trials));
    ctx.param("seed", std::to_string(config.seed));
    ctx.param("significant_modes", str(rrs.significant_count()));
    ctx.finish();
}

void stage_hodge(const RunConfig& config) {
    StageContext ctx(Stage::Hodge, config);
    const PanelSeries panel = require_panel(ctx);
    ctx.require("correlation.real.csv", Stage::Chpca);
    ctx.require("correlation.imag.csv", Stage::Chpca);
    const ComplexCorrelation c{read_complex_matrix(ctx.dir(), "correlation")};
    if (c.size() != panel.size()) ctx.fail("correlation does not match the panel; re-run the 'chpca' stage");
    const PolarForm p = polar(c);
    const ThresholdOptions opts{config.allowed_isolates};
    const double rho_star = config.rho_star ? *config.rho_star : select_threshold(p, opts);
    const SyncNetwork net = build_network(p, rho_star, panel.labels);
    const HodgeResult hodge = hodge_decompose(net);

    {
        std::ofstream out(ctx.dir() / "network.graphml", std::ios::binary);
        write_graphml(out, net, hodge);
        if (!out) ctx.fail("cannot write network.graphml");
    }
    {
        std::ofstream out(ctx.dir() / "network.dot", std::ios::binary);
        write_dot(out, net, hodge);
        if (!out) ctx.fail("cannot write network.dot");
    }
    const auto rows = potential_report(net, hodge, config.days_scale);
    write_text(ctx.dir() / "potentials.csv", format_potential_report(rows, config.days_scale.has_value()));
    std::size_t isolated = 0;
    for (std::size_t i = 0; i < net.size(); ++i) isolated += hodge.isolated(i) ? 1 : 0;
    const Eigen::MatrixXd gradient = net.net_flow - hodge.loop_flow;
    std::string summary = "key,value\n";
    summary += "rho_star," + format_double(rho_star) + "\n";
    summary += std::string("rho_star_source,") + (config.rho_star ? "override" : "selected") + "\n";
    summary += "nodes," + str(net.size()) + "\n";
    summary += "edges," + str(net.edges.size()) + "\n";
    summary += "isolated," + str(isolated) + "\n";
    summary += "gradient_norm," + format_double(gradient.norm()) + "\n";
    summary += "loop_norm," + format_double(hodge.loop_flow.norm()) + "\n";
    write_text(ctx.dir() / "hodge_summary.csv", summary);

    ctx.param("rho_star", format_double(rho_star));
    ctx.param("rho_star_source", config.rho_star ? "override" : "selected");
    ctx.param("allowed_isolates", str(config.allowed_isolates));
    if (config.days_scale) ctx.param("days_scale", format_double(*config.days_scale));
    ctx.finish();
}

fs::path events_path(const RunConfig& config) {
    return config.input.empty() ? config.out_dir / "events.csv" : config.input;
}

fs::path profiles_path(const RunConfig& config) {
    return config.profiles.empty() ? config.out_dir / "profiles.csv" : config.profiles;
}

void stage_project(const RunConfig& config) {
    StageContext ctx(Stage::Project, config);
    const PanelSeries panel = require_panel(ctx);
    const EigenSystem sys = require_eigensystem(ctx);
    const std::vector<std::size_t> significant = significant_modes(ctx);
    if (significant.empty()) ctx.fail("no significant modes to project onto");
    std::vector<std::size_t> modes(significant.begin(),
                                   significant.begin() + static_cast<std::ptrdiff_t>(
                                                             std::min(significant.size(), config.project_modes)));
    if (modes.empty()) ctx.fail("project.modes is 0");

    const fs::path events_file = ctx.external(events_path(config), "event file");
    const fs::path profile_file = ctx.external(profiles_path(config), "profile file");
    if (panel.days.empty()) ctx.fail("panel has no days");
    const DayRange window{panel.days.front(), panel.days.back()};
    const EventSchema schema = config.input.empty() ? EventSchema{} : config.schema;
    const RawEventTable raw = load_events(events_file, schema, window).table;

    const CustomerPanel cp = customer_panel(raw, panel.labels, window);
    const auto customers = customer_complexify(cp, ctx.threads());
    const CustomerSpace space = project(customers, sys, modes);
    write_text(ctx.dir() / "customer_coordinates.csv", format_coordinates(space));

    ProfileTable profiles = load_profiles(profile_file);
    std::vector<std::string> products;
    for (const auto& label : panel.labels)
        if (products.empty() || products.back() != label.product) products.push_back(label.product);
    products.erase(std::unique(products.begin(), products.end()), products.end());
    add_purchase_covariates(profiles, raw, products);

    std::vector<RegressionResult> models;
    for (std::size_t m = 0; m < modes.size(); ++m) {
        const std::string prefix = str(m + 1);
        models.push_back(regress(space, m, profiles, total_quantity_model(prefix + ".1")));
        models.push_back(regress(space, m, profiles, per_product_model(prefix + ".2", products)));
    }
    write_text(ctx.dir() / "regression_report.csv", format_regression_report(models));
    ctx.param("modes", str(modes.size()));
    ctx.param("customers", str(space.ids.size()));
    ctx.finish();
}

void stage_report(const RunConfig& config) {
    StageContext ctx(Stage::Report, config);
    const PanelSeries panel = require_panel(ctx);
    const EigenSystem sys = require_eigensystem(ctx);
    const std::vector<std::size_t> significant = significant_modes(ctx);
    ctx.require("hodge_summary.csv", Stage::Hodge);

    for (const auto& entry : fs::directory_iterator(ctx.dir())) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("eigenmode_", 0) == 0) fs::remove(entry.path());
    }
    for (std::size_t n : significant) {
        const auto rows = eigenmode_report(sys, panel.labels, n);
        write_text(ctx.dir() / ("eigenmode_" + str(n + 1) + ".csv"), format_eigenmode_report(rows));
    }

    std::string manifest = "# chpca run manifest\n[parameters]\n";
    for (Stage s : {Stage::Synth, Stage::Ingest, Stage::Chpca, Stage::Rrs, Stage::Hodge, Stage::Project}) {
        const auto stamp = read_stamp(ctx.dir(), s);
        if (!stamp) continue;
        for (const auto& [k, v] : stamp->params) manifest += std::string(to_string(s)) + "." + k + " = " + v + "\n";
    }
    manifest += "[artifacts]\n";
    fs::remove(ctx.dir() / kManifest);
    for (const fs::path& path : list_artifacts(ctx.dir()))
        manifest += sha256_file(path) + "  " + path.filename().string() + "\n";
    write_text(ctx.dir() / kManifest, manifest);
    ctx.finish();
}

} // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<int>(s)]; }

std::optional<Stage> parse_stage(std::string_view text) {
    for (int i = 0; i < static_cast<int>(std::size(kStageNames)); ++i)
        if (text == kStageNames[i]) return static_cast<Stage>(i);
    return std::nullopt;
}

void run_stage(Stage stage, const RunConfig& config) {
    fs::create_directories(config.out_dir);
    try {
        switch (stage) {
        case Stage::Synth: return stage_synth(config);
        case Stage::Ingest: return stage_ingest(config);
        case Stage::Chpca: return stage_chpca(config);
        case Stage::Rrs: return stage_rrs(config);
        case Stage::Hodge: return stage_hodge(config);
        case Stage::Project: return stage_project(config);
        case Stage::Report: return stage_report(config);
        }
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(std::string(to_string(stage)), e.what());
    }
}

void run_pipeline(const RunConfig& config) {
    fs::create_directories(config.out_dir);
    for (const auto& entry : fs::directory_iterator(config.out_dir)) {
        if (entry.path().extension() == ".stamp") fs::remove(entry.path());
    }
    const bool from_events = !config.input.empty() || !config.panel.empty();
    run_stage(from_events ? Stage::Ingest : Stage::Synth, config);
    run_stage(Stage::Chpca, config);
    run_stage(Stage::Rrs, config);
    run_stage(Stage::Hodge, config);

    const bool have_customers = fs::exists(events_path(config)) && fs::exists(profiles_path(config)) &&
                                (config.panel.empty() || !config.input.empty());
    const auto stamp = read_stamp(config.out_dir, Stage::Rrs);
    bool any_significant = false;
    if (stamp) {
        for (const auto& [k, v] : stamp->params)
            if (k == "significant_modes") any_significant = v != "0";
    }
    for (const char* stale : {"customer_coordinates.csv", "regression_report.csv"}) fs::remove(config.out_dir / stale);
    if (have_customers && any_significant) run_stage(Stage::Project, config);
    run_stage(Stage::Report, config);
}

std::vector<fs::path> list_artifacts(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const fs::path& p = entry.path();
        if (p.filename() == kManifest || p.extension() == ".stamp") continue;
        files.push_back(p);
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    return files;
}

std::vector<std::pair<std::string, std::string>> manifest_parameters(const fs::path& manifest) {
    std::vector<std::pair<std::string, std::string>> params;
    std::istringstream in(read_text(manifest));
    std::string line;
    bool in_params = false;
    while (std::getline(in, line)) {
        if (line == "[parameters]") {
            in_params = true;
        } else if (!line.empty() && line.front() == '[') {
            in_params = false;
        } else if (in_params) {
            const auto eq = line.find(" = ");
            if (eq != std::string::npos) params.emplace_back(line.substr(0, eq), line.substr(eq + 3));
        }
    }
    return params;
}

} // namespace chpca
