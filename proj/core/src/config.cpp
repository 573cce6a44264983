#include "chpca/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "chpca/error.hpp"
#include "chpca/io.hpp"
#include "chpca/parallel.hpp"

namespace chpca {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string delimiter_text(char c) { return c == '\t' ? std::string("\\t") : std::string(1, c); }

template <class Int>
Int parse_unsigned(std::string_view text, std::size_t line) {
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ParseError(line, "expected a nonnegative integer, got '" + std::string(text) + "'");
    return value;
}

double parse_number(std::string_view text, std::size_t line) {
    try {
        return parse_double(text);
    } catch (const Error&) {
        throw ParseError(line, "expected a number, got '" + std::string(text) + "'");
    }
}

using Setter = std::function<void(RunConfig&, std::string_view, std::size_t)>;

template <class Int>
Setter uint_field(Int RunConfig::*member) {
    return [member](RunConfig& c, std::string_view v, std::size_t line) { c.*member = parse_unsigned<Int>(v, line); };
}

Setter double_field(double RunConfig::*member) {
    return [member](RunConfig& c, std::string_view v, std::size_t line) { c.*member = parse_number(v, line); };
}

Setter optional_field(std::optional<double> RunConfig::*member) {
    return [member](RunConfig& c, std::string_view v, std::size_t line) {
        if (v.empty())
            (c.*member).reset();
        else
            c.*member = parse_number(v, line);
    };
}

Setter path_field(std::filesystem::path RunConfig::*member) {
    return [member](RunConfig& c, std::string_view v, std::size_t) { c.*member = std::filesystem::path(std::string(v)); };
}

Setter string_field(std::string RunConfig::*member) {
    return [member](RunConfig& c, std::string_view v, std::size_t) { c.*member = std::string(v); };
}

Setter schema_field(std::string EventSchema::*member) {
    return [member](RunConfig& c, std::string_view v, std::size_t) { c.schema.*member = std::string(v); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"ingest.input", path_field(&RunConfig::input)},
        {"ingest.panel", path_field(&RunConfig::panel)},
        {"ingest.window_start", string_field(&RunConfig::window_start)},
        {"ingest.window_end", string_field(&RunConfig::window_end)},
        {"ingest.min_days", uint_field(&RunConfig::min_days)},
        {"ingest.customer_column", schema_field(&EventSchema::customer)},
        {"ingest.product_column", schema_field(&EventSchema::product)},
        {"ingest.sku_column", schema_field(&EventSchema::sku)},
        {"ingest.variable_column", schema_field(&EventSchema::variable)},
        {"ingest.date_column", schema_field(&EventSchema::date)},
        {"ingest.value_column", schema_field(&EventSchema::value)},
        {"ingest.delimiter",
         [](RunConfig& c, std::string_view v, std::size_t line) {
             if (v == "\\t")
                 c.schema.delimiter = '\t';
             else if (v.size() == 1)
                 c.schema.delimiter = v.front();
             else
                 throw ParseError(line, "delimiter must be one character or \\t");
         }},
        {"rrs.n_sims", uint_field(&RunConfig::n_sims)},
        {"bands.n_trials", uint_field(&RunConfig::n_trials)},
        {"hodge.rho_star", optional_field(&RunConfig::rho_star)},
        {"hodge.days_scale", optional_field(&RunConfig::days_scale)},
        {"hodge.allowed_isolates", uint_field(&RunConfig::allowed_isolates)},
        {"project.profiles", path_field(&RunConfig::profiles)},
        {"project.modes", uint_field(&RunConfig::project_modes)},
        {"synth.products", uint_field(&RunConfig::synth_products)},
        {"synth.length", uint_field(&RunConfig::synth_length)},
        {"synth.min_cycle", uint_field(&RunConfig::synth_min_cycle)},
        {"synth.max_cycle", uint_field(&RunConfig::synth_max_cycle)},
        {"synth.per_product",
         [](RunConfig& c, std::string_view v, std::size_t line) {
             if (v == "1" || v == "true")
                 c.synth_per_product = true;
             else if (v == "0" || v == "false")
                 c.synth_per_product = false;
             else
                 throw ParseError(line, "expected true or false, got '" + std::string(v) + "'");
         }},
        {"synth.lag_step", double_field(&RunConfig::synth_lag_step)},
        {"synth.loading", double_field(&RunConfig::synth_loading)},
        {"synth.market_loading", double_field(&RunConfig::synth_market_loading)},
        {"synth.noise", double_field(&RunConfig::synth_noise)},
        {"synth.customers", uint_field(&RunConfig::synth_customers)},
        {"run.seed", uint_field(&RunConfig::seed)},
        {"run.out_dir", path_field(&RunConfig::out_dir)},
        {"run.threads", uint_field(&RunConfig::threads)},
    };
    return table;
}

} // namespace

std::string to_ini(const RunConfig& c) {
    std::ostringstream out;
    out << "[ingest]\n"
        << "input = " << c.input.string() << "\n"
        << "panel = " << c.panel.string() << "\n"
        << "window_start = " << c.window_start << "\n"
        << "window_end = " << c.window_end << "\n"
        << "min_days = " << c.min_days << "\n"
        << "customer_column = " << c.schema.customer << "\n"
        << "product_column = " << c.schema.product << "\n"
        << "sku_column = " << c.schema.sku << "\n"
        << "variable_column = " << c.schema.variable << "\n"
        << "date_column = " << c.schema.date << "\n"
        << "value_column = " << c.schema.value << "\n"
        << "delimiter = " << delimiter_text(c.schema.delimiter) << "\n"
        << "\n[rrs]\n"
        << "n_sims = " << c.n_sims << "\n"
        << "\n[bands]\n"
        << "n_trials = " << c.n_trials << "\n"
        << "\n[hodge]\n"
        << "rho_star = " << opt(c.rho_star) << "\n"
        << "days_scale = " << opt(c.days_scale) << "\n"
        << "allowed_isolates = " << c.allowed_isolates << "\n"
        << "\n[project]\n"
        << "profiles = " << c.profiles.string() << "\n"
        << "modes = " << c.project_modes << "\n"
        << "\n[synth]\n"
        << "products = " << c.synth_products << "\n"
        << "length = " << c.synth_length << "\n"
        << "min_cycle = " << c.synth_min_cycle << "\n"
        << "max_cycle = " << c.synth_max_cycle << "\n"
        << "per_product = " << (c.synth_per_product ? "true" : "false") << "\n"
        << "lag_step = " << format_double(c.synth_lag_step) << "\n"
        << "loading = " << format_double(c.synth_loading) << "\n"
        << "market_loading = " << format_double(c.synth_market_loading) << "\n"
        << "noise = " << format_double(c.synth_noise) << "\n"
        << "customers = " << c.synth_customers << "\n"
        << "\n[run]\n"
        << "seed = " << c.seed << "\n"
        << "out_dir = " << c.out_dir.string() << "\n"
        << "threads = " << c.threads << "\n";
    return out.str();
}

RunConfig parse_ini(std::string_view text) {
    RunConfig config;
    std::string section;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (line.empty() || line.front() == '#' || line.front() == ';') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError(line_no, "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
        const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ParseError(line_no, "unknown key '" + key + "'");
        it->second(config, trim(line.substr(eq + 1)), line_no);
    }
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    try {
        return parse_ini(read_text(path));
    } catch (const ParseError& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

unsigned effective_threads(const RunConfig& config) {
    return config.threads > 0 ? config.threads : threads_from_environment();
}

} // namespace chpca
