#include "chpca/panel.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "chpca/error.hpp"
#include "chpca/parallel.hpp"

namespace chpca {

std::string_view to_string(Variable v) {
    switch (v) {
    case Variable::P: return "P";
    case Variable::Q: return "Q";
    case Variable::Visit: return "Visit";
    case Variable::TVAd: return "TVAd";
    case Variable::Search: return "Search";
    }
    return "?";
}

std::optional<Variable> parse_variable(std::string_view text) {
    for (Variable v : kAllVariables) {
        if (to_string(v) == text) return v;
    }
    return std::nullopt;
}

std::string SeriesLabel::str() const {
    return product + ":" + std::string(to_string(variable));
}

namespace {

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

} // namespace

Day parse_iso_date(std::string_view text) {
    int y = 0, m = 0, d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_int(text.substr(0, 4), y) ||
        !parse_int(text.substr(5, 2), m) || !parse_int(text.substr(8, 2), d)) {
        throw Error("invalid ISO-8601 date '" + std::string(text) + "'");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                          std::chrono::day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw Error("invalid calendar date '" + std::string(text) + "'");
    return Day{ymd};
}

std::string format_iso_date(Day day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::size_t DayRange::length() const {
    if (last < first) return 0;
    return static_cast<std::size_t>((last - first).count()) + 1;
}

std::size_t DayRange::index_of(Day d) const {
    return static_cast<std::size_t>((d - first).count());
}

std::vector<std::size_t> indices_of(const std::vector<SeriesLabel>& labels, Variable v) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i].variable == v) out.push_back(i);
    }
    return out;
}

unsigned threads_from_environment() {
    const char* env = std::getenv("CHPCA_THREADS");
    if (env == nullptr) return 1;
    int n = 0;
    if (!parse_int(env, n) || n < 1) return 1;
    return static_cast<unsigned>(n);
}

} // namespace chpca
