#include "chpca/io.hpp"

#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "chpca/error.hpp"

namespace chpca {

namespace fs = std::filesystem;

std::size_t DelimitedTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw Error("missing column '" + std::string(name) + "'");
}

std::vector<std::string> split_record(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

DelimitedTable read_delimited(const fs::path& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    DelimitedTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_record(line, delimiter);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(table.header.size()) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (!have_header) throw Error("'" + path.string() + "' has no header row");
    return table;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(std::string_view text) {
    if (text == "nan" || text == "NaN" || text == "NA") return std::nan("");
    if (text == "inf") return HUGE_VAL;
    if (text == "-inf") return -HUGE_VAL;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw Error("not a number: '" + std::string(text) + "'");
    }
    return out;
}

void write_matrix(const fs::path& path, const Eigen::MatrixXd& m, char delimiter) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out.push_back(delimiter);
            out += format_double(m(i, j));
        }
        out.push_back('\n');
    }
    write_text(path, out);
}

Eigen::MatrixXd read_matrix(const fs::path& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& f : split_record(line, delimiter)) {
            try {
                row.push_back(parse_double(f));
            } catch (const Error& e) {
                throw ParseError(line_no, e.what());
            }
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError(line_no, "ragged matrix row in '" + path.string() + "'");
        }
        rows.push_back(std::move(row));
    }
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

void write_complex_matrix(const fs::path& dir, const std::string& stem, const Eigen::MatrixXcd& m) {
    write_matrix(dir / (stem + ".real.csv"), m.real());
    write_matrix(dir / (stem + ".imag.csv"), m.imag());
}

Eigen::MatrixXcd read_complex_matrix(const fs::path& dir, const std::string& stem) {
    const Eigen::MatrixXd re = read_matrix(dir / (stem + ".real.csv"));
    const Eigen::MatrixXd im = read_matrix(dir / (stem + ".imag.csv"));
    if (re.rows() != im.rows() || re.cols() != im.cols()) {
        throw Error("real/imag shape mismatch for '" + stem + "'");
    }
    Eigen::MatrixXcd m(re.rows(), re.cols());
    m.real() = re;
    m.imag() = im;
    return m;
}

void save_panel(const fs::path& dir, const std::string& stem, const PanelSeries& panel) {
    std::string labels = "index,product,variable\n";
    for (std::size_t i = 0; i < panel.labels.size(); ++i) {
        labels += std::to_string(i) + "," + panel.labels[i].product + "," +
                  std::string(to_string(panel.labels[i].variable)) + "\n";
    }
    write_text(dir / (stem + ".labels.csv"), labels);
    std::string days = "index,date\n";
    for (std::size_t t = 0; t < panel.days.size(); ++t) {
        days += std::to_string(t) + "," + format_iso_date(panel.days[t]) + "\n";
    }
    write_text(dir / (stem + ".days.csv"), days);
    write_matrix(dir / (stem + ".matrix.csv"), panel.values);
}

PanelSeries load_panel(const fs::path& dir, const std::string& stem) {
    PanelSeries panel;
    const auto labels = read_delimited(dir / (stem + ".labels.csv"));
    const auto product_col = labels.column("product");
    const auto variable_col = labels.column("variable");
    for (std::size_t i = 0; i < labels.rows.size(); ++i) {
        const auto& row = labels.rows[i];
        auto v = parse_variable(row[variable_col]);
        if (!v) throw ParseError(labels.line_numbers[i], "unknown variable '" + row[variable_col] + "'");
        panel.labels.push_back({row[product_col], *v});
    }
    const auto days = read_delimited(dir / (stem + ".days.csv"));
    const auto date_col = days.column("date");
    for (const auto& row : days.rows) panel.days.push_back(parse_iso_date(row[date_col]));
    panel.values = read_matrix(dir / (stem + ".matrix.csv"));
    if (panel.values.rows() != static_cast<Eigen::Index>(panel.labels.size()) ||
        panel.values.cols() != static_cast<Eigen::Index>(panel.days.size())) {
        throw Error("panel '" + stem + "' matrix shape does not match labels/days");
    }
    return panel;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 init failed");
    }
    std::array<char, 1 << 15> buf;
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

void write_text(const fs::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace chpca
