#include "chpca/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

#include "chpca/error.hpp"
#include "chpca/io.hpp"

namespace chpca {

namespace {

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
        for (std::size_t i = 0; i < n; ++i) parent_[i] = i;
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

    std::size_t size_of(std::size_t x) { return size_[find(x)]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

struct ComponentStats {
    std::size_t largest = 0;       // size of the largest component with an edge
    std::size_t non_isolated = 0;  // nodes with at least one edge
    std::size_t components = 0;    // components among non-isolated nodes
};

ComponentStats candidate_components(const PolarForm& p, double threshold) {
    const std::size_t n = p.size();
    DisjointSets sets(n);
    std::vector<char> touched(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
            if (is_comoving(p.theta(ia, ib)) && p.rho(ia, ib) > threshold) {
                sets.unite(a, b);
                touched[a] = touched[b] = 1;
            }
        }
    }
    ComponentStats stats;
    for (std::size_t i = 0; i < n; ++i) {
        if (!touched[i]) continue;
        ++stats.non_isolated;
        if (sets.find(i) == i) ++stats.components;
        stats.largest = std::max(stats.largest, sets.size_of(i));
    }
    return stats;
}

bool spans(const ComponentStats& s, std::size_t n, std::size_t allowed_isolates) {
    const std::size_t required = n > allowed_isolates ? n - allowed_isolates : 0;
    return s.largest >= 2 && s.largest >= required;
}

} // namespace

PolarForm polar(const ComplexCorrelation& c) {
    const Eigen::Index n = c.matrix.rows();
    PolarForm p;
    p.rho = Eigen::MatrixXd::Identity(n, n);
    p.theta = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const std::complex<double> v = c.matrix(a, b);
            p.rho(a, b) = p.rho(b, a) = std::abs(v);
            p.theta(a, b) = std::arg(v);
            p.theta(b, a) = -p.theta(a, b);
        }
    }
    return p;
}

bool is_comoving(double theta) {
    const double t = std::abs(theta);
    return t > 0.0 && t < std::numbers::pi / 2.0;
}

bool threshold_connects(const PolarForm& p, double threshold, const ThresholdOptions& options) {
    const ComponentStats s = candidate_components(p, threshold);
    return s.components == 1 && spans(s, p.size(), options.allowed_isolates);
}

std::vector<double> threshold_candidates(const PolarForm& p) {
    std::vector<double> values;
    const Eigen::Index n = p.rho.rows();
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b)
            if (is_comoving(p.theta(a, b))) values.push_back(p.rho(a, b));
    if (values.empty()) throw Error("no comoving pairs (0 < |theta| < pi/2)");
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    values.insert(values.begin(), std::nextafter(values.front(), -std::numeric_limits<double>::infinity()));
    return values;
}

double select_threshold_exhaustive(const PolarForm& p, const ThresholdOptions& options) {
    const auto candidates = threshold_candidates(p);
    for (auto it = candidates.rbegin(); it != candidates.rend(); ++it) {
        if (threshold_connects(p, *it, options)) return *it;
    }
    throw Error("no threshold yields a connected synchronization network");
}

double select_threshold(const PolarForm& p, const ThresholdOptions& options) {
    const auto candidates = threshold_candidates(p);
    // Size of the largest component is monotone in the threshold, so binary
    // search on it; the full criterion also needs the remaining nodes to be
    // isolated, which only differs when more than one isolate is allowed.
    auto spanning = [&](std::size_t i) {
        return spans(candidate_components(p, candidates[i]), p.size(), options.allowed_isolates);
    };
    if (!spanning(0)) throw Error("no threshold yields a connected synchronization network");
    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (spanning(mid)) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    for (std::size_t i = lo + 1; i-- > 0;) {
        if (threshold_connects(p, candidates[i], options)) return candidates[i];
    }
    throw Error("no threshold yields a connected synchronization network");
}

SyncNetwork build_network(const PolarForm& p, double rho_star, std::vector<SeriesLabel> labels) {
    const Eigen::Index n = p.rho.rows();
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(n)) {
        throw Error("label count does not match correlation size");
    }
    SyncNetwork net;
    net.nodes = std::move(labels);
    net.rho_star = rho_star;
    net.adjacency = Eigen::MatrixXd::Zero(n, n);
    net.flow = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            const double theta = p.theta(a, b);
            if (!is_comoving(theta) || !(p.rho(a, b) > rho_star)) continue;
            // theta(a, b) > 0: a lags b, so the flow runs b -> a.
            SyncEdge e;
            e.from = static_cast<std::size_t>(theta > 0.0 ? b : a);
            e.to = static_cast<std::size_t>(theta > 0.0 ? a : b);
            e.rho = p.rho(a, b);
            e.theta = std::abs(theta);
            net.adjacency(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)) = 1.0;
            net.flow(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)) = e.rho;
            net.edges.push_back(e);
        }
    }
    if (net.edges.empty()) throw Error("synchronization network has no edges at rho_star=" + format_double(rho_star));
    net.net_flow = net.flow - net.flow.transpose();
    net.weight = net.adjacency + net.adjacency.transpose();
    return net;
}

bool HodgeResult::isolated(std::size_t node) const {
    return std::isnan(potentials(static_cast<Eigen::Index>(node)));
}

HodgeResult hodge_decompose(const Eigen::MatrixXd& F, const Eigen::MatrixXd& W) {
    const Eigen::Index n = W.rows();
    if (W.cols() != n || F.rows() != n || F.cols() != n) throw Error("flow and weight must be square and equal size");
    if ((F + F.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, F.cwiseAbs().maxCoeff()))
        throw Error("net flow matrix is not antisymmetric");
    if ((W - W.transpose()).cwiseAbs().maxCoeff() > 0.0 || W.minCoeff() < 0.0)
        throw Error("weight matrix must be symmetric and nonnegative");

    std::vector<Eigen::Index> active;
    std::vector<Eigen::Index> position(static_cast<std::size_t>(n), -1);
    for (Eigen::Index a = 0; a < n; ++a) {
        if (W.row(a).sum() > 0.0) {
            position[static_cast<std::size_t>(a)] = static_cast<Eigen::Index>(active.size());
            active.push_back(a);
        }
    }
    if (active.size() < 2) throw Error("hodge decomposition needs at least one weighted edge");

    DisjointSets sets(static_cast<std::size_t>(n));
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = a + 1; b < n; ++b)
            if (W(a, b) > 0.0) sets.unite(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
    std::map<std::size_t, std::vector<Eigen::Index>> components;
    for (Eigen::Index a : active) components[sets.find(static_cast<std::size_t>(a))].push_back(a);
    if (components.size() > 1) {
        std::string msg = "network is not weakly connected; components:";
        for (const auto& [root, members] : components) {
            msg += " {";
            for (std::size_t i = 0; i < members.size(); ++i) msg += (i ? "," : "") + std::to_string(members[i]);
            msg += "}";
        }
        throw Error(msg);
    }

    HodgeResult result;
    result.laplacian = -W;
    result.laplacian.diagonal() += W.rowwise().sum();

    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd L(m, m);
    Eigen::VectorXd div(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        div(i) = F.row(active[static_cast<std::size_t>(i)]).sum();
        for (Eigen::Index j = 0; j < m; ++j)
            L(i, j) = result.laplacian(active[static_cast<std::size_t>(i)], active[static_cast<std::size_t>(j)]);
    }
    // Minimum-norm solution of the singular system, then re-centered.
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(L);
    Eigen::VectorXd phi = cod.solve(div);
    phi.array() -= phi.mean();

    result.potentials = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
    for (Eigen::Index i = 0; i < m; ++i) result.potentials(active[static_cast<std::size_t>(i)]) = phi(i);

    result.loop_flow = F;
    for (Eigen::Index a = 0; a < n; ++a) {
        if (position[static_cast<std::size_t>(a)] < 0) continue;
        for (Eigen::Index b = 0; b < n; ++b) {
            if (position[static_cast<std::size_t>(b)] < 0 || W(a, b) == 0.0) continue;
            result.loop_flow(a, b) = F(a, b) - W(a, b) * (result.potentials(a) - result.potentials(b));
        }
    }
    return result;
}

HodgeResult hodge_decompose(const SyncNetwork& net) {
    try {
        return hodge_decompose(net.net_flow, net.weight);
    } catch (const Error& e) {
        if (net.nodes.empty()) throw;
        std::string msg = e.what();
        msg += " (nodes:";
        for (std::size_t i = 0; i < net.nodes.size(); ++i) msg += " " + std::to_string(i) + "=" + net.nodes[i].str();
        msg += ")";
        throw Error(msg);
    }
}

std::vector<PotentialRow> potential_report(const SyncNetwork& net, const HodgeResult& hodge,
                                           std::optional<double> days_per_unit) {
    std::vector<PotentialRow> rows;
    const auto n = static_cast<std::size_t>(hodge.potentials.size());
    for (std::size_t i = 0; i < n; ++i) {
        PotentialRow r;
        r.node = i;
        if (i < net.nodes.size()) r.label = net.nodes[i];
        r.potential = hodge.potentials(static_cast<Eigen::Index>(i));
        if (days_per_unit && !std::isnan(r.potential)) r.days = r.potential * *days_per_unit;
        rows.push_back(std::move(r));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const PotentialRow& a, const PotentialRow& b) {
        const bool na = std::isnan(a.potential), nb = std::isnan(b.potential);
        if (na != nb) return nb;
        if (na) return false;
        return a.potential > b.potential;
    });
    return rows;
}

std::string format_potential_report(const std::vector<PotentialRow>& rows, bool with_days, char delimiter) {
    std::string out = "node";
    for (const char* h : {"product", "variable", "potential"}) {
        out.push_back(delimiter);
        out += h;
    }
    if (with_days) {
        out.push_back(delimiter);
        out += "days";
    }
    out.push_back('\n');
    for (const auto& r : rows) {
        out += std::to_string(r.node);
        out.push_back(delimiter);
        out += r.label.product;
        out.push_back(delimiter);
        out += to_string(r.label.variable);
        out.push_back(delimiter);
        out += format_double(r.potential);
        if (with_days) {
            out.push_back(delimiter);
            out += r.days ? format_double(*r.days) : "nan";
        }
        out.push_back('\n');
    }
    return out;
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

SeriesLabel label_at(const SyncNetwork& net, std::size_t i) {
    return i < net.nodes.size() ? net.nodes[i] : SeriesLabel{std::to_string(i), Variable::Q};
}

} // namespace

void write_graphml(std::ostream& out, const SyncNetwork& net, const HodgeResult& hodge) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
        << "  <key id=\"product\" for=\"node\" attr.name=\"product\" attr.type=\"string\"/>\n"
        << "  <key id=\"variable\" for=\"node\" attr.name=\"variable\" attr.type=\"string\"/>\n"
        << "  <key id=\"potential\" for=\"node\" attr.name=\"potential\" attr.type=\"double\"/>\n"
        << "  <key id=\"rho\" for=\"edge\" attr.name=\"rho\" attr.type=\"double\"/>\n"
        << "  <key id=\"theta\" for=\"edge\" attr.name=\"theta\" attr.type=\"double\"/>\n"
        << "  <key id=\"flow\" for=\"edge\" attr.name=\"flow\" attr.type=\"double\"/>\n"
        << "  <graph id=\"sync\" edgedefault=\"directed\">\n";
    for (std::size_t i = 0; i < net.size(); ++i) {
        const SeriesLabel l = label_at(net, i);
        out << "    <node id=\"n" << i << "\">"
            << "<data key=\"product\">" << xml_escape(l.product) << "</data>"
            << "<data key=\"variable\">" << to_string(l.variable) << "</data>"
            << "<data key=\"potential\">" << format_double(hodge.potentials(static_cast<Eigen::Index>(i))) << "</data>"
            << "</node>\n";
    }
    for (std::size_t k = 0; k < net.edges.size(); ++k) {
        const auto& e = net.edges[k];
        out << "    <edge id=\"e" << k << "\" source=\"n" << e.from << "\" target=\"n" << e.to << "\">"
            << "<data key=\"rho\">" << format_double(e.rho) << "</data>"
            << "<data key=\"theta\">" << format_double(e.theta) << "</data>"
            << "<data key=\"flow\">"
            << format_double(net.net_flow(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)))
            << "</data></edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
}

void write_dot(std::ostream& out, const SyncNetwork& net, const HodgeResult& hodge) {
    out << "digraph sync {\n";
    for (std::size_t i = 0; i < net.size(); ++i) {
        const SeriesLabel l = label_at(net, i);
        out << "  n" << i << " [label=\"" << l.str() << "\", product=\"" << l.product << "\", variable=\""
            << to_string(l.variable) << "\", potential=\""
            << format_double(hodge.potentials(static_cast<Eigen::Index>(i))) << "\"];\n";
    }
    for (const auto& e : net.edges) {
        out << "  n" << e.from << " -> n" << e.to << " [rho=\"" << format_double(e.rho)
            << "\", theta=\"" << format_double(e.theta) << "\", flow=\""
            << format_double(net.net_flow(static_cast<Eigen::Index>(e.from), static_cast<Eigen::Index>(e.to)))
            << "\"];\n";
    }
    out << "}\n";
}

} // namespace chpca
