#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "chpca/eigenmodes.hpp"
#include "chpca/panel.hpp"

namespace chpca {

/// rho = |C| (symmetric, unit diagonal) and theta = arg C (antisymmetric,
/// zero diagonal). theta_ab > 0 means a lags b.
struct PolarForm {
    Eigen::MatrixXd rho;
    Eigen::MatrixXd theta;

    std::size_t size() const { return static_cast<std::size_t>(rho.rows()); }
};

PolarForm polar(const ComplexCorrelation& c);

/// True when 0 < |theta| < pi/2, i.e. the pair is comoving in one direction.
bool is_comoving(double theta);

struct ThresholdOptions {
    /// Nodes that may stay isolated while the graph still counts as connected.
    std::size_t allowed_isolates = 1;
};

/// Connectivity criterion for the candidate graph {comoving, rho > threshold}:
/// the non-isolated nodes form one component of at least 2 nodes that spans
/// at least N - allowed_isolates nodes.
bool threshold_connects(const PolarForm& p, double threshold, const ThresholdOptions& options = {});

/// Largest candidate value v with the candidate graph {rho > v} connected.
/// Candidates are the distinct comoving rho values plus one value just below
/// the smallest of them. Binary search over the sorted candidates.
/// Throws when no candidate connects the graph.
double select_threshold(const PolarForm& p, const ThresholdOptions& options = {});

/// Reference implementation: scans every candidate from the top.
double select_threshold_exhaustive(const PolarForm& p, const ThresholdOptions& options = {});

/// Sorted distinct candidate thresholds (ascending), as used by the selectors.
std::vector<double> threshold_candidates(const PolarForm& p);

/// Directed edge from the leading series to the lagging one. `theta` is the
/// lag phase theta(to, from), always in (0, pi/2).
struct SyncEdge {
    std::size_t from = 0;
    std::size_t to = 0;
    double rho = 0.0;
    double theta = 0.0;
};

struct SyncNetwork {
    std::vector<SeriesLabel> nodes;
    double rho_star = 0.0;
    std::vector<SyncEdge> edges;
    Eigen::MatrixXd adjacency;  // A: 1 for each directed edge
    Eigen::MatrixXd flow;       // B: rho on each directed edge
    Eigen::MatrixXd net_flow;   // F = B - B^T
    Eigen::MatrixXd weight;     // W = A + A^T

    std::size_t size() const { return static_cast<std::size_t>(adjacency.rows()); }
};

/// Keeps comoving pairs with rho > rho_star; one edge per pair, leader to lagger.
SyncNetwork build_network(const PolarForm& p, double rho_star, std::vector<SeriesLabel> labels = {});

/// F = W (phi_a - phi_b) + F_loop with sum_b F_loop(a, b) = 0 and
/// sum of potentials over non-isolated nodes = 0. Isolated nodes get NaN.
struct HodgeResult {
    Eigen::VectorXd potentials;
    Eigen::MatrixXd loop_flow;
    Eigen::MatrixXd laplacian;

    bool isolated(std::size_t node) const;
};

HodgeResult hodge_decompose(const SyncNetwork& net);

/// Decomposition of an arbitrary antisymmetric flow on a symmetric
/// nonnegative weight matrix. Throws when the non-isolated nodes split into
/// more than one component.
HodgeResult hodge_decompose(const Eigen::MatrixXd& net_flow, const Eigen::MatrixXd& weight);

struct PotentialRow {
    std::size_t node = 0;
    SeriesLabel label;
    double potential = 0.0;
    std::optional<double> days;
};

/// Nodes sorted by potential, most upstream first; isolated nodes last.
std::vector<PotentialRow> potential_report(const SyncNetwork& net, const HodgeResult& hodge,
                                           std::optional<double> days_per_unit = std::nullopt);

std::string format_potential_report(const std::vector<PotentialRow>& rows, bool with_days, char delimiter = ',');

void write_graphml(std::ostream& out, const SyncNetwork& net, const HodgeResult& hodge);
void write_dot(std::ostream& out, const SyncNetwork& net, const HodgeResult& hodge);

} // namespace chpca
