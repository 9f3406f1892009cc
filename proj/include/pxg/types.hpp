#ifndef PXG_TYPES_HPP
#define PXG_TYPES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pxg/error.hpp"

namespace pxg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Off-diagonal precision entries at or below this magnitude count as zero.
inline constexpr double kGraphTolerance = 1e-8;

enum class Backend { GWishart, Pseudo };

std::string to_string(Backend b);
Backend backend_from_string(const std::string& s);

/// Responses Y (n x q) paired with covariates X (n x p).
class Dataset {
public:
    Dataset() = default;
    Dataset(Matrix y, Matrix x);

    const Matrix& Y() const { return y_; }
    const Matrix& X() const { return x_; }
    int n() const { return static_cast<int>(y_.rows()); }
    int q() const { return static_cast<int>(y_.cols()); }
    int p() const { return static_cast<int>(x_.cols()); }

    /// Copy with column means of Y removed.
    Dataset centered() const;
    /// Copy with Y columns centered and scaled to unit sample variance.
    Dataset standardized() const;

private:
    Matrix y_;
    Matrix x_;
};

/// Undirected graph over q nodes; symmetric adjacency with empty diagonal.
class Graph {
public:
    Graph() = default;
    explicit Graph(int q);

    static Graph complete(int q);
    /// Adjacency from a q x q 0/1 matrix; throws unless symmetric with zero diagonal.
    static Graph from_adjacency(const Eigen::MatrixXi& adj);

    int size() const { return q_; }
    bool has_edge(int s, int t) const { return adj_[index(s, t)] != 0; }
    void set_edge(int s, int t, bool present);
    int edge_count() const;
    bool is_complete() const { return edge_count() == q_ * (q_ - 1) / 2; }
    std::vector<int> neighbors(int s) const;
    Eigen::MatrixXi adjacency() const;

    /// Compact byte string of the upper triangle, usable as a map key.
    std::string key() const;

    friend bool operator==(const Graph& a, const Graph& b) { return a.q_ == b.q_ && a.adj_ == b.adj_; }

private:
    std::size_t index(int s, int t) const { return static_cast<std::size_t>(s) * q_ + t; }

    int q_ = 0;
    std::vector<std::uint8_t> adj_;
};

/// Symmetric positive-definite q x q matrix. The Cholesky factor is kept
/// alongside so densities never need an explicit inverse.
class PrecisionMatrix {
public:
    PrecisionMatrix() = default;
    /// Validates symmetry (relative 1e-10) and positive definiteness.
    explicit PrecisionMatrix(Matrix values);

    const Matrix& values() const { return values_; }
    double operator()(int s, int t) const { return values_(s, t); }
    int size() const { return static_cast<int>(values_.rows()); }
    /// Lower-triangular L with values() = L L^T.
    const Matrix& cholesky() const { return chol_; }
    double log_det() const { return log_det_; }

    bool compatible_with(const Graph& g, double tol = kGraphTolerance) const;
    /// Graph induced by entries with |omega_st| > tol.
    Graph support(double tol = kGraphTolerance) const;

private:
    Matrix values_;
    Matrix chol_;
    double log_det_ = 0.0;
};

/// Cluster labels z_i in {0..K-1}.
class Allocation {
public:
    Allocation() = default;
    Allocation(std::vector<int> labels, int K);

    int size() const { return static_cast<int>(z_.size()); }
    int K() const { return K_; }
    int operator[](int i) const { return z_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& labels() const { return z_; }

    std::vector<int> sizes() const;
    std::vector<std::vector<int>> members() const;
    int occupied() const;

    friend bool operator==(const Allocation& a, const Allocation& b) { return a.K_ == b.K_ && a.z_ == b.z_; }

private:
    std::vector<int> z_;
    int K_ = 0;
};

/// Node-wise regression y_s | y_{-s} ~ N(y_{-s}^T beta, tau). Coefficient k
/// refers to node k when k < s and node k+1 otherwise.
struct NodeRegression {
    Vector beta;
    double tau = 1.0;
    std::vector<std::uint8_t> included;

    static int other_node(int s, int k) { return k < s ? k : k + 1; }
    static int slot(int s, int t) { return t < s ? t : t - 1; }
};

/// Returns the first k (1-based) for which the leading k x k minor is not PD,
/// or 0 when the matrix is PD.
int failing_leading_minor(const Matrix& m);

} // namespace pxg

#endif
