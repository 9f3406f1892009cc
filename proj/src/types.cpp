#include "pxg/types.hpp"

#include <cmath>
#include <sstream>

namespace pxg {

std::string to_string(Backend b)
{
    return b == Backend::GWishart ? "gwishart" : "pseudo";
}

Backend backend_from_string(const std::string& s)
{
    if (s == "gwishart") return Backend::GWishart;
    if (s == "pseudo") return Backend::Pseudo;
    throw InvalidArgument("unknown backend '" + s + "' (expected gwishart or pseudo)");
}

Dataset::Dataset(Matrix y, Matrix x) : y_(std::move(y)), x_(std::move(x))
{
    if (y_.rows() < 1) throw InvalidArgument("dataset needs at least one observation");
    if (y_.cols() < 2) throw InvalidArgument("dataset needs q >= 2 response columns");
    if (x_.cols() < 1) throw InvalidArgument("dataset needs p >= 1 covariate columns");
    if (y_.rows() != x_.rows()) {
        std::ostringstream os;
        os << "Y has " << y_.rows() << " rows but X has " << x_.rows();
        throw InvalidArgument(os.str());
    }
    if (!y_.allFinite()) throw InvalidArgument("Y contains non-finite entries");
    if (!x_.allFinite()) throw InvalidArgument("X contains non-finite entries");
}

Dataset Dataset::centered() const
{
    Matrix y = y_.rowwise() - y_.colwise().mean();
    return Dataset(std::move(y), x_);
}

Dataset Dataset::standardized() const
{
    Matrix y = y_.rowwise() - y_.colwise().mean();
    if (y.rows() > 1) {
        for (Eigen::Index c = 0; c < y.cols(); ++c) {
            const double sd = std::sqrt(y.col(c).squaredNorm() / static_cast<double>(y.rows() - 1));
            if (sd > 0.0) y.col(c) /= sd;
        }
    }
    return Dataset(std::move(y), x_);
}

Graph::Graph(int q) : q_(q), adj_(static_cast<std::size_t>(q) * q, 0)
{
    if (q < 1) throw InvalidArgument("graph needs at least one node");
}

Graph Graph::complete(int q)
{
    Graph g(q);
    for (int s = 0; s < q; ++s)
        for (int t = 0; t < q; ++t)
            if (s != t) g.adj_[g.index(s, t)] = 1;
    return g;
}

Graph Graph::from_adjacency(const Eigen::MatrixXi& adj)
{
    if (adj.rows() != adj.cols()) throw InvalidArgument("adjacency must be square");
    Graph g(static_cast<int>(adj.rows()));
    for (int s = 0; s < g.q_; ++s) {
        if (adj(s, s) != 0) throw InvalidArgument("adjacency diagonal must be zero");
        for (int t = s + 1; t < g.q_; ++t) {
            if ((adj(s, t) != 0) != (adj(t, s) != 0)) throw InvalidArgument("adjacency must be symmetric");
            g.set_edge(s, t, adj(s, t) != 0);
        }
    }
    return g;
}

void Graph::set_edge(int s, int t, bool present)
{
    if (s == t) throw InvalidArgument("self-loops are not allowed");
    adj_[index(s, t)] = present;
    adj_[index(t, s)] = present;
}

int Graph::edge_count() const
{
    int count = 0;
    for (int s = 0; s < q_; ++s)
        for (int t = s + 1; t < q_; ++t) count += adj_[index(s, t)];
    return count;
}

std::vector<int> Graph::neighbors(int s) const
{
    std::vector<int> out;
    for (int t = 0; t < q_; ++t)
        if (t != s && adj_[index(s, t)]) out.push_back(t);
    return out;
}

Eigen::MatrixXi Graph::adjacency() const
{
    Eigen::MatrixXi m(q_, q_);
    for (int s = 0; s < q_; ++s)
        for (int t = 0; t < q_; ++t) m(s, t) = adj_[index(s, t)];
    return m;
}

std::string Graph::key() const
{
    std::string k;
    k.reserve(static_cast<std::size_t>(q_) * (q_ - 1) / 2 + 1);
    k.push_back(static_cast<char>(q_));
    for (int s = 0; s < q_; ++s)
        for (int t = s + 1; t < q_; ++t) k.push_back(adj_[index(s, t)] ? '1' : '0');
    return k;
}

int failing_leading_minor(const Matrix& m)
{
    for (Eigen::Index k = 1; k <= m.rows(); ++k) {
        Eigen::LLT<Matrix> llt(m.topLeftCorner(k, k));
        if (llt.info() != Eigen::Success) return static_cast<int>(k);
        // Eigen reports success on a zero pivot; treat non-positive pivots as failure.
        if (!(llt.matrixL()(k - 1, k - 1) > 0.0)) return static_cast<int>(k);
    }
    return 0;
}

PrecisionMatrix::PrecisionMatrix(Matrix values) : values_(std::move(values))
{
    if (values_.rows() != values_.cols() || values_.rows() == 0)
        throw InvalidArgument("precision matrix must be square and non-empty");
    if (!values_.allFinite()) throw NumericalError("precision matrix has non-finite entries");
    const double scale = std::max(values_.cwiseAbs().maxCoeff(), 1e-300);
    if ((values_ - values_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw NumericalError("precision matrix is not symmetric");
    values_ = 0.5 * (values_ + values_.transpose());
    Eigen::LLT<Matrix> llt(values_);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
        chol_ = llt.matrixL();
        ok = (chol_.diagonal().array() > 0.0).all();
    }
    if (!ok) {
        std::ostringstream os;
        os << "precision matrix is not positive definite (leading minor " << failing_leading_minor(values_)
           << " fails)";
        throw NumericalError(os.str());
    }
    log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

bool PrecisionMatrix::compatible_with(const Graph& g, double tol) const
{
    if (g.size() != size()) return false;
    for (int s = 0; s < size(); ++s)
        for (int t = s + 1; t < size(); ++t)
            if (!g.has_edge(s, t) && std::abs(values_(s, t)) > tol) return false;
    return true;
}

Graph PrecisionMatrix::support(double tol) const
{
    Graph g(size());
    for (int s = 0; s < size(); ++s)
        for (int t = s + 1; t < size(); ++t)
            if (std::abs(values_(s, t)) > tol) g.set_edge(s, t, true);
    return g;
}

Allocation::Allocation(std::vector<int> labels, int K) : z_(std::move(labels)), K_(K)
{
    if (K < 1) throw InvalidArgument("allocation needs K >= 1");
    for (int label : z_)
        if (label < 0 || label >= K) throw InvalidArgument("allocation label out of range");
}

std::vector<int> Allocation::sizes() const
{
    std::vector<int> n(static_cast<std::size_t>(K_), 0);
    for (int label : z_) ++n[static_cast<std::size_t>(label)];
    return n;
}

std::vector<std::vector<int>> Allocation::members() const
{
    std::vector<std::vector<int>> m(static_cast<std::size_t>(K_));
    for (int i = 0; i < size(); ++i) m[static_cast<std::size_t>(z_[static_cast<std::size_t>(i)])].push_back(i);
    return m;
}

int Allocation::occupied() const
{
    int count = 0;
    for (int n : sizes()) count += n > 0;
    return count;
}

} // namespace pxg
