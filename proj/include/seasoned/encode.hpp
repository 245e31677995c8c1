#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "seasoned/srg.hpp"

namespace seasoned
{
class UnknownOpcodeError : public std::invalid_argument
{
public:
    explicit UnknownOpcodeError(std::string op)
      : std::invalid_argument("opcode not in vocabulary: " + op), op_(std::move(op))
    {}
    const std::string& op() const noexcept { return op_; }

private:
    std::string op_;
};

/// Learning-ready view of an SRG.
template <typename Scalar = double>
struct EncodedGraph
{
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Incidence = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

    /// |V| x |vocab| one-hot.
    Matrix node_features;
    /// 2 x |E|: row 0 sources, row 1 destinations.
    Eigen::Matrix<std::int64_t, 2, Eigen::Dynamic> edge_index;
    /// 0 = control, 1 = data, 2 = effect.
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> edge_type;
    /// |E| x |V|, 0.5 at each endpoint (1.0 for a self edge).
    Incidence incidence;
    std::optional<int> label;

    Eigen::Index num_nodes() const { return node_features.rows(); }
    Eigen::Index num_edges() const { return edge_index.cols(); }
};

template <typename Scalar = double>
EncodedGraph<Scalar> encode(const Srg& g, std::span<const std::string> vocab)
{
    std::unordered_map<std::string_view, Eigen::Index> column;
    for (std::size_t i = 0; i < vocab.size(); ++i)
        column.emplace(vocab[i], static_cast<Eigen::Index>(i));

    const auto n = static_cast<Eigen::Index>(g.nodes.size());
    const auto m = static_cast<Eigen::Index>(g.edges.size());

    EncodedGraph<Scalar> out;
    out.node_features = EncodedGraph<Scalar>::Matrix::Zero(n, static_cast<Eigen::Index>(vocab.size()));
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const auto& op = g.nodes[static_cast<std::size_t>(i)].op;
        const auto it = column.find(op);
        if (it == column.end())
            throw UnknownOpcodeError(op);
        out.node_features(i, it->second) = Scalar(1);
    }

    out.edge_index.resize(2, m);
    out.edge_type.resize(m);
    std::vector<Eigen::Triplet<Scalar>> triplets;
    triplets.reserve(static_cast<std::size_t>(2 * m));
    for (Eigen::Index e = 0; e < m; ++e)
    {
        const auto& edge = g.edges[static_cast<std::size_t>(e)];
        out.edge_index(0, e) = edge.src;
        out.edge_index(1, e) = edge.dst;
        out.edge_type(e) = static_cast<std::int64_t>(edge.rel);
        // A self edge sums to a single 1.0 entry.
        triplets.emplace_back(e, edge.src, Scalar(0.5));
        triplets.emplace_back(e, edge.dst, Scalar(0.5));
    }
    out.incidence.resize(m, n);
    out.incidence.setFromTriplets(triplets.begin(), triplets.end());
    if (g.label)
        out.label = static_cast<int>(*g.label);
    return out;
}

/// Edge embeddings as the mean of their endpoint embeddings (T * h).
template <typename Scalar, typename Derived>
auto edge_average(const EncodedGraph<Scalar>& g, const Eigen::MatrixBase<Derived>& node_embeddings)
{
    return g.incidence * node_embeddings;
}

}  // namespace seasoned
