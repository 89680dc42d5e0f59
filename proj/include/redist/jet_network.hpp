#pragma once

// Batched forward-over-reverse evaluation of the network. Each layer carries,
// for every sample, the value together with its spatial gradient and
// (optionally) Hessian. These "jets" are stored as column blocks of one
// matrix so a layer is a single matrix product:
//
//   Z = [ value | d/dx_0 .. d/dx_{n-1} | d2/dx_k dx_l (row-major k,l) ],
//   each block B columns wide (one column per sample).
//
// The adjoint sweep maps adjoints of the output jets to parameter gradients.

#include "redist/network.hpp"

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

namespace redist {

using Point = std::array<double, 3>;

/// Value, gradient and Hessian of a scalar field at one point. Entries past
/// the field's dimension are zero.
struct Jet {
    double value = 0.0;
    std::array<double, 3> grad{};
    std::array<double, 9> hess{};

    double h(int i, int j) const { return hess[i * 3 + j]; }
};

class JetNetwork {
public:
    JetNetwork(const MlpConfig& cfg, std::span<const double> theta);

    /// Loads new parameter values of the same shape. Buffers are kept, so
    /// repeated batches of equal size do not reallocate.
    void rebind(std::span<const double> theta);

    /// order 0: values only, 1: + gradient, 2: + Hessian.
    void forward(std::span<const Point> points, int order);

    int channels() const { return channels_; }
    int batch() const { return batch_; }
    int dim() const { return cfg_.input_dim; }
    int order() const { return order_; }

    /// Output row of g jets, 1 x (channels * batch).
    const Eigen::MatrixXd& output() const { return pre_.back(); }
    Jet output_jet(int sample) const;

    /// Accumulates d(loss)/d(theta) into grad given the adjoint of the output
    /// jets (same layout as output()).
    void backward(const Eigen::MatrixXd& output_adjoint, std::span<double> grad) const;

    static int channels_for(int dim, int order);

private:
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    void activate(const Eigen::MatrixXd& z, Eigen::ArrayXXd& slope, Eigen::Ref<Eigen::MatrixXd> a) const;
    void activate_adjoint(const Eigen::MatrixXd& z, const Eigen::ArrayXXd& slope,
                          const Eigen::Ref<const Eigen::MatrixXd>& adj, Eigen::MatrixXd& zbar) const;

    MlpConfig cfg_;
    std::size_t count_ = 0;
    std::vector<LayerShape> shapes_;
    // Parameters live in Eigen-owned storage so that every product sees the
    // same alignment from run to run and vectorised kernels round identically.
    std::vector<RowMajor> w_;
    std::vector<Eigen::VectorXd> b_;
    mutable std::vector<RowMajor> wbar_;
    mutable Eigen::VectorXd bsum_;
    int order_ = 0;
    int channels_ = 1;
    int batch_ = 0;
    Eigen::MatrixXd input_jets_;
    std::vector<Eigen::MatrixXd> inputs_;  // layer inputs
    std::vector<Eigen::MatrixXd> pre_;     // pre-activations
    std::vector<Eigen::ArrayXXd> slope_;   // softplus' at hidden pre-activations
    mutable Eigen::ArrayXXd s2_, s3_, acc_;
    mutable Eigen::MatrixXd zbar_, zbar_next_, inbar_;
};

}  // namespace redist
