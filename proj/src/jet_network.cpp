#include "redist/jet_network.hpp"

#include <cassert>

namespace redist {

JetNetwork::JetNetwork(const MlpConfig& cfg, std::span<const double> theta)
    : cfg_(cfg)
    , count_(parameter_count(cfg))
    , shapes_(layer_shapes(cfg))
    , w_(shapes_.size())
    , b_(shapes_.size())
    , wbar_(shapes_.size())
    , inputs_(shapes_.size())
    , pre_(shapes_.size())
    , slope_(shapes_.size())
{
    rebind(theta);
}

void JetNetwork::rebind(std::span<const double> theta)
{
    assert(theta.size() == count_);
    for (std::size_t l = 0; l < shapes_.size(); ++l) {
        const LayerShape& s = shapes_[l];
        w_[l] = Eigen::Map<const RowMajor>(theta.data() + s.weights, s.out, s.in);
        b_[l] = Eigen::Map<const Eigen::VectorXd>(theta.data() + s.bias, s.out);
    }
}

int JetNetwork::channels_for(int dim, int order)
{
    int c = 1;
    if (order >= 1) {
        c += dim;
    }
    if (order >= 2) {
        c += dim * dim;
    }
    return c;
}

void JetNetwork::forward(std::span<const Point> points, int order)
{
    const int n = cfg_.input_dim;
    const int B = static_cast<int>(points.size());
    order_ = order;
    batch_ = B;
    channels_ = channels_for(n, order);
    const Eigen::Index cols = static_cast<Eigen::Index>(channels_) * B;

    input_jets_.setZero(n, cols);
    for (int j = 0; j < B; ++j) {
        for (int k = 0; k < n; ++k) {
            input_jets_(k, j) = points[j][k];
        }
    }
    if (order >= 1) {
        for (int k = 0; k < n; ++k) {
            input_jets_.block(k, static_cast<Eigen::Index>(1 + k) * B, 1, B).setOnes();
        }
    }

    for (std::size_t l = 0; l < shapes_.size(); ++l) {
        const LayerShape& s = shapes_[l];
        Eigen::MatrixXd& in = inputs_[l];
        if (l == 0) {
            in = input_jets_;
        } else {
            in.resize(s.in, cols);
            const Eigen::Index hidden = pre_[l - 1].rows();
            activate(pre_[l - 1], slope_[l - 1], in.topRows(hidden));
            if (s.skip) {
                in.bottomRows(n) = input_jets_;
            }
        }
        pre_[l].resize(s.out, cols);
        pre_[l].noalias() = w_[l] * in;
        pre_[l].leftCols(B).colwise() += b_[l];
    }
}

Jet JetNetwork::output_jet(int sample) const
{
    const Eigen::MatrixXd& out = output();
    const int n = cfg_.input_dim;
    const Eigen::Index B = batch_;
    Jet jet;
    jet.value = out(0, sample);
    if (order_ >= 1) {
        for (int k = 0; k < n; ++k) {
            jet.grad[k] = out(0, (1 + k) * B + sample);
        }
    }
    if (order_ >= 2) {
        for (int k = 0; k < n; ++k) {
            for (int m = 0; m < n; ++m) {
                jet.hess[k * 3 + m] = out(0, (1 + n + k * n + m) * B + sample);
            }
        }
    }
    return jet;
}

// softplus on jets: a = sp(z), Ja = sp'(z) Jz, Ha = sp'(z) Hz + sp''(z) Jz Jz^T.
void JetNetwork::activate(const Eigen::MatrixXd& z, Eigen::ArrayXXd& slope, Eigen::Ref<Eigen::MatrixXd> a) const
{
    const double beta = cfg_.beta;
    const int n = cfg_.input_dim;
    const Eigen::Index B = batch_;
    auto zb = [&](int c) { return z.middleCols(c * B, B).array(); };
    auto ab = [&](int c) { return a.middleCols(c * B, B).array(); };

    slope = zb(0).unaryExpr([beta](double t) { return sigmoid(t, beta); });
    ab(0) = zb(0).unaryExpr([beta](double t) { return softplus(t, beta); });
    if (order_ >= 1) {
        for (int k = 0; k < n; ++k) {
            ab(1 + k) = slope * zb(1 + k);
        }
    }
    if (order_ >= 2) {
        s2_ = beta * slope * (1.0 - slope);
        for (int k = 0; k < n; ++k) {
            for (int m = 0; m < n; ++m) {
                const int c = 1 + n + k * n + m;
                ab(c) = slope * zb(c) + s2_ * zb(1 + k) * zb(1 + m);
            }
        }
    }
}

void JetNetwork::activate_adjoint(const Eigen::MatrixXd& z, const Eigen::ArrayXXd& slope,
                                  const Eigen::Ref<const Eigen::MatrixXd>& adj, Eigen::MatrixXd& zbar) const
{
    const double beta = cfg_.beta;
    const int n = cfg_.input_dim;
    const Eigen::Index B = batch_;
    auto zb = [&](int c) { return z.middleCols(c * B, B).array(); };
    auto jb = [&](int c) { return adj.middleCols(c * B, B).array(); };
    auto out = [&](int c) { return zbar.middleCols(c * B, B).array(); };

    zbar.resize(z.rows(), z.cols());
    if (order_ == 0) {
        out(0) = jb(0) * slope;
        return;
    }
    s2_ = beta * slope * (1.0 - slope);
    acc_ = jb(0) * slope;
    for (int k = 0; k < n; ++k) {
        acc_ += jb(1 + k) * zb(1 + k) * s2_;
    }
    if (order_ >= 2) {
        s3_ = beta * s2_ * (1.0 - 2.0 * slope);
        for (int k = 0; k < n; ++k) {
            for (int m = 0; m < n; ++m) {
                const int c = 1 + n + k * n + m;
                acc_ += jb(c) * (zb(c) * s2_ + s3_ * zb(1 + k) * zb(1 + m));
            }
        }
    }
    out(0) = acc_;
    for (int k = 0; k < n; ++k) {
        out(1 + k) = jb(1 + k) * slope;
        if (order_ >= 2) {
            for (int m = 0; m < n; ++m) {
                out(1 + k) += (jb(1 + n + k * n + m) + jb(1 + n + m * n + k)) * s2_ * zb(1 + m);
            }
        }
    }
    if (order_ >= 2) {
        for (int c = 1 + n; c < channels_; ++c) {
            out(c) = jb(c) * slope;
        }
    }
}

void JetNetwork::backward(const Eigen::MatrixXd& output_adjoint, std::span<double> grad) const
{
    assert(grad.size() == count_);
    const Eigen::Index B = batch_;
    zbar_ = output_adjoint;
    for (std::size_t l = shapes_.size(); l-- > 0;) {
        const LayerShape& s = shapes_[l];
        Eigen::Map<RowMajor> wbar(grad.data() + s.weights, s.out, s.in);
        Eigen::Map<Eigen::VectorXd> bbar(grad.data() + s.bias, s.out);
        wbar_[l].noalias() = zbar_ * inputs_[l].transpose();
        wbar += wbar_[l];
        bsum_.noalias() = zbar_.leftCols(B).rowwise().sum();
        bbar += bsum_;
        if (l == 0) {
            break;
        }
        const Eigen::Index hidden = pre_[l - 1].rows();
        inbar_.resize(s.in, zbar_.cols());
        inbar_.noalias() = w_[l].transpose() * zbar_;
        activate_adjoint(pre_[l - 1], slope_[l - 1], inbar_.topRows(hidden), zbar_next_);
        zbar_.swap(zbar_next_);
    }
}

}  // namespace redist
