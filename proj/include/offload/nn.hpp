#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "offload/errors.hpp"

namespace offload {

struct AdamParams {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Dense ReLU network with a linear output head, manual backpropagation and
/// Adam. All math in 64-bit floating point.
class QNetwork {
 public:
  struct Gradients {
    std::vector<Eigen::MatrixXd> d_weights;
    std::vector<Eigen::VectorXd> d_biases;
  };

  /// He-style init: weights uniform with variance 2/fan_in, biases zero.
  QNetwork(std::vector<int> layer_dims, std::uint64_t seed);

  const std::vector<int>& layer_dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }

  Eigen::VectorXd forward(const Eigen::VectorXd& features) const;
  /// Columns are samples.
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& features) const;

  /// Mean squared error over the batch, gradient only through each sample's
  /// chosen action output. Returns the pre-update loss and applies one Adam
  /// step. Throws NonFiniteLoss on non-finite targets or activations.
  double train_step(const Eigen::MatrixXd& features,
                    std::span<const int> action_indices,
                    const Eigen::VectorXd& targets, const AdamParams& adam);

  /// Loss and analytic gradients without updating parameters.
  double loss_gradients(const Eigen::MatrixXd& features,
                        std::span<const int> action_indices,
                        const Eigen::VectorXd& targets, Gradients* grads) const;

  /// Copy parameters from another network of the same architecture; Adam
  /// state is left untouched. Throws DimensionMismatch.
  void copy_parameters_from(const QNetwork& other);

  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);
  std::size_t parameter_count() const;

  /// Checkpoint format: "qnet v1", layer dims, then parameters in layer
  /// order (weights row-major, then biases).
  void save(std::ostream& out) const;
  static QNetwork load(std::istream& in);

 private:
  std::vector<int> dims_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  std::vector<Eigen::MatrixXd> adam_m_w_, adam_v_w_;
  std::vector<Eigen::VectorXd> adam_m_b_, adam_v_b_;
  long adam_step_ = 0;
};

/// Central-difference estimate of the loss gradient for one sample, one
/// parameter at a time. Verification oracle for the analytic gradients.
std::vector<double> finite_diff_gradient(QNetwork& net,
                                         const Eigen::VectorXd& features,
                                         int action_index, double target,
                                         double h);

}  // namespace offload
