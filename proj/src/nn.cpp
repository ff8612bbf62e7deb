#include "offload/nn.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <random>

#include "offload/rng.hpp"

namespace offload {

QNetwork::QNetwork(std::vector<int> layer_dims, std::uint64_t seed)
    : dims_(std::move(layer_dims)) {
  if (dims_.size() < 2) {
    throw DimensionMismatch("QNetwork: need at least input and output dims");
  }
  for (int d : dims_) {
    if (d <= 0) throw DimensionMismatch("QNetwork: non-positive layer dim");
  }
  std::mt19937_64 rng(mix_seed(seed, 0x6e6574ULL));
  const std::size_t n_layers = dims_.size() - 1;
  weights_.reserve(n_layers);
  biases_.reserve(n_layers);
  for (std::size_t l = 0; l < n_layers; ++l) {
    const int fan_in = dims_[l];
    const int fan_out = dims_[l + 1];
    // Uniform with variance 2/fan_in.
    const double bound = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i) {
      for (int j = 0; j < fan_in; ++j) w(i, j) = u(rng);
    }
    weights_.push_back(std::move(w));
    biases_.push_back(Eigen::VectorXd::Zero(fan_out));
    adam_m_w_.push_back(Eigen::MatrixXd::Zero(fan_out, fan_in));
    adam_v_w_.push_back(Eigen::MatrixXd::Zero(fan_out, fan_in));
    adam_m_b_.push_back(Eigen::VectorXd::Zero(fan_out));
    adam_v_b_.push_back(Eigen::VectorXd::Zero(fan_out));
  }
}

Eigen::VectorXd QNetwork::forward(const Eigen::VectorXd& features) const {
  if (features.size() != input_dim()) {
    throw DimensionMismatch("QNetwork::forward: feature length mismatch");
  }
  Eigen::VectorXd a = features;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    a = weights_[l] * a + biases_[l];
    if (l + 1 < weights_.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

Eigen::MatrixXd QNetwork::forward_batch(const Eigen::MatrixXd& features) const {
  if (features.rows() != input_dim()) {
    throw DimensionMismatch("QNetwork::forward_batch: feature rows mismatch");
  }
  Eigen::MatrixXd a = features;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    a = (weights_[l] * a).colwise() + biases_[l];
    if (l + 1 < weights_.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

double QNetwork::loss_gradients(const Eigen::MatrixXd& features,
                                std::span<const int> action_indices,
                                const Eigen::VectorXd& targets,
                                Gradients* grads) const {
  const auto batch = features.cols();
  if (batch == 0) throw DimensionMismatch("QNetwork: empty batch");
  if (static_cast<Eigen::Index>(action_indices.size()) != batch ||
      targets.size() != batch) {
    throw DimensionMismatch("QNetwork: batch size mismatch");
  }
  if (!targets.allFinite()) throw NonFiniteLoss("QNetwork: non-finite target");

  const std::size_t n_layers = weights_.size();
  std::vector<Eigen::MatrixXd> acts(n_layers + 1);
  acts[0] = features;
  for (std::size_t l = 0; l < n_layers; ++l) {
    acts[l + 1] = (weights_[l] * acts[l]).colwise() + biases_[l];
    if (l + 1 < n_layers) acts[l + 1] = acts[l + 1].cwiseMax(0.0);
  }
  if (!acts[n_layers].allFinite()) {
    throw NonFiniteLoss("QNetwork: non-finite activation");
  }

  // Squared error on the chosen action outputs only, averaged over the batch.
  double loss = 0.0;
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(output_dim(), batch);
  for (Eigen::Index i = 0; i < batch; ++i) {
    const int a = action_indices[i];
    if (a < 0 || a >= output_dim()) {
      throw DimensionMismatch("QNetwork: action index out of range");
    }
    const double err = acts[n_layers](a, i) - targets(i);
    loss += err * err;
    delta(a, i) = 2.0 * err / static_cast<double>(batch);
  }
  loss /= static_cast<double>(batch);

  if (grads) {
    grads->d_weights.resize(n_layers);
    grads->d_biases.resize(n_layers);
    for (std::size_t l = n_layers; l-- > 0;) {
      grads->d_weights[l] = delta * acts[l].transpose();
      grads->d_biases[l] = delta.rowwise().sum();
      if (l > 0) {
        // ReLU subgradient: active where the forward activation is positive.
        delta = (weights_[l].transpose() * delta)
                    .cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
      }
    }
  }
  return loss;
}

double QNetwork::train_step(const Eigen::MatrixXd& features,
                            std::span<const int> action_indices,
                            const Eigen::VectorXd& targets,
                            const AdamParams& adam) {
  Gradients g;
  const double loss = loss_gradients(features, action_indices, targets, &g);

  ++adam_step_;
  const double bc1 = 1.0 - std::pow(adam.beta1, adam_step_);
  const double bc2 = 1.0 - std::pow(adam.beta2, adam_step_);
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    adam_m_w_[l] = adam.beta1 * adam_m_w_[l] + (1.0 - adam.beta1) * g.d_weights[l];
    adam_v_w_[l] = adam.beta2 * adam_v_w_[l] +
                   (1.0 - adam.beta2) * g.d_weights[l].cwiseProduct(g.d_weights[l]);
    weights_[l] -= (adam.lr * (adam_m_w_[l] / bc1).array() /
                    ((adam_v_w_[l] / bc2).array().sqrt() + adam.eps))
                       .matrix();
    adam_m_b_[l] = adam.beta1 * adam_m_b_[l] + (1.0 - adam.beta1) * g.d_biases[l];
    adam_v_b_[l] = adam.beta2 * adam_v_b_[l] +
                   (1.0 - adam.beta2) * g.d_biases[l].cwiseProduct(g.d_biases[l]);
    biases_[l] -= (adam.lr * (adam_m_b_[l] / bc1).array() /
                   ((adam_v_b_[l] / bc2).array().sqrt() + adam.eps))
                      .matrix();
  }
  return loss;
}

void QNetwork::copy_parameters_from(const QNetwork& other) {
  if (dims_ != other.dims_) {
    throw DimensionMismatch("copy_parameters_from: architecture mismatch");
  }
  weights_ = other.weights_;
  biases_ = other.biases_;
}

std::size_t QNetwork::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += static_cast<std::size_t>(weights_[l].size()) + biases_[l].size();
  }
  return n;
}

std::vector<double> QNetwork::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index i = 0; i < weights_[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < weights_[l].cols(); ++j) {
        flat.push_back(weights_[l](i, j));
      }
    }
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) {
      flat.push_back(biases_[l](i));
    }
  }
  return flat;
}

void QNetwork::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) {
    throw DimensionMismatch("set_parameters: flat size mismatch");
  }
  std::size_t idx = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    for (Eigen::Index i = 0; i < weights_[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < weights_[l].cols(); ++j) {
        weights_[l](i, j) = flat[idx++];
      }
    }
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) {
      biases_[l](i) = flat[idx++];
    }
  }
}

void QNetwork::save(std::ostream& out) const {
  out << "qnet v1\n" << dims_.size();
  for (int d : dims_) out << ' ' << d;
  out << '\n';
  out.precision(17);
  const auto flat = parameters();
  for (std::size_t i = 0; i < flat.size(); ++i) {
    out << flat[i] << (i + 1 == flat.size() ? '\n' : ' ');
  }
}

QNetwork QNetwork::load(std::istream& in) {
  std::string tag, version;
  in >> tag >> version;
  if (tag != "qnet" || version != "v1") {
    throw ParseError("QNetwork::load: bad checkpoint header");
  }
  std::size_t n_dims = 0;
  in >> n_dims;
  if (!in || n_dims < 2) throw ParseError("QNetwork::load: bad dim count");
  std::vector<int> dims(n_dims);
  for (auto& d : dims) in >> d;
  QNetwork net(dims, 0);
  std::vector<double> flat(net.parameter_count());
  for (auto& v : flat) in >> v;
  if (!in) throw ParseError("QNetwork::load: truncated parameters");
  net.set_parameters(flat);
  return net;
}

std::vector<double> finite_diff_gradient(QNetwork& net,
                                         const Eigen::VectorXd& features,
                                         int action_index, double target,
                                         double h) {
  auto loss_at = [&](const std::vector<double>& params) {
    net.set_parameters(params);
    const double err = net.forward(features)(action_index) - target;
    return err * err;
  };
  const std::vector<double> base = net.parameters();
  std::vector<double> grad(base.size());
  std::vector<double> work = base;
  for (std::size_t i = 0; i < base.size(); ++i) {
    work[i] = base[i] + h;
    const double up = loss_at(work);
    work[i] = base[i] - h;
    const double down = loss_at(work);
    work[i] = base[i];
    grad[i] = (up - down) / (2.0 * h);
  }
  net.set_parameters(base);
  return grad;
}

}  // namespace offload
