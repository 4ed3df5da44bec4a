#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "edgeseq/rng.hpp"

namespace edgeseq {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  void init_uniform(Rng& rng, Eigen::Index rows, Eigen::Index cols, double bound);
  void init_zero(Eigen::Index rows, Eigen::Index cols);
  void zero_grad() { grad.setZero(); }
};

// Gated recurrent layer; gate rows stacked [reset | update | candidate]:
//   r = sigmoid(W x + U h + b)        (reset rows)
//   z = sigmoid(W x + U h + b)        (update rows)
//   c = tanh(W x + U (r .* h) + b)    (candidate rows)
//   h' = (1 - z) .* h + z .* c
struct GruLayer {
  Parameter w_ih;  // 3H x I
  Parameter w_hh;  // 3H x H
  Parameter bias;  // 3H x 1

  void init(Rng& rng, Eigen::Index input_size, Eigen::Index hidden_size,
            const std::string& name_prefix);
  Eigen::Index input_size() const { return w_ih.value.cols(); }
  Eigen::Index hidden_size() const { return w_hh.value.cols(); }

  // Batched step over column-per-sequence matrices. Gate activations are
  // written out for the backward pass.
  Matrix step(const Matrix& x, const Matrix& h_prev, Matrix& r, Matrix& z, Matrix& c) const;

  // Accumulates parameter gradients; returns gradients w.r.t. the step
  // inputs through dx and dh_prev (dh_prev is ADDED to, so state gradients
  // from later steps can be carried in it).
  void backward_step(const Matrix& x, const Matrix& h_prev, const Matrix& r, const Matrix& z,
                     const Matrix& c, const Matrix& dh_next, Matrix& dx, Matrix& dh_prev);
};

// Single-vector convenience wrapper (batch of one).
std::pair<Vector, Vector> gru_step(const GruLayer& layer, const Vector& input,
                                   const Vector& h_prev);

struct Embedding {
  Parameter table;  // dim x vocab, one column per symbol

  void init(Rng& rng, Eigen::Index vocab, Eigen::Index dim, const std::string& name);
  Matrix lookup(std::span<const int> ids) const;
  void backward(std::span<const int> ids, const Matrix& dx);
};

struct Linear {
  Parameter w;  // out x in
  Parameter b;  // out x 1

  void init(Rng& rng, Eigen::Index in, Eigen::Index out, const std::string& name_prefix);
  Matrix forward(const Matrix& x) const;
  void backward(const Matrix& x, const Matrix& dy, Matrix* dx);
};

Vector softmax(const Vector& v, double temperature = 1.0);
double cross_entropy(const Vector& probabilities, int target);

// Column-wise stabilized softmax at temperature 1 (training path).
Matrix softmax_columns(const Matrix& logits);

// Zeroes each component with the given probability and rescales survivors by
// 1/(1-rate); identity when not training.
Vector dropout(const Vector& v, double rate, bool training, Rng& rng);
// 0 / 1/(1-rate) mask for batched activations.
Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int halve_every = 200;  // epochs between step-size halvings
};

double scheduled_lr(const AdamConfig& config, int epoch);

struct AdamState {
  std::vector<Matrix> m, v;
  std::int64_t t = 0;

  void init(std::span<Parameter* const> params);
  void step(std::span<Parameter* const> params, double lr, const AdamConfig& config);
};

// Versioned little-endian container: named f64 tensors (row-major payload),
// optional optimizer moments and RNG state. Byte-stable across runs.
void save_checkpoint(const std::string& path, std::span<Parameter* const> params,
                     const AdamState* optimizer = nullptr, const std::string& rng_state = {});

struct CheckpointData {
  std::vector<std::pair<std::string, Matrix>> tensors;
  std::vector<Matrix> adam_m, adam_v;
  std::int64_t adam_t = 0;
  bool has_optimizer = false;
  std::string rng_state;

  const Matrix& tensor(const std::string& name) const;
};

CheckpointData load_checkpoint(const std::string& path);

// Restores parameter values (matched by name) from a checkpoint.
void restore_parameters(std::span<Parameter* const> params, const CheckpointData& data);

}  // namespace edgeseq
