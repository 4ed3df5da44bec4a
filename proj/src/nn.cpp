#include "edgeseq/nn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "edgeseq/graph.hpp"

namespace edgeseq {

void Parameter::init_uniform(Rng& rng, Eigen::Index rows, Eigen::Index cols, double bound) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  value.resize(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) value(r, c) = dist(rng);
  grad = Matrix::Zero(rows, cols);
}

void Parameter::init_zero(Eigen::Index rows, Eigen::Index cols) {
  value = Matrix::Zero(rows, cols);
  grad = Matrix::Zero(rows, cols);
}

void GruLayer::init(Rng& rng, Eigen::Index input_size, Eigen::Index hidden_size,
                    const std::string& name_prefix) {
  w_ih.name = name_prefix + ".w_ih";
  w_hh.name = name_prefix + ".w_hh";
  bias.name = name_prefix + ".bias";
  w_ih.init_uniform(rng, 3 * hidden_size, input_size, 1.0 / std::sqrt(double(input_size)));
  w_hh.init_uniform(rng, 3 * hidden_size, hidden_size, 1.0 / std::sqrt(double(hidden_size)));
  bias.init_zero(3 * hidden_size, 1);
}

Matrix GruLayer::step(const Matrix& x, const Matrix& h_prev, Matrix& r, Matrix& z,
                      Matrix& c) const {
  const Eigen::Index h = hidden_size();
  if (x.rows() != input_size() || h_prev.rows() != h || x.cols() != h_prev.cols())
    throw std::invalid_argument("gru_step dimension mismatch");

  Matrix pre(3 * h, x.cols());
  pre.noalias() = w_ih.value * x;
  pre.colwise() += bias.value.col(0);
  pre.topRows(2 * h).noalias() += w_hh.value.topRows(2 * h) * h_prev;

  r = (1.0 + (-pre.topRows(h).array()).exp()).inverse().matrix();
  z = (1.0 + (-pre.middleRows(h, h).array()).exp()).inverse().matrix();

  Matrix gated = r.cwiseProduct(h_prev);
  pre.bottomRows(h).noalias() += w_hh.value.bottomRows(h) * gated;
  c = pre.bottomRows(h).array().tanh().matrix();

  return ((1.0 - z.array()) * h_prev.array() + z.array() * c.array()).matrix();
}

void GruLayer::backward_step(const Matrix& x, const Matrix& h_prev, const Matrix& r,
                             const Matrix& z, const Matrix& c, const Matrix& dh_next, Matrix& dx,
                             Matrix& dh_prev) {
  const Eigen::Index h = hidden_size();

  // h' = (1-z).*h + z.*c
  Matrix dc = dh_next.cwiseProduct(z);
  Matrix dz = dh_next.cwiseProduct(c - h_prev);
  Matrix dh = ((1.0 - z.array()) * dh_next.array()).matrix();

  Matrix dpre(3 * h, x.cols());
  // candidate pre-activation
  dpre.bottomRows(h) = (dc.array() * (1.0 - c.array().square())).matrix();
  Matrix gated = r.cwiseProduct(h_prev);
  w_hh.grad.bottomRows(h).noalias() += dpre.bottomRows(h) * gated.transpose();
  Matrix dgated(h, x.cols());
  dgated.noalias() = w_hh.value.bottomRows(h).transpose() * dpre.bottomRows(h);
  Matrix dr = dgated.cwiseProduct(h_prev);
  dh += dgated.cwiseProduct(r);

  // gate pre-activations (sigmoid' = a(1-a))
  dpre.topRows(h) = (dr.array() * r.array() * (1.0 - r.array())).matrix();
  dpre.middleRows(h, h) = (dz.array() * z.array() * (1.0 - z.array())).matrix();

  w_hh.grad.topRows(2 * h).noalias() += dpre.topRows(2 * h) * h_prev.transpose();
  dh.noalias() += w_hh.value.topRows(2 * h).transpose() * dpre.topRows(2 * h);

  w_ih.grad.noalias() += dpre * x.transpose();
  bias.grad.col(0) += dpre.rowwise().sum();

  dx.resize(input_size(), x.cols());
  dx.noalias() = w_ih.value.transpose() * dpre;
  dh_prev += dh;
}

std::pair<Vector, Vector> gru_step(const GruLayer& layer, const Vector& input,
                                   const Vector& h_prev) {
  Matrix r, z, c;
  Matrix h_next = layer.step(input, h_prev, r, z, c);
  return {h_next.col(0), h_next.col(0)};
}

void Embedding::init(Rng& rng, Eigen::Index vocab, Eigen::Index dim, const std::string& name) {
  table.name = name;
  table.init_uniform(rng, dim, vocab, 1.0 / std::sqrt(double(dim)));
}

Matrix Embedding::lookup(std::span<const int> ids) const {
  Matrix out(table.value.rows(), static_cast<Eigen::Index>(ids.size()));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= table.value.cols())
      throw std::invalid_argument("embedding id out of range");
    out.col(static_cast<Eigen::Index>(i)) = table.value.col(ids[i]);
  }
  return out;
}

void Embedding::backward(std::span<const int> ids, const Matrix& dx) {
  for (std::size_t i = 0; i < ids.size(); ++i)
    table.grad.col(ids[i]) += dx.col(static_cast<Eigen::Index>(i));
}

void Linear::init(Rng& rng, Eigen::Index in, Eigen::Index out, const std::string& name_prefix) {
  w.name = name_prefix + ".w";
  b.name = name_prefix + ".b";
  w.init_uniform(rng, out, in, 1.0 / std::sqrt(double(in)));
  b.init_zero(out, 1);
}

Matrix Linear::forward(const Matrix& x) const {
  Matrix y(w.value.rows(), x.cols());
  y.noalias() = w.value * x;
  y.colwise() += b.value.col(0);
  return y;
}

void Linear::backward(const Matrix& x, const Matrix& dy, Matrix* dx) {
  w.grad.noalias() += dy * x.transpose();
  b.grad.col(0) += dy.rowwise().sum();
  if (dx) {
    dx->resize(x.rows(), x.cols());
    dx->noalias() = w.value.transpose() * dy;
  }
}

Vector softmax(const Vector& v, double temperature) {
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be positive");
  Vector scaled = v / temperature;
  double m = scaled.maxCoeff();
  Vector e = (scaled.array() - m).exp().matrix();
  return e / e.sum();
}

Matrix softmax_columns(const Matrix& logits) {
  Matrix out = logits;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    double m = out.col(c).maxCoeff();
    out.col(c) = (out.col(c).array() - m).exp().matrix();
    out.col(c) /= out.col(c).sum();
  }
  return out;
}

double cross_entropy(const Vector& probabilities, int target) {
  if (target < 0 || target >= probabilities.size())
    throw std::invalid_argument("cross_entropy target out of range");
  return -std::log(std::max(probabilities(target), 1e-12));
}

Vector dropout(const Vector& v, double rate, bool training, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout rate must be in [0,1)");
  if (!training || rate == 0.0) return v;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Vector out = v;
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = coin(rng) < rate ? 0.0 : out(i) * scale;
  return out;
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Matrix mask(rows, cols);
  const double scale = 1.0 / (1.0 - rate);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) mask(r, c) = coin(rng) < rate ? 0.0 : scale;
  return mask;
}

double scheduled_lr(const AdamConfig& config, int epoch) {
  return config.lr * std::pow(0.5, epoch / config.halve_every);
}

void AdamState::init(std::span<Parameter* const> params) {
  m.clear();
  v.clear();
  t = 0;
  for (const Parameter* p : params) {
    m.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
    v.push_back(Matrix::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamState::step(std::span<Parameter* const> params, double lr, const AdamConfig& config) {
  if (m.size() != params.size()) throw std::logic_error("adam state not initialized");
  ++t;
  const double bc1 = 1.0 - std::pow(config.beta1, double(t));
  const double bc2 = 1.0 - std::pow(config.beta2, double(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * p.grad;
    v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -=
        lr * (m[i].array() / bc1) / ((v[i].array() / bc2).sqrt() + config.eps);
  }
}

namespace {

constexpr char kMagic[8] = {'E', 'S', 'C', 'K', 'P', 'T', '0', '1'};

void write_u32(std::ostream& out, std::uint32_t x) {
  char buf[4];
  std::memcpy(buf, &x, 4);
  out.write(buf, 4);
}

void write_u64(std::ostream& out, std::uint64_t x) {
  char buf[8];
  std::memcpy(buf, &x, 8);
  out.write(buf, 8);
}

void write_tensor(std::ostream& out, const Matrix& t) {
  write_u32(out, 2);
  write_u64(out, static_cast<std::uint64_t>(t.rows()));
  write_u64(out, static_cast<std::uint64_t>(t.cols()));
  // row-major payload
  for (Eigen::Index r = 0; r < t.rows(); ++r)
    for (Eigen::Index c = 0; c < t.cols(); ++c) {
      double x = t(r, c);
      char buf[8];
      std::memcpy(buf, &x, 8);
      out.write(buf, 8);
    }
}

std::uint32_t read_u32(std::istream& in) {
  char buf[4];
  in.read(buf, 4);
  std::uint32_t x;
  std::memcpy(&x, buf, 4);
  return x;
}

std::uint64_t read_u64(std::istream& in) {
  char buf[8];
  in.read(buf, 8);
  std::uint64_t x;
  std::memcpy(&x, buf, 8);
  return x;
}

Matrix read_tensor(std::istream& in) {
  std::uint32_t ndim = read_u32(in);
  if (ndim != 2) throw std::runtime_error("unsupported tensor rank in checkpoint");
  auto rows = static_cast<Eigen::Index>(read_u64(in));
  auto cols = static_cast<Eigen::Index>(read_u64(in));
  Matrix t(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      char buf[8];
      in.read(buf, 8);
      double x;
      std::memcpy(&x, buf, 8);
      t(r, c) = x;
    }
  return t;
}

}  // namespace

void save_checkpoint(const std::string& path, std::span<Parameter* const> params,
                     const AdamState* optimizer, const std::string& rng_state) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open checkpoint '" + path + "' for writing");
  out.write(kMagic, sizeof(kMagic));
  write_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const Parameter* p : params) {
    write_u32(out, static_cast<std::uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_tensor(out, p->value);
  }
  out.put(optimizer ? 1 : 0);
  if (optimizer) {
    write_u64(out, static_cast<std::uint64_t>(optimizer->t));
    for (const Matrix& t : optimizer->m) write_tensor(out, t);
    for (const Matrix& t : optimizer->v) write_tensor(out, t);
  }
  write_u32(out, static_cast<std::uint32_t>(rng_state.size()));
  out.write(rng_state.data(), static_cast<std::streamsize>(rng_state.size()));
  if (!out) throw std::runtime_error("checkpoint write failed for '" + path + "'");
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UserError("cannot open checkpoint '" + path + "'");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw UserError("'" + path + "' is not a checkpoint file");
  CheckpointData data;
  std::uint32_t count = read_u32(in);
  data.tensors.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t len = read_u32(in);
    std::string name(len, '\0');
    in.read(name.data(), len);
    data.tensors.emplace_back(std::move(name), read_tensor(in));
  }
  data.has_optimizer = in.get() == 1;
  if (data.has_optimizer) {
    data.adam_t = static_cast<std::int64_t>(read_u64(in));
    for (std::uint32_t i = 0; i < count; ++i) data.adam_m.push_back(read_tensor(in));
    for (std::uint32_t i = 0; i < count; ++i) data.adam_v.push_back(read_tensor(in));
  }
  std::uint32_t rng_len = read_u32(in);
  data.rng_state.resize(rng_len);
  in.read(data.rng_state.data(), rng_len);
  if (!in) throw UserError("truncated checkpoint '" + path + "'");
  return data;
}

const Matrix& CheckpointData::tensor(const std::string& name) const {
  for (const auto& [n, t] : tensors)
    if (n == name) return t;
  throw std::runtime_error("checkpoint has no tensor named '" + name + "'");
}

void restore_parameters(std::span<Parameter* const> params, const CheckpointData& data) {
  for (Parameter* p : params) {
    const Matrix& t = data.tensor(p->name);
    if (t.rows() != p->value.rows() || t.cols() != p->value.cols())
      throw std::runtime_error("checkpoint tensor '" + p->name + "' has mismatched shape");
    p->value = t;
    p->grad = Matrix::Zero(t.rows(), t.cols());
  }
}

}  // namespace edgeseq
