#include "compression.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "binio.hpp"
#include "error.hpp"

namespace ofp {

namespace {

// Largest-magnitude entry (first on ties) made positive.
void fix_sign(Eigen::MatrixXd& m, Eigen::Index row) {
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < m.cols(); ++i) {
    if (std::abs(m(row, i)) > std::abs(m(row, arg))) arg = i;
  }
  if (m(row, arg) < 0) m.row(row) *= -1.0;
}

}  // namespace

PcaModel fit_pca(const Eigen::MatrixXd& data, std::uint32_t d) {
  const Eigen::Index n = data.rows();
  const Eigen::Index dim = data.cols();
  if (n < 2) fail(ErrorKind::kArgument, "PCA needs at least 2 samples, got " + std::to_string(n));
  if (d < 1 || d > std::min<Eigen::Index>(n - 1, dim)) {
    fail(ErrorKind::kArgument, "PCA output dim " + std::to_string(d) + " outside [1, " +
                                   std::to_string(std::min<Eigen::Index>(n - 1, dim)) + "]");
  }
  if (!data.allFinite()) fail(ErrorKind::kArgument, "PCA input contains non-finite values");

  PcaModel model;
  model.input_dim = static_cast<std::uint32_t>(dim);
  model.output_dim = d;
  model.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  const double tol = static_cast<double>(std::max(n, dim)) *
                     std::numeric_limits<double>::epsilon() * (sigma.size() > 0 ? sigma[0] : 0.0);

  model.components.resize(d, dim);
  model.explained_variance.resize(d);
  Eigen::Index next_basis = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (sigma[i] > tol) {
      model.components.row(i) = svd.matrixV().col(i).transpose();
      model.explained_variance[i] = sigma[i] * sigma[i] / static_cast<double>(n - 1);
    } else {
      // Rank-deficient: complete the basis deterministically.
      Eigen::RowVectorXd v;
      for (;; ++next_basis) {
        if (next_basis >= dim) fail(ErrorKind::kArgument, "PCA basis completion failed");
        v = Eigen::RowVectorXd::Unit(dim, next_basis);
        for (int pass = 0; pass < 2; ++pass) {
          for (Eigen::Index j = 0; j < i; ++j) v -= v.dot(model.components.row(j)) * model.components.row(j);
        }
        if (v.norm() > 1e-6) break;
      }
      ++next_basis;
      model.components.row(i) = v / v.norm();
      model.explained_variance[i] = 0.0;
    }
    fix_sign(model.components, i);
  }
  return model;
}

namespace {

template <typename T>
Eigen::VectorXd project_impl(const PcaModel& model, std::span<const T> x) {
  if (x.size() != model.input_dim) {
    fail(ErrorKind::kArgument, "PCA input has length " + std::to_string(x.size()) +
                                   ", model expects " + std::to_string(model.input_dim));
  }
  Eigen::VectorXd centered(model.input_dim);
  for (std::uint32_t i = 0; i < model.input_dim; ++i) centered[i] = static_cast<double>(x[i]) - model.mean[i];
  return model.components * centered;
}

}  // namespace

Eigen::VectorXd pca_project(const PcaModel& model, std::span<const double> x) {
  return project_impl(model, x);
}

Eigen::VectorXd pca_project(const PcaModel& model, std::span<const float> x) {
  return project_impl(model, x);
}

Eigen::MatrixXd random_rotation(std::uint32_t c, std::uint64_t seed) {
  if (c < 1) fail(ErrorKind::kArgument, "rotation size must be >= 1");
  std::mt19937_64 rng(seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };  // [0, 1)
  Eigen::MatrixXd gauss(c, c);
  for (Eigen::Index j = 0; j < gauss.cols(); ++j) {
    for (Eigen::Index i = 0; i < gauss.rows(); ++i) {
      const double u1 = 1.0 - unit();  // (0, 1]
      const double u2 = unit();
      gauss(i, j) = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(c, c);
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

namespace {

Eigen::MatrixXd signs(const Eigen::MatrixXd& z) {
  return z.unaryExpr([](double v) { return v >= 0.0 ? 1.0 : -1.0; });
}

double quantization_loss(const Eigen::MatrixXd& b, const Eigen::MatrixXd& z) {
  long double sum = 0;
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      const long double diff = static_cast<long double>(b(i, j)) - z(i, j);
      sum += diff * diff;
    }
  }
  return static_cast<double>(sum);
}

}  // namespace

ItqModel fit_itq(const Eigen::MatrixXd& data, std::uint32_t bits, std::uint32_t iters,
                 std::uint64_t seed, const ItqObserver& observer) {
  if (bits < 1) fail(ErrorKind::kArgument, "ITQ needs at least 1 bit");
  if (static_cast<Eigen::Index>(bits) >= data.rows()) {
    fail(ErrorKind::kArgument, "ITQ bit count " + std::to_string(bits) + " must be below the sample count " +
                                   std::to_string(data.rows()));
  }
  ItqModel model;
  model.bits = bits;
  model.pca = fit_pca(data, bits);
  const Eigen::MatrixXd projected =
      (data.rowwise() - model.pca.mean.transpose()) * model.pca.components.transpose();

  model.rotation = random_rotation(bits, seed);
  model.loss_trace.reserve(iters);
  for (std::uint32_t it = 0; it < iters; ++it) {
    const Eigen::MatrixXd z = projected * model.rotation;
    const Eigen::MatrixXd b = signs(z);
    model.loss_trace.push_back(quantization_loss(b, z));
    // Procrustes: B^T V = S Omega S_hat^T  =>  R = S_hat S^T.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.transpose() * projected,
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    model.rotation = svd.matrixV() * svd.matrixU().transpose();
    if (observer) observer(it, model.rotation);
  }
  return model;
}

Eigen::VectorXd itq_embed(const ItqModel& model, std::span<const float> x) {
  return model.rotation.transpose() * pca_project(model.pca, x);
}

BinaryCode itq_encode(const ItqModel& model, std::span<const float> x) {
  const Eigen::VectorXd z = itq_embed(model, x);
  BinaryCode code(model.bits);
  for (std::uint32_t j = 0; j < model.bits; ++j) code.set_bit(j, z[j] >= 0.0);
  return code;
}

namespace {

void put_pca_body(binio::Writer& w, const PcaModel& m) {
  w.u32(m.input_dim);
  w.u32(m.output_dim);
  for (Eigen::Index i = 0; i < m.mean.size(); ++i) w.f64(m.mean[i]);
  for (Eigen::Index r = 0; r < m.components.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.components.cols(); ++c) w.f64(m.components(r, c));
  }
  for (Eigen::Index i = 0; i < m.explained_variance.size(); ++i) w.f64(m.explained_variance[i]);
}

PcaModel get_pca_body(binio::Reader& r, const char* format) {
  PcaModel m;
  const std::size_t dims_at = r.offset();
  m.input_dim = r.u32("input dim");
  m.output_dim = r.u32("output dim");
  if (m.output_dim < 1 || m.output_dim > m.input_dim) {
    fail(ErrorKind::kFormat, std::string(format) + ": invalid dims " + std::to_string(m.input_dim) +
                                 "x" + std::to_string(m.output_dim) + " at offset " +
                                 std::to_string(dims_at));
  }
  const std::uint64_t need =
      8ull * (m.input_dim + std::uint64_t{m.output_dim} * m.input_dim + m.output_dim);
  r.require(need, "PCA matrices");
  m.mean.resize(m.input_dim);
  for (Eigen::Index i = 0; i < m.mean.size(); ++i) m.mean[i] = r.f64("mean");
  m.components.resize(m.output_dim, m.input_dim);
  for (Eigen::Index row = 0; row < m.components.rows(); ++row) {
    for (Eigen::Index c = 0; c < m.components.cols(); ++c) m.components(row, c) = r.f64("components");
  }
  m.explained_variance.resize(m.output_dim);
  for (Eigen::Index i = 0; i < m.explained_variance.size(); ++i) {
    m.explained_variance[i] = r.f64("explained variance");
  }
  return m;
}

}  // namespace

std::vector<std::uint8_t> write_pca(const PcaModel& model) {
  binio::Writer w;
  w.magic("OFPM");
  w.u32(1);
  put_pca_body(w, model);
  return std::move(w).take();
}

PcaModel read_pca(std::span<const std::uint8_t> bytes) {
  binio::Reader r(bytes, "OFPM");
  r.expect_magic("OFPM");
  r.expect_version(1);
  PcaModel m = get_pca_body(r, "OFPM");
  r.expect_end();
  return m;
}

std::vector<std::uint8_t> write_itq(const ItqModel& model) {
  binio::Writer w;
  w.magic("OFPQ");
  w.u32(1);
  put_pca_body(w, model.pca);
  w.u32(model.bits);
  for (Eigen::Index r = 0; r < model.rotation.rows(); ++r) {
    for (Eigen::Index c = 0; c < model.rotation.cols(); ++c) w.f64(model.rotation(r, c));
  }
  w.u32(static_cast<std::uint32_t>(model.loss_trace.size()));
  for (double v : model.loss_trace) w.f64(v);
  return std::move(w).take();
}

ItqModel read_itq(std::span<const std::uint8_t> bytes) {
  binio::Reader r(bytes, "OFPQ");
  r.expect_magic("OFPQ");
  r.expect_version(1);
  ItqModel m;
  m.pca = get_pca_body(r, "OFPQ");
  const std::size_t bits_at = r.offset();
  m.bits = r.u32("bits");
  if (m.bits != m.pca.output_dim) {
    fail(ErrorKind::kFormat, "OFPQ: bit count " + std::to_string(m.bits) + " at offset " +
                                 std::to_string(bits_at) + " differs from PCA output dim " +
                                 std::to_string(m.pca.output_dim));
  }
  r.require(8ull * m.bits * m.bits, "rotation");
  m.rotation.resize(m.bits, m.bits);
  for (Eigen::Index row = 0; row < m.rotation.rows(); ++row) {
    for (Eigen::Index c = 0; c < m.rotation.cols(); ++c) m.rotation(row, c) = r.f64("rotation");
  }
  const std::uint32_t trace_len = r.u32("loss trace length");
  r.require(8ull * trace_len, "loss trace");
  m.loss_trace.resize(trace_len);
  for (double& v : m.loss_trace) v = r.f64("loss trace");
  r.expect_end();
  return m;
}

}  // namespace ofp
