#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ofp {

struct PcaModel {
  std::uint32_t input_dim = 0;
  std::uint32_t output_dim = 0;
  Eigen::VectorXd mean;                // input_dim
  Eigen::MatrixXd components;          // output_dim x input_dim, orthonormal rows
  Eigen::VectorXd explained_variance;  // output_dim, non-increasing

  friend bool operator==(const PcaModel& a, const PcaModel& b) {
    return a.input_dim == b.input_dim && a.output_dim == b.output_dim && a.mean == b.mean &&
           a.components == b.components && a.explained_variance == b.explained_variance;
  }
};

/// Top-`d` principal directions of the rows of `data` (n x D), via SVD of the
/// centered matrix. Each component is sign-fixed so its largest-magnitude
/// entry is positive. Directions beyond the numerical rank are completed from
/// the standard basis by Gram-Schmidt and carry zero variance.
PcaModel fit_pca(const Eigen::MatrixXd& data, std::uint32_t d);

Eigen::VectorXd pca_project(const PcaModel& model, std::span<const double> x);
Eigen::VectorXd pca_project(const PcaModel& model, std::span<const float> x);

/// Packed bit string: bit j lives in byte j/8 at position 7 - j%8; unused
/// trailing bits are zero.
struct BinaryCode {
  std::uint32_t bits = 0;
  std::vector<std::uint8_t> payload;

  BinaryCode() = default;
  explicit BinaryCode(std::uint32_t nbits) : bits(nbits), payload((nbits + 7) / 8, 0) {}

  static std::size_t bytes_for(std::uint32_t nbits) { return (nbits + 7) / 8; }

  bool bit(std::uint32_t j) const { return (payload[j / 8] >> (7 - j % 8)) & 1u; }
  void set_bit(std::uint32_t j, bool on) {
    const auto mask = static_cast<std::uint8_t>(1u << (7 - j % 8));
    if (on) {
      payload[j / 8] |= mask;
    } else {
      payload[j / 8] &= static_cast<std::uint8_t>(~mask);
    }
  }

  friend bool operator==(const BinaryCode&, const BinaryCode&) = default;
};

struct ItqModel {
  std::uint32_t bits = 0;
  PcaModel pca;                     // output_dim == bits
  Eigen::MatrixXd rotation;         // bits x bits, orthogonal
  std::vector<double> loss_trace;   // ||B - VR||_F^2 per iteration

  friend bool operator==(const ItqModel& a, const ItqModel& b) {
    return a.bits == b.bits && a.pca == b.pca && a.rotation == b.rotation &&
           a.loss_trace == b.loss_trace;
  }
};

using ItqObserver = std::function<void(std::uint32_t iteration, const Eigen::MatrixXd& rotation)>;

/// Seeded random orthogonal c x c matrix: QR of a Gaussian matrix with the
/// diagonal of R made non-negative.
Eigen::MatrixXd random_rotation(std::uint32_t c, std::uint64_t seed);

/// Iterative quantization: PCA to `bits` dimensions, then alternate
/// B = sign(VR) (sign(0) = +1) with the orthogonal Procrustes update of R.
/// `observer` sees R after every update.
ItqModel fit_itq(const Eigen::MatrixXd& data, std::uint32_t bits, std::uint32_t iters,
                 std::uint64_t seed, const ItqObserver& observer = {});

/// The projected, rotated vector whose signs form the code.
Eigen::VectorXd itq_embed(const ItqModel& model, std::span<const float> x);
BinaryCode itq_encode(const ItqModel& model, std::span<const float> x);

// Model files (little-endian, f64 matrices row-major):
//   OFPM: "OFPM" | 1 | D | d | mean | components | explained_variance
//   OFPQ: "OFPQ" | 1 | D | d | mean | components | explained_variance |
//         c | rotation | trace length | trace
std::vector<std::uint8_t> write_pca(const PcaModel& model);
PcaModel read_pca(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_itq(const ItqModel& model);
ItqModel read_itq(std::span<const std::uint8_t> bytes);

}  // namespace ofp
