#include "pseudo_embedding.hpp"

#include <charconv>
#include <vector>

#include <Eigen/Dense>

#include "chromalign/text.hpp"

namespace chromalign::testing_support {
namespace {

// Columns of Q: orthonormalised by Householder QR of a fixed integer matrix.
Eigen::Matrix<double, kPseudoDim, 3> basis() {
  Eigen::Matrix<double, kPseudoDim, 3> raw;
  raw << 3, -1, 2,
         1, 4, -2,
        -2, 1, 5,
         4, 2, 1,
         0, -3, 2,
         1, 1, -4,
        -1, 5, 0,
         2, 0, 3;
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  return qr.householderQ() * Eigen::MatrixXd::Identity(kPseudoDim, 3);
}

}  // namespace

std::array<float, kPseudoDim> pseudo_embedding(std::string_view description) {
  static const Eigen::Matrix<double, kPseudoDim, 3> q = basis();
  std::vector<double> numbers;
  for (auto piece : split_whitespace(description)) {
    double v = 0.0;
    const auto res = std::from_chars(piece.data(), piece.data() + piece.size(), v);
    if (res.ec == std::errc() && res.ptr == piece.data() + piece.size()) numbers.push_back(v);
  }
  Eigen::Vector3d lab = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < 3 && i < numbers.size(); ++i) lab(Eigen::Index(2 - i)) = numbers[numbers.size() - 1 - i];
  const Eigen::Matrix<double, kPseudoDim, 1> v = q * lab;
  std::array<float, kPseudoDim> out{};
  for (std::size_t i = 0; i < kPseudoDim; ++i) out[i] = float(v(Eigen::Index(i)));
  return out;
}

}  // namespace chromalign::testing_support
