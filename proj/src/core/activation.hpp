#pragma once
// Activation functions with exact derivatives and Taylor coefficients at 0.
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace msplab {

enum class ActKind { ShiftedSigmoid, TruncatedPower, Polynomial, Tanh, Perturbed };

class Activation {
 public:
  static Activation shifted_sigmoid(double shift);
  static Activation truncated_power(int L);  // (1+x)^L on (-1,1), constant outside
  // sigma(x) = sum_r m[r] x^r / r!
  static Activation polynomial(std::vector<double> m);
  static Activation tanh_act();
  // base plus sum_r rho[r] x^r / r!
  static Activation perturbed(const Activation& base, std::vector<double> rho);

  double value(double x) const;
  double deriv(double x) const;
  double taylor(int r) const;                  // sigma^{(r)}(0)
  std::vector<double> taylor_upto(int r) const;

  ActKind kind() const { return kind_; }
  double shift() const { return shift_; }
  int power() const { return L_; }
  const std::vector<double>& coeffs() const { return m_; }
  std::uint64_t clamp_count() const { return *clamps_; }
  std::string describe() const;

 private:
  Activation() = default;
  ActKind kind_ = ActKind::Polynomial;
  double shift_ = 0.0;
  int L_ = 0;
  std::vector<double> m_;    // polynomial taylor coeffs / perturbation rho
  std::shared_ptr<Activation> base_;
  std::shared_ptr<std::uint64_t> clamps_ = std::make_shared<std::uint64_t>(0);
};

}  // namespace msplab
