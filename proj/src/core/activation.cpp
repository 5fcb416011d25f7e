#include "core/activation.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace msplab {

namespace {
double poly_eval(const std::vector<double>& m, double x) {
  // sum m[r] x^r / r!, Horner with factorial folded in
  double acc = 0.0;
  for (int r = static_cast<int>(m.size()) - 1; r >= 0; --r)
    acc = m[r] + acc * x / (r + 1);
  return acc;
}

double poly_deriv_eval(const std::vector<double>& m, double x) {
  if (m.size() <= 1) return 0.0;
  std::vector<double> d(m.begin() + 1, m.end());
  return poly_eval(d, x);
}

// Taylor coefficients t_r of 1/(1+e^{shift} e^{-x}) at 0 via series reciprocal.
std::vector<double> logistic_series(double shift, int upto) {
  std::vector<double> c(upto + 1);  // series of 1 + e^shift e^{-x}
  double es = std::exp(shift);
  double fact = 1.0;
  for (int j = 0; j <= upto; ++j) {
    if (j > 0) fact *= j;
    c[j] = es * ((j % 2) ? -1.0 : 1.0) / fact;
  }
  c[0] += 1.0;
  std::vector<double> t(upto + 1);
  t[0] = 1.0 / c[0];
  for (int n = 1; n <= upto; ++n) {
    double s = 0.0;
    for (int j = 1; j <= n; ++j) s += c[j] * t[n - j];
    t[n] = -s / c[0];
  }
  return t;  // sigma(x) = sum t_r x^r  => sigma^{(r)}(0) = r! t_r
}
}  // namespace

Activation Activation::shifted_sigmoid(double shift) {
  Activation a;
  a.kind_ = ActKind::ShiftedSigmoid;
  a.shift_ = shift;
  return a;
}

Activation Activation::truncated_power(int L) {
  if (L < 1 || L > 64) throw std::invalid_argument("truncated_power: L out of range");
  Activation a;
  a.kind_ = ActKind::TruncatedPower;
  a.L_ = L;
  return a;
}

Activation Activation::polynomial(std::vector<double> m) {
  if (m.empty()) throw std::invalid_argument("polynomial activation: empty coefficients");
  Activation a;
  a.kind_ = ActKind::Polynomial;
  a.m_ = std::move(m);
  return a;
}

Activation Activation::tanh_act() {
  Activation a;
  a.kind_ = ActKind::Tanh;
  return a;
}

Activation Activation::perturbed(const Activation& base, std::vector<double> rho) {
  Activation a;
  a.kind_ = ActKind::Perturbed;
  a.base_ = std::make_shared<Activation>(base);
  a.m_ = std::move(rho);
  return a;
}

double Activation::value(double x) const {
  switch (kind_) {
    case ActKind::ShiftedSigmoid:
      return 1.0 / (1.0 + std::exp(-x + shift_));
    case ActKind::Tanh:
      return std::tanh(x);
    case ActKind::Polynomial:
      return poly_eval(m_, x);
    case ActKind::TruncatedPower:
      if (x <= -1.0) { ++*clamps_; return 0.0; }
      if (x >= 1.0) { ++*clamps_; return std::pow(2.0, L_); }
      return std::pow(1.0 + x, L_);
    case ActKind::Perturbed:
      return base_->value(x) + poly_eval(m_, x);
  }
  return 0.0;
}

double Activation::deriv(double x) const {
  switch (kind_) {
    case ActKind::ShiftedSigmoid: {
      double s = 1.0 / (1.0 + std::exp(-x + shift_));
      return s * (1.0 - s);
    }
    case ActKind::Tanh: {
      double t = std::tanh(x);
      return 1.0 - t * t;
    }
    case ActKind::Polynomial:
      return poly_deriv_eval(m_, x);
    case ActKind::TruncatedPower:
      if (x <= -1.0 || x >= 1.0) { ++*clamps_; return 0.0; }
      return L_ * std::pow(1.0 + x, L_ - 1);
    case ActKind::Perturbed:
      return base_->deriv(x) + poly_deriv_eval(m_, x);
  }
  return 0.0;
}

std::vector<double> Activation::taylor_upto(int r) const {
  if (r < 0) throw std::invalid_argument("taylor_upto: negative order");
  std::vector<double> out(r + 1, 0.0);
  switch (kind_) {
    case ActKind::ShiftedSigmoid: {
      auto t = logistic_series(shift_, r);
      double fact = 1.0;
      for (int k = 0; k <= r; ++k) {
        if (k > 0) fact *= k;
        out[k] = t[k] * fact;
      }
      break;
    }
    case ActKind::Tanh: {
      auto t = logistic_series(0.0, r);
      double fact = 1.0, pow2 = 1.0;
      for (int k = 0; k <= r; ++k) {
        if (k > 0) { fact *= k; pow2 *= 2.0; }
        out[k] = k == 0 ? 0.0 : 2.0 * pow2 * t[k] * fact;
      }
      break;
    }
    case ActKind::Polynomial:
      for (int k = 0; k <= r && k < static_cast<int>(m_.size()); ++k) out[k] = m_[k];
      break;
    case ActKind::TruncatedPower: {
      double v = 1.0;
      for (int k = 0; k <= r; ++k) {
        out[k] = k <= L_ ? v : 0.0;
        v *= (L_ - k);  // L!/(L-k)! running product
      }
      break;
    }
    case ActKind::Perturbed: {
      out = base_->taylor_upto(r);
      for (int k = 0; k <= r && k < static_cast<int>(m_.size()); ++k) out[k] += m_[k];
      break;
    }
  }
  return out;
}

double Activation::taylor(int r) const { return taylor_upto(r)[r]; }

std::string Activation::describe() const {
  std::ostringstream s;
  switch (kind_) {
    case ActKind::ShiftedSigmoid: s << "shifted-sigmoid shift=" << shift_; break;
    case ActKind::Tanh: s << "tanh"; break;
    case ActKind::TruncatedPower: s << "truncated-power L=" << L_; break;
    case ActKind::Polynomial: {
      s << "polynomial m=";
      for (std::size_t i = 0; i < m_.size(); ++i) s << (i ? "," : "") << m_[i];
      break;
    }
    case ActKind::Perturbed: {
      s << "perturbed base=(" << base_->describe() << ") rho=";
      for (std::size_t i = 0; i < m_.size(); ++i) s << (i ? "," : "") << m_[i];
      break;
    }
  }
  return s.str();
}

}  // namespace msplab
